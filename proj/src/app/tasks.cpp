#include "tasks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <typeinfo>

#include "horizonlab/app/csv.hpp"
#include "horizonlab/app/log.hpp"
#include "horizonlab/characteristics.hpp"
#include "horizonlab/error.hpp"
#include "horizonlab/parallel.hpp"
#include "horizonlab/stationary2d.hpp"
#include "horizonlab/waves.hpp"

namespace horizonlab::app {

using nlohmann::json;

Tolerances Tolerances::from_json(const json& j) {
    Tolerances t;
    auto opt = [&](const char* key) -> std::optional<double> {
        if (auto it = j.find(key); it != j.end()) return it->get<double>();
        return std::nullopt;
    };
    t.atol = opt("atol");
    t.rtol = opt("rtol");
    t.bisection = opt("bisection");
    t.picard = opt("picard");
    return t;
}

void Tolerances::apply(ode::Options& o) const {
    if (atol) o.atol = *atol;
    if (rtol) o.rtol = *rtol;
}

RadialOptions Tolerances::radial() const {
    RadialOptions r;
    apply(r.ode);
    return r;
}

ShootOptions Tolerances::shoot(unsigned threads) const {
    ShootOptions s;
    s.radial = radial();
    if (bisection) s.tol = *bisection;
    s.threads = threads;
    return s;
}

namespace {

/// Most specific library error name, for diagnostics.
std::string error_type(const std::exception& e) {
    if (dynamic_cast<const StepSizeCollapse*>(&e)) return "StepSizeCollapse";
    if (dynamic_cast<const NoHorizonError*>(&e)) return "NoHorizonError";
    if (dynamic_cast<const WindowTooShortError*>(&e)) return "WindowTooShortError";
    if (dynamic_cast<const ContractionError*>(&e)) return "ContractionError";
    if (dynamic_cast<const ResolutionError*>(&e)) return "ResolutionError";
    if (dynamic_cast<const DegenerateClassificationError*>(&e)) return "DegenerateClassificationError";
    if (dynamic_cast<const OrbitClassificationError*>(&e)) return "OrbitClassificationError";
    if (dynamic_cast<const DegenerateCoordinatesError*>(&e)) return "DegenerateCoordinatesError";
    if (dynamic_cast<const HyperbolicityError*>(&e)) return "HyperbolicityError";
    if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
    if (dynamic_cast<const Error*>(&e)) return "Error";
    return "InternalError";
}

json error_details(const std::exception& e) {
    if (const auto* c = dynamic_cast<const ContractionError*>(&e))
        return {{"lipschitz", c->lipschitz()},
                {"int_abs_derivative", c->int_abs_derivative()},
                {"int_t_abs_derivative", c->int_t_abs_derivative()}};
    if (const auto* h = dynamic_cast<const HyperbolicityError*>(&e)) return {{"x0", h->x0()}, {"r", h->r()}};
    if (const auto* s = dynamic_cast<const StepSizeCollapse*>(&e)) return {{"t", s->t()}, {"step", s->step()}};
    return nullptr;
}

/// Runs fn as a named subtask; numerical failures are recorded, preconditions propagate.
template <typename Fn>
bool subtask(TaskOutput& out, const std::string& name, Fn&& fn) {
    log(LogLevel::info, "subtask " + name);
    try {
        fn();
        out.subtasks.push_back({name, true, {}, {}, nullptr});
        return true;
    } catch (const PreconditionError&) {
        throw;
    } catch (const std::exception& e) {
        out.subtasks.push_back({name, false, error_type(e), e.what(), error_details(e)});
        return false;
    }
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = i + 1 == n ? b : a + (b - a) * i / (n - 1);
    return v;
}

Family parse_family(const std::string& s) { return s == "plus" ? Family::plus : Family::minus; }
Direction parse_direction(const std::string& s) { return s == "forward" ? Direction::forward : Direction::backward; }

HorizonKind parse_kind(const std::string& s) {
    if (s == "outer-black") return HorizonKind::outer_black;
    if (s == "inner-black") return HorizonKind::inner_black;
    if (s == "outer-white") return HorizonKind::outer_white;
    return HorizonKind::inner_white;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json fate_counts(const std::vector<Fate>& fates) {
    std::map<std::string, int> counts;
    for (Fate f : fates) ++counts[to_string(f)];
    return counts;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

CsvTable curve_table(const HorizonCurve& c) {
    CsvTable t({"x0", "r"});
    for (std::size_t i = 0; i < c.x0.size(); ++i) t.add_row({c.x0[i], c.r[i]});
    return t;
}

// ---------------------------------------------------------------------------

void task_trajectories(const TaskContext& ctx, TaskOutput& out) {
    const auto metric = make_radial_metric(ctx.doc.at("metric"));
    const json& p = ctx.params;
    const Family family = parse_family(p.at("family"));
    const Direction dir = parse_direction(p.value("direction", "forward"));
    const double x0_start = p.value("x0_start", 0.0);
    const double x0_min = p.at("x0_min"), x0_max = p.at("x0_max");
    const auto r0 = p.at("r0").get<std::vector<double>>();
    RadialOptions ro = ctx.tol.radial();
    ro.sample_times = linspace(x0_start, dir == Direction::forward ? x0_max : x0_min, p.value("n_samples", 201));

    std::vector<Trajectory> runs(r0.size());
    subtask(out, "integrate", [&] {
        parallel_for(r0.size(), ctx.threads, [&](std::size_t i) {
            runs[i] = integrate_radial(metric, family, r0[i], x0_start, dir, x0_min, x0_max, ro);
        });
        CsvTable paths({"run", "r0", "x0", "r"});
        CsvTable fates({"run", "r0", "fate", "x0_end", "r_end", "x0_zero"});
        std::vector<Fate> fs;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto& t = runs[i];
            for (std::size_t k = 0; k < t.x0.size(); ++k)
                paths.add_row({static_cast<long long>(i), r0[i], t.x0[k], t.r[k]});
            fates.add_row({static_cast<long long>(i), r0[i], to_string(t.fate), t.x0_end, t.r_end,
                           t.fate == Fate::hit_origin ? CsvTable::Cell(t.x0_zero) : CsvTable::Cell(std::string())});
            fs.push_back(t.fate);
        }
        out.artifacts.push_back({"trajectories.csv", paths.str()});
        out.artifacts.push_back({"fates.csv", fates.str()});
        out.results["family"] = to_string(family);
        out.results["direction"] = to_string(dir);
        out.results["runs"] = runs.size();
        out.results["fates"] = fate_counts(fs);
    });
}

void task_horizon(const TaskContext& ctx, TaskOutput& out) {
    const auto metric = make_radial_metric(ctx.doc.at("metric"));
    const json& p = ctx.params;
    const HorizonKind kind = parse_kind(p.value("kind", "outer-black"));
    const std::string method = p.value("method", "shooting");
    const double x0_min = p.at("x0_min"), x0_max = p.at("x0_max");
    const int n = p.value("n_samples", 401);
    ShootOptions so = ctx.tol.shoot(ctx.threads);
    so.n_samples = n;

    std::optional<HorizonCurve> curve;
    subtask(out, method, [&] {
        json limits = {{"kind", to_string(kind)}, {"method", method}, {"x0_min", x0_min}, {"x0_max", x0_max}};
        if (method == "picard") {
            PicardOptions po;
            po.T_init = p.value("picard_T", 0.0);
            if (ctx.tol.picard) po.tol = *ctx.tol.picard;
            po.radial = ctx.tol.radial();
            po.n_samples = n;
            const auto pr = picard_bounded_solution(*metric.acoustic_profile(), x0_min, x0_max, po);
            curve = pr.curve;
            limits["picard"] = {{"T", pr.state.T},
                                {"X", pr.state.X},
                                {"iterations", pr.state.iteration},
                                {"residual", pr.state.residual},
                                {"lipschitz", pr.state.lipschitz},
                                {"int_abs_derivative", pr.state.int_abs_derivative},
                                {"int_t_abs_derivative", pr.state.int_t_abs_derivative}};
        } else {
            const bool inner = kind == HorizonKind::inner_black || kind == HorizonKind::inner_white;
            curve = inner ? inner_separatrix(metric, kind, x0_min, x0_max, so)
                          : separatrix_shoot(metric, kind, x0_min, x0_max, so);
            limits["shooting"] = {{"bracket_width", curve->bracket_width},
                                  {"anchor_x0", curve->anchor_x0},
                                  {"anchor_r", curve->anchor_r},
                                  {"junction_defect", curve->junction_defect}};
        }
        limits["r_at_x0_min"] = curve->r.front();
        limits["r_at_x0_max"] = curve->r.back();
        limits["limit_minus_inf"] = optional_json(curve->limit_minus_inf);
        limits["limit_plus_inf"] = optional_json(curve->limit_plus_inf);
        out.artifacts.push_back({"horizon.csv", curve_table(*curve).str()});
        out.artifacts.push_back({"limits.json", dump(limits)});
        out.results["horizon"] = limits;
    });

    if (p.value("dynamic", false)) {
        const HorizonCurve dyn = dynamic_horizon(metric, x0_min, x0_max, n);
        out.artifacts.push_back({"dynamic.csv", curve_table(dyn).str()});
        if (curve) {
            const ContainmentReport c = containment(*curve, metric);
            out.results["containment"] = {{"observed", to_string(c.observed)},
                                          {"expected", to_string(c.expected)},
                                          {"consistent", c.consistent()},
                                          {"max_excess_event", c.max_excess_event},
                                          {"max_excess_dynamic", c.max_excess_dynamic},
                                          {"samples", c.samples}};
        }
    }

    for (const auto& which : p.value("crossings", json::array())) {
        const std::string w = which;
        subtask(out, w, [&] {
            const CrossingTime ct = w == "appearance" ? appearance_time(metric, x0_min, x0_max, so)
                                                      : disappearance_time(metric, x0_min, x0_max, so);
            out.results[w] = {{"x0", ct.x0},
                              {"zero_crossings", ct.zero_crossings},
                              {"multiple_crossings", ct.multiple_crossings}};
            out.artifacts.push_back({w + "_branch.csv", curve_table(ct.branch).str()});
        });
    }
}

void task_classify(const TaskContext& ctx, TaskOutput& out) {
    const auto metric = make_radial_metric(ctx.doc.at("metric"));
    const json& p = ctx.params;
    const auto times = p.at("times").get<std::vector<double>>();
    const auto radii = p.at("radii").get<std::vector<double>>();
    const int cone_pairs = p.value("cone_pairs", 0);

    subtask(out, "classify", [&] {
        CsvTable t({"x0", "r", "s_minus", "s_plus", "q", "c_minus", "c_plus", "xi0_plus", "xi0_minus", "verdict"});
        std::map<std::string, int> verdicts;
        for (double x0 : times)
            for (double r : radii) {
                const CharRoots roots = radial_char_roots(metric, x0, r);
                const CharSpeeds sp = char_speeds(metric, x0, r);
                std::vector<CsvTable::Cell> row{x0, r, roots.s_minus, roots.s_plus, roots.q, sp.c_minus, sp.c_plus};
                try {
                    const SurfaceClassification c = classify_surface(metric, x0, r);
                    row.insert(row.end(), {c.xi0_plus, c.xi0_minus, to_string(c.verdict)});
                    ++verdicts[to_string(c.verdict)];
                } catch (const DegenerateClassificationError&) {
                    row.insert(row.end(), {std::string(), std::string(), std::string("degenerate")});
                    ++verdicts["degenerate"];
                }
                t.add_row(std::move(row));
            }
        out.artifacts.push_back({"classify.csv", t.str()});
        out.results["points"] = times.size() * radii.size();
        out.results["verdicts"] = verdicts;
    });

    if (cone_pairs > 0) {
        subtask(out, "cone-pairing", [&] {
            const std::size_t n = times.size() * radii.size();
            std::vector<ConePairingReport> reps(n);
            parallel_for(n, ctx.threads, [&](std::size_t k) {
                const double x0 = times[k / radii.size()], r = radii[k % radii.size()];
                reps[k] = cone_pairing_check(radial_inverse_metric(metric, x0, r), cone_pairs, ctx.seed + k);
            });
            CsvTable t({"x0", "r", "n_vectors", "n_covectors", "n_pairs", "violations", "min_pairing"});
            std::size_t pairs = 0, violations = 0;
            double min_pairing = INFINITY;
            for (std::size_t k = 0; k < n; ++k) {
                const auto& c = reps[k];
                t.add_row({times[k / radii.size()], radii[k % radii.size()], static_cast<long long>(c.n_vectors),
                           static_cast<long long>(c.n_covectors), static_cast<long long>(c.n_pairs),
                           static_cast<long long>(c.violations), c.min_pairing});
                pairs += c.n_pairs;
                violations += c.violations;
                min_pairing = std::min(min_pairing, c.min_pairing);
            }
            out.artifacts.push_back({"cone.csv", t.str()});
            out.results["cone_pairing"] = {{"pairs", pairs}, {"violations", violations}, {"min_pairing", min_pairing}};
        });
    }
}

void task_stationary2d(const TaskContext& ctx, TaskOutput& out) {
    const auto metric = make_polar_metric(ctx.doc.at("metric"));
    const json& p = ctx.params;
    PolarOptions polar;
    ctx.tol.apply(polar.ode);

    const Ergosphere erg = locate_ergosphere(metric, uniform_theta_grid(p.value("n_theta", 256)));
    {
        CsvTable t({"theta", "r"});
        for (std::size_t i = 0; i < erg.theta.size(); ++i) t.add_row({erg.theta[i], erg.r[i]});
        out.artifacts.push_back({"ergosphere.csv", t.str()});
        out.results["ergosphere"] = {{"r_min", *std::min_element(erg.r.begin(), erg.r.end())},
                                     {"r_max", *std::max_element(erg.r.begin(), erg.r.end())},
                                     {"max_root_residual", erg.max_root_residual},
                                     {"non_characteristic", erg.non_characteristic()}};
    }

    if (p.contains("orbits")) {
        const json& o = p["orbits"];
        subtask(out, "orbits", [&] {
            OrbitSearchOptions opts;
            opts.polar = polar;
            opts.threads = ctx.threads;
            std::vector<ClosedOrbit> orbits;
            json searches = json::array();
            for (const auto& fam : o.value("families", json{"plus", "minus"})) {
                const Family f = parse_family(fam);
                const auto rep =
                    find_closed_orbits(metric, f, o.value("n_seeds", 6), ctx.seed, o.value("max_arc", 400.0), opts);
                searches.push_back({{"family", to_string(f)},
                                    {"seeds", rep.seeds},
                                    {"converged_seeds", rep.converged_seeds},
                                    {"orbits", rep.orbits.size()},
                                    {"diagnostics", rep.diagnostics}});
                orbits.insert(orbits.end(), rep.orbits.begin(), rep.orbits.end());
            }
            CsvTable t({"orbit", "family", "kind", "degenerate", "period", "section_r", "min_r", "max_r",
                        "closure_defect", "return_map_derivative", "attracting", "votes_black", "votes_white"});
            CsvTable paths({"orbit", "x0", "r", "theta"});
            json list = json::array();
            for (std::size_t i = 0; i < orbits.size(); ++i) {
                const auto& c = orbits[i];
                const auto id = static_cast<long long>(i);
                t.add_row({id, to_string(c.family), to_string(c.kind), c.degenerate ? "true" : "false", c.period,
                           c.section_r, c.min_r(), c.max_r(), c.closure_defect, c.return_map_derivative,
                           to_string(c.attracting), static_cast<long long>(c.votes_black),
                           static_cast<long long>(c.votes_white)});
                for (std::size_t k = 0; k < c.x0.size(); ++k) paths.add_row({id, c.x0[k], c.r[k], c.theta[k]});
                list.push_back({{"family", to_string(c.family)},
                                {"kind", to_string(c.kind)},
                                {"section_r", c.section_r},
                                {"degenerate", c.degenerate}});
            }
            out.artifacts.push_back({"orbits.csv", t.str()});
            out.artifacts.push_back({"orbit_paths.csv", paths.str()});
            out.results["orbit_search"] = searches;
            out.results["orbits"] = list;
            out.results["orbit_nesting_consistent"] = orbit_nesting_consistent(orbits);
        });
    }

    if (p.contains("census")) {
        const json& c = p["census"];
        subtask(out, "census", [&] {
            const auto rep = origin_census(metric, c.value("epsilon", 0.0), c.value("n_samples", 50), ctx.seed,
                                           c.value("max_arc", 50.0), polar, ctx.threads);
            CsvTable t({"theta0", "family", "fate", "x0_end", "r_end", "detail"});
            for (const auto& r : rep.runs)
                t.add_row({r.theta0, to_string(r.family), to_string(r.fate), r.x0_end, r.r_end, r.detail});
            out.artifacts.push_back({"census.csv", t.str()});
            std::vector<Fate> fates;
            for (const auto& r : rep.runs) fates.push_back(r.fate);
            out.results["census"] = {{"epsilon", rep.epsilon},
                                     {"direction", to_string(rep.direction)},
                                     {"in_hypothesis", rep.in_hypothesis},
                                     {"runs", rep.runs.size()},
                                     {"violators", rep.violators.size()},
                                     {"passed", rep.passed()},
                                     {"fates", fate_counts(fates)}};
        });
    }
}

/// Output grid of dn_direct with default window settings.
std::vector<double> dn_grid(const BoundaryData& f) {
    const double w = f.support_hi - f.support_lo;
    const double lo = f.support_lo - 0.1 * w, hi = f.support_hi + 0.1 * w;
    const double dx = (hi - lo) / 1000.0;
    std::vector<double> x(1001);
    for (int k = 0; k <= 1000; ++k) x[k] = lo + k * dx;
    return x;
}

/// Flat-space traces: f' for the two-dimensional density, f' - f/a for r^2.
std::vector<double> analytic_trace(const BoundaryData& f, double a, int k, const std::vector<double>& x) {
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = f.df(x[i]) - (k == 2 ? f.f(x[i]) / a : 0.0);
    return v;
}

void task_wave_dn(const TaskContext& ctx, TaskOutput& out) {
    const auto metric = make_radial_metric(ctx.doc.at("metric"));
    const json& p = ctx.params;
    const double a = p.at("a");
    const json& pulse = p.at("pulse");
    const BoundaryData f = gaussian_pulse(pulse.at("center"), pulse.at("sigma"), pulse.value("amplitude", 1.0));
    const std::string method = p.value("method", "direct");
    const std::string reference = p.value("reference", "none");
    const int k = p.value("weight_exponent", 0);

    auto write_trace = [&](const DNSample& s) {
        CsvTable t({"x0", "f", "lambda_f"});
        for (std::size_t i = 0; i < s.x0.size(); ++i) t.add_row({s.x0[i], s.f[i], s.lambda_f[i]});
        out.artifacts.push_back({"dn.csv", t.str()});
    };

    if (method != "direct") {
        subtask(out, method, [&] {
            const auto grid = dn_grid(f);
            DNSample s;
            if (method == "characteristic") {
                s = dn_characteristic(metric, f, a, grid);
            } else {
                s.x0 = grid;
                for (double x : grid) s.f.push_back(f.f(x));
                s.lambda_f = analytic_trace(f, a, k, grid);
            }
            write_trace(s);
            out.results["method"] = method;
            out.results["samples"] = s.x0.size();
        });
        return;
    }

    auto grids = p.value("grids", std::vector<int>{200});
    std::sort(grids.begin(), grids.end());
    DirectOptions o;
    o.cfl = p.value("cfl", 0.4);
    o.weight_exponent = k;
    const std::string lim = p.value("limiter", "none");
    o.limiter = lim == "mc" ? Limiter::mc : lim == "minmod" ? Limiter::minmod : Limiter::none;

    subtask(out, "direct", [&] {
        std::vector<DirectResult> res(grids.size());
        parallel_for(grids.size(), ctx.threads, [&](std::size_t i) {
            DirectOptions oi = o;
            oi.n_cells = grids[i];
            res[i] = dn_direct(metric, f, a, oi);
        });
        const DirectResult& fine = res.back();
        write_trace(fine.sample);
        out.results["method"] = "direct";
        out.results["finest"] = {{"n_cells", grids.back()},
                                 {"r_inner", fine.r_inner},
                                 {"h", fine.h},
                                 {"dt", fine.dt},
                                 {"steps", fine.steps},
                                 {"trapped_inner", fine.trapped_inner}};
        if (reference == "none") return;
        const auto& x = fine.sample.x0;
        const std::vector<double> ref = reference == "characteristic" ? dn_characteristic(metric, f, a, x).lambda_f
                                                                       : analytic_trace(f, a, k, x);
        CsvTable t({"n_cells", "h", "dt", "error", "order"});
        std::vector<double> errors, orders;
        for (std::size_t i = 0; i < res.size(); ++i) {
            double e = 0.0;
            for (std::size_t j = 0; j < ref.size(); ++j) e = std::max(e, std::abs(res[i].sample.lambda_f[j] - ref[j]));
            errors.push_back(e);
            CsvTable::Cell order = std::string();
            if (i > 0) {
                orders.push_back(std::log(errors[i - 1] / e) / std::log(res[i - 1].h / res[i].h));
                order = orders.back();
            }
            t.add_row({static_cast<long long>(grids[i]), res[i].h, res[i].dt, e, order});
        }
        bool monotone = true;
        for (std::size_t i = 1; i < errors.size(); ++i) monotone = monotone && errors[i] < errors[i - 1];
        out.artifacts.push_back({"refinement.csv", t.str()});
        out.results["refinement"] = {{"reference", reference},
                                     {"errors", errors},
                                     {"orders", orders},
                                     {"monotone", monotone},
                                     {"min_order", orders.empty() ? json(nullptr)
                                                                  : json(*std::min_element(orders.begin(), orders.end()))}};
    });
}

/// One figure panel: a fan of curves of one family through (0, r0), each run
/// backward to x0_min and forward to x0_max.
void figure_bundle(const TaskContext& ctx, TaskOutput& out, const std::string& name, double A, Family family,
                   std::optional<HorizonKind> separatrix) {
    const json& p = ctx.params;
    const double x0_min = p.value("x0_min", -10.0), x0_max = p.value("x0_max", 10.0);
    const int n = p.value("n_samples", 201);
    const auto r0 = p.value("r0", std::vector<double>{0.2, 0.5, 0.9, 1.1, 2.0, 5.0});
    const auto metric = acoustic_to_radial(TimeProfile::constant(A));

    subtask(out, name, [&] {
        std::vector<Trajectory> fwd(r0.size()), bwd(r0.size());
        parallel_for(2 * r0.size(), ctx.threads, [&](std::size_t j) {
            const std::size_t i = j / 2;
            RadialOptions ro = ctx.tol.radial();
            if (j % 2 == 0) {
                ro.sample_times = linspace(0.0, x0_max, n);
                fwd[i] = integrate_radial(metric, family, r0[i], 0.0, Direction::forward, x0_min, x0_max, ro);
            } else {
                ro.sample_times = linspace(0.0, x0_min, n);
                bwd[i] = integrate_radial(metric, family, r0[i], 0.0, Direction::backward, x0_min, x0_max, ro);
            }
        });
        CsvTable paths({"curve", "r0", "x0", "r"});
        CsvTable fates({"curve", "r0", "fate_forward", "x0_end_forward", "r_end_forward", "fate_backward",
                        "x0_end_backward", "r_end_backward"});
        json panel = {{"A", A}, {"family", to_string(family)}};
        std::vector<Fate> ff, fb;
        for (std::size_t i = 0; i < r0.size(); ++i) {
            const auto id = static_cast<long long>(i);
            // Backward samples in increasing x0, then the forward run from x0 = 0.
            for (std::size_t k = bwd[i].x0.size(); k-- > 1;) paths.add_row({id, r0[i], bwd[i].x0[k], bwd[i].r[k]});
            for (std::size_t k = 0; k < fwd[i].x0.size(); ++k) paths.add_row({id, r0[i], fwd[i].x0[k], fwd[i].r[k]});
            fates.add_row({id, r0[i], to_string(fwd[i].fate), fwd[i].x0_end, fwd[i].r_end, to_string(bwd[i].fate),
                           bwd[i].x0_end, bwd[i].r_end});
            ff.push_back(fwd[i].fate);
            fb.push_back(bwd[i].fate);
        }
        out.artifacts.push_back({name + "/trajectories.csv", paths.str()});
        out.artifacts.push_back({name + "/fates.csv", fates.str()});
        panel["fates_forward"] = fate_counts(ff);
        panel["fates_backward"] = fate_counts(fb);
        if (separatrix) {
            ShootOptions so = ctx.tol.shoot(ctx.threads);
            so.n_samples = n;
            const HorizonCurve c = separatrix_shoot(metric, *separatrix, x0_min, x0_max, so);
            out.artifacts.push_back({name + "/separatrix.csv", curve_table(c).str()});
            double dev = 0.0;
            for (double r : c.r) dev = std::max(dev, std::abs(r - std::abs(A)));
            panel["separatrix"] = {{"kind", to_string(*separatrix)}, {"max_deviation_from_abs_A", dev}};
        }
        out.results[name] = panel;
    });
}

void task_figures(const TaskContext& ctx, TaskOutput& out) {
    const double A0 = ctx.params.value("A0", 1.0);
    figure_bundle(ctx, out, "fig1a", -A0, Family::plus, HorizonKind::outer_black);
    figure_bundle(ctx, out, "fig1b", -A0, Family::minus, std::nullopt);
    figure_bundle(ctx, out, "fig2a", A0, Family::plus, std::nullopt);
    figure_bundle(ctx, out, "fig2b", A0, Family::minus, HorizonKind::outer_white);
}

}  // namespace

TaskOutput run_task(const TaskContext& ctx) {
    TaskOutput out;
    const std::string task = ctx.doc.at("task");
    if (task == "trajectories") task_trajectories(ctx, out);
    else if (task == "horizon") task_horizon(ctx, out);
    else if (task == "classify") task_classify(ctx, out);
    else if (task == "stationary2d") task_stationary2d(ctx, out);
    else if (task == "wave-dn") task_wave_dn(ctx, out);
    else if (task == "figures") task_figures(ctx, out);
    else throw PreconditionError("unknown task " + task);
    return out;
}

}  // namespace horizonlab::app
