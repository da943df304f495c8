#include "horizonlab/app/compare.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "horizonlab/app/csv.hpp"

namespace horizonlab::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::optional<double> to_number(const std::string& s) {
    if (s == "nan") return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

/// |a - b| with equal non-finite values counting as zero.
double difference(double a, double b) {
    if (a == b || (std::isnan(a) && std::isnan(b))) return 0.0;
    return std::abs(a - b);
}

json load_summary(const fs::path& dir) {
    const fs::path p = dir / "summary.json";
    if (!fs::exists(p)) throw IncompatibleRuns(dir.string() + " has no summary.json");
    try {
        return json::parse(read_file(p));
    } catch (const json::exception& e) {
        throw IncompatibleRuns(p.string() + " is not valid JSON: " + e.what());
    }
}

void flatten(const json& j, const std::string& path, std::vector<std::pair<std::string, json>>& out) {
    if (j.is_object())
        for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, path + "/" + it.key(), out);
    else if (j.is_array())
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "/" + std::to_string(i), out);
    else
        out.emplace_back(path, j);
}

void compare_csv(const std::string& name, const CsvData& a, const CsvData& b, const CompareOptions& o,
                 CompareReport& rep) {
    if (a.header != b.header) {
        rep.problems.push_back(name + ": headers differ");
        return;
    }
    auto keep = [&](const CsvData& d) {
        std::vector<const std::vector<std::string>*> rows;
        for (const auto& r : d.rows) {
            if (o.range) {
                const auto x = r.empty() ? std::nullopt : to_number(r[0]);
                if (!x || *x < o.range->first || *x > o.range->second) continue;
            }
            rows.push_back(&r);
        }
        return rows;
    };
    const auto ra = keep(a), rb = keep(b);
    if (ra.size() != rb.size()) {
        rep.problems.push_back(name + ": row counts differ (" + std::to_string(ra.size()) + " vs " +
                               std::to_string(rb.size()) + ")");
        return;
    }
    for (std::size_t c = 0; c < a.header.size(); ++c) {
        if (!o.columns.empty() && std::find(o.columns.begin(), o.columns.end(), a.header[c]) == o.columns.end())
            continue;
        ColumnDiff d{name, a.header[c]};
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < ra.size(); ++i) {
            const std::string& sa = (*ra[i])[c];
            const std::string& sb = (*rb[i])[c];
            const auto va = to_number(sa), vb = to_number(sb);
            if (va && vb) {
                const double e = difference(*va, *vb);
                d.max_abs = std::max(d.max_abs, std::isnan(e) ? INFINITY : e);
                sum_sq += e * e;
                ++d.count;
            } else if (sa != sb) {
                ++d.text_mismatches;
            }
        }
        d.rms = d.count ? std::sqrt(sum_sq / d.count) : 0.0;
        if (d.count == 0 && d.text_mismatches == 0 && !o.columns.empty()) {
            rep.columns.push_back(d);
            continue;
        }
        if (d.text_mismatches) rep.problems.push_back(name + ": column " + d.column + " has differing text cells");
        rep.max_abs = std::max(rep.max_abs, d.max_abs);
        rep.columns.push_back(d);
    }
}

json diff_json(const ColumnDiff& d, bool with_file) {
    json j = {{"column", d.column}, {"count", d.count}, {"max_abs", d.max_abs}, {"rms", d.rms}};
    if (with_file) j["file"] = d.file;
    if (d.text_mismatches) j["text_mismatches"] = d.text_mismatches;
    return j;
}

}  // namespace

json CompareReport::to_json() const {
    json cols = json::array(), res = json::array();
    for (const auto& c : columns) cols.push_back(diff_json(c, true));
    for (const auto& r : results) res.push_back(diff_json(r, false));
    return {{"task", task},      {"tolerance", tolerance}, {"max_abs", max_abs},
            {"within_tolerance", within_tolerance()},      {"problems", problems}, {"unmatched", unmatched},
            {"columns", cols},   {"results", res}};
}

CompareReport compare_runs(const fs::path& a, const fs::path& b, const CompareOptions& o) {
    const json sa = load_summary(a), sb = load_summary(b);
    const std::string ta = sa.value("task", ""), tb = sb.value("task", "");
    if (ta != tb) throw IncompatibleRuns("incompatible task types: " + ta + " vs " + tb);

    CompareReport rep;
    rep.task = ta;
    rep.tolerance = o.tolerance;
    std::set<std::string> fa, fb;
    for (const auto& f : sa.value("artifacts", json::array())) fa.insert(f.get<std::string>());
    for (const auto& f : sb.value("artifacts", json::array())) fb.insert(f.get<std::string>());
    std::size_t shared = 0;
    for (const auto& f : fa) {
        if (f.size() < 4 || f.substr(f.size() - 4) != ".csv") continue;
        if (!fb.count(f)) {
            rep.unmatched.push_back(f + " only in " + a.string());
            continue;
        }
        ++shared;
        compare_csv(f, parse_csv(read_file(a / f)), parse_csv(read_file(b / f)), o, rep);
    }
    for (const auto& f : fb)
        if (f.size() >= 4 && f.substr(f.size() - 4) == ".csv" && !fa.count(f))
            rep.unmatched.push_back(f + " only in " + b.string());
    if (shared == 0) rep.problems.push_back("the runs share no CSV artifact");

    std::vector<std::pair<std::string, json>> la, lb;
    flatten(sa.value("results", json::object()), "", la);
    flatten(sb.value("results", json::object()), "", lb);
    const std::map<std::string, json> mb(lb.begin(), lb.end());
    for (const auto& [path, va] : la) {
        const auto it = mb.find(path);
        if (it == mb.end() || !va.is_number() || !it->second.is_number()) continue;
        const double e = difference(va.get<double>(), it->second.get<double>());
        rep.results.push_back({"summary.json", path, 1, e, e, 0});
    }
    return rep;
}

}  // namespace horizonlab::app
