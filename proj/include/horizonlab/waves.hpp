#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "horizonlab/metric.hpp"

namespace horizonlab {

/// Dirichlet data f(x0) on the cylinder r = a, compactly supported.
struct BoundaryData {
    std::function<double(double)> f;
    std::function<double(double)> df;
    double support_lo = 0.0;
    double support_hi = 0.0;
    std::string label;
};

/// amplitude * (exp(-(x0 - center)^2 / (2 sigma^2)) - cut) inside the support
/// where the Gaussian exceeds cut, zero outside; continuous.
BoundaryData gaussian_pulse(double center, double sigma, double amplitude = 1.0, double cut = 1e-16);

/// alpha f + beta g.
BoundaryData combine(const BoundaryData& f, double alpha, const BoundaryData& g, double beta);

/// f(x0 - shift).
BoundaryData shifted(const BoundaryData& f, double shift);

// ---------------------------------------------------------------------------
// Characteristic coordinates

/// phi1 is constant along dr/dx0 = b_-/g00 and phi2 along dr/dx0 = b_+/g00,
/// with phi1 = x0 + a and phi2 = -x0 + a on r = a.  Derivatives come from the
/// variational equation along each characteristic.
struct CharPoint {
    double phi1 = 0.0, phi2 = 0.0;
    double phi1_x0 = 0.0, phi1_r = 0.0;
    double phi2_x0 = 0.0, phi2_r = 0.0;
    bool valid = false;

    double y0() const { return 0.5 * (phi1 - phi2); }
    double y1() const { return 0.5 * (phi1 + phi2); }
    /// det d(y0, y1) / d(x0, r).
    double jacobian() const { return 0.5 * (phi1_x0 * phi2_r - phi1_r * phi2_x0); }
};

struct CharOptions {
    double atol = 1e-12;
    double rtol = 1e-11;
    /// Longest x0 span a characteristic may take to reach r = a; 0 selects
    /// 200 * length_scale.
    double max_time = 0.0;
};

/// Both coordinates at (x0, r) for r <= a.  A characteristic that does not
/// reach r = a within max_time leaves the point invalid.
CharPoint char_point(const RadialMetric& metric, double a, double x0, double r, const CharOptions& options = {});

struct CharMeshOptions {
    double x0_min = -5.0;
    double x0_max = 5.0;
    int n_x0 = 21;
    /// Inner mesh radius; 0 selects the largest trapped radius on the window
    /// plus a quarter of the gap to a (a / 2 without a trapped region).
    double r_min = 0.0;
    int n_r = 21;
    double jacobian_threshold = 1e-8;
    CharOptions characteristics{};
};

struct CharCoordinates {
    double a = 0.0;
    std::vector<double> x0;
    std::vector<double> r;
    std::vector<CharPoint> points;  ///< row-major, index i * r.size() + j
    double jacobian_min = 0.0;
    /// max over valid points of |g^ss|, |g^tt| relative to |g| |grad phi|^2.
    double max_nullity_residual = 0.0;
    /// max |y0 - x0|, |y1 - a| on r = a.
    double boundary_identity_defect = 0.0;
    std::size_t clipped = 0;

    const CharPoint& at(std::size_t i, std::size_t j) const { return points[i * r.size() + j]; }
};

/// Largest radius below a where both characteristic speeds are <= 0 at x0
/// (the trapped region), or nullopt if c_+ > 0 already near the origin.
std::optional<double> trapped_radius(const RadialMetric& metric, double x0, double a);

/// Needs a outside the trapped region at all mesh times; otherwise
/// ConfigurationError.  Jacobian below threshold raises
/// DegenerateCoordinatesError.
CharCoordinates build_char_coords(const RadialMetric& metric, double a, const CharMeshOptions& options = {});

/// g^{s tau} of the transformed metric at a mesh point.
double g_s_tau(const RadialMetric& metric, double x0, double r, const CharPoint& p);

/// The ingoing solution u(y0, y1) = f(y0 + y1 - a) of the 1+1 wave equation
/// with zero past data, on the mesh.
std::vector<double> dalembert_solve(const CharCoordinates& coords, const BoundaryData& f);

/// Outward normal derivative of the ingoing d'Alembert solution at y1 = a.
double dalembert_dn(const BoundaryData& f, double y0);

// ---------------------------------------------------------------------------
// Dirichlet-to-Neumann traces

enum class DNMethod { direct_fd, characteristic };
std::string to_string(DNMethod m);

struct DNSample {
    std::vector<double> x0;
    std::vector<double> f;
    std::vector<double> lambda_f;
    DNMethod method = DNMethod::direct_fd;
};

enum class Limiter { none, minmod, mc };

struct DirectOptions {
    int n_cells = 200;
    double cfl = 0.4;
    /// Radial weight r^k in the density sqrt(-g) = r^k / sqrt(q).  k = 0 is the
    /// two-dimensional density for which the DN maps agree exactly.
    int weight_exponent = 0;
    /// Unlimited slopes keep the scheme linear, so the DN map is linear to rounding.
    Limiter limiter = Limiter::none;
    /// Inner truncation radius; 0 places it 3 cells inside the trapped
    /// region, or at a / 2 with a non-reflecting boundary without one.
    double r_inner = 0.0;
    /// Output window and spacing; zeros select the support of f padded by
    /// 10% of its width and 1000 intervals.
    double x0_start = 0.0;
    double x0_end = 0.0;
    double dx0_out = 0.0;
    /// When positive, track max |state| over cells with r < region_radius.
    double region_radius = 0.0;
};

struct DirectResult {
    DNSample sample;
    double r_inner = 0.0;
    double h = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    bool trapped_inner = false;
    double max_abs_inside = 0.0;
};

/// Finite-volume solve of the radial wave equation on [r_inner, a] with
/// Dirichlet data f at r = a and zero past data; Lambda f = du/dr at r = a.
DirectResult dn_direct(const RadialMetric& metric, const BoundaryData& f, double a, const DirectOptions& options = {});

/// Lambda f through the characteristic coordinates: u = f(phi1 - a), so
/// du/dr = f'(phi1 - a) dphi1/dr on r = a.
DNSample dn_characteristic(const RadialMetric& metric, const BoundaryData& f, double a,
                           const std::vector<double>& x0_grid);

struct RefinementStudy {
    std::vector<int> n_cells;
    std::vector<double> h;
    std::vector<double> errors;  ///< sup-norm against the reference
    std::vector<double> orders;  ///< log2-style observed orders between successive grids
    bool monotone() const;
};

/// Runs dn_direct on each grid (concurrently) and compares against the
/// reference trace evaluated on each output grid.
RefinementStudy refinement_study(const RadialMetric& metric, const BoundaryData& f, double a,
                                 const std::vector<int>& n_cells,
                                 const std::function<std::vector<double>(const std::vector<double>&)>& reference,
                                 const DirectOptions& options = {}, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Isometry

/// Metric in the coordinate rho with r = psi(rho): g1^{00} = g^{00},
/// g1^{0 rho} = g^{0r} / psi', g1^{rho rho} = g^{rr} / psi'^2.
RadialMetric pullback_radial(const RadialMetric& metric, std::function<double(double)> psi,
                             std::function<double(double)> dpsi, const std::string& label);

struct IsometryOptions {
    CharMeshOptions mesh{};
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
    /// Probe data for the solution defect and the DN comparison.
    std::optional<BoundaryData> probe;
    /// Offset above the horizon for the horizon-mapping defect.
    double horizon_offset = 1e-3;
    double dn_tolerance = 1e-6;
};

struct IsometryReport {
    std::vector<double> x0, r;    ///< mesh points of D_g
    std::vector<double> x0p, rp;  ///< their images under sigma
    double boundary_defect = 0.0;
    double solution_defect = 0.0;
    std::optional<double> horizon_defect;
    double max_newton_residual = 0.0;
    double dn_max_difference = 0.0;
    bool dn_match = false;
};

/// sigma = (coordinates of g1)^{-1} o (coordinates of g), inverted pointwise
/// by Newton on the forward map of g1.
IsometryReport isometry_map(const RadialMetric& g, const RadialMetric& g1, double a,
                            const IsometryOptions& options = {});

}  // namespace horizonlab
