#ifndef ZRP_ANALYTIC_HPP
#define ZRP_ANALYTIC_HPP

// Closed-form single-center results, the two-center universal functions and
// their critical curve, the existence map, truncated asymptotic series, and
// the Lambert W special function.  Everything here is independent of the
// generic branch-tracing solver and serves as its analytic cross-check.
//
// Two-center reduced variables: x = 1/R (inverse separation in reduced
// Compton wavelengths) and y = (varkappa +- kappa) R; branch energies are
// E = eps_branch(x, y) in rest-energy units.

#include <optional>
#include <stdexcept>
#include <vector>
#include <Eigen/Dense>

namespace zrp {

/// A closed-form single-center level; coupling_sign picks the combination
/// varkappa + sign * kappa that produces it.
struct SingleCenterState {
    double energy;
    double k;
    double eps;
    int coupling_sign;  ///< +1 or -1
};

/// All bound levels of one center with couplings (varkappa, kappa = |kappa_vec|):
/// eps_pm = (varkappa +- kappa)/2, kept when nonnegative;
/// E = (1 - eps^2)/(1 + eps^2), k = (varkappa +- kappa)/(1 + eps^2).
/// Requires kappa >= 0.  Ascending eps (i.e. "-" combination first).
std::vector<SingleCenterState> single_center_spectrum(double varkappa, double kappa);

/// Unit eigenspinors of kappa_vec . sigma with eigenvalues +|kappa_vec| and
/// -|kappa_vec|; the standard basis pair when kappa_vec = 0.
struct SpinorPair {
    Eigen::Vector2cd plus;
    Eigen::Vector2cd minus;
};
SpinorPair single_center_spinors(const Eigen::Vector3d& kappa_vec);

/// Principal branch of the Lambert W function, w e^w = z, for z >= -1/e.
/// Relative residual <= 1e-14; throws std::domain_error below the branch point.
double lambert_w0(double z);

enum class TwoCenterBranch { g_minus, g_plus, u };

/// One solved sample of a universal two-center function.
struct UniversalPoint {
    double x;
    double y;
    TwoCenterBranch branch;
    double eps;
};

/// Matching point of the two even-parity branches at fixed x.
struct CriticalPoint {
    double x;
    double y_c;
    double eps_gc;
};

/// Odd-parity universal function: the root of
///   (1/2) x y sqrt((1+eps)/(1-eps)) - 1 - x e^{-s/x}/s = 0,  s = sqrt(1-eps^2),
/// present for y >= 1 (with eps_u(x, 1) = 1 exactly); absent otherwise.
std::optional<double> solve_eps_u(double x, double y);

/// Even-parity universal function: same equation with +x e^{-s/x}/s.  Returns
/// the lower branch for y < -1, both branches for -1 <= y < y_c(x) (at
/// y = -1 the upper branch is exactly 1), both labels with the common value
/// at a detected tangency, and nothing beyond y_c(x).
std::vector<UniversalPoint> solve_eps_g(double x, double y);

/// Fold point (y_c, eps_gc) of the even-parity branches, Newton-refined to
/// residual 1e-13.  Throws std::runtime_error naming the last iterate on
/// non-convergence.
CriticalPoint critical_point(double x);

/// The x solving y_c(x) = 1, with the matching eps_gc; bisection over
/// critical_point.
CriticalPoint find_xc();

struct ExistenceFlags {
    bool g_minus;
    bool g_plus;
    bool u;
};

/// Branch existence at (x, y): g_minus for y <= y_c(x), g_plus for
/// -1 <= y <= y_c(x), u for y >= 1.
ExistenceFlags existence_map(double x, double y);

/// Truncated asymptotic approximations of the universal functions, evaluated
/// exactly as printed (no resummation).
enum class SeriesId {
    g_upper_large_separation,  ///< eps_g^(+), x -> 0+, Lambert-W form
    g_upper_near_edge,         ///< eps_g^(+), y -> -1+
    g_lower_deep_coupling,     ///< eps_g^(-), y -> -infinity
    u_large_separation,        ///< eps_u, x -> 0+, Lambert-W form
    u_near_edge,               ///< eps_u, y -> 1+
    u_deep_coupling            ///< eps_u, y -> +infinity
};
double series_eval(SeriesId id, double x, double y);

/// Near-threshold (nonrelativistic) two-center levels
///   E ~= 1 - (1/(2R^2)) [y + W0(+-e^{-y})]^2,  y = (varkappa +- kappa) R,
/// with + for even and - for odd parity; levels outside the W-domain are
/// omitted.  small_x_valid is false when 1/R > 0.1.
struct NonrelLevel {
    TwoCenterBranch branch;  ///< g_plus or u
    int coupling_sign;       ///< +1 or -1
    double energy;
};
struct NonrelResult {
    bool small_x_valid;
    std::vector<NonrelLevel> levels;
};
NonrelResult nonrel_energies(double R, double varkappa, double kappa);

/// Single-center analogue, E_pm ~= 1 - (varkappa +- kappa)^2 / 2 for the
/// combinations with nonnegative coupling.
std::vector<double> nonrel_energies_single_center(double varkappa, double kappa);

/// Closed-form branch slope d lambda/dE for the symmetric two-center system:
///   (1/(2 eps k)) [(1 + sigma e^{-kR}) + eps^2 (1 - sigma e^{-kR}
///                                             - 2 sigma e^{-kR}/(kR))],
/// sigma = +1 for even, -1 for odd parity.
double two_center_slope(double energy, int sigma, double R);

} // namespace zrp

#endif
