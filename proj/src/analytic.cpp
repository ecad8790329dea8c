#include "zrp/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

#include "zrp/kinematics.hpp"

namespace zrp {

namespace {

constexpr double pi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Universal two-center equations, parametrized by eps = cos t, t in (0, pi).
// Working in t keeps both endpoints resolvable: s = sin t and the ratio
// sqrt((1+eps)/(1-eps)) = cot(t/2) stay accurate where cos t would round to 1.
// sigma = +1 selects the even-parity equation, -1 the odd-parity one.
// ---------------------------------------------------------------------------

double universal_f(double t, double x, double y, int sigma) {
    const double s = std::sin(t);
    const double ratio = std::cos(0.5 * t) / std::sin(0.5 * t);
    return 0.5 * x * y * ratio - 1.0 + sigma * x * std::exp(-s / x) / s;
}

double universal_df_dt(double t, double x, double y, int sigma) {
    const double s = std::sin(t);
    const double sh = std::sin(0.5 * t);
    return -0.25 * x * y / (sh * sh)
           - sigma * std::cos(t) * std::exp(-s / x) * (1.0 + x / s) / s;
}

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

/// Bisect a sign-change bracket to machine width, then Newton-polish in t.
double refine_root(double ta, double tb, double x, double y, int sigma) {
    double fa = universal_f(ta, x, y, sigma);
    for (int it = 0; it < 120 && tb - ta > 1e-18; ++it) {
        const double tm = 0.5 * (ta + tb);
        if (tm <= ta || tm >= tb) break;
        const double fm = universal_f(tm, x, y, sigma);
        if (fm == 0.0) return tm;
        if (sgn(fm) == sgn(fa)) {
            ta = tm;
            fa = fm;
        } else {
            tb = tm;
        }
    }
    double t = 0.5 * (ta + tb);
    for (int it = 0; it < 60; ++it) {
        const double f = universal_f(t, x, y, sigma);
        const double df = universal_df_dt(t, x, y, sigma);
        if (df == 0.0) break;
        const double step = f / df;
        const double tn = t - step;
        if (!(tn > ta && tn < tb)) break;
        t = tn;
        if (std::abs(step) <= 1e-18) break;
    }
    return t;
}

/// All roots of the chosen universal equation at (x, y), ascending in eps.
/// A 4000-point uniform t-grid is augmented with geometrically spaced points
/// near both endpoints (down to 1 - |eps| ~ 5e-30) so roots hugging eps = +-1
/// are still bracketed; near-tangent root pairs that fit between grid nodes
/// are recovered by locating the local |f| dip and re-bracketing around it.
std::vector<double> scan_universal(double x, double y, int sigma) {
    std::vector<double> ts;
    const int n_grid = 4000;
    ts.reserve(n_grid + 60);
    for (int j = 1; j < n_grid; ++j) ts.push_back(pi * j / n_grid);
    for (int p = 4; p < 30; ++p) {
        const double e = std::pow(10.0, -0.5 * p);
        ts.push_back(e);
        ts.push_back(pi - e);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    std::vector<double> fs(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) fs[i] = universal_f(ts[i], x, y, sigma);

    std::vector<double> troots;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (fs[i] == 0.0) {
            troots.push_back(ts[i]);
        } else if (sgn(fs[i]) * sgn(fs[i + 1]) < 0) {
            troots.push_back(refine_root(ts[i], ts[i + 1], x, y, sigma));
        }
    }

    // Dip recovery: same-sign local minimum of |f| that may hide a root pair.
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        const int s0 = sgn(fs[i]);
        if (s0 == 0 || sgn(fs[i - 1]) != s0 || sgn(fs[i + 1]) != s0) continue;
        if (std::abs(fs[i]) >= std::abs(fs[i - 1]) || std::abs(fs[i]) >= std::abs(fs[i + 1]))
            continue;
        if (std::abs(fs[i]) > 1e-3) continue;
        // Golden-section minimization of s0 * f over the enclosing triple.
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = ts[i - 1], b = ts[i + 1];
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = s0 * universal_f(c, x, y, sigma);
        double fd = s0 * universal_f(d, x, y, sigma);
        for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = s0 * universal_f(c, x, y, sigma);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = s0 * universal_f(d, x, y, sigma);
            }
        }
        const double tmin = 0.5 * (a + b);
        const double fmin = universal_f(tmin, x, y, sigma);
        if (sgn(fmin) == -s0) {
            troots.push_back(refine_root(ts[i - 1], tmin, x, y, sigma));
            troots.push_back(refine_root(tmin, ts[i + 1], x, y, sigma));
        } else if (std::abs(fmin) <= 1e-10) {
            troots.push_back(tmin);  // tangent double root
            troots.push_back(tmin);
        }
    }

    std::vector<double> roots;
    roots.reserve(troots.size());
    for (double t : troots) {
        double eps = std::cos(t);
        if (eps >= 1.0) eps = std::nextafter(1.0, 0.0);
        if (eps <= -1.0) eps = std::nextafter(-1.0, 0.0);
        roots.push_back(eps);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

void require_positive_x(double x, const char* who) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument(std::string(who) + ": x must be positive and finite");
}

// Even-parity residual and the tangency condition it is paired with at the
// fold point, in long double for the Newton polish.
struct FoldSystem {
    long double f1, f2;
    long double d1_dy, d1_de, d2_dy, d2_de;
};

FoldSystem fold_eval(long double y, long double eps, long double x) {
    const long double s = std::sqrt((1.0L - eps) * (1.0L + eps));
    const long double r = std::sqrt((1.0L + eps) / (1.0L - eps));
    const long double ex = std::exp(-s / x);
    FoldSystem out;
    out.f1 = 0.5L * x * y * r - 1.0L + x * ex / s;
    out.f2 = 0.5L * x * y * r + eps * (1.0L + x / s) * ex;
    out.d1_dy = 0.5L * x * r;
    out.d2_dy = out.d1_dy;
    out.d1_de = 0.5L * x * y * r / (s * s) + ex * (eps / (s * s)) * (1.0L + x / s);
    out.d2_de = 0.5L * x * y * r / (s * s)
                + ex * ((1.0L + x / s) + eps * eps * x / (s * s * s)
                        + (eps * eps / (x * s)) * (1.0L + x / s));
    return out;
}

} // namespace

std::vector<SingleCenterState> single_center_spectrum(double varkappa, double kappa) {
    if (!(kappa >= 0.0))
        throw std::invalid_argument("single_center_spectrum: kappa must be >= 0");
    std::vector<SingleCenterState> out;
    for (int sign : {-1, +1}) {
        const double c = varkappa + sign * kappa;
        const double eps = 0.5 * c;
        if (eps < 0.0) continue;
        const double denom = 1.0 + eps * eps;
        out.push_back({(1.0 - eps * eps) / denom, c / denom, eps, sign});
    }
    return out;
}

SpinorPair single_center_spinors(const Eigen::Vector3d& kappa_vec) {
    SpinorPair pair;
    const double kappa = kappa_vec.norm();
    if (kappa == 0.0) {
        pair.plus << 1.0, 0.0;
        pair.minus << 0.0, 1.0;
        return pair;
    }
    const double theta = std::acos(std::clamp(kappa_vec.z() / kappa, -1.0, 1.0));
    const double phi = std::atan2(kappa_vec.y(), kappa_vec.x());
    const std::complex<double> eip(std::cos(phi), std::sin(phi));
    pair.plus << std::cos(0.5 * theta), std::sin(0.5 * theta) * eip;
    pair.minus << std::sin(0.5 * theta), -std::cos(0.5 * theta) * eip;
    return pair;
}

double lambert_w0(double z) {
    const double inv_e = std::exp(-1.0);
    if (std::isnan(z) || z < -inv_e - 1e-15)
        throw std::domain_error("lambert_w0: argument below the branch point -1/e");
    if (z <= -inv_e) return -1.0;
    if (z == 0.0) return 0.0;

    const double p2 = 2.0 * (std::exp(1.0) * z + 1.0);
    if (p2 < 1e-4) {
        // Branch-point series in p = sqrt(2 (e z + 1)); Halley stalls near the
        // branch point (f' -> 0 amplifies rounding in w e^w - z), while the
        // 6-term series error is below 2e-16 for p < 1e-2. Evaluate z + 1/e
        // with a two-part constant: the cancellation z + hi is exact, and the
        // lo word restores the bits of 1/e beyond double precision.
        const double lo = -1.2428753672788363e-17;  // 1/e - double(1/e)
        const double d = (z + inv_e) + lo;
        const double p = std::sqrt(std::max(2.0 * std::exp(1.0) * d, 0.0));
        return -1.0
               + p * (1.0
                      + p * (-1.0 / 3.0
                             + p * (11.0 / 72.0
                                    + p * (-43.0 / 540.0
                                           + p * (769.0 / 17280.0 - p * 221.0 / 8505.0)))));
    }

    double w;
    if (z < -0.25) {
        const double p = std::sqrt(p2);
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
    } else if (z < 2.0) {
        w = std::log1p(z);
    } else {
        const double l1 = std::log(z), l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - z;
        const double denom = ew * (w + 1.0) - 0.5 * (w + 2.0) * f / (w + 1.0);
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
    }
    return std::max(w, -1.0);
}

std::optional<double> solve_eps_u(double x, double y) {
    require_positive_x(x, "solve_eps_u");
    if (y == 1.0) return 1.0;  // boundary: the root sits exactly at eps = 1
    const std::vector<double> roots = scan_universal(x, y, -1);
    if (roots.empty()) return std::nullopt;
    return roots.back();
}

std::vector<UniversalPoint> solve_eps_g(double x, double y) {
    require_positive_x(x, "solve_eps_g");
    std::vector<double> roots = scan_universal(x, y, +1);
    if (roots.size() > 2) roots = {roots.front(), roots.back()};

    std::vector<UniversalPoint> out;
    if (roots.size() == 2) {
        out.push_back({x, y, TwoCenterBranch::g_minus, roots[0]});
        out.push_back({x, y, TwoCenterBranch::g_plus, roots[1]});
    } else if (roots.size() == 1) {
        TwoCenterBranch branch = TwoCenterBranch::g_minus;
        if (y > -1.0 && roots[0] > critical_point(x).eps_gc)
            branch = TwoCenterBranch::g_plus;
        out.push_back({x, y, branch, roots[0]});
    }
    if (y == -1.0)
        out.push_back({x, y, TwoCenterBranch::g_plus, 1.0});  // boundary limit value
    return out;
}

CriticalPoint critical_point(double x) {
    require_positive_x(x, "critical_point");
    const long double lx = x;

    // Eliminating y between the two fold equations leaves a single function of
    // eps: h(eps) = -1 + e^{-s/x} (x/s - eps (1 + x/s)).  It runs from +inf at
    // eps -> -1 to -2 at eps -> 1, so a sign change always exists; scan
    // log-spaced in 1 + eps to resolve folds collapsing onto eps = -1.
    const auto h = [lx](long double del) {
        const long double eps = del - 1.0L;
        const long double s = std::sqrt(del * (2.0L - del));
        return -1.0L + std::exp(-s / lx) * (lx / s - eps * (1.0L + lx / s));
    };
    const int n = 4000;
    const long double lo_exp = -30.0L;
    const long double hi_exp = std::log10(2.0L) - 1e-12L;
    long double prev_del = std::pow(10.0L, lo_exp);
    long double prev_h = h(prev_del);
    long double eps0 = std::numeric_limits<long double>::quiet_NaN();
    for (int j = 1; j <= n; ++j) {
        const long double del = std::pow(10.0L, lo_exp + (hi_exp - lo_exp) * j / n);
        const long double hj = h(del);
        if ((prev_h > 0.0L) != (hj > 0.0L)) {
            long double a = prev_del, b = del;
            for (int it = 0; it < 200 && b - a > 1e-25L; ++it) {
                const long double m = 0.5L * (a + b);
                if ((h(m) > 0.0L) == (prev_h > 0.0L))
                    a = m;
                else
                    b = m;
            }
            eps0 = 0.5L * (a + b) - 1.0L;
            break;
        }
        prev_del = del;
        prev_h = hj;
    }
    if (std::isnan(static_cast<double>(eps0)))
        throw std::runtime_error("critical_point: no fold bracket found");

    // y from the even-parity equation at the fold eps.
    const auto y_of = [lx](long double eps) {
        const long double s = std::sqrt((1.0L - eps) * (1.0L + eps));
        const long double r = std::sqrt((1.0L + eps) / (1.0L - eps));
        return (1.0L - lx * std::exp(-s / lx) / s) / (0.5L * lx * r);
    };

    long double y = y_of(eps0), eps = eps0;
    const auto residual = [lx](long double yy, long double ee) {
        const FoldSystem fs = fold_eval(yy, ee, lx);
        return std::max(std::abs(static_cast<double>(fs.f1)),
                        std::abs(static_cast<double>(fs.f2)));
    };
    double res = residual(y, eps);
    for (int it = 0; it < 200 && res > 1e-15; ++it) {
        const FoldSystem fs = fold_eval(y, eps, lx);
        const long double det = fs.d1_dy * fs.d2_de - fs.d1_de * fs.d2_dy;
        if (det == 0.0L) break;
        long double dy = (fs.f1 * fs.d2_de - fs.f2 * fs.d1_de) / det;
        long double de = (fs.d1_dy * fs.f2 - fs.d2_dy * fs.f1) / det;
        bool accepted = false;
        for (int halve = 0; halve < 60; ++halve) {
            const long double yn = y - dy, en = eps - de;
            if (en > -1.0L && en < 1.0L) {
                const double rn = residual(yn, en);
                if (rn < res) {
                    y = yn;
                    eps = en;
                    res = rn;
                    accepted = true;
                    break;
                }
            }
            dy *= 0.5L;
            de *= 0.5L;
        }
        if (!accepted) break;
    }
    if (res > 1e-13) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "critical_point: Newton stalled at residual %.3e (x=%.17g, y=%.17g, "
                      "eps=%.17g)",
                      res, x, static_cast<double>(y), static_cast<double>(eps));
        throw std::runtime_error(msg);
    }
    return {x, static_cast<double>(y), static_cast<double>(eps)};
}

CriticalPoint find_xc() {
    double lo = 1.0, hi = 1.4;
    double glo = critical_point(lo).y_c - 1.0;
    double ghi = critical_point(hi).y_c - 1.0;
    for (int it = 0; it < 60 && glo < 0.0; ++it) {
        lo *= 0.8;
        glo = critical_point(lo).y_c - 1.0;
    }
    for (int it = 0; it < 60 && ghi > 0.0; ++it) {
        hi *= 1.25;
        ghi = critical_point(hi).y_c - 1.0;
    }
    for (int it = 0; it < 120 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (critical_point(mid).y_c - 1.0 > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return critical_point(0.5 * (lo + hi));
}

ExistenceFlags existence_map(double x, double y) {
    require_positive_x(x, "existence_map");
    const double yc = critical_point(x).y_c;
    return {y <= yc, y >= -1.0 && y <= yc, y >= 1.0};
}

double series_eval(SeriesId id, double x, double y) {
    require_positive_x(x, "series_eval");
    const double x2 = x * x;
    switch (id) {
    case SeriesId::g_upper_large_separation: {
        if (y < -1.0)
            throw std::domain_error("series_eval: even-parity upper branch needs y >= -1");
        const double w = lambert_w0(std::exp(-y));
        const double b = y + w;
        return 1.0 - 0.5 * x2 * b * b
               + 0.125 * x2 * x2 * b * b * b / (1.0 + w) * (y - (y + 1.0) * w - w * w);
    }
    case SeriesId::u_large_separation: {
        if (y < 1.0)
            throw std::domain_error("series_eval: odd-parity branch needs y >= 1");
        const double w = lambert_w0(-std::exp(-y));
        const double b = y + w;
        // At y = 1 the branch point gives w = -1, b = 0; b^3 / (1 + w) -> 0.
        const double tail =
            1.0 + w != 0.0 ? b * b * b / (1.0 + w) * (y - (y + 1.0) * w - w * w) : 0.0;
        return 1.0 - 0.5 * x2 * b * b + 0.125 * x2 * x2 * tail;
    }
    case SeriesId::g_upper_near_edge: {
        if (y < -1.0)
            throw std::domain_error("series_eval: even-parity upper branch needs y >= -1");
        const double u1 = y + 1.0;
        return 1.0 - 0.125 * x2 * u1 * u1 - (1.0 / 64.0) * x2 * (x2 + 2.0) * u1 * u1 * u1;
    }
    case SeriesId::g_lower_deep_coupling: {
        if (y >= 0.0)
            throw std::domain_error("series_eval: deep-coupling lower branch needs y < 0");
        const double a = std::abs(y);
        return -1.0 + 2.0 / a - 8.0 / (x * std::pow(a, 1.5)) + 20.0 / (x2 * a * a)
               + 4.0 * (3.0 * x2 - 32.0) / (3.0 * x2 * x * std::pow(a, 2.5))
               - 4.0 * (27.0 * x2 - 71.0) / (3.0 * x2 * x2 * a * a * a);
    }
    case SeriesId::u_near_edge: {
        if (y < 1.0)
            throw std::domain_error("series_eval: odd-parity branch needs y >= 1");
        const double v = y - 1.0;
        const double d = x2 + 2.0;
        return 1.0 - 2.0 * x2 / d * v - (8.0 / 3.0) * x2 / std::pow(d, 2.5) * std::pow(v, 1.5)
               + (2.0 / 3.0) * x2 * (3.0 * x2 * x2 * x2 + 6.0 * x2 * x2 + 2.0 * x2 - 4.0)
                     / (d * d * d * d) * v * v;
    }
    case SeriesId::u_deep_coupling: {
        if (y <= 0.0)
            throw std::domain_error("series_eval: deep-coupling odd branch needs y > 0");
        return -1.0 + 2.0 / y + 4.0 / (x2 * y * y) - 8.0 / (3.0 * x2 * x * std::pow(y, 2.5))
               - 4.0 * (3.0 * x2 - 7.0) / (3.0 * x2 * x2 * y * y * y);
    }
    }
    throw std::invalid_argument("series_eval: unknown series id");
}

NonrelResult nonrel_energies(double R, double varkappa, double kappa) {
    if (!(R > 0.0)) throw std::invalid_argument("nonrel_energies: R must be positive");
    if (!(kappa >= 0.0)) throw std::invalid_argument("nonrel_energies: kappa must be >= 0");
    NonrelResult out;
    out.small_x_valid = (1.0 / R <= 0.1);
    for (int sign : {+1, -1}) {
        const double y = (varkappa + sign * kappa) * R;
        if (y >= -1.0) {
            const double b = y + lambert_w0(std::exp(-y));
            out.levels.push_back({TwoCenterBranch::g_plus, sign, 1.0 - 0.5 * b * b / (R * R)});
        }
        if (y >= 1.0) {
            const double b = y + lambert_w0(-std::exp(-y));
            out.levels.push_back({TwoCenterBranch::u, sign, 1.0 - 0.5 * b * b / (R * R)});
        }
    }
    return out;
}

std::vector<double> nonrel_energies_single_center(double varkappa, double kappa) {
    if (!(kappa >= 0.0))
        throw std::invalid_argument("nonrel_energies_single_center: kappa must be >= 0");
    std::vector<double> out;
    for (int sign : {-1, +1}) {
        const double c = varkappa + sign * kappa;
        if (c >= 0.0) out.push_back(1.0 - 0.5 * c * c);
    }
    return out;
}

double two_center_slope(double energy, int sigma, double R) {
    if (sigma != 1 && sigma != -1)
        throw std::invalid_argument("two_center_slope: sigma must be +1 or -1");
    if (!(R > 0.0)) throw std::invalid_argument("two_center_slope: R must be positive");
    const Kinematics kin = kinematics_from_energy(energy);
    const double q = sigma * std::exp(-kin.k * R);
    return ((1.0 + q) + kin.eps * kin.eps * (1.0 - q - 2.0 * q / (kin.k * R)))
           / (2.0 * kin.eps * kin.k);
}

} // namespace zrp
