#include "zrp/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace zrp {

namespace {

constexpr double pi = 3.14159265358979323846;

// G7/K15 nodes (positive half) and weights, the classic embedded pair.
constexpr double kronrod_nodes[8] = {
    0.000000000000000000000000000000000, 0.207784955007898467600689403773245,
    0.405845151377397166906606412076961, 0.586087235467691130294144838258730,
    0.741531185599394439863864773280788, 0.864864423359769072789712788640926,
    0.949107912342758524526189684047851, 0.991455371120812639206854697526329};
constexpr double kronrod_weights[8] = {
    0.209482141084727828012999174891714, 0.204432940075298892414161999234649,
    0.190350578064785409913256402421014, 0.169004726639267902826583426598550,
    0.140653259715525918745189590510238, 0.104790010322250183839876322541518,
    0.063092092629978553290700663189204, 0.022935322010529224963732008058970};
constexpr double gauss_weights[4] = {
    0.417959183673469387755102040816327, 0.381830050505118944950369775488975,
    0.279705391489276667901467771423780, 0.129484966168869693270611432679082};

struct PanelResult { double value; double error; };

PanelResult gk15(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fk[15];
    fk[7] = f(c);
    for (int i = 1; i < 8; ++i) {
        fk[7 - i] = f(c - h * kronrod_nodes[i]);
        fk[7 + i] = f(c + h * kronrod_nodes[i]);
    }
    double kres = kronrod_weights[0] * fk[7];
    for (int i = 1; i < 8; ++i)
        kres += kronrod_weights[i] * (fk[7 - i] + fk[7 + i]);
    double gres = gauss_weights[0] * fk[7];
    for (int i = 1; i < 4; ++i)
        gres += gauss_weights[i] * (fk[7 - 2 * i] + fk[7 + 2 * i]);
    return {kres * h, std::abs((kres - gres) * h)};
}

double adaptive_recurse(const std::function<double(double)>& f, double a,
                        double b, double tol_abs, int depth)
{
    const PanelResult r = gk15(f, a, b);
    // Accept on the budgeted tolerance, on the rounding floor of the panel
    // estimate (splitting below it refines noise, not error), or on width.
    if (r.error <= tol_abs || r.error <= 1e-14 * std::abs(r.value) ||
        b - a < 1e-14 * std::max(std::abs(a), 1.0))
        return r.value;
    if (depth > 60)
        throw std::runtime_error("adaptive_integral: subdivision limit reached");
    const double c = 0.5 * (a + b);
    return adaptive_recurse(f, a, c, 0.5 * tol_abs, depth + 1) +
           adaptive_recurse(f, c, b, 0.5 * tol_abs, depth + 1);
}

} // namespace

GaussRule gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration from the Chebyshev-like initial guess
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

double adaptive_integral(const std::function<double(double)>& f, double a,
                         double b, double rel_tol)
{
    const PanelResult first = gk15(f, a, b);
    const double tol_abs =
        rel_tol * std::max(std::abs(first.value), 1e-300);
    if (first.error <= tol_abs) return first.value;
    const double c = 0.5 * (a + b);
    return adaptive_recurse(f, a, c, 0.5 * tol_abs, 1) +
           adaptive_recurse(f, c, b, 0.5 * tol_abs, 1);
}

double yukawa_overlap_quadrature(double a, double b, double R)
{
    if (!(a > 0.0 && b > 0.0) || R < 0.0)
        throw std::domain_error("yukawa_overlap_quadrature: need a, b > 0, R >= 0");
    if (R == 0.0) {
        // coincident sources: 4 pi * integral of exp(-(a+b) r) dr
        const double cut = 60.0 / (a + b);
        return 4.0 * pi *
               adaptive_integral([&](double r) { return std::exp(-(a + b) * r); },
                                 0.0, cut, 1e-12);
    }
    // prolate spheroidal coordinates with foci at the two sources:
    //   r1 = (R/2)(xi + eta), r2 = (R/2)(xi - eta),
    //   dV = (R^3/8)(xi^2 - eta^2) dxi deta dphi
    const double xi_max = 1.0 + 60.0 / (R * (a + b));
    const GaussRule gxi = gauss_legendre(16);
    const GaussRule geta = gauss_legendre(64);
    const int panels = 30;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double x0 = 1.0 + (xi_max - 1.0) * p / panels;
        const double x1 = 1.0 + (xi_max - 1.0) * (p + 1) / panels;
        const double hx = 0.5 * (x1 - x0);
        for (int i = 0; i < 16; ++i) {
            const double xi = 0.5 * (x0 + x1) + hx * gxi.nodes[i];
            for (int j = 0; j < 64; ++j) {
                const double eta = geta.nodes[j];
                const double r1 = 0.5 * R * (xi + eta);
                const double r2 = 0.5 * R * (xi - eta);
                const double jac = 0.125 * R * R * R * (xi * xi - eta * eta);
                total += hx * gxi.weights[i] * geta.weights[j] *
                         std::exp(-a * r1 - b * r2) / (r1 * r2) * jac;
            }
        }
    }
    return 2.0 * pi * total;
}

complex sphere_surface_integral(const BispinorField& bra,
                                const BispinorField& ket,
                                const Eigen::Matrix4cd& weight,
                                const Eigen::Vector3d& center, double rho,
                                int n_theta, int n_phi)
{
    const GaussRule gth = gauss_legendre(n_theta);
    complex total = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double ct = gth.nodes[i];
        const double st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * pi * j / n_phi;
            const Eigen::Vector3d normal(st * std::cos(phi), st * std::sin(phi), ct);
            const Eigen::Vector3d point = center + rho * normal;
            const Eigen::Vector4cd vb = bra(point);
            const Eigen::Vector4cd va = ket(point);
            total += gth.weights[i] * (vb.adjoint() * weight * va)(0, 0);
        }
    }
    return total * (2.0 * pi / n_phi) * rho * rho;
}

double sphere_scalar_integral(
    const std::function<double(const Eigen::Vector3d&, const Eigen::Vector3d&)>& s,
    const Eigen::Vector3d& center, double rho, int n_theta, int n_phi)
{
    const GaussRule gth = gauss_legendre(n_theta);
    double total = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double ct = gth.nodes[i];
        const double st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * pi * j / n_phi;
            const Eigen::Vector3d normal(st * std::cos(phi), st * std::sin(phi), ct);
            total += gth.weights[i] * s(center + rho * normal, normal);
        }
    }
    return total * (2.0 * pi / n_phi) * rho * rho;
}

namespace {
const double rho_samples[3] = {1e-2, std::pow(10.0, -2.5), 1e-3};

// Lagrange extrapolation to rho = 0 through three samples; kills the linear
// and quadratic error terms.
template <typename T>
T lagrange_to_zero(const T v[3])
{
    T out{};
    for (int i = 0; i < 3; ++i) {
        double li = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            li *= rho_samples[j] / (rho_samples[j] - rho_samples[i]);
        }
        out += li * v[i];
    }
    return out;
}
} // namespace

double extrapolate_rho_to_zero(const std::function<double(double)>& value_at)
{
    double v[3];
    for (int i = 0; i < 3; ++i) v[i] = value_at(rho_samples[i]);
    return lagrange_to_zero(v);
}

complex extrapolate_rho_to_zero_c(const std::function<complex(double)>& value_at)
{
    complex v[3];
    for (int i = 0; i < 3; ++i) v[i] = value_at(rho_samples[i]);
    return lagrange_to_zero(v);
}

} // namespace zrp
