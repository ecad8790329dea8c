#ifndef ZRP_QUADRATURE_HPP
#define ZRP_QUADRATURE_HPP

// Numerical quadrature used for cross-checking closed forms (overlap
// integrals, surface limits) and for the few production quantities that are
// genuinely defined as integrals (sphere fluxes).  Closed-form production
// values are never computed through these routines.

#include <functional>
#include <vector>
#include <Eigen/Dense>

#include "zrp/dirac.hpp"

namespace zrp {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// Adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b] to the given
/// relative tolerance.  Throws std::runtime_error if the subdivision limit is
/// reached before the error estimate settles.
double adaptive_integral(const std::function<double(double)>& f, double a,
                         double b, double rel_tol = 1e-10);

/// Overlap of two exponential point-source profiles,
///   integral over R^3 of exp(-a r1) exp(-b r2) / (r1 r2),
/// with source separation R, evaluated in prolate spheroidal coordinates by
/// product Gauss-Legendre quadrature (phi integrated analytically).  For
/// R = 0 the radial integral is done adaptively instead.
double yukawa_overlap_quadrature(double a, double b, double R);

/// A bispinor-valued field sampled at a point.
using BispinorField = std::function<Eigen::Vector4cd(const Eigen::Vector3d&)>;

/// Surface integral over the sphere |x - center| = rho of
/// bra(x)^dag * weight * ket(x), by 32-point Gauss-Legendre in cos(theta)
/// times 64-point trapezoid in phi.
complex sphere_surface_integral(const BispinorField& bra,
                                const BispinorField& ket,
                                const Eigen::Matrix4cd& weight,
                                const Eigen::Vector3d& center, double rho,
                                int n_theta = 32, int n_phi = 64);

/// Same sphere rule for a real scalar integrand s(point, outward normal).
double sphere_scalar_integral(
    const std::function<double(const Eigen::Vector3d&, const Eigen::Vector3d&)>& s,
    const Eigen::Vector3d& center, double rho, int n_theta = 32, int n_phi = 64);

/// Richardson extrapolation of a sphere-limit quantity to rho -> 0 from
/// samples at rho = 1e-2, 1e-2.5, 1e-3 (leading error linear in rho).
double extrapolate_rho_to_zero(const std::function<double(double)>& value_at);
complex extrapolate_rho_to_zero_c(const std::function<complex(double)>& value_at);

} // namespace zrp

#endif
