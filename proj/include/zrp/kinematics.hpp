#ifndef ZRP_KINEMATICS_HPP
#define ZRP_KINEMATICS_HPP

// Bound-state kinematics in natural units (hbar = c = m = 1): energies are
// measured in units of the particle rest energy, lengths in reduced Compton
// wavelengths.  All formulas below assume the bound-state window |E| < 1.

namespace zrp {

/// Derived kinematic quantities attached to a bound-state energy E.
struct Kinematics {
    double energy;   ///< E, in (-1, 1)
    double k;        ///< exponential range parameter, k = sqrt(1 - E^2)
    double eps;      ///< lower/upper component ratio, eps = sqrt((1-E)/(1+E))
};

/// Build Kinematics from an energy in the open bound-state window (-1, 1).
/// Throws std::domain_error outside the window.
Kinematics kinematics_from_energy(double energy);

/// Inverse map: E = (1 - eps^2) / (1 + eps^2), requires eps > 0.
double energy_from_epsilon(double eps);

/// The two eps branches of fixed k in (0, 1]: the E >= 0 branch is
/// eps = k / (1 + sqrt(1 - k^2)), the E < 0 branch its reciprocal-conjugate
/// eps = (1 + sqrt(1 - k^2)) / k.
double epsilon_from_k(double k, bool negative_energy_branch = false);

/// Screened-Coulomb radial kernel f(z) = exp(-z)/z, z > 0.
double f_kernel(double z);

/// Its negated derivative g(z) = -f'(z) = exp(-z) (1/z + 1/z^2), z > 0.
double g_kernel(double z);

} // namespace zrp

#endif
