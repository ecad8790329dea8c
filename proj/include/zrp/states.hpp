#ifndef ZRP_STATES_HPP
#define ZRP_STATES_HPP

// Assembled bound-state wave functions, the indefinite pseudo-product under
// which they are orthonormal, normalization, cross-checkable sum rules, and
// probability-current diagnostics.
//
// An assembled bispinor is a sum of point-source terms
//   upper_n = f(k |r - r_n|) chi_n
//   lower_n = i eps g(k |r - r_n|) (mu_n . sigma) chi_n
// with mu_n the unit vector from center n to the field point.

#include <vector>
#include <Eigen/Dense>

#include "zrp/centers.hpp"
#include "zrp/dirac.hpp"
#include "zrp/kinematics.hpp"
#include "zrp/spectral.hpp"

namespace zrp {

/// Closed form of the two-exponential overlap integral
///   integral over R^3 of exp(-a r1) exp(-b r2)/(r1 r2)
/// for source separation R >= 0 (limit-stable at a = b and at R = 0).
double yukawa_overlap(double a, double b, double R);

/// Bispinor sum of point-source terms for arbitrary kinematics and stacked
/// 2-spinor coefficients.  Throws std::domain_error within 1e-12 of a center.
Eigen::Vector4cd assemble_bispinor(const Kinematics& kin,
                                   const Eigen::VectorXcd& coeff,
                                   const std::vector<Center>& centers,
                                   const Eigen::Vector3d& r);

/// Wave function of a solved bound state at a point.
Eigen::Vector4cd assemble_wavefunction(const BoundState& state,
                                       const std::vector<Center>& centers,
                                       const Eigen::Vector3d& r);

/// Basis function of the eigenvalue problem at arbitrary energy, assembled
/// from an eigenvector of the coefficient matrix.
Eigen::Vector4cd assemble_sturmian(double energy, const Eigen::VectorXcd& vec,
                                   const std::vector<Center>& centers,
                                   const Eigen::Vector3d& r);

/// Analytic rho -> 0 limit of the summed upper-component surface products:
///   sum_n (4 pi / (k_b k_a)) chi_bn^dag chi_an.
complex surface_overlap_beta_plus(const BoundState& bra, const BoundState& ket,
                                  const std::vector<Center>& centers);

/// Closed-form volume overlap of the upper components over all space:
///   (1/(k_b k_a)) sum_nn' chi_bn^dag chi_an' * yukawa_overlap(k_b, k_a, d_nn').
complex volume_overlap_beta_plus(const BoundState& bra, const BoundState& ket,
                                 const std::vector<Center>& centers);

struct PseudoProductResult {
    complex value;
    enum class Method { algebraic, definitional } method;
};

/// Indefinite pseudo-product in its operational (surface + volume) form:
///   [(E_b + E_a) <b|beta+ a> + (1/2) sum_n surface K-limits]
///     / sqrt((E_b + 1)(E_a + 1)).
PseudoProductResult pseudo_product(const BoundState& bra, const BoundState& ket,
                                   const std::vector<Center>& centers);

/// Self pseudo-product in the independent algebraic form
///   (2 pi / k^3) [(1 - eps^2) sum_nn' chi^dag chi' e^{-k d} + eps sum_n chi^dag K chi].
double pseudo_self_algebraic(const BoundState& s, const std::vector<Center>& centers);

/// Self pseudo-product through the branch-slope relation
///   (4 pi eps / k^2) x^dag (dL/dE) x.
double pseudo_self_from_slope(const BoundState& s, const std::vector<Center>& centers);

/// Self pseudo-product evaluated from its defining rho -> 0 limit by radial
/// and sphere quadrature with Richardson extrapolation; single center only.
PseudoProductResult pseudo_norm_definitional_single_center(
    const BoundState& s, const std::vector<Center>& centers);

/// Scale the coefficient vector so the self pseudo-product equals the state
/// signature.  A signature-0 (pseudo-null) state cannot be normalized this
/// way; its vector is scaled to unit Euclidean norm and left flagged.
BoundState normalize_state(BoundState state, const std::vector<Center>& centers);

/// Gram-reduce coefficient vectors of degenerate states under the
/// pseudo-product, then normalize every state.  States are modified in place.
void orthonormalize_states(std::vector<BoundState>& states,
                           const std::vector<Center>& centers);

/// Coefficient-level sum rules; all residuals are scale-normalized by the
/// largest triangle-inequality bound among the participating terms, which
/// stays meaningful when the terms themselves cancel to rounding noise.
enum class SumRule {
    energy_derivative,           ///< self rule tying K-terms to the dL/dE form
    cross_energy_orthogonality,  ///< bilinear rule behind E_b != E_a orthogonality
    epsilon_weighted,            ///< bilinear rule with eps-weighted kernels
    inverse_epsilon_weighted     ///< bilinear rule with 1/eps-weighted K-terms
};

/// The three bilinear rules hold only across distinct energies; calling them
/// with a.energy == b.energy throws std::invalid_argument.
double identity_residual(SumRule kind, const BoundState& a, const BoundState& b,
                         const std::vector<Center>& centers);

/// Volume integral of psi^dag psi over all space outside the sphere of
/// radius rho_inner around the single center, by adaptive radial quadrature
/// of sphere-surface integrals.  Cross-check for the closed shell form.
double radial_volume_integral_single_center(const BoundState& s,
                                            const std::vector<Center>& centers,
                                            double rho_inner);

/// Probability current density j_i = psi^dag alpha_i psi at a point value.
Eigen::Vector3d current_density(const Eigen::Vector4cd& psi);

/// Same, assembled from a bound state at a field point.
Eigen::Vector3d current_density(const BoundState& state,
                                const std::vector<Center>& centers,
                                const Eigen::Vector3d& r);

/// Net probability flux through the sphere of radius rho around center n.
double flux_through_sphere(const BoundState& state,
                           const std::vector<Center>& centers, int n, double rho);

/// Surface integral of |j| over the same sphere (scale for the flux check).
double abs_current_through_sphere(const BoundState& state,
                                  const std::vector<Center>& centers, int n,
                                  double rho);

} // namespace zrp

#endif
