#ifndef ZRP_CENTERS_HPP
#define ZRP_CENTERS_HPP

// Contact-interaction centers.  Each center carries a scalar coupling
// varkappa and a vector coupling kappa (both real, units of inverse length);
// together they define the Hermitian 2x2 strength matrix
// K = varkappa I + kappa . sigma acting on the upper 2-spinor at the center.

#include <vector>
#include <Eigen/Dense>

namespace zrp {

struct Center {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double varkappa = 0.0;
    Eigen::Vector3d kappa = Eigen::Vector3d::Zero();
};

/// Couplings recovered from a strength matrix.
struct Couplings {
    double varkappa;
    Eigen::Vector3d kappa;
};

/// K = varkappa I + kappa . sigma (Hermitian by construction).
Eigen::Matrix2cd interaction_matrix(const Center& c);

/// Inverse of interaction_matrix: varkappa = Re tr(K)/2, kappa_i = Re tr(sigma_i K)/2.
/// Throws std::invalid_argument if K is not Hermitian to 1e-12 (scaled).
Couplings decompose_interaction(const Eigen::Matrix2cd& K);

/// Sanity checks shared by every solver entry point: at least one center,
/// pairwise distinct positions (separation > 1e-9), finite couplings.
void validate_centers(const std::vector<Center>& centers);

} // namespace zrp

#endif
