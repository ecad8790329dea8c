#ifndef ZRP_LMATRIX_HPP
#define ZRP_LMATRIX_HPP

// Assembly of the 2N x 2N Hermitian coefficient matrix L(E) whose null
// vectors at a bound-state energy carry the per-center 2-spinor amplitudes,
// together with its analytic energy derivative and spectral decompositions.
//
// Block structure (n, n' = 0..N-1, each block 2x2):
//   L_nn  = K_n / (2 eps) - I
//   L_nn' = f(k d_nn') I          (n != n')
// with K_n the center strength matrix, d_nn' the center separation, and
// (k, eps) the kinematics of E.

#include <vector>
#include <Eigen/Dense>

#include "zrp/centers.hpp"
#include "zrp/kinematics.hpp"

namespace zrp {

/// L(E) for the given centers; throws std::domain_error for E outside (-1, 1).
Eigen::MatrixXcd build_L(const std::vector<Center>& centers, double energy);

/// Analytic dL/dE:
///   diagonal blocks   K_n / (2 eps (1 - E^2)),
///   off-diagonal      (E d / k) g(k d) I.
Eigen::MatrixXcd build_dL_dE(const std::vector<Center>& centers, double energy);

/// Determinant of L(E) via LU; Hermiticity makes it real.  Throws
/// std::runtime_error if the imaginary residue exceeds 1e-12 (scaled).
double det_L(const std::vector<Center>& centers, double energy);

/// Full eigen-decomposition of L(E).
struct EigDecomposition {
    Eigen::VectorXd lambda;    ///< ascending eigenvalues
    Eigen::MatrixXcd vectors;  ///< columns: eigenvectors, y^dag y = k^2/(4 pi),
                               ///< largest-magnitude component rotated real positive
};

EigDecomposition eig_L(const std::vector<Center>& centers, double energy);

/// Same decomposition for a pre-built Hermitian matrix (k fixes the
/// eigenvector scale).  Used internally and by the spectral tracer.
EigDecomposition eig_hermitian(const Eigen::MatrixXcd& L, double k);

} // namespace zrp

#endif
