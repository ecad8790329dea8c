#ifndef ZRP_GREEN_HPP
#define ZRP_GREEN_HPP

// Matrix Green's function of the contact-interaction Dirac problem: the free
// resolvent kernel plus a finite rank-correction sum over the basis functions
// of the coefficient-matrix eigenproblem at the probe energy.

#include <stdexcept>
#include <vector>
#include <Eigen/Dense>

#include "zrp/centers.hpp"

namespace zrp {

/// Thrown when the probe energy sits on (or within 1e-10 of) an eigenvalue
/// zero of the coefficient matrix, where the Green's function has a pole.
struct pole_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Free-particle kernel: prefactor k/(4 pi), diagonal blocks (E +- 1) f I,
/// off-diagonal blocks i k g (mu . sigma) with mu = (r - r_src)/|r - r_src|.
/// Throws std::domain_error for coincident points or E outside (-1, 1).
Eigen::Matrix4cd free_green(double energy, const Eigen::Vector3d& r,
                            const Eigen::Vector3d& r_src);

/// Full kernel
///   G = G0 - (1/eps) sum_a lambda_a^{-1} S_a(E, r) S_a(E, r_src)^dag
/// over all 2N eigenpairs at the probe energy.  Throws pole_error when some
/// |lambda_a| <= 1e-10, std::domain_error for on-center or coincident points.
Eigen::Matrix4cd full_green(double energy, const Eigen::Vector3d& r,
                            const Eigen::Vector3d& r_src,
                            const std::vector<Center>& centers);

/// Minimum |lambda_a(E)| over branches for each grid energy; the minima mark
/// the pole locations of the full kernel.
std::vector<std::pair<double, double>> green_pole_scan(
    const std::vector<Center>& centers, const std::vector<double>& grid);

} // namespace zrp

#endif
