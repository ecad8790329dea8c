#include "zrp/green.hpp"

#include <cmath>

#include "zrp/dirac.hpp"
#include "zrp/kinematics.hpp"
#include "zrp/lmatrix.hpp"
#include "zrp/states.hpp"

namespace zrp {

namespace {
constexpr double pi = 3.14159265358979323846;
constexpr double pole_guard = 1e-10;
} // namespace

Eigen::Matrix4cd free_green(double energy, const Eigen::Vector3d& r,
                            const Eigen::Vector3d& r_src)
{
    const Kinematics kin = kinematics_from_energy(energy);
    const Eigen::Vector3d d = r - r_src;
    const double dist = d.norm();
    if (dist < 1e-12)
        throw std::domain_error("free kernel is singular at coincident points");
    const Eigen::Vector3d mu = d / dist;
    const double f = f_kernel(kin.k * dist);
    const double g = g_kernel(kin.k * dist);
    const Eigen::Matrix2cd off =
        complex(0.0, kin.k * g) * sigma_dot(mu);
    Eigen::Matrix4cd G0 = Eigen::Matrix4cd::Zero();
    G0.topLeftCorner<2, 2>() = (energy + 1.0) * f * Eigen::Matrix2cd::Identity();
    G0.bottomRightCorner<2, 2>() = (energy - 1.0) * f * Eigen::Matrix2cd::Identity();
    G0.topRightCorner<2, 2>() = off;
    G0.bottomLeftCorner<2, 2>() = off;
    return kin.k / (4.0 * pi) * G0;
}

Eigen::Matrix4cd full_green(double energy, const Eigen::Vector3d& r,
                            const Eigen::Vector3d& r_src,
                            const std::vector<Center>& centers)
{
    validate_centers(centers);
    Eigen::Matrix4cd G = free_green(energy, r, r_src);
    const Kinematics kin = kinematics_from_energy(energy);
    const EigDecomposition dec = eig_L(centers, energy);
    for (Eigen::Index a = 0; a < dec.lambda.size(); ++a)
        if (std::abs(dec.lambda[a]) <= pole_guard)
            throw pole_error("probe energy within 1e-10 of a spectral pole");
    for (Eigen::Index a = 0; a < dec.lambda.size(); ++a) {
        const Eigen::Vector4cd at_r =
            assemble_sturmian(energy, dec.vectors.col(a), centers, r);
        const Eigen::Vector4cd at_src =
            assemble_sturmian(energy, dec.vectors.col(a), centers, r_src);
        G -= (1.0 / (kin.eps * dec.lambda[a])) * (at_r * at_src.adjoint());
    }
    return G;
}

std::vector<std::pair<double, double>> green_pole_scan(
    const std::vector<Center>& centers, const std::vector<double>& grid)
{
    validate_centers(centers);
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double e : grid) {
        const EigDecomposition dec = eig_L(centers, e);
        out.emplace_back(e, dec.lambda.cwiseAbs().minCoeff());
    }
    return out;
}

} // namespace zrp
