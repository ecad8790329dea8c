#include "zrp/lmatrix.hpp"
#include "zrp/dirac.hpp"

#include <cmath>
#include <stdexcept>

namespace zrp {

namespace {
constexpr double four_pi = 4.0 * 3.14159265358979323846;
}

Eigen::MatrixXcd build_L(const std::vector<Center>& centers, double energy)
{
    validate_centers(centers);
    const Kinematics kin = kinematics_from_energy(energy);
    const int N = static_cast<int>(centers.size());
    Eigen::MatrixXcd L(2 * N, 2 * N);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < N; ++m) {
            if (n == m) {
                L.block<2, 2>(2 * n, 2 * n) =
                    interaction_matrix(centers[n]) / (2.0 * kin.eps) -
                    Eigen::Matrix2cd::Identity();
            } else {
                const double d = (centers[n].position - centers[m].position).norm();
                L.block<2, 2>(2 * n, 2 * m) =
                    f_kernel(kin.k * d) * Eigen::Matrix2cd::Identity();
            }
        }
    }
    return L;
}

Eigen::MatrixXcd build_dL_dE(const std::vector<Center>& centers, double energy)
{
    validate_centers(centers);
    const Kinematics kin = kinematics_from_energy(energy);
    const double one_m_E2 = kin.k * kin.k;
    const int N = static_cast<int>(centers.size());
    Eigen::MatrixXcd D(2 * N, 2 * N);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < N; ++m) {
            if (n == m) {
                D.block<2, 2>(2 * n, 2 * n) =
                    interaction_matrix(centers[n]) / (2.0 * kin.eps * one_m_E2);
            } else {
                const double d = (centers[n].position - centers[m].position).norm();
                D.block<2, 2>(2 * n, 2 * m) =
                    (energy * d / kin.k) * g_kernel(kin.k * d) *
                    Eigen::Matrix2cd::Identity();
            }
        }
    }
    return D;
}

double det_L(const std::vector<Center>& centers, double energy)
{
    const Eigen::MatrixXcd L = build_L(centers, energy);
    const complex det = L.determinant();
    const double scale = std::max(std::abs(det), 1e-300);
    if (std::abs(det.imag()) > 1e-12 * std::max(scale, 1.0))
        throw std::runtime_error("det_L: determinant has a non-real residue");
    return det.real();
}

EigDecomposition eig_hermitian(const Eigen::MatrixXcd& L, double k)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(L);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
    EigDecomposition out;
    out.lambda = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    const double scale = k / std::sqrt(four_pi);
    for (int j = 0; j < out.vectors.cols(); ++j) {
        Eigen::VectorXcd v = out.vectors.col(j);
        int imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        const complex pivot = v[imax];
        if (std::abs(pivot) > 0.0)
            v *= std::abs(pivot) / pivot;
        out.vectors.col(j) = v * scale;
    }
    return out;
}

EigDecomposition eig_L(const std::vector<Center>& centers, double energy)
{
    const Kinematics kin = kinematics_from_energy(energy);
    return eig_hermitian(build_L(centers, energy), kin.k);
}

} // namespace zrp
