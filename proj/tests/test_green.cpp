#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "zrp/green.hpp"
#include "zrp/kinematics.hpp"
#include "zrp/spectral.hpp"
#include "zrp/states.hpp"

using namespace zrp;

namespace {

std::vector<Center> asymmetric_pair() {
    std::vector<Center> centers(2);
    centers[0].position = Eigen::Vector3d(0, 0, -0.75);
    centers[0].varkappa = 0.9;
    centers[0].kappa = Eigen::Vector3d(0.1, 0.2, 0.3);
    centers[1].position = Eigen::Vector3d(0, 0, 0.75);
    centers[1].varkappa = 1.1;
    centers[1].kappa = Eigen::Vector3d(0.3, -0.1, 0.2);
    return centers;
}

/// Central-difference residual of (-i alpha.grad + beta - E) applied to one
/// column of a Green matrix in its first argument.
double column_residual(const std::function<Eigen::Matrix4cd(const Eigen::Vector3d&)>& G,
                       double energy, const Eigen::Vector3d& r, int col,
                       double h = 1e-4) {
    const Eigen::Vector4cd g0 = G(r).col(col);
    Eigen::Vector4cd res = beta() * g0 - energy * g0;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d dr = Eigen::Vector3d::Zero();
        dr[i] = h;
        const Eigen::Vector4cd grad =
            (G(r + dr).col(col) - G(r - dr).col(col)) / (2.0 * h);
        res += complex(0.0, -1.0) * (alpha(i) * grad);
    }
    return res.norm() / g0.norm();
}

} // namespace

TEST_CASE("free_green has the closed two-by-two block structure") {
    const double energy = 0.5;
    const Kinematics kin = kinematics_from_energy(energy);
    const Eigen::Vector3d src(0, 0, 0), r(0, 0, 0.7);
    const Eigen::Matrix4cd G = free_green(energy, r, src);
    const double f = f_kernel(kin.k * 0.7);
    const double g = g_kernel(kin.k * 0.7);
    const double pref = kin.k / (4.0 * M_PI);

    const Eigen::Matrix2cd upper = G.topLeftCorner<2, 2>();
    CHECK((upper - pref * (energy + 1.0) * f * Eigen::Matrix2cd::Identity())
              .norm() <= 1e-14);
    const Eigen::Matrix2cd lower = G.bottomRightCorner<2, 2>();
    CHECK((lower - pref * (energy - 1.0) * f * Eigen::Matrix2cd::Identity())
              .norm() <= 1e-14);
    // off-diagonal blocks: i k g (mu . sigma) with mu = e_z here
    const Eigen::Matrix2cd off = G.topRightCorner<2, 2>();
    const Eigen::Matrix2cd expect =
        complex(0.0, 1.0) * pref * kin.k * g * pauli(2);
    CHECK((off - expect).norm() <= 1e-14);
    CHECK((G.bottomLeftCorner<2, 2>() - expect).norm() <= 1e-14);

    CHECK_THROWS_AS((void)free_green(energy, src, src), std::domain_error);
}

TEST_CASE("free_green solves the wave equation in its first argument") {
    const double energy = -0.35;
    const Eigen::Vector3d src(0.2, -0.1, 0.4);
    const auto G = [&](const Eigen::Vector3d& r) {
        return free_green(energy, r, src);
    };
    for (int col = 0; col < 4; ++col) {
        CHECK(column_residual(G, energy, Eigen::Vector3d(1.1, 0.5, -0.3), col) <=
              1e-6);
        CHECK(column_residual(G, energy, Eigen::Vector3d(-0.6, 0.9, 1.2), col) <=
              1e-6);
    }
}

TEST_CASE("full_green solves the wave equation away from centers and source") {
    const std::vector<Center> centers = asymmetric_pair();
    const double energy = 0.31;
    const Eigen::Vector3d src(0.5, 0.4, -0.2);
    const auto G = [&](const Eigen::Vector3d& r) {
        return full_green(energy, r, src, centers);
    };
    for (int col = 0; col < 4; ++col)
        CHECK(column_residual(G, energy, Eigen::Vector3d(-0.8, 0.6, 0.9), col) <=
              1e-6);
}

TEST_CASE("green matrices satisfy the argument-swap adjoint symmetry") {
    const std::vector<Center> centers = asymmetric_pair();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> draw(-1.4, 1.4);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::Vector3d r1, r2;
        do {
            r1 = Eigen::Vector3d(draw(rng), draw(rng), draw(rng));
            r2 = Eigen::Vector3d(draw(rng), draw(rng), draw(rng));
        } while ((r1 - r2).norm() < 0.3 ||
                 (r1 - centers[0].position).norm() < 0.25 ||
                 (r1 - centers[1].position).norm() < 0.25 ||
                 (r2 - centers[0].position).norm() < 0.25 ||
                 (r2 - centers[1].position).norm() < 0.25);
        const double energy = -0.6 + 0.28 * trial;
        const Eigen::Matrix4cd a = full_green(energy, r1, r2, centers);
        const Eigen::Matrix4cd b = full_green(energy, r2, r1, centers);
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        CHECK((a - b.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale);

        const Eigen::Matrix4cd fa = free_green(energy, r1, r2);
        const Eigen::Matrix4cd fb = free_green(energy, r2, r1);
        CHECK((fa - fb.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale);
    }
}

TEST_CASE("the center correction stays bounded at the source point") {
    const std::vector<Center> centers = asymmetric_pair();
    const double energy = 0.2;
    const Eigen::Vector3d src(0.3, 0.1, 0.0);
    const Eigen::Vector3d dir = Eigen::Vector3d(1, 1, 1).normalized();
    const Eigen::Matrix4cd corr4 =
        full_green(energy, src + 1e-4 * dir, src, centers) -
        free_green(energy, src + 1e-4 * dir, src);
    const Eigen::Matrix4cd corr5 =
        full_green(energy, src + 1e-5 * dir, src, centers) -
        free_green(energy, src + 1e-5 * dir, src);
    // G0 grows by x10 between these separations; the correction is smooth.
    CHECK((corr4 - corr5).cwiseAbs().maxCoeff() <=
          1e-2 * corr5.cwiseAbs().maxCoeff());
}

TEST_CASE("contact boundary constraint holds in the limit at each center") {
    const std::vector<Center> centers = asymmetric_pair();
    const double energy = 0.42;
    const Kinematics kin = kinematics_from_energy(energy);
    const Eigen::Vector3d src(0.9, -0.5, 0.3);
    const Eigen::Vector3d dir = Eigen::Vector3d(0.48, 0.6, 0.64).normalized();
    for (int n = 0; n < 2; ++n) {
        Eigen::Matrix4cd kplus = Eigen::Matrix4cd::Zero();
        kplus.topLeftCorner<2, 2>() = interaction_matrix(centers[n]);
        const auto bracket_norm = [&](double rho) {
            const Eigen::Vector3d r = centers[n].position + rho * dir;
            const Eigen::Matrix4cd G = full_green(energy, r, src, centers);
            const Eigen::Matrix4cd B =
                complex(0.0, 1.0) * rho * alpha_pm_dot(dir, +1) * G +
                0.5 * rho * kplus * G + kin.eps / kin.k * beta_pm(+1) * G;
            return B.cwiseAbs().maxCoeff();
        };
        const double b2 = bracket_norm(1e-2);
        const double b3 = bracket_norm(1e-3);
        CHECK(b2 / b3 >= 7.0);   // linear decay in rho
        CHECK(b2 / b3 <= 13.0);
        // Compare with the uncancelled magnitude of a single bracket term.
        const Eigen::Vector3d r = centers[n].position + 1e-3 * dir;
        const double naive =
            (kin.eps / kin.k *
             (beta_pm(+1) * full_green(energy, r, src, centers)))
                .cwiseAbs()
                .maxCoeff();
        CHECK(b3 <= 1e-3 * naive);
    }
}

TEST_CASE("probe energies at spectral poles are rejected") {
    const std::vector<Center> centers = asymmetric_pair();
    const Spectrum sp = find_bound_states(centers);
    REQUIRE(!sp.states.empty());
    CHECK_THROWS_AS((void)full_green(sp.states[0].energy,
                                     Eigen::Vector3d(1, 1, 1),
                                     Eigen::Vector3d(0, 0, 0), centers),
                    pole_error);
}

TEST_CASE("pole scan dips at the bound-state energies") {
    const std::vector<Center> centers = asymmetric_pair();
    const Spectrum sp = find_bound_states(centers);
    REQUIRE(!sp.states.empty());
    const double e0 = sp.states[0].energy;
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(e0 - 0.05 + 0.005 * i);
    const auto scan = green_pole_scan(centers, grid);
    REQUIRE(scan.size() == grid.size());
    size_t argmin = 0;
    for (size_t i = 0; i < scan.size(); ++i) {
        CHECK(scan[i].first == doctest::Approx(grid[i]).epsilon(1e-15));
        if (scan[i].second < scan[argmin].second) argmin = i;
    }
    CHECK(argmin == 10); // the grid point sitting on the eigenenergy
}
