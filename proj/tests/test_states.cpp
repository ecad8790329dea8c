#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "zrp/quadrature.hpp"
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

std::vector<Center> single(double varkappa, const Eigen::Vector3d& kappa) {
    Center c;
    c.varkappa = varkappa;
    c.kappa = kappa;
    return {c};
}

/// Central-difference residual of the stationary wave equation
/// (-i alpha.grad + beta - E) psi at a point away from all centers.
double equation_residual(
    const std::function<Eigen::Vector4cd(const Eigen::Vector3d&)>& psi,
    double energy, const Eigen::Vector3d& r, double h = 1e-4) {
    Eigen::Vector4cd res = beta() * psi(r) - energy * psi(r);
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d dr = Eigen::Vector3d::Zero();
        dr[i] = h;
        const Eigen::Vector4cd grad = (psi(r + dr) - psi(r - dr)) / (2.0 * h);
        res += complex(0.0, -1.0) * (alpha(i) * grad);
    }
    return res.norm() / psi(r).norm();
}

/// Fully numerical route to the operational pseudo-product: overlap
/// quadrature for the volume term plus extrapolated sphere integrals of the
/// coupling-weighted surface term.
complex pseudo_product_quadrature(const BoundState& bra, const BoundState& ket,
                                  const std::vector<Center>& centers) {
    const int n_centers = static_cast<int>(centers.size());
    complex volume = 0.0;
    for (int n = 0; n < n_centers; ++n)
        for (int m = 0; m < n_centers; ++m) {
            const Eigen::Vector2cd xb = bra.coeff.segment<2>(2 * n);
            const Eigen::Vector2cd xa = ket.coeff.segment<2>(2 * m);
            const double d =
                (centers[n].position - centers[m].position).norm();
            volume += (xb.adjoint() * xa)(0) *
                      yukawa_overlap_quadrature(bra.kin.k, ket.kin.k, d);
        }
    volume /= bra.kin.k * ket.kin.k;

    const BispinorField bfield = [&](const Eigen::Vector3d& r) {
        return assemble_wavefunction(bra, centers, r);
    };
    const BispinorField kfield = [&](const Eigen::Vector3d& r) {
        return assemble_wavefunction(ket, centers, r);
    };
    complex surface = 0.0;
    for (int n = 0; n < n_centers; ++n) {
        Eigen::Matrix4cd kplus = Eigen::Matrix4cd::Zero();
        kplus.topLeftCorner<2, 2>() = interaction_matrix(centers[n]);
        surface += extrapolate_rho_to_zero_c([&](double rho) {
            return sphere_surface_integral(bfield, kfield, kplus,
                                           centers[n].position, rho);
        });
    }
    const double eb = bra.energy, ea = ket.energy;
    return ((eb + ea) * volume + 0.5 * surface) /
           std::sqrt((eb + 1.0) * (ea + 1.0));
}

std::vector<BoundState> solved_orthonormal(const std::vector<Center>& centers) {
    Spectrum sp = find_bound_states(centers);
    orthonormalize_states(sp.states, centers);
    return sp.states;
}

} // namespace

TEST_CASE("yukawa_overlap closed form obeys its limits and symmetry") {
    CHECK(yukawa_overlap(1.0, 1.0, 1.0) ==
          doctest::Approx(2.0 * M_PI * std::exp(-1.0)).epsilon(1e-14));
    CHECK(yukawa_overlap(0.8, 0.8, 2.0) ==
          doctest::Approx(2.0 * M_PI / 0.8 * std::exp(-1.6)).epsilon(1e-14));
    CHECK(yukawa_overlap(0.7, 1.1, 0.0) ==
          doctest::Approx(4.0 * M_PI / 1.8).epsilon(1e-14));
    CHECK(yukawa_overlap(0.4, 1.3, 2.2) ==
          doctest::Approx(yukawa_overlap(1.3, 0.4, 2.2)).epsilon(1e-14));
    // Near-equal ranges must approach the equal-range form smoothly.
    CHECK(yukawa_overlap(1.0, 1.0 + 1e-9, 1.5) ==
          doctest::Approx(yukawa_overlap(1.0, 1.0, 1.5)).epsilon(1e-7));
}

TEST_CASE("assemble_bispinor produces the point-source component structure") {
    const Kinematics kin = kinematics_from_energy(0.6); // k=0.8, eps=0.5
    Eigen::VectorXcd coeff(2);
    coeff << 1.0, 0.0;
    const std::vector<Center> centers = single(1.0, Eigen::Vector3d::Zero());
    const Eigen::Vector4cd psi =
        assemble_bispinor(kin, coeff, centers, Eigen::Vector3d(0, 0, 1.25));
    CHECK(psi[0].real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(std::abs(psi[1]) <= 1e-15);
    // lower component: i eps g(1) (sigma_z chi) = i * 0.5 * 2/e * (1,0)
    CHECK(psi[2].imag() ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(psi[2].real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(psi[3]) <= 1e-15);
    CHECK_THROWS_AS(
        (void)assemble_bispinor(kin, coeff, centers, Eigen::Vector3d::Zero()),
        std::domain_error);
}

TEST_CASE("assembled states satisfy the wave equation away from the centers") {
    const std::vector<Center> centers = asymmetric_pair();
    const std::vector<BoundState> states = solved_orthonormal(centers);
    REQUIRE(!states.empty());
    const Eigen::Vector3d probes[4] = {{0.8, 0.3, 0.1},
                                       {-0.5, -0.6, 0.4},
                                       {0.0, 1.1, -0.2},
                                       {0.2, -0.1, 1.6}};
    for (const BoundState& st : states) {
        const auto psi = [&](const Eigen::Vector3d& r) {
            return assemble_wavefunction(st, centers, r);
        };
        for (const Eigen::Vector3d& r : probes)
            CHECK(equation_residual(psi, st.energy, r) <= 1e-6);
    }
}

TEST_CASE("sturmian basis functions solve the equation at off-root energies") {
    const std::vector<Center> centers = asymmetric_pair();
    const double energy = 0.25; // generic, not an eigenenergy
    const EigDecomposition dec = eig_L(centers, energy);
    const auto psi = [&](const Eigen::Vector3d& r) {
        return assemble_sturmian(energy, dec.vectors.col(1), centers, r);
    };
    CHECK(equation_residual(psi, energy, Eigen::Vector3d(0.9, -0.4, 0.3)) <=
          1e-6);
}

TEST_CASE("normalized single-center state is the scaled basis function") {
    // Psi = sqrt(2k/(1+eps^2)) Sigma at the root, component by component.
    const std::vector<Center> centers = single(3.0, Eigen::Vector3d(0, 0, 1));
    const std::vector<BoundState> states = solved_orthonormal(centers);
    REQUIRE(states.size() == 2);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> draw(-1.2, 1.2);
    for (const BoundState& st : states) {
        const double factor =
            std::sqrt(2.0 * st.kin.k / (1.0 + st.kin.eps * st.kin.eps));
        const EigDecomposition dec = eig_L(centers, st.energy);
        int root_index = 0;
        dec.lambda.cwiseAbs().minCoeff(&root_index);
        for (int i = 0; i < 5; ++i) {
            const Eigen::Vector3d r(draw(rng), draw(rng), draw(rng) + 1.3);
            const Eigen::Vector4cd lhs =
                assemble_wavefunction(st, centers, r);
            const Eigen::Vector4cd rhs =
                factor * assemble_sturmian(st.energy,
                                           dec.vectors.col(root_index),
                                           centers, r);
            const double diff =
                std::min((lhs - rhs).norm(), (lhs + rhs).norm());
            CHECK(diff <= 1e-10 * lhs.norm());
        }
    }
}

TEST_CASE("surface and volume overlaps match their quadrature definitions") {
    const std::vector<Center> centers = asymmetric_pair();
    const std::vector<BoundState> states = solved_orthonormal(centers);
    REQUIRE(states.size() >= 2);
    const BoundState& a = states[0];
    const BoundState& b = states[1];

    const BispinorField fa = [&](const Eigen::Vector3d& r) {
        return assemble_wavefunction(a, centers, r);
    };
    const BispinorField fb = [&](const Eigen::Vector3d& r) {
        return assemble_wavefunction(b, centers, r);
    };

    complex surf_quad = 0.0;
    for (const Center& c : centers)
        surf_quad += extrapolate_rho_to_zero_c([&](double rho) {
            return sphere_surface_integral(fb, fa, beta_pm(+1), c.position,
                                           rho);
        });
    const complex surf_closed = surface_overlap_beta_plus(b, a, centers);
    CHECK(std::abs(surf_quad - surf_closed) <=
          1e-6 * std::max(1.0, std::abs(surf_closed)));

    complex vol_quad = 0.0;
    for (int n = 0; n < 2; ++n)
        for (int m = 0; m < 2; ++m) {
            const Eigen::Vector2cd xb = b.coeff.segment<2>(2 * n);
            const Eigen::Vector2cd xa = a.coeff.segment<2>(2 * m);
            const double d =
                (centers[n].position - centers[m].position).norm();
            vol_quad += (xb.adjoint() * xa)(0) *
                        yukawa_overlap_quadrature(b.kin.k, a.kin.k, d);
        }
    vol_quad /= b.kin.k * a.kin.k;
    const complex vol_closed = volume_overlap_beta_plus(b, a, centers);
    CHECK(std::abs(vol_quad - vol_closed) <=
          1e-7 * std::max(1.0, std::abs(vol_closed)));
}

TEST_CASE("the three self pseudo-product routes coincide") {
    const std::vector<Center> centers = asymmetric_pair();
    const std::vector<BoundState> states = solved_orthonormal(centers);
    REQUIRE(!states.empty());
    for (const BoundState& st : states) {
        const double algebraic = pseudo_self_algebraic(st, centers);
        const double from_slope = pseudo_self_from_slope(st, centers);
        const complex operational = pseudo_product(st, st, centers).value;
        const double scale = std::max(1.0, std::abs(algebraic));
        CHECK(std::abs(algebraic - from_slope) <= 1e-10 * scale);
        CHECK(std::abs(operational - algebraic) <= 1e-10 * scale);
        CHECK(std::abs(operational.imag()) <= 1e-12 * scale);
    }
}

TEST_CASE("operational pseudo-product survives full numerical evaluation") {
    const std::vector<Center> centers = asymmetric_pair();
    const std::vector<BoundState> states = solved_orthonormal(centers);
    REQUIRE(states.size() >= 2);
    for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) {
            const complex quad =
                pseudo_product_quadrature(states[i], states[j], centers);
            const complex closed =
                pseudo_product(states[i], states[j], centers).value;
            CHECK(std::abs(quad - closed) <=
                  1e-5 * std::max(1.0, std::abs(closed)));
        }
}

TEST_CASE("definitional single-center pseudo-norm agrees with algebra") {
    const std::vector<Center> centers = single(1.4, Eigen::Vector3d(0.2, 0, 0.4));
    std::vector<BoundState> states = find_bound_states(centers).states;
    REQUIRE(!states.empty());
    for (const BoundState& st : states) {
        const double algebraic = pseudo_self_algebraic(st, centers);
        const PseudoProductResult def =
            pseudo_norm_definitional_single_center(st, centers);
        CHECK(def.method == PseudoProductResult::Method::definitional);
        CHECK(std::abs(def.value - algebraic) <=
              1e-6 * std::max(1.0, std::abs(algebraic)));
    }
}

TEST_CASE("radial volume integral matches the closed shell form") {
    const std::vector<Center> centers = single(3.0, Eigen::Vector3d(0, 0, 1));
    const std::vector<BoundState> states = solved_orthonormal(centers);
    REQUIRE(!states.empty());
    for (const BoundState& st : states) {
        const double rho = 0.2;
        const double k = st.kin.k, eps = st.kin.eps;
        const double chi2 = st.coeff.squaredNorm();
        const double closed = 2.0 * M_PI / (k * k * k) *
                              (1.0 + eps * eps * (1.0 + 2.0 / (k * rho))) *
                              std::exp(-2.0 * k * rho) * chi2;
        const double quad =
            radial_volume_integral_single_center(st, centers, rho);
        CHECK(std::abs(quad - closed) <= 1e-8 * closed);
    }
}

TEST_CASE("normalization drives the self pseudo-product to the signature") {
    const std::vector<Center> centers = asymmetric_pair();
    Spectrum sp = find_bound_states(centers);
    REQUIRE(!sp.states.empty());
    for (BoundState st : sp.states) {
        st = normalize_state(st, centers);
        CHECK(st.normalized);
        CHECK(std::abs(pseudo_self_from_slope(st, centers) - st.signature) <=
              1e-12);
    }
}

TEST_CASE("orthonormalized spectra have a diagonal signed Gram matrix") {
    for (const std::vector<Center>& centers :
         {asymmetric_pair(), single(3.0, Eigen::Vector3d(0, 0, 1)),
          single(1.0, Eigen::Vector3d::Zero())}) {
        const std::vector<BoundState> states = solved_orthonormal(centers);
        for (size_t i = 0; i < states.size(); ++i)
            for (size_t j = 0; j < states.size(); ++j) {
                const complex p =
                    pseudo_product(states[i], states[j], centers).value;
                const double target =
                    (i == j) ? static_cast<double>(states[i].signature) : 0.0;
                CHECK(std::abs(p - target) <= 1e-9);
            }
    }
}

TEST_CASE("coefficient sum rules hold and are not vacuous") {
    const std::vector<Center> centers = asymmetric_pair();
    const std::vector<BoundState> states = solved_orthonormal(centers);
    REQUIRE(states.size() >= 2);
    for (size_t i = 0; i < states.size(); ++i) {
        CHECK(identity_residual(SumRule::energy_derivative, states[i],
                                states[i], centers) <= 1e-10);
        for (size_t j = 0; j < states.size(); ++j) {
            if (states[i].energy == states[j].energy) continue;
            CHECK(identity_residual(SumRule::cross_energy_orthogonality,
                                    states[i], states[j], centers) <= 1e-10);
            CHECK(identity_residual(SumRule::epsilon_weighted, states[i],
                                    states[j], centers) <= 1e-10);
            CHECK(identity_residual(SumRule::inverse_epsilon_weighted,
                                    states[i], states[j], centers) <= 1e-10);
        }
    }
    // Bilinear rules are undefined across equal energies.
    CHECK_THROWS_AS(identity_residual(SumRule::epsilon_weighted, states[0],
                                      states[0], centers),
                    std::invalid_argument);

    // One center: the off-diagonal sums are empty and the bilinear rules
    // reduce to orthogonality of the coupling-matrix eigenspinors.
    const std::vector<Center> one = single(3.0, Eigen::Vector3d(0, 0, 1));
    const std::vector<BoundState> pair = solved_orthonormal(one);
    REQUIRE(pair.size() == 2);
    CHECK(identity_residual(SumRule::epsilon_weighted, pair[0], pair[1], one) <=
          1e-13);
    CHECK(identity_residual(SumRule::inverse_epsilon_weighted, pair[0],
                            pair[1], one) <= 1e-13);
    // Corrupting a coefficient must break the self rule: the residual check
    // has teeth.
    BoundState bad = states[0];
    bad.coeff[0] *= 1.5;
    CHECK(identity_residual(SumRule::energy_derivative, bad, bad, centers) >
          1e-4);
}

TEST_CASE("probability current is real and consistent between routes") {
    const std::vector<Center> centers = asymmetric_pair();
    const std::vector<BoundState> states = solved_orthonormal(centers);
    REQUIRE(!states.empty());
    const Eigen::Vector3d r(0.4, -0.7, 0.9);
    const Eigen::Vector4cd psi = assemble_wavefunction(states[0], centers, r);
    const Eigen::Vector3d j_point = current_density(psi);
    const Eigen::Vector3d j_state = current_density(states[0], centers, r);
    CHECK((j_point - j_state).norm() <= 1e-14 * (1.0 + j_point.norm()));
}

TEST_CASE("net flux through small spheres vanishes relative to |j|") {
    const std::vector<Center> centers = asymmetric_pair();
    const std::vector<BoundState> states = solved_orthonormal(centers);
    REQUIRE(!states.empty());
    const double rho = 1e-3;
    for (const BoundState& st : states)
        for (int n = 0; n < 2; ++n) {
            const double net = flux_through_sphere(st, centers, n, rho);
            const double scale =
                abs_current_through_sphere(st, centers, n, rho);
            if (scale > 0.0) CHECK(std::abs(net) <= 1e-6 * scale);
        }
}
