#include "zrp/states.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "zrp/lmatrix.hpp"
#include "zrp/quadrature.hpp"

namespace zrp {

namespace {

constexpr double pi = 3.14159265358979323846;

// sinh(q)/q, series-stable through q = 0.
double sinhc(double q)
{
    const double q2 = q * q;
    if (std::abs(q) < 1e-4) return 1.0 + q2 / 6.0 * (1.0 + q2 / 20.0);
    return std::sinh(q) / q;
}

Eigen::Vector2cd spinor_of(const Eigen::VectorXcd& coeff, int n)
{
    return coeff.segment<2>(2 * n);
}

void check_pair(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                const std::vector<Center>& centers)
{
    const auto N = static_cast<Eigen::Index>(centers.size());
    if (a.size() != 2 * N || b.size() != 2 * N)
        throw std::invalid_argument("coefficient size does not match center count");
}

} // namespace

double yukawa_overlap(double a, double b, double R)
{
    if (a <= 0.0 || b <= 0.0 || R < 0.0)
        throw std::domain_error("yukawa_overlap requires a, b > 0 and R >= 0");
    if (R == 0.0) return 4.0 * pi / (a + b);
    const double p = 0.5 * R * (a + b);
    const double q = 0.5 * R * (a - b);
    return 2.0 * pi * R * std::exp(-p) * sinhc(q) / p;
}

Eigen::Vector4cd assemble_bispinor(const Kinematics& kin,
                                   const Eigen::VectorXcd& coeff,
                                   const std::vector<Center>& centers,
                                   const Eigen::Vector3d& r)
{
    const auto N = static_cast<Eigen::Index>(centers.size());
    if (coeff.size() != 2 * N)
        throw std::invalid_argument("coefficient size does not match center count");
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    const complex ieps(0.0, kin.eps);
    for (Eigen::Index n = 0; n < N; ++n) {
        const Eigen::Vector3d d = r - centers[n].position;
        const double dist = d.norm();
        if (dist < 1e-12)
            throw std::domain_error("field point coincides with a center");
        const Eigen::Vector3d mu = d / dist;
        const Eigen::Vector2cd chi = spinor_of(coeff, static_cast<int>(n));
        psi.head<2>() += f_kernel(kin.k * dist) * chi;
        psi.tail<2>() += ieps * g_kernel(kin.k * dist) * (sigma_dot(mu) * chi);
    }
    return psi;
}

Eigen::Vector4cd assemble_wavefunction(const BoundState& state,
                                       const std::vector<Center>& centers,
                                       const Eigen::Vector3d& r)
{
    return assemble_bispinor(state.kin, state.coeff, centers, r);
}

Eigen::Vector4cd assemble_sturmian(double energy, const Eigen::VectorXcd& vec,
                                   const std::vector<Center>& centers,
                                   const Eigen::Vector3d& r)
{
    return assemble_bispinor(kinematics_from_energy(energy), vec, centers, r);
}

complex surface_overlap_beta_plus(const BoundState& bra, const BoundState& ket,
                                  const std::vector<Center>& centers)
{
    check_pair(bra.coeff, ket.coeff, centers);
    complex s = 0.0;
    for (std::size_t n = 0; n < centers.size(); ++n)
        s += spinor_of(bra.coeff, static_cast<int>(n))
                 .dot(spinor_of(ket.coeff, static_cast<int>(n)));
    return 4.0 * pi / (bra.kin.k * ket.kin.k) * s;
}

complex volume_overlap_beta_plus(const BoundState& bra, const BoundState& ket,
                                 const std::vector<Center>& centers)
{
    check_pair(bra.coeff, ket.coeff, centers);
    const int N = static_cast<int>(centers.size());
    complex s = 0.0;
    for (int n = 0; n < N; ++n)
        for (int np = 0; np < N; ++np) {
            const double d = (centers[n].position - centers[np].position).norm();
            s += spinor_of(bra.coeff, n).dot(spinor_of(ket.coeff, np)) *
                 yukawa_overlap(bra.kin.k, ket.kin.k, d);
        }
    return s / (bra.kin.k * ket.kin.k);
}

PseudoProductResult pseudo_product(const BoundState& bra, const BoundState& ket,
                                   const std::vector<Center>& centers)
{
    check_pair(bra.coeff, ket.coeff, centers);
    const double Eb = bra.energy, Ea = ket.energy;
    complex surface_k = 0.0;
    for (std::size_t n = 0; n < centers.size(); ++n) {
        const Eigen::Matrix2cd K = interaction_matrix(centers[n]);
        surface_k += spinor_of(bra.coeff, static_cast<int>(n))
                         .dot(K * spinor_of(ket.coeff, static_cast<int>(n)));
    }
    surface_k *= 4.0 * pi / (bra.kin.k * ket.kin.k);
    const complex num = (Eb + Ea) * volume_overlap_beta_plus(bra, ket, centers) +
                        0.5 * surface_k;
    return {num / std::sqrt((Eb + 1.0) * (Ea + 1.0)),
            PseudoProductResult::Method::algebraic};
}

double pseudo_self_algebraic(const BoundState& s, const std::vector<Center>& centers)
{
    check_pair(s.coeff, s.coeff, centers);
    const int N = static_cast<int>(centers.size());
    const double k = s.kin.k, eps = s.kin.eps;
    complex overlap = 0.0, contact = 0.0;
    for (int n = 0; n < N; ++n) {
        for (int np = 0; np < N; ++np) {
            const double d = (centers[n].position - centers[np].position).norm();
            overlap += spinor_of(s.coeff, n).dot(spinor_of(s.coeff, np)) *
                       std::exp(-k * d);
        }
        contact += spinor_of(s.coeff, n)
                       .dot(interaction_matrix(centers[n]) * spinor_of(s.coeff, n));
    }
    return 2.0 * pi / (k * k * k) *
           ((1.0 - eps * eps) * overlap.real() + eps * contact.real());
}

double pseudo_self_from_slope(const BoundState& s, const std::vector<Center>& centers)
{
    check_pair(s.coeff, s.coeff, centers);
    const Eigen::MatrixXcd dL = build_dL_dE(centers, s.energy);
    const complex form = s.coeff.dot(dL * s.coeff);
    return 4.0 * pi * s.kin.eps / (s.kin.k * s.kin.k) * form.real();
}

double radial_volume_integral_single_center(const BoundState& s,
                                            const std::vector<Center>& centers,
                                            double rho_inner)
{
    if (centers.size() != 1)
        throw std::invalid_argument("radial volume integral supports one center");
    check_pair(s.coeff, s.coeff, centers);
    const Eigen::Vector3d pos = centers[0].position;
    const BispinorField field = [&](const Eigen::Vector3d& r) {
        return assemble_wavefunction(s, centers, r);
    };
    const Eigen::Matrix4cd identity = Eigen::Matrix4cd::Identity();
    // One center only: psi^dag psi = f^2 + eps^2 g^2 is isotropic about the
    // center, so a coarse angular rule integrates the shell exactly.
    const auto shell = [&](double r) {
        return sphere_surface_integral(field, field, identity, pos, r, 4, 8).real();
    };
    return adaptive_integral(shell, rho_inner, rho_inner + 45.0 / s.kin.k, 1e-10);
}

PseudoProductResult pseudo_norm_definitional_single_center(
    const BoundState& s, const std::vector<Center>& centers)
{
    if (centers.size() != 1)
        throw std::invalid_argument("definitional norm quadrature supports one center");
    check_pair(s.coeff, s.coeff, centers);
    const Eigen::Vector3d pos = centers[0].position;
    const double k = s.kin.k, eps = s.kin.eps;
    const BispinorField field = [&](const Eigen::Vector3d& r) {
        return assemble_wavefunction(s, centers, r);
    };
    const Eigen::Matrix4cd bp = beta_pm(+1);

    // psi^dag beta_+ psi = f^2 is isotropic about the single center, so the
    // surface term is exact on a coarse angular rule.
    const auto value_at = [&](double rho) {
        const double volume = radial_volume_integral_single_center(s, centers, rho);
        const double surface =
            sphere_surface_integral(field, field, bp, pos, rho, 4, 8).real();
        return volume - (eps / k) * (eps / k) / rho * surface;
    };
    return {extrapolate_rho_to_zero(value_at),
            PseudoProductResult::Method::definitional};
}

BoundState normalize_state(BoundState state, const std::vector<Center>& centers)
{
    if (state.signature == 0) {
        const double n = state.coeff.norm();
        if (n > 0.0) state.coeff /= n;
        state.normalized = false;
        return state;
    }
    const double nu = pseudo_self_from_slope(state, centers);
    if (std::abs(nu) < 1e-250)
        throw std::runtime_error("pseudo-norm vanishes for a signed state");
    state.coeff /= std::sqrt(std::abs(nu));
    state.normalized = true;
    return state;
}

void orthonormalize_states(std::vector<BoundState>& states,
                           const std::vector<Center>& centers)
{
    constexpr double degeneracy_gap = 1e-10;
    std::size_t i = 0;
    while (i < states.size()) {
        std::size_t j = i + 1;
        while (j < states.size() &&
               states[j].energy - states[j - 1].energy <= degeneracy_gap)
            ++j;
        const std::size_t m = j - i;
        bool any_null = false;
        for (std::size_t q = i; q < j; ++q) any_null |= states[q].signature == 0;
        if (m == 1 || any_null) {
            for (std::size_t q = i; q < j; ++q)
                states[q] = normalize_state(std::move(states[q]), centers);
            i = j;
            continue;
        }

        // Gram-diagonalize the degenerate block under the pseudo-product.
        Eigen::MatrixXcd G(m, m);
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = 0; q < m; ++q)
                G(p, q) = pseudo_product(states[i + p], states[i + q], centers).value;
        G = 0.5 * (G + G.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
        const Eigen::VectorXd d = es.eigenvalues();
        const Eigen::MatrixXcd U = es.eigenvectors();

        std::vector<Eigen::VectorXcd> rotated(m);
        for (std::size_t q = 0; q < m; ++q) {
            Eigen::VectorXcd c = Eigen::VectorXcd::Zero(states[i].coeff.size());
            for (std::size_t p = 0; p < m; ++p) c += U(p, q) * states[i + p].coeff;
            rotated[q] = std::move(c);
        }
        const double dmax = d.cwiseAbs().maxCoeff();
        const EigDecomposition dec = eig_L(centers, states[i].energy);
        const double sr = std::max(dec.lambda.cwiseAbs().maxCoeff(), 1.0);
        const Eigen::MatrixXcd L = build_L(centers, states[i].energy);
        for (std::size_t q = 0; q < m; ++q) {
            BoundState& st = states[i + q];
            if (std::abs(d[q]) < 1e-10 * dmax) {
                st.coeff = rotated[q].normalized();
                st.signature = 0;
                st.slope = 0.0;
                st.normalized = false;
            } else {
                st.coeff = rotated[q] / std::sqrt(std::abs(d[q]));
                st.signature = d[q] > 0.0 ? 1 : -1;
                st.slope = hellmann_feynman_slope(centers, st.energy, st.coeff);
                st.normalized = true;
            }
            st.residual = (L * st.coeff).norm() / (sr * st.coeff.norm());
        }
        i = j;
    }
}

double identity_residual(SumRule kind, const BoundState& a, const BoundState& b,
                         const std::vector<Center>& centers)
{
    check_pair(a.coeff, b.coeff, centers);
    if (kind != SumRule::energy_derivative && b.energy == a.energy)
        throw std::invalid_argument(
            "identity_residual: bilinear rules require distinct energies");
    const int N = static_cast<int>(centers.size());
    const double ka = a.kin.k, kb = b.kin.k;
    const double ea = a.kin.eps, eb = b.kin.eps;

    // Bilinear building blocks (<b| K |a> contact, plain, kernel-weighted)
    // with their triangle-inequality magnitudes.  The residual is normalized
    // by the largest term magnitude; using the computed term values instead
    // would degenerate to noise over noise whenever the contractions vanish
    // analytically (orthogonal spinors at a single center).
    complex contact = 0.0, plain = 0.0;
    double contact_mag = 0.0, plain_mag = 0.0;
    for (int n = 0; n < N; ++n) {
        const Eigen::Vector2cd kx =
            interaction_matrix(centers[n]) * spinor_of(a.coeff, n);
        contact += spinor_of(b.coeff, n).dot(kx);
        contact_mag += spinor_of(b.coeff, n).norm() * kx.norm();
        plain += spinor_of(b.coeff, n).dot(spinor_of(a.coeff, n));
        plain_mag += spinor_of(b.coeff, n).norm() * spinor_of(a.coeff, n).norm();
    }
    struct Term {
        complex value;
        double mag;
    };
    const auto offdiag_weighted = [&](const std::function<double(double)>& w) {
        Term t{0.0, 0.0};
        for (int n = 0; n < N; ++n)
            for (int np = 0; np < N; ++np) {
                if (n == np) continue;
                const double dnp =
                    (centers[n].position - centers[np].position).norm();
                t.value +=
                    spinor_of(b.coeff, n).dot(spinor_of(a.coeff, np)) * w(dnp);
                t.mag += spinor_of(b.coeff, n).norm() *
                         spinor_of(a.coeff, np).norm() * std::abs(w(dnp));
            }
        return t;
    };

    Term t1, t2, t3{0.0, 0.0};
    switch (kind) {
    case SumRule::energy_derivative: {
        Term exp_sum{0.0, 0.0};
        for (int n = 0; n < N; ++n)
            for (int np = 0; np < N; ++np) {
                const double dnp =
                    (centers[n].position - centers[np].position).norm();
                exp_sum.value += spinor_of(a.coeff, n)
                                     .dot(spinor_of(a.coeff, np)) *
                                 std::exp(-ka * dnp);
                exp_sum.mag += spinor_of(a.coeff, n).norm() *
                               spinor_of(a.coeff, np).norm() *
                               std::exp(-ka * dnp);
            }
        Term self_contact{0.0, 0.0};
        for (int n = 0; n < N; ++n) {
            const Eigen::Vector2cd kx =
                interaction_matrix(centers[n]) * spinor_of(a.coeff, n);
            self_contact.value += spinor_of(a.coeff, n).dot(kx);
            self_contact.mag += spinor_of(a.coeff, n).norm() * kx.norm();
        }
        const Eigen::VectorXcd dx = build_dL_dE(centers, a.energy) * a.coeff;
        t1 = {0.5 * self_contact.value, 0.5 * self_contact.mag};
        t2 = {(a.energy / ka) * exp_sum.value,
              std::abs(a.energy / ka) * exp_sum.mag};
        t3 = {-ka * complex(a.coeff.dot(dx)), ka * a.coeff.norm() * dx.norm()};
        break;
    }
    case SumRule::cross_energy_orthogonality: {
        const double de = 0.5 * (b.energy - a.energy);
        t1 = {de * contact, std::abs(de) * contact_mag};
        t2 = {-(kb - ka) * plain, std::abs(kb - ka) * plain_mag};
        t3 = offdiag_weighted([&](double dnp) {
            return kb * f_kernel(kb * dnp) - ka * f_kernel(ka * dnp);
        });
        break;
    }
    case SumRule::epsilon_weighted: {
        t1 = {(eb - ea) * plain, std::abs(eb - ea) * plain_mag};
        t2 = offdiag_weighted([&](double dnp) {
            return -(eb * f_kernel(kb * dnp) - ea * f_kernel(ka * dnp));
        });
        break;
    }
    case SumRule::inverse_epsilon_weighted: {
        const double di = 0.5 * (1.0 / eb - 1.0 / ea);
        t1 = {di * contact, std::abs(di) * contact_mag};
        t2 = offdiag_weighted([&](double dnp) {
            return f_kernel(kb * dnp) - f_kernel(ka * dnp);
        });
        break;
    }
    }
    const double scale = std::max({t1.mag, t2.mag, t3.mag});
    if (scale == 0.0) return 0.0;
    return std::abs(t1.value + t2.value + t3.value) / scale;
}

Eigen::Vector3d current_density(const Eigen::Vector4cd& psi)
{
    Eigen::Vector3d j;
    for (int i = 0; i < 3; ++i) j[i] = psi.dot(alpha(i) * psi).real();
    return j;
}

Eigen::Vector3d current_density(const BoundState& state,
                                const std::vector<Center>& centers,
                                const Eigen::Vector3d& r)
{
    return current_density(assemble_wavefunction(state, centers, r));
}

double flux_through_sphere(const BoundState& state,
                           const std::vector<Center>& centers, int n, double rho)
{
    const Eigen::Vector3d pos = centers.at(static_cast<std::size_t>(n)).position;
    return sphere_scalar_integral(
        [&](const Eigen::Vector3d& p, const Eigen::Vector3d& normal) {
            return normal.dot(current_density(assemble_wavefunction(state, centers, p)));
        },
        pos, rho);
}

double abs_current_through_sphere(const BoundState& state,
                                  const std::vector<Center>& centers, int n,
                                  double rho)
{
    const Eigen::Vector3d pos = centers.at(static_cast<std::size_t>(n)).position;
    return sphere_scalar_integral(
        [&](const Eigen::Vector3d& p, const Eigen::Vector3d&) {
            return current_density(assemble_wavefunction(state, centers, p)).norm();
        },
        pos, rho);
}

} // namespace zrp
