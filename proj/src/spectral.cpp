#include "zrp/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>

namespace zrp {

namespace {

constexpr double four_pi = 4.0 * 3.14159265358979323846;

// Eigenvalues closer than this (relative to the spectral radius) are treated
// as one degenerate cluster during branch matching. The tolerance is wide on
// purpose: inside a quasi-degenerate pair the eigenvector basis rotates at a
// rate ~ 1/gap, so chasing individual vectors needs steps ~ gap while the
// lambda curves differ by less than the cluster width anyway. Tracking the
// subspace (Procrustes) keeps continuity at any step size.
double cluster_tol(const Eigen::VectorXd& lam)
{
    return 1e-6 * std::max(lam.cwiseAbs().maxCoeff(), 1.0);
}

std::vector<std::pair<int, int>> clusters_of(const Eigen::VectorXd& lam)
{
    const double tol = cluster_tol(lam);
    std::vector<std::pair<int, int>> cl;  // [first, last] inclusive
    int first = 0;
    for (int j = 1; j <= lam.size(); ++j) {
        if (j == lam.size() || lam[j] - lam[j - 1] > tol) {
            cl.emplace_back(first, j - 1);
            first = j;
        }
    }
    return cl;
}

struct MatchResult {
    Eigen::VectorXd lambda;      // per branch
    Eigen::MatrixXcd unit_vecs;  // per branch, unit columns
    double min_overlap;
};

// Continue branch vectors across one step: branches are assigned to
// degenerate clusters by projection weight and aligned inside each cluster by
// an orthogonal Procrustes rotation, so exactly degenerate subspaces stay
// continuous even though the raw eigenvector basis inside them is arbitrary.
MatchResult match_branches(const Eigen::MatrixXcd& prev_units,
                           const Eigen::VectorXd& lam,
                           const Eigen::MatrixXcd& new_units)
{
    const int M = static_cast<int>(prev_units.cols());
    const auto cl = clusters_of(lam);
    const int nc = static_cast<int>(cl.size());
    const Eigen::MatrixXcd ov = prev_units.adjoint() * new_units;  // (b, j)

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(M, nc);
    for (int c = 0; c < nc; ++c)
        for (int j = cl[c].first; j <= cl[c].second; ++j)
            for (int b = 0; b < M; ++b)
                W(b, c) += std::norm(ov(b, j));

    std::vector<int> branch_cluster(M, -1);
    std::vector<int> capacity(nc);
    for (int c = 0; c < nc; ++c)
        capacity[c] = cl[c].second - cl[c].first + 1;
    for (int pass = 0; pass < M; ++pass) {
        int bb = -1, cb = -1;
        double best = -1.0;
        for (int b = 0; b < M; ++b) {
            if (branch_cluster[b] >= 0) continue;
            for (int c = 0; c < nc; ++c) {
                if (capacity[c] == 0) continue;
                if (W(b, c) > best) { best = W(b, c); bb = b; cb = c; }
            }
        }
        branch_cluster[bb] = cb;
        --capacity[cb];
    }

    MatchResult res;
    res.lambda.resize(M);
    res.unit_vecs.resize(prev_units.rows(), M);
    res.min_overlap = 1.0;
    for (int c = 0; c < nc; ++c) {
        std::vector<int> members;
        for (int b = 0; b < M; ++b)
            if (branch_cluster[b] == c) members.push_back(b);
        const int m = static_cast<int>(members.size());
        const Eigen::MatrixXcd U = new_units.middleCols(cl[c].first, m);
        Eigen::MatrixXcd C(m, m);
        for (int i = 0; i < m; ++i)
            C.col(i) = U.adjoint() * prev_units.col(members[i]);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullU |
                                                      Eigen::ComputeFullV);
        const Eigen::MatrixXcd rotated = U * (svd.matrixU() * svd.matrixV().adjoint());
        // assign the cluster's eigenvalues to its branches without reuse, in
        // descending overlap order, so the union over branches stays the
        // eigenvalue multiset
        std::vector<char> j_used(m, 0), b_done(m, 0);
        for (int pass = 0; pass < m; ++pass) {
            int ib = -1, jb = -1;
            double wbest = -1.0;
            for (int i = 0; i < m; ++i) {
                if (b_done[i]) continue;
                for (int j = 0; j < m; ++j) {
                    if (j_used[j]) continue;
                    const double w = std::norm(ov(members[i], cl[c].first + j));
                    if (w > wbest) { wbest = w; ib = i; jb = j; }
                }
            }
            b_done[ib] = 1;
            j_used[jb] = 1;
            res.lambda[members[ib]] = lam[cl[c].first + jb];
        }
        for (int i = 0; i < m; ++i) {
            const int b = members[i];
            res.unit_vecs.col(b) = rotated.col(i);
            const double o = std::abs(rotated.col(i).dot(prev_units.col(b)));
            res.min_overlap = std::min(res.min_overlap, o);
        }
    }
    return res;
}

struct Decomp {
    Eigen::VectorXd lambda;
    Eigen::MatrixXcd units;
    double k;
};

Decomp decompose(const std::vector<Center>& centers, double energy)
{
    const EigDecomposition dec = eig_L(centers, energy);
    Decomp d;
    d.lambda = dec.lambda;
    d.k = kinematics_from_energy(energy).k;
    d.units = dec.vectors * (std::sqrt(four_pi) / d.k);
    return d;
}

struct Picked {
    double lambda;
    Eigen::VectorXcd unit_vec;
    double k;
    double spectral_radius;
};

// Eigen-pair at E belonging to the branch identified by a reference vector.
Picked pick_eigen(const std::vector<Center>& centers, double energy,
                  const Eigen::VectorXcd& ref_unit)
{
    const Decomp d = decompose(centers, energy);
    const auto cl = clusters_of(d.lambda);
    const Eigen::VectorXcd ov = d.units.adjoint() * ref_unit;  // coords of ref

    int cbest = 0;
    double wbest = -1.0;
    for (int c = 0; c < static_cast<int>(cl.size()); ++c) {
        double w = 0.0;
        for (int j = cl[c].first; j <= cl[c].second; ++j) w += std::norm(ov[j]);
        if (w > wbest) { wbest = w; cbest = c; }
    }
    int jbest = cl[cbest].first;
    double sbest = -1.0;
    Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(ref_unit.size());
    for (int j = cl[cbest].first; j <= cl[cbest].second; ++j) {
        proj += d.units.col(j) * ov[j];
        if (std::norm(ov[j]) > sbest) { sbest = std::norm(ov[j]); jbest = j; }
    }
    Picked p;
    p.lambda = d.lambda[jbest];
    p.unit_vec = proj.norm() > 1e-14 ? Eigen::VectorXcd(proj.normalized())
                                     : Eigen::VectorXcd(d.units.col(jbest));
    p.k = d.k;
    p.spectral_radius = std::max(d.lambda.cwiseAbs().maxCoeff(), 1e-30);
    return p;
}

struct RootRec {
    double energy;
    double lambda;
    Eigen::VectorXcd unit_vec;
    double slope;
    int branch;
    bool tangent;
    double spectral_radius;
};

double clamp_to(double v, double lo, double hi)
{
    return std::min(std::max(v, lo), hi);
}

RootRec refine_root(const std::vector<Center>& centers, double e_lo, double lam_lo,
                    double e_hi, double lam_hi, Eigen::VectorXcd ref,
                    const SolverOptions& opts, int branch)
{
    const double width_target = std::max(0.1 * opts.root_tol, 1e-14);
    int guard = 0;
    while (e_hi - e_lo > width_target && ++guard < 200) {
        const double e_m = 0.5 * (e_lo + e_hi);
        const Picked p = pick_eigen(centers, e_m, ref);
        ref = p.unit_vec;
        if ((p.lambda > 0.0) == (lam_hi > 0.0)) { e_hi = e_m; lam_hi = p.lambda; }
        else { e_lo = e_m; lam_lo = p.lambda; }
    }
    double energy = 0.5 * (e_lo + e_hi);
    Picked p = pick_eigen(centers, energy, ref);
    double slope = hellmann_feynman_slope(centers, energy, p.unit_vec);
    if (slope != 0.0) {
        // derivative polish; the correction is at most the bracket width
        const double span = std::max(e_hi - e_lo, width_target);
        const double e_n = clamp_to(energy - p.lambda / slope,
                                    energy - 2.0 * span, energy + 2.0 * span);
        p = pick_eigen(centers, e_n, p.unit_vec);
        energy = e_n;
        slope = hellmann_feynman_slope(centers, energy, p.unit_vec);
    }
    RootRec r;
    r.energy = energy;
    r.lambda = p.lambda;
    r.unit_vec = p.unit_vec;
    r.slope = slope;
    r.branch = branch;
    r.tangent = false;
    r.spectral_radius = p.spectral_radius;
    return r;
}

// Locate the extremum of lambda(E) inside [e_lo, e_hi] by bisecting the
// branch slope; used to recover tangencies and sub-grid double crossings.
Picked refine_extremum(const std::vector<Center>& centers, double e_lo, double e_hi,
                       Eigen::VectorXcd ref, double slope_lo, double& energy_out)
{
    const double width_target = 1e-13;
    int guard = 0;
    while (e_hi - e_lo > width_target && ++guard < 200) {
        const double e_m = 0.5 * (e_lo + e_hi);
        const Picked p = pick_eigen(centers, e_m, ref);
        ref = p.unit_vec;
        const double s_m = hellmann_feynman_slope(centers, e_m, p.unit_vec);
        if ((s_m > 0.0) == (slope_lo > 0.0)) { e_lo = e_m; slope_lo = s_m; }
        else { e_hi = e_m; }
    }
    energy_out = 0.5 * (e_lo + e_hi);
    return pick_eigen(centers, energy_out, ref);
}

} // namespace

int resolve_threads(int requested)
{
    int n = requested > 0 ? requested
                          : static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("ZRP_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

double hellmann_feynman_slope(const std::vector<Center>& centers, double energy,
                              const Eigen::VectorXcd& vec)
{
    const Eigen::MatrixXcd D = build_dL_dE(centers, energy);
    const double num = (vec.adjoint() * D * vec)(0, 0).real();
    const double den = vec.squaredNorm();
    if (den <= 0.0)
        throw std::invalid_argument("hellmann_feynman_slope: zero vector");
    return num / den;
}

std::vector<SturmianBranch> trace_branches(const std::vector<Center>& centers,
                                           const SolverOptions& opts)
{
    validate_centers(centers);
    if (opts.grid_points < 2)
        throw std::invalid_argument("trace_branches: need at least 2 grid points");
    const int M = 2 * static_cast<int>(centers.size());
    const int G = opts.grid_points;
    const double e_bot = -1.0 + opts.delta;
    const double e_top = 1.0 - opts.delta;

    std::vector<double> grid(G);
    for (int i = 0; i < G; ++i)
        grid[i] = e_bot + (e_top - e_bot) * i / (G - 1);

    // base-grid decompositions, grid points are independent
    std::vector<Decomp> decs(G);
    const int nthreads = resolve_threads(opts.threads);
    if (nthreads <= 1) {
        for (int i = 0; i < G; ++i) decs[i] = decompose(centers, grid[i]);
    } else {
        std::vector<std::thread> pool;
        std::atomic_int next{0};
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < G; i = next.fetch_add(1))
                    decs[i] = decompose(centers, grid[i]);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<SturmianBranch> branches(M);
    for (int b = 0; b < M; ++b) branches[b].label = b;

    auto append = [&](double energy, const Eigen::VectorXd& lam,
                      const Eigen::MatrixXcd& units, double k) {
        for (int b = 0; b < M; ++b)
            branches[b].samples.push_back({energy, lam[b], units.col(b) * (k / std::sqrt(four_pi))});
    };

    Eigen::MatrixXcd cur_units = decs[0].units;
    append(grid[0], decs[0].lambda, cur_units, decs[0].k);

    // walk the grid, bisecting any interval where branch continuity is lost
    std::function<void(double, double, const Decomp*, int)> advance =
        [&](double e_prev, double e_next, const Decomp* pre, int depth) {
            Decomp local;
            if (!pre) { local = decompose(centers, e_next); pre = &local; }
            const MatchResult m = match_branches(cur_units, pre->lambda, pre->units);
            if (m.min_overlap >= opts.overlap_threshold ||
                e_next - e_prev < 1e-15) {
                cur_units = m.unit_vecs;
                append(e_next, m.lambda, m.unit_vecs, pre->k);
                return;
            }
            if (depth >= opts.max_refine_depth)
                throw std::runtime_error(
                    "trace_branches: branch continuity lost in [" +
                    std::to_string(e_prev) + ", " + std::to_string(e_next) +
                    "] at refinement depth " + std::to_string(depth));
            const double e_mid = 0.5 * (e_prev + e_next);
            advance(e_prev, e_mid, nullptr, depth + 1);
            advance(e_mid, e_next, pre, depth + 1);
        };

    for (int i = 1; i < G; ++i)
        advance(grid[i - 1], grid[i], &decs[i], 0);
    return branches;
}

int signature_of(const BoundState& s)
{
    // tangential (double) roots carry an exactly vanishing branch slope
    constexpr double slope_floor = 1e-6;
    if (std::abs(s.slope) <= slope_floor) return 0;
    return s.slope > 0.0 ? 1 : -1;
}

double sturmian_normalizer(const BoundState& s)
{
    return std::sqrt(s.kin.eps * std::abs(s.slope));
}

Spectrum find_bound_states(const std::vector<Center>& centers,
                           const SolverOptions& opts)
{
    const auto branches = trace_branches(centers, opts);
    const int M = static_cast<int>(branches.size());
    std::vector<RootRec> roots;
    Spectrum out;

    for (int b = 0; b < M; ++b) {
        const auto& s = branches[b].samples;
        const int n = static_cast<int>(s.size());
        double lam_scale = 0.0;
        for (const auto& q : s) lam_scale = std::max(lam_scale, std::abs(q.lambda));

        bool root_in_last_interval = false;
        for (int i = 0; i + 1 < n; ++i) {
            if (s[i].lambda == 0.0) {
                roots.push_back(refine_root(centers, s[i].energy - 1e-12,
                                            -1e-300, s[i].energy + 1e-12, 1e-300,
                                            s[i].vec.normalized(), opts, b));
                continue;
            }
            if (s[i].lambda * s[i + 1].lambda < 0.0) {
                roots.push_back(refine_root(centers, s[i].energy, s[i].lambda,
                                            s[i + 1].energy, s[i + 1].lambda,
                                            s[i].vec.normalized(), opts, b));
                if (i + 2 == n) root_in_last_interval = true;
            }
        }

        // same-sign local minima of |lambda|: either a tangency or a pair of
        // crossings unresolved by the grid
        for (int i = 1; i + 1 < n; ++i) {
            const double l0 = s[i - 1].lambda, l1 = s[i].lambda, l2 = s[i + 1].lambda;
            if (l0 * l1 <= 0.0 || l1 * l2 <= 0.0) continue;
            if (!(std::abs(l1) <= std::abs(l0) && std::abs(l1) <= std::abs(l2)))
                continue;
            if (std::abs(l1) > 1e-2 * std::max(lam_scale, 1e-30)) continue;
            const double s_lo = hellmann_feynman_slope(centers, s[i - 1].energy,
                                                       s[i - 1].vec);
            const double s_hi = hellmann_feynman_slope(centers, s[i + 1].energy,
                                                       s[i + 1].vec);
            if ((s_lo > 0.0) == (s_hi > 0.0)) continue;
            double e_star = 0.0;
            const Picked p = refine_extremum(centers, s[i - 1].energy,
                                             s[i + 1].energy,
                                             s[i].vec.normalized(), s_lo, e_star);
            if (std::abs(p.lambda) <= opts.tangency_tol) {
                RootRec r;
                r.energy = e_star;
                r.lambda = p.lambda;
                r.unit_vec = p.unit_vec;
                r.slope = 0.0;
                r.branch = b;
                r.tangent = true;
                r.spectral_radius = p.spectral_radius;
                roots.push_back(r);
            } else if (p.lambda * l1 < 0.0) {
                roots.push_back(refine_root(centers, s[i - 1].energy, l0, e_star,
                                            p.lambda, s[i - 1].vec.normalized(),
                                            opts, b));
                roots.push_back(refine_root(centers, e_star, p.lambda,
                                            s[i + 1].energy, l2,
                                            p.unit_vec, opts, b));
            }
        }

        // top-edge threshold candidate: lambda still negative but rising at the
        // window edge means the branch crosses zero beyond it. Near E = 1 the
        // branch is asymptotically linear in u = 1/eps (the coupling diagonal
        // scales as 1/(2 eps) and the off-diagonal kernel as 1/(2 eps R)), so
        // extrapolate the crossing with a secant in u, which always lands at a
        // finite energy below the threshold.
        if (n >= 3 && !root_in_last_interval) {
            const double l1 = s[n - 3].lambda, l2 = s[n - 2].lambda, l3 = s[n - 1].lambda;
            if (l1 < l2 && l2 < l3 && l3 < 0.0) {
                const double u2 = 1.0 / kinematics_from_energy(s[n - 2].energy).eps;
                const double u3 = 1.0 / kinematics_from_energy(s[n - 1].energy).eps;
                const double u_star = u3 - l3 * (u3 - u2) / (l3 - l2);
                if (u_star > u3) {
                    const double extrap = energy_from_epsilon(1.0 / u_star);
                    out.threshold_candidates.push_back(
                        {b, s[n - 1].energy, l3, extrap});
                }
            }
        }
    }

    // deduplicate and regroup: roots within dedup_tol in energy are either the
    // same root seen from two branch labels or genuinely degenerate states
    std::sort(roots.begin(), roots.end(),
              [](const RootRec& a, const RootRec& b) { return a.energy < b.energy; });
    std::size_t i = 0;
    while (i < roots.size()) {
        std::size_t j = i + 1;
        while (j < roots.size() &&
               roots[j].energy - roots[j - 1].energy <= opts.dedup_tol)
            ++j;
        const std::size_t gsize = j - i;
        if (gsize == 1) {
            const RootRec& r = roots[i];
            BoundState st;
            st.energy = r.energy;
            st.kin = kinematics_from_energy(r.energy);
            st.coeff = r.unit_vec * (st.kin.k / std::sqrt(four_pi));
            st.slope = r.slope;
            st.branch = r.branch;
            st.residual = std::abs(r.lambda) / std::max(r.spectral_radius, 1.0);
            st.signature = signature_of(st);
            out.states.push_back(st);
        } else {
            double e_g = 0.0;
            double lam_max = 0.0;
            for (std::size_t q = i; q < j; ++q) {
                e_g += roots[q].energy;
                lam_max = std::max(lam_max, std::abs(roots[q].lambda));
            }
            e_g /= static_cast<double>(gsize);
            const Decomp d = decompose(centers, e_g);
            const double gate =
                std::max({1e-10 * d.lambda.cwiseAbs().maxCoeff(), 10.0 * lam_max,
                          1e-13});
            std::vector<int> zero_idx;
            for (int q = 0; q < d.lambda.size(); ++q)
                if (std::abs(d.lambda[q]) <= gate) zero_idx.push_back(q);
            // greedy member-to-eigenvector matching; unmatched members are duplicates
            std::vector<bool> used(zero_idx.size(), false);
            std::vector<std::pair<std::size_t, int>> kept;
            for (std::size_t pass = 0; pass < gsize && kept.size() < zero_idx.size();
                 ++pass) {
                double best = -1.0;
                std::size_t bq = 0;
                int bz = -1;
                for (std::size_t q = i; q < j; ++q) {
                    bool taken = false;
                    for (const auto& kp : kept) taken = taken || kp.first == q;
                    if (taken) continue;
                    for (std::size_t z = 0; z < zero_idx.size(); ++z) {
                        if (used[z]) continue;
                        const double o = std::abs(
                            d.units.col(zero_idx[z]).dot(roots[q].unit_vec));
                        if (o > best) { best = o; bq = q; bz = static_cast<int>(z); }
                    }
                }
                if (bz < 0) break;
                used[bz] = true;
                kept.emplace_back(bq, zero_idx[bz]);
            }
            for (const auto& [q, z] : kept) {
                const RootRec& r = roots[q];
                BoundState st;
                st.energy = e_g;
                st.kin = kinematics_from_energy(e_g);
                st.coeff = d.units.col(z) * (st.kin.k / std::sqrt(four_pi));
                st.slope = r.tangent ? 0.0
                                     : hellmann_feynman_slope(centers, e_g,
                                                              d.units.col(z));
                st.branch = r.branch;
                st.residual = std::abs(d.lambda[z]) /
                              std::max(d.lambda.cwiseAbs().maxCoeff(), 1.0);
                st.signature = r.tangent ? 0 : signature_of(st);
                out.states.push_back(st);
            }
        }
        i = j;
    }
    std::sort(out.states.begin(), out.states.end(),
              [](const BoundState& a, const BoundState& b) {
                  return a.energy < b.energy;
              });
    return out;
}

} // namespace zrp
