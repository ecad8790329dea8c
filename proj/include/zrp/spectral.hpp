#ifndef ZRP_SPECTRAL_HPP
#define ZRP_SPECTRAL_HPP

// Bound-state search by eigenvalue-branch continuation.  The 2N eigenvalue
// curves lambda_a(E) of L(E) are traced over the energy window, matched
// across grid points by eigenvector overlap (degenerate clusters handled by
// subspace projection), and every sign change or near-tangency of a branch
// is refined into a bound state.

#include <vector>
#include <Eigen/Dense>

#include "zrp/centers.hpp"
#include "zrp/kinematics.hpp"
#include "zrp/lmatrix.hpp"

namespace zrp {

struct SolverOptions {
    int grid_points = 2001;          ///< base energy grid resolution
    double delta = 1e-6;             ///< window is (-1 + delta, 1 - delta)
    double root_tol = 1e-12;         ///< target uncertainty of root energies
    double overlap_threshold = 0.5;  ///< branch continuity gate per interval
    int max_refine_depth = 40;       ///< interval bisection limit for tracing
    double dedup_tol = 1e-10;        ///< energy gap treated as the same root
    double tangency_tol = 1e-12;     ///< |lambda| at extremum counting as a double root
    int threads = 0;                 ///< 0: ZRP_THREADS env or hardware default
};

struct BranchSample {
    double energy;
    double lambda;
    Eigen::VectorXcd vec;   ///< y^dag y = k^2/(4 pi)
};

struct SturmianBranch {
    int label;                          ///< 0..2N-1, ascending lambda at window bottom
    std::vector<BranchSample> samples;  ///< common energy list across branches
};

struct BoundState {
    double energy = 0.0;
    Kinematics kin{};
    Eigen::VectorXcd coeff;   ///< per-center 2-spinors stacked; see normalized flag
    double slope = 0.0;       ///< d lambda/dE at the root
    int signature = 0;        ///< sign of slope: +1, -1, or 0 at a tangency
    int branch = -1;
    double residual = 0.0;    ///< ||L x|| / (max(||L||_2, 1) ||x||); the floor keeps
                              ///< the measure meaningful when L vanishes at the root
    bool normalized = false;  ///< true once coeff is scaled to pseudo-norm = signature
};

/// A branch approaching the upper window edge with |lambda| still shrinking:
/// likely a state pushed beyond E = 1 - delta.
struct ThresholdCandidate {
    int branch;
    double edge_energy;
    double edge_lambda;
    double extrapolated_energy;
};

struct Spectrum {
    std::vector<BoundState> states;  ///< ascending energy
    std::vector<ThresholdCandidate> threshold_candidates;
};

/// Trace all 2N eigenvalue branches over the energy window.  Throws
/// std::runtime_error naming the offending interval if continuity cannot be
/// established within max_refine_depth.
std::vector<SturmianBranch> trace_branches(const std::vector<Center>& centers,
                                           const SolverOptions& opts = {});

/// Full spectrum search: sign changes and recovered tangencies of every
/// branch, deduplicated, with degenerate roots kept as orthogonal states.
Spectrum find_bound_states(const std::vector<Center>& centers,
                           const SolverOptions& opts = {});

/// d lambda/dE = y^dag (dL/dE) y / (y^dag y), exact at eigenvectors.
double hellmann_feynman_slope(const std::vector<Center>& centers, double energy,
                              const Eigen::VectorXcd& vec);

/// State signature from the branch slope at the root.
int signature_of(const BoundState& s);

/// Scale factor between the branch eigenvector and the normalized coefficient
/// vector: A = sqrt(eps |slope|).
double sturmian_normalizer(const BoundState& s);

/// Thread count resolution used by the tracer (ZRP_THREADS overrides).
int resolve_threads(int requested);

} // namespace zrp

#endif
