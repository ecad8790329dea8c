#ifndef ZRP_CONFIG_HPP
#define ZRP_CONFIG_HPP

// JSON run configuration: strict parsing (unknown keys rejected, every error
// names the offending field), defaults for the solver block, and a stable
// 64-bit hash of the canonical form for output provenance.

#include <cstdint>
#include <string>
#include <vector>

#include "zrp/centers.hpp"
#include "zrp/spectral.hpp"

namespace zrp {

struct RunConfig {
    std::string units = "natural";  ///< the only accepted value
    std::vector<Center> centers;
    SolverOptions solver;
    std::string output_path;  ///< empty: write to stdout
};

/// Parse a JSON document:
///   { "units": "natural",
///     "centers": [ { "position": [x,y,z], "varkappa": v, "kappa": [a,b,c] } ],
///     "solver": { "grid_points": 2001, "delta": 1e-6, "root_tol": 1e-12 },
///     "output": { "path": "file.csv" } }
/// "centers" is required (non-empty); per-center "varkappa" and "kappa"
/// default to zero; everything else is optional.  Unknown keys anywhere,
/// malformed values, non-positive tolerances, and coincident centers all
/// throw std::invalid_argument naming the field.
RunConfig parse_config(const std::string& text);

/// parse_config applied to a file's contents; file errors also throw
/// std::invalid_argument.
RunConfig load_config(const std::string& path);

/// Canonical JSON serialization (sorted keys, round-trip numbers) used for
/// hashing and reproducibility records.
std::string canonical_json(const RunConfig& cfg);

/// FNV-1a 64-bit hash of canonical_json.
std::uint64_t config_hash(const RunConfig& cfg);

/// FNV-1a 64-bit hash of an arbitrary string (parameter provenance for
/// commands that take no config file).
std::uint64_t fnv1a_hash(const std::string& text);

} // namespace zrp

#endif
