#ifndef ZRP_CLI_HPP
#define ZRP_CLI_HPP

// Command dispatch and CSV emission.  Each cmd_* function is the library-side
// body of one executable subcommand, writing its full CSV document (hash
// comment, header row, data rows at 15 significant digits) to the stream, so
// tests can drive them without spawning processes.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <Eigen/Dense>

#include "zrp/config.hpp"

namespace zrp {

/// Evaluation lattice: nx x ny x nz points spanning [-extent, extent] per axis
/// (a single point collapses its axis to 0).
struct GridSpec {
    int nx = 1;
    int ny = 1;
    int nz = 1;
    double extent = 1.0;
};

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_numerical_error = 3,
    exit_pole_error = 4,
};

/// Bound spectrum table: state_index, branch, energy, k, eps, signature, residual.
void cmd_spectrum(const RunConfig& cfg, std::ostream& out);

/// Universal-function sweep at fixed x: rows (y, eps_g_minus, eps_g_plus,
/// eps_u) with blank cells where a branch does not exist.
void cmd_twocenter(double x, double y_start, double y_stop, double y_step,
                   std::ostream& out);

/// Fold point of the even-parity branches: at given x, or the x solving
/// y_c(x) = 1 when solve_for_xc is set.  Row: x, y_c, eps_gc.
void cmd_critical(std::optional<double> x, bool solve_for_xc, std::ostream& out);

/// Wavefunction samples of one normalized bound state on a grid: position,
/// the 8 real components of the bispinor, density, and current density.
void cmd_wavefunction(const RunConfig& cfg, int state_index, const GridSpec& grid,
                      std::ostream& out);

/// Green-function samples at fixed probe energy and source point: position
/// plus the 32 real entries of the 4x4 complex matrix.  free_mode drops the
/// interaction part (no centers required).
void cmd_green(const RunConfig& cfg, bool free_mode, double energy,
               const Eigen::Vector3d& source, const GridSpec& grid,
               std::ostream& out);

/// Identity-verification suite over the config's spectrum; emits one row per
/// check (name, measured residual, tolerance, PASS/FAIL) and returns whether
/// everything passed.  corrupt deliberately damages a coefficient vector
/// first (negative control).
bool cmd_verify(const RunConfig& cfg, std::uint64_t seed, bool corrupt,
                std::ostream& out);

/// Executable entry point: parses arguments, dispatches, maps exceptions to
/// exit codes (2 config/input error, 3 numerical failure, 4 spectral pole).
int run_cli(int argc, const char* const* argv);

} // namespace zrp

#endif
