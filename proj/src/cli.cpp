#include "zrp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "zrp/analytic.hpp"
#include "zrp/green.hpp"
#include "zrp/lmatrix.hpp"
#include "zrp/quadrature.hpp"
#include "zrp/spectral.hpp"
#include "zrp/states.hpp"

namespace zrp {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void hash_comment(std::ostream& out, std::uint64_t h) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "# config-hash: %016llx",
                  static_cast<unsigned long long>(h));
    out << buf << '\n';
}

/// Snap sweep coordinates that are integers up to accumulated stepping error,
/// so range endpoints like y = 1 or y = -1 trigger the exact-boundary rules.
double snap_integer(double y) {
    const double r = std::round(y);
    if (std::abs(y - r) <= 1e-9 * std::max(1.0, std::abs(y))) return r;
    return y;
}

Eigen::Vector2cd coeff_spinor(const BoundState& s, int n) {
    return s.coeff.segment<2>(2 * n);
}

/// Operational pseudo-product evaluated entirely by quadrature: numeric
/// prolate-spheroidal volume overlap plus rho->0 extrapolated surface terms.
/// Independent of the closed-form route used by pseudo_product.
complex quadrature_pseudo_product(const BoundState& bra, const BoundState& ket,
                                  const std::vector<Center>& centers) {
    const double kb = bra.kin.k, ka = ket.kin.k;
    complex volume = 0.0;
    for (std::size_t n = 0; n < centers.size(); ++n)
        for (std::size_t m = 0; m < centers.size(); ++m) {
            const double d = (centers[n].position - centers[m].position).norm();
            volume += coeff_spinor(bra, int(n)).dot(coeff_spinor(ket, int(m)))
                      * yukawa_overlap_quadrature(kb, ka, d);
        }
    volume /= kb * ka;

    const BispinorField fb = [&](const Eigen::Vector3d& r) {
        return assemble_bispinor(bra.kin, bra.coeff, centers, r);
    };
    const BispinorField fa = [&](const Eigen::Vector3d& r) {
        return assemble_bispinor(ket.kin, ket.coeff, centers, r);
    };
    complex surface = 0.0;
    for (const Center& c : centers) {
        Eigen::Matrix4cd weight = Eigen::Matrix4cd::Zero();
        weight.block<2, 2>(0, 0) = interaction_matrix(c);
        surface += extrapolate_rho_to_zero_c([&](double rho) {
            return sphere_surface_integral(fb, fa, weight, c.position, rho);
        });
    }
    return ((bra.energy + ket.energy) * volume + 0.5 * surface)
           / std::sqrt((bra.energy + 1.0) * (ket.energy + 1.0));
}

/// Probe energy for Green-function checks: the candidate farthest from any
/// eigenvalue curve zero (largest min |lambda|).
double green_probe_energy(const std::vector<Center>& centers) {
    const double candidates[] = {0.0, 0.3, -0.3, 0.55, -0.55, 0.15, -0.15, 0.75, -0.75};
    double best = candidates[0], best_gap = -1.0;
    for (double e : candidates) {
        const double gap = eig_L(centers, e).lambda.cwiseAbs().minCoeff();
        if (gap > best_gap) {
            best_gap = gap;
            best = e;
        }
    }
    return best;
}

struct VerifyReport {
    std::ostream& out;
    bool all_pass = true;

    void row(const std::string& name, double value, double tol) {
        const bool ok = value <= tol;
        all_pass = all_pass && ok;
        out << name << ',' << fmt(value) << ',' << fmt(tol) << ','
            << (ok ? "PASS" : "FAIL") << '\n';
    }
};

} // namespace

void cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
    Spectrum sp = find_bound_states(cfg.centers, cfg.solver);
    orthonormalize_states(sp.states, cfg.centers);
    hash_comment(out, config_hash(cfg));
    out << "state_index,branch,energy,k,eps,signature,residual\n";
    for (std::size_t i = 0; i < sp.states.size(); ++i) {
        const BoundState& s = sp.states[i];
        out << i << ',' << s.branch << ',' << fmt(s.energy) << ',' << fmt(s.kin.k)
            << ',' << fmt(s.kin.eps) << ',' << s.signature << ',' << fmt(s.residual)
            << '\n';
    }
}

void cmd_twocenter(double x, double y_start, double y_stop, double y_step,
                   std::ostream& out) {
    if (!(x > 0.0)) throw std::invalid_argument("twocenter: x must be positive");
    if (!(y_step > 0.0)) throw std::invalid_argument("twocenter: y step must be positive");
    if (!(y_start <= y_stop))
        throw std::invalid_argument("twocenter: y range start must not exceed stop");
    const long n = std::lround(std::floor((y_stop - y_start) / y_step + 1e-9));
    if (n > 2000000) throw std::invalid_argument("twocenter: y range has too many steps");

    hash_comment(out, fnv1a_hash("twocenter x=" + fmt17(x) + " y=" + fmt17(y_start) + ":"
                                 + fmt17(y_stop) + ":" + fmt17(y_step)));
    out << "y,eps_g_minus,eps_g_plus,eps_u\n";
    for (long i = 0; i <= n; ++i) {
        const double y = snap_integer(y_start + i * y_step);
        std::optional<double> gm, gp;
        for (const UniversalPoint& p : solve_eps_g(x, y)) {
            if (p.branch == TwoCenterBranch::g_minus) gm = p.eps;
            if (p.branch == TwoCenterBranch::g_plus) gp = p.eps;
        }
        const std::optional<double> u = solve_eps_u(x, y);
        out << fmt(y) << ',' << (gm ? fmt(*gm) : "") << ',' << (gp ? fmt(*gp) : "")
            << ',' << (u ? fmt(*u) : "") << '\n';
    }
}

void cmd_critical(std::optional<double> x, bool solve_for_xc, std::ostream& out) {
    if (solve_for_xc == x.has_value())
        throw std::invalid_argument("critical: provide exactly one of --x and --find-xc");
    const CriticalPoint cp = solve_for_xc ? find_xc() : critical_point(*x);
    hash_comment(out, fnv1a_hash(solve_for_xc ? std::string("critical find-xc")
                                              : "critical x=" + fmt17(*x)));
    out << "x,y_c,eps_gc\n";
    out << fmt(cp.x) << ',' << fmt(cp.y_c) << ',' << fmt(cp.eps_gc) << '\n';
}

namespace {

double grid_coord(int i, int n, double extent) {
    return n == 1 ? 0.0 : -extent + 2.0 * extent * i / (n - 1);
}

} // namespace

void cmd_wavefunction(const RunConfig& cfg, int state_index, const GridSpec& grid,
                      std::ostream& out) {
    Spectrum sp = find_bound_states(cfg.centers, cfg.solver);
    orthonormalize_states(sp.states, cfg.centers);
    if (state_index < 0 || state_index >= int(sp.states.size()))
        throw std::invalid_argument("wavefunction: state index " + std::to_string(state_index)
                                    + " out of range (spectrum has "
                                    + std::to_string(sp.states.size()) + " states)");
    const BoundState& s = sp.states[state_index];

    hash_comment(out, config_hash(cfg));
    out << "x,y,z,re_psi0,im_psi0,re_psi1,im_psi1,re_psi2,im_psi2,re_psi3,im_psi3,"
           "density,j_x,j_y,j_z\n";
    for (int ix = 0; ix < grid.nx; ++ix)
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int iz = 0; iz < grid.nz; ++iz) {
                const Eigen::Vector3d r(grid_coord(ix, grid.nx, grid.extent),
                                        grid_coord(iy, grid.ny, grid.extent),
                                        grid_coord(iz, grid.nz, grid.extent));
                const Eigen::Vector4cd psi = assemble_wavefunction(s, cfg.centers, r);
                const Eigen::Vector3d j = current_density(psi);
                out << fmt(r.x()) << ',' << fmt(r.y()) << ',' << fmt(r.z());
                for (int c = 0; c < 4; ++c)
                    out << ',' << fmt(psi[c].real()) << ',' << fmt(psi[c].imag());
                out << ',' << fmt(psi.squaredNorm()) << ',' << fmt(j.x()) << ','
                    << fmt(j.y()) << ',' << fmt(j.z()) << '\n';
            }
}

void cmd_green(const RunConfig& cfg, bool free_mode, double energy,
               const Eigen::Vector3d& source, const GridSpec& grid,
               std::ostream& out) {
    std::uint64_t h;
    if (free_mode)
        h = fnv1a_hash("green free energy=" + fmt17(energy) + " source=" + fmt17(source.x())
                       + "," + fmt17(source.y()) + "," + fmt17(source.z()));
    else
        h = config_hash(cfg);
    hash_comment(out, h);
    out << "x,y,z";
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            out << ",g" << r << c << "_re,g" << r << c << "_im";
    out << '\n';
    for (int ix = 0; ix < grid.nx; ++ix)
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int iz = 0; iz < grid.nz; ++iz) {
                const Eigen::Vector3d r(grid_coord(ix, grid.nx, grid.extent),
                                        grid_coord(iy, grid.ny, grid.extent),
                                        grid_coord(iz, grid.nz, grid.extent));
                const Eigen::Matrix4cd g = free_mode
                                               ? free_green(energy, r, source)
                                               : full_green(energy, r, source, cfg.centers);
                out << fmt(r.x()) << ',' << fmt(r.y()) << ',' << fmt(r.z());
                for (int row = 0; row < 4; ++row)
                    for (int col = 0; col < 4; ++col)
                        out << ',' << fmt(g(row, col).real()) << ','
                            << fmt(g(row, col).imag());
                out << '\n';
            }
}

bool cmd_verify(const RunConfig& cfg, std::uint64_t seed, bool corrupt,
                std::ostream& out) {
    Spectrum sp = find_bound_states(cfg.centers, cfg.solver);
    orthonormalize_states(sp.states, cfg.centers);
    std::vector<BoundState>& st = sp.states;
    if (corrupt && !st.empty()) st[0].coeff(0) *= 1.5;

    hash_comment(out, config_hash(cfg));
    out << "check,value,tolerance,status\n";
    VerifyReport rep{out};

    if (st.empty()) {
        rep.row("spectrum-empty", 0.0, 0.0);
        return rep.all_pass;
    }
    const std::vector<Center>& cs = cfg.centers;

    for (std::size_t i = 0; i < st.size(); ++i) {
        const Eigen::MatrixXcd L = build_L(cs, st[i].energy);
        const double scale = eig_L(cs, st[i].energy).lambda.cwiseAbs().maxCoeff();
        const double res = (L * st[i].coeff).norm()
                           / (std::max(scale, 1.0) * st[i].coeff.norm());
        rep.row("eigenpair-residual[" + std::to_string(i) + "]", res, 1e-10);
    }

    for (std::size_t i = 0; i < st.size(); ++i)
        rep.row("sum-rule-energy-derivative[" + std::to_string(i) + "]",
                identity_residual(SumRule::energy_derivative, st[i], st[i], cs), 1e-10);

    for (std::size_t i = 0; i < st.size(); ++i)
        for (std::size_t j = i + 1; j < st.size(); ++j) {
            if (st[i].energy == st[j].energy) continue;  // bilinear rules need distinct E
            const std::string ij = "[" + std::to_string(i) + "," + std::to_string(j) + "]";
            rep.row("sum-rule-cross-energy" + ij,
                    identity_residual(SumRule::cross_energy_orthogonality, st[i], st[j], cs),
                    1e-10);
            rep.row("sum-rule-eps-weighted" + ij,
                    identity_residual(SumRule::epsilon_weighted, st[i], st[j], cs), 1e-10);
            rep.row("sum-rule-inv-eps-weighted" + ij,
                    identity_residual(SumRule::inverse_epsilon_weighted, st[i], st[j], cs),
                    1e-10);
        }

    for (std::size_t i = 0; i < st.size(); ++i)
        for (std::size_t j = i; j < st.size(); ++j) {
            if (!st[i].normalized || !st[j].normalized) continue;
            const double target = (i == j) ? double(st[i].signature) : 0.0;
            const double dev = std::abs(pseudo_product(st[i], st[j], cs).value - target);
            rep.row("pseudo-orthonormality[" + std::to_string(i) + ","
                        + std::to_string(j) + "]",
                    dev, 1e-9);
        }

    for (std::size_t i = 0; i < st.size(); ++i) {
        const double a = pseudo_self_algebraic(st[i], cs);
        const double b = pseudo_self_from_slope(st[i], cs);
        rep.row("pseudo-self-route-match[" + std::to_string(i) + "]",
                std::abs(a - b) / std::max(1.0, std::abs(b)), 1e-10);
    }

    {
        int m = 0;
        for (double a : {st[0].kin.k, 1.0})
            for (double R : {0.7, 1.3}) {
                const double lhs = yukawa_overlap(a, 0.5 * a + 0.1, R);
                const double rhs = yukawa_overlap_quadrature(a, 0.5 * a + 0.1, R);
                rep.row("volume-kernel-oracle[" + std::to_string(m++) + "]",
                        std::abs(lhs - rhs) / std::abs(rhs), 1e-7);
            }
    }

    for (std::size_t i = 0; i < st.size(); ++i) {
        if (i > 0 && st[i].energy == st[i - 1].energy) continue;
        const EigDecomposition dec = eig_L(cs, st[i].energy);
        std::vector<int> null_cols;
        for (int c = 0; c < dec.lambda.size(); ++c)
            if (std::abs(dec.lambda[c]) < 1e-6) null_cols.push_back(c);
        if (null_cols.empty()) continue;
        const double k2 = st[i].kin.k * st[i].kin.k;
        double worst = 0.0;
        for (int a : null_cols)
            for (int b : null_cols) {
                const complex g =
                    dec.vectors.col(a).dot(dec.vectors.col(b)) * (4.0 * M_PI / k2);
                worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
            }
        rep.row("eigvec-orthonormality[" + std::to_string(i) + "]", worst, 1e-12);
    }

    {
        int done = 0;
        for (std::size_t i = 0; i < st.size() && done < 3; ++i)
            for (std::size_t j = i; j < st.size() && done < 3; ++j) {
                if (!st[i].normalized || !st[j].normalized) continue;
                const double target = (i == j) ? double(st[i].signature) : 0.0;
                const double dev =
                    std::abs(quadrature_pseudo_product(st[i], st[j], cs) - target);
                rep.row("orthonormality-quadrature[" + std::to_string(i) + ","
                            + std::to_string(j) + "]",
                        dev, 1e-5);
                ++done;
            }
    }

    {
        const double eprobe = green_probe_energy(cs);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> coord(-1.5, 1.5);
        auto sample_point = [&]() {
            for (int tries = 0; tries < 200; ++tries) {
                Eigen::Vector3d r(coord(rng), coord(rng), coord(rng));
                bool clear = true;
                for (const Center& c : cs)
                    if ((r - c.position).norm() < 0.2) clear = false;
                if (clear) return r;
            }
            throw std::runtime_error("verify: could not sample points away from centers");
        };
        for (int p = 0; p < 5; ++p) {
            const Eigen::Vector3d r1 = sample_point();
            Eigen::Vector3d r2 = sample_point();
            while ((r1 - r2).norm() < 1e-2) r2 = sample_point();
            const Eigen::Matrix4cd g12 = full_green(eprobe, r1, r2, cs);
            const Eigen::Matrix4cd g21 = full_green(eprobe, r2, r1, cs);
            const double dev = (g12 - g21.adjoint()).cwiseAbs().maxCoeff()
                               / std::max(1.0, g12.cwiseAbs().maxCoeff());
            rep.row("green-symmetry[" + std::to_string(p) + "]", dev, 1e-12);
        }
    }

    for (std::size_t i = 0; i < st.size(); ++i)
        for (std::size_t n = 0; n < cs.size(); ++n) {
            const double flux = flux_through_sphere(st[i], cs, int(n), 1e-3);
            const double mag = abs_current_through_sphere(st[i], cs, int(n), 1e-3);
            rep.row("contact-flux[" + std::to_string(i) + "," + std::to_string(n) + "]",
                    std::abs(flux) / std::max(mag, 1e-300), 1e-6);
        }

    return rep.all_pass;
}

namespace {

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%d,%d,%d,%lf%n", &g.nx, &g.ny, &g.nz, &g.extent,
                    &consumed) != 4
        || s[consumed] != '\0')
        throw std::invalid_argument("grid: expected NX,NY,NZ,EXTENT");
    if (g.nx < 1 || g.ny < 1 || g.nz < 1 || !(g.extent > 0.0))
        throw std::invalid_argument("grid: node counts must be >= 1 and extent positive");
    return g;
}

Eigen::Vector3d parse_vec3(const std::string& s, const char* what) {
    double x, y, z;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf%n", &x, &y, &z, &consumed) != 3
        || s[consumed] != '\0')
        throw std::invalid_argument(std::string(what) + ": expected X,Y,Z");
    return {x, y, z};
}

void parse_y_range(const std::string& s, double& a, double& b, double& step) {
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf%n", &a, &b, &step, &consumed) != 3
        || s[consumed] != '\0')
        throw std::invalid_argument("y-range: expected A:B:STEP");
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Bound states of a Dirac particle in a field of point contact interactions"};
    app.require_subcommand(1);

    std::string config_path, out_path, y_range_str, grid_str, source_str;
    double x_value = 0.0, energy = 0.0;
    int state_index = 0;
    std::uint64_t seed = 12345;
    bool corrupt = false, free_mode = false, find_xc_flag = false;

    CLI::App* c_spectrum = app.add_subcommand("spectrum", "Bound-state table");
    c_spectrum->add_option("--config", config_path, "JSON config path")->required();
    c_spectrum->add_option("--out", out_path, "Output CSV path (default stdout)");

    CLI::App* c_two = app.add_subcommand("twocenter", "Universal-function sweep");
    c_two->add_option("--x", x_value, "Inverse separation x = 1/R")->required();
    c_two->add_option("--y-range", y_range_str, "Sweep A:B:STEP")->required();
    c_two->add_option("--out", out_path, "Output CSV path (default stdout)");

    CLI::App* c_crit = app.add_subcommand("critical", "Even-branch fold point");
    CLI::Option* crit_x = c_crit->add_option("--x", x_value, "Inverse separation x");
    c_crit->add_flag("--find-xc", find_xc_flag, "Solve y_c(x) = 1 for x instead");
    c_crit->add_option("--out", out_path, "Output CSV path (default stdout)");

    CLI::App* c_wave = app.add_subcommand("wavefunction", "Sample one bound state");
    c_wave->add_option("--config", config_path, "JSON config path")->required();
    c_wave->add_option("--state", state_index, "State index (spectrum order)");
    c_wave->add_option("--grid", grid_str, "NX,NY,NZ,EXTENT")->required();
    c_wave->add_option("--out", out_path, "Output CSV path (default stdout)");

    CLI::App* c_green = app.add_subcommand("green", "Sample the resolvent");
    c_green->add_option("--config", config_path, "JSON config path");
    c_green->add_flag("--free", free_mode, "Free propagator (no centers)");
    c_green->add_option("--energy", energy, "Probe energy, |E| < 1")->required();
    c_green->add_option("--source", source_str, "Source point X,Y,Z")->required();
    c_green->add_option("--grid", grid_str, "NX,NY,NZ,EXTENT")->required();
    c_green->add_option("--out", out_path, "Output CSV path (default stdout)");

    CLI::App* c_verify = app.add_subcommand("verify", "Identity verification suite");
    c_verify->add_option("--config", config_path, "JSON config path")->required();
    c_verify->add_option("--seed", seed, "Sampling seed");
    c_verify->add_flag("--corrupt", corrupt, "Damage a coefficient vector (negative control)");
    c_verify->add_option("--out", out_path, "Output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config_error;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);

        std::ostringstream body;
        bool verify_pass = true;
        if (c_spectrum->parsed()) {
            cmd_spectrum(cfg, body);
        } else if (c_two->parsed()) {
            double a, b, step;
            parse_y_range(y_range_str, a, b, step);
            cmd_twocenter(x_value, a, b, step, body);
        } else if (c_crit->parsed()) {
            std::optional<double> x;
            if (crit_x->count() > 0) x = x_value;
            cmd_critical(x, find_xc_flag, body);
        } else if (c_wave->parsed()) {
            cmd_wavefunction(cfg, state_index, parse_grid(grid_str), body);
        } else if (c_green->parsed()) {
            if (!free_mode && config_path.empty())
                throw std::invalid_argument("green: --config is required without --free");
            cmd_green(cfg, free_mode, energy, parse_vec3(source_str, "source"),
                      parse_grid(grid_str), body);
        } else if (c_verify->parsed()) {
            verify_pass = cmd_verify(cfg, seed, corrupt, body);
        }

        const std::string path = !out_path.empty() ? out_path : cfg.output_path;
        if (path.empty()) {
            std::cout << body.str();
        } else {
            std::ofstream file(path);
            if (!file)
                throw std::invalid_argument("cannot open output file \"" + path + "\"");
            file << body.str();
        }
        if (!verify_pass) {
            std::cerr << "verify: FAILED\n";
            return exit_numerical_error;
        }
        return exit_ok;
    } catch (const pole_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_pole_error;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerical_error;
    }
}

} // namespace zrp
