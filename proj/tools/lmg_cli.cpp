// Command-line front end for the collective-spin steady-state library.
// Subcommands map onto the library's figure-producing surfaces; all numeric
// output is CSV with 17 significant digits so repeated runs with the same
// configuration are byte-comparable.
//
// Exit codes: 0 success, 1 sweep finished but some cells failed, 2 any
// configuration, resource, numeric, or I/O error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lmg/closed.hpp"
#include "lmg/errors.hpp"
#include "lmg/liouvillian.hpp"
#include "lmg/mean_field.hpp"
#include "lmg/observables.hpp"
#include "lmg/spin_ops.hpp"
#include "lmg/steady.hpp"
#include "lmg/sweep.hpp"
#include "lmg/version.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw lmg::io_error("cannot open '" + path + "' for writing");
    }
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw lmg::config_error("config: key '" + key +
                                "' has non-numeric value '" + value + "'");
    }
}

int to_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw lmg::config_error("config: key '" + key +
                                "' has non-integer value '" + value + "'");
    }
}

// Non-sweep subcommands share the flat key-value format but each accepts
// only its own key set; anything else is a typo and is rejected.
std::map<std::string, std::string> load_config(
    const std::string& path, const std::set<std::string>& allowed) {
    auto kv = lmg::parse_config_file(path);
    for (const auto& [key, value] : kv) {
        (void)value;
        if (allowed.count(key) == 0) {
            throw lmg::config_error("config: key '" + key +
                                    "' is not valid for this subcommand");
        }
    }
    return kv;
}

void override_double(const std::map<std::string, std::string>& kv,
                     const char* key, double& target) {
    const auto it = kv.find(key);
    if (it != kv.end()) target = to_double(key, it->second);
}

void override_int(const std::map<std::string, std::string>& kv,
                  const char* key, int& target) {
    const auto it = kv.find(key);
    if (it != kv.end()) target = to_int(key, it->second);
}

void override_string(const std::map<std::string, std::string>& kv,
                     const char* key, std::string& target) {
    const auto it = kv.find(key);
    if (it != kv.end()) target = it->second;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
    if (count < 2 || !(lo <= hi)) {
        throw lmg::config_error("grid needs count >= 2 and min <= max");
    }
    std::vector<double> grid(static_cast<size_t>(count));
    const double step = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) grid[static_cast<size_t>(i)] = lo + i * step;
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

const char* stability_name(lmg::Stability s) {
    switch (s) {
        case lmg::Stability::stable: return "stable";
        case lmg::Stability::unstable: return "unstable";
        default: return "marginal";
    }
}

// -- subcommand runners ------------------------------------------------------

struct SpectrumArgs {
    int n = 50;
    double h = 1.0;
    double gamma_min = 0.0;
    double gamma_max = 2.0;
    int gamma_count = 41;
    std::string out = "spectrum.csv";
    std::string config;
};

int run_spectrum(SpectrumArgs args) {
    if (!args.config.empty()) {
        const auto kv = load_config(
            args.config, {"n", "h", "gamma_min", "gamma_max", "gamma_count",
                          "output_path"});
        override_int(kv, "n", args.n);
        override_double(kv, "h", args.h);
        override_double(kv, "gamma_min", args.gamma_min);
        override_double(kv, "gamma_max", args.gamma_max);
        override_int(kv, "gamma_count", args.gamma_count);
        override_string(kv, "output_path", args.out);
    }

    const lmg::Basis basis = lmg::build_basis(args.n);
    auto out = open_out(args.out);
    out << "gamma_x,index,energy,energy_over_jh,parity\n";
    for (double gamma :
         linear_grid(args.gamma_min, args.gamma_max, args.gamma_count)) {
        lmg::ModelParams params;
        params.n_spins = args.n;
        params.h = args.h;
        params.gamma_x = gamma;
        const lmg::Spectrum spec =
            lmg::diagonalize(lmg::build_hamiltonian(params, basis));
        for (int i = 0; i < spec.energies.size(); ++i) {
            out << fmt(gamma) << ',' << i << ',' << fmt(spec.energies(i))
                << ',' << fmt(spec.energies(i) / (basis.j * args.h)) << ','
                << spec.parities[static_cast<size_t>(i)] << '\n';
        }
    }
    std::cout << "spectrum: wrote " << args.out << "\n";
    return 0;
}

struct DosArgs {
    int n = 1000;
    double h = 1.0;
    double gamma = 1.5;
    int bins = 50;
    std::string out = "dos.csv";
    std::string config;
};

int run_dos(DosArgs args) {
    if (!args.config.empty()) {
        const auto kv = load_config(
            args.config, {"n", "h", "gamma_x", "bins", "output_path"});
        override_int(kv, "n", args.n);
        override_double(kv, "h", args.h);
        override_double(kv, "gamma_x", args.gamma);
        override_int(kv, "bins", args.bins);
        override_string(kv, "output_path", args.out);
    }

    const lmg::Basis basis = lmg::build_basis(args.n);
    lmg::ModelParams params;
    params.n_spins = args.n;
    params.h = args.h;
    params.gamma_x = args.gamma;
    const lmg::Spectrum spec =
        lmg::diagonalize(lmg::build_hamiltonian(params, basis));
    // Histogram on the E/(jh) axis the spectra are conventionally drawn on.
    const Eigen::VectorXd scaled = spec.energies / (basis.j * args.h);
    const lmg::DensityOfStates dos = lmg::density_of_states(scaled, args.bins);

    auto out = open_out(args.out);
    out << "bin_center,density\n";
    for (size_t i = 0; i < dos.bin_centers.size(); ++i) {
        out << fmt(dos.bin_centers[i]) << ',' << fmt(dos.density[i]) << '\n';
    }
    std::cout << "dos: wrote " << args.out << "\n";
    return 0;
}

struct GroundstateArgs {
    int n = 50;
    double h = 1.0;
    double gamma_min = 0.0;
    double gamma_max = 2.0;
    int gamma_count = 201;
    std::string out = "groundstate.csv";
    std::string config;
};

int run_groundstate(GroundstateArgs args) {
    if (!args.config.empty()) {
        const auto kv = load_config(
            args.config, {"n", "h", "gamma_min", "gamma_max", "gamma_count",
                          "output_path"});
        override_int(kv, "n", args.n);
        override_double(kv, "h", args.h);
        override_double(kv, "gamma_min", args.gamma_min);
        override_double(kv, "gamma_max", args.gamma_max);
        override_int(kv, "gamma_count", args.gamma_count);
        override_string(kv, "output_path", args.out);
    }

    const std::vector<double> grid =
        linear_grid(args.gamma_min, args.gamma_max, args.gamma_count);
    const auto curve = lmg::ground_state_energy_curve(args.n, args.h, grid);
    std::vector<double> e0;
    e0.reserve(curve.size());
    for (const auto& [gamma, value] : curve) {
        (void)gamma;
        e0.push_back(value);
    }
    const double step = grid[1] - grid[0];
    const auto de0 = lmg::finite_difference(e0, step, 1);
    const auto d2e0 = lmg::finite_difference(e0, step, 2);

    auto out = open_out(args.out);
    out << "gamma_x,e0,de0,d2e0\n";
    for (size_t i = 0; i < grid.size(); ++i) {
        out << fmt(grid[i]) << ',' << fmt(e0[i]) << ',' << fmt(de0[i]) << ','
            << fmt(d2e0[i]) << '\n';
    }
    std::cout << "groundstate: wrote " << args.out << "\n";
    return 0;
}

struct MeanfieldArgs {
    double h = 1.0;
    double kappa = 0.05;
    double gamma_min = 0.0;
    double gamma_max = 2.0;
    int gamma_count = 201;
    std::string out = "meanfield.csv";
    std::string config;
};

int run_meanfield(MeanfieldArgs args) {
    if (!args.config.empty()) {
        const auto kv = load_config(
            args.config, {"h", "kappa", "gamma_min", "gamma_max",
                          "gamma_count", "output_path"});
        override_double(kv, "h", args.h);
        override_double(kv, "kappa", args.kappa);
        override_double(kv, "gamma_min", args.gamma_min);
        override_double(kv, "gamma_max", args.gamma_max);
        override_int(kv, "gamma_count", args.gamma_count);
        override_string(kv, "output_path", args.out);
    }

    lmg::ModelParams params;
    params.n_spins = 2;  // irrelevant to the thermodynamic-limit flow
    params.h = args.h;
    params.kappa = args.kappa;
    const auto branches = lmg::mf_bifurcation_scan(
        params, linear_grid(args.gamma_min, args.gamma_max, args.gamma_count));

    auto out = open_out(args.out);
    out << "gamma_x,branch_id,X,Y,Z,stability,re_lambda_max\n";
    for (const lmg::BranchPoint& bp : branches) {
        out << fmt(bp.gamma_x) << ',' << bp.branch_id << ',' << fmt(bp.state.x)
            << ',' << fmt(bp.state.y) << ',' << fmt(bp.state.z) << ','
            << stability_name(bp.stability) << ',' << fmt(bp.re_lambda_max)
            << '\n';
    }
    std::cout << "meanfield: wrote " << args.out << " (critical coupling "
              << fmt(lmg::mf_critical_coupling(params)) << ")\n";
    return 0;
}

struct SteadyArgs {
    int n = 30;
    double h = 1.0;
    double kappa = 0.05;
    double gamma = 1.0;
    double theta_x = 0.0;
    double theta_y = 0.0;
    double theta_z = 0.0;
    std::string config;
};

int run_steady(SteadyArgs args) {
    if (!args.config.empty()) {
        const auto kv = load_config(
            args.config, {"n", "h", "kappa", "gamma_x", "theta_x", "theta_y",
                          "theta_z"});
        override_int(kv, "n", args.n);
        override_double(kv, "h", args.h);
        override_double(kv, "kappa", args.kappa);
        override_double(kv, "gamma_x", args.gamma);
        override_double(kv, "theta_x", args.theta_x);
        override_double(kv, "theta_y", args.theta_y);
        override_double(kv, "theta_z", args.theta_z);
    }

    lmg::ModelParams params;
    params.n_spins = args.n;
    params.h = args.h;
    params.kappa = args.kappa;
    params.gamma_x = args.gamma;
    params.theta_x = args.theta_x;
    params.theta_y = args.theta_y;
    params.theta_z = args.theta_z;

    const lmg::Basis basis = lmg::build_basis(args.n);
    const lmg::SuperOperator liouv =
        lmg::build_liouvillian(params, basis, true);
    const lmg::SteadyStateResult steady = lmg::solve_steady_state(liouv);
    const lmg::ObservableSet obs =
        lmg::compute_observables(steady.rho, basis);

    std::cout << "jz=" << fmt(obs.jz) << "\n"
              << "jz_over_j=" << fmt(obs.jz_normalized) << "\n"
              << "jx2=" << fmt(obs.jx2) << "\n"
              << "jy2=" << fmt(obs.jy2) << "\n"
              << "jz2=" << fmt(obs.jz2) << "\n"
              << "jplus2_abs=" << fmt(obs.jplus2_abs) << "\n"
              << "concurrence=" << fmt(obs.concurrence) << "\n"
              << "purity=" << fmt(obs.purity) << "\n"
              << "residual=" << fmt(steady.residual) << "\n"
              << "nullspace_dim=" << steady.nullspace_dim << "\n";
    return 0;
}

struct SweepArgs {
    std::string n_list = "30";
    double h = 1.0;
    double kappa = 0.05;
    double gamma_min = 0.0;
    double gamma_max = 2.0;
    int gamma_count = 41;
    std::string theta_axis = "x";
    double theta_min = 0.0;
    double theta_max = 0.0;
    int theta_count = 2;
    std::string theta_scale = "linear";
    std::string outputs;
    std::string out;
    int workers = 1;
    std::string config;
};

int run_sweep_cmd(const SweepArgs& args) {
    lmg::SweepConfig config;
    config.model.h = args.h;
    config.model.kappa = args.kappa;
    config.gamma_axis = {args.gamma_min, args.gamma_max, args.gamma_count};
    config.theta_range = {args.theta_min, args.theta_max, args.theta_count};
    config.worker_count = args.workers;
    config.output_path = args.out;

    // Route the flag values through the same parser the config file uses so
    // both spellings are validated identically.
    std::map<std::string, std::string> kv;
    kv["n_list"] = args.n_list;
    kv["theta_axis"] = args.theta_axis;
    kv["theta_scale"] = args.theta_scale;
    if (!args.outputs.empty()) kv["outputs"] = args.outputs;
    lmg::apply_config(config, kv);

    if (!args.config.empty()) {
        lmg::apply_config(config, lmg::parse_config_file(args.config));
    }
    if (config.output_path.empty()) {
        throw lmg::config_error(
            "sweep: no output path (set --out or output_path)");
    }

    const lmg::SweepResult result = lmg::run_sweep(config);
    lmg::export_csv(result, config.output_path);
    lmg::export_json_metadata(result, config.output_path + ".meta.json");

    std::cout << "sweep: " << result.cells.size() << " cells, "
              << result.failed_cells << " failed, config hash "
              << result.config_hash << "\n";
    if (result.predicate_disagreements > 0) {
        std::cout << "sweep: concurrence branch predicates disagreed on "
                  << result.predicate_disagreements << " cells\n";
    }
    std::cout << "sweep: wrote " << config.output_path << " and "
              << config.output_path << ".meta.json\n";
    return result.failed_cells == 0 ? 0 : 1;
}

struct ExtractArgs {
    std::string in;
    std::string mode = "contour";
    double level = 0.93;
    std::string out;
};

int run_extract(const ExtractArgs& args) {
    const lmg::SweepResult result = lmg::parse_csv(args.in);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!args.out.empty()) {
        file = open_out(args.out);
        out = &file;
    }

    if (args.mode == "contour") {
        const lmg::ContourResult contour = lmg::iso_contour(result, args.level);
        *out << "theta,gamma_x\n";
        for (const lmg::ContourPoint& p : contour.points) {
            *out << fmt(p.theta) << ',' << fmt(p.gamma_x) << '\n';
        }
        for (double theta : contour.rows_without_crossing) {
            std::cerr << "extract: no crossing of level " << fmt(args.level)
                      << " in theta row " << fmt(theta) << "\n";
        }
    } else if (args.mode == "concurrence-max") {
        *out << "theta,gamma_star,c_max,all_zero\n";
        for (const lmg::RowExtremum& row :
             lmg::locate_concurrence_max(result)) {
            *out << fmt(row.theta) << ',' << fmt(row.gamma_star) << ','
                 << fmt(row.value) << ',' << (row.all_zero ? 1 : 0) << '\n';
        }
    } else {
        *out << "theta,gamma_star,min_derivative,no_minimum\n";
        for (const lmg::RowExtremum& row :
             lmg::locate_derivative_min(result)) {
            *out << fmt(row.theta) << ',' << fmt(row.gamma_star) << ','
                 << fmt(row.value) << ',' << (row.all_zero ? 1 : 0) << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    // Single-threaded BLAS keeps every solve deterministic; sweep-level
    // parallelism happens across cells instead.
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    setenv("OMP_NUM_THREADS", "1", 0);

    CLI::App app{"dissipative collective-spin model: spectra, steady states, "
                 "feedback sweeps"};
    app.set_version_flag("--version", lmg::kVersion);
    app.require_subcommand(1);
    // The field-strength flag is literally --h, so the short help alias -h
    // has to go (long --help stays, inherited by every subcommand).
    app.set_help_flag("--help", "print usage");

    SpectrumArgs spectrum;
    auto* spectrum_cmd = app.add_subcommand(
        "spectrum", "closed-system eigenvalues with parity labels over a "
                    "gamma_x grid");
    spectrum_cmd->add_option("--n", spectrum.n, "number of spins");
    spectrum_cmd->add_option("--h", spectrum.h, "field strength");
    spectrum_cmd->add_option("--gamma-min", spectrum.gamma_min, "grid start");
    spectrum_cmd->add_option("--gamma-max", spectrum.gamma_max, "grid end");
    spectrum_cmd->add_option("--gamma-count", spectrum.gamma_count,
                             "grid points");
    spectrum_cmd->add_option("--out", spectrum.out, "output CSV path");
    spectrum_cmd->add_option("--config", spectrum.config,
                             "config file (overrides flags)");

    DosArgs dos;
    auto* dos_cmd = app.add_subcommand(
        "dos", "density of states histogram at one gamma_x");
    dos_cmd->add_option("--n", dos.n, "number of spins");
    dos_cmd->add_option("--h", dos.h, "field strength");
    dos_cmd->add_option("--gamma", dos.gamma, "interaction gamma_x");
    dos_cmd->add_option("--bins", dos.bins, "histogram bins (>= 10)");
    dos_cmd->add_option("--out", dos.out, "output CSV path");
    dos_cmd->add_option("--config", dos.config,
                        "config file (overrides flags)");

    GroundstateArgs groundstate;
    auto* groundstate_cmd = app.add_subcommand(
        "groundstate", "ground-state energy density and its first two "
                       "derivatives over a gamma_x grid");
    groundstate_cmd->add_option("--n", groundstate.n, "number of spins");
    groundstate_cmd->add_option("--h", groundstate.h, "field strength");
    groundstate_cmd->add_option("--gamma-min", groundstate.gamma_min,
                                "grid start");
    groundstate_cmd->add_option("--gamma-max", groundstate.gamma_max,
                                "grid end");
    groundstate_cmd->add_option("--gamma-count", groundstate.gamma_count,
                                "grid points");
    groundstate_cmd->add_option("--out", groundstate.out, "output CSV path");
    groundstate_cmd->add_option("--config", groundstate.config,
                                "config file (overrides flags)");

    MeanfieldArgs meanfield;
    auto* meanfield_cmd = app.add_subcommand(
        "meanfield", "thermodynamic-limit fixed points and stability over a "
                     "gamma_x grid");
    meanfield_cmd->add_option("--h", meanfield.h, "field strength");
    meanfield_cmd->add_option("--kappa", meanfield.kappa, "dissipation rate");
    meanfield_cmd->add_option("--gamma-min", meanfield.gamma_min,
                              "grid start");
    meanfield_cmd->add_option("--gamma-max", meanfield.gamma_max, "grid end");
    meanfield_cmd->add_option("--gamma-count", meanfield.gamma_count,
                              "grid points");
    meanfield_cmd->add_option("--out", meanfield.out, "output CSV path");
    meanfield_cmd->add_option("--config", meanfield.config,
                              "config file (overrides flags)");

    SteadyArgs steady;
    auto* steady_cmd = app.add_subcommand(
        "steady", "steady state and observables at a single parameter point");
    steady_cmd->add_option("--n", steady.n, "number of spins");
    steady_cmd->add_option("--h", steady.h, "field strength");
    steady_cmd->add_option("--kappa", steady.kappa, "dissipation rate");
    steady_cmd->add_option("--gamma", steady.gamma, "interaction gamma_x");
    steady_cmd->add_option("--theta-x", steady.theta_x, "feedback angle x");
    steady_cmd->add_option("--theta-y", steady.theta_y, "feedback angle y");
    steady_cmd->add_option("--theta-z", steady.theta_z, "feedback angle z");
    steady_cmd->add_option("--config", steady.config,
                           "config file (overrides flags)");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "(gamma_x, theta) steady-state grid, CSV + JSON metadata");
    sweep_cmd->add_option("--n", sweep.n_list,
                          "comma-separated list of spin numbers");
    sweep_cmd->add_option("--h", sweep.h, "field strength");
    sweep_cmd->add_option("--kappa", sweep.kappa, "dissipation rate");
    sweep_cmd->add_option("--gamma-min", sweep.gamma_min, "gamma grid start");
    sweep_cmd->add_option("--gamma-max", sweep.gamma_max, "gamma grid end");
    sweep_cmd->add_option("--gamma-count", sweep.gamma_count,
                          "gamma grid points");
    sweep_cmd->add_option("--theta-axis", sweep.theta_axis,
                          "feedback axis, x or z");
    sweep_cmd->add_option("--theta-min", sweep.theta_min, "theta grid start");
    sweep_cmd->add_option("--theta-max", sweep.theta_max, "theta grid end");
    sweep_cmd->add_option("--theta-count", sweep.theta_count,
                          "theta grid points");
    sweep_cmd->add_option("--theta-scale", sweep.theta_scale,
                          "theta sampling, linear or log1p");
    sweep_cmd->add_option("--outputs", sweep.outputs,
                          "comma-separated observable names (export is "
                          "always the full set)");
    sweep_cmd->add_option("--out", sweep.out, "output CSV path");
    sweep_cmd->add_option("--workers", sweep.workers, "worker threads");
    sweep_cmd->add_option("--config", sweep.config,
                          "config file (overrides flags)");

    ExtractArgs extract;
    auto* extract_cmd = app.add_subcommand(
        "extract", "post-process a sweep CSV: iso-contour, concurrence "
                   "maxima, or derivative minima per theta row");
    extract_cmd->add_option("--in", extract.in, "sweep CSV to read")
        ->required();
    extract_cmd
        ->add_option("--mode", extract.mode,
                     "contour | concurrence-max | derivative-min")
        ->check(CLI::IsMember({"contour", "concurrence-max",
                               "derivative-min"}));
    extract_cmd->add_option("--level", extract.level,
                            "jz/j level for contour mode");
    extract_cmd->add_option("--out", extract.out,
                            "output CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum_cmd->parsed()) return run_spectrum(spectrum);
        if (dos_cmd->parsed()) return run_dos(dos);
        if (groundstate_cmd->parsed()) return run_groundstate(groundstate);
        if (meanfield_cmd->parsed()) return run_meanfield(meanfield);
        if (steady_cmd->parsed()) return run_steady(steady);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep);
        if (extract_cmd->parsed()) return run_extract(extract);
    } catch (const lmg::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
