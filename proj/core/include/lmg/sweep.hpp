#pragma once

// Sweep orchestration and data export: 2D (gamma_x, theta) steady-state
// grids, flat key-value configs, canonical CSV/JSON output, and the feature
// extraction used for post-processing (iso-contours, derivative minima,
// concurrence maxima).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmg/model.hpp"
#include "lmg/observables.hpp"

namespace lmg {

struct AxisSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 0;
};

enum class ThetaAxis { x, z };
enum class ThetaScale { linear, log1p };

struct SweepConfig {
    ModelParams model;       // h, kappa; theta_* supplied by the theta axis
    std::vector<int> n_list = {30};
    AxisSpec gamma_axis{0.0, 2.0, 41};
    ThetaAxis theta_axis = ThetaAxis::x;
    AxisSpec theta_range{0.0, 0.0, 2};
    ThetaScale theta_scale = ThetaScale::linear;
    std::vector<std::string> outputs;  // validated names; export always full
    std::string output_path;
    int worker_count = 1;
};

void validate(const SweepConfig& config);

// Grid sampling. Linear: uniform in theta. log1p: uniform in log(theta + 1),
// matching the presentation axis; values are stored and swept in raw theta.
std::vector<double> axis_values(const AxisSpec& axis, ThetaScale scale);

struct CellResult {
    int n = 0;
    double gamma_x = 0.0;
    double theta = 0.0;
    bool ok = false;
    ObservableSet obs;
    double residual = 0.0;
    int nullspace_dim = 0;
    std::string error;  // set when !ok
};

struct SweepResult {
    SweepConfig config;
    std::vector<double> gamma_values;
    std::vector<double> theta_values;
    // Canonical order: N ascending, then theta-major, then gamma ascending.
    std::vector<CellResult> cells;
    std::string config_hash;
    std::string code_version;
    std::string started_at;
    std::string finished_at;
    long predicate_disagreements = 0;
    long failed_cells = 0;
};

// Runs the grid with worker_count threads pulling cells from a shared queue.
// Cell results land in preallocated canonical slots, so the output is
// byte-identical regardless of worker count or completion order. Per-cell
// solver failures are recorded in place; only config or resource problems
// abort the sweep.
SweepResult run_sweep(const SweepConfig& config);

// -- flat key-value config files --------------------------------------------
//
// Format: one `key = value` per line, '#' starts a comment. Unknown keys are
// rejected. parse_config_file returns the raw map; apply_config applies it
// onto a SweepConfig (file values override whatever the caller set from
// flags). allowed_keys() names the full schema.
std::map<std::string, std::string> parse_config_file(const std::string& path);
const std::vector<std::string>& allowed_keys();
void apply_config(SweepConfig& config, const std::map<std::string, std::string>& kv);

// FNV-1a over the canonicalized config, hex encoded.
std::string config_hash(const SweepConfig& config);

// -- export ------------------------------------------------------------------

// Columns, exactly:
// N,h,kappa,gamma_x,theta_axis,theta,jz,jz_over_j,jx2,jy2,jz2,jplus2_abs,
// concurrence,purity,residual,nullspace_dim
// Floats carry 17 significant digits. Failed cells are omitted from the CSV
// and listed in the JSON metadata; the CLI exits nonzero when any exist.
void export_csv(const SweepResult& result, const std::string& path);

// Config echo, hash, version, timestamps, and per-cell error records.
void export_json_metadata(const SweepResult& result, const std::string& path);

// Reads a CSV produced by export_csv back into a (gridless) result; used by
// the extraction subcommand.
SweepResult parse_csv(const std::string& path);

// -- feature extraction -------------------------------------------------------

struct ContourPoint {
    double theta;
    double gamma_x;
};

struct ContourResult {
    std::vector<ContourPoint> points;
    std::vector<double> rows_without_crossing;  // theta values, for reporting
};

// Per-theta-row first crossing of jz/j through `level`, scanning from the
// low-gamma end with linear interpolation. Rows that never cross are listed,
// not silently dropped.
ContourResult iso_contour(const SweepResult& result, double level);

struct RowExtremum {
    double theta;
    double gamma_star;
    double value;
    bool all_zero;  // concurrence rows that vanish identically are flagged
};

// Per-row concurrence maximum with quadratic sub-grid refinement; ties take
// the first (lowest gamma) grid point.
std::vector<RowExtremum> locate_concurrence_max(const SweepResult& result);

// Per-row argmin of the d<J_z>/d(gamma) central-difference derivative.
std::vector<RowExtremum> locate_derivative_min(const SweepResult& result);

}  // namespace lmg
