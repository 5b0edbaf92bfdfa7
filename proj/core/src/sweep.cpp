#include "lmg/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "lmg/errors.hpp"
#include "lmg/liouvillian.hpp"
#include "lmg/steady.hpp"
#include "lmg/version.hpp"

namespace lmg {

namespace {

const char* kCsvHeader =
    "N,h,kappa,gamma_x,theta_axis,theta,jz,jz_over_j,jx2,jy2,jz2,jplus2_abs,"
    "concurrence,purity,residual,nullspace_dim";

const std::set<std::string>& known_output_names() {
    static const std::set<std::string> names = {
        "jz", "jz_over_j", "jx2", "jy2", "jz2", "jplus2_abs",
        "concurrence", "purity"};
    return names;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string now_iso8601() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream stream(s);
    std::string item;
    while (std::getline(stream, item, sep)) parts.push_back(item);
    return parts;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t consumed = 0;
        const double v = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' has non-numeric value '" +
                           value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t consumed = 0;
        const long v = std::stol(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' has non-integer value '" +
                           value + "'");
    }
}

std::string theta_axis_name(ThetaAxis axis) {
    return axis == ThetaAxis::x ? "x" : "z";
}

std::string theta_scale_name(ThetaScale scale) {
    return scale == ThetaScale::linear ? "linear" : "log1p";
}

// The single-N requirement below keeps row extraction unambiguous; files
// holding several system sizes must be filtered before extraction.
int require_single_n(const SweepResult& result) {
    if (result.cells.empty()) {
        throw invalid_argument("extraction: result holds no cells");
    }
    const int n = result.cells.front().n;
    for (const CellResult& cell : result.cells) {
        if (cell.n != n) {
            throw invalid_argument(
                "extraction: result mixes several N values; filter to one "
                "system size first");
        }
    }
    return n;
}

// Gathers the canonical row for one theta value; cells are stored theta-major
// with gamma ascending inside a row.
std::vector<const CellResult*> theta_row(const SweepResult& result,
                                         size_t theta_idx) {
    const size_t n_gamma = result.gamma_values.size();
    std::vector<const CellResult*> row;
    row.reserve(n_gamma);
    for (size_t g = 0; g < n_gamma; ++g) {
        row.push_back(&result.cells[theta_idx * n_gamma + g]);
    }
    return row;
}

}  // namespace

void validate(const SweepConfig& config) {
    validate(config.model);
    if (config.n_list.empty()) {
        throw config_error("sweep: n_list must not be empty");
    }
    std::set<int> seen;
    for (int n : config.n_list) {
        if (n < 2) {
            throw config_error(
                "sweep: every N must be >= 2 (pairwise concurrence needs at "
                "least two spins), got " + std::to_string(n));
        }
        if (!seen.insert(n).second) {
            throw config_error("sweep: duplicate N = " + std::to_string(n) +
                               " in n_list");
        }
    }
    for (const AxisSpec* axis : {&config.gamma_axis, &config.theta_range}) {
        if (axis->count < 2) {
            throw config_error("sweep: every axis needs count >= 2");
        }
        if (!std::isfinite(axis->min) || !std::isfinite(axis->max) ||
            axis->min > axis->max) {
            throw config_error("sweep: axis range must be finite with "
                               "min <= max");
        }
    }
    if (config.theta_range.min < 0.0) {
        throw config_error("sweep: theta axis must start at >= 0");
    }
    const int n_min = *std::min_element(config.n_list.begin(),
                                        config.n_list.end());
    const double theta_cap = M_PI * std::sqrt(double(n_min));
    if (config.theta_range.max > theta_cap + 1e-12) {
        throw config_error(
            "sweep: theta max " + std::to_string(config.theta_range.max) +
            " exceeds pi*sqrt(N) = " + std::to_string(theta_cap) +
            " for N = " + std::to_string(n_min));
    }
    for (const std::string& name : config.outputs) {
        if (known_output_names().count(name) == 0) {
            throw config_error("sweep: unknown output name '" + name + "'");
        }
    }
    if (config.worker_count < 1) {
        throw config_error("sweep: worker_count must be >= 1");
    }
}

std::vector<double> axis_values(const AxisSpec& axis, ThetaScale scale) {
    if (axis.count < 2) {
        throw invalid_argument("axis_values: count must be >= 2");
    }
    std::vector<double> values(static_cast<size_t>(axis.count));
    if (scale == ThetaScale::linear) {
        const double step = (axis.max - axis.min) / (axis.count - 1);
        for (int i = 0; i < axis.count; ++i) {
            values[static_cast<size_t>(i)] = axis.min + i * step;
        }
    } else {
        if (axis.min < 0.0) {
            throw invalid_argument("axis_values: log1p scale needs min >= 0");
        }
        const double lo = std::log1p(axis.min);
        const double hi = std::log1p(axis.max);
        const double step = (hi - lo) / (axis.count - 1);
        for (int i = 0; i < axis.count; ++i) {
            values[static_cast<size_t>(i)] = std::expm1(lo + i * step);
        }
    }
    values.front() = axis.min;
    values.back() = axis.max;
    return values;
}

SweepResult run_sweep(const SweepConfig& config) {
    validate(config);

    SweepResult result;
    result.config = config;
    result.gamma_values = axis_values(config.gamma_axis, ThetaScale::linear);
    result.theta_values = axis_values(config.theta_range, config.theta_scale);
    result.config_hash = config_hash(config);
    result.code_version = kVersion;
    result.started_at = now_iso8601();

    std::vector<int> n_sorted = config.n_list;
    std::sort(n_sorted.begin(), n_sorted.end());

    // Transverse control angles force the dense Liouvillian, whose storage
    // is capped; surface that before any work is queued.
    if (config.theta_axis == ThetaAxis::x) {
        bool any_nonzero_theta = false;
        for (double t : result.theta_values) {
            if (t != 0.0) any_nonzero_theta = true;
        }
        if (any_nonzero_theta && n_sorted.back() + 1 > kDenseDimLimit) {
            throw resource_error(
                "sweep: transverse feedback at N = " +
                std::to_string(n_sorted.back()) +
                " needs a dense Liouvillian beyond the dimension cap of " +
                std::to_string(kDenseDimLimit));
        }
    }

    const size_t n_gamma = result.gamma_values.size();
    const size_t n_theta = result.theta_values.size();
    const size_t total = n_sorted.size() * n_theta * n_gamma;
    result.cells.resize(total);

    std::atomic<size_t> next{0};
    std::atomic<long> disagreements{0};
    std::atomic<long> failures{0};

    const auto worker = [&]() {
        for (;;) {
            const size_t idx = next.fetch_add(1);
            if (idx >= total) return;

            const size_t n_idx = idx / (n_theta * n_gamma);
            const size_t t_idx = (idx / n_gamma) % n_theta;
            const size_t g_idx = idx % n_gamma;

            CellResult& cell = result.cells[idx];
            cell.n = n_sorted[n_idx];
            cell.gamma_x = result.gamma_values[g_idx];
            cell.theta = result.theta_values[t_idx];

            ModelParams params = config.model;
            params.n_spins = cell.n;
            params.gamma_x = cell.gamma_x;
            params.theta_x = params.theta_y = params.theta_z = 0.0;
            if (config.theta_axis == ThetaAxis::x) {
                params.theta_x = cell.theta;
            } else {
                params.theta_z = cell.theta;
            }

            try {
                const Basis basis = build_basis(params.n_spins);
                const SuperOperator liouv =
                    build_liouvillian(params, basis, true);
                const SteadyStateResult steady = solve_steady_state(liouv);
                cell.obs = compute_observables(steady.rho, basis);
                cell.residual = steady.residual;
                cell.nullspace_dim = steady.nullspace_dim;
                cell.ok = true;

                ConcurrenceDiag diag;
                concurrence_from_moments(cell.obs.jz, cell.obs.jz2,
                                         cell.obs.jx2, cell.obs.jy2,
                                         cell.obs.jplus2_abs, cell.n, &diag);
                if (diag.predicates_disagree) ++disagreements;
            } catch (const error& e) {
                cell.ok = false;
                cell.error = e.what();
                ++failures;
            }
        }
    };

    const int n_workers =
        static_cast<int>(std::min<size_t>(config.worker_count, total));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    result.predicate_disagreements = disagreements.load();
    result.failed_cells = failures.load();
    result.finished_at = now_iso8601();
    return result;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("config: cannot open '" + path + "'");
    }
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("config: line " + std::to_string(lineno) +
                               " of '" + path + "' is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw config_error("config: line " + std::to_string(lineno) +
                               " of '" + path + "' has an empty key or value");
        }
        if (!kv.emplace(key, value).second) {
            throw config_error("config: duplicate key '" + key + "' in '" +
                               path + "'");
        }
    }
    return kv;
}

const std::vector<std::string>& allowed_keys() {
    static const std::vector<std::string> keys = {
        "n_list", "h", "kappa", "gamma_min", "gamma_max", "gamma_count",
        "theta_axis", "theta_min", "theta_max", "theta_count", "theta_scale",
        "outputs", "output_path", "workers"};
    return keys;
}

void apply_config(SweepConfig& config,
                  const std::map<std::string, std::string>& kv) {
    const auto& allowed = allowed_keys();
    for (const auto& [key, value] : kv) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw config_error("config: unknown key '" + key + "'");
        }
        if (key == "n_list") {
            config.n_list.clear();
            for (const std::string& part : split(value, ',')) {
                config.n_list.push_back(parse_int(key, trim(part)));
            }
        } else if (key == "h") {
            config.model.h = parse_double(key, value);
        } else if (key == "kappa") {
            config.model.kappa = parse_double(key, value);
        } else if (key == "gamma_min") {
            config.gamma_axis.min = parse_double(key, value);
        } else if (key == "gamma_max") {
            config.gamma_axis.max = parse_double(key, value);
        } else if (key == "gamma_count") {
            config.gamma_axis.count = parse_int(key, value);
        } else if (key == "theta_axis") {
            if (value == "x") {
                config.theta_axis = ThetaAxis::x;
            } else if (value == "z") {
                config.theta_axis = ThetaAxis::z;
            } else {
                throw config_error("config: theta_axis must be 'x' or 'z', "
                                   "got '" + value + "'");
            }
        } else if (key == "theta_min") {
            config.theta_range.min = parse_double(key, value);
        } else if (key == "theta_max") {
            config.theta_range.max = parse_double(key, value);
        } else if (key == "theta_count") {
            config.theta_range.count = parse_int(key, value);
        } else if (key == "theta_scale") {
            if (value == "linear") {
                config.theta_scale = ThetaScale::linear;
            } else if (value == "log1p") {
                config.theta_scale = ThetaScale::log1p;
            } else {
                throw config_error("config: theta_scale must be 'linear' or "
                                   "'log1p', got '" + value + "'");
            }
        } else if (key == "outputs") {
            config.outputs.clear();
            for (const std::string& part : split(value, ',')) {
                config.outputs.push_back(trim(part));
            }
        } else if (key == "output_path") {
            config.output_path = value;
        } else if (key == "workers") {
            config.worker_count = parse_int(key, value);
        }
    }
}

std::string config_hash(const SweepConfig& config) {
    // Canonical serialization: semantic fields only, in schema order, with
    // full-precision numbers. Output path and worker count do not change any
    // computed value and stay out of the hash.
    std::string canon = "h=" + fmt_double(config.model.h) +
                        ";kappa=" + fmt_double(config.model.kappa) +
                        ";n_list=";
    std::vector<int> n_sorted = config.n_list;
    std::sort(n_sorted.begin(), n_sorted.end());
    for (size_t i = 0; i < n_sorted.size(); ++i) {
        if (i) canon += ',';
        canon += std::to_string(n_sorted[i]);
    }
    canon += ";gamma=" + fmt_double(config.gamma_axis.min) + ',' +
             fmt_double(config.gamma_axis.max) + ',' +
             std::to_string(config.gamma_axis.count);
    canon += ";theta_axis=" + theta_axis_name(config.theta_axis);
    canon += ";theta=" + fmt_double(config.theta_range.min) + ',' +
             fmt_double(config.theta_range.max) + ',' +
             std::to_string(config.theta_range.count);
    canon += ";theta_scale=" + theta_scale_name(config.theta_scale);
    canon += ";outputs=";
    for (size_t i = 0; i < config.outputs.size(); ++i) {
        if (i) canon += ',';
        canon += config.outputs[i];
    }

    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash));
    return buf;
}

void export_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw io_error("export_csv: cannot open '" + path + "' for writing");
    }
    out << kCsvHeader << '\n';
    const std::string axis = theta_axis_name(result.config.theta_axis);
    for (const CellResult& cell : result.cells) {
        if (!cell.ok) continue;
        out << cell.n << ',' << fmt_double(result.config.model.h) << ','
            << fmt_double(result.config.model.kappa) << ','
            << fmt_double(cell.gamma_x) << ',' << axis << ','
            << fmt_double(cell.theta) << ',' << fmt_double(cell.obs.jz) << ','
            << fmt_double(cell.obs.jz_normalized) << ','
            << fmt_double(cell.obs.jx2) << ',' << fmt_double(cell.obs.jy2)
            << ',' << fmt_double(cell.obs.jz2) << ','
            << fmt_double(cell.obs.jplus2_abs) << ','
            << fmt_double(cell.obs.concurrence) << ','
            << fmt_double(cell.obs.purity) << ','
            << fmt_double(cell.residual) << ',' << cell.nullspace_dim << '\n';
    }
    if (!out) {
        throw io_error("export_csv: write to '" + path + "' failed");
    }
}

void export_json_metadata(const SweepResult& result, const std::string& path) {
    nlohmann::json j;
    j["config"] = {
        {"h", result.config.model.h},
        {"kappa", result.config.model.kappa},
        {"n_list", result.config.n_list},
        {"gamma_min", result.config.gamma_axis.min},
        {"gamma_max", result.config.gamma_axis.max},
        {"gamma_count", result.config.gamma_axis.count},
        {"theta_axis", theta_axis_name(result.config.theta_axis)},
        {"theta_min", result.config.theta_range.min},
        {"theta_max", result.config.theta_range.max},
        {"theta_count", result.config.theta_range.count},
        {"theta_scale", theta_scale_name(result.config.theta_scale)},
        {"outputs", result.config.outputs},
        {"output_path", result.config.output_path},
        {"workers", result.config.worker_count},
    };
    j["config_hash"] = result.config_hash;
    j["code_version"] = result.code_version;
    j["started_at"] = result.started_at;
    j["finished_at"] = result.finished_at;
    j["predicate_disagreements"] = result.predicate_disagreements;
    j["failed_cells"] = nlohmann::json::array();
    for (const CellResult& cell : result.cells) {
        if (cell.ok) continue;
        j["failed_cells"].push_back({{"n", cell.n},
                                     {"gamma_x", cell.gamma_x},
                                     {"theta", cell.theta},
                                     {"error", cell.error}});
    }

    std::ofstream out(path);
    if (!out) {
        throw io_error("export_json_metadata: cannot open '" + path +
                       "' for writing");
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw io_error("export_json_metadata: write to '" + path +
                       "' failed");
    }
}

SweepResult parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("parse_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader) {
        throw io_error("parse_csv: '" + path +
                       "' does not start with the expected header");
    }

    SweepResult result;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 16) {
            throw io_error("parse_csv: line " + std::to_string(lineno) +
                           " has " + std::to_string(fields.size()) +
                           " fields, expected 16");
        }
        CellResult cell;
        try {
            cell.n = parse_int("N", fields[0]);
            result.config.model.h = parse_double("h", fields[1]);
            result.config.model.kappa = parse_double("kappa", fields[2]);
            cell.gamma_x = parse_double("gamma_x", fields[3]);
            if (fields[4] == "x") {
                result.config.theta_axis = ThetaAxis::x;
            } else if (fields[4] == "z") {
                result.config.theta_axis = ThetaAxis::z;
            } else {
                throw config_error("bad axis '" + fields[4] + "'");
            }
            cell.theta = parse_double("theta", fields[5]);
            cell.obs.jz = parse_double("jz", fields[6]);
            cell.obs.jz_normalized = parse_double("jz_over_j", fields[7]);
            cell.obs.jx2 = parse_double("jx2", fields[8]);
            cell.obs.jy2 = parse_double("jy2", fields[9]);
            cell.obs.jz2 = parse_double("jz2", fields[10]);
            cell.obs.jplus2_abs = parse_double("jplus2_abs", fields[11]);
            cell.obs.concurrence = parse_double("concurrence", fields[12]);
            cell.obs.purity = parse_double("purity", fields[13]);
            cell.residual = parse_double("residual", fields[14]);
            cell.nullspace_dim = parse_int("nullspace_dim", fields[15]);
        } catch (const error& e) {
            throw io_error("parse_csv: line " + std::to_string(lineno) +
                           " of '" + path + "': " + e.what());
        }
        cell.ok = true;
        result.cells.push_back(cell);
    }

    // Reconstruct the grid axes from the data: theta values in encounter
    // order (rows are theta-major), gamma from the first theta block.
    std::set<int> n_seen;
    for (const CellResult& cell : result.cells) n_seen.insert(cell.n);
    result.config.n_list.assign(n_seen.begin(), n_seen.end());
    for (const CellResult& cell : result.cells) {
        if (result.theta_values.empty() ||
            cell.theta != result.theta_values.back()) {
            result.theta_values.push_back(cell.theta);
        }
    }
    // Duplicate thetas from several N blocks collapse here.
    std::vector<double> unique_thetas;
    for (double t : result.theta_values) {
        if (std::find(unique_thetas.begin(), unique_thetas.end(), t) ==
            unique_thetas.end()) {
            unique_thetas.push_back(t);
        }
    }
    result.theta_values = unique_thetas;
    if (!result.cells.empty()) {
        const double theta0 = result.cells.front().theta;
        const int n0 = result.cells.front().n;
        for (const CellResult& cell : result.cells) {
            if (cell.n == n0 && cell.theta == theta0) {
                result.gamma_values.push_back(cell.gamma_x);
            }
        }
    }
    result.code_version = kVersion;
    return result;
}

ContourResult iso_contour(const SweepResult& result, double level) {
    require_single_n(result);
    const size_t n_gamma = result.gamma_values.size();
    if (n_gamma < 2) {
        throw invalid_argument("iso_contour: need at least 2 gamma samples");
    }
    if (result.cells.size() != n_gamma * result.theta_values.size()) {
        throw invalid_argument("iso_contour: cell count does not match the "
                               "grid");
    }

    ContourResult contour;
    for (size_t t = 0; t < result.theta_values.size(); ++t) {
        const auto row = theta_row(result, t);
        const double theta = result.theta_values[t];
        bool found = false;
        for (size_t g = 0; g + 1 < n_gamma && !found; ++g) {
            const CellResult* a = row[g];
            const CellResult* b = row[g + 1];
            if (!a->ok || !b->ok) continue;
            const double va = a->obs.jz_normalized - level;
            const double vb = b->obs.jz_normalized - level;
            if (va == 0.0) {
                contour.points.push_back({theta, a->gamma_x});
                found = true;
            } else if (va * vb < 0.0) {
                const double frac = va / (va - vb);
                contour.points.push_back(
                    {theta, a->gamma_x + frac * (b->gamma_x - a->gamma_x)});
                found = true;
            }
        }
        if (!found) {
            const CellResult* last = row[n_gamma - 1];
            if (last->ok && last->obs.jz_normalized == level) {
                contour.points.push_back({theta, last->gamma_x});
            } else {
                contour.rows_without_crossing.push_back(theta);
            }
        }
    }
    return contour;
}

std::vector<RowExtremum> locate_concurrence_max(const SweepResult& result) {
    require_single_n(result);
    const size_t n_gamma = result.gamma_values.size();
    if (result.cells.size() != n_gamma * result.theta_values.size()) {
        throw invalid_argument("locate_concurrence_max: cell count does not "
                               "match the grid");
    }

    std::vector<RowExtremum> rows;
    for (size_t t = 0; t < result.theta_values.size(); ++t) {
        const auto row = theta_row(result, t);
        RowExtremum ext;
        ext.theta = result.theta_values[t];

        int best = -1;
        bool any_nonzero = false;
        for (size_t g = 0; g < n_gamma; ++g) {
            if (!row[g]->ok) continue;
            const double c = row[g]->obs.concurrence;
            if (c != 0.0) any_nonzero = true;
            if (best < 0 || c > row[static_cast<size_t>(best)]->obs.concurrence) {
                best = static_cast<int>(g);
            }
        }
        if (best < 0) {
            throw numeric_error("locate_concurrence_max: theta row " +
                                fmt_double(ext.theta) +
                                " holds no successful cells");
        }
        ext.all_zero = !any_nonzero;
        ext.gamma_star = row[static_cast<size_t>(best)]->gamma_x;
        ext.value = row[static_cast<size_t>(best)]->obs.concurrence;

        const size_t b = static_cast<size_t>(best);
        if (!ext.all_zero && b > 0 && b + 1 < n_gamma && row[b - 1]->ok &&
            row[b + 1]->ok) {
            const double y0 = row[b - 1]->obs.concurrence;
            const double y1 = row[b]->obs.concurrence;
            const double y2 = row[b + 1]->obs.concurrence;
            const double curvature = y0 - 2.0 * y1 + y2;
            if (curvature < 0.0) {
                double delta = 0.5 * (y0 - y2) / curvature;
                delta = std::clamp(delta, -0.5, 0.5);
                const double step = row[b]->gamma_x - row[b - 1]->gamma_x;
                ext.gamma_star += delta * step;
                ext.value = y1 - 0.25 * (y0 - y2) * delta;
            }
        }
        rows.push_back(ext);
    }
    return rows;
}

std::vector<RowExtremum> locate_derivative_min(const SweepResult& result) {
    require_single_n(result);
    const size_t n_gamma = result.gamma_values.size();
    if (result.cells.size() != n_gamma * result.theta_values.size()) {
        throw invalid_argument("locate_derivative_min: cell count does not "
                               "match the grid");
    }

    std::vector<RowExtremum> rows;
    for (size_t t = 0; t < result.theta_values.size(); ++t) {
        const auto row = theta_row(result, t);
        std::vector<double> jz_series;
        jz_series.reserve(n_gamma);
        for (const CellResult* cell : row) {
            if (!cell->ok) {
                throw numeric_error(
                    "locate_derivative_min: theta row " +
                    fmt_double(result.theta_values[t]) +
                    " has failed cells, derivative is undefined");
            }
            jz_series.push_back(cell->obs.jz);
        }
        const DerivativeResult der =
            sweep_derivative(jz_series, result.gamma_values);
        RowExtremum ext;
        ext.theta = result.theta_values[t];
        ext.gamma_star = der.argmin;
        ext.value = der.min_value;
        ext.all_zero = !der.has_minimum;
        rows.push_back(ext);
    }
    return rows;
}

}  // namespace lmg
