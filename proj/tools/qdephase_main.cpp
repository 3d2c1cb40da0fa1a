// qdephase_main.cpp — CLI front end: spectra, trajectories, dynamics reports, calibration, ingestion

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdeph/calibration.hpp"
#include "qdeph/dephasing.hpp"
#include "qdeph/environment.hpp"
#include "qdeph/errors.hpp"
#include "qdeph/io.hpp"
#include "qdeph/nonmarkov.hpp"

namespace {

using namespace qdeph;

struct RunConfig {
    double w0_mm{0.88};
    std::string q0y;                 // number or "fit"; empty = unset
    double phi_rad{0.0};
    double dv_mm{0.0};
    bool has_dv{false};
    std::string dv_grid;             // "start:stop:step"; empty = unset
    int dc_points{default_trajectory_points};
    std::string dc_range_mm{"auto"};
    std::string output_path{"-"};
    std::string format;              // empty = command default
    std::string table_path;
    std::string input_path;
    bool do_fit{false};              // ingest: fit spectrum parameters too
};

struct CommonOpts {
    CLI::Option* w0{nullptr};
    CLI::Option* q0y{nullptr};
    CLI::Option* phi{nullptr};
    CLI::Option* dv{nullptr};
    CLI::Option* dv_grid{nullptr};
    CLI::Option* dc_points{nullptr};
    CLI::Option* dc_range{nullptr};
    CLI::Option* out{nullptr};
    CLI::Option* format{nullptr};
    CLI::Option* config{nullptr};
    CLI::Option* table{nullptr};
    CLI::Option* input{nullptr};
    std::string config_path;
};

CommonOpts add_common(CLI::App* sub, RunConfig& cfg) {
    CommonOpts o;
    o.w0 = sub->add_option("--w0-mm", cfg.w0_mm, "beam waist (mm)");
    o.q0y = sub->add_option("--q0y", cfg.q0y, "central momentum (mm^-1) or 'fit'");
    o.phi = sub->add_option("--phi", cfg.phi_rad, "coupling phase (rad)");
    o.dv = sub->add_option("--dv-mm", cfg.dv_mm, "beam half-separation (mm)");
    o.dv_grid = sub->add_option("--dv-grid", cfg.dv_grid, "dv sweep 'start:stop:step' (mm)");
    o.dc_points = sub->add_option("--dc-points", cfg.dc_points, "trajectory sample count");
    o.dc_range = sub->add_option("--dc-range-mm", cfg.dc_range_mm, "trajectory span (mm) or 'auto'");
    o.out = sub->add_option("--out", cfg.output_path, "output file ('-' = stdout)");
    o.format = sub->add_option("--format", cfg.format, "csv or json");
    o.config = sub->add_option("--config", o.config_path, "key = value config file; flags win");
    o.table = sub->add_option("--table", cfg.table_path, "reference table CSV (dv_mm,nd)");
    o.input = sub->add_option("--input", cfg.input_path, "measured spectrum CSV (q_mm_inv,counts)");
    return o;
}

double parse_double(const std::string& v, const std::string& what) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw invalid_input(what + ": not a number: '" + v + "'");
}

int parse_int(const std::string& v, const std::string& what) {
    const double x = parse_double(v, what);
    if (x != static_cast<int>(x)) throw invalid_input(what + ": not an integer: '" + v + "'");
    return static_cast<int>(x);
}

// key = value lines, '#' comments; fills only fields the command line left unset.
void apply_config_file(const CommonOpts& o, RunConfig& cfg) {
    if (o.dv->count() > 0) cfg.has_dv = true;
    if (o.config->count() == 0) return;
    std::ifstream in(o.config_path);
    if (!in) throw invalid_input("cannot open config '" + o.config_path + "'");

    std::map<std::string, std::pair<CLI::Option*, std::function<void(const std::string&)>>> keys{
        {"w0_mm", {o.w0, [&](const std::string& v) { cfg.w0_mm = parse_double(v, "w0_mm"); }}},
        {"q0y_mm_inv", {o.q0y, [&](const std::string& v) { cfg.q0y = v; }}},
        {"phi_rad", {o.phi, [&](const std::string& v) { cfg.phi_rad = parse_double(v, "phi_rad"); }}},
        {"dv_mm", {o.dv, [&](const std::string& v) { cfg.dv_mm = parse_double(v, "dv_mm"); cfg.has_dv = true; }}},
        {"dv_grid", {o.dv_grid, [&](const std::string& v) { cfg.dv_grid = v; }}},
        {"dc_points", {o.dc_points, [&](const std::string& v) { cfg.dc_points = parse_int(v, "dc_points"); }}},
        {"dc_range_mm", {o.dc_range, [&](const std::string& v) { cfg.dc_range_mm = v; }}},
        {"output_path", {o.out, [&](const std::string& v) { cfg.output_path = v; }}},
        {"format", {o.format, [&](const std::string& v) { cfg.format = v; }}},
        {"table_path", {o.table, [&](const std::string& v) { cfg.table_path = v; }}},
        {"input_path", {o.input, [&](const std::string& v) { cfg.input_path = v; }}},
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string{};
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (strip(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw invalid_input(o.config_path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end())
            throw invalid_input(o.config_path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (it->second.first->count() == 0) it->second.second(value);
    }
}

void require_format(const RunConfig& cfg, const std::string& wanted, const std::string& cmd) {
    if (!cfg.format.empty() && cfg.format != wanted)
        throw invalid_input(cmd + " emits " + wanted + " only (got --format " + cfg.format + ")");
}

void write_text(const std::string& path, const std::string& body) {
    if (path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot write '" + path + "'");
    out << body;
}

double resolve_q0y(const RunConfig& cfg) {
    if (cfg.q0y.empty()) throw invalid_input("--q0y is required (a number, or 'fit' with --table)");
    if (cfg.q0y != "fit") return parse_double(cfg.q0y, "--q0y");
    if (cfg.table_path.empty()) throw invalid_input("--q0y fit needs --table");
    const auto rows = read_csv_pairs(cfg.table_path, "dv_mm,nd");
    return fit_q0y(cfg.w0_mm, rows).q0y_fit;
}

Eigen::ArrayXd parse_dv_grid(const std::string& text) {
    std::istringstream ss(text);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
        throw invalid_input("--dv-grid expects start:stop:step");
    const double start = parse_double(a, "--dv-grid start");
    const double stop = parse_double(b, "--dv-grid stop");
    const double step = parse_double(c, "--dv-grid step");
    if (!(start > 0.0) || !(start < stop) || !(step > 0.0))
        throw invalid_input("--dv-grid needs 0 < start < stop and step > 0");
    const auto n = static_cast<Eigen::Index>(std::floor((stop - start) / step + 1e-9)) + 1;
    Eigen::ArrayXd grid(n);
    for (Eigen::Index i = 0; i < n; ++i) grid(i) = start + step * static_cast<double>(i);
    return grid;
}

double resolve_dc_range(const RunConfig& cfg, double dv) {
    if (cfg.dc_range_mm == "auto") return dv + 4.0 * cfg.w0_mm;
    const double r = parse_double(cfg.dc_range_mm, "--dc-range-mm");
    if (!(r > 0.0)) throw invalid_input("--dc-range-mm must be positive");
    return r;
}

void require_positive_lengths(const RunConfig& cfg) {
    if (!(cfg.w0_mm > 0.0)) throw invalid_input("w0_mm must be positive");
    if (cfg.has_dv && !(cfg.dv_mm > 0.0)) throw invalid_input("dv_mm must be positive");
}

std::vector<std::pair<double, double>> spectrum_rows(const EnvironmentSpectrum& env) {
    std::vector<std::pair<double, double>> rows;
    rows.reserve(static_cast<std::size_t>(env.q_grid.size()));
    for (Eigen::Index i = 0; i < env.q_grid.size(); ++i) rows.emplace_back(env.q_grid(i), env.density(i));
    return rows;
}

std::string csv_pairs_text(const std::string& header, const std::vector<std::pair<double, double>>& rows) {
    std::string body = header + "\n";
    for (const auto& [a, b] : rows) body += g12(a) + "," + g12(b) + "\n";
    return body;
}

std::string json_report_fields(const DynamicsReport& r) {
    std::string s = "\"nd\": " + g12(r.nd) + ", \"classification\": \"";
    s += r.classification == Dynamics::NonMarkovian ? "NonMarkovian" : "Markovian";
    s += "\", \"dc_max_mm\": ";
    s += r.dc_max ? g12(*r.dc_max) : std::string("null");
    s += ", \"nd_threshold\": " + g12(r.nd_threshold);
    return s;
}

void cmd_env(const RunConfig& cfg) {
    require_format(cfg, "csv", "env");
    require_positive_lengths(cfg);
    EnvironmentSpectrum env;
    if (!cfg.input_path.empty()) {
        env = ingest_tabulated(read_csv_pairs(cfg.input_path, "q_mm_inv,counts"));
    } else {
        const EnvParams p{cfg.w0_mm, resolve_q0y(cfg), cfg.has_dv ? cfg.dv_mm : 0.0, cfg.phi_rad};
        env = cfg.has_dv ? build_structured(p) : build_gaussian(p);
    }
    write_text(cfg.output_path, csv_pairs_text("q_mm_inv,density", spectrum_rows(env)));
}

void cmd_trajectory(const RunConfig& cfg) {
    require_format(cfg, "csv", "trajectory");
    require_positive_lengths(cfg);
    Trajectory traj;
    if (!cfg.input_path.empty()) {
        const auto env = ingest_tabulated(read_csv_pairs(cfg.input_path, "q_mm_inv,counts"));
        traj = trajectory(env, resolve_dc_range(cfg, 0.0), cfg.dc_points);
    } else {
        const EnvParams p{cfg.w0_mm, resolve_q0y(cfg), cfg.has_dv ? cfg.dv_mm : 0.0, cfg.phi_rad};
        traj = trajectory(p, resolve_dc_range(cfg, p.dv), cfg.dc_points);
    }
    std::vector<std::pair<double, double>> rows;
    rows.reserve(static_cast<std::size_t>(traj.dc.size()));
    for (Eigen::Index i = 0; i < traj.dc.size(); ++i) rows.emplace_back(traj.dc(i), traj.d(i));
    write_text(cfg.output_path, csv_pairs_text("dc_mm,trace_distance", rows));
}

void cmd_report(const RunConfig& cfg) {
    require_format(cfg, "json", "report");
    require_positive_lengths(cfg);
    const double q0y = resolve_q0y(cfg);

    if (!cfg.dv_grid.empty()) {
        const Eigen::ArrayXd grid = parse_dv_grid(cfg.dv_grid);
        const auto entries = sweep_reports(cfg.w0_mm, q0y, grid, cfg.dc_points);
        std::string body = "[\n";
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto& e = entries[i];
            body += "  {\"dv_mm\": " + g12(e.dv) + ", ";
            if (e.report) {
                body += json_report_fields(*e.report);
            } else {
                std::string msg = e.error;
                for (auto& ch : msg)
                    if (ch == '"' || ch == '\\') ch = '\'';
                body += "\"error\": \"" + msg + "\"";
            }
            body += i + 1 < entries.size() ? "},\n" : "}\n";
        }
        body += "]\n";
        write_text(cfg.output_path, body);
        return;
    }

    if (!cfg.has_dv) throw invalid_input("report needs --dv-mm or --dv-grid");
    const double dv = cfg.dv_mm;
    const EnvParams p{cfg.w0_mm, q0y, dv, cfg.phi_rad};
    const auto report = analyze(trajectory(p, resolve_dc_range(cfg, dv), cfg.dc_points));
    std::string body = "{\"dv_mm\": " + g12(dv) + ", " + json_report_fields(report) + "}\n";
    write_text(cfg.output_path, body);
}

void cmd_fit(const RunConfig& cfg) {
    require_format(cfg, "json", "fit");
    require_positive_lengths(cfg);
    if (cfg.table_path.empty()) throw invalid_input("fit needs --table");
    const auto rows = read_csv_pairs(cfg.table_path, "dv_mm,nd");
    const CalibrationResult r = fit_q0y(cfg.w0_mm, rows);
    std::string body = "{\"q0y_fit_mm_inv\": " + g12(r.q0y_fit) + ", \"residual\": " + g12(r.residual)
                       + ", \"table\": [\n";
    for (std::size_t i = 0; i < r.table.size(); ++i) {
        const auto& row = r.table[i];
        body += "  {\"dv_mm\": " + g12(row.dv) + ", \"nd_target\": " + g12(row.nd_target)
                + ", \"nd_model\": " + g12(row.nd_model) + (i + 1 < r.table.size() ? "},\n" : "}\n");
    }
    body += "]}\n";
    write_text(cfg.output_path, body);
}

void cmd_ingest(const RunConfig& cfg) {
    require_positive_lengths(cfg);
    if (cfg.input_path.empty()) throw invalid_input("ingest needs --input");
    const auto env = ingest_tabulated(read_csv_pairs(cfg.input_path, "q_mm_inv,counts"));
    if (!cfg.do_fit) {
        require_format(cfg, "csv", "ingest");
        write_text(cfg.output_path, csv_pairs_text("q_mm_inv,density", spectrum_rows(env)));
        return;
    }
    require_format(cfg, "json", "ingest --fit");
    if (cfg.q0y.empty() || !cfg.has_dv)
        throw invalid_input("ingest --fit needs guesses: --w0-mm, --dv-mm and --q0y");
    const EnvParams guess{cfg.w0_mm, parse_double(cfg.q0y, "--q0y"), cfg.dv_mm, cfg.phi_rad};
    const SpectrumFit fit = fit_spectrum(env, guess);
    const std::string body = "{\"w0_mm\": " + g12(fit.params.w0) + ", \"dv_mm\": " + g12(fit.params.dv)
                             + ", \"q0y_mm_inv\": " + g12(fit.params.q0y) + ", \"residual\": " + g12(fit.residual)
                             + ", \"r_squared\": " + g12(fit.r_squared)
                             + ", \"sweeps\": " + std::to_string(fit.sweeps) + "}\n";
    write_text(cfg.output_path, body);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dephasing-qubit simulator: structured environments, trace-distance trajectories,\n"
                 "backflow measure, revival maps, and spectrum calibration"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto* env = app.add_subcommand("env", "emit a spectral density (analytic or ingested) as CSV");
    auto* traj = app.add_subcommand("trajectory", "emit a trace-distance trajectory as CSV");
    auto* report = app.add_subcommand("report", "emit nd / classification / dc_max as JSON");
    auto* fit = app.add_subcommand("fit", "calibrate q0y against a reference nd table, emit JSON");
    auto* ingest = app.add_subcommand("ingest", "clean a measured spectrum; --fit also fits parameters");
    const CommonOpts env_o = add_common(env, cfg);
    const CommonOpts traj_o = add_common(traj, cfg);
    const CommonOpts report_o = add_common(report, cfg);
    const CommonOpts fit_o = add_common(fit, cfg);
    CommonOpts ingest_o = add_common(ingest, cfg);
    ingest->add_flag("--fit", cfg.do_fit, "fit analytic parameters to the cleaned spectrum");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (env->parsed()) {
            apply_config_file(env_o, cfg);
            cmd_env(cfg);
        } else if (traj->parsed()) {
            apply_config_file(traj_o, cfg);
            cmd_trajectory(cfg);
        } else if (report->parsed()) {
            apply_config_file(report_o, cfg);
            cmd_report(cfg);
        } else if (fit->parsed()) {
            apply_config_file(fit_o, cfg);
            cmd_fit(cfg);
        } else if (ingest->parsed()) {
            apply_config_file(ingest_o, cfg);
            cmd_ingest(cfg);
        }
        return 0;
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const engine_error& e) {
        std::cerr << "engine error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
