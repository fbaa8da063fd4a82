#include "wealthx/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace wealthx {

namespace {

using nlohmann::ordered_json;

struct NamedMetric {
    const char* name;
    MetricStats EnsembleStats::*member;
};

constexpr NamedMetric metrics[] = {
    {"gini", &EnsembleStats::gini},
    {"gini_excl_zwa", &EnsembleStats::gini_excl_zwa},
    {"zero_wealth_fraction", &EnsembleStats::zero_wealth_fraction},
    {"top1_share", &EnsembleStats::top1_share},
    {"top10_share", &EnsembleStats::top10_share},
    {"bottom90_share", &EnsembleStats::bottom90_share},
};

/// Row values in table_columns order.
std::vector<double> row_values(const SweepRow& row) {
    std::vector<double> v = row.params;
    v.push_back(static_cast<double>(row.stats.n_replicas));
    for (const auto& m : metrics) {
        v.push_back((row.stats.*m.member).mean);
        v.push_back((row.stats.*m.member).stderr_mean);
    }
    v.push_back(row.stats.converged_fraction);
    v.push_back(row.stats.mean_steps);
    return v;
}

// NaN has no JSON literal; nlohmann writes it as null.
ordered_json json_real(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

void write_csv_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << body;
    out.close();
    if (!out) throw std::runtime_error("failed while writing " + path.string());
}

ordered_json values_json(const std::vector<double>& values) {
    ordered_json arr = ordered_json::array();
    for (double v : values) arr.push_back(v);
    return arr;
}

ordered_json manifest_object(const RunManifest& m) {
    const ReplicaRun& r = m.run;
    ordered_json j;
    j["experiment"] = std::string(to_string(m.experiment));
    j["n"] = r.sim.n_agents;
    j["seed"] = m.master_seed;
    j["replicas"] = m.replicas;
    j["workers"] = m.workers;
    j["rule"] = std::string(to_string(r.exchange.rule));
    // Only the settings the experiment actually uses; swept ones appear as grids.
    const bool p_swept = m.experiment == Experiment::grid_lambda_p || m.experiment == Experiment::p_star;
    if (m.experiment != Experiment::sweep_f) j["f"] = r.exchange.protection_f;
    if (m.experiment != Experiment::sweep_lambda && m.experiment != Experiment::grid_lambda_p) {
        j["lambda"] = r.fiscal.tax_rate;
    }
    j["mode"] = std::string(to_string(r.fiscal.mode));
    if (!p_swept) j["p"] = r.fiscal.target_fraction;
    j["max-steps"] = r.max_steps;
    j["equil-window"] = r.equil_window;
    j["equil-tol"] = r.equil_tol;
    j["sample-every"] = r.sample_every;
    j["zwa-threshold"] = r.sim.zero_wealth_threshold;
    if (m.experiment == Experiment::sweep_f) j["f-values"] = values_json(m.f_values);
    if (!m.lambda_values.empty()) j["lambda-values"] = values_json(m.lambda_values);
    if (!m.p_values.empty()) {
        j["p-values"] = values_json(m.p_values);
    } else if (m.experiment == Experiment::p_star) {
        j["p-min"] = m.p_min;
        j["p-coarse"] = m.p_coarse;
        j["p-refine"] = m.p_refine;
    }
    j["lorenz"] = m.lorenz;
    if (m.lorenz) j["lorenz-points"] = m.lorenz_points;
    j["out"] = m.out;
    j["format"] = std::string(to_string(m.format));
    if (!m.paper_scale.empty()) j["paper-scale"] = m.paper_scale;
    return j;
}

SweepResult single_row(const RunManifest& m) {
    SweepResult result;
    result.param_names = {"f", "lambda", "p"};
    result.n_replicas = m.replicas;
    const auto& r = m.run;
    result.rows.push_back({{r.exchange.protection_f, r.fiscal.tax_rate, r.fiscal.target_fraction},
                           run_ensemble(r, m.ensemble_options())});
    return result;
}

}  // namespace

std::string format_real(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::size_t ExperimentOutcome::unconverged_replicas() const {
    std::size_t count = 0;
    for (const auto& row : table.rows) {
        const double n = static_cast<double>(row.stats.n_replicas);
        count += static_cast<std::size_t>(std::llround(n * (1.0 - row.stats.converged_fraction)));
    }
    return count;
}

ExperimentOutcome run_experiment(const RunManifest& m) {
    const auto options = m.ensemble_options();
    ExperimentOutcome outcome;
    switch (m.experiment) {
        case Experiment::single_run:
            outcome.table = single_row(m);
            break;
        case Experiment::sweep_f:
            outcome.table = sweep_f(m.f_values, m.run, options);
            break;
        case Experiment::sweep_lambda:
            outcome.table = sweep_lambda(m.lambda_values, m.run, options);
            break;
        case Experiment::grid_lambda_p:
            outcome.table = grid_lambda_p(m.lambda_values, m.p_values, m.run, options);
            break;
        case Experiment::p_star: {
            const double lambda = m.run.fiscal.tax_rate;
            auto best = m.p_values.empty() ? search_p_star(lambda, m.run, options, m.p_coarse, m.p_refine)
                                           : find_p_star(lambda, m.p_values, m.run, options);
            outcome.table = std::move(best.table);
            outcome.p_star = best.p_star;
            outcome.gini_at_p_star = best.gini_at_p_star;
            break;
        }
    }
    return outcome;
}

OutputPaths output_paths(const RunManifest& m) {
    OutputPaths paths;
    paths.data = m.out;
    std::filesystem::path stem = paths.data;
    stem.replace_extension();
    const std::string ext = m.format == OutputFormat::csv ? ".csv" : ".jsonl";
    if (m.lorenz) paths.lorenz = stem.string() + ".lorenz" + ext;
    paths.meta = stem.string() + ".meta.json";
    return paths;
}

std::vector<std::string> table_columns(const SweepResult& table) {
    std::vector<std::string> cols = table.param_names;
    cols.emplace_back("n_replicas");
    for (const auto& m : metrics) {
        cols.push_back(std::string(m.name) + "_mean");
        cols.push_back(std::string(m.name) + "_stderr");
    }
    cols.emplace_back("converged_fraction");
    cols.emplace_back("mean_steps");
    return cols;
}

void write_table(std::ostream& os, const SweepResult& table, OutputFormat format) {
    const auto cols = table_columns(table);
    if (format == OutputFormat::csv) {
        write_csv_line(os, cols);
        for (const auto& row : table.rows) {
            std::vector<std::string> cells;
            for (double v : row_values(row)) cells.push_back(format_real(v));
            write_csv_line(os, cells);
        }
        return;
    }
    for (const auto& row : table.rows) {
        const auto values = row_values(row);
        ordered_json line;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            line[cols[i]] = cols[i] == "n_replicas" ? ordered_json(row.stats.n_replicas) : json_real(values[i]);
        }
        os << line.dump() << '\n';
    }
}

void write_lorenz(std::ostream& os, const SweepResult& table, OutputFormat format) {
    if (format == OutputFormat::csv) {
        auto header = table.param_names;
        header.emplace_back("F");
        header.emplace_back("L");
        write_csv_line(os, header);
    }
    for (const auto& row : table.rows) {
        for (const auto& pt : row.stats.mean_lorenz) {
            if (format == OutputFormat::csv) {
                std::vector<std::string> cells;
                for (double v : row.params) cells.push_back(format_real(v));
                cells.push_back(format_real(pt.population));
                cells.push_back(format_real(pt.wealth));
                write_csv_line(os, cells);
            } else {
                ordered_json line;
                for (std::size_t i = 0; i < row.params.size(); ++i) line[table.param_names[i]] = row.params[i];
                line["F"] = pt.population;
                line["L"] = pt.wealth;
                os << line.dump() << '\n';
            }
        }
    }
}

std::string manifest_json(const RunManifest& manifest) { return manifest_object(manifest).dump(2); }

OutputPaths emit_results(const ExperimentOutcome& outcome, const RunManifest& manifest) {
    const auto paths = output_paths(manifest);

    std::ostringstream data;
    write_table(data, outcome.table, manifest.format);
    write_file(paths.data, data.str());

    if (!paths.lorenz.empty()) {
        std::ostringstream curves;
        write_lorenz(curves, outcome.table, manifest.format);
        write_file(paths.lorenz, curves.str());
    }

    // No timestamps or host names: the sidecar is as reproducible as the data.
    ordered_json meta;
    meta["tool"] = "wealthx";
    meta["version"] = version_string;
    meta["manifest"] = manifest_object(manifest);
    meta["replica_seeds"] = "replica i uses mix64(seed ^ mix64(i)), shared by every grid point";
    ordered_json files;
    files["data"] = paths.data.filename().string();
    if (!paths.lorenz.empty()) files["lorenz"] = paths.lorenz.filename().string();
    meta["files"] = files;
    meta["columns"] = table_columns(outcome.table);
    meta["rows"] = outcome.table.rows.size();
    meta["unconverged_replicas"] = outcome.unconverged_replicas();
    if (outcome.p_star) {
        meta["p_star"] = *outcome.p_star;
        meta["gini_at_p_star"] = json_real(*outcome.gini_at_p_star);
    }
    write_file(paths.meta, meta.dump(2) + "\n");
    return paths;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    RunManifest manifest;
    try {
        manifest = parse_manifest(args, env);
    } catch (const HelpRequested& help) {
        out << help.text;
        return exit_code::ok;
    } catch (const UsageError& e) {
        err << "wealthx: " << e.what() << "\n";
        return exit_code::usage;
    }

    out << manifest_json(manifest) << "\n";
    try {
        const auto outcome = run_experiment(manifest);
        const auto paths = emit_results(outcome, manifest);
        out << "wrote " << outcome.table.rows.size() << " rows to " << paths.data.string() << "\n";
        if (!paths.lorenz.empty()) out << "wrote Lorenz curves to " << paths.lorenz.string() << "\n";
        out << "wrote metadata to " << paths.meta.string() << "\n";
        if (outcome.p_star) {
            out << "p* = " << format_real(*outcome.p_star) << ", gini = " << format_real(*outcome.gini_at_p_star)
                << "\n";
        }
        if (const auto n = outcome.unconverged_replicas()) {
            err << "wealthx: " << n << " replica(s) hit --max-steps before the stationarity test passed\n";
            return exit_code::unconverged;
        }
    } catch (const std::exception& e) {
        err << "wealthx: " << e.what() << "\n";
        return exit_code::runtime;
    }
    return exit_code::ok;
}

}  // namespace wealthx
