#include "wealthx/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "CLI11.hpp"
#include "wealthx/report.hpp"

namespace wealthx {

namespace {

constexpr std::string_view env_prefix = "WEALTHX_";

struct ExperimentName {
    Experiment value;
    std::string_view name;
};

constexpr ExperimentName experiment_names[] = {
    {Experiment::single_run, "single-run"},     {Experiment::sweep_f, "sweep-f"},
    {Experiment::sweep_lambda, "sweep-lambda"}, {Experiment::grid_lambda_p, "grid-lambda-p"},
    {Experiment::p_star, "p-star"},
};

std::string env_name(std::string_view key) {
    std::string name(env_prefix);
    for (char c : key) name.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return name;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& key, std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw UsageError(key, "--" + key + ": cannot read '" + std::string(text) + "' as a number");
    }
    return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = std::min(text.find(',', start), text.size());
        const std::string item = trim(std::string_view(text).substr(start, comma - start));
        if (item.empty()) throw UsageError(key, "--" + key + ": empty entry in '" + text + "'");
        values.push_back(parse_real(key, item));
        start = comma + 1;
    }
    return values;
}

/// `--config path`, `--config=path`, else WEALTHX_CONFIG.
std::optional<std::string> find_config_path(const std::vector<std::string>& args, const EnvLookup& env) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 == args.size()) throw UsageError("config", "--config needs a file name");
            return args[i + 1];
        }
        if (args[i].starts_with("--config=")) return args[i].substr(9);
    }
    return env(env_name("config"));
}

std::vector<std::string> config_tokens(const std::string& path, const std::set<std::string>& known) {
    std::ifstream in(path);
    if (!in) throw UsageError("config", "cannot read config file '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = path + ":" + std::to_string(number);
        if (eq == std::string::npos) throw UsageError("config", where + ": expected key=value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (!known.contains(key)) throw UsageError(key, where + ": unknown key '" + key + "'");
        tokens.push_back("--" + key + "=" + trim(std::string_view(body).substr(eq + 1)));
    }
    return tokens;
}

void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) throw UsageError(key, "--" + key + ": " + message);
}

void require_range(double v, const std::string& key, double lo, double hi, bool open_lo = false) {
    const bool above = open_lo ? v > lo : v >= lo;
    require(above && v <= hi, key,
            format_real(v) + " is outside " + (open_lo ? "(" : "[") + format_real(lo) + ", " + format_real(hi) + "]");
}

void require_each(const std::vector<double>& values, const std::string& key, double lo, double hi,
                  bool open_lo = false) {
    require(!values.empty(), key, "needs at least one value");
    for (double v : values) require_range(v, key, lo, hi, open_lo);
}

// Raw option values as CLI11 fills them; mapped onto RunManifest afterwards.
struct RawOptions {
    std::string experiment;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::size_t replicas = 100;
    std::size_t workers = 0;
    std::string rule = "fair";
    double f = 0.0;
    double lambda = 0.0;
    double p = 1.0;
    std::string mode = "universal";
    std::uint64_t max_steps = 1'000'000;
    std::uint64_t equil_window = 1000;
    double equil_tol = 1e-3;
    std::uint64_t sample_every = 10;
    double zwa_threshold = 1e-7;
    std::string f_values;
    double f_min = 0.0;
    double f_max = 0.5;
    double f_step = 0.05;
    std::string lambda_values;
    double lambda_min = 0.0;
    double lambda_max = 1.0;
    double lambda_step = 0.05;
    std::string p_values;
    double p_min = 1e-3;
    std::size_t p_coarse = 12;
    std::size_t p_refine = 6;
    bool lorenz = false;
    std::size_t lorenz_points = 1000;
    std::string out;
    std::string format = "csv";
    std::string paper_scale;
    std::string config;
};

void define_options(CLI::App& app, RawOptions& o) {
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

    std::vector<std::string> names;
    for (const auto& e : experiment_names) names.emplace_back(e.name);
    app.add_option("experiment", o.experiment, "single-run | sweep-f | sweep-lambda | grid-lambda-p | p-star")
        ->required()
        ->check(CLI::IsMember(names));

    app.add_option("--n", o.n, "Number of agents");
    app.add_option("--seed", o.seed, "Master seed; replica i derives its own stream from it");
    app.add_option("--replicas", o.replicas, "Replicas per parameter point");
    app.add_option("--workers", o.workers, "Worker threads (0 = one per hardware thread)");
    app.add_option("--rule", o.rule, "Exchange rule")->check(CLI::IsMember({"fair", "loser"}));
    app.add_option("--f", o.f, "Social protection factor, [0, 0.5]");
    app.add_option("--lambda", o.lambda, "Wealth tax rate per step, [0, 1]");
    app.add_option("--p", o.p, "Fraction of poorest agents receiving the tax pool, (0, 1]");
    app.add_option("--mode", o.mode, "Redistribution mode")->check(CLI::IsMember({"universal", "targeted"}));
    app.add_option("--max-steps", o.max_steps, "Monte Carlo step budget per replica");
    app.add_option("--equil-window", o.equil_window, "Stationarity window in Monte Carlo steps");
    app.add_option("--equil-tol", o.equil_tol, "Relative change of the window-mean Gini that counts as stationary");
    app.add_option("--sample-every", o.sample_every, "Steps between metric samples inside a window");
    app.add_option("--zwa-threshold", o.zwa_threshold, "Wealth below this counts as zero");
    app.add_option("--f-values", o.f_values, "Comma-separated f grid (sweep-f)");
    app.add_option("--f-min", o.f_min, "First f of a regular grid");
    app.add_option("--f-max", o.f_max, "Last f of a regular grid");
    app.add_option("--f-step", o.f_step, "Spacing of the f grid");
    app.add_option("--lambda-values", o.lambda_values, "Comma-separated lambda grid");
    app.add_option("--lambda-min", o.lambda_min, "First lambda of a regular grid");
    app.add_option("--lambda-max", o.lambda_max, "Last lambda of a regular grid");
    app.add_option("--lambda-step", o.lambda_step, "Spacing of the lambda grid");
    app.add_option("--p-values", o.p_values, "Comma-separated p grid (default: log grid)");
    app.add_option("--p-min", o.p_min, "Lower end (exclusive) of the default log p grid");
    app.add_option("--p-coarse", o.p_coarse, "Points in the default log p grid");
    app.add_option("--p-refine", o.p_refine, "Extra points around the coarse p* (p-star)");
    app.add_flag("--lorenz", o.lorenz, "Also write mean Lorenz curves");
    app.add_option("--lorenz-points", o.lorenz_points, "Maximum Lorenz intervals per curve");
    app.add_option("--out", o.out, "Output data file (default results.csv / results.jsonl)");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--paper-scale", o.paper_scale, "Preset: curves (N=1e4) or symbols (N=1e5), 1000 replicas")
        ->check(CLI::IsMember({"curves", "symbols"}));
    app.add_option("--config", o.config, "key=value file; keys are the long flag names");
}

}  // namespace

UsageError::UsageError(std::string key, const std::string& message)
    : std::runtime_error(message), key_(std::move(key)) {}

std::string_view to_string(Experiment e) noexcept {
    for (const auto& entry : experiment_names) {
        if (entry.value == e) return entry.name;
    }
    return "?";
}

std::string_view to_string(OutputFormat f) noexcept { return f == OutputFormat::csv ? "csv" : "jsonl"; }

Experiment parse_experiment(std::string_view name) {
    for (const auto& entry : experiment_names) {
        if (entry.name == name) return entry.value;
    }
    throw UsageError("experiment", "unknown experiment '" + std::string(name) + "'");
}

std::optional<std::string> process_env(const std::string& name) {
    if (const char* value = std::getenv(name.c_str())) return std::string(value);
    return std::nullopt;
}

std::vector<double> linear_grid(double first, double last, double step) {
    if (!(step > 0.0) || first > last) throw std::invalid_argument("linear_grid: need step > 0 and first <= last");
    const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double v = first + static_cast<double>(i) * step;
        grid.push_back(std::round(v * 1e12) / 1e12);
    }
    return grid;
}

EnsembleOptions RunManifest::ensemble_options() const {
    EnsembleOptions options;
    options.n_replicas = replicas;
    options.master_seed = master_seed;
    options.workers = workers;
    options.keep_lorenz = lorenz;
    options.lorenz_resolution = lorenz_points;
    return options;
}

RunManifest parse_manifest(const std::vector<std::string>& args, const EnvLookup& env) {
    if (args.empty()) throw UsageError("experiment", "an experiment is required; see --help");

    CLI::App app("Kinetic wealth-exchange simulator", "wealthx");
    RawOptions o;
    define_options(app, o);

    std::set<std::string> known;
    for (const CLI::Option* opt : app.get_options()) {
        for (const auto& name : opt->get_lnames()) {
            if (name != "help" && name != "config") known.insert(name);
        }
    }

    // Lowest precedence first: TakeLast lets later tokens win.
    std::vector<std::string> tokens;
    if (const auto path = find_config_path(args, env)) tokens = config_tokens(*path, known);
    for (const auto& key : known) {
        if (const auto value = env(env_name(key))) tokens.push_back("--" + key + "=" + *value);
    }
    tokens.insert(tokens.end(), args.begin(), args.end());
    std::reverse(tokens.begin(), tokens.end());

    try {
        app.parse(tokens);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError("", e.what());
    }
    const auto given = [&](const std::string& key) { return app.count("--" + key) > 0; };

    RunManifest m;
    m.experiment = parse_experiment(o.experiment);

    if (!o.paper_scale.empty()) {
        if (!given("n")) o.n = o.paper_scale == "symbols" ? 100'000 : 10'000;
        if (!given("replicas")) o.replicas = 1000;
    }

    require(o.n >= 2, "n", "needs at least 2 agents");
    require(o.replicas >= 1, "replicas", "needs at least 1 replica");
    require_range(o.f, "f", 0.0, 0.5);
    require_range(o.lambda, "lambda", 0.0, 1.0);
    require_range(o.p, "p", 0.0, 1.0, true);
    require(o.max_steps >= 1, "max-steps", "must be positive");
    require(o.equil_window >= 1, "equil-window", "must be positive");
    require(o.equil_window < o.max_steps, "equil-window",
            std::to_string(o.equil_window) + " must be below --max-steps " + std::to_string(o.max_steps));
    require(o.equil_tol > 0.0 && std::isfinite(o.equil_tol), "equil-tol", "must be positive");
    require(o.sample_every >= 1 && o.sample_every <= o.equil_window, "sample-every",
            "must be between 1 and --equil-window");
    require(o.zwa_threshold > 0.0 && std::isfinite(o.zwa_threshold), "zwa-threshold", "must be positive");
    require(o.lorenz_points >= 1, "lorenz-points", "must be positive");

    const bool targeted = o.mode == "targeted";
    require(!given("p") || targeted, "p", "only applies with --mode targeted");

    const auto grid_keys_given = [&](const std::string& axis) {
        return given(axis + "-min") || given(axis + "-max") || given(axis + "-step");
    };
    const auto reject_axis = [&](const std::string& axis) {
        for (const auto& suffix : {"-values", "-min", "-max", "-step"}) {
            const std::string key = axis + suffix;
            require(!given(key), key, "does not apply to " + o.experiment);
        }
    };
    const auto read_axis = [&](const std::string& axis, const std::string& list, double first, double last,
                               double step, double lo, double hi) {
        const std::string list_key = axis + "-values";
        std::vector<double> values;
        if (given(list_key)) {
            require(!grid_keys_given(axis), list_key,
                    "conflicts with --" + axis + "-min/--" + axis + "-max/--" + axis + "-step");
            values = parse_list(list_key, list);
        } else {
            require(step > 0.0, axis + "-step", "must be positive");
            require(first <= last, axis + "-min", "must not exceed --" + axis + "-max");
            values = linear_grid(first, last, step);
        }
        require_each(values, given(list_key) ? list_key : axis + "-min", lo, hi);
        return values;
    };
    const auto reject_p_grid = [&] {
        for (const auto* key : {"p-values", "p-min", "p-coarse", "p-refine"}) {
            require(!given(key), key, "does not apply to " + o.experiment);
        }
    };

    switch (m.experiment) {
        case Experiment::single_run:
            reject_axis("f");
            reject_axis("lambda");
            reject_p_grid();
            break;
        case Experiment::sweep_f:
            require(!given("f"), "f", "conflicts with the f grid of sweep-f; use --f-values or --f-min/--f-max/--f-step");
            reject_axis("lambda");
            reject_p_grid();
            m.f_values = read_axis("f", o.f_values, o.f_min, o.f_max, o.f_step, 0.0, 0.5);
            break;
        case Experiment::sweep_lambda:
            require(!given("lambda"), "lambda", "conflicts with the lambda grid of sweep-lambda");
            require(!targeted, "mode", "sweep-lambda uses universal redistribution; see grid-lambda-p");
            reject_axis("f");
            reject_p_grid();
            m.lambda_values = read_axis("lambda", o.lambda_values, o.lambda_min, o.lambda_max, o.lambda_step, 0.0, 1.0);
            break;
        case Experiment::grid_lambda_p:
        case Experiment::p_star: {
            const bool grid = m.experiment == Experiment::grid_lambda_p;
            require(!(given("mode") && !targeted), "mode", o.experiment + " always uses targeted redistribution");
            require(!given("p"), "p", "conflicts with the p grid of " + o.experiment);
            reject_axis("f");
            if (grid) {
                require(!given("lambda"), "lambda", "conflicts with the lambda grid of grid-lambda-p");
                require(!given("p-refine"), "p-refine", "only applies to p-star");
                m.lambda_values = read_axis("lambda", o.lambda_values, o.lambda_min, o.lambda_max, o.lambda_step, 0.0, 1.0);
            } else {
                reject_axis("lambda");
            }
            if (given("p-values")) {
                require(!given("p-min") && !given("p-coarse") && !given("p-refine"), "p-values",
                        "conflicts with --p-min/--p-coarse/--p-refine");
                m.p_values = parse_list("p-values", o.p_values);
                require_each(m.p_values, "p-values", 0.0, 1.0, true);
                if (!grid) {
                    require(std::is_sorted(m.p_values.begin(), m.p_values.end()), "p-values",
                            "must be in ascending order");
                }
            } else {
                require_range(o.p_min, "p-min", 0.0, 1.0, true);
                require(o.p_min < 1.0, "p-min", "must be below 1");
                require(o.p_coarse >= 1, "p-coarse", "must be positive");
                if (grid) m.p_values = log_p_grid(o.p_min, o.p_coarse);
            }
            o.mode = "targeted";
            break;
        }
    }

    m.run.sim.n_agents = o.n;
    m.run.sim.zero_wealth_threshold = o.zwa_threshold;
    m.run.exchange.rule = parse_exchange_rule(o.rule);
    m.run.exchange.protection_f = o.f;
    m.run.fiscal.tax_rate = o.lambda;
    m.run.fiscal.mode = parse_redistribution(o.mode);
    m.run.fiscal.target_fraction = o.mode == "targeted" ? o.p : 1.0;
    m.run.max_steps = o.max_steps;
    m.run.equil_window = o.equil_window;
    m.run.equil_tol = o.equil_tol;
    m.run.sample_every = o.sample_every;

    m.master_seed = o.seed;
    m.replicas = o.replicas;
    m.workers = o.workers;
    m.p_min = o.p_min;
    m.p_coarse = o.p_coarse;
    m.p_refine = o.p_refine;
    m.lorenz = o.lorenz;
    m.lorenz_points = o.lorenz_points;
    m.format = o.format == "jsonl" ? OutputFormat::jsonl : OutputFormat::csv;
    m.out = o.out.empty() ? std::string("results.") + std::string(to_string(m.format)) : o.out;
    m.paper_scale = o.paper_scale;

    // Anything the checks above missed still fails here, before any work.
    try {
        m.run.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError("", e.what());
    }
    return m;
}

}  // namespace wealthx
