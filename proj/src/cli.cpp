#include "dynperc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynperc/anatomy.hpp"
#include "dynperc/coupling.hpp"
#include "dynperc/csvio.hpp"
#include "dynperc/environment.hpp"
#include "dynperc/estimators.hpp"
#include "dynperc/oracle.hpp"
#include "dynperc/rng.hpp"
#include "dynperc/simulation.hpp"
#include "dynperc/structure.hpp"

namespace dynperc {
namespace {

// Everything a subcommand can consume. Handlers read only the fields they
// need and echo exactly those into the output metadata, so a header always
// shows the full resolved config of the run that produced the file.
struct CliConfig {
    int n = 100;
    double lambda = 2.0;
    double mu = 1.0;
    double t_max = 10.0;
    std::vector<double> times;
    long replicas = 1000;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string mix_target = "walk";
};

// "# key=value" metadata block shared by every output file. Values are kept
// as strings so the CSV header and the JSON "meta" object carry identical
// content.
struct Meta {
    std::vector<std::string> lines;

    explicit Meta(const std::string& subcommand) {
        add("tool_version", kToolVersion);
        add("subcommand", subcommand);
    }
    void add(const std::string& key, const std::string& value) {
        lines.push_back(key + "=" + value);
    }
    void add(const std::string& key, double value) { add(key, format_double(value)); }
    void add(const std::string& key, long long value) { add(key, std::to_string(value)); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }
    void add(const std::string& key, long value) { add(key, std::to_string(value)); }
    void add_times(const std::vector<double>& times) {
        std::string joined;
        for (double t : times) {
            if (!joined.empty()) joined += ',';
            joined += format_double(t);
        }
        add("times", joined);
    }
    void add_seed(std::uint64_t master) {
        add("master_seed", std::to_string(master));
        add("seed_split", "replica r uses make_rng(master_seed, 64*r+s): "
                          "mt19937_64 over splitmix64-mixed (master, stream)");
    }

    // For prepending to raw CSV text (EventLog::to_csv output).
    std::string header() const {
        std::string h;
        for (const auto& line : lines) h += "# " + line + "\n";
        return h;
    }
    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& line : lines) {
            std::size_t eq = line.find('=');
            j[line.substr(0, eq)] = line.substr(eq + 1);
        }
        return j;
    }
};

std::filesystem::path resolve_out_dir(const CliConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv("DYNPERC_OUT_DIR"); env != nullptr && *env != '\0')
        return env;
    return ".";
}

std::filesystem::path write_output(const CliConfig& cfg, const std::string& name,
                                   const std::string& content) {
    std::filesystem::path dir = resolve_out_dir(cfg);
    std::filesystem::create_directories(dir);
    std::filesystem::path path = dir / name;
    write_file_atomic(path.string(), content);
    return path;
}

// --times when given (validated by the curve functions downstream), otherwise
// ten evenly spaced points ending at --t-max.
std::vector<double> resolve_times(const CliConfig& cfg) {
    if (!cfg.times.empty()) return cfg.times;
    if (!(cfg.t_max > 0.0))
        throw std::invalid_argument("either --times or a positive --t-max is required");
    std::vector<double> times(10);
    for (int i = 0; i < 10; ++i) times[i] = cfg.t_max * (i + 1) / 10.0;
    return times;
}

Params model_params(const CliConfig& cfg) {
    Params params;
    params.n = cfg.n;
    params.lambda = cfg.lambda;
    params.mu = cfg.mu;
    params.validate();
    return params;
}

// ---------------------------------------------------------------------------
// simulate: one trajectory of the full system (stationary environment, walker
// at vertex 0) to --t-max; the event log is the output of record.
// ---------------------------------------------------------------------------
void run_simulate(const CliConfig& cfg, std::ostream& out) {
    Params params = model_params(cfg);
    if (!(cfg.t_max > 0.0)) throw std::invalid_argument("simulate: --t-max must be positive");

    auto rng = make_rng(cfg.seed, 0);
    System sys(params, InitMode::stationary, rng);
    sys.add_walker(0);
    EventLog log;
    advance(sys, cfg.t_max, &log);

    Meta meta("simulate");
    meta.add("n", cfg.n);
    meta.add("lambda", cfg.lambda);
    meta.add("mu", cfg.mu);
    meta.add("t_max", cfg.t_max);
    meta.add("walker_start", 0);
    meta.add_seed(cfg.seed);

    auto path = write_output(cfg, "simulate_events.csv", meta.header() + log.to_csv());
    out << "events=" << log.events.size() << " final_walker=" << sys.walkers[0].position
        << " open_edges=" << sys.env.open_count() << "\n";
    out << "wrote " << path.string() << "\n";
}

// ---------------------------------------------------------------------------
// structure: one ER(n, lambda/n) snapshot through the full structural
// analysis; JSON report plus a one-line-per-clause verdict summary.
// ---------------------------------------------------------------------------
void run_structure(const CliConfig& cfg, std::ostream& out) {
    Params params = model_params(cfg);
    auto rng = make_rng(cfg.seed, 0);
    Graph g = erdos_renyi(params.n, params.p(), rng);
    StructureReport report = analyze_structure(g);

    Meta meta("structure");
    meta.add("n", cfg.n);
    meta.add("lambda", cfg.lambda);
    meta.add_seed(cfg.seed);

    nlohmann::json doc;
    doc["meta"] = meta.to_json();
    doc["report"] = nlohmann::json::parse(report.to_json());
    auto path = write_output(cfg, "structure_report.json", doc.dump(2) + "\n");

    const GoodGraphVerdict& v = report.good;
    out << "giant_size=" << report.giant_size << " core_size=" << report.core_size
        << " kernel_size=" << report.kernel_size << "\n";
    out << "unique_giant=" << v.unique_giant << " giant_size_ok=" << v.giant_size
        << " max_degree=" << v.max_degree << " giant_edges=" << v.giant_edges
        << " deg1_in_giant=" << v.deg1_in_giant << " removal_bounded=" << v.removal_bounded
        << " far_profile=" << v.far_profile << " expansion=" << v.expansion << "\n";
    out << "good=" << v.good << "\n";
    out << "wrote " << path.string() << "\n";
}

// ---------------------------------------------------------------------------
// couple: coalescence-time survival curve of the four-step coupling, started
// from one shared stationary environment and two independent uniform walkers.
// ---------------------------------------------------------------------------
void run_couple(const CliConfig& cfg, std::ostream& out) {
    Params params = model_params(cfg);
    std::vector<double> times = resolve_times(cfg);

    StartSampler sample_start = [params](std::mt19937_64& rng) {
        Environment eta = Environment::init(params, InitMode::stationary, rng);
        std::uniform_int_distribution<int> vertex(0, params.n - 1);
        int x0 = vertex(rng);
        int y0 = vertex(rng);
        return CoupledStart{x0, y0, eta, eta};
    };
    TailCurve curve = coalescence_tail_curve(params, sample_start, times, cfg.replicas, cfg.seed);

    Meta meta("couple");
    meta.add("n", cfg.n);
    meta.add("lambda", cfg.lambda);
    meta.add("mu", cfg.mu);
    meta.add_times(times);
    meta.add("replicas", cfg.replicas);
    meta.add("start", "shared stationary environment, independent uniform walkers");
    meta.add_seed(cfg.seed);
    meta.add("censored_fraction", curve.censored_fraction);

    auto path = write_output(cfg, "couple_tail.csv", estimates_csv(curve.times, curve.survival, meta.lines));
    out << "survival(" << format_double(times.back())
        << ")=" << format_double(curve.survival.back().value)
        << " censored_fraction=" << format_double(curve.censored_fraction) << "\n";
    out << "wrote " << path.string() << "\n";
}

// ---------------------------------------------------------------------------
// mix: plug-in TV mixing curve for one of the three targets, stationary
// environment start, walker at vertex 0.
// ---------------------------------------------------------------------------
void run_mix(const CliConfig& cfg, std::ostream& out) {
    Params params = model_params(cfg);
    std::vector<double> times = resolve_times(cfg);

    MixingTarget target = MixingTarget::walk;
    if (cfg.mix_target == "full-system") target = MixingTarget::full_system;
    else if (cfg.mix_target == "environment-count") target = MixingTarget::environment_count;

    MixingStart start;  // stationary environment, walker 0
    MixingCurve curve = mixing_curve(params, target, start, times, cfg.replicas, cfg.seed);

    Meta meta("mix");
    meta.add("n", cfg.n);
    meta.add("lambda", cfg.lambda);
    meta.add("mu", cfg.mu);
    meta.add_times(times);
    meta.add("replicas", cfg.replicas);
    meta.add("target", cfg.mix_target);
    meta.add_seed(cfg.seed);

    auto path = write_output(cfg, "mix_curve.csv", estimates_csv(curve.times, curve.tv, meta.lines));
    out << "rows=" << curve.times.size() << " tv(" << format_double(times.back())
        << ")=" << format_double(curve.tv.back().value) << "\n";
    out << "wrote " << path.string() << "\n";
}

// ---------------------------------------------------------------------------
// anatomy: generative-giant vs direct-ER summary comparison; JSON report with
// the per-field gaps plus the per-replica summary rows as CSV.
// ---------------------------------------------------------------------------
void run_anatomy(const CliConfig& cfg, std::ostream& out) {
    AnatomyComparison cmp = compare_anatomy_vs_er(cfg.n, cfg.lambda, cfg.replicas, cfg.seed);

    Meta meta("anatomy");
    meta.add("n", cfg.n);
    meta.add("lambda", cfg.lambda);
    meta.add("replicas", cfg.replicas);
    meta.add_seed(cfg.seed);

    nlohmann::json doc;
    doc["meta"] = meta.to_json();
    doc["report"] = nlohmann::json::parse(cmp.to_json());
    auto report_path = write_output(cfg, "anatomy_report.json", doc.dump(2) + "\n");

    CsvTable samples;
    samples.meta = meta.lines;
    samples.columns = {"sampler"};
    for (int f = 0; f < kSummaryFields; ++f) samples.columns.push_back(kSummaryFieldNames[f]);
    auto add_rows = [&samples](const std::vector<GiantSummary>& rows, const char* sampler) {
        for (const GiantSummary& s : rows) {
            std::vector<std::string> row{sampler};
            for (int f = 0; f < kSummaryFields; ++f)
                row.push_back(std::to_string(summary_field(s, f)));
            samples.add_row(std::move(row));
        }
    };
    add_rows(cmp.reference_rows, "er");
    add_rows(cmp.candidate_rows, "model");
    auto samples_path = write_output(cfg, "anatomy_samples.csv", samples.to_string());

    for (const SummaryGap& gap : cmp.gaps)
        out << gap.name << ": er=" << format_double(gap.reference.value)
            << " model=" << format_double(gap.candidate.value)
            << " relative_gap=" << format_double(gap.relative_gap) << "\n";
    out << "wrote " << report_path.string() << "\n";
    out << "wrote " << samples_path.string() << "\n";
}

// ---------------------------------------------------------------------------
// oracle: exact stationarity residuals of the small-system generator and the
// exact TV tables (edge-marginal environment TV and full-system TV from the
// all-open, walker-0 start), printed and written as CSV.
// ---------------------------------------------------------------------------
void run_oracle(const CliConfig& cfg, std::ostream& out) {
    Params params = model_params(cfg);
    GeneratorSpec spec = make_generator(params);
    ResidualReport residuals = stationarity_residual(spec);

    Meta meta("oracle");
    meta.add("n", cfg.n);
    meta.add("lambda", cfg.lambda);
    meta.add("mu", cfg.mu);
    meta.add_seed(cfg.seed);

    CsvTable res;
    res.meta = meta.lines;
    res.columns = {"statistic", "value"};
    res.add_row({"max_residual", format_double(residuals.max_residual)});
    res.add_row({"max_detailed_balance", format_double(residuals.max_detailed_balance)});
    std::string res_csv = res.to_string();

    std::vector<double> times = resolve_times(cfg);
    std::vector<double> stationary = stationary_distribution(spec);
    unsigned all_open = static_cast<unsigned>((1u << spec.N) - 1u);
    std::vector<double> initial = point_distribution(spec, 0, all_open);

    CsvTable tv;
    tv.meta = meta.lines;
    tv.add_meta("initial_state", "walker 0, all edges open");
    tv.columns = {"time", "edge_marginal", "env_tv", "full_system_tv"};
    for (double t : times) {
        double a = params.p() + (1.0 - params.p()) * std::exp(-params.mu * t);
        double env_tv = exact_env_tv(params.N(), params.p(), a);
        std::vector<double> dist = transient_distribution(spec, initial, t);
        double full_tv = tv_distance(dist, stationary);
        tv.add_row({format_double(t), format_double(a), format_double(env_tv),
                    format_double(full_tv)});
    }
    std::string tv_csv = tv.to_string();

    out << res_csv << tv_csv;
    auto res_path = write_output(cfg, "oracle_residuals.csv", res_csv);
    auto tv_path = write_output(cfg, "oracle_tv.csv", tv_csv);
    out << "wrote " << res_path.string() << "\n";
    out << "wrote " << tv_path.string() << "\n";
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"dynamical percolation on the complete graph: event-driven simulation, "
                 "graph-structure reports, coalescent couplings, mixing curves, generative "
                 "giant anatomy and exact small-system oracles"};
    app.set_version_flag("--version", kToolVersion);
    app.failure_message(CLI::FailureMessage::help);
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config")
        ->description("plain-text key=value config file; command-line flags override it");

    CliConfig cfg;
    app.add_option("--n", cfg.n, "number of vertices")->capture_default_str();
    app.add_option("--lambda", cfg.lambda, "edge intensity; p = lambda/n")->capture_default_str();
    app.add_option("--mu", cfg.mu, "per-edge refresh rate")->capture_default_str();
    app.add_option("--t-max", cfg.t_max,
                   "time horizon; without --times, curves use ten even points up to it")
        ->capture_default_str();
    app.add_option("--times", cfg.times, "comma-separated sample times")->delimiter(',');
    app.add_option("--replicas", cfg.replicas, "independent replicas")->capture_default_str();
    app.add_option("--seed", cfg.seed, "64-bit master seed")->capture_default_str();
    app.add_option("--out", cfg.out_dir, "output directory (default: $DYNPERC_OUT_DIR or .)");

    CLI::App* simulate = app.add_subcommand(
        "simulate", "one full-system trajectory; writes the event log as CSV");
    CLI::App* structure = app.add_subcommand(
        "structure", "structural analysis of one ER(n, lambda/n) snapshot; writes JSON");
    CLI::App* couple = app.add_subcommand(
        "couple", "coalescence-time survival curve of the two-system coupling");
    CLI::App* mix = app.add_subcommand("mix", "Monte Carlo TV mixing curve");
    mix->add_option("--target", cfg.mix_target, "observable whose law is tracked")
        ->transform(CLI::IsMember({"walk", "full-system", "environment-count"}))
        ->capture_default_str();
    CLI::App* anatomy = app.add_subcommand(
        "anatomy", "generative giant vs direct ER sampling; writes JSON report and sample CSV");
    CLI::App* oracle = app.add_subcommand(
        "oracle", "exact stationarity residuals and TV tables for n <= 5");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    auto start = std::chrono::steady_clock::now();
    try {
        if (simulate->parsed()) run_simulate(cfg, out);
        else if (structure->parsed()) run_structure(cfg, out);
        else if (couple->parsed()) run_couple(cfg, out);
        else if (mix->parsed()) run_mix(cfg, out);
        else if (anatomy->parsed()) run_anatomy(cfg, out);
        else if (oracle->parsed()) run_oracle(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    err << "wall_seconds=" << format_double(elapsed.count()) << "\n";
    return 0;
}

}  // namespace dynperc
