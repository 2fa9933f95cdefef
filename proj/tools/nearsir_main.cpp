#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nearsir/degree_model.hpp"
#include "nearsir/errors.hpp"
#include "nearsir/giant_component.hpp"
#include "nearsir/harness.hpp"
#include "nearsir/report_io.hpp"
#include "nearsir/rng.hpp"
#include "nearsir/sir_dynamics.hpp"

namespace {

using nlohmann::json;
using namespace nearsir;

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::string out_path;
    std::string format = "csv";
    int threads = 0;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::BadConfig, "cannot open config file: " + path);
    return json::parse(in);
}

int parse_degree_key(const std::string& key) {
    int value = 0;
    const char* end = key.data() + key.size();
    auto [ptr, ec] = std::from_chars(key.data(), end, value);
    if (ec != std::errc() || ptr != end || value < 0)
        throw Error(Errc::BadConfig, "bad degree key: " + key);
    return value;
}

std::map<int, std::int64_t> parse_count_map(const json& j) {
    if (!j.is_object()) throw Error(Errc::BadConfig, "expected an object of degree counts");
    std::map<int, std::int64_t> counts;
    for (auto it = j.begin(); it != j.end(); ++it)
        counts[parse_degree_key(it.key())] = it.value().get<std::int64_t>();
    return counts;
}

std::map<int, std::int64_t> read_degree_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::BadConfig, "cannot open degree file: " + path.string());
    std::map<int, std::int64_t> counts;
    long long d = 0;
    while (in >> d) {
        if (d < 0) throw Error(Errc::BadConfig, "negative degree in " + path.string());
        counts[static_cast<int>(d)] += 1;
    }
    if (!in.eof()) throw Error(Errc::BadConfig, "non-integer token in " + path.string());
    if (counts.empty()) throw Error(Errc::BadConfig, "degree file is empty: " + path.string());
    return counts;
}

EngineKind parse_engine(const std::string& name) {
    if (name == "gillespie") return EngineKind::Gillespie;
    if (name == "pairing") return EngineKind::PairingDynamic;
    if (name == "time_changed") return EngineKind::TimeChanged;
    if (name == "sellke") return EngineKind::Sellke;
    throw Error(Errc::BadConfig,
                "unknown engine: " + name + " (use gillespie, pairing, time_changed, sellke)");
}

SeedPlacement parse_placement(const std::string& name) {
    if (name == "uniform") return SeedPlacement::UniformRandom;
    if (name == "by_degree") return SeedPlacement::ByDegreeSpec;
    if (name == "single_high_degree") return SeedPlacement::SingleHighDegree;
    throw Error(Errc::BadConfig, "unknown seed mode: " + name +
                                     " (use uniform, by_degree, single_high_degree)");
}

ExperimentSpec parse_spec(const json& doc, const std::filesystem::path& config_dir) {
    if (!doc.is_object()) throw Error(Errc::BadConfig, "config root must be an object");
    if (!doc.contains("model")) throw Error(Errc::BadConfig, "config needs a model block");

    ExperimentSpec spec;
    const json& model = doc.at("model");
    if (model.contains("degrees")) {
        spec.model = ModelKind::DegreeCounts;
        const json& degrees = model.at("degrees");
        if (degrees.contains("counts")) {
            spec.degree_counts = parse_count_map(degrees.at("counts"));
        } else if (degrees.contains("file")) {
            const std::filesystem::path p = degrees.at("file").get<std::string>();
            spec.degree_counts = read_degree_file(p.is_absolute() ? p : config_dir / p);
        } else {
            throw Error(Errc::BadConfig, "model.degrees needs counts or file");
        }
    } else if (model.contains("poisson")) {
        spec.model = ModelKind::Poisson;
        const json& poisson = model.at("poisson");
        if (!poisson.contains("n") || !poisson.contains("mean"))
            throw Error(Errc::BadConfig, "model.poisson needs n and mean");
        spec.n = poisson.at("n").get<std::int64_t>();
        spec.poisson_mean = poisson.at("mean").get<double>();
    } else if (model.contains("gnp")) {
        spec.model = ModelKind::Gnp;
        const json& gnp = model.at("gnp");
        if (!gnp.contains("n") || !gnp.contains("p"))
            throw Error(Errc::BadConfig, "model.gnp needs n and p");
        spec.n = gnp.at("n").get<std::int64_t>();
        spec.gnp_p = gnp.at("p").get<double>();
    } else {
        throw Error(Errc::BadConfig, "model needs one of degrees, poisson, gnp");
    }

    if (doc.contains("states")) {
        const json& states = doc.at("states");
        spec.n_infective = states.value("n_I", std::int64_t{1});
        spec.n_recovered = states.value("n_R", std::int64_t{0});
        spec.placement = parse_placement(states.value("mode", std::string("uniform")));
        if (spec.placement == SeedPlacement::ByDegreeSpec) {
            if (!states.contains("by_degree") || !states.at("by_degree").contains("infective"))
                throw Error(Errc::BadConfig, "by_degree mode needs states.by_degree.infective");
            const json& by_degree = states.at("by_degree");
            spec.infective_by_degree = parse_count_map(by_degree.at("infective"));
            if (by_degree.contains("recovered"))
                spec.recovered_by_degree = parse_count_map(by_degree.at("recovered"));
        }
    }

    if (doc.contains("rates")) {
        spec.beta = doc.at("rates").value("beta", 1.0);
        spec.rho = doc.at("rates").value("rho", 1.0);
    }

    if (doc.contains("experiment")) {
        const json& experiment = doc.at("experiment");
        if (experiment.contains("engine"))
            spec.engine = parse_engine(experiment.at("engine").get<std::string>());
        spec.reps = experiment.value("reps", 1);
        spec.classification_epsilon = experiment.value("epsilon", 0.5);
        spec.fresh_graph_per_replica = experiment.value("fresh_graph_per_replica", true);
    }

    if (doc.contains("rng")) spec.master_seed = doc.at("rng").value("seed", std::uint64_t{0});
    return spec;
}

ExperimentSpec spec_for(const json& doc, const CliOptions& opts) {
    ExperimentSpec spec = parse_spec(doc, std::filesystem::path(opts.config_path).parent_path());
    if (opts.seed) spec.master_seed = *opts.seed;
    if (opts.reps) spec.reps = *opts.reps;
    spec.threads = opts.threads;
    return spec;
}

void write_table_report(const Table& table, const Metadata& meta, const CliOptions& opts) {
    if (opts.out_path.empty()) return;
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw Error(Errc::BadConfig, "cannot open output file: " + opts.out_path);
    if (opts.format == "json")
        write_json(table, out, meta);
    else
        write_csv(table, out, meta);
}

void write_text_report(const std::string& text, const CliOptions& opts) {
    if (opts.out_path.empty()) return;
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw Error(Errc::BadConfig, "cannot open output file: " + opts.out_path);
    out << text;
}

int run_predict(const json& doc, const CliOptions& opts) {
    const ExperimentSpec spec = spec_for(doc, opts);
    const ResolvedExperiment rx = resolve_experiment(spec);
    const double p_small = predict_small_outbreak_probability(rx.criticality, rx.reference, false);
    const double p_corrected =
        predict_small_outbreak_probability(rx.criticality, rx.reference, true);

    std::cout << "regime " << regime_name(rx.criticality.regime) << "\n"
              << "r0 " << format_double(rx.criticality.r0) << "\n"
              << "alpha " << format_double(rx.criticality.alpha) << "\n"
              << "nu_proxy " << format_double(rx.criticality.nu) << "\n"
              << "xi " << format_double(rx.criticality.xi) << "\n"
              << "predicted_size " << format_double(rx.prediction.predicted_size) << "\n"
              << "p_small " << format_double(p_small) << "\n"
              << "p_small_corrected " << format_double(p_corrected) << "\n";

    if (!opts.out_path.empty()) {
        if (opts.format == "json") {
            write_text_report(
                prediction_report_json(rx.criticality, rx.prediction, p_small, p_corrected), opts);
        } else {
            const Table table =
                prediction_report_table(rx.criticality, rx.prediction, p_small, p_corrected);
            write_table_report(table, experiment_metadata(rx), opts);
        }
    }
    return 0;
}

int run_validate(const json& doc, const CliOptions& opts) {
    const ExperimentSpec spec = spec_for(doc, opts);
    const DegreeConfiguration config = resolve_reference_config(spec);
    const std::vector<Diagnostic> diagnostics = validate_assumptions(config);

    write_table_report(diagnostics_table(diagnostics), {}, opts);

    std::string first_failure;
    for (const auto& d : diagnostics) {
        const char* level = d.level == Diagnostic::Level::Pass   ? "pass"
                            : d.level == Diagnostic::Level::Warn ? "warn"
                                                                 : "FAIL";
        std::cout << level << "  " << d.name << " = " << format_double(d.value) << "  ("
                  << d.note << ")\n";
        if (d.level == Diagnostic::Level::Fail && first_failure.empty()) first_failure = d.name;
    }
    if (!first_failure.empty()) {
        std::cout << "assumption failure: " << first_failure << "\n";
        return 3;
    }
    std::cout << "assumptions hold\n";
    return 0;
}

int run_simulate(const json& doc, const CliOptions& opts) {
    const ExperimentSpec spec = spec_for(doc, opts);
    const AggregateResult agg = run_experiment(spec);

    Table table;
    table.columns = {"replica",  "final_size",     "duration", "clock",
                     "last_infection_time", "pairing_events", "large",    "error"};
    for (std::size_t r = 0; r < agg.outcomes.size(); ++r) {
        const auto& out = agg.outcomes[r];
        const auto err = agg.replica_errors.find(static_cast<int>(r));
        const bool failed = err != agg.replica_errors.end();
        const bool large =
            !failed &&
            static_cast<double>(out.final_size) > agg.resolved.classification_threshold;
        table.rows.push_back({cell(static_cast<std::int64_t>(r)), cell(out.final_size),
                              cell(out.duration),
                              cell(std::string(out.time_changed_clock ? "time_changed" : "original")),
                              cell(out.last_infection_time), cell(out.pairing_events),
                              cell(std::int64_t{large ? 1 : 0}),
                              cell(failed ? err->second : std::string())});
    }

    Metadata meta = experiment_metadata(agg.resolved);
    meta.emplace_back("reps", cell(std::int64_t{agg.resolved.spec.reps}));
    meta.emplace_back("large_count", cell(agg.large_count));
    meta.emplace_back("p_large_hat", cell(agg.p_large_hat.value));
    meta.emplace_back("p_large_stderr", cell(agg.p_large_hat.std_error));
    meta.emplace_back("large_mean_ratio", cell(agg.large_mean_ratio.value));
    meta.emplace_back("large_ratio_stderr", cell(agg.large_mean_ratio.std_error));
    meta.emplace_back("degree_profile_tv", cell(agg.degree_profile_tv));
    write_table_report(table, meta, opts);

    std::cout << "engine " << engine_name(agg.resolved.spec.engine) << ", reps "
              << agg.resolved.spec.reps << "\n"
              << "large outbreaks " << agg.large_count << " (p_large "
              << format_double(agg.p_large_hat.value) << " +- "
              << format_double(agg.p_large_hat.std_error) << ")\n"
              << "large mean ratio " << format_double(agg.large_mean_ratio.value) << " +- "
              << format_double(agg.large_mean_ratio.std_error) << "\n"
              << "degree profile tv " << format_double(agg.degree_profile_tv) << "\n";
    if (!agg.replica_errors.empty())
        std::cout << agg.replica_errors.size() << " replicas failed\n";
    return 0;
}

int run_sellke_sweep(const json& doc, const CliOptions& opts) {
    ExperimentSpec spec = spec_for(doc, opts);
    spec.engine = EngineKind::Sellke;
    if (!doc.contains("sweep") || !doc.at("sweep").contains("m_grid"))
        throw Error(Errc::BadConfig, "sellke-sweep needs a sweep block with m_grid");
    const json& sweep = doc.at("sweep");
    int realisations = sweep.value("realisations", 20);
    if (opts.reps) realisations = *opts.reps;
    const std::vector<std::int64_t> m_grid =
        sweep.at("m_grid").get<std::vector<std::int64_t>>();

    const ResolvedExperiment rx = resolve_experiment(spec);
    const Table table = figure_fs_scatter(spec, realisations, m_grid);

    Metadata meta = experiment_metadata(rx);
    meta.emplace_back("realisations", cell(std::int64_t{realisations}));
    write_table_report(table, meta, opts);

    std::cout << "realisations " << realisations << ", grid points " << m_grid.size() << ", rows "
              << table.rows.size() << "\n";
    return 0;
}

int run_trajectories(const json& doc, const CliOptions& opts) {
    const ExperimentSpec spec = spec_for(doc, opts);
    int points = 41;
    double horizon = 2.0; // in units of xi
    if (doc.contains("trajectories")) {
        points = doc.at("trajectories").value("points", 41);
        horizon = doc.at("trajectories").value("horizon_xi", 2.0);
    }
    if (points < 2) throw Error(Errc::BadConfig, "trajectories needs at least 2 grid points");
    if (!(horizon > 0)) throw Error(Errc::BadConfig, "horizon must be positive");

    const ResolvedExperiment rx = resolve_experiment(spec);
    const double tau_max = rx.criticality.alpha_bar * horizon * rx.criticality.xi;
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] =
            tau_max * static_cast<double>(i) / static_cast<double>(points - 1);

    PhiloxRng rng(rx.spec.master_seed, stream_id(StreamChannel::Replica, 0));
    auto [outcome, record] = run_time_changed(rx.reference, rng, grid);
    try {
        DeterministicTrajectories f = deterministic_trajectories(rx.reference, grid);
        record.f_s = std::move(f.f_s);
        record.f_i = std::move(f.f_i);
        record.f_r = std::move(f.f_r);
    } catch (const Error& e) {
        if (e.code() != Errc::UnsupportedInitialRecovered) throw;
    }

    Metadata meta = experiment_metadata(rx);
    meta.emplace_back("tau_end", cell(outcome.duration));
    meta.emplace_back("final_size", cell(outcome.final_size));
    meta.emplace_back("xi", cell(rx.criticality.xi));
    meta.emplace_back("alpha_bar", cell(rx.criticality.alpha_bar));
    write_table_report(trajectory_table(record, rx.reference), meta, opts);

    std::cout << "final size " << outcome.final_size << ", tau_end "
              << format_double(outcome.duration) << " (alpha_bar*xi = "
              << format_double(rx.criticality.alpha_bar * rx.criticality.xi) << ")\n";
    return 0;
}

int run_giant(const json& doc, const CliOptions& opts) {
    const ExperimentSpec spec = spec_for(doc, opts);
    if (spec.model == ModelKind::Gnp)
        throw Error(Errc::BadConfig, "giant needs a degree model (counts or poisson)");
    const DegreeConfiguration reference = resolve_reference_config(spec);

    std::vector<int> degrees;
    const std::size_t top = std::max({reference.n_s.size(), reference.n_i.size(),
                                      reference.n_r.size()});
    for (std::size_t k = 0; k < top; ++k) {
        std::int64_t count = 0;
        if (k < reference.n_s.size()) count += reference.n_s[k];
        if (k < reference.n_i.size()) count += reference.n_i[k];
        if (k < reference.n_r.size()) count += reference.n_r[k];
        degrees.insert(degrees.end(), static_cast<std::size_t>(count), static_cast<int>(k));
    }

    const GiantLawReport report = verify_giant_law(degrees, spec.reps, spec.master_seed);

    if (!opts.out_path.empty()) {
        if (opts.format == "json") {
            write_text_report(giant_report_json(report), opts);
        } else {
            auto [table, meta] = giant_report_table(report);
            write_table_report(table, meta, opts);
        }
    }

    std::cout << "n " << report.n << ", reps " << report.reps << "\n"
              << "c1/(n alpha) " << format_double(report.c1_over_nalpha.mean) << " +- "
              << format_double(report.c1_over_nalpha.std_error) << " (predicted "
              << format_double(report.predicted_c1) << ")\n"
              << "c2/(n alpha) " << format_double(report.c2_over_nalpha.mean) << "\n";
    for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
    return 0;
}

int run_survival(const json& doc, const CliOptions& opts) {
    const ExperimentSpec spec = spec_for(doc, opts);
    if (!doc.contains("survival") || !doc.at("survival").contains("targets"))
        throw Error(Errc::BadConfig, "survival-curve needs a survival block with targets");
    const std::vector<double> targets =
        doc.at("survival").at("targets").get<std::vector<double>>();

    const Table table = survival_curve(spec, targets);
    const ResolvedExperiment rx = resolve_experiment(spec);
    write_table_report(table, experiment_metadata(rx), opts);

    for (const auto& row : table.rows)
        std::cout << "target " << row[0].text << ": seeds " << row[1].text << ", p_small "
                  << row[3].text << " +- " << row[4].text << " (predicted " << row[5].text
                  << ", corrected " << row[6].text << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"near-critical SIR epidemics on configuration-model graphs"};
    app.require_subcommand(1);

    CliOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", opts.seed, "override rng.seed");
        sub->add_option("--reps", opts.reps, "override experiment.reps");
        sub->add_option("--out", opts.out_path, "machine-readable output file");
        sub->add_option("--format", opts.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", opts.threads, "worker threads, 0 = auto");
    };

    CLI::App* predict =
        app.add_subcommand("predict", "closed-form criticality and final-size report");
    CLI::App* validate = app.add_subcommand("validate", "assumption diagnostics");
    CLI::App* simulate = app.add_subcommand("simulate", "replicate an epidemic engine");
    CLI::App* sweep = app.add_subcommand("sellke-sweep", "seed sweep against fixed thresholds");
    CLI::App* trajectories =
        app.add_subcommand("trajectories", "time-changed trajectory against its limit curves");
    CLI::App* giant = app.add_subcommand("giant", "giant component law on fresh multigraphs");
    CLI::App* survival =
        app.add_subcommand("survival-curve", "small-outbreak probability against targets");
    for (CLI::App* sub : {predict, validate, simulate, sweep, trajectories, giant, survival})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const json doc = load_config(opts.config_path);
        if (predict->parsed()) return run_predict(doc, opts);
        if (validate->parsed()) return run_validate(doc, opts);
        if (simulate->parsed()) return run_simulate(doc, opts);
        if (sweep->parsed()) return run_sellke_sweep(doc, opts);
        if (trajectories->parsed()) return run_trajectories(doc, opts);
        if (giant->parsed()) return run_giant(doc, opts);
        if (survival->parsed()) return run_survival(doc, opts);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const nearsir::Error& e) {
        std::cerr << errc_name(e.code()) << ": " << e.what() << "\n";
        if (e.code() == Errc::BadConfig) return 2;
        if (e.code() == Errc::QuadratureFailure) return 1;
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
