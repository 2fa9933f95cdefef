#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nearsir/errors.hpp"
#include "nearsir/harness.hpp"
#include "nearsir/rng.hpp"
#include "nearsir/sir_dynamics.hpp"

using namespace nearsir;

namespace {

ExperimentSpec cubic_spec() {
    ExperimentSpec spec;
    spec.model = ModelKind::DegreeCounts;
    spec.degree_counts = {{3, 1000}};
    spec.rho = 0.5;
    spec.reps = 64;
    spec.master_seed = 9001;
    return spec;
}

double cell_number(const Table& table, std::size_t row, const std::string& column) {
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        if (table.columns[c] == column) return std::stod(table.rows[row][c].text);
    REQUIRE_MESSAGE(false, "column not found: ", column);
    return 0;
}

} // namespace

TEST_CASE("resolution spreads uniform seeds in expectation") {
    ExperimentSpec spec;
    spec.degree_counts = {{1, 400}, {2, 300}, {3, 200}, {4, 100}};
    spec.n_infective = 10;
    spec.n_recovered = 5;
    spec.rho = 0.2;
    auto reference = resolve_reference_config(spec);

    CHECK(reference.beta == spec.beta);
    CHECK(reference.rho == spec.rho);
    CHECK(reference.count_vertices() == 1000);
    CHECK(reference.count_infective() == 10);
    CHECK(reference.count_recovered() == 5);

    for (int k = 1; k <= 4; ++k) {
        const auto total = static_cast<double>(spec.degree_counts.at(k));
        const double exact_i = 10.0 * total / 1000.0;
        const double exact_r = 5.0 * total / 1000.0;
        CHECK(static_cast<double>(reference.n_i[k]) >= std::floor(exact_i));
        CHECK(static_cast<double>(reference.n_i[k]) <= std::ceil(exact_i));
        CHECK(static_cast<double>(reference.n_r[k]) >= std::floor(exact_r));
        CHECK(static_cast<double>(reference.n_r[k]) <= std::ceil(exact_r));
        CHECK(reference.n_s[k] + reference.n_i[k] + reference.n_r[k] ==
              spec.degree_counts.at(k));
    }
}

TEST_CASE("seed placement variants") {
    SUBCASE("stack on the highest degrees") {
        ExperimentSpec spec;
        spec.degree_counts = {{1, 10}, {5, 2}};
        spec.n_infective = 3;
        spec.placement = SeedPlacement::SingleHighDegree;
        spec.rho = 0.0;
        auto reference = resolve_reference_config(spec);
        CHECK(reference.n_i[5] == 2);
        CHECK(reference.n_i[1] == 1);
        CHECK(reference.n_s[5] == 0);
        CHECK(reference.n_s[1] == 9);
    }
    SUBCASE("exact per-degree placement") {
        ExperimentSpec spec;
        spec.degree_counts = {{2, 50}, {3, 50}};
        spec.placement = SeedPlacement::ByDegreeSpec;
        spec.infective_by_degree = {{2, 3}};
        spec.recovered_by_degree = {{3, 2}};
        auto reference = resolve_reference_config(spec);
        CHECK(reference.n_i[2] == 3);
        CHECK(reference.n_i[3] == 0);
        CHECK(reference.n_r[3] == 2);
        CHECK(reference.count_infective() == 3);
        CHECK(reference.count_recovered() == 2);
    }
    SUBCASE("per-degree placement beyond the class size") {
        ExperimentSpec spec;
        spec.degree_counts = {{2, 5}};
        spec.placement = SeedPlacement::ByDegreeSpec;
        spec.infective_by_degree = {{2, 9}};
        CHECK_THROWS_AS(resolve_reference_config(spec), Error);
    }
    SUBCASE("per-degree placement on a missing class") {
        ExperimentSpec spec;
        spec.degree_counts = {{2, 5}};
        spec.placement = SeedPlacement::ByDegreeSpec;
        spec.infective_by_degree = {{9, 1}};
        CHECK_THROWS_AS(resolve_reference_config(spec), Error);
    }
}

TEST_CASE("experiment results do not depend on the thread count") {
    auto spec = cubic_spec();
    spec.threads = 1;
    auto serial = run_experiment(spec);
    spec.threads = 4;
    auto parallel = run_experiment(spec);

    REQUIRE(serial.outcomes.size() == parallel.outcomes.size());
    for (std::size_t i = 0; i < serial.outcomes.size(); ++i) {
        CHECK(serial.outcomes[i].final_size == parallel.outcomes[i].final_size);
        CHECK(serial.outcomes[i].duration == parallel.outcomes[i].duration);
    }
    CHECK(serial.large_count == parallel.large_count);
    CHECK(serial.p_large_hat.value == parallel.p_large_hat.value);
    CHECK(serial.degree_profile_tv == parallel.degree_profile_tv);

    ExperimentSpec one = cubic_spec(), four = cubic_spec();
    one.threads = 1;
    four.threads = 4;
    CHECK(spec_json(one) == spec_json(four));
}

TEST_CASE("aggregates recompute from the raw outcomes") {
    auto spec = cubic_spec();
    auto result = run_experiment(spec);
    REQUIRE(result.replica_errors.empty());
    REQUIRE(result.outcomes.size() == 64);

    const auto& resolved = result.resolved;
    CHECK(resolved.classification_threshold ==
          doctest::Approx(spec.classification_epsilon * resolved.prediction.predicted_size)
              .epsilon(1e-12));

    const double n_s = static_cast<double>(resolved.reference.count_susceptible());
    const double x_i0 = static_cast<double>(resolved.reference.x_i0());
    const double denom = resolved.criticality.regime == Regime::NuInfinite
                             ? std::sqrt(n_s * x_i0)
                             : n_s * resolved.criticality.alpha_bar;

    std::int64_t large = 0;
    double ratio_sum = 0;
    for (const auto& out : result.outcomes) {
        if (static_cast<double>(out.final_size) > resolved.classification_threshold) {
            ++large;
            ratio_sum += static_cast<double>(out.final_size) / denom;
        }
    }
    CHECK(result.large_count == large);
    const double p = static_cast<double>(large) / 64.0;
    CHECK(result.p_large_hat.value == doctest::Approx(p).epsilon(1e-15));
    CHECK(result.p_large_hat.std_error ==
          doctest::Approx(std::sqrt(p * (1.0 - p) / 64.0)).epsilon(1e-12));
    if (large > 0) {
        CHECK(result.large_mean_ratio.value ==
              doctest::Approx(ratio_sum / static_cast<double>(large)).epsilon(1e-12));
    }
}

TEST_CASE("an unreachable classification threshold leaves the ratios empty") {
    // far from critical the predicted size overshoots the population, so a
    // high epsilon parks the threshold above any possible outbreak
    auto spec = cubic_spec();
    spec.rho = 0.01;
    spec.reps = 16;
    spec.classification_epsilon = 0.9;
    auto result = run_experiment(spec);
    CHECK(result.large_count == 0);
    CHECK(result.p_large_hat.value == 0.0);
    CHECK(std::isnan(result.large_mean_ratio.value));
    CHECK(std::isnan(result.degree_profile_tv));

    CHECK_THROWS_AS(degree_profile_check(result.outcomes, result.resolved.reference,
                                         result.resolved.classification_threshold),
                    Error);
}

TEST_CASE("poisson histograms are drawn once per experiment") {
    ExperimentSpec spec;
    spec.model = ModelKind::Poisson;
    spec.n = 2000;
    spec.poisson_mean = 2.5;
    spec.reps = 4;
    spec.master_seed = 31337;

    auto a = resolve_experiment(spec);
    auto b = resolve_experiment(spec);
    CHECK(a.degree_histogram == b.degree_histogram);

    std::int64_t total = 0;
    for (auto c : a.degree_histogram) total += c;
    CHECK(total == 2000);

    spec.master_seed = 31338;
    auto c = resolve_experiment(spec);
    CHECK(a.degree_histogram != c.degree_histogram);

    auto run = run_experiment(spec);
    CHECK(run.outcomes.size() == 4);
    CHECK(run.replica_errors.empty());
}

TEST_CASE("binomial model constraints") {
    ExperimentSpec spec;
    spec.model = ModelKind::Gnp;
    spec.n = 500;
    spec.gnp_p = 3.0 / 499.0;
    spec.engine = EngineKind::Gillespie;
    spec.reps = 8;

    auto resolved = resolve_experiment(spec);
    std::int64_t total = 0;
    for (auto c : resolved.degree_histogram) total += c;
    CHECK(total == 500);

    auto result = run_experiment(spec);
    CHECK(result.outcomes.size() == 8);
    CHECK(result.replica_errors.empty());

    spec.engine = EngineKind::PairingDynamic;
    CHECK_THROWS_AS(run_experiment(spec), Error);
    spec.engine = EngineKind::Gillespie;
    spec.placement = SeedPlacement::ByDegreeSpec;
    spec.infective_by_degree = {{3, 1}};
    CHECK_THROWS_AS(run_experiment(spec), Error);
}

TEST_CASE("pinned graph mode") {
    auto spec = cubic_spec();
    spec.engine = EngineKind::Gillespie;
    spec.fresh_graph_per_replica = false;
    spec.reps = 8;
    auto a = run_experiment(spec);
    auto b = run_experiment(spec);
    REQUIRE(a.outcomes.size() == 8);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(a.outcomes[i].final_size == b.outcomes[i].final_size);

    spec.engine = EngineKind::PairingDynamic;
    CHECK_THROWS_AS(run_experiment(spec), Error);
    spec.engine = EngineKind::TimeChanged;
    CHECK_THROWS_AS(run_experiment(spec), Error);
}

TEST_CASE("every engine accepts the same experiment spec") {
    for (auto engine : {EngineKind::Gillespie, EngineKind::PairingDynamic,
                        EngineKind::TimeChanged, EngineKind::Sellke}) {
        auto spec = cubic_spec();
        spec.engine = engine;
        spec.reps = 8;
        auto result = run_experiment(spec);
        CHECK(result.outcomes.size() == 8);
        CHECK(result.replica_errors.empty());
        for (const auto& out : result.outcomes) {
            CHECK(out.final_size >= 0);
            CHECK(out.final_size <= 999);
        }
    }
}

TEST_CASE("survival curve rows") {
    ExperimentSpec spec;
    spec.degree_counts = {{1, 600}, {4, 400}};
    spec.reps = 200;
    spec.master_seed = 5150;

    // alpha * mean degree = 0.8809 for this population, so one and two
    // seeds land on these targets almost exactly
    auto table = survival_curve(spec, {0.88, 1.76});
    REQUIRE(table.rows.size() == 2);
    const std::vector<std::string> expect{"target",       "seeds",        "x_i0",
                                          "p_small_hat",  "p_small_stderr", "p_small_pred",
                                          "p_small_corrected"};
    CHECK(table.columns == expect);

    for (std::size_t r = 0; r < 2; ++r) {
        const double hat = cell_number(table, r, "p_small_hat");
        CHECK(hat >= 0.0);
        CHECK(hat <= 1.0);
        CHECK(cell_number(table, r, "seeds") >= 1.0);
        const double pred = cell_number(table, r, "p_small_pred");
        CHECK(pred > 0.0);
        CHECK(pred < 1.0);
    }
    CHECK(cell_number(table, 1, "seeds") >= cell_number(table, 0, "seeds"));
    CHECK(cell_number(table, 1, "p_small_pred") < cell_number(table, 0, "p_small_pred"));

    CHECK_THROWS_AS(survival_curve(spec, {1e6}), Error);
}

TEST_CASE("threshold scatter sweeps each realisation once per seed count") {
    ExperimentSpec spec;
    spec.degree_counts = {{1, 20}, {2, 30}, {4, 50}};
    spec.engine = EngineKind::Sellke;
    spec.master_seed = 17;

    auto table = figure_fs_scatter(spec, 2, {1, 50, 100});
    CHECK(table.columns == std::vector<std::string>{"realisation_id", "m", "X_I0", "Z"});
    REQUIRE(table.rows.size() == 6);

    for (int real = 0; real < 2; ++real) {
        double prev_z = 0, prev_x = 0;
        for (int j = 0; j < 3; ++j) {
            const std::size_t r = static_cast<std::size_t>(real * 3 + j);
            CHECK(cell_number(table, r, "realisation_id") == real);
            const double z = cell_number(table, r, "Z");
            const double x = cell_number(table, r, "X_I0");
            CHECK(z >= prev_z);
            CHECK(x >= prev_x);
            prev_z = z;
            prev_x = x;
        }
        CHECK(cell_number(table, static_cast<std::size_t>(real * 3 + 2), "Z") == 100.0);
    }

    spec.engine = EngineKind::Gillespie;
    CHECK_THROWS_AS(figure_fs_scatter(spec, 2, {1, 100}), Error);
}

TEST_CASE("metadata carries the reproducibility context") {
    auto resolved = resolve_experiment(cubic_spec());
    auto meta = experiment_metadata(resolved);
    std::map<std::string, std::string> keys;
    for (const auto& [k, v] : meta) keys[k] = v.text;
    CHECK(keys.count("spec"));
    CHECK(keys.count("master_seed"));
    CHECK(keys.count("engine"));
    CHECK(keys.count("r0"));
    CHECK(keys.count("alpha"));
    CHECK(keys.count("predicted_size"));
    CHECK(keys.count("classification_threshold"));
    CHECK(keys["master_seed"] == "9001");
    CHECK(keys["engine"] == std::string(engine_name(EngineKind::PairingDynamic)));
    CHECK(keys["spec"].find("\"model\"") != std::string::npos);
}

TEST_CASE("large-replica mean trajectory tracks the quadratic curve deep in the window") {
    // Well above threshold (n alpha^3 near 900) the mean over large replicas
    // concentrates, so the time-changed curve, the closed-form curve and the
    // stop time can all be pinned tightly.
    ExperimentSpec spec;
    spec.model = ModelKind::Poisson;
    spec.n = 100000;
    spec.poisson_mean = 2.1;
    spec.n_infective = 20;
    spec.engine = EngineKind::TimeChanged;
    spec.master_seed = 9014;
    const ResolvedExperiment rx = resolve_experiment(spec);
    const double abar = rx.criticality.alpha_bar;
    const double xi = rx.criticality.xi;
    REQUIRE(rx.criticality.alpha > 0.15);

    const int points = 21;
    std::vector<double> t_grid(points), tau(points);
    for (int j = 0; j < points; ++j) {
        t_grid[j] = 2.0 * xi * j / (points - 1);
        tau[j] = abar * t_grid[j];
    }

    std::vector<double> mean_xi(points, 0.0);
    double mean_stop = 0.0;
    int accepted = 0;
    for (std::uint64_t attempt = 0; attempt < 200 && accepted < 20; ++attempt) {
        PhiloxRng rng(spec.master_seed, stream_id(StreamChannel::Replica, attempt));
        const auto [outcome, record] = run_time_changed(rx.reference, rng, tau);
        if (static_cast<double>(outcome.final_size) <= rx.classification_threshold) continue;
        ++accepted;
        mean_stop += outcome.duration;
        for (int j = 0; j < points; ++j) mean_xi[j] += static_cast<double>(record.x_i[j]);
    }
    REQUIRE(accepted == 20);
    mean_stop /= accepted;

    const double scale = static_cast<double>(rx.reference.count_vertices()) * abar * abar;
    const DeterministicTrajectories det = deterministic_trajectories(rx.reference, tau);
    double sup_curve = 0.0, sup_quad = 0.0;
    for (int j = 0; j < points; ++j) {
        const double xbar = mean_xi[j] / static_cast<double>(accepted);
        sup_curve = std::max(sup_curve, std::abs(xbar - std::max(det.f_i[j], 0.0)) / scale);
        sup_quad = std::max(
            sup_quad, std::abs(xbar / scale - std::max(rx.criticality.f(t_grid[j]), 0.0)));
    }
    CHECK(sup_curve < 0.05);
    CHECK(sup_quad < 0.05);
    CHECK(std::abs(mean_stop / abar / xi - 1.0) < 0.10);
}
