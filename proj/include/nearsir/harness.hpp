#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nearsir/degree_model.hpp"
#include "nearsir/report_io.hpp"
#include "nearsir/sir_dynamics.hpp"

namespace nearsir {

enum class EngineKind { Gillespie, PairingDynamic, TimeChanged, Sellke };

const char* engine_name(EngineKind e);

enum class ModelKind { DegreeCounts, Poisson, Gnp };

//! Where the initial infectives (and recovereds) sit. UniformRandom samples
//! vertices without replacement; ByDegreeSpec pins exact per-degree counts;
//! SingleHighDegree stacks the seeds on the highest-degree vertices so one
//! vertex can carry essentially all initial infective half-edges.
enum class SeedPlacement { UniformRandom, ByDegreeSpec, SingleHighDegree };

struct ExperimentSpec {
    ModelKind model = ModelKind::DegreeCounts;
    std::map<int, std::int64_t> degree_counts; // all vertices, by degree
    std::int64_t n = 0;                        // Poisson and Gnp models
    double poisson_mean = 0.0;
    double gnp_p = 0.0;

    std::int64_t n_infective = 1;
    std::int64_t n_recovered = 0;
    SeedPlacement placement = SeedPlacement::UniformRandom;
    std::map<int, std::int64_t> infective_by_degree; // ByDegreeSpec only
    std::map<int, std::int64_t> recovered_by_degree;

    double beta = 1.0;
    double rho = 1.0;

    EngineKind engine = EngineKind::PairingDynamic;
    int reps = 1;
    double classification_epsilon = 0.5;
    std::uint64_t master_seed = 0;
    int threads = 0; // 0 = hardware concurrency; results identical either way
    bool fresh_graph_per_replica = true;
};

//! The spec with its model made concrete: degree histogram fixed (sampled
//! once for Poisson), seeds allocated to degree classes in expectation, and
//! the closed-form predictions evaluated on that reference configuration.
struct ResolvedExperiment {
    ExperimentSpec spec;
    std::vector<std::int64_t> degree_histogram; // all vertices, by degree
    DegreeConfiguration reference;              // expected state split
    CriticalityReport criticality;
    FinalSizePrediction prediction;
    double classification_threshold = 0.0; // epsilon * predicted_size
};

ResolvedExperiment resolve_experiment(const ExperimentSpec& spec);

//! Degree histogram plus state split only, no criticality math, so the
//! assumption diagnostics can run on configurations the predictors reject.
DegreeConfiguration resolve_reference_config(const ExperimentSpec& spec);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct AggregateResult {
    ResolvedExperiment resolved;
    std::vector<EpidemicOutcome> outcomes;       // replica order
    std::map<int, std::string> replica_errors;   // replica -> what went wrong
    std::int64_t large_count = 0;
    Estimate p_large_hat;      // stderr = sqrt(p(1-p)/reps)
    Estimate large_mean_ratio; // Z/(n_S*alpha_bar), or Z/sqrt(n_S*X_I0) when
                               // the seed mass dominates (NuInfinite)
    double degree_profile_tv = 0.0; // nan when no large outbreak observed
};

AggregateResult run_experiment(const ExperimentSpec& spec);

//! TV distance between the pooled degree profile of large outbreaks and the
//! size-biased degree law of the reference configuration.
double degree_profile_check(const std::vector<EpidemicOutcome>& outcomes,
                            const DegreeConfiguration& reference,
                            double classification_threshold);

//! One row per target: seed count chosen so alpha * X_I0 lands on the
//! target, empirical small-outbreak fraction, and both closed-form values.
//! Columns: target, seeds, x_i0, p_small_hat, p_small_stderr, p_small_pred,
//! p_small_corrected.
Table survival_curve(const ExperimentSpec& spec, const std::vector<double>& x_values);

//! Threshold-construction scatter: one seed-threshold draw and one graph per
//! realisation, swept over ascending seed counts. Columns realisation_id, m,
//! X_I0, Z; Z counts every eventually-infected vertex, seeds included.
Table figure_fs_scatter(const ExperimentSpec& spec, int realisations,
                        const std::vector<std::int64_t>& m_grid);

//! Metadata block shared by every report: the resolved spec echoed as JSON
//! plus the master seed.
Metadata experiment_metadata(const ResolvedExperiment& resolved);

//! The resolved spec as a JSON document (also used by experiment_metadata).
std::string spec_json(const ExperimentSpec& spec);

} // namespace nearsir
