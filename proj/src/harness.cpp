#include "nearsir/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "json.hpp"

#include "nearsir/errors.hpp"
#include "nearsir/graph_gen.hpp"
#include "nearsir/rng.hpp"
#include "nearsir/sellke.hpp"

namespace nearsir {

const char* engine_name(EngineKind e) {
    switch (e) {
        case EngineKind::Gillespie: return "gillespie";
        case EngineKind::PairingDynamic: return "pairing";
        case EngineKind::TimeChanged: return "time_changed";
        case EngineKind::Sellke: return "sellke";
    }
    return "unknown";
}

namespace {

const char* model_kind_name(ModelKind m) {
    switch (m) {
        case ModelKind::DegreeCounts: return "degrees";
        case ModelKind::Poisson: return "poisson";
        case ModelKind::Gnp: return "gnp";
    }
    return "unknown";
}

const char* placement_name(SeedPlacement p) {
    switch (p) {
        case SeedPlacement::UniformRandom: return "uniform";
        case SeedPlacement::ByDegreeSpec: return "by_degree";
        case SeedPlacement::SingleHighDegree: return "single_high_degree";
    }
    return "unknown";
}

//! Integer split of `total` proportional to class sizes, never exceeding
//! them. Floor quotas first, then +1 by descending fractional remainder.
std::vector<std::int64_t> proportional_split(std::int64_t total,
                                             const std::vector<std::int64_t>& sizes) {
    const std::int64_t room = std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0});
    if (total > room) throw Error(Errc::BadConfig, "more seeds than vertices");
    std::vector<std::int64_t> alloc(sizes.size(), 0);
    if (total == 0 || room == 0) return alloc;

    struct Frac {
        __int128 remainder;
        std::size_t k;
    };
    std::vector<Frac> fracs;
    std::int64_t assigned = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] == 0) continue;
        const __int128 product = static_cast<__int128>(total) * sizes[k];
        alloc[k] = static_cast<std::int64_t>(product / room);
        assigned += alloc[k];
        fracs.push_back({product % room, k});
    }
    std::sort(fracs.begin(), fracs.end(), [](const Frac& a, const Frac& b) {
        if (a.remainder != b.remainder) return a.remainder > b.remainder;
        return a.k < b.k;
    });
    std::int64_t leftover = total - assigned;
    for (const auto& f : fracs) {
        if (leftover == 0) break;
        if (alloc[f.k] < sizes[f.k]) {
            ++alloc[f.k];
            --leftover;
        }
    }
    for (std::size_t k = 0; k < sizes.size() && leftover > 0; ++k) {
        const std::int64_t take = std::min(leftover, sizes[k] - alloc[k]);
        alloc[k] += take;
        leftover -= take;
    }
    return alloc;
}

//! Expected degree histogram of G(n,p): n vertices split across the Poisson
//! profile with mean (n-1)p, largest-remainder rounded so counts sum to n.
std::vector<std::int64_t> gnp_reference_histogram(std::int64_t n, double p) {
    const double mean = static_cast<double>(n - 1) * p;
    std::vector<double> weight;
    double pmf = std::exp(-mean); // k = 0
    double cumulative = 0.0;
    for (int k = 0; k < 256; ++k) {
        weight.push_back(pmf);
        cumulative += pmf;
        if (k > mean && 1.0 - cumulative < 1e-12) break;
        pmf *= mean / static_cast<double>(k + 1);
    }
    std::vector<std::int64_t> counts(weight.size(), 0);
    struct Frac {
        double remainder;
        std::size_t k;
    };
    std::vector<Frac> fracs;
    std::int64_t assigned = 0;
    for (std::size_t k = 0; k < weight.size(); ++k) {
        const double quota = static_cast<double>(n) * weight[k] / cumulative;
        counts[k] = static_cast<std::int64_t>(std::floor(quota));
        assigned += counts[k];
        fracs.push_back({quota - std::floor(quota), k});
    }
    std::sort(fracs.begin(), fracs.end(), [](const Frac& a, const Frac& b) {
        if (a.remainder != b.remainder) return a.remainder > b.remainder;
        return a.k < b.k;
    });
    for (std::int64_t i = 0; i < n - assigned; ++i) counts[fracs[static_cast<std::size_t>(i)].k]++;
    while (!counts.empty() && counts.back() == 0) counts.pop_back();
    return counts;
}

void fill_descending(std::vector<std::int64_t>& target, std::int64_t count,
                     const std::vector<std::int64_t>& room) {
    for (std::size_t k = room.size(); k-- > 0 && count > 0;) {
        const std::int64_t take = std::min(count, room[k] - target[k]);
        target[k] += take;
        count -= take;
    }
}

DegreeConfiguration make_reference(const ExperimentSpec& spec,
                                   const std::vector<std::int64_t>& histogram) {
    DegreeConfiguration config;
    config.beta = spec.beta;
    config.rho = spec.rho;
    config.n_s = histogram;
    config.n_i.assign(histogram.size(), 0);
    config.n_r.assign(histogram.size(), 0);

    switch (spec.placement) {
        case SeedPlacement::UniformRandom: {
            config.n_i = proportional_split(spec.n_infective, histogram);
            std::vector<std::int64_t> room(histogram.size());
            for (std::size_t k = 0; k < histogram.size(); ++k) room[k] = histogram[k] - config.n_i[k];
            config.n_r = proportional_split(spec.n_recovered, room);
            break;
        }
        case SeedPlacement::ByDegreeSpec: {
            for (const auto& [degree, count] : spec.infective_by_degree) {
                if (degree < 0 || count < 0)
                    throw Error(Errc::BadConfig, "negative degree or count in seed spec");
                if (degree >= static_cast<int>(histogram.size()) ||
                    count > histogram[static_cast<std::size_t>(degree)])
                    throw Error(Errc::BadConfig, "seed spec wants more degree-" +
                                                     std::to_string(degree) +
                                                     " vertices than the model has");
                config.n_i[static_cast<std::size_t>(degree)] = count;
            }
            for (const auto& [degree, count] : spec.recovered_by_degree) {
                if (degree < 0 || count < 0)
                    throw Error(Errc::BadConfig, "negative degree or count in seed spec");
                if (degree >= static_cast<int>(histogram.size()) ||
                    config.n_i[static_cast<std::size_t>(degree)] + count >
                        histogram[static_cast<std::size_t>(degree)])
                    throw Error(Errc::BadConfig, "state spec wants more degree-" +
                                                     std::to_string(degree) +
                                                     " vertices than the model has");
                config.n_r[static_cast<std::size_t>(degree)] = count;
            }
            break;
        }
        case SeedPlacement::SingleHighDegree: {
            fill_descending(config.n_i, spec.n_infective, histogram);
            std::vector<std::int64_t> used(histogram.size());
            for (std::size_t k = 0; k < histogram.size(); ++k) used[k] = config.n_i[k];
            std::vector<std::int64_t> room(histogram.size());
            for (std::size_t k = 0; k < histogram.size(); ++k) room[k] = histogram[k] - used[k];
            std::vector<std::int64_t> r_alloc(histogram.size(), 0);
            fill_descending(r_alloc, spec.n_recovered, room);
            config.n_r = r_alloc;
            break;
        }
    }
    for (std::size_t k = 0; k < histogram.size(); ++k)
        config.n_s[k] = histogram[k] - config.n_i[k] - config.n_r[k];
    return config;
}

std::vector<int> expand_histogram(const std::vector<std::int64_t>& histogram) {
    std::vector<int> degrees;
    std::int64_t n = std::accumulate(histogram.begin(), histogram.end(), std::int64_t{0});
    degrees.reserve(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < histogram.size(); ++k)
        degrees.insert(degrees.end(), static_cast<std::size_t>(histogram[k]), static_cast<int>(k));
    return degrees;
}

//! Random split of the histogram into S/I/R for one replica: seeds drawn
//! vertex by vertex, uniformly over the not-yet-seeded.
DegreeConfiguration sample_state_split(const ResolvedExperiment& rx, PhiloxRng& rng) {
    if (rx.spec.placement != SeedPlacement::UniformRandom) return rx.reference;

    DegreeConfiguration config;
    config.beta = rx.spec.beta;
    config.rho = rx.spec.rho;
    config.n_s = rx.degree_histogram;
    config.n_i.assign(config.n_s.size(), 0);
    config.n_r.assign(config.n_s.size(), 0);

    std::int64_t remaining =
        std::accumulate(config.n_s.begin(), config.n_s.end(), std::int64_t{0});
    auto draw_one = [&](std::vector<std::int64_t>& into) {
        std::uint64_t u = rng.below(static_cast<std::uint64_t>(remaining));
        for (std::size_t k = 0; k < config.n_s.size(); ++k) {
            const std::uint64_t avail = static_cast<std::uint64_t>(config.n_s[k]);
            if (u < avail) {
                --config.n_s[k];
                ++into[k];
                --remaining;
                return;
            }
            u -= avail;
        }
        throw Error(Errc::BadConfig, "seed draw walked past every degree class");
    };
    for (std::int64_t i = 0; i < rx.spec.n_infective; ++i) draw_one(config.n_i);
    for (std::int64_t i = 0; i < rx.spec.n_recovered; ++i) draw_one(config.n_r);
    return config;
}

Multigraph build_graph(const ResolvedExperiment& rx, PhiloxRng& rng) {
    if (rx.spec.model == ModelKind::Gnp)
        return sample_gnp(rx.spec.n, rx.spec.gnp_p, rng);
    return sample_multigraph(expand_histogram(rx.degree_histogram), rng);
}

std::vector<VertexState> build_states(const ResolvedExperiment& rx,
                                      const std::vector<int>& degrees, PhiloxRng& rng) {
    const auto& spec = rx.spec;
    switch (spec.placement) {
        case SeedPlacement::UniformRandom:
            return assign_initial_states(degrees, spec.n_infective, spec.n_recovered,
                                         SeedMode::UniformRandom, nullptr, rng);
        case SeedPlacement::ByDegreeSpec:
            return assign_initial_states(degrees, spec.n_infective, spec.n_recovered,
                                         SeedMode::ByDegreeSpec, &rx.reference, rng);
        case SeedPlacement::SingleHighDegree: {
            std::vector<std::int32_t> order(degrees.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
                return degrees[static_cast<std::size_t>(a)] > degrees[static_cast<std::size_t>(b)];
            });
            std::vector<VertexState> states(degrees.size(), VertexState::Susceptible);
            std::int64_t at = 0;
            for (std::int64_t i = 0; i < spec.n_infective; ++i)
                states[static_cast<std::size_t>(order[static_cast<std::size_t>(at++)])] =
                    VertexState::Infective;
            for (std::int64_t i = 0; i < spec.n_recovered; ++i)
                states[static_cast<std::size_t>(order[static_cast<std::size_t>(at++)])] =
                    VertexState::Recovered;
            return states;
        }
    }
    throw Error(Errc::BadConfig, "unknown seed placement");
}

EpidemicOutcome run_graph_replica(const ResolvedExperiment& rx, const Multigraph& graph,
                                  PhiloxRng& rng) {
    const std::vector<int> degrees = degrees_of(graph);
    const std::vector<VertexState> states = build_states(rx, degrees, rng);
    if (rx.spec.engine == EngineKind::Gillespie)
        return run_gillespie(graph, states, rx.spec.beta, rx.spec.rho, rng);

    // Threshold construction with the same seed set.
    std::vector<std::int32_t> seeds;
    std::vector<std::int32_t> immune;
    for (std::size_t v = 0; v < states.size(); ++v) {
        if (states[v] == VertexState::Infective) seeds.push_back(static_cast<std::int32_t>(v));
        if (states[v] == VertexState::Recovered) immune.push_back(static_cast<std::int32_t>(v));
    }
    const SellkeDraw draw = sample_sellke_draw(graph.vertex_count(), rx.spec.rho, rng);
    const SellkeResult res = sellke_final_size_seeded(graph, draw, seeds, immune, rx.spec.beta);
    EpidemicOutcome out;
    out.final_size = res.new_infections;
    for (std::int64_t v = 0; v < graph.vertex_count(); ++v) {
        if (res.infected[static_cast<std::size_t>(v)] &&
            states[static_cast<std::size_t>(v)] == VertexState::Susceptible)
            out.final_size_by_degree[graph.degree(v)] += 1;
    }
    out.duration = 0.0;
    return out;
}

EpidemicOutcome run_replica(const ResolvedExperiment& rx, const Multigraph* pinned,
                            std::uint64_t stream) {
    PhiloxRng rng(rx.spec.master_seed, stream);
    switch (rx.spec.engine) {
        case EngineKind::PairingDynamic: {
            const DegreeConfiguration config = sample_state_split(rx, rng);
            return run_pairing_dynamic(config, rng);
        }
        case EngineKind::TimeChanged: {
            const DegreeConfiguration config = sample_state_split(rx, rng);
            return run_time_changed(config, rng, {}).first;
        }
        case EngineKind::Gillespie:
        case EngineKind::Sellke: {
            if (pinned) return run_graph_replica(rx, *pinned, rng);
            const Multigraph graph = build_graph(rx, rng);
            return run_graph_replica(rx, graph, rng);
        }
    }
    throw Error(Errc::BadConfig, "unknown engine");
}

int resolve_thread_count(int requested, int reps) {
    int threads = requested;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    return std::min(threads, reps);
}

struct ReplicaBatch {
    std::vector<EpidemicOutcome> outcomes;
    std::map<int, std::string> errors;
};

ReplicaBatch run_replicas(const ResolvedExperiment& rx, std::uint64_t stream_offset) {
    const int reps = rx.spec.reps;
    ReplicaBatch batch;
    batch.outcomes.resize(static_cast<std::size_t>(reps));

    const Multigraph* pinned = nullptr;
    Multigraph pinned_storage(0, {});
    if (!rx.spec.fresh_graph_per_replica) {
        if (rx.spec.engine == EngineKind::PairingDynamic ||
            rx.spec.engine == EngineKind::TimeChanged)
            throw Error(Errc::BadConfig,
                        "the pairing engines resample the matching by construction; "
                        "pinning a graph needs gillespie or sellke");
        PhiloxRng graph_rng(rx.spec.master_seed,
                            stream_id(StreamChannel::Experiment, 1));
        pinned_storage = build_graph(rx, graph_rng);
        pinned = &pinned_storage;
    }

    const int threads = resolve_thread_count(rx.spec.threads, reps);
    std::atomic<int> next{0};
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= reps) return;
            const std::uint64_t stream =
                stream_id(StreamChannel::Replica, stream_offset + static_cast<std::uint64_t>(r));
            try {
                batch.outcomes[static_cast<std::size_t>(r)] = run_replica(rx, pinned, stream);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                batch.errors[r] = e.what();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return batch;
}

AggregateResult aggregate(ResolvedExperiment rx, ReplicaBatch batch) {
    AggregateResult result;
    result.resolved = std::move(rx);
    result.outcomes = std::move(batch.outcomes);
    result.replica_errors = std::move(batch.errors);

    const auto& resolved = result.resolved;
    const double n_s = static_cast<double>(resolved.reference.count_susceptible());
    const double x_i0 = static_cast<double>(resolved.reference.x_i0());
    const bool seed_mass_dominates = resolved.criticality.regime == Regime::NuInfinite;
    const double denom = seed_mass_dominates
                             ? std::sqrt(n_s * x_i0)
                             : n_s * resolved.criticality.alpha_bar;

    std::vector<double> ratios;
    std::int64_t valid = 0;
    for (std::size_t r = 0; r < result.outcomes.size(); ++r) {
        if (result.replica_errors.count(static_cast<int>(r))) continue;
        ++valid;
        const auto& out = result.outcomes[r];
        if (static_cast<double>(out.final_size) > resolved.classification_threshold) {
            ++result.large_count;
            ratios.push_back(static_cast<double>(out.final_size) / denom);
        }
    }
    const double reps = static_cast<double>(resolved.spec.reps);
    const double p = valid > 0 ? static_cast<double>(result.large_count) / static_cast<double>(valid)
                               : 0.0;
    result.p_large_hat = {p, std::sqrt(p * (1.0 - p) / reps)};

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (ratios.empty()) {
        result.large_mean_ratio = {nan, nan};
        result.degree_profile_tv = nan;
    } else {
        double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) /
                      static_cast<double>(ratios.size());
        double ss = 0.0;
        for (double v : ratios) ss += (v - mean) * (v - mean);
        const double se = ratios.size() > 1
                              ? std::sqrt(ss / static_cast<double>(ratios.size() - 1) /
                                          static_cast<double>(ratios.size()))
                              : nan;
        result.large_mean_ratio = {mean, se};
        result.degree_profile_tv = degree_profile_check(result.outcomes, resolved.reference,
                                                        resolved.classification_threshold);
    }
    return result;
}

AggregateResult run_experiment_offset(const ExperimentSpec& spec, std::uint64_t stream_offset) {
    ResolvedExperiment rx = resolve_experiment(spec);
    ReplicaBatch batch = run_replicas(rx, stream_offset);
    return aggregate(std::move(rx), std::move(batch));
}

} // namespace

namespace {

struct ModelResolution {
    ExperimentSpec spec; // by-degree totals folded into n_infective / n_recovered
    std::vector<std::int64_t> histogram;
};

ModelResolution resolve_model(const ExperimentSpec& spec) {
    if (spec.reps < 1) throw Error(Errc::BadConfig, "reps must be at least 1");
    if (!(spec.classification_epsilon > 0.0 && spec.classification_epsilon < 1.0))
        throw Error(Errc::BadConfig, "classification epsilon must sit in (0, 1)");
    if (!(spec.beta > 0.0)) throw Error(Errc::BadConfig, "beta must be positive");
    if (spec.rho < 0.0) throw Error(Errc::BadConfig, "rho must be nonnegative");
    if (spec.n_infective < 0 || spec.n_recovered < 0)
        throw Error(Errc::BadConfig, "state counts must be nonnegative");
    if (spec.threads < 0) throw Error(Errc::BadConfig, "threads must be nonnegative");

    ModelResolution m;
    m.spec = spec;

    switch (spec.model) {
        case ModelKind::DegreeCounts: {
            if (spec.degree_counts.empty())
                throw Error(Errc::BadConfig, "degree model needs at least one count");
            int max_degree = 0;
            for (const auto& [degree, count] : spec.degree_counts) {
                if (degree < 0) throw Error(Errc::BadConfig, "negative degree");
                if (count < 0) throw Error(Errc::BadConfig, "negative degree count");
                max_degree = std::max(max_degree, degree);
            }
            m.histogram.assign(static_cast<std::size_t>(max_degree) + 1, 0);
            for (const auto& [degree, count] : spec.degree_counts)
                m.histogram[static_cast<std::size_t>(degree)] = count;
            break;
        }
        case ModelKind::Poisson: {
            if (spec.n < 1) throw Error(Errc::BadConfig, "poisson model needs n >= 1");
            if (!(spec.poisson_mean > 0.0))
                throw Error(Errc::BadConfig, "poisson model needs a positive mean");
            PhiloxRng rng(spec.master_seed, stream_id(StreamChannel::Experiment, 0));
            const std::vector<int> degrees = sample_poisson_degrees(spec.n, spec.poisson_mean, rng);
            int max_degree = 0;
            for (int d : degrees) max_degree = std::max(max_degree, d);
            m.histogram.assign(static_cast<std::size_t>(max_degree) + 1, 0);
            for (int d : degrees) m.histogram[static_cast<std::size_t>(d)] += 1;
            break;
        }
        case ModelKind::Gnp: {
            if (spec.n < 2) throw Error(Errc::BadConfig, "gnp model needs n >= 2");
            if (!(spec.gnp_p > 0.0) || spec.gnp_p >= 1.0)
                throw Error(Errc::BadConfig, "gnp model needs p in (0, 1)");
            if (spec.placement == SeedPlacement::ByDegreeSpec)
                throw Error(Errc::BadConfig,
                            "per-degree seeding needs fixed degrees, not gnp");
            if (spec.engine == EngineKind::PairingDynamic ||
                spec.engine == EngineKind::TimeChanged)
                throw Error(Errc::BadConfig,
                            "the pairing engines need a degree model, not gnp");
            m.histogram = gnp_reference_histogram(spec.n, spec.gnp_p);
            break;
        }
    }

    const std::int64_t n_total =
        std::accumulate(m.histogram.begin(), m.histogram.end(), std::int64_t{0});
    std::int64_t n_infective = spec.n_infective;
    std::int64_t n_recovered = spec.n_recovered;
    if (spec.placement == SeedPlacement::ByDegreeSpec) {
        n_infective = 0;
        for (const auto& [degree, count] : spec.infective_by_degree) n_infective += count;
        n_recovered = 0;
        for (const auto& [degree, count] : spec.recovered_by_degree) n_recovered += count;
        m.spec.n_infective = n_infective;
        m.spec.n_recovered = n_recovered;
    }
    if (n_infective + n_recovered > n_total)
        throw Error(Errc::BadConfig, "more initial infectives and recovereds than vertices");
    return m;
}

} // namespace

DegreeConfiguration resolve_reference_config(const ExperimentSpec& spec) {
    ModelResolution m = resolve_model(spec);
    return make_reference(m.spec, m.histogram);
}

ResolvedExperiment resolve_experiment(const ExperimentSpec& spec) {
    ModelResolution m = resolve_model(spec);
    ResolvedExperiment rx;
    rx.spec = std::move(m.spec);
    rx.degree_histogram = std::move(m.histogram);
    rx.reference = make_reference(rx.spec, rx.degree_histogram);
    rx.criticality = compute_criticality(rx.reference);
    rx.prediction = predict_final_size(rx.criticality, rx.reference);
    rx.classification_threshold = rx.spec.classification_epsilon * rx.prediction.predicted_size;
    return rx;
}

AggregateResult run_experiment(const ExperimentSpec& spec) {
    return run_experiment_offset(spec, 0);
}

double degree_profile_check(const std::vector<EpidemicOutcome>& outcomes,
                            const DegreeConfiguration& reference,
                            double classification_threshold) {
    std::map<int, std::int64_t> pooled;
    std::int64_t total = 0;
    for (const auto& out : outcomes) {
        if (static_cast<double>(out.final_size) <= classification_threshold) continue;
        for (const auto& [degree, count] : out.final_size_by_degree) {
            pooled[degree] += count;
            total += count;
        }
    }
    if (total == 0) throw Error(Errc::NoLargeOutbreaks, "no outbreak cleared the threshold");

    // Size-biased law k p_k / lambda over the susceptible part.
    double half_edges = 0.0;
    for (std::size_t k = 0; k < reference.n_s.size(); ++k)
        half_edges += static_cast<double>(k) * static_cast<double>(reference.n_s[k]);
    double tv = 0.0;
    const std::size_t max_k = std::max(reference.n_s.size(),
                                       pooled.empty() ? std::size_t{0}
                                                      : static_cast<std::size_t>(pooled.rbegin()->first) + 1);
    for (std::size_t k = 0; k < max_k; ++k) {
        const double expected =
            k < reference.n_s.size()
                ? static_cast<double>(k) * static_cast<double>(reference.n_s[k]) / half_edges
                : 0.0;
        const auto it = pooled.find(static_cast<int>(k));
        const double observed =
            it == pooled.end() ? 0.0
                               : static_cast<double>(it->second) / static_cast<double>(total);
        tv += std::abs(observed - expected);
    }
    return 0.5 * tv;
}

Table survival_curve(const ExperimentSpec& spec, const std::vector<double>& x_values) {
    if (x_values.empty()) throw Error(Errc::BadConfig, "no targets given");
    if (spec.placement == SeedPlacement::ByDegreeSpec)
        throw Error(Errc::BadConfig, "survival curve chooses its own seed counts");

    // Probe resolve with a single seed to learn alpha and the degree profile.
    ExperimentSpec probe = spec;
    probe.n_infective = 1;
    probe.n_recovered = 0;
    const ResolvedExperiment base = resolve_experiment(probe);
    const double alpha = base.criticality.alpha;

    // Expected initial infective half-edges as a function of the seed count.
    const std::int64_t n_total = std::accumulate(base.degree_histogram.begin(),
                                                 base.degree_histogram.end(), std::int64_t{0});
    std::vector<double> x_of_m(1, 0.0); // x_of_m[m] for SingleHighDegree
    if (spec.placement == SeedPlacement::SingleHighDegree) {
        for (std::size_t k = base.degree_histogram.size(); k-- > 0;)
            for (std::int64_t i = 0; i < base.degree_histogram[k]; ++i)
                x_of_m.push_back(x_of_m.back() + static_cast<double>(k));
    }
    double mean_degree = 0.0;
    for (std::size_t k = 0; k < base.degree_histogram.size(); ++k)
        mean_degree += static_cast<double>(k) * static_cast<double>(base.degree_histogram[k]);
    mean_degree /= static_cast<double>(n_total);

    Table table;
    table.columns = {"target", "seeds", "x_i0", "p_small_hat", "p_small_stderr",
                     "p_small_pred", "p_small_corrected"};

    for (std::size_t t = 0; t < x_values.size(); ++t) {
        const double target = x_values[t];
        if (!(target > 0.0)) throw Error(Errc::BadConfig, "targets must be positive");

        std::int64_t m = 0;
        if (spec.placement == SeedPlacement::SingleHighDegree) {
            double best = std::numeric_limits<double>::infinity();
            for (std::int64_t c = 1; c < static_cast<std::int64_t>(x_of_m.size()); ++c) {
                const double err = std::abs(alpha * x_of_m[static_cast<std::size_t>(c)] - target);
                if (err < best) {
                    best = err;
                    m = c;
                }
            }
        } else {
            m = std::llround(target / (alpha * mean_degree));
            m = std::max<std::int64_t>(m, 1);
            m = std::min(m, n_total);
        }
        const double expected_x = spec.placement == SeedPlacement::SingleHighDegree
                                      ? x_of_m[static_cast<std::size_t>(m)]
                                      : static_cast<double>(m) * mean_degree;
        if (std::abs(alpha * expected_x - target) > 0.1 * target)
            throw Error(Errc::TargetUnreachable,
                        "no integer seed count lands within 10% of target " +
                            format_double(target));

        ExperimentSpec point = spec;
        point.n_infective = m;
        const AggregateResult agg = run_experiment_offset(
            point, static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(spec.reps));

        const double p_small = 1.0 - agg.p_large_hat.value;
        const double pred =
            predict_small_outbreak_probability(agg.resolved.criticality,
                                               agg.resolved.reference, false);
        const double corrected =
            predict_small_outbreak_probability(agg.resolved.criticality,
                                               agg.resolved.reference, true);
        table.rows.push_back({cell(target), cell(static_cast<std::int64_t>(m)),
                              cell(static_cast<double>(agg.resolved.reference.x_i0())),
                              cell(p_small), cell(agg.p_large_hat.std_error), cell(pred),
                              cell(corrected)});
    }
    return table;
}

Table figure_fs_scatter(const ExperimentSpec& spec, int realisations,
                        const std::vector<std::int64_t>& m_grid) {
    if (spec.engine != EngineKind::Sellke)
        throw Error(Errc::BadConfig, "the seed sweep runs on the threshold construction");
    if (realisations < 1) throw Error(Errc::BadConfig, "need at least one realisation");
    if (m_grid.empty()) throw Error(Errc::BadConfig, "empty seed grid");

    const ResolvedExperiment rx = resolve_experiment(spec);
    std::vector<std::int64_t> grid = m_grid;
    std::sort(grid.begin(), grid.end());

    Table table;
    table.columns = {"realisation_id", "m", "X_I0", "Z"};
    for (int id = 0; id < realisations; ++id) {
        PhiloxRng rng(spec.master_seed,
                      stream_id(StreamChannel::Realisation, static_cast<std::uint64_t>(id)));
        const Multigraph graph = build_graph(rx, rng);
        const SellkeDraw draw = sample_sellke_draw(graph.vertex_count(), spec.rho, rng);
        const auto points = sellke_sweep(graph, draw, grid, spec.beta);
        for (const auto& pt : points) {
            table.rows.push_back({cell(static_cast<std::int64_t>(id)), cell(pt.m),
                                  cell(pt.seed_half_edges), cell(pt.total_infected)});
        }
    }
    return table;
}

std::string spec_json(const ExperimentSpec& spec) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json model;
    model["kind"] = model_kind_name(spec.model);
    switch (spec.model) {
        case ModelKind::DegreeCounts: {
            nlohmann::ordered_json counts;
            for (const auto& [degree, count] : spec.degree_counts)
                counts[std::to_string(degree)] = count;
            model["counts"] = counts;
            break;
        }
        case ModelKind::Poisson:
            model["n"] = spec.n;
            model["mean"] = spec.poisson_mean;
            break;
        case ModelKind::Gnp:
            model["n"] = spec.n;
            model["p"] = spec.gnp_p;
            break;
    }
    j["model"] = model;

    nlohmann::ordered_json states;
    states["n_I"] = spec.n_infective;
    states["n_R"] = spec.n_recovered;
    states["mode"] = placement_name(spec.placement);
    if (spec.placement == SeedPlacement::ByDegreeSpec) {
        nlohmann::ordered_json by_degree;
        nlohmann::ordered_json infective;
        for (const auto& [degree, count] : spec.infective_by_degree)
            infective[std::to_string(degree)] = count;
        by_degree["infective"] = infective;
        if (!spec.recovered_by_degree.empty()) {
            nlohmann::ordered_json recovered;
            for (const auto& [degree, count] : spec.recovered_by_degree)
                recovered[std::to_string(degree)] = count;
            by_degree["recovered"] = recovered;
        }
        states["by_degree"] = by_degree;
    }
    j["states"] = states;

    j["rates"] = {{"beta", spec.beta}, {"rho", spec.rho}};
    nlohmann::ordered_json experiment;
    experiment["engine"] = engine_name(spec.engine);
    experiment["reps"] = spec.reps;
    experiment["epsilon"] = spec.classification_epsilon;
    experiment["fresh_graph_per_replica"] = spec.fresh_graph_per_replica;
    j["experiment"] = experiment;
    j["rng"] = {{"seed", spec.master_seed}};
    return j.dump();
}

Metadata experiment_metadata(const ResolvedExperiment& resolved) {
    Metadata meta;
    meta.emplace_back("spec", raw_cell(spec_json(resolved.spec)));
    meta.emplace_back("master_seed",
                      Cell{Cell::Kind::Number, std::to_string(resolved.spec.master_seed)});
    meta.emplace_back("engine", cell(std::string(engine_name(resolved.spec.engine))));
    meta.emplace_back("r0", cell(resolved.criticality.r0));
    meta.emplace_back("alpha", cell(resolved.criticality.alpha));
    meta.emplace_back("predicted_size", cell(resolved.prediction.predicted_size));
    meta.emplace_back("classification_threshold", cell(resolved.classification_threshold));
    return meta;
}

} // namespace nearsir
