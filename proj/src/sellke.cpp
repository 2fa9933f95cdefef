#include "nearsir/sellke.hpp"

#include <limits>

#include "nearsir/errors.hpp"

namespace nearsir {

namespace {

//! Exposure bookkeeping shared by the single-m and sweep entry points. The
//! accumulators are extended precision so that many small increments across
//! a sweep cannot reorder a threshold crossing; comparisons are strict, and
//! ties have probability zero anyway.
struct ExposureState {
    const Multigraph& graph;
    const SellkeDraw& draw;
    double beta;
    std::vector<long double> exposure;
    std::vector<std::uint8_t> infected;
    std::vector<std::int32_t> queue;
    std::int64_t count = 0;

    ExposureState(const Multigraph& g, const SellkeDraw& d, double b)
        : graph(g), draw(d), beta(b), exposure(g.vertex_count(), 0.0L),
          infected(g.vertex_count(), 0) {
        if (static_cast<std::int64_t>(d.infectious_periods.size()) != g.vertex_count() ||
            static_cast<std::int64_t>(d.thresholds.size()) != g.vertex_count() ||
            static_cast<std::int64_t>(d.permutation.size()) != g.vertex_count())
            throw Error(Errc::BadConfig, "draw does not match the graph's vertex count");
        if (b <= 0.0) throw Error(Errc::BadConfig, "beta must be positive");
    }

    void seed(std::int32_t v) {
        if (infected[v]) return;
        infected[v] = 1;
        ++count;
        queue.push_back(v);
    }

    void drain() {
        while (!queue.empty()) {
            const std::int32_t v = queue.back();
            queue.pop_back();
            const long double mass =
                static_cast<long double>(beta) *
                static_cast<long double>(draw.infectious_periods[v]);
            for (std::int32_t u : graph.neighbors(v)) {
                if (u == v || infected[u]) continue;
                exposure[u] += mass;
                if (static_cast<long double>(draw.thresholds[u]) < exposure[u]) {
                    infected[u] = 1;
                    ++count;
                    queue.push_back(u);
                }
            }
        }
    }
};

} // namespace

SellkeDraw sample_sellke_draw(std::int64_t n, double rho, PhiloxRng& rng) {
    if (n < 1) throw Error(Errc::BadConfig, "need at least one vertex");
    if (rho < 0.0) throw Error(Errc::BadConfig, "rho must be nonnegative");
    SellkeDraw draw;
    draw.infectious_periods.resize(n);
    for (auto& t : draw.infectious_periods)
        t = rho > 0.0 ? rng.exponential(rho) : std::numeric_limits<double>::infinity();
    draw.thresholds.resize(n);
    for (auto& q : draw.thresholds) q = rng.exponential(1.0);
    draw.permutation.resize(n);
    for (std::int64_t v = 0; v < n; ++v) draw.permutation[v] = static_cast<std::int32_t>(v);
    for (std::int64_t i = n; i > 1; --i)
        std::swap(draw.permutation[i - 1], draw.permutation[rng.below(i)]);
    return draw;
}

SellkeResult sellke_final_size(const Multigraph& graph, const SellkeDraw& draw,
                               std::int64_t m, double beta) {
    if (m < 1 || m > graph.vertex_count())
        throw Error(Errc::BadConfig, "seed count outside [1, n]");
    ExposureState state(graph, draw, beta);
    for (std::int64_t i = 0; i < m; ++i) state.seed(draw.permutation[i]);
    state.drain();
    SellkeResult result;
    result.total_infected = state.count;
    result.new_infections = state.count - m;
    result.infected = std::move(state.infected);
    return result;
}

SellkeResult sellke_final_size_seeded(const Multigraph& graph, const SellkeDraw& draw,
                                      const std::vector<std::int32_t>& seeds,
                                      const std::vector<std::int32_t>& immune, double beta) {
    if (seeds.empty()) throw Error(Errc::BadConfig, "need at least one seed");
    ExposureState state(graph, draw, beta);
    for (std::int32_t v : immune) {
        if (v < 0 || v >= graph.vertex_count())
            throw Error(Errc::BadConfig, "immune vertex out of range");
        state.infected[v] = 1; // never tested, never queued, emits nothing
    }
    for (std::int32_t v : seeds) {
        if (v < 0 || v >= graph.vertex_count())
            throw Error(Errc::BadConfig, "seed vertex out of range");
        state.seed(v);
    }
    const std::int64_t seeded = state.count;
    if (seeded != static_cast<std::int64_t>(seeds.size()))
        throw Error(Errc::BadConfig, "seed set has repeats or overlaps the immune set");
    state.drain();
    for (std::int32_t v : immune) state.infected[v] = 0;
    SellkeResult result;
    result.total_infected = state.count;
    result.new_infections = state.count - seeded;
    result.infected = std::move(state.infected);
    return result;
}

std::vector<SellkeSweepPoint> sellke_sweep(const Multigraph& graph, const SellkeDraw& draw,
                                           const std::vector<std::int64_t>& m_values,
                                           double beta) {
    ExposureState state(graph, draw, beta);
    std::vector<SellkeSweepPoint> points;
    points.reserve(m_values.size());
    std::int64_t done = 0;
    std::int64_t seed_half_edges = 0;
    for (std::int64_t m : m_values) {
        if (m < done || m < 1 || m > graph.vertex_count())
            throw Error(Errc::BadConfig, "m values must ascend within [1, n]");
        for (; done < m; ++done) {
            state.seed(draw.permutation[done]);
            seed_half_edges += graph.degree(draw.permutation[done]);
        }
        state.drain();
        points.push_back({m, seed_half_edges, state.count});
    }
    return points;
}

} // namespace nearsir
