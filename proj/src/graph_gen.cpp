#include "nearsir/graph_gen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

#include "nearsir/errors.hpp"

namespace nearsir {

namespace {

template <typename T>
void shuffle_vec(std::vector<T>& v, PhiloxRng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.below(i)]);
}

std::int64_t degree_sum(const std::vector<int>& degrees) {
    std::int64_t s = 0;
    for (int d : degrees) {
        if (d < 0) throw Error(Errc::BadConfig, "negative degree");
        s += d;
    }
    return s;
}

std::int64_t at_or_zero(const std::vector<std::int64_t>& v, std::size_t k) {
    return k < v.size() ? v[k] : 0;
}

} // namespace

Multigraph sample_multigraph(const std::vector<int>& degrees, PhiloxRng& rng) {
    const std::int64_t total = degree_sum(degrees);
    if (total % 2 != 0)
        throw Error(Errc::OddTotalDegree, "half-edge count must be even");
    std::vector<std::int32_t> half;
    half.reserve(total);
    for (std::size_t v = 0; v < degrees.size(); ++v)
        half.insert(half.end(), degrees[v], static_cast<std::int32_t>(v));
    shuffle_vec(half, rng);
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    edges.reserve(total / 2);
    for (std::int64_t t = 0; t < total; t += 2)
        edges.emplace_back(half[t], half[t + 1]);
    return Multigraph(static_cast<std::int64_t>(degrees.size()), std::move(edges));
}

bool is_graphical(const std::vector<int>& degrees) {
    const std::int64_t n = static_cast<std::int64_t>(degrees.size());
    std::int64_t total = 0;
    for (int d : degrees) {
        if (d < 0 || d > n - 1) return false;
        total += d;
    }
    if (total % 2 != 0) return false;
    std::vector<int> d(degrees);
    std::sort(d.begin(), d.end(), std::greater<int>());
    std::vector<std::int64_t> prefix(n + 1, 0);
    for (std::int64_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + d[i];
    for (std::int64_t r = 1; r <= n; ++r) {
        if (d[r - 1] < r && r > 1) break; // beyond the Durfee square the test cannot fail
        // split the tail i >= r into entries >= r (contribute r) and the rest
        const auto cut = std::lower_bound(d.begin() + r, d.end(), r, std::greater_equal<>())
                         - d.begin();
        const std::int64_t big = cut - r;
        const std::int64_t rhs = r * (r - 1) + big * r + (prefix[n] - prefix[cut]);
        if (prefix[r] > rhs) return false;
    }
    return true;
}

Multigraph sample_simple_graph(const std::vector<int>& degrees, PhiloxRng& rng,
                               int max_attempts) {
    if (!is_graphical(degrees))
        throw Error(Errc::NotGraphical, "no simple graph has this degree sequence");
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Multigraph g = sample_multigraph(degrees, rng);
        if (g.is_simple()) return g;
    }
    throw Error(Errc::AttemptsExhausted,
                "no simple matching found; simplicity probability too small");
}

Multigraph sample_gnp(std::int64_t n, double p, PhiloxRng& rng) {
    if (n < 0 || p < 0.0 || p > 1.0) throw Error(Errc::BadConfig, "bad gnp parameters");
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    if (n >= 2 && p >= 1.0) {
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i + 1; j < n; ++j)
                edges.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
        return Multigraph(n, std::move(edges));
    }
    if (n >= 2 && p > 0.0) {
        const double logq = std::log1p(-p);
        // walk the pairs (i,j), i<j, in row-major order with geometric gaps
        std::int64_t i = 0, j = 0;
        for (;;) {
            const double u = rng.next_double_pos();
            const std::int64_t skip = static_cast<std::int64_t>(std::log(u) / logq);
            j += skip + 1;
            bool done = false;
            while (j >= n) {
                const std::int64_t overflow = j - n;
                ++i;
                if (i >= n - 1) { done = true; break; }
                j = i + 1 + overflow;
            }
            if (done) break;
            edges.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
        }
    }
    return Multigraph(n, std::move(edges));
}

Multigraph sample_gnm(std::int64_t n, std::int64_t m, PhiloxRng& rng) {
    if (n < 0 || m < 0) throw Error(Errc::BadConfig, "bad gnm parameters");
    const auto total = static_cast<unsigned __int128>(n) * (n > 0 ? n - 1 : 0) / 2;
    if (static_cast<unsigned __int128>(m) > total)
        throw Error(Errc::BadConfig, "more edges requested than vertex pairs");
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    edges.reserve(m);
    if (total <= 4'000'000 && static_cast<unsigned __int128>(m) * 2 > total) {
        // dense request: materialize all pairs and take a random prefix
        std::vector<std::pair<std::int32_t, std::int32_t>> pool;
        pool.reserve(static_cast<std::size_t>(total));
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i + 1; j < n; ++j)
                pool.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
        for (std::int64_t t = 0; t < m; ++t) {
            const std::size_t pick = t + rng.below(pool.size() - t);
            std::swap(pool[t], pool[pick]);
            edges.push_back(pool[t]);
        }
        return Multigraph(n, std::move(edges));
    }
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(m) * 2);
    while (static_cast<std::int64_t>(edges.size()) < m) {
        std::int64_t u = static_cast<std::int64_t>(rng.below(n));
        std::int64_t v = static_cast<std::int64_t>(rng.below(n - 1));
        if (v >= u) ++v;
        const auto a = static_cast<std::uint64_t>(std::min(u, v));
        const auto b = static_cast<std::uint64_t>(std::max(u, v));
        if (seen.insert((a << 32) | b).second)
            edges.emplace_back(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
    }
    return Multigraph(n, std::move(edges));
}

std::vector<int> sample_poisson_degrees(std::int64_t n, double mean, PhiloxRng& rng) {
    if (n <= 0 || mean < 0.0) throw Error(Errc::BadConfig, "bad poisson recipe");
    std::vector<int> degrees(n);
    std::int64_t total = 0;
    for (std::int64_t v = 0; v < n; ++v) {
        degrees[v] = sample_poisson(rng, mean);
        total += degrees[v];
    }
    if (total % 2 != 0) degrees[rng.below(n)] += 1;
    return degrees;
}

std::vector<VertexState> assign_initial_states(const std::vector<int>& degrees,
                                               std::int64_t n_infective,
                                               std::int64_t n_recovered,
                                               SeedMode mode,
                                               const DegreeConfiguration* spec,
                                               PhiloxRng& rng) {
    const std::int64_t n = static_cast<std::int64_t>(degrees.size());
    if (n_infective < 0 || n_recovered < 0 || n_infective + n_recovered > n)
        throw Error(Errc::BadConfig, "seed counts exceed vertex count");
    std::vector<VertexState> states(n, VertexState::Susceptible);

    if (mode == SeedMode::UniformRandom) {
        std::vector<std::int64_t> idx(n);
        for (std::int64_t v = 0; v < n; ++v) idx[v] = v;
        const std::int64_t picks = n_infective + n_recovered;
        for (std::int64_t t = 0; t < picks; ++t) {
            const std::int64_t pick = t + static_cast<std::int64_t>(rng.below(n - t));
            std::swap(idx[t], idx[pick]);
            states[idx[t]] = t < n_infective ? VertexState::Infective : VertexState::Recovered;
        }
        return states;
    }

    if (spec == nullptr)
        throw Error(Errc::BadConfig, "by-degree state assignment needs per-degree counts");
    int max_deg = 0;
    for (int d : degrees) max_deg = std::max(max_deg, d);
    std::vector<std::vector<std::int64_t>> buckets(max_deg + 1);
    for (std::int64_t v = 0; v < n; ++v) buckets[degrees[v]].push_back(v);
    const std::size_t spec_degrees = std::max({spec->n_s.size(), spec->n_i.size(), spec->n_r.size()});
    for (std::size_t k = 0; k <= std::max<std::size_t>(max_deg, spec_degrees ? spec_degrees - 1 : 0); ++k) {
        const std::int64_t want_i = at_or_zero(spec->n_i, k);
        const std::int64_t want_r = at_or_zero(spec->n_r, k);
        const std::int64_t want_total = at_or_zero(spec->n_s, k) + want_i + want_r;
        const std::int64_t have = k <= static_cast<std::size_t>(max_deg)
                                      ? static_cast<std::int64_t>(buckets[k].size())
                                      : 0;
        if (want_total != have)
            throw Error(Errc::SpecMismatch, "degree " + std::to_string(k) + ": spec wants " +
                                                std::to_string(want_total) + " vertices, graph has " +
                                                std::to_string(have));
        if (want_i + want_r == 0) continue;
        auto& bucket = buckets[k];
        for (std::int64_t t = 0; t < want_i + want_r; ++t) {
            const std::int64_t pick = t + static_cast<std::int64_t>(rng.below(bucket.size() - t));
            std::swap(bucket[t], bucket[pick]);
            states[bucket[t]] = t < want_i ? VertexState::Infective : VertexState::Recovered;
        }
    }
    return states;
}

std::vector<int> degrees_of(const Multigraph& graph) {
    std::vector<int> degrees(graph.vertex_count());
    for (std::int64_t v = 0; v < graph.vertex_count(); ++v) degrees[v] = graph.degree(v);
    return degrees;
}

DegreeConfiguration tally_states(const std::vector<int>& degrees,
                                 const std::vector<VertexState>& states,
                                 double beta, double rho) {
    if (degrees.size() != states.size())
        throw Error(Errc::BadConfig, "degree and state lists disagree in length");
    int max_deg = 0;
    for (int d : degrees) max_deg = std::max(max_deg, d);
    DegreeConfiguration config;
    config.beta = beta;
    config.rho = rho;
    config.n_s.assign(max_deg + 1, 0);
    config.n_i.assign(max_deg + 1, 0);
    config.n_r.assign(max_deg + 1, 0);
    for (std::size_t v = 0; v < degrees.size(); ++v) {
        switch (states[v]) {
            case VertexState::Susceptible: ++config.n_s[degrees[v]]; break;
            case VertexState::Infective: ++config.n_i[degrees[v]]; break;
            case VertexState::Recovered: ++config.n_r[degrees[v]]; break;
        }
    }
    return config;
}

} // namespace nearsir
