#include "nearsir/giant_component.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nearsir/errors.hpp"
#include "nearsir/graph_gen.hpp"
#include "nearsir/rng.hpp"

namespace nearsir {

ComponentSummary components(const Multigraph& graph) {
    const std::int64_t n = graph.vertex_count();
    std::vector<std::int32_t> comp(n, -1);
    std::vector<std::int64_t> sizes;
    std::vector<std::int32_t> stack;
    for (std::int64_t root = 0; root < n; ++root) {
        if (comp[root] >= 0) continue;
        const auto id = static_cast<std::int32_t>(sizes.size());
        std::int64_t size = 0;
        comp[root] = id;
        stack.push_back(static_cast<std::int32_t>(root));
        while (!stack.empty()) {
            const std::int32_t v = stack.back();
            stack.pop_back();
            ++size;
            for (std::int32_t u : graph.neighbors(v)) {
                if (comp[u] >= 0) continue;
                comp[u] = id;
                stack.push_back(u);
            }
        }
        sizes.push_back(size);
    }

    ComponentSummary summary;
    if (sizes.empty()) return summary;
    // components are discovered in ascending order of their lowest vertex, so
    // the first maximum settles ties in favour of the lowest contained index
    std::int32_t c1 = 0;
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] > sizes[c1]) c1 = static_cast<std::int32_t>(i);
    summary.c1_vertices = sizes[c1];
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (static_cast<std::int32_t>(i) == c1) continue;
        summary.c2_vertices = std::max(summary.c2_vertices, sizes[i]);
    }
    for (const auto& [u, v] : graph.edges())
        if (comp[u] == c1) ++summary.c1_edges;
    for (std::int64_t v = 0; v < n; ++v)
        if (comp[v] == c1) ++summary.c1_degree_profile[graph.degree(v)];
    summary.sizes = std::move(sizes);
    std::sort(summary.sizes.begin(), summary.sizes.end(), std::greater<>());
    return summary;
}

namespace {

RatioEstimate estimate(const std::vector<double>& xs) {
    RatioEstimate est;
    const auto n = static_cast<double>(xs.size());
    if (xs.empty()) return est;
    est.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return est;
    double ss = 0;
    for (double x : xs) ss += (x - est.mean) * (x - est.mean);
    est.std_error = std::sqrt(ss / (n - 1.0) / n);
    return est;
}

} // namespace

GiantLawReport verify_giant_law(const std::vector<int>& degrees, int reps,
                                std::uint64_t master_seed) {
    if (reps < 1) throw Error(Errc::BadConfig, "need at least one repetition");
    if (degrees.empty()) throw Error(Errc::BadConfig, "empty degree sequence");

    GiantLawReport report;
    report.n = static_cast<std::int64_t>(degrees.size());
    report.reps = reps;
    const double n = static_cast<double>(report.n);
    std::int64_t alpha_sum = 0, deg_sum = 0;
    double gamma_sum = 0;
    int max_degree = 0;
    std::vector<std::int64_t> count_by_degree;
    for (int d : degrees) {
        alpha_sum += static_cast<std::int64_t>(d) * (d - 2);
        deg_sum += d;
        gamma_sum += static_cast<double>(d) * (d - 1) * (d - 2);
        max_degree = std::max(max_degree, d);
        if (d >= static_cast<int>(count_by_degree.size())) count_by_degree.resize(d + 1, 0);
        ++count_by_degree[d];
    }
    report.alpha = static_cast<double>(alpha_sum) / n;
    report.lambda = static_cast<double>(deg_sum) / n;
    report.gamma = gamma_sum / n;

    if (report.alpha <= 0.0)
        report.warnings.push_back("alpha <= 0: below the supercritical window");
    else if (std::cbrt(n) * report.alpha < 4.0)
        report.warnings.push_back("n^(1/3) alpha < 4: inside or too close to the critical window");
    if (count_by_degree.size() < 2 || count_by_degree[1] == 0)
        report.warnings.push_back("no degree-1 vertices: law derived with p_1 > 0");
    if (report.gamma <= 0.0)
        report.warnings.push_back("gamma <= 0: no vertex of degree 3 or more");

    const double scale = n * report.alpha;
    std::vector<double> c1s, c2s, e1s;
    std::vector<std::vector<double>> per_degree(max_degree + 1);
    for (int rep = 0; rep < reps; ++rep) {
        PhiloxRng rng(master_seed, stream_id(StreamChannel::Component, rep));
        const Multigraph graph = sample_multigraph(degrees, rng);
        const ComponentSummary summary = components(graph);
        c1s.push_back(summary.c1_vertices / scale);
        c2s.push_back(summary.c2_vertices / scale);
        e1s.push_back(summary.c1_edges / scale);
        for (int k = 0; k <= max_degree; ++k) {
            if (count_by_degree[k] == 0) continue;
            const auto it = summary.c1_degree_profile.find(k);
            const std::int64_t vk = it == summary.c1_degree_profile.end() ? 0 : it->second;
            per_degree[k].push_back(vk / scale);
        }
    }
    report.c1_over_nalpha = estimate(c1s);
    report.c2_over_nalpha = estimate(c2s);
    report.e1_over_nalpha = estimate(e1s);
    report.predicted_c1 = report.gamma > 0.0 ? 2.0 * report.lambda / report.gamma : 0.0;
    for (int k = 0; k <= max_degree; ++k) {
        if (count_by_degree[k] == 0) continue;
        DegreeRatio row;
        row.degree = k;
        const RatioEstimate est = estimate(per_degree[k]);
        row.mean = est.mean;
        row.std_error = est.std_error;
        const double pk = static_cast<double>(count_by_degree[k]) / n;
        row.predicted = report.gamma > 0.0 ? 2.0 * k * pk / report.gamma : 0.0;
        report.per_degree.push_back(row);
    }
    return report;
}

} // namespace nearsir
