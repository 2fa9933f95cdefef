#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "nearsir/errors.hpp"
#include "nearsir/graph_gen.hpp"
#include "nearsir/sir_dynamics.hpp"
#include "support/enumerate.hpp"
#include "support/stats.hpp"

using namespace nearsir;

namespace {

Multigraph path3() {
    return Multigraph(3, {{0, 1}, {1, 2}});
}

std::int64_t bucket_size(std::int64_t z) {
    if (z <= 4) return z;
    if (z <= 9) return 5;
    if (z <= 19) return 6;
    if (z <= 49) return 7;
    return 8;
}

std::map<std::int64_t, double> normalize(const std::map<std::int64_t, std::int64_t>& counts,
                                         std::int64_t runs) {
    std::map<std::int64_t, double> out;
    for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / static_cast<double>(runs);
    return out;
}

// reachable-set size from the seeds, excluding the seeds themselves
std::int64_t reachable_new(const Multigraph& g, const std::vector<VertexState>& init) {
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<std::int32_t> stack;
    for (std::int64_t v = 0; v < g.vertex_count(); ++v)
        if (init[v] == VertexState::Infective) {
            seen[v] = 1;
            stack.push_back(static_cast<std::int32_t>(v));
        }
    std::int64_t found = 0;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto u : g.neighbors(v)) {
            if (seen[u] || init[u] != VertexState::Susceptible) continue;
            seen[u] = 1;
            ++found;
            stack.push_back(u);
        }
    }
    return found;
}

} // namespace

TEST_CASE("path of three with the middle vertex seeded") {
    // exact law: sizes 0,1,2 each with probability 1/3
    const auto g = path3();
    const std::vector<VertexState> init{VertexState::Susceptible, VertexState::Infective,
                                        VertexState::Susceptible};
    PhiloxRng rng(31, 0);
    const int runs = 10000;
    std::map<std::int64_t, std::int64_t> counts;
    for (int i = 0; i < runs; ++i) {
        auto out = run_gillespie(g, init, 1.0, 1.0, rng);
        ++counts[out.final_size];
        CHECK(out.pairing_events == out.final_size);
        CHECK(out.z0_red == -1);
    }
    for (std::int64_t z : {0, 1, 2}) {
        const double rate = static_cast<double>(counts[z]) / runs;
        CHECK(std::abs(rate - 1.0 / 3.0) <= 0.02);
    }
}

TEST_CASE("annealed engines match the exact jump-chain law") {
    struct Case {
        const char* name;
        DegreeConfiguration config;
    };
    std::vector<Case> cases;
    {
        Case c{"one degree-2 seed, two leaves", {}};
        c.config.n_s = {0, 2};
        c.config.n_i = {0, 0, 1};
        cases.push_back(c);
    }
    {
        Case c{"mixed states, beta 2", {}};
        c.config.beta = 2.0;
        c.config.n_s = {0, 2, 1};
        c.config.n_i = {0, 1};
        c.config.n_r = {0, 1};
        cases.push_back(c);
    }
    {
        Case c{"no recovery", {}};
        c.config.rho = 0.0;
        c.config.n_s = {0, 0, 2};
        c.config.n_i = {0, 2};
        cases.push_back(c);
    }
    {
        Case c{"loops and double edges likely", {}};
        c.config.n_s = {0, 1, 0, 1};
        c.config.n_i = {0, 0, 2};
        cases.push_back(c);
    }

    const std::int64_t runs = 20000;
    for (const auto& [name, config] : cases) {
        CAPTURE(name);
        const auto law = testoracle::final_size_law(config);

        PhiloxRng rng_pair(32, 0);
        std::map<std::int64_t, std::int64_t> pair_counts;
        for (std::int64_t i = 0; i < runs; ++i)
            ++pair_counts[run_pairing_dynamic(config, rng_pair).final_size];
        const auto fit_pair = teststats::chi_square_goodness(pair_counts, law, runs);
        CHECK(fit_pair.p > 1e-3);

        PhiloxRng rng_tc(33, 0);
        std::map<std::int64_t, std::int64_t> tc_counts;
        for (std::int64_t i = 0; i < runs; ++i)
            ++tc_counts[run_time_changed(config, rng_tc, {}).first.final_size];
        const auto fit_tc = teststats::chi_square_goodness(tc_counts, law, runs);
        CHECK(fit_tc.p > 1e-3);
    }
}

TEST_CASE("no recovery reduces to graph reachability") {
    PhiloxRng rng(34, 0);
    const std::vector<int> degrees{3, 3, 2, 2, 1, 1, 4, 2};
    for (int i = 0; i < 100; ++i) {
        auto g = sample_multigraph(degrees, rng);
        auto init = assign_initial_states(degrees, 2, 1, SeedMode::UniformRandom, nullptr, rng);
        auto out = run_gillespie(g, init, 1.3, 0.0, rng);
        CHECK(out.final_size == reachable_new(g, init));
    }
}

TEST_CASE("pairing dynamic agrees with gillespie on a 3-regular population") {
    const std::int64_t n = 300;
    const std::int64_t runs = 10000;

    PhiloxRng rng_g(35, 0);
    const std::vector<int> degrees(n, 3);
    std::map<std::int64_t, std::int64_t> g_counts;
    for (std::int64_t i = 0; i < runs; ++i) {
        auto g = sample_multigraph(degrees, rng_g);
        auto init = assign_initial_states(degrees, 1, 0, SeedMode::UniformRandom, nullptr, rng_g);
        ++g_counts[bucket_size(run_gillespie(g, init, 1.0, 1.0, rng_g).final_size)];
    }

    DegreeConfiguration config;
    config.n_s = {0, 0, 0, n - 1};
    config.n_i = {0, 0, 0, 1};
    PhiloxRng rng_p(36, 0);
    std::map<std::int64_t, std::int64_t> p_counts;
    for (std::int64_t i = 0; i < runs; ++i)
        ++p_counts[bucket_size(run_pairing_dynamic(config, rng_p).final_size)];

    const double tv = teststats::tv_distance(normalize(g_counts, runs), normalize(p_counts, runs));
    CHECK(tv < 0.05);
}

TEST_CASE("offspring moments of a fresh degree-k infective") {
    struct Params {
        double beta, rho;
    };
    const std::int64_t runs = 20000;
    PhiloxRng rng(37, 0);
    for (const auto& [beta, rho] : {Params{1, 1}, Params{1, 0}, Params{2, 1}}) {
        for (int k : {2, 5, 20}) {
            CAPTURE(beta);
            CAPTURE(rho);
            CAPTURE(k);
            if (rho == 0.0) {
                for (int i = 0; i < 100; ++i) CHECK(sample_Y(k, beta, rho, rng) == k - 1);
                continue;
            }
            const double pi = beta / (beta + rho);
            const double m1 = pi * (k - 1);
            const double m2 = (pi * pi * (k - 1) * (2 * k - 3) + pi * (k - 1)) / (1 + pi);
            std::vector<double> ys, y2s;
            for (std::int64_t i = 0; i < runs; ++i) {
                const double y = sample_Y(k, beta, rho, rng);
                ys.push_back(y);
                y2s.push_back(y * y);
            }
            const auto s1 = teststats::mean_stderr(ys);
            const auto s2 = teststats::mean_stderr(y2s);
            CHECK(std::abs(s1.mean - m1) <= 4.0 * s1.std_error);
            CHECK(std::abs(s2.mean - m2) <= 4.0 * s2.std_error);
        }
    }
}

TEST_CASE("initial red half-edge count") {
    DegreeConfiguration config;
    config.n_s = {0, 0, 0, 40};
    config.n_i = {0, 0, 20}; // X_I0 = 40
    const std::int64_t x_i0 = 40;

    SUBCASE("mean is pi X under recovery") {
        PhiloxRng rng(38, 0);
        std::vector<double> reds;
        for (int i = 0; i < 20000; ++i)
            reds.push_back(static_cast<double>(run_pairing_dynamic(config, rng).z0_red));
        const auto s = teststats::mean_stderr(reds);
        CHECK(std::abs(s.mean - 0.5 * static_cast<double>(x_i0)) <= 4.0 * s.std_error);
    }
    SUBCASE("no recovery paints everything red") {
        config.rho = 0.0;
        PhiloxRng rng(39, 0);
        for (int i = 0; i < 200; ++i) CHECK(run_pairing_dynamic(config, rng).z0_red == x_i0);
    }
}

TEST_CASE("time-changed snapshots start at the configuration and stay consistent") {
    DegreeConfiguration config;
    config.n_s = {0, 30, 20, 10};
    config.n_i = {0, 4};
    config.n_r = {0, 2};
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.1 * i);

    PhiloxRng rng(40, 0);
    for (int rep = 0; rep < 50; ++rep) {
        auto [out, rec] = run_time_changed(config, rng, grid);
        REQUIRE(rec.grid.size() == grid.size());
        REQUIRE(rec.s_k.size() == grid.size());

        CHECK(rec.x_s[0] == 30 + 2 * 20 + 3 * 10);
        CHECK(rec.x_i[0] == 4);
        CHECK(rec.x_r[0] == 2);
        CHECK(rec.s_k[0][1] == 30);
        CHECK(rec.s_k[0][2] == 20);
        CHECK(rec.s_k[0][3] == 10);

        for (std::size_t g = 0; g < grid.size(); ++g) {
            std::int64_t weighted = 0;
            for (std::size_t k = 0; k < rec.s_k[g].size(); ++k)
                weighted += static_cast<std::int64_t>(k) * rec.s_k[g][k];
            CHECK(rec.x_s[g] == weighted);
            if (g > 0) CHECK(rec.x_s[g] <= rec.x_s[g - 1]);
        }

        // by the last grid point (far past the end) the run is over
        std::int64_t s_left = 0;
        for (auto c : rec.s_k.back()) s_left += c;
        CHECK(60 - s_left == out.final_size);
        CHECK(out.time_changed_clock);
        CHECK(out.duration <= grid.back() + 1e-12);

        std::int64_t by_degree = 0;
        for (const auto& [k, c] : out.final_size_by_degree) by_degree += c;
        CHECK(by_degree == out.final_size);
    }
}

TEST_CASE("pairing snapshots on the original clock") {
    DegreeConfiguration config;
    config.n_s = {0, 10, 10};
    config.n_i = {0, 2};
    PhiloxRng rng(41, 0);
    TrajectoryRecord rec;
    auto out = run_pairing_dynamic(config, rng, {0.0, 1e9}, rec);
    CHECK_FALSE(out.time_changed_clock);
    CHECK(rec.x_s[0] == 30);
    CHECK(rec.x_i[0] == 2);
    CHECK(rec.x_r[0] == 0);
    std::int64_t s_left = 0;
    for (auto c : rec.s_k.back()) s_left += c;
    CHECK(20 - s_left == out.final_size);
    CHECK(out.last_infection_time <= out.duration + 1e-12);
}

TEST_CASE("limit curves") {
    DegreeConfiguration config;
    config.n_s = {0, 100, 50};
    config.n_i = {0, 8};
    const std::vector<double> grid{0.0, 0.3, 0.7, 1.5};
    auto det = deterministic_trajectories(config, grid);
    REQUIRE(det.f_s.size() == grid.size());

    const double x_s0 = 100 + 2 * 50;
    const double x_total = x_s0 + 8;
    CHECK(det.f_s[0] == doctest::Approx(x_s0).epsilon(1e-12));
    CHECK(det.f_i[0] == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(det.f_r[0] == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double t = grid[g];
        const double fs = 100 * std::exp(-t) + 100 * std::exp(-2 * t);
        const double fr = std::exp(-t) * (1 - std::exp(-t)) * x_total;
        CHECK(det.f_s[g] == doctest::Approx(fs).epsilon(1e-12));
        CHECK(det.f_r[g] == doctest::Approx(fr).epsilon(1e-12));
        CHECK(det.f_i[g] ==
              doctest::Approx(std::exp(-2 * t) * x_total - fs - fr).epsilon(1e-12));
    }

    SUBCASE("no recovery keeps the recovered curve at zero") {
        config.rho = 0.0;
        auto flat = deterministic_trajectories(config, grid);
        for (double v : flat.f_r) CHECK(v == 0.0);
    }
    SUBCASE("initially recovered vertices are out of scope") {
        config.n_r = {0, 1, 1};
        try {
            deterministic_trajectories(config, grid);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::UnsupportedInitialRecovered);
        }
    }
}

TEST_CASE("same stream gives identical outcomes") {
    DegreeConfiguration config;
    config.n_s = {0, 20, 10, 5};
    config.n_i = {0, 3};
    PhiloxRng a(42, 7), b(42, 7);
    for (int i = 0; i < 20; ++i) {
        auto oa = run_pairing_dynamic(config, a);
        auto ob = run_pairing_dynamic(config, b);
        CHECK(oa.final_size == ob.final_size);
        CHECK(oa.duration == ob.duration);
        CHECK(oa.pairing_events == ob.pairing_events);
        CHECK(oa.z0_red == ob.z0_red);
    }
}
