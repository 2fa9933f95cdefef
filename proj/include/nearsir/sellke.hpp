#pragma once

#include <cstdint>
#include <vector>

#include "nearsir/graph.hpp"
#include "nearsir/rng.hpp"

namespace nearsir {

//! One realisation of all the randomness the threshold construction needs:
//! per-vertex infectious periods (infinite when rho = 0), unit-exponential
//! resistance thresholds, and the seeding order. Immutable once drawn, so
//! many initial conditions replay against the same randomness.
struct SellkeDraw {
    std::vector<double> infectious_periods;
    std::vector<double> thresholds;
    std::vector<std::int32_t> permutation;
};

SellkeDraw sample_sellke_draw(std::int64_t n, double rho, PhiloxRng& rng);

struct SellkeResult {
    std::int64_t new_infections = 0; // beyond the m seeds
    std::int64_t total_infected = 0; // seeds included
    std::vector<std::uint8_t> infected;
};

//! Least fixed point of the exposure iteration: seed the first m vertices of
//! the draw's permutation unconditionally, then infect every vertex whose
//! threshold is strictly below beta times the summed infectious periods of
//! its infected neighbours. Parallel edges count once per copy; loops add
//! nothing to their own vertex. Order of evaluation cannot matter: the
//! operator is monotone, so the work-queue reaches its unique least fixed
//! point.
SellkeResult sellke_final_size(const Multigraph& graph, const SellkeDraw& draw,
                               std::int64_t m, double beta);

//! Same fixed point with an explicit seed set instead of the permutation
//! prefix, plus an optional immune set (vertices that neither transmit nor
//! get infected, as if removed). Seeds and immunes must be disjoint.
SellkeResult sellke_final_size_seeded(const Multigraph& graph, const SellkeDraw& draw,
                                      const std::vector<std::int32_t>& seeds,
                                      const std::vector<std::int32_t>& immune, double beta);

struct SellkeSweepPoint {
    std::int64_t m = 0;
    std::int64_t seed_half_edges = 0; // summed degree of the first m seeds
    std::int64_t total_infected = 0;  // seeds included
};

//! Final size at every m in ascending m_values against one fixed draw,
//! warm-starting each step from the previous infected set. Monotone in m by
//! construction, and equal to a cold start at each m.
std::vector<SellkeSweepPoint> sellke_sweep(const Multigraph& graph, const SellkeDraw& draw,
                                           const std::vector<std::int64_t>& m_values,
                                           double beta);

} // namespace nearsir
