#pragma once

#include <cstdint>
#include <vector>

#include "nearsir/degree_model.hpp"
#include "nearsir/graph.hpp"
#include "nearsir/rng.hpp"

namespace nearsir {

enum class VertexState : std::uint8_t { Susceptible, Infective, Recovered };

//! Uniform half-edge matching over the prescribed degrees. Every perfect
//! matching of the half-edge set is equally likely; loops and parallel
//! edges come out at their natural rates.
Multigraph sample_multigraph(const std::vector<int>& degrees, PhiloxRng& rng);

//! True iff some simple graph realizes the degree sequence (Erdos-Gallai).
bool is_graphical(const std::vector<int>& degrees);

//! Repeated matching until the result has no loop and no repeated edge,
//! which makes the law uniform over simple graphs with these degrees.
//! Throws NotGraphical up front, AttemptsExhausted when the sequence's
//! simplicity probability is too small for rejection to be sensible.
Multigraph sample_simple_graph(const std::vector<int>& degrees, PhiloxRng& rng,
                               int max_attempts = 1000);

//! Binomial random graph. Runs in O(edges) via geometric gap skipping.
Multigraph sample_gnp(std::int64_t n, double p, PhiloxRng& rng);

//! Uniform simple graph with exactly m edges.
Multigraph sample_gnm(std::int64_t n, std::int64_t m, PhiloxRng& rng);

//! n iid Poisson(mean) degrees; if the sum lands odd, one uniformly chosen
//! vertex gets an extra half-edge so the sequence is pairable.
std::vector<int> sample_poisson_degrees(std::int64_t n, double mean, PhiloxRng& rng);

enum class SeedMode { UniformRandom, ByDegreeSpec };

//! Per-vertex states. UniformRandom picks the n_infective + n_recovered
//! non-susceptible vertices uniformly without replacement; ByDegreeSpec
//! reproduces the spec's per-degree state counts exactly and throws
//! SpecMismatch when the realized degrees cannot satisfy them.
std::vector<VertexState> assign_initial_states(const std::vector<int>& degrees,
                                               std::int64_t n_infective,
                                               std::int64_t n_recovered,
                                               SeedMode mode,
                                               const DegreeConfiguration* spec,
                                               PhiloxRng& rng);

std::vector<int> degrees_of(const Multigraph& graph);

//! Collapse per-vertex degrees and states into per-degree counts.
DegreeConfiguration tally_states(const std::vector<int>& degrees,
                                 const std::vector<VertexState>& states,
                                 double beta, double rho);

} // namespace nearsir
