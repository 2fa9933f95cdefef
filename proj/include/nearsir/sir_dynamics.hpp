#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "nearsir/degree_model.hpp"
#include "nearsir/graph.hpp"
#include "nearsir/graph_gen.hpp"
#include "nearsir/rng.hpp"

namespace nearsir {

struct EpidemicOutcome {
    std::int64_t final_size = 0; // initially susceptible vertices ever infected
    std::map<int, std::int64_t> final_size_by_degree;
    //! Model time of the engine's stop event. The time-changed engine reports
    //! its own clock (flagged below); the other engines report original time.
    double duration = 0.0;
    bool time_changed_clock = false;
    //! Time of the last susceptible->infective transition, 0 if none. Can
    //! precede duration: the process may keep pairing or recovering after the
    //! final infection.
    double last_infection_time = 0.0;
    std::int64_t pairing_events = 0; // transmissions, for the fixed-graph engine
    std::int64_t z0_red = -1;        // initial red half-edge count; pairing engine only
};

//! Counts sampled along a time grid. Values are right-continuous: each grid
//! entry holds the state left by the last event at or before that time.
//! s_k[g][k] counts susceptible vertices of degree k at grid[g]; x_* count
//! free half-edges by state. The f_* columns are the deterministic
//! comparison curves and may be left empty by the engines.
struct TrajectoryRecord {
    std::vector<double> grid;
    std::vector<std::vector<std::int64_t>> s_k;
    std::vector<std::int64_t> x_s, x_i, x_r;
    std::vector<double> f_s, f_i, f_r;
};

//! Exact continuous-time chain on a fixed graph: every infective-susceptible
//! adjacent pair transmits at rate beta per edge copy, every infective
//! recovers at rate rho. Runs until no infective remains (or, with rho = 0,
//! until no transmission is possible).
EpidemicOutcome run_gillespie(const Multigraph& graph,
                              const std::vector<VertexState>& initial,
                              double beta, double rho, PhiloxRng& rng);

//! Epidemic and matching revealed together: each free infective half-edge
//! whose pairing clock beats its vertex's recovery clock (a red half-edge)
//! pairs with a uniformly random free half-edge. Equivalent in law to
//! run_gillespie on a fresh uniformly matched multigraph. Cost is
//! proportional to the outbreak, not to n.
EpidemicOutcome run_pairing_dynamic(const DegreeConfiguration& config, PhiloxRng& rng);
EpidemicOutcome run_pairing_dynamic(const DegreeConfiguration& config, PhiloxRng& rng,
                                    const std::vector<double>& grid,
                                    TrajectoryRecord& record);

//! Same jump chain on the rescaled clock where each free susceptible
//! half-edge is infected at rate 1: pairings fire at total rate x - 1 and
//! each infective vertex recovers at rate rho (x - 1) / (beta x_I), with x
//! the free half-edge count and x_I its infective part. Stops when x_I = 0;
//! duration is the rescaled stop time.
std::pair<EpidemicOutcome, TrajectoryRecord>
run_time_changed(const DegreeConfiguration& config, PhiloxRng& rng,
                 const std::vector<double>& grid);

struct DeterministicTrajectories {
    std::vector<double> f_s, f_r, f_i;
};

//! Closed-form limit curves on the time-changed clock, valid when no vertex
//! starts recovered: f_S(t) = sum_k k n_{S,k} e^{-kt},
//! f_R(t) = (rho/beta) e^{-t}(1-e^{-t}) sum_k k n_k, and f_I is the total
//! e^{-2t} sum_k k n_k minus the other two.
DeterministicTrajectories deterministic_trajectories(const DegreeConfiguration& config,
                                                     const std::vector<double>& grid);

//! Number of neighbours a newly infected degree-k vertex goes on to infect
//! through its k-1 remaining half-edges, marginally over its infectious
//! period: tau ~ Exp(rho), then Binomial(k-1, 1 - e^{-beta tau}). With
//! rho = 0 this is k-1 outright.
int sample_Y(int k, double beta, double rho, PhiloxRng& rng);

} // namespace nearsir
