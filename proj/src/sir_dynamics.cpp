#include "nearsir/sir_dynamics.hpp"

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>

#include "nearsir/errors.hpp"

namespace nearsir {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

//! Prefix-sum tree over int64 weights; supports point updates and sampling
//! an index proportionally to its weight without floating-point error.
class Fenwick {
public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {
        top_ = 1;
        while (top_ * 2 <= n) top_ *= 2;
    }

    void add(std::size_t i, std::int64_t delta) {
        for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
    }

    //! Smallest index whose prefix sum exceeds target (target < total weight).
    std::size_t find(std::int64_t target) const {
        std::size_t pos = 0;
        for (std::size_t step = top_; step > 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next < tree_.size() && tree_[next] <= target) {
                pos = next;
                target -= tree_[next];
            }
        }
        return pos;
    }

private:
    std::vector<std::int64_t> tree_;
    std::size_t top_ = 1;
};

std::int64_t weighted_degree_sum(const std::vector<std::int64_t>& by_degree) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < by_degree.size(); ++k)
        s += static_cast<std::int64_t>(k) * by_degree[k];
    return s;
}

} // namespace

EpidemicOutcome run_gillespie(const Multigraph& graph,
                              const std::vector<VertexState>& initial,
                              double beta, double rho, PhiloxRng& rng) {
    if (beta <= 0.0) throw Error(Errc::BadConfig, "beta must be positive");
    if (rho < 0.0) throw Error(Errc::BadConfig, "rho must be nonnegative");
    const auto n = graph.vertex_count();
    if (static_cast<std::int64_t>(initial.size()) != n)
        throw Error(Errc::BadConfig, "state list does not match vertex count");

    std::vector<VertexState> state(initial);
    auto susceptible_weight = [&](std::int64_t v) {
        std::int64_t c = 0;
        for (std::int32_t u : graph.neighbors(v))
            if (state[u] == VertexState::Susceptible) ++c;
        return c;
    };

    // registry of infective vertices; Fenwick weights are susceptible-neighbour
    // counts so transmitting vertex choice is exact integer sampling
    std::vector<std::int32_t> registry;
    std::vector<std::int64_t> s_val(n, 0);
    std::vector<std::int64_t> slot_of(n, -1);
    Fenwick fen(n);
    std::int64_t weight_total = 0;
    for (std::int64_t v = 0; v < n; ++v) {
        if (state[v] != VertexState::Infective) continue;
        const std::int64_t w = susceptible_weight(v);
        s_val[v] = w;
        slot_of[v] = static_cast<std::int64_t>(registry.size());
        fen.add(registry.size(), w);
        registry.push_back(static_cast<std::int32_t>(v));
        weight_total += w;
    }

    EpidemicOutcome out;
    double t = 0.0;
    for (;;) {
        const std::size_t icount = registry.size();
        if (weight_total == 0 && (rho == 0.0 || icount == 0)) break;
        const double rate_inf = beta * static_cast<double>(weight_total);
        const double rate_rec = rho * static_cast<double>(icount);
        const double total = rate_inf + rate_rec;
        t += rng.exponential(total);
        const bool infect =
            weight_total > 0 && (rate_rec <= 0.0 || total * rng.next_double() < rate_inf);
        if (infect) {
            const std::size_t slot = fen.find(static_cast<std::int64_t>(rng.below(weight_total)));
            const std::int32_t src = registry[slot];
            std::int64_t pick = static_cast<std::int64_t>(rng.below(s_val[src]));
            std::int32_t v = -1;
            for (std::int32_t u : graph.neighbors(src)) {
                if (state[u] != VertexState::Susceptible) continue;
                if (pick == 0) { v = u; break; }
                --pick;
            }
            state[v] = VertexState::Infective;
            out.final_size += 1;
            out.final_size_by_degree[graph.degree(v)] += 1;
            out.pairing_events += 1;
            out.last_infection_time = t;
            const std::int64_t w = susceptible_weight(v);
            s_val[v] = w;
            slot_of[v] = static_cast<std::int64_t>(registry.size());
            fen.add(registry.size(), w);
            registry.push_back(v);
            weight_total += w;
            for (std::int32_t u : graph.neighbors(v)) {
                if (u == v || state[u] != VertexState::Infective) continue;
                fen.add(slot_of[u], -1);
                s_val[u] -= 1;
                weight_total -= 1;
            }
        } else {
            const std::size_t slot = rng.below(icount);
            const std::int32_t v = registry[slot];
            state[v] = VertexState::Recovered;
            weight_total -= s_val[v];
            const std::size_t last = icount - 1;
            const std::int64_t w_last = s_val[registry[last]];
            fen.add(slot, w_last - s_val[v]);
            if (slot != last) {
                registry[slot] = registry[last];
                slot_of[registry[slot]] = static_cast<std::int64_t>(slot);
            }
            fen.add(last, -w_last);
            registry.pop_back();
            slot_of[v] = -1;
        }
        out.duration = t;
    }
    return out;
}

namespace {

struct PairingEngine {
    const DegreeConfiguration& config;
    PhiloxRng& rng;
    const std::vector<double>* grid = nullptr;
    TrajectoryRecord* record = nullptr;

    struct HalfEdge {
        std::int32_t vertex;
        bool consumed;
        std::int64_t pool_pos;
    };
    struct Vertex {
        std::int32_t free_count;
        bool recovered;
    };

    std::vector<HalfEdge> hes;
    std::vector<std::int64_t> pool; // unconsumed materialized half-edges
    std::vector<Vertex> verts;      // touched vertices only
    // min-heaps keyed by event time; pairing entries are lazily deleted when
    // their half-edge was consumed as somebody's partner in the meantime
    using Event = std::pair<double, std::int64_t>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> fire_queue;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> recovery_queue;

    std::vector<std::int64_t> u_s; // untouched susceptible vertices by degree
    std::vector<std::int64_t> u_r; // untouched recovered vertices by degree
    std::int64_t xs = 0;           // free half-edges on untouched susceptibles
    std::int64_t xr_untouched = 0;
    std::int64_t xi_free = 0;    // free half-edges on infective touched vertices
    std::int64_t xr_touched = 0; // free half-edges on recovered touched vertices
    std::size_t grid_idx = 0;

    EpidemicOutcome out;

    std::int64_t add_half_edge(std::int32_t vertex) {
        const std::int64_t id = static_cast<std::int64_t>(hes.size());
        hes.push_back({vertex, false, static_cast<std::int64_t>(pool.size())});
        pool.push_back(id);
        return id;
    }

    void consume(std::int64_t id) {
        HalfEdge& he = hes[id];
        he.consumed = true;
        const std::int64_t moved = pool.back();
        pool[he.pool_pos] = moved;
        hes[moved].pool_pos = he.pool_pos;
        pool.pop_back();
        Vertex& vr = verts[he.vertex];
        vr.free_count -= 1;
        if (vr.recovered) xr_touched -= 1; else xi_free -= 1;
    }

    void materialize_infective(int degree, double now, bool initial) {
        const auto vid = static_cast<std::int32_t>(verts.size());
        verts.push_back({static_cast<std::int32_t>(degree), false});
        xi_free += degree;
        const double recovery_at = now + rng.exponential(config.rho);
        if (record != nullptr && recovery_at < kInf) recovery_queue.emplace(recovery_at, vid);
        for (int j = 0; j < degree; ++j) {
            const double fire_at = now + rng.exponential(config.beta);
            const std::int64_t id = add_half_edge(vid);
            if (fire_at < recovery_at) {
                fire_queue.emplace(fire_at, id);
                if (initial) out.z0_red += 1;
            }
        }
    }

    void snapshot_until(double t_next) {
        if (record == nullptr) return;
        while (grid_idx < grid->size() && (*grid)[grid_idx] < t_next) {
            record->s_k.push_back(u_s);
            record->x_s.push_back(xs);
            record->x_i.push_back(xi_free);
            record->x_r.push_back(xr_touched + xr_untouched);
            ++grid_idx;
        }
    }

    EpidemicOutcome run() {
        config.validate();
        out.z0_red = 0;
        u_s = config.n_s;
        u_r = config.n_r;
        const std::size_t degs =
            std::max({config.n_i.size(), config.n_s.size(), config.n_r.size()});
        u_s.resize(degs, 0);
        u_r.resize(degs, 0);
        xs = weighted_degree_sum(u_s);
        xr_untouched = weighted_degree_sum(u_r);
        if (record != nullptr) {
            record->grid = *grid;
            record->s_k.reserve(grid->size());
        }

        // all initially infective vertices are materialized up front; their
        // half-edge clocks determine the initial red set
        for (std::size_t k = 0; k < config.n_i.size(); ++k)
            for (std::int64_t c = 0; c < config.n_i[k]; ++c)
                materialize_infective(static_cast<int>(k), 0.0, true);

        for (;;) {
            while (!fire_queue.empty() && hes[fire_queue.top().second].consumed)
                fire_queue.pop();
            const double t_fire = fire_queue.empty() ? kInf : fire_queue.top().first;
            const double t_rec = recovery_queue.empty() ? kInf : recovery_queue.top().first;
            if (t_fire == kInf && t_rec == kInf) break;
            if (record != nullptr && fire_queue.empty() && grid_idx >= grid->size()) break;
            const double t_next = std::min(t_fire, t_rec);
            snapshot_until(t_next);
            if (t_rec < t_fire) {
                const auto vid = static_cast<std::int32_t>(recovery_queue.top().second);
                recovery_queue.pop();
                Vertex& vr = verts[vid];
                vr.recovered = true;
                xi_free -= vr.free_count;
                xr_touched += vr.free_count;
                continue;
            }

            const std::int64_t initiator = fire_queue.top().second;
            const double now = t_fire;
            fire_queue.pop();
            consume(initiator);
            const std::int64_t x_rest = static_cast<std::int64_t>(pool.size()) + xs + xr_untouched;
            assert(x_rest >= 1);
            std::int64_t r = static_cast<std::int64_t>(rng.below(x_rest));
            if (r < static_cast<std::int64_t>(pool.size())) {
                consume(pool[r]);
            } else {
                r -= static_cast<std::int64_t>(pool.size());
                bool placed = false;
                for (std::size_t k = 1; k < u_s.size() && !placed; ++k) {
                    const std::int64_t width = static_cast<std::int64_t>(k) * u_s[k];
                    if (r < width) {
                        // new infection: the struck half-edge is consumed by the
                        // pairing, the other k-1 go free on a fresh infective
                        u_s[k] -= 1;
                        xs -= static_cast<std::int64_t>(k);
                        out.final_size += 1;
                        out.final_size_by_degree[static_cast<int>(k)] += 1;
                        out.last_infection_time = now;
                        materialize_infective(static_cast<int>(k) - 1, now, false);
                        placed = true;
                        break;
                    }
                    r -= width;
                }
                if (!placed) {
                    for (std::size_t k = 1; k < u_r.size(); ++k) {
                        const std::int64_t width = static_cast<std::int64_t>(k) * u_r[k];
                        if (r < width) {
                            u_r[k] -= 1;
                            xr_untouched -= static_cast<std::int64_t>(k);
                            const auto vid = static_cast<std::int32_t>(verts.size());
                            verts.push_back({static_cast<std::int32_t>(k) - 1, true});
                            xr_touched += static_cast<std::int64_t>(k) - 1;
                            for (std::size_t j = 1; j < k; ++j) add_half_edge(vid);
                            break;
                        }
                        r -= width;
                    }
                }
            }
            out.pairing_events += 1;
            out.duration = now;
        }
        snapshot_until(kInf);
        return out;
    }
};

} // namespace

EpidemicOutcome run_pairing_dynamic(const DegreeConfiguration& config, PhiloxRng& rng) {
    PairingEngine engine{config, rng};
    return engine.run();
}

EpidemicOutcome run_pairing_dynamic(const DegreeConfiguration& config, PhiloxRng& rng,
                                    const std::vector<double>& grid,
                                    TrajectoryRecord& record) {
    PairingEngine engine{config, rng, &grid, &record};
    return engine.run();
}

namespace {

struct TimeChangedEngine {
    const DegreeConfiguration& config;
    PhiloxRng& rng;
    const std::vector<double>& grid;
    TrajectoryRecord& record;

    struct Vertex {
        std::int32_t free_count; // half-edges of this vertex still in the infective pool
        bool recovered;
    };

    std::vector<Vertex> verts;
    std::vector<std::int32_t> pool_inf; // owner vertex per materialized infective half-edge
    std::vector<std::int32_t> registry; // infective vertices, for recovery picks
    std::vector<std::int64_t> u_s, u_r;
    std::int64_t xs = 0, xr_untouched = 0, xr_pool = 0;
    std::int64_t x_i = 0; // live entries in pool_inf (recovered owners are stale)
    std::size_t grid_idx = 0;

    EpidemicOutcome out;

    //! Uniform position among pool entries whose owner is still infective;
    //! stale entries found on the way are discarded, which keeps the pick
    //! uniform and the cleanup amortized against their creation.
    std::size_t pick_infective_half_edge() {
        for (;;) {
            const std::size_t pos = rng.below(pool_inf.size());
            if (!verts[pool_inf[pos]].recovered) return pos;
            pool_inf[pos] = pool_inf.back();
            pool_inf.pop_back();
        }
    }

    void consume_infective(std::size_t pos) {
        verts[pool_inf[pos]].free_count -= 1;
        pool_inf[pos] = pool_inf.back();
        pool_inf.pop_back();
        x_i -= 1;
    }

    void infect(int degree) {
        const auto vid = static_cast<std::int32_t>(verts.size());
        verts.push_back({static_cast<std::int32_t>(degree) - 1, false});
        registry.push_back(vid);
        for (int j = 1; j < degree; ++j) pool_inf.push_back(vid);
        x_i += degree - 1;
    }

    void snapshot_until(double t_next) {
        while (grid_idx < grid.size() && grid[grid_idx] < t_next) {
            record.s_k.push_back(u_s);
            record.x_s.push_back(xs);
            record.x_i.push_back(x_i);
            record.x_r.push_back(xr_pool + xr_untouched);
            ++grid_idx;
        }
    }

    std::pair<EpidemicOutcome, TrajectoryRecord> run() {
        config.validate();
        u_s = config.n_s;
        u_r = config.n_r;
        const std::size_t degs =
            std::max({config.n_i.size(), config.n_s.size(), config.n_r.size()});
        u_s.resize(degs, 0);
        u_r.resize(degs, 0);
        xs = weighted_degree_sum(u_s);
        xr_untouched = weighted_degree_sum(u_r);
        record.grid = grid;
        record.s_k.reserve(grid.size());

        for (std::size_t k = 0; k < config.n_i.size(); ++k)
            for (std::int64_t c = 0; c < config.n_i[k]; ++c) {
                const auto vid = static_cast<std::int32_t>(verts.size());
                verts.push_back({static_cast<std::int32_t>(k), false});
                registry.push_back(vid);
                for (std::size_t j = 0; j < k; ++j) pool_inf.push_back(vid);
                x_i += static_cast<std::int64_t>(k);
            }

        double tau = 0.0;
        out.time_changed_clock = true;
        while (x_i > 0) {
            const std::int64_t x = x_i + xs + xr_pool + xr_untouched;
            assert(x >= 2);
            const double rate_pair = static_cast<double>(x - 1);
            const double rate_rec =
                config.rho > 0.0 && !registry.empty()
                    ? config.rho * static_cast<double>(registry.size()) * rate_pair /
                          (config.beta * static_cast<double>(x_i))
                    : 0.0;
            const double total = rate_pair + rate_rec;
            const double t_next = tau + rng.exponential(total);
            snapshot_until(t_next);
            tau = t_next;
            const bool pairing =
                rate_rec <= 0.0 || total * rng.next_double() < rate_pair;
            if (!pairing) {
                const std::size_t slot = rng.below(registry.size());
                Vertex& vr = verts[registry[slot]];
                vr.recovered = true;
                xr_pool += vr.free_count;
                x_i -= vr.free_count;
                vr.free_count = 0;
                registry[slot] = registry.back();
                registry.pop_back();
                continue;
            }
            consume_infective(pick_infective_half_edge());
            std::int64_t r = static_cast<std::int64_t>(rng.below(x - 1));
            if (r < x_i) {
                consume_infective(pick_infective_half_edge());
            } else {
                r -= x_i;
                if (r < xs) {
                    for (std::size_t k = 1; k < u_s.size(); ++k) {
                        const std::int64_t width = static_cast<std::int64_t>(k) * u_s[k];
                        if (r < width) {
                            u_s[k] -= 1;
                            xs -= static_cast<std::int64_t>(k);
                            out.final_size += 1;
                            out.final_size_by_degree[static_cast<int>(k)] += 1;
                            out.last_infection_time = tau;
                            infect(static_cast<int>(k));
                            break;
                        }
                        r -= width;
                    }
                } else {
                    r -= xs;
                    if (r < xr_pool) {
                        xr_pool -= 1;
                    } else {
                        r -= xr_pool;
                        for (std::size_t k = 1; k < u_r.size(); ++k) {
                            const std::int64_t width = static_cast<std::int64_t>(k) * u_r[k];
                            if (r < width) {
                                u_r[k] -= 1;
                                xr_untouched -= static_cast<std::int64_t>(k);
                                xr_pool += static_cast<std::int64_t>(k) - 1;
                                break;
                            }
                            r -= width;
                        }
                    }
                }
            }
            out.pairing_events += 1;
        }
        out.duration = tau;
        snapshot_until(kInf);
        return {out, std::move(record)};
    }
};

} // namespace

std::pair<EpidemicOutcome, TrajectoryRecord>
run_time_changed(const DegreeConfiguration& config, PhiloxRng& rng,
                 const std::vector<double>& grid) {
    TrajectoryRecord record;
    TimeChangedEngine engine{config, rng, grid, record};
    return engine.run();
}

DeterministicTrajectories deterministic_trajectories(const DegreeConfiguration& config,
                                                     const std::vector<double>& grid) {
    if (config.count_recovered() > 0)
        throw Error(Errc::UnsupportedInitialRecovered,
                    "deterministic curves assume nobody starts recovered");
    const double all_half_edges = static_cast<double>(config.total_degree());
    DeterministicTrajectories traj;
    traj.f_s.reserve(grid.size());
    traj.f_r.reserve(grid.size());
    traj.f_i.reserve(grid.size());
    for (double t : grid) {
        double fs = 0.0;
        for (std::size_t k = 1; k < config.n_s.size(); ++k)
            fs += static_cast<double>(k) * static_cast<double>(config.n_s[k]) *
                  std::exp(-static_cast<double>(k) * t);
        const double fr = config.rho / config.beta * std::exp(-t) * (-std::expm1(-t)) *
                          all_half_edges;
        const double fi = std::exp(-2.0 * t) * all_half_edges - fs - fr;
        traj.f_s.push_back(fs);
        traj.f_r.push_back(fr);
        traj.f_i.push_back(fi);
    }
    return traj;
}

int sample_Y(int k, double beta, double rho, PhiloxRng& rng) {
    if (k < 1) throw Error(Errc::BadConfig, "degree must be at least 1");
    if (beta <= 0.0) throw Error(Errc::BadConfig, "beta must be positive");
    if (rho <= 0.0) return k - 1;
    const double tau = rng.exponential(rho);
    const double p = -std::expm1(-beta * tau);
    return sample_binomial(rng, k - 1, p);
}

} // namespace nearsir
