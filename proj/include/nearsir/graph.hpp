#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace nearsir {

//! Undirected multigraph with prescribed degrees. Loops are stored as (v,v)
//! and count 2 toward v's degree; parallel edges appear once per copy.
//! Immutable after construction; adjacency is CSR so neighbour scans are
//! cache-friendly at n up to 10^7.
class Multigraph {
public:
    Multigraph(std::int64_t n, std::vector<std::pair<std::int32_t, std::int32_t>> edges);

    std::int64_t vertex_count() const { return n_; }
    std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }

    int degree(std::int64_t v) const {
        return static_cast<int>(offsets_[v + 1] - offsets_[v]);
    }

    //! Neighbour list of v, one entry per incident half-edge pair: a loop at v
    //! contributes v twice, a parallel edge once per copy.
    std::span<const std::int32_t> neighbors(std::int64_t v) const {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }

    const std::vector<std::pair<std::int32_t, std::int32_t>>& edges() const { return edges_; }

    bool is_simple() const;

    //! Line-oriented text dump: header "n m", then one "u v" per edge in
    //! construction order (deterministic, so dumps hash stably).
    void dump(std::ostream& os) const;
    static Multigraph load(std::istream& is);

private:
    std::int64_t n_;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges_;
    std::vector<std::int64_t> offsets_;
    std::vector<std::int32_t> adjacency_;
};

} // namespace nearsir
