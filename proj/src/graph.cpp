#include "nearsir/graph.hpp"

#include <istream>
#include <ostream>
#include <unordered_set>

#include "nearsir/errors.hpp"

namespace nearsir {

Multigraph::Multigraph(std::int64_t n,
                       std::vector<std::pair<std::int32_t, std::int32_t>> edges)
    : n_(n), edges_(std::move(edges)) {
    offsets_.assign(n_ + 1, 0);
    for (const auto& [u, v] : edges_) {
        ++offsets_[u + 1];
        ++offsets_[v + 1];
    }
    for (std::int64_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_[n_]);
    std::vector<std::int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges_) {
        adjacency_[cursor[u]++] = v;
        adjacency_[cursor[v]++] = u;
    }
}

bool Multigraph::is_simple() const {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges_.size() * 2);
    for (const auto& [u, v] : edges_) {
        if (u == v) return false;
        const auto a = static_cast<std::uint64_t>(std::min(u, v));
        const auto b = static_cast<std::uint64_t>(std::max(u, v));
        if (!seen.insert((a << 32) | b).second) return false;
    }
    return true;
}

void Multigraph::dump(std::ostream& os) const {
    os << n_ << ' ' << edges_.size() << '\n';
    for (const auto& [u, v] : edges_) os << u << ' ' << v << '\n';
}

Multigraph Multigraph::load(std::istream& is) {
    std::int64_t n = 0, m = 0;
    if (!(is >> n >> m) || n < 0 || m < 0)
        throw Error(Errc::BadConfig, "graph dump: bad header");
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    edges.reserve(m);
    for (std::int64_t i = 0; i < m; ++i) {
        std::int64_t u, v;
        if (!(is >> u >> v) || u < 0 || v < 0 || u >= n || v >= n)
            throw Error(Errc::BadConfig, "graph dump: bad edge line");
        edges.emplace_back(static_cast<std::int32_t>(u), static_cast<std::int32_t>(v));
    }
    return Multigraph(n, std::move(edges));
}

} // namespace nearsir
