#pragma once

#include <queue>

#include "singlab/sampled_space.hpp"

namespace singlab {

/// Path in the graph with cumulative base and conformal lengths per prefix.
struct GeodesicPath {
    std::vector<Index> vertices;
    std::vector<double> prefix_g;    // prefix_g[i] = base length of vertices[0..i]
    std::vector<double> prefix_rho;  // conformal counterpart

    std::size_t steps() const { return vertices.empty() ? 0 : vertices.size() - 1; }
    double length_g() const { return prefix_g.empty() ? 0 : prefix_g.back(); }
    double length_rho() const { return prefix_rho.empty() ? 0 : prefix_rho.back(); }

    // minimum of the two subarc base lengths at an interior station
    double l_min_g(std::size_t i) const {
        return std::min(prefix_g[i], length_g() - prefix_g[i]);
    }

    Index front() const { return vertices.front(); }
    Index back() const { return vertices.back(); }
};

struct DistanceMap {
    std::vector<double> dist;
    std::vector<Index> parent;

    double at(Index v) const { return dist[static_cast<std::size_t>(v)]; }
};

// Dijkstra with deterministic tie-breaking: equal-length alternatives keep the
// smaller parent id, and the queue orders (dist, vertex id).
template <class WeightFn>
DistanceMap dijkstra(const SampledSpace& sp, const std::vector<Index>& sources, WeightFn weight) {
    const std::size_t n = static_cast<std::size_t>(sp.size());
    DistanceMap dm;
    dm.dist.assign(n, kInf);
    dm.parent.assign(n, -1);
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (Index s : sources) {
        require(s >= 0 && s < sp.size(), "dijkstra source out of range");
        dm.dist[static_cast<std::size_t>(s)] = 0;
        pq.push({0.0, s});
    }
    while (!pq.empty()) {
        const auto [du, u] = pq.top();
        pq.pop();
        if (du > dm.dist[static_cast<std::size_t>(u)]) continue;
        for (const auto& [v, len] : sp.neighbors(u)) {
            const double alt = du + weight(u, v, len);
            const std::size_t vi = static_cast<std::size_t>(v);
            if (alt < dm.dist[vi]) {
                dm.dist[vi] = alt;
                dm.parent[vi] = u;
                pq.push({alt, v});
            } else if (alt == dm.dist[vi] && dm.parent[vi] >= 0 && u < dm.parent[vi]) {
                dm.parent[vi] = u;
            }
        }
    }
    return dm;
}

inline double base_weight(Index, Index, double len) { return len; }

// Trapezoid-rule conformal edge weight: (rho(u)+rho(v))/2 * l_g.
template <class Density>
double conformal_weight(const Density& d, Index u, Index v, double len) {
    return 0.5 * (d.rho_at(u) + d.rho_at(v)) * len;
}

inline DistanceMap base_distance_map(const SampledSpace& sp, const std::vector<Index>& sources) {
    return dijkstra(sp, sources, base_weight);
}

inline DistanceMap base_distance_map(const SampledSpace& sp, Index source) {
    return base_distance_map(sp, std::vector<Index>{source});
}

template <class Density>
DistanceMap conformal_distance_map(const SampledSpace& sp, const Density& d,
                                   const std::vector<Index>& sources) {
    return dijkstra(sp, sources,
                    [&](Index u, Index v, double len) { return conformal_weight(d, u, v, len); });
}

template <class Density>
DistanceMap conformal_distance_map(const SampledSpace& sp, const Density& d, Index source) {
    return conformal_distance_map(sp, d, std::vector<Index>{source});
}

inline double base_distance(const SampledSpace& sp, Index x, Index y) {
    const auto dm = base_distance_map(sp, x);
    const double d = dm.at(y);
    require(std::isfinite(d), "vertices lie in different components");
    return d;
}

template <class Density>
double conformal_distance(const SampledSpace& sp, const Density& d, Index x, Index y) {
    const auto dm = conformal_distance_map(sp, d, x);
    const double v = dm.at(y);
    require(std::isfinite(v), "vertices lie in different components");
    return v;
}

// Extracts the path x -> y from a parent map rooted at x and fills in both
// cumulative lengths.
template <class Density>
GeodesicPath extract_path(const SampledSpace& sp, const Density& d, const DistanceMap& dm,
                          Index x, Index y) {
    require(std::isfinite(dm.at(y)), "target unreachable from source");
    std::vector<Index> rev{y};
    Index cur = y;
    while (cur != x) {
        cur = dm.parent[static_cast<std::size_t>(cur)];
        require(cur >= 0, "broken parent chain");
        rev.push_back(cur);
    }
    GeodesicPath p;
    p.vertices.assign(rev.rbegin(), rev.rend());
    p.prefix_g.resize(p.vertices.size(), 0);
    p.prefix_rho.resize(p.vertices.size(), 0);
    for (std::size_t i = 1; i < p.vertices.size(); ++i) {
        const Index a = p.vertices[i - 1], b = p.vertices[i];
        double len = -1;
        for (const auto& [nb, l] : sp.neighbors(a))
            if (nb == b) {
                len = l;
                break;
            }
        require(len > 0, "path edge missing from graph");
        p.prefix_g[i] = p.prefix_g[i - 1] + len;
        p.prefix_rho[i] = p.prefix_rho[i - 1] + conformal_weight(d, a, b, len);
    }
    return p;
}

/// d_rho-geodesic between two vertices; realizes conformal_distance(x,y).
template <class Density>
GeodesicPath geodesic_between(const SampledSpace& sp, const Density& d, Index x, Index y) {
    const auto dm = conformal_distance_map(sp, d, x);
    return extract_path(sp, d, dm, x, y);
}

// Vertices within a base-length radius of v (closed ball, always contains v).
inline std::vector<Index> base_ball(const SampledSpace& sp, Index v, double radius) {
    const auto dm = base_distance_map(sp, v);
    std::vector<Index> out;
    for (Index u = 0; u < sp.size(); ++u)
        if (dm.at(u) <= radius) out.push_back(u);
    return out;
}

}  // namespace singlab
