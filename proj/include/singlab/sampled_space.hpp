#pragma once

#include <array>
#include <fstream>
#include <sstream>
#include <utility>

#include "singlab/common.hpp"

namespace singlab {

/// Weighted metric graph discretizing a singular space H \ Sigma or a domain.
/// Sigma is kept off-graph as a separate sample set: paths may come arbitrarily
/// close to it, but densities blow up there, so no infimum is lost.
class SampledSpace {
  public:
    struct Edge {
        Index u, v;
        double length;  // g_H length, > 0
    };

    Index add_vertex(std::vector<double> coords, bool boundary = false) {
        coords_.push_back(std::move(coords));
        boundary_.push_back(boundary);
        adj_.emplace_back();
        return static_cast<Index>(coords_.size() - 1);
    }

    void add_edge(Index u, Index v, double length) {
        require(u >= 0 && v >= 0 && u < size() && v < size(), "edge endpoint out of range");
        require(u != v, "self-loop edge");
        require(length > 0 && std::isfinite(length), "edge length must be positive and finite");
        adj_[static_cast<std::size_t>(u)].push_back({v, length});
        adj_[static_cast<std::size_t>(v)].push_back({u, length});
        edges_.push_back({u, v, length});
    }

    void add_sigma_sample(std::vector<double> point) { sigma_.push_back(std::move(point)); }

    void set_basepoint(Index v) {
        require(v >= 0 && v < size(), "basepoint out of range");
        basepoint_ = v;
    }

    Index size() const { return static_cast<Index>(coords_.size()); }
    Index basepoint() const { return basepoint_; }
    const std::vector<double>& coords(Index v) const { return coords_[static_cast<std::size_t>(v)]; }
    const std::vector<std::pair<Index, double>>& neighbors(Index v) const {
        return adj_[static_cast<std::size_t>(v)];
    }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::vector<double>>& sigma_samples() const { return sigma_; }
    bool is_boundary(Index v) const { return boundary_[static_cast<std::size_t>(v)]; }

    std::vector<Index> boundary_vertices() const {
        std::vector<Index> out;
        for (Index v = 0; v < size(); ++v)
            if (is_boundary(v)) out.push_back(v);
        return out;
    }

    double dist_to_sigma(Index v) const {
        require(!sigma_.empty(), "space has no sigma samples");
        double best = kInf;
        for (const auto& s : sigma_) best = std::min(best, dist(coords(v), s));
        return best;
    }

    // Checks the structural invariants: positive finite edges, connectivity of
    // the non-boundary part, and Sigma disjoint from the vertex set.
    void validate() const {
        require(size() >= 2, "degenerate space: fewer than two vertices");
        for (const auto& e : edges_)
            require(e.length > 0 && std::isfinite(e.length), "invalid edge length");
        require(interior_connected(), "graph restricted to non-boundary vertices is disconnected");
        for (Index v = 0; v < size(); ++v) {
            for (const auto& s : sigma_)
                require(dist(coords(v), s) > 0, "sigma sample coincides with a vertex");
        }
    }

    bool interior_connected() const {
        Index start = -1;
        Index interior_count = 0;
        for (Index v = 0; v < size(); ++v) {
            if (!is_boundary(v)) {
                if (start < 0) start = v;
                ++interior_count;
            }
        }
        if (interior_count == 0) return false;
        std::vector<char> seen(static_cast<std::size_t>(size()), 0);
        std::vector<Index> stack{start};
        seen[static_cast<std::size_t>(start)] = 1;
        Index reached = 0;
        while (!stack.empty()) {
            Index v = stack.back();
            stack.pop_back();
            ++reached;
            for (const auto& [u, len] : neighbors(v)) {
                (void)len;
                if (!seen[static_cast<std::size_t>(u)] && !is_boundary(u)) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    stack.push_back(u);
                }
            }
        }
        return reached == interior_count;
    }

    // Rough g_H diameter proxy: max pairwise Euclidean distance over a coarse
    // vertex subsample. Used for divergence thresholds in ray tracing.
    double diameter_estimate() const {
        const Index n = size();
        const Index step = std::max<Index>(1, n / 64);
        double best = 0;
        for (Index a = 0; a < n; a += step)
            for (Index b = a + step; b < n; b += step)
                best = std::max(best, dist(coords(a), coords(b)));
        return best;
    }

    // --- text format ---
    // One record per line:
    //   V id x1 ... xk        vertex with ambient coordinates
    //   E id1 id2 length      edge with g_H length
    //   S x1 ... xk           Sigma sample (off-graph)
    //   B id                  domain-boundary marker
    //   P id                  basepoint
    void save(std::ostream& os) const {
        os.precision(17);
        for (Index v = 0; v < size(); ++v) {
            os << "V " << v;
            for (double c : coords(v)) os << ' ' << c;
            os << '\n';
        }
        for (const auto& e : edges_) os << "E " << e.u << ' ' << e.v << ' ' << e.length << '\n';
        for (const auto& s : sigma_) {
            os << "S";
            for (double c : s) os << ' ' << c;
            os << '\n';
        }
        for (Index v = 0; v < size(); ++v)
            if (is_boundary(v)) os << "B " << v << '\n';
        os << "P " << basepoint_ << '\n';
    }

    void save_file(const std::string& path) const {
        std::ofstream os(path);
        require(os.good(), "cannot open " + path + " for writing");
        save(os);
    }

    static SampledSpace load(std::istream& is) {
        SampledSpace sp;
        std::vector<std::tuple<Index, Index, double>> pending_edges;
        std::vector<Index> pending_boundary;
        Index pending_base = -1;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            std::istringstream ls(line);
            std::string tag;
            if (!(ls >> tag)) continue;
            if (tag == "V") {
                Index id;
                require(static_cast<bool>(ls >> id), "bad V record at line " + std::to_string(lineno));
                require(id == sp.size(), "vertex ids must be consecutive from 0");
                std::vector<double> c;
                double x;
                while (ls >> x) c.push_back(x);
                require(!c.empty(), "vertex without coordinates at line " + std::to_string(lineno));
                sp.add_vertex(std::move(c));
            } else if (tag == "E") {
                Index a, b;
                double len;
                require(static_cast<bool>(ls >> a >> b >> len),
                        "bad E record at line " + std::to_string(lineno));
                pending_edges.emplace_back(a, b, len);
            } else if (tag == "S") {
                std::vector<double> c;
                double x;
                while (ls >> x) c.push_back(x);
                require(!c.empty(), "empty S record at line " + std::to_string(lineno));
                sp.add_sigma_sample(std::move(c));
            } else if (tag == "B") {
                Index id;
                require(static_cast<bool>(ls >> id), "bad B record at line " + std::to_string(lineno));
                pending_boundary.push_back(id);
            } else if (tag == "P") {
                require(static_cast<bool>(ls >> pending_base),
                        "bad P record at line " + std::to_string(lineno));
            } else if (tag[0] == '#') {
                continue;
            } else {
                fail("unknown record '" + tag + "' at line " + std::to_string(lineno));
            }
        }
        for (auto& [a, b, len] : pending_edges) sp.add_edge(a, b, len);
        for (Index id : pending_boundary) {
            require(id >= 0 && id < sp.size(), "boundary marker out of range");
            sp.boundary_[static_cast<std::size_t>(id)] = true;
        }
        if (pending_base >= 0) sp.set_basepoint(pending_base);
        return sp;
    }

    static SampledSpace load_file(const std::string& path) {
        std::ifstream is(path);
        require(is.good(), "cannot open " + path);
        return load(is);
    }

    // Vertex nearest to a coordinate tuple; handy for locating probe points.
    Index nearest_vertex(const std::vector<double>& p) const {
        Index best = 0;
        double bd = kInf;
        for (Index v = 0; v < size(); ++v) {
            const double d = sqdist(coords(v), p);
            if (d < bd) {
                bd = d;
                best = v;
            }
        }
        return best;
    }

  private:
    std::vector<std::vector<double>> coords_;
    std::vector<std::vector<std::pair<Index, double>>> adj_;
    std::vector<Edge> edges_;
    std::vector<std::vector<double>> sigma_;
    std::vector<char> boundary_;
    Index basepoint_ = 0;
};

}  // namespace singlab
