#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "ealab/disorder.hpp"
#include "ealab/gibbs.hpp"
#include "ealab/graph.hpp"
#include "ealab/lattice.hpp"

namespace ealab {

/// A set of dual edges of a torus.
class DualSubgraph {
public:
    explicit DualSubgraph(TorusGeometry geom)
        : geom_(geom), member_(static_cast<std::size_t>(geom.dual_edge_count()), 0) {}

    static DualSubgraph from_edges(TorusGeometry geom, std::span<const DualEdgeId> edges) {
        DualSubgraph g(geom);
        for (auto d : edges) g.insert(d);
        return g;
    }

    const TorusGeometry& geometry() const noexcept { return geom_; }

    bool contains(DualEdgeId d) const {
        geom_.check(d);
        return member_[static_cast<std::size_t>(index_of(d))] != 0;
    }
    void insert(DualEdgeId d) {
        geom_.check(d);
        auto& m = member_[static_cast<std::size_t>(index_of(d))];
        count_ += (m == 0);
        m = 1;
    }
    void erase(DualEdgeId d) {
        geom_.check(d);
        auto& m = member_[static_cast<std::size_t>(index_of(d))];
        count_ -= (m != 0);
        m = 0;
    }

    std::size_t edge_count() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }

    /// Member edges in increasing id order.
    std::vector<DualEdgeId> edges() const {
        std::vector<DualEdgeId> out;
        out.reserve(count_);
        for (std::size_t d = 0; d < member_.size(); ++d)
            if (member_[d]) out.push_back(DualEdgeId{static_cast<std::int32_t>(d)});
        return out;
    }

    /// Number of member edges incident to dual vertex p.
    int degree(DualVertexId p) const {
        int k = 0;
        for (auto d : geom_.dual_incident_edges(p)) k += contains(d);
        return k;
    }

    bool is_subset_of(const DualSubgraph& other) const {
        if (geom_ != other.geom_) return false;
        for (std::size_t d = 0; d < member_.size(); ++d)
            if (member_[d] && !other.member_[d]) return false;
        return true;
    }

    friend bool operator==(const DualSubgraph& a, const DualSubgraph& b) {
        return a.geom_ == b.geom_ && a.member_ == b.member_;
    }

private:
    TorusGeometry geom_;
    std::vector<char> member_;
    std::size_t count_ = 0;
};

/// The subgraph as a SimpleGraph on its non-isolated dual vertices.
struct DualGraphView {
    SimpleGraph graph;
    std::vector<DualVertexId> vertices;  // local index -> dual vertex
    std::vector<int> local;              // dual vertex -> local index or -1
};

inline DualGraphView graph_view(const DualSubgraph& sub) {
    const auto& g = sub.geometry();
    DualGraphView view;
    view.local.assign(static_cast<std::size_t>(g.dual_vertex_count()), -1);
    auto local_of = [&](DualVertexId p) {
        auto& slot = view.local[static_cast<std::size_t>(index_of(p))];
        if (slot < 0) {
            slot = view.graph.add_vertex();
            view.vertices.push_back(p);
        }
        return slot;
    };
    for (auto d : sub.edges()) {
        const auto [a, b] = g.dual_endpoints(d);
        const int la = local_of(a);
        const int lb = local_of(b);
        view.graph.add_edge(la, lb, index_of(d));
    }
    return view;
}

/// Dual edges e* with w_e sigma_i sigma_j < 0. A zero product counts as satisfied.
inline DualSubgraph unsatisfied_set(const Couplings& w, const SpinConfig& s) {
    detail::require_same_geometry(w, s);
    const auto& g = w.geometry();
    DualSubgraph out(g);
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto [a, b] = g.endpoints(EdgeId{e});
        if (w.at_index(static_cast<std::size_t>(e)) * s.at_index(static_cast<std::size_t>(index_of(a))) *
                s.at_index(static_cast<std::size_t>(index_of(b))) <
            0.0)
            out.insert(g.dual_edge(EdgeId{e}));
    }
    return out;
}

/// True iff the product of the four couplings around p is negative.
inline bool plaquette_frustrated(const Couplings& w, PlaquetteId p) {
    double product = 1.0;
    for (auto e : w.geometry().plaquette_edges(p)) product *= w[e];
    return product < 0.0;
}

inline double frustrated_fraction(const Couplings& w) {
    const auto& g = w.geometry();
    int n = 0;
    for (int p = 0; p < g.plaquette_count(); ++p) n += plaquette_frustrated(w, PlaquetteId{p});
    return static_cast<double>(n) / g.plaquette_count();
}

struct ComponentSummary {
    std::vector<int> labels;                  // per dual vertex; -1 when no member edge touches it
    std::vector<int> vertex_sizes;            // per component, in dual vertices
    std::vector<int> edge_sizes;              // per component, in dual edges
    std::map<int, int> vertex_histogram;      // size -> number of components
    std::map<int, int> edge_histogram;
    int largest_vertices = 0;
    int largest_edges = 0;

    std::size_t count() const noexcept { return vertex_sizes.size(); }
};

/// Connected components of the member edges, by union-find.
inline ComponentSummary components(const DualSubgraph& sub) {
    const auto& g = sub.geometry();
    const auto n = static_cast<std::size_t>(g.dual_vertex_count());
    UnionFind uf(n);
    std::vector<char> touched(n, 0);
    const auto edges = sub.edges();
    for (auto d : edges) {
        const auto [a, b] = g.dual_endpoints(d);
        touched[static_cast<std::size_t>(index_of(a))] = 1;
        touched[static_cast<std::size_t>(index_of(b))] = 1;
        uf.unite(static_cast<std::size_t>(index_of(a)), static_cast<std::size_t>(index_of(b)));
    }
    ComponentSummary out;
    out.labels.assign(n, -1);
    std::vector<int> root_label(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        if (!touched[p]) continue;
        const auto r = uf.find(p);
        if (root_label[r] < 0) {
            root_label[r] = static_cast<int>(out.vertex_sizes.size());
            out.vertex_sizes.push_back(0);
            out.edge_sizes.push_back(0);
        }
        out.labels[p] = root_label[r];
        ++out.vertex_sizes[static_cast<std::size_t>(root_label[r])];
    }
    for (auto d : edges) {
        const auto a = g.dual_endpoints(d)[0];
        ++out.edge_sizes[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(index_of(a))])];
    }
    for (std::size_t c = 0; c < out.vertex_sizes.size(); ++c) {
        ++out.vertex_histogram[out.vertex_sizes[c]];
        ++out.edge_histogram[out.edge_sizes[c]];
        out.largest_vertices = std::max(out.largest_vertices, out.vertex_sizes[c]);
        out.largest_edges = std::max(out.largest_edges, out.edge_sizes[c]);
    }
    return out;
}

}  // namespace ealab
