#pragma once

// Window analysis of a dual forest on an L x L torus.
//
// A window is a hosted BoxGeometry [N]^2. The forest restricted to the window
// keeps the dual edges that cross box edges; it lives on the (N+1)^2 box dual
// vertices, whose outer ring is the window boundary. Bridges are the forest
// edges on boundary-to-boundary paths; they cut the box's primal vertices
// into regions, which are colored and flipped class by class.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ealab/disorder.hpp"
#include "ealab/error.hpp"
#include "ealab/frustration.hpp"
#include "ealab/gibbs.hpp"
#include "ealab/graph.hpp"
#include "ealab/lattice.hpp"

namespace ealab {

/// The forest restricted to a window, as a graph on all box dual vertices.
/// Graph edge ids are box dual edge ids.
struct WindowForest {
    BoxGeometry window;
    SimpleGraph graph;
};

inline WindowForest restrict_to_window(const DualSubgraph& f, const BoxGeometry& window) {
    if (!window.has_host()) throw ConfigError("analysis window must be embedded in a torus");
    if (window.host() != f.geometry()) throw ContractError("window host differs from the forest's torus");
    WindowForest wf{window, SimpleGraph(window.dual_vertex_count())};
    for (auto hd : f.edges()) {
        const auto d = window.from_host_dual_edge(hd);
        if (!d) continue;
        const auto [a, b] = window.dual_endpoints(*d);
        wf.graph.add_edge(index_of(a), index_of(b), index_of(*d));
    }
    return wf;
}

namespace detail {

inline void require_forest(const DualSubgraph& f) {
    if (!is_forest(graph_view(f).graph)) throw ContractError("input dual subgraph contains a cycle");
}

// Vertices surviving iterative removal of non-boundary leaves.
inline std::vector<char> prune_to_core(const WindowForest& wf) {
    const auto& g = wf.graph;
    const int n = g.vertex_count();
    std::vector<int> deg(static_cast<std::size_t>(n));
    std::vector<char> alive(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    for (int v = 0; v < n; ++v) {
        deg[static_cast<std::size_t>(v)] = g.degree(v);
        alive[static_cast<std::size_t>(v)] = deg[static_cast<std::size_t>(v)] > 0;
        if (deg[static_cast<std::size_t>(v)] == 1 && !wf.window.is_boundary_dual(DualVertexId{v})) stack.push_back(v);
    }
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (!alive[static_cast<std::size_t>(v)]) continue;
        alive[static_cast<std::size_t>(v)] = 0;
        for (const auto& inc : g.adjacent(v)) {
            const auto u = static_cast<std::size_t>(inc.to);
            if (!alive[u]) continue;
            if (--deg[u] == 1 && !wf.window.is_boundary_dual(DualVertexId{inc.to})) stack.push_back(inc.to);
            // A boundary vertex left with no edges stays in the core.
        }
    }
    return alive;
}

}  // namespace detail

struct BridgeDecomposition {
    BoxGeometry window;
    std::vector<DualEdgeId> bridges;          // box dual edge ids, sorted
    std::vector<int> region;                  // per box vertex
    int region_count = 0;
    std::vector<std::vector<int>> adjacency;  // sorted neighbour lists between regions
    std::vector<int> colors;                  // per region; empty until colored
    int color_count = 0;

    explicit BridgeDecomposition(BoxGeometry w) : window(w) {}

    /// Region members as host torus vertices.
    std::vector<VertexId> host_vertices(int r) const {
        std::vector<VertexId> out;
        for (int v = 0; v < window.vertex_count(); ++v)
            if (region[static_cast<std::size_t>(v)] == r) out.push_back(window.to_host(VertexId{v}));
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Forest edges in the window lying on some path between two boundary dual vertices.
inline BridgeDecomposition find_bridges(const DualSubgraph& f, const BoxGeometry& window) {
    detail::require_forest(f);
    const auto wf = restrict_to_window(f, window);
    const auto core = detail::prune_to_core(wf);
    BridgeDecomposition out(window);
    for (const auto& e : wf.graph.edges())
        if (core[static_cast<std::size_t>(e.u)] && core[static_cast<std::size_t>(e.v)]) out.bridges.push_back(DualEdgeId{e.id});
    std::sort(out.bridges.begin(), out.bridges.end());
    return out;
}

/// The bridge set as torus dual edges.
inline DualSubgraph bridge_subgraph(const BridgeDecomposition& d) {
    DualSubgraph s(d.window.host());
    for (auto b : d.bridges) s.insert(d.window.host_dual_edge(b));
    return s;
}

enum class TreeType { Finite, SingleArm, BiArm, MultiArm };

inline const char* to_string(TreeType t) {
    switch (t) {
        case TreeType::Finite: return "finite";
        case TreeType::SingleArm: return "single-arm";
        case TreeType::BiArm: return "bi-arm";
        case TreeType::MultiArm: return "multi-arm";
    }
    return "?";
}

struct WindowComponent {
    int vertices = 0;
    int edges = 0;
    int arms = 0;  // boundary dual vertices in the component
    int encounter_points = 0;
    TreeType type = TreeType::Finite;
};

struct TreeTypeReport {
    int window_side = 0;
    std::vector<WindowComponent> components;
    std::map<TreeType, int> type_counts;
    std::vector<DualVertexId> encounter_points;  // box dual vertices, sorted
    int encounter_bound = 0;                     // 4N - 4
    bool within_bound = true;
    std::map<int, int> behind_distance_histogram;  // distance to the bridge core -> vertex count
};

/// Encounter points: window dual vertices whose removal leaves at least three
/// boundary-reaching pieces of their tree. These are exactly the vertices of
/// degree >= 3 in the pruned core.
inline TreeTypeReport count_encounter_points(const DualSubgraph& f, const BoxGeometry& window) {
    detail::require_forest(f);
    const auto wf = restrict_to_window(f, window);
    const auto& g = wf.graph;
    const auto core = detail::prune_to_core(wf);
    TreeTypeReport rep;
    rep.window_side = window.side();
    rep.encounter_bound = 4 * window.side() - 4;

    std::vector<int> core_degree(static_cast<std::size_t>(g.vertex_count()), 0);
    for (const auto& e : g.edges())
        if (core[static_cast<std::size_t>(e.u)] && core[static_cast<std::size_t>(e.v)]) {
            ++core_degree[static_cast<std::size_t>(e.u)];
            ++core_degree[static_cast<std::size_t>(e.v)];
        }

    int count = 0;
    const auto label = component_labels(g, &count);
    std::vector<WindowComponent> comp(static_cast<std::size_t>(count));
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (g.degree(v) == 0) continue;
        auto& c = comp[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])];
        ++c.vertices;
        c.edges += g.degree(v);
        if (window.is_boundary_dual(DualVertexId{v})) ++c.arms;
        if (core_degree[static_cast<std::size_t>(v)] >= 3) {
            ++c.encounter_points;
            rep.encounter_points.push_back(DualVertexId{v});
        }
    }
    for (auto& c : comp) {
        if (c.vertices == 0) continue;  // isolated dual vertex
        c.edges /= 2;
        c.type = c.arms == 0 ? TreeType::Finite : c.arms == 1 ? TreeType::SingleArm : c.arms == 2 ? TreeType::BiArm : TreeType::MultiArm;
        ++rep.type_counts[c.type];
        rep.components.push_back(c);
    }
    rep.within_bound = static_cast<int>(rep.encounter_points.size()) <= rep.encounter_bound;

    // Distance from each vertex of a boundary-touching tree to that tree's core.
    std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()), -1);
    std::deque<int> queue;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (core[static_cast<std::size_t>(v)]) {
            dist[static_cast<std::size_t>(v)] = 0;
            queue.push_back(v);
        }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        ++rep.behind_distance_histogram[dist[static_cast<std::size_t>(v)]];
        for (const auto& inc : g.adjacent(v))
            if (dist[static_cast<std::size_t>(inc.to)] < 0) {
                dist[static_cast<std::size_t>(inc.to)] = dist[static_cast<std::size_t>(v)] + 1;
                queue.push_back(inc.to);
            }
    }
    return rep;
}

/// Regions of the window's primal vertices; a step across a box edge is
/// blocked iff the crossing dual edge is a bridge.
inline BridgeDecomposition decompose_regions(std::span<const DualEdgeId> bridges, const BoxGeometry& window) {
    BridgeDecomposition d(window);
    d.bridges.assign(bridges.begin(), bridges.end());
    std::sort(d.bridges.begin(), d.bridges.end());
    std::vector<char> blocked(static_cast<std::size_t>(window.edge_count()), 0);
    for (auto b : d.bridges) blocked[static_cast<std::size_t>(index_of(window.primal_edge(b)))] = 1;

    UnionFind uf(static_cast<std::size_t>(window.vertex_count()));
    for (int e = 0; e < window.edge_count(); ++e) {
        if (blocked[static_cast<std::size_t>(e)]) continue;
        const auto [a, b] = window.endpoints(EdgeId{e});
        uf.unite(static_cast<std::size_t>(index_of(a)), static_cast<std::size_t>(index_of(b)));
    }
    d.region.assign(static_cast<std::size_t>(window.vertex_count()), -1);
    std::vector<int> root_label(static_cast<std::size_t>(window.vertex_count()), -1);
    for (int v = 0; v < window.vertex_count(); ++v) {
        auto& r = root_label[uf.find(static_cast<std::size_t>(v))];
        if (r < 0) r = d.region_count++;
        d.region[static_cast<std::size_t>(v)] = r;
    }

    std::vector<std::set<int>> adj(static_cast<std::size_t>(d.region_count));
    for (auto b : d.bridges) {
        const auto [u, v] = window.endpoints(window.primal_edge(b));
        const int ru = d.region[static_cast<std::size_t>(index_of(u))];
        const int rv = d.region[static_cast<std::size_t>(index_of(v))];
        if (ru == rv) throw InvariantViolation("bridge edge does not separate two regions");
        adj[static_cast<std::size_t>(ru)].insert(rv);
        adj[static_cast<std::size_t>(rv)].insert(ru);
    }
    for (auto& s : adj) d.adjacency.emplace_back(s.begin(), s.end());
    return d;
}

inline BridgeDecomposition decompose_regions(const BridgeDecomposition& bridges) {
    return decompose_regions(bridges.bridges, bridges.window);
}

namespace detail {

inline bool two_color(const std::vector<std::vector<int>>& adj, std::vector<int>& color) {
    color.assign(adj.size(), -1);
    for (std::size_t s = 0; s < adj.size(); ++s) {
        if (color[s] >= 0) continue;
        color[s] = 0;
        std::deque<int> q{static_cast<int>(s)};
        while (!q.empty()) {
            const int v = q.front();
            q.pop_front();
            for (int u : adj[static_cast<std::size_t>(v)]) {
                auto& cu = color[static_cast<std::size_t>(u)];
                if (cu < 0) {
                    cu = 1 - color[static_cast<std::size_t>(v)];
                    q.push_back(u);
                } else if (cu == color[static_cast<std::size_t>(v)]) {
                    return false;
                }
            }
        }
    }
    return true;
}

// Swaps colors a and b on the Kempe chain through `start` among colored vertices.
inline void kempe_swap(const std::vector<std::vector<int>>& adj, std::vector<int>& color, int start, int a, int b) {
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : adj[static_cast<std::size_t>(v)]) {
            const int cu = color[static_cast<std::size_t>(u)];
            if (!seen[static_cast<std::size_t>(u)] && (cu == a || cu == b)) {
                seen[static_cast<std::size_t>(u)] = 1;
                stack.push_back(u);
            }
        }
    }
    for (std::size_t v = 0; v < adj.size(); ++v)
        if (seen[v]) color[v] = color[v] == a ? b : a;
}

// Smallest-last greedy with Kempe-chain recoloring; five colors suffice on planar graphs.
inline void five_color(const std::vector<std::vector<int>>& adj, std::vector<int>& color) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> deg(static_cast<std::size_t>(n));
    std::vector<char> removed(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) deg[static_cast<std::size_t>(v)] = static_cast<int>(adj[static_cast<std::size_t>(v)].size());
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        int best = -1;
        for (int v = 0; v < n; ++v)
            if (!removed[static_cast<std::size_t>(v)] && (best < 0 || deg[static_cast<std::size_t>(v)] < deg[static_cast<std::size_t>(best)]))
                best = v;
        removed[static_cast<std::size_t>(best)] = 1;
        order.push_back(best);
        for (int u : adj[static_cast<std::size_t>(best)])
            if (!removed[static_cast<std::size_t>(u)]) --deg[static_cast<std::size_t>(u)];
    }

    constexpr int kColors = 5;
    color.assign(static_cast<std::size_t>(n), -1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int v = *it;
        auto free_color = [&] {
            std::array<char, kColors> used{};
            for (int u : adj[static_cast<std::size_t>(v)])
                if (color[static_cast<std::size_t>(u)] >= 0) used[static_cast<std::size_t>(color[static_cast<std::size_t>(u)])] = 1;
            for (int c = 0; c < kColors; ++c)
                if (!used[static_cast<std::size_t>(c)]) return c;
            return -1;
        };
        int c = free_color();
        for (int a = 0; c < 0 && a < kColors; ++a)
            for (int b = a + 1; c < 0 && b < kColors; ++b) {
                // Recolor the (a,b)-chains through every a-colored neighbour.
                const auto saved = color;
                for (int u : adj[static_cast<std::size_t>(v)])
                    if (color[static_cast<std::size_t>(u)] == a) kempe_swap(adj, color, u, a, b);
                c = free_color();
                if (c < 0) color = saved;
            }
        if (c < 0) throw InvariantViolation("region adjacency graph is not five-colorable by Kempe recoloring");
        color[static_cast<std::size_t>(v)] = c;
    }
}

}  // namespace detail

inline constexpr int kMaxRegionColors = 5;

/// Proper coloring of the region adjacency graph: two colors whenever the
/// graph is bipartite, otherwise at most five.
inline void color_regions(BridgeDecomposition& d, int max_colors = kMaxRegionColors) {
    if (max_colors < 1) throw ValidationError("max_colors must be positive");
    if (!detail::two_color(d.adjacency, d.colors)) detail::five_color(d.adjacency, d.colors);
    d.color_count = d.colors.empty() ? 0 : *std::max_element(d.colors.begin(), d.colors.end()) + 1;
    if (d.color_count > max_colors)
        throw Error("region coloring needs " + std::to_string(d.color_count) + " colors, limit " +
                    std::to_string(max_colors));
}

/// True when no region is adjacent to one of its own color.
inline bool coloring_is_proper(const BridgeDecomposition& d) {
    if (d.colors.size() != static_cast<std::size_t>(d.region_count)) return false;
    for (auto b : d.bridges) {
        const auto [u, v] = d.window.endpoints(d.window.primal_edge(b));
        if (d.colors[static_cast<std::size_t>(d.region[static_cast<std::size_t>(index_of(u))])] ==
            d.colors[static_cast<std::size_t>(d.region[static_cast<std::size_t>(index_of(v))])])
            return false;
    }
    return true;
}

struct ColorClassFlip {
    int color = -1;                    // class with the most negative delta
    double delta = 0.0;                // H after flipping the class minus H before
    std::vector<double> class_deltas;  // per color
    std::vector<VertexId> flipped;     // host vertices of the chosen class
    double bridge_weight = 0.0;        // Y_N = |w|(bridges)
    double boundary_weight = 0.0;      // |w| over the window's exterior cut edges
    double boundary_signed = 0.0;      // sum of w sigma sigma over the exterior cut edges
    double identity_residual = 0.0;    // sum of class deltas minus 2 (boundary_signed - 2 Y_N)
    double five_color_bound = 0.0;     // -(4/5) Y_N + (2/5) |w|(boundary)

    /// 2 Y_N exceeds the boundary weight: some class flip must lower H.
    bool hypothesis_holds() const noexcept { return 2.0 * bridge_weight > boundary_weight; }
};

/// Computes the flip energy of every color class and picks the lowest.
/// Requires every bridge edge to be unsatisfied.
inline ColorClassFlip best_color_class_flip(const BridgeDecomposition& d, const Couplings& w, const SpinConfig& s) {
    const auto& box = d.window;
    if (!box.has_host() || box.host() != w.geometry()) throw ContractError("window host differs from the couplings' torus");
    detail::require_same_geometry(w, s);
    if (d.colors.size() != static_cast<std::size_t>(d.region_count)) throw ContractError("regions are not colored");

    auto bond = [&](EdgeId he) {
        const auto [a, b] = w.geometry().endpoints(he);
        return w[he] * s[a] * s[b];
    };
    ColorClassFlip out;
    for (auto b : d.bridges) {
        const EdgeId he = box.host_edge(box.primal_edge(b));
        if (!(bond(he) < 0.0)) throw ContractError("bridge edge " + std::to_string(index_of(b)) + " is satisfied");
        out.bridge_weight += std::abs(w[he]);
    }
    for (auto he : box.exterior_cut_edges()) {
        out.boundary_weight += std::abs(w[he]);
        out.boundary_signed += bond(he);
    }

    std::vector<std::vector<VertexId>> classes(static_cast<std::size_t>(std::max(d.color_count, 1)));
    for (int v = 0; v < box.vertex_count(); ++v) {
        const int c = d.colors[static_cast<std::size_t>(d.region[static_cast<std::size_t>(v)])];
        classes[static_cast<std::size_t>(c)].push_back(box.to_host(VertexId{v}));
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::sort(classes[c].begin(), classes[c].end());
        const double delta = flip_region_delta(w, s, classes[c]);
        out.class_deltas.push_back(delta);
        sum += delta;
        if (out.color < 0 || delta < out.delta) {
            out.color = static_cast<int>(c);
            out.delta = delta;
        }
    }
    out.flipped = classes[static_cast<std::size_t>(out.color)];
    out.identity_residual = sum - 2.0 * (out.boundary_signed - 2.0 * out.bridge_weight);
    out.five_color_bound = -0.8 * out.bridge_weight + 0.4 * out.boundary_weight;
    return out;
}

inline SpinConfig apply_flip(SpinConfig s, std::span<const VertexId> region) {
    for (auto v : region) s.flip(v);
    return s;
}

/// One (N, E_N, Y_N) row: bridge edge count and total |w| over bridges.
struct BridgeStats {
    int side = 0;
    int edge_count = 0;
    double abs_weight = 0.0;
};

inline BridgeStats bridge_stats(const BridgeDecomposition& d, const Couplings& w) {
    BridgeStats st{d.window.side(), static_cast<int>(d.bridges.size()), 0.0};
    for (auto b : d.bridges) st.abs_weight += std::abs(w[d.window.host_edge(d.window.primal_edge(b))]);
    return st;
}

}  // namespace ealab
