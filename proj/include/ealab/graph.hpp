#pragma once

// Small finite-graph toolkit shared by the frustration, forest and analysis
// layers: union-find, an adjacency graph with edge ids, connected-subset
// enumeration and simple-cycle enumeration.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ealab/error.hpp"

namespace ealab {

/// Union by size with path compression.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

    bool connected(std::size_t a, std::size_t b) { return find(a) == find(b); }
    std::size_t component_size(std::size_t a) { return size_[find(a)]; }
    std::size_t size() const noexcept { return parent_.size(); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// Undirected simple graph on vertices 0..n-1 whose edges carry caller ids.
class SimpleGraph {
public:
    struct Edge {
        int u;
        int v;
        std::int32_t id;
    };
    struct Incidence {
        int to;
        int edge;  // index into edges()
    };

    explicit SimpleGraph(int n = 0) : adj_(static_cast<std::size_t>(n)) {}

    int add_vertex() {
        adj_.emplace_back();
        return static_cast<int>(adj_.size()) - 1;
    }

    int add_edge(int u, int v, std::int32_t id) {
        const int k = static_cast<int>(edges_.size());
        edges_.push_back({u, v, id});
        adj_[static_cast<std::size_t>(u)].push_back({v, k});
        adj_[static_cast<std::size_t>(v)].push_back({u, k});
        return k;
    }

    int vertex_count() const noexcept { return static_cast<int>(adj_.size()); }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<Incidence>& adjacent(int v) const { return adj_[static_cast<std::size_t>(v)]; }
    int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }

private:
    std::vector<std::vector<Incidence>> adj_;
    std::vector<Edge> edges_;
};

/// Component label per vertex (labels 0..k-1 in order of first appearance).
inline std::vector<int> component_labels(const SimpleGraph& g, int* count = nullptr) {
    UnionFind uf(static_cast<std::size_t>(g.vertex_count()));
    for (const auto& e : g.edges()) uf.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v));
    std::vector<int> label(static_cast<std::size_t>(g.vertex_count()), -1);
    std::vector<int> root_label(static_cast<std::size_t>(g.vertex_count()), -1);
    int next = 0;
    for (int v = 0; v < g.vertex_count(); ++v) {
        auto r = uf.find(static_cast<std::size_t>(v));
        if (root_label[r] < 0) root_label[r] = next++;
        label[static_cast<std::size_t>(v)] = root_label[r];
    }
    if (count) *count = next;
    return label;
}

/// True when the graph has no cycle.
inline bool is_forest(const SimpleGraph& g) {
    UnionFind uf(static_cast<std::size_t>(g.vertex_count()));
    for (const auto& e : g.edges())
        if (!uf.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v))) return false;
    return true;
}

/// Calls `visit` once for every connected vertex subset of size 1..max_size.
///
/// This is the ESU scheme: each subset is grown from its smallest vertex and
/// only ever extended by vertices that are larger than that root and not
/// adjacent to the current subset's earlier members, so no deduplication
/// is needed. `neighbors(v)` must return a range of vertex indices.
template <class NeighborFn, class Visit>
void for_each_connected_subset(int vertex_count, int max_size, NeighborFn&& neighbors, Visit&& visit) {
    if (max_size < 1) return;
    std::vector<int> subset;
    std::vector<int> mark(static_cast<std::size_t>(vertex_count), 0);  // >0: in subset or its neighbourhood

    std::function<void(int, std::vector<int>&)> extend = [&](int root, std::vector<int>& extension) {
        visit(static_cast<const std::vector<int>&>(subset));
        if (static_cast<int>(subset.size()) == max_size) return;
        while (!extension.empty()) {
            const int w = extension.back();
            extension.pop_back();
            std::vector<int> next = extension;
            std::vector<int> added;
            for (int u : neighbors(w)) {
                if (u <= root || mark[static_cast<std::size_t>(u)] > 0) continue;
                mark[static_cast<std::size_t>(u)] = 1;
                added.push_back(u);
                next.push_back(u);
            }
            subset.push_back(w);
            extend(root, next);
            subset.pop_back();
            for (int u : added) mark[static_cast<std::size_t>(u)] = 0;
        }
    };

    for (int root = 0; root < vertex_count; ++root) {
        subset.assign(1, root);
        mark[static_cast<std::size_t>(root)] = 1;
        std::vector<int> extension;
        for (int u : neighbors(root)) {
            if (u > root && mark[static_cast<std::size_t>(u)] == 0) {
                mark[static_cast<std::size_t>(u)] = 1;
                extension.push_back(u);
            }
        }
        std::vector<int> marked = extension;
        extend(root, extension);
        for (int u : marked) mark[static_cast<std::size_t>(u)] = 0;
        mark[static_cast<std::size_t>(root)] = 0;
    }
}

/// Calls `visit(edge_indices)` once per simple cycle of g (each cycle once,
/// in one traversal direction). Stops with SizeError after `cap` cycles.
///
/// Cycles are rooted at their smallest vertex and walked only through larger
/// vertices; the two directions are told apart by comparing the first and
/// last vertices after the root. Vertices outside the 2-core are skipped.
template <class Visit>
std::size_t for_each_simple_cycle(const SimpleGraph& g, Visit&& visit, std::size_t cap = 1'000'000) {
    const int n = g.vertex_count();
    // 2-core: strip degree <= 1 vertices.
    std::vector<int> deg(static_cast<std::size_t>(n));
    std::vector<char> alive(static_cast<std::size_t>(n), 1);
    std::vector<int> stack;
    for (int v = 0; v < n; ++v) {
        deg[static_cast<std::size_t>(v)] = g.degree(v);
        if (deg[static_cast<std::size_t>(v)] <= 1) stack.push_back(v);
    }
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (!alive[static_cast<std::size_t>(v)]) continue;
        alive[static_cast<std::size_t>(v)] = 0;
        for (const auto& inc : g.adjacent(v))
            if (alive[static_cast<std::size_t>(inc.to)] && --deg[static_cast<std::size_t>(inc.to)] <= 1)
                stack.push_back(inc.to);
    }

    std::size_t found = 0;
    std::vector<char> on_path(static_cast<std::size_t>(n), 0);
    std::vector<int> path_vertices;
    std::vector<int> path_edges;

    std::function<void(int, int)> dfs = [&](int root, int v) {
        for (const auto& inc : g.adjacent(v)) {
            const int u = inc.to;
            if (!alive[static_cast<std::size_t>(u)]) continue;
            if (u == root) {
                if (path_edges.size() >= 2 && path_vertices[1] < v) {
                    if (++found > cap)
                        throw SizeError("simple cycle count exceeds cap of " + std::to_string(cap));
                    path_edges.push_back(inc.edge);
                    visit(static_cast<const std::vector<int>&>(path_edges));
                    path_edges.pop_back();
                }
                continue;
            }
            if (u < root || on_path[static_cast<std::size_t>(u)]) continue;
            on_path[static_cast<std::size_t>(u)] = 1;
            path_vertices.push_back(u);
            path_edges.push_back(inc.edge);
            dfs(root, u);
            path_edges.pop_back();
            path_vertices.pop_back();
            on_path[static_cast<std::size_t>(u)] = 0;
        }
    };

    for (int root = 0; root < n; ++root) {
        if (!alive[static_cast<std::size_t>(root)]) continue;
        on_path[static_cast<std::size_t>(root)] = 1;
        path_vertices.assign(1, root);
        path_edges.clear();
        dfs(root, root);
        on_path[static_cast<std::size_t>(root)] = 0;
    }
    return found;
}

}  // namespace ealab
