#pragma once

// Independent reference implementations used only by the tests. Each one
// takes a different route from the library code it checks.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "ealab/ealab.hpp"

namespace oracle {

using namespace ealab;

// Connected n-cell sets containing the origin, by testing every n-subset of
// the l1 ball of radius n-1 for connectivity.
inline std::uint64_t brute_force_vertex_animals(int n) {
    const int r = n - 1;
    std::vector<Coord> ball;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x)
            if (std::abs(x) + std::abs(y) <= r && !(x == 0 && y == 0)) ball.push_back({x, y});
    std::uint64_t count = 0;
    std::vector<int> pick;
    std::vector<Coord> cells;
    std::function<void(std::size_t)> choose = [&](std::size_t start) {
        if (static_cast<int>(pick.size()) == n - 1) {
            cells.assign(1, Coord{0, 0});
            for (int i : pick) cells.push_back(ball[static_cast<std::size_t>(i)]);
            std::vector<char> seen(cells.size(), 0);
            std::vector<std::size_t> stack{0};
            seen[0] = 1;
            std::size_t reached = 1;
            while (!stack.empty()) {
                const auto a = stack.back();
                stack.pop_back();
                for (std::size_t b = 0; b < cells.size(); ++b)
                    if (!seen[b] && std::abs(cells[a].x - cells[b].x) + std::abs(cells[a].y - cells[b].y) == 1) {
                        seen[b] = 1;
                        ++reached;
                        stack.push_back(b);
                    }
            }
            count += reached == cells.size();
            return;
        }
        for (std::size_t i = start; i < ball.size(); ++i) {
            pick.push_back(static_cast<int>(i));
            choose(i + 1);
            pick.pop_back();
        }
    };
    choose(0);
    return count;
}

// Fixed polyomino counts by Redelmeier's untried-set recursion; the number of
// n-cell animals containing the origin is n times the fixed count.
inline std::vector<std::uint64_t> redelmeier_fixed_polyominoes(int n_max) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_max + 1), 0);
    const int W = 2 * n_max + 3;
    auto code = [&](int x, int y) { return (y + 1) * W + (x + n_max + 1); };
    // Cells allowed: y > 0, or y == 0 and x >= 0.
    auto allowed = [&](int x, int y) { return y > 0 || (y == 0 && x >= 0); };
    std::vector<char> seen(static_cast<std::size_t>(W * (n_max + 3)), 0);
    std::function<void(std::vector<std::pair<int, int>>, int)> rec = [&](std::vector<std::pair<int, int>> untried,
                                                                        int size) {
        while (!untried.empty()) {
            const auto [x, y] = untried.back();
            untried.pop_back();
            const int s = size + 1;
            ++counts[static_cast<std::size_t>(s)];
            if (s < n_max) {
                auto next = untried;
                std::vector<int> marked;
                const int nb[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
                for (const auto& d : nb) {
                    const int nx = x + d[0], ny = y + d[1];
                    if (!allowed(nx, ny)) continue;
                    const int c = code(nx, ny);
                    if (seen[static_cast<std::size_t>(c)]) continue;
                    seen[static_cast<std::size_t>(c)] = 1;
                    marked.push_back(c);
                    next.push_back({nx, ny});
                }
                rec(next, s);
                for (int c : marked) seen[static_cast<std::size_t>(c)] = 0;
            }
        }
    };
    seen[static_cast<std::size_t>(code(0, 0))] = 1;
    rec({{0, 0}}, 0);
    return counts;
}

// Simple dual cycles through x of length <= len_max: all closed walks without
// repeated vertices, in both directions, deduplicated by sorted edge set.
inline std::set<std::vector<int>> cycles_by_edge_set(const TorusGeometry& g, DualVertexId x, int len_max) {
    std::set<std::vector<int>> out;
    std::vector<int> path_edges;
    std::set<int> on_path{index_of(x)};
    std::function<void(DualVertexId)> walk = [&](DualVertexId v) {
        if (static_cast<int>(path_edges.size()) >= len_max) return;
        const auto nb = g.dual_neighbors(v);
        const auto inc = g.dual_incident_edges(v);
        for (std::size_t k = 0; k < 4; ++k) {
            const int e = index_of(inc[k]);
            if (std::find(path_edges.begin(), path_edges.end(), e) != path_edges.end()) continue;
            if (nb[k] == x) {
                if (path_edges.size() >= 2) {
                    auto c = path_edges;
                    c.push_back(e);
                    std::sort(c.begin(), c.end());
                    out.insert(c);
                }
                continue;
            }
            if (on_path.count(index_of(nb[k]))) continue;
            on_path.insert(index_of(nb[k]));
            path_edges.push_back(e);
            walk(nb[k]);
            path_edges.pop_back();
            on_path.erase(index_of(nb[k]));
        }
    };
    walk(x);
    return out;
}

// The loop-erasing process with a single global greedy pass per interval
// (no cluster decomposition), replayed on a built clock system.
inline std::vector<char> replay_global_greedy(const CycleClockSystem& sys, std::vector<char> present) {
    std::vector<std::size_t> order(sys.cycles.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return sys.cycles[a].ring_time < sys.cycles[b].ring_time; });
    std::size_t k = 0;
    while (k < order.size()) {
        const double n = std::floor(sys.cycles[order[k]].ring_time / sys.theta);
        const auto snapshot = present;
        std::set<std::int32_t> taken;
        for (; k < order.size() && std::floor(sys.cycles[order[k]].ring_time / sys.theta) == n; ++k) {
            const auto& c = sys.cycles[order[k]];
            const bool alive = std::all_of(c.edges.begin(), c.edges.end(),
                                           [&](std::int32_t e) { return snapshot[static_cast<std::size_t>(e)] != 0; });
            if (!alive) continue;
            const bool hit = std::any_of(c.edges.begin(), c.edges.end(), [&](std::int32_t e) { return taken.count(e) > 0; });
            if (!hit) taken.insert(c.chosen);
        }
        for (auto e : taken) present[static_cast<std::size_t>(e)] = 0;
    }
    return present;
}

// Vertex partition of a dual subgraph: dual vertex -> smallest dual vertex id
// in its component (isolated vertices map to themselves).
inline std::vector<int> partition_by_bfs(const DualSubgraph& s) {
    const auto& g = s.geometry();
    std::vector<int> rep(static_cast<std::size_t>(g.dual_vertex_count()), -1);
    for (int p = 0; p < g.dual_vertex_count(); ++p) {
        if (rep[static_cast<std::size_t>(p)] >= 0) continue;
        std::deque<int> q{p};
        rep[static_cast<std::size_t>(p)] = p;
        while (!q.empty()) {
            const int v = q.front();
            q.pop_front();
            const auto nb = g.dual_neighbors(DualVertexId{v});
            const auto inc = g.dual_incident_edges(DualVertexId{v});
            for (std::size_t k = 0; k < 4; ++k)
                if (s.contains(inc[k]) && rep[static_cast<std::size_t>(index_of(nb[k]))] < 0) {
                    rep[static_cast<std::size_t>(index_of(nb[k]))] = p;
                    q.push_back(index_of(nb[k]));
                }
        }
    }
    return rep;
}

inline bool has_cycle_by_dfs(const DualSubgraph& s) {
    const auto& g = s.geometry();
    std::vector<int> parent_edge(static_cast<std::size_t>(g.dual_vertex_count()), -2);
    for (int root = 0; root < g.dual_vertex_count(); ++root) {
        if (parent_edge[static_cast<std::size_t>(root)] != -2) continue;
        parent_edge[static_cast<std::size_t>(root)] = -1;
        std::vector<int> stack{root};
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            const auto nb = g.dual_neighbors(DualVertexId{v});
            const auto inc = g.dual_incident_edges(DualVertexId{v});
            for (std::size_t k = 0; k < 4; ++k) {
                if (!s.contains(inc[k]) || index_of(inc[k]) == parent_edge[static_cast<std::size_t>(v)]) continue;
                const auto u = static_cast<std::size_t>(index_of(nb[k]));
                if (parent_edge[u] != -2) return true;
                parent_edge[u] = index_of(inc[k]);
                stack.push_back(index_of(nb[k]));
            }
        }
    }
    return false;
}

// Window forest as an adjacency map over box dual vertices.
using Adjacency = std::map<int, std::vector<std::pair<int, int>>>;  // vertex -> (neighbour, box dual edge)

inline Adjacency window_adjacency(const DualSubgraph& f, const BoxGeometry& box) {
    Adjacency adj;
    for (auto hd : f.edges()) {
        const auto d = box.from_host_dual_edge(hd);
        if (!d) continue;
        const auto [a, b] = box.dual_endpoints(*d);
        adj[index_of(a)].push_back({index_of(b), index_of(*d)});
        adj[index_of(b)].push_back({index_of(a), index_of(*d)});
    }
    return adj;
}

// Union of the tree paths between every pair of boundary dual vertices.
inline std::set<int> bridges_all_pairs(const DualSubgraph& f, const BoxGeometry& box) {
    const auto adj = window_adjacency(f, box);
    std::vector<int> boundary;
    for (const auto& [v, _] : adj)
        if (box.is_boundary_dual(DualVertexId{v})) boundary.push_back(v);
    std::set<int> out;
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        // BFS tree from boundary[i], then walk back from every later boundary vertex.
        std::map<int, std::pair<int, int>> parent;  // vertex -> (parent, edge)
        std::deque<int> q{boundary[i]};
        parent[boundary[i]] = {-1, -1};
        while (!q.empty()) {
            const int v = q.front();
            q.pop_front();
            for (const auto& [u, e] : adj.at(v))
                if (!parent.count(u)) {
                    parent[u] = {v, e};
                    q.push_back(u);
                }
        }
        for (std::size_t j = i + 1; j < boundary.size(); ++j) {
            if (!parent.count(boundary[j])) continue;
            for (int v = boundary[j]; parent[v].first >= 0; v = parent[v].first) out.insert(parent[v].second);
        }
    }
    return out;
}

// Vertices whose removal leaves >= 3 pieces that each contain a boundary vertex.
inline std::set<int> encounter_points_by_removal(const DualSubgraph& f, const BoxGeometry& box) {
    const auto adj = window_adjacency(f, box);
    std::set<int> out;
    for (const auto& [v, nbrs] : adj) {
        int reaching = 0;
        for (const auto& [start, _] : nbrs) {
            std::set<int> seen{v, start};
            std::vector<int> stack{start};
            bool boundary = false;
            while (!stack.empty()) {
                const int a = stack.back();
                stack.pop_back();
                boundary = boundary || box.is_boundary_dual(DualVertexId{a});
                for (const auto& [b, e] : adj.at(a))
                    if (seen.insert(b).second) stack.push_back(b);
            }
            reaching += boundary;
        }
        if (reaching >= 3) out.insert(v);
    }
    return out;
}

inline bool proper_coloring(const BridgeDecomposition& d) {
    for (int a = 0; a < d.region_count; ++a)
        for (int b : d.adjacency[static_cast<std::size_t>(a)])
            if (d.colors[static_cast<std::size_t>(a)] == d.colors[static_cast<std::size_t>(b)]) return false;
    // Also scan every box edge: endpoints in different regions must be separated by a bridge.
    std::set<int> bridges;
    for (auto b : d.bridges) bridges.insert(index_of(b));
    for (int e = 0; e < d.window.edge_count(); ++e) {
        const auto [u, v] = d.window.endpoints(EdgeId{e});
        const int ru = d.region[static_cast<std::size_t>(index_of(u))], rv = d.region[static_cast<std::size_t>(index_of(v))];
        if ((ru != rv) != (bridges.count(e) > 0)) return false;
    }
    return true;
}

// H after minus H before, both computed from scratch.
inline double full_flip_delta(const Couplings& w, const SpinConfig& s, const std::vector<VertexId>& region) {
    auto t = s;
    for (auto v : region) t.flip(v);
    return torus_hamiltonian(w, t) - torus_hamiltonian(w, s);
}

}  // namespace oracle
