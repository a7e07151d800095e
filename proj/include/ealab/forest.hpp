#pragma once

// Loop-erasing forest extraction on finite graphs.
//
// Every simple cycle carries an exponential clock with rate exp(-a * length)
// and a uniformly chosen edge. Time is cut into intervals of length theta;
// within an interval the ringing live cycles are grouped into clusters of
// edge-sharing cycles, and each cluster removes chosen edges greedily in ring
// order, skipping a cycle that already lost an edge in this interval.
//
// A live cycle that rings always loses an edge (its own chosen edge or one
// selected earlier in the same interval), so only each cycle's first ring
// time can matter; later rings of a dead cycle are no-ops and are not drawn.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ealab/error.hpp"
#include "ealab/frustration.hpp"
#include "ealab/graph.hpp"
#include "ealab/rng.hpp"

namespace ealab {

struct ClockedCycle {
    std::vector<std::int32_t> edges;  // caller edge ids, sorted
    double rate = 0.0;
    std::int32_t chosen = -1;
    double ring_time = 0.0;

    int length() const noexcept { return static_cast<int>(edges.size()); }
};

struct CycleClockSystem {
    double decay = 1.0;
    double theta = 1.0;
    double max_load = 0.0;             // max over edges of sum of rate * length over cycles through it
    std::int32_t max_load_edge = -1;
    std::vector<ClockedCycle> cycles;
    std::vector<std::vector<std::size_t>> edge_cycles;  // edge id -> cycles containing it

    /// Index n of the interval [n theta, (n+1) theta) holding the cycle's ring.
    double interval_of(std::size_t c) const { return std::floor(cycles[c].ring_time / theta); }

    /// theta * max load < 1, or ConfigError naming the worst edge.
    void check_theta() const {
        if (!(theta > 0.0) || !std::isfinite(theta)) throw ConfigError("theta must be positive and finite");
        if (theta * max_load >= 1.0)
            throw ConfigError("theta condition fails at edge " + std::to_string(max_load_edge) + ": theta * sum = " +
                              std::to_string(theta * max_load) + " >= 1");
    }
};

inline constexpr std::size_t kMaxClockedCycles = 1'000'000;

namespace detail {

inline void draw_ring_times(CycleClockSystem& sys, Rng& rng) {
    for (auto& c : sys.cycles) c.ring_time = rng.exponential(c.rate);
    // Redraw exact ties and times on interval boundaries; both have probability zero.
    for (;;) {
        std::vector<std::size_t> order(sys.cycles.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return sys.cycles[a].ring_time < sys.cycles[b].ring_time; });
        std::vector<std::size_t> redraw;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const double t = sys.cycles[order[k]].ring_time;
            const bool tie = k > 0 && sys.cycles[order[k - 1]].ring_time == t;
            // Past 2^52 every double is an integer, so the boundary test is meaningless there.
            const double q = t / sys.theta;
            if (tie || (q < 0x1p52 && q == std::floor(q))) redraw.push_back(order[k]);
        }
        if (redraw.empty()) return;
        for (auto c : redraw) sys.cycles[c].ring_time = rng.exponential(sys.cycles[c].rate);
    }
}

inline std::int32_t max_edge_id(const SimpleGraph& g) {
    std::int32_t m = -1;
    for (const auto& e : g.edges()) m = std::max(m, e.id);
    return m;
}

}  // namespace detail

/// Enumerates the simple cycles of g, attaches rates, chosen edges and ring
/// times. theta defaults to half the largest admissible value.
inline CycleClockSystem build_clock_system(const SimpleGraph& g, double decay, std::optional<double> theta, Rng& rng,
                                           std::size_t cycle_cap = kMaxClockedCycles) {
    if (!(decay > 0.0) || !std::isfinite(decay)) throw ConfigError("cycle rate decay must be positive");
    CycleClockSystem sys;
    sys.decay = decay;
    sys.edge_cycles.resize(static_cast<std::size_t>(detail::max_edge_id(g) + 1));

    for_each_simple_cycle(
        g,
        [&](const std::vector<int>& idx) {
            ClockedCycle c;
            for (int k : idx) c.edges.push_back(g.edges()[static_cast<std::size_t>(k)].id);
            std::sort(c.edges.begin(), c.edges.end());
            c.rate = std::exp(-decay * static_cast<double>(c.edges.size()));
            c.chosen = c.edges[rng.below(c.edges.size())];
            for (auto e : c.edges) sys.edge_cycles[static_cast<std::size_t>(e)].push_back(sys.cycles.size());
            sys.cycles.push_back(std::move(c));
        },
        cycle_cap);

    for (std::size_t e = 0; e < sys.edge_cycles.size(); ++e) {
        double load = 0.0;
        for (auto c : sys.edge_cycles[e]) load += sys.cycles[c].rate * sys.cycles[c].length();
        if (load > sys.max_load) {
            sys.max_load = load;
            sys.max_load_edge = static_cast<std::int32_t>(e);
        }
    }
    sys.theta = theta.value_or(sys.max_load > 0.0 ? 0.5 / sys.max_load : 1.0);
    sys.check_theta();
    detail::draw_ring_times(sys, rng);
    return sys;
}

inline CycleClockSystem build_clock_system(const DualSubgraph& g, double decay, std::optional<double> theta, Rng& rng,
                                           std::size_t cycle_cap = kMaxClockedCycles) {
    auto sys = build_clock_system(graph_view(g).graph, decay, theta, rng, cycle_cap);
    sys.edge_cycles.resize(static_cast<std::size_t>(g.geometry().dual_edge_count()));
    return sys;
}

/// What one interval did: the ringing live cycles grouped into edge-sharing
/// clusters (each in ring order), the cycles whose chosen edge was taken, and
/// the removed edges.
struct EraseRecord {
    double interval = 0.0;
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> selected;
    std::vector<std::int32_t> removed;
};

/// One interval of the process on the edge-membership vector `present`
/// (indexed by edge id), restricted to the candidate cycles that ring in it.
inline EraseRecord erase_candidates(std::vector<char>& present, const CycleClockSystem& sys,
                                    std::vector<std::size_t> candidates, double interval) {
    EraseRecord rec;
    rec.interval = interval;
    auto alive = [&](std::size_t c) {
        for (auto e : sys.cycles[c].edges)
            if (!present[static_cast<std::size_t>(e)]) return false;
        return true;
    };
    std::erase_if(candidates, [&](std::size_t c) { return !alive(c); });
    if (candidates.empty()) return rec;

    // Clusters: closure of ringing cycles under sharing an edge.
    UnionFind uf(candidates.size());
    std::vector<std::int64_t> owner(present.size(), -1);
    for (std::size_t k = 0; k < candidates.size(); ++k)
        for (auto e : sys.cycles[candidates[k]].edges) {
            auto& o = owner[static_cast<std::size_t>(e)];
            if (o >= 0) uf.unite(static_cast<std::size_t>(o), k);
            o = static_cast<std::int64_t>(k);
        }
    std::vector<std::int64_t> cluster_of(candidates.size(), -1);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        auto& slot = cluster_of[uf.find(k)];
        if (slot < 0) {
            slot = static_cast<std::int64_t>(rec.clusters.size());
            rec.clusters.emplace_back();
        }
        rec.clusters[static_cast<std::size_t>(slot)].push_back(candidates[k]);
    }

    std::vector<char> taken(present.size(), 0);
    for (auto& cluster : rec.clusters) {
        std::sort(cluster.begin(), cluster.end(),
                  [&](std::size_t a, std::size_t b) { return sys.cycles[a].ring_time < sys.cycles[b].ring_time; });
        for (auto c : cluster) {
            const auto& cyc = sys.cycles[c];
            const bool hit = std::any_of(cyc.edges.begin(), cyc.edges.end(),
                                         [&](std::int32_t e) { return taken[static_cast<std::size_t>(e)] != 0; });
            if (hit) continue;
            taken[static_cast<std::size_t>(cyc.chosen)] = 1;
            rec.selected.push_back(c);
            rec.removed.push_back(cyc.chosen);
        }
    }
    for (auto e : rec.removed) present[static_cast<std::size_t>(e)] = 0;
    std::sort(rec.removed.begin(), rec.removed.end());
    return rec;
}

/// g_{n+1} from g_n: applies the rings of interval n.
inline DualSubgraph erase_step(const DualSubgraph& g_n, const CycleClockSystem& sys, double n,
                               EraseRecord* record = nullptr) {
    std::vector<char> present(static_cast<std::size_t>(g_n.geometry().dual_edge_count()), 0);
    for (auto d : g_n.edges()) present[static_cast<std::size_t>(index_of(d))] = 1;
    std::vector<std::size_t> ringing;
    for (std::size_t c = 0; c < sys.cycles.size(); ++c)
        if (sys.interval_of(c) == n) ringing.push_back(c);
    auto rec = erase_candidates(present, sys, std::move(ringing), n);
    DualSubgraph next = g_n;
    for (auto e : rec.removed) next.erase(DualEdgeId{e});
    if (record) *record = std::move(rec);
    return next;
}

struct ForestParams {
    double decay = 1.0;
    std::optional<double> theta;
    double max_intervals = std::numeric_limits<double>::infinity();
    std::size_t cycle_cap = kMaxClockedCycles;
};

struct ForestRun {
    DualSubgraph forest;
    CycleClockSystem system;
    std::vector<EraseRecord> steps;  // non-empty intervals only
};

/// Runs the process until no cycle survives. Raises BoundedRunError if a
/// surviving cycle would ring at or after interval `max_intervals`.
inline ForestRun extract_forest_run(const DualSubgraph& g, const ForestParams& params, Rng& rng) {
    ForestRun run{g, build_clock_system(g, params.decay, params.theta, rng, params.cycle_cap), {}};
    const auto& sys = run.system;
    std::vector<char> present(static_cast<std::size_t>(g.geometry().dual_edge_count()), 0);
    for (auto d : g.edges()) present[static_cast<std::size_t>(index_of(d))] = 1;

    std::vector<std::size_t> order(sys.cycles.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sys.cycles[a].ring_time < sys.cycles[b].ring_time; });

    for (std::size_t k = 0; k < order.size();) {
        const double n = sys.interval_of(order[k]);
        std::vector<std::size_t> batch;
        while (k < order.size() && sys.interval_of(order[k]) == n) batch.push_back(order[k++]);
        if (n >= params.max_intervals) {
            const bool any_alive = std::any_of(order.begin() + static_cast<std::ptrdiff_t>(k - batch.size()), order.end(),
                                               [&](std::size_t c) {
                                                   for (auto e : sys.cycles[c].edges)
                                                       if (!present[static_cast<std::size_t>(e)]) return false;
                                                   return true;
                                               });
            if (any_alive)
                throw BoundedRunError("cycles remain after " + std::to_string(params.max_intervals) +
                                      " intervals; raise max_intervals");
            break;
        }
        auto rec = erase_candidates(present, sys, std::move(batch), n);
        if (!rec.clusters.empty()) {
            for (auto e : rec.removed) run.forest.erase(DualEdgeId{e});
            run.steps.push_back(std::move(rec));
        }
    }
    if (!is_forest(graph_view(run.forest).graph)) throw InvariantViolation("loop erasure left a cycle");
    return run;
}

inline DualSubgraph extract_forest(const DualSubgraph& g, const ForestParams& params, Rng& rng) {
    return extract_forest_run(g, params, rng).forest;
}

}  // namespace ealab
