#pragma once

// Exhaustive counting of lattice animals and simple cycles through a point,
// plus empirical concentration statistics of |w|(G)/|E(G)| over connected
// subgraphs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ealab/disorder.hpp"
#include "ealab/error.hpp"
#include "ealab/graph.hpp"
#include "ealab/lattice.hpp"
#include "ealab/rng.hpp"

namespace ealab {

__extension__ typedef unsigned __int128 UInt128;

enum class AnimalMode { Vertex, Edge, CyclesThroughOrigin };

inline const char* to_string(AnimalMode m) {
    switch (m) {
        case AnimalMode::Vertex: return "vertex";
        case AnimalMode::Edge: return "edge";
        case AnimalMode::CyclesThroughOrigin: return "cycles";
    }
    return "?";
}

/// Growth base in the counting bound count(n) <= 32^n.
inline constexpr unsigned kAnimalGrowthBase = 32;

struct CountTable {
    AnimalMode mode = AnimalMode::Vertex;
    std::map<int, std::uint64_t> counts;  // size -> exact count
};

inline constexpr int kMaxVertexAnimalSize = 12;
inline constexpr int kMaxEdgeAnimalSize = 10;
inline constexpr int kMaxCycleLength = 16;

namespace detail {

using Key = UInt128;
inline constexpr int kCodeBits = 10;
inline constexpr unsigned kCodeMask = (1u << kCodeBits) - 1;

inline Key pack(std::span<const std::uint16_t> sorted_codes) {
    Key k = 0;
    for (auto c : sorted_codes) k = (k << kCodeBits) | c;
    return k;
}

inline void unpack(Key k, int n, std::vector<std::uint16_t>& out) {
    out.resize(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(static_cast<unsigned>(k) & kCodeMask);
        k >>= kCodeBits;
    }
}

inline void merge_unique(std::vector<Key>& into, std::vector<Key>& batch) {
    std::sort(batch.begin(), batch.end());
    batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
    std::vector<Key> merged;
    merged.reserve(into.size() + batch.size());
    std::set_union(into.begin(), into.end(), batch.begin(), batch.end(), std::back_inserter(merged));
    into.swap(merged);
    batch.clear();
}

// Breadth-first growth over canonical (sorted-code) sets. `children(codes, emit)`
// must call emit(code) for every element that may be added to `codes`.
template <class Children>
std::map<int, std::uint64_t> grow_levels(std::vector<std::uint16_t> seeds, int n_max, Children&& children) {
    std::map<int, std::uint64_t> counts;
    std::vector<Key> level;
    for (auto s : seeds) level.push_back(Key{s});
    std::sort(level.begin(), level.end());
    level.erase(std::unique(level.begin(), level.end()), level.end());
    counts[1] = level.size();

    constexpr std::size_t kBatch = std::size_t{1} << 22;
    std::vector<std::uint16_t> codes, child;
    for (int n = 1; n < n_max; ++n) {
        std::vector<Key> next, batch;
        batch.reserve(kBatch);
        for (Key parent : level) {
            unpack(parent, n, codes);
            children(static_cast<const std::vector<std::uint16_t>&>(codes), [&](std::uint16_t c) {
                if (std::binary_search(codes.begin(), codes.end(), c)) return;
                child = codes;
                child.insert(std::upper_bound(child.begin(), child.end(), c), c);
                batch.push_back(pack(child));
            });
            if (batch.size() >= kBatch) merge_unique(next, batch);
        }
        merge_unique(next, batch);
        level.swap(next);
        counts[n + 1] = level.size();
    }
    return counts;
}

}  // namespace detail

/// Simple dual cycle: edges in walk order, starting and ending at `vertices[0]`.
struct DualCycle {
    std::vector<DualEdgeId> edges;
    std::vector<DualVertexId> vertices;
    bool contractible = true;
};

/// All simple dual cycles through x of length <= len_max, each reported once.
inline std::vector<DualCycle> enumerate_cycles_through(const TorusGeometry& g, DualVertexId x, int len_max) {
    if (len_max < 1) throw ValidationError("cycle length cap must be positive");
    if (len_max > kMaxCycleLength)
        throw SizeError("cycle enumeration is capped at length " + std::to_string(kMaxCycleLength));
    g.check(x);
    const int L = g.side();
    const Coord origin = g.dual_coords(x);
    auto torus_dist = [&](DualVertexId p) {
        const Coord c = g.dual_coords(p);
        const int dx = std::abs(c.x - origin.x), dy = std::abs(c.y - origin.y);
        return std::min(dx, L - dx) + std::min(dy, L - dy);
    };

    std::vector<DualCycle> out;
    std::vector<char> on_path(static_cast<std::size_t>(g.dual_vertex_count()), 0);
    std::vector<DualVertexId> verts{x};
    std::vector<DualEdgeId> edges;
    on_path[static_cast<std::size_t>(index_of(x))] = 1;

    std::function<void(DualVertexId)> dfs = [&](DualVertexId v) {
        const auto nbrs = g.dual_neighbors(v);
        const auto inc = g.dual_incident_edges(v);
        for (std::size_t k = 0; k < 4; ++k) {
            const DualVertexId u = nbrs[k];
            if (u == x) {
                if (edges.size() >= 2 && verts[1] < v) {
                    DualCycle c;
                    c.vertices = verts;
                    c.edges = edges;
                    c.edges.push_back(inc[k]);
                    c.contractible = cycle_winding(g, std::span<const DualEdgeId>(c.edges)) == Coord{0, 0};
                    out.push_back(std::move(c));
                }
                continue;
            }
            if (on_path[static_cast<std::size_t>(index_of(u))]) continue;
            // Need edges.size()+1 to reach u and at least torus_dist(u) more to return.
            if (static_cast<int>(edges.size()) + 1 + torus_dist(u) > len_max) continue;
            on_path[static_cast<std::size_t>(index_of(u))] = 1;
            verts.push_back(u);
            edges.push_back(inc[k]);
            dfs(u);
            edges.pop_back();
            verts.pop_back();
            on_path[static_cast<std::size_t>(index_of(u))] = 0;
        }
    };
    dfs(x);
    return out;
}

/// Exact counts of connected subgraphs containing the origin, per size.
///
/// Vertex mode counts connected vertex sets, edge mode connected edge sets
/// touching the origin; both grow canonical sorted sets one element at a
/// time with deduplication. Cycle mode counts simple cycles through the
/// origin by length.
inline CountTable enumerate_animals(AnimalMode mode, int n_max) {
    if (n_max < 1) throw ValidationError("n_max must be at least 1");
    CountTable table;
    table.mode = mode;
    switch (mode) {
        case AnimalMode::Vertex: {
            if (n_max > kMaxVertexAnimalSize)
                throw SizeError("vertex-animal enumeration is capped at n = " + std::to_string(kMaxVertexAnimalSize));
            constexpr int off = kMaxVertexAnimalSize - 1, width = 2 * off + 1;
            auto code = [](int x, int y) { return static_cast<std::uint16_t>((y + off) * width + (x + off)); };
            table.counts = detail::grow_levels({code(0, 0)}, n_max, [&](const std::vector<std::uint16_t>& cells, auto&& emit) {
                for (auto c : cells) {
                    const int x = c % width - off, y = c / width - off;
                    emit(code(x + 1, y));
                    emit(code(x, y + 1));
                    emit(code(x - 1, y));
                    emit(code(x, y - 1));
                }
            });
            break;
        }
        case AnimalMode::Edge: {
            if (n_max > kMaxEdgeAnimalSize)
                throw SizeError("edge-animal enumeration is capped at n = " + std::to_string(kMaxEdgeAnimalSize));
            constexpr int off = kMaxEdgeAnimalSize, width = 2 * off + 1;
            // Edge code: 2 * vertex code + (0 horizontal, 1 vertical), edge leaves (x, y) in +x or +y.
            auto vcode = [](int x, int y) { return (y + off) * width + (x + off); };
            auto ecode = [&](int x, int y, int dir) { return static_cast<std::uint16_t>(2 * vcode(x, y) + dir); };
            auto edges_at = [&](int x, int y, auto&& emit) {
                emit(ecode(x, y, 0));
                emit(ecode(x, y, 1));
                emit(ecode(x - 1, y, 0));
                emit(ecode(x, y - 1, 1));
            };
            std::vector<std::uint16_t> seeds;
            edges_at(0, 0, [&](std::uint16_t c) { seeds.push_back(c); });
            table.counts = detail::grow_levels(seeds, n_max, [&](const std::vector<std::uint16_t>& es, auto&& emit) {
                for (auto c : es) {
                    const int v = c / 2, dir = c % 2;
                    const int x = v % width - off, y = v / width - off;
                    edges_at(x, y, emit);
                    if (dir == 0)
                        edges_at(x + 1, y, emit);
                    else
                        edges_at(x, y + 1, emit);
                }
            });
            break;
        }
        case AnimalMode::CyclesThroughOrigin: {
            if (n_max > kMaxCycleLength)
                throw SizeError("cycle enumeration is capped at length " + std::to_string(kMaxCycleLength));
            // Side n_max + 2 leaves no room for a winding cycle of length <= n_max.
            const TorusGeometry g(n_max + 2);
            for (int n = 1; n <= n_max; ++n) table.counts[n] = 0;
            for (const auto& c : enumerate_cycles_through(g, DualVertexId{0}, n_max))
                ++table.counts[static_cast<int>(c.edges.size())];
            break;
        }
    }
    return table;
}

struct AnimalBoundRow {
    int n = 0;
    std::uint64_t count = 0;
    std::uint64_t lower = 0;          // 2^{n-1}
    UInt128 upper = 0;      // 32^n
    bool within = false;
    bool below_strict_lower = false;  // count < 2^n
};

struct AnimalBoundVerdict {
    bool pass = true;
    std::vector<AnimalBoundRow> rows;
    std::vector<int> strict_lower_exceptions;  // sizes where count < 2^n
};

/// Checks 2^{n-1} <= count(n) <= 32^n per row. Sizes where only the
/// weaker 2^{n-1} bound holds (count < 2^n) are listed separately.
inline AnimalBoundVerdict check_animal_bounds(const CountTable& table) {
    if (table.mode == AnimalMode::CyclesThroughOrigin)
        throw ValidationError("animal bounds apply to vertex or edge tables, not cycle counts");
    AnimalBoundVerdict v;
    for (const auto& [n, count] : table.counts) {
        if (n < 1 || n > 24) throw RangeError("animal size out of range for the bound check");
        AnimalBoundRow r;
        r.n = n;
        r.count = count;
        r.lower = std::uint64_t{1} << (n - 1);
        r.upper = 1;
        for (int k = 0; k < n; ++k) r.upper *= kAnimalGrowthBase;
        r.within = r.lower <= count && static_cast<UInt128>(count) <= r.upper;
        r.below_strict_lower = count < (std::uint64_t{1} << n);
        if (!r.within) v.pass = false;
        if (r.below_strict_lower) v.strict_lower_exceptions.push_back(n);
        v.rows.push_back(r);
    }
    return v;
}

inline std::string to_decimal(UInt128 x) {
    if (x == 0) return "0";
    std::string s;
    while (x > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
        x /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

// --------------------------------------------------------- weight ratios

struct WeightRatioParams {
    int min_size = 1;              // graphs with fewer edges are kept out of the violation count
    int enumerate_max = 1;         // all connected edge sets up to this size at every position
    std::size_t random_samples = 0;
    int random_max_size = 32;      // random graphs have sizes uniform in [min_size, random_max_size]
    int window = 0;                // random graphs start in [window]^2 (0: whole torus)
    double lambda1 = 3.0;
    double lambda2 = 0.1;
    std::uint64_t seed = 1;
};

struct WeightRatioRow {
    int size = 0;
    std::size_t samples = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::size_t above_lambda1 = 0;
    std::size_t below_lambda2 = 0;
    // Empirical large-deviation rates -log(tail frequency)/size; NaN when no tail event was seen.
    double upper_rate = 0.0;
    double lower_rate = 0.0;
};

struct WeightRatioStats {
    std::vector<WeightRatioRow> rows;  // by edge count
    double lambda2_hat = 0.0;          // 1% quantile of ratios over graphs with >= min_size edges
    double lambda1_hat = 0.0;          // 99% quantile
    std::size_t considered = 0;        // graphs with >= min_size edges
    std::size_t violations = 0;        // of those, ratio outside [lambda2, lambda1]
    double violation_frequency = 0.0;
};

/// |w|(G) / |E(G)| over connected edge subgraphs G of the torus.
inline WeightRatioStats weight_ratio_stats(const Couplings& w, const WeightRatioParams& p) {
    const auto& g = w.geometry();
    if (p.enumerate_max < 0 || p.enumerate_max > 4) throw SizeError("enumerated subgraph size is capped at 4");
    if (p.min_size < 1) throw ValidationError("min_size must be at least 1");
    if (p.random_samples > 0 && p.random_max_size < p.min_size) throw ConfigError("random_max_size < min_size");
    if (p.window < 0 || p.window > g.side()) throw ConfigError("window larger than the torus");

    std::map<int, WeightRatioRow> rows;
    std::vector<double> tail_ratios;
    WeightRatioStats out;
    auto record = [&](int size, double ratio) {
        auto& r = rows[size];
        if (r.samples == 0) {
            r.size = size;
            r.min = r.max = ratio;
        }
        r.min = std::min(r.min, ratio);
        r.max = std::max(r.max, ratio);
        r.mean += ratio;
        ++r.samples;
        r.above_lambda1 += ratio > p.lambda1;
        r.below_lambda2 += ratio < p.lambda2;
        if (size >= p.min_size) {
            ++out.considered;
            tail_ratios.push_back(ratio);
            if (ratio < p.lambda2 || ratio > p.lambda1) ++out.violations;
        }
    };

    // Enumerated: every connected edge set of size <= enumerate_max, each once.
    if (p.enumerate_max >= 1) {
        // Line graph of the torus: edges adjacent when they share a vertex.
        auto line_neighbors = [&](int e) {
            std::vector<int> nb;
            for (auto v : g.endpoints(EdgeId{e}))
                for (auto f : g.incident_edges(v))
                    if (index_of(f) != e) nb.push_back(index_of(f));
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            return nb;
        };
        for_each_connected_subset(g.edge_count(), p.enumerate_max, line_neighbors, [&](const std::vector<int>& es) {
            double total = 0.0;
            for (int e : es) total += std::abs(w.at_index(static_cast<std::size_t>(e)));
            record(static_cast<int>(es.size()), total / static_cast<double>(es.size()));
        });
    }

    // Random accretion: grow from a uniform start edge by uniform boundary edges.
    Rng rng(p.seed);
    const int win = p.window == 0 ? g.side() : p.window;
    for (std::size_t s = 0; s < p.random_samples; ++s) {
        const int target = p.min_size + static_cast<int>(rng.below(static_cast<std::uint64_t>(p.random_max_size - p.min_size + 1)));
        const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(win)));
        const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(win)));
        std::vector<int> chosen{2 * index_of(g.vertex(x0, y0)) + static_cast<int>(rng.below(2))};
        std::vector<int> frontier;
        auto add_frontier = [&](int e) {
            for (auto v : g.endpoints(EdgeId{e}))
                for (auto f : g.incident_edges(v)) frontier.push_back(index_of(f));
        };
        add_frontier(chosen[0]);
        while (static_cast<int>(chosen.size()) < target) {
            std::erase_if(frontier, [&](int f) { return std::find(chosen.begin(), chosen.end(), f) != chosen.end(); });
            if (frontier.empty()) break;
            const int f = frontier[rng.below(frontier.size())];
            chosen.push_back(f);
            add_frontier(f);
        }
        double total = 0.0;
        for (int e : chosen) total += std::abs(w.at_index(static_cast<std::size_t>(e)));
        record(static_cast<int>(chosen.size()), total / static_cast<double>(chosen.size()));
    }

    for (auto& [size, r] : rows) {
        const auto n = static_cast<double>(r.samples);
        r.mean /= n;
        auto rate = [&](std::size_t hits) {
            return hits == 0 ? std::numeric_limits<double>::quiet_NaN() : -std::log(static_cast<double>(hits) / n) / size;
        };
        r.upper_rate = rate(r.above_lambda1);
        r.lower_rate = rate(r.below_lambda2);
        out.rows.push_back(r);
    }
    if (!tail_ratios.empty()) {
        std::sort(tail_ratios.begin(), tail_ratios.end());
        auto q = [&](double f) {
            const auto i = static_cast<std::size_t>(f * static_cast<double>(tail_ratios.size() - 1));
            return tail_ratios[i];
        };
        out.lambda2_hat = q(0.01);
        out.lambda1_hat = q(0.99);
        out.violation_frequency = static_cast<double>(out.violations) / static_cast<double>(out.considered);
    }
    return out;
}

}  // namespace ealab
