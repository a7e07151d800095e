#pragma once

// Finite pieces of the square lattice Z^2 and its dual (Z^2)*.
//
// Id layout (all dense, row-major):
//   torus of side L
//     vertex (x, y)            -> y*L + x
//     edge 2v                  -> horizontal edge v -- v+(1,0)
//     edge 2v+1                -> vertical edge   v -- v+(0,1)
//     dual vertex / plaquette p -> unit square with lower-left corner p,
//                                  centred at p + (1/2, 1/2)
//     dual edge 2p / 2p+1      -> horizontal / vertical dual edge leaving p
//   box [N]^2
//     vertex (x, y)            -> y*N + x
//     horizontal edges first   -> y*(N-1) + x
//     vertical edges after     -> N*(N-1) + y*N + x
//     dual vertex (i, j)       -> j*(N+1) + i, centred at (i - 1/2, j - 1/2)
//     dual edge                -> same id as the primal edge it crosses
//
// Geometry arithmetic inside cycle_interior uses doubled coordinates so
// primal vertices sit on even and dual vertices on odd integer points.

#include <algorithm>
#include <array>
#include <compare>
#include <concepts>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ealab/error.hpp"

namespace ealab {

enum class VertexId : std::int32_t {};
enum class EdgeId : std::int32_t {};
enum class DualVertexId : std::int32_t {};
enum class DualEdgeId : std::int32_t {};
using PlaquetteId = DualVertexId;

template <class Id>
constexpr std::int32_t index_of(Id id) noexcept {
    return static_cast<std::int32_t>(id);
}

struct Coord {
    int x = 0;
    int y = 0;
    friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
};

/// Fixed-capacity list of up to four ids, in E, N, W, S order.
template <class Id>
class SmallList {
public:
    constexpr void push_back(Id id) { items_[size_++] = id; }
    constexpr std::size_t size() const noexcept { return size_; }
    constexpr bool empty() const noexcept { return size_ == 0; }
    constexpr Id operator[](std::size_t i) const { return items_[i]; }
    constexpr const Id* begin() const noexcept { return items_.data(); }
    constexpr const Id* end() const noexcept { return items_.data() + size_; }
    std::vector<Id> to_vector() const { return {begin(), end()}; }

private:
    std::array<Id, 4> items_{};
    std::size_t size_ = 0;
};

using NeighborList = SmallList<VertexId>;

namespace detail {

constexpr int wrap(int a, int n) noexcept {
    const int r = a % n;
    return r < 0 ? r + n : r;
}

[[noreturn]] inline void range_fail(const char* what, long long id, long long count) {
    throw RangeError(std::string(what) + " id " + std::to_string(id) + " out of range [0, " +
                     std::to_string(count) + ")");
}

}  // namespace detail

class TorusGeometry {
public:
    explicit TorusGeometry(int side) : side_(side) {
        if (side < 3) throw ValidationError("torus side must be at least 3, got " + std::to_string(side));
        if (side > 46340) throw SizeError("torus side too large for 32-bit ids");
    }

    int side() const noexcept { return side_; }
    int vertex_count() const noexcept { return side_ * side_; }
    int edge_count() const noexcept { return 2 * side_ * side_; }
    int dual_vertex_count() const noexcept { return side_ * side_; }
    int plaquette_count() const noexcept { return side_ * side_; }
    int dual_edge_count() const noexcept { return 2 * side_ * side_; }

    /// Coordinates wrap around the torus.
    VertexId vertex(int x, int y) const noexcept {
        return VertexId{detail::wrap(y, side_) * side_ + detail::wrap(x, side_)};
    }
    DualVertexId dual_vertex(int x, int y) const noexcept {
        return DualVertexId{detail::wrap(y, side_) * side_ + detail::wrap(x, side_)};
    }

    Coord coords(VertexId v) const {
        check(v);
        return {index_of(v) % side_, index_of(v) / side_};
    }
    Coord dual_coords(DualVertexId p) const {
        check(p);
        return {index_of(p) % side_, index_of(p) / side_};
    }

    void check(VertexId v) const {
        if (index_of(v) < 0 || index_of(v) >= vertex_count()) detail::range_fail("vertex", index_of(v), vertex_count());
    }
    void check(EdgeId e) const {
        if (index_of(e) < 0 || index_of(e) >= edge_count()) detail::range_fail("edge", index_of(e), edge_count());
    }
    void check(DualVertexId p) const {
        if (index_of(p) < 0 || index_of(p) >= dual_vertex_count())
            detail::range_fail("dual vertex", index_of(p), dual_vertex_count());
    }
    void check(DualEdgeId d) const {
        if (index_of(d) < 0 || index_of(d) >= dual_edge_count())
            detail::range_fail("dual edge", index_of(d), dual_edge_count());
    }

    NeighborList neighbors(VertexId v) const {
        const auto [x, y] = coords(v);
        NeighborList out;
        out.push_back(vertex(x + 1, y));
        out.push_back(vertex(x, y + 1));
        out.push_back(vertex(x - 1, y));
        out.push_back(vertex(x, y - 1));
        return out;
    }

    /// Edges at v in E, N, W, S order.
    std::array<EdgeId, 4> incident_edges(VertexId v) const {
        const auto [x, y] = coords(v);
        return {EdgeId{2 * index_of(v)}, EdgeId{2 * index_of(v) + 1}, EdgeId{2 * index_of(vertex(x - 1, y))},
                EdgeId{2 * index_of(vertex(x, y - 1)) + 1}};
    }

    bool is_horizontal(EdgeId e) const {
        check(e);
        return index_of(e) % 2 == 0;
    }

    /// Tail then head; the head is the +x or +y neighbour of the tail.
    std::array<VertexId, 2> endpoints(EdgeId e) const {
        check(e);
        const VertexId tail{index_of(e) / 2};
        const auto [x, y] = coords(tail);
        return {tail, index_of(e) % 2 == 0 ? vertex(x + 1, y) : vertex(x, y + 1)};
    }

    std::optional<EdgeId> edge_between(VertexId u, VertexId v) const {
        const auto edges = incident_edges(u);
        const auto nbrs = neighbors(u);
        for (std::size_t k = 0; k < 4; ++k)
            if (nbrs[k] == v) return edges[k];
        return std::nullopt;
    }

    DualEdgeId dual_edge(EdgeId e) const {
        check(e);
        const int v = index_of(e) / 2;
        const int x = v % side_, y = v / side_;
        if (index_of(e) % 2 == 0) return DualEdgeId{2 * index_of(dual_vertex(x, y - 1)) + 1};
        return DualEdgeId{2 * index_of(dual_vertex(x - 1, y))};
    }

    EdgeId primal_edge(DualEdgeId d) const {
        check(d);
        const int p = index_of(d) / 2;
        const int x = p % side_, y = p / side_;
        if (index_of(d) % 2 == 1) return EdgeId{2 * index_of(vertex(x, y + 1))};
        return EdgeId{2 * index_of(vertex(x + 1, y)) + 1};
    }

    bool dual_is_horizontal(DualEdgeId d) const {
        check(d);
        return index_of(d) % 2 == 0;
    }

    std::array<DualVertexId, 2> dual_endpoints(DualEdgeId d) const {
        check(d);
        const DualVertexId tail{index_of(d) / 2};
        const auto [x, y] = dual_coords(tail);
        return {tail, index_of(d) % 2 == 0 ? dual_vertex(x + 1, y) : dual_vertex(x, y + 1)};
    }

    SmallList<DualEdgeId> dual_incident_edges(DualVertexId p) const {
        const auto [x, y] = dual_coords(p);
        SmallList<DualEdgeId> out;
        out.push_back(DualEdgeId{2 * index_of(p)});
        out.push_back(DualEdgeId{2 * index_of(p) + 1});
        out.push_back(DualEdgeId{2 * index_of(dual_vertex(x - 1, y))});
        out.push_back(DualEdgeId{2 * index_of(dual_vertex(x, y - 1)) + 1});
        return out;
    }

    SmallList<DualVertexId> dual_neighbors(DualVertexId p) const {
        const auto [x, y] = dual_coords(p);
        SmallList<DualVertexId> out;
        out.push_back(dual_vertex(x + 1, y));
        out.push_back(dual_vertex(x, y + 1));
        out.push_back(dual_vertex(x - 1, y));
        out.push_back(dual_vertex(x, y - 1));
        return out;
    }

    /// Bottom, right, top, left edges of the unit square p.
    std::array<EdgeId, 4> plaquette_edges(PlaquetteId p) const {
        const auto [x, y] = dual_coords(p);
        return {EdgeId{2 * index_of(vertex(x, y))}, EdgeId{2 * index_of(vertex(x + 1, y)) + 1},
                EdgeId{2 * index_of(vertex(x, y + 1))}, EdgeId{2 * index_of(vertex(x, y)) + 1}};
    }

    // Doubled-coordinate hooks for cycle_interior.
    int doubled_period() const noexcept { return 2 * side_; }
    Coord dual_doubled(DualVertexId p) const {
        const auto [x, y] = dual_coords(p);
        return {2 * x + 1, 2 * y + 1};
    }
    std::optional<VertexId> vertex_at_doubled(Coord c) const { return vertex(c.x / 2, c.y / 2); }

    friend bool operator==(const TorusGeometry&, const TorusGeometry&) = default;

private:
    int side_;
};

/// The box [N]^2, either standalone (free boundary) or embedded in a host torus.
class BoxGeometry {
public:
    explicit BoxGeometry(int side) : side_(side) {
        if (side < 1) throw ValidationError("box side must be positive, got " + std::to_string(side));
        if (side > 46340) throw SizeError("box side too large for 32-bit ids");
    }

    /// Box whose vertex (0,0) sits at `anchor` in `host`. The host must leave a
    /// ring of at least one vertex outside the box: host.side() >= side + 2.
    BoxGeometry(int side, const TorusGeometry& host, Coord anchor) : BoxGeometry(side) {
        if (host.side() < side + 2)
            throw ConfigError("host torus side " + std::to_string(host.side()) + " too small for box side " +
                              std::to_string(side) + " (need side + 2)");
        host_ = host;
        anchor_ = {detail::wrap(anchor.x, host.side()), detail::wrap(anchor.y, host.side())};
    }

    int side() const noexcept { return side_; }
    int vertex_count() const noexcept { return side_ * side_; }
    int edge_count() const noexcept { return 2 * side_ * (side_ - 1); }
    int dual_vertex_count() const noexcept { return (side_ + 1) * (side_ + 1); }
    int dual_edge_count() const noexcept { return edge_count(); }

    bool has_host() const noexcept { return host_.has_value(); }
    const TorusGeometry& host() const {
        if (!host_) throw ContractError("box has no host torus");
        return *host_;
    }
    Coord anchor() const noexcept { return anchor_; }

    VertexId vertex(int x, int y) const {
        if (x < 0 || y < 0 || x >= side_ || y >= side_)
            throw RangeError("box coordinate (" + std::to_string(x) + "," + std::to_string(y) + ") outside [0," +
                             std::to_string(side_) + ")^2");
        return VertexId{y * side_ + x};
    }
    Coord coords(VertexId v) const {
        check(v);
        return {index_of(v) % side_, index_of(v) / side_};
    }

    DualVertexId dual_vertex(int i, int j) const {
        if (i < 0 || j < 0 || i > side_ || j > side_) throw RangeError("box dual coordinate outside [0, N]^2");
        return DualVertexId{j * (side_ + 1) + i};
    }
    /// Returns (i, j); the dual vertex sits at (i - 1/2, j - 1/2).
    Coord dual_coords(DualVertexId p) const {
        check(p);
        return {index_of(p) % (side_ + 1), index_of(p) / (side_ + 1)};
    }

    void check(VertexId v) const {
        if (index_of(v) < 0 || index_of(v) >= vertex_count()) detail::range_fail("vertex", index_of(v), vertex_count());
    }
    void check(EdgeId e) const {
        if (index_of(e) < 0 || index_of(e) >= edge_count()) detail::range_fail("edge", index_of(e), edge_count());
    }
    void check(DualVertexId p) const {
        if (index_of(p) < 0 || index_of(p) >= dual_vertex_count())
            detail::range_fail("dual vertex", index_of(p), dual_vertex_count());
    }
    void check(DualEdgeId d) const {
        if (index_of(d) < 0 || index_of(d) >= dual_edge_count())
            detail::range_fail("dual edge", index_of(d), dual_edge_count());
    }

    NeighborList neighbors(VertexId v) const {
        const auto [x, y] = coords(v);
        NeighborList out;
        if (x + 1 < side_) out.push_back(VertexId{y * side_ + x + 1});
        if (y + 1 < side_) out.push_back(VertexId{(y + 1) * side_ + x});
        if (x > 0) out.push_back(VertexId{y * side_ + x - 1});
        if (y > 0) out.push_back(VertexId{(y - 1) * side_ + x});
        return out;
    }

    /// A vertex with a lattice neighbour outside the box.
    bool is_boundary(VertexId v) const {
        const auto [x, y] = coords(v);
        return x == 0 || y == 0 || x == side_ - 1 || y == side_ - 1;
    }

    std::optional<EdgeId> horizontal_edge(int x, int y) const {
        if (x < 0 || y < 0 || x >= side_ - 1 || y >= side_) return std::nullopt;
        return EdgeId{y * (side_ - 1) + x};
    }
    std::optional<EdgeId> vertical_edge(int x, int y) const {
        if (x < 0 || y < 0 || x >= side_ || y >= side_ - 1) return std::nullopt;
        return EdgeId{side_ * (side_ - 1) + y * side_ + x};
    }

    bool is_horizontal(EdgeId e) const {
        check(e);
        return index_of(e) < side_ * (side_ - 1);
    }

    std::array<VertexId, 2> endpoints(EdgeId e) const {
        check(e);
        const int i = index_of(e);
        const int h = side_ * (side_ - 1);
        if (i < h) {
            const int x = i % (side_ - 1), y = i / (side_ - 1);
            return {VertexId{y * side_ + x}, VertexId{y * side_ + x + 1}};
        }
        const int x = (i - h) % side_, y = (i - h) / side_;
        return {VertexId{y * side_ + x}, VertexId{(y + 1) * side_ + x}};
    }

    std::optional<EdgeId> edge_between(VertexId u, VertexId v) const {
        const auto a = coords(u), b = coords(v);
        if (a.y == b.y && std::abs(a.x - b.x) == 1) return horizontal_edge(std::min(a.x, b.x), a.y);
        if (a.x == b.x && std::abs(a.y - b.y) == 1) return vertical_edge(a.x, std::min(a.y, b.y));
        return std::nullopt;
    }

    DualEdgeId dual_edge(EdgeId e) const {
        check(e);
        return DualEdgeId{index_of(e)};
    }
    EdgeId primal_edge(DualEdgeId d) const {
        check(d);
        return EdgeId{index_of(d)};
    }
    bool dual_is_horizontal(DualEdgeId d) const { return !is_horizontal(primal_edge(d)); }

    std::array<DualVertexId, 2> dual_endpoints(DualEdgeId d) const {
        const auto [a, b] = endpoints(primal_edge(d));
        const auto ca = coords(a), cb = coords(b);
        if (ca.y == cb.y) return {dual_vertex(cb.x, ca.y), dual_vertex(cb.x, ca.y + 1)};
        return {dual_vertex(ca.x, cb.y), dual_vertex(ca.x + 1, cb.y)};
    }

    /// Dual edges at p in E, N, W, S order; ring vertices have fewer.
    SmallList<DualEdgeId> dual_incident_edges(DualVertexId p) const {
        const auto [i, j] = dual_coords(p);
        SmallList<DualEdgeId> out;
        if (auto e = vertical_edge(i, j - 1)) out.push_back(DualEdgeId{index_of(*e)});
        if (auto e = horizontal_edge(i - 1, j)) out.push_back(DualEdgeId{index_of(*e)});
        if (auto e = vertical_edge(i - 1, j - 1)) out.push_back(DualEdgeId{index_of(*e)});
        if (auto e = horizontal_edge(i - 1, j - 1)) out.push_back(DualEdgeId{index_of(*e)});
        return out;
    }

    /// Dual vertices on the outer ring, i.e. outside the convex hull of the box's vertices.
    bool is_boundary_dual(DualVertexId p) const {
        const auto [i, j] = dual_coords(p);
        return i == 0 || j == 0 || i == side_ || j == side_;
    }

    /// The four edges around an interior dual vertex (both coordinates in [1, N-1]).
    std::array<EdgeId, 4> plaquette_edges(PlaquetteId p) const {
        const auto [i, j] = dual_coords(p);
        if (i < 1 || j < 1 || i > side_ - 1 || j > side_ - 1)
            throw RangeError("plaquette " + std::to_string(index_of(p)) + " is not inside the box");
        return {*horizontal_edge(i - 1, j - 1), *vertical_edge(i, j - 1), *horizontal_edge(i - 1, j),
                *vertical_edge(i - 1, j - 1)};
    }

    // ---- host embedding ----

    VertexId to_host(VertexId v) const {
        const auto [x, y] = coords(v);
        return host().vertex(anchor_.x + x, anchor_.y + y);
    }

    std::optional<VertexId> from_host(VertexId hv) const {
        const auto c = host().coords(hv);
        const int L = host_->side();
        const int x = detail::wrap(c.x - anchor_.x, L), y = detail::wrap(c.y - anchor_.y, L);
        if (x >= side_ || y >= side_) return std::nullopt;
        return VertexId{y * side_ + x};
    }

    EdgeId host_edge(EdgeId e) const {
        const auto [a, b] = endpoints(e);
        return *host().edge_between(to_host(a), to_host(b));
    }

    std::optional<EdgeId> from_host_edge(EdgeId he) const {
        const auto [a, b] = host().endpoints(he);
        auto ba = from_host(a), bb = from_host(b);
        if (!ba || !bb) return std::nullopt;
        return edge_between(*ba, *bb);
    }

    DualEdgeId host_dual_edge(DualEdgeId d) const { return host().dual_edge(host_edge(primal_edge(d))); }

    std::optional<DualEdgeId> from_host_dual_edge(DualEdgeId hd) const {
        auto e = from_host_edge(host().primal_edge(hd));
        if (!e) return std::nullopt;
        return dual_edge(*e);
    }

    DualVertexId host_dual_vertex(DualVertexId p) const {
        const auto [i, j] = dual_coords(p);
        return host().dual_vertex(anchor_.x + i - 1, anchor_.y + j - 1);
    }

    /// Host vertices outside the box with a neighbour inside it.
    std::vector<VertexId> outer_boundary() const {
        std::vector<VertexId> out;
        for (int v = 0; v < vertex_count(); ++v) {
            if (!is_boundary(VertexId{v})) continue;
            for (auto hn : host().neighbors(to_host(VertexId{v})))
                if (!from_host(hn)) out.push_back(hn);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Host edges with exactly one endpoint in the box.
    std::vector<EdgeId> exterior_cut_edges() const {
        std::vector<EdgeId> out;
        for (int v = 0; v < vertex_count(); ++v) {
            if (!is_boundary(VertexId{v})) continue;
            const VertexId hv = to_host(VertexId{v});
            const auto nbrs = host().neighbors(hv);
            const auto edges = host().incident_edges(hv);
            for (std::size_t k = 0; k < 4; ++k)
                if (!from_host(nbrs[k])) out.push_back(edges[k]);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Doubled-coordinate hooks for cycle_interior.
    int doubled_period() const noexcept { return 0; }
    Coord dual_doubled(DualVertexId p) const {
        const auto [i, j] = dual_coords(p);
        return {2 * i - 1, 2 * j - 1};
    }
    std::optional<VertexId> vertex_at_doubled(Coord c) const {
        const int x = c.x / 2, y = c.y / 2;
        if (c.x < 0 || c.y < 0 || x >= side_ || y >= side_) return std::nullopt;
        return VertexId{y * side_ + x};
    }

private:
    int side_;
    std::optional<TorusGeometry> host_;
    Coord anchor_{};
};

template <class G>
concept Geometry = requires(const G& g, VertexId v, DualEdgeId d, DualVertexId p, Coord c) {
    { g.vertex_count() } -> std::convertible_to<int>;
    { g.neighbors(v) } -> std::same_as<NeighborList>;
    { g.dual_endpoints(d) } -> std::same_as<std::array<DualVertexId, 2>>;
    { g.dual_doubled(p) } -> std::same_as<Coord>;
    { g.doubled_period() } -> std::convertible_to<int>;
    { g.vertex_at_doubled(c) } -> std::same_as<std::optional<VertexId>>;
};

template <Geometry G>
NeighborList neighbors(const G& geom, VertexId v) {
    return geom.neighbors(v);
}

/// Orders the dual edges of a simple closed dual cycle into a walk.
/// Returns the visited dual vertices; vertex k is followed by edge k.
template <Geometry G>
std::vector<DualVertexId> order_dual_cycle(const G& geom, std::span<const DualEdgeId> cycle,
                                           std::vector<DualEdgeId>* ordered_edges = nullptr) {
    if (cycle.size() < 2) throw ValidationError("a dual cycle needs at least two edges");
    std::unordered_map<std::int32_t, std::vector<std::size_t>> incidence;
    {
        std::vector<DualEdgeId> sorted(cycle.begin(), cycle.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("dual cycle repeats an edge");
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const auto [a, b] = geom.dual_endpoints(cycle[k]);
        if (a == b) throw ValidationError("dual edge is a loop");
        incidence[index_of(a)].push_back(k);
        incidence[index_of(b)].push_back(k);
    }
    for (const auto& [vid, edges] : incidence)
        if (edges.size() != 2) throw ValidationError("dual vertex " + std::to_string(vid) + " has degree " +
                                                     std::to_string(edges.size()) + " in the cycle (need 2)");

    std::vector<DualVertexId> walk;
    std::vector<DualEdgeId> edges_out;
    DualVertexId current = geom.dual_endpoints(cycle[0])[0];
    std::size_t via = 0;
    for (std::size_t step = 0; step < cycle.size(); ++step) {
        walk.push_back(current);
        edges_out.push_back(cycle[via]);
        const auto [a, b] = geom.dual_endpoints(cycle[via]);
        current = (a == current) ? b : a;
        if (current == walk.front() && step + 1 < cycle.size())
            throw ValidationError("dual edges do not form a single simple cycle");
        const auto& inc = incidence[index_of(current)];
        via = inc[0] == via ? inc[1] : inc[0];
    }
    if (current != walk.front() || incidence.size() != cycle.size())
        throw ValidationError("dual edges do not form a single simple cycle");
    if (ordered_edges) *ordered_edges = std::move(edges_out);
    return walk;
}

/// Signed winding of a dual cycle around the two torus axes (always zero on a box).
template <Geometry G>
Coord cycle_winding(const G& geom, std::span<const DualEdgeId> cycle) {
    const auto walk = order_dual_cycle(geom, cycle);
    const int period = geom.doubled_period();
    Coord total{0, 0};
    for (std::size_t k = 0; k < walk.size(); ++k) {
        const Coord a = geom.dual_doubled(walk[k]);
        const Coord b = geom.dual_doubled(walk[(k + 1) % walk.size()]);
        int dx = b.x - a.x, dy = b.y - a.y;
        if (period > 0) {
            dx = detail::wrap(dx + period / 2, period) - period / 2;
            dy = detail::wrap(dy + period / 2, period) - period / 2;
        }
        total.x += dx;
        total.y += dy;
    }
    if (period > 0) return {total.x / period, total.y / period};
    return {0, 0};
}

/// Primal vertices enclosed by a simple contractible dual cycle, sorted by id.
///
/// The cycle is unwrapped into the plane and each candidate vertex is
/// tested with an even-odd count of vertical cycle edges to its right.
template <Geometry G>
std::vector<VertexId> cycle_interior(const G& geom, std::span<const DualEdgeId> cycle) {
    const auto walk = order_dual_cycle(geom, cycle);
    const int period = geom.doubled_period();

    std::vector<Coord> pts;
    pts.reserve(walk.size() + 1);
    pts.push_back(geom.dual_doubled(walk[0]));
    for (std::size_t k = 1; k <= walk.size(); ++k) {
        const Coord a = geom.dual_doubled(walk[k - 1]);
        const Coord b = geom.dual_doubled(walk[k % walk.size()]);
        int dx = b.x - a.x, dy = b.y - a.y;
        if (period > 0) {
            dx = detail::wrap(dx + period / 2, period) - period / 2;
            dy = detail::wrap(dy + period / 2, period) - period / 2;
        }
        if (std::abs(dx) + std::abs(dy) != 2) throw ValidationError("dual cycle has a non-unit step");
        pts.push_back({pts.back().x + dx, pts.back().y + dy});
    }
    if (pts.back() != pts.front())
        throw NoInteriorError("dual cycle winds around the torus and bounds no finite region");

    int xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }

    std::vector<VertexId> inside;
    // Candidate vertices are the even points strictly inside the bounding box.
    for (int Y = ymin + 1; Y < ymax; Y += 2) {
        for (int X = xmin + 1; X < xmax; X += 2) {
            int crossings = 0;
            for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
                const Coord a = pts[k], b = pts[k + 1];
                if (a.x != b.x || a.x < X) continue;
                if (std::min(a.y, b.y) < Y && Y < std::max(a.y, b.y)) ++crossings;
            }
            if (crossings % 2 == 0) continue;
            Coord c{X, Y};
            if (period > 0) c = {detail::wrap(X, period), detail::wrap(Y, period)};
            auto v = geom.vertex_at_doubled(c);
            if (!v) throw InvariantViolation("cycle interior escapes the geometry");
            inside.push_back(*v);
        }
    }
    std::sort(inside.begin(), inside.end());
    if (std::adjacent_find(inside.begin(), inside.end()) != inside.end())
        throw NoInteriorError("cycle interior overlaps itself on the torus");
    return inside;
}

/// Dual cycle around the k-by-k block of torus vertices with lower-left corner (x, y).
inline std::vector<DualEdgeId> block_boundary_cycle(const TorusGeometry& g, int x, int y, int k) {
    std::vector<DualEdgeId> out;
    for (int i = 0; i < k; ++i) {
        out.push_back(g.dual_edge(EdgeId{2 * index_of(g.vertex(x + i, y - 1)) + 1}));  // crosses bottom
        out.push_back(g.dual_edge(EdgeId{2 * index_of(g.vertex(x + i, y + k - 1)) + 1}));  // crosses top
        out.push_back(g.dual_edge(EdgeId{2 * index_of(g.vertex(x - 1, y + i))}));  // crosses left
        out.push_back(g.dual_edge(EdgeId{2 * index_of(g.vertex(x + k - 1, y + i))}));  // crosses right
    }
    return out;
}

}  // namespace ealab
