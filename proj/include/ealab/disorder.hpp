#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ealab/error.hpp"
#include "ealab/lattice.hpp"
#include "ealab/rng.hpp"

namespace ealab {

/// The disorder field: one real coupling per torus edge.
class Couplings {
public:
    Couplings(TorusGeometry geom, std::vector<double> weights, std::uint64_t seed = 0)
        : geom_(geom), weights_(std::move(weights)), seed_(seed) {
        if (static_cast<int>(weights_.size()) != geom_.edge_count())
            throw ValidationError("coupling vector has " + std::to_string(weights_.size()) + " entries, geometry has " +
                                  std::to_string(geom_.edge_count()) + " edges");
    }

    const TorusGeometry& geometry() const noexcept { return geom_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const double> weights() const noexcept { return weights_; }

    double operator[](EdgeId e) const {
        geom_.check(e);
        return weights_[static_cast<std::size_t>(index_of(e))];
    }

    /// Unchecked access for inner loops.
    double at_index(std::size_t i) const noexcept { return weights_[i]; }

    friend bool operator==(const Couplings&, const Couplings&) = default;

private:
    TorusGeometry geom_;
    std::vector<double> weights_;
    std::uint64_t seed_;
};

/// Standard normal coupling for the edge leaving (x, y) in direction `vertical`.
///
/// The draw is a pure function of (seed, x, y, orientation), so an edge keeps
/// its weight no matter how edges are enumerated or how large the torus is.
inline double coupling_draw(std::uint64_t seed, int x, int y, bool vertical) {
    const std::uint64_t counter = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
                                  (static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)) << 1) |
                                  (vertical ? 1u : 0u);
    return normal_from_bits(counter_hash(seed, 2 * counter), counter_hash(seed, 2 * counter + 1));
}

inline Couplings sample_couplings(const TorusGeometry& geom, std::uint64_t seed) {
    std::vector<double> w(static_cast<std::size_t>(geom.edge_count()));
    for (int e = 0; e < geom.edge_count(); ++e) {
        const auto c = geom.coords(VertexId{e / 2});
        w[static_cast<std::size_t>(e)] = coupling_draw(seed, c.x, c.y, e % 2 == 1);
    }
    return Couplings(geom, std::move(w), seed);
}

/// w(S) = sum of w_e over S, or |w|(S) = sum of |w_e| when `absolute`.
inline double graph_weight(const Couplings& w, std::span<const EdgeId> edges, bool absolute = false) {
    double total = 0.0;
    for (auto e : edges) total += absolute ? std::abs(w[e]) : w[e];
    return total;
}

}  // namespace ealab
