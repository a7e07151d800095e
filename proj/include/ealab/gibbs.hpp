#pragma once

// Hamiltonians and finite-volume Gibbs measures of the Edwards-Anderson model
// on a torus: exact Boltzmann tables, heat-bath sampling, region flips,
// loop dynamics and ground-state checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ealab/disorder.hpp"
#include "ealab/error.hpp"
#include "ealab/graph.hpp"
#include "ealab/lattice.hpp"
#include "ealab/rng.hpp"

namespace ealab {

using Spin = std::int8_t;

class SpinConfig {
public:
    /// All spins +1.
    explicit SpinConfig(TorusGeometry geom) : geom_(geom), spins_(static_cast<std::size_t>(geom.vertex_count()), 1) {}

    SpinConfig(TorusGeometry geom, std::vector<Spin> spins) : geom_(geom), spins_(std::move(spins)) {
        if (static_cast<int>(spins_.size()) != geom_.vertex_count())
            throw ValidationError("spin vector length " + std::to_string(spins_.size()) + " does not match " +
                                  std::to_string(geom_.vertex_count()) + " vertices");
        for (auto s : spins_)
            if (s != 1 && s != -1) throw ValidationError("spin values must be +1 or -1");
    }

    static SpinConfig random(TorusGeometry geom, Rng& rng) {
        SpinConfig c(geom);
        for (auto& s : c.spins_) s = rng.bernoulli(0.5) ? Spin{1} : Spin{-1};
        return c;
    }

    const TorusGeometry& geometry() const noexcept { return geom_; }
    std::span<const Spin> spins() const noexcept { return spins_; }
    std::size_t size() const noexcept { return spins_.size(); }

    Spin operator[](VertexId v) const {
        geom_.check(v);
        return spins_[static_cast<std::size_t>(index_of(v))];
    }
    Spin at_index(std::size_t i) const noexcept { return spins_[i]; }

    void set(VertexId v, Spin s) {
        geom_.check(v);
        if (s != 1 && s != -1) throw ValidationError("spin values must be +1 or -1");
        spins_[static_cast<std::size_t>(index_of(v))] = s;
    }
    void flip(VertexId v) {
        geom_.check(v);
        spins_[static_cast<std::size_t>(index_of(v))] = static_cast<Spin>(-spins_[static_cast<std::size_t>(index_of(v))]);
    }
    void set_index(std::size_t i, Spin s) noexcept { spins_[i] = s; }
    void flip_all() {
        for (auto& s : spins_) s = static_cast<Spin>(-s);
    }

    friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

private:
    TorusGeometry geom_;
    std::vector<Spin> spins_;
};

/// Inverse temperature; `infinite()` stands for zero temperature.
class InverseTemperature {
public:
    constexpr InverseTemperature() = default;
    explicit InverseTemperature(double beta) : beta_(beta) {
        if (!(beta >= 0.0) || std::isinf(beta))
            throw ValidationError("inverse temperature must be finite and non-negative (use infinite())");
    }
    static constexpr InverseTemperature infinite() {
        InverseTemperature t;
        t.infinite_ = true;
        return t;
    }
    constexpr bool is_infinite() const noexcept { return infinite_; }
    double value() const {
        if (infinite_) throw ContractError("inverse temperature is infinite");
        return beta_;
    }

private:
    double beta_ = 0.0;
    bool infinite_ = false;
};

namespace detail {

inline void require_same_geometry(const Couplings& w, const SpinConfig& s) {
    if (w.geometry() != s.geometry()) throw ContractError("couplings and spins live on different tori");
}

inline double log_sum_exp(std::span<const double> x) {
    const double m = *std::max_element(x.begin(), x.end());
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

}  // namespace detail

/// H(sigma) = -sum over torus edges of w_e sigma_x sigma_y.
inline double torus_hamiltonian(const Couplings& w, const SpinConfig& s) {
    detail::require_same_geometry(w, s);
    const auto& g = w.geometry();
    double h = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto [a, b] = g.endpoints(EdgeId{e});
        h -= w.at_index(static_cast<std::size_t>(e)) * s.at_index(static_cast<std::size_t>(index_of(a))) *
             s.at_index(static_cast<std::size_t>(index_of(b)));
    }
    return h;
}

/// Sum of w_e sigma_u over the four edges at v.
inline double local_field(const Couplings& w, const SpinConfig& s, VertexId v) {
    const auto& g = w.geometry();
    const auto edges = g.incident_edges(v);
    const auto nbrs = g.neighbors(v);
    double h = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
        h += w.at_index(static_cast<std::size_t>(index_of(edges[k]))) * s.at_index(static_cast<std::size_t>(index_of(nbrs[k])));
    return h;
}

/// Heat-bath probability of spin +1 in local field h: e^{bh} / (e^{bh} + e^{-bh}).
inline double heat_bath_up_probability(double h, double beta) { return 1.0 / (1.0 + std::exp(-2.0 * beta * h)); }

/// Vertices of the closure C-bar = C plus its outer vertex boundary, and the
/// edges the restricted Hamiltonian sums over.
struct RestrictedSystem {
    std::vector<VertexId> box_sites;         // host ids of C, box order
    std::vector<VertexId> outer_boundary;    // host ids of the outer boundary
    std::vector<EdgeId> edges;               // host edges with both ends in C-bar
};

inline RestrictedSystem restricted_system(const BoxGeometry& box) {
    const auto& host = box.host();
    RestrictedSystem sys;
    for (int v = 0; v < box.vertex_count(); ++v) sys.box_sites.push_back(box.to_host(VertexId{v}));
    sys.outer_boundary = box.outer_boundary();
    std::vector<char> in_closure(static_cast<std::size_t>(host.vertex_count()), 0);
    for (auto v : sys.box_sites) in_closure[static_cast<std::size_t>(index_of(v))] = 1;
    for (auto v : sys.outer_boundary) in_closure[static_cast<std::size_t>(index_of(v))] = 1;
    for (int e = 0; e < host.edge_count(); ++e) {
        const auto [a, b] = host.endpoints(EdgeId{e});
        if (in_closure[static_cast<std::size_t>(index_of(a))] && in_closure[static_cast<std::size_t>(index_of(b))])
            sys.edges.push_back(EdgeId{e});
    }
    return sys;
}

/// H^{C,tau}(sigma): -sum of w_xy sigma_x sigma_y over neighbouring x, y in C-bar.
///
/// `sigma` and `tau` are full host configurations; sigma supplies the spins
/// on C and must agree with tau on the outer boundary.
inline double restricted_hamiltonian(const Couplings& w, const BoxGeometry& box, const SpinConfig& sigma,
                                     const SpinConfig& tau) {
    detail::require_same_geometry(w, sigma);
    detail::require_same_geometry(w, tau);
    if (box.host() != w.geometry()) throw ContractError("box host differs from the coupling torus");
    const auto sys = restricted_system(box);
    for (auto v : sys.outer_boundary)
        if (sigma[v] != tau[v])
            throw ContractError("sigma disagrees with boundary condition at vertex " + std::to_string(index_of(v)));
    double h = 0.0;
    for (auto e : sys.edges) {
        const auto [a, b] = w.geometry().endpoints(e);
        h -= w[e] * sigma[a] * sigma[b];
    }
    return h;
}

/// Probability table over the 2^|C| configurations of a box given its exterior.
/// State bit k set means box site k (box vertex id k) carries spin +1.
struct BoltzmannTable {
    std::vector<VertexId> sites;
    std::vector<double> probabilities;
    std::vector<double> energies;
    double log_partition = 0.0;

    /// Writes state `index` into a copy of `base`.
    SpinConfig configuration(std::size_t index, SpinConfig base) const {
        for (std::size_t k = 0; k < sites.size(); ++k) base.set(sites[k], (index >> k) & 1u ? Spin{1} : Spin{-1});
        return base;
    }

    std::size_t index_of_config(const SpinConfig& s) const {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < sites.size(); ++k)
            if (s[sites[k]] == 1) idx |= std::size_t{1} << k;
        return idx;
    }
};

inline constexpr int kMaxEnumeratedSites = 25;

namespace detail {

// Normalises exp(-beta * energy) with log-sum-exp.
inline void normalise_table(BoltzmannTable& t, double beta) {
    std::vector<double> logw(t.energies.size());
    for (std::size_t i = 0; i < logw.size(); ++i) logw[i] = -beta * t.energies[i];
    t.log_partition = log_sum_exp(logw);
    t.probabilities.resize(logw.size());
    for (std::size_t i = 0; i < logw.size(); ++i) t.probabilities[i] = std::exp(logw[i] - t.log_partition);
}

}  // namespace detail

inline BoltzmannTable exact_boltzmann(const Couplings& w, const BoxGeometry& box, const SpinConfig& tau,
                                      InverseTemperature beta) {
    if (beta.is_infinite()) throw ValidationError("exact_boltzmann needs a finite inverse temperature");
    if (box.vertex_count() > kMaxEnumeratedSites)
        throw SizeError("box has " + std::to_string(box.vertex_count()) + " sites; enumeration cap is " +
                        std::to_string(kMaxEnumeratedSites));
    detail::require_same_geometry(w, tau);
    if (box.host() != w.geometry()) throw ContractError("box host differs from the coupling torus");

    const auto sys = restricted_system(box);
    const auto& host = w.geometry();
    std::vector<int> site_slot(static_cast<std::size_t>(host.vertex_count()), -1);
    for (std::size_t k = 0; k < sys.box_sites.size(); ++k)
        site_slot[static_cast<std::size_t>(index_of(sys.box_sites[k]))] = static_cast<int>(k);

    // Each edge: (slot or -1, fixed spin) for both ends.
    struct Term {
        int slot_a, slot_b;
        double coeff;  // w_e times the fixed spins
    };
    std::vector<Term> terms;
    double constant = 0.0;
    for (auto e : sys.edges) {
        const auto [a, b] = host.endpoints(e);
        const int sa = site_slot[static_cast<std::size_t>(index_of(a))];
        const int sb = site_slot[static_cast<std::size_t>(index_of(b))];
        double c = w[e];
        if (sa < 0) c *= tau[a];
        if (sb < 0) c *= tau[b];
        if (sa < 0 && sb < 0)
            constant -= c;
        else
            terms.push_back({sa, sb, c});
    }

    BoltzmannTable t;
    t.sites = sys.box_sites;
    const std::size_t n_states = std::size_t{1} << t.sites.size();
    t.energies.resize(n_states);
    for (std::size_t state = 0; state < n_states; ++state) {
        double h = constant;
        for (const auto& term : terms) {
            const double sa = term.slot_a < 0 ? 1.0 : ((state >> term.slot_a) & 1u ? 1.0 : -1.0);
            const double sb = term.slot_b < 0 ? 1.0 : ((state >> term.slot_b) & 1u ? 1.0 : -1.0);
            h -= term.coeff * sa * sb;
        }
        t.energies[state] = h;
    }
    detail::normalise_table(t, beta.value());
    return t;
}

/// Boltzmann table of the whole torus (at most 25 sites). Site k is vertex k.
inline BoltzmannTable exact_torus_boltzmann(const Couplings& w, InverseTemperature beta) {
    if (beta.is_infinite()) throw ValidationError("exact_torus_boltzmann needs a finite inverse temperature");
    const auto& g = w.geometry();
    if (g.vertex_count() > kMaxEnumeratedSites) throw SizeError("torus too large for exact enumeration");
    BoltzmannTable t;
    for (int v = 0; v < g.vertex_count(); ++v) t.sites.push_back(VertexId{v});
    const std::size_t n_states = std::size_t{1} << t.sites.size();
    t.energies.resize(n_states);
    SpinConfig s(g);
    for (std::size_t state = 0; state < n_states; ++state) {
        s = t.configuration(state, std::move(s));
        t.energies[state] = torus_hamiltonian(w, s);
    }
    detail::normalise_table(t, beta.value());
    return t;
}

/// One sequential heat-bath sweep over all vertices in id order.
/// `on_update(s)` runs after every single-site update.
template <class OnUpdate>
void glauber_sweep(const Couplings& w, SpinConfig& s, double beta, Rng& rng, OnUpdate&& on_update) {
    detail::require_same_geometry(w, s);
    const int n = w.geometry().vertex_count();
    for (int v = 0; v < n; ++v) {
        const double h = local_field(w, s, VertexId{v});
        s.set_index(static_cast<std::size_t>(v), rng.uniform() < heat_bath_up_probability(h, beta) ? Spin{1} : Spin{-1});
        on_update(static_cast<const SpinConfig&>(s));
    }
}

inline void glauber_sweep(const Couplings& w, SpinConfig& s, double beta, Rng& rng) {
    glauber_sweep(w, s, beta, rng, [](const SpinConfig&) {});
}

/// Probability that a heat-bath update at v moves s to s with v flipped.
inline double heat_bath_flip_probability(const Couplings& w, const SpinConfig& s, VertexId v, double beta) {
    const double up = heat_bath_up_probability(local_field(w, s, v), beta);
    return s[v] == 1 ? 1.0 - up : up;
}

struct EaSample {
    Couplings couplings;
    SpinConfig spins;
};

/// Default burn-in: 1000 sweeps per unit of side length.
inline int default_burn_in(int side) { return 1000 * side; }

/// Draws the disorder from `seed`, starts from a uniform random
/// configuration and runs `burn_in_sweeps` heat-bath sweeps.
inline EaSample sample_ea_pair(int side, std::uint64_t seed, double beta, int burn_in_sweeps, Rng& rng) {
    if (burn_in_sweeps < 0) throw ValidationError("burn-in sweeps must be non-negative");
    InverseTemperature checked(beta);
    (void)checked;
    const TorusGeometry g(side);
    auto w = sample_couplings(g, seed);
    auto s = SpinConfig::random(g, rng);
    for (int k = 0; k < burn_in_sweeps; ++k) glauber_sweep(w, s, beta, rng);
    return {std::move(w), std::move(s)};
}

/// H(sigma^R) - H(sigma) = 2 * sum over cut edges E(R, R^c) of w_e sigma_x sigma_y.
inline double flip_region_delta(const Couplings& w, const SpinConfig& s, std::span<const VertexId> region) {
    detail::require_same_geometry(w, s);
    const auto& g = w.geometry();
    std::vector<char> in(static_cast<std::size_t>(g.vertex_count()), 0);
    for (auto v : region) {
        g.check(v);
        in[static_cast<std::size_t>(index_of(v))] = 1;
    }
    double cut = 0.0;
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (!in[static_cast<std::size_t>(v)]) continue;
        const auto edges = g.incident_edges(VertexId{v});
        const auto nbrs = g.neighbors(VertexId{v});
        for (std::size_t k = 0; k < 4; ++k) {
            if (in[static_cast<std::size_t>(index_of(nbrs[k]))]) continue;
            cut += w.at_index(static_cast<std::size_t>(index_of(edges[k]))) * s.at_index(static_cast<std::size_t>(v)) *
                   s.at_index(static_cast<std::size_t>(index_of(nbrs[k])));
        }
    }
    return 2.0 * cut;
}

/// Connected vertex sets of the torus with 1..max_size vertices, each once.
inline std::vector<std::vector<VertexId>> connected_regions(const TorusGeometry& g, int max_size) {
    std::vector<std::vector<VertexId>> out;
    for_each_connected_subset(
        g.vertex_count(), max_size,
        [&](int v) {
            std::vector<int> nb;
            for (auto u : g.neighbors(VertexId{v})) nb.push_back(index_of(u));
            return nb;
        },
        [&](const std::vector<int>& subset) {
            std::vector<VertexId> r;
            r.reserve(subset.size());
            for (int v : subset) r.push_back(VertexId{v});
            std::sort(r.begin(), r.end());
            out.push_back(std::move(r));
        });
    return out;
}

// ---------------------------------------------------------------- loop dynamics

struct LoopDynamicsConfig {
    double rate_decay = 3.0;       // r_C = exp(-rate_decay * |C|)
    int max_subset_size = 4;
    double horizon = 100.0;
    double record_interval = 10.0;  // snapshot spacing along the trajectory
    std::size_t max_events = 50'000'000;

    void validate() const {
        if (!(rate_decay > 0.0) || !std::isfinite(rate_decay)) throw ConfigError("rate decay must be positive");
        if (max_subset_size < 1 || max_subset_size > 8) throw SizeError("loop dynamics tracks subsets of size 1..8");
        if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be positive and finite");
        if (!(record_interval > 0.0)) throw ConfigError("record interval must be positive");
    }
};

struct TrajectoryPoint {
    double time;
    double energy;
    SpinConfig spins;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::vector<std::pair<double, double>> energy_at_flips;  // (time, energy after the flip)
    std::size_t events = 0;
    std::size_t flips = 0;
    double rate_load = 0.0;  // max over edges of sum_{C touching e} r_C |C|
};

/// Thrown when the event cap is hit; carries what was simulated so far.
class LoopDynamicsTruncated : public BoundedRunError {
public:
    LoopDynamicsTruncated(const std::string& msg, Trajectory partial)
        : BoundedRunError(msg), partial_(std::move(partial)) {}
    const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

/// Acceptance probability for a proposed flip whose energy change is 2*delta.
inline double loop_flip_probability(double delta, InverseTemperature beta) {
    if (beta.is_infinite()) return delta < 0.0 ? 1.0 : 0.0;
    const double b = beta.value();
    // e^{-b d} / (e^{-b d} + e^{b d}) = 1 / (1 + e^{2 b d})
    return 1.0 / (1.0 + std::exp(2.0 * b * delta));
}

/// Continuous-time loop dynamics: every tracked connected set C carries a
/// Poisson clock of rate exp(-a|C|); when it rings C is flipped with
/// loop_flip_probability. Clocks are realised as one superposed stream.
inline Trajectory loop_dynamics_run(const Couplings& w, SpinConfig s, InverseTemperature beta,
                                    const LoopDynamicsConfig& cfg, Rng& rng) {
    cfg.validate();
    detail::require_same_geometry(w, s);
    const auto& g = w.geometry();
    const auto regions = connected_regions(g, cfg.max_subset_size);

    std::vector<std::vector<std::size_t>> by_size(static_cast<std::size_t>(cfg.max_subset_size) + 1);
    for (std::size_t k = 0; k < regions.size(); ++k) by_size[regions[k].size()].push_back(k);
    std::vector<double> size_rate(by_size.size(), 0.0);
    double total_rate = 0.0;
    for (std::size_t m = 1; m < by_size.size(); ++m) {
        size_rate[m] = static_cast<double>(by_size[m].size()) * std::exp(-cfg.rate_decay * static_cast<double>(m));
        total_rate += size_rate[m];
    }

    Trajectory traj;
    // Rate load on the two edges at vertex 0 (all others are translates).
    for (EdgeId e : {EdgeId{0}, EdgeId{1}}) {
        const auto [a, b] = g.endpoints(e);
        double load = 0.0;
        for (const auto& r : regions)
            if (std::binary_search(r.begin(), r.end(), a) || std::binary_search(r.begin(), r.end(), b))
                load += std::exp(-cfg.rate_decay * static_cast<double>(r.size())) * static_cast<double>(r.size());
        traj.rate_load = std::max(traj.rate_load, load);
    }
    if (!std::isfinite(traj.rate_load) || !std::isfinite(total_rate) || total_rate <= 0.0)
        throw ConfigError("loop dynamics rates are not summable");

    double energy = torus_hamiltonian(w, s);
    double t = 0.0;
    double next_record = 0.0;
    auto record_until = [&](double time) {
        while (next_record <= time && next_record <= cfg.horizon) {
            traj.points.push_back({next_record, energy, s});
            next_record += cfg.record_interval;
        }
    };

    for (;;) {
        const double dt = rng.exponential(total_rate);
        if (t + dt > cfg.horizon) {
            record_until(cfg.horizon);
            if (traj.points.empty() || traj.points.back().time < cfg.horizon)
                traj.points.push_back({cfg.horizon, energy, s});
            break;
        }
        record_until(t + dt);
        t += dt;
        if (traj.events >= cfg.max_events)
            throw LoopDynamicsTruncated("loop dynamics hit the event cap of " + std::to_string(cfg.max_events) +
                                            " at time " + std::to_string(t),
                                        std::move(traj));
        ++traj.events;
        // Pick the ringing clock: first its size class, then uniformly within it.
        double u = rng.uniform() * total_rate;
        std::size_t m = 1;
        while (m + 1 < size_rate.size() && u >= size_rate[m]) {
            u -= size_rate[m];
            ++m;
        }
        const auto& group = by_size[m];
        const auto& region = regions[group[rng.below(group.size())]];
        const double twice_delta = flip_region_delta(w, s, region);
        if (rng.uniform() < loop_flip_probability(0.5 * twice_delta, beta)) {
            for (auto v : region) s.flip(v);
            energy += twice_delta;
            ++traj.flips;
            traj.energy_at_flips.emplace_back(t, energy);
        }
    }
    return traj;
}

// ------------------------------------------------------------- ground states

struct GroundStateVerdict {
    bool pass = true;
    bool tie = false;                   // the witness has delta exactly 0
    std::vector<VertexId> witness;      // region whose flip does not increase H
    double delta = 0.0;                 // H(sigma^witness) - H(sigma)
    std::size_t regions_checked = 0;
};

inline constexpr int kMaxGroundStateRegion = 8;
inline constexpr int kFullSubsetCheckSize = 4;

/// Checks that no flip of a connected region of at most k vertices lowers or
/// keeps the energy. Regions of size <= 4 are additionally checked against
/// every sub-configuration (all subsets of the region flipped).
inline GroundStateVerdict check_ground_state(const Couplings& w, const SpinConfig& s, int k) {
    if (k < 1) throw ValidationError("region size must be at least 1");
    if (k > kMaxGroundStateRegion)
        throw SizeError("ground-state check enumerates regions up to size " + std::to_string(kMaxGroundStateRegion));
    detail::require_same_geometry(w, s);
    const auto& g = w.geometry();

    GroundStateVerdict verdict;
    auto consider = [&](std::vector<VertexId> region, double delta) {
        ++verdict.regions_checked;
        if (static_cast<int>(region.size()) == g.vertex_count()) return;  // global flip is a symmetry
        if (delta > 0.0) return;
        const bool better = verdict.pass || region.size() < verdict.witness.size() ||
                            (region.size() == verdict.witness.size() && delta < verdict.delta);
        if (better) {
            verdict.pass = false;
            verdict.tie = (delta == 0.0);
            verdict.witness = std::move(region);
            verdict.delta = delta;
        }
    };

    for (const auto& region : connected_regions(g, k)) {
        consider(region, flip_region_delta(w, s, region));
        if (static_cast<int>(region.size()) <= kFullSubsetCheckSize && region.size() > 1) {
            const std::size_t n = region.size();
            for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
                std::vector<VertexId> sub;
                for (std::size_t b = 0; b < n; ++b)
                    if (mask >> b & 1u) sub.push_back(region[b]);
                consider(sub, flip_region_delta(w, s, sub));
            }
        }
    }
    return verdict;
}

/// Spin overlap q = (1/|V|) sum sigma_v tau_v.
inline double overlap(const SpinConfig& a, const SpinConfig& b) {
    if (a.geometry() != b.geometry()) throw ContractError("overlap of configurations on different tori");
    double q = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) q += a.at_index(i) * b.at_index(i);
    return q / static_cast<double>(a.size());
}

}  // namespace ealab
