#pragma once

// Experiment drivers: flip-bound measurement, unsatisfied-cluster sweeps over
// beta, unsatisfied-cycle census and the sample-to-flip pipeline.
//
// Seeding: the disorder of replica r is drawn from derive_seed(seed, {1, r})
// for every beta, so replicas are paired across temperatures. Chain c of
// replica r at beta index b runs on derive_seed(seed, {2, r, c, b}).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ealab/analysis.hpp"
#include "ealab/disorder.hpp"
#include "ealab/enumerate.hpp"
#include "ealab/error.hpp"
#include "ealab/forest.hpp"
#include "ealab/frustration.hpp"
#include "ealab/gibbs.hpp"
#include "ealab/lattice.hpp"
#include "ealab/rng.hpp"

namespace ealab {

struct ExperimentConfig {
    int side = 16;
    std::vector<double> betas{2.0};
    int replicas = 1;
    int chains = 1;
    int sweeps = 0;  // 0: default_burn_in(side)
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    int cycle_len_cap = 8;
    double forest_decay = 1.0;
    std::optional<double> forest_theta;
    int window = 0;  // 0: side - 2
    int jobs = 1;

    int effective_sweeps() const { return sweeps > 0 ? sweeps : default_burn_in(side); }
    int effective_window() const { return window > 0 ? window : side - 2; }

    void validate() const {
        if (side < 3) throw ConfigError("side must be at least 3");
        if (betas.empty()) throw ConfigError("beta list is empty");
        for (double b : betas)
            if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("beta values must be finite and non-negative");
        if (replicas < 1 || chains < 1) throw ConfigError("replica and chain counts must be positive");
        if (sweeps < 0) throw ConfigError("sweeps must be non-negative");
        if (cycle_len_cap < 1) throw ConfigError("cycle length cap must be positive");
        if (!(forest_decay > 0.0)) throw ConfigError("forest decay must be positive");
        if (forest_theta && !(*forest_theta > 0.0)) throw ConfigError("forest theta must be positive");
        if (window < 0 || effective_window() < 1 || effective_window() > side - 2)
            throw ConfigError("window side must lie in [1, side - 2]");
        if (jobs < 1) throw ConfigError("jobs must be positive");
    }
};

inline std::uint64_t disorder_seed(std::uint64_t seed, int replica) {
    return derive_seed(seed, {1, static_cast<std::uint64_t>(replica)});
}

inline std::uint64_t chain_seed(std::uint64_t seed, int replica, int chain, int beta_index) {
    return derive_seed(seed, {2, static_cast<std::uint64_t>(replica), static_cast<std::uint64_t>(chain),
                              static_cast<std::uint64_t>(beta_index)});
}

/// Runs task(i) for i in [0, n) on up to `jobs` threads. Results must be
/// written to per-index slots, which keeps the merge order fixed. The first
/// exception (lowest index) is rethrown after all workers stop.
template <class Task>
void run_work_queue(std::size_t n, int jobs, Task&& task) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 0; k < std::min<int>(jobs, static_cast<int>(n)); ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Random start followed by `sweeps` heat-bath sweeps.
inline SpinConfig equilibrate(const Couplings& w, double beta, int sweeps, Rng& rng) {
    auto s = SpinConfig::random(w.geometry(), rng);
    for (int k = 0; k < sweeps; ++k) glauber_sweep(w, s, beta, rng);
    return s;
}

// ------------------------------------------------------------ flip bound

struct TailRow {
    double c = 0.0;
    double frequency = 0.0;  // P(sum over gamma of w sigma sigma <= -c)
    double bound = 0.0;      // exp(-2 beta c)
};

struct FlipBoundResult {
    std::vector<DualEdgeId> cycle;
    double abs_weight = 0.0;    // |w|(gamma)
    std::size_t trials = 0;
    std::size_t hits = 0;       // samples with every edge of gamma unsatisfied
    double frequency = 0.0;
    double bound = 0.0;         // exp(-2 beta |w|(gamma))
    double standard_error = 0.0;  // binomial, evaluated at the bound
    bool pass = false;          // frequency < bound + 3 standard errors
    std::vector<TailRow> tail;
};

inline constexpr std::size_t kMinFlipTrials = 10'000;

/// Default c grid for the signed-weight tail check.
inline std::vector<double> default_tail_grid() { return {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0}; }

/// Measures P(gamma all unsatisfied) for each cycle from one heat-bath chain,
/// one sample per sweep after `burn_in` sweeps.
inline std::vector<FlipBoundResult> run_flip_bound_check(const Couplings& w, double beta,
                                                         const std::vector<std::vector<DualEdgeId>>& cycles,
                                                         std::size_t trials, Rng& rng, int burn_in = -1,
                                                         std::vector<double> tail_grid = default_tail_grid()) {
    const auto& g = w.geometry();
    InverseTemperature checked(beta);
    (void)checked;
    if (trials < kMinFlipTrials) throw ValidationError("flip-bound check needs at least 10^4 trials");
    std::vector<std::vector<EdgeId>> primal(cycles.size());
    std::vector<FlipBoundResult> out(cycles.size());
    for (std::size_t k = 0; k < cycles.size(); ++k) {
        order_dual_cycle(g, std::span<const DualEdgeId>(cycles[k]));
        if (cycle_winding(g, std::span<const DualEdgeId>(cycles[k])) != Coord{0, 0})
            throw ValidationError("flip-bound cycle must be contractible");
        auto& r = out[k];
        r.cycle = cycles[k];
        for (auto d : cycles[k]) {
            primal[k].push_back(g.primal_edge(d));
            r.abs_weight += std::abs(w[g.primal_edge(d)]);
        }
        r.trials = trials;
        r.bound = std::exp(-2.0 * beta * r.abs_weight);
        for (double c : tail_grid) r.tail.push_back({c, 0.0, std::exp(-2.0 * beta * c)});
    }

    auto s = equilibrate(w, beta, burn_in < 0 ? default_burn_in(g.side()) : burn_in, rng);
    std::vector<std::vector<std::size_t>> tail_hits(cycles.size(), std::vector<std::size_t>(tail_grid.size(), 0));
    for (std::size_t t = 0; t < trials; ++t) {
        glauber_sweep(w, s, beta, rng);
        for (std::size_t k = 0; k < cycles.size(); ++k) {
            bool all_unsat = true;
            double signed_sum = 0.0;
            for (auto e : primal[k]) {
                const auto [a, b] = g.endpoints(e);
                const double bond = w[e] * s[a] * s[b];
                all_unsat = all_unsat && bond < 0.0;
                signed_sum += bond;
            }
            out[k].hits += all_unsat;
            for (std::size_t j = 0; j < tail_grid.size(); ++j) tail_hits[k][j] += signed_sum <= -tail_grid[j];
        }
    }
    for (std::size_t k = 0; k < cycles.size(); ++k) {
        auto& r = out[k];
        const auto n = static_cast<double>(trials);
        r.frequency = static_cast<double>(r.hits) / n;
        r.standard_error = std::sqrt(r.bound * (1.0 - r.bound) / n);
        r.pass = r.frequency < r.bound + 3.0 * r.standard_error;
        for (std::size_t j = 0; j < tail_grid.size(); ++j) r.tail[j].frequency = static_cast<double>(tail_hits[k][j]) / n;
    }
    return out;
}

/// `count` dual 4-cycles around distinct uniformly chosen primal vertices.
inline std::vector<std::vector<DualEdgeId>> random_plaquette_cycles(const TorusGeometry& g, int count, Rng& rng) {
    if (count < 0 || count > g.vertex_count()) throw ValidationError("cycle count out of range");
    std::vector<int> verts(static_cast<std::size_t>(g.vertex_count()));
    std::iota(verts.begin(), verts.end(), 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i)
        std::swap(verts[i], verts[i + rng.below(verts.size() - i)]);
    std::vector<std::vector<DualEdgeId>> out;
    for (int i = 0; i < count; ++i) {
        const auto c = g.coords(VertexId{verts[static_cast<std::size_t>(i)]});
        out.push_back(block_boundary_cycle(g, c.x, c.y, 1));
    }
    return out;
}

// ----------------------------------------------------------- cluster sweep

struct ClusterRow {
    double beta = 0.0;
    int replica = 0;
    int chain = 0;
    double unsatisfied_density = 0.0;  // unsatisfied dual edges / dual edges
    double frustrated_fraction = 0.0;
    int components = 0;
    int largest_cluster = 0;           // dual vertices
    double largest_fraction = 0.0;     // largest_cluster / dual vertices
    double overlap_with_chain0 = 0.0;  // equilibration diagnostic (1 for chain 0)
    std::map<int, int> histogram;      // component size in dual vertices -> count
};

struct BetaSummary {
    double beta = 0.0;
    std::size_t runs = 0;
    double mean_density = 0.0;
    double mean_largest_fraction = 0.0;
    double se_largest_fraction = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<ClusterRow> rows;  // ordered by (beta index, replica, chain)
    std::vector<BetaSummary> by_beta;
};

inline std::vector<BetaSummary> summarize_by_beta(const ExperimentConfig& cfg, const std::vector<ClusterRow>& rows) {
    std::vector<BetaSummary> out;
    for (double b : cfg.betas) {
        BetaSummary s;
        s.beta = b;
        std::vector<double> lf;
        for (const auto& r : rows)
            if (r.beta == b) {
                s.mean_density += r.unsatisfied_density;
                lf.push_back(r.largest_fraction);
            }
        s.runs = lf.size();
        if (s.runs == 0) continue;
        s.mean_density /= static_cast<double>(s.runs);
        for (double x : lf) s.mean_largest_fraction += x;
        s.mean_largest_fraction /= static_cast<double>(s.runs);
        if (s.runs > 1) {
            double var = 0.0;
            for (double x : lf) var += (x - s.mean_largest_fraction) * (x - s.mean_largest_fraction);
            s.se_largest_fraction = std::sqrt(var / static_cast<double>(s.runs - 1) / static_cast<double>(s.runs));
        }
        out.push_back(s);
    }
    return out;
}

namespace detail {

struct RunIndex {
    int beta_index;
    int replica;
    int chain;
};

inline std::vector<RunIndex> run_indices(const ExperimentConfig& cfg) {
    std::vector<RunIndex> out;
    for (int b = 0; b < static_cast<int>(cfg.betas.size()); ++b)
        for (int r = 0; r < cfg.replicas; ++r)
            for (int c = 0; c < cfg.chains; ++c) out.push_back({b, r, c});
    return out;
}

struct Sampled {
    Couplings w;
    SpinConfig s;
};

inline Sampled sample_run(const ExperimentConfig& cfg, const RunIndex& i) {
    const TorusGeometry g(cfg.side);
    auto w = sample_couplings(g, disorder_seed(cfg.seed, i.replica));
    Rng rng(chain_seed(cfg.seed, i.replica, i.chain, i.beta_index));
    auto s = equilibrate(w, cfg.betas[static_cast<std::size_t>(i.beta_index)], cfg.effective_sweeps(), rng);
    return {std::move(w), std::move(s)};
}

}  // namespace detail

/// Unsatisfied-cluster statistics for every (beta, replica, chain).
inline ExperimentReport run_cluster_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto idx = detail::run_indices(cfg);
    std::vector<std::optional<ClusterRow>> rows(idx.size());
    std::vector<std::optional<SpinConfig>> spins(idx.size());
    run_work_queue(idx.size(), cfg.jobs, [&](std::size_t k) {
        const auto& i = idx[k];
        auto [w, s] = detail::sample_run(cfg, i);
        const auto unsat = unsatisfied_set(w, s);
        const auto comp = components(unsat);
        ClusterRow r;
        r.beta = cfg.betas[static_cast<std::size_t>(i.beta_index)];
        r.replica = i.replica;
        r.chain = i.chain;
        r.unsatisfied_density = static_cast<double>(unsat.edge_count()) / w.geometry().dual_edge_count();
        r.frustrated_fraction = frustrated_fraction(w);
        r.components = static_cast<int>(comp.count());
        r.largest_cluster = comp.largest_vertices;
        r.largest_fraction = static_cast<double>(comp.largest_vertices) / w.geometry().dual_vertex_count();
        r.histogram = comp.vertex_histogram;
        rows[k] = std::move(r);
        spins[k] = std::move(s);
    });
    ExperimentReport rep;
    rep.config = cfg;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        auto r = *rows[k];
        const std::size_t chain0 = k - static_cast<std::size_t>(idx[k].chain);
        r.overlap_with_chain0 = overlap(*spins[chain0], *spins[k]);
        rep.rows.push_back(std::move(r));
    }
    rep.by_beta = summarize_by_beta(cfg, rep.rows);
    return rep;
}

// ----------------------------------------------------------- cycle census

inline constexpr int kMaxCensusLength = 12;

struct CensusRow {
    double beta = 0.0;
    int replica = 0;
    int chain = 0;
    int length = 0;
    std::size_t cycles = 0;       // simple cycles through x of this length
    std::size_t unsatisfied = 0;  // of those, fully unsatisfied
};

struct CensusReport {
    ExperimentConfig config;
    DualVertexId origin{0};
    std::vector<CensusRow> rows;
    double lambda2_hat = 0.0;  // from replica 0 couplings
    std::map<int, double> shape_curve;  // length -> 4 (A exp(-2 beta_max lambda2_hat))^length, for plotting
};

inline CensusReport run_unsat_cycle_census(const ExperimentConfig& cfg, DualVertexId x, int len_cap) {
    cfg.validate();
    if (len_cap < 1 || len_cap > kMaxCensusLength) throw ValidationError("census length cap must lie in [1, 12]");
    const TorusGeometry g(cfg.side);
    g.check(x);
    const auto cycles = enumerate_cycles_through(g, x, len_cap);
    const auto idx = detail::run_indices(cfg);
    std::vector<std::vector<CensusRow>> per_run(idx.size());
    run_work_queue(idx.size(), cfg.jobs, [&](std::size_t k) {
        const auto& i = idx[k];
        auto [w, s] = detail::sample_run(cfg, i);
        const auto unsat = unsatisfied_set(w, s);
        std::map<int, CensusRow> by_len;
        for (int l = 1; l <= len_cap; ++l)
            by_len[l] = {cfg.betas[static_cast<std::size_t>(i.beta_index)], i.replica, i.chain, l, 0, 0};
        for (const auto& c : cycles) {
            auto& row = by_len[static_cast<int>(c.edges.size())];
            ++row.cycles;
            row.unsatisfied += std::all_of(c.edges.begin(), c.edges.end(), [&](DualEdgeId d) { return unsat.contains(d); });
        }
        for (auto& [l, row] : by_len) per_run[k].push_back(row);
    });
    CensusReport rep;
    rep.config = cfg;
    rep.origin = x;
    for (auto& v : per_run) rep.rows.insert(rep.rows.end(), v.begin(), v.end());

    WeightRatioParams wp;
    wp.min_size = 4;
    wp.enumerate_max = 0;
    wp.random_samples = 2000;
    wp.random_max_size = 16;
    wp.seed = derive_seed(cfg.seed, {3});
    rep.lambda2_hat = weight_ratio_stats(sample_couplings(g, disorder_seed(cfg.seed, 0)), wp).lambda2_hat;
    const double beta_max = *std::max_element(cfg.betas.begin(), cfg.betas.end());
    for (int l = 1; l <= len_cap; ++l)
        rep.shape_curve[l] = 4.0 * std::pow(kAnimalGrowthBase * std::exp(-2.0 * beta_max * rep.lambda2_hat), l);
    return rep;
}

// ---------------------------------------------------------------- pipeline

struct PipelineRow {
    double beta = 0.0;
    int replica = 0;
    int chain = 0;
    int unsatisfied_edges = 0;
    int forest_edges = 0;
    int cycles_erased = 0;
    int bridge_edges = 0;       // E_N
    double bridge_weight = 0.0;  // Y_N
    double boundary_weight = 0.0;
    int regions = 0;
    int colors = 0;
    bool coloring_proper = false;
    int encounter_points = 0;
    int encounter_bound = 0;
    int flip_color = -1;
    double flip_delta = 0.0;
    double recomputed_delta = 0.0;
    double five_color_bound = 0.0;
    double identity_residual = 0.0;
    bool hypothesis = false;  // 2 Y_N > |w|(boundary)
    bool decreased = false;   // flip_delta < 0
    bool invariants_ok = false;
    std::map<TreeType, int> tree_types;
};

struct PipelineReport {
    ExperimentConfig config;
    std::vector<PipelineRow> rows;
};

namespace detail {

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
    const std::string tag = std::string("[") + stage + "] ";
    try {
        return f();
    } catch (const NoInteriorError& e) {
        throw NoInteriorError(tag + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(tag + e.what());
    } catch (const RangeError& e) {
        throw RangeError(tag + e.what());
    } catch (const ContractError& e) {
        throw ContractError(tag + e.what());
    } catch (const SizeError& e) {
        throw SizeError(tag + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(tag + e.what());
    } catch (const BoundedRunError& e) {
        throw BoundedRunError(tag + e.what());
    } catch (const InvariantViolation& e) {
        throw InvariantViolation(tag + e.what());
    }
}

}  // namespace detail

/// Everything downstream of one equilibrated sample.
inline PipelineRow pipeline_on(const Couplings& w, const SpinConfig& s, const ExperimentConfig& cfg, Rng& forest_rng) {
    const auto& g = w.geometry();
    PipelineRow row;
    const auto unsat = detail::staged("frustration", [&] { return unsatisfied_set(w, s); });
    ForestParams fp;
    fp.decay = cfg.forest_decay;
    fp.theta = cfg.forest_theta;
    const auto run = detail::staged("forest", [&] { return extract_forest_run(unsat, fp, forest_rng); });
    const BoxGeometry window(cfg.effective_window(), g, Coord{1, 1});
    auto dec = detail::staged("bridges", [&] { return find_bridges(run.forest, window); });
    const auto tree = detail::staged("encounter", [&] { return count_encounter_points(run.forest, window); });
    dec = detail::staged("regions", [&] { return decompose_regions(dec); });
    detail::staged("coloring", [&] {
        color_regions(dec);
        return 0;
    });
    const auto flip = detail::staged("flip", [&] { return best_color_class_flip(dec, w, s); });

    row.unsatisfied_edges = static_cast<int>(unsat.edge_count());
    row.forest_edges = static_cast<int>(run.forest.edge_count());
    row.cycles_erased = static_cast<int>(run.system.cycles.size());
    row.bridge_edges = static_cast<int>(dec.bridges.size());
    row.bridge_weight = flip.bridge_weight;
    row.boundary_weight = flip.boundary_weight;
    row.regions = dec.region_count;
    row.colors = dec.color_count;
    row.coloring_proper = coloring_is_proper(dec);
    row.encounter_points = static_cast<int>(tree.encounter_points.size());
    row.encounter_bound = tree.encounter_bound;
    row.tree_types = tree.type_counts;
    row.flip_color = flip.color;
    row.flip_delta = flip.delta;
    row.recomputed_delta = torus_hamiltonian(w, apply_flip(s, flip.flipped)) - torus_hamiltonian(w, s);
    row.five_color_bound = flip.five_color_bound;
    row.identity_residual = flip.identity_residual;
    row.hypothesis = flip.hypothesis_holds();
    row.decreased = flip.delta < 0.0;

    const auto in_view = graph_view(unsat);
    const auto out_view = graph_view(run.forest);
    int in_count = 0, out_count = 0;
    component_labels(in_view.graph, &in_count);
    component_labels(out_view.graph, &out_count);
    const double scale = 1.0 + std::abs(flip.delta);
    row.invariants_ok = run.forest.is_subset_of(unsat) && in_count == out_count && row.coloring_proper &&
                        row.colors <= kMaxRegionColors && tree.within_bound &&
                        std::abs(row.recomputed_delta - row.flip_delta) <= 1e-9 * scale &&
                        std::abs(row.identity_residual) <= 1e-9 * (1.0 + flip.boundary_weight + flip.bridge_weight) &&
                        (!row.hypothesis || (row.decreased && row.flip_delta <= row.five_color_bound + 1e-9 * scale));
    return row;
}

/// sample -> unsatisfied set -> forest -> bridges -> regions -> coloring -> flip,
/// once per (beta, replica, chain).
inline PipelineReport run_pipeline(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto idx = detail::run_indices(cfg);
    std::vector<std::optional<PipelineRow>> rows(idx.size());
    run_work_queue(idx.size(), cfg.jobs, [&](std::size_t k) {
        const auto& i = idx[k];
        auto [w, s] = detail::staged("sample", [&] { return detail::sample_run(cfg, i); });
        Rng forest_rng(derive_seed(chain_seed(cfg.seed, i.replica, i.chain, i.beta_index), {4}));
        auto row = pipeline_on(w, s, cfg, forest_rng);
        row.beta = cfg.betas[static_cast<std::size_t>(i.beta_index)];
        row.replica = i.replica;
        row.chain = i.chain;
        rows[k] = std::move(row);
    });
    PipelineReport rep;
    rep.config = cfg;
    for (auto& r : rows) rep.rows.push_back(std::move(*r));
    return rep;
}

}  // namespace ealab
