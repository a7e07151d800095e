#pragma once

// Built-in property suites run by `ealab verify`.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ealab/analysis.hpp"
#include "ealab/enumerate.hpp"
#include "ealab/experiments.hpp"
#include "ealab/forest.hpp"
#include "ealab/frustration.hpp"
#include "ealab/gibbs.hpp"

namespace ealab {

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<PropertyResult> results;
    int passed() const {
        int n = 0;
        for (const auto& r : results) n += r.pass;
        return n;
    }
    int failed() const { return static_cast<int>(results.size()) - passed(); }
};

namespace detail {

inline PropertyResult property(const std::string& name, const std::function<std::string()>& body) {
    // body returns "" on success or a failure description.
    try {
        auto msg = body();
        return {name, msg.empty(), msg};
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

}  // namespace detail

/// Runs the property suites. `quick` shrinks instance counts and sizes.
inline VerifyReport run_verify(bool quick, std::uint64_t seed) {
    VerifyReport rep;
    const int instances = quick ? 10 : 100;

    rep.results.push_back(detail::property("plaquette parity", [&]() -> std::string {
        Rng rng(derive_seed(seed, {10}));
        for (int k = 0; k < instances; ++k) {
            const TorusGeometry g(3 + static_cast<int>(rng.below(8)));
            const auto w = sample_couplings(g, rng.next());
            const auto s = SpinConfig::random(g, rng);
            const auto u = unsatisfied_set(w, s);
            for (int p = 0; p < g.plaquette_count(); ++p)
                if ((u.degree(PlaquetteId{p}) % 2 == 1) != plaquette_frustrated(w, PlaquetteId{p}))
                    return "parity mismatch at plaquette " + std::to_string(p);
        }
        return "";
    }));

    rep.results.push_back(detail::property("restricted Boltzmann table matches torus conditional", [&]() -> std::string {
        const TorusGeometry g(4);
        const auto w = sample_couplings(g, derive_seed(seed, {11}));
        Rng rng(derive_seed(seed, {12}));
        const auto tau = SpinConfig::random(g, rng);
        const BoxGeometry box(2, g, Coord{1, 1});
        const double beta = 0.8;
        const auto table = exact_boltzmann(w, box, tau, InverseTemperature(beta));
        std::vector<double> logw(table.probabilities.size());
        for (std::size_t i = 0; i < logw.size(); ++i) logw[i] = -beta * torus_hamiltonian(w, table.configuration(i, tau));
        const double lz = detail::log_sum_exp(logw);
        double tv = 0.0;
        for (std::size_t i = 0; i < logw.size(); ++i) tv += std::abs(std::exp(logw[i] - lz) - table.probabilities[i]);
        return tv / 2 < 1e-10 ? "" : "total variation " + std::to_string(tv / 2);
    }));

    rep.results.push_back(detail::property("vertex animal counts", [&]() -> std::string {
        const std::vector<std::uint64_t> known{1, 4, 18, 76, 315, 1296, 5320, 21800};
        const auto t = enumerate_animals(AnimalMode::Vertex, quick ? 7 : 8);
        for (const auto& [n, c] : t.counts)
            if (c != known[static_cast<std::size_t>(n - 1)]) return "count mismatch at n = " + std::to_string(n);
        return check_animal_bounds(t).pass ? "" : "bound check failed";
    }));

    rep.results.push_back(detail::property("cycles through a dual vertex", [&]() -> std::string {
        const auto t = enumerate_animals(AnimalMode::CyclesThroughOrigin, quick ? 8 : 10);
        const std::map<int, std::uint64_t> known{{4, 4}, {6, 12}, {8, 56}, {10, 280}};
        for (const auto& [n, c] : t.counts) {
            const auto it = known.find(n);
            if (c != (it == known.end() ? 0 : it->second)) return "count mismatch at length " + std::to_string(n);
        }
        return "";
    }));

    auto random_forest_instance = [&](int k, int side, double beta) {
        const TorusGeometry g(side);
        const auto w = sample_couplings(g, derive_seed(seed, {13, static_cast<std::uint64_t>(k)}));
        Rng rng(derive_seed(seed, {14, static_cast<std::uint64_t>(k)}));
        auto s = equilibrate(w, beta, quick ? 50 : 200, rng);
        return std::make_tuple(w, s, unsatisfied_set(w, s), derive_seed(seed, {15, static_cast<std::uint64_t>(k)}));
    };

    rep.results.push_back(detail::property("forest is spanning and acyclic", [&]() -> std::string {
        for (int k = 0; k < instances; ++k) {
            auto [w, s, unsat, fs] = random_forest_instance(k, 10, 2.0);
            Rng rng(fs);
            const auto f = extract_forest(unsat, ForestParams{}, rng);
            if (!f.is_subset_of(unsat)) return "forest is not a subgraph of the input";
            const auto vin = graph_view(unsat), vout = graph_view(f);
            if (!is_forest(vout.graph)) return "output has a cycle";
            auto lin = component_labels(vin.graph), lout = component_labels(vout.graph);
            for (std::size_t a = 0; a < vin.vertices.size(); ++a) {
                const int oa = vout.local[static_cast<std::size_t>(index_of(vin.vertices[a]))];
                if (oa < 0) return "forest dropped a vertex";
                for (std::size_t b = a + 1; b < vin.vertices.size(); ++b) {
                    const int ob = vout.local[static_cast<std::size_t>(index_of(vin.vertices[b]))];
                    if ((lin[a] == lin[b]) != (lout[static_cast<std::size_t>(oa)] == lout[static_cast<std::size_t>(ob)]))
                        return "component partition changed";
                }
            }
        }
        return "";
    }));

    rep.results.push_back(detail::property("window mechanics: encounter bound, coloring, flip energy", [&]() -> std::string {
        for (int k = 0; k < instances; ++k) {
            auto [w, s, unsat, fs] = random_forest_instance(1000 + k, 12, 2.0);
            Rng rng(fs);
            const auto f = extract_forest(unsat, ForestParams{}, rng);
            const BoxGeometry window(10, w.geometry(), Coord{1, 1});
            const auto tree = count_encounter_points(f, window);
            if (!tree.within_bound) return "encounter bound exceeded";
            auto d = decompose_regions(find_bridges(f, window));
            if (d.region_count > static_cast<int>(d.bridges.size()) + 1) return "more regions than bridges + 1";
            color_regions(d);
            if (!coloring_is_proper(d) || d.color_count > kMaxRegionColors) return "improper coloring";
            const auto flip = best_color_class_flip(d, w, s);
            const double direct = torus_hamiltonian(w, apply_flip(s, flip.flipped)) - torus_hamiltonian(w, s);
            if (std::abs(direct - flip.delta) > 1e-9 * (1 + std::abs(direct))) return "flip energy mismatch";
            if (std::abs(flip.identity_residual) > 1e-9 * (1 + flip.boundary_weight + flip.bridge_weight))
                return "color-class sum identity fails";
            if (flip.hypothesis_holds() && !(flip.delta < 0)) return "flip does not lower the energy";
        }
        return "";
    }));

    rep.results.push_back(detail::property("heat-bath single-site conditional", [&]() -> std::string {
        const TorusGeometry g(3);
        const auto w = sample_couplings(g, derive_seed(seed, {16}));
        Rng rng(derive_seed(seed, {17}));
        const auto s = SpinConfig::random(g, rng);
        const double beta = 1.3;
        for (int v = 0; v < g.vertex_count(); ++v) {
            auto up = s, down = s;
            up.set(VertexId{v}, 1);
            down.set(VertexId{v}, -1);
            const double ratio = std::exp(-beta * (torus_hamiltonian(w, up) - torus_hamiltonian(w, down)));
            const double p = ratio / (1 + ratio);
            if (std::abs(p - heat_bath_up_probability(local_field(w, s, VertexId{v}), beta)) > 1e-12)
                return "conditional mismatch at vertex " + std::to_string(v);
        }
        return "";
    }));

    return rep;
}

}  // namespace ealab
