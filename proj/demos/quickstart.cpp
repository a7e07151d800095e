// Samples one Edwards-Anderson state on a small torus and walks it through the
// analysis chain: unsatisfied dual edges, loop-erased forest, bridges inside a
// window, region coloring and the best color-class flip.

#include <iostream>

#include "ealab/ealab.hpp"

using namespace ealab;

int main(int argc, char** argv) {
    const int side = argc > 1 ? std::atoi(argv[1]) : 24;
    const double beta = argc > 2 ? std::atof(argv[2]) : 2.0;
    const std::uint64_t seed = 7;

    const TorusGeometry g(side);
    const auto w = sample_couplings(g, seed);
    Rng rng(derive_seed(seed, {2}));
    const auto s = equilibrate(w, beta, default_burn_in(side), rng);
    std::cout << "L = " << side << ", beta = " << beta << ", H = " << torus_hamiltonian(w, s) << "\n";
    std::cout << "frustrated plaquettes: " << frustrated_fraction(w) << "\n";

    const auto unsat = unsatisfied_set(w, s);
    const auto comp = components(unsat);
    std::cout << "unsatisfied edges: " << unsat.edge_count() << " in " << comp.count()
              << " clusters, largest has " << comp.largest_vertices << " dual vertices\n";

    const auto run = extract_forest_run(unsat, ForestParams{}, rng);
    std::cout << "forest: " << run.forest.edge_count() << " edges after clocking " << run.system.cycles.size()
              << " cycles\n";

    const BoxGeometry window(side - 2, g, Coord{1, 1});
    auto dec = decompose_regions(find_bridges(run.forest, window));
    color_regions(dec);
    const auto tree = count_encounter_points(run.forest, window);
    std::cout << "window N = " << window.side() << ": " << dec.bridges.size() << " bridge edges, " << dec.region_count
              << " regions, " << dec.color_count << " colors, " << tree.encounter_points.size()
              << " encounter points (bound " << tree.encounter_bound << ")\n";

    const auto flip = best_color_class_flip(dec, w, s);
    std::cout << "best class flip: color " << flip.color << ", delta H = " << flip.delta << "; 2Y = "
              << 2 * flip.bridge_weight << " vs boundary " << flip.boundary_weight << "\n";
    return 0;
}
