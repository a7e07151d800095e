#include <gtest/gtest.h>

#include <cmath>

#include "ealab/analysis.hpp"
#include "ealab/forest.hpp"
#include "oracles.hpp"

using namespace ealab;

namespace {

// Host torus dual edges along a path of box dual vertices.
DualSubgraph box_path(const BoxGeometry& box, const std::vector<Coord>& pts, DualSubgraph into) {
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const auto p = box.dual_vertex(pts[k].x, pts[k].y), q = box.dual_vertex(pts[k + 1].x, pts[k + 1].y);
        bool found = false;
        for (auto d : box.dual_incident_edges(p)) {
            const auto [a, b] = box.dual_endpoints(d);
            if (a == q || b == q) {
                into.insert(box.host_dual_edge(d));
                found = true;
            }
        }
        if (!found) throw std::logic_error("no box dual edge between path points");
    }
    return into;
}

std::vector<Coord> line(Coord from, Coord to) {
    std::vector<Coord> out{from};
    while (out.back().x != to.x || out.back().y != to.y) {
        auto c = out.back();
        c.x += (to.x > c.x) - (to.x < c.x);
        c.y += (to.y > c.y) - (to.y < c.y);
        out.push_back(c);
    }
    return out;
}

std::set<int> ids(const std::vector<DualEdgeId>& v) {
    std::set<int> s;
    for (auto d : v) s.insert(index_of(d));
    return s;
}

struct Instance {
    Couplings w;
    SpinConfig s;
    DualSubgraph forest;
};

Instance random_instance(int side, double beta, std::uint64_t seed) {
    const TorusGeometry g(side);
    auto w = sample_couplings(g, seed);
    Rng rng(derive_seed(seed, {1}));
    auto s = SpinConfig::random(g, rng);
    for (int k = 0; k < 40; ++k) glauber_sweep(w, s, beta, rng);
    auto f = extract_forest(unsatisfied_set(w, s), ForestParams{}, rng);
    return {std::move(w), std::move(s), std::move(f)};
}

}  // namespace

class WindowExamples : public ::testing::Test {
protected:
    TorusGeometry host{9};
    BoxGeometry box{6, host, Coord{1, 1}};
    DualSubgraph empty{host};
};

TEST_F(WindowExamples, InteriorForestHasNoBridges) {
    const auto f = box_path(box, line({2, 2}, {4, 2}), empty);
    const auto d = find_bridges(f, box);
    EXPECT_TRUE(d.bridges.empty());
    const auto rep = count_encounter_points(f, box);
    ASSERT_EQ(rep.components.size(), 1u);
    EXPECT_EQ(rep.components[0].type, TreeType::Finite);
    EXPECT_EQ(decompose_regions(d).region_count, 1);
}

TEST_F(WindowExamples, StraightCrossingPathIsAllBridge) {
    const auto f = box_path(box, line({0, 3}, {6, 3}), empty);
    const auto d = find_bridges(f, box);
    EXPECT_EQ(d.bridges.size(), 6u);
    auto r = decompose_regions(d);
    EXPECT_EQ(r.region_count, 2);
    EXPECT_EQ(r.adjacency[0], std::vector<int>{1});
    color_regions(r);
    EXPECT_EQ(r.color_count, 2);
    const auto rep = count_encounter_points(f, box);
    EXPECT_TRUE(rep.encounter_points.empty());
    EXPECT_EQ(rep.components[0].type, TreeType::BiArm);
}

TEST_F(WindowExamples, DanglingBranchIsNotABridge) {
    auto f = box_path(box, line({0, 3}, {6, 3}), empty);
    f = box_path(box, line({3, 3}, {3, 5}), f);
    const auto d = find_bridges(f, box);
    EXPECT_EQ(d.bridges.size(), 6u);
    EXPECT_EQ(ids(d.bridges), oracle::bridges_all_pairs(f, box));
    const auto rep = count_encounter_points(f, box);
    EXPECT_EQ(rep.behind_distance_histogram.at(2), 1);
}

TEST_F(WindowExamples, TShapeBridgesAndThreeColors) {
    auto f = box_path(box, line({0, 3}, {6, 3}), empty);
    f = box_path(box, line({3, 3}, {3, 6}), f);
    const auto d = find_bridges(f, box);
    EXPECT_EQ(d.bridges.size(), 9u);
    EXPECT_EQ(ids(d.bridges), oracle::bridges_all_pairs(f, box));
    auto r = decompose_regions(d);
    EXPECT_EQ(r.region_count, 3);
    color_regions(r);
    EXPECT_EQ(r.color_count, 3);
    EXPECT_TRUE(coloring_is_proper(r));
    EXPECT_TRUE(oracle::proper_coloring(r));
    const auto rep = count_encounter_points(f, box);
    EXPECT_EQ(rep.encounter_points.size(), 1u);
    EXPECT_EQ(rep.components[0].type, TreeType::MultiArm);
    EXPECT_THROW(color_regions(r, 2), Error);
}

TEST_F(WindowExamples, PlusShapeHasOneEncounterPoint) {
    auto f = box_path(box, line({0, 3}, {6, 3}), empty);
    f = box_path(box, line({3, 0}, {3, 6}), f);
    const auto rep = count_encounter_points(f, box);
    EXPECT_EQ(rep.encounter_points, std::vector<DualVertexId>{box.dual_vertex(3, 3)});
    EXPECT_EQ(rep.components[0].arms, 4);
    EXPECT_EQ(rep.encounter_bound, 20);
    auto r = decompose_regions(find_bridges(f, box));
    EXPECT_EQ(r.region_count, 4);
    color_regions(r);
    EXPECT_EQ(r.color_count, 2);
}

TEST_F(WindowExamples, ParallelStripsAlternateTwoColors) {
    auto f = empty;
    for (int j : {1, 3, 5}) f = box_path(box, line({0, j}, {6, j}), f);
    auto r = decompose_regions(find_bridges(f, box));
    ASSERT_EQ(r.region_count, 4);
    color_regions(r);
    EXPECT_EQ(r.color_count, 2);
    EXPECT_TRUE(coloring_is_proper(r));
}

TEST_F(WindowExamples, CycleInputRejected) {
    DualSubgraph c(host);
    for (auto d : block_boundary_cycle(host, 3, 3, 1)) c.insert(d);
    EXPECT_THROW(find_bridges(c, box), ContractError);
    EXPECT_THROW(find_bridges(empty, BoxGeometry(6)), ConfigError);
}

TEST(FiveColor, PlanarGraphsNeedingMoreThanTwo) {
    // Wheel with a 5-cycle rim, and the icosahedron (5-regular).
    std::vector<std::vector<int>> wheel(6);
    auto link = [](auto& adj, int a, int b) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    };
    for (int k = 0; k < 5; ++k) {
        link(wheel, 5, k);
        link(wheel, k, (k + 1) % 5);
    }
    std::vector<std::vector<int>> ico(12);
    for (int k = 0; k < 5; ++k) {
        link(ico, 0, 1 + k);
        link(ico, 1 + k, 1 + (k + 1) % 5);
        link(ico, 1 + k, 6 + k);
        link(ico, 1 + k, 6 + (k + 1) % 5);
        link(ico, 6 + k, 6 + (k + 1) % 5);
        link(ico, 11, 6 + k);
    }
    for (auto* adj : {&wheel, &ico}) {
        for (auto& n : *adj) std::sort(n.begin(), n.end());
        std::vector<int> color;
        EXPECT_FALSE(detail::two_color(*adj, color));
        detail::five_color(*adj, color);
        for (std::size_t a = 0; a < adj->size(); ++a) {
            EXPECT_GE(color[a], 0);
            EXPECT_LT(color[a], 5);
            for (int b : (*adj)[a]) EXPECT_NE(color[a], color[static_cast<std::size_t>(b)]);
        }
    }
}

TEST(Flip, CrossingPathOnFerromagnet) {
    const TorusGeometry host(9);
    const BoxGeometry box(6, host, Coord{1, 1});
    const Couplings w(host, std::vector<double>(static_cast<std::size_t>(host.edge_count()), 1.0));
    const auto f = box_path(box, line({0, 3}, {6, 3}), DualSubgraph(host));
    auto d = decompose_regions(find_bridges(f, box));
    color_regions(d);
    auto s = apply_flip(SpinConfig(host), d.host_vertices(1));
    const auto flip = best_color_class_flip(d, w, s);
    EXPECT_DOUBLE_EQ(flip.bridge_weight, 6.0);
    EXPECT_DOUBLE_EQ(flip.boundary_weight, 24.0);
    EXPECT_NEAR(flip.identity_residual, 0.0, 1e-12);
    for (int c = 0; c < 2; ++c) {
        std::vector<VertexId> cls = d.host_vertices(c);
        EXPECT_NEAR(flip.class_deltas[static_cast<std::size_t>(c)], oracle::full_flip_delta(w, s, cls), 1e-12);
    }
    EXPECT_NEAR(flip.delta, oracle::full_flip_delta(w, s, flip.flipped), 1e-12);
    EXPECT_LE(flip.delta, flip.boundary_signed - 2 * flip.bridge_weight + 1e-12);
    // Satisfied bridges are refused.
    EXPECT_THROW(best_color_class_flip(d, w, SpinConfig(host)), ContractError);
    auto uncolored = decompose_regions(find_bridges(f, box));
    EXPECT_THROW(best_color_class_flip(uncolored, w, s), ContractError);
}

TEST(Flip, EmptyBridgeSetFlipsWholeWindow) {
    const TorusGeometry host(8);
    const BoxGeometry box(5, host, Coord{2, 2});
    const auto w = sample_couplings(host, 3);
    Rng rng(1);
    const auto s = SpinConfig::random(host, rng);
    auto d = decompose_regions(std::span<const DualEdgeId>{}, box);
    color_regions(d);
    const auto flip = best_color_class_flip(d, w, s);
    EXPECT_EQ(flip.flipped.size(), 25u);
    EXPECT_NEAR(flip.delta, 2 * flip.boundary_signed, 1e-12);
}

TEST(RandomWindows, AgreeWithOracles) {
    int multi_color = 0;
    for (std::uint64_t k = 0; k < 40; ++k) {
        const auto inst = random_instance(12, 0.7, 500 + k);
        const BoxGeometry box(10, inst.w.geometry(), Coord{1, 1});
        auto d = find_bridges(inst.forest, box);
        EXPECT_EQ(ids(d.bridges), oracle::bridges_all_pairs(inst.forest, box));

        const auto rep = count_encounter_points(inst.forest, box);
        std::set<int> ep;
        for (auto p : rep.encounter_points) ep.insert(index_of(p));
        EXPECT_EQ(ep, oracle::encounter_points_by_removal(inst.forest, box));
        EXPECT_TRUE(rep.within_bound);

        d = decompose_regions(d);
        EXPECT_LE(d.region_count, static_cast<int>(d.bridges.size()) + 1);
        for (std::size_t a = 0; a < d.adjacency.size(); ++a)
            for (int b : d.adjacency[a]) {
                EXPECT_NE(static_cast<int>(a), b);
                const auto& back = d.adjacency[static_cast<std::size_t>(b)];
                EXPECT_TRUE(std::binary_search(back.begin(), back.end(), static_cast<int>(a)));
            }
        color_regions(d);
        EXPECT_TRUE(oracle::proper_coloring(d));
        EXPECT_LE(d.color_count, kMaxRegionColors);
        multi_color += d.color_count > 2;

        const auto flip = best_color_class_flip(d, inst.w, inst.s);
        EXPECT_NEAR(flip.delta, oracle::full_flip_delta(inst.w, inst.s, flip.flipped), 1e-9);
        EXPECT_NEAR(flip.identity_residual, 0.0, 1e-9);
        // Pigeonhole: the best class is no worse than the average class.
        double sum = 0;
        for (double x : flip.class_deltas) sum += x;
        EXPECT_LE(flip.delta, sum / static_cast<double>(flip.class_deltas.size()) + 1e-9);
        if (flip.hypothesis_holds()) {
            EXPECT_LT(flip.delta, 0.0);
            EXPECT_LE(flip.delta, flip.five_color_bound + 1e-9);
        }
        const auto st = bridge_stats(d, inst.w);
        EXPECT_NEAR(st.abs_weight, flip.bridge_weight, 1e-12);
    }
    EXPECT_GT(multi_color, 0);
}
