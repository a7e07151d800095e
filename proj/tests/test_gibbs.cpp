#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ealab/frustration.hpp"
#include "ealab/gibbs.hpp"

using namespace ealab;

namespace {

// Full sum over all torus edges, written independently of the library.
double brute_energy(const Couplings& w, const SpinConfig& s) {
    const auto& g = w.geometry();
    double h = 0;
    for (int y = 0; y < g.side(); ++y)
        for (int x = 0; x < g.side(); ++x) {
            const auto v = g.vertex(x, y);
            h -= w[EdgeId{2 * index_of(v)}] * s[v] * s[g.vertex(x + 1, y)];
            h -= w[EdgeId{2 * index_of(v) + 1}] * s[v] * s[g.vertex(x, y + 1)];
        }
    return h;
}

Couplings constant_couplings(int side, double value) {
    const TorusGeometry g(side);
    return Couplings(g, std::vector<double>(static_cast<std::size_t>(g.edge_count()), value));
}

}  // namespace

TEST(RestrictedHamiltonian, ZeroCouplingsGiveZero) {
    const auto w = constant_couplings(5, 0.0);
    Rng rng(1);
    const BoxGeometry box(2, w.geometry(), Coord{1, 1});
    const auto tau = SpinConfig::random(w.geometry(), rng);
    EXPECT_EQ(restricted_hamiltonian(w, box, tau, tau), 0.0);
}

TEST(RestrictedHamiltonian, SingleVertexWithPlusBoundary) {
    const auto w = constant_couplings(5, 1.0);
    const BoxGeometry box(1, w.geometry(), Coord{2, 2});
    SpinConfig tau(w.geometry());
    EXPECT_EQ(restricted_hamiltonian(w, box, tau, tau), -4.0);
    auto s = tau;
    s.flip(w.geometry().vertex(2, 2));
    EXPECT_EQ(restricted_hamiltonian(w, box, s, tau), 4.0);
}

TEST(RestrictedHamiltonian, MatchesEdgeListSum) {
    const TorusGeometry g(6);
    const auto w = sample_couplings(g, 41);
    Rng rng(2);
    const auto s = SpinConfig::random(g, rng);
    const BoxGeometry box(2, g, Coord{2, 2});
    // Closure: x, y in 1..4; an edge counts when both ends are in it and it is not a corner-to-corner edge.
    auto in_closure = [](int x, int y) {
        const bool xi = x >= 2 && x <= 3, yi = y >= 2 && y <= 3;
        return (xi && y >= 1 && y <= 4) || (yi && x >= 1 && x <= 4);
    };
    double h = 0;
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) {
            const auto v = g.vertex(x, y);
            if (!in_closure(x, y)) continue;
            if (in_closure(x + 1, y)) h -= w[EdgeId{2 * index_of(v)}] * s[v] * s[g.vertex(x + 1, y)];
            if (in_closure(x, y + 1)) h -= w[EdgeId{2 * index_of(v) + 1}] * s[v] * s[g.vertex(x, y + 1)];
        }
    EXPECT_NEAR(restricted_hamiltonian(w, box, s, s), h, 1e-12);
}

TEST(RestrictedHamiltonian, RejectsBoundaryDisagreement) {
    const auto w = constant_couplings(5, 1.0);
    const BoxGeometry box(1, w.geometry(), Coord{2, 2});
    SpinConfig tau(w.geometry());
    auto s = tau;
    s.flip(w.geometry().vertex(3, 2));
    EXPECT_THROW(restricted_hamiltonian(w, box, s, tau), ContractError);
}

TEST(ExactBoltzmann, ZeroBetaIsUniform) {
    const TorusGeometry g(5);
    const auto w = sample_couplings(g, 3);
    const BoxGeometry box(3, g, Coord{1, 1});
    const auto t = exact_boltzmann(w, box, SpinConfig(g), InverseTemperature(0.0));
    ASSERT_EQ(t.probabilities.size(), 512u);
    for (double p : t.probabilities) EXPECT_NEAR(p, 1.0 / 512, 1e-15);
}

TEST(ExactBoltzmann, SingleVertexClosedForm) {
    const TorusGeometry g(5);
    const auto w = sample_couplings(g, 5);
    Rng rng(3);
    const auto tau = SpinConfig::random(g, rng);
    const auto v = g.vertex(2, 2);
    const BoxGeometry box(1, g, Coord{2, 2});
    const double beta = 1.7, h = local_field(w, tau, v);
    const auto t = exact_boltzmann(w, box, tau, InverseTemperature(beta));
    EXPECT_NEAR(t.probabilities[1], std::exp(beta * h) / (std::exp(beta * h) + std::exp(-beta * h)), 1e-12);
}

TEST(ExactBoltzmann, TwoByTwoAgainstSixteenTerms) {
    const TorusGeometry g(6);
    const auto w = sample_couplings(g, 17);
    Rng rng(4);
    const auto tau = SpinConfig::random(g, rng);
    const BoxGeometry box(2, g, Coord{2, 3});
    const auto t = exact_boltzmann(w, box, tau, InverseTemperature(1.0));
    // Full torus energies differ from the restricted ones by a constant.
    std::vector<double> weight(16);
    double z = 0;
    for (std::size_t i = 0; i < 16; ++i) z += weight[i] = std::exp(-brute_energy(w, t.configuration(i, tau)));
    double sum = 0;
    for (std::size_t i = 0; i < 16; ++i) {
        EXPECT_NEAR(t.probabilities[i], weight[i] / z, 1e-12);
        sum += t.probabilities[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(ExactBoltzmann, GlobalFlipInvariance) {
    const TorusGeometry g(7);
    const auto w = sample_couplings(g, 8);
    Rng rng(5);
    const auto tau = SpinConfig::random(g, rng);
    auto neg = tau;
    neg.flip_all();
    const BoxGeometry box(3, g, Coord{2, 2});
    const auto a = exact_boltzmann(w, box, tau, InverseTemperature(2.5));
    const auto b = exact_boltzmann(w, box, neg, InverseTemperature(2.5));
    const std::size_t mask = a.probabilities.size() - 1;
    for (std::size_t i = 0; i < a.probabilities.size(); ++i)
        EXPECT_NEAR(a.probabilities[i], b.probabilities[mask ^ i], 1e-12);
}

TEST(ExactBoltzmann, CapAndTemperatureChecks) {
    const TorusGeometry g(9);
    const auto w = sample_couplings(g, 1);
    EXPECT_THROW(exact_boltzmann(w, BoxGeometry(6, g, Coord{1, 1}), SpinConfig(g), InverseTemperature(1)), SizeError);
    EXPECT_THROW(exact_boltzmann(w, BoxGeometry(2, g, Coord{1, 1}), SpinConfig(g), InverseTemperature::infinite()),
                 ValidationError);
    EXPECT_THROW(InverseTemperature(-0.1), ValidationError);
}

TEST(ExactBoltzmann, ConditionalOfTorusMeasure) {
    const TorusGeometry g(5);
    const auto w = sample_couplings(g, 77);
    Rng rng(6);
    const auto tau = SpinConfig::random(g, rng);
    const BoxGeometry box(3, g, Coord{1, 1});
    const double beta = 1.2;
    const auto t = exact_boltzmann(w, box, tau, InverseTemperature(beta));
    std::vector<double> logw(t.probabilities.size());
    for (std::size_t i = 0; i < logw.size(); ++i) logw[i] = -beta * brute_energy(w, t.configuration(i, tau));
    const double lz = detail::log_sum_exp(logw);
    double tv = 0;
    for (std::size_t i = 0; i < logw.size(); ++i) tv += std::abs(std::exp(logw[i] - lz) - t.probabilities[i]);
    EXPECT_LT(tv / 2, 1e-10);
}

TEST(Glauber, DetailedBalanceOnThreeTorus) {
    const TorusGeometry g(3);
    const auto w = sample_couplings(g, 12);
    const double beta = 0.9;
    const auto table = exact_torus_boltzmann(w, InverseTemperature(beta));
    SpinConfig s(g);
    for (std::size_t i = 0; i < table.probabilities.size(); ++i) {
        s = table.configuration(i, s);
        for (int v = 0; v < 9; ++v) {
            auto t = s;
            t.flip(VertexId{v});
            const double lhs = table.probabilities[i] * heat_bath_flip_probability(w, s, VertexId{v}, beta);
            const double rhs = table.probabilities[table.index_of_config(t)] *
                               heat_bath_flip_probability(w, t, VertexId{v}, beta);
            EXPECT_NEAR(lhs, rhs, 1e-12);
        }
    }
}

TEST(Glauber, ZeroBetaGivesFairCoins) {
    const TorusGeometry g(30);
    const auto w = sample_couplings(g, 2);
    SpinConfig s(g);
    Rng rng(7);
    glauber_sweep(w, s, 0.0, rng);
    int up = 0;
    for (auto x : s.spins()) up += x == 1;
    EXPECT_NEAR(up / 900.0, 0.5, 4 * 0.5 / 30);
}

TEST(Glauber, SingleSiteMarginalsMatchEnumeration) {
    const TorusGeometry g(3);
    const auto w = sample_couplings(g, 21);
    const double beta = 0.7;
    const auto table = exact_torus_boltzmann(w, InverseTemperature(beta));
    std::vector<double> exact(9, 0.0);
    for (std::size_t i = 0; i < table.probabilities.size(); ++i)
        for (int v = 0; v < 9; ++v)
            if (i >> v & 1u) exact[static_cast<std::size_t>(v)] += table.probabilities[i];
    Rng rng(8);
    auto s = SpinConfig::random(g, rng);
    std::vector<double> seen(9, 0.0);
    const int sweeps = 50'000;
    for (int k = 0; k < sweeps; ++k) {
        glauber_sweep(w, s, beta, rng);
        for (int v = 0; v < 9; ++v) seen[static_cast<std::size_t>(v)] += s[VertexId{v}] == 1;
    }
    for (int v = 0; v < 9; ++v) EXPECT_NEAR(seen[static_cast<std::size_t>(v)] / sweeps, exact[static_cast<std::size_t>(v)], 0.01);
}

TEST(SampleEaPair, ShapeDeterminismAndOrdering) {
    Rng r1(9), r2(9);
    const auto a = sample_ea_pair(8, 5, 3.0, 200, r1);
    const auto b = sample_ea_pair(8, 5, 3.0, 200, r2);
    EXPECT_EQ(a.spins.size(), 64u);
    EXPECT_EQ(a.couplings, b.couplings);
    EXPECT_TRUE(std::equal(a.spins.spins().begin(), a.spins.spins().end(), b.spins.spins().begin()));
    for (auto x : a.spins.spins()) EXPECT_TRUE(x == 1 || x == -1);
    const double density = static_cast<double>(unsatisfied_set(a.couplings, a.spins).edge_count()) / 128.0;
    EXPECT_LT(density, 0.5);
    EXPECT_THROW(sample_ea_pair(8, 5, 3.0, -1, r1), ValidationError);
}

TEST(FlipRegionDelta, TrivialRegions) {
    const TorusGeometry g(5);
    const auto w = sample_couplings(g, 4);
    Rng rng(10);
    const auto s = SpinConfig::random(g, rng);
    EXPECT_EQ(flip_region_delta(w, s, std::span<const VertexId>{}), 0.0);
    std::vector<VertexId> all;
    for (int v = 0; v < 25; ++v) all.push_back(VertexId{v});
    EXPECT_NEAR(flip_region_delta(w, s, all), 0.0, 1e-12);
}

TEST(FlipRegionDelta, MatchesFullHamiltonianOnRandomPairs) {
    Rng rng(11);
    for (int k = 0; k < 100; ++k) {
        const TorusGeometry g(3 + static_cast<int>(rng.below(6)));
        const auto w = sample_couplings(g, rng.next());
        const auto s = SpinConfig::random(g, rng);
        std::vector<VertexId> region;
        auto t = s;
        for (int v = 0; v < g.vertex_count(); ++v)
            if (rng.bernoulli(0.3)) {
                region.push_back(VertexId{v});
                t.flip(VertexId{v});
            }
        EXPECT_NEAR(flip_region_delta(w, s, region), brute_energy(w, t) - brute_energy(w, s), 1e-12);
    }
}

TEST(FlipRegionDelta, AllCutEdgesUnsatisfied) {
    const auto w = constant_couplings(5, 1.0);
    SpinConfig s(w.geometry());
    const auto v = w.geometry().vertex(2, 2);
    s.flip(v);
    const std::vector<VertexId> r{v};
    EXPECT_EQ(flip_region_delta(w, s, r), -8.0);
}

TEST(LoopDynamics, FlipProbabilityFormula) {
    EXPECT_EQ(loop_flip_probability(0.0, InverseTemperature(2.0)), 0.5);
    EXPECT_EQ(loop_flip_probability(3.0, InverseTemperature(0.0)), 0.5);
    EXPECT_EQ(loop_flip_probability(-3.0, InverseTemperature(0.0)), 0.5);
    EXPECT_EQ(loop_flip_probability(0.0, InverseTemperature::infinite()), 0.0);
    EXPECT_EQ(loop_flip_probability(-1e-9, InverseTemperature::infinite()), 1.0);
    const double b = 0.8, d = 1.3;
    EXPECT_NEAR(loop_flip_probability(d, InverseTemperature(b)),
                std::exp(-b * d) / (std::exp(-b * d) + std::exp(b * d)), 1e-15);
}

TEST(LoopDynamics, ZeroTemperatureNeverRaisesEnergyAndSettles) {
    const TorusGeometry g(6);
    const auto w = sample_couplings(g, 31);
    Rng rng(12);
    LoopDynamicsConfig cfg;
    cfg.max_subset_size = 1;
    cfg.horizon = 3000;
    cfg.record_interval = 500;
    const auto s0 = SpinConfig::random(g, rng);
    const auto traj = loop_dynamics_run(w, s0, InverseTemperature::infinite(), cfg, rng);
    double prev = brute_energy(w, s0);
    for (const auto& [t, e] : traj.energy_at_flips) {
        EXPECT_LT(e, prev);
        prev = e;
    }
    for (std::size_t k = 1; k < traj.points.size(); ++k) EXPECT_LE(traj.points[k].energy, traj.points[k - 1].energy);
    const auto& last = traj.points.back();
    EXPECT_EQ(last.time, cfg.horizon);
    EXPECT_NEAR(last.energy, brute_energy(w, last.spins), 1e-9);
    EXPECT_TRUE(check_ground_state(w, last.spins, 1).pass);
}

TEST(LoopDynamics, EventCapCarriesPartialTrajectory) {
    const TorusGeometry g(5);
    const auto w = sample_couplings(g, 1);
    Rng rng(13);
    LoopDynamicsConfig cfg;
    cfg.max_events = 10;
    cfg.horizon = 1e6;
    try {
        loop_dynamics_run(w, SpinConfig(g), InverseTemperature(1.0), cfg, rng);
        FAIL() << "expected the event cap to trigger";
    } catch (const LoopDynamicsTruncated& e) {
        EXPECT_EQ(e.partial().events, 10u);
    }
    cfg.rate_decay = -1;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(GroundState, FerromagnetPassesAtEveryK) {
    const auto w = constant_couplings(4, 1.0);
    for (int k = 1; k <= 5; ++k) EXPECT_TRUE(check_ground_state(w, SpinConfig(w.geometry()), k).pass);
    EXPECT_THROW(check_ground_state(w, SpinConfig(w.geometry()), 9), SizeError);
}

TEST(GroundState, MisresolvedPlaquetteGivesSingleVertexWitness) {
    const TorusGeometry g(4);
    std::vector<double> v(32, 1.0);
    v[2 * index_of(g.vertex(1, 1))] = -0.5;  // frustrates the two plaquettes sharing this edge
    const Couplings w(g, v);
    SpinConfig s(g);
    s.flip(g.vertex(1, 1));  // pays for three bonds to satisfy one
    // Exhaustive minimum over all 2^16 states.
    const auto table = exact_torus_boltzmann(w, InverseTemperature(1.0));
    const double min_e = *std::min_element(table.energies.begin(), table.energies.end());
    ASSERT_LT(min_e, brute_energy(w, s));
    const auto verdict = check_ground_state(w, s, 3);
    EXPECT_FALSE(verdict.pass);
    ASSERT_EQ(verdict.witness.size(), 1u);
    EXPECT_EQ(verdict.witness[0], g.vertex(1, 1));
    EXPECT_LT(verdict.delta, 0);
}

TEST(GroundState, RegionAndComplementHaveEqualDelta) {
    const TorusGeometry g(5);
    const auto w = sample_couplings(g, 6);
    Rng rng(14);
    const auto s = SpinConfig::random(g, rng);
    std::vector<VertexId> r, rc;
    for (int v = 0; v < 25; ++v) (rng.bernoulli(0.4) ? r : rc).push_back(VertexId{v});
    EXPECT_NEAR(flip_region_delta(w, s, r), flip_region_delta(w, s, rc), 1e-12);
}
