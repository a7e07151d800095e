#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ealab/disorder.hpp"

using namespace ealab;

TEST(Couplings, SameSeedSameField) {
    const TorusGeometry g(12);
    EXPECT_EQ(sample_couplings(g, 7), sample_couplings(g, 7));
    EXPECT_NE(sample_couplings(g, 7), sample_couplings(g, 8));
}

TEST(Couplings, EdgeWeightDoesNotDependOnTorusSize) {
    const auto a = sample_couplings(TorusGeometry(8), 3);
    const auto b = sample_couplings(TorusGeometry(13), 3);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const int va = index_of(a.geometry().vertex(x, y)), vb = index_of(b.geometry().vertex(x, y));
            EXPECT_EQ(a[EdgeId{2 * va}], b[EdgeId{2 * vb}]);
            EXPECT_EQ(a[EdgeId{2 * va + 1}], b[EdgeId{2 * vb + 1}]);
        }
}

TEST(Couplings, RejectsWrongLength) {
    EXPECT_THROW(Couplings(TorusGeometry(3), std::vector<double>(17, 1.0)), ValidationError);
    EXPECT_THROW(Couplings(TorusGeometry(3), std::vector<double>(18, 1.0))[EdgeId{18}], RangeError);
}

TEST(Couplings, MomentsOfAMillionDraws) {
    const auto w = sample_couplings(TorusGeometry(708), 2024);
    const auto x = w.weights();
    ASSERT_GE(x.size(), 1'000'000u);
    double m = 0, q = 0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    for (double v : x) q += (v - m) * (v - m);
    q /= static_cast<double>(x.size() - 1);
    EXPECT_LT(std::abs(m), 0.004);
    EXPECT_GT(q, 0.99);
    EXPECT_LT(q, 1.01);
}

TEST(Couplings, KolmogorovSmirnovAgainstStandardNormal) {
    const auto w = sample_couplings(TorusGeometry(224), 99);
    std::vector<double> x(w.weights().begin(), w.weights().end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = 0.5 * std::erfc(-x[i] / std::sqrt(2.0));
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    // 0.1% critical value of the Kolmogorov distribution.
    EXPECT_LT(d * std::sqrt(n), 1.95);
}

TEST(Couplings, NeighbouringSeedsAreUncorrelated) {
    const TorusGeometry g(200);
    const auto a = sample_couplings(g, 1), b = sample_couplings(g, 2);
    double c = 0;
    for (std::size_t i = 0; i < a.weights().size(); ++i) c += a.at_index(i) * b.at_index(i);
    c /= static_cast<double>(a.weights().size());
    EXPECT_LT(std::abs(c), 5.0 / std::sqrt(static_cast<double>(a.weights().size())));
}

TEST(GraphWeight, SignedAndAbsoluteSums) {
    const TorusGeometry g(3);
    std::vector<double> v(18, 0.0);
    v[0] = 1.5;
    v[3] = -2.0;
    v[7] = 0.25;
    const Couplings w(g, v);
    const std::vector<EdgeId> s{EdgeId{0}, EdgeId{3}, EdgeId{7}};
    EXPECT_DOUBLE_EQ(graph_weight(w, s), -0.25);
    EXPECT_DOUBLE_EQ(graph_weight(w, s, true), 3.75);
    EXPECT_DOUBLE_EQ(graph_weight(w, std::span<const EdgeId>{}), 0.0);
}
