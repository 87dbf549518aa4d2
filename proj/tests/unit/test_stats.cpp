#include "ftvr/random.hpp"
#include "ftvr/stats.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ftvr;
using namespace ftvr::stats;

// Reference values below were computed with scipy 1.15 and statsmodels.

namespace {

const Matrix bushtucker = {{8, 7, 1, 6}, {9, 5, 2, 5}, {6, 2, 3, 8}, {5, 3, 1, 9},
                           {8, 4, 5, 8}, {7, 5, 6, 7}, {10, 2, 7, 2}, {12, 6, 8, 1}};

const std::vector<double> paired_a = {12.1, 11.3, 14.2, 10.9, 13.5, 12.8, 11.7, 13.1, 12.4, 14.0};
const std::vector<double> paired_b = {11.2, 11.9, 12.8, 10.1, 12.9, 12.0, 11.8, 12.2, 11.1, 13.0};

}  // namespace

TEST_CASE("special functions") {
    CHECK(betainc(2.5, 3.5, 0.4) == doctest::Approx(0.4869041915261176).epsilon(1e-10));
    CHECK(gammainc(3, 2.5) == doctest::Approx(0.45618688411667035).epsilon(1e-10));
    CHECK(gammaincc(0.5, 4) == doctest::Approx(0.004677734981047276).epsilon(1e-10));
    CHECK(normal_sf(1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-10));
    CHECK(t_two_sided(2.1, 7) == doctest::Approx(0.0738711962129226).epsilon(1e-10));
    CHECK(f_sf(3.2, 3, 21) == doctest::Approx(0.044292585761605545).epsilon(1e-10));
    CHECK(chi2_sf(7.5, 3) == doctest::Approx(0.0575584519726364).epsilon(1e-10));
    CHECK(betainc(2, 3, 0.0) == 0.0);
    CHECK(betainc(2, 3, 1.0) == 1.0);
}

TEST_CASE("repeated-measures anova") {
    const auto r = rm_anova_1way(bushtucker);
    CHECK(r.statistic == doctest::Approx(3.793806030969845).epsilon(1e-10));
    CHECK(r.p == doctest::Approx(0.025570296863039414).epsilon(1e-8));
    CHECK(*r.df1 == 3.0);
    CHECK(*r.df2 == 21.0);
    CHECK_THROWS_AS(rm_anova_1way({{1, 2}}), StatsError);
    CHECK_THROWS_AS(rm_anova_1way({{1, 2}, {3}}), StatsError);
}

TEST_CASE("friedman") {
    const auto r = friedman(bushtucker);
    CHECK(r.statistic == doctest::Approx(11.526315789473673).epsilon(1e-10));
    CHECK(r.p == doctest::Approx(0.009195161475938338).epsilon(1e-8));
    CHECK(*r.df1 == 3.0);
}

TEST_CASE("paired t") {
    const auto r = paired_t(paired_a, paired_b);
    CHECK(r.statistic == doctest::Approx(3.612109809807352).epsilon(1e-10));
    CHECK(r.p == doctest::Approx(0.005640717497276131).epsilon(1e-8));
    CHECK(*r.df1 == 9.0);
    CHECK_THROWS_AS(paired_t(paired_a, paired_a), StatsError);
    CHECK_THROWS_AS(paired_t(paired_a, std::vector<double>{1.0, 2.0}), StatsError);
}

TEST_CASE("wilcoxon exact") {
    const auto r = wilcoxon_signed_rank(paired_a, paired_b);
    CHECK(r.statistic == doctest::Approx(3.5));
    CHECK(r.p == doctest::Approx(0.01171875).epsilon(1e-12));

    std::vector<double> x, y;
    const std::vector<double> d = {1, 1, 2, 2, 3, -1, 4, 5, 5, 6};
    for (std::size_t i = 0; i < d.size(); ++i) {
        x.push_back(static_cast<double>(i + 1));
        y.push_back(x.back() - d[i]);
    }
    const auto tied = wilcoxon_signed_rank(x, y);
    CHECK(tied.statistic == 2.0);
    CHECK(tied.p == doctest::Approx(0.0078125).epsilon(1e-12));

    const auto zero = wilcoxon_signed_rank(paired_a, paired_a);
    CHECK(zero.p == 1.0);
}

TEST_CASE("wilcoxon normal approximation") {
    const std::vector<double> u = {0.126, -0.132, 0.64,   0.105,  -0.536, 0.362,  1.304,  0.947,  -0.704, -1.265,
                                   -0.623, 0.041, -2.325, -0.219, -1.246, -0.732, -0.544, -0.316, 0.412,  1.043,
                                   -0.129, 1.366, -0.665, 0.352,  0.903,  0.094,  -0.743, -0.922, -0.458, 0.22};
    const std::vector<double> v = {-0.584, -0.041, 0.781,  0.946, -0.021, 1.017,  0.95,   1.117,  0.38,   0.528,
                                   -1.582, 1.855,  -0.679, 0.862, -0.682, -0.746, 1.214,  1.944,  2.514,  2.658,
                                   0.528,  0.458,  -0.369, 1.308, -0.085, 0.789,  -0.013, 0.074,  -1.342, -0.142};
    const auto r = wilcoxon_signed_rank(u, v);
    CHECK(r.statistic == 99.0);
    CHECK(r.p == doctest::Approx(0.006226871973203821).epsilon(1e-9));
}

TEST_CASE("holm adjustment") {
    const std::vector<double> p = {0.01, 0.04, 0.03};
    const auto adj = holm_adjust(p);
    REQUIRE(adj.size() == 3);
    CHECK(adj[0] == doctest::Approx(0.03));
    CHECK(adj[1] == doctest::Approx(0.06));
    CHECK(adj[2] == doctest::Approx(0.06));
    CHECK_THROWS_AS(holm_adjust(std::vector<double>{0.5, 1.5}), StatsError);

    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> ps(1 + rng.below(8));
        for (auto& x : ps) x = rng.uniform() * (rng.below(2) ? 0.1 : 1.0);
        const auto got = holm_adjust(ps);
        const auto want = oracle::holm(ps);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-15));
            CHECK(got[i] >= ps[i]);
            CHECK(got[i] <= std::min(1.0, ps[i] * static_cast<double>(ps.size())) + 1e-15);
            for (std::size_t j = 0; j < ps.size(); ++j) {
                if (ps[i] < ps[j]) CHECK(got[i] <= got[j]);
            }
        }
    }
}

TEST_CASE("clearly separated conditions are detected") {
    Rng rng(11);
    std::vector<double> a, b;
    for (int i = 0; i < 20; ++i) {
        const double base = rng.normal(10.0, 1.0);
        a.push_back(base + rng.normal(0.0, 1.0));
        b.push_back(base + 2.0 + rng.normal(0.0, 1.0));
    }
    CHECK(paired_t(a, b).p < 0.01);
    CHECK(wilcoxon_signed_rank(a, b).p < 0.01);
}
