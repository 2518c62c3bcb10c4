#include <doctest.h>

#include "mobility/distributions.hpp"
#include "mobility/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace mobility;

namespace {

RepeatedMeasures make_table(std::size_t n, std::size_t k, const std::vector<double>& cells) {
    RepeatedMeasures data;
    for (std::size_t i = 0; i < n; ++i) data.subjects.push_back("P" + std::to_string(i + 1));
    for (std::size_t j = 0; j < k; ++j) data.conditions.push_back("C" + std::to_string(j + 1));
    data.values.resize(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) data.values(i, j) = cells[i * k + j];
    }
    return data;
}

RepeatedMeasures random_table(std::size_t n, std::size_t k, unsigned seed, double shift = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> cells;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) cells.push_back(gauss(rng) + shift * j);
    }
    return make_table(n, k, cells);
}

// F computed the pedestrian way, independent of the library's linear algebra.
double brute_force_f(const std::vector<std::vector<double>>& x) {
    std::size_t n = x.size(), k = x[0].size();
    double grand = 0.0;
    for (const auto& row : x) {
        for (double v : row) grand += v;
    }
    grand /= static_cast<double>(n * k);
    double ss_cond = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double cm = 0.0;
        for (std::size_t i = 0; i < n; ++i) cm += x[i][j];
        cm /= static_cast<double>(n);
        ss_cond += static_cast<double>(n) * (cm - grand) * (cm - grand);
    }
    double ss_total = 0.0, ss_subj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rm = 0.0;
        for (double v : x[i]) rm += v;
        rm /= static_cast<double>(k);
        ss_subj += static_cast<double>(k) * (rm - grand) * (rm - grand);
        for (double v : x[i]) ss_total += (v - grand) * (v - grand);
    }
    double ss_err = ss_total - ss_subj - ss_cond;
    double df1 = static_cast<double>(k - 1);
    double df2 = static_cast<double>((n - 1) * (k - 1));
    return (ss_cond / df1) / (ss_err / df2);
}

}  // namespace

TEST_CASE("percent change closed forms") {
    CHECK(percent_change(80.0, 80.0) == 0.0);
    CHECK(percent_change(80.0, 88.0) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(percent_change(100.0, 97.0) == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(percent_change(0.0, 5.0), "undefined baseline", ValidationError);
}

TEST_CASE("rm_anova with two conditions is the squared paired t") {
    RepeatedMeasures data = random_table(10, 2, 42, 0.6);
    std::vector<double> a(data.values.col(0).begin(), data.values.col(0).end());
    std::vector<double> b(data.values.col(1).begin(), data.values.col(1).end());

    StatTestResult anova = rm_anova(data);
    PairedT t = paired_t_test(a, b);

    CHECK(anova.statistic == doctest::Approx(t.t * t.t).epsilon(1e-9));
    CHECK(anova.df1 == 1.0);
    CHECK(anova.df2 == t.df);
    CHECK(anova.p == doctest::Approx(t.p).epsilon(1e-9));
}

TEST_CASE("rm_anova rejects zero within-subject variance") {
    // Rows are subject constants plus condition offsets: exact additivity.
    std::vector<double> cells;
    std::vector<double> subj = {3.0, 5.0, 2.5, 7.0};
    std::vector<double> cond = {0.0, 1.0, 2.0};
    for (double s : subj) {
        for (double c : cond) cells.push_back(s + c);
    }
    RepeatedMeasures data = make_table(4, 3, cells);
    CHECK_THROWS_WITH_AS(rm_anova(data), "degenerate: zero within-subject variance",
                         ValidationError);
}

TEST_CASE("rm_anova sums of squares decompose and p matches permutation") {
    RepeatedMeasures data = random_table(5, 4, 2026);
    StatTestResult r = rm_anova(data);

    // SS identity, recomputed by hand.
    const auto& x = data.values;
    double grand = x.mean();
    double ss_total = 0.0, ss_subj = 0.0, ss_cond = 0.0;
    for (int i = 0; i < 5; ++i) {
        double rm = x.row(i).mean();
        ss_subj += 4.0 * (rm - grand) * (rm - grand);
        for (int j = 0; j < 4; ++j) ss_total += (x(i, j) - grand) * (x(i, j) - grand);
    }
    for (int j = 0; j < 4; ++j) {
        double cm = x.col(j).mean();
        ss_cond += 5.0 * (cm - grand) * (cm - grand);
    }
    double ss_err = ss_total - ss_subj - ss_cond;
    double f_by_hand = (ss_cond / 3.0) / (ss_err / 12.0);
    CHECK(r.statistic == doctest::Approx(f_by_hand).epsilon(1e-9));
    CHECK(r.effect == doctest::Approx(ss_cond / (ss_cond + ss_err)).epsilon(1e-9));
    CHECK(ss_subj + ss_cond + ss_err == doctest::Approx(ss_total).epsilon(1e-9));

    // Permutation oracle: shuffle within rows, 1e6 draws.
    std::vector<std::vector<double>> base(5, std::vector<double>(4));
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 4; ++j) base[i][j] = x(i, j);
    }
    double f_obs = brute_force_f(base);
    std::mt19937_64 rng(99);
    int hits = 0;
    const int draws = 1000000;
    std::vector<std::vector<double>> perm = base;
    for (int d = 0; d < draws; ++d) {
        for (auto& row : perm) std::shuffle(row.begin(), row.end(), rng);
        if (brute_force_f(perm) >= f_obs) ++hits;
    }
    double p_perm = static_cast<double>(hits) / draws;
    CHECK(std::fabs(r.p - p_perm) < 0.01);
}

TEST_CASE("rm_anova invariances") {
    RepeatedMeasures data = random_table(8, 4, 7, 0.4);
    StatTestResult base = rm_anova(data);

    SUBCASE("per-subject offsets do not move F") {
        RepeatedMeasures shifted = data;
        for (std::size_t i = 0; i < shifted.n(); ++i) {
            shifted.values.row(i).array() += 10.0 * static_cast<double>(i) - 3.0;
        }
        StatTestResult r = rm_anova(shifted);
        CHECK(r.statistic == doctest::Approx(base.statistic).epsilon(1e-9));
        CHECK(r.p == doctest::Approx(base.p).epsilon(1e-9));
    }
    SUBCASE("positive affine transforms do not move F or the effect") {
        RepeatedMeasures scaled = data;
        scaled.values = (2.7 * scaled.values).array() - 11.0;
        StatTestResult r = rm_anova(scaled);
        CHECK(r.statistic == doctest::Approx(base.statistic).epsilon(1e-9));
        CHECK(r.effect == doctest::Approx(base.effect).epsilon(1e-9));
        CHECK(r.p == doctest::Approx(base.p).epsilon(1e-9));
    }
}

TEST_CASE("friedman closed forms") {
    SUBCASE("perfect agreement, no ties") {
        // Every subject orders the conditions the same way.
        std::vector<double> cells;
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 4; ++j) cells.push_back(10.0 * i + j);
        }
        RepeatedMeasures data = make_table(5, 4, cells);
        StatTestResult r = friedman(data);
        CHECK(r.statistic == doctest::Approx(15.0).epsilon(1e-12));  // n (k-1)
        CHECK(r.effect == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.df1 == 3.0);
        CHECK(r.p == doctest::Approx(chi2_sf(15.0, 3.0)).epsilon(1e-12));
    }
    SUBCASE("all cells equal") {
        RepeatedMeasures data = make_table(4, 3, std::vector<double>(12, 2.0));
        StatTestResult r = friedman(data);
        CHECK(r.statistic == 0.0);
        CHECK(r.effect == 0.0);
        CHECK(r.p == 1.0);
    }
}

TEST_CASE("friedman matches an independent ranking oracle") {
    RepeatedMeasures data = random_table(8, 4, 31);
    // Force some ties.
    data.values(2, 1) = data.values(2, 3);
    data.values(5, 0) = data.values(5, 1) = data.values(5, 2);

    // Oracle: mid-rank = (#smaller) + (#equal + 1)/2, then the rank-sum form
    // chi2 = 12/(n k (k+1)) sum R_j^2 - 3 n (k+1).
    const std::size_t n = 8, k = 4;
    std::vector<double> rank_sum(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            int smaller = 0, equal = 0;
            for (std::size_t m = 0; m < k; ++m) {
                if (data.values(i, m) < data.values(i, j)) ++smaller;
                if (data.values(i, m) == data.values(i, j)) ++equal;
            }
            rank_sum[j] += smaller + 0.5 * (equal + 1.0);
        }
    }
    double sum_sq = 0.0;
    for (double rj : rank_sum) sum_sq += rj * rj;
    double chi2_oracle = 12.0 / (n * k * (k + 1.0)) * sum_sq - 3.0 * n * (k + 1.0);

    StatTestResult r = friedman(data);
    CHECK(r.statistic == doctest::Approx(chi2_oracle).epsilon(1e-9));
    CHECK(r.effect == doctest::Approx(chi2_oracle / (n * (k - 1.0))).epsilon(1e-9));
}

TEST_CASE("friedman tie correction, hand-worked example") {
    // Rows [1,1,2] and [1,2,3]: one tie pair, C = 1 - 6/48, chi2 = 3.25.
    RepeatedMeasures data = make_table(2, 3, {1.0, 1.0, 2.0, 1.0, 2.0, 3.0});
    StatTestResult raw = friedman(data, false);
    StatTestResult corrected = friedman(data, true);
    CHECK(raw.statistic == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(corrected.statistic == doctest::Approx(26.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("friedman is invariant under strictly monotone transforms") {
    RepeatedMeasures data = random_table(6, 4, 11);
    data.values.array() += 5.0;  // keep values positive for the cube map
    StatTestResult base = friedman(data);

    RepeatedMeasures cubed = data;
    cubed.values = cubed.values.array().cube();
    StatTestResult r = friedman(cubed);
    CHECK(r.statistic == doctest::Approx(base.statistic).epsilon(1e-12));

    RepeatedMeasures affine = data;
    affine.values = 3.0 * affine.values.array() + 2.0;
    CHECK(friedman(affine).statistic == doctest::Approx(base.statistic).epsilon(1e-12));
}

TEST_CASE("wilcoxon signed-rank exact distribution") {
    SUBCASE("textbook point: n=10 distinct ranks, min sum 8") {
        std::vector<double> a(10, 0.0), b;
        for (int i = 1; i <= 10; ++i) {
            double sign = (i == 3 || i == 5) ? 1.0 : -1.0;  // positive ranks {3,5}
            b.push_back(sign * i);
        }
        WilcoxonResult r = wilcoxon_signed_rank(a, b);
        CHECK(r.w == 8.0);
        CHECK(r.p == doctest::Approx(50.0 / 1024.0).epsilon(1e-12));  // 2*25/2^10
        CHECK_FALSE(r.no_variability);
    }
    SUBCASE("zero differences are dropped") {
        std::vector<double> a(12, 0.0), b;
        for (int i = 1; i <= 10; ++i) {
            double sign = (i == 3 || i == 5) ? 1.0 : -1.0;
            b.push_back(sign * i);
        }
        b.push_back(0.0);
        b.push_back(0.0);
        WilcoxonResult r = wilcoxon_signed_rank(a, b);
        CHECK(r.w == 8.0);
        CHECK(r.p == doctest::Approx(50.0 / 1024.0).epsilon(1e-12));
    }
    SUBCASE("no variability at all") {
        std::vector<double> a = {1.0, 2.0, 3.0};
        WilcoxonResult r = wilcoxon_signed_rank(a, a);
        CHECK(r.no_variability);
        CHECK(r.p == 1.0);
    }
}

TEST_CASE("wilcoxon DP agrees with full sign enumeration, ties included") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> mag(1, 6);  // small ints force ties
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 11;
        std::vector<double> a(n, 0.0), b;
        for (int i = 0; i < n; ++i) b.push_back((coin(rng) ? 1.0 : -1.0) * mag(rng));

        WilcoxonResult r = wilcoxon_signed_rank(a, b);

        // Oracle: mid-ranks by counting, then all 2^n sign assignments.
        std::vector<double> ranks(n);
        for (int i = 0; i < n; ++i) {
            int smaller = 0, equal = 0;
            for (int j = 0; j < n; ++j) {
                if (std::fabs(b[j]) < std::fabs(b[i])) ++smaller;
                if (std::fabs(b[j]) == std::fabs(b[i])) ++equal;
            }
            ranks[i] = smaller + 0.5 * (equal + 1.0);
        }
        double w_pos = 0.0, total = 0.0;
        for (int i = 0; i < n; ++i) {
            total += ranks[i];
            if (b[i] > 0.0) w_pos += ranks[i];
        }
        double w_min = std::min(w_pos, total - w_pos);
        int below = 0;
        for (int mask = 0; mask < (1 << n); ++mask) {
            double w = 0.0;
            for (int i = 0; i < n; ++i) {
                if (mask & (1 << i)) w += ranks[i];
            }
            if (w <= w_min + 1e-12) ++below;
        }
        double p_oracle = std::min(1.0, 2.0 * below / std::pow(2.0, n));
        CHECK(r.w == doctest::Approx(w_min).epsilon(1e-12));
        CHECK(r.p == doctest::Approx(p_oracle).epsilon(1e-12));
    }
}

TEST_CASE("wilcoxon normal approximation branch is sane") {
    // n = 40 forces the approximation; a clear one-sided shift.
    std::vector<double> a, b;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        double v = gauss(rng);
        a.push_back(v);
        b.push_back(v + 1.2 + 0.1 * gauss(rng));
    }
    WilcoxonResult strong = wilcoxon_signed_rank(a, b);
    CHECK(strong.p < 1e-5);
    CHECK(strong.p > 0.0);

    // Symmetric differences: p should be comfortably nonsignificant.
    std::vector<double> c;
    for (int i = 0; i < 40; ++i) c.push_back(a[i] + ((i % 2) ? 0.3 : -0.3));
    WilcoxonResult weak = wilcoxon_signed_rank(a, c);
    CHECK(weak.p > 0.3);
}

TEST_CASE("posthoc bonferroni structure") {
    SUBCASE("two conditions: single pair, correction is a no-op") {
        RepeatedMeasures data = random_table(9, 2, 13, 0.5);
        PosthocTable t = posthoc_bonferroni(data, PairwiseFamily::paired_t);
        REQUIRE(t.pairs.size() == 1);
        CHECK(t.pairs[0].p_corrected == t.pairs[0].p_raw);
    }
    SUBCASE("correction never shrinks p and never exceeds 1") {
        RepeatedMeasures data = random_table(7, 4, 17);
        for (PairwiseFamily fam : {PairwiseFamily::paired_t, PairwiseFamily::wilcoxon}) {
            PosthocTable t = posthoc_bonferroni(data, fam);
            REQUIRE(t.pairs.size() == 6);
            for (const PairwiseResult& pr : t.pairs) {
                CHECK(pr.p_corrected >= pr.p_raw);
                CHECK(pr.p_corrected <= 1.0);
            }
        }
    }
}

TEST_CASE("posthoc decisions match a sign-flip permutation oracle") {
    // Conditions A and B share a distribution; C sits far away.
    const int n = 12;
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 0.5);
    std::vector<double> cells;
    for (int i = 0; i < n; ++i) {
        cells.push_back(gauss(rng));
        cells.push_back(gauss(rng));
        cells.push_back(4.0 + gauss(rng));
    }
    RepeatedMeasures data = make_table(n, 3, cells);

    // Exact sign-flip permutation test on each pair's differences.
    auto perm_p = [&](int j1, int j2) {
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = data.values(i, j2) - data.values(i, j1);
        double obs = std::fabs(std::accumulate(d.begin(), d.end(), 0.0));
        int ge = 0;
        for (int mask = 0; mask < (1 << n); ++mask) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += (mask & (1 << i)) ? d[i] : -d[i];
            if (std::fabs(s) >= obs - 1e-12) ++ge;
        }
        return static_cast<double>(ge) / (1 << n);
    };
    double m = 3.0;
    std::vector<bool> oracle_sig = {
        std::min(1.0, m * perm_p(0, 1)) < 0.05,  // A-B
        std::min(1.0, m * perm_p(0, 2)) < 0.05,  // A-C
        std::min(1.0, m * perm_p(1, 2)) < 0.05,  // B-C
    };
    CHECK_FALSE(oracle_sig[0]);
    CHECK(oracle_sig[1]);
    CHECK(oracle_sig[2]);

    for (PairwiseFamily fam : {PairwiseFamily::paired_t, PairwiseFamily::wilcoxon}) {
        PosthocTable t = posthoc_bonferroni(data, fam);
        REQUIRE(t.pairs.size() == 3);
        CHECK(t.pairs[0].significant == oracle_sig[0]);
        CHECK(t.pairs[1].significant == oracle_sig[1]);
        CHECK(t.pairs[2].significant == oracle_sig[2]);
    }
}

TEST_CASE("long CSV pivot") {
    std::string text =
        "subject,condition,value\n"
        "P1,L1,1.5\nP1,L2,2.5\nP2,L1,1.0\nP2,L2,3.0\n";
    RepeatedMeasures data = parse_long_csv(text);
    REQUIRE(data.n() == 2);
    REQUIRE(data.k() == 2);
    CHECK(data.subjects[0] == "P1");
    CHECK(data.conditions[1] == "L2");
    CHECK(data.values(1, 1) == 3.0);

    // Round trip.
    RepeatedMeasures back = parse_long_csv(long_csv(data));
    CHECK(back.subjects == data.subjects);
    CHECK(back.conditions == data.conditions);
    CHECK((back.values - data.values).norm() == 0.0);

    SUBCASE("missing cell rejected") {
        std::string partial = "subject,condition,value\nP1,L1,1\nP1,L2,2\nP2,L1,3\n";
        CHECK_THROWS_AS(parse_long_csv(partial), ValidationError);
    }
    SUBCASE("duplicate cell rejected") {
        std::string dup = text + "P1,L1,9\n";
        CHECK_THROWS_AS(parse_long_csv(dup), ValidationError);
    }
    SUBCASE("bad header rejected") {
        CHECK_THROWS_AS(parse_long_csv("a,b,c\nP1,L1,1\n"), ValidationError);
    }
    SUBCASE("single condition rejected") {
        CHECK_THROWS_AS(parse_long_csv("subject,condition,value\nP1,L1,1\nP2,L1,2\n"),
                        ValidationError);
    }
}
