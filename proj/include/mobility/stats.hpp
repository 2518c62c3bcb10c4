#pragma once

#include "mobility/types.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace mobility {

/// Complete within-subject table: rows are subjects, columns are conditions.
/// Missing cells are rejected at parse time, not imputed.
struct RepeatedMeasures {
    std::vector<std::string> subjects;    // n row labels
    std::vector<std::string> conditions;  // k column labels
    Eigen::MatrixXd values;               // n x k

    std::size_t n() const { return subjects.size(); }
    std::size_t k() const { return conditions.size(); }

    /// n >= 2, k >= 2, label counts match the matrix, all cells finite.
    void validate() const;
};

/// Long-format CSV `subject,condition,value` <-> RepeatedMeasures. Subjects
/// and conditions keep first-appearance order; duplicate or missing cells
/// are validation errors.
RepeatedMeasures parse_long_csv(const std::string& text);
RepeatedMeasures load_long_csv(const std::string& path);
std::string long_csv(const RepeatedMeasures& data);

struct StatTestResult {
    std::string test;         // "rm_anova" | "friedman"
    double statistic = 0.0;   // F or chi-squared
    double df1 = 0.0;
    double df2 = 0.0;         // 0 when the statistic has a single df
    double p = 1.0;
    double effect = 0.0;      // partial eta squared / Kendall's W
    std::string effect_name;  // "eta_p_sq" | "kendall_w"
};

/// One-way repeated-measures ANOVA. F = MS_condition / MS_error with
/// df = (k-1, (n-1)(k-1)); effect is partial eta squared. No sphericity
/// correction is applied. Throws when the error sum of squares vanishes.
StatTestResult rm_anova(const RepeatedMeasures& data);

/// Friedman rank test with mid-rank ties; df = k-1; effect is Kendall's W
/// = chi2 / (n (k-1)). The classic tie correction (divide by 1 - sum(t^3-t)
/// / (n (k^3-k))) is off unless requested.
StatTestResult friedman(const RepeatedMeasures& data, bool tie_correction = false);

/// 100 * (post - baseline) / baseline. Throws "undefined baseline" on 0.
double percent_change(double baseline, double post);

struct PairedT {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Two-sided paired t-test on (b - a). A constant difference vector is the
/// degenerate limit: all-zero -> t = 0, p = 1; nonzero -> t = +-inf, p = 0.
PairedT paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

struct WilcoxonResult {
    double w = 0.0;  // min of the positive/negative rank sums
    double p = 1.0;
    bool no_variability = false;  // every difference was zero
};

/// Two-sided Wilcoxon signed-rank test on (b - a). Zero differences are
/// dropped; ties get mid-ranks. The p-value is exact (full enumeration of
/// sign assignments via dynamic programming) up to 30 nonzero differences,
/// and uses the normal approximation with tie-corrected variance above that.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

enum class PairwiseFamily { paired_t, wilcoxon };

struct PairwiseResult {
    std::string a, b;        // condition labels of the pair
    double statistic = 0.0;  // t of (b - a), or the Wilcoxon rank sum
    double p_raw = 1.0;
    double p_corrected = 1.0;  // min(1, m * p_raw), m = k(k-1)/2
    bool significant = false;  // corrected p < 0.05
    bool no_variability = false;
};

struct PosthocTable {
    PairwiseFamily family = PairwiseFamily::paired_t;
    std::vector<PairwiseResult> pairs;  // all k(k-1)/2 pairs, column order
};

PosthocTable posthoc_bonferroni(const RepeatedMeasures& data, PairwiseFamily family);

/// CSV `a,b,statistic,p_raw,p_corrected,significant` for a post-hoc table.
std::string posthoc_csv(const PosthocTable& table);

}  // namespace mobility
