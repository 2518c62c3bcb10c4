#include "mobility/stats.hpp"

#include "mobility/distributions.hpp"
#include "mobility/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace mobility {

void RepeatedMeasures::validate() const {
    if (subjects.size() < 2) throw ValidationError("need at least 2 subjects");
    if (conditions.size() < 2) throw ValidationError("need at least 2 conditions");
    if (values.rows() != static_cast<Eigen::Index>(subjects.size()) ||
        values.cols() != static_cast<Eigen::Index>(conditions.size())) {
        throw ValidationError("value matrix does not match labels");
    }
    if (!values.allFinite()) throw ValidationError("non-finite cell value");
}

RepeatedMeasures parse_long_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    std::vector<std::string> subjects, conditions;
    std::map<std::pair<std::string, std::string>, double> cells;

    auto index_of = [](std::vector<std::string>& labels, const std::string& v) {
        auto it = std::find(labels.begin(), labels.end(), v);
        if (it == labels.end()) {
            labels.push_back(v);
            return labels.size() - 1;
        }
        return static_cast<std::size_t>(it - labels.begin());
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "subject,condition,value") {
                throw ValidationError("expected header subject,condition,value");
            }
            continue;
        }
        std::size_t c1 = line.find(',');
        std::size_t c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw ValidationError("malformed row at line " + std::to_string(line_no));
        }
        std::string subject = line.substr(0, c1);
        std::string condition = line.substr(c1 + 1, c2 - c1 - 1);
        std::string value_text = line.substr(c2 + 1);
        double value;
        try {
            std::size_t used = 0;
            value = std::stod(value_text, &used);
            if (used != value_text.size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw ValidationError("bad value at line " + std::to_string(line_no));
        }
        if (!std::isfinite(value)) {
            throw ValidationError("non-finite value at line " + std::to_string(line_no));
        }
        index_of(subjects, subject);
        index_of(conditions, condition);
        if (!cells.emplace(std::make_pair(subject, condition), value).second) {
            throw ValidationError("duplicate cell " + subject + "/" + condition + " at line " +
                                  std::to_string(line_no));
        }
    }

    RepeatedMeasures data;
    data.subjects = std::move(subjects);
    data.conditions = std::move(conditions);
    data.values.resize(data.subjects.size(), data.conditions.size());
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        for (std::size_t j = 0; j < data.conditions.size(); ++j) {
            auto it = cells.find({data.subjects[i], data.conditions[j]});
            if (it == cells.end()) {
                throw ValidationError("missing cell: subject " + data.subjects[i] +
                                      ", condition " + data.conditions[j]);
            }
            data.values(i, j) = it->second;
        }
    }
    data.validate();
    return data;
}

RepeatedMeasures load_long_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open table: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_long_csv(buf.str());
}

std::string long_csv(const RepeatedMeasures& data) {
    std::ostringstream out;
    out << "subject,condition,value\n";
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.k(); ++j) {
            out << data.subjects[i] << ',' << data.conditions[j] << ','
                << format_double(data.values(i, j)) << '\n';
        }
    }
    return out.str();
}

StatTestResult rm_anova(const RepeatedMeasures& data) {
    data.validate();
    const auto& x = data.values;
    const double n = static_cast<double>(data.n());
    const double k = static_cast<double>(data.k());

    double grand = x.mean();
    Eigen::VectorXd row_mean = x.rowwise().mean();
    Eigen::VectorXd col_mean = x.colwise().mean();

    double ss_total = (x.array() - grand).square().sum();
    double ss_subject = k * (row_mean.array() - grand).square().sum();
    double ss_cond = n * (col_mean.array() - grand).square().sum();
    double ss_error = ss_total - ss_subject - ss_cond;

    double scale = std::max(ss_total, std::numeric_limits<double>::min());
    if (ss_error <= 1e-12 * scale) {
        throw ValidationError("degenerate: zero within-subject variance");
    }

    double df1 = k - 1.0;
    double df2 = (n - 1.0) * (k - 1.0);
    double f = (ss_cond / df1) / (ss_error / df2);

    StatTestResult r;
    r.test = "rm_anova";
    r.statistic = f;
    r.df1 = df1;
    r.df2 = df2;
    r.p = f_sf(f, df1, df2);
    r.effect = ss_cond / (ss_cond + ss_error);
    r.effect_name = "eta_p_sq";
    return r;
}

namespace {

// Mid-ranks of one row (1-based; ties share the average of their positions).
std::vector<double> mid_ranks(const Eigen::VectorXd& row) {
    const std::size_t k = row.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    std::vector<double> ranks(k);
    std::size_t i = 0;
    while (i < k) {
        std::size_t j = i;
        while (j + 1 < k && row[order[j + 1]] == row[order[i]]) ++j;
        double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = shared;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

StatTestResult friedman(const RepeatedMeasures& data, bool tie_correction) {
    data.validate();
    const auto& x = data.values;
    const double n = static_cast<double>(data.n());
    const double k = static_cast<double>(data.k());

    std::vector<double> rank_sum(data.k(), 0.0);
    double tie_term = 0.0;  // sum over rows and tie groups of t^3 - t
    for (std::size_t i = 0; i < data.n(); ++i) {
        std::vector<double> ranks = mid_ranks(x.row(i));
        for (std::size_t j = 0; j < data.k(); ++j) rank_sum[j] += ranks[j];

        std::vector<double> sorted(x.row(i).begin(), x.row(i).end());
        std::sort(sorted.begin(), sorted.end());
        std::size_t a = 0;
        while (a < sorted.size()) {
            std::size_t b = a;
            while (b + 1 < sorted.size() && sorted[b + 1] == sorted[a]) ++b;
            double t = static_cast<double>(b - a + 1);
            tie_term += t * t * t - t;
            a = b + 1;
        }
    }

    double chi2 = 0.0;
    for (double rj : rank_sum) {
        double dev = rj - n * (k + 1.0) / 2.0;
        chi2 += dev * dev;
    }
    chi2 *= 12.0 / (n * k * (k + 1.0));

    if (tie_correction && chi2 > 0.0) {
        double c = 1.0 - tie_term / (n * (k * k * k - k));
        chi2 /= c;  // c > 0 whenever any row has distinct values
    }

    StatTestResult r;
    r.test = "friedman";
    r.statistic = chi2;
    r.df1 = k - 1.0;
    r.df2 = 0.0;
    r.p = chi2_sf(chi2, k - 1.0);
    r.effect = chi2 / (n * (k - 1.0));
    r.effect_name = "kendall_w";
    return r;
}

double percent_change(double baseline, double post) {
    if (baseline == 0.0) throw ValidationError("undefined baseline");
    return 100.0 * (post - baseline) / baseline;
}

PairedT paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("paired samples differ in length");
    const std::size_t n = a.size();
    if (n < 2) throw ValidationError("need at least 2 pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += b[i] - a[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = (b[i] - a[i]) - mean;
        ss += d * d;
    }
    double var = ss / static_cast<double>(n - 1);

    PairedT r;
    r.df = static_cast<double>(n - 1);
    if (var == 0.0) {
        // Constant differences: the limit of the statistic.
        r.t = mean == 0.0 ? 0.0
                          : std::copysign(std::numeric_limits<double>::infinity(), mean);
        r.p = mean == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.t = mean / std::sqrt(var / static_cast<double>(n));
    r.p = t_sf_two_sided(r.t, r.df);
    return r;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("paired samples differ in length");

    std::vector<double> diff;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = b[i] - a[i];
        if (d != 0.0) diff.push_back(d);
    }

    WilcoxonResult r;
    if (diff.empty()) {
        r.no_variability = true;
        r.w = 0.0;
        r.p = 1.0;
        return r;
    }

    const std::size_t n = diff.size();
    Eigen::VectorXd abs_diff(n);
    for (std::size_t i = 0; i < n; ++i) abs_diff[i] = std::fabs(diff[i]);
    std::vector<double> ranks = mid_ranks(abs_diff);

    double w_pos = 0.0;
    double w_all = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w_all += ranks[i];
        if (diff[i] > 0.0) w_pos += ranks[i];
    }
    double w_neg = w_all - w_pos;
    r.w = std::min(w_pos, w_neg);

    if (n <= 30) {
        // Exact: distribute every sign assignment over doubled ranks (mid-ranks
        // are halves, so doubling makes them integers).
        std::vector<long> r2(n);
        long total2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r2[i] = std::lround(2.0 * ranks[i]);
            total2 += r2[i];
        }
        std::vector<double> count(total2 + 1, 0.0);
        count[0] = 1.0;
        long reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            reach += r2[i];
            for (long s = reach; s >= r2[i]; --s) count[s] += count[s - r2[i]];
        }
        long w2 = std::lround(2.0 * r.w);
        double below = 0.0;
        for (long s = 0; s <= w2 && s <= total2; ++s) below += count[s];
        double p = 2.0 * below / std::ldexp(1.0, static_cast<int>(n));
        r.p = std::min(1.0, p);
    } else {
        // Normal approximation with tie-corrected variance and no continuity
        // correction, on the min rank sum.
        double mean = static_cast<double>(n) * (n + 1.0) / 4.0;
        double tie_term = 0.0;
        std::vector<double> sorted(abs_diff.begin(), abs_diff.end());
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
        double var =
            static_cast<double>(n) * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
        double z = (r.w - mean) / std::sqrt(var);
        // Two-sided tail via the gamma form of the normal CDF.
        r.p = std::min(1.0, gamma_q(0.5, 0.5 * z * z));
    }
    return r;
}

PosthocTable posthoc_bonferroni(const RepeatedMeasures& data, PairwiseFamily family) {
    data.validate();
    const std::size_t k = data.k();
    const double m = static_cast<double>(k * (k - 1) / 2);

    PosthocTable table;
    table.family = family;
    for (std::size_t j1 = 0; j1 < k; ++j1) {
        for (std::size_t j2 = j1 + 1; j2 < k; ++j2) {
            std::vector<double> a(data.values.col(j1).begin(), data.values.col(j1).end());
            std::vector<double> b(data.values.col(j2).begin(), data.values.col(j2).end());

            PairwiseResult pr;
            pr.a = data.conditions[j1];
            pr.b = data.conditions[j2];
            if (family == PairwiseFamily::paired_t) {
                PairedT t = paired_t_test(a, b);
                pr.statistic = t.t;
                pr.p_raw = t.p;
                bool constant = true;
                for (std::size_t i = 1; i < a.size(); ++i) {
                    if (b[i] - a[i] != b[0] - a[0]) constant = false;
                }
                pr.no_variability = constant;
            } else {
                WilcoxonResult w = wilcoxon_signed_rank(a, b);
                pr.statistic = w.w;
                pr.p_raw = w.p;
                pr.no_variability = w.no_variability;
            }
            pr.p_corrected = std::min(1.0, m * pr.p_raw);
            pr.significant = pr.p_corrected < 0.05;
            table.pairs.push_back(std::move(pr));
        }
    }
    return table;
}

std::string posthoc_csv(const PosthocTable& table) {
    std::ostringstream out;
    out << "a,b,statistic,p_raw,p_corrected,significant\n";
    for (const PairwiseResult& pr : table.pairs) {
        out << pr.a << ',' << pr.b << ',' << format_double(pr.statistic) << ','
            << format_double(pr.p_raw) << ',' << format_double(pr.p_corrected) << ','
            << (pr.significant ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace mobility
