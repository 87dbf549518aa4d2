#include "ftvr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ftvr::stats {

namespace {

constexpr double eps = 1e-16;
constexpr double tiny = 1e-300;
constexpr int max_iter = 10000;

// Continued fraction for I_x(a, b), modified Lentz.
double beta_cf(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    return h;
}

double gamma_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < max_iter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * eps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void require_matrix(const Matrix& data, const char* what) {
    if (data.size() < 2) throw StatsError(std::string(what) + ": need at least 2 participants");
    const std::size_t k = data.front().size();
    if (k < 2) throw StatsError(std::string(what) + ": need at least 2 conditions");
    for (const auto& row : data) {
        if (row.size() != k) throw StatsError(std::string(what) + ": ragged matrix");
    }
}

void require_paired(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size()) throw StatsError(std::string(what) + ": dimension mismatch");
    if (a.size() < 2) throw StatsError(std::string(what) + ": need at least 2 pairs");
}

// Average ranks (1-based); also returns the tie-group sizes.
std::vector<double> average_ranks(std::span<const double> values, std::vector<std::size_t>* ties = nullptr) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        if (ties && j > i) ties->push_back(j - i + 1);
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double betainc(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw StatsError("betainc: shape parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double gammainc(double a, double x) {
    if (a <= 0.0) throw StatsError("gammainc: shape must be positive");
    if (x <= 0.0) return 0.0;
    return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double gammaincc(double a, double x) {
    if (a <= 0.0) throw StatsError("gammaincc: shape must be positive");
    if (x <= 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_series(a, x) : gamma_cf(a, x);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double t_two_sided(double t, double df) {
    if (std::isinf(t)) return 0.0;
    return betainc(df / 2.0, 0.5, df / (df + t * t));
}

double f_sf(double f, double df1, double df2) {
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

double chi2_sf(double x, double df) { return gammaincc(df / 2.0, x / 2.0); }

TestResult paired_t(std::span<const double> a, std::span<const double> b) {
    require_paired(a, b, "paired_t");
    const auto n = static_cast<double>(a.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd == 0.0) throw StatsError("paired_t: differences have zero variance");
    const double t = mean / (sd / std::sqrt(n));
    return {t, n - 1.0, std::nullopt, t_two_sided(t, n - 1.0)};
}

TestResult rm_anova_1way(const Matrix& data) {
    require_matrix(data, "rm_anova_1way");
    const std::size_t n = data.size(), k = data.front().size();
    double grand = 0.0;
    std::vector<double> col(k, 0.0), row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            grand += data[i][j];
            col[j] += data[i][j];
            row[i] += data[i][j];
        }
    }
    grand /= static_cast<double>(n * k);
    double ss_total = 0.0, ss_cond = 0.0, ss_subj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) ss_total += (data[i][j] - grand) * (data[i][j] - grand);
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double m = col[j] / static_cast<double>(n) - grand;
        ss_cond += static_cast<double>(n) * m * m;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double m = row[i] / static_cast<double>(k) - grand;
        ss_subj += static_cast<double>(k) * m * m;
    }
    const double ss_err = ss_total - ss_cond - ss_subj;
    const double df1 = static_cast<double>(k - 1);
    const double df2 = static_cast<double>((k - 1) * (n - 1));
    if (!(ss_err > 1e-12 * std::max(ss_total, 1.0))) throw StatsError("rm_anova_1way: zero error variance");
    const double f = (ss_cond / df1) / (ss_err / df2);
    return {f, df1, df2, f_sf(f, df1, df2)};
}

TestResult friedman(const Matrix& data) {
    require_matrix(data, "friedman");
    const std::size_t n = data.size(), k = data.front().size();
    std::vector<double> rank_sum(k, 0.0);
    double tie_sum = 0.0;
    for (const auto& row : data) {
        std::vector<std::size_t> ties;
        const auto ranks = average_ranks(row, &ties);
        for (std::size_t j = 0; j < k; ++j) rank_sum[j] += ranks[j];
        for (auto t : ties) tie_sum += static_cast<double>(t * t * t - t);
    }
    const double nd = static_cast<double>(n), kd = static_cast<double>(k);
    double ssr = 0.0;
    for (double r : rank_sum) ssr += r * r;
    double chi2 = 12.0 / (nd * kd * (kd + 1.0)) * ssr - 3.0 * nd * (kd + 1.0);
    const double correction = 1.0 - tie_sum / (nd * (kd * kd * kd - kd));
    if (correction <= 0.0) return {0.0, kd - 1.0, std::nullopt, 1.0};
    chi2 /= correction;
    return {chi2, kd - 1.0, std::nullopt, chi2_sf(chi2, kd - 1.0)};
}

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw StatsError("wilcoxon_signed_rank: dimension mismatch");
    std::vector<double> diff, mag;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) {
            diff.push_back(d);
            mag.push_back(std::abs(d));
        }
    }
    if (diff.empty()) return {0.0, std::nullopt, std::nullopt, 1.0};
    std::vector<std::size_t> ties;
    const auto ranks = average_ranks(mag, &ties);
    double w_plus = 0.0, w_minus = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) (diff[i] > 0.0 ? w_plus : w_minus) += ranks[i];
    const double stat = std::min(w_plus, w_minus);
    const std::size_t n = diff.size();

    if (n <= 25) {
        // Distribution of W+ over all 2^n sign assignments of the actual
        // ranks. Doubled mid-ranks are integers.
        std::vector<std::size_t> doubled(n);
        std::size_t max_sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
            max_sum += doubled[i];
        }
        std::vector<double> counts(max_sum + 1, 0.0);
        counts[0] = 1.0;
        for (std::size_t r : doubled) {
            for (std::size_t s = max_sum; s >= r; --s) counts[s] += counts[s - r];
        }
        const auto limit = static_cast<std::size_t>(std::lround(2.0 * stat));
        double below = 0.0;
        for (std::size_t s = 0; s <= limit; ++s) below += counts[s];
        const double p = std::min(1.0, 2.0 * below / std::ldexp(1.0, static_cast<int>(n)));
        return {stat, std::nullopt, std::nullopt, p};
    }

    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
    for (auto t : ties) var -= static_cast<double>(t * t * t - t) / 48.0;
    double d = stat - mean;
    if (d != 0.0) d -= 0.5 * (d > 0.0 ? 1.0 : -1.0);
    const double z = d / std::sqrt(var);
    return {stat, std::nullopt, std::nullopt, std::min(1.0, 2.0 * normal_sf(std::abs(z)))};
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });
    std::vector<double> adjusted(m);
    double running = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        const std::size_t i = order[rank];
        if (p_values[i] < 0.0 || p_values[i] > 1.0) throw StatsError("holm_adjust: p-value outside [0, 1]");
        running = std::max(running, std::min(1.0, static_cast<double>(m - rank) * p_values[i]));
        adjusted[i] = running;
    }
    return adjusted;
}

}  // namespace ftvr::stats
