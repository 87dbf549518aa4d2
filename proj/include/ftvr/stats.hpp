#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ftvr::stats {

class StatsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Regularized incomplete beta I_x(a, b).
double betainc(double a, double b, double x);
/// Regularized lower incomplete gamma P(a, x).
double gammainc(double a, double x);
/// Regularized upper incomplete gamma Q(a, x).
double gammaincc(double a, double x);

double normal_sf(double z);
/// Two-sided tail probability of Student's t.
double t_two_sided(double t, double df);
double f_sf(double f, double df1, double df2);
double chi2_sf(double x, double df);

struct TestResult {
    double statistic = 0.0;
    std::optional<double> df1;
    std::optional<double> df2;
    double p = 1.0;
};

/// Two-sided paired t-test on a - b.
TestResult paired_t(std::span<const double> a, std::span<const double> b);

/// Matrix rows are participants, columns conditions.
using Matrix = std::vector<std::vector<double>>;

/// One-way repeated-measures ANOVA (sphericity assumed).
TestResult rm_anova_1way(const Matrix& data);

/// Friedman rank-sum test with the usual tie correction; chi-square p.
TestResult friedman(const Matrix& data);

/// Two-sided Wilcoxon signed-rank test on a - b. Zero differences are
/// dropped. Exact for n <= 25, over sign flips of the average ranks, so
/// tied magnitudes are handled without approximation. Otherwise the normal
/// approximation with continuity and tie correction. The statistic is
/// min(W+, W-).
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Holm step-down adjusted p-values, in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

}  // namespace ftvr::stats
