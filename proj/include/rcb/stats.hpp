#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rcb::stats {

double mean(std::span<const double> v);

// divide_by_n = true gives the population convention, false the sample (n-1)
// convention.
double stddev(std::span<const double> v, bool divide_by_n);

// Pearson correlation; sets *defined to false when either vector has zero
// variance (fewer than 2 points counts as undefined too).
double pearson(std::span<const double> x, std::span<const double> y, bool* defined);

// Median of an unsorted copy; average of the two middle elements for even n.
double median(std::vector<double> v);

// Nearest-rank percentile of an unsorted copy, q in [0, 1].
double percentile_nearest_rank(std::vector<double> v, double q);

// Standard normal survival function P(Z > z).
double normal_sf(double z);

// Upper-tail chi-squared p-value: P(X > x) for df degrees of freedom.
double chi2_sf(double x, int df);

// Two-sided p-value for Student's t with df degrees of freedom, via the
// regularized incomplete beta function.
double t_two_sided_p(double t, int df);

// Regularized incomplete beta I_x(a, b) (continued fraction).
double incomplete_beta(double a, double b, double x);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Effect size from a chi-squared statistic on an r x c table with n
// observations: sqrt(chi2 / (n * min(r-1, c-1))).
double cramers_v(double chi2, std::size_t n, int rows, int cols);

struct ZTestResult {
    double z = 0.0;
    double p = 1.0;
};

// Pooled two-proportion z-test from rates and denominators; two-sided p.
ZTestResult two_proportion_z(double p1, std::size_t n1, double p2, std::size_t n2);

}  // namespace rcb::stats
