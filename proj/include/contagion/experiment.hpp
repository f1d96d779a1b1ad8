#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace contagion {

// Replica fan-out. Each body call fills its own slot, so results are
// independent of the thread schedule; threads <= 1 runs the plain serial
// loop that the tests compare against.
void parallel_replicas(long count, const std::function<void(long)>& body, int threads);

// CONTAGION_THREADS, else the OpenMP default, else 1.
int default_threads();

// Fixed 12-significant-digit formatting used for every numeric field we
// write, so reruns are byte-identical.
std::string format_double(double x);

double median_of(std::vector<double> xs);
double quantile_of(std::vector<double> xs, double q);

// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

struct WilsonInterval {
  double lo, hi;
};
WilsonInterval wilson_interval(long successes, long trials, double z = 1.959963985);

// Upper tail of the chi-square distribution via the regularized incomplete
// gamma function.
double chi_square_pvalue(double stat, int dof);

// Two-sided Kolmogorov-Smirnov p-value for two samples.
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

}  // namespace contagion
