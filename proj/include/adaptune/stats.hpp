#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adaptune::stats {

// Mean with standard error: mean +- delta, delta = sigma / sqrt(n).
// A single value has delta = sigma = 0 by convention.
struct Summary {
  double mean = 0.0;
  double delta = 0.0;
  double sigma = 0.0;  // sample standard deviation (n-1 denominator)
  int n = 0;
};

Summary summarize(std::span<const double> values);

// a/b with Gaussian error propagation:
// delta = sqrt((da/b)^2 + (a*db/b^2)^2).
Summary ratio_with_uncertainty(const Summary& a, const Summary& b);

// One-standard-deviation criterion: |a - b| > sqrt(da^2 + db^2).
bool is_significant(const Summary& a, const Summary& b);

// Number of converged runs: f1 strictly greater than zero.
int convergence_count(std::span<const double> f1_values);

// Smallest x in the grid such that every approach has all runs converged at
// every x' >= x; nullopt when no such x exists. counts_per_approach[a][i]
// aligns with x_grid[i], which must be sorted ascending.
std::optional<double> convergence_threshold(
    const std::vector<double>& x_grid,
    const std::vector<std::vector<int>>& counts_per_approach, int n_runs);

// Mean of delta/mean over all x >= x_threshold.
double average_relative_uncertainty(const std::map<double, Summary>& by_x,
                                    double x_threshold);

// Arithmetic mean over dataset-model combinations.
double global_average_relative_uncertainty(std::span<const double> per_combination);

struct EffortInputs {
  long long n_train = 0;
  long long n_val = 0;
  double n_epochs_adaptive = 0.0;
  std::vector<double> n_epochs_fixed;  // one entry per hyperparameter run
  // Cost of a backward pass in units of a forward pass. 1.0 gives
  // alpha = 1 + n_val/(2 n_train); 2.0 puts a 3 in the denominator.
  double backward_cost_factor = 1.0;
};

struct EffortResult {
  double ratio = 0.0;  // R = (n_adaptive / sum n_fixed) * alpha
  double alpha = 0.0;  // validation-overhead correction
};

EffortResult effort_ratio(const EffortInputs& inputs);

// sum_x x * (f1(x; p) - f1(x; p-2)); both maps must share the same grid.
double gain(const std::map<double, double>& f1_at_p,
            const std::map<double, double>& f1_at_p_minus_2);

struct FitPoint {
  double inv_nx = 0.0;  // (n_epochs * x)^-1
  double f1 = 0.0;
  double delta = 0.0;
};

struct FitResult {
  std::array<double, 3> coeff{};  // a0, a1, a2, all >= 0
  double residual = 0.0;          // weighted sum of squared residuals
  std::array<std::array<double, 3>, 3> covariance{};
};

// Weighted least squares for f1 = a0 - a1*z - a2*z^2 with weights 1/delta^2
// and non-negative coefficients (negative terms are dropped and the rest
// refitted). Needs >= 3 points; zero deltas are floored at delta_floor.
FitResult fit_quadratic(std::span<const FitPoint> points,
                        double delta_floor = 1e-6);

double fit_predict(const FitResult& fit, double inv_nx);

// min(n_epochs, threshold): epochs beyond the saturation point do not help.
double apply_epoch_threshold(double n_epochs, double threshold);

// --- parenthesis notation -------------------------------------------------

// "0.1234(56)" == 0.1234 +- 0.0056: the uncertainty is given in units of the
// mean's last displayed decimals, switching to a decimal form ("49.4(1.9)")
// once it reaches 1.
std::string format_uncertainty(double mean, double delta, int decimals);

struct ParsedValue {
  double mean = 0.0;
  double delta = 0.0;
  int decimals = 0;
};

ParsedValue parse_uncertainty(const std::string& text);

}  // namespace adaptune::stats
