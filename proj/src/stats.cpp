#include "adaptune/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adaptune::stats {

Summary summarize(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("summarize: empty sample");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("summarize: non-finite value");
    }
  }
  Summary s;
  s.n = static_cast<int>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) {
      const double d = v - s.mean;
      ss += d * d;
    }
    s.sigma = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.delta = s.sigma / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

Summary ratio_with_uncertainty(const Summary& a, const Summary& b) {
  if (b.mean == 0.0) {
    throw std::domain_error("ratio_with_uncertainty: division by zero");
  }
  Summary r;
  r.mean = a.mean / b.mean;
  const double da = a.delta / b.mean;
  const double db = a.mean * b.delta / (b.mean * b.mean);
  r.delta = std::sqrt(da * da + db * db);
  r.sigma = r.delta;
  r.n = std::min(a.n, b.n);
  return r;
}

bool is_significant(const Summary& a, const Summary& b) {
  const double diff = std::fabs(a.mean - b.mean);
  return diff > std::sqrt(a.delta * a.delta + b.delta * b.delta);
}

int convergence_count(std::span<const double> f1_values) {
  int count = 0;
  for (double f1 : f1_values) {
    if (f1 > 0.0) ++count;
  }
  return count;
}

std::optional<double> convergence_threshold(
    const std::vector<double>& x_grid,
    const std::vector<std::vector<int>>& counts_per_approach, int n_runs) {
  if (x_grid.empty() || counts_per_approach.empty()) {
    throw std::invalid_argument("convergence_threshold: empty inputs");
  }
  if (!std::is_sorted(x_grid.begin(), x_grid.end())) {
    throw std::invalid_argument("convergence_threshold: x grid not sorted");
  }
  for (const auto& counts : counts_per_approach) {
    if (counts.size() != x_grid.size()) {
      throw std::invalid_argument(
          "convergence_threshold: counts do not cover the x grid");
    }
  }
  std::optional<double> threshold;
  for (std::size_t i = x_grid.size(); i-- > 0;) {
    bool all_full = true;
    for (const auto& counts : counts_per_approach) {
      if (counts[i] != n_runs) {
        all_full = false;
        break;
      }
    }
    if (!all_full) break;
    threshold = x_grid[i];
  }
  return threshold;
}

double average_relative_uncertainty(const std::map<double, Summary>& by_x,
                                    double x_threshold) {
  double sum = 0.0;
  int count = 0;
  for (const auto& [x, summary] : by_x) {
    if (x < x_threshold) continue;
    if (summary.mean == 0.0) {
      throw std::domain_error("average_relative_uncertainty: zero mean");
    }
    sum += summary.delta / summary.mean;
    ++count;
  }
  if (count == 0) {
    throw std::invalid_argument(
        "average_relative_uncertainty: no x at or above the threshold");
  }
  return sum / static_cast<double>(count);
}

double global_average_relative_uncertainty(
    std::span<const double> per_combination) {
  if (per_combination.empty()) {
    throw std::invalid_argument("global average: empty input");
  }
  return std::accumulate(per_combination.begin(), per_combination.end(), 0.0) /
         static_cast<double>(per_combination.size());
}

EffortResult effort_ratio(const EffortInputs& inputs) {
  if (inputs.n_train <= 0) {
    throw std::invalid_argument("effort_ratio: n_train must be positive");
  }
  if (inputs.n_val < 0) {
    throw std::invalid_argument("effort_ratio: n_val must be >= 0");
  }
  if (inputs.n_epochs_fixed.empty()) {
    throw std::invalid_argument("effort_ratio: need at least one fixed run");
  }
  if (!(inputs.backward_cost_factor > 0.0)) {
    throw std::invalid_argument("effort_ratio: backward cost factor");
  }
  EffortResult r;
  const double train_pass = 1.0 + inputs.backward_cost_factor;
  r.alpha = 1.0 + static_cast<double>(inputs.n_val) /
                      (train_pass * static_cast<double>(inputs.n_train));
  const double fixed_total = std::accumulate(
      inputs.n_epochs_fixed.begin(), inputs.n_epochs_fixed.end(), 0.0);
  r.ratio = inputs.n_epochs_adaptive / fixed_total * r.alpha;
  return r;
}

double gain(const std::map<double, double>& f1_at_p,
            const std::map<double, double>& f1_at_p_minus_2) {
  if (f1_at_p.size() != f1_at_p_minus_2.size()) {
    throw std::invalid_argument("gain: mismatched x grids");
  }
  double total = 0.0;
  for (const auto& [x, f1] : f1_at_p) {
    auto it = f1_at_p_minus_2.find(x);
    if (it == f1_at_p_minus_2.end()) {
      throw std::invalid_argument("gain: mismatched x grids");
    }
    total += x * (f1 - it->second);
  }
  return total;
}

namespace {

double matrix_scale(const std::array<std::array<double, 3>, 3>& a, int dim) {
  double scale = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) scale = std::max(scale, std::fabs(a[i][j]));
  }
  return scale;
}

// Gaussian elimination with partial pivoting; throws on (near-)singular
// systems. Small fixed-size problem, no library needed.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a,
                             std::array<double, 3> b, int dim) {
  const double tol = std::max(1e-300, 1e-10 * matrix_scale(a, dim));
  for (int col = 0; col < dim; ++col) {
    int pivot = col;
    for (int row = col + 1; row < dim; ++row) {
      if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
    }
    if (std::fabs(a[pivot][col]) < tol) {
      throw std::invalid_argument("fit_quadratic: rank-deficient design matrix");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int row = 0; row < dim; ++row) {
      if (row == col) continue;
      const double factor = a[row][col] / a[col][col];
      for (int k = col; k < dim; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  std::array<double, 3> x{};
  for (int i = 0; i < dim; ++i) x[i] = b[i] / a[i][i];
  return x;
}

std::array<std::array<double, 3>, 3> invert3(
    std::array<std::array<double, 3>, 3> a, int dim) {
  std::array<std::array<double, 3>, 3> inv{};
  const double tol = std::max(1e-300, 1e-10 * matrix_scale(a, dim));
  for (int i = 0; i < dim; ++i) inv[i][i] = 1.0;
  for (int col = 0; col < dim; ++col) {
    int pivot = col;
    for (int row = col + 1; row < dim; ++row) {
      if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
    }
    if (std::fabs(a[pivot][col]) < tol) {
      throw std::invalid_argument("fit_quadratic: singular normal equations");
    }
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double diag = a[col][col];
    for (int k = 0; k < dim; ++k) {
      a[col][k] /= diag;
      inv[col][k] /= diag;
    }
    for (int row = 0; row < dim; ++row) {
      if (row == col) continue;
      const double factor = a[row][col];
      for (int k = 0; k < dim; ++k) {
        a[row][k] -= factor * a[col][k];
        inv[row][k] -= factor * inv[col][k];
      }
    }
  }
  return inv;
}

}  // namespace

FitResult fit_quadratic(std::span<const FitPoint> points, double delta_floor) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit_quadratic: need at least three points");
  }
  if (!(delta_floor > 0.0)) {
    throw std::invalid_argument("fit_quadratic: delta_floor must be positive");
  }

  // Basis in the model's sign convention: f1 = a0 - a1*z - a2*z^2.
  auto basis = [](double z, int term) {
    switch (term) {
      case 0: return 1.0;
      case 1: return -z;
      default: return -z * z;
    }
  };

  std::array<bool, 3> active{true, true, true};
  std::array<double, 3> coeff{};

  for (int round = 0; round < 3; ++round) {
    std::vector<int> terms;
    for (int t = 0; t < 3; ++t) {
      if (active[t]) terms.push_back(t);
    }
    const int dim = static_cast<int>(terms.size());
    std::array<std::array<double, 3>, 3> ata{};
    std::array<double, 3> atb{};
    for (const FitPoint& p : points) {
      const double sigma = std::max(p.delta, delta_floor);
      const double w = 1.0 / (sigma * sigma);
      for (int i = 0; i < dim; ++i) {
        const double bi = basis(p.inv_nx, terms[static_cast<std::size_t>(i)]);
        atb[static_cast<std::size_t>(i)] += w * bi * p.f1;
        for (int j = 0; j < dim; ++j) {
          const double bj = basis(p.inv_nx, terms[static_cast<std::size_t>(j)]);
          ata[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += w * bi * bj;
        }
      }
    }
    const std::array<double, 3> solution = solve3(ata, atb, dim);

    coeff = {0.0, 0.0, 0.0};
    bool clipped = false;
    for (int i = 0; i < dim; ++i) {
      const int term = terms[static_cast<std::size_t>(i)];
      if (solution[static_cast<std::size_t>(i)] < 0.0) {
        active[static_cast<std::size_t>(term)] = false;
        clipped = true;
      } else {
        coeff[static_cast<std::size_t>(term)] = solution[static_cast<std::size_t>(i)];
      }
    }
    if (!clipped) {
      FitResult result;
      result.coeff = coeff;
      for (const FitPoint& p : points) {
        const double sigma = std::max(p.delta, delta_floor);
        const double w = 1.0 / (sigma * sigma);
        double fitted = 0.0;
        for (int t = 0; t < 3; ++t) fitted += coeff[static_cast<std::size_t>(t)] * basis(p.inv_nx, t);
        const double r = p.f1 - fitted;
        result.residual += w * r * r;
      }
      const auto inv = invert3(ata, dim);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          result.covariance[static_cast<std::size_t>(terms[static_cast<std::size_t>(i)])]
                           [static_cast<std::size_t>(terms[static_cast<std::size_t>(j)])] =
              inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
      }
      return result;
    }
    if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) {
      break;
    }
  }
  throw std::invalid_argument("fit_quadratic: no non-negative fit found");
}

double fit_predict(const FitResult& fit, double inv_nx) {
  return fit.coeff[0] - fit.coeff[1] * inv_nx - fit.coeff[2] * inv_nx * inv_nx;
}

double apply_epoch_threshold(double n_epochs, double threshold) {
  if (!(n_epochs > 0.0) || !(threshold > 0.0)) {
    throw std::invalid_argument("apply_epoch_threshold: inputs must be positive");
  }
  return std::min(n_epochs, threshold);
}

}  // namespace adaptune::stats
