#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "adaptune/runner.hpp"
#include "adaptune/stats.hpp"

namespace adaptune::report {

// Aggregated view of one experiment cell (corpus, x, approach): convergence
// count over all runs, f1 / epoch summaries over converged runs only.
struct Cell {
  int n_runs = 0;
  int cv = 0;
  std::optional<stats::Summary> f1;
  std::optional<stats::Summary> epochs;
};

using CellKey = std::tuple<std::string, double, std::string>;  // corpus, x, approach
using CellMap = std::map<CellKey, Cell>;

CellMap aggregate(const std::vector<runner::RunResult>& results);

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<bool>> bold;  // same shape as rows
};

enum class Kind { MainTable, RatioTable, StabilityTable, FitTable };

// MainTable: per (corpus, x) row, per approach cv / f1 / epochs with
//   significance bolding of the best f1.
// RatioTable: adaptive-to-baseline f1 and epoch ratios.
// StabilityTable: per corpus convergence threshold and average relative
//   uncertainty per approach, with a global row.
// FitTable: quadratic-in-(n_epochs*x)^-1 coefficients per approach.
Table build_report(const std::vector<runner::RunResult>& results, Kind kind,
                   int n_runs = 5);

Table main_table(const CellMap& cells, const std::vector<std::string>& approaches);
Table ratio_table(const CellMap& cells, const std::string& numerator,
                  const std::vector<std::string>& baselines);
Table stability_table(const CellMap& cells,
                      const std::vector<std::string>& approaches, int n_runs);
Table fit_table(const CellMap& cells, const std::vector<std::string>& approaches);

std::string to_csv(const Table& table);
std::string to_markdown(const Table& table);

// Approaches present in the cell map, canonical order first.
std::vector<std::string> approaches_in(const CellMap& cells);

// f1 decimals used by the formatted tables.
inline constexpr int kF1Decimals = 4;

}  // namespace adaptune::report
