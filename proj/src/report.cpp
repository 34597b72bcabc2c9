#include "adaptune/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace adaptune::report {

namespace {

std::string format_double(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string format_x(double x) {
  std::string s = format_double(x, 6);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

CellMap aggregate(const std::vector<runner::RunResult>& results) {
  struct Raw {
    std::vector<double> f1_all;
    std::vector<double> f1_converged;
    std::vector<double> epochs_converged;
  };
  std::map<CellKey, Raw> raw;
  for (const runner::RunResult& r : results) {
    std::string approach = r.approach;
    if (r.merged) approach += "+train+val";
    Raw& cell = raw[{r.corpus_id, r.x_train, approach}];
    cell.f1_all.push_back(r.test_f1);
    if (r.converged) {
      cell.f1_converged.push_back(r.test_f1);
      cell.epochs_converged.push_back(r.epochs_run);
    }
  }
  CellMap cells;
  for (const auto& [key, data] : raw) {
    Cell cell;
    cell.n_runs = static_cast<int>(data.f1_all.size());
    cell.cv = stats::convergence_count(data.f1_all);
    if (!data.f1_converged.empty()) {
      cell.f1 = stats::summarize(data.f1_converged);
      cell.epochs = stats::summarize(data.epochs_converged);
    }
    cells[key] = cell;
  }
  return cells;
}

std::vector<std::string> approaches_in(const CellMap& cells) {
  std::set<std::string> present;
  for (const auto& [key, cell] : cells) present.insert(std::get<2>(key));
  std::vector<std::string> ordered;
  for (const std::string& name : runner::approach_names()) {
    if (present.erase(name)) ordered.push_back(name);
  }
  ordered.insert(ordered.end(), present.begin(), present.end());
  return ordered;
}

namespace {

std::vector<std::pair<std::string, double>> row_keys(const CellMap& cells) {
  std::set<std::pair<std::string, double>> keys;
  for (const auto& [key, cell] : cells) {
    keys.insert({std::get<0>(key), std::get<1>(key)});
  }
  return {keys.begin(), keys.end()};
}

const Cell* find_cell(const CellMap& cells, const std::string& corpus, double x,
                      const std::string& approach) {
  auto it = cells.find({corpus, x, approach});
  return it == cells.end() ? nullptr : &it->second;
}

bool fully_converged(const Cell* cell) {
  return cell != nullptr && cell->n_runs > 0 && cell->cv == cell->n_runs &&
         cell->f1.has_value();
}

}  // namespace

Table main_table(const CellMap& cells, const std::vector<std::string>& approaches) {
  Table t;
  t.title = "fine-tuning results";
  t.header = {"corpus", "x"};
  for (const std::string& a : approaches) {
    t.header.push_back(a + " cv");
    t.header.push_back(a + " f1");
    t.header.push_back(a + " epochs");
  }
  for (const auto& [corpus, x] : row_keys(cells)) {
    std::vector<std::string> row = {corpus, format_x(x)};
    std::vector<bool> bold(row.size(), false);

    // one-standard-deviation winner: significantly above every other fully
    // converged approach in the row
    std::vector<const Cell*> row_cells;
    for (const std::string& a : approaches) row_cells.push_back(find_cell(cells, corpus, x, a));
    auto is_best = [&](std::size_t idx) {
      const Cell* self = row_cells[idx];
      if (!fully_converged(self)) return false;
      for (std::size_t j = 0; j < row_cells.size(); ++j) {
        if (j == idx || !fully_converged(row_cells[j])) continue;
        const stats::Summary& a = *self->f1;
        const stats::Summary& b = *row_cells[j]->f1;
        if (!(a.mean > b.mean) || !stats::is_significant(a, b)) return false;
      }
      return true;
    };

    for (std::size_t i = 0; i < approaches.size(); ++i) {
      const Cell* cell = row_cells[i];
      if (cell == nullptr) {
        row.insert(row.end(), {"", "", ""});
        bold.insert(bold.end(), {false, false, false});
        continue;
      }
      row.push_back(std::to_string(cell->cv));
      bold.push_back(false);
      if (fully_converged(cell)) {
        row.push_back(stats::format_uncertainty(cell->f1->mean, cell->f1->delta,
                                                kF1Decimals));
        bold.push_back(is_best(i));
        row.push_back(
            stats::format_uncertainty(cell->epochs->mean, cell->epochs->delta, 1));
        bold.push_back(false);
      } else {
        row.insert(row.end(), {"---", "---"});
        bold.insert(bold.end(), {false, false});
      }
    }
    t.rows.push_back(std::move(row));
    t.bold.push_back(std::move(bold));
  }
  return t;
}

Table ratio_table(const CellMap& cells, const std::string& numerator,
                  const std::vector<std::string>& baselines) {
  Table t;
  t.title = numerator + " relative to fixed epoch baselines";
  t.header = {"corpus", "x"};
  for (const std::string& b : baselines) {
    t.header.push_back("f1 " + numerator + "/" + b);
    t.header.push_back("epochs " + numerator + "/" + b);
  }
  for (const auto& [corpus, x] : row_keys(cells)) {
    const Cell* top = find_cell(cells, corpus, x, numerator);
    std::vector<std::string> row = {corpus, format_x(x)};
    bool any = false;
    for (const std::string& b : baselines) {
      const Cell* bottom = find_cell(cells, corpus, x, b);
      if (!fully_converged(top) || !fully_converged(bottom)) {
        row.insert(row.end(), {"---", "---"});
        continue;
      }
      any = true;
      const stats::Summary f1 = stats::ratio_with_uncertainty(*top->f1, *bottom->f1);
      const stats::Summary ep =
          stats::ratio_with_uncertainty(*top->epochs, *bottom->epochs);
      row.push_back(stats::format_uncertainty(f1.mean, f1.delta, 3));
      row.push_back(stats::format_uncertainty(ep.mean, ep.delta, 2));
    }
    if (top == nullptr && !any) continue;
    t.bold.emplace_back(row.size(), false);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table stability_table(const CellMap& cells,
                      const std::vector<std::string>& approaches, int n_runs) {
  Table t;
  t.title = "average relative uncertainty";
  t.header = {"corpus", "x_threshold"};
  for (const std::string& a : approaches) t.header.push_back(a);

  std::set<std::string> corpora;
  for (const auto& [key, cell] : cells) corpora.insert(std::get<0>(key));

  std::map<std::string, std::vector<double>> per_approach_values;
  for (const std::string& corpus : corpora) {
    // x values covered by every approach
    std::vector<double> xs;
    for (const auto& [key, cell] : cells) {
      if (std::get<0>(key) != corpus) continue;
      const double x = std::get<1>(key);
      bool everywhere = true;
      for (const std::string& a : approaches) {
        if (find_cell(cells, corpus, x, a) == nullptr) {
          everywhere = false;
          break;
        }
      }
      if (everywhere && (xs.empty() || xs.back() != x)) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (xs.empty()) continue;

    std::vector<std::vector<int>> counts;
    for (const std::string& a : approaches) {
      std::vector<int> row;
      for (double x : xs) row.push_back(find_cell(cells, corpus, x, a)->cv);
      counts.push_back(std::move(row));
    }
    const std::optional<double> threshold =
        stats::convergence_threshold(xs, counts, n_runs);

    std::vector<std::string> row = {corpus};
    if (!threshold.has_value()) {
      row.push_back("never");
      for (std::size_t i = 0; i < approaches.size(); ++i) row.push_back("---");
    } else {
      row.push_back(format_x(*threshold));
      for (const std::string& a : approaches) {
        std::map<double, stats::Summary> by_x;
        for (double x : xs) {
          const Cell* cell = find_cell(cells, corpus, x, a);
          if (x >= *threshold && cell->f1.has_value()) by_x[x] = *cell->f1;
        }
        const double u = stats::average_relative_uncertainty(by_x, *threshold);
        per_approach_values[a].push_back(u);
        row.push_back(format_double(u, 4));
      }
    }
    t.bold.emplace_back(row.size(), false);
    t.rows.push_back(std::move(row));
  }

  std::vector<std::string> global_row = {"global", ""};
  for (const std::string& a : approaches) {
    const auto& values = per_approach_values[a];
    if (values.empty()) {
      global_row.push_back("---");
    } else {
      global_row.push_back(
          format_double(stats::global_average_relative_uncertainty(values), 4));
    }
  }
  t.bold.emplace_back(global_row.size(), false);
  t.rows.push_back(std::move(global_row));
  return t;
}

Table fit_table(const CellMap& cells, const std::vector<std::string>& approaches) {
  Table t;
  t.title = "quadratic fit in (epochs*x)^-1";
  t.header = {"corpus", "approach", "a0", "a1", "a2", "wssr", "points"};

  std::set<std::string> corpora;
  for (const auto& [key, cell] : cells) corpora.insert(std::get<0>(key));

  for (const std::string& corpus : corpora) {
    for (const std::string& a : approaches) {
      std::vector<stats::FitPoint> points;
      for (const auto& [key, cell] : cells) {
        if (std::get<0>(key) != corpus || std::get<2>(key) != a) continue;
        if (!fully_converged(&cell) || !cell.epochs.has_value()) continue;
        const double x = std::get<1>(key);
        const double nx = cell.epochs->mean * x;
        if (!(nx > 0.0)) continue;
        points.push_back({1.0 / nx, cell.f1->mean, cell.f1->delta});
      }
      std::vector<std::string> row = {corpus, a};
      bool fitted = false;
      if (points.size() >= 3) {
        try {
          const stats::FitResult fit = stats::fit_quadratic(points);
          row.push_back(format_double(fit.coeff[0], 6));
          row.push_back(format_double(fit.coeff[1], 6));
          row.push_back(format_double(fit.coeff[2], 6));
          row.push_back(format_double(fit.residual, 6));
          row.push_back(std::to_string(points.size()));
          fitted = true;
        } catch (const std::invalid_argument&) {
          row.resize(2);
        }
      }
      if (!fitted) {
        row.insert(row.end(), {"---", "---", "---", "---",
                               std::to_string(points.size())});
      }
      t.bold.emplace_back(row.size(), false);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table build_report(const std::vector<runner::RunResult>& results, Kind kind,
                   int n_runs) {
  const CellMap cells = aggregate(results);
  const std::vector<std::string> approaches = approaches_in(cells);
  switch (kind) {
    case Kind::MainTable:
      return main_table(cells, approaches);
    case Kind::RatioTable: {
      std::vector<std::string> baselines;
      for (const std::string& a : approaches) {
        if (a == "original" || a == "stable") baselines.push_back(a);
      }
      return ratio_table(cells, "adaptive", baselines);
    }
    case Kind::StabilityTable:
      return stability_table(cells, approaches, n_runs);
    case Kind::FitTable:
      return fit_table(cells, approaches);
  }
  return {};
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      const bool quote = row[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        out << row[i];
      } else {
        out << '"';
        for (char c : row[i]) {
          if (c == '"') out << '"';
          out << c;
        }
        out << '"';
      }
    }
    out << '\n';
  };
  emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
  return out.str();
}

std::string to_markdown(const Table& table) {
  std::vector<std::vector<std::string>> rendered;
  rendered.push_back(table.header);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> row = table.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (r < table.bold.size() && c < table.bold[r].size() && table.bold[r][c]) {
        row[c] = "**" + row[c] + "**";
      }
    }
    rendered.push_back(std::move(row));
  }
  std::size_t columns = 0;
  for (const auto& row : rendered) columns = std::max(columns, row.size());
  std::vector<std::size_t> width(columns, 0);
  for (const auto& row : rendered) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  auto emit_row = [&](const std::vector<std::string>& row) {
    out << '|';
    for (std::size_t c = 0; c < columns; ++c) {
      const std::string& cell = c < row.size() ? row[c] : std::string();
      out << ' ' << cell << std::string(width[c] - cell.size(), ' ') << " |";
    }
    out << '\n';
  };
  emit_row(rendered[0]);
  out << '|';
  for (std::size_t c = 0; c < columns; ++c) {
    out << ' ' << std::string(width[c], '-') << " |";
  }
  out << '\n';
  for (std::size_t r = 1; r < rendered.size(); ++r) emit_row(rendered[r]);
  return out.str();
}

}  // namespace adaptune::report
