#pragma once

#include <span>
#include <string>
#include <vector>

#include "driveclone/eval/protocol.hpp"

namespace driveclone::eval {

struct TableRow {
  std::string label;
  double mae_x = 0.0;
  double mae_y = 0.0;
};

struct ResultsTable {
  std::vector<TableRow> rows;
  std::vector<bool> best_x;  // per row: holds the column minimum
  std::vector<bool> best_y;
  std::string text;          // aligned, minima wrapped in **...**
  std::string csv;           // model,mae_x,mae_y,best_x,best_y
};

/// Every row equal to a column's minimum is marked, so ties mark all.
ResultsTable results_table(std::span<const TableRow> rows);
ResultsTable results_table(std::span<const EvalReport> reports);

}  // namespace driveclone::eval
