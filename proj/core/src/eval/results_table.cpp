#include "driveclone/eval/results_table.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "driveclone/errors.hpp"

namespace driveclone::eval {
namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ResultsTable results_table(std::span<const TableRow> rows) {
  if (rows.empty()) throw ValidationError("results table needs at least one row");
  ResultsTable t;
  t.rows.assign(rows.begin(), rows.end());
  double min_x = rows.front().mae_x, min_y = rows.front().mae_y;
  for (const auto& r : rows) {
    min_x = std::min(min_x, r.mae_x);
    min_y = std::min(min_y, r.mae_y);
  }
  for (const auto& r : rows) {
    t.best_x.push_back(r.mae_x == min_x);
    t.best_y.push_back(r.mae_y == min_y);
  }

  std::vector<std::array<std::string, 3>> cells = {{"Model", "MAE X", "MAE Y"}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto mark = [](bool b, const std::string& s) { return b ? "**" + s + "**" : s; };
    cells.push_back({rows[i].label, mark(t.best_x[i], fixed4(rows[i].mae_x)),
                     mark(t.best_y[i], fixed4(rows[i].mae_y))});
  }
  std::array<std::size_t, 3> width{};
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::array<std::string, 3>& row) {
    std::string s = "| " + row[0] + std::string(width[0] - row[0].size(), ' ');
    for (std::size_t c = 1; c < 3; ++c) {
      s += " | " + std::string(width[c] - row[c].size(), ' ') + row[c];
    }
    return s + " |\n";
  };
  t.text = line(cells[0]);
  t.text += "|" + std::string(width[0] + 2, '-') + "|" + std::string(width[1] + 1, '-') + ":|" +
            std::string(width[2] + 1, '-') + ":|\n";
  for (std::size_t i = 1; i < cells.size(); ++i) t.text += line(cells[i]);

  t.csv = "model,mae_x,mae_y,best_x,best_y\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.csv += csv_field(rows[i].label) + "," + shortest(rows[i].mae_x) + "," +
             shortest(rows[i].mae_y) + "," + (t.best_x[i] ? "1" : "0") + "," +
             (t.best_y[i] ? "1" : "0") + "\n";
  }
  return t;
}

ResultsTable results_table(std::span<const EvalReport> reports) {
  std::vector<TableRow> rows;
  for (const auto& r : reports) rows.push_back({r.model_id, r.mae_x, r.mae_y});
  return results_table(rows);
}

}  // namespace driveclone::eval
