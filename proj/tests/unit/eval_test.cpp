#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <regex>

#include "driveclone/errors.hpp"
#include "driveclone/eval/plot.hpp"
#include "driveclone/eval/protocol.hpp"
#include "driveclone/eval/results_table.hpp"

using namespace driveclone;
using namespace driveclone::eval;
using pipeline::WindowSample;

namespace {

WindowSample clip_window(const std::string& id, double tx, double ty) {
  WindowSample w;
  w.segment_id = id;
  w.features = nn::Tensor({10, 12});
  w.target = nn::Tensor({5, 2});
  for (std::size_t s = 0; s < 5; ++s) {
    w.target(s, 0) = tx;
    w.target(s, 1) = ty;
  }
  w.raw_target = w.target;
  w.history_accel = nn::Tensor({10, 2});
  return w;
}

nn::Tensor constant_pred(std::size_t n, double x, double y) {
  nn::Tensor p({n, 5, 2});
  for (std::size_t i = 0; i < p.size(); i += 2) {
    p[i] = x;
    p[i + 1] = y;
  }
  return p;
}

}  // namespace

TEST(Protocol, PerfectAndConstantPredictors) {
  std::vector<WindowSample> ws = {clip_window("a", 0.5, -0.5), clip_window("b", 0.5, -0.5)};
  const auto perfect = evaluate_predictions(ws, constant_pred(2, 0.5, -0.5));
  EXPECT_EQ(perfect.mae_x, 0.0);
  EXPECT_EQ(perfect.mae_y, 0.0);
  const auto zero = evaluate_predictions(ws, zero_predictions(ws));
  EXPECT_DOUBLE_EQ(zero.mae_x, 0.5);
  EXPECT_DOUBLE_EQ(zero.mae_y, 0.5);
}

TEST(Protocol, UnweightedMeanOverClips) {
  // Clip "a" has one window with error 0.2; clip "b" has three with 0.4.
  std::vector<WindowSample> ws = {clip_window("a", 0.2, 0), clip_window("b", 0.4, 0),
                                  clip_window("b", 0.4, 0), clip_window("b", 0.4, 0)};
  const auto r = evaluate_predictions(ws, zero_predictions(ws), "m", "d");
  ASSERT_EQ(r.clip_count(), 2u);
  EXPECT_NEAR(r.clips[0].mae_x, 0.2, 1e-15);
  EXPECT_NEAR(r.clips[1].mae_x, 0.4, 1e-15);
  EXPECT_EQ(r.clips[1].windows, 3u);
  EXPECT_NEAR(r.mae_x, 0.3, 1e-12);
  EXPECT_NEAR(r.mae_x, 0.5 * (r.clips[0].mae_x + r.clips[1].mae_x), 1e-12);
}

TEST(Protocol, AggregateIgnoresClipOrder) {
  std::vector<WindowSample> ws = {clip_window("c", 0.1, 0.7), clip_window("a", 0.3, 0.2),
                                  clip_window("b", 0.9, 0.4)};
  const auto r1 = evaluate_predictions(ws, zero_predictions(ws));
  std::reverse(ws.begin(), ws.end());
  const auto r2 = evaluate_predictions(ws, zero_predictions(ws));
  EXPECT_EQ(r1.mae_x, r2.mae_x);
  EXPECT_EQ(r1.mae_y, r2.mae_y);
  EXPECT_EQ(r1.clips[0].segment_id, "a");
}

TEST(Protocol, EmptyAndMisalignedInputsRejected) {
  EXPECT_THROW(evaluate_predictions({}, nn::Tensor({0, 5, 2})), ValidationError);
  std::vector<WindowSample> ws = {clip_window("a", 0, 0)};
  EXPECT_THROW(evaluate_predictions(ws, nn::Tensor({2, 5, 2})), ShapeError);
}

TEST(Protocol, PersistenceRepeatsLastSmoothedAcceleration) {
  std::vector<WindowSample> ws = {clip_window("a", 0, 0)};
  ws[0].history_accel(9, 0) = 0.7;
  ws[0].history_accel(9, 1) = -0.1;
  ws[0].history_accel(8, 0) = 5.0;
  const auto p = persistence_predictions(ws);
  for (std::size_t s = 0; s < 5; ++s) {
    EXPECT_EQ(p[s * 2], 0.7);
    EXPECT_EQ(p[s * 2 + 1], -0.1);
  }
}

TEST(Protocol, ReportJsonRoundTrip) {
  std::vector<WindowSample> ws = {clip_window("a", 0.25, 0.1), clip_window("b", 0.5, 0.3)};
  const auto r = evaluate_predictions(ws, zero_predictions(ws), "model", "val");
  const auto back = report_from_json(report_to_json(r));
  EXPECT_EQ(back.model_id, "model");
  EXPECT_EQ(back.dataset_id, "val");
  EXPECT_EQ(back.mae_x, r.mae_x);
  EXPECT_EQ(back.clips.size(), 2u);
  EXPECT_EQ(report_to_json(back), report_to_json(r));
}

TEST(Table, ReferenceRowsMarkTheFrontCameraModel) {
  const std::vector<TableRow> rows = {{"NN", 0.2287, 0.2046},
                                      {"Stacked linear regressor", 0.2101, 0.1968},
                                      {"LSTM with 12 features", 0.1453, 0.1399},
                                      {"LSTM with front camera", 0.1379, 0.1278},
                                      {"LSTM with all cameras", 0.1393, 0.1293}};
  const auto t = results_table(rows);
  EXPECT_TRUE(t.best_y[3]);
  EXPECT_TRUE(t.best_x[3]);
  EXPECT_EQ(std::count(t.best_y.begin(), t.best_y.end(), true), 1);
  EXPECT_NE(t.text.find("**0.1278**"), std::string::npos) << t.text;
  EXPECT_NE(t.csv.find("LSTM with front camera,0.1379,0.1278,1,1"), std::string::npos) << t.csv;
}

TEST(Table, SingleRowAndTies) {
  const std::vector<TableRow> one = {{"only", 0.5, 0.6}};
  const auto t1 = results_table(one);
  EXPECT_TRUE(t1.best_x[0] && t1.best_y[0]);
  const std::vector<TableRow> tied = {{"a", 0.1, 0.3}, {"b", 0.1, 0.2}, {"c", 0.4, 0.2}};
  const auto t2 = results_table(tied);
  EXPECT_EQ(t2.best_x, (std::vector<bool>{true, true, false}));
  EXPECT_EQ(t2.best_y, (std::vector<bool>{false, true, true}));
  EXPECT_EQ(t2.csv.substr(0, t2.csv.find('\n')), "model,mae_x,mae_y,best_x,best_y");
}

TEST(Plot, AxisFixedAndClampWithMarker) {
  PlotSeries s;
  s.frame = {10, 11, 12};
  s.pred_x = {0.1, 3.0, -0.2};
  s.true_x = {0.1, 0.2, -2.5};
  s.pred_y = {0.0, 0.0, 0.0};
  s.true_y = {0.0, 0.1, 0.0};
  const auto out = render_plot(s, PlotSpec{});
  const std::regex axis("data-y-min=\"-2\" data-y-max=\"2\"");
  EXPECT_EQ(std::distance(std::sregex_iterator(out.svg.begin(), out.svg.end(), axis),
                          std::sregex_iterator()),
            2);
  // One marker above (pred 3.0) and one below (true -2.5).
  const std::regex marker("class=\"overflow ");
  EXPECT_EQ(std::distance(std::sregex_iterator(out.svg.begin(), out.svg.end(), marker),
                          std::sregex_iterator()),
            2);
  EXPECT_NE(out.csv.find("11,3,0.2,0,0.1"), std::string::npos) << out.csv;
  EXPECT_NE(out.csv.find("-2.5"), std::string::npos);
}

TEST(Plot, IdenticalSeriesAndRowCount) {
  PlotSeries s;
  for (int i = 0; i < 7; ++i) {
    s.frame.push_back(i);
    s.pred_x.push_back(0.1 * i);
    s.true_x.push_back(0.1 * i);
    s.pred_y.push_back(-0.05 * i);
    s.true_y.push_back(-0.05 * i);
  }
  const auto out = render_plot(s, PlotSpec{});
  EXPECT_EQ(std::count(out.csv.begin(), out.csv.end(), '\n'), 8);
  const auto back = parse_plot_csv(out.csv);
  EXPECT_EQ(back.pred_x, back.true_x);
  EXPECT_EQ(back.pred_x, s.pred_x);
}

TEST(Plot, CsvReplotReproducesSvg) {
  PlotSeries s;
  for (int i = 0; i < 50; ++i) {
    s.frame.push_back(100 + i);
    s.pred_x.push_back(std::sin(0.3 * i) * 2.5);
    s.true_x.push_back(std::cos(0.2 * i));
    s.pred_y.push_back(0.01 * i - 0.3);
    s.true_y.push_back(1.0 / 3.0);
  }
  PlotSpec spec;
  spec.title = "replot";
  const auto first = render_plot(s, spec);
  const auto second = render_plot(parse_plot_csv(first.csv), spec);
  EXPECT_EQ(first.svg, second.svg);
  EXPECT_EQ(first.csv, second.csv);
}

TEST(Plot, LengthMismatchRejected) {
  PlotSeries s;
  s.frame = {1, 2};
  s.pred_x = {0, 0};
  s.true_x = {0};
  s.pred_y = {0, 0};
  s.true_y = {0, 0};
  EXPECT_THROW(render_plot(s, PlotSpec{}), ValidationError);
  EXPECT_THROW(parse_plot_csv("frame,pred_x\n1,2\n"), ParseError);
}
