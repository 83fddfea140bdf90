// One PASS/FAIL line per acceptance criterion. Exit status is non-zero if any
// criterion fails. `driveclone_acceptance <name>...` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "driveclone/errors.hpp"
#include "driveclone/eval/evaluate.hpp"
#include "driveclone/eval/plot.hpp"
#include "driveclone/eval/protocol.hpp"
#include "driveclone/geometry.hpp"
#include "driveclone/io/tensor_file.hpp"
#include "driveclone/models/artifact.hpp"
#include "driveclone/models/gradcheck.hpp"
#include "driveclone/models/training.hpp"
#include "driveclone/pipeline.hpp"
#include "driveclone/synthgen.hpp"
#include "oracles.hpp"
#include "scratch_dir.hpp"

using namespace driveclone;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Training setup used for every model-quality check.
constexpr std::size_t kCorpusSegments = 200;
constexpr double kTrainRatio = 0.8;
constexpr std::uint64_t kCorpusSeed = 7;

nn::TrainConfig desk_train_config(std::size_t epochs, std::uint64_t seed) {
  nn::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.seed = seed;
  cfg.learning_rate = 2e-3;
  cfg.batch_size = 16;
  cfg.loss = nn::LossKind::mae;
  return cfg;
}

models::ArchitectureSpec desk_spec(models::Architecture arch, std::size_t embedding_dim) {
  auto spec = models::ArchitectureSpec::for_variant(arch, embedding_dim);
  spec.hidden = 32;
  return spec;
}

const pipeline::DatasetSplit& corpus_windows() {
  static const pipeline::DatasetSplit split = [] {
    auto segs = synthgen::split_corpus(synthgen::generate_segments(kCorpusSegments, kCorpusSeed),
                                       kTrainRatio);
    const pipeline::PipelineConfig pc;
    return pipeline::DatasetSplit(pipeline::build_dataset(segs.train, pc),
                                  pipeline::build_dataset(segs.validation, pc));
  }();
  return split;
}

Outcome gradient_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  double worst = 0.0;
  for (auto arch : {models::Architecture::lstm_12, models::Architecture::lstm_front,
                    models::Architecture::lstm_all}) {
    const auto r = models::check_gradients(arch, models::TinyModelConfig{}, 1e-5, 1e-4);
    worst = std::max(worst, r.max_rel_error);
    o.pass = o.pass && r.passed && r.max_rel_error <= 1e-4 && r.checked > 0;
    o.detail += std::string(models::to_string(arch)) + fmt(" %.2e ", r.max_rel_error);
  }
  const double secs = seconds_since(t0);
  o.pass = o.pass && secs < 60.0;
  o.detail += fmt("(%.1fs)", secs);
  return o;
}

Outcome acceleration_formula() {
  Outcome o;
  double worst = 0.0;
  bool first_zero = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    synthgen::ScenarioConfig cfg;
    cfg.seed = seed;
    const auto gen = synthgen::generate_segment(cfg);
    const Segment s = pipeline::compute_accelerations(gen.segment);
    first_zero = first_zero && *s.frames[0].ego_accel_g == Vec3{0.0, 0.0, 0.0};
    for (std::size_t t = 0; t < s.size(); ++t) {
      for (int k = 0; k < 3; ++k) {
        worst = std::max(worst, std::abs((*s.frames[t].ego_accel_g)[k] - gen.internal_accel[t][k]));
      }
    }
  }
  o.pass = worst <= 1e-6 && first_zero;
  o.detail = "100 segments, max |diff| " + fmt("%.2e", worst) + (first_zero ? ", a_0 = 0" : ", a_0 != 0");
  return o;
}

Outcome transform_correctness() {
  nn::Rng rng(2024);
  double round_trip = 0.0, convention = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose pose = oracle::random_pose(rng);
    const Vec3 p{rng.uniform(-80, 80), rng.uniform(-80, 80), rng.uniform(-5, 5)};
    const Vec3 g = geometry::to_global(p, pose);
    const Vec3 ref = oracle::row_vector_product(pose.m, p);
    const Vec3 back = geometry::to_vehicle(g, pose);
    for (int k = 0; k < 3; ++k) {
      round_trip = std::max(round_trip, std::abs(back[k] - p[k]));
      convention = std::max(convention, std::abs(g[k] - ref[k]));
    }
  }
  return {round_trip <= 1e-9 && convention <= 1e-9,
          "1000 poses, round trip " + fmt("%.1e", round_trip) + ", vs 4x4 product " +
              fmt("%.1e", convention)};
}

Outcome detection_oracle() {
  nn::Rng rng(99);
  std::size_t checked = 0, mismatches = 0, monotone_violations = 0;
  const std::vector<double> tolerances = {0.0, 0.25, 0.5, 1.0, 1.5, 2.5};
  for (int s = 0; s < 1000; ++s) {
    TrackedObject obj;
    obj.obj_id = "v";
    obj.center_v = {rng.uniform(-10, 110), rng.uniform(-6, 6), 0.0};
    obj.dims = {rng.uniform(1.0, 6.0), rng.uniform(0.5, 2.5), 1.5};
    obj.heading = rng.uniform(-3.14159, 3.14159);
    const double tol = rng.uniform(0.0, 2.0);
    const geometry::DetectionConfig cfg{tol, 100.0};
    const auto d = oracle::sample_corridor(
        {obj.center_v[0], obj.center_v[1], obj.dims[0], obj.dims[1], obj.heading}, tol, 100.0);
    const auto rect = geometry::OrientedRect::from_object(obj);
    if (!d.in_band()) {
      ++checked;
      if (geometry::intersects_corridor(rect, cfg) != d.hit) ++mismatches;
    }
    bool prev = false;
    for (double t : tolerances) {
      const bool hit = geometry::intersects_corridor(rect, {t, 100.0});
      if (prev && !hit) ++monotone_violations;
      prev = hit;
    }
  }
  return {mismatches == 0 && monotone_violations == 0 && checked >= 900,
          std::to_string(checked) + " scenes outside band, " + std::to_string(mismatches) +
              " mismatches, " + std::to_string(monotone_violations) + " monotonicity violations"};
}

Outcome learning_sanity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& ds = corpus_windows();
  const auto zero = eval::evaluate_predictions(ds.validation(), eval::zero_predictions(ds.validation()));
  const auto persist =
      eval::evaluate_predictions(ds.validation(), eval::persistence_predictions(ds.validation()));
  const std::size_t d = ds.train().front().embedding_dim();
  const auto run = models::train_variant(desk_spec(models::Architecture::lstm_12, d), ds,
                                         desk_train_config(100, 0), pipeline::PipelineConfig{});
  const auto rep = eval::evaluate(run.artifact, ds.validation());
  const double secs = seconds_since(t0);
  const bool x_ok = rep.mae_x <= 0.7 * zero.mae_x && rep.mae_x < persist.mae_x;
  const bool y_ok = rep.mae_y <= 0.7 * zero.mae_y && rep.mae_y < persist.mae_y;
  std::ostringstream s;
  s << "lstm_12 " << fmt("%.4f", rep.mae_x) << "/" << fmt("%.4f", rep.mae_y) << " zero "
    << fmt("%.4f", zero.mae_x) << "/" << fmt("%.4f", zero.mae_y) << " persistence "
    << fmt("%.4f", persist.mae_x) << "/" << fmt("%.4f", persist.mae_y) << fmt(" (%.0fs)", secs);
  return {x_ok && y_ok && secs < 900.0, s.str()};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome ordering() {
  const auto& ds = corpus_windows();
  const std::size_t d = ds.train().front().embedding_dim();
  const std::vector<models::Architecture> archs = {
      models::Architecture::baseline_nn, models::Architecture::stacked_lr,
      models::Architecture::lstm_12, models::Architecture::lstm_front,
      models::Architecture::lstm_all};
  std::map<models::Architecture, std::vector<double>> scores;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (auto arch : archs) {
      const auto run =
          models::train_variant(desk_spec(arch, d), ds, desk_train_config(20, seed), {});
      scores[arch].push_back(eval::evaluate(run.artifact, ds.validation()).mean_mae());
    }
  }
  std::map<models::Architecture, double> m;
  std::ostringstream s;
  for (auto arch : archs) {
    m[arch] = median(scores[arch]);
    s << models::to_string(arch) << " " << fmt("%.4f", m[arch]) << " ";
  }
  using A = models::Architecture;
  const double ratio = m[A::lstm_all] / m[A::lstm_front];
  s << "all/front " << fmt("%.3f", ratio);
  bool pass = m[A::lstm_front] < m[A::lstm_12] && std::abs(ratio - 1.0) <= 0.15;
  for (auto lstm : {A::lstm_12, A::lstm_front, A::lstm_all}) {
    pass = pass && m[lstm] < m[A::baseline_nn] && m[lstm] < m[A::stacked_lr];
  }
  return {pass, s.str()};
}

// Corpus -> windows -> two trained models -> reports and plots, all written
// under `dir`. Returns every produced file.
std::vector<fs::path> end_to_end(const fs::path& dir) {
  synthgen::ScenarioConfig sc;
  sc.embedding_dim = 4;
  const auto corpus = synthgen::generate_corpus(12, 0.75, 31, dir / "corpus", sc);
  const auto train_segs = parse_segments(io::read_text_file(corpus.train));
  const auto val_segs = parse_segments(io::read_text_file(corpus.validation));
  pipeline::PipelineConfig pc;
  pc.stride = 2;
  pipeline::DatasetSplit ds(pipeline::build_dataset(train_segs, pc),
                            pipeline::build_dataset(val_segs, pc));
  std::vector<fs::path> files = {corpus.train, corpus.validation, corpus.manifest};
  for (auto arch : {models::Architecture::lstm_all, models::Architecture::stacked_lr}) {
    auto spec = models::ArchitectureSpec::for_variant(arch, 4);
    spec.hidden = 8;
    const auto run = models::train_variant(spec, ds, desk_train_config(2, 5), pc);
    const std::string name(models::to_string(arch));
    models::save_artifact(dir / (name + ".dcm"), run.artifact);
    io::write_text_file(dir / (name + ".run.json"), models::run_to_json(run));
    const auto loaded = models::load_artifact(dir / (name + ".dcm"));
    io::write_text_file(dir / (name + ".report.json"),
                        eval::report_to_json(eval::evaluate(loaded, ds.validation(), "val")));
    const auto series = eval::segment_series(models::Predictor(loaded), ds.validation(),
                                             ds.validation().front().segment_id);
    const auto plot = eval::render_plot(series, {name});
    io::write_text_file(dir / (name + ".svg"), plot.svg);
    io::write_text_file(dir / (name + ".csv"), plot.csv);
    for (const char* ext : {".dcm", ".run.json", ".report.json", ".svg", ".csv"}) {
      files.push_back(dir / (name + ext));
    }
  }
  return files;
}

Outcome determinism() {
  testing::ScratchDir a("accept-a"), b("accept-b");
  const auto fa = end_to_end(a.path());
  const auto fb = end_to_end(b.path());
  std::size_t differing = 0;
  std::string first;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    std::string ta = io::read_text_file(fa[i]);
    std::string tb = io::read_text_file(fb[i]);
    // run.json records wall-clock seconds; drop that field before comparing.
    for (auto* t : {&ta, &tb}) {
      const auto k = t->find("\"wall_clock_seconds\"");
      if (k != std::string::npos) t->erase(k, t->find_first_of(",}", k) - k);
    }
    if (ta != tb) {
      ++differing;
      if (first.empty()) first = fa[i].filename().string();
    }
  }
  return {differing == 0, std::to_string(fa.size()) + " files compared, " +
                              std::to_string(differing) + " differ" +
                              (first.empty() ? "" : " (first: " + first + ")")};
}

pipeline::WindowSample clip_window(const std::string& id, double tx) {
  pipeline::WindowSample w;
  w.segment_id = id;
  w.features = nn::Tensor({10, 12});
  w.target = nn::Tensor({5, 2});
  for (std::size_t s = 0; s < 5; ++s) w.target(s, 0) = tx;
  w.raw_target = w.target;
  w.history_accel = nn::Tensor({10, 2});
  return w;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto k = text.find(needle); k != std::string::npos; k = text.find(needle, k + 1)) ++n;
  return n;
}

Outcome evaluation_protocol() {
  // Clip a: one window, error 0.2. Clip b: three windows, error 0.4.
  std::vector<pipeline::WindowSample> ws = {clip_window("a", 0.2), clip_window("b", 0.4),
                                            clip_window("b", 0.4), clip_window("b", 0.4)};
  const auto r = eval::evaluate_predictions(ws, eval::zero_predictions(ws));
  const bool mean_ok = std::abs(r.mae_x - 0.3) < 1e-12;

  eval::PlotSeries s;
  s.frame = {10, 11, 12};
  s.pred_x = {0.1, 3.0, -0.2};
  s.true_x = {0.1, 0.2, -2.5};
  s.pred_y = {0.0, 0.0, 0.0};
  s.true_y = {0.0, 0.1, 0.0};
  const auto out = eval::render_plot(s, eval::PlotSpec{});
  const bool axis_ok = count(out.svg, "data-y-min=\"-2\" data-y-max=\"2\"") == 2;
  const bool markers_ok = count(out.svg, "class=\"overflow ") == 2;
  const bool csv_ok = out.csv.find("11,3,0.2,0,0.1") != std::string::npos &&
                      out.csv.find("-2.5") != std::string::npos;
  bool rejects = false;
  try {
    eval::render_svg(s, {"", 2.0, -2.0});
  } catch (const ConfigError&) {
    rejects = true;
  }
  return {mean_ok && axis_ok && markers_ok && csv_ok && rejects,
          "two-clip mean " + fmt("%.6f", r.mae_x) + (axis_ok ? ", axis [-2, 2]" : ", axis wrong") +
              (markers_ok ? ", 2 overflow markers" : ", markers wrong") +
              (csv_ok ? ", csv unclamped" : ", csv clamped")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient-correctness", gradient_correctness},
      {"acceleration-formula", acceleration_formula},
      {"transform-correctness", transform_correctness},
      {"detection-oracle", detection_oracle},
      {"learning-sanity", learning_sanity},
      {"model-ordering", ordering},
      {"determinism", determinism},
      {"evaluation-protocol", evaluation_protocol},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
