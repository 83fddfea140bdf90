#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "driveclone/errors.hpp"
#include "driveclone/eval/evaluate.hpp"
#include "driveclone/eval/plot.hpp"
#include "driveclone/eval/results_table.hpp"
#include "driveclone/io/normalizer_file.hpp"
#include "driveclone/io/tensor_file.hpp"
#include "driveclone/io/window_archive.hpp"
#include "driveclone/models/gradcheck.hpp"
#include "driveclone/models/training.hpp"
#include "driveclone/synthgen.hpp"

namespace driveclone::cli {
namespace fs = std::filesystem;
namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct GenerateOpts {
  std::string out_dir;
  std::size_t segments = 10;
  std::uint64_t seed = 0;
  double ratio = 0.8;
  synthgen::ScenarioConfig scenario;
  std::string profile = "random_brake";
};

struct PipelineOpts {
  pipeline::PipelineConfig cfg;
  std::string front_accel = "label_or_differenced";

  void add(CLI::App* app) {
    app->add_option("--history", cfg.history_len, "History frames per window")->capture_default_str();
    app->add_option("--horizon", cfg.horizon_len, "Predicted frames per window")->capture_default_str();
    app->add_option("--stride", cfg.stride, "Window start stride")->capture_default_str();
    app->add_option("--smooth-window", cfg.smooth_window, "Odd moving-average window")->capture_default_str();
    app->add_option("--tolerance", cfg.detection.tolerance, "Detection corridor half-width (m)")->capture_default_str();
    app->add_option("--max-range", cfg.detection.max_range, "Detection corridor length (m)")->capture_default_str();
    app->add_option("--front-accel", front_accel, "label | differenced | label_or_differenced")->capture_default_str();
  }
  pipeline::PipelineConfig resolve() {
    cfg.front_accel = pipeline::front_accel_source_from_string(front_accel);
    cfg.validate();
    return cfg;
  }
};

struct PreprocessOpts {
  std::string input;
  std::string out;
  std::string normalizer;
  std::string dataset_id;
  PipelineOpts pipeline;
};

struct TrainOpts {
  std::string train;
  std::string val;
  std::string out;
  std::string run_json;
  std::string normalizer;
  std::string variant = "lstm_12";
  std::size_t hidden = 128;
  std::vector<double> ridge_lambdas = {0.01, 1.0, 100.0};
  nn::TrainConfig cfg;
  std::string loss = "mse";
  bool quiet = false;
};

struct EvaluateOpts {
  std::vector<std::string> models;
  std::string windows;
  std::string report;
  std::string table;
  std::string csv;
  bool baselines = false;
};

struct PlotOpts {
  std::string model;
  std::string windows;
  std::string segment;
  std::string from_csv;
  std::string svg;
  std::string csv;
  std::string title;
};

struct GradcheckOpts {
  std::string variant = "all";
  models::TinyModelConfig tiny;
  double eps = 1e-5;
  double tol = 1e-4;
};

void run_generate(GenerateOpts& o, std::ostream& out) {
  o.scenario.leader = synthgen::leader_profile_from_string(o.profile);
  const auto files = synthgen::generate_corpus(o.segments, o.ratio, o.seed, o.out_dir, o.scenario);
  out << "generated " << files.train_segments << " train + " << files.validation_segments
      << " validation segments in " << o.out_dir << "\n";
}

void run_preprocess(PreprocessOpts& o, std::ostream& out) {
  const auto cfg = o.pipeline.resolve();
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw IoError("cannot open " + o.input);
  const auto segments = parse_segments(in);
  io::WindowArchive archive;
  archive.config = cfg;
  archive.dataset_id = o.dataset_id.empty() ? fs::path(o.input).stem().string() : o.dataset_id;
  archive.windows = pipeline::build_dataset(segments, cfg);
  io::save_window_archive(o.out, archive);
  if (!o.normalizer.empty()) {
    io::save_normalizer(o.normalizer, pipeline::fit_normalizer(archive.windows));
  }
  out << "wrote " << archive.windows.size() << " windows from " << segments.size()
      << " segments to " << o.out << "\n";
}

std::size_t embedding_dim_of(const std::vector<pipeline::WindowSample>& windows,
                             const std::vector<CameraView>& views) {
  if (views.empty() || windows.empty()) return 0;
  const auto it = windows.front().embeddings.find(views.front());
  if (it == windows.front().embeddings.end()) {
    throw ConfigError("variant needs '" + std::string(to_string(views.front())) +
                      "' embeddings, absent from the training windows");
  }
  return it->second.cols();
}

void run_train(TrainOpts& o, const std::string& config_path, std::ostream& out) {
  o.cfg.loss = nn::loss_kind_from_string(o.loss);
  o.cfg.validate();
  auto train_archive = io::load_window_archive(o.train);
  auto val_archive = io::load_window_archive(o.val);
  const pipeline::DatasetSplit split(std::move(train_archive.windows), std::move(val_archive.windows));

  auto spec = models::ArchitectureSpec::for_variant(models::architecture_from_string(o.variant));
  spec.hidden = o.hidden;
  spec.ridge_lambdas = o.ridge_lambdas;
  spec.history_len = train_archive.config.history_len;
  spec.horizon_len = train_archive.config.horizon_len;
  spec.embedding_dim = embedding_dim_of(split.train(), spec.views());
  spec.validate();

  const auto stats = o.normalizer.empty() ? pipeline::fit_normalizer(split.train())
                                          : io::load_normalizer(o.normalizer);
  auto train_set = split.train();
  auto val_set = split.validation();
  pipeline::apply_normalizer(train_set, stats);
  pipeline::apply_normalizer(val_set, stats);

  auto model = models::build_model(spec, o.cfg.seed);
  models::EpochCallback progress;
  if (!o.quiet) {
    progress = [&](std::size_t epoch, double loss) {
      if (epoch == 1 || epoch % 10 == 0 || epoch == o.cfg.epochs) {
        out << "epoch " << epoch << " loss " << fmt("%.6f", loss) << "\n";
      }
    };
  }
  auto run = models::train(*model, train_set, val_set, o.cfg, stats, train_archive.config, progress);
  if (!config_path.empty()) run.artifact.config_snapshot = io::read_text_file(config_path);
  models::save_artifact(o.out, run.artifact);
  if (!o.run_json.empty()) io::write_text_file(o.run_json, models::run_to_json(run));
  out << "trained " << run.artifact.id() << ": " << run.epochs_run << " epochs, val MAE X "
      << fmt("%.4f", run.val_mae_x) << " Y " << fmt("%.4f", run.val_mae_y) << "\n";
}

void run_evaluate(EvaluateOpts& o, std::ostream& out) {
  const auto archive = io::load_window_archive(o.windows);
  std::vector<eval::EvalReport> reports;
  for (const auto& path : o.models) {
    reports.push_back(eval::evaluate(models::load_artifact(path), archive.windows, archive.dataset_id));
  }
  if (o.baselines) {
    reports.push_back(eval::evaluate_predictions(
        archive.windows, eval::zero_predictions(archive.windows), "zero", archive.dataset_id));
    reports.push_back(eval::evaluate_predictions(
        archive.windows, eval::persistence_predictions(archive.windows), "persistence",
        archive.dataset_id));
  }
  const auto table = eval::results_table(reports);
  out << table.text;
  if (!o.report.empty()) {
    std::string json = "[\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      json += (i ? ",\n" : "") + eval::report_to_json(reports[i]);
    }
    io::write_text_file(o.report, json + "]\n");
  }
  if (!o.table.empty()) io::write_text_file(o.table, table.text);
  if (!o.csv.empty()) io::write_text_file(o.csv, table.csv);
}

void run_plot(PlotOpts& o, std::ostream& out) {
  eval::PlotSpec spec;
  eval::PlotSeries series;
  if (!o.from_csv.empty()) {
    series = eval::parse_plot_csv(io::read_text_file(o.from_csv));
    spec.title = o.title;
  } else {
    if (o.model.empty() || o.windows.empty()) {
      throw ConfigError("plot needs --model and --windows, or --from-csv");
    }
    const auto artifact = models::load_artifact(o.model);
    const auto archive = io::load_window_archive(o.windows);
    if (archive.windows.empty()) throw ValidationError("window archive is empty");
    std::string segment = o.segment;
    if (segment.empty()) {
      std::set<std::string> ids;
      for (const auto& w : archive.windows) ids.insert(w.segment_id);
      segment = *ids.begin();
    }
    series = eval::segment_series(models::Predictor(artifact), archive.windows, segment);
    spec.title = o.title.empty() ? artifact.id() + " on " + segment : o.title;
  }
  const auto plot = eval::render_plot(series, spec);
  if (!o.svg.empty()) io::write_text_file(o.svg, plot.svg);
  if (!o.csv.empty()) io::write_text_file(o.csv, plot.csv);
  out << "plotted " << series.size() << " frames\n";
}

bool run_gradcheck(GradcheckOpts& o, std::ostream& out) {
  std::vector<models::Architecture> variants;
  if (o.variant == "all") {
    variants = {models::Architecture::lstm_12, models::Architecture::lstm_front,
                models::Architecture::lstm_all};
  } else {
    variants = {models::architecture_from_string(o.variant)};
  }
  bool ok = true;
  for (auto v : variants) {
    const auto r = models::check_gradients(v, o.tiny, o.eps, o.tol);
    out << models::to_string(v) << " max_rel_error=" << fmt("%.3e", r.max_rel_error)
        << " at " << r.worst_param << "[" << r.worst_index << "] checked=" << r.checked << " "
        << (r.passed ? "PASS" : "FAIL") << "\n";
    ok = ok && r.passed;
  }
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Behavioral-cloning toolkit: synthetic data, preprocessing, training, evaluation",
               "driveclone"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  auto* config = app.set_config("--config", "", "INI file; [section] names a subcommand");

  GenerateOpts gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic corpus (train.jsonl, val.jsonl, manifest.json)");
  generate->add_option("--out", gen.out_dir, "Output directory")->required();
  generate->add_option("--segments", gen.segments, "Number of segments")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
  generate->add_option("--ratio", gen.ratio, "Training fraction")->capture_default_str();
  generate->add_option("--profile", gen.profile, "constant | sinusoidal | random_brake")->capture_default_str();
  generate->add_option("--duration", gen.scenario.duration_s, "Segment length (s)")->capture_default_str();
  generate->add_option("--rate", gen.scenario.rate_hz, "Frame rate (Hz)")->capture_default_str();
  generate->add_option("--embedding-dim", gen.scenario.embedding_dim, "Camera embedding width")->capture_default_str();
  generate->add_option("--lateral", gen.scenario.lateral_amplitude, "Lane wander amplitude (m)")->capture_default_str();
  generate->add_option("--intent-response", gen.scenario.intent_response, "Follower decel while intent shows (m/s^2)")->capture_default_str();

  PreprocessOpts pre;
  auto* preprocess = app.add_subcommand("preprocess", "JSONL segments to a window archive");
  preprocess->add_option("--input", pre.input, "Segments JSONL")->required();
  preprocess->add_option("--out", pre.out, "Window archive to write")->required();
  preprocess->add_option("--normalizer", pre.normalizer, "Also write normalizer stats fitted on these windows");
  preprocess->add_option("--dataset-id", pre.dataset_id, "Dataset id (default: input file stem)");
  pre.pipeline.add(preprocess);

  TrainOpts tr;
  auto* train = app.add_subcommand("train", "Train one architecture");
  train->add_option("--train", tr.train, "Training window archive")->required();
  train->add_option("--val", tr.val, "Validation window archive")->required();
  train->add_option("--out", tr.out, "Model artifact to write")->required();
  train->add_option("--run-json", tr.run_json, "Write loss curve and metrics as JSON");
  train->add_option("--normalizer", tr.normalizer, "Normalizer stats (default: fit on --train)");
  train->add_option("--variant", tr.variant, "baseline_nn | stacked_lr | lstm_12 | lstm_front | lstm_all")->capture_default_str();
  train->add_option("--hidden", tr.hidden, "LSTM hidden size")->capture_default_str();
  train->add_option("--ridge-lambdas", tr.ridge_lambdas, "stacked_lr base strengths")->capture_default_str();
  train->add_option("--epochs", tr.cfg.epochs)->capture_default_str();
  train->add_option("--batch-size", tr.cfg.batch_size)->capture_default_str();
  train->add_option("--lr", tr.cfg.learning_rate, "Adam learning rate")->capture_default_str();
  train->add_option("--seed", tr.cfg.seed)->capture_default_str();
  train->add_option("--loss", tr.loss, "mse | mae")->capture_default_str();
  train->add_flag("--early-stopping", tr.cfg.early_stopping, "Stop when validation MAE stalls");
  train->add_option("--patience", tr.cfg.patience)->capture_default_str();
  train->add_flag("--quiet", tr.quiet, "No per-epoch output");

  EvaluateOpts ev;
  auto* evaluate = app.add_subcommand("evaluate", "Per-clip MAE report and results table");
  evaluate->add_option("--model", ev.models, "Model artifact(s)")->required();
  evaluate->add_option("--windows", ev.windows, "Validation window archive")->required();
  evaluate->add_option("--report", ev.report, "Write reports as JSON");
  evaluate->add_option("--table", ev.table, "Write the text table");
  evaluate->add_option("--csv", ev.csv, "Write the table as CSV");
  evaluate->add_flag("--baselines", ev.baselines, "Add zero and persistence predictors");

  PlotOpts pl;
  auto* plot = app.add_subcommand("plot", "Predicted vs true acceleration for one segment (SVG + CSV)");
  plot->add_option("--model", pl.model, "Model artifact");
  plot->add_option("--windows", pl.windows, "Window archive");
  plot->add_option("--segment", pl.segment, "Segment id (default: first)");
  plot->add_option("--from-csv", pl.from_csv, "Re-render a CSV written by an earlier plot");
  plot->add_option("--svg", pl.svg, "SVG output path");
  plot->add_option("--csv", pl.csv, "CSV output path");
  plot->add_option("--title", pl.title, "Plot title");

  GradcheckOpts gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the LSTM gradients");
  gradcheck->add_option("--variant", gc.variant, "all | lstm_12 | lstm_front | lstm_all | baseline_nn")->capture_default_str();
  gradcheck->add_option("--hidden", gc.tiny.hidden)->capture_default_str();
  gradcheck->add_option("--steps", gc.tiny.history, "History length")->capture_default_str();
  gradcheck->add_option("--embedding-dim", gc.tiny.embedding_dim)->capture_default_str();
  gradcheck->add_option("--seed", gc.tiny.seed)->capture_default_str();
  gradcheck->add_option("--eps", gc.eps)->capture_default_str();
  gradcheck->add_option("--tol", gc.tol)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    const auto selected = app.get_subcommands();
    err << (selected.empty() ? app.help() : selected.front()->help());
    return 2;
  }

  try {
    if (generate->parsed()) run_generate(gen, out);
    if (preprocess->parsed()) run_preprocess(pre, out);
    if (train->parsed()) run_train(tr, config->count() ? config->as<std::string>() : std::string(), out);
    if (evaluate->parsed()) run_evaluate(ev, out);
    if (plot->parsed()) run_plot(pl, out);
    if (gradcheck->parsed() && !run_gradcheck(gc, out)) return 1;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace driveclone::cli
