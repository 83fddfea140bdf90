#include "driveclone/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "driveclone/errors.hpp"
#include "driveclone/geometry.hpp"
#include "driveclone/io/tensor_file.hpp"
#include "driveclone/nn/rng.hpp"

namespace driveclone::synthgen {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

// Sum of sinusoids y(t) = sum A_k sin(w_k t + p_k) with analytic derivatives.
struct Wander {
  std::vector<double> amp, omega, phase;

  static Wander draw(nn::Rng& rng, double amplitude, bool randomize) {
    Wander w;
    for (int k = 0; k < 2; ++k) {
      w.amp.push_back(amplitude * (randomize ? rng.uniform(0.4, 0.6) : 0.5));
      w.omega.push_back(kTwoPi * (randomize ? rng.uniform(0.08, 0.3) : 0.1 + 0.1 * k));
      w.phase.push_back(randomize ? rng.uniform(0.0, kTwoPi) : 0.0);
    }
    return w;
  }
  double y(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k) s += amp[k] * std::sin(omega[k] * t + phase[k]);
    return s;
  }
  double dy(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k) {
      s += amp[k] * omega[k] * std::cos(omega[k] * t + phase[k]);
    }
    return s;
  }
  double ddy(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k) {
      s -= amp[k] * omega[k] * omega[k] * std::sin(omega[k] * t + phase[k]);
    }
    return s;
  }
};

struct BrakeEvent {
  std::size_t onset = 0;
  std::size_t end = 0;  // exclusive
  double decel = 0.0;
  double resume_speed = 0.0;  // cruise target once the event ends
};

struct Projection {
  std::vector<double> weight;  // [D x 4]
  std::vector<double> bias;    // [D]
};

Projection draw_projection(std::uint64_t seed, std::size_t view, std::size_t dim) {
  nn::Rng rng(nn::mix_seed(seed, 100 + view));
  Projection p;
  p.weight.resize(dim * 4);
  p.bias.resize(dim);
  for (double& w : p.weight) w = rng.normal();
  for (double& b : p.bias) b = 0.3 * rng.normal();
  return p;
}

}  // namespace

void IdmParams::validate() const {
  if (!(desired_speed > 0.0 && time_headway > 0.0 && max_accel > 0.0 &&
        comfortable_decel > 0.0 && jam_distance > 0.0)) {
    throw ConfigError("IDM parameters must all be > 0");
  }
}

double idm_acceleration(const IdmParams& p, double v, double gap, double leader_speed) {
  const double dv = v - leader_speed;
  const double s_star =
      p.jam_distance +
      std::max(0.0, v * p.time_headway + v * dv / (2.0 * std::sqrt(p.max_accel * p.comfortable_decel)));
  const double r = v / p.desired_speed;
  const double q = s_star / gap;
  return p.max_accel * (1.0 - r * r * r * r - q * q);
}

double idm_equilibrium_gap(const IdmParams& p, double v) {
  const double r = v / p.desired_speed;
  const double free = 1.0 - r * r * r * r;
  if (!(free > 0.0)) throw ConfigError("equilibrium needs speed below the desired speed");
  return (p.jam_distance + v * p.time_headway) / std::sqrt(free);
}

std::string_view to_string(LeaderProfile profile) {
  switch (profile) {
    case LeaderProfile::constant: return "constant";
    case LeaderProfile::sinusoidal: return "sinusoidal";
    case LeaderProfile::random_brake: return "random_brake";
  }
  return "constant";
}

LeaderProfile leader_profile_from_string(std::string_view name) {
  if (name == "constant") return LeaderProfile::constant;
  if (name == "sinusoidal") return LeaderProfile::sinusoidal;
  if (name == "random_brake") return LeaderProfile::random_brake;
  throw ConfigError("unknown leader profile '" + std::string(name) + "'");
}

std::size_t ScenarioConfig::frame_count() const {
  return static_cast<std::size_t>(std::llround(duration_s * rate_hz));
}

void ScenarioConfig::validate() const {
  if (!(duration_s > 0.0) || !(rate_hz > 0.0)) throw ConfigError("duration_s and rate_hz must be > 0");
  if (frame_count() < 1) throw ConfigError("scenario has no frames");
  idm.validate();
  if (!(lateral_amplitude >= 0.0)) throw ConfigError("lateral_amplitude must be >= 0");
  if (embedding_dim == 0) throw ConfigError("embedding_dim must be >= 1");
  if (!(leader_speed > 0.0)) throw ConfigError("leader_speed must be > 0");
  if (!(embedding_noise >= 0.0)) throw ConfigError("embedding_noise must be >= 0");
  if (!(intent_response >= 0.0)) throw ConfigError("intent_response must be >= 0");
}

GeneratedSegment generate_segment(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.frame_count();
  const double dt = 1.0 / cfg.rate_hz;
  nn::Rng rng(nn::mix_seed(cfg.seed, 11));

  const double cruise = cfg.randomize ? rng.uniform(10.0, 18.0) : cfg.leader_speed;
  const Wander ego_wander = Wander::draw(rng, cfg.lateral_amplitude, cfg.randomize);
  const Wander lead_wander = Wander::draw(rng, cfg.lateral_amplitude, cfg.randomize);

  // Leader longitudinal plan.
  double sin_amp = 2.0, sin_omega = kTwoPi * 0.1, sin_phase = 0.0;
  if (cfg.randomize) {
    sin_amp = rng.uniform(1.0, 3.0);
    sin_omega = kTwoPi * rng.uniform(0.05, 0.15);
    sin_phase = rng.uniform(0.0, kTwoPi);
  }
  std::vector<BrakeEvent> events;
  std::vector<bool> intent(n, false);
  if (cfg.leader == LeaderProfile::random_brake) {
    std::size_t t = cfg.intent_lead + 10 + rng.below(30);
    while (true) {
      const auto duration = static_cast<std::size_t>(std::llround(rng.uniform(0.5, 1.0) * cfg.rate_hz));
      const double decel = rng.uniform(2.0, 4.0);
      // A fresh cruise target per event keeps the leader's speed from
      // telling when the next brake (and its intent) is due.
      const double resume = rng.uniform(10.0, 18.0);
      if (t + duration >= n) break;
      events.push_back({t, t + duration, decel, resume});
      for (std::size_t k = t - cfg.intent_lead; k < t; ++k) intent[k] = true;
      t += duration + 10 + rng.below(80);
    }
  }
  const double min_leader_speed = 2.0;
  const double recover_accel = 1.0;

  auto leader_accel = [&](std::size_t i, double v_prev) {
    const double time = static_cast<double>(i) * dt;
    switch (cfg.leader) {
      case LeaderProfile::constant: return 0.0;
      case LeaderProfile::sinusoidal:
        return sin_amp * sin_omega * std::cos(sin_omega * time + sin_phase);
      case LeaderProfile::random_brake: break;
    }
    double target = cruise;
    for (const auto& e : events) {
      if (i >= e.onset && i < e.end) {
        return v_prev > min_leader_speed ? -std::min(e.decel, (v_prev - min_leader_speed) / dt) : 0.0;
      }
      if (i >= e.end) target = e.resume_speed;
    }
    if (v_prev < target) return std::min(recover_accel, (target - v_prev) / dt);
    return std::max(-recover_accel, (target - v_prev) / dt);
  };

  std::vector<double> xl(n), vl(n), al(n, 0.0), xf(n), vf(n), af(n, 0.0);
  std::vector<double> yf(n), vyf(n), ayf(n, 0.0);
  vl[0] = cfg.leader == LeaderProfile::sinusoidal ? cruise + sin_amp * std::sin(sin_phase) : cruise;
  vf[0] = vl[0];
  const double gap0 = cfg.initial_gap > 0.0 ? cfg.initial_gap : idm_equilibrium_gap(cfg.idm, vf[0]);
  xf[0] = 0.0;
  xl[0] = gap0 + kVehicleLength;
  yf[0] = ego_wander.y(0.0);
  vyf[0] = ego_wander.dy(0.0);

  GeneratedSegment out;
  out.gap.assign(n, 0.0);
  out.gap[0] = gap0;
  for (std::size_t i = 1; i < n; ++i) {
    al[i] = leader_accel(i, vl[i - 1]);
    vl[i] = std::max(0.0, vl[i - 1] + al[i] * dt);
    al[i] = (vl[i] - vl[i - 1]) / dt;
    xl[i] = xl[i - 1] + vl[i] * dt;

    double a = idm_acceleration(cfg.idm, vf[i - 1], out.gap[i - 1], vl[i - 1]);
    if (intent[i - 1]) a -= cfg.intent_response;
    double v = vf[i - 1] + a * dt;
    if (v < 0.0) {
      v = 0.0;
      a = (v - vf[i - 1]) / dt;
    }
    vf[i] = v;
    af[i] = a;
    xf[i] = xf[i - 1] + vf[i] * dt;

    ayf[i] = ego_wander.ddy(static_cast<double>(i - 1) * dt);
    vyf[i] = vyf[i - 1] + ayf[i] * dt;
    yf[i] = yf[i - 1] + vyf[i] * dt;

    out.gap[i] = xl[i] - xf[i] - kVehicleLength;
    if (!(out.gap[i] > 0.0)) {
      char msg[128];
      std::snprintf(msg, sizeof msg, "collision at frame %zu (gap %.3f m, seed %llu)", i,
                    out.gap[i], static_cast<unsigned long long>(cfg.seed));
      throw GenerationError(msg);
    }
  }

  Segment& seg = out.segment;
  seg.id = cfg.segment_id.empty() ? "synth-" + std::to_string(cfg.seed) : cfg.segment_id;
  seg.frames.resize(n);
  double heading = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double time = static_cast<double>(i) * dt;
    if (std::hypot(vf[i], vyf[i]) > 0.1) heading = std::atan2(vyf[i], vf[i]);
    Frame& f = seg.frames[i];
    f.segment_id = seg.id;
    f.t_index = static_cast<std::int64_t>(i);
    f.timestamp_s = time;
    f.pose = Pose::from_yaw(heading, {xf[i], yf[i], 0.0});
    f.ego_velocity_g = {vf[i], vyf[i], 0.0};

    const double yl = lead_wander.y(time);
    const double vyl = lead_wander.dy(time);
    const double ayl = lead_wander.ddy(time);
    const double lead_heading = std::hypot(vl[i], vyl) > 0.1 ? std::atan2(vyl, vl[i]) : 0.0;
    TrackedObject lead;
    lead.obj_id = "leader";
    lead.obj_type = ObjectType::vehicle;
    lead.center_v = geometry::to_vehicle({xl[i], yl, 0.5 * kVehicleHeight}, f.pose);
    lead.dims = {kVehicleLength, kVehicleWidth, kVehicleHeight};
    lead.heading = wrap_angle(lead_heading - heading);
    lead.velocity_v = geometry::rotate_to_vehicle({vl[i], vyl, 0.0}, f.pose);
    lead.accel_v = geometry::rotate_to_vehicle({al[i], ayl, 0.0}, f.pose);
    f.labels.push_back(std::move(lead));
  }
  seg.nominal_dt = estimate_nominal_dt(seg.frames);

  out.internal_accel.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.internal_accel[i] = {af[i], ayf[i], 0.0};
  out.internal_accel[0] = {0.0, 0.0, 0.0};
  out.intent = std::move(intent);
  attach_embeddings(out, cfg);
  seg.validate();
  return out;
}

void attach_embeddings(GeneratedSegment& generated, const ScenarioConfig& cfg) {
  const std::size_t d = cfg.embedding_dim;
  auto& frames = generated.segment.frames;
  const std::size_t n = frames.size();
  if (generated.intent.size() != n || generated.gap.size() != n) {
    throw GenerationError("segment " + generated.segment.id + " lacks intent/gap ground truth");
  }
  std::vector<Projection> proj;
  for (std::size_t v = 0; v < kAllCameraViews.size(); ++v) {
    proj.push_back(draw_projection(cfg.projection_seed, v, d));
  }
  nn::Rng ctx_rng(nn::mix_seed(cfg.seed, 13));
  const double context = ctx_rng.uniform(-1.0, 1.0);
  nn::Rng noise(nn::mix_seed(cfg.seed, 200));
  for (std::size_t i = 0; i < n; ++i) {
    Frame& f = frames[i];
    const double vf = f.ego_velocity_g[0];
    double vl = vf, rel_y = 0.0, rel_vy = 0.0;
    if (!f.labels.empty()) {
      vl = geometry::rotate_to_global(f.labels.front().velocity_v, f.pose)[0];
      rel_y = f.labels.front().center_v[1];
      rel_vy = f.labels.front().velocity_v[1];
    }
    const double flag = generated.intent[i] ? 1.0 : 0.0;

    // The other views see the scene around the ego (leader's lateral offset
    // and drift, own speed, a per-segment constant) but not the ego's own
    // lateral pose, which the features already carry.
    std::array<std::array<double, 4>, 5> z{};
    z[0] = {(generated.gap[i] - 20.0) / 10.0, (vf - vl) / 2.0, (vl - 14.0) / 4.0, 2.0 * flag};
    for (std::size_t v = 1; v < z.size(); ++v) z[v] = {rel_y, context, vf / 20.0, 5.0 * rel_vy};

    f.embeddings.clear();
    for (std::size_t v = 0; v < kAllCameraViews.size(); ++v) {
      std::vector<double> e(d);
      for (std::size_t k = 0; k < d; ++k) {
        double s = proj[v].bias[k];
        for (std::size_t j = 0; j < 4; ++j) s += proj[v].weight[k * 4 + j] * z[v][j];
        e[k] = std::tanh(s) + cfg.embedding_noise * noise.normal();
      }
      f.embeddings[kAllCameraViews[v]] = std::move(e);
    }
  }
}

std::string segment_id_for(std::uint64_t base_seed, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "synth-%llu-%04zu", static_cast<unsigned long long>(base_seed),
                index);
  return buf;
}

std::vector<GeneratedSegment> generate_segments(std::size_t n, std::uint64_t base_seed,
                                                ScenarioConfig cfg) {
  std::vector<GeneratedSegment> out;
  out.reserve(n);
  cfg.projection_seed = nn::mix_seed(base_seed, 0xE3BEDull);
  for (std::size_t i = 0; i < n; ++i) {
    cfg.seed = nn::mix_seed(base_seed, i);
    cfg.segment_id = segment_id_for(base_seed, i);
    out.push_back(generate_segment(cfg));
  }
  return out;
}

CorpusSplit split_corpus(std::vector<GeneratedSegment> segments, double ratio) {
  if (segments.size() < 2) throw ConfigError("a corpus split needs at least 2 segments");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0, 1)");
  const auto n = segments.size();
  auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  CorpusSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? split.train : split.validation).push_back(std::move(segments[i].segment));
  }
  return split;
}

std::string corpus_manifest(std::size_t n, double ratio, std::uint64_t base_seed,
                            const ScenarioConfig& cfg, const CorpusSplit& split) {
  nlohmann::ordered_json j;
  j["generator"] = "driveclone-synthgen";
  j["format_version"] = 1;
  j["base_seed"] = base_seed;
  j["segments"] = n;
  j["split_ratio"] = ratio;
  auto& c = j["config"];
  c["duration_s"] = cfg.duration_s;
  c["rate_hz"] = cfg.rate_hz;
  c["leader_profile"] = std::string(to_string(cfg.leader));
  c["idm"] = {{"desired_speed", cfg.idm.desired_speed},
              {"time_headway", cfg.idm.time_headway},
              {"max_accel", cfg.idm.max_accel},
              {"comfortable_decel", cfg.idm.comfortable_decel},
              {"jam_distance", cfg.idm.jam_distance}};
  c["lateral_amplitude"] = cfg.lateral_amplitude;
  c["embedding_dim"] = cfg.embedding_dim;
  c["leader_speed"] = cfg.leader_speed;
  c["initial_gap"] = cfg.initial_gap;
  c["randomize"] = cfg.randomize;
  c["intent_lead"] = cfg.intent_lead;
  c["intent_response"] = cfg.intent_response;
  c["embedding_noise"] = cfg.embedding_noise;
  auto ids = [](const std::vector<Segment>& segs) {
    std::vector<std::string> out;
    for (const auto& s : segs) out.push_back(s.id);
    return out;
  };
  j["views"] = [] {
    std::vector<std::string> v;
    for (CameraView c : kAllCameraViews) v.emplace_back(to_string(c));
    return v;
  }();
  j["train"] = {{"file", "train.jsonl"}, {"segment_ids", ids(split.train)}};
  j["validation"] = {{"file", "val.jsonl"}, {"segment_ids", ids(split.validation)}};
  return j.dump(2) + "\n";
}

CorpusFiles generate_corpus(std::size_t n, double ratio, std::uint64_t base_seed,
                            const std::filesystem::path& dir, ScenarioConfig cfg) {
  if (n < 2) throw ConfigError("generate_corpus needs n >= 2");
  const CorpusSplit split = split_corpus(generate_segments(n, base_seed, cfg), ratio);
  std::filesystem::create_directories(dir);
  CorpusFiles files;
  files.train = dir / "train.jsonl";
  files.validation = dir / "val.jsonl";
  files.manifest = dir / "manifest.json";
  io::write_text_file(files.train, serialize_segments(split.train));
  io::write_text_file(files.validation, serialize_segments(split.validation));
  io::write_text_file(files.manifest, corpus_manifest(n, ratio, base_seed, cfg, split));
  files.train_segments = split.train.size();
  files.validation_segments = split.validation.size();
  return files;
}

}  // namespace driveclone::synthgen
