#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "driveclone/datamodel.hpp"

namespace driveclone::synthgen {

struct IdmParams {
  double desired_speed = 20.0;     // v0, m/s
  double time_headway = 1.2;       // T, s
  double max_accel = 1.5;          // a, m/s^2
  double comfortable_decel = 2.0;  // b, m/s^2
  double jam_distance = 2.0;       // s0, m

  void validate() const;
};

/// a = a_max * (1 - (v / v0)^4 - (s* / s)^2),
/// s* = s0 + max(0, v T + v dv / (2 sqrt(a b))), dv = v - v_leader.
double idm_acceleration(const IdmParams& p, double v, double gap, double leader_speed);

/// Gap at which a follower at speed v behind a leader at the same speed has
/// zero IDM acceleration. Requires v < v0.
double idm_equilibrium_gap(const IdmParams& p, double v);

enum class LeaderProfile { constant, sinusoidal, random_brake };

std::string_view to_string(LeaderProfile profile);
LeaderProfile leader_profile_from_string(std::string_view name);

inline constexpr double kVehicleLength = 4.5;
inline constexpr double kVehicleWidth = 1.9;
inline constexpr double kVehicleHeight = 1.5;

struct ScenarioConfig {
  double duration_s = 20.0;
  double rate_hz = 10.0;
  LeaderProfile leader = LeaderProfile::random_brake;
  IdmParams idm;
  double lateral_amplitude = 0.3;  // m, ego and leader lane wander
  std::size_t embedding_dim = 16;
  std::uint64_t seed = 0;

  double leader_speed = 15.0;   // cruise speed, m/s
  double initial_gap = 0.0;     // bumper to bumper, m; <= 0 means IDM equilibrium
  bool randomize = true;        // draw cruise speed and profile details from seed
  std::size_t intent_lead = 5;  // frames of intent before the leader brakes
  double intent_response = 1.0; // m/s^2 the follower sheds while intent is shown
  double embedding_noise = 0.01;
  std::uint64_t projection_seed = 0;  // shared by every segment of a corpus
  std::string segment_id;             // empty: "synth-<seed>"

  std::size_t frame_count() const;
  void validate() const;
};

/// Generated segment plus the simulator's ground truth.
struct GeneratedSegment {
  Segment segment;
  std::vector<Vec3> internal_accel;  // ego, global frame; [0] is zero
  std::vector<bool> intent;          // leader brake intent per frame
  std::vector<double> gap;           // bumper-to-bumper distance per frame
};

/// Simulates one segment. The follower obeys IDM (minus intent_response
/// while the leader's intent flag is up), integrated with semi-implicit Euler:
/// v_t = v_{t-1} + a_t dt, x_t = x_{t-1} + v_t dt, speed clamped at 0. The
/// leader box is the only label. Embeddings are attached. Throws
/// GenerationError if the gap closes.
GeneratedSegment generate_segment(const ScenarioConfig& cfg);

/// (Re)computes camera embeddings for every frame. Front view: seeded random
/// projection of [gap, relative speed, leader speed, intent] through tanh,
/// plus N(0, embedding_noise). Other views: projections of lateral and
/// context variables without the intent flag.
void attach_embeddings(GeneratedSegment& generated, const ScenarioConfig& cfg);

std::string segment_id_for(std::uint64_t base_seed, std::size_t index);

/// `n` segments with per-segment seeds derived from base_seed; every segment
/// shares the base projection seed.
std::vector<GeneratedSegment> generate_segments(std::size_t n, std::uint64_t base_seed,
                                                ScenarioConfig cfg = {});

struct CorpusSplit {
  std::vector<Segment> train;
  std::vector<Segment> validation;
};

/// First round(n * ratio) segments train, the rest validate (each side keeps
/// at least one segment).
CorpusSplit split_corpus(std::vector<GeneratedSegment> segments, double ratio);

struct CorpusFiles {
  std::filesystem::path train;
  std::filesystem::path validation;
  std::filesystem::path manifest;
  std::size_t train_segments = 0;
  std::size_t validation_segments = 0;
};

/// Writes train.jsonl, val.jsonl and manifest.json into `dir`.
CorpusFiles generate_corpus(std::size_t n, double ratio, std::uint64_t base_seed,
                            const std::filesystem::path& dir, ScenarioConfig cfg = {});

/// Manifest JSON describing a corpus split.
std::string corpus_manifest(std::size_t n, double ratio, std::uint64_t base_seed,
                            const ScenarioConfig& cfg, const CorpusSplit& split);

}  // namespace driveclone::synthgen
