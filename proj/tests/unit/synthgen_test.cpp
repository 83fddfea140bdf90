#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "driveclone/errors.hpp"
#include "driveclone/geometry.hpp"
#include "driveclone/io/tensor_file.hpp"
#include "driveclone/pipeline.hpp"
#include "driveclone/synthgen.hpp"
#include "oracles.hpp"
#include "scratch_dir.hpp"

using namespace driveclone;
using namespace driveclone::synthgen;

TEST(Idm, AccelerationMatchesFormula) {
  const IdmParams p;
  nn::Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.uniform(0, 25), gap = rng.uniform(1, 80), vl = rng.uniform(0, 25);
    EXPECT_NEAR(idm_acceleration(p, v, gap, vl),
                oracle::idm(v, gap, v - vl, p.desired_speed, p.time_headway, p.max_accel,
                            p.comfortable_decel, p.jam_distance),
                1e-12);
  }
}

TEST(Idm, EquilibriumGapMatchesBisection) {
  const IdmParams p;
  for (double v : {1.0, 5.0, 12.0, 18.0}) {
    EXPECT_NEAR(idm_equilibrium_gap(p, v),
                oracle::idm_equilibrium_by_bisection(v, p.desired_speed, p.time_headway,
                                                     p.max_accel, p.comfortable_decel,
                                                     p.jam_distance),
                1e-9);
  }
  EXPECT_THROW(idm_equilibrium_gap(p, 25.0), ConfigError);
}

TEST(Generator, ConstantLeaderAtEquilibriumStaysPut) {
  ScenarioConfig cfg;
  cfg.leader = LeaderProfile::constant;
  cfg.randomize = false;
  cfg.lateral_amplitude = 0.0;
  const auto g = generate_segment(cfg);
  for (const auto& a : g.internal_accel) EXPECT_LT(std::abs(a[0]), 1e-3);
}

TEST(Generator, TwentySecondsAtTenHertz) {
  EXPECT_EQ(generate_segment(ScenarioConfig{}).segment.size(), 200u);
}

TEST(Generator, DeterministicInSeed) {
  ScenarioConfig cfg;
  cfg.seed = 77;
  const auto a = generate_segment(cfg), b = generate_segment(cfg);
  EXPECT_EQ(a.segment, b.segment);
  cfg.seed = 78;
  EXPECT_NE(generate_segment(cfg).segment, a.segment);
}

TEST(Generator, AllProfilesValidateAndKeepPositiveGap) {
  for (auto profile : {LeaderProfile::constant, LeaderProfile::sinusoidal, LeaderProfile::random_brake}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      ScenarioConfig cfg;
      cfg.leader = profile;
      cfg.seed = seed;
      const auto g = generate_segment(cfg);
      EXPECT_NO_THROW(g.segment.validate());
      for (double gap : g.gap) ASSERT_GT(gap, 0.0);
    }
  }
}

TEST(Generator, CollisionRejected) {
  ScenarioConfig cfg;
  cfg.rate_hz = 1.0;
  cfg.idm.time_headway = 0.1;
  cfg.idm.jam_distance = 0.1;
  cfg.initial_gap = 0.5;
  cfg.intent_response = 0.0;
  cfg.seed = 46;
  EXPECT_THROW(generate_segment(cfg), GenerationError);
}

TEST(Generator, InvalidConfigRejected) {
  ScenarioConfig cfg;
  cfg.duration_s = 0.0;
  EXPECT_THROW(generate_segment(cfg), ConfigError);
  cfg = {};
  cfg.idm.time_headway = 0.0;
  EXPECT_THROW(generate_segment(cfg), ConfigError);
  EXPECT_THROW(leader_profile_from_string("zigzag"), ConfigError);
}

TEST(Generator, IntentPrecedesEveryBrakeByFiveFrames) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    const auto g = generate_segment(cfg);
    for (std::size_t i = 0; i + 5 < g.intent.size(); ++i) {
      const bool onset = g.intent[i] && (i == 0 || !g.intent[i - 1]);
      if (!onset) continue;
      const auto& lead_after = g.segment.frames[i + 5].labels.front();
      EXPECT_LT((*lead_after.accel_v)[0], -1.0) << "seed " << seed << " onset " << i;
    }
  }
}

TEST(Generator, LeaderDetectedInNearlyEveryFrame) {
  std::size_t frames = 0, found = 0;
  for (const auto& g : generate_segments(40, 3)) {
    for (const auto& f : g.segment.frames) {
      ++frames;
      if (auto hit = geometry::detect_front_vehicle(f, {1.0, 100.0}); hit && hit->obj_id == "leader") {
        ++found;
      }
    }
  }
  EXPECT_GE(static_cast<double>(found) / static_cast<double>(frames), 0.99);
}

TEST(Embeddings, ShapeOnEveryFrame) {
  ScenarioConfig cfg;
  cfg.embedding_dim = 16;
  const auto g = generate_segment(cfg);
  for (const auto& f : g.segment.frames) {
    ASSERT_EQ(f.embeddings.size(), 5u);
    for (const auto& [view, e] : f.embeddings) EXPECT_EQ(e.size(), 16u);
  }
}

TEST(Embeddings, IdenticalStatesGiveIdenticalVectorsWithoutNoise) {
  ScenarioConfig cfg;
  cfg.embedding_noise = 0.0;
  auto g = generate_segment(cfg);
  auto& frames = g.segment.frames;
  frames[7].pose = frames[3].pose;
  frames[7].ego_velocity_g = frames[3].ego_velocity_g;
  frames[7].labels = frames[3].labels;
  g.intent[7] = g.intent[3];
  g.gap[7] = g.gap[3];
  attach_embeddings(g, cfg);
  EXPECT_EQ(frames[7].embeddings, frames[3].embeddings);
}

namespace {

struct ProbeData {
  std::vector<std::vector<double>> embed_train, embed_test, feat_train, feat_test;
  std::vector<bool> y_train, y_test;
};

ProbeData probe_data() {
  ProbeData d;
  const auto segments = generate_segments(60, 12);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& g = segments[s];
    const auto processed = pipeline::process_segment(g.segment, pipeline::PipelineConfig{});
    const bool train = s < 45;
    for (std::size_t i = 0; i < g.segment.size(); ++i) {
      const auto& e = g.segment.frames[i].embeddings.at(CameraView::front);
      const auto& f = processed.features[i];
      (train ? d.embed_train : d.embed_test).push_back(e);
      (train ? d.feat_train : d.feat_test).emplace_back(f.begin(), f.end());
      (train ? d.y_train : d.y_test).push_back(g.intent[i]);
    }
  }
  return d;
}

}  // namespace

TEST(Embeddings, IntentRecoverableFromFrontViewOnly) {
  const auto d = probe_data();
  const double from_embeddings =
      oracle::ridge_probe_balanced_accuracy(d.embed_train, d.y_train, d.embed_test, d.y_test, 1e-3);
  const double from_features =
      oracle::ridge_probe_balanced_accuracy(d.feat_train, d.y_train, d.feat_test, d.y_test, 1e-3);
  EXPECT_GT(from_embeddings, 0.95);
  EXPECT_LE(from_features, 0.60);
}

TEST(Corpus, SplitsWholeSegmentsAtRatio) {
  const auto split = split_corpus(generate_segments(10, 7), 0.8);
  EXPECT_EQ(split.train.size(), 8u);
  EXPECT_EQ(split.validation.size(), 2u);
  for (const auto& t : split.train) {
    for (const auto& v : split.validation) EXPECT_NE(t.id, v.id);
  }
  EXPECT_THROW(split_corpus(generate_segments(1, 7), 0.8), ConfigError);
}

TEST(Corpus, FilesAreReproducibleAndParse) {
  driveclone::testing::ScratchDir a("corpus-a"), b("corpus-b");
  ScenarioConfig cfg;
  cfg.embedding_dim = 4;
  const auto fa = generate_corpus(10, 0.8, 7, a.path(), cfg);
  generate_corpus(10, 0.8, 7, b.path(), cfg);
  for (const char* name : {"train.jsonl", "val.jsonl", "manifest.json"}) {
    EXPECT_EQ(io::read_text_file(a / name), io::read_text_file(b / name)) << name;
  }
  EXPECT_EQ(fa.train_segments, 8u);
  std::ifstream train(fa.train), val(fa.validation);
  const auto ts = parse_segments(train);
  const auto vs = parse_segments(val);
  EXPECT_EQ(ts.size(), 8u);
  EXPECT_EQ(vs.size(), 2u);

  const auto manifest = nlohmann::json::parse(io::read_text_file(fa.manifest));
  EXPECT_EQ(manifest["base_seed"], 7);
  EXPECT_EQ(manifest["train"]["segment_ids"].size(), 8u);
  EXPECT_EQ(manifest["validation"]["segment_ids"][0], vs[0].id);
  EXPECT_EQ(manifest["config"]["embedding_dim"], 4);
}
