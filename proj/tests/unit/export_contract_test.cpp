#include <gtest/gtest.h>

#include <json.hpp>

#include "driveclone/datamodel.hpp"
#include "driveclone/io/tensor_file.hpp"
#include "driveclone/pipeline.hpp"

using namespace driveclone;

namespace {

const std::filesystem::path kDir = std::filesystem::path(DRIVECLONE_FIXTURE_DIR) / "export";

void check_export(const std::string& stem) {
  const std::string text = io::read_text_file(kDir / (stem + ".jsonl"));
  const auto manifest = nlohmann::json::parse(io::read_text_file(kDir / (stem + ".manifest.json")));
  const auto segments = parse_segments(text);

  ASSERT_EQ(segments.size(), manifest["segments"].size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    EXPECT_EQ(segments[i].id, manifest["segments"][i]["segment_id"]);
    EXPECT_EQ(segments[i].size(), manifest["segments"][i]["frames"]);
  }
  const std::size_t dim = manifest["embedding_dim"];
  const auto& views = manifest["views"];
  for (const auto& s : segments) {
    for (const auto& f : s.frames) {
      EXPECT_EQ(f.embeddings.size(), views.size());
      for (const auto& v : views) {
        EXPECT_EQ(f.embeddings.at(camera_view_from_string(v.get<std::string>())).size(), dim);
      }
    }
  }
  // The export is already canonical: re-serializing reproduces it byte for byte.
  EXPECT_EQ(serialize_segments(segments), text);
  EXPECT_EQ(serialize_segments(parse_segments(text)), serialize_segments(segments));
}

}  // namespace

TEST(ExportContract, FrontViewFixtureParses) { check_export("front_view"); }

TEST(ExportContract, NoViewFixtureHasNoEmbeddingsField) {
  check_export("no_views");
  EXPECT_EQ(io::read_text_file(kDir / "no_views.jsonl").find("embeddings"), std::string::npos);
}

TEST(ExportContract, FixtureFeedsThePipeline) {
  const auto segments = parse_segments(io::read_text_file(kDir / "front_view.jsonl"));
  const auto processed = pipeline::process_segment(segments[0], pipeline::PipelineConfig{});
  ASSERT_EQ(processed.size(), 3u);
  // The lead car at x ~ 15 m is picked up; the car behind, the pedestrian and
  // the sign are not.
  EXPECT_NEAR(processed.features[0][9], 15.2, 1e-12);
  EXPECT_EQ(processed.features[0][11], 1.0);
  EXPECT_EQ(processed.raw_accel[0], (Vec3{0, 0, 0}));
}
