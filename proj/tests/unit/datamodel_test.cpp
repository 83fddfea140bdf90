#include <gtest/gtest.h>

#include <sstream>

#include "driveclone/datamodel.hpp"
#include "driveclone/errors.hpp"
#include "driveclone/synthgen.hpp"

using namespace driveclone;

namespace {

std::string frame_line(const std::string& seg, int t, const std::string& labels = "[]") {
  std::ostringstream s;
  s << R"({"segment_id":")" << seg << R"(","t_index":)" << t << R"(,"timestamp_s":)" << 0.1 * t
    << R"(,"pose":[1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1],"ego_velocity_g":[5,0,0],"labels":)"
    << labels << "}\n";
  return s.str();
}

const char* kCar =
    R"([{"obj_id":"a","obj_type":"vehicle","center_v":[10,0,0],"dims":[4,2,1.5],"heading":0,"velocity_v":[0,0,0]}])";

}  // namespace

TEST(ParseSegments, GroupsTwoFramesIntoOneSegment) {
  const auto segs = parse_segments(frame_line("s0", 0) + frame_line("s0", 1));
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].id, "s0");
  EXPECT_EQ(segs[0].size(), 2u);
}

TEST(ParseSegments, SortsByIndexAndKeepsFirstAppearanceOrder) {
  const auto segs =
      parse_segments(frame_line("b", 1) + frame_line("a", 0) + frame_line("b", 0));
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].id, "b");
  EXPECT_EQ(segs[0].frames[0].t_index, 0);
  EXPECT_EQ(segs[0].frames[1].t_index, 1);
}

TEST(ParseSegments, ZeroDimensionIsRejected) {
  std::string labels = kCar;
  labels.replace(labels.find("[4,2,1.5]"), 9, "[0,2,1.5]");
  try {
    parse_segments(frame_line("s0", 0, labels));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("dims must be > 0"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("s0"), std::string::npos) << e.what();
  }
}

TEST(ParseSegments, MalformedLineReportsLineNumber) {
  try {
    parse_segments(frame_line("s0", 0) + "{not json\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseSegments, UnknownObjectTypeIsRejected) {
  std::string labels = kCar;
  labels.replace(labels.find("vehicle"), 7, "truck");
  EXPECT_THROW(parse_segments(frame_line("s0", 0, labels)), Error);
}

TEST(ParseSegments, GapInIndicesIsRejected) {
  EXPECT_THROW(parse_segments(frame_line("s0", 0) + frame_line("s0", 2)), ValidationError);
}

TEST(ParseSegments, IrregularTimestepIsRejected) {
  std::string text = frame_line("s0", 0) + frame_line("s0", 1) + frame_line("s0", 2);
  text.replace(text.rfind("0.2"), 3, "0.35");
  EXPECT_THROW(parse_segments(text), ValidationError);
}

TEST(ParseSegments, NonRotationPoseIsRejected) {
  std::string text = frame_line("s0", 0);
  text.replace(text.find("[1,0,0,0"), 8, "[2,0,0,0");
  EXPECT_THROW(parse_segments(text), ValidationError);
}

TEST(ParseSegments, InconsistentEmbeddingWidthIsRejected) {
  std::string a = frame_line("s0", 0), b = frame_line("s0", 1);
  a.insert(a.size() - 2, R"(,"embeddings":{"front":[1,2,3]})");
  b.insert(b.size() - 2, R"(,"embeddings":{"front":[1,2]})");
  EXPECT_THROW(parse_segments(a + b), ValidationError);
}

TEST(SerializeSegments, EmptyInputGivesEmptyOutput) {
  EXPECT_EQ(serialize_segments(std::span<const Segment>{}), "");
}

TEST(SerializeSegments, FrameWithoutLabelsHasEmptyArray) {
  const auto segs = parse_segments(frame_line("s0", 0));
  const std::string text = serialize_segments(segs);
  EXPECT_NE(text.find(R"("labels":[])"), std::string::npos) << text;
  EXPECT_EQ(text.find("embeddings"), std::string::npos) << text;
  EXPECT_EQ(text.back(), '\n');
}

TEST(SerializeSegments, CanonicalFieldOrder) {
  const auto segs = parse_segments(frame_line("s0", 0, kCar));
  const std::string text = serialize_segments(segs);
  const char* order[] = {"segment_id", "t_index", "timestamp_s", "pose", "ego_velocity_g", "labels",
                         "obj_id", "obj_type", "center_v", "dims", "heading", "velocity_v"};
  std::size_t pos = 0;
  for (const char* key : order) {
    const auto at = text.find(std::string("\"") + key + "\"", pos);
    ASSERT_NE(at, std::string::npos) << key;
    pos = at;
  }
}

TEST(SerializeSegments, GeneratedSegmentRoundTripsBitIdentically) {
  synthgen::ScenarioConfig cfg;
  cfg.seed = 42;
  const auto gen = synthgen::generate_segment(cfg);
  ASSERT_EQ(gen.segment.size(), 200u);
  const std::vector<Segment> one{gen.segment};
  const std::string text = serialize_segments(one);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 200);
  const auto back = parse_segments(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], gen.segment);
  EXPECT_EQ(serialize_segments(back), text);
}

TEST(SerializeSegments, RoundTripHoldsAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    synthgen::ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.embedding_dim = 3;
    const std::vector<Segment> one{synthgen::generate_segment(cfg).segment};
    EXPECT_EQ(parse_segments(serialize_segments(one)), one) << "seed " << seed;
  }
}

TEST(Pose, YawConstructorIsProperRotation) {
  const Pose p = Pose::from_yaw(0.7, {1, 2, 3});
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.translation(), (Vec3{1, 2, 3}));
}

TEST(CameraView, FiveNamedViews) {
  EXPECT_EQ(kAllCameraViews.size(), 5u);
  for (CameraView v : kAllCameraViews) EXPECT_EQ(camera_view_from_string(to_string(v)), v);
  EXPECT_THROW(camera_view_from_string("rear"), Error);
}

TEST(ObjectType, FiveCategoriesRoundTrip) {
  for (auto t : {ObjectType::vehicle, ObjectType::pedestrian, ObjectType::cyclist,
                 ObjectType::sign, ObjectType::unknown}) {
    EXPECT_EQ(object_type_from_string(to_string(t)), t);
  }
}
