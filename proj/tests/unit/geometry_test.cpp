#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "driveclone/errors.hpp"
#include "driveclone/geometry.hpp"
#include "oracles.hpp"

using namespace driveclone;
using namespace driveclone::geometry;

namespace {

TrackedObject box(const std::string& id, double x, double y, double heading = 0.0,
                  ObjectType type = ObjectType::vehicle) {
  TrackedObject o;
  o.obj_id = id;
  o.obj_type = type;
  o.center_v = {x, y, 0.0};
  o.dims = {4.0, 2.0, 1.5};
  o.heading = heading;
  return o;
}

Frame scene(std::vector<TrackedObject> labels) {
  Frame f;
  f.segment_id = "g";
  f.labels = std::move(labels);
  return f;
}

void expect_near(const Vec3& a, const Vec3& b, double tol) {
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], tol) << "component " << i;
}

}  // namespace

TEST(Transform, IdentityLeavesPointAlone) {
  expect_near(to_global({1, 2, 3}, Pose::identity()), {1, 2, 3}, 0.0);
  expect_near(to_vehicle({1, 2, 3}, Pose::identity()), {1, 2, 3}, 0.0);
}

TEST(Transform, PureTranslation) {
  expect_near(to_global({1, 0, 0}, Pose::from_yaw(0.0, {5, -2, 0})), {6, -2, 0}, 0.0);
}

TEST(Transform, YawNinetyMatchesIndependentProduct) {
  const Pose p = Pose::from_yaw(std::numbers::pi / 2, {0, 0, 0});
  expect_near(to_global({1, 0, 0}, p), {0, 1, 0}, 1e-12);
  expect_near(to_global({1, 0, 0}, p), oracle::row_vector_product(p.m, {1, 0, 0}), 1e-12);
}

TEST(Transform, TranslationMapsToOrigin) {
  nn::Rng rng(3);
  const Pose p = oracle::random_pose(rng);
  expect_near(to_vehicle(p.translation(), p), {0, 0, 0}, 1e-12);
}

TEST(Transform, RandomPosesAgreeWithOracleAndInvert) {
  nn::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Pose pose = oracle::random_pose(rng);
    ASSERT_NO_THROW(pose.validate());
    const Vec3 p{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-5, 5)};
    expect_near(to_global(p, pose), oracle::row_vector_product(pose.m, p), 1e-9);
    expect_near(to_vehicle(to_global(p, pose), pose), p, 1e-9);
  }
}

TEST(Transform, DirectionsIgnoreTranslation) {
  const Pose p = Pose::from_yaw(std::numbers::pi / 2, {100, 200, 0});
  expect_near(rotate_to_global({1, 0, 0}, p), {0, 1, 0}, 1e-12);
  expect_near(rotate_to_vehicle(rotate_to_global({3, -1, 2}, p), p), {3, -1, 2}, 1e-12);
}

TEST(Detection, BoxStraddlingRay) {
  const auto hit = detect_front_vehicle(scene({box("a", 10, 0)}), {0.0, 100.0});
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->obj_id, "a");
  EXPECT_DOUBLE_EQ(hit->dx, 10.0);
  EXPECT_DOUBLE_EQ(hit->dy, 0.0);
}

TEST(Detection, ToleranceReachesOffsetBox) {
  const Frame f = scene({box("a", 10, 1.8)});
  EXPECT_FALSE(detect_front_vehicle(f, {0.0, 100.0}));
  EXPECT_TRUE(detect_front_vehicle(f, {1.0, 100.0}));
  // The sampling oracle agrees on both tolerances.
  EXPECT_FALSE(oracle::sample_corridor({10, 1.8, 4, 2, 0}, 0.0, 100.0).hit);
  EXPECT_TRUE(oracle::sample_corridor({10, 1.8, 4, 2, 0}, 1.0, 100.0).hit);
}

TEST(Detection, NearestAheadWins) {
  const Frame f = scene({box("far", 10, 0), box("near", 6, 0)});
  EXPECT_EQ(detect_front_vehicle(f, {1.0, 100.0})->obj_id, "near");
  EXPECT_EQ(count_corridor_vehicles(f, {1.0, 100.0}), 2u);
}

TEST(Detection, ExactTieBrokenByObjectId) {
  const Frame f = scene({box("b", 8, 0.2), box("a", 8, -0.2)});
  EXPECT_EQ(detect_front_vehicle(f, {1.0, 100.0})->obj_id, "a");
}

TEST(Detection, EmptySceneAndNonVehicles) {
  EXPECT_FALSE(detect_front_vehicle(scene({}), {1.0, 100.0}));
  EXPECT_EQ(count_corridor_vehicles(scene({}), {1.0, 100.0}), 0u);
  const Frame f = scene({box("p", 5, 0, 0, ObjectType::pedestrian), box("s", 7, 0, 0, ObjectType::sign)});
  EXPECT_FALSE(detect_front_vehicle(f, {1.0, 100.0}));
  EXPECT_EQ(count_corridor_vehicles(f, {1.0, 100.0}), 0u);
}

TEST(Detection, BoxBeyondRangeIgnored) {
  EXPECT_FALSE(detect_front_vehicle(scene({box("a", 110, 0)}), {1.0, 100.0}));
  EXPECT_TRUE(detect_front_vehicle(scene({box("a", 101, 0)}), {1.0, 100.0}));
}

TEST(Detection, RotatedBoxReachesCorridorByItsCorner) {
  // A box at y = 2.9 rotated 45 degrees: its corner dips to 2.9 - 3/sqrt(2) ~ 0.78.
  TrackedObject o = box("a", 20, 2.9, std::numbers::pi / 4);
  EXPECT_TRUE(detect_front_vehicle(scene({o}), {1.0, 100.0}));
  EXPECT_FALSE(detect_front_vehicle(scene({o}), {0.5, 100.0}));
}

TEST(Detection, KinematicsRotatedToGlobal) {
  Frame f = scene({box("a", 10, 0)});
  f.pose = Pose::from_yaw(std::numbers::pi / 2, {50, 50, 0});
  f.labels[0].velocity_v = {7, 0, 0};
  f.labels[0].accel_v = Vec3{1, 0, 0};
  const auto hit = detect_front_vehicle(f, {1.0, 100.0});
  ASSERT_TRUE(hit);
  expect_near(hit->velocity_g, {0, 7, 0}, 1e-12);
  expect_near(hit->accel_g, {0, 1, 0}, 1e-12);
  EXPECT_DOUBLE_EQ(hit->dx, 10.0);
}

TEST(Detection, CountMatchesSamplingOracleOnRandomScenes) {
  nn::Rng rng(5);
  int checked = 0;
  for (int s = 0; s < 50; ++s) {
    std::vector<TrackedObject> labels;
    std::size_t expected = 0;
    bool ambiguous = false;
    for (int k = 0; k < 4; ++k) {
      TrackedObject o = box("v" + std::to_string(k), rng.uniform(-5, 60), rng.uniform(-6, 6),
                            rng.uniform(-3.1, 3.1));
      o.dims = {rng.uniform(3, 6), rng.uniform(1.5, 2.5), 1.5};
      const auto d = oracle::sample_corridor(
          {o.center_v[0], o.center_v[1], o.dims[0], o.dims[1], o.heading}, 1.0, 100.0);
      ambiguous = ambiguous || d.in_band();
      expected += d.hit;
      labels.push_back(o);
    }
    if (ambiguous) continue;
    ++checked;
    EXPECT_EQ(count_corridor_vehicles(scene(labels), {1.0, 100.0}), expected) << "scene " << s;
  }
  EXPECT_GT(checked, 40);
}

TEST(Detection, FrontVehicleIsAmongCounted) {
  nn::Rng rng(8);
  for (int s = 0; s < 200; ++s) {
    std::vector<TrackedObject> labels;
    for (int k = 0; k < 5; ++k) {
      labels.push_back(box("v" + std::to_string(k), rng.uniform(-10, 80), rng.uniform(-5, 5),
                           rng.uniform(-3.1, 3.1)));
    }
    const Frame f = scene(labels);
    const DetectionConfig cfg{rng.uniform(0, 2), 100.0};
    if (auto hit = detect_front_vehicle(f, cfg)) {
      EXPECT_GE(count_corridor_vehicles(f, cfg), 1u);
      EXPECT_GT(hit->dx, 0.0);
    }
  }
}

TEST(Detection, InvalidConfigRejected) {
  EXPECT_THROW((DetectionConfig{-1.0, 100.0}.validate()), Error);
  EXPECT_THROW((DetectionConfig{1.0, 0.0}.validate()), Error);
}
