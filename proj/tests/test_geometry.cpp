#include <doctest.h>

#include <cmath>
#include <random>

#include "fallguard/geometry.hpp"
#include "fallguard/scene_synth.hpp"
#include "support/scenes.hpp"

using namespace fallguard;

namespace {

const CameraIntrinsics kK{500.0, 500.0, 320.0, 240.0, 640, 480};

Pose random_pose(std::mt19937& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Pose pose;
    pose.translation = {3 * unit(rng), 3 * unit(rng), 1.0 + std::abs(unit(rng))};
    Eigen::Quaterniond q(unit(rng), unit(rng), unit(rng), unit(rng));
    while (q.norm() < 1e-3) q = {unit(rng), unit(rng), unit(rng), unit(rng)};
    pose.orientation = q.normalized();
    return pose;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("back_project at the principal point follows the optical axis") {
    const CameraPoint p = back_project({kK.cx, kK.cy}, 1.5, kK);
    CHECK(p.x == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == doctest::Approx(1.5));
}

TEST_CASE("back_project hand-computed example") {
    const CameraPoint p = back_project({420.0, 240.0}, 2.0, kK);
    CHECK(p.x == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == doctest::Approx(2.0));
}

TEST_CASE("back_project rejects bad depth") {
    CHECK_THROWS_AS(back_project({320, 240}, 0.0, kK), InvalidDepthError);
    CHECK_THROWS_AS(back_project({320, 240}, -1.0, kK), InvalidDepthError);
    CHECK_THROWS_AS(back_project({320, 240}, std::nan(""), kK), InvalidDepthError);
    CHECK_THROWS_AS(back_project({320, 240}, INFINITY, kK), InvalidDepthError);
}

TEST_CASE("back_project is linear in depth") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> px(0.0, 639.0);
    std::uniform_real_distribution<double> py(0.0, 479.0);
    std::uniform_real_distribution<double> pz(0.1, 8.0);
    for (int i = 0; i < 200; ++i) {
        const PixelPoint p{px(rng), py(rng)};
        const double z = pz(rng);
        const CameraPoint a = back_project(p, z, kK);
        const CameraPoint b = back_project(p, 2 * z, kK);
        CHECK(b.x == doctest::Approx(2 * a.x).epsilon(1e-12));
        CHECK(b.y == doctest::Approx(2 * a.y).epsilon(1e-12));
        CHECK(b.z == doctest::Approx(2 * a.z).epsilon(1e-12));
    }
}

TEST_CASE("project maps the optical axis to the principal point") {
    const PixelPoint p = project({0, 0, 1.0}, kK);
    CHECK(p.x == doctest::Approx(kK.cx));
    CHECK(p.y == doctest::Approx(kK.cy));
}

TEST_CASE("project inverts the back_project example") {
    const PixelPoint p = project({0.4, 0.0, 2.0}, kK);
    CHECK(p.x == doctest::Approx(420.0).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(240.0).epsilon(1e-12));
}

TEST_CASE("project rejects points behind the camera") {
    CHECK_THROWS_AS(project({1, 1, -1}, kK), BehindCameraError);
    CHECK_THROWS_AS(project({0, 0, 0}, kK), BehindCameraError);
}

TEST_CASE("project/back_project round trip stays under 1e-9 px") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> px(0.0, 639.0);
    std::uniform_real_distribution<double> py(0.0, 479.0);
    std::uniform_real_distribution<double> pz(0.05, 10.0);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const PixelPoint p{px(rng), py(rng)};
        const PixelPoint q = project(back_project(p, pz(rng), kK), kK);
        worst = std::max({worst, std::abs(q.x - p.x), std::abs(q.y - p.y)});
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("camera_to_world with identity pose is a no-op") {
    const WorldPoint w = camera_to_world({0.3, -0.2, 1.7}, Pose{});
    CHECK(w.x == doctest::Approx(0.3));
    CHECK(w.y == doctest::Approx(-0.2));
    CHECK(w.z == doctest::Approx(1.7));
}

TEST_CASE("camera_to_world pure translation") {
    Pose pose;
    pose.translation = {1, 2, 0};
    const WorldPoint w = camera_to_world({0, 0, 2}, pose);
    CHECK(w.x == doctest::Approx(1.0));
    CHECK(w.y == doctest::Approx(2.0));
    CHECK(w.z == doctest::Approx(2.0));
}

TEST_CASE("world_to_camera inverts camera_to_world") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unit(-4.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        const Pose pose = random_pose(rng);
        const CameraPoint q{unit(rng), unit(rng), unit(rng)};
        const CameraPoint back = world_to_camera(camera_to_world(q, pose), pose);
        CHECK(back.x == doctest::Approx(q.x).epsilon(1e-12));
        CHECK(back.y == doctest::Approx(q.y).epsilon(1e-12));
        CHECK(back.z == doctest::Approx(q.z).epsilon(1e-12));
    }
}

TEST_CASE("camera_to_world preserves pairwise distances") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unit(-4.0, 4.0);
    double worst = 0;
    for (int i = 0; i < 2000; ++i) {
        const Pose pose = random_pose(rng);
        const CameraPoint a{unit(rng), unit(rng), unit(rng)};
        const CameraPoint b{unit(rng), unit(rng), unit(rng)};
        const double before = (a.vec() - b.vec()).norm();
        const double after =
            (camera_to_world(a, pose).vec() - camera_to_world(b, pose).vec()).norm();
        worst = std::max(worst, std::abs(after - before));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("ray_ground_intersect looking straight down hits the camera footprint") {
    const Pose pose = make_camera_pose({0, 0, 1}, 0.0, test_support::deg(90));
    const WorldPoint w = ray_ground_intersect({kK.cx, kK.cy}, kK, pose);
    CHECK(w.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(w.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(w.z) < 1e-9);
}

TEST_CASE("ray_ground_intersect at 45 degrees lands one height unit ahead") {
    const Pose pose = make_camera_pose({0, 0, 1}, 0.0, test_support::deg(45));
    const WorldPoint w = ray_ground_intersect({kK.cx, kK.cy}, kK, pose);
    CHECK(w.x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(w.z) < 1e-9);
}

TEST_CASE("ray_ground_intersect rejects rays that miss the floor") {
    const Pose level = make_camera_pose({0, 0, 1}, 0.0, 0.0);
    CHECK_THROWS_AS(ray_ground_intersect({kK.cx, kK.cy}, kK, level), NoIntersectionError);

    const Pose upward = make_camera_pose({0, 0, 1}, 0.0, test_support::deg(-20));
    CHECK_THROWS_AS(ray_ground_intersect({kK.cx, kK.cy}, kK, upward), NoIntersectionError);

    Pose below = make_camera_pose({0, 0, -0.5}, 0.0, test_support::deg(45));
    CHECK_THROWS_AS(ray_ground_intersect({kK.cx, kK.cy}, kK, below), NoIntersectionError);
}

TEST_CASE("ray_ground_intersect results sit on the floor and on the pixel ray") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> px(0.0, 639.0);
    std::uniform_real_distribution<double> py(260.0, 479.0);  // lower half looks down
    std::uniform_real_distribution<double> pitch(15.0, 80.0);
    std::uniform_real_distribution<double> yaw(-180.0, 180.0);
    std::uniform_real_distribution<double> height(0.4, 2.0);

    double worst_z = 0;
    double worst_collinearity = 0;
    for (int i = 0; i < 2000; ++i) {
        const Pose pose = make_camera_pose({0, 0, height(rng)}, test_support::deg(yaw(rng)),
                                           test_support::deg(pitch(rng)));
        const PixelPoint p{px(rng), py(rng)};
        WorldPoint w{};
        try {
            w = ray_ground_intersect(p, kK, pose);
        } catch (const NoIntersectionError&) {
            continue;  // grazing pixels may legitimately miss
        }
        worst_z = std::max(worst_z, std::abs(w.z));

        const Eigen::Vector3d dir =
            pose.orientation * Eigen::Vector3d((p.x - kK.cx) / kK.fx, (p.y - kK.cy) / kK.fy, 1.0);
        const Eigen::Vector3d to_hit = w.vec() - pose.translation;
        worst_collinearity = std::max(
            worst_collinearity,
            to_hit.normalized().cross(dir.normalized()).norm());
    }
    CHECK(worst_z < 1e-9);
    CHECK(worst_collinearity < 1e-9);
}

TEST_CASE("intrinsics validation") {
    CHECK_NOTHROW(validate(kK));
    CHECK_THROWS_AS(validate(CameraIntrinsics{0, 500, 320, 240, 640, 480}), ConfigError);
    CHECK_THROWS_AS(validate(CameraIntrinsics{500, 500, 700, 240, 640, 480}), ConfigError);
    CHECK_THROWS_AS(validate(CameraIntrinsics{500, 500, 320, -1, 640, 480}), ConfigError);
    CHECK_THROWS_AS(validate(CameraIntrinsics{500, 500, 320, 240, 0, 480}), ConfigError);
}

TEST_CASE("pose validation rejects non-unit quaternions") {
    Pose pose;
    CHECK_NOTHROW(validate(pose));
    pose.orientation = Eigen::Quaterniond(1.0, 0.1, 0.0, 0.0);  // not normalized
    CHECK_THROWS_AS(validate(pose), ConfigError);
}

}  // TEST_SUITE
