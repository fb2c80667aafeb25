#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "fallguard/pointcloud.hpp"
#include "fallguard/scene_synth.hpp"
#include "support/scenes.hpp"

using namespace fallguard;
using test_support::deg;

namespace {

const CameraIntrinsics kSmallK{260.0, 260.0, 159.5, 119.5, 320, 240};

Eigen::Vector3d up_in_camera(const Pose& pose) {
    return pose.orientation.conjugate() * Eigen::Vector3d::UnitZ();
}

double angle_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double c = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace

TEST_SUITE("pointcloud") {

TEST_CASE("depth_to_cloud on an all-invalid image yields an empty cloud") {
    const DepthImage depth = DepthImage::invalid_filled(320, 240);
    const OrganizedCloud cloud = depth_to_cloud(depth, kSmallK);
    CHECK(cloud.valid_count == 0);
    CHECK(cloud.width == 320);
}

TEST_CASE("depth_to_cloud rejects dimension mismatches") {
    const DepthImage depth = DepthImage::invalid_filled(100, 100);
    CHECK_THROWS_AS(depth_to_cloud(depth, kSmallK), ConfigError);
}

TEST_CASE("depth_to_cloud back-projects every valid pixel in place") {
    DepthImage depth = DepthImage::invalid_filled(64, 48);
    for (int v = 0; v < 48; ++v)
        for (int u = 0; u < 64; ++u)
            if ((u + v) % 3 != 0) depth.at(u, v) = 2.0f;
    const CameraIntrinsics k{100.0, 100.0, 31.5, 23.5, 64, 48};
    const OrganizedCloud cloud = depth_to_cloud(depth, k);

    for (int v = 0; v < 48; ++v)
        for (int u = 0; u < 64; ++u) {
            const int idx = cloud.index(u, v);
            CHECK(cloud.has(idx) == depth.valid_at(u, v));
            if (!cloud.has(idx)) continue;
            const CameraPoint expect = back_project({double(u), double(v)}, 2.0f, k);
            CHECK(cloud.at(idx).x == doctest::Approx(expect.x).epsilon(1e-12));
            CHECK(cloud.at(idx).z == doctest::Approx(2.0).epsilon(1e-6));
        }
}

TEST_CASE("fit_floor_plane nails an exact plane") {
    // Tilted plane in camera coordinates, no noise.
    const Eigen::Vector3d n = Eigen::Vector3d(0.1, -0.6, -0.79).normalized();
    const double d = 1.4;
    const OrganizedCloud cloud = test_support::make_cloud(40, 30, [&](int u, int v) {
        // Solve n.p + d = 0 along the pixel ray.
        const Eigen::Vector3d dir((u - 19.5) / 40.0, (v - 14.5) / 40.0, 1.0);
        const double denom = n.dot(dir);
        if (std::abs(denom) < 1e-6) return std::optional<CameraPoint>{};
        const double t = -d / denom;
        if (t <= 0) return std::optional<CameraPoint>{};
        return std::optional<CameraPoint>{CameraPoint::from(t * dir)};
    });
    REQUIRE(cloud.valid_count > 500);

    const PlaneModel plane = fit_floor_plane(cloud, RansacParams{}, 5);
    CHECK(plane.inlier_indices.size() == cloud.valid_count);
    double worst = 0;
    for (int idx : plane.inlier_indices)
        worst = std::max(worst, std::abs(plane.signed_distance(cloud.at(idx))));
    CHECK(worst < 1e-9);
}

TEST_CASE("fit_floor_plane needs at least three points") {
    OrganizedCloud cloud = test_support::make_cloud(2, 1, [&](int u, int) {
        return std::optional<CameraPoint>{CameraPoint{double(u), 0.0, 1.0}};
    });
    CHECK_THROWS_AS(fit_floor_plane(cloud, RansacParams{}, 1), NoFloorFoundError);
}

TEST_CASE("fit_floor_plane recovers a noisy tilted floor within tolerance") {
    SceneSpec spec = test_support::looking_down_scene(30);
    spec.depth_noise_sigma = 0.005;
    const RenderResult rendered = render(spec, 17);
    const OrganizedCloud cloud = depth_to_cloud(rendered.bundle.depth, spec.intrinsics);

    const PlaneModel plane =
        fit_floor_plane(cloud, RansacParams{}, 23, up_in_camera(spec.camera_pose));
    CHECK(angle_deg(plane.normal, rendered.truth.floor_normal_cam) < 1.0);
    CHECK(std::abs(plane.offset - rendered.truth.floor_offset_cam) < 0.01);
}

TEST_CASE("fit_floor_plane is deterministic for a fixed seed") {
    SceneSpec spec = test_support::looking_down_scene(25);
    spec.depth_noise_sigma = 0.005;
    const RenderResult rendered = render(spec, 3);
    const OrganizedCloud cloud = depth_to_cloud(rendered.bundle.depth, spec.intrinsics);

    const PlaneModel a = fit_floor_plane(cloud, RansacParams{}, 77);
    const PlaneModel b = fit_floor_plane(cloud, RansacParams{}, 77);
    CHECK(a.normal == b.normal);
    CHECK(a.offset == b.offset);
    CHECK(a.inlier_indices == b.inlier_indices);
}

TEST_CASE("fit_floor_plane refuses planes that look like walls") {
    // Fronto-parallel wall: normal along the optical axis, 90 degrees away
    // from any sensible up direction.
    const OrganizedCloud wall = test_support::make_cloud(40, 30, [&](int u, int v) {
        return std::optional<CameraPoint>{
            CameraPoint{(u - 19.5) / 10.0, (v - 14.5) / 10.0, 2.0}};
    });
    const Eigen::Vector3d up(0, -1, 0);  // camera level with the horizon
    CHECK_THROWS_AS(fit_floor_plane(wall, RansacParams{}, 9, up), NoFloorFoundError);
    CHECK_NOTHROW(fit_floor_plane(wall, RansacParams{}, 9));  // no hint, no tilt check
}

TEST_CASE("remove_plane empties a pure plane cloud and conserves counts") {
    SceneSpec spec = test_support::looking_down_scene(35);
    const RenderResult rendered = render(spec, 4);
    const OrganizedCloud cloud = depth_to_cloud(rendered.bundle.depth, spec.intrinsics);
    const PlaneModel plane = fit_floor_plane(cloud, RansacParams{}, 5);

    const double tol = RansacParams{}.inlier_tol;
    const OrganizedCloud rest = remove_plane(cloud, plane, tol);
    CHECK(rest.valid_count == 0);

    std::size_t within = 0;
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        if (cloud.valid[i] && std::abs(plane.signed_distance(cloud.points[i])) <= tol)
            ++within;
    CHECK(rest.valid_count + within == cloud.valid_count);
}

TEST_CASE("remove_plane keeps exactly the obstacle") {
    SceneSpec spec = test_support::looking_down_scene(35);
    spec.objects.push_back(
        test_support::box("crate", {1.8, 0.0, 0.125}, {0.3, 0.3, 0.25}));
    const RenderResult rendered = render(spec, 8);
    const OrganizedCloud cloud = depth_to_cloud(rendered.bundle.depth, spec.intrinsics);
    const PlaneModel plane = fit_floor_plane(cloud, RansacParams{}, 6);
    const OrganizedCloud rest = remove_plane(cloud, plane, RansacParams{}.inlier_tol);

    const MaskImage& truth_mask = rendered.truth.objects[0].mask;
    REQUIRE(rest.valid_count > 0);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < rest.points.size(); ++i)
        if (rest.valid[i] && truth_mask.on[i]) ++inside;
    CHECK(inside == rest.valid_count);  // nothing but the crate survives
    CHECK(double(rest.valid_count) > 0.7 * truth_mask.count());
}

TEST_CASE("remove_plane with zero tolerance leaves a noisy plane standing") {
    // The removal tolerance has to exceed the sensor noise to do anything.
    SceneSpec spec = test_support::looking_down_scene(35);
    spec.depth_noise_sigma = 0.005;
    const RenderResult rendered = render(spec, 13);
    const OrganizedCloud cloud = depth_to_cloud(rendered.bundle.depth, spec.intrinsics);
    const PlaneModel plane = fit_floor_plane(cloud, RansacParams{}, 5);

    const OrganizedCloud rest = remove_plane(cloud, plane, 0.0);
    CHECK(double(rest.valid_count) > 0.9 * double(cloud.valid_count));
}

TEST_CASE("region_grow separates two crates half a meter apart") {
    SceneSpec spec = test_support::looking_down_scene(35);
    spec.objects.push_back(test_support::box("a", {1.8, -0.35, 0.1}, {0.2, 0.2, 0.2}));
    spec.objects.push_back(test_support::box("b", {1.8, 0.35, 0.1}, {0.2, 0.2, 0.2}));
    const RenderResult rendered = render(spec, 12);
    const OrganizedCloud cloud = depth_to_cloud(rendered.bundle.depth, spec.intrinsics);
    const PlaneModel plane = fit_floor_plane(cloud, RansacParams{}, 6);
    const OrganizedCloud rest = remove_plane(cloud, plane, RansacParams{}.inlier_tol);

    const auto segments = region_grow(rest, RegionGrowParams{0.05, 50});
    CHECK(segments.size() == 2);
}

TEST_CASE("region_grow on an empty cloud returns nothing") {
    const OrganizedCloud cloud =
        test_support::make_cloud(8, 8, [](int, int) { return std::optional<CameraPoint>{}; });
    CHECK(region_grow(cloud, RegionGrowParams{}).empty());
}

TEST_CASE("region_grow segment matches the renderer mask") {
    SceneSpec spec = test_support::looking_down_scene(35);
    spec.objects.push_back(
        test_support::box("crate", {1.7, 0.1, 0.11}, {0.28, 0.22, 0.22}));
    spec.depth_noise_sigma = 0.003;
    const RenderResult rendered = render(spec, 21);
    const OrganizedCloud cloud = depth_to_cloud(rendered.bundle.depth, spec.intrinsics);
    const PlaneModel plane = fit_floor_plane(cloud, RansacParams{}, 6);
    const OrganizedCloud rest = remove_plane(cloud, plane, RansacParams{}.inlier_tol);

    const auto segments = region_grow(rest, RegionGrowParams{0.05, 50});
    REQUIRE(segments.size() == 1);

    const MaskImage mask = segment_mask(segments[0], cloud.width, cloud.height);
    const MaskImage& truth_mask = rendered.truth.objects[0].mask;
    // Symmetric difference within 10% of the truth mask.
    int sym_diff = 0;
    for (std::size_t i = 0; i < mask.on.size(); ++i)
        sym_diff += (mask.on[i] != 0) != (truth_mask.on[i] != 0);
    CHECK(double(sym_diff) <= 0.1 * truth_mask.count());

    // Centroid within 2 cm of the truth centroid, compared in world frame.
    const WorldPoint got = camera_to_world(segments[0].centroid, spec.camera_pose);
    CHECK((got.vec() - rendered.truth.objects[0].centroid.vec()).norm() < 0.02);
}

TEST_CASE("region_grow segments are disjoint, big enough and connected") {
    SceneSpec spec = test_support::looking_down_scene(30);
    spec.objects.push_back(test_support::box("a", {1.6, -0.4, 0.1}, {0.2, 0.2, 0.2}));
    spec.objects.push_back(test_support::box("b", {1.9, 0.3, 0.15}, {0.25, 0.2, 0.3}));
    spec.objects.push_back(test_support::cylinder("c", {2.4, -0.1, 0.12}, 0.1, 0.24));
    spec.depth_noise_sigma = 0.004;
    spec.invalid_pixel_fraction = 0.01;
    const RenderResult rendered = render(spec, 31);
    const OrganizedCloud cloud = depth_to_cloud(rendered.bundle.depth, spec.intrinsics);
    const PlaneModel plane = fit_floor_plane(cloud, RansacParams{}, 6);
    const OrganizedCloud rest = remove_plane(cloud, plane, RansacParams{}.inlier_tol);

    const RegionGrowParams params{0.05, 50};
    const auto segments = region_grow(rest, params);
    REQUIRE(!segments.empty());

    std::set<int> seen;
    for (const auto& seg : segments) {
        CHECK(int(seg.indices.size()) >= params.min_segment_size);
        for (int idx : seg.indices) {
            CHECK(rest.has(idx));
            CHECK(!seen.count(idx));  // pairwise disjoint
            seen.insert(idx);
        }
        // Connectivity witness: every member has another member within the gate.
        for (int idx : seg.indices) {
            if (seg.indices.size() == 1) break;
            double nearest = 1e9;
            for (int other : seg.indices) {
                if (other == idx) continue;
                nearest = std::min(nearest,
                                   (rest.at(idx).vec() - rest.at(other).vec()).norm());
            }
            CHECK(nearest <= params.max_neighbor_dist);
        }
    }
}

TEST_CASE("segment_mask round trips and counts members") {
    ObstacleSegment seg;
    seg.indices = {3, 17, 18, 40};
    const MaskImage mask = segment_mask(seg, 10, 5);
    CHECK(mask.count() == 4);
    std::vector<int> back;
    for (int i = 0; i < 50; ++i)
        if (mask.on[std::size_t(i)]) back.push_back(i);
    CHECK(back == seg.indices);
    CHECK(segment_mask(ObstacleSegment{back, {}}, 10, 5).on == mask.on);
}

TEST_CASE("segment_centroid basics") {
    const OrganizedCloud cloud = test_support::make_cloud(4, 1, [](int u, int) {
        return std::optional<CameraPoint>{CameraPoint{double(u), 2.0 * u, 1.0}};
    });
    CHECK(segment_centroid(ObstacleSegment{{1}, {}}, cloud).x == doctest::Approx(1.0));
    const CameraPoint mid = segment_centroid(ObstacleSegment{{1, 3}, {}}, cloud);
    CHECK(mid.x == doctest::Approx(2.0));
    CHECK(mid.y == doctest::Approx(4.0));
    CHECK_THROWS_AS(segment_centroid(ObstacleSegment{}, cloud), std::invalid_argument);
}

}  // TEST_SUITE
