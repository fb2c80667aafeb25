#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fallguard/cli.hpp"
#include "fallguard/io.hpp"
#include "fallguard/overlay.hpp"
#include "fallguard/scene_synth.hpp"
#include "support/scenes.hpp"

using namespace fallguard;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

FrameResult tiny_result() {
    FrameResult result;
    LocalizedObject obj;
    obj.category = Category::animal;
    obj.raw_labels = {{"cat", 0.91234, SourcePath::rgb}, {"tabby", 0.66, SourcePath::depth}};
    obj.position = {1.23456, -0.5, 0.1};
    obj.bbox = {10.5, 20.25, 100, 200};
    obj.from_rgb = true;
    obj.from_depth = true;

    HazardEntry entry;
    entry.object = obj;
    entry.severity = Severity::moderate;
    entry.rule_trace = {"R1:no-match", "R2:no-match", "R3:no-match", "R4:moderate"};
    result.report.frame_id = "tiny";
    result.report.entries.push_back(entry);
    result.warnings = {"depth: something odd"};
    result.timings = {{"total", 12.345678}, {"detect", 1.0}};
    return result;
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("config parsing, comments and unknown-key rejection") {
    const Config cfg = Config::parse_string(
        "# a comment\n"
        "ransac.iterations = 300\n"
        "roi_depth.estimator=histogram  # trailing comment\n"
        "\n",
        "inline");
    CHECK(cfg.get_int("ransac.iterations", 0) == 300);
    CHECK(cfg.get_string("roi_depth.estimator", "") == "histogram");
    CHECK(cfg.get_double("missing.key", 2.5) == 2.5);
    CHECK_NOTHROW(cfg.require_all_consumed());

    const Config untouched = Config::parse_string("mystery.key=1\n", "inline");
    CHECK_THROWS_AS(untouched.require_all_consumed(), ConfigError);

    CHECK_THROWS_AS(Config::parse_string("a=1\na=2\n", "inline"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("not a pair\n", "inline"), ConfigError);
    const Config bad_num = Config::parse_string("k=abc\n", "inline");
    CHECK_THROWS_AS(bad_num.get_double("k", 0), ConfigError);
}

TEST_CASE("frame bundles round trip through disk") {
    TempDir dir("fallguard_bundle_rt");
    SceneSpec spec = test_support::looking_down_scene(35, 1.2, 96, 72);
    spec.frame_id = "rt";
    spec.objects.push_back(test_support::box("a", {1.7, 0.0, 0.1}, {0.3, 0.3, 0.2}));
    spec.invalid_pixel_fraction = 0.05;
    const RenderResult r = render(spec, 9);

    save_frame_bundle(r.bundle, dir.path);
    const FrameBundle loaded = load_frame_bundle(dir.path);

    CHECK(loaded.frame_id == "rt");
    CHECK(loaded.rgb.pixels == r.bundle.rgb.pixels);
    CHECK(loaded.intrinsics.fx == r.bundle.intrinsics.fx);
    CHECK((loaded.camera_pose.translation - r.bundle.camera_pose.translation).norm() <
          1e-15);
    CHECK(std::abs(loaded.camera_pose.orientation.dot(r.bundle.camera_pose.orientation)) >
          1.0 - 1e-15);

    REQUIRE(loaded.depth.meters.size() == r.bundle.depth.meters.size());
    for (std::size_t i = 0; i < loaded.depth.meters.size(); ++i) {
        const bool was_valid = r.bundle.depth.meters[i] > 0;
        CHECK((loaded.depth.meters[i] > 0) == was_valid);
        if (was_valid)  // millimeter quantization on disk
            CHECK(std::abs(loaded.depth.meters[i] - r.bundle.depth.meters[i]) <= 0.0006);
    }
}

TEST_CASE("depth pixels are stored as millimeters") {
    TempDir dir("fallguard_depth_mm");
    FrameBundle bundle;
    bundle.frame_id = "mm";
    bundle.intrinsics = {50.0, 50.0, 3.5, 3.5, 8, 8};
    bundle.rgb = RgbImage::filled(8, 8, 0, 0, 0);
    bundle.depth = DepthImage::invalid_filled(8, 8);
    bundle.depth.at(2, 2) = 2.0f;
    save_frame_bundle(bundle, dir.path);

    const Raster16 raw = read_pgm16(dir.path / "depth.pgm");
    CHECK(raw.values[2 * 8 + 2] == 2000);
    const FrameBundle loaded = load_frame_bundle(dir.path);
    CHECK(loaded.depth.at(2, 2) == 2.0f);
}

TEST_CASE("bundle loading errors name the problem") {
    TempDir dir("fallguard_bundle_err");
    CHECK_THROWS_AS(load_frame_bundle(dir.path / "nope"), LoadError);

    SceneSpec spec = test_support::looking_down_scene(35, 1.2, 32, 24);
    const RenderResult r = render(spec, 2);
    save_frame_bundle(r.bundle, dir.path);

    SUBCASE("truncated depth file") {
        auto bytes = fs::file_size(dir.path / "depth.pgm");
        fs::resize_file(dir.path / "depth.pgm", bytes / 2);
        CHECK_THROWS_WITH_AS(load_frame_bundle(dir.path),
                             doctest::Contains("truncated"), LoadError);
    }
    SUBCASE("missing meta") {
        fs::remove(dir.path / "meta.json");
        CHECK_THROWS_AS(load_frame_bundle(dir.path), LoadError);
    }
    SUBCASE("meta field missing") {
        std::ofstream(dir.path / "meta.json")
            << R"({"frame_id":"x","intrinsics":{"fy":1,"cx":0,"cy":0,"width":32,"height":24},)"
            << R"("camera_pose":{"translation":[0,0,1],"quaternion":[1,0,0,0]}})";
        CHECK_THROWS_WITH_AS(load_frame_bundle(dir.path), doctest::Contains("fx"),
                             LoadError);
    }
    SUBCASE("dimension mismatch") {
        std::ofstream(dir.path / "meta.json")
            << R"({"frame_id":"x","intrinsics":{"fx":1,"fy":1,"cx":0,"cy":0,"width":64,"height":48},)"
            << R"("camera_pose":{"translation":[0,0,1],"quaternion":[1,0,0,0]}})";
        CHECK_THROWS_AS(load_frame_bundle(dir.path), LoadError);
    }
}

TEST_CASE("occupancy maps round trip and reject malformed input") {
    TempDir dir("fallguard_occmap");
    OccupancyMap map = OccupancyMap::filled(5, 3, 0.25, -1.0, 2.0, CellState::free_space);
    map.at(0, 0) = CellState::occupied;
    map.at(4, 2) = CellState::unknown;
    const auto path = dir.path / "room.occmap";
    save_occupancy_map(map, path);

    const OccupancyMap loaded = load_occupancy_map(path);
    CHECK(loaded.width == 5);
    CHECK(loaded.height == 3);
    CHECK(loaded.resolution == 0.25);
    CHECK(loaded.origin_x == -1.0);
    CHECK(loaded.cells == map.cells);

    std::ofstream(path) << "occmap v2 1 1 0.1 0 0\n.\n";
    CHECK_THROWS_AS(load_occupancy_map(path), LoadError);
    std::ofstream(path) << "occmap v1 3 1 0.1 0 0\n.x.\n";
    CHECK_THROWS_AS(load_occupancy_map(path), LoadError);
    std::ofstream(path) << "occmap v1 3 2 0.1 0 0\n...\n";
    CHECK_THROWS_AS(load_occupancy_map(path), LoadError);
}

TEST_CASE("reports serialize canonically and round trip") {
    const FrameResult result = tiny_result();
    const ReportDocument doc = make_report_document(result);

    const std::string bytes = serialize_report(doc);
    CHECK(bytes == serialize_report(doc));  // stable
    CHECK(bytes.find("\"0.9123\"") == std::string::npos);  // scores are numbers
    CHECK(bytes.find("0.9123") != std::string::npos);      // fixed 4 decimals
    CHECK(bytes.find("1.2346") != std::string::npos);      // rounded, not truncated

    TempDir dir("fallguard_report_rt");
    const auto path = dir.path / "report.json";
    write_report_document(doc, path);
    const ReportDocument loaded = load_report(path);
    CHECK(!report_diff(doc, loaded).has_value());
    CHECK(!report_diff(loaded, doc).has_value());

    // Timings are excluded from comparison and from the timing-free form.
    ReportDocument other = doc;
    other.timings.clear();
    CHECK(!report_diff(doc, other).has_value());
    CHECK(serialize_report(doc, false) == serialize_report(other, false));
}

TEST_CASE("report_diff names the offending object") {
    const ReportDocument doc = make_report_document(tiny_result());
    ReportDocument changed = doc;
    changed.objects[0].severity = "high";
    const auto diff = report_diff(doc, changed);
    REQUIRE(diff.has_value());
    CHECK(diff->find("objects[0]") != std::string::npos);
    CHECK(diff->find("cat") != std::string::npos);
    CHECK(diff->find("severity") != std::string::npos);
}

TEST_CASE("overlay draws one color-coded box per entry") {
    SceneSpec spec = test_support::looking_down_scene(35, 1.2, 160, 120);
    const RenderResult r = render(spec, 3);

    HazardReport empty;
    empty.frame_id = r.bundle.frame_id;
    const RgbImage untouched = render_overlay(r.bundle, empty);
    CHECK(untouched.pixels == r.bundle.rgb.pixels);

    HazardReport one;
    one.frame_id = r.bundle.frame_id;
    HazardEntry entry;
    entry.object.bbox = {40, 30, 100, 80};
    entry.object.category = Category::small_object;
    entry.severity = Severity::high;
    entry.rule_trace = {"R5:high"};
    one.entries.push_back(entry);

    const RgbImage annotated = render_overlay(r.bundle, one);
    CHECK(annotated.pixels != r.bundle.rgb.pixels);
    const OverlayColor red = severity_color(Severity::high);
    const std::uint8_t* border = annotated.at(41, 30);
    CHECK(border[0] == red.r);
    CHECK(border[1] == red.g);
    CHECK(border[2] == red.b);
    // Interior stays untouched.
    CHECK(annotated.at(70, 55)[0] == r.bundle.rgb.at(70, 55)[0]);
}

TEST_CASE("cli rejects bad invocations with exit code 1") {
    const char* missing_flag[] = {"fallguard", "process", "--frame", "somewhere"};
    CHECK(run_cli(4, missing_flag) == 1);

    const char* unknown_flag[] = {"fallguard", "process", "--framez", "x"};
    CHECK(run_cli(4, unknown_flag) == 1);

    const char* no_subcommand[] = {"fallguard"};
    CHECK(run_cli(1, no_subcommand) == 1);

    const char* help[] = {"fallguard", "--help"};
    CHECK(run_cli(2, help) == 0);
}

TEST_CASE("cli synth then process round trip") {
    TempDir dir("fallguard_cli_rt");
    SceneSpec spec = test_support::looking_down_scene(35, 1.2, 96, 72);
    spec.frame_id = "cli_rt";
    const auto scene_path = (dir.path / "scene.cfg").string();
    save_scene_spec(spec, scene_path);

    const auto bundle_dir = (dir.path / "bundle").string();
    const char* synth_argv[] = {"fallguard", "synth",  "--scene", scene_path.c_str(),
                                "--out",     bundle_dir.c_str(), "--seed", "5"};
    REQUIRE(run_cli(8, synth_argv) == 0);
    CHECK(fs::exists(fs::path(bundle_dir) / "rgb.ppm"));
    CHECK(fs::exists(fs::path(bundle_dir) / "depth.pgm"));
    CHECK(fs::exists(fs::path(bundle_dir) / "truth.json"));

    // Fixture with no detections: the pipeline runs the depth path only.
    std::ofstream(fs::path(bundle_dir) / "detections.json")
        << R"({"frame_id":"cli_rt","detections":[],"classifications":[]})";

    const auto map_path = (dir.path / "room.occmap").string();
    save_occupancy_map(OccupancyMap::filled(60, 60, 0.1, -3.0, -3.0, CellState::free_space),
                       map_path);
    const auto config_path = (dir.path / "pipeline.cfg").string();
    std::ofstream(config_path) << "pipeline.seed=3\n";
    const auto report_path = (dir.path / "report.json").string();
    const auto overlay_path = (dir.path / "overlay.ppm").string();

    const char* process_argv[] = {"fallguard", "process",
                                  "--frame",   bundle_dir.c_str(),
                                  "--config",  config_path.c_str(),
                                  "--map",     map_path.c_str(),
                                  "--out",     report_path.c_str(),
                                  "--overlay", overlay_path.c_str()};
    REQUIRE(run_cli(12, process_argv) == 0);
    const ReportDocument report = load_report(report_path);
    CHECK(report.frame_id == "cli_rt");
    CHECK(report.objects.empty());
    CHECK(fs::exists(overlay_path));
}

TEST_CASE("cli eval flags mismatches and missing fixtures are frame errors") {
    TempDir dir("fallguard_cli_eval");
    SceneSpec spec = test_support::looking_down_scene(35, 1.2, 96, 72);
    spec.frame_id = "eval_frame";
    spec.objects.push_back(
        test_support::box("crate", {1.6, 0.0, 0.1}, {0.3, 0.3, 0.2}, "small_object"));
    const RenderResult r = render(spec, 6);

    const fs::path bundle_dir = dir.path / "frames" / "eval_frame";
    save_frame_bundle(r.bundle, bundle_dir);
    std::ofstream(bundle_dir / "detections.json")
        << R"({"frame_id":"eval_frame","detections":[],"classifications":[]})";

    const auto map_path = (dir.path / "room.occmap").string();
    save_occupancy_map(OccupancyMap::filled(60, 60, 0.1, -3.0, -3.0, CellState::free_space),
                       map_path);

    // Produce the reference report, then run eval against it: everything matches.
    const auto expected_dir = dir.path / "expected";
    fs::create_directories(expected_dir);
    const auto expected_path = (expected_dir / "eval_frame.json").string();
    const char* process_argv[] = {"fallguard", "process", "--frame",
                                  bundle_dir.c_str(),     "--config",
                                  "/dev/null",            "--map",
                                  map_path.c_str(),       "--out",
                                  expected_path.c_str()};
    REQUIRE(run_cli(10, process_argv) == 0);

    const auto frames_dir = (dir.path / "frames").string();
    const auto expected_dir_str = expected_dir.string();
    const char* eval_argv[] = {"fallguard", "eval",
                               "--frames",  frames_dir.c_str(),
                               "--expected", expected_dir_str.c_str(),
                               "--map",     map_path.c_str()};
    CHECK(run_cli(8, eval_argv) == 0);

    // Flip one severity in the expected report: eval must fail.
    ReportDocument tampered = load_report(expected_path);
    REQUIRE(!tampered.objects.empty());
    tampered.objects[0].severity = "none";
    write_report_document(tampered, expected_path);
    CHECK(run_cli(8, eval_argv) == 1);

    // A fixture-backed frame without its fixture is a processing error.
    fs::remove(bundle_dir / "detections.json");
    const auto report_path = (dir.path / "out.json").string();
    const char* broken_argv[] = {"fallguard", "process", "--frame",
                                 bundle_dir.c_str(),     "--config",
                                 "/dev/null",            "--map",
                                 map_path.c_str(),       "--out",
                                 report_path.c_str()};
    CHECK(run_cli(10, broken_argv) == 2);
}

}  // TEST_SUITE
