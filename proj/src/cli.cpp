#include "fallguard/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fallguard/external_backend.hpp"
#include "fallguard/io.hpp"
#include "fallguard/overlay.hpp"
#include "fallguard/pipeline.hpp"
#include "fallguard/scene_synth.hpp"

namespace fallguard {

namespace {

namespace fs = std::filesystem;

struct Backends {
    std::unique_ptr<Detector> detector;
    std::unique_ptr<Classifier> classifier;
};

Backends make_backends(const PipelineConfig& cfg, const fs::path& bundle_dir,
                       const FrameBundle& bundle) {
    Backends out;
    std::optional<FixtureDoc> fixture;
    if (cfg.detector_backend == "fixture" || cfg.classifier_backend == "fixture")
        fixture = load_bundle_fixture(bundle_dir, bundle);

    if (cfg.detector_backend == "external") {
        if (cfg.detector_url.empty()) throw ConfigError("detector.url required for external backend");
        out.detector = std::make_unique<ExternalDetector>(cfg.detector_url);
    } else {
        auto det = std::make_unique<FixtureDetector>();
        if (fixture) det->add(*fixture);
        out.detector = std::move(det);
    }

    if (cfg.classifier_backend == "external") {
        if (cfg.classifier_url.empty())
            throw ConfigError("classifier.url required for external backend");
        out.classifier = std::make_unique<ExternalClassifier>(cfg.classifier_url);
    } else {
        out.classifier = std::make_unique<FixtureClassifier>(
            fixture ? *fixture : FixtureDoc{});
    }
    return out;
}

PipelineConfig load_pipeline_config(const std::string& config_path, bool seed_set,
                                    std::uint32_t seed) {
    PipelineConfig cfg = config_path.empty()
                             ? PipelineConfig{}
                             : PipelineConfig::from_config(Config::parse_file(config_path));
    if (seed_set) cfg.seed = seed;
    return cfg;
}

Taxonomy load_taxonomy(const PipelineConfig& cfg) {
    return cfg.taxonomy_path.empty() ? Taxonomy::builtin() : Taxonomy::load(cfg.taxonomy_path);
}

int cmd_process(const std::string& frame_dir, const std::string& config_path,
                const std::string& map_path, const std::string& out_path,
                const std::string& overlay_path, bool seed_set, std::uint32_t seed) {
    const PipelineConfig cfg = load_pipeline_config(config_path, seed_set, seed);
    const FrameBundle bundle = load_frame_bundle(frame_dir);
    const OccupancyMap map = load_occupancy_map(map_path);
    const Taxonomy taxonomy = load_taxonomy(cfg);
    const Backends backends = make_backends(cfg, frame_dir, bundle);

    const FrameResult result = process_frame(bundle, cfg, map, *backends.detector,
                                             *backends.classifier, taxonomy);
    write_report(result, out_path);
    if (!overlay_path.empty())
        write_ppm(render_overlay(bundle, result.report), overlay_path);

    for (const auto& warning : result.warnings)
        std::cerr << "warning: " << warning << "\n";
    std::cout << bundle.frame_id << ": " << result.report.entries.size()
              << " object(s), report written to " << out_path << "\n";
    return 0;
}

int cmd_synth(const std::string& scene_path, const std::string& out_dir,
              std::uint32_t seed) {
    const SceneSpec spec = load_scene_spec(scene_path);
    const RenderResult rendered = render(spec, seed);
    save_frame_bundle(rendered.bundle, out_dir);

    // Ground-truth sidecar so fixtures and tests can be authored against the
    // rendered scene.
    nlohmann::json truth;
    truth["floor"] = {{"normal_cam",
                       {rendered.truth.floor_normal_cam.x(),
                        rendered.truth.floor_normal_cam.y(),
                        rendered.truth.floor_normal_cam.z()}},
                      {"offset_cam", rendered.truth.floor_offset_cam}};
    truth["objects"] = nlohmann::json::array();
    for (const auto& obj : rendered.truth.objects) {
        nlohmann::json entry;
        entry["name"] = obj.name;
        entry["category"] = obj.category_hint;
        entry["pixel_count"] = obj.pixel_count;
        if (obj.pixel_count > 0) {
            int x0 = rendered.bundle.rgb.width;
            int y0 = rendered.bundle.rgb.height;
            int x1 = -1;
            int y1 = -1;
            for (int y = 0; y < obj.mask.height; ++y)
                for (int x = 0; x < obj.mask.width; ++x)
                    if (obj.mask.at(x, y)) {
                        x0 = std::min(x0, x);
                        y0 = std::min(y0, y);
                        x1 = std::max(x1, x);
                        y1 = std::max(y1, y);
                    }
            entry["mask_bbox"] = {x0, y0, x1 + 1, y1 + 1};
            entry["centroid_world"] = {obj.centroid.x, obj.centroid.y, obj.centroid.z};
            const PixelPoint px = project(
                world_to_camera(obj.centroid, rendered.bundle.camera_pose),
                rendered.bundle.intrinsics);
            entry["centroid_px"] = {px.x, px.y};
        }
        truth["objects"].push_back(std::move(entry));
    }
    std::ofstream out(fs::path(out_dir) / "truth.json");
    if (!out) throw LoadError("cannot write truth.json");
    out << truth.dump(2) << "\n";

    std::cout << "rendered '" << spec.frame_id << "' (" << spec.objects.size()
              << " objects) into " << out_dir << "\n";
    return 0;
}

int cmd_eval(const std::string& frames_dir, const std::string& expected_dir,
             const std::string& config_path, const std::string& map_path, bool seed_set,
             std::uint32_t seed) {
    const PipelineConfig cfg = load_pipeline_config(config_path, seed_set, seed);
    const OccupancyMap map =
        map_path.empty() ? OccupancyMap{} : load_occupancy_map(map_path);
    const Taxonomy taxonomy = load_taxonomy(cfg);

    std::vector<fs::path> frame_dirs;
    for (const auto& entry : fs::directory_iterator(frames_dir))
        if (entry.is_directory() && fs::exists(entry.path() / "meta.json"))
            frame_dirs.push_back(entry.path());
    std::sort(frame_dirs.begin(), frame_dirs.end());
    if (frame_dirs.empty()) throw LoadError("no frame bundles under " + frames_dir);

    int failures = 0;
    for (const auto& dir : frame_dirs) {
        std::string verdict;
        try {
            const FrameBundle bundle = load_frame_bundle(dir);
            const Backends backends = make_backends(cfg, dir, bundle);
            const FrameResult result = process_frame(bundle, cfg, map, *backends.detector,
                                                     *backends.classifier, taxonomy);
            const ReportDocument actual = make_report_document(result);

            const fs::path expected_path =
                fs::path(expected_dir) / (bundle.frame_id + ".json");
            const ReportDocument expected = load_report(expected_path);
            const auto diff = report_diff(expected, actual);
            if (diff) {
                verdict = "FAIL  " + bundle.frame_id + ": " + *diff;
                ++failures;
            } else {
                verdict = "PASS  " + bundle.frame_id;
            }
        } catch (const std::exception& e) {
            verdict = "FAIL  " + dir.filename().string() + ": " + e.what();
            ++failures;
        }
        std::cout << verdict << "\n";
    }
    std::cout << (frame_dirs.size() - std::size_t(failures)) << "/" << frame_dirs.size()
              << " frames match\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Two-path RGB-D floor hazard detection"};
    app.require_subcommand(1);

    std::string frame_dir;
    std::string config_path;
    std::string map_path;
    std::string out_path;
    std::string overlay_path;
    std::string scene_path;
    std::string frames_dir;
    std::string expected_dir;
    std::uint32_t seed = 1;

    auto* process = app.add_subcommand("process", "Process one frame bundle");
    process->add_option("--frame", frame_dir, "Frame bundle directory")->required();
    process->add_option("--config", config_path, "Pipeline config file")->required();
    process->add_option("--map", map_path, "Occupancy map file")->required();
    process->add_option("--out", out_path, "Report output path")->required();
    process->add_option("--overlay", overlay_path, "Also write an annotated PPM");
    auto* process_seed = process->add_option("--seed", seed, "Override pipeline.seed");

    auto* synth = app.add_subcommand("synth", "Render a synthetic frame bundle");
    synth->add_option("--scene", scene_path, "Scene spec file")->required();
    synth->add_option("--out", frame_dir, "Output bundle directory")->required();
    synth->add_option("--seed", seed, "Render seed")->required();

    auto* eval = app.add_subcommand("eval", "Batch-compare frames against expected reports");
    eval->add_option("--frames", frames_dir, "Directory of frame bundles")->required();
    eval->add_option("--expected", expected_dir, "Directory of expected reports")->required();
    eval->add_option("--config", config_path, "Pipeline config file");
    eval->add_option("--map", map_path, "Occupancy map file");
    auto* eval_seed = eval->add_option("--seed", seed, "Override pipeline.seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (process->parsed())
            return cmd_process(frame_dir, config_path, map_path, out_path, overlay_path,
                               !process_seed->empty(), seed);
        if (synth->parsed()) return cmd_synth(scene_path, frame_dir, seed);
        if (eval->parsed())
            return cmd_eval(frames_dir, expected_dir, config_path, map_path,
                            !eval_seed->empty(), seed);
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "processing error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace fallguard
