#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fallguard/backends.hpp"
#include "fallguard/frame.hpp"
#include "fallguard/hazard.hpp"
#include "fallguard/pipeline.hpp"

namespace fallguard {

// Frame bundle directory layout:
//   rgb.ppm         8-bit color (P6)
//   depth.pgm       16-bit depth in millimeters, 0 = invalid (P5)
//   meta.json       frame_id, intrinsics, camera pose
//   detections.json optional per-frame fixture
FrameBundle load_frame_bundle(const std::filesystem::path& dir);
void save_frame_bundle(const FrameBundle& bundle, const std::filesystem::path& dir);

// The optional fixture document next to the bundle, validated against the
// bundle's image size.
std::optional<FixtureDoc> load_bundle_fixture(const std::filesystem::path& dir,
                                              const FrameBundle& bundle);

// Text grid format:
//   occmap v1 <width> <height> <resolution> <origin_x> <origin_y>
// followed by `height` rows of `width` cell codes, row 0 first:
//   .  free    #  occupied    ?  unknown
OccupancyMap load_occupancy_map(const std::filesystem::path& path);
void save_occupancy_map(const OccupancyMap& map, const std::filesystem::path& path);

// Report document: canonical serialization with sorted keys and all floats
// fixed at 4 decimals, byte-stable for golden comparisons. Timings live under
// their own top-level key so comparisons can drop them wholesale.
struct ReportLabel {
    std::string label;
    double score = 0;
    std::string source;  // "rgb" | "depth"
};

struct ReportObject {
    BBox bbox;
    std::string category;
    std::vector<ReportLabel> labels;
    std::vector<std::string> rule_trace;
    std::string severity;
    std::vector<std::string> sources;  // sorted
    WorldPoint world_position;
};

struct ReportDocument {
    std::string frame_id;
    std::string schema = "hazard-report/v1";
    std::vector<ReportObject> objects;
    std::vector<std::string> warnings;
    std::vector<StageTiming> timings;
};

ReportDocument make_report_document(const FrameResult& result);
std::string serialize_report(const ReportDocument& doc, bool include_timings = true);
void write_report(const FrameResult& result, const std::filesystem::path& path);
void write_report_document(const ReportDocument& doc, const std::filesystem::path& path);
ReportDocument load_report(const std::filesystem::path& path);

// First semantic difference between two reports, ignoring timings; nullopt
// when they agree. The string names the offending object.
std::optional<std::string> report_diff(const ReportDocument& expected,
                                       const ReportDocument& actual);

}  // namespace fallguard
