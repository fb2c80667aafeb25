#include "fallguard/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fallguard {

namespace {

using nlohmann::json;

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

Eigen::Vector3d vec3_from_json(const json& arr, const std::string& field) {
    if (!arr.is_array() || arr.size() != 3)
        throw LoadError(field + ": expected [x, y, z]");
    return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

}  // namespace

FrameBundle load_frame_bundle(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw LoadError("frame bundle directory not found: " + dir.string());

    FrameBundle bundle;
    bundle.rgb = read_ppm(dir / "rgb.ppm");

    const Raster16 raw = read_pgm16(dir / "depth.pgm");
    bundle.depth.width = raw.width;
    bundle.depth.height = raw.height;
    bundle.depth.meters.resize(raw.values.size());
    for (std::size_t i = 0; i < raw.values.size(); ++i)
        bundle.depth.meters[i] = raw.values[i] == 0 ? 0.0f : float(raw.values[i]) / 1000.0f;

    const json meta = load_json_file(dir / "meta.json");
    const std::string origin = (dir / "meta.json").string();
    try {
        bundle.frame_id = meta.at("frame_id").get<std::string>();
        const json& k = meta.at("intrinsics");
        bundle.intrinsics.fx = k.at("fx").get<double>();
        bundle.intrinsics.fy = k.at("fy").get<double>();
        bundle.intrinsics.cx = k.at("cx").get<double>();
        bundle.intrinsics.cy = k.at("cy").get<double>();
        bundle.intrinsics.width = k.at("width").get<int>();
        bundle.intrinsics.height = k.at("height").get<int>();

        const json& pose = meta.at("camera_pose");
        bundle.camera_pose.translation =
            vec3_from_json(pose.at("translation"), origin + ": camera_pose.translation");
        const json& q = pose.at("quaternion");
        if (!q.is_array() || q.size() != 4)
            throw LoadError(origin + ": camera_pose.quaternion: expected [w, x, y, z]");
        bundle.camera_pose.orientation = Eigen::Quaterniond(
            q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
    } catch (const json::exception& e) {
        throw LoadError(origin + ": " + e.what());
    }

    try {
        validate(bundle);
    } catch (const ConfigError& e) {
        throw LoadError(origin + ": " + e.what());
    }
    return bundle;
}

void save_frame_bundle(const FrameBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_ppm(bundle.rgb, dir / "rgb.ppm");

    Raster16 raw;
    raw.width = bundle.depth.width;
    raw.height = bundle.depth.height;
    raw.values.resize(bundle.depth.meters.size());
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        const float m = bundle.depth.meters[i];
        if (!(m > 0) || !std::isfinite(m)) {
            raw.values[i] = 0;
            continue;
        }
        const long mm = std::lround(double(m) * 1000.0);
        raw.values[i] = std::uint16_t(std::clamp(mm, 1L, 65535L));
    }
    write_pgm16(raw, dir / "depth.pgm");

    json meta;
    meta["frame_id"] = bundle.frame_id;
    meta["intrinsics"] = {{"fx", bundle.intrinsics.fx},   {"fy", bundle.intrinsics.fy},
                          {"cx", bundle.intrinsics.cx},   {"cy", bundle.intrinsics.cy},
                          {"width", bundle.intrinsics.width},
                          {"height", bundle.intrinsics.height}};
    const auto& q = bundle.camera_pose.orientation;
    meta["camera_pose"] = {
        {"translation",
         {bundle.camera_pose.translation.x(), bundle.camera_pose.translation.y(),
          bundle.camera_pose.translation.z()}},
        {"quaternion", {q.w(), q.x(), q.y(), q.z()}}};

    std::ofstream out(dir / "meta.json");
    if (!out) throw LoadError("cannot write " + (dir / "meta.json").string());
    out << meta.dump(2) << "\n";
}

std::optional<FixtureDoc> load_bundle_fixture(const std::filesystem::path& dir,
                                              const FrameBundle& bundle) {
    const auto path = dir / "detections.json";
    if (!std::filesystem::exists(path)) return std::nullopt;
    return load_fixture(path, bundle.rgb.width, bundle.rgb.height);
}

OccupancyMap load_occupancy_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open occupancy map " + path.string());

    std::string magic;
    std::string version;
    OccupancyMap map;
    in >> magic >> version >> map.width >> map.height >> map.resolution >> map.origin_x >>
        map.origin_y;
    if (!in || magic != "occmap" || version != "v1")
        throw LoadError(path.string() + ": expected header `occmap v1 <w> <h> <res> <ox> <oy>`");
    if (map.width <= 0 || map.height <= 0 || map.resolution <= 0)
        throw LoadError(path.string() + ": non-positive grid dimensions or resolution");

    map.cells.reserve(std::size_t(map.width) * map.height);
    std::string row;
    std::getline(in, row);  // rest of header line
    for (int y = 0; y < map.height; ++y) {
        if (!std::getline(in, row))
            throw LoadError(path.string() + ": missing row " + std::to_string(y));
        if (int(row.size()) < map.width)
            throw LoadError(path.string() + ": row " + std::to_string(y) + " has " +
                            std::to_string(row.size()) + " cells, expected " +
                            std::to_string(map.width));
        for (int x = 0; x < map.width; ++x) {
            switch (row[std::size_t(x)]) {
                case '.': map.cells.push_back(CellState::free_space); break;
                case '#': map.cells.push_back(CellState::occupied); break;
                case '?': map.cells.push_back(CellState::unknown); break;
                default:
                    throw LoadError(path.string() + ": row " + std::to_string(y) +
                                    ": bad cell '" + row[std::size_t(x)] + "'");
            }
        }
    }
    return map;
}

void save_occupancy_map(const OccupancyMap& map, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    char buf[96];
    std::snprintf(buf, sizeof buf, "occmap v1 %d %d %.17g %.17g %.17g", map.width,
                  map.height, map.resolution, map.origin_x, map.origin_y);
    out << buf << "\n";
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            switch (map.at(x, y)) {
                case CellState::free_space: out << '.'; break;
                case CellState::occupied: out << '#'; break;
                case CellState::unknown: out << '?'; break;
            }
        }
        out << "\n";
    }
    if (!out) throw LoadError("short write to " + path.string());
}

// ---------------------------------------------------------------------------
// Report document

namespace {

// Fixed 4-decimal float format; normalizes negative zero.
std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void append_string_array(std::string& out, const std::vector<std::string>& items) {
    out += "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += "\"" + escape_json(items[i]) + "\"";
    }
    out += "]";
}

}  // namespace

ReportDocument make_report_document(const FrameResult& result) {
    ReportDocument doc;
    doc.frame_id = result.report.frame_id;
    doc.warnings = result.warnings;
    doc.timings = result.timings;

    for (const auto& entry : result.report.entries) {
        ReportObject obj;
        obj.bbox = entry.object.bbox;
        obj.category = to_string(entry.object.category);
        for (const auto& raw : entry.object.raw_labels)
            obj.labels.push_back({raw.label, raw.score, to_string(raw.source)});
        obj.rule_trace = entry.rule_trace;
        obj.severity = to_string(entry.severity);
        if (entry.object.from_depth) obj.sources.push_back("depth");
        if (entry.object.from_rgb) obj.sources.push_back("rgb");
        obj.world_position = entry.object.position;
        doc.objects.push_back(std::move(obj));
    }
    return doc;
}

std::string serialize_report(const ReportDocument& doc, bool include_timings) {
    std::string out;
    out += "{\n";
    out += "  \"frame_id\": \"" + escape_json(doc.frame_id) + "\",\n";

    out += "  \"objects\": [";
    for (std::size_t i = 0; i < doc.objects.size(); ++i) {
        const auto& obj = doc.objects[i];
        out += i ? ",\n    {" : "\n    {";
        out += "\"bbox\": [" + fmt4(obj.bbox.x_min) + "," + fmt4(obj.bbox.y_min) + "," +
               fmt4(obj.bbox.x_max) + "," + fmt4(obj.bbox.y_max) + "],";
        out += "\"category\": \"" + escape_json(obj.category) + "\",";
        out += "\"labels\": [";
        for (std::size_t j = 0; j < obj.labels.size(); ++j) {
            if (j) out += ",";
            out += "{\"label\": \"" + escape_json(obj.labels[j].label) +
                   "\",\"score\": " + fmt4(obj.labels[j].score) + ",\"source\": \"" +
                   escape_json(obj.labels[j].source) + "\"}";
        }
        out += "],";
        out += "\"rule_trace\": ";
        append_string_array(out, obj.rule_trace);
        out += ",";
        out += "\"severity\": \"" + escape_json(obj.severity) + "\",";
        out += "\"sources\": ";
        append_string_array(out, obj.sources);
        out += ",";
        out += "\"world_position\": [" + fmt4(obj.world_position.x) + "," +
               fmt4(obj.world_position.y) + "," + fmt4(obj.world_position.z) + "]}";
    }
    out += doc.objects.empty() ? "],\n" : "\n  ],\n";

    out += "  \"schema\": \"" + escape_json(doc.schema) + "\",\n";

    if (include_timings) {
        std::vector<StageTiming> sorted = doc.timings;
        std::sort(sorted.begin(), sorted.end(),
                  [](const StageTiming& a, const StageTiming& b) { return a.stage < b.stage; });
        out += "  \"timings\": {";
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (i) out += ",";
            out += "\"" + escape_json(sorted[i].stage) + "\": " + fmt4(sorted[i].millis);
        }
        out += "},\n";
    }

    out += "  \"warnings\": ";
    append_string_array(out, doc.warnings);
    out += "\n}\n";
    return out;
}

void write_report_document(const ReportDocument& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write report " + path.string());
    out << serialize_report(doc);
    if (!out) throw LoadError("short write to " + path.string());
}

void write_report(const FrameResult& result, const std::filesystem::path& path) {
    write_report_document(make_report_document(result), path);
}

ReportDocument load_report(const std::filesystem::path& path) {
    const json doc = load_json_file(path);
    ReportDocument report;
    try {
        report.frame_id = doc.at("frame_id").get<std::string>();
        report.schema = doc.at("schema").get<std::string>();
        const json warnings = doc.value("warnings", json::array());
        for (const auto& w : warnings) report.warnings.push_back(w.get<std::string>());
        const json timings = doc.value("timings", json::object());
        for (const auto& [stage, ms] : timings.items())
            report.timings.push_back({stage, ms.get<double>()});
        for (const auto& o : doc.at("objects")) {
            ReportObject obj;
            const auto& bb = o.at("bbox");
            obj.bbox = {bb.at(0).get<double>(), bb.at(1).get<double>(),
                        bb.at(2).get<double>(), bb.at(3).get<double>()};
            obj.category = o.at("category").get<std::string>();
            for (const auto& l : o.at("labels"))
                obj.labels.push_back({l.at("label").get<std::string>(),
                                      l.at("score").get<double>(),
                                      l.at("source").get<std::string>()});
            for (const auto& r : o.at("rule_trace"))
                obj.rule_trace.push_back(r.get<std::string>());
            obj.severity = o.at("severity").get<std::string>();
            for (const auto& s : o.at("sources"))
                obj.sources.push_back(s.get<std::string>());
            const auto& wp = o.at("world_position");
            obj.world_position = {wp.at(0).get<double>(), wp.at(1).get<double>(),
                                  wp.at(2).get<double>()};
            report.objects.push_back(std::move(obj));
        }
    } catch (const json::exception& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
    return report;
}

namespace {

std::string object_tag(const ReportObject& obj, std::size_t index) {
    std::string tag = "objects[" + std::to_string(index) + "] (" + obj.category;
    if (!obj.labels.empty()) tag += " '" + obj.labels.front().label + "'";
    tag += ")";
    return tag;
}

bool same4(double a, double b) {
    return fmt4(a) == fmt4(b);
}

}  // namespace

std::optional<std::string> report_diff(const ReportDocument& expected,
                                       const ReportDocument& actual) {
    if (expected.frame_id != actual.frame_id)
        return "frame_id: expected '" + expected.frame_id + "', got '" + actual.frame_id +
               "'";
    if (expected.schema != actual.schema)
        return "schema: expected '" + expected.schema + "', got '" + actual.schema + "'";
    if (expected.warnings != actual.warnings) return std::string("warnings differ");
    if (expected.objects.size() != actual.objects.size())
        return "object count: expected " + std::to_string(expected.objects.size()) +
               ", got " + std::to_string(actual.objects.size());

    for (std::size_t i = 0; i < expected.objects.size(); ++i) {
        const auto& e = expected.objects[i];
        const auto& a = actual.objects[i];
        const std::string tag = object_tag(e, i);
        if (e.severity != a.severity)
            return tag + ": severity expected " + e.severity + ", got " + a.severity;
        if (e.category != a.category)
            return tag + ": category expected " + e.category + ", got " + a.category;
        if (e.sources != a.sources) return tag + ": sources differ";
        if (e.rule_trace != a.rule_trace) return tag + ": rule_trace differs";
        if (e.labels.size() != a.labels.size()) return tag + ": label count differs";
        for (std::size_t j = 0; j < e.labels.size(); ++j)
            if (e.labels[j].label != a.labels[j].label ||
                e.labels[j].source != a.labels[j].source ||
                !same4(e.labels[j].score, a.labels[j].score))
                return tag + ": label " + std::to_string(j) + " differs";
        if (!same4(e.bbox.x_min, a.bbox.x_min) || !same4(e.bbox.y_min, a.bbox.y_min) ||
            !same4(e.bbox.x_max, a.bbox.x_max) || !same4(e.bbox.y_max, a.bbox.y_max))
            return tag + ": bbox differs";
        if (!same4(e.world_position.x, a.world_position.x) ||
            !same4(e.world_position.y, a.world_position.y) ||
            !same4(e.world_position.z, a.world_position.z))
            return tag + ": world_position differs";
    }
    return std::nullopt;
}

}  // namespace fallguard
