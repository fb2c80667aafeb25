#include "fallguard/backends.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fallguard {

void validate_bbox(const BBox& box, int img_width, int img_height) {
    if (!(box.x_min < box.x_max) || !(box.y_min < box.y_max))
        throw Error("bbox: degenerate box [" + std::to_string(box.x_min) + "," +
                    std::to_string(box.y_min) + "," + std::to_string(box.x_max) + "," +
                    std::to_string(box.y_max) + "]");
    if (box.x_min < 0 || box.y_min < 0 || box.x_max > img_width || box.y_max > img_height)
        throw Error("bbox: outside image bounds " + std::to_string(img_width) + "x" +
                    std::to_string(img_height));
}

std::string to_string(SourcePath s) {
    return s == SourcePath::rgb ? "rgb" : "depth";
}

std::vector<Detection> Detector::detect(const std::string& frame_id,
                                        const RgbImage& rgb) const {
    auto detections = run_detect(frame_id, rgb);
    for (const auto& det : detections) {
        validate_bbox(det.bbox, rgb.width, rgb.height);
        if (det.label.empty()) throw Error("detector returned a detection without a label");
        if (!(det.score >= 0 && det.score <= 1))
            throw Error("detector returned score outside [0,1] for '" + det.label + "'");
    }
    return detections;
}

ClassificationResult Classifier::classify(const RgbImage& crop,
                                          const PixelPoint& source_center) const {
    if (crop.empty()) throw std::invalid_argument("classify: empty crop");
    auto result = run_classify(crop, source_center);
    if (!(result.score >= 0 && result.score <= 1))
        throw Error("classifier returned score outside [0,1] for '" + result.label + "'");
    return result;
}

namespace {

using nlohmann::json;

BBox bbox_from_json(const json& arr, const std::string& origin) {
    if (!arr.is_array() || arr.size() != 4)
        throw LoadError(origin + ": bbox must be [x_min, y_min, x_max, y_max]");
    return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
            arr[3].get<double>()};
}

}  // namespace

FixtureDoc parse_fixture(const std::string& json_text, const std::string& origin,
                         int img_width, int img_height) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw LoadError(origin + ": " + e.what());
    }

    FixtureDoc fixture;
    try {
        fixture.frame_id = doc.at("frame_id").get<std::string>();
        const json detections = doc.value("detections", json::array());
        const json classifications = doc.value("classifications", json::array());
        for (const auto& d : detections) {
            Detection det;
            det.bbox = bbox_from_json(d.at("bbox"), origin);
            det.label = d.at("label").get<std::string>();
            det.score = d.at("score").get<double>();
            det.source = SourcePath::rgb;
            fixture.detections.push_back(std::move(det));
        }
        for (const auto& c : classifications) {
            FixtureDoc::CropLabel mapping;
            const auto& px = c.at("pixel");
            if (!px.is_array() || px.size() != 2)
                throw LoadError(origin + ": classification pixel must be [u, v]");
            mapping.pixel = {px[0].get<double>(), px[1].get<double>()};
            mapping.label = c.at("label").get<std::string>();
            mapping.score = c.at("score").get<double>();
            fixture.classifications.push_back(std::move(mapping));
        }
    } catch (const json::exception& e) {
        throw LoadError(origin + ": " + e.what());
    }

    for (const auto& det : fixture.detections) {
        try {
            validate_bbox(det.bbox, img_width, img_height);
        } catch (const Error& e) {
            throw LoadError(origin + ": detection '" + det.label + "': " + e.what());
        }
        if (det.label.empty()) throw LoadError(origin + ": detection with empty label");
        if (!(det.score >= 0 && det.score <= 1))
            throw LoadError(origin + ": detection '" + det.label + "' score outside [0,1]");
    }
    return fixture;
}

FixtureDoc load_fixture(const std::filesystem::path& path, int img_width, int img_height) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open fixture " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_fixture(buf.str(), path.string(), img_width, img_height);
}

void FixtureDetector::add(const FixtureDoc& doc) {
    frames_[doc.frame_id] = doc.detections;
}

std::vector<Detection> FixtureDetector::run_detect(const std::string& frame_id,
                                                   const RgbImage&) const {
    const auto it = frames_.find(frame_id);
    if (it == frames_.end())
        throw MissingFixtureError("no detection fixture for frame '" + frame_id + "'");
    return it->second;
}

ClassificationResult FixtureClassifier::run_classify(const RgbImage&,
                                                     const PixelPoint& source_center) const {
    const FixtureDoc::CropLabel* best = nullptr;
    double best_d2 = match_radius_px_ * match_radius_px_;
    for (const auto& m : mappings_) {
        const double dx = m.pixel.x - source_center.x;
        const double dy = m.pixel.y - source_center.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 <= best_d2) {
            best_d2 = d2;
            best = &m;
        }
    }
    if (!best) return {"unknown", 0.0};
    return {best->label, best->score};
}

BBox expand_roi(const BBox& box, double factor, int img_width, int img_height) {
    if (factor < 1) throw std::invalid_argument("expand_roi: factor must be >= 1");
    const PixelPoint c = box.center();
    BBox out;
    out.x_min = c.x - box.width() * factor / 2;
    out.x_max = c.x + box.width() * factor / 2;
    out.y_min = c.y - box.height() * factor / 2;
    out.y_max = c.y + box.height() * factor / 2;
    out.x_min = std::max(out.x_min, 0.0);
    out.y_min = std::max(out.y_min, 0.0);
    out.x_max = std::min(out.x_max, double(img_width));
    out.y_max = std::min(out.y_max, double(img_height));
    return out;
}

RgbImage crop_image(const RgbImage& img, const BBox& box) {
    const int x0 = std::clamp(int(std::floor(box.x_min)), 0, img.width);
    const int y0 = std::clamp(int(std::floor(box.y_min)), 0, img.height);
    const int x1 = std::clamp(int(std::ceil(box.x_max)), 0, img.width);
    const int y1 = std::clamp(int(std::ceil(box.y_max)), 0, img.height);

    RgbImage out;
    out.width = std::max(0, x1 - x0);
    out.height = std::max(0, y1 - y0);
    out.pixels.resize(std::size_t(out.width) * out.height * 3);
    for (int y = y0; y < y1; ++y) {
        const std::uint8_t* src = img.at(x0, y);
        std::uint8_t* dst = out.pixels.data() + 3 * std::size_t(y - y0) * out.width;
        std::copy(src, src + 3 * std::size_t(out.width), dst);
    }
    return out;
}

}  // namespace fallguard
