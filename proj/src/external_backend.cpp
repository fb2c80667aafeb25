#include "fallguard/external_backend.hpp"

#include <httplib.h>
#include <json.hpp>

namespace fallguard {

namespace {

using nlohmann::json;

json post_image(const std::string& base_url, const std::string& path,
                const httplib::Headers& headers, const std::string& body,
                const char* who) {
    httplib::Client client(base_url);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);

    const auto res = client.Post(path, headers, body, "image/x-portable-pixmap");
    if (!res)
        throw Error(std::string(who) + ": cannot reach " + base_url + path + " (" +
                    httplib::to_string(res.error()) + ")");
    if (res->status != 200)
        throw Error(std::string(who) + ": " + base_url + path + " returned status " +
                    std::to_string(res->status));
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw Error(std::string(who) + ": bad response body: " + e.what());
    }
}

}  // namespace

std::string encode_ppm(const RgbImage& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

std::vector<Detection> ExternalDetector::run_detect(const std::string& frame_id,
                                                    const RgbImage& rgb) const {
    const json doc = post_image(base_url_, "/detect", {{"X-Frame-Id", frame_id}},
                                encode_ppm(rgb), "external detector");
    std::vector<Detection> detections;
    try {
        for (const auto& d : doc.at("detections")) {
            Detection det;
            const auto& bb = d.at("bbox");
            det.bbox = {bb.at(0).get<double>(), bb.at(1).get<double>(),
                        bb.at(2).get<double>(), bb.at(3).get<double>()};
            det.label = d.at("label").get<std::string>();
            det.score = d.at("score").get<double>();
            det.source = SourcePath::rgb;
            detections.push_back(std::move(det));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("external detector: bad response: ") + e.what());
    }
    return detections;
}

ClassificationResult ExternalClassifier::run_classify(const RgbImage& crop,
                                                      const PixelPoint& source_center) const {
    const json doc = post_image(
        base_url_, "/classify",
        {{"X-Center-U", std::to_string(source_center.x)},
         {"X-Center-V", std::to_string(source_center.y)}},
        encode_ppm(crop), "external classifier");
    try {
        return {doc.at("label").get<std::string>(), doc.at("score").get<double>()};
    } catch (const json::exception& e) {
        throw Error(std::string("external classifier: bad response: ") + e.what());
    }
}

}  // namespace fallguard
