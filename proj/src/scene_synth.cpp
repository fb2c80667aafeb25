#include "fallguard/scene_synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "fallguard/config.hpp"

namespace fallguard {

namespace {

constexpr double kNearClip = 0.01;

double uniform01(std::mt19937& rng) {
    return double(rng()) * (1.0 / 4294967296.0);  // [0, 1)
}

double gaussian(std::mt19937& rng) {
    // Box-Muller, cosine branch. u1 in (0, 1] keeps the log finite.
    const double u1 = (double(rng()) + 1.0) * (1.0 / 4294967296.0);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct LocalRay {
    Eigen::Vector3d origin;
    Eigen::Vector3d dir;
};

struct SurfaceHit {
    double t = std::numeric_limits<double>::infinity();
    Eigen::Vector3d normal_local{0, 0, 1};
    bool ok = false;
};

SurfaceHit intersect_box(const LocalRay& ray, const Eigen::Vector3d& dims) {
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    int enter_axis = 0;
    double enter_sign = 1;

    for (int axis = 0; axis < 3; ++axis) {
        const double half = dims[axis] / 2;
        const double o = ray.origin[axis];
        const double d = ray.dir[axis];
        if (std::abs(d) < 1e-12) {
            if (o < -half || o > half) return {};
            continue;
        }
        double t1 = (-half - o) / d;
        double t2 = (half - o) / d;
        if (t1 > t2) std::swap(t1, t2);
        if (t1 > tmin) {
            tmin = t1;
            enter_axis = axis;
            enter_sign = d > 0 ? -1 : 1;  // entry face normal opposes the ray
        }
        tmax = std::min(tmax, t2);
        if (tmin > tmax) return {};
    }
    if (!(tmin > kNearClip)) return {};  // behind or camera inside

    SurfaceHit hit;
    hit.t = tmin;
    hit.normal_local = Eigen::Vector3d::Zero();
    hit.normal_local[enter_axis] = enter_sign;
    hit.ok = true;
    return hit;
}

SurfaceHit intersect_cylinder(const LocalRay& ray, double radius, double height) {
    SurfaceHit best;
    const double half_h = height / 2;

    const double a = ray.dir.x() * ray.dir.x() + ray.dir.y() * ray.dir.y();
    const double b = 2 * (ray.origin.x() * ray.dir.x() + ray.origin.y() * ray.dir.y());
    const double c =
        ray.origin.x() * ray.origin.x() + ray.origin.y() * ray.origin.y() - radius * radius;

    if (a > 1e-16) {
        const double disc = b * b - 4 * a * c;
        if (disc >= 0) {
            const double sq = std::sqrt(disc);
            for (const double t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
                if (!(t > kNearClip) || t >= best.t) continue;
                const double z = ray.origin.z() + t * ray.dir.z();
                if (std::abs(z) > half_h) continue;
                best.t = t;
                best.normal_local = Eigen::Vector3d(ray.origin.x() + t * ray.dir.x(),
                                                    ray.origin.y() + t * ray.dir.y(), 0) /
                                    radius;
                best.ok = true;
            }
        }
    }

    if (std::abs(ray.dir.z()) > 1e-12) {
        for (const double s : {1.0, -1.0}) {
            const double t = (s * half_h - ray.origin.z()) / ray.dir.z();
            if (!(t > kNearClip) || t >= best.t) continue;
            const double x = ray.origin.x() + t * ray.dir.x();
            const double y = ray.origin.y() + t * ray.dir.y();
            if (x * x + y * y > radius * radius) continue;
            best.t = t;
            best.normal_local = Eigen::Vector3d(0, 0, s);
            best.ok = true;
        }
    }
    return best;
}

double lowest_world_z(const SceneObject& obj) {
    const Eigen::Matrix3d rot = obj.pose.orientation.toRotationMatrix();
    const Eigen::Vector3d c = obj.pose.translation;
    if (obj.shape == ShapeKind::box) {
        double low = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 8; ++i) {
            const Eigen::Vector3d corner{(i & 1 ? 0.5 : -0.5) * obj.dimensions.x(),
                                         (i & 2 ? 0.5 : -0.5) * obj.dimensions.y(),
                                         (i & 4 ? 0.5 : -0.5) * obj.dimensions.z()};
            low = std::min(low, (rot * corner + c).z());
        }
        return low;
    }
    const Eigen::Vector3d axis = rot.col(2);
    const double radial = obj.dimensions.x() * std::sqrt(std::max(
                              0.0, 1.0 - axis.z() * axis.z()));
    const double half_h = obj.dimensions.z() / 2;
    return std::min((c + axis * half_h).z(), (c - axis * half_h).z()) - radial;
}

void validate_spec(const SceneSpec& spec) {
    validate(spec.intrinsics);
    validate(spec.camera_pose);
    if (!(spec.camera_pose.translation.z() > 0))
        throw ConfigError("scene: camera must be above the floor");
    if (spec.depth_noise_sigma < 0) throw ConfigError("scene: negative noise sigma");
    if (spec.invalid_pixel_fraction < 0 || spec.invalid_pixel_fraction > 1)
        throw ConfigError("scene: invalid_pixel_fraction outside [0,1]");
    for (const auto& obj : spec.objects) {
        if (obj.dimensions.minCoeff() <= 0)
            throw ConfigError("scene: object '" + obj.name + "' has non-positive dimensions");
        if (lowest_world_z(obj) < -1e-9)
            throw ConfigError("scene: object '" + obj.name + "' dips below the floor");
    }
}

const std::array<std::array<std::uint8_t, 3>, 8> kPalette{{{196, 120, 70},
                                                           {90, 140, 196},
                                                           {120, 180, 90},
                                                           {200, 90, 160},
                                                           {210, 190, 80},
                                                           {90, 190, 180},
                                                           {160, 100, 200},
                                                           {220, 140, 140}}};

}  // namespace

RenderResult render(const SceneSpec& spec, std::uint32_t seed) {
    validate_spec(spec);

    const int w = spec.intrinsics.width;
    const int h = spec.intrinsics.height;
    const Eigen::Matrix3d cam_rot = spec.camera_pose.orientation.toRotationMatrix();
    const Eigen::Vector3d cam_origin = spec.camera_pose.translation;

    // Per-object rays are intersected in the object's local frame.
    std::vector<Eigen::Matrix3d> obj_rot_inv;
    for (const auto& obj : spec.objects)
        obj_rot_inv.push_back(obj.pose.orientation.toRotationMatrix().transpose());

    RenderResult out;
    out.bundle.frame_id = spec.frame_id;
    out.bundle.intrinsics = spec.intrinsics;
    out.bundle.camera_pose = spec.camera_pose;
    out.bundle.rgb = RgbImage::filled(w, h, 40, 40, 48);
    out.bundle.depth = DepthImage::invalid_filled(w, h);

    out.truth.true_depth = DepthImage::invalid_filled(w, h);
    out.truth.floor_normal_cam = cam_rot.transpose() * Eigen::Vector3d::UnitZ();
    out.truth.floor_offset_cam = cam_origin.z();
    out.truth.objects.resize(spec.objects.size());
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        out.truth.objects[i].name = spec.objects[i].name;
        out.truth.objects[i].category_hint = spec.objects[i].category_hint;
        out.truth.objects[i].mask = MaskImage::blank(w, h);
    }
    std::vector<Eigen::Vector3d> centroid_sums(spec.objects.size(), Eigen::Vector3d::Zero());

    const Eigen::Vector3d light = Eigen::Vector3d(0.35, -0.25, 0.9).normalized();
    std::mt19937 rng(seed);

    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            // Fixed two draws per pixel keeps the stream aligned regardless
            // of scene content.
            const double noise = gaussian(rng);
            const bool dropout = uniform01(rng) < spec.invalid_pixel_fraction;

            const Eigen::Vector3d dir_cam{(u - spec.intrinsics.cx) / spec.intrinsics.fx,
                                          (v - spec.intrinsics.cy) / spec.intrinsics.fy, 1.0};
            const Eigen::Vector3d dir_w = cam_rot * dir_cam;

            // dir_cam.z == 1, so the ray parameter t is the camera-frame depth.
            double best_t = std::numeric_limits<double>::infinity();
            int winner = -2;  // -2 none, -1 floor, >= 0 object index
            Eigen::Vector3d normal_w = Eigen::Vector3d::UnitZ();

            if (dir_w.z() < -1e-12) {
                const double t = -cam_origin.z() / dir_w.z();
                if (t > kNearClip) {
                    best_t = t;
                    winner = -1;
                }
            }
            for (std::size_t i = 0; i < spec.objects.size(); ++i) {
                const auto& obj = spec.objects[i];
                const LocalRay local{obj_rot_inv[i] * (cam_origin - obj.pose.translation),
                                     obj_rot_inv[i] * dir_w};
                SurfaceHit hit{};
                if (obj.shape == ShapeKind::box)
                    hit = intersect_box(local, obj.dimensions);
                else
                    hit = intersect_cylinder(local, obj.dimensions.x(), obj.dimensions.z());
                if (hit.ok && hit.t < best_t) {
                    best_t = hit.t;
                    winner = int(i);
                    normal_w = obj.pose.orientation * hit.normal_local;
                }
            }

            if (winner == -2) continue;  // no surface; stays an invalid reading

            out.truth.true_depth.at(u, v) = float(best_t);

            // RGB: flat shade per surface.
            std::uint8_t* px = out.bundle.rgb.at(u, v);
            if (winner == -1) {
                px[0] = px[1] = px[2] = 168;
            } else {
                const auto& base = kPalette[std::size_t(winner) % kPalette.size()];
                const double shade = 0.55 + 0.45 * std::max(0.0, normal_w.dot(light));
                px[0] = std::uint8_t(base[0] * shade);
                px[1] = std::uint8_t(base[1] * shade);
                px[2] = std::uint8_t(base[2] * shade);
            }

            if (dropout) continue;
            const double noisy = best_t + noise * spec.depth_noise_sigma / dir_cam.norm();
            if (!(noisy > 0)) continue;
            out.bundle.depth.at(u, v) = float(noisy);

            if (winner >= 0) {
                auto& truth = out.truth.objects[std::size_t(winner)];
                truth.mask.set(u, v, true);
                ++truth.pixel_count;
                centroid_sums[std::size_t(winner)] += cam_origin + best_t * dir_w;
            }
        }
    }

    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        if (out.truth.objects[i].pixel_count > 0)
            out.truth.objects[i].centroid = WorldPoint::from(
                centroid_sums[i] / double(out.truth.objects[i].pixel_count));
    }
    return out;
}

Pose make_camera_pose(const Eigen::Vector3d& position, double yaw_rad, double pitch_down_rad) {
    const double cy = std::cos(yaw_rad);
    const double sy = std::sin(yaw_rad);
    const double cp = std::cos(pitch_down_rad);
    const double sp = std::sin(pitch_down_rad);

    const Eigen::Vector3d forward{cp * cy, cp * sy, -sp};
    const Eigen::Vector3d right{sy, -cy, 0};
    const Eigen::Vector3d down = forward.cross(right);

    Eigen::Matrix3d rot;
    rot.col(0) = right;
    rot.col(1) = down;
    rot.col(2) = forward;

    Pose pose;
    pose.translation = position;
    pose.orientation = Eigen::Quaterniond(rot).normalized();
    return pose;
}

namespace {

Eigen::Vector3d parse_vec3(const Config& cfg, const std::string& key,
                           const Eigen::Vector3d& fallback) {
    const std::string text = cfg.get_string(key, "");
    if (text.empty()) return fallback;
    std::istringstream in(text);
    Eigen::Vector3d v;
    if (!(in >> v.x() >> v.y() >> v.z()))
        throw ConfigError("scene key '" + key + "': expected three numbers");
    return v;
}

std::string format_vec3(const Eigen::Vector3d& v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", v.x(), v.y(), v.z());
    return buf;
}

Eigen::Quaterniond parse_quat(const Config& cfg, const std::string& key, bool& present) {
    const std::string text = cfg.get_string(key, "");
    present = !text.empty();
    if (!present) return Eigen::Quaterniond::Identity();
    std::istringstream in(text);
    double w, x, y, z;
    if (!(in >> w >> x >> y >> z))
        throw ConfigError("scene key '" + key + "': expected `w x y z`");
    return Eigen::Quaterniond(w, x, y, z);
}

}  // namespace

SceneSpec load_scene_spec(const std::filesystem::path& path) {
    const Config cfg = Config::parse_file(path);
    SceneSpec spec;
    spec.frame_id = cfg.get_string("frame_id", spec.frame_id);
    spec.intrinsics.width = cfg.get_int("camera.width", spec.intrinsics.width);
    spec.intrinsics.height = cfg.get_int("camera.height", spec.intrinsics.height);
    spec.intrinsics.fx = cfg.get_double("camera.fx", spec.intrinsics.fx);
    spec.intrinsics.fy = cfg.get_double("camera.fy", spec.intrinsics.fy);
    spec.intrinsics.cx = cfg.get_double("camera.cx", spec.intrinsics.cx);
    spec.intrinsics.cy = cfg.get_double("camera.cy", spec.intrinsics.cy);

    const Eigen::Vector3d cam_pos = parse_vec3(cfg, "camera.position", {0, 0, 1.2});
    bool have_quat = false;
    const Eigen::Quaterniond quat = parse_quat(cfg, "camera.quaternion", have_quat);
    if (have_quat) {
        spec.camera_pose.translation = cam_pos;
        spec.camera_pose.orientation = quat;
    } else {
        const double yaw = cfg.get_double("camera.yaw_deg", 0) * std::numbers::pi / 180;
        const double pitch =
            cfg.get_double("camera.pitch_down_deg", 30) * std::numbers::pi / 180;
        spec.camera_pose = make_camera_pose(cam_pos, yaw, pitch);
    }

    spec.depth_noise_sigma = cfg.get_double("noise.sigma", 0);
    spec.invalid_pixel_fraction = cfg.get_double("noise.invalid_fraction", 0);

    for (int i = 0;; ++i) {
        const std::string prefix = "object." + std::to_string(i) + ".";
        if (!cfg.has(prefix + "name")) break;
        SceneObject obj;
        obj.name = cfg.get_string(prefix + "name", "");
        const std::string shape = cfg.get_string(prefix + "shape", "box");
        if (shape == "box")
            obj.shape = ShapeKind::box;
        else if (shape == "cylinder")
            obj.shape = ShapeKind::cylinder;
        else
            throw ConfigError("scene object '" + obj.name + "': unknown shape '" + shape +
                              "'");
        obj.category_hint = cfg.get_string(prefix + "category", "");
        obj.pose.translation = parse_vec3(cfg, prefix + "center", {0, 0, 0});
        bool have_obj_quat = false;
        const Eigen::Quaterniond oq = parse_quat(cfg, prefix + "quaternion", have_obj_quat);
        if (have_obj_quat) {
            obj.pose.orientation = oq;
        } else {
            const double yaw = cfg.get_double(prefix + "yaw_deg", 0) * std::numbers::pi / 180;
            obj.pose.orientation =
                Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
        }
        obj.dimensions = parse_vec3(cfg, prefix + "dimensions", {0.1, 0.1, 0.1});
        spec.objects.push_back(std::move(obj));
    }

    cfg.require_all_consumed();
    validate_spec(spec);
    return spec;
}

void save_scene_spec(const SceneSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot open " + path.string() + " for writing");
    char buf[128];

    out << "frame_id=" << spec.frame_id << "\n";
    out << "camera.width=" << spec.intrinsics.width << "\n";
    out << "camera.height=" << spec.intrinsics.height << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", spec.intrinsics.fx);
    out << "camera.fx=" << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", spec.intrinsics.fy);
    out << "camera.fy=" << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", spec.intrinsics.cx);
    out << "camera.cx=" << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", spec.intrinsics.cy);
    out << "camera.cy=" << buf << "\n";
    out << "camera.position=" << format_vec3(spec.camera_pose.translation) << "\n";
    const auto& q = spec.camera_pose.orientation;
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g", q.w(), q.x(), q.y(), q.z());
    out << "camera.quaternion=" << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", spec.depth_noise_sigma);
    out << "noise.sigma=" << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", spec.invalid_pixel_fraction);
    out << "noise.invalid_fraction=" << buf << "\n";

    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        const auto& obj = spec.objects[i];
        const std::string prefix = "object." + std::to_string(i) + ".";
        out << prefix << "name=" << obj.name << "\n";
        out << prefix << "shape=" << (obj.shape == ShapeKind::box ? "box" : "cylinder")
            << "\n";
        if (!obj.category_hint.empty())
            out << prefix << "category=" << obj.category_hint << "\n";
        out << prefix << "center=" << format_vec3(obj.pose.translation) << "\n";
        const auto& oq = obj.pose.orientation;
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g", oq.w(), oq.x(), oq.y(),
                      oq.z());
        out << prefix << "quaternion=" << buf << "\n";
        out << prefix << "dimensions=" << format_vec3(obj.dimensions) << "\n";
    }
    if (!out) throw LoadError("short write to " + path.string());
}

}  // namespace fallguard
