#include "fallguard/image.hpp"

#include <fstream>
#include <limits>
#include <string>

namespace fallguard {

RgbImage RgbImage::filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RgbImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(std::size_t(w) * h * 3);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = r;
        img.pixels[i + 1] = g;
        img.pixels[i + 2] = b;
    }
    return img;
}

DepthImage DepthImage::invalid_filled(int w, int h) {
    DepthImage img;
    img.width = w;
    img.height = h;
    img.meters.assign(std::size_t(w) * h, 0.0f);
    return img;
}

MaskImage MaskImage::blank(int w, int h) {
    MaskImage m;
    m.width = w;
    m.height = h;
    m.on.assign(std::size_t(w) * h, 0);
    return m;
}

int MaskImage::count() const {
    int n = 0;
    for (auto v : on) n += v != 0;
    return n;
}

double mask_iou(const MaskImage& a, const MaskImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw Error("mask_iou: dimension mismatch");
    long inter = 0;
    long uni = 0;
    for (std::size_t i = 0; i < a.on.size(); ++i) {
        const bool pa = a.on[i] != 0;
        const bool pb = b.on[i] != 0;
        inter += pa && pb;
        uni += pa || pb;
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

namespace {

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    while (in) {
        const int c = in.peek();
        if (c == EOF) break;
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        in >> tok;
        return tok;
    }
    return tok;
}

int parse_dim(const std::string& tok, const std::filesystem::path& path, const char* what) {
    try {
        const int v = std::stoi(tok);
        if (v <= 0 || v > 1 << 16) throw std::out_of_range("dim");
        return v;
    } catch (const std::exception&) {
        throw LoadError(path.string() + ": bad " + what + " '" + tok + "'");
    }
}

}  // namespace

void write_ppm(const RgbImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot open " + path.string() + " for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              std::streamsize(img.pixels.size()));
    if (!out) throw LoadError("short write to " + path.string());
}

RgbImage read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    if (next_token(in) != "P6") throw LoadError(path.string() + ": not a binary PPM (P6)");
    RgbImage img;
    img.width = parse_dim(next_token(in), path, "width");
    img.height = parse_dim(next_token(in), path, "height");
    if (next_token(in) != "255") throw LoadError(path.string() + ": expected maxval 255");
    in.get();  // single whitespace after maxval
    img.pixels.resize(std::size_t(img.width) * img.height * 3);
    in.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
    if (in.gcount() != std::streamsize(img.pixels.size()))
        throw LoadError(path.string() + ": truncated pixel data");
    return img;
}

void write_pgm16(const Raster16& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot open " + path.string() + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n65535\n";
    std::vector<std::uint8_t> bytes(img.values.size() * 2);
    for (std::size_t i = 0; i < img.values.size(); ++i) {
        bytes[2 * i] = std::uint8_t(img.values[i] >> 8);  // big-endian per netpbm
        bytes[2 * i + 1] = std::uint8_t(img.values[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw LoadError("short write to " + path.string());
}

Raster16 read_pgm16(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    if (next_token(in) != "P5") throw LoadError(path.string() + ": not a binary PGM (P5)");
    Raster16 img;
    img.width = parse_dim(next_token(in), path, "width");
    img.height = parse_dim(next_token(in), path, "height");
    if (next_token(in) != "65535") throw LoadError(path.string() + ": expected maxval 65535");
    in.get();
    std::vector<std::uint8_t> bytes(std::size_t(img.width) * img.height * 2);
    in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
    if (in.gcount() != std::streamsize(bytes.size()))
        throw LoadError(path.string() + ": truncated pixel data");
    img.values.resize(std::size_t(img.width) * img.height);
    for (std::size_t i = 0; i < img.values.size(); ++i)
        img.values[i] = std::uint16_t((bytes[2 * i] << 8) | bytes[2 * i + 1]);
    return img;
}

}  // namespace fallguard
