#include "hmlc/preprocess.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include "hmlc/errors.hpp"

namespace hmlc {
namespace {

int read_pnm_token(std::istream& in, const std::string& origin) {
    // Skips whitespace and '#' comments, then reads one unsigned decimal.
    for (;;) {
        const int c = in.peek();
        if (c == EOF) throw ValidationError(origin + ": truncated PGM header");
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        break;
    }
    int value = 0;
    if (!(in >> value) || value < 0) throw ValidationError(origin + ": malformed PGM header");
    return value;
}

double clamp_index(double v, double hi) { return std::min(std::max(v, 0.0), hi); }

void put_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
}

std::uint32_t get_u32(std::istream& in, const std::string& origin) {
    char buf[4];
    if (!in.read(buf, 4)) throw ValidationError(origin + ": truncated tensor file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[i])) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in, const std::string& origin) {
    char buf[8];
    if (!in.read(buf, 8)) throw ValidationError(origin + ": truncated tensor file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[i])) << (8 * i);
    return v;
}

constexpr std::uint32_t kTensorVersion = 1;

} // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open image '" + path.string() + "'");
    const std::string origin = path.string();

    char m0 = 0, m1 = 0;
    f.get(m0);
    f.get(m1);
    if (m0 != 'P' || m1 != '5') throw ValidationError(origin + ": not a binary PGM (P5) file");

    const int width = read_pnm_token(f, origin);
    const int height = read_pnm_token(f, origin);
    const int maxval = read_pnm_token(f, origin);
    if (width <= 0 || height <= 0) throw ValidationError(origin + ": invalid PGM dimensions");
    if (maxval <= 0 || maxval > 255) {
        throw ValidationError(origin + ": unsupported PGM maxval " + std::to_string(maxval) +
                              " (expected 1..255)");
    }
    f.get();   // single whitespace after maxval

    GrayImage img;
    img.width = static_cast<std::size_t>(width);
    img.height = static_cast<std::size_t>(height);
    std::vector<char> raw(img.width * img.height);
    if (!f.read(raw.data(), static_cast<std::streamsize>(raw.size()))) {
        throw ValidationError(origin + ": truncated PGM pixel data");
    }
    img.data.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        img.data[i] = static_cast<double>(static_cast<std::uint8_t>(raw[i]));
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    if (img.empty()) throw ValidationError("cannot write an empty image");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open '" + path.string() + "' for writing");
    f << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<char> raw(img.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double v = std::round(std::min(std::max(img.data[i], 0.0), 255.0));
        raw[i] = static_cast<char>(static_cast<std::uint8_t>(v));
    }
    f.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!f) throw ValidationError("failed writing image '" + path.string() + "'");
}

double sample_bilinear(const GrayImage& img, double x, double y) {
    x = clamp_index(x, static_cast<double>(img.width - 1));
    y = clamp_index(y, static_cast<double>(img.height - 1));
    const std::size_t x0 = static_cast<std::size_t>(x);
    const std::size_t y0 = static_cast<std::size_t>(y);
    const std::size_t x1 = std::min(x0 + 1, img.width - 1);
    const std::size_t y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - static_cast<double>(x0);
    const double fy = y - static_cast<double>(y0);
    const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
    const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

GrayImage resize_bilinear(const GrayImage& img, std::size_t width, std::size_t height) {
    if (img.empty()) throw ValidationError("cannot resize an empty image");
    if (width == 0 || height == 0) throw ValidationError("resize dimensions must be positive");

    GrayImage out;
    out.width = width;
    out.height = height;
    out.data.resize(width * height);

    const double sx = static_cast<double>(img.width) / static_cast<double>(width);
    const double sy = static_cast<double>(img.height) / static_cast<double>(height);
    for (std::size_t y = 0; y < height; ++y) {
        const double src_y = (static_cast<double>(y) + 0.5) * sy - 0.5;
        for (std::size_t x = 0; x < width; ++x) {
            const double src_x = (static_cast<double>(x) + 0.5) * sx - 0.5;
            out.at(x, y) = sample_bilinear(img, src_x, src_y);
        }
    }
    return out;
}

AffineTransform AffineTransform::identity() { return {}; }

AffineTransform AffineTransform::translation(double tx, double ty) {
    AffineTransform t;
    t.m[2] = tx;
    t.m[5] = ty;
    return t;
}

AffineTransform AffineTransform::rotation_deg(double degrees) {
    const double rad = degrees * std::numbers::pi / 180.0;
    AffineTransform t;
    t.m[0] = std::cos(rad);
    t.m[1] = -std::sin(rad);
    t.m[3] = std::sin(rad);
    t.m[4] = std::cos(rad);
    return t;
}

AffineTransform AffineTransform::scaling(double sx, double sy) {
    AffineTransform t;
    t.m[0] = sx;
    t.m[4] = sy;
    return t;
}

AffineTransform AffineTransform::shear_x(double shift_px, double extent) {
    AffineTransform t;
    t.m[1] = extent > 0.0 ? shift_px / extent : 0.0;
    return t;
}

AffineTransform AffineTransform::flip_x() {
    AffineTransform t;
    t.m[0] = -1.0;
    return t;
}

AffineTransform AffineTransform::then(const AffineTransform& next) const {
    AffineTransform r;
    r.m[0] = next.m[0] * m[0] + next.m[1] * m[3];
    r.m[1] = next.m[0] * m[1] + next.m[1] * m[4];
    r.m[2] = next.m[0] * m[2] + next.m[1] * m[5] + next.m[2];
    r.m[3] = next.m[3] * m[0] + next.m[4] * m[3];
    r.m[4] = next.m[3] * m[1] + next.m[4] * m[4];
    r.m[5] = next.m[3] * m[2] + next.m[4] * m[5] + next.m[5];
    return r;
}

AffineTransform AffineTransform::inverse() const {
    const double det = m[0] * m[4] - m[1] * m[3];
    if (std::abs(det) < 1e-12) throw NumericError("affine transform is not invertible");
    AffineTransform r;
    r.m[0] = m[4] / det;
    r.m[1] = -m[1] / det;
    r.m[3] = -m[3] / det;
    r.m[4] = m[0] / det;
    r.m[2] = -(r.m[0] * m[2] + r.m[1] * m[5]);
    r.m[5] = -(r.m[3] * m[2] + r.m[4] * m[5]);
    return r;
}

std::pair<double, double> AffineTransform::apply(double x, double y) const {
    return {m[0] * x + m[1] * y + m[2], m[3] * x + m[4] * y + m[5]};
}

GrayImage warp_affine(const GrayImage& src, const AffineTransform& forward) {
    if (src.empty()) throw ValidationError("cannot warp an empty image");
    const AffineTransform inv = forward.inverse();

    GrayImage out;
    out.width = src.width;
    out.height = src.height;
    out.data.resize(src.data.size());
    for (std::size_t y = 0; y < out.height; ++y) {
        for (std::size_t x = 0; x < out.width; ++x) {
            const auto [sx, sy] = inv.apply(static_cast<double>(x), static_cast<double>(y));
            out.at(x, y) = sample_bilinear(src, sx, sy);
        }
    }
    return out;
}

MatchResult match_template(const GrayImage& image, const GrayImage& templ,
                           double var_threshold) {
    if (image.empty() || templ.empty()) throw ValidationError("template match needs two images");
    if (templ.width > image.width || templ.height > image.height) {
        throw ValidationError("template is larger than the image");
    }

    const std::size_t tw = templ.width;
    const std::size_t th = templ.height;
    const std::size_t n = tw * th;
    const double inv_n = 1.0 / static_cast<double>(n);

    double t_sum = 0.0;
    for (double v : templ.data) t_sum += v;
    const double t_mean = t_sum * inv_n;
    std::vector<double> t_centered(n);
    double t_var_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t_centered[i] = templ.data[i] - t_mean;
        t_var_sum += t_centered[i] * t_centered[i];
    }

    MatchResult fallback;
    fallback.row = (image.height - th) / 2;
    fallback.col = (image.width - tw) / 2;
    fallback.score = std::numeric_limits<double>::quiet_NaN();
    fallback.valid = false;
    if (t_var_sum < var_threshold) return fallback;

    // Integral images give each window's sum and sum of squares in O(1).
    const std::size_t iw = image.width + 1;
    const std::size_t ih = image.height + 1;
    std::vector<double> integ(iw * ih, 0.0);
    std::vector<double> integ_sq(iw * ih, 0.0);
    for (std::size_t y = 0; y < image.height; ++y) {
        double row_sum = 0.0;
        double row_sq = 0.0;
        for (std::size_t x = 0; x < image.width; ++x) {
            const double v = image.at(x, y);
            row_sum += v;
            row_sq += v * v;
            integ[(y + 1) * iw + (x + 1)] = integ[y * iw + (x + 1)] + row_sum;
            integ_sq[(y + 1) * iw + (x + 1)] = integ_sq[y * iw + (x + 1)] + row_sq;
        }
    }
    const auto window_sum = [&](const std::vector<double>& t, std::size_t r, std::size_t c) {
        return t[(r + th) * iw + (c + tw)] - t[r * iw + (c + tw)] - t[(r + th) * iw + c] +
               t[r * iw + c];
    };

    MatchResult best = fallback;
    double best_score = -std::numeric_limits<double>::infinity();
    const std::size_t max_row = image.height - th;
    const std::size_t max_col = image.width - tw;
    for (std::size_t r = 0; r <= max_row; ++r) {
        for (std::size_t c = 0; c <= max_col; ++c) {
            const double w_sum = window_sum(integ, r, c);
            const double w_sq = window_sum(integ_sq, r, c);
            const double w_var_sum = w_sq - w_sum * w_sum * inv_n;
            if (w_var_sum < var_threshold) continue;

            double dot = 0.0;
            for (std::size_t y = 0; y < th; ++y) {
                const double* img_row = image.data.data() + (r + y) * image.width + c;
                const double* t_row = t_centered.data() + y * tw;
                for (std::size_t x = 0; x < tw; ++x) dot += img_row[x] * t_row[x];
            }
            const double score = dot / std::sqrt(w_var_sum * t_var_sum);
            if (score > best_score) {
                best_score = score;
                best.row = r;
                best.col = c;
                best.score = score;
                best.valid = true;
            }
        }
    }
    return best;
}

PreprocessResult preprocess_image(const GrayImage& img, const PreprocessConfig& cfg) {
    if (cfg.crop > cfg.resize) throw ValidationError("crop size exceeds resize size");
    if (cfg.std_dev <= 0.0) throw ValidationError("std_dev must be positive");

    const GrayImage resized = resize_bilinear(img, cfg.resize, cfg.resize);

    PreprocessResult res;
    if (cfg.template_image.empty()) {
        res.match.row = (cfg.resize - cfg.crop) / 2;
        res.match.col = (cfg.resize - cfg.crop) / 2;
        res.match.score = std::numeric_limits<double>::quiet_NaN();
        res.match.valid = false;
    } else {
        if (cfg.template_image.width != cfg.crop || cfg.template_image.height != cfg.crop) {
            throw ValidationError("template dimensions must equal the crop size");
        }
        res.match = match_template(resized, cfg.template_image, cfg.var_threshold);
    }

    res.image.width = cfg.crop;
    res.image.height = cfg.crop;
    res.image.data.resize(cfg.crop * cfg.crop);
    for (std::size_t y = 0; y < cfg.crop; ++y) {
        for (std::size_t x = 0; x < cfg.crop; ++x) {
            const double v = resized.at(res.match.col + x, res.match.row + y);
            res.image.at(x, y) = (v / 255.0 - cfg.mean) / cfg.std_dev;
        }
    }
    return res;
}

std::vector<double> image_features(const GrayImage& img) { return img.data; }

void save_tensor(const std::filesystem::path& path, const GrayImage& img) {
    if (img.empty()) throw ValidationError("cannot save an empty tensor");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open '" + path.string() + "' for writing");
    f.write("HMLT", 4);
    put_u32(f, kTensorVersion);
    put_u64(f, img.width);
    put_u64(f, img.height);
    for (double v : img.data) put_u64(f, std::bit_cast<std::uint64_t>(v));
    if (!f) throw ValidationError("failed writing tensor '" + path.string() + "'");
}

GrayImage load_tensor(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open tensor '" + path.string() + "'");
    const std::string origin = path.string();

    char magic[4];
    if (!f.read(magic, 4) || std::string(magic, 4) != "HMLT") {
        throw ValidationError(origin + ": not a tensor file (bad magic)");
    }
    const std::uint32_t version = get_u32(f, origin);
    if (version != kTensorVersion) {
        throw ValidationError(origin + ": unsupported tensor version " + std::to_string(version));
    }
    GrayImage img;
    img.width = get_u64(f, origin);
    img.height = get_u64(f, origin);
    if (img.width == 0 || img.height == 0 || img.width > (1u << 20) || img.height > (1u << 20)) {
        throw ValidationError(origin + ": implausible tensor dimensions");
    }
    img.data.resize(img.width * img.height);
    for (double& v : img.data) v = std::bit_cast<double>(get_u64(f, origin));
    f.peek();
    if (!f.eof()) throw ValidationError(origin + ": trailing bytes after tensor data");
    return img;
}

} // namespace hmlc
