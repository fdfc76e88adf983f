#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace hmlc {

/// Grayscale raster, row-major doubles. Pixel values are 0..255 after ingest
/// and become standardized reals after preprocessing.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> data;

    double at(std::size_t x, std::size_t y) const { return data[y * width + x]; }
    double& at(std::size_t x, std::size_t y) { return data[y * width + x]; }
    bool empty() const { return data.empty(); }
};

/// Binary 8-bit PGM (P5, maxval <= 255). Header comments are skipped.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Bilinear resample via center-aligned coordinates, so resizing to the same
/// dimensions reproduces the input exactly.
GrayImage resize_bilinear(const GrayImage& img, std::size_t width, std::size_t height);

double sample_bilinear(const GrayImage& img, double x, double y);

/// 2x3 forward transform: (x, y) -> (m0 x + m1 y + m2, m3 x + m4 y + m5).
struct AffineTransform {
    double m[6] = {1, 0, 0, 0, 1, 0};

    static AffineTransform identity();
    static AffineTransform translation(double tx, double ty);
    static AffineTransform rotation_deg(double degrees);
    static AffineTransform scaling(double sx, double sy);
    /// Horizontal shear displacing a point by shift_px over a vertical run of
    /// `extent` pixels.
    static AffineTransform shear_x(double shift_px, double extent);
    static AffineTransform flip_x();

    /// Composition: (next.then_after(*this)) applies *this first.
    AffineTransform then(const AffineTransform& next) const;
    AffineTransform inverse() const;
    std::pair<double, double> apply(double x, double y) const;
};

/// Resamples src through the inverse of `forward`; samples outside the frame
/// clamp to the nearest edge pixel.
GrayImage warp_affine(const GrayImage& src, const AffineTransform& forward);

struct MatchResult {
    std::size_t row = 0;      // crop origin in the resized frame
    std::size_t col = 0;
    double score = 0.0;       // Pearson correlation at the chosen offset
    bool valid = false;       // false means the center-crop fallback was used
};

/// Zero-mean normalized cross-correlation of the template against every
/// offset of the image, best score wins; ties resolve to the smallest
/// (row, col). Offsets whose window variance falls below var_threshold are
/// skipped; when no offset qualifies (or the template itself is flat) the
/// result is the centered offset with a NaN score and valid=false.
MatchResult match_template(const GrayImage& image, const GrayImage& templ,
                           double var_threshold = 1e-6);

struct PreprocessConfig {
    std::size_t resize = 256;
    std::size_t crop = 224;
    GrayImage template_image;   // empty selects the center crop
    double mean = 0.449;
    double std_dev = 0.226;
    double var_threshold = 1e-6;
};

struct PreprocessResult {
    GrayImage image;            // crop x crop, standardized
    MatchResult match;
};

/// resize -> template match -> crop -> (x/255 - mean) / std_dev.
PreprocessResult preprocess_image(const GrayImage& img, const PreprocessConfig& cfg);

/// Flattened row-major copy, ready to feed a model.
std::vector<double> image_features(const GrayImage& img);

/// Raw tensor container for preprocessed images: magic "HMLT", u32 version,
/// u64 width, u64 height, little-endian f64 pixels.
void save_tensor(const std::filesystem::path& path, const GrayImage& img);
GrayImage load_tensor(const std::filesystem::path& path);

} // namespace hmlc
