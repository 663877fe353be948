#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "forgery/error.hpp"

namespace forgery {

/// Decoded 8-bit raster, row-major, channel-interleaved. Channels is 1 or 3.
class RasterImage {
public:
    RasterImage() = default;

    RasterImage(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels) {
        validate_shape(width, height, channels);
        data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
    }

    RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data)
        : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
        validate_shape(width, height, channels);
        if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
            throw Error(ErrorCode::LengthMismatch, "raster data length does not match width*height*channels");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::span<std::uint8_t> data() noexcept { return data_; }

    std::uint8_t at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

    bool same_shape(const RasterImage& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    static void validate_shape(int width, int height, int channels) {
        if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "raster dimensions must be >= 1");
        if (channels != 1 && channels != 3) throw Error(ErrorCode::InvalidArgument, "raster must have 1 or 3 channels");
    }

    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

/// JPEG quality in [1, 100]; 100 = least quantization.
class JpegQuality {
public:
    explicit JpegQuality(int value) : value_(value) {
        if (value < 1 || value > 100) throw Error(ErrorCode::InvalidQuality, "JPEG quality must be in [1, 100]");
    }
    int value() const noexcept { return value_; }
    friend bool operator==(JpegQuality, JpegQuality) = default;

private:
    int value_;
};

enum class FlipAxis { Horizontal, Vertical };

/// Round-half-up conversion of a real sample to 8 bits, saturating.
inline std::uint8_t to_u8(double v) {
    const double r = std::floor(v + 0.5);
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

/// Rec.601 luma, Y = round(0.299R + 0.587G + 0.114B). Grayscale input is returned unchanged.
inline RasterImage to_grayscale(const RasterImage& img) {
    if (img.channels() == 1) return img;
    RasterImage out(img.width(), img.height(), 1);
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int r = src[3 * i], g = src[3 * i + 1], b = src[3 * i + 2];
        // integer form of the weights keeps the half-up rounding exact
        dst[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
    return out;
}

/// Replicates a single-channel raster into three identical channels.
inline RasterImage to_rgb(const RasterImage& img) {
    if (img.channels() == 3) return img;
    RasterImage out(img.width(), img.height(), 3);
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
    return out;
}

/// Per-channel mean over a k x k window, clamp-to-edge borders. k must be odd and >= 3.
inline RasterImage box_blur(const RasterImage& img, int k = 3) {
    if (k < 3 || k % 2 == 0) throw Error(ErrorCode::InvalidKernel, "blur window must be odd and >= 3");
    const int w = img.width(), h = img.height(), ch = img.channels(), r = k / 2;
    const int area = k * k;

    // separable integer sums keep the rounding exact
    std::vector<int> rows(static_cast<std::size_t>(w) * h * ch, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                int sum = 0;
                for (int d = -r; d <= r; ++d) sum += img.at(std::clamp(x + d, 0, w - 1), y, c);
                rows[(static_cast<std::size_t>(y) * w + x) * ch + c] = sum;
            }

    RasterImage out(w, h, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                int sum = 0;
                for (int d = -r; d <= r; ++d)
                    sum += rows[(static_cast<std::size_t>(std::clamp(y + d, 0, h - 1)) * w + x) * ch + c];
                out.at(x, y, c) = static_cast<std::uint8_t>((2 * sum + area) / (2 * area));
            }
    return out;
}

namespace detail {

// Bilinear sample at real coordinates already known to be inside [0, w-1] x [0, h-1].
inline double bilinear(const RasterImage& img, double x, double y, int c) {
    const int x0 = std::clamp(static_cast<int>(std::floor(x)), 0, img.width() - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(y)), 0, img.height() - 1);
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = std::clamp(x - x0, 0.0, 1.0);
    const double fy = std::clamp(y - y0, 0.0, 1.0);
    const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
    const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
    return top * (1.0 - fy) + bottom * fy;
}

}  // namespace detail

/// Rotation (degrees, counter-clockwise on screen) followed by horizontal shear, both about the
/// image center. Inverse-mapped bilinear resampling; sources outside the raster read as 0.
inline RasterImage affine_warp(const RasterImage& img, double rotation_deg, double shear_x) {
    const int w = img.width(), h = img.height(), ch = img.channels();
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    const double theta = rotation_deg * std::numbers::pi / 180.0;
    double cos_t = std::cos(theta), sin_t = std::sin(theta);
    // snap values that are zero/one up to rounding so whole turns are exact
    if (std::abs(cos_t) < 1e-12) cos_t = 0.0;
    if (std::abs(sin_t) < 1e-12) sin_t = 0.0;
    if (std::abs(std::abs(cos_t) - 1.0) < 1e-12) cos_t = std::copysign(1.0, cos_t);
    if (std::abs(std::abs(sin_t) - 1.0) < 1e-12) sin_t = std::copysign(1.0, sin_t);
    constexpr double slack = 1e-9;

    RasterImage out(w, h, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            // forward: p' = Shear * Rot * (p - c) + c, so invert shear first, then rotation
            const double dy = y - cy;
            const double dx = (x - cx) - shear_x * dy;
            const double sx = cos_t * dx + sin_t * dy + cx;
            const double sy = -sin_t * dx + cos_t * dy + cy;
            if (sx < -slack || sy < -slack || sx > w - 1 + slack || sy > h - 1 + slack) continue;
            for (int c = 0; c < ch; ++c) out.at(x, y, c) = to_u8(detail::bilinear(img, sx, sy, c));
        }
    return out;
}

/// Bilinear resize with corner-aligned sampling (output corners map onto input corners).
inline RasterImage resize_bilinear(const RasterImage& img, int w, int h) {
    if (w < 1 || h < 1) throw Error(ErrorCode::InvalidArgument, "resize target must be >= 1x1");
    if (w == img.width() && h == img.height()) return img;
    const int ch = img.channels();
    const double sx = w > 1 ? static_cast<double>(img.width() - 1) / (w - 1) : 0.0;
    const double sy = h > 1 ? static_cast<double>(img.height() - 1) / (h - 1) : 0.0;
    const double ox = w > 1 ? 0.0 : (img.width() - 1) / 2.0;
    const double oy = h > 1 ? 0.0 : (img.height() - 1) / 2.0;

    RasterImage out(w, h, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) out.at(x, y, c) = to_u8(detail::bilinear(img, ox + x * sx, oy + y * sy, c));
    return out;
}

inline RasterImage abs_diff(const RasterImage& a, const RasterImage& b) {
    if (!a.same_shape(b)) throw Error(ErrorCode::ShapeMismatch, "abs_diff operands differ in shape");
    RasterImage out(a.width(), a.height(), a.channels());
    auto pa = a.data(), pb = b.data();
    auto po = out.data();
    for (std::size_t i = 0; i < po.size(); ++i)
        po[i] = static_cast<std::uint8_t>(pa[i] > pb[i] ? pa[i] - pb[i] : pb[i] - pa[i]);
    return out;
}

inline RasterImage flip(const RasterImage& img, FlipAxis axis) {
    const int w = img.width(), h = img.height(), ch = img.channels();
    RasterImage out(w, h, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int sx = axis == FlipAxis::Horizontal ? w - 1 - x : x;
            const int sy = axis == FlipAxis::Vertical ? h - 1 - y : y;
            for (int c = 0; c < ch; ++c) out.at(x, y, c) = img.at(sx, sy, c);
        }
    return out;
}

/// Copies the rectangle [x, x+w) x [y, y+h) into a new raster.
inline RasterImage crop(const RasterImage& img, int x, int y, int w, int h) {
    if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > img.width() || y + h > img.height())
        throw Error(ErrorCode::InvalidArgument, "crop rectangle outside the raster");
    RasterImage out(w, h, img.channels());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int k = 0; k < img.channels(); ++k) out.at(c, r, k) = img.at(x + c, y + r, k);
    return out;
}

}  // namespace forgery
