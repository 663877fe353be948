#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "forgery/error.hpp"
#include "forgery/imaging.hpp"

namespace forgery {

struct FeatureVector {
    std::vector<double> values;
    std::string pipeline_id;

    std::size_t size() const noexcept { return values.size(); }
    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Componentwise range fitted on training vectors; used for 0-1 scaling.
struct ScalingParams {
    std::vector<double> min;
    std::vector<double> max;

    friend bool operator==(const ScalingParams&, const ScalingParams&) = default;
};

enum class DctChannel { Luminance, ChromaRed };

struct DctLbpConfig {
    int canvas = 128;
    int block = 16;
    DctChannel channel = DctChannel::Luminance;

    void validate() const {
        if (block != 8 && block != 16 && block != 32)
            throw Error(ErrorCode::InvalidArgument, "DCT block must be 8, 16 or 32");
        if (canvas < block || canvas % block != 0)
            throw Error(ErrorCode::InvalidArgument, "DCT block must divide the canvas");
    }
};

/// Square real matrix stored row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n, double fill = 0.0) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}

    int n() const noexcept { return n_; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * n_ + c]; }
    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * n_ + c]; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

private:
    int n_ = 0;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Local binary patterns
// ---------------------------------------------------------------------------

/// 8-bit LBP code of a 3x3 window given row-major. Neighbors are visited clockwise
/// from the top-left, which contributes the most significant bit; a neighbor >= center sets its bit.
inline int lbp_code(std::span<const std::uint8_t, 9> window) {
    static constexpr std::array<int, 8> clockwise = {0, 1, 2, 5, 8, 7, 6, 3};
    const std::uint8_t center = window[4];
    int code = 0;
    for (int idx : clockwise) code = (code << 1) | (window[idx] >= center ? 1 : 0);
    return code;
}

/// Per-pixel LBP code with clamp-to-edge padding; output has the input's dimensions.
inline RasterImage lbp_map(const RasterImage& gray) {
    if (gray.channels() != 1) throw Error(ErrorCode::InvalidArgument, "lbp_map expects a 1-channel raster");
    const int w = gray.width(), h = gray.height();
    if (w < 3 || h < 3) throw Error(ErrorCode::TooSmall, "lbp_map needs at least 3x3 pixels");
    RasterImage out(w, h, 1);
    std::array<std::uint8_t, 9> window{};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    window[(dy + 1) * 3 + dx + 1] = gray.at(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1));
            out.at(x, y) = static_cast<std::uint8_t>(lbp_code(window));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Orthonormal type-II DCT
// ---------------------------------------------------------------------------

namespace detail {

// basis(k, n) = c(k) * cos(pi * (2n + 1) * k / 2N)
inline Matrix dct_basis(int n) {
    Matrix basis(n);
    const double c0 = std::sqrt(1.0 / n), ck = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            basis(k, i) = (k == 0 ? c0 : ck) * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    return basis;
}

inline const Matrix& cached_basis(int n) {
    // the three supported block sizes cover every caller in the pipelines
    static const Matrix b8 = dct_basis(8), b16 = dct_basis(16), b32 = dct_basis(32);
    thread_local Matrix other;
    switch (n) {
        case 8: return b8;
        case 16: return b16;
        case 32: return b32;
        default:
            if (other.n() != n) other = dct_basis(n);
            return other;
    }
}

// Forward: B * X * B^T. Inverse: B^T * X * B.
inline Matrix sandwich(const Matrix& basis, const Matrix& in, bool inverse) {
    const int n = in.n();
    Matrix tmp(n), out(n);
    // tmp = B * X (forward) or B^T * X (inverse)
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += (inverse ? basis(k, r) : basis(r, k)) * in(k, c);
            tmp(r, c) = acc;
        }
    // out = tmp * B^T (forward) or tmp * B (inverse)
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += tmp(r, k) * (inverse ? basis(k, c) : basis(c, k));
            out(r, c) = acc;
        }
    return out;
}

}  // namespace detail

/// Separable orthonormal 2D DCT-II.
inline Matrix dct2(const Matrix& block) {
    if (block.n() < 1) throw Error(ErrorCode::InvalidArgument, "dct2 needs N >= 1");
    return detail::sandwich(detail::cached_basis(block.n()), block, false);
}

/// Inverse of dct2 (orthonormal DCT-III).
inline Matrix idct2(const Matrix& coeffs) {
    if (coeffs.n() < 1) throw Error(ErrorCode::InvalidArgument, "idct2 needs N >= 1");
    return detail::sandwich(detail::cached_basis(coeffs.n()), coeffs, true);
}

// ---------------------------------------------------------------------------
// DCT over LBP tiles
// ---------------------------------------------------------------------------

/// Cr = 128 + 0.5R - 0.418688G - 0.081312B (JFIF), rounded half-up.
inline RasterImage chroma_red(const RasterImage& img) {
    if (img.channels() == 1) return RasterImage(img.width(), img.height(), 1, std::uint8_t{128});
    RasterImage out(img.width(), img.height(), 1);
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = to_u8(128.0 + 0.5 * src[3 * i] - 0.418688 * src[3 * i + 1] - 0.081312 * src[3 * i + 2]);
    return out;
}

/// Unscaled DCT-LBP descriptor: population standard deviation of every DCT coefficient
/// position across the non-overlapping LBP tiles. Length block^2, row-major in (u, v).
inline FeatureVector dct_lbp_features(const RasterImage& img, const DctLbpConfig& cfg = {}) {
    cfg.validate();
    const RasterImage plane = cfg.channel == DctChannel::Luminance ? to_grayscale(img) : chroma_red(img);
    const RasterImage lbp = lbp_map(resize_bilinear(plane, cfg.canvas, cfg.canvas));

    const int n = cfg.block;
    const int tiles_per_side = cfg.canvas / n;
    const std::size_t len = static_cast<std::size_t>(n) * n;
    std::vector<Matrix> coeffs;
    coeffs.reserve(static_cast<std::size_t>(tiles_per_side) * tiles_per_side);
    for (int ty = 0; ty < tiles_per_side; ++ty)
        for (int tx = 0; tx < tiles_per_side; ++tx) {
            Matrix tile(n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) tile(r, c) = lbp.at(tx * n + c, ty * n + r);
            coeffs.push_back(dct2(tile));
        }

    // two-pass mean/variance keeps identical tiles at exactly zero spread
    const double count = static_cast<double>(coeffs.size());
    std::vector<double> mean(len, 0.0);
    for (const auto& m : coeffs)
        for (std::size_t i = 0; i < len; ++i) mean[i] += m.data()[i];
    for (auto& v : mean) v /= count;
    FeatureVector out{std::vector<double>(len, 0.0), "dctlbp"};
    for (const auto& m : coeffs)
        for (std::size_t i = 0; i < len; ++i) {
            const double d = m.data()[i] - mean[i];
            out.values[i] += d * d;
        }
    for (auto& v : out.values) v = std::sqrt(v / count);
    return out;
}

// ---------------------------------------------------------------------------
// 0-1 scaling
// ---------------------------------------------------------------------------

inline ScalingParams fit_scaling(std::span<const FeatureVector> train) {
    if (train.empty()) throw Error(ErrorCode::EmptySet, "cannot fit scaling on an empty set");
    const std::size_t len = train.front().size();
    ScalingParams p{train.front().values, train.front().values};
    for (const auto& v : train) {
        if (v.size() != len) throw Error(ErrorCode::LengthMismatch, "feature vectors differ in length");
        for (std::size_t i = 0; i < len; ++i) {
            p.min[i] = std::min(p.min[i], v.values[i]);
            p.max[i] = std::max(p.max[i], v.values[i]);
        }
    }
    return p;
}

/// (v - min) / (max - min) clamped to [0, 1]; constant components map to 0.
inline FeatureVector apply_scaling(const FeatureVector& v, const ScalingParams& p) {
    if (v.size() != p.min.size() || p.min.size() != p.max.size())
        throw Error(ErrorCode::LengthMismatch, "feature vector length differs from scaling params");
    FeatureVector out{std::vector<double>(v.size(), 0.0), v.pipeline_id};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double range = p.max[i] - p.min[i];
        if (range > 0.0) out.values[i] = std::clamp((v.values[i] - p.min[i]) / range, 0.0, 1.0);
    }
    return out;
}

}  // namespace forgery
