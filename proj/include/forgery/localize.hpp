#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "forgery/ela.hpp"
#include "forgery/error.hpp"
#include "forgery/imaging.hpp"

namespace forgery {

inline constexpr int kMaskSide = 128;

/// Binary mask, 1 = tampered pixel. Canonically 128x128.
class TamperMask {
public:
    TamperMask() = default;
    TamperMask(int width, int height) : width_(width), height_(height) {
        if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "mask dimensions must be >= 1");
        bits_.assign(static_cast<std::size_t>(width) * height, 0);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    std::uint8_t at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x]; }
    void set(int x, int y, bool on) { bits_[static_cast<std::size_t>(y) * width_ + x] = on ? 1 : 0; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits_) n += b;
        return n;
    }
    bool same_shape(const TamperMask& o) const noexcept { return width_ == o.width_ && height_ == o.height_; }

    /// 0 / 255 grayscale raster.
    RasterImage to_image() const {
        RasterImage img(width_, height_, 1);
        auto d = img.data();
        for (std::size_t i = 0; i < bits_.size(); ++i) d[i] = bits_[i] ? 255 : 0;
        return img;
    }

    /// Binarizes a raster: a pixel is set when its (first channel) value / 255 >= threshold.
    static TamperMask from_image(const RasterImage& img, double threshold = 0.5) {
        const RasterImage gray = to_grayscale(img);
        TamperMask m(img.width(), img.height());
        auto d = gray.data();
        for (std::size_t i = 0; i < d.size(); ++i) m.bits_[i] = d[i] >= threshold * 255.0 ? 1 : 0;
        return m;
    }

    /// Resamples to w x h bilinearly and re-binarizes at 0.5.
    TamperMask resized(int w, int h) const {
        if (w == width_ && h == height_) return *this;
        return from_image(resize_bilinear(to_image(), w, h));
    }

    friend bool operator==(const TamperMask&, const TamperMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

inline TamperMask empty_mask(int width = kMaskSide, int height = kMaskSide) { return TamperMask(width, height); }

struct LocalizeConfig {
    JpegQuality ela_quality{90};
    std::optional<int> fixed_threshold;  // unset = Otsu
    int morph_radius = 1;
    int min_component_area = 16;

    void validate() const {
        if (fixed_threshold && (*fixed_threshold < 0 || *fixed_threshold > 255))
            throw Error(ErrorCode::InvalidArgument, "fixed threshold must be in [0, 255]");
        if (morph_radius < 0 || min_component_area < 0)
            throw Error(ErrorCode::InvalidArgument, "morphology radius and component area must be >= 0");
    }
};

// ---------------------------------------------------------------------------
// Thresholding
// ---------------------------------------------------------------------------

/// Between-class variance up to the constant factor 1/N^2, for threshold t where class 0 is <= t.
/// Zero when either class is empty. Shared by the scan below and its test oracle.
inline double otsu_between_class(std::int64_t total, std::int64_t total_sum, std::int64_t n0, std::int64_t sum0) {
    const std::int64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) return 0.0;
    const double d = static_cast<double>(total * sum0 - n0 * total_sum);
    return d * d / (static_cast<double>(n0) * static_cast<double>(n1));
}

/// Otsu threshold over the 256-bin histogram; smallest t wins ties. Foreground is value > t.
/// Images with fewer than two distinct values return their maximum, so the foreground is empty.
inline int otsu_threshold(const RasterImage& gray) {
    if (gray.channels() != 1) throw Error(ErrorCode::InvalidArgument, "otsu_threshold expects a 1-channel raster");
    std::array<std::int64_t, 256> hist{};
    for (auto v : gray.data()) ++hist[v];
    std::int64_t total = 0, total_sum = 0;
    int peak = 0;
    for (int v = 0; v < 256; ++v) {
        total += hist[v];
        total_sum += hist[v] * v;
        if (hist[v] > 0) peak = v;
    }
    int best_t = peak;
    double best = 0.0;
    std::int64_t n0 = 0, sum0 = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += hist[t];
        sum0 += hist[t] * t;
        const double score = otsu_between_class(total, total_sum, n0, sum0);
        if (score > best) {
            best = score;
            best_t = t;
        }
    }
    return best_t;
}

// ---------------------------------------------------------------------------
// Morphology and components
// ---------------------------------------------------------------------------

namespace detail {

// Square structuring element of side 2r+1. Pixels outside the canvas are ignored.
inline TamperMask morph(const TamperMask& in, int r, bool dilate) {
    if (r == 0) return in;
    const int w = in.width(), h = in.height();
    // separable: rows then columns
    TamperMask tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool acc = !dilate;
            for (int d = std::max(0, x - r); d <= std::min(w - 1, x + r); ++d)
                acc = dilate ? (acc || in.at(d, y)) : (acc && in.at(d, y));
            tmp.set(x, y, acc);
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool acc = !dilate;
            for (int d = std::max(0, y - r); d <= std::min(h - 1, y + r); ++d)
                acc = dilate ? (acc || tmp.at(x, d)) : (acc && tmp.at(x, d));
            out.set(x, y, acc);
        }
    return out;
}

}  // namespace detail

inline TamperMask erode(const TamperMask& m, int radius) { return detail::morph(m, radius, false); }
inline TamperMask dilate(const TamperMask& m, int radius) { return detail::morph(m, radius, true); }
inline TamperMask morph_open(const TamperMask& m, int radius) { return dilate(erode(m, radius), radius); }
inline TamperMask morph_close(const TamperMask& m, int radius) { return erode(dilate(m, radius), radius); }

/// Clears 8-connected components with fewer than min_area pixels.
inline TamperMask remove_small_components(const TamperMask& m, int min_area) {
    const int w = m.width(), h = m.height();
    TamperMask out = m;
    std::vector<std::uint8_t> seen(m.size(), 0);
    std::vector<int> stack, component;
    for (int start = 0; start < static_cast<int>(m.size()); ++start) {
        if (!m.bits()[start] || seen[start]) continue;
        component.clear();
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            component.push_back(p);
            const int px = p % w, py = p / w;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = px + dx, ny = py + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const int q = ny * w + nx;
                    if (m.bits()[q] && !seen[q]) {
                        seen[q] = 1;
                        stack.push_back(q);
                    }
                }
        }
        if (static_cast<int>(component.size()) < min_area)
            for (int p : component) out.set(p % w, p / w, false);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prediction and metrics
// ---------------------------------------------------------------------------

/// ELA heatmap baseline: auto-max ELA, grayscale, 128x128, threshold (> t), open, close,
/// then drop small 8-connected components.
inline TamperMask predict_mask(const RasterImage& img, const LocalizeConfig& cfg = {}) {
    cfg.validate();
    const ElaConfig ela{cfg.ela_quality, ElaGain::auto_max(), 32};
    const RasterImage heat = resize_bilinear(to_grayscale(compute_ela(img, ela)), kMaskSide, kMaskSide);
    const int t = cfg.fixed_threshold ? *cfg.fixed_threshold : otsu_threshold(heat);
    TamperMask mask(kMaskSide, kMaskSide);
    for (int y = 0; y < kMaskSide; ++y)
        for (int x = 0; x < kMaskSide; ++x) mask.set(x, y, heat.at(x, y) > t);
    mask = morph_close(morph_open(mask, cfg.morph_radius), cfg.morph_radius);
    return remove_small_components(mask, cfg.min_component_area);
}

namespace detail {

struct Overlap {
    std::size_t both = 0, pred = 0, truth = 0;
};

inline Overlap overlap(const TamperMask& pred, const TamperMask& gt) {
    if (!pred.same_shape(gt)) throw Error(ErrorCode::ShapeMismatch, "masks differ in dimensions");
    Overlap o;
    auto a = pred.bits(), b = gt.bits();
    for (std::size_t i = 0; i < a.size(); ++i) {
        o.both += a[i] & b[i];
        o.pred += a[i];
        o.truth += b[i];
    }
    return o;
}

}  // namespace detail

/// |pred & gt| / |pred | gt|; 1.0 when both are empty.
inline double mask_iou(const TamperMask& pred, const TamperMask& gt) {
    const auto o = detail::overlap(pred, gt);
    const std::size_t uni = o.pred + o.truth - o.both;
    return uni == 0 ? 1.0 : static_cast<double>(o.both) / static_cast<double>(uni);
}

/// 2|pred & gt| / (|pred| + |gt|); 1.0 when both are empty.
inline double mask_pixel_f1(const TamperMask& pred, const TamperMask& gt) {
    const auto o = detail::overlap(pred, gt);
    const std::size_t denom = o.pred + o.truth;
    return denom == 0 ? 1.0 : 2.0 * static_cast<double>(o.both) / static_cast<double>(denom);
}

}  // namespace forgery
