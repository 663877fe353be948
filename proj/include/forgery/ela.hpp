#pragma once

#include <algorithm>
#include <cstdint>

#include "forgery/codec.hpp"
#include "forgery/error.hpp"
#include "forgery/features.hpp"
#include "forgery/imaging.hpp"

namespace forgery {

/// How the raw recompression difference is stretched.
struct ElaGain {
    enum class Mode { AutoMax, Fixed };
    Mode mode = Mode::AutoMax;
    double factor = 10.0;

    static ElaGain auto_max() { return {Mode::AutoMax, 0.0}; }
    static ElaGain fixed(double g) {
        if (!(g > 0.0 && g <= 64.0)) throw Error(ErrorCode::InvalidArgument, "fixed ELA gain must be in (0, 64]");
        return {Mode::Fixed, g};
    }
};

struct ElaConfig {
    JpegQuality quality{90};
    ElaGain gain = ElaGain::auto_max();
    int feature_grid = 32;

    /// Fixed gain keeps magnitudes comparable between images, which classifiers need.
    static ElaConfig for_features(int quality = 90) {
        return ElaConfig{JpegQuality(quality), ElaGain::fixed(10.0), 32};
    }
};

/// Error level heatmap: |img - jpeg(img)| amplified per cfg.gain. Same shape as the input.
inline RasterImage compute_ela(const RasterImage& img, const ElaConfig& cfg = {}) {
    const RasterImage recompressed = decode_image(encode_jpeg(img, cfg.quality));
    if (!recompressed.same_shape(img)) throw Error(ErrorCode::CorruptStream, "JPEG roundtrip changed the raster shape");
    RasterImage diff = abs_diff(img, recompressed);
    auto samples = diff.data();

    if (cfg.gain.mode == ElaGain::Mode::AutoMax) {
        const std::uint8_t peak = samples.empty() ? 0 : *std::max_element(samples.begin(), samples.end());
        if (peak == 0) return diff;
        const double scale = 255.0 / peak;
        for (auto& s : samples) s = to_u8(s * scale);
    } else {
        for (auto& s : samples) s = to_u8(s * cfg.gain.factor);
    }
    return diff;
}

/// Grayscale heatmap resized to feature_grid^2, flattened row-major, divided by 255.
inline FeatureVector ela_feature_vector(const RasterImage& img, const ElaConfig& cfg = ElaConfig::for_features()) {
    if (cfg.feature_grid < 1) throw Error(ErrorCode::InvalidArgument, "feature grid must be >= 1");
    const RasterImage grid = resize_bilinear(to_grayscale(compute_ela(img, cfg)), cfg.feature_grid, cfg.feature_grid);
    FeatureVector out{std::vector<double>(grid.size()), "ela"};
    auto samples = grid.data();
    for (std::size_t i = 0; i < samples.size(); ++i) out.values[i] = samples[i] / 255.0;
    return out;
}

}  // namespace forgery
