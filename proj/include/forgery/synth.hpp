#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "forgery/codec.hpp"
#include "forgery/dataset.hpp"
#include "forgery/error.hpp"
#include "forgery/imaging.hpp"
#include "forgery/random.hpp"

namespace forgery {

// ---------------------------------------------------------------------------
// Procedural scenes
// ---------------------------------------------------------------------------

/// Deterministic synthetic photograph stand-in: a colour gradient, a handful of flat and shaded
/// shapes, and a scene-specific grain (smooth value noise plus sensor-like white noise).
inline RasterImage procedural_scene(int width, int height, std::uint64_t seed) {
    Rng rng(seed);
    auto color = [&] {
        return std::array<double, 3>{rng.uniform(20, 235), rng.uniform(20, 235), rng.uniform(20, 235)};
    };
    std::vector<double> plane(static_cast<std::size_t>(width) * height * 3);
    auto px = [&](int x, int y, int c) -> double& { return plane[(static_cast<std::size_t>(y) * width + x) * 3 + c]; };

    const auto c0 = color(), c1 = color();
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double gx = std::cos(angle), gy = std::sin(angle);
    const double span = std::abs(gx) * width + std::abs(gy) * height;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double t = std::clamp(((x - width / 2.0) * gx + (y - height / 2.0) * gy) / span + 0.5, 0.0, 1.0);
            for (int c = 0; c < 3; ++c) px(x, y, c) = c0[c] * (1 - t) + c1[c] * t;
        }

    // rotated ellipses with a one-pixel soft edge and a vertical shading ramp
    const int shapes = static_cast<int>(rng.uniform_int(3, 8));
    for (int s = 0; s < shapes; ++s) {
        const double cx = rng.uniform(0, width), cy = rng.uniform(0, height);
        const double rx = rng.uniform(0.05, 0.35) * width, ry = rng.uniform(0.05, 0.35) * height;
        const double rot = rng.uniform(0.0, std::numbers::pi);
        const double cr = std::cos(rot), sr = std::sin(rot);
        const auto fill = color();
        const double shade = rng.uniform(-0.4, 0.4);
        const double reach = std::max(rx, ry) + 2.0;
        for (int y = std::max(0, static_cast<int>(cy - reach)); y < std::min(height, static_cast<int>(cy + reach) + 1); ++y)
            for (int x = std::max(0, static_cast<int>(cx - reach)); x < std::min(width, static_cast<int>(cx + reach) + 1); ++x) {
                const double u = ((x - cx) * cr + (y - cy) * sr) / rx;
                const double v = (-(x - cx) * sr + (y - cy) * cr) / ry;
                // signed distance to the boundary, approximately in pixels
                const double dist = (1.0 - std::sqrt(u * u + v * v)) * std::min(rx, ry);
                const double alpha = std::clamp(dist + 0.5, 0.0, 1.0);
                if (alpha <= 0.0) continue;
                const double k = 1.0 + shade * v;
                for (int c = 0; c < 3; ++c) px(x, y, c) = px(x, y, c) * (1 - alpha) + fill[c] * k * alpha;
            }
    }

    // grain: value noise on a coarse lattice, bilinearly upsampled, plus white noise
    const int cell = static_cast<int>(rng.uniform_int(2, 16));
    const double smooth_amp = rng.uniform(0.0, 16.0);
    const double white_amp = rng.uniform(0.0, 8.0);
    const int lw = width / cell + 2, lh = height / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(lw) * lh);
    for (auto& v : lattice) v = rng.uniform(-1.0, 1.0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double fx = static_cast<double>(x) / cell, fy = static_cast<double>(y) / cell;
            const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
            const double tx = fx - ix, ty = fy - iy;
            auto L = [&](int a, int b) { return lattice[static_cast<std::size_t>(b) * lw + a]; };
            const double n = (L(ix, iy) * (1 - tx) + L(ix + 1, iy) * tx) * (1 - ty) + (L(ix, iy + 1) * (1 - tx) + L(ix + 1, iy + 1) * tx) * ty;
            // grain is shared by the three channels: luma noise only
            const double grain = smooth_amp * n + white_amp * rng.uniform(-1.0, 1.0);
            for (int c = 0; c < 3; ++c) px(x, y, c) += grain;
        }

    RasterImage out(width, height, 3);
    auto d = out.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = to_u8(plane[i]);
    return out;
}

/// `count` scenes seeded seed, seed+1, ...; each is passed through one JPEG round trip at
/// camera_quality (0 skips it) so the sources carry a camera-like compression history.
inline std::vector<RasterImage> procedural_sources(int count, std::uint64_t seed, int camera_quality = 50,
                                                   int width = 384, int height = 256) {
    std::vector<RasterImage> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        RasterImage img = procedural_scene(width, height, seed + static_cast<std::uint64_t>(i));
        if (camera_quality > 0) img = decode_image(encode_jpeg(img, JpegQuality(camera_quality)));
        out.push_back(std::move(img));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus synthesis
// ---------------------------------------------------------------------------

struct SynthOptions {
    int count = 20;            // tampered images; the same number of authentic crops is emitted
    int crop = 128;            // side of the square crops taken from the sources
    int output_quality = 95;   // all Au/ and Tp/ images are saved as JPEG at this quality
    ForgeryParams forgery{};   // patch sizes and seam blur; forgery.seed seeds the whole run
};

namespace detail {

struct CropPick {
    std::size_t source = 0;
    int x = 0, y = 0, side = 0;
};

// JPEG-grid-aligned square crop so that authentic crops keep the source's 8x8 block phase.
inline CropPick pick_crop(Rng& rng, const std::vector<RasterImage>& sources, const std::vector<std::size_t>& usable, int crop) {
    CropPick p;
    p.source = usable[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(usable.size()) - 1))];
    const auto& img = sources[p.source];
    p.side = std::min({crop, img.width(), img.height()});
    p.x = static_cast<int>(rng.uniform_int(0, (img.width() - p.side) / 8)) * 8;
    p.y = static_cast<int>(rng.uniform_int(0, (img.height() - p.side) / 8)) * 8;
    return p;
}

inline std::string numbered(const char* prefix, int i, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%05d%s", prefix, i, suffix);
    return buf;
}

}  // namespace detail

/// Writes Au/ (authentic crops), Tp/ (first half copy-move, second half splice), masks/ and
/// manifest.csv under out_root. Fully determined by the sources and options.
inline CorpusIndex synthesize_corpus(const std::vector<RasterImage>& sources, const SynthOptions& opt, const fs::path& out_root) {
    if (opt.count < 0) throw Error(ErrorCode::InvalidArgument, "count must be >= 0");
    if (opt.crop < 8) throw Error(ErrorCode::InvalidArgument, "crop must be >= 8");
    const JpegQuality quality(opt.output_quality);
    if (sources.empty()) throw Error(ErrorCode::ImageTooSmall, "no source images");
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const int side = std::min({opt.crop, sources[i].width(), sources[i].height()});
        if (opt.forgery.patch_max <= side / 2) usable.push_back(i);
    }
    if (usable.empty()) throw Error(ErrorCode::ImageTooSmall, "every source is too small for the requested patch size");

    fs::create_directories(out_root / "Au");
    fs::create_directories(out_root / "Tp");
    fs::create_directories(out_root / "masks");
    CorpusIndex index{out_root, {}, 0};
    Rng rng(opt.forgery.seed);
    const int copy_moves = opt.count - opt.count / 2;

    for (int i = 0; i < opt.count; ++i) {
        const auto au = detail::pick_crop(rng, sources, usable, opt.crop);
        const RasterImage au_img = crop(sources[au.source], au.x, au.y, au.side, au.side);
        const std::string au_name = detail::numbered("Au/au_", i, ".jpg");
        write_file(out_root / au_name, encode_jpeg(au_img, quality));
        index.records.push_back({au_name, 0, std::nullopt, "real", {}});
    }
    for (int i = 0; i < opt.count; ++i) {
        const bool copy_move = i < copy_moves;
        const auto base = detail::pick_crop(rng, sources, usable, opt.crop);
        const RasterImage base_img = crop(sources[base.source], base.x, base.y, base.side, base.side);
        ForgeryParams fp = opt.forgery;
        fp.seed = rng.next();
        ForgeryResult forged;
        if (copy_move) {
            forged = synth_copy_move(base_img, fp);
        } else {
            auto donor = detail::pick_crop(rng, sources, usable, opt.crop);
            // prefer a different source so the splice really imports foreign content
            for (int attempt = 0; attempt < 8 && usable.size() > 1 && donor.source == base.source; ++attempt)
                donor = detail::pick_crop(rng, sources, usable, opt.crop);
            const RasterImage donor_img = crop(sources[donor.source], donor.x, donor.y, donor.side, donor.side);
            forged = synth_splice(base_img, donor_img, fp);
        }
        const std::string tp_name = detail::numbered("Tp/tp_", i, ".jpg");
        const std::string mask_name = detail::numbered("masks/tp_", i, "_gt.png");
        write_file(out_root / tp_name, encode_jpeg(forged.image, quality));
        write_file(out_root / mask_name, encode_png(forged.mask.to_image(), true));
        index.records.push_back({tp_name, 1, mask_name, copy_move ? "synth-copy-move" : "synth-splice", {}});
    }
    sort_records(index.records);
    write_manifest(index, out_root / "manifest.csv");
    return index;
}

}  // namespace forgery
