#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "forgery/codec.hpp"
#include "forgery/csv.hpp"
#include "forgery/error.hpp"
#include "forgery/imaging.hpp"
#include "forgery/localize.hpp"
#include "forgery/random.hpp"

namespace forgery {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

/// A transform applied lazily when a record is loaded. Geometric ops also move the mask.
struct SampleOp {
    enum class Kind { FlipH, FlipV, Rotate, Shear, Blur, Grayscale };
    Kind kind = Kind::FlipH;
    double amount = 0.0;  // degrees, shear ratio, or blur window

    static SampleOp flip_h() { return {Kind::FlipH, 0.0}; }
    static SampleOp flip_v() { return {Kind::FlipV, 0.0}; }
    static SampleOp rotate(double deg) { return {Kind::Rotate, deg}; }
    static SampleOp shear(double ratio) { return {Kind::Shear, ratio}; }
    static SampleOp blur(int k) { return {Kind::Blur, static_cast<double>(k)}; }
    static SampleOp grayscale() { return {Kind::Grayscale, 0.0}; }

    bool geometric() const noexcept { return kind != Kind::Blur && kind != Kind::Grayscale; }

    std::string name() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::FlipH: return "flip_h";
            case Kind::FlipV: return "flip_v";
            case Kind::Rotate: os << "rotate(" << std::showpos << amount << ")"; return os.str();
            case Kind::Shear: os << "shear(" << amount << ")"; return os.str();
            case Kind::Blur: os << "blur(" << static_cast<int>(amount) << ")"; return os.str();
            case Kind::Grayscale: return "grayscale";
        }
        return "?";
    }

    /// augmented(...) for geometric ops, ablated(...) for photometric ones.
    std::string tag() const { return (geometric() ? "augmented(" : "ablated(") + name() + ")"; }

    static SampleOp parse_tag(const std::string& tag) {
        auto inner = [&](const std::string& prefix) -> std::optional<std::string> {
            if (tag.size() > prefix.size() + 1 && tag.starts_with(prefix) && tag.back() == ')')
                return tag.substr(prefix.size(), tag.size() - prefix.size() - 1);
            return std::nullopt;
        };
        auto body = inner("augmented(");
        if (!body) body = inner("ablated(");
        if (!body) throw Error(ErrorCode::InvalidArgument, "unknown provenance tag '" + tag + "'");
        const std::string& b = *body;
        auto arg = [&](const std::string& prefix) { return std::stod(b.substr(prefix.size(), b.size() - prefix.size() - 1)); };
        if (b == "flip_h") return flip_h();
        if (b == "flip_v") return flip_v();
        if (b == "grayscale") return grayscale();
        if (b.starts_with("rotate(")) return rotate(arg("rotate("));
        if (b.starts_with("shear(")) return shear(arg("shear("));
        if (b.starts_with("blur(")) return blur(static_cast<int>(arg("blur(")));
        throw Error(ErrorCode::InvalidArgument, "unknown provenance tag '" + tag + "'");
    }

    friend bool operator==(const SampleOp&, const SampleOp&) = default;
};

struct SampleRecord {
    std::string image_path;  // relative to the corpus root
    int label = 0;           // 0 authentic, 1 tampered
    std::optional<std::string> mask_path;
    std::string origin = "real";  // real | synth-copy-move | synth-splice
    std::vector<SampleOp> ops;

    std::string provenance() const {
        if (ops.empty()) return origin;
        std::string out;
        for (const auto& op : ops) out += (out.empty() ? "" : "+") + op.tag();
        return out;
    }

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct CorpusIndex {
    fs::path root;
    std::vector<SampleRecord> records;
    std::size_t unresolved_masks = 0;

    std::size_t count(int label) const {
        return static_cast<std::size_t>(
            std::count_if(records.begin(), records.end(), [&](const SampleRecord& r) { return r.label == label; }));
    }
};

inline void sort_records(std::vector<SampleRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const SampleRecord& a, const SampleRecord& b) {
        if (a.image_path != b.image_path) return a.image_path < b.image_path;
        return a.provenance() < b.provenance();
    });
}

// ---------------------------------------------------------------------------
// Scanning and loading
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".tif" || ext == ".tiff" || ext == ".bmp";
}

inline std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && is_image_file(entry.path())) out.push_back(entry.path());
    return out;
}

}  // namespace detail

/// Au/ images are authentic, Tp/ images tampered; the mask of Tp/<name>.<ext> is <masks_dir>/<name>_gt.png.
/// Tampered images without a mask are kept with mask_path unset and counted in unresolved_masks.
inline CorpusIndex scan_corpus(const fs::path& root, std::optional<fs::path> masks_dir = std::nullopt) {
    if (!fs::is_directory(root)) throw Error(ErrorCode::MissingRoot, "corpus root '" + root.string() + "' does not exist");
    const fs::path masks = masks_dir.value_or(root / "masks");
    CorpusIndex index{root, {}, 0};
    for (const auto& p : detail::list_images(root / "Au"))
        index.records.push_back({fs::relative(p, root).generic_string(), 0, std::nullopt, "real", {}});
    for (const auto& p : detail::list_images(root / "Tp")) {
        SampleRecord r{fs::relative(p, root).generic_string(), 1, std::nullopt, "real", {}};
        const fs::path mask = masks / (p.stem().string() + "_gt.png");
        if (fs::is_regular_file(mask))
            r.mask_path = fs::relative(mask, root).generic_string();
        else
            ++index.unresolved_masks;
        index.records.push_back(std::move(r));
    }
    if (index.records.empty()) throw Error(ErrorCode::EmptyCorpus, "no Au/ or Tp/ images under " + root.string());
    sort_records(index.records);
    return index;
}

struct LoadedSample {
    RasterImage image;
    std::optional<TamperMask> mask;  // 128x128; empty for authentic samples, unset if unresolved
};

inline RasterImage apply_op(const RasterImage& img, const SampleOp& op) {
    switch (op.kind) {
        case SampleOp::Kind::FlipH: return flip(img, FlipAxis::Horizontal);
        case SampleOp::Kind::FlipV: return flip(img, FlipAxis::Vertical);
        case SampleOp::Kind::Rotate: return affine_warp(img, op.amount, 0.0);
        case SampleOp::Kind::Shear: return affine_warp(img, 0.0, op.amount);
        case SampleOp::Kind::Blur: return box_blur(img, static_cast<int>(op.amount));
        case SampleOp::Kind::Grayscale: return to_grayscale(img);
    }
    return img;
}

/// Geometric ops move the mask with the image; the warped mask is re-binarized at 0.5.
inline TamperMask apply_op(const TamperMask& mask, const SampleOp& op) {
    if (!op.geometric()) return mask;
    return TamperMask::from_image(apply_op(mask.to_image(), op), 0.5);
}

inline TamperMask load_mask(const fs::path& path) {
    return TamperMask::from_image(load_image(path)).resized(kMaskSide, kMaskSide);
}

inline LoadedSample load_sample(const CorpusIndex& corpus, const SampleRecord& record) {
    LoadedSample s{load_image(corpus.root / record.image_path), std::nullopt};
    if (record.label == 0) s.mask = empty_mask();
    else if (record.mask_path) s.mask = load_mask(corpus.root / *record.mask_path);
    for (const auto& op : record.ops) {
        s.image = apply_op(s.image, op);
        if (s.mask) s.mask = apply_op(*s.mask, op);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Synthetic forgeries
// ---------------------------------------------------------------------------

struct ForgeryParams {
    int patch_min = 16;
    int patch_max = 48;
    std::optional<int> seam_blur;  // box-blur window over a 2-pixel band inside the pasted rect
    std::uint64_t seed = 0;
};

struct Rect {
    int x = 0, y = 0, w = 0, h = 0;

    bool overlaps(const Rect& o) const { return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h; }
    bool contains(int px, int py) const { return px >= x && py >= y && px < x + w && py < y + h; }
    std::size_t area() const { return static_cast<std::size_t>(w) * h; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

struct ForgeryResult {
    RasterImage image;
    TamperMask mask;  // 128x128
    Rect rect;        // pasted region in image coordinates
};

namespace detail {

inline void check_forgery_params(const ForgeryParams& p, int w, int h) {
    if (p.patch_min < 4 || p.patch_min > p.patch_max)
        throw Error(ErrorCode::InvalidArgument, "patch sizes must satisfy 4 <= patch_min <= patch_max");
    if (p.patch_max > std::min(w, h) / 2)
        throw Error(ErrorCode::ImageTooSmall, "image too small for patch_max (needs patch_max <= min(dims)/2)");
    if (p.seam_blur && (*p.seam_blur < 3 || *p.seam_blur % 2 == 0))
        throw Error(ErrorCode::InvalidKernel, "seam blur window must be odd and >= 3");
}

inline TamperMask rect_mask(const Rect& r, int w, int h) {
    TamperMask full(w, h);
    for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x) full.set(x, y, true);
    return full.resized(kMaskSide, kMaskSide);
}

inline void paste(RasterImage& dst, const RasterImage& src, const Rect& from, const Rect& to) {
    const int ch = dst.channels();
    for (int y = 0; y < to.h; ++y)
        for (int x = 0; x < to.w; ++x)
            for (int c = 0; c < ch; ++c) dst.at(to.x + x, to.y + y, c) = src.at(from.x + x, from.y + y, c);
}

inline void blur_seam(RasterImage& img, const Rect& r, int k) {
    const RasterImage blurred = box_blur(img, k);
    constexpr int band = 2;
    for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x) {
            const int edge = std::min({x - r.x, y - r.y, r.x + r.w - 1 - x, r.y + r.h - 1 - y});
            if (edge >= band) continue;
            for (int c = 0; c < img.channels(); ++c) img.at(x, y, c) = blurred.at(x, y, c);
        }
}

inline Rect random_rect(Rng& rng, int side, int w, int h) {
    return {static_cast<int>(rng.uniform_int(0, w - side)), static_cast<int>(rng.uniform_int(0, h - side)), side, side};
}

}  // namespace detail

/// Copies a seeded square patch to a non-overlapping seeded destination within the same image.
inline ForgeryResult synth_copy_move(const RasterImage& img, const ForgeryParams& p) {
    const int w = img.width(), h = img.height();
    detail::check_forgery_params(p, w, h);
    Rng rng(p.seed);
    const int side = static_cast<int>(rng.uniform_int(p.patch_min, p.patch_max));
    const Rect from = detail::random_rect(rng, side, w, h);
    Rect to = detail::random_rect(rng, side, w, h);
    for (int attempt = 0; attempt < 64 && to.overlaps(from); ++attempt) to = detail::random_rect(rng, side, w, h);
    if (to.overlaps(from)) {
        // side <= min(w, h)/2 guarantees the diagonally opposite corner is free
        to.x = from.x + side <= w - side ? w - side : 0;
        to.y = from.y + side <= h - side ? h - side : 0;
        if (to.overlaps(from)) to.x = from.x >= side ? 0 : w - side;
    }

    ForgeryResult out{img, {}, to};
    detail::paste(out.image, img, from, to);
    if (p.seam_blur) detail::blur_seam(out.image, to, *p.seam_blur);
    out.mask = detail::rect_mask(to, w, h);
    return out;
}

/// Pastes a seeded square crop of the donor into the base at a seeded location.
inline ForgeryResult synth_splice(const RasterImage& base, const RasterImage& donor, const ForgeryParams& p) {
    detail::check_forgery_params(p, base.width(), base.height());
    detail::check_forgery_params(p, donor.width(), donor.height());
    const RasterImage patch_src = base.channels() == donor.channels()
                                      ? donor
                                      : (base.channels() == 3 ? to_rgb(donor) : to_grayscale(donor));
    Rng rng(p.seed);
    const int side = static_cast<int>(rng.uniform_int(p.patch_min, p.patch_max));
    const Rect from = detail::random_rect(rng, side, donor.width(), donor.height());
    const Rect to = detail::random_rect(rng, side, base.width(), base.height());

    ForgeryResult out{base, {}, to};
    detail::paste(out.image, patch_src, from, to);
    if (p.seam_blur) detail::blur_seam(out.image, to, *p.seam_blur);
    out.mask = detail::rect_mask(to, base.width(), base.height());
    return out;
}

// ---------------------------------------------------------------------------
// Splitting, augmentation, ablation
// ---------------------------------------------------------------------------

/// Stratified split: each class is shuffled with the seeded generator (class 0 first) and its first
/// ceil(n * val_fraction) records go to validation. Both outputs are sorted.
inline std::pair<CorpusIndex, CorpusIndex> split(const CorpusIndex& corpus, double val_fraction, std::uint64_t seed) {
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "validation fraction must be in (0, 1)");
    CorpusIndex train{corpus.root, {}, 0}, val{corpus.root, {}, 0};
    Rng rng(seed);
    for (int label : {0, 1}) {
        std::vector<SampleRecord> cls;
        for (const auto& r : corpus.records)
            if (r.label == label) cls.push_back(r);
        const auto n_val = static_cast<std::size_t>(std::ceil(static_cast<double>(cls.size()) * val_fraction - 1e-12));
        if (cls.size() <= n_val)
            throw Error(ErrorCode::DegenerateSplit, "class " + std::to_string(label) + " would have no training samples");
        rng.shuffle(cls);
        val.records.insert(val.records.end(), cls.begin(), cls.begin() + static_cast<std::ptrdiff_t>(n_val));
        train.records.insert(train.records.end(), cls.begin() + static_cast<std::ptrdiff_t>(n_val), cls.end());
    }
    sort_records(train.records);
    sort_records(val.records);
    return {std::move(train), std::move(val)};
}

enum class AugmentOp { FlipH, FlipV, Rotate, Shear };

/// Appends one transformed copy of every record per op. Rotation direction (+/-15 degrees) is drawn
/// per record from the seeded generator; shear uses ratio 0.2.
inline CorpusIndex augment(const CorpusIndex& corpus, const std::vector<AugmentOp>& ops, std::uint64_t seed) {
    if (ops.empty()) throw Error(ErrorCode::InvalidArgument, "augment needs at least one op");
    CorpusIndex out = corpus;
    Rng rng(seed);
    for (const auto& r : corpus.records)
        for (AugmentOp op : ops) {
            SampleRecord copy = r;
            switch (op) {
                case AugmentOp::FlipH: copy.ops.push_back(SampleOp::flip_h()); break;
                case AugmentOp::FlipV: copy.ops.push_back(SampleOp::flip_v()); break;
                case AugmentOp::Rotate: copy.ops.push_back(SampleOp::rotate(rng.uniform_int(0, 1) ? 15.0 : -15.0)); break;
                case AugmentOp::Shear: copy.ops.push_back(SampleOp::shear(0.2)); break;
            }
            out.records.push_back(std::move(copy));
        }
    sort_records(out.records);
    return out;
}

/// Replaces every image by its ablated version (blur or channel reduction); labels and masks unchanged.
inline CorpusIndex ablate(const CorpusIndex& corpus, const SampleOp& op) {
    if (op.geometric()) throw Error(ErrorCode::InvalidArgument, "ablation must be blur or grayscale");
    if (op.kind == SampleOp::Kind::Blur) {
        const int k = static_cast<int>(op.amount);
        if (k < 3 || k % 2 == 0) throw Error(ErrorCode::InvalidKernel, "blur window must be odd and >= 3");
    }
    CorpusIndex out = corpus;
    for (auto& r : out.records) r.ops.push_back(op);
    return out;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

inline constexpr const char* kManifestHeader = "image_path,label,mask_path,provenance";

inline std::string manifest_csv(const CorpusIndex& corpus) {
    std::string out = std::string(kManifestHeader) + "\n";
    for (const auto& r : corpus.records)
        out += csv::escape(r.image_path) + "," + std::to_string(r.label) + "," + csv::escape(r.mask_path.value_or("")) + "," +
               csv::escape(r.provenance()) + "\n";
    return out;
}

inline void write_manifest(const CorpusIndex& corpus, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out << manifest_csv(corpus);
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

inline CorpusIndex read_manifest(const fs::path& path, const fs::path& root) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    CorpusIndex corpus{root, {}, 0};
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 4) throw Error(ErrorCode::CorruptStream, "malformed manifest row: " + line);
        SampleRecord r{f[0], std::stoi(f[1]), std::nullopt, "real", {}};
        if (!f[2].empty()) r.mask_path = f[2];
        if (f[3].starts_with("synth-") || f[3] == "real") {
            r.origin = f[3];
        } else {
            std::size_t start = 0;
            while (start <= f[3].size()) {
                const auto end = f[3].find('+', start);
                // '+' also appears as a sign inside rotate(+15); only split after a closing paren
                std::size_t cut = end;
                while (cut != std::string::npos && (cut == 0 || f[3][cut - 1] != ')')) cut = f[3].find('+', cut + 1);
                r.ops.push_back(SampleOp::parse_tag(f[3].substr(start, cut == std::string::npos ? std::string::npos : cut - start)));
                if (cut == std::string::npos) break;
                start = cut + 1;
            }
        }
        if (r.label == 1 && !r.mask_path) ++corpus.unresolved_masks;
        corpus.records.push_back(std::move(r));
    }
    sort_records(corpus.records);
    return corpus;
}

}  // namespace forgery
