#include <gtest/gtest.h>

#include <fstream>
#include <opencv2/imgcodecs.hpp>
#include <set>
#include <sstream>

#include "forgery/codec.hpp"
#include "forgery/dataset.hpp"
#include "forgery/synth.hpp"
#include "support.hpp"

using namespace forgery;
using testing_support::random_image;
using testing_support::TempDir;

namespace {

void write_jpeg(const fs::path& p, const RasterImage& img) {
    fs::create_directories(p.parent_path());
    write_file(p, encode_jpeg(img, JpegQuality(95)));
}

void write_tiff(const fs::path& p, const RasterImage& img) {
    fs::create_directories(p.parent_path());
    cv::Mat gray(img.height(), img.width(), CV_8UC1, const_cast<std::uint8_t*>(img.data().data()));
    std::vector<std::uint8_t> bytes;
    ASSERT_TRUE(cv::imencode(".tiff", gray, bytes));
    write_file(p, bytes);
}

CorpusIndex toy_corpus(int authentic, int tampered) {
    CorpusIndex c;
    for (int i = 0; i < authentic; ++i) c.records.push_back({"Au/a" + std::to_string(100 + i) + ".jpg", 0, std::nullopt, "real", {}});
    for (int i = 0; i < tampered; ++i)
        c.records.push_back({"Tp/t" + std::to_string(100 + i) + ".jpg", 1, "masks/t" + std::to_string(100 + i) + "_gt.png", "real", {}});
    sort_records(c.records);
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::set<std::string> paths(const CorpusIndex& c) {
    std::set<std::string> s;
    for (const auto& r : c.records) s.insert(r.image_path);
    return s;
}

}  // namespace

TEST(ScanCorpus, LabelsAndMaskResolution) {
    TempDir dir("scan");
    Rng rng(61);
    write_jpeg(dir / "Au/a.jpg", random_image(rng, 16, 16, 3));
    write_tiff(dir / "Tp/t.tif", random_image(rng, 16, 16, 1));
    fs::create_directories(dir / "masks");
    write_file(dir / "masks/t_gt.png", encode_png(empty_mask(16, 16).to_image(), true));
    const CorpusIndex c = scan_corpus(dir.path());
    ASSERT_EQ(c.records.size(), 2u);
    EXPECT_EQ(c.records[0].image_path, "Au/a.jpg");
    EXPECT_EQ(c.records[0].label, 0);
    EXPECT_FALSE(c.records[0].mask_path);
    EXPECT_EQ(c.records[1].image_path, "Tp/t.tif");
    EXPECT_EQ(c.records[1].label, 1);
    EXPECT_EQ(c.records[1].mask_path, "masks/t_gt.png");
    EXPECT_EQ(c.unresolved_masks, 0u);
    const LoadedSample s = load_sample(c, c.records[1]);
    EXPECT_EQ(s.image.channels(), 1);
    EXPECT_EQ(s.mask->width(), 128);
    EXPECT_EQ(load_sample(c, c.records[0]).mask, empty_mask());
}

TEST(ScanCorpus, SortedAndUnresolvedMasksCounted) {
    TempDir dir("scan_sorted");
    Rng rng(62);
    for (const char* name : {"Tp/b.jpg", "Au/z.jpg", "Au/c.png", "Tp/a.jpg"}) write_jpeg(dir / name, random_image(rng, 8, 8, 3));
    write_file(dir / "Au/notes.txt", Bytes{'h', 'i'});
    const CorpusIndex c = scan_corpus(dir.path());
    ASSERT_EQ(c.records.size(), 4u);
    EXPECT_EQ(c.records[0].image_path, "Au/c.png");
    EXPECT_EQ(c.records[3].image_path, "Tp/b.jpg");
    EXPECT_EQ(c.unresolved_masks, 2u);
    for (const auto& r : c.records)
        if (r.label == 1) {
            EXPECT_FALSE(r.mask_path);
        }
    EXPECT_FALSE(load_sample(c, c.records[2]).mask);
}

TEST(ScanCorpus, SeparateMaskDirectory) {
    TempDir dir("scan_masks");
    Rng rng(63);
    write_jpeg(dir / "corpus/Tp/x.jpg", random_image(rng, 8, 8, 3));
    fs::create_directories(dir / "gt");
    write_file(dir / "gt/x_gt.png", encode_png(empty_mask(8, 8).to_image(), true));
    const CorpusIndex c = scan_corpus(dir / "corpus", dir / "gt");
    EXPECT_EQ(c.unresolved_masks, 0u);
    EXPECT_EQ(c.records[0].mask_path, "../gt/x_gt.png");
}

TEST(ScanCorpus, Errors) {
    TempDir dir("scan_err");
    try {
        scan_corpus(dir.path());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyCorpus);
    }
    try {
        scan_corpus(dir / "missing");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingRoot);
    }
}

TEST(Split, StratifiedArithmetic) {
    const auto [train, val] = split(toy_corpus(10, 10), 0.2, 1);
    EXPECT_EQ(val.count(0), 2u);
    EXPECT_EQ(val.count(1), 2u);
    EXPECT_EQ(train.count(0), 8u);
    EXPECT_EQ(train.count(1), 8u);
    const auto [t2, v2] = split(toy_corpus(7, 3), 0.2, 1);
    EXPECT_EQ(v2.count(0), 2u);  // ceil(1.4)
    EXPECT_EQ(v2.count(1), 1u);  // ceil(0.6)
}

TEST(Split, PartitionAndDeterminism) {
    Rng rng(64);
    for (int t = 0; t < 30; ++t) {
        const int a = static_cast<int>(rng.uniform_int(2, 40)), b = static_cast<int>(rng.uniform_int(2, 40));
        const double frac = rng.uniform(0.05, 0.5);
        const std::uint64_t seed = rng.next();
        const CorpusIndex c = toy_corpus(a, b);
        const auto [train, val] = split(c, frac, seed);
        const auto again = split(c, frac, seed);
        EXPECT_EQ(train.records, again.first.records);
        EXPECT_EQ(val.records, again.second.records);
        std::set<std::string> all = paths(train);
        for (const auto& p : paths(val)) EXPECT_TRUE(all.insert(p).second);
        EXPECT_EQ(all, paths(c));
        for (int label : {0, 1}) {
            const double n = static_cast<double>(c.count(label));
            EXPECT_EQ(static_cast<double>(val.count(label)), std::ceil(n * frac - 1e-12));
        }
        EXPECT_TRUE(std::is_sorted(val.records.begin(), val.records.end(),
                                   [](const auto& x, const auto& y) { return x.image_path < y.image_path; }));
    }
}

TEST(Split, SeedsChangeTheValidationSet) {
    const CorpusIndex c = toy_corpus(30, 30);
    EXPECT_NE(split(c, 0.2, 1).second.records, split(c, 0.2, 2).second.records);
}

TEST(Split, Errors) {
    try {
        split(toy_corpus(1, 5), 0.2, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateSplit);
    }
    EXPECT_THROW(split(toy_corpus(5, 5), 0.0, 1), Error);
    EXPECT_THROW(split(toy_corpus(5, 5), 1.0, 1), Error);
}

TEST(Augment, OneRecordPerSampleAndOp) {
    const CorpusIndex c = toy_corpus(3, 4);
    EXPECT_EQ(augment(c, {AugmentOp::FlipH}, 1).records.size(), 14u);
    const CorpusIndex many = augment(c, {AugmentOp::FlipH, AugmentOp::Rotate, AugmentOp::Shear}, 1);
    EXPECT_EQ(many.records.size(), 28u);
    EXPECT_EQ(many.count(1), 16u);
    EXPECT_EQ(augment(c, {AugmentOp::Rotate}, 5).records, augment(c, {AugmentOp::Rotate}, 5).records);
    for (const auto& r : many.records)
        if (!r.ops.empty()) {
            EXPECT_TRUE(r.provenance().starts_with("augmented("));
        }
    EXPECT_THROW(augment(c, {}, 1), Error);
}

TEST(Augment, FlipIsAnInvolution) {
    Rng rng(65);
    const RasterImage img = random_image(rng, 13, 9, 3);
    for (auto op : {SampleOp::flip_h(), SampleOp::flip_v()}) EXPECT_EQ(apply_op(apply_op(img, op), op), img);
}

TEST(Augment, RotatedMaskFollowsTheImage) {
    TempDir dir("aug");
    Rng rng(66);
    const RasterImage img = random_image(rng, 128, 128, 3);
    write_jpeg(dir / "Tp/t.jpg", img);
    TamperMask mask(128, 128);
    for (int y = 20; y < 60; ++y)
        for (int x = 70; x < 110; ++x) mask.set(x, y, true);
    fs::create_directories(dir / "masks");
    write_file(dir / "masks/t_gt.png", encode_png(mask.to_image(), true));
    const CorpusIndex aug = augment(scan_corpus(dir.path()), {AugmentOp::Rotate}, 3);
    ASSERT_EQ(aug.records.size(), 2u);
    const SampleRecord& rotated = aug.records[0].ops.empty() ? aug.records[1] : aug.records[0];
    const double deg = rotated.ops.at(0).amount;
    EXPECT_EQ(std::abs(deg), 15.0);
    const LoadedSample s = load_sample(aug, rotated);
    EXPECT_EQ(*s.mask, TamperMask::from_image(affine_warp(mask.to_image(), deg, 0.0), 0.5));
    EXPECT_EQ(s.image, affine_warp(load_image(dir / "Tp/t.jpg"), deg, 0.0));
    EXPECT_NE(*s.mask, mask);
}

TEST(Ablate, BlurAndGrayscale) {
    TempDir dir("ablate");
    write_jpeg(dir / "Au/a.jpg", RasterImage(32, 32, 3, std::uint8_t{128}));
    Rng rng(67);
    write_jpeg(dir / "Au/b.jpg", random_image(rng, 32, 32, 3));
    const CorpusIndex c = scan_corpus(dir.path());
    const CorpusIndex blurred = ablate(c, SampleOp::blur(3));
    EXPECT_EQ(blurred.records.size(), c.records.size());
    const RasterImage constant = load_sample(c, c.records[0]).image;
    EXPECT_EQ(load_sample(blurred, blurred.records[0]).image, constant);
    EXPECT_EQ(blurred.records[0].provenance(), "ablated(blur(3))");
    const CorpusIndex gray = ablate(c, SampleOp::grayscale());
    for (const auto& r : gray.records) {
        EXPECT_EQ(load_sample(gray, r).image.channels(), 1);
        EXPECT_EQ(r.label, 0);
    }
    EXPECT_THROW(ablate(c, SampleOp::blur(4)), Error);
    EXPECT_THROW(ablate(c, SampleOp::flip_h()), Error);
}

TEST(Manifest, RoundTripWithProvenance) {
    TempDir dir("manifest");
    CorpusIndex c = toy_corpus(2, 2);
    c.records[0].ops = {SampleOp::rotate(-15), SampleOp::blur(3)};
    c.records[1].ops = {SampleOp::rotate(15), SampleOp::shear(0.2), SampleOp::grayscale()};
    c.records[2].origin = "synth-splice";
    c.records[3].image_path = "Tp/with,comma.jpg";
    write_manifest(c, dir / "m.csv");
    const CorpusIndex back = read_manifest(dir / "m.csv", dir.path());
    EXPECT_EQ(back.records, c.records);
    EXPECT_EQ(slurp(dir / "m.csv").substr(0, 38), "image_path,label,mask_path,provenance\n");
    EXPECT_EQ(c.records[1].provenance(), "augmented(rotate(+15))+augmented(shear(0.2))+ablated(grayscale)");
}

TEST(SynthForgery, CopyMoveDiffersOnlyInsideDestination) {
    Rng rng(68);
    const RasterImage img = random_image(rng, 256, 256, 3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ForgeryParams p;
        p.seed = seed;
        const ForgeryResult a = synth_copy_move(img, p), b = synth_copy_move(img, p);
        EXPECT_EQ(a.image, b.image);
        EXPECT_EQ(a.mask, b.mask);
        EXPECT_EQ(a.rect.w, a.rect.h);
        EXPECT_GE(a.rect.w, 16);
        EXPECT_LE(a.rect.w, 48);
        std::size_t changed = 0;
        for (int y = 0; y < 256; ++y)
            for (int x = 0; x < 256; ++x) {
                bool diff = false;
                for (int c = 0; c < 3; ++c) diff |= img.at(x, y, c) != a.image.at(x, y, c);
                if (diff) {
                    ++changed;
                    EXPECT_TRUE(a.rect.contains(x, y));
                }
            }
        EXPECT_GT(changed, static_cast<std::size_t>(a.rect.w * a.rect.h * 9 / 10));
        // the 256 -> 128 mask halves each side
        EXPECT_NEAR(static_cast<double>(a.mask.count()), a.rect.w * a.rect.h / 4.0, 2.0 * a.rect.w);
    }
}

TEST(SynthForgery, SpliceAndSeamBlurStayInsideRect) {
    Rng rng(69);
    const RasterImage base = random_image(rng, 128, 96, 3), donor = random_image(rng, 100, 100, 1);
    ForgeryParams p;
    p.seed = 3;
    p.seam_blur = 3;
    const ForgeryResult f = synth_splice(base, donor, p);
    EXPECT_EQ(f.image.channels(), 3);
    for (int y = 0; y < 96; ++y)
        for (int x = 0; x < 128; ++x)
            if (!f.rect.contains(x, y)) {
                for (int c = 0; c < 3; ++c) EXPECT_EQ(f.image.at(x, y, c), base.at(x, y, c));
            }
    EXPECT_EQ(synth_splice(base, donor, p).image, f.image);
}

TEST(SynthForgery, ParameterErrors) {
    const RasterImage img(60, 60, 3);
    ForgeryParams p;
    try {
        synth_copy_move(img, p);  // patch_max 48 > 30
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ImageTooSmall);
    }
    p.patch_max = 20;
    p.patch_min = 3;
    EXPECT_THROW(synth_copy_move(img, p), Error);
    p.patch_min = 8;
    p.seam_blur = 4;
    EXPECT_THROW(synth_copy_move(img, p), Error);
}

TEST(SynthesizeCorpus, LayoutCountsAndDeterminism) {
    TempDir dir("synth");
    const auto sources = procedural_sources(3, 11, 50, 200, 160);
    SynthOptions opt;
    opt.count = 5;
    const CorpusIndex c = synthesize_corpus(sources, opt, dir / "a");
    EXPECT_EQ(c.count(0), 5u);
    EXPECT_EQ(c.count(1), 5u);
    std::size_t moves = 0;
    for (const auto& r : c.records) moves += r.origin == "synth-copy-move";
    EXPECT_EQ(moves, 3u);
    const CorpusIndex scanned = scan_corpus(dir / "a");
    EXPECT_EQ(scanned.records.size(), 10u);
    EXPECT_EQ(scanned.unresolved_masks, 0u);
    const LoadedSample s = load_sample(scanned, scanned.records.back());
    EXPECT_EQ(s.image.width(), 128);
    EXPECT_GT(s.mask->count(), 0u);

    synthesize_corpus(sources, opt, dir / "b");
    for (const auto& r : c.records) EXPECT_EQ(slurp(dir / "a" / r.image_path), slurp(dir / "b" / r.image_path));
    EXPECT_EQ(slurp(dir / "a/manifest.csv"), slurp(dir / "b/manifest.csv"));
    EXPECT_EQ(slurp(dir / "a/masks/tp_00004_gt.png"), slurp(dir / "b/masks/tp_00004_gt.png"));
}

TEST(SynthesizeCorpus, ZeroCountAndErrors) {
    TempDir dir("synth_zero");
    SynthOptions opt;
    opt.count = 0;
    synthesize_corpus(procedural_sources(1, 2, 0, 128, 128), opt, dir.path());
    EXPECT_EQ(slurp(dir / "manifest.csv"), std::string(kManifestHeader) + "\n");
    opt.count = 1;
    try {
        synthesize_corpus({RasterImage(40, 40, 3)}, opt, dir / "small");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ImageTooSmall);
    }
}

TEST(ProceduralSources, DeterministicAndSeedDependent) {
    const auto a = procedural_sources(2, 5, 50, 96, 64), b = procedural_sources(2, 5, 50, 96, 64);
    EXPECT_EQ(a, b);
    EXPECT_NE(a[0], a[1]);
    EXPECT_EQ(a[0].width(), 96);
    EXPECT_EQ(a[0].channels(), 3);
}
