// forgery: command-line front end for detection, localization and corpus synthesis.
//
// Exit codes: 0 ok, 1 bad arguments, 2 I/O, 3 decode, 4 corpus, 5 model, 6 mask, 7 synth.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forgery/forgery.hpp"

namespace fs = std::filesystem;
using namespace forgery;

namespace {

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::IoFailure:
        case ErrorCode::MissingRoot: return 2;
        case ErrorCode::UnsupportedFormat:
        case ErrorCode::CorruptStream: return 3;
        case ErrorCode::EmptyCorpus:
        case ErrorCode::DegenerateSplit:
        case ErrorCode::EmptySet:
        case ErrorCode::EmptyTrainingSet: return 4;
        case ErrorCode::FormatVersionMismatch:
        case ErrorCode::ChecksumMismatch:
        case ErrorCode::DimMismatch: return 5;
        case ErrorCode::ShapeMismatch: return 6;
        case ErrorCode::ImageTooSmall: return 7;
        default: return 1;
    }
}

std::string shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

CorpusIndex open_corpus(const fs::path& root, const std::string& masks) {
    return scan_corpus(root, masks.empty() ? std::nullopt : std::optional<fs::path>(masks));
}

struct Globals {
    std::uint64_t seed = 7;
    std::optional<int> quality;
    std::string out;
};

struct ElaArgs {
    std::string input;
};

int run_ela(const Globals& g, const ElaArgs& a) {
    const RasterImage img = load_image(a.input);
    ElaConfig cfg;
    cfg.quality = JpegQuality(g.quality.value_or(90));
    write_file(g.out, encode_png(compute_ela(img, cfg)));
    return 0;
}

struct ExtractArgs {
    std::string input;
    std::string pipeline = "dctlbp-mlp";
    std::string masks;
};

int run_extract(const Globals& g, const ExtractArgs& a) {
    PipelineSpec spec = PipelineSpec::parse(a.pipeline);
    if (g.quality) spec.ela.quality = JpegQuality(*g.quality);
    FeatureTable table;
    if (fs::is_directory(a.input)) {
        table = extract_corpus(open_corpus(a.input, a.masks), spec);
    } else {
        table.ids.push_back(fs::path(a.input).filename().string());
        table.features.push_back(extract_features(load_image(a.input), spec));
    }
    std::ostringstream os;
    os << "id";
    const std::size_t dim = table.features.empty() ? 0 : table.features.front().size();
    for (std::size_t i = 0; i < dim; ++i) os << ",c" << i;
    os << "\n";
    for (std::size_t r = 0; r < table.features.size(); ++r) {
        os << csv::escape(table.ids[r]);
        for (double v : table.features[r].values) os << "," << shortest(v);
        os << "\n";
    }
    if (g.out.empty()) std::cout << os.str();
    else write_text(g.out, os.str());
    return 0;
}

struct TrainArgs {
    std::string corpus;
    std::string pipeline = "dctlbp-mlp";
    std::string ablation = "none";
    std::vector<std::string> augment;
    std::string masks;
    std::string report;
    double val_fraction = 0.2;
    std::optional<int> epochs, hidden;
    std::optional<double> lr, lambda;
};

AugmentOp parse_augment(const std::string& s) {
    if (s == "flip_h") return AugmentOp::FlipH;
    if (s == "flip_v") return AugmentOp::FlipV;
    if (s == "rotate") return AugmentOp::Rotate;
    if (s == "shear") return AugmentOp::Shear;
    throw Error(ErrorCode::InvalidArgument, "unknown augmentation '" + s + "'");
}

int run_train(const Globals& g, const TrainArgs& a) {
    PipelineSpec spec = PipelineSpec::parse(a.pipeline);
    if (g.quality) spec.ela.quality = JpegQuality(*g.quality);
    const Ablation ablation = parse_ablation(a.ablation);
    TrainConfig cfg = default_train_config(spec.classifier, g.seed);
    if (a.epochs) cfg.epochs = *a.epochs;
    if (a.hidden) cfg.hidden_dim = *a.hidden;
    if (a.lr) cfg.learning_rate = *a.lr;
    if (a.lambda) cfg.lambda = *a.lambda;
    cfg.validate();
    std::vector<AugmentOp> ops;
    for (const auto& s : a.augment) ops.push_back(parse_augment(s));

    const CorpusIndex corpus = apply_ablation(open_corpus(a.corpus, a.masks), ablation, g.seed);
    auto [train_idx, val_idx] = split(corpus, a.val_fraction, g.seed);
    if (!ops.empty()) train_idx = augment(train_idx, ops, g.seed);
    const FeatureTable train = extract_corpus(train_idx, spec);
    const FeatureTable val = extract_corpus(val_idx, spec);
    const DetectorModel model = train_detector(train, spec, cfg);
    const EvalReport tr = evaluate_table(model, train, a.ablation);
    const EvalReport va = evaluate_table(model, val, a.ablation);

    save_model(model, g.out);
    if (!a.report.empty()) {
        const std::vector<EvalReport> reports{va};
        report_csv(reports, a.report);
    }
    std::cout << "split," << kReportHeader << "\n";
    std::cout << "train," << report_row(tr) << "\n";
    std::cout << "val," << report_row(va) << "\n";
    return 0;
}

struct PredictArgs {
    std::string model;
    std::string image;
};

int run_predict(const Globals&, const PredictArgs& a) {
    const DetectorModel model = load_model(a.model);
    const RasterImage img = load_image(a.image);
    const Prediction p = model.predict(img);
    std::cout << "label,score\n" << p.label << "," << shortest(p.score) << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string model;
    std::string corpus;
    std::string ablation = "none";
    std::string subset = "all";
    std::string masks;
    double val_fraction = 0.2;
};

int run_evaluate(const Globals& g, const EvaluateArgs& a) {
    const DetectorModel model = load_model(a.model);
    const Ablation ablation = parse_ablation(a.ablation);
    CorpusIndex corpus = apply_ablation(open_corpus(a.corpus, a.masks), ablation, g.seed);
    if (a.subset != "all") {
        auto [train_idx, val_idx] = split(corpus, a.val_fraction, g.seed);
        corpus = a.subset == "val" ? std::move(val_idx) : std::move(train_idx);
    }
    const EvalReport report = evaluate_table(model, extract_corpus(corpus, model.pipeline), a.ablation);
    const std::vector<EvalReport> reports{report};
    if (g.out.empty()) {
        std::cout << report_csv_text(reports);
    } else {
        report_csv(reports, g.out);
        print_table(std::cout, reports);
    }
    return 0;
}

struct LocalizeArgs {
    std::string image;
    std::string gt;
    std::optional<int> threshold;
    int radius = 1;
    int min_area = 16;
};

int run_localize(const Globals& g, const LocalizeArgs& a) {
    const RasterImage img = load_image(a.image);
    LocalizeConfig cfg;
    cfg.ela_quality = JpegQuality(g.quality.value_or(90));
    cfg.fixed_threshold = a.threshold;
    cfg.morph_radius = a.radius;
    cfg.min_component_area = a.min_area;
    const TamperMask pred = predict_mask(img, cfg);

    std::optional<TamperMask> gt;
    if (!a.gt.empty()) {
        TamperMask raw = TamperMask::from_image(load_image(a.gt));
        const bool canonical = raw.width() == kMaskSide && raw.height() == kMaskSide;
        const bool native = raw.width() == img.width() && raw.height() == img.height();
        if (!canonical && !native)
            throw Error(ErrorCode::ShapeMismatch, "ground-truth mask is neither 128x128 nor the size of the image");
        gt = raw.resized(kMaskSide, kMaskSide);
    }
    write_file(g.out, encode_png(pred.to_image(), true));
    if (gt) std::cout << "iou,f1\n" << shortest(mask_iou(pred, *gt)) << "," << shortest(mask_pixel_f1(pred, *gt)) << "\n";
    return 0;
}

struct SynthArgs {
    std::string sources;
    int procedural = 0;
    int camera_quality = 50;
    int count = 20;
    int crop = 128;
    int patch_min = 16;
    int patch_max = 48;
    std::optional<int> seam_blur;
};

int run_synth(const Globals& g, const SynthArgs& a) {
    std::vector<RasterImage> sources;
    if (a.procedural > 0) {
        sources = procedural_sources(a.procedural, g.seed, a.camera_quality);
    } else {
        if (!fs::is_directory(a.sources)) throw Error(ErrorCode::IoFailure, "source directory '" + a.sources + "' does not exist");
        std::vector<fs::path> files = detail::list_images(a.sources);
        std::sort(files.begin(), files.end());
        for (const auto& f : files) sources.push_back(load_image(f));
    }
    SynthOptions opt;
    opt.count = a.count;
    opt.crop = a.crop;
    opt.output_quality = g.quality.value_or(95);
    opt.forgery.patch_min = a.patch_min;
    opt.forgery.patch_max = a.patch_max;
    opt.forgery.seam_blur = a.seam_blur;
    opt.forgery.seed = g.seed;
    const CorpusIndex corpus = synthesize_corpus(sources, opt, g.out);
    std::cout << "authentic,tampered\n" << corpus.count(0) << "," << corpus.count(1) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Image forgery detection and localization"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Seed for splits, training and synthesis")->capture_default_str();
    app.add_option("--quality", g.quality, "JPEG quality: ELA recompression, or output quality for synth")
        ->check(CLI::Range(1, 100));
    app.add_option("--out", g.out, "Output file or directory");

    ElaArgs ela;
    auto* c_ela = app.add_subcommand("ela", "Write the error level analysis heatmap of an image as PNG");
    c_ela->add_option("image", ela.input)->required();
    c_ela->fallthrough();

    ExtractArgs ex;
    auto* c_ex = app.add_subcommand("extract", "Write feature vectors (image or corpus) as CSV");
    c_ex->add_option("input", ex.input, "Image file or corpus root")->required();
    c_ex->add_option("--pipeline", ex.pipeline)->capture_default_str();
    c_ex->add_option("--masks", ex.masks, "Mask directory (default <root>/masks)");
    c_ex->fallthrough();

    TrainArgs tr;
    auto* c_tr = app.add_subcommand("train", "Train a detector on a corpus and save the model file");
    c_tr->add_option("corpus", tr.corpus)->required();
    c_tr->add_option("--pipeline", tr.pipeline)->capture_default_str();
    c_tr->add_option("--ablation", tr.ablation, "none, blur, shear-rotate or grayscale")->capture_default_str();
    c_tr->add_option("--augment", tr.augment, "Training-side augmentation: flip_h, flip_v, rotate, shear")->delimiter(',');
    c_tr->add_option("--masks", tr.masks);
    c_tr->add_option("--report", tr.report, "Also write the validation report CSV here");
    c_tr->add_option("--val-fraction", tr.val_fraction)->capture_default_str();
    c_tr->add_option("--epochs", tr.epochs);
    c_tr->add_option("--hidden", tr.hidden);
    c_tr->add_option("--lr", tr.lr);
    c_tr->add_option("--lambda", tr.lambda);
    c_tr->fallthrough();

    PredictArgs pr;
    auto* c_pr = app.add_subcommand("predict", "Classify one image with a saved model");
    c_pr->add_option("model", pr.model)->required();
    c_pr->add_option("image", pr.image)->required();
    c_pr->fallthrough();

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "Score a saved model on a corpus and write the report CSV");
    c_ev->add_option("model", ev.model)->required();
    c_ev->add_option("corpus", ev.corpus)->required();
    c_ev->add_option("--ablation", ev.ablation)->capture_default_str();
    c_ev->add_option("--subset", ev.subset, "all, train or val (same split as train)")
        ->check(CLI::IsMember({"all", "train", "val"}))
        ->capture_default_str();
    c_ev->add_option("--val-fraction", ev.val_fraction)->capture_default_str();
    c_ev->add_option("--masks", ev.masks);
    c_ev->fallthrough();

    LocalizeArgs lo;
    auto* c_lo = app.add_subcommand("localize", "Predict a tamper mask; with --gt also print IoU and F1");
    c_lo->add_option("image", lo.image)->required();
    c_lo->add_option("--gt", lo.gt, "Ground-truth mask PNG");
    c_lo->add_option("--threshold", lo.threshold, "Fixed heatmap threshold (default Otsu)");
    c_lo->add_option("--radius", lo.radius)->capture_default_str();
    c_lo->add_option("--min-area", lo.min_area)->capture_default_str();
    c_lo->fallthrough();

    SynthArgs sy;
    auto* c_sy = app.add_subcommand("synth", "Synthesize a corpus of authentic crops and copy-move / splice forgeries");
    c_sy->add_option("sources", sy.sources, "Directory of source images");
    c_sy->add_option("--procedural", sy.procedural, "Use this many generated scenes instead of a source directory");
    c_sy->add_option("--camera-quality", sy.camera_quality, "JPEG history given to generated scenes")->capture_default_str();
    c_sy->add_option("--count", sy.count)->capture_default_str();
    c_sy->add_option("--crop", sy.crop)->capture_default_str();
    c_sy->add_option("--patch-min", sy.patch_min)->capture_default_str();
    c_sy->add_option("--patch-max", sy.patch_max)->capture_default_str();
    c_sy->add_option("--seam-blur", sy.seam_blur);
    c_sy->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        auto need_out = [&](const char* what) {
            if (g.out.empty()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs --out");
        };
        if (c_ela->parsed()) return need_out("ela"), run_ela(g, ela);
        if (c_ex->parsed()) return run_extract(g, ex);
        if (c_tr->parsed()) return need_out("train"), run_train(g, tr);
        if (c_pr->parsed()) return run_predict(g, pr);
        if (c_ev->parsed()) return run_evaluate(g, ev);
        if (c_lo->parsed()) return need_out("localize"), run_localize(g, lo);
        if (c_sy->parsed()) {
            need_out("synth");
            if (sy.sources.empty() && sy.procedural <= 0)
                throw Error(ErrorCode::InvalidArgument, "synth needs a source directory or --procedural N");
            return run_synth(g, sy);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
