#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forgery/classify.hpp"
#include "forgery/dataset.hpp"
#include "forgery/error.hpp"
#include "forgery/eval.hpp"
#include "forgery/pipeline.hpp"
#include "forgery/random.hpp"

namespace forgery {

enum class Ablation { None, Blur, ShearRotate, Grayscale };

inline std::string ablation_name(Ablation a) {
    switch (a) {
        case Ablation::None: return "none";
        case Ablation::Blur: return "blur";
        case Ablation::ShearRotate: return "shear-rotate";
        case Ablation::Grayscale: return "grayscale";
    }
    return "none";
}

inline Ablation parse_ablation(const std::string& name) {
    for (Ablation a : {Ablation::None, Ablation::Blur, Ablation::ShearRotate, Ablation::Grayscale})
        if (ablation_name(a) == name) return a;
    throw Error(ErrorCode::InvalidArgument, "unknown ablation '" + name + "'");
}

/// Corpus-wide perturbation: blur(3), grayscale, or rotate(+/-15, drawn per record) followed by shear(0.2).
inline CorpusIndex apply_ablation(const CorpusIndex& corpus, Ablation a, std::uint64_t seed) {
    switch (a) {
        case Ablation::None: return corpus;
        case Ablation::Blur: return ablate(corpus, SampleOp::blur(3));
        case Ablation::Grayscale: return ablate(corpus, SampleOp::grayscale());
        case Ablation::ShearRotate: {
            CorpusIndex out = corpus;
            Rng rng(seed);
            for (auto& r : out.records) {
                r.ops.push_back(SampleOp::rotate(rng.uniform_int(0, 1) ? 15.0 : -15.0));
                r.ops.push_back(SampleOp::shear(0.2));
            }
            return out;
        }
    }
    return corpus;
}

/// Per-record features in corpus order.
struct FeatureTable {
    std::vector<std::string> ids;
    std::vector<FeatureVector> features;
    std::vector<int> labels;
};

inline FeatureTable extract_corpus(const CorpusIndex& corpus, const PipelineSpec& spec) {
    FeatureTable t;
    for (const auto& r : corpus.records) {
        const LoadedSample s = load_sample(corpus, r);
        t.ids.push_back(r.ops.empty() ? r.image_path : r.image_path + "#" + r.provenance());
        t.features.push_back(extract_features(s.image, spec));
        t.labels.push_back(r.label);
    }
    return t;
}

/// Fits scaling on the training features only, then trains the classifier on the scaled vectors.
inline DetectorModel train_detector(const FeatureTable& train, const PipelineSpec& spec, const TrainConfig& cfg) {
    DetectorModel model;
    model.pipeline = spec;
    model.scaling = fit_scaling(train.features);
    std::vector<LabeledSample> samples;
    samples.reserve(train.features.size());
    for (std::size_t i = 0; i < train.features.size(); ++i)
        samples.push_back({apply_scaling(train.features[i], model.scaling).values, train.labels[i]});
    model.classifier = train_classifier(spec.classifier, samples, cfg);
    return model;
}

inline std::vector<Prediction> predict_table(const DetectorModel& model, const FeatureTable& table) {
    std::vector<Prediction> out;
    out.reserve(table.features.size());
    for (const auto& f : table.features) out.push_back(model.predict_scaled(apply_scaling(f, model.scaling).values));
    return out;
}

inline EvalReport evaluate_table(const DetectorModel& model, const FeatureTable& table, const std::string& ablation = "none") {
    std::vector<int> preds;
    for (const auto& p : predict_table(model, table)) preds.push_back(p.label);
    EvalReport r = scores(confusion(preds, table.labels));
    r.pipeline_id = model.pipeline.id();
    r.ablation = ablation;
    return r;
}

/// Sensible per-classifier defaults for desk-scale corpora.
inline TrainConfig default_train_config(ClassifierKind kind, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.seed = seed;
    if (kind == ClassifierKind::Svm) {
        cfg.epochs = 200;
        cfg.learning_rate = 0.01;
        cfg.lambda = 1e-3;
    } else {
        cfg.epochs = 200;
        cfg.learning_rate = 0.01;
        cfg.lambda = 0.0;
        cfg.hidden_dim = 64;
    }
    return cfg;
}

struct TrainOutcome {
    DetectorModel model;
    EvalReport train_report;
    EvalReport val_report;
};

/// Stratified split, extraction, training and evaluation on both sides of the split.
inline TrainOutcome run_training(const CorpusIndex& corpus, const PipelineSpec& spec, const TrainConfig& cfg,
                                 double val_fraction, std::uint64_t split_seed, const std::string& ablation = "none") {
    const auto [train_idx, val_idx] = split(corpus, val_fraction, split_seed);
    const FeatureTable train = extract_corpus(train_idx, spec);
    const FeatureTable val = extract_corpus(val_idx, spec);
    TrainOutcome out;
    out.model = train_detector(train, spec, cfg);
    out.train_report = evaluate_table(out.model, train, ablation);
    out.val_report = evaluate_table(out.model, val, ablation);
    return out;
}

}  // namespace forgery
