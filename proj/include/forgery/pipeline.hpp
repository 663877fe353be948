#pragma once

#include <string>
#include <variant>

#include "forgery/classify.hpp"
#include "forgery/ela.hpp"
#include "forgery/error.hpp"
#include "forgery/features.hpp"
#include "forgery/imaging.hpp"

namespace forgery {

enum class FeatureKind { Ela, DctLbp };
enum class ClassifierKind { Svm, Mlp };

/// A detection pipeline: which features feed which classifier.
/// Identified on the command line and in model files as ela-svm, ela-mlp, dctlbp-svm or dctlbp-mlp.
struct PipelineSpec {
    FeatureKind features = FeatureKind::DctLbp;
    ClassifierKind classifier = ClassifierKind::Mlp;
    ElaConfig ela = ElaConfig::for_features();
    DctLbpConfig dct{};

    std::string id() const {
        return std::string(features == FeatureKind::Ela ? "ela" : "dctlbp") + "-" +
               (classifier == ClassifierKind::Svm ? "svm" : "mlp");
    }

    static PipelineSpec parse(const std::string& id) {
        PipelineSpec spec;
        if (id == "ela-svm" || id == "ela-mlp") spec.features = FeatureKind::Ela;
        else if (id == "dctlbp-svm" || id == "dctlbp-mlp") spec.features = FeatureKind::DctLbp;
        else throw Error(ErrorCode::InvalidArgument, "unknown pipeline '" + id + "'");
        spec.classifier = id.ends_with("-svm") ? ClassifierKind::Svm : ClassifierKind::Mlp;
        return spec;
    }
};

inline FeatureVector extract_features(const RasterImage& img, const PipelineSpec& spec) {
    FeatureVector v = spec.features == FeatureKind::Ela ? ela_feature_vector(img, spec.ela) : dct_lbp_features(img, spec.dct);
    v.pipeline_id = spec.id();
    return v;
}

using Classifier = std::variant<LinearSvmModel, MlpModel>;

/// Everything needed to score a raw image: pipeline, fitted scaling, trained parameters.
struct DetectorModel {
    PipelineSpec pipeline;
    ScalingParams scaling;
    Classifier classifier;

    std::size_t dim() const {
        return std::visit([](const auto& m) { return m.dim(); }, classifier);
    }

    Prediction predict_scaled(std::span<const double> scaled) const {
        if (scaled.size() != dim()) throw Error(ErrorCode::DimMismatch, "feature length differs from model dimension");
        if (const auto* svm = std::get_if<LinearSvmModel>(&classifier)) return svm_predict(*svm, scaled);
        return mlp_predict(std::get<MlpModel>(classifier), scaled);
    }

    Prediction predict(const RasterImage& img) const {
        const FeatureVector raw = extract_features(img, pipeline);
        if (raw.size() != scaling.min.size())
            throw Error(ErrorCode::DimMismatch, "extracted features do not match the model's scaling length");
        return predict_scaled(apply_scaling(raw, scaling).values);
    }
};

inline Classifier train_classifier(ClassifierKind kind, std::span<const LabeledSample> train, const TrainConfig& cfg) {
    if (kind == ClassifierKind::Svm) return svm_train(train, cfg);
    return mlp_train(train, cfg);
}

}  // namespace forgery
