#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <zlib.h>

#include "forgery/error.hpp"
#include "forgery/pipeline.hpp"

namespace forgery {

// Model files are JSON documents:
//
//   {
//     "format": "forgery-detector",
//     "format_version": 1,
//     "pipeline_id": "dctlbp-mlp",
//     "pipeline": { ...feature extractor settings... },
//     "model_kind": "mlp" | "svm",
//     "dimensions": { "input": N, "hidden": H },
//     "scaling": { "min": [...], "max": [...] },
//     "parameters": { ...arrays in row-major order... },
//     "checksum": <CRC-32 of the little-endian IEEE-754 bytes of every number in
//                  scaling.min, scaling.max and the parameter arrays, in that order>
//   }
//
// Numbers are written in shortest round-trip form, which reproduces every double bit-exactly.

inline constexpr const char* kModelMagic = "forgery-detector";
inline constexpr int kModelFormatVersion = 1;

namespace detail {

class Crc32 {
public:
    void add(double v) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        unsigned char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
        crc_ = ::crc32(crc_, bytes, 8);
    }
    void add(std::span<const double> values) {
        for (double v : values) add(v);
    }
    std::uint32_t value() const { return static_cast<std::uint32_t>(crc_); }

private:
    uLong crc_ = ::crc32(0L, Z_NULL, 0);
};

inline std::uint32_t model_checksum(const DetectorModel& m) {
    Crc32 crc;
    crc.add(m.scaling.min);
    crc.add(m.scaling.max);
    if (const auto* svm = std::get_if<LinearSvmModel>(&m.classifier)) {
        crc.add(svm->weights);
        crc.add(svm->bias);
        crc.add(svm->lambda);
    } else {
        const auto& mlp = std::get<MlpModel>(m.classifier);
        crc.add(mlp.hidden_weights);
        crc.add(mlp.hidden_bias);
        crc.add(mlp.output_weights);
        crc.add(mlp.output_bias);
        crc.add(mlp.lambda);
    }
    return crc.value();
}

inline nlohmann::json pipeline_to_json(const PipelineSpec& p) {
    nlohmann::json j;
    if (p.features == FeatureKind::Ela) {
        j["ela_quality"] = p.ela.quality.value();
        j["ela_gain"] = p.ela.gain.mode == ElaGain::Mode::AutoMax ? 0.0 : p.ela.gain.factor;
        j["feature_grid"] = p.ela.feature_grid;
    } else {
        j["canvas"] = p.dct.canvas;
        j["block"] = p.dct.block;
        j["channel"] = p.dct.channel == DctChannel::Luminance ? "luminance" : "chroma-red";
    }
    return j;
}

inline PipelineSpec pipeline_from_json(const std::string& id, const nlohmann::json& j) {
    PipelineSpec p = PipelineSpec::parse(id);
    if (p.features == FeatureKind::Ela) {
        const double gain = j.at("ela_gain").get<double>();
        p.ela = ElaConfig{JpegQuality(j.at("ela_quality").get<int>()), gain > 0.0 ? ElaGain::fixed(gain) : ElaGain::auto_max(),
                          j.at("feature_grid").get<int>()};
    } else {
        p.dct.canvas = j.at("canvas").get<int>();
        p.dct.block = j.at("block").get<int>();
        p.dct.channel = j.at("channel").get<std::string>() == "chroma-red" ? DctChannel::ChromaRed : DctChannel::Luminance;
        p.dct.validate();
    }
    return p;
}

}  // namespace detail

inline std::string serialize_model(const DetectorModel& m) {
    nlohmann::ordered_json j;
    j["format"] = kModelMagic;
    j["format_version"] = kModelFormatVersion;
    j["pipeline_id"] = m.pipeline.id();
    j["pipeline"] = detail::pipeline_to_json(m.pipeline);
    j["scaling"] = {{"min", m.scaling.min}, {"max", m.scaling.max}};
    if (const auto* svm = std::get_if<LinearSvmModel>(&m.classifier)) {
        j["model_kind"] = "svm";
        j["dimensions"] = {{"input", svm->dim()}};
        j["parameters"] = {{"weights", svm->weights}, {"bias", svm->bias}, {"lambda", svm->lambda}};
    } else {
        const auto& mlp = std::get<MlpModel>(m.classifier);
        j["model_kind"] = "mlp";
        j["dimensions"] = {{"input", mlp.input_dim}, {"hidden", mlp.hidden_dim}};
        j["parameters"] = {{"hidden_weights", mlp.hidden_weights},
                           {"hidden_bias", mlp.hidden_bias},
                           {"output_weights", mlp.output_weights},
                           {"output_bias", mlp.output_bias},
                           {"lambda", mlp.lambda}};
    }
    j["checksum"] = detail::model_checksum(m);
    return j.dump(1) + "\n";
}

inline DetectorModel deserialize_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ChecksumMismatch, std::string("model file is truncated or corrupt: ") + e.what());
    }
    if (!j.is_object() || j.value("format", std::string{}) != kModelMagic)
        throw Error(ErrorCode::FormatVersionMismatch, "not a forgery detector model file");
    if (j.value("format_version", -1) != kModelFormatVersion)
        throw Error(ErrorCode::FormatVersionMismatch, "unsupported model format version");

    DetectorModel m;
    try {
        m.pipeline = detail::pipeline_from_json(j.at("pipeline_id").get<std::string>(), j.at("pipeline"));
        m.scaling.min = j.at("scaling").at("min").get<std::vector<double>>();
        m.scaling.max = j.at("scaling").at("max").get<std::vector<double>>();
        const auto& p = j.at("parameters");
        const std::string kind = j.at("model_kind").get<std::string>();
        if (kind == "svm") {
            LinearSvmModel svm{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>(),
                               p.at("lambda").get<double>()};
            if (svm.dim() != j.at("dimensions").at("input").get<std::size_t>())
                throw Error(ErrorCode::DimMismatch, "SVM weight count disagrees with declared dimension");
            m.classifier = std::move(svm);
        } else if (kind == "mlp") {
            MlpModel mlp;
            mlp.input_dim = j.at("dimensions").at("input").get<int>();
            mlp.hidden_dim = j.at("dimensions").at("hidden").get<int>();
            mlp.hidden_weights = p.at("hidden_weights").get<std::vector<double>>();
            mlp.hidden_bias = p.at("hidden_bias").get<std::vector<double>>();
            mlp.output_weights = p.at("output_weights").get<std::vector<double>>();
            mlp.output_bias = p.at("output_bias").get<double>();
            mlp.lambda = p.at("lambda").get<double>();
            if (mlp.hidden_weights.size() != static_cast<std::size_t>(mlp.input_dim) * mlp.hidden_dim ||
                mlp.hidden_bias.size() != static_cast<std::size_t>(mlp.hidden_dim) ||
                mlp.output_weights.size() != static_cast<std::size_t>(mlp.hidden_dim))
                throw Error(ErrorCode::DimMismatch, "MLP parameter arrays disagree with declared dimensions");
            m.classifier = std::move(mlp);
        } else {
            throw Error(ErrorCode::FormatVersionMismatch, "unknown model_kind '" + kind + "'");
        }
        if (m.scaling.min.size() != m.dim() || m.scaling.max.size() != m.dim())
            throw Error(ErrorCode::DimMismatch, "scaling length disagrees with model dimension");
        if (j.at("checksum").get<std::uint32_t>() != detail::model_checksum(m))
            throw Error(ErrorCode::ChecksumMismatch, "parameter checksum does not match");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ChecksumMismatch, std::string("model file is missing fields: ") + e.what());
    }
    return m;
}

inline void save_model(const DetectorModel& m, const std::filesystem::path& path) {
    const std::string text = serialize_model(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

inline DetectorModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

}  // namespace forgery
