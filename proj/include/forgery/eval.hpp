#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "forgery/csv.hpp"
#include "forgery/error.hpp"

namespace forgery {

/// Class 1 (tampered) is the positive class.
struct ConfusionMatrix {
    std::size_t tn = 0, fp = 0, fn = 0, tp = 0;

    std::size_t total() const noexcept { return tn + fp + fn + tp; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct EvalReport {
    double accuracy = 0.0;
    double f_class0 = 0.0;
    double f_class1 = 0.0;
    double weighted_f = 0.0;
    std::size_t support0 = 0, support1 = 0;
    std::string pipeline_id;
    std::string ablation = "none";
};

inline ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth) {
    if (preds.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "predictions and labels differ in length");
    if (preds.empty()) throw Error(ErrorCode::EmptySet, "no predictions to score");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool p = preds[i] == 1, t = truth[i] == 1;
        if (p && t) ++cm.tp;
        else if (p) ++cm.fp;
        else if (t) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

namespace detail {

// F1 = 2TP / (2TP + FP + FN); zero when the class is neither present nor predicted.
inline double f1(std::size_t hits, std::size_t false_pos, std::size_t false_neg) {
    const std::size_t denom = 2 * hits + false_pos + false_neg;
    return denom == 0 || hits == 0 ? 0.0 : 2.0 * static_cast<double>(hits) / static_cast<double>(denom);
}

}  // namespace detail

/// Accuracy, per-class F1 and the support-weighted F1.
inline EvalReport scores(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw Error(ErrorCode::EmptySet, "confusion matrix is empty");
    EvalReport r;
    const double n = static_cast<double>(cm.total());
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / n;
    r.f_class1 = detail::f1(cm.tp, cm.fp, cm.fn);
    r.f_class0 = detail::f1(cm.tn, cm.fn, cm.fp);
    r.support0 = cm.tn + cm.fp;
    r.support1 = cm.tp + cm.fn;
    r.weighted_f = (static_cast<double>(r.support0) * r.f_class0 + static_cast<double>(r.support1) * r.f_class1) / n;
    return r;
}

inline constexpr const char* kReportHeader = "pipeline,ablation,accuracy,f0,f1,weighted,support0,support1";

inline std::string report_row(const EvalReport& r) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.4f,%zu,%zu", r.accuracy, r.f_class0, r.f_class1, r.weighted_f, r.support0,
                  r.support1);
    return csv::escape(r.pipeline_id) + "," + csv::escape(r.ablation) + "," + buf;
}

inline std::string report_csv_text(std::span<const EvalReport> reports) {
    std::string out = std::string(kReportHeader) + "\n";
    for (const auto& r : reports) out += report_row(r) + "\n";
    return out;
}

inline void report_csv(std::span<const EvalReport> reports, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out << report_csv_text(reports);
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

inline std::vector<EvalReport> parse_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::vector<EvalReport> reports;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 8) throw Error(ErrorCode::CorruptStream, "malformed report row: " + line);
        EvalReport r;
        r.pipeline_id = f[0];
        r.ablation = f[1];
        r.accuracy = std::stod(f[2]);
        r.f_class0 = std::stod(f[3]);
        r.f_class1 = std::stod(f[4]);
        r.weighted_f = std::stod(f[5]);
        r.support0 = std::stoul(f[6]);
        r.support1 = std::stoul(f[7]);
        reports.push_back(std::move(r));
    }
    return reports;
}

/// Fixed-width table with the Accuracy / F-Score 0 / F-Score 1 / Weighted Score columns.
inline void print_table(std::ostream& os, std::span<const EvalReport> reports) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s %-14s %8s %9s %9s %9s\n", "Model", "Ablation", "Accuracy", "F-Score 0", "F-Score 1",
                  "Weighted");
    os << buf;
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%-14s %-14s %8.2f %9.2f %9.2f %9.2f\n", r.pipeline_id.c_str(), r.ablation.c_str(),
                      r.accuracy, r.f_class0, r.f_class1, r.weighted_f);
        os << buf;
    }
}

}  // namespace forgery
