#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "forgery/eval.hpp"
#include "forgery/random.hpp"
#include "support.hpp"

using namespace forgery;
using testing_support::TempDir;

namespace {

std::vector<int> random_labels(Rng& rng, std::size_t n) {
    std::vector<int> v(n);
    for (auto& x : v) x = static_cast<int>(rng.uniform_int(0, 1));
    return v;
}

std::vector<int> swapped(std::vector<int> v) {
    for (auto& x : v) x = 1 - x;
    return v;
}

EvalReport score(const std::vector<int>& p, const std::vector<int>& t) { return scores(confusion(p, t)); }

}  // namespace

TEST(Confusion, Examples) {
    EXPECT_EQ(confusion(std::vector{0, 1, 0, 1}, std::vector{0, 1, 0, 1}), (ConfusionMatrix{2, 0, 0, 2}));
    EXPECT_EQ(confusion(std::vector{1, 1, 1, 1, 1}, std::vector{0, 0, 0, 0, 0}).fp, 5u);
    EXPECT_EQ(confusion(std::vector{1, 0, 1}, std::vector{1, 1, 0}), (ConfusionMatrix{0, 1, 1, 1}));
}

TEST(Confusion, Errors) {
    try {
        confusion(std::vector{1, 0}, std::vector{1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
    }
    try {
        confusion(std::vector<int>{}, std::vector<int>{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptySet);
    }
}

TEST(Scores, HandComputedExample) {
    const EvalReport r = scores(ConfusionMatrix{45, 5, 10, 40});
    EXPECT_NEAR(r.accuracy, 0.85, 1e-12);
    EXPECT_NEAR(r.f_class1, 80.0 / 95.0, 1e-12);
    EXPECT_NEAR(r.f_class0, 90.0 / 105.0, 1e-12);
    EXPECT_NEAR(r.f_class1, 0.842, 1e-3);
    EXPECT_NEAR(r.f_class0, 0.857, 1e-3);
    EXPECT_EQ(r.support0, 50u);
    EXPECT_EQ(r.support1, 50u);
    EXPECT_NEAR(r.weighted_f, 0.5 * (80.0 / 95.0 + 90.0 / 105.0), 1e-12);
}

TEST(Scores, PerfectAndDegenerate) {
    const EvalReport perfect = scores(ConfusionMatrix{50, 0, 0, 50});
    EXPECT_EQ(perfect.accuracy, 1.0);
    EXPECT_EQ(perfect.f_class0, 1.0);
    EXPECT_EQ(perfect.f_class1, 1.0);
    EXPECT_EQ(perfect.weighted_f, 1.0);
    const EvalReport none = scores(ConfusionMatrix{7, 0, 0, 0});
    EXPECT_EQ(none.accuracy, 1.0);
    EXPECT_EQ(none.f_class1, 0.0);
    EXPECT_EQ(none.f_class0, 1.0);
    EXPECT_THROW(scores(ConfusionMatrix{}), Error);
}

TEST(Scores, LabelSwapSymmetry) {
    Rng rng(71);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 60));
        const auto p = random_labels(rng, n), truth = random_labels(rng, n);
        const EvalReport a = score(p, truth), b = score(swapped(p), swapped(truth));
        EXPECT_DOUBLE_EQ(a.accuracy, b.accuracy);
        EXPECT_DOUBLE_EQ(a.f_class0, b.f_class1);
        EXPECT_DOUBLE_EQ(a.f_class1, b.f_class0);
        EXPECT_DOUBLE_EQ(a.weighted_f, b.weighted_f);
    }
}

TEST(Scores, JointPermutationInvariantAndBounded) {
    Rng rng(72);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 40));
        auto p = random_labels(rng, n), truth = random_labels(rng, n);
        const EvalReport a = score(p, truth);
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(order);
        std::vector<int> p2, t2;
        for (auto i : order) {
            p2.push_back(p[i]);
            t2.push_back(truth[i]);
        }
        const EvalReport b = score(p2, t2);
        EXPECT_EQ(a.accuracy, b.accuracy);
        EXPECT_EQ(a.f_class0, b.f_class0);
        EXPECT_EQ(a.f_class1, b.f_class1);
        EXPECT_EQ(a.weighted_f, b.weighted_f);
        for (double v : {a.accuracy, a.f_class0, a.f_class1, a.weighted_f}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        EXPECT_GE(a.weighted_f, std::min(a.f_class0, a.f_class1) - 1e-15);
        EXPECT_LE(a.weighted_f, std::max(a.f_class0, a.f_class1) + 1e-15);
    }
}

TEST(ReportCsv, HeaderOnlyAndRoundTrip) {
    TempDir dir("report");
    report_csv({}, dir / "empty.csv");
    std::ifstream in(dir / "empty.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), std::string(kReportHeader) + "\n");

    EvalReport r = scores(ConfusionMatrix{45, 5, 10, 40});
    r.pipeline_id = "dctlbp-mlp";
    r.ablation = "blur";
    EvalReport s = scores(ConfusionMatrix{3, 1, 2, 9});
    s.pipeline_id = "ela-svm";
    const std::vector<EvalReport> reports{r, s};
    report_csv(reports, dir / "r.csv");
    const auto back = parse_report_csv(dir / "r.csv");
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].pipeline_id, reports[i].pipeline_id);
        EXPECT_EQ(back[i].ablation, reports[i].ablation);
        EXPECT_NEAR(back[i].accuracy, reports[i].accuracy, 5e-5);
        EXPECT_NEAR(back[i].f_class0, reports[i].f_class0, 5e-5);
        EXPECT_NEAR(back[i].f_class1, reports[i].f_class1, 5e-5);
        EXPECT_NEAR(back[i].weighted_f, reports[i].weighted_f, 5e-5);
        EXPECT_EQ(back[i].support1, reports[i].support1);
    }
    EXPECT_EQ(report_row(r), "dctlbp-mlp,blur,0.8500,0.8571,0.8421,0.8496,50,50");
    try {
        report_csv(reports, dir / "no/such/dir/r.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoFailure);
    }
}

TEST(ReportTable, HasHeaderAndOneLinePerReport) {
    EvalReport r = scores(ConfusionMatrix{45, 5, 10, 40});
    r.pipeline_id = "dctlbp-svm";
    std::ostringstream os;
    print_table(os, std::vector{r, r});
    const std::string text = os.str();
    EXPECT_NE(text.find("Accuracy"), std::string::npos);
    EXPECT_NE(text.find("Weighted"), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_NE(text.find("0.85"), std::string::npos);
}
