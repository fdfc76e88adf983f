#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hmlc/data.hpp"
#include "hmlc/errors.hpp"

using namespace hmlc;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream f(p, std::ios::trunc);
    f << content;
    return p;
}

const LabelHierarchy& tiny() {
    static const LabelHierarchy h = LabelHierarchy::parse("A\nB\nC <- B\n");
    return h;
}

} // namespace

TEST_CASE("load_csv maps cells and tolerates padded values") {
    const auto p = temp_file("data_basic.csv",
                             "Path,A,B,C\n"
                             "img1, 1.0,0.0,-1.0\n"
                             "img2,,1.0, -1.0\n");
    const Dataset ds = load_csv(p, tiny());
    REQUIRE(ds.size() == 2);
    CHECK(ds.samples[0].id == "img1");
    CHECK(ds.samples[0].raw_labels[0] == RawLabel::Positive);
    CHECK(ds.samples[0].raw_labels[1] == RawLabel::Negative);
    CHECK(ds.samples[0].raw_labels[2] == RawLabel::Uncertain);
    CHECK(ds.samples[1].raw_labels[0] == RawLabel::Missing);
    CHECK(ds.samples[1].raw_labels[2] == RawLabel::Uncertain);
}

TEST_CASE("load_csv finds columns by name regardless of order") {
    const auto p = temp_file("data_reorder.csv", "C,Path,B,A\n-1.0,x,1.0,0.0\n");
    const Dataset ds = load_csv(p, tiny());
    CHECK(ds.samples[0].raw_labels[0] == RawLabel::Negative);
    CHECK(ds.samples[0].raw_labels[1] == RawLabel::Positive);
    CHECK(ds.samples[0].raw_labels[2] == RawLabel::Uncertain);
}

TEST_CASE("load_csv names the missing column") {
    const auto p = temp_file("data_missing_col.csv", "Path,A,B\nx,1.0,0.0\n");
    CHECK_THROWS_WITH_AS(load_csv(p, tiny()), doctest::Contains("'C'"), ValidationError);
}

TEST_CASE("load_csv rejects a bad cell with its location") {
    const auto p = temp_file("data_bad_cell.csv", "Path,A,B,C\nx,2.0,0.0,1.0\n");
    CHECK_THROWS_WITH_AS(load_csv(p, tiny()), doctest::Contains("row 2"), ValidationError);
}

TEST_CASE("frontal filter drops lateral and unknown views") {
    const auto p = temp_file("data_views.csv",
                             "Path,Frontal/Lateral,A,B,C\n"
                             "f,Frontal,1.0,0.0,0.0\n"
                             "l,Lateral,1.0,0.0,0.0\n"
                             "u,,1.0,0.0,0.0\n");
    CHECK(load_csv(p, tiny()).size() == 3);
    const Dataset ds = load_csv(p, tiny(), ViewFilter::FrontalOnly);
    REQUIRE(ds.size() == 1);
    CHECK(ds.samples[0].id == "f");
}

TEST_CASE("save then load round-trips labels exactly") {
    const auto p = temp_file("data_rt_in.csv",
                             "Path,Frontal/Lateral,A,B,C\n"
                             "a,Frontal,1.0,-1.0,\n"
                             "b,Lateral,0.0,1.0,-1.0\n");
    const Dataset ds = load_csv(p, tiny());
    const fs::path out = fs::temp_directory_path() / "data_rt_out.csv";
    save_csv(out, ds);
    const Dataset back = load_csv(out, tiny());
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.samples[i].id == ds.samples[i].id);
        CHECK(back.samples[i].view == ds.samples[i].view);
        CHECK(back.samples[i].raw_labels == ds.samples[i].raw_labels);
    }
}

TEST_CASE("feature sidecar round-trips doubles exactly") {
    const auto p = temp_file("data_feat_labels.csv", "Id,A,B,C\ns0,1.0,0.0,0.0\ns1,0.0,1.0,1.0\n");
    Dataset ds = load_csv(p, tiny());
    ds.samples[0].features = {0.1234567890123456789, -3.5e-12, 2.0};
    ds.samples[1].features = {1.0 / 3.0, 7.25, -0.0625};

    const fs::path out = fs::temp_directory_path() / "data_feat.csv";
    save_features_csv(out, ds);

    Dataset fresh = load_csv(p, tiny());
    load_features_csv(out, fresh);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(fresh.samples[i].features == ds.samples[i].features);
    }
}

TEST_CASE("load_features_csv reports a sample without features") {
    const auto labels = temp_file("data_feat_miss_l.csv", "Id,A,B,C\ns0,1.0,0.0,0.0\n");
    const auto feats = temp_file("data_feat_miss_f.csv", "Id,f0\nother,1.5\n");
    Dataset ds = load_csv(labels, tiny());
    CHECK_THROWS_WITH_AS(load_features_csv(feats, ds), doctest::Contains("s0"), ValidationError);
}

TEST_CASE("apply_policy is order-independent per sample") {
    const auto p = temp_file("data_policy.csv",
                             "Path,A,B,C\n"
                             "a,-1.0,1.0,-1.0\n"
                             "b,-1.0,0.0,-1.0\n");
    const Dataset ds = load_csv(p, tiny());
    const LabelPolicy policy = LabelPolicy::make(PolicyKind::UOnesLsr);

    const TargetMatrix tm = apply_policy(ds, policy, 7);
    REQUIRE(tm.rows == 2);
    REQUIRE(tm.cols == 3);

    // Same rows in a dataset twice the size give the same per-row values.
    Dataset doubled = ds;
    doubled.samples.push_back(ds.samples[0]);
    const TargetMatrix tm2 = apply_policy(doubled, policy, 7);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(tm2.targets[k] == tm.targets[k]);
        CHECK(tm2.targets[3 + k] == tm.targets[3 + k]);
    }
}

TEST_CASE("conditional filter keeps rows with every parent positive") {
    const auto p = temp_file("data_cond.csv",
                             "Path,A,B,C\n"
                             "keep,0.0,1.0,-1.0\n"
                             "drop,1.0,0.0,1.0\n"
                             "keep2,1.0,1.0,0.0\n");
    const Dataset ds = load_csv(p, tiny());
    const TargetMatrix tm = apply_policy(ds, LabelPolicy::make(PolicyKind::UZeros), 1);
    const auto idx = conditional_indices(tm, tiny());
    CHECK(idx == std::vector<std::size_t>{0, 2});

    const auto [subset, scope] = conditional_subset(ds, tiny(), LabelPolicy::make(PolicyKind::UZeros), 1);
    REQUIRE(subset.size() == 2);
    CHECK(subset.samples[0].id == "keep");
    CHECK(subset.samples[1].id == "keep2");
    CHECK(scope == std::vector<std::string>{"A", "C"});
}

TEST_CASE("uncertain parents count as positive under the ones policy") {
    const auto p = temp_file("data_cond_ones.csv", "Path,A,B,C\nx,0.0,-1.0,0.0\n");
    const Dataset ds = load_csv(p, tiny());

    const TargetMatrix zeros = apply_policy(ds, LabelPolicy::make(PolicyKind::UZeros), 1);
    CHECK(conditional_indices(zeros, tiny()).empty());

    const TargetMatrix ones = apply_policy(ds, LabelPolicy::make(PolicyKind::UOnes), 1);
    CHECK(conditional_indices(ones, tiny()).size() == 1);

    // Smoothed ones targets land in [0.55, 0.85], still counted positive.
    const TargetMatrix lsr = apply_policy(ds, LabelPolicy::make(PolicyKind::UOnesLsr), 1);
    CHECK(conditional_indices(lsr, tiny()).size() == 1);
}

TEST_CASE("phase1 scope lists non-parent labels of the builtin hierarchy") {
    const LabelHierarchy& h = LabelHierarchy::chexpert();
    const auto scope = phase1_scope(h);
    CHECK(scope.size() == h.size() - 3);
    for (std::size_t k : scope) CHECK_FALSE(h.is_parent_label(k));
}
