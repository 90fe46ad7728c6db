#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "analogy/error.hpp"
#include "analogy/explain.hpp"
#include "oracle.hpp"

using namespace analogy;

namespace {

LabeledDataset make_labeled(const std::vector<std::vector<double>>& rows, const std::vector<Label>& labels,
                            std::vector<std::string> classes) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < rows.front().size(); ++j) names.push_back("feat" + std::to_string(j));
    return LabeledDataset(names, FeatureMatrix::from_rows(rows), labels, std::move(classes));
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

LabeledDataset random_labeled(std::mt19937_64& rng, std::size_t n = 15, std::size_t d = 3) {
    auto rows = oracle::random_rows(n, d, rng);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = Label(i % 3);
    return make_labeled(rows, labels, {"low", "mid", "high"});
}

}  // namespace

TEST_CASE("a perfect analogy explains with matching deviations") {
    // a - b equals c - query on every feature.
    const auto train = make_labeled({{0.2, 0.5, 0.7}, {0.1, 0.4, 0.6}, {0.6, 0.3, 0.35}, {0.9, 0.9, 0.1}},
                                    {1, 0, 1, 0}, {"no", "yes"});
    const QueryRef query{std::nullopt, {0.5, 0.2, 0.25}};
    auto e = explain_class(train, query, 0, 3, KernelKind::arithmetic());
    REQUIRE_FALSE(e.entries.empty());
    const auto& top = e.entries.front();
    CHECK(top.triplet.indices == std::array<std::size_t, 3>{0, 1, 2});
    CHECK(top.triplet.degree == doctest::Approx(1.0));
    CHECK(top.labels == std::array<Label, 3>{1, 0, 1});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(top.deviations_ab.values[i] == doctest::Approx(top.deviations_cd.values[i]));
        CHECK(top.per_feature_degrees[i] == doctest::Approx(1.0));
    }
    for (const auto& en : e.entries) CHECK(en.triplet.transferred_label == 0);
}

TEST_CASE("contrastive explanation can be empty") {
    // With one class present, no triplet can transfer the other label.
    const auto train = make_labeled({{0.1}, {0.3}, {0.6}, {0.9}}, {0, 0, 0, 0}, {"a", "b"});
    const QueryRef query{std::nullopt, {0.5}};
    auto e = explain_class(train, query, 0, 5, KernelKind::arithmetic(), 1);
    CHECK(e.entries.empty());
    CHECK(e.contrast_label == 1);
    const auto text = render_report(e, ReportFormat::Text);
    CHECK(text.find("No analogy with degree >= 0.000 supporting label b was found.") != std::string::npos);

    auto normal = explain_class(train, query, 0, 5, KernelKind::arithmetic());
    CHECK(normal.entries.size() == 5);
    CHECK_THROWS_AS(explain_class(train, query, 2, 5, KernelKind::arithmetic()), ConfigError);
}

TEST_CASE("min degree filters entries") {
    std::mt19937_64 rng(1);
    const auto train = random_labeled(rng);
    const QueryRef query{std::nullopt, oracle::random_rows(1, 3, rng).front()};
    auto all = explain_class(train, query, 1, 10, KernelKind::arithmetic());
    REQUIRE(all.entries.size() >= 2);
    const double cut = all.entries[1].triplet.degree;
    auto some = explain_class(train, query, 1, 10, KernelKind::arithmetic(), std::nullopt, {cut, {}});
    for (const auto& en : some.entries) CHECK(en.triplet.degree >= cut);
    CHECK(some.entries.size() >= 2);
    CHECK(some.entries.size() <= all.entries.size());
}

TEST_CASE("explanation entries are recomputable from their deviations") {
    std::mt19937_64 rng(2);
    for (auto kernel : {KernelKind::arithmetic(), KernelKind::arithmetic(0.05), KernelKind::geometric()}) {
        const auto train = random_labeled(rng);
        const QueryRef query{std::nullopt, oracle::random_rows(1, 3, rng).front()};
        auto e = explain_class(train, query, 0, 6, kernel);
        for (const auto& en : e.entries) {
            const auto [a, b, c] = en.triplet.indices;
            double mean = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                const double pf = proportion(train.instance(a)[i], train.instance(b)[i], train.instance(c)[i],
                                             query.values[i], kernel);
                CHECK(std::abs(pf - en.per_feature_degrees[i]) <= 1e-12);
                mean += en.per_feature_degrees[i];
                CHECK(en.deviations_ab.values[i] ==
                      relation(train.instance(a)[i], train.instance(b)[i], kernel.variant));
                CHECK(en.deviations_cd.values[i] == relation(train.instance(c)[i], query.values[i], kernel.variant));
                if (kernel.variant == KernelVariant::Arithmetic) {
                    CHECK(en.deviations_ab.values[i] == train.instance(a)[i] - train.instance(b)[i]);
                    // The arithmetic degree is a function of the two deviations alone.
                    CHECK(std::abs(oracle::arithmetic(en.deviations_ab.values[i], 0.0, en.deviations_cd.values[i],
                                                      0.0, kernel.epsilon) -
                                   pf) <= 1e-12);
                }
            }
            CHECK(std::abs(mean / 3.0 - en.triplet.degree) <= 1e-12);
        }
    }
}

TEST_CASE("explanation JSON round trips") {
    std::mt19937_64 rng(3);
    const auto train = random_labeled(rng);
    const QueryRef query{4, std::vector<double>(train.instance(4).begin(), train.instance(4).end())};
    auto e = explain_class(train, query, 2, 4, KernelKind::arithmetic(), 0);
    const auto j = nlohmann::json::parse(render_report(e, ReportFormat::Json));
    CHECK(j.at("explained_label") == "high");
    CHECK(j.at("contrast_label") == "low");
    CHECK(j.at("query").at("row") == 4);
    CHECK(j.get<ClassExplanation>() == e);

    // Geometric deviations with a zero denominator survive as +inf.
    const auto zeros = make_labeled({{0.0, 0.5}, {0.0, 0.25}, {0.5, 0.0}, {0.2, 0.0}}, {0, 0, 1, 1}, {"x", "y"});
    auto g = explain_class(zeros, QueryRef{std::nullopt, {0.0, 0.0}}, 1, 6, KernelKind::geometric());
    nlohmann::json gj = g;
    CHECK(gj.get<ClassExplanation>() == g);
}

TEST_CASE("text report names each feature once per entry") {
    std::mt19937_64 rng(4);
    const auto train = random_labeled(rng);
    const QueryRef query{std::nullopt, oracle::random_rows(1, 3, rng).front()};
    auto e = explain_class(train, query, 1, 3, KernelKind::arithmetic());
    const auto text = render_report(e, ReportFormat::Text);
    for (const auto& f : train.feature_names()) CHECK(count_of(text, "    " + f + ": ") == e.entries.size());
    CHECK(count_of(text, "is much the same as") == e.entries.size());
    CHECK(text.find("your item") != std::string::npos);
    CHECK_THROWS_AS(parse_report_format("html"), ConfigError);
}

TEST_CASE("preference explanation") {
    const PreferenceDataset train({"x", "y"},
                                  FeatureMatrix::from_rows({{0.6, 0.6}, {0.4, 0.4}, {0.2, 0.3}, {0.4, 0.4},
                                                            {0.9, 0.2}, {0.1, 0.8}}),
                                  {{0, 1}, {2, 3}, {5, 4}});
    const QueryRef c{std::nullopt, {0.5, 0.5}}, d{std::nullopt, {0.3, 0.3}};
    auto e = explain_preference(train, c, d, Direction::CPrefD, 3, KernelKind::arithmetic());
    REQUIRE_FALSE(e.entries.empty());
    CHECK(e.entries.front().pair.preference == 0);
    CHECK(e.entries.front().pair.degree == doctest::Approx(1.0));
    for (const auto& en : e.entries) {
        CHECK(en.pair.direction == Direction::CPrefD);
        CHECK(en.deviations_cd.values[0] == doctest::Approx(0.2));
    }
    auto back = explain_preference(train, c, d, Direction::DPrefC, 3, KernelKind::arithmetic());
    for (const auto& en : back.entries) {
        CHECK(en.pair.direction == Direction::DPrefC);
        CHECK(en.deviations_cd.values[0] == doctest::Approx(-0.2));
    }
    CHECK(e.votes == back.votes);

    nlohmann::json j = e;
    CHECK(j.at("explained_direction") == "c>d");
    CHECK(j.get<PreferenceExplanation>() == e);
    CHECK(render_report(e, ReportFormat::Text).find("is preferred to") != std::string::npos);
}

TEST_CASE("similarity explanation agrees with kNN") {
    std::mt19937_64 rng(5);
    const auto train = random_labeled(rng, 20, 4);
    const QueryRef query{std::nullopt, oracle::random_rows(1, 4, rng).front()};
    auto e = explain_similarity(train, query, 5);
    auto knn = knn_predict(train, query.values, 5);
    REQUIRE(e.neighbors.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(e.neighbors[i].index == knn.neighbors[i].index);
        CHECK(e.neighbors[i].label == train.label(knn.neighbors[i].index));
    }
    CHECK(e.distribution == knn.votes);
    nlohmann::json j = e;
    CHECK(j.get<SimilarityExplanation>() == e);
    CHECK(count_of(render_report(e, ReportFormat::Text), "similarity ") == 5);
}
