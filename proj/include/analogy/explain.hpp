#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "analogy/data.hpp"
#include "analogy/predict.hpp"
#include "analogy/search.hpp"

namespace analogy {

// Per-feature values of the kernel's relation R(x, y).
struct DeviationVector {
    std::vector<std::string> features;
    std::vector<double> values;
    friend bool operator==(const DeviationVector&, const DeviationVector&) = default;
};

DeviationVector deviation(std::span<const double> x, std::span<const double> y,
                          const std::vector<std::string>& feature_names, KernelVariant variant);

// The item being explained; row is set when it was addressed by row index.
struct QueryRef {
    std::optional<std::size_t> row;
    std::vector<double> values;
    friend bool operator==(const QueryRef&, const QueryRef&) = default;
};

struct ClassExplanationEntry {
    ScoredTriplet triplet;
    std::array<Label, 3> labels{};
    DeviationVector deviations_ab;
    // R(c, query)
    DeviationVector deviations_cd;
    std::vector<Degree> per_feature_degrees;
    friend bool operator==(const ClassExplanationEntry&, const ClassExplanationEntry&) = default;
};

struct ClassExplanation {
    QueryRef query;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    Label explained_label = 0;
    // Set in contrastive mode: entries then support this label instead.
    std::optional<Label> contrast_label;
    KernelKind kernel;
    Degree min_degree = 0.0;
    std::vector<ClassExplanationEntry> entries;
    // Votes of the m best unconstrained triplets, for context.
    VoteSummary votes;
    friend bool operator==(const ClassExplanation&, const ClassExplanation&) = default;
};

struct PreferenceExplanationEntry {
    ScoredPair pair;
    // R(winner, loser)
    DeviationVector deviations_ab;
    // R of the query pair in the explained orientation: R(c, d) or R(d, c).
    DeviationVector deviations_cd;
    std::vector<Degree> per_feature_degrees;
    friend bool operator==(const PreferenceExplanationEntry&, const PreferenceExplanationEntry&) = default;
};

struct PreferenceExplanation {
    QueryRef c;
    QueryRef d;
    std::vector<std::string> feature_names;
    Direction direction = Direction::CPrefD;
    KernelKind kernel;
    Degree min_degree = 0.0;
    std::vector<PreferenceExplanationEntry> entries;
    // Votes of the m best pair analogies in either orientation.
    VoteSummary votes;
    friend bool operator==(const PreferenceExplanation&, const PreferenceExplanation&) = default;
};

struct LabeledNeighbor {
    std::size_t index = 0;
    Degree similarity = 0.0;
    Label label = 0;
    friend bool operator==(const LabeledNeighbor&, const LabeledNeighbor&) = default;
};

struct SimilarityExplanation {
    QueryRef query;
    std::vector<std::string> class_names;
    std::vector<LabeledNeighbor> neighbors;
    VoteSummary distribution;
    friend bool operator==(const SimilarityExplanation&, const SimilarityExplanation&) = default;
};

struct ExplainOptions {
    // Entries below this degree are left out of the report.
    Degree min_degree = 0.0;
    SearchOptions search;
};

/// Up to m triplets a : b :: c : query whose transferred label is the
/// explained label (or contrast_label when given). The label can come from
/// any predictor. An empty entry list is a valid result.
ClassExplanation explain_class(const LabeledDataset& train, const QueryRef& query, Label explained_label,
                               std::size_t m, const KernelKind& kernel,
                               std::optional<Label> contrast_label = std::nullopt, const ExplainOptions& options = {});

/// Up to m stored preferences whose analogy with (c, d) supports `direction`.
PreferenceExplanation explain_preference(const PreferenceDataset& train, const QueryRef& c, const QueryRef& d,
                                         Direction direction, std::size_t m, const KernelKind& kernel,
                                         const ExplainOptions& options = {});

/// The k nearest neighbors with their labels and class distribution.
SimilarityExplanation explain_similarity(const LabeledDataset& train, const QueryRef& query, std::size_t k);

enum class ReportFormat { Text, Json };
ReportFormat parse_report_format(std::string_view name);

std::string render_report(const ClassExplanation& e, ReportFormat format);
std::string render_report(const PreferenceExplanation& e, ReportFormat format);
std::string render_report(const SimilarityExplanation& e, ReportFormat format);

std::string_view to_string(Direction direction);

void to_json(nlohmann::json& j, const ClassExplanation& e);
void from_json(const nlohmann::json& j, ClassExplanation& e);
void to_json(nlohmann::json& j, const PreferenceExplanation& e);
void from_json(const nlohmann::json& j, PreferenceExplanation& e);
void to_json(nlohmann::json& j, const SimilarityExplanation& e);
void from_json(const nlohmann::json& j, SimilarityExplanation& e);

}  // namespace analogy
