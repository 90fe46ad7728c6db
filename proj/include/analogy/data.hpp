#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "analogy/kernels.hpp"

namespace analogy {

// Dense row-major n x d matrix of feature values.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
    static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }

    // Appends a row; the first row fixes the column count.
    void push_back(std::span<const double> row);
    FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
    FeatureMatrix select_cols(std::span<const std::size_t> indices) const;

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

// Named features over a matrix of instances, no labels.
struct InstanceTable {
    std::vector<std::string> feature_names;
    FeatureMatrix instances;

    std::size_t size() const noexcept { return instances.rows(); }
    std::size_t dim() const noexcept { return feature_names.size(); }
    // Throws DataError when the matrix width disagrees with the names.
    void validate() const;

    friend bool operator==(const InstanceTable&, const InstanceTable&) = default;
};

// Instances with ordinal class labels. All values must lie in [0, 1]; the
// constructor enforces every invariant and throws DataError otherwise.
class LabeledDataset {
public:
    LabeledDataset(std::vector<std::string> feature_names, FeatureMatrix instances, std::vector<Label> labels,
                   std::vector<std::string> class_names);

    std::size_t size() const noexcept { return instances_.rows(); }
    std::size_t dim() const noexcept { return instances_.cols(); }
    int num_classes() const noexcept { return int(class_names_.size()); }

    std::span<const double> instance(std::size_t i) const noexcept { return instances_.row(i); }
    Label label(std::size_t i) const noexcept { return labels_[i]; }

    const FeatureMatrix& instances() const noexcept { return instances_; }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

    LabeledDataset subset(std::span<const std::size_t> rows) const;
    // Class index for a name; throws DataError for unknown names.
    Label class_index(std::string_view name) const;

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

private:
    std::vector<std::string> feature_names_;
    FeatureMatrix instances_;
    std::vector<Label> labels_;
    std::vector<std::string> class_names_;
};

// Stored preference: instance `winner` is preferred to instance `loser`.
struct Preference {
    std::size_t winner = 0;
    std::size_t loser = 0;
    friend bool operator==(const Preference&, const Preference&) = default;
};

// Instances plus directed preferences among them. Indices must be in range,
// no self pairs, no duplicated ordered pair; values in [0, 1].
class PreferenceDataset {
public:
    PreferenceDataset(std::vector<std::string> feature_names, FeatureMatrix instances,
                      std::vector<Preference> preferences);

    std::size_t size() const noexcept { return instances_.rows(); }
    std::size_t dim() const noexcept { return instances_.cols(); }
    std::span<const double> instance(std::size_t i) const noexcept { return instances_.row(i); }

    const FeatureMatrix& instances() const noexcept { return instances_; }
    const std::vector<Preference>& preferences() const noexcept { return preferences_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

    friend bool operator==(const PreferenceDataset&, const PreferenceDataset&) = default;

private:
    std::vector<std::string> feature_names_;
    FeatureMatrix instances_;
    std::vector<Preference> preferences_;
};

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

struct LabelColumn {
    std::vector<Label> labels;
    std::vector<std::string> class_names;
};

struct CsvData {
    InstanceTable table;
    std::optional<LabelColumn> labels;
};

// Reads a comma-separated file with a mandatory header row. With
// label_column, that column becomes the ordinal class. class_order lists
// class names lowest rank first; without it, labels must all be numeric and
// are ordered numerically. Errors carry the source name, row and column.
CsvData load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column = std::nullopt,
                 const std::optional<std::vector<std::string>>& class_order = std::nullopt);
CsvData parse_csv(std::istream& in, const std::string& source_name,
                  const std::optional<std::string>& label_column = std::nullopt,
                  const std::optional<std::vector<std::string>>& class_order = std::nullopt);

// Preference file: header "winner,loser", one pair of 0-based row indices per line.
std::vector<Preference> load_preferences_csv(const std::filesystem::path& path);
std::vector<Preference> parse_preferences_csv(std::istream& in, const std::string& source_name);

void write_csv(std::ostream& out, const LabeledDataset& data, const std::string& label_column = "class");
void write_preferences_csv(std::ostream& out, std::span<const Preference> preferences);

// ---------------------------------------------------------------------------
// Normalization and projection
// ---------------------------------------------------------------------------

struct FeatureRange {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

struct NormalizationParams {
    std::vector<FeatureRange> retained;
    std::vector<std::string> dropped_features;

    // Maps a raw table (with at least the retained features, by name) into
    // [0, 1]. Values outside the fitted range are clamped.
    InstanceTable apply(const InstanceTable& raw) const;
    // Inverse map for a normalized table over the retained features.
    InstanceTable denormalize(const InstanceTable& normalized) const;

    friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

void to_json(nlohmann::json& j, const NormalizationParams& params);
void from_json(const nlohmann::json& j, NormalizationParams& params);

struct NormalizedTable {
    InstanceTable table;
    NormalizationParams params;
};

// Min-max scales each feature to [0, 1]. Constant features are dropped and
// listed in params.dropped_features. Throws DataError for an empty table or
// when every feature is constant.
NormalizedTable normalize(const InstanceTable& raw);

// Restricts to the named features, in the listed order.
InstanceTable project_features(const InstanceTable& table, std::span<const std::string> subset);
LabeledDataset project_features(const LabeledDataset& data, std::span<const std::string> subset);
PreferenceDataset project_features(const PreferenceDataset& data, std::span<const std::string> subset);

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

struct SynthSpec {
    std::size_t n = 100;
    std::size_t d = 5;
    int num_classes = 2;
    // Latent score weights; empty means all ones.
    std::vector<double> weights;
    // Standard deviation of Gaussian noise added to the latent score.
    double noise = 0.0;
    // Number of sampled preference pairs; 0 means 2n.
    std::size_t num_preferences = 0;

    // Throws ConfigError for n < 4, d < 1, num_classes < 2, bad weights or noise.
    void validate() const;
};

struct SynthData {
    LabeledDataset labeled;
    PreferenceDataset preferences;
    // Noisy latent score per instance; labels and preferences derive from it.
    std::vector<double> latent_scores;
};

// Instances uniform on [0,1]^d; class = quantile bin of the (noisy) latent
// score w.x; preferences are random distinct pairs ordered by that score.
// Output is a pure function of (spec, seed).
SynthData synth_generate(const SynthSpec& spec, std::uint64_t seed);

// Seeded split of 0..n-1 into (train, holdout); holdout gets
// round(n * fraction) rows, both lists sorted ascending.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> holdout;
};
Split holdout_split(std::size_t n, double fraction, std::uint64_t seed);

}  // namespace analogy
