#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "analogy/data.hpp"
#include "analogy/search.hpp"

namespace analogy {

// Vote counts keyed by class index (or by Direction cast to int for
// preferences). probability[y] = counts[y] / total when total > 0.
struct VoteSummary {
    std::map<int, std::size_t> counts;
    std::size_t total = 0;
    std::map<int, double> probability;

    void add(int key);
    // Recomputes probabilities from counts.
    void finalize();
    // Key with the most votes, lowest key on ties; nullopt when empty.
    std::optional<int> majority() const;

    friend bool operator==(const VoteSummary&, const VoteSummary&) = default;
};

struct ClassPrediction {
    // nullopt is the no-vote outcome: every candidate triplet abstained.
    std::optional<Label> label;
    VoteSummary votes;
    std::vector<ScoredTriplet> analogies;
};

/// Majority vote of the transferred labels of the k best triplets.
ClassPrediction predict_class(const LabeledDataset& train, std::span<const double> query, std::size_t k,
                              const KernelKind& kernel, const SearchOptions& options = {});

struct PreferencePrediction {
    // nullopt when no stored preference could be scored.
    std::optional<Direction> direction;
    VoteSummary votes;
    std::vector<ScoredPair> analogies;

    // Vote share for c > d; 0.5 for the no-vote outcome.
    double probability_c_over_d() const;
};

/// Majority vote over the k best pair analogies; ties go to c > d.
PreferencePrediction predict_preference(const PreferenceDataset& train, std::span<const double> c,
                                        std::span<const double> d, std::size_t k, const KernelKind& kernel,
                                        const SearchOptions& options = {});

struct Ranking {
    // order[r] is the item at rank r + 1; rank[i] is the 1-based rank of item i.
    std::vector<std::size_t> order;
    std::vector<std::size_t> rank;
    // Pairwise wins per item; a no-vote pair gives each side 0.5.
    std::vector<double> wins;
    // Summed probability of winning over all pairwise comparisons.
    std::vector<double> probability_sum;
};

/// Ranks the query items by pairwise wins (Copeland), then by summed
/// win probability, then by input order. Needs at least two items.
Ranking predict_ranking(const PreferenceDataset& train, const FeatureMatrix& items, std::size_t k,
                        const KernelKind& kernel, const SearchOptions& options = {});

struct Neighbor {
    std::size_t index = 0;
    Degree similarity = 0.0;
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// The k most similar training instances (similarity descending, index
/// ascending on ties).
std::vector<Neighbor> nearest_neighbors(const FeatureMatrix& train, std::span<const double> query, std::size_t k);

struct KnnPrediction {
    Label label = 0;
    VoteSummary votes;
    std::vector<Neighbor> neighbors;
};

/// Majority label among the k nearest neighbors, lower class on ties.
KnnPrediction knn_predict(const LabeledDataset& train, std::span<const double> query, std::size_t k);

}  // namespace analogy
