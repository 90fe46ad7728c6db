#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "analogy/data.hpp"
#include "analogy/kernels.hpp"

namespace analogy {

// Ordered training triplet (a, b, c) scored against a query d.
struct ScoredTriplet {
    std::array<std::size_t, 3> indices{};
    Degree degree = 0.0;
    // Label completed by a : b :: c : query; retrieval never returns abstentions.
    Label transferred_label = 0;

    friend bool operator==(const ScoredTriplet&, const ScoredTriplet&) = default;
};

// Which way a stored preference suggests the query pair (c, d) is ordered.
enum class Direction { CPrefD, DPrefC };

// A stored preference (winner a, loser b) in one of its two orientations:
// CPrefD scores a : b :: c : d, DPrefC scores a : b :: d : c.
struct ScoredPair {
    std::size_t preference = 0;
    std::size_t winner = 0;
    std::size_t loser = 0;
    Degree degree = 0.0;
    Direction direction = Direction::CPrefD;

    friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

struct SearchOptions {
    // OpenMP threads; 0 uses the runtime default. Results never depend on it.
    int workers = 0;
};

// Canonical result order: degree descending, then indices ascending.
bool ranks_before(const ScoredTriplet& x, const ScoredTriplet& y) noexcept;
// Degree descending, then preference index, then CPrefD before DPrefC.
bool ranks_before(const ScoredPair& x, const ScoredPair& y) noexcept;

/// The k best ordered triplets of distinct training instances for the query,
/// in canonical order. Abstaining triplets are skipped; with label_constraint
/// only triplets transferring that label qualify. Prefix-bound pruned and
/// parallel; output is identical to reference::top_k_triplets.
std::vector<ScoredTriplet> top_k_triplets(const LabeledDataset& train, std::span<const double> query, std::size_t k,
                                          const KernelKind& kernel,
                                          std::optional<Label> label_constraint = std::nullopt,
                                          const SearchOptions& options = {});

/// The k best (preference, orientation) entries for the query pair (c, d).
/// With direction_constraint only that orientation is considered.
std::vector<ScoredPair> top_k_pairs(const PreferenceDataset& train, std::span<const double> c,
                                    std::span<const double> d, std::size_t k, const KernelKind& kernel,
                                    std::optional<Direction> direction_constraint = std::nullopt,
                                    const SearchOptions& options = {});

/// Degrees a : b :: c : query of num_samples ordered triplets of distinct rows,
/// drawn without replacement until the population n(n-1)(n-2) is used up and
/// with replacement after that. Deterministic given seed.
std::vector<Degree> sample_triplet_degrees(const FeatureMatrix& train, std::span<const double> query,
                                           std::size_t num_samples, std::uint64_t seed, const KernelKind& kernel,
                                           const SearchOptions& options = {});

/// Number of ordered triplets of distinct indices out of n.
std::uint64_t triplet_population(std::size_t n) noexcept;
/// Maps t in [0, n(n-1)(n-2)) to its triplet in lexicographic order.
std::array<std::size_t, 3> decode_triplet(std::uint64_t t, std::size_t n) noexcept;

// Serial, unpruned implementations kept as the test and benchmark baseline.
namespace reference {

std::vector<ScoredTriplet> top_k_triplets(const LabeledDataset& train, std::span<const double> query, std::size_t k,
                                          const KernelKind& kernel,
                                          std::optional<Label> label_constraint = std::nullopt);

std::vector<ScoredPair> top_k_pairs(const PreferenceDataset& train, std::span<const double> c,
                                    std::span<const double> d, std::size_t k, const KernelKind& kernel,
                                    std::optional<Direction> direction_constraint = std::nullopt);

}  // namespace reference

}  // namespace analogy
