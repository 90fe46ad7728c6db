#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "analogy/data.hpp"
#include "analogy/kernels.hpp"
#include "analogy/search.hpp"

namespace analogy {

enum class CurveKind { Analogy, Similarity };

// Exact enumeration when monte_carlo is empty, otherwise per-query sampling.
struct CurveSampling {
    struct MonteCarlo {
        std::size_t num_samples = 0;
        std::uint64_t seed = 0;
        friend bool operator==(const MonteCarlo&, const MonteCarlo&) = default;
    };
    std::optional<MonteCarlo> monte_carlo;

    static CurveSampling exact() { return {}; }
    static CurveSampling sampled(std::size_t num_samples, std::uint64_t seed) { return {MonteCarlo{num_samples, seed}}; }
    friend bool operator==(const CurveSampling&, const CurveSampling&) = default;
};

// fractions[j] is the fraction of candidates with degree >= thresholds[j],
// averaged over queries.
struct DecumulativeCurve {
    std::vector<double> thresholds;
    std::vector<double> fractions;
    CurveKind kind = CurveKind::Analogy;
    CurveSampling sampling;
};

/// `points` evenly spaced thresholds from 0 to 1 inclusive.
std::vector<double> default_thresholds(std::size_t points = 101);

/// Average over queries of the fraction of ordered training triplets
/// (a, b, c) with degree(a : b :: c : query) >= t, for each threshold t.
DecumulativeCurve analogy_curve(const FeatureMatrix& train, const FeatureMatrix& queries,
                                std::span<const double> thresholds, const KernelKind& kernel,
                                const CurveSampling& sampling = CurveSampling::exact(),
                                const SearchOptions& options = {});

/// Same over training examples, with degree = similarity(example, query).
DecumulativeCurve similarity_curve(const FeatureMatrix& train, const FeatureMatrix& queries,
                                   std::span<const double> thresholds);

struct CurveComparison {
    // analogy - similarity at each threshold
    std::vector<double> difference;
    double area_analogy = 0.0;
    double area_similarity = 0.0;
    double floor = 0.001;
    // Highest threshold at which each curve is still >= floor.
    std::optional<double> floor_threshold_analogy;
    std::optional<double> floor_threshold_similarity;
};

/// Pointwise difference, trapezoidal areas and floor crossings. The first
/// curve is reported as "analogy", the second as "similarity". Throws
/// ConfigError when the grids differ.
CurveComparison compare_curves(const DecumulativeCurve& a, const DecumulativeCurve& s, double floor = 0.001);

/// CSV with header threshold,analogy_fraction,similarity_fraction.
void write_curves_csv(std::ostream& out, const DecumulativeCurve& a, const DecumulativeCurve& s);

}  // namespace analogy
