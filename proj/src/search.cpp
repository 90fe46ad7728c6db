#include "analogy/search.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include <omp.h>

#include "analogy/error.hpp"
#include "topk.hpp"

namespace analogy {

bool ranks_before(const ScoredTriplet& x, const ScoredTriplet& y) noexcept {
    if (x.degree != y.degree) return x.degree > y.degree;
    return x.indices < y.indices;
}

bool ranks_before(const ScoredPair& x, const ScoredPair& y) noexcept {
    if (x.degree != y.degree) return x.degree > y.degree;
    if (x.preference != y.preference) return x.preference < y.preference;
    return x.direction == Direction::CPrefD && y.direction == Direction::DPrefC;
}

std::uint64_t triplet_population(std::size_t n) noexcept {
    if (n < 3) return 0;
    return std::uint64_t(n) * (n - 1) * (n - 2);
}

std::array<std::size_t, 3> decode_triplet(std::uint64_t t, std::size_t n) noexcept {
    const std::uint64_t per_a = std::uint64_t(n - 1) * (n - 2);
    std::size_t a = std::size_t(t / per_a);
    const std::uint64_t rest = t % per_a;
    std::size_t b = std::size_t(rest / (n - 2));
    std::size_t c = std::size_t(rest % (n - 2));
    if (b >= a) ++b;
    // c skips both a and b, smallest first.
    const std::size_t lo = std::min(a, b), hi = std::max(a, b);
    if (c >= lo) ++c;
    if (c >= hi) ++c;
    return {a, b, c};
}

namespace {

// Slack on the pruning comparisons, in units of summed per-feature degree.
// Candidates whose bound is within this of the threshold are fully scored.
constexpr double kBoundSlack = 1e-9;

int worker_count(const SearchOptions& options) {
    return options.workers > 0 ? options.workers : omp_get_max_threads();
}

void check_triplet_inputs(std::size_t n, std::size_t dim, std::span<const double> query, std::size_t k,
                          const KernelKind& kernel) {
    kernel.validate();
    if (k == 0) throw ConfigError("k must be at least 1");
    if (n < 3) throw DataError("triplet search needs at least 3 training instances, got " + std::to_string(n));
    if (query.size() != dim) {
        throw DimensionError("query has " + std::to_string(query.size()) + " features, training data has " +
                             std::to_string(dim));
    }
}

void check_pair_inputs(const PreferenceDataset& train, std::span<const double> c, std::span<const double> d,
                       std::size_t k, const KernelKind& kernel) {
    kernel.validate();
    if (k == 0) throw ConfigError("k must be at least 1");
    if (train.preferences().empty()) throw DataError("preference search needs at least one stored preference");
    if (c.size() != train.dim() || d.size() != train.dim()) {
        throw DimensionError("query pair has " + std::to_string(c.size()) + " and " + std::to_string(d.size()) +
                             " features, training data has " + std::to_string(train.dim()));
    }
}

// Range of c labels for which a : b :: c : query does not abstain.
std::pair<Label, Label> admissible_c_labels(Label ya, Label yb, int num_classes, std::optional<Label> constraint) {
    if (constraint) {
        const Label yc = *constraint + ya - yb;
        if (yc < 0 || yc >= num_classes) return {0, -1};
        return {yc, yc};
    }
    return {std::max(0, ya - yb), std::min(num_classes - 1, num_classes - 1 + ya - yb)};
}

// Training rows grouped by label; for the arithmetic kernel each group is
// sorted by the first-feature offset c_0 - query_0 to allow a window scan.
struct LabelBucket {
    std::vector<std::size_t> rows;
    std::vector<double> first_offset;
};

}  // namespace

std::vector<ScoredTriplet> top_k_triplets(const LabeledDataset& train, std::span<const double> query, std::size_t k,
                                          const KernelKind& kernel, std::optional<Label> label_constraint,
                                          const SearchOptions& options) {
    const std::size_t n = train.size();
    const std::size_t dim = train.dim();
    check_triplet_inputs(n, dim, query, k, kernel);
    const int num_classes = train.num_classes();
    if (label_constraint && (*label_constraint < 0 || *label_constraint >= num_classes)) return {};

    const bool arithmetic = kernel.variant == KernelVariant::Arithmetic;
    const double eps = kernel.epsilon;
    const auto ddim = double(dim);

    // offsets(c, i) = c_i - query_i, reused for every (a, b).
    FeatureMatrix offsets(n, dim);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i < dim; ++i) offsets(c, i) = train.instance(c)[i] - query[i];

    std::vector<LabelBucket> buckets(static_cast<std::size_t>(num_classes));
    for (std::size_t c = 0; c < n; ++c) buckets[std::size_t(train.label(c))].rows.push_back(c);
    for (auto& bucket : buckets) {
        if (arithmetic) {
            std::stable_sort(bucket.rows.begin(), bucket.rows.end(),
                             [&](std::size_t x, std::size_t y) { return offsets(x, 0) < offsets(y, 0); });
        }
        for (auto c : bucket.rows) bucket.first_offset.push_back(offsets(c, 0));
    }

    std::vector<ScoredTriplet> candidates;
#pragma omp parallel num_threads(worker_count(options))
    {
        detail::BoundedBest<ScoredTriplet> best(k);
        std::vector<double> diff(dim);

#pragma omp for schedule(dynamic, 1) nowait
        for (std::size_t a = 0; a < n; ++a) {
            const auto va = train.instance(a);
            const Label ya = train.label(a);
            for (std::size_t b = 0; b < n; ++b) {
                if (b == a) continue;
                const auto vb = train.instance(b);
                const Label yb = train.label(b);
                const auto [lo_label, hi_label] = admissible_c_labels(ya, yb, num_classes, label_constraint);
                for (std::size_t i = 0; i < dim; ++i) diff[i] = va[i] - vb[i];

                for (Label yc = lo_label; yc <= hi_label; ++yc) {
                    const LabelBucket& bucket = buckets[std::size_t(yc)];
                    std::size_t begin = 0, end = bucket.rows.size();
                    if (arithmetic && best.full()) {
                        // First-feature degree needed to keep the prefix bound alive.
                        const double needed = best.threshold() * ddim - kBoundSlack - (ddim - 1.0);
                        if (needed > 0.0) {
                            const double width = 1.0 - needed + 1e-12;
                            const auto& off = bucket.first_offset;
                            begin = std::size_t(std::lower_bound(off.begin(), off.end(), diff[0] - width) - off.begin());
                            end = std::size_t(std::upper_bound(off.begin(), off.end(), diff[0] + width) - off.begin());
                        }
                    }
                    for (std::size_t pos = begin; pos < end; ++pos) {
                        const std::size_t c = bucket.rows[pos];
                        if (c == a || c == b) continue;
                        const double cut = best.full() ? best.threshold() * ddim - kBoundSlack : -1.0;
                        const auto vc = train.instance(c);
                        double sum = 0.0;
                        bool pruned = false;
                        for (std::size_t i = 0; i < dim; ++i) {
                            sum += arithmetic ? detail::arithmetic_from_differences(diff[i], offsets(c, i), eps)
                                              : proportion(va[i], vb[i], vc[i], query[i], kernel);
                            if (sum + double(dim - 1 - i) < cut) {
                                pruned = true;
                                break;
                            }
                        }
                        if (pruned) continue;
                        best.offer({{a, b, c}, sum / ddim, yc - ya + yb});
                    }
                }
            }
        }
#pragma omp critical(analogy_triplet_merge)
        candidates.insert(candidates.end(), best.entries().begin(), best.entries().end());
    }
    return detail::merge_best(std::move(candidates), k);
}

std::vector<ScoredPair> top_k_pairs(const PreferenceDataset& train, std::span<const double> c,
                                    std::span<const double> d, std::size_t k, const KernelKind& kernel,
                                    std::optional<Direction> direction_constraint, const SearchOptions& options) {
    check_pair_inputs(train, c, d, k, kernel);
    const auto& prefs = train.preferences();
    const std::size_t dim = train.dim();
    const auto ddim = double(dim);

    std::vector<ScoredPair> candidates;
#pragma omp parallel num_threads(worker_count(options))
    {
        detail::BoundedBest<ScoredPair> best(k);

#pragma omp for schedule(static) nowait
        for (std::size_t p = 0; p < prefs.size(); ++p) {
            const auto va = train.instance(prefs[p].winner);
            const auto vb = train.instance(prefs[p].loser);
            for (Direction dir : {Direction::CPrefD, Direction::DPrefC}) {
                if (direction_constraint && dir != *direction_constraint) continue;
                const auto& first = dir == Direction::CPrefD ? c : d;
                const auto& second = dir == Direction::CPrefD ? d : c;
                const double cut = best.full() ? best.threshold() * ddim - kBoundSlack : -1.0;
                double sum = 0.0;
                bool pruned = false;
                for (std::size_t i = 0; i < dim; ++i) {
                    sum += proportion(va[i], vb[i], first[i], second[i], kernel);
                    if (sum + double(dim - 1 - i) < cut) {
                        pruned = true;
                        break;
                    }
                }
                if (!pruned) best.offer({p, prefs[p].winner, prefs[p].loser, sum / ddim, dir});
            }
        }
#pragma omp critical(analogy_pair_merge)
        candidates.insert(candidates.end(), best.entries().begin(), best.entries().end());
    }
    return detail::merge_best(std::move(candidates), k);
}

std::vector<Degree> sample_triplet_degrees(const FeatureMatrix& train, std::span<const double> query,
                                           std::size_t num_samples, std::uint64_t seed, const KernelKind& kernel,
                                           const SearchOptions& options) {
    const std::size_t n = train.rows();
    check_triplet_inputs(n, train.cols(), query, 1, kernel);
    if (num_samples == 0) throw ConfigError("num_samples must be at least 1");

    const std::uint64_t population = triplet_population(n);
    const std::uint64_t distinct = std::min<std::uint64_t>(num_samples, population);
    std::mt19937_64 rng(seed);

    std::vector<std::uint64_t> picks;
    picks.reserve(num_samples);
    if (distinct * 2 >= population) {
        // Selection sampling: one pass, picks come out ascending.
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uint64_t needed = distinct;
        for (std::uint64_t t = 0; t < population && needed > 0; ++t) {
            if (double(population - t) * unit(rng) < double(needed)) {
                picks.push_back(t);
                --needed;
            }
        }
    } else {
        // Floyd's algorithm, then sorted for a canonical order.
        std::unordered_set<std::uint64_t> chosen;
        chosen.reserve(std::size_t(distinct) * 2);
        for (std::uint64_t j = population - distinct; j < population; ++j) {
            const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
            chosen.insert(chosen.contains(t) ? j : t);
        }
        picks.assign(chosen.begin(), chosen.end());
        std::sort(picks.begin(), picks.end());
    }
    std::uniform_int_distribution<std::uint64_t> any(0, population - 1);
    while (picks.size() < num_samples) picks.push_back(any(rng));

    std::vector<Degree> degrees(picks.size());
    const auto count = std::int64_t(picks.size());
#pragma omp parallel for num_threads(worker_count(options)) schedule(static)
    for (std::int64_t s = 0; s < count; ++s) {
        const auto [a, b, c] = decode_triplet(picks[std::size_t(s)], n);
        degrees[std::size_t(s)] = vector_proportion(train.row(a), train.row(b), train.row(c), query, kernel);
    }
    return degrees;
}

namespace reference {

std::vector<ScoredTriplet> top_k_triplets(const LabeledDataset& train, std::span<const double> query, std::size_t k,
                                          const KernelKind& kernel, std::optional<Label> label_constraint) {
    const std::size_t n = train.size();
    check_triplet_inputs(n, train.dim(), query, k, kernel);
    detail::BoundedBest<ScoredTriplet> best(k);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == a || c == b) continue;
                const auto label = label_transfer(train.label(a), train.label(b), train.label(c), train.num_classes());
                if (!label || (label_constraint && *label != *label_constraint)) continue;
                const Degree v =
                    vector_proportion(train.instance(a), train.instance(b), train.instance(c), query, kernel);
                best.offer({{a, b, c}, v, *label});
            }
        }
    return std::move(best).sorted();
}

std::vector<ScoredPair> top_k_pairs(const PreferenceDataset& train, std::span<const double> c,
                                    std::span<const double> d, std::size_t k, const KernelKind& kernel,
                                    std::optional<Direction> direction_constraint) {
    check_pair_inputs(train, c, d, k, kernel);
    detail::BoundedBest<ScoredPair> best(k);
    const auto& prefs = train.preferences();
    for (std::size_t p = 0; p < prefs.size(); ++p) {
        const auto va = train.instance(prefs[p].winner);
        const auto vb = train.instance(prefs[p].loser);
        if (!direction_constraint || *direction_constraint == Direction::CPrefD)
            best.offer({p, prefs[p].winner, prefs[p].loser, vector_proportion(va, vb, c, d, kernel), Direction::CPrefD});
        if (!direction_constraint || *direction_constraint == Direction::DPrefC)
            best.offer({p, prefs[p].winner, prefs[p].loser, vector_proportion(va, vb, d, c, kernel), Direction::DPrefC});
    }
    return std::move(best).sorted();
}

}  // namespace reference

}  // namespace analogy
