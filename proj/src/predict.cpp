#include "analogy/predict.hpp"

#include <algorithm>
#include <numeric>

#include <omp.h>

#include "analogy/error.hpp"

namespace analogy {

void VoteSummary::add(int key) {
    ++counts[key];
    ++total;
}

void VoteSummary::finalize() {
    probability.clear();
    if (total == 0) return;
    for (const auto& [key, count] : counts) probability[key] = double(count) / double(total);
}

std::optional<int> VoteSummary::majority() const {
    std::optional<int> best;
    std::size_t best_count = 0;
    // std::map iterates keys ascending, so the first maximum is the lowest key.
    for (const auto& [key, count] : counts) {
        if (count > best_count) {
            best = key;
            best_count = count;
        }
    }
    return best;
}

ClassPrediction predict_class(const LabeledDataset& train, std::span<const double> query, std::size_t k,
                              const KernelKind& kernel, const SearchOptions& options) {
    ClassPrediction out;
    out.analogies = top_k_triplets(train, query, k, kernel, std::nullopt, options);
    for (const auto& t : out.analogies) out.votes.add(t.transferred_label);
    out.votes.finalize();
    out.label = out.votes.majority();
    return out;
}

double PreferencePrediction::probability_c_over_d() const {
    if (votes.total == 0) return 0.5;
    auto it = votes.probability.find(int(Direction::CPrefD));
    return it == votes.probability.end() ? 0.0 : it->second;
}

PreferencePrediction predict_preference(const PreferenceDataset& train, std::span<const double> c,
                                        std::span<const double> d, std::size_t k, const KernelKind& kernel,
                                        const SearchOptions& options) {
    PreferencePrediction out;
    out.analogies = top_k_pairs(train, c, d, k, kernel, std::nullopt, options);
    for (const auto& p : out.analogies) out.votes.add(int(p.direction));
    out.votes.finalize();
    // CPrefD is key 0, so the lower-key tie rule favors c > d.
    if (auto m = out.votes.majority()) out.direction = Direction(*m);
    return out;
}

Ranking predict_ranking(const PreferenceDataset& train, const FeatureMatrix& items, std::size_t k,
                        const KernelKind& kernel, const SearchOptions& options) {
    const std::size_t m = items.rows();
    if (m < 2) throw ConfigError("ranking needs at least 2 query items");
    if (items.cols() != train.dim()) {
        throw DimensionError("query items have " + std::to_string(items.cols()) + " features, training data has " +
                             std::to_string(train.dim()));
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);

    // P(i beats j) per pair. Each pairwise search runs single-threaded; the
    // parallelism is across pairs.
    std::vector<double> p_first(pairs.size());
    std::vector<char> voted(pairs.size());
    const SearchOptions inner{1};
    const auto count = std::int64_t(pairs.size());
#pragma omp parallel for num_threads(options.workers > 0 ? options.workers : omp_get_max_threads()) schedule(dynamic)
    for (std::int64_t s = 0; s < count; ++s) {
        const auto [i, j] = pairs[std::size_t(s)];
        const auto pred = predict_preference(train, items.row(i), items.row(j), k, kernel, inner);
        voted[std::size_t(s)] = pred.direction.has_value();
        p_first[std::size_t(s)] = pred.probability_c_over_d();
    }

    Ranking r;
    r.wins.assign(m, 0.0);
    r.probability_sum.assign(m, 0.0);
    for (std::size_t s = 0; s < pairs.size(); ++s) {
        const auto [i, j] = pairs[s];
        if (!voted[s]) {
            r.wins[i] += 0.5;
            r.wins[j] += 0.5;
        } else if (p_first[s] >= 0.5) {
            // Ties in the vote go to the first item, as predict_preference does.
            r.wins[i] += 1.0;
        } else {
            r.wins[j] += 1.0;
        }
        r.probability_sum[i] += p_first[s];
        r.probability_sum[j] += 1.0 - p_first[s];
    }

    r.order.resize(m);
    std::iota(r.order.begin(), r.order.end(), 0);
    std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t x, std::size_t y) {
        if (r.wins[x] != r.wins[y]) return r.wins[x] > r.wins[y];
        return r.probability_sum[x] > r.probability_sum[y];
    });
    r.rank.resize(m);
    for (std::size_t pos = 0; pos < m; ++pos) r.rank[r.order[pos]] = pos + 1;
    return r;
}

std::vector<Neighbor> nearest_neighbors(const FeatureMatrix& train, std::span<const double> query, std::size_t k) {
    if (train.empty()) throw DataError("nearest neighbors: empty training set");
    if (k == 0 || k > train.rows()) {
        throw ConfigError("k must lie in [1, " + std::to_string(train.rows()) + "], got " + std::to_string(k));
    }
    std::vector<Neighbor> all(train.rows());
    for (std::size_t i = 0; i < train.rows(); ++i) all[i] = {i, similarity(train.row(i), query)};
    std::partial_sort(all.begin(), all.begin() + std::ptrdiff_t(k), all.end(), [](const Neighbor& x, const Neighbor& y) {
        if (x.similarity != y.similarity) return x.similarity > y.similarity;
        return x.index < y.index;
    });
    all.resize(k);
    return all;
}

KnnPrediction knn_predict(const LabeledDataset& train, std::span<const double> query, std::size_t k) {
    KnnPrediction out;
    out.neighbors = nearest_neighbors(train.instances(), query, k);
    for (const auto& nb : out.neighbors) out.votes.add(train.label(nb.index));
    out.votes.finalize();
    out.label = *out.votes.majority();
    return out;
}

}  // namespace analogy
