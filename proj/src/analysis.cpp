#include "analogy/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <random>

#include <omp.h>

#include "analogy/error.hpp"

namespace analogy {

std::vector<double> default_thresholds(std::size_t points) {
    if (points < 2) throw ConfigError("threshold grid needs at least 2 points");
    std::vector<double> t(points);
    for (std::size_t j = 0; j < points; ++j) t[j] = double(j) / double(points - 1);
    return t;
}

namespace {

void check_grid(std::span<const double> thresholds) {
    if (thresholds.empty()) throw ConfigError("empty threshold grid");
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (!(thresholds[j] >= 0.0 && thresholds[j] <= 1.0)) throw ConfigError("thresholds must lie in [0, 1]");
        if (j > 0 && !(thresholds[j] > thresholds[j - 1])) throw ConfigError("thresholds must be strictly ascending");
    }
}

void check_queries(const FeatureMatrix& train, const FeatureMatrix& queries) {
    if (queries.empty()) throw ConfigError("curve needs at least one query");
    if (queries.cols() != train.cols()) {
        throw DimensionError("queries have " + std::to_string(queries.cols()) + " features, training data has " +
                             std::to_string(train.cols()));
    }
}

// hist[p] counts degrees exceeding exactly p thresholds (p = number of
// thresholds <= degree). Returns fraction >= t_j for each j.
std::vector<double> exceedance(const std::vector<std::uint64_t>& hist, std::uint64_t total) {
    const std::size_t m = hist.size() - 1;
    std::vector<double> out(m);
    std::uint64_t above = 0;
    for (std::size_t j = m; j-- > 0;) {
        above += hist[j + 1];
        out[j] = double(above) / double(total);
    }
    return out;
}

std::size_t bucket(std::span<const double> thresholds, double degree) {
    return std::size_t(std::upper_bound(thresholds.begin(), thresholds.end(), degree) - thresholds.begin());
}

std::uint64_t query_seed(std::uint64_t seed, std::size_t query) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(query),
                      std::uint32_t(std::uint64_t(query) >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (std::uint64_t(words[0]) << 32) | words[1];
}

}  // namespace

DecumulativeCurve analogy_curve(const FeatureMatrix& train, const FeatureMatrix& queries,
                                std::span<const double> thresholds, const KernelKind& kernel,
                                const CurveSampling& sampling, const SearchOptions& options) {
    check_grid(thresholds);
    check_queries(train, queries);
    kernel.validate();
    const std::size_t n = train.rows();
    if (n < 3) throw DataError("analogy curve needs at least 3 training instances");

    DecumulativeCurve curve{{thresholds.begin(), thresholds.end()},
                            std::vector<double>(thresholds.size(), 0.0),
                            CurveKind::Analogy,
                            sampling};
    const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();

    for (std::size_t q = 0; q < queries.rows(); ++q) {
        const auto query = queries.row(q);
        std::vector<std::uint64_t> hist(thresholds.size() + 1, 0);
        std::uint64_t total = 0;
        if (sampling.monte_carlo) {
            const auto degrees = sample_triplet_degrees(train, query, sampling.monte_carlo->num_samples,
                                                        query_seed(sampling.monte_carlo->seed, q), kernel, options);
            for (double v : degrees) ++hist[bucket(thresholds, v)];
            total = degrees.size();
        } else {
#pragma omp parallel num_threads(workers)
            {
                std::vector<std::uint64_t> local(hist.size(), 0);
#pragma omp for schedule(dynamic, 1) nowait
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b) {
                        if (b == a) continue;
                        for (std::size_t c = 0; c < n; ++c) {
                            if (c == a || c == b) continue;
                            ++local[bucket(thresholds, vector_proportion(train.row(a), train.row(b), train.row(c),
                                                                         query, kernel))];
                        }
                    }
#pragma omp critical(analogy_curve_merge)
                for (std::size_t p = 0; p < hist.size(); ++p) hist[p] += local[p];
            }
            total = triplet_population(n);
        }
        const auto frac = exceedance(hist, total);
        for (std::size_t j = 0; j < frac.size(); ++j) curve.fractions[j] += frac[j];
    }
    for (double& f : curve.fractions) f /= double(queries.rows());
    return curve;
}

DecumulativeCurve similarity_curve(const FeatureMatrix& train, const FeatureMatrix& queries,
                                   std::span<const double> thresholds) {
    check_grid(thresholds);
    check_queries(train, queries);
    if (train.empty()) throw DataError("similarity curve needs training instances");

    DecumulativeCurve curve{{thresholds.begin(), thresholds.end()},
                            std::vector<double>(thresholds.size(), 0.0),
                            CurveKind::Similarity,
                            CurveSampling::exact()};
    for (std::size_t q = 0; q < queries.rows(); ++q) {
        std::vector<std::uint64_t> hist(thresholds.size() + 1, 0);
        for (std::size_t i = 0; i < train.rows(); ++i) ++hist[bucket(thresholds, similarity(train.row(i), queries.row(q)))];
        const auto frac = exceedance(hist, train.rows());
        for (std::size_t j = 0; j < frac.size(); ++j) curve.fractions[j] += frac[j];
    }
    for (double& f : curve.fractions) f /= double(queries.rows());
    return curve;
}

namespace {

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double area = 0.0;
    for (std::size_t j = 1; j < x.size(); ++j) area += 0.5 * (y[j] + y[j - 1]) * (x[j] - x[j - 1]);
    return area;
}

std::optional<double> floor_crossing(const DecumulativeCurve& c, double floor) {
    std::optional<double> out;
    for (std::size_t j = 0; j < c.thresholds.size(); ++j)
        if (c.fractions[j] >= floor) out = c.thresholds[j];
    return out;
}

}  // namespace

CurveComparison compare_curves(const DecumulativeCurve& a, const DecumulativeCurve& s, double floor) {
    if (a.thresholds != s.thresholds) throw ConfigError("compare_curves: threshold grids differ");
    CurveComparison out;
    out.floor = floor;
    out.difference.resize(a.thresholds.size());
    for (std::size_t j = 0; j < a.thresholds.size(); ++j) out.difference[j] = a.fractions[j] - s.fractions[j];
    out.area_analogy = trapezoid(a.thresholds, a.fractions);
    out.area_similarity = trapezoid(s.thresholds, s.fractions);
    out.floor_threshold_analogy = floor_crossing(a, floor);
    out.floor_threshold_similarity = floor_crossing(s, floor);
    return out;
}

void write_curves_csv(std::ostream& out, const DecumulativeCurve& a, const DecumulativeCurve& s) {
    if (a.thresholds != s.thresholds) throw ConfigError("write_curves_csv: threshold grids differ");
    auto num = [](double v) {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, ptr);
    };
    out << "threshold,analogy_fraction,similarity_fraction\n";
    for (std::size_t j = 0; j < a.thresholds.size(); ++j)
        out << num(a.thresholds[j]) << ',' << num(a.fractions[j]) << ',' << num(s.fractions[j]) << '\n';
}

}  // namespace analogy
