// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "analogy/analysis.hpp"
#include "analogy/data.hpp"
#include "analogy/kernels.hpp"
#include "analogy/predict.hpp"
#include "analogy/search.hpp"
#include "cli.hpp"
#include "oracle.hpp"

using namespace analogy;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

int bit(int m, int pos) { return (m >> pos) & 1; }

Outcome boolean_table() {
    int ones = 0;
    bool exact = true;
    for (int m = 0; m < 16; ++m) {
        const int a = bit(m, 3), b = bit(m, 2), c = bit(m, 1), d = bit(m, 0);
        const double v = boolean_proportion(a, b, c, d);
        exact &= v == (oracle::boolean_row_valid(a, b, c, d) ? 1.0 : 0.0);
        ones += v == 1.0;
    }
    return {exact && ones == 6, std::to_string(ones) + " of 16 inputs valid"};
}

Outcome boolean_reduction() {
    int agree = 0;
    for (int m = 0; m < 16; ++m) {
        const int a = bit(m, 3), b = bit(m, 2), c = bit(m, 1), d = bit(m, 0);
        agree += arithmetic_proportion(a, b, c, d) == boolean_proportion(a, b, c, d);
    }
    return {agree == 16, std::to_string(agree) + "/16 agree"};
}

Outcome kernel_properties() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double tol = 1e-12;
    std::size_t violations = 0;
    const std::vector<KernelKind> kernels{KernelKind::boolean(), KernelKind::arithmetic(), KernelKind::geometric()};
    for (const auto& kernel : kernels) {
        for (int t = 0; t < 10000; ++t) {
            const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
            const double v = proportion(a, b, c, d, kernel);
            violations += !(v >= 0.0 && v <= 1.0);
            violations += std::abs(proportion(a, b, a, b, kernel) - 1.0) > tol;
            violations += std::abs(proportion(c, d, a, b, kernel) - v) > tol;
            violations += std::abs(proportion(b, a, d, c, kernel) - v) > tol;
        }
    }
    return {violations == 0, std::to_string(violations) + " violations over 3 x 10^4 quadruples"};
}

Outcome label_transfer_check() {
    int mismatches = 0;
    for (int m = 0; m < 8; ++m) {
        const int a = bit(m, 2), b = bit(m, 1), c = bit(m, 0);
        const auto got = label_transfer(a, b, c, 2);
        const auto want = oracle::boolean_completion(a, b, c);
        mismatches += got != want;
    }
    const bool abstain = !label_transfer(0, 1, 1, 2) && !label_transfer(1, 0, 0, 2);
    // Class order C < B < A < A*: A : B :: B : C.
    const bool four = label_transfer(2, 1, 1, 4) == 0;
    return {mismatches == 0 && abstain && four,
            std::to_string(mismatches) + " binary mismatches, abstentions " + (abstain ? "ok" : "wrong") +
                ", A:B::B:C " + (four ? "ok" : "wrong")};
}

LabeledDataset random_labeled(std::mt19937_64& rng, std::size_t n, std::size_t d, int classes) {
    const auto rows = oracle::random_rows(n, d, rng);
    std::uniform_int_distribution<int> pick(0, classes - 1);
    std::vector<Label> labels(n);
    for (auto& y : labels) y = pick(rng);
    std::vector<std::string> names(d, "f"), class_names;
    for (int c = 0; c < classes; ++c) class_names.push_back(std::to_string(c));
    return LabeledDataset(names, FeatureMatrix::from_rows(rows), labels, class_names);
}

PreferenceDataset random_preferences(std::mt19937_64& rng, std::size_t n, std::size_t d, std::size_t m) {
    const auto rows = oracle::random_rows(n, d, rng);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<Preference> prefs;
    while (prefs.size() < m) {
        const auto a = pick(rng), b = pick(rng);
        if (a != b && seen.emplace(a, b).second) prefs.push_back({a, b});
    }
    return PreferenceDataset(std::vector<std::string>(d, "f"), FeatureMatrix::from_rows(rows), prefs);
}

Outcome search_equivalence() {
    const auto start = Clock::now();
    int compared = 0, differing = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 60)(rng);
        const std::size_t d = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        const auto train = random_labeled(rng, n, d, 2 + int(seed % 3));
        const auto query = oracle::random_rows(1, d, rng).front();
        const auto prefs = random_preferences(rng, n, d, std::min<std::size_t>(2 * n, n * (n - 1)));
        const auto pair = oracle::random_rows(2, d, rng);
        for (std::size_t k : {1, 5, 25}) {
            const auto kernel = KernelKind::arithmetic();
            differing += top_k_triplets(train, query, k, kernel) != reference::top_k_triplets(train, query, k, kernel);
            differing += top_k_pairs(prefs, pair[0], pair[1], k, kernel) !=
                         reference::top_k_pairs(prefs, pair[0], pair[1], k, kernel);
            compared += 2;
        }
    }
    const double secs = seconds_since(start);
    return {differing == 0 && secs < 30.0,
            std::to_string(differing) + "/" + std::to_string(compared) + " differ, " + fmt("%.2f s", secs)};
}

Outcome worked_prediction() {
    const LabeledDataset train({"x", "y"}, FeatureMatrix::from_rows({{0.1, 0.1}, {0.2, 0.2}, {0.9, 0.9}}), {0, 0, 1},
                               {"0", "1"});
    const std::vector<double> query{0.8, 0.8};
    const auto best = top_k_triplets(train, query, 1, KernelKind::arithmetic());
    const auto pred = predict_class(train, query, 1, KernelKind::arithmetic());
    const bool ok = best.size() == 1 && best[0].indices == std::array<std::size_t, 3>{1, 0, 2} &&
                    best[0].degree == 1.0 && pred.label == 1;
    return {ok, "top triplet (p" + std::to_string(best[0].indices[0] + 1) + ",p" +
                    std::to_string(best[0].indices[1] + 1) + ",p" + std::to_string(best[0].indices[2] + 1) +
                    ") degree " + fmt("%.17g", best[0].degree) + ", label " +
                    (pred.label ? std::to_string(*pred.label) : "none")};
}

Outcome classifier_lift() {
    const auto start = Clock::now();
    double lift_sum = 0.0, acc_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthSpec spec;
        spec.n = 200;
        spec.d = 5;
        spec.num_classes = 2;
        const auto synth = synth_generate(spec, seed);
        const auto split = holdout_split(spec.n, 0.5, seed);
        const auto train = synth.labeled.subset(split.train);
        const auto test = synth.labeled.subset(split.holdout);

        std::map<Label, std::size_t> freq;
        for (auto y : train.labels()) ++freq[y];
        Label majority = 0;
        for (auto& [y, c] : freq)
            if (c > freq[majority]) majority = y;

        std::size_t right = 0, base = 0;
        for (std::size_t i = 0; i < test.size(); ++i) {
            const auto p = predict_class(train, test.instance(i), 5, KernelKind::arithmetic());
            right += p.label == test.label(i);
            base += majority == test.label(i);
        }
        const double acc = double(right) / double(test.size());
        acc_sum += acc;
        lift_sum += acc - double(base) / double(test.size());
    }
    const double lift = lift_sum / 5.0, secs = seconds_since(start);
    return {lift >= 0.15 && secs < 60.0, "mean accuracy " + fmt("%.3f", acc_sum / 5.0) + ", lift " +
                                             fmt("%.3f", lift) + ", " + fmt("%.2f s", secs)};
}

Outcome preference_round_trip() {
    std::size_t failures = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        SynthSpec spec;
        spec.n = 60;
        spec.d = 5;
        const auto synth = synth_generate(spec, seed);
        const auto& train = synth.preferences;
        for (const auto& pref : train.preferences()) {
            const auto p = predict_preference(train, train.instance(pref.winner), train.instance(pref.loser), 1,
                                              KernelKind::arithmetic());
            failures += !(p.direction == Direction::CPrefD && p.probability_c_over_d() == 1.0);
            ++total;
        }
    }
    return {failures == 0, std::to_string(failures) + "/" + std::to_string(total) + " stored preferences missed"};
}

Outcome ranking_validity() {
    int exact = 0;
    bool permutations = true;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthSpec spec;
        spec.n = 200;
        spec.d = 5;
        spec.num_preferences = 2000;
        const auto train = synth_generate(spec, seed).preferences;
        SynthSpec qspec;
        qspec.n = 8;
        qspec.d = 5;
        const auto q = synth_generate(qspec, seed + 1000);
        const auto ranking = predict_ranking(train, q.labeled.instances(), 5, KernelKind::arithmetic());

        auto sorted = ranking.order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) permutations &= sorted[i] == i;

        std::vector<std::size_t> latent(8);
        for (std::size_t i = 0; i < 8; ++i) latent[i] = i;
        std::stable_sort(latent.begin(), latent.end(),
                         [&](std::size_t x, std::size_t y) { return q.latent_scores[x] > q.latent_scores[y]; });
        // Count discordant pairs for the report.
        int discordant = 0;
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = i + 1; j < 8; ++j)
                discordant += (q.latent_scores[i] > q.latent_scores[j]) != (ranking.rank[i] < ranking.rank[j]);
        exact += ranking.order == latent;
        per_seed += (per_seed.empty() ? "" : " ") + std::to_string(discordant);
    }
    return {permutations && exact >= 4, std::to_string(exact) + "/5 seeds match the latent order, permutations " +
                                            (permutations ? "valid" : "INVALID") +
                                            ", discordant pairs per seed: " + per_seed};
}

std::vector<double> brute_analogy_curve(const std::vector<std::vector<double>>& x,
                                        const std::vector<std::vector<double>>& queries,
                                        const std::vector<double>& grid) {
    std::vector<double> out(grid.size(), 0.0);
    const std::size_t n = x.size();
    for (const auto& q : queries) {
        std::vector<double> hits(grid.size(), 0.0);
        double total = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    if (a == b || a == c || b == c) continue;
                    const double deg = oracle::arithmetic_mean(x[a], x[b], x[c], q);
                    total += 1.0;
                    for (std::size_t j = 0; j < grid.size(); ++j) hits[j] += deg >= grid[j];
                }
        for (std::size_t j = 0; j < grid.size(); ++j) out[j] += hits[j] / total / double(queries.size());
    }
    return out;
}

std::vector<double> brute_similarity_curve(const std::vector<std::vector<double>>& x,
                                           const std::vector<std::vector<double>>& queries,
                                           const std::vector<double>& grid) {
    std::vector<double> out(grid.size(), 0.0);
    for (const auto& q : queries) {
        std::vector<double> hits(grid.size(), 0.0);
        for (const auto& row : x) {
            const double s = oracle::l1_similarity(row, q);
            for (std::size_t j = 0; j < grid.size(); ++j) hits[j] += s >= grid[j];
        }
        for (std::size_t j = 0; j < grid.size(); ++j) out[j] += hits[j] / double(x.size()) / double(queries.size());
    }
    return out;
}

Outcome curve_correctness() {
    const auto grid = default_thresholds();
    std::mt19937_64 rng(10);
    const auto x = oracle::random_rows(10, 4, rng);
    const auto q = oracle::random_rows(5, 4, rng);
    const auto xm = FeatureMatrix::from_rows(x), qm = FeatureMatrix::from_rows(q);
    const auto a = analogy_curve(xm, qm, grid, KernelKind::arithmetic());
    const auto s = similarity_curve(xm, qm, grid);
    const auto ea = brute_analogy_curve(x, q, grid);
    const auto es = brute_similarity_curve(x, q, grid);
    double exact_err = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        exact_err = std::max({exact_err, std::abs(a.fractions[j] - ea[j]), std::abs(s.fractions[j] - es[j])});

    double mean_sampled_err = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 r(100 + seed);
        const auto x20 = FeatureMatrix::from_rows(oracle::random_rows(20, 4, r));
        const auto q20 = FeatureMatrix::from_rows(oracle::random_rows(5, 4, r));
        const auto exact = analogy_curve(x20, q20, grid, KernelKind::arithmetic());
        const auto sampled = analogy_curve(x20, q20, grid, KernelKind::arithmetic(), CurveSampling::sampled(5000, seed));
        double worst = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j)
            worst = std::max(worst, std::abs(exact.fractions[j] - sampled.fractions[j]));
        mean_sampled_err += worst / 10.0;
    }
    return {exact_err <= 1e-12 && mean_sampled_err <= 0.03,
            "exact max error " + fmt("%.2e", exact_err) + ", sampled mean max deviation " +
                fmt("%.4f", mean_sampled_err)};
}

Outcome curve_shape() {
    SynthSpec spec;
    spec.n = 100;
    spec.d = 5;
    const auto synth = synth_generate(spec, 1);
    const auto split = holdout_split(spec.n, 0.2, 1);
    const auto& all = synth.labeled.instances();
    const auto train = all.select_rows(split.train), queries = all.select_rows(split.holdout);
    const auto grid = default_thresholds();
    const auto a = analogy_curve(train, queries, grid, KernelKind::arithmetic());
    const auto s = similarity_curve(train, queries, grid);
    const auto cmp = compare_curves(a, s);
    bool above = true;
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (grid[j] >= 0.9 - 1e-12) above &= a.fractions[j] > s.fractions[j];
    const double fa = cmp.floor_threshold_analogy.value_or(-1.0);
    const double fs = cmp.floor_threshold_similarity.value_or(-1.0);
    return {above && fa > fs, std::string("analogy above similarity for t >= 0.9: ") + (above ? "yes" : "no") +
                                  " (at 0.9: " + fmt("%.5f", a.fractions[90]) + " vs " + fmt("%.5f", s.fractions[90]) +
                                  "), floor crossings " + fmt("%.2f", fa) + " vs " + fmt("%.2f", fs)};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / ("analogy_acceptance_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    const auto p = [&](const std::string& name) { return (dir / name).string(); };

    std::ostringstream sink;
    auto run = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "analogy");
        std::ostringstream out, err;
        const int status = cli::run(args, out, err);
        return std::make_pair(status, out.str());
    };

    int failures = 0, checks = 0;
    run({"synth", "--n", "60", "--d", "4", "--classes", "3", "--seed", "7", "--out", p("a")});
    run({"synth", "--n", "60", "--d", "4", "--classes", "3", "--seed", "7", "--out", p("b")});
    failures += slurp(p("a.csv")) != slurp(p("b.csv")) || slurp(p("a_prefs.csv")) != slurp(p("b_prefs.csv"));
    ++checks;

    const std::vector<std::vector<std::string>> commands{
        {"predict-class", "--data", p("a.csv"), "--query-row", "0", "--query-row", "5", "--query-row", "9"},
        {"predict-rank", "--data", p("a.csv"), "--prefs", p("a_prefs.csv"), "--query-row", "1", "--query-row", "2",
         "--query-row", "3", "--query-row", "4"},
        {"explain-class", "--data", p("a.csv"), "--query-row", "2", "--m", "4"},
        {"explain-class", "--data", p("a.csv"), "--query-row", "2", "--format", "text", "--contrast", "0"},
        {"explain-pref", "--data", p("a.csv"), "--prefs", p("a_prefs.csv"), "--c-row", "3", "--d-row", "8"},
        {"curves", "--data", p("a.csv"), "--seed", "3"},
        {"curves", "--data", p("a.csv"), "--seed", "3", "--samples", "3000"},
    };
    for (const auto& cmd : commands) {
        std::vector<std::string> outputs;
        for (const char* workers : {"1", "1", "2", "4"}) {
            auto args = cmd;
            args.insert(args.end(), {"--workers", workers});
            const auto [status, out] = run(args);
            failures += status != 0;
            outputs.push_back(out);
        }
        failures += std::adjacent_find(outputs.begin(), outputs.end(), std::not_equal_to<>()) != outputs.end();
        ++checks;
    }
    fs::remove_all(dir);
    return {failures == 0, std::to_string(checks - std::min(failures, checks)) + "/" + std::to_string(checks) +
                               " subcommand configurations byte-identical across runs and 1/2/4 workers"};
}

Outcome performance() {
    SynthSpec spec;
    spec.n = 200;
    spec.d = 5;
    const auto train = synth_generate(spec, 13).labeled;
    std::mt19937_64 rng(14);
    const auto query = oracle::random_rows(1, 5, rng).front();
    const auto kernel = KernelKind::arithmetic();

    double exhaustive = 1e300, pruned = 1e300;
    bool same = true;
    for (int rep = 0; rep < 3; ++rep) {
        auto t0 = Clock::now();
        const auto ref = reference::top_k_triplets(train, query, 5, kernel);
        exhaustive = std::min(exhaustive, seconds_since(t0));
        t0 = Clock::now();
        const auto fast = top_k_triplets(train, query, 5, kernel);
        pruned = std::min(pruned, seconds_since(t0));
        same &= ref == fast;
    }
    return {same && exhaustive <= 10.0 && pruned <= exhaustive,
            "exhaustive " + fmt("%.3f s", exhaustive) + ", pruned " + fmt("%.3f s", pruned) +
                (same ? ", identical results" : ", RESULTS DIFFER")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Boolean table exactness", boolean_table},
        {"Boolean reduction", boolean_reduction},
        {"kernel properties", kernel_properties},
        {"label transfer", label_transfer_check},
        {"search oracle equivalence", search_equivalence},
        {"worked prediction", worked_prediction},
        {"classifier lift", classifier_lift},
        {"preference round-trip", preference_round_trip},
        {"ranking validity", ranking_validity},
        {"curve correctness", curve_correctness},
        {"curve shape", curve_shape},
        {"determinism", cli_determinism},
        {"desk-scale performance", performance},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
