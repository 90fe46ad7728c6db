// Exhaustive serial search vs the pruned parallel search at desk scale.
//
//   bench_search [--n 200] [--d 5] [--k 5] [--queries 10] [--seed 1]

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "analogy/data.hpp"
#include "analogy/search.hpp"

using namespace analogy;

int main(int argc, char** argv) {
    std::size_t n = 200, d = 5, k = 5, num_queries = 10;
    std::uint64_t seed = 1;
    CLI::App app{"triplet search benchmark"};
    app.add_option("--n", n)->capture_default_str();
    app.add_option("--d", d)->capture_default_str();
    app.add_option("--k", k)->capture_default_str();
    app.add_option("--queries", num_queries)->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    SynthSpec spec;
    spec.n = n + num_queries;
    spec.d = d;
    const auto data = synth_generate(spec, seed).labeled;
    std::vector<std::size_t> train_rows, query_rows;
    for (std::size_t i = 0; i < spec.n; ++i) (i < n ? train_rows : query_rows).push_back(i);
    const auto train = data.subset(train_rows);
    const auto queries = data.instances().select_rows(query_rows);
    const auto kernel = KernelKind::arithmetic();

    using Clock = std::chrono::steady_clock;
    auto time_it = [&](auto&& search) {
        const auto start = Clock::now();
        for (std::size_t q = 0; q < queries.rows(); ++q) search(queries.row(q));
        return std::chrono::duration<double>(Clock::now() - start).count() / double(queries.rows());
    };

    std::printf("n=%zu d=%zu k=%zu queries=%zu\n", n, d, k, num_queries);
    const double exhaustive = time_it([&](auto q) { return reference::top_k_triplets(train, q, k, kernel); });
    std::printf("%-24s %10.4f s/query\n", "exhaustive (serial)", exhaustive);

    std::vector<int> worker_counts{1};
    for (int w = 2; w <= omp_get_max_threads(); w *= 2) worker_counts.push_back(w);
    if (worker_counts.back() != omp_get_max_threads()) worker_counts.push_back(omp_get_max_threads());
    for (int workers : worker_counts) {
        const double pruned = time_it([&](auto q) { return top_k_triplets(train, q, k, kernel, std::nullopt, {workers}); });
        char label[32];
        std::snprintf(label, sizeof label, "pruned (%d worker%s)", workers, workers == 1 ? "" : "s");
        std::printf("%-24s %10.4f s/query  speedup %.1fx\n", label, pruned, exhaustive / pruned);
    }
}
