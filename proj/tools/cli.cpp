#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "analogy/analysis.hpp"
#include "analogy/data.hpp"
#include "analogy/error.hpp"
#include "analogy/explain.hpp"
#include "analogy/predict.hpp"

namespace analogy::cli {

using nlohmann::json;

namespace {

// Every option any subcommand accepts; each subcommand binds a subset.
struct RunConfig {
    std::string kernel = "arithmetic";
    double epsilon = 0.0;
    std::size_t k = 5;
    std::size_t m = 3;
    double min_degree = 0.0;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    double holdout = 0.2;
    std::size_t grid = 101;
    int workers = 0;

    std::string data;
    std::string prefs;
    std::string queries;
    std::string label_column = "class";
    std::string class_order;
    std::string features;
    std::string out;
    std::string format = "json";

    std::vector<std::size_t> query_rows;
    std::optional<std::size_t> c_row, d_row;
    std::string label;
    std::string contrast;
    std::string direction;
    bool similarity = false;

    // synth
    std::size_t n = 0, d = 0;
    int classes = 2;
    double noise = 0.0;
    std::size_t num_prefs = 0;
    std::string weights;

    KernelKind kernel_kind() const {
        KernelKind kk{parse_kernel_variant(kernel), epsilon};
        kk.validate();
        return kk;
    }
    SearchOptions search() const { return {workers}; }
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(item);
    return out;
}

std::optional<std::vector<std::string>> class_order(const RunConfig& cfg) {
    if (cfg.class_order.empty()) return std::nullopt;
    return split_list(cfg.class_order);
}

bool has_column(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open file");
    std::string header;
    std::getline(in, header);
    std::stringstream s(header);
    std::string cell;
    while (std::getline(s, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\"\xEF\xBB\xBF"));
        cell.erase(cell.find_last_not_of(" \t\r\"") + 1);
        if (cell == name) return true;
    }
    return false;
}

// Feature table of a file, ignoring the label column when present.
InstanceTable load_features(const RunConfig& cfg, const std::string& path) {
    const bool labeled = has_column(path, cfg.label_column);
    auto csv = load_csv(path, labeled ? std::optional(cfg.label_column) : std::nullopt, class_order(cfg));
    return std::move(csv.table);
}

InstanceTable maybe_project(const RunConfig& cfg, InstanceTable t) {
    const auto subset = split_list(cfg.features);
    return subset.empty() ? t : project_features(t, subset);
}

struct Training {
    NormalizationParams params;
    InstanceTable table;  // normalized
    std::optional<LabelColumn> labels;
};

Training load_training(const RunConfig& cfg, bool need_labels) {
    auto csv = load_csv(cfg.data, need_labels ? std::optional(cfg.label_column) : std::nullopt, class_order(cfg));
    if (!need_labels && has_column(cfg.data, cfg.label_column)) {
        csv = load_csv(cfg.data, cfg.label_column, class_order(cfg));
    }
    auto normalized = normalize(maybe_project(cfg, std::move(csv.table)));
    for (const auto& f : normalized.params.dropped_features)
        std::clog << "warning: dropped constant feature '" << f << "'\n";
    return {std::move(normalized.params), std::move(normalized.table), std::move(csv.labels)};
}

LabeledDataset labeled(const Training& t) {
    return LabeledDataset(t.table.feature_names, t.table.instances, t.labels->labels, t.labels->class_names);
}

FeatureMatrix load_query_matrix(const RunConfig& cfg, const NormalizationParams& params) {
    return params.apply(maybe_project(cfg, load_features(cfg, cfg.queries))).instances;
}

void check_row(std::size_t row, std::size_t n, const char* what) {
    if (row >= n) {
        throw ConfigError(std::string(what) + " " + std::to_string(row) + " out of range (" + std::to_string(n) +
                          " rows)");
    }
}

std::vector<std::size_t> all_but(std::size_t n, std::size_t skip) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i)
        if (i != skip) rows.push_back(i);
    return rows;
}

// Maps a row of the left-out training subset back to its row in the file.
std::size_t file_row(std::size_t i, std::optional<std::size_t> left_out) {
    return left_out && i >= *left_out ? i + 1 : i;
}

json kernel_json(const KernelKind& k) { return {{"variant", to_string(k.variant)}, {"epsilon", k.epsilon}}; }

json votes_json(const VoteSummary& v, const std::vector<std::string>& names) {
    json counts = json::object(), prob = json::object();
    for (const auto& [y, c] : v.counts) counts[names.at(std::size_t(y))] = c;
    for (const auto& [y, p] : v.probability) prob[names.at(std::size_t(y))] = p;
    return {{"counts", counts}, {"total", v.total}, {"probability", prob}};
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw DataError(cfg.out + ": cannot open for writing");
    file << text;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void cmd_synth(const RunConfig& cfg) {
    if (!cfg.seed) throw ConfigError("synth requires --seed");
    SynthSpec spec;
    spec.n = cfg.n;
    spec.d = cfg.d;
    spec.num_classes = cfg.classes;
    spec.noise = cfg.noise;
    spec.num_preferences = cfg.num_prefs;
    for (const auto& w : split_list(cfg.weights)) spec.weights.push_back(std::stod(w));
    const auto data = synth_generate(spec, *cfg.seed);

    std::ofstream table(cfg.out + ".csv", std::ios::binary);
    std::ofstream prefs(cfg.out + "_prefs.csv", std::ios::binary);
    if (!table || !prefs) throw DataError(cfg.out + ": cannot open output files");
    write_csv(table, data.labeled);
    write_preferences_csv(prefs, data.preferences.preferences());
}

void cmd_predict_class(const RunConfig& cfg, std::ostream& out) {
    const auto training = load_training(cfg, true);
    const auto full = labeled(training);
    const auto kernel = cfg.kernel_kind();

    // (row label or null, query vector, training set)
    struct Job {
        std::optional<std::size_t> row;
        std::vector<double> values;
        std::optional<LabeledDataset> train;
    };
    std::vector<Job> jobs;
    if (!cfg.queries.empty()) {
        const auto q = load_query_matrix(cfg, training.params);
        std::vector<std::size_t> rows = cfg.query_rows;
        if (rows.empty())
            for (std::size_t i = 0; i < q.rows(); ++i) rows.push_back(i);
        for (auto r : rows) {
            check_row(r, q.rows(), "query row");
            jobs.push_back({r, {q.row(r).begin(), q.row(r).end()}, std::nullopt});
        }
    } else {
        if (cfg.query_rows.empty()) throw ConfigError("predict-class needs --query-row or --queries");
        for (auto r : cfg.query_rows) {
            check_row(r, full.size(), "query row");
            jobs.push_back({r, {full.instance(r).begin(), full.instance(r).end()}, full.subset(all_but(full.size(), r))});
        }
    }

    json preds = json::array();
    for (const auto& job : jobs) {
        const LabeledDataset& train = job.train ? *job.train : full;
        const auto pred = predict_class(train, job.values, cfg.k, kernel, cfg.search());
        const auto knn = knn_predict(train, job.values, std::min(cfg.k, train.size()));
        const auto& names = train.class_names();
        const auto left_out = job.train ? job.row : std::nullopt;
        json analogies = json::array();
        for (const auto& t : pred.analogies) {
            analogies.push_back({{"a", file_row(t.indices[0], left_out)},
                                 {"b", file_row(t.indices[1], left_out)},
                                 {"c", file_row(t.indices[2], left_out)},
                                 {"degree", t.degree},
                                 {"transferred_label", names.at(std::size_t(t.transferred_label))}});
        }
        json neighbors = json::array();
        for (const auto& nb : knn.neighbors) neighbors.push_back({{"index", file_row(nb.index, left_out)}, {"similarity", nb.similarity}});
        preds.push_back({{"query", {{"row", job.row ? json(*job.row) : json(nullptr)}, {"values", job.values}}},
                         {"label", pred.label ? json(names.at(std::size_t(*pred.label))) : json(nullptr)},
                         {"votes", votes_json(pred.votes, names)},
                         {"analogies", analogies},
                         {"knn", {{"label", names.at(std::size_t(knn.label))},
                                  {"votes", votes_json(knn.votes, names)},
                                  {"neighbors", neighbors}}}});
    }
    const json doc = {{"k", cfg.k}, {"kernel", kernel_json(kernel)}, {"training_source", cfg.queries.empty() ? "leave-one-out" : "full"}, {"predictions", preds}};
    emit(cfg, doc.dump(2) + "\n", out);
}

PreferenceDataset load_preference_training(const RunConfig& cfg, Training& training) {
    training = load_training(cfg, false);
    return PreferenceDataset(training.table.feature_names, training.table.instances,
                             load_preferences_csv(cfg.prefs));
}

void cmd_predict_rank(const RunConfig& cfg, std::ostream& out) {
    Training training;
    const auto train = load_preference_training(cfg, training);
    const auto kernel = cfg.kernel_kind();

    FeatureMatrix items;
    std::vector<std::size_t> rows = cfg.query_rows;
    if (!cfg.queries.empty()) {
        const auto q = load_query_matrix(cfg, training.params);
        if (rows.empty())
            for (std::size_t i = 0; i < q.rows(); ++i) rows.push_back(i);
        for (auto r : rows) {
            check_row(r, q.rows(), "query row");
            items.push_back(q.row(r));
        }
    } else {
        if (rows.size() < 2) throw ConfigError("predict-rank needs --queries or at least two --query-row values");
        for (auto r : rows) {
            check_row(r, train.size(), "query row");
            items.push_back(train.instance(r));
        }
    }

    const auto ranking = predict_ranking(train, items, cfg.k, kernel, cfg.search());
    json ranked = json::array();
    for (std::size_t pos = 0; pos < ranking.order.size(); ++pos) {
        const auto i = ranking.order[pos];
        ranked.push_back({{"rank", pos + 1},
                          {"item", i},
                          {"row", rows[i]},
                          {"wins", ranking.wins[i]},
                          {"probability_sum", ranking.probability_sum[i]}});
    }
    const json doc = {{"k", cfg.k}, {"kernel", kernel_json(kernel)}, {"ranking", ranked}};
    emit(cfg, doc.dump(2) + "\n", out);
}

void cmd_explain_class(const RunConfig& cfg, std::ostream& out) {
    const auto training = load_training(cfg, true);
    const auto full = labeled(training);
    const auto kernel = cfg.kernel_kind();
    const auto format = parse_report_format(cfg.format);
    if (cfg.query_rows.size() != 1) throw ConfigError("explain-class needs exactly one --query-row");
    const auto row = cfg.query_rows.front();

    QueryRef query;
    query.row = row;
    std::optional<LabeledDataset> loo;
    if (!cfg.queries.empty()) {
        const auto q = load_query_matrix(cfg, training.params);
        check_row(row, q.rows(), "query row");
        query.values.assign(q.row(row).begin(), q.row(row).end());
    } else {
        check_row(row, full.size(), "query row");
        query.values.assign(full.instance(row).begin(), full.instance(row).end());
        loo = full.subset(all_but(full.size(), row));
    }
    const LabeledDataset& train = loo ? *loo : full;
    const auto left_out = loo ? std::optional<std::size_t>(row) : std::nullopt;

    if (cfg.similarity) {
        auto e = explain_similarity(train, query, std::min(cfg.m, train.size()));
        for (auto& nb : e.neighbors) nb.index = file_row(nb.index, left_out);
        emit(cfg, render_report(e, format), out);
        return;
    }

    Label explained;
    if (!cfg.label.empty()) {
        explained = train.class_index(cfg.label);
    } else {
        const auto pred = predict_class(train, query.values, cfg.k, kernel, cfg.search());
        if (!pred.label) throw DataError("no analogy casts a vote for this query; pass --label to explain a label");
        explained = *pred.label;
    }
    std::optional<Label> contrast;
    if (!cfg.contrast.empty()) contrast = train.class_index(cfg.contrast);

    auto e = explain_class(train, query, explained, cfg.m, kernel, contrast, {cfg.min_degree, cfg.search()});
    for (auto& en : e.entries)
        for (auto& i : en.triplet.indices) i = file_row(i, left_out);
    emit(cfg, render_report(e, format), out);
}

void cmd_explain_pref(const RunConfig& cfg, std::ostream& out) {
    Training training;
    const auto train = load_preference_training(cfg, training);
    const auto kernel = cfg.kernel_kind();
    const auto format = parse_report_format(cfg.format);
    if (!cfg.c_row || !cfg.d_row) throw ConfigError("explain-pref needs --c-row and --d-row");

    const FeatureMatrix source = cfg.queries.empty() ? train.instances() : load_query_matrix(cfg, training.params);
    check_row(*cfg.c_row, source.rows(), "c row");
    check_row(*cfg.d_row, source.rows(), "d row");
    const QueryRef c{*cfg.c_row, {source.row(*cfg.c_row).begin(), source.row(*cfg.c_row).end()}};
    const QueryRef d{*cfg.d_row, {source.row(*cfg.d_row).begin(), source.row(*cfg.d_row).end()}};

    Direction direction;
    if (cfg.direction == "c>d") {
        direction = Direction::CPrefD;
    } else if (cfg.direction == "d>c") {
        direction = Direction::DPrefC;
    } else if (cfg.direction.empty()) {
        const auto pred = predict_preference(train, c.values, d.values, cfg.k, kernel, cfg.search());
        direction = pred.direction.value_or(Direction::CPrefD);
    } else {
        throw ConfigError("--direction must be c>d or d>c");
    }
    const auto e = explain_preference(train, c, d, direction, cfg.m, kernel, {cfg.min_degree, cfg.search()});
    emit(cfg, render_report(e, format), out);
}

void cmd_curves(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.seed && (cfg.samples || cfg.holdout > 0.0)) {
        throw ConfigError("curves requires --seed for the holdout split and sampling");
    }
    const auto training = load_training(cfg, false);
    const auto kernel = cfg.kernel_kind();
    const auto& all = training.table.instances;

    FeatureMatrix train_m, query_m;
    if (!cfg.queries.empty()) {
        train_m = all;
        query_m = load_query_matrix(cfg, training.params);
    } else {
        if (!(cfg.holdout > 0.0)) throw ConfigError("curves needs --holdout > 0 or --queries");
        const auto split = holdout_split(all.rows(), cfg.holdout, *cfg.seed);
        if (split.holdout.empty()) throw ConfigError("holdout split selects no query rows");
        train_m = all.select_rows(split.train);
        query_m = all.select_rows(split.holdout);
    }

    const auto grid = default_thresholds(cfg.grid);
    const auto sampling = cfg.samples ? CurveSampling::sampled(*cfg.samples, *cfg.seed) : CurveSampling::exact();
    const auto a = analogy_curve(train_m, query_m, grid, kernel, sampling, cfg.search());
    const auto s = similarity_curve(train_m, query_m, grid);
    std::ostringstream csv;
    write_curves_csv(csv, a, s);
    emit(cfg, csv.str(), out);
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Analogy-based prediction and explanation over tabular data", "analogy"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--kernel", cfg.kernel, "boolean, arithmetic or geometric")->capture_default_str();
        sub->add_option("--epsilon", cfg.epsilon, "sign tolerance of the arithmetic kernel")->check(CLI::Range(0.0, 0.999999999));
        sub->add_option("--workers", cfg.workers, "worker threads (0 = all); never changes outputs")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", cfg.out, "output file (default: standard output)");
        sub->add_option("--label-column", cfg.label_column, "name of the class column")->capture_default_str();
        sub->add_option("--class-order", cfg.class_order, "class names, lowest rank first, comma-separated");
        sub->add_option("--features", cfg.features, "comma-separated feature subset to project onto");
    };
    auto positive = CLI::Range(std::size_t(1), std::numeric_limits<std::size_t>::max());

    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
    synth->add_option("--n", cfg.n, "instances")->required();
    synth->add_option("--d", cfg.d, "features")->required();
    synth->add_option("--classes", cfg.classes, "number of classes")->capture_default_str();
    synth->add_option("--seed", cfg.seed, "random seed")->required();
    synth->add_option("--noise", cfg.noise, "latent score noise")->capture_default_str();
    synth->add_option("--prefs", cfg.num_prefs, "preference pairs (0 = 2n)");
    synth->add_option("--weights", cfg.weights, "comma-separated latent weights");
    synth->add_option("--out", cfg.out, "output prefix; writes PREFIX.csv and PREFIX_prefs.csv")->required();

    auto* pclass = app.add_subcommand("predict-class", "predict class labels by analogical transfer");
    common(pclass);
    pclass->add_option("--data", cfg.data, "training CSV")->required();
    pclass->add_option("--queries", cfg.queries, "query CSV (default: rows of the training file, left out)");
    pclass->add_option("--query-row", cfg.query_rows, "query row index (repeatable)");
    pclass->add_option("--k", cfg.k, "analogies per prediction")->check(positive)->capture_default_str();

    auto* prank = app.add_subcommand("predict-rank", "rank query items from stored preferences");
    common(prank);
    prank->add_option("--data", cfg.data, "instance CSV")->required();
    prank->add_option("--prefs", cfg.prefs, "preference CSV (winner,loser)")->required();
    prank->add_option("--queries", cfg.queries, "query CSV (default: rows of the instance file)");
    prank->add_option("--query-row", cfg.query_rows, "query row index (repeatable)");
    prank->add_option("--k", cfg.k, "analogies per pairwise prediction")->check(positive)->capture_default_str();

    auto* eclass = app.add_subcommand("explain-class", "explain a class label with analogies");
    common(eclass);
    eclass->add_option("--data", cfg.data, "training CSV")->required();
    eclass->add_option("--queries", cfg.queries, "query CSV (default: the training file, row left out)");
    eclass->add_option("--query-row", cfg.query_rows, "query row index")->required();
    eclass->add_option("--label", cfg.label, "class to explain (default: the analogical prediction)");
    eclass->add_option("--contrast", cfg.contrast, "contrast class: explain why the query could have it");
    eclass->add_option("--m", cfg.m, "analogies in the report")->check(positive)->capture_default_str();
    eclass->add_option("--k", cfg.k, "analogies for the default prediction")->check(positive)->capture_default_str();
    eclass->add_option("--min-degree", cfg.min_degree, "drop analogies below this degree")->check(CLI::Range(0.0, 1.0));
    eclass->add_option("--format", cfg.format, "json or text")->capture_default_str();
    eclass->add_flag("--similarity", cfg.similarity, "report the m nearest neighbors instead");

    auto* epref = app.add_subcommand("explain-pref", "explain a preference between two items");
    common(epref);
    epref->add_option("--data", cfg.data, "instance CSV")->required();
    epref->add_option("--prefs", cfg.prefs, "preference CSV (winner,loser)")->required();
    epref->add_option("--queries", cfg.queries, "CSV holding the c and d rows (default: the instance file)");
    epref->add_option("--c-row", cfg.c_row, "row of item c")->required();
    epref->add_option("--d-row", cfg.d_row, "row of item d")->required();
    epref->add_option("--direction", cfg.direction, "c>d or d>c (default: the predicted direction)");
    epref->add_option("--m", cfg.m, "analogies in the report")->check(positive)->capture_default_str();
    epref->add_option("--k", cfg.k, "analogies for the default prediction")->check(positive)->capture_default_str();
    epref->add_option("--min-degree", cfg.min_degree, "drop analogies below this degree")->check(CLI::Range(0.0, 1.0));
    epref->add_option("--format", cfg.format, "json or text")->capture_default_str();

    auto* curves = app.add_subcommand("curves", "decumulative analogy and similarity curves as CSV");
    common(curves);
    curves->add_option("--data", cfg.data, "instance CSV")->required();
    curves->add_option("--queries", cfg.queries, "query CSV (default: a holdout split of the data)");
    curves->add_option("--holdout", cfg.holdout, "holdout fraction used as queries")->check(CLI::Range(0.0, 0.99))->capture_default_str();
    curves->add_option("--samples", cfg.samples, "sampled triplets per query (default: exact)")->check(positive);
    curves->add_option("--seed", cfg.seed, "random seed");
    curves->add_option("--grid", cfg.grid, "threshold grid points")->check(CLI::Range(std::size_t(2), std::size_t(100001)))->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        if (synth->parsed()) cmd_synth(cfg);
        else if (pclass->parsed()) cmd_predict_class(cfg, out);
        else if (prank->parsed()) cmd_predict_rank(cfg, out);
        else if (eclass->parsed()) cmd_explain_class(cfg, out);
        else if (epref->parsed()) cmd_explain_pref(cfg, out);
        else if (curves->parsed()) cmd_curves(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: data: " << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}

}  // namespace analogy::cli
