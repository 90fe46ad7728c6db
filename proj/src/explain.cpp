#include "analogy/explain.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "analogy/error.hpp"

namespace analogy {

using nlohmann::json;

DeviationVector deviation(std::span<const double> x, std::span<const double> y,
                          const std::vector<std::string>& feature_names, KernelVariant variant) {
    if (x.size() != y.size() || x.size() != feature_names.size()) {
        throw DimensionError("deviation: vectors of length " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()) + " for " + std::to_string(feature_names.size()) + " features");
    }
    DeviationVector out{feature_names, {}};
    out.values.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.values.push_back(relation(x[i], y[i], variant));
    return out;
}

std::string_view to_string(Direction direction) { return direction == Direction::CPrefD ? "c>d" : "d>c"; }

namespace {

void check_label(Label label, int num_classes, const char* what) {
    if (label < 0 || label >= num_classes) {
        throw ConfigError(std::string(what) + " " + std::to_string(label) + " is not a valid class index");
    }
}

std::vector<Degree> per_feature(std::span<const double> a, std::span<const double> b, std::span<const double> c,
                                std::span<const double> d, const KernelKind& kernel) {
    std::vector<Degree> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = proportion(a[i], b[i], c[i], d[i], kernel);
    return out;
}

}  // namespace

ClassExplanation explain_class(const LabeledDataset& train, const QueryRef& query, Label explained_label,
                               std::size_t m, const KernelKind& kernel, std::optional<Label> contrast_label,
                               const ExplainOptions& options) {
    check_label(explained_label, train.num_classes(), "explained label");
    if (contrast_label) check_label(*contrast_label, train.num_classes(), "contrast label");

    ClassExplanation e;
    e.query = query;
    e.feature_names = train.feature_names();
    e.class_names = train.class_names();
    e.explained_label = explained_label;
    e.contrast_label = contrast_label;
    e.kernel = kernel;
    e.min_degree = options.min_degree;

    const Label target = contrast_label.value_or(explained_label);
    const auto triplets = top_k_triplets(train, query.values, m, kernel, target, options.search);
    for (const auto& t : triplets) {
        if (t.degree < options.min_degree) continue;
        const auto [a, b, c] = t.indices;
        e.entries.push_back({t,
                             {train.label(a), train.label(b), train.label(c)},
                             deviation(train.instance(a), train.instance(b), e.feature_names, kernel.variant),
                             deviation(train.instance(c), query.values, e.feature_names, kernel.variant),
                             per_feature(train.instance(a), train.instance(b), train.instance(c), query.values, kernel)});
    }
    for (const auto& t : top_k_triplets(train, query.values, m, kernel, std::nullopt, options.search))
        e.votes.add(t.transferred_label);
    e.votes.finalize();
    return e;
}

PreferenceExplanation explain_preference(const PreferenceDataset& train, const QueryRef& c, const QueryRef& d,
                                         Direction direction, std::size_t m, const KernelKind& kernel,
                                         const ExplainOptions& options) {
    PreferenceExplanation e;
    e.c = c;
    e.d = d;
    e.feature_names = train.feature_names();
    e.direction = direction;
    e.kernel = kernel;
    e.min_degree = options.min_degree;

    const auto& first = direction == Direction::CPrefD ? c.values : d.values;
    const auto& second = direction == Direction::CPrefD ? d.values : c.values;
    for (const auto& p : top_k_pairs(train, c.values, d.values, m, kernel, direction, options.search)) {
        if (p.degree < options.min_degree) continue;
        const auto va = train.instance(p.winner);
        const auto vb = train.instance(p.loser);
        e.entries.push_back({p, deviation(va, vb, e.feature_names, kernel.variant),
                             deviation(first, second, e.feature_names, kernel.variant),
                             per_feature(va, vb, first, second, kernel)});
    }
    for (const auto& p : top_k_pairs(train, c.values, d.values, m, kernel, std::nullopt, options.search))
        e.votes.add(int(p.direction));
    e.votes.finalize();
    return e;
}

SimilarityExplanation explain_similarity(const LabeledDataset& train, const QueryRef& query, std::size_t k) {
    SimilarityExplanation e;
    e.query = query;
    e.class_names = train.class_names();
    for (const auto& nb : nearest_neighbors(train.instances(), query.values, k)) {
        e.neighbors.push_back({nb.index, nb.similarity, train.label(nb.index)});
        e.distribution.add(train.label(nb.index));
    }
    e.distribution.finalize();
    return e;
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "text") return ReportFormat::Text;
    if (name == "json") return ReportFormat::Json;
    throw ConfigError("unknown report format '" + std::string(name) + "' (expected text or json)");
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

// Non-finite relations (x / 0 under the geometric kernel) travel as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>(); }

json kernel_json(const KernelKind& k) { return {{"variant", to_string(k.variant)}, {"epsilon", k.epsilon}}; }
KernelKind kernel_from(const json& j) {
    return {parse_kernel_variant(j.at("variant").get<std::string>()), j.at("epsilon").get<double>()};
}

json query_json(const QueryRef& q) {
    return {{"row", q.row ? json(*q.row) : json(nullptr)}, {"values", q.values}};
}
QueryRef query_from(const json& j) {
    QueryRef q;
    if (!j.at("row").is_null()) q.row = j.at("row").get<std::size_t>();
    q.values = j.at("values").get<std::vector<double>>();
    return q;
}

json deviation_json(const DeviationVector& v) {
    json out = json::array();
    for (std::size_t i = 0; i < v.values.size(); ++i)
        out.push_back({{"feature", v.features[i]}, {"value", number_or_null(v.values[i])}});
    return out;
}
DeviationVector deviation_from(const json& j) {
    DeviationVector v;
    for (const auto& item : j) {
        v.features.push_back(item.at("feature").get<std::string>());
        v.values.push_back(number_from(item.at("value")));
    }
    return v;
}

template <class KeyName>
json votes_json(const VoteSummary& v, KeyName name) {
    json counts = json::object(), prob = json::object();
    for (const auto& [key, count] : v.counts) counts[name(key)] = count;
    for (const auto& [key, p] : v.probability) prob[name(key)] = p;
    return {{"counts", counts}, {"total", v.total}, {"probability", prob}};
}
template <class KeyIndex>
VoteSummary votes_from(const json& j, KeyIndex index) {
    VoteSummary v;
    for (const auto& item : j.at("counts").items()) v.counts[index(item.key())] = item.value().template get<std::size_t>();
    for (const auto& item : j.at("probability").items())
        v.probability[index(item.key())] = item.value().template get<double>();
    v.total = j.at("total").get<std::size_t>();
    return v;
}

Label class_from(const json& j, const std::vector<std::string>& class_names) {
    const auto name = j.get<std::string>();
    for (std::size_t i = 0; i < class_names.size(); ++i)
        if (class_names[i] == name) return Label(i);
    throw DataError("report names unknown class '" + name + "'");
}

Direction direction_from(std::string_view s) {
    if (s == "c>d") return Direction::CPrefD;
    if (s == "d>c") return Direction::DPrefC;
    throw DataError("unknown direction '" + std::string(s) + "'");
}

}  // namespace

void to_json(json& j, const ClassExplanation& e) {
    auto name = [&](int y) { return e.class_names.at(std::size_t(y)); };
    json entries = json::array();
    for (const auto& en : e.entries) {
        entries.push_back({{"a", en.triplet.indices[0]},
                           {"b", en.triplet.indices[1]},
                           {"c", en.triplet.indices[2]},
                           {"labels", {name(en.labels[0]), name(en.labels[1]), name(en.labels[2])}},
                           {"transferred_label", name(en.triplet.transferred_label)},
                           {"degree", en.triplet.degree},
                           {"deviations_ab", deviation_json(en.deviations_ab)},
                           {"deviations_cd", deviation_json(en.deviations_cd)},
                           {"per_feature_degrees", en.per_feature_degrees}});
    }
    j = {{"kind", "class"},
         {"query", query_json(e.query)},
         {"features", e.feature_names},
         {"class_names", e.class_names},
         {"explained_label", name(e.explained_label)},
         {"contrast_label", e.contrast_label ? json(name(*e.contrast_label)) : json(nullptr)},
         {"kernel", kernel_json(e.kernel)},
         {"min_degree", e.min_degree},
         {"entries", entries},
         {"votes", votes_json(e.votes, name)}};
}

void from_json(const json& j, ClassExplanation& e) {
    e = {};
    e.query = query_from(j.at("query"));
    e.feature_names = j.at("features").get<std::vector<std::string>>();
    e.class_names = j.at("class_names").get<std::vector<std::string>>();
    e.explained_label = class_from(j.at("explained_label"), e.class_names);
    if (!j.at("contrast_label").is_null()) e.contrast_label = class_from(j.at("contrast_label"), e.class_names);
    e.kernel = kernel_from(j.at("kernel"));
    e.min_degree = j.at("min_degree").get<double>();
    for (const auto& en : j.at("entries")) {
        ClassExplanationEntry x;
        x.triplet.indices = {en.at("a").get<std::size_t>(), en.at("b").get<std::size_t>(),
                             en.at("c").get<std::size_t>()};
        x.triplet.degree = en.at("degree").get<double>();
        x.triplet.transferred_label = class_from(en.at("transferred_label"), e.class_names);
        for (std::size_t i = 0; i < 3; ++i) x.labels[i] = class_from(en.at("labels").at(i), e.class_names);
        x.deviations_ab = deviation_from(en.at("deviations_ab"));
        x.deviations_cd = deviation_from(en.at("deviations_cd"));
        x.per_feature_degrees = en.at("per_feature_degrees").get<std::vector<double>>();
        e.entries.push_back(std::move(x));
    }
    e.votes = votes_from(j.at("votes"), [&](const std::string& s) { return class_from(json(s), e.class_names); });
}

void to_json(json& j, const PreferenceExplanation& e) {
    auto name = [](int key) { return std::string(to_string(Direction(key))); };
    json entries = json::array();
    for (const auto& en : e.entries) {
        entries.push_back({{"preference", en.pair.preference},
                           {"winner", en.pair.winner},
                           {"loser", en.pair.loser},
                           {"direction", to_string(en.pair.direction)},
                           {"degree", en.pair.degree},
                           {"deviations_ab", deviation_json(en.deviations_ab)},
                           {"deviations_cd", deviation_json(en.deviations_cd)},
                           {"per_feature_degrees", en.per_feature_degrees}});
    }
    j = {{"kind", "preference"},
         {"query", {{"c", query_json(e.c)}, {"d", query_json(e.d)}}},
         {"features", e.feature_names},
         {"explained_direction", to_string(e.direction)},
         {"kernel", kernel_json(e.kernel)},
         {"min_degree", e.min_degree},
         {"entries", entries},
         {"votes", votes_json(e.votes, name)}};
}

void from_json(const json& j, PreferenceExplanation& e) {
    e = {};
    e.c = query_from(j.at("query").at("c"));
    e.d = query_from(j.at("query").at("d"));
    e.feature_names = j.at("features").get<std::vector<std::string>>();
    e.direction = direction_from(j.at("explained_direction").get<std::string>());
    e.kernel = kernel_from(j.at("kernel"));
    e.min_degree = j.at("min_degree").get<double>();
    for (const auto& en : j.at("entries")) {
        PreferenceExplanationEntry x;
        x.pair = {en.at("preference").get<std::size_t>(), en.at("winner").get<std::size_t>(),
                  en.at("loser").get<std::size_t>(), en.at("degree").get<double>(),
                  direction_from(en.at("direction").get<std::string>())};
        x.deviations_ab = deviation_from(en.at("deviations_ab"));
        x.deviations_cd = deviation_from(en.at("deviations_cd"));
        x.per_feature_degrees = en.at("per_feature_degrees").get<std::vector<double>>();
        e.entries.push_back(std::move(x));
    }
    e.votes = votes_from(j.at("votes"), [](const std::string& s) { return int(direction_from(s)); });
}

void to_json(json& j, const SimilarityExplanation& e) {
    auto name = [&](int y) { return e.class_names.at(std::size_t(y)); };
    json neighbors = json::array();
    for (const auto& nb : e.neighbors)
        neighbors.push_back({{"index", nb.index}, {"similarity", nb.similarity}, {"label", name(nb.label)}});
    j = {{"kind", "similarity"},
         {"query", query_json(e.query)},
         {"class_names", e.class_names},
         {"neighbors", neighbors},
         {"votes", votes_json(e.distribution, name)}};
}

void from_json(const json& j, SimilarityExplanation& e) {
    e = {};
    e.query = query_from(j.at("query"));
    e.class_names = j.at("class_names").get<std::vector<std::string>>();
    for (const auto& nb : j.at("neighbors")) {
        e.neighbors.push_back({nb.at("index").get<std::size_t>(), nb.at("similarity").get<double>(),
                               class_from(nb.at("label"), e.class_names)});
    }
    e.distribution = votes_from(j.at("votes"), [&](const std::string& s) { return class_from(json(s), e.class_names); });
}

// ---------------------------------------------------------------------------
// Text
// ---------------------------------------------------------------------------

namespace {

std::string fixed(double v, bool sign = false) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, sign ? "%+.3f" : "%.3f", v);
    return buf;
}

std::string item_name(const QueryRef& q, const char* fallback) {
    return q.row ? "item #" + std::to_string(*q.row) : std::string(fallback);
}

const char* relation_symbol(KernelVariant v) { return v == KernelVariant::Geometric ? "/" : "-"; }

void feature_lines(std::ostringstream& out, const DeviationVector& left, const DeviationVector& right,
                   const std::vector<Degree>& degrees, const std::string& left_pair, const std::string& right_pair) {
    for (std::size_t i = 0; i < left.values.size(); ++i) {
        out << "    " << left.features[i] << ": " << left_pair << " = " << fixed(left.values[i], true) << ", "
            << right_pair << " = " << fixed(right.values[i], true) << ", degree " << fixed(degrees[i]) << '\n';
    }
}

}  // namespace

std::string render_report(const ClassExplanation& e, ReportFormat format) {
    if (format == ReportFormat::Json) return json(e).dump(2) + "\n";
    auto name = [&](Label y) { return e.class_names.at(std::size_t(y)); };
    const std::string who = item_name(e.query, "your item");
    const Label target = e.contrast_label.value_or(e.explained_label);
    const std::string op = relation_symbol(e.kernel.variant);

    std::ostringstream out;
    if (e.contrast_label) {
        out << "Why " << who << " could have label " << name(target) << " instead of " << name(e.explained_label)
            << " (" << to_string(e.kernel.variant) << " kernel):\n";
    } else {
        out << "Why " << who << " has label " << name(e.explained_label) << " (" << to_string(e.kernel.variant)
            << " kernel):\n";
    }
    if (e.entries.empty()) {
        out << "No analogy with degree >= " << fixed(e.min_degree) << " supporting label " << name(target)
            << " was found.\n";
        return out.str();
    }
    for (std::size_t n = 0; n < e.entries.size(); ++n) {
        const auto& en = e.entries[n];
        const auto [a, b, c] = en.triplet.indices;
        out << "Analogy " << n + 1 << " (degree " << fixed(en.triplet.degree) << "):\n"
            << "  The relationship between a (item #" << a << ", " << name(en.labels[0]) << ") and b (item #" << b
            << ", " << name(en.labels[1]) << ") is much the same as between c (item #" << c << ", "
            << name(en.labels[2]) << ") and " << who << ", so " << who << " is labeled "
            << name(en.triplet.transferred_label) << ".\n";
        feature_lines(out, en.deviations_ab, en.deviations_cd, en.per_feature_degrees, "a" + op + "b",
                      "c" + op + "query");
    }
    return out.str();
}

std::string render_report(const PreferenceExplanation& e, ReportFormat format) {
    if (format == ReportFormat::Json) return json(e).dump(2) + "\n";
    const std::string c = item_name(e.c, "c");
    const std::string d = item_name(e.d, "d");
    const bool forward = e.direction == Direction::CPrefD;
    const std::string& winner = forward ? c : d;
    const std::string& loser = forward ? d : c;
    const std::string op = relation_symbol(e.kernel.variant);

    std::ostringstream out;
    out << "Why " << winner << " is preferred to " << loser << " (" << to_string(e.kernel.variant) << " kernel):\n";
    if (e.entries.empty()) {
        out << "No analogy with degree >= " << fixed(e.min_degree) << " supporting this preference was found.\n";
        return out.str();
    }
    for (std::size_t n = 0; n < e.entries.size(); ++n) {
        const auto& en = e.entries[n];
        out << "Analogy " << n + 1 << " (degree " << fixed(en.pair.degree) << "):\n"
            << "  Item #" << en.pair.winner << " is preferred to item #" << en.pair.loser << ", and it deviates from it"
            << " in much the same way as " << winner << " deviates from " << loser << ".\n";
        feature_lines(out, en.deviations_ab, en.deviations_cd, en.per_feature_degrees, "winner" + op + "loser",
                      "query" + op + "pair");
    }
    return out.str();
}

std::string render_report(const SimilarityExplanation& e, ReportFormat format) {
    if (format == ReportFormat::Json) return json(e).dump(2) + "\n";
    auto name = [&](Label y) { return e.class_names.at(std::size_t(y)); };
    std::ostringstream out;
    out << "The " << e.neighbors.size() << " most similar training items to " << item_name(e.query, "your item")
        << ":\n";
    for (const auto& nb : e.neighbors)
        out << "  item #" << nb.index << " (" << name(nb.label) << "), similarity " << fixed(nb.similarity) << '\n';
    out << "Class distribution:";
    for (const auto& [y, count] : e.distribution.counts)
        out << ' ' << name(y) << ' ' << count << '/' << e.distribution.total;
    out << '\n';
    return out.str();
}

}  // namespace analogy
