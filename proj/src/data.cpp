#include "analogy/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "analogy/error.hpp"

namespace analogy {

// ---------------------------------------------------------------------------
// FeatureMatrix
// ---------------------------------------------------------------------------

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    FeatureMatrix m;
    for (const auto& r : rows) m.push_back(r);
    return m;
}

void FeatureMatrix::push_back(std::span<const double> row) {
    if (rows_ == 0 && values_.empty()) {
        cols_ = row.size();
    } else if (row.size() != cols_) {
        throw DimensionError("row " + std::to_string(rows_) + " has " + std::to_string(row.size()) +
                             " values, expected " + std::to_string(cols_));
    }
    values_.insert(values_.end(), row.begin(), row.end());
    ++rows_;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out(indices.size(), cols_);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] >= rows_) throw DataError("row index " + std::to_string(indices[r]) + " out of range");
        std::copy_n(row(indices[r]).begin(), cols_, out.row(r).begin());
    }
    return out;
}

FeatureMatrix FeatureMatrix::select_cols(std::span<const std::size_t> indices) const {
    FeatureMatrix out(rows_, indices.size());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < indices.size(); ++c) out(r, c) = (*this)(r, indices[c]);
    return out;
}

void InstanceTable::validate() const {
    if (!instances.empty() && instances.cols() != feature_names.size()) {
        throw DataError("table has " + std::to_string(feature_names.size()) + " feature names but " +
                        std::to_string(instances.cols()) + " columns");
    }
}

namespace {

void check_unit_interval(const FeatureMatrix& m, const char* what) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw DataError(std::string(what) + ": value " + std::to_string(v) + " at row " + std::to_string(i) +
                                ", feature " + std::to_string(j) + " is outside [0, 1]");
            }
        }
}

void check_shape(const std::vector<std::string>& names, const FeatureMatrix& m, const char* what) {
    if (names.empty()) throw DataError(std::string(what) + ": no features");
    if (m.rows() > 0 && m.cols() != names.size()) {
        throw DataError(std::string(what) + ": " + std::to_string(names.size()) + " feature names but " +
                        std::to_string(m.cols()) + " columns");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// LabeledDataset / PreferenceDataset
// ---------------------------------------------------------------------------

LabeledDataset::LabeledDataset(std::vector<std::string> feature_names, FeatureMatrix instances,
                               std::vector<Label> labels, std::vector<std::string> class_names)
    : feature_names_(std::move(feature_names)),
      instances_(std::move(instances)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
    check_shape(feature_names_, instances_, "labeled dataset");
    if (labels_.size() != instances_.rows()) {
        throw DataError("labeled dataset: " + std::to_string(labels_.size()) + " labels for " +
                        std::to_string(instances_.rows()) + " instances");
    }
    if (class_names_.empty()) throw DataError("labeled dataset: no classes");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || labels_[i] >= int(class_names_.size())) {
            throw DataError("labeled dataset: label " + std::to_string(labels_[i]) + " of instance " +
                            std::to_string(i) + " is not a valid class index");
        }
    }
    check_unit_interval(instances_, "labeled dataset");
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
    std::vector<Label> labels;
    labels.reserve(rows.size());
    for (auto r : rows) {
        if (r >= size()) throw DataError("row index " + std::to_string(r) + " out of range");
        labels.push_back(labels_[r]);
    }
    return LabeledDataset(feature_names_, instances_.select_rows(rows), std::move(labels), class_names_);
}

Label LabeledDataset::class_index(std::string_view name) const {
    auto it = std::find(class_names_.begin(), class_names_.end(), name);
    if (it == class_names_.end()) throw DataError("unknown class '" + std::string(name) + "'");
    return Label(it - class_names_.begin());
}

PreferenceDataset::PreferenceDataset(std::vector<std::string> feature_names, FeatureMatrix instances,
                                     std::vector<Preference> preferences)
    : feature_names_(std::move(feature_names)),
      instances_(std::move(instances)),
      preferences_(std::move(preferences)) {
    check_shape(feature_names_, instances_, "preference dataset");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t p = 0; p < preferences_.size(); ++p) {
        const auto& pref = preferences_[p];
        if (pref.winner >= size() || pref.loser >= size()) {
            throw DataError("preference " + std::to_string(p) + " references a missing instance");
        }
        if (pref.winner == pref.loser) {
            throw DataError("preference " + std::to_string(p) + " compares instance " + std::to_string(pref.winner) +
                            " with itself");
        }
        if (!seen.emplace(pref.winner, pref.loser).second) {
            throw DataError("preference " + std::to_string(p) + " duplicates (" + std::to_string(pref.winner) + ", " +
                            std::to_string(pref.loser) + ")");
        }
    }
    check_unit_interval(instances_, "preference dataset");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += ch;
        }
    }
    fields.push_back(trim(current));
    return fields;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

struct Records {
    std::vector<std::string> header;
    // (line number, fields)
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

Records read_records(std::istream& in, const std::string& source) {
    Records rec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (blank(line)) continue;
        auto fields = split_record(line);
        if (rec.header.empty()) {
            rec.header = std::move(fields);
            continue;
        }
        if (fields.size() != rec.header.size()) {
            throw DataError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(rec.header.size()));
        }
        rec.rows.emplace_back(line_no, std::move(fields));
    }
    if (rec.header.empty()) throw DataError(source + ": missing header row");
    if (rec.rows.empty()) throw DataError(source + ": dataset is empty");
    return rec;
}

LabelColumn encode_labels(const std::vector<std::pair<std::size_t, std::string>>& raw, const std::string& source,
                          const std::string& column, const std::optional<std::vector<std::string>>& class_order) {
    LabelColumn out;
    out.labels.reserve(raw.size());
    if (class_order) {
        if (class_order->empty()) throw ConfigError("class order is empty");
        std::map<std::string, Label> index;
        for (std::size_t i = 0; i < class_order->size(); ++i) {
            if (!index.emplace((*class_order)[i], Label(i)).second) {
                throw ConfigError("class order lists '" + (*class_order)[i] + "' twice");
            }
        }
        for (const auto& [line_no, value] : raw) {
            auto it = index.find(value);
            if (it == index.end()) {
                throw DataError(source + ": line " + std::to_string(line_no) + ", column '" + column +
                                "': unknown label value '" + value + "'");
            }
            out.labels.push_back(it->second);
        }
        out.class_names = *class_order;
        return out;
    }

    // Without an explicit order only numeric labels are accepted.
    std::map<double, std::string> spelling;
    std::vector<double> numeric;
    numeric.reserve(raw.size());
    for (const auto& [line_no, value] : raw) {
        auto v = parse_number(value);
        if (!v) {
            throw ConfigError(source + ": line " + std::to_string(line_no) + ", column '" + column +
                              "': non-numeric label '" + value + "' requires an explicit class order");
        }
        numeric.push_back(*v);
        spelling.emplace(*v, value);
    }
    std::map<double, Label> index;
    for (const auto& [v, name] : spelling) {
        index.emplace(v, Label(out.class_names.size()));
        out.class_names.push_back(name);
    }
    for (double v : numeric) out.labels.push_back(index.at(v));
    return out;
}

}  // namespace

CsvData parse_csv(std::istream& in, const std::string& source_name, const std::optional<std::string>& label_column,
                  const std::optional<std::vector<std::string>>& class_order) {
    const Records rec = read_records(in, source_name);

    std::optional<std::size_t> label_idx;
    if (label_column) {
        auto it = std::find(rec.header.begin(), rec.header.end(), *label_column);
        if (it == rec.header.end()) throw DataError(source_name + ": no column named '" + *label_column + "'");
        label_idx = std::size_t(it - rec.header.begin());
    }

    CsvData out;
    for (std::size_t c = 0; c < rec.header.size(); ++c)
        if (c != label_idx) out.table.feature_names.push_back(rec.header[c]);
    if (out.table.feature_names.empty()) throw DataError(source_name + ": no feature columns");

    std::vector<std::pair<std::size_t, std::string>> raw_labels;
    std::vector<double> row;
    for (const auto& [line_no, fields] : rec.rows) {
        row.clear();
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_idx) {
                if (fields[c].empty()) {
                    throw DataError(source_name + ": line " + std::to_string(line_no) + ", column '" +
                                    rec.header[c] + "': missing label");
                }
                raw_labels.emplace_back(line_no, fields[c]);
                continue;
            }
            auto v = parse_number(fields[c]);
            if (!v) {
                throw DataError(source_name + ": line " + std::to_string(line_no) + ", column '" + rec.header[c] +
                                "': " + (fields[c].empty() ? std::string("missing value")
                                                           : "non-numeric value '" + fields[c] + "'"));
            }
            row.push_back(*v);
        }
        out.table.instances.push_back(row);
    }
    if (label_idx) out.labels = encode_labels(raw_labels, source_name, *label_column, class_order);
    return out;
}

CsvData load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column,
                 const std::optional<std::vector<std::string>>& class_order) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    return parse_csv(in, path.string(), label_column, class_order);
}

std::vector<Preference> parse_preferences_csv(std::istream& in, const std::string& source_name) {
    const Records rec = read_records(in, source_name);
    auto column = [&](const char* name) {
        auto it = std::find(rec.header.begin(), rec.header.end(), name);
        if (it == rec.header.end()) throw DataError(source_name + ": no column named '" + name + "'");
        return std::size_t(it - rec.header.begin());
    };
    const std::size_t w = column("winner");
    const std::size_t l = column("loser");
    std::vector<Preference> prefs;
    prefs.reserve(rec.rows.size());
    auto index = [&](std::size_t line_no, const std::vector<std::string>& fields, std::size_t c) {
        std::size_t value = 0;
        const auto& cell = fields[c];
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
            throw DataError(source_name + ": line " + std::to_string(line_no) + ", column '" + rec.header[c] +
                            "': invalid row index '" + cell + "'");
        }
        return value;
    };
    for (const auto& [line_no, fields] : rec.rows) prefs.push_back({index(line_no, fields, w), index(line_no, fields, l)});
    return prefs;
}

std::vector<Preference> load_preferences_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    return parse_preferences_csv(in, path.string());
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

void write_csv(std::ostream& out, const LabeledDataset& data, const std::string& label_column) {
    for (const auto& name : data.feature_names()) out << name << ',';
    out << label_column << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.instance(i)) out << format_double(v) << ',';
        out << data.class_names()[std::size_t(data.label(i))] << '\n';
    }
}

void write_preferences_csv(std::ostream& out, std::span<const Preference> preferences) {
    out << "winner,loser\n";
    for (const auto& p : preferences) out << p.winner << ',' << p.loser << '\n';
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

NormalizedTable normalize(const InstanceTable& raw) {
    raw.validate();
    if (raw.size() == 0) throw DataError("normalize: no instances");
    NormalizedTable out;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < raw.dim(); ++j) {
        double lo = raw.instances(0, j);
        double hi = lo;
        for (std::size_t i = 1; i < raw.size(); ++i) {
            lo = std::min(lo, raw.instances(i, j));
            hi = std::max(hi, raw.instances(i, j));
        }
        if (lo < hi) {
            kept.push_back(j);
            out.params.retained.push_back({raw.feature_names[j], lo, hi});
        } else {
            out.params.dropped_features.push_back(raw.feature_names[j]);
        }
    }
    if (kept.empty()) throw DataError("normalize: every feature is constant");
    out.table = out.params.apply(raw);
    return out;
}

namespace {

std::vector<std::size_t> column_indices(const std::vector<std::string>& names, const std::vector<std::string>& wanted,
                                        const char* what) {
    std::vector<std::size_t> idx;
    idx.reserve(wanted.size());
    for (const auto& w : wanted) {
        auto it = std::find(names.begin(), names.end(), w);
        if (it == names.end()) throw DataError(std::string(what) + ": unknown feature '" + w + "'");
        idx.push_back(std::size_t(it - names.begin()));
    }
    return idx;
}

std::vector<std::string> retained_names(const NormalizationParams& p) {
    std::vector<std::string> names;
    for (const auto& r : p.retained) names.push_back(r.name);
    return names;
}

}  // namespace

InstanceTable NormalizationParams::apply(const InstanceTable& raw) const {
    raw.validate();
    InstanceTable out;
    out.feature_names = retained_names(*this);
    out.instances = raw.instances.select_cols(column_indices(raw.feature_names, out.feature_names, "normalize"));
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < retained.size(); ++j) {
            const auto& r = retained[j];
            const double v = (out.instances(i, j) - r.min) / (r.max - r.min);
            out.instances(i, j) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

InstanceTable NormalizationParams::denormalize(const InstanceTable& normalized) const {
    normalized.validate();
    InstanceTable out;
    out.feature_names = retained_names(*this);
    out.instances =
        normalized.instances.select_cols(column_indices(normalized.feature_names, out.feature_names, "denormalize"));
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < retained.size(); ++j) {
            const auto& r = retained[j];
            out.instances(i, j) = r.min + out.instances(i, j) * (r.max - r.min);
        }
    }
    return out;
}

void to_json(nlohmann::json& j, const NormalizationParams& params) {
    j = nlohmann::json::object();
    j["features"] = nlohmann::json::array();
    for (const auto& r : params.retained) j["features"].push_back({{"name", r.name}, {"min", r.min}, {"max", r.max}});
    j["dropped_features"] = params.dropped_features;
}

void from_json(const nlohmann::json& j, NormalizationParams& params) {
    params = {};
    for (const auto& f : j.at("features")) {
        FeatureRange r{f.at("name").get<std::string>(), f.at("min").get<double>(), f.at("max").get<double>()};
        if (!(r.min < r.max)) throw DataError("normalization params: feature '" + r.name + "' has min >= max");
        params.retained.push_back(std::move(r));
    }
    params.dropped_features = j.at("dropped_features").get<std::vector<std::string>>();
}

// ---------------------------------------------------------------------------
// Projection
// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> projection_indices(const std::vector<std::string>& names,
                                            std::span<const std::string> subset) {
    if (subset.empty()) throw ConfigError("feature projection: empty subset");
    return column_indices(names, std::vector<std::string>(subset.begin(), subset.end()), "feature projection");
}

}  // namespace

InstanceTable project_features(const InstanceTable& table, std::span<const std::string> subset) {
    const auto idx = projection_indices(table.feature_names, subset);
    return {std::vector<std::string>(subset.begin(), subset.end()), table.instances.select_cols(idx)};
}

LabeledDataset project_features(const LabeledDataset& data, std::span<const std::string> subset) {
    const auto idx = projection_indices(data.feature_names(), subset);
    return LabeledDataset(std::vector<std::string>(subset.begin(), subset.end()), data.instances().select_cols(idx),
                          data.labels(), data.class_names());
}

PreferenceDataset project_features(const PreferenceDataset& data, std::span<const std::string> subset) {
    const auto idx = projection_indices(data.feature_names(), subset);
    return PreferenceDataset(std::vector<std::string>(subset.begin(), subset.end()),
                             data.instances().select_cols(idx), data.preferences());
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

void SynthSpec::validate() const {
    if (n < 4) throw ConfigError("synth: n must be at least 4");
    if (d < 1) throw ConfigError("synth: d must be at least 1");
    if (num_classes < 2) throw ConfigError("synth: at least 2 classes are required");
    if (std::size_t(num_classes) > n) throw ConfigError("synth: more classes than instances");
    if (!weights.empty() && weights.size() != d) throw ConfigError("synth: weights must have length d");
    for (double w : weights)
        if (!std::isfinite(w)) throw ConfigError("synth: weights must be finite");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("synth: noise must be a finite value >= 0");
    if (num_preferences > n * (n - 1) / 2) throw ConfigError("synth: more preferences than distinct pairs");
}

SynthData synth_generate(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const std::vector<double> weights = spec.weights.empty() ? std::vector<double>(spec.d, 1.0) : spec.weights;

    FeatureMatrix x(spec.n, spec.d);
    for (std::size_t i = 0; i < spec.n; ++i)
        for (std::size_t j = 0; j < spec.d; ++j) x(i, j) = unit(rng);

    std::vector<double> score(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < spec.d; ++j) s += weights[j] * x(i, j);
        if (spec.noise > 0.0) s += spec.noise * gauss(rng);
        score[i] = s;
    }

    // Quantile bins: the r-th smallest score gets class floor(r * K / n).
    std::vector<std::size_t> order(spec.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
    std::vector<Label> labels(spec.n);
    for (std::size_t r = 0; r < spec.n; ++r) labels[order[r]] = Label(r * std::size_t(spec.num_classes) / spec.n);

    std::vector<std::string> feature_names, class_names;
    for (std::size_t j = 0; j < spec.d; ++j) feature_names.push_back("f" + std::to_string(j + 1));
    for (int c = 0; c < spec.num_classes; ++c) class_names.push_back(std::to_string(c));

    const std::size_t num_prefs = spec.num_preferences == 0 ? std::min(2 * spec.n, spec.n * (spec.n - 1) / 2)
                                                            : spec.num_preferences;
    std::uniform_int_distribution<std::size_t> pick(0, spec.n - 1);
    std::set<std::pair<std::size_t, std::size_t>> used;
    std::vector<Preference> prefs;
    prefs.reserve(num_prefs);
    while (prefs.size() < num_prefs) {
        std::size_t a = pick(rng), b = pick(rng);
        if (a == b) continue;
        if (!used.emplace(std::min(a, b), std::max(a, b)).second) continue;
        const bool a_wins = score[a] > score[b] || (score[a] == score[b] && a < b);
        prefs.push_back(a_wins ? Preference{a, b} : Preference{b, a});
    }

    return SynthData{LabeledDataset(feature_names, x, std::move(labels), std::move(class_names)),
                     PreferenceDataset(feature_names, x, std::move(prefs)), std::move(score)};
}

Split holdout_split(std::size_t n, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw ConfigError("holdout fraction must lie in [0, 1)");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto held = std::size_t(std::llround(double(n) * fraction));
    Split s;
    s.holdout.assign(idx.begin(), idx.begin() + std::ptrdiff_t(held));
    s.train.assign(idx.begin() + std::ptrdiff_t(held), idx.end());
    std::sort(s.holdout.begin(), s.holdout.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

}  // namespace analogy
