#pragma once

// Synthetic benchmark generators, CSV ingestion and seeded splits.
//
// Random numbers come from std::mt19937_64, whose output sequence is fixed
// by the standard. Uniform and normal variates are derived from its raw
// 64-bit output here rather than through <random> distributions, whose
// algorithms are implementation-defined.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hftsvr/error.hpp"
#include "hftsvr/fuzzy.hpp"
#include "hftsvr/tsvr.hpp"

namespace hftsvr::data {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal by Box-Muller (cosine branch only).
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, n), rejection sampled.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t r = 0;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

private:
    std::mt19937_64 engine_;
};

enum class SyntheticFunction { power_two_thirds, sinc };

inline std::string to_string(SyntheticFunction f) {
    return f == SyntheticFunction::power_two_thirds ? "power_two_thirds" : "sinc";
}

inline SyntheticFunction synthetic_function_from_string(std::string_view s) {
    if (s == "power_two_thirds" || s == "power") return SyntheticFunction::power_two_thirds;
    if (s == "sinc") return SyntheticFunction::sinc;
    throw InvalidArgument("unknown synthetic function '" + std::string(s) + "'");
}

/// x^(2/3) taken as the real cube root of x^2, so it is even in x.
inline double power_two_thirds(double x) { return std::cbrt(x * x); }

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

inline double evaluate(SyntheticFunction f, double x) {
    return f == SyntheticFunction::power_two_thirds ? power_two_thirds(x) : sinc(x);
}

struct SyntheticSpec {
    SyntheticFunction function = SyntheticFunction::sinc;
    double domain_low = -4.0 * std::numbers::pi;
    double domain_high = 4.0 * std::numbers::pi;
    double noise_sigma = 0.2;
    std::size_t n_train = 272;
    std::size_t n_test = 526;
    std::uint64_t seed = 0;

    /// y = x^(2/3) + N(0, 0.2^2) on U[-2, 2], 200 train / 200 test.
    static SyntheticSpec power_benchmark(std::uint64_t seed = 0) {
        return {SyntheticFunction::power_two_thirds, -2.0, 2.0, 0.2, 200, 200, seed};
    }

    /// y = sin(x)/x + N(0, 0.2^2) on U[-4pi, 4pi], 272 train / 526 test.
    static SyntheticSpec sinc_benchmark(std::uint64_t seed = 0) {
        return {SyntheticFunction::sinc, -4.0 * std::numbers::pi, 4.0 * std::numbers::pi, 0.2,
                272, 526, seed};
    }

    void validate() const {
        if (!(domain_low < domain_high)) throw InvalidArgument("domain_low must be < domain_high");
        if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be non-negative");
        if (n_train < 1 || n_test < 1) throw InvalidArgument("sample counts must be positive");
    }

    friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

struct Provenance {
    std::optional<SyntheticSpec> synthetic;
    std::string source_path;
    std::uint64_t seed = 0;
    std::vector<double> feature_means;  // normalization applied on load, if any
    std::vector<double> feature_stds;
    std::size_t dropped_rows = 0;
};

struct Dataset {
    TrainingSet train;
    TrainingSet test;  // noise-free targets for synthetic data
    Provenance provenance;
};

inline Dataset generate(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    Dataset ds;
    ds.provenance.synthetic = spec;
    ds.provenance.seed = spec.seed;

    const auto n_train = static_cast<Eigen::Index>(spec.n_train);
    const auto n_test = static_cast<Eigen::Index>(spec.n_test);
    ds.train.inputs.resize(n_train, 1);
    ds.train.targets.resize(n_train);
    for (Eigen::Index i = 0; i < n_train; ++i) {
        ds.train.inputs(i, 0) = rng.uniform(spec.domain_low, spec.domain_high);
    }
    for (Eigen::Index i = 0; i < n_train; ++i) {
        ds.train.targets[i] =
            evaluate(spec.function, ds.train.inputs(i, 0)) + spec.noise_sigma * rng.normal();
    }
    ds.test.inputs.resize(n_test, 1);
    ds.test.targets.resize(n_test);
    for (Eigen::Index i = 0; i < n_test; ++i) {
        ds.test.inputs(i, 0) = rng.uniform(spec.domain_low, spec.domain_high);
        ds.test.targets[i] = evaluate(spec.function, ds.test.inputs(i, 0));
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Seeded splits

/// Deterministic Fisher-Yates split of {0..m-1}. The first part holds
/// ceil(fraction * m) indices; both parts keep ascending order.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t m, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw InvalidArgument("split fraction must lie in (0, 1)");
    }
    const auto first =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m) - 1e-9));
    if (first == 0 || first >= m) {
        throw DegenerateSplit("split of " + std::to_string(m) + " rows at fraction " +
                              std::to_string(fraction) + " leaves an empty side");
    }
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    Rng rng(seed);
    for (std::size_t i = m - 1; i > 0; --i) {
        std::swap(perm[i], perm[static_cast<std::size_t>(rng.below(i + 1))]);
    }
    std::vector<std::size_t> a(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(first));
    std::vector<std::size_t> b(perm.begin() + static_cast<std::ptrdiff_t>(first), perm.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return {std::move(a), std::move(b)};
}

/// Seeded partition of {0..m-1} into k near-equal folds, each ascending.
inline std::vector<std::vector<std::size_t>> fold_indices(std::size_t m, std::size_t k,
                                                          std::uint64_t seed) {
    if (k < 2 || k > m) {
        throw DegenerateSplit(std::to_string(m) + " rows cannot form " + std::to_string(k) + " folds");
    }
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    Rng rng(seed);
    for (std::size_t i = m - 1; i > 0; --i) {
        std::swap(perm[i], perm[static_cast<std::size_t>(rng.below(i + 1))]);
    }
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(f * m / k),
                        perm.begin() + static_cast<std::ptrdiff_t>((f + 1) * m / k));
        std::sort(folds[f].begin(), folds[f].end());
    }
    return folds;
}

inline TrainingSet subset(const TrainingSet& ts, const std::vector<std::size_t>& rows) {
    TrainingSet out;
    out.inputs.resize(static_cast<Eigen::Index>(rows.size()), ts.dims());
    out.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const auto r = static_cast<Eigen::Index>(rows[k]);
        out.inputs.row(kk) = ts.inputs.row(r);
        out.targets[kk] = ts.targets[r];
    }
    return out;
}

inline std::pair<TrainingSet, TrainingSet> split(const TrainingSet& ts, double fraction,
                                                 std::uint64_t seed) {
    auto [a, b] = split_indices(static_cast<std::size_t>(ts.size()), fraction, seed);
    return {subset(ts, a), subset(ts, b)};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

struct NumericTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline NumericTable read_numeric_table(std::istream& in) {
    NumericTable table;
    std::string line;
    std::size_t row_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (!have_header) {
            bool all_numeric = true;
            for (auto f : fields) all_numeric = all_numeric && parse_number(f).has_value();
            if (all_numeric) throw MissingHeader("CSV header row is missing");
            for (auto f : fields) table.header.emplace_back(f);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw InconsistentArity("row " + std::to_string(row_no) + " has " +
                                    std::to_string(fields.size()) + " fields, header has " +
                                    std::to_string(table.header.size()));
        }
        std::vector<double> values;
        values.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto v = parse_number(fields[c]);
            if (!v) throw ParseError(row_no, c + 1, "not a number: '" + std::string(fields[c]) + "'");
            if (!std::isfinite(*v)) throw ParseError(row_no, c + 1, "non-finite value");
            values.push_back(*v);
        }
        table.rows.push_back(std::move(values));
    }
    if (!have_header) throw MissingHeader("CSV is empty");
    return table;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace detail

enum class CsvSchema { crisp, fuzzy };

/// Crisp schema: header x1,...,xd,y.
inline TrainingSet read_crisp_csv(std::istream& in) {
    const auto table = detail::read_numeric_table(in);
    if (table.header.size() < 2) throw InconsistentArity("crisp CSV needs at least x1,y");
    if (table.rows.empty()) throw EmptySet("crisp CSV has no data rows");
    const auto m = static_cast<Eigen::Index>(table.rows.size());
    const auto d = static_cast<Eigen::Index>(table.header.size() - 1);
    TrainingSet ts;
    ts.inputs.resize(m, d);
    ts.targets.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < d; ++j) ts.inputs(i, j) = row[static_cast<std::size_t>(j)];
        ts.targets[i] = row.back();
    }
    return ts;
}

/// Fuzzy schema: x1_c,x1_w,x1_l,x1_r,...,y_c,y_w,y_l,y_r
/// (center, core half-width, left spread, right spread).
inline std::vector<fuzzy::FuzzySample> read_fuzzy_csv(std::istream& in) {
    const auto table = detail::read_numeric_table(in);
    const std::size_t cols = table.header.size();
    if (cols < 8 || cols % 4 != 0) {
        throw InconsistentArity("fuzzy CSV needs 4 columns per variable and at least 8 columns");
    }
    if (table.rows.empty()) throw EmptySet("fuzzy CSV has no data rows");
    const std::size_t d = cols / 4 - 1;
    std::vector<fuzzy::FuzzySample> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        auto quad = [&](std::size_t var) {
            const std::size_t c = 4 * var;
            fuzzy::TrapezoidalFuzzyNumber t{row[c], row[c + 1], row[c + 2], row[c + 3]};
            try {
                t.validate();
            } catch (const DataError& e) {
                throw ParseError(i + 2, c + 2, e.what());
            }
            return t;
        };
        fuzzy::FuzzySample s;
        for (std::size_t j = 0; j < d; ++j) s.x.push_back(quad(j));
        s.y = quad(d);
        out.push_back(std::move(s));
    }
    return out;
}

inline TrainingSet load_crisp_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_crisp_csv(in);
}

inline std::vector<fuzzy::FuzzySample> load_fuzzy_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_fuzzy_csv(in);
}

using LoadedCsv = std::variant<TrainingSet, std::vector<fuzzy::FuzzySample>>;

inline LoadedCsv load_csv(const std::filesystem::path& path, CsvSchema schema) {
    if (schema == CsvSchema::crisp) return load_crisp_csv(path);
    return load_fuzzy_csv(path);
}

inline void write_crisp_csv(std::ostream& out, const TrainingSet& ts) {
    for (Eigen::Index j = 0; j < ts.dims(); ++j) out << 'x' << (j + 1) << ',';
    out << "y\n";
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        for (Eigen::Index j = 0; j < ts.dims(); ++j) out << format_double(ts.inputs(i, j)) << ',';
        out << format_double(ts.targets[i]) << '\n';
    }
}

inline void write_fuzzy_csv(std::ostream& out, const std::vector<fuzzy::FuzzySample>& samples) {
    if (samples.empty()) throw EmptySet("no fuzzy samples to write");
    const std::size_t d = samples.front().x.size();
    for (std::size_t j = 0; j < d; ++j) {
        const auto p = "x" + std::to_string(j + 1);
        out << p << "_c," << p << "_w," << p << "_l," << p << "_r,";
    }
    out << "y_c,y_w,y_l,y_r\n";
    auto quad = [&](const fuzzy::TrapezoidalFuzzyNumber& t) {
        out << format_double(t.center) << ',' << format_double(t.core_half_width) << ','
            << format_double(t.left_spread) << ',' << format_double(t.right_spread);
    };
    for (const auto& s : samples) {
        if (s.x.size() != d) throw RaggedDimensions("fuzzy samples have differing dimension");
        for (const auto& t : s.x) {
            quad(t);
            out << ',';
        }
        quad(s.y);
        out << '\n';
    }
}

inline void save_crisp_csv(const std::filesystem::path& path, const TrainingSet& ts) {
    auto out = detail::open_output(path);
    write_crisp_csv(out, ts);
}

// ---------------------------------------------------------------------------
// Provenance and dataset files

inline nlohmann::json to_json(const SyntheticSpec& s) {
    return {{"function", to_string(s.function)},
            {"domain_low", s.domain_low},
            {"domain_high", s.domain_high},
            {"noise_sigma", s.noise_sigma},
            {"n_train", s.n_train},
            {"n_test", s.n_test},
            {"seed", s.seed}};
}

inline SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
    SyntheticSpec s;
    s.function = synthetic_function_from_string(j.at("function").get<std::string>());
    s.domain_low = j.at("domain_low").get<double>();
    s.domain_high = j.at("domain_high").get<double>();
    s.noise_sigma = j.at("noise_sigma").get<double>();
    s.n_train = j.at("n_train").get<std::size_t>();
    s.n_test = j.at("n_test").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

inline nlohmann::json to_json(const Provenance& p) {
    nlohmann::json j;
    j["synthetic"] = p.synthetic ? to_json(*p.synthetic) : nlohmann::json(nullptr);
    j["source_path"] = p.source_path;
    j["seed"] = p.seed;
    j["feature_means"] = p.feature_means;
    j["feature_stds"] = p.feature_stds;
    j["dropped_rows"] = p.dropped_rows;
    return j;
}

inline Provenance provenance_from_json(const nlohmann::json& j) {
    Provenance p;
    if (!j.at("synthetic").is_null()) p.synthetic = synthetic_spec_from_json(j.at("synthetic"));
    p.source_path = j.at("source_path").get<std::string>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.feature_means = j.at("feature_means").get<std::vector<double>>();
    p.feature_stds = j.at("feature_stds").get<std::vector<double>>();
    p.dropped_rows = j.at("dropped_rows").get<std::size_t>();
    return p;
}

/// Writes <prefix>_train.csv, <prefix>_test.csv and the sidecar <prefix>.json.
inline void save_dataset(const std::filesystem::path& prefix, const Dataset& ds) {
    const std::string base = prefix.string();
    save_crisp_csv(base + "_train.csv", ds.train);
    save_crisp_csv(base + "_test.csv", ds.test);
    auto out = detail::open_output(base + ".json");
    out << to_json(ds.provenance).dump(2) << '\n';
}

inline Dataset load_dataset(const std::filesystem::path& prefix) {
    const std::string base = prefix.string();
    Dataset ds;
    ds.train = load_crisp_csv(base + "_train.csv");
    ds.test = load_crisp_csv(base + "_test.csv");
    auto in = detail::open_input(base + ".json");
    try {
        ds.provenance = provenance_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad provenance record: ") + e.what());
    }
    return ds;
}

// ---------------------------------------------------------------------------
// UCI regression sets (user supplied files, raw repository format)

/// Z-scores every input column in place; constant columns are only centered.
inline void standardize_features(TrainingSet& ts, Provenance& prov) {
    prov.feature_means.assign(static_cast<std::size_t>(ts.dims()), 0.0);
    prov.feature_stds.assign(static_cast<std::size_t>(ts.dims()), 1.0);
    for (Eigen::Index j = 0; j < ts.dims(); ++j) {
        const double mean = ts.inputs.col(j).mean();
        const double var =
            (ts.inputs.col(j).array() - mean).square().sum() / static_cast<double>(ts.size());
        const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
        ts.inputs.col(j) = (ts.inputs.col(j).array() - mean) / sd;
        prov.feature_means[static_cast<std::size_t>(j)] = mean;
        prov.feature_stds[static_cast<std::size_t>(j)] = sd;
    }
}

namespace detail {

inline std::vector<std::vector<std::string>> read_raw_rows(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        for (auto f : split_fields(line)) fields.emplace_back(f);
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace detail

/// servo.data: motor, screw (letters), pgain, vgain, class. Letters are
/// encoded by their position in sorted order; inputs are standardized.
inline Dataset load_servo(const std::filesystem::path& path) {
    const auto rows = detail::read_raw_rows(path);
    if (rows.empty()) throw EmptySet("servo file is empty");
    std::vector<std::vector<std::string>> levels(2);
    for (const auto& r : rows) {
        if (r.size() != 5) throw InconsistentArity("servo rows must have 5 fields");
        for (int c = 0; c < 2; ++c) levels[c].push_back(r[c]);
    }
    for (auto& l : levels) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    Dataset ds;
    ds.provenance.source_path = path.string();
    auto& ts = ds.train;
    ts.inputs.resize(static_cast<Eigen::Index>(rows.size()), 4);
    ts.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (int c = 0; c < 2; ++c) {
            const auto it = std::lower_bound(levels[c].begin(), levels[c].end(), rows[i][c]);
            ts.inputs(ii, c) = static_cast<double>(it - levels[c].begin());
        }
        for (int c = 2; c < 5; ++c) {
            const auto v = detail::parse_number(rows[i][static_cast<std::size_t>(c)]);
            if (!v) throw ParseError(i + 1, static_cast<std::size_t>(c) + 1, "not a number");
            if (c < 4) ts.inputs(ii, c) = *v;
            else ts.targets[ii] = *v;
        }
    }
    standardize_features(ts, ds.provenance);
    return ds;
}

/// Auto Price: either raw imports-85.data (26 fields; the 15 continuous
/// attributes plus price are kept) or a pre-extracted 16-column numeric file
/// with price last. Rows with missing values ('?') are dropped; inputs are
/// standardized.
inline Dataset load_auto_price(const std::filesystem::path& path) {
    static constexpr int kImportsColumns[] = {0, 1, 9, 10, 11, 12, 13, 16,
                                              18, 19, 20, 21, 22, 23, 24, 25};
    auto rows = detail::read_raw_rows(path);
    if (!rows.empty() && !detail::parse_number(rows.front().back()) &&
        rows.front().back() != "?") {
        rows.erase(rows.begin());  // header line
    }
    if (rows.empty()) throw EmptySet("auto price file is empty");
    std::vector<std::vector<double>> kept;
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::vector<int> cols;
        if (r.size() == 26) cols.assign(std::begin(kImportsColumns), std::end(kImportsColumns));
        else if (r.size() == 16) for (int c = 0; c < 16; ++c) cols.push_back(c);
        else throw InconsistentArity("auto price rows must have 26 or 16 fields");
        std::vector<double> values;
        bool missing = false;
        for (int c : cols) {
            const auto& f = r[static_cast<std::size_t>(c)];
            if (f == "?") {
                missing = true;
                break;
            }
            const auto v = detail::parse_number(f);
            if (!v) throw ParseError(i + 1, static_cast<std::size_t>(c) + 1, "not a number");
            values.push_back(*v);
        }
        if (missing) {
            ++dropped;
            continue;
        }
        kept.push_back(std::move(values));
    }
    if (kept.empty()) throw EmptySet("auto price file has no complete rows");
    Dataset ds;
    ds.provenance.source_path = path.string();
    ds.provenance.dropped_rows = dropped;
    auto& ts = ds.train;
    ts.inputs.resize(static_cast<Eigen::Index>(kept.size()), 15);
    ts.targets.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (int c = 0; c < 15; ++c) ts.inputs(ii, c) = kept[i][static_cast<std::size_t>(c)];
        ts.targets[ii] = kept[i][15];
    }
    standardize_features(ts, ds.provenance);
    return ds;
}

}  // namespace hftsvr::data
