#pragma once

// Benchmark suites: datasets x regressors x seeds.
//
// For every (dataset, regressor) pair the grid search runs once on the seed-0
// training data; the chosen settings are then trained and evaluated on every
// seed. Synthetic seed k is data::generate with seed base_seed + k. File-backed
// sets are split 80/20 into train/test with seed base_seed + k. Reported
// seconds cover the training call only (no data generation, no grid search).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "hftsvr/config.hpp"
#include "hftsvr/data.hpp"
#include "hftsvr/grid_search.hpp"
#include "hftsvr/metrics.hpp"
#include "hftsvr/regressor.hpp"
#include "hftsvr/serialize.hpp"

namespace hftsvr {

struct DatasetSource {
    enum class Kind { synthetic, servo, auto_price, csv };

    Kind kind = Kind::synthetic;
    std::string name;
    data::SyntheticSpec synthetic;
    std::filesystem::path path;

    /// "power", "sinc", "servo:<path>", "auto_price:<path>" or "csv:<path>".
    static DatasetSource parse(const std::string& text) {
        DatasetSource s;
        const auto colon = text.find(':');
        const std::string head = text.substr(0, colon);
        if (colon == std::string::npos) {
            s.name = head;
            if (head == "power") s.synthetic = data::SyntheticSpec::power_benchmark();
            else if (head == "sinc") s.synthetic = data::SyntheticSpec::sinc_benchmark();
            else throw InvalidArgument("unknown dataset '" + text + "'");
            return s;
        }
        s.path = text.substr(colon + 1);
        if (s.path.empty()) throw InvalidArgument("dataset '" + text + "' has no path");
        s.name = head;
        if (head == "servo") s.kind = Kind::servo;
        else if (head == "auto_price") s.kind = Kind::auto_price;
        else if (head == "csv") {
            s.kind = Kind::csv;
            s.name = s.path.stem().string();
        } else throw InvalidArgument("unknown dataset kind '" + head + "'");
        return s;
    }

    [[nodiscard]] bool is_synthetic() const { return kind == Kind::synthetic; }
};

struct SuiteSpec {
    std::vector<DatasetSource> datasets;
    std::vector<RegressorKind> regressors;
    std::size_t seeds = 1;
    std::uint64_t base_seed = 0;
    std::filesystem::path output;  // empty: no files written
    GridSpec grid;
    RegressorSettings base;  // tsvr params and hierarchy template
    bool keep_models = false;
};

struct Stat {
    double mean = 0.0;
    std::optional<double> std;  // only when more than one seed
};

struct MetricsSummary {
    Stat sse, nmse, r2, seconds, sv_count;
    std::optional<Stat> mape;  // absent if any seed has undefined MAPE
};

struct PlotData {
    Matrix inputs;
    Vector targets;
    Vector predictions;
};

struct BenchmarkRow {
    std::string dataset;
    RegressorKind regressor = RegressorKind::tsvr;
    std::optional<RegressorSettings> chosen;
    double tuning_objective = 0.0;
    std::size_t failed_cells = 0;
    std::vector<std::uint64_t> seeds;  // seed of each entry in per_seed
    std::vector<MetricsReport> per_seed;
    std::optional<MetricsSummary> summary;
    std::vector<std::string> failures;
    std::vector<FittedModel> models;  // kept when SuiteSpec::keep_models
    std::optional<PlotData> plot;     // seed 0 test curve, synthetic sets
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;
    nlohmann::json fingerprint;
};

namespace detail {

inline Stat stat(const std::vector<double>& xs) {
    Stat s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

inline MetricsSummary summarize(const std::vector<MetricsReport>& reports) {
    std::vector<double> sse, nmse, r2, secs, sv, mape;
    bool mape_defined = true;
    for (const auto& r : reports) {
        sse.push_back(r.sse);
        nmse.push_back(r.nmse);
        r2.push_back(r.r2);
        secs.push_back(r.train_seconds);
        sv.push_back(static_cast<double>(r.sv_count));
        if (r.mape) mape.push_back(*r.mape);
        else mape_defined = false;
    }
    MetricsSummary s{stat(sse), stat(nmse), stat(r2), stat(secs), stat(sv), std::nullopt};
    if (mape_defined) s.mape = stat(mape);
    return s;
}

inline std::string read_cpu_model() {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) return std::string(data::detail::trim(line.substr(colon + 1)));
        }
    }
    return "unknown";
}

}  // namespace detail

inline nlohmann::json machine_fingerprint() {
    char host[256] = {};
    if (gethostname(host, sizeof host - 1) != 0) host[0] = '\0';
    return {
        {"hostname", host},
        {"cpu", detail::read_cpu_model()},
        {"hardware_threads", std::thread::hardware_concurrency()},
        {"compiler", __VERSION__},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION)},
    };
}

/// Train/test data for seed index k of a source. File-backed sources are
/// read once by the caller and passed in as `loaded`.
inline data::Dataset instantiate(const DatasetSource& source, const data::Dataset* loaded,
                                 std::uint64_t seed) {
    if (source.is_synthetic()) {
        auto spec = source.synthetic;
        spec.seed = seed;
        return data::generate(spec);
    }
    data::Dataset ds;
    ds.provenance = loaded->provenance;
    ds.provenance.seed = seed;
    std::tie(ds.test, ds.train) = data::split(loaded->train, 0.2, seed);
    return ds;
}

inline data::Dataset load_source(const DatasetSource& source) {
    switch (source.kind) {
    case DatasetSource::Kind::servo: return data::load_servo(source.path);
    case DatasetSource::Kind::auto_price: return data::load_auto_price(source.path);
    case DatasetSource::Kind::csv: {
        data::Dataset ds;
        ds.train = data::load_crisp_csv(source.path);
        ds.provenance.source_path = source.path.string();
        return ds;
    }
    case DatasetSource::Kind::synthetic: break;
    }
    throw InvalidArgument("synthetic sources are generated, not loaded");
}

using Logger = std::function<void(const std::string&)>;

inline BenchmarkResult run_benchmark(const SuiteSpec& suite, const Logger& log = {}) {
    auto note = [&](const std::string& msg) {
        if (log) log(msg);
    };
    if (suite.seeds < 1) throw InvalidArgument("suite: seeds must be >= 1");
    suite.grid.validate();

    BenchmarkResult result;
    result.fingerprint = machine_fingerprint();
    for (const auto& source : suite.datasets) {
        std::optional<data::Dataset> loaded;
        std::string load_error;
        if (!source.is_synthetic()) {
            try {
                loaded = load_source(source);
            } catch (const Error& e) {
                load_error = e.what();
            }
        }
        for (RegressorKind kind : suite.regressors) {
            BenchmarkRow row;
            row.dataset = source.name;
            row.regressor = kind;
            if (!source.is_synthetic() && !loaded) {
                row.failures.push_back("load: " + load_error);
                result.rows.push_back(std::move(row));
                continue;
            }
            const data::Dataset* file_data = loaded ? &*loaded : nullptr;

            RegressorSettings base = suite.base;
            base.kind = kind;
            try {
                const auto ds = instantiate(source, file_data, suite.base_seed);
                note("grid search: " + source.name + " / " + display_name(kind));
                const auto gs = grid_search(ds.train, base, suite.grid, suite.base_seed);
                row.chosen = gs.best;
                row.tuning_objective = gs.best_objective;
                row.failed_cells = gs.failed_cells;
            } catch (const Error& e) {
                row.failures.push_back(std::string("grid search: ") + e.what());
                result.rows.push_back(std::move(row));
                continue;
            }

            for (std::size_t k = 0; k < suite.seeds; ++k) {
                const std::uint64_t seed = suite.base_seed + k;
                try {
                    const auto ds = instantiate(source, file_data, seed);
                    auto [model, secs] = timed_fit(*row.chosen, ds.train);
                    const Vector yhat = predict_rows(model, ds.test.inputs);
                    MetricsReport m = metrics(ds.test.targets, yhat);
                    m.train_seconds = secs;
                    m.sv_count = support_vectors(model);
                    row.per_seed.push_back(m);
                    row.seeds.push_back(seed);
                    if (k == 0 && source.is_synthetic()) {
                        row.plot = PlotData{ds.test.inputs, ds.test.targets, yhat};
                    }
                    if (suite.keep_models) row.models.push_back(std::move(model));
                    note("  seed " + std::to_string(seed) + ": NMSE " + data::format_double(m.nmse));
                } catch (const Error& e) {
                    row.failures.push_back("seed " + std::to_string(seed) + ": " + e.what());
                }
            }
            if (!row.per_seed.empty()) row.summary = detail::summarize(row.per_seed);
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Reports

namespace detail {

inline nlohmann::json to_json(const Stat& s) {
    nlohmann::json j{{"mean", s.mean}};
    if (s.std) j["std"] = *s.std;
    return j;
}

inline nlohmann::json settings_json(const RegressorSettings& s) {
    if (s.kind == RegressorKind::hftsvr) return serial::to_json(s.hierarchy);
    return serial::to_json(s.tsvr);
}

inline std::string format_stat(const Stat& s, int precision) {
    std::ostringstream out;
    out << std::setprecision(precision) << s.mean;
    if (s.std) out << " +/- " << std::setprecision(precision) << *s.std;
    return out.str();
}

}  // namespace detail

inline nlohmann::json to_json(const BenchmarkResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : result.rows) {
        nlohmann::json r{{"dataset", row.dataset},
                         {"regressor", to_string(row.regressor)},
                         {"failures", row.failures}};
        if (row.chosen) {
            r["chosen"] = detail::settings_json(*row.chosen);
            r["tuning_objective"] = row.tuning_objective;
            r["failed_grid_cells"] = row.failed_cells;
        }
        nlohmann::json seeds = nlohmann::json::array();
        for (std::size_t i = 0; i < row.per_seed.size(); ++i) {
            const auto& m = row.per_seed[i];
            seeds.push_back({{"seed", row.seeds[i]},
                             {"sse", m.sse},
                             {"nmse", m.nmse},
                             {"r2", m.r2},
                             {"mape", m.mape ? nlohmann::json(*m.mape) : nlohmann::json(nullptr)},
                             {"train_seconds", m.train_seconds},
                             {"sv_count", m.sv_count}});
        }
        r["per_seed"] = seeds;
        if (row.summary) {
            const auto& s = *row.summary;
            r["summary"] = {{"sse", detail::to_json(s.sse)},
                            {"nmse", detail::to_json(s.nmse)},
                            {"r2", detail::to_json(s.r2)},
                            {"mape", s.mape ? detail::to_json(*s.mape) : nlohmann::json(nullptr)},
                            {"train_seconds", detail::to_json(s.seconds)},
                            {"sv_count", detail::to_json(s.sv_count)}};
        }
        rows.push_back(std::move(r));
    }
    return {{"metric_definitions", kMetricDefinitions},
            {"timing", "wall-clock seconds of the final training call; grid search excluded"},
            {"machine", result.fingerprint},
            {"rows", rows}};
}

/// Aligned text table, one row per (dataset, regressor), mean +/- std.
inline void write_text_table(std::ostream& out, const BenchmarkResult& result) {
    out << "# " << kMetricDefinitions << "\n";
    out << "# CPU(sec): training only, grid search excluded\n";
    const std::vector<std::string> header{"Dataset", "Regressor", "SSE",      "NMSE",
                                          "R2",      "MAPE",      "CPU(sec)", "#SV"};
    std::vector<std::vector<std::string>> table{header};
    for (const auto& row : result.rows) {
        std::vector<std::string> cells{row.dataset, display_name(row.regressor)};
        if (row.summary) {
            const auto& s = *row.summary;
            cells.push_back(detail::format_stat(s.sse, 4));
            cells.push_back(detail::format_stat(s.nmse, 4));
            cells.push_back(detail::format_stat(s.r2, 4));
            cells.push_back(s.mape ? detail::format_stat(*s.mape, 4) : "undefined");
            cells.push_back(detail::format_stat(s.seconds, 3));
            cells.push_back(detail::format_stat(s.sv_count, 4));
        } else {
            cells.insert(cells.end(), {"failed", "-", "-", "-", "-", "-"});
        }
        table.push_back(std::move(cells));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& r : table)
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    for (const auto& r : table) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            out << std::left << std::setw(static_cast<int>(width[c])) << r[c];
            out << (c + 1 < r.size() ? "  " : "\n");
        }
    }
    for (const auto& row : result.rows) {
        for (const auto& f : row.failures) {
            out << "! " << row.dataset << " / " << display_name(row.regressor) << ": " << f << "\n";
        }
    }
}

/// x columns, y, yhat; rows sorted by the first input.
inline void write_plot_csv(std::ostream& out, const PlotData& plot) {
    const auto d = plot.inputs.cols();
    for (Eigen::Index j = 0; j < d; ++j) out << (d == 1 ? "x" : "x" + std::to_string(j + 1)) << ",";
    out << "y,yhat\n";
    std::vector<Eigen::Index> order(static_cast<std::size_t>(plot.inputs.rows()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return plot.inputs(a, 0) < plot.inputs(b, 0); });
    for (auto i : order) {
        for (Eigen::Index j = 0; j < d; ++j) out << data::format_double(plot.inputs(i, j)) << ",";
        out << data::format_double(plot.targets[i]) << "," << data::format_double(plot.predictions[i])
            << "\n";
    }
}

/// report.json, report.txt and plot_<dataset>_<regressor>.csv under `dir`.
inline void write_reports(const BenchmarkResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    {
        auto out = data::detail::open_output(dir / "report.json");
        out << to_json(result).dump(2) << "\n";
    }
    {
        auto out = data::detail::open_output(dir / "report.txt");
        write_text_table(out, result);
    }
    for (const auto& row : result.rows) {
        if (!row.plot) continue;
        auto out = data::detail::open_output(dir / ("plot_" + row.dataset + "_" +
                                                    to_string(row.regressor) + ".csv"));
        write_plot_csv(out, *row.plot);
    }
}

/// run_benchmark, then the report files when the suite names an output dir.
inline BenchmarkResult run_suite(const SuiteSpec& suite, const Logger& log = {}) {
    auto result = run_benchmark(suite, log);
    if (!suite.output.empty()) write_reports(result, suite.output);
    return result;
}

/// Reads [suite] plus the [tsvr], [hierarchy], [base_params] and [grid]
/// sections that configure it. Relative dataset and output paths resolve
/// against `base_dir`.
inline SuiteSpec read_suite(const config::Tree& tree, const std::filesystem::path& base_dir = {}) {
    SuiteSpec suite;
    suite.base.tsvr = config::read_tsvr_params(tree);
    suite.base.hierarchy = config::read_hierarchy_config(tree);
    suite.grid = read_grid_spec(tree);
    const auto section = tree.get_child_optional("suite");
    if (!section) return suite;
    config::detail::check_keys(*section, "suite",
                               {"datasets", "regressors", "seeds", "base_seed", "output"});
    if (auto v = section->get_optional<std::string>("datasets")) {
        for (const auto& item : config::detail::split_list(*v)) {
            auto src = DatasetSource::parse(item);
            if (!src.is_synthetic() && src.path.is_relative()) src.path = base_dir / src.path;
            suite.datasets.push_back(std::move(src));
        }
    }
    if (auto v = section->get_optional<std::string>("regressors")) {
        for (const auto& item : config::detail::split_list(*v)) {
            suite.regressors.push_back(regressor_kind_from_string(item));
        }
    }
    config::detail::read(*section, "seeds", suite.seeds);
    config::detail::read(*section, "base_seed", suite.base_seed);
    if (auto v = section->get_optional<std::string>("output")) {
        suite.output = *v;
        if (suite.output.is_relative()) suite.output = base_dir / suite.output;
    }
    if (suite.seeds < 1) throw InvalidArgument("suite: seeds must be >= 1");
    return suite;
}

}  // namespace hftsvr
