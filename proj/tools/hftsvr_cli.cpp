// hftsvr command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 training failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hftsvr/benchmark.hpp"
#include "hftsvr/config.hpp"
#include "hftsvr/data.hpp"
#include "hftsvr/fuzzy.hpp"
#include "hftsvr/grid_search.hpp"
#include "hftsvr/metrics.hpp"
#include "hftsvr/regressor.hpp"
#include "hftsvr/serialize.hpp"

namespace {

using namespace hftsvr;
using nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kTraining = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// --params "p1=2,p3=0.5" becomes an INI [section] block; keys may be
/// qualified as section.key.
std::string params_to_ini(const std::string& params, const std::string& default_section) {
    std::ostringstream out;
    std::string current;
    for (const auto& item : config::detail::split_list(params)) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("--params entry '" + item + "' lacks '='");
        std::string key = item.substr(0, eq);
        std::string section = default_section;
        if (const auto dot = key.find('.'); dot != std::string::npos) {
            section = key.substr(0, dot);
            key = key.substr(dot + 1);
        }
        if (section != current) {
            out << "[" << section << "]\n";
            current = section;
        }
        out << key << " = " << item.substr(eq + 1) << "\n";
    }
    return out.str();
}

config::Tree load_settings_tree(const std::string& config_path, const std::string& params,
                                RegressorKind kind) {
    config::Tree tree;
    if (!config_path.empty()) tree = config::load(config_path);
    if (!params.empty()) {
        const auto extra = config::parse_string(
            params_to_ini(params, kind == RegressorKind::hftsvr ? "hierarchy" : "tsvr"));
        for (const auto& [section, values] : extra) {
            for (const auto& [key, value] : values) tree.put(section + "." + key, value.data());
        }
    }
    return tree;
}

RegressorSettings read_settings(const config::Tree& tree, RegressorKind kind) {
    RegressorSettings s;
    s.kind = kind;
    s.tsvr = config::read_tsvr_params(tree);
    s.hierarchy = config::read_hierarchy_config(tree);
    return s;
}

json metrics_json(const MetricsReport& m) {
    return {{"sse", m.sse},
            {"nmse", m.nmse},
            {"r2", m.r2},
            {"mape", m.mape ? json(*m.mape) : json(nullptr)},
            {"sv_count", m.sv_count},
            {"definitions", kMetricDefinitions}};
}

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : config::detail::split_list(text)) {
        const auto v = data::detail::parse_number(item);
        if (!v) throw UsageError("--point value '" + item + "' is not a number");
        out.push_back(*v);
    }
    if (out.empty()) throw UsageError("--point is empty");
    return out;
}

/// Input rows of a crisp CSV; a trailing target column is accepted and dropped.
Matrix read_inputs(const std::string& path, Eigen::Index dim) {
    auto in = data::detail::open_input(path);
    const auto table = data::detail::read_numeric_table(in);
    const auto cols = static_cast<Eigen::Index>(table.header.size());
    if (cols != dim && cols != dim + 1) {
        throw InconsistentArity("expected " + std::to_string(dim) + " input columns (optionally + y), got " +
                                std::to_string(cols));
    }
    Matrix x(static_cast<Eigen::Index>(table.rows.size()), dim);
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            x(static_cast<Eigen::Index>(i), j) = table.rows[i][static_cast<std::size_t>(j)];
    return x;
}

/// Fuzzy input rows: 4 columns per input variable, optionally followed by a
/// fuzzy target.
std::vector<std::vector<fuzzy::TrapezoidalFuzzyNumber>> read_fuzzy_inputs(const std::string& path,
                                                                          Eigen::Index dim) {
    auto in = data::detail::open_input(path);
    const auto table = data::detail::read_numeric_table(in);
    const auto cols = static_cast<Eigen::Index>(table.header.size());
    if (cols != 4 * dim && cols != 4 * (dim + 1)) {
        throw InconsistentArity("expected " + std::to_string(4 * dim) + " fuzzy input columns");
    }
    std::vector<std::vector<fuzzy::TrapezoidalFuzzyNumber>> out;
    for (const auto& row : table.rows) {
        std::vector<fuzzy::TrapezoidalFuzzyNumber> x;
        for (Eigen::Index j = 0; j < dim; ++j) {
            const auto c = static_cast<std::size_t>(4 * j);
            x.push_back({row[c], row[c + 1], row[c + 2], row[c + 3]});
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::pair<int, int> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("--range must look like lo:hi");
    try {
        return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw UsageError("--range must look like lo:hi");
    }
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    auto out = data::detail::open_output(out_path);
    out << text;
}

json model_summary(const FittedModel& m, double seconds) {
    json j{{"model", to_string(m.kind)},
           {"support_vectors", support_vectors(m)},
           {"train_seconds", seconds},
           {"input_dim", input_dim(m)}};
    if (const auto* h = std::get_if<HfTsvrModel>(&m.model)) {
        j["layers"] = h->layers.size();
        j["stop_reason"] = to_string(h->training_report.stop_reason);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twin support vector regression (eps-TSVR, eps-FTSVR, eps-HFTSVR)"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic benchmark dataset");
    std::string gen_function = "sinc";
    std::string gen_out;
    std::uint64_t gen_seed = 0;
    double gen_low = 0, gen_high = 0, gen_sigma = 0.2;
    std::size_t gen_train = 0, gen_test = 0;
    gen->add_option("--function", gen_function, "power | sinc")->check(CLI::IsMember({"power", "sinc"}));
    gen->add_option("--seed", gen_seed);
    auto* o_low = gen->add_option("--low", gen_low, "domain lower bound");
    auto* o_high = gen->add_option("--high", gen_high, "domain upper bound");
    auto* o_sigma = gen->add_option("--sigma", gen_sigma, "noise standard deviation");
    auto* o_ntrain = gen->add_option("--n-train", gen_train);
    auto* o_ntest = gen->add_option("--n-test", gen_test);
    gen->add_option("--out", gen_out, "output prefix (writes _train.csv, _test.csv, .json)")->required();

    // train
    auto* tr = app.add_subcommand("train", "Fit a model on a CSV file");
    std::string tr_model = "tsvr", tr_config, tr_params, tr_data, tr_out, tr_schema = "crisp";
    tr->add_option("--model", tr_model)->check(CLI::IsMember({"tsvr", "ftsvr", "hftsvr"}));
    tr->add_option("--config", tr_config, "INI settings file");
    tr->add_option("--params", tr_params, "inline settings, e.g. p1=2,p3=0.5,kernel=gaussian");
    tr->add_option("--data", tr_data)->required();
    tr->add_option("--schema", tr_schema)->check(CLI::IsMember({"crisp", "fuzzy"}));
    tr->add_option("--out", tr_out, "model file")->required();

    // predict
    auto* pr = app.add_subcommand("predict", "Predict with a saved model");
    std::string pr_model, pr_data, pr_point, pr_out, pr_schema = "crisp";
    pr->add_option("--model-file", pr_model)->required();
    auto* o_pdata = pr->add_option("--data", pr_data);
    auto* o_point = pr->add_option("--point", pr_point, "comma separated inputs");
    o_pdata->excludes(o_point);
    pr->add_option("--schema", pr_schema)->check(CLI::IsMember({"crisp", "fuzzy"}));
    pr->add_option("--out", pr_out);

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Metrics of a saved model on a labelled CSV");
    std::string ev_model, ev_data;
    ev->add_option("--model-file", ev_model)->required();
    ev->add_option("--data", ev_data)->required();

    // gridsearch
    auto* gs = app.add_subcommand("gridsearch", "Tune hyperparameters by cross-validation");
    std::string gs_model = "tsvr", gs_data, gs_range, gs_objective, gs_config, gs_params, gs_out;
    std::uint64_t gs_seed = 0;
    gs->add_option("--model", gs_model)->check(CLI::IsMember({"tsvr", "ftsvr", "hftsvr"}));
    gs->add_option("--data", gs_data)->required();
    gs->add_option("--range", gs_range, "exponent range lo:hi");
    gs->add_option("--objective", gs_objective)->check(CLI::IsMember({"nmse", "sse"}));
    gs->add_option("--config", gs_config);
    gs->add_option("--params", gs_params);
    gs->add_option("--seed", gs_seed);
    gs->add_option("--out", gs_out, "save the retrained winner");

    // benchmark
    auto* bm = app.add_subcommand("benchmark", "Run a benchmark suite");
    std::string bm_suite, bm_output;
    std::size_t bm_seeds = 0;
    bm->add_option("--suite", bm_suite, "suite config file")->required();
    bm->add_option("--output", bm_output, "report directory (overrides [suite] output)");
    bm->add_option("--seeds", bm_seeds, "override the seed count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) {
            auto spec = gen_function == "power" ? data::SyntheticSpec::power_benchmark(gen_seed)
                                                : data::SyntheticSpec::sinc_benchmark(gen_seed);
            if (*o_low) spec.domain_low = gen_low;
            if (*o_high) spec.domain_high = gen_high;
            if (*o_sigma) spec.noise_sigma = gen_sigma;
            if (*o_ntrain) spec.n_train = gen_train;
            if (*o_ntest) spec.n_test = gen_test;
            data::save_dataset(gen_out, data::generate(spec));
            std::cout << json{{"written", gen_out}, {"spec", data::to_json(spec)}}.dump(2) << "\n";
        } else if (*tr) {
            const auto kind = regressor_kind_from_string(tr_model);
            const auto settings = read_settings(load_settings_tree(tr_config, tr_params, kind), kind);
            FittedModel model;
            double secs = 0.0;
            if (tr_schema == "fuzzy") {
                if (kind != RegressorKind::ftsvr) throw UsageError("--schema fuzzy requires --model ftsvr");
                const auto samples = data::load_fuzzy_csv(tr_data);
                const auto start = std::chrono::steady_clock::now();
                model.kind = kind;
                model.model = fuzzy::train_ftsvr(samples, settings.tsvr);
                secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            } else {
                std::tie(model, secs) = timed_fit(settings, data::load_crisp_csv(tr_data));
            }
            save_model(model, tr_out);
            std::cout << model_summary(model, secs).dump(2) << "\n";
        } else if (*pr) {
            const auto model = load_model(pr_model);
            const auto dim = input_dim(model);
            std::ostringstream out;
            if (!*o_pdata && !*o_point) throw UsageError("predict needs --data or --point");
            if (pr_schema == "fuzzy") {
                const auto* tsvr_model = std::get_if<TsvrModel>(&model.model);
                if (tsvr_model == nullptr) throw UsageError("fuzzy prediction needs a tsvr/ftsvr model");
                if (*o_point) throw UsageError("--schema fuzzy takes --data");
                out << "center,spread\n";
                for (const auto& x : read_fuzzy_inputs(pr_data, dim)) {
                    const auto p = fuzzy::predict_fuzzy(*tsvr_model, x);
                    out << data::format_double(p.center) << "," << data::format_double(p.spread) << "\n";
                }
            } else if (*o_point) {
                const auto point = parse_point(pr_point);
                if (static_cast<Eigen::Index>(point.size()) != dim) {
                    throw DimensionMismatch("--point has " + std::to_string(point.size()) +
                                            " values, model expects " + std::to_string(dim));
                }
                out << data::format_double(predict(model, Eigen::Map<const Vector>(point.data(), dim)))
                    << "\n";
            } else {
                const Vector yhat = predict_rows(model, read_inputs(pr_data, dim));
                out << "yhat\n";
                for (Eigen::Index i = 0; i < yhat.size(); ++i) out << data::format_double(yhat[i]) << "\n";
            }
            emit(pr_out, out.str());
        } else if (*ev) {
            const auto model = load_model(ev_model);
            const auto ts = data::load_crisp_csv(ev_data);
            if (ts.dims() != input_dim(model)) throw DimensionMismatch("data dimension does not match model");
            auto m = metrics(ts.targets, predict_rows(model, ts.inputs));
            m.sv_count = support_vectors(model);
            std::cout << metrics_json(m).dump(2) << "\n";
        } else if (*gs) {
            const auto kind = regressor_kind_from_string(gs_model);
            const auto tree = load_settings_tree(gs_config, gs_params, kind);
            const auto settings = read_settings(tree, kind);
            auto grid = read_grid_spec(tree);
            if (!gs_range.empty()) std::tie(grid.exponent_lo, grid.exponent_hi) = parse_range(gs_range);
            if (!gs_objective.empty()) grid.objective = objective_from_string(gs_objective);
            const auto result = grid_search(data::load_crisp_csv(gs_data), settings, grid, gs_seed);
            json chosen = kind == RegressorKind::hftsvr ? serial::to_json(result.best.hierarchy)
                                                        : serial::to_json(result.best.tsvr);
            std::cout << json{{"model", gs_model},
                              {"objective", to_string(grid.objective)},
                              {"tuning_objective", result.best_objective},
                              {"cells", result.cells.size()},
                              {"failed_cells", result.failed_cells},
                              {"chosen", chosen},
                              {"train_seconds", result.train_seconds}}
                             .dump(2)
                      << "\n";
            if (!gs_out.empty()) save_model(result.model, gs_out);
        } else if (*bm) {
            const std::filesystem::path suite_path = bm_suite;
            auto suite = read_suite(config::load(suite_path), suite_path.parent_path());
            if (!bm_output.empty()) suite.output = bm_output;
            if (bm_seeds > 0) suite.seeds = bm_seeds;
            const auto result = run_suite(suite, [](const std::string& msg) { std::cerr << msg << "\n"; });
            write_text_table(std::cout, result);
            for (const auto& row : result.rows) {
                if (!row.summary) return kTraining;
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const IoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const CorruptModel& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const SchemaVersionMismatch& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const DimensionMismatch& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const ZeroVarianceTargets& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const Error& e) {
        std::cerr << "training failure: " << e.what() << "\n";
        return kTraining;
    }
    return kOk;
}
