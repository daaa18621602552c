#pragma once

// Uniform handle over the three estimators used by the benchmark harness.

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "hftsvr/fuzzy.hpp"
#include "hftsvr/hierarchy.hpp"
#include "hftsvr/tsvr.hpp"

namespace hftsvr {

enum class RegressorKind { tsvr, ftsvr, hftsvr };

inline std::string to_string(RegressorKind k) {
    switch (k) {
    case RegressorKind::tsvr: return "tsvr";
    case RegressorKind::ftsvr: return "ftsvr";
    case RegressorKind::hftsvr: return "hftsvr";
    }
    return "unknown";
}

inline RegressorKind regressor_kind_from_string(std::string_view s) {
    if (s == "tsvr") return RegressorKind::tsvr;
    if (s == "ftsvr") return RegressorKind::ftsvr;
    if (s == "hftsvr") return RegressorKind::hftsvr;
    throw InvalidArgument("unknown regressor '" + std::string(s) + "'");
}

/// Display names in report tables.
inline std::string display_name(RegressorKind k) {
    switch (k) {
    case RegressorKind::tsvr: return "eps-TSVR";
    case RegressorKind::ftsvr: return "eps-FTSVR";
    case RegressorKind::hftsvr: return "eps-HFTSVR";
    }
    return "unknown";
}

struct RegressorSettings {
    RegressorKind kind = RegressorKind::tsvr;
    TsvrParams tsvr;            // tsvr, ftsvr
    HierarchyConfig hierarchy;  // hftsvr
};

struct FittedModel {
    RegressorKind kind = RegressorKind::tsvr;
    std::variant<TsvrModel, HfTsvrModel> model;
};

inline FittedModel fit(const RegressorSettings& settings, const TrainingSet& ts) {
    FittedModel out;
    out.kind = settings.kind;
    switch (settings.kind) {
    case RegressorKind::tsvr: out.model = train(ts, settings.tsvr); break;
    case RegressorKind::ftsvr:
        out.model = fuzzy::train_ftsvr(fuzzy::wrap_crisp(ts), settings.tsvr);
        break;
    case RegressorKind::hftsvr: out.model = train_hierarchy(ts, settings.hierarchy); break;
    }
    return out;
}

/// fit() with wall-clock seconds spent inside it.
inline std::pair<FittedModel, double> timed_fit(const RegressorSettings& settings,
                                                const TrainingSet& ts) {
    const auto start = std::chrono::steady_clock::now();
    FittedModel m = fit(settings, ts);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(m), secs};
}

inline Eigen::Index input_dim(const FittedModel& m) {
    return std::visit([](const auto& model) { return model.input_dim; }, m.model);
}

inline double predict(const FittedModel& m, const Vector& x) {
    return std::visit(
        [&](const auto& model) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(model)>, TsvrModel>) {
                return predict(model, x);
            } else {
                return predict_hierarchy(model, x);
            }
        },
        m.model);
}

inline Vector predict_rows(const FittedModel& m, const Matrix& inputs) {
    return std::visit(
        [&](const auto& model) -> Vector {
            if constexpr (std::is_same_v<std::decay_t<decltype(model)>, TsvrModel>) {
                return predict_rows(model, inputs);
            } else {
                return predict_hierarchy_rows(model, inputs);
            }
        },
        m.model);
}

/// Kernel terms kept by the model; summed over layers for the hierarchy.
inline std::size_t support_vectors(const FittedModel& m) {
    return std::visit(
        [](const auto& model) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(model)>, TsvrModel>) {
                return model.support_vector_count();
            } else {
                std::size_t n = 0;
                for (const auto& layer : model.layers) n += layer.model.support_vector_count();
                return n;
            }
        },
        m.model);
}

}  // namespace hftsvr
