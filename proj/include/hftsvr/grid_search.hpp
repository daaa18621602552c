#pragma once

// Hyperparameter search on a held-out tuning subset.
//
// With folds = 1 a random tuning_fraction of the training rows is held out;
// every grid cell is trained on the rest and scored on the held-out rows.
// With folds = k the rows are cut into k random folds and the objective is
// the mean over the k held-out folds. The winner is retrained on all
// training rows. Ties on the objective go to the
// lexicographically smallest (p1, p3, eps) (for the hierarchy: (S, p3, eps)).
//
// Grids:
//   p1, p2, p3, p4   2^k, k = exponent_lo..exponent_hi
//   eps1, eps2       {0} and 2^k * std(Y), k = eps_exponent_lo..eps_exponent_hi
//   hierarchy        S in s_values, eps as above, p3 = p4 on every
//                    hierarchy_exponent_stride-th exponent; tau schedule from
//                    the input domain with the configured divisor

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hftsvr/config.hpp"
#include "hftsvr/data.hpp"
#include "hftsvr/metrics.hpp"
#include "hftsvr/regressor.hpp"

namespace hftsvr {

enum class Objective { nmse, sse };

inline std::string to_string(Objective o) { return o == Objective::nmse ? "nmse" : "sse"; }

inline Objective objective_from_string(const std::string& s) {
    if (s == "nmse") return Objective::nmse;
    if (s == "sse") return Objective::sse;
    throw InvalidArgument("unknown objective '" + s + "'");
}

struct GridSpec {
    int exponent_lo = -9;
    int exponent_hi = 9;
    bool tie_p12 = true;
    bool tie_p34 = true;
    bool tie_eps = true;
    Objective objective = Objective::nmse;
    double tuning_fraction = 0.2;
    /// 1: a single seeded tuning split of tuning_fraction. k > 1: k-fold
    /// cross-validation, each fold a disjoint random 1/k tuning set.
    std::size_t folds = 5;
    int eps_exponent_lo = -9;
    int eps_exponent_hi = -1;
    std::vector<double> s_values{0.25, 0.5, 1.0, 2.0, 4.0};
    int hierarchy_exponent_stride = 2;

    void validate() const {
        if (exponent_lo > exponent_hi) throw InvalidArgument("grid: exponent range is empty");
        if (eps_exponent_lo > eps_exponent_hi) throw InvalidArgument("grid: eps range is empty");
        if (!(tuning_fraction > 0.0 && tuning_fraction < 1.0)) {
            throw InvalidArgument("grid: tuning_fraction must lie in (0, 1)");
        }
        if (folds < 1) throw InvalidArgument("grid: folds must be >= 1");
        if (s_values.empty()) throw InvalidArgument("grid: s_values is empty");
        for (double s : s_values) {
            if (!(s > 0.0 && s <= 5.0)) throw InvalidArgument("grid: S values must lie in (0, 5]");
        }
        if (hierarchy_exponent_stride < 1) throw InvalidArgument("grid: stride must be >= 1");
    }
};

struct GridCell {
    RegressorSettings settings;
    std::array<double, 3> key{};  // tie-break order
    double objective = 0.0;
    bool failed = false;
    std::string error;
};

struct GridResult {
    RegressorSettings best;
    double best_objective = 0.0;
    std::vector<GridCell> cells;
    std::size_t failed_cells = 0;
    FittedModel model;  // winner retrained on the full training set
    double train_seconds = 0.0;
};

inline std::vector<double> power_grid(int lo, int hi, int stride = 1) {
    std::vector<double> out;
    for (int k = lo; k <= hi; k += stride) out.push_back(std::ldexp(1.0, k));
    return out;
}

inline std::vector<double> eps_grid(const GridSpec& grid, const Vector& targets) {
    const double mean = targets.mean();
    const double sd =
        std::sqrt((targets.array() - mean).square().sum() / static_cast<double>(targets.size()));
    std::vector<double> out{0.0};
    for (int k = grid.eps_exponent_lo; k <= grid.eps_exponent_hi; ++k) {
        out.push_back(std::ldexp(1.0, k) * sd);
    }
    return out;
}

/// Every cell of the grid for the given regressor, in evaluation order.
inline std::vector<GridCell> enumerate_grid(const RegressorSettings& base, const GridSpec& grid,
                                            const Vector& targets) {
    grid.validate();
    const auto eps = eps_grid(grid, targets);
    std::vector<GridCell> cells;
    if (base.kind == RegressorKind::hftsvr) {
        const auto p3s = power_grid(grid.exponent_lo, grid.exponent_hi, grid.hierarchy_exponent_stride);
        for (double s : grid.s_values) {
            for (double p3 : p3s) {
                for (double e : eps) {
                    GridCell c;
                    c.settings = base;
                    c.settings.hierarchy.s_factor = s;
                    c.settings.hierarchy.eps = e;
                    c.settings.hierarchy.base_params.p3 = p3;
                    c.settings.hierarchy.base_params.p4 = p3;
                    c.key = {s, p3, e};
                    cells.push_back(std::move(c));
                }
            }
        }
        return cells;
    }

    const auto ps = power_grid(grid.exponent_lo, grid.exponent_hi);
    const std::vector<double> tied{std::nan("")};
    const auto& p2s = grid.tie_p12 ? tied : ps;
    const auto& p4s = grid.tie_p34 ? tied : ps;
    const auto& eps2s = grid.tie_eps ? tied : eps;
    for (double p1 : ps)
        for (double p3 : ps)
            for (double e1 : eps)
                for (double p2 : p2s)
                    for (double p4 : p4s)
                        for (double e2 : eps2s) {
                            GridCell c;
                            c.settings = base;
                            auto& t = c.settings.tsvr;
                            t.p1 = p1;
                            t.p2 = grid.tie_p12 ? p1 : p2;
                            t.p3 = p3;
                            t.p4 = grid.tie_p34 ? p3 : p4;
                            t.eps1 = e1;
                            t.eps2 = grid.tie_eps ? e1 : e2;
                            c.key = {p1, p3, e1};
                            cells.push_back(std::move(c));
                        }
    return cells;
}

inline double score(Objective objective, const Vector& y, const Vector& yhat) {
    if (objective == Objective::sse) return (y - yhat).squaredNorm();
    return metrics(y, yhat).nmse;
}

/// Runs the search described at the top of this header. Cells that throw are
/// recorded as failed and skipped; if every cell fails the last error is
/// rethrown as TrainingError.
inline GridResult grid_search(const TrainingSet& train, const RegressorSettings& base,
                              const GridSpec& grid, std::uint64_t seed) {
    train.validate();
    grid.validate();
    std::vector<std::pair<TrainingSet, TrainingSet>> splits;  // (tuning, fitting)
    if (grid.folds == 1) {
        splits.push_back(data::split(train, grid.tuning_fraction, seed));
    } else {
        const auto m = static_cast<std::size_t>(train.size());
        for (const auto& fold : data::fold_indices(m, grid.folds, seed)) {
            std::vector<std::size_t> rest;
            rest.reserve(m - fold.size());
            std::size_t j = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (j < fold.size() && fold[j] == i) {
                    ++j;
                } else {
                    rest.push_back(i);
                }
            }
            splits.emplace_back(data::subset(train, fold), data::subset(train, rest));
        }
    }

    GridResult result;
    result.cells = enumerate_grid(base, grid, grid.folds == 1 ? splits[0].second.targets : train.targets);
    const GridCell* best = nullptr;
    std::string last_error;
    for (auto& cell : result.cells) {
        try {
            double total = 0.0;
            for (const auto& [tuning, fitting] : splits) {
                const FittedModel m = fit(cell.settings, fitting);
                total += score(grid.objective, tuning.targets, predict_rows(m, tuning.inputs));
            }
            cell.objective = total / static_cast<double>(splits.size());
            if (!std::isfinite(cell.objective)) throw TrainingError("non-finite objective");
        } catch (const Error& e) {
            cell.failed = true;
            cell.error = e.what();
            last_error = e.what();
            ++result.failed_cells;
            continue;
        }
        if (best == nullptr || cell.objective < best->objective ||
            (cell.objective == best->objective && cell.key < best->key)) {
            best = &cell;
        }
    }
    if (best == nullptr) throw TrainingError("grid search: every cell failed (" + last_error + ")");
    result.best = best->settings;
    result.best_objective = best->objective;
    auto [model, secs] = timed_fit(result.best, train);
    result.model = std::move(model);
    result.train_seconds = secs;
    return result;
}

inline GridSpec read_grid_spec(const config::Tree& tree, GridSpec grid = {}) {
    const auto section = tree.get_child_optional("grid");
    if (!section) return grid;
    config::detail::check_keys(*section, "grid",
                               {"exponent_lo", "exponent_hi", "tie_p12", "tie_p34", "tie_eps",
                                "objective", "tuning_fraction", "folds", "eps_exponent_lo",
                                "eps_exponent_hi", "s_values", "hierarchy_exponent_stride"});
    config::detail::read(*section, "exponent_lo", grid.exponent_lo);
    config::detail::read(*section, "exponent_hi", grid.exponent_hi);
    config::detail::read_bool(*section, "tie_p12", grid.tie_p12);
    config::detail::read_bool(*section, "tie_p34", grid.tie_p34);
    config::detail::read_bool(*section, "tie_eps", grid.tie_eps);
    std::string objective = to_string(grid.objective);
    config::detail::read(*section, "objective", objective);
    grid.objective = objective_from_string(objective);
    config::detail::read(*section, "tuning_fraction", grid.tuning_fraction);
    config::detail::read(*section, "folds", grid.folds);
    config::detail::read(*section, "eps_exponent_lo", grid.eps_exponent_lo);
    config::detail::read(*section, "eps_exponent_hi", grid.eps_exponent_hi);
    if (auto s = section->get_optional<std::string>("s_values")) {
        grid.s_values.clear();
        for (const auto& item : config::detail::split_list(*s)) {
            try {
                grid.s_values.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw InvalidArgument("config: bad S value '" + item + "'");
            }
        }
    }
    config::detail::read(*section, "hierarchy_exponent_stride", grid.hierarchy_exponent_stride);
    grid.validate();
    return grid;
}

}  // namespace hftsvr
