#pragma once

// Hierarchical multi-scale twin SVR.
//
// A stack of gaussian-kernel layers fitted coarse to fine, each on the
// residual left by the layers before it. Layer v uses scale tau1 / n^(v-1)
// and trade-off B_v = S * var(residual). After a first fit on every point,
// the layer is refitted on the points near its tube border (or well inside
// the tube) with B_v scaled up by |TS| / |TS'|.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "hftsvr/error.hpp"
#include "hftsvr/tsvr.hpp"

namespace hftsvr {

struct HierarchyConfig {
    std::size_t max_layers = 6;
    std::optional<double> tau1;  // empty: derived from the input domain
    double tau1_factor = 1.0;
    double scale_divisor = 2.0;
    double s_factor = 1.0;
    double eps = 0.05;
    std::optional<double> tube_tolerance;     // empty: 0.1 * eps
    std::optional<double> stop_residual_var;  // empty: 1e-4 * var(Y)
    double stop_rel_improvement = 0.01;
    TsvrParams base_params{1.0, 1.0, 0.1, 0.1, 0.05, 0.05, KernelSpec::gaussian(1.0)};
    bool pruning_enabled = true;
    /// Second pass is skipped when |TS'| < min_pruned_fraction * |TS|.
    double min_pruned_fraction = 0.1;
    /// Second pass also scales p3, p4 by |TS'|/|TS|, keeping the balance
    /// between the squared loss and the regularizer independent of density.
    bool rescale_second_pass_regularization = true;

    void validate() const {
        if (max_layers < 1) throw InvalidArgument("max_layers must be >= 1");
        if (tau1 && !(*tau1 > 0.0)) throw InvalidArgument("tau1 must be positive");
        if (!(tau1_factor > 0.0)) throw InvalidArgument("tau1_factor must be positive");
        if (!(scale_divisor >= 2.0)) throw InvalidDivisor("scale_divisor must be >= 2");
        if (!(s_factor > 0.0 && s_factor <= 5.0)) {
            throw InvalidArgument("s_factor must lie in (0, 5]");
        }
        if (!(eps >= 0.0)) throw InvalidArgument("eps must be non-negative");
        if (tube_tolerance && !(*tube_tolerance > 0.0)) {
            throw InvalidArgument("tube_tolerance must be positive");
        }
        if (stop_residual_var && !(*stop_residual_var >= 0.0)) {
            throw InvalidArgument("stop_residual_var must be non-negative");
        }
        if (!(stop_rel_improvement >= 0.0)) {
            throw InvalidArgument("stop_rel_improvement must be non-negative");
        }
        if (!(min_pruned_fraction >= 0.0 && min_pruned_fraction <= 1.0)) {
            throw InvalidArgument("min_pruned_fraction must lie in [0, 1]");
        }
        if (!(base_params.p3 > 0.0 && base_params.p4 > 0.0)) {
            throw InvalidArgument("base_params p3, p4 must be positive");
        }
    }

    [[nodiscard]] double resolved_tube_tolerance() const {
        return tube_tolerance ? *tube_tolerance : 0.1 * eps;
    }
};

struct LayerState {
    std::size_t index = 0;  // 1-based layer number
    double tau = 0.0;
    double b_v = 0.0;
    double b_v_prime = 0.0;
    TsvrModel model;
    std::vector<std::size_t> pruned_indices;  // TS'_v, 0-based rows of TS_v
    bool second_pass = false;
    double residual_variance_in = 0.0;
};

struct LayerReport {
    double residual_variance_in = 0.0;
    double residual_variance_out = 0.0;
    double first_pass_residual_variance = 0.0;
    std::size_t sv_count_first = 0;
    std::size_t sv_count_final = 0;
    std::size_t full_size = 0;
    std::size_t pruned_size = 0;
    double seconds = 0.0;
};

enum class StopReason {
    max_layers,
    residual_variance,
    small_improvement,
    zero_variance,
};

inline const char* to_string(StopReason r) {
    switch (r) {
    case StopReason::max_layers: return "max_layers";
    case StopReason::residual_variance: return "residual_variance";
    case StopReason::small_improvement: return "small_improvement";
    case StopReason::zero_variance: return "zero_variance";
    }
    return "unknown";
}

struct HierarchyReport {
    std::vector<LayerReport> layers;
    Vector final_residuals;  // maintained incrementally during training
    StopReason stop_reason = StopReason::max_layers;
    double resolved_tau1 = 0.0;
    double resolved_stop_var = 0.0;
    /// Number of layers fitted and then discarded for not improving enough.
    std::size_t rejected_layers = 0;
};

struct HfTsvrModel {
    std::vector<LayerState> layers;
    HierarchyConfig config;
    HierarchyReport training_report;
    Eigen::Index input_dim = 0;
};

/// [tau1, tau1/n, ..., tau1/n^(V-1)]
inline std::vector<double> scale_schedule(double tau1, double n, std::size_t layers) {
    if (!(n >= 2.0)) throw InvalidDivisor("scale divisor must be >= 2");
    if (!(tau1 > 0.0)) throw InvalidArgument("tau1 must be positive");
    if (layers < 1) throw InvalidArgument("at least one layer required");
    std::vector<double> taus;
    taus.reserve(layers);
    double tau = tau1;
    for (std::size_t v = 0; v < layers; ++v) {
        taus.push_back(tau);
        tau /= n;
    }
    return taus;
}

/// Diagonal of the bounding box of the inputs, times factor.
inline double auto_tau1(const TrainingSet& ts, double factor = 1.0) {
    if (ts.size() < 2) throw DataError("auto_tau1 needs at least two rows");
    const Vector extent = ts.inputs.colwise().maxCoeff() - ts.inputs.colwise().minCoeff();
    const double diameter = extent.norm();
    if (!(diameter > 0.0)) throw DegenerateDomain("input domain has zero diameter");
    return factor * diameter;
}

inline double population_variance(const Vector& v) {
    if (v.size() == 0) throw InvalidArgument("variance of an empty vector");
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

/// B_v = S * var(residuals); throws ZeroVariance on constant residuals.
inline double layer_tradeoff(const Vector& residuals, double s_factor) {
    if (residuals.size() == 0) throw InvalidArgument("layer_tradeoff: empty residuals");
    if (!(s_factor > 0.0 && s_factor <= 5.0)) {
        throw InvalidArgument("layer_tradeoff: s_factor must lie in (0, 5]");
    }
    const double var = population_variance(residuals);
    if (!(var > 0.0)) throw ZeroVariance("residuals are constant");
    return s_factor * var;
}

/// Rows whose post-layer residual r satisfies ||r| - eps| < tp or |r| < eps/n.
inline std::vector<std::size_t> prune_set(const Vector& residuals_after, double eps, double n,
                                          double tp) {
    if (!(eps >= 0.0)) throw InvalidArgument("prune_set: eps must be non-negative");
    if (!(n >= 2.0)) throw InvalidDivisor("prune_set: n must be >= 2");
    if (!(tp > 0.0)) throw InvalidArgument("prune_set: tp must be positive");
    std::vector<std::size_t> keep;
    const double inner = eps / n;
    for (Eigen::Index i = 0; i < residuals_after.size(); ++i) {
        const double dist = std::abs(residuals_after[i]);
        if (std::abs(dist - eps) < tp || dist < inner) keep.push_back(static_cast<std::size_t>(i));
    }
    return keep;
}

/// B'_v = B_v * |TS_v| / |TS'_v|
inline double second_pass_tradeoff(double b_v, std::size_t full_size, std::size_t pruned_size) {
    if (pruned_size < 1) throw EmptyPrunedSet("pruned set is empty");
    return b_v * static_cast<double>(full_size) / static_cast<double>(pruned_size);
}

inline double predict_layer(const LayerState& layer, const Vector& x) {
    return predict(layer.model, x);
}

inline double predict_hierarchy(const HfTsvrModel& model, const Vector& x) {
    if (x.size() != model.input_dim) {
        throw DimensionMismatch("predict_hierarchy: input dimension mismatch");
    }
    double sum = 0.0;
    for (const auto& layer : model.layers) sum += predict(layer.model, x);
    return sum;
}

inline Vector predict_hierarchy_rows(const HfTsvrModel& model, const Matrix& inputs) {
    Vector out(inputs.rows());
    Vector row(inputs.cols());
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        row = inputs.row(i).transpose();
        out[i] = predict_hierarchy(model, row);
    }
    return out;
}

namespace detail {

inline TrainingSet select_rows(const Matrix& inputs, const Vector& targets,
                               const std::vector<std::size_t>& rows) {
    TrainingSet sub;
    sub.inputs.resize(static_cast<Eigen::Index>(rows.size()), inputs.cols());
    sub.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const auto r = static_cast<Eigen::Index>(rows[k]);
        sub.inputs.row(kk) = inputs.row(r);
        sub.targets[kk] = targets[r];
    }
    return sub;
}

}  // namespace detail

/// Fits layers one at a time on the running residual. Training stops when
/// the residual variance drops to the stop threshold, residuals become
/// constant, max_layers is reached, or a new layer improves the residual
/// variance by no more than stop_rel_improvement; such a layer is discarded.
/// The first layer is the coarsest scale of the schedule whose fit passes
/// that improvement test: non-improving scales are skipped until one layer
/// has been accepted.
inline HfTsvrModel train_hierarchy(const TrainingSet& ts, const HierarchyConfig& config) {
    ts.validate();
    config.validate();
    using clock = std::chrono::steady_clock;

    HfTsvrModel model;
    model.config = config;
    model.input_dim = ts.dims();
    auto& report = model.training_report;

    const Eigen::Index m = ts.size();
    const double tau1 = config.tau1 ? *config.tau1 : auto_tau1(ts, config.tau1_factor);
    const std::vector<double> taus = scale_schedule(tau1, config.scale_divisor, config.max_layers);
    const double var_y = population_variance(ts.targets);
    const double stop_var =
        config.stop_residual_var ? *config.stop_residual_var : 1e-4 * var_y;
    const double tp = config.resolved_tube_tolerance();
    report.resolved_tau1 = tau1;
    report.resolved_stop_var = stop_var;
    report.stop_reason = StopReason::max_layers;

    Vector residual = ts.targets;
    std::vector<std::size_t> all_rows(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;

    for (std::size_t v = 0; v < taus.size(); ++v) {
        const auto start = clock::now();
        const double var_in = population_variance(residual);
        if (var_in <= stop_var) {
            report.stop_reason = var_in > 0.0 ? StopReason::residual_variance
                                              : StopReason::zero_variance;
            break;
        }
        double b_v = 0.0;
        try {
            b_v = layer_tradeoff(residual, config.s_factor);
        } catch (const ZeroVariance&) {
            report.stop_reason = StopReason::zero_variance;
            break;
        }

        TsvrParams params = config.base_params;
        params.p1 = params.p2 = b_v;
        params.eps1 = params.eps2 = config.eps;
        params.kernel = KernelSpec::gaussian(taus[v]);

        LayerState layer;
        layer.index = v + 1;
        layer.tau = taus[v];
        layer.b_v = b_v;
        layer.b_v_prime = b_v;
        layer.residual_variance_in = var_in;

        LayerReport lr;
        lr.residual_variance_in = var_in;
        lr.full_size = static_cast<std::size_t>(m);

        layer.model = train(TrainingSet{ts.inputs, residual}, params);
        lr.sv_count_first = layer.model.support_vector_count();
        Vector next = residual - predict_rows(layer.model, ts.inputs);
        lr.first_pass_residual_variance = population_variance(next);

        if (config.pruning_enabled && tp > 0.0) {
            layer.pruned_indices = prune_set(next, config.eps, config.scale_divisor, tp);
            const std::size_t kept = layer.pruned_indices.size();
            const double min_kept = config.min_pruned_fraction * static_cast<double>(m);
            if (kept > 0 && kept < static_cast<std::size_t>(m) && static_cast<double>(kept) >= min_kept) {
                layer.b_v_prime = second_pass_tradeoff(b_v, static_cast<std::size_t>(m), kept);
                params.p1 = params.p2 = layer.b_v_prime;
                if (config.rescale_second_pass_regularization) {
                    const double density = static_cast<double>(kept) / static_cast<double>(m);
                    params.p3 *= density;
                    params.p4 *= density;
                }
                layer.model =
                    train(detail::select_rows(ts.inputs, residual, layer.pruned_indices), params);
                layer.second_pass = true;
                next = residual - predict_rows(layer.model, ts.inputs);
            }
        } else {
            layer.pruned_indices = all_rows;
        }
        lr.pruned_size = layer.pruned_indices.size();
        lr.sv_count_final = layer.model.support_vector_count();

        const double var_out = population_variance(next);
        lr.residual_variance_out = var_out;
        lr.seconds = std::chrono::duration<double>(clock::now() - start).count();

        if ((var_in - var_out) / var_in <= config.stop_rel_improvement) {
            ++report.rejected_layers;
            if (model.layers.empty()) continue;  // first layer: try the next finer scale
            report.stop_reason = StopReason::small_improvement;
            break;
        }
        residual = std::move(next);
        model.layers.push_back(std::move(layer));
        report.layers.push_back(lr);
    }

    if (model.layers.empty() && report.rejected_layers > 0) {
        report.stop_reason = StopReason::small_improvement;
    }
    report.final_residuals = residual;
    return model;
}

}  // namespace hftsvr
