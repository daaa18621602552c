#pragma once

// Trapezoidal fuzzy inputs on top of epsilon-TSVR.
//
// Training uses only the sample centers; fuzziness enters at prediction time
// as a spread term 1/2 * sum_j |w1_j + w2_j| * ds_j over the core
// half-widths ds of the query.

#include <cmath>
#include <vector>

#include "hftsvr/error.hpp"
#include "hftsvr/tsvr.hpp"

namespace hftsvr::fuzzy {

struct TrapezoidalFuzzyNumber {
    double center = 0.0;
    double core_half_width = 0.0;
    double left_spread = 0.0;
    double right_spread = 0.0;

    static TrapezoidalFuzzyNumber crisp_value(double v) { return {v, 0.0, 0.0, 0.0}; }

    [[nodiscard]] bool crisp() const noexcept {
        return core_half_width == 0.0 && left_spread == 0.0 && right_spread == 0.0;
    }

    void validate() const {
        if (!std::isfinite(center) || !std::isfinite(core_half_width) ||
            !std::isfinite(left_spread) || !std::isfinite(right_spread)) {
            throw DataError("fuzzy number has non-finite fields");
        }
        if (core_half_width < 0.0 || left_spread < 0.0 || right_spread < 0.0) {
            throw DataError("fuzzy number widths must be non-negative");
        }
    }

    friend bool operator==(const TrapezoidalFuzzyNumber&, const TrapezoidalFuzzyNumber&) = default;
};

struct FuzzySample {
    std::vector<TrapezoidalFuzzyNumber> x;
    TrapezoidalFuzzyNumber y;

    void validate() const {
        for (const auto& v : x) v.validate();
        y.validate();
    }
};

struct FuzzyPrediction {
    double center = 0.0;
    double spread = 0.0;
};

/// Centers of inputs and targets.
inline TrainingSet defuzzify_set(const std::vector<FuzzySample>& samples) {
    if (samples.empty()) throw EmptySet("fuzzy sample set is empty");
    const std::size_t d = samples.front().x.size();
    if (d == 0) throw RaggedDimensions("fuzzy samples have no input variables");
    TrainingSet ts;
    ts.inputs.resize(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(d));
    ts.targets.resize(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.x.size() != d) {
            throw RaggedDimensions("fuzzy sample " + std::to_string(i) + " has " +
                                   std::to_string(s.x.size()) + " inputs, expected " +
                                   std::to_string(d));
        }
        s.validate();
        for (std::size_t j = 0; j < d; ++j) {
            ts.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.x[j].center;
        }
        ts.targets[static_cast<Eigen::Index>(i)] = s.y.center;
    }
    return ts;
}

/// Wraps a crisp training set as fuzzy samples with zero widths.
inline std::vector<FuzzySample> wrap_crisp(const TrainingSet& ts) {
    std::vector<FuzzySample> out(static_cast<std::size_t>(ts.size()));
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        auto& s = out[static_cast<std::size_t>(i)];
        s.x.reserve(static_cast<std::size_t>(ts.dims()));
        for (Eigen::Index j = 0; j < ts.dims(); ++j) {
            s.x.push_back(TrapezoidalFuzzyNumber::crisp_value(ts.inputs(i, j)));
        }
        s.y = TrapezoidalFuzzyNumber::crisp_value(ts.targets[i]);
    }
    return out;
}

inline TsvrModel train_ftsvr(const std::vector<FuzzySample>& samples, const TsvrParams& params) {
    return train(defuzzify_set(samples), params);
}

inline FuzzyPrediction predict_fuzzy(const TsvrModel& model,
                                     const std::vector<TrapezoidalFuzzyNumber>& x) {
    if (static_cast<Eigen::Index>(x.size()) != model.input_dim) {
        throw DimensionMismatch("predict_fuzzy: input dimension mismatch");
    }
    Vector centers(model.input_dim);
    bool crisp = true;
    for (std::size_t j = 0; j < x.size(); ++j) {
        x[j].validate();
        centers[static_cast<Eigen::Index>(j)] = x[j].center;
        crisp = crisp && x[j].core_half_width == 0.0;
    }
    FuzzyPrediction out;
    out.center = predict(model, centers);
    if (crisp) return out;
    if (model.kernel.kind != KernelKind::linear) {
        throw KernelSpreadUnsupported("prediction spread is defined for linear models only");
    }
    double rho = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        rho += std::abs(model.w1[jj] + model.w2[jj]) * x[j].core_half_width;
    }
    out.spread = 0.5 * rho;
    return out;
}

}  // namespace hftsvr::fuzzy
