#pragma once

// Regression metrics. Definitions (printed in every report header):
//   SSE  = sum (y - yhat)^2
//   NMSE = SSE / sum (y - mean(y))^2
//   R2   = 1 - NMSE
//   MAPE = mean |y - yhat| / |y|   (undefined if any y == 0)

#include <cmath>
#include <cstddef>
#include <optional>

#include "hftsvr/error.hpp"
#include "hftsvr/qp.hpp"

namespace hftsvr {

inline constexpr const char* kMetricDefinitions =
    "SSE = sum (y - yhat)^2; NMSE = SSE / sum (y - mean y)^2; R2 = 1 - NMSE; "
    "MAPE = mean |y - yhat| / |y|";

struct MetricsReport {
    double sse = 0.0;
    double nmse = 0.0;
    double r2 = 1.0;
    std::optional<double> mape;
    double train_seconds = 0.0;
    std::size_t sv_count = 0;
};

inline MetricsReport metrics(const Vector& y, const Vector& yhat) {
    if (y.size() != yhat.size()) throw DimensionMismatch("metrics: length mismatch");
    if (y.size() == 0) throw InvalidArgument("metrics: empty vectors");
    MetricsReport r;
    r.sse = (y - yhat).squaredNorm();
    const double sst = (y.array() - y.mean()).square().sum();
    if (!(sst > 0.0)) throw ZeroVarianceTargets("metrics: targets have zero variance");
    r.nmse = r.sse / sst;
    r.r2 = 1.0 - r.nmse;
    if ((y.array() != 0.0).all()) {
        r.mape = ((y - yhat).array().abs() / y.array().abs()).mean();
    }
    return r;
}

}  // namespace hftsvr
