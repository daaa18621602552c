#pragma once

// Random problem generators and independent reference computations shared by
// the unit tests and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hftsvr/qp.hpp"
#include "hftsvr/testing/qp_oracle.hpp"
#include "hftsvr/tsvr.hpp"

namespace support {

using hftsvr::Matrix;
using hftsvr::Vector;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                            double lo = -1.0, double hi = 1.0) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(rng, lo, hi);
    return m;
}

/// Random orthogonal matrix from the QR factors of a Gaussian-ish matrix.
inline Matrix random_orthogonal(std::mt19937_64& rng, Eigen::Index n) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
    return qr.householderQ() * Matrix::Identity(n, n);
}

/// Symmetric positive definite matrix with eigenvalues log-uniform in
/// [1, condition] times a random scale.
inline Matrix random_spd(std::mt19937_64& rng, Eigen::Index n, double condition) {
    const Matrix u = random_orthogonal(rng, n);
    Vector lambda(n);
    const double scale = std::pow(10.0, uniform(rng, -2.0, 2.0));
    for (Eigen::Index i = 0; i < n; ++i) lambda[i] = scale * std::pow(condition, uniform(rng, 0.0, 1.0));
    lambda[0] = scale;
    if (n > 1) lambda[n - 1] = scale * condition;
    Matrix m = u * lambda.asDiagonal() * u.transpose();
    return 0.5 * (m + m.transpose());
}

inline hftsvr::BoxQp random_box_qp(std::mt19937_64& rng, Eigen::Index n, double condition) {
    hftsvr::BoxQp p;
    p.q = random_spd(rng, n, condition);
    p.q /= p.q.diagonal().maxCoeff();
    p.c.resize(n);
    p.lower.resize(n);
    p.upper.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        p.c[i] = uniform(rng, -2.0, 2.0);
        p.lower[i] = uniform(rng, -1.5, 0.0);
        p.upper[i] = p.lower[i] + uniform(rng, 0.2, 2.5);
    }
    return p;
}

/// Dense Gaussian elimination with partial pivoting, column by column.
inline Matrix gauss_solve(Matrix a, Matrix b) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        a.row(col).swap(a.row(pivot));
        b.row(col).swap(b.row(pivot));
        for (Eigen::Index r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            a.row(r) -= f * a.row(col);
            b.row(r) -= f * b.row(col);
        }
    }
    Matrix x(n, b.cols());
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        x.row(i) = b.row(i);
        for (Eigen::Index j = i + 1; j < n; ++j) x.row(i) -= a(i, j) * x.row(j);
        x.row(i) /= a(i, i);
    }
    return x;
}

inline hftsvr::TrainingSet random_training_set(std::mt19937_64& rng, Eigen::Index m, Eigen::Index d) {
    hftsvr::TrainingSet ts;
    ts.inputs = random_matrix(rng, m, d, -2.0, 2.0);
    Vector w = random_matrix(rng, d, 1, -1.0, 1.0);
    ts.targets = ts.inputs * w;
    for (Eigen::Index i = 0; i < m; ++i) {
        ts.targets[i] += std::sin(ts.inputs(i, 0)) + uniform(rng, -0.3, 0.3);
    }
    return ts;
}

inline hftsvr::TsvrParams random_params(std::mt19937_64& rng, bool kernel) {
    hftsvr::TsvrParams p;
    p.p1 = std::pow(2.0, uniform(rng, -3.0, 3.0));
    p.p2 = std::pow(2.0, uniform(rng, -3.0, 3.0));
    p.p3 = std::pow(2.0, uniform(rng, -4.0, 2.0));
    p.p4 = std::pow(2.0, uniform(rng, -4.0, 2.0));
    p.eps1 = uniform(rng, 0.0, 0.3);
    p.eps2 = uniform(rng, 0.0, 0.3);
    p.kernel = kernel ? hftsvr::KernelSpec::gaussian(uniform(rng, 0.5, 3.0)) : hftsvr::KernelSpec::linear();
    return p;
}

/// Solver backed by the exhaustive test oracle.
inline hftsvr::QpSolver oracle_solver(double grid_step = 1e-3) {
    return [grid_step](const hftsvr::BoxQp& p) {
        hftsvr::QpSolution s;
        s.alpha = hftsvr::testing::box_qp_oracle(p, grid_step);
        s.objective = p.objective(s.alpha);
        return s;
    };
}

/// Max-norm stationarity residuals of both proximal functions:
/// (J'J + p3 I) v1 - J'(Y - alpha) and (J'J + p4 I) v2 - J'(Y + gamma).
inline std::pair<double, double> stationarity(const hftsvr::TrainingSet& ts,
                                              const hftsvr::TsvrParams& params,
                                              const hftsvr::TsvrModel& model) {
    const Matrix j = hftsvr::build_design(ts, params.kernel);
    const Matrix g = j.transpose() * j;
    const Eigen::Index n = j.cols();
    Vector v1(n), v2(n);
    v1 << model.w1, model.b1;
    v2 << model.w2, model.b2;
    const Vector r1 = (g + params.p3 * Matrix::Identity(n, n)) * v1 -
                      j.transpose() * (ts.targets - model.diagnostics.alpha);
    const Vector r2 = (g + params.p4 * Matrix::Identity(n, n)) * v2 -
                      j.transpose() * (ts.targets + model.diagnostics.gamma);
    return {r1.lpNorm<Eigen::Infinity>(), r2.lpNorm<Eigen::Infinity>()};
}

/// Largest constraint residual |Y_i - h1(x_i) + eps1| over multipliers with
/// 1e-6 < alpha_i < p1 - 1e-6 (the hinge slack vanishes there), plus the
/// mirror |h2(x_i) - Y_i + eps2| for gamma.
inline double complementary_slackness(const hftsvr::TrainingSet& ts,
                                      const hftsvr::TsvrParams& params,
                                      const hftsvr::TsvrModel& model) {
    const Matrix j = hftsvr::build_design(ts, params.kernel);
    const Eigen::Index n = j.cols();
    Vector v1(n), v2(n);
    v1 << model.w1, model.b1;
    v2 << model.w2, model.b2;
    const Vector h1 = j * v1;
    const Vector h2 = j * v2;
    double worst = 0.0;
    const auto& a = model.diagnostics.alpha;
    const auto& g = model.diagnostics.gamma;
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        if (a[i] > 1e-6 && a[i] < params.p1 - 1e-6) {
            worst = std::max(worst, std::abs(ts.targets[i] - h1[i] + params.eps1));
        }
        if (g[i] > 1e-6 && g[i] < params.p2 - 1e-6) {
            worst = std::max(worst, std::abs(h2[i] - ts.targets[i] + params.eps2));
        }
    }
    return worst;
}

inline std::size_t interior_count(const hftsvr::TsvrModel& model, const hftsvr::TsvrParams& params) {
    std::size_t count = 0;
    const auto& a = model.diagnostics.alpha;
    const auto& g = model.diagnostics.gamma;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        count += (a[i] > 1e-6 && a[i] < params.p1 - 1e-6) ? 1 : 0;
        count += (g[i] > 1e-6 && g[i] < params.p2 - 1e-6) ? 1 : 0;
    }
    return count;
}

}  // namespace support
