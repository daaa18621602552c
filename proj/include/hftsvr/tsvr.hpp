#pragma once

// epsilon-twin support vector regression.
//
// Two proximal functions are fitted, each by its own box-constrained dual:
//
//   down:  v1 = (J'J + p3 I)^-1 J'(Y - alpha),  0 <= alpha <= p1
//   up:    v2 = (J'J + p4 I)^-1 J'(Y + gamma),  0 <= gamma <= p2
//
// with J = [A 1] (linear) or J = [K(A,A) 1] (gaussian). The regressor is the
// mean of the two. Kernel: K(x,z) = exp(-|x - z|^2 / tau^2), so tau is the
// literal length scale.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "hftsvr/error.hpp"
#include "hftsvr/qp.hpp"

namespace hftsvr {

struct TrainingSet {
    Matrix inputs;   // m x d
    Vector targets;  // m

    [[nodiscard]] Eigen::Index size() const noexcept { return inputs.rows(); }
    [[nodiscard]] Eigen::Index dims() const noexcept { return inputs.cols(); }

    void validate() const {
        if (inputs.rows() < 1 || inputs.cols() < 1) {
            throw DataError("training set needs at least one row and one column");
        }
        if (targets.size() != inputs.rows()) {
            throw DimensionMismatch("training set: target count differs from input rows");
        }
        if (!inputs.allFinite() || !targets.allFinite()) {
            throw DataError("training set contains non-finite values");
        }
    }
};

enum class KernelKind { linear, gaussian };

struct KernelSpec {
    KernelKind kind = KernelKind::linear;
    double tau = 1.0;

    static KernelSpec linear() { return {}; }
    static KernelSpec gaussian(double tau) { return {KernelKind::gaussian, tau}; }

    void validate() const {
        if (kind == KernelKind::gaussian && !(tau > 0.0 && std::isfinite(tau))) {
            throw InvalidArgument("gaussian kernel needs tau > 0");
        }
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

inline std::string to_string(KernelKind k) {
    return k == KernelKind::linear ? "linear" : "gaussian";
}

struct TsvrParams {
    double p1 = 1.0;
    double p2 = 1.0;
    double p3 = 1.0;
    double p4 = 1.0;
    double eps1 = 0.1;
    double eps2 = 0.1;
    KernelSpec kernel;

    void validate() const {
        auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
        if (!positive(p1) || !positive(p2) || !positive(p3) || !positive(p4)) {
            throw InvalidArgument("TsvrParams: p1..p4 must be positive");
        }
        if (!(eps1 >= 0.0) || !(eps2 >= 0.0) || !std::isfinite(eps1) || !std::isfinite(eps2)) {
            throw InvalidArgument("TsvrParams: eps1, eps2 must be non-negative");
        }
        kernel.validate();
    }

    /// Parameters for the mirrored problem: (p1,p3,eps1) <-> (p2,p4,eps2).
    [[nodiscard]] TsvrParams swapped() const {
        return {p2, p1, p4, p3, eps2, eps1, kernel};
    }

    friend bool operator==(const TsvrParams&, const TsvrParams&) = default;
};

struct TsvrDiagnostics {
    Vector alpha;
    Vector gamma;
    double slack_down_norm = 0.0;  // |xi*| = |Y - h1(A)|
    double slack_up_norm = 0.0;    // |eta*| = |h2(A) - Y|
    double dual_objective_down = 0.0;
    double dual_objective_up = 0.0;
    int iterations_down = 0;
    int iterations_up = 0;
};

struct TsvrModel {
    Vector w1;
    Vector w2;
    double b1 = 0.0;
    double b2 = 0.0;
    KernelSpec kernel;
    Matrix basis;  // training inputs, kernel mode only
    Eigen::Index input_dim = 0;
    TsvrDiagnostics diagnostics;

    /// Points with a nonzero multiplier in either dual.
    [[nodiscard]] std::size_t support_vector_count() const {
        std::size_t count = 0;
        for (Eigen::Index i = 0; i < diagnostics.alpha.size(); ++i) {
            if (diagnostics.alpha[i] > 0.0 ||
                (i < diagnostics.gamma.size() && diagnostics.gamma[i] > 0.0)) {
                ++count;
            }
        }
        return count;
    }
};

using QpSolver = std::function<QpSolution(const BoxQp&)>;

inline Matrix gaussian_kernel(const Matrix& x, const Matrix& z, double tau) {
    const double inv = 1.0 / (tau * tau);
    Matrix k(x.rows(), z.rows());
    for (Eigen::Index j = 0; j < z.rows(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            k(i, j) = std::exp(-(x.row(i) - z.row(j)).squaredNorm() * inv);
        }
    }
    return k;
}

/// J = [A | 1] or [K(A,A) | 1].
inline Matrix build_design(const TrainingSet& ts, const KernelSpec& kernel) {
    ts.validate();
    kernel.validate();
    const Eigen::Index m = ts.size();
    const Matrix features =
        kernel.kind == KernelKind::linear ? ts.inputs : gaussian_kernel(ts.inputs, ts.inputs, kernel.tau);
    Matrix j(m, features.cols() + 1);
    j.leftCols(features.cols()) = features;
    j.col(features.cols()).setOnes();
    return j;
}

namespace detail {

inline SpdMatrix regularized_gram(const Matrix& j, double p) {
    Matrix g = j.transpose() * j;
    g.diagonal().array() += p;
    return SpdMatrix(std::move(g));
}

// H = J (J'J + pI)^-1 J', formed by solving rather than inverting.
inline Matrix dual_hessian(const Matrix& j, double p) {
    const Matrix x = solve_spd(regularized_gram(j, p), j.transpose());
    Matrix h = j * x;
    return 0.5 * (h + h.transpose());
}

// c = eps*1 + s*Y - H(s*Y); s = +1 for the down dual, -1 for the up dual.
// Written so that c_up(Y) and c_down(-Y) agree bit-for-bit.
inline Vector dual_linear_term(const Matrix& h, const Vector& y, double eps, double sign) {
    const Vector sy = sign * y;
    const Vector hsy = h * sy;
    Vector c(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) c[i] = (eps + sy[i]) - hsy[i];
    return c;
}

inline BoxQp assemble_dual(Matrix h, const Vector& y, double eps, double sign, double bound) {
    const Eigen::Index m = y.size();
    BoxQp qp;
    qp.c = dual_linear_term(h, y, eps, sign);
    qp.q = std::move(h);
    qp.lower = Vector::Zero(m);
    qp.upper = Vector::Constant(m, bound);
    return qp;
}

inline void check_rows(const TrainingSet& ts, const Matrix& j) {
    if (j.rows() != ts.size()) throw DimensionMismatch("design matrix rows differ from m");
}

}  // namespace detail

/// Minimization form of the down dual:
///   1/2 a'Ha + (eps1 + Y - HY)'a,  0 <= a <= p1.
inline BoxQp assemble_dual_down(const TrainingSet& ts, const TsvrParams& params, const Matrix& j) {
    detail::check_rows(ts, j);
    return detail::assemble_dual(detail::dual_hessian(j, params.p3), ts.targets, params.eps1, 1.0,
                                 params.p1);
}

/// Mirror of the down dual:
///   1/2 g'Hg + (eps2 - Y + HY)'g,  0 <= g <= p2.
inline BoxQp assemble_dual_up(const TrainingSet& ts, const TsvrParams& params, const Matrix& j) {
    detail::check_rows(ts, j);
    return detail::assemble_dual(detail::dual_hessian(j, params.p4), ts.targets, params.eps2, -1.0,
                                 params.p2);
}

inline QpSolver default_qp_solver() {
    return [](const BoxQp& qp) { return solve_box_qp(qp); };
}

inline TsvrModel train(const TrainingSet& ts, const TsvrParams& params, const QpSolver& solver) {
    ts.validate();
    params.validate();
    const Matrix j = build_design(ts, params.kernel);
    const Eigen::Index m = ts.size();

    Matrix h_down = detail::dual_hessian(j, params.p3);
    Matrix h_up = params.p4 == params.p3 ? h_down : detail::dual_hessian(j, params.p4);

    const QpSolution down =
        solver(detail::assemble_dual(std::move(h_down), ts.targets, params.eps1, 1.0, params.p1));
    const QpSolution up =
        solver(detail::assemble_dual(std::move(h_up), ts.targets, params.eps2, -1.0, params.p2));

    Vector rhs_down(m), rhs_up(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        rhs_down[i] = ts.targets[i] - down.alpha[i];
        rhs_up[i] = ts.targets[i] + up.alpha[i];
    }
    const Vector v1 = solve_spd(detail::regularized_gram(j, params.p3), j.transpose() * rhs_down);
    const Vector v2 = solve_spd(detail::regularized_gram(j, params.p4), j.transpose() * rhs_up);

    const Eigen::Index nw = j.cols() - 1;
    TsvrModel model;
    model.w1 = v1.head(nw);
    model.b1 = v1[nw];
    model.w2 = v2.head(nw);
    model.b2 = v2[nw];
    model.kernel = params.kernel;
    model.input_dim = ts.dims();
    if (params.kernel.kind == KernelKind::gaussian) model.basis = ts.inputs;

    auto& diag = model.diagnostics;
    diag.alpha = down.alpha;
    diag.gamma = up.alpha;
    diag.slack_down_norm = (ts.targets - j * v1).norm();
    diag.slack_up_norm = (j * v2 - ts.targets).norm();
    diag.dual_objective_down = -down.objective;
    diag.dual_objective_up = -up.objective;
    diag.iterations_down = down.iterations;
    diag.iterations_up = up.iterations;
    return model;
}

inline TsvrModel train(const TrainingSet& ts, const TsvrParams& params) {
    return train(ts, params, default_qp_solver());
}

namespace detail {

inline Vector feature_row(const TsvrModel& model, std::span<const double> x) {
    if (static_cast<Eigen::Index>(x.size()) != model.input_dim) {
        throw DimensionMismatch("predict: input dimension " + std::to_string(x.size()) +
                                " does not match model dimension " +
                                std::to_string(model.input_dim));
    }
    const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    if (model.kernel.kind == KernelKind::linear) return xv;
    const double inv = 1.0 / (model.kernel.tau * model.kernel.tau);
    Vector phi(model.basis.rows());
    for (Eigen::Index i = 0; i < model.basis.rows(); ++i) {
        phi[i] = std::exp(-(model.basis.row(i).transpose() - xv).squaredNorm() * inv);
    }
    return phi;
}

}  // namespace detail

inline double predict_down(const TsvrModel& model, std::span<const double> x) {
    return model.w1.dot(detail::feature_row(model, x)) + model.b1;
}

inline double predict_up(const TsvrModel& model, std::span<const double> x) {
    return model.w2.dot(detail::feature_row(model, x)) + model.b2;
}

/// h(x) = 1/2 (w1 + w2)' phi(x) + 1/2 (b1 + b2)
inline double predict(const TsvrModel& model, std::span<const double> x) {
    const Vector phi = detail::feature_row(model, x);
    return 0.5 * (model.w1 + model.w2).dot(phi) + 0.5 * (model.b1 + model.b2);
}

inline double predict(const TsvrModel& model, const Vector& x) {
    return predict(model, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

/// Predictions for every row of inputs.
inline Vector predict_rows(const TsvrModel& model, const Matrix& inputs) {
    Vector out(inputs.rows());
    Vector row(inputs.cols());
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        row = inputs.row(i).transpose();
        out[i] = predict(model, row);
    }
    return out;
}

}  // namespace hftsvr
