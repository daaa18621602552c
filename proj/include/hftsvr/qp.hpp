#pragma once

// Dense SPD solves and a box-constrained convex QP solver.
//
//   minimize   1/2 a'Qa + c'a
//   subject to lower <= a <= upper
//
// Q must be symmetric positive semidefinite. The twin-SVR duals produce
// Q = J (J'J + pI)^-1 J', whose rank is bounded by the column count of J, so
// semidefinite Q is the normal case rather than an edge case.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "hftsvr/error.hpp"

namespace hftsvr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric matrix expected to be positive definite. Symmetry is checked on
/// construction; definiteness is checked when the matrix is factorized.
class SpdMatrix {
public:
    explicit SpdMatrix(Matrix entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
            throw InvalidArgument("SpdMatrix must be square with positive order");
        }
        const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
        if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw InvalidArgument("SpdMatrix is not symmetric");
        }
    }

    [[nodiscard]] Eigen::Index order() const noexcept { return entries_.rows(); }
    [[nodiscard]] const Matrix& entries() const noexcept { return entries_; }

private:
    Matrix entries_;
};

/// Solves M X = rhs through a Cholesky factorization.
inline Matrix solve_spd(const SpdMatrix& m, const Matrix& rhs) {
    if (rhs.rows() != m.order()) {
        throw DimensionMismatch("solve_spd: rhs rows do not match matrix order");
    }
    Eigen::LLT<Matrix> llt(m.entries());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite();
    }
    return llt.solve(rhs);
}

struct BoxQp {
    Matrix q;
    Vector c;
    Vector lower;
    Vector upper;

    [[nodiscard]] Eigen::Index dimension() const noexcept { return c.size(); }

    void validate() const {
        const auto n = c.size();
        if (q.rows() != n || q.cols() != n || lower.size() != n || upper.size() != n) {
            throw DimensionMismatch("BoxQp: dimensions of Q, c, lower, upper disagree");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!(lower[i] <= upper[i])) {
                throw InvalidArgument("BoxQp: lower bound exceeds upper bound");
            }
        }
    }

    [[nodiscard]] double objective(const Vector& a) const {
        return 0.5 * a.dot(q * a) + c.dot(a);
    }
};

struct QpSolution {
    Vector alpha;
    double objective = 0.0;
    int iterations = 0;
    double kkt_residual = 0.0;
};

class MaxIterationsExceeded : public TrainingError {
public:
    explicit MaxIterationsExceeded(QpSolution best)
        : TrainingError("box QP: iteration limit reached (kkt residual " +
                        std::to_string(best.kkt_residual) + ")"),
          best_(std::move(best)) {}

    [[nodiscard]] const QpSolution& best() const noexcept { return best_; }

private:
    QpSolution best_;
};

struct QpOptions {
    double tol = 1e-8;
    /// 0 selects 50 * dimension + 1000.
    int max_iter = 0;
};

namespace detail {

enum class Face : unsigned char { free, at_lower, at_upper, fixed };

inline Face classify(double a, double lo, double hi) {
    if (lo == hi) return Face::fixed;
    if (a <= lo) return Face::at_lower;
    if (a >= hi) return Face::at_upper;
    return Face::free;
}

// Projected gradient: the part of -g that can be followed without leaving
// the box. Its max-norm is zero exactly at a KKT point.
inline void projected_gradient(const BoxQp& p, const Vector& a, const Vector& g, Vector& pg) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        switch (classify(a[i], p.lower[i], p.upper[i])) {
        case Face::free: pg[i] = g[i]; break;
        case Face::at_lower: pg[i] = std::min(g[i], 0.0); break;
        case Face::at_upper: pg[i] = std::max(g[i], 0.0); break;
        case Face::fixed: pg[i] = 0.0; break;
        }
    }
}

inline void project(const BoxQp& p, Vector& a) {
    a = a.cwiseMax(p.lower).cwiseMin(p.upper);
}

}  // namespace detail

/// Gradient projection with exact line search, alternated with conjugate
/// gradient on the face picked out by the projection step (active-set
/// polish). Deterministic for fixed inputs. The returned alpha lies inside
/// the box bit-for-bit.
inline QpSolution solve_box_qp(const BoxQp& problem, QpOptions options = {}) {
    problem.validate();
    if (!(options.tol > 0.0)) throw InvalidArgument("solve_box_qp: tol must be positive");

    const Eigen::Index n = problem.dimension();
    const int max_iter =
        options.max_iter > 0 ? options.max_iter : static_cast<int>(50 * n + 1000);

    QpSolution sol;
    sol.alpha = Vector::Zero(n);
    detail::project(problem, sol.alpha);
    if (n == 0) return sol;

    const Matrix& q = problem.q;
    Vector g(n), pg(n), d(n), qd(n);
    int iter = 0;

    auto finish = [&](bool converged) {
        detail::project(problem, sol.alpha);
        g.noalias() = q * sol.alpha;
        g += problem.c;
        detail::projected_gradient(problem, sol.alpha, g, pg);
        sol.kkt_residual = pg.lpNorm<Eigen::Infinity>();
        sol.objective = 0.5 * sol.alpha.dot(g - problem.c) + problem.c.dot(sol.alpha);
        sol.iterations = iter;
        if (!converged && sol.kkt_residual > options.tol) throw MaxIterationsExceeded(sol);
        return sol;
    };

    std::vector<Eigen::Index> free_set;
    free_set.reserve(static_cast<std::size_t>(n));

    while (true) {
        g.noalias() = q * sol.alpha;
        g += problem.c;
        detail::projected_gradient(problem, sol.alpha, g, pg);
        if (pg.lpNorm<Eigen::Infinity>() <= options.tol) return finish(true);
        if (iter >= max_iter) return finish(false);

        // Gradient projection step. Cauchy step length along -pg, then the
        // projected path is cut to a segment and minimized exactly on it.
        ++iter;
        qd.noalias() = q * pg;
        const double curv = pg.dot(qd);
        const double t = curv > 0.0 ? pg.squaredNorm() / curv
                                    : std::numeric_limits<double>::max();
        d = sol.alpha - t * pg;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!std::isfinite(d[i])) d[i] = pg[i] > 0.0 ? problem.lower[i] : problem.upper[i];
        }
        detail::project(problem, d);
        d -= sol.alpha;
        qd.noalias() = q * d;
        const double slope = g.dot(d);
        const double dqd = d.dot(qd);
        double s = 1.0;
        if (dqd > 0.0) s = std::clamp(-slope / dqd, 0.0, 1.0);
        sol.alpha += s * d;
        detail::project(problem, sol.alpha);
        g.noalias() = q * sol.alpha;
        g += problem.c;

        // Conjugate gradient restricted to the coordinates strictly inside
        // their bounds. Leaves the face as soon as a bound is hit.
        free_set.clear();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (detail::classify(sol.alpha[i], problem.lower[i], problem.upper[i]) ==
                detail::Face::free) {
                free_set.push_back(i);
            }
        }
        if (free_set.empty()) continue;

        const auto nf = static_cast<Eigen::Index>(free_set.size());
        Vector r(nf), dir(nf), full_dir = Vector::Zero(n), qdir(nf);
        for (Eigen::Index k = 0; k < nf; ++k) r[k] = g[free_set[k]];
        dir = -r;
        double rr = r.squaredNorm();
        const int cg_cap = static_cast<int>(2 * nf + 10);
        for (int cg = 0; cg < cg_cap && iter < max_iter; ++cg) {
            if (r.lpNorm<Eigen::Infinity>() <= 0.1 * options.tol) break;
            ++iter;
            for (Eigen::Index k = 0; k < nf; ++k) full_dir[free_set[k]] = dir[k];
            qd.noalias() = q * full_dir;
            for (Eigen::Index k = 0; k < nf; ++k) qdir[k] = qd[free_set[k]];
            const double curvature = dir.dot(qdir);
            const double descent = r.dot(dir);
            if (descent >= 0.0) break;

            double step_max = std::numeric_limits<double>::infinity();
            Eigen::Index blocking = -1;
            for (Eigen::Index k = 0; k < nf; ++k) {
                const Eigen::Index i = free_set[k];
                double room = std::numeric_limits<double>::infinity();
                if (dir[k] > 0.0) room = (problem.upper[i] - sol.alpha[i]) / dir[k];
                else if (dir[k] < 0.0) room = (problem.lower[i] - sol.alpha[i]) / dir[k];
                if (room < step_max) {
                    step_max = room;
                    blocking = k;
                }
            }

            const double step = curvature > 0.0 ? -descent / curvature
                                                : std::numeric_limits<double>::infinity();
            if (step >= step_max) {
                if (blocking < 0) break;  // unbounded direction; box is infinite
                for (Eigen::Index k = 0; k < nf; ++k) {
                    sol.alpha[free_set[k]] += step_max * dir[k];
                }
                const Eigen::Index i = free_set[blocking];
                sol.alpha[i] = dir[blocking] > 0.0 ? problem.upper[i] : problem.lower[i];
                detail::project(problem, sol.alpha);
                break;
            }

            for (Eigen::Index k = 0; k < nf; ++k) sol.alpha[free_set[k]] += step * dir[k];
            r += step * qdir;
            const double rr_next = r.squaredNorm();
            dir = -r + (rr_next / rr) * dir;
            rr = rr_next;
        }
    }
}

inline QpSolution solve_box_qp(const BoxQp& problem, double tol, int max_iter) {
    return solve_box_qp(problem, QpOptions{tol, max_iter});
}

}  // namespace hftsvr
