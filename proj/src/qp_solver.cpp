#include "sscmpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sscmpc/types.hpp"

namespace sscmpc {

namespace {

double inf_norm(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Largest step alpha in [0, 1] keeping v + alpha*dv >= (1 - eta) * v... the
/// usual fraction-to-boundary rule with eta = 0.99.
double step_length(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double eta = 0.99) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0) alpha = std::min(alpha, -eta * v(i) / dv(i));
    }
    return alpha;
}

}  // namespace

double qp_violation(const QpProblem& qp, const Eigen::VectorXd& x) {
    if (qp.num_constraints() == 0) return 0.0;
    return std::max(0.0, (qp.A * x - qp.b).maxCoeff());
}

QpResult solve_qp(const QpProblem& qp, const QpOptions& opts, const Eigen::VectorXd* x_warm) {
    const int n = qp.num_vars();
    const int m = qp.num_constraints();
    if (qp.q.size() != n || (m > 0 && qp.A.cols() != n) || qp.b.size() != m)
        throw DomainError("solve_qp: dimension mismatch");

    QpResult res;

    if (m == 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(qp.P + 1e-12 * Eigen::MatrixXd::Identity(n, n));
        res.x = ldlt.solve(-qp.q);
        res.lambda = Eigen::VectorXd::Zero(0);
        res.status = QpStatus::Optimal;
        res.dual_residual = inf_norm(qp.P * res.x + qp.q);
        return res;
    }

    Eigen::VectorXd x = (x_warm && x_warm->size() == n) ? *x_warm : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s(m), lambda(m);
    {
        const Eigen::VectorXd slack0 = qp.b - qp.A * x;
        for (int i = 0; i < m; ++i) s(i) = std::max(1.0, slack0(i));
        lambda.setOnes();
    }

    const double b_scale = 1.0 + inf_norm(qp.b);
    const double q_scale = 1.0 + inf_norm(qp.q);
    const double reg = 1e-12 * (1.0 + qp.P.trace() / n);

    Eigen::VectorXd rd(n), rp(m);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        rd = qp.P * x + qp.q + qp.A.transpose() * lambda;
        rp = qp.A * x + s - qp.b;
        const double mu = s.dot(lambda) / m;

        res.iterations = iter;
        res.primal_residual = inf_norm(rp);
        res.dual_residual = inf_norm(rd);
        res.mu = mu;

        if (res.primal_residual <= opts.tol_primal * b_scale &&
            res.dual_residual <= opts.tol_dual * q_scale && mu <= opts.tol_mu) {
            res.status = QpStatus::Optimal;
            res.x = x;
            res.lambda = lambda;
            return res;
        }

        // For an infeasible problem the dual iterate diverges while the primal
        // residual stalls;
        if (inf_norm(lambda) > 1e9 && res.primal_residual > 1e-6 * b_scale) {
            res.status = QpStatus::PrimalInfeasible;
            res.x = x;
            res.lambda = lambda;
            return res;
        }

        Eigen::VectorXd d(m);
        for (int i = 0; i < m; ++i) d(i) = std::min(lambda(i) / s(i), 1e14);

        Eigen::MatrixXd M = qp.P + reg * Eigen::MatrixXd::Identity(n, n);
        M.noalias() += qp.A.transpose() * d.asDiagonal() * qp.A;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
        if (ldlt.info() != Eigen::Success) {
            res.status = QpStatus::MaxIterations;
            res.x = x;
            res.lambda = lambda;
            return res;
        }

        // affine predictor
        Eigen::VectorXd c = -s.cwiseProduct(lambda);
        Eigen::VectorXd rhs = -rd - qp.A.transpose() * (c.cwiseQuotient(s) + d.cwiseProduct(rp));
        Eigen::VectorXd dx_aff = ldlt.solve(rhs);
        Eigen::VectorXd ds_aff = -rp - qp.A * dx_aff;
        Eigen::VectorXd dl_aff = c.cwiseQuotient(s) + d.cwiseProduct(rp + qp.A * dx_aff);

        const double alpha_aff = std::min(step_length(s, ds_aff, 1.0), step_length(lambda, dl_aff, 1.0));
        const double mu_aff = (s + alpha_aff * ds_aff).dot(lambda + alpha_aff * dl_aff) / m;
        const double sigma = std::pow(std::max(0.0, mu_aff / mu), 3);

        // corrector
        c = sigma * mu * Eigen::VectorXd::Ones(m) - s.cwiseProduct(lambda) -
            ds_aff.cwiseProduct(dl_aff);
        rhs = -rd - qp.A.transpose() * (c.cwiseQuotient(s) + d.cwiseProduct(rp));
        Eigen::VectorXd dx = ldlt.solve(rhs);
        Eigen::VectorXd ds = -rp - qp.A * dx;
        Eigen::VectorXd dl = c.cwiseQuotient(s) + d.cwiseProduct(rp + qp.A * dx);

        const double alpha = std::min(step_length(s, ds), step_length(lambda, dl));
        x += alpha * dx;
        s += alpha * ds;
        lambda += alpha * dl;
    }

    rd = qp.P * x + qp.q + qp.A.transpose() * lambda;
    rp = qp.A * x + s - qp.b;
    res.primal_residual = inf_norm(rp);
    res.dual_residual = inf_norm(rd);
    res.mu = s.dot(lambda) / m;
    res.x = x;
    res.lambda = lambda;
    res.iterations = opts.max_iterations;
    // Ran out of iterations: a large stalled primal residual means the
    // constraints could not be met.
    res.status = (res.primal_residual > 1e-5 * b_scale) ? QpStatus::PrimalInfeasible
                                                        : QpStatus::MaxIterations;
    return res;
}

double feasibility_gap(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const int n = static_cast<int>(A.cols());
    const int m = static_cast<int>(A.rows());
    if (m == 0) return 0.0;

    // min 1/2 eps |x|^2 + 1/2 |t|^2  s.t.  Ax - t <= b, -t <= 0
    QpProblem relax;
    const int nv = n + m;
    relax.P = Eigen::MatrixXd::Zero(nv, nv);
    relax.P.topLeftCorner(n, n) = 1e-8 * Eigen::MatrixXd::Identity(n, n);
    relax.P.bottomRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
    relax.q = Eigen::VectorXd::Zero(nv);
    relax.A = Eigen::MatrixXd::Zero(2 * m, nv);
    relax.A.topLeftCorner(m, n) = A;
    relax.A.topRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
    relax.A.bottomRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
    relax.b = Eigen::VectorXd::Zero(2 * m);
    relax.b.head(m) = b;

    QpOptions opts;
    opts.tol_mu = 1e-12;
    const QpResult r = solve_qp(relax, opts);
    return r.x.tail(m).cwiseAbs().maxCoeff();
}

}  // namespace sscmpc
