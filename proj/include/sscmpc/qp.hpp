#pragma once

#include <Eigen/Dense>

namespace sscmpc {

/// Convex quadratic program  min 1/2 x'Px + q'x  s.t.  Ax <= b
/// with P symmetric positive semidefinite.
struct QpProblem {
    Eigen::MatrixXd P;
    Eigen::VectorXd q;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;

    int num_vars() const { return static_cast<int>(P.rows()); }
    int num_constraints() const { return static_cast<int>(A.rows()); }
};

enum class QpStatus { Optimal, PrimalInfeasible, MaxIterations };

struct QpResult {
    QpStatus status = QpStatus::MaxIterations;
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;  // multipliers of Ax <= b
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double mu = 0.0;
};

struct QpOptions {
    double tol_primal = 1e-8;
    double tol_dual = 1e-8;
    double tol_mu = 1e-10;
    int max_iterations = 100;
};

/// Primal-dual interior-point solve (Mehrotra predictor-corrector). Fully
/// deterministic; an optional warm-start point seeds the primal iterate.
QpResult solve_qp(const QpProblem& qp, const QpOptions& opts = {},
                  const Eigen::VectorXd* x_warm = nullptr);

/// Largest constraint violation max(0, max_i(a_i'x - b_i)).
double qp_violation(const QpProblem& qp, const Eigen::VectorXd& x);

/// Decides feasibility of {x : Ax <= b} by minimizing the squared elastic
/// relaxation; returns the smallest achievable worst-case violation (~0 when
/// feasible). Used as a certificate when the hard solve does not converge.
double feasibility_gap(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace sscmpc
