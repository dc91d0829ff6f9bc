// finite_lagrange.hpp — finite-dimensional constrained optimization: Lagrange
// multiplier residuals, constrained Hessians and Morse-pair tests, the
// Lagrangian space of multiplier linearizations, nullity via vertical
// intersections, and the index-additivity identity.

#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "maslov/grassmannian.hpp"

namespace maslov {

/// Constrained problem phi: R^m -> R restricted to level sets of
/// Phi: R^m -> R^n, with analytic derivative evaluators. Evaluators must be
/// reentrant; construction cross-checks them against central differences.
struct ConstrainedProblem {
    int m = 0;  // dim U
    int n = 0;  // dim M

    std::function<double(const Vector&)> phi;
    std::function<Vector(const Vector&)> phi_grad;       // m
    std::function<Matrix(const Vector&)> phi_hess;       // m x m symmetric
    std::function<Vector(const Vector&)> constraint;     // n
    std::function<Matrix(const Vector&)> constraint_jac; // n x m
    // second derivative of constraint component i: m x m symmetric
    std::function<Matrix(const Vector&, int)> constraint_hess;

    void validate_shapes_at(const Vector& u) const {
        if (int(u.size()) != m) throw std::invalid_argument("problem: u size != m");
        if (int(phi_grad(u).size()) != m ||
            phi_hess(u).rows() != m || phi_hess(u).cols() != m ||
            int(constraint(u).size()) != n ||
            constraint_jac(u).rows() != n || constraint_jac(u).cols() != m)
            throw std::invalid_argument("problem: evaluator shape mismatch");
        for (int i = 0; i < n; ++i) {
            Matrix h = constraint_hess(u, i);
            if (h.rows() != m || h.cols() != m)
                throw std::invalid_argument("problem: constraint hessian shape");
            if ((h - h.transpose()).norm() > 1e-10 * std::max(1.0, h.norm()))
                throw std::invalid_argument("problem: constraint hessian not symmetric");
        }
    }

    /// Central-difference check of the supplied first derivatives.
    void validate_derivatives_at(const Vector& u, double h = 1e-5,
                                 double tol = 1e-4) const {
        validate_shapes_at(u);
        Vector g = phi_grad(u);
        Matrix j = constraint_jac(u);
        const double scale = std::max(1.0, u.norm());
        for (int i = 0; i < m; ++i) {
            Vector up = u, dn = u;
            up(i) += h * scale;
            dn(i) -= h * scale;
            const double denom = 2 * h * scale;
            double dphi = (phi(up) - phi(dn)) / denom;
            if (std::abs(dphi - g(i)) > tol * std::max(1.0, std::abs(g(i))))
                throw std::invalid_argument("problem: phi gradient disagrees with FD");
            Vector dcon = (constraint(up) - constraint(dn)) / denom;
            if ((dcon - j.col(i)).norm() > tol * std::max(1.0, j.col(i).norm()))
                throw std::invalid_argument("problem: constraint jacobian disagrees with FD");
        }
    }
};

struct CriticalPoint {
    Vector u;  // m
    Vector p;  // n covector (stored as a column)
    Vector q;  // n, = Phi(u)
};

/// dphi(u) - p^T DPhi(u), as a column of length m; zero iff (u, p) critical.
inline Vector lagrange_residual(const ConstrainedProblem& problem, const Vector& u,
                                const Vector& p) {
    return problem.phi_grad(u) - problem.constraint_jac(u).transpose() * p;
}

/// Newton refinement of a critical point from a seed (u0, p0), holding
/// q = Phi(u0) fixed. Plumbing for tests that need genuine critical points.
inline CriticalPoint refine_critical_point(const ConstrainedProblem& problem,
                                           Vector u, Vector p, int max_iter = 80,
                                           double tol = 1e-12) {
    const Vector q = problem.constraint(u);
    auto residual_norm = [&](const Vector& uu, const Vector& pp) {
        return lagrange_residual(problem, uu, pp).norm() +
               (problem.constraint(uu) - q).norm();
    };
    for (int iter = 0; iter < max_iter; ++iter) {
        const double current = residual_norm(u, p);
        if (current < tol) break;
        Matrix jac = problem.constraint_jac(u);
        Matrix q_mat = problem.phi_hess(u);
        for (int i = 0; i < problem.n; ++i)
            q_mat -= p(i) * problem.constraint_hess(u, i);
        Matrix full(problem.m + problem.n, problem.m + problem.n);
        full << q_mat, -jac.transpose(), jac, Matrix::Zero(problem.n, problem.n);
        Vector rhs(problem.m + problem.n);
        rhs << -lagrange_residual(problem, u, p), -(problem.constraint(u) - q);
        Vector step = full.fullPivLu().solve(rhs);
        // backtracking keeps wild seeds from diverging
        double alpha = 1.0;
        for (int k = 0; k < 30; ++k) {
            Vector u_try = u + alpha * step.head(problem.m);
            Vector p_try = p + alpha * step.tail(problem.n);
            if (residual_norm(u_try, p_try) < current) {
                u = u_try;
                p = p_try;
                break;
            }
            alpha /= 2;
        }
        if (alpha < 1e-9) break;  // stalled
    }
    return CriticalPoint{u, p, problem.constraint(u)};
}

/// Q = d2phi - sum_i p_i d2Phi_i and an orthonormal basis of ker DPhi.
inline std::pair<Matrix, Matrix> hessian_data(const ConstrainedProblem& problem,
                                              const Vector& u, const Vector& p) {
    Matrix q = problem.phi_hess(u);
    for (int i = 0; i < problem.n; ++i)
        q -= p(i) * problem.constraint_hess(u, i);
    Matrix kernel = nullspace(problem.constraint_jac(u));
    return {symmetrize(q), kernel};
}

/// Morse pair test: the stacked matrix [Q; DPhi] has trivial kernel.
inline bool is_morse_pair(const ConstrainedProblem& problem, const Vector& u,
                          const Vector& p, double tol = kRankTol) {
    auto [q, kernel] = hessian_data(problem, u, p);
    Matrix jac = problem.constraint_jac(u);
    Matrix stacked(problem.m + problem.n, problem.m);
    stacked << q, jac;
    return rank_of(stacked, tol) == problem.m;
}

/// The Lagrangian space of multiplier linearizations:
///   { (dp, dq) : exists du with  Q du = DPhi^T dp,  dq = DPhi du }.
/// Computed as the (dp, dq)-projection of ker[Q | -DPhi^T]. Lagrangian of
/// dimension n for every finite-dimensional problem, including rank-deficient
/// DPhi; asserted on construction.
inline LagrangianFrame l_space(const ConstrainedProblem& problem, const Vector& u,
                               const Vector& p) {
    auto [q, kernel] = hessian_data(problem, u, p);
    Matrix jac = problem.constraint_jac(u);
    const int m = problem.m, n = problem.n;
    Matrix glued(m, m + n);
    glued << q, -jac.transpose();
    Matrix null_basis = nullspace(glued);  // columns: (du; dp)
    Matrix frame(2 * n, null_basis.cols());
    frame.topRows(n) = null_basis.bottomRows(n);         // dp
    frame.bottomRows(n) = jac * null_basis.topRows(m);   // dq
    auto space = standard_form(n);
    return LagrangianFrame(space, frame);  // rank/isotropy asserted here
}

/// Eigencount of the Hessian restricted to ker DPhi.
inline std::pair<int, int> hessian_index_nullity(const ConstrainedProblem& problem,
                                                 const Vector& u, const Vector& p,
                                                 double tol = kEigZeroTol) {
    auto [q, kernel] = hessian_data(problem, u, p);
    if (kernel.cols() == 0) return {0, 0};
    Matrix restricted = kernel.transpose() * q * kernel;
    Inertia inertia = inertia_of(symmetrize(restricted), tol);
    return {inertia.negatives, inertia.zeros};
}

/// Index additivity identity for a symmetric form Q and a subspace V:
///   ind-(Q) = ind-(Q|_V) + ind-(Q|_{V-perp_Q}) + dim(V ∩ V-perp_Q)
///             - dim(V ∩ ker Q);
/// returns LHS - RHS (contract: 0).
inline int index_additivity_check(const Matrix& q_raw, const Matrix& v_basis,
                                  double tol = kEigZeroTol) {
    Matrix q = symmetrize(q_raw);
    Matrix v = orthonormalize(v_basis);
    Matrix vperp = nullspace(Matrix((q * v).transpose()));  // {w : <Qv, w> = 0}
    const int lhs = inertia_of(q, tol).negatives;
    const int ind_v = inertia_of(Matrix(v.transpose() * q * v), tol).negatives;
    const int ind_vperp =
        vperp.cols() == 0
            ? 0
            : inertia_of(Matrix(vperp.transpose() * q * vperp), tol).negatives;
    const int dim_mixed = int(intersect_spans(v, vperp).cols());
    const int dim_kernel = int(intersect_spans(v, nullspace(q)).cols());
    return lhs - (ind_v + ind_vperp + dim_mixed - dim_kernel);
}

}  // namespace maslov
