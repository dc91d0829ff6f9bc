// morse.hpp — Morse indices from L-curves: the piecewise-constant index
// count, the brute-force Hessian eigenvalue oracle, the variational lower
// bound over converged limit frames, conjugate-point localization, and the
// nested-partition increment checks.

#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "maslov/jacobi.hpp"

namespace maslov {

struct IndexReport {
    int piecewise_index = 0;
    std::optional<int> oracle_index;
    std::optional<int> oracle_nullity;
    int nullity_term = 0;             // dim of the running frame intersection
    std::vector<int> pair_terms;      // crossing count per consecutive pair
    std::vector<double> partition;
    bool converged = true;
    double runtime_seconds = 0.0;
};

namespace detail {

// Assembles the discrete stationarity form on piecewise-constant variations
// (lower block-triangular; symmetrized by the caller where needed) and the
// endpoint map taking a variation to the base component of its total
// displacement.
struct DiscreteForm {
    Matrix q;         // (N k) x (N k), not symmetric
    Matrix endpoint;  // n x (N k)
};

inline DiscreteForm assemble_discrete_form(const JacobiProblem& problem,
                                           const std::vector<IntervalData>& cells) {
    const int k = problem.k;
    const int n = problem.n;
    const int total = int(cells.size()) * k;
    DiscreteForm out;
    out.q = Matrix::Zero(total, total);
    out.endpoint = Matrix::Zero(n, total);
    const auto space = standard_form(n);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out.q.block(int(i) * k, int(i) * k, k, k) = cells[i].g_sigma + cells[i].b_int;
        for (std::size_t j = 0; j < i; ++j)
            out.q.block(int(j) * k, int(i) * k, k, k) =
                cells[j].z.transpose() * space.omega * cells[i].z;
        out.endpoint.middleCols(int(i) * k, k) = cells[i].z.bottomRows(n);
    }
    return out;
}

}  // namespace detail

/// Brute-force oracle: eigencount of the discretized second variation on
/// piecewise-constant variations with fixed endpoints (the base component of
/// the total displacement vanishes). Shares the interval quadrature with the
/// recursion, so the two sides quantize the same form.
inline std::pair<int, int> hessian_oracle_index(const JacobiProblem& problem,
                                                const std::vector<double>& partition,
                                                double tol = kEigZeroTol,
                                                int size_guard = 2000) {
    const auto cells = discretize(problem, partition);
    const int total = int(cells.size()) * problem.k;
    if (total > size_guard)
        throw std::invalid_argument("hessian_oracle_index: size guard exceeded");
    auto form = detail::assemble_discrete_form(problem, cells);
    Matrix kernel = nullspace(form.endpoint);
    if (kernel.cols() == 0) return {0, 0};
    Matrix restricted =
        kernel.transpose() * symmetrize(form.q) * kernel;
    Inertia inertia = inertia_of(restricted, tol);
    return {inertia.negatives, inertia.zeros};
}

/// The piecewise-constant index formula: run the recursion, close the curve
/// with the vertical on both ends, count train crossings pair by pair, add
/// the dimension of the running intersection of all frames, subtract n.
inline IndexReport piecewise_index(const JacobiProblem& problem,
                                   const std::vector<double>& partition,
                                   bool with_oracle = false,
                                   double tol = kEigZeroTol) {
    LCurve curve = run_recursion(problem, partition);
    const auto space = standard_form(problem.n);
    const auto pi = vertical_frame(space);

    IndexReport report;
    report.partition = partition;

    std::vector<LagrangianFrame> closed = curve.frames;
    closed.push_back(pi);  // Lambda_{N+1} = Pi; Lambda_0 = Pi is frames[0]

    int sum = 0;
    for (std::size_t i = 0; i + 1 < closed.size(); ++i) {
        const int term = pair_crossings(pi, closed[i], closed[i + 1], tol);
        report.pair_terms.push_back(term);
        sum += term;
    }

    Matrix running = curve.frames.front().basis;
    for (std::size_t i = 1; i < curve.frames.size() && running.cols() > 0; ++i)
        running = intersect_spans(running, curve.frames[i].basis);
    report.nullity_term = int(running.cols());

    report.piecewise_index = sum + report.nullity_term - problem.n;

    if (with_oracle) {
        auto [ind, nullity] = hessian_oracle_index(problem, partition, tol);
        report.oracle_index = ind;
        report.oracle_nullity = nullity;
    }
    return report;
}

/// Times where the curve meets the vertical: exact node intersections carry
/// their dimension; crossings detected inside a step are reported at the
/// step midpoint with the crossing count as multiplicity.
inline std::vector<std::pair<double, int>> conjugate_point_times(
    const JacobiProblem& problem, const std::vector<double>& partition,
    double tol = kEigZeroTol) {
    LCurve curve = run_recursion(problem, partition);
    const auto pi = vertical_frame(standard_form(problem.n));
    std::vector<std::pair<double, int>> out;
    for (std::size_t i = 1; i < curve.frames.size(); ++i) {
        const int node_dim = intersection_dim(curve.frames[i], pi);
        const int interior =
            pair_index(pi, curve.frames[i - 1], curve.frames[i], tol).negatives;
        if (interior > 0)
            out.emplace_back(0.5 * (curve.partition[i - 1] + curve.partition[i]),
                             interior);
        if (node_dim > 0) out.emplace_back(curve.partition[i], node_dim);
    }
    return out;
}

/// Evaluate the lower-bound expression over converged limit frames sampled on
/// each partition of the family; returns the largest value. Never exceeds
/// the oracle index.
inline int main_lower_bound(const JacobiProblem& problem,
                            const std::vector<std::vector<double>>& partition_family,
                            double refine_tol = 1e-7, int max_depth = 6,
                            double tol = kEigZeroTol) {
    const auto space = standard_form(problem.n);
    const auto pi = vertical_frame(space);
    int best = 0;
    for (const auto& partition : partition_family) {
        std::vector<LagrangianFrame> frames;
        frames.push_back(pi);  // the limit frame at time zero
        for (std::size_t i = 1; i < partition.size(); ++i) {
            JacobiProblem clipped = problem;
            clipped.t1 = partition[i];
            auto refined = refine_to_limit(clipped, refine_tol, max_depth);
            if (!refined.converged)
                throw std::runtime_error("main_lower_bound: refinement did not converge");
            frames.push_back(refined.frame);
        }
        frames.push_back(pi);  // cyclic closure
        int sum = 0;
        for (std::size_t i = 0; i + 1 < frames.size(); ++i)
            sum += pair_crossings(pi, frames[i], frames[i + 1], tol);
        Matrix running = frames.front().basis;
        for (std::size_t i = 1; i + 1 < frames.size() && running.cols() > 0; ++i)
            running = intersect_spans(running, frames[i].basis);
        best = std::max(best, sum + int(running.cols()) - problem.n);
    }
    return best;
}

/// Index increment across nested piecewise-constant spaces: lhs is the oracle
/// difference, rhs the crossing count between the two final frames. The
/// contract is lhs >= rhs, with equality under the positive-splitting
/// hypotheses.
inline std::pair<int, int> increment_bound_check(
    const JacobiProblem& problem, const std::vector<double>& partition_coarse,
    const std::vector<double>& partition_fine, double tol = kEigZeroTol) {
    for (double node : partition_coarse) {
        bool found = false;
        for (double other : partition_fine)
            if (std::abs(node - other) < 1e-12) found = true;
        if (!found)
            throw std::invalid_argument(
                "increment_bound_check: coarse partition must nest in the fine one");
    }
    auto [ind_fine, null_fine] = hessian_oracle_index(problem, partition_fine, tol);
    auto [ind_coarse, null_coarse] = hessian_oracle_index(problem, partition_coarse, tol);
    LagrangianFrame coarse_frame =
        run_recursion(problem, partition_coarse).frames.back();
    LagrangianFrame fine_frame = run_recursion(problem, partition_fine).frames.back();
    const auto pi = vertical_frame(standard_form(problem.n));
    const int rhs = pair_crossings(pi, coarse_frame, fine_frame, tol);
    return {ind_fine - ind_coarse, rhs};
}

}  // namespace maslov
