// maslov_index.hpp — index computations on the Lagrangian Grassmannian: the
// Kashiwara triple index, the pair index Ind_Pi, crossing counts for curve
// segments, discrete curve index sums, and monotonicity tests.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "maslov/grassmannian.hpp"

namespace maslov {

/// Signature of a (possibly degenerate) quadratic form: eigenvalues within
/// the relative zero threshold count as zeros, never as signs.
using SignatureResult = Inertia;

template <typename Scalar>
struct DiscreteLagrangianCurveT {
    std::vector<double> times;                       // strictly increasing
    std::vector<LagrangianFrameT<Scalar>> frames;    // one per time

    void validate() const {
        if (times.size() != frames.size())
            throw std::invalid_argument("DiscreteLagrangianCurve: size mismatch");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw std::invalid_argument(
                    "DiscreteLagrangianCurve: times must be strictly increasing");
    }
};

using DiscreteLagrangianCurve = DiscreteLagrangianCurveT<double>;

/// Kashiwara / triple index: signature of q(l) = sigma(l0, l2) on Lambda1,
/// where l = l0 + l2 is the (unique) decomposition along the transversal pair
/// (Lambda0, Lambda2). Lambda1 may be non-transversal to either; the
/// degenerate directions land in the zeros count. Equals sgn S of the chart
/// matrix of Lambda1 in (Lambda0, Lambda2) whenever the chart applies.
template <typename Scalar>
SignatureResult triple_index(const LagrangianFrameT<Scalar>& lambda0,
                             const LagrangianFrameT<Scalar>& lambda1,
                             const LagrangianFrameT<Scalar>& lambda2,
                             double tol = kEigZeroTol) {
    const int n = lambda0.n();
    if (intersection_dim(lambda0, lambda2) != 0)
        throw std::invalid_argument("triple_index: Lambda0 must be transversal to Lambda2");
    MatrixX<Scalar> glued(2 * n, 2 * n);
    glued << lambda0.basis, lambda2.basis;
    MatrixX<Scalar> coeff = glued.partialPivLu().solve(lambda1.basis);  // 2n x n
    MatrixX<Scalar> part0 = lambda0.basis * coeff.topRows(n);
    MatrixX<Scalar> part2 = lambda2.basis * coeff.bottomRows(n);
    MatrixX<Scalar> form = part0.transpose() * lambda0.space.omega * part2;
    // forms that are pure roundoff must count as zeros, not as signs: the
    // cut is floored at the roundoff level of the decomposition
    return inertia_of(symmetrize(form), tol,
                      1e-13 * std::max(1.0, double(coeff.squaredNorm())));
}

/// Four-term cocycle sum
///   mu(L1,L2,L3) - mu(L0,L2,L3) + mu(L0,L1,L3) - mu(L0,L1,L2);
/// the contract is zero whenever all four triples are defined (Lambda0 ⋔
/// Lambda2, Lambda0 ⋔ Lambda3 and Lambda1 ⋔ Lambda3). The triple index is
/// fully alternating, so this is the unique sign arrangement of the cyclic
/// four-term sum that vanishes identically.
template <typename Scalar>
int chain_rule_defect(const LagrangianFrameT<Scalar>& l0,
                      const LagrangianFrameT<Scalar>& l1,
                      const LagrangianFrameT<Scalar>& l2,
                      const LagrangianFrameT<Scalar>& l3,
                      double tol = kEigZeroTol) {
    return triple_index(l1, l2, l3, tol).signature() -
           triple_index(l0, l2, l3, tol).signature() +
           triple_index(l0, l1, l3, tol).signature() -
           triple_index(l0, l1, l2, tol).signature();
}

/// Pair index Ind_Pi(Lambda0, Lambda1): inertia of q(l) = sigma(l1, l0) on
/// D = (Lambda0 + Lambda1) ∩ Pi, with l = l0 + l1 chosen by minimum-norm
/// least squares. Vectors of D inside Lambda0 ∩ Lambda1 lie in the radical
/// and contribute zeros; degenerate configurations never error.
template <typename Scalar>
SignatureResult pair_index(const LagrangianFrameT<Scalar>& pi,
                           const LagrangianFrameT<Scalar>& lambda0,
                           const LagrangianFrameT<Scalar>& lambda1,
                           double tol = kEigZeroTol) {
    MatrixX<Scalar> glued(lambda0.basis.rows(),
                          lambda0.basis.cols() + lambda1.basis.cols());
    glued << lambda0.basis, lambda1.basis;
    MatrixX<Scalar> domain = intersect_spans(glued, pi.basis);
    if (domain.cols() == 0) return SignatureResult{};
    MatrixX<Scalar> coeff = pinv(glued) * domain;  // 2n x d, minimum-norm
    const int n = lambda0.n();
    MatrixX<Scalar> part0 = lambda0.basis * coeff.topRows(n);
    MatrixX<Scalar> part1 = lambda1.basis * coeff.bottomRows(n);
    MatrixX<Scalar> form = part1.transpose() * lambda0.space.omega * part0;
    return inertia_of(symmetrize(form), tol,
                      1e-13 * std::max(1.0, double(coeff.squaredNorm())));
}

/// Number of Pi-train crossings of an increasing simple curve from Lambda0 to
/// Lambda1: interior crossings (the negatives of the pair form) plus arrival
/// crossings at the endpoint, with departures from the train not counted.
template <typename Scalar>
int pair_crossings(const LagrangianFrameT<Scalar>& pi,
                   const LagrangianFrameT<Scalar>& lambda0,
                   const LagrangianFrameT<Scalar>& lambda1,
                   double tol = kEigZeroTol) {
    const int interior = pair_index(pi, lambda0, lambda1, tol).negatives;
    MatrixX<Scalar> l01 = intersect_spans(lambda0.basis, lambda1.basis);
    MatrixX<Scalar> l1pi = intersect_spans(lambda1.basis, pi.basis);
    MatrixX<Scalar> l01pi = intersect_spans(l01, pi.basis);
    return interior + int(l1pi.cols()) - int(l01pi.cols());
}

/// Sum of pair indices over consecutive frames.
template <typename Scalar>
int curve_index_sum(const DiscreteLagrangianCurveT<Scalar>& curve,
                    const LagrangianFrameT<Scalar>& pi, double tol = kEigZeroTol) {
    curve.validate();
    int total = 0;
    for (std::size_t i = 0; i + 1 < curve.frames.size(); ++i)
        total += pair_index(pi, curve.frames[i], curve.frames[i + 1], tol).negatives;
    return total;
}

/// Intersection number with the train of Lambda of any simple curve from
/// gamma0 to gamma1 staying inside the chart of Delta:
/// (mu(Lambda, gamma1, Delta) - mu(Lambda, gamma0, Delta)) / 2.
template <typename Scalar>
double simple_curve_maslov(const LagrangianFrameT<Scalar>& gamma0,
                           const LagrangianFrameT<Scalar>& gamma1,
                           const LagrangianFrameT<Scalar>& lambda,
                           const LagrangianFrameT<Scalar>& delta,
                           double tol = kEigZeroTol) {
    if (intersection_dim(gamma0, delta) != 0 || intersection_dim(gamma1, delta) != 0)
        throw std::invalid_argument("simple_curve_maslov: curve endpoints must avoid Delta");
    const int s1 = triple_index(lambda, gamma1, delta, tol).signature();
    const int s0 = triple_index(lambda, gamma0, delta, tol).signature();
    return double(s1 - s0) / 2.0;
}

namespace detail {

// A Lagrangian plane transversal to both a and b, found on the rotation
// family exp(theta J) * (J a); theta = 0 already works for a.
template <typename Scalar>
LagrangianFrameT<Scalar> common_transversal(const LagrangianFrameT<Scalar>& a,
                                            const LagrangianFrameT<Scalar>& b) {
    const auto& space = a.space;
    MatrixX<Scalar> j = space.omega;  // for the standard form, omega = J
    LagrangianFrameT<Scalar> candidate(space, MatrixX<Scalar>(j * a.basis));
    const double margin = 0.05;
    LagrangianFrameT<Scalar> best = candidate;
    double best_gap = -1.0;
    for (double theta : {0.0, 0.3, 0.7, 1.1, 1.5, 1.9, 2.4, 2.8}) {
        MatrixX<Scalar> rot =
            (theta == 0.0) ? MatrixX<Scalar>::Identity(space.dim(), space.dim())
                           : MatrixX<Scalar>((theta * j).exp());
        LagrangianFrameT<Scalar> delta(space, MatrixX<Scalar>(rot * candidate.basis));
        if (intersection_dim(delta, a) != 0 || intersection_dim(delta, b) != 0) continue;
        const double gap =
            std::min(grassmannian_distance(delta, a), grassmannian_distance(delta, b));
        if (gap > best_gap) {
            best_gap = gap;
            best = delta;
        }
        if (gap > margin) return delta;
    }
    if (best_gap < 0)
        throw std::runtime_error("common_transversal: no transversal found");
    return best;
}

}  // namespace detail

/// True iff every consecutive step moves in the nondecreasing direction: in a
/// chart holding both frames of the step, the motion matrix S_{i+1} - S_i is
/// positive semidefinite at tolerance. Monotonicity is train-independent, so
/// the chart train is a plane transversal to both frames of the step; a
/// monotone curve crossing the train of pi still tests true. The cut grows
/// with the squared step size, the resolving power of a sampled curve whose
/// slow directions move at second order.
template <typename Scalar>
bool is_monotone_increasing(const DiscreteLagrangianCurveT<Scalar>& curve,
                            const LagrangianFrameT<Scalar>& pi,
                            double tol = kEigZeroTol) {
    curve.validate();
    for (const auto& frame : curve.frames)
        if (frame.space.dim() != pi.space.dim())
            throw std::invalid_argument("is_monotone_increasing: mismatched spaces");
    for (std::size_t i = 0; i + 1 < curve.frames.size(); ++i) {
        const auto& a = curve.frames[i];
        const auto& b = curve.frames[i + 1];
        const double step = grassmannian_distance(a, b);
        if (step < 1e-14) continue;
        LagrangianFrameT<Scalar> delta = detail::common_transversal(a, b);
        MatrixX<Scalar> motion = to_chart(b, a, delta).s;  // S of a is zero here
        Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(symmetrize(motion),
                                                          Eigen::EigenvaluesOnly);
        const double cut =
            std::max(tol * std::max(1.0, double(motion.norm())), 0.5 * step * step);
        if (es.eigenvalues().minCoeff() < -cut) return false;
    }
    return true;
}

}  // namespace maslov
