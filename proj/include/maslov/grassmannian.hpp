// grassmannian.hpp — Lagrangian subspaces as 2n x n frames, charts by
// transversal pairs, tangent quadratic forms, and the principal-angle metric
// on the Lagrangian Grassmannian.

#pragma once

#include <stdexcept>

#include "maslov/symplectic.hpp"

namespace maslov {

/// A Lagrangian subspace held as an orthonormalized 2n x n frame. Frames are
/// non-unique; subspace equality is always tested through
/// grassmannian_distance, never through matrix equality.
template <typename Scalar>
struct LagrangianFrameT {
    SymplecticSpaceT<Scalar> space;
    MatrixX<Scalar> basis;  // 2n x n, orthonormal columns

    LagrangianFrameT() = default;
    LagrangianFrameT(const SymplecticSpaceT<Scalar>& sp, const MatrixX<Scalar>& raw,
                     double tol = 1e-8)
        : space(sp), basis(orthonormalize(raw, kRankTol)) {
        if (raw.rows() != sp.dim())
            throw std::invalid_argument("LagrangianFrame: basis rows != 2n");
        if (basis.cols() != sp.n)
            throw std::invalid_argument("LagrangianFrame: rank != n");
        const double scale = sp.omega.norm();
        const double defect = (basis.transpose() * sp.omega * basis).norm();
        if (defect > tol * (scale > 0 ? scale : 1.0))
            throw std::invalid_argument("LagrangianFrame: basis is not isotropic");
    }

    int n() const { return space.n; }
};

using LagrangianFrame = LagrangianFrameT<double>;

/// Chart coordinates of a Lagrangian plane: the symmetric matrix S writing it
/// as the graph of a map from Lambda0 to Lambda2 in a Darboux-adapted basis.
template <typename Scalar>
struct ChartCoordinatesT {
    MatrixX<Scalar> s;                  // n x n symmetric
    LagrangianFrameT<Scalar> lambda0;   // horizontal of the chart
    LagrangianFrameT<Scalar> lambda2;   // vertical-at-infinity of the chart
};

using ChartCoordinates = ChartCoordinatesT<double>;

/// {(p, 0)} — the tangent to the fiber in (p, q) coordinates.
template <typename Scalar = double>
LagrangianFrameT<Scalar> vertical_frame(const SymplecticSpaceT<Scalar>& space) {
    MatrixX<Scalar> b = MatrixX<Scalar>::Zero(space.dim(), space.n);
    b.topRows(space.n) = MatrixX<Scalar>::Identity(space.n, space.n);
    return LagrangianFrameT<Scalar>(space, b);
}

/// {(0, q)}.
template <typename Scalar = double>
LagrangianFrameT<Scalar> horizontal_frame(const SymplecticSpaceT<Scalar>& space) {
    MatrixX<Scalar> b = MatrixX<Scalar>::Zero(space.dim(), space.n);
    b.bottomRows(space.n) = MatrixX<Scalar>::Identity(space.n, space.n);
    return LagrangianFrameT<Scalar>(space, b);
}

template <typename Scalar>
int intersection_dim(const LagrangianFrameT<Scalar>& a,
                     const LagrangianFrameT<Scalar>& b, double tol = kRankTol) {
    if (a.space.dim() != b.space.dim())
        throw std::invalid_argument("intersection_dim: mismatched spaces");
    MatrixX<Scalar> glued(a.basis.rows(), a.basis.cols() + b.basis.cols());
    glued << a.basis, b.basis;
    return a.space.dim() - rank_of(glued, tol);
}

/// Largest principal angle between the two planes; zero iff equal subspaces.
template <typename Scalar>
double grassmannian_distance(const LagrangianFrameT<Scalar>& a,
                             const LagrangianFrameT<Scalar>& b) {
    if (a.space.dim() != b.space.dim())
        throw std::invalid_argument("grassmannian_distance: mismatched spaces");
    return subspace_distance(a.basis, b.basis);
}

namespace detail {

// Completes a basis E of Lambda0 with the sigma-dual basis F inside Lambda2
// (sigma(e_i, f_j) = delta_ij). Returns M = [E | F]; M^T Omega M = J.
template <typename Scalar>
MatrixX<Scalar> symplectic_gram_schmidt(const LagrangianFrameT<Scalar>& lambda2,
                                        const LagrangianFrameT<Scalar>& lambda0) {
    const int n = lambda0.n();
    MatrixX<Scalar> pairing =
        lambda0.basis.transpose() * lambda0.space.omega * lambda2.basis;  // n x n
    if (rank_of(pairing) < n)
        throw std::invalid_argument("darboux_adapted_basis: frames are not transversal");
    MatrixX<Scalar> f = lambda2.basis * pairing.inverse();
    MatrixX<Scalar> m(lambda0.space.dim(), 2 * n);
    m << lambda0.basis, f;
    return m;
}

}  // namespace detail

/// Symplectic T with T(Lambda0) = {(p,0)} and T(Lambda2) = {(0,q)}, built by
/// symplectic Gram-Schmidt with the pairing normalized to sigma(e_i, f_j) =
/// delta_ij. Requires Lambda0 transversal to Lambda2.
template <typename Scalar>
MatrixX<Scalar> darboux_adapted_basis(const LagrangianFrameT<Scalar>& lambda2,
                                      const LagrangianFrameT<Scalar>& lambda0) {
    return detail::symplectic_gram_schmidt(lambda2, lambda0).inverse();
}

/// Graph coordinates of lambda1 in the chart (Lambda0, Lambda2): the unique
/// symmetric S with lambda1 = {e + F S e}. Fails when lambda1 leaves the
/// chart domain (lambda1 not transversal to Lambda2).
template <typename Scalar>
ChartCoordinatesT<Scalar> to_chart(const LagrangianFrameT<Scalar>& lambda1,
                                   const LagrangianFrameT<Scalar>& lambda0,
                                   const LagrangianFrameT<Scalar>& lambda2,
                                   double sym_tol = 1e-8) {
    const int n = lambda1.n();
    MatrixX<Scalar> m = detail::symplectic_gram_schmidt(lambda2, lambda0);
    MatrixX<Scalar> coords = m.partialPivLu().solve(lambda1.basis);  // 2n x n
    MatrixX<Scalar> a = coords.topRows(n);
    MatrixX<Scalar> b = coords.bottomRows(n);
    if (rank_of(a) < n)
        throw std::invalid_argument("to_chart: frame is outside the chart domain");
    MatrixX<Scalar> s = b * a.inverse();
    const double defect = (s - s.transpose()).norm();
    const double scale = std::max(1.0, double(s.norm()));
    if (defect > sym_tol * scale)
        throw std::runtime_error("to_chart: symmetry defect exceeds tolerance");
    return ChartCoordinatesT<Scalar>{symmetrize(s), lambda0, lambda2};
}

/// Inverse of to_chart: the Lagrangian plane {e + F S e}.
template <typename Scalar>
LagrangianFrameT<Scalar> from_chart(const ChartCoordinatesT<Scalar>& coords,
                                    double sym_tol = 1e-8) {
    const auto& s = coords.s;
    const double scale = std::max(1.0, double(s.norm()));
    if ((s - s.transpose()).norm() > sym_tol * scale)
        throw std::invalid_argument("from_chart: S must be symmetric");
    MatrixX<Scalar> m = detail::symplectic_gram_schmidt(coords.lambda2, coords.lambda0);
    const int n = coords.lambda0.n();
    MatrixX<Scalar> e = m.leftCols(n), f = m.rightCols(n);
    return LagrangianFrameT<Scalar>(coords.lambda0.space,
                                    MatrixX<Scalar>(e + f * symmetrize(s)));
}

/// Quadratic form of a tangent vector: M_ij = sigma(frame_i, frame_dot_j),
/// symmetrized. Adding frame * C to frame_dot leaves it unchanged.
template <typename Scalar>
MatrixX<Scalar> tangent_form(const LagrangianFrameT<Scalar>& frame,
                             const MatrixX<Scalar>& frame_dot) {
    if (frame_dot.rows() != frame.space.dim() || frame_dot.cols() != frame.n())
        throw std::invalid_argument("tangent_form: frame_dot must be 2n x n");
    return symmetrize(
        MatrixX<Scalar>(frame.basis.transpose() * frame.space.omega * frame_dot));
}

}  // namespace maslov
