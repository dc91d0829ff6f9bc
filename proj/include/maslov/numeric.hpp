// numeric.hpp — shared dense linear-algebra helpers: rank decisions, subspace
// bases, pseudoinverses, inertia counts. Every rank/degeneracy decision in the
// library goes through the single relative tolerance defined here.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace maslov {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

// One knob for all rank / transversality decisions (relative to the largest
// singular value).
inline constexpr double kRankTol = 1e-9;
// Relative threshold below which an eigenvalue counts as zero in signatures.
inline constexpr double kEigZeroTol = 1e-8;

/// Numerical rank from singular values, relative cutoff.
template <typename Scalar>
int rank_of(const MatrixX<Scalar>& a, double tol = kRankTol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= Scalar(0)) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++r;
    return r;
}

/// Orthonormal basis of the column span (left singular vectors kept at the
/// relative cutoff). Returns a matrix with rank_of(a) columns.
template <typename Scalar>
MatrixX<Scalar> orthonormalize(const MatrixX<Scalar>& a, double tol = kRankTol) {
    if (a.cols() == 0 || a.size() == 0) return MatrixX<Scalar>(a.rows(), 0);
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(a, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    int r = 0;
    if (s.size() > 0 && s(0) > Scalar(0))
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > tol * s(0)) ++r;
    return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of ker(a): right singular vectors past the rank cutoff.
template <typename Scalar>
MatrixX<Scalar> nullspace(const MatrixX<Scalar>& a, double tol = kRankTol) {
    if (a.rows() == 0) return MatrixX<Scalar>::Identity(a.cols(), a.cols());
    if (a.cols() == 0) return MatrixX<Scalar>(0, 0);
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int r = 0;
    if (s.size() > 0 && s(0) > Scalar(0))
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > tol * s(0)) ++r;
    return svd.matrixV().rightCols(a.cols() - r);
}

/// Moore–Penrose pseudoinverse via SVD with the shared relative cutoff.
template <typename Scalar>
MatrixX<Scalar> pinv(const MatrixX<Scalar>& a, double tol = kRankTol) {
    if (a.size() == 0) return MatrixX<Scalar>(a.cols(), a.rows());
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    VectorX<Scalar> inv = VectorX<Scalar>::Zero(s.size());
    if (s.size() > 0 && s(0) > Scalar(0))
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > tol * s(0)) inv(i) = Scalar(1) / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Inertia of a symmetric matrix: eigenvalues with |mu| <= tol * max|mu|
/// count as zeros.
struct Inertia {
    int positives = 0;
    int negatives = 0;
    int zeros = 0;

    int signature() const { return positives - negatives; }
    int dimension() const { return positives + negatives + zeros; }
};

template <typename Scalar>
Inertia inertia_of(const MatrixX<Scalar>& sym, double tol = kEigZeroTol,
                   double noise_floor = 0.0) {
    Inertia out;
    if (sym.rows() == 0) return out;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(
        ((sym + sym.transpose()) / Scalar(2)).eval(), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const Scalar scale = ev.cwiseAbs().maxCoeff();
    // relative cut, bounded below by the absolute roundoff level of the data
    const Scalar cut = std::max<Scalar>(tol * (scale > Scalar(0) ? scale : Scalar(1)),
                                        Scalar(noise_floor));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > cut)
            ++out.positives;
        else if (ev(i) < -cut)
            ++out.negatives;
        else
            ++out.zeros;
    }
    return out;
}

// -------------------------------------------------------------------------
// Subspace geometry on orthonormal bases.
// -------------------------------------------------------------------------

/// Largest principal angle between equal-rank column spans, computed from the
/// sine (residual) side so that near-zero distances keep full precision.
/// Symmetric by construction; returns a value in [0, pi/2].
template <typename Scalar>
double subspace_distance(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b) {
    MatrixX<Scalar> qa = orthonormalize(a);
    MatrixX<Scalar> qb = orthonormalize(b);
    if (qa.cols() == 0 && qb.cols() == 0) return 0.0;
    if (qa.cols() == 0 || qb.cols() == 0) return std::asin(1.0);
    auto residual_norm = [](const MatrixX<Scalar>& u, const MatrixX<Scalar>& v) {
        MatrixX<Scalar> r = v - u * (u.transpose() * v);
        Eigen::JacobiSVD<MatrixX<Scalar>> svd(r);
        return svd.singularValues().size() ? double(svd.singularValues()(0)) : 0.0;
    };
    double s = std::max(residual_norm(qa, qb), residual_norm(qb, qa));
    s = std::min(1.0, std::max(0.0, s));
    return std::asin(s);
}

/// Orthonormal basis of span(a) ∩ span(b).
template <typename Scalar>
MatrixX<Scalar> intersect_spans(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b,
                                double tol = kRankTol) {
    MatrixX<Scalar> qa = orthonormalize(a, tol);
    MatrixX<Scalar> qb = orthonormalize(b, tol);
    if (qa.cols() == 0 || qb.cols() == 0) return MatrixX<Scalar>(a.rows(), 0);
    MatrixX<Scalar> glued(qa.rows(), qa.cols() + qb.cols());
    glued << qa, -qb;
    MatrixX<Scalar> coeffs = nullspace(glued, tol);
    if (coeffs.cols() == 0) return MatrixX<Scalar>(a.rows(), 0);
    return orthonormalize(MatrixX<Scalar>(qa * coeffs.topRows(qa.cols())), tol);
}

/// True when span(a) ⊆ span(b) at the shared tolerance.
template <typename Scalar>
bool span_contained(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b,
                    double tol = 1e-8) {
    MatrixX<Scalar> qa = orthonormalize(a);
    MatrixX<Scalar> qb = orthonormalize(b);
    if (qa.cols() == 0) return true;
    if (qb.cols() == 0) return false;
    MatrixX<Scalar> r = qa - qb * (qb.transpose() * qa);
    return r.norm() <= tol * std::sqrt(double(qa.cols()));
}

template <typename Scalar>
MatrixX<Scalar> symmetrize(const MatrixX<Scalar>& a) {
    return (a + a.transpose()) / Scalar(2);
}

}  // namespace maslov
