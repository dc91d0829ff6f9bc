// symplectic.hpp — exact-dimension linear symplectic algebra: the standard
// form, symplectic products and maps, skew-orthogonal complements and the
// isotropic / coisotropic / Lagrangian classification.

#pragma once

#include <stdexcept>
#include <string>

#include "maslov/numeric.hpp"

namespace maslov {

/// Even-dimensional real vector space with a fixed nondegenerate
/// skew-symmetric form. Coordinates are ordered (p_1..p_n, q_1..q_n).
template <typename Scalar>
struct SymplecticSpaceT {
    int n = 0;                // half-dimension
    MatrixX<Scalar> omega;    // 2n x 2n form matrix

    int dim() const { return 2 * n; }

    SymplecticSpaceT() = default;
    SymplecticSpaceT(int half_dim, MatrixX<Scalar> form)
        : n(half_dim), omega(std::move(form)) {
        if (n < 1) throw std::invalid_argument("SymplecticSpace: n must be >= 1");
        if (omega.rows() != 2 * n || omega.cols() != 2 * n)
            throw std::invalid_argument("SymplecticSpace: omega must be 2n x 2n");
        const double scale = omega.norm();
        if ((omega + omega.transpose()).norm() > 1e-12 * (scale > 0 ? scale : 1.0))
            throw std::invalid_argument("SymplecticSpace: omega must be skew-symmetric");
        Eigen::JacobiSVD<MatrixX<Scalar>> svd(omega);
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) <= kRankTol * s(0))
            throw std::invalid_argument("SymplecticSpace: omega is degenerate");
    }
};

using SymplecticSpace = SymplecticSpaceT<double>;

/// Subspace of R^{2n} held as an orthonormalized basis (columns).
template <typename Scalar>
struct SubspaceT {
    int ambient_dim = 0;
    MatrixX<Scalar> basis;  // orthonormal columns

    SubspaceT() = default;
    explicit SubspaceT(const MatrixX<Scalar>& raw_basis, double tol = kRankTol)
        : ambient_dim(int(raw_basis.rows())), basis(orthonormalize(raw_basis, tol)) {
        if (basis.cols() != raw_basis.cols())
            throw std::invalid_argument("Subspace: basis columns are rank-deficient");
    }

    int dim() const { return int(basis.cols()); }
};

using Subspace = SubspaceT<double>;

/// The Darboux matrix J = (0 I; -I 0); sigma(x, y) = x^T J y.
template <typename Scalar = double>
SymplecticSpaceT<Scalar> standard_form(int n) {
    if (n < 1) throw std::invalid_argument("standard_form: n must be >= 1");
    MatrixX<Scalar> j = MatrixX<Scalar>::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = MatrixX<Scalar>::Identity(n, n);
    j.bottomLeftCorner(n, n) = -MatrixX<Scalar>::Identity(n, n);
    return SymplecticSpaceT<Scalar>(n, std::move(j));
}

template <typename Scalar>
Scalar symplectic_product(const SymplecticSpaceT<Scalar>& space,
                          const VectorX<Scalar>& a, const VectorX<Scalar>& b) {
    if (a.size() != space.dim() || b.size() != space.dim())
        throw std::invalid_argument("symplectic_product: vector length != 2n");
    return a.dot(space.omega * b);
}

/// ||F^T Omega F - Omega|| <= tol * ||Omega|| in the spectral norm.
template <typename Scalar>
bool is_symplectic_map(const SymplecticSpaceT<Scalar>& space,
                       const MatrixX<Scalar>& f, double tol = 1e-9) {
    if (f.rows() != space.dim() || f.cols() != space.dim())
        throw std::invalid_argument("is_symplectic_map: F must be 2n x 2n");
    MatrixX<Scalar> defect = f.transpose() * space.omega * f - space.omega;
    Eigen::JacobiSVD<MatrixX<Scalar>> svd_d(defect), svd_o(space.omega);
    return svd_d.singularValues()(0) <= tol * svd_o.singularValues()(0);
}

/// Gamma^∠ = { x : sigma(x, y) = 0 for all y in Gamma } = ker((Omega B)^T).
template <typename Scalar>
SubspaceT<Scalar> skew_orthogonal_complement(const SymplecticSpaceT<Scalar>& space,
                                             const SubspaceT<Scalar>& gamma) {
    if (gamma.ambient_dim != space.dim())
        throw std::invalid_argument("skew_orthogonal_complement: ambient mismatch");
    MatrixX<Scalar> m = (space.omega * gamma.basis).transpose();
    return SubspaceT<Scalar>(nullspace(m));
}

enum class SubspaceKind { isotropic, coisotropic, lagrangian, symplectic_generic };

inline const char* to_string(SubspaceKind k) {
    switch (k) {
        case SubspaceKind::isotropic: return "isotropic";
        case SubspaceKind::coisotropic: return "coisotropic";
        case SubspaceKind::lagrangian: return "lagrangian";
        default: return "symplectic-generic";
    }
}

template <typename Scalar>
SubspaceKind classify_subspace(const SymplecticSpaceT<Scalar>& space,
                               const SubspaceT<Scalar>& gamma, double tol = 1e-8) {
    SubspaceT<Scalar> comp = skew_orthogonal_complement(space, gamma);
    const bool iso = span_contained(gamma.basis, comp.basis, tol);
    const bool coiso = span_contained(comp.basis, gamma.basis, tol);
    if (iso && coiso) return SubspaceKind::lagrangian;
    if (iso) return SubspaceKind::isotropic;
    if (coiso) return SubspaceKind::coisotropic;
    return SubspaceKind::symplectic_generic;
}

}  // namespace maslov
