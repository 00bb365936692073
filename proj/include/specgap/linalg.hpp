#pragma once

// Dense solver layer shared by every other module: Hermitian-definite and
// general generalized eigenproblems, smallest singular values, and weighted
// subspace gaps.  Everything delegates to Eigen (LAPACKE-backed where the
// build enables it); the contract is the residual bound, not the algorithm.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "specgap/errors.hpp"

namespace specgap {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

// Hermitian form matrix s against a Hermitian positive-definite mass m.
struct HermitianPencil {
    MatrixXcd s;
    MatrixXcd m;

    Index dim() const { return s.rows(); }

    static HermitianPencil make(MatrixXcd s, MatrixXcd m) {
        if (s.rows() != s.cols() || m.rows() != m.cols() || s.rows() != m.rows())
            throw std::invalid_argument("HermitianPencil: shape mismatch");
        const double ns = s.norm(), nm = m.norm();
        if ((s - s.adjoint()).norm() > 1e-12 * std::max(ns, 1.0))
            throw std::invalid_argument("HermitianPencil: s not Hermitian");
        if ((m - m.adjoint()).norm() > 1e-12 * std::max(nm, 1.0))
            throw std::invalid_argument("HermitianPencil: m not Hermitian");
        return {std::move(s), std::move(m)};
    }
};

// Arbitrary square t against a Hermitian positive-definite mass m.
struct GeneralPencil {
    MatrixXcd t;
    MatrixXcd m;

    Index dim() const { return t.rows(); }

    static GeneralPencil make(MatrixXcd t, MatrixXcd m) {
        if (t.rows() != t.cols() || m.rows() != m.cols() || t.rows() != m.rows())
            throw std::invalid_argument("GeneralPencil: shape mismatch");
        if ((m - m.adjoint()).norm() > 1e-12 * std::max(m.norm(), 1.0))
            throw std::invalid_argument("GeneralPencil: m not Hermitian");
        return {std::move(t), std::move(m)};
    }
};

struct HermEigResult {
    VectorXd eigenvalues;   // ascending
    MatrixXcd eigenvectors; // m-orthonormal columns
};

inline HermEigResult herm_gen_eig(const HermitianPencil& p) {
    // Eigen's generalized solver does not surface a failed mass factorization
    if (Eigen::LLT<MatrixXcd>(p.m).info() != Eigen::Success)
        throw solver_error("herm_gen_eig: mass matrix not positive definite", p.dim(),
                           std::numeric_limits<double>::quiet_NaN());
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> solver(p.s, p.m);
    if (solver.info() != Eigen::Success)
        throw solver_error("herm_gen_eig: eigensolver failed", p.dim(),
                           std::numeric_limits<double>::quiet_NaN());
    return {solver.eigenvalues(), solver.eigenvectors()};
}

struct GeneralEigResult {
    VectorXcd eigenvalues;  // lexicographic by (Re, Im)
    MatrixXcd eigenvectors; // right eigenvectors, unit norm; empty if not requested
};

namespace detail {

inline std::vector<Index> lex_order(const VectorXcd& w) {
    std::vector<Index> order(static_cast<std::size_t>(w.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (w(a).real() != w(b).real()) return w(a).real() < w(b).real();
        return w(a).imag() < w(b).imag();
    });
    return order;
}

}  // namespace detail

// Reduces (t, m) to a standard problem through the Cholesky factor of m.
// Mass matrices here are FEM mass matrices or identities, so the reduction
// is well conditioned.
inline GeneralEigResult general_gen_eig(const GeneralPencil& p, bool with_vectors = true) {
    Eigen::LLT<MatrixXcd> llt(p.m);
    if (llt.info() != Eigen::Success)
        throw solver_error("general_gen_eig: mass matrix not positive definite",
                           p.dim(), std::numeric_limits<double>::quiet_NaN());
    const auto& L = llt.matrixL();
    MatrixXcd b = L.solve(p.t);
    b = L.solve(b.adjoint()).adjoint();
    Eigen::ComplexEigenSolver<MatrixXcd> solver(b, with_vectors);
    if (solver.info() != Eigen::Success) {
        const double cond = p.m.norm();
        throw solver_error("general_gen_eig: eigensolver failed", p.dim(), cond);
    }
    const auto order = detail::lex_order(solver.eigenvalues());
    GeneralEigResult out;
    out.eigenvalues.resize(p.dim());
    if (with_vectors) out.eigenvectors.resize(p.dim(), p.dim());
    for (Index k = 0; k < p.dim(); ++k) {
        out.eigenvalues(k) = solver.eigenvalues()(order[k]);
        if (with_vectors) {
            VectorXcd v = L.adjoint().solve(solver.eigenvectors().col(order[k]));
            out.eigenvectors.col(k) = v / v.norm();
        }
    }
    return out;
}

inline VectorXcd general_gen_eigvals(const GeneralPencil& p) {
    return general_gen_eig(p, false).eigenvalues;
}

inline double smallest_singular_value(const MatrixXcd& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("smallest_singular_value: matrix not square");
    if (a.rows() <= 32) {
        Eigen::JacobiSVD<MatrixXcd> svd(a);
        return svd.singularValues()(a.rows() - 1);
    }
    Eigen::BDCSVD<MatrixXcd> svd(a);
    return svd.singularValues()(a.rows() - 1);
}

struct SubspaceGapResult {
    double delta_uv;  // distance from span(u) to span(v)
    double delta_vu;
    double gap;       // max of the two
};

// Distances and gap between the column spans of u and v in the inner product
// induced by the Hermitian positive-definite weight w.  Computed by mapping
// through the Cholesky factor of w, after which the weighted geometry is
// Euclidean and the distance is a largest singular value.
inline SubspaceGapResult subspace_gap(const MatrixXcd& u, const MatrixXcd& v,
                                      const MatrixXcd& w) {
    if (u.rows() != v.rows() || u.rows() != w.rows() || w.rows() != w.cols())
        throw std::invalid_argument("subspace_gap: shape mismatch");
    Eigen::LLT<MatrixXcd> llt(w);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("subspace_gap: weight not positive definite");
    auto orthonormal = [&](const MatrixXcd& x) {
        MatrixXcd y = llt.matrixU() * x;  // w = U^H U, columns now Euclidean
        Eigen::ColPivHouseholderQR<MatrixXcd> qr(y);
        if (qr.rank() < x.cols())
            throw std::invalid_argument("subspace_gap: rank-deficient basis");
        MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(x.rows(), x.cols());
        return q;
    };
    const MatrixXcd qu = orthonormal(u);
    const MatrixXcd qv = orthonormal(v);
    auto dist = [](const MatrixXcd& from, const MatrixXcd& onto) {
        MatrixXcd residual = from - onto * (onto.adjoint() * from);
        Eigen::JacobiSVD<MatrixXcd> svd(residual);
        return svd.singularValues()(0);
    };
    SubspaceGapResult r{};
    r.delta_uv = dist(qu, qv);
    r.delta_vu = dist(qv, qu);
    r.gap = std::max(r.delta_uv, r.delta_vu);
    return r;
}

}  // namespace specgap
