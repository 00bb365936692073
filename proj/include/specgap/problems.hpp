#pragma once

// The model problems: a 2x2 block operator with spectral pollution in
// (1, 2), a magnetohydrodynamics operator with a two-band essential
// spectrum, and two Schrodinger operators with band-gap structure, truncated
// to finite intervals.  Each is exposed as a ProblemSpec: a space builder,
// a form assembler, and the known spectral data used by runs and reports.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "specgap/errors.hpp"
#include "specgap/fem.hpp"
#include "specgap/geometry.hpp"
#include "specgap/linalg.hpp"

namespace specgap {

struct ProblemSpec {
    std::string name;
    double x_lo;
    double x_hi;
    std::function<ProductSpace(int elements)> make_space;
    std::function<HermitianPencil(const ProductSpace&)> assemble;
    std::vector<Interval> essential_bands;      // approximate band intervals
    std::vector<double> reference_eigenvalues;  // known isolated eigenvalues
    Interval default_gap;                       // gap used by perturbation runs
};

// Eigenvalue pair of the block operator's k-th oscillatory branch, from the
// closed form of the characteristic equation.
inline std::pair<double, double> exact_block_eigs(int k) {
    if (k < 1) throw std::invalid_argument("exact_block_eigs: need k >= 1");
    const double pi = std::numbers::pi;
    const double w = k * k * pi * pi;
    const double root = std::sqrt((w + 2.0) * (w + 2.0) - 4.0 * w);
    return {(2.0 + w - root) / 2.0, (2.0 + w + root) / 2.0};
}

namespace detail {

inline void place_block(MatrixXcd& target, const ProductSpace& space, std::size_t row_comp,
                        std::size_t col_comp, const MatrixXd& block,
                        std::complex<double> factor) {
    target.block(space.offset(row_comp), space.offset(col_comp), block.rows(),
                 block.cols()) += factor * block;
}

inline MatrixXcd blockdiag_mass(const ProductSpace& space) {
    MatrixXcd m = MatrixXcd::Zero(space.dim(), space.dim());
    for (std::size_t c = 0; c < space.components.size(); ++c) {
        MatrixXd mc = assemble_pair(space.components[c], space.components[c], 1.0, 0, 0);
        place_block(m, space, c, c, mc, 1.0);
    }
    return m;
}

inline void check_hermitian(const MatrixXcd& s, const char* what) {
    if ((s - s.adjoint()).norm() > 1e-10 * std::max(s.norm(), 1.0))
        throw assembly_error(std::string(what) + ": assembled form not Hermitian");
}

}  // namespace detail

// Block operator [[-d^2/dx^2, -d/dx], [d/dx, 2]] on (0,1), first component
// Dirichlet.  Weak form after moving the off-diagonal derivative onto the
// Dirichlet test component (boundary terms vanish there):
//   a(u,v) = int u1' v1' + int u2 v1' + int u1' v2 + 2 int u2 v2.
// The constant vector (0, 1) is an exact discrete eigenvector with
// eigenvalue 2 on every mesh.
inline HermitianPencil assemble_block_operator(const ProductSpace& space) {
    space.validate();
    if (space.components.size() != 2 || space.components[0].mesh.elements < 2)
        throw std::invalid_argument("assemble_block_operator: need 2 components, n >= 2");
    const ScalarSpace& c0 = space.components[0];
    const ScalarSpace& c1 = space.components[1];
    MatrixXcd s = MatrixXcd::Zero(space.dim(), space.dim());
    detail::place_block(s, space, 0, 0, assemble_pair(c0, c0, 1.0, 1, 1), 1.0);
    MatrixXd cross = assemble_pair(c0, c1, 1.0, 1, 0);  // int hat_q hat_p'
    detail::place_block(s, space, 0, 1, cross, 1.0);
    detail::place_block(s, space, 1, 0, cross.transpose(), 1.0);
    detail::place_block(s, space, 1, 1, assemble_pair(c1, c1, 1.0, 0, 0), 2.0);
    detail::check_hermitian(s, "assemble_block_operator");
    return HermitianPencil::make(std::move(s), detail::blockdiag_mass(space));
}

// Magnetohydrodynamics operator on (0,1) with wave numbers k_perp = k_par = 1
// and sound/Alfven profiles vs^2 = 1/8 + x/2, va^2 = 7/8 - x/2 (so their sum
// is identically 1).  The off-diagonal first-order couplings are composition
// operators d/dx (coeff * .); that placement is the one making the strong
// operator formally self-adjoint, and the assembled matrix is checked to be
// Hermitian.  Weak form on L0 x L x L (only component 1 Dirichlet):
//   row 1:  int u1' v1' + int (7/4 - x) u1 v1
//           + i int u2 v1' + i int u2 v1 + i int vs^2 u3 v1' + i int u3 v1
//   row 2:  conjugate couplings, + int (15/8 - x/2) u2 v2 + int vs^2 u3 v2
//   row 3:  conjugate couplings, + int vs^2 u2 v3 + int vs^2 u3 v3.
inline HermitianPencil assemble_mhd(const ProductSpace& space) {
    space.validate();
    if (space.components.size() != 3)
        throw std::invalid_argument("assemble_mhd: need 3 components");
    const ScalarSpace& c0 = space.components[0];
    const ScalarSpace& c1 = space.components[1];
    const std::complex<double> i1(0.0, 1.0);
    Coefficient vs2 = [](double x) { return 0.125 + 0.5 * x; };
    Coefficient k2va2 = [](double x) { return 1.75 - x; };         // k^2 va^2
    Coefficient diag2 = [](double x) { return 1.875 - 0.5 * x; };  // k^2 va^2 + vs^2

    MatrixXcd s = MatrixXcd::Zero(space.dim(), space.dim());
    detail::place_block(s, space, 0, 0, assemble_pair(c0, c0, 1.0, 1, 1), 1.0);
    detail::place_block(s, space, 0, 0, assemble_pair(c0, c0, k2va2, 0, 0), 1.0);

    MatrixXd t12 = assemble_pair(c0, c1, 1.0, 1, 0) + assemble_pair(c0, c1, 1.0, 0, 0);
    detail::place_block(s, space, 0, 1, t12, i1);
    detail::place_block(s, space, 1, 0, t12.transpose(), -i1);

    MatrixXd t13 = assemble_pair(c0, c1, vs2, 1, 0) + assemble_pair(c0, c1, 1.0, 0, 0);
    detail::place_block(s, space, 0, 2, t13, i1);
    detail::place_block(s, space, 2, 0, t13.transpose(), -i1);

    detail::place_block(s, space, 1, 1, assemble_pair(c1, c1, diag2, 0, 0), 1.0);
    MatrixXd m23 = assemble_pair(c1, c1, vs2, 0, 0);
    detail::place_block(s, space, 1, 2, m23, 1.0);
    detail::place_block(s, space, 2, 1, m23.transpose(), 1.0);
    detail::place_block(s, space, 2, 2, m23, 1.0);

    detail::check_hermitian(s, "assemble_mhd");
    return HermitianPencil::make(std::move(s), detail::blockdiag_mass(space));
}

// Schrodinger form -u'' + V u on a truncated interval with Dirichlet ends.
inline HermitianPencil assemble_schrodinger(const ProductSpace& space,
                                            const Coefficient& potential) {
    space.validate();
    if (space.components.size() != 1)
        throw std::invalid_argument("assemble_schrodinger: need 1 component");
    const ScalarSpace& c = space.components[0];
    if (!c.dirichlet_lo || !c.dirichlet_hi)
        throw std::invalid_argument("assemble_schrodinger: Dirichlet at both ends required");
    MatrixXcd s = (assemble_pair(c, c, 1.0, 1, 1) + assemble_pair(c, c, potential, 0, 0))
                      .cast<std::complex<double>>();
    return HermitianPencil::make(std::move(s), detail::blockdiag_mass(space));
}

namespace detail {

inline ProductSpace unit_interval_space(int n, std::vector<std::pair<bool, bool>> flags) {
    Mesh1D mesh{0.0, 1.0, n};
    ProductSpace space;
    for (auto [lo, hi] : flags) space.components.push_back({mesh, lo, hi});
    return space;
}

}  // namespace detail

// Registered problems: "block", "mhd", "schrodinger-line",
// "schrodinger-halfline".  Mesh sizes are expressed in elements over the
// listed interval; perturbation runs double them per refinement level.
inline const ProblemSpec& problem_registry(const std::string& name) {
    static const std::vector<ProblemSpec> registry = [] {
        std::vector<ProblemSpec> v;

        ProblemSpec block;
        block.name = "block";
        block.x_lo = 0.0;
        block.x_hi = 1.0;
        block.make_space = [](int n) {
            return detail::unit_interval_space(n, {{true, true}, {false, false}});
        };
        block.assemble = [](const ProductSpace& s) { return assemble_block_operator(s); };
        block.essential_bands = {{1.0, 1.0}};
        block.reference_eigenvalues = {2.0, exact_block_eigs(1).second};
        block.default_gap = {1.0, exact_block_eigs(1).second};
        v.push_back(std::move(block));

        ProblemSpec mhd;
        mhd.name = "mhd";
        mhd.x_lo = 0.0;
        mhd.x_hi = 1.0;
        mhd.make_space = [](int n) {
            return detail::unit_interval_space(
                n, {{true, true}, {false, false}, {false, false}});
        };
        mhd.assemble = [](const ProductSpace& s) { return assemble_mhd(s); };
        mhd.essential_bands = {{7.0 / 64.0, 0.25}, {0.375, 0.875}};
        mhd.reference_eigenvalues = {0.279};
        mhd.default_gap = {0.25, 0.375};
        v.push_back(std::move(mhd));

        ProblemSpec line;
        line.name = "schrodinger-line";
        line.x_lo = -40.0;
        line.x_hi = 40.0;
        line.make_space = [](int n) {
            Mesh1D mesh{-40.0, 40.0, n};
            return ProductSpace{{ScalarSpace{mesh, true, true}}};
        };
        line.assemble = [](const ProductSpace& s) {
            return assemble_schrodinger(
                s, [](double x) { return std::cos(x) - std::exp(-x * x); });
        };
        line.essential_bands = {{-0.37849, -0.34767}, {0.5948, 0.918058}, {1.29317, 2.28516}};
        line.reference_eigenvalues = {-0.40961, 0.37763, 1.18216};
        line.default_gap = {-0.34, 0.59};
        v.push_back(std::move(line));

        ProblemSpec half;
        half.name = "schrodinger-halfline";
        half.x_lo = 0.0;
        half.x_hi = 60.0;
        half.make_space = [](int n) {
            Mesh1D mesh{0.0, 60.0, n};
            return ProductSpace{{ScalarSpace{mesh, true, true}}};
        };
        half.assemble = [](const ProductSpace& s) {
            return assemble_schrodinger(
                s, [](double x) { return std::sin(x) - 40.0 / (1.0 + x * x); });
        };
        half.essential_bands = {{-0.37849, -0.34767}, {0.5948, 0.918058}, {1.29317, 2.28516}};
        half.reference_eigenvalues = {};
        half.default_gap = {-0.34, 0.59};
        v.push_back(std::move(half));

        return v;
    }();
    for (const auto& p : registry)
        if (p.name == name) return p;
    throw std::invalid_argument("problem_registry: unknown problem '" + name + "'");
}

// Elements needed so the mesh size over the problem's interval equals h.
inline int elements_for_mesh_size(const ProblemSpec& problem, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("elements_for_mesh_size: h <= 0");
    const double n = (problem.x_hi - problem.x_lo) / h;
    const int rounded = static_cast<int>(std::lround(n));
    if (rounded < 1 || std::abs(n - rounded) > 1e-9 * n)
        throw std::invalid_argument("elements_for_mesh_size: interval not divisible by h");
    return rounded;
}

}  // namespace specgap
