#pragma once

// 1D piecewise-linear finite elements on uniform meshes: scalar spaces with
// optional Dirichlet ends, element integrals (closed forms for constant
// coefficients, 3-point Gauss otherwise), product spaces with component-major
// block layout, and the interpolation matrix between nested meshes.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

namespace specgap {

using Eigen::MatrixXd;

struct Mesh1D {
    double x_lo;
    double x_hi;
    int elements;

    double h() const { return (x_hi - x_lo) / elements; }
    double node(int j) const { return x_lo + j * h(); }

    void validate() const {
        if (!(x_lo < x_hi) || elements < 1)
            throw std::invalid_argument("Mesh1D: need x_lo < x_hi and elements >= 1");
    }

    bool operator==(const Mesh1D&) const = default;
};

// Hat-function space on a mesh; Dirichlet flags drop the end nodes.
struct ScalarSpace {
    Mesh1D mesh;
    bool dirichlet_lo = false;
    bool dirichlet_hi = false;

    int dim() const {
        return mesh.elements + 1 - (dirichlet_lo ? 1 : 0) - (dirichlet_hi ? 1 : 0);
    }
    int first_node() const { return dirichlet_lo ? 1 : 0; }

    bool operator==(const ScalarSpace&) const = default;
};

using Coefficient = std::function<double(double)>;

enum class MatrixKind { mass, stiffness, first_derivative };

namespace detail {

struct GaussPoint {
    double xi;  // on [-1, 1]
    double w;
};

inline const std::array<GaussPoint, 3>& gauss3() {
    static const std::array<GaussPoint, 3> pts = {
        GaussPoint{-std::sqrt(3.0 / 5.0), 5.0 / 9.0},
        GaussPoint{0.0, 8.0 / 9.0},
        GaussPoint{std::sqrt(3.0 / 5.0), 5.0 / 9.0},
    };
    return pts;
}

}  // namespace detail

// General element-pair block: entry [p, q] = integral of
// coeff * d^{dtrial}(hat_q) * d^{dtest}(hat_p) over the shared mesh, with
// rows restricted to the test space's retained nodes and columns to the
// trial space's.  Both spaces must live on the same mesh.
inline MatrixXd assemble_pair(const ScalarSpace& test, const ScalarSpace& trial,
                              const Coefficient& coeff, int dtest, int dtrial) {
    if (!(test.mesh == trial.mesh))
        throw std::invalid_argument("assemble_pair: spaces on different meshes");
    test.mesh.validate();
    const int n = test.mesh.elements;
    const double h = test.mesh.h();
    MatrixXd full = MatrixXd::Zero(n + 1, n + 1);
    for (int e = 0; e < n; ++e) {
        const double x0 = test.mesh.node(e);
        for (const auto& gp : detail::gauss3()) {
            const double x = x0 + 0.5 * (gp.xi + 1.0) * h;
            const double w = gp.w * 0.5 * h * coeff(x);
            const double s = (x - x0) / h;
            const double val[2] = {1.0 - s, s};
            const double der[2] = {-1.0 / h, 1.0 / h};
            for (int p = 0; p < 2; ++p) {
                const double tp = dtest ? der[p] : val[p];
                for (int q = 0; q < 2; ++q) {
                    const double tq = dtrial ? der[q] : val[q];
                    full(e + p, e + q) += w * tq * tp;
                }
            }
        }
    }
    return full.block(test.first_node(), trial.first_node(), test.dim(), trial.dim());
}

// Closed-form element matrices for constant coefficients.
inline MatrixXd assemble_pair(const ScalarSpace& test, const ScalarSpace& trial,
                              double coeff, int dtest, int dtrial) {
    if (!(test.mesh == trial.mesh))
        throw std::invalid_argument("assemble_pair: spaces on different meshes");
    test.mesh.validate();
    const int n = test.mesh.elements;
    const double h = test.mesh.h();
    double elem[2][2];
    if (dtest == 0 && dtrial == 0) {
        elem[0][0] = elem[1][1] = h / 3.0;
        elem[0][1] = elem[1][0] = h / 6.0;
    } else if (dtest == 1 && dtrial == 1) {
        elem[0][0] = elem[1][1] = 1.0 / h;
        elem[0][1] = elem[1][0] = -1.0 / h;
    } else if (dtrial == 1) {  // trial differentiated: [p][q] = int hat_q' hat_p
        elem[0][0] = elem[1][0] = -0.5;
        elem[0][1] = elem[1][1] = 0.5;
    } else {                   // test differentiated
        elem[0][0] = elem[0][1] = -0.5;
        elem[1][0] = elem[1][1] = 0.5;
    }
    MatrixXd full = MatrixXd::Zero(n + 1, n + 1);
    for (int e = 0; e < n; ++e)
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                full(e + p, e + q) += coeff * elem[p][q];
    return full.block(test.first_node(), trial.first_node(), test.dim(), trial.dim());
}

// Single-space form matrices: mass int(c phi_j phi_i), stiffness
// int(c phi_j' phi_i'), first_derivative int(c phi_j' phi_i).
template <typename Coeff>
inline MatrixXd assemble_scalar_matrices(const ScalarSpace& space, const Coeff& coeff,
                                         MatrixKind kind) {
    switch (kind) {
        case MatrixKind::mass: return assemble_pair(space, space, coeff, 0, 0);
        case MatrixKind::stiffness: return assemble_pair(space, space, coeff, 1, 1);
        case MatrixKind::first_derivative: return assemble_pair(space, space, coeff, 0, 1);
    }
    throw std::invalid_argument("assemble_scalar_matrices: unknown kind");
}

// Ordered list of scalar components sharing one mesh; degrees of freedom are
// laid out component-major.
struct ProductSpace {
    std::vector<ScalarSpace> components;

    int dim() const {
        int d = 0;
        for (const auto& c : components) d += c.dim();
        return d;
    }

    int offset(std::size_t component) const {
        int d = 0;
        for (std::size_t i = 0; i < component; ++i) d += components[i].dim();
        return d;
    }

    void validate() const {
        if (components.empty() || components.size() > 3)
            throw std::invalid_argument("ProductSpace: need 1-3 components");
        for (const auto& c : components) {
            c.mesh.validate();
            if (!(c.mesh == components.front().mesh))
                throw std::invalid_argument("ProductSpace: components on different meshes");
        }
    }
};

// Interpolation matrix from a coarse hat space into a nested fine one:
// row m holds the fine-basis coefficients of the m-th coarse hat (its values
// at the fine nodes; exact since the meshes nest).
inline MatrixXd interpolation_matrix(const ScalarSpace& coarse, const ScalarSpace& fine) {
    coarse.mesh.validate();
    fine.mesh.validate();
    if (coarse.mesh.x_lo != fine.mesh.x_lo || coarse.mesh.x_hi != fine.mesh.x_hi ||
        fine.mesh.elements % coarse.mesh.elements != 0 ||
        coarse.dirichlet_lo != fine.dirichlet_lo || coarse.dirichlet_hi != fine.dirichlet_hi)
        throw std::invalid_argument("interpolation_matrix: meshes not nested");
    const int ratio = fine.mesh.elements / coarse.mesh.elements;
    MatrixXd r = MatrixXd::Zero(coarse.dim(), fine.dim());
    for (int mi = 0; mi < coarse.dim(); ++mi) {
        const int m = mi + coarse.first_node();
        for (int ji = 0; ji < fine.dim(); ++ji) {
            const int j = ji + fine.first_node();
            const int away = std::abs(j - m * ratio);
            if (away < ratio) r(mi, ji) = double(ratio - away) / ratio;
        }
    }
    return r;
}

}  // namespace specgap
