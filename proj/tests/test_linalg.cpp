#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "specgap/linalg.hpp"

using namespace specgap;
using Catch::Matchers::WithinAbs;

namespace {

MatrixXcd random_complex(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex{g(rng), g(rng)};
    return m;
}

MatrixXcd random_hermitian(int n, std::uint64_t seed) {
    const MatrixXcd g = random_complex(n, n, seed);
    return 0.5 * (g + g.adjoint());
}

// Characteristic-polynomial root finder: evaluates det(x I - A) through LU
// (a path disjoint from the eigensolver) and bisects the sign changes.
std::vector<double> charpoly_roots(const MatrixXcd& a) {
    const int n = static_cast<int>(a.rows());
    auto p = [&](double x) {
        const MatrixXcd m = x * MatrixXcd::Identity(n, n) - a;
        return m.fullPivLu().determinant().real();
    };
    double radius = 0.0;  // Gershgorin bound
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j)
            row += i == j ? std::abs(a(i, i).real()) : std::abs(a(i, j));
        radius = std::max(radius, row);
    }
    const double lo = -radius - 1.0, hi = radius + 1.0;
    constexpr int grid = 4000;
    std::vector<double> roots;
    double prev_x = lo, prev_p = p(lo);
    for (int i = 1; i <= grid; ++i) {
        const double x = lo + (hi - lo) * i / grid;
        const double px = p(x);
        if (prev_p == 0.0) roots.push_back(prev_x);
        else if (px != 0.0 && std::signbit(px) != std::signbit(prev_p)) {
            double a0 = prev_x, b0 = x;
            for (int it = 0; it < 200 && b0 - a0 > 1e-13; ++it) {
                const double mid = 0.5 * (a0 + b0);
                const double pm = p(mid);
                if (pm == 0.0) { a0 = b0 = mid; break; }
                if (std::signbit(pm) == std::signbit(prev_p)) a0 = mid;
                else b0 = mid;
            }
            roots.push_back(0.5 * (a0 + b0));
        }
        prev_x = x;
        prev_p = px;
    }
    return roots;
}

}  // namespace

TEST_CASE("herm_gen_eig on diagonal pencils") {
    MatrixXcd s = MatrixXcd::Zero(2, 2);
    s(0, 0) = 1.0; s(1, 1) = 2.0;
    const auto r1 = herm_gen_eig(HermitianPencil::make(s, MatrixXcd::Identity(2, 2)));
    CHECK_THAT(r1.eigenvalues(0), WithinAbs(1.0, 1e-14));
    CHECK_THAT(r1.eigenvalues(1), WithinAbs(2.0, 1e-14));

    MatrixXcd s2 = MatrixXcd::Zero(2, 2);
    s2(0, 0) = 2.0; s2(1, 1) = 1.0;
    const auto r2 = herm_gen_eig(HermitianPencil::make(s2, s2));
    CHECK_THAT(r2.eigenvalues(0), WithinAbs(1.0, 1e-14));
    CHECK_THAT(r2.eigenvalues(1), WithinAbs(1.0, 1e-14));
}

TEST_CASE("herm_gen_eig matches the charpoly oracle and honors its contract") {
    const MatrixXcd s = random_hermitian(6, 42);
    const MatrixXcd m = MatrixXcd::Identity(6, 6);
    const auto r = herm_gen_eig(HermitianPencil::make(s, m));
    const auto oracle = charpoly_roots(s);
    REQUIRE(oracle.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK_THAT(r.eigenvalues(i), WithinAbs(oracle[i], 1e-8));

    const double ns = s.norm(), nm = m.norm();
    for (int i = 0; i < 6; ++i) {
        REQUIRE((i == 0 || r.eigenvalues(i) >= r.eigenvalues(i - 1)));
        const VectorXcd v = r.eigenvectors.col(i);
        CHECK_THAT(std::abs((v.adjoint() * m * v)(0, 0).real() - 1.0), WithinAbs(0.0, 1e-12));
        const double res = (s * v - r.eigenvalues(i) * (m * v)).norm();
        CHECK(res <= 1e-10 * (ns + std::abs(r.eigenvalues(i)) * nm) * v.norm());
    }
}

TEST_CASE("herm_gen_eig rejects an indefinite mass") {
    MatrixXcd m = MatrixXcd::Identity(3, 3);
    m(2, 2) = -1.0;
    CHECK_THROWS_AS(herm_gen_eig(HermitianPencil{MatrixXcd::Identity(3, 3), m}),
                    solver_error);
}

TEST_CASE("herm_gen_eig eigenvalues are congruence invariant") {
    const MatrixXcd s = random_hermitian(5, 7);
    MatrixXcd m = random_hermitian(5, 8);
    m = m * m.adjoint() + 5.0 * MatrixXcd::Identity(5, 5);
    const auto base = herm_gen_eig(HermitianPencil::make(s, m));
    MatrixXcd c = random_complex(5, 5, 9);
    c += 4.0 * MatrixXcd::Identity(5, 5);  // keep it well conditioned
    const MatrixXcd s2 = c.adjoint() * s * c;
    const MatrixXcd m2 = c.adjoint() * m * c;
    const auto tr = herm_gen_eig(HermitianPencil::make(0.5 * (s2 + s2.adjoint()),
                                                       0.5 * (m2 + m2.adjoint())));
    for (int i = 0; i < 5; ++i)
        CHECK_THAT(tr.eigenvalues(i), WithinAbs(base.eigenvalues(i), 1e-10));
}

TEST_CASE("general_gen_eig on simple pencils") {
    MatrixXcd t = MatrixXcd::Zero(2, 2);
    t(0, 0) = Complex(1.0, 1.0); t(1, 1) = 2.0;
    const auto r = general_gen_eig(GeneralPencil::make(t, MatrixXcd::Identity(2, 2)));
    CHECK_THAT(std::abs(r.eigenvalues(0) - Complex(1.0, 1.0)), WithinAbs(0.0, 1e-14));
    CHECK_THAT(std::abs(r.eigenvalues(1) - Complex(2.0, 0.0)), WithinAbs(0.0, 1e-14));

    MatrixXcd jordan(2, 2);
    jordan << 1.0, 1.0, 0.0, 1.0;
    const auto rj = general_gen_eig(GeneralPencil::make(jordan, MatrixXcd::Identity(2, 2)));
    REQUIRE(rj.eigenvalues.size() == 2);  // defective pair reported twice
    CHECK_THAT(std::abs(rj.eigenvalues(0) - 1.0), WithinAbs(0.0, 1e-7));
    CHECK_THAT(std::abs(rj.eigenvalues(1) - 1.0), WithinAbs(0.0, 1e-7));
}

TEST_CASE("general_gen_eig matches the explicit-inverse oracle") {
    const MatrixXcd t = random_complex(5, 5, 21);
    MatrixXcd m = random_hermitian(5, 22);
    m = m * m.adjoint() + 3.0 * MatrixXcd::Identity(5, 5);
    const auto r = general_gen_eig(GeneralPencil::make(t, m));

    Eigen::ComplexEigenSolver<MatrixXcd> oracle(m.inverse() * t);
    auto sorted = oracle.eigenvalues();
    std::sort(sorted.data(), sorted.data() + sorted.size(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    for (int i = 0; i < 5; ++i)
        CHECK_THAT(std::abs(r.eigenvalues(i) - sorted(i)), WithinAbs(0.0, 1e-8));

    const double nt = t.norm(), nm = m.norm();
    for (int i = 0; i < 5; ++i) {
        const VectorXcd v = r.eigenvectors.col(i);
        const double res = (t * v - r.eigenvalues(i) * (m * v)).norm();
        CHECK(res <= 1e-10 * (nt + std::abs(r.eigenvalues(i)) * nm) * v.norm());
    }
}

TEST_CASE("general_gen_eig reproduces the Hermitian solver on Hermitian pencils") {
    const MatrixXcd s = random_hermitian(6, 31);
    MatrixXcd m = random_hermitian(6, 32);
    m = m * m.adjoint() + 4.0 * MatrixXcd::Identity(6, 6);
    const auto hres = herm_gen_eig(HermitianPencil::make(s, m));
    const auto gres = general_gen_eig(GeneralPencil::make(s, m), false);
    for (int i = 0; i < 6; ++i)
        CHECK_THAT(std::abs(gres.eigenvalues(i) - hres.eigenvalues(i)), WithinAbs(0.0, 1e-8));
}

TEST_CASE("smallest singular value") {
    CHECK_THAT(smallest_singular_value(MatrixXcd::Identity(3, 3)), WithinAbs(1.0, 1e-14));
    MatrixXcd d = MatrixXcd::Zero(2, 2);
    d(0, 0) = 2.0; d(1, 1) = 0.5;
    CHECK_THAT(smallest_singular_value(d), WithinAbs(0.5, 1e-14));

    const MatrixXcd a = random_complex(4, 4, 17);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> gram(a.adjoint() * a);
    const double oracle = std::sqrt(std::max(0.0, gram.eigenvalues()(0)));
    CHECK_THAT(smallest_singular_value(a), WithinAbs(oracle, 1e-10));

    // consistency with the inverse norm
    const MatrixXcd inv = a.inverse();
    Eigen::JacobiSVD<MatrixXcd> svd(inv);
    CHECK_THAT(smallest_singular_value(a) * svd.singularValues()(0), WithinAbs(1.0, 1e-8));
}

TEST_CASE("subspace gap") {
    const MatrixXcd eye = MatrixXcd::Identity(3, 3);
    MatrixXcd u(3, 1), v(3, 1);
    u.setZero(); u(0, 0) = 1.0;
    CHECK_THAT(subspace_gap(u, u, eye).gap, WithinAbs(0.0, 1e-14));

    v.setZero(); v(1, 0) = 1.0;
    CHECK_THAT(subspace_gap(u, v, eye).gap, WithinAbs(1.0, 1e-14));

    v(0, 0) = 1.0 / std::sqrt(2.0);
    v(1, 0) = 1.0 / std::sqrt(2.0);
    const auto r = subspace_gap(u, v, eye);
    CHECK_THAT(r.delta_uv, WithinAbs(std::sqrt(2.0) / 2.0, 1e-12));

    MatrixXcd rank_def(3, 2);
    rank_def.setZero();
    rank_def(0, 0) = 1.0; rank_def(0, 1) = 2.0;
    CHECK_THROWS_AS(subspace_gap(rank_def, u, eye), std::invalid_argument);
}

TEST_CASE("subspace gap is symmetric and bounded") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 20; ++rep) {
        const MatrixXcd u = random_complex(6, 2, 100 + rep);
        const MatrixXcd v = random_complex(6, 3, 200 + rep);
        MatrixXcd w = random_hermitian(6, 300 + rep);
        w = w * w.adjoint() + 2.0 * MatrixXcd::Identity(6, 6);
        const auto ab = subspace_gap(u, v, w);
        const auto ba = subspace_gap(v, u, w);
        CHECK_THAT(ab.gap, WithinAbs(ba.gap, 1e-10));
        CHECK(ab.gap >= 0.0);
        CHECK(ab.gap <= 1.0 + 1e-12);
    }
}
