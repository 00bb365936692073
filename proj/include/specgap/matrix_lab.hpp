#pragma once

// Matrix-scale verification lab: random Hermitian matrices with prescribed
// spectra, Monte Carlo checks of the spectral enclosure, the sharpness
// family for two-point spectra, resolvent-bound audits, and the
// projection-perturbation statements (exact lift, superconvergence probe).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "specgap/geometry.hpp"
#include "specgap/linalg.hpp"

namespace specgap {

namespace detail {

inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

}  // namespace detail

// Haar-distributed unitary: QR of a complex Gaussian matrix with the phase
// convention that makes R's diagonal positive.
inline MatrixXcd haar_unitary(int n, std::uint64_t seed, std::uint64_t stream = 0) {
    auto rng = detail::seeded_rng(seed, stream);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<MatrixXcd> qr(g);
    MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(n, n);
    MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const std::complex<double> d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

struct PrescribedMatrix {
    MatrixXcd matrix;
    SpectrumModel spectrum;
    std::uint64_t seed;
};

inline PrescribedMatrix random_hermitian_with_spectrum(const SpectrumModel& spec,
                                                       std::uint64_t seed,
                                                       std::uint64_t stream = 0) {
    const int n = spec.total_multiplicity();
    VectorXd diag(n);
    int k = 0;
    for (std::size_t i = 0; i < spec.values().size(); ++i)
        for (int m = 0; m < spec.multiplicities()[i]; ++m) diag(k++) = spec.values()[i];
    const MatrixXcd q = haar_unitary(n, seed, stream);
    MatrixXcd a = q * diag.asDiagonal() * q.adjoint();
    a = 0.5 * (a + MatrixXcd(a.adjoint()));
    return {std::move(a), spec, seed};
}

struct EnclosureReport {
    int trials = 0;
    int violations = 0;
    double worst_margin = 0.0;  // deepest excursion outside the enclosure
};

struct EnclosurePoint {
    int trial;
    Complex z;
    bool inside;
};

namespace detail {

// How far z sits outside the two-sided enclosure: rectangle excess plus, if
// z lies inside some gap's spectrum-free region, its distance to the
// bounding curves.
inline double enclosure_violation_depth(const SpectrumModel& spec, double lo, double hi,
                                        Complex z, bool swap_axes, double tol) {
    const Complex w = swap_axes ? Complex(z.imag(), z.real()) : z;
    double depth = 0.0;
    depth = std::max(depth, spec.min() - tol - w.real());
    depth = std::max(depth, w.real() - spec.max() - tol);
    depth = std::max(depth, lo - tol - w.imag());
    depth = std::max(depth, w.imag() - hi - tol);
    for (const Interval& gap : spec.gaps()) {
        RegionParams p{gap.lo, gap.hi, lo, hi};
        if (region_contains(p, w)) {
            const double d = curve_distance(p, w);
            if (d > tol) depth = std::max(depth, d);
        }
    }
    return depth;
}

}  // namespace detail

// Monte Carlo check of the two-sided enclosure: every eigenvalue of A+iB
// must pass both the horizontal (from the spectrum of A) and vertical (from
// the spectrum of B) membership tests. Violations are data, not errors.
inline EnclosureReport enclosure_trial(const SpectrumModel& spec_a,
                                       const SpectrumModel& spec_b, int trials,
                                       std::uint64_t seed, double tol = 1e-8,
                                       std::vector<EnclosurePoint>* points = nullptr) {
    if (spec_a.values().size() < 2 || spec_b.values().size() < 2)
        throw std::invalid_argument("enclosure_trial: need >= 2 distinct points per spectrum");
    EnclosureReport report;
    report.trials = trials;
    const int n = spec_a.total_multiplicity();
    if (spec_b.total_multiplicity() != n)
        throw std::invalid_argument("enclosure_trial: dimension mismatch");
    for (int t = 0; t < trials; ++t) {
        const auto a = random_hermitian_with_spectrum(spec_a, seed, 2 * t);
        const auto b = random_hermitian_with_spectrum(spec_b, seed, 2 * t + 1);
        Eigen::ComplexEigenSolver<MatrixXcd> es(a.matrix + Complex(0, 1) * b.matrix, false);
        bool violated = false;
        for (Index k = 0; k < n; ++k) {
            const Complex z = es.eigenvalues()(k);
            const bool in_h =
                horizontal_enclosure_contains(spec_a, spec_b.min(), spec_b.max(), z, tol);
            const bool in_v =
                vertical_enclosure_contains(spec_b, spec_a.min(), spec_a.max(), z, tol);
            const bool inside = in_h && in_v;
            if (points) points->push_back({t, z, inside});
            if (!inside) {
                violated = true;
                const double dh = detail::enclosure_violation_depth(
                    spec_a, spec_b.min(), spec_b.max(), z, false, tol);
                const double dv = detail::enclosure_violation_depth(
                    spec_b, spec_a.min(), spec_a.max(), z, true, tol);
                report.worst_margin = std::max(report.worst_margin, std::max(dh, dv));
            }
        }
        if (violated) ++report.violations;
    }
    return report;
}

// Rank-2 self-adjoint family attaining every point of the boundary curves
// for two-point spectra: at t=0 it pairs lo with the first vector, at t=1
// the pairing is swapped, and the spectrum of A+iB(t) sweeps the curves.
inline MatrixXcd boundary_family(const VectorXcd& u, const VectorXcd& v, double b_lo,
                                 double b_hi, double t) {
    if (u.size() != v.size())
        throw std::invalid_argument("boundary_family: size mismatch");
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("boundary_family: t outside [0,1]");
    const double tol = 1e-10;
    if (std::abs(u.norm() - 1.0) > tol || std::abs(v.norm() - 1.0) > tol ||
        std::abs(u.dot(v)) > tol)
        throw std::invalid_argument("boundary_family: vectors not orthonormal");
    const VectorXcd w1 = std::sqrt(1.0 - t) * u + std::sqrt(t) * v;
    const VectorXcd w2 = std::sqrt(t) * u - std::sqrt(1.0 - t) * v;
    return b_lo * w1 * w1.adjoint() + b_hi * w2 * w2.adjoint();
}

struct ResolventAuditReport {
    int admissible = 0;   // sampled points inside the spectrum-free region
    int violations = 0;
    double worst_excess = 0.0;  // resolvent norm minus bound, at the worst point
};

// Samples z in the bounding rectangle of the gap's spectrum-free region
// until z_samples admissible (in-region) points have been checked against
// the quartic resolvent bound.
inline ResolventAuditReport resolvent_bound_audit(const PrescribedMatrix& a, Interval gap,
                                                  const PrescribedMatrix& b, int z_samples,
                                                  std::uint64_t seed,
                                                  std::uint64_t stream = 0) {
    const double b_lo = b.spectrum.min(), b_hi = b.spectrum.max();
    if (!(b_lo < b_hi))
        throw std::invalid_argument("resolvent_bound_audit: skew spectrum degenerate");
    for (double lam : a.spectrum.values())
        if (gap.lo < lam && lam < gap.hi)
            throw std::invalid_argument("resolvent_bound_audit: interval is not a gap");
    const double skew_norm = std::max(std::abs(b_lo), std::abs(b_hi));
    const EnclosureConstants c = region_constants(gap.lo, gap.hi, skew_norm);
    const RegionParams p{gap.lo, gap.hi, b_lo, b_hi};
    const MatrixXcd t = a.matrix + Complex(0, 1) * b.matrix;
    const int n = static_cast<int>(t.rows());

    auto rng = detail::seeded_rng(seed, stream + 0x517);
    std::uniform_real_distribution<double> ux(gap.lo, gap.hi), uy(b_lo, b_hi);
    ResolventAuditReport report;
    for (long k = 0; k < 1000L * z_samples && report.admissible < z_samples; ++k) {
        const Complex z(ux(rng), uy(rng));
        if (!region_contains(p, z)) continue;
        ++report.admissible;
        const double smin =
            smallest_singular_value(t - z * MatrixXcd::Identity(n, n));
        const double dist = curve_distance(p, z);
        const double bound = c.quartic / std::pow(dist, 4.0);
        if (smin <= 0.0 || 1.0 / smin > bound + 1e-6) {
            ++report.violations;
            report.worst_excess =
                std::max(report.worst_excess, 1.0 / smin - bound);
        }
    }
    return report;
}

// Counts eigenvalues of A+iB between the right curve of the first gap and
// the left curve of the second (both gaps must be wider than the skew
// spectrum's spread, so the curves are graphs over the imaginary axis).
// The count equals the spectral multiplicity of A on [gap1.hi, gap2.lo].
inline int two_gap_dimension_count(const PrescribedMatrix& a, const PrescribedMatrix& b,
                                   Interval gap1, Interval gap2, double tol = 1e-9) {
    const double b_lo = b.spectrum.min(), b_hi = b.spectrum.max();
    if (!(gap1.lo < gap1.hi && gap1.hi <= gap2.lo && gap2.lo < gap2.hi))
        throw std::invalid_argument("two_gap_dimension_count: intervals out of order");
    if (!(std::min(gap1.width(), gap2.width()) > b_hi - b_lo))
        throw std::invalid_argument("two_gap_dimension_count: gaps not wider than skew spread");
    for (double lam : a.spectrum.values())
        if ((gap1.lo < lam && lam < gap1.hi) || (gap2.lo < lam && lam < gap2.hi))
            throw std::invalid_argument("two_gap_dimension_count: intervals are not gaps");
    const RegionParams p1{gap1.lo, gap1.hi, b_lo, b_hi};
    const RegionParams p2{gap2.lo, gap2.hi, b_lo, b_hi};
    Eigen::ComplexEigenSolver<MatrixXcd> es(a.matrix + Complex(0, 1) * b.matrix, false);
    int count = 0;
    for (Index k = 0; k < es.eigenvalues().size(); ++k) {
        const Complex z = es.eigenvalues()(k);
        if (z.imag() < b_lo - tol || z.imag() > b_hi + tol) continue;
        const double s =
            std::clamp((z.imag() - b_lo) / (b_hi - b_lo), 0.0, 1.0);
        const double right_of_gap1 = curve_point(p1, s, Branch::upper).real();
        const double left_of_gap2 = curve_point(p2, s, Branch::lower).real();
        if (z.real() >= right_of_gap1 - tol && z.real() <= left_of_gap2 + tol) ++count;
    }
    return count;
}

// Hermitian matrix, an orthogonal projection, and the spectral projector of
// the matrix onto a closed interval.
struct ProjectionSetup {
    MatrixXcd a_matrix;
    MatrixXcd p_matrix;
    Interval delta;
    MatrixXcd e_delta;
    std::vector<double> delta_eigenvalues;  // distinct, ascending
    std::vector<int> delta_multiplicities;

    // largest singular value of (I - P) E
    double coupling_defect() const {
        const int n = static_cast<int>(a_matrix.rows());
        const MatrixXcd r = (MatrixXcd::Identity(n, n) - p_matrix) * e_delta;
        Eigen::JacobiSVD<MatrixXcd> svd(r);
        return svd.singularValues()(0);
    }

    static ProjectionSetup make(MatrixXcd a, MatrixXcd p, Interval delta) {
        const int n = static_cast<int>(a.rows());
        if (p.rows() != n || p.cols() != n || a.cols() != n)
            throw std::invalid_argument("ProjectionSetup: shape mismatch");
        if ((p * p - p).norm() > 1e-12 * std::max(1.0, p.norm()) ||
            (p - p.adjoint()).norm() > 1e-12 * std::max(1.0, p.norm()))
            throw std::invalid_argument("ProjectionSetup: p not an orthogonal projection");
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a);
        MatrixXcd e = MatrixXcd::Zero(n, n);
        std::vector<double> vals;
        std::vector<int> mults;
        for (int k = 0; k < n; ++k) {
            const double lam = es.eigenvalues()(k);
            if (!delta.contains_closed(lam)) continue;
            e += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
            if (!vals.empty() && lam - vals.back() < 1e-9) {
                ++mults.back();
            } else {
                vals.push_back(lam);
                mults.push_back(1);
            }
        }
        return {std::move(a), std::move(p), delta, std::move(e), std::move(vals),
                std::move(mults)};
    }
};

enum class CheckStatus { passed, failed, skipped };

struct CheckResult {
    CheckStatus status;
    double margin = 0.0;  // slack in the verified inequality (negative when failed)
};

// Checks the shifted-resolvent bound at an admissible z: within the
// spectrum-free region and with the distance function exceeding three times
// the coupling defect, the smallest singular value of A+iP-z must stay above
// the difference.  An inadmissible z yields a skipped check.
inline CheckResult projection_resolvent_audit(const ProjectionSetup& setup,
                                              const GapContext& ctx, Complex z) {
    const double eps = setup.coupling_defect();
    if (!region_contains(ctx.region(), z)) return {CheckStatus::skipped, 0.0};
    const double d = resolvent_lower_bound(ctx, z);
    if (!(d > 3.0 * eps)) return {CheckStatus::skipped, 0.0};
    const int n = static_cast<int>(setup.a_matrix.rows());
    const double smin = smallest_singular_value(
        setup.a_matrix + Complex(0, 1) * setup.p_matrix - z * MatrixXcd::Identity(n, n));
    const double margin = smin - (d - 3.0 * eps) + 1e-8;
    return {margin >= 0.0 ? CheckStatus::passed : CheckStatus::failed, margin};
}

// With the projection fully covering the spectral subspace of the interval,
// every interval eigenvalue lifts exactly by i, with matching geometric
// multiplicity, and no other spectrum enters the spectrum-free region away
// from the bounding curves.
inline CheckResult exact_lift_check(const ProjectionSetup& setup) {
    if (setup.coupling_defect() > 1e-12)
        throw std::invalid_argument("exact_lift_check: (I-P)E not negligible");
    const int n = static_cast<int>(setup.a_matrix.rows());
    const MatrixXcd t =
        setup.a_matrix + Complex(0, 1) * setup.p_matrix;
    const auto eig = general_gen_eig(GeneralPencil::make(t, MatrixXcd::Identity(n, n)));
    const GapContext ctx =
        GapContext::make(setup.delta.lo, setup.delta.hi, setup.delta_eigenvalues);

    double worst = 0.0;
    for (std::size_t j = 0; j < setup.delta_eigenvalues.size(); ++j) {
        const Complex target(setup.delta_eigenvalues[j], 1.0);
        std::vector<Index> close;
        for (Index k = 0; k < eig.eigenvalues.size(); ++k)
            if (std::abs(eig.eigenvalues(k) - target) <= 1e-10) close.push_back(k);
        if (close.empty()) return {CheckStatus::failed, -1.0};
        MatrixXcd vecs(n, static_cast<Index>(close.size()));
        for (std::size_t c = 0; c < close.size(); ++c)
            vecs.col(static_cast<Index>(c)) = eig.eigenvectors.col(close[c]);
        Eigen::JacobiSVD<MatrixXcd> svd(vecs);
        int rank = 0;
        for (Index s = 0; s < svd.singularValues().size(); ++s)
            if (svd.singularValues()(s) > 1e-8) ++rank;
        if (rank != setup.delta_multiplicities[j]) return {CheckStatus::failed, -2.0};
    }
    // no stray spectrum inside the region
    for (Index k = 0; k < eig.eigenvalues.size(); ++k) {
        const Complex z = eig.eigenvalues(k);
        if (!region_contains(ctx.region(), z)) continue;
        double dist_to_lifted = std::numeric_limits<double>::infinity();
        for (double lam : setup.delta_eigenvalues)
            dist_to_lifted = std::min(dist_to_lifted, std::abs(z - Complex(lam, 1.0)));
        if (dist_to_lifted > 1e-8 && curve_distance(ctx.region(), z) > 1e-6)
            return {CheckStatus::failed, -dist_to_lifted};
        worst = std::max(worst, std::min(dist_to_lifted, 1e-8));
    }
    return {CheckStatus::passed, worst};
}

struct ProbeStep {
    double eps;          // known coupling defect sin(theta_n)
    double eig_error;    // max |mu - (lambda + i)| over the in-disc cluster
    double subspace_gap; // form-weighted gap between exact and perturbed eigenspaces
    int disc_count;      // eigenvalues inside the separation disc
};

struct ProbeReport {
    std::vector<ProbeStep> steps;
    double eig_slope = 0.0;       // log-log slope of eig_error against eps
    double gap_slope = 0.0;
    double disc_radius = 0.0;
    int multiplicity = 0;
};

namespace detail {

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= n; my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    if (den == 0.0) throw std::invalid_argument("least_squares_slope: degenerate abscissae");
    return num / den;
}

}  // namespace detail

// Rotation-family probe of the superconvergence statements: the projection
// onto the target eigenspace rotated by theta_n = theta0 * 2^-n has coupling
// defect sin(theta_n) in closed form; eigenvalue errors must then decay
// quadratically in it and eigenspace gaps linearly.
inline ProbeReport superconvergence_probe(const PrescribedMatrix& a, Interval delta,
                                          int steps = 9, double theta0 = 0.4) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a.matrix);
    const int n = static_cast<int>(a.matrix.rows());
    std::vector<int> inside, outside;
    for (int k = 0; k < n; ++k)
        (delta.contains_closed(es.eigenvalues()(k)) ? inside : outside).push_back(k);
    if (inside.empty()) throw std::invalid_argument("superconvergence_probe: empty interval");
    const double lambda = es.eigenvalues()(inside.front());
    if (es.eigenvalues()(inside.back()) - lambda > 1e-9)
        throw std::invalid_argument("superconvergence_probe: interval holds several eigenvalues");
    const int kappa = static_cast<int>(inside.size());
    if (static_cast<int>(outside.size()) < kappa)
        throw std::invalid_argument("superconvergence_probe: no room for rotation partners");

    // disc radius: half the distance from lambda+i to the nearest other
    // lifted eigenvalue and to the bounding curves
    double sep = std::numeric_limits<double>::infinity();
    for (int k : outside) sep = std::min(sep, std::abs(es.eigenvalues()(k) - lambda));
    const GapContext ctx = GapContext::make(delta.lo, delta.hi, {lambda});
    sep = std::min(sep, curve_distance(ctx.region(), Complex(lambda, 1.0)));
    const double r = 0.5 * std::min(sep, 0.98);

    MatrixXcd u(n, kappa), w(n, kappa);
    for (int j = 0; j < kappa; ++j) {
        u.col(j) = es.eigenvectors().col(inside[j]);
        w.col(j) = es.eigenvectors().col(outside[j]);
    }
    const double m_min = es.eigenvalues()(0);
    const MatrixXcd weight =
        a.matrix - (m_min - 1.0) * MatrixXcd::Identity(n, n);  // form inner product

    ProbeReport report;
    report.disc_radius = r;
    report.multiplicity = kappa;
    std::vector<double> lx, ly_eig, ly_gap;
    for (int step = 0; step < steps; ++step) {
        const double theta = theta0 * std::pow(2.0, -step);
        const MatrixXcd rotated = std::cos(theta) * u + std::sin(theta) * w;
        const MatrixXcd p = rotated * rotated.adjoint();
        const MatrixXcd t = a.matrix + Complex(0, 1) * p;
        const auto eig = general_gen_eig(GeneralPencil::make(t, MatrixXcd::Identity(n, n)));
        ProbeStep ps{};
        ps.eps = std::sin(theta);
        std::vector<Index> in_disc;
        for (Index k = 0; k < eig.eigenvalues.size(); ++k)
            if (std::abs(eig.eigenvalues(k) - Complex(lambda, 1.0)) <= r) in_disc.push_back(k);
        ps.disc_count = static_cast<int>(in_disc.size());
        if (ps.disc_count == kappa) {
            for (Index k : in_disc)
                ps.eig_error =
                    std::max(ps.eig_error, std::abs(eig.eigenvalues(k) - Complex(lambda, 1.0)));
            MatrixXcd vecs(n, kappa);
            for (int c = 0; c < kappa; ++c) vecs.col(c) = eig.eigenvectors.col(in_disc[c]);
            ps.subspace_gap = subspace_gap(u, vecs, weight).gap;
            if (ps.eig_error > 1e-13 && ps.subspace_gap > 1e-11) {
                lx.push_back(std::log(ps.eps));
                ly_eig.push_back(std::log(ps.eig_error));
                ly_gap.push_back(std::log(ps.subspace_gap));
            }
        }
        report.steps.push_back(ps);
    }
    if (lx.size() < 3)
        throw std::runtime_error("superconvergence_probe: fewer than 3 usable points");
    report.eig_slope = detail::least_squares_slope(lx, ly_eig);
    report.gap_slope = detail::least_squares_slope(lx, ly_gap);
    return report;
}

}  // namespace specgap
