#pragma once

// Enclosure geometry for spectra of operators A+iB: the two boundary curves
// attached to a gap of the real part's spectrum, the spectrum-free region
// they bound, the constants of the quartic resolvent estimate, and the real
// intervals that nonreal eigenvalues of projection-shifted operators force
// onto the spectrum of A.
//
// All functions here are pure and operate on value types; they are safe to
// call concurrently.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace specgap {

using Complex = std::complex<double>;

// Closed, open or half-open real interval; openness is contextual and
// documented at each producing operation.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains_closed(double x) const { return lo <= x && x <= hi; }
};

// Rectangle (re_lo, re_hi) x (im_lo, im_hi) in the complex plane from which
// the boundary curves and the spectrum-free region are built.  The "tall"
// orientation means the rectangle is at least as high as it is wide; the
// curve formulas switch between the two orientations.
struct RegionParams {
    double re_lo;
    double re_hi;
    double im_lo;
    double im_hi;

    bool tall() const { return re_hi - re_lo <= im_hi - im_lo; }

    void validate() const {
        if (!(re_lo < re_hi) || !(im_lo < im_hi))
            throw std::invalid_argument("RegionParams: need re_lo < re_hi and im_lo < im_hi");
    }
};

// The two boundary curves. In the tall orientation "lower" has the smaller
// imaginary part; in the wide orientation it has the smaller real part.
enum class Branch { lower, upper };

// Point on the selected boundary curve at parameter t in [0,1].
inline Complex curve_point(const RegionParams& p, double t, Branch branch) {
    p.validate();
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("curve_point: t outside [0,1]");
    const double sgn = branch == Branch::lower ? -1.0 : 1.0;
    if (p.tall()) {
        const double x = p.re_lo * (1.0 - t) + p.re_hi * t;
        const double half = 0.5 * (p.im_hi - p.im_lo);
        const double rad = half * half + (x - p.re_lo) * (x - p.re_hi);
        // analytically >= ((im_hi-im_lo)/2)^2 - ((re_hi-re_lo)/2)^2 >= 0
        const double root = std::sqrt(std::max(rad, 0.0));
        return {x, 0.5 * (p.im_lo + p.im_hi) + sgn * root};
    }
    const double y = (1.0 - t) * p.im_lo + t * p.im_hi;
    const double half = 0.5 * (p.re_hi - p.re_lo);
    const double rad = half * half + (y - p.im_lo) * (y - p.im_hi);
    const double root = std::sqrt(std::max(rad, 0.0));
    return {0.5 * (p.re_lo + p.re_hi) + sgn * root, y};
}

// Membership in the open spectrum-free region bounded by the two curves.
// The strict/non-strict inequalities follow the case split literally; ties
// are never reordered, callers needing slack expand via a tolerance at the
// enclosure-set level.
inline bool region_contains(const RegionParams& p, Complex z) {
    p.validate();
    const double x = z.real(), y = z.imag();
    if (p.tall()) {
        if (!(p.re_lo < x && x < p.re_hi)) return false;
        const double t = (x - p.re_lo) / (p.re_hi - p.re_lo);
        const double yl = curve_point(p, t, Branch::lower).imag();
        const double yu = curve_point(p, t, Branch::upper).imag();
        return (p.im_lo <= y && y < yl) || (yu < y && y <= p.im_hi);
    }
    if (!(p.im_lo <= y && y <= p.im_hi)) return false;
    const double t = (y - p.im_lo) / (p.im_hi - p.im_lo);
    const double xl = curve_point(p, t, Branch::lower).real();
    const double xu = curve_point(p, t, Branch::upper).real();
    return xl < x && x < xu;
}

namespace detail {

// Golden-section minimisation of f over [lo, hi] to the given absolute
// tolerance on the argument.
template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? fc : fd;
}

}  // namespace detail

// Distance from z to the union of the two boundary curves.  Dense sampling
// (1024 points per branch) brackets every local minimum, each bracket is
// then refined by golden section to 1e-12 in the curve parameter.
inline double curve_distance(const RegionParams& p, Complex z) {
    p.validate();
    constexpr int n_samples = 1024;
    double best = std::numeric_limits<double>::infinity();
    for (Branch branch : {Branch::lower, Branch::upper}) {
        auto dist = [&](double t) { return std::abs(z - curve_point(p, t, branch)); };
        std::vector<double> d(n_samples + 1);
        for (int i = 0; i <= n_samples; ++i) d[i] = dist(double(i) / n_samples);
        for (int i = 0; i <= n_samples; ++i) {
            const bool left_ok = i == 0 || d[i] <= d[i - 1];
            const bool right_ok = i == n_samples || d[i] <= d[i + 1];
            if (!(left_ok && right_ok)) continue;
            const double lo = double(std::max(i - 1, 0)) / n_samples;
            const double hi = double(std::min(i + 1, n_samples)) / n_samples;
            best = std::min(best, detail::golden_section(dist, lo, hi, 1e-12));
        }
    }
    return best;
}

// Signed residual of the boundary identity: zero on the curves (away from
// the left edge), negative inside the region, positive in the exterior slab.
inline double boundary_identity_residual(const RegionParams& p, Complex z) {
    p.validate();
    if (z.real() == p.re_lo)
        throw std::invalid_argument("boundary_identity_residual: Re z equals re_lo");
    const double num = (z.imag() - p.im_hi) * (z.imag() - p.im_lo);
    return z.real() - num / (z.real() - p.re_lo) - p.re_hi;
}

// Constants of the quartic resolvent estimate over a gap (a,b) of the real
// part, for a skew part with operator norm skew_norm.
struct EnclosureConstants {
    double radius;     // max{(b-a)/2, skew_norm}
    double scale;      // multiplies the defect in the quartic estimate
    double quartic;    // K: resolvent norm is bounded by K / curve_distance^4
    double skew_norm;
};

inline EnclosureConstants region_constants(double a, double b, double skew_norm) {
    if (!(a < b)) throw std::invalid_argument("region_constants: need a < b");
    if (!(skew_norm >= 0.0)) throw std::invalid_argument("region_constants: skew_norm < 0");
    EnclosureConstants c{};
    c.skew_norm = skew_norm;
    c.radius = std::max(0.5 * (b - a), skew_norm);
    c.scale = (c.radius * c.radius + 2.0 * c.radius * (4.0 + 10.0 * skew_norm) +
               4.0 * skew_norm * skew_norm) * (b - a);
    c.quartic = std::max({std::pow(c.radius, 4.0), 2.0 * std::pow(c.radius, 3.0), c.scale});
    return c;
}

// Finite list of real eigenvalues with multiplicities, standing in for the
// spectrum of a self-adjoint matrix.  Values closer than 1e-12 are merged so
// that degenerate gaps are suppressed.
class SpectrumModel {
public:
    SpectrumModel(std::vector<double> eigenvalues, std::vector<int> multiplicities) {
        if (eigenvalues.empty())
            throw std::invalid_argument("SpectrumModel: empty spectrum");
        if (eigenvalues.size() != multiplicities.size())
            throw std::invalid_argument("SpectrumModel: length mismatch");
        std::vector<std::size_t> order(eigenvalues.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t i, std::size_t j) { return eigenvalues[i] < eigenvalues[j]; });
        for (std::size_t i : order) {
            if (multiplicities[i] <= 0)
                throw std::invalid_argument("SpectrumModel: non-positive multiplicity");
            if (!values_.empty() && eigenvalues[i] - values_.back() < 1e-12) {
                mults_.back() += multiplicities[i];
            } else {
                values_.push_back(eigenvalues[i]);
                mults_.push_back(multiplicities[i]);
            }
        }
    }

    static SpectrumModel simple(std::vector<double> eigenvalues) {
        std::vector<int> m(eigenvalues.size(), 1);
        return SpectrumModel(std::move(eigenvalues), std::move(m));
    }

    const std::vector<double>& values() const { return values_; }
    const std::vector<int>& multiplicities() const { return mults_; }
    double min() const { return values_.front(); }
    double max() const { return values_.back(); }

    int total_multiplicity() const {
        int n = 0;
        for (int m : mults_) n += m;
        return n;
    }

    // Maximal open intervals between consecutive distinct eigenvalues.
    std::vector<Interval> gaps() const {
        std::vector<Interval> g;
        for (std::size_t i = 0; i + 1 < values_.size(); ++i)
            g.push_back({values_[i], values_[i + 1]});
        return g;
    }

    // Multiplicity-weighted count inside a closed interval.
    int count_in(const Interval& iv) const {
        int n = 0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (iv.contains_closed(values_[i])) n += mults_[i];
        return n;
    }

private:
    std::vector<double> values_;
    std::vector<int> mults_;
};

// A gap (lo, hi) of the real part's spectrum together with the eigenvalues
// inside it and the constants used for projection-shifted resolvent bounds
// (skew range [0,1], skew norm 1: the shift is an orthogonal projection).
struct GapContext {
    double lo;
    double hi;
    std::vector<double> eigenvalues;   // strictly inside (lo, hi), ascending
    EnclosureConstants constants;

    static GapContext make(double lo, double hi, std::vector<double> eigenvalues) {
        if (!(lo < hi)) throw std::invalid_argument("GapContext: need lo < hi");
        std::sort(eigenvalues.begin(), eigenvalues.end());
        for (double x : eigenvalues)
            if (!(lo < x && x < hi))
                throw std::invalid_argument("GapContext: eigenvalue outside (lo, hi)");
        return {lo, hi, std::move(eigenvalues), region_constants(lo, hi, 1.0)};
    }

    RegionParams region() const { return {lo, hi, 0.0, 1.0}; }
};

// Lower bound d(z) on the shifted-operator resolvent defect at z: the
// minimum of curve_distance^4 / K and the distance to the lifted
// eigenvalues. With no eigenvalues in the gap the second term is +inf.
inline double resolvent_lower_bound(const GapContext& ctx, Complex z) {
    const double cd = curve_distance(ctx.region(), z);
    double d = std::pow(cd, 4.0) / ctx.constants.quartic;
    for (double lam : ctx.eigenvalues)
        d = std::min(d, std::abs(z - Complex(lam, 1.0)));
    return d;
}

// Half-open interval (xi, eta + zeta^2/(eta - xi)] guaranteed to intersect
// the spectrum, given a Rayleigh quotient eta and residual norm zeta.
inline Interval kato_interval(double xi, double eta, double zeta) {
    if (!(xi < eta)) throw std::invalid_argument("kato_interval: need xi < eta");
    if (!(zeta >= 0.0)) throw std::invalid_argument("kato_interval: zeta < 0");
    return {xi, eta + zeta * zeta / (eta - xi)};
}

// Closed interval around Re z that must meet the spectrum of the real part
// when z is an eigenvalue of a projection-shifted operator (0 <= Im z <= 1).
inline Interval eigenvalue_enclosure(Complex z) {
    const double s = z.imag();
    if (!(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("eigenvalue_enclosure: Im z outside [0,1]");
    const double half = std::sqrt(s * (1.0 - s));
    return {z.real() - half, z.real() + half};
}

// Open interval trapping the unique eigenvalue of the real part in (a, b),
// sharper than eigenvalue_enclosure when such localisation is known.
inline Interval refined_eigenvalue_enclosure(Complex z, double a, double b) {
    const double s = z.imag();
    if (!(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("refined_eigenvalue_enclosure: Im z outside [0,1]");
    if (!(a < z.real() && z.real() < b))
        throw std::invalid_argument("refined_eigenvalue_enclosure: Re z outside (a, b)");
    const double num = s * (1.0 - s);
    return {z.real() - num / (b - z.real()), z.real() + num / (z.real() - a)};
}

// Membership in the enclosure set carved from the rectangle
// [min spec, max spec] x [im_lo, im_hi] by removing the spectrum-free region
// of every gap.  tol expands the retained set, so points on the boundary
// curves (where eigenvalues may genuinely sit) pass membership.
inline bool horizontal_enclosure_contains(const SpectrumModel& spec, double im_lo,
                                          double im_hi, Complex z, double tol = 1e-10) {
    if (!(im_lo < im_hi))
        throw std::invalid_argument("horizontal_enclosure_contains: need im_lo < im_hi");
    if (z.real() < spec.min() - tol || z.real() > spec.max() + tol) return false;
    if (z.imag() < im_lo - tol || z.imag() > im_hi + tol) return false;
    for (const Interval& gap : spec.gaps()) {
        RegionParams p{gap.lo, gap.hi, im_lo, im_hi};
        if (region_contains(p, z) && curve_distance(p, z) > tol) return false;
    }
    return true;
}

// The same enclosure for the skew part, obtained by swapping axes.
inline bool vertical_enclosure_contains(const SpectrumModel& spec, double re_lo,
                                        double re_hi, Complex z, double tol = 1e-10) {
    return horizontal_enclosure_contains(spec, re_lo, re_hi,
                                         Complex(z.imag(), z.real()), tol);
}

// Reflects the imaginary part about 1/2: lifted eigenvalues near lambda+i
// fold back to near lambda, while near-real (pollution-permitted) points
// fold away from the real axis.
inline Complex fold_lifted(Complex z) {
    return {z.real(), 1.0 - z.imag()};
}

}  // namespace specgap
