#pragma once

// Monotone CDF-matching momentum maps.
//
// A position density |psi(x)|^2 and a momentum density |psi~(p)|^2 are turned
// into cumulative distributions F_x, F_p. The momentum assigned to position x is
//
//   eps = +1:  p_hat(x) = F_p^{-1}( F_x(x) )        (nondecreasing)
//   eps = -1:  p_hat(x) = F_p^{-1}( 1 - F_x(x) )    (nonincreasing)
//
// so that pushing |psi|^2 forward through p_hat gives |psi~|^2. The phase-space
// density is then supported on the graph p = p_hat(x), where
// F_p(p) - F_{eps x} vanishes.

#include "cqm/grid.hpp"
#include "cqm/random.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace cqm {

/// Continuous, monotone CDF on a uniform axis, stored as knot values and
/// slopes joined by a monotone cubic Hermite interpolant (Fritsch-Carlson
/// limited where needed).
///
/// Two ways to build one:
///  - from density samples: knots at the grid points plus a zero-mass knot
///    half a cell beyond each end; values are midpoint cumulative sums with the
///    Euler-Maclaurin correction -h^2/12 rho'(x_j) (fourth order);
///  - from amplitude samples (band_limited): the density is |f|^2 of the
///    trigonometric interpolant of the samples, whose integral is known in
///    closed form, so knot values on a refined mesh are exact.
template <typename Real>
class CumulativeDistribution {
public:
    CumulativeDistribution(const RealVector<Real>& density, Real first, Real spacing) {
        const Eigen::Index n = density.size();
        if (n < 2) throw std::invalid_argument("cdf: need at least two density samples");
        if (!(spacing > Real(0)) || !std::isfinite(spacing) || !std::isfinite(first))
            throw std::invalid_argument("cdf: axis spacing must be positive and finite");
        for (Eigen::Index j = 0; j < n; ++j)
            if (!(density[j] >= Real(0)) || !std::isfinite(density[j]))
                throw std::invalid_argument("cdf: density must be finite and nonnegative (index " +
                                            std::to_string(j) + ")");
        const Real h = spacing;
        mass_ = density.sum() * h;
        if (!(mass_ > Real(0))) throw std::invalid_argument("cdf: density is identically zero");

        knots_.resize(n + 2);
        values_.resize(n + 2);
        slopes_.resize(n + 2);
        knots_[0] = first - h / Real(2);
        knots_[n + 1] = first + (Real(n) - Real(0.5)) * h;
        values_[0] = Real(0);
        values_[n + 1] = Real(1);

        Real running = Real(0);
        for (Eigen::Index j = 0; j < n; ++j) {
            Real deriv;
            if (j == 0)
                deriv = (density[1] - density[0]) / h;
            else if (j == n - 1)
                deriv = (density[n - 1] - density[n - 2]) / h;
            else
                deriv = (density[j + 1] - density[j - 1]) / (Real(2) * h);
            const Real f = (running + density[j] * h / Real(2) - h * h / Real(12) * deriv) / mass_;
            running += density[j] * h;
            knots_[j + 1] = first + Real(j) * h;
            values_[j + 1] = std::clamp(f, values_[j], Real(1));
            slopes_[j + 1] = density[j] / mass_;
        }
        slopes_[0] = slopes_[1];
        slopes_[n + 1] = slopes_[n];

        const Real floor = Real(kNodeFloorRelative) * density.maxCoeff();
        node_ = (density.array() < floor);
        limit_slopes();
    }

    /// CDF of sum_c |f_c(y)|^2, where f_c is the trigonometric interpolant of
    /// column c of `amps` (samples at y_j = first + j h) using the n
    /// frequencies band_start + k 2pi/(n h). The axis is the periodic cell
    /// [first - h/2, first + (n - 1/2) h]; knots are `refine` per grid cell.
    static CumulativeDistribution band_limited(const ComplexMatrix<Real>& amps, Real first, Real spacing,
                                               Real band_start, int refine = 8) {
        const Eigen::Index n = amps.rows();
        if (n < 2 || amps.cols() < 1) throw std::invalid_argument("cdf: need at least two amplitude samples");
        if (!(spacing > Real(0)) || !std::isfinite(spacing) || !std::isfinite(first))
            throw std::invalid_argument("cdf: axis spacing must be positive and finite");
        if (refine < 2) throw std::invalid_argument("cdf: refinement must be at least 2");
        if (!amps.allFinite()) throw std::invalid_argument("cdf: amplitudes must be finite");
        const Real h = spacing, length = Real(n) * h, dw = Real(2) * pi_v<Real> / length;
        const Real start = first - h / Real(2);
        const Eigen::Index m_fine = Eigen::Index(refine) * n;

        // d_m: Fourier coefficients of sum_c |f_c|^2 at frequency m dw, |m| < n
        Eigen::FFT<Real> fft;
        ComplexVector<Real> corr = ComplexVector<Real>::Zero(2 * n);
        ComplexVector<Real> col(n), b(n), padded(2 * n), spec(2 * n), back(2 * n);
        for (Eigen::Index c = 0; c < amps.cols(); ++c) {
            for (Eigen::Index j = 0; j < n; ++j)
                col[j] = amps(j, c) * std::polar(Real(1), -band_start * (first + Real(j) * h));
            fft.fwd(b, col);
            padded.setZero();
            for (Eigen::Index k = 0; k < n; ++k)
                padded[k] = b[k] / Real(n) * std::polar(Real(1), -Real(k) * dw * first);
            fft.fwd(spec, padded);
            spec = spec.cwiseAbs2().template cast<std::complex<Real>>();
            fft.inv(back, spec);
            corr += back;
        }

        // rho(y_q) and int_start^{y_q} rho on y_q = start + q length / m_fine
        ComplexVector<Real> a = ComplexVector<Real>::Zero(m_fine), g = ComplexVector<Real>::Zero(m_fine);
        std::complex<Real> g_offset(0);
        for (Eigen::Index m = -(n - 1); m <= n - 1; ++m) {
            const std::complex<Real> d = corr[m >= 0 ? m : 2 * n + m];
            const std::complex<Real> am = d * std::polar(Real(1), Real(m) * dw * start);
            const Eigen::Index slot = m >= 0 ? m : m_fine + m;
            a[slot] = am;
            if (m != 0) {
                g[slot] = am / std::complex<Real>(0, Real(m) * dw);
                g_offset += g[slot];
            }
        }
        const Real d0 = corr[0].real();
        const Real mass = d0 * length;
        if (!(mass > Real(0))) throw std::invalid_argument("cdf: density is identically zero");
        ComplexVector<Real> rho(m_fine), cum(m_fine);
        fft.inv(rho, a);
        fft.inv(cum, g);

        CumulativeDistribution out;
        out.mass_ = mass;
        out.knots_.resize(m_fine + 1);
        out.values_.resize(m_fine + 1);
        out.slopes_.resize(m_fine + 1);
        const Real step = length / Real(m_fine);
        for (Eigen::Index q = 0; q <= m_fine; ++q) {
            out.knots_[q] = start + Real(q) * step;
            if (q == m_fine) {
                out.values_[q] = Real(1);
                out.slopes_[q] = out.slopes_[0];
                continue;
            }
            const Real gq = (Real(m_fine) * cum[q] - g_offset).real() + d0 * Real(q) * step;
            const Real f = q == 0 ? Real(0) : std::clamp(gq / mass, out.values_[q - 1], Real(1));
            out.values_[q] = f;
            out.slopes_[q] = std::max(Real(0), Real(m_fine) * rho[q].real() / mass);
        }
        const RealVector<Real> samples = amps.cwiseAbs2().rowwise().sum();
        out.node_ = (samples.array() < Real(kNodeFloorRelative) * samples.maxCoeff());
        out.limit_slopes();
        return out;
    }

    static CumulativeDistribution band_limited(const ComplexVector<Real>& amps, Real first, Real spacing,
                                               Real band_start, int refine = 8) {
        return band_limited(ComplexMatrix<Real>(amps), first, spacing, band_start, refine);
    }

    /// Unnormalized mass sum(rho) * h that was divided out.
    Real total_mass() const noexcept { return mass_; }
    const RealVector<Real>& knots() const noexcept { return knots_; }
    const RealVector<Real>& values() const noexcept { return values_; }
    /// Grid points (knots without the two end knots) where the density is below the node floor.
    const Mask& node_points() const noexcept { return node_; }
    /// Largest normalized grid density.
    Real peak_density() const noexcept { return slopes_.maxCoeff(); }
    Real lower() const noexcept { return knots_[0]; }
    Real upper() const noexcept { return knots_[knots_.size() - 1]; }

    Real operator()(Real x) const {
        if (x <= lower()) return Real(0);
        if (x >= upper()) return Real(1);
        const Eigen::Index i = segment(x);
        const Real h = knots_[i + 1] - knots_[i];
        return hermite(i, (x - knots_[i]) / h);
    }

    /// dF/dx of the interpolant.
    Real density(Real x) const {
        if (x <= lower() || x >= upper()) return Real(0);
        const Eigen::Index i = segment(x);
        const Real h = knots_[i + 1] - knots_[i];
        const Real t = (x - knots_[i]) / h;
        const Real y0 = values_[i], y1 = values_[i + 1];
        const Real d0 = left_[i], d1 = right_[i];
        const Real dh00 = Real(6) * t * t - Real(6) * t, dh10 = Real(3) * t * t - Real(4) * t + Real(1);
        const Real dh01 = -dh00, dh11 = Real(3) * t * t - Real(2) * t;
        return (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    }

    /// Smallest-interval inverse; a flat stretch of F maps to its midpoint.
    Real quantile(Real u) const {
        u = std::clamp(u, Real(0), Real(1));
        const auto* b = values_.data();
        const auto* e = b + values_.size();
        const Eigen::Index lo = std::lower_bound(b, e, u) - b;
        const Eigen::Index hi = (std::upper_bound(b, e, u) - b) - 1;
        if (lo <= hi) return (knots_[lo] + knots_[hi]) / Real(2);
        return solve_segment(hi, u);
    }

    /// True if F is exactly flat on a nondegenerate interval at level u.
    bool is_plateau(Real u) const {
        const auto* b = values_.data();
        const auto* e = b + values_.size();
        const auto range = std::equal_range(b, e, u);
        return range.second - range.first >= 2;
    }

private:
    CumulativeDistribution() = default;

    Eigen::Index segment(Real x) const {
        const auto* b = knots_.data();
        const auto* e = b + knots_.size();
        Eigen::Index i = (std::upper_bound(b, e, x) - b) - 1;
        return std::clamp<Eigen::Index>(i, 0, knots_.size() - 2);
    }

    // Written as y0 plus an increment so the rounding noise scales with the
    // segment's own rise; near F = 1 the plain form is not monotone.
    Real hermite(Eigen::Index i, Real t) const { return values_[i] + rise(i, t); }

    Real rise(Eigen::Index i, Real t) const {
        const Real h = knots_[i + 1] - knots_[i];
        const Real t2 = t * t, t3 = t2 * t;
        return (Real(3) * t2 - Real(2) * t3) * (values_[i + 1] - values_[i]) + (t3 - Real(2) * t2 + t) * h * left_[i] +
               (t3 - t2) * h * right_[i];
    }

    void limit_slopes() {
        const Eigen::Index segs = knots_.size() - 1;
        left_.resize(segs);
        right_.resize(segs);
        for (Eigen::Index i = 0; i < segs; ++i) {
            const Real delta = (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
            if (!(delta > Real(0))) {
                left_[i] = right_[i] = Real(0);
                continue;
            }
            Real a = slopes_[i] / delta, b = slopes_[i + 1] / delta;
            const Real r2 = a * a + b * b;
            if (r2 > Real(9)) {
                const Real tau = Real(3) / std::sqrt(r2);
                a *= tau;
                b *= tau;
            }
            left_[i] = a * delta;
            right_[i] = b * delta;
        }
    }

    // F is strictly increasing inside a segment with values[i] < u < values[i+1].
    Real solve_segment(Eigen::Index i, Real u) const {
        const Real h = knots_[i + 1] - knots_[i];
        const Real y0 = values_[i], y1 = values_[i + 1];
        Real a = Real(0), b = Real(1);
        const Real target = u - y0;
        Real t = std::clamp(target / (y1 - y0), Real(0), Real(1));
        for (int iter = 0; iter < 100; ++iter) {
            const Real f = rise(i, t) - target;
            if (f == Real(0)) break;
            (f < Real(0) ? a : b) = t;
            const Real t2 = t * t;
            const Real df = (Real(6) * t2 - Real(6) * t) * (y0 - y1) / h +
                            (Real(3) * t2 - Real(4) * t + Real(1)) * left_[i] + (Real(3) * t2 - Real(2) * t) * right_[i];
            Real next = (df > Real(0)) ? t - f / (df * h) : Real(-1);
            if (!(next > a && next < b)) next = (a + b) / Real(2);
            if (std::abs(next - t) <= std::numeric_limits<Real>::epsilon() * Real(2)) {
                t = next;
                break;
            }
            t = next;
        }
        return knots_[i] + t * h;
    }

    RealVector<Real> knots_;
    RealVector<Real> values_;
    RealVector<Real> slopes_;
    RealVector<Real> left_;
    RealVector<Real> right_;
    Mask node_;
    Real mass_ = Real(0);
};

template <typename Real>
CumulativeDistribution<Real> cdf(const RealVector<Real>& density, const RealVector<Real>& axis) {
    if (axis.size() != density.size())
        throw std::invalid_argument("cdf: density and axis lengths differ");
    if (axis.size() < 2) throw std::invalid_argument("cdf: need at least two points");
    const Real h = (axis[axis.size() - 1] - axis[0]) / Real(axis.size() - 1);
    for (Eigen::Index j = 1; j < axis.size(); ++j)
        if (std::abs(axis[j] - axis[j - 1] - h) > Real(1e-6) * h)
            throw std::invalid_argument("cdf: axis must be uniformly spaced");
    return CumulativeDistribution<Real>(density, axis[0], h);
}

/// Exact CDF of the band-limited density of a state (either representation).
template <typename Real>
CumulativeDistribution<Real> cdf(const Wavefunction1D<Real>& psi) {
    const auto& g = psi.grid();
    const auto rep = psi.representation();
    return CumulativeDistribution<Real>::band_limited(psi.amps(), psi.axis()[0], psi.spacing(),
                                                      detail::band_start(g, rep));
}

enum class Orientation : int { increasing = 1, decreasing = -1 };

inline Orientation orientation_from_int(int eps) {
    if (eps == 1) return Orientation::increasing;
    if (eps == -1) return Orientation::decreasing;
    throw std::invalid_argument("epsilon must be +1 or -1, got " + std::to_string(eps));
}

/// p_hat(x, t) for one time slice, with its inverse x_hat(p, t).
template <typename Real>
class MonotoneMomentumMap {
public:
    MonotoneMomentumMap(CumulativeDistribution<Real> fx, CumulativeDistribution<Real> fp,
                        Orientation eps, Real t = Real(0))
        : fx_(std::move(fx)), fp_(std::move(fp)), eps_(eps), t_(t) {}

    Orientation orientation() const noexcept { return eps_; }
    int epsilon() const noexcept { return static_cast<int>(eps_); }
    Real time() const noexcept { return t_; }
    const CumulativeDistribution<Real>& position_cdf() const noexcept { return fx_; }
    const CumulativeDistribution<Real>& momentum_cdf() const noexcept { return fp_; }

    /// Level of F_p that position x is matched to.
    Real level(Real x) const {
        const Real u = fx_(x);
        return eps_ == Orientation::increasing ? u : Real(1) - u;
    }

    Real operator()(Real x) const { return fp_.quantile(level(x)); }

    /// x_hat(p): the position whose matched momentum is p.
    Real inverse(Real p) const {
        const Real u = fp_(p);
        return fx_.quantile(eps_ == Orientation::increasing ? u : Real(1) - u);
    }

    RealVector<Real> tabulate(const RealVector<Real>& xs) const {
        RealVector<Real> out(xs.size());
        for (Eigen::Index j = 0; j < xs.size(); ++j) out[j] = (*this)(xs[j]);
        return out;
    }

    RealVector<Real> tabulate_inverse(const RealVector<Real>& ps) const {
        RealVector<Real> out(ps.size());
        for (Eigen::Index k = 0; k < ps.size(); ++k) out[k] = inverse(ps[k]);
        return out;
    }

    /// True where the map is smooth: position density above the node floor,
    /// matched momentum density above its node floor and no plateau jump.
    bool is_smooth_at(Real x) const {
        const Real u = level(x);
        if (fp_.is_plateau(u)) return false;
        const Real rx = fx_.density(x), rp = fp_.density((*this)(x));
        return rx > Real(kNodeFloorRelative) * fx_.peak_density() &&
               rp > Real(kNodeFloorRelative) * fp_.peak_density();
    }

    /// Positions whose level falls on a flat stretch of F_p; p_hat jumps there.
    std::vector<Real> jump_locations(const RealVector<Real>& xs) const {
        std::vector<Real> out;
        for (Eigen::Index j = 0; j < xs.size(); ++j)
            if (fp_.is_plateau(level(xs[j]))) out.push_back(xs[j]);
        return out;
    }

private:
    CumulativeDistribution<Real> fx_;
    CumulativeDistribution<Real> fp_;
    Orientation eps_;
    Real t_;
};

template <typename Real>
MonotoneMomentumMap<Real> momentum_map(const CumulativeDistribution<Real>& fx,
                                       const CumulativeDistribution<Real>& fp, Orientation eps,
                                       Real t = Real(0)) {
    return MonotoneMomentumMap<Real>(fx, fp, eps, t);
}

/// Map for a position-representation state: builds both CDFs.
template <typename Real>
MonotoneMomentumMap<Real> momentum_map(const Wavefunction1D<Real>& psi, Orientation eps) {
    return MonotoneMomentumMap<Real>(cdf(psi), cdf(to_momentum(psi)), eps, psi.time());
}

/// Argument of the delta function in the symmetric phase-space density:
/// F_p(p) - F_{eps x}. Zero exactly on the graph p = p_hat(x).
template <typename Real>
Real delta_argument(Real x, Real p, const CumulativeDistribution<Real>& fx,
                    const CumulativeDistribution<Real>& fp, Orientation eps) {
    const Real u = fx(x);
    return fp(p) - (eps == Orientation::increasing ? u : Real(1) - u);
}

// ---------------------------------------------------------------------------
// Two dimensions: three complete commuting sets (x1,x2), (p1,x2), (p1,p2).

/// Column mass below which a conditional map is not built.
inline constexpr double kUnusedColumnMass = 1e-12;

template <typename Real>
struct PhasePoint2D {
    Real x1, x2, p1, p2;
};

/// Chained conditional maps: x1 -> p1 at fixed x2, then x2 -> p2 at fixed p1.
/// Orientation is fixed to increasing.
template <typename Real>
class ChainedMaps2D {
public:
    using Map = MonotoneMomentumMap<Real>;
    using Cdf = CumulativeDistribution<Real>;

    ChainedMaps2D(const Wavefunction2D<Real>& psi) : t_(psi.time()), grid1_(psi.grid1()), grid2_(psi.grid2()) {
        if (psi.representation(1) != Representation::position ||
            psi.representation(2) != Representation::position)
            throw std::invalid_argument("chained_maps_2d: state must be in position representation");
        detail::require_normalized(psi.norm(), "chained_maps_2d");

        const auto mixed = partial_to_momentum(psi, 1);     // psi(p1, x2)
        const auto full = partial_to_momentum(mixed, 2);    // psi(p1, p2)
        const RealMatrix<Real> rho_xx = psi.density();
        const RealMatrix<Real> rho_px = mixed.density();
        const RealMatrix<Real> rho_pp = full.density();
        const Real dx1 = grid1_.dx(), dp1 = grid1_.dp(), dx2 = grid2_.dx(), dp2 = grid2_.dp();
        const Real x1_0 = grid1_.x(0), p1_0 = grid1_.p(0), x2_0 = grid2_.x(0), p2_0 = grid2_.p(0);
        const Real bx1 = detail::band_start(grid1_, Representation::position);
        const Real bp1 = detail::band_start(grid1_, Representation::momentum);
        const Real bx2 = detail::band_start(grid2_, Representation::position);
        const Real bp2 = detail::band_start(grid2_, Representation::momentum);

        const Eigen::Index n1 = grid1_.size(), n2 = grid2_.size();
        column_mass_.resize(n2);
        first_.resize(n2);
        for (Eigen::Index c = 0; c < n2; ++c) {
            const Real ms = rho_xx.col(c).sum() * dx1;
            const Real mt = rho_px.col(c).sum() * dp1;
            column_mass_[c] = ms;
            max_mass_gap_ = std::max(max_mass_gap_, std::abs(ms - mt));
            if (ms < Real(kUnusedColumnMass) || mt < Real(kUnusedColumnMass)) continue;
            first_[c].emplace(Cdf::band_limited(ComplexVector<Real>(psi.amps().col(c)), x1_0, dx1, bx1),
                              Cdf::band_limited(ComplexVector<Real>(mixed.amps().col(c)), p1_0, dp1, bp1),
                              Orientation::increasing, t_);
        }
        row_mass_.resize(n1);
        second_.resize(n1);
        for (Eigen::Index r = 0; r < n1; ++r) {
            const Real ms = rho_px.row(r).sum() * dx2;
            const Real mt = rho_pp.row(r).sum() * dp2;
            row_mass_[r] = ms;
            max_mass_gap_ = std::max(max_mass_gap_, std::abs(ms - mt));
            if (ms < Real(kUnusedColumnMass) || mt < Real(kUnusedColumnMass)) continue;
            second_[r].emplace(Cdf::band_limited(ComplexVector<Real>(mixed.amps().row(r).transpose()), x2_0, dx2, bx2),
                               Cdf::band_limited(ComplexVector<Real>(full.amps().row(r).transpose()), p2_0, dp2, bp2),
                               Orientation::increasing, t_);
        }
        // x2 marginal: sum over p1 rows of |psi(p1_r, x2)|^2 dp1, as a function of x2
        x2_marginal_.emplace(Cdf::band_limited(ComplexMatrix<Real>(mixed.amps().transpose() * std::sqrt(dp1)), x2_0,
                                               dx2, bx2));
    }

    Real time() const noexcept { return t_; }
    const SpatialGrid1D<Real>& grid1() const noexcept { return grid1_; }
    const SpatialGrid1D<Real>& grid2() const noexcept { return grid2_; }

    /// Largest |source mass - target mass| over all columns and rows.
    Real max_mass_gap() const noexcept { return max_mass_gap_; }
    /// Mass of |psi(x1, x2_c)|^2 over x1, i.e. the x2 marginal at grid column c.
    const RealVector<Real>& column_masses() const noexcept { return column_mass_; }
    const RealVector<Real>& row_masses() const noexcept { return row_mass_; }
    const CumulativeDistribution<Real>& x2_marginal() const { return *x2_marginal_; }

    bool column_used(Eigen::Index c) const { return first_[c].has_value(); }
    bool row_used(Eigen::Index r) const { return second_[r].has_value(); }
    /// x1 -> p1 map of grid column c (fixed x2).
    const Map& first_map(Eigen::Index c) const { return first_.at(c).value(); }
    /// x2 -> p2 map of momentum row r (fixed p1).
    const Map& second_map(Eigen::Index r) const { return second_.at(r).value(); }

    /// Grid column holding x2, moved to the nearest used column if necessary.
    Eigen::Index column_of(Real x2) const {
        return nearest_used(first_, index_of(x2, grid2_.x(0), grid2_.dx(), grid2_.size()));
    }
    /// Momentum row holding p1, moved to the nearest used row if necessary.
    Eigen::Index row_of(Real p1) const {
        return nearest_used(second_, index_of(p1, grid1_.p(0), grid1_.dp(), grid1_.size()));
    }

    Real p1_hat(Real x1, Real x2) const { return first_map(column_of(x2))(x1); }
    Real p2_hat(Real x2, Real p1) const { return second_map(row_of(p1))(x2); }

private:
    static Eigen::Index index_of(Real v, Real first, Real h, Eigen::Index n) {
        const auto i = static_cast<Eigen::Index>(std::llround((v - first) / h));
        return std::clamp<Eigen::Index>(i, 0, n - 1);
    }

    static Eigen::Index nearest_used(const std::vector<std::optional<Map>>& maps, Eigen::Index i) {
        const auto n = static_cast<Eigen::Index>(maps.size());
        for (Eigen::Index d = 0; d < n; ++d) {
            if (i - d >= 0 && maps[i - d]) return i - d;
            if (i + d < n && maps[i + d]) return i + d;
        }
        throw std::logic_error("chained maps: no usable column");
    }

    Real t_;
    SpatialGrid1D<Real> grid1_;
    SpatialGrid1D<Real> grid2_;
    std::vector<std::optional<Map>> first_;
    std::vector<std::optional<Map>> second_;
    RealVector<Real> column_mass_;
    RealVector<Real> row_mass_;
    std::optional<CumulativeDistribution<Real>> x2_marginal_;
    Real max_mass_gap_ = Real(0);
};

template <typename Real>
ChainedMaps2D<Real> chained_maps_2d(const Wavefunction2D<Real>& psi) {
    return ChainedMaps2D<Real>(psi);
}

/// Draws n phase-space points: x2 from its marginal, x1 from the column
/// conditional, then p1 = p1_hat(x1; x2) and p2 = p2_hat(x2; p1).
template <typename Real>
std::vector<PhasePoint2D<Real>> sample_phase_space_2d(const ChainedMaps2D<Real>& maps, std::size_t n,
                                                      std::uint64_t seed) {
    std::vector<PhasePoint2D<Real>> out(n);
    const CounterStream stream(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const Real x2 = maps.x2_marginal().quantile(static_cast<Real>(stream.uniform(i, 0)));
        const Eigen::Index c = maps.column_of(x2);
        const auto& m1 = maps.first_map(c);
        const Real x1 = m1.position_cdf().quantile(static_cast<Real>(stream.uniform(i, 1)));
        const Real p1 = m1(x1);
        const Real p2 = maps.p2_hat(x2, p1);
        out[i] = {x1, x2, p1, p2};
    }
    return out;
}

template <typename Real>
std::vector<PhasePoint2D<Real>> sample_phase_space_2d(const Wavefunction2D<Real>& psi, std::size_t n,
                                                      std::uint64_t seed) {
    return sample_phase_space_2d(chained_maps_2d(psi), n, seed);
}

}  // namespace cqm
