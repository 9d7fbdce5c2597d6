#pragma once

// Uniform grids, wavefunctions and the discrete Fourier machinery.
//
// Fourier convention (hbar = 1), used everywhere in the library:
//
//   psi~(p_k) = dx / sqrt(2 pi) * sum_j psi(x_j) exp(-i p_k x_j)
//   psi(x_j)  = dp / sqrt(2 pi) * sum_k psi~(p_k) exp(+i p_k x_j)
//
// with x_j = x_min + j dx and the centered momentum axis p_k = dp (k - n/2),
// dp = 2 pi / (n dx). Both directions preserve sum |.|^2 * (dx or dp).
// Callers only ever see the centered ordering; the FFT ordering stays inside
// this header.

#include "cqm/types.hpp"

#include <unsupported/Eigen/FFT>

#include <array>
#include <bit>
#include <utility>

namespace cqm {

template <typename Real>
class SpatialGrid1D {
public:
    SpatialGrid1D(Eigen::Index n, Real x_min, Real dx) : n_(n), x_min_(x_min), dx_(dx) {
        if (n < 16 || !std::has_single_bit(static_cast<unsigned long>(n)))
            throw std::invalid_argument("grid: n must be a power of two >= 16, got " +
                                        std::to_string(n));
        if (!(dx > Real(0)) || !std::isfinite(dx))
            throw std::invalid_argument("grid: dx must be positive and finite");
        if (!std::isfinite(x_min)) throw std::invalid_argument("grid: x_min must be finite");
    }

    /// Grid of n points centered on `center` (the point center itself is x_{n/2}).
    static SpatialGrid1D centered(Eigen::Index n, Real dx, Real center = Real(0)) {
        return SpatialGrid1D(n, center - Real(n / 2) * dx, dx);
    }

    Eigen::Index size() const noexcept { return n_; }
    Real x_min() const noexcept { return x_min_; }
    Real dx() const noexcept { return dx_; }
    Real dp() const noexcept { return Real(2) * pi_v<Real> / (Real(n_) * dx_); }
    Real length() const noexcept { return Real(n_) * dx_; }

    Real x(Eigen::Index j) const noexcept { return x_min_ + Real(j) * dx_; }
    Real p(Eigen::Index k) const noexcept { return dp() * Real(k - n_ / 2); }

    RealVector<Real> positions() const {
        RealVector<Real> out(n_);
        for (Eigen::Index j = 0; j < n_; ++j) out[j] = x(j);
        return out;
    }
    RealVector<Real> momenta() const {
        RealVector<Real> out(n_);
        for (Eigen::Index k = 0; k < n_; ++k) out[k] = p(k);
        return out;
    }

    Real spacing(Representation r) const noexcept {
        return r == Representation::position ? dx_ : dp();
    }
    RealVector<Real> axis(Representation r) const {
        return r == Representation::position ? positions() : momenta();
    }

    bool operator==(const SpatialGrid1D& o) const noexcept {
        return n_ == o.n_ && x_min_ == o.x_min_ && dx_ == o.dx_;
    }

private:
    Eigen::Index n_;
    Real x_min_;
    Real dx_;
};

/// Complex amplitudes on a 1D grid at time t, in position or momentum representation.
template <typename Real>
class Wavefunction1D {
public:
    Wavefunction1D(SpatialGrid1D<Real> grid, ComplexVector<Real> amps, Real t = Real(0),
                   Representation rep = Representation::position)
        : grid_(std::move(grid)), amps_(std::move(amps)), t_(t), rep_(rep) {
        if (amps_.size() != grid_.size())
            throw std::invalid_argument("wavefunction: amplitude count does not match grid");
    }

    /// Same as the constructor but rescales the amplitudes to unit norm.
    static Wavefunction1D normalized(SpatialGrid1D<Real> grid, ComplexVector<Real> amps,
                                     Real t = Real(0),
                                     Representation rep = Representation::position) {
        const Real h = grid.spacing(rep);
        const Real total = amps.squaredNorm() * h;
        if (!(total > Real(0)) || !std::isfinite(total))
            throw std::invalid_argument("wavefunction: cannot normalize a zero or non-finite state");
        amps /= std::sqrt(total);
        return Wavefunction1D(std::move(grid), std::move(amps), t, rep);
    }

    const SpatialGrid1D<Real>& grid() const noexcept { return grid_; }
    const ComplexVector<Real>& amps() const noexcept { return amps_; }
    Real time() const noexcept { return t_; }
    Representation representation() const noexcept { return rep_; }

    Real spacing() const noexcept { return grid_.spacing(rep_); }
    RealVector<Real> axis() const { return grid_.axis(rep_); }
    RealVector<Real> density() const { return amps_.cwiseAbs2(); }
    Real norm() const { return amps_.squaredNorm() * spacing(); }

private:
    SpatialGrid1D<Real> grid_;
    ComplexVector<Real> amps_;
    Real t_;
    Representation rep_;
};

/// Two-axis wavefunction; each axis is independently in position or momentum
/// representation. Rows index axis 1, columns index axis 2.
template <typename Real>
class Wavefunction2D {
public:
    using Reps = std::array<Representation, 2>;

    Wavefunction2D(SpatialGrid1D<Real> grid1, SpatialGrid1D<Real> grid2, ComplexMatrix<Real> amps,
                   Real t = Real(0),
                   Reps reps = {Representation::position, Representation::position})
        : grid1_(std::move(grid1)), grid2_(std::move(grid2)), amps_(std::move(amps)), t_(t),
          reps_(reps) {
        if (amps_.rows() != grid1_.size() || amps_.cols() != grid2_.size())
            throw std::invalid_argument("wavefunction2d: amplitude shape does not match grids");
    }

    static Wavefunction2D normalized(SpatialGrid1D<Real> grid1, SpatialGrid1D<Real> grid2,
                                     ComplexMatrix<Real> amps, Real t = Real(0),
                                     Reps reps = {Representation::position,
                                                  Representation::position}) {
        const Real total = amps.squaredNorm() * grid1.spacing(reps[0]) * grid2.spacing(reps[1]);
        if (!(total > Real(0)) || !std::isfinite(total))
            throw std::invalid_argument("wavefunction2d: cannot normalize a zero or non-finite state");
        amps /= std::sqrt(total);
        return Wavefunction2D(std::move(grid1), std::move(grid2), std::move(amps), t, reps);
    }

    const SpatialGrid1D<Real>& grid1() const noexcept { return grid1_; }
    const SpatialGrid1D<Real>& grid2() const noexcept { return grid2_; }
    const SpatialGrid1D<Real>& grid(int axis) const { return axis == 1 ? grid1_ : grid2_; }
    const ComplexMatrix<Real>& amps() const noexcept { return amps_; }
    Real time() const noexcept { return t_; }
    const Reps& representations() const noexcept { return reps_; }
    Representation representation(int axis) const { return reps_[axis == 1 ? 0 : 1]; }

    Real spacing(int axis) const { return grid(axis).spacing(representation(axis)); }
    RealVector<Real> axis(int a) const { return grid(a).axis(representation(a)); }
    RealMatrix<Real> density() const { return amps_.cwiseAbs2(); }
    Real norm() const { return amps_.squaredNorm() * spacing(1) * spacing(2); }

private:
    SpatialGrid1D<Real> grid1_;
    SpatialGrid1D<Real> grid2_;
    ComplexMatrix<Real> amps_;
    Real t_;
    Reps reps_;
};

/// A 2D state with at least one axis in momentum representation.
template <typename Real>
using MixedWavefunction2D = Wavefunction2D<Real>;

namespace detail {

template <typename Real>
void require_normalized(Real norm, const char* op) {
    if (!(std::abs(norm - Real(1)) <= norm_tolerance<Real>()))
        throw std::invalid_argument(std::string(op) + ": state is not normalized (norm = " +
                                    std::to_string(static_cast<double>(norm)) + ")");
}

// Centered forward transform of one axis; `fft` is reused by callers that loop.
template <typename Real>
ComplexVector<Real> forward_axis(Eigen::FFT<Real>& fft, const SpatialGrid1D<Real>& g,
                                 const ComplexVector<Real>& psi) {
    const Eigen::Index n = g.size();
    ComplexVector<Real> a(n);
    for (Eigen::Index j = 0; j < n; ++j) a[j] = (j % 2 == 0) ? psi[j] : -psi[j];
    ComplexVector<Real> spec(n);
    fft.fwd(spec, a);
    const Real scale = g.dx() / std::sqrt(Real(2) * pi_v<Real>);
    for (Eigen::Index k = 0; k < n; ++k)
        spec[k] *= scale * std::polar(Real(1), -g.p(k) * g.x_min());
    return spec;
}

template <typename Real>
ComplexVector<Real> inverse_axis(Eigen::FFT<Real>& fft, const SpatialGrid1D<Real>& g,
                                 const ComplexVector<Real>& phi) {
    const Eigen::Index n = g.size();
    ComplexVector<Real> b(n);
    for (Eigen::Index k = 0; k < n; ++k) b[k] = phi[k] * std::polar(Real(1), g.p(k) * g.x_min());
    ComplexVector<Real> out(n);
    fft.inv(out, b);  // includes 1/n
    const Real scale = Real(n) * g.dp() / std::sqrt(Real(2) * pi_v<Real>);
    for (Eigen::Index j = 0; j < n; ++j) out[j] *= (j % 2 == 0) ? scale : -scale;
    return out;
}

template <typename Real>
ComplexMatrix<Real> transform_axis(const ComplexMatrix<Real>& amps, const SpatialGrid1D<Real>& g,
                                   int axis, bool forward) {
    Eigen::FFT<Real> fft;
    ComplexMatrix<Real> out(amps.rows(), amps.cols());
    if (axis == 1) {
        for (Eigen::Index c = 0; c < amps.cols(); ++c) {
            ComplexVector<Real> col = amps.col(c);
            out.col(c) = forward ? forward_axis(fft, g, col) : inverse_axis(fft, g, col);
        }
    } else {
        for (Eigen::Index r = 0; r < amps.rows(); ++r) {
            ComplexVector<Real> row = amps.row(r).transpose();
            out.row(r) = (forward ? forward_axis(fft, g, row) : inverse_axis(fft, g, row)).transpose();
        }
    }
    return out;
}

// Lowest frequency of the trigonometric interpolant along one axis: position
// samples carry the momenta p_k, momentum samples the frequencies -x_j.
template <typename Real>
Real band_start(const SpatialGrid1D<Real>& g, Representation rep) {
    return rep == Representation::position ? g.p(0) : -g.x(g.size() - 1);
}

// Trigonometric interpolant of every column (samples at first + j h, frequencies
// band_start + k 2pi/(n h)) evaluated at first + q h / factor.
template <typename Real>
ComplexMatrix<Real> interpolate_columns(const ComplexMatrix<Real>& amps, Real first, Real h, Real band_start,
                                        int factor) {
    const Eigen::Index n = amps.rows(), m = n * factor;
    Eigen::FFT<Real> fft;
    ComplexVector<Real> col(n), coef(n), padded(m), fine(m);
    ComplexMatrix<Real> out(m, amps.cols());
    for (Eigen::Index c = 0; c < amps.cols(); ++c) {
        for (Eigen::Index j = 0; j < n; ++j) col[j] = amps(j, c) * std::polar(Real(1), -band_start * (first + Real(j) * h));
        fft.fwd(coef, col);
        padded.setZero();
        padded.head(n) = coef;
        fft.inv(fine, padded);
        for (Eigen::Index q = 0; q < m; ++q)
            out(q, c) = fine[q] * Real(factor) * std::polar(Real(1), band_start * (first + Real(q) * h / Real(factor)));
    }
    return out;
}

}  // namespace detail

template <typename Real>
Wavefunction1D<Real> to_momentum(const Wavefunction1D<Real>& psi) {
    if (psi.representation() != Representation::position)
        throw std::invalid_argument("to_momentum: state is already in momentum representation");
    detail::require_normalized(psi.norm(), "to_momentum");
    Eigen::FFT<Real> fft;
    return Wavefunction1D<Real>(psi.grid(), detail::forward_axis(fft, psi.grid(), psi.amps()),
                                psi.time(), Representation::momentum);
}

template <typename Real>
Wavefunction1D<Real> to_position(const Wavefunction1D<Real>& phi) {
    if (phi.representation() != Representation::momentum)
        throw std::invalid_argument("to_position: state is already in position representation");
    detail::require_normalized(phi.norm(), "to_position");
    Eigen::FFT<Real> fft;
    return Wavefunction1D<Real>(phi.grid(), detail::inverse_axis(fft, phi.grid(), phi.amps()),
                                phi.time(), Representation::position);
}

/// Fourier transform along a single axis (1 or 2), which must currently be in
/// position representation.
template <typename Real>
MixedWavefunction2D<Real> partial_to_momentum(const Wavefunction2D<Real>& psi, int axis) {
    if (axis != 1 && axis != 2)
        throw std::invalid_argument("partial_to_momentum: axis must be 1 or 2, got " +
                                    std::to_string(axis));
    if (psi.representation(axis) != Representation::position)
        throw std::invalid_argument("partial_to_momentum: axis " + std::to_string(axis) +
                                    " is already in momentum representation");
    detail::require_normalized(psi.norm(), "partial_to_momentum");
    auto reps = psi.representations();
    reps[axis - 1] = Representation::momentum;
    return MixedWavefunction2D<Real>(psi.grid1(), psi.grid2(),
                                     detail::transform_axis(psi.amps(), psi.grid(axis), axis, true),
                                     psi.time(), reps);
}

template <typename Real>
Wavefunction2D<Real> partial_to_position(const Wavefunction2D<Real>& psi, int axis) {
    if (axis != 1 && axis != 2)
        throw std::invalid_argument("partial_to_position: axis must be 1 or 2");
    if (psi.representation(axis) != Representation::momentum)
        throw std::invalid_argument("partial_to_position: axis is already in position representation");
    detail::require_normalized(psi.norm(), "partial_to_position");
    auto reps = psi.representations();
    reps[axis - 1] = Representation::position;
    return Wavefunction2D<Real>(psi.grid1(), psi.grid2(),
                                detail::transform_axis(psi.amps(), psi.grid(axis), axis, false),
                                psi.time(), reps);
}

/// Full transform of every position-representation axis.
template <typename Real>
Wavefunction2D<Real> to_momentum(const Wavefunction2D<Real>& psi) {
    Wavefunction2D<Real> out = psi;
    for (int axis : {1, 2})
        if (out.representation(axis) == Representation::position)
            out = partial_to_momentum(out, axis);
    return out;
}

/// dS/dx on the grid, with a mask of the points where it is defined.
/// |psi|^2 of a 2D state on a mesh `factor` times finer per axis, from the
/// trigonometric interpolant of the amplitudes. Axis a is rows, b columns.
template <typename Real>
struct RefinedDensity2D {
    RealMatrix<Real> values;
    Real a0, ha, b0, hb;
};

template <typename Real>
RefinedDensity2D<Real> refined_density(const Wavefunction2D<Real>& psi, int factor) {
    if (factor < 1) throw std::invalid_argument("refined_density: factor must be positive");
    const auto& g1 = psi.grid1();
    const auto& g2 = psi.grid2();
    const auto r1 = psi.representation(1), r2 = psi.representation(2);
    const Real a0 = psi.axis(1)[0], b0 = psi.axis(2)[0], h1 = psi.spacing(1), h2 = psi.spacing(2);
    const ComplexMatrix<Real> rows =
        detail::interpolate_columns<Real>(psi.amps(), a0, h1, detail::band_start(g1, r1), factor);
    const ComplexMatrix<Real> both =
        detail::interpolate_columns<Real>(rows.transpose(), b0, h2, detail::band_start(g2, r2), factor);
    return {both.transpose().cwiseAbs2(), a0, h1 / Real(factor), b0, h2 / Real(factor)};
}

template <typename Real>
struct PhaseGradient {
    RealVector<Real> values;  // NaN where undefined
    Mask defined;
};

namespace detail {

// d/dx by multiplication with i p in Fourier space; exact for band-limited
// data. The unpaired Nyquist mode is dropped.
template <typename Real>
ComplexVector<Real> spectral_derivative(const ComplexVector<Real>& f, Real dx) {
    const Eigen::Index n = f.size();
    const Real dp = Real(2) * pi_v<Real> / (Real(n) * dx);
    Eigen::FFT<Real> fft;
    ComplexVector<Real> spec(n), out(n);
    fft.fwd(spec, f);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Real p = k < n / 2 ? Real(k) * dp : k == n / 2 ? Real(0) : Real(k - n) * dp;
        spec[k] *= std::complex<Real>(0, p);
    }
    fft.inv(out, spec);
    return out;
}

}  // namespace detail

/// Im(psi* d_x psi) / |psi|^2, i.e. dS/dx for psi = R exp(iS). Points with
/// |psi|^2 below the node floor are flagged, not thrown.
template <typename Real>
PhaseGradient<Real> phase_gradient(const Wavefunction1D<Real>& psi) {
    if (psi.representation() != Representation::position)
        throw std::invalid_argument("phase_gradient: state must be in position representation");
    detail::require_normalized(psi.norm(), "phase_gradient");
    const ComplexVector<Real>& a = psi.amps();
    const ComplexVector<Real> d = detail::spectral_derivative(a, psi.grid().dx());
    const RealVector<Real> rho = a.cwiseAbs2();
    const Real floor = Real(kNodeFloorRelative) * rho.maxCoeff();

    PhaseGradient<Real> out{RealVector<Real>(a.size()), Mask(a.size())};
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        out.defined[j] = rho[j] >= floor && rho[j] > Real(0);
        out.values[j] = out.defined[j] ? (std::conj(a[j]) * d[j]).imag() / rho[j]
                                       : std::numeric_limits<Real>::quiet_NaN();
    }
    return out;
}

}  // namespace cqm
