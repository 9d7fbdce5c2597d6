#pragma once

// Split-step spectral Schrodinger propagation, Strang kinetic-potential-kinetic.
// The box is periodic; a monitor aborts the run if density reaches the edges.

#include "cqm/grid.hpp"

#include <variant>
#include <vector>

namespace cqm {

struct FreePotential {};

/// m omega^2 (x - center)^2 / 2
struct HarmonicPotential {
    double mass = 1.0;
    double omega = 1.0;
    double center = 0.0;
};

/// Rectangular barrier of the given height on |x - center| <= half_width.
struct BarrierPotential {
    double height = 1.0;
    double half_width = 0.5;
    double center = 0.0;
};

struct TabulatedPotential {
    std::vector<double> values;
};

using Potential = std::variant<FreePotential, HarmonicPotential, BarrierPotential, TabulatedPotential>;

template <typename Real>
RealVector<Real> sample_potential(const Potential& v, const SpatialGrid1D<Real>& grid) {
    const Eigen::Index n = grid.size();
    RealVector<Real> out = RealVector<Real>::Zero(n);
    if (const auto* h = std::get_if<HarmonicPotential>(&v)) {
        if (!(h->mass > 0.0) || !(h->omega > 0.0))
            throw std::invalid_argument("potential: harmonic mass and omega must be positive");
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = static_cast<double>(grid.x(j)) - h->center;
            out[j] = static_cast<Real>(0.5 * h->mass * h->omega * h->omega * d * d);
        }
    } else if (const auto* b = std::get_if<BarrierPotential>(&v)) {
        if (!(b->half_width >= 0.0) || !std::isfinite(b->height))
            throw std::invalid_argument("potential: barrier needs finite height and half_width >= 0");
        for (Eigen::Index j = 0; j < n; ++j)
            if (std::abs(static_cast<double>(grid.x(j)) - b->center) <= b->half_width)
                out[j] = static_cast<Real>(b->height);
    } else if (const auto* t = std::get_if<TabulatedPotential>(&v)) {
        if (static_cast<Eigen::Index>(t->values.size()) != n)
            throw std::invalid_argument("potential: tabulated length " +
                                        std::to_string(t->values.size()) +
                                        " does not match grid size " + std::to_string(n));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!std::isfinite(t->values[j]))
                throw std::invalid_argument("potential: tabulated value at index " +
                                            std::to_string(j) + " is not finite");
            out[j] = static_cast<Real>(t->values[j]);
        }
    }
    return out;
}

/// Mass allowed in the outer 1/32 of the box on either side before a run aborts.
inline constexpr double kEdgeMassThreshold = 1e-8;

namespace detail {

template <typename Real>
Eigen::Index edge_band(Eigen::Index n) {
    return std::max<Eigen::Index>(1, n / 32);
}

// Angular frequency of raw FFT bin k.
template <typename Real>
Real fft_momentum(const SpatialGrid1D<Real>& g, Eigen::Index k) {
    const Eigen::Index n = g.size();
    return g.dp() * Real(k < n / 2 ? k : k - n);
}

template <typename Real>
ComplexVector<Real> kinetic_phase(const SpatialGrid1D<Real>& g, Real mass, Real tau) {
    ComplexVector<Real> out(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        const Real p = fft_momentum(g, k);
        out[k] = std::polar(Real(1), -p * p / (Real(2) * mass) * tau);
    }
    return out;
}

}  // namespace detail

template <typename Real>
class Propagator {
public:
    Propagator(SpatialGrid1D<Real> grid, const Potential& potential, Real mass, Real dt)
        : grid_(std::move(grid)), mass_(mass), dt_(dt) {
        if (!(mass > Real(0))) throw std::invalid_argument("propagate: mass must be positive");
        if (!(dt > Real(0)) || !std::isfinite(dt))
            throw std::invalid_argument("propagate: dt must be positive");
        const RealVector<Real> v = sample_potential(potential, grid_);
        potential_phase_.resize(v.size());
        for (Eigen::Index j = 0; j < v.size(); ++j) potential_phase_[j] = std::polar(Real(1), -v[j] * dt);
        half_kinetic_ = detail::kinetic_phase(grid_, mass, dt / Real(2));
        full_kinetic_ = detail::kinetic_phase(grid_, mass, dt);
    }

    /// dt <= m dx^2 / 2; advisory only.
    bool within_stability_heuristic() const {
        return dt_ <= Real(0.5) * mass_ * grid_.dx() * grid_.dx();
    }

    Real dt() const noexcept { return dt_; }
    Real mass() const noexcept { return mass_; }

    /// Advances `steps` Strang steps. `first_step` only labels diagnostics.
    Wavefunction1D<Real> advance(const Wavefunction1D<Real>& psi, long steps, long first_step = 0) {
        if (psi.representation() != Representation::position)
            throw std::invalid_argument("propagate: state must be in position representation");
        if (!(psi.grid() == grid_)) throw std::invalid_argument("propagate: grid mismatch");
        if (steps < 0) throw std::invalid_argument("propagate: negative step count");
        detail::require_normalized(psi.norm(), "propagate");
        if (steps == 0) return psi;

        ComplexVector<Real> a = psi.amps();
        ComplexVector<Real> spec(a.size());
        fft_.fwd(spec, a);
        spec.array() *= half_kinetic_.array();
        for (long s = 0; s < steps; ++s) {
            fft_.inv(a, spec);
            a.array() *= potential_phase_.array();
            check(a, first_step + s + 1);
            fft_.fwd(spec, a);
            spec.array() *= (s + 1 == steps ? half_kinetic_ : full_kinetic_).array();
        }
        fft_.inv(a, spec);
        check(a, first_step + steps);
        return Wavefunction1D<Real>(grid_, std::move(a), psi.time() + Real(steps) * dt_);
    }

private:
    void check(const ComplexVector<Real>& a, long step) const {
        if (!a.allFinite()) throw NumericalError("propagate: non-finite amplitude", step);
        const Eigen::Index n = a.size(), band = detail::edge_band<Real>(n);
        const Real edge = (a.head(band).squaredNorm() + a.tail(band).squaredNorm()) * grid_.dx();
        if (edge > Real(kEdgeMassThreshold))
            throw NumericalError("propagate: density reached the box edge (edge mass " +
                                     std::to_string(static_cast<double>(edge)) + ")",
                                 step);
    }

    SpatialGrid1D<Real> grid_;
    Real mass_;
    Real dt_;
    ComplexVector<Real> potential_phase_;
    ComplexVector<Real> half_kinetic_;
    ComplexVector<Real> full_kinetic_;
    Eigen::FFT<Real> fft_;
};

template <typename Real>
Wavefunction1D<Real> propagate(const Wavefunction1D<Real>& psi, const Potential& v, Real mass,
                               Real dt, long steps) {
    Propagator<Real> prop(psi.grid(), v, mass, dt);
    return prop.advance(psi, steps);
}

/// 2D Strang propagation for V(x1, x2) = V1(x1) + V2(x2).
template <typename Real>
Wavefunction2D<Real> propagate(const Wavefunction2D<Real>& psi, const Potential& v1,
                               const Potential& v2, Real mass, Real dt, long steps) {
    if (psi.representation(1) != Representation::position ||
        psi.representation(2) != Representation::position)
        throw std::invalid_argument("propagate: 2D state must be in position representation");
    if (!(mass > Real(0))) throw std::invalid_argument("propagate: mass must be positive");
    if (!(dt > Real(0))) throw std::invalid_argument("propagate: dt must be positive");
    detail::require_normalized(psi.norm(), "propagate");

    const auto& g1 = psi.grid1();
    const auto& g2 = psi.grid2();
    const RealVector<Real> p1 = sample_potential(v1, g1), p2 = sample_potential(v2, g2);
    ComplexMatrix<Real> vphase(g1.size(), g2.size()), khalf(g1.size(), g2.size());
    for (Eigen::Index c = 0; c < g2.size(); ++c)
        for (Eigen::Index r = 0; r < g1.size(); ++r) {
            vphase(r, c) = std::polar(Real(1), -(p1[r] + p2[c]) * dt);
            const Real k1 = detail::fft_momentum(g1, r), k2 = detail::fft_momentum(g2, c);
            khalf(r, c) = std::polar(Real(1), -(k1 * k1 + k2 * k2) / (Real(2) * mass) * dt / Real(2));
        }

    Eigen::FFT<Real> fft1, fft2;
    auto fft2d = [&](ComplexMatrix<Real>& m, bool forward) {
        ComplexVector<Real> in, out;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            in = m.col(c);
            forward ? fft1.fwd(out, in) : fft1.inv(out, in);
            m.col(c) = out;
        }
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            in = m.row(r).transpose();
            forward ? fft2.fwd(out, in) : fft2.inv(out, in);
            m.row(r) = out.transpose();
        }
    };

    ComplexMatrix<Real> a = psi.amps();
    const Eigen::Index b1 = detail::edge_band<Real>(g1.size()), b2 = detail::edge_band<Real>(g2.size());
    for (long s = 0; s < steps; ++s) {
        fft2d(a, true);
        a.array() *= khalf.array();
        fft2d(a, false);
        a.array() *= vphase.array();
        fft2d(a, true);
        a.array() *= khalf.array();
        fft2d(a, false);
        if (!a.allFinite()) throw NumericalError("propagate: non-finite amplitude", s + 1);
        const Real edge = (a.topRows(b1).squaredNorm() + a.bottomRows(b1).squaredNorm() +
                           a.leftCols(b2).squaredNorm() + a.rightCols(b2).squaredNorm()) *
                          g1.dx() * g2.dx();
        if (edge > Real(kEdgeMassThreshold))
            throw NumericalError("propagate: density reached the box edge", s + 1);
    }
    return Wavefunction2D<Real>(g1, g2, std::move(a), psi.time() + Real(steps) * dt);
}

}  // namespace cqm
