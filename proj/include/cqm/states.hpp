#pragma once

// Analytic initial states. Every builder returns a state normalized on the grid
// it was sampled on.

#include "cqm/grid.hpp"

#include <variant>
#include <vector>

namespace cqm {

/// exp(-(x - x0)^2 / (4 sigma^2) + i p0 x); sigma is the position standard deviation.
struct Gaussian {
    double x0 = 0.0;
    double p0 = 0.0;
    double sigma = 1.0;
};

struct GaussianTerm {
    std::complex<double> weight{1.0, 0.0};
    Gaussian gaussian;
};

/// Weighted sum of Gaussians, normalized after summation.
struct Superposition {
    std::vector<GaussianTerm> terms;
};

/// k-th eigenstate of the oscillator V = m omega^2 x^2 / 2, centered at 0.
struct HarmonicEigenstate {
    int k = 0;
    double omega = 1.0;
    double mass = 1.0;
};

/// Bivariate Gaussian whose |psi|^2 has standard deviations sigma and correlation r.
struct Gaussian2D {
    std::array<double, 2> x0{0.0, 0.0};
    std::array<double, 2> p0{0.0, 0.0};
    std::array<double, 2> sigma{1.0, 1.0};
    double correlation = 0.0;
};

struct Gaussian2DTerm {
    std::complex<double> weight{1.0, 0.0};
    Gaussian2D gaussian;
};

struct Superposition2D {
    std::vector<Gaussian2DTerm> terms;
};

using StateSpec = std::variant<Gaussian, Superposition, HarmonicEigenstate, Gaussian2D, Superposition2D>;

inline bool is_two_dimensional(const StateSpec& s) {
    return std::holds_alternative<Gaussian2D>(s) || std::holds_alternative<Superposition2D>(s);
}

/// Fraction of the peak density allowed on the outermost grid points.
inline constexpr double kBoundaryDensityRelative = 1e-12;

namespace detail {

inline void validate(const Gaussian& g) {
    if (!(g.sigma > 0.0) || !std::isfinite(g.sigma))
        throw std::invalid_argument("state: gaussian sigma must be positive");
    if (!std::isfinite(g.x0) || !std::isfinite(g.p0))
        throw std::invalid_argument("state: gaussian x0/p0 must be finite");
}

inline void validate(const Gaussian2D& g) {
    for (int a = 0; a < 2; ++a) {
        if (!(g.sigma[a] > 0.0) || !std::isfinite(g.sigma[a]))
            throw std::invalid_argument("state: gaussian2d sigma must be positive");
        if (!std::isfinite(g.x0[a]) || !std::isfinite(g.p0[a]))
            throw std::invalid_argument("state: gaussian2d x0/p0 must be finite");
    }
    if (!(std::abs(g.correlation) < 1.0))
        throw std::invalid_argument("state: gaussian2d correlation must satisfy |r| < 1");
}

template <typename Real>
std::complex<Real> gaussian_amplitude(const Gaussian& g, Real x) {
    const double d = static_cast<double>(x) - g.x0;
    const double norm = std::pow(2.0 * std::numbers::pi * g.sigma * g.sigma, -0.25);
    return std::complex<Real>(std::polar(norm * std::exp(-d * d / (4.0 * g.sigma * g.sigma)),
                                         g.p0 * static_cast<double>(x)));
}

template <typename Real>
std::complex<Real> gaussian2d_amplitude(const Gaussian2D& g, Real x1, Real x2) {
    const double s1 = g.sigma[0], s2 = g.sigma[1], r = g.correlation;
    const double d1 = static_cast<double>(x1) - g.x0[0];
    const double d2 = static_cast<double>(x2) - g.x0[1];
    const double q = (d1 * d1 / (s1 * s1) - 2.0 * r * d1 * d2 / (s1 * s2) + d2 * d2 / (s2 * s2)) /
                     (1.0 - r * r);
    const double norm = std::pow(4.0 * std::numbers::pi * std::numbers::pi * s1 * s1 * s2 * s2 *
                                     (1.0 - r * r),
                                 -0.25);
    const double phase = g.p0[0] * static_cast<double>(x1) + g.p0[1] * static_cast<double>(x2);
    return std::complex<Real>(std::polar(norm * std::exp(-q / 4.0), phase));
}

// Normalized Hermite functions by the stable three-term recurrence.
template <typename Real>
Real harmonic_amplitude(const HarmonicEigenstate& h, Real x) {
    const double xi = std::sqrt(h.mass * h.omega) * static_cast<double>(x);
    double prev = 0.0;
    double cur = std::pow(h.mass * h.omega / std::numbers::pi, 0.25) * std::exp(-xi * xi / 2.0);
    for (int k = 0; k < h.k; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * xi * cur - std::sqrt(double(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return static_cast<Real>(cur);
}

template <typename Real>
void check_boundary(const RealVector<Real>& edge, Real peak, const char* what) {
    const Real worst = edge.maxCoeff();
    if (worst > Real(kBoundaryDensityRelative) * peak)
        throw std::invalid_argument(std::string("state: ") + what +
                                    " density touches the grid boundary (edge/peak = " +
                                    std::to_string(static_cast<double>(worst / peak)) +
                                    "); widen the grid");
}

}  // namespace detail

template <typename Real>
Wavefunction1D<Real> build(const StateSpec& spec, const SpatialGrid1D<Real>& grid) {
    const Eigen::Index n = grid.size();
    ComplexVector<Real> amps = ComplexVector<Real>::Zero(n);

    if (const auto* g = std::get_if<Gaussian>(&spec)) {
        detail::validate(*g);
        for (Eigen::Index j = 0; j < n; ++j) amps[j] = detail::gaussian_amplitude(*g, grid.x(j));
    } else if (const auto* s = std::get_if<Superposition>(&spec)) {
        if (s->terms.empty()) throw std::invalid_argument("state: superposition has no terms");
        for (const auto& term : s->terms) {
            detail::validate(term.gaussian);
            const std::complex<Real> w(term.weight);
            for (Eigen::Index j = 0; j < n; ++j)
                amps[j] += w * detail::gaussian_amplitude(term.gaussian, grid.x(j));
        }
    } else if (const auto* h = std::get_if<HarmonicEigenstate>(&spec)) {
        if (h->k < 0) throw std::invalid_argument("state: harmonic eigenstate index must be >= 0");
        if (!(h->omega > 0.0) || !(h->mass > 0.0))
            throw std::invalid_argument("state: harmonic omega and mass must be positive");
        for (Eigen::Index j = 0; j < n; ++j) amps[j] = detail::harmonic_amplitude(*h, grid.x(j));
    } else {
        throw std::invalid_argument("state: two-dimensional spec used with a 1D grid");
    }

    const RealVector<Real> rho = amps.cwiseAbs2();
    const Real peak = rho.maxCoeff();
    if (!(peak > Real(0))) throw std::invalid_argument("state: amplitude vanishes on the grid");
    RealVector<Real> edge(2);
    edge << rho[0], rho[n - 1];
    detail::check_boundary(edge, peak, "1D");
    return Wavefunction1D<Real>::normalized(grid, std::move(amps), Real(0));
}

template <typename Real>
Wavefunction2D<Real> build(const StateSpec& spec, const SpatialGrid1D<Real>& grid1,
                           const SpatialGrid1D<Real>& grid2) {
    const Eigen::Index n1 = grid1.size(), n2 = grid2.size();
    ComplexMatrix<Real> amps = ComplexMatrix<Real>::Zero(n1, n2);

    auto accumulate = [&](const Gaussian2D& g, std::complex<Real> w) {
        detail::validate(g);
        for (Eigen::Index c = 0; c < n2; ++c)
            for (Eigen::Index r = 0; r < n1; ++r)
                amps(r, c) += w * detail::gaussian2d_amplitude(g, grid1.x(r), grid2.x(c));
    };

    if (const auto* g = std::get_if<Gaussian2D>(&spec)) {
        accumulate(*g, std::complex<Real>(1));
    } else if (const auto* s = std::get_if<Superposition2D>(&spec)) {
        if (s->terms.empty()) throw std::invalid_argument("state: superposition has no terms");
        for (const auto& term : s->terms) accumulate(term.gaussian, std::complex<Real>(term.weight));
    } else {
        throw std::invalid_argument("state: one-dimensional spec used with 2D grids");
    }

    const RealMatrix<Real> rho = amps.cwiseAbs2();
    const Real peak = rho.maxCoeff();
    if (!(peak > Real(0))) throw std::invalid_argument("state: amplitude vanishes on the grid");
    RealVector<Real> edge(4);
    edge << rho.row(0).maxCoeff(), rho.row(n1 - 1).maxCoeff(), rho.col(0).maxCoeff(),
        rho.col(n2 - 1).maxCoeff();
    detail::check_boundary(edge, peak, "2D");
    return Wavefunction2D<Real>::normalized(grid1, grid2, std::move(amps), Real(0));
}

}  // namespace cqm
