#pragma once

// Wigner quasi-distribution on the n x n (x_j, p_k) grid of a 1D state.

#include "cqm/grid.hpp"

namespace cqm {

template <typename Real>
struct WignerGrid {
    SpatialGrid1D<Real> grid;
    RealMatrix<Real> values;     // rows x_j, columns p_k
    Real max_imaginary = Real(0);  // largest discarded imaginary part

    Real integral() const { return values.sum() * grid.dx() * grid.dp(); }
};

namespace detail {

// Band-limited interpolation onto the grid with spacing dx/2 (2n points):
// sample j of the input becomes sample 2j of the output.
template <typename Real>
ComplexVector<Real> refine_twice(const ComplexVector<Real>& a) {
    const Eigen::Index n = a.size();
    Eigen::FFT<Real> fft;
    ComplexVector<Real> spec(n);
    fft.fwd(spec, a);
    ComplexVector<Real> padded = ComplexVector<Real>::Zero(2 * n);
    for (Eigen::Index k = 0; k < n / 2; ++k) padded[k] = spec[k];
    for (Eigen::Index k = n / 2 + 1; k < n; ++k) padded[n + k] = spec[k];
    // split the Nyquist bin between +-n/2 so the result stays real for real input
    padded[n / 2] = spec[n / 2] / Real(2);
    padded[n + n / 2] = spec[n / 2] / Real(2);
    ComplexVector<Real> out(2 * n);
    fft.inv(out, padded);
    return out * Real(2);
}

}  // namespace detail

/// W(x, p) = (1/2pi) int psi*(x + y/2) psi(x - y/2) exp(i p y) dy with the
/// relative coordinate y = s dx, s in [-n/2, n/2], on the periodic box.
template <typename Real>
WignerGrid<Real> wigner(const Wavefunction1D<Real>& psi) {
    if (psi.representation() != Representation::position)
        throw std::invalid_argument("wigner: state must be in position representation");
    detail::require_normalized(psi.norm(), "wigner");
    const auto& g = psi.grid();
    const Eigen::Index n = g.size(), n2 = 2 * n, half = n / 2;
    const ComplexVector<Real> fine = detail::refine_twice(psi.amps());

    WignerGrid<Real> w{g, RealMatrix<Real>(n, n), Real(0)};
    Eigen::FFT<Real> fft;
    ComplexVector<Real> f(n), out(n);
    const Real scale = g.dx() / (Real(2) * pi_v<Real>) * Real(n);
    const Real sign_half = (half % 2 == 0) ? Real(1) : Real(-1);
    auto at = [&](Eigen::Index m) { return fine[((m % n2) + n2) % n2]; };
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index q = 0; q < n; ++q) {
            const Eigen::Index s = q - half;
            std::complex<Real> v = std::conj(at(2 * j + s)) * at(2 * j - s);
            if (q == 0) v = (v + std::conj(at(2 * j - s)) * at(2 * j + s)) / Real(2);  // s = +-n/2 share a phase
            f[q] = (q % 2 == 0) ? v : -v;
        }
        fft.inv(out, f);  // (1/n) sum_q f_q exp(+2 pi i k q / n)
        for (Eigen::Index k = 0; k < n; ++k) {
            const std::complex<Real> value = out[k] * scale * ((k % 2 == 0) ? sign_half : -sign_half);
            w.values(j, k) = value.real();
            w.max_imaginary = std::max(w.max_imaginary, std::abs(value.imag()));
        }
    }
    return w;
}

/// Integrals over p (giving a density in x) and over x (a density in p).
template <typename Real>
std::pair<RealVector<Real>, RealVector<Real>> wigner_marginals(const WignerGrid<Real>& w) {
    return {w.values.rowwise().sum() * w.grid.dp(), w.values.colwise().sum().transpose() * w.grid.dx()};
}

template <typename Real>
struct WignerMinimum {
    Real value;
    Real x;
    Real p;
};

template <typename Real>
WignerMinimum<Real> min_value(const WignerGrid<Real>& w) {
    Eigen::Index j = 0, k = 0;
    const Real v = w.values.minCoeff(&j, &k);
    return {v, w.grid.x(j), w.grid.p(k)};
}

}  // namespace cqm
