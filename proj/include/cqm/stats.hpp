#pragma once

// Distribution comparison metrics.

#include "cqm/grid.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace cqm {

struct ComparisonReport {
    std::string name;
    double ks = 0.0;                 // sup distance, in [0, 1]
    double l1 = 0.0;                 // integrated |a - b|, in [0, 2]
    std::size_t n_samples = 0;
    std::string bins;                // description of the binning / grid used
};

/// sup_x |F_emp(x) - F_ref(x)|, both one-sided gaps checked at every sorted sample.
template <typename Real, typename Cdf>
Real ks_distance(std::span<const Real> samples, Cdf&& reference) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
    std::vector<Real> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const Real n = Real(s.size());
    Real d = Real(0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Real f = static_cast<Real>(reference(s[i]));
        d = std::max({d, Real(i + 1) / n - f, f - Real(i) / n});
    }
    return d;
}

template <typename Real, typename Cdf>
Real ks_distance(const std::vector<Real>& samples, Cdf&& reference) {
    return ks_distance(std::span<const Real>(samples), std::forward<Cdf>(reference));
}

template <typename Real>
Real l1_distance(const RealVector<Real>& a, const RealVector<Real>& b, Real spacing) {
    if (a.size() != b.size())
        throw std::invalid_argument("l1_distance: grids differ (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + " points)");
    return (a - b).cwiseAbs().sum() * spacing;
}

/// CDF of the piecewise-constant density that puts mass rho(i, j) h_a h_b on
/// each grid cell; rows are axis a, columns axis b.
template <typename Real>
class GridCdf2D {
public:
    GridCdf2D(const RealMatrix<Real>& density, Real a0, Real ha, Real b0, Real hb)
        : a_lo_(a0 - ha / Real(2)), ha_(ha), b_lo_(b0 - hb / Real(2)), hb_(hb) {
        if ((density.array() < Real(0)).any() || !density.allFinite())
            throw std::invalid_argument("GridCdf2D: density must be finite and nonnegative");
        const Eigen::Index na = density.rows(), nb = density.cols();
        table_ = RealMatrix<Real>::Zero(na + 1, nb + 1);
        for (Eigen::Index i = 0; i < na; ++i)
            for (Eigen::Index j = 0; j < nb; ++j)
                table_(i + 1, j + 1) = density(i, j) + table_(i, j + 1) + table_(i + 1, j) - table_(i, j);
        const Real total = table_(na, nb);
        if (!(total > Real(0))) throw std::invalid_argument("GridCdf2D: zero density");
        table_ /= total;
    }

    Real operator()(Real a, Real b) const {
        const auto [ia, ta] = locate(a, a_lo_, ha_, table_.rows() - 1);
        const auto [ib, tb] = locate(b, b_lo_, hb_, table_.cols() - 1);
        const Real c00 = table_(ia, ib), c10 = table_(ia + 1, ib);
        const Real c01 = table_(ia, ib + 1), c11 = table_(ia + 1, ib + 1);
        return (Real(1) - ta) * ((Real(1) - tb) * c00 + tb * c01) + ta * ((Real(1) - tb) * c10 + tb * c11);
    }

    Real marginal_a(Real a) const { return (*this)(a, std::numeric_limits<Real>::infinity()); }
    Real marginal_b(Real b) const { return (*this)(std::numeric_limits<Real>::infinity(), b); }

private:
    // cell index (clamped) and fractional offset inside it
    static std::pair<Eigen::Index, Real> locate(Real v, Real lo, Real h, Eigen::Index cells) {
        const Real s = (v - lo) / h;
        if (!(s > Real(0))) return {0, Real(0)};
        if (s >= Real(cells)) return {cells - 1, Real(1)};
        const auto i = static_cast<Eigen::Index>(s);
        return {i, s - Real(i)};
    }

    RealMatrix<Real> table_;
    Real a_lo_, ha_, b_lo_, hb_;
};

/// Reference CDF for a 2D state's density in its current representation,
/// built on the spectrally refined mesh.
template <typename Real>
GridCdf2D<Real> grid_cdf(const Wavefunction2D<Real>& psi, int refine = 4) {
    const auto d = refined_density(psi, refine);
    return GridCdf2D<Real>(d.values, d.a0, d.ha, d.b0, d.hb);
}

/// Two-dimensional KS distance (Fasano-Franceschini): at every sample point the
/// four quadrant fractions are compared with the reference. Counts come from a
/// sweep over the samples sorted by the first axis with a Fenwick tree over the
/// ranks of the second axis.
template <typename Real, typename Cdf2>
Real ks_distance_2d(std::span<const std::pair<Real, Real>> pts, const Cdf2& reference) {
    const std::size_t n = pts.size();
    if (n == 0) throw std::invalid_argument("ks_distance_2d: no samples");

    std::vector<Real> bs(n);
    for (std::size_t i = 0; i < n; ++i) bs[i] = pts[i].second;
    std::vector<Real> b_sorted = bs;
    std::sort(b_sorted.begin(), b_sorted.end());
    auto count_b_le = [&](Real b) {
        return std::size_t(std::upper_bound(b_sorted.begin(), b_sorted.end(), b) - b_sorted.begin());
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return pts[l].first < pts[r].first; });

    std::vector<std::size_t> fenwick(n + 1, 0);
    auto add = [&](std::size_t rank) {
        for (std::size_t i = rank; i <= n; i += i & (~i + 1)) ++fenwick[i];
    };
    auto prefix = [&](std::size_t rank) {
        std::size_t s = 0;
        for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) s += fenwick[i];
        return s;
    };

    const Real inv_n = Real(1) / Real(n);
    Real d = Real(0);
    std::size_t pos = 0;
    while (pos < n) {
        // insert every sample sharing this first-axis value before querying
        std::size_t end = pos;
        const Real a = pts[order[pos]].first;
        while (end < n && pts[order[end]].first == a) add(count_b_le(pts[order[end++]].second));
        const std::size_t count_a = end;
        const Real fa = static_cast<Real>(reference(a, std::numeric_limits<Real>::infinity()));
        for (std::size_t q = pos; q < end; ++q) {
            const Real b = pts[order[q]].second;
            const std::size_t cb = count_b_le(b);
            const std::size_t ll = prefix(cb);
            const Real f = static_cast<Real>(reference(a, b));
            const Real fb = static_cast<Real>(reference(std::numeric_limits<Real>::infinity(), b));
            const Real e_ll = Real(ll) * inv_n;
            const Real e_ul = Real(count_a - ll) * inv_n;
            const Real e_lr = Real(cb - ll) * inv_n;
            const Real e_ur = Real(1) - e_ll - e_ul - e_lr;
            d = std::max({d, std::abs(e_ll - f), std::abs(e_ul - (fa - f)), std::abs(e_lr - (fb - f)),
                          std::abs(e_ur - (Real(1) - fa - fb + f))});
        }
        pos = end;
    }
    return d;
}

template <typename Real, typename Cdf2>
Real ks_distance_2d(const std::vector<std::pair<Real, Real>>& pts, const Cdf2& reference) {
    return ks_distance_2d(std::span<const std::pair<Real, Real>>(pts), reference);
}

}  // namespace cqm
