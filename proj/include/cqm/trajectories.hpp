#pragma once

// dBB trajectories: velocity snapshots, RK4 ensemble transport, causal
// momentum assignment through the monotone map, and the gauge field
// A = m v - p_hat.

#include "cqm/transport.hpp"

#include <numeric>
#include <vector>

namespace cqm {

/// v(x, t) = (dS/dx) / m tabulated on the grid at each snapshot time.
template <typename Real>
struct VelocityField {
    SpatialGrid1D<Real> grid;
    std::vector<Real> times;
    std::vector<RealVector<Real>> values;  // NaN where undefined
    std::vector<Mask> defined;
    Real mass;

    std::size_t snapshots() const noexcept { return times.size(); }

    /// Index of the snapshot at time t, if any (relative tolerance 1e-9).
    std::optional<std::size_t> find_time(Real t) const {
        for (std::size_t k = 0; k < times.size(); ++k)
            if (std::abs(times[k] - t) <= Real(1e-9) * std::max(Real(1), std::abs(t))) return k;
        return std::nullopt;
    }
};

template <typename Real>
VelocityField<Real> dbb_velocity_field(const std::vector<Wavefunction1D<Real>>& snapshots, Real mass) {
    if (snapshots.empty()) throw std::invalid_argument("dbb_velocity_field: no snapshots");
    if (!(mass > Real(0))) throw std::invalid_argument("dbb_velocity_field: mass must be positive");
    VelocityField<Real> f{snapshots.front().grid(), {}, {}, {}, mass};
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const auto& psi = snapshots[k];
        if (!(psi.grid() == f.grid)) throw std::invalid_argument("dbb_velocity_field: snapshots on different grids");
        if (k > 0 && !(psi.time() > f.times.back()))
            throw std::invalid_argument("dbb_velocity_field: snapshot times must increase strictly");
        auto g = phase_gradient(psi);
        f.times.push_back(psi.time());
        f.values.push_back(g.values / mass);
        f.defined.push_back(std::move(g.defined));
    }
    return f;
}

/// Positions (and, once assigned, momenta) of N system points at each recorded time.
template <typename Real>
struct TrajectoryEnsemble {
    std::vector<Real> times;
    std::vector<RealVector<Real>> positions;  // one vector of N per recorded time
    std::vector<RealVector<Real>> momenta;    // empty until assign_momenta
    Mask flagged;                             // entered a node region or left the grid
    std::size_t flagged_count = 0;
    std::size_t ordering_violations = 0;      // adjacent pairs that swapped during integration
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(flagged.size()); }

    /// Values at time index k of the trajectories that were not flagged.
    std::vector<Real> valid(const std::vector<RealVector<Real>>& table, std::size_t k) const {
        std::vector<Real> out;
        out.reserve(size());
        for (Eigen::Index i = 0; i < flagged.size(); ++i)
            if (!flagged[i]) out.push_back(table.at(k)[i]);
        return out;
    }
};

/// Inverse-CDF sampling; sample i depends only on (seed, i).
template <typename Real>
RealVector<Real> sample_positions(const CumulativeDistribution<Real>& cdf, std::size_t n, std::uint64_t seed) {
    RealVector<Real> out(static_cast<Eigen::Index>(n));
    const CounterStream stream(seed);
    for (std::size_t i = 0; i < n; ++i) out[Eigen::Index(i)] = cdf.quantile(static_cast<Real>(stream.uniform(i)));
    return out;
}

template <typename Real>
RealVector<Real> sample_positions(const Wavefunction1D<Real>& psi, std::size_t n, std::uint64_t seed) {
    if (psi.representation() != Representation::position)
        throw std::invalid_argument("sample_positions: state must be in position representation");
    detail::require_normalized(psi.norm(), "sample_positions");
    return sample_positions(cdf(psi), n, seed);
}

namespace detail {

// v at x for a fixed snapshot pair and weight; NaN if any support point is undefined.
template <typename Real>
Real interpolate_velocity(const VelocityField<Real>& f, std::size_t k, Real w, Real x) {
    const Real s = (x - f.grid.x_min()) / f.grid.dx();
    const Eigen::Index n = f.grid.size();
    if (!(s >= Real(0)) || !(s <= Real(n - 1))) return std::numeric_limits<Real>::quiet_NaN();
    const Eigen::Index j = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), n - 2);
    const Real a = s - Real(j);
    auto at = [&](std::size_t kk) {
        return (Real(1) - a) * f.values[kk][j] + a * f.values[kk][j + 1];
    };
    const Real v0 = at(k);
    if (w == Real(0)) return v0;
    return (Real(1) - w) * v0 + w * at(k + 1);
}

// Snapshot pair and weight for time t.
template <typename Real>
std::pair<std::size_t, Real> locate_time(const VelocityField<Real>& f, Real t) {
    const auto& ts = f.times;
    if (ts.size() == 1) return {0, Real(0)};
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t k = it == ts.begin() ? 0 : std::size_t(it - ts.begin()) - 1;
    k = std::min(k, ts.size() - 2);
    const Real w = std::clamp((t - ts[k]) / (ts[k + 1] - ts[k]), Real(0), Real(1));
    return {k, w};
}

}  // namespace detail

/// Classical RK4 through the snapshot mesh with step dt, v interpolated
/// linearly in x and t. Positions are recorded at `record_times` (every
/// snapshot time if empty), each of which must be a snapshot time.
template <typename Real>
TrajectoryEnsemble<Real> integrate(const RealVector<Real>& initial, const VelocityField<Real>& field, Real dt,
                                   std::vector<Real> record_times = {}) {
    if (!(dt > Real(0))) throw std::invalid_argument("integrate: dt must be positive");
    const auto& ts = field.times;
    if (record_times.empty()) record_times = ts;
    std::vector<bool> record(ts.size(), false);
    for (Real t : record_times) {
        const auto k = field.find_time(t);
        if (!k) throw std::invalid_argument("integrate: record time " + std::to_string(double(t)) + " is not a snapshot time");
        record[*k] = true;
    }
    std::vector<long> substeps(ts.size(), 0);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const Real r = (ts[k + 1] - ts[k]) / dt;
        const long m = std::lround(r);
        if (m < 1 || std::abs(r - Real(m)) > Real(1e-6) * r)
            throw std::invalid_argument("integrate: dt does not divide the snapshot interval starting at t = " +
                                        std::to_string(double(ts[k])));
        substeps[k] = m;
    }

    const Eigen::Index n = initial.size();
    TrajectoryEnsemble<Real> ens;
    ens.flagged = Mask::Constant(n, false);
    RealVector<Real> x = initial;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });

    auto flag_undefined = [&](Real t) {
        const auto [k, w] = detail::locate_time(field, t);
        for (Eigen::Index i = 0; i < n; ++i)
            if (!ens.flagged[i] && !std::isfinite(detail::interpolate_velocity(field, k, w, x[i]))) ens.flagged[i] = true;
    };
    auto store = [&](std::size_t k) {
        if (!record[k]) return;
        ens.times.push_back(ts[k]);
        ens.positions.push_back(x);
    };

    flag_undefined(ts.front());
    store(0);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const Real h = (ts[k + 1] - ts[k]) / Real(substeps[k]);
        for (long s = 0; s < substeps[k]; ++s) {
            const Real t0 = ts[k] + Real(s) * h;
            const auto l0 = detail::locate_time(field, t0);
            const auto lm = detail::locate_time(field, t0 + h / Real(2));
            const auto l1 = detail::locate_time(field, s + 1 == substeps[k] ? ts[k + 1] : t0 + h);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (ens.flagged[i]) continue;
                const Real xi = x[i];
                const Real k1 = detail::interpolate_velocity(field, l0.first, l0.second, xi);
                const Real k2 = detail::interpolate_velocity(field, lm.first, lm.second, xi + h / Real(2) * k1);
                const Real k3 = detail::interpolate_velocity(field, lm.first, lm.second, xi + h / Real(2) * k2);
                const Real k4 = detail::interpolate_velocity(field, l1.first, l1.second, xi + h * k3);
                const Real next = xi + h / Real(6) * (k1 + Real(2) * k2 + Real(2) * k3 + k4);
                if (!std::isfinite(next)) {
                    ens.flagged[i] = true;  // frozen where it was
                    continue;
                }
                x[i] = next;
            }
            Eigen::Index prev = -1;
            for (Eigen::Index i : order) {
                if (ens.flagged[i]) continue;
                if (prev >= 0 && x[i] < x[prev]) ++ens.ordering_violations;
                prev = i;
            }
        }
        flag_undefined(ts[k + 1]);
        store(k + 1);
    }
    ens.flagged_count = static_cast<std::size_t>(ens.flagged.count());
    return ens;
}

/// p_i(t_k) = p_hat(x_i(t_k), t_k); flagged trajectories get NaN.
template <typename Real>
TrajectoryEnsemble<Real> assign_momenta(TrajectoryEnsemble<Real> ens,
                                        const std::vector<MonotoneMomentumMap<Real>>& maps) {
    ens.momenta.clear();
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
        const Real t = ens.times[k];
        const auto it = std::find_if(maps.begin(), maps.end(), [&](const auto& m) {
            return std::abs(m.time() - t) <= Real(1e-9) * std::max(Real(1), std::abs(t));
        });
        if (it == maps.end())
            throw std::invalid_argument("assign_momenta: no map for mesh time " + std::to_string(double(t)));
        RealVector<Real> p(ens.positions[k].size());
        for (Eigen::Index i = 0; i < p.size(); ++i)
            p[i] = ens.flagged[i] ? std::numeric_limits<Real>::quiet_NaN() : (*it)(ens.positions[k][i]);
        ens.momenta.push_back(std::move(p));
    }
    return ens;
}

/// A(x, t) = m v(x, t) - p_hat(x, t) on the grid, at the times of the maps.
template <typename Real>
struct GaugeField {
    SpatialGrid1D<Real> grid;
    std::vector<Real> times;
    std::vector<RealVector<Real>> values;  // NaN where v is undefined
    std::vector<Mask> defined;
};

template <typename Real>
GaugeField<Real> gauge_field(const VelocityField<Real>& v, const std::vector<MonotoneMomentumMap<Real>>& maps) {
    GaugeField<Real> out{v.grid, {}, {}, {}};
    const RealVector<Real> xs = v.grid.positions();
    for (const auto& map : maps) {
        const auto k = v.find_time(map.time());
        if (!k) throw std::invalid_argument("gauge_field: no velocity snapshot at t = " + std::to_string(double(map.time())));
        RealVector<Real> a(xs.size());
        for (Eigen::Index j = 0; j < xs.size(); ++j)
            a[j] = v.defined[*k][j] ? v.mass * v.values[*k][j] - map(xs[j]) : std::numeric_limits<Real>::quiet_NaN();
        out.times.push_back(map.time());
        out.values.push_back(std::move(a));
        out.defined.push_back(v.defined[*k]);
    }
    return out;
}

/// p-marginal of the dBB phase-space density |psi|^2 delta(p - dS/dx).
/// Each defined grid point puts mass |psi(x_j)|^2 dx into the momentum-grid
/// bin [p_k - dp/2, p_k + dp/2) containing dS/dx(x_j); values beyond the grid
/// go to the end bins. Returned as a density on the momentum grid.
template <typename Real>
RealVector<Real> dbb_momentum_marginal(const Wavefunction1D<Real>& psi) {
    const auto grad = phase_gradient(psi);
    const auto& g = psi.grid();
    const Eigen::Index n = g.size();
    const Real dp = g.dp();
    const RealVector<Real> rho = psi.density();
    RealVector<Real> out = RealVector<Real>::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!grad.defined[j]) continue;
        const auto k = static_cast<Eigen::Index>(std::floor(grad.values[j] / dp + Real(0.5))) + n / 2;
        out[std::clamp<Eigen::Index>(k, 0, n - 1)] += rho[j] * g.dx();
    }
    return out / dp;
}

}  // namespace cqm
