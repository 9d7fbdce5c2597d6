#include "scenarios.hpp"

#include "cqm/evolve.hpp"
#include "cqm/states.hpp"
#include "cqm/stats.hpp"
#include "cqm/trajectories.hpp"
#include "cqm/transport.hpp"
#include "cqm/wigner.hpp"

#include <cmath>
#include <sstream>

namespace cqm::app {

namespace {

using Grid = SpatialGrid1D<double>;
using Psi = Wavefunction1D<double>;
namespace fs = std::filesystem;

std::string fixed(double t) {
    std::ostringstream s;
    s.precision(6);
    s << t;
    return s.str();
}

std::string bins_of(const Grid& g) {
    return "n=" + std::to_string(g.size()) + " dx=" + fixed(g.dx()) + " dp=" + fixed(g.dp());
}

long rounded(double r) { return std::lround(r); }

// Propagated snapshots every `stride` steps from t = 0 to t_final.
std::vector<Psi> snapshots(const ExperimentConfig& c, const Psi& psi0) {
    Propagator<double> prop(psi0.grid(), c.potential, c.mass, c.dt);
    const long frames = rounded(c.t_final / (c.dt * double(c.snapshot_stride)));
    std::vector<Psi> out{psi0};
    out.reserve(std::size_t(frames) + 1);
    for (long f = 0; f < frames; ++f)
        out.push_back(prop.advance(out.back(), c.snapshot_stride, f * c.snapshot_stride));
    return out;
}

// Snapshot indices of the checkpoints 0, every, 2 every, ... <= t_final.
std::vector<std::size_t> checkpoint_frames(const ExperimentConfig& c) {
    const long per = rounded(c.checkpoint_every / (c.dt * double(c.snapshot_stride)));
    const long frames = rounded(c.t_final / (c.dt * double(c.snapshot_stride)));
    std::vector<std::size_t> out;
    for (long f = 0; f <= frames; f += per) out.push_back(std::size_t(f));
    return out;
}

std::string numbered(const std::string& stem, std::size_t k) { return stem + "_t" + std::to_string(k) + ".csv"; }

void write_map(const fs::path& path, const RealVector<double>& xs, const MonotoneMomentumMap<double>& map,
               const RealVector<double>& gauge) {
    const RealVector<double> p_hat = map.tabulate(xs);
    write_columns(path, {"x [length]", "p_hat [momentum]", "A [momentum]"}, {&xs, &p_hat, &gauge});
}

RealVector<double> gauge_from_phase(const Psi& psi, const MonotoneMomentumMap<double>& map) {
    const auto grad = phase_gradient(psi);
    const RealVector<double> xs = psi.grid().positions();
    RealVector<double> a(xs.size());
    for (Eigen::Index j = 0; j < xs.size(); ++j)
        a[j] = grad.defined[j] ? grad.values[j] - map(xs[j]) : std::numeric_limits<double>::quiet_NaN();
    return a;
}

RunResult run1d(const ExperimentConfig& c, const fs::path& dir) {
    RunResult res;
    const Grid g = c.grid.build();
    const Orientation eps = orientation_from_int(c.epsilon);
    const auto snaps = snapshots(c, build<double>(c.state, g));
    const auto frames = checkpoint_frames(c);

    const auto field = dbb_velocity_field(snaps, c.mass);
    const RealVector<double> x0 = sample_positions(cdf(snaps.front()), std::size_t(c.ensemble_size), c.seed);
    std::vector<double> record;
    std::vector<MonotoneMomentumMap<double>> maps;
    for (auto f : frames) {
        record.push_back(snaps[f].time());
        maps.push_back(momentum_map(snaps[f], eps));
    }
    const auto ens = assign_momenta(integrate(x0, field, c.dt, record), maps);
    const auto gauge = gauge_field(field, maps);

    const RealVector<double> xs = g.positions(), ps = g.momenta();
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const Psi& psi = snaps[frames[k]];
        const Psi phi = to_momentum(psi);
        const auto fx = cdf(psi), fp = cdf(phi);
        const std::string at = "t=" + fixed(record[k]);
        const auto xk = ens.valid(ens.positions, k), pk = ens.valid(ens.momenta, k);
        const RealVector<double> rx = psi.density(), rp = phi.density();
        const RealVector<double> hx = histogram(xk, xs, g.dx()), hp = histogram(pk, ps, g.dp());

        ComparisonReport pos{"position " + at, ks_distance(xk, fx), l1_distance(hx, rx, g.dx()), xk.size(), bins_of(g)};
        ComparisonReport mom{"momentum " + at, ks_distance(pk, fp), l1_distance(hp, rp, g.dp()), pk.size(), bins_of(g)};
        res.checks.push_back(check_below("position KS " + at, pos.ks, c.tolerances.ks));
        res.checks.push_back(check_below("momentum KS " + at, mom.ks, c.tolerances.ks));
        res.reports.push_back(std::move(pos));
        res.reports.push_back(std::move(mom));

        write_columns(dir / numbered("marginals", k),
                      {"x [length]", "rho_x [1/length]", "hist_x [1/length]", "p [momentum]", "rho_p [1/momentum]",
                       "hist_p [1/momentum]"},
                      {&xs, &rx, &hx, &ps, &rp, &hp});
        write_map(dir / numbered("map", k), xs, maps[k], gauge.values[k]);
        res.files.push_back(numbered("marginals", k));
        res.files.push_back(numbered("map", k));
    }

    CsvWriter traj(dir / "trajectories.csv", {"t [time]", "i", "x [length]", "p [momentum]"});
    const long written = std::min<long>(c.trajectories_written, long(ens.size()));
    for (std::size_t k = 0; k < ens.times.size(); ++k)
        for (long i = 0; i < written; ++i) {
            traj << ens.times[k] << i << ens.positions[k][i] << ens.momenta[k][i];
            traj.end_row();
        }
    traj.close();
    res.files.push_back("trajectories.csv");

    const double flagged = double(ens.flagged_count) / double(ens.size());
    res.checks.push_back(check_at_most("flagged trajectory fraction", flagged, c.tolerances.flagged_fraction));
    res.checks.push_back(check_at_most("ordering violations", double(ens.ordering_violations), 0.0));
    res.details = {{"trajectories", ens.size()},
                   {"flagged", ens.flagged_count},
                   {"ordering_violations", ens.ordering_violations},
                   {"checkpoints", record},
                   {"final_norm", snaps.back().norm()}};
    return res;
}

RunResult run2d(const ExperimentConfig& c, const fs::path& dir) {
    RunResult res;
    const Grid g1 = c.grid.build(), g2 = c.grid2 ? c.grid2->build() : g1;
    auto psi = build<double>(c.state, g1, g2);
    const long steps = rounded(c.t_final / c.dt);
    if (steps > 0) psi = propagate(psi, c.potential, c.potential, c.mass, c.dt, steps);

    const auto maps = chained_maps_2d(psi);
    const auto pts = sample_phase_space_2d(maps, std::size_t(c.ensemble_size), c.seed);
    std::vector<std::pair<double, double>> xx, px, pp;
    xx.reserve(pts.size());
    px.reserve(pts.size());
    pp.reserve(pts.size());
    for (const auto& q : pts) {
        xx.emplace_back(q.x1, q.x2);
        px.emplace_back(q.p1, q.x2);
        pp.emplace_back(q.p1, q.p2);
    }
    const auto mixed = partial_to_momentum(psi, 1);
    const std::string bins = std::to_string(g1.size()) + "x" + std::to_string(g2.size()) + " refined x4";
    const std::pair<const char*, double> pairs[] = {
        {"(x1,x2)", ks_distance_2d(xx, grid_cdf(psi))},
        {"(p1,x2)", ks_distance_2d(px, grid_cdf(mixed))},
        {"(p1,p2)", ks_distance_2d(pp, grid_cdf(partial_to_momentum(mixed, 2)))}};
    for (const auto& [name, ks] : pairs) {
        res.reports.push_back({std::string("2D ") + name, ks, 0.0, pts.size(), bins});
        res.checks.push_back(check_below(std::string("2D KS ") + name, ks, c.tolerances.ks_2d));
    }

    CsvWriter out(dir / "samples2d.csv",
                  {"i", "x1 [length]", "x2 [length]", "p1 [momentum]", "p2 [momentum]"});
    const long written = std::min<long>(c.trajectories_written, long(pts.size()));
    for (long i = 0; i < written; ++i) {
        const auto& q = pts[std::size_t(i)];
        out << i << q.x1 << q.x2 << q.p1 << q.p2;
        out.end_row();
    }
    out.close();
    res.files.push_back("samples2d.csv");
    res.details = {{"samples", pts.size()}, {"time", psi.time()}, {"max_column_mass_gap", maps.max_mass_gap()}};
    return res;
}

RunResult wigner_compare(const ExperimentConfig& c, const fs::path& dir) {
    RunResult res;
    const Grid g = c.grid.build();
    Psi psi = build<double>(c.state, g);
    const long steps = rounded(c.t_final / c.dt);
    if (steps > 0) psi = propagate(psi, c.potential, c.mass, c.dt, steps);
    const Psi phi = to_momentum(psi);

    const auto w = wigner(psi);
    const auto [wx, wp] = wigner_marginals(w);
    const double l1x = l1_distance(wx, RealVector<double>(psi.density()), g.dx());
    const double l1p = l1_distance(wp, RealVector<double>(phi.density()), g.dp());
    const auto low = min_value(w);
    res.reports.push_back({"wigner x-marginal", 0.0, l1x, 0, bins_of(g)});
    res.reports.push_back({"wigner p-marginal", 0.0, l1p, 0, bins_of(g)});
    res.checks.push_back(check_below("wigner x-marginal L1", l1x, c.tolerances.wigner_l1));
    res.checks.push_back(check_below("wigner p-marginal L1", l1p, c.tolerances.wigner_l1));
    res.checks.push_back(check_below("wigner minimum", low.value, c.tolerances.wigner_min));

    // the causal density puts weight |psi|^2 >= 0 on the graph of a nondecreasing map
    const auto map = momentum_map(psi, orientation_from_int(c.epsilon));
    const RealVector<double> xs = g.positions(), ps = g.momenta();
    const RealVector<double> p_hat = map.tabulate(xs);
    double worst_step = 0.0;
    for (Eigen::Index j = 1; j < p_hat.size(); ++j)
        worst_step = std::max(worst_step, double(c.epsilon) * (p_hat[j - 1] - p_hat[j]));
    res.checks.push_back(check_at_most("causal map monotonicity defect", worst_step, 0.0));
    res.checks.push_back(check_at_most("causal density negative weight", std::max(0.0, -psi.density().minCoeff()), 0.0));

    CsvWriter out(dir / "wigner.csv", {"x [length]", "p [momentum]", "W [1/action]"});
    for (Eigen::Index j = 0; j < g.size(); ++j)
        for (Eigen::Index k = 0; k < g.size(); ++k) {
            out << xs[j] << ps[k] << w.values(j, k);
            out.end_row();
        }
    out.close();
    const RealVector<double> rx = psi.density(), rp = phi.density();
    write_columns(dir / "marginals_t0.csv",
                  {"x [length]", "rho_x [1/length]", "wigner_x [1/length]", "p [momentum]", "rho_p [1/momentum]",
                   "wigner_p [1/momentum]"},
                  {&xs, &rx, &wx, &ps, &rp, &wp});
    write_map(dir / "map_t0.csv", xs, map, gauge_from_phase(psi, map));
    res.files = {"wigner.csv", "marginals_t0.csv", "map_t0.csv"};
    res.details = {{"wigner_min", low.value},
                   {"wigner_min_x", low.x},
                   {"wigner_min_p", low.p},
                   {"max_imaginary", w.max_imaginary},
                   {"integral", w.integral()}};
    return res;
}

RunResult takabayasi(const ExperimentConfig& c, const fs::path& dir) {
    RunResult res;
    const Grid g = c.grid.build();
    const Orientation eps = orientation_from_int(c.epsilon);
    const auto snaps = snapshots(c, build<double>(c.state, g));
    const auto frames = checkpoint_frames(c);
    const RealVector<double> xs = g.positions(), ps = g.momenta();
    nlohmann::json dbb = nlohmann::json::array();

    for (std::size_t k = 0; k < frames.size(); ++k) {
        const Psi& psi = snaps[frames[k]];
        const Psi phi = to_momentum(psi);
        const std::string at = "t=" + fixed(psi.time());
        const RealVector<double> rp = phi.density(), rx = psi.density();
        const RealVector<double> marginal = dbb_momentum_marginal(psi);
        const double l1 = l1_distance(marginal, rp, g.dp());

        const auto map = momentum_map(psi, eps);
        const RealVector<double> x = sample_positions(map.position_cdf(), std::size_t(c.ensemble_size), c.seed);
        std::vector<double> p(std::size_t(x.size()));
        for (Eigen::Index i = 0; i < x.size(); ++i) p[std::size_t(i)] = map(x[i]);
        const double ks = ks_distance(p, map.momentum_cdf());
        const RealVector<double> hp = histogram(p, ps, g.dp());

        res.reports.push_back({"dBB momentum marginal " + at, 0.0, l1, 0, bins_of(g)});
        res.reports.push_back({"causal momentum " + at, ks, l1_distance(hp, rp, g.dp()), p.size(), bins_of(g)});
        // the dBB marginal is a delta only while psi is real, i.e. at the start
        if (k == 0) res.checks.push_back(check_above("dBB momentum marginal L1 " + at, l1, c.tolerances.takabayasi_l1));
        res.checks.push_back(check_below("causal momentum KS " + at, ks, c.tolerances.ks));
        dbb.push_back({{"t", psi.time()}, {"l1", l1}});

        write_columns(dir / numbered("marginals", k),
                      {"x [length]", "rho_x [1/length]", "p [momentum]", "rho_p [1/momentum]",
                       "dbb_p [1/momentum]", "hist_p [1/momentum]"},
                      {&xs, &rx, &ps, &rp, &marginal, &hp});
        write_map(dir / numbered("map", k), xs, map, gauge_from_phase(psi, map));
        res.files.push_back(numbered("marginals", k));
        res.files.push_back(numbered("map", k));
    }
    res.details = {{"dbb_l1", dbb}};
    return res;
}

}  // namespace

RunResult run_scenario(const ExperimentConfig& config, const fs::path& out_dir) {
    switch (config.scenario) {
        case Scenario::run1d: return run1d(config, out_dir);
        case Scenario::run2d: return run2d(config, out_dir);
        case Scenario::wigner_compare: return wigner_compare(config, out_dir);
        case Scenario::takabayasi: return takabayasi(config, out_dir);
    }
    throw std::logic_error("unknown scenario");
}

}  // namespace cqm::app
