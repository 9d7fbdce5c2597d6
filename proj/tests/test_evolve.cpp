#include "cqm/evolve.hpp"
#include "cqm/states.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace cqm;
using Grid = SpatialGrid1D<double>;
using Psi = Wavefunction1D<double>;

namespace {

double mean_x(const Psi& psi) {
    return (psi.axis().array() * psi.density().array()).sum() * psi.spacing();
}

double var_x(const Psi& psi) {
    const double m = mean_x(psi);
    return ((psi.axis().array() - m).square() * psi.density().array()).sum() * psi.spacing();
}

// L2 distance to the analytic free gaussian at time t.
double free_error(const Psi& psi, double x0, double p0, double s, double m) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < psi.grid().size(); ++j)
        acc += std::norm(psi.amps()[j] - oracle::free_gaussian(psi.grid().x(j), psi.time(), x0, p0, s, m));
    return std::sqrt(acc * psi.grid().dx());
}

// Distance to the oscillator coherent state started at x = a with p = 0
// (m = omega = 1), minimized over a global phase: at time t the state is the
// sigma = 1/sqrt(2) gaussian centred at a cos t with momentum -a sin t.
double coherent_error(const Psi& psi, double a) {
    const double t = psi.time();
    const double xc = a * std::cos(t), pc = -a * std::sin(t);
    oracle::cplx overlap = 0.0;
    double ref_norm = 0.0;
    for (Eigen::Index j = 0; j < psi.grid().size(); ++j) {
        const oracle::cplx ref = oracle::gaussian(psi.grid().x(j), xc, pc, 1.0 / std::sqrt(2.0));
        overlap += std::conj(ref) * psi.amps()[j];
        ref_norm += std::norm(ref);
    }
    const double h = psi.grid().dx();
    return std::sqrt(std::max(0.0, psi.norm() + ref_norm * h - 2.0 * std::abs(overlap) * h));
}

}  // namespace

TEST_CASE("free gaussian spreading") {
    const Grid g = Grid::centered(1024, 0.05);
    const auto psi = build<double>(Gaussian{0, 0, 1}, g);
    const auto out = propagate(psi, FreePotential{}, 1.0, 0.001, 2000);
    CHECK(out.time() == doctest::Approx(2.0));
    CHECK(std::abs(var_x(out) / 2.0 - 1.0) < 1e-4);
    CHECK(free_error(out, 0, 0, 1, 1) < 1e-9);
}

TEST_CASE("boosted free gaussian against the closed form") {
    const Grid g = Grid::centered(1024, 0.05);
    const auto psi = build<double>(Gaussian{-3.0, 1.5, 0.8}, g);
    const auto out = propagate(psi, FreePotential{}, 2.0, 0.002, 1000);
    CHECK(free_error(out, -3.0, 1.5, 0.8, 2.0) < 1e-9);
}

TEST_CASE("oscillator ground state is stationary") {
    const Grid g = Grid::centered(512, 0.05);
    const auto psi = build<double>(HarmonicEigenstate{0, 1, 1}, g);
    // the splitting perturbs the eigenstate at O(dt^2)
    const auto out = propagate(psi, HarmonicPotential{1, 1, 0}, 1.0, 0.00025, 20000);
    CHECK(out.time() == doctest::Approx(5.0));
    CHECK((out.density() - psi.density()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("coherent state follows 2 cos t") {
    const Grid g = Grid::centered(512, 0.05);
    auto psi = build<double>(Gaussian{2.0, 0.0, 1.0 / std::sqrt(2.0)}, g);
    Propagator<double> prop(g, HarmonicPotential{1, 1, 0}, 1.0, 0.001);
    for (int k = 1; k <= 8; ++k) {
        psi = prop.advance(psi, 500);
        CHECK(std::abs(mean_x(psi) - 2.0 * std::cos(psi.time())) < 1e-4);
    }
}

TEST_CASE("Strang splitting is second order with a potential") {
    const Grid g = Grid::centered(512, 0.05);
    const auto psi = build<double>(Gaussian{2.0, 0.0, 1.0 / std::sqrt(2.0)}, g);
    const double e1 = coherent_error(propagate(psi, HarmonicPotential{1, 1, 0}, 1.0, 0.02, 50), 2.0);
    const double e2 = coherent_error(propagate(psi, HarmonicPotential{1, 1, 0}, 1.0, 0.01, 100), 2.0);
    const double e3 = coherent_error(propagate(psi, HarmonicPotential{1, 1, 0}, 1.0, 0.005, 200), 2.0);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
    CHECK(e2 / e3 > 3.0);
    CHECK(e2 / e3 < 5.0);
}

TEST_CASE("norm drift over 10^4 steps") {
    const Grid g = Grid::centered(512, 0.05);
    for (const StateSpec& spec : {StateSpec{Gaussian{2.0, 0.0, 0.7}}, StateSpec{HarmonicEigenstate{3, 1, 1}},
                                  StateSpec{Superposition{{{{1, 0}, {-4, 0, 1}}, {{1, 0}, {4, 0, 1}}}}}}) {
        const auto psi = build<double>(spec, g);
        const auto out = propagate(psi, HarmonicPotential{1, 1, 0}, 1.0, 0.001, 10000);
        CHECK(std::abs(out.norm() - psi.norm()) < 1e-9);
    }
}

TEST_CASE("barrier and tabulated potentials") {
    const Grid g = Grid::centered(256, 0.1);
    const RealVector<double> v = sample_potential<double>(BarrierPotential{2.0, 0.5, 1.0}, g);
    for (Eigen::Index j = 0; j < 256; ++j) CHECK(v[j] == (std::abs(g.x(j) - 1.0) <= 0.5 ? 2.0 : 0.0));

    std::vector<double> tab(256);
    for (Eigen::Index j = 0; j < 256; ++j) tab[j] = 0.5 * g.x(j) * g.x(j);
    const auto psi = build<double>(Gaussian{1.0, 0.0, 0.8}, g);
    const auto a = propagate(psi, TabulatedPotential{tab}, 1.0, 0.01, 100);
    const auto b = propagate(psi, HarmonicPotential{1, 1, 0}, 1.0, 0.01, 100);
    CHECK((a.amps() - b.amps()).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(sample_potential<double>(TabulatedPotential{std::vector<double>(10)}, g), std::invalid_argument);
    tab[7] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(sample_potential<double>(TabulatedPotential{tab}, g), std::invalid_argument);
}

TEST_CASE("stability heuristic is advisory") {
    const Grid g = Grid::centered(256, 0.1);
    CHECK(Propagator<double>(g, FreePotential{}, 1.0, 0.005).within_stability_heuristic());
    const Propagator<double> coarse(g, FreePotential{}, 1.0, 0.05);
    CHECK_FALSE(coarse.within_stability_heuristic());
    const auto psi = build<double>(Gaussian{0, 0, 1}, g);
    CHECK_NOTHROW(propagate(psi, FreePotential{}, 1.0, 0.05, 10));
}

TEST_CASE("numerical aborts carry the step index") {
    const Grid g = Grid::centered(256, 0.1);
    const auto psi = build<double>(Gaussian{0, 0, 1}, g);
    SUBCASE("non-finite amplitudes") {
        try {
            (void)propagate(psi, BarrierPotential{1e308, 100.0, 0.0}, 1.0, 10.0, 5);
            FAIL("expected NumericalError");
        } catch (const NumericalError& e) {
            CHECK(e.step() == 1);
        }
    }
    SUBCASE("density reaching the edge") {
        const auto moving = build<double>(Gaussian{0, 5.0, 1}, g);
        try {
            (void)propagate(moving, FreePotential{}, 1.0, 0.01, 1000);
            FAIL("expected NumericalError");
        } catch (const NumericalError& e) {
            CHECK(e.step() > 100);
            CHECK(e.step() < 1000);
            CHECK(std::string(e.what()).find("edge") != std::string::npos);
        }
    }
}

TEST_CASE("propagation preconditions") {
    const Grid g = Grid::centered(256, 0.1);
    const auto psi = build<double>(Gaussian{0, 0, 1}, g);
    CHECK_THROWS_AS(propagate(psi, FreePotential{}, 1.0, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(propagate(psi, FreePotential{}, 0.0, 0.01, 10), std::invalid_argument);
    CHECK_THROWS_AS(propagate(to_momentum(psi), FreePotential{}, 1.0, 0.01, 10), std::invalid_argument);
    CHECK_THROWS_AS(propagate(Psi(g, psi.amps() * 1.1), FreePotential{}, 1.0, 0.01, 10), std::invalid_argument);
    const auto same = propagate(psi, FreePotential{}, 1.0, 0.01, 0);
    CHECK(same.amps() == psi.amps());
}

TEST_CASE("separable 2D propagation factorizes") {
    const Grid g1 = Grid::centered(64, 0.3), g2 = Grid::centered(64, 0.3);
    const auto psi = build<double>(Gaussian2D{{1.0, -0.5}, {0.5, 0.0}, {1.0, 0.8}, 0.0}, g1, g2);
    const auto out = propagate(psi, FreePotential{}, HarmonicPotential{1, 1, 0}, 1.0, 0.01, 100);
    const auto a = propagate(build<double>(Gaussian{1.0, 0.5, 1.0}, g1), FreePotential{}, 1.0, 0.01, 100);
    const auto b = propagate(build<double>(Gaussian{-0.5, 0.0, 0.8}, g2), HarmonicPotential{1, 1, 0}, 1.0, 0.01, 100);
    const ComplexMatrix<double> product = a.amps() * b.amps().transpose();
    CHECK((out.amps() - product).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(out.norm() - 1.0) < 1e-9);
}

TEST_CASE("continuity residual shrinks under refinement") {
    // d_t |psi|^2 + d_x(|psi|^2 v) by centred differences, for a moving
    // coherent state; the residual is pure discretization error.
    auto residual = [](double dx, double dt) {
        const Grid g = Grid::centered(static_cast<Eigen::Index>(std::lround(25.6 / dx)), dx);
        const auto psi0 = build<double>(Gaussian{2.0, 0.0, 1.0 / std::sqrt(2.0)}, g);
        Propagator<double> prop(g, HarmonicPotential{1, 1, 0}, 1.0, dt);
        const auto steps = std::lround(0.5 / dt);
        const auto before = prop.advance(psi0, steps - 1);
        const auto mid = prop.advance(before, 1);
        const auto after = prop.advance(mid, 1);
        const RealVector<double> rho = mid.density();
        const auto grad = phase_gradient(mid);
        double acc = 0.0;
        for (Eigen::Index j = 1; j + 1 < g.size(); ++j) {
            if (!grad.defined[j - 1] || !grad.defined[j + 1]) continue;
            const double dtr = (after.density()[j] - before.density()[j]) / (2 * dt);
            const double dxf = (rho[j + 1] * grad.values[j + 1] - rho[j - 1] * grad.values[j - 1]) / (2 * dx);
            acc += (dtr + dxf) * (dtr + dxf) * dx;
        }
        return std::sqrt(acc);
    };
    const double coarse = residual(0.1, 0.01);
    const double fine = residual(0.05, 0.005);
    CHECK(fine < coarse / 3.0);
}
