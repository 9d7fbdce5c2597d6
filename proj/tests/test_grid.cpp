#include "cqm/grid.hpp"
#include "cqm/states.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace cqm;
using Grid = SpatialGrid1D<double>;
using Psi = Wavefunction1D<double>;

namespace {

Psi gaussian_state(const Grid& g, double x0, double p0, double s) {
    return build<double>(Gaussian{x0, p0, s}, g);
}

double mean(const RealVector<double>& axis, const RealVector<double>& rho, double h) {
    return (axis.array() * rho.array()).sum() * h;
}

}  // namespace

TEST_CASE("grid rejects bad sizes and spacings") {
    CHECK_THROWS_AS(Grid(15, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(Grid(8, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(Grid(100, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(Grid(64, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(64, 0.0, -1.0), std::invalid_argument);
    CHECK_NOTHROW(Grid(16, 0.0, 0.1));
}

TEST_CASE("momentum grid is centered and symmetric") {
    const Grid g(64, -3.2, 0.1);
    CHECK(g.dp() == doctest::Approx(2.0 * oracle::pi / 6.4).epsilon(1e-15));
    CHECK(g.p(32) == 0.0);
    for (int k = 1; k < 32; ++k) CHECK(g.p(32 + k) == doctest::Approx(-g.p(32 - k)).epsilon(1e-15));
    CHECK(g.p(0) == doctest::Approx(-32 * g.dp()));
}

TEST_CASE("to_momentum matches a brute-force DFT") {
    const Grid g(128, -12.8, 0.2);
    Psi psi = build<double>(Superposition{{{{1.0, 0.3}, {-1.5, 1.0, 0.8}}, {{0.5, -0.2}, {2.0, -0.5, 1.1}}}}, g);
    const auto phi = to_momentum(psi);
    std::vector<oracle::cplx> in(psi.amps().data(), psi.amps().data() + 128);
    const auto ref = oracle::brute_dft(in, g.x_min(), g.dx());
    double worst = 0.0;
    for (int k = 0; k < 128; ++k) worst = std::max(worst, std::abs(phi.amps()[k] - ref[k]));
    CHECK(worst < 1e-12);
}

TEST_CASE("gaussian transforms to sigma_p = 1/2") {
    const Grid g = Grid::centered(1024, 0.05);
    const auto phi = to_momentum(gaussian_state(g, 0.0, 0.0, 1.0));
    CHECK(phi.norm() == doctest::Approx(1.0).epsilon(1e-9));
    double worst = 0.0;
    for (int k = 0; k < 1024; ++k)
        worst = std::max(worst, std::abs(phi.density()[k] - oracle::normal_pdf(g.p(k), 0.0, 0.5)));
    CHECK(worst < 1e-10);
}

TEST_CASE("translation leaves |psi~|^2 unchanged, modulation shifts it") {
    const Grid g = Grid::centered(1024, 0.05);
    const RealVector<double> base = to_momentum(gaussian_state(g, 0.0, 0.0, 1.0)).density();
    const RealVector<double> moved = to_momentum(gaussian_state(g, 3.0, 0.0, 1.0)).density();
    CHECK((base - moved).cwiseAbs().maxCoeff() < 1e-12);

    const auto boosted = to_momentum(gaussian_state(g, 0.0, 2.0, 1.0));
    CHECK(mean(g.momenta(), boosted.density(), g.dp()) == doctest::Approx(2.0).epsilon(1e-10));
    // against direct quadrature of the modulated gaussian at a few momenta
    for (double p : {1.0, 2.0, 2.7}) {
        const double re = oracle::integrate(
            [&](double x) { return (oracle::gaussian(x, 0, 2, 1) * std::exp(oracle::cplx(0, -p * x))).real(); }, -20, 20);
        const double im = oracle::integrate(
            [&](double x) { return (oracle::gaussian(x, 0, 2, 1) * std::exp(oracle::cplx(0, -p * x))).imag(); }, -20, 20);
        const double ref = (re * re + im * im) / (2.0 * oracle::pi);
        const auto k = static_cast<Eigen::Index>(std::lround(p / g.dp())) + 512;
        CHECK(std::abs(g.p(k) - p) < g.dp());
        const double at = std::norm(oracle::gaussian_momentum(g.p(k), 0, 2, 1));
        CHECK(boosted.density()[k] == doctest::Approx(at).epsilon(1e-9));
        CHECK(std::abs(ref - std::norm(oracle::gaussian_momentum(p, 0, 2, 1))) < 1e-12);
    }
}

TEST_CASE("Parseval and round trip over the corpus") {
    const Grid g = Grid::centered(1024, 0.05);
    const std::vector<StateSpec> corpus = {
        Gaussian{0, 0, 1}, Gaussian{0, 2, 1},
        Superposition{{{{1, 0}, {-4, 0, 1}}, {{1, 0}, {4, 0, 1}}}},
        HarmonicEigenstate{0, 1, 1}, HarmonicEigenstate{1, 1, 1}, HarmonicEigenstate{2, 1, 1},
        HarmonicEigenstate{3, 1, 1}};
    for (const auto& spec : corpus) {
        const Psi psi = build<double>(spec, g);
        const Psi phi = to_momentum(psi);
        CHECK(std::abs(phi.norm() - psi.norm()) < 1e-9);
        const Psi back = to_position(phi);
        CHECK((back.amps() - psi.amps()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(back.representation() == Representation::position);
    }
}

TEST_CASE("transforms reject unnormalized or wrong-representation input") {
    const Grid g = Grid::centered(64, 0.25);
    Psi psi = gaussian_state(g, 0, 0, 1);
    const Psi doubled(g, psi.amps() * 2.0);
    CHECK_THROWS_AS(to_momentum(doubled), std::invalid_argument);
    CHECK_THROWS_AS(to_position(psi), std::invalid_argument);
    CHECK_THROWS_AS(to_momentum(to_momentum(psi)), std::invalid_argument);
    CHECK_THROWS_AS(phase_gradient(doubled), std::invalid_argument);
}

TEST_CASE("partial transforms") {
    const Grid g1 = Grid::centered(64, 0.3), g2 = Grid::centered(128, 0.2);
    const Gaussian a{0.5, 1.0, 1.0}, b{-0.3, -0.5, 1.2};
    // product state from the 2D builder with r = 0
    const auto psi = build<double>(Gaussian2D{{a.x0, b.x0}, {a.p0, b.p0}, {a.sigma, b.sigma}, 0.0}, g1, g2);
    const auto phi1 = to_momentum(build<double>(a, g1));
    const auto chi = build<double>(b, g2);

    SUBCASE("product state factorizes") {
        const auto mixed = partial_to_momentum(psi, 1);
        CHECK(mixed.representation(1) == Representation::momentum);
        CHECK(mixed.representation(2) == Representation::position);
        const ComplexMatrix<double> expect = phi1.amps() * chi.amps().transpose();
        CHECK((mixed.amps() - expect).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(std::abs(mixed.norm() - 1.0) < 1e-9);
    }
    SUBCASE("axis 1 then axis 2 equals the full transform") {
        const auto two_step = partial_to_momentum(partial_to_momentum(psi, 1), 2);
        const auto full = to_momentum(psi);
        CHECK((two_step.amps() - full.amps()).cwiseAbs().maxCoeff() < 1e-9);
        const auto other_order = partial_to_momentum(partial_to_momentum(psi, 2), 1);
        CHECK((other_order.amps() - full.amps()).cwiseAbs().maxCoeff() < 1e-9);
        const auto back = partial_to_position(partial_to_position(full, 1), 2);
        CHECK((back.amps() - psi.amps()).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("invalid axis or repeated transform is rejected") {
        CHECK_THROWS_AS(partial_to_momentum(psi, 0), std::invalid_argument);
        CHECK_THROWS_AS(partial_to_momentum(psi, 3), std::invalid_argument);
        CHECK_THROWS_AS(partial_to_momentum(partial_to_momentum(psi, 1), 1), std::invalid_argument);
        CHECK_THROWS_AS(partial_to_position(psi, 2), std::invalid_argument);
    }
}

TEST_CASE("mixed density of a correlated gaussian against double quadrature") {
    const Grid g1 = Grid::centered(64, 0.35), g2 = Grid::centered(64, 0.35);
    const Gaussian2D spec{{0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}, 0.5};
    const auto mixed = partial_to_momentum(build<double>(spec, g1, g2), 1);
    const double s1 = 1.0, s2 = 1.0, r = 0.5;
    const double norm = std::pow(4 * oracle::pi * oracle::pi * s1 * s1 * s2 * s2 * (1 - r * r), -0.25);
    auto amplitude = [&](double x1, double x2) {
        const double q = (x1 * x1 - 2 * r * x1 * x2 + x2 * x2) / (1 - r * r);
        return norm * std::exp(-q / 4.0);
    };
    // psi(p1, x2) = (1/sqrt(2 pi)) int exp(-i p1 x1) psi(x1, x2) dx1; the amplitude is even in x1 - mu(x2)
    double l1 = 0.0;
    for (Eigen::Index c = 0; c < 64; ++c) {
        const double x2 = g2.x(c);
        for (Eigen::Index rr = 0; rr < 64; ++rr) {
            const double p1 = g1.p(rr);
            const double re = oracle::trapezoid([&](double x1) { return amplitude(x1, x2) * std::cos(p1 * x1); }, -20, 20, 4000);
            const double im = oracle::trapezoid([&](double x1) { return -amplitude(x1, x2) * std::sin(p1 * x1); }, -20, 20, 4000);
            const double ref = (re * re + im * im) / (2 * oracle::pi);
            l1 += std::abs(std::norm(mixed.amps()(rr, c)) - ref) * g1.dp() * g2.dx();
        }
    }
    CHECK(l1 < 1e-6);
}

TEST_CASE("phase gradient") {
    const Grid g = Grid::centered(1024, 0.05);
    SUBCASE("real state gives zero") {
        const Psi psi = build<double>(HarmonicEigenstate{0, 1, 1}, g);
        const auto grad = phase_gradient(psi);
        const RealVector<double> rho = psi.density();
        // Fourier roundoff is relative to max|psi|, so the tails get a looser bound
        for (Eigen::Index j = 0; j < 1024; ++j)
            if (grad.defined[j]) CHECK(std::abs(grad.values[j]) < (rho[j] > 1e-6 * rho.maxCoeff() ? 1e-11 : 1e-8));
    }
    SUBCASE("linear phase gives p0") {
        const Psi psi = gaussian_state(g, 0, 2, 1);
        const auto grad = phase_gradient(psi);
        const RealVector<double> rho = psi.density();
        auto psi_tail = [&](Eigen::Index j) { return rho[j] / rho.maxCoeff(); };
        int defined = 0;
        for (Eigen::Index j = 0; j < 1024; ++j)
            if (grad.defined[j]) {
                ++defined;
                // the stencil error relative to |psi| grows in the far tails
                const double rel = psi_tail(j);
                CHECK(std::abs(grad.values[j] - 2.0) < (rel > 1e-6 ? 1e-10 : 1e-6));
            }
        CHECK(defined > 100);
    }
    SUBCASE("global phase does not change it") {
        const Psi psi = gaussian_state(g, 1.0, 0.7, 0.9);
        const Psi rotated(g, psi.amps() * std::polar(1.0, 1.234));
        const auto a = phase_gradient(psi), b = phase_gradient(rotated);
        const RealVector<double> rho = psi.density();
        CHECK((a.defined == b.defined).all());
        // identical up to rounding of the rotated amplitudes
        for (Eigen::Index j = 0; j < 1024; ++j)
            if (a.defined[j])
                CHECK(std::abs(a.values[j] - b.values[j]) < (rho[j] > 1e-6 * rho.maxCoeff() ? 1e-11 : 1e-8));
    }
    SUBCASE("nodes are flagged with NaN") {
        const auto grad = phase_gradient(build<double>(HarmonicEigenstate{1, 1, 1}, g));
        CHECK_FALSE(grad.defined[0]);
        CHECK(std::isnan(grad.values[0]));
        CHECK(grad.defined[512 + 10]);
    }
    SUBCASE("free gaussian after spreading") {
        const double t = 1.5, m = 1.0;
        ComplexVector<double> a(1024);
        for (Eigen::Index j = 0; j < 1024; ++j) a[j] = oracle::free_gaussian(g.x(j), t, 0.5, 0.3, 1.0, m);
        const auto psi = Psi::normalized(g, a, t);
        const auto grad = phase_gradient(psi);
        double worst = 0.0;
        for (Eigen::Index j = 0; j < 1024; ++j)
            if (std::abs(g.x(j) - 0.95) < 8.0)
                worst = std::max(worst, std::abs(grad.values[j] - oracle::free_gaussian_phase_gradient(g.x(j), t, 0.5, 0.3, 1.0, m)));
        CHECK(worst < 1e-5);
    }
}
