#include <doctest.h>

#include <cmath>
#include <random>

#include "weldnorm/seminorm.hpp"
#include "weldnorm/welding.hpp"

using namespace weldnorm;

namespace {

QuadratureConfig default_cfg() {
    QuadratureConfig cfg;
    return cfg;
}

BoundaryFunction runge_on_line() {
    // u(x) = 1/(1+x^2); smooth across infinity in the circle chart
    return BoundaryFunction(
        Cline::real_line(),
        [](const ExtComplex& x) {
            if (x.is_inf()) return 0.0;
            return 1.0 / (1.0 + std::norm(x.value()));
        },
        {ExtComplex::infinity()});
}

BoundaryFunction odd_runge_on_line() {
    // u(x) = x/(1+x^2)
    return BoundaryFunction(
        Cline::real_line(),
        [](const ExtComplex& x) {
            if (x.is_inf()) return 0.0;
            return x.value().real() / (1.0 + std::norm(x.value()));
        },
        {ExtComplex::infinity()});
}

BoundaryFunction atan_window_on_line() {
    // u(x) = arctan(x+1) - arctan(x-1)
    return BoundaryFunction(
        Cline::real_line(),
        [](const ExtComplex& x) {
            if (x.is_inf()) return 0.0;
            const double t = x.value().real();
            return std::atan(t + 1.0) - std::atan(t - 1.0);
        },
        {ExtComplex::infinity()});
}

BoundaryFunction circle_fn(std::function<double(double)> g) {
    return BoundaryFunction(
        Cline::unit_circle(),
        [g = std::move(g)](const ExtComplex& z) { return g(std::arg(z.value())); }, {});
}

// Fourier oracle on S^1: seminorm^2 = sum |n| |u_n|^2 over n != 0,
// with coefficients from the trapezoid rule (spectrally accurate for smooth u).
double fourier_seminorm_sq(const std::function<double(double)>& g, int nmax = 64, int grid = 4096) {
    double total = 0.0;
    for (int n = 1; n <= nmax; ++n) {
        double re = 0.0, im = 0.0;
        for (int k = 0; k < grid; ++k) {
            const double t = 2.0 * kPi * k / grid;
            const double v = g(t);
            re += v * std::cos(n * t);
            im -= v * std::sin(n * t);
        }
        re /= grid;
        im /= grid;
        total += 2.0 * n * (re * re + im * im);
    }
    return total;
}

}  // namespace

TEST_CASE("constants have zero seminorm") {
    const auto cfg = default_cfg();
    BoundaryFunction c(Cline::real_line(), [](const ExtComplex&) { return 3.25; },
                       {ExtComplex::infinity()});
    CHECK(h_half_seminorm_sq(c, cfg) == doctest::Approx(0.0));
}

TEST_CASE("Fourier oracle: cos theta has seminorm^2 = 1/2") {
    const auto cfg = default_cfg();
    const auto u = circle_fn([](double t) { return std::cos(t); });
    const double oracle = fourier_seminorm_sq([](double t) { return std::cos(t); });
    CHECK(oracle == doctest::Approx(0.5).epsilon(1e-10));
    QuadratureDiagnostics diag;
    const double v = h_half_seminorm_sq(u, cfg, &diag);
    CHECK(diag.converged);
    CHECK(std::abs(v - 0.5) < 1e-4);
}

TEST_CASE("Douglas oracle: 1/(1+x^2) has seminorm^2 = 1/8") {
    const auto cfg = default_cfg();
    QuadratureDiagnostics diag;
    const double v = h_half_seminorm_sq(runge_on_line(), cfg, &diag);
    CHECK(diag.converged);
    CHECK(std::abs(v - 0.125) < 1e-3);
}

TEST_CASE("half-plane Dirichlet energy of the closed-form extensions") {
    auto cfg = default_cfg();
    SUBCASE("constant has zero energy") {
        CHECK(dirichlet_energy_halfplane([](Complex) { return Complex(0.0); }, cfg) ==
              doctest::Approx(0.0));
    }
    SUBCASE("F = Im(-1/(z+i)) has energy 1/8") {
        // |grad F| = |G'| with G = -1/(z+i); the exact radial integration gives
        // (1/2pi) * int_0^inf pi/(2(y+1)^3) dy = 1/8
        auto grad = [](Complex z) {
            const Complex gp = 1.0 / ((z + Complex(0, 1)) * (z + Complex(0, 1)));
            return Complex(0, 1) * std::conj(gp);
        };
        const double v = dirichlet_energy_halfplane(grad, cfg);
        CHECK(std::abs(v - 0.125) < 1e-4);
    }
}

TEST_CASE("Douglas consistency across the test set") {
    auto cfg = default_cfg();
    struct Case {
        BoundaryFunction u;
        std::function<Complex(Complex)> grad;
    };
    const Complex i(0, 1);
    std::vector<Case> cases;
    cases.push_back({runge_on_line(), [i](Complex z) {
                         const Complex gp = 1.0 / ((z + i) * (z + i));
                         return i * std::conj(gp);
                     }});
    cases.push_back({odd_runge_on_line(), [i](Complex z) {
                         const Complex gp = -1.0 / ((z + i) * (z + i));
                         return std::conj(gp);
                     }});
    cases.push_back({atan_window_on_line(), [i](Complex z) {
                         const Complex gp = 1.0 / (z + 1.0 + i) - 1.0 / (z - 1.0 + i);
                         return i * std::conj(gp);
                     }});
    for (const auto& c : cases) {
        const double s = h_half_seminorm_sq(c.u, cfg);
        const double d = dirichlet_energy_halfplane(c.grad, cfg);
        CHECK(std::abs(s - d) <= 1e-3 * std::max(1.0, std::abs(s)));
    }
}

TEST_CASE("inner product") {
    const auto cfg = default_cfg();
    SUBCASE("constants are null directions") {
        const auto u = circle_fn([](double t) { return std::cos(t); });
        const auto c = circle_fn([](double) { return 2.0; });
        CHECK(std::abs(h_half_inner(u, c, cfg)) < 1e-12);
    }
    SUBCASE("distinct frequencies are orthogonal") {
        const auto u = circle_fn([](double t) { return std::cos(t); });
        const auto v = circle_fn([](double t) { return std::sin(t); });
        CHECK(std::abs(h_half_inner(u, v, cfg)) < 1e-6);
    }
    SUBCASE("inner(u,u) equals seminorm_sq(u)") {
        const auto u = runge_on_line();
        const double a = h_half_inner(u, u, cfg);
        const double b = h_half_seminorm_sq(u, cfg);
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
    SUBCASE("polarization") {
        auto mk = [](double a, double b) {
            return circle_fn([a, b](double t) { return a * std::cos(t) + b * std::sin(2 * t); });
        };
        const auto u = mk(1.0, 0.3), v = mk(-0.4, 1.1);
        const auto up = circle_fn([](double t) { return (std::cos(t) + 0.3 * std::sin(2 * t)) +
                                                         (-0.4 * std::cos(t) + 1.1 * std::sin(2 * t)); });
        const auto um = circle_fn([](double t) { return (std::cos(t) + 0.3 * std::sin(2 * t)) -
                                                         (-0.4 * std::cos(t) + 1.1 * std::sin(2 * t)); });
        const double ip = h_half_inner(u, v, cfg);
        const double pol = 0.25 * (h_half_seminorm_sq(up, cfg) - h_half_seminorm_sq(um, cfg));
        CHECK(ip == doctest::Approx(pol).epsilon(1e-8));
    }
}

TEST_CASE("transport_to_circle") {
    const auto cfg = default_cfg();
    SUBCASE("preserves the seminorm of 1/(1+x^2)") {
        const auto u = transport_to_circle(runge_on_line());
        CHECK(!u.domain().is_line());
        CHECK(std::abs(h_half_seminorm_sq(u, cfg) - 0.125) < 1e-3);
    }
    SUBCASE("maps knots along the Cayley transform") {
        BoundaryFunction u(
            Cline::real_line(), [](const ExtComplex&) { return 0.0; },
            {ExtComplex(0.0), ExtComplex(1.0), ExtComplex(3.0), ExtComplex::infinity()});
        const auto v = transport_to_circle(u);
        REQUIRE(v.knots().size() == 4);
        const Mobius C = Mobius::cayley();
        const ExtComplex expected[] = {C(ExtComplex(0.0)), C(ExtComplex(1.0)), C(ExtComplex(3.0)),
                                       ExtComplex(1.0)};
        for (int k = 0; k < 4; ++k) CHECK(spherical_dist(v.knots()[k], expected[k]) < 1e-12);
    }
}

TEST_CASE("pullback") {
    const auto cfg = default_cfg();
    SUBCASE("by the identity") {
        const auto u = runge_on_line();
        const auto v = pullback(u, identity_welding(Cline::real_line()));
        CHECK(h_half_seminorm_sq(v, cfg) == doctest::Approx(h_half_seminorm_sq(u, cfg)).epsilon(1e-12));
    }
    SUBCASE("Mobius pullback is an isometry") {
        const auto u = runge_on_line();
        const double base = h_half_seminorm_sq(u, cfg);
        std::mt19937_64 gen(17);
        auto uni = [&gen](double lo, double hi) {
            return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
        };
        int done = 0;
        while (done < 50) {
            const double a = uni(-2, 2), b = uni(-2, 2), c = uni(-2, 2), d = uni(-2, 2);
            if (a * d - b * c < 0.05) continue;
            const Mobius T(a, b, c, d);
            const auto v = pullback(u, mobius_welding(Cline::real_line(), T));
            const double s = h_half_seminorm_sq(v, cfg);
            CHECK(std::abs(s - base) <= 1e-4 * std::abs(base));
            ++done;
        }
    }
    SUBCASE("rotation pullback on the circle flips cos but keeps its norm") {
        const auto u = circle_fn([](double t) { return std::cos(t); });
        const auto rot = mobius_welding(Cline::unit_circle(), Mobius(Complex(-1, 0), 0, 0, 1));
        const auto v = pullback(u, rot);
        CHECK(v(ExtComplex(1.0)) == doctest::Approx(-1.0));
        CHECK(h_half_seminorm_sq(v, cfg) == doctest::Approx(h_half_seminorm_sq(u, cfg)).epsilon(1e-6));
    }
    SUBCASE("pullback by the example welding obeys the certificate bound") {
        const double Kcert = 10.0;
        const double bound = Kcert * Kcert + 1.0 / (Kcert * Kcert);
        const auto h = example_h();
        const BoundaryFunction us[] = {runge_on_line(), odd_runge_on_line(), atan_window_on_line()};
        for (const auto& u : us) {
            const double su = h_half_seminorm_sq(u, cfg);
            const double sp = h_half_seminorm_sq(pullback(u, h), cfg);
            CHECK(sp <= bound * su);
        }
    }
}

TEST_CASE("divergence sentinel on a step trace") {
    auto cfg = default_cfg();
    BoundaryFunction step(
        Cline::real_line(),
        [](const ExtComplex& x) {
            if (x.is_inf()) return 0.0;
            return x.value().real() > 0 ? std::log(2.0) : 0.0;
        },
        {ExtComplex(0.0), ExtComplex::infinity()});
    QuadratureDiagnostics diag;
    const double v = h_half_seminorm_sq(step, cfg, &diag);
    CHECK(std::isinf(v));
    CHECK(diag.divergent);
}

TEST_CASE("non-finite samples are rejected") {
    const auto cfg = default_cfg();
    BoundaryFunction bad(Cline::unit_circle(),
                         [](const ExtComplex&) { return std::numeric_limits<double>::quiet_NaN(); },
                         {});
    CHECK_THROWS_AS(h_half_seminorm_sq(bad, cfg), NonFiniteSample);
}

TEST_CASE("config validation and JSON round-trip") {
    QuadratureConfig cfg;
    cfg.gauss_order = 1;
    CHECK_THROWS(cfg.validate());
    cfg = QuadratureConfig();
    cfg.diagonal_offset = 1.5;
    CHECK_THROWS(cfg.validate());
    cfg = QuadratureConfig();
    cfg.panels_per_interval = 8;
    cfg.target_rel_tol = 2e-4;
    const auto back = QuadratureConfig::from_json(cfg.to_json());
    CHECK(back.panels_per_interval == 8);
    CHECK(back.target_rel_tol == 2e-4);
}

TEST_CASE("parallel and serial runs agree bitwise") {
    auto cfg = default_cfg();
    const auto u = runge_on_line();
    cfg.threads = 1;
    const double serial = h_half_seminorm_sq(u, cfg);
    cfg.threads = 0;  // OpenMP team
    const double parallel = h_half_seminorm_sq(u, cfg);
    CHECK(serial == parallel);  // deterministic pairwise reduction
}
