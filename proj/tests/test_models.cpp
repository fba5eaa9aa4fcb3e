#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nsfd/elliptic.hpp"
#include "nsfd/errors.hpp"
#include "nsfd/models.hpp"
#include "oracles.hpp"

using namespace nsfd;

namespace {

/// Max over samples of |x'' + x + x^2| by the centered second difference.
template <typename X>
double oscillator_residual(X&& x, double h, int samples = 200, double t1 = 35.0) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = 0.5 + (t1 - 1.0) * i / (samples - 1);
        const double xt = x(t);
        const double xpp = (x(t + h) - 2 * xt + x(t - h)) / (h * h);
        worst = std::max(worst, std::abs(xpp + xt + xt * xt));
    }
    return worst;
}

}  // namespace

TEST_SUITE("oscillator") {
    TEST_CASE("parameters for x0 = 0.25") {
        const auto p = OscillatorParams::from_x0(0.25);
        CHECK(p.a == doctest::Approx(-0.55).epsilon(0.01));
        CHECK(p.omega == doctest::Approx(0.53).epsilon(0.01));
        CHECK(p.m == doctest::Approx(0.33).epsilon(0.02));
    }

    TEST_CASE("parameter ranges across (0, 1/2)") {
        for (double x0 : {0.01, 0.1, 0.25, 0.4, 0.49}) {
            const auto p = OscillatorParams::from_x0(x0);
            CHECK(p.a < 0.0);
            CHECK(p.omega > 0.0);
            CHECK(p.m > 0.0);
            CHECK(p.m < 1.0);
        }
        CHECK_THROWS_AS((void)OscillatorParams::from_x0(0.5), ConfigurationError);
        CHECK_THROWS_AS((void)OscillatorParams::from_x0(0.0), ConfigurationError);
        CHECK_THROWS_AS((void)OscillatorParams::from_x0(-0.1), ConfigurationError);
    }

    TEST_CASE("initial data") {
        const auto p = OscillatorParams::from_x0(0.25);
        const auto s = oscillator_exact(0.0, p);
        CHECK(s[0] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(s[1] == 0.0);
    }

    TEST_CASE("solves x'' + x + x^2 = 0") {
        const auto p = OscillatorParams::from_x0(0.25);
        const auto x = [&p](double t) { return oscillator_exact(t, p)[0]; };
        CHECK(oscillator_residual(x, 1e-4) <= 1e-6);
        for (double x0 : {0.1, 0.45}) {
            const auto q = OscillatorParams::from_x0(x0);
            const auto xq = [&q](double t) { return oscillator_exact(t, q)[0]; };
            CHECK(oscillator_residual(xq, 1e-4, 200, 10.0) <= 1e-6);
        }
    }

    TEST_CASE("residual is O(h^2): halving h divides it by about 4") {
        const auto p = OscillatorParams::from_x0(0.25);
        const auto x = [&p](double t) { return oscillator_exact(t, p)[0]; };
        const double r1 = oscillator_residual(x, 0.02);
        const double r2 = oscillator_residual(x, 0.01);
        const double ratio = r1 / r2;
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }

    TEST_CASE("sn second argument is the parameter m, not the modulus") {
        const auto p = OscillatorParams::from_x0(0.25);
        const auto modulus_reading = [&p](double t) {
            const double s = jacobi_sn(p.omega * t, p.m * p.m);
            return p.x0 + p.a * s * s;
        };
        CHECK(oscillator_residual(modulus_reading, 1e-3) > 1e-3);
    }

    TEST_CASE("y is the derivative of x") {
        const auto p = OscillatorParams::from_x0(0.25);
        const double h = 1e-5;
        for (int i = 0; i < 100; ++i) {
            const double t = 0.3 + 0.34 * i;
            const double fd = (oscillator_exact(t + h, p)[0] - oscillator_exact(t - h, p)[0]) / (2 * h);
            CHECK(std::abs(fd - oscillator_exact(t, p)[1]) <= 1e-8);
        }
    }

    TEST_CASE("energy is conserved along the exact solution") {
        const auto p = OscillatorParams::from_x0(0.25);
        const double e0 = 0.25 * 0.25 / 2 + 0.25 * 0.25 * 0.25 / 3;
        CHECK(e0 == doctest::Approx(0.036458333333333336));
        for (int i = 0; i <= 700; ++i) {
            const auto s = oscillator_exact(0.05 * i, p);
            CHECK(std::abs(energy(s[0], s[1]) - e0) <= 1e-9);
        }
    }

    TEST_CASE("energy formula") {
        CHECK(energy(0.0, 0.0) == 0.0);
        CHECK(energy(0.3, 0.0) == doctest::Approx(0.045 + 0.009));
    }

    TEST_CASE("measured period matches 2K(m)/omega") {
        const auto p = OscillatorParams::from_x0(0.25);
        const double expected = p.period();
        CHECK(expected == doctest::Approx(2.0 * oracle::elliptic_K(p.m) / p.omega).epsilon(1e-12));
        // First return to the maximum x0: y changes sign from + to - near t = P.
        const auto y = [&p](double t) { return oscillator_exact(t, p)[1]; };
        double lo = 0.0;
        const double step = 1e-3;
        double t = 0.5 * expected + step;
        while (!(y(t) > 0.0 && y(t + step) <= 0.0)) {
            t += step;
            REQUIRE(t < 2.0 * expected);
        }
        lo = t;
        double hi = t + step;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (y(mid) > 0.0 ? lo : hi) = mid;
        }
        const double measured = 0.5 * (lo + hi);
        CHECK(std::abs(measured - expected) <= 1e-6 * expected);
        CHECK(oscillator_exact(measured, p)[0] == doctest::Approx(0.25).epsilon(1e-9));
    }
}

TEST_SUITE("biomass") {
    TEST_CASE("initial conditions") {
        for (double z0 : {1.0, 2.5}) {
            const auto a = biomass_exact(0.0, z0);
            const auto b = biomass_forced_exact(0.0, z0, 0.5);
            const auto c = biomass_seasonal_exact(0.0, z0, 0.5, 2 * std::numbers::pi);
            for (const auto& s : {a, b, c}) {
                CHECK(std::abs(s[0]) < 1e-15);
                CHECK(std::abs(s[1]) < 1e-15);
                CHECK(s[2] == doctest::Approx(z0));
            }
        }
    }

    TEST_CASE("closed form of x") {
        for (double t : {0.1, 1.0, 4.0}) {
            const double expected = 15.0 / 8 * (std::exp(-t) - 2 * std::exp(-3 * t) + std::exp(-5 * t));
            CHECK(biomass_exact(t, 1.0)[0] == doctest::Approx(expected).epsilon(1e-14));
        }
    }

    TEST_CASE("forced model reaches its long-time limits") {
        const auto s = biomass_forced_exact(60.0, 1.0, 0.5);
        CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s[1] == doctest::Approx(0.5 / 3).epsilon(1e-12));
        CHECK(s[2] == doctest::Approx(0.5 / 5).epsilon(1e-12));
    }

    TEST_CASE("every exact solution satisfies its ODE") {
        for (auto kind : {ModelKind::Biomass, ModelKind::Trees, ModelKind::Seasonal, ModelKind::Harmonic,
                          ModelKind::Oscillator}) {
            const auto m = make_model(kind);
            CAPTURE(m.id);
            CHECK(exact_solution_residual(m, 0.0, 10.0, 200, 1e-4) <= 1e-6);
            const double r1 = exact_solution_residual(m, 0.0, 10.0, 100, 0.02);
            const double r2 = exact_solution_residual(m, 0.0, 10.0, 100, 0.01);
            CHECK(r1 / r2 >= 3.5);
            CHECK(r1 / r2 <= 4.5);
        }
    }

    TEST_CASE("seasonal solution for other frequencies") {
        for (double omega : {0.5, 1.0, 3.0}) {
            ModelParams params;
            params.omega = omega;
            params.zf = 0.8;
            params.z0 = 1.3;
            const auto m = make_model(ModelKind::Seasonal, params);
            CHECK(exact_solution_residual(m, 0.0, 20.0, 200, 1e-4) <= 1e-6);
        }
    }
}

TEST_SUITE("make_model") {
    TEST_CASE("oscillator") {
        const auto m = make_model(ModelKind::Oscillator);
        CHECK(m.a == SquareMatrix{{0.0, 1.0}, {-1.0, 0.0}});
        CHECK(m.state_dependent());
        const Vector x{0.3, 0.1};
        const auto b = m.forcing_at(0.0, x);
        CHECK(b[0] == 0.0);
        CHECK(b[1] == doctest::Approx(-0.09));
        const auto& sf = std::get<StateForcing>(m.forcing);
        const auto n = sf.semi_implicit(x);
        CHECK((n * Vector{0.7, 0.0})[1] == doctest::Approx(-0.3 * 0.7));
        REQUIRE(m.oscillator.has_value());
        CHECK(m.initial_state == Vector{0.25, 0.0});
    }

    TEST_CASE("biomass family") {
        const SquareMatrix a{{-1.0, 3.0, 0.0}, {0.0, -3.0, 5.0}, {0.0, 0.0, -5.0}};
        for (auto kind : {ModelKind::Biomass, ModelKind::Trees, ModelKind::Seasonal}) {
            const auto m = make_model(kind);
            CHECK(m.a == a);
            CHECK(m.initial_state == Vector{0.0, 0.0, 1.0});
        }
        CHECK_FALSE(make_model(ModelKind::Biomass).time_dependent());
        const auto s = make_model(ModelKind::Seasonal);
        CHECK(s.time_dependent());
        const auto b = s.forcing_at(0.3, Vector{0, 0, 0});
        CHECK(b[0] == 0.0);
        CHECK(b[1] == 0.0);
        CHECK(b[2] == doctest::Approx(0.5 * (1 + std::cos(2 * std::numbers::pi * 0.3))));
    }

    TEST_CASE("spectra match the characteristic polynomial") {
        for (auto kind : {ModelKind::Oscillator, ModelKind::Harmonic, ModelKind::Biomass, ModelKind::Trees,
                          ModelKind::Seasonal}) {
            const auto m = make_model(kind);
            CHECK(spectrum_residual(m.a, m.spectrum) <= 1e-10);
        }
    }

    TEST_CASE("invalid parameters name the constraint") {
        ModelParams p;
        p.x0 = 0.7;
        CHECK_THROWS_WITH_AS((void)make_model(ModelKind::Oscillator, p), doctest::Contains("x0"), ConfigurationError);
        CHECK_THROWS_AS((void)make_model(ModelKind::Linear), ConfigurationError);
    }

    TEST_CASE("linear model uses the matrix exponential as its exact solution") {
        const SquareMatrix a{{-2.0, 1.0}, {0.0, -0.5}};
        const auto m = make_linear_model(a, {{-2.0, 1}, {-0.5, 1}}, {1.0, 1.0});
        CHECK(exact_solution_residual(m, 0.0, 5.0, 50, 1e-4) <= 1e-6);
        CHECK_THROWS_AS((void)make_linear_model(a, {{-2.0, 1}}, {1.0, 1.0}), DomainError);
    }

    TEST_CASE("parse and print model ids") {
        for (auto kind : {ModelKind::Oscillator, ModelKind::Harmonic, ModelKind::Biomass, ModelKind::Trees,
                          ModelKind::Seasonal}) {
            CHECK(parse_model_kind(to_string(kind)) == kind);
        }
        CHECK_FALSE(parse_model_kind("kepler").has_value());
    }
}
