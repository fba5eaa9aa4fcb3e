#pragma once

// Benchmark problems X' = A X + B(t, X) with closed-form solutions.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nsfd/matkit.hpp"
#include "nsfd/matrix.hpp"

namespace nsfd {

struct NoForcing {};

struct ConstantForcing {
    Vector value;
};

/// B depends on time only.
struct TimeForcing {
    std::function<Vector(double)> value;
    /// Optional closed-form integral over [t0, t1] (antiderivative difference,
    /// supplied by the model in a cancellation-free form).
    std::function<Vector(double, double)> integral;
};

/// B depends on the state only.
struct StateForcing {
    std::function<Vector(std::span<const double>)> value;
    /// Nonlocal form: B(X_k, X_{k+1}) = N(X_k) X_{k+1}, linear in the new state.
    std::function<SquareMatrix(std::span<const double>)> semi_implicit;
};

using Forcing = std::variant<NoForcing, ConstantForcing, TimeForcing, StateForcing>;

enum class ModelKind { Oscillator, Harmonic, Biomass, Trees, Seasonal, Linear };

[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;
[[nodiscard]] std::optional<ModelKind> parse_model_kind(std::string_view id) noexcept;

/// Closed-form data of x'' + x + x^2 = 0, x(0) = x0, x'(0) = 0:
/// x(t) = x0 + a sn^2(omega t | m).
struct OscillatorParams {
    double x0 = 0.25;
    double a = 0.0;
    double omega = 0.0;
    double m = 0.0;

    /// Throws ConfigurationError unless x0 lies in (0, 1/2).
    [[nodiscard]] static OscillatorParams from_x0(double x0);

    /// Period of x(t): sn^2 repeats after 2K(m) in its argument.
    [[nodiscard]] double period() const;
};

struct Invariant {
    std::string name;
    std::function<double(std::span<const double>)> evaluate;
};

struct ModelParams {
    double x0 = 0.25;  // oscillator displacement, harmonic amplitude
    double z0 = 1.0;
    double zf = 0.5;
    double omega = 6.283185307179586;
};

struct OdeModel {
    std::string id;
    ModelKind kind = ModelKind::Linear;
    SquareMatrix a;
    Spectrum spectrum;
    Forcing forcing = NoForcing{};
    Vector initial_state;
    /// Empty when no closed form is known.
    std::function<Vector(double)> exact;
    std::vector<Invariant> invariants;
    std::optional<OscillatorParams> oscillator;

    [[nodiscard]] std::size_t dimension() const noexcept { return a.size(); }
    [[nodiscard]] bool has_exact() const noexcept { return static_cast<bool>(exact); }
    [[nodiscard]] bool state_dependent() const noexcept {
        return std::holds_alternative<StateForcing>(forcing);
    }
    [[nodiscard]] bool time_dependent() const noexcept {
        return std::holds_alternative<TimeForcing>(forcing);
    }

    /// B(t, X).
    [[nodiscard]] Vector forcing_at(double t, std::span<const double> x) const;
    /// A X + B(t, X).
    [[nodiscard]] Vector rhs(double t, std::span<const double> x) const;
};

[[nodiscard]] OdeModel make_model(ModelKind kind, const ModelParams& params = {});

/// X' = A X with exact solution expm(t A) X0.
[[nodiscard]] OdeModel make_linear_model(SquareMatrix a, Spectrum spectrum, Vector x0,
                                         std::string id = "linear");

/// Max |p(lambda)| over the spectrum, relative to the coefficient scale; p is
/// the characteristic polynomial.
[[nodiscard]] double spectrum_residual(const SquareMatrix& a, const Spectrum& spectrum);

/// Max over `samples` points in [t0, t1] of the centered-difference residual
/// |(X(t+h) - X(t-h))/2h - A X(t) - B(t, X(t))|.
[[nodiscard]] double exact_solution_residual(const OdeModel& model, double t0, double t1, int samples,
                                             double h);

[[nodiscard]] std::array<double, 2> oscillator_exact(double t, const OscillatorParams& p);

/// E = y^2/2 + x^2/2 + x^3/3.
[[nodiscard]] double energy(double x, double y) noexcept;

[[nodiscard]] std::array<double, 3> biomass_exact(double t, double z0);
[[nodiscard]] std::array<double, 3> biomass_forced_exact(double t, double z0, double zf);
[[nodiscard]] std::array<double, 3> biomass_seasonal_exact(double t, double z0, double zf, double omega);

}  // namespace nsfd
