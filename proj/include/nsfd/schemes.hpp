#pragma once

// Steppers for X' = A X + B(t, X).
//
// The matrix, scalar and gamma NSFD schemes all advance as
//   X_{k+1} = P X_k + Q B^,
// with (P, Q) = (I + Phi A, Phi) for the matrix form and
// (a_0 I + a_1 (I + R1) A, a_1 (I + R1 + R0)) for the scalar forms. B^ is the
// step's approximation of the forcing; when it is the semi-implicit product
// N(X_k) X_{k+1}, the step is the linear solve (I - Q N) X_{k+1} = P X_k.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nsfd/matkit.hpp"
#include "nsfd/matrix.hpp"
#include "nsfd/models.hpp"

namespace nsfd {

enum class Scheme {
    ExplicitEuler,
    ImplicitEuler,
    TraditionalNSFD,
    MatrixNSFD,
    ScalarNSFD,
    GammaNSFD,
    MickensOsc1,
    MickensOsc2,
    CorrectedOsc,
};

enum class ForcingApprox { Left, Right, Middle, Half, Mean };

enum class NonlocalB { Explicit, SemiImplicitProduct };

struct SchemeSpec {
    Scheme scheme = Scheme::ScalarNSFD;
    ForcingApprox forcing_approx = ForcingApprox::Half;
    NonlocalB nonlocal_b = NonlocalB::SemiImplicitProduct;
    /// Lets ForcingApprox::Mean fall back to Gauss-Legendre when the model has
    /// no closed-form integral.
    bool allow_quadrature = true;
};

[[nodiscard]] std::string_view to_string(Scheme s) noexcept;
[[nodiscard]] std::string_view to_string(ForcingApprox f) noexcept;
[[nodiscard]] std::optional<Scheme> parse_scheme(std::string_view id) noexcept;
[[nodiscard]] std::optional<ForcingApprox> parse_forcing_approx(std::string_view id) noexcept;

/// The three x-only recurrences of the oscillator.
[[nodiscard]] constexpr bool is_second_order(Scheme s) noexcept {
    return s == Scheme::MickensOsc1 || s == Scheme::MickensOsc2 || s == Scheme::CorrectedOsc;
}

struct FixedPointOptions {
    double tolerance = 1e-14;
    int max_iterations = 200;
};

/// Approximation of a time-dependent forcing over [t_k, t_k + dt].
/// Mean is the average (1/dt) int B, not the bare integral.
[[nodiscard]] Vector approximate_forcing(ForcingApprox strategy, const TimeForcing& forcing, double t_k,
                                         double dt, bool allow_quadrature = true);

/// Everything a stepper needs that depends only on (model, scheme, dt).
/// Built once per run; immutable afterwards.
class StepContext {
public:
    StepContext(const OdeModel& model, SchemeSpec spec, double dt, FixedPointOptions fixed_point = {});

    [[nodiscard]] const OdeModel& model() const noexcept { return *model_; }
    [[nodiscard]] const SchemeSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] const FixedPointOptions& fixed_point() const noexcept { return fixed_point_; }

    /// alpha_j or gamma_j (scalar and gamma schemes, and the oscillator start-up).
    [[nodiscard]] const std::optional<StepCoefficients>& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] const std::optional<CorrectionFactors>& corrections() const noexcept { return corrections_; }
    /// Phi(dt) = dt phi1(dt A) (matrix scheme).
    [[nodiscard]] const std::optional<SquareMatrix>& phi() const noexcept { return phi_; }

    /// P and Q of the affine update (matrix, scalar and gamma schemes).
    [[nodiscard]] const SquareMatrix& propagator() const noexcept { return p_; }
    [[nodiscard]] const SquareMatrix& forcing_gain() const noexcept { return q_; }

    /// LU of (I - dt A) for the implicit Euler scheme on non-state-dependent models.
    [[nodiscard]] const std::optional<Lu<double>>& implicit_lu() const noexcept { return implicit_lu_; }

    /// Forcing seen by the step [t_k, t_k + dt] under the scheme's strategy;
    /// state forcing is evaluated explicitly at X_k.
    [[nodiscard]] Vector forcing_hat(std::span<const double> x_k, double t_k, ForcingApprox strategy) const;

private:
    const OdeModel* model_;
    SchemeSpec spec_;
    double dt_;
    FixedPointOptions fixed_point_;
    std::optional<StepCoefficients> coeffs_;
    std::optional<CorrectionFactors> corrections_;
    std::optional<SquareMatrix> phi_;
    SquareMatrix p_;
    SquareMatrix q_;
    std::optional<Lu<double>> implicit_lu_;
};

[[nodiscard]] Vector step_explicit_euler(const StepContext& ctx, std::span<const double> x_k, double t_k);
[[nodiscard]] Vector step_implicit_euler(const StepContext& ctx, std::span<const double> x_k, double t_k);
[[nodiscard]] Vector step_traditional_nsfd(const StepContext& ctx, std::span<const double> x_k, double t_k);
[[nodiscard]] Vector step_matrix_nsfd(const StepContext& ctx, std::span<const double> x_k, double t_k);
[[nodiscard]] Vector step_scalar_nsfd(const StepContext& ctx, std::span<const double> x_k, double t_k);
[[nodiscard]] Vector step_gamma_nsfd(const StepContext& ctx, std::span<const double> x_k, double t_k);

/// Dispatches a one-step scheme.
[[nodiscard]] Vector step(const StepContext& ctx, std::span<const double> x_k, double t_k);

/// x_{k+1} of the oscillator recurrences, given (x_{k-1}, x_k). Each
/// recurrence is symmetric in x_{k-1} and x_{k+1}, so calling with the pair
/// reversed steps backwards.
[[nodiscard]] double step_osc_second_order(Scheme variant, double dt, double x_prev, double x_k);

/// Left-hand minus right-hand side of the recurrence, for re-substitution checks.
[[nodiscard]] double osc_second_order_residual(Scheme variant, double dt, double x_prev, double x_k,
                                               double x_next);

struct Trajectory {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Vector> states;
    /// Index of the first non-finite state; integration stopped there.
    std::optional<std::size_t> blow_up_step;
};

/// Number of steps on [0, t_end]: floor(t_end/dt), robust to t_end/dt
/// landing a few ulps under an integer.
[[nodiscard]] std::size_t step_count(double dt, double t_end);

/// Runs a scheme over t_k = k dt, k = 0..floor(t_end/dt). Second-order
/// oscillator schemes start from x_1 given by one corrected system-form step,
/// and report y_k recovered from the same system relation.
[[nodiscard]] Trajectory integrate(const OdeModel& model, const SchemeSpec& spec, double dt, double t_end,
                                   std::optional<Vector> x0 = std::nullopt);

}  // namespace nsfd
