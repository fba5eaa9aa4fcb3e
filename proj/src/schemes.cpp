#include "nsfd/schemes.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "nsfd/errors.hpp"

namespace nsfd {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

void require_scheme(const StepContext& ctx, std::initializer_list<Scheme> allowed, const char* fn) {
    for (auto s : allowed) {
        if (ctx.spec().scheme == s) {
            return;
        }
    }
    throw ConfigurationError(std::string(fn) + ": context was built for scheme " +
                             std::string(to_string(ctx.spec().scheme)));
}

// X_{k+1} = P X_k + Q B^ ; semi-implicit product solved as a linear system.
Vector affine_step(const StepContext& ctx, std::span<const double> x_k, double t_k, NonlocalB nonlocal) {
    const auto& model = ctx.model();
    const auto& p = ctx.propagator();
    const auto& q = ctx.forcing_gain();
    if (const auto* state = std::get_if<StateForcing>(&model.forcing);
        state != nullptr && nonlocal == NonlocalB::SemiImplicitProduct) {
        const auto n = state->semi_implicit(x_k);
        const auto lhs = SquareMatrix::identity(model.dimension()) - q * n;
        const Lu<double> lu(lhs);
        if (lu.singular(1e-15)) {
            throw DegenerateStepError("semi-implicit step: zero pivot in (I - Q N(X_k))");
        }
        const auto rhs = p * x_k;
        return lu.solve(std::span<const double>(rhs));
    }
    auto next = p * x_k;
    if (!std::holds_alternative<NoForcing>(model.forcing)) {
        const auto b = ctx.forcing_hat(x_k, t_k, ctx.spec().forcing_approx);
        const auto qb = q * b;
        axpy(1.0, qb, next);
    }
    return next;
}

double half_angle_scale(double dt) {
    const double s = 2.0 * std::sin(0.5 * dt);
    return s * s;
}

}  // namespace

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::ExplicitEuler: return "explicit-euler";
        case Scheme::ImplicitEuler: return "implicit-euler";
        case Scheme::TraditionalNSFD: return "traditional-nsfd";
        case Scheme::MatrixNSFD: return "matrix-nsfd";
        case Scheme::ScalarNSFD: return "scalar-nsfd";
        case Scheme::GammaNSFD: return "gamma-nsfd";
        case Scheme::MickensOsc1: return "mickens1";
        case Scheme::MickensOsc2: return "mickens2";
        case Scheme::CorrectedOsc: return "corrected";
    }
    return "unknown";
}

std::string_view to_string(ForcingApprox f) noexcept {
    switch (f) {
        case ForcingApprox::Left: return "left";
        case ForcingApprox::Right: return "right";
        case ForcingApprox::Middle: return "middle";
        case ForcingApprox::Half: return "half";
        case ForcingApprox::Mean: return "mean";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view id) noexcept {
    for (auto s : {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::TraditionalNSFD, Scheme::MatrixNSFD,
                   Scheme::ScalarNSFD, Scheme::GammaNSFD, Scheme::MickensOsc1, Scheme::MickensOsc2,
                   Scheme::CorrectedOsc}) {
        if (to_string(s) == id) {
            return s;
        }
    }
    return std::nullopt;
}

std::optional<ForcingApprox> parse_forcing_approx(std::string_view id) noexcept {
    for (auto f : {ForcingApprox::Left, ForcingApprox::Right, ForcingApprox::Middle, ForcingApprox::Half,
                   ForcingApprox::Mean}) {
        if (to_string(f) == id) {
            return f;
        }
    }
    return std::nullopt;
}

Vector approximate_forcing(ForcingApprox strategy, const TimeForcing& forcing, double t_k, double dt,
                           bool allow_quadrature) {
    const double t_next = t_k + dt;
    switch (strategy) {
        case ForcingApprox::Left: return forcing.value(t_k);
        case ForcingApprox::Right: return forcing.value(t_next);
        case ForcingApprox::Middle: return forcing.value(t_k + 0.5 * dt);
        case ForcingApprox::Half: return scaled(0.5, add(forcing.value(t_k), forcing.value(t_next)));
        case ForcingApprox::Mean: {
            if (forcing.integral) {
                return scaled(1.0 / dt, forcing.integral(t_k, t_next));
            }
            if (!allow_quadrature) {
                throw ConfigurationError("mean forcing needs a closed-form integral or quadrature");
            }
            Vector acc;
            for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
                const auto b = forcing.value(t_k + 0.5 * dt * (1.0 + kGaussNodes[i]));
                if (acc.empty()) {
                    acc.assign(b.size(), 0.0);
                }
                axpy(0.5 * kGaussWeights[i], b, acc);
            }
            return acc;
        }
    }
    throw ConfigurationError("unknown forcing approximation");
}

StepContext::StepContext(const OdeModel& model, SchemeSpec spec, double dt, FixedPointOptions fixed_point)
    : model_(&model), spec_(spec), dt_(dt), fixed_point_(fixed_point) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigurationError("dt must be positive and finite");
    }
    const auto& a = model.a;
    const std::size_t n = model.dimension();
    if (is_second_order(spec.scheme) && model.kind != ModelKind::Oscillator) {
        throw ConfigurationError(std::string(to_string(spec.scheme)) +
                                 " is only defined for the 2-dimensional oscillator model");
    }
    if (spec.forcing_approx == ForcingApprox::Mean && !spec.allow_quadrature && model.time_dependent() &&
        !std::get<TimeForcing>(model.forcing).integral) {
        throw ConfigurationError("mean forcing needs a closed-form integral or quadrature");
    }

    const auto exact_coeffs = [&] {
        if (!model.spectrum.empty()) {
            return alpha_coeffs(a, model.spectrum, dt);
        }
        auto est = estimate_spectrum(a);
        auto c = alpha_coeffs(a, est.spectrum, dt);
        if (!c.warning) {
            c.warning = "spectrum estimated by root finding (lower trust)";
        }
        return c;
    };

    switch (spec.scheme) {
        case Scheme::MatrixNSFD: {
            const auto ep = exp_and_phi1(a * dt);
            phi_ = ep.phi1 * dt;
            p_ = SquareMatrix::identity(n) + *phi_ * a;
            q_ = *phi_;
            break;
        }
        case Scheme::ScalarNSFD:
        case Scheme::GammaNSFD:
        case Scheme::MickensOsc1:
        case Scheme::MickensOsc2:
        case Scheme::CorrectedOsc: {
            coeffs_ = spec.scheme == Scheme::GammaNSFD ? gamma_coeffs(char_poly(a), dt) : exact_coeffs();
            corrections_ = correction_factors(a, *coeffs_);
            const double a0 = (*coeffs_)[0];
            const double a1 = (*coeffs_)[1];
            const auto id = SquareMatrix::identity(n);
            const auto i_r1 = id + corrections_->r1;
            p_ = id * a0 + (i_r1 * a) * a1;
            q_ = (i_r1 + corrections_->r0) * a1;
            break;
        }
        case Scheme::ImplicitEuler:
            if (!model.state_dependent()) {
                implicit_lu_.emplace(SquareMatrix::identity(n) - a * dt);
                if (implicit_lu_->singular()) {
                    throw StepSizeError("implicit Euler: I - dt A is singular for this dt");
                }
            }
            break;
        case Scheme::ExplicitEuler:
        case Scheme::TraditionalNSFD:
            break;
    }
}

Vector StepContext::forcing_hat(std::span<const double> x_k, double t_k, ForcingApprox strategy) const {
    return std::visit(
        [&](const auto& f) -> Vector {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, NoForcing>) {
                return Vector(model_->dimension(), 0.0);
            } else if constexpr (std::is_same_v<F, ConstantForcing>) {
                return f.value;
            } else if constexpr (std::is_same_v<F, TimeForcing>) {
                return approximate_forcing(strategy, f, t_k, dt_, spec_.allow_quadrature);
            } else {
                return f.value(x_k);
            }
        },
        model_->forcing);
}

Vector step_explicit_euler(const StepContext& ctx, std::span<const double> x_k, double t_k) {
    const auto& model = ctx.model();
    auto f = model.a * x_k;
    axpy(1.0, ctx.forcing_hat(x_k, t_k, ForcingApprox::Left), f);
    Vector next(x_k.begin(), x_k.end());
    return axpy(ctx.dt(), f, next);
}

Vector step_implicit_euler(const StepContext& ctx, std::span<const double> x_k, double t_k) {
    const auto& model = ctx.model();
    const double dt = ctx.dt();
    if (ctx.implicit_lu()) {
        Vector rhs(x_k.begin(), x_k.end());
        axpy(dt, ctx.forcing_hat(x_k, t_k, ForcingApprox::Right), rhs);
        return ctx.implicit_lu()->solve(std::span<const double>(rhs));
    }

    // X = X_k + dt (A X + B(X)) by damped fixed-point iteration.
    const double t_next = t_k + dt;
    const auto& opts = ctx.fixed_point();
    double residual = std::numeric_limits<double>::infinity();
    int total_iterations = 0;
    for (const double damping : {1.0, 0.5}) {
        Vector x(x_k.begin(), x_k.end());
        double first = -1.0;
        for (int it = 0; it < opts.max_iterations; ++it, ++total_iterations) {
            Vector g(x_k.begin(), x_k.end());
            axpy(dt, model.rhs(t_next, x), g);
            residual = max_abs_diff(g, x);
            if (residual <= opts.tolerance) {
                return x;
            }
            if (first < 0.0) {
                first = residual;
            }
            if (!std::isfinite(residual) || residual > 1e3 * first) {
                break;
            }
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] += damping * (g[i] - x[i]);
            }
        }
    }
    throw IterationError("implicit Euler fixed point did not converge (residual " + std::to_string(residual) +
                             ")",
                         residual, total_iterations);
}

Vector step_traditional_nsfd(const StepContext& ctx, std::span<const double> x_k, double t_k) {
    const auto& model = ctx.model();
    const double dt = ctx.dt();
    auto f = model.a * x_k;
    axpy(1.0, ctx.forcing_hat(x_k, t_k, ctx.spec().forcing_approx), f);
    Vector next(x_k.begin(), x_k.end());
    for (std::size_t i = 0; i < next.size(); ++i) {
        // Denominator (e^{lambda dt} - 1)/lambda with the diagonal entry as rate.
        const double rate = model.a(i, i);
        const double denom = rate == 0.0 ? dt : std::expm1(rate * dt) / rate;
        next[i] += denom * f[i];
    }
    return next;
}

Vector step_matrix_nsfd(const StepContext& ctx, std::span<const double> x_k, double t_k) {
    require_scheme(ctx, {Scheme::MatrixNSFD}, "step_matrix_nsfd");
    return affine_step(ctx, x_k, t_k, ctx.spec().nonlocal_b);
}

Vector step_scalar_nsfd(const StepContext& ctx, std::span<const double> x_k, double t_k) {
    require_scheme(ctx, {Scheme::ScalarNSFD, Scheme::CorrectedOsc, Scheme::MickensOsc1, Scheme::MickensOsc2},
                   "step_scalar_nsfd");
    return affine_step(ctx, x_k, t_k, ctx.spec().nonlocal_b);
}

Vector step_gamma_nsfd(const StepContext& ctx, std::span<const double> x_k, double t_k) {
    require_scheme(ctx, {Scheme::GammaNSFD}, "step_gamma_nsfd");
    return affine_step(ctx, x_k, t_k, ctx.spec().nonlocal_b);
}

Vector step(const StepContext& ctx, std::span<const double> x_k, double t_k) {
    switch (ctx.spec().scheme) {
        case Scheme::ExplicitEuler: return step_explicit_euler(ctx, x_k, t_k);
        case Scheme::ImplicitEuler: return step_implicit_euler(ctx, x_k, t_k);
        case Scheme::TraditionalNSFD: return step_traditional_nsfd(ctx, x_k, t_k);
        case Scheme::MatrixNSFD: return step_matrix_nsfd(ctx, x_k, t_k);
        case Scheme::ScalarNSFD: return step_scalar_nsfd(ctx, x_k, t_k);
        case Scheme::GammaNSFD: return step_gamma_nsfd(ctx, x_k, t_k);
        case Scheme::MickensOsc1:
        case Scheme::MickensOsc2:
        case Scheme::CorrectedOsc: break;
    }
    throw ConfigurationError(std::string(to_string(ctx.spec().scheme)) +
                             " is a two-step recurrence; use step_osc_second_order");
}

double step_osc_second_order(Scheme variant, double dt, double x_prev, double x_k) {
    const double s = half_angle_scale(dt);
    const double c = std::cos(0.5 * dt);
    const double c2 = c * c;
    const double base = 2.0 * x_k - x_prev - s * x_k;
    double pivot = 1.0;
    double numer = 0.0;
    switch (variant) {
        case Scheme::MickensOsc1:
            return base - s * c2 * x_k * x_k;
        case Scheme::MickensOsc2:
            pivot = 1.0 + 0.5 * s * c2 * x_k;
            numer = base - 0.5 * s * c2 * x_k * x_prev;
            break;
        case Scheme::CorrectedOsc:
            pivot = 1.0 + 0.5 * s * x_k;
            numer = base - 0.5 * s * x_k * x_prev;
            break;
        default:
            throw ConfigurationError(std::string(to_string(variant)) + " is not an oscillator recurrence");
    }
    if (pivot == 0.0) {
        throw DegenerateStepError("oscillator recurrence: zero pivot 1 + coefficient * x_k");
    }
    return numer / pivot;
}

double osc_second_order_residual(Scheme variant, double dt, double x_prev, double x_k, double x_next) {
    // Recurrence multiplied through by [2 sin(dt/2)]^2.
    const double s = half_angle_scale(dt);
    const double c = std::cos(0.5 * dt);
    const double c2 = c * c;
    const double diff = x_next - 2.0 * x_k + x_prev + s * x_k;
    switch (variant) {
        case Scheme::MickensOsc1: return diff + s * c2 * x_k * x_k;
        case Scheme::MickensOsc2: return diff + s * c2 * x_k * 0.5 * (x_next + x_prev);
        case Scheme::CorrectedOsc: return diff + s * x_k * 0.5 * (x_prev + x_next);
        default: break;
    }
    throw ConfigurationError(std::string(to_string(variant)) + " is not an oscillator recurrence");
}

std::size_t step_count(double dt, double t_end) {
    if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t_end)) {
        throw ConfigurationError("dt must be positive and t_end finite");
    }
    const double ratio = t_end / dt;
    if (ratio < 1.0 - 1e-9) {
        throw ConfigurationError("t_end must be at least dt");
    }
    return static_cast<std::size_t>(std::floor(ratio + 1e-9));
}

Trajectory integrate(const OdeModel& model, const SchemeSpec& spec, double dt, double t_end,
                     std::optional<Vector> x0) {
    const std::size_t steps = step_count(dt, t_end);
    const StepContext ctx(model, spec, dt);
    const Vector start = x0 ? std::move(*x0) : model.initial_state;
    if (start.size() != model.dimension()) {
        throw ConfigurationError("initial state dimension does not match the model");
    }

    Trajectory traj;
    traj.dt = dt;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);

    if (!is_second_order(spec.scheme)) {
        Vector x = start;
        traj.times.push_back(0.0);
        traj.states.push_back(x);
        for (std::size_t k = 0; k < steps; ++k) {
            Vector next;
            try {
                next = step(ctx, x, static_cast<double>(k) * dt);
            } catch (const StepError&) {
                throw;
            } catch (const Error& e) {
                throw StepError("step " + std::to_string(k) + ": " + e.what(), k);
            }
            if (!all_finite(next)) {
                traj.blow_up_step = k + 1;
                break;
            }
            x = std::move(next);
            traj.times.push_back(static_cast<double>(k + 1) * dt);
            traj.states.push_back(x);
        }
        return traj;
    }

    // x_1 from the corrected system form; one extra iterate for y_N.
    std::vector<double> xs;
    xs.reserve(steps + 2);
    xs.push_back(start[0]);
    xs.push_back(affine_step(ctx, start, 0.0, NonlocalB::SemiImplicitProduct)[0]);
    for (std::size_t k = 1; k <= steps; ++k) {
        double next = 0.0;
        try {
            next = step_osc_second_order(spec.scheme, dt, xs[k - 1], xs[k]);
        } catch (const Error& e) {
            throw StepError("step " + std::to_string(k) + ": " + e.what(), k);
        }
        xs.push_back(next);
        if (!std::isfinite(next)) {
            break;
        }
    }
    const double cs = std::cos(dt);
    const double sn = std::sin(dt);
    const double th = std::tan(0.5 * dt);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double y =
            k + 1 < xs.size() ? (xs[k + 1] - cs * xs[k]) / sn + th * xs[k] * xs[k + 1]
                              : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(xs[k]) || !std::isfinite(y)) {
            traj.blow_up_step = k;
            break;
        }
        traj.times.push_back(static_cast<double>(k) * dt);
        traj.states.push_back({xs[k], y});
    }
    return traj;
}

}  // namespace nsfd
