#include "nsfd/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsfd/elliptic.hpp"
#include "nsfd/errors.hpp"

namespace nsfd {

namespace {

const SquareMatrix& biomass_matrix() {
    static const SquareMatrix a{{-1.0, 3.0, 0.0}, {0.0, -3.0, 5.0}, {0.0, 0.0, -5.0}};
    return a;
}

const SquareMatrix& rotation_matrix() {
    static const SquareMatrix a{{0.0, 1.0}, {-1.0, 0.0}};
    return a;
}

Spectrum biomass_spectrum() { return {{-1.0, 1}, {-3.0, 1}, {-5.0, 1}}; }

Spectrum rotation_spectrum() { return {{{0.0, 1.0}, 1}, {{0.0, -1.0}, 1}}; }

void require_finite_param(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw ConfigurationError(std::string("model parameter ") + name + " must be finite");
    }
}

Vector to_vector(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::Oscillator: return "oscillator";
        case ModelKind::Harmonic: return "harmonic";
        case ModelKind::Biomass: return "biomass";
        case ModelKind::Trees: return "trees";
        case ModelKind::Seasonal: return "seasonal";
        case ModelKind::Linear: return "linear";
    }
    return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view id) noexcept {
    for (auto kind : {ModelKind::Oscillator, ModelKind::Harmonic, ModelKind::Biomass, ModelKind::Trees,
                      ModelKind::Seasonal}) {
        if (to_string(kind) == id) {
            return kind;
        }
    }
    return std::nullopt;
}

OscillatorParams OscillatorParams::from_x0(double x0) {
    if (!(x0 > 0.0 && x0 < 0.5)) {
        throw ConfigurationError("oscillator: x0 must lie in (0, 1/2) for the closed-form solution, got " +
                                 std::to_string(x0));
    }
    const double root = std::sqrt(3.0 * (1.0 - 2.0 * x0) * (3.0 + 2.0 * x0));
    OscillatorParams p;
    p.x0 = x0;
    p.a = -12.0 * x0 * (1.0 + x0) / (root + 3.0 * (1.0 + 2.0 * x0));
    p.omega = 0.5 * std::sqrt(0.5 + x0 + root / 6.0);
    p.m = 0.5 + 3.0 * (2.0 * x0 * x0 + 2.0 * x0 - 1.0) / (3.0 + (1.0 + 2.0 * x0) * root);
    return p;
}

double OscillatorParams::period() const { return 2.0 * elliptic_K(m) / omega; }

std::array<double, 2> oscillator_exact(double t, const OscillatorParams& p) {
    const auto j = jacobi_elliptic(p.omega * t, p.m);
    return {p.x0 + p.a * j.sn * j.sn, 2.0 * p.a * p.omega * j.sn * j.cn * j.dn};
}

double energy(double x, double y) noexcept { return 0.5 * y * y + 0.5 * x * x + x * x * x / 3.0; }

std::array<double, 3> biomass_exact(double t, double z0) {
    const double e1 = std::exp(-t);
    const double e3 = std::exp(-3.0 * t);
    const double e5 = std::exp(-5.0 * t);
    return {15.0 / 8.0 * (e1 - 2.0 * e3 + e5) * z0, 2.5 * (e3 - e5) * z0, e5 * z0};
}

std::array<double, 3> biomass_forced_exact(double t, double z0, double zf) {
    const double e1 = std::exp(-t);
    const double e3 = std::exp(-3.0 * t);
    const double e5 = std::exp(-5.0 * t);
    return {
        15.0 / 8.0 * (e1 - 2.0 * e3 + e5) * z0 + (8.0 - 15.0 * e1 + 10.0 * e3 - 3.0 * e5) / 8.0 * zf,
        2.5 * (e3 - e5) * z0 + (2.0 - 5.0 * e3 + 3.0 * e5) / 6.0 * zf,
        e5 * (z0 - zf / 5.0) + zf / 5.0,
    };
}

std::array<double, 3> biomass_seasonal_exact(double t, double z0, double zf, double omega) {
    const double e1 = std::exp(-t);
    const double e3 = std::exp(-3.0 * t);
    const double e5 = std::exp(-5.0 * t);
    const double w2 = omega * omega;
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    const double d1 = 1.0 + w2;
    const double d3 = 9.0 + w2;
    const double d5 = 25.0 + w2;

    const double x = 15.0 / 8.0 * (e1 - 2.0 * e3 + e5) * z0 +
                     (8.0 - 15.0 * e1 + 10.0 * e3 - 3.0 * e5) / 8.0 * zf +
                     15.0 * (3.0 * (5.0 - 3.0 * w2) * c + omega * (23.0 - w2) * s) / (d1 * d3 * d5) * zf +
                     15.0 / 8.0 * (-e1 / d1 + 6.0 * e3 / d3 - 5.0 * e5 / d5) * zf;
    const double y = 2.5 * (e3 - e5) * z0 + (2.0 - 5.0 * e3 + 3.0 * e5) / 6.0 * zf +
                     5.0 * ((15.0 - w2) * c + 8.0 * omega * s) / (d3 * d5) * zf +
                     2.5 * (-3.0 * e3 / d3 + 5.0 * e5 / d5) * zf;
    const double z = e5 * z0 + (1.0 - e5) / 5.0 * zf + (5.0 * c + omega * s) / d5 * zf - 5.0 * e5 / d5 * zf;
    return {x, y, z};
}

Vector OdeModel::forcing_at(double t, std::span<const double> x) const {
    return std::visit(
        [&](const auto& f) -> Vector {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, NoForcing>) {
                return Vector(dimension(), 0.0);
            } else if constexpr (std::is_same_v<F, ConstantForcing>) {
                return f.value;
            } else if constexpr (std::is_same_v<F, TimeForcing>) {
                return f.value(t);
            } else {
                return f.value(x);
            }
        },
        forcing);
}

Vector OdeModel::rhs(double t, std::span<const double> x) const { return add(a * x, forcing_at(t, x)); }

double spectrum_residual(const SquareMatrix& a, const Spectrum& spectrum) {
    const auto c = char_poly(a);
    const std::size_t n = c.size();
    double worst = 0.0;
    for (const auto& ev : spectrum) {
        std::complex<double> p = 1.0;
        double scale = 1.0;
        for (std::size_t j = n; j-- > 0;) {
            p = p * ev.value - c[j];
            scale = scale * std::abs(ev.value) + std::abs(c[j]);
        }
        worst = std::max(worst, std::abs(p) / scale);
    }
    return worst;
}

double exact_solution_residual(const OdeModel& model, double t0, double t1, int samples, double h) {
    if (!model.has_exact()) {
        throw ConfigurationError("model " + model.id + " has no exact solution");
    }
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = t0 + (t1 - t0) * (samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1));
        const auto xp = model.exact(t + h);
        const auto xm = model.exact(t - h);
        const auto x = model.exact(t);
        const auto f = model.rhs(t, x);
        for (std::size_t k = 0; k < x.size(); ++k) {
            worst = std::max(worst, std::abs((xp[k] - xm[k]) / (2.0 * h) - f[k]));
        }
    }
    return worst;
}

OdeModel make_linear_model(SquareMatrix a, Spectrum spectrum, Vector x0, std::string id) {
    if (x0.size() != a.size()) {
        throw ConfigurationError("linear model: initial state dimension does not match A");
    }
    validate_spectrum(spectrum, a.size());
    if (spectrum_residual(a, spectrum) > 1e-10) {
        throw ConfigurationError("linear model: spectrum does not match the characteristic polynomial");
    }
    OdeModel m;
    m.id = std::move(id);
    m.kind = ModelKind::Linear;
    m.a = a;
    m.spectrum = std::move(spectrum);
    m.initial_state = x0;
    m.exact = [a = std::move(a), x0 = std::move(x0)](double t) { return expm(a * t) * x0; };
    return m;
}

OdeModel make_model(ModelKind kind, const ModelParams& params) {
    OdeModel m;
    m.kind = kind;
    m.id = std::string(to_string(kind));
    switch (kind) {
        case ModelKind::Oscillator: {
            const auto p = OscillatorParams::from_x0(params.x0);
            m.a = rotation_matrix();
            m.spectrum = rotation_spectrum();
            m.forcing = StateForcing{
                [](std::span<const double> x) { return Vector{0.0, -x[0] * x[0]}; },
                [](std::span<const double> xk) {
                    SquareMatrix n(2);
                    n(1, 0) = -xk[0];
                    return n;
                },
            };
            m.initial_state = {p.x0, 0.0};
            m.exact = [p](double t) {
                const auto v = oscillator_exact(t, p);
                return Vector{v[0], v[1]};
            };
            m.invariants.push_back({"energy", [](std::span<const double> x) { return energy(x[0], x[1]); }});
            m.oscillator = p;
            break;
        }
        case ModelKind::Harmonic: {
            require_finite_param(params.x0, "x0");
            const double x0 = params.x0;
            m.a = rotation_matrix();
            m.spectrum = rotation_spectrum();
            m.initial_state = {x0, 0.0};
            m.exact = [x0](double t) { return Vector{x0 * std::cos(t), -x0 * std::sin(t)}; };
            m.invariants.push_back(
                {"radius", [](std::span<const double> x) { return std::hypot(x[0], x[1]); }});
            break;
        }
        case ModelKind::Biomass: {
            require_finite_param(params.z0, "z0");
            const double z0 = params.z0;
            m.a = biomass_matrix();
            m.spectrum = biomass_spectrum();
            m.initial_state = {0.0, 0.0, z0};
            m.exact = [z0](double t) { return to_vector(biomass_exact(t, z0)); };
            break;
        }
        case ModelKind::Trees: {
            require_finite_param(params.z0, "z0");
            require_finite_param(params.zf, "zf");
            const double z0 = params.z0;
            const double zf = params.zf;
            m.a = biomass_matrix();
            m.spectrum = biomass_spectrum();
            m.forcing = ConstantForcing{{0.0, 0.0, zf}};
            m.initial_state = {0.0, 0.0, z0};
            m.exact = [z0, zf](double t) { return to_vector(biomass_forced_exact(t, z0, zf)); };
            break;
        }
        case ModelKind::Seasonal: {
            require_finite_param(params.z0, "z0");
            require_finite_param(params.zf, "zf");
            require_finite_param(params.omega, "omega");
            if (params.omega <= 0.0) {
                throw ConfigurationError("seasonal model: omega must be positive");
            }
            const double z0 = params.z0;
            const double zf = params.zf;
            const double w = params.omega;
            m.a = biomass_matrix();
            m.spectrum = biomass_spectrum();
            m.forcing = TimeForcing{
                [zf, w](double t) { return Vector{0.0, 0.0, zf * (1.0 + std::cos(w * t))}; },
                // zf [t + sin(w t)/w] between t0 and t1, differenced analytically.
                [zf, w](double t0, double t1) {
                    const double h = t1 - t0;
                    const double osc = 2.0 / w * std::cos(0.5 * w * (t0 + t1)) * std::sin(0.5 * w * h);
                    return Vector{0.0, 0.0, zf * (h + osc)};
                },
            };
            m.initial_state = {0.0, 0.0, z0};
            m.exact = [z0, zf, w](double t) { return to_vector(biomass_seasonal_exact(t, z0, zf, w)); };
            break;
        }
        case ModelKind::Linear:
            throw ConfigurationError("use make_linear_model for generic linear models");
    }
    if (spectrum_residual(m.a, m.spectrum) > 1e-10) {
        throw ConfigurationError("model " + m.id + ": spectrum does not match the characteristic polynomial");
    }
    return m;
}

}  // namespace nsfd
