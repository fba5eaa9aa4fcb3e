#include "nsfd/elliptic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "nsfd/errors.hpp"

namespace nsfd {

namespace {

constexpr int kMaxAgmSteps = 40;

void require_parameter(double m, bool allow_one) {
    if (!(m >= 0.0) || m > 1.0 || (!allow_one && m == 1.0)) {
        throw DomainError("elliptic parameter m = " + std::to_string(m) + " outside " +
                          (allow_one ? "[0, 1]" : "[0, 1)"));
    }
}

}  // namespace

AgmResult agm(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) {
        throw DomainError("agm: arguments must be non-negative");
    }
    AgmResult out;
    while (std::abs(a - b) > 1e-15 * a && out.iterations < kMaxAgmSteps) {
        const double next = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = next;
        ++out.iterations;
    }
    out.value = 0.5 * (a + b);
    return out;
}

double elliptic_K(double m) {
    require_parameter(m, false);
    return std::numbers::pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)).value);
}

JacobiElliptic jacobi_elliptic(double u, double m) {
    require_parameter(m, true);
    if (!std::isfinite(u)) {
        throw DomainError("jacobi_elliptic: non-finite argument");
    }
    if (m == 0.0) {
        return {std::sin(u), std::cos(u), 1.0};
    }
    if (m == 1.0) {
        const double sech = 1.0 / std::cosh(u);
        return {std::tanh(u), sech, sech};
    }

    std::array<double, kMaxAgmSteps + 1> a{};
    std::array<double, kMaxAgmSteps + 1> c{};
    a[0] = 1.0;
    c[0] = std::sqrt(m);
    double b = std::sqrt(1.0 - m);
    int n = 0;
    while (std::abs(c[n]) > 1e-16 && n < kMaxAgmSteps) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }

    double phi = std::ldexp(a[n] * u, n);
    for (int i = n; i >= 1; --i) {
        phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
    }
    const double s = std::sin(phi);
    const double co = std::cos(phi);
    // dn^2 = (1 - m) + m cn^2: both terms non-negative. The amplitude-ratio
    // form cos(phi0)/cos(phi1 - phi0) degenerates to 0/0 where sn = +-1.
    const double d = std::sqrt((1.0 - m) + m * co * co);
    return {s, co, d};
}

double jacobi_sn(double u, double m) { return jacobi_elliptic(u, m).sn; }

}  // namespace nsfd
