#pragma once

// Jacobi elliptic functions and the complete elliptic integral of the first
// kind. The second argument is always the parameter m = k^2, the convention
// in which sn(u, 0) = sin(u) and sn(u, 1) = tanh(u).

namespace nsfd {

struct AgmResult {
    double value = 0.0;
    int iterations = 0;
};

/// Arithmetic-geometric mean of two non-negative numbers.
[[nodiscard]] AgmResult agm(double a, double b);

/// K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta), m in [0, 1).
[[nodiscard]] double elliptic_K(double m);

struct JacobiElliptic {
    double sn = 0.0;
    double cn = 1.0;
    double dn = 1.0;
};

/// sn, cn, dn by the descending Landen (AGM) method with backward recurrence
/// of the amplitudes. m in [0, 1].
[[nodiscard]] JacobiElliptic jacobi_elliptic(double u, double m);

[[nodiscard]] double jacobi_sn(double u, double m);

}  // namespace nsfd
