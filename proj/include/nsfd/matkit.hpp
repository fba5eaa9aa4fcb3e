#pragma once

// Coefficient machinery for Cayley-Hamilton based schemes:
//   e^{dt A} = a_0 I + a_1 A + ... + a_{n-1} A^{n-1}
// plus the matrix functions (expm, phi1) used as exact propagators and oracles.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nsfd/matrix.hpp"

namespace nsfd {

/// Coefficients c_0..c_{n-1} with A^n = sum_j c_j A^j.
struct CharPolyCoeffs {
    std::vector<double> c;

    [[nodiscard]] std::size_t size() const noexcept { return c.size(); }
    [[nodiscard]] double operator[](std::size_t j) const noexcept { return c[j]; }
};

struct Eigenvalue {
    std::complex<double> value;
    int multiplicity = 1;
};

using Spectrum = std::vector<Eigenvalue>;

enum class CoefficientKind { Exact, TruncatedOrderN };

/// Per-step scalars a_0..a_{n-1}: exact alpha_j or truncated gamma_j.
struct StepCoefficients {
    double dt = 0.0;
    std::vector<double> a;
    CoefficientKind kind = CoefficientKind::Exact;
    /// Largest discarded imaginary part (exact coefficients only).
    double max_imag = 0.0;
    /// Set when the interpolation nodes are clustered enough to distrust the result.
    std::optional<std::string> warning;

    [[nodiscard]] std::size_t size() const noexcept { return a.size(); }
    [[nodiscard]] double operator[](std::size_t j) const noexcept { return a[j]; }
};

struct CorrectionFactors {
    SquareMatrix r0;
    SquareMatrix r1;
    double dt = 0.0;
};

/// Characteristic polynomial by the Faddeev-LeVerrier trace recursion.
[[nodiscard]] CharPolyCoeffs char_poly(const SquareMatrix& a);

/// beta_{k,0..n-1} such that A^k = sum_j beta_{kj} A^j.
[[nodiscard]] std::vector<double> power_reduction(const CharPolyCoeffs& c, std::size_t k);

/// Matrix exponential: scaling and squaring around the [13/13] Pade approximant.
[[nodiscard]] SquareMatrix expm(const SquareMatrix& m);
[[nodiscard]] ComplexMatrix expm(const ComplexMatrix& m);

/// phi1(M) = sum_k M^k/(k+1)!, so that M phi1(M) = e^M - I even for singular M.
[[nodiscard]] SquareMatrix phi1(const SquareMatrix& m);

struct ExpPhi {
    SquareMatrix exp;
    SquareMatrix phi1;
};

/// e^M and phi1(M) from one scaled series and the doubling
/// phi1(2M) = phi1(M) (e^M + I) / 2.
[[nodiscard]] ExpPhi exp_and_phi1(const SquareMatrix& m);

/// sum_j a_j A^j.
[[nodiscard]] SquareMatrix matrix_polynomial(std::span<const double> a, const SquareMatrix& m);

/// Exact alpha_j(dt): Hermite interpolation of z -> e^{dt z} on the spectrum.
///
/// The interpolant is formed in Newton form; the confluent divided differences
/// of the exponential are read off the first row of exp(dt J), with J the
/// bidiagonal matrix carrying the nodes on its diagonal and ones above it.
/// Every divided difference then keeps full relative precision as dt -> 0,
/// which a direct confluent Vandermonde solve does not.
[[nodiscard]] StepCoefficients alpha_coeffs(const SquareMatrix& a, const Spectrum& spectrum, double dt);

/// gamma_j = dt^j/j! + dt^n/n! c_j, the order-n truncation of alpha_j.
[[nodiscard]] StepCoefficients gamma_coeffs(const CharPolyCoeffs& c, double dt);

/// R0 = (a_0 - 1)/a_1 A^{-1}, R1 = sum_{j=2}^{n-1} a_j/a_1 A^{j-1}.
[[nodiscard]] CorrectionFactors correction_factors(const SquareMatrix& a, const StepCoefficients& coeffs);

/// Confluent Vandermonde matrix of the spectrum: row (lambda, d) holds
/// d/dz^d z^j at lambda.
[[nodiscard]] ComplexMatrix confluent_vandermonde(const Spectrum& spectrum);

/// Throws DomainError unless the multiplicities are positive and sum to n.
void validate_spectrum(const Spectrum& spectrum, std::size_t n);

struct EstimatedSpectrum {
    Spectrum spectrum;
    /// Always true: roots from iteration are not as trustworthy as a model's known spectrum.
    bool lower_trust = true;
};

/// Fallback when a model has no known spectrum: Durand-Kerner on the
/// characteristic polynomial, roots closer than `cluster_tol` merged.
[[nodiscard]] EstimatedSpectrum estimate_spectrum(const SquareMatrix& a, double cluster_tol = 1e-6);

}  // namespace nsfd
