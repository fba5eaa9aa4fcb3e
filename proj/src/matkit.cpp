#include "nsfd/matkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace nsfd {

namespace {

void require_finite(const SquareMatrix& m, const char* what) {
    if (!m.all_finite()) {
        throw DomainError(std::string(what) + ": matrix has non-finite entries");
    }
}

// [13/13] Pade coefficients and the 1-norm bound below which no scaling is
// needed (Higham 2005).
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

template <typename T>
BasicMatrix<T> expm_impl(const BasicMatrix<T>& m) {
    if (!m.all_finite()) {
        throw DomainError("expm: matrix has non-finite entries");
    }
    const std::size_t n = m.size();
    const double norm = m.norm_1();
    int s = 0;
    if (norm > kTheta13) {
        s = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    }
    if (s > 1000) {
        throw RangeError("expm: norm too large, result overflows");
    }
    BasicMatrix<T> a = m;
    a *= T(std::ldexp(1.0, -s));

    const auto id = BasicMatrix<T>::identity(n);
    const auto a2 = a * a;
    const auto a4 = a2 * a2;
    const auto a6 = a4 * a2;
    const auto& b = kPade13;

    auto u_inner = a6 * T(b[13]) + a4 * T(b[11]) + a2 * T(b[9]);
    u_inner = a6 * u_inner;
    u_inner += a6 * T(b[7]) + a4 * T(b[5]) + a2 * T(b[3]) + id * T(b[1]);
    const auto u = a * u_inner;

    auto v = a6 * T(b[12]) + a4 * T(b[10]) + a2 * T(b[8]);
    v = a6 * v;
    v += a6 * T(b[6]) + a4 * T(b[4]) + a2 * T(b[2]) + id * T(b[0]);

    auto result = Lu<T>(v - u).solve(v + u);
    for (int i = 0; i < s; ++i) {
        result = result * result;
    }
    if (!result.all_finite()) {
        throw RangeError("expm: result overflows");
    }
    return result;
}

std::complex<double> ipow(std::complex<double> z, std::size_t k) {
    std::complex<double> r = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        r *= z;
    }
    return r;
}

double falling_factorial(std::size_t j, std::size_t d) {
    double r = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        r *= static_cast<double>(j - i);
    }
    return r;
}

bool closed_under_conjugation(const Spectrum& spectrum) {
    for (const auto& ev : spectrum) {
        const double tol = 1e-12 * std::max(1.0, std::abs(ev.value));
        const bool found = std::any_of(spectrum.begin(), spectrum.end(), [&](const Eigenvalue& o) {
            return o.multiplicity == ev.multiplicity && std::abs(o.value - std::conj(ev.value)) <= tol;
        });
        if (!found) {
            return false;
        }
    }
    return true;
}

}  // namespace

CharPolyCoeffs char_poly(const SquareMatrix& a) {
    require_finite(a, "char_poly");
    const std::size_t n = a.size();
    // det(zI - A) = z^n + p_{n-1} z^{n-1} + ... + p_0 ; c_j = -p_j.
    std::vector<double> p(n + 1, 0.0);
    p[n] = 1.0;
    auto mk = SquareMatrix::zero(n);
    const auto id = SquareMatrix::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        mk = a * mk + id * p[n - k + 1];
        p[n - k] = -(a * mk).trace() / static_cast<double>(k);
    }
    CharPolyCoeffs out;
    out.c.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.c[j] = -p[j];
    }
    return out;
}

std::vector<double> power_reduction(const CharPolyCoeffs& c, std::size_t k) {
    const std::size_t n = c.size();
    if (n == 0) {
        throw DomainError("power_reduction: empty coefficient vector");
    }
    std::vector<double> beta(n, 0.0);
    if (k < n) {
        beta[k] = 1.0;
        return beta;
    }
    beta = c.c;
    for (std::size_t step = n + 1; step <= k; ++step) {
        const double top = beta[n - 1];
        std::vector<double> next(n);
        next[0] = c[0] * top;
        for (std::size_t j = 1; j < n; ++j) {
            next[j] = c[j] * top + beta[j - 1];
        }
        beta = std::move(next);
    }
    return beta;
}

SquareMatrix expm(const SquareMatrix& m) { return expm_impl(m); }

ComplexMatrix expm(const ComplexMatrix& m) { return expm_impl(m); }

ExpPhi exp_and_phi1(const SquareMatrix& m) {
    require_finite(m, "phi1");
    const std::size_t n = m.size();
    const double norm = m.norm_1();
    int s = 0;
    if (norm > 0.5) {
        s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    if (s > 1000) {
        throw RangeError("phi1: norm too large, result overflows");
    }
    const auto x = m * std::ldexp(1.0, -s);
    const auto id = SquareMatrix::identity(n);

    // ||x|| <= 1/2: 16 terms of sum x^k/(k+1)! leave a tail below 1e-20.
    constexpr int kTerms = 16;
    std::array<double, kTerms + 1> inv_fact{};
    inv_fact[0] = 1.0;
    for (int k = 1; k <= kTerms; ++k) {
        inv_fact[k] = inv_fact[k - 1] / k;
    }
    auto phi = id * inv_fact[kTerms];
    for (int k = kTerms - 1; k >= 0; --k) {
        phi = x * phi + id * inv_fact[k + 1];
    }
    auto e = id + x * phi;
    for (int i = 0; i < s; ++i) {
        phi = (phi * (e + id)) * 0.5;
        e = e * e;
    }
    if (!phi.all_finite() || !e.all_finite()) {
        throw RangeError("phi1: result overflows");
    }
    return {std::move(e), std::move(phi)};
}

SquareMatrix phi1(const SquareMatrix& m) { return exp_and_phi1(m).phi1; }

SquareMatrix matrix_polynomial(std::span<const double> a, const SquareMatrix& m) {
    const std::size_t n = m.size();
    auto out = SquareMatrix::zero(n);
    auto power = SquareMatrix::identity(n);
    for (std::size_t j = 0; j < a.size(); ++j) {
        out += power * a[j];
        if (j + 1 < a.size()) {
            power = power * m;
        }
    }
    return out;
}

void validate_spectrum(const Spectrum& spectrum, std::size_t n) {
    int total = 0;
    for (const auto& ev : spectrum) {
        if (ev.multiplicity < 1) {
            throw DomainError("spectrum: multiplicities must be positive");
        }
        if (!std::isfinite(ev.value.real()) || !std::isfinite(ev.value.imag())) {
            throw DomainError("spectrum: non-finite eigenvalue");
        }
        total += ev.multiplicity;
    }
    if (total != static_cast<int>(n)) {
        throw DomainError("spectrum: multiplicities sum to " + std::to_string(total) + ", expected " +
                          std::to_string(n));
    }
}

ComplexMatrix confluent_vandermonde(const Spectrum& spectrum) {
    std::size_t n = 0;
    for (const auto& ev : spectrum) {
        n += static_cast<std::size_t>(ev.multiplicity);
    }
    ComplexMatrix v(n);
    std::size_t row = 0;
    for (const auto& ev : spectrum) {
        for (std::size_t d = 0; d < static_cast<std::size_t>(ev.multiplicity); ++d, ++row) {
            for (std::size_t j = d; j < n; ++j) {
                v(row, j) = falling_factorial(j, d) * ipow(ev.value, j - d);
            }
        }
    }
    return v;
}

StepCoefficients alpha_coeffs(const SquareMatrix& a, const Spectrum& spectrum, double dt) {
    require_finite(a, "alpha_coeffs");
    const std::size_t n = a.size();
    validate_spectrum(spectrum, n);
    if (!(dt >= 0.0) || !std::isfinite(dt)) {
        throw DomainError("alpha_coeffs: dt must be finite and non-negative");
    }

    std::vector<std::complex<double>> nodes;
    nodes.reserve(n);
    for (const auto& ev : spectrum) {
        nodes.insert(nodes.end(), static_cast<std::size_t>(ev.multiplicity), ev.value);
    }

    // Divided differences of z -> e^{dt z}: first row of exp(dt J).
    ComplexMatrix j(n);
    for (std::size_t i = 0; i < n; ++i) {
        j(i, i) = dt * nodes[i];
        if (i + 1 < n) {
            j(i, i + 1) = dt;
        }
    }
    const auto ej = expm(j);

    // Newton basis q_k(z) = prod_{i<k} (z - node_i), expanded in monomials.
    std::vector<std::complex<double>> alpha(n, 0.0);
    std::vector<std::complex<double>> basis(n, 0.0);
    basis[0] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto dd = ej(0, k);
        for (std::size_t p = 0; p <= k; ++p) {
            alpha[p] += dd * basis[p];
        }
        if (k + 1 < n) {
            for (std::size_t p = k + 2; p-- > 0;) {
                basis[p] = (p > 0 ? basis[p - 1] : 0.0) - nodes[k] * basis[p];
            }
        }
    }

    StepCoefficients out;
    out.dt = dt;
    out.kind = CoefficientKind::Exact;
    out.a.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        out.a[p] = alpha[p].real();
        out.max_imag = std::max(out.max_imag, std::abs(alpha[p].imag()));
    }

    if (!closed_under_conjugation(spectrum)) {
        out.warning = "spectrum is not closed under conjugation; imaginary parts discarded";
    } else if (spectrum.size() > 1) {
        // Clustered but distinct eigenvalues make the interpolation problem
        // itself ill-conditioned, whatever the evaluation route.
        const auto v = confluent_vandermonde(spectrum);
        const Lu<std::complex<double>> lu(v);
        const double cond = lu.singular(0.0) ? INFINITY : v.norm_1() * lu.inverse().norm_1();
        if (!(cond < 1e10)) {
            out.warning = "ill-conditioned confluent Vandermonde (condition ~" + std::to_string(cond) +
                          "); eigenvalues are clustered";
        }
    }
    return out;
}

StepCoefficients gamma_coeffs(const CharPolyCoeffs& c, double dt) {
    const std::size_t n = c.size();
    if (n < 2) {
        throw DomainError("gamma_coeffs: dimension must be at least 2");
    }
    if (!(dt >= 0.0) || !std::isfinite(dt)) {
        throw DomainError("gamma_coeffs: dt must be finite and non-negative");
    }
    StepCoefficients out;
    out.dt = dt;
    out.kind = CoefficientKind::TruncatedOrderN;
    out.a.resize(n);
    double term = 1.0;  // dt^j / j!
    for (std::size_t j = 0; j < n; ++j) {
        out.a[j] = term;
        term *= dt / static_cast<double>(j + 1);
    }
    for (std::size_t j = 0; j < n; ++j) {
        out.a[j] += term * c[j];
    }
    return out;
}

CorrectionFactors correction_factors(const SquareMatrix& a, const StepCoefficients& coeffs) {
    require_finite(a, "correction_factors");
    const std::size_t n = a.size();
    if (n < 2) {
        throw ConfigurationError("correction factors need n >= 2 (a_1 vanishes identically for n = 1)");
    }
    if (coeffs.size() != n) {
        throw DomainError("correction_factors: coefficient count does not match dimension");
    }
    const double a1 = coeffs[1];
    if (a1 == 0.0 || !std::isfinite(a1)) {
        throw StepSizeError("correction_factors: a_1(dt) vanishes; choose another step size");
    }
    const Lu<double> lu(a);
    if (lu.singular()) {
        throw ConfigurationError(
            "correction_factors: A is singular; use the matrix (phi1) form of the scheme instead");
    }
    CorrectionFactors out;
    out.dt = coeffs.dt;
    out.r0 = lu.inverse() * ((coeffs[0] - 1.0) / a1);
    out.r1 = SquareMatrix::zero(n);
    auto power = SquareMatrix::identity(n);
    for (std::size_t j = 2; j < n; ++j) {
        power = power * a;  // A^{j-1}
        out.r1 += power * (coeffs[j] / a1);
    }
    return out;
}

EstimatedSpectrum estimate_spectrum(const SquareMatrix& a, double cluster_tol) {
    const auto c = char_poly(a);
    const std::size_t n = c.size();
    // Monic p(z) = z^n - sum_j c_j z^j.
    auto eval = [&](std::complex<double> z) {
        std::complex<double> acc = 1.0;
        for (std::size_t j = n; j-- > 0;) {
            acc = acc * z - c[j];
        }
        return acc;
    };
    double bound = 0.0;
    for (double cj : c.c) {
        bound = std::max(bound, std::abs(cj));
    }
    bound += 1.0;

    std::vector<std::complex<double>> roots(n);
    const std::complex<double> seed(0.4, 0.9);
    for (std::size_t i = 0; i < n; ++i) {
        roots[i] = bound * ipow(seed, i + 1) / std::abs(ipow(seed, i + 1));
    }
    for (int iter = 0; iter < 2000; ++iter) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> denom = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k != i) {
                    denom *= roots[i] - roots[k];
                }
            }
            if (std::abs(denom) == 0.0) {
                denom = 1e-300;
            }
            const auto delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            change = std::max(change, std::abs(delta) / std::max(1.0, std::abs(roots[i])));
        }
        if (change < 1e-15) {
            break;
        }
    }

    EstimatedSpectrum out;
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) {
            continue;
        }
        std::complex<double> sum = roots[i];
        int count = 1;
        used[i] = true;
        for (std::size_t k = i + 1; k < n; ++k) {
            if (!used[k] && std::abs(roots[k] - roots[i]) <= cluster_tol * std::max(1.0, std::abs(roots[i]))) {
                used[k] = true;
                sum += roots[k];
                ++count;
            }
        }
        auto value = sum / static_cast<double>(count);
        if (std::abs(value.imag()) <= cluster_tol * std::max(1.0, std::abs(value))) {
            value = value.real();
        }
        out.spectrum.push_back({value, count});
    }
    std::sort(out.spectrum.begin(), out.spectrum.end(), [](const Eigenvalue& l, const Eigenvalue& r) {
        if (l.value.real() != r.value.real()) {
            return l.value.real() > r.value.real();
        }
        return l.value.imag() > r.value.imag();
    });
    // Make conjugate pairs exact mirrors so alpha_coeffs sees a closed spectrum.
    for (auto& ev : out.spectrum) {
        if (ev.value.imag() < 0.0) {
            for (const auto& other : out.spectrum) {
                if (other.value.imag() > 0.0 &&
                    std::abs(other.value - std::conj(ev.value)) <= 1e-8 * std::max(1.0, std::abs(ev.value))) {
                    ev.value = std::conj(other.value);
                }
            }
        }
    }
    return out;
}

}  // namespace nsfd
