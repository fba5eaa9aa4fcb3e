#pragma once

// Small dense row-major matrices and vectors for the n <= 6 systems handled by
// the library. Templated on the scalar so the same code serves real matrices
// and the complex bidiagonal matrices used for divided differences.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "nsfd/errors.hpp"

namespace nsfd {

using Vector = std::vector<double>;

template <typename T>
class BasicMatrix {
public:
    using value_type = T;

    BasicMatrix() = default;

    explicit BasicMatrix(std::size_t n) : n_(n), data_(n * n, T{}) {
        if (n == 0) {
            throw DomainError("matrix dimension must be at least 1");
        }
    }

    BasicMatrix(std::size_t n, std::vector<T> entries) : n_(n), data_(std::move(entries)) {
        if (n == 0) {
            throw DomainError("matrix dimension must be at least 1");
        }
        if (data_.size() != n * n) {
            throw DomainError("matrix entries must number n*n");
        }
    }

    BasicMatrix(std::initializer_list<std::initializer_list<T>> rows) : n_(rows.size()) {
        if (n_ == 0) {
            throw DomainError("matrix dimension must be at least 1");
        }
        data_.reserve(n_ * n_);
        for (const auto& row : rows) {
            if (row.size() != n_) {
                throw DomainError("matrix must be square");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    [[nodiscard]] static BasicMatrix identity(std::size_t n) {
        BasicMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = T{1};
        }
        return m;
    }

    [[nodiscard]] static BasicMatrix zero(std::size_t n) { return BasicMatrix(n); }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::span<const T> entries() const noexcept { return data_; }

    T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * n_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * n_ + c]; }

    [[nodiscard]] bool all_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(), [](const T& v) {
            if constexpr (std::is_floating_point_v<T>) {
                return std::isfinite(v);
            } else {
                return std::isfinite(v.real()) && std::isfinite(v.imag());
            }
        });
    }

    [[nodiscard]] T trace() const noexcept {
        T s{};
        for (std::size_t i = 0; i < n_; ++i) {
            s += (*this)(i, i);
        }
        return s;
    }

    /// Induced infinity norm (max absolute row sum).
    [[nodiscard]] double norm_inf() const noexcept {
        double best = 0.0;
        for (std::size_t r = 0; r < n_; ++r) {
            double row = 0.0;
            for (std::size_t c = 0; c < n_; ++c) {
                row += std::abs((*this)(r, c));
            }
            best = std::max(best, row);
        }
        return best;
    }

    /// Induced 1-norm (max absolute column sum).
    [[nodiscard]] double norm_1() const noexcept {
        double best = 0.0;
        for (std::size_t c = 0; c < n_; ++c) {
            double col = 0.0;
            for (std::size_t r = 0; r < n_; ++r) {
                col += std::abs((*this)(r, c));
            }
            best = std::max(best, col);
        }
        return best;
    }

    [[nodiscard]] double max_abs() const noexcept {
        double best = 0.0;
        for (const auto& v : data_) {
            best = std::max(best, static_cast<double>(std::abs(v)));
        }
        return best;
    }

    BasicMatrix& operator+=(const BasicMatrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += o.data_[i];
        }
        return *this;
    }

    BasicMatrix& operator-=(const BasicMatrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] -= o.data_[i];
        }
        return *this;
    }

    BasicMatrix& operator*=(T s) noexcept {
        for (auto& v : data_) {
            v *= s;
        }
        return *this;
    }

    friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
    friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
    friend BasicMatrix operator*(BasicMatrix a, T s) { return a *= s; }
    friend BasicMatrix operator*(T s, BasicMatrix a) { return a *= s; }

    friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
        a.check_same(b);
        const std::size_t n = a.n_;
        BasicMatrix out(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const T aik = a(i, k);
                for (std::size_t j = 0; j < n; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

    friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

private:
    void check_same(const BasicMatrix& o) const {
        if (o.n_ != n_) {
            throw DomainError("matrix dimension mismatch");
        }
    }

    std::size_t n_ = 0;
    std::vector<T> data_;
};

using SquareMatrix = BasicMatrix<double>;
using ComplexMatrix = BasicMatrix<std::complex<double>>;

[[nodiscard]] inline Vector operator*(const SquareMatrix& m, std::span<const double> x) {
    if (x.size() != m.size()) {
        throw DomainError("matrix-vector dimension mismatch");
    }
    Vector out(m.size(), 0.0);
    for (std::size_t r = 0; r < m.size(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < m.size(); ++c) {
            s += m(r, c) * x[c];
        }
        out[r] = s;
    }
    return out;
}

[[nodiscard]] inline Vector operator*(const SquareMatrix& m, const Vector& x) {
    return m * std::span<const double>(x);
}

// Vector helpers. Kept free functions over std::vector rather than a wrapper
// type: trajectories store plain vectors.

inline Vector& axpy(double a, std::span<const double> x, Vector& y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += a * x[i];
    }
    return y;
}

[[nodiscard]] inline Vector add(std::span<const double> a, std::span<const double> b) {
    Vector out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += b[i];
    }
    return out;
}

[[nodiscard]] inline Vector scaled(double s, std::span<const double> a) {
    Vector out(a.begin(), a.end());
    for (auto& v : out) {
        v *= s;
    }
    return out;
}

[[nodiscard]] inline double norm2(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) {
        s += v * v;
    }
    return std::sqrt(s);
}

[[nodiscard]] inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        best = std::max(best, std::abs(a[i] - b[i]));
    }
    return best;
}

[[nodiscard]] inline bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

/// LU factorization with partial pivoting.
template <typename T>
class Lu {
public:
    explicit Lu(BasicMatrix<T> m) : lu_(std::move(m)), perm_(lu_.size()) {
        const std::size_t n = lu_.size();
        for (std::size_t i = 0; i < n; ++i) {
            perm_[i] = i;
        }
        scale_ = lu_.max_abs();
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t r = k + 1; r < n; ++r) {
                if (std::abs(lu_(r, k)) > best) {
                    best = std::abs(lu_(r, k));
                    p = r;
                }
            }
            min_pivot_ = (k == 0) ? best : std::min(min_pivot_, best);
            if (p != k) {
                for (std::size_t c = 0; c < n; ++c) {
                    std::swap(lu_(k, c), lu_(p, c));
                }
                std::swap(perm_[k], perm_[p]);
                sign_ = -sign_;
            }
            if (best == 0.0) {
                continue;
            }
            for (std::size_t r = k + 1; r < n; ++r) {
                const T f = lu_(r, k) / lu_(k, k);
                lu_(r, k) = f;
                for (std::size_t c = k + 1; c < n; ++c) {
                    lu_(r, c) -= f * lu_(k, c);
                }
            }
        }
    }

    /// True when some pivot is negligible relative to the largest input entry.
    [[nodiscard]] bool singular(double rel_tol = 1e-13) const noexcept {
        return min_pivot_ <= rel_tol * static_cast<double>(lu_.size()) * scale_;
    }

    [[nodiscard]] T determinant() const noexcept {
        T d = static_cast<T>(sign_);
        for (std::size_t i = 0; i < lu_.size(); ++i) {
            d *= lu_(i, i);
        }
        return d;
    }

    [[nodiscard]] std::vector<T> solve(std::span<const T> b) const {
        const std::size_t n = lu_.size();
        if (singular(0.0)) {
            throw DegenerateStepError("linear solve with singular matrix");
        }
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            T s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) {
                s -= lu_(i, j) * x[j];
            }
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            T s = x[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                s -= lu_(i, j) * x[j];
            }
            x[i] = s / lu_(i, i);
        }
        return x;
    }

    [[nodiscard]] BasicMatrix<T> solve(const BasicMatrix<T>& b) const {
        const std::size_t n = lu_.size();
        BasicMatrix<T> out(n);
        std::vector<T> col(n);
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t r = 0; r < n; ++r) {
                col[r] = b(r, c);
            }
            const auto x = solve(std::span<const T>(col));
            for (std::size_t r = 0; r < n; ++r) {
                out(r, c) = x[r];
            }
        }
        return out;
    }

    [[nodiscard]] BasicMatrix<T> inverse() const { return solve(BasicMatrix<T>::identity(lu_.size())); }

private:
    BasicMatrix<T> lu_;
    std::vector<std::size_t> perm_;
    double scale_ = 0.0;
    double min_pivot_ = 0.0;
    int sign_ = 1;
};

[[nodiscard]] inline double determinant(const SquareMatrix& m) { return Lu<double>(m).determinant(); }

[[nodiscard]] inline SquareMatrix inverse(const SquareMatrix& m) { return Lu<double>(m).inverse(); }

[[nodiscard]] inline Vector solve(const SquareMatrix& m, std::span<const double> b) {
    return Lu<double>(m).solve(b);
}

}  // namespace nsfd
