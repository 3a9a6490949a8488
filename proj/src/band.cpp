#include "qif/band.hpp"

#include "qif/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qif {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

RealVector DenseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != cols_) throw ContractViolation("DenseMatrix::multiply: length mismatch");
    RealVector y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& b) const {
    if (b.rows_ != cols_) throw ContractViolation("DenseMatrix::multiply: shape mismatch");
    DenseMatrix c(rows_, b.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a * b(k, j);
        }
    return c;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix DenseMatrix::gram() const {
    DenseMatrix g(cols_, cols_);
    for (std::size_t k = 0; k < rows_; ++k)
        for (std::size_t i = 0; i < cols_; ++i) {
            const double a = (*this)(k, i);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) g(i, j) += a * (*this)(k, j);
        }
    return g;
}

RealVector DenseMatrix::transpose_multiply(std::span<const double> x) const {
    if (x.size() != rows_) throw ContractViolation("DenseMatrix::transpose_multiply: length mismatch");
    RealVector y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) y[j] += (*this)(i, j) * x[i];
    return y;
}

BandedMatrix::BandedMatrix(std::size_t order, std::size_t semibandwidth)
    : n_(order), beta_(semibandwidth), bands_(2 * semibandwidth + 1, std::vector<double>(order, 0.0)) {
    if (semibandwidth == 0 || order < 2 * semibandwidth + 1)
        throw ContractViolation("BandedMatrix: need beta >= 1 and order >= 2*beta+1 (order " +
                                std::to_string(order) + ", beta " + std::to_string(semibandwidth) + ")");
}

void BandedMatrix::set(std::size_t i, std::size_t j, double v) {
    const auto off = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
    if (i >= n_ || j >= n_ || std::abs(off) > static_cast<std::ptrdiff_t>(beta_))
        throw ContractViolation("BandedMatrix::set: (" + std::to_string(i) + "," + std::to_string(j) +
                                ") outside band");
    bands_[static_cast<std::size_t>(off + static_cast<std::ptrdiff_t>(beta_))][i] = v;
}

void BandedMatrix::add(std::size_t i, std::size_t j, double v) { set(i, j, (*this)(i, j) + v); }

std::span<const double> BandedMatrix::diagonal(int offset) const {
    if (std::abs(offset) > static_cast<int>(beta_)) throw ContractViolation("BandedMatrix::diagonal: offset");
    return bands_[static_cast<std::size_t>(offset + static_cast<int>(beta_))];
}

DenseMatrix BandedMatrix::to_dense() const {
    DenseMatrix d(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t lo = i > beta_ ? i - beta_ : 0;
        const std::size_t hi = std::min(n_ - 1, i + beta_);
        for (std::size_t j = lo; j <= hi; ++j) d(i, j) = (*this)(i, j);
    }
    return d;
}

double BandedMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (const auto& b : bands_)
        for (double v : b) m = std::max(m, std::abs(v));
    return m;
}

RealVector band_matvec(const BandedMatrix& a, std::span<const double> x) {
    const std::size_t n = a.order();
    if (x.size() != n)
        throw ContractViolation("band_matvec: vector length " + std::to_string(x.size()) + " != order " +
                                std::to_string(n));
    const int beta = static_cast<int>(a.semibandwidth());
    RealVector y(n, 0.0);
    for (int d = -beta; d <= beta; ++d) {
        const auto diag = a.diagonal(d);
        const std::size_t lo = d < 0 ? static_cast<std::size_t>(-d) : 0;
        const std::size_t hi = d > 0 ? n - static_cast<std::size_t>(d) : n;
        for (std::size_t i = lo; i < hi; ++i) y[i] += diag[i] * x[i + d];
    }
    return y;
}

RealVector cholesky_spd_solve(const DenseMatrix& a, std::span<const double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw ContractViolation("cholesky_spd_solve: shape mismatch");
    DenseMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0))
            throw NotPositiveDefinite("cholesky_spd_solve: non-positive pivot at " + std::to_string(j));
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    RealVector x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

RealVector project_nonneg(std::span<const double> x) {
    RealVector y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [](double v) { return std::max(0.0, v); });
    return y;
}

bool is_diagonally_dominant(const BandedMatrix& a) {
    const std::size_t n = a.order();
    const std::size_t beta = a.semibandwidth();
    bool strict = false;
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        const std::size_t lo = i > beta ? i - beta : 0;
        const std::size_t hi = std::min(n - 1, i + beta);
        for (std::size_t j = lo; j <= hi; ++j)
            if (j != i) off += std::abs(a(i, j));
        const double d = std::abs(a(i, i));
        if (d < off) return false;
        if (d > off) strict = true;
    }
    return strict;
}

double norm_inf(std::span<const double> x) noexcept {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

} // namespace qif
