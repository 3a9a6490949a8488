#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qif {

using RealVector = std::vector<double>;

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static DenseMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] RealVector multiply(std::span<const double> x) const;
    [[nodiscard]] DenseMatrix multiply(const DenseMatrix& b) const;
    [[nodiscard]] DenseMatrix transpose() const;
    /// AᵀA without forming Aᵀ.
    [[nodiscard]] DenseMatrix gram() const;
    [[nodiscard]] RealVector transpose_multiply(std::span<const double> x) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Square band matrix stored diagonal-major: diagonal d (offset d - beta) is a
/// vector of length N whose slot i holds A(i, i + d - beta). Slots that fall
/// outside the matrix are kept at zero.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t order, std::size_t semibandwidth);

    [[nodiscard]] std::size_t order() const noexcept { return n_; }
    [[nodiscard]] std::size_t semibandwidth() const noexcept { return beta_; }

    /// Entry access; returns exactly 0 outside the band.
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
        const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
        if (off > static_cast<std::ptrdiff_t>(beta_) || -off > static_cast<std::ptrdiff_t>(beta_)) return 0.0;
        return bands_[static_cast<std::size_t>(off + static_cast<std::ptrdiff_t>(beta_))][i];
    }

    /// Writes an in-band entry. Throws ContractViolation outside the band or matrix.
    void set(std::size_t i, std::size_t j, double v);
    void add(std::size_t i, std::size_t j, double v);

    /// Diagonal with offset in [-beta, beta]; slot i is A(i, i + offset).
    [[nodiscard]] std::span<const double> diagonal(int offset) const;

    [[nodiscard]] DenseMatrix to_dense() const;
    [[nodiscard]] double max_abs() const noexcept;

private:
    std::size_t n_ = 0;
    std::size_t beta_ = 0;
    std::vector<std::vector<double>> bands_;
};

/// y = A x.
[[nodiscard]] RealVector band_matvec(const BandedMatrix& a, std::span<const double> x);

/// Solves A x = b for symmetric positive definite A via Cholesky.
[[nodiscard]] RealVector cholesky_spd_solve(const DenseMatrix& a, std::span<const double> b);

[[nodiscard]] RealVector project_nonneg(std::span<const double> x);

/// |a_ii| >= sum_{j != i} |a_ij| for all rows, strictly for at least one.
[[nodiscard]] bool is_diagonally_dominant(const BandedMatrix& a);

[[nodiscard]] double norm_inf(std::span<const double> x) noexcept;

} // namespace qif
