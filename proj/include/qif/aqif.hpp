#pragma once

#include "qif/band.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qif {

/// One elimination level of the WZ factorization. Indices are 0-based; the
/// level pairs pivot rows p < q with p + q = n - 1.
struct WZLevel {
    std::size_t p = 0;
    std::size_t q = 0;
    /// Z rows p and q over the column windows [p-b, p] and [q, q+b]
    /// (2b+2 slots each, left window first).
    std::vector<double> zp, zq;
    /// W columns p and q over the row windows [p-b, p-1] and [q+1, q+b].
    std::vector<double> wp, wq;
};

/// The factor pair L = W Z with W butterfly-shaped (unit diagonal, wings in
/// the outer rows) and Z hourglass-shaped. Storage is O(n b).
class WZFactors {
public:
    WZFactors() = default;
    WZFactors(std::size_t n, std::size_t window);

    [[nodiscard]] std::size_t order() const noexcept { return n_; }
    [[nodiscard]] std::size_t half() const noexcept { return n_ / 2; }
    /// Window half-width b; equals the semibandwidth for banded input.
    [[nodiscard]] std::size_t window() const noexcept { return b_; }

    /// Level k in 1..s, k = 1 innermost.
    [[nodiscard]] const WZLevel& level(std::size_t k) const { return levels_[k - 1]; }
    WZLevel& level(std::size_t k) { return levels_[k - 1]; }
    /// Level that eliminates index i.
    [[nodiscard]] std::size_t level_of(std::size_t i) const noexcept {
        const std::size_t s = n_ / 2;
        return i < s ? s - i : i - s + 1;
    }

    [[nodiscard]] double w(std::size_t i, std::size_t j) const noexcept {
        if (i >= n_ || j >= n_) return 0.0;
        if (i == j) return 1.0;
        const WZLevel& lv = levels_[level_of(j) - 1];
        const std::vector<double>& col = (j == lv.p) ? lv.wp : lv.wq;
        if (i < lv.p && i + b_ >= lv.p) return col[i + b_ - lv.p];
        if (i > lv.q && i <= lv.q + b_) return col[b_ + (i - lv.q - 1)];
        return 0.0;
    }
    [[nodiscard]] double z(std::size_t i, std::size_t j) const noexcept {
        if (i >= n_ || j >= n_) return 0.0;
        const WZLevel& lv = levels_[level_of(i) - 1];
        const std::vector<double>& row = (i == lv.p) ? lv.zp : lv.zq;
        if (j <= lv.p && j + b_ >= lv.p) return row[j + b_ - lv.p];
        if (j >= lv.q && j <= lv.q + b_) return row[b_ + 1 + (j - lv.q)];
        return 0.0;
    }

    [[nodiscard]] DenseMatrix w_dense() const;
    [[nodiscard]] DenseMatrix z_dense() const;

private:
    std::size_t n_ = 0;
    std::size_t b_ = 0;
    std::vector<WZLevel> levels_;
};

/// Factorizes an even-order band matrix. Throws UnsupportedOrder for odd
/// orders and FactorizationBreakdown when a 2x2 pivot block is singular.
[[nodiscard]] WZFactors factorize_wz(const BandedMatrix& l0);

/// Same factorization on a full matrix (windows cover the whole matrix).
[[nodiscard]] WZFactors factorize_wz(const DenseMatrix& l0);

/// Solves W Y = F, sweeping from the middle outward.
[[nodiscard]] RealVector solve_w(const WZFactors& f, std::span<const double> rhs);

/// Solves Z U = Y, sweeping from the outermost pair inward. When `trace` is
/// given, the indices are appended in the order they are determined.
[[nodiscard]] RealVector solve_z(const WZFactors& f, std::span<const double> y,
                                 std::vector<std::size_t>* trace = nullptr);

/// Continues a Z solve when the outermost `known_levels` levels of `u` are
/// already fixed: their columns are moved to the right side and the rest of
/// `u` is filled in.
void solve_z_inner(const WZFactors& f, std::span<const double> y, std::span<double> u,
                   std::size_t known_levels, std::vector<std::size_t>* trace = nullptr);

[[nodiscard]] RealVector aqif_solve(const BandedMatrix& l0, std::span<const double> rhs);

} // namespace qif
