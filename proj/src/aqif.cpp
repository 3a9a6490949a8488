#include "qif/aqif.hpp"

#include "qif/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qif {
namespace {

constexpr double kBreakdownTol = 1e-14;

struct Pivot {
    double a, b, c, d, det;
};

// Block [[z(p,p), z(p,q)], [z(q,p), z(q,q)]] of one level.
Pivot pivot_block(const WZFactors& f, const WZLevel& lv, std::size_t k) {
    Pivot pv{f.z(lv.p, lv.p), f.z(lv.p, lv.q), f.z(lv.q, lv.p), f.z(lv.q, lv.q), 0.0};
    pv.det = pv.a * pv.d - pv.b * pv.c;
    const double m = std::max({std::abs(pv.a), std::abs(pv.b), std::abs(pv.c), std::abs(pv.d)});
    if (!(std::abs(pv.det) > kBreakdownTol * m * m))
        throw FactorizationBreakdown("WZ pivot block singular at level " + std::to_string(k) + " (rows " +
                                     std::to_string(lv.p) + "," + std::to_string(lv.q) + ")");
    return pv;
}

template <class Entry>
WZFactors factorize(std::size_t n, std::size_t b, Entry&& entry) {
    if (n % 2 != 0) throw UnsupportedOrder("factorize_wz: order " + std::to_string(n) + " is odd");
    if (n == 0) throw ContractViolation("factorize_wz: empty matrix");
    WZFactors f(n, b);
    const std::size_t s = n / 2;
    const auto sn = static_cast<std::ptrdiff_t>(n);
    const auto sb = static_cast<std::ptrdiff_t>(b);

    // Entry (i, j) of the matrix left after eliminating levels 1..k-1.
    auto residual = [&](std::size_t i, std::size_t j, std::size_t k) {
        double v = entry(i, j);
        const std::size_t first = k > b ? k - b : 1;
        for (std::size_t l = first; l < k; ++l) {
            const WZLevel& lv = f.level(l);
            v -= f.w(i, lv.p) * f.z(lv.p, j) + f.w(i, lv.q) * f.z(lv.q, j);
        }
        return v;
    };

    for (std::size_t k = 1; k <= s; ++k) {
        WZLevel& lv = f.level(k);
        const auto p = static_cast<std::ptrdiff_t>(lv.p);
        const auto q = static_cast<std::ptrdiff_t>(lv.q);

        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, p - sb); j <= p; ++j) {
            const auto idx = static_cast<std::size_t>(j - (p - sb));
            lv.zp[idx] = residual(lv.p, static_cast<std::size_t>(j), k);
            lv.zq[idx] = residual(lv.q, static_cast<std::size_t>(j), k);
        }
        for (std::ptrdiff_t j = q; j <= std::min(sn - 1, q + sb); ++j) {
            const auto idx = static_cast<std::size_t>(sb + 1 + (j - q));
            lv.zp[idx] = residual(lv.p, static_cast<std::size_t>(j), k);
            lv.zq[idx] = residual(lv.q, static_cast<std::size_t>(j), k);
        }
        const Pivot pv = pivot_block(f, lv, k);

        auto fill_w = [&](std::ptrdiff_t i, std::size_t idx) {
            const double lp = residual(static_cast<std::size_t>(i), lv.p, k);
            const double lq = residual(static_cast<std::size_t>(i), lv.q, k);
            lv.wp[idx] = (lp * pv.d - lq * pv.c) / pv.det;
            lv.wq[idx] = (lq * pv.a - lp * pv.b) / pv.det;
        };
        for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, p - sb); i < p; ++i)
            fill_w(i, static_cast<std::size_t>(i - (p - sb)));
        for (std::ptrdiff_t i = q + 1; i <= std::min(sn - 1, q + sb); ++i)
            fill_w(i, static_cast<std::size_t>(sb + (i - q - 1)));
    }
    return f;
}

} // namespace

WZFactors::WZFactors(std::size_t n, std::size_t window) : n_(n), b_(window), levels_(n / 2) {
    const std::size_t s = n / 2;
    for (std::size_t k = 1; k <= s; ++k) {
        WZLevel& lv = levels_[k - 1];
        lv.p = s - k;
        lv.q = s + k - 1;
        lv.zp.assign(2 * b_ + 2, 0.0);
        lv.zq.assign(2 * b_ + 2, 0.0);
        lv.wp.assign(2 * b_, 0.0);
        lv.wq.assign(2 * b_, 0.0);
    }
}

DenseMatrix WZFactors::w_dense() const {
    DenseMatrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = w(i, j);
    return m;
}

DenseMatrix WZFactors::z_dense() const {
    DenseMatrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = z(i, j);
    return m;
}

WZFactors factorize_wz(const BandedMatrix& l0) {
    return factorize(l0.order(), l0.semibandwidth(), [&](std::size_t i, std::size_t j) { return l0(i, j); });
}

WZFactors factorize_wz(const DenseMatrix& l0) {
    if (l0.rows() != l0.cols()) throw ContractViolation("factorize_wz: matrix not square");
    return factorize(l0.rows(), l0.rows(), [&](std::size_t i, std::size_t j) { return l0(i, j); });
}

RealVector solve_w(const WZFactors& f, std::span<const double> rhs) {
    const std::size_t n = f.order();
    if (rhs.size() != n) throw ContractViolation("solve_w: length mismatch");
    const std::size_t b = f.window();
    RealVector y(rhs.begin(), rhs.end());
    for (std::size_t k = 1; k <= f.half(); ++k) {
        const WZLevel& lv = f.level(k);
        const double yp = y[lv.p];
        const double yq = y[lv.q];
        if (yp == 0.0 && yq == 0.0) continue;
        for (std::size_t i = lv.p > b ? lv.p - b : 0; i < lv.p; ++i) {
            const std::size_t idx = i + b - lv.p;
            y[i] -= yp * lv.wp[idx] + yq * lv.wq[idx];
        }
        for (std::size_t i = lv.q + 1; i <= std::min(n - 1, lv.q + b); ++i) {
            const std::size_t idx = b + (i - lv.q - 1);
            y[i] -= yp * lv.wp[idx] + yq * lv.wq[idx];
        }
    }
    return y;
}

void solve_z_inner(const WZFactors& f, std::span<const double> y, std::span<double> u, std::size_t known_levels,
                   std::vector<std::size_t>* trace) {
    const std::size_t n = f.order();
    const std::size_t s = f.half();
    if (y.size() != n || u.size() != n) throw ContractViolation("solve_z: length mismatch");
    if (known_levels > s) throw ContractViolation("solve_z_inner: more known levels than levels");
    const std::size_t b = f.window();
    RealVector r(y.begin(), y.end());
    for (std::size_t k = s; k >= 1; --k) {
        const WZLevel& lv = f.level(k);
        if (k + known_levels <= s) {
            const Pivot pv = pivot_block(f, lv, k);
            u[lv.p] = (r[lv.p] * pv.d - pv.b * r[lv.q]) / pv.det;
            u[lv.q] = (pv.a * r[lv.q] - pv.c * r[lv.p]) / pv.det;
            if (trace) {
                trace->push_back(lv.p);
                trace->push_back(lv.q);
            }
        }
        const double xp = u[lv.p];
        const double xq = u[lv.q];
        const std::size_t first = k > b ? k - b : 1;
        for (std::size_t l = first; l < k; ++l) {
            const WZLevel& inner = f.level(l);
            r[inner.p] -= xp * f.z(inner.p, lv.p) + xq * f.z(inner.p, lv.q);
            r[inner.q] -= xp * f.z(inner.q, lv.p) + xq * f.z(inner.q, lv.q);
        }
    }
}

RealVector solve_z(const WZFactors& f, std::span<const double> y, std::vector<std::size_t>* trace) {
    RealVector u(f.order(), 0.0);
    solve_z_inner(f, y, u, 0, trace);
    return u;
}

RealVector aqif_solve(const BandedMatrix& l0, std::span<const double> rhs) {
    if (rhs.size() != l0.order()) throw ContractViolation("aqif_solve: length mismatch");
    const WZFactors f = factorize_wz(l0);
    return solve_z(f, solve_w(f, rhs));
}

} // namespace qif
