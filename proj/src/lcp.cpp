#include "qif/lcp.hpp"

#include "qif/aqif.hpp"
#include "qif/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qif {
namespace {

// Row i of a * x restricted to columns [lo, hi).
double row_dot(const BandedMatrix& a, std::size_t i, std::span<const double> x, std::size_t lo = 0,
               std::size_t hi = std::numeric_limits<std::size_t>::max()) {
    const std::size_t n = a.order();
    const std::size_t b = a.semibandwidth();
    const std::size_t j0 = std::max(lo, i > b ? i - b : 0);
    const std::size_t j1 = std::min({hi, n, i + b + 1});
    double s = 0.0;
    for (std::size_t j = j0; j < j1; ++j) s += a(i, j) * x[j];
    return s;
}

RealVector small_dense_solve(DenseMatrix a, RealVector b) {
    const std::size_t n = a.rows();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        if (a(piv, c) == 0.0) throw FactorizationBreakdown("solve_line_block: singular line block");
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double m = a(r, c) / a(c, c);
            for (std::size_t j = c; j < n; ++j) a(r, j) -= m * a(c, j);
            b[r] -= m * b[c];
        }
    }
    RealVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

BandedMatrix split_part(const BandedMatrix& l, int which) {
    BandedMatrix out(l.order(), l.semibandwidth());
    for (std::size_t i = 0; i < l.order(); ++i) {
        const std::size_t b = l.semibandwidth();
        for (std::size_t j = i > b ? i - b : 0; j <= std::min(l.order() - 1, i + b); ++j) {
            const bool take = (which < 0 && j < i) || (which == 0 && j == i) || (which > 0 && j > i);
            if (take) out.set(i, j, l(i, j));
        }
    }
    return out;
}

std::size_t line_count(const SplittingOperators& s) {
    const std::size_t n = s.lzero.order();
    const std::size_t ls = s.line_size == 0 ? n : s.line_size;
    if (n % ls != 0) throw ContractViolation("SplittingOperators: line size does not divide order");
    return n / ls;
}

} // namespace

double complementarity_residual(const LcpProblem& p, std::span<const double> u) {
    const RealVector lu = band_matvec(p.l, u);
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) r = std::max(r, std::abs(std::min(u[i], lu[i] - p.f[i])));
    return r;
}

double qp_energy(const LcpProblem& p, std::span<const double> u) {
    const RealVector lu = band_matvec(p.l, u);
    double g = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) g += 0.5 * u[i] * lu[i] - p.f[i] * u[i];
    return g;
}

BandedMatrix SplittingOperators::assembled() const {
    const std::size_t n = lzero.order();
    const std::size_t b = std::max({lzero.semibandwidth(), lminus.semibandwidth(), lplus.semibandwidth()});
    BandedMatrix out(n, b);
    for (const BandedMatrix* part : {&lplus, &lzero, &lminus}) {
        const std::size_t pb = part->semibandwidth();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i > pb ? i - pb : 0; j <= std::min(n - 1, i + pb); ++j)
                if ((*part)(i, j) != 0.0) out.add(i, j, (*part)(i, j));
    }
    return out;
}

SplittingOperators gauss_seidel_splitting(const BandedMatrix& l, double omega) {
    return {split_part(l, 0), split_part(l, 1), split_part(l, -1), 1, omega};
}

SplittingOperators jacobi_splitting(const BandedMatrix& l, double omega) {
    BandedMatrix off(l.order(), l.semibandwidth());
    for (std::size_t i = 0; i < l.order(); ++i) {
        const std::size_t b = l.semibandwidth();
        for (std::size_t j = i > b ? i - b : 0; j <= std::min(l.order() - 1, i + b); ++j)
            if (j != i) off.set(i, j, l(i, j));
    }
    return {split_part(l, 0), off, BandedMatrix(l.order(), 1), 1, omega};
}

RealVector solve_line_block(const BandedMatrix& a, std::size_t lo, std::size_t hi, std::span<const double> rhs) {
    const std::size_t m = hi - lo;
    if (rhs.size() != m) throw ContractViolation("solve_line_block: length mismatch");
    const std::size_t b = a.semibandwidth();
    if (m == 1) {
        const double d = a(lo, lo);
        if (d == 0.0) throw FactorizationBreakdown("solve_line_block: zero pivot");
        return {rhs[0] / d};
    }
    if (m < 2 * b + 2) {
        DenseMatrix d(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) d(i, j) = a(lo + i, lo + j);
        return small_dense_solve(d, RealVector(rhs.begin(), rhs.end()));
    }
    const std::size_t n = m % 2 == 0 ? m : m + 1;
    BandedMatrix blk(n, b);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i > b ? i - b : 0; j <= std::min(m - 1, i + b); ++j) blk.set(i, j, a(lo + i, lo + j));
    RealVector r(rhs.begin(), rhs.end());
    if (n != m) {
        blk.set(m, m, 1.0);
        r.push_back(0.0);
    }
    RealVector x = aqif_solve(blk, r);
    x.resize(m);
    return x;
}

SplittingStep projected_splitting_step(const SplittingOperators& s, std::span<const double> u_prev,
                                       std::span<const double> u_partial, std::span<const double> f,
                                       ClampMode mode) {
    const std::size_t n = s.lzero.order();
    if (u_prev.size() != n || u_partial.size() != n || f.size() != n)
        throw ContractViolation("projected_splitting_step: length mismatch");
    if (!(s.omega > 0.0 && s.omega <= 1.0)) throw ContractViolation("projected_splitting_step: omega outside (0,1]");
    const RealVector a = band_matvec(s.lminus, u_prev);
    const RealVector b = band_matvec(s.lzero, u_prev);
    const RealVector c = band_matvec(s.lplus, u_partial);
    RealVector r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = f[i] - a[i] - b[i] - c[i];

    SplittingStep out{RealVector(n), RealVector(n)};
    const std::size_t lines = line_count(s);
    const std::size_t ls = n / lines;
    for (std::size_t l = 0; l < lines; ++l) {
        const std::size_t lo = l * ls;
        const RealVector sig = solve_line_block(s.lzero, lo, lo + ls, std::span<const double>(r).subspan(lo, ls));
        std::copy(sig.begin(), sig.end(), out.sigma.begin() + static_cast<std::ptrdiff_t>(lo));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (mode == ClampMode::Change) {
            out.sigma[i] = std::max(0.0, out.sigma[i]);
            out.u_next[i] = u_prev[i] + s.omega * out.sigma[i];
        } else {
            out.u_next[i] = std::max(0.0, u_prev[i] + s.omega * out.sigma[i]);
        }
    }
    return out;
}

double splitting_sweep(const SplittingOperators& s, std::span<const double> f, std::span<double> u,
                       ClampMode mode) {
    const std::size_t n = s.lzero.order();
    if (u.size() != n || f.size() != n) throw ContractViolation("splitting_sweep: length mismatch");
    const std::size_t lines = line_count(s);
    const std::size_t ls = n / lines;
    double change = 0.0;
    RealVector r(ls);
    for (std::size_t l = 0; l < lines; ++l) {
        const std::size_t lo = l * ls;
        for (std::size_t k = 0; k < ls; ++k) {
            const std::size_t i = lo + k;
            r[k] = f[i] - row_dot(s.lminus, i, u) - row_dot(s.lzero, i, u) - row_dot(s.lplus, i, u);
        }
        const RealVector sig = solve_line_block(s.lzero, lo, lo + ls, r);
        for (std::size_t k = 0; k < ls; ++k) {
            const double old = u[lo + k];
            if (mode == ClampMode::Change)
                u[lo + k] = old + s.omega * std::max(0.0, sig[k]);
            else
                u[lo + k] = std::max(0.0, old + s.omega * sig[k]);
            change = std::max(change, std::abs(u[lo + k] - old));
        }
    }
    return change;
}

SplittingRun projected_splitting_solve(const LcpProblem& p, const SplittingOperators& s, double tol,
                                       std::size_t max_iter, ClampMode mode) {
    SplittingRun run{RealVector(p.f.size(), 0.0), {}, false};
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const double change = splitting_sweep(s, p.f, run.u, mode);
        run.history.push_back({it, complementarity_residual(p, run.u), qp_energy(p, run.u)});
        if (change <= tol) {
            run.converged = true;
            break;
        }
    }
    return run;
}

RealVector psor_oracle(const LcpProblem& p, double omega, double tol, std::size_t max_iter) {
    const std::size_t n = p.l.order();
    if (p.f.size() != n) throw ContractViolation("psor_oracle: length mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (!(p.l(i, i) > 0.0)) throw ContractViolation("psor_oracle: non-positive diagonal");
    RealVector u(n, 0.0);
    double change = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = p.l(i, i);
            const double r = p.f[i] - row_dot(p.l, i, u);
            const double next = std::max(0.0, u[i] + omega * r / d);
            change = std::max(change, std::abs(next - u[i]));
            u[i] = next;
        }
        if (change <= tol) return u;
    }
    throw NonConvergence("psor_oracle: iteration cap reached", change);
}

ErrorBound error_bound_check(std::span<const double> u_exact, std::span<const double> u_next,
                             std::span<const double> u_curr) {
    double e1 = 0, e2 = 0, ei = 0, d1 = 0, d2 = 0, di = 0;
    for (std::size_t i = 0; i < u_exact.size(); ++i) {
        const double e = std::abs(u_exact[i] - u_next[i]);
        const double d = std::abs(u_next[i] - u_curr[i]);
        e1 += e;
        e2 += e * e;
        ei = std::max(ei, e);
        d1 += d;
        d2 += d * d;
        di = std::max(di, d);
    }
    auto ratio = [](double a, double b) {
        if (a == 0.0) return 0.0;
        return b == 0.0 ? std::numeric_limits<double>::infinity() : a / b;
    };
    return {ratio(e1, d1), ratio(std::sqrt(e2), std::sqrt(d2)), ratio(ei, di), ei};
}

ErrorBoundAssessment assess_error_bounds(std::span<const ErrorBound> history, double limit) {
    ErrorBoundAssessment a;
    a.bounded = true;
    for (const auto& e : history) {
        for (double c : {e.c1, e.c2, e.cinf}) {
            if (!std::isfinite(c)) a.bounded = false;
            else a.max_ratio = std::max(a.max_ratio, c);
        }
    }
    if (a.max_ratio > limit) a.bounded = false;
    if (history.size() >= 2 && history.back().error_inf > history.front().error_inf) a.error_growing = true;
    if (a.error_growing) a.bounded = false;
    return a;
}

SpectralEstimate splitting_spectral_radius(const SplittingOperators& s, std::size_t max_iter, double tol) {
    const std::size_t n = s.lzero.order();
    const std::size_t lines = line_count(s);
    const std::size_t ls = n / lines;
    // x <- (lzero + lplus)^-1 (-lminus x), by forward substitution over lines.
    auto apply = [&](const RealVector& x) {
        RealVector y = band_matvec(s.lminus, x);
        for (double& v : y) v = -v;
        RealVector out(n, 0.0);
        RealVector r(ls);
        for (std::size_t l = 0; l < lines; ++l) {
            const std::size_t lo = l * ls;
            for (std::size_t k = 0; k < ls; ++k) r[k] = y[lo + k] - row_dot(s.lplus, lo + k, out);
            const RealVector sol = solve_line_block(s.lzero, lo, lo + ls, r);
            std::copy(sol.begin(), sol.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
        }
        return out;
    };
    auto norm2 = [](const RealVector& v) {
        double s2 = 0.0;
        for (double x : v) s2 += x * x;
        return std::sqrt(s2);
    };

    // Deterministic start vector with components in every mode.
    RealVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.3 * static_cast<double>(i) + 0.7);
    double nx = norm2(x);
    for (double& v : x) v /= nx;

    std::vector<double> logs;
    logs.reserve(max_iter);
    SpectralEstimate est;
    const std::size_t window = 20;
    double prev = -1.0;
    for (std::size_t k = 1; k <= max_iter; ++k) {
        x = apply(x);
        nx = norm2(x);
        if (nx == 0.0) return {0.0, true, k};
        logs.push_back(std::log(nx));
        for (double& v : x) v /= nx;
        est.iterations = k;
        if (k >= 2 * window && k % window == 0) {
            // Mean growth over the last window damps +-rho and complex pairs.
            double sum = 0.0;
            for (std::size_t i = k - window; i < k; ++i) sum += logs[i];
            est.rho = std::exp(sum / static_cast<double>(window));
            if (prev >= 0.0 && std::abs(est.rho - prev) <= tol * std::max(1.0, est.rho)) {
                est.converged = true;
                return est;
            }
            prev = est.rho;
        }
    }
    return est;
}

} // namespace qif
