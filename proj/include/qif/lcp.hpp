#pragma once

#include "qif/band.hpp"
#include "qif/lcp_problem.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qif {

enum class ClampMode {
    Change,  ///< sigma <- max(0, sigma), then u + omega*sigma
    Iterate, ///< u <- max(0, u + omega*sigma)
};

/// L = lplus + lzero + lminus. Unknowns are grouped into consecutive lines of
/// `line_size`; lplus may only couple to earlier lines and lzero must be
/// block diagonal over lines.
struct SplittingOperators {
    BandedMatrix lzero;
    BandedMatrix lminus;
    BandedMatrix lplus;
    std::size_t line_size = 0;
    double omega = 0.5;

    [[nodiscard]] BandedMatrix assembled() const;
};

/// Pointwise Gauss-Seidel splitting (diagonal / strictly lower / strictly upper).
[[nodiscard]] SplittingOperators gauss_seidel_splitting(const BandedMatrix& l, double omega);
/// Pointwise Jacobi splitting (lplus empty).
[[nodiscard]] SplittingOperators jacobi_splitting(const BandedMatrix& l, double omega);

struct SplittingStep {
    RealVector sigma;
    RealVector u_next;
};

/// One global step: lzero sigma = f - (lminus + lzero) u_prev - lplus u_partial,
/// then clamp and relax.
[[nodiscard]] SplittingStep projected_splitting_step(const SplittingOperators& s, std::span<const double> u_prev,
                                                     std::span<const double> u_partial, std::span<const double> f,
                                                     ClampMode mode = ClampMode::Change);

/// Line-by-line sweep updating u in place (lplus sees the new values).
/// Returns the largest |omega*sigma|.
double splitting_sweep(const SplittingOperators& s, std::span<const double> f, std::span<double> u,
                       ClampMode mode = ClampMode::Change);

struct IterationRecord {
    std::size_t iteration;
    double residual;
    double energy;
};

struct SplittingRun {
    RealVector u;
    std::vector<IterationRecord> history;
    bool converged = false;
};

/// Sweeps until the change drops below tol or max_iter is reached.
[[nodiscard]] SplittingRun projected_splitting_solve(const LcpProblem& p, const SplittingOperators& s, double tol,
                                                     std::size_t max_iter, ClampMode mode = ClampMode::Change);

/// Projected SOR (clamps u componentwise); reference solver.
[[nodiscard]] RealVector psor_oracle(const LcpProblem& p, double omega, double tol,
                                     std::size_t max_iter = 2'000'000);

struct ErrorBound {
    double c1 = 0.0;
    double c2 = 0.0;
    double cinf = 0.0;
    double error_inf = 0.0;
};

/// Ratios |u - u_next|_p / |u_next - u_curr|_p for p = 1, 2, inf.
[[nodiscard]] ErrorBound error_bound_check(std::span<const double> u_exact, std::span<const double> u_next,
                                           std::span<const double> u_curr);

struct ErrorBoundAssessment {
    bool bounded = false;
    double max_ratio = 0.0;
    bool error_growing = false;
};

/// Flags a ratio history as unbounded when a ratio is not finite, exceeds
/// `limit`, or the error itself grows over the window.
[[nodiscard]] ErrorBoundAssessment assess_error_bounds(std::span<const ErrorBound> history, double limit);

struct SpectralEstimate {
    double rho = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Power-iteration estimate of rho(M^-1 N) with M = lzero + lplus, N = -lminus.
[[nodiscard]] SpectralEstimate splitting_spectral_radius(const SplittingOperators& s, std::size_t max_iter = 5000,
                                                         double tol = 1e-10);

/// Solves the diagonal line block [lo, hi) of a band matrix. Odd orders get a
/// decoupled unit row appended before the WZ solve; tiny blocks use dense
/// elimination.
[[nodiscard]] RealVector solve_line_block(const BandedMatrix& a, std::size_t lo, std::size_t hi,
                                          std::span<const double> rhs);

} // namespace qif
