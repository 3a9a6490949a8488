#pragma once

#include "qif/band.hpp"
#include "qif/executor.hpp"
#include "qif/lcp.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qif {

/// Uniform grid on a rectangle. Interior nodes are 1..nx, 1..ny; nodes 0 and
/// nx+1 lie on the boundary.
struct Grid2D {
    double x_lo = -1.0, x_hi = 1.0;
    double y_lo = -1.0, y_hi = 1.0;
    std::size_t nx = 0, ny = 0;

    /// Square [-1,1]^2 with spacing 1/n (2n-1 interior nodes per direction).
    static Grid2D unit_square(std::size_t n);

    [[nodiscard]] double h() const noexcept { return (x_hi - x_lo) / static_cast<double>(nx + 1); }
    [[nodiscard]] double x(long i) const noexcept { return x_lo + h() * static_cast<double>(i); }
    [[nodiscard]] double y(long j) const noexcept { return y_lo + h() * static_cast<double>(j); }
    [[nodiscard]] std::size_t interior_size() const noexcept { return nx * ny; }
    void validate() const;
};

/// Nodal values including boundary nodes and one ghost layer, i in [-1, nx+2].
class SolutionField {
public:
    SolutionField() = default;
    explicit SolutionField(const Grid2D& g, double fill = 0.0);

    [[nodiscard]] const Grid2D& grid() const noexcept { return grid_; }
    double& operator()(long i, long j) { return v_[index(i, j)]; }
    double operator()(long i, long j) const { return v_[index(i, j)]; }

    /// Sets boundary and ghost nodes from g; interior nodes are untouched.
    void set_boundary(const std::function<double(double, double)>& g);
    /// Copies interior values into a vector ordered line by line (x fastest).
    [[nodiscard]] RealVector interior() const;
    void set_interior(std::span<const double> v);

private:
    [[nodiscard]] std::size_t index(long i, long j) const noexcept {
        return static_cast<std::size_t>(i + 1) + static_cast<std::size_t>(j + 1) * (grid_.nx + 4);
    }
    Grid2D grid_;
    std::vector<double> v_;
};

enum class Limiter { None, VanAlbada, Koren, Minmod };

[[nodiscard]] Limiter parse_limiter(const std::string& name);
[[nodiscard]] std::string to_string(Limiter l);

/// phi(r). None is the unlimited kappa-scheme, (1-kappa)/2 + (1+kappa)/2 r;
/// Koren is capped by that line, so kappa = 1/3 gives the usual form.
[[nodiscard]] double limiter_phi(Limiter l, double r, double kappa);

/// Ratio num/den with |den| < 1e-30 replaced by a sign-preserving 1e-30.
[[nodiscard]] double guarded_ratio(double num, double den) noexcept;

/// Velocity component together with its derivative along its own axis.
struct ConvectionField {
    std::function<double(double, double)> value;
    std::function<double(double, double)> derivative;

    static ConvectionField constant(double c);
};

struct KappaSchemeConfig {
    double kappa = 1.0 / 3.0;
    Limiter limiter = Limiter::VanAlbada;
    ConvectionField a = ConvectionField::constant(1.0);
    ConvectionField b = ConvectionField::constant(1.0);
    double eps = 1e-6;
    /// Replace the wide upwind stencil by first-order upwind where it would
    /// reach past the boundary node. Off by default: ghost values are used.
    bool first_order_boundary = false;

    void validate() const;
};

/// Per-node stencil coefficients at the offsets listed in `offsets`.
struct StencilOperator {
    static constexpr std::array<std::array<int, 2>, 9> offsets{{
        {-2, 0}, {-1, 0}, {0, 0}, {1, 0}, {2, 0}, {0, -1}, {0, -2}, {0, 1}, {0, 2},
    }};

    Grid2D grid;
    std::vector<std::array<double, 9>> coeff; ///< interior node (i,j) at (i-1) + (j-1)*nx

    [[nodiscard]] const std::array<double, 9>& at(long i, long j) const {
        return coeff[static_cast<std::size_t>(i - 1) + static_cast<std::size_t>(j - 1) * grid.nx];
    }
    [[nodiscard]] double apply(const SolutionField& u, long i, long j) const;
};

/// Linear (unlimited) kappa-scheme plus 5-point diffusion.
[[nodiscard]] StencilOperator assemble_kappa_operator(const KappaSchemeConfig& cfg, const Grid2D& g);

enum class ConvectionForm { ThreeTerm, FourTerm };

/// Limited convective part (a u)_x + (b u)_y at an interior node.
[[nodiscard]] double limited_convection_row(const SolutionField& u, long i, long j, const KappaSchemeConfig& cfg,
                                            ConvectionForm form = ConvectionForm::ThreeTerm);

/// Full discrete operator (limited convection + diffusion) at an interior node.
[[nodiscard]] double apply_operator(const SolutionField& u, long i, long j, const KappaSchemeConfig& cfg);

/// True iff c_i >= 0, d_i >= 0 and c_i + d_i <= 1 for all i.
[[nodiscard]] bool check_tvd_coefficients(std::span<const double> c, std::span<const double> d);

[[nodiscard]] double total_variation(std::span<const double> u);

/// One explicit step of the limited 1-d upwind scheme for u_t + a u_x = 0
/// (a > 0, nu = a dt / h) with the two left values held at inflow.
[[nodiscard]] RealVector limited_upwind_step(std::span<const double> u, double nu, Limiter limiter, double kappa);

/// Incremental-form coefficients (c_i, d_i) of that step.
struct IncrementCoefficients {
    RealVector c;
    RealVector d;
};
[[nodiscard]] IncrementCoefficients limited_upwind_increments(std::span<const double> u, double nu, Limiter limiter,
                                                              double kappa);

/// Manufactured steady problem: f = (a u)_x + (b u)_y - eps Laplace(u) for
/// a given smooth u, with Dirichlet data taken from u.
struct ConvectionDiffusionProblem {
    Grid2D grid;
    KappaSchemeConfig cfg;
    std::function<double(double, double)> exact;
    RealVector f; ///< interior, line by line

    [[nodiscard]] double rhs(long i, long j) const {
        return f[static_cast<std::size_t>(i - 1) + static_cast<std::size_t>(j - 1) * grid.nx];
    }
    /// Field with exact boundary/ghost data and zero interior.
    [[nodiscard]] SolutionField initial_field() const;
    [[nodiscard]] SolutionField exact_field() const;
};

/// u = x^4 + y^4 on [-1,1]^2 with spacing 1/n.
[[nodiscard]] ConvectionDiffusionProblem quartic_problem(std::size_t n, const KappaSchemeConfig& cfg);

enum class SplittingVariant { Ls0, Ls1, Ls2, Ls3, DefC };

[[nodiscard]] SplittingVariant parse_splitting(const std::string& name);
[[nodiscard]] std::string to_string(SplittingVariant v);

struct ResidualNorm {
    double scaled_rms = 0.0; ///< sqrt(mean((h^2 r)^2)) over interior nodes
    double max_abs = 0.0;    ///< max |r|
};

[[nodiscard]] ResidualNorm residual_norm(const SolutionField& u, const ConvectionDiffusionProblem& p);

/// One sweep over x-lines in increasing j. Ls0-Ls2 and DefC require a, b >= 0
/// on every face. Ls3 solves its lines independently (on `exec` if given) and
/// applies the distributive update at the end.
ResidualNorm sweep_splitting(SolutionField& u, SplittingVariant variant, const ConvectionDiffusionProblem& p,
                             double omega = 1.0, Executor* exec = nullptr);

/// x-line coefficient factor of L0: (5-3k)/4, (2-k)/2 or 1 for Ls0, Ls1, Ls2/DefC.
[[nodiscard]] double line_factor(SplittingVariant v, double kappa);

/// The linear splitting L = L+ + L0 + L- on the interior unknowns (line size
/// nx), with L+ holding every coupling to lines j-1 and j-2.
[[nodiscard]] SplittingOperators kappa_splitting_operators(const ConvectionDiffusionProblem& p, SplittingVariant v,
                                                           double omega = 1.0);

struct ErrorNorms {
    double linf = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
};

/// Norms over the interior nodes of u_h with H^2 weighting for L1 and L2.
[[nodiscard]] ErrorNorms error_norms(const SolutionField& u_h, const std::function<double(double, double)>& exact);
/// Against a finer solution restricted by injection; grids must be nested.
[[nodiscard]] ErrorNorms error_norms(const SolutionField& u_h, const SolutionField& fine);

/// (log E(k-1,k-2) - log E(k,k-1)) / log 2.
[[nodiscard]] double convergence_order(double e_coarse, double e_fine);

} // namespace qif
