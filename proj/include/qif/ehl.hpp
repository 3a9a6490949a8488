#pragma once

#include "qif/band.hpp"
#include "qif/tvd.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qif {

enum class ContactType { Line, Point };

[[nodiscard]] std::string to_string(ContactType c);

// ---------------------------------------------------------------- kernels

/// Deformation coefficients indexed by |offset|. Point coefficients carry the
/// 2/pi^2 prefactor; line coefficients are the bare log integrals (the film
/// thickness applies 1/pi).
class DeformationKernel {
public:
    DeformationKernel() = default;
    DeformationKernel(ContactType type, std::size_t nx, std::size_t ny, double h, std::vector<double> g);

    [[nodiscard]] ContactType type() const noexcept { return type_; }
    [[nodiscard]] std::size_t nx() const noexcept { return nx_; }
    [[nodiscard]] std::size_t ny() const noexcept { return ny_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double operator()(long dx, long dy = 0) const noexcept {
        const auto ax = static_cast<std::size_t>(dx < 0 ? -dx : dx);
        const auto ay = static_cast<std::size_t>(dy < 0 ? -dy : dy);
        return g_[ax + ay * (nx_ + 1)];
    }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return g_; }

private:
    ContactType type_ = ContactType::Line;
    std::size_t nx_ = 0, ny_ = 0;
    double h_ = 0.0;
    std::vector<double> g_;
};

/// Integral of log|x - x'| over the cell of width h centred dx*h away.
[[nodiscard]] double line_kernel_value(long dx, double h);
/// 2/pi^2 times the integral of 1/|r - r'| over the cell centred (dx, dy)*h away.
[[nodiscard]] double point_kernel_value(long dx, long dy, double h);

[[nodiscard]] DeformationKernel kernel_line(std::size_t nx, double h);
[[nodiscard]] DeformationKernel kernel_point(std::size_t nx, std::size_t ny, double h);

/// Binary cache with a versioned header (magic, version, contact type, h, nx, ny).
void save_kernel(const DeformationKernel& k, const std::string& path);
[[nodiscard]] DeformationKernel load_kernel(const std::string& path);
/// Loads from `path` if the header matches, otherwise builds and writes it.
[[nodiscard]] DeformationKernel cached_kernel(const std::string& path, ContactType type, std::size_t n, double h);

// ---------------------------------------------------------------- physics

struct MoesInput {
    std::optional<double> g, u, w, m, l;
};

struct MoesSet {
    double g = 0, u = 0, w = 0, m = 0, l = 0;
};

/// Completes the Moes set from any three of G, U, W, M, L using
/// L = G (2U)^(1/4) and M = W (2U)^(-1/2) (line) or W (2U)^(-3/4) (point).
/// Over-specified inputs must agree to 1e-9.
[[nodiscard]] MoesSet moes_convert(const MoesInput& in, ContactType type);

/// Dimensionless pressure-viscosity alpha*p_H and speed parameter lambda
/// for given Moes numbers.
[[nodiscard]] double moes_alpha_bar(double m, double l, ContactType type);
[[nodiscard]] double moes_lambda(double m, ContactType type);

struct EhlParams {
    ContactType contact = ContactType::Point;
    double moes_m = 20.0;
    double moes_l = 10.0;
    double alpha = 1.7e-8; ///< Pa^-1
    double z = 0.68;
    double p0 = 1.98e8; ///< Pa
    double p_h = 0.0;    ///< Pa; derived from (M, L, alpha) when 0
    double lambda = 0.0; ///< derived from M when 0
    double h0 = 0.0;     ///< initial offset; chosen from the initial pressure when 0
    bool compressible = true;
    double x_lo = -2.5, x_hi = 2.5, y_lo = -2.5, y_hi = 2.5;
    double c = 0.05;         ///< force-balance relaxation
    double omega = 0.5;      ///< relaxation of Newton line changes
    double omega_jacobi = 0.3; ///< relaxation of distributive changes
    double load_target = 0.0; ///< 0 selects 3pi/2 (point) or pi/2 (line)

    /// Fills p_h, lambda and load_target when left at 0.
    [[nodiscard]] EhlParams resolved() const;
    void validate() const;
};

struct Rheology {
    double rho = 1.0;
    double eta = 1.0;
};

[[nodiscard]] Rheology rheology(double u, const EhlParams& p);
/// eps = rho H^3 / (eta lambda).
[[nodiscard]] double reynolds_eps(double u, double film, const EhlParams& p);

/// Nodes 0..n in each direction, h = (x_hi - x_lo)/n; boundary nodes hold 0.
struct EhlGrid {
    ContactType type = ContactType::Point;
    std::size_t n = 16;
    double x_lo = -2.5, x_hi = 2.5, y_lo = -2.5, y_hi = 2.5;

    static EhlGrid from(const EhlParams& p, std::size_t n);
    [[nodiscard]] double h() const noexcept { return (x_hi - x_lo) / static_cast<double>(n); }
    [[nodiscard]] std::size_t rows() const noexcept { return type == ContactType::Line ? 1 : n + 1; }
    [[nodiscard]] std::size_t node_count() const noexcept { return (n + 1) * rows(); }
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return i + j * (n + 1); }
    [[nodiscard]] double x(std::size_t i) const noexcept { return x_lo + h() * static_cast<double>(i); }
    [[nodiscard]] double y(std::size_t j) const noexcept {
        return type == ContactType::Line ? 0.0 : y_lo + h() * static_cast<double>(j);
    }
    [[nodiscard]] bool interior(std::size_t i, std::size_t j) const noexcept {
        const bool ix = i >= 1 && i + 1 <= n;
        return type == ContactType::Line ? ix : ix && j >= 1 && j + 1 <= n;
    }
};

/// Load-scaled Hertz pressure: sqrt(a^2 - r^2) with a chosen so that the
/// continuous load equals `target` (a = 1 gives the unit Hertz profile).
[[nodiscard]] RealVector hertzian_init(const EhlGrid& g, double target);
[[nodiscard]] RealVector hertzian_init(const EhlGrid& g);

/// Full (untruncated) convolution; FFT based for point contacts.
class FilmThickness {
public:
    FilmThickness(const EhlGrid& g, DeformationKernel k);
    ~FilmThickness();
    FilmThickness(const FilmThickness&) = delete;
    FilmThickness& operator=(const FilmThickness&) = delete;

    [[nodiscard]] const EhlGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const DeformationKernel& kernel() const noexcept { return kernel_; }
    /// Signed coefficient of u at `src` in the film at `dst`.
    [[nodiscard]] double coefficient(long dx, long dy) const noexcept { return sign_ * kernel_(dx, dy); }
    /// Elastic part only: sum of coefficient * u.
    [[nodiscard]] RealVector deformation(const RealVector& u) const;
    /// H0 + parabola + deformation.
    [[nodiscard]] RealVector film(const RealVector& u, double h0) const;
    /// Same sum evaluated directly (reference for the FFT path).
    [[nodiscard]] RealVector deformation_direct(const RealVector& u) const;

private:
    struct Fft;
    EhlGrid grid_;
    DeformationKernel kernel_;
    double sign_;
    std::unique_ptr<Fft> fft_;
};

// ---------------------------------------------------------------- solver

struct EhlState {
    EhlGrid grid;
    RealVector u;   ///< pressure at all nodes
    RealVector film; ///< H at all nodes
    RealVector rho;
    RealVector eps;
    double h0 = 0.0;
    std::vector<double> residual_history;
    std::vector<double> force_history;
};

enum class EhlScheme { Lhs1, Lhs2 };
enum class LineKind { Ls0, Ls1, Ls4, Ls5 };
enum class LineDirection { X, Y };

[[nodiscard]] EhlScheme parse_ehl_scheme(const std::string& name);
[[nodiscard]] std::string to_string(EhlScheme s);
[[nodiscard]] std::string to_string(LineKind k);

struct EhlContext {
    EhlParams params; ///< resolved
    const FilmThickness* film = nullptr;
    double kappa = 1.0 / 3.0;
    Limiter limiter = Limiter::VanAlbada;
};

/// Builds a state from a pressure field: film, density and eps. When
/// params.h0 is 0 the offset is picked so the smallest film equals 0.05.
[[nodiscard]] EhlState make_state(const EhlContext& ctx, RealVector u);
/// Recomputes film, density and eps from u and h0.
void refresh_state(EhlState& s, const EhlContext& ctx);

/// Pointwise residual of the discrete Reynolds operator
/// -div(eps grad u) + d(rho H)/dx, multiplied by h^d. Boundary nodes are 0.
[[nodiscard]] RealVector reynolds_residual(const EhlState& s, const EhlContext& ctx);

/// max over nodes of |R| where u > 0 and max(0, -R) where u = 0.
[[nodiscard]] double complementarity_norm(const EhlState& s, const RealVector& r);

/// Per-node choice: Newton (Ls1 / Ls0) where eps/h > 0.6, distributive
/// (Ls4 / Ls5) elsewhere.
[[nodiscard]] std::vector<LineKind> hybrid_select(const RealVector& eps, const EhlGrid& g, EhlScheme scheme);

/// Line system of one Newton line: J sigma = -R on the interior nodes of the
/// line, with eps, rho and limiter values frozen and the film sensitivity
/// truncated to offsets -1..1 along the line.
struct LineSystem {
    BandedMatrix jacobian;
    RealVector rhs;
    std::vector<std::size_t> nodes;
};

[[nodiscard]] LineSystem assemble_newton_line(const EhlState& s, const EhlContext& ctx, LineDirection dir,
                                              std::size_t line);
/// Distributive line (Ls4 / Ls5): the change sigma is spread as
/// sigma_k - w * (neighbours), w = 1/4 (point) or 1/2 (line).
[[nodiscard]] LineSystem assemble_distributive_line(const EhlState& s, const EhlContext& ctx, LineDirection dir,
                                                    std::size_t line, LineKind kind);

/// Residual (same scaling as reynolds_residual) on the line nodes after the
/// line change sigma, with frozen coefficients and truncated film update.
[[nodiscard]] RealVector frozen_line_residual(const EhlState& s, const EhlContext& ctx, LineDirection dir,
                                              std::size_t line, std::span<const double> sigma);

/// Leading coefficient of the first-order convective part per line kind:
/// (2-k)/2 for Ls1/Ls4, (2-k)/2 + (1-k)/4 for Ls0/Ls5.
[[nodiscard]] double lead_coefficient(LineKind kind, double kappa);

/// Unlimited kappa-scheme difference q_i - ... split as lead*(q_i - q_{i-1})
/// plus the remaining Van Leer terms; both groupings give the same total.
struct ConvectionSplit {
    double lead;
    double remainder;
};
[[nodiscard]] ConvectionSplit kappa_convection_split(double qm2, double qm1, double q0, double qp1, double kappa,
                                                     LineKind kind);

/// One sweep over all lines in `dir`. Changes at Newton nodes are applied
/// at once (u clamped to >= 0, film refreshed near the line); distributive
/// changes are collected and applied at the end. Returns the residual norm.
double hybrid_sweep(EhlState& s, const EhlContext& ctx, LineDirection dir, EhlScheme scheme);

/// Newton lines only.
double newton_line_sweep(EhlState& s, const EhlContext& ctx, LineDirection dir = LineDirection::X);
/// Distributive lines only (changes applied at the end of the sweep).
double weighted_change_sweep(EhlState& s, const EhlContext& ctx, LineDirection dir = LineDirection::X,
                             LineKind kind = LineKind::Ls4);

/// H0 <- H0 - c (target - h^d sum u). Returns the new H0.
[[nodiscard]] double force_balance_update(const EhlState& s, const EhlParams& p);
[[nodiscard]] double load_integral(const EhlState& s);

struct EhlSolveOptions {
    EhlScheme scheme = EhlScheme::Lhs1;
    double kappa = 1.0 / 3.0;
    Limiter limiter = Limiter::None;
    double tol = 1e-6;
    double tol_fb = 1e-4;
    std::size_t max_outer = 10000;
    std::size_t divergence_window = 20;
    /// Optional starting pressure (same grid); Hertz otherwise.
    std::optional<RealVector> initial;
    std::optional<double> initial_h0;
};

struct EhlResult {
    EhlState state;
    std::size_t iterations = 0;
    double residual = 0.0;
    double force_residual = 0.0;
    bool converged = false;
};

/// Alternating x / y sweeps (x only for line contact) with a force-balance
/// update after every outer iteration. Throws NonConvergence when the
/// residual grows over `divergence_window` consecutive iterations to more
/// than 10x its best value, or when the iteration cap is reached.
[[nodiscard]] EhlResult solve_ehl(const EhlParams& params, std::size_t n, const EhlSolveOptions& opts);

/// Pressure of a coarse solution prolonged to a grid with twice the
/// intervals (bilinear interpolation).
[[nodiscard]] RealVector prolong_pressure(const EhlGrid& coarse, const RealVector& u);

/// Inter-grid error of a coarse solution against the next finer one
/// (injection). The error sums carry the h^d weight; each norm is divided by
/// the plain discrete norm of the coarse pressure.
[[nodiscard]] ErrorNorms ehl_intergrid_errors(const EhlState& coarse, const EhlState& fine);

struct EhlLevel {
    EhlResult result;
    double seconds = 0.0;
    std::optional<ErrorNorms> error; ///< this level against the next one
};

/// Nested iteration n_first, 2 n_first, ..., n_last: each level starts from
/// the prolonged pressure and H0 of the previous one. Errors are filled for
/// every level except the last.
[[nodiscard]] std::vector<EhlLevel> solve_ehl_nested(const EhlParams& params, std::size_t n_first,
                                                     std::size_t n_last, const EhlSolveOptions& opts);

/// Whitespace-delimited x y u H records.
void write_solution(const EhlState& s, const std::string& path);

} // namespace qif
