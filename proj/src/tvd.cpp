#include "qif/tvd.hpp"

#include "qif/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qif {

Grid2D Grid2D::unit_square(std::size_t n) {
    if (n == 0) throw ContractViolation("Grid2D: n must be positive");
    Grid2D g;
    g.nx = g.ny = 2 * n - 1;
    return g;
}

void Grid2D::validate() const {
    if (nx == 0 || ny == 0) throw ContractViolation("Grid2D: empty grid");
    if (!(x_hi > x_lo) || !(y_hi > y_lo)) throw ContractViolation("Grid2D: bad bounds");
    const double hy = (y_hi - y_lo) / static_cast<double>(ny + 1);
    if (std::abs(hy - h()) > 1e-12 * h()) throw ContractViolation("Grid2D: spacing must be equal in x and y");
}

SolutionField::SolutionField(const Grid2D& g, double fill) : grid_(g), v_((g.nx + 4) * (g.ny + 4), fill) {}

void SolutionField::set_boundary(const std::function<double(double, double)>& g) {
    const long nx = static_cast<long>(grid_.nx), ny = static_cast<long>(grid_.ny);
    for (long j = -1; j <= ny + 2; ++j)
        for (long i = -1; i <= nx + 2; ++i) {
            const bool inner = i >= 1 && i <= nx && j >= 1 && j <= ny;
            if (!inner) (*this)(i, j) = g(grid_.x(i), grid_.y(j));
        }
}

RealVector SolutionField::interior() const {
    RealVector out;
    out.reserve(grid_.interior_size());
    for (long j = 1; j <= static_cast<long>(grid_.ny); ++j)
        for (long i = 1; i <= static_cast<long>(grid_.nx); ++i) out.push_back((*this)(i, j));
    return out;
}

void SolutionField::set_interior(std::span<const double> v) {
    if (v.size() != grid_.interior_size()) throw ContractViolation("SolutionField: interior size mismatch");
    std::size_t k = 0;
    for (long j = 1; j <= static_cast<long>(grid_.ny); ++j)
        for (long i = 1; i <= static_cast<long>(grid_.nx); ++i) (*this)(i, j) = v[k++];
}

Limiter parse_limiter(const std::string& name) {
    if (name == "none") return Limiter::None;
    if (name == "van-albada") return Limiter::VanAlbada;
    if (name == "koren") return Limiter::Koren;
    if (name == "minmod") return Limiter::Minmod;
    throw ConfigError("unknown limiter '" + name + "'");
}

std::string to_string(Limiter l) {
    switch (l) {
    case Limiter::None: return "none";
    case Limiter::VanAlbada: return "van-albada";
    case Limiter::Koren: return "koren";
    case Limiter::Minmod: return "minmod";
    }
    return "?";
}

double limiter_phi(Limiter l, double r, double kappa) {
    const double line = 0.5 * (1.0 - kappa) + 0.5 * (1.0 + kappa) * r;
    switch (l) {
    case Limiter::None: return line;
    case Limiter::VanAlbada: return r <= 0.0 ? 0.0 : (r * r + r) / (r * r + 1.0);
    case Limiter::Koren: return std::max(0.0, std::min({2.0 * r, line, 2.0}));
    case Limiter::Minmod: return std::max(0.0, std::min(1.0, r));
    }
    return 0.0;
}

double guarded_ratio(double num, double den) noexcept {
    if (std::abs(den) < 1e-30) den = den < 0.0 ? -1e-30 : 1e-30;
    return num / den;
}

ConvectionField ConvectionField::constant(double c) {
    return {[c](double, double) { return c; }, [](double, double) { return 0.0; }};
}

void KappaSchemeConfig::validate() const {
    if (!(kappa >= -1.0 && kappa <= 1.0)) throw ConfigError("kappa must lie in [-1, 1]");
    if (!(eps > 0.0)) throw ConfigError("diffusion eps must be positive");
    if (!a.value || !b.value) throw ConfigError("convection fields are not set");
}

namespace {

// Upwind face value with u_m the upwind-most, u_c the upwind and u_d the
// downwind node: u_c + phi/2 (u_c - u_m).
double face_value(double um, double uc, double ud, Limiter l, double kappa) {
    const double dm = uc - um, dp = ud - uc;
    if (l == Limiter::None) return uc + 0.25 * ((1.0 - kappa) * dm + (1.0 + kappa) * dp);
    return uc + 0.5 * limiter_phi(l, guarded_ratio(dp, dm), kappa) * dm;
}

struct Line5 {
    double m2, m1, c, p1, p2; // values at offsets -2..2 along one axis
};

// (v_{+} F_{+} - v_{-} F_{-}) / h along one axis. `lo_edge` / `hi_edge` mark
// that the -2 / +2 value is a ghost.
double axis_flux_difference(const Line5& u, double vm, double vp, double h, const KappaSchemeConfig& cfg, bool lo_edge,
                            bool hi_edge, ConvectionForm form) {
    const Limiter l = cfg.limiter;
    const double k = cfg.kappa;
    const bool fo = cfg.first_order_boundary;
    if (form == ConvectionForm::FourTerm && vm >= 0.0 && vp >= 0.0 && !(fo && lo_edge)) {
        const double dm = u.c - u.m1, dmm = u.m1 - u.m2, dp = u.p1 - u.c;
        const double phi_i = limiter_phi(l, guarded_ratio(dp, dm), k);
        const double phi_im = limiter_phi(l, guarded_ratio(dm, dmm), k);
        return (vp * u.c - vm * u.m1 + 0.5 * phi_i * vp * dm + 0.5 * phi_im * vm * dm -
                0.5 * phi_im * vm * (u.c - u.m2)) /
               h;
    }
    double fp, fm;
    if (vp >= 0.0) fp = face_value(u.m1, u.c, u.p1, l, k);
    else fp = (fo && hi_edge) ? u.p1 : face_value(u.p2, u.p1, u.c, l, k);
    if (vm >= 0.0) fm = (fo && lo_edge) ? u.m1 : face_value(u.m2, u.m1, u.c, l, k);
    else fm = face_value(u.p1, u.c, u.m1, l, k);
    return (vp * fp - vm * fm) / h;
}

// Linear stencil weights of one face value, written into w[0..4] for offsets
// -2..2 relative to the node owning the row.
void add_face_weights(std::array<double, 5>& w, int face, double v, double scale, double kappa, bool first_order) {
    // face = +1 for i+1/2, -1 for i-1/2
    const double a0 = -(1.0 - kappa) / 4.0, a1 = 1.0 - kappa / 2.0, a2 = (1.0 + kappa) / 4.0;
    const int base = face > 0 ? 0 : -1; // offset of the left node of the face
    if (v >= 0.0) {
        if (first_order) {
            w[static_cast<std::size_t>(base + 2)] += scale * v;
            return;
        }
        w[static_cast<std::size_t>(base - 1 + 2)] += scale * v * a0;
        w[static_cast<std::size_t>(base + 2)] += scale * v * a1;
        w[static_cast<std::size_t>(base + 1 + 2)] += scale * v * a2;
    } else {
        if (first_order) {
            w[static_cast<std::size_t>(base + 1 + 2)] += scale * v;
            return;
        }
        w[static_cast<std::size_t>(base + 2)] += scale * v * a2;
        w[static_cast<std::size_t>(base + 1 + 2)] += scale * v * a1;
        w[static_cast<std::size_t>(base + 2 + 2)] += scale * v * a0;
    }
}

ErrorNorms finish_norms(double linf, double s1, double s2, double h) {
    return {linf, h * h * s1, std::sqrt(h * h * s2)};
}

} // namespace

double StencilOperator::apply(const SolutionField& u, long i, long j) const {
    const auto& c = at(i, j);
    double s = 0.0;
    for (std::size_t k = 0; k < offsets.size(); ++k) s += c[k] * u(i + offsets[k][0], j + offsets[k][1]);
    return s;
}

StencilOperator assemble_kappa_operator(const KappaSchemeConfig& cfg, const Grid2D& g) {
    cfg.validate();
    g.validate();
    StencilOperator op;
    op.grid = g;
    op.coeff.assign(g.interior_size(), {});
    const double h = g.h(), d = cfg.eps / (h * h);
    const long nx = static_cast<long>(g.nx), ny = static_cast<long>(g.ny);
    const bool fo = cfg.first_order_boundary;
    for (long j = 1; j <= ny; ++j) {
        for (long i = 1; i <= nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            std::array<double, 5> wx{}, wy{};
            const double ap = cfg.a.value(x + 0.5 * h, y), am = cfg.a.value(x - 0.5 * h, y);
            const double bp = cfg.b.value(x, y + 0.5 * h), bm = cfg.b.value(x, y - 0.5 * h);
            add_face_weights(wx, +1, ap, 1.0 / h, cfg.kappa, fo && ap < 0.0 && i == nx);
            add_face_weights(wx, -1, am, -1.0 / h, cfg.kappa, fo && am >= 0.0 && i == 1);
            add_face_weights(wy, +1, bp, 1.0 / h, cfg.kappa, fo && bp < 0.0 && j == ny);
            add_face_weights(wy, -1, bm, -1.0 / h, cfg.kappa, fo && bm >= 0.0 && j == 1);
            auto& c = op.coeff[static_cast<std::size_t>(i - 1) + static_cast<std::size_t>(j - 1) * g.nx];
            c[0] = wx[0];
            c[1] = wx[1] - d;
            c[2] = wx[2] + wy[2] + 4.0 * d;
            c[3] = wx[3] - d;
            c[4] = wx[4];
            c[5] = wy[1] - d;
            c[6] = wy[0];
            c[7] = wy[3] - d;
            c[8] = wy[4];
        }
    }
    return op;
}

double limited_convection_row(const SolutionField& u, long i, long j, const KappaSchemeConfig& cfg,
                              ConvectionForm form) {
    const Grid2D& g = u.grid();
    const double h = g.h(), x = g.x(i), y = g.y(j);
    const long nx = static_cast<long>(g.nx), ny = static_cast<long>(g.ny);
    const Line5 lx{u(i - 2, j), u(i - 1, j), u(i, j), u(i + 1, j), u(i + 2, j)};
    const Line5 ly{u(i, j - 2), u(i, j - 1), u(i, j), u(i, j + 1), u(i, j + 2)};
    const double cx = axis_flux_difference(lx, cfg.a.value(x - 0.5 * h, y), cfg.a.value(x + 0.5 * h, y), h, cfg,
                                           i == 1, i == nx, form);
    const double cy = axis_flux_difference(ly, cfg.b.value(x, y - 0.5 * h), cfg.b.value(x, y + 0.5 * h), h, cfg,
                                           j == 1, j == ny, form);
    return cx + cy;
}

double apply_operator(const SolutionField& u, long i, long j, const KappaSchemeConfig& cfg) {
    const double h = u.grid().h();
    const double diff =
        cfg.eps / (h * h) * (4.0 * u(i, j) - u(i - 1, j) - u(i + 1, j) - u(i, j - 1) - u(i, j + 1));
    return limited_convection_row(u, i, j, cfg) + diff;
}

bool check_tvd_coefficients(std::span<const double> c, std::span<const double> d) {
    if (c.size() != d.size()) throw ContractViolation("check_tvd_coefficients: length mismatch");
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!(c[i] >= 0.0 && d[i] >= 0.0 && c[i] + d[i] <= 1.0)) return false;
    return true;
}

double total_variation(std::span<const double> u) {
    double tv = 0.0;
    for (std::size_t i = 1; i < u.size(); ++i) tv += std::abs(u[i] - u[i - 1]);
    return tv;
}

namespace {

// Face values F_{i+1/2} for i = 0..n-1; the right end extends u by a copy.
RealVector upwind_faces(std::span<const double> u, Limiter limiter, double kappa) {
    const std::size_t n = u.size();
    RealVector f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double um = i == 0 ? u[0] : u[i - 1];
        const double up = i + 1 < n ? u[i + 1] : u[i];
        f[i] = face_value(um, u[i], up, limiter, kappa);
    }
    return f;
}

} // namespace

RealVector limited_upwind_step(std::span<const double> u, double nu, Limiter limiter, double kappa) {
    if (u.size() < 3) throw ContractViolation("limited_upwind_step: need at least 3 nodes");
    const RealVector f = upwind_faces(u, limiter, kappa);
    RealVector out(u.begin(), u.end());
    for (std::size_t i = 2; i < u.size(); ++i) out[i] = u[i] - nu * (f[i] - f[i - 1]);
    return out;
}

IncrementCoefficients limited_upwind_increments(std::span<const double> u, double nu, Limiter limiter,
                                                double kappa) {
    const RealVector f = upwind_faces(u, limiter, kappa);
    IncrementCoefficients ic{RealVector(u.size(), 0.0), RealVector(u.size(), 0.0)};
    for (std::size_t i = 2; i < u.size(); ++i) {
        const double dm = u[i] - u[i - 1];
        ic.c[i] = std::abs(dm) > 1e-30 ? nu * (f[i] - f[i - 1]) / dm : nu;
    }
    return ic;
}

SolutionField ConvectionDiffusionProblem::initial_field() const {
    SolutionField u(grid, 0.0);
    u.set_boundary(exact);
    return u;
}

SolutionField ConvectionDiffusionProblem::exact_field() const {
    SolutionField u(grid, 0.0);
    const long nx = static_cast<long>(grid.nx), ny = static_cast<long>(grid.ny);
    for (long j = -1; j <= ny + 2; ++j)
        for (long i = -1; i <= nx + 2; ++i) u(i, j) = exact(grid.x(i), grid.y(j));
    return u;
}

ConvectionDiffusionProblem quartic_problem(std::size_t n, const KappaSchemeConfig& cfg) {
    cfg.validate();
    ConvectionDiffusionProblem p;
    p.grid = Grid2D::unit_square(n);
    p.cfg = cfg;
    p.exact = [](double x, double y) { return x * x * x * x + y * y * y * y; };
    p.f.resize(p.grid.interior_size());
    std::size_t k = 0;
    for (long j = 1; j <= static_cast<long>(p.grid.ny); ++j) {
        for (long i = 1; i <= static_cast<long>(p.grid.nx); ++i) {
            const double x = p.grid.x(i), y = p.grid.y(j);
            const double u = p.exact(x, y);
            const double ux = 4.0 * x * x * x, uy = 4.0 * y * y * y, lap = 12.0 * (x * x + y * y);
            p.f[k++] = cfg.a.derivative(x, y) * u + cfg.a.value(x, y) * ux + cfg.b.derivative(x, y) * u +
                       cfg.b.value(x, y) * uy - cfg.eps * lap;
        }
    }
    return p;
}

ResidualNorm residual_norm(const SolutionField& u, const ConvectionDiffusionProblem& p) {
    const double h2 = p.grid.h() * p.grid.h();
    double s = 0.0, mx = 0.0;
    for (long j = 1; j <= static_cast<long>(p.grid.ny); ++j)
        for (long i = 1; i <= static_cast<long>(p.grid.nx); ++i) {
            const double r = p.rhs(i, j) - apply_operator(u, i, j, p.cfg);
            s += (h2 * r) * (h2 * r);
            mx = std::max(mx, std::abs(r));
        }
    return {std::sqrt(s / static_cast<double>(p.grid.interior_size())), mx};
}

ErrorNorms error_norms(const SolutionField& u_h, const std::function<double(double, double)>& exact) {
    const Grid2D& g = u_h.grid();
    double linf = 0.0, s1 = 0.0, s2 = 0.0;
    for (long j = 1; j <= static_cast<long>(g.ny); ++j)
        for (long i = 1; i <= static_cast<long>(g.nx); ++i) {
            const double e = std::abs(u_h(i, j) - exact(g.x(i), g.y(j)));
            linf = std::max(linf, e);
            s1 += e;
            s2 += e * e;
        }
    return finish_norms(linf, s1, s2, g.h());
}

ErrorNorms error_norms(const SolutionField& u_h, const SolutionField& fine) {
    const Grid2D& g = u_h.grid();
    const Grid2D& f = fine.grid();
    const bool nested = f.nx + 1 == 2 * (g.nx + 1) && f.ny + 1 == 2 * (g.ny + 1) && f.x_lo == g.x_lo &&
                        f.x_hi == g.x_hi && f.y_lo == g.y_lo && f.y_hi == g.y_hi;
    if (!nested) throw ContractViolation("error_norms: grids are not nested");
    double linf = 0.0, s1 = 0.0, s2 = 0.0;
    for (long j = 1; j <= static_cast<long>(g.ny); ++j)
        for (long i = 1; i <= static_cast<long>(g.nx); ++i) {
            const double e = std::abs(u_h(i, j) - fine(2 * i, 2 * j));
            linf = std::max(linf, e);
            s1 += e;
            s2 += e * e;
        }
    return finish_norms(linf, s1, s2, g.h());
}

double convergence_order(double e_coarse, double e_fine) {
    if (!(e_coarse > 0.0 && e_fine > 0.0)) throw ContractViolation("convergence_order: errors must be positive");
    return (std::log(e_coarse) - std::log(e_fine)) / std::log(2.0);
}

} // namespace qif
