#include "qif/ehl.hpp"
#include "qif/errors.hpp"
#include "qif/lcp.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

namespace qif {

EhlScheme parse_ehl_scheme(const std::string& name) {
    if (name == "Lhs1") return EhlScheme::Lhs1;
    if (name == "Lhs2") return EhlScheme::Lhs2;
    throw ConfigError("unknown EHL scheme '" + name + "'");
}

std::string to_string(EhlScheme s) { return s == EhlScheme::Lhs1 ? "Lhs1" : "Lhs2"; }

std::string to_string(LineKind k) {
    switch (k) {
    case LineKind::Ls0: return "Ls0";
    case LineKind::Ls1: return "Ls1";
    case LineKind::Ls4: return "Ls4";
    case LineKind::Ls5: return "Ls5";
    }
    return "?";
}

double lead_coefficient(LineKind kind, double kappa) {
    if (kappa < -1.0 || kappa > 1.0) throw ContractViolation("kappa must lie in [-1, 1]");
    const double base = (2.0 - kappa) / 2.0;
    return kind == LineKind::Ls1 || kind == LineKind::Ls4 ? base : base + (1.0 - kappa) / 4.0;
}

ConvectionSplit kappa_convection_split(double qm2, double qm1, double q0, double qp1, double kappa, LineKind kind) {
    const double lead = lead_coefficient(kind, kappa);
    const double fwd = (1.0 + kappa) / 4.0 * (qp1 - q0);
    if (kind == LineKind::Ls1 || kind == LineKind::Ls4) return {lead, fwd - (1.0 - kappa) / 4.0 * (qm1 - qm2)};
    return {lead, fwd - (1.0 - kappa) / 4.0 * (q0 - qm2)};
}

namespace {

bool is_newton(LineKind k) { return k == LineKind::Ls0 || k == LineKind::Ls1; }

// Coordinates of the interior nodes of one line.
struct Line {
    const EhlGrid* g;
    LineDirection dir;
    std::size_t fixed;

    [[nodiscard]] std::size_t size() const { return g->n - 1; }
    [[nodiscard]] std::array<std::size_t, 2> ij(std::size_t p) const {
        return dir == LineDirection::X ? std::array<std::size_t, 2>{p + 1, fixed} : std::array<std::size_t, 2>{fixed, p + 1};
    }
    [[nodiscard]] std::size_t node(std::size_t p) const {
        const auto c = ij(p);
        return g->index(c[0], c[1]);
    }
    // Position along the line of grid coordinates (i, j).
    [[nodiscard]] long along(long i, long j) const { return dir == LineDirection::X ? i : j; }
};

Line make_line(const EhlGrid& g, LineDirection dir, std::size_t line) {
    if (g.type == ContactType::Line && (dir != LineDirection::X || line != 0))
        throw ContractViolation("line contact has a single x-line");
    if (g.type == ContactType::Point && (line < 1 || line + 1 > g.n))
        throw ContractViolation("line index must be an interior row or column");
    return {&g, dir, line};
}

double q_at(const EhlState& s, std::size_t k) { return s.rho[k] * s.film[k]; }

// Weights of q at i-1, i, i+1 in the face value between i and i+1.
std::array<double, 3> face_weights(const EhlState& s, const EhlContext& ctx, std::size_t i, std::size_t j) {
    if (i == 0) return {0.0, 1.0, 0.0};
    const double k = ctx.kappa;
    if (ctx.limiter == Limiter::None) return {-(1.0 - k) / 4.0, 1.0 - k / 2.0, (1.0 + k) / 4.0};
    const EhlGrid& g = s.grid;
    const double qm = q_at(s, g.index(i - 1, j)), q0 = q_at(s, g.index(i, j)), qp = q_at(s, g.index(i + 1, j));
    const double phi = limiter_phi(ctx.limiter, guarded_ratio(qp - q0, q0 - qm), k);
    return {-0.5 * phi, 1.0 + 0.5 * phi, 0.0};
}

// Frozen coefficients of the residual at an interior node (before the h^d scale).
struct NodeStencil {
    std::array<double, 4> conv{}; // q at i-2 .. i+1 (entries reaching below 0 stay zero)
    double ew = 0, ee = 0, es = 0, en = 0;
};

NodeStencil node_stencil(const EhlState& s, const EhlContext& ctx, std::size_t i, std::size_t j) {
    const EhlGrid& g = s.grid;
    const double h = g.h(), h2 = h * h;
    NodeStencil st;
    const auto wp = face_weights(s, ctx, i, j);
    const auto wm = face_weights(s, ctx, i - 1, j);
    for (std::size_t t = 0; t < 3; ++t) {
        st.conv[t + 1] += wp[t] / h;
        st.conv[t] -= wm[t] / h;
    }
    const std::size_t c = g.index(i, j);
    st.ew = 0.5 * (s.eps[c] + s.eps[g.index(i - 1, j)]) / h2;
    st.ee = 0.5 * (s.eps[c] + s.eps[g.index(i + 1, j)]) / h2;
    if (g.type == ContactType::Point) {
        st.es = 0.5 * (s.eps[c] + s.eps[g.index(i, j - 1)]) / h2;
        st.en = 0.5 * (s.eps[c] + s.eps[g.index(i, j + 1)]) / h2;
    }
    return st;
}

double scale_of(const EhlGrid& g) { return g.type == ContactType::Line ? g.h() : g.h() * g.h(); }

template <class U, class Q>
double node_residual(const EhlGrid& g, const NodeStencil& st, std::size_t i, std::size_t j, U&& u, Q&& q) {
    const double uc = u(i, j);
    double r = -(st.ee * (u(i + 1, j) - uc) - st.ew * (uc - u(i - 1, j)));
    if (g.type == ContactType::Point) r -= st.en * (u(i, j + 1) - uc) - st.es * (uc - u(i, j - 1));
    for (std::size_t t = 0; t < 4; ++t) {
        if (st.conv[t] == 0.0) continue;
        r += st.conv[t] * q(i + t - 2, j);
    }
    return scale_of(g) * r;
}

double state_residual(const EhlState& s, const EhlContext& ctx, std::size_t i, std::size_t j) {
    const EhlGrid& g = s.grid;
    const NodeStencil st = node_stencil(s, ctx, i, j);
    return node_residual(
        g, st, i, j, [&](std::size_t a, std::size_t b) { return s.u[g.index(a, b)]; },
        [&](std::size_t a, std::size_t b) { return q_at(s, g.index(a, b)); });
}

// Distribution weight of the change sigma_k onto its neighbours.
double spread_weight(const EhlGrid& g) { return g.type == ContactType::Line ? 0.5 : 0.25; }

// Nodes (with weights) receiving a share of the change at interior node (i, j).
template <class F>
void for_each_share(const EhlGrid& g, std::size_t i, std::size_t j, F&& f) {
    const double w = spread_weight(g);
    f(i, j, 1.0);
    const std::array<std::array<long, 2>, 4> nb{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
    const std::size_t count = g.type == ContactType::Line ? 2 : 4;
    for (std::size_t t = 0; t < count; ++t) {
        const long a = static_cast<long>(i) + nb[t][0], b = static_cast<long>(j) + nb[t][1];
        if (a < 0 || b < 0) continue;
        const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        if (g.interior(ua, ub)) f(ua, ub, -w);
    }
}

// Film sensitivity of node (mi, mj) to sigma at line position k, truncated
// to |along(m) - k| <= 1.
double film_sensitivity(const EhlState& s, const EhlContext& ctx, const Line& ln, long mi, long mj, std::size_t k,
                        bool distributive) {
    const long pos = static_cast<long>(k) + 1;
    if (std::abs(ln.along(mi, mj) - pos) > 1) return 0.0;
    const auto src = ln.ij(k);
    if (!distributive)
        return ctx.film->coefficient(mi - static_cast<long>(src[0]), mj - static_cast<long>(src[1]));
    double v = 0.0;
    for_each_share(s.grid, src[0], src[1], [&](std::size_t a, std::size_t b, double w) {
        v += w * ctx.film->coefficient(mi - static_cast<long>(a), mj - static_cast<long>(b));
    });
    return v;
}

// Column k spreads sigma_k by its own node kind; row p uses the exact frozen
// convection at Newton nodes and the lead-coefficient upwind form elsewhere.
LineSystem assemble_line(const EhlState& s, const EhlContext& ctx, LineDirection dir, std::size_t line,
                         const std::vector<LineKind>& kinds) {
    const EhlGrid& g = s.grid;
    const Line ln = make_line(g, dir, line);
    const std::size_t len = ln.size();
    if (kinds.size() != len) throw ContractViolation("assemble_line: one kind per line node expected");
    const double scale = scale_of(g), h = g.h();
    LineSystem sys{BandedMatrix(len, 3), RealVector(len), std::vector<std::size_t>(len)};
    for (std::size_t p = 0; p < len; ++p) {
        const auto [i, j] = ln.ij(p);
        const long ii = static_cast<long>(i), jj = static_cast<long>(j);
        sys.nodes[p] = ln.node(p);
        const NodeStencil st = node_stencil(s, ctx, i, j);
        sys.rhs[p] = -state_residual(s, ctx, i, j);
        // Diffusion coefficients of u at the stencil nodes of (i, j).
        const std::array<std::pair<std::array<long, 2>, double>, 5> diff{{
            {{ii, jj}, st.ee + st.ew + st.en + st.es},
            {{ii - 1, jj}, -st.ew},
            {{ii + 1, jj}, -st.ee},
            {{ii, jj - 1}, -st.es},
            {{ii, jj + 1}, -st.en},
        }};
        const bool newton_row = is_newton(kinds[p]);
        const double lead = newton_row ? 0.0 : lead_coefficient(kinds[p], ctx.kappa);
        const std::size_t lo = p >= 3 ? p - 3 : 0, hi = std::min(len - 1, p + 3);
        for (std::size_t k = lo; k <= hi; ++k) {
            const auto src = ln.ij(k);
            const bool spread = !is_newton(kinds[k]);
            double v = 0.0;
            for (const auto& [at, c] : diff) {
                if (c == 0.0) continue;
                if (!spread) {
                    if (at[0] == static_cast<long>(src[0]) && at[1] == static_cast<long>(src[1])) v += c;
                    continue;
                }
                for_each_share(g, src[0], src[1], [&](std::size_t a, std::size_t b, double w) {
                    if (at[0] == static_cast<long>(a) && at[1] == static_cast<long>(b)) v += c * w;
                });
            }
            if (newton_row) {
                for (std::size_t t = 0; t < 4; ++t) {
                    const long mi = ii + static_cast<long>(t) - 2;
                    if (st.conv[t] == 0.0 || mi < 0) continue;
                    const std::size_t m = g.index(static_cast<std::size_t>(mi), j);
                    v += st.conv[t] * s.rho[m] * film_sensitivity(s, ctx, ln, mi, jj, k, spread);
                }
            } else {
                const double up = s.rho[g.index(i, j)] * film_sensitivity(s, ctx, ln, ii, jj, k, spread);
                const double dn = s.rho[g.index(i - 1, j)] * film_sensitivity(s, ctx, ln, ii - 1, jj, k, spread);
                v += lead * (up - dn) / h;
            }
            if (v != 0.0) sys.jacobian.set(p, k, scale * v);
        }
    }
    return sys;
}

// Band LU with partial pivoting; used when the pivot-free WZ solve breaks down.
RealVector solve_band_pivoted(const BandedMatrix& a, RealVector b) {
    const std::size_t n = a.order(), beta = a.semibandwidth(), w = 3 * beta + 1;
    // Row i holds columns i - beta .. i + 2 beta.
    std::vector<double> m(n * w, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * w + (j + beta - i)]; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i >= beta ? i - beta : 0; j <= std::min(n - 1, i + beta); ++j) at(i, j) = a(i, j);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t last = std::min(n - 1, k + beta);
        std::size_t piv = k;
        for (std::size_t i = k + 1; i <= last; ++i)
            if (std::abs(at(i, k)) > std::abs(at(piv, k))) piv = i;
        if (at(piv, k) == 0.0) throw FactorizationBreakdown("EHL line system is singular");
        const std::size_t cend = std::min(n - 1, k + 2 * beta);
        if (piv != k) {
            for (std::size_t j = k; j <= cend; ++j) std::swap(at(k, j), at(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i <= last; ++i) {
            const double f = at(i, k) / at(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j <= cend; ++j) at(i, j) -= f * at(k, j);
            b[i] -= f * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double v = b[k];
        for (std::size_t j = k + 1; j <= std::min(n - 1, k + 2 * beta); ++j) v -= at(k, j) * b[j];
        b[k] = v / at(k, k);
    }
    return b;
}

RealVector solve_system(const LineSystem& sys) {
    try {
        RealVector x = solve_line_block(sys.jacobian, 0, sys.jacobian.order(), sys.rhs);
        if (std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) return x;
    } catch (const FactorizationBreakdown&) {
    }
    return solve_band_pivoted(sys.jacobian, sys.rhs);
}

void refresh_nodes(EhlState& s, const EhlContext& ctx, std::size_t k) {
    s.rho[k] = rheology(s.u[k], ctx.params).rho;
    s.eps[k] = reynolds_eps(s.u[k], s.film[k], ctx.params);
}

// Exact film update on the lines next to `line` after the pressure change du
// at the line nodes.
void update_film_near(EhlState& s, const EhlContext& ctx, const Line& ln, const RealVector& du) {
    const EhlGrid& g = s.grid;
    const long lo = static_cast<long>(ln.fixed) - 1, hi = static_cast<long>(ln.fixed) + 2;
    const std::size_t len = ln.size();
    for (long c = std::max(0L, lo); c <= std::min(static_cast<long>(g.rows() - 1), hi); ++c) {
        if (g.type == ContactType::Line && c != 0) continue;
        for (std::size_t t = 0; t <= g.n; ++t) {
            const std::size_t mi = ln.dir == LineDirection::X ? t : static_cast<std::size_t>(c);
            const std::size_t mj = ln.dir == LineDirection::X ? static_cast<std::size_t>(c) : t;
            double d = 0.0;
            for (std::size_t k = 0; k < len; ++k) {
                if (du[k] == 0.0) continue;
                const auto src = ln.ij(k);
                d += du[k] * ctx.film->coefficient(static_cast<long>(mi) - static_cast<long>(src[0]),
                                                   static_cast<long>(mj) - static_cast<long>(src[1]));
            }
            const std::size_t m = g.index(mi, mj);
            s.film[m] += d;
            refresh_nodes(s, ctx, m);
        }
    }
}

} // namespace

LineSystem assemble_newton_line(const EhlState& s, const EhlContext& ctx, LineDirection dir, std::size_t line) {
    return assemble_line(s, ctx, dir, line, std::vector<LineKind>(s.grid.n - 1, LineKind::Ls1));
}

LineSystem assemble_distributive_line(const EhlState& s, const EhlContext& ctx, LineDirection dir, std::size_t line,
                                      LineKind kind) {
    if (is_newton(kind)) throw ContractViolation("assemble_distributive_line: kind must be Ls4 or Ls5");
    return assemble_line(s, ctx, dir, line, std::vector<LineKind>(s.grid.n - 1, kind));
}

RealVector frozen_line_residual(const EhlState& s, const EhlContext& ctx, LineDirection dir, std::size_t line,
                                std::span<const double> sigma) {
    const EhlGrid& g = s.grid;
    const Line ln = make_line(g, dir, line);
    if (sigma.size() != ln.size()) throw ContractViolation("frozen_line_residual: sigma size mismatch");
    RealVector out(ln.size());
    for (std::size_t p = 0; p < ln.size(); ++p) {
        const auto [i, j] = ln.ij(p);
        const NodeStencil st = node_stencil(s, ctx, i, j);
        auto u = [&](std::size_t a, std::size_t b) {
            double v = s.u[g.index(a, b)];
            for (std::size_t k = 0; k < ln.size(); ++k) {
                const auto src = ln.ij(k);
                if (src[0] == a && src[1] == b) v += sigma[k];
            }
            return v;
        };
        auto q = [&](std::size_t a, std::size_t b) {
            const std::size_t m = g.index(a, b);
            double film = s.film[m];
            for (std::size_t k = 0; k < ln.size(); ++k)
                film += film_sensitivity(s, ctx, ln, static_cast<long>(a), static_cast<long>(b), k, false) * sigma[k];
            return s.rho[m] * film;
        };
        out[p] = node_residual(g, st, i, j, u, q);
    }
    return out;
}

RealVector reynolds_residual(const EhlState& s, const EhlContext& ctx) {
    const EhlGrid& g = s.grid;
    RealVector r(g.node_count(), 0.0);
    for (std::size_t j = 0; j < g.rows(); ++j)
        for (std::size_t i = 0; i <= g.n; ++i)
            if (g.interior(i, j)) r[g.index(i, j)] = state_residual(s, ctx, i, j);
    return r;
}

double complementarity_norm(const EhlState& s, const RealVector& r) {
    double m = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) m = std::max(m, s.u[k] > 0.0 ? std::abs(r[k]) : std::max(0.0, -r[k]));
    return m;
}

std::vector<LineKind> hybrid_select(const RealVector& eps, const EhlGrid& g, EhlScheme scheme) {
    if (eps.size() != g.node_count()) throw ContractViolation("hybrid_select: eps size mismatch");
    const LineKind newton = scheme == EhlScheme::Lhs1 ? LineKind::Ls1 : LineKind::Ls0;
    const LineKind dist = scheme == EhlScheme::Lhs1 ? LineKind::Ls4 : LineKind::Ls5;
    std::vector<LineKind> kinds(eps.size(), newton);
    for (std::size_t k = 0; k < eps.size(); ++k)
        if (!(eps[k] / g.h() > 0.6)) kinds[k] = dist;
    return kinds;
}

namespace {

// Nodes with u = 0 whose residual asks for a further decrease keep sigma = 0.
void pin_cavitated(LineSystem& sys, const EhlState& s) {
    const std::size_t len = sys.rhs.size(), beta = sys.jacobian.semibandwidth();
    for (std::size_t p = 0; p < len; ++p) {
        if (s.u[sys.nodes[p]] > 0.0 || sys.rhs[p] > 0.0) continue;
        for (std::size_t k = p >= beta ? p - beta : 0; k <= std::min(len - 1, p + beta); ++k)
            sys.jacobian.set(p, k, k == p ? 1.0 : 0.0);
        sys.rhs[p] = 0.0;
    }
}

double run_sweep(EhlState& s, const EhlContext& ctx, LineDirection dir, const std::vector<LineKind>& node_kinds) {
    const EhlGrid& g = s.grid;
    const double wj = ctx.params.omega_jacobi, wn = ctx.params.omega;
    RealVector pending(g.node_count(), 0.0);
    bool any_pending = false;
    const std::size_t count = g.type == ContactType::Line ? 1 : g.n - 1;
    for (std::size_t l = 0; l < count; ++l) {
        const std::size_t line = g.type == ContactType::Line ? 0 : l + 1;
        const Line ln = make_line(g, dir, line);
        std::vector<LineKind> kinds(ln.size());
        for (std::size_t k = 0; k < ln.size(); ++k) kinds[k] = node_kinds[ln.node(k)];
        LineSystem sys = assemble_line(s, ctx, dir, line, kinds);
        pin_cavitated(sys, s);
        const RealVector sigma = solve_system(sys);
        RealVector du(ln.size(), 0.0);
        bool any_now = false;
        for (std::size_t k = 0; k < ln.size(); ++k) {
            if (is_newton(kinds[k])) {
                double& u = s.u[sys.nodes[k]];
                const double next = std::max(0.0, u + wn * sigma[k]);
                du[k] = next - u;
                u = next;
                any_now = any_now || du[k] != 0.0;
                continue;
            }
            any_pending = true;
            const auto src = ln.ij(k);
            for_each_share(g, src[0], src[1],
                           [&](std::size_t a, std::size_t b, double w) { pending[g.index(a, b)] += wj * w * sigma[k]; });
        }
        if (any_now) update_film_near(s, ctx, ln, du);
    }
    if (any_pending)
        for (std::size_t k = 0; k < s.u.size(); ++k) s.u[k] = std::max(0.0, s.u[k] + pending[k]);
    refresh_state(s, ctx);
    return complementarity_norm(s, reynolds_residual(s, ctx));
}

void demote_near_cavitation(std::vector<LineKind>& kinds, const RealVector& u, const EhlGrid& g, EhlScheme scheme) {
    const LineKind newton = scheme == EhlScheme::Lhs1 ? LineKind::Ls1 : LineKind::Ls0;
    const std::vector<LineKind> orig = kinds;
    for (std::size_t j = 0; j < g.rows(); ++j)
        for (std::size_t i = 0; i <= g.n; ++i) {
            const std::size_t k = g.index(i, j);
            if (!g.interior(i, j) || is_newton(orig[k])) continue;
            bool dry = u[k] <= 0.0;
            for_each_share(g, i, j, [&](std::size_t a, std::size_t b, double) { dry = dry || u[g.index(a, b)] <= 0.0; });
            if (dry) kinds[k] = newton;
        }
}

} // namespace

double hybrid_sweep(EhlState& s, const EhlContext& ctx, LineDirection dir, EhlScheme scheme) {
    std::vector<LineKind> kinds = hybrid_select(s.eps, s.grid, scheme);
    demote_near_cavitation(kinds, s.u, s.grid, scheme);
    return run_sweep(s, ctx, dir, kinds);
}

double newton_line_sweep(EhlState& s, const EhlContext& ctx, LineDirection dir) {
    return run_sweep(s, ctx, dir, std::vector<LineKind>(s.grid.node_count(), LineKind::Ls1));
}

double weighted_change_sweep(EhlState& s, const EhlContext& ctx, LineDirection dir, LineKind kind) {
    if (is_newton(kind)) throw ContractViolation("weighted_change_sweep: kind must be Ls4 or Ls5");
    return run_sweep(s, ctx, dir, std::vector<LineKind>(s.grid.node_count(), kind));
}

EhlResult solve_ehl(const EhlParams& params, std::size_t n, const EhlSolveOptions& opts) {
    params.validate();
    if (opts.kappa < -1.0 || opts.kappa > 1.0) throw ConfigError("kappa must lie in [-1, 1]");
    EhlContext ctx;
    ctx.params = params.resolved();
    ctx.kappa = opts.kappa;
    ctx.limiter = opts.limiter;
    const EhlGrid g = EhlGrid::from(ctx.params, n);
    const FilmThickness film(g, g.type == ContactType::Line ? kernel_line(n, g.h()) : kernel_point(n, n, g.h()));
    ctx.film = &film;
    if (opts.initial_h0) ctx.params.h0 = *opts.initial_h0;
    EhlResult res;
    res.state = make_state(ctx, opts.initial ? *opts.initial : hertzian_init(g, ctx.params.load_target));
    EhlState& s = res.state;
    double prev = std::numeric_limits<double>::infinity(), best = prev;
    std::size_t growth = 0;
    for (std::size_t it = 1; it <= opts.max_outer; ++it) {
        hybrid_sweep(s, ctx, LineDirection::X, opts.scheme);
        if (g.type == ContactType::Point) hybrid_sweep(s, ctx, LineDirection::Y, opts.scheme);
        s.h0 = force_balance_update(s, ctx.params);
        refresh_state(s, ctx);
        const double r = complementarity_norm(s, reynolds_residual(s, ctx));
        const double fb = std::abs(ctx.params.load_target - load_integral(s));
        s.residual_history.push_back(r);
        s.force_history.push_back(fb);
        res.iterations = it;
        res.residual = r;
        res.force_residual = fb;
        const bool finite = std::isfinite(r) && std::isfinite(s.h0) &&
                            std::all_of(s.u.begin(), s.u.end(), [](double v) { return std::isfinite(v); });
        if (!finite) throw NonConvergence("EHL solve produced non-finite values", r);
        if (r <= opts.tol && fb <= opts.tol_fb) {
            res.converged = true;
            return res;
        }
        // The H0 update drives damped oscillations; only sustained growth
        // well above the best residual counts as divergence.
        growth = r > prev ? growth + 1 : 0;
        prev = r;
        best = std::min(best, r);
        if (growth >= opts.divergence_window && r > 10.0 * best)
            throw NonConvergence("EHL residual grew over " + std::to_string(growth) + " consecutive iterations", r);
    }
    throw NonConvergence("EHL solve hit the iteration cap", res.residual);
}

ErrorNorms ehl_intergrid_errors(const EhlState& coarse, const EhlState& fine) {
    const EhlGrid& g = coarse.grid;
    const EhlGrid& f = fine.grid;
    if (f.type != g.type || f.n != 2 * g.n || f.x_lo != g.x_lo || f.x_hi != g.x_hi || f.y_lo != g.y_lo ||
        f.y_hi != g.y_hi)
        throw ContractViolation("ehl_intergrid_errors: grids are not nested");
    double ei = 0.0, e1 = 0.0, e2 = 0.0, ni = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t j = 0; j < g.rows(); ++j)
        for (std::size_t i = 0; i <= g.n; ++i) {
            const double a = coarse.u[g.index(i, j)];
            const double e = std::abs(a - fine.u[f.index(2 * i, g.type == ContactType::Line ? 0 : 2 * j)]);
            ei = std::max(ei, e);
            e1 += e;
            e2 += e * e;
            ni = std::max(ni, std::abs(a));
            n1 += std::abs(a);
            n2 += a * a;
        }
    if (!(ni > 0.0)) throw ContractViolation("ehl_intergrid_errors: coarse pressure is zero");
    const double w = scale_of(g);
    return {ei / ni, w * e1 / n1, std::sqrt(w * e2 / n2)};
}

std::vector<EhlLevel> solve_ehl_nested(const EhlParams& params, std::size_t n_first, std::size_t n_last,
                                       const EhlSolveOptions& opts) {
    if (n_first < 4 || n_last < n_first) throw ConfigError("nested EHL: need 4 <= n_first <= n_last");
    std::vector<EhlLevel> levels;
    EhlSolveOptions o = opts;
    for (std::size_t n = n_first; n <= n_last; n *= 2) {
        if (!levels.empty()) {
            const EhlState& prev = levels.back().result.state;
            o.initial = prolong_pressure(prev.grid, prev.u);
            o.initial_h0 = prev.h0;
        }
        const auto t0 = std::chrono::steady_clock::now();
        EhlLevel lv;
        lv.result = solve_ehl(params, n, o);
        lv.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!levels.empty()) levels.back().error = ehl_intergrid_errors(levels.back().result.state, lv.result.state);
        levels.push_back(std::move(lv));
    }
    return levels;
}

} // namespace qif
