#include "qif/ehl.hpp"
#include "qif/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace qif {

namespace {

constexpr double pi = std::numbers::pi;

double moes_exponent(ContactType t) { return t == ContactType::Line ? -0.5 : -0.75; }

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

void require_positive(const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0)) throw ConfigError(std::string("moes_convert: ") + name + " must be positive");
}

} // namespace

MoesSet moes_convert(const MoesInput& in, ContactType type) {
    require_positive(in.g, "G");
    require_positive(in.u, "U");
    require_positive(in.w, "W");
    require_positive(in.m, "M");
    require_positive(in.l, "L");
    const double e = moes_exponent(type);
    auto g = in.g, u = in.u, w = in.w, m = in.m, l = in.l;
    if (!u && g && l) u = 0.5 * std::pow(*l / *g, 4.0);
    if (!u && w && m) u = 0.5 * std::pow(*m / *w, 1.0 / e);
    if (u) {
        const double s = 2.0 * *u;
        if (!l && g) l = *g * std::pow(s, 0.25);
        if (!g && l) g = *l / std::pow(s, 0.25);
        if (!m && w) m = *w * std::pow(s, e);
        if (!w && m) w = *m / std::pow(s, e);
    }
    if (!g || !u || !w || !m || !l) throw ConfigError("moes_convert: need three of G, U, W, M, L");
    const double s = 2.0 * *u;
    if (!close(*l, *g * std::pow(s, 0.25)) || !close(*m, *w * std::pow(s, e)))
        throw ConfigError("moes_convert: inputs are inconsistent");
    return {*g, *u, *w, *m, *l};
}

double moes_alpha_bar(double m, double l, ContactType type) {
    if (type == ContactType::Point) return l / pi * std::cbrt(1.5 * m);
    return l * std::sqrt(m / (2.0 * pi));
}

double moes_lambda(double m, ContactType type) {
    if (type == ContactType::Point) return std::cbrt(128.0 * pi * pi * pi / (3.0 * std::pow(m, 4.0)));
    return 3.0 * pi * pi / (8.0 * m * m);
}

EhlParams EhlParams::resolved() const {
    EhlParams p = *this;
    if (p.p_h == 0.0) p.p_h = moes_alpha_bar(moes_m, moes_l, contact) / alpha;
    if (p.lambda == 0.0) p.lambda = moes_lambda(moes_m, contact);
    if (p.load_target == 0.0) p.load_target = contact == ContactType::Point ? 1.5 * pi : 0.5 * pi;
    return p;
}

void EhlParams::validate() const {
    if (!(moes_m > 0.0) || !(moes_l > 0.0)) throw ConfigError("EHL: M and L must be positive");
    if (!(alpha > 0.0) || !(z > 0.0) || !(p0 > 0.0)) throw ConfigError("EHL: alpha, z and p0 must be positive");
    if (p_h < 0.0 || lambda < 0.0 || load_target < 0.0) throw ConfigError("EHL: p_h, lambda and load target must be >= 0");
    if (!(x_hi > x_lo) || !(y_hi > y_lo)) throw ConfigError("EHL: empty domain");
    if (contact == ContactType::Point && std::abs((x_hi - x_lo) - (y_hi - y_lo)) > 1e-12)
        throw ConfigError("EHL: point-contact domain must be square");
    if (!(c > 0.0) || c > 1.0) throw ConfigError("EHL: force-balance relaxation must lie in (0, 1]");
    if (!(omega > 0.0) || !(omega_jacobi > 0.0)) throw ConfigError("EHL: relaxation factors must be positive");
}

Rheology rheology(double u, const EhlParams& p) {
    if (!p.compressible) return {};
    const double pr = std::max(u, 0.0) * p.p_h;
    const double eta = std::exp(p.alpha * p.p0 / p.z * (-1.0 + std::pow(1.0 + pr / p.p0, p.z)));
    const double rho = (0.59e9 + 1.34 * pr) / (0.59e9 + pr);
    return {rho, eta};
}

double reynolds_eps(double u, double film, const EhlParams& p) {
    const Rheology r = rheology(u, p);
    const double hp = std::max(film, 0.0);
    return r.rho * hp * hp * hp / (r.eta * p.lambda);
}

EhlGrid EhlGrid::from(const EhlParams& p, std::size_t n) {
    if (n < 4) throw ConfigError("EHL grid needs at least 4 intervals");
    EhlGrid g;
    g.type = p.contact;
    g.n = n;
    g.x_lo = p.x_lo;
    g.x_hi = p.x_hi;
    g.y_lo = p.y_lo;
    g.y_hi = p.y_hi;
    return g;
}

RealVector hertzian_init(const EhlGrid& g, double target) {
    const bool line = g.type == ContactType::Line;
    const double unit = line ? 0.5 * pi : 2.0 * pi / 3.0;
    if (!(target > 0.0)) throw ContractViolation("hertzian_init: target load must be positive");
    const double a = line ? std::sqrt(target / unit) : std::cbrt(target / unit);
    RealVector u(g.node_count(), 0.0);
    for (std::size_t j = 0; j < g.rows(); ++j)
        for (std::size_t i = 0; i <= g.n; ++i) {
            if (!g.interior(i, j)) continue;
            const double x = g.x(i), y = g.y(j), r2 = x * x + y * y;
            if (r2 < a * a) u[g.index(i, j)] = std::sqrt(a * a - r2);
        }
    return u;
}

RealVector hertzian_init(const EhlGrid& g) { return hertzian_init(g, g.type == ContactType::Line ? 0.5 * pi : 2.0 * pi / 3.0); }

void refresh_state(EhlState& s, const EhlContext& ctx) {
    s.film = ctx.film->film(s.u, s.h0);
    const std::size_t nn = s.grid.node_count();
    s.rho.resize(nn);
    s.eps.resize(nn);
    for (std::size_t k = 0; k < nn; ++k) {
        s.rho[k] = rheology(s.u[k], ctx.params).rho;
        s.eps[k] = reynolds_eps(s.u[k], s.film[k], ctx.params);
    }
}

EhlState make_state(const EhlContext& ctx, RealVector u) {
    if (!ctx.film) throw ContractViolation("make_state: context has no film operator");
    EhlState s;
    s.grid = ctx.film->grid();
    if (u.size() != s.grid.node_count()) throw ContractViolation("make_state: pressure size mismatch");
    for (double& v : u) v = std::max(v, 0.0);
    s.u = std::move(u);
    s.h0 = ctx.params.h0;
    if (s.h0 == 0.0) {
        const RealVector f = ctx.film->film(s.u, 0.0);
        s.h0 = 0.05 - *std::min_element(f.begin(), f.end());
    }
    refresh_state(s, ctx);
    return s;
}

double load_integral(const EhlState& s) {
    double sum = 0.0;
    for (double v : s.u) sum += v;
    const double h = s.grid.h();
    return s.grid.type == ContactType::Line ? h * sum : h * h * sum;
}

double force_balance_update(const EhlState& s, const EhlParams& p) {
    const EhlParams r = p.resolved();
    return s.h0 - r.c * (r.load_target - load_integral(s));
}

RealVector prolong_pressure(const EhlGrid& coarse, const RealVector& u) {
    if (u.size() != coarse.node_count()) throw ContractViolation("prolong_pressure: size mismatch");
    EhlGrid fine = coarse;
    fine.n = 2 * coarse.n;
    RealVector f(fine.node_count(), 0.0);
    auto at = [&](std::size_t i, std::size_t j) { return u[coarse.index(i, j)]; };
    for (std::size_t j = 0; j < fine.rows(); ++j)
        for (std::size_t i = 0; i <= fine.n; ++i) {
            const std::size_t ic = i / 2, jc = j / 2;
            const std::size_t i2 = std::min(ic + i % 2, coarse.n);
            const std::size_t j2 = std::min(jc + j % 2, coarse.rows() - 1);
            f[fine.index(i, j)] = 0.25 * (at(ic, jc) + at(i2, jc) + at(ic, j2) + at(i2, j2));
        }
    return f;
}

void write_solution(const EhlState& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out.precision(10);
    const EhlGrid& g = s.grid;
    for (std::size_t j = 0; j < g.rows(); ++j) {
        for (std::size_t i = 0; i <= g.n; ++i) {
            const std::size_t k = g.index(i, j);
            out << g.x(i) << ' ' << g.y(j) << ' ' << s.u[k] << ' ' << s.film[k] << '\n';
        }
        if (g.type == ContactType::Point) out << '\n';
    }
}

} // namespace qif
