#include "qif/errors.hpp"
#include "qif/tvd.hpp"

#include <algorithm>
#include <cmath>

namespace qif {

SplittingVariant parse_splitting(const std::string& name) {
    if (name == "Ls0") return SplittingVariant::Ls0;
    if (name == "Ls1") return SplittingVariant::Ls1;
    if (name == "Ls2") return SplittingVariant::Ls2;
    if (name == "Ls3") return SplittingVariant::Ls3;
    if (name == "DefC") return SplittingVariant::DefC;
    throw ConfigError("unknown splitting '" + name + "'");
}

std::string to_string(SplittingVariant v) {
    switch (v) {
    case SplittingVariant::Ls0: return "Ls0";
    case SplittingVariant::Ls1: return "Ls1";
    case SplittingVariant::Ls2: return "Ls2";
    case SplittingVariant::Ls3: return "Ls3";
    case SplittingVariant::DefC: return "DefC";
    }
    return "?";
}

double line_factor(SplittingVariant v, double kappa) {
    switch (v) {
    case SplittingVariant::Ls0: return (5.0 - 3.0 * kappa) / 4.0;
    case SplittingVariant::Ls1: return (2.0 - kappa) / 2.0;
    case SplittingVariant::Ls2:
    case SplittingVariant::DefC: return 1.0;
    case SplittingVariant::Ls3: break;
    }
    throw ContractViolation("line_factor: Ls3 has no x-line factor");
}

namespace {

struct FaceVelocities {
    double am, ap, bm, bp;
};

FaceVelocities faces(const ConvectionDiffusionProblem& p, long i, long j) {
    const double h = p.grid.h(), x = p.grid.x(i), y = p.grid.y(j);
    return {p.cfg.a.value(x - 0.5 * h, y), p.cfg.a.value(x + 0.5 * h, y), p.cfg.b.value(x, y - 0.5 * h),
            p.cfg.b.value(x, y + 0.5 * h)};
}

void require_forward_flow(const FaceVelocities& v) {
    if (v.am < 0.0 || v.ap < 0.0 || v.bm < 0.0 || v.bp < 0.0)
        throw ContractViolation("forward line sweeps need a >= 0 and b >= 0 on every face");
}

// Tridiagonal L0 of line j: cx-scaled first-order upwind in x, its y diagonal,
// and the diffusion of the line.
BandedMatrix line_operator(const ConvectionDiffusionProblem& p, long j, double cx) {
    const std::size_t nx = p.grid.nx;
    const double h = p.grid.h(), d = p.cfg.eps / (h * h);
    BandedMatrix m(nx, 1);
    for (std::size_t k = 0; k < nx; ++k) {
        const auto v = faces(p, static_cast<long>(k) + 1, j);
        require_forward_flow(v);
        m.set(k, k, cx * (v.ap + v.bp) / h + 4.0 * d);
        if (k > 0) m.set(k, k - 1, -cx * v.am / h - d);
        if (k + 1 < nx) m.set(k, k + 1, -d);
    }
    return m;
}

void require_line_length(const Grid2D& g) {
    if (g.nx < 3) throw ContractViolation("sweep_splitting: lines need at least 3 interior nodes");
}

ResidualNorm sweep_lines(SolutionField& u, const ConvectionDiffusionProblem& p, double cx, double omega) {
    const long nx = static_cast<long>(p.grid.nx), ny = static_cast<long>(p.grid.ny);
    RealVector r(p.grid.nx);
    for (long j = 1; j <= ny; ++j) {
        for (long i = 1; i <= nx; ++i) r[static_cast<std::size_t>(i - 1)] = p.rhs(i, j) - apply_operator(u, i, j, p.cfg);
        const RealVector s = solve_line_block(line_operator(p, j, cx), 0, p.grid.nx, r);
        for (long i = 1; i <= nx; ++i) u(i, j) += omega * s[static_cast<std::size_t>(i - 1)];
    }
    return residual_norm(u, p);
}

ResidualNorm sweep_defect_correction(SolutionField& u, const ConvectionDiffusionProblem& p, double omega) {
    const std::size_t nx = p.grid.nx, ny = p.grid.ny;
    const double h = p.grid.h(), d = p.cfg.eps / (h * h);
    std::vector<RealVector> sigma(ny, RealVector(nx, 0.0));
    RealVector r(nx);
    for (std::size_t j = 0; j < ny; ++j) {
        const long jj = static_cast<long>(j) + 1;
        for (std::size_t i = 0; i < nx; ++i) {
            const long ii = static_cast<long>(i) + 1;
            r[i] = p.rhs(ii, jj) - apply_operator(u, ii, jj, p.cfg);
            if (j > 0) r[i] += (d + faces(p, ii, jj).bm / h) * sigma[j - 1][i];
        }
        sigma[j] = solve_line_block(line_operator(p, jj, 1.0), 0, nx, r);
    }
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) u(static_cast<long>(i) + 1, static_cast<long>(j) + 1) += omega * sigma[j][i];
    return residual_norm(u, p);
}

// First-order upwind weights of one face at offsets -1, 0, +1.
void upwind_face(std::array<double, 3>& w, int face, double v, double scale) {
    const int up = v >= 0.0 ? (face > 0 ? 0 : -1) : (face > 0 ? 1 : 0);
    w[static_cast<std::size_t>(up + 1)] += scale * v;
}

// Line system of the distributive relaxation: the first-order operator with
// convection scaled by (2+kappa)/2, composed with the distribution
// u_k += s_k - (neighbours of s)/4.
BandedMatrix distributive_line_operator(const ConvectionDiffusionProblem& p, long j) {
    const std::size_t nx = p.grid.nx;
    const long ny = static_cast<long>(p.grid.ny);
    const double h = p.grid.h(), d = p.cfg.eps / (h * h), c3 = (2.0 + p.cfg.kappa) / 2.0;
    BandedMatrix m(nx, 2);
    for (std::size_t i = 0; i < nx; ++i) {
        const auto v = faces(p, static_cast<long>(i) + 1, j);
        std::array<double, 3> wx{}, wy{};
        upwind_face(wx, +1, v.ap, c3 / h);
        upwind_face(wx, -1, v.am, -c3 / h);
        upwind_face(wy, +1, v.bp, c3 / h);
        upwind_face(wy, -1, v.bm, -c3 / h);
        const std::array<double, 3> line{wx[0] - d, wx[1] + wy[1] + 4.0 * d, wx[2] - d};
        for (int o = -1; o <= 1; ++o) {
            const long k = static_cast<long>(i) + o;
            if (k < 0 || k >= static_cast<long>(nx)) continue;
            const double c = line[static_cast<std::size_t>(o + 1)];
            const auto ku = static_cast<std::size_t>(k);
            m.add(i, ku, c);
            if (k > 0) m.add(i, ku - 1, -0.25 * c);
            if (k + 1 < static_cast<long>(nx)) m.add(i, ku + 1, -0.25 * c);
        }
        if (j > 1) m.add(i, i, -0.25 * (wy[0] - d));
        if (j < ny) m.add(i, i, -0.25 * (wy[2] - d));
    }
    return m;
}

ResidualNorm sweep_distributive(SolutionField& u, const ConvectionDiffusionProblem& p, double omega, Executor* exec) {
    const std::size_t nx = p.grid.nx, ny = p.grid.ny;
    std::vector<RealVector> sigma(ny);
    auto line_task = [&](std::size_t j) {
        const long jj = static_cast<long>(j) + 1;
        RealVector r(nx);
        for (std::size_t i = 0; i < nx; ++i)
            r[i] = p.rhs(static_cast<long>(i) + 1, jj) - apply_operator(u, static_cast<long>(i) + 1, jj, p.cfg);
        sigma[j] = solve_line_block(distributive_line_operator(p, jj), 0, nx, r);
    };
    if (exec) exec->run(ny, line_task);
    else
        for (std::size_t j = 0; j < ny; ++j) line_task(j);
    auto s = [&](long i, long j) {
        if (i < 1 || j < 1 || i > static_cast<long>(nx) || j > static_cast<long>(ny)) return 0.0;
        return sigma[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)];
    };
    for (long j = 1; j <= static_cast<long>(ny); ++j)
        for (long i = 1; i <= static_cast<long>(nx); ++i)
            u(i, j) += omega * (s(i, j) - 0.25 * (s(i - 1, j) + s(i + 1, j) + s(i, j - 1) + s(i, j + 1)));
    return residual_norm(u, p);
}

} // namespace

ResidualNorm sweep_splitting(SolutionField& u, SplittingVariant variant, const ConvectionDiffusionProblem& p,
                             double omega, Executor* exec) {
    p.cfg.validate();
    require_line_length(p.grid);
    if (!(omega > 0.0)) throw ContractViolation("sweep_splitting: omega must be positive");
    switch (variant) {
    case SplittingVariant::Ls0:
    case SplittingVariant::Ls1:
    case SplittingVariant::Ls2: return sweep_lines(u, p, line_factor(variant, p.cfg.kappa), omega);
    case SplittingVariant::DefC: return sweep_defect_correction(u, p, omega);
    case SplittingVariant::Ls3: return sweep_distributive(u, p, omega, exec);
    }
    return {};
}

SplittingOperators kappa_splitting_operators(const ConvectionDiffusionProblem& p, SplittingVariant v, double omega) {
    if (v == SplittingVariant::Ls3 || v == SplittingVariant::DefC)
        throw ContractViolation("kappa_splitting_operators: only Ls0, Ls1 and Ls2 are stationary splittings");
    const Grid2D& g = p.grid;
    const StencilOperator op = assemble_kappa_operator(p.cfg, g);
    const std::size_t nx = g.nx, n = g.interior_size();
    const double cx = line_factor(v, p.cfg.kappa);
    SplittingOperators s{BandedMatrix(n, 2 * nx), BandedMatrix(n, 2 * nx), BandedMatrix(n, 2 * nx), nx, omega};
    for (long j = 1; j <= static_cast<long>(g.ny); ++j) {
        const BandedMatrix l0 = line_operator(p, j, cx);
        const std::size_t base = static_cast<std::size_t>(j - 1) * nx;
        for (long i = 1; i <= static_cast<long>(nx); ++i) {
            const std::size_t row = base + static_cast<std::size_t>(i - 1);
            const auto& c = op.at(i, j);
            for (std::size_t k = 0; k < StencilOperator::offsets.size(); ++k) {
                const long ii = i + StencilOperator::offsets[k][0], jj = j + StencilOperator::offsets[k][1];
                if (ii < 1 || jj < 1 || ii > static_cast<long>(nx) || jj > static_cast<long>(g.ny)) continue;
                const std::size_t col = static_cast<std::size_t>(jj - 1) * nx + static_cast<std::size_t>(ii - 1);
                if (jj < j) s.lplus.add(row, col, c[k]);
                else s.lminus.add(row, col, c[k]);
            }
            for (long ii = std::max(1L, i - 1); ii <= std::min(static_cast<long>(nx), i + 1); ++ii) {
                const std::size_t col = base + static_cast<std::size_t>(ii - 1);
                const double w = l0(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(ii - 1));
                s.lzero.set(row, col, w);
                s.lminus.add(row, col, -w);
            }
        }
    }
    return s;
}

} // namespace qif
