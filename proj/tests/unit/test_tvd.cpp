#include "oracles.hpp"
#include "qif/errors.hpp"
#include "qif/tvd.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

using namespace qif;

namespace {

// h = 1 grid with nx = ny = 7.
Grid2D unit_spacing_grid() {
    Grid2D g;
    g.x_lo = g.y_lo = 0.0;
    g.x_hi = g.y_hi = 8.0;
    g.nx = g.ny = 7;
    return g;
}

KappaSchemeConfig linear_cfg(double kappa, double a, double b, double eps) {
    KappaSchemeConfig c;
    c.kappa = kappa;
    c.limiter = Limiter::None;
    c.a = ConvectionField::constant(a);
    c.b = ConvectionField::constant(b);
    c.eps = eps;
    return c;
}

SolutionField random_field(const Grid2D& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    SolutionField u(g);
    for (long j = -1; j <= static_cast<long>(g.ny) + 2; ++j)
        for (long i = -1; i <= static_cast<long>(g.nx) + 2; ++i) u(i, j) = d(rng);
    return u;
}

// x-stencil entries at offsets -2..2 (diffusion removed by taking eps tiny).
std::array<double, 5> x_stencil(const StencilOperator& op, long i, long j) {
    const auto& c = op.at(i, j);
    return {c[0], c[1], c[2], c[3], c[4]};
}

// Interior solution of the linear kappa-scheme, converged with Ls0 sweeps.
SolutionField converged(const ConvectionDiffusionProblem& p, std::size_t sweeps) {
    SolutionField u = p.initial_field();
    for (std::size_t k = 0; k < sweeps; ++k) (void)sweep_splitting(u, SplittingVariant::Ls0, p);
    return u;
}

} // namespace

TEST(KappaStencil, KappaZeroMatchesReferenceCoefficients) {
    const auto op = assemble_kappa_operator(linear_cfg(0.0, 1.0, 0.0, 1e-300), unit_spacing_grid());
    const auto c = x_stencil(op, 4, 4);
    const std::array<double, 5> want{0.25, -1.25, 0.75, 0.25, 0.0};
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(c[k], want[k], 1e-15) << k;
}

TEST(KappaStencil, KappaMinusOneIsSecondOrderUpwind) {
    // (3u_i - 4u_{i-1} + u_{i-2}) / 2
    const auto op = assemble_kappa_operator(linear_cfg(-1.0, 1.0, 0.0, 1e-300), unit_spacing_grid());
    const auto c = x_stencil(op, 4, 4);
    const std::array<double, 5> want{0.5, -2.0, 1.5, 0.0, 0.0};
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(c[k], want[k], 1e-15) << k;
}

TEST(KappaStencil, NegativeVelocityMirrors) {
    const auto op = assemble_kappa_operator(linear_cfg(0.0, -1.0, 0.0, 1e-300), unit_spacing_grid());
    const auto c = x_stencil(op, 4, 4);
    const std::array<double, 5> want{0.0, 0.25, 0.75, -1.25, 0.25};
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(c[k], want[k], 1e-15) << k;
}

TEST(KappaStencil, YColumnAndPureDiffusion) {
    const auto op = assemble_kappa_operator(linear_cfg(0.0, 0.0, 1.0, 1e-300), unit_spacing_grid());
    const auto& c = op.at(4, 4);
    EXPECT_NEAR(c[6], 0.25, 1e-15);  // j-2
    EXPECT_NEAR(c[5], -1.25, 1e-15); // j-1
    EXPECT_NEAR(c[2], 0.75, 1e-15);
    EXPECT_NEAR(c[7], 0.25, 1e-15); // j+1
    EXPECT_EQ(c[8], 0.0);

    const auto diff = assemble_kappa_operator(linear_cfg(0.3, 0.0, 0.0, 2.0), unit_spacing_grid());
    const auto& d = diff.at(3, 5);
    EXPECT_DOUBLE_EQ(d[2], 8.0);
    for (std::size_t k : {1u, 3u, 5u, 7u}) EXPECT_DOUBLE_EQ(d[k], -2.0);
    for (std::size_t k : {0u, 4u, 6u, 8u}) EXPECT_EQ(d[k], 0.0);
}

TEST(KappaStencil, RowSumsVanishForConstantVelocity) {
    const auto op = assemble_kappa_operator(linear_cfg(1.0 / 3.0, 1.3, 0.7, 0.01), Grid2D::unit_square(4));
    for (const auto& c : op.coeff) {
        double s = 0.0;
        for (double v : c) s += v;
        EXPECT_NEAR(s, 0.0, 1e-12);
    }
}

TEST(KappaStencil, FirstOrderBoundaryClosure) {
    auto cfg = linear_cfg(0.0, 1.0, 0.0, 1e-300);
    cfg.first_order_boundary = true;
    const auto op = assemble_kappa_operator(cfg, unit_spacing_grid());
    const auto c = x_stencil(op, 1, 4);
    // F_{3/2} keeps the kappa form, F_{1/2} = u_0.
    EXPECT_EQ(c[0], 0.0);
    EXPECT_NEAR(c[1], -1.25, 1e-15);
    EXPECT_NEAR(c[2], 1.0, 1e-15);
    EXPECT_NEAR(c[3], 0.25, 1e-15);
}

TEST(LimitedRow, UnlimitedMatchesStencilOnRandomData) {
    std::mt19937_64 rng(11);
    for (double kappa : {-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0}) {
        KappaSchemeConfig cfg = linear_cfg(kappa, 0.0, 0.0, 0.05);
        cfg.a = {[](double x, double y) { return 1.0 + 0.3 * std::sin(x + 2 * y); }, nullptr};
        cfg.b = {[](double x, double) { return -0.5 + 0.2 * x; }, nullptr};
        const Grid2D g = Grid2D::unit_square(4);
        const auto op = assemble_kappa_operator(cfg, g);
        const auto u = random_field(g, rng);
        for (long j = 1; j <= static_cast<long>(g.ny); ++j)
            for (long i = 1; i <= static_cast<long>(g.nx); ++i)
                EXPECT_NEAR(apply_operator(u, i, j, cfg), op.apply(u, i, j), 1e-10) << kappa;
    }
}

TEST(LimitedRow, FourTermGroupingEqualsThreeTerm) {
    std::mt19937_64 rng(12);
    const Grid2D g = Grid2D::unit_square(4);
    for (Limiter l : {Limiter::VanAlbada, Limiter::Koren, Limiter::Minmod, Limiter::None}) {
        KappaSchemeConfig cfg = linear_cfg(1.0 / 3.0, 1.0, 2.0, 1e-6);
        cfg.limiter = l;
        const auto u = random_field(g, rng);
        for (long j = 1; j <= static_cast<long>(g.ny); ++j)
            for (long i = 1; i <= static_cast<long>(g.nx); ++i) {
                const double a = limited_convection_row(u, i, j, cfg, ConvectionForm::ThreeTerm);
                const double b = limited_convection_row(u, i, j, cfg, ConvectionForm::FourTerm);
                EXPECT_NEAR(a, b, 1e-9 * (1.0 + std::abs(a)));
            }
    }
}

TEST(LimitedRow, LinearDataGivesUnlimitedScheme) {
    const Grid2D g = Grid2D::unit_square(4);
    SolutionField u(g);
    for (long j = -1; j <= static_cast<long>(g.ny) + 2; ++j)
        for (long i = -1; i <= static_cast<long>(g.nx) + 2; ++i) u(i, j) = 3.0 * g.x(i) - 2.0 * g.y(j);
    for (Limiter l : {Limiter::VanAlbada, Limiter::Koren, Limiter::Minmod}) {
        KappaSchemeConfig cfg = linear_cfg(1.0 / 3.0, 1.0, 1.0, 1e-6);
        cfg.limiter = l;
        KappaSchemeConfig plain = cfg;
        plain.limiter = Limiter::None;
        EXPECT_NEAR(limited_convection_row(u, 3, 4, cfg), limited_convection_row(u, 3, 4, plain), 1e-12);
        EXPECT_NEAR(limited_convection_row(u, 3, 4, cfg), 1.0, 1e-12); // 3 - 2
    }
}

TEST(LimitedRow, ZigzagDegeneratesToFirstOrderUpwind) {
    const Grid2D g = unit_spacing_grid();
    SolutionField u(g);
    for (long j = -1; j <= static_cast<long>(g.ny) + 2; ++j)
        for (long i = -1; i <= static_cast<long>(g.nx) + 2; ++i) u(i, j) = ((i + 8) % 2 == 0 ? 1.0 : -1.0) * (1.0 + 0.1 * i);
    KappaSchemeConfig cfg = linear_cfg(1.0 / 3.0, 1.0, 0.0, 1e-6);
    for (Limiter l : {Limiter::VanAlbada, Limiter::Koren, Limiter::Minmod}) {
        cfg.limiter = l;
        EXPECT_NEAR(limited_convection_row(u, 4, 4, cfg), u(4, 4) - u(3, 4), 1e-12);
    }
}

TEST(LimitedRow, ConsistentWithKappaSchemeToFirstOrder) {
    // Smooth monotone data: limited and unlimited rows differ by O(h).
    auto gap = [](std::size_t n) {
        const Grid2D g = Grid2D::unit_square(n);
        SolutionField u(g);
        for (long j = -1; j <= static_cast<long>(g.ny) + 2; ++j)
            for (long i = -1; i <= static_cast<long>(g.nx) + 2; ++i) u(i, j) = std::exp(g.x(i)) + g.y(j);
        KappaSchemeConfig cfg = linear_cfg(1.0 / 3.0, 1.0, 0.0, 1e-6);
        cfg.limiter = Limiter::VanAlbada;
        KappaSchemeConfig plain = cfg;
        plain.limiter = Limiter::None;
        const long mid = static_cast<long>(n) + n / 2; // x = 0.5
        return std::abs(limited_convection_row(u, mid, 3, cfg) - limited_convection_row(u, mid, 3, plain));
    };
    const double e1 = gap(16), e2 = gap(32), e3 = gap(64);
    EXPECT_LT(e2, 0.6 * e1);
    EXPECT_LT(e3, 0.6 * e2);
}

TEST(Limiter, ValuesAndSymmetry) {
    for (Limiter l : {Limiter::VanAlbada, Limiter::Koren, Limiter::Minmod, Limiter::None})
        EXPECT_NEAR(limiter_phi(l, 1.0, 1.0 / 3.0), 1.0, 1e-15);
    for (Limiter l : {Limiter::VanAlbada, Limiter::Koren, Limiter::Minmod}) {
        EXPECT_EQ(limiter_phi(l, -0.5, 1.0 / 3.0), 0.0);
        EXPECT_EQ(limiter_phi(l, 0.0, 1.0 / 3.0), 0.0);
    }
    EXPECT_NEAR(limiter_phi(Limiter::VanAlbada, 2.0, 0.0), 6.0 / 5.0, 1e-15);
    EXPECT_NEAR(limiter_phi(Limiter::Koren, 0.5, 1.0 / 3.0), (1.0 + 2.0 * 0.5) / 3.0, 1e-15);
    EXPECT_NEAR(limiter_phi(Limiter::Koren, 0.1, 1.0 / 3.0), 0.2, 1e-15);
    EXPECT_NEAR(limiter_phi(Limiter::Koren, 10.0, 1.0 / 3.0), 2.0, 1e-15);
    EXPECT_NEAR(limiter_phi(Limiter::Minmod, 3.0, 0.0), 1.0, 1e-15);
    // Symmetric limiters satisfy phi(r)/r = phi(1/r).
    for (double r : {0.3, 2.0, 7.5}) {
        EXPECT_NEAR(limiter_phi(Limiter::VanAlbada, r, 0) / r, limiter_phi(Limiter::VanAlbada, 1 / r, 0), 1e-14);
        EXPECT_NEAR(limiter_phi(Limiter::Minmod, r, 0) / r, limiter_phi(Limiter::Minmod, 1 / r, 0), 1e-14);
    }
    EXPECT_EQ(parse_limiter(to_string(Limiter::Koren)), Limiter::Koren);
    EXPECT_THROW((void)parse_limiter("superbee"), ConfigError);
}

TEST(Limiter, GuardedRatio) {
    EXPECT_DOUBLE_EQ(guarded_ratio(1.0, 0.0), 1e30);
    EXPECT_DOUBLE_EQ(guarded_ratio(1.0, -1e-40), -1e30);
    EXPECT_EQ(guarded_ratio(3.0, 2.0), 1.5);
}

TEST(Tvd, CoefficientCheck) {
    const RealVector z(4, 0.0);
    EXPECT_TRUE(check_tvd_coefficients(z, z));
    EXPECT_FALSE(check_tvd_coefficients(RealVector{0.6}, RealVector{0.6}));
    EXPECT_FALSE(check_tvd_coefficients(RealVector{-0.1}, RealVector{0.0}));
    const RealVector u{0, 0, 0.1, 0.5, 0.9, 1, 1, 1};
    // First-order upwind at CFL nu: c_i = nu, d_i = 0.
    for (double nu : {0.5, 1.0}) EXPECT_TRUE(check_tvd_coefficients(RealVector(u.size(), nu), RealVector(u.size(), 0.0)));
    EXPECT_FALSE(check_tvd_coefficients(RealVector(u.size(), 1.2), RealVector(u.size(), 0.0)));
}

TEST(Tvd, TotalVariation) {
    EXPECT_EQ(total_variation(RealVector(5, 2.0)), 0.0);
    RealVector ramp(11);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i) / 10.0;
    EXPECT_NEAR(total_variation(ramp), 1.0, 1e-15);
    std::mt19937_64 rng(3);
    const auto v = oracle::random_vector(50, rng, -1, 1);
    double s = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) s += std::abs(v[i + 1] - v[i]);
    EXPECT_NEAR(total_variation(v), s, 1e-13);
}

TEST(Tvd, LimitedUpwindNeverIncreasesVariation) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        RealVector u(40);
        double acc = 0.0;
        for (auto& v : u) v = (acc += d(rng) * (d(rng) < 0.3 ? 1.0 : 0.0));
        for (Limiter l : {Limiter::VanAlbada, Limiter::Koren, Limiter::Minmod}) {
            RealVector w = u;
            for (int step = 0; step < 30; ++step) {
                const auto ic = limited_upwind_increments(w, 0.45, l, 1.0 / 3.0);
                EXPECT_TRUE(check_tvd_coefficients(ic.c, ic.d));
                const RealVector next = limited_upwind_step(w, 0.45, l, 1.0 / 3.0);
                EXPECT_LE(total_variation(next), total_variation(w) + 1e-12);
                w = next;
            }
        }
    }
}

TEST(Tvd, UnlimitedSchemeCanOscillate) {
    RealVector u(30, 0.0);
    for (std::size_t i = 10; i < u.size(); ++i) u[i] = 1.0;
    std::reverse(u.begin(), u.end());
    const RealVector next = limited_upwind_step(u, 0.45, Limiter::None, -1.0);
    EXPECT_GT(total_variation(next), total_variation(u) + 1e-3);
}

TEST(Manufactured, QuarticRightHandSide) {
    const auto p = quartic_problem(4, linear_cfg(0.0, 1.0, 1.0, 1e-6));
    const double x = p.grid.x(2), y = p.grid.y(5);
    EXPECT_NEAR(p.rhs(2, 5), 4 * x * x * x + 4 * y * y * y - 1e-6 * 12 * (x * x + y * y), 1e-14);
    EXPECT_EQ(p.grid.nx, 7u);
    EXPECT_DOUBLE_EQ(p.grid.h(), 0.25);
}

TEST(Sweep, ConvergedFieldIsFixedPoint) {
    const auto p = quartic_problem(4, linear_cfg(1.0 / 3.0, 1.0, 1.0, 1e-6));
    SolutionField u = converged(p, 300);
    const SolutionField before = u;
    for (auto v : {SplittingVariant::Ls0, SplittingVariant::Ls1, SplittingVariant::Ls2, SplittingVariant::DefC,
                   SplittingVariant::Ls3}) {
        const auto r = sweep_splitting(u, v, p);
        EXPECT_LE(r.max_abs, 1e-12) << to_string(v);
    }
    for (long j = 1; j <= 7; ++j)
        for (long i = 1; i <= 7; ++i) EXPECT_NEAR(u(i, j), before(i, j), 1e-12);
}

TEST(Sweep, ReconstructionIsExact) {
    for (double kappa : {-1.0, 0.0, 1.0 / 3.0}) {
        const auto p = quartic_problem(4, linear_cfg(kappa, 1.0, 0.5, 1e-3));
        const auto op = assemble_kappa_operator(p.cfg, p.grid);
        for (auto v : {SplittingVariant::Ls0, SplittingVariant::Ls1, SplittingVariant::Ls2}) {
            const auto s = kappa_splitting_operators(p, v);
            const auto full = s.assembled();
            const std::size_t nx = p.grid.nx;
            for (long j = 1; j <= static_cast<long>(p.grid.ny); ++j)
                for (long i = 1; i <= static_cast<long>(nx); ++i) {
                    const std::size_t row = static_cast<std::size_t>(j - 1) * nx + static_cast<std::size_t>(i - 1);
                    const auto& c = op.at(i, j);
                    double expect_sum = 0.0, got_sum = 0.0;
                    for (std::size_t k = 0; k < 9; ++k) {
                        const long ii = i + StencilOperator::offsets[k][0], jj = j + StencilOperator::offsets[k][1];
                        if (ii < 1 || jj < 1 || ii > static_cast<long>(nx) || jj > static_cast<long>(p.grid.ny)) continue;
                        const std::size_t col = static_cast<std::size_t>(jj - 1) * nx + static_cast<std::size_t>(ii - 1);
                        EXPECT_NEAR(full(row, col), c[k], 1e-12 * (1.0 + std::abs(c[k])));
                        expect_sum += std::abs(c[k]);
                    }
                    for (std::size_t col = 0; col < full.order(); ++col) got_sum += std::abs(full(row, col));
                    EXPECT_NEAR(got_sum, expect_sum, 1e-9 * expect_sum);
                    // lplus touches only earlier lines, lzero only its own line.
                    for (std::size_t col = 0; col < full.order(); ++col) {
                        if (col >= row - (row % nx)) EXPECT_EQ(s.lplus(row, col), 0.0);
                        if (col / nx != row / nx) EXPECT_EQ(s.lzero(row, col), 0.0);
                    }
                }
        }
    }
}

TEST(Sweep, LineSweepMatchesMatrixSplitting) {
    const auto p = quartic_problem(4, linear_cfg(0.0, 1.0, 1.0, 1e-4));
    const auto s = kappa_splitting_operators(p, SplittingVariant::Ls1);
    const std::size_t nx = p.grid.nx, n = p.grid.interior_size();
    // Boundary contribution: operator applied to the field with zero interior.
    const SolutionField zero = p.initial_field();
    RealVector f(n);
    for (long j = 1; j <= static_cast<long>(p.grid.ny); ++j)
        for (long i = 1; i <= static_cast<long>(nx); ++i) {
            const std::size_t k = static_cast<std::size_t>(j - 1) * nx + static_cast<std::size_t>(i - 1);
            f[k] = p.rhs(i, j) - apply_operator(zero, i, j, p.cfg);
        }
    std::mt19937_64 rng(5);
    RealVector x = oracle::random_vector(n, rng, 0, 1);
    SolutionField u = p.initial_field();
    u.set_interior(x);
    (void)sweep_splitting(u, SplittingVariant::Ls1, p);
    // Oracle: line by line, lzero sigma = f - (lminus + lzero) x_old - lplus x_new.
    const DenseMatrix lm = s.lminus.to_dense(), l0 = s.lzero.to_dense(), lp = s.lplus.to_dense();
    for (std::size_t line = 0; line < p.grid.ny; ++line) {
        DenseMatrix blk(nx, nx);
        RealVector r(nx);
        for (std::size_t a = 0; a < nx; ++a) {
            const std::size_t row = line * nx + a;
            double acc = f[row];
            for (std::size_t c = 0; c < n; ++c) acc -= (lm(row, c) + l0(row, c) + lp(row, c)) * x[c];
            r[a] = acc;
            for (std::size_t b = 0; b < nx; ++b) blk(a, b) = l0(row, line * nx + b);
        }
        const RealVector sig = oracle::dense_solve(blk, r);
        for (std::size_t a = 0; a < nx; ++a) x[line * nx + a] += sig[a];
    }
    const RealVector got = u.interior();
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(got[k], x[k], 1e-10 * (1.0 + std::abs(x[k])));
}

TEST(Sweep, ResidualDecreasesOverFirstNineSweeps) {
    for (double kappa : {0.0, 1.0 / 3.0}) {
        const auto p = quartic_problem(16, linear_cfg(kappa, 1.0, 1.0, 1e-6));
        for (auto v : {SplittingVariant::Ls0, SplittingVariant::Ls1}) {
            SolutionField u = p.initial_field();
            double prev = residual_norm(u, p).scaled_rms;
            for (int k = 1; k <= 9; ++k) {
                const double r = sweep_splitting(u, v, p).scaled_rms;
                EXPECT_LT(r, prev) << to_string(v) << " kappa " << kappa << " sweep " << k;
                prev = r;
            }
        }
    }
}

TEST(Sweep, DistributiveJacobiIsDeterministicAcrossExecutors) {
    const auto p = quartic_problem(4, linear_cfg(1.0 / 3.0, 1.0, 1.0, 1e-2));
    SolutionField a = p.initial_field(), b = p.initial_field();
    ThreadPoolExecutor pool(3);
    for (int k = 0; k < 3; ++k) {
        (void)sweep_splitting(a, SplittingVariant::Ls3, p, 0.5);
        (void)sweep_splitting(b, SplittingVariant::Ls3, p, 0.5, &pool);
    }
    EXPECT_EQ(a.interior(), b.interior());
}

TEST(Sweep, RejectsBackwardFlowAndTinyLines) {
    const auto p = quartic_problem(4, linear_cfg(0.0, -1.0, 1.0, 1e-6));
    SolutionField u = p.initial_field();
    EXPECT_THROW((void)sweep_splitting(u, SplittingVariant::Ls1, p), ContractViolation);
    const auto q = quartic_problem(1, linear_cfg(0.0, 1.0, 1.0, 1e-6));
    SolutionField w = q.initial_field();
    EXPECT_THROW((void)sweep_splitting(w, SplittingVariant::Ls1, q), ContractViolation);
}

TEST(Sweep, SpectralRadiusBelowOneOnSixteenGrid) {
    const auto p = quartic_problem(8, linear_cfg(1.0 / 3.0, 1.0, 1.0, 1e-6));
    ASSERT_EQ(p.grid.interior_size(), 225u);
    for (auto v : {SplittingVariant::Ls0, SplittingVariant::Ls1}) {
        const auto est = splitting_spectral_radius(kappa_splitting_operators(p, v), 20000, 1e-9);
        std::cout << "[ rho ] " << to_string(v) << " = " << est.rho << (est.converged ? "" : " (approx)") << "\n";
        EXPECT_LT(est.rho, 1.0);
    }
}

TEST(ErrorNorms, ZeroAgainstItselfAndInjection) {
    const auto p = quartic_problem(4, linear_cfg(0.0, 1.0, 1.0, 1e-6));
    const auto fine = quartic_problem(8, linear_cfg(0.0, 1.0, 1.0, 1e-6));
    const auto u = p.exact_field();
    const auto e = error_norms(u, p.exact);
    EXPECT_EQ(e.linf, 0.0);
    EXPECT_EQ(e.l1, 0.0);
    EXPECT_EQ(e.l2, 0.0);
    const auto inj = error_norms(u, fine.exact_field());
    EXPECT_NEAR(inj.l1, 0.0, 1e-15);
    const auto odd = quartic_problem(5, linear_cfg(0.0, 1.0, 1.0, 1e-6));
    EXPECT_THROW((void)error_norms(u, odd.exact_field()), ContractViolation);
}

TEST(ErrorNorms, Weighting) {
    const auto p = quartic_problem(2, linear_cfg(0.0, 1.0, 1.0, 1e-6));
    SolutionField u = p.exact_field();
    u(2, 2) += 0.5;
    u(1, 3) -= 0.25;
    const auto e = error_norms(u, p.exact);
    const double h = p.grid.h();
    EXPECT_DOUBLE_EQ(e.linf, 0.5);
    EXPECT_DOUBLE_EQ(e.l1, h * h * 0.75);
    EXPECT_DOUBLE_EQ(e.l2, std::sqrt(h * h * (0.25 + 0.0625)));
}

TEST(ErrorNorms, ConvergenceOrder) {
    EXPECT_DOUBLE_EQ(convergence_order(2.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(convergence_order(4.0, 1.0), 2.0);
    EXPECT_NEAR(convergence_order(6.78313e-07, 8.51091e-08), 2.99457, 1e-4);
    EXPECT_THROW((void)convergence_order(0.0, 1.0), ContractViolation);
}

TEST(LinearStudy, CoarseGridsNearReferenceValues) {
    // Converged Ls0, kappa = 1/3, L1 errors against x^4 + y^4.
    const double reference[] = {2.25826e-03, 3.32640e-04, 4.20422e-05};
    const double ours[] = {2.48939e-03, 3.18433e-04, 4.02481e-05};
    std::size_t n = 16;
    for (int k = 0; k < 3; ++k, n *= 2) {
        const auto p = quartic_problem(n, linear_cfg(1.0 / 3.0, 1.0, 1.0, 1e-6));
        const auto u = converged(p, 150 + 20 * n / 16);
        const auto e = error_norms(u, p.exact);
        EXPECT_NEAR(e.l1, ours[k], 1e-5 * ours[k]);
        std::cout << "[ L1 ] " << n << " " << e.l1 << " reference " << reference[k] << "\n";
    }
}
