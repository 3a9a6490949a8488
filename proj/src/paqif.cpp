#include "qif/paqif.hpp"

#include "qif/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace qif {
namespace {

// Local index of ring slot rr: first b indices, then last b indices.
std::size_t ring_index(std::size_t rr, std::size_t t, std::size_t beta) {
    return rr < beta ? rr : t - 2 * beta + rr;
}

void run_blocks(Executor* exec, std::size_t count, const std::function<void(std::size_t)>& task) {
    if (exec) {
        exec->run(count, task);
    } else {
        SequentialExecutor seq;
        seq.run(count, task);
    }
}

} // namespace

BandedMatrix BlockPartition::reassemble() const {
    const std::size_t t = block_size;
    BandedMatrix l(block_count * t, beta);
    for (std::size_t m = 0; m < block_count; ++m) {
        const Block& b = blocks[m];
        const std::size_t off = m * t;
        for (std::size_t i = 0; i < t; ++i) {
            const std::size_t lo = i > beta ? i - beta : 0;
            for (std::size_t j = lo; j <= std::min(t - 1, i + beta); ++j) l.set(off + i, off + j, b.l0(i, j));
        }
        for (std::size_t a = 0; a < beta; ++a)
            for (std::size_t c = 0; c < beta; ++c) {
                if (m > 0 && b.lminus(a, c) != 0.0) l.set(off + a, off - beta + c, b.lminus(a, c));
                if (m + 1 < block_count && b.lplus(a, c) != 0.0) l.set(off + t - beta + a, off + t + c, b.lplus(a, c));
            }
    }
    return l;
}

BlockPartition partition(const BandedMatrix& l, std::span<const double> f, std::size_t r) {
    const std::size_t n = l.order();
    const std::size_t beta = l.semibandwidth();
    if (f.size() != n) throw ContractViolation("partition: right side length mismatch");
    if (r == 0 || n % r != 0)
        throw PartitionError("partition: " + std::to_string(r) + " blocks do not divide order " + std::to_string(n));
    const std::size_t t = n / r;
    if (t % 2 != 0 || t <= 2 * beta)
        throw PartitionError("partition: block size " + std::to_string(t) + " must be even and exceed 2*beta = " +
                             std::to_string(2 * beta));

    BlockPartition p;
    p.block_count = r;
    p.block_size = t;
    p.beta = beta;
    p.blocks.reserve(r);
    for (std::size_t m = 0; m < r; ++m) {
        const std::size_t off = m * t;
        Block b{BandedMatrix(t, beta), DenseMatrix(beta, beta), DenseMatrix(beta, beta),
                RealVector(f.begin() + static_cast<std::ptrdiff_t>(off), f.begin() + static_cast<std::ptrdiff_t>(off + t))};
        for (std::size_t i = 0; i < t; ++i) {
            const std::size_t lo = i > beta ? i - beta : 0;
            for (std::size_t j = lo; j <= std::min(t - 1, i + beta); ++j) b.l0.set(i, j, l(off + i, off + j));
        }
        for (std::size_t a = 0; a < beta; ++a)
            for (std::size_t c = 0; c < beta; ++c) {
                if (m > 0) b.lminus(a, c) = l(off + a, off - beta + c);
                if (m + 1 < r) b.lplus(a, c) = l(off + t - beta + a, off + t + c);
            }
        p.blocks.push_back(std::move(b));
    }
    return p;
}

BlockFactor factor_block(const Block& b, std::size_t beta) {
    const std::size_t t = b.l0.order();
    BlockFactor bf{factorize_wz(b.l0), {}, DenseMatrix(2 * beta, beta), DenseMatrix(2 * beta, beta)};
    bf.y = solve_w(bf.wz, b.f);
    RealVector e(t, 0.0);
    for (std::size_t c = 0; c < 2 * beta; ++c) {
        const std::size_t col = ring_index(c, t, beta);
        e[col] = 1.0;
        const RealVector x = solve_w(bf.wz, e);
        e[col] = 0.0;
        DenseMatrix& dst = c < beta ? bf.winv_first : bf.winv_last;
        const std::size_t dc = c < beta ? c : c - beta;
        for (std::size_t rr = 0; rr < 2 * beta; ++rr) dst(rr, dc) = x[ring_index(rr, t, beta)];
    }
    return bf;
}

ReducedSystem build_reduced_system(const BlockPartition& p, const std::vector<BlockFactor>& factors) {
    const std::size_t beta = p.beta;
    const std::size_t t = p.block_size;
    const std::size_t r = p.block_count;
    if (factors.size() != r) throw ContractViolation("build_reduced_system: factor count mismatch");
    const std::size_t w = 2 * beta;
    ReducedSystem rs{DenseMatrix(w * r, w * r), RealVector(w * r, 0.0), 3 * beta - 1};
    for (std::size_t m = 0; m < r; ++m) {
        const BlockFactor& bf = factors[m];
        const Block& blk = p.blocks[m];
        for (std::size_t rr = 0; rr < w; ++rr) {
            const std::size_t g = m * w + rr;
            const std::size_t i = ring_index(rr, t, beta);
            for (std::size_t cc = 0; cc < w; ++cc) rs.rd(g, m * w + cc) = bf.wz.z(i, ring_index(cc, t, beta));
            for (std::size_t c = 0; c < beta; ++c) {
                if (m > 0) {
                    double s = 0.0;
                    for (std::size_t a = 0; a < beta; ++a) s += bf.winv_first(rr, a) * blk.lminus(a, c);
                    rs.rd(g, (m - 1) * w + beta + c) += s;
                }
                if (m + 1 < r) {
                    double s = 0.0;
                    for (std::size_t a = 0; a < beta; ++a) s += bf.winv_last(rr, a) * blk.lplus(a, c);
                    rs.rd(g, (m + 1) * w + c) += s;
                }
            }
            rs.fd[g] = bf.y[i];
        }
    }
    return rs;
}

RealVector solve_reduced(const ReducedSystem& rs) {
    return cholesky_spd_solve(rs.rd.gram(), rs.rd.transpose_multiply(rs.fd));
}

std::vector<BlockBoundary> split_reduced_solution(const BlockPartition& p, std::span<const double> ud) {
    const std::size_t beta = p.beta;
    if (ud.size() != 2 * beta * p.block_count) throw ContractViolation("split_reduced_solution: length mismatch");
    std::vector<BlockBoundary> out(p.block_count);
    for (std::size_t m = 0; m < p.block_count; ++m) {
        const auto base = ud.begin() + static_cast<std::ptrdiff_t>(2 * beta * m);
        out[m].first.assign(base, base + static_cast<std::ptrdiff_t>(beta));
        out[m].last.assign(base + static_cast<std::ptrdiff_t>(beta), base + static_cast<std::ptrdiff_t>(2 * beta));
    }
    return out;
}

std::vector<RealVector> back_substitute_middle(const BlockPartition& p, const std::vector<BlockFactor>& factors,
                                               const std::vector<BlockBoundary>& boundary, Executor* exec) {
    const std::size_t t = p.block_size;
    const std::size_t beta = p.beta;
    std::vector<RealVector> out(p.block_count, RealVector(t, 0.0));
    run_blocks(exec, p.block_count, [&](std::size_t m) {
        RealVector& u = out[m];
        for (std::size_t a = 0; a < beta; ++a) {
            u[a] = boundary[m].first[a];
            u[t - beta + a] = boundary[m].last[a];
        }
        solve_z_inner(factors[m].wz, factors[m].y, u, beta);
    });
    return out;
}

RealVector paqif_solve(const BandedMatrix& l, std::span<const double> f, std::size_t r, const PaqifOptions& opts) {
    const BlockPartition p = partition(l, f, r);
    std::vector<BlockFactor> factors(r);
    if (opts.profile) opts.profile->block_cpu.assign(r, 0.0);

    // Steps 1-3: independent block factorization, W solve, W^-1 ring blocks.
    run_blocks(opts.executor, r, [&](std::size_t m) {
        const double t0 = opts.profile ? thread_cpu_seconds() : 0.0;
        factors[m] = factor_block(p.blocks[m], p.beta);
        if (opts.profile) opts.profile->block_cpu[m] += thread_cpu_seconds() - t0;
    });

    // Step 4 (and 5): coupled boundary unknowns.
    const double c0 = opts.profile ? thread_cpu_seconds() : 0.0;
    RealVector ud = solve_reduced(build_reduced_system(p, factors));
    if (opts.project) ud = project_nonneg(ud);
    const auto boundary = split_reduced_solution(p, ud);
    if (opts.profile) opts.profile->coupling_cpu = thread_cpu_seconds() - c0;

    // Steps 6 (and 7): middles.
    std::vector<RealVector> parts(r);
    run_blocks(opts.executor, r, [&](std::size_t m) {
        const double t0 = opts.profile ? thread_cpu_seconds() : 0.0;
        const std::size_t t = p.block_size;
        RealVector u(t, 0.0);
        for (std::size_t a = 0; a < p.beta; ++a) {
            u[a] = boundary[m].first[a];
            u[t - p.beta + a] = boundary[m].last[a];
        }
        solve_z_inner(factors[m].wz, factors[m].y, u, p.beta);
        if (opts.project) u = project_nonneg(u);
        parts[m] = std::move(u);
        if (opts.profile) opts.profile->block_cpu[m] += thread_cpu_seconds() - t0;
    });

    RealVector out;
    out.reserve(l.order());
    for (const auto& part : parts) out.insert(out.end(), part.begin(), part.end());
    return out;
}

RealVector paqif_solve_lcp(const LcpProblem& problem, std::size_t r, double tol, std::size_t max_outer, Executor* exec,
                           LcpSolveReport* report) {
    const BandedMatrix& l = problem.l;
    const std::size_t n = l.order();
    const std::size_t beta = l.semibandwidth();
    if (problem.f.size() != n) throw ContractViolation("paqif_solve_lcp: right side length mismatch");

    RealVector u(n, 0.0);
    std::vector<char> active(n, 0);
    // Active where the row equation would push u_i below zero given the others.
    auto update_active = [&] {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double s = problem.f[i];
            const std::size_t lo = i > beta ? i - beta : 0;
            for (std::size_t j = lo; j <= std::min(n - 1, i + beta); ++j)
                if (j != i) s -= l(i, j) * u[j];
            const char a = s < 0.0 ? 1 : 0;
            changed |= a != active[i];
            active[i] = a;
        }
        return changed;
    };
    update_active();

    double res = complementarity_residual(problem, u);
    for (std::size_t outer = 1; outer <= max_outer; ++outer) {
        BandedMatrix m(n, beta);
        RealVector g(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i]) {
                m.set(i, i, 1.0);
                continue;
            }
            const std::size_t lo = i > beta ? i - beta : 0;
            for (std::size_t j = lo; j <= std::min(n - 1, i + beta); ++j)
                if (!active[j] || j == i) m.set(i, j, l(i, j));
            g[i] = problem.f[i];
        }
        PaqifOptions opts;
        opts.project = true;
        opts.executor = exec;
        u = paqif_solve(m, g, r, opts);
        res = complementarity_residual(problem, u);
        const bool changed = update_active();
        if (report) *report = {outer, res};
        if (res <= tol) return u;
        if (!changed) break;
    }
    std::ostringstream msg;
    msg << "paqif_solve_lcp: complementarity residual " << std::scientific << res << " above tolerance " << tol;
    throw NonConvergence(msg.str(), res);
}

} // namespace qif
