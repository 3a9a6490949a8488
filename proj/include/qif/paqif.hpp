#pragma once

#include "qif/aqif.hpp"
#include "qif/band.hpp"
#include "qif/executor.hpp"
#include "qif/lcp_problem.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qif {

struct Block {
    BandedMatrix l0;
    /// Coupling of the first b rows to the last b unknowns of the previous
    /// block (upper triangular, b x b).
    DenseMatrix lminus;
    /// Coupling of the last b rows to the first b unknowns of the next block
    /// (lower triangular, b x b).
    DenseMatrix lplus;
    RealVector f;
};

struct BlockPartition {
    std::size_t block_count = 0;
    std::size_t block_size = 0;
    std::size_t beta = 0;
    std::vector<Block> blocks;

    [[nodiscard]] BandedMatrix reassemble() const;
};

/// Per-block results of the independent phase.
struct BlockFactor {
    WZFactors wz;
    RealVector y;
    /// Rows of W^-1 on the boundary ring (first b then last b local indices),
    /// restricted to the first b columns (`first`) and last b columns (`last`).
    DenseMatrix winv_first;
    DenseMatrix winv_last;
};

struct ReducedSystem {
    DenseMatrix rd;
    RealVector fd;
    std::size_t semibandwidth = 0;
};

/// Boundary unknowns of one block: first b and last b local values.
struct BlockBoundary {
    RealVector first;
    RealVector last;
};

/// CPU seconds per block (MYID = block index) and for the coupling stage.
struct PaqifProfile {
    std::vector<double> block_cpu;
    double coupling_cpu = 0.0;
};

[[nodiscard]] BlockPartition partition(const BandedMatrix& l, std::span<const double> f, std::size_t r);

/// Factorization, W solve and W^-1 ring blocks for one block.
[[nodiscard]] BlockFactor factor_block(const Block& b, std::size_t beta);

[[nodiscard]] ReducedSystem build_reduced_system(const BlockPartition& p, const std::vector<BlockFactor>& factors);

/// Normal equations R'R u = R'F solved by Cholesky.
[[nodiscard]] RealVector solve_reduced(const ReducedSystem& rs);

[[nodiscard]] std::vector<BlockBoundary> split_reduced_solution(const BlockPartition& p, std::span<const double> ud);

/// Recovers each block's interior unknowns from its boundary values.
[[nodiscard]] std::vector<RealVector> back_substitute_middle(const BlockPartition& p,
                                                             const std::vector<BlockFactor>& factors,
                                                             const std::vector<BlockBoundary>& boundary,
                                                             Executor* exec = nullptr);

struct PaqifOptions {
    bool project = false;
    Executor* executor = nullptr;
    PaqifProfile* profile = nullptr;
};

/// Partitioned WZ solve of L u = f over r blocks.
[[nodiscard]] RealVector paqif_solve(const BandedMatrix& l, std::span<const double> f, std::size_t r,
                                     const PaqifOptions& opts = {});

struct LcpSolveReport {
    std::size_t outer_iterations = 0;
    double residual = 0.0;
};

/// LCP solve: repeated projected partitioned solves on the current active set
/// until the complementarity residual drops below tol.
[[nodiscard]] RealVector paqif_solve_lcp(const LcpProblem& problem, std::size_t r, double tol,
                                         std::size_t max_outer, Executor* exec = nullptr,
                                         LcpSolveReport* report = nullptr);

} // namespace qif
