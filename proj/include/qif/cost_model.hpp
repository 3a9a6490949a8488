#pragma once

#include <cstddef>

namespace qif {

/// Abstract operation costs for the partitioned WZ solver.
struct CostModel {
    double t_add = 1.0;
    double t_multi = 1.0;
    double t_div = 1.0;
    double t_op = 1.0;
    std::size_t n = 0;    ///< system order N
    std::size_t beta = 0; ///< semibandwidth
    std::size_t r = 1;    ///< block count

    [[nodiscard]] double t() const noexcept { return static_cast<double>(n) / static_cast<double>(r); }
};

struct CostTerms {
    double fact = 0.0;
    double y = 0.0;
    double inv = 0.0;
    double comp = 0.0;
    double norm = 0.0;
    double chol = 0.0;
    double update = 0.0;
    double sol = 0.0;

    [[nodiscard]] double total() const noexcept { return fact + y + inv + comp + norm + chol + update + sol; }
};

/// Operation counts on one processor, in units of t_add / t_multi / t_div.
/// The serial tally has no separate solution term (sol = 0).
[[nodiscard]] CostTerms serial_counts(const CostModel& c);

/// Steps on an r-processor machine, in units of t_op.
[[nodiscard]] CostTerms parallel_counts(const CostModel& c);

/// Closed form S_p = 1 / (4 (1/r + (beta/N)(11 + 9 r))).
[[nodiscard]] double predict_speedup(const CostModel& c);

} // namespace qif
