#include "qif/cost_model.hpp"

#include "qif/errors.hpp"

namespace qif {

CostTerms serial_counts(const CostModel& c) {
    const double r = static_cast<double>(c.r);
    const double b = static_cast<double>(c.beta);
    const double tm1 = c.t() - 1.0;
    CostTerms k;
    k.fact = r * tm1 * (1 + 4 * b + 8 * b * b) * c.t_add + r * tm1 * (2 + 8 * b + 8 * b * b) * c.t_multi +
             r * tm1 * 4 * b * c.t_div;
    k.y = r * tm1 * 4 * b * c.t_add + r * tm1 * 4 * b * c.t_multi;
    k.inv = r * 4 * b * b * b * (c.t_add + c.t_multi);
    k.comp = r * 4 * b * b * (b - 1) * c.t_add + r * 4 * b * b * b * c.t_multi;
    k.norm = (36 * r * b * b * b - 6 * r * b * b) * (c.t_add + c.t_multi);
    k.chol = (36 * r * b * b * b - 6 * r * b * b - 10 * r * b) * (c.t_add + c.t_multi);
    k.update = (r * tm1 * (3 + 3 * b) - r * b * (3 + 3 * b)) * c.t_add +
               (r * tm1 * (6 + 3 * b) - r * b * (6 + 3 * b)) * c.t_multi;
    return k;
}

CostTerms parallel_counts(const CostModel& c) {
    const double r = static_cast<double>(c.r);
    const double b = static_cast<double>(c.beta);
    const double tm1 = c.t() - 1.0;
    CostTerms k;
    k.fact = tm1 * (2 + 8 * b + 8 * b * b) * c.t_op;
    k.y = tm1 * 4 * b * c.t_op;
    k.inv = 4 * b * b * b * c.t_op;
    k.comp = 4 * b * b * b * c.t_op;
    k.norm = (36 * b * b * b - 6 * b * b) * c.t_op;
    k.chol = (36 * b * b * b - 6 * b * b - 10 * b) * c.t_op;
    k.update = (2 + 2 * b * b) * c.t_op;
    k.sol = r * (c.t() - b - 1) * c.t_op;
    return k;
}

double predict_speedup(const CostModel& c) {
    if (c.n == 0 || c.r == 0 || c.beta == 0) throw ContractViolation("predict_speedup: parameters must be positive");
    const double r = static_cast<double>(c.r);
    const double ratio = static_cast<double>(c.beta) / static_cast<double>(c.n);
    return 1.0 / (4.0 * (1.0 / r + ratio * (11.0 + 9.0 * r)));
}

} // namespace qif
