#pragma once

#include "qif/band.hpp"

#include <span>

namespace qif {

/// Find u >= 0 with L u - f >= 0 and u . (L u - f) = 0.
struct LcpProblem {
    BandedMatrix l;
    RealVector f;
};

/// max_i |min(u_i, (L u - f)_i)|; zero exactly at LCP solutions.
[[nodiscard]] double complementarity_residual(const LcpProblem& p, std::span<const double> u);

/// Quadratic energy G(u) = u'Lu/2 - f'u.
[[nodiscard]] double qp_energy(const LcpProblem& p, std::span<const double> u);

} // namespace qif
