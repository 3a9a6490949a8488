#include "qif/cost_model.hpp"
#include "qif/errors.hpp"
#include "qif/harness.hpp"
#include "qif/paqif.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace qif {

double median(std::vector<double> v) {
    if (v.empty()) throw ContractViolation("median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

BandedMatrix random_dominant_band(std::size_t n, std::size_t beta, std::mt19937_64& rng, double margin) {
    BandedMatrix a(n, beta);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        for (std::size_t j = i > beta ? i - beta : 0; j <= std::min(n - 1, i + beta); ++j) {
            if (j == i) continue;
            const double v = d(rng);
            a.set(i, j, v);
            off += std::abs(v);
        }
        a.set(i, i, off * (1.0 + margin) + margin);
    }
    return a;
}

std::vector<SpeedupRow> bench_speedup(std::size_t n, std::size_t beta, const std::vector<std::size_t>& workers,
                                      std::size_t repetitions, std::uint64_t seed) {
    if (repetitions == 0) throw ContractViolation("bench_speedup: need at least one repetition");
    std::mt19937_64 rng(seed);
    const BandedMatrix a = random_dominant_band(n, beta, rng);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    RealVector f(n);
    for (double& v : f) v = d(rng);

    auto measure = [&](std::size_t r) {
        ThreadPoolExecutor pool(r);
        std::vector<double> wall, crit;
        for (std::size_t k = 0; k < repetitions; ++k) {
            PaqifProfile prof;
            PaqifOptions opts;
            opts.executor = &pool;
            opts.profile = &prof;
            const auto t0 = std::chrono::steady_clock::now();
            const RealVector u = paqif_solve(a, f, r, opts);
            wall.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            crit.push_back(*std::max_element(prof.block_cpu.begin(), prof.block_cpu.end()) + prof.coupling_cpu);
            if (u.size() != n) throw ContractViolation("bench_speedup: bad solution size");
        }
        return std::pair{median(wall), median(crit)};
    };

    const auto [wall1, crit1] = measure(1);
    std::vector<SpeedupRow> rows;
    for (std::size_t r : workers) {
        SpeedupRow row;
        row.r = r;
        if (r == 1) {
            row.wall_seconds = wall1;
            row.critical_seconds = crit1;
        } else {
            std::tie(row.wall_seconds, row.critical_seconds) = measure(r);
            row.measured = crit1 / row.critical_seconds;
        }
        CostModel cm;
        cm.n = n;
        cm.beta = beta;
        cm.r = r;
        row.predicted = predict_speedup(cm);
        row.efficiency = row.measured / static_cast<double>(r);
        rows.push_back(row);
    }
    return rows;
}

} // namespace qif
