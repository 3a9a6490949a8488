#pragma once

#include "qif/ehl.hpp"
#include "qif/lcp_problem.hpp"
#include "qif/tvd.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace qif {

enum class Mode { Cd1d, Cd2d, Lcp, EhlLine, EhlPoint, BenchPaqif };

[[nodiscard]] Mode parse_mode(const std::string& name);
[[nodiscard]] std::string to_string(Mode m);

enum class StartGuess { Zero, Exact };

struct RunConfig {
    Mode mode = Mode::Cd2d;
    /// Ls0..Ls3 / DefC for cd2d, Lhs1 / Lhs2 for the EHL modes.
    std::string splitting = "Ls0";
    double kappa = 1.0 / 3.0;
    Limiter limiter = Limiter::None;
    std::vector<std::size_t> grids{16, 32, 64};
    std::size_t workers = 1;
    double tol = 0.0;                ///< 0 selects the mode default
    std::size_t max_iterations = 0;  ///< 0 selects the mode default
    std::string out_dir = "qif-out";
    std::uint64_t seed = 1;

    // [cd]
    double eps = 1e-6;
    double omega = 1.0;
    StartGuess start = StartGuess::Zero;
    double cfl = 0.5;

    // [lcp]
    std::size_t lcp_dims = 1;
    double psor_omega = 1.5;

    // [ehl]
    EhlParams ehl;
    std::optional<double> moes_g, moes_u, moes_w;
    bool nested = true;
    double tol_fb = 1e-4;

    // [bench]
    std::size_t bench_n = 512;
    std::size_t bench_beta = 2;
    std::size_t repetitions = 5;
    std::vector<std::size_t> bench_workers{1, 2, 4, 8};

    void validate() const;
};

/// key = value lines under [run], [cd], [lcp], [ehl] and [bench] headers;
/// '#' starts a comment. Errors name the source and line.
[[nodiscard]] RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
[[nodiscard]] RunConfig load_config(const std::string& path);
/// Sets one key as if it appeared in `section`.
void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

/// Ordered key = value summary, written as summary.txt.
class RunSummary {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
    void write(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Runs the pipeline selected by cfg.mode and writes its artifacts (error
/// tables, residual logs, solution dumps, summary.txt) under cfg.out_dir.
RunSummary run_experiment(const RunConfig& cfg);

// ---------------------------------------------------------------- problems

/// -u'' >= f, u >= 0 on (0,1) (dims 1, n interior nodes) or the 5-point
/// version on the unit square (dims 2, n x n interior nodes).
[[nodiscard]] LcpProblem membrane_problem(std::size_t n, std::size_t dims);

/// Banded matrix with random off-diagonals in [-1, 1] and a diagonal that
/// dominates its row by a factor 1 + margin.
[[nodiscard]] BandedMatrix random_dominant_band(std::size_t n, std::size_t beta, std::mt19937_64& rng,
                                                double margin = 0.1);

// ---------------------------------------------------------------- bench

[[nodiscard]] double median(std::vector<double> v);

struct SpeedupRow {
    std::size_t r = 1;
    double wall_seconds = 0.0;   ///< median wall time of the whole solve
    double critical_seconds = 0.0; ///< median of max(block CPU) + coupling CPU
    double measured = 1.0;       ///< critical time at r = 1 over critical time at r
    double predicted = 1.0;
    double efficiency = 1.0;     ///< measured / r
};

/// Times paqif_solve on one random dominant system for every worker count.
/// The measured speedup uses per-block thread CPU time, so it reflects the
/// partitioned work even when fewer cores than blocks are available.
[[nodiscard]] std::vector<SpeedupRow> bench_speedup(std::size_t n, std::size_t beta,
                                                    const std::vector<std::size_t>& workers, std::size_t repetitions,
                                                    std::uint64_t seed);

// ---------------------------------------------------------------- EHL profiles

struct ProfileFeatures {
    double spike_height = 0.0; ///< 0 when no local maximum lies beyond x = 0.3
    double spike_x = 0.0;
    double peak = 0.0;
    double min_film = 0.0;
    double central_film = 0.0;
};

/// Features of the centre row (y = 0) of a solution.
[[nodiscard]] ProfileFeatures profile_features(const EhlState& s);

} // namespace qif
