// qif-run: command-line front end for the experiment harness.
#include "qif/errors.hpp"
#include "qif/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace {

std::string join(const std::vector<std::size_t>& v) {
    std::ostringstream os;
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Banded solvers, kappa-scheme studies and EHL experiments"};
    std::optional<std::string> mode, config, splitting, limiter, out, grids_text;
    std::optional<std::size_t> workers;
    std::optional<double> kappa, tol;
    std::optional<std::uint64_t> seed;
    app.add_option("--mode", mode, "cd1d | cd2d | lcp | ehl-line | ehl-point | bench-paqif");
    app.add_option("--config", config, "key = value file with [run], [cd], [lcp], [ehl], [bench] sections");
    app.add_option("--workers", workers, "worker count r");
    app.add_option("--kappa", kappa, "kappa in [-1, 1]");
    app.add_option("--splitting", splitting, "Ls0..Ls3, DefC (cd2d) or Lhs1, Lhs2 (EHL)");
    app.add_option("--limiter", limiter, "none | van-albada | koren | minmod");
    app.add_option("--grid", grids_text, "comma-separated grid sizes");
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--tol", tol, "convergence tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        qif::RunConfig cfg = config ? qif::load_config(*config) : qif::RunConfig{};
        auto set = [&](const char* key, const std::string& v) { qif::apply_setting(cfg, "run", key, v); };
        if (mode) set("mode", *mode);
        if (splitting) set("splitting", *splitting);
        if (limiter) set("limiter", *limiter);
        if (grids_text) set("grid", *grids_text);
        if (out) cfg.out_dir = *out;
        if (workers) cfg.workers = *workers;
        if (kappa) cfg.kappa = *kappa;
        if (tol) cfg.tol = *tol;
        if (seed) cfg.seed = *seed;
        if (!mode && !config) throw qif::ConfigError("--mode or --config is required");
        if ((cfg.mode == qif::Mode::EhlLine || cfg.mode == qif::Mode::EhlPoint) && !splitting &&
            cfg.splitting.rfind("Lhs", 0) != 0)
            cfg.splitting = "Lhs1";
        if (cfg.mode == qif::Mode::EhlLine && !grids_text && cfg.grids == qif::RunConfig{}.grids)
            cfg.grids = {32, 64, 128, 256};

        const qif::RunSummary s = qif::run_experiment(cfg);
        std::cout << "mode " << qif::to_string(cfg.mode) << ", grids " << join(cfg.grids) << ", output in "
                  << cfg.out_dir << '\n';
        for (const auto& [k, v] : s.entries()) std::cout << "  " << k << " = " << v << '\n';
        return 0;
    } catch (const qif::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qif::NonConvergence& e) {
        std::cerr << "no convergence: " << e.what() << " (residual " << e.residual() << ")\n";
        return 3;
    } catch (const qif::FactorizationBreakdown& e) {
        std::cerr << "numerical breakdown: " << e.what() << '\n';
        return 4;
    } catch (const qif::NotPositiveDefinite& e) {
        std::cerr << "numerical breakdown: " << e.what() << '\n';
        return 4;
    } catch (const qif::UnsupportedOrder& e) {
        std::cerr << "numerical breakdown: " << e.what() << '\n';
        return 4;
    } catch (const qif::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
