#include "qif/errors.hpp"
#include "qif/harness.hpp"
#include "qif/lcp.hpp"
#include "qif/paqif.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qif {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    std::ofstream out(fs::path(cfg.out_dir) / name);
    if (!out) throw ConfigError("cannot write '" + (fs::path(cfg.out_dir) / name).string() + "'");
    out.precision(10);
    return out;
}

std::string join(const std::vector<std::size_t>& v) {
    std::ostringstream os;
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
    return os.str();
}

void common_fields(RunSummary& s, const RunConfig& cfg) {
    s.set("mode", to_string(cfg.mode));
    s.set("grid", join(cfg.grids));
    s.set("kappa", cfg.kappa);
    s.set("splitting", cfg.splitting);
    s.set("limiter", to_string(cfg.limiter));
    s.set("workers", static_cast<double>(cfg.workers));
    s.set("seed", static_cast<double>(cfg.seed));
}

void write_error_table(const RunConfig& cfg, RunSummary& s, const std::vector<std::size_t>& grids,
                       const std::vector<ErrorNorms>& errs) {
    auto table = open_out(cfg, "errors.dat");
    table << "# grid linf l1 l2\n";
    auto l1 = open_out(cfg, "error_l1.dat");
    for (std::size_t k = 0; k < errs.size(); ++k) {
        table << grids[k] << ' ' << errs[k].linf << ' ' << errs[k].l1 << ' ' << errs[k].l2 << '\n';
        l1 << grids[k] << ' ' << errs[k].l1 << '\n';
        const std::string n = std::to_string(grids[k]);
        s.set("error_linf_" + n, errs[k].linf);
        s.set("error_l1_" + n, errs[k].l1);
        s.set("error_l2_" + n, errs[k].l2);
        if (k > 0 && grids[k] == 2 * grids[k - 1] && errs[k].l1 > 0.0 && errs[k - 1].l1 > 0.0) {
            s.set("order_l1_" + n, convergence_order(errs[k - 1].l1, errs[k].l1));
            s.set("order_l2_" + n, convergence_order(errs[k - 1].l2, errs[k].l2));
        }
    }
}

// ---------------------------------------------------------------- cd1d

RunSummary run_cd1d(const RunConfig& cfg) {
    RunSummary s;
    common_fields(s, cfg);
    double worst = 0.0;
    for (std::size_t n : cfg.grids) {
        // A square pulse next to a smooth bump, advected for n steps.
        RealVector u(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            u[i] = (x > 0.1 && x < 0.3 ? 1.0 : 0.0) + (x > 0.4 && x < 0.7 ? std::sin(std::numbers::pi * (x - 0.4) / 0.3) : 0.0);
        }
        auto tv = open_out(cfg, "tv_" + std::to_string(n) + ".dat");
        double prev = total_variation(u), rise = 0.0;
        const double tv0 = prev;
        tv << 0 << ' ' << prev << '\n';
        const std::size_t steps = cfg.max_iterations ? cfg.max_iterations : n / 2;
        for (std::size_t k = 1; k <= steps; ++k) {
            u = limited_upwind_step(u, cfg.cfl, cfg.limiter, cfg.kappa);
            const double t = total_variation(u);
            rise = std::max(rise, t - prev);
            prev = t;
            tv << k << ' ' << t << '\n';
        }
        auto sol = open_out(cfg, "solution_" + std::to_string(n) + ".dat");
        for (std::size_t i = 0; i < n; ++i) sol << (static_cast<double>(i) + 0.5) / static_cast<double>(n) << ' ' << u[i] << '\n';
        const std::string g = std::to_string(n);
        s.set("tv_initial_" + g, tv0);
        s.set("tv_final_" + g, prev);
        s.set("iterations_" + g, static_cast<double>(steps));
        worst = std::max(worst, rise);
    }
    s.set("max_tv_increase", worst);
    s.set("tvd", worst <= 1e-12 ? "true" : "false");
    s.set("final_residual", worst);
    return s;
}

// ---------------------------------------------------------------- cd2d

RunSummary run_cd2d(const RunConfig& cfg) {
    RunSummary s;
    common_fields(s, cfg);
    s.set("eps", cfg.eps);
    s.set("omega", cfg.omega);
    const SplittingVariant v = parse_splitting(cfg.splitting);
    KappaSchemeConfig kc;
    kc.kappa = cfg.kappa;
    kc.limiter = cfg.limiter;
    kc.eps = cfg.eps;
    const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-9;
    const std::size_t cap = cfg.max_iterations ? cfg.max_iterations : 4000;
    std::vector<ErrorNorms> errs;
    std::vector<std::size_t> failed;
    ResidualNorm last;
    std::size_t last_its = 0;
    for (std::size_t n : cfg.grids) {
        const ConvectionDiffusionProblem p = quartic_problem(n, kc);
        SolutionField u = cfg.start == StartGuess::Exact ? p.exact_field() : p.initial_field();
        auto log = open_out(cfg, "residuals_" + std::to_string(n) + ".dat");
        log << "# sweep scaled_rms max_abs\n";
        ResidualNorm r = residual_norm(u, p);
        std::size_t it = 0;
        while (r.max_abs > tol && it < cap) {
            r = sweep_splitting(u, v, p, cfg.omega);
            ++it;
            log << it << ' ' << r.scaled_rms << ' ' << r.max_abs << '\n';
            if (!std::isfinite(r.max_abs)) break;
        }
        const std::string g = std::to_string(n);
        s.set("iterations_" + g, static_cast<double>(it));
        s.set("residual_" + g, r.max_abs);
        s.set("converged_" + g, r.max_abs <= tol ? "true" : "false");
        if (!(r.max_abs <= tol)) failed.push_back(n);
        errs.push_back(error_norms(u, p.exact));
        last = r;
        last_its = it;
    }
    write_error_table(cfg, s, cfg.grids, errs);
    s.set("final_residual", last.max_abs);
    s.set("iterations", static_cast<double>(last_its));
    s.set("converged", failed.empty() ? "true" : "false");
    s.write((fs::path(cfg.out_dir) / "summary.txt").string());
    if (!failed.empty())
        throw NonConvergence("cd2d: grid " + std::to_string(failed.front()) + " missed tol", last.max_abs);
    return s;
}

// ---------------------------------------------------------------- lcp

RunSummary run_lcp(const RunConfig& cfg) {
    RunSummary s;
    common_fields(s, cfg);
    s.set("dims", static_cast<double>(cfg.lcp_dims));
    const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-10;
    const std::size_t cap = cfg.max_iterations ? cfg.max_iterations : 500;
    std::unique_ptr<ThreadPoolExecutor> pool;
    if (cfg.workers > 1) pool = std::make_unique<ThreadPoolExecutor>(cfg.workers);
    for (std::size_t n : cfg.grids) {
        const LcpProblem p = membrane_problem(n, cfg.lcp_dims);
        LcpSolveReport rep;
        const RealVector u = paqif_solve_lcp(p, cfg.workers, tol, cap, pool.get(), &rep);
        const RealVector ref = psor_oracle(p, cfg.psor_omega, 1e-13);
        double diff = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            diff = std::max(diff, std::abs(u[k] - ref[k]));
            scale = std::max(scale, std::abs(ref[k]));
        }
        auto out = open_out(cfg, "solution_" + std::to_string(n) + ".dat");
        for (std::size_t k = 0; k < u.size(); ++k) out << k << ' ' << u[k] << '\n';
        const std::string g = std::to_string(n);
        s.set("iterations_" + g, static_cast<double>(rep.outer_iterations));
        s.set("residual_" + g, rep.residual);
        s.set("psor_difference_" + g, scale > 0.0 ? diff / scale : diff);
        s.set("final_residual", rep.residual);
        s.set("iterations", static_cast<double>(rep.outer_iterations));
        if (rep.residual > tol) {
            s.write((fs::path(cfg.out_dir) / "summary.txt").string());
            throw NonConvergence("lcp: grid " + g + " missed tol", rep.residual);
        }
    }
    return s;
}

// ---------------------------------------------------------------- EHL

EhlParams ehl_params(const RunConfig& cfg) {
    EhlParams p = cfg.ehl;
    p.contact = cfg.mode == Mode::EhlLine ? ContactType::Line : ContactType::Point;
    const int given = (cfg.moes_g ? 1 : 0) + (cfg.moes_u ? 1 : 0) + (cfg.moes_w ? 1 : 0);
    if (given == 3) {
        const MoesSet m = moes_convert({cfg.moes_g, cfg.moes_u, cfg.moes_w, {}, {}}, p.contact);
        p.moes_m = m.m;
        p.moes_l = m.l;
    } else if (given != 0) {
        throw ConfigError("ehl: give all of G, U, W or none of them");
    }
    return p;
}

RunSummary run_ehl(const RunConfig& cfg) {
    RunSummary s;
    common_fields(s, cfg);
    const EhlParams p = ehl_params(cfg);
    const EhlParams r = p.resolved();
    s.set("M", r.moes_m);
    s.set("L", r.moes_l);
    s.set("alpha_bar", r.alpha * r.p_h);
    s.set("lambda", r.lambda);
    s.set("load_target", r.load_target);
    EhlSolveOptions o;
    o.scheme = parse_ehl_scheme(cfg.splitting);
    o.kappa = cfg.kappa;
    o.limiter = cfg.limiter;
    if (cfg.tol > 0.0) o.tol = cfg.tol;
    o.tol_fb = cfg.tol_fb;
    if (cfg.max_iterations) o.max_outer = cfg.max_iterations;

    std::vector<EhlState> states;
    std::vector<std::size_t> done;
    const std::string summary = (fs::path(cfg.out_dir) / "summary.txt").string();
    for (std::size_t n : cfg.grids) {
        if (cfg.nested && !states.empty()) {
            o.initial = prolong_pressure(states.back().grid, states.back().u);
            o.initial_h0 = states.back().h0;
        }
        const std::string g = std::to_string(n);
        const auto t0 = std::chrono::steady_clock::now();
        EhlResult res;
        try {
            res = solve_ehl(p, n, o);
        } catch (const NonConvergence& e) {
            s.set("converged_" + g, "false");
            s.set("final_residual", e.residual());
            s.write(summary);
            throw;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const EhlState& st = res.state;
        write_solution(st, (fs::path(cfg.out_dir) / ("solution_" + g + ".dat")).string());
        auto hist = open_out(cfg, "history_" + g + ".dat");
        hist << "# iteration residual force_residual\n";
        for (std::size_t k = 0; k < st.residual_history.size(); ++k)
            hist << k + 1 << ' ' << st.residual_history[k] << ' ' << st.force_history[k] << '\n';
        auto prof = open_out(cfg, "profile_" + g + ".dat");
        auto film = open_out(cfg, "film_" + g + ".dat");
        const std::size_t jc = st.grid.rows() / 2;
        for (std::size_t i = 0; i <= st.grid.n; ++i) {
            prof << st.grid.x(i) << ' ' << st.u[st.grid.index(i, jc)] << '\n';
            film << st.grid.x(i) << ' ' << st.film[st.grid.index(i, jc)] << '\n';
        }
        const ProfileFeatures f = profile_features(st);
        s.set("converged_" + g, "true");
        s.set("iterations_" + g, static_cast<double>(res.iterations));
        s.set("residual_" + g, res.residual);
        s.set("force_residual_" + g, res.force_residual);
        s.set("h0_" + g, st.h0);
        s.set("spike_height_" + g, f.spike_height);
        s.set("min_film_" + g, f.min_film);
        s.set("central_film_" + g, f.central_film);
        s.set("seconds_" + g, secs);
        s.set("final_residual", res.residual);
        s.set("iterations", static_cast<double>(res.iterations));
        states.push_back(st);
        done.push_back(n);
    }
    if (cfg.nested && states.size() > 1) {
        std::vector<ErrorNorms> errs;
        for (std::size_t k = 0; k + 1 < states.size(); ++k) errs.push_back(ehl_intergrid_errors(states[k], states[k + 1]));
        write_error_table(cfg, s, std::vector<std::size_t>(done.begin(), done.end() - 1), errs);
    }
    return s;
}

// ---------------------------------------------------------------- bench

RunSummary run_bench(const RunConfig& cfg) {
    RunSummary s;
    s.set("mode", to_string(cfg.mode));
    s.set("grid", static_cast<double>(cfg.bench_n));
    s.set("beta", static_cast<double>(cfg.bench_beta));
    s.set("repetitions", static_cast<double>(cfg.repetitions));
    s.set("seed", static_cast<double>(cfg.seed));
    const auto rows = bench_speedup(cfg.bench_n, cfg.bench_beta, cfg.bench_workers, cfg.repetitions, cfg.seed);
    auto table = open_out(cfg, "speedup_table.dat");
    table << "# r wall_s critical_s measured_Sp predicted_Sp efficiency\n";
    auto sp = open_out(cfg, "speedup.dat");
    auto pr = open_out(cfg, "speedup_predicted.dat");
    auto ef = open_out(cfg, "efficiency.dat");
    for (const SpeedupRow& r : rows) {
        table << r.r << ' ' << r.wall_seconds << ' ' << r.critical_seconds << ' ' << r.measured << ' ' << r.predicted
              << ' ' << r.efficiency << '\n';
        sp << r.r << ' ' << r.measured << '\n';
        pr << r.r << ' ' << r.predicted << '\n';
        ef << r.r << ' ' << r.efficiency << '\n';
        const std::string k = std::to_string(r.r);
        s.set("measured_speedup_" + k, r.measured);
        s.set("predicted_speedup_" + k, r.predicted);
        s.set("wall_seconds_" + k, r.wall_seconds);
    }
    return s;
}

} // namespace

LcpProblem membrane_problem(std::size_t n, std::size_t dims) {
    if (n < 2 || (dims != 1 && dims != 2)) throw ContractViolation("membrane_problem: need n >= 2 and dims 1 or 2");
    const double h = 1.0 / static_cast<double>(n + 1), c = 1.0 / (h * h);
    const double pi = std::numbers::pi;
    if (dims == 1) {
        LcpProblem p{BandedMatrix(n, 1), RealVector(n)};
        for (std::size_t i = 0; i < n; ++i) {
            p.l.set(i, i, 2.0 * c);
            if (i > 0) p.l.set(i, i - 1, -c);
            if (i + 1 < n) p.l.set(i, i + 1, -c);
            p.f[i] = 30.0 * std::sin(3.0 * pi * static_cast<double>(i + 1) * h) - 5.0;
        }
        return p;
    }
    LcpProblem p{BandedMatrix(n * n, n), RealVector(n * n)};
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = j * n + i;
            p.l.set(k, k, 4.0 * c);
            if (i > 0) p.l.set(k, k - 1, -c);
            if (i + 1 < n) p.l.set(k, k + 1, -c);
            if (j > 0) p.l.set(k, k - n, -c);
            if (j + 1 < n) p.l.set(k, k + n, -c);
            const double x = static_cast<double>(i + 1) * h, y = static_cast<double>(j + 1) * h;
            p.f[k] = 40.0 * std::sin(2.0 * pi * x) * std::sin(pi * y) - 4.0;
        }
    return p;
}

ProfileFeatures profile_features(const EhlState& s) {
    const EhlGrid& g = s.grid;
    const std::size_t jc = g.rows() / 2;
    ProfileFeatures f;
    f.min_film = *std::min_element(s.film.begin(), s.film.end());
    double best = std::abs(g.x(0));
    for (std::size_t i = 0; i <= g.n; ++i) {
        const std::size_t k = g.index(i, jc);
        f.peak = std::max(f.peak, s.u[k]);
        if (std::abs(g.x(i)) <= best) {
            best = std::abs(g.x(i));
            f.central_film = s.film[k];
        }
        if (i == 0 || i == g.n || g.x(i) <= 0.3) continue;
        const double u = s.u[k];
        if (u > s.u[g.index(i - 1, jc)] && u >= s.u[g.index(i + 1, jc)] && u > f.spike_height) {
            f.spike_height = u;
            f.spike_x = g.x(i);
        }
    }
    return f;
}

RunSummary run_experiment(const RunConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    RunSummary s;
    switch (cfg.mode) {
    case Mode::Cd1d: s = run_cd1d(cfg); break;
    case Mode::Cd2d: s = run_cd2d(cfg); break;
    case Mode::Lcp: s = run_lcp(cfg); break;
    case Mode::EhlLine:
    case Mode::EhlPoint: s = run_ehl(cfg); break;
    case Mode::BenchPaqif: s = run_bench(cfg); break;
    }
    s.write((fs::path(cfg.out_dir) / "summary.txt").string());
    return s;
}

} // namespace qif
