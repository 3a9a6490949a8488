#include "qif/errors.hpp"
#include "qif/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qif {

Mode parse_mode(const std::string& name) {
    if (name == "cd1d") return Mode::Cd1d;
    if (name == "cd2d") return Mode::Cd2d;
    if (name == "lcp") return Mode::Lcp;
    if (name == "ehl-line") return Mode::EhlLine;
    if (name == "ehl-point") return Mode::EhlPoint;
    if (name == "bench-paqif") return Mode::BenchPaqif;
    throw ConfigError("unknown mode '" + name + "'");
}

std::string to_string(Mode m) {
    switch (m) {
    case Mode::Cd1d: return "cd1d";
    case Mode::Cd2d: return "cd2d";
    case Mode::Lcp: return "lcp";
    case Mode::EhlLine: return "ehl-line";
    case Mode::EhlPoint: return "ehl-point";
    case Mode::BenchPaqif: return "bench-paqif";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not a number");
    return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not a count");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean");
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_size(key, trim(item)));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

} // namespace

void apply_setting(RunConfig& c, const std::string& section, const std::string& key, const std::string& v) {
    const std::string k = section + "." + key;
    if (section == "run") {
        if (key == "mode") c.mode = parse_mode(v);
        else if (key == "splitting") c.splitting = v;
        else if (key == "kappa") c.kappa = to_double(k, v);
        else if (key == "limiter") c.limiter = parse_limiter(v);
        else if (key == "grid" || key == "grids") c.grids = to_sizes(k, v);
        else if (key == "workers") c.workers = to_size(k, v);
        else if (key == "tol") c.tol = to_double(k, v);
        else if (key == "max_iterations") c.max_iterations = to_size(k, v);
        else if (key == "out") c.out_dir = v;
        else if (key == "seed") c.seed = to_size(k, v);
        else throw ConfigError("unknown key '" + k + "'");
    } else if (section == "cd") {
        if (key == "eps") c.eps = to_double(k, v);
        else if (key == "omega") c.omega = to_double(k, v);
        else if (key == "cfl") c.cfl = to_double(k, v);
        else if (key == "start") {
            if (v == "zero") c.start = StartGuess::Zero;
            else if (v == "exact") c.start = StartGuess::Exact;
            else throw ConfigError(k + ": expected zero or exact");
        } else throw ConfigError("unknown key '" + k + "'");
    } else if (section == "lcp") {
        if (key == "dims") c.lcp_dims = to_size(k, v);
        else if (key == "psor_omega") c.psor_omega = to_double(k, v);
        else throw ConfigError("unknown key '" + k + "'");
    } else if (section == "ehl") {
        EhlParams& p = c.ehl;
        if (key == "M") p.moes_m = to_double(k, v);
        else if (key == "L") p.moes_l = to_double(k, v);
        else if (key == "G") c.moes_g = to_double(k, v);
        else if (key == "U") c.moes_u = to_double(k, v);
        else if (key == "W") c.moes_w = to_double(k, v);
        else if (key == "alpha") p.alpha = to_double(k, v);
        else if (key == "z") p.z = to_double(k, v);
        else if (key == "p0") p.p0 = to_double(k, v);
        else if (key == "p_h") p.p_h = to_double(k, v);
        else if (key == "lambda") p.lambda = to_double(k, v);
        else if (key == "h0") p.h0 = to_double(k, v);
        else if (key == "compressible") p.compressible = to_bool(k, v);
        else if (key == "x_lo") p.x_lo = to_double(k, v);
        else if (key == "x_hi") p.x_hi = to_double(k, v);
        else if (key == "y_lo") p.y_lo = to_double(k, v);
        else if (key == "y_hi") p.y_hi = to_double(k, v);
        else if (key == "c") p.c = to_double(k, v);
        else if (key == "omega") p.omega = to_double(k, v);
        else if (key == "omega_jacobi") p.omega_jacobi = to_double(k, v);
        else if (key == "load_target") p.load_target = to_double(k, v);
        else if (key == "nested") c.nested = to_bool(k, v);
        else if (key == "tol_fb") c.tol_fb = to_double(k, v);
        else throw ConfigError("unknown key '" + k + "'");
    } else if (section == "bench") {
        if (key == "n") c.bench_n = to_size(k, v);
        else if (key == "beta") c.bench_beta = to_size(k, v);
        else if (key == "repetitions") c.repetitions = to_size(k, v);
        else if (key == "workers") c.bench_workers = to_sizes(k, v);
        else throw ConfigError("unknown key '" + k + "'");
    } else {
        throw ConfigError("unknown section [" + section + "]");
    }
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    std::string section = "run", raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        try {
            apply_setting(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in, path);
}

void RunConfig::validate() const {
    if (kappa < -1.0 || kappa > 1.0) throw ConfigError("kappa must lie in [-1, 1]");
    if (workers == 0) throw ConfigError("workers must be at least 1");
    if (tol < 0.0) throw ConfigError("tol must be >= 0");
    switch (mode) {
    case Mode::Cd1d:
        if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("cd.cfl must lie in (0, 1]");
        if (std::any_of(grids.begin(), grids.end(), [](std::size_t n) { return n < 8; }))
            throw ConfigError("cd1d grids need at least 8 cells");
        break;
    case Mode::Cd2d:
        (void)parse_splitting(splitting);
        if (!(eps > 0.0)) throw ConfigError("cd.eps must be positive");
        if (!(omega > 0.0)) throw ConfigError("cd.omega must be positive");
        if (std::any_of(grids.begin(), grids.end(), [](std::size_t n) { return n < 2; }))
            throw ConfigError("cd2d grids need n >= 2");
        break;
    case Mode::Lcp:
        if (lcp_dims != 1 && lcp_dims != 2) throw ConfigError("lcp.dims must be 1 or 2");
        if (!(psor_omega > 0.0) || psor_omega >= 2.0) throw ConfigError("lcp.psor_omega must lie in (0, 2)");
        break;
    case Mode::EhlLine:
    case Mode::EhlPoint: {
        (void)parse_ehl_scheme(splitting);
        EhlParams p = ehl;
        p.contact = mode == Mode::EhlLine ? ContactType::Line : ContactType::Point;
        p.validate();
        if (!(tol_fb > 0.0)) throw ConfigError("ehl.tol_fb must be positive");
        if (std::any_of(grids.begin(), grids.end(), [](std::size_t n) { return n < 4; }))
            throw ConfigError("EHL grids need at least 4 intervals");
        if (nested)
            for (std::size_t k = 1; k < grids.size(); ++k)
                if (grids[k] != 2 * grids[k - 1]) throw ConfigError("nested EHL grids must double from level to level");
        break;
    }
    case Mode::BenchPaqif:
        if (bench_beta == 0 || bench_n < 4 * bench_beta) throw ConfigError("bench.n must be at least 4 beta");
        if (repetitions == 0) throw ConfigError("bench.repetitions must be at least 1");
        if (bench_workers.empty() || std::find(bench_workers.begin(), bench_workers.end(), 0) != bench_workers.end())
            throw ConfigError("bench.workers must be positive");
        break;
    }
}

void RunSummary::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = value;
            return;
        }
    entries_.emplace_back(key, value);
}

void RunSummary::set(const std::string& key, double value) {
    std::ostringstream os;
    os << std::setprecision(10) << value;
    set(key, os.str());
}

std::optional<std::string> RunSummary::get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    return std::nullopt;
}

void RunSummary::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
}

} // namespace qif
