#include "subfrac/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subfrac {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

long long parse_ll(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(value.c_str(), &end, 10);
    if (errno != 0 || end == value.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad integer for '" + key + "': " + value);
    return v;
}

double parse_dbl(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (errno != 0 || end == value.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad number for '" + key + "': " + value);
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw std::invalid_argument("config: bad boolean for '" + key + "': " + value);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Shortest round-trip double formatting, locale-independent.
std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // prefer shorter forms that still round-trip
    for (int prec = 1; prec < 17; ++prec) {
        char cand[64];
        std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
        if (std::strtod(cand, nullptr) == v) return cand;
    }
    return buf;
}

}  // namespace

std::string RunConfig::serialized() const {
    std::ostringstream os;
    os << "n=" << n << '\n'
       << "quad_nodes=" << quad_nodes << '\n'
       << "quad_rho_max=" << fmt_double(quad_rho_max) << '\n'
       << "quad_tol=" << fmt_double(quad_tol) << '\n'
       << "paths=" << paths << '\n'
       << "steps=" << steps << '\n'
       << "seed=" << seed << '\n'
       << "cache_dir=" << cache_dir << '\n'
       << "format=" << format << '\n'
       << "force=" << (force ? 1 : 0) << '\n';
    return os.str();
}

std::uint64_t RunConfig::digest() const { return fnv1a(serialized()); }

std::string RunConfig::digest_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(digest()));
    return buf;
}

void config_apply(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n") {
        long long v = parse_ll(key, value);
        if (v < 1 || v > 64) throw std::invalid_argument("config: n out of range: " + value);
        cfg.n = static_cast<int>(v);
    } else if (key == "quad_nodes") {
        long long v = parse_ll(key, value);
        if (v < 2 || v > 512) throw std::invalid_argument("config: quad_nodes out of range: " + value);
        cfg.quad_nodes = static_cast<int>(v);
    } else if (key == "quad_rho_max") {
        double v = parse_dbl(key, value);
        if (!(v > 0)) throw std::invalid_argument("config: quad_rho_max must be positive");
        cfg.quad_rho_max = v;
    } else if (key == "quad_tol") {
        double v = parse_dbl(key, value);
        if (!(v > 0)) throw std::invalid_argument("config: quad_tol must be positive");
        cfg.quad_tol = v;
    } else if (key == "paths") {
        long long v = parse_ll(key, value);
        if (v < 1) throw std::invalid_argument("config: paths must be positive");
        cfg.paths = v;
    } else if (key == "steps") {
        long long v = parse_ll(key, value);
        if (v < 1 || v > 10000000) throw std::invalid_argument("config: steps out of range");
        cfg.steps = static_cast<int>(v);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_ll(key, value));
    } else if (key == "cache_dir") {
        cfg.cache_dir = value;
    } else if (key == "format") {
        if (value != "json" && value != "csv")
            throw std::invalid_argument("config: format must be json or csv");
        cfg.format = value;
    } else if (key == "force") {
        cfg.force = parse_bool(key, value);
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

RunConfig load_config(const std::string& config_path) {
    RunConfig cfg;

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("config: cannot open file: " + config_path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config: missing '=' at " + config_path + ":" +
                                            std::to_string(lineno));
            config_apply(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        }
    }

    static const char* keys[] = {"n",     "quad_nodes", "quad_rho_max", "quad_tol", "paths",
                                 "steps", "seed",       "cache_dir",    "format",   "force"};
    for (const char* key : keys) {
        std::string env = "SUBFRAC_";
        for (const char* p = key; *p; ++p) env += static_cast<char>(std::toupper(*p));
        if (const char* v = std::getenv(env.c_str())) config_apply(cfg, key, v);
    }
    return cfg;
}

HkOptions hk_options(const RunConfig& cfg) {
    HkOptions o;
    o.panel_nodes = cfg.quad_nodes;
    o.eps_rel = std::min(cfg.quad_tol, 1e-12);
    return o;
}

GaugeGridOptions grid_options(const RunConfig& cfg) {
    GaugeGridOptions o;
    o.rho_max = cfg.quad_rho_max;
    // nodes-per-panel knobs stay at their defaults: the grid layout is part
    // of the node-consistency contract between moments and heat curves.
    return o;
}

RadialOptions radial_options(const RunConfig& cfg) {
    RadialOptions o;
    o.hk = hk_options(cfg);
    o.nodes = cfg.quad_nodes;
    o.eps_rel = cfg.quad_tol;
    return o;
}

SamplerSpec sampler_spec(const RunConfig& cfg) {
    SamplerSpec s;
    s.paths = cfg.paths;
    s.steps = cfg.steps;
    s.seed = cfg.seed;
    return s;
}

PsiOptions psi_options(const RunConfig& cfg) {
    PsiOptions o;
    o.grid = grid_options(cfg);
    o.radial = radial_options(cfg);
    o.eps_rel = cfg.quad_tol;
    o.sampler = sampler_spec(cfg);
    return o;
}

}  // namespace subfrac
