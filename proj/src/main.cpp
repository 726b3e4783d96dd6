// subfrac: heat kernel, Riesz-type kernels, and fractional sub-Laplacian
// powers on the Heisenberg group, with verification suites.
//
// Reports are line-oriented JSON (one object per record) carrying the value,
// its error estimate, the configuration digest, and the seed, so any report
// can be replayed bitwise from its embedded configuration.  Tables render as
// CSV when --format csv.  Results of pure value commands are cached by
// content key when --cache-dir is set; a cache hit replays the stored bytes.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subfrac/cache.hpp"
#include "subfrac/ccnorm.hpp"
#include "subfrac/config.hpp"
#include "subfrac/fn_dsl.hpp"
#include "subfrac/fraclap.hpp"
#include "subfrac/heatkernel.hpp"
#include "subfrac/hgroup.hpp"
#include "subfrac/riesz.hpp"
#include "subfrac/testfun.hpp"
#include "subfrac/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace subfrac;

std::vector<double> parse_csv_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        const std::string tok =
            s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (errno != 0 || end == tok.c_str() || *end != '\0')
            throw std::invalid_argument(std::string(what) + ": bad number '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

Point parse_point(const GroupConfig& g, const std::string& s) {
    const std::vector<double> v = parse_csv_doubles(s, "--point");
    if (v.size() != static_cast<std::size_t>(g.dim()))
        throw std::invalid_argument("--point: expected " + std::to_string(g.dim()) +
                                    " comma-separated coordinates for n=" +
                                    std::to_string(g.n));
    return Point(v);
}

std::vector<int> parse_gamma(const GroupConfig& g, const std::string& s) {
    const std::vector<double> v = parse_csv_doubles(s, "--gamma");
    if (v.size() != static_cast<std::size_t>(g.dim()))
        throw std::invalid_argument("--gamma: expected " + std::to_string(g.dim()) +
                                    " comma-separated exponents for n=" +
                                    std::to_string(g.n));
    std::vector<int> out;
    for (double d : v) {
        if (d < 0 || d != std::floor(d))
            throw std::invalid_argument("--gamma: exponents must be nonnegative integers");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

ordered_json point_json(const Point& x) {
    ordered_json a = ordered_json::array();
    for (std::size_t i = 0; i < x.size(); ++i) a.push_back(x[i]);
    return a;
}

// One value record: the line-oriented report body of a scalar command.
std::string value_record(const RunConfig& cfg, const std::string& op,
                         const ordered_json& params, double value, double err,
                         const std::vector<std::pair<std::string, ordered_json>>&
                             extra = {}) {
    ordered_json j;
    j["op"] = op;
    j["params"] = params;
    j["value"] = value;
    j["err"] = err;
    for (const auto& [k, v] : extra) j[k] = v;
    j["config_digest"] = cfg.digest_hex();
    j["seed"] = cfg.seed;
    return j.dump() + "\n";
}

void write_out(const std::string& path, const std::string& payload) {
    if (path.empty()) return;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write --out file: " + path);
    f << payload;
}

// Compute-or-replay: pure value commands go through the result cache.
int run_cached(const RunConfig& cfg, const std::string& out_file,
               const std::string& op, const ordered_json& params,
               const std::function<std::string()>& render) {
    ResultCache cache(cfg.cache_dir);
    const std::string key = cache_key(op, params.dump(), cfg.digest_hex());
    std::string payload;
    if (cache.enabled()) {
        if (auto hit = cache.lookup(key)) payload = *hit;
    }
    if (payload.empty()) {
        payload = render();
        if (cache.enabled()) cache.store(key, payload);
    }
    std::fputs(payload.c_str(), stdout);
    write_out(out_file, payload);
    return 0;
}

bool cost_guard(const RunConfig& cfg) {
    if (cfg.n > 2 && !cfg.force) {
        std::cerr << "error: n=" << cfg.n
                  << " exceeds the desk-scale guard for this command; pass --force "
                     "to run anyway\n";
        return false;
    }
    return true;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite,
               const std::string& out_file) {
    std::vector<std::string> names;
    if (suite == "all") {
        names = suite_names();
    } else {
        const auto& all = suite_names();
        if (std::find(all.begin(), all.end(), suite) == all.end()) {
            std::cerr << "error: unknown verify suite '" << suite << "' (choose from";
            for (const auto& s : all) std::cerr << " " << s;
            std::cerr << " or all)\n";
            return 1;
        }
        names.push_back(suite);
    }

    std::string payload;
    bool all_pass = true;
    for (const std::string& name : names) {
        const SuiteResult r = run_suite(name, cfg);
        std::cerr << format_suite(r);
        for (const CheckResult& c : r.checks) {
            ordered_json j;
            j["op"] = "verify";
            j["suite"] = r.suite;
            j["criterion"] = r.criterion;
            j["check"] = c.id;
            j["value"] = c.value;
            j["target"] = c.target;
            j["tol"] = c.tol;
            j["err"] = c.err;
            j["pass"] = c.pass;
            if (!c.note.empty()) j["note"] = c.note;
            j["config_digest"] = cfg.digest_hex();
            j["seed"] = cfg.seed;
            payload += j.dump() + "\n";
        }
        ordered_json s;
        s["op"] = "verify";
        s["suite"] = r.suite;
        s["criterion"] = r.criterion;
        s["pass"] = r.pass;
        s["checks"] = r.checks.size();
        s["seconds"] = r.seconds;
        s["config_digest"] = cfg.digest_hex();
        s["seed"] = cfg.seed;
        payload += s.dump() + "\n";
        all_pass = all_pass && r.pass;
    }
    std::fputs(payload.c_str(), stdout);
    write_out(out_file, payload);
    return all_pass ? 0 : 2;
}

std::string render_table_palpha(const RunConfig& cfg, double alpha, int npts) {
    const GroupConfig g(cfg.n);
    auto tab = palpha_sphere_shared(g, alpha, 257, radial_options(cfg));
    const double pi = 3.14159265358979323846;
    std::string out;
    if (cfg.format == "csv") {
        char head[160];
        std::snprintf(head, sizeof(head),
                      "# op=table kind=palpha alpha=%.17g n=%d config=%s seed=%llu\n",
                      alpha, cfg.n, cfg.digest_hex().c_str(),
                      static_cast<unsigned long long>(cfg.seed));
        out += head;
        out += "beta,p_alpha\n";
        for (int k = 0; k < npts; ++k) {
            const double beta = -pi / 2 + pi * k / (npts - 1.0);
            char line[80];
            std::snprintf(line, sizeof(line), "%.17g,%.17g\n", beta,
                          tab->at_beta(beta));
            out += line;
        }
    } else {
        for (int k = 0; k < npts; ++k) {
            const double beta = -pi / 2 + pi * k / (npts - 1.0);
            ordered_json j;
            j["op"] = "table";
            j["kind"] = "palpha";
            j["alpha"] = alpha;
            j["beta"] = beta;
            j["p_alpha"] = tab->at_beta(beta);
            j["config_digest"] = cfg.digest_hex();
            j["seed"] = cfg.seed;
            out += j.dump() + "\n";
        }
    }
    return out;
}

std::string render_table_psi(const RunConfig& cfg, const std::string& phi_dsl,
                             const std::string& point_str, double a0, double a1,
                             double step) {
    const GroupConfig g(cfg.n);
    const TestFunctionPtr phi = parse_testfun(g, phi_dsl);
    const Point x = parse_point(g, point_str);
    const PsiOptions opt = psi_options(cfg);
    if (!(step > 0)) throw std::invalid_argument("--alpha-step must be positive");
    const int rows = static_cast<int>(std::floor((a1 - a0) / step + 1e-9)) + 1;
    if (rows < 1 || rows > 200)
        throw std::invalid_argument("table psi: sweep must have 1..200 rows");
    std::string out;
    if (cfg.format == "csv") {
        char head[256];
        std::snprintf(head, sizeof(head),
                      "# op=table kind=psi phi=%s point=%s n=%d config=%s seed=%llu\n",
                      phi->descriptor().c_str(), point_str.c_str(), cfg.n,
                      cfg.digest_hex().c_str(),
                      static_cast<unsigned long long>(cfg.seed));
        out += head;
        out += "alpha,value,err,route\n";
    }
    for (int k = 0; k < rows; ++k) {
        const double alpha = a0 + k * step;
        const PsiResult p = psi_eval(g, *phi, x, alpha, opt);
        if (cfg.format == "csv") {
            char line[160];
            std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%s\n", alpha,
                          p.value, p.std_error, p.route.c_str());
            out += line;
        } else {
            ordered_json j;
            j["op"] = "table";
            j["kind"] = "psi";
            j["phi"] = phi->descriptor();
            j["point"] = point_json(x);
            j["alpha"] = alpha;
            j["value"] = p.value;
            j["err"] = p.std_error;
            j["route"] = p.route;
            j["config_digest"] = cfg.digest_hex();
            j["seed"] = cfg.seed;
            out += j.dump() + "\n";
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "subfrac: fractional powers of the sub-Laplacian on the Heisenberg "
        "group (heat kernel, Riesz-type kernels, analytic continuation)"};
    app.require_subcommand(1);

    // Global configuration flags (CLI > SUBFRAC_* env > --config file > default).
    std::string f_config, f_n, f_seed, f_paths, f_steps, f_nodes, f_tol, f_rho,
        f_cache, f_format, f_out;
    bool f_force = false;
    auto* o_config = app.add_option("--config", f_config, "key=value config file");
    auto* o_n = app.add_option("--n", f_n, "group index n (points have 2n+1 coords)");
    auto* o_seed = app.add_option("--seed", f_seed, "RNG seed");
    auto* o_paths = app.add_option("--paths", f_paths, "Monte Carlo paths");
    auto* o_steps = app.add_option("--steps", f_steps, "diffusion time steps");
    auto* o_nodes = app.add_option("--quad-nodes", f_nodes, "Gauss nodes per panel");
    auto* o_tol = app.add_option("--quad-tol", f_tol, "quadrature relative tolerance");
    auto* o_rho = app.add_option("--rho-max", f_rho, "volume-grid radial cutoff");
    auto* o_cache = app.add_option("--cache-dir", f_cache,
                                   "result cache directory (empty = disabled)");
    auto* o_format = app.add_option("--format", f_format, "table format: json|csv");
    app.add_option("--out", f_out, "also write the report to this file");
    app.add_flag("--force", f_force, "lift the n>2 cost guard");

    // hk
    auto* hk = app.add_subcommand("hk", "heat kernel");
    hk->require_subcommand(1);
    hk->fallthrough();
    double hk_t = 1.0;
    std::string hk_point = "0,0,0";
    auto* hk_eval_cmd = hk->add_subcommand("eval", "pointwise h(t, x)");
    hk_eval_cmd->fallthrough();
    hk_eval_cmd->add_option("--t", hk_t, "time")->required();
    hk_eval_cmd->add_option("--point", hk_point, "comma-separated coordinates")
        ->required();
    std::string hkm_gamma;
    double hkm_t = 1.0;
    auto* hk_moment_cmd =
        hk->add_subcommand("moment", "Monte Carlo heat-kernel moment E[y^gamma]");
    hk_moment_cmd->fallthrough();
    hk_moment_cmd->add_option("--gamma", hkm_gamma, "comma-separated exponents")
        ->required();
    hk_moment_cmd->add_option("--t", hkm_t, "time");

    // ccnorm
    auto* cc = app.add_subcommand("ccnorm", "Carnot-Caratheodory norm");
    cc->require_subcommand(1);
    cc->fallthrough();
    std::string cc_point;
    auto* cc_eval_cmd = cc->add_subcommand("eval", "||x||_c from the identity");
    cc_eval_cmd->fallthrough();
    cc_eval_cmd->add_option("--point", cc_point, "comma-separated coordinates")
        ->required();

    // riesz
    auto* rz = app.add_subcommand("riesz", "Riesz-type kernels and spectral scalars");
    rz->require_subcommand(1);
    rz->fallthrough();
    double rz_alpha = 0.0, rz_a = 1.0, rz_b = 1.0;
    int rz_i = 1;
    std::string rz_point, rz_gamma;
    auto* rz_palpha = rz->add_subcommand("palpha", "P_alpha(x)");
    rz_palpha->fallthrough();
    rz_palpha->add_option("--alpha", rz_alpha)->required();
    rz_palpha->add_option("--point", rz_point)->required();
    auto* rz_sigma = rz->add_subcommand("sigma", "sigma(alpha)");
    rz_sigma->fallthrough();
    rz_sigma->add_option("--alpha", rz_alpha)->required();
    auto* rz_dalpha = rz->add_subcommand("dalpha", "d(alpha)");
    rz_dalpha->fallthrough();
    rz_dalpha->add_option("--alpha", rz_alpha)->required();
    rz_dalpha->add_option("--i", rz_i, "horizontal coordinate index (1-based)");
    auto* rz_bmom = rz->add_subcommand("bmoment", "boundary moment B(gamma, alpha)");
    rz_bmom->fallthrough();
    rz_bmom->add_option("--alpha", rz_alpha)->required();
    rz_bmom->add_option("--gamma", rz_gamma)->required();
    auto* rz_conv = rz->add_subcommand("conv", "convolution audit P_a * P_b = P_{a+b}");
    rz_conv->fallthrough();
    rz_conv->add_option("--a", rz_a)->required();
    rz_conv->add_option("--b", rz_b)->required();
    rz_conv->add_option("--point", rz_point)->required();

    // psi
    auto* ps = app.add_subcommand("psi", "analytic continuation psi(x, alpha)");
    ps->require_subcommand(1);
    ps->fallthrough();
    double ps_alpha = 0.0;
    std::string ps_phi, ps_point, ps_route = "auto";
    auto* ps_eval_cmd = ps->add_subcommand("eval", "psi(x, alpha) for a test function");
    ps_eval_cmd->fallthrough();
    ps_eval_cmd->add_option("--alpha", ps_alpha)->required();
    ps_eval_cmd->add_option("--phi", ps_phi, "test-function DSL")->required();
    ps_eval_cmd->add_option("--point", ps_point)->required();
    ps_eval_cmd->add_option("--route", ps_route, "auto|spatial|time|pole");

    // fraclap
    auto* fl = app.add_subcommand("fraclap", "fractional power L^s");
    fl->require_subcommand(1);
    fl->fallthrough();
    double fl_s = 0.5;
    std::string fl_phi, fl_point;
    auto* fl_apply_cmd = fl->add_subcommand("apply", "L^s phi (x)");
    fl_apply_cmd->fallthrough();
    fl_apply_cmd->add_option("--s", fl_s)->required();
    fl_apply_cmd->add_option("--phi", fl_phi, "test-function DSL")->required();
    fl_apply_cmd->add_option("--point", fl_point)->required();

    // verify
    auto* vf = app.add_subcommand("verify", "run a verification suite");
    vf->fallthrough();
    std::string vf_suite;
    vf->add_option("suite", vf_suite, "suite name or 'all'")->required();

    // table
    auto* tb = app.add_subcommand("table", "tabulate a profile or a sweep");
    tb->fallthrough();
    std::string tb_kind, tb_phi, tb_point;
    double tb_alpha = 1.0, tb_a0 = -1.0, tb_a1 = 1.0, tb_step = 0.5;
    int tb_npts = 65;
    tb->add_option("--kind", tb_kind, "palpha | psi")->required();
    tb->add_option("--alpha", tb_alpha, "palpha: table alpha");
    tb->add_option("--beta-points", tb_npts, "palpha: row count");
    tb->add_option("--phi", tb_phi, "psi: test-function DSL");
    tb->add_option("--point", tb_point, "psi: evaluation point");
    tb->add_option("--alpha-min", tb_a0, "psi: sweep start");
    tb->add_option("--alpha-max", tb_a1, "psi: sweep end");
    tb->add_option("--alpha-step", tb_step, "psi: sweep step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = load_config(f_config);
        if (o_n->count()) config_apply(cfg, "n", f_n);
        if (o_seed->count()) config_apply(cfg, "seed", f_seed);
        if (o_paths->count()) config_apply(cfg, "paths", f_paths);
        if (o_steps->count()) config_apply(cfg, "steps", f_steps);
        if (o_nodes->count()) config_apply(cfg, "quad_nodes", f_nodes);
        if (o_tol->count()) config_apply(cfg, "quad_tol", f_tol);
        if (o_rho->count()) config_apply(cfg, "quad_rho_max", f_rho);
        if (o_cache->count()) config_apply(cfg, "cache_dir", f_cache);
        if (o_format->count()) config_apply(cfg, "format", f_format);
        if (f_force) cfg.force = true;
        (void)o_config;

        const GroupConfig g(cfg.n);

        if (hk_eval_cmd->parsed()) {
            const Point x = parse_point(g, hk_point);
            const HkOptions opt = hk_options(cfg);
            ordered_json params;
            params["n"] = cfg.n;
            params["t"] = hk_t;
            params["point"] = point_json(x);
            return run_cached(cfg, f_out, "hk eval", params, [&] {
                const double v = hk_eval(g, hk_t, x, opt);
                return value_record(cfg, "hk eval", params, v,
                                    std::abs(v) * opt.eps_rel * 100.0);
            });
        }

        if (hk_moment_cmd->parsed()) {
            if (!cost_guard(cfg)) return 1;
            const std::vector<int> gamma = parse_gamma(g, hkm_gamma);
            ordered_json params;
            params["n"] = cfg.n;
            params["gamma"] = gamma;
            params["t"] = hkm_t;
            params["paths"] = cfg.paths;
            params["steps"] = cfg.steps;
            return run_cached(cfg, f_out, "hk moment", params, [&] {
                const MomentResult m = hk_moment_mc(g, gamma, hkm_t, sampler_spec(cfg));
                return value_record(
                    cfg, "hk moment", params, m.value, m.std_error,
                    {{"symmetry_zero", ordered_json(m.symmetry_zero)}});
            });
        }

        if (cc_eval_cmd->parsed()) {
            const Point x = parse_point(g, cc_point);
            ordered_json params;
            params["n"] = cfg.n;
            params["point"] = point_json(x);
            return run_cached(cfg, f_out, "ccnorm eval", params, [&] {
                const double v = cc_norm(g, x);
                return value_record(cfg, "ccnorm eval", params, v,
                                    std::abs(v) * 1e-12);
            });
        }

        if (rz_palpha->parsed()) {
            const Point x = parse_point(g, rz_point);
            const RadialOptions opt = radial_options(cfg);
            ordered_json params;
            params["n"] = cfg.n;
            params["alpha"] = rz_alpha;
            params["point"] = point_json(x);
            return run_cached(cfg, f_out, "riesz palpha", params, [&] {
                const double v = p_alpha(g, rz_alpha, x, opt);
                return value_record(cfg, "riesz palpha", params, v,
                                    std::abs(v) * opt.eps_rel * 100.0);
            });
        }

        if (rz_sigma->parsed() || rz_dalpha->parsed() || rz_bmom->parsed()) {
            if (!cost_guard(cfg)) return 1;
            std::string op;
            ordered_json params;
            params["n"] = cfg.n;
            params["alpha"] = rz_alpha;
            std::vector<int> gamma;
            if (rz_sigma->parsed()) {
                op = "riesz sigma";
            } else if (rz_dalpha->parsed()) {
                op = "riesz dalpha";
                if (rz_i < 1 || rz_i > g.hdim())
                    throw std::invalid_argument("--i must be in 1.." +
                                                std::to_string(g.hdim()));
                params["i"] = rz_i;
            } else {
                op = "riesz bmoment";
                gamma = parse_gamma(g, rz_gamma);
                params["gamma"] = gamma;
            }
            const bool quad = (cfg.n == 1);
            params["backend"] = quad ? "quadrature" : "mc";
            if (!quad) {
                params["paths"] = cfg.paths;
                params["steps"] = cfg.steps;
            }
            return run_cached(cfg, f_out, op, params, [&] {
                SpectralResult res;
                if (quad) {
                    auto grid = GaugePolarGrid::shared(g, grid_options(cfg));
                    if (rz_sigma->parsed())
                        res = sigma_quad(g, rz_alpha, *grid);
                    else if (rz_dalpha->parsed())
                        res = d_alpha_quad(g, rz_alpha, rz_i - 1, *grid);
                    else
                        res = boundary_moment_quad(g, gamma, rz_alpha, *grid);
                } else {
                    SamplerSpec spec = sampler_spec(cfg);
                    spec.t = 1.0;
                    const std::vector<Point> cloud = sample_cloud(g, spec);
                    if (rz_sigma->parsed())
                        res = sigma_mc(g, rz_alpha, cloud);
                    else if (rz_dalpha->parsed())
                        res = d_alpha_mc(g, rz_alpha, rz_i - 1, cloud);
                    else
                        res = boundary_moment_mc(g, gamma, rz_alpha, cloud);
                }
                return value_record(cfg, op, params, res.value, res.std_error,
                                    {{"backend", ordered_json(res.backend)}});
            });
        }

        if (rz_conv->parsed()) {
            if (!cost_guard(cfg)) return 1;
            if (cfg.n != 1)
                throw std::invalid_argument("riesz conv: implemented for n=1");
            const Point x = parse_point(g, rz_point);
            ordered_json params;
            params["n"] = cfg.n;
            params["a"] = rz_a;
            params["b"] = rz_b;
            params["point"] = point_json(x);
            params["samples"] = cfg.paths;
            return run_cached(cfg, f_out, "riesz conv", params, [&] {
                ConvOptions co;
                co.samples = cfg.paths;
                co.seed = cfg.seed;
                co.radial = radial_options(cfg);
                const ConvResult cr = convolution_check(g, rz_a, rz_b, x, co);
                return value_record(cfg, "riesz conv", params, cr.rhs, cr.rhs_err,
                                    {{"lhs", ordered_json(cr.lhs)},
                                     {"rel_gap", ordered_json(cr.rel_gap)}});
            });
        }

        if (ps_eval_cmd->parsed()) {
            if (!cost_guard(cfg)) return 1;
            const TestFunctionPtr phi = parse_testfun(g, ps_phi);
            const Point x = parse_point(g, ps_point);
            ordered_json params;
            params["n"] = cfg.n;
            params["alpha"] = ps_alpha;
            params["phi"] = phi->descriptor();
            params["point"] = point_json(x);
            params["route"] = ps_route;
            return run_cached(cfg, f_out, "psi eval", params, [&] {
                const PsiResult p =
                    psi_eval(g, *phi, x, ps_alpha, psi_options(cfg), ps_route);
                return value_record(
                    cfg, "psi eval", params, p.value, p.std_error,
                    {{"route", ordered_json(p.route)},
                     {"near_pole_correction", ordered_json(p.near_pole_correction)}});
            });
        }

        if (fl_apply_cmd->parsed()) {
            if (!cost_guard(cfg)) return 1;
            const TestFunctionPtr phi = parse_testfun(g, fl_phi);
            const Point x = parse_point(g, fl_point);
            ordered_json params;
            params["n"] = cfg.n;
            params["s"] = fl_s;
            params["phi"] = phi->descriptor();
            params["point"] = point_json(x);
            return run_cached(cfg, f_out, "fraclap apply", params, [&] {
                const PsiResult p = frac_power(g, *phi, fl_s, x, psi_options(cfg));
                return value_record(cfg, "fraclap apply", params, p.value,
                                    p.std_error, {{"route", ordered_json(p.route)}});
            });
        }

        if (vf->parsed()) {
            if (!cost_guard(cfg)) return 1;
            return cmd_verify(cfg, vf_suite, f_out);
        }

        if (tb->parsed()) {
            if (!cost_guard(cfg)) return 1;
            ordered_json params;
            params["n"] = cfg.n;
            params["kind"] = tb_kind;
            params["format"] = cfg.format;
            if (tb_kind == "palpha") {
                if (tb_npts < 2 || tb_npts > 100000)
                    throw std::invalid_argument("--beta-points must be in 2..100000");
                params["alpha"] = tb_alpha;
                params["beta_points"] = tb_npts;
                return run_cached(cfg, f_out, "table", params, [&] {
                    return render_table_palpha(cfg, tb_alpha, tb_npts);
                });
            }
            if (tb_kind == "psi") {
                if (tb_phi.empty() || tb_point.empty())
                    throw std::invalid_argument("table psi requires --phi and --point");
                params["phi"] = parse_testfun(g, tb_phi)->descriptor();
                params["point"] = tb_point;
                params["alpha_min"] = tb_a0;
                params["alpha_max"] = tb_a1;
                params["alpha_step"] = tb_step;
                return run_cached(cfg, f_out, "table", params, [&] {
                    return render_table_psi(cfg, tb_phi, tb_point, tb_a0, tb_a1,
                                            tb_step);
                });
            }
            throw std::invalid_argument("--kind must be palpha or psi");
        }

        std::cerr << "error: no command executed\n";
        return 1;
    } catch (const DslError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
