#include "mhd/harness.hpp"

#include "mhd/dynamics.hpp"
#include "mhd/identities.hpp"
#include "mhd/renorm.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#ifndef MHDLAB_VERSION
#define MHDLAB_VERSION "unknown"
#endif

namespace mhd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKinds = {"identities", "renorm", "simulate", "galerkin", "noise-stats"};
const std::set<std::string> kInitialKinds = {"zero", "single", "random", "file"};

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
    return s;
}

// typed reads that record a named problem instead of throwing
class Reader {
public:
    Reader(const json& j, std::string prefix, std::vector<std::string>& errs)
        : j_(j), prefix_(std::move(prefix)), errs_(errs) {}

    void num(const char* k, double& d) {
        if (auto* v = find(k)) {
            if (v->is_number()) d = v->get<double>();
            else bad(k, "a number");
        }
    }
    void integer(const char* k, int& d) {
        if (auto* v = find(k)) {
            if (v->is_number_integer()) d = v->get<int>();
            else bad(k, "an integer");
        }
    }
    void seed(const char* k, std::uint64_t& d) {
        if (auto* v = find(k)) {
            if (v->is_number_unsigned() || (v->is_number_integer() && v->get<long long>() >= 0))
                d = v->get<std::uint64_t>();
            else bad(k, "a nonnegative integer");
        }
    }
    void flag(const char* k, bool& d) {
        if (auto* v = find(k)) {
            if (v->is_boolean()) d = v->get<bool>();
            else bad(k, "a boolean");
        }
    }
    void str(const char* k, std::string& d) {
        if (auto* v = find(k)) {
            if (v->is_string()) d = v->get<std::string>();
            else bad(k, "a string");
        }
    }
    template <class T, class Pred>
    void list(const char* k, std::vector<T>& d, Pred ok, const char* what) {
        if (auto* v = find(k)) {
            if (!v->is_array()) return bad(k, what);
            std::vector<T> out;
            for (const auto& e : *v) {
                if (!ok(e)) return bad(k, what);
                out.push_back(e.template get<T>());
            }
            d = std::move(out);
        }
    }
    const json* find(const char* k) {
        seen_.insert(k);
        auto it = j_.find(k);
        return it == j_.end() ? nullptr : &*it;
    }
    void unknown_keys() {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) errs_.push_back("unknown key '" + prefix_ + it.key() + "'");
    }
    std::string name(const char* k) const { return prefix_ + k; }

private:
    void bad(const char* k, const char* what) { errs_.push_back("key '" + prefix_ + k + "' must be " + what); }
    const json& j_;
    std::string prefix_;
    std::vector<std::string>& errs_;
    std::set<std::string> seen_;
};

void read_initial(const json& j, const std::string& key, InitialSpec& s, std::vector<std::string>& errs) {
    if (!j.is_object()) {
        errs.push_back("key '" + key + "' must be an object");
        return;
    }
    Reader r(j, key + ".", errs);
    r.str("kind", s.kind);
    r.integer("k1", s.k1);
    r.integer("k2", s.k2);
    r.num("amp1", s.amp1);
    r.num("amp2", s.amp2);
    r.num("band", s.band);
    r.num("l2", s.l2);
    r.seed("seed", s.seed);
    r.str("path", s.path);
    r.unknown_keys();
    if (s.kind == "file" && !j.contains("path")) errs.push_back("missing required key '" + key + ".path'");
}

json initial_json(const InitialSpec& s) {
    return {{"kind", s.kind}, {"k1", s.k1},     {"k2", s.k2},     {"amp1", s.amp1}, {"amp2", s.amp2},
            {"band", s.band}, {"l2", s.l2},     {"seed", s.seed}, {"path", s.path}};
}

void check_initial(const InitialSpec& s, const std::string& key, int n, std::vector<std::string>& e) {
    if (!kInitialKinds.count(s.kind)) {
        e.push_back("key '" + key + ".kind' must be one of zero, single, random, file");
        return;
    }
    if (s.kind == "single") {
        if (s.k1 == 0 && s.k2 == 0) e.push_back("key '" + key + "': single mode must be nonzero");
        if (std::abs(s.k1) >= n / 2 || std::abs(s.k2) >= n / 2) e.push_back("key '" + key + "': mode outside the grid");
        if (s.k1 * s.amp1 + s.k2 * s.amp2 != 0) e.push_back("key '" + key + "': amplitude not divergence-free");
    }
    if (s.kind == "random") {
        if (!(s.l2 >= 0)) e.push_back("key '" + key + ".l2' must be >= 0");
        if (!(s.band > 0)) e.push_back("key '" + key + ".band' must be > 0");
    }
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& p) : std::runtime_error("invalid config: " + join(p)), problems(p) {}

std::vector<std::uint64_t> ExperimentConfig::seed_list() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> v;
    for (int i = 0; i < seed_count; ++i) v.push_back(seed + std::uint64_t(i));
    return v;
}

namespace {
void collect_violations(const ExperimentConfig& c, std::vector<std::string>& e) {
    if (c.kind.empty()) e.push_back("missing required key 'kind'");
    else if (!kKinds.count(c.kind))
        e.push_back("key 'kind' must be one of identities, renorm, simulate, galerkin, noise-stats");
    if (c.n < 8 || c.n % 2) e.push_back("key 'n' must be an even integer >= 8");
    if (!(c.nu > 0)) e.push_back("key 'nu' must be > 0");
    if (!(c.a >= 2.75 && c.a <= 3)) e.push_back("key 'a' must lie in [11/4, 3]");
    if (!(c.kappa > 0 && c.kappa < 0.5)) e.push_back("key 'kappa' must lie in (0, 1/2)");
    if (!(c.dt > 0)) e.push_back("key 'dt' must be > 0");
    if (!(c.t_final > 0)) e.push_back("key 't_final' must be > 0");
    if (!(c.lambda >= 1)) e.push_back("key 'lambda' must be >= 1");
    for (double l : c.lambdas)
        if (!(l >= 1)) e.push_back("key 'lambdas' entries must be >= 1");
    for (double t : c.times)
        if (!(t >= 0)) e.push_back("key 'times' entries must be >= 0");
    if (c.seed_count < 1) e.push_back("key 'seed_count' must be >= 1");
    if (c.samples < 1) e.push_back("key 'samples' must be >= 1");
    if (c.kind == "renorm" && c.samples < 100) e.push_back("key 'samples' must be >= 100 for renorm");
    if (c.kind == "noise-stats" && c.samples < 2) e.push_back("key 'samples' must be >= 2 for noise-stats");
    if (!(c.eps >= 0 && c.eps <= 0.5)) e.push_back("key 'eps' must lie in [0, 1/2]");
    if (c.levels.size() < 2) e.push_back("key 'levels' needs at least two entries");
    for (std::size_t i = 0; i + 1 < c.levels.size(); ++i)
        if (c.levels[i] < 1 || c.levels[i + 1] != 2 * c.levels[i]) {
            e.push_back("key 'levels' must double from one entry to the next");
            break;
        }
    for (int q : c.mode_sq) {
        bool found = false;
        for (int a = 1; a * a <= q && !found; ++a) {
            int b2 = q - a * a, b = int(std::lround(std::sqrt(double(b2))));
            found = b * b == b2 && a < c.n / 2 && b < c.n / 2;
        }
        if (!found) e.push_back("key 'mode_sq' entry " + std::to_string(q) + " is not |m|^2 of a grid mode");
    }
    if (c.diag_every < 1) e.push_back("key 'diag_every' must be >= 1");
    check_initial(c.initial_u, "initial_u", c.n, e);
    check_initial(c.initial_b, "initial_b", c.n, e);
}
}  // namespace

void validate(const ExperimentConfig& c) {
    std::vector<std::string> e;
    collect_violations(c, e);
    if (!e.empty()) throw ConfigError(e);
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ConfigError({std::string("not valid JSON: ") + ex.what()});
    }
    if (!j.is_object()) throw ConfigError({"top level must be a JSON object"});
    std::vector<std::string> errs;
    ExperimentConfig c;
    Reader r(j, "", errs);
    r.str("kind", c.kind);
    r.integer("n", c.n);
    r.num("nu", c.nu);
    r.num("a", c.a);
    r.num("kappa", c.kappa);
    r.num("dt", c.dt);
    r.num("t_final", c.t_final);
    r.num("lambda", c.lambda);
    auto is_num = [](const json& v) { return v.is_number(); };
    auto is_int = [](const json& v) { return v.is_number_integer(); };
    auto is_seed = [](const json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0); };
    r.list("lambdas", c.lambdas, is_num, "a list of numbers");
    r.list("times", c.times, is_num, "a list of numbers");
    r.seed("seed", c.seed);
    r.integer("seed_count", c.seed_count);
    r.list("seeds", c.seeds, is_seed, "a list of nonnegative integers");
    r.integer("samples", c.samples);
    r.num("eps", c.eps);
    r.flag("noise", c.noise);
    r.list("levels", c.levels, is_int, "a list of integers");
    r.list("mode_sq", c.mode_sq, is_int, "a list of integers");
    r.integer("diag_every", c.diag_every);
    r.flag("probe", c.probe);
    r.str("out", c.out);
    if (auto* v = r.find("initial_u")) read_initial(*v, "initial_u", c.initial_u, errs);
    if (auto* v = r.find("initial_b")) read_initial(*v, "initial_b", c.initial_b, errs);
    r.unknown_keys();
    collect_violations(c, errs);
    if (!errs.empty()) throw ConfigError(errs);
    return c;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read config file " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
    json j = {{"kind", c.kind},
              {"n", c.n},
              {"nu", c.nu},
              {"a", c.a},
              {"kappa", c.kappa},
              {"dt", c.dt},
              {"t_final", c.t_final},
              {"lambda", c.lambda},
              {"lambdas", c.lambdas},
              {"times", c.times},
              {"seed", c.seed},
              {"seed_count", c.seed_count},
              {"seeds", c.seeds},
              {"samples", c.samples},
              {"eps", c.eps},
              {"noise", c.noise},
              {"levels", c.levels},
              {"mode_sq", c.mode_sq},
              {"diag_every", c.diag_every},
              {"probe", c.probe},
              {"out", c.out},
              {"initial_u", initial_json(c.initial_u)},
              {"initial_b", initial_json(c.initial_b)}};
    return j.dump(2) + "\n";
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::string default_out_dir() {
    const char* e = std::getenv("MHDLAB_OUT");
    return e && *e ? std::string(e) : std::string("mhdlab_out");
}

std::string code_version() { return MHDLAB_VERSION; }

namespace {

class Output {
public:
    explicit Output(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
    void write(const std::string& name, const std::string& content) {
        std::ofstream f(fs::path(dir_) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (fs::path(dir_) / name).string());
        f << content;
        if (!f) throw std::runtime_error("write failed for " + name);
        names_.push_back(name);
    }
    void adopt(const std::string& name) { names_.push_back(name); }  // written by someone else
    const std::string& dir() const { return dir_; }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::string dir_;
    std::vector<std::string> names_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Vec2 initial_field(const Grid& g, const InitialSpec& s) {
    if (s.kind == "file") {
        int n = 0;
        auto comps = from_json_records(slurp(s.path), n);
        if (n != g.n || comps.size() != 2)
            throw std::runtime_error("initial data file " + s.path + " must hold two components on the run grid");
        Vec2 v{{comps[0], comps[1]}};
        if (div_residual(g, v) > 1e-12) throw std::runtime_error("initial data file " + s.path + " is not divergence-free");
        return v;
    }
    PerturbationSpec p;
    p.kind = s.kind;
    p.k1 = s.k1;
    p.k2 = s.k2;
    p.amp1 = s.amp1;
    p.amp2 = s.amp2;
    p.seed = s.seed;
    p.band = s.band;
    p.amplitude = s.l2;
    return perturbation_fields(g, p, PerturbationSpec{}).first;
}

SolverParams solver_params(const ExperimentConfig& c) {
    SolverParams p;
    p.nu = c.nu;
    p.a = c.a;
    p.kappa = c.kappa;
    p.dt = c.dt;
    p.noise = c.noise;
    p.probe = c.probe;
    return p;
}

std::array<int, 2> mode_for(int q) {
    // prefer the axis mode, else the first lattice point found
    for (int a = 1; a * a <= q; ++a) {
        int b2 = q - a * a, b = int(std::lround(std::sqrt(double(b2))));
        if (b * b == b2) return {a, b};
    }
    throw std::invalid_argument("no lattice mode with |m|^2 = " + std::to_string(q));
}

bool run_identities(const ExperimentConfig& c, Output& out, int threads, json& summary) {
    IdentitySuite s;
    s.n = c.n;
    s.seeds = c.seed_list();
    s.lambda = c.lambda;
    s.eps = c.eps;
    auto rows = run_identity_suite(s, threads);
    out.write("identities.csv", identity_csv(rows));
    std::set<std::string> failed;
    int nfail = 0;
    for (const auto& r : rows)
        if (!r.pass()) {
            ++nfail;
            failed.insert(r.id);
        }
    summary["rows"] = rows.size();
    summary["failed_rows"] = nfail;
    summary["failed_ids"] = failed;
    return nfail == 0;
}

bool run_renorm(const ExperimentConfig& c, Output& out, int threads, json& summary) {
    std::vector<double> lams = c.lambdas.empty() ? std::vector<double>{c.lambda} : c.lambdas;
    std::vector<double> times{c.t_final};
    for (double t : c.times) times.push_back(t);
    out.write("r_lambda.csv", r_lambda_csv(lams, times, c.nu));
    if (lams.size() >= 3) {
        // least squares of r against ln lambda at t_final
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, m = double(lams.size());
        for (double l : lams) {
            double x = std::log(l), y = r_lambda(l, c.t_final, c.nu);
            sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
        }
        double cxx = sxx - sx * sx / m, cxy = sxy - sx * sy / m, cyy = syy - sy * sy / m;
        double slope = cxy / cxx;
        summary["log_fit"] = {{"slope", slope}, {"intercept", (sy - slope * sx) / m},
                              {"r2", cyy > 0 ? cxy * cxy / (cxx * cyy) : 1.0}};
    }
    bool ok = true;
    std::uint64_t seed = c.seed_list().front();
    json per = json::array();
    for (double l : lams) {
        ChaosReport rep = chaos_diagnostics(c.samples, l, c.t_final, c.nu, c.n, seed, threads);
        std::string name = "chaos_lambda_" + fmt("%g", l) + ".json";
        out.write(name, rep.to_json() + "\n");
        per.push_back({{"lambda", l}, {"pass", rep.pass}});
        ok = ok && rep.pass;
    }
    summary["chaos"] = per;
    return ok;
}

struct SimOutcome {
    std::string diagnostics, ledger;
    bool ok = true;
    std::string error;
};

bool run_simulate(const ExperimentConfig& c, Output& out, int threads, json& summary) {
    Grid g(c.n);
    LPConfig lp(g);
    auto seeds = c.seed_list();
    std::vector<SimOutcome> res(seeds.size());
    std::vector<std::unique_ptr<SolverState>> finals(seeds.size());
    parallel_for(int(seeds.size()), threads, [&](int k) {
        SimOutcome& o = res[k];
        auto s = std::make_unique<SolverState>(g, solver_params(c), seeds[k]);
        std::string csv = diagnostics_csv_header();
        try {
            set_initial(*s, initial_field(g, c.initial_u), initial_field(g, c.initial_b));
            double sup = 0;
            auto row = [&] {
                DiagnosticsRow d = energy_report(lp, *s, sup);
                sup = d.grad_spec_sup;
                csv += diagnostics_csv_row(d);
            };
            row();
            const long nsteps = std::lround(c.t_final / c.dt);
            for (long it = 1; it <= nsteps; ++it) {
                step(*s);
                if (it % c.diag_every == 0 || it == nsteps) row();
            }
        } catch (const std::exception& ex) {
            o.ok = false;
            o.error = ex.what();
        }
        o.diagnostics = std::move(csv);
        o.ledger = ledger_dump(*s);
        finals[k] = std::move(s);
    });
    bool ok = true;
    json per = json::array();
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        std::string tag = "_s" + std::to_string(seeds[k]);
        out.write("diagnostics" + tag + ".csv", res[k].diagnostics);
        out.write("ledger" + tag + ".csv", res[k].ledger);
        if (res[k].ok) {
            save_checkpoint(*finals[k], (fs::path(out.dir()) / ("final" + tag)).string());
            out.adopt("final" + tag + ".json");
            out.adopt("final" + tag + ".bin");
        }
        per.push_back({{"seed", seeds[k]}, {"ok", res[k].ok}, {"error", res[k].error},
                       {"ledger_entries", finals[k]->ledger.size()}});
        ok = ok && res[k].ok;
    }
    summary["runs"] = per;
    return ok;
}

bool run_galerkin(const ExperimentConfig& c, Output& out, int threads, json& summary) {
    Grid g(c.n);
    auto seeds = c.seed_list();
    std::vector<GalerkinReport> reps(seeds.size());
    Vec2 u = initial_field(g, c.initial_u), b = initial_field(g, c.initial_b);
    parallel_for(int(seeds.size()), threads,
                 [&](int k) { reps[k] = galerkin_run(g, solver_params(c), seeds[k], u, b, c.t_final, c.levels); });
    bool ok = true;
    json per = json::array();
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        out.write("galerkin_s" + std::to_string(seeds[k]) + ".csv", reps[k].to_csv());
        per.push_back({{"seed", seeds[k]}, {"decreasing", reps[k].decreasing}, {"sup_l2", reps[k].sup_l2}});
        ok = ok && reps[k].decreasing;
    }
    summary["runs"] = per;
    return ok;
}

bool run_noise_stats(const ExperimentConfig& c, Output& out, int threads, json& summary) {
    std::vector<std::array<int, 2>> modes;
    for (int q : c.mode_sq) modes.push_back(mode_for(q));
    NoiseStats st = noise_statistics(c.samples, c.t_final, c.nu, c.n, modes, c.seed_list().front(), threads);
    out.write("noise_stats.json", st.to_json() + "\n");
    summary["pass"] = st.pass;
    return st.pass;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, const std::string& out_dir, int threads) {
    validate(c);
    Output out(out_dir);
    json summary;
    bool ok = false;
    if (c.kind == "identities") ok = run_identities(c, out, threads, summary);
    else if (c.kind == "renorm") ok = run_renorm(c, out, threads, summary);
    else if (c.kind == "simulate") ok = run_simulate(c, out, threads, summary);
    else if (c.kind == "galerkin") ok = run_galerkin(c, out, threads, summary);
    else ok = run_noise_stats(c, out, threads, summary);
    summary["ok"] = ok;
    out.write("summary.json", summary.dump(2) + "\n");

    std::string cfg = emit_config(c);
    out.write("config.json", cfg);
    json files = json::array();
    for (const auto& name : out.names()) {
        std::string bytes = slurp(fs::path(out.dir()) / name);
        files.push_back({{"path", name}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
    }
    json manifest = {{"kind", c.kind},       {"seeds", c.seed_list()}, {"config_sha256", sha256_hex(cfg)},
                     {"code_version", code_version()}, {"ok", ok},     {"files", files}};
    out.write("manifest.json", manifest.dump(2) + "\n");

    RunResult r;
    r.out_dir = out.dir();
    r.files = out.names();
    r.ok = ok;
    r.summary = summary.dump();
    return r;
}

}  // namespace mhd
