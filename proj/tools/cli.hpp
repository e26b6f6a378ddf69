#pragma once

// Command-line front end. run() is the whole program; main() only forwards
// argv and the standard streams so tests can drive it in-process.
//
// Exit codes: 0 success, 1 domain/range/pole error, 2 accuracy or
// convergence error (including a lost sweep track or a failed self-test),
// 64 usage error.

#include <qhybrid/qhybrid.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace qhybrid::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_domain = 1;
inline constexpr int exit_accuracy = 2;
inline constexpr int exit_usage = 64;

class help_request : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Values and tables

/// 17 significant digits, enough to round-trip a double.
inline std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

inline std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c))
        return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c))
        return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c))
        return *b ? "1" : "0";
    return std::get<std::string>(c);
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        out += (i ? "," : "") + t.header[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + cell_text(row[i]);
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c))
        return std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
    if (const auto* i = std::get_if<long long>(&c))
        return *i;
    if (const auto* b = std::get_if<bool>(&c))
        return *b;
    return std::get<std::string>(c);
}

// ---------------------------------------------------------------------------
// Settings: every option is kept as the text it was given, so a JSON echo
// read back as a config reproduces the run exactly.

using Settings = std::map<std::string, std::string>;

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<std::pair<std::string, std::string>> options;  // key, help
};

inline const std::vector<std::pair<std::string, std::string>>& common_options() {
    static const std::vector<std::pair<std::string, std::string>> opts{
        {"beta", "wedge parameter in [1/2, 1) (a grid start:stop:step for sweep-beta)"},
        {"alpha", "wedge extension parameter"},
        {"gamma", "lead parameter"},
        {"eps", "coupling >= 0 (a grid for sweep-eps)"},
        {"format", "csv or json"},
        {"output", "output path, default stdout"},
        {"threads", "worker threads (default: QHYBRID_THREADS or hardware)"},
    };
    return opts;
}

inline const std::vector<CommandSpec>& command_specs() {
    static const std::vector<CommandSpec> specs{
        {"spectrum", "point and discrete spectrum with tags",
         {{"emax", "energy ceiling (default min(350, j_{6,beta}^2))"},
          {"lambda-min", "lower end of the negative search window (default -100)"}}},
        {"resonances", "resonance poles r_m for m = m .. m+count-1",
         {{"m", "first parent index (default 1)"},
          {"count", "number of consecutive indices (default 1)"},
          {"method", "auto, fixed-point, newton or perturbative (default auto)"}}},
        {"sweep-eps", "track r_m along an eps grid", {{"m", "parent index (default 1)"}}},
        {"sweep-beta", "r_m at fixed eps along a beta grid", {{"m", "parent index (default 1)"}}},
        {"scatter", "S-matrix entry and reflection amplitude on a k grid", {{"k", "momentum grid"}}},
        {"kernel", "hybrid resolvent kernel blocks",
         {{"z-re", "Re z"},
          {"z-im", "Im z"},
          {"x", "lead target"},
          {"y", "lead source"},
          {"p", "wedge target r,theta"},
          {"q", "wedge source r,theta"},
          {"mode-tol", "tail tolerance of the Friedrichs sum (default 1e-10)"}}},
        {"selftest", "closed-form oracle checks", {{"samples", "unitarity samples (default 10000)"}}},
    };
    return specs;
}

inline const CommandSpec& find_command(const std::string& name) {
    for (const auto& c : command_specs())
        if (c.name == name)
            return c;
    throw usage_error("unknown command '" + name + "'");
}

inline bool known_key(const CommandSpec& spec, const std::string& key) {
    for (const auto& [k, h] : common_options())
        if (k == key)
            return true;
    for (const auto& [k, h] : spec.options)
        if (k == key)
            return true;
    return false;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// key=value lines (# comments), or a JSON object whose "config" member (or
/// the object itself) holds the keys.
inline Settings read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw usage_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    Settings out;
    if (trim(text).starts_with("{")) {
        nlohmann::ordered_json doc;
        try {
            doc = nlohmann::ordered_json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw usage_error("config '" + path + "': " + e.what());
        }
        const auto& cfg = doc.contains("config") ? doc.at("config") : doc;
        if (!cfg.is_object())
            throw usage_error("config '" + path + "': expected an object");
        for (const auto& [k, v] : cfg.items()) {
            if (v.is_string())
                out[k] = v.get<std::string>();
            else if (v.is_number())
                out[k] = format_double(v.get<double>());
            else
                throw usage_error("config '" + path + "': value of '" + k + "' must be a string or number");
        }
        return out;
    }
    std::string line;
    int lineno = 0;
    std::istringstream lines(text);
    while (std::getline(lines, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw usage_error("config '" + path + "' line " + std::to_string(lineno) + ": expected key=value");
        out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Typed access

inline double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw usage_error("--" + key + ": '" + text + "' is not a number");
    }
}

inline int parse_int(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw usage_error("--" + key + ": '" + text + "' is not an integer");
    }
}

/// start:stop:step (inclusive of stop up to rounding), a comma list, or a single value.
inline std::vector<double> parse_grid(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ':'))
            parts.push_back(part);
        if (parts.size() != 3)
            throw usage_error("--" + key + ": grid must be start:stop:step");
        const double a = parse_double(key, parts[0]);
        const double b = parse_double(key, parts[1]);
        const double h = parse_double(key, parts[2]);
        if (!(h > 0.0) || !(b >= a))
            throw usage_error("--" + key + ": need step > 0 and stop >= start");
        const auto n = static_cast<long long>(std::floor((b - a) / h + 1e-9));
        if (n > 10000000)
            throw usage_error("--" + key + ": grid too large");
        for (long long i = 0; i <= n; ++i)
            out.push_back(a + static_cast<double>(i) * h);
    } else {
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ','))
            out.push_back(parse_double(key, trim(part)));
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1]))
            throw usage_error("--" + key + ": grid must be strictly increasing");
    if (out.empty())
        throw usage_error("--" + key + ": empty grid");
    return out;
}

struct Args {
    std::string command;
    Settings values;

    bool has(const std::string& k) const { return values.count(k) != 0; }
    const std::string& text(const std::string& k) const {
        auto it = values.find(k);
        if (it == values.end())
            throw usage_error("missing required option --" + k);
        return it->second;
    }
    double num(const std::string& k) const { return parse_double(k, text(k)); }
    double num(const std::string& k, double fallback) const { return has(k) ? num(k) : fallback; }
    int integer(const std::string& k, int fallback) const { return has(k) ? parse_int(k, text(k)) : fallback; }
    std::vector<double> grid(const std::string& k) const { return parse_grid(k, text(k)); }
};

inline unsigned thread_count(const Args& a) {
    if (a.has("threads")) {
        const int t = parse_int("threads", a.text("threads"));
        if (t < 1)
            throw usage_error("--threads must be positive");
        return static_cast<unsigned>(t);
    }
    if (const char* env = std::getenv("QHYBRID_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t >= 1)
                return static_cast<unsigned>(t);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline WedgeGeometry geometry(const Args& a) { return WedgeGeometry(a.num("beta")); }

inline CouplingMatrix coupling(const Args& a, double eps) {
    return CouplingMatrix(a.num("alpha", 0.0), a.num("gamma", 0.0), eps);
}

inline WedgePoint parse_point(const std::string& key, const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw usage_error("--" + key + ": expected r,theta");
    return {parse_double(key, trim(text.substr(0, comma))), parse_double(key, trim(text.substr(comma + 1)))};
}

// ---------------------------------------------------------------------------
// Commands. Each returns a table and an exit status (nonzero for partial
// results such as a lost sweep track).

struct Outcome {
    Table table;
    int status = exit_ok;
    std::string warning;
};

inline Outcome cmd_spectrum(const Args& a) {
    const WedgeGeometry g = geometry(a);
    const CouplingMatrix th = coupling(a, a.num("eps", 0.0));
    const double emax = a.num("emax", default_emax(g));
    const double lmin = a.num("lambda-min", -100.0);
    const SpectrumReport rep = classify_spectrum(g, th, emax, lmin);
    Outcome out;
    out.table.header = {"lambda", "tag", "m", "n", "residual", "exact_zero"};
    for (const auto& p : rep.point)
        out.table.rows.push_back({p.lambda, std::string(to_string(p.tag)), static_cast<long long>(p.m),
                                  static_cast<long long>(p.n), p.residual, p.exact_zero});
    return out;
}

inline Outcome cmd_resonances(const Args& a) {
    const WedgeGeometry g = geometry(a);
    const CouplingMatrix th = coupling(a, a.num("eps", 0.0));
    const int m0 = a.integer("m", 1);
    const int count = a.integer("count", 1);
    if (m0 < 1 || count < 1)
        throw usage_error("--m and --count must be positive");
    const std::string method = a.has("method") ? a.text("method") : "auto";
    if (method != "auto" && method != "fixed-point" && method != "newton" && method != "perturbative")
        throw usage_error("--method must be auto, fixed-point, newton or perturbative");
    std::vector<Resonance> res(static_cast<std::size_t>(count));
    parallel_for(res.size(), thread_count(a), [&](std::size_t i) {
        const int m = m0 + static_cast<int>(i);
        if (method == "fixed-point") {
            res[i] = resonance_fixed_point(g, th, m);
        } else if (method == "perturbative") {
            res[i] = resonance_perturbative(g, th, m);
        } else if (method == "newton") {
            const Resonance p = resonance_perturbative(g, th, m);
            res[i] = resonance_newton(g, th, p.z);
            res[i].m = m;
        } else {
            res[i] = locate_resonance(g, th, m);
        }
    });
    Outcome out;
    out.table.header = {"m", "eps", "re_z", "im_z", "method", "iterations", "residual"};
    for (const auto& r : res)
        out.table.rows.push_back({static_cast<long long>(r.m), r.eps, r.z.real(), r.z.imag(),
                                  std::string(to_string(r.method)), static_cast<long long>(r.iterations),
                                  r.residual});
    return out;
}

inline Table sweep_table(const SweepResult& s) {
    Table t;
    t.header = {"param", "re_z", "im_z", "method", "residual"};
    for (const auto& r : s.rows)
        t.rows.push_back({r.param, r.z.real(), r.z.imag(), std::string(r.error.empty() ? to_string(r.method) : "FAILED"),
                          r.residual});
    return t;
}

inline Outcome cmd_sweep_eps(const Args& a) {
    const WedgeGeometry g = geometry(a);
    const SweepResult s = sweep_eps(g, a.num("alpha", 0.0), a.num("gamma", 0.0), a.integer("m", 1), a.grid("eps"));
    Outcome out{sweep_table(s), exit_ok, s.warning};
    if (s.lost_at) {
        out.status = exit_accuracy;
        out.warning = "row " + std::to_string(*s.lost_at) + ": " + s.warning;
    }
    return out;
}

inline Outcome cmd_sweep_beta(const Args& a) {
    const SweepResult s = sweep_beta(a.num("alpha", 0.0), a.num("gamma", 0.0), a.num("eps"), a.integer("m", 1),
                                     a.grid("beta"), thread_count(a));
    Outcome out{sweep_table(s), exit_ok, s.warning};
    if (s.lost_at)
        out.status = exit_accuracy;
    return out;
}

inline Outcome cmd_scatter(const Args& a) {
    const WedgeGeometry g = geometry(a);
    const CouplingMatrix th = coupling(a, a.num("eps", 0.0));
    const auto recs = phase_scan(g, th, a.grid("k"));
    Outcome out;
    out.table.header = {"k",        "lambda",  "re_s11", "im_s11",          "re_refl",
                        "im_refl",  "phase",   "unwrapped_phase", "at_pole"};
    for (const auto& r : recs)
        out.table.rows.push_back({r.k, r.lambda, r.s11.real(), r.s11.imag(), r.refl.real(), r.refl.imag(), r.phase,
                                  r.unwrapped_phase, r.at_pole});
    return out;
}

inline Outcome cmd_kernel(const Args& a) {
    const WedgeGeometry g = geometry(a);
    const CouplingMatrix th = coupling(a, a.num("eps", 0.0));
    KernelRequest req;
    req.z = {a.num("z-re"), a.num("z-im", 0.0)};
    if (a.has("x"))
        req.x = a.num("x");
    if (a.has("y"))
        req.y = a.num("y");
    if (a.has("p"))
        req.p = parse_point("p", a.text("p"));
    if (a.has("q"))
        req.q = parse_point("q", a.text("q"));
    req.modes.mode_tol = a.num("mode-tol", req.modes.mode_tol);
    const HybridKernel k = resolvent_hybrid(g, th, req);
    Outcome out;
    out.table.header = {"block", "re", "im", "estimate"};
    auto add = [&](const char* name, const std::optional<std::complex<double>>& v, double est) {
        if (v)
            out.table.rows.push_back({std::string(name), v->real(), v->imag(), est});
    };
    add("lead_lead", k.lead_lead, 0.0);
    add("lead_wedge", k.lead_wedge, 0.0);
    add("wedge_lead", k.wedge_lead, 0.0);
    add("wedge_wedge", k.wedge_wedge, k.estimate);
    if (out.table.rows.empty())
        throw usage_error("kernel: give --x/--y and/or --p/--q");
    return out;
}

// ---------------------------------------------------------------------------
// Self-test: closed forms that need no second implementation.

struct Check {
    std::string name;
    double residual;
    double tol;
    std::string note;
};

inline std::vector<Check> selftest_checks(int samples) {
    std::vector<Check> out;
    const double pi = std::numbers::pi;
    {
        // β = 1/2: Q = −√λ cot √λ for λ > 0, −√|λ| coth √|λ| for λ < 0.
        const WedgeGeometry g(0.5);
        double worst = 0.0;
        for (int i = 1; i <= 200; ++i) {
            const double lam = -300.0 + 600.0 * i / 201.0;
            const double s = std::sqrt(std::abs(lam));
            if (lam > 0.0 && std::abs(std::sin(s)) < 1e-2)
                continue;
            const double exact = lam > 0.0 ? -s / std::tan(s) : -s / std::tanh(s);
            worst = std::max(worst, std::abs(q_wedge(g, lam) - exact) / std::max(1.0, std::abs(exact)));
        }
        out.push_back({"q_wedge beta=1/2 closed form", worst, 1e-10, "200 points on (-300, 300)"});
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 10; ++i)
            worst = std::max(worst, std::abs(q_wedge(WedgeGeometry(0.5 + 0.05 * i), 0.0) + 1.0));
        out.push_back({"Q_0 = -1", worst, 1e-12, "beta = 0.50 .. 0.95"});
    }
    {
        const WedgeGeometry g(0.5);
        const auto sa = sigma_alpha(g, 0.0, 240.0).all();
        double worst = sa.size() >= 5 ? 0.0 : 1.0;
        for (std::size_t k = 0; k < std::min<std::size_t>(5, sa.size()); ++k) {
            const double exact = pi * pi * (k + 0.5) * (k + 0.5);
            worst = std::max(worst, std::abs(sa[k].lambda - exact) / exact);
        }
        out.push_back({"Sigma_0 at beta=1/2 = pi^2 (k-1/2)^2", worst, 1e-10, "k = 1..5"});
    }
    {
        const WedgeGeometry g(0.7);
        const auto sa = sigma_alpha(g, 0.0, 300.0).all();
        const auto zeros = bessel_zeros(-0.7);
        double worst = 0.0;
        for (std::size_t k = 0; k < std::min(sa.size(), zeros.size()); ++k)
            worst = std::max(worst, std::abs(sa[k].lambda - zeros[k] * zeros[k]) / (zeros[k] * zeros[k]));
        out.push_back({"Sigma_0 at beta=0.7 = zeros of J_{-beta} squared", worst, 1e-8, ""});
    }
    {
        int bad = 0;
        for (double b : {0.5, 0.7, 0.9}) {
            const WedgeGeometry g(b);
            const auto zeros = bessel_zeros(b);
            for (double alpha : {-3.0, -1.0, 0.0, 2.0}) {
                const auto sa = sigma_alpha(g, alpha, zeros[4] * zeros[4]);
                for (const auto& p : sa.interlaced) {
                    const double lo = zeros[p.m - 1] * zeros[p.m - 1], hi = zeros[p.m] * zeros[p.m];
                    if (!(p.lambda > lo && p.lambda < hi))
                        ++bad;
                }
            }
        }
        out.push_back({"interlacing lambda_m in (j_m^2, j_{m+1}^2)", static_cast<double>(bad), 0.5, "violations"});
    }
    {
        std::mt19937_64 rng(20240601);
        std::uniform_real_distribution<double> ub(0.5, 0.999), ua(-5.0, 5.0), ug(-3.0, 3.0), ue(0.0, 2.0),
            uk(0.05, 17.0);
        double worst = 0.0;
        int used = 0;
        while (used < samples) {
            const WedgeGeometry g(ub(rng));
            const CouplingMatrix th(ua(rng), ug(rng), ue(rng));
            const double k = uk(rng);
            if (std::abs(tilde_j(g.beta(), k * k)) < 1e-6)
                continue;
            worst = std::max(worst, std::abs(std::abs(reflection(g, th, k)) - 1.0));
            ++used;
        }
        out.push_back({"unitarity |R(k)| = 1", worst, 1e-12, std::to_string(used) + " samples"});
    }
    {
        const auto rep = hybrid_discrete_spectrum(WedgeGeometry(0.5), CouplingMatrix(0.0, 1.0, 0.0));
        double r = 1.0;
        for (const auto& p : rep)
            r = std::min(r, std::abs(p.lambda + 1.0));
        out.push_back({"lead bound state -1 at gamma=1, eps=0", r, 1e-10, ""});
    }
    return out;
}

inline Outcome cmd_selftest(const Args& a) {
    const int samples = a.integer("samples", 10000);
    if (samples < 1)
        throw usage_error("--samples must be positive");
    Outcome out;
    out.table.header = {"check", "status", "residual", "tol", "note"};
    for (const auto& c : selftest_checks(samples)) {
        const bool pass = c.residual <= c.tol;
        if (!pass)
            out.status = exit_accuracy;
        out.table.rows.push_back({c.name, std::string(pass ? "PASS" : "FAIL"), c.residual, c.tol, c.note});
    }
    return out;
}

// ---------------------------------------------------------------------------

inline nlohmann::ordered_json config_echo(const Args& a) {
    nlohmann::ordered_json cfg;
    cfg["command"] = a.command;
    for (const auto& [k, v] : a.values)
        if (k != "output")
            cfg[k] = v;
    return cfg;
}

inline std::string render(const Args& a, const Table& t) {
    const std::string format = a.has("format") ? a.text("format") : "csv";
    if (format == "csv")
        return to_csv(t);
    nlohmann::ordered_json doc;
    doc["config"] = config_echo(a);
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i)
            obj[t.header[i]] = cell_json(row[i]);
        doc["rows"].push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
}

/// Parses argv into the command and its merged settings (flags over config).
inline Args parse_args(int argc, const char* const* argv) {
    CLI::App app{"Spectrum, resonances, scattering and Green's kernels of a half-line glued to a wedge vertex",
                 "qhybrid"};
    app.require_subcommand(1);
    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, std::string> config_path;
    for (const auto& spec : command_specs()) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        auto& store = raw[spec.name];
        for (const auto& [k, h] : common_options())
            sub->add_option("--" + k, store[k], h);
        for (const auto& [k, h] : spec.options)
            sub->add_option("--" + k, store[k], h);
        sub->add_option("--config", config_path[spec.name], "key=value or JSON config file");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        throw help_request(sub->help());
    } catch (const CLI::ParseError& e) {
        throw usage_error(std::string(e.what()) + "\n" + app.help());
    }
    Args out;
    CLI::App* sub = app.get_subcommands().front();
    out.command = sub->get_name();
    const CommandSpec& spec = find_command(out.command);
    for (const auto& [k, v] : raw[out.command])
        if (sub->count("--" + k) > 0)
            out.values[k] = v;
    if (sub->count("--config") > 0) {
        for (const auto& [k, v] : read_config(config_path[out.command])) {
            if (k == "command") {
                if (v != out.command)
                    throw usage_error("config is for command '" + v + "', not '" + out.command + "'");
                continue;
            }
            if (!known_key(spec, k))
                throw usage_error("config: unknown key '" + k + "' for " + out.command);
            out.values.emplace(k, v);
        }
    }
    if (out.has("format") && out.text("format") != "csv" && out.text("format") != "json")
        throw usage_error("--format must be csv or json");
    return out;
}

inline Outcome dispatch(const Args& a) {
    static const std::map<std::string, std::function<Outcome(const Args&)>> table{
        {"spectrum", cmd_spectrum},   {"resonances", cmd_resonances}, {"sweep-eps", cmd_sweep_eps},
        {"sweep-beta", cmd_sweep_beta}, {"scatter", cmd_scatter},     {"kernel", cmd_kernel},
        {"selftest", cmd_selftest},
    };
    return table.at(a.command)(a);
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        const Args a = parse_args(argc, argv);
        const Outcome o = dispatch(a);
        const std::string text = render(a, o.table);
        if (a.has("output")) {
            std::ofstream f(a.text("output"), std::ios::binary);
            if (!f)
                throw usage_error("cannot write '" + a.text("output") + "'");
            f << text;
        } else {
            out << text;
        }
        if (!o.warning.empty())
            err << "warning: " << o.warning << "\n";
        return o.status;
    } catch (const help_request& h) {
        out << h.what();
        return exit_ok;
    } catch (const usage_error& e) {
        err << e.what() << "\n";
        return exit_usage;
    } catch (const accuracy_error& e) {
        err << "accuracy error: " << e.what() << "\n";
        return exit_accuracy;
    } catch (const convergence_error& e) {
        err << "convergence error: " << e.what() << "\n";
        return exit_accuracy;
    } catch (const qhybrid::error& e) {
        err << "error: " << e.what() << "\n";
        return exit_domain;
    }
}

}  // namespace qhybrid::cli
