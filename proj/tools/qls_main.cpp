// Command-line front end: soliton profiles, potential slices, functional
// reports, the stability-slope criterion, kappa sweeps, time evolution and
// figure-data exports. CSV/JSON outputs plus a reproducibility manifest.
#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qls/branch.hpp"
#include "qls/criterion.hpp"
#include "qls/errors.hpp"
#include "qls/evolution.hpp"
#include "qls/functionals.hpp"
#include "qls/model.hpp"
#include "qls/potential.hpp"
#include "qls/profile.hpp"

using json = nlohmann::json;
using namespace qls;

namespace {

constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------- utilities

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string iso_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// RFC 4180 CSV: CRLF rows, '.' decimal, 17 significant digits
struct CsvWriter {
    std::ostringstream body;
    explicit CsvWriter(const std::vector<std::string>& header) { row_raw(header); }
    void row_raw(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) body << ',';
            body << cells[i];
        }
        body << "\r\n";
    }
    void row(const std::vector<double>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) body << ',';
            body << fmt17(cells[i]);
        }
        body << "\r\n";
    }
    std::string str() const { return body.str(); }
};

struct Manifest {
    bool enabled = false;
    std::string path;
    json j;
    void record_output(const std::string& file, const std::string& bytes) {
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016" PRIx64, fnv1a64(bytes));
        j["outputs"].push_back({{"path", file}, {"fnv1a64", hex}});
    }
    void flush() {
        if (!enabled) return;
        j["finished_utc"] = iso_utc_now();
        std::ofstream out(path, std::ios::binary);
        out << j.dump(2) << "\n";
    }
};

Manifest g_manifest;

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open output file: " + path);
    out << bytes;
    g_manifest.record_output(path, bytes);
}

// ------------------------------------------------------------ model parsing

struct ModelFlags {
    std::string model_json; // JSON text, or @file
    std::string case_id = "1";
    double r0 = 1.0;
    double kappa = 0.0;
    std::string f_expr, h_expr;
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
    cmd->add_option("--model", mf.model_json,
                    "model as a JSON descriptor (inline text or @file)");
    cmd->add_option("--case", mf.case_id, "builtin case: 1|2|3 (or custom)");
    cmd->add_option("--r0", mf.r0, "background amplitude");
    cmd->add_option("--kappa", mf.kappa, "quasilinear coupling");
    cmd->add_option("--f-expr", mf.f_expr, "custom f(s) expression");
    cmd->add_option("--h-expr", mf.h_expr, "custom h(s) expression");
}

NonlinearModel resolve_model(const ModelFlags& mf, json* descriptor) {
    if (!mf.model_json.empty()) {
        std::string text = mf.model_json;
        if (text[0] == '@') {
            std::ifstream in(text.substr(1));
            if (!in) throw validation_error("cannot read model file: " + text.substr(1));
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        if (descriptor) *descriptor = json::parse(text, nullptr, false);
        return model_from_json(text);
    }
    json d;
    d["r0"] = mf.r0;
    d["kappa"] = mf.kappa;
    NonlinearModel m;
    if (mf.case_id == "1" || mf.case_id == "GP1" || mf.case_id == "gp1") {
        d["case"] = "GP1";
        m = builtin_model(BuiltinCase::GP1, mf.r0, mf.kappa);
    } else if (mf.case_id == "2" || mf.case_id == "GP2" || mf.case_id == "gp2") {
        d["case"] = "GP2";
        m = builtin_model(BuiltinCase::GP2, mf.r0, mf.kappa);
    } else if (mf.case_id == "3" || mf.case_id == "SF3" || mf.case_id == "sf3") {
        d["case"] = "SF3";
        m = builtin_model(BuiltinCase::SF3, mf.r0, mf.kappa);
    } else if (mf.case_id == "custom") {
        if (mf.f_expr.empty() || mf.h_expr.empty())
            throw validation_error("custom case needs --f-expr and --h-expr");
        d["case"] = "custom";
        d["f"] = mf.f_expr;
        d["h"] = mf.h_expr;
        m = custom_model(mf.f_expr, mf.h_expr, mf.r0, mf.kappa);
    } else {
        throw validation_error("unknown case: " + mf.case_id);
    }
    if (descriptor) *descriptor = d;
    return m;
}

void emit(const json& j, const std::string& out_path) {
    std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

// ------------------------------------------------------------- subcommands

void cmd_profile(const ModelFlags& mf, double c, double xmax, int n,
                 const std::string& out) {
    json d;
    auto m = resolve_model(mf, &d);
    g_manifest.j["model"] = d;
    SolitonProfile p = (c == 0.0) ? kink_profile(m, xmax, n) : gray_profile(m, c, xmax, n);
    CsvWriter csv({"x", "re_u", "im_u", "abs_u", "eta", "phase"});
    for (int i = 0; i < p.n(); ++i) {
        cdouble u = p.value(i);
        csv.row({p.x(i), u.real(), u.imag(), p.amplitude[i], p.eta[i], p.phase[i]});
    }
    write_file(out, csv.str());
    json rep;
    rep["mu_c"] = p.mu_c;
    rep["decay_rate"] = p.decay_rate;
    rep["expected_decay_rate"] = p.expected_decay_rate;
    rep["n"] = p.n();
    rep["x_max"] = p.x_max();
    emit(rep, "");
}

void cmd_potential(const ModelFlags& mf, double c, int grid, const std::string& out) {
    json d;
    auto m = resolve_model(mf, &d);
    g_manifest.j["model"] = d;
    if (grid < 2) throw validation_error("--xi-grid must be at least 2");
    CsvWriter csv({"xi", "V_c"});
    double lo = -m.r0sq();
    for (int i = 0; i <= grid; ++i) {
        double xi = lo + (0.0 - lo) * i / grid;
        csv.row({xi, potential_eval(m, c, xi)});
    }
    write_file(out, csv.str());
}

FieldState read_field_csv(const std::string& path, double r0) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot read field file: " + path);
    std::vector<double> xs;
    std::vector<cdouble> vs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b, cc;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
            !std::getline(ss, cc, ','))
            throw validation_error("field CSV needs columns x,re,im");
        try {
            double x = std::stod(a), re = std::stod(b), im = std::stod(cc);
            xs.push_back(x);
            vs.push_back(cdouble(re, im));
        } catch (const std::exception&) {
            if (!xs.empty()) throw validation_error("malformed field CSV row: " + line);
            // header row: skip
        }
    }
    if (xs.size() < 2) throw validation_error("field CSV has too few samples");
    FieldState f;
    f.x0 = xs.front();
    f.dx = (xs.back() - xs.front()) / (xs.size() - 1);
    for (size_t i = 1; i < xs.size(); ++i)
        if (std::fabs(xs[i] - xs[i - 1] - f.dx) > 1e-9 * (1.0 + std::fabs(f.dx)))
            throw validation_error("field CSV grid is not uniform");
    f.r0 = r0;
    f.v = std::move(vs);
    return f;
}

void cmd_functionals(const ModelFlags& mf, const std::string& in_path, double m_lyap,
                     const std::string& out) {
    json d;
    auto m = resolve_model(mf, &d);
    g_manifest.j["model"] = d;
    FieldState f = read_field_csv(in_path, m.r0);
    FunctionalReport rep = functional_report(f, m, m_lyap);
    json j;
    j["energy"] = rep.energy;
    j["momentum_renormalized"] = rep.momentum_renormalized;
    j["momentum_untwisted"] = rep.momentum_untwisted;
    j["lyapunov"] = rep.lyapunov;
    j["min_modulus"] = rep.min_modulus;
    j["quadrature_error"] = rep.quadrature_error;
    emit(j, out);
}

void cmd_criterion(const ModelFlags& mf, const std::string& method, bool as_json,
                   bool kappa0, double c, double c_step, const std::string& out) {
    if (kappa0 || mf.case_id == "gp-closed-form") {
        if (kappa0) {
            double k0 = find_kappa0();
            if (as_json || !out.empty()) {
                json j;
                j["kappa0"] = k0;
                emit(j, out);
            } else {
                std::cout << "kappa0 = " << fmt17(k0) << "\n";
            }
            return;
        }
        double slope = gp_closed_form_slope(c, mf.kappa);
        json j;
        j["p_prime_0"] = slope;
        j["method"] = to_string(SlopeMethod::GPClosedForm);
        j["kappa"] = mf.kappa;
        j["c"] = c;
        emit(j, out);
        return;
    }
    json d;
    auto m = resolve_model(mf, &d);
    g_manifest.j["model"] = d;
    CriterionReport rep;
    if (method == "integral")
        rep = vk_slope_integral(m);
    else if (method == "branch")
        rep = vk_slope_branch_fd(m, c_step);
    else if (method == "gp") {
        rep.p_prime_0 = gp_closed_form_slope(c, m.kappa);
        rep.method = SlopeMethod::GPClosedForm;
        rep.kappa = m.kappa;
        rep.model_id = m.id;
        rep.verdict = rep.p_prime_0 < 0 ? Verdict::StableSlope : Verdict::UnstableSlope;
    } else {
        throw validation_error("unknown method: " + method);
    }
    if (as_json || !out.empty()) {
        json j;
        j["model"] = rep.model_id;
        j["kappa"] = rep.kappa;
        j["method"] = to_string(rep.method);
        j["p_prime_0"] = rep.p_prime_0;
        j["tolerance"] = rep.tolerance;
        j["verdict"] = to_string(rep.verdict);
        emit(j, out);
    } else {
        std::cout << "P'(0) = " << fmt17(rep.p_prime_0) << " (" << to_string(rep.verdict)
                  << ", " << to_string(rep.method) << ")\n";
    }
}

BuiltinCase case_enum(const std::string& s) {
    if (s == "1" || s == "GP1" || s == "gp1") return BuiltinCase::GP1;
    if (s == "2" || s == "GP2" || s == "gp2") return BuiltinCase::GP2;
    if (s == "3" || s == "SF3" || s == "sf3") return BuiltinCase::SF3;
    throw validation_error("unknown case: " + s);
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& out) {
    CsvWriter csv({"kappa", "p_prime_0", "verdict", "ok", "error"});
    for (const auto& r : rows) {
        std::string err = r.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
        csv.row_raw({fmt17(r.kappa), fmt17(r.p_prime_0), to_string(r.verdict),
                     r.ok ? "1" : "0", err});
    }
    write_file(out, csv.str());
}

void cmd_sweep(const std::string& case_id, double r0, double kmin, double kmax, int steps,
               const std::string& out) {
    if (steps < 2) throw validation_error("--steps must be at least 2");
    BuiltinCase bc = case_enum(case_id);
    std::vector<double> grid(steps);
    for (int i = 0; i < steps; ++i) grid[i] = kmin + (kmax - kmin) * i / (steps - 1);
    auto rows = sweep_kappa([&](double k) { return builtin_model(bc, r0, k); }, grid);
    write_sweep_csv(rows, out);
}

void cmd_evolve(const ModelFlags& mf, const std::string& init, const std::string& file,
                double c, double amp, double dt, double T, const std::string& scheme,
                int n, double xmax, double cadence, const std::string& trace_path) {
    json d;
    auto m = resolve_model(mf, &d);
    g_manifest.j["model"] = d;
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.t_final = T;
    cfg.output_cadence = cadence;
    if (scheme == "cn")
        cfg.scheme = Scheme::CrankNicolsonFixedPoint;
    else if (scheme == "strang")
        cfg.scheme = Scheme::StrangSplit;
    else
        throw validation_error("unknown scheme: " + scheme);

    CsvWriter csv({"t", "E", "P_untwisted", "min_nu", "z", "phi", "dX_modulated"});
    json summary;
    if (init == "kink") {
        EvolutionTrace tr = orbital_stability_experiment(m, amp, T, cfg);
        for (size_t i = 0; i < tr.times.size(); ++i)
            csv.row({tr.times[i], tr.energy[i], tr.momentum_untwisted[i], tr.min_nu[i],
                     tr.z[i], tr.phi[i], tr.dX_modulated[i]});
        summary["initial_dX"] = tr.initial_dX;
        summary["growth_flag"] = tr.growth_flag;
        summary["boundary_warning"] = tr.boundary_warning;
    } else {
        FieldState f0;
        if (init == "gray") {
            f0 = gray_profile(m, c, xmax, n).to_field();
        } else if (init == "file") {
            if (file.empty()) throw validation_error("--init file needs --file");
            f0 = read_field_csv(file, m.r0);
        } else {
            throw validation_error("unknown init: " + init);
        }
        Evolver ev(m, cfg, f0);
        for (double t = 0.0; t <= T + 1e-9; t += std::max(cadence, dt)) {
            ev.advance_to(t);
            const FieldState& s = ev.state();
            double mn = 1e300;
            for (const auto& z : s.v) mn = std::min(mn, m.nu(std::norm(z)));
            csv.row({ev.time(), energy(s, m), momentum_untwisted(s), mn, 0.0, 0.0,
                     distance_dX(s, f0)});
        }
        summary["boundary_warning"] = ev.boundary_warning();
    }
    write_file(trace_path, csv.str());
    emit(summary, "");
}

void cmd_figures(const std::string& out_dir) {
    struct Panel {
        const char* name;
        BuiltinCase bc;
        double r0;
    };
    const Panel panels[] = {{"gp1", BuiltinCase::GP1, 1.0},
                            {"gp2", BuiltinCase::GP2, 1.0},
                            {"sf3_r1", BuiltinCase::SF3, 1.0},
                            {"sf3_r2", BuiltinCase::SF3, 2.0}};
    for (const Panel& p : panels) {
        double ktil = kappa_tilde(builtin_model(p.bc, p.r0, 0.0));
        // kink profiles for several couplings (Figure 1 data)
        CsvWriter f1({"kappa", "x", "u"});
        for (double k : {ktil + 0.1, 0.0, 1.0, 5.0}) {
            auto m = builtin_model(p.bc, p.r0, k);
            ProfileEvaluator ev(m, 0.0);
            for (int i = 0; i <= 800; ++i) {
                double x = -10.0 + 20.0 * i / 800;
                f1.row({k, x, ev.kink_value(x)});
            }
        }
        write_file(out_dir + "/fig1_" + p.name + ".csv", f1.str());
        // stability slope near the ellipticity threshold (Figure 2 data)
        std::vector<double> grid;
        for (int i = 0; i < 40; ++i) grid.push_back(ktil + 0.05 + (3.0 - 0.05) * i / 39);
        auto rows =
            sweep_kappa([&](double k) { return builtin_model(p.bc, p.r0, k); }, grid);
        write_sweep_csv(rows, out_dir + "/fig2_" + p.name + ".csv");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasilinear Schrodinger soliton laboratory"};
    app.require_subcommand(1);
    std::string manifest_path;
    long seed = 0;
    app.add_option("--manifest", manifest_path, "write a run manifest JSON");
    app.add_option("--seed", seed, "seed recorded in the manifest");

    ModelFlags mf_profile, mf_potential, mf_functionals, mf_criterion, mf_evolve;

    auto* sp = app.add_subcommand("profile", "tabulate a soliton profile as CSV");
    add_model_flags(sp, mf_profile);
    double p_c = 0.0, p_xmax = 0.0;
    int p_n = 4096;
    std::string p_out = "profile.csv";
    sp->add_option("--c", p_c, "wave speed (0 = kink)");
    sp->add_option("--xmax", p_xmax, "half-width (0 = automatic)");
    sp->add_option("--n", p_n, "grid size");
    sp->add_option("--out", p_out, "output CSV");

    auto* sv = app.add_subcommand("potential", "tabulate V_c(xi) as CSV");
    add_model_flags(sv, mf_potential);
    double v_c = 0.0;
    int v_grid = 512;
    std::string v_out = "potential.csv";
    sv->add_option("--c", v_c, "wave speed");
    sv->add_option("--xi-grid", v_grid, "number of xi intervals");
    sv->add_option("--out", v_out, "output CSV");

    auto* sf = app.add_subcommand("functionals", "energy/momentum/Lyapunov of a field");
    add_model_flags(sf, mf_functionals);
    std::string f_in, f_out;
    double f_M = 1.0;
    sf->add_option("--in", f_in, "field CSV (columns x,re,im)")->required();
    sf->add_option("--M-lyap", f_M, "Lyapunov constant M");
    sf->add_option("--out", f_out, "output JSON (default stdout)");

    auto* sc = app.add_subcommand("criterion", "stability slope P'(0)");
    add_model_flags(sc, mf_criterion);
    std::string c_method = "integral", c_out;
    bool c_json = false, c_kappa0 = false;
    double c_c = 0.0, c_step = 0.05;
    sc->add_option("--method", c_method, "integral|branch|gp");
    sc->add_flag("--json", c_json, "JSON output");
    sc->add_flag("--kappa0", c_kappa0, "report the closed-form sign-change root");
    sc->add_option("--c", c_c, "speed for the closed form");
    sc->add_option("--c-step", c_step, "finite-difference speed step");
    sc->add_option("--out", c_out, "output JSON (default stdout)");

    auto* sw = app.add_subcommand("sweep", "P'(0) over a kappa grid as CSV");
    std::string w_case = "1", w_out = "sweep.csv";
    double w_r0 = 1.0, w_kmin = 0.0, w_kmax = 1.0;
    int w_steps = 20;
    sw->add_option("--case", w_case, "builtin case: 1|2|3");
    sw->add_option("--r0", w_r0, "background amplitude");
    sw->add_option("--kappa-min", w_kmin, "grid start")->required();
    sw->add_option("--kappa-max", w_kmax, "grid end")->required();
    sw->add_option("--steps", w_steps, "grid size");
    sw->add_option("--out", w_out, "output CSV");

    auto* se = app.add_subcommand("evolve", "time evolution with a trace CSV");
    add_model_flags(se, mf_evolve);
    std::string e_init = "kink", e_file, e_scheme = "cn", e_trace = "trace.csv";
    double e_c = 0.5, e_amp = 0.0, e_dt = 1e-3, e_T = 1.0, e_xmax = 0.0, e_cad = 0.1;
    int e_n = 4096;
    se->add_option("--init", e_init, "kink|gray|file");
    se->add_option("--file", e_file, "initial field CSV for --init file");
    se->add_option("--c", e_c, "gray-soliton speed");
    se->add_option("--perturb-amp", e_amp, "kink perturbation amplitude");
    se->add_option("--dt", e_dt, "time step");
    se->add_option("--T", e_T, "final time");
    se->add_option("--scheme", e_scheme, "cn|strang");
    se->add_option("--n", e_n, "grid size");
    se->add_option("--xmax", e_xmax, "half-width (0 = automatic)");
    se->add_option("--cadence", e_cad, "output cadence");
    se->add_option("--trace", e_trace, "trace CSV");

    auto* sg = app.add_subcommand("figures", "export the figure data CSVs");
    std::string g_dir = ".";
    sg->add_option("--out-dir", g_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::ostringstream msg;
        msg << e.what();
        json err;
        err["error"] = "validation";
        err["message"] = msg.str();
        std::cerr << err.dump() << "\n";
        return 2;
    }

    std::ostringstream cmdline;
    for (int i = 0; i < argc; ++i) cmdline << (i ? " " : "") << argv[i];
    g_manifest.enabled = !manifest_path.empty();
    g_manifest.path = manifest_path;
    g_manifest.j["command_line"] = cmdline.str();
    g_manifest.j["seed"] = seed;
    g_manifest.j["version"] = kVersion;
    g_manifest.j["started_utc"] = iso_utc_now();
    g_manifest.j["outputs"] = json::array();

    try {
        if (sp->parsed()) cmd_profile(mf_profile, p_c, p_xmax, p_n, p_out);
        if (sv->parsed()) cmd_potential(mf_potential, v_c, v_grid, v_out);
        if (sf->parsed()) cmd_functionals(mf_functionals, f_in, f_M, f_out);
        if (sc->parsed())
            cmd_criterion(mf_criterion, c_method, c_json, c_kappa0, c_c, c_step, c_out);
        if (sw->parsed()) cmd_sweep(w_case, w_r0, w_kmin, w_kmax, w_steps, w_out);
        if (se->parsed())
            cmd_evolve(mf_evolve, e_init, e_file, e_c, e_amp, e_dt, e_T, e_scheme, e_n,
                       e_xmax, e_cad, e_trace);
        if (sg->parsed()) cmd_figures(g_dir);
    } catch (const validation_error& e) {
        json err;
        err["error"] = "validation";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        json err;
        err["error"] = "numerical";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        json err;
        err["error"] = "numerical";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 3;
    }
    g_manifest.flush();
    return 0;
}
