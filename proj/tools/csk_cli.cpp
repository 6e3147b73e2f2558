// csk: command-line front end. One command per invocation; tables go to
// stdout or --out, diagnostics to stderr. Exit codes: 0 success, 2 invalid
// input, 3 numerical failure.

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "acceptance_suite.hpp"
#include "csk/errors.hpp"
#include "csk/greens.hpp"
#include "csk/grid.hpp"
#include "csk/hamiltonian.hpp"
#include "csk/indicial.hpp"
#include "csk/kernels.hpp"
#include "csk/odesolve.hpp"
#include "csk/symbols.hpp"

using json = nlohmann::ordered_json;

namespace {

enum class Format { csv, json };

struct RunConfig {
    std::string command;
    csk::ProblemParams pp;
    int mode = 0;
    double kappa = 0;
    double t_min = -5, t_max = 5;
    std::size_t n = 200;
    int count = 10;
    double tol = 1e-8;
    std::string input, out;
    Format format = Format::csv;
    int threads = 0;
    // ball
    double lambda = 0.1;
    int n_r = 40, n_ang = 0;
    // green / solve_mode
    int window = -1;
    // hamiltonian
    int n_tau = 96;
    std::string weights = "volume";
    // symbol
    bool conjugated = false;
    // verify
    std::string suite = "acceptance";
    int criterion = 0;
};

std::string num(double x) {
    if (!std::isfinite(x)) return x != x ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using Pairs = std::vector<std::pair<std::string, std::string>>;

Pairs base_config(const RunConfig& c) {
    Pairs out{{"N", std::to_string(c.pp.N)}, {"gamma", num(c.pp.gamma)}};
    if (c.pp.has_p()) out.emplace_back("p", num(c.pp.p));
    out.emplace_back("k", std::to_string(c.pp.k));
    return out;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> notes;  // extra header lines, e.g. tail declarations
};

std::string render(const RunConfig& c, const Pairs& cfg, const Table& t) {
    std::ostringstream body;
    if (c.format == Format::json) {
        json j;
        j["columns"] = t.columns;
        j["rows"] = t.rows;
        const std::string data = j.dump();
        json doc;
        doc["command"] = c.command;
        json jc = json::object();
        for (const auto& [k, v] : cfg) jc[k] = v;
        doc["config"] = jc;
        doc["notes"] = t.notes;
        doc["checksum"] = csk::checksum(data);
        doc["data"] = j;
        return doc.dump(1) + "\n";
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) body << (i ? "," : "") << t.columns[i];
    body << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) body << (i ? "," : "") << num(r[i]);
        body << '\n';
    }
    std::ostringstream os;
    os << "# csk " << c.command << '\n';
    for (const auto& n : t.notes) os << "# " << n << '\n';
    os << "# config";
    for (const auto& [k, v] : cfg) os << ' ' << k << '=' << v;
    os << "\n# checksum " << csk::checksum(body.str()) << '\n' << body.str();
    return os.str();
}

std::string render_json(const RunConfig& c, const Pairs& cfg, const json& data) {
    const std::string text = data.dump();
    json doc;
    doc["command"] = c.command;
    json jc = json::object();
    for (const auto& [k, v] : cfg) jc[k] = v;
    doc["config"] = jc;
    doc["checksum"] = csk::checksum(text);
    doc["data"] = data;
    return doc.dump(1) + "\n";
}

void emit(const RunConfig& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw csk::DomainError("out: cannot open " + c.out);
    f << text;
}

std::string tails_note(const csk::GridFunction& g) {
    return "decay_plus=" + num(g.decay_plus) + " decay_minus=" + num(g.decay_minus) +
           " limit_plus=" + num(g.limit_plus) + " limit_minus=" + num(g.limit_minus);
}

csk::GridFunction load(const std::string& path) {
    if (path.empty()) throw csk::DomainError("input: a profile file is required");
    std::ifstream f(path);
    if (!f) throw csk::DomainError("input: cannot open " + path);
    auto g = csk::read_csv(f);
    if (!g.tails_declared()) throw csk::TailUndeclared("input: header must declare decay_plus and decay_minus");
    return g;
}

std::vector<double> samples(const RunConfig& c) {
    if (c.n < 2 || !(c.t_max > c.t_min)) throw csk::DomainError("n/t_min/t_max: need n >= 2 and t_max > t_min");
    std::vector<double> t(c.n);
    for (std::size_t i = 0; i < c.n; ++i) t[i] = c.t_min + (c.t_max - c.t_min) * static_cast<double>(i) / (c.n - 1);
    return t;
}

std::string cmd_symbol(const RunConfig& c) {
    c.pp.validate(c.conjugated);
    const auto m = csk::make_mode(c.mode, c.pp.N);
    Table t{{"xi", "re", "im"}, {}, {}};
    for (double xi : samples(c)) {
        const csk::cplx v = c.conjugated ? csk::theta_tilde(c.pp, m, xi) : csk::theta(c.pp, m, xi);
        t.rows.push_back({xi, v.real(), v.imag()});
    }
    auto cfg = base_config(c);
    cfg.insert(cfg.end(), {{"mode", std::to_string(c.mode)}, {"conjugated", c.conjugated ? "1" : "0"},
                           {"xi_min", num(c.t_min)}, {"xi_max", num(c.t_max)}, {"n", std::to_string(c.n)}});
    return render(c, cfg, t);
}

std::string cmd_constants(const RunConfig& c) {
    csk::ProblemParams q = c.pp;
    q.p = std::nan("");
    q.validate();
    bool admissible = false;
    if (c.pp.has_p()) {
        try {
            c.pp.validate(true);
            admissible = true;
        } catch (const csk::DomainError& e) {
            std::cerr << "warning: " << e.what() << "; p-dependent constants omitted\n";
        }
    }
    const auto m = csk::make_mode(c.mode, c.pp.N);
    const auto h = csk::half_params(c.pp.N, c.pp.gamma, m);
    std::vector<std::pair<std::string, double>> rec{{"Lambda", csk::hardy_constant(c.pp.N, c.pp.gamma)},
                                                    {"p1", csk::p_one(c.pp.N, c.pp.gamma)},
                                                    {"d_gamma", csk::d_gamma(c.pp.gamma)},
                                                    {"d_tilde_gamma", csk::d_tilde_gamma(c.pp.gamma)},
                                                    {"A_m", h.A},
                                                    {"B_m", h.B}};
    const double nan = std::nan("");
    rec.emplace_back("A", admissible ? csk::A_constant(c.pp) : nan);
    rec.emplace_back("Q0", admissible ? csk::q0(c.pp) : nan);
    auto cfg = base_config(c);
    cfg.emplace_back("mode", std::to_string(c.mode));
    if (c.format == Format::csv) {
        std::ostringstream body;
        body << "name,value\n";
        for (const auto& [k, v] : rec) body << k << ',' << (v == v ? num(v) : "") << '\n';
        std::ostringstream os;
        os << "# csk constants\n# p_admissible=" << (admissible ? 1 : 0) << "\n# config";
        for (const auto& [k, v] : cfg) os << ' ' << k << '=' << v;
        os << "\n# checksum " << csk::checksum(body.str()) << '\n' << body.str();
        return os.str();
    }
    json d;
    for (const auto& [k, v] : rec) d[k] = v == v ? json(v) : json(nullptr);
    d["p_admissible"] = admissible;
    return render_json(c, cfg, d);
}

const char* axis_name(csk::PoleAxis a) {
    switch (a) {
        case csk::PoleAxis::Imaginary: return "imaginary";
        case csk::PoleAxis::Real: return "real";
        default: return "off_axis";
    }
}

std::string cmd_poles(const RunConfig& c) {
    c.pp.validate();
    const auto m = csk::make_mode(c.mode, c.pp.N);
    if (c.count < 1) throw csk::DomainError("count must be >= 1");
    const auto tab = csk::find_poles(c.pp, m, c.kappa, c.count);
    auto cfg = base_config(c);
    cfg.insert(cfg.end(), {{"mode", std::to_string(c.mode)}, {"kappa", num(c.kappa)}, {"count", std::to_string(c.count)}});
    if (c.format == Format::csv) {
        Table t{{"index", "tau", "sigma", "residue_re", "residue_im"}, {}, {}};
        t.notes.push_back(std::string("regime=") + (tab.regime == csk::Regime::Stable ? "stable" : "unstable"));
        for (const auto& e : tab.entries)
            t.rows.push_back({double(e.index), e.tau, e.sigma, e.residue.real(), e.residue.imag()});
        return render(c, cfg, t);
    }
    json d;
    d["regime"] = tab.regime == csk::Regime::Stable ? "stable" : "unstable";
    d["entries"] = json::array();
    for (const auto& e : tab.entries)
        d["entries"].push_back({{"index", e.index},
                                {"tau", e.tau},
                                {"sigma", e.sigma},
                                {"axis", axis_name(e.axis)},
                                {"residue", {e.residue.real(), e.residue.imag()}}});
    return render_json(c, cfg, d);
}

std::string cmd_green(const RunConfig& c) {
    c.pp.validate();
    const auto s = csk::green_shifted(c.pp, csk::make_mode(c.mode, c.pp.N), c.kappa, c.window);
    Table t{{"t", "G"}, {}, {}};
    for (double x : samples(c)) {
        if (x == 0) throw csk::SingularityError("t = 0 is a sample point; G is singular there");
        t.rows.push_back({x, csk::green_value(s, x)});
    }
    auto cfg = base_config(c);
    cfg.insert(cfg.end(), {{"mode", std::to_string(c.mode)}, {"kappa", num(c.kappa)}, {"window", std::to_string(c.window)},
                           {"t_min", num(c.t_min)}, {"t_max", num(c.t_max)}, {"n", std::to_string(c.n)}});
    return render(c, cfg, t);
}

std::string cmd_kernel(const RunConfig& c) {
    c.pp.validate(c.conjugated);
    const auto k = csk::make_kernel(c.pp, csk::make_mode(c.mode, c.pp.N), c.conjugated);
    Table t{{"t", "K"}, {}, {}};
    for (double x : samples(c)) t.rows.push_back({x, k(x)});
    auto cfg = base_config(c);
    cfg.insert(cfg.end(), {{"mode", std::to_string(c.mode)}, {"conjugated", c.conjugated ? "1" : "0"},
                           {"t_min", num(c.t_min)}, {"t_max", num(c.t_max)}, {"n", std::to_string(c.n)}});
    return render(c, cfg, t);
}

std::string cmd_solve_mode(const RunConfig& c) {
    c.pp.validate();
    const auto h = load(c.input);
    const auto s = csk::green_shifted(c.pp, csk::make_mode(c.mode, c.pp.N), c.kappa, c.window);
    const auto w = csk::solve_mode(s, h);
    Table t{{"t", "w"}, {}, {tails_note(w)}};
    for (std::size_t i = 0; i < w.n(); ++i) t.rows.push_back({w.t(i), w.values[i]});
    auto cfg = base_config(c);
    cfg.insert(cfg.end(), {{"mode", std::to_string(c.mode)}, {"kappa", num(c.kappa)}, {"window", std::to_string(c.window)},
                           {"input", c.input}});
    return render(c, cfg, t);
}

std::string cmd_ball(const RunConfig& c) {
    c.pp.validate(true);
    csk::BallGreen bg(c.pp.N, c.pp.gamma, c.n_r, c.n_ang);
    const auto sol = csk::picard_ball(bg, c.pp, c.lambda);
    const auto rep = csk::uniform_bound_check(sol, c.pp);
    Table t{{"r", "w"}, {}, {}};
    for (std::size_t i = 0; i < sol.r.size(); ++i) t.rows.push_back({sol.r[i], sol.w[i]});
    t.notes.push_back("iterations=" + std::to_string(sol.iterations) + " sup_norm=" + num(sol.sup_norm) +
                      " defect=" + num(sol.defect));
    t.notes.push_back("uniform_bound exponent=" + num(rep.exponent) + " c0=" + num(rep.c0) +
                      " local_exponent=" + num(rep.local_exponent) + " holds=" + (rep.holds ? "1" : "0"));
    auto cfg = base_config(c);
    cfg.insert(cfg.end(), {{"lambda", num(c.lambda)}, {"n_r", std::to_string(c.n_r)}, {"n_ang", std::to_string(c.n_ang)}});
    const std::string text = render(c, cfg, t);
    if (!c.out.empty()) {
        json m;
        m["command"] = "ball";
        json jc = json::object();
        for (const auto& [k, v] : cfg) jc[k] = v;
        m["config"] = jc;
        m["table"] = c.out;
        m["table_checksum"] = csk::checksum(text);
        m["iterations"] = sol.iterations;
        m["sup_norm"] = sol.sup_norm;
        m["defect"] = sol.defect;
        m["uniform_bound"] = {{"exponent", rep.exponent}, {"c0", rep.c0}, {"local_exponent", rep.local_exponent},
                              {"holds", rep.holds}};
        std::ofstream f(c.out + ".manifest.json", std::ios::binary);
        f << m.dump(1) << '\n';
    }
    return text;
}

std::string cmd_hamiltonian(const RunConfig& c) {
    c.pp.validate(true);
    const auto v = load(c.input);
    csk::HamiltonianWeights w;
    if (c.weights == "volume")
        w = csk::HamiltonianWeights::Volume;
    else if (c.weights == "displayed")
        w = csk::HamiltonianWeights::Displayed;
    else
        throw csk::DomainError("weights must be volume or displayed");
    const auto f = csk::extension_field(c.pp, v, c.n_tau);
    const auto H = csk::hamiltonian_trace(c.pp, f, v, w);
    const auto rate = csk::hamiltonian_rate_identity(c.pp, f);
    Table t{{"t", "H", "dH_dt"}, {}, {"scale=" + num(csk::hamiltonian_scale(c.pp, f))}};
    for (std::size_t i = 0; i < v.n(); ++i) t.rows.push_back({v.t(i), H.values[i], rate.values[i]});
    auto cfg = base_config(c);
    cfg.insert(cfg.end(), {{"n_tau", std::to_string(c.n_tau)}, {"weights", c.weights}, {"input", c.input}});
    return render(c, cfg, t);
}

int cmd_verify(const RunConfig& c) {
    if (c.suite != "acceptance") throw csk::DomainError("suite: only 'acceptance' is defined");
    std::vector<csk::acceptance::Result> res;
    std::ostringstream os;
    auto report = [&](const csk::acceptance::Result& r) {
        const auto line = csk::acceptance::format(r) + "\n";
        os << line;
        if (c.out.empty()) std::cout << line << std::flush;
    };
    if (c.criterion != 0) {
        res.push_back(csk::acceptance::run(c.criterion));
        report(res.back());
    } else {
        res = csk::acceptance::run_all(report);
    }
    if (!c.out.empty()) emit(c, os.str());
    return csk::acceptance::acceptable(res) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"csk: conformal fractional Laplacian toolkit"};
    app.set_config("--config", "", "plain key=value file; keys are the long option names");
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig c;
    bool cylinder = false;
    app.add_option("--threads", c.threads, "OpenMP threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", c.out, "output path (stdout when omitted)");
    app.add_option("--format", c.format, "csv or json")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::csv}, {"json", Format::json}}));
    app.add_option("--N", c.pp.N, "dimension");
    app.add_option("--gamma", c.pp.gamma, "order, in (0,1)");
    app.add_option("--p", c.pp.p, "exponent");
    app.add_option("--k", c.pp.k, "dimension of the singular set");
    app.add_option("--mode", c.mode, "spherical-harmonic degree");
    app.add_option("--kappa", c.kappa);
    app.add_option("--t-min", c.t_min, "first sample (xi for symbol)");
    app.add_option("--t-max", c.t_max, "last sample");
    app.add_option("--n", c.n, "number of samples");
    app.add_option("--count", c.count, "poles to locate");
    app.add_option("--window", c.window, "contour shift J (-1: none)");
    app.add_option("--input", c.input, "two-column CSV profile");
    app.add_option("--lambda", c.lambda);
    app.add_option("--n-r", c.n_r);
    app.add_option("--n-ang", c.n_ang);
    app.add_option("--n-tau", c.n_tau);
    app.add_option("--weights", c.weights, "volume or displayed");
    app.add_flag("--conjugated", c.conjugated, "symbol: shifted symbol theta(xi - i Q0)");
    app.add_flag("--cylinder", cylinder, "kernel: P_m itself instead of the conjugated operator");
    app.add_option("--suite", c.suite);
    app.add_option("--criterion", c.criterion, "single criterion (0 = all)");

    app.add_subcommand("symbol", "theta_m on a xi grid");
    app.add_subcommand("constants", "Lambda, A, p1, d_gamma, Q0, A_m, B_m");
    app.add_subcommand("poles", "zeros of theta_m - kappa");
    app.add_subcommand("green", "residue-series Green's function");
    app.add_subcommand("kernel", "convolution kernel of the mode operator");
    app.add_subcommand("solve_mode", "particular solution of (P_m - kappa) w = h");
    app.add_subcommand("ball", "minimal solution on the unit ball");
    app.add_subcommand("hamiltonian", "conformal Hamiltonian along a profile");
    app.add_subcommand("verify", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (c.threads > 0) omp_set_num_threads(c.threads);
    c.command = app.get_subcommands().front()->get_name();
    c.conjugated = c.command == "kernel" ? !cylinder : c.conjugated;

    try {
        if (c.command == "verify") return cmd_verify(c);
        std::string text;
        if (c.command == "symbol") text = cmd_symbol(c);
        else if (c.command == "constants") text = cmd_constants(c);
        else if (c.command == "poles") text = cmd_poles(c);
        else if (c.command == "green") text = cmd_green(c);
        else if (c.command == "kernel") text = cmd_kernel(c);
        else if (c.command == "solve_mode") text = cmd_solve_mode(c);
        else if (c.command == "ball") text = cmd_ball(c);
        else text = cmd_hamiltonian(c);
        emit(c, text);
        return 0;
    } catch (const csk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_validation() ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
