#include "caa/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "caa/accel.hpp"
#include "caa/chebsolve.hpp"
#include "caa/operators.hpp"
#include "caa/rates.hpp"

namespace caa {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key '" + key + "': cannot parse '" + s + "' as a number");
    }
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key or value");
        if (cfg.entries_.count(key))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.entries_[key] = Entry{value, lineno};
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
    entries_[key] = Entry{value, 0};
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second.value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
}

double Config::get_double(const std::string& key) const {
    return parse_double(get_string(key), key);
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
    const double v = get_double(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw ConfigError("key '" + key + "': expected an integer");
    return i;
}

int Config::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_string(key);
    try {
        return std::stoull(s);
    } catch (...) {
        throw ConfigError("key '" + key + "': cannot parse '" + s + "' as a seed");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_string(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& part : split(get_string(key), ','))
        out.push_back(parse_double(trim(part), key));
    return out;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (double v : get_double_list(key)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw ConfigError("key '" + key + "': expected integers");
        out.push_back(i);
    }
    return out;
}

void Config::require_known(const std::vector<std::string>& known) const {
    for (const auto& [key, entry] : entries_) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            std::string where = entry.line > 0 ? "line " + std::to_string(entry.line) + ": " : "";
            throw ConfigError(where + "unknown key '" + key + "'");
        }
    }
}

std::vector<double> parse_sweep(const std::string& spec) {
    const std::vector<std::string> colon = split(spec, ':');
    if (colon.size() == 4) {
        const double start = parse_double(trim(colon[0]), "sweep");
        const double end = parse_double(trim(colon[1]), "sweep");
        const int count = static_cast<int>(parse_double(trim(colon[2]), "sweep"));
        const std::string kind = trim(colon[3]);
        if (count < 2) throw ConfigError("sweep: count must be >= 2");
        std::vector<double> out(count);
        if (kind == "lin") {
            for (int i = 0; i < count; ++i)
                out[i] = start + (end - start) * i / (count - 1);
        } else if (kind == "log") {
            if (!(start > 0.0 && end > 0.0)) throw ConfigError("sweep: log needs positive bounds");
            const double ls = std::log(start), le = std::log(end);
            for (int i = 0; i < count; ++i)
                out[i] = std::exp(ls + (le - ls) * i / (count - 1));
        } else {
            throw ConfigError("sweep: kind must be 'log' or 'lin'");
        }
        return out;
    }
    if (colon.size() != 1) throw ConfigError("sweep: expected start:end:count:log|lin");
    std::vector<double> out;
    for (const std::string& part : split(spec, ','))
        out.push_back(parse_double(trim(part), "sweep"));
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) os_ << ',';
        os_ << cells[i];
    }
    os_ << '\n';
}

// ---------------------------------------------------------------------------
// plotting

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series, bool log_x,
                    bool log_y, const std::string& x_label, const std::string& y_label) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const double w = 840, h = 600, ml = 70, mr = 160, mt = 20, mb = 50;
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (xmin > xmax || ymin > ymax) return;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double v) { return h - mb - (ty(v) - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write plot file: " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
       << h - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
       << "\" stroke=\"black\"/>\n";
    auto label = [&](double xx, double yy, const std::string& text, const char* anchor) {
        os << "<text x=\"" << xx << "\" y=\"" << yy << "\" font-size=\"12\" text-anchor=\""
           << anchor << "\">" << text << "</text>\n";
    };
    auto axis_val = [&](double t, bool lg) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.4g", lg ? std::pow(10.0, t) : t);
        return std::string(buf);
    };
    label(ml, h - mb + 18, axis_val(xmin, log_x), "middle");
    label(w - mr, h - mb + 18, axis_val(xmax, log_x), "middle");
    label(ml - 8, h - mb, axis_val(ymin, log_y), "end");
    label(ml - 8, mt + 10, axis_val(ymax, log_y), "end");
    label((ml + w - mr) / 2, h - 12, x_label, "middle");
    label(14, mt + 10, y_label, "start");
    int color = 0;
    for (const auto& s : series) {
        std::ostringstream pts;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
            pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        const char* c = palette[color % 8];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\""
           << pts.str() << "\"/>\n";
        label(w - mr + 10, mt + 16 + 16 * color, s.label, "start");
        os << "<line x1=\"" << w - mr + 60 + 6.0 * s.label.size() << "\" y1=\""
           << mt + 12 + 16 * color << "\" x2=\"" << w - mr + 80 + 6.0 * s.label.size()
           << "\" y2=\"" << mt + 12 + 16 * color << "\" stroke=\"" << c << "\"/>\n";
        ++color;
    }
    os << "</svg>\n";
}

void plot_csv(const std::string& csv_path, const std::string& svg_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot read csv: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) return;
    const std::vector<std::string> header = split(trim(line), ',');
    std::vector<std::vector<double>> cols(header.size());
    while (std::getline(in, line)) {
        const std::vector<std::string> cells = split(trim(line), ',');
        for (size_t j = 0; j < header.size(); ++j) {
            double v = std::numeric_limits<double>::quiet_NaN();
            if (j < cells.size() && !cells[j].empty()) {
                try {
                    v = std::stod(cells[j]);
                } catch (...) {
                }
            }
            cols[j].push_back(v);
        }
    }
    if (cols.empty() || cols[0].empty()) return;
    std::vector<PlotSeries> series;
    double ymin = 1e300, ymax = -1e300;
    for (size_t j = 1; j < cols.size(); ++j) {
        PlotSeries s;
        s.label = header[j];
        bool numeric = false;
        for (size_t i = 0; i < cols[j].size(); ++i) {
            if (!std::isfinite(cols[j][i]) || !std::isfinite(cols[0][i])) continue;
            s.x.push_back(cols[0][i]);
            s.y.push_back(cols[j][i]);
            ymin = std::min(ymin, cols[j][i]);
            ymax = std::max(ymax, cols[j][i]);
            numeric = true;
        }
        if (numeric) series.push_back(std::move(s));
    }
    if (series.empty()) return;
    double xmin = 1e300, xmax = -1e300;
    for (double v : cols[0])
        if (std::isfinite(v)) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
    const bool log_x = xmin > 0.0 && xmax / std::max(xmin, 1e-300) >= 100.0;
    const bool log_y = ymin > 0.0 && ymax / std::max(ymin, 1e-300) >= 1000.0;
    write_svg_plot(svg_path, series, log_x, log_y, header[0], "");
}

// ---------------------------------------------------------------------------
// commands

int cmd_rates(const Config& cfg, std::ostream& out, std::ostream&) {
    cfg.require_known({"rho", "k", "out", "seed"});
    const std::vector<double> rhos = cfg.get_double_list("rho");
    const std::vector<int> ks = cfg.get_int_list("k");
    CsvWriter csv(out);
    csv.row({"rho", "k", "rho_star", "c_star", "c0", "c1", "rho1", "eps_tilde", "alpha0",
             "alpha1", "alpha2", "alpha3", "alpha4", "alpha5"});
    for (double rho : rhos) {
        for (int k : ks) {
            const RateParams p(rho, k);
            const double rk = std::pow(rho, k);
            const auto [c1, rho1] = c1_rho1(p);
            const auto at = alpha_thresholds(p);
            const auto gt = grad_thresholds(p);
            csv.row({format_double(rho), std::to_string(k), format_double(rho_star(p)),
                     format_double(c_star(p)), format_double((2.0 + rk) / (2.0 - rk)),
                     format_double(c1), format_double(rho1), format_double(eps_tilde(p)),
                     format_double(at.alpha0), format_double(at.alpha1), format_double(at.alpha2),
                     format_double(gt.alpha3), format_double(gt.alpha4), format_double(gt.alpha5)});
        }
    }
    return 0;
}

int cmd_chebsolve(const Config& cfg, std::ostream& out, std::ostream& err) {
    cfg.require_known({"rho", "k", "c", "tol", "m", "out", "seed"});
    const double rho = cfg.get_double("rho");
    const int k = cfg.get_int("k");
    const RateParams params(rho, k);
    const double tol = cfg.get_double("tol", 1e-6);
    const int m = cfg.get_int("m", k);
    const double cs = c_star(params);
    std::vector<double> budgets;
    if (cfg.has("c")) {
        budgets = parse_sweep(cfg.get_string("c"));
    } else {
        std::ostringstream def;
        def << "1:" << format_double(cs * 1.05) << ":50:log";
        budgets = parse_sweep(def.str());
    }
    for (double c : budgets)
        if (c < 1.0) throw ConfigError("chebsolve: budgets must be >= 1");

    BoundKnots knots;
    const bool have_knots = k > 2;
    if (have_knots) knots = global_bound(params, m);
    const double rk = std::pow(rho, k);
    const double rs = rho_star(params);
    const double lemma2_hi = (2.0 + rk) / (2.0 - rk);

    CsvWriter csv(out);
    csv.row({"C", "rho_tilde_lp", "lemma2_bound", "prop5_bound", "lemma1_chord", "proj_bound",
             "rho_star", "rho_pow_k"});
    bool failed = false;
    for (double c : budgets) {
        std::string lp_cell, proj_cell;
        try {
            lp_cell = format_double(solve_ctr_cheb({rho, k, c, MinimaxMode::direct}, tol).value);
        } catch (const ExchangeStall& e) {
            err << "chebsolve: direct solve stalled at C = " << format_double(c)
                << " (gap " << format_double(e.best.certified_gap) << ")\n";
            failed = true;
        }
        try {
            proj_cell =
                format_double(solve_projection_bound({rho, k, c, MinimaxMode::projection}, tol).value);
        } catch (const ExchangeStall& e) {
            err << "chebsolve: projection solve stalled at C = " << format_double(c)
                << " (gap " << format_double(e.best.certified_gap) << ")\n";
            failed = true;
        }
        const std::string lemma2 =
            c <= lemma2_hi ? format_double(tilde_rho_small_c(params, c)) : "";
        const std::string prop5 = have_knots ? format_double(evaluate_bound(knots, c)) : "";
        csv.row({format_double(c), lp_cell, lemma2, prop5,
                 format_double(convexity_chord_bound(params, c)), proj_cell, format_double(rs),
                 format_double(rk)});
    }
    return failed ? 2 : 0;
}

namespace {

Eigen::VectorXd scaled_start(const OperatorSpec& op, double grad_norm0, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd u(op.n);
    for (int i = 0; i < op.n; ++i) u(i) = gauss(rng);
    u.normalize();
    const Eigen::VectorXd base =
        op.fixed_point ? *op.fixed_point : Eigen::VectorXd::Zero(op.n);
    auto norm_at = [&](double t) { return op.gradient(base + t * u).norm(); };
    double hi = 1.0;
    while (norm_at(hi) < grad_norm0 && hi < 1e12) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (norm_at(mid) < grad_norm0 ? lo : hi) = mid;
    }
    return base + 0.5 * (lo + hi) * u;
}

}  // namespace

int cmd_run(const Config& cfg, std::ostream& out, std::ostream& err) {
    cfg.require_known({"family", "n", "seed", "k", "c", "unconstrained", "rel_tol", "m", "N",
                       "mu", "L", "eta", "curvature_cap", "samples", "grad_norm0", "shift_scale",
                       "out"});
    const std::string family_name = cfg.get_string("family", "quadratic");
    GradientFamily family;
    if (family_name == "quadratic")
        family = GradientFamily::quadratic;
    else if (family_name == "logistic_ridge")
        family = GradientFamily::logistic_ridge;
    else if (family_name == "cubic_perturbed_quadratic")
        family = GradientFamily::cubic_perturbed_quadratic;
    else
        throw ConfigError("run: family must be quadratic, logistic_ridge, or "
                          "cubic_perturbed_quadratic");

    GradientParams gp;
    gp.n = cfg.get_int("n", 20);
    gp.mu = cfg.get_double("mu", 0.1);
    gp.L = cfg.get_double("L", 1.0);
    gp.eta = cfg.get_double("eta", 0.0);
    gp.curvature_cap = cfg.get_double("curvature_cap", 1.0);
    gp.samples = cfg.get_int("samples", 0);
    gp.shift_scale = cfg.get_double("shift_scale", 0.0);
    const std::uint64_t seed = cfg.get_seed("seed", 1);

    CaaConfig run_cfg;
    run_cfg.k = cfg.get_int("k", 5);
    run_cfg.unconstrained = cfg.get_bool("unconstrained", false);
    run_cfg.c_budget = cfg.get_double("c", 10.0);
    run_cfg.rel_tol = cfg.get_double("rel_tol", 1e-8);
    const int outer = cfg.get_int("N", 100);
    const int bound_m = cfg.get_int("m", 1);
    const double grad_norm0 = cfg.get_double("grad_norm0", 0.1);

    const OperatorSpec op = make_gradient_step(family, gp, seed);
    const Eigen::VectorXd x0 = scaled_start(op, grad_norm0, seed);

    RunTrace trace;
    bool diverged = false;
    try {
        trace = guarded_caa(op, x0, run_cfg, outer);
    } catch (const RunDivergenceError& e) {
        trace = e.partial;
        diverged = true;
        err << "run: diverged after " << trace.records.size() << " outer iterations\n";
    }

    const double c_eff = run_cfg.effective_budget();
    BoundKnots knots;
    const bool have_knots = run_cfg.k > 2;
    if (have_knots) knots = global_bound(RateParams(op.rho, run_cfg.k), bound_m);
    const double rk = std::pow(op.rho, run_cfg.k);

    CsvWriter csv(out);
    csv.row({"outer_iter", "grad_norm", "ratio", "guard_taken", "coeff_l1", "bound_hat_rho",
             "rho_kN"});
    double grad_prev = trace.grad_norm0;
    for (const OuterRecord& rec : trace.records) {
        double bound = rk;
        if (have_knots) {
            const double quad = 3.0 * (op.eta / (op.L * op.L)) * grad_prev *
                                static_cast<double>(run_cfg.k) * run_cfg.k * c_eff * c_eff;
            bound = std::min(rk, evaluate_bound(knots, c_eff) + quad);
        }
        csv.row({std::to_string(rec.outer), format_double(rec.grad_norm),
                 format_double(rec.ratio), rec.extrapolated ? "extrapolated" : "fallback",
                 format_double(rec.coeff_l1), format_double(bound),
                 format_double(trace.grad_norm0 * std::pow(op.rho, double(run_cfg.k) * rec.outer))});
        grad_prev = rec.grad_norm;
    }
    return diverged ? 2 : 0;
}

int cmd_thresholds(const Config& cfg, std::ostream& out, std::ostream&) {
    cfg.require_known({"rho", "k", "alpha", "eta", "L", "grad_norm0", "out", "seed"});
    const RateParams p(cfg.get_double("rho"), cfg.get_int("k"));
    const auto at = alpha_thresholds(p);
    const auto gt = grad_thresholds(p);
    out << "rho = " << format_double(p.rho) << "\n";
    out << "k = " << p.k << "\n";
    out << "alpha0 = " << format_double(at.alpha0) << "\n";
    out << "alpha1 = " << format_double(at.alpha1) << "\n";
    out << "alpha2 = " << format_double(at.alpha2) << "\n";
    out << "alpha3 = " << format_double(gt.alpha3) << "\n";
    out << "alpha4 = " << format_double(gt.alpha4) << "\n";
    out << "alpha5 = " << format_double(gt.alpha5) << "\n";
    if (cfg.has("alpha")) {
        const double alpha = cfg.get_double("alpha");
        out << "alpha = " << format_double(alpha) << "\n";
        out << "clears_alpha0 = " << (alpha < at.alpha0 ? "yes" : "no") << "\n";
        out << "clears_alpha1 = " << (alpha < at.alpha1 ? "yes" : "no") << "\n";
        out << "clears_alpha2 = " << (alpha < at.alpha2 ? "yes" : "no") << "\n";
    }
    if (cfg.has("eta")) {
        const double eta = cfg.get_double("eta");
        const double big_l = cfg.get_double("L", 1.0);
        const double g0 = cfg.get_double("grad_norm0");
        const double alpha_grad = (eta / (big_l * big_l)) * g0;
        out << "alpha_grad = " << format_double(alpha_grad) << "\n";
        out << "clears_alpha3 = " << (alpha_grad < gt.alpha3 ? "yes" : "no") << "\n";
        out << "clears_alpha4 = " << (alpha_grad < gt.alpha4 ? "yes" : "no") << "\n";
        out << "clears_alpha5 = " << (alpha_grad < gt.alpha5 ? "yes" : "no") << "\n";
        out << "n_threshold = " << format_double(n_threshold(p, eta, big_l, g0)) << "\n";
    }
    return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    const std::string usage =
        "usage: caa <rates|chebsolve|run|thresholds> [--config path] [--out path] [--plot] "
        "[--seed u64] [--key value ...]\n";
    if (argc < 2) {
        err << usage;
        return 1;
    }
    const std::string command = argv[1];
    if (command != "rates" && command != "chebsolve" && command != "run" &&
        command != "thresholds") {
        err << "unknown command '" << command << "'\n" << usage;
        return 1;
    }
    std::string config_path, out_path;
    bool plot = false;
    std::vector<std::pair<std::string, std::string>> overrides;
    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--plot") {
            plot = true;
            continue;
        }
        if (arg.rfind("--", 0) != 0 || arg.size() <= 2) {
            err << "unexpected argument '" << arg << "'\n" << usage;
            return 1;
        }
        if (i + 1 >= argc) {
            err << "flag '" << arg << "' needs a value\n" << usage;
            return 1;
        }
        const std::string key = arg.substr(2);
        const std::string value = argv[++i];
        if (key == "config")
            config_path = value;
        else if (key == "out")
            out_path = value;
        else
            overrides.emplace_back(key, value);
    }

    try {
        Config cfg;
        if (!config_path.empty()) cfg = Config::from_file(config_path);
        for (const auto& [k, v] : overrides) cfg.set(k, v);

        std::ofstream file;
        std::ostream* target = &out;
        if (!out_path.empty()) {
            file.open(out_path, std::ios::binary);
            if (!file) {
                err << "cannot open output file: " << out_path << "\n";
                return 1;
            }
            target = &file;
        }

        int rc;
        if (command == "rates")
            rc = cmd_rates(cfg, *target, err);
        else if (command == "chebsolve")
            rc = cmd_chebsolve(cfg, *target, err);
        else if (command == "run")
            rc = cmd_run(cfg, *target, err);
        else
            rc = cmd_thresholds(cfg, *target, err);
        file.close();

        if (plot && !out_path.empty() && command != "thresholds")
            plot_csv(out_path, out_path + ".svg");
        return rc;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "invalid parameters: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        err << "invalid parameters: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace caa
