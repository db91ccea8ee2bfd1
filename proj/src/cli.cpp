#include "vstab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <variant>

#include "vstab/dispersion.hpp"
#include "vstab/errors.hpp"
#include "vstab/evolution.hpp"
#include "vstab/parallel.hpp"
#include "vstab/penrose.hpp"
#include "vstab/profiles.hpp"
#include "vstab/quadrature.hpp"
#include "vstab/roots.hpp"

namespace vstab {
namespace {

using Cell = std::variant<std::monostate, double, long, bool, std::string>;

struct Table {
    std::string command;
    std::vector<std::pair<std::string, Cell>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string csv_cell(const Cell& c) {
    struct V {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double d) const {
            if (std::isnan(d)) return "nan";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            return buf;
        }
        std::string operator()(long l) const { return std::to_string(l); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, c);
}

nlohmann::json json_cell(const Cell& c) {
    struct V {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(double d) const { return d; }
        nlohmann::json operator()(long l) const { return l; }
        nlohmann::json operator()(bool b) const { return b; }
        nlohmann::json operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, c);
}

void emit(const Table& t, const std::string& format, std::ostream& os) {
    if (format == "json") {
        nlohmann::json doc;
        doc["command"] = t.command;
        doc["meta"] = nlohmann::json::object();
        for (const auto& [k, v] : t.meta) doc["meta"][k] = json_cell(v);
        doc["columns"] = t.columns;
        doc["rows"] = nlohmann::json::array();
        for (const auto& r : t.rows) {
            nlohmann::json row = nlohmann::json::object();
            for (std::size_t i = 0; i < t.columns.size(); ++i) row[t.columns[i]] = json_cell(r[i]);
            doc["rows"].push_back(row);
        }
        os << doc.dump(2) << "\n";
        return;
    }
    for (const auto& [k, v] : t.meta) os << "# " << k << "=" << csv_cell(v) << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
        os << "\n";
    }
}

std::vector<double> parse_list(const std::string& text, std::size_t count, const std::string& option) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput(option, "'" + item + "' is not a number");
        }
    }
    if (out.size() != count) {
        throw InvalidInput(option, "expected " + std::to_string(count) + " comma-separated numbers");
    }
    return out;
}

struct Common {
    std::string profile;
    std::string format = "csv";
    bool json = false;
    std::string output;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--profile", c.profile, "Profile JSON file {\"kind\", \"params\", \"table\"}")->required();
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--json", c.json, "Shorthand for --format json");
    sub->add_option("--output", c.output, "Write the table to this file instead of stdout");
}

VelocityProfile load(const Common& c) { return build_profile(load_profile_spec(c.profile)); }

std::string format_of(const Common& c) { return c.json ? "json" : c.format; }

Table cmd_index(const VelocityProfile& p, const Range& r) {
    const auto ks = r.values();
    const auto reports = parallel_map(ks.size(), [&](std::size_t i) { return instability_index(p, ks[i]); });
    Table t;
    t.command = "index";
    t.columns = {"k", "n_plus", "n_minus", "n"};
    const std::size_t npts = reports.empty() ? 0 : reports.front().points.size();
    for (std::size_t j = 0; j < npts; ++j) {
        const std::string tag = std::to_string(j);
        t.columns.insert(t.columns.end(), {"s" + tag, "slope" + tag, "penrose" + tag});
    }
    for (const auto& rep : reports) {
        std::vector<Cell> row{rep.k, long(rep.n_plus), long(rep.n_minus), long(rep.n)};
        for (const auto& pt : rep.points) row.insert(row.end(), {pt.cp.s, pt.cp.slope, pt.penrose_value});
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table cmd_roots(const VelocityProfile& p, double k, const std::string& box_text) {
    Box box = default_search_box(p, k);
    if (!box_text.empty()) {
        const auto v = parse_list(box_text, 4, "--box");
        box = {cplx(v[0], v[1]), cplx(v[2], v[3])};
    }
    const auto roots = find_roots(p, k, box);
    Table t;
    t.command = "roots";
    t.meta = {{"k", k},
              {"box_re_lo", box.lo.real()},
              {"box_im_lo", box.lo.imag()},
              {"box_re_hi", box.hi.real()},
              {"box_im_hi", box.hi.imag()},
              {"count", long(roots.size())}};
    t.columns = {"re", "im", "residual", "box_winding", "newton_iters", "near_marginal"};
    for (const auto& r : roots) {
        t.rows.push_back({r.lambda.real(), r.lambda.imag(), r.residual, long(r.box_winding), long(r.newton_iters),
                          r.near_marginal});
    }
    return t;
}

Table cmd_growth(const VelocityProfile& p, const Range& r) {
    const auto curve = growth_curve(p, r.values());
    Table t;
    t.command = "growth";
    t.columns = {"k", "n", "re", "im", "near_marginal"};
    for (const auto& g : curve) {
        Cell re, im;
        if (g.lambda_max) {
            re = g.lambda_max->real();
            im = g.lambda_max->imag();
        }
        t.rows.push_back({g.k, long(g.n), re, im, g.near_marginal});
    }
    return t;
}

Table cmd_nyquist(const VelocityProfile& p, double k, const Range& r) {
    const auto ss = r.values();
    const auto w = parallel_map(ss.size(), [&](std::size_t i) { return plemelj_boundary(p, k, ss[i], Side::plus); });
    Table t;
    t.command = "nyquist";
    t.meta = {{"k", k}};
    t.columns = {"s", "re_w", "im_w"};
    for (std::size_t i = 0; i < ss.size(); ++i) t.rows.push_back({ss[i], w[i].real(), w[i].imag()});
    return t;
}

Table cmd_zone(const VelocityProfile& p, const Range& r) {
    const ZoneSpec z = zone(p);
    Table t;
    t.command = "zone";
    t.meta = {{"c", z.c}};
    t.columns = {"tau", "sigma"};
    for (const auto& [sigma, tau] : zone_boundary(z, r.values())) t.rows.push_back({tau, sigma});
    return t;
}

Table cmd_evolve(const VelocityProfile& p, double k, double T, double dt, int n_v, bool compare, std::ostream& err,
                 bool csv) {
    EvolveOptions opt;
    opt.n_v = n_v;
    std::optional<double> root_rate;
    if (compare) {
        const auto curve = growth_curve(p, {std::abs(k)});
        root_rate = curve.front().lambda_max ? curve.front().lambda_max->real() : 0.0;
        opt.expected_rate = root_rate;
    }
    const ModeEvolution ev = evolve_mode(p, k, default_initial, T, dt, opt);
    Table t;
    t.command = "evolve";
    t.meta = {{"k", k},
              {"fitted_rate", ev.fitted_rate},
              {"fit_r2", ev.fit_r2},
              {"fit_lo", ev.fit_window.lo},
              {"fit_hi", ev.fit_window.hi},
              {"overflow", ev.overflow},
              {"inconclusive", ev.inconclusive},
              {"charge_residual", ev.charge_residual}};
    t.columns = {"t", "re_g", "im_g", "abs_g"};
    if (root_rate) {
        const double ratio = *root_rate > 0 ? ev.fitted_rate / *root_rate : std::nan("");
        t.meta.emplace_back("root_rate", *root_rate);
        t.meta.emplace_back("ratio", ratio);
        t.columns.insert(t.columns.end(), {"root_rate", "ratio"});
        for (std::size_t i = 0; i < ev.times.size(); ++i) {
            t.rows.push_back({ev.times[i], ev.g_hat[i].real(), ev.g_hat[i].imag(), ev.g_abs[i], *root_rate, ratio});
        }
    } else {
        for (std::size_t i = 0; i < ev.times.size(); ++i) {
            t.rows.push_back({ev.times[i], ev.g_hat[i].real(), ev.g_hat[i].imag(), ev.g_abs[i]});
        }
    }
    if (csv) err << "fitted_rate=" << csv_cell(ev.fitted_rate) << " r2=" << csv_cell(ev.fit_r2) << "\n";
    return t;
}

Table cmd_two_stream(const VelocityProfile& p, double k, const std::string& widths, const std::string& shoulders) {
    const TwoStreamGeometry g = two_stream_geometry(p);
    const double pv = pv_cauchy(p, g.c);
    Table t;
    t.command = "two-stream";
    t.columns = {"check", "holds", "lhs", "displayed", "valley_correction", "k2"};
    t.meta = {{"a", g.a}, {"c", g.c}, {"b", g.b}, {"M", g.M}, {"f0_c", p.f0(g.c)}, {"pv_c", pv}, {"k", k},
              {"n", long(instability_index(p, k).n)}};
    t.rows.push_back({std::string("valley"), two_stream_criterion(p, g, k), pv, pv, 0.0, k * k});
    if (!widths.empty()) {
        const auto v = parse_list(widths, 2, "--widths");
        const CriterionCheck c = width_criterion(p, g, k, v[0], v[1]);
        t.rows.push_back({std::string("widths"), c.holds, c.lhs, c.displayed, c.valley_correction, c.k2});
    }
    if (!shoulders.empty()) {
        const auto v = parse_list(shoulders, 2, "--shoulders");
        const CriterionCheck c = shoulder_criterion(p, g, k, v[0], v[1]);
        t.rows.push_back({std::string("shoulders"), c.holds, c.lhs, c.displayed, c.valley_correction, c.k2});
    }
    return t;
}

Table cmd_validate(const VelocityProfile& p, bool& all_passed) {
    Table t;
    t.command = "validate";
    t.columns = {"check", "passed", "value", "limit", "detail"};
    all_passed = true;
    for (const auto& c : validate_profile(p)) {
        all_passed = all_passed && c.passed;
        t.rows.push_back({c.name, c.passed, c.value, c.limit, c.detail});
    }
    t.meta = {{"profile", p.name()}, {"passed", all_passed}};
    return t;
}

}  // namespace

std::vector<double> Range::values() const {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    if (n > 1) out.back() = b;
    return out;
}

Range parse_range(const std::string& text, const std::string& option) {
    std::stringstream ss(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw InvalidInput(option, "range must be a:b:n");
    Range r;
    try {
        std::size_t pa = 0, pb = 0, pn = 0;
        r.a = std::stod(parts[0], &pa);
        r.b = std::stod(parts[1], &pb);
        const long n = std::stol(parts[2], &pn);
        if (pa != parts[0].size() || pb != parts[1].size() || pn != parts[2].size()) throw std::invalid_argument(text);
        if (n < 1 || n > 10000000) throw InvalidInput(option, "sample count must be in [1, 1e7]");
        r.n = static_cast<int>(n);
    } catch (const InvalidInput&) {
        throw;
    } catch (const std::exception&) {
        throw InvalidInput(option, "range '" + text + "' is not a:b:n");
    }
    if (!std::isfinite(r.a) || !std::isfinite(r.b)) throw InvalidInput(option, "range endpoints must be finite");
    if (r.n == 1 && r.a != r.b) throw InvalidInput(option, "a single sample needs a == b");
    return r;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linear stability of one-dimensional Vlasov-Poisson equilibria"};
    app.require_subcommand(1);
    Common c;
    std::string k_range, s_range, tau_range, box, widths, shoulders;
    double k = 0.0, T = 0.0, dt = 0.0;
    int n_v = 2048;
    bool compare = false;

    auto* idx = app.add_subcommand("index", "Instability index per k. Columns: k,n_plus,n_minus,n,s<j>,slope<j>,penrose<j>");
    add_common(idx, c);
    idx->add_option("--k-range", k_range, "a:b:n")->required();

    auto* rts = app.add_subcommand("roots", "Certified unstable roots. Columns: re,im,residual,box_winding,newton_iters,near_marginal");
    add_common(rts, c);
    rts->add_option("--k", k, "Wave number")->required();
    rts->add_option("--box", box, "sx,sy,ex,ey corners in the lambda-plane");

    auto* gro = app.add_subcommand("growth", "Fastest growth rate per k. Columns: k,n,re,im,near_marginal");
    add_common(gro, c);
    gro->add_option("--k-range", k_range, "a:b:n")->required();
    gro->add_option("--csv", c.output, "Write CSV to this file");

    auto* nyq = app.add_subcommand("nyquist", "Boundary values w(s+i0). Columns: s,re_w,im_w");
    add_common(nyq, c);
    nyq->add_option("--k", k, "Wave number")->required();
    nyq->add_option("--s-range", s_range, "a:b:n")->required();

    auto* zon = app.add_subcommand("zone", "Boundary of the root-free zone. Columns: tau,sigma");
    add_common(zon, c);
    zon->add_option("--tau-range", tau_range, "a:b:n")->required();

    auto* evo = app.add_subcommand("evolve", "Time integration of one mode. Columns: t,re_g,im_g,abs_g[,root_rate,ratio]");
    add_common(evo, c);
    evo->add_option("--k", k, "Wave number")->required();
    evo->add_option("--T", T, "Final time")->required();
    evo->add_option("--dt", dt, "Time step")->required();
    evo->add_option("--n-v", n_v, "Velocity grid points");
    evo->add_option("--csv", c.output, "Write CSV to this file");
    evo->add_flag("--compare-roots", compare, "Append the dispersion-root growth rate and the ratio");

    auto* two = app.add_subcommand("two-stream", "Two-stream criteria. Columns: check,holds,lhs,displayed,valley_correction,k2");
    add_common(two, c);
    two->add_option("--k", k, "Wave number")->required();
    two->add_option("--widths", widths, "xi,eta: levels for the hump-width bound");
    two->add_option("--shoulders", shoulders, "sigma,tau: offsets for the shoulder bound");

    auto* val = app.add_subcommand("validate", "Profile invariant report. Columns: check,passed,value,limit,detail");
    add_common(val, c);

    std::vector<const char*> argv{"vstab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    std::string operation = "vstab";
    try {
        const VelocityProfile p = load(c);
        const std::string fmt = format_of(c);
        Table t;
        int status = kExitOk;
        if (idx->parsed()) {
            t = cmd_index(p, parse_range(k_range, "--k-range"));
        } else if (rts->parsed()) {
            t = cmd_roots(p, k, box);
        } else if (gro->parsed()) {
            t = cmd_growth(p, parse_range(k_range, "--k-range"));
        } else if (nyq->parsed()) {
            t = cmd_nyquist(p, k, parse_range(s_range, "--s-range"));
        } else if (zon->parsed()) {
            t = cmd_zone(p, parse_range(tau_range, "--tau-range"));
        } else if (evo->parsed()) {
            t = cmd_evolve(p, k, T, dt, n_v, compare, err, fmt == "csv");
        } else if (two->parsed()) {
            t = cmd_two_stream(p, k, widths, shoulders);
        } else if (val->parsed()) {
            bool ok = true;
            t = cmd_validate(p, ok);
            if (!ok) status = kExitInput;
        }
        if (c.output.empty()) {
            emit(t, fmt, out);
        } else {
            std::ofstream f(c.output);
            if (!f) throw InvalidInput("output", "cannot write '" + c.output + "'");
            emit(t, fmt, f);
        }
        return status;
    } catch (const NumericalFailure& e) {
        err << "numerical failure in " << e.what() << "\n";
        return kExitNumeric;
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violated in " << e.what() << "\n";
        return kExitInput;
    } catch (const InvalidInput& e) {
        err << "invalid input in " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error in " << operation << ": " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace vstab
