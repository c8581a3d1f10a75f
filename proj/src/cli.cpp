#include "mdim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>

namespace mdim {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
    if (!std::isfinite(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string fmt(long x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }
std::string fmt(bool x) { return x ? "true" : "false"; }
std::string fmt(const char* x) { return x; }
std::string fmt(const std::string& x) { return x; }

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    template <class... T>
    void row(const T&... cells) {
        std::vector<std::string> r{fmt(cells)...};
        if (r.size() != header_.size()) fail(ErrorKind::config, "internal", "csv row width mismatch");
        rows_.push_back(std::move(r));
    }
    std::size_t size() const { return rows_.size(); }

    std::string str() const {
        std::string out = join(header_);
        for (const auto& r : rows_) out += join(r);
        return out;
    }
    void write(const fs::path& p) const { write_text(p, str()); }

private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
        return s + "\n";
    }
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

json summary_header(const std::string& command, const ExperimentConfig& cfg, const RunContext& ctx) {
    return json{{"schema_version", kSchemaVersion}, {"command", command}, {"seed", cfg.seed}, {"mode", mode_name(ctx.mode)}};
}

void prepare_out(const RunContext& ctx) {
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) fail(ErrorKind::config, "io-error", "cannot create " + ctx.out.string());
}

Strategy parse_strategy(const json& b) {
    std::string s = b.value("strategy", std::string("greedy"));
    if (s == "greedy") return Strategy::greedy;
    if (s == "exact") return Strategy::exact;
    fail(ErrorKind::config, "bad-config", "strategy must be greedy or exact");
}

GrowthOptions growth_options(const json& b, const ExperimentConfig& cfg, const RunContext& ctx) {
    GrowthOptions opt;
    opt.strategy = parse_strategy(b);
    opt.depth_margin = b.value("depth_margin", 0L);
    opt.enumerate.cap = b.value("cap", 1e8);
    opt.enumerate.seed = cfg.seed;
    opt.enumerate.sample_size = ctx.mode == Mode::sampled ? b.value("sample_size", std::size_t{4096}) : 0;
    opt.separation.workers = ctx.workers;
    return opt;
}

// Discretization following the scale: interval grids with spacing at most
// eps / spacing_ratio, Cantor levels with 3^-depth below eps.
Alphabet alphabet_for_eps(const json& doc, double eps) {
    std::string kind = doc.at("kind").get<std::string>();
    json concrete = doc;
    if (kind == "interval_grid") {
        double lo = doc.value("lo", 0.0), hi = doc.value("hi", 1.0);
        double ratio = doc.value("spacing_ratio", 3.0);
        concrete["points"] = static_cast<std::size_t>(std::ceil(ratio * (hi - lo) / eps - 1e-9)) + 1;
    } else if (kind == "cantor") {
        int depth = static_cast<int>(std::ceil(std::log(1.0 / eps) / std::log(3.0) - 1e-9)) + doc.value("depth_offset", 1);
        concrete["depth"] = std::max(1, depth);
    } else {
        fail(ErrorKind::config, "bad-config", "per_eps supports interval_grid and cantor");
    }
    concrete.erase("spacing_ratio");
    concrete.erase("depth_offset");
    return alphabet_from_json(concrete);
}

std::vector<SymbolicPoint> all_words(const ShiftSystem& sys, long depth, double cap) {
    EnumerateOptions eo;
    eo.cap = cap;
    CandidateFamily fam = enumerate_candidates(sys, depth, eo);
    std::vector<SymbolicPoint> pts;
    pts.reserve(fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i) pts.push_back(fam.point(i));
    return pts;
}

json mdim_json(const MdimEstimate& e) {
    json rows = json::array();
    for (const auto& r : e.rows)
        rows.push_back({{"eps", r.eps},
                        {"htop", r.htop},
                        {"upper", r.ledger.upper},
                        {"lower", r.ledger.lower},
                        {"residual", r.ledger.residual},
                        {"resolution", r.resolution}});
    return json{{"estimate", e.fitted}, {"upper", e.upper},   {"lower", e.lower},
                {"residual", e.residual}, {"sampled", e.sampled}, {"rows", rows}};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

}  // namespace

ShiftSystem ExperimentConfig::system() const { return ShiftSystem(alphabet_from_json(alphabet_doc), truncation); }

Observable ExperimentConfig::make_observable(const Alphabet& a) const {
    std::string kind = observable.value("kind", std::string("valuation"));
    if (kind == "valuation") return Observable::valuation(a);
    if (kind == "constant") return Observable::constant(observable.at("value").get<double>(), a.size());
    if (kind == "table") {
        auto t = observable.at("values").get<std::vector<double>>();
        if (t.size() != a.size()) fail(ErrorKind::config, "bad-observable", "observable table does not match the alphabet");
        return Observable(std::move(t));
    }
    fail(ErrorKind::config, "bad-observable", "unknown observable kind '" + kind + "'");
}

const json& ExperimentConfig::block(const std::string& name) const {
    static const json empty = json::object();
    auto it = raw.find(name);
    return it == raw.end() ? empty : *it;
}

ExperimentConfig parse_config(const json& j) {
    try {
        if (!j.is_object()) fail(ErrorKind::config, "bad-config", "config must be a JSON object");
        ExperimentConfig c;
        c.raw = j;
        const json& sys = j.at("system");
        c.alphabet_doc = sys.at("alphabet");
        c.truncation = sys.value("truncation", 20);
        c.observable = j.value("observable", json{{"kind", "valuation"}});
        c.seed = j.value("seed", std::uint64_t{1});
        return c;
    } catch (const json::exception& e) {
        fail(ErrorKind::config, "bad-config", e.what());
    }
}

ExperimentConfig load_config(const fs::path& path) { return parse_config(read_json(path)); }

json cmd_space(const ExperimentConfig& cfg, const RunContext& ctx) {
    prepare_out(ctx);
    json out = summary_header("space", cfg, ctx);
    Alphabet a = alphabet_from_json(cfg.alphabet_doc);
    MetricReport rep = verify_metric(a);
    json viol = json::array();
    for (const auto& v : rep.violations)
        viol.push_back({{"kind", violation_name(v.kind)}, {"a", v.a}, {"b", v.b}, {"c", v.c}, {"excess", v.excess}});
    out["alphabet"] = alphabet_to_json(a);
    out["metric_valid"] = rep.valid();
    out["violations"] = viol;
    if (!rep.valid()) {
        write_json(ctx.out / "space.json", out);
        const auto& v = rep.violations.front();
        fail(ErrorKind::config, "invalid-metric",
             std::to_string(rep.violations.size()) + " violations, first " + violation_name(v.kind) + " at (" +
                 std::to_string(v.a) + ", " + std::to_string(v.b) + ", " + std::to_string(v.c) + ")");
    }
    const json& b = cfg.block("space");
    auto eps_grid = b.at("eps_grid").get<std::vector<double>>();
    std::vector<Alphabet> family;
    if (b.contains("family"))
        for (const auto& d : b["family"]) family.push_back(alphabet_from_json(d));
    else
        family.push_back(a);
    BoxDimension bd = box_dimension_estimate(family, eps_grid, b.value("exact_threshold", std::size_t{1} << 16));

    Csv csv({"eps", "abs_log_eps", "count", "lower_bound", "exact", "resolution", "depth", "mode", "bound_side"});
    json rows = json::array();
    for (const auto& r : bd.rows) {
        csv.row(r.eps, std::fabs(std::log(r.eps)), r.count, r.lower_bound, r.exact, bd.resolution, 0L, mode_name(Mode::exact),
                "upper");
        rows.push_back({{"eps", r.eps}, {"count", r.count}, {"lower_bound", r.lower_bound}, {"exact", r.exact}});
    }
    csv.write(ctx.out / "space.csv");
    out["box_dimension"] = {{"slope", bd.slope},
                            {"residual", bd.residual},
                            {"upper_slope", bd.upper_slope},
                            {"lower_slope", bd.lower_slope},
                            {"resolution", bd.resolution},
                            {"rows", rows}};
    write_json(ctx.out / "space.json", out);
    return out;
}

json cmd_mdim(const ExperimentConfig& cfg, const RunContext& ctx) {
    prepare_out(ctx);
    json out = summary_header("mdim", cfg, ctx);
    const json& b = cfg.block("mdim");
    auto eps_grid = b.at("eps_grid").get<std::vector<double>>();
    auto n_grid = b.at("n_grid").get<std::vector<long>>();
    GrowthOptions opt = growth_options(b, cfg, ctx);

    std::vector<ShiftSystem> systems;
    if (b.contains("per_eps")) {
        for (double e : eps_grid) systems.emplace_back(alphabet_for_eps(b["per_eps"], e), cfg.truncation);
    } else {
        systems.assign(eps_grid.size(), cfg.system());
    }
    MdimEstimate est = mdim_estimate(systems, eps_grid, n_grid, opt);

    Csv rows({"eps", "abs_log_eps", "n", "depth", "count", "log_count", "htop_eps", "resolution", "mode", "bound_side"});
    Csv htop({"eps", "abs_log_eps", "htop", "upper", "lower", "residual", "resolution", "depth", "mode", "bound_side"});
    for (const auto& r : est.rows) {
        long depth = 0;
        for (const auto& g : r.ledger.rows) {
            rows.row(r.eps, std::fabs(std::log(r.eps)), g.n, g.depth, g.count, g.log_count, r.htop, r.resolution,
                     g.sampled ? "sampled" : "exact", "lower");
            depth = std::max(depth, g.depth);
        }
        htop.row(r.eps, std::fabs(std::log(r.eps)), r.htop, r.ledger.upper, r.ledger.lower, r.ledger.residual, r.resolution,
                 depth, r.ledger.sampled ? "sampled" : "exact", "lower");
    }
    rows.write(ctx.out / "mdim.csv");
    htop.write(ctx.out / "htop.csv");
    out["mdim"] = mdim_json(est);

    if (b.contains("cross_check")) {
        const json& cc = b["cross_check"];
        ShiftSystem sys = cfg.system();
        double eps = cc.value("eps", 0.5);
        long depth = cc.value("depth", 10L);
        long N = cc.value("N", 5L);
        long n_max = cc.value("n_max", depth);
        auto N_grid = cc.value("N_grid", std::vector<long>{5, 6, 7, 8, 9});
        auto sep_grid = cc.value("n_grid", n_grid);
        long top = std::max(n_max, *std::max_element(N_grid.begin(), N_grid.end()));
        BallTable table(sys, all_words(sys, depth, cc.value("cap", 65536.0)), eps, top, ctx.workers);
        BisectionOptions bo;
        bo.tolerance = cc.value("tolerance", 1e-3);
        CriticalExponent bowen = bowen_entropy_estimate(table, sys.alphabet().size(), N, n_max, bo);
        CapacityEstimate cap = capacity_entropy(table, N_grid);
        GrowthLedger sep = htop_eps_estimate(sys, eps, sep_grid, opt);
        double tol = cc.value("sandwich_tolerance", 0.10);
        bool left = bowen.s_lo <= cap.upper + 1e-12;
        bool right = cap.upper <= sep.slope * (1.0 + tol);
        Csv s({"quantity", "value", "eps", "N", "mode", "bound_side"});
        s.row("bowen", bowen.value, eps, N, "exact", "upper");
        s.row("bowen_bracket_lo", bowen.s_lo, eps, N, "exact", "upper");
        s.row("capacity_upper", cap.upper, eps, N_grid.front(), "exact", "upper");
        s.row("capacity_lower", cap.lower, eps, N_grid.front(), "exact", "upper");
        s.row("separated", sep.slope, eps, sep_grid.back(), sep.sampled ? "sampled" : "exact", "lower");
        s.write(ctx.out / "sandwich.csv");
        out["cross_check"] = {{"bowen", to_json(bowen)},
                              {"capacity", to_json(cap)},
                              {"separated", {{"htop", sep.slope}, {"upper", sep.upper}, {"lower", sep.lower}}},
                              {"bowen_le_capacity", left},
                              {"capacity_le_separated", right}};
    }

    if (b.contains("product")) {
        const json& pr = b["product"];
        const json& f = pr.at("factors");
        if (!f.is_array() || f.size() != 2) fail(ErrorKind::config, "bad-config", "product needs two factors");
        ShiftSystem sa(alphabet_from_json(f[0]), cfg.truncation), sb(alphabet_from_json(f[1]), cfg.truncation);
        ShiftSystem sab = product_system(sa, sb);
        MdimEstimate ea = mdim_estimate(sa, eps_grid, n_grid, opt);
        MdimEstimate eb = mdim_estimate(sb, eps_grid, n_grid, opt);
        MdimEstimate eab = mdim_estimate(sab, eps_grid, n_grid, opt);
        double tol = pr.value("tolerance", 0.05);
        bool holds = eab.fitted <= ea.fitted + eb.fitted + tol;
        Csv p({"factor_a", "factor_b", "product", "sum", "holds", "mode", "bound_side"});
        p.row(ea.fitted, eb.fitted, eab.fitted, ea.fitted + eb.fitted, holds,
              (ea.sampled || eb.sampled || eab.sampled) ? "sampled" : "exact", "lower");
        p.write(ctx.out / "product.csv");
        out["product"] = {{"factor_a", mdim_json(ea)}, {"factor_b", mdim_json(eb)}, {"product", mdim_json(eab)},
                          {"subadditive", holds}};
    }
    write_json(ctx.out / "mdim.json", out);
    return out;
}

json cmd_irregular(const ExperimentConfig& cfg, const RunContext& ctx) {
    prepare_out(ctx);
    json out = summary_header("irregular", cfg, ctx);
    ShiftSystem sys = cfg.system();
    Observable phi = cfg.make_observable(sys.alphabet());
    if (phi.is_constant()) {
        out["irregular_set"] = "empty";
        out["reason"] = "constant observable: every Birkhoff average converges";
        write_json(ctx.out / "irregular.json", out);
        return out;
    }
    const json& b = cfg.block("irregular");
    MoranParams p;
    p.eps0 = b.value("eps0", p.eps0);
    p.gamma = b.value("gamma", p.gamma);
    p.alpha1 = b.value("alpha1", p.alpha1);
    p.alpha2 = b.value("alpha2", p.alpha2);
    p.K = b.value("K", p.K);
    p.growth_a = b.value("growth_a", p.growth_a);
    p.growth_b = b.value("growth_b", p.growth_b);
    p.max_t = b.value("max_t", p.max_t);
    p.max_nhat = b.value("max_nhat", p.max_nhat);
    p.max_N = b.value("max_N", p.max_N);
    p.max_centers = b.value("max_centers", p.max_centers);
    p.candidate_cap = b.value("candidate_cap", p.candidate_cap);
    p.candidate_samples = b.value("candidate_samples", p.candidate_samples);
    p.level_samples = b.value("level_samples", p.level_samples);
    p.pair_samples = b.value("pair_samples", p.pair_samples);
    p.seed = cfg.seed;
    p.workers = ctx.workers;

    fs::path dir = ctx.out / "levels";
    MoranSchedule s = build_schedule(sys, phi, p);
    write_level_directory(dir, s, {});
    std::vector<std::string> failures;
    std::vector<FractalLevel> levels;
    json reports = json::array();
    Csv lv({"k", "t", "centers", "full_count", "M", "N", "nhat", "L", "separation", "disjointness", "nesting", "siblings",
            "mode"});
    for (int k = 1; k <= s.K; ++k) {
        SeparatedSet S = build_base_separated(sys, phi, s, k, p);
        levels.push_back(build_level(sys, k > 1 ? &levels[k - 2] : nullptr, S, s, k, ctx.mode, p));
        LevelReport rep = verify_level(sys, levels.back(), k > 1 ? &levels[k - 2] : nullptr, s, p);
        if (!rep.pass()) failures.push_back("level " + std::to_string(k) + " checks");
        reports.push_back(to_json(rep));
        const FractalLevel& L = levels.back();
        lv.row(k, L.t, L.centers.size(), L.full_count, s.M[k], s.N[k], s.nhat[k], s.L[k], rep.separation.pass,
               rep.disjointness.pass, rep.nesting.pass, rep.siblings.pass, L.sampled ? "sampled" : "exact");
        write_level_directory(dir, s, levels);
        write_json(dir / ("level_" + std::to_string(k) + "_report.json"), reports.back());
    }
    lv.write(ctx.out / "levels.csv");
    out["schedule"] = to_json(s);
    out["levels"] = reports;

    const FractalLevel& top = levels.back();
    std::size_t reps = std::min(top.centers.size(), b.value("representatives", std::size_t{4}));
    Csv osc({"leaf", "k", "t", "average", "alpha", "bound", "ok", "resolution", "depth", "mode", "bound_side"});
    json certs = json::array();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t leaf = 0; leaf < reps; ++leaf) {
        OscillationCertificate c = oscillation_certificate(sys, phi, s, top.centers[leaf]);
        if (!c.pass) failures.push_back("oscillation bound at leaf " + std::to_string(leaf));
        gap = std::min(gap, c.oscillation);
        for (const auto& cp : c.checkpoints)
            osc.row(leaf, cp.k, cp.t, cp.average, cp.alpha, cp.bound, cp.ok, sys.alphabet().resolution(), cp.t,
                    mode_name(ctx.mode), "upper");
        json cj = to_json(c);
        cj["leaf"] = leaf;
        certs.push_back(cj);
    }
    osc.write(ctx.out / "irregular.csv");
    out["oscillation"] = {{"min_gap", number(gap)}, {"certificates", certs}};
    write_json(dir / "oscillation.json", out["oscillation"]);

    if (ctx.mode == Mode::exact) {
        double S_target = b.contains("S_target")
                              ? b["S_target"].get<double>()
                              : b.value("S_factor", 0.7) * std::log(static_cast<double>(sys.alphabet().size())) /
                                    std::fabs(std::log(5.0 * s.eps0));
        int floor_level = b.value("floor_level", s.K);
        std::vector<std::pair<SymbolicPoint, long>> samples;
        std::size_t nb = std::min(top.centers.size(), b.value("ball_samples", std::size_t{64}));
        for (std::size_t i = 0; i < nb; ++i) samples.push_back({top.centers[i], top.t});
        MassCertificate mc = ball_bound_check(sys, top, s, S_target, samples, floor_level, ctx.workers);
        write_measure(dir / ("nu_" + std::to_string(s.K) + ".txt"), level_measure(top));
        write_json(dir / "ball_bound.json", to_json(mc));
        double s0 = mass_exponent(s, S_target);
        if (!mc.pass) failures.push_back("ball bound");

        const json& am = b.value("ambient", json::object());
        long depth = am.value("depth", 10L);
        long N = am.value("N", 5L);
        long n_max = am.value("n_max", depth);
        BallTable table(sys, all_words(sys, depth, am.value("cap", 65536.0)), s.eps0 / 4.0, n_max, ctx.workers);
        BisectionOptions bo;
        bo.tolerance = am.value("tolerance", 1e-3);
        CriticalExponent ambient = bowen_entropy_estimate(table, sys.alphabet().size(), N, n_max, bo);
        double ratio = s0 / ambient.value;
        out["mass"] = {{"S_target", S_target},
                       {"exponent", s0},
                       {"certificate", to_json(mc, false)},
                       {"lower_bound", mc.pass ? json(s0) : json(nullptr)},
                       {"ambient_bowen", to_json(ambient)},
                       {"ratio_to_ambient", ratio}};
    } else {
        out["mass"] = {{"skipped", "measure certificates need exact mode"}};
    }
    out["failures"] = failures;
    out["verdict"] = failures.empty() ? "pass" : "fail";
    write_json(ctx.out / "irregular.json", out);
    if (!failures.empty()) {
        std::string all;
        for (const auto& f : failures) all += (all.empty() ? "" : "; ") + f;
        fail(ErrorKind::certificate, "certificate-failed", all);
    }
    return out;
}

json cmd_report(const std::vector<fs::path>& runs, const RunContext& ctx) {
    if (runs.empty()) fail(ErrorKind::config, "missing-artifact", "no run directories given");
    for (const auto& r : runs)
        if (!fs::is_directory(r)) fail(ErrorKind::config, "missing-artifact", r.string() + " is not a directory");
    prepare_out(ctx);
    static const std::vector<std::string> names = {"space.csv",    "mdim.csv",      "htop.csv",  "sandwich.csv",
                                                   "product.csv",  "irregular.csv", "levels.csv"};
    json out{{"schema_version", kSchemaVersion}, {"command", "report"}};
    json runs_json = json::array();
    for (const auto& r : runs) runs_json.push_back(r.generic_string());
    out["runs"] = runs_json;
    json merged = json::object();
    std::map<std::string, std::vector<std::vector<std::string>>> tables;  // name -> rows of run-indexed lines
    for (const auto& name : names) {
        std::string header, body;
        std::size_t count = 0;
        bool any = false;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            fs::path f = runs[i] / name;
            if (!fs::exists(f)) continue;
            std::istringstream is(read_text(f));
            std::string line, h;
            if (!std::getline(is, h)) continue;
            if (any && h != header) fail(ErrorKind::config, "bad-artifact", name + " headers differ between runs");
            header = h;
            any = true;
            while (std::getline(is, line))
                if (!line.empty()) {
                    body += line + "\n";
                    ++count;
                    auto cells = split(line, ',');
                    cells.insert(cells.begin(), std::to_string(i));
                    tables[name].push_back(std::move(cells));
                }
        }
        if (!any) continue;
        write_text(ctx.out / ("merged_" + name), header + "\n" + body);
        merged[name] = count;
        tables[name + "#header"].push_back(split(header, ','));
    }
    if (merged.empty()) fail(ErrorKind::config, "missing-artifact", "no known CSV artifacts in the given runs");
    out["merged"] = merged;

    auto column = [&](const std::string& name, const std::string& col) {
        const auto& h = tables[name + "#header"].front();
        auto it = std::find(h.begin(), h.end(), col);
        if (it == h.end()) fail(ErrorKind::config, "bad-artifact", name + " lacks column " + col);
        return static_cast<std::size_t>(it - h.begin()) + 1;
    };
    if (merged.contains("htop.csv")) {
        Csv plot({"run", "abs_log_eps", "htop"});
        std::size_t a = column("htop.csv", "abs_log_eps"), h = column("htop.csv", "htop");
        for (const auto& r : tables["htop.csv"]) plot.row(r[0], r[a], r[h]);
        plot.write(ctx.out / "plot_htop.csv");
    }
    if (merged.contains("irregular.csv")) {
        Csv plot({"run", "leaf", "k", "average"});
        std::size_t l = column("irregular.csv", "leaf"), k = column("irregular.csv", "k"),
                    a = column("irregular.csv", "average");
        for (const auto& r : tables["irregular.csv"]) plot.row(r[0], r[l], r[k], r[a]);
        plot.write(ctx.out / "plot_birkhoff.csv");
    }
    json summaries = json::array();
    for (const auto& r : runs) {
        json s = json::object();
        for (const char* n : {"space.json", "mdim.json", "irregular.json"})
            if (fs::exists(r / n)) s[n] = read_json(r / n);
        summaries.push_back(s);
    }
    out["summaries"] = summaries;
    write_json(ctx.out / "report.json", out);
    return out;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::config: return 2;
        case ErrorKind::infeasible: return 3;
        case ErrorKind::certificate: return 4;
    }
    return 2;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Metric mean dimension estimates and certified irregular points for symbolic systems"};
    std::string verb, config, out = "out", mode = "exact";
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::vector<std::string> inputs;
    app.add_option("verb", verb, "space | mdim | irregular | report")
        ->required()
        ->check(CLI::IsMember({"space", "mdim", "irregular", "report"}));
    app.add_option("runs", inputs, "run directories merged by report");
    app.add_option("--config", config, "experiment config (JSON)");
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--workers", workers, "worker threads; never changes outputs")->check(CLI::Range(1u, 256u));
    app.add_option("--mode", mode, "exact | sampled")->check(CLI::IsMember({"exact", "sampled"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    RunContext ctx;
    ctx.out = out;
    ctx.workers = workers;
    ctx.mode = mode == "sampled" ? Mode::sampled : Mode::exact;
    try {
        if (verb == "report") {
            std::vector<fs::path> runs(inputs.begin(), inputs.end());
            if (runs.empty() && !config.empty())
                for (const auto& r : read_json(config).value("runs", std::vector<std::string>{})) runs.emplace_back(r);
            cmd_report(runs, ctx);
            return 0;
        }
        if (config.empty()) fail(ErrorKind::config, "bad-config", "--config is required for " + verb);
        ExperimentConfig cfg = load_config(config);
        if (seed) cfg.seed = *seed;
        if (verb == "space") cmd_space(cfg, ctx);
        if (verb == "mdim") cmd_mdim(cfg, ctx);
        if (verb == "irregular") cmd_irregular(cfg, ctx);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const json::exception& e) {
        std::cerr << "error: bad-config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace mdim
