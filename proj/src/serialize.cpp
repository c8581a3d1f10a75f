#include "mdim/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mdim {

namespace fs = std::filesystem;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json formula_to_json(const Formula& f) {
    json j;
    j["kind"] = f.kind;
    if (f.kind == "interval_grid") {
        j["points"] = static_cast<long>(f.params.at(0));
        j["lo"] = f.params.at(1);
        j["hi"] = f.params.at(2);
    } else if (f.kind == "cantor") {
        j["depth"] = static_cast<long>(f.params.at(0));
    } else if (f.kind == "discrete") {
        j["symbols"] = static_cast<long>(f.params.at(0));
    } else if (f.kind == "product") {
        j["factors"] = json::array();
        for (const auto& g : f.factors) j["factors"].push_back(formula_to_json(g));
    }
    return j;
}

json alphabet_to_json(const Alphabet& a) {
    json j = formula_to_json(a.formula());
    if (a.formula().kind == "dense" || a.formula().kind.empty()) {
        j["kind"] = "dense";
        j["labels"] = a.labels();
        std::vector<double> m;
        for (std::size_t p = 0; p < a.size(); ++p)
            for (std::size_t q = 0; q < a.size(); ++q) m.push_back(a.dist(static_cast<Symbol>(p), static_cast<Symbol>(q)));
        j["matrix"] = m;
    }
    j["tail"] = a.label(a.tail());
    if (a.has_valuation()) j["valuation"] = a.valuation();
    j["resolution"] = a.resolution();
    j["size"] = a.size();
    j["diam"] = a.diam();
    return j;
}

namespace {

Alphabet build_alphabet(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "interval_grid")
        return interval_grid(j.at("points").get<std::size_t>(), j.value("lo", 0.0), j.value("hi", 1.0));
    if (kind == "cantor") return cantor_alphabet(j.at("depth").get<int>());
    if (kind == "discrete") return discrete_alphabet(j.at("symbols").get<std::size_t>());
    if (kind == "product") {
        const json& f = j.at("factors");
        if (!f.is_array() || f.size() != 2) fail(ErrorKind::config, "bad-config", "product needs exactly two factors");
        return product_alphabet(build_alphabet(f[0]), build_alphabet(f[1]));
    }
    if (kind == "dense")
        return dense_alphabet(j.at("labels").get<std::vector<std::string>>(), j.at("matrix").get<std::vector<double>>());
    if (kind == "coords")
        return Alphabet::from_coords(j.at("labels").get<std::vector<std::string>>(), j.at("coords").get<std::vector<double>>(),
                                     j.at("dim").get<std::size_t>());
    fail(ErrorKind::config, "bad-config", "unknown metric kind '" + kind + "'");
}

}  // namespace

Alphabet alphabet_from_json(const json& j) {
    try {
        Alphabet a = build_alphabet(j);
        if (j.contains("tail")) {
            const json& t = j["tail"];
            if (t.is_string()) {
                auto s = a.find(t.get<std::string>());
                if (!s) fail(ErrorKind::config, "bad-tail", "unknown tail label");
                a.set_tail(*s);
            } else {
                a.set_tail(t.get<Symbol>());
            }
        }
        if (j.contains("valuation")) a.set_valuation(j["valuation"].get<std::vector<double>>());
        if (j.contains("resolution")) a.set_resolution(j["resolution"].get<double>());
        return a;
    } catch (const json::exception& e) {
        fail(ErrorKind::config, "bad-config", std::string("alphabet document: ") + e.what());
    }
}

std::string point_line(const SymbolicPoint& x) {
    std::ostringstream os;
    os << x.lo() << ' ' << x.hi() << ' ' << x.tail() << " :";
    for (Symbol s : x.word()) os << ' ' << s;
    return os.str();
}

SymbolicPoint parse_point_line(const std::string& line) {
    std::istringstream is(line);
    long lo = 0, hi = 0;
    long tail = 0;
    std::string colon;
    if (!(is >> lo >> hi >> tail >> colon) || colon != ":" || hi < lo || tail < 0 || tail > 65535)
        fail(ErrorKind::config, "bad-point", "malformed point line");
    std::vector<Symbol> w;
    long s = 0;
    while (is >> s) {
        if (s < 0 || s > 65535) fail(ErrorKind::config, "bad-point", "symbol out of range");
        w.push_back(static_cast<Symbol>(s));
    }
    if (!is.eof() || static_cast<long>(w.size()) != hi - lo + 1)
        fail(ErrorKind::config, "bad-point", "window length does not match the symbol list");
    return SymbolicPoint(lo, std::move(w), static_cast<Symbol>(tail));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::config, "io-error", "cannot write " + path.string());
    os << text;
    if (!os) fail(ErrorKind::config, "io-error", "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::config, "missing-artifact", "cannot read " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::config, "bad-config", path.string() + ": " + e.what());
    }
}

void write_points(const fs::path& path, const std::vector<SymbolicPoint>& points) {
    std::string out;
    for (const auto& x : points) out += point_line(x) + "\n";
    write_text(path, out);
}

std::vector<SymbolicPoint> read_points(const fs::path& path) {
    std::istringstream is(read_text(path));
    std::vector<SymbolicPoint> out;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) out.push_back(parse_point_line(line));
    return out;
}

void write_measure(const fs::path& path, const EmpiricalMeasure& mu) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < mu.size(); ++i) os << mu.weights[i] << ' ' << point_line(mu.atoms[i]) << '\n';
    write_text(path, os.str());
}

EmpiricalMeasure read_measure(const fs::path& path) {
    std::istringstream is(read_text(path));
    EmpiricalMeasure mu;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::size_t sp = line.find(' ');
        if (sp == std::string::npos) fail(ErrorKind::config, "bad-measure", "malformed measure line");
        try {
            mu.weights.push_back(std::stod(line.substr(0, sp)));
        } catch (const std::exception&) {
            fail(ErrorKind::config, "bad-measure", "malformed weight");
        }
        mu.atoms.push_back(parse_point_line(line.substr(sp + 1)));
    }
    mu.validate(1e-9);
    return mu;
}

json plan_to_json(const SegmentPlan& plan, const std::vector<std::string>& source_refs) {
    json j;
    j["eps"] = plan.eps;
    j["segments"] = json::array();
    for (std::size_t i = 0; i < plan.segments.size(); ++i) {
        json s;
        s["source"] = i < source_refs.size() ? source_refs[i] : std::to_string(i);
        s["a"] = plan.segments[i].a;
        s["b"] = plan.segments[i].b;
        j["segments"].push_back(s);
    }
    return j;
}

json to_json(const CriticalExponent& c) {
    return json{{"eps", c.eps},         {"N", c.N},
                {"n_max", c.n_max},     {"s_lo", c.s_lo},
                {"s_hi", c.s_hi},       {"weight_lo", number(c.weight_lo)},
                {"weight_hi", number(c.weight_hi)}, {"exponent", c.value},
                {"probes", c.probes},   {"bound_side", c.bound_side}};
}

json to_json(const CapacityEstimate& c) {
    json rows = json::array();
    for (const auto& r : c.rows) rows.push_back({{"N", r.N}, {"count", r.count}, {"exponent", r.exponent}});
    return json{{"eps", c.eps}, {"upper", c.upper}, {"lower", c.lower}, {"bound_side", c.bound_side}, {"rows", rows}};
}

json to_json(const MassCertificate& c, bool with_balls) {
    json j{{"measure", c.measure_ref}, {"eps", c.eps},       {"N", c.N},
           {"exponent", c.s0},         {"verdict", c.pass ? "pass" : "fail"}, {"bound_side", c.bound_side},
           {"balls_checked", c.balls.size()}};
    if (c.violation) {
        const CheckedBall& b = c.balls[*c.violation];
        j["violation"] = {{"index", *c.violation}, {"n", b.n}, {"measure", b.measure}, {"bound", number(b.bound)},
                          {"center", point_line(b.center)}};
    } else {
        j["violation"] = nullptr;
    }
    if (with_balls) {
        json balls = json::array();
        for (const auto& b : c.balls)
            balls.push_back({{"n", b.n}, {"measure", b.measure}, {"bound", number(b.bound)}, {"intersects", b.intersects},
                             {"ok", b.ok}});
        j["ledger"] = balls;
    }
    return j;
}

json to_json(const MoranSchedule& s) {
    return json{{"eps0", s.eps0},   {"gamma", s.gamma},       {"alpha1", s.alpha1},     {"alpha2", s.alpha2},
                {"K", s.K},         {"growth_a", s.growth_a}, {"growth_b", s.growth_b}, {"delta", s.delta},
                {"V", s.V},         {"nhat", s.nhat},         {"N", s.N},               {"L", s.L},
                {"t", s.t},         {"M", s.M}};
}

MoranSchedule schedule_from_json(const json& j) {
    try {
        MoranSchedule s;
        s.eps0 = j.at("eps0").get<double>();
        s.gamma = j.at("gamma").get<double>();
        s.alpha1 = j.at("alpha1").get<double>();
        s.alpha2 = j.at("alpha2").get<double>();
        s.K = j.at("K").get<int>();
        s.growth_a = j.at("growth_a").get<double>();
        s.growth_b = j.at("growth_b").get<double>();
        s.delta = j.at("delta").get<std::vector<double>>();
        s.V = j.at("V").get<std::vector<long>>();
        s.nhat = j.at("nhat").get<std::vector<long>>();
        s.N = j.at("N").get<std::vector<long>>();
        s.L = j.at("L").get<std::vector<long>>();
        s.t = j.at("t").get<std::vector<long>>();
        s.M = j.at("M").get<std::vector<std::size_t>>();
        return s;
    } catch (const json::exception& e) {
        fail(ErrorKind::config, "bad-config", std::string("schedule document: ") + e.what());
    }
}

json to_json(const CheckResult& r) {
    return json{{"pass", r.pass}, {"checked", r.checked}, {"worst_margin", r.worst_margin}, {"a", r.a}, {"b", r.b}};
}

json to_json(const LevelReport& r) {
    return json{{"k", r.k},
                {"mode", r.sampled ? "sampled" : "exact"},
                {"pass", r.pass()},
                {"separation", to_json(r.separation)},
                {"disjointness", to_json(r.disjointness)},
                {"nesting", to_json(r.nesting)},
                {"siblings", to_json(r.siblings)}};
}

json to_json(const OscillationCertificate& c) {
    json cps = json::array();
    for (const auto& p : c.checkpoints)
        cps.push_back({{"k", p.k}, {"t", p.t}, {"average", p.average}, {"alpha", p.alpha}, {"bound", p.bound},
                       {"var", p.var}, {"ok", p.ok}});
    return json{{"pass", c.pass}, {"oscillation", c.oscillation}, {"checkpoints", cps}};
}

void write_level_directory(const fs::path& dir, const MoranSchedule& s, const std::vector<FractalLevel>& levels) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::config, "io-error", "cannot create " + dir.string());
    json sched = to_json(s);
    sched["schema_version"] = kSchemaVersion;
    write_json(dir / "schedule.json", sched);
    for (const auto& lv : levels) {
        std::string k = std::to_string(lv.k);
        write_points(dir / ("level_" + k + "_centers.txt"), lv.centers);
        std::string csv = "child,parent,tuple\n";
        for (std::size_t i = 0; i < lv.centers.size(); ++i) {
            csv += std::to_string(i) + "," + std::to_string(lv.parent[i]) + ",";
            for (std::size_t d = 0; d < lv.tuples[i].size(); ++d) csv += (d ? " " : "") + std::to_string(lv.tuples[i][d]);
            csv += "\n";
        }
        write_text(dir / ("level_" + k + "_descent.csv"), csv);
    }
}

}  // namespace mdim
