#include "hoqmc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hoqmc/util.hpp"

namespace hoqmc {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string JsonWriter::escape(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
    return out;
}

JsonWriter& JsonWriter::field(const std::string& key, const std::string& v) {
    items_.emplace_back(key, escape(v));
    return *this;
}
JsonWriter& JsonWriter::field(const std::string& key, double v) {
    items_.emplace_back(key, std::isfinite(v) ? format_double(v) : "null");
    return *this;
}
JsonWriter& JsonWriter::field(const std::string& key, std::int64_t v) {
    items_.emplace_back(key, std::to_string(v));
    return *this;
}
JsonWriter& JsonWriter::field(const std::string& key, std::uint64_t v) {
    items_.emplace_back(key, std::to_string(v));
    return *this;
}
JsonWriter& JsonWriter::field(const std::string& key, bool v) {
    items_.emplace_back(key, v ? "true" : "false");
    return *this;
}
JsonWriter& JsonWriter::field_raw(const std::string& key, const std::string& raw) {
    items_.emplace_back(key, raw);
    return *this;
}

std::string JsonWriter::str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ",";
        out += escape(items_[i].first) + ":" + items_[i].second;
    }
    out += "}";
    return out;
}

std::string JsonWriter::array(const std::vector<std::string>& raw_items) {
    std::string out = "[";
    for (std::size_t i = 0; i < raw_items.size(); ++i) {
        if (i) out += ",";
        out += raw_items[i];
    }
    out += "]";
    return out;
}

// ---------------------------------------------------------------------------

std::string serialize_rule_spec(const InterlacedRuleSpec& spec) {
    std::string out = "hoqmc-pointset v1\n";
    out += "b=" + std::to_string(spec.b);
    out += " m=" + std::to_string(spec.m);
    out += " alpha=" + std::to_string(spec.alpha);
    out += " s=" + std::to_string(spec.s);
    out += " N=" + std::to_string(spec.point_count());
    out += " modulus=" + std::to_string(spec.modulus.to_int());
    out += " gen=";
    for (std::size_t k = 0; k < spec.gen.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(spec.gen[k].to_int());
    }
    out += "\n";
    return out;
}

std::string serialize_point_set(const InterlacedRuleSpec& spec, const PointSet& pts) {
    std::string out = serialize_rule_spec(spec);
    std::uint64_t n = pts.size();
    for (std::uint64_t i = 0; i < n; ++i) {
        for (int j = 0; j < pts.s; ++j) {
            if (j) out += ' ';
            out += std::to_string(pts.at(i, j));
        }
        out += '\n';
    }
    return out;
}

namespace {

std::map<std::string, std::string> parse_header_line(const std::string& line) {
    std::map<std::string, std::string> kv;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("pointset header: expected key=value, got '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

}  // namespace

InterlacedRuleSpec parse_rule_spec(const std::string& text) {
    std::istringstream iss(text);
    std::string line;
    if (!std::getline(iss, line) || line != "hoqmc-pointset v1")
        throw std::runtime_error("pointset: bad magic line");
    if (!std::getline(iss, line)) throw std::runtime_error("pointset: missing header");
    auto kv = parse_header_line(line);
    for (const char* key : {"b", "m", "alpha", "s", "N", "modulus", "gen"})
        if (!kv.count(key))
            throw std::runtime_error(std::string("pointset: missing field ") + key);
    InterlacedRuleSpec spec;
    spec.b = static_cast<std::uint32_t>(std::stoul(kv["b"]));
    spec.m = std::stoi(kv["m"]);
    spec.alpha = std::stoi(kv["alpha"]);
    spec.s = std::stoi(kv["s"]);
    spec.modulus = PolyFb::from_int(spec.b, std::stoull(kv["modulus"]));
    std::istringstream gens(kv["gen"]);
    std::string g;
    while (std::getline(gens, g, ','))
        spec.gen.push_back(PolyFb::from_int(spec.b, std::stoull(g)));
    if (std::stoull(kv["N"]) != spec.point_count())
        throw std::runtime_error("pointset: N inconsistent with b^m");
    spec.validate();
    return spec;
}

PointSet parse_point_set(const std::string& text) {
    InterlacedRuleSpec spec = parse_rule_spec(text);
    std::istringstream iss(text);
    std::string line;
    std::getline(iss, line);
    std::getline(iss, line);

    PointSet pts;
    pts.b = spec.b;
    pts.m = spec.m;
    pts.alpha = spec.alpha;
    pts.s = spec.s;
    pts.denominator = ipow_u64(spec.b, spec.alpha * spec.m);
    std::uint64_t n = spec.point_count();
    pts.coords.reserve(n * spec.s);
    while (std::getline(iss, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::uint64_t v;
        while (row >> v) {
            if (v >= pts.denominator)
                throw std::runtime_error("pointset: numerator out of range");
            pts.coords.push_back(v);
        }
    }
    if (pts.coords.size() != n * static_cast<std::uint64_t>(spec.s))
        throw std::runtime_error("pointset: row data does not match N x s");
    return pts;
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> parse_kv_file(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream iss(text);
    std::string line;
    while (std::getline(iss, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\r");
            std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

AffineDiffusionProblem parse_problem(const std::string& text) {
    auto kv = parse_kv_file(text);
    AffineDiffusionProblem p;
    if (kv.count("a0")) p.a0 = std::stod(kv["a0"]);
    if (kv.count("c")) p.c = std::stod(kv["c"]);
    if (kv.count("theta")) p.theta = std::stod(kv["theta"]);
    if (kv.count("f")) p.f = FunctionSpec::parse(kv["f"]);
    if (kv.count("g")) p.g = FunctionSpec::parse(kv["g"]);
    if (kv.count("p0")) p.p0 = std::stod(kv["p0"]);
    p.validate();
    return p;
}

std::string serialize_problem(const AffineDiffusionProblem& p) {
    std::string out;
    out += "a0 = " + format_double(p.a0) + "\n";
    out += "c = " + format_double(p.c) + "\n";
    out += "theta = " + format_double(p.theta) + "\n";
    out += "f = \"" + p.f.str() + "\"\n";
    out += "g = \"" + p.g.str() + "\"\n";
    out += "p0 = " + format_double(p.p0) + "\n";
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> parse_beta_file(const std::string& text) {
    std::vector<double> beta;
    std::istringstream iss(text);
    std::string line;
    while (std::getline(iss, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream row(line);
        double v;
        while (row >> v) beta.push_back(v);
    }
    if (beta.empty()) throw std::runtime_error("beta file: no values");
    return beta;
}

LevelSchedule parse_schedule(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LevelSchedule sch;
    sch.b = j.value("b", 2u);
    sch.alpha = j.value("alpha", 1);
    for (const auto& lev : j.at("levels")) {
        Level l;
        l.mesh_m = lev.at("M").get<int>();
        l.s = lev.at("s").get<int>();
        l.m = lev.at("m").get<int>();
        sch.levels.push_back(l);
    }
    sch.validate(false);
    return sch;
}

std::string serialize_schedule(const LevelSchedule& sch) {
    std::vector<std::string> levels;
    for (const auto& l : sch.levels) {
        JsonWriter w;
        w.field("M", static_cast<std::int64_t>(l.mesh_m));
        w.field("s", static_cast<std::int64_t>(l.s));
        w.field("m", static_cast<std::int64_t>(l.m));
        levels.push_back(w.str());
    }
    JsonWriter w;
    w.field("b", static_cast<std::uint64_t>(sch.b));
    w.field("alpha", static_cast<std::int64_t>(sch.alpha));
    w.field_raw("levels", JsonWriter::array(levels));
    return w.str() + "\n";
}

std::string admissibility_json(const AdmissibilityReport& rep) {
    JsonWriter w;
    w.field("kappa", rep.kappa);
    w.field("mu0", rep.mu0);
    w.field("mu", rep.mu);
    w.field("ok", rep.ok);
    return w.str() + "\n";
}

}  // namespace hoqmc
