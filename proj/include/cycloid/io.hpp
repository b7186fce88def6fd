#pragma once

// JSON forms of models, ladders and reports, plus the model shorthand
// euclidean | lp:<p> | ellipse:<a>,<b> | fourier:a0=<v>[,k<k>a=<v>][,k<k>b=<v>].

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "analysis.hpp"
#include "plane.hpp"
#include "spectrum.hpp"
#include "sturm.hpp"
#include "verify.hpp"

namespace cycloid {

using json = nlohmann::ordered_json;

namespace detail {

inline double parse_number(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidModel, "bad number for " + what + ": '" + s + "'");
    }
    if (used != s.size()) throw Error(ErrorKind::InvalidModel, "bad number for " + what + ": '" + s + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

} // namespace detail

inline PlaneModel parse_model(const std::string& text)
{
    PlaneModel m;
    m.label = text;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "euclidean" && rest.empty()) {
        m.family = Euclidean{};
    } else if (head == "lp") {
        m.family = LpBall{detail::parse_number(rest, "lp exponent")};
    } else if (head == "ellipse") {
        const auto parts = detail::split(rest, ',');
        if (parts.size() != 2) throw Error(ErrorKind::InvalidModel, "ellipse needs a,b");
        m.family = Ellipse{detail::parse_number(parts[0], "a"), detail::parse_number(parts[1], "b")};
    } else if (head == "fourier") {
        FourierSupport fs;
        std::map<int, FourierTerm> terms;
        bool have_a0 = false;
        for (const auto& tok : detail::split(rest, ',')) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::InvalidModel, "fourier token without '=': " + tok);
            const std::string key = tok.substr(0, eq);
            const double v = detail::parse_number(tok.substr(eq + 1), key);
            if (key == "a0") {
                fs.a0 = v;
                have_a0 = true;
                continue;
            }
            if (key.size() < 3 || key[0] != 'k' || (key.back() != 'a' && key.back() != 'b'))
                throw Error(ErrorKind::InvalidModel, "fourier key must be a0, k<k>a or k<k>b: " + key);
            const int k = static_cast<int>(detail::parse_number(key.substr(1, key.size() - 2), "k"));
            auto& t = terms[k];
            t.k = k;
            (key.back() == 'a' ? t.a : t.b) = v;
        }
        if (!have_a0) throw Error(ErrorKind::InvalidModel, "fourier model needs a0");
        for (const auto& [k, t] : terms) fs.terms.push_back(t);
        m.family = fs;
    } else {
        throw Error(ErrorKind::InvalidModel, "unknown model '" + text + "'");
    }
    return m;
}

inline json to_json(const PlaneModel& m)
{
    json j;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Euclidean>) {
                j["family"] = "euclidean";
            } else if constexpr (std::is_same_v<T, LpBall>) {
                j["family"] = "lp";
                j["p"] = f.p;
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                j["family"] = "ellipse";
                j["a"] = f.a;
                j["b"] = f.b;
            } else {
                j["family"] = "fourier";
                j["a0"] = f.a0;
                j["terms"] = json::array();
                for (const auto& t : f.terms) j["terms"].push_back({{"k", t.k}, {"a", t.a}, {"b", t.b}});
            }
        },
        m.family);
    return j;
}

inline PlaneModel model_from_json(const json& j)
{
    PlaneModel m;
    try {
        const std::string fam = j.at("family").get<std::string>();
        if (fam == "euclidean") m.family = Euclidean{};
        else if (fam == "lp") m.family = LpBall{j.at("p").get<double>()};
        else if (fam == "ellipse") m.family = Ellipse{j.at("a").get<double>(), j.at("b").get<double>()};
        else if (fam == "fourier") {
            FourierSupport fs;
            fs.a0 = j.at("a0").get<double>();
            for (const auto& t : j.value("terms", json::array()))
                fs.terms.push_back({t.at("k").get<int>(), t.value("a", 0.0), t.value("b", 0.0)});
            m.family = fs;
        } else {
            throw Error(ErrorKind::InvalidModel, "unknown family " + fam);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidModel, e.what());
    }
    return m;
}

inline json to_json(const PlaneDiagnostics& d)
{
    json j;
    j["tol"] = d.tol;
    j["pass"] = d.pass;
    j["checks"] = json::array();
    for (const auto& c : d.checks) j["checks"].push_back({{"name", c.name}, {"residual", c.residual}, {"pass", c.pass}});
    return j;
}

inline json to_json(const Ladder& lad, const PlaneField& f)
{
    json j;
    j["model"] = to_json(f.model);
    j["n"] = f.n;
    j["ladder"] = json::array();
    for (const auto& r : lad.records) {
        j["ladder"].push_back({{"k", r.k},
                               {"branch", r.branch},
                               {"lambda", r.lambda},
                               {"ptype", to_string(r.ptype)},
                               {"double", r.double_flag}});
    }
    return j;
}

inline json to_json(const DoublingReport& d)
{
    json j;
    j["applicable"] = d.applicable;
    j["pass"] = d.pass;
    j["entries"] = json::array();
    for (const auto& e : d.entries)
        j["entries"].push_back({{"k", e.k}, {"gap", e.gap}, {"minus_id_residual", e.minus_id_residual}, {"pass", e.pass}});
    return j;
}

inline json to_json(const VertexSuiteReport& r)
{
    json j;
    j["bound"] = r.bound;
    j["pass"] = r.pass;
    j["min"] = r.min_count;
    j["max"] = r.max_count;
    j["histogram"] = r.histogram;
    j["trials"] = json::array();
    for (const auto& t : r.trials)
        j["trials"].push_back({{"seed", t.seed},
                               {"vertices", t.vertices},
                               {"cusps", t.cusps},
                               {"convex", t.convex},
                               {"width_deviation", t.width_deviation},
                               {"evolute_width", t.evolute_width}});
    return j;
}

inline json to_json(const VerifyReport& r)
{
    json j;
    j["pass"] = r.pass;
    j["checks"] = json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back(
            {{"suite", c.suite}, {"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
    if (!r.vertex_suites.empty()) {
        j["vertex_suites"] = json::array();
        for (const auto& v : r.vertex_suites) j["vertex_suites"].push_back(to_json(v));
    }
    return j;
}

/// Writes through a temporary file and renames it into place.
inline void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorKind::BadRequest, "cannot write " + tmp.string());
        os << content;
        if (!os) throw Error(ErrorKind::BadRequest, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error(ErrorKind::BadRequest, "cannot rename into " + path + ": " + ec.message());
    }
}

} // namespace cycloid
