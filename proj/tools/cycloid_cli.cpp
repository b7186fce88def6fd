// Command line front end: plane diagnostics, spectra, cycloid rendering and
// the verification suites.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cycloid/geometry.hpp"
#include "cycloid/io.hpp"
#include "cycloid/plane.hpp"
#include "cycloid/spectrum.hpp"
#include "cycloid/sturm.hpp"
#include "cycloid/verify.hpp"

namespace {

using namespace cycloid;

enum Exit : int { Ok = 0, InvariantFailure = 1, InvalidModelExit = 2, SearchFailure = 3, BadRequestExit = 4 };

struct Config {
    std::string model = "euclidean";
    std::size_t n = 2048;
    double tol = 1e-9;
    int k_max = 7;
    bool k_max_set = false;
    int k = 2;
    int branch = 1;
    std::optional<double> lambda;
    bool lambda1 = false;
    std::string v = "1,0";
    std::optional<double> probe;
    int turns = 1;
    int trials = 50;
    std::uint64_t seed = 1;
    std::string suite = "all";
    std::string out, svg, csv;
};

int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::InvalidModel: return InvalidModelExit;
    case ErrorKind::BracketFailure:
    case ErrorKind::StepUnderflow:
    case ErrorKind::LadderTooShort: return SearchFailure;
    case ErrorKind::PreconditionViolated: return InvariantFailure;
    default: return BadRequestExit;
    }
}

PlaneModel load_model(const std::string& text)
{
    if (!text.empty() && text.front() == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::InvalidModel, e.what());
        }
        return model_from_json(j);
    }
    return parse_model(text);
}

void emit(const std::string& path, const json& j)
{
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) std::cout << text;
    else write_atomic(path, text);
}

SpectrumOptions spectrum_options(const Config& c)
{
    SpectrumOptions o;
    o.tol = c.tol;
    return o;
}

int cmd_plane(const Config& c)
{
    const PlaneField f = build_plane(load_model(c.model), c.n);
    const PlaneDiagnostics d = validate_plane(f, 1e-8);
    json j;
    j["model"] = to_json(f.model);
    j["n"] = f.n;
    j["singular_nodes"] = f.singular_nodes.size();
    j["diagnostics"] = to_json(d);
    emit(c.out, j);
    return d.pass ? Ok : InvariantFailure;
}

json probe_json(const PlaneField& f, double lambda)
{
    const HalfTurn ht = half_turn(f, lambda);
    const MonodromyClass cls = classify(ht.A);
    json j;
    j["lambda"] = lambda;
    j["trace"] = ht.A.trace();
    j["det"] = ht.A.det();
    j["class"] = to_string(cls.tag);
    j["bounded"] = !cls.hyperbolic();
    j["rotation_number"] = rotation_number(ht);
    return j;
}

int cmd_spectrum(const Config& c)
{
    const PlaneField f = build_plane(load_model(c.model), c.n);
    json j;
    if (c.probe && !c.k_max_set) {
        j["model"] = to_json(f.model);
        j["n"] = f.n;
    } else {
        const Ladder lad = find_ladder(f, c.k_max, spectrum_options(c));
        j = to_json(lad, f);
        // Gap classification between consecutive pairs.
        j["gaps"] = json::array();
        for (int k = 1; k < lad.k_max(); ++k) {
            const double a = lad.get(k, 2).lambda, b = lad.get(k + 1, 1).lambda;
            json g;
            g["after_k"] = k;
            g["samples"] = json::array();
            for (double s : {0.25, 0.5, 0.75}) {
                const double l = a + s * (b - a);
                g["samples"].push_back({{"lambda", l}, {"class", to_string(classify(monodromy(f, l)).tag)}});
            }
            j["gaps"].push_back(g);
        }
    }
    if (c.probe) j["probe"] = probe_json(f, *c.probe);
    emit(c.out, j);
    return Ok;
}

Vec2 parse_vector(const std::string& s)
{
    const auto parts = cycloid::detail::split(s, ',');
    if (parts.size() != 2) throw Error(ErrorKind::BadRequest, "--v expects x,y");
    try {
        return {std::stod(parts[0]), std::stod(parts[1])};
    } catch (const std::exception&) {
        throw Error(ErrorKind::BadRequest, "--v expects x,y");
    }
}

void write_curve(const Config& c, const CurveData& curve, bool closed, json& summary)
{
    summary["samples"] = curve.size();
    summary["turns"] = curve.turns;
    summary["cusps"] = curve.cusp_nodes.size();
    summary["vertices"] = curve.vertex_nodes.size();
    if (!c.csv.empty()) write_atomic(c.csv, to_csv(curve));
    if (!c.svg.empty()) {
        SvgStyle style;
        style.closed = closed;
        write_atomic(c.svg, to_svg(curve, style));
    }
}

int cmd_cycloid(const Config& c)
{
    const PlaneField f = build_plane(load_model(c.model), c.n);
    json j;
    j["model"] = to_json(f.model);
    j["n"] = f.n;

    if (c.lambda1) {
        // Open cycloid r = [v, q] of the double eigenvalue 1.
        const Vec2 v = parse_vector(c.v);
        const auto one = lambda_one_eigenspace(f);
        Samples r(f.n);
        for (std::size_t i = 0; i < f.n; ++i) r[i] = v.x * one.r1[i] + v.y * one.r2[i];
        const std::size_t turns = static_cast<std::size_t>(std::max(c.turns, 1));
        const CurveData curve = curve_from_radius(f, tile(r, turns), {}, f.t_offset());
        const double diam = diameter(curve.points);
        j["kind"] = "open";
        j["lambda"] = 1.0;
        j["v"] = {v.x, v.y};
        j["drift_per_turn"] = {curve.drift.x / turns, curve.drift.y / turns};
        j["gap_over_diameter"] = norm(curve.drift) / diam;
        write_curve(c, curve, false, j);
        emit(c.out, j);
        return Ok;
    }

    if (c.turns > 1) {
        // Hedgehog closing after N turns with rotation number k/N.
        NTurnOptions o;
        o.hypo_k_max = c.k > c.turns ? c.k : 0;
        const auto recs = find_n_turn(f, c.turns, o);
        const NTurnRecord* pick = nullptr;
        for (const auto& r : recs)
            if (r.k == c.k && r.branch == c.branch) pick = &r;
        if (!pick) throw Error(ErrorKind::BadRequest, "no N-turn cycloid with k = " + std::to_string(c.k));
        const CurveData curve = eigen_curve(f, pick->h, pick->hw, pick->lambda);
        j["kind"] = to_string(pick->kind);
        j["N"] = pick->N;
        j["k"] = pick->k;
        j["branch"] = pick->branch;
        j["lambda"] = pick->lambda;
        j["closure_residual"] = pick->closure_residual;
        j["closure_gap"] = closure_gap(f, curve);
        write_curve(c, curve, true, j);
        emit(c.out, j);
        return Ok;
    }

    Ladder lad;
    const EigenRecord* rec = nullptr;
    if (c.lambda) {
        // Closed-curve request by eigenvalue: grow the ladder until it passes lambda.
        const double target = *c.lambda;
        int km = std::max(c.k_max, 2);
        for (;;) {
            lad = find_ladder(f, km, spectrum_options(c));
            for (const auto& r : lad.records)
                if (std::abs(r.lambda - target) <= std::max(10.0 * c.tol, 1e-6) && (!rec || std::abs(r.lambda - target) < std::abs(rec->lambda - target)))
                    rec = &r;
            if (rec || lad.get(km, 2).lambda > target) break;
            km *= 2;
        }
        if (!rec) throw Error(ErrorKind::BadRequest, "lambda " + std::to_string(target) + " is not an eigenvalue");
    } else {
        if (c.k < 0 || c.branch < 1 || c.branch > 2) throw Error(ErrorKind::BadRequest, "need k >= 0 and branch 1 or 2");
        lad = find_ladder(f, std::max(c.k, 2), spectrum_options(c));
        rec = &lad.get(c.k, c.k == 0 ? 1 : c.branch);
    }
    const CurveData curve = eigen_curve(f, *rec);
    j["kind"] = rec->lambda > 1.0 ? "hypocycloid" : "epicycloid";
    j["k"] = rec->k;
    j["branch"] = rec->branch;
    j["lambda"] = rec->lambda;
    j["double"] = rec->double_flag;
    j["closure_gap"] = closure_gap(f, curve);
    write_curve(c, curve, true, j);
    emit(c.out, j);
    return Ok;
}

int cmd_verify(const Config& c)
{
    const PlaneField f = build_plane(load_model(c.model), c.n);
    VerifyOptions o;
    o.k_max = c.k_max;
    o.trials = c.trials;
    o.seed = c.seed;
    o.spectrum = spectrum_options(c);
    const VerifyReport rep = run_verify(f, c.suite, o);
    json j;
    j["model"] = to_json(f.model);
    j["n"] = f.n;
    j["suite"] = c.suite;
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["report"] = to_json(rep);
    emit(c.out, j);
    for (const auto& ch : rep.checks)
        std::cerr << (ch.pass ? "pass " : "FAIL ") << ch.suite << '.' << ch.name << " value=" << ch.value
                  << " bound=" << ch.bound << '\n';
    return rep.pass ? Ok : InvariantFailure;
}

} // namespace

int main(int argc, char** argv)
{
    Config cfg;
    CLI::App app{"Cycloids and eigenvalue ladders in normed planes"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* s) {
        s->add_option("--model", cfg.model, "euclidean | lp:<p> | ellipse:<a>,<b> | fourier:a0=<v>,k<k>a=<v>,... or JSON");
        s->add_option("--n", cfg.n, "grid size, a power of two >= 64");
        s->add_option("--tol", cfg.tol, "eigenvalue tolerance");
        s->add_option("--out", cfg.out, "JSON output path (stdout if omitted)");
    };
    auto* plane = app.add_subcommand("plane", "build and validate a plane");
    common(plane);

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalue ladder and monodromy probes");
    common(spectrum);
    spectrum->add_option("--kmax", cfg.k_max, "largest k")->each([&](const std::string&) { cfg.k_max_set = true; });
    spectrum->add_option("--probe", cfg.probe, "classify A(lambda, pi)");

    auto* cyc = app.add_subcommand("cycloid", "render an eigen-cycloid or the open cycloid of lambda = 1");
    common(cyc);
    cyc->add_option("--k", cfg.k, "ladder index");
    cyc->add_option("--branch", cfg.branch, "1 or 2");
    cyc->add_option("--lambda", cfg.lambda, "closed cycloid for this eigenvalue");
    cyc->add_option("--kmax", cfg.k_max, "initial ladder size for --lambda");
    cyc->add_flag("--lambda1", cfg.lambda1, "open cycloid r = [v, q]");
    cyc->add_option("--v", cfg.v, "x,y for --lambda1");
    cyc->add_option("--turns", cfg.turns, "N-turn hedgehog, or turns drawn for --lambda1");
    cyc->add_option("--csv", cfg.csv, "CSV output path");
    cyc->add_option("--svg", cfg.svg, "SVG output path");

    auto* verify = app.add_subcommand("verify", "run invariant suites");
    common(verify);
    verify->add_option("--suite", cfg.suite, "all | plane | spectrum | geometry | analysis");
    verify->add_option("--kmax", cfg.k_max, "largest k");
    verify->add_option("--trials", cfg.trials, "random trials per vertex suite");
    verify->add_option("--seed", cfg.seed, "suite seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return BadRequestExit;
    }

    try {
        if (*plane) return cmd_plane(cfg);
        if (*spectrum) return cmd_spectrum(cfg);
        if (*cyc) return cmd_cycloid(cfg);
        if (*verify) return cmd_verify(cfg);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return BadRequestExit;
    }
    return BadRequestExit;
}
