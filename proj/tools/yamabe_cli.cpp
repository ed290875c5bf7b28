// Batch front-end: parse problem specs, dispatch verification,
// construction and integration, and emit machine-readable reports.
//
// Exit codes: 0 = pass, 1 = quantitative failure, 2 = input/schema error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "yamabe/families.hpp"
#include "yamabe/geodesic.hpp"
#include "yamabe/parallel.hpp"
#include "yamabe/quadrature.hpp"
#include "yamabe/reductions.hpp"
#include "yamabe/sampling.hpp"
#include "yamabe/tensor_core.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace yamabe;

namespace {

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& m) : std::runtime_error(m) {}
};

// ----------------------------------------------------------------------
// Spec parsing. Unknown keys are rejected so that typos never silently
// change a run.

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) { ok = true; break; }
        if (!ok) throw SchemaError(where + ": unknown key '" + it.key() + "'");
    }
}

double need_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw SchemaError("field '" + field + "' must be a number");
    return j.get<double>();
}

int need_int(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw SchemaError("field '" + field + "' must be an integer");
    return j.get<int>();
}

std::vector<double> need_vector(const json& j, const std::string& field) {
    if (!j.is_array()) throw SchemaError("field '" + field + "' must be an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) v.push_back(need_number(e, field));
    return v;
}

struct GridRequest {
    double lo = 0.0, hi = 0.0;
    int count = 257;
    bool given = false;
};

struct ProblemSpec {
    int n = 0;
    int k = -1;  // -1: take the entry default
    std::optional<double> lambda;
    std::optional<std::vector<int>> signature;

    bool has_ansatz = false;
    std::string ansatz_type;
    std::optional<std::vector<double>> alpha;
    std::string profile;     // catalog id or CSV table path
    double ansatz_c = 0.0;   // potential constant f' = c/phi^2 for table profiles
    double ansatz_d = 0.0;
    GridRequest grid;

    bool has_family = false;
    std::string family_tag;
    std::string family_id;
    std::map<std::string, double> params;

    bool has_geodesic = false;
    std::vector<double> init_x, init_v;
    double t_max = 100.0;
    double geo_tol = 1e-9;

    std::optional<Box> sample_box;
    unsigned seed = 0;
};

ProblemSpec parse_spec(const json& j) {
    check_keys(j, "spec", {"n", "k", "lambda", "signature", "ansatz", "family",
                           "geodesic", "sample_box", "seed"});
    ProblemSpec s;
    if (j.contains("n")) s.n = need_int(j["n"], "n");
    if (j.contains("k")) s.k = need_int(j["k"], "k");
    if (j.contains("lambda")) s.lambda = need_number(j["lambda"], "lambda");
    if (j.contains("seed")) {
        int sd = need_int(j["seed"], "seed");
        if (sd < 0) throw SchemaError("field 'seed' must be non-negative");
        s.seed = static_cast<unsigned>(sd);
    }
    if (j.contains("signature")) {
        if (!j["signature"].is_array())
            throw SchemaError("field 'signature' must be an array of +1/-1 entries");
        std::vector<int> eps;
        for (const auto& e : j["signature"]) {
            if (!e.is_number_integer() || (e.get<int>() != 1 && e.get<int>() != -1))
                throw SchemaError("field 'signature' must contain only +1 or -1");
            eps.push_back(e.get<int>());
        }
        if (eps.size() < 2) throw SchemaError("field 'signature' needs length >= 2");
        s.signature = eps;
    }
    if (j.contains("ansatz")) {
        const json& a = j["ansatz"];
        check_keys(a, "ansatz", {"type", "alpha", "profile", "c", "d", "grid"});
        s.has_ansatz = true;
        if (!a.contains("type")) throw SchemaError("ansatz: missing 'type'");
        s.ansatz_type = a["type"].get<std::string>();
        if (s.ansatz_type != "translation" && s.ansatz_type != "rotation")
            throw SchemaError("ansatz.type must be 'translation' or 'rotation'");
        if (a.contains("alpha")) {
            if (s.ansatz_type != "translation")
                throw SchemaError("ansatz.alpha only applies to the translation type");
            s.alpha = need_vector(a["alpha"], "ansatz.alpha");
        }
        if (a.contains("profile")) s.profile = a["profile"].get<std::string>();
        if (a.contains("c")) s.ansatz_c = need_number(a["c"], "ansatz.c");
        if (a.contains("d")) s.ansatz_d = need_number(a["d"], "ansatz.d");
        if (a.contains("grid")) {
            const json& g = a["grid"];
            check_keys(g, "ansatz.grid", {"lo", "hi", "count"});
            s.grid.given = true;
            s.grid.lo = need_number(g.at("lo"), "ansatz.grid.lo");
            s.grid.hi = need_number(g.at("hi"), "ansatz.grid.hi");
            if (g.contains("count")) s.grid.count = need_int(g["count"], "ansatz.grid.count");
            if (!(s.grid.lo < s.grid.hi) || s.grid.count < 2)
                throw SchemaError("ansatz.grid: need lo < hi and count >= 2");
        }
    }
    if (j.contains("family")) {
        const json& f = j["family"];
        check_keys(f, "family", {"tag", "id", "params"});
        s.has_family = true;
        if (!f.contains("tag")) throw SchemaError("family: missing 'tag'");
        s.family_tag = f["tag"].get<std::string>();
        if (f.contains("id")) s.family_id = f["id"].get<std::string>();
        if (f.contains("params")) {
            if (!f["params"].is_object()) throw SchemaError("family.params must be an object");
            for (auto it = f["params"].begin(); it != f["params"].end(); ++it)
                s.params[it.key()] = need_number(it.value(), "family.params." + it.key());
        }
    }
    if (j.contains("geodesic")) {
        const json& g = j["geodesic"];
        check_keys(g, "geodesic", {"init", "t_max", "tol"});
        s.has_geodesic = true;
        if (g.contains("init")) {
            check_keys(g["init"], "geodesic.init", {"x", "v"});
            s.init_x = need_vector(g["init"].at("x"), "geodesic.init.x");
            s.init_v = need_vector(g["init"].at("v"), "geodesic.init.v");
        }
        if (g.contains("t_max")) s.t_max = need_number(g["t_max"], "geodesic.t_max");
        if (g.contains("tol")) s.geo_tol = need_number(g["tol"], "geodesic.tol");
    }
    if (j.contains("sample_box")) {
        const json& b = j["sample_box"];
        check_keys(b, "sample_box", {"lo", "hi"});
        Box box{need_vector(b.at("lo"), "sample_box.lo"), need_vector(b.at("hi"), "sample_box.hi")};
        box.validate();
        s.sample_box = box;
    }
    return s;
}

json load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open spec file: " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("spec is not valid JSON: ") + e.what());
    }
}

// ----------------------------------------------------------------------
// Soliton / metric resolution from the family block.

struct Resolved {
    SolitonSpec spec;
    std::optional<TranslationAnsatz> translation;
    std::optional<RotationAnsatz> rotation;
    SignVariantRecord variant;
    Box domain_box{{}, {}};
    Box verify_box{{}, {}};
    double lambda = 0.0;
    int ex21_theta = 0;
    bool tabulated = false;  // profile came from a numeric table
    std::string source;
    std::function<bool(std::span<const double>)> accept;
};

Resolved from_build(CatalogBuild b, const std::string& source, int theta, bool tabulated) {
    return Resolved{std::move(b.spec), std::move(b.translation), std::move(b.rotation),
                    std::move(b.variant), std::move(b.domain_box), std::move(b.verify_box),
                    b.lambda, theta, tabulated, source, std::move(b.accept)};
}

Profile1D profile_from_source(const std::string& src, int theta_hint, bool* tabulated) {
    if (src.empty()) throw SchemaError("ansatz.profile is required here");
    if (fs::exists(src)) {
        std::ifstream in(src);
        ProfileTable tab = ProfileTable::read_csv(in);
        *tabulated = true;
        return tab.profile();
    }
    // Otherwise treat as a catalog id and borrow that entry's phi profile.
    CatalogBuild b = build_catalog_entry(src, 4, catalog_entry(src).k_range(4).first,
                                         {{"theta", double(theta_hint)}});
    *tabulated = false;
    if (b.translation) return b.translation->phi();
    if (b.rotation) return b.rotation->phi();
    throw SchemaError("profile source has no 1-D profile: " + src);
}

int default_k(const ProblemSpec& s) {
    if (s.k >= 1) return s.k;
    if (s.has_family && s.family_tag == "CATALOG")
        return catalog_entry(s.family_id).k_range(s.n).first;
    return 1;
}

Resolved resolve_soliton(const ProblemSpec& s, unsigned seed) {
    if (!s.has_family) throw SchemaError("this command needs a 'family' block");
    if (s.n < 2) throw SchemaError("field 'n' must be >= 2");
    const int k = default_k(s);
    const std::string& tag = s.family_tag;

    if (tag == "CATALOG") {
        if (s.family_id.empty()) throw SchemaError("family.id is required for tag CATALOG");
        std::map<std::string, double> params = s.params;
        if (s.lambda) params.emplace("lambda", *s.lambda);
        CatalogBuild b = build_catalog_entry(s.family_id, s.n, k, params, seed);
        if (s.signature && *s.signature != b.spec.sig.entries())
            throw SchemaError("field 'signature' conflicts with the catalog entry's canonical "
                              "signature; omit it (metric commands may override instead)");
        int theta = 0;
        if (catalog_entry(s.family_id).id == "EX21")
            theta = static_cast<int>(params.count("theta") ? params["theta"] : 1.0);
        return from_build(std::move(b), "catalog:" + s.family_id, theta, false);
    }
    if (tag == "ROTATION_GAUSSIAN" || tag == "ROTATION_LINEAR_PHI") {
        double lambda = s.lambda.value_or(s.params.count("lambda") ? s.params.at("lambda") : 1.0);
        auto p = s.params;
        char which = tag == "ROTATION_GAUSSIAN" ? 'a' : 'b';
        double main_const = which == 'a' ? (p.count("c2") ? p["c2"] : 1.0)
                                         : (p.count("c0") ? p["c0"] : 1.0);
        double c1 = p.count("c1") ? p["c1"] : 0.0;
        CatalogBuild b = family_rotation_null_curvature(s.n, k, lambda, which, main_const, c1, seed);
        return from_build(std::move(b), "family:" + tag, 0, false);
    }
    if (tag == "TRANSLATION_PHI_CONST") {
        auto p = s.params;
        double bconst = p.count("b") ? p["b"] : 1.0;
        double c = p.count("c") ? p["c"] : 1.0;
        double d = p.count("d") ? p["d"] : 0.0;
        if (!(bconst > 0.0)) throw SchemaError("TRANSLATION_PHI_CONST: need b > 0");
        Signature sig = s.signature ? Signature(*s.signature) : Signature::euclidean(s.n);
        if (sig.dim() != s.n) throw SchemaError("field 'signature' must have length n");
        std::vector<double> alpha = s.alpha.value_or([&] {
            std::vector<double> a(static_cast<size_t>(s.n), 0.0);
            a[0] = 1.0;
            return a;
        }());
        Profile1D phi = Profile1D::constant(bconst);
        Profile1D f([c, d](double xi) { return ProfileJet{c * xi + d, c, 0.0}; },
                    -std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity());
        TranslationAnsatz ans(alpha, sig, phi, f);
        double lambda = s.lambda.value_or(0.0);
        SolitonSpec spec(s.n, k, lambda, sig, ans.phi_field(), ans.f_field());
        Box box = Box::cube(s.n, -2.0, 2.0);
        Resolved r{std::move(spec), std::move(ans), std::nullopt,
                   SignVariantRecord{"as written", true, 0.0}, box, box,
                   lambda, 0, false, "family:" + tag, {}};
        return r;
    }
    if (tag == "LIGHTLIKE_STEADY") {
        if (!s.has_ansatz || s.ansatz_type != "translation")
            throw SchemaError("LIGHTLIKE_STEADY needs a translation ansatz block");
        Signature sig = s.signature ? Signature(*s.signature) : Signature::lorentzian(s.n);
        if (sig.dim() != s.n) throw SchemaError("field 'signature' must have length n");
        std::vector<double> alpha = s.alpha.value_or([&] {
            std::vector<double> a(static_cast<size_t>(s.n), 0.0);
            a[0] = 1.0;
            a[1] = 1.0;
            return a;
        }());
        bool tabulated = false;
        int theta = static_cast<int>(s.params.count("theta") ? s.params.at("theta") : 1.0);
        Profile1D phi = profile_from_source(s.profile, theta, &tabulated);
        Profile1D f = potential_from_phi(phi, s.ansatz_c, s.ansatz_d);
        TranslationAnsatz ans(alpha, sig, phi, f);
        if (!ans.lightlike())
            throw SchemaError("LIGHTLIKE_STEADY: ansatz.alpha is not light-like for this signature");
        SolitonSpec spec(s.n, k, 0.0, sig, ans.phi_field(), ans.f_field());
        double lo = std::max(phi.lo(), -3.0), hi = std::min(phi.hi(), 3.0);
        Box box = Box::cube(s.n, lo / 2.0, hi / 2.0);
        Resolved r{std::move(spec), std::move(ans), std::nullopt,
                   SignVariantRecord{"as written", true, 0.0}, box, box,
                   0.0, 0, tabulated, "family:" + tag, {}};
        return r;
    }
    if (tag == "TRANSLATION_N_NE_2K" || tag == "TRANSLATION_N_EQ_2K") {
        auto p = s.params;
        double c = p.count("c") ? p["c"] : 1.0;
        double c1 = p.count("c1") ? p["c1"] : 1.0;
        double c2 = p.count("c2") ? p["c2"] : 0.0;
        ImplicitRelation rel = tag == "TRANSLATION_N_NE_2K"
            ? family_translation_n_ne_2k(s.n, k, c, c1, c2)
            : family_translation_n_eq_2k(s.n, c, c1, c2);
        if (tag == "TRANSLATION_N_EQ_2K" && k != s.n / 2)
            throw SchemaError("TRANSLATION_N_EQ_2K: k must equal n/2");

        double phi_lo = p.count("phi_lo") ? p["phi_lo"] : std::max(0.8, rel.bracket_lo * 1.5);
        double phi_hi = p.count("phi_hi") ? p["phi_hi"] : std::min(2.0, rel.bracket_hi * 0.5);
        if (!(phi_lo < phi_hi))
            throw SchemaError("family.params: need phi_lo < phi_hi inside the bracket");
        double xa = xi_of_phi(rel, phi_lo), xb = xi_of_phi(rel, phi_hi);
        double xlo = std::min(xa, xb), xhi = std::max(xa, xb);
        if (s.grid.given) { xlo = s.grid.lo; xhi = s.grid.hi; }
        int grid = s.grid.given ? s.grid.count : 257;
        ProfileTable tab = build_profile(rel, xlo, xhi, grid);

        Profile1D phi = tab.profile();
        Profile1D f = potential_from_phi(phi, c, p.count("d") ? p["d"] : 0.0);
        Signature sig = s.signature ? Signature(*s.signature) : Signature::euclidean(s.n);
        if (sig.dim() != s.n) throw SchemaError("field 'signature' must have length n");
        std::vector<double> alpha(static_cast<size_t>(s.n), 0.0);
        alpha[0] = 1.0;
        TranslationAnsatz ans(alpha, sig, phi, f);
        SolitonSpec spec(s.n, k, 0.0, sig, ans.phi_field(), ans.f_field());
        Box box = Box::cube(s.n, -1.0, 1.0);
        double margin = 0.05 * (xhi - xlo);
        box.lo[0] = xlo + margin;
        box.hi[0] = xhi - margin;
        Resolved r{std::move(spec), std::move(ans), std::nullopt,
                   SignVariantRecord{"as written", true, tab.certified_residual}, box, box,
                   0.0, 0, true, "family:" + tag, {}};
        return r;
    }
    throw SchemaError("unknown family.tag '" + tag + "'");
}

// Metric for curvature/geodesic/probe commands; an explicit signature in
// the spec replaces the background (the profiles are kept).
struct Metric {
    ScalarField phi;
    Signature sig;
    int ex21_theta = 0;
    std::string source;
};

Metric resolve_metric(const ProblemSpec& s, unsigned seed) {
    ProblemSpec base = s;
    if (s.family_tag == "CATALOG" || s.family_tag == "ROTATION_GAUSSIAN"
        || s.family_tag == "ROTATION_LINEAR_PHI")
        base.signature.reset();  // entry builds with its canonical signature
    Resolved r = resolve_soliton(base, seed);
    if (!s.signature) return Metric{r.spec.phi, r.spec.sig, r.ex21_theta, r.source};
    Signature sig(*s.signature);
    if (sig.dim() != s.n) throw SchemaError("field 'signature' must have length n");
    if (r.translation)
        return Metric{ScalarField::translation_profile(r.translation->phi(),
                                                       r.translation->alpha(), true),
                      sig, r.ex21_theta, r.source + "+signature-override"};
    if (r.rotation)
        return Metric{ScalarField::rotation_profile(r.rotation->phi(), sig, true),
                      sig, r.ex21_theta, r.source + "+signature-override"};
    return Metric{r.spec.phi, sig, r.ex21_theta, r.source + "+signature-override"};
}

// ----------------------------------------------------------------------
// Output plumbing.

json box_json(const Box& b) {
    return json{{"lo", b.lo}, {"hi", b.hi}};
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write output file: " + path.string());
    out << content;
}

void emit_report(const json& rep, const std::string& out_dir, const char* name) {
    std::string text = rep.dump(2);
    text.push_back('\n');
    std::cout << text;
    if (!out_dir.empty()) write_file(fs::path(out_dir) / name, text);
}

// Reduced-residual sweep over a 1-D grid; returns max |r1|, max |r2|.
struct ReducedSweep {
    double max_potential = 0.0;
    double max_curvature = 0.0;
    double lo = 0.0, hi = 0.0;
    int count = 0;
    std::vector<std::array<double, 3>> rows;  // xi, r1, r2
};

template <typename ResidualFn>
ReducedSweep sweep_reduced(double lo, double hi, int count, const ResidualFn& fn) {
    ReducedSweep sw;
    sw.lo = lo;
    sw.hi = hi;
    sw.count = count;
    for (int i = 0; i < count; ++i) {
        double u = lo + (hi - lo) * i / (count - 1);
        ReducedResidual rr = fn(u);
        sw.max_potential = std::max(sw.max_potential, std::abs(rr.potential));
        sw.max_curvature = std::max(sw.max_curvature, std::abs(rr.curvature));
        sw.rows.push_back({u, rr.potential, rr.curvature});
    }
    return sw;
}

// Default 1-D sweep interval for an ansatz: the image of the verify box
// under xi (translation) or r (rotation), pulled in from singular edges.
std::pair<double, double> reduced_interval(const Resolved& r) {
    const Box& b = r.verify_box;
    const int n = b.dim();
    if (r.translation) {
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i < n; ++i) {
            double a = r.translation->alpha()[static_cast<size_t>(i)];
            lo += std::min(a * b.lo[static_cast<size_t>(i)], a * b.hi[static_cast<size_t>(i)]);
            hi += std::max(a * b.lo[static_cast<size_t>(i)], a * b.hi[static_cast<size_t>(i)]);
        }
        return {lo, hi};
    }
    // rotation entries in the catalog are Euclidean
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
        double l = b.lo[static_cast<size_t>(i)], h = b.hi[static_cast<size_t>(i)];
        double mn = (l <= 0.0 && h >= 0.0) ? 0.0 : std::min(l * l, h * h);
        lo += mn;
        hi += std::max(l * l, h * h);
    }
    if (lo == 0.0) lo = 1e-3 * hi;  // keep clear of the r = 0 coordinate singularity
    return {lo, hi};
}

// ----------------------------------------------------------------------
// Commands.

int cmd_verify(const ProblemSpec& s_in, const std::string& out_dir, double tol_flag,
               unsigned seed, int points) {
    // An ansatz block with a catalog-id profile is shorthand for the
    // corresponding catalog family.
    ProblemSpec s = s_in;
    if (!s.has_family && s.has_ansatz && !s.profile.empty() && !fs::exists(s.profile)) {
        s.has_family = true;
        s.family_tag = "CATALOG";
        s.family_id = s.profile;
    }
    json rep;
    rep["command"] = "verify";
    Resolved r = [&] {
        try {
            return resolve_soliton(s, seed);
        } catch (const VerificationError& e) {
            // no variant annihilated the residual: a quantitative failure
            json fail;
            fail["command"] = "verify";
            fail["pass"] = false;
            fail["error"] = e.what();
            emit_report(fail, out_dir, "report.json");
            std::exit(1);
        }
    }();

    double tol = tol_flag > 0 ? tol_flag : (r.tabulated ? 1e-6 : 1e-8);
    Box box = s.sample_box.value_or(r.verify_box);
    auto filter = r.accept ? r.accept : positivity_filter(r.spec.phi);
    auto pts = sample_box(box, points, seed, filter);
    std::vector<double> res(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int i) {
        res[static_cast<size_t>(i)] = soliton_residual(r.spec, pts[static_cast<size_t>(i)]).max_abs();
    });
    double max_res = 0.0;
    for (double v : res) max_res = std::max(max_res, v);

    rep["source"] = r.source;
    rep["n"] = r.spec.n;
    rep["k"] = r.spec.k;
    rep["lambda"] = r.lambda;
    rep["sign_variant_used"] = r.variant.chosen;
    rep["sign_variant_as_written"] = r.variant.as_written;
    rep["max_residual"] = max_res;
    rep["grid"] = json{{"points", points}, {"seed", seed}, {"box", box_json(box)}};
    rep["tolerance"] = tol;
    bool pass = max_res <= tol;

    if (r.translation || r.rotation) {
        auto [glo, ghi] = reduced_interval(r);
        ReducedSweep sw = r.translation
            ? sweep_reduced(glo, ghi, 256, [&](double xi) {
                  return translation_residuals(*r.translation, r.spec.k, r.lambda, xi);
              })
            : sweep_reduced(glo, ghi, 256, [&](double rr) {
                  return rotation_residuals(*r.rotation, r.spec.k, r.lambda, rr);
              });
        rep["reduced"] = json{{"type", r.translation ? "translation" : "rotation"},
                              {"grid", json{{"lo", sw.lo}, {"hi", sw.hi}, {"count", sw.count}}},
                              {"max_potential_residual", sw.max_potential},
                              {"max_curvature_residual", sw.max_curvature}};
        pass = pass && sw.max_potential <= tol && sw.max_curvature <= tol;
    }
    rep["pass"] = pass;
    emit_report(rep, out_dir, "report.json");
    return pass ? 0 : 1;
}

int cmd_curvature(const ProblemSpec& s, const std::string& out_dir, unsigned seed, int points) {
    Metric m = resolve_metric(s, seed);
    Box box = s.sample_box.value_or(Box::cube(m.sig.dim(), -1.5, 1.5));
    auto pts = sample_box(box, points, seed, positivity_filter(m.phi));
    json rep;
    rep["command"] = "curvature";
    rep["source"] = m.source;
    rep["n"] = m.sig.dim();
    rep["signature"] = m.sig.entries();
    rep["grid"] = json{{"points", points}, {"seed", seed}, {"box", box_json(box)}};
    json arr = json::array();
    for (const auto& p : pts) {
        CurvaturePack pack = curvature_pack(m.phi, m.sig, p);
        json row;
        row["x"] = p;
        row["sigma"] = pack.sigma;
        row["scalar"] = pack.scalar;
        json ric = json::array();
        for (int i = 0; i < m.sig.dim(); ++i) {
            json rrow = json::array();
            for (int jj = 0; jj < m.sig.dim(); ++jj) rrow.push_back(pack.ricci(i, jj));
            ric.push_back(rrow);
        }
        row["ricci"] = ric;
        arr.push_back(row);
    }
    rep["points"] = arr;
    emit_report(rep, out_dir, "report.json");
    return 0;
}

int cmd_reduce(const ProblemSpec& s, const std::string& out_dir, double tol_flag,
               unsigned seed) {
    if (!s.has_ansatz) throw SchemaError("reduce needs an 'ansatz' block");
    const int k = default_k(s);
    double lambda = s.lambda.value_or(0.0);
    double tol = tol_flag > 0 ? tol_flag : 1e-8;

    std::optional<TranslationAnsatz> tr;
    std::optional<RotationAnsatz> ro;
    bool tabulated = false;
    std::string source;
    double glo, ghi;

    if (!s.profile.empty() && !fs::exists(s.profile)) {
        // catalog id: reuse the entry's profiles wholesale
        ProblemSpec cs = s;
        cs.has_family = true;
        cs.family_tag = "CATALOG";
        cs.family_id = s.profile;
        cs.signature.reset();
        Resolved r = resolve_soliton(cs, seed);
        if (s.ansatz_type == "translation" && !r.translation)
            throw SchemaError("catalog entry '" + s.profile + "' is not translation-invariant");
        if (s.ansatz_type == "rotation" && !r.rotation)
            throw SchemaError("catalog entry '" + s.profile + "' is not rotation-invariant");
        tr = r.translation;
        ro = r.rotation;
        lambda = r.lambda;
        source = r.source;
        auto iv = reduced_interval(r);
        glo = iv.first;
        ghi = iv.second;
        tabulated = false;
    } else {
        Profile1D phi = profile_from_source(s.profile, 1, &tabulated);
        Profile1D f = potential_from_phi(phi, s.ansatz_c, s.ansatz_d);
        source = "table:" + s.profile;
        double margin = 0.02 * (phi.hi() - phi.lo());
        glo = phi.lo() + margin;
        ghi = phi.hi() - margin;
        if (s.ansatz_type == "translation") {
            if (s.n < 2) throw SchemaError("field 'n' must be >= 2");
            Signature sig = s.signature ? Signature(*s.signature) : Signature::euclidean(s.n);
            std::vector<double> alpha = s.alpha.value_or([&] {
                std::vector<double> a(static_cast<size_t>(s.n), 0.0);
                a[0] = 1.0;
                return a;
            }());
            tr = TranslationAnsatz(alpha, sig, phi, f);
        } else {
            Signature sig = s.signature ? Signature(*s.signature) : Signature::euclidean(s.n);
            ro = RotationAnsatz(sig, phi, f);
        }
    }
    if (s.grid.given) {
        glo = s.grid.lo;
        ghi = s.grid.hi;
    }
    int count = s.grid.given ? s.grid.count : 256;

    ReducedSweep sw = tr ? sweep_reduced(glo, ghi, count, [&](double xi) {
                              return translation_residuals(*tr, k, lambda, xi);
                          })
                         : sweep_reduced(glo, ghi, count, [&](double rr) {
                              return rotation_residuals(*ro, k, lambda, rr);
                          });

    if (!out_dir.empty()) {
        std::ostringstream csv;
        csv << "u,potential_residual,curvature_residual\n";
        csv.precision(17);
        for (const auto& row : sw.rows)
            csv << row[0] << ',' << row[1] << ',' << row[2] << '\n';
        write_file(fs::path(out_dir) / "reduced.csv", csv.str());
    }

    double eff_tol = tol_flag > 0 ? tol : (tabulated ? 1e-6 : tol);
    bool pass = sw.max_potential <= eff_tol && sw.max_curvature <= eff_tol;
    json rep;
    rep["command"] = "reduce";
    rep["source"] = source;
    rep["type"] = tr ? "translation" : "rotation";
    rep["n"] = s.n;
    rep["k"] = k;
    rep["lambda"] = lambda;
    rep["grid"] = json{{"lo", sw.lo}, {"hi", sw.hi}, {"count", sw.count}};
    rep["max_potential_residual"] = sw.max_potential;
    rep["max_curvature_residual"] = sw.max_curvature;
    rep["tolerance"] = eff_tol;
    rep["pass"] = pass;
    emit_report(rep, out_dir, "report.json");
    return pass ? 0 : 1;
}

int family_common(const ProblemSpec& s, const std::string& out_dir, double tol_flag,
                  unsigned seed, bool implicit_only) {
    if (!s.has_family) throw SchemaError("this command needs a 'family' block");
    const std::string& tag = s.family_tag;
    const bool implicit = tag == "TRANSLATION_N_NE_2K" || tag == "TRANSLATION_N_EQ_2K";
    if (implicit_only && !implicit)
        throw SchemaError("solve-implicit handles only TRANSLATION_N_NE_2K and TRANSLATION_N_EQ_2K");

    if (implicit) {
        const int k = default_k(s);
        auto p = s.params;
        double c = p.count("c") ? p.at("c") : 1.0;
        double c1 = p.count("c1") ? p.at("c1") : 1.0;
        double c2 = p.count("c2") ? p.at("c2") : 0.0;
        ImplicitRelation rel = tag == "TRANSLATION_N_NE_2K"
            ? family_translation_n_ne_2k(s.n, k, c, c1, c2)
            : family_translation_n_eq_2k(s.n, c, c1, c2);
        double phi_lo = p.count("phi_lo") ? p.at("phi_lo") : std::max(0.8, rel.bracket_lo * 1.5);
        double phi_hi = p.count("phi_hi") ? p.at("phi_hi") : std::min(2.0, rel.bracket_hi * 0.5);
        if (!(phi_lo < phi_hi))
            throw SchemaError("family.params: need phi_lo < phi_hi inside the bracket");
        double xa = xi_of_phi(rel, phi_lo), xb = xi_of_phi(rel, phi_hi);
        double xlo = std::min(xa, xb), xhi = std::max(xa, xb);
        if (s.grid.given) { xlo = s.grid.lo; xhi = s.grid.hi; }
        int grid = s.grid.given ? s.grid.count : 257;

        ProfileTable tab = build_profile(rel, xlo, xhi, grid);
        double round_trip = 0.0;
        for (int i = 0; i < tab.size(); i += 4) {
            double back = antiderivative(rel, tab.phi[static_cast<size_t>(i)]);
            round_trip = std::max(round_trip,
                                  std::abs(back - rel.rhs(tab.xi[static_cast<size_t>(i)])));
        }

        if (!out_dir.empty()) {
            std::ostringstream csv;
            tab.write_csv(csv);
            write_file(fs::path(out_dir) / "profile.csv", csv.str());
        }
        double tol = tol_flag > 0 ? tol_flag : 1e-6;
        bool pass = !tab.certification_failed && round_trip <= 1e-9
                 && tab.certified_residual <= tol;
        json cert;
        cert["command"] = implicit_only ? "solve-implicit" : "family";
        cert["tag"] = tag;
        cert["n"] = s.n;
        cert["k"] = k;
        cert["constants"] = json{{"c", c}, {"c1", c1}, {"c2", c2},
                                 {"b_nk", b_nk(s.n, k)},
                                 {"p", tag == "TRANSLATION_N_NE_2K" ? p_constant(s.n, k, c) : 0.0}};
        cert["bracket"] = json{{"lo", rel.bracket_lo}, {"hi", rel.bracket_hi}, {"phi0", rel.phi0}};
        cert["xi_range"] = json{{"lo", xlo}, {"hi", xhi}};
        cert["grid"] = grid;
        cert["certified_residual"] = tab.certified_residual;
        cert["certification_failed"] = tab.certification_failed;
        cert["round_trip_residual"] = round_trip;
        cert["tolerance"] = tol;
        cert["pass"] = pass;
        emit_report(cert, out_dir, "certificate.json");
        return pass ? 0 : 1;
    }

    // Closed-form families: tabulate the analytic profile, certify through
    // the reduced residuals.
    Resolved r = resolve_soliton(s, seed);
    auto [glo, ghi] = reduced_interval(r);
    if (s.grid.given) { glo = s.grid.lo; ghi = s.grid.hi; }
    int count = s.grid.given ? s.grid.count : 257;
    const Profile1D& phi = r.translation ? r.translation->phi() : r.rotation->phi();

    double worst = 0.0;
    std::ostringstream csv;
    csv << "xi,phi,dphi,ddphi,residual\n";
    csv.precision(17);
    for (int i = 0; i < count; ++i) {
        double u = glo + (ghi - glo) * i / (count - 1);
        ProfileJet pj = phi(u);
        ReducedResidual rr = r.translation
            ? translation_residuals(*r.translation, r.spec.k, r.lambda, u)
            : rotation_residuals(*r.rotation, r.spec.k, r.lambda, u);
        double res = std::max(std::abs(rr.potential), std::abs(rr.curvature));
        worst = std::max(worst, res);
        csv << u << ',' << pj.v << ',' << pj.d1 << ',' << pj.d2 << ',' << res << '\n';
    }
    if (!out_dir.empty()) write_file(fs::path(out_dir) / "profile.csv", csv.str());

    double tol = tol_flag > 0 ? tol_flag : 1e-8;
    bool pass = worst <= tol && r.variant.residual <= tol * (1.0 + std::abs(r.lambda));
    json cert;
    cert["command"] = "family";
    cert["tag"] = tag;
    cert["source"] = r.source;
    cert["n"] = r.spec.n;
    cert["k"] = r.spec.k;
    cert["lambda"] = r.lambda;
    cert["sign_variant_used"] = r.variant.chosen;
    cert["sign_variant_as_written"] = r.variant.as_written;
    cert["grid"] = json{{"lo", glo}, {"hi", ghi}, {"count", count}};
    cert["max_reduced_residual"] = worst;
    cert["build_residual"] = r.variant.residual;
    cert["domain_box"] = box_json(r.domain_box);
    cert["tolerance"] = tol;
    cert["pass"] = pass;
    emit_report(cert, out_dir, "certificate.json");
    return pass ? 0 : 1;
}

int cmd_geodesic(const ProblemSpec& s, const std::string& out_dir, unsigned seed) {
    Metric m = resolve_metric(s, seed);
    if (!s.has_geodesic || s.init_x.empty())
        throw SchemaError("geodesic needs a 'geodesic' block with init.x and init.v");
    if (static_cast<int>(s.init_x.size()) != m.sig.dim()
        || static_cast<int>(s.init_v.size()) != m.sig.dim())
        throw SchemaError("geodesic.init dimensions must match n");

    IntegratorOptions opt;
    opt.rel_tol = s.geo_tol;
    GeodesicState init;
    init.x = s.init_x;
    init.v = s.init_v;
    Trajectory traj = integrate(m.phi, m.sig, init, s.t_max, opt);

    if (!out_dir.empty()) {
        std::ostringstream csv;
        write_trajectory_csv(csv, traj, m.sig, m.ex21_theta);
        write_file(fs::path(out_dir) / "trajectory.csv", csv.str());
    }

    double e0 = traj.speed.front();
    double drift = 0.0;
    for (double e : traj.speed)
        drift = std::max(drift, std::abs(e - e0) / std::max(std::abs(e0), 1e-12));

    json rep;
    rep["command"] = "geodesic";
    rep["source"] = m.source;
    rep["termination"] = to_string(traj.termination);
    rep["t_final"] = traj.t.back();
    rep["samples"] = traj.samples();
    rep["speed_initial"] = e0;
    rep["speed_max_rel_drift"] = drift;
    if (m.ex21_theta > 0) {
        InvariantDrift inv = ex21_invariant_drift(traj, m.ex21_theta);
        rep["invariants"] = json{{"theta", m.ex21_theta},
                                 {"K0", inv.K0},
                                 {"max_rel_drift_J", inv.max_rel_drift_J},
                                 {"max_rel_drift_K", inv.max_rel_drift_K}};
    }
    rep["pass"] = traj.termination == Termination::ReachedTmax;
    emit_report(rep, out_dir, "report.json");
    return traj.termination == Termination::ReachedTmax ? 0 : 1;
}

int cmd_probe(const ProblemSpec& s, const std::string& out_dir, unsigned seed, int points) {
    Metric m = resolve_metric(s, seed);
    const int n = m.sig.dim();
    Box box = s.sample_box.value_or(Box::cube(n, -1.0, 1.0));
    double t_max = s.has_geodesic ? s.t_max : 1000.0;

    // Initial conditions: joint quasi-random draw over position (the box)
    // and velocity ([-1,1]^n).
    Box joint;
    joint.lo = box.lo;
    joint.hi = box.hi;
    for (int i = 0; i < n; ++i) {
        joint.lo.push_back(-1.0);
        joint.hi.push_back(1.0);
    }
    auto draws = sample_box(joint, points, seed, [&](std::span<const double> p) {
        try {
            return m.phi.value(p.subspan(0, static_cast<size_t>(n))) > 1e-12;
        } catch (const FieldDomainError&) {
            return false;
        }
    });
    std::vector<GeodesicState> inits;
    // An explicit geodesic.init is probed first (aimed shots expose
    // incomplete directions that random draws almost never hit).
    if (s.has_geodesic && !s.init_x.empty()) {
        if (static_cast<int>(s.init_x.size()) != n || static_cast<int>(s.init_v.size()) != n)
            throw SchemaError("geodesic.init dimensions must match n");
        bool moving = false;
        for (double c : s.init_v) moving = moving || c != 0.0;
        if (moving) {
            GeodesicState st;
            st.x = s.init_x;
            st.v = s.init_v;
            inits.push_back(std::move(st));
        }
    }
    for (const auto& d : draws) {
        GeodesicState st;
        st.x.assign(d.begin(), d.begin() + n);
        st.v.assign(d.begin() + n, d.end());
        inits.push_back(std::move(st));
    }

    IntegratorOptions opt;
    if (s.has_geodesic) opt.rel_tol = s.geo_tol;
    CompletenessReport rep = completeness_probe(m.phi, m.sig, inits, t_max, box, opt, seed);

    json out;
    out["command"] = "probe";
    out["source"] = m.source;
    out["n"] = n;
    out["signature"] = m.sig.entries();
    out["t_max"] = rep.t_max;
    out["initial_conditions"] = points;
    out["seed"] = seed;
    out["aggregate"] = rep.aggregate;
    out["riemannian"] = rep.riemannian;
    out["bounded_conformal_factor"] = rep.bounded_conformal_factor;
    out["phi_sup_estimate"] = rep.phi_sup_estimate;
    out["phi_inf_estimate"] = rep.phi_inf_estimate;
    out["sup_growth_ratio"] = rep.sup_growth_ratio;
    json rows = json::array();
    for (const auto& r : rep.results) {
        json row;
        row["x"] = r.init.x;
        row["v"] = r.init.v;
        row["forward"] = to_string(r.forward);
        row["backward"] = to_string(r.backward);
        row["t_forward"] = r.t_forward;
        row["t_backward"] = r.t_backward;
        row["complete_up_to_tmax"] = r.complete_up_to_tmax;
        rows.push_back(row);
    }
    out["results"] = rows;
    emit_report(out, out_dir, "report.json");
    return 0;
}

int cmd_catalog_list(const std::string& out_dir) {
    json out;
    out["command"] = "catalog-list";
    json arr = json::array();
    for (const auto& e : catalog()) {
        json row;
        row["id"] = e.id;
        row["description"] = e.description;
        row["parameters"] = e.defaults;
        row["k_range_at_n4"] = json::array({e.k_range(4).first, e.k_range(4).second});
        arr.push_back(row);
    }
    out["entries"] = arr;
    emit_report(out, out_dir, "catalog.json");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for conformally flat gradient k-Yamabe solitons"};
    app.require_subcommand(1);

    std::string spec_path, out_dir;
    double tol = 0.0;
    int seed_flag = -1;
    int points = 64;

    auto add_common = [&](CLI::App* sub, bool needs_spec = true) {
        if (needs_spec)
            sub->add_option("--spec", spec_path, "problem spec JSON file")->required();
        sub->add_option("--out", out_dir, "output directory for reports and tables");
        sub->add_option("--tol", tol, "override the pass tolerance");
        sub->add_option("--seed", seed_flag, "override the spec's seed");
        sub->add_option("--points", points, "sample points / initial conditions");
    };

    CLI::App* verify = app.add_subcommand("verify", "check a soliton against the defining equation");
    CLI::App* curvature = app.add_subcommand("curvature", "curvature quantities at sampled points");
    CLI::App* reduce = app.add_subcommand("reduce", "reduced 1-D residuals for an ansatz profile");
    CLI::App* family = app.add_subcommand("family", "construct a solution family and certify it");
    CLI::App* solve = app.add_subcommand("solve-implicit", "invert an implicit quadrature relation");
    CLI::App* geodesic = app.add_subcommand("geodesic", "integrate one geodesic");
    CLI::App* probe = app.add_subcommand("probe", "completeness evidence for a batch of geodesics");
    CLI::App* list = app.add_subcommand("catalog-list", "list catalog entries and parameters");
    for (CLI::App* sub : {verify, curvature, reduce, family, solve, geodesic, probe})
        add_common(sub);
    add_common(list, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) return cmd_catalog_list(out_dir);

        ProblemSpec spec = parse_spec(load_spec_file(spec_path));
        unsigned seed = seed_flag >= 0 ? static_cast<unsigned>(seed_flag) : spec.seed;

        if (verify->parsed()) return cmd_verify(spec, out_dir, tol, seed, points);
        if (curvature->parsed()) return cmd_curvature(spec, out_dir, seed, points);
        if (reduce->parsed()) return cmd_reduce(spec, out_dir, tol, seed);
        if (family->parsed()) return family_common(spec, out_dir, tol, seed, false);
        if (solve->parsed()) return family_common(spec, out_dir, tol, seed, true);
        if (geodesic->parsed()) return cmd_geodesic(spec, out_dir, seed);
        if (probe->parsed()) return cmd_probe(spec, out_dir, seed, points);
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const OutOfDomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const FieldDomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const QuadratureError& e) {
        std::cerr << "quadrature error: " << e.what() << "\n";
        return 2;
    } catch (const VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
