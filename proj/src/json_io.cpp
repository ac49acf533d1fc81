#include "flowlab/json_io.hpp"

#include <cmath>

#include "flowlab/errors.hpp"

namespace flowlab {

namespace {

double get_number(const Json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf" || s == "+inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
    }
    throw DomainError(std::string("expected a number for ") + what);
}

long get_integer(const Json& j, const char* what) {
    if (j.is_number_integer()) return j.get<long>();
    if (j.is_number_float()) {
        double x = j.get<double>();
        if (x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long>(x);
    }
    throw DomainError(std::string("expected an integer for ") + what);
}

const Json& pairs_of(const Json& j, const char* key) {
    if (j.is_array()) return j;
    if (j.is_object() && j.contains(key) && j[key].is_array()) return j[key];
    if (j.is_object() && j.contains("entries") && j["entries"].is_array()) return j["entries"];
    throw DomainError(std::string("expected an array of pairs (or an object with \"") + key + "\")");
}

}  // namespace

Json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

Json to_json(const DiscreteMeasure& mu) {
    Json atoms = Json::array();
    for (const auto& a : mu.atoms()) atoms.push_back(Json::array({a.pos, a.mass}));
    return Json{{"atoms", std::move(atoms)}, {"defect", mu.defect()}};
}

DiscreteMeasure measure_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
        throw DomainError("a measure is an object with an \"atoms\" array");
    std::vector<Atom> atoms;
    for (const auto& a : j["atoms"]) {
        if (!a.is_array() || a.size() != 2) throw DomainError("each atom is a [position, mass] pair");
        double pos = get_number(a[0], "atom position"), mass = get_number(a[1], "atom mass");
        if (!std::isfinite(pos)) throw DomainError("atom positions must be finite");
        if (!(mass >= 0.0) || !std::isfinite(mass)) throw DomainError("atom masses must be finite and nonnegative");
        atoms.push_back({pos, mass});
    }
    double defect = j.contains("defect") ? get_number(j["defect"], "defect") : 0.0;
    if (!(defect >= 0.0) || !std::isfinite(defect)) throw DomainError("defect must be finite and nonnegative");
    return DiscreteMeasure(std::move(atoms), defect);
}

Json to_json(const CouplingPlan& plan) {
    Json entries = Json::array();
    for (const auto& e : plan.entries) entries.push_back(Json::array({number(e.src), number(e.tgt), e.mass}));
    return Json{{"entries", std::move(entries)}, {"cost", plan.cost}};
}

Json to_json(const TermEnvelope& env) {
    const char* kind = env.kind == TermEnvelope::Kind::Zero ? "zero"
                       : env.kind == TermEnvelope::Kind::Power ? "power"
                                                               : "geometric";
    return Json{{"kind", kind}, {"C", env.C}, {"rate", env.rate}, {"from", env.from}};
}

TermEnvelope envelope_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) throw DomainError("an envelope needs a kind");
    std::string kind = j["kind"].get<std::string>();
    long from = j.contains("from") ? get_integer(j["from"], "envelope from") : -1;
    auto need = [&](const char* key) {
        if (!j.contains(key)) throw DomainError(std::string("envelope is missing ") + key);
        return get_number(j[key], key);
    };
    if (kind == "zero") return TermEnvelope::zero(from < 0 ? 0 : from);
    if (kind == "power") return TermEnvelope::power(need("C"), need("rate"), from < 0 ? 1 : from);
    if (kind == "geometric") return TermEnvelope::geometric(need("C"), need("rate"), from < 0 ? 0 : from);
    throw DomainError("unknown envelope kind '" + kind + "'");
}

Json to_json(const CertificateSeries& s) {
    Json terms = Json::array(), partial = Json::array();
    for (double t : s.terms) terms.push_back(number(t));
    for (double p : s.partial) partial.push_back(number(p));
    Json out{{"name", s.name}, {"indices", s.indices}, {"terms", std::move(terms)}, {"partial", std::move(partial)}};
    out["tail_bound"] = s.tail_bound ? number(*s.tail_bound) : Json(nullptr);
    out["total_upper"] = s.tail_bound ? number(s.total_upper()) : Json(nullptr);
    out["verdict"] = verdict_name(s.verdict);
    out["witness"] = s.witness;
    return out;
}

CertificateSeries series_from_json(const Json& j) {
    CertificateSeries s;
    s.name = j.value("name", "");
    for (const auto& i : j.at("indices")) s.indices.push_back(get_integer(i, "index"));
    for (const auto& t : j.at("terms")) s.terms.push_back(get_number(t, "term"));
    for (const auto& p : j.at("partial")) s.partial.push_back(get_number(p, "partial sum"));
    if (j.contains("tail_bound") && !j["tail_bound"].is_null()) s.tail_bound = get_number(j["tail_bound"], "tail bound");
    std::string v = j.value("verdict", "inconclusive");
    if (v == verdict_name(Verdict::CertifiedConvergent)) s.verdict = Verdict::CertifiedConvergent;
    else if (v == verdict_name(Verdict::CertifiedDivergent)) s.verdict = Verdict::CertifiedDivergent;
    else if (v == verdict_name(Verdict::Inconclusive)) s.verdict = Verdict::Inconclusive;
    else throw DomainError("unknown verdict '" + v + "'");
    s.witness = j.value("witness", "");
    if (s.terms.size() != s.indices.size() || s.partial.size() != s.terms.size())
        throw DomainError("series arrays must have equal lengths");
    return s;
}

Json to_json(const PoissonFlowSpec& spec) {
    Json out = Json::array();
    for (const auto& e : spec.entries) out.push_back(Json::array({e.lambda, e.b}));
    return out;
}

PoissonFlowSpec flow_spec_from_json(const Json& j) {
    PoissonFlowSpec spec;
    for (const auto& p : pairs_of(j, "flow")) {
        if (!p.is_array() || p.size() != 2) throw DomainError("flow entries are [lambda, b] pairs");
        spec.entries.push_back({get_number(p[0], "lambda"), get_number(p[1], "b")});
    }
    spec.positive_type = true;
    for (const auto& e : spec.entries)
        if (e.b < 0.0) spec.positive_type = false;
    if (j.is_object() && j.contains("positive_type")) spec.positive_type = j["positive_type"].get<bool>();
    spec.validate();
    return spec;
}

Json to_json(const ITPFI2Spec& spec) {
    Json out = Json::array();
    for (const auto& e : spec.entries) out.push_back(Json::array({e.b, e.M}));
    return out;
}

ITPFI2Spec itpfi2_spec_from_json(const Json& j) {
    ITPFI2Spec spec;
    for (const auto& p : pairs_of(j, "itpfi2")) {
        if (!p.is_array() || p.size() != 2) throw DomainError("ITPFI2 entries are [b, M] pairs");
        spec.entries.push_back({get_number(p[0], "b"), get_integer(p[1], "M")});
    }
    spec.validate();
    return spec;
}

}  // namespace flowlab
