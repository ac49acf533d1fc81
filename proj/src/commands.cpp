#include "flowlab/commands.hpp"

#include <cmath>
#include <numbers>

#include "flowlab/bernoulli.hpp"
#include "flowlab/config.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/metrics.hpp"
#include "flowlab/pipelines.hpp"
#include "flowlab/suspension.hpp"
#include "flowlab/tail_boundary.hpp"

namespace flowlab {

namespace {

// Effective options: user values over defaults, echoed into the report.
class Options {
public:
    explicit Options(Json user) : user_(std::move(user)) {
        if (!user_.is_object()) throw DomainError("options must be a table");
    }

    double num(const char* key, double dflt) {
        double v = user_.contains(key) ? get_num(user_[key], key) : dflt;
        used_[key] = v;
        return v;
    }
    long integer(const char* key, long dflt) {
        long v = dflt;
        if (user_.contains(key)) {
            if (!user_[key].is_number_integer()) throw DomainError(std::string(key) + " must be an integer");
            v = user_[key].get<long>();
        }
        used_[key] = v;
        return v;
    }
    std::string str(const char* key, const std::string& dflt) {
        std::string v = user_.contains(key) ? user_[key].get<std::string>() : dflt;
        used_[key] = v;
        return v;
    }
    // Option value, else document value, else default.
    double num_or(const char* key, const Json& doc, double dflt) {
        if (!user_.contains(key) && doc.is_object() && doc.contains(key)) {
            double v = get_num(doc[key], key);
            used_[key] = v;
            return v;
        }
        return num(key, dflt);
    }
    long int_or(const char* key, const Json& doc, long dflt) {
        if (!user_.contains(key) && doc.is_object() && doc.contains(key)) {
            if (!doc[key].is_number_integer()) throw DomainError(std::string(key) + " must be an integer");
            long v = doc[key].get<long>();
            used_[key] = v;
            return v;
        }
        return integer(key, dflt);
    }
    std::string str_or(const char* key, const Json& doc, const std::string& dflt) {
        if (!user_.contains(key) && doc.is_object() && doc.contains(key)) {
            std::string v = doc[key].get<std::string>();
            used_[key] = v;
            return v;
        }
        return str(key, dflt);
    }
    bool has(const char* key) const { return user_.contains(key); }

    Json echo() const {
        Json e = user_;
        for (auto it = used_.begin(); it != used_.end(); ++it) e[it.key()] = it.value();
        return e;
    }

private:
    static double get_num(const Json& v, const char* key) {
        if (!v.is_number()) throw DomainError(std::string(key) + " must be a number");
        return v.get<double>();
    }
    Json user_;
    Json used_ = Json::object();
};

double positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
    return v;
}

long positive(long v, const char* what) {
    if (v < 1) throw DomainError(std::string(what) + " must be >= 1");
    return v;
}

const Json& section(const Json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) throw DomainError(std::string("input is missing '") + key + "'");
    return doc[key];
}

std::optional<TermEnvelope> optional_envelope(const Json& doc, const char* key) {
    if (doc.is_object() && doc.contains(key)) return envelope_from_json(doc[key]);
    return std::nullopt;
}

Interval interval_from(const Json& j) {
    Interval I{section(j, "lo").get<double>(), section(j, "hi").get<double>()};
    I.lo_closed = j.value("lo_closed", true);
    I.hi_closed = j.value("hi_closed", false);
    if (!(I.lo <= I.hi)) throw DomainError("interval needs lo <= hi");
    return I;
}

Json checked_json(const CheckedTerm& c) { return Json{{"exact", c.exact}, {"bound", c.bound}}; }

std::vector<DiscreteMeasure> measures_from(const Json& j, const char* what) {
    if (!j.is_array()) throw DomainError(std::string(what) + " must be an array of measures");
    std::vector<DiscreteMeasure> out;
    for (const auto& m : j) out.push_back(measure_from_json(m));
    return out;
}

struct Loaded {
    std::vector<Json> docs;
    Json echo = Json::array();
};

Loaded load_inputs(const CommandInput& in, std::size_t expected) {
    if (in.inputs.size() != expected)
        throw DomainError(in.command + " expects " + std::to_string(expected) + " input file(s), got " +
                          std::to_string(in.inputs.size()));
    Loaded l;
    for (const auto& p : in.inputs) {
        l.docs.push_back(load_document(p));
        l.echo.push_back(Json{{"path", p.generic_string()}, {"document", l.docs.back()}});
    }
    return l;
}

// ---------------------------------------------------------------- metric

void cmd_metric(const CommandInput& in, Options& o, Report& r) {
    auto l = load_inputs(in, 2);
    r.config["inputs"] = l.echo;
    const std::string kind = o.str("kind", "tv");
    DiscreteMeasure a = measure_from_json(l.docs[0]), b = measure_from_json(l.docs[1]);
    r.results["kind"] = kind;
    if (kind == "hellinger") {
        double h2 = hellinger_sq(a, b);
        r.results["hellinger_sq"] = h2;
        r.results["hellinger"] = std::sqrt(h2);
    } else if (kind == "tv") {
        r.results["total_variation"] = total_variation(a, b);
        r.results["convention"] = "l1: sum |a - b| + |defect difference|";
    } else if (kind == "w2") {
        auto w = wasserstein2(a, b);
        r.results["distance"] = w.distance;
        r.results["plan"] = to_json(w.plan);
    } else if (kind == "w2k") {
        double kappa = positive(o.num("kappa", 1.0), "kappa");
        std::string mode = o.str("mode", "exact");
        CutoffMode m;
        if (mode == "exact") m = CutoffMode::Exact;
        else if (mode == "monotone") m = CutoffMode::MonotoneUpper;
        else throw DomainError("mode must be 'exact' or 'monotone'");
        auto w = wasserstein2_cutoff(a, b, kappa, m, static_cast<std::size_t>(positive(o.integer("lp_limit", kDefaultLpLimit), "lp_limit")));
        r.results["distance"] = w.distance;
        r.results["distance_sq"] = w.plan.cost;
        r.results["plan"] = to_json(w.plan);
    } else {
        throw DomainError("metric kind must be hellinger, tv, w2 or w2k");
    }
}

// ---------------------------------------------------------------- tail

void cmd_tail(const CommandInput& in, Options& o, Report& r) {
    auto l = load_inputs(in, 1);
    r.config["inputs"] = l.echo;
    const Json& doc = l.docs[0];
    const std::string op = o.str("op", "eigen");
    const double eps = positive(o.num_or("eps_trunc", doc, kDefaultTruncation), "eps_trunc");
    TailOptions topt;
    topt.horizon = positive(o.int_or("horizon", doc, 100), "horizon");
    topt.threshold_diverge = positive(o.num_or("threshold_diverge", doc, kDefaultDivergeThreshold), "threshold_diverge");
    topt.envelope = optional_envelope(doc, "envelope");
    MeasureSequence seq = sequence_from_config(section(doc, "sequence"), eps);
    r.results["op"] = op;

    if (op == "eigen") {
        double omega = o.num_or("omega", doc, 1.0);
        r.add_series(eigenvalue_certificate(seq, omega, topt));
        r.results["omega"] = omega;
        r.results["eigenvalue"] = r.series.back().verdict == Verdict::CertifiedConvergent;
    } else if (op == "period") {
        const Json& ex = section(doc, "extract");
        double cap = ex.contains("mass_cap") ? ex["mass_cap"].get<double>() : INFINITY;
        double width_cap = positive(o.num_or("width_cap", doc, 1.0), "width_cap");
        r.add_series(periodicity_score(seq, interval_extractor(interval_from(ex), cap), width_cap, topt));
    } else if (op == "concentrate") {
        std::vector<ConcentrationBlock> blocks;
        for (const auto& b : section(doc, "blocks")) {
            ConcentrationBlock cb;
            for (const auto& i : section(b, "indices")) cb.indices.push_back(i.get<long>());
            cb.interval = interval_from(b);
            cb.p = section(b, "p").get<double>();
            cb.q = section(b, "q").get<double>();
            blocks.push_back(std::move(cb));
        }
        double width_cap = positive(o.num_or("width_cap", doc, 1.0), "width_cap");
        auto c = concentration_points(seq, blocks, width_cap, topt);
        r.results["middle_points"] = c.middle_points;
        r.add_series(std::move(c.series));
    } else if (op == "equiv") {
        MeasureSequence other = sequence_from_config(section(doc, "other"), eps);
        std::string metric = o.str_or("metric", doc, "hellinger");
        EquivMetric m;
        if (metric == "hellinger") m = EquivMetric::Hellinger;
        else if (metric == "tv") m = EquivMetric::TotalVariation;
        else if (metric == "w2k") m = EquivMetric::W2Cutoff;
        else throw DomainError("equiv metric must be hellinger, tv or w2k");
        double kappa = positive(o.num_or("kappa", doc, 1.0), "kappa");
        auto lp = static_cast<std::size_t>(positive(o.integer("lp_limit", kDefaultLpLimit), "lp_limit"));
        r.add_series(equivalence_certificate(seq, other, m, kappa, topt, lp));
    } else if (op == "walk") {
        long samples = positive(o.int_or("samples", doc, 1000), "samples");
        long seed = o.integer("seed", 0);
        long block = o.int_or("block_size", doc, 0);
        auto w = simulate_walk(seq, topt.horizon, samples, static_cast<std::uint64_t>(seed), block);
        r.results["walk"] = Json{{"horizon", w.horizon},
                                 {"samples", w.samples},
                                 {"seed", w.seed},
                                 {"mean", w.mean},
                                 {"variance", w.variance},
                                 {"expected_mean", w.expected_mean},
                                 {"expected_variance", w.expected_variance},
                                 {"z_score", w.z_score},
                                 {"mean_test_5sigma", std::abs(w.z_score) <= 5.0},
                                 {"block_size", w.block_size},
                                 {"block_means", w.block_means}};
    } else {
        throw DomainError("tail op must be eigen, period, concentrate, equiv or walk");
    }
}

// ---------------------------------------------------------------- pipeline

void cmd_pipeline(const CommandInput& in, Options& o, Report& r) {
    auto l = load_inputs(in, 1);
    r.config["inputs"] = l.echo;
    const Json& doc = l.docs[0];
    const std::string op = o.str("op", "itpfi2poisson");
    PipelineOptions popt;
    popt.eps_trunc = positive(o.num_or("eps_trunc", doc, kDefaultTruncation), "eps_trunc");
    popt.threshold_diverge = positive(o.num_or("threshold_diverge", doc, kDefaultDivergeThreshold), "threshold_diverge");
    popt.tail = optional_envelope(doc, "envelope");
    r.results["op"] = op;

    if (op == "itpfi2poisson") {
        auto res = itpfi2_to_poisson(itpfi2_spec_from_json(doc), popt);
        r.results["poisson_flow"] = to_json(res.spec);
        Json checks = Json::array();
        for (const auto& c : res.checks) checks.push_back(checked_json(c));
        r.results["checks"] = checks;
        r.add_series(std::move(res.prokhorov));
    } else if (op == "poisson2itpfi") {
        std::vector<DiscreteMeasure> intensities;
        if (doc.is_object() && doc.contains("intensities")) {
            intensities = measures_from(doc["intensities"], "intensities");
        } else {
            for (const auto& e : flow_spec_from_json(doc).entries) intensities.push_back(DiscreteMeasure::dirac(e.b, e.lambda));
        }
        auto res = poisson_to_itpfi2(intensities, popt);
        r.results["itpfi2"] = to_json(res.spec);
        Json slices = Json::array();
        for (const auto& s : res.slices) {
            slices.push_back(Json{{"k", s.k},
                                  {"lambda", s.lambda},
                                  {"b", s.b},
                                  {"lambda_prime", s.lambda_prime},
                                  {"M", s.M},
                                  {"intensity_gap", s.intensity_gap},
                                  {"concentration", s.concentration},
                                  {"w2_sq_exact", s.w2_sq_exact ? Json(*s.w2_sq_exact) : Json(nullptr)},
                                  {"lipschitz", checked_json(s.lipschitz)},
                                  {"prokhorov", checked_json(s.prokhorov)}});
        }
        r.results["slices"] = slices;
        r.results["discarded"] = to_json(res.discarded);
        r.add_series(std::move(res.concentration));
        r.add_series(std::move(res.lipschitz));
        r.add_series(std::move(res.prokhorov));
    } else if (op == "2pt2poisson") {
        auto family = measures_from(section(doc, "family"), "family");
        double cap = positive(o.num_or("variance_cap", doc, 1.0), "variance_cap");
        auto res = two_point_to_poisson(family, cap, popt);
        r.results["poisson_flow"] = to_json(res.spec);
        r.results["translations"] = res.translations;
        Json buckets = Json::array();
        for (const auto& b : res.buckets) {
            buckets.push_back(Json{{"k", b.k},
                                   {"members", b.members},
                                   {"lambda", b.lambda},
                                   {"b", b.b},
                                   {"w2_term", b.w2_term},
                                   {"lecam_sup", b.lecam_sup},
                                   {"lecam_l1", b.lecam_l1},
                                   {"majorant", b.majorant},
                                   {"tv_exact", b.tv_exact ? Json(*b.tv_exact) : Json(nullptr)}});
        }
        r.results["buckets"] = buckets;
        r.results["discarded"] = res.discarded;
        r.results["discarded_variance"] = res.discarded_variance;
        r.add_series(std::move(res.wasserstein));
        r.add_series(std::move(res.lecam));
    } else if (op == "poisson22pt") {
        double ratio = o.num_or("cap_ratio", doc, 0.5);
        auto res = poisson_to_two_point(flow_spec_from_json(doc), ratio, popt);
        Json fam = Json::array();
        for (const auto& f : res.family) fam.push_back(Json{{"copies", f.copies}, {"eta", to_json(f.eta)}});
        r.results["family"] = fam;
        Json checks = Json::array();
        for (const auto& c : res.checks) checks.push_back(checked_json(c));
        r.results["checks"] = checks;
        r.results["sup_variance"] = res.sup_variance;
        r.add_series(std::move(res.prokhorov));
    } else if (op == "almostperiodic") {
        double theta = o.num_or("theta", doc, 1.0 / 3.0);
        long chars = positive(o.int_or("characters", doc, 5), "characters");
        AlmostPeriodicOptions aopt;
        aopt.depth = positive(o.int_or("depth", doc, aopt.depth), "depth");
        aopt.translation_budget = positive(o.int_or("budget", doc, aopt.translation_budget), "budget");
        aopt.seed_horizon = positive(o.int_or("seed_horizon", doc, aopt.seed_horizon), "seed_horizon");
        auto target = stock_rotation_target(theta, static_cast<std::size_t>(chars));
        auto res = almost_periodic_pipeline(target, aopt);
        r.results["thetas"] = target.thetas;
        r.results["seed_provenance"] = target.provenance;
        Json blocks = Json::array();
        for (const auto& b : res.blocks) {
            blocks.push_back(Json{{"k", b.k},
                                  {"n_begin", b.n_begin},
                                  {"n_end", b.n_end},
                                  {"translation", b.translation},
                                  {"min_block_transform", b.min_block_transform},
                                  {"gamma", to_json(b.gamma)}});
        }
        r.results["blocks"] = blocks;
        r.results["poisson_flow"] = to_json(res.spec);
        r.results["certified_contraction"] = res.certified_contraction;
        r.results["scope"] = "eigenvalues certified; the full flow isomorphism is not decided numerically";
        for (auto& s : res.eigenvalues) r.add_series(std::move(s));
    } else if (op == "split") {
        long L = positive(o.int_or("L", doc, 2), "L");
        auto res = split_divisible(flow_spec_from_json(doc), L, popt.eps_trunc);
        r.results["poisson_flow"] = to_json(res.spec);
        r.results["tv_check"] = res.tv_check;
        r.results["defect_budget"] = res.defect_budget;
    } else if (op == "binomcheck") {
        double alpha = o.num_or("alpha", doc, 0.0), beta = o.num_or("beta", doc, 0.0);
        long L = positive(o.int_or("L", doc, 1), "L");
        auto c = binomial_approx_check(alpha, beta, measure_from_json(section(doc, "P")),
                                       measure_from_json(section(doc, "Q")), L);
        r.results["K"] = c.K;
        r.results["M"] = c.M;
        r.results["exact_tv"] = c.tv_exact;
        r.results["bound"] = c.bound;
        r.results["holds"] = c.tv_exact <= c.bound;
    } else if (op == "itpfireduce") {
        std::vector<std::vector<double>> a;
        for (const auto& row : section(doc, "a")) a.push_back(row.get<std::vector<double>>());
        ReduceOptions ropt;
        ropt.concentrate_first_bucket = doc.value("concentrate_first_bucket", false);
        ropt.threshold_diverge = popt.threshold_diverge;
        auto res = itpfi_bounded_reduce(a, ropt);
        r.results["b_per_state"] = res.b_per_state;
        r.results["distinct_b"] = res.distinct_b;
        Json groups = Json::array();
        for (const auto& g : res.groups) {
            Json split = nullptr;
            if (g.split)
                split = Json{{"K", g.split->K}, {"M", g.split->M}, {"exact_tv", g.split->tv_exact}, {"bound", g.split->bound}};
            groups.push_back(Json{{"b", g.b}, {"count", g.count}, {"K", g.K}, {"M", g.M}, {"split", split}});
        }
        r.results["groups"] = groups;
        Json rho = Json::array();
        for (const auto& [b, K] : res.rho_part) rho.push_back(Json{{"b", b}, {"power", K}});
        r.results["rho_part"] = rho;
        r.results["gamma_part"] = to_json(res.gamma_part);
        r.add_series(std::move(res.concentration));
        r.add_series(std::move(res.wasserstein));
        r.add_series(std::move(res.hellinger));
        r.add_series(std::move(res.split));
    } else {
        throw DomainError("pipeline op must be itpfi2poisson, poisson2itpfi, 2pt2poisson, poisson22pt, "
                          "almostperiodic, split, binomcheck or itpfireduce");
    }
}

// ---------------------------------------------------------------- bernoulli

std::size_t atom_of(const BernoulliFamily& fam, const Json& v) {
    if (v.is_string()) return fam.label_index(v.get<std::string>());
    if (v.is_number_integer()) return fam.label_index(std::to_string(v.get<long>()));
    throw DomainError("atoms are referenced by label");
}

std::vector<std::size_t> atom_list(const BernoulliFamily& fam, const Json& j) {
    if (!j.is_array()) throw DomainError("expected a list of atom labels");
    std::vector<std::size_t> out;
    for (const auto& v : j) out.push_back(atom_of(fam, v));
    return out;
}

std::optional<DissipativityWitness> witness_from(const Json& doc) {
    if (!doc.is_object() || !doc.contains("witness")) return std::nullopt;
    const Json& w = doc["witness"];
    return DissipativityWitness{section(w, "slope").get<double>(), section(w, "k0").get<long>(),
                                w.value("source", "supplied in config")};
}

Json witness_json(const std::optional<DissipativityWitness>& w) {
    if (!w) return nullptr;
    return Json{{"slope", w->slope}, {"k0", w->k0}, {"source", w->source}};
}

DiscreteMeasure label_measure(const BernoulliFamily& fam, const Json& masses) {
    auto m = masses.get<std::vector<double>>();
    if (m.size() != fam.atom_count()) throw DomainError("measure must give one mass per atom label");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < m.size(); ++i) atoms.push_back({static_cast<double>(i), m[i]});
    return DiscreteMeasure(std::move(atoms));
}

void cmd_bernoulli(const CommandInput& in, Options& o, Report& r) {
    auto l = load_inputs(in, 1);
    r.config["inputs"] = l.echo;
    const Json& doc = l.docs[0];
    const std::string op = o.str("op", "structure");
    BernoulliOptions bopt;
    bopt.horizon = positive(o.int_or("horizon", doc, 100), "horizon");
    bopt.threshold_diverge = positive(o.num_or("threshold_diverge", doc, kDefaultDivergeThreshold), "threshold_diverge");
    // An envelope bounds one particular series, so an op-specific table wins over the shared one.
    bopt.envelope = optional_envelope(doc, ("envelope_" + op).c_str());
    if (!bopt.envelope) bopt.envelope = optional_envelope(doc, "envelope");
    BernoulliFamily fam = family_from_config(section(doc, "family"), bopt.horizon + 1);
    r.results["op"] = op;
    r.results["family"] = fam.name();
    r.results["atoms"] = fam.labels();

    if (op == "kakutani") {
        long g = o.int_or("g", doc, 1);
        r.add_series(kakutani_check(fam, g, bopt));
        r.results["g"] = g;
        r.results["nonsingular_for_g"] = r.series.back().verdict == Verdict::CertifiedConvergent;
    } else if (op == "cocycle") {
        long k = o.int_or("k", doc, 1);
        auto s = cocycle_norm(fam, k, bopt);
        auto sm = cocycle_norm(fam, -k, bopt);
        r.results["k"] = k;
        r.results["norm_sq"] = s.partial_total();
        r.results["norm_sq_minus_k"] = sm.partial_total();
        r.results["norm_sq_reindexed"] = cocycle_norm_reindexed(fam, k, bopt.horizon);
        r.add_series(std::move(s));
    } else if (op == "dissipative") {
        long kr = positive(o.int_or("k_range", doc, bopt.horizon), "k_range");
        auto w = witness_from(doc);
        auto d = dissipativity_certificate(fam, kr, bopt.horizon, w, bopt.threshold_diverge);
        r.results["witness"] = witness_json(d.witness);
        r.results["heuristic"] = d.heuristic;
        r.results["norm_sq"] = d.norm_sq;
        r.results["dissipative"] = !d.heuristic && d.series.verdict == Verdict::CertifiedConvergent;
        r.add_series(std::move(d.series));
    } else if (op == "bridge") {
        long depth = positive(o.int_or("depth", doc, 10), "depth");
        long window = positive(o.int_or("window", doc, bopt.horizon), "window");
        auto b = hellinger_bridge(fam, depth, window, o.num_or("tol", doc, 1e-6));
        r.results["n"] = b.n;
        r.results["m"] = b.m;
        r.results["distance"] = b.distance;
        r.results["found"] = b.found;
        r.results["floor"] = b.floor;
    } else if (op == "core") {
        auto core = atom_list(fam, section(doc, "core"));
        r.add_series(conservative_core_check(fam, core, bopt));
        r.results["core"] = section(doc, "core");
    } else if (op == "type2a") {
        DiscreteMeasure nu = label_measure(fam, section(doc, "nu"));
        r.add_series(type_II1_check(fam, nu, bopt));
        bool ok = r.series.back().verdict == Verdict::CertifiedConvergent;
        r.results["type_II1"] = ok;
        r.results["statement"] = ok ? "type II_1 certified with the supplied witness"
                                    : "no II_1 certificate found for supplied witnesses";
    } else if (op == "type2b") {
        const Json& s = section(doc, "sigma_nu");
        SigmaFiniteMeasure nu;
        if (s.value("counting", false)) {
            nu.weights.assign(fam.atom_count(), 1.0);
            nu.infinite_tail = true;
            nu.tail_floor = s.value("tail_floor", 1.0);
        } else {
            nu.weights = section(s, "weights").get<std::vector<double>>();
            nu.infinite_tail = s.value("infinite_tail", false);
            nu.tail_floor = s.value("tail_floor", 0.0);
        }
        const Json& ex = section(doc, "exhaustion");
        std::string kind = ex.value("kind", "prefix");
        const std::size_t count = fam.atom_count();
        ExhaustionSets U;
        if (kind == "prefix") {
            long offset = ex.value("offset", 0L);
            U = [count, offset](long n) {
                std::vector<std::size_t> out;
                long top = std::min(std::labs(n) + offset, static_cast<long>(count) - 1);
                for (long i = 0; i <= top; ++i) out.push_back(static_cast<std::size_t>(i));
                return out;
            };
        } else if (kind == "all") {
            U = [count](long) {
                std::vector<std::size_t> out(count);
                for (std::size_t i = 0; i < count; ++i) out[i] = i;
                return out;
            };
        } else {
            throw DomainError("exhaustion kind must be 'prefix' or 'all'");
        }
        auto res = type_IIinf_check(fam, nu, U, bopt, optional_envelope(doc, "outside_envelope"),
                                    optional_envelope(doc, "hellinger_envelope"));
        r.results["type_IIinf"] = res.type_IIinf;
        r.results["statement"] = res.type_IIinf ? "type II_infinity certified with the supplied witness"
                                                : "no II_infinity certificate found for supplied witnesses";
        r.add_series(std::move(res.outside_mass));
        r.add_series(std::move(res.hellinger));
        r.add_series(std::move(res.nu_outside));
    } else if (op == "structure") {
        StructureHints hints;
        if (doc.contains("atom_envelopes"))
            for (const auto& e : doc["atom_envelopes"]) hints.atom_envelopes[atom_of(fam, section(e, "atom"))] = envelope_from_json(e);
        hints.witness = witness_from(doc);
        hints.core_envelope = optional_envelope(doc, "core_envelope");
        hints.k_range = o.int_or("k_range", doc, 0);
        hints.retention_fraction = o.num_or("retention_fraction", doc, hints.retention_fraction);
        auto s = structure_report(fam, bopt, hints);
        r.results["case"] = structure_case_name(s.kind);
        r.results["certified"] = s.certified;
        r.results["atom"] = s.atom ? Json(fam.labels()[*s.atom]) : Json(nullptr);
        Json core = Json::array();
        for (auto i : s.core) core.push_back(fam.labels()[i]);
        r.results["core"] = core;
        r.results["reasoning"] = s.reasoning;
        r.add_series(std::move(s.evidence));
    } else {
        throw DomainError("bernoulli op must be kakutani, cocycle, dissipative, bridge, core, type2a, type2b or structure");
    }
    r.results["hypotheses"] = "essential freeness of the action is assumed, not checked";
}

// ---------------------------------------------------------------- suspend

void cmd_suspend(const CommandInput& in, Options& o, Report& r) {
    auto l = load_inputs(in, 1);
    r.config["inputs"] = l.echo;
    const Json& doc = l.docs[0];
    const std::string op = o.str("op", "kappa");
    r.results["op"] = op;

    if (op == "select") {
        auto lambda = section(doc, "lambda").get<std::vector<double>>();
        auto a = section(doc, "a").get<std::vector<double>>();
        auto cand = section(section(doc, "folner"), "sizes").get<std::vector<long>>();
        double kc = positive(o.num_or("kappa_const", doc, 1.0), "kappa_const");
        auto res = subsequence_select(lambda, a, cand, kc);
        Json levels = Json::array();
        for (std::size_t n = 0; n < lambda.size(); ++n) {
            double L = static_cast<double>(res.spec.folner.sizes[n]);
            double cap = std::ldexp(1.0, -static_cast<int>(n + 1));
            double atomic = lambda[n] * (1.0 + std::exp(a[n])) / L;
            double kw = lambda[n] * drift_weight(a[n]) / L;
            bool ok = a[n] == 0.0 || (atomic <= cap && kw <= kc * cap);
            if (!ok) throw InternalError("selected level fails its own constraint re-check");
            levels.push_back(Json{{"level", n + 1},
                                  {"size", res.spec.folner.sizes[n]},
                                  {"atomic", atomic},
                                  {"atomic_cap", cap},
                                  {"kappa_weight", kw},
                                  {"kappa_cap", kc * cap},
                                  {"binding", atomic / cap >= kw / (kc * cap) ? "atomic" : "kappa"}});
        }
        r.results["levels"] = levels;
        r.results["chosen"] = res.chosen;
        r.results["warnings"] = res.warnings;
        r.results["spec"] = intensity_to_config(res.spec);
        return;
    }

    IntensitySpec spec = intensity_from_config(doc);
    spec.validate();
    if (op == "kappa") {
        std::vector<long> g;
        if (doc.contains("g") && doc["g"].is_array()) g = doc["g"].get<std::vector<long>>();
        else g = {o.int_or("g", doc, 1)};
        long levels = o.int_or("levels", doc, static_cast<long>(spec.levels()));
        if (levels < 0) throw DomainError("levels must be >= 0");
        Json per = Json::array();
        for (std::size_t n = 0; n < std::min<std::size_t>(static_cast<std::size_t>(levels), spec.levels()); ++n)
            per.push_back(kappa_level(spec, n, g));
        r.results["g"] = g;
        r.results["kappa"] = kappa(spec, g, static_cast<std::size_t>(levels));
        r.results["per_level"] = per;
        r.results["sup_bound"] = kappa_sup_bound(spec);
    } else if (op == "growth") {
        long radius = positive(o.int_or("radius", doc, 64), "radius");
        std::vector<double> grid;
        if (doc.contains("s_grid")) {
            grid = doc["s_grid"].get<std::vector<double>>();
        } else {
            double smax = positive(o.num_or("s_max", doc, 10.0), "s_max");
            long pts = positive(o.int_or("s_points", doc, 40), "s_points");
            for (long i = 1; i <= pts; ++i) grid.push_back(smax * static_cast<double>(i) / static_cast<double>(pts));
        }
        auto g = conservativity_growth(spec, radius, grid);
        Json rows = Json::array();
        for (const auto& row : g.rows) rows.push_back(Json{{"s", row.s}, {"count", row.count}, {"ratio", row.ratio}});
        r.results["rows"] = rows;
        r.results["sup_bound"] = g.sup_bound;
        r.results["limsup_estimate"] = g.limsup_estimate;
        r.results["verdict"] = growth_verdict_name(g.verdict);
        r.results["reasoning"] = g.reasoning;
    } else if (op == "emit") {
        EmitOptions eopt;
        eopt.eps_trunc = positive(o.num_or("eps_trunc", doc, kDefaultTruncation), "eps_trunc");
        eopt.atom_cap = static_cast<std::size_t>(positive(o.int_or("atom_cap", doc, static_cast<long>(eopt.atom_cap)), "atom_cap"));
        BernoulliFamily fam = emit_bernoulli(spec, eopt);
        // Union bound on the all-zero atom, checked at every g up to the last level set.
        long last = *fam.constant_beyond() + 1;
        for (long g = -last; g <= last; ++g) {
            double sum = 0.0;
            for (std::size_t n = 0; n < spec.levels(); ++n) sum += level_intensity(spec, n, g);
            double zero_mass = fam.at(g).atoms().front().mass;
            if (zero_mass < 1.0 - sum - 1e-12) throw BoundViolation("all-zero atom mass below 1 - sum gamma at g = " + std::to_string(g));
        }
        Json fam_cfg = emitted_family_config(spec, eopt);
        fam_cfg["constant_beyond"] = *fam.constant_beyond();
        Json family_doc{{"family", fam_cfg}};
        r.results["family_config"] = family_doc;
        r.results["atom_count"] = fam.atom_count();
        r.results["constant_beyond"] = *fam.constant_beyond();
        r.attachments.push_back({"family.toml", to_toml(family_doc)});
    } else if (op == "flowspec") {
        PoissonFlowSpec flow = associated_flow_spec(spec);
        r.results["poisson_flow"] = to_json(flow);
        if (!flow.entries.empty()) {
            double omega = o.num_or("omega", doc, 2.0 * std::numbers::pi / flow.entries.front().b);
            auto entries = flow.entries;
            const long count = static_cast<long>(entries.size());
            // Entries beyond the list repeat the last one.
            MeasureSequence seq(
                IndexDomain::Naturals,
                [entries, count](long n) {
                    const auto& e = entries[static_cast<std::size_t>(std::min(n, count) - 1)];
                    return standard_poisson(e.lambda, e.b);
                },
                "flow_spec",
                [entries, count](long n, double w) {
                    const auto& e = entries[static_cast<std::size_t>(std::min(n, count) - 1)];
                    return compound_poisson_char_fn(DiscreteMeasure::dirac(e.b, e.lambda), w);
                });
            TailOptions topt;
            topt.horizon = positive(o.int_or("horizon", doc, std::max<long>(count, 100)), "horizon");
            bool lattice = true;
            for (const auto& e : entries) {
                double q = omega * e.b / (2.0 * std::numbers::pi);
                if (std::abs(q - std::round(q)) > 1e-12 * std::max(1.0, std::abs(q))) lattice = false;
            }
            if (lattice) topt.envelope = TermEnvelope::zero(1);
            r.results["omega"] = omega;
            r.results["lattice"] = lattice;
            r.add_series(eigenvalue_certificate(seq, omega, topt));
        }
    } else {
        throw DomainError("suspend op must be kappa, growth, select, emit or flowspec");
    }
}

}  // namespace

Report execute(const CommandInput& in) {
    Options o(in.options);
    Report r;
    r.command = in.command;
    if (!in.options.contains("seed")) o.integer("seed", 0);  // recorded even when unused
    if (in.command == "metric") cmd_metric(in, o, r);
    else if (in.command == "tail") cmd_tail(in, o, r);
    else if (in.command == "pipeline") cmd_pipeline(in, o, r);
    else if (in.command == "bernoulli") cmd_bernoulli(in, o, r);
    else if (in.command == "suspend") cmd_suspend(in, o, r);
    else throw DomainError("unknown command '" + in.command + "'");
    r.config["options"] = o.echo();
    verify_report_body(r.body());
    return r;
}

Report run_batch(const std::filesystem::path& jobs_file, const std::string& timestamp) {
    Json doc = load_document(jobs_file);
    const auto base = jobs_file.parent_path();
    if (!doc.contains("job") || !doc["job"].is_array()) throw DomainError("batch file needs [[job]] tables");
    Report r;
    r.command = "run";
    r.config["inputs"] = Json::array({Json{{"path", jobs_file.generic_string()}, {"document", doc}}});
    Json jobs = Json::array();
    std::size_t i = 0;
    for (const auto& job : doc["job"]) {
        CommandInput in;
        in.command = section(job, "command").get<std::string>();
        if (in.command == "run") throw DomainError("batch jobs cannot nest run");
        Json options = Json::object();
        for (auto it = job.begin(); it != job.end(); ++it)
            if (it.key() != "command" && it.key() != "inputs" && it.key() != "out") options[it.key()] = it.value();
        in.options = options;
        if (job.contains("inputs"))
            for (const auto& p : job["inputs"]) in.inputs.push_back(base / p.get<std::string>());
        Report sub = execute(in);
        if (job.contains("out")) write_report(sub, base / job["out"].get<std::string>(), timestamp);
        for (auto s : sub.series) {
            s.name = "job" + std::to_string(i) + ":" + s.name;
            r.add_series(std::move(s));
        }
        jobs.push_back(Json{{"command", in.command}, {"report", sub.body()}});
        ++i;
    }
    r.results["jobs"] = jobs;
    r.config["options"] = Json::object();
    verify_report_body(r.body());
    return r;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const BoundViolation*>(&e) || dynamic_cast<const InternalError*>(&e)) return 2;
    return 1;
}

}  // namespace flowlab
