#include "flowlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "flowlab/errors.hpp"
#include "flowlab/expr.hpp"
#include "toml.hpp"

namespace flowlab {

namespace {

Json from_toml(const toml::node& n) {
    if (auto t = n.as_table()) {
        Json o = Json::object();
        for (auto&& [k, v] : *t) o[std::string(k.str())] = from_toml(v);
        return o;
    }
    if (auto a = n.as_array()) {
        Json arr = Json::array();
        for (auto&& v : *a) arr.push_back(from_toml(v));
        return arr;
    }
    if (auto v = n.as_integer()) return v->get();
    if (auto v = n.as_floating_point()) return v->get();
    if (auto v = n.as_boolean()) return v->get();
    if (auto v = n.as_string()) return v->get();
    auto src = n.source();
    throw DomainError("line " + std::to_string(src.begin.line) + ": date/time values are not accepted");
}

void insert_toml(toml::table& t, const std::string& key, const Json& v);

toml::array toml_array(const Json& j) {
    toml::array arr;
    for (const auto& v : j) {
        if (v.is_object()) {
            toml::table sub;
            for (auto it = v.begin(); it != v.end(); ++it) insert_toml(sub, it.key(), it.value());
            arr.push_back(std::move(sub));
        } else if (v.is_array()) {
            arr.push_back(toml_array(v));
        } else if (v.is_boolean()) {
            arr.push_back(v.get<bool>());
        } else if (v.is_number_integer()) {
            arr.push_back(v.get<int64_t>());
        } else if (v.is_number()) {
            arr.push_back(v.get<double>());
        } else if (v.is_string()) {
            arr.push_back(v.get<std::string>());
        } else {
            throw DomainError("null cannot be written as TOML");
        }
    }
    return arr;
}

void insert_toml(toml::table& t, const std::string& key, const Json& v) {
    if (v.is_object()) {
        toml::table sub;
        for (auto it = v.begin(); it != v.end(); ++it) insert_toml(sub, it.key(), it.value());
        t.insert_or_assign(key, std::move(sub));
    } else if (v.is_array()) {
        t.insert_or_assign(key, toml_array(v));
    } else if (v.is_boolean()) {
        t.insert_or_assign(key, v.get<bool>());
    } else if (v.is_number_integer()) {
        t.insert_or_assign(key, v.get<int64_t>());
    } else if (v.is_number()) {
        t.insert_or_assign(key, v.get<double>());
    } else if (v.is_string()) {
        t.insert_or_assign(key, v.get<std::string>());
    } else {
        throw DomainError("null cannot be written as TOML (key '" + key + "')");
    }
}

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("config is missing '") + key + "'");
    return j[key];
}

std::vector<double> number_list(const Json& j, const char* what) {
    if (!j.is_array()) throw DomainError(std::string(what) + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw DomainError(std::string(what) + " must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<long> integer_list(const Json& j, const char* what) {
    if (!j.is_array()) throw DomainError(std::string(what) + " must be an array");
    std::vector<long> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw DomainError(std::string(what) + " must contain integers");
        out.push_back(v.get<long>());
    }
    return out;
}

std::vector<std::function<double(long)>> function_list(const Json& j, const char* what) {
    if (!j.is_array()) throw DomainError(std::string(what) + " must be an array");
    std::vector<std::function<double(long)>> out;
    for (const auto& v : j) out.push_back(index_function(v, what));
    return out;
}

IndexDomain domain_of(const Json& j) {
    std::string d = j.value("domain", "naturals");
    if (d == "naturals") return IndexDomain::Naturals;
    if (d == "integers") return IndexDomain::Integers;
    throw DomainError("domain must be 'naturals' or 'integers'");
}

std::vector<std::string> label_list(const Json& j) {
    std::vector<std::string> out;
    for (const auto& v : require(j, "labels")) {
        if (v.is_string()) out.push_back(v.get<std::string>());
        else if (v.is_number_integer()) out.push_back(std::to_string(v.get<long>()));
        else throw DomainError("labels must be strings or integers");
    }
    if (out.empty()) throw DomainError("labels must be nonempty");
    return out;
}

DiscreteMeasure measure_on_labels(const std::vector<double>& masses) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < masses.size(); ++i) atoms.push_back({static_cast<double>(i), masses[i]});
    return DiscreteMeasure(std::move(atoms));
}

std::optional<long> constant_beyond_of(const Json& j) {
    if (!j.contains("constant_beyond")) return std::nullopt;
    if (!j["constant_beyond"].is_number_integer()) throw DomainError("constant_beyond must be an integer");
    long v = j["constant_beyond"].get<long>();
    if (v < 0) throw DomainError("constant_beyond must be >= 0");
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

Json parse_toml(const std::string& text, const std::string& source_name) {
    try {
        toml::table t = toml::parse(text, source_name);
        return from_toml(t);
    } catch (const toml::parse_error& e) {
        const auto& b = e.source().begin;
        throw DomainError(source_name + ":" + std::to_string(b.line) + ":" + std::to_string(b.column) + ": " +
                          std::string(e.description()));
    }
}

Json parse_json(const std::string& text, const std::string& source_name) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // nlohmann reports a byte offset; turn it into line:column.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw DomainError(source_name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

Json load_document(const std::filesystem::path& path) {
    std::string text = read_file(path);
    if (path.extension() == ".json") return parse_json(text, path.string());
    return parse_toml(text, path.string());
}

std::string to_toml(const Json& doc) {
    if (!doc.is_object()) throw DomainError("TOML documents are tables");
    toml::table t;
    for (auto it = doc.begin(); it != doc.end(); ++it) insert_toml(t, it.key(), it.value());
    std::ostringstream os;
    os << toml::toml_formatter(t) << "\n";
    return os.str();
}

std::function<double(long)> index_function(const Json& value, const std::string& what) {
    if (value.is_number()) {
        double c = value.get<double>();
        return [c](long) { return c; };
    }
    if (value.is_string()) {
        Expr e = Expr::parse(value.get<std::string>(), {"n"});
        return [e](long n) { return e(static_cast<double>(n)); };
    }
    throw DomainError(what + " must be a number or an expression in n");
}

MeasureSequence sequence_from_config(const Json& j, double eps_trunc) {
    if (!j.is_object()) throw DomainError("sequence config must be a table");
    const std::string kind = require(j, "kind").get<std::string>();
    const IndexDomain domain = domain_of(j);
    const std::string label = j.value("label", kind);

    if (kind == "atoms" || kind == "compound") {
        auto pos = function_list(require(j, "positions"), "positions");
        auto mass = function_list(require(j, "masses"), "masses");
        if (pos.size() != mass.size()) throw DomainError("positions and masses must have the same length");
        auto defect = j.contains("defect") ? index_function(j["defect"], "defect") : [](long) { return 0.0; };
        auto build = [pos, mass, defect](long n) {
            std::vector<Atom> atoms;
            for (std::size_t i = 0; i < pos.size(); ++i) {
                double m = mass[i](n);
                if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("mass expression gave a negative or non-finite value");
                atoms.push_back({pos[i](n), m});
            }
            return DiscreteMeasure(std::move(atoms), defect(n));
        };
        if (kind == "atoms") return MeasureSequence(domain, build, label);
        return MeasureSequence(
            domain, [build, eps_trunc](long n) { return compound_poisson(build(n), eps_trunc); }, label,
            [build](long n, double w) { return compound_poisson_char_fn(build(n), w); });
    }
    if (kind == "poisson") {
        auto lam = index_function(require(j, "lambda"), "lambda");
        auto b = index_function(require(j, "b"), "b");
        return MeasureSequence(
            domain, [lam, b, eps_trunc](long n) { return standard_poisson(lam(n), b(n), eps_trunc); }, label,
            [lam, b](long n, double w) { return compound_poisson_char_fn(DiscreteMeasure::dirac(b(n), lam(n)), w); });
    }
    if (kind == "gamma") {
        auto b = index_function(require(j, "b"), "b");
        return MeasureSequence(
            domain, [b](long n) { return two_point_gamma(b(n)); }, label,
            [b](long n, double w) { return char_fn(two_point_gamma(b(n)), w); });
    }
    if (kind == "table") {
        std::vector<DiscreteMeasure> rows;
        for (const auto& r : require(j, "rows")) rows.push_back(measure_from_json(r));
        long first = j.contains("first") ? j["first"].get<long>() : (domain == IndexDomain::Naturals ? 1 : 0);
        std::optional<DiscreteMeasure> dflt;
        if (j.contains("default")) dflt = measure_from_json(j["default"]);
        return MeasureSequence(
            domain,
            [rows, first, dflt](long n) {
                long i = n - first;
                if (i >= 0 && i < static_cast<long>(rows.size())) return rows[static_cast<std::size_t>(i)];
                if (dflt) return *dflt;
                throw DomainError("table sequence has no row for index " + std::to_string(n) + " and no default");
            },
            label);
    }
    throw DomainError("unknown sequence kind '" + kind + "'");
}

BernoulliFamily family_from_config(const Json& j, long size_hint) {
    if (!j.is_object()) throw DomainError("family config must be a table");
    const std::string kind = require(j, "kind").get<std::string>();
    const std::string name = j.value("name", kind);
    const auto beyond = constant_beyond_of(j);

    if (kind == "bernoulli") {
        auto p = index_function(require(j, "p"), "p");
        return BernoulliFamily(
            {"0", "1"},
            [p](long n) {
                double q = p(n);
                if (!(q >= 0.0 && q <= 1.0)) throw DomainError("bernoulli p outside [0, 1] at n = " + std::to_string(n));
                return measure_on_labels({1.0 - q, q});
            },
            name, beyond);
    }
    if (kind == "expr") {
        auto labels = label_list(j);
        auto masses = function_list(require(j, "masses"), "masses");
        if (masses.size() != labels.size()) throw DomainError("need one mass expression per label");
        return BernoulliFamily(
            labels,
            [masses](long n) {
                std::vector<double> m;
                for (const auto& f : masses) m.push_back(f(n));
                return measure_on_labels(m);
            },
            name, beyond);
    }
    if (kind == "table") {
        auto labels = label_list(j);
        std::map<long, std::vector<double>> rows;
        if (j.contains("rows"))
            for (const auto& r : j["rows"]) {
                auto m = number_list(require(r, "masses"), "masses");
                if (m.size() != labels.size()) throw DomainError("table row has the wrong number of masses");
                rows[require(r, "index").get<long>()] = m;
            }
        auto dflt = number_list(require(j, "default"), "default");
        if (dflt.size() != labels.size()) throw DomainError("default row has the wrong number of masses");
        return BernoulliFamily(
            labels,
            [rows, dflt](long n) {
                auto it = rows.find(n);
                return measure_on_labels(it == rows.end() ? dflt : it->second);
            },
            name, beyond);
    }
    if (kind == "uniform_prefix") {
        long M = j.contains("size") ? j["size"].get<long>() : size_hint;
        if (M < 1) throw DomainError("uniform_prefix size must be >= 1");
        std::vector<std::string> labels;
        for (long i = 0; i < M; ++i) labels.push_back(std::to_string(i));
        return BernoulliFamily(
            labels,
            [M](long n) {
                long top = std::min(std::labs(n), M - 1);
                std::vector<double> m(static_cast<std::size_t>(M), 0.0);
                for (long i = 0; i <= top; ++i) m[static_cast<std::size_t>(i)] = 1.0 / static_cast<double>(top + 1);
                return measure_on_labels(m);
            },
            name, beyond);
    }
    if (kind == "poisson_product") {
        IntensitySpec spec = intensity_from_config(j);
        EmitOptions opt;
        if (j.contains("eps_trunc")) opt.eps_trunc = j["eps_trunc"].get<double>();
        if (j.contains("defect_budget")) opt.defect_budget = j["defect_budget"].get<double>();
        if (j.contains("atom_cap")) opt.atom_cap = j["atom_cap"].get<std::size_t>();
        return emit_bernoulli(spec, opt);
    }
    throw DomainError("unknown family kind '" + kind + "'");
}

IntensitySpec intensity_from_config(const Json& j) {
    IntensitySpec spec;
    spec.lambda = number_list(require(j, "lambda"), "lambda");
    spec.a = number_list(require(j, "a"), "a");
    const Json& f = require(j, "folner");
    std::string kind = f.value("kind", "interval");
    if (kind == "interval") {
        spec.folner.kind = FolnerSpec::Kind::Interval;
        spec.folner.sizes = integer_list(require(f, "sizes"), "folner.sizes");
    } else if (kind == "sets") {
        spec.folner.kind = FolnerSpec::Kind::Sets;
        spec.folner.dim = require(f, "dim").get<std::size_t>();
        for (const auto& A : require(f, "sets")) {
            std::vector<std::vector<long>> pts;
            for (const auto& x : A) pts.push_back(integer_list(x, "folner.sets point"));
            spec.folner.sets.push_back(std::move(pts));
        }
    } else {
        throw DomainError("folner kind must be 'interval' or 'sets'");
    }
    return spec;
}

Json intensity_to_config(const IntensitySpec& spec) {
    Json f;
    if (spec.folner.kind == FolnerSpec::Kind::Interval) {
        f = Json{{"kind", "interval"}, {"sizes", spec.folner.sizes}};
    } else {
        f = Json{{"kind", "sets"}, {"dim", spec.folner.dim}, {"sets", spec.folner.sets}};
    }
    return Json{{"lambda", spec.lambda}, {"a", spec.a}, {"folner", std::move(f)}};
}

Json emitted_family_config(const IntensitySpec& spec, const EmitOptions& opt) {
    Json j = intensity_to_config(spec);
    j["kind"] = "poisson_product";
    j["name"] = "poisson_product";
    j["eps_trunc"] = opt.eps_trunc;
    j["defect_budget"] = opt.defect_budget;
    j["atom_cap"] = opt.atom_cap;
    return j;
}

}  // namespace flowlab
