#include "flowlab/report.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "flowlab/errors.hpp"

namespace flowlab {

namespace {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string file_stem(std::size_t i, const std::string& name) {
    std::string s = std::to_string(i) + "_";
    for (char c : name) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return s;
}

double as_double(const Json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        return NAN;
    }
    throw InternalError("report series holds a non-numeric value");
}

}  // namespace

Json Report::body() const {
    Json s = Json::array();
    for (const auto& c : series) s.push_back(to_json(c));
    return Json{{"tool", "flowlab"}, {"command", command}, {"config", config}, {"results", results}, {"series", std::move(s)}};
}

Json Report::full(const std::string& timestamp) const {
    Json j = body();
    j["provenance"] = Json{{"tool_version", kToolVersion}, {"timestamp", timestamp}};
    return j;
}

std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void verify_report_body(const Json& body) {
    for (const auto& s : body.at("series")) {
        const auto& terms = s.at("terms");
        const auto& partial = s.at("partial");
        const std::string name = s.value("name", "");
        if (terms.size() != partial.size() || terms.size() != s.at("indices").size())
            throw InternalError("series '" + name + "' has ragged arrays");
        double run = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            run += as_double(terms[i]);
            double p = as_double(partial[i]);
            if (std::isfinite(run) || std::isfinite(p)) {
                if (!(std::abs(run - p) <= 1e-12 * std::max(1.0, std::abs(run))))
                    throw InternalError("series '" + name + "' partial sums do not re-sum");
            }
        }
        const std::string v = s.at("verdict").get<std::string>();
        if (v == verdict_name(Verdict::CertifiedConvergent)) {
            if (s.at("tail_bound").is_null() || !std::isfinite(as_double(s["tail_bound"])) || !std::isfinite(run))
                throw InternalError("series '" + name + "' is convergent without a finite tail bound");
        } else if (v == verdict_name(Verdict::CertifiedDivergent)) {
            if (s.value("witness", "").empty()) throw InternalError("series '" + name + "' is divergent without a witness");
        } else if (v != verdict_name(Verdict::Inconclusive)) {
            throw InternalError("series '" + name + "' has an unknown verdict");
        }
    }
}

std::string series_csv(const CertificateSeries& s) {
    std::string out = "index,term,partial_sum\n";
    for (std::size_t i = 0; i < s.terms.size(); ++i)
        out += std::to_string(s.indices[i]) + "," + g17(s.terms[i]) + "," + g17(s.partial[i]) + "\n";
    return out;
}

void export_series(const CertificateSeries& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot write " + path.string());
    out << series_csv(s);
    if (!out) throw IOError("write failed for " + path.string());
}

std::vector<std::filesystem::path> write_report(const Report& r, const std::filesystem::path& dir,
                                                const std::string& timestamp) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IOError("cannot create " + dir.string() + ": " + ec.message());
    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        if (!out) throw IOError("cannot write " + (dir / "report.json").string());
        out << r.full(timestamp).dump(2) << "\n";
        if (!out) throw IOError("write failed for " + (dir / "report.json").string());
    }
    std::vector<std::filesystem::path> paths;
    for (std::size_t i = 0; i < r.series.size(); ++i) {
        auto p = dir / (file_stem(i, r.series[i].name) + ".csv");
        export_series(r.series[i], p);
        paths.push_back(p);
    }
    for (const auto& [name, content] : r.attachments) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw IOError("cannot write " + (dir / name).string());
        out << content;
    }
    return paths;
}

}  // namespace flowlab
