#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "flowlab/certificate.hpp"
#include "flowlab/json_io.hpp"

namespace flowlab {

inline constexpr const char* kToolVersion = "0.1.0";

struct Report {
    std::string command;
    Json config = Json::object();   // echo of options and parsed inputs
    Json results = Json::object();
    std::vector<CertificateSeries> series;
    // Extra files written next to report.json, e.g. an emitted family config.
    std::vector<std::pair<std::string, std::string>> attachments;

    void add_series(CertificateSeries s) { series.push_back(std::move(s)); }

    // Everything except the provenance block; a pure function of the inputs.
    Json body() const;
    // body() plus {"provenance": {"tool_version", "timestamp"}}.
    Json full(const std::string& timestamp) const;
};

std::string utc_timestamp();

// Re-sums the embedded terms of a report body and checks partial sums and verdict shape.
// Throws InternalError on mismatch.
void verify_report_body(const Json& body);

// CSV with header index,term,partial_sum and %.17g floats.
std::string series_csv(const CertificateSeries& s);
void export_series(const CertificateSeries& s, const std::filesystem::path& path);

// Writes dir/report.json, one CSV per series, and the attachments; returns the CSV paths.
std::vector<std::filesystem::path> write_report(const Report& r, const std::filesystem::path& dir,
                                                const std::string& timestamp);

}  // namespace flowlab
