#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "flowlab/bernoulli.hpp"
#include "flowlab/json_io.hpp"
#include "flowlab/measure.hpp"
#include "flowlab/suspension.hpp"

namespace flowlab {

// Reads a TOML document (JSON when the extension is .json) into a JSON tree. Parse failures
// throw DomainError carrying file:line:column; unreadable files throw IOError.
Json load_document(const std::filesystem::path& path);
Json parse_toml(const std::string& text, const std::string& source_name = "<input>");
Json parse_json(const std::string& text, const std::string& source_name = "<input>");

// TOML rendering of a JSON object tree (tables, arrays, scalars; no nulls).
std::string to_toml(const Json& doc);

// A number, or an expression string in the variable n.
std::function<double(long)> index_function(const Json& value, const std::string& what);

// Measure sequence config:
//   domain = "naturals" | "integers"
//   kind = "atoms"    positions = [...], masses = [...], defect = ...  (each an expression in n)
//        | "poisson"  lambda = ..., b = ...        E(lambda delta_b)
//        | "gamma"    b = ...                      two-point state gamma(b)
//        | "compound" positions = [...], masses = [...]  E of the given intensity
//        | "table"    rows = [measure, ...], first = index of rows[0], default = measure
MeasureSequence sequence_from_config(const Json& j, double eps_trunc = kDefaultTruncation);

// Bernoulli family config:
//   kind = "bernoulli"       p = expression; labels "0", "1"
//        | "expr"            labels = [...], masses = [expression per label]
//        | "table"           labels, rows = [{index, masses}], default = [masses]
//        | "uniform_prefix"  size = M; mu_n uniform on atoms 0..min(|n|, M-1)
//        | "poisson_product" lambda, a, sizes, eps_trunc (the emitted suspension family)
//   constant_beyond = N0 (optional)
// size_hint is used when uniform_prefix has no size.
BernoulliFamily family_from_config(const Json& j, long size_hint = 101);

// {lambda = [...], a = [...], folner = {kind = "interval", sizes = [...]}} or
// folner = {kind = "sets", dim = d, sets = [[[x, ...], ...], ...]}.
IntensitySpec intensity_from_config(const Json& j);
Json intensity_to_config(const IntensitySpec& spec);

// Family config that rebuilds emit_bernoulli(spec, opt) through family_from_config.
Json emitted_family_config(const IntensitySpec& spec, const EmitOptions& opt);

}  // namespace flowlab
