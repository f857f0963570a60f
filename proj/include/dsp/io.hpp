#pragma once

#include "dsp/approx.hpp"
#include "dsp/core.hpp"
#include "dsp/oracle.hpp"
#include "dsp/restructure.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace dsp {

using Json = nlohmann::ordered_json;

// Integers as JSON numbers, everything else as "p/q".
Json scalar_to_json(const Scalar& x);
// Accepts integer numbers and strings understood by parse_scalar.
Scalar scalar_from_json(const Json& j, const std::string& what);

Json instance_to_json(const Instance& inst);
// Validates the result; throws InputError on malformed input.
Instance instance_from_json(const Json& j);

// The instance is written inline unless `instancePath` is given.
Json packing_to_json(const Packing& p, const std::string& instancePath = "");
// A string "instance" is a path resolved against `baseDir`.
Packing packing_from_json(const Json& j, const std::filesystem::path& baseDir = ".");
bool looks_like_packing(const Json& j);

SolverConfig config_from_json(const Json& j);
Json report_to_json(const SolveReport& r);
Json outcome_to_json(const RestructureOutcome& out);
Json ratio_to_json(const RatioReport& r);

// Throws InputError with the path on unreadable or malformed files.
Json read_json_file(const std::filesystem::path& path);
std::string dump(const Json& j);  // two-space indent, trailing newline

}  // namespace dsp
