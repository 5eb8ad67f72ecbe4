#pragma once

#include "levy/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace levy {

struct AssumptionReport;
struct Case1Constants;
struct Case2Params;
struct DriftReport;
struct StepStats;
struct DecayCurve;
struct GibbsReport;
struct ControlPath;
struct TrajectoryBatch;

inline constexpr int kSchemaVersion = 1;

/// Shortest round-trip decimal, independent of the locale; non-finite values
/// print as inf, -inf and nan.
std::string format_double(double x);

/// Writes to a sibling temporary and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Number, or the strings "inf", "-inf", "nan".
nlohmann::json json_number(double x);
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const PhaseState& z);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const Case1Constants& c);
nlohmann::json to_json(const Case2Params& p);
nlohmann::json to_json(const DriftReport& r);
nlohmann::json to_json(const StepStats& s);
nlohmann::json to_json(const DecayCurve& c);
nlohmann::json to_json(const GibbsReport& r);
/// Summary of a control path (grid values go to CSV).
nlohmann::json to_json(const ControlPath& cp);

/// Pretty-printed document with a schema_version field and a final newline.
std::string dump_report(nlohmann::json doc, const std::string& kind);

}  // namespace levy
