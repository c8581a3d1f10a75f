#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdim/caratheodory.hpp"
#include "mdim/moran.hpp"

namespace mdim {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// Non-finite values become null.
json number(double x);

// Metric documents: {"kind": "interval_grid", "points": .., "lo": .., "hi": ..},
// {"kind": "cantor", "depth": ..}, {"kind": "discrete", "symbols": ..},
// {"kind": "product", "factors": [..]}, {"kind": "dense", "labels": [..], "matrix": [..]}.
json formula_to_json(const Formula& f);
json alphabet_to_json(const Alphabet& a);
// Accepts a metric document, optionally with "tail", "valuation", "resolution" overrides.
Alphabet alphabet_from_json(const json& j);

// "lo hi tail : s_lo ... s_hi"
std::string point_line(const SymbolicPoint& x);
SymbolicPoint parse_point_line(const std::string& line);

void write_points(const std::filesystem::path& path, const std::vector<SymbolicPoint>& points);
std::vector<SymbolicPoint> read_points(const std::filesystem::path& path);
// "weight lo hi tail : symbols"
void write_measure(const std::filesystem::path& path, const EmpiricalMeasure& mu);
EmpiricalMeasure read_measure(const std::filesystem::path& path);

// Segment sources are referenced by their index in the plan's source list.
json plan_to_json(const SegmentPlan& plan, const std::vector<std::string>& source_refs);

json to_json(const CriticalExponent& c);
json to_json(const CapacityEstimate& c);
json to_json(const MassCertificate& c, bool with_balls = true);
json to_json(const MoranSchedule& s);
MoranSchedule schedule_from_json(const json& j);
json to_json(const CheckResult& r);
json to_json(const LevelReport& r);
json to_json(const OscillationCertificate& c);

// schedule.json, level_<k>_centers.txt and level_<k>_descent.csv
void write_level_directory(const std::filesystem::path& dir, const MoranSchedule& s,
                           const std::vector<FractalLevel>& levels);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

}  // namespace mdim
