#pragma once

#include "tsgda/classify.hpp"
#include "tsgda/converge.hpp"
#include "tsgda/ganlab.hpp"
#include "tsgda/simulate.hpp"
#include "tsgda/timescale.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace tsgda {

using nlohmann::json;

// Complex numbers are [re, im]; non-finite reals are the strings "inf", "-inf", "nan".
json real_to_json(double x);
double real_from_json(const json& j);

json complex_to_json(const Complex& z);
Complex complex_from_json(const json& j);
void to_json(json& j, const Spectrum& s);
void from_json(const json& j, Spectrum& s);
void to_json(json& j, const Inertia& in);
void from_json(const json& j, Inertia& in);
void to_json(json& j, const Classification& c);
void from_json(const json& j, Classification& c);
void to_json(json& j, const TauStarCertificate& c);
void from_json(const json& j, TauStarCertificate& c);
void to_json(json& j, const TauZeroCertificate& c);
void from_json(const json& j, TauZeroCertificate& c);
void to_json(json& j, const RateReport& r);
void from_json(const json& j, RateReport& r);
void to_json(json& j, const RealizableReport& r);
void from_json(const json& j, RealizableReport& r);

json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);
json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j);

void to_json(json& j, const JacobianBlocks& b);
void from_json(const json& j, JacobianBlocks& b);

PointKind kind_from_string(const std::string& s);

// CSV (RFC 4180). The first header cell is the schema id; its column holds
// the zero-based row index.
inline constexpr const char* kTrajectorySchema = "tsgda.trajectory.v1";
inline constexpr const char* kSweepSchema = "tsgda.sweep.v1";
inline constexpr const char* kRoaSchema = "tsgda.roa.v1";
inline constexpr const char* kFieldSchema = "tsgda.field.v1";

std::string csv_trajectory(const TrajectoryRecord& rec);
std::string csv_sweep(const SpectrumSweep& sweep);
std::string csv_roa(const RoaGrid& roa);
std::string csv_field(const std::vector<FieldSample>& field);

// Splits one CSV document into rows of fields (handles quoted fields).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace tsgda
