#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "hardyscope/classify.hpp"
#include "hardyscope/flowcheck.hpp"
#include "hardyscope/hardy.hpp"
#include "hardyscope/spectrum.hpp"

namespace hardyscope {

// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

// Finite values as JSON numbers, non-finite ones as the strings above.
nlohmann::json json_number(double v);
nlohmann::json to_json(Vec2 p);

nlohmann::json to_json(const HardyReport& r);
nlohmann::json to_json(const Hardy1DReport& r);
nlohmann::json to_json(const WeakHardyConstants& c);
nlohmann::json to_json(const CrokeReport& r);
nlohmann::json to_json(const QbReport& r);
nlohmann::json to_json(const BdrReport& r);
nlohmann::json to_json(const Certificate& c);
nlohmann::json to_json(const EigenResult& r);
nlohmann::json to_json(const TruncationTable& t);
nlohmann::json to_json(const SantaloReport& r);

// Columns x, y, d, m, flags (bitmask of WeightFlags).
void write_weight_csv(std::ostream& out, const WeightField& field);
// Columns cut_level, h, k, lambda, diff, residual; one row per level and eigenvalue index.
void write_truncation_csv(std::ostream& out, const TruncationTable& table);
// Coordinate triplets "row col value" for the stiffness, then "row value" for the mass diagonal.
void write_triplets(std::ostream& out, const SparsePencil& pencil);

}  // namespace hardyscope
