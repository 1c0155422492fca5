#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hmmu/meter.hpp"

namespace hmmu {

nlohmann::ordered_json to_json(const FinalReport& r);

/// Flat CSV; column order is fixed by csv_columns().
const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string to_csv_row(const FinalReport& r);

std::string format_metadata_cost(const MetadataCostReport& r);

}  // namespace hmmu
