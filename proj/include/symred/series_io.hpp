#pragma once

// Structured-text form of a series:
//   { "num_vars": n, "max_degree": d, "terms": [[[e_1, ..., e_n], c], ...] }

#include <nlohmann/json.hpp>

#include "symred/series.hpp"

namespace symred {

nlohmann::json series_to_json(const Series& s);
Series series_from_json(const nlohmann::json& j);

}  // namespace symred
