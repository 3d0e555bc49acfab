#include "symred/series_io.hpp"

#include "symred/errors.hpp"

namespace symred {

nlohmann::json series_to_json(const Series& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [k, c] : s.terms()) terms.push_back({k.exponents(s.num_vars()), c});
  return {{"num_vars", s.num_vars()}, {"max_degree", s.max_degree()}, {"terms", terms}};
}

Series series_from_json(const nlohmann::json& j) {
  const int n = j.at("num_vars").get<int>();
  const int d = j.at("max_degree").get<int>();
  std::vector<Series::Term> terms;
  for (const auto& t : j.at("terms")) {
    const auto e = t.at(0).get<std::vector<int>>();
    if (e.size() != static_cast<std::size_t>(n)) throw DimensionMismatch("term exponent length differs from num_vars");
    terms.emplace_back(MultiIndex(e), t.at(1).get<double>());
  }
  return Series::from_terms(n, d, std::move(terms));
}

}  // namespace symred
