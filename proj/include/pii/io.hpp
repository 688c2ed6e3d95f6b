#pragma once
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pii/solutions.hpp"
#include "pii/verify.hpp"

namespace pii {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

struct Sample {
  double x, u, du, f;
};

// Samples on lo, lo + h, ..., skipping points closer than min_pole_dist to a pole.
std::vector<Sample> sample_trajectory(const Trajectory& t, double spacing, double min_pole_dist = 1e-3);

// Header x,u,u_prime,f; 17 significant digits.
void write_csv(std::ostream& os, const std::vector<Sample>& s);
std::vector<Sample> read_csv(std::istream& is);

// Poles recovered from samples alone: sign flips of u against the sign of u', located by a
// Laurent fit on samples with |u| >= 5, else by the root of 1/u.
std::vector<Pole> census_from_samples(const std::vector<Sample>& s, double alpha);

Json pole_json(const Pole& p);
Json report_json(const TheoremReport& r);

struct SolveRecord {
  PiiParams params;
  std::optional<double> k;
  Window window;
  const Trajectory* traj;
  std::vector<Pole> poles;
  Json checks = Json::object();
};
Json solve_json(const SolveRecord& r);

// Poles of a report written by solve_json.
std::vector<Pole> poles_from_json(const Json& j);

// "a:b" with a < b.
Window parse_window(const std::string& s);
// "a:b:step" (inclusive, tolerant to rounding) or "a,b,c".
std::vector<double> parse_grid(const std::string& s);

// Flat "key = value" file, '#' comments.
std::map<std::string, std::string> read_config(std::istream& is);

}  // namespace pii
