#pragma once

// Reference computations used by the unit and acceptance tests. Nothing here
// calls into the library's allocation or KPI code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace oracle {

using json = nlohmann::json;

struct Agg {
  double demand = 0.0;
  double guaranteed = 0.0;  // fraction
  double maximum = std::numeric_limits<double>::infinity();
};

/// Largest t in [0, 1] with sum(f(t)) <= budget, f monotone in t.
/// Bisection to the last representable step.
template <class F>
double searchLevel(F total, double budget) {
  if (total(1.0) <= budget) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && lo < hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (total(mid) <= budget ? lo : hi) = mid;
  }
  return lo;
}

/// Served vector characterised by constraints rather than a closed form:
///   floors  = largest common scale s of min(d, gC) that fits C
///   top-up  = largest common fill level t of each residual up to
///             min(d, mC) that fits what floors leave.
inline std::vector<double> allocate(const std::vector<Agg>& aggs, double capacity) {
  const std::size_t n = aggs.size();
  std::vector<double> floor(n), reach(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cap = std::isinf(aggs[i].maximum) ? aggs[i].demand : std::min(aggs[i].demand, aggs[i].maximum * capacity);
    floor[i] = std::min(aggs[i].demand, aggs[i].guaranteed * capacity);
    reach[i] = std::max(cap, floor[i]);
  }
  const double s = searchLevel(
      [&](double k) {
        double sum = 0;
        for (double f : floor) sum += k * f;
        return sum;
      },
      capacity);
  std::vector<double> out(n);
  double used = 0;
  for (std::size_t i = 0; i < n; ++i) used += out[i] = s * floor[i];
  const double spare = std::max(0.0, capacity - used);
  const double t = searchLevel(
      [&](double k) {
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) sum += k * (reach[i] - floor[i]);
        return sum;
      },
      spare);
  for (std::size_t i = 0; i < n; ++i)
    if (s >= 1.0) out[i] += t * (reach[i] - floor[i]);
  return out;
}

/// Instance on the discrete grid: integer capacity 1..20 units, integer
/// demands, guarantee and cap fractions in steps of 1/capacity, with the
/// guarantees of a cell summing to at most 1.
inline std::pair<std::vector<Agg>, double> gridInstance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nDist(1, 4), capDist(1, 20);
  const int n = nDist(rng);
  const int cap = capDist(rng);
  std::vector<Agg> aggs(n);
  int budget = cap;
  for (auto& a : aggs) {
    a.demand = std::uniform_int_distribution<int>(0, 2 * cap)(rng);
    const int g = std::uniform_int_distribution<int>(0, budget)(rng) * (rng() % 3 == 0 ? 0 : 1);
    budget -= g;
    a.guaranteed = static_cast<double>(g) / cap;
    if (rng() % 3 == 0) a.maximum = static_cast<double>(std::uniform_int_distribution<int>(g, cap)(rng)) / cap;
  }
  return {aggs, static_cast<double>(cap)};
}

inline std::pair<std::vector<Agg>, double> continuousInstance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = std::uniform_int_distribution<int>(1, 6)(rng);
  const double cap = 1.0 + 999.0 * u(rng);
  std::vector<Agg> aggs(n);
  double budget = rng() % 4 == 0 ? 1.5 : 1.0;  // occasionally oversubscribed (forced)
  for (auto& a : aggs) {
    a.demand = u(rng) < 0.1 ? 0.0 : 1.5 * cap * u(rng);
    a.guaranteed = u(rng) < 0.2 ? 0.0 : budget * u(rng) * 0.6;
    budget = std::max(0.0, budget - a.guaranteed);
    if (u(rng) < 0.3) a.maximum = a.guaranteed + (1.0 - std::min(1.0, a.guaranteed)) * u(rng);
  }
  return {aggs, cap};
}

/// Property violations of a served vector, empty when all hold.
inline std::vector<std::string> allocationProperties(const std::vector<Agg>& aggs, double capacity,
                                                     const std::vector<double>& served, double tol) {
  std::vector<std::string> bad;
  double sumFloor = 0, sumReach = 0, sumServed = 0;
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    const double floor = std::min(aggs[i].demand, aggs[i].guaranteed * capacity);
    const double cap = std::isinf(aggs[i].maximum) ? aggs[i].demand : std::min(aggs[i].demand, aggs[i].maximum * capacity);
    sumFloor += floor;
    sumReach += std::max(cap, floor);
    sumServed += served[i];
    if (served[i] < -tol) bad.push_back("negative served");
    if (served[i] > aggs[i].demand + tol) bad.push_back("served above demand");
    if (served[i] > std::max(cap, floor) + tol) bad.push_back("served above cap");
  }
  if (sumServed > capacity + tol) bad.push_back("capacity exceeded");
  if (sumFloor <= capacity + tol) {
    for (std::size_t i = 0; i < aggs.size(); ++i) {
      const double floor = std::min(aggs[i].demand, aggs[i].guaranteed * capacity);
      if (served[i] < floor - tol) bad.push_back("floor not respected");
    }
  }
  const double want = std::min(capacity, sumReach);
  if (std::abs(sumServed - want) > tol * std::max(1.0, want)) bad.push_back("not work-conserving");
  return bad;
}

/// Average over [from, to] of the per-tick non-GBR served rate of one RAN
/// slice, read straight from a pm-samples.ndjson stream. Sums in file order.
inline std::map<std::string, double> nonGbrFromNdjson(const std::string& text, const std::string& ranSliceId,
                                                      std::int64_t from, std::int64_t to) {
  static const std::set<int> gbr5qi{1, 2, 3, 4, 65, 66, 67, 71, 72, 73, 74, 75, 76, 82, 83, 84, 85, 86, 87, 88, 89, 90};
  std::map<std::int64_t, double> perTick;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const auto tick = j.at("tick").get<std::int64_t>();
    if (tick < from || tick > to) continue;
    if (j.at("record") == "tick") perTick.emplace(tick, 0.0);
    if (j.at("record") != "sample" || j.value("ranSliceId", "") != ranSliceId) continue;
    for (const auto& a : j.at("aggregates"))
      for (const auto& f : a.at("flows"))
        if (!gbr5qi.count(f.at("fiveQi").get<int>())) perTick[tick] += f.at("served").get<double>();
  }
  double sum = 0, min = std::numeric_limits<double>::infinity();
  for (const auto& [t, v] : perTick) {
    sum += v;
    min = std::min(min, v);
  }
  return {{"avg", perTick.empty() ? 0.0 : sum / static_cast<double>(perTick.size())},
          {"min", perTick.empty() ? 0.0 : min},
          {"ticks", static_cast<double>(perTick.size())}};
}

}  // namespace oracle
