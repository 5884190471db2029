#include "hsnn/shapley.hpp"

#include <algorithm>

#include "hsnn/csv.hpp"
#include "hsnn/types.hpp"

namespace hsnn {

const std::array<const char*, kNumProperties> kPropertyNames = {"tau_m", "v_th", "v_rest",
                                                                "r_mem"};

std::string coalition_name(int mask) {
  std::string s = "{";
  for (int p = 0; p < kNumProperties; ++p) {
    if (!(mask & (1 << p))) continue;
    if (s.size() > 1) s += ",";
    s += kPropertyNames[p];
  }
  return s + "}";
}

ShapleyReport shapley_exact(const std::map<int, double>& coalition_values) {
  ShapleyReport rep;
  for (int mask = 0; mask < 16; ++mask) {
    auto it = coalition_values.find(mask);
    require(it != coalition_values.end(),
            "shapley_exact: missing coalition value for " + coalition_name(mask));
    rep.coalition_values[mask] = it->second;
  }

  std::array<int, kNumProperties> order = {0, 1, 2, 3};
  int permutations = 0;
  do {
    int mask = 0;
    for (int p : order) {
      const double marginal = rep.coalition_values[mask | (1 << p)] - rep.coalition_values[mask];
      rep.values[p] += marginal;
      mask |= 1 << p;
    }
    ++permutations;
  } while (std::next_permutation(order.begin(), order.end()));

  for (double& v : rep.values) v /= permutations;  // 24 orderings

  double sum = 0.0;
  for (double v : rep.values) sum += v;
  rep.efficiency_residual = sum - (rep.coalition_values[15] - rep.coalition_values[0]);
  return rep;
}

std::string ShapleyReport::to_csv() const {
  std::string out = "property,value\n";
  for (int p = 0; p < kNumProperties; ++p)
    out += std::string(kPropertyNames[p]) + "," + g17(values[p]) + "\n";
  return out;
}

}  // namespace hsnn
