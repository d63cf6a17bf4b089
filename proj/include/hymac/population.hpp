#ifndef HYMAC_POPULATION_HPP
#define HYMAC_POPULATION_HPP

#include <map>
#include <vector>

#include "hymac/error.hpp"

namespace hymac {

/// Expected active-device counts at the start of frame `frame_index`.
///
/// counts[q - 1][d] is the expected number of class-q devices that have lost
/// d consecutive frames. Counts are real-valued expectations.
struct PopulationState {
  int frame_index = 1;
  std::vector<std::vector<double>> counts;

  /// Counts summed per virtual class rho = q + d - 1.
  std::map<int, double> virtual_counts() const {
    std::map<int, double> out;
    for (std::size_t q = 0; q < counts.size(); ++q) {
      for (std::size_t d = 0; d < counts[q].size(); ++d) {
        if (counts[q][d] > 0.0) out[static_cast<int>(q + d)] += counts[q][d];
      }
    }
    return out;
  }

  /// Highest occupied virtual class, or -1 when nobody is active.
  int theta() const {
    const auto v = virtual_counts();
    return v.empty() ? -1 : v.rbegin()->first;
  }

  double total() const {
    double t = 0.0;
    for (const auto& row : counts) {
      for (double c : row) t += c;
    }
    return t;
  }

  double class_total(int q) const {
    if (q < 1 || q > static_cast<int>(counts.size())) throw InvalidArgument("population: class out of range");
    double t = 0.0;
    for (double c : counts[q - 1]) t += c;
    return t;
  }
};

}  // namespace hymac

#endif  // HYMAC_POPULATION_HPP
