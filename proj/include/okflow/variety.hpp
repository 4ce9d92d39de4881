#ifndef OKFLOW_VARIETY_HPP
#define OKFLOW_VARIETY_HPP

#include "okflow/series.hpp"

#include <string>
#include <vector>

namespace okflow {

// Input description of a projectively embedded variety in one affine chart:
// defining polynomials, a base point, the split into local coordinates and
// dependent variables, and the section basis as numerator polynomials over a
// named trivializing section tau.
struct VarietySpec {
  struct Section {
    std::string id;
    std::string expr;
  };

  std::string name;
  std::vector<std::string> variables;    // chart variables, order fixes the point layout
  QVec point;                            // p; local coordinates must vanish here
  std::vector<std::string> local_coords; // subset of variables
  std::vector<std::string> defining;     // one polynomial per dependent variable
  std::string tau;
  std::vector<Section> sections;
  std::int64_t trunc = 24;

  static VarietySpec from_json(const std::string& text);
  static VarietySpec load(const std::string& path);
};

struct ExpandedSections {
  std::size_t n = 0;                   // number of local coordinates
  std::vector<std::string> ids;
  std::vector<TruncSeries> series;     // f_j = eta_j / tau expanded at p, arity n
  std::vector<std::string> dependents; // solved variable names
  std::vector<TruncSeries> dependent_series;
};

// Solves the dependent variables as power series in the local coordinates
// (joint series-Newton on the defining system) and expands every section.
// Checks exactly that p lies on the variety and that the coordinate split is
// transverse there.
ExpandedSections expand_sections(const VarietySpec& spec, std::int64_t trunc_override = 0);

} // namespace okflow

#endif
