#pragma once

#include <optional>
#include <string>
#include <vector>

#include "autologit/estimator.hpp"
#include "autologit/lattice.hpp"
#include "autologit/model.hpp"

namespace autologit {

struct Candidate {
  std::string label;
  NeighborhoodSpec instantaneous;
  // When set, the count of past-neighbour cases is appended as a covariate.
  std::optional<NeighborhoodSpec> past;
};

struct CandidateSet {
  std::vector<Candidate> candidates;
  void validate() const;
};

std::string default_label(const NeighborhoodSpec& instantaneous, const std::optional<NeighborhoodSpec>& past);

// Cartesian product v_r x v_c in ascending (v_r, v_c) order, duplicates
// removed. With only_col_le_row, pairs with v_c > v_r are skipped.
CandidateSet enumerate_rect_candidates(const std::vector<int>& v_r_range, const std::vector<int>& v_c_range,
                                       bool only_col_le_row = false);

// Instantaneous ellipse axes x optional past ellipse axes.
CandidateSet enumerate_ellipse_candidates(const std::vector<double>& inst_row_axes,
                                          const std::vector<double>& inst_col_axes,
                                          const std::vector<double>& past_row_axes = {},
                                          const std::vector<double>& past_col_axes = {});

struct CandidateOutcome {
  Candidate candidate;
  std::size_t edges = 0;
  std::optional<FitResult> fit;
  std::string error;
};

struct SelectionReport {
  std::vector<CandidateOutcome> outcomes;  // candidate order
  std::vector<std::size_t> ranking;        // indices into outcomes, best first; failed fits excluded
  std::string winner;

  const CandidateOutcome& best() const { return outcomes.at(ranking.at(0)); }
};

// Fits every candidate by EMPL and ranks by maximised log-PL. Ties are broken
// by fewer edges, then by label.
SelectionReport select_by_pl(const BinaryFieldSeries& z, const CovariateSeries& x, const GridShape& shape,
                             const CandidateSet& candidates, const FitOptions& options = {}, int threads = 1);

struct ProfileRow {
  std::string label;
  std::optional<std::vector<double>> theta;
  std::optional<double> pl_value;
  std::string error;
};

// Estimates under each candidate, side by side, in candidate order.
std::vector<ProfileRow> misspecification_profile(const BinaryFieldSeries& z, const CovariateSeries& x,
                                                 const GridShape& shape, const CandidateSet& candidates,
                                                 const FitOptions& options = {}, int threads = 1);

}  // namespace autologit
