#include "autologit/selector.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "autologit/dataset.hpp"
#include "autologit/errors.hpp"
#include "autologit/parallel.hpp"

namespace autologit {

void CandidateSet::validate() const {
  if (candidates.empty()) throw ConfigError("candidate set is empty");
  std::set<std::string> labels;
  for (const auto& c : candidates)
    if (!labels.insert(c.label).second) throw ConfigError("duplicate candidate label '" + c.label + "'");
}

std::string default_label(const NeighborhoodSpec& instantaneous, const std::optional<NeighborhoodSpec>& past) {
  if (!past) return describe(instantaneous);
  return describe(instantaneous) + "|past=" + describe(*past);
}

CandidateSet enumerate_rect_candidates(const std::vector<int>& v_r_range, const std::vector<int>& v_c_range,
                                       bool only_col_le_row) {
  if (v_r_range.empty() || v_c_range.empty()) throw ConfigError("candidate ranges must be nonempty");
  std::set<std::pair<int, int>> pairs;
  for (int vr : v_r_range)
    for (int vc : v_c_range)
      if (!only_col_le_row || vc <= vr) pairs.emplace(vr, vc);
  CandidateSet set;
  for (const auto& [vr, vc] : pairs) {
    const NeighborhoodSpec spec = RectNeighborhood{vr, vc};
    set.candidates.push_back({default_label(spec, std::nullopt), spec, std::nullopt});
  }
  return set;
}

CandidateSet enumerate_ellipse_candidates(const std::vector<double>& inst_row_axes,
                                          const std::vector<double>& inst_col_axes,
                                          const std::vector<double>& past_row_axes,
                                          const std::vector<double>& past_col_axes) {
  if (inst_row_axes.empty() || inst_col_axes.empty()) throw ConfigError("candidate ranges must be nonempty");
  if (past_row_axes.empty() != past_col_axes.empty())
    throw ConfigError("past ranges must be both given or both omitted");
  const std::set<double> ir(inst_row_axes.begin(), inst_row_axes.end());
  const std::set<double> ic(inst_col_axes.begin(), inst_col_axes.end());
  const std::set<double> pr(past_row_axes.begin(), past_row_axes.end());
  const std::set<double> pc(past_col_axes.begin(), past_col_axes.end());
  CandidateSet set;
  for (double a : ir)
    for (double b : ic) {
      const NeighborhoodSpec inst = EllipseNeighborhood{a, b};
      if (pr.empty()) {
        set.candidates.push_back({default_label(inst, std::nullopt), inst, std::nullopt});
        continue;
      }
      for (double c : pr)
        for (double d : pc) {
          const NeighborhoodSpec past = EllipseNeighborhood{c, d};
          set.candidates.push_back({default_label(inst, past), inst, past});
        }
    }
  return set;
}

namespace {

std::vector<CandidateOutcome> fit_all(const BinaryFieldSeries& z, const CovariateSeries& x, const GridShape& shape,
                                      const CandidateSet& candidates, const FitOptions& options, int threads) {
  candidates.validate();
  std::vector<CandidateOutcome> outcomes(candidates.candidates.size());
  parallel_for(outcomes.size(), threads, [&](std::size_t k) {
    auto& out = outcomes[k];
    out.candidate = candidates.candidates[k];
    try {
      const auto graph = build_neighbor_graph(shape, out.candidate.instantaneous);
      out.edges = graph.num_edges();
      if (out.candidate.past) {
        const auto past_graph = build_neighbor_graph(shape, *out.candidate.past);
        const auto augmented = with_past_neighbor_covariate(x, z, past_graph);
        out.fit = empl_fit(z, augmented, graph, options);
      } else {
        out.fit = empl_fit(z, x, graph, options);
      }
    } catch (const Error& e) {
      out.error = e.what();
    }
  });
  return outcomes;
}

}  // namespace

SelectionReport select_by_pl(const BinaryFieldSeries& z, const CovariateSeries& x, const GridShape& shape,
                             const CandidateSet& candidates, const FitOptions& options, int threads) {
  SelectionReport report;
  report.outcomes = fit_all(z, x, shape, candidates, options, threads);
  for (std::size_t k = 0; k < report.outcomes.size(); ++k)
    if (report.outcomes[k].fit) report.ranking.push_back(k);
  std::sort(report.ranking.begin(), report.ranking.end(), [&](std::size_t a, std::size_t b) {
    const auto& A = report.outcomes[a];
    const auto& B = report.outcomes[b];
    if (A.fit->pl_value != B.fit->pl_value) return A.fit->pl_value > B.fit->pl_value;
    if (A.edges != B.edges) return A.edges < B.edges;
    return A.candidate.label < B.candidate.label;
  });
  if (report.ranking.empty()) {
    std::ostringstream os;
    os << "every candidate fit failed";
    if (!report.outcomes.empty()) os << " (first: " << report.outcomes.front().error << ")";
    throw NumericalError(os.str());
  }
  report.winner = report.best().candidate.label;
  return report;
}

std::vector<ProfileRow> misspecification_profile(const BinaryFieldSeries& z, const CovariateSeries& x,
                                                 const GridShape& shape, const CandidateSet& candidates,
                                                 const FitOptions& options, int threads) {
  std::vector<ProfileRow> rows;
  for (auto& out : fit_all(z, x, shape, candidates, options, threads)) {
    ProfileRow row;
    row.label = out.candidate.label;
    if (out.fit) {
      row.theta = out.fit->params.packed();
      row.pl_value = out.fit->pl_value;
    } else {
      row.error = out.error;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace autologit
