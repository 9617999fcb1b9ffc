#include "autologit/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "autologit/errors.hpp"
#include "json.hpp"

namespace autologit {

using json = nlohmann::ordered_json;

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::pair<double, double> axes(const NeighborhoodSpec& spec) {
  if (const auto* r = std::get_if<RectNeighborhood>(&spec)) return {r->v_along_row, r->v_along_col};
  const auto& e = std::get<EllipseNeighborhood>(spec);
  return {e.semi_along_row, e.semi_along_col};
}

std::string number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json fit_json(const FitResult& fit, const std::string* graph_label = nullptr) {
  json j;
  if (graph_label) j["graph"] = *graph_label;
  j["variant"] = to_string(fit.params.variant);
  j["parameters"] = fit.parameter_names;
  j["estimates"] = fit.params.packed();
  j["sd_sandwich"] = fit.sd_sandwich();
  j["sd_bootstrap"] = fit.cov_bootstrap ? json(fit.sd_bootstrap()) : json(nullptr);
  j["log_pl"] = fit.pl_value;
  j["converged"] = fit.converged;
  j["em_iterations"] = fit.em_iterations;
  j["stage1"] = fit.stage1_theta;
  j["information"] = matrix_json(fit.information);
  j["cov_sandwich"] = matrix_json(fit.cov_sandwich);
  j["cov_bootstrap"] = fit.cov_bootstrap ? matrix_json(*fit.cov_bootstrap) : json(nullptr);
  j["bootstrap_replicates"] = fit.bootstrap_replicates;
  json trace = json::array();
  for (const auto& it : fit.trace)
    trace.push_back({{"iteration", it.iteration},
                     {"pl_frozen_start", it.pl_frozen_start},
                     {"pl_frozen_end", it.pl_frozen_end},
                     {"pl_exact", it.pl_exact},
                     {"qn_iterations", it.qn_iterations},
                     {"theta", it.theta}});
  j["trace"] = trace;
  return j;
}

}  // namespace

std::string fit_result_json(const FitResult& fit, const std::string& graph_label) {
  return fit_json(fit, &graph_label).dump(2);
}

std::string fit_result_table(const FitResult& fit, const std::string& graph_label) {
  std::ostringstream os;
  const auto theta = fit.params.packed();
  const auto sd = fit.sd_sandwich();
  const auto sdb = fit.cov_bootstrap ? fit.sd_bootstrap() : std::vector<double>{};
  os << "graph " << graph_label << ", variant " << to_string(fit.params.variant) << ", log-PL "
     << std::setprecision(10) << fit.pl_value << ", EM iterations " << fit.em_iterations
     << (fit.converged ? "" : " (not converged)") << "\n";
  os << std::left << std::setw(16) << "parameter" << std::right << std::setw(14) << "estimate" << std::setw(14)
     << "sd(sandwich)";
  if (!sdb.empty()) os << std::setw(14) << "sd(bootstrap)";
  os << "\n" << std::fixed << std::setprecision(5);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    os << std::left << std::setw(16) << fit.parameter_names[k] << std::right << std::setw(14) << theta[k]
       << std::setw(14) << sd[k];
    if (!sdb.empty()) os << std::setw(14) << sdb[k];
    os << "\n";
  }
  return os.str();
}

std::string selection_report_json(const SelectionReport& report) {
  json j;
  j["winner"] = report.winner;
  json ranking = json::array();
  for (auto k : report.ranking) ranking.push_back(report.outcomes[k].candidate.label);
  j["ranking"] = ranking;
  json candidates = json::array();
  for (const auto& out : report.outcomes) {
    json c;
    c["label"] = out.candidate.label;
    c["instantaneous"] = describe(out.candidate.instantaneous);
    c["past"] = out.candidate.past ? json(describe(*out.candidate.past)) : json(nullptr);
    c["edges"] = out.edges;
    c["fit"] = out.fit ? fit_json(*out.fit) : json(nullptr);
    c["error"] = out.error.empty() ? json(nullptr) : json(out.error);
    candidates.push_back(c);
  }
  j["candidates"] = candidates;
  return j.dump(2);
}

void write_selection_csv(const std::filesystem::path& path, const SelectionReport& report) {
  std::vector<std::string> names;
  for (const auto& out : report.outcomes)
    if (out.fit)
      for (const auto& n : out.fit->parameter_names)
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);

  std::vector<int> rank(report.outcomes.size(), 0);
  for (std::size_t r = 0; r < report.ranking.size(); ++r) rank[report.ranking[r]] = static_cast<int>(r) + 1;

  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "label,v_r,v_c,p_r,p_c,edges,rank,log_pl";
  for (const auto& n : names) out << "," << n;
  for (const auto& n : names) out << ",sd_" << n;
  out << ",error\n";
  for (std::size_t k = 0; k < report.outcomes.size(); ++k) {
    const auto& o = report.outcomes[k];
    const auto [vr, vc] = axes(o.candidate.instantaneous);
    out << '"' << o.candidate.label << '"' << ',' << number(vr) << ',' << number(vc) << ',';
    if (o.candidate.past) {
      const auto [pr, pc] = axes(*o.candidate.past);
      out << number(pr) << ',' << number(pc);
    } else {
      out << ',';
    }
    out << ',' << o.edges << ',';
    if (rank[k] > 0) out << rank[k];
    out << ',' << (o.fit ? number(o.fit->pl_value) : "");
    std::vector<std::string> est(names.size()), sds(names.size());
    if (o.fit) {
      const auto theta = o.fit->params.packed();
      const auto sd = o.fit->sd_sandwich();
      for (std::size_t p = 0; p < o.fit->parameter_names.size(); ++p) {
        const auto at = std::find(names.begin(), names.end(), o.fit->parameter_names[p]) - names.begin();
        est[at] = number(theta[p]);
        sds[at] = number(sd[p]);
      }
    }
    for (const auto& e : est) out << ',' << e;
    for (const auto& s : sds) out << ',' << s;
    std::string err = o.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    out << ",\"" << err << "\"\n";
  }
}

}  // namespace autologit
