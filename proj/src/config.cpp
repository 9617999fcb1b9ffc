#include "autologit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "autologit/errors.hpp"
#include "json.hpp"

namespace autologit {

using json = nlohmann::ordered_json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be a JSON object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in '" + where + "'");
}

template <class T>
void read(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

// "rect(2,1)" or {"rect": [2, 1]} / {"ellipse": [5, 4]}.
NeighborhoodSpec neighborhood_from_json(const json& j) {
  if (j.is_string()) return parse_neighborhood(j.get<std::string>());
  if (!j.is_object() || j.size() != 1) throw ConfigError("neighbourhood must be a string or a one-key object");
  const auto& [kind, axes] = *j.items().begin();
  if (!axes.is_array() || axes.size() != 2) throw ConfigError("neighbourhood '" + kind + "' needs two axes");
  if (kind == "rect") return RectNeighborhood{axes[0].get<int>(), axes[1].get<int>()};
  if (kind == "ellipse") return EllipseNeighborhood{axes[0].get<double>(), axes[1].get<double>()};
  throw ConfigError("unknown neighbourhood kind '" + kind + "'");
}

std::string covariate_name(TemporalCovariate c) {
  switch (c) {
    case TemporalCovariate::None: return "none";
    case TemporalCovariate::Linear: return "linear";
    case TemporalCovariate::Tent: return "tent";
  }
  return "none";
}

TemporalCovariate parse_covariate(const std::string& name) {
  if (name == "none") return TemporalCovariate::None;
  if (name == "linear") return TemporalCovariate::Linear;
  if (name == "tent") return TemporalCovariate::Tent;
  throw ConfigError("unknown temporal covariate '" + name + "' (none, linear, tent)");
}

std::string rows_name(SpatialRows r) { return r == SpatialRows::Centered ? "centered" : "raw"; }

SpatialRows parse_rows(const std::string& name) {
  if (name == "centered") return SpatialRows::Centered;
  if (name == "raw") return SpatialRows::Raw;
  throw ConfigError("unknown sandwich_rows '" + name + "' (centered, raw)");
}

double initial_p_of(const SamplerConfig& s) {
  if (const auto* b = std::get_if<BernoulliInit>(&s.initial)) return b->p0;
  return 0.0;
}

json sampler_to_json(const SamplerConfig& s) {
  return json{{"mode", to_string(s.mode)},
              {"gibbs_sweeps", s.gibbs_sweeps},
              {"cftp_start_sweeps", s.cftp_start_sweeps},
              {"cftp_max_sweeps", s.cftp_max_sweeps},
              {"pgs_perfect_every_slice", s.pgs_perfect_every_slice},
              {"initial_p", initial_p_of(s)}};
}

void sampler_from_json(const json& j, const std::string& where, SamplerConfig& s) {
  check_keys(j, where,
             {"mode", "gibbs_sweeps", "cftp_start_sweeps", "cftp_max_sweeps", "pgs_perfect_every_slice", "initial_p"});
  if (j.contains("mode")) s.mode = parse_sampler_mode(j.at("mode").get<std::string>());
  read(j, "gibbs_sweeps", s.gibbs_sweeps);
  read(j, "cftp_start_sweeps", s.cftp_start_sweeps);
  read(j, "cftp_max_sweeps", s.cftp_max_sweeps);
  read(j, "pgs_perfect_every_slice", s.pgs_perfect_every_slice);
  if (j.contains("initial_p")) s.initial = BernoulliInit{j.at("initial_p").get<double>()};
}

json grid_to_json(const std::vector<std::pair<double, double>>& grid) {
  json out = json::array();
  for (const auto& [a, b] : grid) out.push_back({a, b});
  return out;
}

void apply_json(const json& root, RunConfig& c) {
  check_keys(root, "config",
             {"seed", "threads", "out", "data", "lattice", "model", "sampler", "estimation", "selection", "study",
              "surrogate"});
  read(root, "seed", c.seed);
  read(root, "threads", c.threads);
  if (root.contains("out")) c.out = root.at("out").get<std::string>();

  if (root.contains("data")) {
    const auto& d = root.at("data");
    check_keys(d, "data", {"field", "covariates"});
    if (d.contains("field") && !d.at("field").is_null()) c.field = d.at("field").get<std::string>();
    if (d.contains("covariates") && !d.at("covariates").is_null())
      c.covariates = d.at("covariates").get<std::string>();
  }

  if (root.contains("lattice")) {
    const auto& l = root.at("lattice");
    check_keys(l, "lattice", {"rows", "cols", "row_spacing", "col_spacing", "neighborhood", "past_neighborhood"});
    read(l, "rows", c.shape.rows);
    read(l, "cols", c.shape.cols);
    read(l, "row_spacing", c.shape.row_spacing);
    read(l, "col_spacing", c.shape.col_spacing);
    if (l.contains("neighborhood")) c.neighborhood = neighborhood_from_json(l.at("neighborhood"));
    if (l.contains("past_neighborhood")) {
      if (l.at("past_neighborhood").is_null())
        c.past_neighborhood.reset();
      else
        c.past_neighborhood = neighborhood_from_json(l.at("past_neighborhood"));
    }
  }

  if (root.contains("model")) {
    const auto& m = root.at("model");
    check_keys(m, "model", {"variant", "beta", "rho1", "rho2", "horizon", "covariate"});
    if (m.contains("variant")) c.model.variant = parse_variant(m.at("variant").get<std::string>());
    read(m, "beta", c.model.beta);
    read(m, "rho1", c.model.rho1);
    read(m, "rho2", c.model.rho2);
    read(m, "horizon", c.horizon);
    if (m.contains("covariate")) c.covariate = parse_covariate(m.at("covariate").get<std::string>());
  }

  if (root.contains("sampler")) sampler_from_json(root.at("sampler"), "sampler", c.sampler);

  if (root.contains("estimation")) {
    const auto& e = root.at("estimation");
    check_keys(e, "estimation",
               {"variant", "fix_rho1_zero", "initial_rho1", "max_em_iterations", "em_tolerance", "max_qn_iterations",
                "gradient_tolerance", "sandwich_rows", "bootstrap_replicates", "bootstrap_reuse_initial_slice"});
    if (e.contains("variant")) c.fit.variant = parse_variant(e.at("variant").get<std::string>());
    read(e, "fix_rho1_zero", c.fit.fix_rho1_zero);
    read(e, "initial_rho1", c.fit.initial_rho1);
    read(e, "max_em_iterations", c.fit.max_em_iterations);
    read(e, "em_tolerance", c.fit.em_tolerance);
    read(e, "max_qn_iterations", c.fit.max_qn_iterations);
    read(e, "gradient_tolerance", c.fit.gradient_tolerance);
    if (e.contains("sandwich_rows")) c.fit.sandwich_rows = parse_rows(e.at("sandwich_rows").get<std::string>());
    read(e, "bootstrap_replicates", c.bootstrap_replicates);
    read(e, "bootstrap_reuse_initial_slice", c.bootstrap_reuse_initial_slice);
  }

  if (root.contains("selection")) {
    const auto& s = root.at("selection");
    check_keys(s, "selection", {"family", "row", "col", "only_col_le_row", "past_row", "past_col"});
    read(s, "family", c.candidate_family);
    read(s, "row", c.cand_row);
    read(s, "col", c.cand_col);
    read(s, "only_col_le_row", c.only_col_le_row);
    read(s, "past_row", c.cand_past_row);
    read(s, "past_col", c.cand_past_col);
  }

  if (root.contains("study")) {
    const auto& s = root.at("study");
    check_keys(s, "study",
               {"preset", "grid", "replicates", "horizon", "variants", "rows", "cols", "neighborhood", "beta",
                "covariate", "initial_p"});
    if (s.contains("preset")) {
      c.study_preset = s.at("preset").get<std::string>();
      c.study = study_preset(c.study_preset);
    }
    if (s.contains("grid")) {
      const auto& g = s.at("grid");
      if (g.is_string()) {
        c.study.rho_grid = named_grid(g.get<std::string>());
      } else {
        c.study.rho_grid.clear();
        for (const auto& cell : g) {
          if (!cell.is_array() || cell.size() != 2) throw ConfigError("study grid cells must be [rho1, rho2] pairs");
          c.study.rho_grid.emplace_back(cell[0].get<double>(), cell[1].get<double>());
        }
      }
    }
    read(s, "replicates", c.study.replicates);
    read(s, "horizon", c.study.horizon);
    if (s.contains("variants")) {
      c.study.variants.clear();
      for (const auto& v : s.at("variants")) c.study.variants.push_back(parse_variant(v.get<std::string>()));
    }
    read(s, "rows", c.study.shape.rows);
    read(s, "cols", c.study.shape.cols);
    if (s.contains("neighborhood")) c.study.neighborhood = neighborhood_from_json(s.at("neighborhood"));
    read(s, "beta", c.study.beta);
    if (s.contains("covariate")) c.study.covariate = parse_covariate(s.at("covariate").get<std::string>());
    read(s, "initial_p", c.study.initial_p);
  }

  if (root.contains("surrogate")) {
    const auto& s = root.at("surrogate");
    check_keys(s, "surrogate",
               {"rows", "cols", "row_spacing", "col_spacing", "years", "beta0", "beta_past", "rho1", "rho2",
                "instantaneous", "past", "initial_p", "sampler"});
    read(s, "rows", c.surrogate.shape.rows);
    read(s, "cols", c.surrogate.shape.cols);
    read(s, "row_spacing", c.surrogate.shape.row_spacing);
    read(s, "col_spacing", c.surrogate.shape.col_spacing);
    read(s, "years", c.surrogate.years);
    read(s, "beta0", c.surrogate.beta0);
    read(s, "beta_past", c.surrogate.beta_past);
    read(s, "rho1", c.surrogate.rho1);
    read(s, "rho2", c.surrogate.rho2);
    if (s.contains("instantaneous"))
      c.surrogate.instantaneous = neighborhood_from_json(s.at("instantaneous"));
    if (s.contains("past")) c.surrogate.past = neighborhood_from_json(s.at("past"));
    read(s, "initial_p", c.surrogate.initial_p);
    if (s.contains("sampler")) sampler_from_json(s.at("sampler"), "surrogate.sampler", c.surrogate.sampler);
  }
}

}  // namespace

RunConfig::RunConfig() {
  model.beta = {-1.4};
  model.rho1 = 0.5;
  model.rho2 = 0.5;
  model.variant = CenteringVariant::NewCentered;
}

void RunConfig::validate() const {
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  shape.validate();
  model.validate();
  sampler.validate();
  const std::size_t expected_beta = covariate == TemporalCovariate::None ? 1 : 2;
  if (model.beta.size() != expected_beta)
    throw ConfigError("model.beta has " + std::to_string(model.beta.size()) + " entries, covariate '" +
                      covariate_name(covariate) + "' needs " + std::to_string(expected_beta));
  if (bootstrap_replicates < 0 || bootstrap_replicates == 1)
    throw ConfigError("bootstrap_replicates must be 0 (off) or >= 2");
  if (fit.max_em_iterations < 1 || fit.max_qn_iterations < 1) throw ConfigError("iteration caps must be >= 1");
  if (!(fit.em_tolerance > 0.0) || !(fit.gradient_tolerance > 0.0)) throw ConfigError("tolerances must be > 0");
  if (candidate_family != "rect" && candidate_family != "ellipse")
    throw ConfigError("selection.family must be 'rect' or 'ellipse'");
  if (cand_past_row.empty() != cand_past_col.empty())
    throw ConfigError("selection.past_row and selection.past_col must both be set or both be empty");
  if (candidate_family == "rect" && !cand_past_row.empty())
    throw ConfigError("past neighbourhoods are only enumerated for the ellipse family");
  study.validate();
  surrogate.sampler.validate();
  surrogate.truth().validate();
  if (surrogate.years < 2) throw ConfigError("surrogate needs at least two years");
}

CandidateSet RunConfig::candidates() const {
  if (candidate_family == "rect") {
    std::vector<int> rows, cols;
    for (double v : cand_row) {
      if (v != static_cast<int>(v)) throw ConfigError("rect candidate ranges must be integers");
      rows.push_back(static_cast<int>(v));
    }
    for (double v : cand_col) {
      if (v != static_cast<int>(v)) throw ConfigError("rect candidate ranges must be integers");
      cols.push_back(static_cast<int>(v));
    }
    return enumerate_rect_candidates(rows, cols, only_col_le_row);
  }
  return enumerate_ellipse_candidates(cand_row, cand_col, cand_past_row, cand_past_col);
}

StudyConfig study_preset(const std::string& name) {
  if (name == "model1") return model1_study();
  if (name == "model2") return model2_study();
  if (name == "custom") {
    StudyConfig c = model1_study();
    c.model_id = "custom";
    return c;
  }
  throw ConfigError("unknown study preset '" + name + "' (model1, model2, custom)");
}

std::vector<std::pair<double, double>> named_grid(const std::string& name) {
  if (name == "trajectory") return trajectory_grid();
  if (name == "band") return band_grid();
  throw ConfigError("unknown grid '" + name + "' (trajectory, band)");
}

RunConfig parse_run_config(const std::string& json_text) {
  RunConfig c;
  try {
    apply_json(json::parse(json_text), c);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string run_config_json(const RunConfig& c, bool include_threads) {
  json root;
  root["seed"] = c.seed;
  if (include_threads) root["threads"] = c.threads;
  root["out"] = c.out.string();
  root["data"] = {{"field", c.field ? json(c.field->string()) : json(nullptr)},
                  {"covariates", c.covariates ? json(c.covariates->string()) : json(nullptr)}};
  root["lattice"] = {{"rows", c.shape.rows},
                     {"cols", c.shape.cols},
                     {"row_spacing", c.shape.row_spacing},
                     {"col_spacing", c.shape.col_spacing},
                     {"neighborhood", describe(c.neighborhood)},
                     {"past_neighborhood", c.past_neighborhood ? json(describe(*c.past_neighborhood)) : json(nullptr)}};
  root["model"] = {{"variant", to_string(c.model.variant)}, {"beta", c.model.beta},       {"rho1", c.model.rho1},
                   {"rho2", c.model.rho2},                  {"horizon", c.horizon},       {"covariate", covariate_name(c.covariate)}};
  root["sampler"] = sampler_to_json(c.sampler);
  root["estimation"] = {{"variant", to_string(c.fit.variant)},
                        {"fix_rho1_zero", c.fit.fix_rho1_zero},
                        {"initial_rho1", c.fit.initial_rho1},
                        {"max_em_iterations", c.fit.max_em_iterations},
                        {"em_tolerance", c.fit.em_tolerance},
                        {"max_qn_iterations", c.fit.max_qn_iterations},
                        {"gradient_tolerance", c.fit.gradient_tolerance},
                        {"sandwich_rows", rows_name(c.fit.sandwich_rows)},
                        {"bootstrap_replicates", c.bootstrap_replicates},
                        {"bootstrap_reuse_initial_slice", c.bootstrap_reuse_initial_slice}};
  root["selection"] = {{"family", c.candidate_family}, {"row", c.cand_row},           {"col", c.cand_col},
                       {"only_col_le_row", c.only_col_le_row}, {"past_row", c.cand_past_row}, {"past_col", c.cand_past_col}};
  json variants = json::array();
  for (auto v : c.study.variants) variants.push_back(to_string(v));
  root["study"] = {{"preset", c.study_preset},
                   {"grid", grid_to_json(c.study.rho_grid)},
                   {"replicates", c.study.replicates},
                   {"horizon", c.study.horizon},
                   {"variants", variants},
                   {"rows", c.study.shape.rows},
                   {"cols", c.study.shape.cols},
                   {"neighborhood", describe(c.study.neighborhood)},
                   {"beta", c.study.beta},
                   {"covariate", covariate_name(c.study.covariate)},
                   {"initial_p", c.study.initial_p}};
  root["surrogate"] = {{"rows", c.surrogate.shape.rows},
                       {"cols", c.surrogate.shape.cols},
                       {"row_spacing", c.surrogate.shape.row_spacing},
                       {"col_spacing", c.surrogate.shape.col_spacing},
                       {"years", c.surrogate.years},
                       {"beta0", c.surrogate.beta0},
                       {"beta_past", c.surrogate.beta_past},
                       {"rho1", c.surrogate.rho1},
                       {"rho2", c.surrogate.rho2},
                       {"instantaneous", describe(c.surrogate.instantaneous)},
                       {"past", describe(c.surrogate.past)},
                       {"initial_p", c.surrogate.initial_p},
                       {"sampler", sampler_to_json(c.surrogate.sampler)}};
  return root.dump(2);
}

}  // namespace autologit
