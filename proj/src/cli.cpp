#include "autologit/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "autologit/config.hpp"
#include "autologit/dataset.hpp"
#include "autologit/errors.hpp"
#include "autologit/estimator.hpp"
#include "autologit/report.hpp"
#include "autologit/selector.hpp"
#include "autologit/simstudy.hpp"

namespace autologit {

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<std::string> field;
  std::optional<std::string> covariates;
  std::optional<std::string> preset;
  std::optional<std::string> grid;
  std::optional<int> replicates;
};

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.out) c.out = *o.out;
  if (o.field) c.field = *o.field;
  if (o.covariates) c.covariates = *o.covariates;
  if (o.preset) {
    c.study_preset = *o.preset;
    c.study = study_preset(*o.preset);
  }
  if (o.grid) c.study.rho_grid = named_grid(*o.grid);
  if (o.replicates) c.study.replicates = *o.replicates;
  c.study.sampler = c.sampler;
  c.study.threads = c.threads;
  c.validate();
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

void prepare_output(const RunConfig& c, std::ostream& out) {
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (ec) throw ConfigError("cannot create output directory " + c.out.string() + ": " + ec.message());
  out << "seed " << c.seed << "\n" << run_config_json(c) << "\n";
  write_text(c.out / "run_config.json", run_config_json(c, false));
}

Dataset load_input(const RunConfig& c) {
  if (!c.field) throw ConfigError("no field CSV given (--field or data.field)");
  auto ds = load_dataset(*c.field, c.covariates);
  ds.shape.row_spacing = c.shape.row_spacing;
  ds.shape.col_spacing = c.shape.col_spacing;
  return ds;
}

CovariateSeries fit_covariates(const RunConfig& c, const Dataset& ds) {
  if (!c.past_neighborhood) return ds.x;
  return with_past_neighbor_covariate(ds.x, ds.z, build_neighbor_graph(ds.shape, *c.past_neighborhood));
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  prepare_output(c, out);
  StudyConfig shape_only;
  shape_only.shape = c.shape;
  shape_only.horizon = c.horizon;
  shape_only.covariate = c.covariate;
  const auto x = shape_only.covariates();
  const auto graph = build_neighbor_graph(c.shape, c.neighborhood);
  SamplerStats stats;
  const auto z = simulate_trajectory(c.horizon, x, c.model, graph, c.sampler, RngStream(c.seed), &stats);
  save_field_csv(c.out / "field.csv", c.shape, z);
  if (c.covariate != TemporalCovariate::None) save_covariates_csv(c.out / "covariates.csv", c.shape, x);
  out << "wrote " << (c.out / "field.csv").string() << " (" << c.shape.rows << "x" << c.shape.cols << ", t=0.."
      << c.horizon << ", " << to_string(c.sampler.mode) << ")\n";
  return 0;
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
  const auto ds = load_input(c);
  prepare_output(c, out);
  const auto x = fit_covariates(c, ds);
  const auto graph = build_neighbor_graph(ds.shape, c.neighborhood);
  auto fit = empl_fit(ds.z, x, graph, c.fit);
  if (c.bootstrap_replicates >= 2) {
    BootstrapOptions boot;
    boot.replicates = c.bootstrap_replicates;
    boot.threads = c.threads;
    boot.sampler = c.sampler;
    boot.reuse_initial_slice = c.bootstrap_reuse_initial_slice;
    const auto result = bootstrap_variance(fit, ds.z, x, graph, RngStream(c.seed), boot, c.fit);
    fit.cov_bootstrap = result.covariance;
    fit.bootstrap_replicates = static_cast<int>(result.estimates.size());
    for (const auto& [b, why] : result.failures) out << "bootstrap replicate " << b << " dropped: " << why << "\n";
  }
  std::string label = describe(c.neighborhood);
  if (c.past_neighborhood) label += "|past=" + describe(*c.past_neighborhood);
  write_text(c.out / "fit.json", fit_result_json(fit, label));
  out << fit_result_table(fit, label);
  return 0;
}

int cmd_select(const RunConfig& c, std::ostream& out) {
  const auto ds = load_input(c);
  prepare_output(c, out);
  const auto report = select_by_pl(ds.z, ds.x, ds.shape, c.candidates(), c.fit, c.threads);
  write_selection_csv(c.out / "selection.csv", report);
  write_text(c.out / "selection.json", selection_report_json(report));
  for (const auto& o : report.outcomes)
    if (!o.fit) out << "candidate " << o.candidate.label << " failed: " << o.error << "\n";
  out << "winner " << report.winner << " (log-PL " << report.best().fit->pl_value << ", "
      << report.ranking.size() << " of " << report.outcomes.size() << " candidates fitted)\n";
  return 0;
}

int cmd_study(const RunConfig& c, std::ostream& out) {
  prepare_output(c, out);
  const auto series = replicate_study(c.study, RngStream(c.seed));
  write_study_csv(c.out / "study.csv", series);
  write_band_csv(c.out / "study_bands.csv", series);
  out << "wrote " << series.cells.size() << " cells x " << c.study.horizon + 1 << " time points x "
      << c.study.replicates << " replicates\n";
  return 0;
}

int cmd_surrogate(const RunConfig& c, std::ostream& out) {
  prepare_output(c, out);
  const auto ds = generate_surrogate_vineyard(c.surrogate, RngStream(c.seed));
  save_field_csv(c.out / "field.csv", ds.shape, ds.z);
  write_text(c.out / "provenance.json", ds.provenance_json);
  std::size_t ones = 0;
  for (int t = 0; t <= ds.horizon(); ++t)
    for (auto v : ds.z.slice(t)) ones += v;
  out << "wrote " << (c.out / "field.csv").string() << " (" << ds.shape.rows << "x" << ds.shape.cols << ", "
      << ds.horizon() + 1 << " years, mean prevalence "
      << static_cast<double>(ones) / static_cast<double>(ds.shape.size() * (ds.horizon() + 1)) << ")\n";
  return 0;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Centered spatio-temporal autologistic models: simulation, EMPL fitting and graph selection"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config_path, "JSON run configuration");
  app.add_option("--seed", o.seed, "master seed (u64)");
  app.add_option("--threads", o.threads, "worker threads");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--field", o.field, "field CSV (t,row,col,z)");
  app.add_option("--covariates", o.covariates, "covariate CSV");
  app.add_option("--preset", o.preset, "study preset: model1 | model2 | custom");
  app.add_option("--grid", o.grid, "study grid: trajectory | band");
  app.add_option("--replicates", o.replicates, "study replicates");

  auto* simulate = app.add_subcommand("simulate", "simulate one trajectory");
  auto* fit = app.add_subcommand("fit", "EMPL fit of a dataset");
  auto* select = app.add_subcommand("select", "select a neighbourhood graph by pseudo-likelihood");
  auto* study = app.add_subcommand("study", "replicate study of L_t, C_t, D_t");
  auto* surrogate = app.add_subcommand("surrogate", "generate a vineyard-style surrogate dataset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Config);
  }

  try {
    const RunConfig c = resolve(o);
    if (*simulate) return cmd_simulate(c, out);
    if (*fit) return cmd_fit(c, out);
    if (*select) return cmd_select(c, out);
    if (*study) return cmd_study(c, out);
    if (*surrogate) return cmd_surrogate(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace autologit
