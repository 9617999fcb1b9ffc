#include "autologit/dataset.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include "json.hpp"
#include <sstream>

#include "autologit/errors.hpp"

namespace autologit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no) + ": ";
}

long parse_int(const std::string& s, const std::filesystem::path& path, std::size_t line_no, const char* what) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw DataError(where(path, line_no) + "invalid " + what + " '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw DataError(where(path, line_no) + "invalid number '" + s + "'");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

struct FieldRecord {
  long t, row, col;
  int z;
  std::size_t line;
};

}  // namespace

Dataset load_dataset(const std::filesystem::path& field_path,
                     const std::optional<std::filesystem::path>& covariate_path) {
  auto in = open_input(field_path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(field_path.string() + ": empty file");
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"t", "row", "col", "z"})
    throw DataError(where(field_path, 1) + "expected header t,row,col,z");

  std::vector<FieldRecord> records;
  long max_t = -1, max_row = -1, max_col = -1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw DataError(where(field_path, line_no) + "expected 4 columns");
    FieldRecord r{parse_int(cells[0], field_path, line_no, "t"), parse_int(cells[1], field_path, line_no, "row"),
                  parse_int(cells[2], field_path, line_no, "col"), 0, line_no};
    const long zv = parse_int(cells[3], field_path, line_no, "z");
    if (r.t < 0 || r.row < 0 || r.col < 0)
      throw DataError(where(field_path, line_no) + "negative index");
    if (zv != 0 && zv != 1)
      throw DataError(where(field_path, line_no) + "non-binary z=" + cells[3] + " at (t=" + cells[0] +
                      ",row=" + cells[1] + ",col=" + cells[2] + ")");
    r.z = static_cast<int>(zv);
    max_t = std::max(max_t, r.t);
    max_row = std::max(max_row, r.row);
    max_col = std::max(max_col, r.col);
    records.push_back(r);
  }
  if (records.empty()) throw DataError(field_path.string() + ": no data rows");

  Dataset ds;
  ds.shape.rows = static_cast<int>(max_row + 1);
  ds.shape.cols = static_cast<int>(max_col + 1);
  ds.shape.validate();
  const std::size_t n = ds.shape.size();
  const int horizon = static_cast<int>(max_t);
  ds.z = BinaryFieldSeries(n, horizon);
  std::vector<std::size_t> seen(n * static_cast<std::size_t>(horizon + 1), 0);
  for (const auto& r : records) {
    const std::size_t site = ds.shape.index(static_cast<int>(r.row), static_cast<int>(r.col));
    const std::size_t cell = static_cast<std::size_t>(r.t) * n + site;
    if (seen[cell])
      throw DataError(where(field_path, r.line) + "duplicate cell (t=" + std::to_string(r.t) + ",row=" +
                      std::to_string(r.row) + ",col=" + std::to_string(r.col) + "), first seen on line " +
                      std::to_string(seen[cell]));
    seen[cell] = r.line;
    ds.z.set(site, static_cast<int>(r.t), static_cast<std::uint8_t>(r.z));
  }
  for (std::size_t cell = 0; cell < seen.size(); ++cell) {
    if (!seen[cell]) {
      const std::size_t site = cell % n;
      throw DataError(field_path.string() + ": missing cell (t=" + std::to_string(cell / n) + ",row=" +
                      std::to_string(ds.shape.row_of(site)) + ",col=" + std::to_string(ds.shape.col_of(site)) + ")");
    }
  }

  if (!covariate_path) {
    ds.x = CovariateSeries::none(n, horizon);
    return ds;
  }

  auto cin = open_input(*covariate_path);
  if (!std::getline(cin, line)) throw DataError(covariate_path->string() + ": empty file");
  const auto cov_header = split_csv_line(line);
  if (cov_header.empty() || cov_header[0] != "t") throw DataError(where(*covariate_path, 1) + "first column must be t");
  const bool spatial = cov_header.size() >= 3 && cov_header[1] == "row" && cov_header[2] == "col";
  const std::size_t first = spatial ? 3 : 1;
  std::vector<std::string> names(cov_header.begin() + static_cast<std::ptrdiff_t>(first), cov_header.end());
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b)
      if (names[a] == names[b]) throw DataError(where(*covariate_path, 1) + "duplicate covariate name " + names[a]);
  ds.x = CovariateSeries(n, horizon, names.size(), names);
  const std::size_t units = spatial ? n * static_cast<std::size_t>(horizon + 1) : static_cast<std::size_t>(horizon + 1);
  std::vector<std::size_t> cov_seen(units, 0);
  line_no = 1;
  while (std::getline(cin, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != cov_header.size())
      throw DataError(where(*covariate_path, line_no) + "expected " + std::to_string(cov_header.size()) + " columns");
    const long t = parse_int(cells[0], *covariate_path, line_no, "t");
    if (t < 0 || t > horizon)
      throw DataError(where(*covariate_path, line_no) + "t=" + cells[0] + " outside the field horizon 0.." +
                      std::to_string(horizon));
    std::vector<double> values;
    for (std::size_t k = first; k < cells.size(); ++k) values.push_back(parse_double(cells[k], *covariate_path, line_no));
    if (spatial) {
      const long row = parse_int(cells[1], *covariate_path, line_no, "row");
      const long col = parse_int(cells[2], *covariate_path, line_no, "col");
      if (row < 0 || row >= ds.shape.rows || col < 0 || col >= ds.shape.cols)
        throw DataError(where(*covariate_path, line_no) + "cell outside the field grid");
      const std::size_t site = ds.shape.index(static_cast<int>(row), static_cast<int>(col));
      const std::size_t unit = static_cast<std::size_t>(t) * n + site;
      if (cov_seen[unit]) throw DataError(where(*covariate_path, line_no) + "duplicate covariate cell");
      cov_seen[unit] = line_no;
      std::copy(values.begin(), values.end(), ds.x.at(site, static_cast<int>(t)).begin());
    } else {
      if (cov_seen[static_cast<std::size_t>(t)]) throw DataError(where(*covariate_path, line_no) + "duplicate time point");
      cov_seen[static_cast<std::size_t>(t)] = line_no;
      for (std::size_t i = 0; i < n; ++i) std::copy(values.begin(), values.end(), ds.x.at(i, static_cast<int>(t)).begin());
    }
  }
  for (std::size_t u = 0; u < units; ++u)
    if (!cov_seen[u])
      throw DataError(covariate_path->string() + ": missing covariates for " +
                      (spatial ? "(t=" + std::to_string(u / n) + ",row=" + std::to_string(ds.shape.row_of(u % n)) +
                                     ",col=" + std::to_string(ds.shape.col_of(u % n)) + ")"
                               : "t=" + std::to_string(u)));
  return ds;
}

void save_field_csv(const std::filesystem::path& path, const GridShape& shape, const BinaryFieldSeries& z) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "t,row,col,z\n";
  for (int t = 0; t <= z.horizon(); ++t)
    for (int r = 0; r < shape.rows; ++r)
      for (int c = 0; c < shape.cols; ++c) out << t << ',' << r << ',' << c << ',' << int(z.at(shape.index(r, c), t)) << '\n';
}

void save_covariates_csv(const std::filesystem::path& path, const GridShape& shape, const CovariateSeries& x) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const bool constant = x.spatially_constant();
  out << (constant ? "t" : "t,row,col");
  for (const auto& name : x.names()) out << ',' << name;
  out << '\n';
  for (int t = 0; t <= x.horizon(); ++t) {
    if (constant) {
      out << t;
      for (double v : x.at(0, t)) out << ',' << format_double(v);
      out << '\n';
      continue;
    }
    for (int r = 0; r < shape.rows; ++r)
      for (int c = 0; c < shape.cols; ++c) {
        out << t << ',' << r << ',' << c;
        for (double v : x.at(shape.index(r, c), t)) out << ',' << format_double(v);
        out << '\n';
      }
  }
}

std::vector<double> build_past_neighbor_covariate(const BinaryFieldSeries& z, const NeighborGraph& past_graph) {
  const std::size_t n = z.num_sites();
  if (past_graph.num_sites() != n) throw DataError("past graph does not match the field");
  std::vector<double> column(n * static_cast<std::size_t>(z.horizon() + 1), 0.0);
  for (int t = 1; t <= z.horizon(); ++t) {
    const auto prev = z.slice(t - 1);
    for (std::size_t i = 0; i < n; ++i) {
      int sum = 0;
      for (auto j : past_graph.neighbors(i)) sum += prev[j];
      column[static_cast<std::size_t>(t) * n + i] = sum;
    }
  }
  return column;
}

CovariateSeries with_past_neighbor_covariate(const CovariateSeries& x, const BinaryFieldSeries& z,
                                             const NeighborGraph& past_graph) {
  CovariateSeries out = x;
  out.append_column(kPastNeighborsColumn, build_past_neighbor_covariate(z, past_graph));
  return out;
}

SurrogateConfig::SurrogateConfig() {
  sampler.mode = SamplerMode::PlainGibbs;
  sampler.gibbs_sweeps = 10;
}

ModelParams SurrogateConfig::truth() const {
  ModelParams p;
  p.beta = {beta0, beta_past};
  p.rho1 = rho1;
  p.rho2 = rho2;
  p.variant = CenteringVariant::NewCentered;
  return p;
}

Dataset generate_surrogate_vineyard(const SurrogateConfig& config, const RngStream& rng) {
  if (config.years < 2) throw ConfigError("surrogate needs at least two years");
  config.sampler.validate();
  const auto inst = build_neighbor_graph(config.shape, config.instantaneous);
  const auto past = build_neighbor_graph(config.shape, config.past);
  const std::size_t n = config.shape.size();
  const int horizon = config.years - 1;
  const ModelParams truth = config.truth();

  Dataset ds;
  ds.shape = config.shape;
  ds.z = BinaryFieldSeries(n, horizon);
  ds.x = CovariateSeries(n, horizon, 1, {kPastNeighborsColumn});
  {
    RngStream init = rng.split(0);
    const auto s0 = init_bernoulli(config.shape, config.initial_p, init);
    std::copy(s0.begin(), s0.end(), ds.z.slice(0).begin());
  }
  SamplerStats stats;
  for (int t = 1; t <= horizon; ++t) {
    const auto prev = ds.z.slice(t - 1);
    for (std::size_t i = 0; i < n; ++i) {
      int sum = 0;
      for (auto j : past.neighbors(i)) sum += prev[j];
      ds.x.at(i, t)[0] = sum;
    }
    const auto next = draw_slice(prev, ds.x, t, truth, inst, config.sampler, rng.split(static_cast<std::uint64_t>(t)),
                                 &stats);
    std::copy(next.begin(), next.end(), ds.z.slice(t).begin());
  }

  nlohmann::json prov;
  prov["generator"] = "surrogate-vineyard";
  prov["rows"] = config.shape.rows;
  prov["cols"] = config.shape.cols;
  prov["years"] = config.years;
  prov["truth"] = {{"beta0", config.beta0}, {"beta_past", config.beta_past}, {"rho1", config.rho1}, {"rho2", config.rho2}};
  prov["instantaneous"] = describe(config.instantaneous);
  prov["past"] = describe(config.past);
  prov["initial_p"] = config.initial_p;
  prov["sampler"] = to_string(config.sampler.mode);
  prov["gibbs_sweeps"] = config.sampler.gibbs_sweeps;
  prov["rng_key"] = rng.key();
  ds.provenance_json = prov.dump();
  return ds;
}

}  // namespace autologit
