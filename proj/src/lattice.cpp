#include "autologit/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

#include "autologit/errors.hpp"

namespace autologit {

namespace {

struct Offset {
  int drow;
  int dcol;
};

constexpr double kBoundaryTolerance = 1e-12;

double scaled_square(int steps, double spacing, double semi_axis) {
  if (semi_axis <= 0.0) return steps == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  const double u = steps * spacing / semi_axis;
  return u * u;
}

// Offsets are symmetric under negation, which makes the resulting graph
// symmetric away from the boundary; truncation at the boundary preserves it.
std::vector<Offset> offsets_for(const GridShape& shape, const NeighborhoodSpec& spec) {
  std::vector<Offset> out;
  if (const auto* rect = std::get_if<RectNeighborhood>(&spec)) {
    for (int d = 1; d <= rect->v_along_row; ++d) {
      out.push_back({0, -d});
      out.push_back({0, d});
    }
    for (int d = 1; d <= rect->v_along_col; ++d) {
      out.push_back({-d, 0});
      out.push_back({d, 0});
    }
    return out;
  }
  const auto& ell = std::get<EllipseNeighborhood>(spec);
  const int max_dcol = ell.semi_along_row > 0.0
                           ? static_cast<int>(std::floor(ell.semi_along_row / shape.col_spacing + kBoundaryTolerance))
                           : 0;
  const int max_drow = ell.semi_along_col > 0.0
                           ? static_cast<int>(std::floor(ell.semi_along_col / shape.row_spacing + kBoundaryTolerance))
                           : 0;
  for (int dr = -max_drow; dr <= max_drow; ++dr) {
    for (int dc = -max_dcol; dc <= max_dcol; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const double q = scaled_square(dc, shape.col_spacing, ell.semi_along_row) +
                       scaled_square(dr, shape.row_spacing, ell.semi_along_col);
      if (q <= 1.0 + kBoundaryTolerance) out.push_back({dr, dc});
    }
  }
  return out;
}

}  // namespace

void GridShape::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("grid must have at least one row and one column");
  if (!(row_spacing > 0.0) || !(col_spacing > 0.0)) throw ConfigError("grid spacings must be positive");
  if (size() > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("grid too large");
}

std::string describe(const NeighborhoodSpec& spec) {
  std::ostringstream os;
  if (const auto* rect = std::get_if<RectNeighborhood>(&spec)) {
    os << "rect(" << rect->v_along_row << "," << rect->v_along_col << ")";
  } else {
    const auto& ell = std::get<EllipseNeighborhood>(spec);
    os << "ellipse(" << ell.semi_along_row << "," << ell.semi_along_col << ")";
  }
  return os.str();
}

NeighborhoodSpec parse_neighborhood(const std::string& text) {
  static const std::regex pattern(R"(^\s*(rect|ellipse)\s*\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw ConfigError("cannot parse neighbourhood '" + text + "'");
  try {
    std::size_t used_a = 0, used_b = 0;
    if (m[1] == "rect") {
      const int a = std::stoi(m[2].str(), &used_a);
      const int b = std::stoi(m[3].str(), &used_b);
      if (used_a != m[2].str().size() || used_b != m[3].str().size()) throw std::invalid_argument("rect");
      return RectNeighborhood{a, b};
    }
    const double a = std::stod(m[2].str(), &used_a);
    const double b = std::stod(m[3].str(), &used_b);
    if (used_a != m[2].str().size() || used_b != m[3].str().size()) throw std::invalid_argument("ellipse");
    return EllipseNeighborhood{a, b};
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse neighbourhood '" + text + "'");
  }
}

NeighborGraph::NeighborGraph(GridShape shape, NeighborhoodSpec spec) : shape_(shape), spec_(spec) {
  shape_.validate();
  if (const auto* rect = std::get_if<RectNeighborhood>(&spec_)) {
    if (rect->v_along_row < 0 || rect->v_along_col < 0) throw ConfigError("rect neighbourhood counts must be >= 0");
  } else {
    const auto& ell = std::get<EllipseNeighborhood>(spec_);
    if (!(ell.semi_along_row >= 0.0) || !(ell.semi_along_col >= 0.0))
      throw ConfigError("ellipse semi-axes must be >= 0");
  }

  auto offsets = offsets_for(shape_, spec_);
  // Row-major offset order yields sorted neighbour indices.
  std::sort(offsets.begin(), offsets.end(),
            [](const Offset& a, const Offset& b) { return a.drow != b.drow ? a.drow < b.drow : a.dcol < b.dcol; });

  const std::size_t n = shape_.size();
  offsets_.assign(n + 1, 0);
  indices_.reserve(n * offsets.size());
  for (int r = 0; r < shape_.rows; ++r) {
    for (int c = 0; c < shape_.cols; ++c) {
      for (const auto& o : offsets) {
        const int rr = r + o.drow;
        const int cc = c + o.dcol;
        if (rr < 0 || rr >= shape_.rows || cc < 0 || cc >= shape_.cols) continue;
        indices_.push_back(static_cast<std::uint32_t>(shape_.index(rr, cc)));
      }
      offsets_[shape_.index(r, c) + 1] = indices_.size();
    }
  }
}

std::size_t NeighborGraph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < num_sites(); ++i) best = std::max(best, degree(i));
  return best;
}

NeighborGraph build_neighbor_graph(const GridShape& shape, const NeighborhoodSpec& spec) {
  return NeighborGraph(shape, spec);
}

int neighbor_sum(std::span<const std::uint8_t> slice, const NeighborGraph& graph, std::size_t site) {
  if (slice.size() != graph.num_sites()) throw DataError("slice length does not match the lattice size");
  if (site >= graph.num_sites()) throw DataError("site index " + std::to_string(site) + " out of range");
  int sum = 0;
  for (auto j : graph.neighbors(site)) sum += slice[j];
  return sum;
}

}  // namespace autologit
