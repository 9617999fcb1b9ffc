#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace autologit {

// Regular rows x cols lattice; sites are numbered row-major, index = row * cols + col.
struct GridShape {
  int rows = 1;
  int cols = 1;
  double row_spacing = 1.0;  // distance between adjacent rows
  double col_spacing = 1.0;  // distance between adjacent columns (along a row)

  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(col);
  }
  int row_of(std::size_t site) const { return static_cast<int>(site / static_cast<std::size_t>(cols)); }
  int col_of(std::size_t site) const { return static_cast<int>(site % static_cast<std::size_t>(cols)); }

  void validate() const;
  bool operator==(const GridShape&) const = default;
};

// v_along_row neighbours on each side within the same row, v_along_col on
// each side within the same column. Never includes diagonals.
struct RectNeighborhood {
  int v_along_row = 0;
  int v_along_col = 0;
  bool operator==(const RectNeighborhood&) const = default;
};

// Every site strictly inside or on the ellipse with semi-axis
// semi_along_row (measured along the row, i.e. across columns) and
// semi_along_col (measured along the column, i.e. across rows).
struct EllipseNeighborhood {
  double semi_along_row = 0.0;
  double semi_along_col = 0.0;
  bool operator==(const EllipseNeighborhood&) const = default;
};

using NeighborhoodSpec = std::variant<RectNeighborhood, EllipseNeighborhood>;

std::string describe(const NeighborhoodSpec& spec);
// Inverse of describe: "rect(2,1)" or "ellipse(5,4)".
NeighborhoodSpec parse_neighborhood(const std::string& text);

// Symmetric adjacency stored in compressed row form. Neighbour lists are
// sorted ascending (row-major order). Immutable after construction.
class NeighborGraph {
 public:
  NeighborGraph() = default;
  NeighborGraph(GridShape shape, NeighborhoodSpec spec);

  const GridShape& shape() const { return shape_; }
  const NeighborhoodSpec& spec() const { return spec_; }
  std::size_t num_sites() const { return shape_.size(); }

  std::span<const std::uint32_t> neighbors(std::size_t site) const {
    return {indices_.data() + offsets_[site], indices_.data() + offsets_[site + 1]};
  }
  std::size_t degree(std::size_t site) const { return offsets_[site + 1] - offsets_[site]; }
  std::size_t max_degree() const;
  // Number of undirected edges.
  std::size_t num_edges() const { return indices_.size() / 2; }
  bool empty() const { return indices_.empty(); }

 private:
  GridShape shape_;
  NeighborhoodSpec spec_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> indices_;
};

NeighborGraph build_neighbor_graph(const GridShape& shape, const NeighborhoodSpec& spec);

// Number of neighbours of `site` whose value is 1. Throws DataError when the
// site is out of range or the slice length does not match the graph.
int neighbor_sum(std::span<const std::uint8_t> slice, const NeighborGraph& graph, std::size_t site);

}  // namespace autologit
