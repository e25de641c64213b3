#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carpet/fractal.hpp"

namespace carpet {

/// Geometric adjacency of two distinct same-level cells:
///  - NonemptyIntersection: closed boxes meet (|delta| <= 1 on every axis);
///  - SharedAtLeastEdge: the intersection is at least one-dimensional
///    (|delta| <= 1 on every axis, at most d-1 axes with |delta| = 1);
///  - SharedFace: |delta| = 1 on exactly one axis, 0 elsewhere.
enum class AdjacencyMode { NonemptyIntersection, SharedAtLeastEdge, SharedFace };

const char* to_string(AdjacencyMode mode);
AdjacencyMode adjacency_mode_from_string(std::string_view name);

using VertexId = std::int32_t;

/// Undirected graph with contiguous vertex ids; edges deduplicated, no
/// self-loops. Neighbor rows and the (u < v) edge list are sorted, so equal
/// inputs produce bit-identical graphs.
struct SparseGraph {
  VertexId num_vertices = 0;
  std::vector<std::int64_t> row_ptr;                 // size num_vertices + 1
  std::vector<VertexId> col;                         // sorted per row
  std::vector<std::pair<VertexId, VertexId>> edges;  // u < v, sorted

  static SparseGraph from_edges(VertexId num_vertices,
                                std::vector<std::pair<VertexId, VertexId>> e);

  std::span<const VertexId> neighbors(VertexId v) const {
    return {col.data() + row_ptr[v],
            static_cast<std::size_t>(row_ptr[v + 1] - row_ptr[v])};
  }
  std::size_t edge_count() const { return edges.size(); }
};

/// Adjacency graph over all level-n cells of a fractal.
struct CellGraph {
  FractalSpec spec;
  int level = 0;
  AdjacencyMode mode = AdjacencyMode::NonemptyIntersection;
  CellSet vertices;   // canonical order; vertex id = position
  SparseGraph topology;
};

/// Builds the level-n cell graph under the given adjacency mode. n >= 1.
CellGraph build_graph(const FractalSpec& spec, int level, AdjacencyMode mode,
                      std::size_t budget = kDefaultCellBudget);

/// Gamma(Q): Q plus every same-level fractal cell whose closed box meets Q.
/// Always the NonemptyIntersection predicate, whatever graph.mode is.
CellSet gamma(const CellGraph& graph, const CellIndex& q);

/// The level's cell set minus gamma(Q).
CellSet gamma_complement(const CellGraph& graph, const CellIndex& q);

/// Edge-list text: `<level> <mode>` header, then one `u v` line per edge in
/// canonical vertex ids.
std::string edge_list_text(const CellGraph& graph);

/// Unweighted graph Laplacian (degree minus adjacency) in MatrixMarket
/// coordinate format, lower triangle, 1-based.
std::string laplacian_matrix_market(const SparseGraph& graph);

}  // namespace carpet
