#include "carpet/cell_graph.hpp"

#include <algorithm>
#include <sstream>

namespace carpet {

const char* to_string(AdjacencyMode mode) {
  switch (mode) {
    case AdjacencyMode::NonemptyIntersection: return "intersection";
    case AdjacencyMode::SharedAtLeastEdge: return "edge";
    case AdjacencyMode::SharedFace: return "face";
  }
  return "?";
}

AdjacencyMode adjacency_mode_from_string(std::string_view name) {
  if (name == "intersection") return AdjacencyMode::NonemptyIntersection;
  if (name == "edge") return AdjacencyMode::SharedAtLeastEdge;
  if (name == "face") return AdjacencyMode::SharedFace;
  throw std::invalid_argument("unknown adjacency mode: " + std::string(name));
}

SparseGraph SparseGraph::from_edges(
    VertexId num_vertices, std::vector<std::pair<VertexId, VertexId>> e) {
  for (auto& [u, v] : e) {
    if (u == v) throw std::invalid_argument("self-loop edge");
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
      throw std::invalid_argument("edge endpoint out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());

  SparseGraph g;
  g.num_vertices = num_vertices;
  g.edges = std::move(e);
  g.row_ptr.assign(static_cast<std::size_t>(num_vertices) + 1, 0);
  for (auto [u, v] : g.edges) {
    ++g.row_ptr[u + 1];
    ++g.row_ptr[v + 1];
  }
  for (std::size_t i = 1; i < g.row_ptr.size(); ++i)
    g.row_ptr[i] += g.row_ptr[i - 1];
  g.col.resize(g.edges.size() * 2);
  std::vector<std::int64_t> cursor(g.row_ptr.begin(), g.row_ptr.end() - 1);
  for (auto [u, v] : g.edges) {
    g.col[cursor[u]++] = v;
    g.col[cursor[v]++] = u;
  }
  for (VertexId v = 0; v < num_vertices; ++v)
    std::sort(g.col.begin() + g.row_ptr[v], g.col.begin() + g.row_ptr[v + 1]);
  return g;
}

namespace {

// Nonzero offset tuples in {-1,0,1}^d admitted by the mode.
std::vector<std::vector<int>> mode_offsets(int d, AdjacencyMode mode) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(d, -1);
  for (;;) {
    int nonzero = 0;
    for (int c : t) nonzero += (c != 0);
    bool keep = nonzero > 0;
    switch (mode) {
      case AdjacencyMode::NonemptyIntersection: break;
      case AdjacencyMode::SharedAtLeastEdge: keep = keep && nonzero <= d - 1; break;
      case AdjacencyMode::SharedFace: keep = keep && nonzero == 1; break;
    }
    if (keep) out.push_back(t);
    int ax = d - 1;
    while (ax >= 0 && t[ax] == 1) t[ax--] = -1;
    if (ax < 0) break;
    ++t[ax];
  }
  return out;
}

}  // namespace

CellGraph build_graph(const FractalSpec& spec, int level, AdjacencyMode mode,
                      std::size_t budget) {
  if (level < 1) throw std::invalid_argument("graph level must be >= 1");
  CellGraph graph{spec, level, mode, cells_at_level(spec, level, budget), {}};

  const int d = spec.dimension();
  const auto offsets = mode_offsets(d, mode);
  const Index hi = pow5(level);
  const auto& cells = graph.vertices;

  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<Index> probe(d);
  for (std::size_t v = 0; v < cells.size(); ++v) {
    auto q = cells.coords(v);
    for (const auto& off : offsets) {
      bool in_range = true;
      for (int ax = 0; ax < d; ++ax) {
        probe[ax] = q[ax] + off[ax];
        in_range = in_range && probe[ax] >= 1 && probe[ax] <= hi;
      }
      if (!in_range) continue;
      if (auto u = cells.find(probe); u && *u > v)
        edges.emplace_back(static_cast<VertexId>(v), static_cast<VertexId>(*u));
    }
  }
  graph.topology =
      SparseGraph::from_edges(static_cast<VertexId>(cells.size()), std::move(edges));
  return graph;
}

CellSet gamma(const CellGraph& graph, const CellIndex& q) {
  const int d = graph.spec.dimension();
  if (q.level != graph.level ||
      static_cast<int>(q.coords.size()) != d ||
      !graph.vertices.contains(q.coords))
    throw std::invalid_argument("cell is not a vertex of the graph");

  const Index hi = pow5(graph.level);
  std::vector<Index> flat(q.coords.begin(), q.coords.end());
  std::vector<Index> probe(d);
  for (const auto& off :
       mode_offsets(d, AdjacencyMode::NonemptyIntersection)) {
    bool in_range = true;
    for (int ax = 0; ax < d; ++ax) {
      probe[ax] = q.coords[ax] + off[ax];
      in_range = in_range && probe[ax] >= 1 && probe[ax] <= hi;
    }
    if (in_range && graph.vertices.contains(probe))
      flat.insert(flat.end(), probe.begin(), probe.end());
  }
  return CellSet::from_cells(d, graph.level, std::move(flat));
}

CellSet gamma_complement(const CellGraph& graph, const CellIndex& q) {
  const CellSet g = gamma(graph, q);
  const int d = graph.spec.dimension();
  std::vector<Index> flat;
  flat.reserve(graph.vertices.flat().size() - g.flat().size());
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    auto c = graph.vertices.coords(i);
    if (!g.contains(c)) flat.insert(flat.end(), c.begin(), c.end());
  }
  return CellSet::from_cells(d, graph.level, std::move(flat));
}

std::string edge_list_text(const CellGraph& graph) {
  std::ostringstream os;
  os << graph.level << ' ' << to_string(graph.mode) << '\n';
  for (auto [u, v] : graph.topology.edges) os << u << ' ' << v << '\n';
  return os.str();
}

std::string laplacian_matrix_market(const SparseGraph& graph) {
  std::ostringstream os;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  const std::size_t nnz =
      static_cast<std::size_t>(graph.num_vertices) + graph.edge_count();
  os << graph.num_vertices << ' ' << graph.num_vertices << ' ' << nnz << '\n';
  // Lower triangle, row-major: diagonal holds the degree, off-diagonal -1.
  for (VertexId v = 0; v < graph.num_vertices; ++v) {
    for (VertexId u : graph.neighbors(v))
      if (u < v) os << v + 1 << ' ' << u + 1 << " -1\n";
    os << v + 1 << ' ' << v + 1 << ' '
       << graph.row_ptr[v + 1] - graph.row_ptr[v] << '\n';
  }
  return os.str();
}

}  // namespace carpet
