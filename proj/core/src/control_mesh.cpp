#include "shellpath/control_mesh.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace shellpath {

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

ControlMesh::ControlMesh(std::vector<Vec3> vertices, std::vector<Quad> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  build();
}

ControlMesh ControlMesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size())
    throw MeshError("with_vertices: expected " + std::to_string(vertices_.size()) + " positions, got " +
                    std::to_string(vertices.size()));
  ControlMesh m = *this;
  m.vertices_ = std::move(vertices);
  return m;
}

void ControlMesh::build() {
  const int nv = num_vertices();
  const int nf = num_faces();
  if (nf == 0) throw MeshError("mesh has no faces");

  for (int f = 0; f < nf; ++f) {
    const Quad& q = faces_[f];
    for (int k = 0; k < 4; ++k) {
      if (q[k] < 0 || q[k] >= nv)
        throw MeshError("face " + std::to_string(f) + " references missing vertex " + std::to_string(q[k]));
      for (int l = 0; l < k; ++l)
        if (q[l] == q[k])
          throw MeshError("face " + std::to_string(f) + " repeats vertex " + std::to_string(q[k]));
    }
  }

  std::unordered_map<std::uint64_t, int> undirected;
  std::unordered_map<std::uint64_t, int> directed;
  undirected.reserve(4 * nf);
  directed.reserve(4 * nf);
  for (int h = 0; h < 4 * nf; ++h) {
    const int a = origin(h), b = dest(h);
    if (++undirected[edge_key(std::min(a, b), std::max(a, b))] > 2)
      throw MeshError("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") shared by more than two faces");
  }
  for (int h = 0; h < 4 * nf; ++h) {
    auto [it, inserted] = directed.emplace(edge_key(origin(h), dest(h)), h);
    if (!inserted)
      throw MeshError("inconsistent orientation: faces " + std::to_string(it->second >> 2) + " and " +
                      std::to_string(h >> 2) + " traverse edge (" + std::to_string(origin(h)) + ", " +
                      std::to_string(dest(h)) + ") in the same direction");
  }

  twin_.assign(4 * nf, -1);
  halfedge_edge_.assign(4 * nf, -1);
  edge_halfedge_.clear();
  boundary_edges_ = 0;
  for (int h = 0; h < 4 * nf; ++h) {
    auto it = directed.find(edge_key(dest(h), origin(h)));
    if (it != directed.end()) twin_[h] = it->second;
  }
  for (int h = 0; h < 4 * nf; ++h) {
    if (twin_[h] < 0) {
      halfedge_edge_[h] = static_cast<int>(edge_halfedge_.size());
      edge_halfedge_.push_back(h);
      ++boundary_edges_;
    } else if (h < twin_[h]) {
      halfedge_edge_[h] = halfedge_edge_[twin_[h]] = static_cast<int>(edge_halfedge_.size());
      edge_halfedge_.push_back(h);
    }
  }

  valence_.assign(nv, 0);
  boundary_vertex_.assign(nv, 0);
  outgoing_.assign(nv, -1);
  for (int h = 0; h < 4 * nf; ++h) {
    const int v = origin(h);
    ++valence_[v];
    if (twin_[h] < 0) {
      boundary_vertex_[v] = 1;
      boundary_vertex_[dest(h)] = 1;
      if (outgoing_[v] >= 0 && twin_[outgoing_[v]] < 0)
        throw MeshError("non-manifold vertex " + std::to_string(v) + " (two boundary fans)");
      outgoing_[v] = h;
    } else if (outgoing_[v] < 0) {
      outgoing_[v] = h;
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (valence_[v] == 0) throw MeshError("vertex " + std::to_string(v) + " is not referenced by any face");
    int count = 0;
    int h = outgoing_[v];
    do {
      ++count;
      h = twin_[prev(h)];
    } while (h >= 0 && h != outgoing_[v] && count <= valence_[v]);
    if (count != valence_[v])
      throw MeshError("non-manifold vertex " + std::to_string(v) + " (faces do not form a single fan)");
  }
}

void ControlMesh::one_ring(int v, std::vector<int>& edge_nbrs, std::vector<int>& diag_nbrs) const {
  edge_nbrs.clear();
  diag_nbrs.clear();
  int h = outgoing_[v];
  do {
    edge_nbrs.push_back(dest(h));
    diag_nbrs.push_back(dest(next(h)));
    h = twin_[prev(h)];
  } while (h >= 0 && h != outgoing_[v]);
}

Vec3 limit_position(const ControlMesh& mesh, int v) {
  const Vec3& p = mesh.vertex(v);
  if (mesh.is_boundary_vertex(v)) {
    if (mesh.valence(v) == 1) return p;
    int h = mesh.outgoing(v);
    const int right = mesh.dest(h);
    while (mesh.twin(ControlMesh::prev(h)) >= 0) h = mesh.twin(ControlMesh::prev(h));
    const int left = mesh.origin(ControlMesh::prev(h));
    return (mesh.vertex(left) + 4.0 * p + mesh.vertex(right)) / 6.0;
  }
  std::vector<int> e, d;
  mesh.one_ring(v, e, d);
  const double n = static_cast<double>(e.size());
  Vec3 sum = n * n * p;
  for (int i : e) sum += 4.0 * mesh.vertex(i);
  for (int i : d) sum += mesh.vertex(i);
  return sum / (n * (n + 5.0));
}

ControlMesh read_control_mesh(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<Quad> faces;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    auto fail = [&](const std::string& msg) {
      throw MeshError("line " + std::to_string(lineno) + ": " + msg);
    };
    if (tag == "v") {
      Vec3 x;
      if (!(ls >> x[0] >> x[1] >> x[2])) fail("vertex needs three coordinates");
      vertices.push_back(x);
    } else if (tag == "f") {
      std::vector<long> idx;
      std::string tok;
      while (ls >> tok) {
        try {
          std::size_t used = 0;
          idx.push_back(std::stol(tok, &used));
          if (used != tok.size()) fail("bad face index '" + tok + "'");
        } catch (const std::logic_error&) {
          fail("bad face index '" + tok + "'");
        }
      }
      if (idx.size() != 4) fail("face has " + std::to_string(idx.size()) + " vertices; only quads are supported");
      Quad q;
      for (int k = 0; k < 4; ++k) {
        if (idx[k] < 1 || idx[k] > std::numeric_limits<int>::max())
          fail("face index " + std::to_string(idx[k]) + " out of range");
        q[k] = static_cast<int>(idx[k] - 1);
      }
      faces.push_back(q);
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  for (std::size_t f = 0; f < faces.size(); ++f)
    for (int k = 0; k < 4; ++k)
      if (faces[f][k] >= static_cast<int>(vertices.size()))
        throw MeshError("face " + std::to_string(f + 1) + " references vertex " + std::to_string(faces[f][k] + 1) +
                        " but only " + std::to_string(vertices.size()) + " vertices are defined");
  return ControlMesh(std::move(vertices), std::move(faces));
}

ControlMesh load_control_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return read_control_mesh(in);
}

void write_control_mesh(std::ostream& out, const ControlMesh& mesh) {
  out << std::setprecision(17);
  for (const Vec3& x : mesh.vertices()) out << "v " << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  for (const Quad& q : mesh.faces())
    out << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
}

}  // namespace shellpath
