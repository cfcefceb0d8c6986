#include "core/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace eigenobs {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr long kVertexBudget = 2'000'000;

void check_valid_tris(const Mesh& m, const char* where) {
  for (int t = 0; t < m.triangle_count(); ++t)
    if (!(m.triangle_area(t) > 0.0))
      fail(ErrorKind::Numeric,
           std::string("degenerate triangle after ") + where);
}

// hexagonal ring mesh with n rings; ring k holds 6k vertices placed by the
// callback (k, j) -> point, ordered counterclockwise
template <typename RingPoint>
Mesh ring_mesh(int n, RingPoint&& point) {
  Mesh m;
  auto base = [](int k) { return k == 0 ? 0 : 1 + 3 * k * (k - 1); };
  m.verts.reserve(base(n + 1));
  m.verts.push_back(point(0, 0));
  for (int k = 1; k <= n; ++k)
    for (int j = 0; j < 6 * k; ++j) m.verts.push_back(point(k, j));
  // center fan
  for (int j = 0; j < 6; ++j)
    m.tris.push_back({0, base(1) + j, base(1) + (j + 1) % 6});
  // ring strips
  for (int k = 1; k < n; ++k) {
    const int bi = base(k), bo = base(k + 1);
    const int ni = 6 * k, no = 6 * (k + 1);
    for (int s = 0; s < 6; ++s) {
      for (int mloc = 0; mloc <= k; ++mloc) {
        const int om = bo + (s * (k + 1) + mloc) % no;
        const int om1 = bo + (s * (k + 1) + mloc + 1) % no;
        const int im = bi + (s * k + mloc) % ni;
        m.tris.push_back({om, om1, im});
      }
      for (int mloc = 0; mloc < k; ++mloc) {
        const int im = bi + (s * k + mloc) % ni;
        const int im1 = bi + (s * k + mloc + 1) % ni;
        const int om1 = bo + (s * (k + 1) + mloc + 1) % no;
        m.tris.push_back({im, om1, im1});
      }
    }
  }
  m.flags.assign(m.verts.size(), kInterior);
  m.bparam.assign(m.verts.size(), -1.0);
  const int bn = base(n);
  for (int j = 0; j < 6 * n; ++j) {
    m.flags[bn + j] = kOuterBoundary;
    m.bedges.push_back({bn + j, bn + (j + 1) % (6 * n)});
  }
  return m;
}

void laplacian_smooth(Mesh& m, int sweeps, double relax) {
  const auto nbrs = m.vertex_neighbors();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    std::vector<Vec2> next = m.verts;
    for (int v = 0; v < m.vertex_count(); ++v) {
      if (m.flags[v] != kInterior) continue;
      if (nbrs[v].empty()) continue;
      Vec2 avg{0.0, 0.0};
      for (int w : nbrs[v]) avg = avg + m.verts[w];
      avg = (1.0 / nbrs[v].size()) * avg;
      next[v] = m.verts[v] + relax * (avg - m.verts[v]);
    }
    m.verts = std::move(next);
  }
}

}  // namespace

double Mesh::triangle_area(int t) const {
  const auto c = tri_coords(t);
  return 0.5 * cross(c[1] - c[0], c[2] - c[0]);
}

Vec2 Mesh::centroid(int t) const {
  const auto c = tri_coords(t);
  return (1.0 / 3.0) * (c[0] + c[1] + c[2]);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < triangle_count(); ++t) a += triangle_area(t);
  return a;
}

double Mesh::max_edge_length() const {
  double e = 0.0;
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k)
      e = std::max(e, dist(verts[t[k]], verts[t[(k + 1) % 3]]));
  return e;
}

double Mesh::min_angle_deg() const {
  double worst = 180.0;
  for (int t = 0; t < triangle_count(); ++t) {
    const auto c = tri_coords(t);
    for (int k = 0; k < 3; ++k) {
      const Vec2 u = c[(k + 1) % 3] - c[k];
      const Vec2 v = c[(k + 2) % 3] - c[k];
      const double ang =
          std::atan2(std::abs(cross(u, v)), dot(u, v)) * 180.0 / kPi;
      worst = std::min(worst, ang);
    }
  }
  return worst;
}

std::vector<std::vector<int>> Mesh::vertex_cells() const {
  std::vector<std::vector<int>> out(verts.size());
  for (int t = 0; t < triangle_count(); ++t)
    for (int k = 0; k < 3; ++k) out[tris[t][k]].push_back(t);
  return out;
}

std::vector<std::vector<int>> Mesh::vertex_neighbors() const {
  std::vector<std::set<int>> acc(verts.size());
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) {
      acc[t[k]].insert(t[(k + 1) % 3]);
      acc[t[k]].insert(t[(k + 2) % 3]);
    }
  std::vector<std::vector<int>> out(verts.size());
  for (size_t v = 0; v < acc.size(); ++v)
    out[v].assign(acc[v].begin(), acc[v].end());
  return out;
}

std::string Mesh::write_text() const {
  std::ostringstream os;
  os << "mesh v1\n" << vertex_count() << "\n";
  char buf[80];
  for (int v = 0; v < vertex_count(); ++v) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", verts[v].x, verts[v].y,
                  static_cast<int>(flags[v]));
    os << buf;
  }
  os << triangle_count() << "\n";
  for (const auto& t : tris)
    os << t[0] << " " << t[1] << " " << t[2] << "\n";
  return os.str();
}

Mesh Mesh::read_text(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  std::getline(is, header);
  if (header != "mesh v1") fail(ErrorKind::Argument, "bad mesh header");
  Mesh m;
  int nv = 0, nt = 0;
  is >> nv;
  if (!is || nv <= 0) fail(ErrorKind::Argument, "bad vertex count");
  m.verts.resize(nv);
  m.flags.resize(nv);
  m.bparam.assign(nv, -1.0);
  for (int v = 0; v < nv; ++v) {
    int f = 0;
    is >> m.verts[v].x >> m.verts[v].y >> f;
    m.flags[v] = static_cast<uint8_t>(f);
  }
  is >> nt;
  if (!is || nt <= 0) fail(ErrorKind::Argument, "bad triangle count");
  m.tris.resize(nt);
  for (int t = 0; t < nt; ++t) is >> m.tris[t][0] >> m.tris[t][1] >> m.tris[t][2];
  if (!is) fail(ErrorKind::Argument, "truncated mesh text");
  // boundary edges: edges incident to exactly one triangle
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.tris)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  for (const auto& t : m.tris)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (count[{std::min(a, b), std::max(a, b)}] == 1)
        m.bedges.push_back({a, b});
    }
  return m;
}

Mesh triangulate(const Domain& domain, double h) {
  if (!(h > 0.0)) fail(ErrorKind::Argument, "mesh size must be positive");
  if (!(h < domain.inradius()))
    fail(ErrorKind::Argument, "mesh size must be below the inradius");

  Mesh m;
  switch (domain.kind()) {
    case DomainKind::Square: {
      const double L = domain.param_side();
      const int n = std::max(1, static_cast<int>(std::ceil(L / h)));
      if (static_cast<long>(n + 1) * (n + 1) > kVertexBudget)
        fail(ErrorKind::Resource, "vertex budget exceeded");
      const double d = L / n;
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) m.verts.push_back({i * d, j * d});
      auto id = [n](int i, int j) { return j * (n + 1) + i; };
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          m.tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
          m.tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
      m.flags.assign(m.verts.size(), kInterior);
      m.bparam.assign(m.verts.size(), -1.0);
      for (int i = 0; i < n; ++i) m.bedges.push_back({id(i, 0), id(i + 1, 0)});
      for (int j = 0; j < n; ++j) m.bedges.push_back({id(n, j), id(n, j + 1)});
      for (int i = n; i > 0; --i) m.bedges.push_back({id(i, n), id(i - 1, n)});
      for (int j = n; j > 0; --j) m.bedges.push_back({id(0, j), id(0, j - 1)});
      for (const auto& e : m.bedges) m.flags[e[0]] = kOuterBoundary;
      for (int v = 0; v < m.vertex_count(); ++v)
        if (m.flags[v] == kOuterBoundary)
          m.bparam[v] = domain.boundary_param(m.verts[v]);
      break;
    }
    case DomainKind::Disk: {
      const double R = domain.param_radius();
      int n = std::max(2, static_cast<int>(std::ceil(R / h)));
      if (1 + 3L * n * (n + 1) > kVertexBudget)
        fail(ErrorKind::Resource, "vertex budget exceeded");
      m = unit_disk_rings(n);
      for (auto& v : m.verts) v = R * v;
      for (int v = 0; v < m.vertex_count(); ++v)
        if (m.flags[v] == kOuterBoundary)
          m.bparam[v] = domain.boundary_param(m.verts[v]);
      break;
    }
    case DomainKind::Ellipse: {
      const double a = domain.param_a(), b = domain.param_b();
      int n = std::max(2, static_cast<int>(std::ceil(std::max(a, b) / h)));
      if (1 + 3L * n * (n + 1) > kVertexBudget)
        fail(ErrorKind::Resource, "vertex budget exceeded");
      m = unit_disk_rings(n);
      for (auto& v : m.verts) v = {a * v.x, b * v.y};
      laplacian_smooth(m, 3, 0.5);
      for (int v = 0; v < m.vertex_count(); ++v)
        if (m.flags[v] == kOuterBoundary)
          m.bparam[v] = domain.boundary_param(m.verts[v]);
      break;
    }
    case DomainKind::BoundaryGraph:
      fail(ErrorKind::Unsupported,
           "graph domains are not meshable; they serve the straightening "
           "construction only");
  }
  m.target_h = h;
  m.domain = std::make_shared<Domain>(domain);
  check_valid_tris(m, "triangulation");
  // guarantee the edge-length contract
  while (m.max_edge_length() > 1.5 * h) {
    m = refine(m);
    m.target_h = h;
  }
  return m;
}

Mesh refine(const Mesh& mesh) {
  if (2L * mesh.vertex_count() + 3L * mesh.triangle_count() / 2 > kVertexBudget)
    fail(ErrorKind::Resource, "vertex budget exceeded");
  Mesh out;
  out.domain = mesh.domain;
  out.target_h = 0.5 * mesh.target_h;
  out.verts = mesh.verts;
  out.flags = mesh.flags;
  out.bparam = mesh.bparam;

  std::set<std::pair<int, int>> bset;
  for (const auto& e : mesh.bedges)
    bset.insert({std::min(e[0], e[1]), std::max(e[0], e[1])});

  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec2 p = 0.5 * (mesh.verts[a] + mesh.verts[b]);
    uint8_t flag = kInterior;
    double par = -1.0;
    if (bset.count(key)) {
      if (mesh.domain) p = mesh.domain->project_to_boundary(p);
      flag = kOuterBoundary;
      par = mesh.domain ? mesh.domain->boundary_param(p) : -1.0;
    }
    const int idx = static_cast<int>(out.verts.size());
    out.verts.push_back(p);
    out.flags.push_back(flag);
    out.bparam.push_back(par);
    midpoint.emplace(key, idx);
    return idx;
  };

  out.tris.reserve(4 * mesh.tris.size());
  for (const auto& t : mesh.tris) {
    const int m01 = mid(t[0], t[1]);
    const int m12 = mid(t[1], t[2]);
    const int m02 = mid(t[0], t[2]);
    out.tris.push_back({t[0], m01, m02});
    out.tris.push_back({t[1], m12, m01});
    out.tris.push_back({t[2], m02, m12});
    out.tris.push_back({m01, m12, m02});
  }
  out.bedges.reserve(2 * mesh.bedges.size());
  for (const auto& e : mesh.bedges) {
    const int mm = mid(e[0], e[1]);
    out.bedges.push_back({e[0], mm});
    out.bedges.push_back({mm, e[1]});
  }
  check_valid_tris(out, "refinement");
  return out;
}

NodeClassification classify_nodes(const Mesh& mesh,
                                  const ObstacleRegion& region) {
  if (mesh.domain) {
    for (const auto& q : region.boundary_samples(64)) {
      const double lv = mesh.domain->level(q);
      const double gn = norm(mesh.domain->level_gradient(q));
      if (gn > 0.0 && lv / gn < -1e-6 * std::max(1.0, mesh.target_h))
        fail(ErrorKind::Argument, "obstacle region leaves the domain");
    }
  }
  NodeClassification cls;
  const int nv = mesh.vertex_count();
  cls.is_obstacle.assign(nv, 0);
  for (int v = 0; v < nv; ++v) {
    if (mesh.flags[v] != kInterior) continue;
    if (region.contains(mesh.verts[v])) cls.is_obstacle[v] = 1;
  }
  const auto nbrs = mesh.vertex_neighbors();
  for (int v = 0; v < nv; ++v) {
    if (mesh.flags[v] != kInterior) continue;
    if (cls.is_obstacle[v]) {
      cls.obstacle.push_back(v);
      continue;
    }
    bool touches = false;
    for (int w : nbrs[v])
      if (cls.is_obstacle[w]) {
        touches = true;
        break;
      }
    if (touches)
      cls.free_boundary.push_back(v);
    else
      cls.interior.push_back(v);
  }
  return cls;
}

std::vector<uint8_t> constrained_mask(const Mesh& mesh,
                                      const NodeClassification& cls) {
  std::vector<uint8_t> mask(mesh.vertex_count(), 0);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.flags[v] != kInterior) mask[v] = 1;
  for (int v : cls.obstacle) mask[v] = 1;
  return mask;
}

std::vector<uint8_t> outer_mask(const Mesh& mesh) {
  std::vector<uint8_t> mask(mesh.vertex_count(), 0);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.flags[v] != kInterior) mask[v] = 1;
  return mask;
}

}  // namespace eigenobs
