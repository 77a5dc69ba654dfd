#include "alefem/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace alefem {

ScalarSpace ScalarSpace::lagrange(const Mesh& mesh, int degree, Continuity continuity) {
  if (degree < 1 || degree > mesh.degree())
    throw Error("space degree " + std::to_string(degree) + " not supported on a degree-" +
                std::to_string(mesh.degree()) + " mesh");
  ScalarSpace s;
  s.ref_ = &ReferenceElement::lagrange(degree);
  s.continuity_ = continuity;
  s.npe_ = s.ref_->num_nodes();
  const int ne = mesh.num_elements();

  if (degree == mesh.degree() && continuity == Continuity::Global) {
    s.dofs_ = mesh.connectivity();
    s.n_dofs_ = mesh.num_nodes();
    s.nodal_ = true;
  } else {
    const auto& topo = mesh.topology();
    const bool split = continuity == Continuity::SubdomainDiscontinuous;
    std::map<std::tuple<int, int, int, int>, int> index;
    s.dofs_.resize(static_cast<std::size_t>(ne) * s.npe_);
    for (int e = 0; e < ne; ++e) {
      auto nodes = mesh.element_nodes(e);
      const int ph = split ? static_cast<int>(mesh.phase(e)) : 0;
      for (int j = 0; j < s.npe_; ++j) {
        std::tuple<int, int, int, int> key;
        if (j < 3) {
          key = {0, nodes[j], 0, ph};
        } else if (j < 3 + 3 * (degree - 1)) {
          const int le = (j - 3) / (degree - 1), pos = (j - 3) % (degree - 1);
          const int edge = topo.element_edges[e][le];
          const bool forward = nodes[le] == topo.edges[edge][0];
          key = {1, edge, forward ? pos : degree - 2 - pos, ph};
        } else {
          key = {2, e, j, 0};
        }
        auto [it, inserted] = index.try_emplace(key, s.n_dofs_);
        if (inserted) ++s.n_dofs_;
        s.dofs_[static_cast<std::size_t>(e) * s.npe_ + j] = it->second;
      }
    }
  }
  s.owner_.assign(s.n_dofs_, {-1, -1});
  for (int e = 0; e < ne; ++e)
    for (int j = 0; j < s.npe_; ++j) {
      auto& o = s.owner_[s.dofs_[static_cast<std::size_t>(e) * s.npe_ + j]];
      if (o.first < 0) o = {e, j};
    }
  return s;
}

ScalarSpace ScalarSpace::mini(const Mesh& mesh) {
  if (mesh.degree() != 1) throw Error("the Mini element needs a degree-1 mesh");
  ScalarSpace s;
  s.ref_ = &ReferenceElement::mini();
  s.npe_ = 4;
  s.nodal_ = true;
  const int ne = mesh.num_elements();
  s.n_dofs_ = mesh.num_nodes() + ne;
  s.dofs_.reserve(static_cast<std::size_t>(ne) * 4);
  for (int e = 0; e < ne; ++e) {
    for (int n : mesh.element_nodes(e)) s.dofs_.push_back(n);
    s.dofs_.push_back(mesh.num_nodes() + e);
  }
  s.owner_.assign(s.n_dofs_, {-1, -1});
  for (int e = 0; e < ne; ++e)
    for (int j = 0; j < 4; ++j) {
      auto& o = s.owner_[s.dofs_[static_cast<std::size_t>(e) * 4 + j]];
      if (o.first < 0) o = {e, j};
    }
  return s;
}

namespace {
void fill_rings(const Mesh& mesh, FESpacePair& sp) {
  const auto& topo = mesh.topology();
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    if (topo.node_on_boundary[n]) sp.boundary_dofs.push_back(n);
    if (topo.node_on_interface[n]) sp.interface_dofs.push_back(n);
  }
}
}  // namespace

FESpacePair build_taylor_hood(const Mesh& mesh, int k, Continuity pressure) {
  if (k != 2 && k != 3) throw Error("Taylor-Hood degree must be 2 or 3, got " + std::to_string(k));
  if (mesh.degree() != k) throw Error("isoparametric pair needs a mesh of degree " + std::to_string(k));
  FESpacePair sp;
  sp.k = k;
  sp.velocity = ScalarSpace::lagrange(mesh, k, Continuity::Global);
  sp.pressure = ScalarSpace::lagrange(mesh, k - 1, pressure);
  fill_rings(mesh, sp);
  return sp;
}

FESpacePair build_mini(const Mesh& mesh, Continuity pressure) {
  FESpacePair sp;
  sp.k = 1;
  sp.velocity = ScalarSpace::mini(mesh);
  sp.pressure = ScalarSpace::lagrange(mesh, 1, pressure);
  fill_rings(mesh, sp);
  return sp;
}

FESpacePair build_spaces(const Mesh& mesh, int k, Continuity pressure) {
  return k == 1 ? build_mini(mesh, pressure) : build_taylor_hood(mesh, k, pressure);
}

std::vector<Vec2> dof_positions(const ScalarSpace& space, const Mesh& mesh) {
  std::vector<Vec2> out(space.num_dofs());
  const auto& nodes = space.reference().nodes();
  for (int d = 0; d < space.num_dofs(); ++d)
    out[d] = element_map_unchecked(mesh, space.owner_element(d), nodes[space.owner_local(d)]).x;
  return out;
}

namespace {
// The bubble coefficient is the value at the centroid minus the P1 part.
void correct_bubbles(const ScalarSpace& space, Vector& c, int stride, int comp) {
  if (space.reference().kind() != ReferenceElement::Kind::MiniBubble) return;
  for (int e = 0; e < space.num_elements(); ++e) {
    auto d = space.dofs(e);
    c[stride * d[3] + comp] -= (c[stride * d[0] + comp] + c[stride * d[1] + comp] + c[stride * d[2] + comp]) / 3.0;
  }
}
}  // namespace

Vector interpolate(const ScalarSpace& space, const Mesh& mesh, const PhaseField& f) {
  Vector c(space.num_dofs());
  const auto pos = dof_positions(space, mesh);
  for (int d = 0; d < space.num_dofs(); ++d) c[d] = f(pos[d], mesh.phase(space.owner_element(d)));
  correct_bubbles(space, c, 1, 0);
  return c;
}

Vector interpolate(const ScalarSpace& space, const Mesh& mesh, const ScalarField& f) {
  return interpolate(space, mesh, PhaseField([&](const Vec2& x, Phase) { return f(x); }));
}

Vector interpolate_vector(const ScalarSpace& space, const Mesh& mesh, const VectorField& f) {
  Vector c(2 * space.num_dofs());
  const auto pos = dof_positions(space, mesh);
  for (int d = 0; d < space.num_dofs(); ++d) {
    const Vec2 v = f(pos[d]);
    c[2 * d] = v.x();
    c[2 * d + 1] = v.y();
  }
  correct_bubbles(space, c, 2, 0);
  correct_bubbles(space, c, 2, 1);
  return c;
}

std::optional<Vec2> invert_element_map(const Mesh& mesh, int e, const Vec2& x) {
  Vec2 p(1.0 / 3.0, 1.0 / 3.0);
  for (int it = 0; it < 40; ++it) {
    const ElementMap m = element_map_unchecked(mesh, e, p);
    if (!(std::abs(m.detJ) > 0.0)) return std::nullopt;
    const Vec2 dp = m.J.inverse() * (m.x - x);
    p -= dp;
    if (!p.allFinite() || p.norm() > 1e3) return std::nullopt;
    if (dp.norm() <= 1e-12) return p;
  }
  return std::nullopt;
}

namespace {
double outside_measure(const Vec2& p) {
  return std::max(0.0, -std::min({1.0 - p.x() - p.y(), p.x(), p.y()}));
}
constexpr double kInsideTol = 1e-10;
}  // namespace

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  const int ne = mesh.num_elements();
  std::vector<std::array<double, 4>> box(ne);
  lo_ = Vec2(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
  Vec2 hi = -lo_;
  for (int e = 0; e < ne; ++e) {
    Vec2 a = mesh.node(mesh.element_nodes(e)[0]), b = a;
    for (int n : mesh.element_nodes(e)) {
      a = a.cwiseMin(mesh.node(n));
      b = b.cwiseMax(mesh.node(n));
    }
    const double pad = 0.1 * (b - a).norm();
    box[e] = {a.x() - pad, a.y() - pad, b.x() + pad, b.y() + pad};
    lo_ = lo_.cwiseMin(Vec2(box[e][0], box[e][1]));
    hi = hi.cwiseMax(Vec2(box[e][2], box[e][3]));
  }
  const Vec2 ext = hi - lo_;
  const double cs = std::sqrt(ext.x() * ext.y() / std::max(1, ne)) * 1.5;
  nx_ = std::max(1, static_cast<int>(std::ceil(ext.x() / cs)));
  ny_ = std::max(1, static_cast<int>(std::ceil(ext.y() / cs)));
  cell_ = Vec2(ext.x() / nx_, ext.y() / ny_);
  auto cell_range = [&](int e) {
    const int i0 = std::clamp(static_cast<int>((box[e][0] - lo_.x()) / cell_.x()), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((box[e][1] - lo_.y()) / cell_.y()), 0, ny_ - 1);
    const int i1 = std::clamp(static_cast<int>((box[e][2] - lo_.x()) / cell_.x()), 0, nx_ - 1);
    const int j1 = std::clamp(static_cast<int>((box[e][3] - lo_.y()) / cell_.y()), 0, ny_ - 1);
    return std::array<int, 4>{i0, j0, i1, j1};
  };
  start_.assign(nx_ * ny_ + 1, 0);
  for (int e = 0; e < ne; ++e) {
    auto r = cell_range(e);
    for (int j = r[1]; j <= r[3]; ++j)
      for (int i = r[0]; i <= r[2]; ++i) ++start_[j * nx_ + i + 1];
  }
  for (int c = 0; c < nx_ * ny_; ++c) start_[c + 1] += start_[c];
  items_.resize(start_.back());
  std::vector<int> fill(start_.begin(), start_.end() - 1);
  for (int e = 0; e < ne; ++e) {
    auto r = cell_range(e);
    for (int j = r[1]; j <= r[3]; ++j)
      for (int i = r[0]; i <= r[2]; ++i) items_[fill[j * nx_ + i]++] = e;
  }
}

void PointLocator::scan(int cx, int cy, const Vec2& x, std::optional<Phase> side, Location& best) const {
  if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return;
  const int c = cy * nx_ + cx;
  for (int k = start_[c]; k < start_[c + 1]; ++k) {
    const int e = items_[k];
    if (side && mesh_->phase(e) != *side) continue;
    auto p = invert_element_map(*mesh_, e, x);
    if (!p) continue;
    const double out = outside_measure(*p);
    if (best.element < 0 || out < best.outside) best = {e, *p, out};
    if (out <= kInsideTol) return;
  }
}

std::optional<Location> PointLocator::locate(const Vec2& x, std::optional<Phase> side, bool extrapolate) const {
  const int cx = static_cast<int>(std::floor((x.x() - lo_.x()) / cell_.x()));
  const int cy = static_cast<int>(std::floor((x.y() - lo_.y()) / cell_.y()));
  Location best;
  scan(std::clamp(cx, 0, nx_ - 1), std::clamp(cy, 0, ny_ - 1), x, side, best);
  if (best.element >= 0 && best.outside <= kInsideTol) return best;
  if (!extrapolate) return std::nullopt;
  for (int ring = 1; ring <= 2; ++ring) {
    for (int j = cy - ring; j <= cy + ring; ++j)
      for (int i = cx - ring; i <= cx + ring; ++i)
        if (std::max(std::abs(i - cx), std::abs(j - cy)) == ring) scan(i, j, x, side, best);
    if (best.element >= 0) return best;
  }
  return std::nullopt;
}

Location PointLocator::find(const Vec2& x, std::optional<Phase> side, bool extrapolate) const {
  auto loc = locate(x, side, extrapolate);
  if (!loc)
    throw Error("point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) + ") is outside the mesh" +
                (side ? std::string(" on the ") + to_string(*side) + " side" : std::string()));
  return *loc;
}

double evaluate_at(const ScalarSpace& space, const Vector& coeffs, const Location& loc) {
  double phi[10];
  const int n = space.dofs_per_element();
  space.reference().values(loc.ref, {phi, static_cast<std::size_t>(n)});
  auto d = space.dofs(loc.element);
  double v = 0.0;
  for (int j = 0; j < n; ++j) v += coeffs[d[j]] * phi[j];
  return v;
}

Vec2 evaluate_vector_at(const ScalarSpace& space, const Vector& coeffs, const Location& loc) {
  double phi[10];
  const int n = space.dofs_per_element();
  space.reference().values(loc.ref, {phi, static_cast<std::size_t>(n)});
  auto d = space.dofs(loc.element);
  Vec2 v = Vec2::Zero();
  for (int j = 0; j < n; ++j) v += phi[j] * Vec2(coeffs[2 * d[j]], coeffs[2 * d[j] + 1]);
  return v;
}

Vec2 gradient_at(const ScalarSpace& space, const Mesh& mesh, const Vector& coeffs, const Location& loc) {
  Vec2 g[10];
  const int n = space.dofs_per_element();
  space.reference().gradients(loc.ref, {g, static_cast<std::size_t>(n)});
  auto d = space.dofs(loc.element);
  Vec2 ref = Vec2::Zero();
  for (int j = 0; j < n; ++j) ref += coeffs[d[j]] * g[j];
  const Mat2 J = element_map_unchecked(mesh, loc.element, loc.ref).J;
  return J.transpose().inverse() * ref;
}

Mat2 vector_gradient_at(const ScalarSpace& space, const Mesh& mesh, const Vector& coeffs,
                        const Location& loc) {
  Vec2 g[10];
  const int n = space.dofs_per_element();
  space.reference().gradients(loc.ref, {g, static_cast<std::size_t>(n)});
  auto d = space.dofs(loc.element);
  Mat2 ref = Mat2::Zero();
  for (int j = 0; j < n; ++j) ref += Vec2(coeffs[2 * d[j]], coeffs[2 * d[j] + 1]) * g[j].transpose();
  const Mat2 J = element_map_unchecked(mesh, loc.element, loc.ref).J;
  return ref * J.inverse();
}

double evaluate(const ScalarSpace& space, const PointLocator& locator, const Vector& coeffs,
                const Vec2& x, std::optional<Phase> side) {
  return evaluate_at(space, coeffs, locator.find(x, side));
}

}  // namespace alefem
