#include "dwlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "dwlab/kernels.hpp"

namespace dwlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

int packed_entries(int dim) { return dim == 1 ? 1 : (dim == 2 ? 3 : 6); }

// Packed index for (i,j), i<=j, within the dim-specific layout.
int packed_pos(int dim, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i == j) return i;
  if (dim == 2) return 2;           // (0,1)
  if (i == 0 && j == 1) return 3;   // dim == 3
  if (i == 0 && j == 2) return 4;
  return 5;                         // (1,2)
}

double det3(const SymMat& m) {
  const double a = m.at(0, 0), b = m.at(1, 1), c = m.at(2, 2);
  const double d = m.at(0, 1), e = m.at(0, 2), f = m.at(1, 2);
  return a * (b * c - f * f) - d * (d * c - f * e) + e * (d * f - b * e);
}

// Quintic smoothstep and its derivatives on [0,1].
double q5_deriv(double t, int k) {
  switch (k) {
    case 0: return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    case 1: return t * t * (30.0 + t * (-60.0 + 30.0 * t));
    case 2: return t * (60.0 + t * (-180.0 + 120.0 * t));
    case 3: return 60.0 + t * (-360.0 + 360.0 * t);
    case 4: return -360.0 + 720.0 * t;
    case 5: return 720.0;
    default: return 0.0;
  }
}

struct RadialTermKey {
  std::array<int, 3> p{};
  int q = 0;
  int k = 0;
  bool operator<(const RadialTermKey& o) const {
    if (p != o.p) return p < o.p;
    if (q != o.q) return q < o.q;
    return k < o.k;
  }
};

// d^b applied to a radial scalar g(|y|) stays inside the algebra
// { c * y^p * |y|^{-q} * g^{(k)}(|y|) }; differentiate term-by-term.
std::map<RadialTermKey, double> radial_term_expansion(const MultiIndex& b) {
  std::map<RadialTermKey, double> terms;
  terms[RadialTermKey{}] = 1.0;
  for (int axis = 0; axis < kMaxDim; ++axis) {
    for (int rep = 0; rep < b[axis]; ++rep) {
      std::map<RadialTermKey, double> next;
      auto add = [&next](const RadialTermKey& key, double c) {
        if (c != 0.0) next[key] += c;
      };
      for (const auto& [key, c] : terms) {
        if (key.p[axis] > 0) {
          RadialTermKey t = key;
          t.p[axis] -= 1;
          add(t, c * key.p[axis]);
        }
        if (key.q > 0) {
          RadialTermKey t = key;
          t.p[axis] += 1;
          t.q += 2;
          add(t, -c * key.q);
        }
        RadialTermKey t = key;
        t.p[axis] += 1;
        t.q += 1;
        t.k += 1;
        add(t, c);
      }
      terms = std::move(next);
    }
  }
  return terms;
}

// Portable deterministic uniform draw in [-1, 1).
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : eng_(seed) {}
  double sym() {
    return static_cast<double>(eng_() >> 11) * (2.0 / 9007199254740992.0) -
           1.0;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace

double SymMat::at(int i, int j) const {
  return v[static_cast<std::size_t>(packed_pos(dim, i, j))];
}

double& SymMat::entry(int i, int j) {
  return v[static_cast<std::size_t>(packed_pos(dim, i, j))];
}

void SymMat::matvec(const double* in, double* out) const {
  for (int i = 0; i < dim; ++i) {
    double s = 0;
    for (int j = 0; j < dim; ++j) s += at(i, j) * in[j];
    out[i] = s;
  }
}

double SymMat::quad(const double* w) const {
  double s = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += w[i] * at(i, j) * w[j];
  return s;
}

double SymMat::op_norm() const {
  if (dim == 1) return std::fabs(v[0]);
  if (dim == 2) {
    const double a = at(0, 0), b = at(1, 1), c = at(0, 1);
    const double mid = 0.5 * (a + b);
    const double rad = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
    return std::max(std::fabs(mid + rad), std::fabs(mid - rad));
  }
  // Symmetric 3x3 eigenvalues, trigonometric form.
  const double p1 = at(0, 1) * at(0, 1) + at(0, 2) * at(0, 2) +
                    at(1, 2) * at(1, 2);
  if (p1 == 0.0)
    return std::max({std::fabs(at(0, 0)), std::fabs(at(1, 1)),
                     std::fabs(at(2, 2))});
  const double q = (at(0, 0) + at(1, 1) + at(2, 2)) / 3.0;
  const double p2 = (at(0, 0) - q) * (at(0, 0) - q) +
                    (at(1, 1) - q) * (at(1, 1) - q) +
                    (at(2, 2) - q) * (at(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  SymMat B = *this;
  for (int i = 0; i < 3; ++i) B.entry(i, i) -= q;
  B = B.scaled(1.0 / p);
  double r = det3(B) / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  return std::max({std::fabs(e1), std::fabs(e2), std::fabs(e3)});
}

SymMat SymMat::inverse() const {
  SymMat out;
  out.dim = dim;
  if (dim == 1) {
    if (v[0] == 0.0) throw std::domain_error("singular 1x1 matrix");
    out.v[0] = 1.0 / v[0];
    return out;
  }
  if (dim == 2) {
    const double a = at(0, 0), b = at(1, 1), c = at(0, 1);
    const double det = a * b - c * c;
    if (det == 0.0) throw std::domain_error("singular 2x2 matrix");
    out.entry(0, 0) = b / det;
    out.entry(1, 1) = a / det;
    out.entry(0, 1) = -c / det;
    return out;
  }
  const double det = det3(*this);
  if (det == 0.0) throw std::domain_error("singular 3x3 matrix");
  const double a = at(0, 0), b = at(1, 1), c = at(2, 2);
  const double d = at(0, 1), e = at(0, 2), f = at(1, 2);
  out.entry(0, 0) = (b * c - f * f) / det;
  out.entry(1, 1) = (a * c - e * e) / det;
  out.entry(2, 2) = (a * b - d * d) / det;
  out.entry(0, 1) = (e * f - d * c) / det;
  out.entry(0, 2) = (d * f - e * b) / det;
  out.entry(1, 2) = (d * e - a * f) / det;
  return out;
}

SymMat SymMat::identity(int dim, double scale) {
  SymMat m;
  m.dim = dim;
  for (int i = 0; i < dim; ++i) m.entry(i, i) = scale;
  return m;
}

SymMat SymMat::plus_identity(double scale) const {
  SymMat m = *this;
  for (int i = 0; i < dim; ++i) m.entry(i, i) += scale;
  return m;
}

SymMat SymMat::scaled(double s) const {
  SymMat m = *this;
  for (auto& x : m.v) x *= s;
  return m;
}

DampingProfile parse_damping_profile(const std::string& name) {
  if (name == "uniform") return DampingProfile::uniform;
  if (name == "radial_step") return DampingProfile::radial_step;
  if (name == "radial_step_aniso") return DampingProfile::radial_step_aniso;
  throw std::invalid_argument("unknown damping profile: " + name);
}

std::string damping_profile_name(DampingProfile p) {
  switch (p) {
    case DampingProfile::uniform: return "uniform";
    case DampingProfile::radial_step: return "radial_step";
    case DampingProfile::radial_step_aniso: return "radial_step_aniso";
  }
  return "?";
}

namespace {

// k-th radial derivative of the base scalar profile at radius s.
double base_profile_deriv(const DampingSpec& spec, double s, int k) {
  if (spec.profile == DampingProfile::uniform) return k == 0 ? spec.b0 : 0.0;
  if (k == 0) {
    if (s <= spec.r0) return 0.0;
    if (s >= spec.R) return spec.b0;
    return spec.b0 * q5_deriv((s - spec.r0) / (spec.R - spec.r0), 0);
  }
  if (s <= spec.r0 || s >= spec.R) return 0.0;
  const double w = spec.R - spec.r0;
  return spec.b0 * q5_deriv((s - spec.r0) / w, k) / std::pow(w, k);
}

SymMat direction_matrix(const DampingSpec& spec) {
  SymMat m = SymMat::identity(spec.dim);
  if (spec.profile == DampingProfile::radial_step_aniso) {
    for (int i = 0; i < spec.dim; ++i)
      for (int j = i; j < spec.dim; ++j)
        m.entry(i, j) += spec.eps * spec.dir[static_cast<std::size_t>(i)] *
                         spec.dir[static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace

SymMat DampingSpec::eval(const std::array<double, kMaxDim>& x) const {
  return deriv(x, MultiIndex::zero());
}

SymMat DampingSpec::deriv(const std::array<double, kMaxDim>& x,
                          const MultiIndex& b) const {
  // grad^b B_lambda(x) = lambda^{1+|b|} (grad^b B)(lambda x)
  std::array<double, 3> y{0, 0, 0};
  double r2 = 0;
  for (int j = 0; j < dim; ++j) {
    y[static_cast<std::size_t>(j)] = lambda * x[static_cast<std::size_t>(j)];
    r2 += y[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
  }
  const double r = std::sqrt(r2);
  const double pref = std::pow(lambda, 1 + b.order());

  double scalar = 0.0;
  if (b.order() == 0) {
    scalar = base_profile_deriv(*this, r, 0);
  } else if (profile == DampingProfile::uniform) {
    scalar = 0.0;
  } else if (r <= r0 || r >= R) {
    scalar = 0.0;  // every term carries a ramp derivative
  } else {
    for (const auto& [key, c] : radial_term_expansion(b)) {
      double mono = c;
      for (int j = 0; j < kMaxDim; ++j)
        for (int rep = 0; rep < key.p[static_cast<std::size_t>(j)]; ++rep)
          mono *= y[static_cast<std::size_t>(j)];
      mono *= std::pow(r, -key.q);
      mono *= base_profile_deriv(*this, r, key.k);
      scalar += mono;
    }
  }
  return direction_matrix(*this).scaled(pref * scalar);
}

DampingSpec DampingSpec::rescaled(double lam) const {
  if (!(lam > 0)) throw std::invalid_argument("rescaling factor must be positive");
  DampingSpec s = *this;
  s.lambda *= lam;
  return s;
}

double DampingSpec::sup_norm() const { return lambda * base_sup_norm(); }

double DampingSpec::base_sup_norm() const {
  const double aniso =
      profile == DampingProfile::radial_step_aniso ? 1.0 + eps : 1.0;
  return b0 * aniso;
}

double DampingSpec::exterior_radius() const {
  return profile == DampingProfile::uniform ? 0.0 : R / lambda;
}

double DampingSpec::dead_zone_radius() const {
  return profile == DampingProfile::uniform ? 0.0 : r0 / lambda;
}

DampingSpec make_damping(DampingProfile profile, int dim, double b0, double r0,
                         double R, double eps, std::array<double, 3> dir) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("damping dim must be 1..3");
  if (b0 < 0) throw std::invalid_argument("b0 must be >= 0");
  DampingSpec s;
  s.profile = profile;
  s.dim = dim;
  s.b0 = b0;
  if (profile == DampingProfile::uniform) {
    s.r0 = 0;
    s.R = 0;
  } else {
    if (!(r0 > 0 && R > r0))
      throw std::invalid_argument("radial damping needs 0 < r0 < R");
    s.r0 = r0;
    s.R = R;
  }
  if (profile == DampingProfile::radial_step_aniso) {
    if (!(eps >= 0 && eps < 1))
      throw std::invalid_argument("anisotropy eps must lie in [0,1)");
    double norm = 0;
    for (int j = 0; j < dim; ++j) norm += dir[static_cast<std::size_t>(j)] * dir[static_cast<std::size_t>(j)];
    if (norm <= 0) throw std::invalid_argument("anisotropy direction must be nonzero");
    const double inv = 1.0 / std::sqrt(norm);
    for (int j = 0; j < kMaxDim; ++j)
      dir[static_cast<std::size_t>(j)] = j < dim ? dir[static_cast<std::size_t>(j)] * inv : 0.0;
    s.eps = eps;
    s.dir = dir;
  }
  return s;
}

DampingField::DampingField(const DampingSpec& spec, const Grid& g)
    : grid_(g), entries_(packed_entries(g.dim)) {
  if (spec.dim != g.dim) throw std::invalid_argument("damping/grid dim mismatch");
  const std::int64_t np = g.npoints();
  data_.assign(static_cast<std::size_t>(np * entries_), 0.0);
  double* dst = data_.data();
  const int ne = entries_;
  kernels::parallel_for(np, [&, dst, ne](std::int64_t i) {
    const SymMat m = spec.eval(g.point(i));
    for (int e = 0; e < ne; ++e) dst[i * ne + e] = m.v[static_cast<std::size_t>(e)];
  });
}

SymMat DampingField::at(std::int64_t idx) const {
  SymMat m;
  m.dim = grid_.dim;
  for (int e = 0; e < entries_; ++e)
    m.v[static_cast<std::size_t>(e)] = data_[static_cast<std::size_t>(idx * entries_ + e)];
  return m;
}

void DampingField::matvec(const Field& in, Field& out) const {
  if (!(in.grid() == grid_)) throw std::invalid_argument("field grid mismatch");
  const std::int64_t np = grid_.npoints();
  const int dim = grid_.dim;
  const int ne = entries_;
  const double* src = in.data();
  const double* mat = data_.data();
  double* dst = out.data();
  kernels::parallel_for(np, [=](std::int64_t i) {
    double w[3] = {0, 0, 0};
    double r[3] = {0, 0, 0};
    for (int c = 0; c < dim; ++c) w[c] = src[c * np + i];
    SymMat m;
    m.dim = dim;
    for (int e = 0; e < ne; ++e) m.v[static_cast<std::size_t>(e)] = mat[i * ne + e];
    m.matvec(w, r);
    for (int c = 0; c < dim; ++c) dst[c * np + i] = r[c];
  });
}

double DampingField::inner(const Field& a, const Field& b) const {
  if (!(a.grid() == grid_) || !(b.grid() == grid_))
    throw std::invalid_argument("field grid mismatch");
  const std::int64_t np = grid_.npoints();
  const int dim = grid_.dim;
  const int ne = entries_;
  const double* pa = a.data();
  const double* pb = b.data();
  const double* mat = data_.data();
  const double s = kernels::reduce_sum(np, [=](std::int64_t i) {
    SymMat m;
    m.dim = dim;
    for (int e = 0; e < ne; ++e) m.v[static_cast<std::size_t>(e)] = mat[i * ne + e];
    double wa[3] = {0, 0, 0}, wb[3] = {0, 0, 0}, mb[3] = {0, 0, 0};
    for (int c = 0; c < dim; ++c) {
      wa[c] = pa[c * np + i];
      wb[c] = pb[c * np + i];
    }
    m.matvec(wb, mb);
    double t = 0;
    for (int c = 0; c < dim; ++c) t += wa[c] * mb[c];
    return t;
  });
  return s * grid_.cell_volume();
}

ImplicitDampingSolve::ImplicitDampingSolve(const DampingSpec& spec,
                                           const Grid& g, double c)
    : grid_(g), entries_(packed_entries(g.dim)) {
  if (spec.dim != g.dim) throw std::invalid_argument("damping/grid dim mismatch");
  const std::int64_t np = g.npoints();
  inv_.assign(static_cast<std::size_t>(np * entries_), 0.0);
  double* dst = inv_.data();
  const int ne = entries_;
  kernels::parallel_for(np, [&, dst, ne, c](std::int64_t i) {
    const SymMat m = spec.eval(g.point(i)).scaled(c).plus_identity(1.0);
    const SymMat mi = m.inverse();
    for (int e = 0; e < ne; ++e) dst[i * ne + e] = mi.v[static_cast<std::size_t>(e)];
  });
}

void ImplicitDampingSolve::apply(const Field& rhs, Field& out) const {
  if (!(rhs.grid() == grid_)) throw std::invalid_argument("field grid mismatch");
  const std::int64_t np = grid_.npoints();
  const int dim = grid_.dim;
  const int ne = entries_;
  const double* src = rhs.data();
  const double* mat = inv_.data();
  double* dst = out.data();
  kernels::parallel_for(np, [=](std::int64_t i) {
    double w[3] = {0, 0, 0};
    double r[3] = {0, 0, 0};
    for (int c = 0; c < dim; ++c) w[c] = src[c * np + i];
    SymMat m;
    m.dim = dim;
    for (int e = 0; e < ne; ++e) m.v[static_cast<std::size_t>(e)] = mat[i * ne + e];
    m.matvec(w, r);
    for (int c = 0; c < dim; ++c) dst[c * np + i] = r[c];
  });
}

NonlinearTensor::NonlinearTensor(int dim) : dim_(dim) {
  std::size_t n = 1;
  for (int i = 0; i < 6; ++i) n *= static_cast<std::size_t>(dim);
  c_.assign(n, 0.0);
}

std::size_t NonlinearTensor::flat(int i, int j, int k, int l, int m,
                                  int n) const {
  const auto d = static_cast<std::size_t>(dim_);
  return ((((static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)) * d +
            static_cast<std::size_t>(k)) *
               d +
           static_cast<std::size_t>(l)) *
              d +
          static_cast<std::size_t>(m)) *
             d +
         static_cast<std::size_t>(n);
}

NonlinearTensor NonlinearTensor::zero(int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("tensor dim must be 1..3");
  return NonlinearTensor(dim);
}

NonlinearTensor NonlinearTensor::scalar_1d(double c) {
  NonlinearTensor t(1);
  t.c_[0] = c;
  return t;
}

NonlinearTensor NonlinearTensor::random_symmetrized(int dim,
                                                    std::uint64_t seed,
                                                    double strength) {
  NonlinearTensor t = zero(dim);
  Draw draw(seed * 0xD1B54A32D192ED03ULL + 0x9E3779B97F4A7C15ULL);
  for (auto& v : t.c_) v = strength * draw.sym();
  return t.symmetrized();
}

bool NonlinearTensor::is_zero() const {
  for (double v : c_)
    if (v != 0.0) return false;
  return true;
}

double NonlinearTensor::max_abs() const {
  double m = 0;
  for (double v : c_) m = std::max(m, std::fabs(v));
  return m;
}

double NonlinearTensor::l1_norm() const {
  double s = 0;
  for (double v : c_) s += std::fabs(v);
  return s;
}

double NonlinearTensor::at(int i, int j, int k, int l, int m, int n) const {
  return c_[flat(i, j, k, l, m, n)];
}

double& NonlinearTensor::entry(int i, int j, int k, int l, int m, int n) {
  return c_[flat(i, j, k, l, m, n)];
}

NonlinearTensor NonlinearTensor::symmetrized() const {
  static constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  NonlinearTensor out(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l)
          for (int m = 0; m < dim_; ++m)
            for (int n = 0; n < dim_; ++n) {
              const int up[3] = {i, j, k};
              const int lo[3] = {l, m, n};
              double s = 0;
              for (const auto& p : kPerm)
                s += at(up[p[0]], up[p[1]], up[p[2]], lo[p[0]], lo[p[1]],
                        lo[p[2]]);
              out.entry(i, j, k, l, m, n) = s / 6.0;
            }
  return out;
}

bool NonlinearTensor::is_symmetric(double tol) const {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l)
          for (int m = 0; m < dim_; ++m)
            for (int n = 0; n < dim_; ++n) {
              const double v = at(i, j, k, l, m, n);
              if (std::fabs(v - at(j, i, k, m, l, n)) > tol) return false;
              if (std::fabs(v - at(i, k, j, l, n, m)) > tol) return false;
            }
  return true;
}

namespace {

struct TensorEntry {
  int i, j, k, l, m, n;
  double c;
};

std::vector<TensorEntry> nonzero_entries(const NonlinearTensor& N) {
  std::vector<TensorEntry> out;
  const int d = N.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) {
              const double c = N.at(i, j, k, l, m, n);
              if (c != 0.0) out.push_back({i, j, k, l, m, n, c});
            }
  return out;
}

}  // namespace

Field nonlinear_term(const NonlinearTensor& N, const Field& u, const Field& v) {
  const Grid& g = u.grid();
  if (!(v.grid() == g)) throw std::invalid_argument("field grid mismatch");
  Field out(g);
  if (N.is_zero()) return out;
  if (N.dim() != g.dim) throw std::invalid_argument("tensor/grid dim mismatch");

  const int d = g.dim;
  const std::int64_t np = g.npoints();
  std::vector<Field> gu, gv;
  gu.reserve(static_cast<std::size_t>(d));
  gv.reserve(static_cast<std::size_t>(d));
  for (int m = 0; m < d; ++m) gu.push_back(deriv(u, MultiIndex::unit(m)));
  for (int n = 0; n < d; ++n) gv.push_back(deriv(v, MultiIndex::unit(n)));

  const auto entries = nonzero_entries(N);
  for (int l = 0; l < d; ++l) {
    Field q(g);
    for (const auto& e : entries) {
      if (e.l != l) continue;
      double* dst = q.comp(e.i).data();
      const double* a = gu[static_cast<std::size_t>(e.m)].comp(e.j).data();
      const double* b = gv[static_cast<std::size_t>(e.n)].comp(e.k).data();
      const double c = e.c;
      kernels::parallel_for(np, [=](std::int64_t p) { dst[p] += c * a[p] * b[p]; });
    }
    out += deriv(q, MultiIndex::unit(l));
  }
  return out;
}

double trilinear_form(const NonlinearTensor& N, const Field& u, const Field& v,
                      const Field& w) {
  const Grid& g = u.grid();
  if (!(v.grid() == g) || !(w.grid() == g))
    throw std::invalid_argument("field grid mismatch");
  if (N.is_zero()) return 0.0;
  const int d = g.dim;
  const std::int64_t np = g.npoints();
  std::vector<Field> gu, gv, gw;
  for (int m = 0; m < d; ++m) {
    gu.push_back(deriv(u, MultiIndex::unit(m)));
    gv.push_back(deriv(v, MultiIndex::unit(m)));
    gw.push_back(deriv(w, MultiIndex::unit(m)));
  }
  const auto entries = nonzero_entries(N);
  std::vector<const double*> pu(entries.size()), pv(entries.size()),
      pw(entries.size());
  std::vector<double> ce(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& t = entries[e];
    pu[e] = gu[static_cast<std::size_t>(t.l)].comp(t.i).data();
    pv[e] = gv[static_cast<std::size_t>(t.m)].comp(t.j).data();
    pw[e] = gw[static_cast<std::size_t>(t.n)].comp(t.k).data();
    ce[e] = t.c;
  }
  const std::size_t ne = entries.size();
  const double s = kernels::reduce_sum(np, [&](std::int64_t p) {
    double acc = 0;
    for (std::size_t e = 0; e < ne; ++e)
      acc += ce[e] * pu[e][p] * pv[e][p] * pw[e][p];
    return acc;
  });
  return s * g.cell_volume();
}

double MultiplierSpec::phi(double r) const {
  const double edge = R / lambda;
  if (r <= edge || edge == 0.0) return r <= edge ? b0 : 0.0;
  return b0 * R / (lambda * r);
}

double MultiplierSpec::phi_prime(double r) const {
  const double edge = R / lambda;
  if (r <= edge) return 0.0;
  return -b0 * R / (lambda * r * r);
}

void MultiplierSpec::eval(const std::array<double, kMaxDim>& x,
                          std::array<double, 3>* h, SymMat* jac,
                          double* div) const {
  double r2 = 0;
  for (int j = 0; j < dim; ++j) r2 += x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  const double r = std::sqrt(r2);
  const double edge = R / lambda;
  const bool inside = r <= edge;
  const double f = inside ? b0 : b0 * R / (lambda * r);
  if (h) {
    *h = {0, 0, 0};
    for (int j = 0; j < dim; ++j) (*h)[static_cast<std::size_t>(j)] = f * x[static_cast<std::size_t>(j)];
  }
  if (jac) {
    *jac = SymMat::identity(dim, f);
    if (!inside) {
      // d_j h^i = phi delta_ij + phi' x_i x_j / r, with phi' = -phi/r here.
      const double c = -f / r2;
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
          jac->entry(i, j) += c * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
    }
  }
  if (div) *div = inside ? dim * b0 : (dim - 1) * f;
}

Field MultiplierSpec::h_field(const Grid& g) const {
  if (g.dim != dim) throw std::invalid_argument("multiplier/grid dim mismatch");
  Field out(g);
  const std::int64_t np = g.npoints();
  for (int c = 0; c < dim; ++c) {
    double* dst = out.comp(c).data();
    kernels::parallel_for(np, [&, c, dst](std::int64_t i) {
      std::array<double, 3> h{};
      eval(g.point(i), &h, nullptr, nullptr);
      dst[i] = h[static_cast<std::size_t>(c)];
    });
  }
  return out;
}

}  // namespace dwlab
