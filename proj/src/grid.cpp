#include "dwlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "dwlab/kernels.hpp"

namespace dwlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_axis(const MultiIndex& a) {
  for (int j = 0; j < kMaxDim; ++j)
    if (a[j] < 0) throw std::invalid_argument("multi-index entries must be >= 0");
}

// Quintic smoothstep: C^2 monotone ramp from q(0)=0 to q(1)=1.
double q5(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// Classic mollifier profile on [0,1): psi(0)=1, vanishes identically at rho>=1.
double mollifier(double rho) {
  const double r2 = rho * rho;
  if (r2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r2));
}

struct StencilSpec {
  std::array<double, 5> w{};
  int radius = 0;
};

StencilSpec first_deriv_stencil(int order) {
  StencilSpec s;
  if (order == 2) {
    s.radius = 1;
    s.w = {-0.5, 0.0, 0.5, 0.0, 0.0};
  } else {
    s.radius = 2;
    s.w = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
  }
  return s;
}

StencilSpec second_deriv_stencil(int order) {
  StencilSpec s;
  if (order == 2) {
    s.radius = 1;
    s.w = {1.0, -2.0, 1.0, 0.0, 0.0};
  } else {
    s.radius = 2;
    s.w = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
  }
  return s;
}

Field apply_axis_first_deriv(const Field& f, int axis) {
  const Grid& g = f.grid();
  Field out(g);
  const StencilSpec s = first_deriv_stencil(g.stencil_order);
  const double scale = 1.0 / g.spacing();
  for (int c = 0; c < f.ncomp(); ++c)
    kernels::axis_stencil(f.comp(c).data(), out.comp(c).data(), g.npoints(),
                          g.n, g.stride(axis), s.w.data(), s.radius, scale,
                          false);
  return out;
}

// Portable deterministic uniform draw in [-1, 1).
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : eng_(seed) {}
  double sym() { return unit() * 2.0 - 1.0; }
  double unit() {
    return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace

MultiIndex MultiIndex::unit(int axis) {
  MultiIndex m;
  m.a[static_cast<std::size_t>(axis)] = 1;
  return m;
}

MultiIndex MultiIndex::plus(int axis) const {
  MultiIndex m = *this;
  m.a[static_cast<std::size_t>(axis)] += 1;
  return m;
}

std::string MultiIndex::str() const {
  std::string s = "(";
  for (int j = 0; j < kMaxDim; ++j) {
    s += std::to_string(a[static_cast<std::size_t>(j)]);
    s += (j + 1 < kMaxDim) ? "," : ")";
  }
  return s;
}

std::vector<MultiIndex> multi_indices(int dim, int max_order) {
  std::vector<MultiIndex> out;
  for (int ord = 0; ord <= max_order; ++ord) {
    if (dim == 1) {
      MultiIndex m;
      m.a[0] = ord;
      out.push_back(m);
      continue;
    }
    for (int a0 = ord; a0 >= 0; --a0) {
      if (dim == 2) {
        MultiIndex m;
        m.a[0] = a0;
        m.a[1] = ord - a0;
        out.push_back(m);
        continue;
      }
      for (int a1 = ord - a0; a1 >= 0; --a1) {
        MultiIndex m;
        m.a[0] = a0;
        m.a[1] = a1;
        m.a[2] = ord - a0 - a1;
        out.push_back(m);
      }
    }
  }
  return out;
}

int multi_index_position(int dim, const MultiIndex& a) {
  const auto all = multi_indices(dim, a.order());
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] == a) return static_cast<int>(i);
  throw std::invalid_argument("multi-index not representable in dimension");
}

std::int64_t Grid::npoints() const {
  std::int64_t p = 1;
  for (int j = 0; j < dim; ++j) p *= n;
  return p;
}

std::int64_t Grid::stride(int axis) const {
  std::int64_t s = 1;
  for (int j = 0; j < axis; ++j) s *= n;
  return s;
}

int Grid::coord_index(std::int64_t idx, int axis) const {
  return static_cast<int>((idx / stride(axis)) % n);
}

std::array<double, kMaxDim> Grid::point(std::int64_t idx) const {
  std::array<double, kMaxDim> x{0, 0, 0};
  for (int j = 0; j < dim; ++j) x[static_cast<std::size_t>(j)] = coord(coord_index(idx, j));
  return x;
}

std::int64_t Grid::origin_index() const {
  const std::int64_t mid = (n - 1) / 2;
  std::int64_t idx = 0;
  for (int j = 0; j < dim; ++j) idx += mid * stride(j);
  return idx;
}

double Grid::cell_volume() const {
  double v = 1;
  for (int j = 0; j < dim; ++j) v *= spacing();
  return v;
}

Grid make_grid(int dim, int n, double half_width, int stencil_order,
               std::int64_t max_points) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("grid dim must be 1..3");
  if (stencil_order != 2 && stencil_order != 4)
    throw std::invalid_argument("stencil_order must be 2 or 4");
  if (n % 2 == 0) throw std::invalid_argument("n per axis must be odd");
  const int radius = stencil_order / 2;
  if (n < 4 * radius + 3)
    throw std::invalid_argument("n per axis too small for the stencil");
  if (!(half_width > 0)) throw std::invalid_argument("half_width must be positive");
  Grid g{dim, n, half_width, stencil_order};
  if (g.npoints() > max_points)
    throw std::invalid_argument("grid exceeds the configured point budget");
  return g;
}

Field::Field(const Grid& g)
    : grid_(g),
      data_(static_cast<std::size_t>(g.npoints() * g.dim), 0.0) {}

std::span<double> Field::comp(int c) {
  const std::int64_t np = npoints();
  return {data_.data() + c * np, static_cast<std::size_t>(np)};
}

std::span<const double> Field::comp(int c) const {
  const std::int64_t np = npoints();
  return {data_.data() + c * np, static_cast<std::size_t>(np)};
}

bool Field::finite() const {
  const std::int64_t m = size();
  const double* p = data();
  for (std::int64_t i = 0; i < m; ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

void Field::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Field& Field::operator+=(const Field& o) {
  add_scaled(o, 1.0);
  return *this;
}

Field& Field::operator-=(const Field& o) {
  add_scaled(o, -1.0);
  return *this;
}

Field& Field::operator*=(double s) {
  double* p = data();
  kernels::parallel_for(size(), [=](std::int64_t i) { p[i] *= s; });
  return *this;
}

void Field::add_scaled(const Field& o, double s) {
  if (!(o.grid() == grid_)) throw std::invalid_argument("field grid mismatch");
  double* p = data();
  const double* q = o.data();
  kernels::parallel_for(size(), [=](std::int64_t i) { p[i] += s * q[i]; });
}

Field deriv(const Field& f, const MultiIndex& a) {
  check_axis(a);
  if (a.order() > kMaxDerivOrder)
    throw std::invalid_argument("derivative order exceeds the configured maximum");
  const int dim = f.grid().dim;
  for (int j = dim; j < kMaxDim; ++j)
    if (a[j] > 0)
      throw std::invalid_argument("derivative axis outside grid dimension");
  Field cur = f;
  for (int axis = 0; axis < dim; ++axis)
    for (int k = 0; k < a[axis]; ++k) cur = apply_axis_first_deriv(cur, axis);
  return cur;
}

Field laplacian(const Field& f) {
  const Grid& g = f.grid();
  Field out(g);
  const StencilSpec s = second_deriv_stencil(g.stencil_order);
  const double scale = 1.0 / (g.spacing() * g.spacing());
  for (int c = 0; c < f.ncomp(); ++c)
    for (int axis = 0; axis < g.dim; ++axis)
      kernels::axis_stencil(f.comp(c).data(), out.comp(c).data(), g.npoints(),
                            g.n, g.stride(axis), s.w.data(), s.radius, scale,
                            axis != 0);
  return out;
}

double l2_inner(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("field grid mismatch");
  const double s = kernels::pairwise_dot(f.data(), g.data(), f.size());
  return s * f.grid().cell_volume();
}

double l2_norm_sq(const Field& f) { return l2_inner(f, f); }

double sup_norm(const Field& f) {
  const std::int64_t np = f.npoints();
  const int nc = f.ncomp();
  const double* p = f.data();
  const std::int64_t nb =
      (np + kernels::kReduceBlock - 1) / kernels::kReduceBlock;
  double m2 = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m2)
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::int64_t lo = b * kernels::kReduceBlock;
    const std::int64_t hi = std::min(lo + kernels::kReduceBlock, np);
    double local = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
      double s = 0.0;
      for (int c = 0; c < nc; ++c) {
        const double v = p[c * np + i];
        s += v * v;
      }
      local = std::max(local, s);
    }
    m2 = std::max(m2, local);
  }
  return std::sqrt(m2);
}

double lp_norm(const Field& f, double p) {
  if (p == std::numeric_limits<double>::infinity()) return sup_norm(f);
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
  const std::int64_t np = f.npoints();
  const int nc = f.ncomp();
  const double* d = f.data();
  if (p == 2.0) return std::sqrt(l2_norm_sq(f));
  const double s = kernels::reduce_sum(np, [=](std::int64_t i) {
    double m2 = 0.0;
    for (int c = 0; c < nc; ++c) {
      const double v = d[c * np + i];
      m2 += v * v;
    }
    return std::pow(m2, 0.5 * p);
  });
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

void for_each_derivative(
    const Field& f, int max_order,
    const std::function<void(const MultiIndex&, const Field&)>& visit) {
  if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  if (max_order > kMaxDerivOrder)
    throw std::invalid_argument("derivative order exceeds the configured maximum");
  const int dim = f.grid().dim;
  // Recurse over axes; each index is one sweep away from its predecessor.
  std::function<void(const Field&, MultiIndex, int, int)> walk =
      [&](const Field& cur, MultiIndex a, int axis, int budget) {
        if (axis == dim - 1) {
          visit(a, cur);
          if (budget == 0) return;
          Field b = apply_axis_first_deriv(cur, axis);
          for (int k = 1;; ++k) {
            MultiIndex aa = a;
            aa.a[static_cast<std::size_t>(axis)] += k;
            visit(aa, b);
            if (k == budget) break;
            b = apply_axis_first_deriv(b, axis);
          }
          return;
        }
        walk(cur, a, axis + 1, budget);
        if (budget == 0) return;
        Field b = apply_axis_first_deriv(cur, axis);
        for (int k = 1;; ++k) {
          MultiIndex aa = a;
          aa.a[static_cast<std::size_t>(axis)] = k;
          walk(b, aa, axis + 1, budget - k);
          if (k == budget) break;
          b = apply_axis_first_deriv(b, axis);
        }
      };
  walk(f, MultiIndex::zero(), 0, max_order);
}

std::vector<Field> derivative_table(const Field& f, int max_order) {
  const int dim = f.grid().dim;
  const auto idx = multi_indices(dim, max_order);
  std::vector<Field> table(idx.size());
  for_each_derivative(f, max_order,
                      [&](const MultiIndex& a, const Field& fa) {
                        table[static_cast<std::size_t>(
                            multi_index_position(dim, a))] = fa;
                      });
  return table;
}

double sobolev_norm_sq(const Field& f, int l) {
  double total = 0.0;
  for_each_derivative(f, l, [&](const MultiIndex&, const Field& fa) {
    total += l2_norm_sq(fa);
  });
  return total;
}

double grad_sobolev_norm_sq(const Field& f, int l) {
  double total = 0.0;
  for (int j = 0; j < f.grid().dim; ++j)
    total += sobolev_norm_sq(deriv(f, MultiIndex::unit(j)), l);
  return total;
}

double energy_pair(const Field& u, const Field& udot) {
  double g = 0.0;
  for (int j = 0; j < u.grid().dim; ++j)
    g += l2_norm_sq(deriv(u, MultiIndex::unit(j)));
  return 0.5 * (l2_norm_sq(udot) + g);
}

double higher_energy_pair(const Field& u, const Field& udot, int order) {
  if (order < 1) throw std::invalid_argument("energy order must be >= 1");
  const auto tu = derivative_table(u, order - 1);
  const auto tv = derivative_table(udot, order - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < tu.size(); ++i)
    total += energy_pair(tu[i], tv[i]);
  return total;
}

SampleKind parse_sample_kind(const std::string& name) {
  if (name == "bump") return SampleKind::bump;
  if (name == "band_limited") return SampleKind::band_limited;
  if (name == "odd_bump") return SampleKind::odd_bump;
  if (name == "gaussian") return SampleKind::gaussian;
  if (name == "shell") return SampleKind::shell;
  if (name == "plateau_bump") return SampleKind::plateau_bump;
  throw std::invalid_argument("unknown sample kind: " + name);
}

std::string sample_kind_name(SampleKind k) {
  switch (k) {
    case SampleKind::bump: return "bump";
    case SampleKind::band_limited: return "band_limited";
    case SampleKind::odd_bump: return "odd_bump";
    case SampleKind::gaussian: return "gaussian";
    case SampleKind::shell: return "shell";
    case SampleKind::plateau_bump: return "plateau_bump";
  }
  return "?";
}

Field sample_function(const Grid& g, std::uint64_t seed, SampleKind kind,
                      double support_radius) {
  if (!(support_radius > 0) || support_radius > g.half_width)
    throw std::invalid_argument("support_radius must lie in (0, half_width]");
  const double r = support_radius;
  const int dim = g.dim;
  Draw draw(seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL +
            static_cast<std::uint64_t>(kind));

  // Draw every random coefficient up front so the analytic function is
  // independent of the lattice resolution.
  struct Poly {
    double c0 = 0;
    std::array<double, 3> lin{};
    std::array<double, 6> quad{};   // y0^2, y1^2, y2^2, y0y1, y0y2, y1y2
    std::array<double, 4> cubic{};  // y0^3, y1^3, y2^3, y0*y1*y2
  };
  std::array<Poly, 3> poly;
  for (int c = 0; c < dim; ++c) {
    poly[c].c0 = draw.sym();
    for (auto& v : poly[c].lin) v = draw.sym();
    for (auto& v : poly[c].quad) v = draw.sym();
    for (auto& v : poly[c].cubic) v = draw.sym();
  }
  struct Mode {
    std::array<double, 3> k{};
    std::array<double, 3> amp{};
    std::array<double, 3> phase{};
  };
  std::array<Mode, 4> modes;
  for (auto& m : modes) {
    for (int j = 0; j < dim; ++j) m.k[j] = (1.0 + 5.0 * draw.unit()) / r;
    for (int c = 0; c < dim; ++c) {
      m.amp[c] = draw.sym();
      m.phase[c] = 2.0 * kPi * draw.unit();
    }
  }

  auto even_poly = [&](const Poly& p, const std::array<double, 3>& y) {
    double v = p.c0;
    v += p.quad[0] * y[0] * y[0] + p.quad[1] * y[1] * y[1] +
         p.quad[2] * y[2] * y[2] + p.quad[3] * y[0] * y[1] +
         p.quad[4] * y[0] * y[2] + p.quad[5] * y[1] * y[2];
    return v;
  };
  auto full_poly = [&](const Poly& p, const std::array<double, 3>& y) {
    return even_poly(p, y) + p.lin[0] * y[0] + p.lin[1] * y[1] +
           p.lin[2] * y[2];
  };
  auto odd_poly = [&](const Poly& p, const std::array<double, 3>& y) {
    return p.lin[0] * y[0] + p.lin[1] * y[1] + p.lin[2] * y[2] +
           p.cubic[0] * y[0] * y[0] * y[0] + p.cubic[1] * y[1] * y[1] * y[1] +
           p.cubic[2] * y[2] * y[2] * y[2] + p.cubic[3] * y[0] * y[1] * y[2];
  };

  Field out(g);
  const std::int64_t np = g.npoints();
  for (int c = 0; c < dim; ++c) {
    double* dst = out.comp(c).data();
    kernels::parallel_for(np, [&, c, dst](std::int64_t i) {
      const auto x = g.point(i);
      std::array<double, 3> y{0, 0, 0};
      double rho2 = 0;
      for (int j = 0; j < dim; ++j) {
        y[j] = x[j] / r;
        rho2 += y[j] * y[j];
      }
      const double rho = std::sqrt(rho2);
      double v = 0.0;
      switch (kind) {
        case SampleKind::bump:
          v = full_poly(poly[c], y) * mollifier(rho);
          break;
        case SampleKind::odd_bump:
          v = odd_poly(poly[c], y) * mollifier(rho);
          break;
        case SampleKind::band_limited: {
          double s = 0;
          for (const auto& m : modes) {
            double phase = m.phase[c];
            for (int j = 0; j < dim; ++j) phase += m.k[j] * x[j];
            s += m.amp[c] * std::sin(phase);
          }
          v = s * mollifier(rho);
          break;
        }
        case SampleKind::gaussian:
          v = full_poly(poly[c], y) * std::exp(-25.0 * rho2);
          break;
        case SampleKind::shell:
          v = full_poly(poly[c], y) * mollifier((rho - 0.7) / 0.25);
          break;
        case SampleKind::plateau_bump: {
          double env;
          if (rho <= 0.5)
            env = 1.0;
          else if (rho >= 1.0)
            env = 0.0;
          else
            env = q5((1.0 - rho) / 0.5);
          v = poly[c].c0 * env;
          break;
        }
      }
      dst[i] = v;
    });
  }
  return out;
}

Field make_field(const Grid& g,
                 const std::function<double(const std::array<double, kMaxDim>&,
                                            int comp)>& fn) {
  Field out(g);
  const std::int64_t np = g.npoints();
  for (int c = 0; c < g.dim; ++c) {
    double* dst = out.comp(c).data();
    for (std::int64_t i = 0; i < np; ++i) dst[i] = fn(g.point(i), c);
  }
  return out;
}

double interpolate(const Field& f, int comp,
                   const std::array<double, kMaxDim>& x) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  std::array<int, kMaxDim> base{0, 0, 0};
  std::array<double, kMaxDim> frac{0, 0, 0};
  for (int j = 0; j < g.dim; ++j) {
    const double t = (x[j] + g.half_width) / h;
    if (t < -1e-9 || t > g.n - 1 + 1e-9)
      throw std::domain_error("interpolation point outside the grid");
    double clipped = std::clamp(t, 0.0, static_cast<double>(g.n - 1));
    int i0 = static_cast<int>(std::floor(clipped));
    if (i0 >= g.n - 1) i0 = g.n - 2;
    base[j] = i0;
    frac[j] = clipped - i0;
  }
  const auto data = f.comp(comp);
  double acc = 0.0;
  const int corners = 1 << g.dim;
  for (int m = 0; m < corners; ++m) {
    double w = 1.0;
    std::int64_t idx = 0;
    for (int j = 0; j < g.dim; ++j) {
      const int bit = (m >> j) & 1;
      w *= bit ? frac[j] : 1.0 - frac[j];
      idx += static_cast<std::int64_t>(base[j] + bit) * g.stride(j);
    }
    acc += w * data[static_cast<std::size_t>(idx)];
  }
  return acc;
}

}  // namespace dwlab
