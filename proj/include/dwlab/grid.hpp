#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

// Uniform lattice on [-X, X]^dim with centered finite differences, lattice
// quadrature, Sobolev-type norms and deterministic smooth sample fields.
// All reductions go through the deterministic pairwise kernels, so every
// quantity is independent of the worker-thread count.

namespace dwlab {

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxDerivOrder = 8;
inline constexpr std::int64_t kDefaultMaxPoints = std::int64_t{1} << 24;

struct MultiIndex {
  std::array<int, kMaxDim> a{0, 0, 0};

  int order() const { return a[0] + a[1] + a[2]; }
  int operator[](int axis) const { return a[static_cast<std::size_t>(axis)]; }
  static MultiIndex zero() { return {}; }
  static MultiIndex unit(int axis);
  MultiIndex plus(int axis) const;
  bool operator==(const MultiIndex&) const = default;
  std::string str() const;  // e.g. "(1,0,2)"
};

// All multi-indices with order() <= max_order, sorted by (order, lexicographic).
std::vector<MultiIndex> multi_indices(int dim, int max_order);

struct Grid {
  int dim = 1;            // 1, 2 or 3
  int n = 0;              // nodes per axis; odd, so the origin is a node
  double half_width = 0;  // domain [-half_width, half_width]^dim
  int stencil_order = 4;  // centered finite-difference order: 2 or 4

  double spacing() const { return 2.0 * half_width / (n - 1); }
  std::int64_t npoints() const;
  std::int64_t stride(int axis) const;
  int coord_index(std::int64_t idx, int axis) const;
  double coord(int i) const { return -half_width + i * spacing(); }
  std::array<double, kMaxDim> point(std::int64_t idx) const;
  std::int64_t origin_index() const;
  double cell_volume() const;  // spacing()^dim, the quadrature weight
  int stencil_radius() const { return stencil_order / 2; }
  bool operator==(const Grid&) const = default;
};

// Validates lattice invariants (dim in 1..3, n odd and wide enough for the
// stencil, positive extent, point budget) and returns the grid.
Grid make_grid(int dim, int n, double half_width, int stencil_order = 4,
               std::int64_t max_points = kDefaultMaxPoints);

// A dim-component vector field sampled on a Grid, component-major layout.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g);

  const Grid& grid() const { return grid_; }
  int ncomp() const { return grid_.dim; }
  std::int64_t npoints() const { return grid_.npoints(); }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  std::span<double> comp(int c);
  std::span<const double> comp(int c) const;
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool finite() const;
  void fill(double v);
  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  void add_scaled(const Field& o, double s);  // this += s * o

 private:
  Grid grid_;
  std::vector<double> data_;
};

// Centered finite-difference derivative for one multi-index; values beyond
// the lattice edge count as zero.  Axis factors are composed in a fixed
// order (axis 0 first), so repeated evaluation is bit-reproducible.
Field deriv(const Field& f, const MultiIndex& a);

// Compact Laplacian (3-point / 5-point per axis); the same operator the
// wave stepper uses, self-adjoint w.r.t. the lattice inner product.
Field laplacian(const Field& f);

// Lattice quadrature inner product and norms over all components.
double l2_inner(const Field& f, const Field& g);
double l2_norm_sq(const Field& f);
double lp_norm(const Field& f, double p);  // p >= 1, or +infinity for sup
double sup_norm(const Field& f);

// sum_{|a| <= l} ||D^a f||_2^2
double sobolev_norm_sq(const Field& f, int l);
// sum_j ||d_j f||_{H^l}^2  (each first derivative measured in H^l)
double grad_sobolev_norm_sq(const Field& f, int l);

// (1/2)(||udot||_2^2 + sum_j ||d_j u||_2^2)
double energy_pair(const Field& u, const Field& udot);
// sum_{|a| <= order-1} energy_pair(D^a u, D^a udot)
double higher_energy_pair(const Field& u, const Field& udot, int order);

// Depth-first walk over all derivatives D^a f with |a| <= max_order.
// Each index is produced from its predecessor by a single stencil sweep;
// at most dim+1 intermediate fields are alive at any time.
void for_each_derivative(
    const Field& f, int max_order,
    const std::function<void(const MultiIndex&, const Field&)>& visit);

// Table of all D^a f with |a| <= max_order, in multi_indices() order.
std::vector<Field> derivative_table(const Field& f, int max_order);
int multi_index_position(int dim, const MultiIndex& a);

enum class SampleKind {
  bump,          // polynomial-modulated mollifier, support |x| <= r
  band_limited,  // few random low-frequency modes under a mollifier envelope
  odd_bump,      // odd polynomial times mollifier: f(-x) = -f(x) exactly
  gaussian,      // scale r/5; decays below round-off well inside |x| <= r
  shell,         // annular bump vanishing near the origin, support |x| <= r
  plateau_bump,  // identically 1 on |x| <= r/2, smooth cutoff at |x| = r
};

SampleKind parse_sample_kind(const std::string& name);
std::string sample_kind_name(SampleKind k);

// Deterministic smooth random field: same (grid, seed, kind, radius) gives
// bit-identical output on every platform we target.
Field sample_function(const Grid& g, std::uint64_t seed, SampleKind kind,
                      double support_radius);

// Evaluate an analytic expression on the lattice (test/oracle helper).
Field make_field(const Grid& g,
                 const std::function<double(const std::array<double, kMaxDim>&,
                                            int comp)>& fn);

// Linear interpolation of f at an off-lattice point; throws std::domain_error
// if x lies outside the grid.
double interpolate(const Field& f, int comp,
                   const std::array<double, kMaxDim>& x);

}  // namespace dwlab
