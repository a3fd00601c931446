#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dwlab/grid.hpp"

// Coefficient families for the dissipative quasilinear wave system
//
//   (d_t^2 - Lap + B(x) d_t) u = N[u,u],
//   N[u,v]^i = sum N^{ijk}_{lmn} d_l( d_m u^j  d_n v^k ),
//
// together with the exact rescaling B_lam(x) = lam * B(lam x) and the radial
// multiplier vector field used by the energy ledger.

namespace dwlab {

// Packed symmetric dim x dim matrix (order: 00, 11, 22, 01, 02, 12).
struct SymMat {
  std::array<double, 6> v{};
  int dim = 1;

  double at(int i, int j) const;
  double& entry(int i, int j);
  void matvec(const double* in, double* out) const;
  double quad(const double* w) const;  // w^T M w
  double op_norm() const;              // largest |eigenvalue|
  SymMat inverse() const;
  static SymMat identity(int dim, double scale = 1.0);
  SymMat plus_identity(double scale) const;  // M + scale*I
  SymMat scaled(double s) const;
};

enum class DampingProfile {
  uniform,            // B(x) = b0 * M everywhere
  radial_step,        // quintic ramp from 0 (|x|<=r0) to b0 (|x|>=R), M = I
  radial_step_aniso,  // same ramp, M = I + eps * dir dir^T
};

DampingProfile parse_damping_profile(const std::string& name);
std::string damping_profile_name(DampingProfile p);

// Analytic damping coefficient.  The base profile carries constants
// (b0, r0, R, eps, dir); `lambda` composes the exact rescaling, so
// eval(x) = lambda * B_base(lambda * x) and every derivative is closed-form.
struct DampingSpec {
  DampingProfile profile = DampingProfile::radial_step;
  int dim = 1;
  double b0 = 1.0;
  double r0 = 0.0;
  double R = 0.0;
  double eps = 0.0;
  std::array<double, 3> dir{1, 0, 0};
  double lambda = 1.0;

  bool is_zero() const { return b0 == 0.0; }
  SymMat eval(const std::array<double, kMaxDim>& x) const;
  SymMat deriv(const std::array<double, kMaxDim>& x, const MultiIndex& b) const;
  DampingSpec rescaled(double lam) const;

  double sup_norm() const;       // ||B_lambda||_inf
  double base_sup_norm() const;  // ||B||_inf of the unrescaled coefficient
  double exterior_floor() const { return lambda * b0; }
  double exterior_radius() const;   // radius beyond which the floor holds
  double dead_zone_radius() const;  // radius below which B_lambda vanishes
};

DampingSpec make_damping(DampingProfile profile, int dim, double b0, double r0,
                         double R, double eps = 0.0,
                         std::array<double, 3> dir = {1, 0, 0});

// Damping coefficient cached on a lattice (packed SymMat per node).
class DampingField {
 public:
  DampingField() = default;
  DampingField(const DampingSpec& spec, const Grid& g);

  const Grid& grid() const { return grid_; }
  SymMat at(std::int64_t idx) const;
  void matvec(const Field& in, Field& out) const;  // out(x) = B(x) in(x)
  double inner(const Field& a, const Field& b) const;  // <a, B b> quadrature
  bool empty() const { return entries_ == 0; }

 private:
  Grid grid_;
  int entries_ = 0;
  std::vector<double> data_;  // entries_ values per node, node-major
};

// Pointwise solve of (I + c * B(x)) w = rhs; the inverse is precomputed.
class ImplicitDampingSolve {
 public:
  ImplicitDampingSolve() = default;
  ImplicitDampingSolve(const DampingSpec& spec, const Grid& g, double c);
  void apply(const Field& rhs, Field& out) const;

 private:
  Grid grid_;
  int entries_ = 0;
  std::vector<double> inv_;  // packed inverse per node
};

// Constant coefficient tensor N^{ijk}_{lmn} of the quasilinear form.
class NonlinearTensor {
 public:
  NonlinearTensor() = default;

  static NonlinearTensor zero(int dim);
  static NonlinearTensor scalar_1d(double c);
  // Entries uniform in [-strength, strength], then symmetrized.
  static NonlinearTensor random_symmetrized(int dim, std::uint64_t seed,
                                            double strength);

  int dim() const { return dim_; }
  bool is_zero() const;
  double max_abs() const;
  double l1_norm() const;  // sum |entries|, used by the CFL monitor
  double at(int i, int j, int k, int l, int m, int n) const;
  double& entry(int i, int j, int k, int l, int m, int n);

  // Average over the six joint permutations of the (upper,lower) slot pairs
  // generated by (i,l)<->(j,m) and (j,m)<->(k,n).  Idempotent.
  NonlinearTensor symmetrized() const;
  bool is_symmetric(double tol = 0.0) const;

 private:
  explicit NonlinearTensor(int dim);
  std::size_t flat(int i, int j, int k, int l, int m, int n) const;
  int dim_ = 0;
  std::vector<double> c_;
};

// N[u,v] on the lattice (centered stencils throughout).
Field nonlinear_term(const NonlinearTensor& N, const Field& u, const Field& v);

// Trilinear quadrature  sum N^{ijk}_{lmn} \int d_l u^i d_m v^j d_n w^k dx.
double trilinear_form(const NonlinearTensor& N, const Field& u, const Field& v,
                      const Field& w);

// Radial multiplier: phi(r) = b0 for r <= R/lambda, b0 R/(lambda r) beyond;
// h(x) = x phi(|x|).  Closed-form Jacobian and divergence.
struct MultiplierSpec {
  double b0 = 1.0;
  double R = 1.0;
  double lambda = 1.0;
  int dim = 1;

  double phi(double r) const;
  double phi_prime(double r) const;  // radial derivative (inside branch: 0)
  void eval(const std::array<double, kMaxDim>& x, std::array<double, 3>* h,
            SymMat* jac, double* div) const;
  double sup_h() const { return b0 * R / lambda; }
  double sup_jac_bound() const { return 2.0 * b0; }
  Field h_field(const Grid& g) const;
};

}  // namespace dwlab
