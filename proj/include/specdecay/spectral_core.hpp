#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "specdecay/grid.hpp"
#include "specdecay/kernels.hpp"

namespace specdecay {

/// Lower limit of every radial quadrature that starts at the origin; the
/// mass below it comes from the profile's tail function.
inline constexpr double kRadialFloor = 1e-8;
inline constexpr int kDefaultNodesPerDecade = 64;

/// Surface area of the unit sphere in R^n.
double sphere_area(int n);

struct TailEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// Exact one-dimensional description of a radially structured,
/// divergence-free datum on R^n.
///
/// A(r) is the spherical mean of |u0^(xi)|^2 over |xi| = r, so that
/// ||u0||^2 = |S^{n-1}| int_0^inf A(r) r^{n-1} dr. The profile stores the
/// signed root s(r) with A = s^2; the realized field is
///   u0^(xi) = sqrt(n/2) s(|xi|) e(xi),   e(xi) = (-i xi_2, i xi_1, 0, ..., 0)/|xi|,
/// which is divergence-free since xi . e(xi) = 0. (For n = 2 the prefactor is 1.)
class RadialProfile {
 public:
  using RootFn = std::function<double(double)>;
  /// int_0^r A(rho) rho^{n-1} drho without the sphere factor, for r <= kRadialFloor.
  using TailFn = std::function<TailEstimate(double)>;

  RadialProfile(int dim, RootFn root, TailFn tail, double support_lo, double support_hi,
                std::vector<double> breakpoints, nlohmann::json descriptor,
                int nodes_per_decade = kDefaultNodesPerDecade);

  int dim() const { return dim_; }
  double root(double r) const { return (r < lo_ || r > hi_) ? 0.0 : root_(r); }
  double amplitude(double r) const {
    const double s = root(r);
    return s * s;
  }
  TailEstimate tail(double r) const { return tail_(r); }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  /// Radii where the amplitude may jump; quadrature panels never straddle them.
  const std::vector<double>& breakpoints() const { return breaks_; }
  const nlohmann::json& descriptor() const { return descriptor_; }
  int nodes_per_decade() const { return nodes_per_decade_; }

  const RootFn& root_fn() const { return root_; }
  const TailFn& tail_fn() const { return tail_; }

  RadialProfile with_nodes_per_decade(int nodes) const;
  RadialProfile with_descriptor(nlohmann::json descriptor) const;

 private:
  int dim_;
  RootFn root_;
  TailFn tail_;
  double lo_, hi_;
  std::vector<double> breaks_;
  nlohmann::json descriptor_;
  int nodes_per_decade_;
};

/// Multiplier r^{2 power} e^{-2 t r^2}, optionally times a smooth cutoff.
struct RadialWeight {
  int power = 0;
  double heat_time = 0.0;
  std::function<double(double)> extra;
};

struct QuadratureResult {
  double value = 0.0;
  double tail = 0.0;        // contribution taken from the tail function
  double tail_error = 0.0;  // bound on the error of that contribution
};

/// |S^{n-1}| int_a^b A(r) w(r) r^{n-1} dr with log-spaced composite
/// Gauss-Legendre panels (16 nodes each). Throws QuadratureDivergence when
/// the tail error exceeds rel_tol * |value|.
QuadratureResult radial_integral(const RadialProfile& p, double a, double b, const RadialWeight& w = {},
                                 double rel_tol = 1e-6);

/// Signed-root combination a*f + b*g (same dim); used for differences and scaling.
RadialProfile combine(const RadialProfile& f, double a, const RadialProfile& g, double b);
RadialProfile scaled(const RadialProfile& f, double lambda);

// ---------------------------------------------------------------------------

struct FieldNorms {
  double l2 = 0.0;
  std::array<double, 2> hdot{0.0, 0.0};  // ||D u||, ||D^2 u||
};

using Field = std::variant<RadialProfile, GridField>;

FieldNorms norms(const GridField& f);
FieldNorms norms(const RadialProfile& f);
FieldNorms norms(const Field& f);

/// ||D^l u||^2 for l in {0, 1, 2}.
double sobolev_energy(const GridField& f, int l);
double sobolev_energy(const RadialProfile& f, int l);

/// int_{|xi| <= rho} |u0^|^2 dxi. Grid: sharp lattice ball with cell
/// measure k0^n; throws MassUnresolvable when rho < 2 k0.
double low_freq_mass(const RadialProfile& f, double rho);
double low_freq_mass(const GridField& f, double rho);

/// coeff(k) - k (k . coeff(k)) / |k|^2 for k != 0.
GridField leray_project(const GridField& f);

/// Samples u0^ at the lattice. Each center x_c contributes a copy of the
/// radial field translated to x_c (phase e^{-i k . x_c}); the default is
/// one copy at the origin. Nyquist modes are zeroed.
GridField sample_on_grid(const RadialProfile& f, const Grid& grid,
                         const std::vector<std::array<double, 3>>& centers = {{0.0, 0.0, 0.0}});

// ---------------------------------------------------------------------------
// Serialization.
//
// GridField binary container, little-endian on the writer's side:
//   bytes 0..3   magic "SDGF"
//   u32          format version (1)
//   u32          endianness tag 0x01020304 as written by the producer
//   u32 dim, u32 N, u32 reserved (0)
//   f64          box length L
//   payload      N^dim lattice points in row-major order (last axis fastest),
//                each point dim complex values as (re, im) f64 pairs.
// A reader that sees the tag byte-swapped swaps every field.

void write_grid_field(std::ostream& out, const GridField& f);
GridField read_grid_field(std::istream& in);
void save_grid_field(const std::string& path, const GridField& f);
GridField load_grid_field(const std::string& path);

/// JSON descriptor of a radial profile (kind tag + parameters).
nlohmann::json to_json(const RadialProfile& f);

}  // namespace specdecay
