#pragma once

// Functions on [0,1] with values in the lattice X = l^q(d), their mixed norms,
// the operators T and T*. The dyadic Calderon-Zygmund decomposition lives here too.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpw/decomposition.hpp"
#include "lpw/walsh.hpp"

namespace lpw {

/// (sum |x_i|^q)^(1/q), or max |x_i| for q = infinity.
double lattice_norm(std::span<const double> coords, double q);

void require_lattice_exponent(double q);

class LatticePoint {
 public:
  LatticePoint(std::vector<double> coords, double q);

  std::size_t dim() const noexcept { return coords_.size(); }
  double q() const noexcept { return q_; }
  std::span<const double> coords() const noexcept { return coords_; }
  double norm() const { return lattice_norm(coords_, q_); }

 private:
  std::vector<double> coords_;
  double q_;
};

/// Cell-major storage: values[cell * dim + coordinate].
class LatticeFunction {
 public:
  LatticeFunction(unsigned resolution, std::size_t dim, double q);
  LatticeFunction(unsigned resolution, std::size_t dim, double q, std::vector<double> values);

  static LatticeFunction from_coordinates(std::span<const DyadicFunction> coords, double q);

  unsigned resolution() const noexcept { return resolution_; }
  std::size_t dim() const noexcept { return dim_; }
  double q() const noexcept { return q_; }
  std::size_t cells() const noexcept { return std::size_t{1} << resolution_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> cell(std::size_t j) const noexcept {
    return std::span<const double>(values_).subspan(j * dim_, dim_);
  }

  DyadicFunction coordinate(std::size_t c) const;
  std::vector<DyadicFunction> coordinates() const;
  /// x -> ||F(x)||_X.
  DyadicFunction pointwise_norm() const;

 private:
  unsigned resolution_;
  std::size_t dim_;
  double q_;
  std::vector<double> values_;
};

void require_compatible(const LatticeFunction& f, const LatticeFunction& g);
LatticeFunction operator+(const LatticeFunction& f, const LatticeFunction& g);
LatticeFunction operator-(const LatticeFunction& f, const LatticeFunction& g);

/// (2^-N sum_cells ||F(cell)||_X^p)^(1/p); the cell maximum for p = infinity.
double lp_x_norm(const LatticeFunction& f, double p);

/// ||(sum_j |x_j|^2)^(1/2)||_X with the square sum taken coordinatewise.
double x_l2_norm(std::span<const LatticePoint> xs);

/// sum_s eps_s x_s with x_s in l^q(d); coefficients stored component-major.
class RadElement {
 public:
  RadElement(std::size_t dim, double q) : dim_(dim), q_(q) {}
  RadElement(std::span<const LatticePoint> components);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coeffs_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  double q() const noexcept { return q_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<const double> component(std::size_t s) const noexcept {
    return std::span<const double>(coeffs_).subspan(s * dim_, dim_);
  }
  void push_back(std::span<const double> coords);

 private:
  std::size_t dim_;
  double q_;
  std::vector<double> coeffs_;
};

inline constexpr std::size_t kMaxExactSigns = 20;

struct RadMode {
  enum class Kind { exact, montecarlo };
  Kind kind = Kind::exact;
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  static RadMode exact() { return {}; }
  static RadMode montecarlo(std::size_t samples, std::uint64_t seed) {
    return {Kind::montecarlo, samples, seed};
  }
  /// "exact" or "mc:M".
  static RadMode parse(const std::string& text, std::uint64_t seed);
  std::string to_string() const;
};

/// (E ||sum_s eps_s x_s||_X^p)^(1/p): all 2^S sign vectors, or M seeded draws.
double rad_norm(const RadElement& e, double p, const RadMode& mode);

/// ||sum_s eps_s g_s||_{L^p(Rad X)} with the Rad norm taken at exponent p.
double lp_radx_norm(std::span<const LatticeFunction> components, double p, const RadMode& mode);

/// x -> ||sum_s eps_s g_s(x)||_{Rad X} at exponent p.
DyadicFunction rad_pointwise_norm(std::span<const LatticeFunction> gs, double p, const RadMode& mode);

/// Levels Theta_s together with 0.
std::vector<Level> t_levels(const Decomposition& d);

/// Tf: component s is sum_{j in Theta_s + {0}} Delta_j(w_{a_s} f), coordinatewise.
std::vector<LatticeFunction> apply_t(const LatticeFunction& f,
                                     std::span<const Decomposition> decomps);

/// T*(sum eps_s g_s) = sum_s w_{a_s} sum_{j in Theta_s + {0}} Delta_j g_s.
LatticeFunction apply_t_star(std::span<const LatticeFunction> gs,
                             std::span<const Decomposition> decomps);

/// Maximal dyadic cells Q (levels 0..N) with avg_Q norms > lambda, left to right.
std::vector<DyadicCell> stopping_cells(const DyadicFunction& norms, double lambda);

/// Indicator of e_n: the union of stopping cells of level <= n - 1.
std::vector<char> exceptional_set(std::span<const DyadicCell> cells, unsigned resolution, Level n);

double union_measure(std::span<const DyadicCell> cells);

struct CZResult {
  LatticeFunction good;  // h
  LatticeFunction bad;   // b = g - h
  std::vector<DyadicCell> cells;
  double lambda;
};

/// Stopped-average decomposition at height lambda: h is the average of g on
/// each stopping cell and g elsewhere.
CZResult cz_decompose(const LatticeFunction& g, double lambda);

/// The same construction for a Rad X-valued g = sum_s eps_s g_s, stopping on
/// the Rad norm at exponent p.
struct CZRadResult {
  std::vector<LatticeFunction> good;
  std::vector<LatticeFunction> bad;
  std::vector<DyadicCell> cells;
  double lambda;
};
CZRadResult cz_decompose_rad(std::span<const LatticeFunction> gs, double lambda, double p,
                             const RadMode& mode);

struct NamedCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool passed = true;
};

struct CZReport {
  bool passed = true;
  /// [0,1) itself stopped, i.e. lambda < ||g||_1; h is then the constant mean.
  bool root_stopped = false;
  std::vector<NamedCheck> checks;
};

/// Checks g = b + h, ||h||_inf <= 2 lambda, ||h||_1 <= ||g||_1, int b = 0,
/// Delta_n b = 1_{e_n} Delta_n b and |U e_n| <= ||g||_1 / lambda.
CZReport check_cz(const LatticeFunction& g, const CZResult& r);

}  // namespace lpw
