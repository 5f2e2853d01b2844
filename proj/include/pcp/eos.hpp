#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace pcp {

enum class EosKind { Ideal, TaubMathews, Custom };

/// Specific enthalpy sampled on a rectilinear (p, rho) grid.
///
/// Values are stored row-major in p: h[ip * rho.size() + ir].  Interpolation is
/// bilinear in (ln p, ln rho), so along a line of constant rho the table is
/// piecewise linear in ln p and can be inverted exactly.
struct EnthalpyTable {
  std::vector<double> p;
  std::vector<double> rho;
  std::vector<double> h;

  /// ASCII format: header `np nrho`, then np*nrho rows `p rho h`, row-major in p.
  static EnthalpyTable read(std::istream &in);
  static EnthalpyTable read(const std::filesystem::path &path);
  void write(std::ostream &out) const;

  /// Checks shape, positivity and monotonicity; throws DomainError.
  void check() const;
};

/// Equation of state h = h(p, rho) together with its inverse p = p(rho, h).
///
/// Immutable value type; copies share any tabulated data.
class EosModel {
 public:
  /// Ideal gas h = 1 + gamma p / ((gamma - 1) rho), gamma in (1, 2].
  static EosModel ideal(double gamma);
  /// Taub-Mathews: h = 5/2 Theta + 3/2 sqrt(Theta^2 + 4/9), Theta = p / rho.
  static EosModel taub_mathews();
  /// Tabulated enthalpy.  Not usable by the solver until validated.
  static EosModel custom(EnthalpyTable table);

  EosKind kind() const noexcept { return kind_; }
  double gamma() const noexcept { return gamma_; }
  const EnthalpyTable *table() const noexcept { return table_.get(); }
  std::string name() const;

  /// True for analytic models and for tables that passed validation.
  bool usable_by_solver() const noexcept { return kind_ != EosKind::Custom || validated_; }

  double enthalpy(double p, double rho) const;
  double pressure(double rho, double h) const;

  double dh_dp(double p, double rho) const;
  double dh_drho(double p, double rho) const;
  double dp_drho(double rho, double h) const;
  double dp_dh(double rho, double h) const;

  /// Table bounds in p and rho (infinite range for analytic models).
  double p_min() const;
  double p_max() const;
  double rho_min() const;
  double rho_max() const;

 private:
  friend EosModel mark_validated(const EosModel &eos);

  EosKind kind_ = EosKind::Ideal;
  double gamma_ = 5.0 / 3.0;
  bool validated_ = false;
  std::shared_ptr<const EnthalpyTable> table_;
};

/// Copy of eos flagged as usable by the solver.  Callers normally go through
/// require_valid instead.
EosModel mark_validated(const EosModel &eos);

inline double enthalpy(const EosModel &eos, double p, double rho) { return eos.enthalpy(p, rho); }
inline double pressure_from_rho_h(const EosModel &eos, double rho, double h) {
  return eos.pressure(rho, h);
}

enum class EosCondition {
  Causality,          ///< h >= sqrt(1 + p^2/rho^2) + p/rho
  ThermalExpansion,   ///< h (1/rho - h_p) < h_rho < 0
  InverseBound,       ///< p(rho, h) <= (h^2 - 1) rho / (2h)
  InverseDerivative,  ///< h (p_h / rho - 1) < -p_rho < 0 and p_h > 0
  ColdLimit,          ///< h -> 1 as p -> 0+
};

const char *to_string(EosCondition c);

struct EosViolation {
  EosCondition condition;
  double p;
  double rho;
  /// Normalized slack of the inequality; negative means violated.
  double margin;
};

struct ValidationReport {
  std::size_t samples = 0;
  std::vector<EosViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(EosCondition c) const;
};

/// Rectangle in (p, rho) space sampled log-uniformly.
struct SampleBox {
  double p_min = 1e-8;
  double p_max = 1e3;
  double rho_min = 1e-8;
  double rho_max = 1e3;
};

/// Samples the box on a 2D Halton sequence in log space and checks every
/// admissibility condition at each sample.
ValidationReport validate_eos(const EosModel &eos, const SampleBox &box, std::size_t n);

/// Runs validate_eos and returns a solver-usable copy; throws DomainError with
/// the first violation otherwise.
EosModel require_valid(const EosModel &eos, const SampleBox &box, std::size_t n);

}  // namespace pcp
