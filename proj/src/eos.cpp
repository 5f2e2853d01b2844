#include "pcp/eos.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "pcp/errors.hpp"

namespace pcp {
namespace {

constexpr double kFdStep = 1e-6;

void require_positive(double p, double rho) {
  if (!(p > 0.0) || !(rho > 0.0) || !std::isfinite(p) || !std::isfinite(rho)) {
    std::ostringstream os;
    os << "EOS evaluated outside p > 0, rho > 0 (p=" << p << ", rho=" << rho << ")";
    throw DomainError(os.str());
  }
}

/// Segment index i with x[i] <= v <= x[i+1] and the local coordinate t.
/// Returns false when v falls outside [x.front(), x.back()].
bool locate(const std::vector<double> &x, double v, std::size_t &i, double &t) {
  const double lo = x.front();
  const double hi = x.back();
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (v < lo - slack || v > hi + slack) return false;
  v = std::clamp(v, lo, hi);
  auto it = std::upper_bound(x.begin(), x.end(), v);
  std::size_t k = static_cast<std::size_t>(it - x.begin());
  i = k == 0 ? 0 : std::min(k - 1, x.size() - 2);
  t = (v - x[i]) / (x[i + 1] - x[i]);
  return true;
}

// Interpolation in (ln p, ln rho).  The table is preprocessed once into log
// coordinates; the raw EnthalpyTable is kept for round-tripping to disk.
struct LogTable {
  std::vector<double> lp;
  std::vector<double> lr;
};

LogTable logs_of(const EnthalpyTable &t) {
  LogTable out;
  out.lp.reserve(t.p.size());
  out.lr.reserve(t.rho.size());
  for (double v : t.p) out.lp.push_back(std::log(v));
  for (double v : t.rho) out.lr.push_back(std::log(v));
  return out;
}

double table_enthalpy(const EnthalpyTable &t, double p, double rho) {
  const LogTable g = logs_of(t);
  std::size_t i = 0;
  std::size_t j = 0;
  double tx = 0.0;
  double ty = 0.0;
  if (!locate(g.lp, std::log(p), i, tx) || !locate(g.lr, std::log(rho), j, ty)) {
    std::ostringstream os;
    os << "(p=" << p << ", rho=" << rho << ") outside the enthalpy table";
    throw DomainError(os.str());
  }
  const std::size_t nr = t.rho.size();
  const double h00 = t.h[i * nr + j];
  const double h01 = t.h[i * nr + j + 1];
  const double h10 = t.h[(i + 1) * nr + j];
  const double h11 = t.h[(i + 1) * nr + j + 1];
  return (1 - tx) * ((1 - ty) * h00 + ty * h01) + tx * ((1 - ty) * h10 + ty * h11);
}

double table_pressure(const EnthalpyTable &t, double rho, double h) {
  const LogTable g = logs_of(t);
  std::size_t j = 0;
  double ty = 0.0;
  if (!locate(g.lr, std::log(rho), j, ty)) {
    std::ostringstream os;
    os << "rho=" << rho << " outside the enthalpy table";
    throw DomainError(os.str());
  }
  const std::size_t nr = t.rho.size();
  auto column = [&](std::size_t i) { return (1 - ty) * t.h[i * nr + j] + ty * t.h[i * nr + j + 1]; };
  const std::size_t np = t.p.size();
  double prev = column(0);
  if (h < prev) throw DomainError("enthalpy below the table range at this rho");
  for (std::size_t i = 0; i + 1 < np; ++i) {
    const double next = column(i + 1);
    if (h <= next) {
      if (!(next > prev)) throw ConvergenceError("enthalpy table not increasing in p");
      const double s = (h - prev) / (next - prev);
      return std::exp(g.lp[i] + s * (g.lp[i + 1] - g.lp[i]));
    }
    prev = next;
  }
  throw DomainError("enthalpy above the table range at this rho");
}

/// Centered difference of f at x with relative step, falling back to a
/// one-sided difference at the edge of [lo, hi].
template <class F>
double derivative(F &&f, double x, double lo, double hi) {
  const double dx = kFdStep * x;
  const double a = std::max(lo, x - dx);
  const double b = std::min(hi, x + dx);
  return (f(b) - f(a)) / (b - a);
}

// Radical inverse in the given base; the 2D Halton point for index k uses
// bases 2 and 3.
double radical_inverse(std::size_t k, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// EnthalpyTable

EnthalpyTable EnthalpyTable::read(std::istream &in) {
  std::size_t np = 0;
  std::size_t nr = 0;
  if (!(in >> np >> nr) || np < 2 || nr < 2) {
    throw DomainError("enthalpy table header must be `np nrho` with both >= 2");
  }
  EnthalpyTable t;
  t.p.resize(np);
  t.rho.resize(nr);
  t.h.resize(np * nr);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      double p = 0;
      double r = 0;
      double h = 0;
      if (!(in >> p >> r >> h)) throw DomainError("enthalpy table truncated");
      if (j == 0) t.p[i] = p;
      else if (p != t.p[i]) throw DomainError("enthalpy table is not rectilinear in p");
      if (i == 0) t.rho[j] = r;
      else if (r != t.rho[j]) throw DomainError("enthalpy table is not rectilinear in rho");
      t.h[i * nr + j] = h;
    }
  }
  t.check();
  return t;
}

EnthalpyTable EnthalpyTable::read(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open enthalpy table " + path.string());
  return read(in);
}

void EnthalpyTable::write(std::ostream &out) const {
  out << p.size() << ' ' << rho.size() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < rho.size(); ++j) {
      out << p[i] << ' ' << rho[j] << ' ' << h[i * rho.size() + j] << '\n';
    }
  }
}

void EnthalpyTable::check() const {
  if (p.size() < 2 || rho.size() < 2 || h.size() != p.size() * rho.size()) {
    throw DomainError("enthalpy table has inconsistent shape");
  }
  auto increasing_positive = [](const std::vector<double> &v) {
    if (!(v.front() > 0.0)) return false;
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!increasing_positive(p) || !increasing_positive(rho)) {
    throw DomainError("enthalpy table axes must be positive and strictly increasing");
  }
  for (double v : h) {
    if (!std::isfinite(v)) throw DomainError("enthalpy table contains non-finite values");
    if (!(v > 1.0)) throw DomainError("enthalpy table values must exceed 1");
  }
  const std::size_t nr = rho.size();
  for (std::size_t ir = 0; ir < nr; ++ir) {
    for (std::size_t ip = 1; ip < p.size(); ++ip) {
      if (!(h[ip * nr + ir] > h[(ip - 1) * nr + ir])) {
        throw DomainError("enthalpy must increase strictly with p along every rho column");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// EosModel

EosModel EosModel::ideal(double gamma) {
  if (!(gamma > 1.0 && gamma <= 2.0)) {
    throw DomainError("ideal EOS requires 1 < gamma <= 2");
  }
  EosModel m;
  m.kind_ = EosKind::Ideal;
  m.gamma_ = gamma;
  return m;
}

EosModel EosModel::taub_mathews() {
  EosModel m;
  m.kind_ = EosKind::TaubMathews;
  m.gamma_ = std::numeric_limits<double>::quiet_NaN();
  return m;
}

EosModel EosModel::custom(EnthalpyTable table) {
  table.check();
  EosModel m;
  m.kind_ = EosKind::Custom;
  m.gamma_ = std::numeric_limits<double>::quiet_NaN();
  m.table_ = std::make_shared<const EnthalpyTable>(std::move(table));
  return m;
}

std::string EosModel::name() const {
  switch (kind_) {
    case EosKind::Ideal: {
      std::ostringstream os;
      os << "ideal(gamma=" << gamma_ << ")";
      return os.str();
    }
    case EosKind::TaubMathews:
      return "taub-mathews";
    case EosKind::Custom:
      return "custom";
  }
  return "unknown";
}

double EosModel::enthalpy(double p, double rho) const {
  require_positive(p, rho);
  switch (kind_) {
    case EosKind::Ideal:
      return 1.0 + gamma_ * p / ((gamma_ - 1.0) * rho);
    case EosKind::TaubMathews: {
      const double theta = p / rho;
      return 2.5 * theta + 1.5 * std::sqrt(theta * theta + 4.0 / 9.0);
    }
    case EosKind::Custom:
      return table_enthalpy(*table_, p, rho);
  }
  return 0.0;
}

double EosModel::pressure(double rho, double h) const {
  if (!(rho > 0.0) || !(h > 1.0) || !std::isfinite(rho) || !std::isfinite(h)) {
    std::ostringstream os;
    os << "inverse EOS requires rho > 0 and h > 1 (rho=" << rho << ", h=" << h << ")";
    throw DomainError(os.str());
  }
  switch (kind_) {
    case EosKind::Ideal:
      return (gamma_ - 1.0) / gamma_ * rho * (h - 1.0);
    case EosKind::TaubMathews:
      // Smaller root of 4 Theta^2 - 5 h Theta + h^2 - 1 = 0, written without
      // the cancellation of (5h - sqrt(9h^2 + 16)) / 8 near h = 1.
      return rho * 2.0 * (h - 1.0) * (h + 1.0) / (5.0 * h + std::sqrt(9.0 * h * h + 16.0));
    case EosKind::Custom:
      return table_pressure(*table_, rho, h);
  }
  return 0.0;
}

double EosModel::dh_dp(double p, double rho) const {
  require_positive(p, rho);
  switch (kind_) {
    case EosKind::Ideal:
      return gamma_ / ((gamma_ - 1.0) * rho);
    case EosKind::TaubMathews: {
      const double theta = p / rho;
      return (2.5 + 1.5 * theta / std::sqrt(theta * theta + 4.0 / 9.0)) / rho;
    }
    case EosKind::Custom:
      return derivative([&](double x) { return enthalpy(x, rho); }, p, p_min(), p_max());
  }
  return 0.0;
}

double EosModel::dh_drho(double p, double rho) const {
  require_positive(p, rho);
  switch (kind_) {
    case EosKind::Ideal:
      return -gamma_ * p / ((gamma_ - 1.0) * rho * rho);
    case EosKind::TaubMathews: {
      const double theta = p / rho;
      return -(2.5 + 1.5 * theta / std::sqrt(theta * theta + 4.0 / 9.0)) * theta / rho;
    }
    case EosKind::Custom:
      return derivative([&](double x) { return enthalpy(p, x); }, rho, rho_min(), rho_max());
  }
  return 0.0;
}

double EosModel::dp_drho(double rho, double h) const {
  switch (kind_) {
    case EosKind::Ideal:
    case EosKind::TaubMathews:
      return pressure(rho, h) / rho;
    case EosKind::Custom:
      return derivative([&](double x) { return pressure(x, h); }, rho, rho_min(), rho_max());
  }
  return 0.0;
}

double EosModel::dp_dh(double rho, double h) const {
  switch (kind_) {
    case EosKind::Ideal:
      return (gamma_ - 1.0) / gamma_ * rho;
    case EosKind::TaubMathews:
      return rho * (5.0 - 9.0 * h / std::sqrt(9.0 * h * h + 16.0)) / 8.0;
    case EosKind::Custom: {
      const double lo = enthalpy(p_min(), rho);
      const double hi = enthalpy(p_max(), rho);
      return derivative([&](double x) { return pressure(rho, x); }, h, lo, hi);
    }
  }
  return 0.0;
}

double EosModel::p_min() const { return table_ ? table_->p.front() : 0.0; }
double EosModel::p_max() const {
  return table_ ? table_->p.back() : std::numeric_limits<double>::infinity();
}
double EosModel::rho_min() const { return table_ ? table_->rho.front() : 0.0; }
double EosModel::rho_max() const {
  return table_ ? table_->rho.back() : std::numeric_limits<double>::infinity();
}

EosModel mark_validated(const EosModel &eos) {
  EosModel m = eos;
  m.validated_ = true;
  return m;
}

// ---------------------------------------------------------------------------
// Validation

const char *to_string(EosCondition c) {
  switch (c) {
    case EosCondition::Causality:
      return "causality";
    case EosCondition::ThermalExpansion:
      return "thermal-expansion";
    case EosCondition::InverseBound:
      return "inverse-bound";
    case EosCondition::InverseDerivative:
      return "inverse-derivative";
    case EosCondition::ColdLimit:
      return "cold-limit";
  }
  return "unknown";
}

std::size_t ValidationReport::count(EosCondition c) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [c](const EosViolation &v) { return v.condition == c; }));
}

ValidationReport validate_eos(const EosModel &eos, const SampleBox &box, std::size_t n) {
  if (n == 0 || !(box.p_min > 0) || !(box.rho_min > 0) || box.p_max < box.p_min ||
      box.rho_max < box.rho_min) {
    throw DomainError("validate_eos needs n >= 1 and a positive sample box");
  }
  const bool tabulated = eos.kind() == EosKind::Custom;
  // Finite-difference derivatives of a table carry O(step) error.
  const double exact_tol = 1e-12;
  const double deriv_tol = tabulated ? 1e-5 : 1e-12;

  SampleBox b = box;
  if (tabulated) {
    b.p_min = std::max(b.p_min, eos.p_min());
    b.p_max = std::min(b.p_max, eos.p_max());
    b.rho_min = std::max(b.rho_min, eos.rho_min());
    b.rho_max = std::min(b.rho_max, eos.rho_max());
  }
  const double lp0 = std::log(b.p_min);
  const double lp1 = std::log(b.p_max);
  const double lr0 = std::log(b.rho_min);
  const double lr1 = std::log(b.rho_max);

  ValidationReport report;
  report.samples = n;
  auto flag = [&](EosCondition c, double p, double rho, double margin, double tol) {
    if (!(margin >= -tol)) report.violations.push_back({c, p, rho, margin});
  };

  for (std::size_t k = 0; k < n; ++k) {
    const double p = std::exp(lp0 + radical_inverse(k + 1, 2) * (lp1 - lp0));
    const double rho = std::exp(lr0 + radical_inverse(k + 1, 3) * (lr1 - lr0));
    const double theta = p / rho;
    try {
      const double h = eos.enthalpy(p, rho);

      const double bound = std::hypot(1.0, theta) + theta;
      flag(EosCondition::Causality, p, rho, (h - bound) / h, exact_tol);

      const double hp = eos.dh_dp(p, rho);
      const double hr = eos.dh_drho(p, rho);
      const double s1 = std::abs(hr) + h * (1.0 / rho + std::abs(hp));
      const double m1 = std::min(hr - h * (1.0 / rho - hp), -hr) / s1;
      flag(EosCondition::ThermalExpansion, p, rho, m1, deriv_tol);

      const double pinv = eos.pressure(rho, h);
      flag(EosCondition::InverseBound, p, rho, ((h * h - 1.0) * rho / (2.0 * h) - pinv) / p,
           exact_tol);

      const double ph = eos.dp_dh(rho, h);
      const double pr = eos.dp_drho(rho, h);
      const double s2 = std::abs(pr) + h * (ph / rho + 1.0);
      const double m2 = std::min({-pr - h * (ph / rho - 1.0), pr, ph}) / s2;
      flag(EosCondition::InverseDerivative, p, rho, m2, deriv_tol);

      // h - 1 must vanish at least linearly in p/rho near the cold end.
      const double probe = std::max(1e-12 * rho, tabulated ? eos.p_min() : 0.0);
      const double excess = eos.enthalpy(probe, rho) - 1.0;
      const double limit_tol = std::max(1e-6, 100.0 * probe / rho);
      flag(EosCondition::ColdLimit, p, rho, (limit_tol - excess) / limit_tol, 0.0);
    } catch (const Error &) {
      report.violations.push_back({EosCondition::Causality, p, rho,
                                   -std::numeric_limits<double>::infinity()});
    }
  }
  return report;
}

EosModel require_valid(const EosModel &eos, const SampleBox &box, std::size_t n) {
  const ValidationReport r = validate_eos(eos, box, n);
  if (!r.ok()) {
    const EosViolation &v = r.violations.front();
    std::ostringstream os;
    os << "EOS fails " << to_string(v.condition) << " at p=" << v.p << ", rho=" << v.rho
       << " (" << r.violations.size() << " violations in " << r.samples << " samples)";
    throw DomainError(os.str());
  }
  return mark_validated(eos);
}

}  // namespace pcp
