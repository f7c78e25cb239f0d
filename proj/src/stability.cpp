#include "sgad/stability.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "sgad/eigen.hpp"
#include "sgad/errors.hpp"
#include "sgad/gad.hpp"

namespace sgad {

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Stable: return "stable";
    case Classification::Index1Saddle: return "index-1 saddle";
    case Classification::IndexK: return "index-k saddle";
    case Classification::Degenerate: return "degenerate";
  }
  return "?";
}

FixedPointReport classify_fixed_point(const VectorFieldModel& model, std::span<const double> x, double tol,
                                      double classification_tol) {
  FixedPointReport report;
  report.x.assign(x.begin(), x.end());
  report.residual = norm_inf(eval_b(model, x));
  if (report.residual > tol)
    throw NotAFixedPoint("classify_fixed_point: |b(x)|_inf = " + std::to_string(report.residual) +
                         " exceeds tolerance");
  report.eigenvalues = eigenvalues(dense_jacobian(model, x));

  bool degenerate = false;
  for (const auto& l : report.eigenvalues) {
    if (l.real() > classification_tol) ++report.index;
    if (std::abs(l.real()) <= classification_tol) degenerate = true;
  }
  if (degenerate)
    report.classification = Classification::Degenerate;
  else if (report.index == 0)
    report.classification = Classification::Stable;
  else if (report.index == 1)
    report.classification = Classification::Index1Saddle;
  else
    report.classification = Classification::IndexK;
  return report;
}

Vector refine_fixed_point(const VectorFieldModel& model, std::span<const double> x0, double tol,
                          std::size_t max_iters) {
  if (model.dim > kDenseThreshold)
    throw UnsupportedOperation("refine_fixed_point: dim exceeds the dense threshold");
  Vector x(x0.begin(), x0.end());
  for (std::size_t it = 0; it <= max_iters; ++it) {
    const Vector b = eval_b(model, x);
    if (norm_inf(b) <= tol) return x;
    if (it == max_iters) break;
    const Vector step = LuFactor(dense_jacobian(model, x)).solve(b);
    axpy(-1.0, step, x);
    if (!all_finite(x)) throw NumericalBlowup("refine_fixed_point: Newton iterate is not finite", it);
  }
  throw NoConvergence("refine_fixed_point: no convergence after " + std::to_string(max_iters) + " iterations");
}

Matrix gad_extended_jacobian(const VectorFieldModel& model, std::span<const double> x_s,
                             std::span<const double> dir, DirectionForm form, std::optional<double> h) {
  const std::size_t n = model.dim;
  if (x_s.size() != n || dir.size() != n) throw InvalidArgument("gad_extended_jacobian: dimension mismatch");
  const bool transpose = form == DirectionForm::Left;

  Vector y(x_s.begin(), x_s.end());
  y.insert(y.end(), dir.begin(), dir.end());
  const double step = h.value_or(default_fd_step(y));

  auto rhs = [&](const Vector& s) {
    std::span<const double> sp(s);
    Rates r = rhs_simplified_unconstrained(model, sp.subspan(0, n), sp.subspan(n, n), transpose, 1.0);
    Vector out(std::move(r.dx));
    out.insert(out.end(), r.ddir.begin(), r.ddir.end());
    return out;
  };

  Matrix jt(2 * n, 2 * n);
  for (std::size_t c = 0; c < 2 * n; ++c) {
    Vector yp(y), ym(y);
    yp[c] += step;
    ym[c] -= step;
    const Vector fp = rhs(yp);
    const Vector fm = rhs(ym);
    for (std::size_t r = 0; r < 2 * n; ++r) jt(r, c) = (fp[r] - fm[r]) / (2.0 * step);
  }
  return jt;
}

Theorem1Report verify_theorem1_spectrum(const VectorFieldModel& model, std::span<const double> x_s,
                                        DirectionForm form) {
  Theorem1Report report;
  report.model = model.name;
  report.x_s.assign(x_s.begin(), x_s.end());
  report.form = form;
  report.residual = norm_inf(eval_b(model, x_s));

  const Matrix jac = dense_jacobian(model, x_s);
  const auto spectrum = eigenvalues(jac);
  for (const auto& l : spectrum) {
    if (l.imag() != 0.0)
      throw OutsideHypotheses("verify_theorem1_spectrum: Db(x_s) has complex eigenvalues");
    report.eigenvalues.push_back(l.real());
  }
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end());
  const double scale = std::max(1.0, jac.norm_inf());
  for (std::size_t k = 1; k < report.eigenvalues.size(); ++k)
    if (report.eigenvalues[k] - report.eigenvalues[k - 1] <= 1e-8 * scale)
      throw OutsideHypotheses("verify_theorem1_spectrum: Db(x_s) has repeated eigenvalues");

  const Matrix eig_source = form == DirectionForm::Left ? jac.transpose() : jac;
  const std::size_t n = model.dim;
  report.spectrum_verified = true;
  report.stability_consistent = true;

  for (std::size_t i = 0; i < n; ++i) {
    EigenpairCheck pair;
    pair.i = i;
    pair.lambda = report.eigenvalues[i];
    pair.direction = eigenvector(eig_source, pair.lambda);

    const Matrix jt = gad_extended_jacobian(model, x_s, pair.direction, form);
    pair.jtilde_norm_inf = jt.norm_inf();
    pair.check_tol = kSpectrumCheckRelTol * pair.jtilde_norm_inf;

    std::vector<std::pair<std::string, double>> predicted = {{"-2*l_i", -2.0 * pair.lambda},
                                                             {"-l_i", -pair.lambda}};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      predicted.emplace_back("l_j", report.eigenvalues[j]);
      predicted.emplace_back("l_j-l_i", report.eigenvalues[j] - pair.lambda);
    }

    pair.all_pass = true;
    pair.predicted_stable = true;
    for (const auto& [origin, mu] : predicted) {
      Matrix shifted(jt);
      for (std::size_t k = 0; k < 2 * n; ++k) shifted(k, k) -= mu;
      SpectrumProbe probe{origin, mu, smallest_singular_probe(shifted).residual, false};
      probe.pass = probe.residual <= pair.check_tol;
      pair.all_pass = pair.all_pass && probe.pass;
      pair.predicted_stable = pair.predicted_stable && mu < 0.0;
      pair.probes.push_back(probe);
    }
    pair.unique_positive = pair.lambda > 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && report.eigenvalues[j] >= 0.0) pair.unique_positive = false;

    report.spectrum_verified = report.spectrum_verified && pair.all_pass;
    report.stability_consistent = report.stability_consistent && (pair.predicted_stable == pair.unique_positive);
    report.pairs.push_back(std::move(pair));
  }
  return report;
}

std::string Theorem1Report::to_json() const {
  nlohmann::json j;
  j["model"] = model;
  j["x_s"] = x_s;
  j["residual_inf"] = residual;
  j["form"] = form == DirectionForm::Right ? "v" : "w";
  j["eigenvalues"] = eigenvalues;
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : pairs) {
    nlohmann::json jp;
    jp["i"] = p.i;
    jp["lambda"] = p.lambda;
    jp["direction"] = p.direction;
    jp["jtilde_norm_inf"] = p.jtilde_norm_inf;
    jp["check_tol"] = p.check_tol;
    jp["predicted_stable"] = p.predicted_stable;
    jp["unique_positive"] = p.unique_positive;
    jp["pass"] = p.all_pass;
    jp["probes"] = nlohmann::json::array();
    for (const auto& pr : p.probes)
      jp["probes"].push_back({{"origin", pr.origin}, {"mu", pr.predicted}, {"residual", pr.residual}, {"pass", pr.pass}});
    j["pairs"].push_back(std::move(jp));
  }
  j["spectrum_verified"] = spectrum_verified;
  j["stability_consistent"] = stability_consistent;
  j["pass"] = pass();
  return j.dump(2);
}

std::string Theorem1Report::to_text() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "model " << model << " at x_s = (";
  for (std::size_t k = 0; k < x_s.size(); ++k) os << (k ? ", " : "") << x_s[k];
  os << "), |b|_inf = " << residual << ", " << (form == DirectionForm::Right ? "v-form" : "w-form") << "\n";
  os << "eigenvalues of Db:";
  for (double l : eigenvalues) os << ' ' << l;
  os << "\n";
  for (const auto& p : pairs) {
    os << "  pair " << p.i << ": lambda = " << p.lambda << ", tol = " << p.check_tol
       << (p.predicted_stable ? ", linearly stable" : ", unstable")
       << (p.unique_positive ? " (unique positive eigenvalue)" : "") << "\n";
    for (const auto& pr : p.probes)
      os << "    " << std::setw(8) << pr.origin << "  mu = " << std::setw(16) << pr.predicted
         << "  residual = " << std::setw(12) << pr.residual << "  " << (pr.pass ? "pass" : "FAIL") << "\n";
  }
  os << (pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace sgad
