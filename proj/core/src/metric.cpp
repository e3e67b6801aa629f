#include "leastgrad/metric.hpp"

#include <algorithm>
#include <cmath>

#include "leastgrad/rng.hpp"

namespace lg {

namespace {

void check_weight(const ScalarField& a, double alpha) {
  if (!a.grid) throw std::invalid_argument("metric: weight field has no grid");
  if (!(alpha > 0.0)) throw std::invalid_argument("metric: alpha must be positive");
  const Grid& g = *a.grid;
  for (int c = 0; c < g.cell_count(); ++c) {
    if (!g.mask[c]) continue;
    if (!std::isfinite(a[c]) || a[c] < alpha)
      throw std::invalid_argument("metric: weight must satisfy a(x) >= alpha > 0");
  }
}

struct Eigen2 {
  double l1, l2;    // eigenvalues, l1 >= l2
  double c, s;      // first eigenvector (c, s), second (-s, c)
};

Eigen2 eig_sym2(double s11, double s12, double s22) {
  Eigen2 e{};
  const double tr = s11 + s22;
  const double diff = s11 - s22;
  const double disc = std::sqrt(diff * diff + 4.0 * s12 * s12);
  e.l1 = 0.5 * (tr + disc);
  e.l2 = 0.5 * (tr - disc);
  if (std::abs(s12) < 1e-300) {
    if (s11 >= s22) {
      e.c = 1.0; e.s = 0.0;
    } else {
      e.c = 0.0; e.s = 1.0;
    }
  } else {
    // (s11 - l1) vx + s12 vy = 0
    double vx = s12, vy = e.l1 - s11;
    const double n = std::sqrt(vx * vx + vy * vy);
    e.c = vx / n;
    e.s = vy / n;
  }
  return e;
}

}  // namespace

FinslerMetric make_isotropic_metric(ScalarField a, double alpha) {
  check_weight(a, alpha);
  FinslerMetric m;
  m.kind = FinslerMetric::Kind::WeightedIsotropic;
  m.a = std::move(a);
  m.alpha = alpha;
  return m;
}

FinslerMetric make_riemannian_metric(ScalarField a, std::vector<double> s11,
                                     std::vector<double> s12, std::vector<double> s22,
                                     double alpha) {
  check_weight(a, alpha);
  const Grid& g = *a.grid;
  const auto n = static_cast<std::size_t>(g.cell_count());
  if (s11.size() != n || s12.size() != n || s22.size() != n)
    throw std::invalid_argument("metric: sigma0 component fields must match the grid");
  for (int c = 0; c < g.cell_count(); ++c) {
    if (!g.mask[c]) continue;
    const double det = s11[c] * s22[c] - s12[c] * s12[c];
    if (!(s11[c] > 0.0) || !(det > 0.0))
      throw std::invalid_argument("metric: sigma0 must be symmetric positive definite");
  }
  FinslerMetric m;
  m.kind = FinslerMetric::Kind::Riemannian;
  m.a = std::move(a);
  m.s11 = std::move(s11);
  m.s12 = std::move(s12);
  m.s22 = std::move(s22);
  m.alpha = alpha;
  return m;
}

double metric_eval(const FinslerMetric& m, int cell, const Vec2& xi) {
  if (m.kind == FinslerMetric::Kind::WeightedIsotropic)
    return m.a[cell] * std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]);
  const double q = m.s11[cell] * xi[0] * xi[0] + 2.0 * m.s12[cell] * xi[0] * xi[1] +
                   m.s22[cell] * xi[1] * xi[1];
  return m.a[cell] * std::sqrt(std::max(q, 0.0));
}

double metric_dual_eval(const FinslerMetric& m, int cell, const Vec2& p) {
  if (m.kind == FinslerMetric::Kind::WeightedIsotropic)
    return std::sqrt(p[0] * p[0] + p[1] * p[1]) / m.a[cell];
  const double det = m.s11[cell] * m.s22[cell] - m.s12[cell] * m.s12[cell];
  const double q =
      (m.s22[cell] * p[0] * p[0] - 2.0 * m.s12[cell] * p[0] * p[1] + m.s11[cell] * p[1] * p[1]) /
      det;
  return std::sqrt(std::max(q, 0.0)) / m.a[cell];
}

Vec2 project_dual_ball(const FinslerMetric& m, int cell, const Vec2& p) {
  if (m.kind == FinslerMetric::Kind::WeightedIsotropic) {
    const double r = std::sqrt(p[0] * p[0] + p[1] * p[1]);
    const double a = m.a[cell];
    if (r <= a) return p;
    const double scale = a / r;
    return {p[0] * scale, p[1] * scale};
  }

  // Dual ball is the ellipse { q : q^T sigma0^{-1} q <= a^2 } with semi-axes
  // a*sqrt(lambda_i) along the eigenvectors of sigma0.
  if (metric_dual_eval(m, cell, p) <= 1.0 + 1e-12) return p;
  const Eigen2 e = eig_sym2(m.s11[cell], m.s12[cell], m.s22[cell]);
  const double a = m.a[cell];
  const double b1 = a * a * e.l1;  // semi-axis squared
  const double b2 = a * a * e.l2;
  const double p1 = e.c * p[0] + e.s * p[1];
  const double p2 = -e.s * p[0] + e.c * p[1];

  // Root of f(mu) = b1 p1^2/(b1+mu)^2 + b2 p2^2/(b2+mu)^2 - 1, mu > 0.
  auto f = [&](double mu) {
    const double t1 = p1 / (b1 + mu);
    const double t2 = p2 / (b2 + mu);
    return b1 * t1 * t1 + b2 * t2 * t2 - 1.0;
  };
  double lo = 0.0;
  double hi = std::sqrt(b1 * p1 * p1 + b2 * p2 * p2) + 1.0;
  while (f(hi) > 0.0) hi *= 2.0;
  double mu = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fv = f(mu);
    if (fv > 0.0)
      lo = mu;
    else
      hi = mu;
    // Newton step with bisection fallback.
    const double t1 = p1 / (b1 + mu), t2 = p2 / (b2 + mu);
    const double df = -2.0 * (b1 * t1 * t1 / (b1 + mu) + b2 * t2 * t2 / (b2 + mu));
    double next = mu - fv / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(fv) <= 1e-15 || hi - lo <= 1e-14 * (1.0 + mu)) break;
    mu = next;
  }
  const double q1 = b1 * p1 / (b1 + mu);
  const double q2 = b2 * p2 / (b2 + mu);
  return {e.c * q1 - e.s * q2, e.s * q1 + e.c * q2};
}

ConditionReport check_conditions(const FinslerMetric& m, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("check_conditions: sample_count must be >= 1");
  const Grid& g = *m.grid();
  std::vector<int> cells;
  for (int c = 0; c < g.cell_count(); ++c)
    if (g.mask[c]) cells.push_back(c);

  Rng rng(seed);
  ConditionReport rep;
  rep.samples = sample_count;
  rep.c1_lower_margin = rep.c1_upper_margin = 1e300;
  rep.c3_min_curvature = 1e300;
  const double eps = 1e-4;

  for (int s = 0; s < sample_count; ++s) {
    const int cell = cells[static_cast<std::size_t>(rng.uniform_int(0, (int)cells.size() - 1))];
    const double ang = rng.uniform(0.0, 6.283185307179586);
    const double mag = std::exp(rng.uniform(-2.0, 2.0));
    const Vec2 xi{mag * std::cos(ang), mag * std::sin(ang)};
    const double nxi = mag;
    const double phi = metric_eval(m, cell, xi);

    rep.c1_lower_margin = std::min(rep.c1_lower_margin, (phi - m.alpha * nxi) / (1.0 + nxi));
    rep.c1_upper_margin = std::min(rep.c1_upper_margin, (nxi / m.alpha - phi) / (1.0 + nxi));

    const Vec2 xi2{2.0 * xi[0], 2.0 * xi[1]};
    const double hres = std::abs(metric_eval(m, cell, xi2) - 2.0 * phi) / (1.0 + 2.0 * phi);
    rep.homogeneity_residual = std::max(rep.homogeneity_residual, hres);

    const double ang2 = rng.uniform(0.0, 6.283185307179586);
    const double mag2 = std::exp(rng.uniform(-2.0, 2.0));
    const Vec2 eta{mag2 * std::cos(ang2), mag2 * std::sin(ang2)};
    const Vec2 sum{xi[0] + eta[0], xi[1] + eta[1]};
    const double tv = (metric_eval(m, cell, sum) - phi - metric_eval(m, cell, eta)) /
                      (1.0 + phi + metric_eval(m, cell, eta));
    rep.triangle_violation = std::max(rep.triangle_violation, std::max(tv, 0.0));

    // C3: tangential second difference on the unit sphere.
    const Vec2 hat{xi[0] / nxi, xi[1] / nxi};
    const Vec2 tan{-hat[1], hat[0]};
    const Vec2 xp{hat[0] + eps * tan[0], hat[1] + eps * tan[1]};
    const Vec2 xm{hat[0] - eps * tan[0], hat[1] - eps * tan[1]};
    const double curv =
        (metric_eval(m, cell, xp) - 2.0 * metric_eval(m, cell, hat) + metric_eval(m, cell, xm)) /
        (eps * eps);
    rep.c3_min_curvature = std::min(rep.c3_min_curvature, curv);
  }

  rep.c1_ok = rep.c1_lower_margin >= -1e-12 && rep.c1_upper_margin >= -1e-12;
  rep.homogeneity_ok = rep.homogeneity_residual <= 1e-12;
  rep.triangle_ok = rep.triangle_violation <= 1e-12;
  rep.c3_ok = rep.c3_min_curvature > 0.0;
  return rep;
}

}  // namespace lg
