#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gmix/errors.hpp"

namespace gmix {

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// log|exp(a) - exp(b)| without overflow; -inf when equal.
inline double log_abs_diff_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  const double d = std::abs(std::exp(a - m) - std::exp(b - m));
  return d == 0.0 ? -std::numeric_limits<double>::infinity() : m + std::log(d);
}

struct LogQuadOptions {
  double tol = 1e-10;     // relative error target for the (positive) integral
  int max_panels = 50000; // refinement budget before giving up
};

struct LogQuadResult {
  double log_value = -std::numeric_limits<double>::infinity();
  double rel_err = 0.0;  // estimated |I_hat - I| / I, which bounds the log-scale error
  long evaluations = 0;
  int panels = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 pair. Nodes are symmetric about the panel midpoint;
// kGkNodes[0] is the midpoint. Odd-indexed entries of the Kronrod extension
// interleave the 7 Gauss points {0, +-kGkNodes[2], +-kGkNodes[4], +-kGkNodes[6]}.
inline constexpr double kGkNodes[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
inline constexpr double kKronrodW[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double kGaussW[4] = {0.417959183673469, 0.381830050505119, 0.279705391489277,
                                      0.129484966168870};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();  // GK15 estimate
  double log_err = -std::numeric_limits<double>::infinity();    // |GK15 - G7|
  bool refinable = true;
};

template <class LogF>
Panel eval_panel(LogF&& log_f, double a, double b, long& evaluations) {
  Panel panel;
  panel.a = a;
  panel.b = b;
  const double center = 0.5 * (a + b);
  const double halfw = 0.5 * (b - a);
  if (!(halfw > 0.0)) {
    panel.refinable = false;
    return panel;
  }

  double fv[15];
  fv[0] = log_f(center);
  ++evaluations;
  for (int i = 1; i < 8; ++i) {
    const double dx = halfw * kGkNodes[i];
    fv[2 * i - 1] = log_f(center - dx);
    fv[2 * i] = log_f(center + dx);
    evaluations += 2;
  }

  // Two-pass log-sum-exp over the weighted node values.
  double kron_terms[15];
  double gauss_terms[7];
  int gi = 0;
  double mk = -std::numeric_limits<double>::infinity();
  double mg = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 8; ++i) {
    const double lw = std::log(kKronrodW[i]);
    if (i == 0) {
      kron_terms[0] = lw + fv[0];
      mk = std::max(mk, kron_terms[0]);
    } else {
      kron_terms[2 * i - 1] = lw + fv[2 * i - 1];
      kron_terms[2 * i] = lw + fv[2 * i];
      mk = std::max({mk, kron_terms[2 * i - 1], kron_terms[2 * i]});
    }
    if (i % 2 == 0) {
      const double lg = std::log(kGaussW[i / 2]);
      if (i == 0) {
        gauss_terms[gi] = lg + fv[0];
        mg = std::max(mg, gauss_terms[gi]);
        ++gi;
      } else {
        gauss_terms[gi] = lg + fv[2 * i - 1];
        gauss_terms[gi + 1] = lg + fv[2 * i];
        mg = std::max({mg, gauss_terms[gi], gauss_terms[gi + 1]});
        gi += 2;
      }
    }
  }
  const double log_halfw = std::log(halfw);
  if (mk > -std::numeric_limits<double>::infinity()) {
    double sk = 0.0;
    for (double t : kron_terms) sk += std::exp(t - mk);
    panel.log_value = log_halfw + mk + std::log(sk);
  }
  double log_g7 = -std::numeric_limits<double>::infinity();
  if (mg > -std::numeric_limits<double>::infinity()) {
    double sg = 0.0;
    for (int i = 0; i < 7; ++i) sg += std::exp(gauss_terms[i] - mg);
    log_g7 = log_halfw + mg + std::log(sg);
  }
  panel.log_err = log_abs_diff_exp(panel.log_value, log_g7);
  // A panel narrower than a few ulps cannot be split meaningfully.
  if (b - a < 1e-18 + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(center))
    panel.refinable = false;
  return panel;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of exp(log_f) over (lo, hi), carried
/// out entirely in log space so integrands spanning thousands of orders of
/// magnitude are handled exactly as well as O(1) ones. `interior_breaks`
/// seeds the initial partition (endpoints are added automatically); panels
/// are bisected worst-first until the summed error estimate drops below
/// tol * integral.
template <class LogF>
LogQuadResult log_adaptive_gk15(LogF&& log_f, double lo, double hi,
                                std::span<const double> interior_breaks,
                                const LogQuadOptions& opt = {}) {
  if (!(hi > lo)) throw InvalidInput("log_adaptive_gk15 requires hi > lo");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  std::vector<double> edges;
  edges.push_back(lo);
  for (double b : interior_breaks)
    if (b > lo && b < hi) edges.push_back(b);
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  LogQuadResult result;
  std::vector<detail::Panel> panels;
  panels.reserve(edges.size() + 64);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    panels.push_back(detail::eval_panel(log_f, edges[i], edges[i + 1], result.evaluations));

  double log_total = kNegInf;
  double log_err_total = kNegInf;
  while (true) {
    log_total = kNegInf;
    log_err_total = kNegInf;
    double worst = kNegInf;
    for (const auto& p : panels) {
      log_total = log_add_exp(log_total, p.log_value);
      log_err_total = log_add_exp(log_err_total, p.log_err);
      if (p.refinable) worst = std::max(worst, p.log_err);
    }
    const bool converged =
        log_err_total == kNegInf ||
        (log_total > kNegInf && log_err_total <= std::log(opt.tol) + log_total);
    if (converged) break;
    if (worst == kNegInf || static_cast<int>(panels.size()) >= opt.max_panels) {
      const double rel =
          log_total == kNegInf ? 0.0 : std::exp(log_err_total - log_total);
      throw QuadratureFailure(
          "adaptive quadrature did not converge (" + std::to_string(panels.size()) +
              " panels, relative error " + std::to_string(rel) + ")",
          log_total, rel);
    }
    // Split every panel within a factor 8 of the worst error estimate; batch
    // splitting keeps the rescan overhead per refinement low.
    const double cut = worst - std::log(8.0);
    std::vector<detail::Panel> next;
    next.reserve(panels.size() * 2);
    for (const auto& p : panels) {
      if (p.refinable && p.log_err >= cut &&
          static_cast<int>(panels.size() + next.size()) < opt.max_panels) {
        const double mid = 0.5 * (p.a + p.b);
        next.push_back(detail::eval_panel(log_f, p.a, mid, result.evaluations));
        next.push_back(detail::eval_panel(log_f, mid, p.b, result.evaluations));
      } else {
        next.push_back(p);
      }
    }
    panels.swap(next);
  }

  result.log_value = log_total;
  result.rel_err = log_total == kNegInf ? 0.0 : std::exp(log_err_total - log_total);
  result.panels = static_cast<int>(panels.size());
  return result;
}

}  // namespace gmix
