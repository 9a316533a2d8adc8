#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hdlda/estimators.hpp"
#include "hdlda/numerics.hpp"
#include "hdlda/rng.hpp"

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

/// erf by its Maclaurin series in 50-digit arithmetic. Terms peak near
/// exp(z^2), so |z| <= 6 keeps more than 30 correct digits.
inline Big erf_series(const Big& z) {
  const Big z2 = z * z;
  Big term = z;  // (-1)^k z^(2k+1) / k!
  Big sum = z;
  for (int k = 1; k < 2000; ++k) {
    term *= -z2 / k;
    const Big add = term / (2 * k + 1);
    sum += add;
    if (abs(add) < Big("1e-60")) break;
  }
  return sum * 2 / sqrt(boost::math::constants::pi<Big>());
}

/// Phi(x) = (1 + erf(x / sqrt 2)) / 2, for |x| <= 8.
inline double phi(double x) {
  const Big z = Big(x) / sqrt(Big(2));
  return static_cast<double>((1 + erf_series(z)) / 2);
}

/// Upper quantile by bisection on the series Phi.
inline double upper_quantile(double alpha) {
  double lo = -8.0, hi = 8.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (phi(-mid) > alpha) lo = mid; else hi = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

/// Features ranked by |T| nonincreasing, ties by index, flagged last.
inline std::vector<std::size_t> ranking(const hdlda::SplitStats& s) {
  std::vector<std::size_t> order(static_cast<std::size_t>(s.dim()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s.flagged[a] != s.flagged[b]) return !s.flagged[a];
    const double ta = std::abs(s.t_stats[static_cast<Eigen::Index>(a)]);
    const double tb = std::abs(s.t_stats[static_cast<Eigen::Index>(b)]);
    if (ta != tb) return ta > tb;
    return a < b;
  });
  return order;
}

inline std::size_t usable(const hdlda::SplitStats& s) {
  return static_cast<std::size_t>(std::count(s.flagged.begin(), s.flagged.end(), false));
}

inline double abs_t(const hdlda::SplitStats& s, std::size_t i) {
  return std::abs(s.t_stats[static_cast<Eigen::Index>(i)]);
}

/// {unflagged i : |T[i]| >= lambda}, ascending.
inline std::vector<std::size_t> at_least(const hdlda::SplitStats& s, double lambda) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(s.dim()); ++i) {
    if (!s.flagged[i] && abs_t(s, i) >= lambda) out.push_back(i);
  }
  return out;
}

/// Largest k whose ranked |T| clears scale * z(b k / 2p); 0 if none.
inline std::size_t fdr_k(const hdlda::SplitStats& s, double b, double scale) {
  const auto order = ranking(s);
  const double p = static_cast<double>(s.dim());
  std::size_t best = 0;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    if (s.flagged[order[k - 1]]) continue;
    const double z = hdlda::upper_quantile(b * static_cast<double>(k) / (2.0 * p));
    if (abs_t(s, order[k - 1]) >= scale * z) best = k;
  }
  return best;
}

/// Argmax over m of the FAIR functional, evaluated from scratch for every m.
inline std::size_t fair_m(const hdlda::SplitStats& s) {
  const auto order = ranking(s);
  const std::size_t u = usable(s);
  const double n = static_cast<double>(s.n0 + s.n1);
  const double n0 = static_cast<double>(s.n0), n1 = static_cast<double>(s.n1);
  std::size_t best_m = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m <= u; ++m) {
    double sum = 0.0, maxvar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double t = s.t_stats[static_cast<Eigen::Index>(order[i])];
      const double sg = s.sigma_hat[static_cast<Eigen::Index>(order[i])];
      sum += t * t;
      maxvar = std::max(maxvar, sg * sg);
    }
    const double md = static_cast<double>(m);
    const double num = n * std::pow(sum + md * (1.0 / n1 - 1.0 / n0), 2);
    const double value = num / (md * n1 * n0 + n1 * n0 * sum) / maxvar;
    if (value > best) {
      best = value;
      best_m = m;
    }
  }
  return best_m;
}

/// Argmax over 1 <= k <= min(floor(pq), p - 1) of (k/p - pi_(k)) / sqrt(k(p-k)).
inline std::size_t hc_k(const hdlda::SplitStats& s, double q) {
  const auto order = ranking(s);
  const std::size_t p = order.size();
  std::size_t last = 0;
  while (last + 1 <= p && static_cast<double>(last + 1) <= static_cast<double>(p) * q * (1.0 + 1e-12)) ++last;
  last = std::min(last, p - 1);
  std::size_t best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= last; ++k) {
    const double pi = 2.0 * (1.0 - phi(abs_t(s, order[k - 1])));
    const double kd = static_cast<double>(k), pd = static_cast<double>(p);
    const double value = (kd / pd - pi) / std::sqrt(kd * (pd - kd));
    if (value > best) {
      best = value;
      best_k = k;
    }
  }
  return best_k;
}

/// Statistics with the given T and sigma; zero sigma marks a flagged feature.
/// Counts describe an unsplit sample, so part B equals the whole sample.
inline hdlda::SplitStats stats_from(const Eigen::VectorXd& t, const Eigen::VectorXd& sigma, std::size_t n0,
                                    std::size_t n1) {
  hdlda::SplitStats s;
  const Eigen::Index p = t.size();
  s.s_hat = Eigen::VectorXd::Zero(p);
  s.sigma_hat = sigma;
  s.t_stats = t;
  s.m_bar = t.cwiseProduct(sigma);
  s.flagged.assign(static_cast<std::size_t>(p), false);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (sigma[i] == 0.0) {
      s.flagged[static_cast<std::size_t>(i)] = true;
      s.t_stats[i] = 0.0;
      s.m_bar[i] = 0.0;
    }
  }
  s.n0 = s.na0 = s.nb0 = n0;
  s.n1 = s.na1 = s.nb1 = n1;
  return s;
}

/// Random selector instance with p <= 20: a few strong features among
/// gaussian noise on the 1/sqrt(n) scale, an occasional flagged feature and
/// unbalanced classes.
inline hdlda::SplitStats random_stats(hdlda::RngStream& rng) {
  const auto p = static_cast<Eigen::Index>(2 + rng.engine()() % 19);
  const std::size_t n0 = 5 + rng.engine()() % 40;
  const std::size_t n1 = 5 + rng.engine()() % 40;
  const double scale = std::sqrt(1.0 / static_cast<double>(n0) + 1.0 / static_cast<double>(n1));
  Eigen::VectorXd t(p), sigma(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double signal = rng.uniform() < 0.25 ? (2.0 + 6.0 * rng.uniform()) * scale : 0.0;
    t[i] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * signal + scale * rng.normal();
    sigma[i] = rng.uniform() < 0.05 ? 0.0 : 0.2 + 3.0 * rng.uniform();
  }
  return stats_from(t, sigma, n0, n1);
}

}  // namespace oracle
