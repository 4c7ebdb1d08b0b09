#pragma once

// Test-only reference implementations. Nothing here calls into vfsl_core's
// solver or baselines: these exist to check them by an independent route.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace vfsl::oracle {

/// Row-major dense matrix of doubles with explicit dims.
struct Dense {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Dense() = default;
  Dense(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

inline Dense one_hot(const std::vector<std::uint32_t>& labels, std::size_t classes) {
  Dense y(labels.size(), classes);
  for (std::size_t j = 0; j < labels.size(); ++j) y(j, labels[j]) = 1.0;
  return y;
}

/// A^T (A X - Y) + lambda X, i.e. half the gradient of
/// ||Y - A X||_F^2 + lambda ||X||_F^2.
inline Dense ridge_half_gradient(const Dense& a, const Dense& y, const Dense& x, double lambda) {
  Dense resid(a.rows, x.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t c = 0; c < x.cols; ++c) {
      double s = -y(i, c);
      for (std::size_t k = 0; k < a.cols; ++k) s += a(i, k) * x(k, c);
      resid(i, c) = s;
    }
  Dense g(a.cols, x.cols);
  for (std::size_t k = 0; k < a.cols; ++k)
    for (std::size_t c = 0; c < x.cols; ++c) {
      double s = lambda * x(k, c);
      for (std::size_t i = 0; i < a.rows; ++i) s += a(i, k) * resid(i, c);
      g(k, c) = s;
    }
  return g;
}

inline double max_abs(const Dense& m) {
  double out = 0.0;
  for (double x : m.v) out = std::max(out, std::abs(x));
  return out;
}

inline double frobenius(const Dense& m) {
  double s = 0.0;
  for (double x : m.v) s += x * x;
  return std::sqrt(s);
}

/// Largest eigenvalue of A^T A by power iteration (upper estimate).
inline double gram_spectral_norm(const Dense& a) {
  std::vector<double> x(a.cols, 1.0), ax(a.rows), y(a.cols);
  double est = 0.0;
  for (int it = 0; it < 500; ++it) {
    for (std::size_t i = 0; i < a.rows; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += a(i, k) * x[k];
      ax[i] = s;
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < a.cols; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.rows; ++i) s += a(i, k) * ax[i];
      y[k] = s;
      norm += s * s;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    double xnorm = 0.0;
    for (double v : x) xnorm += v * v;
    est = norm / std::sqrt(xnorm);
    for (std::size_t k = 0; k < a.cols; ++k) x[k] = y[k] / norm;
  }
  return est;
}

struct GradientDescentResult {
  Dense w;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
};

/// Minimizes ||Y - L W||_F^2 + lambda ||W||_F^2 by full-batch accelerated
/// gradient descent (Nesterov momentum with adaptive restart), starting from
/// W = 0 and stopping once the Frobenius norm of the gradient drops below
/// `tolerance`. Requires lambda > 0 for a unique minimizer.
inline GradientDescentResult ridge_gradient_descent(const Dense& l, const Dense& y, double lambda,
                                                    double tolerance = 1e-8,
                                                    std::size_t max_iterations = 20'000'000) {
  // Gradient of the full objective is 2 * half_gradient; its Lipschitz
  // constant is 2 * (sigma_max^2 + lambda).
  const double lipschitz = 2.0 * (1.02 * gram_spectral_norm(l) + lambda);
  const double step = 1.0 / lipschitz;

  Dense w(l.cols, y.cols), w_prev = w, z = w;
  double t = 1.0;
  GradientDescentResult out;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Dense gz = ridge_half_gradient(l, y, z, lambda);
    Dense w_next(l.cols, y.cols);
    for (std::size_t i = 0; i < w.v.size(); ++i) w_next.v[i] = z.v[i] - step * 2.0 * gz.v[i];

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    // Restart momentum when it points uphill.
    double dot = 0.0;
    for (std::size_t i = 0; i < w.v.size(); ++i) dot += gz.v[i] * (w_next.v[i] - w.v[i]);
    const double beta = dot > 0.0 ? 0.0 : (t - 1.0) / t_next;
    if (dot > 0.0) t = 1.0;
    else t = t_next;

    w_prev = w;
    w = w_next;
    for (std::size_t i = 0; i < w.v.size(); ++i) z.v[i] = w.v[i] + beta * (w.v[i] - w_prev.v[i]);

    if (it % 16 == 0) {
      Dense g = ridge_half_gradient(l, y, w, lambda);
      const double gnorm = 2.0 * frobenius(g);
      if (gnorm < tolerance) {
        out.w = w;
        out.gradient_norm = gnorm;
        out.iterations = it + 1;
        return out;
      }
    }
  }
  out.w = w;
  out.gradient_norm = 2.0 * frobenius(ridge_half_gradient(l, y, w, lambda));
  out.iterations = max_iterations;
  return out;
}

/// Zero-shot prompt prediction per row: argmax_k, lowest index on ties.
inline std::vector<std::size_t> row_argmax(const Dense& l) {
  std::vector<std::size_t> out(l.rows, 0);
  for (std::size_t i = 0; i < l.rows; ++i) {
    for (std::size_t k = 1; k < l.cols; ++k)
      if (l(i, k) > l(i, out[i])) out[i] = k;
  }
  return out;
}

/// C x K table: shots of class c whose zero-shot prediction is prompt k.
inline std::vector<std::vector<std::size_t>> prediction_counts(
    const Dense& l, const std::vector<std::uint32_t>& labels, std::size_t classes) {
  std::vector<std::vector<std::size_t>> counts(classes, std::vector<std::size_t>(l.cols, 0));
  const auto pred = row_argmax(l);
  for (std::size_t j = 0; j < labels.size(); ++j) ++counts[labels[j]][pred[j]];
  return counts;
}

/// Greedy frequency assignment executed step by step: each step rescans the
/// whole table for the largest count among free classes and free prompts,
/// preferring the lower class, then the lower prompt.
inline std::vector<std::size_t> greedy_assignment(
    const std::vector<std::vector<std::size_t>>& counts, std::size_t prompts) {
  const std::size_t classes = counts.size();
  std::vector<bool> class_taken(classes, false), prompt_taken(prompts, false);
  std::vector<std::size_t> mapping(classes, 0);
  for (std::size_t step = 0; step < classes; ++step) {
    bool found = false;
    std::size_t best_c = 0, best_k = 0, best = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (class_taken[c]) continue;
      for (std::size_t k = 0; k < prompts; ++k) {
        if (prompt_taken[k]) continue;
        if (!found || counts[c][k] > best) {
          found = true;
          best = counts[c][k];
          best_c = c;
          best_k = k;
        }
      }
    }
    class_taken[best_c] = true;
    prompt_taken[best_k] = true;
    mapping[best_c] = best_k;
  }
  return mapping;
}

/// K x C conditional weights (n(k,c) + s) / (n(k,.) + s C), zero when the
/// denominator vanishes.
inline Dense bayesian_weights(const std::vector<std::vector<std::size_t>>& counts,
                              std::size_t prompts, double smoothing) {
  const std::size_t classes = counts.size();
  Dense w(prompts, classes);
  for (std::size_t k = 0; k < prompts; ++k) {
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) total += static_cast<double>(counts[c][k]);
    const double denom = total + smoothing * static_cast<double>(classes);
    for (std::size_t c = 0; c < classes; ++c)
      w(k, c) = denom > 0.0 ? (static_cast<double>(counts[c][k]) + smoothing) / denom : 0.0;
  }
  return w;
}

/// Nearest class mean by cosine similarity, computed from scratch.
inline std::vector<std::uint32_t> nearest_centroid(const Dense& train,
                                                   const std::vector<std::uint32_t>& labels,
                                                   std::size_t classes, const Dense& test) {
  Dense means(classes, train.cols);
  std::vector<double> counts(classes, 0.0);
  for (std::size_t j = 0; j < train.rows; ++j) {
    counts[labels[j]] += 1.0;
    for (std::size_t d = 0; d < train.cols; ++d) means(labels[j], d) += train(j, d);
  }
  std::vector<std::uint32_t> out(test.rows, 0);
  for (std::size_t i = 0; i < test.rows; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes; ++c) {
      double dot = 0.0, mnorm = 0.0, tnorm = 0.0;
      for (std::size_t d = 0; d < train.cols; ++d) {
        const double m = means(c, d) / counts[c];
        dot += m * test(i, d);
        mnorm += m * m;
        tnorm += test(i, d) * test(i, d);
      }
      const double cosine = dot / std::sqrt(mnorm * tnorm);
      if (cosine > best) {
        best = cosine;
        out[i] = static_cast<std::uint32_t>(c);
      }
    }
  }
  return out;
}

}  // namespace vfsl::oracle
