#include "fscil/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace fscil {

ClassGaussian fit_gaussian(const std::vector<Vec>& features, int class_id, int layer_id) {
  if (features.size() < 2) {
    raise(ErrorCode::TooFewSamples, "need at least 2 samples to fit a Gaussian");
  }
  std::size_t d = features.front().size();
  for (const Vec& f : features) check_dims(f.size(), d, "fit_gaussian");

  ClassGaussian g;
  g.class_id = class_id;
  g.layer_id = layer_id;
  g.mean.assign(d, 0.0);
  for (const Vec& f : features) axpy(1.0, f, g.mean);
  for (double& v : g.mean) v /= static_cast<double>(features.size());

  g.cov = Mat(static_cast<int>(d), static_cast<int>(d));
  double inv = 1.0 / static_cast<double>(features.size() - 1);
  for (const Vec& f : features) {
    Vec c = vsub(f, g.mean);
    add_outer(g.cov, inv, c, c);
  }
  return g;
}

Mat novel_covariance(const Vec& proto_novel, const std::vector<ClassGaussian>& base_models,
                     int k) {
  if (k < 1 || k > static_cast<int>(base_models.size())) {
    raise(ErrorCode::KTooLarge, "top-k " + std::to_string(k) + " vs " +
                                    std::to_string(base_models.size()) + " base classes");
  }
  Vec p_hat = l2_normalize(proto_novel);

  struct Scored {
    double sim;
    int class_id;
    const Mat* cov;
  };
  std::vector<Scored> scored;
  scored.reserve(base_models.size());
  for (const ClassGaussian& g : base_models) {
    check_dims(g.mean.size(), proto_novel.size(), "novel_covariance");
    double n = norm(g.mean);
    double sim = n > 0.0 ? dot(p_hat, g.mean) / n : -2.0;
    scored.push_back({sim, g.class_id, &g.cov});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.class_id < b.class_id;
  });

  int d = static_cast<int>(proto_novel.size());
  Mat cov(d, d);
  for (int t = 0; t < k; ++t) {
    for (std::size_t i = 0; i < cov.data.size(); ++i) {
      cov.data[i] += scored[t].cov->data[i] / static_cast<double>(k);
    }
  }
  return cov;
}

Mat cholesky(const Mat& a) {
  if (a.rows != a.cols) raise(ErrorCode::DimMismatch, "cholesky needs a square matrix");
  int n = a.rows;
  Mat l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int t = 0; t < j; ++t) s -= l(i, t) * l(j, t);
      if (i == j) {
        if (s <= 0.0) raise(ErrorCode::NotPSD, "pivot " + std::to_string(i) + " not positive");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

std::vector<Vec> sample_gaussian(const ClassGaussian& g, int n, Rng& rng) {
  int d = static_cast<int>(g.mean.size());
  check_dims(static_cast<std::size_t>(g.cov.rows), g.mean.size(), "sample_gaussian");
  Mat jittered = g.cov;
  for (int i = 0; i < d; ++i) jittered(i, i) += kCovJitter;
  Mat l = cholesky(jittered);

  std::vector<Vec> samples;
  samples.reserve(n);
  for (int s = 0; s < n; ++s) {
    Vec z(d);
    for (double& v : z) v = rng.normal();
    Vec x = g.mean;
    for (int i = 0; i < d; ++i) {
      double acc = 0.0;
      for (int j = 0; j <= i; ++j) acc += l(i, j) * z[j];
      x[i] += acc;
    }
    samples.push_back(std::move(x));
  }
  return samples;
}

}  // namespace fscil
