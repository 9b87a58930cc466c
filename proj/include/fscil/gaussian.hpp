#pragma once

#include <vector>

#include "fscil/linalg.hpp"
#include "fscil/rng.hpp"

namespace fscil {

// per-class, per-layer feature distribution used for replay sampling
struct ClassGaussian {
  int class_id = 0;
  int layer_id = 0;
  Vec mean;
  Mat cov;  // symmetric PSD (within tolerance)
};

// sample mean and unbiased (n-1) sample covariance; needs >= 2 samples
ClassGaussian fit_gaussian(const std::vector<Vec>& features, int class_id, int layer_id);

// mean covariance of the k base classes whose Gaussian means have the highest
// cosine similarity to the novel prototype; ties broken by lower class id
Mat novel_covariance(const Vec& proto_novel, const std::vector<ClassGaussian>& base_models,
                     int k);

// lower-triangular Cholesky factor of a symmetric positive-definite matrix;
// throws NotPSD when a pivot fails
Mat cholesky(const Mat& a);

// n draws from N(mean, cov + eps*I), eps = 1e-6; deterministic under the rng
std::vector<Vec> sample_gaussian(const ClassGaussian& g, int n, Rng& rng);

constexpr double kCovJitter = 1e-6;

}  // namespace fscil
