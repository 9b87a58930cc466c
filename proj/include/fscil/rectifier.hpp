#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fscil/linalg.hpp"
#include "fscil/rng.hpp"

namespace fscil {

// ===== cosine classifier ====================================================

// unit-normalized class prototypes, one column per class
class PrototypeSet {
public:
  void add(int class_id, const Vec& mean);  // normalizes; rejects duplicates
  int size() const { return static_cast<int>(class_ids_.size()); }
  int dim() const;
  int class_id(int index) const { return class_ids_[index]; }
  const Vec& column(int index) const { return columns_[index]; }
  int index_of(int class_id) const;  // throws UnknownClass

private:
  std::vector<int> class_ids_;
  std::vector<Vec> columns_;
};

// P^T * l2_normalize(x); entries in [-1, 1]
Vec cosine_logits(const PrototypeSet& protos, const Vec& x);

// ===== rectifier module =====================================================

double gelu(double x);       // x * Phi(x), exact erf form
double gelu_grad(double x);  // Phi(x) + x * phi(x)

// affine -> GELU -> layer norm -> affine
struct MlpBlock {
  Mat w1;  // mid x in
  Vec b1;
  Vec ln_gain;
  Vec ln_shift;
  Mat w2;  // out x mid
  Vec b2;
};

// M_F and M_I keep dimension d; M_mix consumes the 2d concatenation
// (first affine 2d -> d) and emits d.
struct RectifierParams {
  int dim = 0;
  MlpBlock m_f;    // final-feature branch, d -> d
  MlpBlock m_i;    // intermediate-feature branch, d -> d
  MlpBlock m_mix;  // 2d -> d
};

// uniform(-s, s) weights with s = 1/sqrt(fan_in), zero biases, identity norm
RectifierParams init_rectifier(int dim, Rng& rng);
RectifierParams zeros_like(const RectifierParams& p);

// flat parameter view (order: m_f, m_i, m_mix; per block w1,b1,gain,shift,w2,b2)
std::size_t param_count(const RectifierParams& p);
double get_param(const RectifierParams& p, std::size_t index);
void set_param(RectifierParams& p, std::size_t index, double value);

// p -= step * g
void apply_gradient(RectifierParams& p, const RectifierParams& g, double step);

// forward intermediates kept for the hand-derived backward pass
struct BlockCache {
  Vec x;     // block input
  Vec a;     // w1 x + b1
  Vec g;     // gelu(a)
  Vec xhat;  // normalized g
  Vec h;     // gain .* xhat + shift
  double sigma = 0.0;
};

struct RectifyCache {
  BlockCache f, i, mix;
  Vec out;
};

// X_FR = M_mix(cat(M_F(x_final), M_I(x_inter)))
Vec rectify(const RectifierParams& p, const Vec& x_final, const Vec& x_inter);
Vec rectify_cached(const RectifierParams& p, const Vec& x_final, const Vec& x_inter,
                   RectifyCache& cache);

// accumulates d(loss)/d(params) given d(loss)/d(out); inputs are data leaves
void rectify_backward(const RectifierParams& p, const RectifyCache& cache,
                      const Vec& grad_out, RectifierParams& grads);

// deterministic shape-tagged JSON snapshot
std::string params_json(const RectifierParams& p);
RectifierParams params_from_json(std::string_view text);

// ===== losses ===============================================================

struct LossWeights {
  double beta_cos = 0.1;
  double beta_cr = 0.5;
  double beta_ir = 1.0;
};

struct LossGrad {
  double value = 0.0;
  Vec grad;  // w.r.t. the rectified input
};

struct PairLossGrad {
  double value = 0.0;
  Vec grad1, grad2;  // w.r.t. the two rectified inputs
};

// smoothL1(|fr1 - fr2|, |l1 - l2|), quadratic zone |residual| < 1
PairLossGrad loss_ir(const Vec& fr1, const Vec& fr2, const Vec& l1, const Vec& l2);

// KL(softmax(logits(fr)) || softmax(logits(l))); intermediate branch constant
LossGrad loss_cr(const PrototypeSet& protos, const Vec& x_fr, const Vec& x_l);

// 1 - cos(x_fr, x_final); as_printed flips to the raw similarity
LossGrad loss_cos(const Vec& x_fr, const Vec& x_final, bool as_printed = false);

// cross entropy over cosine logits, gated to novel-class labels
LossGrad loss_novce(const PrototypeSet& protos, const Vec& x_fr, int label,
                    const std::unordered_set<int>& novel_set);

struct BatchSample {
  Vec x_final;
  Vec x_inter;
  int label = 0;
};

struct TotalLoss {
  double value = 0.0;
  // unweighted per-term means, for ablation diagnostics
  double cos = 0.0, novce = 0.0, cr = 0.0, ir = 0.0;
  RectifierParams grads;
};

// beta_cos*(L_cos + L_NovCE) + beta_cr*L_CR + beta_ir*L_IR; L_IR averaged
// over unordered in-batch pairs, the rest over samples; full backward into
// the rectifier parameters
TotalLoss total_loss(const std::vector<BatchSample>& batch, const PrototypeSet& protos,
                     const RectifierParams& params, const LossWeights& weights,
                     const std::unordered_set<int>& novel_set, bool cos_as_printed = false);

// ===== ensemble =============================================================

struct Prediction {
  Vec probs;          // mean of branch softmaxes; simplex element
  int class_index = 0;  // argmax position, ties to the lowest index
  int class_id = 0;
};

// shared prototype set across branches
Prediction ensemble_predict(const std::vector<RectifierParams>& branches,
                            const PrototypeSet& protos,
                            const std::vector<Vec>& x_inter_per_branch, const Vec& x_final);

// per-branch prototype sets (all must list classes in the same order)
Prediction ensemble_predict(const std::vector<RectifierParams>& branches,
                            const std::vector<PrototypeSet>& protos_per_branch,
                            const std::vector<Vec>& x_inter_per_branch, const Vec& x_final);

}  // namespace fscil
