#include "fscil/rectifier.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace fscil {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kLnEps = 1e-5;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

// ----- one perceptron block: affine -> GELU -> layer norm -> affine --------

Vec block_forward(const MlpBlock& b, const Vec& x, BlockCache* cache) {
  Vec a = matvec(b.w1, x);
  axpy(1.0, b.b1, a);
  int mid = static_cast<int>(a.size());

  Vec g(mid);
  for (int i = 0; i < mid; ++i) g[i] = gelu(a[i]);

  double mu = mean(g);
  double var = 0.0;
  for (double v : g) var += (v - mu) * (v - mu);
  var /= mid;
  double sigma = std::sqrt(var + kLnEps);

  Vec xhat(mid), h(mid);
  for (int i = 0; i < mid; ++i) {
    xhat[i] = (g[i] - mu) / sigma;
    h[i] = b.ln_gain[i] * xhat[i] + b.ln_shift[i];
  }

  Vec out = matvec(b.w2, h);
  axpy(1.0, b.b2, out);

  if (cache) {
    cache->x = x;
    cache->a = std::move(a);
    cache->g = std::move(g);
    cache->xhat = std::move(xhat);
    cache->h = std::move(h);
    cache->sigma = sigma;
  }
  return out;
}

// returns d(loss)/d(x) and accumulates parameter gradients into gb
Vec block_backward(const MlpBlock& b, const BlockCache& c, const Vec& dout, MlpBlock& gb) {
  axpy(1.0, dout, gb.b2);
  add_outer(gb.w2, 1.0, dout, c.h);
  Vec dh = matvec_t(b.w2, dout);

  int mid = static_cast<int>(dh.size());
  Vec g_xhat(mid);
  for (int i = 0; i < mid; ++i) {
    gb.ln_gain[i] += dh[i] * c.xhat[i];
    gb.ln_shift[i] += dh[i];
    g_xhat[i] = dh[i] * b.ln_gain[i];
  }

  double m1 = mean(g_xhat);
  double m2 = 0.0;
  for (int i = 0; i < mid; ++i) m2 += g_xhat[i] * c.xhat[i];
  m2 /= mid;

  Vec da(mid);
  for (int i = 0; i < mid; ++i) {
    double dg = (g_xhat[i] - m1 - c.xhat[i] * m2) / c.sigma;
    da[i] = dg * gelu_grad(c.a[i]);
  }

  axpy(1.0, da, gb.b1);
  add_outer(gb.w1, 1.0, da, c.x);
  return matvec_t(b.w1, da);
}

MlpBlock make_block(int in, int mid, int out) {
  MlpBlock b;
  b.w1 = Mat(mid, in);
  b.b1.assign(mid, 0.0);
  b.ln_gain.assign(mid, 1.0);
  b.ln_shift.assign(mid, 0.0);
  b.w2 = Mat(out, mid);
  b.b2.assign(out, 0.0);
  return b;
}

void init_block(MlpBlock& b, Rng& rng) {
  double s1 = 1.0 / std::sqrt(static_cast<double>(b.w1.cols));
  for (double& w : b.w1.data) w = rng.uniform(-s1, s1);
  double s2 = 1.0 / std::sqrt(static_cast<double>(b.w2.cols));
  for (double& w : b.w2.data) w = rng.uniform(-s2, s2);
}

void zero_block(MlpBlock& b) {
  std::fill(b.w1.data.begin(), b.w1.data.end(), 0.0);
  std::fill(b.b1.begin(), b.b1.end(), 0.0);
  std::fill(b.ln_gain.begin(), b.ln_gain.end(), 0.0);
  std::fill(b.ln_shift.begin(), b.ln_shift.end(), 0.0);
  std::fill(b.w2.data.begin(), b.w2.data.end(), 0.0);
  std::fill(b.b2.begin(), b.b2.end(), 0.0);
}

template <typename Params, typename F>
void for_each_array(Params& p, F&& f) {
  auto blocks = {&p.m_f, &p.m_i, &p.m_mix};
  for (auto* b : blocks) {
    f(b->w1.data);
    f(b->b1);
    f(b->ln_gain);
    f(b->ln_shift);
    f(b->w2.data);
    f(b->b2);
  }
}

// gradient of a scalar through z = P^T * l2_normalize(x):
// dx = (w - (xhat.w) xhat) / |x|  with  w = P * dz
Vec logits_grad_to_input(const PrototypeSet& protos, const Vec& x, const Vec& dz) {
  Vec w(x.size(), 0.0);
  for (int k = 0; k < protos.size(); ++k) axpy(dz[k], protos.column(k), w);
  double n = norm(x);
  Vec xhat = scaled(x, 1.0 / n);
  double proj = dot(xhat, w);
  Vec dx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = (w[i] - proj * xhat[i]) / n;
  return dx;
}

Vec log_softmax(const Vec& z) {
  double zmax = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - zmax);
  double lse = zmax + std::log(total);
  Vec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lse;
  return out;
}

}  // namespace

// ===== cosine classifier ====================================================

void PrototypeSet::add(int class_id, const Vec& mean) {
  for (int existing : class_ids_) {
    if (existing == class_id) {
      raise(ErrorCode::BadConfig, "duplicate prototype for class " + std::to_string(class_id));
    }
  }
  if (!columns_.empty()) check_dims(columns_.front().size(), mean.size(), "prototype dim");
  columns_.push_back(l2_normalize(mean));
  class_ids_.push_back(class_id);
}

int PrototypeSet::dim() const {
  return columns_.empty() ? 0 : static_cast<int>(columns_.front().size());
}

int PrototypeSet::index_of(int class_id) const {
  for (std::size_t i = 0; i < class_ids_.size(); ++i) {
    if (class_ids_[i] == class_id) return static_cast<int>(i);
  }
  raise(ErrorCode::UnknownClass, "class " + std::to_string(class_id) + " has no prototype");
}

Vec cosine_logits(const PrototypeSet& protos, const Vec& x) {
  if (protos.size() == 0) raise(ErrorCode::DimMismatch, "empty prototype set");
  Vec xhat = l2_normalize(x);
  Vec z(protos.size());
  for (int k = 0; k < protos.size(); ++k) z[k] = dot(protos.column(k), xhat);
  return z;
}

// ===== rectifier module =====================================================

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

double gelu_grad(double x) {
  double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
  double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  return cdf + x * pdf;
}

RectifierParams init_rectifier(int dim, Rng& rng) {
  if (dim < 1) raise(ErrorCode::BadConfig, "rectifier dim must be positive");
  RectifierParams p;
  p.dim = dim;
  p.m_f = make_block(dim, dim, dim);
  p.m_i = make_block(dim, dim, dim);
  p.m_mix = make_block(2 * dim, dim, dim);
  init_block(p.m_f, rng);
  init_block(p.m_i, rng);
  init_block(p.m_mix, rng);
  return p;
}

RectifierParams zeros_like(const RectifierParams& p) {
  RectifierParams z = p;
  zero_block(z.m_f);
  zero_block(z.m_i);
  zero_block(z.m_mix);
  return z;
}

std::size_t param_count(const RectifierParams& p) {
  std::size_t n = 0;
  for_each_array(const_cast<RectifierParams&>(p), [&](auto& arr) { n += arr.size(); });
  return n;
}

double get_param(const RectifierParams& p, std::size_t index) {
  double value = 0.0;
  bool found = false;
  for_each_array(const_cast<RectifierParams&>(p), [&](auto& arr) {
    if (!found && index < arr.size()) {
      value = arr[index];
      found = true;
    } else if (!found) {
      index -= arr.size();
    }
  });
  if (!found) raise(ErrorCode::DimMismatch, "parameter index out of range");
  return value;
}

void set_param(RectifierParams& p, std::size_t index, double value) {
  bool found = false;
  for_each_array(p, [&](auto& arr) {
    if (!found && index < arr.size()) {
      arr[index] = value;
      found = true;
    } else if (!found) {
      index -= arr.size();
    }
  });
  if (!found) raise(ErrorCode::DimMismatch, "parameter index out of range");
}

void apply_gradient(RectifierParams& p, const RectifierParams& g, double step) {
  std::vector<std::vector<double>*> dst, src;
  for_each_array(p, [&](auto& arr) { dst.push_back(&arr); });
  for_each_array(const_cast<RectifierParams&>(g), [&](auto& arr) { src.push_back(&arr); });
  for (std::size_t k = 0; k < dst.size(); ++k) {
    check_dims(dst[k]->size(), src[k]->size(), "apply_gradient");
    for (std::size_t i = 0; i < dst[k]->size(); ++i) (*dst[k])[i] -= step * (*src[k])[i];
  }
}

Vec rectify(const RectifierParams& p, const Vec& x_final, const Vec& x_inter) {
  RectifyCache cache;
  return rectify_cached(p, x_final, x_inter, cache);
}

Vec rectify_cached(const RectifierParams& p, const Vec& x_final, const Vec& x_inter,
                   RectifyCache& cache) {
  check_dims(x_final.size(), static_cast<std::size_t>(p.dim), "rectify final input");
  check_dims(x_inter.size(), static_cast<std::size_t>(p.dim), "rectify inter input");
  Vec u = block_forward(p.m_f, x_final, &cache.f);
  Vec v = block_forward(p.m_i, x_inter, &cache.i);
  Vec concat(2 * p.dim);
  std::copy(u.begin(), u.end(), concat.begin());
  std::copy(v.begin(), v.end(), concat.begin() + p.dim);
  cache.out = block_forward(p.m_mix, concat, &cache.mix);
  return cache.out;
}

void rectify_backward(const RectifierParams& p, const RectifyCache& cache,
                      const Vec& grad_out, RectifierParams& grads) {
  Vec dconcat = block_backward(p.m_mix, cache.mix, grad_out, grads.m_mix);
  Vec du(dconcat.begin(), dconcat.begin() + p.dim);
  Vec dv(dconcat.begin() + p.dim, dconcat.end());
  block_backward(p.m_f, cache.f, du, grads.m_f);
  block_backward(p.m_i, cache.i, dv, grads.m_i);
}

// ===== parameter snapshots ==================================================

namespace {

ordered_json mat_json(const Mat& m) {
  return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Mat mat_from_json(const ordered_json& j) {
  Mat m(j.at("rows").get<int>(), j.at("cols").get<int>());
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.data.size()) raise(ErrorCode::DimMismatch, "matrix data size");
  m.data = std::move(data);
  return m;
}

ordered_json block_json(const MlpBlock& b) {
  ordered_json j;
  j["w1"] = mat_json(b.w1);
  j["b1"] = b.b1;
  j["ln_gain"] = b.ln_gain;
  j["ln_shift"] = b.ln_shift;
  j["w2"] = mat_json(b.w2);
  j["b2"] = b.b2;
  return j;
}

MlpBlock block_from_json(const ordered_json& j) {
  MlpBlock b;
  b.w1 = mat_from_json(j.at("w1"));
  b.b1 = j.at("b1").get<std::vector<double>>();
  b.ln_gain = j.at("ln_gain").get<std::vector<double>>();
  b.ln_shift = j.at("ln_shift").get<std::vector<double>>();
  b.w2 = mat_from_json(j.at("w2"));
  b.b2 = j.at("b2").get<std::vector<double>>();
  return b;
}

}  // namespace

std::string params_json(const RectifierParams& p) {
  ordered_json doc;
  doc["dim"] = p.dim;
  doc["m_f"] = block_json(p.m_f);
  doc["m_i"] = block_json(p.m_i);
  doc["m_mix"] = block_json(p.m_mix);
  return doc.dump(2) + "\n";
}

RectifierParams params_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
    RectifierParams p;
    p.dim = doc.at("dim").get<int>();
    p.m_f = block_from_json(doc.at("m_f"));
    p.m_i = block_from_json(doc.at("m_i"));
    p.m_mix = block_from_json(doc.at("m_mix"));
    return p;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::BadConfig, std::string("bad parameter snapshot: ") + e.what());
  }
}

// ===== losses ===============================================================

PairLossGrad loss_ir(const Vec& fr1, const Vec& fr2, const Vec& l1, const Vec& l2) {
  check_dims(fr1.size(), fr2.size(), "loss_ir rectified pair");
  check_dims(l1.size(), l2.size(), "loss_ir intermediate pair");
  Vec diff = vsub(fr1, fr2);
  double d_fr = norm(diff);
  double d_l = norm(vsub(l1, l2));
  double res = d_fr - d_l;

  PairLossGrad out;
  double dres;
  if (std::abs(res) < 1.0) {
    out.value = 0.5 * res * res;
    dres = res;
  } else {
    out.value = std::abs(res) - 0.5;
    dres = res > 0.0 ? 1.0 : -1.0;
  }
  out.grad1.assign(fr1.size(), 0.0);
  out.grad2.assign(fr1.size(), 0.0);
  if (d_fr > 0.0) {
    // d|fr1 - fr2| / dfr1 = diff / |diff|
    axpy(dres / d_fr, diff, out.grad1);
    axpy(-dres / d_fr, diff, out.grad2);
  }
  return out;
}

LossGrad loss_cr(const PrototypeSet& protos, const Vec& x_fr, const Vec& x_l) {
  Vec z_fr = cosine_logits(protos, x_fr);
  Vec z_l = cosine_logits(protos, x_l);
  Vec logp = log_softmax(z_fr);
  Vec logq = log_softmax(z_l);

  int n = static_cast<int>(logp.size());
  double kl = 0.0;
  Vec p(n), u(n);
  for (int i = 0; i < n; ++i) {
    p[i] = std::exp(logp[i]);
    u[i] = logp[i] - logq[i];
    kl += p[i] * u[i];
  }
  // dKL/dz_k = p_k (u_k - sum_i p_i u_i); the teacher branch is constant
  Vec dz(n);
  for (int k = 0; k < n; ++k) dz[k] = p[k] * (u[k] - kl);

  LossGrad out;
  out.value = kl;
  out.grad = logits_grad_to_input(protos, x_fr, dz);
  return out;
}

LossGrad loss_cos(const Vec& x_fr, const Vec& x_final, bool as_printed) {
  Vec fr_hat = l2_normalize(x_fr);
  Vec f_hat = l2_normalize(x_final);
  double c = dot(fr_hat, f_hat);
  double n_fr = norm(x_fr);

  LossGrad out;
  out.grad.resize(x_fr.size());
  double sign = as_printed ? 1.0 : -1.0;
  out.value = as_printed ? c : 1.0 - c;
  // dc/dx_fr = (f_hat - c * fr_hat) / |x_fr|
  for (std::size_t i = 0; i < x_fr.size(); ++i) {
    out.grad[i] = sign * (f_hat[i] - c * fr_hat[i]) / n_fr;
  }
  return out;
}

LossGrad loss_novce(const PrototypeSet& protos, const Vec& x_fr, int label,
                    const std::unordered_set<int>& novel_set) {
  int y = protos.index_of(label);
  if (!novel_set.contains(label)) {
    return {0.0, Vec(x_fr.size(), 0.0)};
  }
  Vec z = cosine_logits(protos, x_fr);
  Vec logp = log_softmax(z);
  Vec dz(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    dz[k] = std::exp(logp[k]) - (static_cast<int>(k) == y ? 1.0 : 0.0);
  }
  LossGrad out;
  out.value = -logp[y];
  out.grad = logits_grad_to_input(protos, x_fr, dz);
  return out;
}

TotalLoss total_loss(const std::vector<BatchSample>& batch, const PrototypeSet& protos,
                     const RectifierParams& params, const LossWeights& weights,
                     const std::unordered_set<int>& novel_set, bool cos_as_printed) {
  if (batch.empty()) raise(ErrorCode::EmptyBatch, "total_loss needs samples");
  std::size_t n = batch.size();

  std::vector<RectifyCache> caches(n);
  std::vector<Vec> fr(n);
  for (std::size_t s = 0; s < n; ++s) {
    fr[s] = rectify_cached(params, batch[s].x_final, batch[s].x_inter, caches[s]);
  }

  TotalLoss total;
  total.grads = zeros_like(params);
  std::vector<Vec> dfr(n, Vec(params.dim, 0.0));
  double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t s = 0; s < n; ++s) {
    LossGrad cos = loss_cos(fr[s], batch[s].x_final, cos_as_printed);
    total.cos += cos.value * inv_n;
    axpy(weights.beta_cos * inv_n, cos.grad, dfr[s]);

    LossGrad ce = loss_novce(protos, fr[s], batch[s].label, novel_set);
    total.novce += ce.value * inv_n;
    axpy(weights.beta_cos * inv_n, ce.grad, dfr[s]);

    LossGrad cr = loss_cr(protos, fr[s], batch[s].x_inter);
    total.cr += cr.value * inv_n;
    axpy(weights.beta_cr * inv_n, cr.grad, dfr[s]);
  }

  if (n >= 2) {
    double inv_pairs = 2.0 / static_cast<double>(n * (n - 1));
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t t = s + 1; t < n; ++t) {
        PairLossGrad ir = loss_ir(fr[s], fr[t], batch[s].x_inter, batch[t].x_inter);
        total.ir += ir.value * inv_pairs;
        axpy(weights.beta_ir * inv_pairs, ir.grad1, dfr[s]);
        axpy(weights.beta_ir * inv_pairs, ir.grad2, dfr[t]);
      }
    }
  }

  total.value = weights.beta_cos * (total.cos + total.novce) +
                weights.beta_cr * total.cr + weights.beta_ir * total.ir;
  if (!std::isfinite(total.value)) raise(ErrorCode::NonFiniteLoss, "loss diverged");

  for (std::size_t s = 0; s < n; ++s) {
    rectify_backward(params, caches[s], dfr[s], total.grads);
  }
  return total;
}

// ===== ensemble =============================================================

namespace {

Prediction ensemble_core(const std::vector<RectifierParams>& branches,
                         const PrototypeSet* const* protos,
                         const std::vector<Vec>& x_inter_per_branch, const Vec& x_final) {
  if (branches.empty()) raise(ErrorCode::EmptyEnsemble, "no branches");
  check_dims(branches.size(), x_inter_per_branch.size(), "ensemble inputs");
  const PrototypeSet& first = *protos[0];
  for (std::size_t b = 1; b < branches.size(); ++b) {
    if (protos[b]->size() != first.size()) {
      raise(ErrorCode::LayoutMismatch, "branches disagree on class count");
    }
    for (int k = 0; k < first.size(); ++k) {
      if (protos[b]->class_id(k) != first.class_id(k)) {
        raise(ErrorCode::LayoutMismatch, "branches disagree on class order");
      }
    }
  }

  Prediction pred;
  pred.probs.assign(first.size(), 0.0);
  for (std::size_t b = 0; b < branches.size(); ++b) {
    Vec x_fr = rectify(branches[b], x_final, x_inter_per_branch[b]);
    Vec p = softmax(cosine_logits(*protos[b], x_fr));
    axpy(1.0 / static_cast<double>(branches.size()), p, pred.probs);
  }
  pred.class_index = 0;
  for (int k = 1; k < first.size(); ++k) {
    if (pred.probs[k] > pred.probs[pred.class_index]) pred.class_index = k;
  }
  pred.class_id = first.class_id(pred.class_index);
  return pred;
}

}  // namespace

Prediction ensemble_predict(const std::vector<RectifierParams>& branches,
                            const PrototypeSet& protos,
                            const std::vector<Vec>& x_inter_per_branch, const Vec& x_final) {
  std::vector<const PrototypeSet*> ptrs(branches.size(), &protos);
  return ensemble_core(branches, ptrs.data(), x_inter_per_branch, x_final);
}

Prediction ensemble_predict(const std::vector<RectifierParams>& branches,
                            const std::vector<PrototypeSet>& protos_per_branch,
                            const std::vector<Vec>& x_inter_per_branch, const Vec& x_final) {
  check_dims(branches.size(), protos_per_branch.size(), "ensemble prototype sets");
  std::vector<const PrototypeSet*> ptrs;
  ptrs.reserve(protos_per_branch.size());
  for (const PrototypeSet& p : protos_per_branch) ptrs.push_back(&p);
  return ensemble_core(branches, ptrs.data(), x_inter_per_branch, x_final);
}

}  // namespace fscil
