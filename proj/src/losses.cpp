// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/losses.hpp"

#include <cmath>
#include <string>

#include "cincgan/errors.hpp"

namespace cincgan::losses {

namespace {

void check_scores(const std::vector<torch::Tensor>& real, const std::vector<torch::Tensor>& fake) {
  if (real.empty() || fake.empty()) throw InvalidInputError("RaLS loss: no score maps");
  if (real.size() != fake.size()) throw InvalidInputError("RaLS loss: scale counts differ");
  for (std::size_t s = 0; s < real.size(); ++s)
    if (real[s].numel() == 0 || fake[s].numel() == 0)
      throw InvalidInputError("RaLS loss: empty batch at scale " + std::to_string(s));
}

torch::Tensor zero_like_or(const torch::Tensor& t, const torch::Tensor& ref) {
  return t.defined() ? t : torch::zeros({}, ref.options());
}

void check_same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* who) {
  if (a.sizes() != b.sizes())
    throw ShapeError(std::string(who) + ": shape mismatch " + c10::str(a.sizes()) + " vs " +
                     c10::str(b.sizes()));
}

}  // namespace

void validate(const LossWeights& w) {
  for (double v : {w.lambda_cycle, w.lambda_id, w.gamma})
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidParameterError("loss weights must be finite and non-negative");
  if (w.id_epochs < 0) throw InvalidParameterError("id_epochs must be non-negative");
}

torch::Tensor rals_d_loss(const std::vector<torch::Tensor>& scores_real,
                          const std::vector<torch::Tensor>& scores_fake) {
  check_scores(scores_real, scores_fake);
  torch::Tensor total;
  for (std::size_t s = 0; s < scores_real.size(); ++s) {
    const auto& r = scores_real[s];
    const auto& f = scores_fake[s];
    const auto term = (r - f.mean() - 1.0).square().mean() + (f - r.mean() + 1.0).square().mean();
    total = total.defined() ? total + term : term;
  }
  return total / static_cast<double>(scores_real.size());
}

torch::Tensor rals_g_loss(const std::vector<torch::Tensor>& scores_real,
                          const std::vector<torch::Tensor>& scores_fake) {
  return rals_d_loss(scores_fake, scores_real);
}

torch::Tensor mean_l1(const torch::Tensor& a, const torch::Tensor& b) {
  check_same_shape(a, b, "L1 loss");
  return (a - b).abs().mean();
}

torch::Tensor cycle_loss(const torch::Tensor& x, const torch::Tensor& x_reconstructed,
                         const torch::Tensor& y, const torch::Tensor& y_reconstructed) {
  return mean_l1(x_reconstructed, x) + mean_l1(y_reconstructed, y);
}

torch::Tensor identity_loss(const torch::Tensor& x, const torch::Tensor& f_of_x,
                            const torch::Tensor& y, const torch::Tensor& g_of_y) {
  return mean_l1(f_of_x, x) + mean_l1(g_of_y, y);
}

double identity_weight(const LossWeights& w, int epoch) {
  return epoch < w.id_epochs ? w.lambda_id : 0.0;
}

torch::Tensor cyclegan_total(const CycleGanTerms& t, const LossWeights& w, int epoch) {
  torch::Tensor ref;
  for (const auto* p : {&t.adv_forward, &t.adv_backward, &t.cycle, &t.identity})
    if (p->defined()) ref = *p;
  if (!ref.defined()) return torch::zeros({});
  auto total = zero_like_or(t.adv_forward, ref) + zero_like_or(t.adv_backward, ref) +
               w.lambda_cycle * zero_like_or(t.cycle, ref);
  const double id = identity_weight(w, epoch);
  // A zero weight drops the term entirely so no identity gradient flows.
  if (id != 0.0) total = total + id * zero_like_or(t.identity, ref);
  return total;
}

torch::Tensor cincgan_total(const torch::Tensor& mcgan_loss, const torch::Tensor& ccgan_loss,
                            const LossWeights& w) {
  return w.gamma * mcgan_loss + ccgan_loss;
}

}  // namespace cincgan::losses
