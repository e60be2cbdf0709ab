// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <torch/torch.h>

#include <vector>

namespace cincgan::losses {

struct LossWeights {
  double lambda_cycle = 5.0;
  double lambda_id = 10.0;
  double gamma = 0.1;
  int id_epochs = 20;
};

// Throws InvalidParameterError if any weight is negative.
void validate(const LossWeights& w);

// Relativistic average least-squares discriminator loss, averaged over scales:
// E[(D(y) - E D(fake) - 1)^2] + E[(D(fake) - E D(y) + 1)^2], expectations
// taken as means over every element of a scale's score map.
torch::Tensor rals_d_loss(const std::vector<torch::Tensor>& scores_real,
                          const std::vector<torch::Tensor>& scores_fake);

// Generator side: rals_g_loss(r, f) == rals_d_loss(f, r).
torch::Tensor rals_g_loss(const std::vector<torch::Tensor>& scores_real,
                          const std::vector<torch::Tensor>& scores_fake);

// Elementwise mean absolute difference.
torch::Tensor mean_l1(const torch::Tensor& a, const torch::Tensor& b);

// mean|x_rec - x| + mean|y_rec - y|
torch::Tensor cycle_loss(const torch::Tensor& x, const torch::Tensor& x_reconstructed,
                         const torch::Tensor& y, const torch::Tensor& y_reconstructed);

// mean|F(x) - x| + mean|G(y) - y|
torch::Tensor identity_loss(const torch::Tensor& x, const torch::Tensor& f_of_x,
                            const torch::Tensor& y, const torch::Tensor& g_of_y);

// Per-cycle loss terms; undefined tensors count as zero.
struct CycleGanTerms {
  torch::Tensor adv_forward;   // L_Radv of the X->Y generator
  torch::Tensor adv_backward;  // L_Radv of the Y->X generator
  torch::Tensor cycle;
  torch::Tensor identity;
};

// Identity weight in effect at a (0-based) epoch: lambda_id before id_epochs, 0 after.
double identity_weight(const LossWeights& w, int epoch);

// adv_forward + adv_backward + lambda_cycle * cycle + identity_weight * identity
torch::Tensor cyclegan_total(const CycleGanTerms& terms, const LossWeights& w, int epoch);

// The magnitude CycleGAN objective.
inline torch::Tensor mcgan_total(const CycleGanTerms& terms, const LossWeights& w, int epoch) {
  return cyclegan_total(terms, w, epoch);
}

// gamma * mcgan + ccgan
torch::Tensor cincgan_total(const torch::Tensor& mcgan_loss, const torch::Tensor& ccgan_loss,
                            const LossWeights& w = {});

}  // namespace cincgan::losses
