#pragma once

#include "nvsgeom/rng.hpp"

#include <functional>
#include <vector>

namespace nvs::diffusion {

/// Log-normal noise-level distribution: sigma = exp(p_mean + p_std * z).
struct SigmaDistribution {
    double p_mean = -0.8;
    double p_std = 1.6;
};

double sample_sigma(const SigmaDistribution& dist, Rng& rng);

/// d_uncond + w * (d_cond - d_uncond), elementwise.
std::vector<double> cfg_combine(const std::vector<double>& d_cond,
                                const std::vector<double>& d_uncond, double w);

struct AugmentedConditioning {
    std::vector<double> image;  // input + sigma_aug * eps
    double sigma_aug = 0.0;     // echoed for the consumer's conditioning input
};

/// Noise-conditioning augmentation on a [-1, 1]-valued tensor.
AugmentedConditioning condition_augment(const std::vector<double>& img, double sigma_aug, Rng& rng);

/// Denoiser contract: given a noisy sample and its noise level, return the
/// estimate of the clean sample, same shape. Conditioning rides inside the
/// closure. Must produce finite values and be safe to call repeatedly.
using Denoiser = std::function<std::vector<double>(const std::vector<double>& x, double sigma)>;

struct SamplerConfig {
    int num_steps = 32;
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;
};

/// num_steps + 1 nodes: sigma_i = (a + i/(N-1) * (b - a))^rho with
/// a = sigma_max^(1/rho), b = sigma_min^(1/rho), followed by the terminal 0.
/// Strictly decreasing, sigma_min at the penultimate node (N >= 2).
std::vector<double> sigma_schedule(const SamplerConfig& config);

/// Deterministic probability-flow integration from sigma_max to 0 with Heun
/// second-order steps; the final step to 0 is plain Euler. `initial_noise`
/// must already be scaled by sigma_max. Throws Status::numeric_error with the
/// step index when the denoiser emits non-finite values.
std::vector<double> edm_sample(const Denoiser& denoiser, const SamplerConfig& config,
                               std::vector<double> initial_noise);

/// Exact posterior-mean denoiser for a Gaussian target N(mu, sigma_data^2 I):
/// D(x, sigma) = (sigma_data^2 x + sigma^2 mu) / (sigma_data^2 + sigma^2).
Denoiser gaussian_denoiser(std::vector<double> mu, double sigma_data);

/// D(x, sigma) = x0 regardless of input.
Denoiser constant_denoiser(std::vector<double> x0);

}  // namespace nvs::diffusion
