#include "nvsgeom/diffusion.hpp"

#include "nvsgeom/common.hpp"

#include <cmath>

namespace nvs::diffusion {

double sample_sigma(const SigmaDistribution& dist, Rng& rng) {
    if (!(dist.p_std > 0.0) || !std::isfinite(dist.p_mean) || !std::isfinite(dist.p_std)) {
        fail(Status::invalid_argument, "sample_sigma: p_std must be positive and finite");
    }
    return std::exp(dist.p_mean + dist.p_std * rng.normal());
}

std::vector<double> cfg_combine(const std::vector<double>& d_cond,
                                const std::vector<double>& d_uncond, double w) {
    if (d_cond.size() != d_uncond.size()) {
        fail(Status::invalid_argument, "cfg_combine: shape mismatch");
    }
    std::vector<double> out(d_cond.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = d_uncond[i] + w * (d_cond[i] - d_uncond[i]);
    }
    return out;
}

AugmentedConditioning condition_augment(const std::vector<double>& img, double sigma_aug, Rng& rng) {
    if (!(sigma_aug >= 0.0) || !std::isfinite(sigma_aug)) {
        fail(Status::invalid_argument, "condition_augment: sigma_aug must be non-negative");
    }
    AugmentedConditioning out;
    out.sigma_aug = sigma_aug;
    out.image.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (!std::isfinite(img[i])) {
            fail(Status::invalid_argument, "condition_augment: non-finite input");
        }
        out.image[i] = sigma_aug == 0.0 ? img[i] : img[i] + sigma_aug * rng.normal();
    }
    return out;
}

namespace {

void validate_config(const SamplerConfig& config) {
    if (config.num_steps < 1) fail(Status::invalid_argument, "sampler: num_steps must be >= 1");
    if (!(config.sigma_min > 0.0) || !(config.sigma_max > config.sigma_min)) {
        fail(Status::invalid_argument, "sampler: need 0 < sigma_min < sigma_max");
    }
    if (!(config.rho > 0.0) || !std::isfinite(config.rho)) {
        fail(Status::invalid_argument, "sampler: rho must be positive");
    }
}

}  // namespace

std::vector<double> sigma_schedule(const SamplerConfig& config) {
    validate_config(config);
    const int n = config.num_steps;
    std::vector<double> sigmas(n + 1);
    if (n == 1) {
        sigmas[0] = config.sigma_max;
    } else {
        const double inv_rho = 1.0 / config.rho;
        const double a = std::pow(config.sigma_max, inv_rho);
        const double b = std::pow(config.sigma_min, inv_rho);
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / (n - 1);
            sigmas[i] = std::pow(a + t * (b - a), config.rho);
        }
        sigmas[n - 1] = config.sigma_min;  // pin against pow round-off
    }
    sigmas[n] = 0.0;
    return sigmas;
}

namespace {

void check_finite(const std::vector<double>& v, int step) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            fail(Status::numeric_error,
                 "denoiser returned non-finite values at step " + std::to_string(step));
        }
    }
}

}  // namespace

std::vector<double> edm_sample(const Denoiser& denoiser, const SamplerConfig& config,
                               std::vector<double> initial_noise) {
    if (!denoiser) fail(Status::invalid_argument, "edm_sample: null denoiser");
    const std::vector<double> sigmas = sigma_schedule(config);
    std::vector<double> x = std::move(initial_noise);
    const std::size_t n = x.size();

    std::vector<double> x_next(n), d_cur(n);
    for (int i = 0; i < config.num_steps; ++i) {
        const double sigma = sigmas[i];
        const double sigma_next = sigmas[i + 1];
        const double h = sigma_next - sigma;

        const std::vector<double> denoised = denoiser(x, sigma);
        if (denoised.size() != n) fail(Status::numeric_error, "denoiser changed the sample shape");
        check_finite(denoised, i);

        for (std::size_t j = 0; j < n; ++j) {
            d_cur[j] = (x[j] - denoised[j]) / sigma;
            x_next[j] = x[j] + h * d_cur[j];
        }

        if (sigma_next > 0.0) {
            // Heun correction with the slope at the look-ahead point.
            const std::vector<double> denoised_next = denoiser(x_next, sigma_next);
            if (denoised_next.size() != n) {
                fail(Status::numeric_error, "denoiser changed the sample shape");
            }
            check_finite(denoised_next, i);
            for (std::size_t j = 0; j < n; ++j) {
                const double d_next = (x_next[j] - denoised_next[j]) / sigma_next;
                x[j] += h * 0.5 * (d_cur[j] + d_next);
            }
        } else {
            x = x_next;
        }
    }
    return x;
}

Denoiser gaussian_denoiser(std::vector<double> mu, double sigma_data) {
    if (!(sigma_data > 0.0)) fail(Status::invalid_argument, "gaussian_denoiser: sigma_data must be positive");
    const double var_data = sigma_data * sigma_data;
    return [mu = std::move(mu), var_data](const std::vector<double>& x, double sigma) {
        std::vector<double> out(x.size());
        const double var = sigma * sigma;
        const double denom = var_data + var;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double m = mu.size() == 1 ? mu[0] : mu[i];
            out[i] = (var_data * x[i] + var * m) / denom;
        }
        return out;
    };
}

Denoiser constant_denoiser(std::vector<double> x0) {
    return [x0 = std::move(x0)](const std::vector<double>& x, double) {
        if (x0.size() == 1) return std::vector<double>(x.size(), x0[0]);
        (void)x;
        return x0;
    };
}

}  // namespace nvs::diffusion
