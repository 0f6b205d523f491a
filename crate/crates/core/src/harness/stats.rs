//! Binomial confidence bounds.

use statrs::distribution::{Beta, ContinuousCDF};

/// One-sided Clopper-Pearson upper bound on a binomial proportion.
pub fn clopper_pearson_upper(errors: u64, trials: u64, confidence: f64) -> f64 {
    if trials == 0 || errors >= trials {
        return 1.0;
    }
    let beta = Beta::new(errors as f64 + 1.0, (trials - errors) as f64)
        .expect("shape parameters are positive");
    beta.inverse_cdf(confidence)
}

/// Standard error of a binomial proportion estimate.
pub fn standard_error(errors: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = errors as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Upper tail of the standard normal, `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}
