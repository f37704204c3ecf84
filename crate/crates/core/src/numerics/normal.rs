//! Standard normal distribution helpers with accurate tails.

use statrs::function::erf::{erfc, erfc_inv};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// `Phi(z)`, accurate in relative terms for negative `z`.
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `1 - Phi(z)` without cancellation.
pub fn sf(z: f64) -> f64 {
    cdf(-z)
}

/// `Phi^{-1}(p)` for `p` in `(0, 1)`.
pub fn quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

/// `Phi^{-1}(1 - q)` computed from the upper-tail probability `q`.
pub fn quantile_upper(q: f64) -> f64 {
    -quantile(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_tails() {
        for &z in &[-8.0, -3.0, -0.5, 0.0, 1.2, 4.0] {
            assert!((quantile(cdf(z)) - z).abs() < 1e-9, "z = {z}");
        }
        assert!((cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((sf(8.0) / 6.220_960_574_271_785e-16 - 1.0).abs() < 1e-9);
        assert!((quantile_upper(sf(7.5)) - 7.5).abs() < 1e-8);
    }
}
