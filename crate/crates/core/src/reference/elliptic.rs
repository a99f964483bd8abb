use std::f64::consts::FRAC_PI_2;

use crate::{Error, Result};

/// Complete elliptic integral of the first kind `K(k)` (modulus convention)
/// via the arithmetic–geometric mean: `K = π / (2·AGM(1, √(1−k²)))`.
pub fn agm_elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::ModulusOutOfRange(k));
    }
    Ok(elliptic_k_complementary(((1.0 - k) * (1.0 + k)).sqrt()))
}

/// `K` expressed through the complementary modulus `k' = √(1−k²)`, which
/// keeps full relative accuracy as `k → 1`.
pub fn elliptic_k_complementary(kc: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, kc)
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let mean = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = mean;
    }
    0.5 * (a + b)
}
