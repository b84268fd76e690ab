//! The series S_q(a) = sum_{j>=1} (8^{a j} - 1)^q / 8^{s j} controlling the
//! dyadic tail bookkeeping; it converges exactly when a < s/q and vanishes as
//! a -> 0+.

use crate::error::{FracError, Result};

#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub partial: f64,
    /// Geometric bound on the dropped tail: term_j <= 8^{-(s - a q) j}.
    pub remainder_bound: f64,
    pub terms: usize,
}

pub fn series_s(q: f64, alpha1: f64, s: f64, terms: usize) -> Result<SeriesValue> {
    if !(q >= 1.0) {
        return Err(FracError::Contract(format!("series exponent q must be >= 1, got {q}")));
    }
    if !(alpha1 > 0.0 && alpha1 < s / q) {
        return Err(FracError::Divergence(format!(
            "series requires 0 < alpha1 < s/q = {:.6}, got alpha1 = {alpha1:.6}",
            s / q
        )));
    }
    let ln8 = 8.0f64.ln();
    let mut acc = 0.0;
    for j in 1..=terms {
        let jf = j as f64;
        let term = ((alpha1 * jf * ln8).exp() - 1.0).powf(q) * (-s * jf * ln8).exp();
        acc += term;
        if term < f64::MIN_POSITIVE {
            break;
        }
    }
    let rate = (-(s - alpha1 * q) * ln8).exp();
    let remainder_bound = rate.powi(terms as i32 + 1) / (1.0 - rate);
    Ok(SeriesValue { partial: acc, remainder_bound, terms })
}
