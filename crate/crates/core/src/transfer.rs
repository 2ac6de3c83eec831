//! Frequency response of one first-order all-pass delay stage.

use num_complex::Complex64;

/// `H(w) = (1 - i w T/2) / (1 + i w T/2)`.
pub fn transfer_function(omega: f64, delay: f64) -> Complex64 {
    let x = 0.5 * omega * delay;
    Complex64::new(1.0, -x) / Complex64::new(1.0, x)
}

/// Group delay `-d arg H / dw = T / (1 + (w T / 2)^2)`.
pub fn stage_group_delay(omega: f64, delay: f64) -> f64 {
    let x = 0.5 * omega * delay;
    delay / (1.0 + x * x)
}
