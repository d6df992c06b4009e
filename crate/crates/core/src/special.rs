//! Complex log-gamma on the right half plane.

use std::f64::consts::PI;

use num_complex::Complex64;

// B_2k / (2k (2k-1)) for k = 1..7
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
];

/// `ln Γ(z)` for `Re z > 0`, on the branch continuous from the positive real axis.
///
/// The argument is shifted up by the recurrence `Γ(z+1) = zΓ(z)` until
/// `|z| ≥ 15`, where the Stirling series is accurate to double precision.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "ln_gamma requires Re z > 0");
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let half_ln_two_pi = 0.5 * (2.0 * PI).ln();
    let inv = w.inv();
    let inv_sq = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv_sq;
    }
    (w - 0.5) * w.ln() - w + half_ln_two_pi + series - shift
}
