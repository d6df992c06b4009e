//! Spin-1 interferometer: sin^4 fringes and their sharpness.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use spinorlz::interferometer::{self, InterferometerConfig, Sweep};

fn main() -> spinorlz::Result<()> {
    let r = interferometer::optimal_splitting_amplitude()?;
    println!("fringe amplitude 16R^4(1-R^2)^2 is largest at R = {r:.9}");

    let ideal = InterferometerConfig::new(FRAC_1_SQRT_2, 0.0, 0.0, 0.0, 0.0)?;
    let grid = interferometer::linspace(0.0, PI, 9)?;
    let scan = interferometer::fringe_scan(&ideal, Sweep::Chi, &grid)?;
    for (chi, p) in scan.chi.iter().zip(&scan.populations) {
        println!("  chi = {chi:.4}  P(1 -> -1) = {p:.6}");
    }
    let w = interferometer::sharper_fringes_check(&ideal)?;
    println!("FWHM spin-1 {:.4}, two-arm {:.4}, ratio {:.4}", w.fwhm_spin1, w.fwhm_two_arm, w.ratio);

    for theta in [0.0, 0.3, PI / 2.0] {
        let c = InterferometerConfig::new(FRAC_1_SQRT_2, 0.0, 0.0, theta, -theta)?;
        let grid = interferometer::linspace(0.0, 2.0 * PI, 2001)?;
        let s = interferometer::fringe_scan(&c, Sweep::Chi, &grid)?;
        println!("Psi = {:.4}: visibility {:.4}", s.psi, s.visibility);
    }
    Ok(())
}
