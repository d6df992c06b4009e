//! Majorana lift of two-level propagators to `n = 2F+1` levels.
//!
//! The spin-`F` representation is built from the symmetric tensor power of
//! the spin-1/2 one: a basis state `|F, m⟩` is the normalised monomial
//! `u^p d^q / √(p! q!)` with `p = F+m` spin-up and `q = F−m` spin-down
//! factors. Applying the SU(2) element to each factor and re-expanding gives
//! the lifted matrix element as a double binomial sum.
//!
//! Only Hamiltonians of the form `A(t)·I + Σ D_i(t)·S_i` lift this way; with
//! quadratic Zeeman terms present the lifted matrix is not the propagator.

use num_complex::Complex64;

use crate::linalg::{Matrix, ONE, ZERO};
use crate::{Error, Result};

/// Tolerance on `|α|² + |β|² = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// SU(2) propagator `[[α, β], [−β*, α*]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelPropagator {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl TwoLevelPropagator {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let p = Self { alpha, beta };
        p.validate(NORMALIZATION_TOL)?;
        Ok(p)
    }

    pub fn identity() -> Self {
        Self {
            alpha: ONE,
            beta: ZERO,
        }
    }

    /// Reads `(α, β)` off a 2×2 matrix, checking the SU(2) structure to `tol`.
    pub fn from_matrix(m: &Matrix, tol: f64) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: 2,
                right: m.dim(),
            });
        }
        let alpha = m[(0, 0)];
        let beta = m[(0, 1)];
        let defect = (m[(1, 0)] + beta.conj())
            .norm()
            .max((m[(1, 1)] - alpha.conj()).norm());
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
        let p = Self { alpha, beta };
        p.validate(tol)?;
        Ok(p)
    }

    pub fn normalization_defect(&self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr() - 1.0).abs()
    }

    fn validate(&self, tol: f64) -> Result<()> {
        if !(crate::linalg::is_finite(self.alpha) && crate::linalg::is_finite(self.beta)) {
            return Err(Error::NonFinite("two-level propagator"));
        }
        let defect = self.normalization_defect();
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
        Ok(())
    }

    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(2);
        m[(0, 0)] = self.alpha;
        m[(0, 1)] = self.beta;
        m[(1, 0)] = -self.beta.conj();
        m[(1, 1)] = self.alpha.conj();
        m
    }

    /// Matrix product `self · rhs`, expressed again as an `(α, β)` pair.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            alpha: self.alpha * rhs.alpha - self.beta * rhs.beta.conj(),
            beta: self.alpha * rhs.beta + self.beta * rhs.alpha.conj(),
        }
    }

    /// Transposed matrix `[[α, −β*], [β, α*]]`, i.e. the pair `(α, −β*)`.
    pub fn transpose(&self) -> Self {
        Self {
            alpha: self.alpha,
            beta: -self.beta.conj(),
        }
    }

    /// Transition probability between the two levels, `|β|²`.
    pub fn transition_probability(&self) -> f64 {
        self.beta.norm_sqr()
    }
}

fn ln_factorials(max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=max {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

fn powers(z: Complex64, max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = ONE;
    out.push(acc);
    for _ in 0..max {
        acc *= z;
        out.push(acc);
    }
    out
}

/// Lifts `p` to the `levels`-dimensional spin representation.
///
/// Basis order is `m = F, …, −F`; for `levels == 2` the result is exactly
/// `p.matrix()`.
pub fn lift(p: &TwoLevelPropagator, levels: usize) -> Result<Matrix> {
    if levels < 2 {
        return Err(Error::InvalidLevelCount(levels));
    }
    p.validate(NORMALIZATION_TOL)?;
    if levels == 2 {
        return Ok(p.matrix());
    }

    let top = levels - 1;
    let lnf = ln_factorials(top);
    let ln_binom = |n: usize, k: usize| lnf[n] - lnf[k] - lnf[n - k];

    // images of the single-particle states: up -> a·up − b*·down, down -> b·up + a*·down
    let a = powers(p.alpha, top);
    let mb_conj = powers(-p.beta.conj(), top);
    let b = powers(p.beta, top);
    let a_conj = powers(p.alpha.conj(), top);

    let mut out = Matrix::zeros(levels);
    for col in 0..levels {
        let (p_in, q_in) = (top - col, col);
        for row in 0..levels {
            let (p_out, q_out) = (top - row, row);
            let norm = 0.5 * (lnf[p_out] + lnf[q_out] - lnf[p_in] - lnf[q_in]);
            let k_min = p_out.saturating_sub(q_in);
            let k_max = p_in.min(p_out);
            let mut sum = ZERO;
            for k in k_min..=k_max {
                let l = p_out - k;
                let weight = (ln_binom(p_in, k) + ln_binom(q_in, l) + norm).exp();
                sum += a[k] * mb_conj[p_in - k] * b[l] * a_conj[q_in - l] * weight;
            }
            out[(row, col)] = sum;
        }
    }
    Ok(out)
}

/// Lift of the free-evolution phase `diag(e^{−iσ/2}, e^{iσ/2})`:
/// `diag(e^{−iσm})` over `m = F, …, −F`.
pub fn lift_diagonal_phase(sigma: f64, levels: usize) -> Result<Matrix> {
    if levels < 2 {
        return Err(Error::InvalidLevelCount(levels));
    }
    if !sigma.is_finite() {
        return Err(Error::NonFinite("phase"));
    }
    let diag: Vec<Complex64> = (0..levels)
        .map(|i| Complex64::from_polar(1.0, -sigma * crate::linalg::magnetic_number(levels, i)))
        .collect();
    Ok(Matrix::from_diagonal(&diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_hermitian_generator, make_spin_operators};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_pair(seed: f64) -> TwoLevelPropagator {
        let theta = 0.37 + seed;
        let (phase_a, phase_b) = (1.3 * seed - 0.2, 2.9 - seed);
        TwoLevelPropagator::new(
            Complex64::from_polar(theta.cos(), phase_a),
            Complex64::from_polar(theta.sin(), phase_b),
        )
        .unwrap()
    }

    #[test]
    fn identity_lifts_to_identity() {
        for n in 2..=7 {
            let m = lift(&TwoLevelPropagator::identity(), n).unwrap();
            assert!(m.max_abs_diff(&Matrix::identity(n)) < 1e-15);
        }
    }

    #[test]
    fn two_levels_is_exact_passthrough() {
        let p = sample_pair(0.4);
        assert_eq!(lift(&p, 2).unwrap(), p.matrix());
    }

    #[test]
    fn three_level_template() {
        let p = sample_pair(1.1);
        let (a, b) = (p.alpha, p.beta);
        let s2 = 2f64.sqrt();
        let expected = Matrix::from_rows(vec![
            vec![a * a, a * b * s2, b * b],
            vec![-a * b.conj() * s2, c(a.norm_sqr() - b.norm_sqr(), 0.0), a.conj() * b * s2],
            vec![b.conj() * b.conj(), -a.conj() * b.conj() * s2, a.conj() * a.conj()],
        ])
        .unwrap();
        assert!(lift(&p, 3).unwrap().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn lifted_landau_zener_matrix() {
        let (r, phi) = (0.6_f64, 0.3_f64);
        let s = (1.0 - r * r).sqrt();
        let p = TwoLevelPropagator::new(Complex64::from_polar(s, -phi), c(-r, 0.0)).unwrap();
        let q = r * (2.0 * (1.0 - r * r)).sqrt();
        let e = |x: f64| Complex64::from_polar(1.0, x);
        let expected = Matrix::from_rows(vec![
            vec![e(-2.0 * phi) * (1.0 - r * r), -e(-phi) * q, c(r * r, 0.0)],
            vec![e(-phi) * q, c(1.0 - 2.0 * r * r, 0.0), -e(phi) * q],
            vec![c(r * r, 0.0), e(phi) * q, e(2.0 * phi) * (1.0 - r * r)],
        ])
        .unwrap();
        assert!(lift(&p, 3).unwrap().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn lift_is_unitary_and_homomorphic() {
        for n in 2..=9 {
            let (p1, p2) = (sample_pair(0.3), sample_pair(2.2));
            let l1 = lift(&p1, n).unwrap();
            let l2 = lift(&p2, n).unwrap();
            assert!(l1.unitarity_defect() < 1e-10, "n={n}");
            let composed = lift(&p1.compose(&p2), n).unwrap();
            assert!(composed.max_abs_diff(&(&l1 * &l2)) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn rotation_matches_exponential() {
        let theta = 1.234_f64;
        let p = TwoLevelPropagator::new(c((theta / 2.0).cos(), 0.0), c(-(theta / 2.0).sin(), 0.0)).unwrap();
        for n in 2..=6 {
            let s = make_spin_operators(n).unwrap();
            let u = expm_hermitian_generator(&s.sy, theta).unwrap();
            assert!(lift(&p, n).unwrap().max_abs_diff(&u) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn spin_one_quarter_turn_about_y() {
        let s = make_spin_operators(3).unwrap();
        let u = expm_hermitian_generator(&s.sy, FRAC_PI_2).unwrap();
        let half = FRAC_PI_2 / 2.0;
        let p = TwoLevelPropagator::new(c(half.cos(), 0.0), c(-half.sin(), 0.0)).unwrap();
        assert!(lift(&p, 3).unwrap().max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn large_spin_stays_unitary() {
        let m = lift(&sample_pair(0.9), 31).unwrap();
        assert!(m.unitarity_defect() < 1e-10);
    }

    #[test]
    fn rejects_non_unitary_pair() {
        assert!(matches!(
            TwoLevelPropagator::new(c(1.0, 0.0), c(0.1, 0.0)),
            Err(Error::NotUnitary { .. })
        ));
        let bad = TwoLevelPropagator {
            alpha: c(0.9, 0.0),
            beta: ZERO,
        };
        assert!(lift(&bad, 3).is_err());
        assert!(matches!(lift(&TwoLevelPropagator::identity(), 1), Err(Error::InvalidLevelCount(1))));
    }

    #[test]
    fn diagonal_phase_lift() {
        for n in 2..=5 {
            assert!(lift_diagonal_phase(0.0, n).unwrap().max_abs_diff(&Matrix::identity(n)) < 1e-15);
        }
        let m = lift_diagonal_phase(PI, 3).unwrap();
        let expected = Matrix::from_diagonal(&[c(-1.0, 0.0), ONE, c(-1.0, 0.0)]);
        assert!(m.max_abs_diff(&expected) < 1e-15);

        let sigma = 0.7;
        let p = TwoLevelPropagator::new(Complex64::from_polar(1.0, -sigma / 2.0), ZERO).unwrap();
        for n in 2..=6 {
            let direct = lift_diagonal_phase(sigma, n).unwrap();
            assert!(direct.max_abs_diff(&lift(&p, n).unwrap()) < 1e-14, "n={n}");
        }
    }

    #[test]
    fn from_matrix_round_trip_and_structure_check() {
        let p = sample_pair(0.5);
        assert_eq!(TwoLevelPropagator::from_matrix(&p.matrix(), 1e-12).unwrap(), p);
        let mut m = p.matrix();
        m[(1, 0)] += c(0.1, 0.0);
        assert!(TwoLevelPropagator::from_matrix(&m, 1e-12).is_err());
    }

    #[test]
    fn transpose_matches_matrix_transpose() {
        let p = sample_pair(0.8);
        assert!(p.transpose().matrix().max_abs_diff(&p.matrix().transpose()) < 1e-15);
    }
}
