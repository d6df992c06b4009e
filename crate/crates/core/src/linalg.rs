//! Dense complex matrices, state vectors and spin operators.
//!
//! Every matrix in this crate is tiny (a handful of levels), so storage is a
//! flat row-major `Vec` and all products are naive triple loops.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::{Error, Result};

/// Complex amplitude used for every matrix entry and state component.
pub type ComplexAmplitude = Complex64;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged input and non-finite entries.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix must have at least one row".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            data.extend(row);
        }
        if !data.iter().all(|&z| is_finite(z)) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|&z| is_finite(z))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max absolute row sum (induced infinity norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Max-abs distance between two matrices of equal dimension.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Max-abs entry of `M†M − I`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.dim());
        let amps = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self[(i, j)] * v.amplitudes[j])
                    .sum::<Complex64>()
            })
            .collect();
        StateVector { amplitudes: amps }
    }

    /// Squared moduli of the entries: transition probabilities `|U_ij|²`.
    pub fn populations(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)].norm_sqr()).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Matrix product `A·B`, checked for matching dimensions.
pub fn compose(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(a * b)
}

/// Product of a chain of factors, left to right.
pub fn compose_all<'a>(factors: impl IntoIterator<Item = &'a Matrix>) -> Result<Matrix> {
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
    iter.try_fold(first.clone(), |acc, m| compose(&acc, m))
}

/// True iff every entry of `M†M − I` is within `tol`.
pub fn is_unitary(m: &Matrix, tol: f64) -> bool {
    m.unitarity_defect() <= tol
}

/// General matrix exponential by scaling and squaring of a Taylor series.
///
/// Intended for small matrices with moderate norm; the argument is scaled
/// until its infinity norm is below 1/4, where the series converges to
/// machine precision in well under 20 terms.
pub(crate) fn expm(a: &Matrix) -> Matrix {
    let n = a.dim();
    let norm = a.norm_inf();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));

    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=30 {
        term = (&term * &scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        result = result.add(&term);
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns the eigenvalues and the unitary whose columns are the eigenvectors.
pub(crate) fn hermitian_eigen(h: &Matrix) -> (Vec<f64>, Matrix) {
    let n = h.dim();
    let mut a = h.clone();
    let mut v = Matrix::identity(n);
    let scale = h.max_abs().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-18 * scale {
                    continue;
                }
                // D = diag(1, e^{-iθ}) makes the pivot real; then a real rotation
                let phase = apq / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e = phase.conj();
                // columns: p' = c·p − s·e·q, q' = s·p + c·e·q
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c - akq * e * s;
                    a[(k, q)] = akp * s + akq * e * c;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * c - vkq * e * s;
                    v[(k, q)] = vkp * s + vkq * e * c;
                }
                // rows: apply the adjoint
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * c - aqk * e.conj() * s;
                    a[(q, k)] = apk * s + aqk * e.conj() * c;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    (values, v)
}

/// `exp(−i·H·t)` for Hermitian `H`, via its spectral decomposition.
pub fn expm_hermitian_generator(h: &Matrix, t: f64) -> Result<Matrix> {
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    if !t.is_finite() || !h.is_finite() {
        return Err(Error::NonFinite("generator or time"));
    }
    let (values, vectors) = hermitian_eigen(h);
    let phases: Vec<Complex64> = values.iter().map(|&e| Complex64::from_polar(1.0, -e * t)).collect();
    Ok(&(&vectors * &Matrix::from_diagonal(&phases)) * &vectors.adjoint())
}

/// Spin operators `Sx, Sy, Sz` (ħ = 1) of an `n`-level system, `F = (n−1)/2`.
///
/// Basis order is `m = F, F−1, …, −F`.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub levels: usize,
    pub sx: Matrix,
    pub sy: Matrix,
    pub sz: Matrix,
}

impl SpinOperators {
    pub fn spin(&self) -> f64 {
        (self.levels as f64 - 1.0) / 2.0
    }

    /// Max-abs deviation over the three cyclic commutation relations.
    pub fn commutator_defect(&self) -> f64 {
        let comm = |a: &Matrix, b: &Matrix| (a * b).sub(&(b * a));
        let d1 = comm(&self.sx, &self.sy).max_abs_diff(&self.sz.scale(I));
        let d2 = comm(&self.sy, &self.sz).max_abs_diff(&self.sx.scale(I));
        let d3 = comm(&self.sz, &self.sx).max_abs_diff(&self.sy.scale(I));
        d1.max(d2).max(d3)
    }
}

/// Magnetic quantum number of basis index `i` in an `n`-level system.
pub fn magnetic_number(levels: usize, i: usize) -> f64 {
    (levels as f64 - 1.0) / 2.0 - i as f64
}

pub fn make_spin_operators(levels: usize) -> Result<SpinOperators> {
    if levels < 2 {
        return Err(Error::InvalidLevelCount(levels));
    }
    let f = (levels as f64 - 1.0) / 2.0;
    let mut sz = Matrix::zeros(levels);
    let mut raise = Matrix::zeros(levels);
    for i in 0..levels {
        let m = magnetic_number(levels, i);
        sz[(i, i)] = Complex64::new(m, 0.0);
        if i > 0 {
            // <m+1| S+ |m>
            raise[(i - 1, i)] = Complex64::new((f * (f + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let lower = raise.adjoint();
    let sx = raise.add(&lower).scale(Complex64::new(0.5, 0.0));
    let sy = raise.sub(&lower).scale(Complex64::new(0.0, -0.5));
    Ok(SpinOperators { levels, sx, sy, sz })
}

/// Normalised state vector in a fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes as given; callers that need a unit vector check `norm`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("state vector must be non-empty".into()));
        }
        if !amplitudes.iter().all(|&z| is_finite(z)) {
            return Err(Error::NonFinite("state amplitude"));
        }
        Ok(Self { amplitudes })
    }

    /// Unit vector on basis index `index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {dim} levels"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { amplitudes: amps })
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalise a zero vector".into()));
        }
        for z in &mut self.amplitudes {
            *z /= norm;
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}
