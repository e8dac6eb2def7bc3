//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Tensor products follow one convention everywhere in the crate: the first
//! factor is the most significant index, so the basis state `|i⟩ ⊗ |j⟩` of a
//! `dA ⊗ dB` space sits at position `i * dB + j`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest dimension any vector or operator may have.
pub const MAX_DIM: usize = 65536;

/// Eigenvalues below this are dropped from entropy sums.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("dimension {0} exceeds the limit of {MAX_DIM}")]
    DimensionTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not Hermitian (max |A - A†| = {0:e})")]
    NotHermitian(f64),
    #[error("non-finite entry")]
    NonFinite,
    #[error("zero vector cannot be normalized")]
    ZeroNorm,
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NotConverged(usize),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(LinalgError::EmptyDimension)
    } else if dim > MAX_DIM {
        Err(LinalgError::DimensionTooLarge(dim))
    } else {
        Ok(())
    }
}

/// A ket in a finite-dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amps: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// The computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amps[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(LinalgError::ZeroNorm);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &StateVector) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &StateVector) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.sub(other).norm()
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &StateVector) -> Operator {
        let (r, c) = (self.dim(), other.dim());
        assert_eq!(r, c, "outer products are kept square");
        let mut data = Vec::with_capacity(r * c);
        for a in &self.amps {
            for b in &other.amps {
                data.push(a * b.conj());
            }
        }
        Operator { dim: r, data }
    }

    pub fn projector(&self) -> Operator {
        self.outer(self)
    }
}

impl Index<usize> for StateVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.amps[i]
    }
}

/// A square complex matrix, stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim.min(8) {
            let row: Vec<String> = (0..self.dim.min(8))
                .map(|j| format!("{:.4}", self[(i, j)]))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op[(i, i)] = C64::new(1.0, 0.0);
        }
        op
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            op[(i, i)] = C64::new(d, 0.0);
        }
        op
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Builds the operator whose columns are the given vectors.
    pub fn from_columns(columns: &[StateVector]) -> Result<Self> {
        let dim = columns.len();
        check_dim(dim)?;
        let mut op = Self::zeros(dim);
        for (j, col) in columns.iter().enumerate() {
            if col.dim() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    found: col.dim(),
                });
            }
            for i in 0..dim {
                op[(i, j)] = col[i];
            }
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> StateVector {
        StateVector {
            amps: (0..self.dim).map(|i| self[(i, j)]).collect(),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Operator) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, a) in row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.dim(), "apply dimension mismatch");
        let n = self.dim;
        StateVector {
            amps: (0..n)
                .map(|i| {
                    self.data[i * n..(i + 1) * n]
                        .iter()
                        .zip(&v.amps)
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Operator) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Operator) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Operator) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A − A†|` over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let err = self.hermiticity_error();
        if err > HERMITIAN_TOL {
            Err(LinalgError::NotHermitian(err))
        } else {
            Ok(())
        }
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> C64 {
        psi.inner(&self.apply(psi))
    }

    /// `max |UU† − 1|` over entries.
    pub fn unitarity_error(&self) -> f64 {
        self.matmul(&self.adjoint())
            .sub(&Operator::identity(self.dim))
            .max_abs()
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Kronecker product, first factor most significant.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = product_dim(self.dim(), other.dim())?;
        let mut amps = Vec::with_capacity(dim);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { amps })
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = product_dim(self.dim, other.dim)?;
        let db = other.dim;
        Ok(Self::from_fn(dim, |i, j| {
            self[(i / db, j / db)] * other[(i % db, j % db)]
        }))
    }
}

fn product_dim(a: usize, b: usize) -> Result<usize> {
    match a.checked_mul(b) {
        Some(d) if d <= MAX_DIM => Ok(d),
        Some(d) => Err(LinalgError::DimensionTooLarge(d)),
        None => Err(LinalgError::DimensionTooLarge(usize::MAX)),
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

/// Which factor of a bipartite space survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of an arbitrary square operator on `dA ⊗ dB`.
pub fn partial_trace_operator(op: &Operator, dims: (usize, usize), keep: Keep) -> Result<Operator> {
    let (da, db) = dims;
    if da * db != op.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: op.dim(),
            found: da * db,
        });
    }
    Ok(match keep {
        Keep::First => Operator::from_fn(da, |i, j| {
            (0..db).map(|k| op[(i * db + k, j * db + k)]).sum()
        }),
        Keep::Second => Operator::from_fn(db, |i, j| {
            (0..da).map(|k| op[(k * db + i, k * db + j)]).sum()
        }),
    })
}

/// `Tr_A[(X ⊗ 1_B) M]` for an operator `X` on the first factor.
pub fn traced_product(x: &Operator, m: &Operator, db: usize) -> Result<Operator> {
    let da = x.dim();
    if da * db != m.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: m.dim(),
            found: da * db,
        });
    }
    Ok(Operator::from_fn(db, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..da {
            for c2 in 0..da {
                let xc = x[(c, c2)];
                if xc.re != 0.0 || xc.im != 0.0 {
                    acc += xc * m[(c2 * db + a, c * db + b)];
                }
            }
        }
        acc
    }))
}

/// A validated density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(op: Operator) -> Result<Self> {
        let herm = op.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(LinalgError::InvalidDensity(format!(
                "not Hermitian (error {herm:e})"
            )));
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(LinalgError::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let eig = hermitian_eig(&op)?;
        if let Some(&low) = eig.values.first() {
            if low < -PSD_TOL {
                return Err(LinalgError::InvalidDensity(format!(
                    "negative eigenvalue {low:e}"
                )));
            }
        }
        Ok(Self(op))
    }

    /// `|ψ⟩⟨ψ|` for the normalized `ψ`.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        Ok(Self(psi.normalized()?.projector()))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.0)?.values)
    }

    pub fn partial_trace(&self, dims: (usize, usize), keep: Keep) -> Result<DensityMatrix> {
        partial_trace(self, dims, keep)
    }
}

pub fn partial_trace(
    rho: &DensityMatrix,
    dims: (usize, usize),
    keep: Keep,
) -> Result<DensityMatrix> {
    // Hermiticity, trace and positivity are inherited from rho.
    Ok(DensityMatrix(partial_trace_operator(&rho.0, dims, keep)?))
}

/// Eigendecomposition `A = V·diag(λ)·V†` with ascending `λ`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Operator,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> StateVector {
        self.vectors.column(k)
    }

    pub fn vectors(&self) -> Vec<StateVector> {
        (0..self.dim()).map(|k| self.vector(k)).collect()
    }

    /// `V·diag(f(λ))·V†`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> Operator {
        let n = self.dim();
        let weights: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        Operator::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * weights[k] * v[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> Operator {
        self.map(|l| C64::new(l, 0.0))
    }

    /// `e^{−iAt}`.
    pub fn propagator(&self, t: f64) -> Operator {
        if t == 0.0 {
            return Operator::identity(self.dim());
        }
        self.map(|l| C64::new(0.0, -l * t).exp())
    }

    /// `e^{−iAt}·v` without forming the propagator.
    pub fn propagate(&self, t: f64, v: &StateVector) -> StateVector {
        let n = self.dim();
        assert_eq!(n, v.dim());
        if t == 0.0 {
            return v.clone();
        }
        let vecs = &self.vectors;
        let coeffs: Vec<C64> = (0..n)
            .map(|k| {
                let c: C64 = (0..n).map(|i| vecs[(i, k)].conj() * v[i]).sum();
                c * C64::new(0.0, -self.values[k] * t).exp()
            })
            .collect();
        StateVector {
            amps: (0..n)
                .map(|i| (0..n).map(|k| vecs[(i, k)] * coeffs[k]).sum())
                .collect(),
        }
    }
}

/// Hermitian eigensolver using cyclic complex Jacobi rotations.
pub fn hermitian_eig(op: &Operator) -> Result<Eigen> {
    op.ensure_hermitian()?;
    let n = op.dim();
    // Symmetrize so rounding in the input cannot leak into the rotations.
    let mut a = Operator::from_fn(n, |i, j| (op[(i, j)] + op[(j, i)].conj()) * 0.5);
    // Row k of `vt` accumulates eigenvector k.
    let mut vt = Operator::identity(n);
    jacobi(&mut a, &mut vt)?;

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Operator::from_fn(n, |i, j| vt[(order[j], i)]);
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm(a: &Operator) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(a: &mut Operator, vt: &mut Operator) -> Result<()> {
    let n = a.dim();
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(());
    }
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a) <= 1e-15 * scale {
            return Ok(());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Rotation block J = diag(1, e^{-iφ}) · [[c, s], [-s, c]] with φ = arg(a_pq).
                let phase = (apq / mag).conj();
                let blk = [C64::new(c, 0.0), C64::new(s, 0.0), phase * (-s), phase * c];
                rotate(a, vt, p, q, blk);
                a[(p, p)] = C64::new(app - t * mag, 0.0);
                a[(q, q)] = C64::new(aqq + t * mag, 0.0);
            }
        }
    }
    if off_diagonal_norm(a) <= 1e-15 * scale {
        Ok(())
    } else {
        Err(LinalgError::NotConverged(MAX_SWEEPS))
    }
}

/// `A ← J†AJ` and `V ← VJ` (stored transposed), using Hermiticity of `A` so
/// only rows are touched in the main loop.
fn rotate(a: &mut Operator, vt: &mut Operator, p: usize, q: usize, blk: [C64; 4]) {
    let n = a.dim();
    let [jpp, jpq, jqp, jqq] = blk;
    let (cpp, cpq, cqp, cqq) = (jpp.conj(), jpq.conj(), jqp.conj(), jqq.conj());
    {
        let (lo, hi) = a.data.split_at_mut(q * n);
        let row_p = &mut lo[p * n..(p + 1) * n];
        let row_q = &mut hi[..n];
        for k in 0..n {
            let apk = row_p[k];
            let aqk = row_q[k];
            row_p[k] = cpp * apk + cqp * aqk;
            row_q[k] = cpq * apk + cqq * aqk;
        }
    }
    for k in 0..n {
        if k != p && k != q {
            a.data[k * n + p] = a.data[p * n + k].conj();
            a.data[k * n + q] = a.data[q * n + k].conj();
        }
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);

    let (lo, hi) = vt.data.split_at_mut(q * n);
    let row_p = &mut lo[p * n..(p + 1) * n];
    let row_q = &mut hi[..n];
    for k in 0..n {
        let vkp = row_p[k];
        let vkq = row_q[k];
        row_p[k] = vkp * jpp + vkq * jqp;
        row_q[k] = vkp * jpq + vkq * jqq;
    }
}

/// `e^{−iHt}` with `ħ = 1`.
pub fn evolve_unitary(h: &Operator, t: f64) -> Result<Operator> {
    if t == 0.0 {
        h.ensure_hermitian()?;
        return Ok(Operator::identity(h.dim()));
    }
    Ok(hermitian_eig(h)?.propagator(t))
}

/// Entropy from a spectrum, in nats.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&l| l > ENTROPY_CUTOFF)
        .map(|&l| -l * l.ln())
        .sum();
    s.max(0.0)
}

/// `S(ρ) = −Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eigenvalues()?))
}

/// `I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB)`.
pub fn mutual_information(rho: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let sa = von_neumann_entropy(&rho.partial_trace(dims, Keep::First)?)?;
    let sb = von_neumann_entropy(&rho.partial_trace(dims, Keep::Second)?)?;
    let sab = von_neumann_entropy(rho)?;
    Ok(sa + sb - sab)
}
