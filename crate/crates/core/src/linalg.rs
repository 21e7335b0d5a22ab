//! Dense complex linear algebra over row-major storage.
//!
//! Matrices here are small (a joint system/probe space of at most a few
//! thousand dimensions), so everything is dense. Tensor products always put
//! the system factor first: joint index `s * d_probe + k`.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|k| self[(k, k)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "{}x{} matrix applied to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(&a, &x)| a * x).sum())
            .collect())
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation between the two matrices; infinite when
    /// the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M^dagger|`; infinite for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub(crate) fn require_square(&self, what: &str) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "{what} must be square, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.rows)
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        self.require_square("Hermitian matrix")?;
        let deviation = self.hermiticity_error();
        if deviation > tol::CONSTRUCTION * self.max_abs().max(1.0) {
            return Err(Error::Hermiticity { deviation });
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
}

/// `<u|v>`, conjugating the left argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Anything that acts linearly on a probe (or joint) amplitude vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply_to(&self, v: &[C64]) -> Result<Vec<C64>>;

    /// `<v|O|v>`.
    fn expectation(&self, v: &[C64]) -> Result<C64> {
        Ok(inner(v, &self.apply_to(v)?))
    }
}

impl LinearOperator for ComplexMatrix {
    fn dim(&self) -> usize {
        self.cols
    }

    fn apply_to(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.apply(v)
    }
}

/// Real diagonal operator, e.g. the momentum `p` on a momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealDiagonal(pub Vec<f64>);

impl LinearOperator for RealDiagonal {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn apply_to(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.0.len() {
            return Err(Error::Shape(format!(
                "diagonal operator of dim {} applied to length {}",
                self.0.len(),
                v.len()
            )));
        }
        Ok(v.iter().zip(&self.0).map(|(&x, &d)| x * d).collect())
    }
}

/// Amplitude vector with its tensor-factor layout (system first).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if dims.is_empty() || expected != amplitudes.len() {
            return Err(Error::Shape(format!(
                "{} amplitudes for factor dims {dims:?}",
                amplitudes.len()
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Single-factor vector, rescaled to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        Self::new(vec![dim], amplitudes)?.into_normalized()
    }

    pub fn into_normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Input(format!(
                "cannot normalize vector of norm {norm}"
            )));
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        Ok(self)
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![ZERO; dim];
        amps[k] = ONE;
        Self {
            dims: vec![dim],
            amplitudes: amps,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, self.amplitudes)
    }

    pub(crate) fn require_normalized(&self, what: &str) -> Result<()> {
        if !self.is_normalized(tol::CONSTRUCTION) {
            return Err(Error::Input(format!(
                "{what} must be normalized (norm = {})",
                self.norm()
            )));
        }
        Ok(())
    }
}

/// Validated density operator with its factor layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.require_square("density matrix")?;
        if dims.iter().product::<usize>() != n {
            return Err(Error::Shape(format!("dims {dims:?} for a {n}x{n} matrix")));
        }
        let deviation = matrix.hermiticity_error();
        if deviation > tol::CONSTRUCTION {
            return Err(Error::Hermiticity { deviation });
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > tol::IDENTITY {
            return Err(Error::Input(format!("density matrix trace {trace} != 1")));
        }
        let lowest = eig_hermitian(&matrix)?.values[0];
        if lowest < -tol::IDENTITY {
            return Err(Error::Input(format!(
                "density matrix has negative eigenvalue {lowest:e}"
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// `|v><v|`, without re-validating positivity.
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        state.require_normalized("pure state")?;
        Ok(Self {
            dims: state.dims.clone(),
            matrix: ComplexMatrix::outer(&state.amplitudes, &state.amplitudes),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Spectral decomposition `M = V diag(values) V^dagger`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(f(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|k| v[(r, k)] * fv[k] * v[(c, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| C64::new(l, 0.0))
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.values.len())
            .map(|r| self.vectors[(r, k)])
            .collect()
    }

    /// Express `m` in the eigenbasis: `V^dagger m V`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.vectors.adjoint().matmul(m)?.matmul(&self.vectors)
    }

    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.vectors.matmul(m)?.matmul(&self.vectors.adjoint())
    }
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    m.require_hermitian()?;
    let n = m.rows();
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = ComplexMatrix::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    let eig = sym.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let raw = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| raw[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// `exp(-i theta h)` for Hermitian `h`.
pub fn unitary_of(h: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(h)?.map(|l| C64::from_polar(1.0, -theta * l)))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

pub fn kron_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    u.iter()
        .flat_map(|&a| v.iter().map(move |&b| a * b))
        .collect()
}

/// Probe operator `<bra| m |ket>` obtained by contracting the system indices
/// of a joint operator.
pub fn partial_inner(
    bra_sys: &StateVector,
    m: &ComplexMatrix,
    ket_sys: &StateVector,
) -> Result<ComplexMatrix> {
    let d_sys = bra_sys.dim();
    if ket_sys.dim() != d_sys {
        return Err(Error::Shape(format!(
            "bra of dim {d_sys}, ket of dim {}",
            ket_sys.dim()
        )));
    }
    let n = m.require_square("joint operator")?;
    if n % d_sys != 0 {
        return Err(Error::Shape(format!(
            "joint dim {n} is not a multiple of system dim {d_sys}"
        )));
    }
    let d_probe = n / d_sys;
    let bra = bra_sys.amplitudes();
    let ket = ket_sys.amplitudes();
    let mut out = ComplexMatrix::zeros(d_probe, d_probe);
    for (s, b) in bra.iter().enumerate() {
        let b = b.conj();
        if b == ZERO {
            continue;
        }
        for (t, &k) in ket.iter().enumerate() {
            let w = b * k;
            if w == ZERO {
                continue;
            }
            for r in 0..d_probe {
                let row = &m.row(s * d_probe + r)[t * d_probe..(t + 1) * d_probe];
                for (o, &x) in out.data[r * d_probe..(r + 1) * d_probe].iter_mut().zip(row) {
                    *o += w * x;
                }
            }
        }
    }
    Ok(out)
}

/// Unnormalized `<f| rho |f>` on the probe together with its trace.
pub fn partial_trace_system(
    rho: &DensityMatrix,
    projector_sys: &StateVector,
) -> Result<(ComplexMatrix, f64)> {
    projector_sys.require_normalized("projector state")?;
    match rho.dims() {
        [d_sys, _] if *d_sys == projector_sys.dim() => {}
        dims => {
            return Err(Error::Shape(format!(
                "density dims {dims:?} incompatible with system projector of dim {}",
                projector_sys.dim()
            )))
        }
    }
    let reduced = partial_inner(projector_sys, rho.matrix(), projector_sys)?;
    let weight = reduced.trace().re;
    Ok((reduced, weight))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gue, random_state, rng_for};
    use proptest::prelude::*;

    fn rel_frobenius(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(1e-300)
    }

    fn taylor_exp(h: &ComplexMatrix, theta: f64, terms: usize) -> ComplexMatrix {
        let gen = h.scale(C64::new(0.0, -theta));
        let mut term = ComplexMatrix::identity(h.rows());
        let mut sum = term.clone();
        for k in 1..terms {
            term = term
                .matmul(&gen)
                .unwrap()
                .scale(C64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term).unwrap();
        }
        sum
    }

    #[test]
    fn eig_identity_and_pauli_z() {
        let e = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let e = eig_hermitian(&sigma_z()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eig_hermitian(&rect), Err(Error::Shape(_))));
        let mut m = sigma_x();
        m[(0, 1)] = C64::new(2.0, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::Hermiticity { .. })));
    }

    #[test]
    fn eig_reconstructs_gue_6() {
        let h = gue(&mut rng_for(7, 0), 6);
        let e = eig_hermitian(&h).unwrap();
        assert!(rel_frobenius(&e.reconstruct(), &h) < 1e-10);
        let vtv = e.vectors.adjoint().matmul(&e.vectors).unwrap();
        assert!(vtv.max_abs_diff(&ComplexMatrix::identity(6)) < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn unitary_special_cases() {
        let u = unitary_of(&sigma_z(), 0.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let u = unitary_of(&sigma_z(), std::f64::consts::FRAC_PI_2).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[-I, I]);
        assert!(u.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn unitary_matches_taylor_series() {
        let h = gue(&mut rng_for(11, 0), 4).scale(C64::new(0.5, 0.0));
        let u = unitary_of(&h, 0.3).unwrap();
        assert!(u.max_abs_diff(&taylor_exp(&h, 0.3, 20)) < 1e-9);
        let uu = u.adjoint().matmul(&u).unwrap();
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn kron_examples() {
        let id6 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(id6, ComplexMatrix::identity(6));
        let p = [0.5, -1.0, 2.0];
        let m = kron(&sigma_z(), &ComplexMatrix::from_real_diagonal(&p));
        let expected: Vec<f64> = p.iter().copied().chain(p.iter().map(|x| -x)).collect();
        assert_eq!(m, ComplexMatrix::from_real_diagonal(&expected));
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = rng_for(3, 0);
        let a = gue(&mut rng, 3);
        let b = gue(&mut rng, 4);
        let u = random_state(&mut rng, 3);
        let v = random_state(&mut rng, 4);
        let lhs = kron(&a, &b)
            .apply(&kron_vec(u.amplitudes(), v.amplitudes()))
            .unwrap();
        let rhs = kron_vec(
            &a.apply(u.amplitudes()).unwrap(),
            &b.apply(v.amplitudes()).unwrap(),
        );
        let err = lhs
            .iter()
            .zip(&rhs)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn partial_inner_separable_and_eigenstate() {
        let mut rng = rng_for(5, 0);
        let x = gue(&mut rng, 3);
        let f = random_state(&mut rng, 2);
        let i = random_state(&mut rng, 2);
        let got = partial_inner(&f, &kron(&ComplexMatrix::identity(2), &x), &i).unwrap();
        assert!(got.max_abs_diff(&x.scale(f.inner(&i))) < 1e-12);

        let zero = StateVector::basis(2, 0);
        let got = partial_inner(&zero, &kron(&sigma_z(), &x), &zero).unwrap();
        assert!(got.max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn partial_inner_matches_index_loops() {
        let mut rng = rng_for(9, 0);
        let (ds, dp) = (3, 4);
        let m = gue(&mut rng, ds * dp);
        let f = random_state(&mut rng, ds);
        let i = random_state(&mut rng, ds);
        let got = partial_inner(&f, &m, &i).unwrap();
        for k in 0..dp {
            for l in 0..dp {
                let mut acc = ZERO;
                for s in 0..ds {
                    for t in 0..ds {
                        acc += f.amplitudes()[s].conj()
                            * m[(s * dp + k, t * dp + l)]
                            * i.amplitudes()[t];
                    }
                }
                assert!((acc - got[(k, l)]).norm() < 1e-12);
            }
        }
        assert!(matches!(
            partial_inner(&random_state(&mut rng, 5), &m, &random_state(&mut rng, 5)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn partial_trace_product_state() {
        let mut rng = rng_for(13, 0);
        let psi = random_state(&mut rng, 3);
        let rho_k = ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes());
        let zero = StateVector::basis(2, 0);
        let one = StateVector::basis(2, 1);
        let joint = kron(
            &ComplexMatrix::outer(zero.amplitudes(), zero.amplitudes()),
            &rho_k,
        );
        let rho = DensityMatrix::new(vec![2, 3], joint).unwrap();

        let (red, w) = partial_trace_system(&rho, &zero).unwrap();
        assert!(red.max_abs_diff(&rho_k) < 1e-15 && (w - 1.0).abs() < 1e-14);
        let (red, w) = partial_trace_system(&rho, &one).unwrap();
        assert!(red.max_abs() == 0.0 && w == 0.0);
    }

    #[test]
    fn partial_trace_matches_full_space_sandwich() {
        let mut rng = rng_for(17, 0);
        let chi = random_state(&mut rng, 6).with_dims(vec![2, 3]).unwrap();
        let rho = DensityMatrix::from_pure(&chi).unwrap();
        let f = random_state(&mut rng, 2);
        let (red, w) = partial_trace_system(&rho, &f).unwrap();

        let proj = kron(
            &ComplexMatrix::outer(f.amplitudes(), f.amplitudes()),
            &ComplexMatrix::identity(3),
        );
        let sandwich = proj.matmul(rho.matrix()).unwrap().matmul(&proj).unwrap();
        assert!((sandwich.trace().re - w).abs() < 1e-12);
        // <f|rho|f> embedded back as |f><f| (x) red equals the sandwich.
        let embedded = kron(&ComplexMatrix::outer(f.amplitudes(), f.amplitudes()), &red);
        assert!(embedded.max_abs_diff(&sandwich) < 1e-12);
    }

    #[test]
    fn partial_inner_basis_sum_is_partial_trace() {
        let mut rng = rng_for(19, 0);
        let m = gue(&mut rng, 3 * 4);
        let mut sum = ComplexMatrix::zeros(4, 4);
        for s in 0..3 {
            let e = StateVector::basis(3, s);
            sum = sum.add(&partial_inner(&e, &m, &e).unwrap()).unwrap();
        }
        let direct =
            ComplexMatrix::from_fn(4, 4, |k, l| (0..3).map(|s| m[(s * 4 + k, s * 4 + l)]).sum());
        assert!(sum.max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(vec![2], ComplexMatrix::identity(2)).is_err());
        let half = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
        assert!(DensityMatrix::new(vec![2], half.clone()).is_ok());
        assert!(matches!(
            DensityMatrix::new(vec![3], half),
            Err(Error::Shape(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eig_round_trip(seed in any::<u64>(), n in 1usize..=64) {
            let h = gue(&mut rng_for(seed, 0), n);
            let e = eig_hermitian(&h).unwrap();
            prop_assert!(rel_frobenius(&e.reconstruct(), &h) < 1e-10);
            let vtv = e.vectors.adjoint().matmul(&e.vectors).unwrap();
            prop_assert!(vtv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        }

        #[test]
        fn unitary_group_property(seed in any::<u64>(), n in 1usize..=8, t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
            let h = gue(&mut rng_for(seed, 0), n);
            let lhs = unitary_of(&h, t1).unwrap().matmul(&unitary_of(&h, t2).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&unitary_of(&h, t1 + t2).unwrap()) < 1e-10);
        }
    }
}
