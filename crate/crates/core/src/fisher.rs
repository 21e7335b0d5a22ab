//! Quantum (SLD) and classical Fisher information, weak values, and the
//! Bures-distance cross-check.

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, inner, norm_sqr, ComplexMatrix, DensityMatrix, StateVector, C64,
};
use crate::tol;

/// `4 (<dchi|dchi> - |<dchi|chi>|^2)` for a normalized pure state.
pub fn qfi_pure(chi: &StateVector, dchi: &StateVector) -> Result<f64> {
    if chi.dim() != dchi.dim() {
        return Err(Error::Shape(format!(
            "state of dim {} with derivative of dim {}",
            chi.dim(),
            dchi.dim()
        )));
    }
    let d = dchi.amplitudes();
    let overlap = inner(d, chi.amplitudes());
    Ok((4.0 * (norm_sqr(d) - overlap.norm_sqr())).max(0.0))
}

/// Symmetric logarithmic derivative `L` solving `drho = (rho L + L rho) / 2`.
#[derive(Debug, Clone)]
pub struct SldOperator {
    pub matrix: ComplexMatrix,
    /// Number of eigenvalues of `rho` above the rank threshold.
    pub support_dim: usize,
}

impl SldOperator {
    /// `|| drho - (rho L + L rho) / 2 ||_F`.
    pub fn residual(&self, rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<f64> {
        let r = rho.matrix();
        let anti = r.matmul(&self.matrix)?.add(&self.matrix.matmul(r)?)?;
        Ok(drho.sub(&anti.scale(C64::new(0.5, 0.0)))?.frobenius_norm())
    }
}

struct SldSolution {
    sld: SldOperator,
    fisher: f64,
}

fn solve_sld(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<SldSolution> {
    let n = rho.dim();
    if drho.rows() != n || drho.cols() != n {
        return Err(Error::Shape(format!(
            "{}x{} derivative for a {n}x{n} state",
            drho.rows(),
            drho.cols()
        )));
    }
    let scale = drho.max_abs().max(1.0);
    let herm = drho.hermiticity_error();
    if herm > tol::IDENTITY * scale {
        return Err(Error::Input(format!(
            "state derivative is not Hermitian (deviation {herm:e})"
        )));
    }
    let tr = drho.trace();
    if tr.norm() > 1e-9 * scale {
        return Err(Error::Input(format!(
            "state derivative has trace {tr}, expected 0"
        )));
    }

    let eig = eig_hermitian(rho.matrix())?;
    let lambda = &eig.values;
    let lmax = lambda.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let threshold = tol::RANK * lmax;
    let d = eig.to_eigenbasis(drho)?;

    let mut l_eig = ComplexMatrix::zeros(n, n);
    let mut fisher = 0.0;
    for j in 0..n {
        for k in 0..n {
            let denom = lambda[j] + lambda[k];
            if denom > threshold {
                let v = d[(j, k)] * (2.0 / denom);
                l_eig[(j, k)] = v;
                // Tr(rho L^2) = sum_jk lambda_j |L_jk|^2
                fisher += lambda[j].max(0.0) * v.norm_sqr();
            }
        }
    }
    let mut matrix = eig.from_eigenbasis(&l_eig)?;
    for r in 0..n {
        for c in r + 1..n {
            let avg = (matrix[(r, c)] + matrix[(c, r)].conj()) * 0.5;
            matrix[(r, c)] = avg;
            matrix[(c, r)] = avg.conj();
        }
        matrix[(r, r)] = C64::new(matrix[(r, r)].re, 0.0);
    }
    let support_dim = lambda.iter().filter(|&&l| l > threshold).count();
    Ok(SldSolution {
        sld: SldOperator {
            matrix,
            support_dim,
        },
        fisher,
    })
}

/// Solves for the SLD in the eigenbasis of `rho`, leaving blocks with
/// `lambda_j + lambda_k` below the rank threshold at zero.
pub fn sld_solve(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<SldOperator> {
    solve_sld(rho, drho).map(|s| s.sld)
}

/// `Tr(rho L^2)` with `L` from [`sld_solve`].
pub fn qfi_mixed(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<f64> {
    solve_sld(rho, drho).map(|s| s.fisher)
}

/// A density sampled on an increasing grid of outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 2 {
            return Err(Error::Input(format!(
                "{} abscissae for {} density values",
                xs.len(),
                values.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("abscissae must be strictly increasing".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Input(format!(
                "density value {v} is not a nonnegative number"
            )));
        }
        Ok(Self { xs, values })
    }

    pub fn from_fn(xs: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.xs, &self.values)
    }

    pub fn require_normalized(&self, tol: f64) -> Result<()> {
        let total = self.integral();
        if (total - 1.0).abs() > tol {
            return Err(Error::Input(format!(
                "density integrates to {total}, expected 1"
            )));
        }
        Ok(())
    }
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// `int (d_theta f)^2 / f dx` by the trapezoid rule on the density's grid.
pub fn classical_fisher(pdf: &TabulatedDensity, dpdf: &[f64]) -> Result<f64> {
    if dpdf.len() != pdf.xs.len() {
        return Err(Error::Shape(format!(
            "{} derivative samples for {} density samples",
            dpdf.len(),
            pdf.xs.len()
        )));
    }
    pdf.require_normalized(1e-8)?;
    let drift = trapezoid(&pdf.xs, dpdf);
    if drift.abs() > 1e-8 {
        return Err(Error::Input(format!(
            "density derivative integrates to {drift:e}, expected 0"
        )));
    }
    let integrand: Vec<f64> = pdf
        .values
        .iter()
        .zip(dpdf)
        .map(|(&f, &df)| if f < 1e-300 { 0.0 } else { df * df / f })
        .collect();
    Ok(trapezoid(&pdf.xs, &integrand))
}

/// Fisher information of a discrete outcome distribution.
pub fn classical_fisher_discrete(p: &[f64], dp: &[f64]) -> Result<f64> {
    if p.len() != dp.len() {
        return Err(Error::Shape(format!(
            "{} probabilities, {} derivatives",
            p.len(),
            dp.len()
        )));
    }
    Ok(p.iter()
        .zip(dp)
        .map(|(&q, &dq)| if q < 1e-300 { 0.0 } else { dq * dq / q })
        .sum())
}

/// `<f|A|i> / <f|i>`.
pub fn weak_value(a: &ComplexMatrix, i: &StateVector, f: &StateVector) -> Result<C64> {
    let overlap = f.inner(i);
    if overlap.norm() <= tol::MIN_OVERLAP {
        return Err(Error::OrthogonalSelection {
            overlap: overlap.norm(),
        });
    }
    let ai = a.apply(i.amplitudes())?;
    Ok(inner(f.amplitudes(), &ai) / overlap)
}

type PureMap = Box<dyn Fn(f64) -> Result<StateVector> + Send + Sync>;
type MixedMap = Box<dyn Fn(f64) -> Result<DensityMatrix> + Send + Sync>;
type MatrixMap = Box<dyn Fn(f64) -> Result<ComplexMatrix> + Send + Sync>;

/// One-parameter family of states, with an optional analytic derivative.
///
/// Without one, derivatives come from central differences at steps `h` and
/// `h/2`, which must agree to 1e-6 relative before the Richardson
/// combination is returned.
pub enum ParamStateFamily {
    Pure {
        state: PureMap,
        derivative: Option<PureMap>,
    },
    Mixed {
        state: MixedMap,
        derivative: Option<MatrixMap>,
    },
}

pub const FD_STEP: f64 = 1e-5;

fn richardson(at: impl Fn(f64) -> Result<Vec<C64>>, theta: f64, h: f64) -> Result<Vec<C64>> {
    let central = |step: f64| -> Result<Vec<C64>> {
        let plus = at(theta + step)?;
        let minus = at(theta - step)?;
        Ok(plus
            .iter()
            .zip(&minus)
            .map(|(a, b)| (a - b) / (2.0 * step))
            .collect())
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    let diff: f64 = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let size = norm_sqr(&fine).sqrt();
    if diff > 1e-6 * size.max(1e-6) {
        return Err(Error::Numerical(format!(
            "finite differences at steps {h:e} and {:e} disagree ({diff:e} vs norm {size:e})",
            h / 2.0
        )));
    }
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (f * 4.0 - c) / 3.0)
        .collect())
}

impl ParamStateFamily {
    pub fn pure(state: impl Fn(f64) -> Result<StateVector> + Send + Sync + 'static) -> Self {
        Self::Pure {
            state: Box::new(state),
            derivative: None,
        }
    }

    pub fn pure_with_derivative(
        state: impl Fn(f64) -> Result<StateVector> + Send + Sync + 'static,
        derivative: impl Fn(f64) -> Result<StateVector> + Send + Sync + 'static,
    ) -> Self {
        Self::Pure {
            state: Box::new(state),
            derivative: Some(Box::new(derivative)),
        }
    }

    pub fn mixed(state: impl Fn(f64) -> Result<DensityMatrix> + Send + Sync + 'static) -> Self {
        Self::Mixed {
            state: Box::new(state),
            derivative: None,
        }
    }

    pub fn mixed_with_derivative(
        state: impl Fn(f64) -> Result<DensityMatrix> + Send + Sync + 'static,
        derivative: impl Fn(f64) -> Result<ComplexMatrix> + Send + Sync + 'static,
    ) -> Self {
        Self::Mixed {
            state: Box::new(state),
            derivative: Some(Box::new(derivative)),
        }
    }

    /// Drops any analytic derivative, forcing finite differences.
    pub fn without_derivative(self) -> Self {
        match self {
            Self::Pure { state, .. } => Self::Pure {
                state,
                derivative: None,
            },
            Self::Mixed { state, .. } => Self::Mixed {
                state,
                derivative: None,
            },
        }
    }

    pub fn qfi(&self, theta: f64) -> Result<f64> {
        self.qfi_with_step(theta, FD_STEP)
    }

    pub fn qfi_with_step(&self, theta: f64, h: f64) -> Result<f64> {
        match self {
            Self::Pure { state, derivative } => {
                let chi = state(theta)?;
                let dchi = match derivative {
                    Some(d) => d(theta)?,
                    None => {
                        let amps = richardson(|t| Ok(state(t)?.into_amplitudes()), theta, h)?;
                        StateVector::new(chi.dims().to_vec(), amps)?
                    }
                };
                qfi_pure(&chi, &dchi)
            }
            Self::Mixed { state, derivative } => {
                let rho = state(theta)?;
                let drho = match derivative {
                    Some(d) => d(theta)?,
                    None => {
                        let n = rho.dim();
                        let data =
                            richardson(|t| Ok(state(t)?.matrix().data().to_vec()), theta, h)?;
                        ComplexMatrix::from_row_major(n, n, data)?
                    }
                };
                qfi_mixed(&rho, &drho)
            }
        }
    }
}

/// Squared Bures distance `2 - 2 |<a|b>|` between pure states, evaluated as
/// `min_phi || a - e^{i phi} b ||^2` to avoid cancellation.
pub fn squared_bures_pure(a: &StateVector, b: &StateVector) -> f64 {
    let o = a.inner(b);
    if o.norm() == 0.0 {
        return 2.0;
    }
    let phase = o.conj() / o.norm();
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum()
}

/// Uhlmann fidelity `Tr sqrt(sqrt(r1) r2 sqrt(r1))`.
pub fn fidelity(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    let root = eig_hermitian(r1.matrix())?.map(|l| C64::new(l.max(0.0).sqrt(), 0.0));
    let m = root.matmul(r2.matrix())?.matmul(&root)?;
    let n = m.rows();
    let sym = ComplexMatrix::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    Ok(eig_hermitian(&sym)?
        .values
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum())
}

pub fn squared_bures(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    Ok((2.0 - 2.0 * fidelity(r1, r2)?).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuresCheck {
    pub squared_bures: f64,
    /// `I(theta) dtheta^2 / 4`.
    pub prediction: f64,
}

impl BuresCheck {
    pub fn ratio(&self) -> f64 {
        self.squared_bures / self.prediction
    }
}

/// Squared Bures distance between the family at `theta` and `theta + dtheta`
/// next to its Fisher-metric prediction.
pub fn bures_metric_check(
    family: &ParamStateFamily,
    theta: f64,
    dtheta: f64,
) -> Result<BuresCheck> {
    let squared_bures = match family {
        ParamStateFamily::Pure { state, .. } => {
            squared_bures_pure(&state(theta)?, &state(theta + dtheta)?)
        }
        ParamStateFamily::Mixed { state, .. } => {
            squared_bures(&state(theta)?, &state(theta + dtheta)?)?
        }
    };
    let prediction = family.qfi(theta)? * dtheta * dtheta / 4.0;
    Ok(BuresCheck {
        squared_bures,
        prediction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, sigma_z, unitary_of, I, ONE, ZERO};
    use crate::random::{gue, random_state, rng_for};
    use crate::state::{discretize_probe, joint_initial, GaussianProbe, ProbeGrid};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn gaussian_shift_family(sigma: f64) -> ParamStateFamily {
        let probe = GaussianProbe::new(sigma).unwrap();
        let grid = ProbeGrid::default_for(&probe);
        let psi = discretize_probe(&probe, &grid).unwrap();
        let ps = grid.momenta();
        let (psi2, ps2) = (psi.clone(), ps.clone());
        ParamStateFamily::pure_with_derivative(
            move |t| {
                let amps = psi
                    .amplitudes()
                    .iter()
                    .zip(&ps)
                    .map(|(&a, &p)| a * C64::from_polar(1.0, -t * p));
                StateVector::new(vec![ps.len()], amps.collect())
            },
            move |t| {
                let amps = psi2
                    .amplitudes()
                    .iter()
                    .zip(&ps2)
                    .map(|(&a, &p)| a * C64::from_polar(1.0, -t * p) * (-I * p));
                StateVector::new(vec![ps2.len()], amps.collect())
            },
        )
    }

    /// `rho(theta) = U rho0 U^dagger` with `U = exp(-i theta H)`.
    fn unitary_mixed_family(seed: u64, n: usize, rank: usize) -> (ComplexMatrix, ComplexMatrix) {
        let mut rng = rng_for(seed, 0);
        let h = gue(&mut rng, n);
        let mut rho0 = ComplexMatrix::zeros(n, n);
        let weights: Vec<f64> = (1..=rank).map(|k| k as f64).collect();
        let total: f64 = weights.iter().sum();
        for w in weights {
            let v = random_state(&mut rng, n);
            rho0 = rho0
                .add(
                    &ComplexMatrix::outer(v.amplitudes(), v.amplitudes())
                        .scale(C64::new(w / total, 0.0)),
                )
                .unwrap();
        }
        (h, rho0)
    }

    fn evolve(
        h: &ComplexMatrix,
        rho0: &ComplexMatrix,
        theta: f64,
    ) -> (DensityMatrix, ComplexMatrix) {
        let u = unitary_of(h, theta).unwrap();
        let rho = u.matmul(rho0).unwrap().matmul(&u.adjoint()).unwrap();
        let n = rho.rows();
        let rho = ComplexMatrix::from_fn(n, n, |r, c| (rho[(r, c)] + rho[(c, r)].conj()) * 0.5);
        let comm = h
            .matmul(&rho)
            .unwrap()
            .sub(&rho.matmul(h).unwrap())
            .unwrap();
        let drho = comm.scale(-I);
        (DensityMatrix::new(vec![n], rho).unwrap(), drho)
    }

    #[test]
    fn qfi_pure_examples() {
        let chi = StateVector::basis(3, 1);
        let zero = StateVector::new(vec![3], vec![ZERO; 3]).unwrap();
        assert_eq!(qfi_pure(&chi, &zero).unwrap(), 0.0);
        assert!(matches!(
            qfi_pure(&chi, &StateVector::basis(2, 0)),
            Err(Error::Shape(_))
        ));
        // 4 Var(p) = 1/sigma^2
        let fam = gaussian_shift_family(1.0);
        assert!((fam.qfi(0.7).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn qfi_pure_of_joint_family_is_four_times_variance() {
        let mut rng = rng_for(31, 0);
        let h = gue(&mut rng, 12);
        let i = random_state(&mut rng, 3);
        let psi = random_state(&mut rng, 4);
        let v = joint_initial(&i, &psi).unwrap();
        let u = unitary_of(&h, 0.8).unwrap();
        let chi = StateVector::new(vec![3, 4], u.apply(v.amplitudes()).unwrap()).unwrap();
        let dchi = StateVector::new(
            vec![3, 4],
            h.apply(chi.amplitudes())
                .unwrap()
                .into_iter()
                .map(|x| -I * x)
                .collect(),
        )
        .unwrap();
        let hv = h.apply(v.amplitudes()).unwrap();
        let mean = inner(v.amplitudes(), &hv).re;
        let second = norm_sqr(&hv);
        let expected = 4.0 * (second - mean * mean);
        assert!((qfi_pure(&chi, &dchi).unwrap() - expected).abs() < 1e-8 * expected);
    }

    #[test]
    fn sld_classical_diagonal() {
        let p = [0.2, 0.3, 0.5];
        let dp = [0.1, -0.25, 0.15];
        let rho = DensityMatrix::new(vec![3], ComplexMatrix::from_real_diagonal(&p)).unwrap();
        let drho = ComplexMatrix::from_real_diagonal(&dp);
        let sld = sld_solve(&rho, &drho).unwrap();
        for k in 0..3 {
            assert!((sld.matrix[(k, k)].re - dp[k] / p[k]).abs() < 1e-12);
        }
        assert_eq!(sld.support_dim, 3);
        let classical = classical_fisher_discrete(&p, &dp).unwrap();
        assert!((qfi_mixed(&rho, &drho).unwrap() - classical).abs() < 1e-10);
    }

    #[test]
    fn sld_pure_state_is_twice_derivative() {
        let mut rng = rng_for(37, 0);
        let h = gue(&mut rng, 5);
        let v = random_state(&mut rng, 5);
        let u = unitary_of(&h, 0.4).unwrap();
        let chi = u.apply(v.amplitudes()).unwrap();
        let dchi: Vec<C64> = h.apply(&chi).unwrap().into_iter().map(|x| -I * x).collect();
        let rho =
            DensityMatrix::from_pure(&StateVector::new(vec![5], chi.clone()).unwrap()).unwrap();
        let drho = ComplexMatrix::outer(&dchi, &chi)
            .add(&ComplexMatrix::outer(&chi, &dchi))
            .unwrap();

        let sld = sld_solve(&rho, &drho).unwrap();
        assert_eq!(sld.support_dim, 1);
        assert!(sld.residual(&rho, &drho).unwrap() < 1e-8 * drho.frobenius_norm().max(1.0));
        assert!(sld.matrix.max_abs_diff(&drho.scale(C64::new(2.0, 0.0))) < 1e-8);
        let pure = qfi_pure(
            &StateVector::new(vec![5], chi).unwrap(),
            &StateVector::new(vec![5], dchi).unwrap(),
        )
        .unwrap();
        assert!((qfi_mixed(&rho, &drho).unwrap() - pure).abs() < 1e-8);
    }

    #[test]
    fn sld_full_rank_trace_vanishes() {
        let (h, rho0) = unitary_mixed_family(41, 4, 4);
        let (rho, drho) = evolve(&h, &rho0, 0.6);
        let sld = sld_solve(&rho, &drho).unwrap();
        assert_eq!(sld.support_dim, 4);
        let tr = rho.matrix().matmul(&sld.matrix).unwrap().trace();
        assert!(tr.norm() < 1e-9);
        assert!(sld.residual(&rho, &drho).unwrap() < 1e-8);
        assert!(sld.matrix.is_hermitian(1e-10));
    }

    #[test]
    fn sld_parameter_free_state() {
        let rho = DensityMatrix::new(
            vec![3],
            ComplexMatrix::identity(3).scale(C64::new(1.0 / 3.0, 0.0)),
        )
        .unwrap();
        assert_eq!(qfi_mixed(&rho, &ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn sld_rejects_bad_derivative() {
        let rho = DensityMatrix::new(
            vec![2],
            ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0)),
        )
        .unwrap();
        let not_traceless = ComplexMatrix::from_real_diagonal(&[0.1, 0.0]);
        assert!(matches!(
            sld_solve(&rho, &not_traceless),
            Err(Error::Input(_))
        ));
        let mut not_hermitian = ComplexMatrix::zeros(2, 2);
        not_hermitian[(0, 1)] = ONE;
        assert!(matches!(
            sld_solve(&rho, &not_hermitian),
            Err(Error::Input(_))
        ));
    }

    fn gaussian_location(theta: f64, sigma: f64) -> (TabulatedDensity, Vec<f64>) {
        let xs: Vec<f64> = (0..=4800)
            .map(|k| theta + sigma * (-12.0 + k as f64 * 0.005))
            .collect();
        let f = |x: f64| {
            (-(x - theta).powi(2) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
        };
        let pdf = TabulatedDensity::from_fn(xs.clone(), f).unwrap();
        let d = xs
            .iter()
            .map(|&x| f(x) * (x - theta) / (sigma * sigma))
            .collect();
        (pdf, d)
    }

    #[test]
    fn classical_fisher_gaussian_location() {
        let (pdf, d) = gaussian_location(0.3, 1.0);
        assert!((classical_fisher(&pdf, &d).unwrap() - 1.0).abs() < 1e-8);
        let (pdf, d) = gaussian_location(-0.5, 2.0);
        assert!((classical_fisher(&pdf, &d).unwrap() - 0.25).abs() < 1e-8);
    }

    #[test]
    fn classical_fisher_rejects_unnormalized() {
        let (pdf, d) = gaussian_location(0.0, 1.0);
        let doubled = TabulatedDensity::new(
            pdf.xs().to_vec(),
            pdf.values().iter().map(|v| 2.0 * v).collect(),
        )
        .unwrap();
        assert!(matches!(
            classical_fisher(&doubled, &d),
            Err(Error::Input(_))
        ));
        let drifting: Vec<f64> = pdf.values().to_vec();
        assert!(matches!(
            classical_fisher(&pdf, &drifting),
            Err(Error::Input(_))
        ));
        assert!(TabulatedDensity::new(vec![0.0, 1.0], vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn weak_value_examples() {
        let plus = StateVector::new(vec![2], vec![C64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
        let t = PI / 8.0;
        let f = StateVector::new(
            vec![2],
            vec![C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)],
        )
        .unwrap();
        let w = weak_value(&ComplexMatrix::identity(2), &plus, &f).unwrap();
        assert!((w - ONE).norm() < 1e-14);
        let z = StateVector::basis(2, 0);
        assert!((weak_value(&sigma_z(), &z, &z).unwrap() - ONE).norm() < 1e-15);
        let w = weak_value(&sigma_z(), &plus, &f).unwrap();
        let expected = (t.cos() - t.sin()) / (t.cos() + t.sin());
        assert!((w.re - expected).abs() < 1e-14 && w.im.abs() < 1e-15);
        assert!((expected - 0.414214).abs() < 1e-6);
        assert!(matches!(
            weak_value(&sigma_z(), &z, &StateVector::basis(2, 1)),
            Err(Error::OrthogonalSelection { .. })
        ));
    }

    #[test]
    fn bures_examples() {
        let fixed = random_state(&mut rng_for(43, 0), 4);
        let constant = ParamStateFamily::pure(move |_| Ok(fixed.clone()));
        let c = bures_metric_check(&constant, 0.2, 1e-4).unwrap();
        assert!(c.squared_bures.abs() < 1e-24 && c.prediction.abs() < 1e-20);

        assert_eq!(
            squared_bures_pure(&StateVector::basis(2, 0), &StateVector::basis(2, 1)),
            2.0
        );

        let c = bures_metric_check(&gaussian_shift_family(1.0), 0.5, 1e-4).unwrap();
        assert!((c.ratio() - 1.0).abs() < 1e-4, "ratio {}", c.ratio());
    }

    #[test]
    fn bures_mixed_family_tracks_metric() {
        let (h, rho0) = unitary_mixed_family(47, 3, 3);
        let (h2, r2) = (h.clone(), rho0.clone());
        let fam = ParamStateFamily::mixed_with_derivative(
            move |t| Ok(evolve(&h, &rho0, t).0),
            move |t| Ok(evolve(&h2, &r2, t).1),
        );
        let c = bures_metric_check(&fam, 0.3, 1e-3).unwrap();
        assert!((c.ratio() - 1.0).abs() < 1e-3, "ratio {}", c.ratio());
    }

    #[test]
    fn finite_differences_reproduce_analytic_qfi() {
        let analytic = gaussian_shift_family(0.8).qfi(1.1).unwrap();
        let fd = gaussian_shift_family(0.8).without_derivative();
        for h in [1e-5, 5e-6] {
            let v = fd.qfi_with_step(1.1, h).unwrap();
            assert!((v - analytic).abs() < 1e-5 * analytic);
        }

        let (h, rho0) = unitary_mixed_family(53, 4, 2);
        let (hh, rr) = (h.clone(), rho0.clone());
        let exact = qfi_mixed(&evolve(&h, &rho0, 0.2).0, &evolve(&h, &rho0, 0.2).1).unwrap();
        let fam = ParamStateFamily::mixed(move |t| Ok(evolve(&hh, &rr, t).0));
        assert!((fam.qfi(0.2).unwrap() - exact).abs() < 1e-5 * exact);
    }

    #[test]
    fn sld_residual_on_rank_deficient_families() {
        for (seed, n, rank) in [(59, 6, 2), (61, 8, 5), (67, 2, 1)] {
            let (h, rho0) = unitary_mixed_family(seed, n, rank);
            let (rho, drho) = evolve(&h, &rho0, 1.3);
            let sld = sld_solve(&rho, &drho).unwrap();
            assert_eq!(sld.support_dim, rank);
            let bound = 1e-8 * drho.frobenius_norm().max(1.0);
            assert!(sld.residual(&rho, &drho).unwrap() < bound);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn qfi_pure_global_phase_invariance(seed in any::<u64>(), n in 2usize..8, alpha in -PI..PI) {
            let mut rng = rng_for(seed, 0);
            let chi = random_state(&mut rng, n);
            let raw: Vec<C64> = (0..n).map(|_| crate::random::complex_normal(&mut rng)).collect();
            // Keep the derivative tangent to the normalized sphere.
            let o = inner(chi.amplitudes(), &raw);
            let d: Vec<C64> = raw.iter().zip(chi.amplitudes()).map(|(r, c)| r - c * C64::new(o.re, 0.0)).collect();
            let base = qfi_pure(&chi, &StateVector::new(vec![n], d.clone()).unwrap()).unwrap();
            let ph = C64::from_polar(1.0, alpha);
            let chi2 = StateVector::new(vec![n], chi.amplitudes().iter().map(|a| a * ph).collect()).unwrap();
            let d2 = StateVector::new(vec![n], d.iter().map(|a| a * ph).collect()).unwrap();
            prop_assert!((qfi_pure(&chi2, &d2).unwrap() - base).abs() < 1e-10 * base.max(1.0));
        }

        #[test]
        fn sld_residual_random_families(seed in any::<u64>(), n in 2usize..=8, rank_frac in 0.0f64..1.0, theta in -2.0f64..2.0) {
            let rank = 1 + ((n - 1) as f64 * rank_frac).round() as usize;
            let (h, rho0) = unitary_mixed_family(seed, n, rank);
            let (rho, drho) = evolve(&h, &rho0, theta);
            let sld = sld_solve(&rho, &drho).unwrap();
            prop_assert!(sld.matrix.is_hermitian(1e-10));
            prop_assert!(sld.residual(&rho, &drho).unwrap() <= 1e-8 * drho.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn kron_family_is_consistent() {
        // (sigma_z (x) p) on a two-level probe: mixed and pure routes agree.
        let h = kron(&sigma_z(), &ComplexMatrix::from_real_diagonal(&[-0.5, 0.5]));
        let v = random_state(&mut rng_for(71, 0), 4);
        let chi = unitary_of(&h, 0.9).unwrap().apply(v.amplitudes()).unwrap();
        let dchi: Vec<C64> = h.apply(&chi).unwrap().into_iter().map(|x| -I * x).collect();
        let rho =
            DensityMatrix::from_pure(&StateVector::new(vec![4], chi.clone()).unwrap()).unwrap();
        let drho = ComplexMatrix::outer(&dchi, &chi)
            .add(&ComplexMatrix::outer(&chi, &dchi))
            .unwrap();
        let pure = qfi_pure(
            &StateVector::new(vec![4], chi).unwrap(),
            &StateVector::new(vec![4], dchi).unwrap(),
        )
        .unwrap();
        assert!((qfi_mixed(&rho, &drho).unwrap() - pure).abs() < 1e-8);
    }
}
