//! Joint evolution, postselection on the system, and the Fisher information
//! of what survives.
//!
//! The probe operator `B = <f| U |i>` carries everything: the postselected
//! probe state is `B|psi>` up to normalization, the success probability is
//! `||B psi||^2`, and the postselected Fisher information follows from `B`
//! and its analytic derivative `dB = <f| (-i H) U |i>`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::qfi_pure;
use crate::linalg::{
    eig_hermitian, inner, kron, norm_sqr, partial_inner, ComplexMatrix, DensityMatrix,
    HermitianEigen, LinearOperator, StateVector, C64, I, ZERO,
};
use crate::random::{gue, random_state, rng_for};
use crate::state::{discretize_probe, momentum_moment, GaussianProbe, ProbeGrid, Selection};
use crate::tol;

/// Interaction Hamiltonian on system (x) probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JointHamiltonian {
    Dense(ComplexMatrix),
    /// `A (x) diag(probe_diagonal)`, e.g. `sigma_z (x) p` on a momentum grid.
    Product {
        system: ComplexMatrix,
        probe_diagonal: Vec<f64>,
    },
}

impl JointHamiltonian {
    pub fn to_dense(&self) -> ComplexMatrix {
        match self {
            Self::Dense(h) => h.clone(),
            Self::Product {
                system,
                probe_diagonal,
            } => kron(system, &ComplexMatrix::from_real_diagonal(probe_diagonal)),
        }
    }

    fn joint_dim(&self) -> usize {
        match self {
            Self::Dense(h) => h.rows(),
            Self::Product {
                system,
                probe_diagonal,
            } => system.rows() * probe_diagonal.len(),
        }
    }
}

/// One estimation problem: Hamiltonian, selections, probe and parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSpec {
    pub d_sys: usize,
    pub d_probe: usize,
    pub h: JointHamiltonian,
    pub i: StateVector,
    pub f: StateVector,
    pub psi: StateVector,
    pub theta: f64,
}

impl InstanceSpec {
    pub fn new(
        h: JointHamiltonian,
        i: StateVector,
        f: StateVector,
        psi: StateVector,
        theta: f64,
    ) -> Result<Self> {
        let (d_sys, d_probe) = (i.dim(), psi.dim());
        if f.dim() != d_sys {
            return Err(Error::Shape(format!(
                "pre-selection of dim {d_sys}, post-selection of dim {}",
                f.dim()
            )));
        }
        match &h {
            JointHamiltonian::Dense(m) => {
                m.require_hermitian()?;
                if m.rows() != d_sys * d_probe {
                    return Err(Error::Shape(format!(
                        "Hamiltonian of dim {} on a {d_sys}x{d_probe} space",
                        m.rows()
                    )));
                }
            }
            JointHamiltonian::Product {
                system,
                probe_diagonal,
            } => {
                system.require_hermitian()?;
                if system.rows() != d_sys || probe_diagonal.len() != d_probe {
                    return Err(Error::Shape(format!(
                        "product Hamiltonian on {}x{} for a {d_sys}x{d_probe} space",
                        system.rows(),
                        probe_diagonal.len()
                    )));
                }
            }
        }
        debug_assert_eq!(h.joint_dim(), d_sys * d_probe);
        i.require_normalized("pre-selected state")?;
        f.require_normalized("post-selected state")?;
        psi.require_normalized("probe state")?;
        if !theta.is_finite() {
            return Err(Error::Input(format!(
                "parameter must be finite, got {theta}"
            )));
        }
        Ok(Self {
            d_sys,
            d_probe,
            h,
            i,
            f,
            psi,
            theta,
        })
    }

    /// `A (x) p` with a Gaussian probe discretized on `grid`.
    pub fn product_on_grid(
        system: ComplexMatrix,
        i: StateVector,
        f: StateVector,
        probe: &GaussianProbe,
        grid: &ProbeGrid,
        theta: f64,
    ) -> Result<Self> {
        let psi = discretize_probe(probe, grid)?;
        let h = JointHamiltonian::Product {
            system,
            probe_diagonal: grid.momenta(),
        };
        Self::new(h, i, f, psi, theta)
    }

    /// The qubit benchmark: `sigma_z (x) p`, Bloch selections, Gaussian probe.
    pub fn qubit_gaussian(
        sel: Selection,
        probe: &GaussianProbe,
        grid: &ProbeGrid,
        theta: f64,
    ) -> Result<Self> {
        let (i, f) = sel.states();
        Self::product_on_grid(crate::linalg::sigma_z(), i, f, probe, grid, theta)
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    /// `|i> (x) |psi>`.
    pub fn initial_state(&self) -> StateVector {
        StateVector::new(
            vec![self.d_sys, self.d_probe],
            crate::linalg::kron_vec(self.i.amplitudes(), self.psi.amplitudes()),
        )
        .expect("dims match by construction")
    }

    /// `(<H>, <H^2> - <H>^2)` on `|i, psi>`.
    pub fn energy_moments(&self) -> (f64, f64) {
        match &self.h {
            JointHamiltonian::Dense(h) => {
                let v = self.initial_state();
                let hv = h.apply(v.amplitudes()).expect("dims match");
                let mean = inner(v.amplitudes(), &hv).re;
                let centred: Vec<C64> = hv
                    .iter()
                    .zip(v.amplitudes())
                    .map(|(a, b)| a - b * mean)
                    .collect();
                (mean, norm_sqr(&centred))
            }
            JointHamiltonian::Product {
                system,
                probe_diagonal,
            } => {
                let ai = system.apply(self.i.amplitudes()).expect("dims match");
                let a1 = inner(self.i.amplitudes(), &ai).re;
                let a2 = norm_sqr(&ai);
                let psi = self.psi.amplitudes();
                let p1 = momentum_moment(psi, probe_diagonal, 1);
                let p2 = momentum_moment(psi, probe_diagonal, 2);
                let mean = a1 * p1;
                // Var(A (x) P) = <A^2><P^2> - <A>^2<P>^2, with the centred
                // split keeping it nonnegative under round-off.
                let var = a2 * (p2 - p1 * p1) + (a2 - a1 * a1) * p1 * p1;
                (mean, var.max(0.0))
            }
        }
    }

    /// Fisher information of the unconditioned joint state, `4 Var(H)`.
    pub fn qfi_int(&self) -> f64 {
        4.0 * self.energy_moments().1
    }
}

/// Operator on the probe space, kept diagonal when the Hamiltonian allows.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeOperator {
    Dense(ComplexMatrix),
    Diagonal(Vec<C64>),
}

impl ProbeOperator {
    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.cols(),
            Self::Diagonal(d) => d.len(),
        }
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        match self {
            Self::Dense(m) => m.apply(v),
            Self::Diagonal(d) => {
                if d.len() != v.len() {
                    return Err(Error::Shape(format!(
                        "diagonal probe operator of dim {} on length {}",
                        d.len(),
                        v.len()
                    )));
                }
                Ok(d.iter().zip(v).map(|(a, b)| a * b).collect())
            }
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        match self {
            Self::Dense(m) => Self::Dense(m.scale(s)),
            Self::Diagonal(d) => Self::Diagonal(d.iter().map(|x| x * s).collect()),
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Diagonal(d) => ComplexMatrix::from_diagonal(d),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match (self, other) {
            (Self::Diagonal(a), Self::Diagonal(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max),
            _ => self.to_dense().max_abs_diff(&other.to_dense()),
        }
    }
}

/// `B = <f|U|i>`, its derivative, and the phase-shifted variant built from
/// `H - <H>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PostselectionMap {
    pub b: ProbeOperator,
    pub db: ProbeOperator,
    pub b_shifted: ProbeOperator,
    pub theta: f64,
    pub mean_h: f64,
}

/// Phases `exp(-i theta lambda_j p_k)` of a product Hamiltonian at fixed
/// `theta`, reusable across selections.
pub struct ProductPhases {
    eig: HermitianEigen,
    momenta: Vec<f64>,
    phases: Vec<Vec<C64>>,
}

impl ProductPhases {
    pub fn new(system: &ComplexMatrix, momenta: &[f64], theta: f64) -> Result<Self> {
        Ok(Self::from_eigen(eig_hermitian(system)?, momenta, theta))
    }

    pub fn from_eigen(eig: HermitianEigen, momenta: &[f64], theta: f64) -> Self {
        let phases = eig
            .values
            .iter()
            .map(|&l| {
                momenta
                    .iter()
                    .map(|&p| C64::from_polar(1.0, -theta * l * p))
                    .collect()
            })
            .collect();
        Self {
            eig,
            momenta: momenta.to_vec(),
            phases,
        }
    }

    /// `c_j = <f|v_j><v_j|i>`: `B = sum_j c_j exp(-i theta lambda_j p)`.
    fn weights(&self, i: &StateVector, f: &StateVector) -> Vec<C64> {
        (0..self.eig.values.len())
            .map(|j| {
                let v = self.eig.vector(j);
                inner(f.amplitudes(), &v) * inner(&v, i.amplitudes())
            })
            .collect()
    }

    pub fn map_diagonals(&self, i: &StateVector, f: &StateVector) -> (Vec<C64>, Vec<C64>) {
        let c = self.weights(i, f);
        let n = self.momenta.len();
        let mut b = vec![ZERO; n];
        let mut db = vec![ZERO; n];
        for (j, (&cj, ph)) in c.iter().zip(&self.phases).enumerate() {
            let l = self.eig.values[j];
            for k in 0..n {
                let t = cj * ph[k];
                b[k] += t;
                db[k] += t * (-I * l * self.momenta[k]);
            }
        }
        (b, db)
    }

    /// Postselected Fisher information without materializing `B`.
    pub fn fisher(
        &self,
        i: &StateVector,
        f: &StateVector,
        psi: &StateVector,
    ) -> Result<PostselectedFisher> {
        let c = self.weights(i, f);
        let lambda = &self.eig.values;
        let (mut pr, mut dd) = (0.0, 0.0);
        let mut cross = ZERO;
        for (k, (&a, &p)) in psi.amplitudes().iter().zip(&self.momenta).enumerate() {
            let mut phi = ZERO;
            let mut dphi = ZERO;
            for (j, &cj) in c.iter().enumerate() {
                let t = cj * self.phases[j][k];
                phi += t;
                dphi += t * lambda[j];
            }
            let phi = phi * a;
            let dphi = dphi * a * (-I * p);
            pr += phi.norm_sqr();
            dd += dphi.norm_sqr();
            cross += dphi.conj() * phi;
        }
        PostselectedFisher::from_sums(pr, dd, cross)
    }
}

impl PostselectionMap {
    pub fn new(spec: &InstanceSpec) -> Result<Self> {
        let (mean_h, _) = spec.energy_moments();
        let (b, db) = match &spec.h {
            JointHamiltonian::Dense(h) => {
                let eig = eig_hermitian(h)?;
                let theta = spec.theta;
                let u = eig.map(|l| C64::from_polar(1.0, -theta * l));
                let du = eig.map(|l| -I * l * C64::from_polar(1.0, -theta * l));
                (
                    ProbeOperator::Dense(partial_inner(&spec.f, &u, &spec.i)?),
                    ProbeOperator::Dense(partial_inner(&spec.f, &du, &spec.i)?),
                )
            }
            JointHamiltonian::Product {
                system,
                probe_diagonal,
            } => {
                let phases = ProductPhases::new(system, probe_diagonal, spec.theta)?;
                let (b, db) = phases.map_diagonals(&spec.i, &spec.f);
                (ProbeOperator::Diagonal(b), ProbeOperator::Diagonal(db))
            }
        };
        let b_shifted = b.scale(C64::from_polar(1.0, spec.theta * mean_h));
        Ok(Self {
            b,
            db,
            b_shifted,
            theta: spec.theta,
            mean_h,
        })
    }

    /// Derivative of the shifted operator, `e^{i theta <H>} (dB + i <H> B)`.
    pub fn db_shifted(&self) -> ProbeOperator {
        let phase = C64::from_polar(1.0, self.theta * self.mean_h);
        match (&self.b, &self.db) {
            (ProbeOperator::Diagonal(b), ProbeOperator::Diagonal(db)) => ProbeOperator::Diagonal(
                b.iter()
                    .zip(db)
                    .map(|(x, dx)| phase * (dx + I * self.mean_h * x))
                    .collect(),
            ),
            (b, db) => {
                let b = b.to_dense();
                let db = db.to_dense();
                ProbeOperator::Dense(
                    db.add(&b.scale(I * self.mean_h))
                        .expect("same shape")
                        .scale(phase),
                )
            }
        }
    }

    /// `Tr(B rho_i B^dagger)` and the normalized `B rho_i B^dagger`.
    pub fn apply_to_density(&self, rho_i: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
        let b = self.b.to_dense();
        let out = b.matmul(rho_i.matrix())?.matmul(&b.adjoint())?;
        let pr_f = out.trace().re;
        if pr_f <= tol::MIN_SUCCESS {
            return Err(Error::PostselectionImpossible {
                pr_f,
                threshold: tol::MIN_SUCCESS,
            });
        }
        let n = out.rows();
        let sym = ComplexMatrix::from_fn(n, n, |r, c| {
            (out[(r, c)] + out[(c, r)].conj()) * (0.5 / pr_f)
        });
        Ok((DensityMatrix::new(rho_i.dims().to_vec(), sym)?, pr_f))
    }
}

/// Success probability and postselected Fisher information at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PostselectedFisher {
    pub pr_f: f64,
    /// Fisher information of the normalized postselected state.
    pub qfi: f64,
    /// `Pr(f) * qfi`, evaluated without dividing by `Pr(f)`.
    pub prf_qfi: f64,
}

impl PostselectedFisher {
    /// From `P = ||B psi||^2`, `D = ||dB psi||^2` and `X = <dB psi|B psi>`.
    fn from_sums(pr: f64, dd: f64, cross: C64) -> Result<Self> {
        if !(pr > tol::MIN_SUCCESS) {
            return Err(Error::PostselectionImpossible {
                pr_f: pr,
                threshold: tol::MIN_SUCCESS,
            });
        }
        let prf_qfi = clamp_fisher(4.0 * (dd - cross.norm_sqr() / pr), pr)?;
        let qfi = clamp_fisher(4.0 * dd / pr - 4.0 * cross.norm_sqr() / (pr * pr), 1.0)?;
        Ok(Self {
            pr_f: pr,
            qfi,
            prf_qfi,
        })
    }

    pub fn from_map(map: &PostselectionMap, psi: &StateVector) -> Result<Self> {
        let phi = map.b.apply(psi.amplitudes())?;
        let dphi = map.db.apply(psi.amplitudes())?;
        Self::from_sums(norm_sqr(&phi), norm_sqr(&dphi), inner(&dphi, &phi))
    }
}

fn clamp_fisher(value: f64, scale: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -tol::NEGATIVE_FISHER * scale.max(1.0) {
        log::debug!("clamping round-off negative Fisher information {value:e} to zero");
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "negative Fisher information {value:e}"
        )))
    }
}

/// `U(theta) |i, psi>`.
pub fn evolve_joint(spec: &InstanceSpec) -> Result<StateVector> {
    let v = spec.initial_state();
    let dims = vec![spec.d_sys, spec.d_probe];
    let out = match &spec.h {
        JointHamiltonian::Dense(h) => {
            let u = eig_hermitian(h)?.map(|l| C64::from_polar(1.0, -spec.theta * l));
            u.apply(v.amplitudes())?
        }
        JointHamiltonian::Product {
            system,
            probe_diagonal,
        } => {
            let eig = eig_hermitian(system)?;
            let dp = spec.d_probe;
            let amps = v.amplitudes();
            let mut out = vec![ZERO; amps.len()];
            for (j, &l) in eig.values.iter().enumerate() {
                let vj = eig.vector(j);
                for (k, &p) in probe_diagonal.iter().enumerate() {
                    // <v_j| (x) <k| applied to the joint vector
                    let coeff: C64 = (0..spec.d_sys)
                        .map(|t| vj[t].conj() * amps[t * dp + k])
                        .sum();
                    let c = coeff * C64::from_polar(1.0, -spec.theta * l * p);
                    for s in 0..spec.d_sys {
                        out[s * dp + k] += vj[s] * c;
                    }
                }
            }
            out
        }
    };
    let state = StateVector::new(dims, out)?;
    let norm = state.norm();
    let dims = state.dims().to_vec();
    StateVector::new(
        dims,
        state
            .into_amplitudes()
            .into_iter()
            .map(|a| a / norm)
            .collect(),
    )
}

/// Normalized postselected probe state `B|psi> / ||B psi||` and `Pr(f)`.
pub fn postselected_state(spec: &InstanceSpec) -> Result<(StateVector, f64)> {
    let map = PostselectionMap::new(spec)?;
    let phi = map.b.apply(spec.psi.amplitudes())?;
    let pr_f = norm_sqr(&phi);
    if !(pr_f > tol::MIN_SUCCESS) {
        return Err(Error::PostselectionImpossible {
            pr_f,
            threshold: tol::MIN_SUCCESS,
        });
    }
    let s = pr_f.sqrt();
    let state = StateVector::new(vec![spec.d_probe], phi.into_iter().map(|a| a / s).collect())?;
    Ok((state, pr_f))
}

/// `rho_ps` as a density matrix together with `Pr(f)`.
pub fn postselect(spec: &InstanceSpec) -> Result<(DensityMatrix, f64)> {
    let (state, pr_f) = postselected_state(spec)?;
    Ok((DensityMatrix::from_pure(&state)?, pr_f))
}

pub fn postselected_fisher(spec: &InstanceSpec) -> Result<PostselectedFisher> {
    match &spec.h {
        JointHamiltonian::Product {
            system,
            probe_diagonal,
        } => ProductPhases::new(system, probe_diagonal, spec.theta)?
            .fisher(&spec.i, &spec.f, &spec.psi),
        JointHamiltonian::Dense(_) => {
            PostselectedFisher::from_map(&PostselectionMap::new(spec)?, &spec.psi)
        }
    }
}

/// Fisher information of the postselected probe state from `B` and `dB`.
pub fn qfi_postselected(spec: &InstanceSpec) -> Result<f64> {
    postselected_fisher(spec).map(|r| r.qfi)
}

/// Same quantity by a second route: normalize `B|psi>`, differentiate the
/// normalized vector with the quotient rule, then apply the pure-state
/// formula.
pub fn qfi_postselected_via_state(spec: &InstanceSpec) -> Result<f64> {
    let map = PostselectionMap::new(spec)?;
    let phi = map.b.apply(spec.psi.amplitudes())?;
    let dphi = map.db.apply(spec.psi.amplitudes())?;
    let pr = norm_sqr(&phi);
    if !(pr > tol::MIN_SUCCESS) {
        return Err(Error::PostselectionImpossible {
            pr_f: pr,
            threshold: tol::MIN_SUCCESS,
        });
    }
    let dpr = 2.0 * inner(&phi, &dphi).re;
    let s = pr.sqrt();
    let chi: Vec<C64> = phi.iter().map(|a| a / s).collect();
    let dchi: Vec<C64> = phi
        .iter()
        .zip(&dphi)
        .map(|(a, da)| da / s - a * (dpr / (2.0 * pr * s)))
        .collect();
    let dims = vec![spec.d_probe];
    qfi_pure(
        &StateVector::new(dims.clone(), chi)?,
        &StateVector::new(dims, dchi)?,
    )
}

/// Weak-interaction value `|<A>_w|^2 <psi|(p - <p>)^2|psi>` in the form
/// printed for the small-coupling limit. The limit of
/// [`qfi_postselected`] is four times this, see [`extrapolate_to_zero`].
pub fn weak_limit_value(
    a: &ComplexMatrix,
    i: &StateVector,
    f: &StateVector,
    psi: &StateVector,
    momentum: &dyn LinearOperator,
) -> Result<f64> {
    let w = crate::fisher::weak_value(a, i, f)?;
    let amps = psi.amplitudes();
    let mean = momentum.expectation(amps)?.re;
    let centred: Vec<C64> = momentum
        .apply_to(amps)?
        .iter()
        .zip(amps)
        .map(|(pa, a)| pa - a * mean)
        .collect();
    let var = norm_sqr(&centred);
    Ok(w.norm_sqr() * var)
}

/// Quadratic extrapolation to zero from samples at `h`, `2h`, `3h`.
pub fn extrapolate_to_zero(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    Ok(3.0 * f(h)? - 3.0 * f(2.0 * h)? + f(3.0 * h)?)
}

/// Slack used when deciding whether `Pr(f) I_ps <= I_int` holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::from_scalar(1e-9)
    }
}

impl Tolerance {
    /// Relative slack `t` with absolute slack `t * 1e-3`; zero means exact.
    pub fn from_scalar(t: f64) -> Self {
        Self {
            rel: t,
            abs: t * 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    /// `Pr(f) * I(rho_ps)`.
    pub lhs: f64,
    /// `I(rho_int) = 4 Var(H)`.
    pub rhs: f64,
    pub pr_f: f64,
    pub holds: bool,
    /// Postselection impossible; `lhs` reported as zero.
    pub degenerate: bool,
}

impl InequalityCheck {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn check_inequality(spec: &InstanceSpec) -> Result<InequalityCheck> {
    check_inequality_with(spec, Tolerance::default())
}

pub fn check_inequality_with(spec: &InstanceSpec, tol: Tolerance) -> Result<InequalityCheck> {
    let rhs = spec.qfi_int();
    let (lhs, pr_f, degenerate) = match postselected_fisher(spec) {
        Ok(r) => (r.prf_qfi, r.pr_f, false),
        Err(Error::PostselectionImpossible { pr_f, .. }) => (0.0, pr_f.max(0.0), true),
        Err(e) => return Err(e),
    };
    Ok(InequalityCheck {
        lhs,
        rhs,
        pr_f,
        holds: lhs <= rhs * (1.0 + tol.rel) + tol.abs,
        degenerate,
    })
}

/// `Tr(rho_ps x)` for a probe position operator `x`.
pub fn mean_shift(spec: &InstanceSpec, x_op: &dyn LinearOperator) -> Result<f64> {
    let (state, _) = postselected_state(spec)?;
    Ok(x_op.expectation(state.amplitudes())?.re)
}

/// GUE Hamiltonian on the joint space, Haar-like states, uniform `theta`.
pub fn random_instance(
    seed: u64,
    dims: (usize, usize),
    theta_range: (f64, f64),
) -> Result<InstanceSpec> {
    random_instance_with(&mut rng_for(seed, 0), dims, theta_range)
}

pub fn random_instance_with(
    rng: &mut ChaCha8Rng,
    (d_sys, d_probe): (usize, usize),
    (lo, hi): (f64, f64),
) -> Result<InstanceSpec> {
    if d_sys < 2 || d_probe < 2 {
        return Err(Error::Input(format!(
            "dims must be at least 2, got ({d_sys}, {d_probe})"
        )));
    }
    let h = gue(rng, d_sys * d_probe);
    let i = random_state(rng, d_sys);
    let f = random_state(rng, d_sys);
    let psi = random_state(rng, d_probe);
    let theta = if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    };
    InstanceSpec::new(JointHamiltonian::Dense(h), i, f, psi, theta)
}

/// Like [`random_instance_with`] but with `H = A (x) P` for independent GUE
/// factors, stored densely.
pub fn random_product_instance_with(
    rng: &mut ChaCha8Rng,
    (d_sys, d_probe): (usize, usize),
    (lo, hi): (f64, f64),
) -> Result<InstanceSpec> {
    if d_sys < 2 || d_probe < 2 {
        return Err(Error::Input(format!(
            "dims must be at least 2, got ({d_sys}, {d_probe})"
        )));
    }
    let a = gue(rng, d_sys);
    let p = gue(rng, d_probe);
    let i = random_state(rng, d_sys);
    let f = random_state(rng, d_sys);
    let psi = random_state(rng, d_probe);
    let theta = if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    };
    InstanceSpec::new(JointHamiltonian::Dense(kron(&a, &p)), i, f, psi, theta)
}

/// Randomized audit of `Pr(f) I(rho_ps) <= I(rho_int)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditConfig {
    pub trials: usize,
    pub seed: u64,
    pub min_dim: usize,
    pub max_dim: usize,
    pub theta_range: (f64, f64),
    pub tolerance: f64,
    /// Every `product_every`-th trial uses a product Hamiltonian; 0 disables.
    pub product_every: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 0,
            min_dim: 2,
            max_dim: 6,
            theta_range: (0.0, 5.0),
            tolerance: 1e-9,
            product_every: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditFailure {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub spec: InstanceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub trials: usize,
    pub passes: usize,
    pub degenerate: usize,
    pub product_trials: usize,
    /// Smallest `rhs - lhs` over all trials.
    pub worst_margin: f64,
    pub worst_trial: usize,
    pub failures: Vec<AuditFailure>,
}

impl AuditSummary {
    pub fn all_passed(&self) -> bool {
        self.passes == self.trials
    }
}

/// Draws trial `index` of an audit; the stream depends only on `(seed, index)`.
pub fn audit_instance(config: &AuditConfig, index: usize) -> Result<(InstanceSpec, bool)> {
    let mut rng = rng_for(config.seed, index as u64);
    let d_sys = rng.random_range(config.min_dim..=config.max_dim);
    let d_probe = rng.random_range(config.min_dim..=config.max_dim);
    let product =
        config.product_every > 0 && index % config.product_every == config.product_every - 1;
    let spec = if product {
        random_product_instance_with(&mut rng, (d_sys, d_probe), config.theta_range)?
    } else {
        random_instance_with(&mut rng, (d_sys, d_probe), config.theta_range)?
    };
    Ok((spec, product))
}

pub fn audit_inequality(config: &AuditConfig) -> Result<AuditSummary> {
    if config.trials == 0 {
        return Err(Error::Input("audit needs at least one trial".into()));
    }
    if config.min_dim < 2 || config.max_dim < config.min_dim {
        return Err(Error::Input(format!(
            "invalid dimension range {}..={}",
            config.min_dim, config.max_dim
        )));
    }
    let tol = Tolerance::from_scalar(config.tolerance);
    let results: Vec<(usize, bool, InequalityCheck)> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let (spec, product) = audit_instance(config, t)?;
            Ok((t, product, check_inequality_with(&spec, tol)?))
        })
        .collect::<Result<_>>()?;

    let mut summary = AuditSummary {
        trials: config.trials,
        passes: 0,
        degenerate: 0,
        product_trials: 0,
        worst_margin: f64::INFINITY,
        worst_trial: 0,
        failures: Vec::new(),
    };
    for (t, product, check) in results {
        summary.product_trials += product as usize;
        summary.degenerate += check.degenerate as usize;
        if check.margin() < summary.worst_margin {
            summary.worst_margin = check.margin();
            summary.worst_trial = t;
        }
        if check.holds {
            summary.passes += 1;
        } else {
            summary.failures.push(AuditFailure {
                trial: t,
                lhs: check.lhs,
                rhs: check.rhs,
                margin: check.margin(),
                spec: audit_instance(config, t)?.0,
            });
        }
    }
    Ok(summary)
}
