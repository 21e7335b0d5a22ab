//! Qubit selections, the Gaussian probe and its momentum-grid discretization.
//!
//! The probe lives in the momentum representation, where the coupling
//! `sigma_z (x) p` is diagonal. Units are hbar = 1 with `[x, p] = i`, and the
//! position operator acts on grid amplitudes as `i d/dp` through spectral
//! differentiation.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, LinearOperator, RealDiagonal, StateVector, C64};

/// Bloch angles of the pre-selection `|i> = cos t1 |0> + e^{i s1} sin t1 |1>`
/// and post-selection `|f> = cos t2 |0> + e^{i s2} sin t2 |1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Selection {
    pub t1: f64,
    pub s1: f64,
    pub t2: f64,
    pub s2: f64,
}

impl Selection {
    pub fn new(t1: f64, s1: f64, t2: f64, s2: f64) -> Self {
        Self { t1, s1, t2, s2 }
    }

    /// From the polar angles and the relative phase `s1 - s2` (with `s2 = 0`).
    pub fn from_relative(t1: f64, t2: f64, ds: f64) -> Self {
        Self::new(t1, ds, t2, 0.0)
    }

    /// `cos^2 t1 = cos^2 t2 = 1/2` with `cos(s1 - s2) = c`, `c = +1` or `-1`.
    pub fn symmetric(c: f64) -> Self {
        let ds = if c >= 0.0 { 0.0 } else { PI };
        Self::from_relative(FRAC_PI_4, FRAC_PI_4, ds)
    }

    pub fn relative_phase(&self) -> f64 {
        self.s1 - self.s2
    }

    pub fn states(&self) -> (StateVector, StateVector) {
        make_selection_states(*self)
    }
}

fn bloch(t: f64, s: f64) -> StateVector {
    StateVector::new(
        vec![2],
        vec![C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), s)],
    )
    .expect("two amplitudes for a qubit")
}

pub fn make_selection_states(sel: Selection) -> (StateVector, StateVector) {
    (bloch(sel.t1, sel.s1), bloch(sel.t2, sel.s2))
}

/// Gaussian probe `<p|psi> = (2 sigma^2 / pi)^{1/4} exp(-sigma^2 p^2)`.
///
/// `sigma` is the position spread; the momentum spread is `1 / (2 sigma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianProbe {
    sigma: f64,
}

impl GaussianProbe {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Input(format!(
                "probe width must be positive, got {sigma}"
            )));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn momentum_std(&self) -> f64 {
        0.5 / self.sigma
    }

    pub fn momentum_variance(&self) -> f64 {
        0.25 / (self.sigma * self.sigma)
    }

    pub fn amplitude(&self, p: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (2.0 * s2 / PI).powf(0.25) * (-s2 * p * p).exp()
    }
}

/// Uniform momentum grid with `n_points` cell midpoints on `[-p_max, p_max]`.
#[derive(Clone)]
pub struct ProbeGrid {
    n_points: usize,
    p_max: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for ProbeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProbeGrid")
            .field("n_points", &self.n_points)
            .field("p_max", &self.p_max)
            .finish()
    }
}

impl PartialEq for ProbeGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.p_max == other.p_max
    }
}

impl ProbeGrid {
    pub const DEFAULT_POINTS: usize = 2048;

    pub fn new(n_points: usize, p_max: f64) -> Result<Self> {
        if !n_points.is_power_of_two() || n_points < 2 {
            return Err(Error::Input(format!(
                "grid size must be a power of two >= 2, got {n_points}"
            )));
        }
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(Error::Input(format!(
                "grid cutoff must be positive, got {p_max}"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_points,
            p_max,
            fft: planner.plan_fft_forward(n_points),
            ifft: planner.plan_fft_inverse(n_points),
        })
    }

    /// 2048 points over `+-6 / (sigma sqrt 2)`, which is about 8.5 momentum
    /// standard deviations.
    pub fn default_for(probe: &GaussianProbe) -> Self {
        Self::with_points(probe, Self::DEFAULT_POINTS)
    }

    pub fn with_points(probe: &GaussianProbe, n_points: usize) -> Self {
        Self::new(n_points, 6.0 / (probe.sigma() * std::f64::consts::SQRT_2))
            .expect("default cutoff is positive")
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.p_max / self.n_points as f64
    }

    /// Cell midpoints, exactly antisymmetric about zero.
    pub fn momenta(&self) -> Vec<f64> {
        let h = self.spacing();
        let centre = (self.n_points as f64 - 1.0) / 2.0;
        (0..self.n_points)
            .map(|k| (k as f64 - centre) * h)
            .collect()
    }

    pub fn momentum_operator(&self) -> RealDiagonal {
        RealDiagonal(self.momenta())
    }

    pub fn position_operator(&self) -> SpectralPosition {
        SpectralPosition { grid: self.clone() }
    }

    /// Position-space wave function `<x|phi>` at the requested points, by
    /// direct summation of the momentum amplitudes.
    pub fn position_wavefunction(&self, phi: &[C64], xs: &[f64]) -> Result<Vec<C64>> {
        if phi.len() != self.n_points {
            return Err(Error::Shape(format!(
                "{} amplitudes on a {}-point grid",
                phi.len(),
                self.n_points
            )));
        }
        let ps = self.momenta();
        let scale = (self.spacing() / (2.0 * PI)).sqrt();
        Ok(xs
            .iter()
            .map(|&x| {
                let acc: C64 = ps
                    .iter()
                    .zip(phi)
                    .map(|(&p, &a)| a * C64::from_polar(1.0, x * p))
                    .sum();
                acc * scale
            })
            .collect())
    }
}

/// Position operator `x = i d/dp` on grid amplitudes via FFT.
#[derive(Debug, Clone)]
pub struct SpectralPosition {
    grid: ProbeGrid,
}

impl LinearOperator for SpectralPosition {
    fn dim(&self) -> usize {
        self.grid.n_points
    }

    fn apply_to(&self, v: &[C64]) -> Result<Vec<C64>> {
        let n = self.grid.n_points;
        if v.len() != n {
            return Err(Error::Shape(format!(
                "position operator on {n} points applied to length {}",
                v.len()
            )));
        }
        let mut buf = v.to_vec();
        self.grid.fft.process(&mut buf);
        let dk = 2.0 * PI / (n as f64 * self.grid.spacing());
        for (m, x) in buf.iter_mut().enumerate() {
            let signed = if m < n / 2 {
                m as f64
            } else if m == n / 2 {
                0.0
            } else {
                m as f64 - n as f64
            };
            // i * (i kappa) = -kappa
            *x *= -signed * dk / n as f64;
        }
        self.grid.ifft.process(&mut buf);
        Ok(buf)
    }
}

/// Normalized grid samples of the Gaussian momentum wave function.
pub fn discretize_probe(probe: &GaussianProbe, grid: &ProbeGrid) -> Result<StateVector> {
    let sp = probe.momentum_std();
    if grid.spacing() >= sp / 4.0 {
        return Err(Error::Resolution(format!(
            "spacing {} must be below a quarter momentum std ({})",
            grid.spacing(),
            sp / 4.0
        )));
    }
    if grid.p_max() < 8.0 * sp {
        return Err(Error::Resolution(format!(
            "cutoff {} covers fewer than 8 momentum stds ({})",
            grid.p_max(),
            8.0 * sp
        )));
    }
    let sqrt_h = grid.spacing().sqrt();
    let amps = grid
        .momenta()
        .into_iter()
        .map(|p| C64::new(probe.amplitude(p) * sqrt_h, 0.0))
        .collect();
    StateVector::normalized(amps)
}

/// `|i> (x) |psi>` with factor dims `[d_sys, d_probe]`.
pub fn joint_initial(i: &StateVector, psi: &StateVector) -> Result<StateVector> {
    i.require_normalized("system state")?;
    psi.require_normalized("probe state")?;
    let joint = StateVector::new(
        vec![i.dim(), psi.dim()],
        kron_vec(i.amplitudes(), psi.amplitudes()),
    )?;
    let norm = joint.norm();
    let dims = joint.dims().to_vec();
    let amps = joint
        .into_amplitudes()
        .into_iter()
        .map(|a| a / norm)
        .collect();
    StateVector::new(dims, amps)
}

/// `sum_k |psi_k|^2 p_k^m`.
pub fn momentum_moment(psi: &[C64], momenta: &[f64], m: i32) -> f64 {
    psi.iter()
        .zip(momenta)
        .map(|(a, &p)| a.norm_sqr() * p.powi(m))
        .sum()
}
