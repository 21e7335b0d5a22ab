//! Sweeps of the qubit / Gaussian model over selections and coupling.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{ic_closed, qfi_int_closed, qfi_ps_closed, AnalyticParams};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, norm_sqr, sigma_z, StateVector};
use crate::postselection::{ProductPhases, Tolerance};
use crate::state::{discretize_probe, momentum_moment, GaussianProbe, ProbeGrid, Selection};
use crate::tol;

/// Selections `(t1, t2, s1 - s2)` as an outer product of three axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionGrid {
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub ds: Vec<f64>,
}

impl SelectionGrid {
    /// `t1, t2` on `[0, pi)` and `ds` on `[0, 2 pi)`, left endpoints.
    pub fn uniform(n_t1: usize, n_t2: usize, n_ds: usize) -> Self {
        let axis = |n: usize, span: f64| (0..n).map(|k| span * k as f64 / n as f64).collect();
        Self {
            t1: axis(n_t1, PI),
            t2: axis(n_t2, PI),
            ds: axis(n_ds, TAU),
        }
    }

    pub fn len(&self) -> usize {
        self.t1.len() * self.t2.len() * self.ds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `t1`-major, then `t2`, then `ds`.
    pub fn selections(&self) -> Vec<Selection> {
        let mut out = Vec::with_capacity(self.len());
        for &t1 in &self.t1 {
            for &t2 in &self.t2 {
                for &ds in &self.ds {
                    out.push(Selection::from_relative(t1, t2, ds));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Momentum-grid evaluation of the postselected state.
    #[default]
    Grid,
    /// Closed forms only.
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub sigma: f64,
    /// `theta / sigma` range, endpoints included.
    pub theta_over_sigma: (f64, f64),
    pub steps: usize,
    pub selections: SelectionGrid,
    pub engine: Engine,
    /// Probe grid size for the grid engine; `None` uses the default.
    pub grid_points: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            theta_over_sigma: (0.0, 5.0),
            steps: 201,
            selections: SelectionGrid::uniform(16, 16, 16),
            engine: Engine::Grid,
            grid_points: None,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Input(format!(
                "sigma: must be positive, got {}",
                self.sigma
            )));
        }
        let (lo, hi) = self.theta_over_sigma;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Input(format!(
                "theta_over_sigma: need 0 <= lo <= hi, got [{lo}, {hi}]"
            )));
        }
        if self.steps < 2 {
            return Err(Error::Input(format!(
                "steps: need at least 2, got {}",
                self.steps
            )));
        }
        if self.selections.is_empty() {
            return Err(Error::Input("selections: grid is empty".into()));
        }
        Ok(())
    }

    pub fn thetas(&self) -> Vec<f64> {
        let (lo, hi) = self.theta_over_sigma;
        let n = self.steps;
        (0..n)
            .map(|k| self.sigma * (lo + (hi - lo) * k as f64 / (n - 1) as f64))
            .collect()
    }
}

/// One row of a sweep. Field order is the column order of the table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub theta: f64,
    pub t1: f64,
    pub t2: f64,
    pub ds: f64,
    pub pr_f: f64,
    /// `None` when `pr_f` is below the sweep threshold.
    pub qfi_ps: Option<f64>,
    pub qfi_int: f64,
    pub prf_qfi_ps: Option<f64>,
    pub ic_plus: f64,
    pub ic_minus: f64,
}

impl FisherReport {
    pub fn selection(&self) -> Selection {
        Selection::from_relative(self.t1, self.t2, self.ds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<FisherReport>,
    /// Rows whose selection fell below the success threshold.
    pub skipped: usize,
}

struct GridModel {
    psi: StateVector,
    momenta: Vec<f64>,
    /// `4 Var(H)` on `|i, psi>`, per selection.
    qfi_int: Vec<f64>,
}

impl GridModel {
    fn new(spec: &SweepSpec, selections: &[Selection]) -> Result<Self> {
        let probe = GaussianProbe::new(spec.sigma)?;
        let grid = match spec.grid_points {
            Some(n) => ProbeGrid::with_points(&probe, n),
            None => ProbeGrid::default_for(&probe),
        };
        let psi = discretize_probe(&probe, &grid)?;
        let momenta = grid.momenta();
        let p1 = momentum_moment(psi.amplitudes(), &momenta, 1);
        let p2 = momentum_moment(psi.amplitudes(), &momenta, 2);
        let z = sigma_z();
        let qfi_int = selections
            .iter()
            .map(|sel| {
                let (i, _) = sel.states();
                let zi = z.apply(i.amplitudes()).expect("qubit");
                let a1 = crate::linalg::inner(i.amplitudes(), &zi).re;
                let a2 = norm_sqr(&zi);
                4.0 * (a2 * (p2 - p1 * p1) + (a2 - a1 * a1) * p1 * p1)
            })
            .collect();
        Ok(Self {
            psi,
            momenta,
            qfi_int,
        })
    }
}

/// Evaluates every `(theta, selection)` pair, `theta`-major. Fails with
/// [`Error::InvariantViolation`] if a row breaks `Pr(f) I_ps <= I_int`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let selections = spec.selections.selections();
    let thetas = spec.thetas();
    let model = match spec.engine {
        Engine::Grid => Some(GridModel::new(spec, &selections)?),
        Engine::Analytic => None,
    };
    let params: Vec<AnalyticParams> = selections
        .iter()
        .map(|&s| AnalyticParams::new(s, spec.sigma))
        .collect::<Result<_>>()?;
    let z_eig = eig_hermitian(&sigma_z())?;
    let bound = Tolerance::default();

    let blocks: Vec<Vec<FisherReport>> = thetas
        .par_iter()
        .map(|&theta| {
            let ic_plus = ic_closed(spec.sigma, theta, 1.0);
            let ic_minus = ic_closed(spec.sigma, theta, -1.0);
            let phases = model
                .as_ref()
                .map(|m| ProductPhases::from_eigen(z_eig.clone(), &m.momenta, theta));
            selections
                .iter()
                .enumerate()
                .map(|(k, sel)| {
                    let (pr_f, qfi, prf_qfi, qfi_int) = match (&model, &phases) {
                        (Some(m), Some(ph)) => {
                            let (i, f) = sel.states();
                            let (pr, q, pq) = match ph.fisher(&i, &f, &m.psi) {
                                Ok(r) => (r.pr_f, Some(r.qfi), Some(r.prf_qfi)),
                                Err(Error::PostselectionImpossible { pr_f, .. }) => (pr_f, None, None),
                                Err(e) => return Err(e),
                            };
                            (pr, q, pq, m.qfi_int[k])
                        }
                        _ => {
                            let p = &params[k];
                            let pr = p.success_probability(theta);
                            let q = match qfi_ps_closed(p, theta) {
                                Ok(q) => Some(q),
                                Err(Error::PostselectionImpossible { .. }) => None,
                                Err(e) => return Err(e),
                            };
                            (pr, q, q.map(|q| q * pr), qfi_int_closed(spec.sigma))
                        }
                    };
                    let usable = pr_f >= tol::SWEEP_MIN_SUCCESS;
                    let row = FisherReport {
                        theta,
                        t1: sel.t1,
                        t2: sel.t2,
                        ds: sel.relative_phase(),
                        pr_f,
                        qfi_ps: qfi.filter(|_| usable),
                        qfi_int,
                        prf_qfi_ps: prf_qfi.filter(|_| usable),
                        ic_plus,
                        ic_minus,
                    };
                    if let Some(lhs) = row.prf_qfi_ps {
                        if lhs > qfi_int * (1.0 + bound.rel) + bound.abs {
                            return Err(Error::InvariantViolation(format!(
                                "Pr(f) I_ps = {lhs} exceeds I_int = {qfi_int} at theta = {theta}, {sel:?}"
                            )));
                        }
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let rows: Vec<FisherReport> = blocks.into_iter().flatten().collect();
    let skipped = rows.iter().filter(|r| r.qfi_ps.is_none()).count();
    Ok(SweepTable { rows, skipped })
}

/// Per-`theta` maxima over selections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub theta: f64,
    pub max_qfi_ps: f64,
    pub max_prf_qfi_ps: f64,
    pub qfi_int: f64,
}

/// Envelopes of a `theta`-major table, in `theta` order.
pub fn envelopes(rows: &[FisherReport]) -> Vec<Envelope> {
    let mut out: Vec<Envelope> = Vec::new();
    for r in rows {
        let fresh = out.last().is_none_or(|e| e.theta != r.theta);
        if fresh {
            out.push(Envelope {
                theta: r.theta,
                max_qfi_ps: f64::NEG_INFINITY,
                max_prf_qfi_ps: f64::NEG_INFINITY,
                qfi_int: r.qfi_int,
            });
        }
        let e = out.last_mut().expect("pushed above");
        if let Some(q) = r.qfi_ps {
            e.max_qfi_ps = e.max_qfi_ps.max(q);
        }
        if let Some(q) = r.prf_qfi_ps {
            e.max_prf_qfi_ps = e.max_prf_qfi_ps.max(q);
        }
        e.qfi_int = e.qfi_int.max(r.qfi_int);
    }
    out
}

/// Outcome of the "envelope of `Pr(f) I_ps` nearly reaches `I_int`" check at
/// one `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttainmentPoint {
    pub theta: f64,
    pub ratio: f64,
    pub ok: bool,
}

/// Ratio `max Pr(f) I_ps / I_int` at each `theta / sigma` in `window`.
pub fn attainment(
    envs: &[Envelope],
    sigma: f64,
    window: (f64, f64),
    fraction: f64,
) -> Vec<AttainmentPoint> {
    envs.iter()
        .filter(|e| {
            let t = e.theta / sigma;
            t >= window.0 - 1e-12 && t <= window.1 + 1e-12
        })
        .map(|e| {
            let ratio = e.max_prf_qfi_ps / e.qfi_int;
            if ratio < fraction {
                log::warn!(
                    "envelope of Pr(f) I_ps reaches only {ratio:.4} of I_int at theta = {}",
                    e.theta
                );
            }
            AttainmentPoint {
                theta: e.theta,
                ratio,
                ok: ratio >= fraction,
            }
        })
        .collect()
}
