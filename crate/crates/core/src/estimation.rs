//! Monte Carlo comparison of the postselected and the joint strategy.
//!
//! For `H = sigma_z (x) p` with a Gaussian probe, the probe position density
//! attached to any system outcome `|g>` is
//! `|a|^2 phi(x - theta) + |b|^2 phi(x + theta) + 2 Re(a* b) G(x, theta)`
//! with `a = <g|0><0|i>`, `b = <g|1><1|i>`, `phi` the `N(0, sigma^2)` density
//! and `G = exp(-(x^2 + theta^2) / 2 sigma^2) / sqrt(2 pi sigma^2)`.
//! [`TwoShift`] evaluates that family. The postselected strategy measures the
//! probe position after a successful postselection; the joint strategy
//! measures the system in `{|f>, |f_perp>}` together with the probe position.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{qfi_int_closed, qfi_ps_closed, AnalyticParams};
use crate::error::{Error, Result};
use crate::fisher::{trapezoid, TabulatedDensity};
use crate::linalg::{StateVector, C64};
use crate::random::rng_for;
use crate::state::Selection;

/// Inverse-CDF sampler for a piecewise-linear density.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    xs: Vec<f64>,
    values: Vec<f64>,
    /// Normalized cumulative mass at each abscissa.
    cdf: Vec<f64>,
    total: f64,
}

impl InverseCdf {
    pub fn new(pdf: &TabulatedDensity) -> Result<Self> {
        let xs = pdf.xs().to_vec();
        let values = pdf.values().to_vec();
        let mut cdf = Vec::with_capacity(xs.len());
        cdf.push(0.0);
        for k in 1..xs.len() {
            let m = 0.5 * (xs[k] - xs[k - 1]) * (values[k] + values[k - 1]);
            cdf.push(cdf[k - 1] + m);
        }
        let total = cdf[cdf.len() - 1];
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Input(format!("density has total mass {total}")));
        }
        for c in &mut cdf {
            *c /= total;
        }
        Ok(Self {
            xs,
            values,
            cdf,
            total,
        })
    }

    /// Tabulated CDF at `x`, exact for the piecewise-linear density.
    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        let k = self.xs.partition_point(|&v| v <= x) - 1;
        let h = self.xs[k + 1] - self.xs[k];
        let t = x - self.xs[k];
        let (f0, f1) = (self.values[k], self.values[k + 1]);
        self.cdf[k] + (f0 * t + 0.5 * (f1 - f0) / h * t * t) / self.total
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.random();
        let k = self
            .cdf
            .partition_point(|&c| c <= u)
            .clamp(1, self.cdf.len() - 1)
            - 1;
        let h = self.xs[k + 1] - self.xs[k];
        let (f0, f1) = (self.values[k], self.values[k + 1]);
        let r = (u - self.cdf[k]) * self.total;
        let s = (f1 - f0) / h;
        // root of f0 t + s t^2 / 2 = r in its cancellation-free form
        let disc = (f0 * f0 + 2.0 * s * r).max(0.0);
        let den = f0 + disc.sqrt();
        let t = if den > 0.0 { 2.0 * r / den } else { 0.0 };
        self.xs[k] + t.clamp(0.0, h)
    }

    pub fn sample_n(&self, count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

/// `count` draws from `pdf`, reproducible for a given seed.
pub fn sample_outcomes(pdf: &TabulatedDensity, count: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = InverseCdf::new(pdf)?;
    Ok(sampler.sample_n(count, &mut rng_for(seed, 0)))
}

/// A one-parameter family of outcome distributions.
pub trait ParametricModel: Sync {
    type Outcome: Copy + Send + Sync;

    fn log_pdf(&self, theta: f64, x: Self::Outcome) -> f64;

    /// Per-outcome classical Fisher information at `theta`.
    fn fisher_information(&self, theta: f64) -> Result<f64>;
}

pub fn log_likelihood<M: ParametricModel>(model: &M, theta: f64, samples: &[M::Outcome]) -> f64 {
    let mut sum = 0.0;
    for &x in samples {
        sum += model.log_pdf(theta, x);
        if sum == f64::NEG_INFINITY {
            break;
        }
    }
    sum
}

pub const MLE_SCAN_POINTS: usize = 256;
pub const MLE_WIDTH: f64 = 1e-8;

/// Maximum-likelihood estimate on `search`: a coarse scan, then golden-section
/// refinement around the best scan point.
pub fn mle_fit<M: ParametricModel>(
    samples: &[M::Outcome],
    model: &M,
    search: (f64, f64),
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Input("no samples to fit".into()));
    }
    let (lo, hi) = search;
    if !(hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Input(format!(
            "invalid search interval [{lo}, {hi}]"
        )));
    }
    let n = MLE_SCAN_POINTS;
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..n {
        let ll = log_likelihood(model, lo + step * k as f64, samples);
        if ll > best.1 {
            best = (k, ll);
        }
    }
    if best.1 == f64::NEG_INFINITY {
        return Err(Error::DegenerateModel);
    }
    let center = lo + step * best.0 as f64;
    let (mut a, mut b) = ((center - step).max(lo), (center + step).min(hi));
    let ll = |t: f64| log_likelihood(model, t, samples);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (ll(c), ll(d));
    while b - a > MLE_WIDTH {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = ll(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = ll(d);
        }
    }
    let mid = 0.5 * (a + b);
    // keep the scan point if refinement landed somewhere worse
    Ok(if ll(mid) >= best.1 { mid } else { center })
}

/// `N(theta, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianLocation {
    pub sigma: f64,
}

impl ParametricModel for GaussianLocation {
    type Outcome = f64;

    fn log_pdf(&self, theta: f64, x: f64) -> f64 {
        let z = (x - theta) / self.sigma;
        -0.5 * z * z - 0.5 * (2.0 * PI * self.sigma * self.sigma).ln()
    }

    fn fisher_information(&self, _theta: f64) -> Result<f64> {
        Ok(1.0 / (self.sigma * self.sigma))
    }
}

/// Unnormalized probe position density attached to one system outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoShift {
    pub wa: f64,
    pub wb: f64,
    pub cross: f64,
    pub sigma: f64,
}

impl TwoShift {
    pub fn from_amplitudes(a: C64, b: C64, sigma: f64) -> Self {
        Self {
            wa: a.norm_sqr(),
            wb: b.norm_sqr(),
            cross: (a.conj() * b).re,
            sigma,
        }
    }

    /// Branch for system outcome `g` after preparing `i`.
    pub fn for_outcome(i: &StateVector, g: &StateVector, sigma: f64) -> Self {
        let (ia, ga) = (i.amplitudes(), g.amplitudes());
        Self::from_amplitudes(ga[0].conj() * ia[0], ga[1].conj() * ia[1], sigma)
    }

    fn norm_const(&self) -> f64 {
        1.0 / (2.0 * PI * self.sigma * self.sigma).sqrt()
    }

    /// Probability of the outcome: `wa + wb + 2 cross exp(-theta^2 / 2 sigma^2)`.
    pub fn mass(&self, theta: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        self.wa + self.wb + 2.0 * self.cross * (-theta * theta / (2.0 * s2)).exp()
    }

    pub fn mass_derivative(&self, theta: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        -2.0 * self.cross * theta / s2 * (-theta * theta / (2.0 * s2)).exp()
    }

    pub fn density(&self, theta: f64, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let q = |u: f64| (-u * u / (2.0 * s2)).exp();
        let v = self.wa * q(x - theta)
            + self.wb * q(x + theta)
            + 2.0 * self.cross * (-(x * x + theta * theta) / (2.0 * s2)).exp();
        (v * self.norm_const()).max(0.0)
    }

    pub fn density_derivative(&self, theta: f64, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let q = |u: f64| (-u * u / (2.0 * s2)).exp();
        let v = self.wa * q(x - theta) * (x - theta) / s2
            - self.wb * q(x + theta) * (x + theta) / s2
            - 2.0 * self.cross * theta / s2 * (-(x * x + theta * theta) / (2.0 * s2)).exp();
        v * self.norm_const()
    }

    pub fn log_density(&self, theta: f64, x: f64) -> f64 {
        if self.cross == 0.0 && self.wb == 0.0 && self.wa > 0.0 {
            let z = (x - theta) / self.sigma;
            return self.wa.ln() - 0.5 * z * z + self.norm_const().ln();
        }
        if self.cross == 0.0 && self.wa == 0.0 && self.wb > 0.0 {
            let z = (x + theta) / self.sigma;
            return self.wb.ln() - 0.5 * z * z + self.norm_const().ln();
        }
        let d = self.density(theta, x);
        if d > 0.0 {
            d.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Outcome grid covering both shifted Gaussians to 12 sigma.
    pub fn support(&self, theta: f64, points: usize) -> Vec<f64> {
        let half = theta.abs() + 12.0 * self.sigma;
        let step = 2.0 * half / (points - 1) as f64;
        (0..points).map(|k| -half + step * k as f64).collect()
    }

    /// The position density normalized to this outcome.
    pub fn tabulate(&self, theta: f64, points: usize) -> Result<TabulatedDensity> {
        let m = self.mass(theta);
        if !(m > 0.0) {
            return Err(Error::PostselectionImpossible {
                pr_f: m,
                threshold: 0.0,
            });
        }
        TabulatedDensity::from_fn(self.support(theta, points), |x| self.density(theta, x) / m)
    }

    /// `int (d_theta g)^2 / g dx` of the unnormalized branch.
    fn branch_fisher(&self, theta: f64, points: usize) -> f64 {
        let xs = self.support(theta, points);
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let g = self.density(theta, x);
                let dg = self.density_derivative(theta, x);
                if g < 1e-300 {
                    0.0
                } else {
                    dg * dg / g
                }
            })
            .collect();
        trapezoid(&xs, &ys)
    }
}

const FISHER_POINTS: usize = 20_001;

/// Probe position after a successful postselection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PostselectedPosition {
    pub branch: TwoShift,
}

impl PostselectedPosition {
    pub fn new(sel: Selection, sigma: f64) -> Self {
        let (i, f) = sel.states();
        Self {
            branch: TwoShift::for_outcome(&i, &f, sigma),
        }
    }
}

impl ParametricModel for PostselectedPosition {
    type Outcome = f64;

    fn log_pdf(&self, theta: f64, x: f64) -> f64 {
        self.branch.log_density(theta, x) - self.branch.mass(theta).ln()
    }

    fn fisher_information(&self, theta: f64) -> Result<f64> {
        let m = self.branch.mass(theta);
        if !(m > 0.0) {
            return Err(Error::PostselectionImpossible {
                pr_f: m,
                threshold: 0.0,
            });
        }
        let dm = self.branch.mass_derivative(theta);
        // normalized density p = g / m: I = int g'^2/g / m - m'^2 / m^2
        Ok((self.branch.branch_fisher(theta, FISHER_POINTS) / m - dm * dm / (m * m)).max(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointOutcome {
    /// System found in `|f>` rather than `|f_perp>`.
    pub passed: bool,
    pub x: f64,
}

/// System measured in `{|f>, |f_perp>}` and probe position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointModel {
    pub on_f: TwoShift,
    pub on_perp: TwoShift,
}

impl JointModel {
    pub fn new(sel: Selection, sigma: f64) -> Self {
        let (i, f) = sel.states();
        let perp = orthogonal_complement(sel);
        Self {
            on_f: TwoShift::for_outcome(&i, &f, sigma),
            on_perp: TwoShift::for_outcome(&i, &perp, sigma),
        }
    }

    fn branch(&self, passed: bool) -> &TwoShift {
        if passed {
            &self.on_f
        } else {
            &self.on_perp
        }
    }
}

/// `|f_perp> = -e^{-i s2} sin t2 |0> + cos t2 |1>`.
pub fn orthogonal_complement(sel: Selection) -> StateVector {
    StateVector::new(
        vec![2],
        vec![
            C64::from_polar(-sel.t2.sin(), -sel.s2),
            C64::new(sel.t2.cos(), 0.0),
        ],
    )
    .expect("qubit")
}

impl ParametricModel for JointModel {
    type Outcome = JointOutcome;

    fn log_pdf(&self, theta: f64, o: JointOutcome) -> f64 {
        self.branch(o.passed).log_density(theta, o.x)
    }

    fn fisher_information(&self, theta: f64) -> Result<f64> {
        Ok(self.on_f.branch_fisher(theta, FISHER_POINTS)
            + self.on_perp.branch_fisher(theta, FISHER_POINTS))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    PostselectedPosition,
    JointPosition,
}

impl Strategy {
    fn stream_tag(self) -> u64 {
        match self {
            Self::PostselectedPosition => 0,
            Self::JointPosition => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub sigma: f64,
    pub theta_true: f64,
    /// Prepared copies per repetition.
    pub n: usize,
    pub selection: Selection,
    pub strategies: Vec<Strategy>,
    /// MLE search interval; `None` means `[0, 8 sigma]`.
    pub search: Option<(f64, f64)>,
    /// Points of the tabulated sampling density.
    pub table_points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            theta_true: 2.0,
            n: 10_000,
            selection: Selection::symmetric(1.0),
            strategies: vec![Strategy::PostselectedPosition, Strategy::JointPosition],
            search: None,
            table_points: 8193,
        }
    }
}

impl ExperimentConfig {
    pub fn search_interval(&self) -> (f64, f64) {
        self.search.unwrap_or((0.0, 8.0 * self.sigma))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Input(format!(
                "sigma: must be positive, got {}",
                self.sigma
            )));
        }
        if !self.theta_true.is_finite() {
            return Err(Error::Input("theta_true: must be finite".into()));
        }
        if self.n == 0 {
            return Err(Error::Input("n: need at least one copy".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Input("strategies: none selected".into()));
        }
        if self.table_points < 3 {
            return Err(Error::Input("table_points: need at least 3".into()));
        }
        let (lo, hi) = self.search_interval();
        if !(hi > lo) || self.theta_true < lo || self.theta_true > hi {
            return Err(Error::Input(format!(
                "search: [{lo}, {hi}] must contain theta_true = {}",
                self.theta_true
            )));
        }
        Ok(())
    }
}

/// Copies spent by one repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialBudget {
    pub n: usize,
    pub n_ps: usize,
    pub n_int: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationRun {
    pub strategy: Strategy,
    pub theta_true: f64,
    pub budget: TrialBudget,
    /// Outcomes used by the fit; for the joint strategy only positions.
    pub samples: Vec<f64>,
    pub theta_hat: Option<f64>,
    pub squared_error: Option<f64>,
}

struct Prepared {
    post: PostselectedPosition,
    joint: JointModel,
    pr_f: f64,
    sampler_f: Option<InverseCdf>,
    sampler_perp: Option<InverseCdf>,
}

impl Prepared {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        let post = PostselectedPosition::new(config.selection, config.sigma);
        let joint = JointModel::new(config.selection, config.sigma);
        let theta = config.theta_true;
        let pr_f = joint.on_f.mass(theta).clamp(0.0, 1.0);
        let sampler = |b: &TwoShift| -> Result<Option<InverseCdf>> {
            if b.mass(theta) > 0.0 {
                Ok(Some(InverseCdf::new(
                    &b.tabulate(theta, config.table_points)?,
                )?))
            } else {
                Ok(None)
            }
        };
        Ok(Self {
            post,
            joint,
            pr_f,
            sampler_f: sampler(&joint.on_f)?,
            sampler_perp: sampler(&joint.on_perp)?,
        })
    }
}

/// One repetition of `strategy`, drawn from stream `(seed, rep, strategy)`.
fn run_once(
    config: &ExperimentConfig,
    prep: &Prepared,
    strategy: Strategy,
    rep: usize,
    seed: u64,
) -> Result<EstimationRun> {
    let mut rng = rng_for(seed, ((rep as u64) << 1) | strategy.stream_tag());
    let n = config.n;
    let n_ps = Binomial::new(n as u64, prep.pr_f)
        .map_err(|e| Error::Numerical(format!("binomial draw: {e}")))?
        .sample(&mut rng) as usize;
    let theta = config.theta_true;
    let search = config.search_interval();
    let (budget, samples, fit) = match strategy {
        Strategy::PostselectedPosition => {
            let samples = match (&prep.sampler_f, n_ps) {
                (Some(s), k) if k > 0 => s.sample_n(k, &mut rng),
                _ => Vec::new(),
            };
            let fit = if samples.is_empty() {
                None
            } else {
                mle_fit(&samples, &prep.post, search).ok()
            };
            (TrialBudget { n, n_ps, n_int: 0 }, samples, fit)
        }
        Strategy::JointPosition => {
            let mut outcomes = Vec::with_capacity(n);
            for (passed, count, sampler) in [
                (true, n_ps, &prep.sampler_f),
                (false, n - n_ps, &prep.sampler_perp),
            ] {
                if count == 0 {
                    continue;
                }
                let s = sampler
                    .as_ref()
                    .ok_or_else(|| Error::Numerical("sampled a zero-probability branch".into()))?;
                outcomes.extend((0..count).map(|_| JointOutcome {
                    passed,
                    x: s.sample(&mut rng),
                }));
            }
            let fit = mle_fit(&outcomes, &prep.joint, search).ok();
            let samples = outcomes.iter().map(|o| o.x).collect();
            (TrialBudget { n, n_ps, n_int: n }, samples, fit)
        }
    };
    Ok(EstimationRun {
        strategy,
        theta_true: theta,
        budget,
        samples,
        theta_hat: fit,
        squared_error: fit.map(|t| (t - theta).powi(2)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub n: usize,
    /// `E[n_strategy]`: `Pr(f) n` when postselecting, `n` otherwise.
    pub expected_n: f64,
    /// Mean number of copies the estimator actually used.
    pub mean_n_used: f64,
    /// Quantum Fisher information per used copy.
    pub fisher_quantum: f64,
    /// Classical Fisher information of the measurement per used copy.
    pub fisher_classical: f64,
    pub mse: Option<f64>,
    /// `1 / (E[n] fisher_quantum)`.
    pub bound: f64,
    pub ratio: Option<f64>,
    pub classical_bound: f64,
    pub classical_ratio: Option<f64>,
    pub successes: usize,
    /// Repetitions where the estimator could not be formed.
    pub failures: usize,
    /// Empirical mean of `n_ps / n`.
    pub mean_success_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonSummary {
    pub sigma: f64,
    pub theta_true: f64,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub selection: Selection,
    pub pr_f: f64,
    pub joint_measurement: &'static str,
    pub strategies: Vec<StrategySummary>,
}

pub fn run_comparison(
    config: &ExperimentConfig,
    reps: usize,
    seed: u64,
) -> Result<ComparisonSummary> {
    config.validate()?;
    if reps == 0 {
        return Err(Error::Input("reps: need at least one repetition".into()));
    }
    let prep = Prepared::new(config)?;
    let params = AnalyticParams::new(config.selection, config.sigma)?;
    let theta = config.theta_true;
    let mut strategies = Vec::new();
    for &strategy in &config.strategies {
        let runs: Vec<(TrialBudget, Option<f64>)> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                run_once(config, &prep, strategy, rep, seed).map(|r| (r.budget, r.squared_error))
            })
            .collect::<Result<_>>()?;
        let (expected_n, fisher_quantum, fisher_classical) = match strategy {
            Strategy::PostselectedPosition => (
                prep.pr_f * config.n as f64,
                qfi_ps_closed(&params, theta)?,
                prep.post.fisher_information(theta)?,
            ),
            Strategy::JointPosition => (
                config.n as f64,
                qfi_int_closed(config.sigma),
                prep.joint.fisher_information(theta)?,
            ),
        };
        let errors: Vec<f64> = runs.iter().filter_map(|r| r.1).collect();
        let successes = errors.len();
        let mse = (successes > 0).then(|| errors.iter().sum::<f64>() / successes as f64);
        let used = |b: &TrialBudget| match strategy {
            Strategy::PostselectedPosition => b.n_ps,
            Strategy::JointPosition => b.n_int,
        };
        let mean_n_used = runs.iter().map(|r| used(&r.0) as f64).sum::<f64>() / reps as f64;
        let mean_success_fraction =
            runs.iter().map(|r| r.0.n_ps as f64).sum::<f64>() / (reps as f64 * config.n as f64);
        let bound = 1.0 / (expected_n * fisher_quantum);
        let classical_bound = 1.0 / (expected_n * fisher_classical);
        strategies.push(StrategySummary {
            strategy,
            n: config.n,
            expected_n,
            mean_n_used,
            fisher_quantum,
            fisher_classical,
            mse,
            bound,
            ratio: mse.map(|m| m / bound),
            classical_bound,
            classical_ratio: mse.map(|m| m / classical_bound),
            successes,
            failures: reps - successes,
            mean_success_fraction,
        });
    }
    Ok(ComparisonSummary {
        sigma: config.sigma,
        theta_true: theta,
        n: config.n,
        reps,
        seed,
        selection: config.selection,
        pr_f: prep.pr_f,
        joint_measurement: "system in {|f>, |f_perp>} and probe position",
        strategies,
    })
}

/// Single repetition with its samples, for inspection.
pub fn estimation_run(
    config: &ExperimentConfig,
    strategy: Strategy,
    rep: usize,
    seed: u64,
) -> Result<EstimationRun> {
    config.validate()?;
    let prep = Prepared::new(config)?;
    run_once(config, &prep, strategy, rep, seed)
}
