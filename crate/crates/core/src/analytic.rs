//! Closed forms for the qubit / Gaussian-probe model `sigma_z (x) p`.
//!
//! With `E = exp(-theta^2 / 2 sigma^2)` the success probability is
//! `w+ + w- E` and the postselected Fisher information has the closed form
//! evaluated by [`qfi_ps_closed`]. The position density and its classical
//! Fisher information are stated for `cos^2 t1 = cos^2 t2 = 1/2` only.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::TabulatedDensity;
use crate::linalg::{sigma_z, LinearOperator};
use crate::postselection::{postselected_state, InstanceSpec};
use crate::state::{ProbeGrid, Selection};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticParams {
    pub sel: Selection,
    pub sigma: f64,
    /// `cos(s1 - s2)`.
    pub c: f64,
}

impl AnalyticParams {
    pub fn new(sel: Selection, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Input(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self {
            sel,
            sigma,
            c: sel.relative_phase().cos(),
        })
    }

    pub fn w_pm(&self) -> (f64, f64) {
        w_pm(self.sel)
    }

    /// `w+ + w- exp(-theta^2 / 2 sigma^2)`.
    pub fn success_probability(&self, theta: f64) -> f64 {
        let (wp, wm) = self.w_pm();
        wp + wm * gauss_overlap(self.sigma, theta)
    }

    /// `Some(c)` when the selection sits in the domain of the position-density
    /// closed forms: `cos^2 t1 = cos^2 t2 = 1/2` and `c = +-1`.
    pub fn symmetric_sign(&self) -> Option<f64> {
        let half = |t: f64| (t.cos().powi(2) - 0.5).abs() < tol::CONSTRUCTION;
        if half(self.sel.t1) && half(self.sel.t2) && (self.c.abs() - 1.0).abs() < tol::CONSTRUCTION
        {
            Some(self.c.signum())
        } else {
            None
        }
    }
}

fn gauss_overlap(sigma: f64, theta: f64) -> f64 {
    (-theta * theta / (2.0 * sigma * sigma)).exp()
}

/// `w+- = (|<f|i>|^2 +- |<f|sigma_z|i>|^2) / 2`.
pub fn w_pm(sel: Selection) -> (f64, f64) {
    let (i, f) = sel.states();
    let overlap = f.inner(&i).norm_sqr();
    let zi = sigma_z().apply_to(i.amplitudes()).expect("qubit");
    let z = crate::linalg::inner(f.amplitudes(), &zi).norm_sqr();
    ((overlap + z) / 2.0, (overlap - z) / 2.0)
}

/// Postselected Fisher information of the Gaussian probe.
pub fn qfi_ps_closed(params: &AnalyticParams, theta: f64) -> Result<f64> {
    let (wp, wm) = params.w_pm();
    let s2 = params.sigma * params.sigma;
    let e = gauss_overlap(params.sigma, theta);
    let den = wp + wm * e;
    if !(den > tol::MIN_SUCCESS) {
        return Err(Error::PostselectionImpossible {
            pr_f: den,
            threshold: tol::MIN_SUCCESS,
        });
    }
    let num = wp * wp + theta * theta / s2 * wp * wm * e - wm * wm * e * e;
    Ok(num / (s2 * den * den))
}

/// Fisher information of the unconditioned joint state, `1 / sigma^2`.
pub fn qfi_int_closed(sigma: f64) -> f64 {
    1.0 / (sigma * sigma)
}

/// Postselected position density for the symmetric selections, `c = +-1`.
pub fn fps_density(sigma: f64, theta: f64, c: f64, x: f64) -> f64 {
    let s2 = sigma * sigma;
    let g = |u: f64| (-u * u / (2.0 * s2)).exp();
    let num = g(x - theta) + g(x + theta) + 2.0 * c * (-(x * x + theta * theta) / (2.0 * s2)).exp();
    num / (2.0 * (2.0 * PI * s2).sqrt() * (1.0 + c * g(theta)))
}

/// Classical Fisher information of [`fps_density`] in the closed form as
/// stated. The denominator is `(1 + E)^2` for both signs; for `c = -1` the
/// quadrature of the density itself has `(1 - E)^2` instead.
pub fn ic_closed(sigma: f64, theta: f64, c: f64) -> f64 {
    let s2 = sigma * sigma;
    let e = gauss_overlap(sigma, theta);
    let num = 1.0 + c * theta * theta / s2 * e - e * e;
    num / (s2 * (1.0 + e).powi(2))
}

/// `fps_density` tabulated on `xs`.
pub fn fps_tabulated(sigma: f64, theta: f64, c: f64, xs: Vec<f64>) -> Result<TabulatedDensity> {
    TabulatedDensity::from_fn(xs, |x| fps_density(sigma, theta, c, x))
}

/// Position density of the postselected probe computed from the grid state,
/// valid for any selection.
pub fn fps_numeric(
    spec: &InstanceSpec,
    grid: &ProbeGrid,
    xs: Vec<f64>,
) -> Result<TabulatedDensity> {
    let (state, _) = postselected_state(spec)?;
    let psi_x = grid.position_wavefunction(state.amplitudes(), &xs)?;
    let values = psi_x.iter().map(|a| a.norm_sqr()).collect();
    TabulatedDensity::new(xs, values)
}

/// Uniform position grid `[-half_width, half_width]` with `n` points.
pub fn position_grid(half_width: f64, n: usize) -> Vec<f64> {
    let step = 2.0 * half_width / (n - 1) as f64;
    (0..n).map(|k| -half_width + step * k as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::classical_fisher;
    use crate::postselection::postselected_fisher;
    use crate::state::GaussianProbe;
    use std::f64::consts::{FRAC_PI_4, PI, TAU};

    fn params(sel: Selection, sigma: f64) -> AnalyticParams {
        AnalyticParams::new(sel, sigma).unwrap()
    }

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12
    }

    // d/dtheta by a fourth-order central difference
    fn dtheta(f: impl Fn(f64) -> f64, theta: f64) -> f64 {
        let h = 1e-3;
        (-f(theta + 2.0 * h) + 8.0 * f(theta + h) - 8.0 * f(theta - h) + f(theta - 2.0 * h))
            / (12.0 * h)
    }

    fn quadrature_ic(sigma: f64, theta: f64, c: f64) -> f64 {
        let xs = position_grid(theta.abs() + 14.0 * sigma, 20_001);
        let pdf = fps_tabulated(sigma, theta, c, xs.clone()).unwrap();
        let d: Vec<f64> = xs
            .iter()
            .map(|&x| dtheta(|t| fps_density(sigma, t, c, x), theta))
            .collect();
        classical_fisher(&pdf, &d).unwrap()
    }

    #[test]
    fn w_pm_examples() {
        assert!(close(w_pm(Selection::new(0.0, 0.0, 0.0, 0.0)), (1.0, 0.0)));
        assert!(close(w_pm(Selection::symmetric(1.0)), (0.5, 0.5)));
        assert!(close(w_pm(Selection::symmetric(-1.0)), (0.5, -0.5)));
    }

    #[test]
    fn w_pm_bounds() {
        for k in 0..200 {
            let x = k as f64 * 0.731;
            let sel = Selection::new(x % PI, (2.0 * x) % TAU, (3.3 * x) % PI, (0.7 * x) % TAU);
            let (wp, wm) = w_pm(sel);
            let (i, f) = sel.states();
            assert!(wp + 1e-15 >= wm.abs());
            assert!((wp + wm - f.inner(&i).norm_sqr()).abs() < 1e-12);
            assert!((0.0..=1.0 + 1e-12).contains(&(wp + wm)));
        }
    }

    #[test]
    fn qfi_closed_examples() {
        let p = params(Selection::new(0.0, 0.0, 0.0, 0.0), 1.0);
        for theta in [0.0, 0.3, 2.0, 7.0] {
            assert!((qfi_ps_closed(&p, theta).unwrap() - 1.0).abs() < 1e-14);
        }
        let p = params(Selection::symmetric(1.0), 1.0);
        assert!(qfi_ps_closed(&p, 0.0).unwrap().abs() < 1e-15);
        let p = params(Selection::symmetric(-1.0), 1.0);
        assert!(matches!(
            qfi_ps_closed(&p, 0.0),
            Err(Error::PostselectionImpossible { .. })
        ));
    }

    #[test]
    fn closed_form_matches_grid_engine() {
        let probe = GaussianProbe::new(1.0).unwrap();
        let grid = ProbeGrid::default_for(&probe);
        for (sel, theta) in [
            (Selection::new(0.9, 0.3, 2.0, -0.4), 0.5),
            (Selection::new(FRAC_PI_4, 0.0, 3.0 * FRAC_PI_4, 0.1), 0.2),
            (Selection::symmetric(1.0), 1.7),
            (Selection::new(0.2, 1.0, 1.1, 2.5), 3.0),
        ] {
            let spec = InstanceSpec::qubit_gaussian(sel, &probe, &grid, theta).unwrap();
            let numeric = postselected_fisher(&spec).unwrap();
            let p = params(sel, 1.0);
            let closed = qfi_ps_closed(&p, theta).unwrap();
            assert!(
                (numeric.qfi - closed).abs() < 1e-6 * closed.max(1.0),
                "{} vs {closed}",
                numeric.qfi
            );
            // the denominator is Pr(f)
            assert!((numeric.pr_f - p.success_probability(theta)).abs() < 1e-10);
        }
    }

    #[test]
    fn qfi_int_closed_examples() {
        assert_eq!(qfi_int_closed(1.0), 1.0);
        assert_eq!(qfi_int_closed(2.0), 0.25);
        for sigma in [0.5, 1.0, 2.0] {
            let probe = GaussianProbe::new(sigma).unwrap();
            let grid = ProbeGrid::default_for(&probe);
            let spec = InstanceSpec::qubit_gaussian(
                Selection::new(0.4, 0.2, 1.0, 0.0),
                &probe,
                &grid,
                0.3,
            )
            .unwrap();
            assert!((spec.qfi_int() - qfi_int_closed(sigma)).abs() < 1e-8 * qfi_int_closed(sigma));
        }
    }

    #[test]
    fn fps_density_examples() {
        for x in [-2.0, -0.3, 0.0, 1.1, 4.0] {
            let want = (-x * x / 2.0f64).exp() / (2.0 * PI).sqrt();
            assert!((fps_density(1.0, 0.0, 1.0, x) - want).abs() < 1e-15);
            for (theta, c) in [(0.7, 1.0), (2.0, -1.0), (5.0, 1.0)] {
                let (a, b) = (
                    fps_density(1.3, theta, c, x),
                    fps_density(1.3, theta, c, -x),
                );
                assert_eq!(a, b);
                assert!(a >= 0.0);
            }
        }
        for c in [1.0, -1.0] {
            let pdf = fps_tabulated(1.0, 2.0, c, position_grid(16.0, 8001)).unwrap();
            assert!((pdf.integral() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn numeric_density_matches_closed_form() {
        let probe = GaussianProbe::new(1.0).unwrap();
        let grid = ProbeGrid::default_for(&probe);
        for (c, theta) in [(1.0, 1.5), (-1.0, 0.8)] {
            let spec = InstanceSpec::qubit_gaussian(Selection::symmetric(c), &probe, &grid, theta)
                .unwrap();
            let xs = position_grid(6.0, 61);
            let numeric = fps_numeric(&spec, &grid, xs.clone()).unwrap();
            for (x, v) in xs.iter().zip(numeric.values()) {
                assert!((v - fps_density(1.0, theta, c, *x)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn ic_closed_examples() {
        assert!(ic_closed(1.0, 0.0, 1.0).abs() < 1e-15);
        let q = quadrature_ic(1.0, 3.0, 1.0);
        assert!((ic_closed(1.0, 3.0, 1.0) - q).abs() < 1e-6, "{q}");
        for k in 1..=100 {
            let theta = 0.05 * k as f64;
            assert!(ic_closed(1.0, theta, 1.0) >= ic_closed(1.0, theta, -1.0));
        }
    }

    #[test]
    fn ic_negative_sign_quadrature_uses_other_denominator() {
        // The density with c = -1 is normalized by (1 - E), so its Fisher
        // information carries (1 - E)^2 and equals the postselected QFI.
        for theta in [0.8, 1.5, 3.0] {
            let e = (-theta * theta / 2.0f64).exp();
            let q = quadrature_ic(1.0, theta, -1.0);
            let stated = ic_closed(1.0, theta, -1.0);
            let rescaled = stated * (1.0 + e).powi(2) / (1.0 - e).powi(2);
            assert!((q - rescaled).abs() < 1e-6 * rescaled, "{q} vs {rescaled}");
            let qfi = qfi_ps_closed(&params(Selection::symmetric(-1.0), 1.0), theta).unwrap();
            assert!((q - qfi).abs() < 1e-6 * qfi);
            assert!(stated < q);
        }
    }

    #[test]
    fn symmetric_selection_classical_reaches_quantum() {
        let p = params(Selection::symmetric(1.0), 1.0);
        let mut reached = 0;
        for k in 0..=100 {
            let theta = 0.05 * k as f64;
            let q = qfi_ps_closed(&p, theta).unwrap();
            let ic = ic_closed(1.0, theta, 1.0);
            assert!(ic <= q + 1e-9);
            if q >= qfi_int_closed(1.0) {
                assert!((ic - q).abs() < 1e-6);
                reached += 1;
            }
        }
        assert!(reached > 0);
    }

    #[test]
    fn analytic_inequality_holds() {
        for a in 0..12 {
            for b in 0..12 {
                for d in 0..6 {
                    let sel = Selection::from_relative(
                        a as f64 * PI / 12.0,
                        b as f64 * PI / 12.0,
                        d as f64 * TAU / 6.0,
                    );
                    let p = params(sel, 1.0);
                    for k in 0..40 {
                        let theta = 0.125 * k as f64;
                        if let Ok(q) = qfi_ps_closed(&p, theta) {
                            assert!(p.success_probability(theta) * q <= qfi_int_closed(1.0) + 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_sign_detection() {
        assert_eq!(
            params(Selection::symmetric(1.0), 1.0).symmetric_sign(),
            Some(1.0)
        );
        assert_eq!(
            params(Selection::symmetric(-1.0), 1.0).symmetric_sign(),
            Some(-1.0)
        );
        assert_eq!(
            params(Selection::new(0.3, 0.0, 0.3, 0.0), 1.0).symmetric_sign(),
            None
        );
        assert!(AnalyticParams::new(Selection::symmetric(1.0), 0.0).is_err());
    }
}
