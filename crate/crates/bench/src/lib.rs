//! Fixed inputs for the criterion benchmarks, built once per bench group.

use wva_core::estimation::{sample_outcomes, PostselectedPosition, TwoShift};
use wva_core::postselection::{random_instance, InstanceSpec};
use wva_core::random::{gue, rng_for};
use wva_core::sweep::{Engine, SelectionGrid, SweepSpec};
use wva_core::{ComplexMatrix, GaussianProbe, ProbeGrid, Result, Selection};

/// A GUE matrix of dimension `n`.
pub fn hermitian(n: usize, seed: u64) -> ComplexMatrix {
    gue(&mut rng_for(seed, 0), n)
}

/// Random dense joint instance.
pub fn dense_instance(d_sys: usize, d_probe: usize, seed: u64) -> Result<InstanceSpec> {
    random_instance(seed, (d_sys, d_probe), (0.0, 5.0))
}

/// Qubit with a Gaussian probe on its default grid.
pub fn qubit_instance(theta: f64) -> Result<InstanceSpec> {
    let probe = GaussianProbe::new(1.0)?;
    let grid = ProbeGrid::default_for(&probe);
    InstanceSpec::qubit_gaussian(Selection::symmetric(1.0), &probe, &grid, theta)
}

/// One block of the default sweep: a few theta values over a small selection grid.
pub fn sweep_block(engine: Engine) -> SweepSpec {
    SweepSpec {
        theta_over_sigma: (0.0, 5.0),
        steps: 8,
        selections: SelectionGrid::uniform(4, 4, 4),
        engine,
        ..SweepSpec::default()
    }
}

/// Postselected-position model and `n` outcomes drawn at `theta`.
pub fn mle_fixture(theta: f64, n: usize, seed: u64) -> Result<(PostselectedPosition, Vec<f64>)> {
    let (i, f) = Selection::symmetric(1.0).states();
    let branch = TwoShift::for_outcome(&i, &f, 1.0);
    let samples = sample_outcomes(&branch.tabulate(theta, 8193)?, n, seed)?;
    Ok((PostselectedPosition { branch }, samples))
}
