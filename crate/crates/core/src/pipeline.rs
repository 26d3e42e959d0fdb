//! Data-generation pipeline: seeded kinetic runs over random initial
//! conditions and cross sections, producing the trajectories the training
//! datasets are built from.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Boundary, Grid};
use crate::kinetic::{
    run_kinetic, sample_cross_sections, AngularField, CrossSections, FourierIc,
    KineticRunConfig, MomentTrajectory, TrajectoryMeta,
};
use crate::basis::gauss_legendre;
use crate::scalar::Scalar;

/// Configuration of the data-generation stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenDataConfig {
    /// Number of random initial conditions (trajectories).
    pub n_ic: usize,
    pub nx: usize,
    pub quad_order: usize,
    /// Truncation order N of the closures the data will train; moments up
    /// to N + 1 are recorded.
    pub order: usize,
    pub t_final: f64,
    /// Snapshot cadence in units of Δx of simulated time.
    pub record_every_dx: f64,
    pub k_max: usize,
    /// Kinetic step as a fraction of Δx.
    pub dt_factor: f64,
}

impl GenDataConfig {
    /// Full-scale defaults: 100 initial conditions, 512 cells, 64
    /// ordinates, final time 1.
    pub fn full() -> Self {
        GenDataConfig {
            n_ic: 100,
            nx: 512,
            quad_order: 64,
            order: 5,
            t_final: 1.0,
            record_every_dx: 8.0,
            k_max: 10,
            dt_factor: 0.5,
        }
    }

    /// Reduced defaults sized for CI machines: 10 initial conditions, 128
    /// cells, 32 ordinates.
    pub fn desk() -> Self {
        GenDataConfig {
            n_ic: 10,
            nx: 128,
            quad_order: 32,
            ..Self::full()
        }
    }
}

/// Derives the per-trajectory seed from a base seed.
pub fn trajectory_seed(base_seed: u64, index: usize) -> u64 {
    base_seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index as u64)
}

/// Runs one seeded kinetic trajectory: Fourier initial condition and
/// constant cross sections sampled from the training distributions.
pub fn generate_trajectory<S: Scalar>(
    cfg: &GenDataConfig,
    base_seed: u64,
    index: usize,
) -> Result<MomentTrajectory<S>> {
    let seed = trajectory_seed(base_seed, index);
    let grid: Grid<S> = Grid::new(cfg.nx);
    let ic = FourierIc::sample(seed, cfg.k_max);
    let (sigma_s, sigma_a) = sample_cross_sections(seed ^ 0x5ca7_7e12);
    let xs = CrossSections::constant(sigma_s, sigma_a, cfg.nx)?;
    let field = AngularField::isotropic(&ic.eval_grid(&grid), cfg.quad_order, Boundary::Periodic);
    let quad = gauss_legendre::<S>(cfg.quad_order)?;
    let run_cfg = KineticRunConfig {
        t_final: cfg.t_final,
        record_dt: Some(cfg.record_every_dx / cfg.nx as f64),
        dt_factor: cfg.dt_factor,
        record_order: cfg.order + 1,
    };
    let meta = TrajectoryMeta {
        seed: Some(seed),
        label: format!("train-{index}"),
        ..TrajectoryMeta::default()
    };
    let (traj, _) = run_kinetic(field, &xs, &quad, &run_cfg, meta)?;
    Ok(traj)
}

/// Runs all trajectories of a data-generation config; failures (blowups)
/// are returned per index rather than aborting the batch.
pub fn generate_all<S: Scalar>(
    cfg: &GenDataConfig,
    base_seed: u64,
) -> Vec<(usize, Result<MomentTrajectory<S>>)> {
    (0..cfg.n_ic)
        .map(|i| (i, generate_trajectory(cfg, base_seed, i)))
        .collect()
}
