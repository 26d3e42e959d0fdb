//! Benchmark machinery: kinetic references for scenarios, the
//! kinetic-to-moment grid restriction, and relative-error tables.

use crate::basis::gauss_legendre;
use crate::closures::ClosureKind;
use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::kinetic::{run_kinetic, AngularField, KineticRunConfig, MomentTrajectory, TrajectoryMeta};
use crate::moment_solver::{run_moment, MomentSolution, SolverConfig};
use crate::scalar::Scalar;
use crate::scenarios::Scenario;
use crate::training::relative_l2;

/// Projects an isotropic intensity profile onto the initial moment state
/// of the closed-loop solver, through the same quadrature the kinetic
/// solver uses.
pub fn project_initial_moments<S: Scalar>(
    f0: &[S],
    quad_order: usize,
    order: usize,
) -> Result<Vec<S>> {
    let quad = gauss_legendre::<S>(quad_order)?;
    let field = AngularField::isotropic(f0, quad_order, crate::grid::Boundary::Periodic);
    let snap = crate::kinetic::snapshot_moments(&field, &quad, order);
    Ok(snap.moments)
}

/// Restricts a fine-grid field to a coarser grid by averaging groups of
/// cells (preserves the density integral exactly).
pub fn restrict_mean<S: Scalar>(fine: &[S], nx_fine: usize, nx_coarse: usize) -> Result<Vec<S>> {
    if nx_fine % nx_coarse != 0 {
        return invalid("restrict_mean: fine grid is not a multiple of the coarse one");
    }
    if fine.len() % nx_fine != 0 {
        return invalid("restrict_mean: field length is not a multiple of nx");
    }
    let factor = nx_fine / nx_coarse;
    let comps = fine.len() / nx_fine;
    let inv = S::one() / S::of_usize(factor);
    let mut out = vec![S::zero(); comps * nx_coarse];
    for k in 0..comps {
        for j in 0..nx_coarse {
            let mut acc = S::zero();
            for i in 0..factor {
                acc = acc + fine[k * nx_fine + j * factor + i];
            }
            out[k * nx_coarse + j] = acc * inv;
        }
    }
    Ok(out)
}

/// Kinetic run configuration used for benchmark references.
#[derive(Debug, Clone)]
pub struct ReferenceConfig {
    pub nx: usize,
    pub quad_order: usize,
    /// Highest moment order recorded.
    pub record_order: usize,
    pub dt_factor: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        ReferenceConfig {
            nx: 512,
            quad_order: 64,
            record_order: 10,
            dt_factor: 0.5,
        }
    }
}

/// Computes the kinetic reference trajectory of a scenario (records only
/// t = 0 and the final time unless `record_dt` is narrowed by the caller
/// through `snapshots`).
pub fn kinetic_reference<S: Scalar>(
    scenario: &Scenario,
    cfg: &ReferenceConfig,
    snapshots: usize,
) -> Result<MomentTrajectory<S>> {
    let grid: Grid<S> = Grid::new(cfg.nx);
    let f0 = scenario.initial_profile(&grid);
    let xs = scenario.cross_sections(&grid)?;
    let quad = gauss_legendre::<S>(cfg.quad_order)?;
    let field = AngularField::isotropic(&f0, cfg.quad_order, scenario.boundary);
    let run_cfg = KineticRunConfig {
        t_final: scenario.t_final,
        record_dt: Some(scenario.t_final / snapshots.max(1) as f64),
        dt_factor: cfg.dt_factor,
        record_order: cfg.record_order,
    };
    let meta = TrajectoryMeta {
        label: scenario.name.clone(),
        ..TrajectoryMeta::default()
    };
    let (traj, _) = run_kinetic(field, &xs, &quad, &run_cfg, meta)?;
    Ok(traj)
}

/// Runs a closure on a scenario with the given solver configuration,
/// initializing the moments by projection of the scenario's angular
/// initial condition.
pub fn run_scenario_closure<S: Scalar>(
    scenario: &Scenario,
    closure: &ClosureKind<S>,
    cfg: &SolverConfig<S>,
    quad_order: usize,
) -> Result<MomentSolution<S>> {
    let grid: Grid<S> = Grid::new(cfg.nx);
    let f0 = scenario.initial_profile(&grid);
    let ic = project_initial_moments(&f0, quad_order, cfg.order)?;
    let xs = scenario.cross_sections(&grid)?;
    let mut cfg = cfg.clone();
    cfg.boundary = scenario.boundary;
    run_moment(&ic, &xs, closure, &cfg, scenario.t_final)
}

/// Relative L2 error of selected moments of a closed-loop solution against
/// the final snapshot of a kinetic reference, after restricting the
/// reference to the solution grid.
pub fn final_time_errors<S: Scalar>(
    solution: &MomentSolution<S>,
    reference: &MomentTrajectory<S>,
    moments: &[usize],
) -> Result<Vec<(usize, f64)>> {
    if solution.blowup.is_some() {
        return invalid("final_time_errors: solution blew up before the final time");
    }
    let ref_snap = reference.snapshots.last().unwrap();
    let mut out = Vec::with_capacity(moments.len());
    for &k in moments {
        if k > solution.order || k > reference.order {
            return invalid(format!("final_time_errors: moment {k} not recorded"));
        }
        let approx = solution.final_moment(k);
        let truth = restrict_mean(ref_snap.moment(k, reference.nx), reference.nx, solution.nx)?;
        out.push((k, relative_l2(approx, &truth)?.as_f64()));
    }
    Ok(out)
}
