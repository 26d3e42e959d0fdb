//! Closed-loop solver for the truncated moment system
//!
//! ```text
//! ∂t m_k + k/(2k+1) ∂x m_{k-1} + (k+1)/(2k+1) ∂x m_{k+1} = S m  (k = 0..N)
//! ```
//!
//! with the unclosed `∂x m_{N+1}` supplied by a [`ClosureKind`]: WENO5 in
//! space with componentwise Lax–Friedrichs flux splitting, SSP-RK3 in time,
//! periodic or reflective boundaries, and per-step hyperbolicity
//! diagnostics based on the eigenvalues of the effective flux Jacobian.
//!
//! Moment-value closures (P_N, FP_N, LM, LWM) enter through the
//! conservative flux of the last row; gradient closures (LG, LGNM, exact
//! free streaming) enter as a nonconservative product with coefficients
//! frozen at each node, multiplied by LF-split WENO5 derivatives of each
//! moment. Only the last equation is modified, so the density equation
//! stays in divergence form for every closure.

use ndarray::Array2;

use crate::closures::{pn_matrix, pn_row_coefficients, ClosureEval, ClosureForm, ClosureKind};
use crate::eig::dense_eigenvalues;
use crate::error::{invalid, Error, Result};
use crate::grid::{fill_ghosts, Boundary, Parity, NG};
use crate::kinetic::CrossSections;
use crate::scalar::Scalar;
use crate::weno::{lf_split_derivative_into, SplitScratch};

/// Tolerance on |Im λ| above which a node counts as non-hyperbolic.
pub const TOL_IMAG: f64 = 1e-8;

/// Configuration of a closed-loop run.
#[derive(Debug, Clone)]
pub struct SolverConfig<S> {
    pub nx: usize,
    /// Time step as a fraction of Δx.
    pub cfl: S,
    /// Lax–Friedrichs penalty constant.
    pub alpha_lf: S,
    pub boundary: Boundary,
    /// Truncation order N.
    pub order: usize,
    /// Snapshot interval; `None` records ten intervals plus the final time.
    pub record_dt: Option<f64>,
    /// Record per-step imaginary-eigenvalue counts and the running max norm.
    pub diagnostics: bool,
    pub tol_imag: f64,
}

impl<S: Scalar> SolverConfig<S> {
    pub fn new(order: usize) -> Self {
        SolverConfig {
            nx: 256,
            cfl: S::of(0.1),
            alpha_lf: S::of(5.0),
            boundary: Boundary::Periodic,
            order,
            record_dt: None,
            diagnostics: true,
            tol_imag: TOL_IMAG,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 16 {
            return invalid("SolverConfig: nx must be at least 16");
        }
        if !(self.cfl > S::zero()) {
            return invalid("SolverConfig: CFL ratio must be positive");
        }
        if !(self.alpha_lf > S::zero()) {
            return invalid("SolverConfig: alpha_lf must be positive");
        }
        if self.order < 1 {
            return invalid("SolverConfig: order must be at least 1");
        }
        // The split system carries signals at speed alpha.
        let speed = self.alpha_lf.max(S::one());
        if self.cfl * speed > S::of(1.45) {
            return invalid(format!(
                "SolverConfig: cfl * alpha = {} exceeds the stability bound 1.45",
                (self.cfl * speed).as_f64()
            ));
        }
        Ok(())
    }
}

/// Per-step hyperbolicity diagnostics.
#[derive(Debug, Clone, Default)]
pub struct HyperbolicityReport {
    pub times: Vec<f64>,
    /// Grid points whose effective Jacobian has an eigenvalue with
    /// |imaginary part| above tolerance.
    pub imag_counts: Vec<usize>,
    /// Max norm of the state after the step.
    pub linf: Vec<f64>,
}

impl HyperbolicityReport {
    pub fn cumulative_imag(&self) -> usize {
        self.imag_counts.iter().sum()
    }

    pub fn max_linf(&self) -> f64 {
        self.linf.iter().fold(0.0, |a, &b| a.max(b))
    }
}

/// Where and when a run lost finiteness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupRecord {
    pub time: f64,
    pub component: usize,
    pub cell: usize,
}

/// Recorded result of a closed-loop run. A blowup does not discard the
/// history accumulated so far; it is recorded explicitly instead.
#[derive(Debug, Clone)]
pub struct MomentSolution<S> {
    pub nx: usize,
    pub order: usize,
    pub boundary: Boundary,
    pub closure_name: String,
    pub times: Vec<f64>,
    /// `(order + 1) × nx` row-major state at each recorded time.
    pub snapshots: Vec<Vec<S>>,
    pub report: HyperbolicityReport,
    pub blowup: Option<BlowupRecord>,
}

impl<S: Scalar> MomentSolution<S> {
    pub fn final_state(&self) -> &[S] {
        self.snapshots.last().expect("at least the initial snapshot")
    }

    pub fn final_moment(&self, k: usize) -> &[S] {
        &self.final_state()[k * self.nx..(k + 1) * self.nx]
    }
}

/// Result of a dense eigenvalue check.
#[derive(Debug, Clone)]
pub struct EigCheck {
    /// `(re, im)` pairs.
    pub eigenvalues: Vec<(f64, f64)>,
    pub max_imag: f64,
    /// Whether `max_imag` exceeds the tolerance it was checked against.
    pub flagged: bool,
}

/// Full eigen-decomposition of a small dense matrix (Hessenberg + shifted
/// QR); reports the largest imaginary magnitude against `tol`.
pub fn eig_real_check(matrix: &Array2<f64>, tol: f64) -> Result<EigCheck> {
    let (r, c) = matrix.dim();
    if r != c {
        return invalid("eig_real_check: matrix must be square");
    }
    if r > 16 {
        return invalid("eig_real_check: matrix larger than 16 x 16");
    }
    let rows: Vec<Vec<f64>> = (0..r).map(|i| (0..c).map(|j| matrix[(i, j)]).collect()).collect();
    let eigenvalues = dense_eigenvalues(rows)?;
    let max_imag = eigenvalues.iter().fold(0.0f64, |a, &(_, im)| a.max(im.abs()));
    Ok(EigCheck {
        eigenvalues,
        max_imag,
        flagged: max_imag > tol,
    })
}

/// Scratch state shared by the RHS evaluations of one run.
struct Workspace<S> {
    /// Ghosted copy of each component.
    ghosted: Vec<Vec<S>>,
    /// Ghosted flux buffer.
    flux: Vec<S>,
    /// Ghosted closure values m_{N+1} (moment-value closures).
    closure_vals: Vec<S>,
    /// Interior node states, one row per cell.
    node_states: Array2<S>,
    /// Ghosted node states (moment-value closures see ghost cells too).
    node_states_ghosted: Array2<S>,
    /// Frozen per-node gradient coefficients.
    coeffs: Array2<S>,
    /// LF-split derivative of each component (gradient closures).
    dsplit: Vec<Vec<S>>,
    split: SplitScratch<S>,
    deriv: Vec<S>,
    stage: Vec<S>,
    rhs_buf: Vec<S>,
}

impl<S: Scalar> Workspace<S> {
    fn new(nx: usize, order: usize) -> Self {
        let comps = order + 1;
        Workspace {
            ghosted: vec![vec![S::zero(); nx + 2 * NG]; comps],
            flux: vec![S::zero(); nx + 2 * NG],
            closure_vals: vec![S::zero(); nx + 2 * NG],
            node_states: Array2::zeros((nx, comps)),
            node_states_ghosted: Array2::zeros((nx + 2 * NG, comps)),
            coeffs: Array2::zeros((nx, comps)),
            dsplit: vec![vec![S::zero(); nx]; comps],
            split: SplitScratch::new(nx),
            deriv: vec![S::zero(); nx],
            stage: vec![S::zero(); comps * nx],
            rhs_buf: vec![S::zero(); comps * nx],
        }
    }
}

/// Single RHS evaluation: fills `out` with
/// `-(transport) + S m (+ filter source)` for the current state.
fn eval_rhs<S: Scalar>(
    state: &[S],
    xs: &CrossSections<S>,
    closure: &ClosureEval<'_, S>,
    cfg: &SolverConfig<S>,
    dx: S,
    ws: &mut Workspace<S>,
    include_transport: bool,
    out: &mut [S],
) -> Result<()> {
    let nx = cfg.nx;
    let order = cfg.order;

    for k in 0..=order {
        let g = &mut ws.ghosted[k];
        g[NG..NG + nx].copy_from_slice(&state[k * nx..(k + 1) * nx]);
        fill_ghosts(g, cfg.boundary, Parity::of_moment(k));
    }

    if include_transport {
        match closure.form() {
            ClosureForm::MomentValue => {
                match closure.kind {
                    ClosureKind::Pn | ClosureKind::Fpn { .. } => {
                        ws.closure_vals.fill(S::zero());
                    }
                    _ => {
                        for i in 0..nx + 2 * NG {
                            for k in 0..=order {
                                ws.node_states_ghosted[(i, k)] = ws.ghosted[k][i];
                            }
                        }
                        let vals = closure.moment_value_batch(&ws.node_states_ghosted)?;
                        ws.closure_vals.copy_from_slice(&vals);
                    }
                }
                for k in 0..=order {
                    let (a_lo, a_hi) = pn_row_coefficients::<S>(k);
                    for i in 0..nx + 2 * NG {
                        let lo = if k > 0 { ws.ghosted[k - 1][i] } else { S::zero() };
                        let hi = if k < order {
                            ws.ghosted[k + 1][i]
                        } else {
                            ws.closure_vals[i]
                        };
                        ws.flux[i] = a_lo * lo + a_hi * hi;
                    }
                    lf_split_derivative_into(
                        &ws.flux,
                        &ws.ghosted[k],
                        dx,
                        cfg.alpha_lf,
                        &mut ws.split,
                        &mut ws.deriv,
                    );
                    for j in 0..nx {
                        out[k * nx + j] = -ws.deriv[j];
                    }
                }
            }
            ClosureForm::GradientCoeffs => {
                for j in 0..nx {
                    for k in 0..=order {
                        ws.node_states[(j, k)] = ws.ghosted[k][NG + j];
                    }
                }
                let coeffs = closure.gradient_coeffs_batch(&ws.node_states)?;
                ws.coeffs.assign(&coeffs);

                // Conservative rows 0..N-1.
                for k in 0..order {
                    let (a_lo, a_hi) = pn_row_coefficients::<S>(k);
                    for i in 0..nx + 2 * NG {
                        let lo = if k > 0 { ws.ghosted[k - 1][i] } else { S::zero() };
                        ws.flux[i] = a_lo * lo + a_hi * ws.ghosted[k + 1][i];
                    }
                    lf_split_derivative_into(
                        &ws.flux,
                        &ws.ghosted[k],
                        dx,
                        cfg.alpha_lf,
                        &mut ws.split,
                        &mut ws.deriv,
                    );
                    for j in 0..nx {
                        out[k * nx + j] = -ws.deriv[j];
                    }
                }

                // Last row: N/(2N+1) ∂x m_{N-1} + (N+1)/(2N+1) Σ c_k ∂x m_k,
                // every derivative taken in LF-split form.
                for k in 0..=order {
                    let (g, d) = (&ws.ghosted[k], &mut ws.dsplit[k]);
                    lf_split_derivative_into(g, g, dx, cfg.alpha_lf, &mut ws.split, d);
                }
                let (a_lo, a_hi) = pn_row_coefficients::<S>(order);
                for j in 0..nx {
                    let mut closure_term = S::zero();
                    for k in 0..=order {
                        closure_term = closure_term + ws.coeffs[(j, k)] * ws.dsplit[k][j];
                    }
                    out[order * nx + j] =
                        -(a_lo * ws.dsplit[order - 1][j] + a_hi * closure_term);
                }
            }
        }
    } else {
        out.fill(S::zero());
    }

    // Relaxation sources: -sigma_a m_0 and -(sigma_s + sigma_a) m_k.
    for j in 0..nx {
        out[j] = out[j] - xs.sigma_a[j] * state[j];
    }
    for k in 1..=order {
        for j in 0..nx {
            out[k * nx + j] =
                out[k * nx + j] - (xs.sigma_s[j] + xs.sigma_a[j]) * state[k * nx + j];
        }
    }
    if let Some(filter) = closure.filter() {
        for k in 0..=order {
            let rate = filter.nu * filter.l[k];
            for j in 0..nx {
                out[k * nx + j] = out[k * nx + j] - rate * state[k * nx + j];
            }
        }
    }
    Ok(())
}

fn rk3_step<S: Scalar>(
    state: &mut [S],
    xs: &CrossSections<S>,
    closure: &ClosureEval<'_, S>,
    cfg: &SolverConfig<S>,
    dx: S,
    dt: S,
    ws: &mut Workspace<S>,
) -> Result<()> {
    let n = state.len();
    // Stage 1
    let mut rhs = std::mem::take(&mut ws.rhs_buf);
    let mut stage = std::mem::take(&mut ws.stage);
    eval_rhs(state, xs, closure, cfg, dx, ws, true, &mut rhs)?;
    for i in 0..n {
        stage[i] = state[i] + dt * rhs[i];
    }
    // Stage 2
    eval_rhs(&stage, xs, closure, cfg, dx, ws, true, &mut rhs)?;
    let (c34, c14) = (S::of(0.75), S::of(0.25));
    for i in 0..n {
        stage[i] = c34 * state[i] + c14 * (stage[i] + dt * rhs[i]);
    }
    // Stage 3
    eval_rhs(&stage, xs, closure, cfg, dx, ws, true, &mut rhs)?;
    let (c13, c23) = (S::of(1.0 / 3.0), S::of(2.0 / 3.0));
    for i in 0..n {
        state[i] = c13 * state[i] + c23 * (stage[i] + dt * rhs[i]);
    }
    ws.rhs_buf = rhs;
    ws.stage = stage;
    Ok(())
}

fn first_non_finite<S: Scalar>(state: &[S], nx: usize) -> Option<(usize, usize)> {
    state
        .iter()
        .position(|v| !v.is_finite())
        .map(|i| (i / nx, i % nx))
}

/// Advances the moment state one SSP-RK3 step. The state layout is
/// `(order + 1) × nx` row-major. Allocates its own scratch space;
/// [`run_moment`] reuses buffers across steps instead.
pub fn step_moment<S: Scalar>(
    state: &mut [S],
    xs: &CrossSections<S>,
    closure: &ClosureKind<S>,
    cfg: &SolverConfig<S>,
    dt: S,
    t_next: f64,
) -> Result<()> {
    cfg.validate()?;
    if state.len() != (cfg.order + 1) * cfg.nx {
        return invalid("step_moment: state length does not match the configuration");
    }
    if xs.nx() != cfg.nx {
        return invalid("step_moment: cross sections sampled on a different grid");
    }
    let eval = ClosureEval::new(closure, cfg.order)?;
    let dx = S::one() / S::of_usize(cfg.nx);
    if dt * cfg.alpha_lf.max(S::one()) > S::of(1.45) * dx {
        return invalid("step_moment: dt violates the split-system CFL bound");
    }
    let mut ws = Workspace::new(cfg.nx, cfg.order);
    rk3_step(state, xs, &eval, cfg, dx, dt, &mut ws)?;
    if let Some((component, cell)) = first_non_finite(state, cfg.nx) {
        return Err(Error::NumericalBlowup {
            time: t_next,
            component,
            cell,
        });
    }
    Ok(())
}

/// Counts grid points whose effective flux Jacobian has eigenvalues off the
/// real axis. The Jacobian is the P_N matrix with the closure contribution
/// `(N+1)/(2N+1) c_k` added to its last row.
fn count_imaginary_nodes<S: Scalar>(
    state: &[S],
    closure: &ClosureEval<'_, S>,
    cfg: &SolverConfig<S>,
    base: &[Vec<f64>],
    ws: &mut Workspace<S>,
) -> Result<usize> {
    let nx = cfg.nx;
    let order = cfg.order;
    // Linear closures leave the Jacobian at the constant real-spectrum P_N
    // matrix everywhere.
    if matches!(closure.kind, ClosureKind::Pn | ClosureKind::Fpn { .. }) {
        return Ok(0);
    }
    for j in 0..nx {
        for k in 0..=order {
            ws.node_states[(j, k)] = state[k * nx + j];
        }
    }
    let coeffs: Array2<S> = match closure.form() {
        ClosureForm::GradientCoeffs => closure.gradient_coeffs_batch(&ws.node_states)?,
        ClosureForm::MomentValue => {
            let mut c = Array2::zeros((nx, order + 1));
            let mut row = vec![S::zero(); order + 1];
            let mut m = vec![S::zero(); order + 1];
            for j in 0..nx {
                for k in 0..=order {
                    m[k] = ws.node_states[(j, k)];
                }
                closure.diagnostic_coeffs(&m, &mut row)?;
                for k in 0..=order {
                    c[(j, k)] = row[k];
                }
            }
            c
        }
    };
    let scale = (order as f64 + 1.0) / (2.0 * order as f64 + 1.0);
    let mut count = 0usize;
    for j in 0..nx {
        let mut a = base.to_vec();
        for k in 0..=order {
            a[order][k] = base[order][k] + scale * coeffs[(j, k)].as_f64();
        }
        let flagged = match dense_eigenvalues(a) {
            Ok(eig) => eig.iter().any(|&(_, im)| im.abs() > cfg.tol_imag),
            // A failed iteration is itself evidence of a pathological state.
            Err(_) => true,
        };
        if flagged {
            count += 1;
        }
    }
    Ok(count)
}

/// Integrates the moment system to `t_final`, recording snapshots and (when
/// enabled) per-step diagnostics. A blowup terminates the run early and is
/// recorded in the returned solution rather than erasing it.
pub fn run_moment<S: Scalar>(
    ic: &[S],
    xs: &CrossSections<S>,
    closure: &ClosureKind<S>,
    cfg: &SolverConfig<S>,
    t_final: f64,
) -> Result<MomentSolution<S>> {
    cfg.validate()?;
    if !(t_final > 0.0) {
        return invalid("run_moment: t_final must be positive");
    }
    if ic.len() != (cfg.order + 1) * cfg.nx {
        return invalid("run_moment: initial state length mismatch");
    }
    if xs.nx() != cfg.nx {
        return invalid("run_moment: cross sections sampled on a different grid");
    }
    let eval = ClosureEval::new(closure, cfg.order)?;
    let dx = S::one() / S::of_usize(cfg.nx);
    let dx_f = dx.as_f64();

    let record_dt = cfg.record_dt.unwrap_or(t_final / 10.0);
    let mut record_times = vec![0.0];
    let mut k = 1usize;
    loop {
        let t = k as f64 * record_dt;
        if t > t_final * (1.0 + 1e-12) {
            break;
        }
        record_times.push(t.min(t_final));
        k += 1;
    }
    if *record_times.last().unwrap() < t_final * (1.0 - 1e-12) {
        record_times.push(t_final);
    }

    let base: Vec<Vec<f64>> = {
        let a = pn_matrix::<f64>(cfg.order)?;
        (0..=cfg.order)
            .map(|i| (0..=cfg.order).map(|j| a[(i, j)]).collect())
            .collect()
    };

    let mut ws = Workspace::new(cfg.nx, cfg.order);
    let mut state = ic.to_vec();
    let mut solution = MomentSolution {
        nx: cfg.nx,
        order: cfg.order,
        boundary: cfg.boundary,
        closure_name: closure.name().to_string(),
        times: vec![0.0],
        snapshots: vec![state.clone()],
        report: HyperbolicityReport::default(),
        blowup: None,
    };

    'outer: for w in record_times.windows(2) {
        let (t_a, t_b) = (w[0], w[1]);
        let interval = t_b - t_a;
        let steps = (interval / (cfg.cfl.as_f64() * dx_f)).ceil().max(1.0) as usize;
        let dt = S::of(interval / steps as f64);
        for s in 0..steps {
            let t_next = t_a + interval * (s + 1) as f64 / steps as f64;
            rk3_step(&mut state, xs, &eval, cfg, dx, dt, &mut ws)?;
            if let Some((component, cell)) = first_non_finite(&state, cfg.nx) {
                solution.blowup = Some(BlowupRecord {
                    time: t_next,
                    component,
                    cell,
                });
                break 'outer;
            }
            if cfg.diagnostics {
                let count = count_imaginary_nodes(&state, &eval, cfg, &base, &mut ws)?;
                let linf = state.iter().fold(0.0f64, |a, v| a.max(v.as_f64().abs()));
                solution.report.times.push(t_next);
                solution.report.imag_counts.push(count);
                solution.report.linf.push(linf);
            }
        }
        solution.times.push(t_b);
        solution.snapshots.push(state.clone());
    }
    Ok(solution)
}
