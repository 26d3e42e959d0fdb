//! Dataset assembly from kinetic trajectories, loss and error metrics, and
//! the mini-batch Adam training loop shared by all four closure forms.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::closures::DENSITY_FLOOR;
use crate::error::{invalid, Error, Result};
use crate::kinetic::{MomentTrajectory, TrajectoryMeta};
use crate::mlp::{adam_step, fit_standardization, AdamState, MlpModel};
use crate::scalar::Scalar;

/// The four learned closure forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ansatz {
    Lm,
    Lwm,
    Lg,
    Lgnm,
}

impl Ansatz {
    pub const ALL: [Ansatz; 4] = [Ansatz::Lm, Ansatz::Lwm, Ansatz::Lg, Ansatz::Lgnm];

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lm" => Ok(Ansatz::Lm),
            "lwm" => Ok(Ansatz::Lwm),
            "lg" => Ok(Ansatz::Lg),
            "lgnm" => Ok(Ansatz::Lgnm),
            other => invalid(format!("unknown ansatz '{other}'")),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ansatz::Lm => "lm",
            Ansatz::Lwm => "lwm",
            Ansatz::Lg => "lg",
            Ansatz::Lgnm => "lgnm",
        }
    }

    /// Network input width for truncation order N.
    pub fn input_width(self, order: usize) -> usize {
        match self {
            Ansatz::Lgnm => order,
            _ => order + 1,
        }
    }

    /// Network output width for truncation order N.
    pub fn output_width(self, order: usize) -> usize {
        match self {
            Ansatz::Lm => 1,
            _ => order + 1,
        }
    }

    /// Whether rows carry the gradient features ∂x m_0..∂x m_N.
    pub fn needs_gradients(self) -> bool {
        matches!(self, Ansatz::Lg | Ansatz::Lgnm)
    }

    /// Whether the target is ∂x m_{N+1} rather than m_{N+1}.
    pub fn target_is_gradient(self) -> bool {
        self.needs_gradients()
    }
}

/// Flattened (input, target) pairs extracted from kinetic trajectories.
#[derive(Debug, Clone)]
pub struct Dataset<S> {
    pub ansatz: Ansatz,
    pub order: usize,
    /// Network inputs, one row per (cell, snapshot).
    pub inputs: Array2<S>,
    /// Features the network outputs are dotted with to form the prediction:
    /// the moments for LWM, the moment gradients for LG/LGNM, `None` for LM.
    pub combine: Option<Array2<S>>,
    pub targets: Array1<S>,
    /// Index into `provenance` for every row (used for trajectory-level
    /// train/validation splits).
    pub row_traj: Vec<u32>,
    pub provenance: Vec<TrajectoryMeta>,
    /// Rows discarded for non-finite entries or (LGNM) vacuum density.
    pub dropped_rows: usize,
}

impl<S> Dataset<S> {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds the training table for one ansatz from recorded trajectories.
/// One row per (grid point, snapshot); rows with non-finite values are
/// dropped and counted.
pub fn build_dataset<S: Scalar>(
    trajectories: &[MomentTrajectory<S>],
    ansatz: Ansatz,
    order: usize,
) -> Result<Dataset<S>> {
    if trajectories.is_empty() {
        return invalid("build_dataset: no trajectories");
    }
    for (i, t) in trajectories.iter().enumerate() {
        if t.order < order + 1 {
            return invalid(format!(
                "build_dataset: trajectory {i} records order {} but the closure needs {}",
                t.order,
                order + 1
            ));
        }
    }
    let in_w = ansatz.input_width(order);
    let comb_w = order + 1;
    let mut inputs = Vec::new();
    let mut combine = Vec::new();
    let mut targets = Vec::new();
    let mut row_traj = Vec::new();
    let mut dropped = 0usize;

    let mut m = vec![S::zero(); comb_w];
    let mut dm = vec![S::zero(); comb_w];
    for (ti, traj) in trajectories.iter().enumerate() {
        let nx = traj.nx;
        for snap in &traj.snapshots {
            for j in 0..nx {
                for k in 0..=order {
                    m[k] = snap.moments[k * nx + j];
                    dm[k] = snap.derivs[k * nx + j];
                }
                let m_next = snap.moments[(order + 1) * nx + j];
                let dm_next = snap.derivs[(order + 1) * nx + j];
                let target = if ansatz.target_is_gradient() {
                    dm_next
                } else {
                    m_next
                };

                let finite = m.iter().chain(dm.iter()).all(|v| v.is_finite())
                    && target.is_finite();
                if !finite {
                    dropped += 1;
                    continue;
                }
                match ansatz {
                    Ansatz::Lm => {
                        inputs.extend_from_slice(&m);
                    }
                    Ansatz::Lwm => {
                        inputs.extend_from_slice(&m);
                        combine.extend_from_slice(&m);
                    }
                    Ansatz::Lg => {
                        inputs.extend_from_slice(&m);
                        combine.extend_from_slice(&dm);
                    }
                    Ansatz::Lgnm => {
                        if m[0].abs() <= S::of(DENSITY_FLOOR) {
                            dropped += 1;
                            continue;
                        }
                        inputs.extend(m[1..].iter().map(|&mk| mk / m[0]));
                        combine.extend_from_slice(&dm);
                    }
                }
                targets.push(target);
                row_traj.push(ti as u32);
            }
        }
    }

    let rows = targets.len();
    Ok(Dataset {
        ansatz,
        order,
        inputs: Array2::from_shape_vec((rows, in_w), inputs)
            .expect("row-major input table"),
        combine: if ansatz == Ansatz::Lm {
            None
        } else {
            Some(
                Array2::from_shape_vec((rows, comb_w), combine)
                    .expect("row-major combine table"),
            )
        },
        targets: Array1::from_vec(targets),
        row_traj,
        provenance: trajectories.iter().map(|t| t.meta.clone()).collect(),
        dropped_rows: dropped,
    })
}

/// Mean squared error.
pub fn mse_loss<S: Scalar>(pred: &[S], target: &[S]) -> Result<S> {
    if pred.is_empty() {
        return invalid("mse_loss: empty input");
    }
    if pred.len() != target.len() {
        return invalid("mse_loss: length mismatch");
    }
    let sum: S = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| (p - t) * (p - t))
        .sum();
    Ok(sum / S::of_usize(pred.len()))
}

/// Relative L2 error `‖appx - truth‖ / ‖truth‖` over all samples.
pub fn relative_l2<S: Scalar>(appx: &[S], truth: &[S]) -> Result<S> {
    if appx.len() != truth.len() {
        return invalid("relative_l2: length mismatch");
    }
    let num: S = appx
        .iter()
        .zip(truth)
        .map(|(&a, &t)| (a - t) * (a - t))
        .sum();
    let den: S = truth.iter().map(|&t| t * t).sum();
    if !(den > S::zero()) {
        return Err(Error::UndefinedMetric);
    }
    Ok((num / den).sqrt())
}

/// Training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch: usize,
    pub lr0: f64,
    pub decay_factor: f64,
    pub decay_every: usize,
    pub weight_decay: f64,
    pub seed: u64,
    /// Hidden-layer widths (the input and output widths come from the
    /// ansatz).
    pub hidden: Vec<usize>,
    /// Fraction of whole trajectories held out for validation.
    pub val_fraction: f64,
}

impl TrainConfig {
    /// Full-scale hyperparameters: 6 layers (5 hidden of width 256), 1000
    /// epochs, batch 1024, lr 1e-3 decaying by 0.35 every 100 epochs, L2
    /// weight 1e-7.
    pub fn paper() -> Self {
        TrainConfig {
            epochs: 1000,
            batch: 1024,
            lr0: 1e-3,
            decay_factor: 0.35,
            decay_every: 100,
            weight_decay: 1e-7,
            seed: 0,
            hidden: vec![256; 5],
            val_fraction: 0.1,
        }
    }

    /// Reduced configuration sized for CI machines.
    pub fn desk() -> Self {
        TrainConfig {
            epochs: 300,
            hidden: vec![64, 64],
            ..Self::paper()
        }
    }
}

/// Learning rate at a given epoch: `lr0 * decay^floor(e / every)`.
pub fn lr_at(cfg: &TrainConfig, epoch: usize) -> f64 {
    cfg.lr0 * cfg.decay_factor.powi((epoch / cfg.decay_every) as i32)
}

/// Per-epoch training record.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lr: f64,
    pub mse: f64,
    pub relative_l2: f64,
    pub val_relative_l2: Option<f64>,
}

/// A trained model with its per-epoch history.
#[derive(Debug, Clone)]
pub struct TrainOutcome<S> {
    pub model: MlpModel<S>,
    pub history: Vec<EpochRecord>,
    pub train_rows: usize,
    pub val_rows: usize,
}

/// Predictions of a model on dataset rows, applying the ansatz combination.
pub fn predict_rows<S: Scalar>(
    model: &MlpModel<S>,
    ds: &Dataset<S>,
    rows: &[usize],
) -> Result<Vec<S>> {
    let mut preds = Vec::with_capacity(rows.len());
    let chunk = 8192;
    let in_w = ds.inputs.ncols();
    for block in rows.chunks(chunk) {
        let mut x = Array2::zeros((block.len(), in_w));
        for (bi, &r) in block.iter().enumerate() {
            x.row_mut(bi).assign(&ds.inputs.row(r));
        }
        let out = model.forward_batch(&x)?;
        match &ds.combine {
            None => preds.extend(out.column(0).iter().copied()),
            Some(comb) => {
                for (bi, &r) in block.iter().enumerate() {
                    let p: S = out
                        .row(bi)
                        .iter()
                        .zip(comb.row(r).iter())
                        .map(|(&c, &w)| c * w)
                        .sum();
                    preds.push(p);
                }
            }
        }
    }
    Ok(preds)
}

/// MSE and relative L2 of a model over the given dataset rows.
pub fn evaluate_rows<S: Scalar>(
    model: &MlpModel<S>,
    ds: &Dataset<S>,
    rows: &[usize],
) -> Result<(f64, f64)> {
    let preds = predict_rows(model, ds, rows)?;
    let truth: Vec<S> = rows.iter().map(|&r| ds.targets[r]).collect();
    let mse = mse_loss(&preds, &truth)?.as_f64();
    let e2 = relative_l2(&preds, &truth)?.as_f64();
    Ok((mse, e2))
}

/// Seeded Fisher–Yates permutation of `0..n`.
pub fn shuffled_indices(n: usize, rng: &mut ChaCha12Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

/// Splits trajectory indices into train/validation sets (by whole
/// trajectories, seeded).
fn split_trajectories(
    n_traj: usize,
    val_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(0x5eed_0517);
    let order = shuffled_indices(n_traj, &mut rng);
    let n_val = ((n_traj as f64 * val_fraction).round() as usize).min(n_traj.saturating_sub(1));
    let val: Vec<usize> = order[n_traj - n_val..].to_vec();
    let train: Vec<usize> = order[..n_traj - n_val].to_vec();
    (train, val)
}

/// Trains a model on the dataset with mini-batch Adam and the staircase
/// learning-rate schedule. Records training MSE and relative L2 (and
/// validation relative L2 when a split exists) after every epoch;
/// deterministic under a fixed seed.
pub fn train<S: Scalar>(ds: &Dataset<S>, cfg: &TrainConfig) -> Result<TrainOutcome<S>> {
    if ds.is_empty() {
        return invalid("train: empty dataset");
    }
    if cfg.epochs < 1 || cfg.batch < 1 {
        return invalid("train: epochs and batch size must be at least 1");
    }

    let (train_traj, val_traj) = split_trajectories(ds.provenance.len(), cfg.val_fraction, cfg.seed);
    let in_val: Vec<bool> = {
        let mut flags = vec![false; ds.provenance.len()];
        for &t in &val_traj {
            flags[t] = true;
        }
        flags
    };
    let mut train_rows = Vec::new();
    let mut val_rows = Vec::new();
    for (r, &t) in ds.row_traj.iter().enumerate() {
        if in_val[t as usize] {
            val_rows.push(r);
        } else {
            train_rows.push(r);
        }
    }
    if train_rows.is_empty() {
        return invalid("train: no training rows after the split");
    }
    let _ = train_traj;

    // Standardization is fitted on the training split only.
    let mut train_inputs = Array2::zeros((train_rows.len(), ds.inputs.ncols()));
    for (bi, &r) in train_rows.iter().enumerate() {
        train_inputs.row_mut(bi).assign(&ds.inputs.row(r));
    }
    let (mean, std) = fit_standardization(&train_inputs);

    let mut sizes = vec![ds.ansatz.input_width(ds.order)];
    sizes.extend_from_slice(&cfg.hidden);
    sizes.push(ds.ansatz.output_width(ds.order));
    let mut model = MlpModel::<S>::new(&sizes, cfg.seed)?;
    model.set_input_norm(mean, std)?;
    model.meta.ansatz = Some(ds.ansatz.name().to_string());
    model.meta.moment_order = Some(ds.order);

    let mut state = AdamState::new(&model, S::of(cfg.weight_decay));
    let mut history = Vec::with_capacity(cfg.epochs);
    let out_w = ds.ansatz.output_width(ds.order);

    for epoch in 0..cfg.epochs {
        let lr = lr_at(cfg, epoch);
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        rng.set_stream(1 + epoch as u64);
        let perm = shuffled_indices(train_rows.len(), &mut rng);

        for block in perm.chunks(cfg.batch) {
            let b = block.len();
            let mut x = Array2::zeros((b, ds.inputs.ncols()));
            for (bi, &pi) in block.iter().enumerate() {
                x.row_mut(bi).assign(&ds.inputs.row(train_rows[pi]));
            }
            let (out, cache) = model.forward_batch_cached(&x)?;

            // Residuals and the upstream gradient of the batch-mean MSE.
            let two_over_b = S::of(2.0 / b as f64);
            let mut upstream = Array2::zeros((b, out_w));
            let mut batch_loss = S::zero();
            match &ds.combine {
                None => {
                    for (bi, &pi) in block.iter().enumerate() {
                        let r = out[(bi, 0)] - ds.targets[train_rows[pi]];
                        batch_loss = batch_loss + r * r;
                        upstream[(bi, 0)] = two_over_b * r;
                    }
                }
                Some(comb) => {
                    for (bi, &pi) in block.iter().enumerate() {
                        let row = train_rows[pi];
                        let pred: S = out
                            .row(bi)
                            .iter()
                            .zip(comb.row(row).iter())
                            .map(|(&c, &w)| c * w)
                            .sum();
                        let r = pred - ds.targets[row];
                        batch_loss = batch_loss + r * r;
                        let factor = two_over_b * r;
                        for (u, &w) in upstream.row_mut(bi).iter_mut().zip(comb.row(row).iter())
                        {
                            *u = factor * w;
                        }
                    }
                }
            }
            if !batch_loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch });
            }
            let grads = model.backward_batch(&cache, &upstream);
            adam_step(&mut model, &grads, &mut state, S::of(lr))?;
        }

        let (mse, e2) = evaluate_rows(&model, ds, &train_rows)?;
        if !mse.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        let val_e2 = if val_rows.is_empty() {
            None
        } else {
            Some(evaluate_rows(&model, ds, &val_rows)?.1)
        };
        history.push(EpochRecord {
            epoch,
            lr,
            mse,
            relative_l2: e2,
            val_relative_l2: val_e2,
        });
    }

    Ok(TrainOutcome {
        model,
        history,
        train_rows: train_rows.len(),
        val_rows: val_rows.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gauss_legendre;
    use crate::grid::{Boundary, Grid};
    use crate::kinetic::{snapshot_moments, AngularField, MomentSnapshot};
    use approx::assert_abs_diff_eq;

    fn synthetic_trajectory(nx: usize, snaps: usize, order: usize) -> MomentTrajectory<f64> {
        let mut snapshots = Vec::new();
        for s in 0..snaps {
            let mut moments = vec![0.0; (order + 1) * nx];
            let mut derivs = vec![0.0; (order + 1) * nx];
            for k in 0..=order {
                for j in 0..nx {
                    let x = (j as f64 + 0.5) / nx as f64;
                    moments[k * nx + j] =
                        1.0 + 0.1 * (k as f64 + 1.0) * (2.0 * std::f64::consts::PI * x).sin()
                            + 0.01 * s as f64;
                    derivs[k * nx + j] = 0.1
                        * (k as f64 + 1.0)
                        * 2.0
                        * std::f64::consts::PI
                        * (2.0 * std::f64::consts::PI * x).cos();
                }
            }
            snapshots.push(MomentSnapshot { moments, derivs });
        }
        MomentTrajectory {
            nx,
            dx: 1.0 / nx as f64,
            order,
            quad_order: 8,
            boundary: Boundary::Periodic,
            times: (0..snaps).map(|s| s as f64).collect(),
            snapshots,
            min_intensity: 1.0,
            meta: TrajectoryMeta::default(),
        }
    }

    #[test]
    fn dataset_row_count_is_cells_times_snapshots() {
        let traj = synthetic_trajectory(512, 21, 6);
        let ds = build_dataset(&[traj], Ansatz::Lm, 5).unwrap();
        assert_eq!(ds.len(), 10752);
        assert_eq!(ds.dropped_rows, 0);
        assert_eq!(ds.inputs.ncols(), 6);
    }

    #[test]
    fn dataset_requires_one_extra_order() {
        let traj = synthetic_trajectory(16, 2, 5);
        assert!(build_dataset(&[traj], Ansatz::Lm, 5).is_err());
    }

    #[test]
    fn non_finite_rows_are_dropped_and_counted() {
        let mut traj = synthetic_trajectory(16, 2, 6);
        traj.snapshots[0].moments[3] = f64::NAN;
        let ds = build_dataset(&[traj], Ansatz::Lm, 5).unwrap();
        assert_eq!(ds.dropped_rows, 1);
        assert_eq!(ds.len(), 31);
    }

    #[test]
    fn isotropic_snapshot_rows_have_vanishing_high_moments() {
        let nx = 32;
        let quad = gauss_legendre::<f64>(16).unwrap();
        let grid: Grid<f64> = Grid::new(nx);
        let f0: Vec<f64> = grid
            .centers()
            .iter()
            .map(|&x| 2.0 + (2.0 * std::f64::consts::PI * x).sin())
            .collect();
        let field = AngularField::isotropic(&f0, 16, Boundary::Periodic);
        let snap = snapshot_moments(&field, &quad, 6);
        for k in 1..=6 {
            for j in 0..nx {
                assert!(snap.moments[k * nx + j].abs() < 1e-13);
            }
        }
    }

    #[test]
    fn stored_derivatives_are_spectrally_accurate() {
        let nx = 64;
        let quad = gauss_legendre::<f64>(8).unwrap();
        let grid: Grid<f64> = Grid::new(nx);
        let f0: Vec<f64> = grid
            .centers()
            .iter()
            .map(|&x| 2.0 + (2.0 * std::f64::consts::PI * x).sin())
            .collect();
        let field = AngularField::isotropic(&f0, 8, Boundary::Periodic);
        let snap = snapshot_moments(&field, &quad, 2);
        for j in 0..nx {
            let x = grid.center(j);
            let exact = 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * x).cos();
            assert!(
                (snap.derivs[j] - exact).abs() < 1e-10,
                "{} vs {exact}",
                snap.derivs[j]
            );
        }
    }

    #[test]
    fn mse_loss_basics() {
        assert_eq!(mse_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse_loss(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(mse_loss::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn mse_matches_second_accumulation() {
        let pred = [0.3, -0.4, 1.2, 0.9, -2.0, 0.0, 0.5];
        let target = [0.1, 0.4, 1.0, 0.0, -1.0, 0.2, 0.4];
        let mse = mse_loss(&pred, &target).unwrap();
        // independent accumulation in reverse order
        let mut acc = 0.0;
        for i in (0..pred.len()).rev() {
            let d: f64 = pred[i] - target[i];
            acc += d * d;
        }
        assert_abs_diff_eq!(mse, acc / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn relative_l2_basics() {
        assert_eq!(relative_l2(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let e = relative_l2(&[1.0, 1.0], &[1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(e, 0.4472135954999579, epsilon = 1e-15);
        assert!(matches!(
            relative_l2(&[1.0], &[0.0]),
            Err(Error::UndefinedMetric)
        ));
    }

    #[test]
    fn relative_l2_is_scale_invariant() {
        let appx = [1.0, 1.0, 3.0];
        let truth = [1.0, 2.0, 2.5];
        let base = relative_l2(&appx, &truth).unwrap();
        let scaled = relative_l2(
            &appx.map(|v| 7.5 * v),
            &truth.map(|v| 7.5 * v),
        )
        .unwrap();
        assert_abs_diff_eq!(base, scaled, epsilon = 1e-15);
    }

    #[test]
    fn learning_rate_schedule() {
        let cfg = TrainConfig::paper();
        assert_abs_diff_eq!(lr_at(&cfg, 0), 1e-3, epsilon = 1e-18);
        assert_abs_diff_eq!(lr_at(&cfg, 99), 1e-3, epsilon = 1e-18);
        assert_abs_diff_eq!(lr_at(&cfg, 100), 3.5e-4, epsilon = 1e-18);
        assert_abs_diff_eq!(lr_at(&cfg, 250), 1.225e-4, epsilon = 1e-18);
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let perm = shuffled_indices(100, &mut rng);
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
    }

    /// A realizable linear target is fitted quickly by the LG form.
    #[test]
    fn lg_fits_constant_coefficient_target() {
        let rows = 2048;
        let order = 3;
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let mut inputs = Vec::new();
        let mut combine = Vec::new();
        let mut targets = Vec::new();
        for _ in 0..rows {
            let m: Vec<f64> = (0..=order).map(|_| rng.gen::<f64>()).collect();
            let dm: Vec<f64> = (0..=order).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            targets.push(2.0 * dm[0]);
            inputs.extend_from_slice(&m);
            combine.extend_from_slice(&dm);
        }
        let ds = Dataset {
            ansatz: Ansatz::Lg,
            order,
            inputs: Array2::from_shape_vec((rows, order + 1), inputs).unwrap(),
            combine: Some(Array2::from_shape_vec((rows, order + 1), combine).unwrap()),
            targets: Array1::from_vec(targets),
            row_traj: vec![0; rows],
            provenance: vec![TrajectoryMeta::default()],
            dropped_rows: 0,
        };
        let cfg = TrainConfig {
            epochs: 200,
            batch: 64,
            hidden: vec![32, 32],
            seed: 4,
            val_fraction: 0.0,
            ..TrainConfig::paper()
        };
        let outcome = train(&ds, &cfg).unwrap();
        let final_e2 = outcome.history.last().unwrap().relative_l2;
        assert!(final_e2 < 1e-3, "final E2 {final_e2}");
    }

    #[test]
    fn training_is_deterministic() {
        let traj = synthetic_trajectory(16, 3, 6);
        let ds = build_dataset(&[traj], Ansatz::Lg, 5).unwrap();
        let cfg = TrainConfig {
            epochs: 5,
            batch: 16,
            hidden: vec![8],
            seed: 123,
            ..TrainConfig::paper()
        };
        let a = train(&ds, &cfg).unwrap();
        let b = train(&ds, &cfg).unwrap();
        for (ra, rb) in a.history.iter().zip(&b.history) {
            assert_eq!(ra, rb);
        }
    }

    #[test]
    fn divergent_training_is_reported() {
        let traj = synthetic_trajectory(16, 2, 6);
        let ds = build_dataset(&[traj], Ansatz::Lm, 5).unwrap();
        let cfg = TrainConfig {
            epochs: 3,
            batch: 64,
            lr0: 1e300, // the first update overflows the next forward pass
            hidden: vec![8],
            ..TrainConfig::paper()
        };
        match train(&ds, &cfg) {
            Err(Error::TrainingDiverged { .. }) => {}
            other => panic!("expected divergence, got {:?}", other.map(|_| ())),
        }
    }
}
