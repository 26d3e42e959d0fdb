//! Closure relations supplying the unclosed term of the truncated moment
//! hierarchy: the P_N truncation, the filtered P_N source, the exact
//! free-streaming gradient closure, and the four learned forms.

mod fpn;
mod free_streaming;
mod learned;
mod pn;

pub use fpn::{fpn_damping, FilterSpec};
pub use free_streaming::{exact_fs_gradient, singular_eps, FreeStreamingClosure};
pub use learned::{
    close_lg, close_lgnm, close_lm, close_lwm, lg_coefficients, lgnm_coefficients, lgnm_ratios,
    DENSITY_FLOOR,
};
pub use pn::{pn_matrix, pn_row_coefficients};

use ndarray::Array2;

use crate::error::{invalid, Result};
use crate::mlp::MlpModel;
use crate::scalar::Scalar;

/// The closure strategy attached to a moment-solver run.
#[derive(Debug, Clone)]
pub enum ClosureKind<S> {
    /// Truncation: m_{N+1} = 0.
    Pn,
    /// Truncation plus the filter source -nu L m.
    Fpn { nu: S },
    /// Exact gradient closure of the free-streaming limit.
    ExactFreeStreaming,
    /// m_{N+1} = N(m_0..m_N).
    Lm(MlpModel<S>),
    /// m_{N+1} = sum_k N_k(m_0..m_N) m_k.
    Lwm(MlpModel<S>),
    /// ∂x m_{N+1} = sum_k N_k(m_0..m_N) ∂x m_k.
    Lg(MlpModel<S>),
    /// ∂x m_{N+1} = sum_k N_k(m_1/m_0..m_N/m_0) ∂x m_k.
    Lgnm(MlpModel<S>),
}

impl<S> ClosureKind<S> {
    pub fn name(&self) -> &'static str {
        match self {
            ClosureKind::Pn => "pn",
            ClosureKind::Fpn { .. } => "fpn",
            ClosureKind::ExactFreeStreaming => "exact",
            ClosureKind::Lm(_) => "lm",
            ClosureKind::Lwm(_) => "lwm",
            ClosureKind::Lg(_) => "lg",
            ClosureKind::Lgnm(_) => "lgnm",
        }
    }

    pub fn model(&self) -> Option<&MlpModel<S>> {
        match self {
            ClosureKind::Lm(m)
            | ClosureKind::Lwm(m)
            | ClosureKind::Lg(m)
            | ClosureKind::Lgnm(m) => Some(m),
            _ => None,
        }
    }
}

/// How a closure enters the last moment equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureForm {
    /// The closure yields m_{N+1}; its WENO derivative joins the
    /// conservative flux of the last row.
    MomentValue,
    /// The closure yields per-node coefficients over ∂x m_k; the last row
    /// becomes a nonconservative product with frozen coefficients.
    GradientCoeffs,
}

/// Validated, precomputed evaluation state for one closure at a fixed
/// truncation order.
pub struct ClosureEval<'a, S> {
    pub kind: &'a ClosureKind<S>,
    pub order: usize,
    filter: Option<FilterSpec<S>>,
    fs: Option<FreeStreamingClosure<S>>,
}

impl<'a, S: Scalar> ClosureEval<'a, S> {
    pub fn new(kind: &'a ClosureKind<S>, order: usize) -> Result<Self> {
        if order < 1 {
            return invalid("closure: truncation order must be at least 1");
        }
        let mut filter = None;
        let mut fs = None;
        match kind {
            ClosureKind::Pn => {}
            ClosureKind::Fpn { nu } => {
                filter = Some(fpn_damping(order, *nu)?);
            }
            ClosureKind::ExactFreeStreaming => {
                fs = Some(FreeStreamingClosure::new(order)?);
            }
            ClosureKind::Lm(m) => {
                check_widths(m, order + 1, 1)?;
            }
            ClosureKind::Lwm(m) | ClosureKind::Lg(m) => {
                check_widths(m, order + 1, order + 1)?;
            }
            ClosureKind::Lgnm(m) => {
                check_widths(m, order, order + 1)?;
            }
        }
        Ok(ClosureEval {
            kind,
            order,
            filter,
            fs,
        })
    }

    pub fn form(&self) -> ClosureForm {
        match self.kind {
            ClosureKind::Pn | ClosureKind::Fpn { .. } | ClosureKind::Lm(_) | ClosureKind::Lwm(_) => {
                ClosureForm::MomentValue
            }
            ClosureKind::ExactFreeStreaming | ClosureKind::Lg(_) | ClosureKind::Lgnm(_) => {
                ClosureForm::GradientCoeffs
            }
        }
    }

    pub fn filter(&self) -> Option<&FilterSpec<S>> {
        self.filter.as_ref()
    }

    /// m_{N+1} at one node, for moment-value closures.
    pub fn moment_value(&self, m: &[S]) -> Result<S> {
        match self.kind {
            ClosureKind::Pn | ClosureKind::Fpn { .. } => Ok(S::zero()),
            ClosureKind::Lm(model) => close_lm(model, m),
            ClosureKind::Lwm(model) => close_lwm(model, m),
            _ => invalid("moment_value: closure is in gradient form"),
        }
    }

    /// Gradient coefficients c_0..c_N at one node, for gradient closures.
    pub fn gradient_coeffs(&self, m: &[S], out: &mut [S]) -> Result<()> {
        match self.kind {
            ClosureKind::ExactFreeStreaming => {
                self.fs.as_ref().unwrap().gradient_coeffs(m, out)
            }
            ClosureKind::Lg(model) => {
                let c = lg_coefficients(model, m)?;
                out.copy_from_slice(&c);
                Ok(())
            }
            ClosureKind::Lgnm(model) => {
                let c = lgnm_coefficients(model, m)?;
                out.copy_from_slice(&c);
                Ok(())
            }
            _ => invalid("gradient_coeffs: closure is in moment-value form"),
        }
    }

    /// Batched m_{N+1} for every row of `m_nodes` (shape `B × (N+1)`).
    pub fn moment_value_batch(&self, m_nodes: &Array2<S>) -> Result<Vec<S>> {
        match self.kind {
            ClosureKind::Pn | ClosureKind::Fpn { .. } => Ok(vec![S::zero(); m_nodes.nrows()]),
            ClosureKind::Lm(model) => {
                let out = model.forward_batch(m_nodes)?;
                Ok(out.column(0).to_vec())
            }
            ClosureKind::Lwm(model) => {
                let out = model.forward_batch(m_nodes)?;
                Ok(out
                    .rows()
                    .into_iter()
                    .zip(m_nodes.rows())
                    .map(|(c, m)| c.iter().zip(m.iter()).map(|(&a, &b)| a * b).sum())
                    .collect())
            }
            _ => invalid("moment_value_batch: closure is in gradient form"),
        }
    }

    /// Batched gradient coefficients, one row per node.
    pub fn gradient_coeffs_batch(&self, m_nodes: &Array2<S>) -> Result<Array2<S>> {
        let width = self.order + 1;
        match self.kind {
            ClosureKind::ExactFreeStreaming => {
                let fs = self.fs.as_ref().unwrap();
                let mut out = Array2::zeros((m_nodes.nrows(), width));
                let mut row = vec![S::zero(); width];
                for (r, m) in m_nodes.rows().into_iter().enumerate() {
                    fs.gradient_coeffs(m.as_slice().unwrap(), &mut row)?;
                    for (c, &v) in row.iter().enumerate() {
                        out[(r, c)] = v;
                    }
                }
                Ok(out)
            }
            ClosureKind::Lg(model) => model.forward_batch(m_nodes),
            ClosureKind::Lgnm(model) => {
                let mut ratios = Array2::zeros((m_nodes.nrows(), self.order));
                for (r, m) in m_nodes.rows().into_iter().enumerate() {
                    let rr = lgnm_ratios(m.as_slice().unwrap())?;
                    for (c, &v) in rr.iter().enumerate() {
                        ratios[(r, c)] = v;
                    }
                }
                model.forward_batch(&ratios)
            }
            _ => invalid("gradient_coeffs_batch: closure is in moment-value form"),
        }
    }

    /// Coefficients entering the effective flux Jacobian used by the
    /// hyperbolicity diagnostics: frozen network outputs for the
    /// coefficient-form closures, the input Jacobian for LM, zeros for the
    /// linear closures (whose Jacobian is the P_N matrix itself).
    pub fn diagnostic_coeffs(&self, m: &[S], out: &mut [S]) -> Result<()> {
        match self.kind {
            ClosureKind::Pn | ClosureKind::Fpn { .. } => {
                out.fill(S::zero());
                Ok(())
            }
            ClosureKind::Lm(model) => {
                let jac = model.input_jacobian(m)?;
                for (o, v) in out.iter_mut().zip(jac.row(0)) {
                    *o = *v;
                }
                Ok(())
            }
            ClosureKind::Lwm(model) => {
                let c = model.forward(m)?;
                out.copy_from_slice(&c);
                Ok(())
            }
            _ => self.gradient_coeffs(m, out),
        }
    }
}

fn check_widths<S: Scalar>(model: &MlpModel<S>, input: usize, output: usize) -> Result<()> {
    if model.input_width() != input || model.output_width() != output {
        return invalid(format!(
            "closure model has widths {} -> {}, expected {} -> {}",
            model.input_width(),
            model.output_width(),
            input,
            output
        ));
    }
    Ok(())
}
