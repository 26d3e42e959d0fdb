//! Learned closure forms wrapping a trained network.
//!
//! All four share the same network machinery and differ in what the outputs
//! mean: LM predicts the moment itself, LWM weights the resolved moments,
//! LG weights the resolved gradients, and LGNM does the same from
//! density-normalized inputs, which makes it positively homogeneous of
//! degree one in `(m, ∂x m)` jointly.

use crate::error::{invalid, Error, Result};
use crate::mlp::MlpModel;
use crate::scalar::Scalar;

/// Density floor below which LGNM's ratio features are undefined.
pub const DENSITY_FLOOR: f64 = 1e-12;

fn check_input<S: Scalar>(model: &MlpModel<S>, len: usize) -> Result<()> {
    if model.input_width() != len {
        return invalid(format!(
            "closure input width {} does not match the model's {}",
            len,
            model.input_width()
        ));
    }
    Ok(())
}

/// LM: `m_{N+1} = N(m_0..m_N)`, one scalar output.
pub fn close_lm<S: Scalar>(model: &MlpModel<S>, m: &[S]) -> Result<S> {
    check_input(model, m.len())?;
    if model.output_width() != 1 {
        return invalid("close_lm: model must have one output");
    }
    Ok(model.forward(m)?[0])
}

/// LWM: `m_{N+1} = sum_k N_k(m_0..m_N) m_k`.
pub fn close_lwm<S: Scalar>(model: &MlpModel<S>, m: &[S]) -> Result<S> {
    check_input(model, m.len())?;
    if model.output_width() != m.len() {
        return invalid("close_lwm: output width must match the moment count");
    }
    let coeffs = model.forward(m)?;
    Ok(coeffs.iter().zip(m).map(|(&c, &mk)| c * mk).sum())
}

/// Coefficients `N_k(m_0..m_N)` of the LG form.
pub fn lg_coefficients<S: Scalar>(model: &MlpModel<S>, m: &[S]) -> Result<Vec<S>> {
    check_input(model, m.len())?;
    if model.output_width() != m.len() {
        return invalid("lg closure: output width must match the moment count");
    }
    model.forward(m)
}

/// LG: `∂x m_{N+1} = sum_k N_k(m_0..m_N) ∂x m_k`.
pub fn close_lg<S: Scalar>(model: &MlpModel<S>, m: &[S], dm: &[S]) -> Result<S> {
    if dm.len() != m.len() {
        return invalid("close_lg: gradient width must match the moment count");
    }
    let coeffs = lg_coefficients(model, m)?;
    Ok(coeffs.iter().zip(dm).map(|(&c, &d)| c * d).sum())
}

/// Ratio features `(m_1/m_0, ..., m_N/m_0)` of the LGNM form; errors out on
/// vacuum-level densities.
pub fn lgnm_ratios<S: Scalar>(m: &[S]) -> Result<Vec<S>> {
    let m0 = m[0];
    if m0.abs() <= S::of(DENSITY_FLOOR) {
        return Err(Error::DegenerateDensity {
            m0: m0.as_f64(),
            floor: DENSITY_FLOOR,
        });
    }
    Ok(m[1..].iter().map(|&mk| mk / m0).collect())
}

/// Coefficients `N_k(m_1/m_0..m_N/m_0)` of the LGNM form.
pub fn lgnm_coefficients<S: Scalar>(model: &MlpModel<S>, m: &[S]) -> Result<Vec<S>> {
    let ratios = lgnm_ratios(m)?;
    check_input(model, ratios.len())?;
    if model.output_width() != m.len() {
        return invalid("lgnm closure: output width must match the moment count");
    }
    model.forward(&ratios)
}

/// LGNM: `∂x m_{N+1} = sum_k N_k(m_1/m_0..m_N/m_0) ∂x m_k`.
pub fn close_lgnm<S: Scalar>(model: &MlpModel<S>, m: &[S], dm: &[S]) -> Result<S> {
    if dm.len() != m.len() {
        return invalid("close_lgnm: gradient width must match the moment count");
    }
    let coeffs = lgnm_coefficients(model, m)?;
    Ok(coeffs.iter().zip(dm).map(|(&c, &d)| c * d).sum())
}
