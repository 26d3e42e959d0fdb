//! Benchmark catalog: declarative descriptions of the closed-loop test
//! problems (initial condition, cross sections, boundary, final time and
//! the closures to compare).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{Boundary, Grid};
use crate::kinetic::{CrossSections, FourierIc};
use crate::scalar::Scalar;

/// Isotropic initial intensity profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IcSpec {
    /// Truncated Fourier series with seeded random coefficients.
    Fourier { seed: u64, k_max: usize },
    /// `amplify * (c1 / sqrt(2 π θ) exp(-(x-x0)^2 / 2θ) + c2)`.
    Gaussian {
        c1: f64,
        c2: f64,
        x0: f64,
        theta: f64,
        amplify: f64,
    },
    /// `2 + sin(2 π k x + φ)`.
    Wave { wave_number: usize, phase: f64 },
}

impl IcSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            IcSpec::Fourier { seed, k_max } => FourierIc::sample(*seed, *k_max).eval(x),
            IcSpec::Gaussian {
                c1,
                c2,
                x0,
                theta,
                amplify,
            } => {
                let gauss = c1 / (2.0 * std::f64::consts::PI * theta).sqrt()
                    * (-(x - x0) * (x - x0) / (2.0 * theta)).exp();
                amplify * (gauss + c2)
            }
            IcSpec::Wave { wave_number, phase } => {
                2.0 + (2.0 * std::f64::consts::PI * *wave_number as f64 * x + phase).sin()
            }
        }
    }
}

/// Scattering/absorption profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigmaSpec {
    Constant { sigma_s: f64, sigma_a: f64 },
    /// `σ_s(x) = c1 (tanh(1 + c2 (x - x0)) + tanh(1 - c2 (x - x0))) + base`.
    TanhBump {
        c1: f64,
        c2: f64,
        x0: f64,
        base: f64,
        sigma_a: f64,
    },
    /// Piecewise constants with a strip `(x1, x2)` of different material.
    TwoMaterial {
        x1: f64,
        x2: f64,
        inner_s: f64,
        outer_s: f64,
        inner_a: f64,
        outer_a: f64,
    },
}

impl SigmaSpec {
    pub fn sigma_s(&self, x: f64) -> f64 {
        match self {
            SigmaSpec::Constant { sigma_s, .. } => *sigma_s,
            SigmaSpec::TanhBump { c1, c2, x0, base, .. } => {
                c1 * ((1.0 + c2 * (x - x0)).tanh() + (1.0 - c2 * (x - x0)).tanh()) + base
            }
            SigmaSpec::TwoMaterial {
                x1,
                x2,
                inner_s,
                outer_s,
                ..
            } => {
                if x > *x1 && x < *x2 {
                    *inner_s
                } else {
                    *outer_s
                }
            }
        }
    }

    pub fn sigma_a(&self, x: f64) -> f64 {
        match self {
            SigmaSpec::Constant { sigma_a, .. } => *sigma_a,
            SigmaSpec::TanhBump { sigma_a, .. } => *sigma_a,
            SigmaSpec::TwoMaterial {
                x1,
                x2,
                inner_a,
                outer_a,
                ..
            } => {
                if x > *x1 && x < *x2 {
                    *inner_a
                } else {
                    *outer_a
                }
            }
        }
    }
}

/// One benchmark problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub ic: IcSpec,
    pub sigma: SigmaSpec,
    pub boundary: Boundary,
    pub t_final: f64,
    /// Closure specs compared on this scenario (parsed by the CLI).
    pub closures: Vec<String>,
    /// Moment orders whose relative L2 errors are reported.
    pub error_moments: Vec<usize>,
}

impl Scenario {
    /// Initial isotropic intensity at the cell centers of a grid.
    pub fn initial_profile<S: Scalar>(&self, grid: &Grid<S>) -> Vec<S> {
        grid.centers()
            .iter()
            .map(|&x| S::of(self.ic.eval(x.as_f64())))
            .collect()
    }

    /// Cross sections sampled at the cell centers (no smoothing at
    /// discontinuities).
    pub fn cross_sections<S: Scalar>(&self, grid: &Grid<S>) -> Result<CrossSections<S>> {
        let ss = grid
            .centers()
            .iter()
            .map(|&x| S::of(self.sigma.sigma_s(x.as_f64())))
            .collect();
        let sa = grid
            .centers()
            .iter()
            .map(|&x| S::of(self.sigma.sigma_a(x.as_f64())))
            .collect();
        CrossSections::new(ss, sa)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn default_closures() -> Vec<String> {
    vec!["pn".to_string(), "fpn:20".to_string(), "lgnm".to_string()]
}

/// Constant-coefficient problem (the data-generation setup run as a
/// benchmark): σ_s = σ_t = 100, 10 and 1 give the thick, intermediate and
/// thin regimes.
pub fn scenario_constant(sigma_s: f64, sigma_a: f64, seed: u64) -> Result<Scenario> {
    if !(0.1..=100.0).contains(&sigma_s) {
        return invalid("scenario_constant: sigma_s outside [0.1, 100]");
    }
    if !(0.0..=10.0).contains(&sigma_a) {
        return invalid("scenario_constant: sigma_a outside [0, 10]");
    }
    Ok(Scenario {
        name: format!("constant-s{sigma_s}-a{sigma_a}"),
        ic: IcSpec::Fourier { seed, k_max: 10 },
        sigma: SigmaSpec::Constant { sigma_s, sigma_a },
        boundary: Boundary::Periodic,
        t_final: 0.5,
        closures: default_closures(),
        error_moments: vec![0, 1],
    })
}

/// Variable scattering: a tanh bump of height 30 c1 tanh(1) over `base`,
/// centered at 1/2, with unit absorption.
pub fn scenario_variable_scattering(sigma_base: f64) -> Result<Scenario> {
    if !(sigma_base > 0.0) {
        return invalid("scenario_variable_scattering: base must be positive");
    }
    Ok(Scenario {
        name: format!("variable-scattering-{sigma_base}"),
        ic: IcSpec::Fourier { seed: 0, k_max: 10 },
        sigma: SigmaSpec::TanhBump {
            c1: 15.0,
            c2: 15.0,
            x0: 0.5,
            base: sigma_base,
            sigma_a: 1.0,
        },
        boundary: Boundary::Periodic,
        t_final: 0.5,
        closures: default_closures(),
        error_moments: vec![0, 1],
    })
}

/// Gaussian pulse problem in the optically thin regime (σ_s = σ_t = 1).
pub fn scenario_gaussian(
    c1: f64,
    c2: f64,
    x0: f64,
    theta: f64,
    amplify: f64,
    boundary: Boundary,
) -> Result<Scenario> {
    if !(theta > 0.0) {
        return invalid("scenario_gaussian: theta must be positive");
    }
    Ok(Scenario {
        name: match boundary {
            Boundary::Periodic if amplify != 1.0 => format!("gaussian-x{amplify}"),
            Boundary::Periodic => "gaussian".to_string(),
            Boundary::Reflective => "gaussian-reflective".to_string(),
        },
        ic: IcSpec::Gaussian {
            c1,
            c2,
            x0,
            theta,
            amplify,
        },
        sigma: SigmaSpec::Constant {
            sigma_s: 1.0,
            sigma_a: 0.0,
        },
        boundary,
        t_final: 0.5,
        closures: default_closures(),
        error_moments: vec![0, 1],
    })
}

/// Two-material problem: a thin strip (σ_s = 1) inside a thicker medium
/// (σ_s = 10), no absorption.
pub fn scenario_two_material() -> Scenario {
    Scenario {
        name: "two-material".to_string(),
        ic: IcSpec::Fourier { seed: 0, k_max: 10 },
        sigma: SigmaSpec::TwoMaterial {
            x1: 0.3,
            x2: 0.7,
            inner_s: 1.0,
            outer_s: 10.0,
            inner_a: 0.0,
            outer_a: 0.0,
        },
        boundary: Boundary::Periodic,
        t_final: 0.4,
        closures: default_closures(),
        error_moments: vec![0, 5],
    }
}

/// Single-mode initial data of a given wave number in the thin regime.
pub fn scenario_wave_number(k: usize, phase: f64) -> Result<Scenario> {
    if !(1..=25).contains(&k) {
        return invalid("scenario_wave_number: wave number outside [1, 25]");
    }
    Ok(Scenario {
        name: format!("wave-k{k}"),
        ic: IcSpec::Wave {
            wave_number: k,
            phase,
        },
        sigma: SigmaSpec::Constant {
            sigma_s: 1.0,
            sigma_a: 0.0,
        },
        boundary: Boundary::Periodic,
        t_final: 0.4,
        closures: default_closures(),
        error_moments: vec![0],
    })
}

/// Looks a scenario up by catalog name. `wave-k<K>` is parameterized; the
/// other names are fixed configurations.
pub fn from_catalog(name: &str) -> Result<Scenario> {
    match name {
        "constant-thick" => scenario_constant(100.0, 0.0, 0),
        "constant-intermediate" => scenario_constant(10.0, 0.0, 0),
        "constant-thin" => scenario_constant(1.0, 0.0, 0),
        "variable-scattering-thin" => scenario_variable_scattering(1.0),
        "variable-scattering-intermediate" => scenario_variable_scattering(10.0),
        "gaussian" => scenario_gaussian(0.5, 2.5, 0.5, 0.01, 1.0, Boundary::Periodic),
        "gaussian-amplified" => scenario_gaussian(0.5, 2.5, 0.5, 0.01, 1000.0, Boundary::Periodic),
        "gaussian-reflective" => {
            scenario_gaussian(0.5, 1e-6, 0.6, 0.005, 1.0, Boundary::Reflective)
        }
        "two-material" => Ok(scenario_two_material()),
        other => {
            if let Some(k) = other.strip_prefix("wave-k") {
                let k: usize = k
                    .parse()
                    .map_err(|_| crate::Error::InvalidArgument(format!("bad wave number in '{other}'")))?;
                scenario_wave_number(k, 0.0)
            } else {
                invalid(format!("unknown scenario '{other}'"))
            }
        }
    }
}

/// All fixed catalog names (the wave-number family is parameterized on top).
pub fn catalog_names() -> Vec<&'static str> {
    vec![
        "constant-thick",
        "constant-intermediate",
        "constant-thin",
        "variable-scattering-thin",
        "variable-scattering-intermediate",
        "gaussian",
        "gaussian-amplified",
        "gaussian-reflective",
        "two-material",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_scenario_regimes() {
        let thin = scenario_constant(1.0, 0.0, 0).unwrap();
        assert_eq!(thin.t_final, 0.5);
        assert!(matches!(
            thin.sigma,
            SigmaSpec::Constant { sigma_s, sigma_a } if sigma_s == 1.0 && sigma_a == 0.0
        ));
        assert!(scenario_constant(0.01, 0.0, 0).is_err());
        assert!(scenario_constant(1.0, 11.0, 0).is_err());
    }

    #[test]
    fn variable_scattering_profile_values() {
        let s = scenario_variable_scattering(1.0).unwrap();
        // peak at the center: 30 tanh(1) + base
        assert_abs_diff_eq!(
            s.sigma.sigma_s(0.5),
            23.847824678672946,
            epsilon = 1e-12
        );
        // near the boundary the bump has decayed to ~base
        assert!((s.sigma.sigma_s(0.0) - 1.0).abs() < 1e-4);
        // symmetry about x0 = 0.5
        for d in [0.1, 0.23, 0.4] {
            assert_abs_diff_eq!(
                s.sigma.sigma_s(0.5 - d),
                s.sigma.sigma_s(0.5 + d),
                epsilon = 1e-15
            );
        }
        assert_eq!(s.sigma.sigma_a(0.3), 1.0);
    }

    #[test]
    fn gaussian_peak_and_amplification() {
        let base = scenario_gaussian(0.5, 2.5, 0.5, 0.01, 1.0, Boundary::Periodic).unwrap();
        assert_abs_diff_eq!(base.ic.eval(0.5), 4.494711402007164, epsilon = 1e-12);
        let amp = scenario_gaussian(0.5, 2.5, 0.5, 0.01, 1000.0, Boundary::Periodic).unwrap();
        for x in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(amp.ic.eval(x), 1000.0 * base.ic.eval(x), epsilon = 1e-9);
        }
        let refl = from_catalog("gaussian-reflective").unwrap();
        assert_eq!(refl.boundary, Boundary::Reflective);
    }

    #[test]
    fn two_material_sigma_values() {
        let s = scenario_two_material();
        assert_eq!(s.sigma.sigma_s(0.5), 1.0);
        assert_eq!(s.sigma.sigma_s(0.1), 10.0);
        assert_eq!(s.sigma.sigma_a(0.5), 0.0);
        assert_eq!(s.sigma.sigma_a(0.9), 0.0);
        assert_eq!(s.t_final, 0.4);
        // 0.3 Nx integral for Nx a multiple of 10: the jump sits on a cell
        // interface and the sampled profile switches between neighbors.
        let grid: Grid<f64> = Grid::new(40);
        let xs = s.cross_sections(&grid).unwrap();
        assert_eq!(xs.sigma_s[11], 10.0); // center 0.2875 < 0.3
        assert_eq!(xs.sigma_s[12], 1.0); // center 0.3125 > 0.3
        assert!((0.3 * 40.0f64).fract().abs() < 1e-12);
    }

    #[test]
    fn wave_scenario_bounds_and_positivity() {
        for k in [1usize, 10, 25] {
            let s = scenario_wave_number(k, 1.3).unwrap();
            let grid: Grid<f64> = Grid::new(128);
            let min = s
                .initial_profile(&grid)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            assert!(min >= 1.0 - 1e-12, "k = {k}: min {min}");
        }
        assert!(scenario_wave_number(0, 0.0).is_err());
        assert!(scenario_wave_number(26, 0.0).is_err());
        let s = scenario_wave_number(1, 0.0).unwrap();
        // k = 1, phase 0 matches a single-mode Fourier series: a0 = 2, a1 = 1
        let ic = FourierIc {
            a0: 2.0,
            terms: vec![(1.0, 0.0)],
        };
        for x in [0.0, 0.3, 0.8] {
            assert_abs_diff_eq!(s.ic.eval(x), ic.eval(x), epsilon = 1e-15);
        }
    }

    #[test]
    fn every_catalog_ic_is_strictly_positive() {
        let grid: Grid<f64> = Grid::new(256);
        for name in catalog_names() {
            let s = from_catalog(name).unwrap();
            let min = s
                .initial_profile(&grid)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            assert!(min > 0.0, "{name}: min {min}");
        }
    }

    #[test]
    fn scenario_round_trips_through_json() {
        for name in catalog_names() {
            let s = from_catalog(name).unwrap();
            let back = Scenario::from_json(&s.to_json()).unwrap();
            assert_eq!(s, back, "{name}");
        }
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(from_catalog("no-such-scenario").is_err());
        assert!(from_catalog("wave-kxyz").is_err());
    }
}
