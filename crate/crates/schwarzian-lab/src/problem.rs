//! Problem-spec ingestion: the JSON schema accepted by every CLI command,
//! preset expansion to exact Laurent data, and the centralized tolerance
//! block with its documented defaults.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::devmap::ClosedMap;
use crate::error::{Error, Result};
use crate::monodromy::ClassificationBands;
use crate::norms::{AreaQuadrature, SupNormGrid};
use crate::ode::{StepControl, XiCoefficient};
use crate::roots::polynomial_roots;
use crate::series::LaurentSeries;

/// One block with every numeric gate of the artifact. All fields carry
/// serde defaults, so a spec file may override any subset.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Truncation order of series produced during preset expansion.
    pub series_truncation: usize,
    /// Continuation scheme (local order 24, step ρ/3).
    pub step: StepControl,
    /// Trace classification bands (parabolic band 1e-6).
    pub bands: ClassificationBands,
    /// Loop samples feeding the logarithm decomposition.
    pub decomposition_samples: usize,
    /// Laurent window recovered for `g`.
    pub window_low: i64,
    pub window_high: i64,
    /// Allowed mismatch between the supplied translation constant and the
    /// observed loop jump.
    pub jump_consistency: f64,
    /// Residue agreement tolerance, relative to `max(1, |predicted|)`.
    pub residue_tol: f64,
    /// Injectivity probe grid (per axis).
    pub probe_grid: usize,
    /// Contraction probe resolution used by the pipeline.
    pub accumulation_depth: usize,
    pub accumulation_grid: usize,
    pub sup_grid: SupNormGrid,
    pub area_quadrature: AreaQuadrature,
    /// Truncation radius of the reported area integral.
    pub area_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            series_truncation: 32,
            step: StepControl::default(),
            bands: ClassificationBands::default(),
            decomposition_samples: 256,
            window_low: -8,
            window_high: 16,
            jump_consistency: 1e-6,
            residue_tol: 1e-9,
            probe_grid: 128,
            accumulation_depth: 12,
            accumulation_grid: 8,
            sup_grid: SupNormGrid::default(),
            area_quadrature: AreaQuadrature::default(),
            area_eps: 1e-3,
        }
    }
}

/// A complex number given either as a bare real or as `[re, im]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexInput> for Complex64 {
    fn from(v: ComplexInput) -> Self {
        match v {
            ComplexInput::Real(x) => Complex64::new(x, 0.0),
            ComplexInput::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogWithG {
    pub g: LaurentSeries,
    pub c: ComplexInput,
    pub z0: ComplexInput,
}

/// The coefficient field of the problem: a raw Laurent window or one of the
/// two model presets.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XiSpec {
    /// `ξ = (1-θ²)/(2z²)`: the power developing map `z^θ`.
    PowerTheta { power_theta: ComplexInput },
    /// `ξ = S(g + (c/2πi) ln(z/z0))`: the logarithm family.
    LogWithG { log_with_g: LogWithG },
    /// Explicit Laurent data in the shared JSON encoding.
    Series(LaurentSeries),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub xi: XiSpec,
    #[serde(default)]
    pub declared_singularities: Vec<[f64; 2]>,
    #[serde(default = "default_loop_radius")]
    pub loop_radius: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_loop_radius() -> f64 {
    0.5
}

/// A spec with presets expanded to exact data, singularities collected, and
/// a closed-form developing map attached when the preset provides one.
#[derive(Clone, Debug)]
pub struct ResolvedProblem {
    pub xi: XiCoefficient,
    /// Laurent window of `ξ` at the origin (reporting and residue checks).
    pub xi_series: LaurentSeries,
    pub singularities: Vec<Complex64>,
    pub loop_radius: f64,
    pub tolerances: Tolerances,
    pub dev_closed: Option<ClosedMap>,
}

impl ProblemSpec {
    pub fn resolve(&self) -> Result<ResolvedProblem> {
        let tol = self.tolerances.clone();
        if !(self.loop_radius > 0.0 && self.loop_radius < 1.0) {
            return Err(Error::spec("loop radius must satisfy 0 < r < 1"));
        }
        let origin = Complex64::new(0.0, 0.0);
        let mut singularities: Vec<Complex64> = self
            .declared_singularities
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let mut push_unique = |list: &mut Vec<Complex64>, z: Complex64| {
            if list.iter().all(|s| (s - z).norm() > 1e-9) {
                list.push(z);
            }
        };

        let (xi, xi_series, dev_closed) = match &self.xi {
            XiSpec::PowerTheta { power_theta } => {
                let theta: Complex64 = (*power_theta).into();
                let coeff = (Complex64::new(1.0, 0.0) - theta * theta) / 2.0;
                let series = LaurentSeries::monomial(origin, -2, coeff);
                if !series.is_zero() {
                    push_unique(&mut singularities, origin);
                }
                (
                    XiCoefficient::Laurent(series.clone()),
                    series,
                    Some(ClosedMap::Power { alpha: theta }),
                )
            }
            XiSpec::LogWithG { log_with_g } => {
                let g = &log_with_g.g;
                let c: Complex64 = log_with_g.c.into();
                let z0: Complex64 = log_with_g.z0.into();
                if (g.center() - origin).norm() > 0.0 {
                    return Err(Error::spec("the series g must be centered at the origin"));
                }
                let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
                let log_term = LaurentSeries::monomial(origin, -1, c / two_pi_i);
                let phi_prime = g.derivative().add(&log_term)?;
                if phi_prime.is_zero() {
                    return Err(Error::spec("φ' vanishes identically; no structure"));
                }
                push_unique(&mut singularities, origin);
                // Zeros of φ' are double poles of the coefficient: declare
                // them so continuation routes around.
                let poly = phi_prime.shifted(-phi_prime.valuation());
                let coeffs: Vec<Complex64> =
                    (0..=poly.reach().min(poly.valuation() + poly.coeffs().len() as i64 - 1))
                        .map(|k| poly.coeff(k))
                        .collect();
                for root in polynomial_roots(&coeffs) {
                    push_unique(&mut singularities, root);
                }
                let xi = XiCoefficient::SchwarzianOfLogDev {
                    phi_prime: phi_prime.clone(),
                };
                let series = xi.series_at_origin(tol.series_truncation as i64)?;
                (
                    xi,
                    series,
                    Some(ClosedMap::LogPlusSeries {
                        g: g.clone(),
                        c,
                        z0,
                    }),
                )
            }
            XiSpec::Series(series) => {
                if (series.center() - origin).norm() > 0.0 {
                    return Err(Error::spec("ξ must be given at the origin"));
                }
                if !series.valuation_at_least(0) {
                    push_unique(&mut singularities, origin);
                }
                (XiCoefficient::Laurent(series.clone()), series.clone(), None)
            }
        };

        // The loop must clear every non-origin singularity.
        for s in &singularities {
            if s.norm() < 1e-12 {
                continue;
            }
            let clearance = (s.norm() - self.loop_radius).abs();
            if clearance < 10.0 * tol.step.margin {
                return Err(Error::spec(format!(
                    "declared singularity at {s} sits on the loop |z| = {}; \
                     choose a different loop radius",
                    self.loop_radius
                )));
            }
        }
        Ok(ResolvedProblem {
            xi,
            xi_series,
            singularities,
            loop_radius: self.loop_radius,
            tolerances: tol,
            dev_closed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_preset_expands_to_double_pole() {
        let spec: ProblemSpec =
            serde_json::from_str(r#"{"xi": {"power_theta": 0.3333333333333333}}"#).unwrap();
        let r = spec.resolve().unwrap();
        assert_eq!(r.xi_series.valuation(), -2);
        let expect = (1.0 - (1.0f64 / 3.0).powi(2)) / 2.0;
        assert!((r.xi_series.coeff(-2) - Complex64::new(expect, 0.0)).norm() < 1e-14);
        assert_eq!(r.singularities.len(), 1);
        assert_eq!(r.loop_radius, 0.5);
    }

    #[test]
    fn power_preset_accepts_complex_exponent() {
        let spec: ProblemSpec =
            serde_json::from_str(r#"{"xi": {"power_theta": [0.0, 1.0]}}"#).unwrap();
        let r = spec.resolve().unwrap();
        // (1 - i²)/2 = 1
        assert!((r.xi_series.coeff(-2) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn log_preset_declares_phi_prime_zeros() {
        let spec: ProblemSpec = serde_json::from_str(
            r#"{
                "xi": {"log_with_g": {
                    "g": {"center": [0,0], "valuation": -1, "coefficients": [[1,0]]},
                    "c": [0.0, 6.283185307179586],
                    "z0": [0.5, 0.0]
                }},
                "loop_radius": 0.4
            }"#,
        )
        .unwrap();
        let r = spec.resolve().unwrap();
        // φ' = -1/z² + 1/z vanishes at z = 1.
        assert!(
            r.singularities
                .iter()
                .any(|s| (s - Complex64::new(1.0, 0.0)).norm() < 1e-8),
            "singularities: {:?}",
            r.singularities
        );
        // residue of ξ is -2
        assert!((r.xi_series.coeff(-1) - Complex64::new(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn raw_series_gets_origin_registered() {
        let spec: ProblemSpec = serde_json::from_str(
            r#"{"xi": {"center": [0,0], "valuation": -2, "coefficients": [[0.5,0]]}}"#,
        )
        .unwrap();
        let r = spec.resolve().unwrap();
        assert_eq!(r.singularities.len(), 1);
        assert!(r.dev_closed.is_none());
    }

    #[test]
    fn loop_through_singularity_is_rejected() {
        let spec: ProblemSpec = serde_json::from_str(
            r#"{
                "xi": {"center": [0,0], "valuation": -2, "coefficients": [[0.5,0]]},
                "declared_singularities": [[0.5, 0.0]]
            }"#,
        )
        .unwrap();
        assert!(spec.resolve().is_err());
    }

    #[test]
    fn tolerance_overrides_apply() {
        let spec: ProblemSpec = serde_json::from_str(
            r#"{
                "xi": {"power_theta": 0.5},
                "tolerances": {"decomposition_samples": 512, "probe_grid": 32}
            }"#,
        )
        .unwrap();
        assert_eq!(spec.tolerances.decomposition_samples, 512);
        assert_eq!(spec.tolerances.probe_grid, 32);
        // untouched fields keep defaults
        assert_eq!(spec.tolerances.series_truncation, 32);
    }
}
