//! Monodromy around the puncture: trace classification, the translation
//! constant of parabolic monodromy, the logarithm decomposition of the
//! developing map, and the residue law it forces on the coefficient `ξ`.
//!
//! Sign conventions. The loop is positively oriented, and the translation
//! reported by [`parabolic_translation`] is the jump `φ(start) − φ(end of
//! continuation)`. Continuing counterclockwise adds the coefficient `c` of
//! `φ = g + (c/2πi) ln(z/z₀)` to `φ`, so the jump equals `−c`. The
//! decomposition and the residue law work with the coefficient `c` itself;
//! the pipeline negates the measured jump before decomposing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{MobiusMap, SpherePoint};
use crate::ode::{
    continue_loop_with_samples, Continuation, PathSample, StepControl, XiCoefficient,
};
use crate::series::LaurentSeries;

/// Tolerance bands for the trace classification.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ClassificationBands {
    /// Width of the `trace² = 4` band that is read as parabolic.
    pub parabolic_band: f64,
    /// Largest `|Im trace²|` still treated as real.
    pub imag_tol: f64,
    /// Entry distance to ±identity below which the map is the identity.
    pub identity_tol: f64,
    /// Parabolic normal-form check: `‖N²‖ ≤ ratio · ‖N‖²` for `N = M ∓ 1`.
    pub normal_form_ratio: f64,
    /// Largest order probed when looking for a finite elliptic order.
    pub elliptic_order_max: u32,
    /// Entry tolerance for `M^k = ±1`.
    pub elliptic_order_tol: f64,
}

impl Default for ClassificationBands {
    fn default() -> Self {
        ClassificationBands {
            parabolic_band: 1e-6,
            imag_tol: 1e-8,
            identity_tol: 1e-8,
            normal_form_ratio: 1e-3,
            elliptic_order_max: 4096,
            elliptic_order_tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonodromyClass {
    Identity,
    EllipticFinite(u32),
    EllipticIrrational,
    Parabolic,
    Hyperbolic,
    Loxodromic,
}

impl MonodromyClass {
    /// Classes compatible with an injective developing map on the monodromy
    /// covering: hyperbolic and loxodromic local monodromy never are.
    pub fn admissible(&self) -> bool {
        matches!(
            self,
            MonodromyClass::Identity
                | MonodromyClass::EllipticFinite(_)
                | MonodromyClass::EllipticIrrational
                | MonodromyClass::Parabolic
        )
    }
}

/// Smallest `k <= k_max` with `m^k = ±1`, or `None` for an irrational
/// rotation. The input must be elliptic.
pub fn elliptic_order(m: &MobiusMap, k_max: u32, tol: f64) -> Result<Option<u32>> {
    let tau = m.trace_squared();
    if tau.im.abs() > 1e-6 || tau.re < 0.0 || tau.re >= 4.0 {
        return Err(Error::input(format!(
            "elliptic order of a non-elliptic map (trace² = {tau})"
        )));
    }
    let mut acc = *m;
    for k in 1..=k_max {
        if acc.distance_to_unit() < tol {
            return Ok(Some(k));
        }
        acc = acc.compose(m);
    }
    Ok(None)
}

/// Trace classification with explicit tolerance bands. A trace landing in
/// the parabolic band with a matrix far from parabolic normal form is
/// reported as an error instead of being guessed.
pub fn classify_mobius(m: &MobiusMap, bands: &ClassificationBands) -> Result<MonodromyClass> {
    let tau = m.trace_squared();
    if tau.im.abs() > bands.imag_tol {
        return Ok(MonodromyClass::Loxodromic);
    }
    let t = tau.re;
    if (t - 4.0).abs() < bands.parabolic_band {
        if m.distance_to_unit() < bands.identity_tol {
            return Ok(MonodromyClass::Identity);
        }
        // N = M ∓ 1 must be nilpotent for a true parabolic.
        let sign = if m.trace().re >= 0.0 { 1.0 } else { -1.0 };
        let n = MobiusMap {
            a: m.a - Complex64::new(sign, 0.0),
            b: m.b,
            c: m.c,
            d: m.d - Complex64::new(sign, 0.0),
        };
        let n2 = MobiusMap {
            a: n.a * n.a + n.b * n.c,
            b: n.a * n.b + n.b * n.d,
            c: n.c * n.a + n.d * n.c,
            d: n.c * n.b + n.d * n.d,
        };
        let scale = n.max_entry_norm();
        if n2.max_entry_norm() > bands.normal_form_ratio * scale * scale {
            return Err(Error::AmbiguousClass(format!(
                "trace² = {tau} sits in the parabolic band but the matrix is \
                 not close to parabolic normal form"
            )));
        }
        return Ok(MonodromyClass::Parabolic);
    }
    if t > 4.0 {
        return Ok(MonodromyClass::Hyperbolic);
    }
    if t < 0.0 {
        // Purely imaginary trace: |eigenvalues| ≠ 1.
        return Ok(MonodromyClass::Loxodromic);
    }
    match elliptic_order(m, bands.elliptic_order_max, bands.elliptic_order_tol)? {
        Some(k) => Ok(MonodromyClass::EllipticFinite(k)),
        None => Ok(MonodromyClass::EllipticIrrational),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub matrix: MobiusMap,
    pub trace_squared: Complex64,
    pub class: MonodromyClass,
    /// Jump `φ(start) − φ(end of continuation)` of the normalized developing
    /// map; parabolic class only.
    pub translation_c: Option<Complex64>,
    pub loop_radius: f64,
}

/// Everything the pipeline needs downstream of one loop continuation.
#[derive(Clone, Debug)]
pub struct PunctureAnalysis {
    pub report: MonodromyReport,
    pub continuation: Continuation,
    pub samples: Vec<PathSample>,
    /// Frame sending the parabolic fixed point to infinity (parabolic only).
    pub frame: Option<MobiusMap>,
    /// Largest deviation of the per-sample jump from its mean.
    pub jump_deviation: Option<f64>,
}

/// Frame `F` with `F · (fixed point of m) = ∞`. The fixed point of a
/// parabolic map is the double root `(a-d)/(2c)`; the quadratic formula is
/// avoided because its discriminant cancels to rounding noise here.
pub fn parabolic_frame(m: &MobiusMap) -> Result<MobiusMap> {
    let p = if m.c.norm() < 1e-12 * m.max_entry_norm() {
        SpherePoint::infinity()
    } else {
        SpherePoint::from_complex((m.a - m.d) / (2.0 * m.c))
    };
    MobiusMap::sending_to_infinity(p)
}

/// Measured translation of a parabolic loop: the jump of the normalized
/// developing map `φ = F ∘ (u1/u2)`, reported as `φ(start) − φ(end)` and
/// checked to be constant along the loop.
#[derive(Clone, Copy, Debug)]
pub struct ParabolicJump {
    pub jump: Complex64,
    pub max_deviation: f64,
}

pub fn parabolic_translation(
    samples: &[PathSample],
    monodromy: &MobiusMap,
    frame: &MobiusMap,
) -> Result<ParabolicJump> {
    let mut jumps = Vec::with_capacity(samples.len());
    for s in samples {
        let q = s.pair.quotient();
        let before = frame.apply(q);
        let after = frame.apply(monodromy.apply(q));
        if let (Some(b), Some(a)) = (before.to_complex(), after.to_complex()) {
            if b.norm() < 1e9 && a.norm() < 1e9 {
                jumps.push(b - a);
            }
        }
    }
    if jumps.len() < samples.len() / 2 {
        return Err(Error::numerical(
            samples.first().map(|s| s.z).unwrap_or_default(),
            "normalized developing map has a pole too close to the loop",
        ));
    }
    let n = jumps.len() as f64;
    let mean = jumps.iter().sum::<Complex64>() / n;
    let max_deviation = jumps
        .iter()
        .map(|j| (j - mean).norm())
        .fold(0.0, f64::max);
    Ok(ParabolicJump {
        jump: mean,
        max_deviation,
    })
}

/// Values of a developing map sampled along the positively oriented loop
/// `|z| = radius`, with the branch continued in the angle. `values[j]` is
/// the value at angle `2πj/M` for `j = 0..=M`; the final entry is the
/// continuation back at the start point, one full turn later.
#[derive(Clone, Debug)]
pub struct LoopTrace {
    pub radius: f64,
    pub values: Vec<Complex64>,
}

impl LoopTrace {
    /// Samples a closed-form map `φ(r e^{iθ})` with the continued branch,
    /// `θ` running over `[0, 2π]` inclusive.
    pub fn from_fn(radius: f64, samples: usize, mut phi: impl FnMut(f64) -> Complex64) -> Self {
        let values = (0..=samples)
            .map(|j| phi(2.0 * std::f64::consts::PI * j as f64 / samples as f64))
            .collect();
        LoopTrace { radius, values }
    }

    /// Extracts the trace of the normalized quotient `F ∘ (u1/u2)` from the
    /// recorded continuation samples.
    pub fn from_samples(samples: &[PathSample], frame: &MobiusMap, radius: f64) -> Result<Self> {
        let mut values = Vec::with_capacity(samples.len());
        for s in samples {
            let v = frame.apply(s.pair.quotient());
            match v.to_complex() {
                Some(w) if w.norm() < 1e10 => values.push(w),
                _ => {
                    return Err(Error::numerical(
                        s.z,
                        "developing map has a pole on the sampling loop; \
                         choose a different radius",
                    ))
                }
            }
        }
        Ok(LoopTrace { radius, values })
    }

    /// `φ(start) − φ(end of continuation)`.
    pub fn jump(&self) -> Complex64 {
        self.values[0] - self.values[self.values.len() - 1]
    }
}

/// The developing map written as `φ = g + (c/2πi) ln(z/z₀)` with `g`
/// single-valued on the punctured disc.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogDecomposition {
    /// Coefficient of the normalized logarithm: the gain of `φ` under one
    /// counterclockwise turn (the negative of the measured jump).
    pub c: Complex64,
    pub z0: Complex64,
    pub g: LaurentSeries,
    pub a_minus1: Complex64,
    /// Valuation of `g` under the recovery noise threshold (0 for `g = 0`).
    pub k0: i64,
}

/// Relative threshold below which `a_{-1}` routes the residue law to the
/// not-applicable branch.
pub const A_MINUS1_REL_THRESHOLD: f64 = 1e-10;

/// Subtracts the logarithm from the sampled developing map and recovers the
/// Laurent window of `g` on the loop circle. The supplied `c` must match
/// the actual monodromy gain, otherwise the subtraction is not
/// single-valued and an inconsistency error is returned.
pub fn log_decompose(
    trace: &LoopTrace,
    c: Complex64,
    z0: Complex64,
    window: (i64, i64),
    consistency_tol: f64,
) -> Result<LogDecomposition> {
    let m = trace.values.len() - 1;
    let gain = trace.values[m] - trace.values[0];
    let residual = (gain - c).norm();
    if residual > consistency_tol * c.norm().max(1.0) {
        return Err(Error::InconsistentTranslation { residual });
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    // ln(z_j / z0) continued along the loop from the principal value at the
    // start point.
    let log_start = Complex64::new(trace.radius.ln(), 0.0) - z0.ln();
    let g_samples: Vec<Complex64> = (0..m)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (j as f64) / (m as f64);
            let log_val = log_start + Complex64::new(0.0, theta);
            trace.values[j] - c / two_pi_i * log_val
        })
        .collect();
    let g_raw = LaurentSeries::coefficients_from_samples(
        Complex64::new(0.0, 0.0),
        trace.radius,
        &g_samples,
        window.0,
        window.1,
    )?;
    // Recovery noise floor: DFT dust scales with the sampled magnitudes.
    let phi_scale = trace
        .values
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(g_raw.max_coeff_norm())
        .max(1.0);
    let floor = 1e-10 * phi_scale;
    let kept: Vec<(i64, Complex64)> = (window.0..=window.1)
        .map(|k| (k, g_raw.coeff(k)))
        .filter(|(_, a)| a.norm() >= floor)
        .collect();
    let g = LaurentSeries::from_terms(Complex64::new(0.0, 0.0), &kept);
    let k0 = if g.is_zero() { 0 } else { g.valuation() };
    let a_minus1 = if g.coeff(-1).norm() >= A_MINUS1_REL_THRESHOLD * g.max_coeff_norm().max(1.0)
    {
        g.coeff(-1)
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(LogDecomposition {
        c,
        z0,
        g,
        a_minus1,
        k0,
    })
}

/// Outcome of the residue law check for parabolic monodromy: the residue of
/// `ξ` must equal `-c/(a_{-1} π i)`; when `a_{-1}` vanishes the law does
/// not apply and the leading double-pole coefficient is reported instead.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ResidueCheck {
    Applicable {
        residue_measured: Complex64,
        residue_predicted: Complex64,
        agree: bool,
    },
    NotApplicable {
        double_pole_coefficient: Complex64,
    },
}

pub fn residue_check(
    decomp: &LogDecomposition,
    xi_at_origin: &LaurentSeries,
    tol: f64,
) -> ResidueCheck {
    if decomp.a_minus1.norm() == 0.0 {
        return ResidueCheck::NotApplicable {
            double_pole_coefficient: xi_at_origin.coeff(-2),
        };
    }
    let pi_i = Complex64::new(0.0, std::f64::consts::PI);
    let predicted = -decomp.c / (decomp.a_minus1 * pi_i);
    let measured = xi_at_origin.coeff(-1);
    let agree = (measured - predicted).norm() < tol * predicted.norm().max(1.0);
    ResidueCheck::Applicable {
        residue_measured: measured,
        residue_predicted: predicted,
        agree,
    }
}

/// Continues once around `|z| = r`, classifies the transfer matrix, and for
/// parabolic monodromy extracts the translation jump in the frame that puts
/// the fixed point at infinity.
pub fn puncture_monodromy(
    xi: &XiCoefficient,
    singularities: &[Complex64],
    radius: f64,
    ctrl: &StepControl,
    bands: &ClassificationBands,
    n_samples: usize,
) -> Result<PunctureAnalysis> {
    let (continuation, samples) =
        continue_loop_with_samples(xi, singularities, radius, n_samples, ctrl)?;
    let matrix = continuation.transfer;
    let class = classify_mobius(&matrix, bands)?;
    let mut frame = None;
    let mut translation = None;
    let mut jump_deviation = None;
    if class == MonodromyClass::Parabolic {
        let f = parabolic_frame(&matrix)?;
        let jump = parabolic_translation(&samples, &matrix, &f)?;
        frame = Some(f);
        translation = Some(jump.jump);
        jump_deviation = Some(jump.max_deviation);
    }
    Ok(PunctureAnalysis {
        report: MonodromyReport {
            matrix,
            trace_squared: matrix.trace_squared(),
            class,
            translation_c: translation,
            loop_radius: radius,
        },
        continuation,
        samples,
        frame,
        jump_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn origin() -> Complex64 {
        c64(0.0, 0.0)
    }

    fn rotation(angle: f64) -> MobiusMap {
        // diag(e^{iα/2}, e^{-iα/2}): z ↦ e^{iα} z
        MobiusMap {
            a: Complex64::from_polar(1.0, angle / 2.0),
            b: origin(),
            c: origin(),
            d: Complex64::from_polar(1.0, -angle / 2.0),
        }
    }

    fn theta_xi(theta: Complex64) -> XiCoefficient {
        let coeff = (Complex64::new(1.0, 0.0) - theta * theta) / 2.0;
        XiCoefficient::Laurent(LaurentSeries::monomial(origin(), -2, coeff))
    }

    #[test]
    fn rotation_orders() {
        let bands = ClassificationBands::default();
        let third = rotation(2.0 * std::f64::consts::PI / 3.0);
        assert_eq!(
            elliptic_order(&third, 100, bands.elliptic_order_tol).unwrap(),
            Some(3)
        );
        let seventh = rotation(2.0 * std::f64::consts::PI / 7.0);
        assert_eq!(
            elliptic_order(&seventh, 100, bands.elliptic_order_tol).unwrap(),
            Some(7)
        );
    }

    #[test]
    fn golden_rotation_has_no_order() {
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let m = rotation(2.0 * std::f64::consts::PI * golden);
        assert_eq!(elliptic_order(&m, 10_000, 1e-8).unwrap(), None);
    }

    #[test]
    fn elliptic_order_rejects_non_elliptic() {
        let m = MobiusMap::scaling(c64(2.0, 0.0)).unwrap();
        assert!(elliptic_order(&m, 10, 1e-8).is_err());
    }

    #[test]
    fn classify_basic_conjugacy_types() {
        let bands = ClassificationBands::default();
        assert_eq!(
            classify_mobius(&MobiusMap::identity(), &bands).unwrap(),
            MonodromyClass::Identity
        );
        assert_eq!(
            classify_mobius(&MobiusMap::translation(c64(2.0, 1.0)), &bands).unwrap(),
            MonodromyClass::Parabolic
        );
        assert_eq!(
            classify_mobius(&MobiusMap::scaling(c64(2.0, 0.0)).unwrap(), &bands).unwrap(),
            MonodromyClass::Hyperbolic
        );
        assert_eq!(
            classify_mobius(&MobiusMap::scaling(c64(0.0, 2.0)).unwrap(), &bands).unwrap(),
            MonodromyClass::Loxodromic
        );
        assert_eq!(
            classify_mobius(&rotation(2.0 * std::f64::consts::PI / 5.0), &bands).unwrap(),
            MonodromyClass::EllipticFinite(5)
        );
    }

    #[test]
    fn classification_is_conjugation_invariant() {
        let bands = ClassificationBands::default();
        let m = rotation(2.0 * std::f64::consts::PI / 7.0);
        let tau = m.trace_squared();
        // a fixed spread of conjugators
        for i in 0..20 {
            let t = i as f64;
            let g = MobiusMap::new(
                c64(1.0 + 0.1 * t, 0.05 * t),
                c64(0.3 * (t * 0.7).sin(), -0.2),
                c64(0.1 * (t * 1.3).cos(), 0.08 * t.sin()),
                c64(1.0, 0.02 * t),
            )
            .unwrap();
            let conj = g.compose(&m).compose(&g.inverse());
            assert!((conj.trace_squared() - tau).norm() < 1e-10);
            assert_eq!(
                classify_mobius(&conj, &bands).unwrap(),
                MonodromyClass::EllipticFinite(7)
            );
        }
    }

    #[test]
    fn ambiguous_band_detected() {
        // Genuine elliptic with angle so small that trace² sits inside the
        // parabolic band, but the matrix is diagonalizable: flagged, not
        // guessed.
        let eps = 1e-4;
        let m = rotation(eps);
        let tau = m.trace_squared();
        assert!((tau.re - 4.0).abs() < 1e-6);
        let bands = ClassificationBands::default();
        match classify_mobius(&m, &bands) {
            Err(Error::AmbiguousClass(_)) => {}
            other => panic!("expected ambiguity diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn puncture_classes_for_model_family() {
        let ctrl = StepControl::default();
        let bands = ClassificationBands::default();
        let run = |theta: Complex64| {
            puncture_monodromy(&theta_xi(theta), &[origin()], 0.5, &ctrl, &bands, 16).unwrap()
        };
        let elliptic = run(c64(1.0 / 3.0, 0.0));
        assert_eq!(elliptic.report.class, MonodromyClass::EllipticFinite(3));
        assert!((elliptic.report.trace_squared - c64(1.0, 0.0)).norm() < 1e-8);

        let hyperbolic = run(c64(0.0, 1.0));
        assert_eq!(hyperbolic.report.class, MonodromyClass::Hyperbolic);

        let parabolic = run(c64(0.0, 0.0));
        assert_eq!(parabolic.report.class, MonodromyClass::Parabolic);
        assert!(parabolic.report.translation_c.is_some());
        assert!(parabolic.jump_deviation.unwrap() < 1e-6);
    }

    #[test]
    fn log_trace_jump_conventions() {
        // φ = ln z: counterclockwise continuation gains 2πi, so the
        // start-minus-end jump is -2πi.
        let r = 0.5;
        let trace = LoopTrace::from_fn(r, 64, |theta| c64(r.ln(), theta));
        let expected = c64(0.0, -2.0 * std::f64::consts::PI);
        assert!((trace.jump() - expected).norm() < 1e-12);

        // φ = α ln z scales the jump.
        let alpha = c64(0.7, -0.4);
        let trace = LoopTrace::from_fn(r, 64, |theta| alpha * c64(r.ln(), theta));
        assert!((trace.jump() - expected * alpha / c64(1.0, 0.0)).norm() < 1e-12
            || (trace.jump() + alpha * c64(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-12);

        // φ = 1/z + ln(z/z0): only the log term jumps, independent of z0.
        let z0 = c64(0.3, 0.1);
        let trace = LoopTrace::from_fn(r, 128, |theta| {
            let z = Complex64::from_polar(r, theta);
            1.0 / z + c64(r.ln(), theta) - z0.ln()
        });
        assert!((trace.jump() - expected).norm() < 1e-11);
    }

    #[test]
    fn log_decompose_recovers_simple_pole() {
        let r = 0.5;
        let z0 = c64(r, 0.0);
        let c = c64(0.0, 2.0 * std::f64::consts::PI); // φ = 1/z + ln(z/z0)
        let trace = LoopTrace::from_fn(r, 256, |theta| {
            let z = Complex64::from_polar(r, theta);
            1.0 / z + c64(0.0, theta)
        });
        let d = log_decompose(&trace, c, z0, (-6, 10), 1e-8).unwrap();
        assert_eq!(d.k0, -1);
        assert!((d.a_minus1 - c64(1.0, 0.0)).norm() < 1e-10);
        assert!(d.g.coeff(0).norm() < 1e-9);
    }

    #[test]
    fn log_decompose_pure_logarithm_gives_zero_series() {
        let r = 0.5;
        let z0 = c64(r, 0.0);
        let c = c64(0.0, 2.0 * std::f64::consts::PI);
        let trace = LoopTrace::from_fn(r, 128, |theta| c64(0.0, theta));
        let d = log_decompose(&trace, c, z0, (-4, 8), 1e-8).unwrap();
        assert!(d.g.is_zero(), "g = {:?}", d.g);
        assert_eq!(d.a_minus1, c64(0.0, 0.0));
    }

    #[test]
    fn log_decompose_polynomial_part() {
        let r = 0.5;
        let z0 = c64(r, 0.0);
        let c = c64(0.0, 2.0 * std::f64::consts::PI);
        let trace = LoopTrace::from_fn(r, 256, |theta| {
            let z = Complex64::from_polar(r, theta);
            c64(5.0, 0.0) + 2.0 * z + c64(0.0, theta)
        });
        let d = log_decompose(&trace, c, z0, (-4, 8), 1e-8).unwrap();
        assert_eq!(d.k0, 0);
        assert!((d.g.coeff(0) - c64(5.0, 0.0)).norm() < 1e-9);
        assert!((d.g.coeff(1) - c64(2.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn log_decompose_rejects_wrong_constant() {
        let r = 0.5;
        let trace = LoopTrace::from_fn(r, 64, |theta| c64(0.0, theta));
        let wrong_c = c64(1.0, 2.0 * std::f64::consts::PI);
        match log_decompose(&trace, wrong_c, c64(r, 0.0), (-4, 4), 1e-8) {
            Err(Error::InconsistentTranslation { .. }) => {}
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn residue_law_on_model_instances() {
        // g = 1/z, c = 2πi: predicted -2 and the Schwarzian really has
        // residue -2.
        let c = c64(0.0, 2.0 * std::f64::consts::PI);
        let g = LaurentSeries::monomial(origin(), -1, c64(1.0, 0.0));
        let decomp = LogDecomposition {
            c,
            z0: c64(0.5, 0.0),
            g: g.clone(),
            a_minus1: c64(1.0, 0.0),
            k0: -1,
        };
        // φ' = g' + c/(2πi z) = -1/z² + 1/z
        let phi_prime = LaurentSeries::from_terms(
            origin(),
            &[(-2, c64(-1.0, 0.0)), (-1, c64(1.0, 0.0))],
        );
        let xi = XiCoefficient::SchwarzianOfLogDev { phi_prime }
            .series_at_origin(8)
            .unwrap();
        match residue_check(&decomp, &xi, 1e-9) {
            ResidueCheck::Applicable {
                residue_measured,
                residue_predicted,
                agree,
            } => {
                assert!((residue_predicted - c64(-2.0, 0.0)).norm() < 1e-12);
                assert!((residue_measured - c64(-2.0, 0.0)).norm() < 1e-10);
                assert!(agree);
            }
            other => panic!("unexpected branch {other:?}"),
        }

        // g = 2/z halves the predicted residue.
        let decomp2 = LogDecomposition {
            c,
            z0: c64(0.5, 0.0),
            g: LaurentSeries::monomial(origin(), -1, c64(2.0, 0.0)),
            a_minus1: c64(2.0, 0.0),
            k0: -1,
        };
        let phi_prime2 = LaurentSeries::from_terms(
            origin(),
            &[(-2, c64(-2.0, 0.0)), (-1, c64(1.0, 0.0))],
        );
        let xi2 = XiCoefficient::SchwarzianOfLogDev {
            phi_prime: phi_prime2,
        }
        .series_at_origin(8)
        .unwrap();
        match residue_check(&decomp2, &xi2, 1e-9) {
            ResidueCheck::Applicable {
                residue_predicted,
                agree,
                ..
            } => {
                assert!((residue_predicted - c64(-1.0, 0.0)).norm() < 1e-12);
                assert!(agree);
            }
            other => panic!("unexpected branch {other:?}"),
        }
    }

    #[test]
    fn residue_not_applicable_reports_double_pole() {
        // g = 0: φ = (c/2πi) ln(z/z0), ξ = 1/(2z²).
        let c = c64(0.0, 2.0 * std::f64::consts::PI);
        let decomp = LogDecomposition {
            c,
            z0: c64(0.5, 0.0),
            g: LaurentSeries::zero(origin()),
            a_minus1: origin(),
            k0: 0,
        };
        let phi_prime = LaurentSeries::monomial(origin(), -1, c64(1.0, 0.0));
        let xi = XiCoefficient::SchwarzianOfLogDev { phi_prime }
            .series_at_origin(8)
            .unwrap();
        match residue_check(&decomp, &xi, 1e-9) {
            ResidueCheck::NotApplicable {
                double_pole_coefficient,
            } => {
                assert!((double_pole_coefficient - c64(0.5, 0.0)).norm() < 1e-12);
            }
            other => panic!("unexpected branch {other:?}"),
        }
    }

    #[test]
    fn parabolic_pipeline_on_log_family() {
        // ξ from φ = 1/z + ln(z/z0): parabolic, measured jump -c, residue -2.
        let phi_prime = LaurentSeries::from_terms(
            origin(),
            &[(-2, c64(-1.0, 0.0)), (-1, c64(1.0, 0.0))],
        );
        let xi = XiCoefficient::SchwarzianOfLogDev { phi_prime };
        // φ' vanishes at z = 1; declare it so continuation stays away.
        let sings = [origin(), c64(1.0, 0.0)];
        let ctrl = StepControl::default();
        let bands = ClassificationBands::default();
        let analysis = puncture_monodromy(&xi, &sings, 0.4, &ctrl, &bands, 256).unwrap();
        assert_eq!(analysis.report.class, MonodromyClass::Parabolic);
        let jump = analysis.report.translation_c.unwrap();
        let frame = analysis.frame.unwrap();
        assert!(analysis.jump_deviation.unwrap() < 1e-7);

        let trace = LoopTrace::from_samples(&analysis.samples, &frame, 0.4).unwrap();
        let c_coeff = -jump;
        let d = log_decompose(&trace, c_coeff, c64(0.4, 0.0), (-6, 10), 1e-6).unwrap();
        assert_eq!(d.k0, -1, "g should keep the simple pole, got {:?}", d.g);
        let xi0 = xi.series_at_origin(8).unwrap();
        match residue_check(&d, &xi0, 1e-7) {
            ResidueCheck::Applicable {
                residue_measured,
                residue_predicted,
                agree,
            } => {
                assert!(
                    agree,
                    "measured {residue_measured} predicted {residue_predicted}"
                );
                assert!((residue_measured - c64(-2.0, 0.0)).norm() < 1e-9);
            }
            other => panic!("unexpected branch {other:?}"),
        }
    }


}
