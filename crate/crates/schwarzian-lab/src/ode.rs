//! Series solution and path continuation of `u'' + ξ u / 2 = 0`.
//!
//! Continuation is by repeated Taylor re-expansion: at each step the
//! coefficient is re-expanded at the current point, the local fundamental
//! basis is built by the power-series recurrence, and the state advances by
//! at most a fixed fraction of the distance to the nearest declared
//! singularity. The transfer matrix across a path expresses the continued
//! solutions in the fixed initial basis and has determinant one up to the
//! Wronskian drift of the scheme.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::MobiusMap;
use crate::series::LaurentSeries;

/// The ODE coefficient `ξ`, either a finite Laurent polynomial or the
/// Schwarzian of a developing map `φ` presented through the finite Laurent
/// polynomial `φ'` (the logarithm in `φ` differentiates away). Both forms
/// re-expand exactly at any ordinary point.
#[derive(Clone, Debug)]
pub enum XiCoefficient {
    Laurent(LaurentSeries),
    SchwarzianOfLogDev { phi_prime: LaurentSeries },
}

impl XiCoefficient {
    /// Taylor window `[0, order]` of `ξ` at an ordinary point.
    pub fn taylor_at(&self, center: Complex64, order: usize) -> Result<LaurentSeries> {
        match self {
            XiCoefficient::Laurent(xi) => xi.recentered(center, order),
            XiCoefficient::SchwarzianOfLogDev { phi_prime } => {
                let pp = phi_prime.recentered(center, order + 3)?;
                if pp.is_zero() || pp.coeff(0).norm() < 1e-13 * pp.max_coeff_norm() {
                    return Err(Error::numerical(
                        center,
                        "φ' vanishes here; the Schwarzian coefficient has a pole",
                    ));
                }
                let l = pp.derivative().divide(&pp)?;
                let s = crate::schwarzian::schwarzian_from_log_derivative(&l)?;
                Ok(s.truncated(order as i64))
            }
        }
    }

    /// Laurent window of `ξ` at the origin.
    pub fn series_at_origin(&self, order: i64) -> Result<LaurentSeries> {
        match self {
            XiCoefficient::Laurent(xi) => Ok(xi.clone()),
            XiCoefficient::SchwarzianOfLogDev { phi_prime } => {
                let l = phi_prime.derivative().divide(phi_prime)?;
                let s = crate::schwarzian::schwarzian_from_log_derivative(&l)?;
                Ok(s.truncated(order))
            }
        }
    }

    /// Pointwise value away from singularities.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        match self {
            XiCoefficient::Laurent(xi) => xi.evaluate(z),
            XiCoefficient::SchwarzianOfLogDev { phi_prime } => {
                let d = evaluate_derivatives(phi_prime, z, 2)?;
                let (p1, p2, p3) = (d[0], d[1], d[2]);
                if p1.norm() < 1e-300 {
                    return Err(Error::numerical(z, "φ' vanishes here"));
                }
                let r = p2 / p1;
                Ok(p3 / p1 - 1.5 * r * r)
            }
        }
    }
}

/// Values of a finite Laurent polynomial and its first `n` derivatives.
pub fn evaluate_derivatives(
    f: &LaurentSeries,
    z: Complex64,
    n: usize,
) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    let w = z - f.center();
    if f.is_zero() {
        return Ok(out);
    }
    if f.valuation() < 0 && w.norm() == 0.0 {
        return Err(Error::degenerate("evaluation at a pole"));
    }
    for (i, &a) in f.coeffs().iter().enumerate() {
        let k = f.valuation() + i as i64;
        let mut fall = Complex64::new(1.0, 0.0);
        for (d, slot) in out.iter_mut().enumerate() {
            let e = k - d as i64;
            let wp = if e >= 0 {
                w.powi(e as i32)
            } else {
                Complex64::new(1.0, 0.0) / w.powi((-e) as i32)
            };
            *slot += a * fall * wp;
            fall *= Complex64::new((k - d as i64) as f64, 0.0);
        }
    }
    Ok(out)
}

/// Fundamental basis at an ordinary point: solutions normalized to
/// `u(z*) = 1, u'(z*) = 0` and `u(z*) = 0, u'(z*) = 1`, from the recurrence
/// `(n+2)(n+1) u_{n+2} = -½ Σ_j ξ_j u_{n-j}`.
pub fn local_solution_basis(
    xi_local: &LaurentSeries,
    order: usize,
) -> Result<(LaurentSeries, LaurentSeries)> {
    if !xi_local.valuation_at_least(0) {
        return Err(Error::input(
            "coefficient has a pole here; choose an ordinary base point",
        ));
    }
    let center = xi_local.center();
    let solve = |u0: Complex64, u1: Complex64| -> LaurentSeries {
        let mut u = vec![Complex64::new(0.0, 0.0); order + 1];
        if order >= 1 {
            u[0] = u0;
            u[1] = u1;
        }
        for n in 0..order.saturating_sub(1) {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=n {
                acc += xi_local.coeff(j as i64) * u[n - j];
            }
            u[n + 2] = -0.5 * acc / Complex64::new(((n + 2) * (n + 1)) as f64, 0.0);
        }
        LaurentSeries::new_truncated(center, 0, u)
    };
    Ok((
        solve(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        solve(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
    ))
}

/// Two solutions tracked through a continuation: values and first
/// derivatives at `base_point`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FundamentalPair {
    pub base_point: Complex64,
    pub u1: Complex64,
    pub u1p: Complex64,
    pub u2: Complex64,
    pub u2p: Complex64,
}

impl FundamentalPair {
    /// Standard initial basis at a base point.
    pub fn standard(base_point: Complex64) -> Self {
        FundamentalPair {
            base_point,
            u1: Complex64::new(1.0, 0.0),
            u1p: Complex64::new(0.0, 0.0),
            u2: Complex64::new(0.0, 0.0),
            u2p: Complex64::new(1.0, 0.0),
        }
    }

    /// `u1 u2' - u2 u1'`; constant along solutions of an equation without a
    /// first-order term.
    pub fn wronskian(&self) -> Complex64 {
        self.u1 * self.u2p - self.u2 * self.u1p
    }

    /// Value of the developing quotient `u1/u2` at the base point.
    pub fn quotient(&self) -> crate::mobius::SpherePoint {
        crate::mobius::SpherePoint::new(self.u1, self.u2)
    }
}

/// Path along which solutions are continued.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PathSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
        /// Signed number of turns; positive is counterclockwise. Fractional
        /// turns are allowed.
        turns: f64,
        #[serde(default)]
        start_angle: f64,
    },
    Polyline { vertices: Vec<[f64; 2]> },
}

impl PathSpec {
    pub fn circle(radius: f64, turns: f64) -> Self {
        PathSpec::Circle {
            center: [0.0, 0.0],
            radius,
            turns,
            start_angle: 0.0,
        }
    }

    pub fn start_point(&self) -> Result<Complex64> {
        match self {
            PathSpec::Circle {
                center,
                radius,
                start_angle,
                ..
            } => Ok(Complex64::new(center[0], center[1])
                + Complex64::from_polar(*radius, *start_angle)),
            PathSpec::Polyline { vertices } => vertices
                .first()
                .map(|v| Complex64::new(v[0], v[1]))
                .ok_or_else(|| Error::input("polyline path needs at least one vertex")),
        }
    }

    /// Straight-line waypoints tracing the path. Circles become polygons
    /// fine enough that the chords stay well inside the annulus of
    /// holomorphy; the segment stepper subdivides further as needed.
    pub fn waypoints(&self, per_turn: usize) -> Result<Vec<Complex64>> {
        match self {
            PathSpec::Circle {
                center,
                radius,
                turns,
                start_angle,
            } => {
                if !(*radius > 0.0) {
                    return Err(Error::input("circle radius must be positive"));
                }
                let c = Complex64::new(center[0], center[1]);
                let n = ((per_turn as f64) * turns.abs()).ceil().max(1.0) as usize;
                let total = 2.0 * std::f64::consts::PI * turns;
                Ok((0..=n)
                    .map(|j| {
                        let ang = start_angle + total * (j as f64) / (n as f64);
                        c + Complex64::from_polar(*radius, ang)
                    })
                    .collect())
            }
            PathSpec::Polyline { vertices } => {
                if vertices.len() < 2 {
                    return Err(Error::input("polyline path needs at least two vertices"));
                }
                Ok(vertices
                    .iter()
                    .map(|v| Complex64::new(v[0], v[1]))
                    .collect())
            }
        }
    }
}

/// Tolerances and resolution of the continuation scheme.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StepControl {
    /// Local series order of each re-expansion.
    pub order: usize,
    /// Step length as a fraction of the distance to the nearest declared
    /// singularity.
    pub safety: f64,
    /// Below this step length the continuation reports failure.
    pub min_step: f64,
    /// Paths closer than this to a declared singularity are rejected.
    pub margin: f64,
    /// Hard cap on work.
    pub max_steps: usize,
    /// Circle paths are pre-divided into this many waypoints per turn.
    pub waypoints_per_turn: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            order: 24,
            safety: 1.0 / 3.0,
            min_step: 1e-9,
            margin: 1e-6,
            max_steps: 200_000,
            waypoints_per_turn: 24,
        }
    }
}

/// Outcome of a continuation.
#[derive(Clone, Debug)]
pub struct Continuation {
    pub end: FundamentalPair,
    /// SL(2,C) matrix expressing the continued solutions in the initial
    /// basis: the first row carries solution one, the second solution two.
    pub transfer: MobiusMap,
    /// `|det - 1|` of the raw (un-renormalized) transfer matrix.
    pub det_defect: f64,
    /// Relative drift of the Wronskian across the whole continuation.
    pub wronskian_drift: f64,
    pub steps: usize,
}

/// Pair state recorded at a sample stop along a path.
#[derive(Clone, Copy, Debug)]
pub struct PathSample {
    pub z: Complex64,
    pub pair: FundamentalPair,
}

fn distance_to_singularities(z: Complex64, singularities: &[Complex64]) -> f64 {
    singularities
        .iter()
        .map(|s| (z - s).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Advances the pair along the straight segment to `target`, re-expanding
/// as often as the singularity distances demand.
pub fn continue_segment(
    xi: &XiCoefficient,
    singularities: &[Complex64],
    state: &mut FundamentalPair,
    target: Complex64,
    ctrl: &StepControl,
    steps: &mut usize,
) -> Result<()> {
    loop {
        let rem = target - state.base_point;
        let rem_len = rem.norm();
        if rem_len == 0.0 {
            return Ok(());
        }
        let rho = distance_to_singularities(state.base_point, singularities);
        if rho <= ctrl.margin {
            return Err(Error::input(format!(
                "path reaches the exclusion margin of a declared singularity at z = {}",
                state.base_point
            )));
        }
        let h_max = ctrl.safety * rho;
        if h_max < ctrl.min_step {
            return Err(Error::numerical(
                state.base_point,
                "step collapsed below the minimum step length",
            ));
        }
        let h = rem_len.min(h_max);
        let step = rem * (h / rem_len);
        let xi_local = xi.taylor_at(state.base_point, ctrl.order)?;
        let (v1, v2) = local_solution_basis(&xi_local, ctrl.order)?;
        let v1p = v1.derivative();
        let v2p = v2.derivative();
        let at = state.base_point + step;
        let a11 = v1.evaluate(at)?;
        let a12 = v2.evaluate(at)?;
        let a21 = v1p.evaluate(at)?;
        let a22 = v2p.evaluate(at)?;
        let next = if h == rem_len {
            target
        } else {
            state.base_point + step
        };
        let (nu1, nu1p) = (state.u1 * a11 + state.u1p * a12, state.u1 * a21 + state.u1p * a22);
        let (nu2, nu2p) = (state.u2 * a11 + state.u2p * a12, state.u2 * a21 + state.u2p * a22);
        *state = FundamentalPair {
            base_point: next,
            u1: nu1,
            u1p: nu1p,
            u2: nu2,
            u2p: nu2p,
        };
        *steps += 1;
        if *steps > ctrl.max_steps {
            return Err(Error::numerical(
                state.base_point,
                "continuation exceeded the step budget",
            ));
        }
    }
}

/// Transfer matrix expressing `end` in the solution basis of `start`
/// (useful for chaining several continuations into one composite path).
pub fn transfer_between(start: &FundamentalPair, end: &FundamentalPair) -> Result<MobiusMap> {
    Ok(transfer_from_states(start, end)?.0)
}

fn transfer_from_states(start: &FundamentalPair, end: &FundamentalPair) -> Result<(MobiusMap, f64)> {
    // end = T * start in the solution-row sense; start is usually the
    // standard basis, in which case T is just the end-state matrix.
    let det_s = start.wronskian();
    if det_s.norm() < 1e-300 {
        return Err(Error::degenerate("starting pair is linearly dependent"));
    }
    // start^{-1}
    let (ia, ib, ic, id) = (
        start.u2p / det_s,
        -start.u1p / det_s,
        -start.u2 / det_s,
        start.u1 / det_s,
    );
    let (a, b, c, d) = (
        end.u1 * ia + end.u1p * ic,
        end.u1 * ib + end.u1p * id,
        end.u2 * ia + end.u2p * ic,
        end.u2 * ib + end.u2p * id,
    );
    let raw_det = a * d - b * c;
    let defect = (raw_det - Complex64::new(1.0, 0.0)).norm();
    Ok((MobiusMap::new(a, b, c, d)?, defect))
}

/// Continues `start` along `path` and reports the end state together with
/// the transfer matrix in the initial basis.
pub fn continue_along_path(
    xi: &XiCoefficient,
    singularities: &[Complex64],
    path: &PathSpec,
    start: &FundamentalPair,
    ctrl: &StepControl,
) -> Result<Continuation> {
    let origin = path.start_point()?;
    if (origin - start.base_point).norm() > 1e-12 {
        return Err(Error::input(
            "starting pair is not based at the start of the path",
        ));
    }
    let waypoints = path.waypoints(ctrl.waypoints_per_turn)?;
    let mut state = *start;
    let mut steps = 0usize;
    for w in waypoints.iter().skip(1) {
        continue_segment(xi, singularities, &mut state, *w, ctrl, &mut steps)?;
    }
    finish(start, state, steps)
}

/// Continues once around the circle `|z - center| = r`, recording the pair
/// at `n_samples` equispaced stops (the first stop is the start point). The
/// final element of the sample vector is the fully continued state back at
/// the start.
pub fn continue_loop_with_samples(
    xi: &XiCoefficient,
    singularities: &[Complex64],
    radius: f64,
    n_samples: usize,
    ctrl: &StepControl,
) -> Result<(Continuation, Vec<PathSample>)> {
    if n_samples < 2 {
        return Err(Error::input("need at least two loop samples"));
    }
    let start_pt = Complex64::new(radius, 0.0);
    let start = FundamentalPair::standard(start_pt);
    let mut state = start;
    let mut steps = 0usize;
    let mut samples = Vec::with_capacity(n_samples + 1);
    samples.push(PathSample {
        z: start_pt,
        pair: state,
    });
    for j in 1..=n_samples {
        let ang = 2.0 * std::f64::consts::PI * (j as f64) / (n_samples as f64);
        let target = Complex64::from_polar(radius, ang);
        continue_segment(xi, singularities, &mut state, target, ctrl, &mut steps)?;
        samples.push(PathSample { z: target, pair: state });
    }
    let cont = finish(&start, state, steps)?;
    Ok((cont, samples))
}

fn finish(start: &FundamentalPair, end: FundamentalPair, steps: usize) -> Result<Continuation> {
    let (transfer, det_defect) = transfer_from_states(start, &end)?;
    let w0 = start.wronskian();
    let drift = (end.wronskian() - w0).norm() / w0.norm().max(1e-300);
    Ok(Continuation {
        end,
        transfer,
        det_defect,
        wronskian_drift: drift,
        steps,
    })
}

/// Local series of the developing quotient `u1/u2` at the pair's base point.
/// Its Schwarzian reproduces the coefficient `ξ` there.
pub fn developing_quotient_series(
    xi: &XiCoefficient,
    pair: &FundamentalPair,
    order: usize,
) -> Result<LaurentSeries> {
    let xi_local = xi.taylor_at(pair.base_point, order)?;
    let (v1, v2) = local_solution_basis(&xi_local, order)?;
    let num = v1.scale(pair.u1).add(&v2.scale(pair.u1p))?;
    let den = v1.scale(pair.u2).add(&v2.scale(pair.u2p))?;
    num.divide(&den)
}

/// Developing-map germ from one nonvanishing solution `h`:
/// `φ(z) = ∫_{z0}^{z} h(s)^{-2} ds + const`, written as a series plus a
/// separate logarithm coefficient when `h^{-2}` carries a `1/(z-c)` term.
#[derive(Clone, Debug)]
pub struct VariationOfParameters {
    /// Power-series part; the definite lower limit and the additive constant
    /// are folded into the constant term.
    pub series: LaurentSeries,
    /// Coefficient of `ln((z - center)/(z0 - center))`.
    pub log_coefficient: Complex64,
}

pub fn variation_of_parameters(
    h: &LaurentSeries,
    z0: Complex64,
    constant: Complex64,
) -> Result<VariationOfParameters> {
    if h.is_zero() {
        return Err(Error::degenerate("zero solution cannot seed a quotient"));
    }
    let hinv = h.reciprocal()?;
    let integrand = hinv.multiply(&hinv)?;
    let (f, log_coefficient) = integrand.antiderivative();
    let f_at_z0 = f.evaluate(z0)?;
    let series = f.add(&LaurentSeries::constant(h.center(), constant - f_at_z0))?;
    Ok(VariationOfParameters {
        series,
        log_coefficient,
    })
}

/// Same construction for the pure power solution `h = (z-c)^κ`, whose square
/// inverse integrates in closed form: exponent `1-2κ` and coefficient
/// `1/(1-2κ)`, or a bare logarithm when `2κ = 1`.
#[derive(Clone, Copy, Debug)]
pub struct PowerAntiderivative {
    pub exponent: Complex64,
    pub coefficient: Complex64,
    pub log_coefficient: Complex64,
    pub constant: Complex64,
}

pub fn variation_of_parameters_power(
    kappa: Complex64,
    z0: Complex64,
    constant: Complex64,
) -> PowerAntiderivative {
    let one = Complex64::new(1.0, 0.0);
    let expo = one - 2.0 * kappa;
    if expo.norm() < 1e-12 {
        return PowerAntiderivative {
            exponent: Complex64::new(0.0, 0.0),
            coefficient: Complex64::new(0.0, 0.0),
            log_coefficient: one,
            constant,
        };
    }
    PowerAntiderivative {
        exponent: expo,
        coefficient: one / expo,
        log_coefficient: Complex64::new(0.0, 0.0),
        constant: constant - z0.powc(expo) / expo,
    }
}
