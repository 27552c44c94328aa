//! Hyperbolic sup norm and Euclidean area norm of quadratic differentials,
//! with the cusp-reference subtraction and the classical univalence
//! thresholds.
//!
//! The sup norm is `¼ sup |ξ̃(w)| (1-|w|²)²` over the unit disc, where `ξ̃`
//! is the lift through the covering chart of the surface. Densities are
//! accumulated in log scale so that the exponential decay of the
//! punctured-disc chart toward the cusp never overflows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::series::LaurentSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    Disc,
    PuncturedDisc,
}

/// The covering chart of the surface: the identity for the disc, and
/// `π(w) = exp((w+1)/(w-1))` for the punctured disc (it maps the disc onto
/// the punctured disc, omitting zero).
#[derive(Clone, Copy, Debug)]
pub struct CoveringChart {
    pub surface: Surface,
}

impl CoveringChart {
    pub fn new(surface: Surface) -> Self {
        CoveringChart { surface }
    }
}

/// Coefficient of the differential relative to the reference structure of
/// the surface: the disc keeps `ξ`; the punctured disc subtracts the
/// canonical cusp coefficient `1/(2z²)`.
pub fn relative_xi(xi: &LaurentSeries, surface: Surface) -> LaurentSeries {
    match surface {
        Surface::Disc => xi.clone(),
        Surface::PuncturedDisc => {
            let cusp = LaurentSeries::monomial(xi.center(), -2, Complex64::new(0.5, 0.0));
            xi.sub(&cusp).expect("same center")
        }
    }
}

/// Radial-angular sampling plan with dyadic refinement toward the boundary.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SupNormGrid {
    /// Dyadic boundary layers: layer `j` covers `1-2^{-j} <= ρ < 1-2^{-j-1}`.
    pub layers: usize,
    /// Radii sampled per layer (endpoints included; layer 0 contains ρ = 0).
    pub radial_per_layer: usize,
    /// Equispaced angles per circle.
    pub angular: usize,
}

impl Default for SupNormGrid {
    fn default() -> Self {
        SupNormGrid {
            layers: 12,
            radial_per_layer: 8,
            angular: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupNormReport {
    /// Largest sampled density (saturates at `f64::MAX` when flagged).
    pub value: f64,
    /// Set when the boundary-layer maxima keep growing: the sup is +∞.
    pub infinite: bool,
    /// Maximum of the density per boundary layer, outermost last.
    pub layer_maxima: Vec<f64>,
    pub samples: usize,
}

/// Boundary divergence rule: the sup is declared infinite when the layer
/// maxima still grow by more than this factor across three successive
/// dyadic refinements at the tail.
pub const SUP_DIVERGENCE_FACTOR: f64 = 10.0;

/// Log of the density `¼|ξ̃(w)|(1-|w|²)²` at one point of the disc chart.
fn log_density(xi: &LaurentSeries, chart: &CoveringChart, w: Complex64) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let shape = (1.0 - w.norm_sqr()).max(0.0);
    if shape == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let log_shape = 2.0 * shape.ln() - 4.0f64.ln();
    match chart.surface {
        Surface::Disc => {
            let v = xi.evaluate(w)?;
            Ok(v.norm().ln() + log_shape)
        }
        Surface::PuncturedDisc => {
            // π(w) = exp(s), s = (w+1)/(w-1) with Re s < 0 on the disc;
            // π'(w) = -2 π(w)/(w-1)².
            let s = (w + one) / (w - one);
            let u = s.exp(); // |u| < 1, may underflow to zero harmlessly
            let vraw = if xi.is_zero() {
                return Ok(f64::NEG_INFINITY);
            } else {
                // ln|ξ(u)| = v ln|u| + ln|Σ a_{v+j} u^j| evaluated stably
                let val = xi.valuation();
                let poly = xi.shifted(-val);
                let p = poly.evaluate(u)?;
                (val as f64) * s.re + p.norm().ln()
            };
            let log_pi_prime = 2.0f64.ln() + s.re - 2.0 * (w - one).norm().ln();
            Ok(vraw + 2.0 * log_pi_prime + log_shape)
        }
    }
}

/// Supremum estimate of the hyperbolic density over a dyadically refined
/// grid, with a declared divergence rule for the boundary layers.
pub fn hyperbolic_sup_norm(
    xi: &LaurentSeries,
    chart: &CoveringChart,
    grid: &SupNormGrid,
) -> Result<SupNormReport> {
    if grid.layers < 4 || grid.radial_per_layer < 2 || grid.angular < 4 {
        return Err(Error::input("sup-norm grid is too coarse"));
    }
    let mut layer_maxima_log = Vec::with_capacity(grid.layers);
    let mut samples = 0usize;
    for j in 0..grid.layers {
        let lo = 1.0 - 0.5f64.powi(j as i32);
        let hi = 1.0 - 0.5f64.powi(j as i32 + 1);
        let n = grid.radial_per_layer;
        let mut points = Vec::with_capacity(n * grid.angular);
        for i in 0..n {
            let rho = lo + (hi - lo) * (i as f64) / (n as f64 - 1.0);
            for m in 0..grid.angular {
                let ang = 2.0 * std::f64::consts::PI * (m as f64) / (grid.angular as f64);
                points.push(Complex64::from_polar(rho, ang));
            }
        }
        samples += points.len();
        let logs = par_map(&points, |&w| log_density(xi, chart, w));
        let mut layer_max = f64::NEG_INFINITY;
        for l in logs {
            let v = l?;
            if v.is_nan() {
                return Err(Error::numerical(
                    Complex64::new(0.0, 0.0),
                    "density evaluation produced NaN",
                ));
            }
            layer_max = layer_max.max(v);
        }
        layer_maxima_log.push(layer_max);
    }
    let overall_log = layer_maxima_log.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let last = grid.layers - 1;
    let infinite = layer_maxima_log[last].is_infinite() && layer_maxima_log[last] > 0.0
        || layer_maxima_log[last]
            > layer_maxima_log[last - 3] + SUP_DIVERGENCE_FACTOR.ln()
            && layer_maxima_log[last] > layer_maxima_log[0];
    let value = if overall_log > 700.0 {
        f64::MAX
    } else {
        overall_log.exp()
    };
    Ok(SupNormReport {
        value,
        infinite,
        layer_maxima: layer_maxima_log
            .iter()
            .map(|l| if *l > 700.0 { f64::MAX } else { l.exp() })
            .collect(),
        samples,
    })
}

/// Quadrature plan for the Euclidean area integral.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AreaQuadrature {
    /// Trapezoid points per circle.
    pub n_theta: usize,
    /// Simpson intervals per radial ring (forced even).
    pub n_radial: usize,
    /// Shrinking inner rings `[eps 2^{-j-1}, eps 2^{-j}]` examined for the
    /// convergence classification.
    pub inner_rings: usize,
    /// Geometric-ratio threshold of the convergence test.
    pub ratio_factor: f64,
}

impl Default for AreaQuadrature {
    fn default() -> Self {
        AreaQuadrature {
            n_theta: 128,
            n_radial: 32,
            inner_rings: 18,
            ratio_factor: 0.9,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AreaNorm {
    /// The integral converges as the inner radius shrinks; `value` includes
    /// the extrapolated geometric tail.
    Convergent { value: f64 },
    /// Ring increments do not decay: `growth_exponent` is the dyadic growth
    /// rate (zero means logarithmic divergence).
    Divergent { growth_exponent: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AreaNormReport {
    pub classification: AreaNorm,
    /// Value of the truncated integral over `eps < |z| < 1`.
    pub at_eps: f64,
    pub eps: f64,
    pub inner_increments: Vec<f64>,
}

/// `∫∫ |ξ| dA` over one ring `a <= r <= b` (Simpson radially, trapezoid in
/// the angle, fixed summation order).
fn ring_integral(xi: &LaurentSeries, a: f64, b: f64, quad: &AreaQuadrature) -> Result<f64> {
    let n_r = if quad.n_radial % 2 == 0 {
        quad.n_radial
    } else {
        quad.n_radial + 1
    };
    let radii: Vec<f64> = (0..=n_r)
        .map(|i| a + (b - a) * (i as f64) / (n_r as f64))
        .collect();
    let rows = par_map(&radii, |&r| -> Result<f64> {
        let mut acc = 0.0;
        for m in 0..quad.n_theta {
            let ang = 2.0 * std::f64::consts::PI * (m as f64) / (quad.n_theta as f64);
            let z = Complex64::from_polar(r, ang);
            acc += xi.evaluate(z)?.norm();
        }
        Ok(acc * 2.0 * std::f64::consts::PI / (quad.n_theta as f64) * r)
    });
    let mut vals = Vec::with_capacity(rows.len());
    for r in rows {
        vals.push(r?);
    }
    let h = (b - a) / (n_r as f64);
    let mut simpson = vals[0] + vals[n_r];
    for (i, v) in vals.iter().enumerate().take(n_r).skip(1) {
        simpson += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(simpson * h / 3.0)
}

/// Euclidean area of `|ξ| |dz|²` over `eps < |z| < 1`, with a shrinking-ring
/// study of the inner boundary that classifies the full integral as
/// convergent (reporting the extrapolated limit) or divergent (reporting
/// the dyadic growth exponent).
pub fn euclidean_area_norm(
    xi: &LaurentSeries,
    eps: f64,
    quad: &AreaQuadrature,
) -> Result<AreaNormReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::input("inner radius must satisfy 0 < eps < 1"));
    }
    // Outer region [eps, 1] in geometrically growing rings.
    let mut outer = 0.0;
    let mut a = eps;
    while a < 1.0 {
        let b = (2.0 * a).min(1.0);
        outer += ring_integral(xi, a, b, quad)?;
        a = b;
    }
    // Shrinking inner rings.
    let mut increments = Vec::with_capacity(quad.inner_rings);
    for j in 0..quad.inner_rings {
        let hi = eps * 0.5f64.powi(j as i32);
        let lo = hi / 2.0;
        increments.push(ring_integral(xi, lo, hi, quad)?);
    }
    // Tail ratio over the last few rings.
    let tail = increments.iter().rev().take(5).collect::<Vec<_>>();
    let mut ratios = Vec::new();
    for w in tail.windows(2) {
        // reversed order: w[0] is deeper than w[1]
        if *w[1] > 0.0 {
            ratios.push(w[0] / w[1]);
        }
    }
    let q = if ratios.is_empty() {
        0.0
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    let partial: f64 = outer + increments.iter().sum::<f64>();
    let classification = if q < quad.ratio_factor {
        let tail_estimate = increments.last().copied().unwrap_or(0.0) * q / (1.0 - q);
        AreaNorm::Convergent {
            value: partial + tail_estimate,
        }
    } else {
        AreaNorm::Divergent {
            growth_exponent: q.log2(),
        }
    };
    Ok(AreaNormReport {
        classification,
        at_eps: outer,
        eps,
        inner_increments: increments,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SchlichtDiagnostic {
    /// `‖ω‖∞ ≤ 1/2`: sufficient for univalence of the disc developing map.
    pub nehari_pass: bool,
    /// `‖ω‖∞ > 3/2`: incompatible with univalence on the disc (says
    /// nothing about injectivity on the monodromy covering).
    pub kraus_violated: bool,
}

pub fn schlicht_thresholds(l_inf: f64) -> SchlichtDiagnostic {
    SchlichtDiagnostic {
        nehari_pass: l_inf <= 0.5,
        kraus_violated: l_inf > 1.5,
    }
}
