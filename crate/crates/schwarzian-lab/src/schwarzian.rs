//! Schwarzian derivative, its Möbius cocycle identities, quadratic
//! differential pullbacks, and the coordinate transforms attached to cyclic
//! (orbifold) covers `z = y^k`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mobius::MobiusMap;
use crate::series::LaurentSeries;

/// `S(f) = (f''/f')' - (f''/f')²/2` as a series in the chart of `f`.
///
/// Negative valuations are allowed: the result is the Schwarzian in the same
/// chart, which is what a developing map with a simple pole requires.
pub fn schwarzian(f: &LaurentSeries) -> Result<LaurentSeries> {
    let fp = f.derivative();
    if fp.is_zero() || fp.max_coeff_norm() < 1e-14 * f.max_coeff_norm() {
        return Err(Error::degenerate(
            "locally constant map has no Schwarzian derivative",
        ));
    }
    let log_derivative = f.derivative().derivative().divide(&fp)?;
    schwarzian_from_log_derivative(&log_derivative)
}

/// Schwarzian assembled from the pre-logarithmic derivative `L = f''/f'`.
pub fn schwarzian_from_log_derivative(l: &LaurentSeries) -> Result<LaurentSeries> {
    let half = Complex64::new(0.5, 0.0);
    l.derivative().sub(&l.multiply(l)?.scale(half))
}

/// Schwarzian of the power map `z ↦ z^θ` for arbitrary complex exponent,
/// computed through `f''/f' = (θ-1)/z` so fractional powers never need a
/// series representation of `z^θ` itself.
pub fn schwarzian_of_power(theta: Complex64) -> Result<LaurentSeries> {
    if theta.norm() < 1e-300 {
        return Err(Error::degenerate("z^0 is locally constant"));
    }
    let l = LaurentSeries::monomial(
        Complex64::new(0.0, 0.0),
        -1,
        theta - Complex64::new(1.0, 0.0),
    );
    schwarzian_from_log_derivative(&l)
}

/// Which of the two invariance identities to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CocycleSide {
    /// `S(f∘γ) = (S(f)∘γ)·(γ')²`
    Pre,
    /// `S(γ∘f) = S(f)`
    Post,
}

/// Comparison window for the cocycle residual: orders beyond this sit at
/// the edge of the reciprocal-series convergence radius where absolute
/// float cancellation dominates.
pub const COCYCLE_WINDOW: i64 = 24;

/// Max-coefficient residual of the chosen cocycle identity over the first
/// [`COCYCLE_WINDOW`] orders. For the `Pre` side the series `f` must be
/// centered at `γ(0)` so the composition windows line up.
pub fn verify_cocycle(f: &LaurentSeries, gamma: &MobiusMap, side: CocycleSide) -> Result<f64> {
    let order = 40usize;
    let (lhs, rhs) = match side {
        CocycleSide::Pre => {
            let gs = gamma.to_series(Complex64::new(0.0, 0.0), order)?;
            let f_of_gamma = LaurentSeries::compose(f, &gs)?;
            let lhs = schwarzian(&f_of_gamma)?;
            let s_f = schwarzian(f)?;
            let gp = gs.derivative();
            let rhs = LaurentSeries::compose(&s_f, &gs)?.multiply(&gp.multiply(&gp)?)?;
            (lhs, rhs)
        }
        CocycleSide::Post => {
            let center = f.center();
            let af = f.scale(gamma.a);
            let num = af.add(&LaurentSeries::constant(center, gamma.b))?;
            let cf = f.scale(gamma.c);
            let den = cf.add(&LaurentSeries::constant(center, gamma.d))?;
            let gamma_of_f = num.divide(&den)?;
            (schwarzian(&gamma_of_f)?, schwarzian(f)?)
        }
    };
    Ok(lhs
        .truncated(COCYCLE_WINDOW)
        .max_difference(&rhs.truncated(COCYCLE_WINDOW)))
}

/// A quadratic differential `ξ(z) dz²` in a named chart.
#[derive(Clone, Debug)]
pub struct QuadraticDifferential {
    pub chart_label: String,
    pub xi: LaurentSeries,
}

impl QuadraticDifferential {
    pub fn new(chart_label: impl Into<String>, xi: LaurentSeries) -> Self {
        QuadraticDifferential {
            chart_label: chart_label.into(),
            xi,
        }
    }
}

/// Pullback of `ξ(z) dz²` under the coordinate change `z = w(t)`:
/// `ξ ↦ (ξ∘w)·(w')²`.
pub fn pullback(q: &QuadraticDifferential, w: &LaurentSeries) -> Result<QuadraticDifferential> {
    let wp = w.derivative();
    if wp.is_zero() {
        return Err(Error::degenerate(
            "coordinate change with identically vanishing derivative",
        ));
    }
    let xi_of_w = LaurentSeries::compose(&q.xi, w)?;
    let xi_new = xi_of_w.multiply(&wp.multiply(&wp)?)?;
    Ok(QuadraticDifferential::new(
        format!("{}*pullback", q.chart_label),
        xi_new,
    ))
}

fn check_cover_order(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::input("cover order k must be at least 2"));
    }
    Ok(())
}

/// Exponent bookkeeping of the substitution `z = y^k` applied to
/// `ξ(z) dz²`: every term `a_j z^j` becomes `k² a_j y^{k j + 2k - 2}`.
/// No valuation restriction; this is the raw differential transform.
fn cyclic_substitution(xi: &LaurentSeries, k: u32) -> LaurentSeries {
    let kk = Complex64::new((k as f64) * (k as f64), 0.0);
    let mut terms = Vec::new();
    if !xi.is_zero() {
        for (i, &a) in xi.coeffs().iter().enumerate() {
            let j = xi.valuation() + i as i64;
            terms.push((k as i64 * j + 2 * k as i64 - 2, a * kk));
        }
    }
    LaurentSeries::from_terms(xi.center(), &terms)
}

/// Expression of a holomorphic datum `ξ^{(k)}` in the ramified coordinate
/// `y` with `z = y^k`: returns `k² y^{2k-2} ξ^{(k)}(y^k)`.
pub fn orbifold_pushdown(xi_k: &LaurentSeries, k: u32) -> Result<LaurentSeries> {
    check_cover_order(k)?;
    if !xi_k.valuation_at_least(0) {
        return Err(Error::input(format!(
            "pushdown input must be holomorphic (valuation >= 0), got valuation {}",
            xi_k.valuation()
        )));
    }
    Ok(cyclic_substitution(xi_k, k))
}

/// Inverse of [`orbifold_pushdown`]: recovers the unique `ξ^{(k)}` from its
/// ramified expression. Admissible exponents are `e = k j + 2k - 2` with
/// `j >= 0`; the first violating exponent is reported, never projected away.
pub fn orbifold_lift(xi_orb: &LaurentSeries, k: u32) -> Result<LaurentSeries> {
    check_cover_order(k)?;
    if xi_orb.is_zero() {
        return Ok(LaurentSeries::zero(xi_orb.center()));
    }
    let kk = Complex64::new((k as f64) * (k as f64), 0.0);
    let base = 2 * k as i64 - 2;
    let scale = xi_orb.max_coeff_norm();
    let mut terms = Vec::new();
    for (i, &a) in xi_orb.coeffs().iter().enumerate() {
        if a.norm() < 1e-14 * scale {
            continue;
        }
        let e = xi_orb.valuation() + i as i64;
        if e < base || (e - base) % k as i64 != 0 {
            return Err(Error::ExponentLattice { exponent: e, k });
        }
        terms.push(((e - base) / k as i64, a / kk));
    }
    Ok(LaurentSeries::from_terms(xi_orb.center(), &terms))
}

/// Coefficient of the structure lifted through the ramified cover `z = w^k`:
/// the substitution term plus the Schwarzian of the covering map itself,
/// `ξ^{(k)}(w) = k² w^{2k-2} ξ(w^k) + (1 - k²)/(2 w²)`.
///
/// A datum with elliptic puncture behavior of compatible order lifts to a
/// holomorphic coefficient; anything else keeps a pole, which is the
/// numerical signature of a non-uniformizable elliptic puncture.
pub fn lift_through_cyclic_cover(xi: &LaurentSeries, k: u32) -> Result<LaurentSeries> {
    check_cover_order(k)?;
    let subst = cyclic_substitution(xi, k);
    let kf = k as f64;
    let cusp = LaurentSeries::monomial(
        xi.center(),
        -2,
        Complex64::new((1.0 - kf * kf) / 2.0, 0.0),
    );
    subst.add(&cusp)
}
