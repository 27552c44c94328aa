//! Truncated Laurent series over complex coefficients.
//!
//! A [`LaurentSeries`] stores finitely many coefficients of an expansion
//! `f(z) = Σ_k a_k (z - center)^k` for `k = valuation ..= reach`. The window
//! `[valuation, reach]` is the truncation contract: coefficients inside the
//! window are accurate (up to rounding), coefficients outside it are unknown.
//! Every arithmetic operation propagates the window it can vouch for.
//!
//! Canonical form trims negligible leading coefficients (raising the
//! valuation, never the reach); trailing zeros inside the window are data.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative threshold below which a coefficient is treated as zero when
/// putting a series in canonical form.
pub const ZERO_COEFF_REL: f64 = 1e-14;

/// Default truncation order for series produced by expansions.
pub const DEFAULT_TRUNCATION: usize = 32;

/// Sentinel reach for the exact zero series (known to all orders).
const EXACT_REACH: i64 = i64::MAX / 4;

#[derive(Clone, Debug)]
pub struct LaurentSeries {
    center: Complex64,
    valuation: i64,
    /// Coefficients of `(z - center)^k` for `k = valuation, valuation+1, ...`.
    coeffs: Vec<Complex64>,
    /// Exact series are finite Laurent polynomials: every coefficient outside
    /// the stored window is genuinely zero, so their reach is unbounded.
    /// Inexact series vouch only for the stored window.
    exact: bool,
}

impl LaurentSeries {
    /// Builds an exact series (finite Laurent polynomial) from a raw
    /// coefficient window and canonicalizes it.
    pub fn new(center: Complex64, valuation: i64, coeffs: Vec<Complex64>) -> Self {
        let mut s = LaurentSeries {
            center,
            valuation,
            coeffs,
            exact: true,
        };
        s.canonicalize();
        s
    }

    /// Builds a truncated series: coefficients beyond the stored window are
    /// unknown rather than zero.
    pub fn new_truncated(center: Complex64, valuation: i64, coeffs: Vec<Complex64>) -> Self {
        let mut s = LaurentSeries {
            center,
            valuation,
            coeffs,
            exact: false,
        };
        s.canonicalize();
        s
    }

    pub fn zero(center: Complex64) -> Self {
        LaurentSeries {
            center,
            valuation: 0,
            coeffs: Vec::new(),
            exact: true,
        }
    }

    pub fn constant(center: Complex64, value: Complex64) -> Self {
        Self::new(center, 0, vec![value])
    }

    pub fn one(center: Complex64) -> Self {
        Self::constant(center, Complex64::new(1.0, 0.0))
    }

    /// The monomial `coeff * (z - center)^power`.
    pub fn monomial(center: Complex64, power: i64, coeff: Complex64) -> Self {
        Self::new(center, power, vec![coeff])
    }

    /// Series from `(power, coefficient)` pairs, window spanning the given terms.
    pub fn from_terms(center: Complex64, terms: &[(i64, Complex64)]) -> Self {
        if terms.is_empty() {
            return Self::zero(center);
        }
        let lo = terms.iter().map(|&(k, _)| k).min().unwrap();
        let hi = terms.iter().map(|&(k, _)| k).max().unwrap();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for &(k, a) in terms {
            coeffs[(k - lo) as usize] += a;
        }
        Self::new(center, lo, coeffs)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest power in the window. Meaningless for the zero series.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// `true` when the series vanishes to order `k` (zero series included).
    pub fn valuation_at_least(&self, k: i64) -> bool {
        self.is_zero() || self.valuation >= k
    }

    /// Highest power the window vouches for. Exact series (finite Laurent
    /// polynomials, including the zero series) vouch for every power.
    pub fn reach(&self) -> i64 {
        if self.is_zero() || self.exact {
            EXACT_REACH
        } else {
            self.stored_top()
        }
    }

    /// Highest power actually stored.
    fn stored_top(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64 - 1
    }

    pub fn is_exact(&self) -> bool {
        self.exact || self.is_zero()
    }

    /// Coefficient of `(z - center)^k` (zero outside the window).
    pub fn coeff(&self, k: i64) -> Complex64 {
        if self.is_zero() || k < self.valuation {
            return Complex64::new(0.0, 0.0);
        }
        let idx = k - self.valuation;
        if idx >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Canonical storage trims exactly-zero leading coefficients only.
    /// Windows produced by re-expansion near a pole legitimately span 15+
    /// orders of magnitude, so a relative threshold here would destroy
    /// significant low-order terms; the declared relative zero threshold is
    /// applied explicitly where a valuation decision is being made (see
    /// [`LaurentSeries::significant_valuation`]).
    fn canonicalize(&mut self) {
        let mut lead = 0usize;
        while lead < self.coeffs.len() && self.coeffs[lead].norm() == 0.0 {
            lead += 1;
        }
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.valuation = 0;
            return;
        }
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.valuation += lead as i64;
        }
    }

    /// First power whose coefficient clears the relative zero threshold
    /// (`None` when every coefficient is below it). This is the declared
    /// rule for numeric valuation decisions such as pole-order detection.
    pub fn significant_valuation(&self, rel_threshold: f64) -> Option<i64> {
        let scale = self.max_coeff_norm();
        if scale == 0.0 {
            return None;
        }
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.norm() >= rel_threshold * scale {
                return Some(self.valuation + i as i64);
            }
        }
        None
    }

    /// Applies the declared relative zero threshold as a canonical form:
    /// trims leading coefficients below it (the whole series collapses to
    /// zero when nothing clears it).
    pub fn trimmed_to_significant(&self, rel_threshold: f64) -> Self {
        match self.significant_valuation(rel_threshold) {
            None => Self::zero(self.center),
            Some(v) => {
                let keep = (v - self.valuation) as usize;
                LaurentSeries {
                    center: self.center,
                    valuation: v,
                    coeffs: self.coeffs[keep..].to_vec(),
                    exact: self.exact,
                }
            }
        }
    }

    /// Restricts the window to powers `<= new_reach`. Truncating an exact
    /// series pads the window with true zeros up to `new_reach` and demotes
    /// it to truncated status.
    pub fn truncated(&self, new_reach: i64) -> Self {
        if self.is_zero() || new_reach >= self.reach() {
            return self.clone();
        }
        if new_reach < self.valuation {
            return Self::zero(self.center);
        }
        let len = (new_reach - self.valuation + 1) as usize;
        let mut coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .copied()
            .take(len)
            .collect();
        coeffs.resize(len, Complex64::new(0.0, 0.0));
        LaurentSeries::new_truncated(self.center, self.valuation, coeffs)
    }

    fn check_same_center(&self, other: &Self) -> Result<()> {
        if (self.center - other.center).norm() > 0.0 {
            return Err(Error::CenterMismatch {
                left: self.center,
                right: other.center,
            });
        }
        Ok(())
    }

    /// Sum with window `[min valuation, min reach]`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_center(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let exact = self.exact && other.exact;
        let lo = self.valuation.min(other.valuation);
        let hi = if exact {
            self.stored_top().max(other.stored_top())
        } else {
            self.reach().min(other.reach()).min(
                self.stored_top().max(other.stored_top()),
            )
        };
        if hi < lo {
            return Ok(Self::zero(self.center));
        }
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect();
        let mut out = LaurentSeries {
            center: self.center,
            valuation: lo,
            coeffs,
            exact,
        };
        out.canonicalize();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            center: self.center,
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
            exact: self.exact,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = LaurentSeries {
            center: self.center,
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
            exact: self.exact,
        };
        out.canonicalize();
        out
    }

    /// Shifts every exponent by `shift` (multiplication by `(z-center)^shift`).
    pub fn shifted(&self, shift: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentSeries {
            center: self.center,
            valuation: self.valuation + shift,
            coeffs: self.coeffs.clone(),
            exact: self.exact,
        }
    }

    /// Cauchy product. The result window is limited by what both operands
    /// vouch for: `reach = min(v_a + reach_b, v_b + reach_a)`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_center(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.center));
        }
        let exact = self.exact && other.exact;
        let lo = self.valuation + other.valuation;
        let stored_hi = self.stored_top() + other.stored_top();
        let contract_hi = self
            .valuation
            .saturating_add(other.reach())
            .min(other.valuation.saturating_add(self.reach()));
        let hi = stored_hi.min(contract_hi);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = self.valuation + i as i64 + other.valuation + j as i64;
                if k > hi {
                    break;
                }
                coeffs[(k - lo) as usize] += a * b;
            }
        }
        let mut out = LaurentSeries {
            center: self.center,
            valuation: lo,
            coeffs,
            exact,
        };
        out.canonicalize();
        Ok(out)
    }

    /// Multiplicative inverse up to truncation; the valuation negates. The
    /// inverse of a monomial is exact; any other input yields a truncated
    /// window (`DEFAULT_TRUNCATION` wide for exact inputs, the stored width
    /// otherwise).
    pub fn reciprocal(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDivision);
        }
        if self.coeffs.len() == 1 {
            return Ok(LaurentSeries {
                center: self.center,
                valuation: -self.valuation,
                coeffs: vec![Complex64::new(1.0, 0.0) / self.coeffs[0]],
                exact: self.exact,
            });
        }
        // f = a_v x^v (1 + u), invert the unit part by the standard recursion.
        let n = if self.exact {
            DEFAULT_TRUNCATION + 1
        } else {
            self.coeffs.len()
        };
        let lead = self.coeffs[0];
        let mut inv = vec![Complex64::new(0.0, 0.0); n];
        inv[0] = Complex64::new(1.0, 0.0) / lead;
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k.min(self.coeffs.len() - 1) {
                acc += self.coeffs[j] * inv[k - j];
            }
            inv[k] = -acc / lead;
        }
        Ok(Self::new_truncated(self.center, -self.valuation, inv))
    }

    /// Quotient `self / other` up to the shared truncation.
    pub fn divide(&self, other: &Self) -> Result<Self> {
        self.multiply(&other.reciprocal()?)
    }

    /// Term-wise derivative; the truncation window drops by one.
    pub fn derivative(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lo = self.valuation - 1;
        let hi = self.stored_top() - 1;
        if hi < lo {
            return Self::zero(self.center);
        }
        let coeffs = (lo..=hi)
            .map(|k| self.coeff(k + 1) * Complex64::new((k + 1) as f64, 0.0))
            .collect();
        let mut out = LaurentSeries {
            center: self.center,
            valuation: lo,
            coeffs,
            exact: self.exact,
        };
        out.canonicalize();
        out
    }

    /// Term-wise antiderivative with zero integration constant. The
    /// coefficient of `(z-center)^{-1}`, which integrates to a logarithm
    /// rather than a power, is returned separately.
    pub fn antiderivative(&self) -> (Self, Complex64) {
        if self.is_zero() {
            return (self.clone(), Complex64::new(0.0, 0.0));
        }
        let log_coeff = self.coeff(-1);
        let lo = self.valuation + 1;
        let hi = self.stored_top() + 1;
        let coeffs = (lo..=hi)
            .map(|k| {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.coeff(k - 1) / Complex64::new(k as f64, 0.0)
                }
            })
            .collect();
        let mut out = LaurentSeries {
            center: self.center,
            valuation: lo,
            coeffs,
            exact: self.exact,
        };
        out.canonicalize();
        (out, log_coeff)
    }

    /// Evaluates the stored window at `z` (Horner on both power directions).
    /// A point equal to the center is rejected when negative powers exist.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let w = z - self.center;
        if self.valuation < 0 && w.norm() == 0.0 {
            return Err(Error::degenerate(
                "evaluation at the center of a series with negative valuation",
            ));
        }
        // Split into nonnegative powers (Horner in w down to power zero;
        // gaps below the valuation read as zero) and negative powers
        // (Horner in 1/w).
        let top = self.stored_top();
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (0..=top.max(-1)).rev() {
            pos = pos * w + self.coeff(k);
        }
        let mut neg = Complex64::new(0.0, 0.0);
        if self.valuation < 0 {
            let winv = Complex64::new(1.0, 0.0) / w;
            for k in self.valuation..0 {
                neg = (neg + self.coeff(k)) * winv;
            }
        }
        Ok(pos + neg)
    }

    /// Composition `outer ∘ inner`. When the outer series has negative
    /// powers, the inner series must vanish at its center (valuation >= 1);
    /// otherwise the stored outer window is composed as a polynomial in
    /// `inner - outer.center`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.is_zero() {
            return Ok(Self::zero(inner.center()));
        }
        let delta = inner.add(&Self::constant(inner.center(), -outer.center))?;
        if delta.is_zero() {
            // inner is identically the outer center
            if outer.valuation() < 0 {
                return Err(Error::input(
                    "outer series has a pole at the constant value of the inner series",
                ));
            }
            return Ok(Self::constant(inner.center(), outer.coeff(0)));
        }
        let delta_val = delta.valuation();
        if outer.valuation() < 0 && delta_val < 1 {
            return Err(Error::input(
                "outer series has negative powers but inner series does not vanish at the center",
            ));
        }

        // Window the result can vouch for: the first omitted outer term
        // o_{reach+1} * delta^{reach+1} starts at power delta_val*(reach+1).
        let reach_bound = if delta_val >= 1 {
            delta_val
                .saturating_mul(outer.reach() + 1)
                .saturating_sub(1)
                .min(delta.reach())
        } else {
            // Nonvanishing inner: the stored outer window is composed as a
            // polynomial, so the window is limited by the inner one only.
            delta.reach()
        };

        // Nonnegative part by Horner from the top of the stored window down
        // to power zero (missing coefficients read as zero).
        let mut acc = Self::zero(inner.center());
        let top = outer.stored_top();
        if top >= 0 {
            for k in (0..=top).rev() {
                acc = acc.multiply(&delta)?.truncated(reach_bound);
                acc = acc.add(&Self::constant(inner.center(), outer.coeff(k)))?;
            }
        }
        // Negative part: explicit powers of 1/delta.
        if outer.valuation() < 0 {
            let dinv = delta.reciprocal()?;
            let mut negacc = Self::zero(inner.center());
            for k in outer.valuation()..0 {
                let term = power_of(&dinv, (-k) as u32, reach_bound)?.scale(outer.coeff(k));
                negacc = negacc.add(&term)?;
            }
            acc = acc.add(&negacc)?;
        }
        Ok(acc.truncated(reach_bound))
    }

    /// Re-expands the stored window, read as a finite Laurent polynomial,
    /// around a new center. Exact up to rounding; requires the new center to
    /// differ from the old one whenever negative powers are present. The
    /// result is a Taylor window `[0, order]`.
    pub fn recentered(&self, new_center: Complex64, order: usize) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero(new_center));
        }
        let d = new_center - self.center;
        if self.valuation < 0 && d.norm() == 0.0 {
            return Err(Error::degenerate(
                "cannot re-center a series with negative powers at its own pole",
            ));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            let k = self.valuation + i as i64;
            // (d + t)^k = d^k * sum_j C(k, j) (t/d)^j, generalized binomial.
            if k >= 0 && d.norm() == 0.0 {
                if (k as usize) <= order {
                    out[k as usize] += a;
                }
                continue;
            }
            let dk = d.powi(k as i32);
            let dinv = Complex64::new(1.0, 0.0) / d;
            let mut binom = Complex64::new(1.0, 0.0); // C(k, 0)
            let mut dpow = dk;
            let jmax = if k >= 0 { order.min(k as usize) } else { order };
            for j in 0..=jmax {
                out[j] += a * binom * dpow;
                // next: C(k, j+1) = C(k, j) * (k - j) / (j + 1)
                binom *= Complex64::new((k - j as i64) as f64, 0.0)
                    / Complex64::new((j + 1) as f64, 0.0);
                dpow *= dinv;
            }
        }
        // A nonnegative polynomial re-centers exactly once the whole degree
        // fits in the window; anything else is a genuine truncation.
        if self.exact && self.valuation >= 0 && self.stored_top() <= order as i64 {
            Ok(Self::new(new_center, 0, out))
        } else {
            Ok(Self::new_truncated(new_center, 0, out))
        }
    }

    /// Recovers Laurent coefficients in the window `[v_min, v_max]` from `M`
    /// equispaced samples on the circle of the given radius: the discrete
    /// form of `a_v = (1/2πi) ∮ f(z) (z-center)^{-v-1} dz`, summed in fixed
    /// index order.
    pub fn coefficients_from_samples(
        center: Complex64,
        radius: f64,
        samples: &[Complex64],
        v_min: i64,
        v_max: i64,
    ) -> Result<Self> {
        if v_max < v_min {
            return Err(Error::input("empty coefficient window"));
        }
        let m = samples.len();
        let width = (v_max - v_min + 1) as usize;
        if m < 2 * width {
            return Err(Error::input(format!(
                "window of {width} modes needs at least {} samples, got {m}",
                2 * width
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::input("sampling radius must be positive"));
        }
        let mut coeffs = Vec::with_capacity(width);
        for v in v_min..=v_max {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &f) in samples.iter().enumerate() {
                let theta = 2.0 * std::f64::consts::PI * (j as f64) / (m as f64);
                let phase = Complex64::from_polar(1.0, -(v as f64) * theta);
                acc += f * phase;
            }
            let r_pow = radius.powi(v as i32);
            coeffs.push(acc / (m as f64) / r_pow);
        }
        Ok(Self::new(center, v_min, coeffs))
    }

    /// Largest coefficient modulus of `self - other` over the shared window.
    pub fn max_difference(&self, other: &Self) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        let lo = if self.is_zero() {
            other.valuation()
        } else if other.is_zero() {
            self.valuation()
        } else {
            self.valuation().min(other.valuation())
        };
        let stored_hi = if self.is_zero() {
            other.stored_top()
        } else if other.is_zero() {
            self.stored_top()
        } else {
            self.stored_top().max(other.stored_top())
        };
        let hi = self.reach().min(other.reach()).min(stored_hi);
        (lo..=hi)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

/// `base^exp` with truncation control, by repeated multiplication.
fn power_of(base: &LaurentSeries, exp: u32, reach_bound: i64) -> Result<LaurentSeries> {
    let mut acc = LaurentSeries::one(base.center());
    for _ in 0..exp {
        acc = acc.multiply(base)?.truncated(reach_bound);
    }
    Ok(acc)
}

// JSON encoding: {"center":[re,im],"valuation":v,"coefficients":[[re,im],...]}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    center: [f64; 2],
    valuation: i64,
    coefficients: Vec<[f64; 2]>,
}

impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            center: [self.center.re, self.center.im],
            valuation: self.valuation,
            coefficients: self.coeffs.iter().map(|a| [a.re, a.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        for c in &repr.coefficients {
            if !c[0].is_finite() || !c[1].is_finite() {
                return Err(D::Error::custom("series coefficients must be finite"));
            }
        }
        Ok(LaurentSeries::new(
            Complex64::new(repr.center[0], repr.center[1]),
            repr.valuation,
            repr.coefficients
                .into_iter()
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        ))
    }
}
