//! Möbius transformations normalized to determinant one, and points of the
//! Riemann sphere in homogeneous coordinates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::LaurentSeries;

/// Determinant defect tolerated after renormalization.
pub const DET_TOL: f64 = 1e-12;

/// A point of the Riemann sphere stored as a homogeneous pair `[num : den]`,
/// normalized so that `max(|num|, |den|) = 1`.
#[derive(Clone, Copy, Debug)]
pub struct SpherePoint {
    pub num: Complex64,
    pub den: Complex64,
}

impl SpherePoint {
    pub fn new(num: Complex64, den: Complex64) -> Self {
        let scale = num.norm().max(den.norm());
        if scale == 0.0 || !scale.is_finite() {
            // Treat non-normalizable data as the point at infinity; callers
            // that care should have filtered non-finite input already.
            return SpherePoint {
                num: Complex64::new(1.0, 0.0),
                den: Complex64::new(0.0, 0.0),
            };
        }
        SpherePoint {
            num: num / scale,
            den: den / scale,
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            Self::new(z, Complex64::new(1.0, 0.0))
        } else {
            Self::infinity()
        }
    }

    pub fn infinity() -> Self {
        SpherePoint {
            num: Complex64::new(1.0, 0.0),
            den: Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.den.norm() < 1e-300
    }

    /// Finite representative, if the point is not (numerically) infinity.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.is_infinity() {
            None
        } else {
            Some(self.num / self.den)
        }
    }

    /// Euclidean coordinates on the unit sphere (stereographic model).
    pub fn embed(&self) -> [f64; 3] {
        let n2 = self.num.norm_sqr();
        let d2 = self.den.norm_sqr();
        let s = n2 + d2;
        let w = self.num * self.den.conj();
        [2.0 * w.re / s, 2.0 * w.im / s, (n2 - d2) / s]
    }

    /// Chordal distance in the stereographic embedding (diameter 2).
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        let cross = self.num * other.den - other.num * self.den;
        let a = (self.num.norm_sqr() + self.den.norm_sqr()).sqrt();
        let b = (other.num.norm_sqr() + other.den.norm_sqr()).sqrt();
        2.0 * cross.norm() / (a * b)
    }

    /// Round (great-circle) distance, diameter π.
    pub fn round_distance(&self, other: &Self) -> f64 {
        let half = (self.chordal_distance(other) / 2.0).clamp(-1.0, 1.0);
        2.0 * half.asin()
    }
}

/// A Möbius transformation `z ↦ (az + b)/(cz + d)` with `ad - bc = 1`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusMap {
    /// Builds the map from arbitrary entries, rescaling to determinant one.
    /// The overall sign of the entries stays ambiguous (±M act identically).
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(Error::degenerate(
                "matrix with vanishing determinant is not a Möbius map",
            ));
        }
        let s = det.sqrt();
        Ok(MobiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// The dilation `z ↦ λ z`.
    pub fn scaling(lambda: Complex64) -> Result<Self> {
        Self::new(
            lambda,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    /// The translation `z ↦ z + t`.
    pub fn translation(t: Complex64) -> Self {
        MobiusMap {
            a: Complex64::new(1.0, 0.0),
            b: t,
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// `trace²` is well defined on the ±M ambiguity class and is the
    /// classification invariant.
    pub fn trace_squared(&self) -> Complex64 {
        let t = self.trace();
        t * t
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        MobiusMap {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> Self {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = MobiusMap::identity();
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        SpherePoint::new(
            self.a * p.num + self.b * p.den,
            self.c * p.num + self.d * p.den,
        )
    }

    pub fn apply_complex(&self, z: Complex64) -> SpherePoint {
        self.apply(SpherePoint::from_complex(z))
    }

    /// Largest entry modulus of `self - other` (same-sign comparison).
    pub fn entry_distance(&self, other: &Self) -> f64 {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ]
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max)
    }

    /// Distance to ±identity, minimized over the sign.
    pub fn distance_to_unit(&self) -> f64 {
        let id = MobiusMap::identity();
        let neg = MobiusMap {
            a: -id.a,
            b: id.b,
            c: id.c,
            d: -id.d,
        };
        self.entry_distance(&id).min(self.entry_distance(&neg))
    }

    pub fn max_entry_norm(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    /// Fixed points on the sphere. Parabolic maps return the double fixed
    /// point twice.
    pub fn fixed_points(&self) -> [SpherePoint; 2] {
        if self.c.norm() < 1e-300 {
            // Infinity is fixed; the other fixed point solves (a-d) z = -b.
            let inf = SpherePoint::infinity();
            if (self.a - self.d).norm() < 1e-300 {
                return [inf, inf];
            }
            let z = -self.b / (self.a - self.d);
            return [SpherePoint::from_complex(z), inf];
        }
        // c z^2 + (d - a) z - b = 0
        let disc = ((self.d - self.a) * (self.d - self.a)
            + 4.0 * self.b * self.c)
            .sqrt();
        let z1 = (self.a - self.d + disc) / (2.0 * self.c);
        let z2 = (self.a - self.d - disc) / (2.0 * self.c);
        [SpherePoint::from_complex(z1), SpherePoint::from_complex(z2)]
    }

    /// A determinant-one map sending the given point to infinity.
    pub fn sending_to_infinity(p: SpherePoint) -> Result<Self> {
        if p.is_infinity() {
            return Ok(MobiusMap::identity());
        }
        // Second row annihilates p; first row chosen for conditioning.
        let (r21, r22) = (p.den, -p.num);
        let (r11, r12) = (p.num.conj(), p.den.conj());
        Self::new(r11, r12, r21, r22)
    }

    /// Expands the map as a power series about `center` (which must avoid
    /// the pole `-d/c`).
    pub fn to_series(&self, center: Complex64, order: usize) -> Result<LaurentSeries> {
        let denom_at = self.c * center + self.d;
        if denom_at.norm() < 1e-12 {
            return Err(Error::input(
                "series expansion of a Möbius map centered at its pole",
            ));
        }
        // (a z + b)/(c z + d) with z = center + t:
        // numerator: a t + (a center + b), denominator: c t + (c center + d)
        let num = LaurentSeries::from_terms(
            center,
            &[(0, self.a * center + self.b), (1, self.a)],
        );
        let den = LaurentSeries::from_terms(
            center,
            &[(0, denom_at), (1, self.c)],
        );
        let q = num.multiply(&den.reciprocal()?)?;
        Ok(q.truncated(order as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn determinant_is_normalized() {
        let m = MobiusMap::new(c64(3.0, 1.0), c64(0.5, 0.0), c64(0.0, 2.0), c64(1.0, -1.0))
            .unwrap();
        assert!((m.det() - c64(1.0, 0.0)).norm() < DET_TOL);
    }

    #[test]
    fn apply_handles_pole_and_infinity() {
        let m = MobiusMap::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0))
            .unwrap(); // z/(z-1)
        let at_pole = m.apply_complex(c64(1.0, 0.0));
        assert!(at_pole.is_infinity());
        let at_inf = m.apply(SpherePoint::infinity());
        assert!((at_inf.to_complex().unwrap() - c64(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn chordal_distance_basics() {
        let zero = SpherePoint::from_complex(c64(0.0, 0.0));
        let inf = SpherePoint::infinity();
        assert!((zero.chordal_distance(&inf) - 2.0).abs() < 1e-14);
        assert!((zero.round_distance(&inf) - std::f64::consts::PI).abs() < 1e-12);
        let one = SpherePoint::from_complex(c64(1.0, 0.0));
        assert!((zero.round_distance(&one) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_to_infinity_conjugation() {
        // Parabolic with fixed point at 2: conjugate of z+1 by a map
        // sending infinity to 2.
        let pivot = MobiusMap::new(c64(2.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0))
            .unwrap(); // (2z+1)/z, maps ∞ ↦ 2
        let m = pivot
            .compose(&MobiusMap::translation(c64(1.0, 0.0)))
            .compose(&pivot.inverse());
        let [p, q] = m.fixed_points();
        assert!((p.to_complex().unwrap() - c64(2.0, 0.0)).norm() < 1e-9);
        assert!((q.to_complex().unwrap() - c64(2.0, 0.0)).norm() < 1e-9);
        let frame = MobiusMap::sending_to_infinity(p).unwrap();
        let normalized = frame.compose(&m).compose(&frame.inverse());
        assert!(normalized.c.norm() < 1e-9, "normalized map fixes infinity");
    }

    #[test]
    fn series_expansion_matches_pointwise() {
        let m = MobiusMap::new(c64(2.0, 0.0), c64(1.0, 1.0), c64(0.3, 0.0), c64(1.0, 0.0))
            .unwrap();
        let s = m.to_series(c64(0.1, 0.2), 20).unwrap();
        let z = c64(0.15, 0.18);
        let direct = (m.a * z + m.b) / (m.c * z + m.d);
        assert!((s.evaluate(z).unwrap() - direct).norm() < 1e-12);
    }
}
