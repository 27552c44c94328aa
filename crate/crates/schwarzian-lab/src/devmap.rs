//! Evaluable developing maps on slit domains.
//!
//! A [`DevelopingMap`] produces sphere values at points of a disc slit along
//! the ray of angle `θ`; the branch of every multivalued ingredient
//! (logarithms, complex powers) is fixed by taking arguments in
//! `(θ, θ + 2π]`. Closed forms cover the model families and the synthetic
//! probe cases; ODE-backed maps evaluate by continuing the fundamental pair
//! from a base point placed opposite the slit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mobius::{MobiusMap, SpherePoint};
use crate::ode::{FundamentalPair, StepControl, XiCoefficient};
use crate::series::LaurentSeries;

/// Argument of `z` in the branch window `(theta, theta + 2π]`.
pub fn slit_argument(z: Complex64, theta: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let mut a = z.im.atan2(z.re);
    while a <= theta {
        a += tau;
    }
    while a > theta + tau {
        a -= tau;
    }
    a
}

/// Logarithm with the branch cut along the ray of angle `theta`.
pub fn slit_log(z: Complex64, theta: f64) -> Complex64 {
    Complex64::new(z.norm().ln(), slit_argument(z, theta))
}

/// `z^alpha` on the slit branch, with graceful overflow to `0`/`∞`.
pub fn slit_power(z: Complex64, alpha: Complex64, theta: f64) -> SpherePoint {
    let w = alpha * slit_log(z, theta);
    if w.re > 700.0 {
        return SpherePoint::infinity();
    }
    if w.re < -700.0 {
        return SpherePoint::from_complex(Complex64::new(0.0, 0.0));
    }
    SpherePoint::from_complex(w.exp())
}

/// Closed-form developing maps and probe subjects.
#[derive(Clone, Debug)]
pub enum ClosedMap {
    /// The identity chart `z`.
    Identity,
    /// `z^alpha` on the slit branch.
    Power { alpha: Complex64 },
    /// `exp(z)`.
    Exp,
    /// `z ↦ z²` (the model non-injective map).
    Square,
    /// A finite Laurent polynomial evaluated directly.
    Series(LaurentSeries),
    /// `g(z) + (c/2πi)·ln(z/z0)` with `g` a finite Laurent polynomial.
    LogPlusSeries {
        g: LaurentSeries,
        c: Complex64,
        z0: Complex64,
    },
    /// `sin(1/z)`: the synthetic essential singularity.
    SinRecip,
    /// `h(z)·z^alpha` on the slit branch.
    PowerForm {
        h: Box<ClosedMap>,
        alpha: Complex64,
    },
}

impl ClosedMap {
    pub fn eval(&self, z: Complex64, theta: f64) -> Result<SpherePoint> {
        Ok(match self {
            ClosedMap::Identity => SpherePoint::from_complex(z),
            ClosedMap::Power { alpha } => slit_power(z, *alpha, theta),
            ClosedMap::Exp => {
                if z.re > 700.0 {
                    SpherePoint::infinity()
                } else {
                    SpherePoint::from_complex(z.exp())
                }
            }
            ClosedMap::Square => SpherePoint::from_complex(z * z),
            ClosedMap::Series(s) => SpherePoint::from_complex(s.evaluate(z)?),
            ClosedMap::LogPlusSeries { g, c, z0 } => {
                let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
                let log_term = slit_log(z, theta) - z0.ln();
                SpherePoint::from_complex(g.evaluate(z)? + c / two_pi_i * log_term)
            }
            ClosedMap::SinRecip => {
                let w = 1.0 / z;
                if w.im.abs() > 700.0 {
                    SpherePoint::infinity()
                } else {
                    SpherePoint::from_complex(w.sin())
                }
            }
            ClosedMap::PowerForm { h, alpha } => {
                let hv = h.eval(z, theta)?;
                let p = slit_power(z, *alpha, theta);
                match (hv.to_complex(), p.to_complex()) {
                    (Some(a), Some(b)) => SpherePoint::from_complex(a * b),
                    (None, Some(b)) if b.norm() > 0.0 => SpherePoint::infinity(),
                    (Some(a), None) if a.norm() > 0.0 => SpherePoint::infinity(),
                    _ => SpherePoint::infinity(),
                }
            }
        })
    }

    /// Derivative where the map is finite; used by the collision polish.
    pub fn eval_derivative(&self, z: Complex64, theta: f64) -> Result<Complex64> {
        Ok(match self {
            ClosedMap::Identity => Complex64::new(1.0, 0.0),
            ClosedMap::Power { alpha } => {
                let v = slit_power(z, *alpha - Complex64::new(1.0, 0.0), theta)
                    .to_complex()
                    .ok_or_else(|| Error::numerical(z, "power derivative overflow"))?;
                alpha * v
            }
            ClosedMap::Exp => z.exp(),
            ClosedMap::Square => 2.0 * z,
            ClosedMap::Series(s) => s.derivative().evaluate(z)?,
            ClosedMap::LogPlusSeries { g, c, z0: _ } => {
                let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
                g.derivative().evaluate(z)? + c / two_pi_i / z
            }
            ClosedMap::SinRecip => {
                let w = 1.0 / z;
                -w.cos() * w * w
            }
            ClosedMap::PowerForm { h, alpha } => {
                let hv = h
                    .eval(z, theta)?
                    .to_complex()
                    .ok_or_else(|| Error::numerical(z, "power-form overflow"))?;
                let hp = h.eval_derivative(z, theta)?;
                let p = slit_power(z, *alpha, theta)
                    .to_complex()
                    .ok_or_else(|| Error::numerical(z, "power-form overflow"))?;
                hp * p + hv * alpha * p / z
            }
        })
    }
}

/// A developing map evaluable on slit domains: either closed-form or backed
/// by continuation of the fundamental pair of `u'' + ξu/2 = 0`.
#[derive(Clone, Debug)]
pub enum DevelopingMap {
    Closed(ClosedMap),
    Ode(OdeDevelopingMap),
}

impl DevelopingMap {
    pub fn eval(&self, z: Complex64, theta: f64) -> Result<SpherePoint> {
        match self {
            DevelopingMap::Closed(f) => f.eval(z, theta),
            DevelopingMap::Ode(o) => o.eval(z, theta),
        }
    }

    pub fn eval_derivative(&self, z: Complex64, theta: f64) -> Result<Complex64> {
        match self {
            DevelopingMap::Closed(f) => f.eval_derivative(z, theta),
            DevelopingMap::Ode(o) => o.eval_derivative(z, theta),
        }
    }
}

/// ODE-backed developing map: the quotient `F ∘ (u1/u2)` of the pair
/// continued from a base point, optionally post-composed with a frame `F`.
#[derive(Clone, Debug)]
pub struct OdeDevelopingMap {
    pub xi: XiCoefficient,
    pub singularities: Vec<Complex64>,
    pub base_radius: f64,
    pub frame: MobiusMap,
    pub ctrl: StepControl,
}

impl OdeDevelopingMap {
    pub fn new(xi: XiCoefficient, singularities: Vec<Complex64>, base_radius: f64) -> Self {
        OdeDevelopingMap {
            xi,
            singularities,
            base_radius,
            frame: MobiusMap::identity(),
            ctrl: StepControl::default(),
        }
    }

    /// Continues the pair from the base point (placed opposite the slit) to
    /// `z` along an arc-then-ray path inside the slit domain.
    fn continue_to(&self, z: Complex64, theta: f64) -> Result<FundamentalPair> {
        let base_angle = theta + std::f64::consts::PI;
        let base = Complex64::from_polar(self.base_radius, base_angle);
        let mut state = FundamentalPair::standard(base);
        let mut steps = 0usize;
        // Arc at the base radius from the base angle to the argument of z,
        // staying inside the branch window, then a radial segment.
        let target_angle = slit_argument(z, theta);
        let n_arc = ((target_angle - base_angle).abs() / 0.2).ceil().max(1.0) as usize;
        for j in 1..=n_arc {
            let ang = base_angle + (target_angle - base_angle) * (j as f64) / (n_arc as f64);
            let wp = Complex64::from_polar(self.base_radius, ang);
            crate::ode::continue_segment(
                &self.xi,
                &self.singularities,
                &mut state,
                wp,
                &self.ctrl,
                &mut steps,
            )?;
        }
        crate::ode::continue_segment(
            &self.xi,
            &self.singularities,
            &mut state,
            z,
            &self.ctrl,
            &mut steps,
        )?;
        Ok(state)
    }

    pub fn eval(&self, z: Complex64, theta: f64) -> Result<SpherePoint> {
        let pair = self.continue_to(z, theta)?;
        Ok(self.frame.apply(pair.quotient()))
    }

    pub fn eval_derivative(&self, z: Complex64, theta: f64) -> Result<Complex64> {
        let pair = self.continue_to(z, theta)?;
        // q' = -W/u2²; frame applied via the chain rule.
        let w = pair.wronskian();
        let qp = -w / (pair.u2 * pair.u2);
        let q = pair.u1 / pair.u2;
        let den = self.frame.c * q + self.frame.d;
        Ok(qp / (den * den))
    }

    /// Evaluates a full log-polar grid by sweeping the arc once and running
    /// radial continuations per angle; one entry per `(radius, angle)` pair
    /// in row-major order (radius outer).
    pub fn eval_grid(
        &self,
        radii: &[f64],
        angles: &[f64],
        theta: f64,
    ) -> Result<Vec<SpherePoint>> {
        // Continue around the arc at base_radius, storing the pair at every
        // requested angle.
        let base_angle = theta + std::f64::consts::PI;
        let base = Complex64::from_polar(self.base_radius, base_angle);
        let mut per_angle: Vec<Option<FundamentalPair>> = vec![None; angles.len()];
        let mut order: Vec<usize> = (0..angles.len()).collect();
        order.sort_by(|&i, &j| {
            let di = (slit_argument_from(angles[i], theta) - base_angle).abs();
            let dj = (slit_argument_from(angles[j], theta) - base_angle).abs();
            di.partial_cmp(&dj).unwrap()
        });
        // Two sweeps: angles above and below the base angle, each continued
        // incrementally from the previous stop.
        for side in [false, true] {
            let mut state = FundamentalPair::standard(base);
            let mut steps = 0usize;
            let mut current_angle = base_angle;
            for &i in &order {
                let ang = slit_argument_from(angles[i], theta);
                if (ang >= base_angle) != side {
                    continue;
                }
                let n_arc = ((ang - current_angle).abs() / 0.2).ceil().max(1.0) as usize;
                for j in 1..=n_arc {
                    let a = current_angle + (ang - current_angle) * (j as f64) / (n_arc as f64);
                    let wp = Complex64::from_polar(self.base_radius, a);
                    crate::ode::continue_segment(
                        &self.xi,
                        &self.singularities,
                        &mut state,
                        wp,
                        &self.ctrl,
                        &mut steps,
                    )?;
                }
                current_angle = ang;
                per_angle[i] = Some(state);
            }
        }
        // Radial sweeps per angle, visiting radii sorted by distance from
        // the base radius.
        let mut radius_order: Vec<usize> = (0..radii.len()).collect();
        radius_order.sort_by(|&i, &j| {
            let di = (radii[i] - self.base_radius).abs();
            let dj = (radii[j] - self.base_radius).abs();
            di.partial_cmp(&dj).unwrap()
        });
        let rows = crate::parallel::par_map(&(0..angles.len()).collect::<Vec<_>>(), |&ai| {
            let ang = slit_argument_from(angles[ai], theta);
            let anchor = per_angle[ai].expect("angle sweep covered all angles");
            let mut out = vec![SpherePoint::infinity(); radii.len()];
            let mut inward: Vec<usize> = radius_order
                .iter()
                .copied()
                .filter(|&ri| radii[ri] <= self.base_radius)
                .collect();
            let outward: Vec<usize> = radius_order
                .iter()
                .copied()
                .filter(|&ri| radii[ri] > self.base_radius)
                .collect();
            inward.sort_by(|&i, &j| radii[j].partial_cmp(&radii[i]).unwrap());
            for list in [inward, outward] {
                let mut s = anchor;
                let mut n = 0usize;
                for ri in list {
                    let target = Complex64::from_polar(radii[ri], ang);
                    crate::ode::continue_segment(
                        &self.xi,
                        &self.singularities,
                        &mut s,
                        target,
                        &self.ctrl,
                        &mut n,
                    )?;
                    out[ri] = self.frame.apply(s.quotient());
                }
            }
            Ok(out)
        });
        let mut grid = vec![SpherePoint::infinity(); radii.len() * angles.len()];
        for (ai, row) in rows.into_iter().enumerate() {
            let row = row?;
            for (ri, v) in row.into_iter().enumerate() {
                grid[ri * angles.len() + ai] = v;
            }
        }
        Ok(grid)
    }
}

fn slit_argument_from(angle: f64, theta: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let mut a = angle;
    while a <= theta {
        a += tau;
    }
    while a > theta + tau {
        a -= tau;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn slit_branch_windows() {
        let theta = 3.0 * std::f64::consts::FRAC_PI_2;
        // positive real axis: argument 2π in the window (3π/2, 7π/2]
        let a = slit_argument(c64(1.0, 0.0), theta);
        assert!((a - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        // negative real axis: argument 3π
        let b = slit_argument(c64(-1.0, 0.0), theta);
        assert!((b - 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn square_root_branch_continuous_off_slit() {
        let theta = 0.0;
        let f = ClosedMap::Power {
            alpha: c64(0.5, 0.0),
        };
        // just above and below the positive real axis differ (the slit)
        let above = f.eval(c64(1.0, 1e-9), theta).unwrap().to_complex().unwrap();
        let below = f.eval(c64(1.0, -1e-9), theta).unwrap().to_complex().unwrap();
        assert!((above - below).norm() > 1.9, "slit discontinuity expected");
        // continuous across the negative real axis
        let left_up = f.eval(c64(-1.0, 1e-9), theta).unwrap().to_complex().unwrap();
        let left_dn = f.eval(c64(-1.0, -1e-9), theta).unwrap().to_complex().unwrap();
        assert!((left_up - left_dn).norm() < 1e-6);
    }

    #[test]
    fn sin_recip_overflows_to_infinity() {
        let f = ClosedMap::SinRecip;
        let v = f.eval(c64(0.0, 1e-5), 0.0).unwrap();
        assert!(v.is_infinity());
        let on_axis = f.eval(c64(1.0 / std::f64::consts::PI, 0.0), 0.0).unwrap();
        assert!(on_axis.to_complex().unwrap().norm() < 1e-9);
    }

    #[test]
    fn ode_map_matches_closed_power() {
        // θ = 1/2 family: the ODE quotient is z^{1/2} up to a Möbius map.
        // Check it through the Schwarzian instead: S(q) = ξ at a point.
        let theta = c64(0.5, 0.0);
        let coeff = (Complex64::new(1.0, 0.0) - theta * theta) / 2.0;
        let xi = XiCoefficient::Laurent(LaurentSeries::monomial(c64(0.0, 0.0), -2, coeff));
        let dev = OdeDevelopingMap::new(xi, vec![c64(0.0, 0.0)], 0.5);
        let slit = 3.0 * std::f64::consts::FRAC_PI_2;
        // Evaluate at a few points and verify the cross-ratio matches that
        // of z^{1/2} values (cross-ratios are Möbius invariants).
        let pts = [
            c64(0.45, 0.05),
            c64(0.3, 0.2),
            c64(-0.2, 0.25),
            c64(0.1, -0.35),
        ];
        let dv: Vec<Complex64> = pts
            .iter()
            .map(|&z| dev.eval(z, slit).unwrap().to_complex().unwrap())
            .collect();
        let sq: Vec<Complex64> = pts
            .iter()
            .map(|&z| {
                slit_power(z, c64(0.5, 0.0), slit)
                    .to_complex()
                    .unwrap()
            })
            .collect();
        let cross = |v: &[Complex64]| {
            (v[0] - v[2]) * (v[1] - v[3]) / ((v[1] - v[2]) * (v[0] - v[3]))
        };
        assert!(
            (cross(&dv) - cross(&sq)).norm() < 1e-7,
            "cross-ratios differ: {} vs {}",
            cross(&dv),
            cross(&sq)
        );
    }

    #[test]
    fn ode_grid_agrees_with_pointwise() {
        let theta = c64(1.0 / 3.0, 0.0);
        let coeff = (Complex64::new(1.0, 0.0) - theta * theta) / 2.0;
        let xi = XiCoefficient::Laurent(LaurentSeries::monomial(c64(0.0, 0.0), -2, coeff));
        let dev = OdeDevelopingMap::new(xi, vec![c64(0.0, 0.0)], 0.4);
        let slit = 0.0;
        let radii = [0.3, 0.4, 0.55];
        let angles = [1.0, 2.5, 4.0, 5.5];
        let grid = dev.eval_grid(&radii, &angles, slit).unwrap();
        for (ri, &r) in radii.iter().enumerate() {
            for (ai, &a) in angles.iter().enumerate() {
                let z = Complex64::from_polar(r, a);
                let direct = dev.eval(z, slit).unwrap();
                let from_grid = grid[ri * angles.len() + ai];
                assert!(
                    direct.round_distance(&from_grid) < 1e-8,
                    "grid/pointwise mismatch at r={r} a={a}: {:.3e}",
                    direct.round_distance(&from_grid)
                );
            }
        }
    }
}
