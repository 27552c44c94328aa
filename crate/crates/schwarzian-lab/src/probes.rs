//! Numerical certificates and counterexample witnesses for developing maps:
//! grid injectivity probes on slit discs, the quarter-theorem collision
//! construction for principal parts of order two and higher, and the
//! contraction probe that estimates the accumulation set at the puncture.
//!
//! Probes are evidence, not proofs: a `Pass` means no collision was found at
//! the stated resolution, and every verdict carries that resolution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::devmap::{slit_log, DevelopingMap};
use crate::error::{Error, Result};
use crate::mobius::SpherePoint;
use crate::parallel::par_map;
use crate::series::LaurentSeries;

/// Annulus minus the ray of angle `theta`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SlitDisc {
    pub theta: f64,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl SlitDisc {
    pub fn new(theta: f64, r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner > 0.0 && r_inner < r_outer && r_outer <= 1.0) {
            return Err(Error::input(
                "slit disc needs 0 < r_inner < r_outer <= 1",
            ));
        }
        Ok(SlitDisc {
            theta,
            r_inner,
            r_outer,
        })
    }
}

/// Annulus sector `r < |z| < R`, argument in `(theta + t, theta + 2π - t)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AnnulusSector {
    pub r: f64,
    pub big_r: f64,
    pub theta: f64,
    pub t: f64,
}

impl AnnulusSector {
    pub fn new(r: f64, big_r: f64, theta: f64, t: f64) -> Result<Self> {
        if !(r > 0.0 && r < big_r && big_r < 1.0 && t > 0.0 && t < std::f64::consts::PI) {
            return Err(Error::input(
                "annulus sector needs 0 < r < R < 1 and 0 < t < π",
            ));
        }
        Ok(AnnulusSector { r, big_r, theta, t })
    }

    /// Contraction ratio of the self-map that pushes the sector inward.
    pub fn contraction(&self) -> f64 {
        self.r / self.big_r
    }
}

/// A limit value on the sphere.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitPoint {
    Finite(Complex64),
    Infinity,
}

impl LimitPoint {
    fn from_sphere(p: &SpherePoint) -> Self {
        match p.to_complex() {
            Some(w) if w.norm() < 1e8 => LimitPoint::Finite(w),
            _ => LimitPoint::Infinity,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ProbeOutcome {
    /// No collision at this resolution.
    Pass,
    /// Verified near-collision: two separated points with (spherically)
    /// indistinguishable images.
    Collision {
        z1: Complex64,
        z2: Complex64,
        image_distance: f64,
    },
    /// The sampled images contract to a point of the sphere.
    Limit { point: LimitPoint, spread: f64 },
    /// The deepest sampled level still has this spherical diameter.
    Spread { diameter: f64 },
    /// The construction did not fire in the searched range; reported rather
    /// than passed.
    Inconclusive { reason: String },
    /// Evaluation failed beyond this contraction depth.
    TruncatedDepth { reached: usize },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ProbeResolution {
    pub grid_n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annulus: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeVerdict {
    pub outcome: ProbeOutcome,
    pub samples_used: usize,
    pub resolution: ProbeResolution,
}

/// Spherical distance below which two images count as colliding.
pub const IMAGE_COLLISION_TOL: f64 = 1e-10;
/// Witness pairs must be separated by this fraction of their magnitude.
pub const DOMAIN_SEPARATION_REL: f64 = 1e-3;

fn newton_collide(
    dev: &DevelopingMap,
    theta: f64,
    z1: Complex64,
    start: Complex64,
) -> Option<Complex64> {
    let target = dev.eval(z1, theta).ok()?;
    let target_c = target.to_complex()?;
    let reciprocal_chart = target_c.norm() > 1e3;
    let goal = if reciprocal_chart {
        1.0 / target_c
    } else {
        target_c
    };
    let mut z = start;
    for _ in 0..60 {
        let f = dev.eval(z, theta).ok()?.to_complex()?;
        let fp = dev.eval_derivative(z, theta).ok()?;
        let (val, der) = if reciprocal_chart {
            (1.0 / f, -fp / (f * f))
        } else {
            (f, fp)
        };
        if der.norm() < 1e-300 {
            return None;
        }
        let delta = (val - goal) / der;
        z -= delta;
        if delta.norm() < 1e-14 * z.norm().max(1e-12) {
            return Some(z);
        }
    }
    None
}

fn verified_collision(
    dev: &DevelopingMap,
    theta: f64,
    z1: Complex64,
    z2: Complex64,
) -> Option<(Complex64, Complex64, f64)> {
    if (z1 - z2).norm() <= DOMAIN_SEPARATION_REL * z1.norm().max(z2.norm()) {
        return None;
    }
    let a = dev.eval(z1, theta).ok()?;
    let b = dev.eval(z2, theta).ok()?;
    let spherical = a.round_distance(&b);
    if spherical >= IMAGE_COLLISION_TOL {
        return None;
    }
    // On top of the spherical check, demand a relative Euclidean collision
    // when both values are finite, so that merely-huge values cannot fake a
    // witness through chordal compression.
    if let (Some(va), Some(vb)) = (a.to_complex(), b.to_complex()) {
        if (va - vb).norm() > 1e-10 * va.norm().max(1.0) {
            return None;
        }
    }
    Some((z1, z2, spherical))
}

/// Scans a log-polar grid on the slit disc for image collisions under the
/// spherical metric, prunes candidates by spatial hashing, polishes each
/// candidate by a Newton solve, and returns the first verified witness.
pub fn probe_injectivity(
    dev: &DevelopingMap,
    domain: &SlitDisc,
    grid_n: usize,
) -> Result<ProbeVerdict> {
    if grid_n < 4 {
        return Err(Error::input("injectivity probe needs a grid of at least 4"));
    }
    let n = grid_n;
    let log_ratio = (domain.r_outer / domain.r_inner).ln();
    let radii: Vec<f64> = (0..n)
        .map(|i| domain.r_inner * (log_ratio * (i as f64 + 0.5) / n as f64).exp())
        .collect();
    let tau = 2.0 * std::f64::consts::PI;
    let angles: Vec<f64> = (0..n)
        .map(|j| domain.theta + tau * (j as f64 + 0.5) / n as f64)
        .collect();
    let points: Vec<Complex64> = radii
        .iter()
        .flat_map(|&r| angles.iter().map(move |&a| Complex64::from_polar(r, a)))
        .collect();

    let images: Vec<SpherePoint> = match dev {
        DevelopingMap::Ode(o) => o.eval_grid(&radii, &angles, domain.theta)?,
        DevelopingMap::Closed(f) => {
            let out = par_map(&points, |&z| f.eval(z, domain.theta));
            let mut imgs = Vec::with_capacity(out.len());
            for (i, v) in out.into_iter().enumerate() {
                imgs.push(v.map_err(|e| {
                    Error::numerical(points[i], format!("evaluation failed: {e}"))
                })?);
            }
            imgs
        }
    };

    // Local image resolution: distance to the angular neighbor.
    let embed: Vec<[f64; 3]> = images.iter().map(|p| p.embed()).collect();
    let chordal = |a: &[f64; 3], b: &[f64; 3]| -> f64 {
        let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    };
    let idx = |ri: usize, ai: usize| ri * n + ai;
    let mut local_res = vec![0.0f64; points.len()];
    for ri in 0..n {
        for ai in 0..n {
            let here = idx(ri, ai);
            let mut r = 0.0f64;
            if ai + 1 < n {
                r = r.max(chordal(&embed[here], &embed[idx(ri, ai + 1)]));
            }
            if ri + 1 < n {
                r = r.max(chordal(&embed[here], &embed[idx(ri + 1, ai)]));
            }
            local_res[here] = r;
        }
    }

    // Spatial hash on the sphere embedding.
    let mut cell = local_res.iter().copied().fold(0.0, f64::max) * 10.0;
    cell = cell.clamp(1e-6, 0.25);
    use std::collections::HashMap;
    let mut buckets: HashMap<(i32, i32, i32), Vec<usize>> = HashMap::new();
    let key = |e: &[f64; 3]| {
        (
            (e[0] / cell).floor() as i32,
            (e[1] / cell).floor() as i32,
            (e[2] / cell).floor() as i32,
        )
    };
    for (i, e) in embed.iter().enumerate() {
        buckets.entry(key(e)).or_default().push(i);
    }
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    let domain_spacing = |i: usize| {
        let r = points[i].norm();
        (r * tau / n as f64).max(r * log_ratio / n as f64)
    };
    for (k, members) in &buckets {
        let mut pool: Vec<usize> = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(v) = buckets.get(&(k.0 + dx, k.1 + dy, k.2 + dz)) {
                        pool.extend_from_slice(v);
                    }
                }
            }
        }
        for &i in members {
            for &j in &pool {
                if j <= i {
                    continue;
                }
                let img_d = chordal(&embed[i], &embed[j]);
                let threshold = 10.0 * local_res[i].max(local_res[j]);
                if img_d >= threshold {
                    continue;
                }
                let sep = (points[i] - points[j]).norm();
                if sep < 3.0 * domain_spacing(i).max(domain_spacing(j)) {
                    continue;
                }
                candidates.push((img_d, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    candidates.truncate(2000);

    for &(_, i, j) in &candidates {
        if let Some(z2) = newton_collide(dev, domain.theta, points[i], points[j]) {
            // keep the witness inside (a slight enlargement of) the domain
            let r2 = z2.norm();
            if r2 < domain.r_inner * 0.5 || r2 > domain.r_outer * 1.5 {
                continue;
            }
            if let Some((z1, z2, d)) = verified_collision(dev, domain.theta, points[i], z2) {
                return Ok(ProbeVerdict {
                    outcome: ProbeOutcome::Collision {
                        z1,
                        z2,
                        image_distance: d,
                    },
                    samples_used: points.len(),
                    resolution: ProbeResolution {
                        grid_n,
                        theta: Some(domain.theta),
                        annulus: Some([domain.r_inner, domain.r_outer]),
                        ..Default::default()
                    },
                });
            }
        }
    }
    Ok(ProbeVerdict {
        outcome: ProbeOutcome::Pass,
        samples_used: points.len(),
        resolution: ProbeResolution {
            grid_n,
            theta: Some(domain.theta),
            annulus: Some([domain.r_inner, domain.r_outer]),
            ..Default::default()
        },
    })
}

/// Collision witness for `φ = g + (c/2πi) ln z` when the principal part of
/// `g` has order two or more: near the puncture, rotating by the root of
/// unity `λ` of order `|k₀|` with smallest real part moves `φ` by
/// `O(ε^{k₀+1})` while the quarter theorem guarantees image balls of radius
/// `O(ε^{k₀})`, so the balls overlap and a genuine collision can be
/// polished out of the overlap.
pub fn koebe_witness(
    g: &LaurentSeries,
    c: Complex64,
    epsilons: &[f64],
) -> Result<ProbeVerdict> {
    if g.is_zero() || g.valuation() > -2 {
        return Err(Error::input(
            "collision construction needs a principal part of order at least two",
        ));
    }
    let k0 = g.valuation();
    let order = (-k0) as u32;
    // Root of unity with smallest real part; ties resolved upward.
    let mut lambda = Complex64::new(1.0, 0.0);
    for m in 0..order {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / order as f64);
        if w.re < lambda.re - 1e-12 || (w.re < lambda.re + 1e-12 && w.im > lambda.im) {
            lambda = w;
        }
    }
    let theta = 3.0 * std::f64::consts::FRAC_PI_2;
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let dev = DevelopingMap::Closed(crate::devmap::ClosedMap::LogPlusSeries {
        g: g.clone(),
        c,
        z0: Complex64::new(1.0, 0.0),
    });
    let gp = g.derivative();
    let phi = |z: Complex64| -> Result<Complex64> {
        Ok(g.evaluate(z)? + c / two_pi_i * slit_log(z, theta))
    };
    let phi_prime = |z: Complex64| -> Result<Complex64> { Ok(gp.evaluate(z)? + c / two_pi_i / z) };

    let mut tried = 0usize;
    for &eps in epsilons {
        tried += 1;
        let z1 = Complex64::new(eps, 0.0);
        let z2_seed = lambda * eps;
        let (f1, f2) = (phi(z1)?, phi(z2_seed)?);
        let r1 = eps / 8.0 * phi_prime(z1)?.norm();
        let r2 = eps / 8.0 * phi_prime(z2_seed)?.norm();
        if (f1 - f2).norm() >= r1 + r2 {
            continue; // quarter-theorem balls do not overlap yet
        }
        if let Some(z2) = newton_collide(&dev, theta, z1, z2_seed) {
            if (z2 - z2_seed).norm() > eps / 2.0 {
                continue; // left the second ball; not the constructed witness
            }
            if let Some((z1, z2, d)) = verified_collision(&dev, theta, z1, z2) {
                return Ok(ProbeVerdict {
                    outcome: ProbeOutcome::Collision {
                        z1,
                        z2,
                        image_distance: d,
                    },
                    samples_used: tried,
                    resolution: ProbeResolution {
                        grid_n: 0,
                        theta: Some(theta),
                        epsilons: Some(epsilons.to_vec()),
                        ..Default::default()
                    },
                });
            }
        }
    }
    Ok(ProbeVerdict {
        outcome: ProbeOutcome::Inconclusive {
            reason: "no overlapping image balls found across the epsilon range".into(),
        },
        samples_used: tried,
        resolution: ProbeResolution {
            grid_n: 0,
            theta: Some(theta),
            epsilons: Some(epsilons.to_vec()),
            ..Default::default()
        },
    })
}

fn level_points(sector: &AnnulusSector, grid_n: usize, scale: f64) -> Vec<Complex64> {
    let tau = 2.0 * std::f64::consts::PI;
    // An odd angular count puts a grid line exactly on the sector midline
    // (the direction opposite the slit). Oscillation along that direction is
    // exponentially thin at depth, so missing it would blind the probe.
    let n_ang = if grid_n % 2 == 0 { grid_n + 1 } else { grid_n };
    let mut pts = Vec::with_capacity(grid_n * n_ang);
    for i in 0..grid_n {
        let r = if grid_n == 1 {
            sector.r
        } else {
            sector.r + (sector.big_r - sector.r) * (i as f64) / (grid_n as f64 - 1.0)
        };
        for j in 0..n_ang {
            let a = sector.theta
                + sector.t
                + (tau - 2.0 * sector.t) * (j as f64) / (n_ang as f64 - 1.0);
            pts.push(Complex64::from_polar(r * scale, a));
        }
    }
    pts
}

fn spherical_stats(images: &[SpherePoint]) -> (f64, SpherePoint) {
    // Diameter over (a deterministic subsample of) the level, and the
    // normalized centroid in the sphere embedding.
    let cap = 600usize;
    let stride = (images.len() / cap).max(1);
    let sub: Vec<&SpherePoint> = images.iter().step_by(stride).collect();
    let mut diam = 0.0f64;
    for i in 0..sub.len() {
        for j in (i + 1)..sub.len() {
            diam = diam.max(sub[i].round_distance(sub[j]));
        }
    }
    let mut center = [0.0f64; 3];
    for p in images {
        let e = p.embed();
        center[0] += e[0];
        center[1] += e[1];
        center[2] += e[2];
    }
    let norm = (center[0] * center[0] + center[1] * center[1] + center[2] * center[2]).sqrt();
    let centroid = if norm < 1e-12 {
        SpherePoint::from_complex(Complex64::new(0.0, 0.0))
    } else {
        let e = [center[0] / norm, center[1] / norm, center[2] / norm];
        // invert the stereographic embedding
        if 1.0 - e[2] < 1e-12 {
            SpherePoint::infinity()
        } else {
            SpherePoint::from_complex(Complex64::new(e[0], e[1]) / (1.0 - e[2]))
        }
    };
    (diam, centroid)
}

/// Tolerance on the deepest-level spherical diameter for a `Limit` verdict.
pub const ACCUMULATION_LIMIT_TOL: f64 = 1e-3;

/// Samples `φ` on the contracted copies `s^k · sector` for `k` up to
/// `depth` and reports either the limit value (when the deepest level has
/// contracted below tolerance and consecutive levels agree) or the spread
/// that remains.
pub fn accumulation_probe(
    dev: &DevelopingMap,
    sector: &AnnulusSector,
    depth: usize,
    grid_n: usize,
) -> Result<ProbeVerdict> {
    let scale = sector.contraction();
    let mut stats = Vec::with_capacity(depth + 1);
    let mut samples_used = 0usize;
    for k in 0..=depth {
        let pts = level_points(sector, grid_n, scale.powi(k as i32));
        samples_used += pts.len();
        let evals = par_map(&pts, |&z| dev.eval(z, sector.theta));
        let mut images = Vec::with_capacity(pts.len());
        let mut failed = false;
        for v in evals {
            match v {
                Ok(p) => images.push(p),
                Err(_) => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            return Ok(ProbeVerdict {
                outcome: ProbeOutcome::TruncatedDepth { reached: k },
                samples_used,
                resolution: accumulation_resolution(sector, depth, grid_n),
            });
        }
        stats.push(spherical_stats(&images));
    }
    let (deepest_diam, deepest_center) = stats[depth].clone();
    let converging = depth >= 1
        && stats[depth - 1].1.round_distance(&deepest_center)
            < 10.0 * ACCUMULATION_LIMIT_TOL.max(deepest_diam);
    if deepest_diam < ACCUMULATION_LIMIT_TOL && converging {
        Ok(ProbeVerdict {
            outcome: ProbeOutcome::Limit {
                point: LimitPoint::from_sphere(&deepest_center),
                spread: deepest_diam,
            },
            samples_used,
            resolution: accumulation_resolution(sector, depth, grid_n),
        })
    } else {
        Ok(ProbeVerdict {
            outcome: ProbeOutcome::Spread {
                diameter: deepest_diam,
            },
            samples_used,
            resolution: accumulation_resolution(sector, depth, grid_n),
        })
    }
}

fn accumulation_resolution(sector: &AnnulusSector, depth: usize, grid_n: usize) -> ProbeResolution {
    ProbeResolution {
        grid_n,
        depth: Some(depth),
        theta: Some(sector.theta),
        annulus: Some([sector.r, sector.big_r]),
        sector_gap: Some(sector.t),
        ..Default::default()
    }
}

/// Accumulation probe applied to the multivalued form `f = H(z) · z^α` on
/// the slit branch; a `Spread` verdict is evidence against injectivity of
/// `f` on slit discs.
pub fn power_form_probe(
    h: &crate::devmap::ClosedMap,
    alpha: Complex64,
    sector: &AnnulusSector,
    depth: usize,
    grid_n: usize,
) -> Result<ProbeVerdict> {
    let f = DevelopingMap::Closed(crate::devmap::ClosedMap::PowerForm {
        h: Box::new(h.clone()),
        alpha,
    });
    accumulation_probe(&f, sector, depth, grid_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devmap::ClosedMap;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn origin() -> Complex64 {
        c64(0.0, 0.0)
    }

    fn default_domain() -> SlitDisc {
        SlitDisc::new(3.0 * std::f64::consts::FRAC_PI_2, 0.05, 0.9).unwrap()
    }

    #[test]
    fn identity_passes() {
        let dev = DevelopingMap::Closed(ClosedMap::Identity);
        let v = probe_injectivity(&dev, &default_domain(), 32).unwrap();
        assert!(matches!(v.outcome, ProbeOutcome::Pass));
    }

    #[test]
    fn reciprocal_passes() {
        let dev = DevelopingMap::Closed(ClosedMap::Series(LaurentSeries::monomial(
            origin(),
            -1,
            c64(1.0, 0.0),
        )));
        for n in [32, 64] {
            let v = probe_injectivity(&dev, &default_domain(), n).unwrap();
            assert!(
                matches!(v.outcome, ProbeOutcome::Pass),
                "1/z must pass at grid {n}: {:?}",
                v.outcome
            );
        }
    }

    #[test]
    fn square_collides_with_antipode() {
        let dev = DevelopingMap::Closed(ClosedMap::Square);
        let v = probe_injectivity(&dev, &default_domain(), 64).unwrap();
        match v.outcome {
            ProbeOutcome::Collision {
                z1,
                z2,
                image_distance,
            } => {
                assert!(image_distance < IMAGE_COLLISION_TOL);
                assert!(
                    (z1 + z2).norm() < 1e-6 * z1.norm(),
                    "witness should be antipodal: {z1} vs {z2}"
                );
            }
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn koebe_even_principal_part_fires() {
        // g = 1/z², c = 0: exact symmetric collision.
        let g = LaurentSeries::monomial(origin(), -2, c64(1.0, 0.0));
        let v = koebe_witness(&g, origin(), &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
        match v.outcome {
            ProbeOutcome::Collision { z1, z2, .. } => {
                assert!((z1 + z2).norm() < 1e-8 * z1.norm());
            }
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn koebe_with_log_term_fires_in_second_ball() {
        let g = LaurentSeries::monomial(origin(), -2, c64(1.0, 0.0));
        let c = c64(0.0, 2.0 * std::f64::consts::PI);
        let v = koebe_witness(&g, c, &[1e-2]).unwrap();
        match v.outcome {
            ProbeOutcome::Collision { z1, z2, .. } => {
                let eps = 1e-2;
                assert!((z1 - c64(eps, 0.0)).norm() < eps / 2.0);
                assert!((z2 + c64(eps, 0.0)).norm() < eps / 2.0);
            }
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn koebe_third_order_uses_rotated_pair() {
        let g = LaurentSeries::monomial(origin(), -3, c64(1.0, 0.0));
        let c = c64(0.0, 2.0 * std::f64::consts::PI);
        let v = koebe_witness(&g, c, &[1e-1, 1e-2, 1e-3]).unwrap();
        match v.outcome {
            ProbeOutcome::Collision { z1, z2, .. } => {
                let lambda = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
                let eps = z1.re;
                assert!((z2 - lambda * eps).norm() < eps / 2.0);
            }
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn koebe_rejects_simple_pole() {
        let g = LaurentSeries::monomial(origin(), -1, c64(1.0, 0.0));
        assert!(koebe_witness(&g, origin(), &[1e-2]).is_err());
    }

    #[test]
    fn accumulation_identity_contracts_to_zero() {
        let dev = DevelopingMap::Closed(ClosedMap::Identity);
        let sector = AnnulusSector::new(0.25, 0.5, 0.0, 0.1).unwrap();
        let v = accumulation_probe(&dev, &sector, 20, 8).unwrap();
        match v.outcome {
            ProbeOutcome::Limit { point, spread } => {
                assert!(spread < 1e-5);
                match point {
                    LimitPoint::Finite(w) => assert!(w.norm() < 1e-5),
                    LimitPoint::Infinity => panic!("limit should be 0"),
                }
            }
            other => panic!("expected limit, got {other:?}"),
        }
    }

    #[test]
    fn accumulation_pole_plus_log_goes_to_infinity() {
        let dev = DevelopingMap::Closed(ClosedMap::LogPlusSeries {
            g: LaurentSeries::monomial(origin(), -1, c64(1.0, 0.0)),
            c: c64(0.0, 2.0 * std::f64::consts::PI),
            z0: c64(1.0, 0.0),
        });
        let sector = AnnulusSector::new(0.25, 0.5, 0.0, 0.1).unwrap();
        let v = accumulation_probe(&dev, &sector, 20, 8).unwrap();
        match v.outcome {
            ProbeOutcome::Limit { point, spread } => {
                assert!(spread < 1e-3, "spread {spread}");
                assert!(matches!(point, LimitPoint::Infinity));
            }
            other => panic!("expected limit at infinity, got {other:?}"),
        }
    }

    #[test]
    fn accumulation_essential_singularity_spreads() {
        let dev = DevelopingMap::Closed(ClosedMap::SinRecip);
        // sector containing the positive real axis, where sin(1/z)
        // oscillates between 0 and ±1
        let sector = AnnulusSector::new(0.25, 0.5, std::f64::consts::PI, 0.1).unwrap();
        let v = accumulation_probe(&dev, &sector, 20, 8).unwrap();
        match v.outcome {
            ProbeOutcome::Spread { diameter } => {
                assert!(diameter > 0.5, "diameter {diameter}");
            }
            other => panic!("expected spread, got {other:?}"),
        }
    }

    #[test]
    fn power_form_probe_cases() {
        let sector = AnnulusSector::new(0.2, 0.5, std::f64::consts::PI, 0.1).unwrap();
        // H = 1, α = 1/2: contracts to 0.
        let one = ClosedMap::Series(LaurentSeries::one(origin()));
        let v = power_form_probe(&one, c64(0.5, 0.0), &sector, 20, 8).unwrap();
        assert!(matches!(
            v.outcome,
            ProbeOutcome::Limit {
                point: LimitPoint::Finite(_),
                ..
            }
        ));
        // H = exp, α = -1: the pole wins.
        let v = power_form_probe(&ClosedMap::Exp, c64(-1.0, 0.0), &sector, 20, 8).unwrap();
        assert!(matches!(
            v.outcome,
            ProbeOutcome::Limit {
                point: LimitPoint::Infinity,
                ..
            }
        ));
        // H = sin(1/z), α = 1: still spreads.
        let v = power_form_probe(&ClosedMap::SinRecip, c64(1.0, 0.0), &sector, 20, 8).unwrap();
        match v.outcome {
            ProbeOutcome::Spread { diameter } => assert!(diameter > 0.3, "diameter {diameter}"),
            other => panic!("expected spread, got {other:?}"),
        }
    }
}
