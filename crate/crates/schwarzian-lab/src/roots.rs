//! Durand–Kerner root finder for small complex polynomials. Used to locate
//! the zeros of `φ'` so that the apparent double poles of the Schwarzian
//! coefficient can be declared to the continuation engine.

use num_complex::Complex64;

/// Roots of `Σ coeffs[k] z^k` (ascending powers, `coeffs.last() != 0`).
/// Plain simultaneous iteration; fine for the low degrees that arise here.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut cs: Vec<Complex64> = coeffs.to_vec();
    while let Some(last) = cs.last() {
        if last.norm() > 1e-300 {
            break;
        }
        cs.pop();
    }
    let n = match cs.len() {
        0 | 1 => return Vec::new(),
        n => n - 1,
    };
    let lead = cs[n];
    let monic: Vec<Complex64> = cs.iter().map(|c| c / lead).collect();
    // Cauchy bound for the root radius.
    let bound = 1.0
        + monic[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|i| seed.powu(i as u32 + 1) * bound / seed.norm().powi(i as i32 + 1) * 0.7)
        .collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            max_step = max_step.max(delta.norm());
        }
        if max_step < 1e-13 * bound {
            break;
        }
    }
    roots
}
