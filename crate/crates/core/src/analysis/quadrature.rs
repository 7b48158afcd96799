use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Composite Simpson 1/3 rule with `panels` subintervals (must be even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> Result<f64> {
    if panels == 0 || panels % 2 != 0 {
        return Err(Error::Config(format!("Simpson's rule needs an even, positive panel count, got {panels}")));
    }
    let h = (b - a) / panels as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..panels {
        let y = f(a + h * k as f64);
        if k % 2 == 1 {
            odd += y;
        } else {
            even += y;
        }
    }
    Ok(h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even))
}

/// Panel count for θ averages.
pub const THETA_PANELS: usize = 2048;
/// Panel count per axis for sphere averages.
pub const SPHERE_PANELS: usize = 512;

fn simpson_weights(a: f64, b: f64, panels: usize) -> Result<Vec<f64>> {
    if panels == 0 || panels % 2 != 0 {
        return Err(Error::Config(format!("Simpson's rule needs an even, positive panel count, got {panels}")));
    }
    let h = (b - a) / panels as f64;
    Ok((0..=panels)
        .map(|k| {
            let w = if k == 0 || k == panels { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            w * h / 3.0
        })
        .collect())
}

/// `(1/4π) ∬ f(θ, φ) sin θ dθ dφ` over the unit sphere, product Simpson rule.
pub fn bloch_average_2d<F: Fn(f64, f64) -> f64>(f: F, panels: usize) -> Result<f64> {
    let wt = simpson_weights(0.0, PI, panels)?;
    let wp = simpson_weights(0.0, 2.0 * PI, panels)?;
    let ht = PI / panels as f64;
    let hp = 2.0 * PI / panels as f64;
    let mut total = 0.0;
    for (i, wi) in wt.iter().enumerate() {
        let theta = ht * i as f64;
        let row: f64 = wp.iter().enumerate().map(|(j, wj)| wj * f(theta, hp * j as f64)).sum();
        total += wi * theta.sin() * row;
    }
    Ok(total / (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 2).unwrap();
        assert!((v - (15.0 / 4.0 - 3.0 + 3.0)).abs() < 1e-14);
        assert!(simpson(|x| x, 0.0, 1.0, 3).is_err());
        assert!(simpson(|x| x, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn sphere_moments() {
        let one = bloch_average_2d(|_, _| 1.0, SPHERE_PANELS).unwrap();
        assert!((one - 1.0).abs() < 1e-10);
        let x2 = bloch_average_2d(|t, p| (t.sin() * p.cos()).powi(2), SPHERE_PANELS).unwrap();
        assert!((x2 - 1.0 / 3.0).abs() < 1e-10);
        let z = bloch_average_2d(|t, _| t.cos(), 64).unwrap();
        assert!(z.abs() < 1e-12);
    }
}
