//! Reference eigenvalues of `−ℏ²/2m ψ″ + Vψ = Eψ` from a three-point
//! finite-difference discretization with Dirichlet walls, Sturm-sequence
//! bisection and Richardson extrapolation in the grid spacing.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// Lowest eigenvalues in increasing order (`n = 1, 2, …`).
    pub energies: Vec<f64>,
    pub half_width: f64,
    pub grid_points: usize,
    pub converged: bool,
}

const REL_TOL: f64 = 1e-8;
/// Wavefunctions must have decayed by `e^{−MIN_DECAY}` at the walls.
const MIN_DECAY: f64 = 20.0;
const MAX_POINTS: usize = 1 << 17;

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

struct Grid {
    diag: Vec<f64>,
    off: f64,
}

impl Grid {
    fn new(mass: f64, potential: &[f64], hbar: f64, half_width: f64, intervals: usize) -> Self {
        let h = 2.0 * half_width / intervals as f64;
        let kin = hbar * hbar / (2.0 * mass * h * h);
        let diag = (1..intervals).map(|i| 2.0 * kin + horner(potential, -half_width + i as f64 * h)).collect();
        Grid { diag, off: -kin }
    }

    /// Number of eigenvalues below `x`.
    fn count_below(&self, x: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut d = 1.0;
        for (i, a) in self.diag.iter().enumerate() {
            d = a - x - if i == 0 { 0.0 } else { off2 / d };
            if d == 0.0 {
                d = f64::EPSILON * (a.abs() + self.off.abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn eigenvalue(&self, k: usize) -> f64 {
        let lo0 = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * self.off.abs();
        let hi0 = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * self.off.abs();
        let (mut lo, mut hi) = (lo0, hi0);
        while hi - lo > 1e-15 * (lo.abs() + hi.abs()).max(1e-300) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn lowest(&self, levels: usize) -> Vec<f64> {
        (0..levels).map(|k| self.eigenvalue(k)).collect()
    }
}

/// The `levels` lowest eigenvalues, refined until successive Richardson
/// estimates agree to `1e−8` relative.
pub fn schrodinger_oracle(mass: f64, potential: &[f64], hbar: f64, levels: usize) -> Result<OracleResult> {
    let deg = potential.iter().rposition(|c| *c != 0.0).unwrap_or(0);
    if deg < 2 || deg % 2 == 1 || potential[deg] <= 0.0 {
        return Err(Error::NotConfining(format!("degree {deg} potential")));
    }
    if mass <= 0.0 || hbar <= 0.0 || levels == 0 {
        return Err(Error::Unsupported("mass, ℏ and level count must be positive".into()));
    }
    let potential = &potential[..=deg];
    let base = 200;
    let mut half_width = 2.0f64;
    loop {
        let coarse = Grid::new(mass, potential, hbar, half_width, 4 * base).lowest(levels);
        let top = coarse[levels - 1];
        let wall = horner(potential, half_width).min(horner(potential, -half_width));
        let decay = |sign: f64| {
            // WKB exponent ∫ √(2m(V − E))/ℏ dx from 0 to ±L
            let steps = 2000;
            let dx = half_width / steps as f64;
            (0..steps)
                .map(|i| {
                    let x = sign * (i as f64 + 0.5) * dx;
                    (2.0 * mass * (horner(potential, x) - top)).max(0.0).sqrt() * dx / hbar
                })
                .sum::<f64>()
        };
        if wall >= 10.0 * top.abs().max(1e-12) && wall > top && decay(1.0).min(decay(-1.0)) >= MIN_DECAY {
            break;
        }
        half_width *= 1.5;
        if half_width > 1e6 {
            return Err(Error::Numerical("could not enclose the requested levels".into()));
        }
    }
    let mut intervals = base;
    let mut prev_raw = Grid::new(mass, potential, hbar, half_width, intervals).lowest(levels);
    let mut prev_extrap: Option<Vec<f64>> = None;
    while intervals * 2 <= MAX_POINTS {
        intervals *= 2;
        let raw = Grid::new(mass, potential, hbar, half_width, intervals).lowest(levels);
        let extrap: Vec<f64> = raw.iter().zip(&prev_raw).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
        if let Some(p) = &prev_extrap {
            if extrap.iter().zip(p).all(|(a, b)| (a - b).abs() <= REL_TOL * a.abs().max(1e-12)) {
                return Ok(OracleResult { energies: extrap, half_width, grid_points: intervals - 1, converged: true });
            }
        }
        prev_raw = raw;
        prev_extrap = Some(extrap);
    }
    Ok(OracleResult {
        energies: prev_extrap.unwrap_or(prev_raw),
        half_width,
        grid_points: intervals - 1,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let r = schrodinger_oracle(1.0, &[0.0, 0.0, 0.5], 1.0, 3).unwrap();
        assert!(r.converged);
        for (k, e) in r.energies.iter().enumerate() {
            assert!((e - (k as f64 + 0.5)).abs() < 1e-7, "{k}: {e}");
        }
    }

    #[test]
    fn quartic_ground_state() {
        // −½ψ″ + x⁴ψ
        let r = schrodinger_oracle(1.0, &[0.0, 0.0, 0.0, 0.0, 1.0], 1.0, 1).unwrap();
        assert!((r.energies[0] - 0.667_986_259_155_777).abs() < 1e-7, "{}", r.energies[0]);
    }

    #[test]
    fn rejects_unbounded_potential() {
        assert!(schrodinger_oracle(1.0, &[0.0, 0.0, 0.0, 1.0], 1.0, 1).is_err());
    }
}
