//! Solutions from a converged `α` sampled on a uniform grid.

use crate::error::{Error, Result};

/// `y1 = exp(-∫α)` and `y2 = y1 ∫ exp(∫(2α + p))`, both anchored at `grid[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair {
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
}

fn cumtrapz(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Trapezoid quadrature on a uniform grid; the second solution uses the
/// first-order reduction `y2 = y1 ∫ exp(∫(2α + p))`.
pub fn reconstruct_solutions(alpha: &[f64], p: &[f64], grid: &[f64]) -> Result<SolutionPair> {
    let m = grid.len();
    if m < 2 || alpha.len() != m || p.len() != m {
        return Err(Error::InvalidGrid(format!(
            "need at least two points and equal lengths (grid {m}, alpha {}, p {})",
            alpha.len(),
            p.len()
        )));
    }
    let h = grid[1] - grid[0];
    if !(h > 0.0) {
        return Err(Error::InvalidGrid("grid must be increasing".into()));
    }
    let span = grid[m - 1] - grid[0];
    for (i, w) in grid.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * span.max(1.0) {
            return Err(Error::InvalidGrid(format!("non-uniform spacing at index {}", i + 1)));
        }
    }
    if let Some(index) = alpha.iter().position(|a| !a.is_finite()) {
        return Err(Error::PoleOnGrid { index, x: grid[index] });
    }
    let int_alpha = cumtrapz(alpha, h);
    let y1: Vec<f64> = int_alpha.iter().map(|a| (-a).exp()).collect();
    let g: Vec<f64> = alpha.iter().zip(p).map(|(a, p)| 2.0 * a + p).collect();
    let weight: Vec<f64> = cumtrapz(&g, h).into_iter().map(f64::exp).collect();
    let y2 = cumtrapz(&weight, h).iter().zip(&y1).map(|(w, y)| w * y).collect();
    Ok(SolutionPair { y1, y2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, m: usize) -> Vec<f64> {
        (0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect()
    }

    #[test]
    fn hermite_minus_one_recovers_gaussian() {
        // y'' = 2x y' + 2y has α = -2x, so y1 = exp(x²)
        let xs = grid(0.0, 1.0, 2001);
        let alpha: Vec<f64> = xs.iter().map(|x| -2.0 * x).collect();
        let p: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let sol = reconstruct_solutions(&alpha, &p, &xs).unwrap();
        for (x, y) in xs.iter().zip(&sol.y1) {
            assert!((y - (x * x).exp()).abs() < 1e-6);
        }
        // second solution satisfies the ODE; check it numerically in the interior
        let h = xs[1] - xs[0];
        for i in (100..1900).step_by(200) {
            let y = &sol.y2;
            let d2 = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
            let d1 = (y[i + 1] - y[i - 1]) / (2.0 * h);
            let r = d2 - 2.0 * xs[i] * d1 - 2.0 * y[i];
            assert!(r.abs() < 1e-3, "i={i} r={r}");
        }
    }

    #[test]
    fn constant_case() {
        // y'' = 3y' - 2y, α = -1: y1 = e^x, y2 ∝ e^{2x} - e^x
        let xs = grid(0.0, 1.0, 4001);
        let alpha = vec![-1.0; xs.len()];
        let p = vec![3.0; xs.len()];
        let sol = reconstruct_solutions(&alpha, &p, &xs).unwrap();
        let last = xs.len() - 1;
        assert!((sol.y1[last] - 1f64.exp()).abs() < 1e-9);
        let exact = (2f64).exp() - 1f64.exp();
        assert!((sol.y2[last] - exact).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        let xs = vec![0.0, 0.1, 0.3];
        assert!(matches!(reconstruct_solutions(&[0.0; 3], &[0.0; 3], &xs), Err(Error::InvalidGrid(_))));
        let xs = grid(0.0, 1.0, 5);
        let alpha = [0.0, 1.0, f64::INFINITY, 0.0, 0.0];
        assert_eq!(reconstruct_solutions(&alpha, &[0.0; 5], &xs), Err(Error::PoleOnGrid { index: 2, x: 0.5 }));
    }
}
