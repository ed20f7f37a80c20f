//! Double-ended Numerov shooting for `-ψ'' + V ψ = E ψ` with `ψ(a) = ψ(b) = 0`.
//!
//! Level `k` is first bracketed by node counting (the forward solution has
//! `k` interior nodes just below `E_k` and `k + 1` just above). Inside that
//! bracket the left and right solutions are matched at the outer turning
//! point through their discrete Wronskian, which is continuous in `E` and
//! vanishes exactly at the eigenvalue. A second solve with the mesh spacing
//! halved gives a Richardson-extrapolated value.

use crate::algebra::{Poly, Rational, Scalar};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NumerovConfig {
    pub domain: (f64, f64),
    /// Mesh points including both ends.
    pub mesh: usize,
    /// Search interval for `E`; `None` derives one from node counts.
    pub bracket: Option<(f64, f64)>,
    /// Bisection stops when the bracket is narrower than this.
    pub tol: f64,
}

impl Default for NumerovConfig {
    fn default() -> Self {
        NumerovConfig { domain: (-8.0, 8.0), mesh: 4000, bracket: None, tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumerovResult {
    pub level: usize,
    /// Richardson value `E_fine + (E_fine - E_coarse) / 15`.
    pub energy: f64,
    pub coarse: f64,
    pub fine: f64,
    pub nodes: usize,
}

const RESCALE_AT: f64 = 1e150;

struct Mesh {
    x: Vec<f64>,
    v: Vec<f64>,
    h: f64,
}

impl Mesh {
    fn new(potential: &dyn Fn(f64) -> f64, (a, b): (f64, f64), m: usize) -> Result<Self> {
        if m < 100 {
            return Err(Error::InvalidArgument(format!("Numerov needs at least 100 mesh points, got {m}")));
        }
        if !(b > a) {
            return Err(Error::InvalidArgument(format!("empty Numerov domain [{a}, {b}]")));
        }
        let h = (b - a) / (m - 1) as f64;
        let x: Vec<f64> = (0..m).map(|i| a + i as f64 * h).collect();
        let v = x.iter().map(|&x| potential(x)).collect();
        Ok(Mesh { x, v, h })
    }

    fn len(&self) -> usize {
        self.x.len()
    }

    /// Forward solution on `0..=end` from `ψ_0 = 0` and a tiny positive `ψ_1`, rescaled
    /// whenever it grows past `RESCALE_AT`. Positive rescaling keeps signs.
    fn shoot_left(&self, e: f64, end: usize) -> Vec<f64> {
        let k = self.h * self.h / 12.0;
        let f = |i: usize| self.v[i] - e;
        let mut psi = vec![0.0; end + 1];
        psi[1] = 1e-30;
        for i in 1..end {
            let next = (2.0 * psi[i] * (1.0 + 5.0 * k * f(i)) - psi[i - 1] * (1.0 - k * f(i - 1))) / (1.0 - k * f(i + 1));
            psi[i + 1] = next;
            if next.abs() > RESCALE_AT {
                for p in &mut psi[..=i + 1] {
                    *p /= RESCALE_AT;
                }
            }
        }
        psi
    }

    /// Backward solution on `start..len`, mirrored.
    fn shoot_right(&self, e: f64, start: usize) -> Vec<f64> {
        let m = self.len();
        let k = self.h * self.h / 12.0;
        let f = |i: usize| self.v[i] - e;
        let mut psi = vec![0.0; m];
        psi[m - 2] = 1e-30;
        for i in (start + 1..m - 1).rev() {
            let next = (2.0 * psi[i] * (1.0 + 5.0 * k * f(i)) - psi[i + 1] * (1.0 - k * f(i + 1))) / (1.0 - k * f(i - 1));
            psi[i - 1] = next;
            if next.abs() > RESCALE_AT {
                for p in &mut psi[i - 1..] {
                    *p /= RESCALE_AT;
                }
            }
        }
        psi
    }

    fn nodes(&self, e: f64) -> usize {
        let psi = self.shoot_left(e, self.len() - 1);
        let interior = &psi[1..self.len() - 1];
        interior.windows(2).filter(|w| w[0] * w[1] < 0.0 || (w[0] != 0.0 && w[1] == 0.0)).count()
    }

    /// Rightmost index with `V < E`, clamped away from the ends.
    fn turning_index(&self, e: f64) -> usize {
        let m = self.len();
        let idx = (0..m).rev().find(|&i| self.v[i] < e).unwrap_or(m / 2);
        idx.clamp(2, m - 4)
    }

    /// Normalized discrete Wronskian of the left and right solutions at `j`.
    fn mismatch(&self, e: f64, j: usize) -> f64 {
        let l = self.shoot_left(e, j + 1);
        let r = self.shoot_right(e, j);
        let w = l[j] * r[j + 1] - l[j + 1] * r[j];
        let norm = (l[j].abs() + l[j + 1].abs()) * (r[j].abs() + r[j + 1].abs());
        if norm == 0.0 {
            0.0
        } else {
            w / norm
        }
    }

    fn min_potential(&self) -> f64 {
        self.v.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(lo, hi)` with exactly `level` nodes at `lo` and more at `hi`.
    fn node_bracket(&self, level: usize, start: Option<(f64, f64)>) -> Result<(f64, f64)> {
        let (mut lo, mut hi) = match start {
            Some(b) => b,
            None => {
                let lo = self.min_potential();
                let mut hi = lo + 1.0;
                let mut width = 1.0;
                while self.nodes(hi) <= level {
                    width *= 2.0;
                    hi = lo + width;
                    if width > 1e12 {
                        return Err(Error::NoSignChange { lo, hi });
                    }
                }
                (lo, hi)
            }
        };
        if self.nodes(lo) > level || self.nodes(hi) <= level {
            return Err(Error::NodeCountMismatch { expected: level, found: self.nodes(lo) });
        }
        // shrink until the bracket holds the single transition level -> level + 1
        for _ in 0..200 {
            let (nl, nh) = (self.nodes(lo), self.nodes(hi));
            if nl == level && nh == level + 1 {
                return Ok((lo, hi));
            }
            let mid = 0.5 * (lo + hi);
            if self.nodes(mid) <= level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NodeCountMismatch { expected: level + 1, found: self.nodes(hi) })
    }

    fn solve(&self, level: usize, bracket: Option<(f64, f64)>, tol: f64) -> Result<f64> {
        let (mut lo, mut hi) = self.node_bracket(level, bracket)?;
        let j = self.turning_index(hi);
        let s_lo = self.mismatch(lo, j).signum();
        if s_lo == self.mismatch(hi, j).signum() || s_lo == 0.0 {
            return Err(Error::NoSignChange { lo, hi });
        }
        while hi - lo > tol * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = self.mismatch(mid, j).signum();
            if s == 0.0 {
                return Ok(mid);
            }
            if s == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn potential_fn(v: &Poly<Rational>) -> impl Fn(f64) -> f64 {
    let c: Vec<f64> = v.coeffs().iter().map(Scalar::to_f64).collect();
    move |x| c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// Level `level` on a mesh of `mesh` points without extrapolation.
pub fn numerov_level(potential: &Poly<Rational>, level: usize, domain: (f64, f64), mesh: usize, tol: f64) -> Result<f64> {
    let v = potential_fn(potential);
    Mesh::new(&v, domain, mesh)?.solve(level, None, tol)
}

/// Level `level` with Richardson extrapolation over meshes `M` and `2M - 1`.
pub fn numerov_eigen(potential: &Poly<Rational>, level: usize, config: &NumerovConfig) -> Result<NumerovResult> {
    let v = potential_fn(potential);
    let coarse_mesh = Mesh::new(&v, config.domain, config.mesh)?;
    let coarse = coarse_mesh.solve(level, config.bracket, config.tol)?;
    let fine_mesh = Mesh::new(&v, config.domain, 2 * config.mesh - 1)?;
    let fine = fine_mesh.solve(level, config.bracket, config.tol)?;
    let energy = fine + (fine - coarse) / 15.0;
    let nodes = fine_mesh.nodes(energy - 1e-9 * energy.abs().max(1.0));
    if nodes != level {
        return Err(Error::NodeCountMismatch { expected: level, found: nodes });
    }
    Ok(NumerovResult { level, energy, coarse, fine, nodes })
}

/// Levels `0..count`.
pub fn numerov_levels(potential: &Poly<Rational>, count: usize, config: &NumerovConfig) -> Result<Vec<NumerovResult>> {
    (0..count).map(|k| numerov_eigen(potential, k, config)).collect()
}
