use num_complex::Complex64;
use serde::Serialize;

use super::{symbol_spectrum, Symbol};
use crate::error::{ensure, Result};
use crate::grid::{FourierPlan, TorusGrid};

/// One entry `C_{αβ}` of a seminorm table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeminormEntry {
    pub alpha: [usize; 2],
    pub beta: [usize; 2],
    pub value: f64,
}

/// Empirical constants `C_{αβ}` of `|Δ^α_ξ ∂^β_x a| ≤ C_{αβ}(1+|ξ|)^{d−ρ|α|+δ|β|}`,
/// the sup taken over all grid points and `|κ| ≤ radius`.
#[derive(Clone, Debug, Serialize)]
pub struct SeminormTable {
    pub order: f64,
    pub rho: f64,
    pub delta: f64,
    pub radius: f64,
    pub entries: Vec<SeminormEntry>,
}

impl SeminormTable {
    pub fn get(&self, alpha: [usize; 2], beta: [usize; 2]) -> Option<f64> {
        self.entries.iter().find(|e| e.alpha == alpha && e.beta == beta).map(|e| e.value)
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().map(|e| e.value).fold(0.0, f64::max)
    }
}

fn multi_indices(dim: usize, max_order: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for total in 0..=max_order {
        if dim == 1 {
            out.push([total, 0]);
        } else {
            for a in (0..=total).rev() {
                out.push([a, total - a]);
            }
        }
    }
    out
}

/// `∂^β_x a` computed spectrally, column by column. For odd order along an
/// axis the Nyquist mode of that axis is dropped.
fn x_derivative(a: &Symbol, beta: [usize; 2]) -> Vec<Complex64> {
    let grid = a.grid();
    if beta == [0, 0] {
        return a.samples().to_vec();
    }
    let l = grid.len();
    let h = grid.half();
    let spectrum = symbol_spectrum(a);
    let plan = FourierPlan::new(grid);
    let factors: Vec<Complex64> = grid
        .frequencies()
        .map(|xi| {
            let mut f = Complex64::new(1.0, 0.0);
            for axis in 0..grid.dim() {
                let b = beta[axis] as i32;
                if b % 2 == 1 && xi.0[axis] == -h {
                    return Complex64::new(0.0, 0.0);
                }
                f *= Complex64::new(0.0, xi.0[axis] as f64).powi(b);
            }
            f
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); l * l];
    let mut col = vec![Complex64::new(0.0, 0.0); l];
    for i in 0..l {
        for ((c, s), f) in col.iter_mut().zip(spectrum.column(i)).zip(&factors) {
            *c = s * f;
        }
        plan.inverse_in_place(&mut col);
        for (m, v) in col.iter().enumerate() {
            out[m * l + i] = *v;
        }
    }
    out
}

/// Central difference `(f(κ+e) − f(κ−e))/2` along `axis`, zero outside `Λ`.
pub(super) fn central_difference(grid: TorusGrid, row: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.points_per_axis();
    let stride = if grid.dim() == 2 && axis == 0 { n } else { 1 };
    (0..row.len())
        .map(|i| {
            let pos = if stride == 1 { i % n } else { i / n };
            let up = if pos + 1 < n { row[i + stride] } else { Complex64::new(0.0, 0.0) };
            let down = if pos > 0 { row[i - stride] } else { Complex64::new(0.0, 0.0) };
            (up - down) * 0.5
        })
        .collect()
}

/// `seminorm_estimate`: all `(α, β)` with `|α| ≤ alpha_max`, `|β| ≤ beta_max`.
pub fn seminorm_estimate(a: &Symbol, alpha_max: usize, beta_max: usize) -> Result<SeminormTable> {
    let grid = a.grid();
    let dim = grid.dim();
    ensure!(
        alpha_max <= dim + 1 && beta_max <= dim + 1,
        Parameter,
        "derivative orders are limited to n + 1 = {}",
        dim + 1
    );
    let l = grid.len();
    let radius = grid.points_per_axis() as f64 / 4.0;
    let inside: Vec<(usize, f64)> = grid
        .frequencies()
        .enumerate()
        .filter(|(_, k)| k.norm() <= radius)
        .map(|(i, k)| (i, 1.0 + k.norm()))
        .collect();
    let (rho, delta) = (a.kind().rho(), a.kind().delta());
    let alphas = multi_indices(dim, alpha_max);
    let betas = multi_indices(dim, beta_max);
    let mut entries = Vec::with_capacity(alphas.len() * betas.len());
    for &beta in &betas {
        let db = x_derivative(a, beta);
        let mut sup = vec![0.0f64; alphas.len()];
        for m in 0..l {
            let row = &db[m * l..(m + 1) * l];
            for (s, alpha) in sup.iter_mut().zip(&alphas) {
                let mut d = row.to_vec();
                for axis in 0..dim {
                    for _ in 0..alpha[axis] {
                        d = central_difference(grid, &d, axis);
                    }
                }
                let exponent = a.order() - rho * (alpha[0] + alpha[1]) as f64 + delta * (beta[0] + beta[1]) as f64;
                for &(i, w) in &inside {
                    *s = s.max(d[i].norm() * w.powf(-exponent));
                }
            }
        }
        for (alpha, value) in alphas.iter().zip(sup) {
            entries.push(SeminormEntry { alpha: *alpha, beta, value });
        }
    }
    Ok(SeminormTable { order: a.order(), rho, delta, radius, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::symbol::{bessel_symbol, ching_symbol, ChingParams};

    #[test]
    fn identity_table() {
        let g = make_grid(1, 5).unwrap();
        let t = seminorm_estimate(&Symbol::identity(g).unwrap(), 2, 2).unwrap();
        for e in &t.entries {
            let want = if e.alpha == [0, 0] && e.beta == [0, 0] { 1.0 } else { 0.0 };
            assert!((e.value - want).abs() < 1e-12, "{e:?}");
        }
        assert!(seminorm_estimate(&Symbol::identity(g).unwrap(), 3, 0).is_err());
    }

    #[test]
    fn spectral_x_derivative_of_mode() {
        let g = make_grid(1, 5).unwrap();
        let a = crate::symbol::Symbol::from_fn(g, 0.0, crate::symbol::SymbolType::Exotic, |x, _| {
            Complex64::from_polar(1.0, 3.0 * x[0])
        })
        .unwrap();
        let t = seminorm_estimate(&a, 0, 2).unwrap();
        assert!((t.get([0, 0], [1, 0]).unwrap() - 3.0).abs() < 1e-10);
        // weight (1+|ξ|)^{−2}, largest at ξ = 0
        assert!((t.get([0, 0], [2, 0]).unwrap() - 9.0).abs() < 1e-10);
    }

    #[test]
    fn bessel_symbol_stable_under_refinement() {
        for dim in [1, 2] {
            let depths = if dim == 1 { (7, 8) } else { (4, 5) };
            let table = |depth| {
                let g = make_grid(dim, depth).unwrap();
                seminorm_estimate(&bessel_symbol(g, 1.0, |_| Complex64::new(1.0, 0.0)).unwrap(), dim + 1, 1).unwrap()
            };
            let (a, b) = (table(depths.0), table(depths.1));
            for (x, y) in a.entries.iter().zip(&b.entries) {
                assert!(x.value.is_finite() && x.value <= 4.0, "{x:?}");
                if y.value > 1e-12 {
                    assert!((x.value / y.value - 1.0).abs() < 0.1, "{x:?} {y:?}");
                }
            }
        }
    }

    #[test]
    fn ching_single_block_finite() {
        let g = make_grid(1, 7).unwrap();
        let t = seminorm_estimate(&ching_symbol(g, &ChingParams::new(1.0, 4, 4)).unwrap(), 2, 2).unwrap();
        assert!(t.max().is_finite());
        assert!((t.get([0, 0], [0, 0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translation_invariant() {
        let g = make_grid(1, 7).unwrap();
        let a = ching_symbol(g, &ChingParams::new(0.5, 2, 4)).unwrap();
        let t0 = seminorm_estimate(&a, 2, 2).unwrap();
        let t1 = seminorm_estimate(&a.translate([37, 0]), 2, 2).unwrap();
        for (x, y) in t0.entries.iter().zip(&t1.entries) {
            assert!((x.value - y.value).abs() <= 1e-10 * x.value.max(1.0));
        }
    }
}
