//! Application of `a(x, D)`: by direct quadrature, through the three-term
//! paradifferential splitting, through the dense kernel of a single block,
//! and as a dense matrix for `L₂` operator norms.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::grid::{FourierPlan, GridFunction, SpectralFunction, TorusGrid};
use crate::lp::LpPartition;
use crate::symbol::{block_from_spectrum, symbol_spectrum, Symbol};

/// Dense kernel and SVD paths are refused above this many grid points.
pub const MAX_DENSE_POINTS: usize = 256;

fn check_dense(grid: TorusGrid) -> Result<()> {
    ensure!(
        grid.len() <= MAX_DENSE_POINTS,
        Resource,
        "dense paths need at most {MAX_DENSE_POINTS} grid points, grid has {}",
        grid.len()
    );
    Ok(())
}

/// `Σ_κ e^{i x_m·κ} a(x_m, κ) û(κ)` for every `m`, skipping `û(κ) = 0`.
pub(crate) fn apply_to_spectrum(a: &Symbol, uh: &SpectralFunction) -> GridFunction {
    let grid = a.grid();
    let roots = grid.roots_of_unity();
    let active: Vec<(usize, crate::grid::Freq, Complex64)> = uh
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
        .map(|(i, c)| (i, grid.freq(i), *c))
        .collect();
    let values = (0..grid.len())
        .map(|m| {
            let row = a.row(m);
            active.iter().map(|&(i, k, c)| roots[grid.phase_index(m, k)] * row[i] * c).sum()
        })
        .collect();
    GridFunction::from_vec_unchecked(grid, values)
}

/// `apply_direct`: `(Au)(x_m) = Σ_κ e^{i x_m·κ} a(x_m, κ) û(κ)`.
pub fn apply_direct(a: &Symbol, u: &GridFunction) -> Result<GridFunction> {
    a.grid().check_same(&u.grid())?;
    Ok(apply_to_spectrum(a, &FourierPlan::new(a.grid()).forward(u)))
}

/// The three parts of `a(x,D)u` and their per-scale pieces.
#[derive(Clone, Debug)]
pub struct SplitResult {
    pub t1: GridFunction,
    pub t2: GridFunction,
    pub t3: GridFunction,
    /// `Σ_{j≤k−2} a_{j,k}(x,D)u_k`, indexed by `k`.
    pub t1_by_k: Vec<GridFunction>,
    /// `a_{k,k}u_k + a_{k−1,k}u_k + a_{k,k−1}u_{k−1}`, indexed by `k`.
    pub t2_by_k: Vec<GridFunction>,
    /// `Σ_{k≤j−2} a_{j,k}(x,D)u_k`, indexed by `j`.
    pub t3_by_j: Vec<GridFunction>,
}

impl SplitResult {
    pub fn total(&self) -> GridFunction {
        let mut out = &self.t1 + &self.t2;
        out.add_assign(&self.t3);
        out
    }

    /// CSV with columns `m,t1_re,t1_im,t2_re,t2_im,t3_re,t3_im`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "m,t1_re,t1_im,t2_re,t2_im,t3_re,t3_im")?;
        let rows = self.t1.values().iter().zip(self.t2.values()).zip(self.t3.values());
        for (m, ((a, b), c)) in rows.enumerate() {
            writeln!(out, "{m},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", a.re, a.im, b.re, b.im, c.re, c.im)?;
        }
        Ok(())
    }
}

/// Every `a_{j,k}(x,D)u_k`, as `terms[j][k]`.
///
/// For each input frequency `η` the columns `𝓕^{−1}(Φ_j â(·,η))` are formed
/// once and shared by the (at most two) `k` with `Φ_k(η) ≠ 0`. Accumulation
/// runs over `η` in lattice order, then `j`, then `k`.
pub(crate) fn block_terms(a: &Symbol, u: &GridFunction, partition: &LpPartition) -> Result<Vec<Vec<GridFunction>>> {
    let grid = a.grid();
    grid.check_same(&u.grid())?;
    grid.check_same(&partition.grid())?;
    let jmax = partition.jmax();
    let l = grid.len();
    let plan = FourierPlan::new(grid);
    let uh = plan.forward(u);
    let spectrum = symbol_spectrum(a);
    let roots = grid.roots_of_unity();
    let tildes: Vec<Vec<f64>> = (0..=jmax).map(|k| partition.tilde(k)).collect();
    let mut acc = vec![vec![vec![Complex64::new(0.0, 0.0); l]; jmax + 1]; jmax + 1];
    let mut col = vec![Complex64::new(0.0, 0.0); l];
    for (i, &c) in uh.coeffs().iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let eta = grid.freq(i);
        let inputs: Vec<(usize, Complex64)> = (0..=jmax)
            .filter(|&k| partition.block(k)[i] != 0.0 && tildes[k][i] != 0.0)
            .map(|k| (k, c * partition.block(k)[i] * tildes[k][i]))
            .collect();
        if inputs.is_empty() {
            continue;
        }
        let column = spectrum.column(i);
        for (j, acc_j) in acc.iter_mut().enumerate() {
            let phi = partition.block(j);
            let mut any = false;
            for ((d, s), p) in col.iter_mut().zip(column).zip(phi) {
                *d = s * p;
                any |= *d != Complex64::new(0.0, 0.0);
            }
            if !any {
                continue;
            }
            plan.inverse_in_place(&mut col);
            for &(k, weight) in &inputs {
                for (m, (o, v)) in acc_j[k].iter_mut().zip(&col).enumerate() {
                    *o += roots[grid.phase_index(m, eta)] * v * weight;
                }
            }
        }
    }
    Ok(acc
        .into_iter()
        .map(|row| row.into_iter().map(|v| GridFunction::from_vec_unchecked(grid, v)).collect())
        .collect())
}

fn sum_terms<'a>(grid: TorusGrid, terms: impl Iterator<Item = &'a GridFunction>) -> GridFunction {
    let mut out = GridFunction::zeros(grid);
    for t in terms {
        out.add_assign(t);
    }
    out
}

/// `apply_split`: `a(x,D)u = a⁽¹⁾(x,D)u + a⁽²⁾(x,D)u + a⁽³⁾(x,D)u`.
pub fn apply_split(a: &Symbol, u: &GridFunction, partition: &LpPartition) -> Result<SplitResult> {
    let terms = block_terms(a, u, partition)?;
    let grid = a.grid();
    let jmax = partition.jmax();
    let t1_by_k: Vec<GridFunction> =
        (0..=jmax).map(|k| sum_terms(grid, (0..(k.saturating_sub(1))).map(|j| &terms[j][k]))).collect();
    let t3_by_j: Vec<GridFunction> =
        (0..=jmax).map(|j| sum_terms(grid, (0..(j.saturating_sub(1))).map(|k| &terms[j][k]))).collect();
    let t2_by_k: Vec<GridFunction> = (0..=jmax)
        .map(|k| {
            let mut parts = vec![&terms[k][k]];
            if k >= 1 {
                parts.push(&terms[k - 1][k]);
                parts.push(&terms[k][k - 1]);
            }
            sum_terms(grid, parts.into_iter())
        })
        .collect();
    Ok(SplitResult {
        t1: sum_terms(grid, t1_by_k.iter()),
        t2: sum_terms(grid, t2_by_k.iter()),
        t3: sum_terms(grid, t3_by_j.iter()),
        t1_by_k,
        t2_by_k,
        t3_by_j,
    })
}

/// `kernel_apply`: `a_{j,k}(x,D)u_k = ∫ K_{j,k}(x,y) u_k(y) dy` with the dense
/// kernel `K_{j,k}(x,y) = (2π)^{−n} Σ_κ a_{j,k}(x,κ) e^{i(x−y)·κ}` and the
/// rectangle rule in `y`.
pub fn kernel_apply(a: &Symbol, partition: &LpPartition, j: usize, k: usize, u: &GridFunction) -> Result<GridFunction> {
    let grid = a.grid();
    check_dense(grid)?;
    grid.check_same(&u.grid())?;
    let block = block_from_spectrum(a, &symbol_spectrum(a), partition, j, k)?;
    let uk = partition.lp_block(u, k)?;
    let l = grid.len();
    let roots = grid.roots_of_unity();
    let freqs: Vec<_> = grid.frequencies().collect();
    let norm = (2.0 * std::f64::consts::PI).powi(-(grid.dim() as i32));
    let weight = grid.cell_volume();
    let n = grid.points_per_axis();
    let mut values = vec![Complex64::new(0.0, 0.0); l];
    let mut kernel_row = vec![Complex64::new(0.0, 0.0); l];
    for (m, out) in values.iter_mut().enumerate() {
        let row = block.symbol.row(m);
        for (mp, kr) in kernel_row.iter_mut().enumerate() {
            *kr = freqs
                .iter()
                .zip(row)
                .filter(|(_, s)| **s != Complex64::new(0.0, 0.0))
                .map(|(&kappa, s)| {
                    let p = grid.phase_index(m, kappa) + n - grid.phase_index(mp, kappa);
                    s * roots[p % n]
                })
                .sum::<Complex64>()
                * norm;
        }
        *out = kernel_row.iter().zip(uk.values()).map(|(kv, uv)| kv * uv).sum::<Complex64>() * weight;
    }
    GridFunction::new(grid, values)
}

/// `operator_matrix`: `A[m][m']` with `(Au)(x_m) = Σ_{m'} A[m][m'] u(x_{m'})`.
/// The quadrature weights cancel, so the spectral norm of `A` is the
/// `L₂(grid)` operator norm.
pub fn operator_matrix(a: &Symbol) -> Result<DMatrix<Complex64>> {
    let grid = a.grid();
    check_dense(grid)?;
    let l = grid.len();
    let roots = grid.roots_of_unity();
    let n = grid.points_per_axis();
    let freqs: Vec<_> = grid.frequencies().collect();
    let scale = 1.0 / l as f64;
    Ok(DMatrix::from_fn(l, l, |m, mp| {
        let row = a.row(m);
        freqs
            .iter()
            .zip(row)
            .map(|(&kappa, s)| s * roots[(grid.phase_index(m, kappa) + n - grid.phase_index(mp, kappa)) % n])
            .sum::<Complex64>()
            * scale
    }))
}

/// `operator_norm_L2`: largest singular value of [`operator_matrix`].
pub fn operator_norm_l2(a: &Symbol) -> Result<f64> {
    let matrix = operator_matrix(a)?;
    Ok(matrix.singular_values().iter().cloned().fold(0.0, f64::max))
}
