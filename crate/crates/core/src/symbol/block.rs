use num_complex::Complex64;
use serde::Serialize;

use super::seminorm::central_difference;
use super::{symbol_spectrum, Symbol, SymbolSpectrum};
use crate::error::{ensure, Error, Result};
use crate::grid::{FourierPlan, TorusGrid};
use crate::lp::{HomogeneousBesov, LpPartition, ANNULUS_INNER, ANNULUS_OUTER, BOX_HALF_WIDTH};

/// `a_{j,k}(x, η) = 𝓕^{−1}_{ξ→x}(Φ_j â(·, η)) Φ̃_k(η)`.
#[derive(Clone, Debug)]
pub struct BlockSymbol {
    pub j: usize,
    pub k: usize,
    pub symbol: Symbol,
}

/// Block extraction from a precomputed spectrum.
pub(crate) fn block_from_spectrum(
    a: &Symbol,
    spectrum: &SymbolSpectrum,
    partition: &LpPartition,
    j: usize,
    k: usize,
) -> Result<BlockSymbol> {
    let jmax = partition.jmax();
    ensure!(j <= jmax && k <= jmax, Parameter, "block indices ({j}, {k}) outside 0..={jmax}");
    a.grid().check_same(&partition.grid())?;
    let grid = a.grid();
    let l = grid.len();
    let plan = FourierPlan::new(grid);
    let tilde = partition.tilde(k);
    let phi = partition.block(j);
    let mut samples = vec![Complex64::new(0.0, 0.0); l * l];
    let mut col = vec![Complex64::new(0.0, 0.0); l];
    for (i, &w) in tilde.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for ((c, s), p) in col.iter_mut().zip(spectrum.column(i)).zip(phi) {
            *c = s * p;
        }
        plan.inverse_in_place(&mut col);
        for (m, v) in col.iter().enumerate() {
            samples[m * l + i] = v * w;
        }
    }
    let symbol = Symbol::new(grid, samples, a.order(), a.kind())?;
    Ok(BlockSymbol { j, k, symbol })
}

/// `symbol_block`.
pub fn symbol_block(a: &Symbol, partition: &LpPartition, j: usize, k: usize) -> Result<BlockSymbol> {
    block_from_spectrum(a, &symbol_spectrum(a), partition, j, k)
}

/// Size of the rescaled slices `ξ ↦ Σ_{j≤k−2} a_{j,k}(x, 2^k ξ)`.
#[derive(Clone, Debug, Serialize)]
pub struct SliceNorm {
    pub k: usize,
    pub t: f64,
    pub order: f64,
    /// `sup_x ‖slice‖_{Ḃ^{n/t}_{1,t}}`.
    pub besov: f64,
    /// `sup_x Σ_{|α|≤n+1} ‖D^α_ξ slice‖_{L₁}` with lattice differences.
    pub surrogate: f64,
    /// `2^{kd}`.
    pub scale: f64,
    pub besov_ratio: f64,
    pub surrogate_ratio: f64,
    pub box_points: usize,
    pub eval_points: usize,
}

/// Columns `b̂(ℓ, η) = Ψ_{k−2}(ℓ) â(ℓ, η) Φ̃_k(η)`, laid out `[η][ℓ]`.
fn low_part_spectrum(spectrum: &SymbolSpectrum, partition: &LpPartition, k: usize) -> Vec<Complex64> {
    let l = spectrum.grid().len();
    let psi = partition.psi(k - 2);
    let tilde = partition.tilde(k);
    let mut out = vec![Complex64::new(0.0, 0.0); l * l];
    for (i, &w) in tilde.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for ((o, s), p) in out[i * l..(i + 1) * l].iter_mut().zip(spectrum.column(i)).zip(&psi) {
            *o = s * p * w;
        }
    }
    out
}

/// `x ↦ ‖ξ ↦ b(x, 2^k ξ)‖_{Ḃ^{n/t}_{1,t}}` at every grid point, where
/// `low[i·|Λ| + q] = b̂(ℓ_q, η_i)` is the `x`-spectrum of `b`.
///
/// The lattice `η = 2^k ξ` is exactly the box mesh of spacing `2^{−k}`, so
/// the box function of each `x`-mode `ℓ` is read off `b̂(ℓ, ·)` without
/// interpolation and `M = 32·2^k`. Modes below `1e−14` of the largest entry
/// are dropped.
pub(crate) fn box_norms_per_point(
    grid: TorusGrid,
    low: &[Complex64],
    k: usize,
    evaluator: &HomogeneousBesov,
) -> Result<Vec<f64>> {
    let l = grid.len();
    let dim = grid.dim();
    let global = low.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if global == 0.0 {
        return Ok(vec![0.0; l]);
    }
    let box_points = (2.0 * BOX_HALF_WIDTH) as usize * (1 << k);

    // annulus precondition on the union of the slice supports
    let cutoff = 1e-10 * global;
    let dyadic = 2f64.powi(k as i32);
    for i in 0..l {
        let col_max = low[i * l..(i + 1) * l].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if col_max > cutoff {
            let r = grid.freq(i).norm() / dyadic;
            if !(ANNULUS_INNER..=ANNULUS_OUTER).contains(&r) {
                return Err(Error::Precondition(format!("slice at k = {k} is nonzero at |ξ| = {r:.4}")));
            }
        }
    }

    let offset = (BOX_HALF_WIDTH as i64) << k;
    let box_len = box_points.pow(dim as u32);
    let negligible = 1e-14 * global;
    let mut modes: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for q in 0..l {
        let col_max = (0..l).map(|i| low[i * l + q].norm()).fold(0.0, f64::max);
        if col_max <= negligible {
            continue;
        }
        let mut values = vec![Complex64::new(0.0, 0.0); box_len];
        for i in 0..l {
            let v = low[i * l + q];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let eta = grid.freq(i);
            let b0 = (eta.0[0] + offset) as usize;
            let idx = if dim == 1 { b0 } else { b0 * box_points + (eta.0[1] + offset) as usize };
            values[idx] = v;
        }
        modes.push((q, evaluator.dual_spectrum_raw(&values, box_points)));
    }
    let roots = grid.roots_of_unity();
    let e_len = evaluator.eval_points().pow(dim as u32);
    let mut combined = vec![Complex64::new(0.0, 0.0); e_len];
    let mut out = Vec::with_capacity(l);
    for m in 0..l {
        combined.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for (q, dual) in &modes {
            let ph = roots[grid.phase_index(m, grid.freq(*q))];
            for (c, d) in combined.iter_mut().zip(dual) {
                *c += ph * d;
            }
        }
        out.push(evaluator.norm_of_spectrum(&combined).value);
    }
    Ok(out)
}

/// `rescaled_slice_norm` for `4 ≤ k ≤ jmax − 1`.
pub fn rescaled_slice_norm(a: &Symbol, partition: &LpPartition, k: usize, t: f64) -> Result<SliceNorm> {
    let grid = a.grid();
    grid.check_same(&partition.grid())?;
    let jmax = partition.jmax();
    ensure!(k >= 4 && k < jmax, Parameter, "slice scale k = {k} must satisfy 4 ≤ k ≤ {}", jmax - 1);
    let evaluator = HomogeneousBesov::new(grid.dim(), t)?;
    let spectrum = symbol_spectrum(a);
    let l = grid.len();
    let dim = grid.dim();
    let low = low_part_spectrum(&spectrum, partition, k);
    let global = low.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = 2f64.powf(k as f64 * a.order());
    let box_points = (2.0 * BOX_HALF_WIDTH) as usize * (1 << k);
    if global == 0.0 {
        return Ok(SliceNorm {
            k,
            t,
            order: a.order(),
            besov: 0.0,
            surrogate: 0.0,
            scale,
            besov_ratio: 0.0,
            surrogate_ratio: 0.0,
            box_points,
            eval_points: evaluator.eval_points(),
        });
    }

    let besov = box_norms_per_point(grid, &low, k, &evaluator)?.into_iter().fold(0.0, f64::max);

    // lattice-difference surrogate of Σ_{|α|≤n+1} ‖D^α_ξ slice‖_{L₁,ξ}
    let plan = FourierPlan::new(grid);
    let mut samples = vec![Complex64::new(0.0, 0.0); l * l];
    let mut col = vec![Complex64::new(0.0, 0.0); l];
    for i in 0..l {
        col.copy_from_slice(&low[i * l..(i + 1) * l]);
        if col.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            continue;
        }
        plan.inverse_in_place(&mut col);
        for (m, v) in col.iter().enumerate() {
            samples[m * l + i] = *v;
        }
    }
    let alphas: Vec<[usize; 2]> = if dim == 1 {
        (0..=2).map(|a| [a, 0]).collect()
    } else {
        (0..=3usize).flat_map(|s| (0..=s).map(move |a| [a, s - a])).collect()
    };
    let dyadic = 2f64.powi(k as i32);
    let cell = dyadic.powi(-(dim as i32));
    let mut surrogate = 0.0f64;
    for m in 0..l {
        let row = &samples[m * l..(m + 1) * l];
        let mut total = 0.0;
        for alpha in &alphas {
            let mut d = row.to_vec();
            for axis in 0..dim {
                for _ in 0..alpha[axis] {
                    d = central_difference(grid, &d, axis);
                }
            }
            let order = (alpha[0] + alpha[1]) as i32;
            total += dyadic.powi(order) * cell * d.iter().map(|v| v.norm()).sum::<f64>();
        }
        surrogate = surrogate.max(total);
    }

    Ok(SliceNorm {
        k,
        t,
        order: a.order(),
        besov,
        surrogate,
        scale,
        besov_ratio: besov / scale,
        surrogate_ratio: surrogate / scale,
        box_points,
        eval_points: evaluator.eval_points(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, spectral_support, Freq, SpectralFunction};
    use crate::lp::build_partition;
    use crate::random::stream_rng;
    use crate::symbol::{bessel_symbol, ching_symbol, random_symbol, ChingParams, SymbolType};

    #[test]
    fn multiplier_blocks_vanish_above_zero() {
        let g = make_grid(1, 6).unwrap();
        let p = build_partition(g);
        let a = Symbol::multiplier(g, 0.0, SymbolType::Classical, |k| Complex64::new(1.0 / (1.0 + k.norm()), 0.0)).unwrap();
        for j in 1..=p.jmax() {
            let b = symbol_block(&a, &p, j, 3).unwrap();
            assert!(b.symbol.max_abs() < 1e-14);
        }
        assert!(symbol_block(&a, &p, 0, 3).unwrap().symbol.max_abs() > 0.05);
        assert!(symbol_block(&a, &p, 0, p.jmax() + 1).is_err());
    }

    #[test]
    fn block_supports() {
        let g = make_grid(1, 6).unwrap();
        let p = build_partition(g);
        let a = random_symbol(g, 20.0, 20.0, &mut stream_rng(4, 0)).unwrap();
        for (j, k) in [(0, 3), (2, 4), (3, 1), (4, 4)] {
            let b = symbol_block(&a, &p, j, k).unwrap();
            let s = symbol_spectrum(&b.symbol);
            let cutoff = 1e-10 * s.max_abs();
            let tilde = p.tilde(k);
            for (xi, eta, _) in s.support(cutoff) {
                assert!(p.value(j as i64, xi) > 0.0, "x-spectrum {xi} outside block {j}");
                assert!(tilde[g.freq_index(eta).unwrap()] > 0.0);
            }
            // each column's x-spectrum is inside supp Φ_j by direct thresholding
            for i in 0..g.len() {
                let col = SpectralFunction::new(g, s.column(i).to_vec()).unwrap();
                for xi in spectral_support(&col, 1e-10).points {
                    assert!(p.value(j as i64, xi) > 0.0);
                }
            }
        }
    }

    #[test]
    fn blocks_recompose_with_triple_overlap() {
        let g = make_grid(1, 6).unwrap();
        let p = build_partition(g);
        let a = random_symbol(g, 30.0, 30.0, &mut stream_rng(8, 0)).unwrap();
        let l = g.len();
        let mut total = vec![Complex64::new(0.0, 0.0); l * l];
        let spec = symbol_spectrum(&a);
        for j in 0..=p.jmax() {
            for k in 0..=p.jmax() {
                let b = block_from_spectrum(&a, &spec, &p, j, k).unwrap();
                for (t, v) in total.iter_mut().zip(b.symbol.samples()) {
                    *t += v;
                }
            }
        }
        let tilde_sum: Vec<f64> = (0..l).map(|i| (0..=p.jmax()).map(|k| p.tilde(k)[i]).sum()).collect();
        for m in 0..l {
            for i in 0..l {
                let want = a.at(m, i) * tilde_sum[i];
                assert!((total[m * l + i] - want).norm() < 1e-10);
            }
        }
        // Σ_k Φ̃_k = 3 away from the two boundary blocks
        let mid = g.freq_index(Freq::new1(8)).unwrap();
        assert!((tilde_sum[mid] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn identity_slices_are_scale_invariant() {
        let g = make_grid(1, 9).unwrap();
        let p = build_partition(g);
        let a = Symbol::identity(g).unwrap();
        let norms: Vec<f64> = (4..=7).map(|k| rescaled_slice_norm(&a, &p, k, 0.75).unwrap().besov).collect();
        for v in &norms[..3] {
            assert!(*v > 0.0);
            assert!((v / norms[0] - 1.0).abs() < 0.05, "{norms:?}");
        }
        // Φ̃_{jmax−1} contains the truncated top block
        assert!((norms[3] / norms[0] - 1.0).abs() < 0.15, "{norms:?}");
    }

    #[test]
    fn bessel_ratio_flat_in_k() {
        let g = make_grid(1, 9).unwrap();
        let p = build_partition(g);
        let a = bessel_symbol(g, 1.0, |x| Complex64::new(1.0 + 0.5 * x[0].cos(), 0.0)).unwrap();
        let r: Vec<SliceNorm> = (4..=7).map(|k| rescaled_slice_norm(&a, &p, k, 0.75).unwrap()).collect();
        for s in &r {
            assert!((s.besov_ratio / r[0].besov_ratio - 1.0).abs() < 0.5, "{:?}", s);
        }
        // at k = jmax − 1 the slice meets the top block and the lattice edge,
        // where lattice differences of the untruncated symbol blow up
        for s in &r[..3] {
            assert!((s.surrogate_ratio / r[0].surrogate_ratio - 1.0).abs() < 0.5, "{:?}", s);
        }
    }

    #[test]
    fn ching_ratio_bounded() {
        let g = make_grid(1, 9).unwrap();
        let p = build_partition(g);
        let a = ching_symbol(g, &ChingParams::new(1.0, 2, 6)).unwrap();
        for k in 4..=7 {
            let s = rescaled_slice_norm(&a, &p, k, 0.5).unwrap();
            assert!(s.besov.is_finite() && s.surrogate.is_finite());
        }
        assert!(rescaled_slice_norm(&a, &p, 3, 0.5).is_err());
        assert!(rescaled_slice_norm(&a, &p, p.jmax(), 0.5).is_err());
    }
}
