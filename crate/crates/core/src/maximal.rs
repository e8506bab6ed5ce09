//! The `t`-maximal function `M_t f = sup_r (avg_{B(x,r)} |f|^t)^{1/t}` over
//! open periodic balls, and the two estimates that use it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::grid::{lp_norm, spectral_support, Exponent, FourierPlan, GridFunction, TorusGrid, DEFAULT_SUPPORT_THRESHOLD};
use crate::lp::{HomogeneousBesov, LpPartition};
use crate::operator::apply_direct;
use crate::symbol::{box_norms_per_point, symbol_spectrum, Symbol};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximalParams {
    t: f64,
    radii: Vec<f64>,
}

impl MaximalParams {
    /// Radii in `(0, π]`, increasing, the smallest at least one grid spacing.
    pub fn new(grid: TorusGrid, t: f64, radii: Vec<f64>) -> Result<Self> {
        ensure!(t > 0.0 && t <= 1.0, Parameter, "t must lie in (0, 1], got {t}");
        ensure!(!radii.is_empty(), Parameter, "radius list is empty");
        ensure!(radii.windows(2).all(|w| w[0] < w[1]), Parameter, "radii must be increasing");
        let h = grid.spacing();
        ensure!(radii[0] >= h * (1.0 - 1e-12), Parameter, "smallest radius {} is below the spacing {h}", radii[0]);
        ensure!(
            radii[radii.len() - 1] <= std::f64::consts::PI * (1.0 + 1e-12),
            Parameter,
            "radii must not exceed π"
        );
        Ok(MaximalParams { t, radii })
    }

    /// Dyadic radii `2^m·(2π/N)`, `m = 0..=log₂(N/2)`.
    pub fn dyadic(grid: TorusGrid, t: f64) -> Result<Self> {
        let h = grid.spacing();
        let radii = (0..grid.depth()).map(|m| h * 2f64.powi(m as i32)).collect();
        MaximalParams::new(grid, t, radii)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

/// Ball averages of `g` over the open periodic ball of radius `r = R·h`.
fn ball_averages(grid: TorusGrid, g: &[f64], radius_units: f64) -> Vec<f64> {
    let n = grid.points_per_axis();
    let r2 = radius_units * radius_units;
    // largest integer offset strictly inside the ball
    let reach = |rest: f64| -> usize {
        if rest <= 0.0 {
            return 0;
        }
        let mut w = rest.sqrt().ceil() as usize;
        while w > 0 && (w * w) as f64 >= rest {
            w -= 1;
        }
        w.min((n - 1) / 2)
    };
    if grid.dim() == 1 {
        let w = reach(r2);
        let prefix = periodic_prefix(g);
        (0..n).map(|m| window_sum(&prefix, n, m, w) / (2 * w + 1) as f64).collect()
    } else {
        let rows: Vec<Vec<f64>> = g.chunks(n).map(periodic_prefix).collect();
        let a_max = reach(r2);
        let widths: Vec<usize> = (0..=a_max).map(|a| reach(r2 - (a * a) as f64)).collect();
        let count: usize = (0..=a_max).map(|a| (2 * widths[a] + 1) * if a == 0 { 1 } else { 2 }).sum();
        let mut out = vec![0.0; n * n];
        for m1 in 0..n {
            for m2 in 0..n {
                let mut s = 0.0;
                for (a, &w) in widths.iter().enumerate() {
                    s += window_sum(&rows[(m1 + a) % n], n, m2, w);
                    if a > 0 {
                        s += window_sum(&rows[(m1 + n - a) % n], n, m2, w);
                    }
                }
                out[m1 * n + m2] = s / count as f64;
            }
        }
        out
    }
}

/// Prefix sums over two periods so that any window of length ≤ n is one difference.
fn periodic_prefix(row: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(2 * row.len() + 1);
    p.push(0.0);
    let mut acc = 0.0;
    for v in row.iter().chain(row) {
        acc += v;
        p.push(acc);
    }
    p
}

/// `Σ_{|a| ≤ w} row[(c + a) mod n]`.
fn window_sum(prefix: &[f64], n: usize, c: usize, w: usize) -> f64 {
    let start = (c + n - w) % n;
    prefix[start + 2 * w + 1] - prefix[start]
}

/// `maximal_function`: real, nonnegative samples of `M_t f`.
pub fn maximal_function(f: &GridFunction, params: &MaximalParams) -> GridFunction {
    let grid = f.grid();
    let t = params.t;
    let g: Vec<f64> = f.values().iter().map(|v| v.norm().powf(t)).collect();
    let h = grid.spacing();
    let mut best = vec![0.0f64; g.len()];
    for &r in &params.radii {
        for (b, v) in best.iter_mut().zip(ball_averages(grid, &g, r / h)) {
            *b = b.max(v);
        }
    }
    let values = best.into_iter().map(|v| Complex64::new(v.powf(1.0 / t), 0.0)).collect();
    GridFunction::from_vec_unchecked(grid, values)
}

/// Outcome of one pointwise comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PointwiseRatio {
    /// `sup_x |b(x,D)v(x)| / (‖b(x,2^k·)‖_{Ḃ^{n/t}_{1,t}} M_t v(x))`.
    pub ratio: f64,
    pub k: usize,
    pub t: f64,
    /// Grid index attaining the sup.
    pub argmax: usize,
}

/// `pointwise_estimate_ratio`. The `ξ`-support of `b` must lie in the
/// annulus `2^{k−3} ≤ |ξ| ≤ 2^k` (so that the rescaled symbol meets the
/// homogeneous norm's support requirement) and `supp v̂` in `|ξ| ≤ 2^k`.
pub fn pointwise_estimate_ratio(b: &Symbol, v: &GridFunction, k: usize, t: f64) -> Result<PointwiseRatio> {
    let grid = b.grid();
    grid.check_same(&v.grid())?;
    ensure!(k + 2 <= grid.depth() as usize, Parameter, "scale k = {k} exceeds J − 2 = {}", grid.depth() - 2);
    let dyadic = 2f64.powi(k as i32);
    let vh = FourierPlan::new(grid).forward(v);
    if let Some(far) = spectral_support(&vh, DEFAULT_SUPPORT_THRESHOLD).points.iter().find(|p| p.norm() > dyadic) {
        return Err(Error::Precondition(format!("input spectrum reaches {far}, outside |ξ| ≤ 2^{k}")));
    }
    let l = grid.len();
    let cutoff = DEFAULT_SUPPORT_THRESHOLD * b.max_abs();
    for i in 0..l {
        let r = grid.freq(i).norm();
        if !(dyadic / 8.0..=dyadic).contains(&r) && (0..l).any(|m| b.at(m, i).norm() > cutoff) {
            return Err(Error::Precondition(format!(
                "symbol is nonzero at |ξ| = {r}, outside the annulus [2^{}, 2^{k}]",
                k as i64 - 3
            )));
        }
    }
    let evaluator = HomogeneousBesov::new(grid.dim(), t)?;
    let spectrum = symbol_spectrum(b);
    let norms = box_norms_per_point(grid, spectrum.coeffs(), k, &evaluator)?;
    let numer = apply_direct(b, v)?;
    let maximal = maximal_function(v, &MaximalParams::dyadic(grid, t)?);
    let denominators: Vec<f64> = norms.iter().zip(maximal.values()).map(|(n, m)| n * m.re).collect();
    let floor = 1e-14 * denominators.iter().cloned().fold(0.0, f64::max);
    let mut ratio = 0.0;
    let mut argmax = 0;
    for (m, (num, den)) in numer.values().iter().zip(&denominators).enumerate() {
        if *den > floor && num.norm() / den > ratio {
            ratio = num.norm() / den;
            argmax = m;
        }
    }
    Ok(PointwiseRatio { ratio, k, t, argmax })
}

/// `vector_maximal_check`: `‖Σ_k M_t u_k‖_p / ‖Σ_k |u_k|‖_p` for `t < 1 ≤ p < ∞`.
pub fn vector_maximal_check(u: &GridFunction, partition: &LpPartition, p: f64, t: f64) -> Result<f64> {
    ensure!(t > 0.0 && t < 1.0, Parameter, "vector maximal check needs 0 < t < 1, got t = {t}");
    ensure!((1.0..f64::INFINITY).contains(&p), Parameter, "vector maximal check needs 1 ≤ p < ∞, got p = {p}");
    let grid = u.grid();
    let params = MaximalParams::dyadic(grid, t)?;
    let mut maximal_sum = GridFunction::zeros(grid);
    let mut abs_sum = GridFunction::zeros(grid);
    for block in partition.decompose(u)? {
        maximal_sum.add_assign(&maximal_function(&block, &params));
        abs_sum.add_assign(&block.abs());
    }
    let exponent = Exponent::new(p)?;
    let denominator = lp_norm(&abs_sum, exponent);
    ensure!(denominator > 0.0, Parameter, "input has zero norm");
    Ok(lp_norm(&maximal_sum, exponent) / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::lp::build_partition;
    use crate::random::{random_band_limited, stream_rng};

    /// Double loop over all grid points with the periodic distance.
    fn brute_force(f: &GridFunction, params: &MaximalParams) -> Vec<f64> {
        let grid = f.grid();
        let n = grid.points_per_axis() as i64;
        let h = grid.spacing();
        let axis = |a: usize, b: usize| {
            let d = (a as i64 - b as i64).rem_euclid(n);
            d.min(n - d) as f64 * h
        };
        (0..grid.len())
            .map(|m| {
                let [a1, a2] = grid.spatial_index(m);
                params
                    .radii
                    .iter()
                    .map(|&r| {
                        let (mut s, mut c) = (0.0, 0usize);
                        for q in 0..grid.len() {
                            let [b1, b2] = grid.spatial_index(q);
                            if axis(a1, b1).hypot(axis(a2, b2)) < r * (1.0 - 1e-12) {
                                s += f.values()[q].norm().powf(params.t);
                                c += 1;
                            }
                        }
                        (s / c as f64).powf(1.0 / params.t)
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    #[test]
    fn constant_is_fixed() {
        let g = make_grid(2, 4).unwrap();
        let f = GridFunction::constant(g, Complex64::new(3.0, -4.0));
        let m = maximal_function(&f, &MaximalParams::dyadic(g, 0.5).unwrap());
        assert!(m.values().iter().all(|v| (v.re - 5.0).abs() < 1e-12 && v.im == 0.0));
    }

    #[test]
    fn matches_brute_force() {
        for (dim, depth) in [(1, 6), (2, 4)] {
            let g = make_grid(dim, depth).unwrap();
            let f = random_band_limited(g, 5.0, &mut stream_rng(1, 0));
            for t in [1.0, 0.5] {
                let params = MaximalParams::dyadic(g, t).unwrap();
                let fast = maximal_function(&f, &params);
                let slow = brute_force(&f, &params);
                let scale = slow.iter().cloned().fold(0.0, f64::max);
                for (a, b) in fast.values().iter().zip(&slow) {
                    assert!((a.re - b).abs() < 1e-12 * scale, "{a} {b}");
                }
            }
            // non-dyadic radii as well
            let radii = vec![g.spacing() * 1.5, g.spacing() * 2.9, g.spacing() * 5.0];
            let params = MaximalParams::new(g, 1.0, radii).unwrap();
            let fast = maximal_function(&f, &params);
            for (a, b) in fast.values().iter().zip(brute_force(&f, &params)) {
                assert!((a.re - b).abs() < 1e-12 * b.max(1.0));
            }
        }
    }

    #[test]
    fn dominates_modulus_and_is_monotone() {
        let g = make_grid(1, 7).unwrap();
        let f = random_band_limited(g, 20.0, &mut stream_rng(2, 0));
        let bigger = GridFunction::new(g, f.values().iter().map(|v| v * 1.5 + v.norm() * 0.1).collect()).unwrap();
        let params = MaximalParams::dyadic(g, 0.5).unwrap();
        let mf = maximal_function(&f, &params);
        let mg = maximal_function(&bigger, &params);
        for ((a, b), v) in mf.values().iter().zip(mg.values()).zip(f.values()) {
            assert!(a.re >= v.norm() * (1.0 - 1e-12));
            assert!(a.re <= b.re * (1.0 + 1e-12));
        }
        let scaled = maximal_function(&f.scale(Complex64::new(0.0, -2.0)), &params);
        for (a, b) in mf.values().iter().zip(scaled.values()) {
            assert!((2.0 * a.re - b.re).abs() < 1e-12 * b.re.max(1.0));
        }
    }

    #[test]
    fn power_mean_ordering() {
        let g = make_grid(2, 4).unwrap();
        let f = random_band_limited(g, 6.0, &mut stream_rng(3, 0));
        let half = maximal_function(&f, &MaximalParams::dyadic(g, 0.5).unwrap());
        let one = maximal_function(&f, &MaximalParams::dyadic(g, 1.0).unwrap());
        for (a, b) in half.values().iter().zip(one.values()) {
            assert!(a.re <= b.re * (1.0 + 1e-12));
        }
    }

    #[test]
    fn dyadic_radii_lose_at_most_a_fixed_factor() {
        for (dim, depth) in [(1, 8), (2, 5)] {
            let g = make_grid(dim, depth).unwrap();
            let f = random_band_limited(g, 10.0, &mut stream_rng(4, 0));
            for t in [0.5, 1.0] {
                let dyadic = maximal_function(&f, &MaximalParams::dyadic(g, t).unwrap());
                let all = (1..=g.half()).map(|r| r as f64 * g.spacing()).collect();
                let fine = maximal_function(&f, &MaximalParams::new(g, t, all).unwrap());
                let bound = 2f64.powi(dim as i32 + 1).powf(1.0 / t);
                for (a, b) in dyadic.values().iter().zip(fine.values()) {
                    assert!(a.re <= b.re * (1.0 + 1e-12) && b.re <= bound * a.re);
                }
            }
        }
    }

    #[test]
    fn parameter_validation() {
        let g = make_grid(1, 5).unwrap();
        assert!(MaximalParams::new(g, 0.5, vec![]).is_err());
        assert!(MaximalParams::new(g, 0.5, vec![0.01]).is_err());
        assert!(MaximalParams::new(g, 1.5, vec![1.0]).is_err());
        assert!(MaximalParams::new(g, 0.5, vec![1.0, 0.5]).is_err());
        assert!(MaximalParams::new(g, 0.5, vec![4.0]).is_err());
        let u = GridFunction::constant(g, Complex64::new(1.0, 0.0));
        let p = build_partition(g);
        assert!(vector_maximal_check(&u, &p, 2.0, 1.0).is_err());
        assert!(vector_maximal_check(&u, &p, f64::INFINITY, 0.5).is_err());
    }

    #[test]
    fn vector_maximal_examples() {
        let g = make_grid(1, 7).unwrap();
        let p = build_partition(g);
        let one = GridFunction::constant(g, Complex64::new(1.0, 0.0));
        assert!((vector_maximal_check(&one, &p, 2.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
        let single = GridFunction::mode(g, crate::grid::Freq::new1(16));
        let r = vector_maximal_check(&single, &p, 2.0, 0.5).unwrap();
        let params = MaximalParams::dyadic(g, 0.5).unwrap();
        let want = lp_norm(&maximal_function(&single, &params), Exponent::new(2.0).unwrap())
            / lp_norm(&single, Exponent::new(2.0).unwrap());
        assert!((r - want).abs() < 1e-10 * want);
    }

    #[test]
    fn vector_maximal_stable_in_depth() {
        let ratios: Vec<f64> = (6..=8)
            .map(|depth| {
                let g = make_grid(1, depth).unwrap();
                let u = random_band_limited(g, g.half() as f64 / 2.0, &mut stream_rng(5, depth as u64));
                vector_maximal_check(&u, &build_partition(g), 2.0, 0.5).unwrap()
            })
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi / lo < 2.0, "{ratios:?}");
    }

    #[test]
    fn pointwise_identity_like_symbol() {
        // annular cutoff b(x,ξ) = Φ-type multiplier: b(x,D)v = v when supp v̂ sits where b = 1
        let g = make_grid(1, 9).unwrap();
        let k = 5;
        let b = crate::symbol::Symbol::multiplier(g, 0.0, crate::symbol::SymbolType::Classical, |q| {
            let r = q.norm() / 32.0;
            Complex64::new(crate::lp::smooth_step((r - 0.125) * 8.0) * crate::lp::smooth_step((1.0 - r) * 8.0), 0.0)
        })
        .unwrap();
        let v = GridFunction::mode(g, crate::grid::Freq::new1(16));
        let r = pointwise_estimate_ratio(&b, &v, k, 0.5).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        let far = GridFunction::mode(g, crate::grid::Freq::new1(40));
        assert!(matches!(pointwise_estimate_ratio(&b, &far, k, 0.5), Err(Error::Precondition(_))));
        let wide = crate::symbol::Symbol::identity(g).unwrap();
        assert!(pointwise_estimate_ratio(&wide, &v, k, 0.5).is_err());
    }
}
