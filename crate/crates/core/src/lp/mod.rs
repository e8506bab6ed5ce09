//! Dyadic Littlewood–Paley partition of unity on the frequency lattice and
//! the Besov / Triebel–Lizorkin (quasi-)norms built from it.
//!
//! The radial ramp `φ` equals 1 on `|ξ| ≤ 11/10` and 0 on `|ξ| ≥ 13/10`,
//! so that for `j ≥ 1`
//!
//! * `Φ_j(κ) ≠ 0` only for `(11/20)·2^j < |κ| < (13/10)·2^j`,
//! * `Φ_j(κ) = 1` for `(13/20)·2^j ≤ |κ| ≤ (11/10)·2^j`,
//!
//! and `Φ̃_j = Φ_{j−1} + Φ_j + Φ_{j+1}` lives in `(11/40)·2^j < |κ| < (26/10)·2^j`.

mod homogeneous;
mod norms;

use std::io::Write;

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::grid::{FourierPlan, Freq, GridFunction, TorusGrid};

pub use homogeneous::{
    homogeneous_besov_norm, BoxFunction, HomogeneousBesov, HomogeneousNorm, ANNULUS_INNER, ANNULUS_OUTER,
    BOX_HALF_WIDTH, HOMOGENEOUS_BLOCKS, MIN_BOX_POINTS,
};
pub use norms::{besov_norm, triebel_lizorkin_norm, Scale, SpaceParams};

/// `φ = 1` up to this radius.
pub const INNER_EDGE: f64 = 11.0 / 10.0;
/// `φ = 0` from this radius on.
pub const OUTER_EDGE: f64 = 13.0 / 10.0;

fn exp_transition(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, built from `e^{−1/x}`.
pub fn smooth_step(x: f64) -> f64 {
    let a = exp_transition(x);
    let b = exp_transition(1.0 - x);
    a / (a + b)
}

/// The radial ramp `φ(r)`.
pub fn radial_ramp(r: f64) -> f64 {
    smooth_step((OUTER_EDGE - r) / (OUTER_EDGE - INNER_EDGE))
}

/// Homogeneous dyadic block `φ(2^{−j}r) − φ(2^{−j+1}r)`, any `j ∈ ℤ`.
pub fn homogeneous_block(j: i32, r: f64) -> f64 {
    radial_ramp(r * 2f64.powi(-j)) - radial_ramp(r * 2f64.powi(1 - j))
}

/// The family `Φ_0, …, Φ_{jmax}` sampled on the lattice, `jmax = J − 1`.
#[derive(Clone, Debug)]
pub struct LpPartition {
    grid: TorusGrid,
    jmax: usize,
    blocks: Vec<Vec<f64>>,
}

/// One line of a partition dump.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PartitionEntry {
    pub j: usize,
    pub freq: Freq,
    pub value: f64,
}

impl LpPartition {
    /// `build_partition`. The top block is `1 − φ(2^{−jmax+1}κ)`, which
    /// absorbs everything up to the Nyquist corner.
    pub fn new(grid: TorusGrid) -> Self {
        let jmax = grid.depth() as usize - 1;
        let radii: Vec<f64> = grid.frequencies().map(Freq::norm).collect();
        let ramp_at = |j: usize| -> Vec<f64> {
            let scale = 2f64.powi(-(j as i32));
            radii.iter().map(|r| radial_ramp(r * scale)).collect()
        };
        let mut blocks = Vec::with_capacity(jmax + 1);
        let mut lower = ramp_at(0);
        blocks.push(lower.clone());
        for j in 1..jmax {
            let upper = ramp_at(j);
            blocks.push(upper.iter().zip(&lower).map(|(u, l)| u - l).collect());
            lower = upper;
        }
        blocks.push(lower.iter().map(|l| 1.0 - l).collect());
        LpPartition { grid, jmax, blocks }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn jmax(&self) -> usize {
        self.jmax
    }

    /// `Φ_j` on the lattice, in storage order.
    pub fn block(&self, j: usize) -> &[f64] {
        &self.blocks[j]
    }

    /// `Φ_j(κ)`, zero for indices outside `0..=jmax`.
    pub fn value(&self, j: i64, k: Freq) -> f64 {
        if j < 0 || j as usize > self.jmax {
            return 0.0;
        }
        self.grid.freq_index(k).map_or(0.0, |i| self.blocks[j as usize][i])
    }

    /// `Φ̃_k = Φ_{k−1} + Φ_k + Φ_{k+1}` with out-of-range terms dropped.
    pub fn tilde(&self, k: usize) -> Vec<f64> {
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(self.jmax);
        let mut out = vec![0.0; self.grid.len()];
        for j in lo..=hi {
            for (o, v) in out.iter_mut().zip(&self.blocks[j]) {
                *o += v;
            }
        }
        out
    }

    /// `Ψ_k = Φ_0 + ⋯ + Φ_k`.
    pub fn psi(&self, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for j in 0..=k.min(self.jmax) {
            for (o, v) in out.iter_mut().zip(&self.blocks[j]) {
                *o += v;
            }
        }
        out
    }

    fn check_index(&self, j: usize) -> Result<()> {
        ensure!(j <= self.jmax, Parameter, "block index {j} outside 0..={}", self.jmax);
        Ok(())
    }

    /// `u_j = Φ_j(D)u`.
    pub fn lp_block(&self, u: &GridFunction, j: usize) -> Result<GridFunction> {
        self.check_index(j)?;
        self.grid.check_same(&u.grid())?;
        let plan = FourierPlan::new(self.grid);
        Ok(plan.inverse(&plan.forward(u).multiply(&self.blocks[j])))
    }

    /// All blocks `u_0, …, u_{jmax}` from a single forward transform.
    pub fn decompose(&self, u: &GridFunction) -> Result<Vec<GridFunction>> {
        self.grid.check_same(&u.grid())?;
        let plan = FourierPlan::new(self.grid);
        let uh = plan.forward(u);
        Ok(self.blocks.iter().map(|b| plan.inverse(&uh.multiply(b))).collect())
    }

    /// Every nonzero `(j, κ, Φ_j(κ))`, ordered by `j` then lattice order.
    pub fn entries(&self) -> impl Iterator<Item = PartitionEntry> + '_ {
        self.blocks.iter().enumerate().flat_map(move |(j, b)| {
            b.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(move |(i, &value)| PartitionEntry { j, freq: self.grid.freq(i), value })
        })
    }

    /// Tabular dump `j,k1[,k2],value`.
    pub fn write_dump(&self, mut out: impl Write) -> Result<()> {
        if self.grid.dim() == 1 {
            writeln!(out, "j,k1,value")?;
        } else {
            writeln!(out, "j,k1,k2,value")?;
        }
        for e in self.entries() {
            if self.grid.dim() == 1 {
                writeln!(out, "{},{},{:.17e}", e.j, e.freq.0[0], e.value)?;
            } else {
                writeln!(out, "{},{},{},{:.17e}", e.j, e.freq.0[0], e.freq.0[1], e.value)?;
            }
        }
        Ok(())
    }
}

/// `build_partition`.
pub fn build_partition(grid: TorusGrid) -> LpPartition {
    LpPartition::new(grid)
}


#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;
    use crate::grid::make_grid;
    use crate::random::random_grid_function;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn blocks_reassemble_the_input(dim in 1usize..=2, depth in 3u32..=6, seed in any::<u64>()) {
            let g = make_grid(dim, depth).unwrap();
            let p = build_partition(g);
            let u = random_grid_function(g, seed);
            let mut total = GridFunction::zeros(g);
            for b in p.decompose(&u).unwrap() {
                total.add_assign(&b);
            }
            prop_assert!((&total - &u).sup_norm() < 1e-10 * u.sup_norm());
        }

        #[test]
        fn partition_values_are_a_partition(dim in 1usize..=2, depth in 3u32..=8) {
            prop_assume!(dim == 1 || depth <= 6);
            let g = make_grid(dim, depth).unwrap();
            let p = build_partition(g);
            for i in 0..g.len() {
                let vals: Vec<f64> = (0..=p.jmax()).map(|j| p.block(j)[i]).collect();
                prop_assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
                prop_assert!(vals.iter().filter(|v| **v > 0.0).count() <= 2);
                prop_assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
