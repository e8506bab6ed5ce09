use serde::{Deserialize, Serialize};

use super::LpPartition;
use crate::error::{ensure, Error, Result};
use crate::grid::{lp_norm, lp_norm_of_moduli, lq_norm, Exponent, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Besov,
    TriebelLizorkin,
    /// Acts on box-sampled functions, see [`super::homogeneous_besov_norm`].
    HomogeneousBesov,
}

/// Smoothness and exponents of a function space `B^s_{p,q}` or `F^s_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub s: f64,
    pub p: Exponent,
    pub q: Exponent,
    pub scale: Scale,
}

impl SpaceParams {
    pub fn new(scale: Scale, s: f64, p: Exponent, q: Exponent) -> Result<Self> {
        ensure!(s.is_finite(), Parameter, "smoothness must be finite, got {s}");
        if scale == Scale::TriebelLizorkin {
            ensure!(!p.is_infinite(), Parameter, "Triebel-Lizorkin norms are defined here for p<∞ only");
        }
        Ok(SpaceParams { s, p, q, scale })
    }

    pub fn besov(s: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(Scale::Besov, s, Exponent::new(p)?, Exponent::new(q)?)
    }

    pub fn triebel_lizorkin(s: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(Scale::TriebelLizorkin, s, Exponent::new(p)?, Exponent::new(q)?)
    }

    /// Norm of a grid function in this space.
    pub fn norm(&self, u: &GridFunction, partition: &LpPartition) -> Result<f64> {
        match self.scale {
            Scale::Besov => besov_norm(u, partition, self.s, self.p, self.q),
            Scale::TriebelLizorkin => triebel_lizorkin_norm(u, partition, self.s, self.p, self.q),
            Scale::HomogeneousBesov => Err(Error::Parameter(
                "homogeneous Besov norms act on box-sampled functions, not grid functions".into(),
            )),
        }
    }

    /// Same as [`SpaceParams::norm`] on precomputed blocks `u_0, …, u_{jmax}`.
    pub fn norm_of_blocks(&self, blocks: &[GridFunction]) -> Result<f64> {
        match self.scale {
            Scale::Besov => Ok(besov_from_blocks(blocks, self.s, self.p, self.q)),
            Scale::TriebelLizorkin => {
                ensure!(!self.p.is_infinite(), Parameter, "Triebel-Lizorkin norms need p<∞");
                Ok(triebel_lizorkin_from_blocks(blocks, self.s, self.p, self.q))
            }
            Scale::HomogeneousBesov => {
                Err(Error::Parameter("homogeneous Besov norms act on box-sampled functions".into()))
            }
        }
    }
}

/// `‖(2^{js} ‖u_j‖_p)_j‖_{ℓ^q}` over `j = 0..=jmax`.
pub fn besov_norm(u: &GridFunction, partition: &LpPartition, s: f64, p: Exponent, q: Exponent) -> Result<f64> {
    Ok(besov_from_blocks(&partition.decompose(u)?, s, p, q))
}

/// `‖ ‖(2^{js} u_j(x))_j‖_{ℓ^q} ‖_{L_p}`; requires `p < ∞`.
pub fn triebel_lizorkin_norm(
    u: &GridFunction,
    partition: &LpPartition,
    s: f64,
    p: Exponent,
    q: Exponent,
) -> Result<f64> {
    ensure!(!p.is_infinite(), Parameter, "Triebel-Lizorkin norms are defined here for p<∞ only");
    Ok(triebel_lizorkin_from_blocks(&partition.decompose(u)?, s, p, q))
}

fn besov_from_blocks(blocks: &[GridFunction], s: f64, p: Exponent, q: Exponent) -> f64 {
    let terms = blocks.iter().enumerate().map(|(j, b)| 2f64.powf(j as f64 * s) * lp_norm(b, p));
    lq_norm(terms, q)
}

fn triebel_lizorkin_from_blocks(blocks: &[GridFunction], s: f64, p: Exponent, q: Exponent) -> f64 {
    let grid = blocks[0].grid();
    let weights: Vec<f64> = (0..blocks.len()).map(|j| 2f64.powf(j as f64 * s)).collect();
    let pointwise = (0..grid.len()).map(|m| {
        lq_norm(blocks.iter().zip(&weights).map(|(b, w)| w * b.values()[m].norm()), q)
    });
    lp_norm_of_moduli(grid, pointwise, p)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::grid::{make_grid, Freq};
    use crate::lp::build_partition;
    use crate::random::random_grid_function;

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn constant_only_has_block_zero() {
        let g = make_grid(1, 7).unwrap();
        let p = build_partition(g);
        let one = GridFunction::constant(g, Complex64::new(1.0, 0.0));
        for (pp, q) in [(2.0, 1.0), (1.0, f64::INFINITY), (0.5, 0.5)] {
            let b = besov_norm(&one, &p, 3.0, e(pp), e(q)).unwrap();
            assert!((b - lp_norm(&one, e(pp))).abs() < 1e-10);
        }
    }

    #[test]
    fn single_dyadic_mode() {
        let g = make_grid(1, 8).unwrap();
        let p = build_partition(g);
        let u = GridFunction::mode(g, Freq::new1(32));
        let b = besov_norm(&u, &p, 1.0, Exponent::INFINITY, Exponent::INFINITY).unwrap();
        assert!((b - 32.0).abs() < 1e-10);
        for (s, pp, q) in [(1.0, 2.0, 1.0), (-0.5, 3.0, 2.0), (0.0, 1.0, f64::INFINITY)] {
            let b = besov_norm(&u, &p, s, e(pp), e(q)).unwrap();
            let f = triebel_lizorkin_norm(&u, &p, s, e(pp), e(q)).unwrap();
            assert!((b - f).abs() < 1e-10 * b, "{b} vs {f}");
        }
    }

    #[test]
    fn homogeneity() {
        let g = make_grid(1, 7).unwrap();
        let p = build_partition(g);
        let u = random_grid_function(g, 3);
        let c = Complex64::new(-1.5, 2.0);
        let cu = u.scale(c);
        let b = besov_norm(&u, &p, 0.5, e(2.0), e(1.0)).unwrap();
        let bc = besov_norm(&cu, &p, 0.5, e(2.0), e(1.0)).unwrap();
        assert!((bc - c.norm() * b).abs() < 1e-12 * bc);
    }

    #[test]
    fn f_two_two_is_comparable_to_l2() {
        let g = make_grid(1, 9).unwrap();
        let p = build_partition(g);
        let u = random_grid_function(g, 5);
        let f = triebel_lizorkin_norm(&u, &p, 0.0, e(2.0), e(2.0)).unwrap();
        let l2 = lp_norm(&u, e(2.0));
        let ratio = f * f / (l2 * l2);
        assert!((1.0 / 3.0..=3.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn monotone_in_q() {
        let g = make_grid(2, 5).unwrap();
        let p = build_partition(g);
        let u = random_grid_function(g, 8);
        let qs = [0.5, 1.0, 2.0, f64::INFINITY];
        for w in qs.windows(2) {
            let f1 = triebel_lizorkin_norm(&u, &p, 0.3, e(2.0), e(w[0])).unwrap();
            let f2 = triebel_lizorkin_norm(&u, &p, 0.3, e(2.0), e(w[1])).unwrap();
            let b1 = besov_norm(&u, &p, 0.3, e(1.5), e(w[0])).unwrap();
            let b2 = besov_norm(&u, &p, 0.3, e(1.5), e(w[1])).unwrap();
            assert!(f2 <= f1 * (1.0 + 1e-12));
            assert!(b2 <= b1 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn triebel_lizorkin_rejects_infinite_p() {
        let g = make_grid(1, 5).unwrap();
        let p = build_partition(g);
        let u = random_grid_function(g, 1);
        let err = triebel_lizorkin_norm(&u, &p, 0.0, Exponent::INFINITY, e(1.0)).unwrap_err();
        assert!(err.to_string().contains("p<∞"));
        assert!(SpaceParams::triebel_lizorkin(0.0, f64::INFINITY, 2.0).is_err());
    }
}
