//! Homogeneous Besov quasi-norm `Ḃ^{n/t}_{1,t}` of functions of `ξ` that are
//! supported in a fixed annulus, evaluated on the periodic box `[−16, 16]ⁿ`.
//!
//! The dyadic blocks act on the Fourier dual of `ξ` (box frequencies
//! `y = 2πp/32`) and are the homogeneous blocks `φ(2^{−j}y) − φ(2^{−j+1}y)`
//! for `j ∈ [−4, 4]`. Blocks `j ≤ −3` contain no box frequency and the mean
//! `y = 0` belongs to no block; both are recorded in [`HomogeneousNorm`].

use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use super::homogeneous_block;
use crate::error::{ensure, Error, Result};
use crate::grid::fourier::{fft_nd, shift_nd};

pub const BOX_HALF_WIDTH: f64 = 16.0;
pub const HOMOGENEOUS_BLOCKS: RangeInclusive<i32> = -4..=4;
pub const MIN_BOX_POINTS: usize = 256;
pub const ANNULUS_INNER: f64 = 1.0 / 8.0;
pub const ANNULUS_OUTER: f64 = 8.0;

const SUPPORT_THRESHOLD: f64 = 1e-10;

/// Samples of a function of `ξ` on the uniform mesh
/// `ξ_i = −16 + i·32/M`, `i = 0..M` per axis, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxFunction {
    dim: usize,
    points: usize,
    values: Vec<Complex64>,
}

impl BoxFunction {
    pub fn new(dim: usize, points: usize, values: Vec<Complex64>) -> Result<Self> {
        ensure!(dim == 1 || dim == 2, Parameter, "dimension must be 1 or 2");
        ensure!(
            points >= MIN_BOX_POINTS && points % 2 == 0,
            Parameter,
            "box mesh needs an even number of at least {MIN_BOX_POINTS} points per axis, got {points}"
        );
        ensure!(
            values.len() == points.pow(dim as u32),
            Format,
            "expected {} box samples, got {}",
            points.pow(dim as u32),
            values.len()
        );
        Ok(BoxFunction { dim, points, values })
    }

    pub fn from_fn(dim: usize, points: usize, f: impl Fn([f64; 2]) -> Complex64) -> Result<Self> {
        let shell = BoxFunction { dim, points, values: Vec::new() };
        let values = (0..points.pow(dim as u32)).map(|i| f(shell.coordinate(i))).collect();
        BoxFunction::new(dim, points, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * BOX_HALF_WIDTH / self.points as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Mesh coordinate of sample `i`.
    pub fn coordinate(&self, i: usize) -> [f64; 2] {
        let h = self.spacing();
        if self.dim == 1 {
            [-BOX_HALF_WIDTH + i as f64 * h, 0.0]
        } else {
            let (a, b) = (i / self.points, i % self.points);
            [-BOX_HALF_WIDTH + a as f64 * h, -BOX_HALF_WIDTH + b as f64 * h]
        }
    }

    /// Errors unless every sample above the relative threshold lies in
    /// `1/8 ≤ |ξ| ≤ 8`.
    pub fn check_annulus(&self) -> Result<()> {
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let cutoff = SUPPORT_THRESHOLD * max;
        for (i, v) in self.values.iter().enumerate() {
            if v.norm() > cutoff {
                let [a, b] = self.coordinate(i);
                let r = (a * a + b * b).sqrt();
                if !(ANNULUS_INNER..=ANNULUS_OUTER).contains(&r) {
                    return Err(Error::Precondition(format!(
                        "box function is nonzero at |ξ| = {r:.4}, outside the annulus [1/8, 8]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Value of the homogeneous norm together with its evaluation metadata.
#[derive(Clone, Debug, Serialize)]
pub struct HomogeneousNorm {
    pub value: f64,
    pub t: f64,
    /// `(j, 2^{jn/t} ‖Φ_j(D)g‖_{L₁})` for every block in the range.
    pub blocks: Vec<(i32, f64)>,
    pub box_half_width: f64,
    pub eval_points: usize,
}

/// Reusable evaluator: block multipliers and an FFT plan for one `(n, t, E)`.
#[derive(Clone)]
pub struct HomogeneousBesov {
    dim: usize,
    eval_points: usize,
    t: f64,
    multipliers: Vec<(i32, Vec<f64>)>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for HomogeneousBesov {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HomogeneousBesov")
            .field("dim", &self.dim)
            .field("eval_points", &self.eval_points)
            .field("t", &self.t)
            .finish()
    }
}

impl HomogeneousBesov {
    pub fn new(dim: usize, t: f64) -> Result<Self> {
        Self::with_eval_points(dim, t, MIN_BOX_POINTS)
    }

    /// `eval_points` is the per-axis size `E` of the mesh on which the
    /// blocks are sampled for the `L₁` quadrature.
    pub fn with_eval_points(dim: usize, t: f64, eval_points: usize) -> Result<Self> {
        ensure!(dim == 1 || dim == 2, Parameter, "dimension must be 1 or 2");
        ensure!(t > 0.0 && t <= 1.0, Parameter, "t must lie in (0, 1], got {t}");
        ensure!(
            eval_points >= MIN_BOX_POINTS && eval_points % 2 == 0,
            Parameter,
            "evaluation mesh needs an even number of at least {MIN_BOX_POINTS} points"
        );
        let e = eval_points as i64;
        let len = eval_points.pow(dim as u32);
        let dual_radius = |i: usize| -> f64 {
            let unit = std::f64::consts::PI / BOX_HALF_WIDTH;
            if dim == 1 {
                ((i as i64 - e / 2) as f64 * unit).abs()
            } else {
                let p1 = (i / eval_points) as i64 - e / 2;
                let p2 = (i % eval_points) as i64 - e / 2;
                ((p1 * p1 + p2 * p2) as f64).sqrt() * unit
            }
        };
        let radii: Vec<f64> = (0..len).map(dual_radius).collect();
        let multipliers = HOMOGENEOUS_BLOCKS
            .map(|j| (j, radii.iter().map(|&r| homogeneous_block(j, r)).collect()))
            .collect();
        let inverse = FftPlanner::new().plan_fft_inverse(eval_points);
        Ok(HomogeneousBesov { dim, eval_points, t, multipliers, inverse })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eval_points(&self) -> usize {
        self.eval_points
    }

    /// Normalized box-Fourier coefficients `c_p = M^{−n} Σ_i g(ξ_i) e^{−2πi p·i/M}`
    /// for `|p| < min(E, M)/2`, laid out in signed order on the `Eⁿ` array.
    pub fn dual_spectrum(&self, g: &BoxFunction) -> Vec<Complex64> {
        assert_eq!(g.dim, self.dim, "dimension mismatch");
        self.dual_spectrum_raw(g.values(), g.points)
    }

    pub(crate) fn dual_spectrum_raw(&self, values: &[Complex64], points: usize) -> Vec<Complex64> {
        let mut data = values.to_vec();
        let fft = FftPlanner::new().plan_fft_forward(points);
        fft_nd(&mut data, points, self.dim, fft.as_ref());
        shift_nd(&mut data, points, self.dim);
        let norm = 1.0 / (points.pow(self.dim as u32)) as f64;
        let e = self.eval_points as i64;
        let m = points as i64;
        let keep = (e.min(m) / 2) - 1;
        let mut out = vec![Complex64::new(0.0, 0.0); self.eval_points.pow(self.dim as u32)];
        if self.dim == 1 {
            for p in -keep..=keep {
                out[(p + e / 2) as usize] = data[(p + m / 2) as usize] * norm;
            }
        } else {
            for p1 in -keep..=keep {
                for p2 in -keep..=keep {
                    let src = (p1 + m / 2) as usize * points + (p2 + m / 2) as usize;
                    let dst = (p1 + e / 2) as usize * self.eval_points + (p2 + e / 2) as usize;
                    out[dst] = data[src] * norm;
                }
            }
        }
        out
    }

    /// The norm of the function whose dual spectrum is `spectrum`.
    pub fn norm_of_spectrum(&self, spectrum: &[Complex64]) -> HomogeneousNorm {
        let e = self.eval_points;
        let weight = (2.0 * BOX_HALF_WIDTH / e as f64).powi(self.dim as i32);
        let mut buf = vec![Complex64::new(0.0, 0.0); spectrum.len()];
        let exponent = self.dim as f64 / self.t;
        let mut blocks = Vec::with_capacity(self.multipliers.len());
        for (j, mult) in &self.multipliers {
            let mut any = false;
            for ((b, c), m) in buf.iter_mut().zip(spectrum).zip(mult) {
                *b = c * m;
                any |= *m != 0.0;
            }
            let l1 = if any {
                shift_nd(&mut buf, e, self.dim);
                fft_nd(&mut buf, e, self.dim, self.inverse.as_ref());
                weight * buf.iter().map(|v| v.norm()).sum::<f64>()
            } else {
                0.0
            };
            blocks.push((*j, 2f64.powf(*j as f64 * exponent) * l1));
        }
        let value = blocks.iter().map(|(_, v)| v.powf(self.t)).sum::<f64>().powf(1.0 / self.t);
        HomogeneousNorm { value, t: self.t, blocks, box_half_width: BOX_HALF_WIDTH, eval_points: e }
    }

    /// Checked evaluation: `g` must be supported in the annulus `[1/8, 8]`.
    pub fn norm(&self, g: &BoxFunction) -> Result<HomogeneousNorm> {
        ensure!(g.dim == self.dim, Parameter, "dimension mismatch");
        g.check_annulus()?;
        Ok(self.norm_of_spectrum(&self.dual_spectrum(g)))
    }
}

/// `‖g‖_{Ḃ^{n/t}_{1,t}}` with the default evaluation mesh.
pub fn homogeneous_besov_norm(g: &BoxFunction, t: f64) -> Result<HomogeneousNorm> {
    HomogeneousBesov::new(g.dim, t)?.norm(g)
}
