//! Discrete torus geometry and the function types that live on it.
//!
//! The torus `[0, 2π)ⁿ` is sampled on `N = 2^J` points per axis. Spatial
//! samples are stored row-major (`m = m₁·N + m₂`). Spectral coefficients are
//! indexed by the integer lattice `Λ = ℤⁿ ∩ [−N/2, N/2)ⁿ`, stored row-major in
//! signed order, i.e. storage index `i` on an axis holds frequency `i − N/2`.

pub(crate) mod fourier;
mod support;

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

pub use fourier::{forward_fourier, inverse_fourier, FourierPlan};
pub use support::{minkowski_sum, spectral_support, SupportSet, DEFAULT_SUPPORT_THRESHOLD};

/// A point of the integer frequency lattice. The second coordinate is zero
/// in dimension one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Freq(pub [i64; 2]);

impl Freq {
    pub const ZERO: Freq = Freq([0, 0]);

    pub fn new1(k: i64) -> Self {
        Freq([k, 0])
    }

    pub fn new2(k1: i64, k2: i64) -> Self {
        Freq([k1, k2])
    }

    /// Euclidean length `|κ|`.
    pub fn norm(self) -> f64 {
        let [a, b] = self.0;
        ((a * a + b * b) as f64).sqrt()
    }

    pub fn norm_sq(self) -> i64 {
        self.0[0] * self.0[0] + self.0[1] * self.0[1]
    }
}

impl Add for Freq {
    type Output = Freq;
    fn add(self, rhs: Freq) -> Freq {
        Freq([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Freq {
    type Output = Freq;
    fn sub(self, rhs: Freq) -> Freq {
        Freq([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

/// Uniform grid on the torus `[0, 2π)ⁿ` with `2^J` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    depth: u32,
}

/// Largest admissible dyadic depth for a given dimension.
pub fn max_depth(dim: usize) -> u32 {
    if dim == 2 {
        9
    } else {
        14
    }
}

impl TorusGrid {
    pub fn new(dim: usize, depth: u32) -> Result<Self> {
        ensure!(dim == 1 || dim == 2, Parameter, "dimension must be 1 or 2, got {dim}");
        ensure!(depth >= 3, Parameter, "dyadic depth must be at least 3, got {depth}");
        let max = max_depth(dim);
        ensure!(depth <= max, Parameter, "dyadic depth must be at most {max} in dimension {dim}, got {depth}");
        Ok(TorusGrid { dim, depth })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The dyadic depth `J`.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `N = 2^J`.
    pub fn points_per_axis(&self) -> usize {
        1 << self.depth
    }

    /// Total number of samples, `Nⁿ`. Also the size of the lattice `Λ`.
    pub fn len(&self) -> usize {
        self.points_per_axis().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `2π/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points_per_axis() as f64
    }

    /// Quadrature weight `(2π/N)ⁿ` of a single sample.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// `N/2`; the lattice on each axis is `[−N/2, N/2)`.
    pub fn half(&self) -> i64 {
        (self.points_per_axis() / 2) as i64
    }

    /// Frequency stored at lattice index `i`.
    pub fn freq(&self, i: usize) -> Freq {
        let n = self.points_per_axis();
        let h = self.half();
        if self.dim == 1 {
            Freq([i as i64 - h, 0])
        } else {
            Freq([(i / n) as i64 - h, (i % n) as i64 - h])
        }
    }

    /// Lattice index of a frequency, or `None` outside `Λ`.
    pub fn freq_index(&self, k: Freq) -> Option<usize> {
        let n = self.points_per_axis() as i64;
        let h = self.half();
        let axis = |v: i64| (-h..h).contains(&v).then_some((v + h) as usize);
        if self.dim == 1 {
            if k.0[1] != 0 {
                return None;
            }
            axis(k.0[0])
        } else {
            Some(axis(k.0[0])? * n as usize + axis(k.0[1])?)
        }
    }

    pub fn contains(&self, k: Freq) -> bool {
        self.freq_index(k).is_some()
    }

    /// Iterator over all lattice frequencies in storage order.
    pub fn frequencies(&self) -> impl Iterator<Item = Freq> + '_ {
        (0..self.len()).map(move |i| self.freq(i))
    }

    /// Integer coordinates `(m₁, m₂)` of spatial sample `m`.
    pub fn spatial_index(&self, m: usize) -> [usize; 2] {
        if self.dim == 1 {
            [m, 0]
        } else {
            let n = self.points_per_axis();
            [m / n, m % n]
        }
    }

    /// Coordinates of spatial sample `m` in `[0, 2π)ⁿ`.
    pub fn point(&self, m: usize) -> [f64; 2] {
        let h = self.spacing();
        let [a, b] = self.spatial_index(m);
        [a as f64 * h, b as f64 * h]
    }

    /// `(x_m · κ) mod N` in units of `2π/N`; the phase `e^{i x_m·κ}` is
    /// `roots[phase_index]` for a table of `N`-th roots of unity.
    pub fn phase_index(&self, m: usize, k: Freq) -> usize {
        let n = self.points_per_axis() as i64;
        let [a, b] = self.spatial_index(m);
        let p = a as i64 * k.0[0] + b as i64 * k.0[1];
        p.rem_euclid(n) as usize
    }

    /// Table of `e^{2πi p/N}` for `p = 0..N`.
    pub fn roots_of_unity(&self) -> Vec<Complex64> {
        let n = self.points_per_axis();
        (0..n)
            .map(|p| Complex64::from_polar(1.0, 2.0 * PI * p as f64 / n as f64))
            .collect()
    }

    pub(crate) fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "n={} J={} vs n={} J={}",
                self.dim, self.depth, other.dim, other.depth
            )));
        }
        Ok(())
    }
}

/// `make_grid`: shorthand for [`TorusGrid::new`].
pub fn make_grid(dim: usize, depth: u32) -> Result<TorusGrid> {
    TorusGrid::new(dim, depth)
}

/// Complex samples of a periodic function on a [`TorusGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: TorusGrid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self> {
        ensure!(
            values.len() == grid.len(),
            Format,
            "expected {} samples, got {}",
            grid.len(),
            values.len()
        );
        ensure!(values.iter().all(|v| v.is_finite()), Format, "non-finite sample");
        Ok(GridFunction { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: TorusGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFunction { grid, values }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        GridFunction { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn constant(grid: TorusGrid, c: Complex64) -> Self {
        GridFunction { grid, values: vec![c; grid.len()] }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: TorusGrid, mut f: impl FnMut([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|m| f(grid.point(m))).collect();
        GridFunction { grid, values }
    }

    /// The pure mode `e^{i κ·x}`.
    pub fn mode(grid: TorusGrid, k: Freq) -> Self {
        let roots = grid.roots_of_unity();
        let values = (0..grid.len()).map(|m| roots[grid.phase_index(m, k)]).collect();
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        GridFunction { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// `max_m |u(x_m)|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise modulus as a real-valued grid function.
    pub fn abs(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &GridFunction) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &GridFunction) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a -= b;
        }
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Mul<Complex64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, c: Complex64) -> GridFunction {
        self.scale(c)
    }
}

/// Fourier coefficients of a grid function, indexed by the lattice `Λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        ensure!(
            coeffs.len() == grid.len(),
            Format,
            "expected {} coefficients, got {}",
            grid.len(),
            coeffs.len()
        );
        ensure!(coeffs.iter().all(|v| v.is_finite()), Format, "non-finite coefficient");
        Ok(SpectralFunction { grid, coeffs })
    }

    pub(crate) fn from_vec_unchecked(grid: TorusGrid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralFunction { grid, coeffs }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        SpectralFunction { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: TorusGrid, mut f: impl FnMut(Freq) -> Complex64) -> Self {
        let coeffs = grid.frequencies().map(&mut f).collect();
        SpectralFunction { grid, coeffs }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at `k`, zero outside the lattice.
    pub fn get(&self, k: Freq) -> Complex64 {
        self.grid.freq_index(k).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Pointwise product with a real lattice multiplier `m(κ)`.
    pub fn multiply(&self, multiplier: &[f64]) -> SpectralFunction {
        assert_eq!(multiplier.len(), self.coeffs.len());
        SpectralFunction {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(multiplier).map(|(c, m)| c * m).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ_κ |û(κ)|`.
    pub fn l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// Integrability exponent in `(0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        ensure!(p > 0.0 && !p.is_nan(), Parameter, "exponent must lie in (0, ∞], got {p}");
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞") {
            return Ok(Exponent::INFINITY);
        }
        let v = if let Some((a, b)) = t.split_once('/') {
            let a: f64 = a.trim().parse().map_err(|_| Error::Parameter(format!("bad exponent {s:?}")))?;
            let b: f64 = b.trim().parse().map_err(|_| Error::Parameter(format!("bad exponent {s:?}")))?;
            a / b
        } else {
            t.parse().map_err(|_| Error::Parameter(format!("bad exponent {s:?}")))?
        };
        Exponent::new(v)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// `ℓ^q` (quasi-)norm of a finite sequence of nonnegative reals.
pub(crate) fn lq_norm(values: impl IntoIterator<Item = f64>, q: Exponent) -> f64 {
    if q.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else {
        let q = q.value();
        values.into_iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `L_p` (quasi-)norm by the rectangle rule, `((2π/N)ⁿ Σ |u|^p)^{1/p}`; for
/// `p = ∞` the maximum modulus.
pub fn lp_norm(u: &GridFunction, p: Exponent) -> f64 {
    lp_norm_of_moduli(u.grid(), u.values().iter().map(|v| v.norm()), p)
}

pub(crate) fn lp_norm_of_moduli(grid: TorusGrid, moduli: impl Iterator<Item = f64>, p: Exponent) -> f64 {
    if p.is_infinite() {
        moduli.fold(0.0, f64::max)
    } else {
        let p = p.value();
        (grid.cell_volume() * moduli.map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}
