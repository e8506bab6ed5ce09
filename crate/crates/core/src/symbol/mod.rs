//! Symbols `a(x, ξ)` sampled on (spatial grid) × (frequency lattice).
//!
//! Samples are stored row-major as `[x][κ]`: entry `m·|Λ| + i` holds
//! `a(x_m, κ_i)`. The spectrum `â(ξ, η)` (transform in `x` only) is stored
//! column by column, `[η][ξ]`.

mod block;
mod io;
mod seminorm;
mod twisted;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::grid::{FourierPlan, Freq, TorusGrid};
use crate::lp::smooth_step;

pub use block::{rescaled_slice_norm, symbol_block, BlockSymbol, SliceNorm};
pub(crate) use block::{block_from_spectrum, box_norms_per_point};
pub use io::{read_symbol, write_symbol, SYMBOL_MAGIC};
pub use seminorm::{seminorm_estimate, SeminormEntry, SeminormTable};
pub use twisted::{twisted_diagonal_check, twisted_diagonal_fit, TwistedCheck, TwistedFit, TwistedViolation};

/// Dense symbols are refused above this many samples (`|Λ|²`).
pub const MAX_SYMBOL_SAMPLES: usize = 1 << 22;

/// Type `(ρ, δ)` of the symbol class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolType {
    /// `(1, 1)`
    Exotic,
    /// `(1, 0)`
    Classical,
}

impl SymbolType {
    pub fn rho(self) -> f64 {
        1.0
    }

    pub fn delta(self) -> f64 {
        match self {
            SymbolType::Exotic => 1.0,
            SymbolType::Classical => 0.0,
        }
    }

    pub fn from_rho_delta(rho: f64, delta: f64) -> Result<Self> {
        match (rho, delta) {
            (r, d) if r == 1.0 && d == 1.0 => Ok(SymbolType::Exotic),
            (r, d) if r == 1.0 && d == 0.0 => Ok(SymbolType::Classical),
            _ => Err(Error::Parameter(format!("unsupported type (ρ, δ) = ({rho}, {delta})"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    grid: TorusGrid,
    samples: Vec<Complex64>,
    order: f64,
    kind: SymbolType,
    twisted_constant: Option<f64>,
}

fn check_size(grid: TorusGrid) -> Result<()> {
    let len = grid.len();
    ensure!(
        len * len <= MAX_SYMBOL_SAMPLES,
        Resource,
        "a dense symbol on n={} J={} needs {} samples (limit {MAX_SYMBOL_SAMPLES})",
        grid.dim(),
        grid.depth(),
        len * len
    );
    Ok(())
}

impl Symbol {
    pub fn new(grid: TorusGrid, samples: Vec<Complex64>, order: f64, kind: SymbolType) -> Result<Self> {
        check_size(grid)?;
        ensure!(
            samples.len() == grid.len() * grid.len(),
            Format,
            "expected {} symbol samples, got {}",
            grid.len() * grid.len(),
            samples.len()
        );
        ensure!(samples.iter().all(|v| v.is_finite()), Format, "non-finite symbol sample");
        ensure!(order.is_finite(), Parameter, "order must be finite");
        Ok(Symbol { grid, samples, order, kind, twisted_constant: None })
    }

    /// `a(x_m, κ) = f(x_m, κ)`.
    pub fn from_fn(
        grid: TorusGrid,
        order: f64,
        kind: SymbolType,
        mut f: impl FnMut([f64; 2], Freq) -> Complex64,
    ) -> Result<Self> {
        check_size(grid)?;
        let freqs: Vec<Freq> = grid.frequencies().collect();
        let mut samples = Vec::with_capacity(grid.len() * grid.len());
        for m in 0..grid.len() {
            let x = grid.point(m);
            samples.extend(freqs.iter().map(|&k| f(x, k)));
        }
        Symbol::new(grid, samples, order, kind)
    }

    /// `a(x, ξ) = m(ξ)`.
    pub fn multiplier(grid: TorusGrid, order: f64, kind: SymbolType, m: impl Fn(Freq) -> Complex64) -> Result<Self> {
        Symbol::from_fn(grid, order, kind, |_, k| m(k))
    }

    /// `a ≡ 1`, order 0, type (1, 0).
    pub fn identity(grid: TorusGrid) -> Result<Self> {
        Symbol::multiplier(grid, 0.0, SymbolType::Classical, |_| Complex64::new(1.0, 0.0))
    }

    /// Attach a claimed twisted-diagonal constant `C ≥ 1`.
    pub fn with_twisted_constant(mut self, c: f64) -> Result<Self> {
        ensure!(c >= 1.0 && c.is_finite(), Parameter, "twisted-diagonal constant must be finite and ≥ 1, got {c}");
        self.twisted_constant = Some(c);
        Ok(self)
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn kind(&self) -> SymbolType {
        self.kind
    }

    pub fn twisted_constant(&self) -> Option<f64> {
        self.twisted_constant
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// `a(x_m, κ_i)` by storage indices.
    pub fn at(&self, m: usize, i: usize) -> Complex64 {
        self.samples[m * self.grid.len() + i]
    }

    /// The row `κ ↦ a(x_m, κ)`.
    pub fn row(&self, m: usize) -> &[Complex64] {
        let l = self.grid.len();
        &self.samples[m * l..(m + 1) * l]
    }

    /// The column `x ↦ a(x, κ_i)`.
    pub fn column(&self, i: usize) -> Vec<Complex64> {
        let l = self.grid.len();
        (0..l).map(|m| self.samples[m * l + i]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Same symbol with `a(x, ξ)` replaced by `a(x − h, ξ)` for a grid shift `h`
    /// given in sample units per axis.
    pub fn translate(&self, shift: [usize; 2]) -> Symbol {
        let n = self.grid.points_per_axis();
        let l = self.grid.len();
        let mut samples = vec![Complex64::new(0.0, 0.0); self.samples.len()];
        for m in 0..l {
            let [a, b] = self.grid.spatial_index(m);
            let src = if self.grid.dim() == 1 {
                (a + n - shift[0] % n) % n
            } else {
                ((a + n - shift[0] % n) % n) * n + (b + n - shift[1] % n) % n
            };
            samples[m * l..(m + 1) * l].copy_from_slice(self.row(src));
        }
        Symbol { samples, ..self.clone() }
    }
}

/// `â(ξ, η) = 𝓕_{x→ξ} a(x, η)`, stored as `[η][ξ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSpectrum {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SymbolSpectrum {
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// All coefficients, `[η][ξ]`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `ξ ↦ â(ξ, η_i)`.
    pub fn column(&self, i: usize) -> &[Complex64] {
        let l = self.grid.len();
        &self.coeffs[i * l..(i + 1) * l]
    }

    /// `â(ξ, η)`, zero outside the lattice.
    pub fn get(&self, xi: Freq, eta: Freq) -> Complex64 {
        match (self.grid.freq_index(xi), self.grid.freq_index(eta)) {
            (Some(a), Some(b)) => self.coeffs[b * self.grid.len() + a],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(ξ, η, |â(ξ, η)|)` for every entry above `cutoff`.
    pub fn support(&self, cutoff: f64) -> impl Iterator<Item = (Freq, Freq, f64)> + '_ {
        let l = self.grid.len();
        self.coeffs.iter().enumerate().filter_map(move |(idx, v)| {
            let mag = v.norm();
            (mag > cutoff).then(|| (self.grid.freq(idx % l), self.grid.freq(idx / l), mag))
        })
    }

    /// Inverse of [`symbol_spectrum`]: samples with the given order and type.
    pub fn to_symbol(&self, order: f64, kind: SymbolType) -> Result<Symbol> {
        let l = self.grid.len();
        let plan = FourierPlan::new(self.grid);
        let mut samples = vec![Complex64::new(0.0, 0.0); l * l];
        let mut col = vec![Complex64::new(0.0, 0.0); l];
        for i in 0..l {
            col.copy_from_slice(self.column(i));
            plan.inverse_in_place(&mut col);
            for (m, v) in col.iter().enumerate() {
                samples[m * l + i] = *v;
            }
        }
        Symbol::new(self.grid, samples, order, kind)
    }
}

/// Column-wise `x`-transform of the samples.
pub fn symbol_spectrum(a: &Symbol) -> SymbolSpectrum {
    let l = a.grid.len();
    let plan = FourierPlan::new(a.grid);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); l * l];
    for (i, col) in coeffs.chunks_mut(l).enumerate() {
        for (m, v) in col.iter_mut().enumerate() {
            *v = a.samples[m * l + i];
        }
        plan.forward_in_place(col);
    }
    SymbolSpectrum { grid: a.grid, coeffs }
}

/// The bump used by the Ching family: 1 on `|ζ| ≤ 1/2`, 0 on `|ζ| ≥ 1`.
pub fn ching_bump(z: f64) -> f64 {
    smooth_step(2.0 * (1.0 - z.abs()))
}

/// Parameters of the lacunary Ching family
/// `a(x, ξ) = Σ_j c_j e^{−i ω_j x₁} χ((ξ − 2^j e₁)/2^{j−2})`, `ω_j = round(r·2^j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChingParams {
    /// Modulation ratio `r ∈ (0, 1]`.
    pub ratio: f64,
    pub first_block: u32,
    pub last_block: u32,
    /// `c_j` for `j = first..=last`; empty means all ones.
    pub coefficients: Vec<f64>,
}

impl ChingParams {
    pub fn new(ratio: f64, first_block: u32, last_block: u32) -> Self {
        ChingParams { ratio, first_block, last_block, coefficients: Vec::new() }
    }

    /// `ω_j = round(r·2^j)`; integer so the modulation is a lattice mode.
    pub fn modulation(&self, j: u32) -> i64 {
        (self.ratio * 2f64.powi(j as i32)).round() as i64
    }

    pub fn block_count(&self) -> usize {
        (self.last_block - self.first_block + 1) as usize
    }
}

/// `ching_symbol`: order 0, type (1, 1), direction `e₁`.
pub fn ching_symbol(grid: TorusGrid, params: &ChingParams) -> Result<Symbol> {
    let ChingParams { ratio, first_block, last_block, .. } = *params;
    ensure!(ratio > 0.0 && ratio <= 1.0, Parameter, "modulation ratio must lie in (0, 1], got {ratio}");
    ensure!(first_block <= last_block, Parameter, "empty block range {first_block}..={last_block}");
    let count = params.block_count();
    ensure!(
        params.coefficients.is_empty() || params.coefficients.len() == count,
        Parameter,
        "expected {count} coefficients, got {}",
        params.coefficients.len()
    );
    let quarter = grid.points_per_axis() as f64 / 4.0;
    let reach = (ratio + 1.0) * 2f64.powi(last_block as i32);
    if reach > quarter {
        return Err(Error::Aliasing(format!(
            "(r + 1)·2^{last_block} = {reach} exceeds N/4 = {quarter}; lower the top block or raise J"
        )));
    }
    let n = grid.points_per_axis();
    let roots = grid.roots_of_unity();
    let freqs: Vec<Freq> = grid.frequencies().collect();
    let l = grid.len();
    let mut samples = vec![Complex64::new(0.0, 0.0); l * l];
    for (b, j) in (first_block..=last_block).enumerate() {
        let c = params.coefficients.get(b).copied().unwrap_or(1.0);
        let center = 2f64.powi(j as i32);
        let width = 2f64.powi(j as i32 - 2);
        let bump: Vec<(usize, f64)> = freqs
            .iter()
            .enumerate()
            .filter_map(|(i, k)| {
                let dz = ((k.0[0] as f64 - center).hypot(k.0[1] as f64)) / width;
                let v = ching_bump(dz);
                (v != 0.0).then_some((i, c * v))
            })
            .collect();
        let omega = params.modulation(j);
        for m in 0..l {
            let a1 = grid.spatial_index(m)[0] as i64;
            let phase = roots[(-omega * a1).rem_euclid(n as i64) as usize];
            let row = &mut samples[m * l..(m + 1) * l];
            for &(i, v) in &bump {
                row[i] += phase * v;
            }
        }
    }
    Symbol::new(grid, samples, 0.0, SymbolType::Exotic)
}

/// Elementary symbol `g(x)·(1 + |ξ|²)^{d/2}`, type (1, 0).
pub fn bessel_symbol(grid: TorusGrid, order: f64, g: impl Fn([f64; 2]) -> Complex64) -> Result<Symbol> {
    Symbol::from_fn(grid, order, SymbolType::Classical, |x, k| g(x) * (1.0 + k.norm_sq() as f64).powf(order / 2.0))
}

/// Random symbol `Σ_{|ℓ| ≤ Rx} e^{iℓ·x} g_ℓ(ξ)` with complex Gaussian
/// `g_ℓ(κ)` on `|κ| ≤ Rξ`. Declared order 0, type (1, 1).
pub fn random_symbol(grid: TorusGrid, x_radius: f64, xi_radius: f64, rng: &mut impl rand::Rng) -> Result<Symbol> {
    check_size(grid)?;
    let l = grid.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); l * l];
    for (i, col) in coeffs.chunks_mut(l).enumerate() {
        if grid.freq(i).norm() > xi_radius {
            continue;
        }
        for (q, v) in col.iter_mut().enumerate() {
            if grid.freq(q).norm() <= x_radius {
                *v = crate::random::complex_gaussian(rng);
            }
        }
    }
    SymbolSpectrum { grid, coeffs }.to_symbol(0.0, SymbolType::Exotic)
}
