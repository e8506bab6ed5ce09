use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{GridFunction, SpectralFunction, TorusGrid};

/// Forward and inverse FFT plans for one grid.
///
/// Normalization: `û(κ) = N^{-n} Σ_m u(x_m) e^{−i x_m·κ}`, and the inverse is
/// the plain exponential sum `u(x_m) = Σ_κ û(κ) e^{i x_m·κ}`.
#[derive(Clone)]
pub struct FourierPlan {
    grid: TorusGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FourierPlan {
    pub fn new(grid: TorusGrid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.points_per_axis();
        FourierPlan { grid, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn forward(&self, u: &GridFunction) -> SpectralFunction {
        assert_eq!(u.grid(), self.grid, "grid mismatch");
        let mut data = u.values().to_vec();
        self.forward_in_place(&mut data);
        SpectralFunction::from_vec_unchecked(self.grid, data)
    }

    pub fn inverse(&self, uh: &SpectralFunction) -> GridFunction {
        assert_eq!(uh.grid(), self.grid, "grid mismatch");
        let mut data = uh.coeffs().to_vec();
        self.inverse_in_place(&mut data);
        GridFunction::from_vec_unchecked(self.grid, data)
    }

    /// Spatial samples to shifted, normalized coefficients, in place.
    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
        let scale = 1.0 / self.grid.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
        self.shift(data);
    }

    /// Shifted coefficients to spatial samples, in place.
    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        self.shift(data);
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        fft_nd(data, self.grid.points_per_axis(), self.grid.dim(), fft.as_ref());
    }

    fn shift(&self, data: &mut [Complex64]) {
        shift_nd(data, self.grid.points_per_axis(), self.grid.dim());
    }
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("grid", &self.grid).finish()
    }
}

/// Unnormalized FFT along every axis of a row-major `nᵈ` array.
pub(crate) fn fft_nd(data: &mut [Complex64], n: usize, dim: usize, fft: &dyn Fft<f64>) {
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    if dim == 2 {
        transpose_square(data, n);
        fft.process_with_scratch(data, &mut scratch);
        transpose_square(data, n);
    }
}

/// Swaps storage order between FFT order `0..n` and signed order
/// `−n/2..n/2` on every axis. Shifting by `n/2` is an involution.
pub(crate) fn shift_nd(data: &mut [Complex64], n: usize, dim: usize) {
    let h = n / 2;
    if dim == 1 {
        data.rotate_left(h);
    } else {
        for row in data.chunks_mut(n) {
            row.rotate_left(h);
        }
        data.rotate_left(h * n);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

pub fn forward_fourier(u: &GridFunction) -> SpectralFunction {
    FourierPlan::new(u.grid()).forward(u)
}

pub fn inverse_fourier(uh: &SpectralFunction) -> GridFunction {
    FourierPlan::new(uh.grid()).inverse(uh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Freq};
    use crate::random::random_grid_function;

    fn rel_sup_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
    }

    #[test]
    fn constant_has_single_zero_mode() {
        for g in [make_grid(1, 5).unwrap(), make_grid(2, 4).unwrap()] {
            let u = GridFunction::constant(g, Complex64::new(1.0, 0.0));
            let uh = forward_fourier(&u);
            for (i, c) in uh.coeffs().iter().enumerate() {
                let expected = if g.freq(i) == Freq::ZERO { 1.0 } else { 0.0 };
                assert!((c - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pure_mode_lands_on_its_frequency() {
        let g = make_grid(1, 4).unwrap();
        let u = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 3.0 * x[0]));
        let uh = forward_fourier(&u);
        for (i, c) in uh.coeffs().iter().enumerate() {
            let expected = if g.freq(i) == Freq::new1(3) { 1.0 } else { 0.0 };
            assert!((c - expected).norm() < 1e-13, "{i}: {c}");
        }

        let g2 = make_grid(2, 4).unwrap();
        let k = Freq::new2(-5, 2);
        let uh = forward_fourier(&GridFunction::mode(g2, k));
        assert!((uh.get(k) - 1.0).norm() < 1e-13);
        assert!(uh.max_abs() < 1.0 + 1e-13);
        assert!(uh.l1() < 1.0 + 1e-11);
    }

    #[test]
    fn round_trip_and_parseval() {
        for (g, seed) in [(make_grid(1, 7).unwrap(), 1), (make_grid(2, 5).unwrap(), 2)] {
            let u = random_grid_function(g, seed);
            let plan = FourierPlan::new(g);
            let uh = plan.forward(&u);
            let back = plan.inverse(&uh);
            assert!(rel_sup_err(back.values(), u.values()) < 1e-12);

            let lhs: f64 = uh.coeffs().iter().map(|c| c.norm_sqr()).sum();
            let rhs: f64 = u.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / g.len() as f64;
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }

    #[test]
    fn matches_direct_exponential_sum() {
        let g = make_grid(2, 3).unwrap();
        let u = random_grid_function(g, 9);
        let uh = forward_fourier(&u);
        let roots = g.roots_of_unity();
        let n = g.points_per_axis();
        for i in 0..g.len() {
            let k = g.freq(i);
            let direct: Complex64 = (0..g.len())
                .map(|m| u.values()[m] * roots[g.phase_index(m, k)].conj())
                .sum::<Complex64>()
                / (n * n) as f64;
            assert!((direct - uh.coeffs()[i]).norm() < 1e-13);
        }
    }
}

#[cfg(test)]
mod properties {
    use num_complex::Complex64;
    use proptest::prelude::*;

    use super::*;
    use crate::grid::{lp_norm, make_grid, Exponent};

    fn samples() -> impl Strategy<Value = (u32, Vec<(f64, f64)>)> {
        (3u32..=7).prop_flat_map(|j| (Just(j), prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 1usize << j)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn round_trip_and_parseval((depth, raw) in samples()) {
            let g = make_grid(1, depth).unwrap();
            let u = GridFunction::new(g, raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap();
            let plan = FourierPlan::new(g);
            let uh = plan.forward(&u);
            let back = plan.inverse(&uh);
            let scale = u.sup_norm().max(1.0);
            prop_assert!((&back - &u).sup_norm() <= 1e-11 * scale);
            // ‖u‖₂² = 2π Σ |û(κ)|² on the 1-torus.
            let energy: f64 = uh.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * 2.0 * std::f64::consts::PI;
            let l2 = lp_norm(&u, Exponent::new(2.0).unwrap());
            prop_assert!((energy.sqrt() - l2).abs() <= 1e-10 * l2.max(1.0));
        }
    }
}
