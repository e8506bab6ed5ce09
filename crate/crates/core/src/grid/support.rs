use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Freq, SpectralFunction, TorusGrid};
use crate::error::{Error, Result};

/// Relative threshold below which a coefficient counts as zero.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-10;

/// Thresholded spectral support: a finite set of lattice points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    pub grid: TorusGrid,
    pub points: BTreeSet<Freq>,
    /// Absolute cutoff that produced the set (coefficients strictly above it
    /// were kept).
    pub threshold: f64,
}

impl SupportSet {
    pub fn new(grid: TorusGrid, points: impl IntoIterator<Item = Freq>) -> Result<Self> {
        let points: BTreeSet<Freq> = points.into_iter().collect();
        if let Some(bad) = points.iter().find(|k| !grid.contains(**k)) {
            return Err(Error::Parameter(format!("frequency {bad} is outside the lattice")));
        }
        Ok(SupportSet { grid, points, threshold: 0.0 })
    }

    pub fn empty(grid: TorusGrid) -> Self {
        SupportSet { grid, points: BTreeSet::new(), threshold: 0.0 }
    }

    /// Points with `|coeff| > cutoff`.
    pub fn from_cutoff(uh: &SpectralFunction, cutoff: f64) -> Self {
        let grid = uh.grid();
        let points = uh
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > cutoff)
            .map(|(i, _)| grid.freq(i))
            .collect();
        SupportSet { grid, points, threshold: cutoff }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, k: Freq) -> bool {
        self.points.contains(&k)
    }

    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.points.is_subset(&other.points)
    }

    /// Largest `|κ|` in the set, or zero when empty.
    pub fn max_norm(&self) -> f64 {
        self.points.iter().map(|k| k.norm()).fold(0.0, f64::max)
    }

    /// Smallest `|κ|` in the set, or `+∞` when empty.
    pub fn min_norm(&self) -> f64 {
        self.points.iter().map(|k| k.norm()).fold(f64::INFINITY, f64::min)
    }
}

/// `{κ : |û(κ)| > rel_threshold · max|û|}`; empty when `û ≡ 0`.
pub fn spectral_support(uh: &SpectralFunction, rel_threshold: f64) -> SupportSet {
    let max = uh.max_abs();
    if max == 0.0 {
        return SupportSet { grid: uh.grid(), points: BTreeSet::new(), threshold: 0.0 };
    }
    SupportSet::from_cutoff(uh, rel_threshold * max)
}

/// `{α + β : α ∈ A, β ∈ B}` without torus wrap-around.
///
/// Any sum leaving the lattice is an aliasing error: on the torus it would
/// fold back onto a different frequency.
pub fn minkowski_sum(a: &SupportSet, b: &SupportSet) -> Result<SupportSet> {
    a.grid.check_same(&b.grid)?;
    let grid = a.grid;
    let mut points = BTreeSet::new();
    for &x in &a.points {
        for &y in &b.points {
            let s = x + y;
            if !grid.contains(s) {
                return Err(Error::Aliasing(format!(
                    "{x} + {y} = {s} leaves the lattice [-{h}, {h}); shrink the supports or enlarge J",
                    h = grid.half()
                )));
            }
            points.insert(s);
        }
    }
    Ok(SupportSet { grid, points, threshold: a.threshold.max(b.threshold) })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::grid::{forward_fourier, make_grid, GridFunction};

    fn set(grid: TorusGrid, ks: &[i64]) -> SupportSet {
        SupportSet::new(grid, ks.iter().map(|&k| Freq::new1(k))).unwrap()
    }

    #[test]
    fn support_of_pure_mode_and_zero() {
        let g = make_grid(1, 5).unwrap();
        let uh = forward_fourier(&GridFunction::mode(g, Freq::new1(3)));
        let s = spectral_support(&uh, DEFAULT_SUPPORT_THRESHOLD);
        assert_eq!(s.points.into_iter().collect::<Vec<_>>(), vec![Freq::new1(3)]);

        let zero = SpectralFunction::zeros(g);
        assert!(spectral_support(&zero, DEFAULT_SUPPORT_THRESHOLD).is_empty());
    }

    #[test]
    fn threshold_is_relative_to_maximum() {
        let g = make_grid(1, 3).unwrap();
        let uh = SpectralFunction::from_fn(g, |k| match k.0[0] {
            0 => Complex64::new(2.0, 0.0),
            1 => Complex64::new(1e-3, 0.0),
            2 => Complex64::new(1e-12, 0.0),
            _ => Complex64::new(0.0, 0.0),
        });
        let s = spectral_support(&uh, 1e-10);
        assert_eq!(s.len(), 2);
        assert_eq!(s.threshold, 2e-10);
        assert_eq!(spectral_support(&uh, 1e-2).len(), 1);
    }

    #[test]
    fn minkowski_examples() {
        let g = make_grid(1, 4).unwrap();
        let s = minkowski_sum(&set(g, &[1]), &set(g, &[2])).unwrap();
        assert_eq!(s.points, set(g, &[3]).points);

        let s = minkowski_sum(&set(g, &[0, 1]), &set(g, &[-1, 4])).unwrap();
        assert_eq!(s.points, set(g, &[-1, 0, 4, 5]).points);

        let err = minkowski_sum(&set(g, &[7]), &set(g, &[1])).unwrap_err();
        assert!(matches!(err, Error::Aliasing(_)));
        // the negative end is inside the lattice
        assert!(minkowski_sum(&set(g, &[-7]), &set(g, &[-1])).is_ok());
        assert!(minkowski_sum(&set(g, &[-8]), &set(g, &[-1])).is_err());
    }

    #[test]
    fn minkowski_rejects_grid_mismatch() {
        let a = set(make_grid(1, 4).unwrap(), &[1]);
        let b = set(make_grid(1, 5).unwrap(), &[1]);
        assert!(matches!(minkowski_sum(&a, &b), Err(Error::GridMismatch(_))));
    }
}
