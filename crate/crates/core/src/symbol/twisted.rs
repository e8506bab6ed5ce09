use serde::Serialize;

use super::{symbol_spectrum, Symbol, SymbolSpectrum};
use crate::error::{ensure, Result};
use crate::grid::{Freq, DEFAULT_SUPPORT_THRESHOLD};

const REPORTED_VIOLATIONS: usize = 10;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TwistedViolation {
    pub xi: Freq,
    pub eta: Freq,
    pub magnitude: f64,
    /// `|η| / (|ξ+η| + 1)`.
    pub ratio: f64,
}

/// Outcome of scanning `â` against `â(ξ,η) = 0 whenever C(|ξ+η|+1) ≤ |η|`.
#[derive(Clone, Debug, Serialize)]
pub struct TwistedCheck {
    pub constant: f64,
    pub threshold: f64,
    pub passed: bool,
    pub violation_count: usize,
    /// Largest violations by magnitude.
    pub worst: Vec<TwistedViolation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedFit {
    /// Smallest admissible constant, or `+∞` when the support meets
    /// `ξ + η = 0` away from `η = 0`.
    pub constant: f64,
    /// Largest `|η| / (|ξ+η| + 1)` over the thresholded support.
    pub max_ratio: f64,
    pub worst: Option<(Freq, Freq)>,
    pub threshold: f64,
}

fn ratio(xi: Freq, eta: Freq) -> f64 {
    eta.norm() / ((xi + eta).norm() + 1.0)
}

/// Checks the condition on a precomputed spectrum.
pub fn check_spectrum(spectrum: &SymbolSpectrum, constant: f64, rel_threshold: f64) -> Result<TwistedCheck> {
    ensure!(constant >= 1.0, Parameter, "twisted-diagonal constant must be ≥ 1, got {constant}");
    ensure!((0.0..1.0).contains(&rel_threshold), Parameter, "threshold must lie in [0, 1)");
    let cutoff = rel_threshold * spectrum.max_abs();
    let mut violations: Vec<TwistedViolation> = spectrum
        .support(cutoff)
        .filter(|&(xi, eta, _)| constant * ((xi + eta).norm() + 1.0) <= eta.norm())
        .map(|(xi, eta, magnitude)| TwistedViolation { xi, eta, magnitude, ratio: ratio(xi, eta) })
        .collect();
    let violation_count = violations.len();
    violations.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude).then(a.xi.cmp(&b.xi)).then(a.eta.cmp(&b.eta)));
    violations.truncate(REPORTED_VIOLATIONS);
    Ok(TwistedCheck {
        constant,
        threshold: rel_threshold,
        passed: violation_count == 0,
        violation_count,
        worst: violations,
    })
}

/// `twisted_diagonal_check`.
pub fn twisted_diagonal_check(a: &Symbol, constant: f64, rel_threshold: f64) -> Result<TwistedCheck> {
    check_spectrum(&symbol_spectrum(a), constant, rel_threshold)
}

pub fn fit_spectrum(spectrum: &SymbolSpectrum, rel_threshold: f64) -> TwistedFit {
    let cutoff = rel_threshold * spectrum.max_abs();
    let mut max_ratio = 0.0;
    let mut worst = None;
    let mut on_diagonal = false;
    for (xi, eta, _) in spectrum.support(cutoff) {
        let r = ratio(xi, eta);
        if r > max_ratio {
            max_ratio = r;
            worst = Some((xi, eta));
        }
        on_diagonal |= xi + eta == Freq::ZERO && eta != Freq::ZERO;
    }
    // the condition is strict: C = R itself fails at the pair attaining R
    let constant = if on_diagonal { f64::INFINITY } else { f64::max(1.0, max_ratio.next_up()) };
    TwistedFit { constant, max_ratio, worst, threshold: rel_threshold }
}

/// `twisted_diagonal_fit` at the default threshold.
pub fn twisted_diagonal_fit(a: &Symbol) -> TwistedFit {
    fit_spectrum(&symbol_spectrum(a), DEFAULT_SUPPORT_THRESHOLD)
}
