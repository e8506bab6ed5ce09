//! Experiment configuration and its key-value text format.
//!
//! One `key = value` per line; `#` starts a comment. Unknown keys are errors.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::grid::{lp_norm, Exponent, GridFunction, TorusGrid};
use crate::lp::{LpPartition, Scale, SpaceParams};
use crate::symbol::{bessel_symbol, ching_symbol, read_symbol, ChingParams, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Boundedness,
    Sharpness,
    NegativeSmoothness,
    L2Growth,
    SupportCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Boundedness,
        ExperimentKind::Sharpness,
        ExperimentKind::NegativeSmoothness,
        ExperimentKind::L2Growth,
        ExperimentKind::SupportCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Boundedness => "boundedness",
            ExperimentKind::Sharpness => "sharpness",
            ExperimentKind::NegativeSmoothness => "negsmooth",
            ExperimentKind::L2Growth => "l2growth",
            ExperimentKind::SupportCheck => "supportcheck",
        }
    }

    /// Salt for the random streams of this experiment.
    pub(crate) fn tag(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown experiment `{s}`")))
    }
}

/// A norm measured on grid functions.
///
/// Text forms: `L(p)`, `lowpass(p)` (the `L_p` norm of the lowest block),
/// `B(s,p,q)`, `F(s,p,q)`; `inf` is accepted for exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormSpec {
    Lebesgue(Exponent),
    LowPass(Exponent),
    Space(SpaceParams),
}

impl NormSpec {
    pub fn norm(&self, u: &GridFunction, partition: &LpPartition) -> Result<f64> {
        match self {
            NormSpec::Lebesgue(p) => Ok(lp_norm(u, *p)),
            NormSpec::LowPass(p) => Ok(lp_norm(&partition.lp_block(u, 0)?, *p)),
            NormSpec::Space(space) => space.norm(u, partition),
        }
    }

    /// Smoothness index; zero for the Lebesgue forms.
    pub fn smoothness(&self) -> f64 {
        match self {
            NormSpec::Space(space) => space.s,
            _ => 0.0,
        }
    }

    /// Fine index `q` of a Besov or Triebel-Lizorkin space.
    pub fn fine_index(&self) -> Option<Exponent> {
        match self {
            NormSpec::Space(space) => Some(space.q),
            _ => None,
        }
    }
}

fn exponent_text(p: Exponent) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{}", p.value())
    }
}

fn parse_exponent(s: &str) -> Result<Exponent> {
    let s = s.trim();
    let p = if matches!(s, "inf" | "infinity" | "∞") {
        f64::INFINITY
    } else {
        parse_f64(s)?
    };
    Exponent::new(p)
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Lebesgue(p) => write!(f, "L({})", exponent_text(*p)),
            NormSpec::LowPass(p) => write!(f, "lowpass({})", exponent_text(*p)),
            NormSpec::Space(sp) => {
                let letter = match sp.scale {
                    Scale::Besov => "B",
                    Scale::TriebelLizorkin => "F",
                    Scale::HomogeneousBesov => "Bdot",
                };
                write!(f, "{letter}({},{},{})", sp.s, exponent_text(sp.p), exponent_text(sp.q))
            }
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Format(format!("cannot parse norm `{text}`; expected L(p), lowpass(p), B(s,p,q) or F(s,p,q)"));
        let (head, rest) = text.trim().split_once('(').ok_or_else(bad)?;
        let args: Vec<&str> = rest.strip_suffix(')').ok_or_else(bad)?.split(',').collect();
        match (head.trim(), args.as_slice()) {
            ("L", [p]) => Ok(NormSpec::Lebesgue(parse_exponent(p)?)),
            ("lowpass", [p]) => Ok(NormSpec::LowPass(parse_exponent(p)?)),
            (scale @ ("B" | "F"), [s, p, q]) => {
                let scale = if scale == "B" { Scale::Besov } else { Scale::TriebelLizorkin };
                Ok(NormSpec::Space(SpaceParams::new(scale, parse_f64(s)?, parse_exponent(p)?, parse_exponent(q)?)?))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolKind {
    /// Lacunary modulated family, see [`ching_symbol`].
    Ching,
    /// `a ≡ 1`.
    Identity,
    /// Bessel potential `(1 + |ξ|²)^{d/2}`.
    Multiplier,
    /// Samples stored by [`crate::symbol::write_symbol`].
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    pub ratio: f64,
    pub first_block: u32,
    /// `None` picks the highest block that keeps `(r + 1)·2^j ≤ N/4`.
    pub last_block: Option<u32>,
    pub order: f64,
}

impl Default for SymbolSpec {
    fn default() -> Self {
        SymbolSpec { kind: SymbolKind::Ching, ratio: 1.0, first_block: 2, last_block: None, order: 0.0 }
    }
}

impl SymbolSpec {
    pub fn ching(ratio: f64, first_block: u32, last_block: Option<u32>) -> Self {
        SymbolSpec { ratio, first_block, last_block, ..Default::default() }
    }

    /// Highest block allowed on a grid of depth `depth`.
    pub fn top_block(&self, depth: u32) -> Option<u32> {
        let quarter = 2f64.powi(depth as i32 - 2);
        (0..depth).rev().find(|&j| (self.ratio + 1.0) * 2f64.powi(j as i32) <= quarter)
    }

    /// Block range on a grid of depth `depth`.
    pub fn blocks(&self, depth: u32) -> Result<(u32, u32)> {
        let last = match self.last_block {
            Some(j) => j,
            None => self
                .top_block(depth)
                .ok_or_else(|| Error::Aliasing(format!("no Ching block fits below N/4 at J = {depth}")))?,
        };
        ensure!(self.first_block <= last, Parameter, "empty block range {}..={last} at J = {depth}", self.first_block);
        Ok((self.first_block, last))
    }

    pub fn build(&self, grid: TorusGrid) -> Result<Symbol> {
        match &self.kind {
            SymbolKind::Ching => {
                let (first, last) = self.blocks(grid.depth())?;
                ching_symbol(grid, &ChingParams::new(self.ratio, first, last))
            }
            SymbolKind::Identity => Symbol::identity(grid),
            SymbolKind::Multiplier => bessel_symbol(grid, self.order, |_| Complex64::new(1.0, 0.0)),
            SymbolKind::File(path) => {
                let file = std::fs::File::open(path)?;
                let a = read_symbol(std::io::BufReader::new(file))?;
                grid.check_same(&a.grid())?;
                Ok(a)
            }
        }
    }

    /// Effective order `d` of the built symbol.
    pub fn effective_order(&self) -> f64 {
        match self.kind {
            SymbolKind::Ching | SymbolKind::Identity => 0.0,
            _ => self.order,
        }
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.last_block.map_or_else(|| "max".to_string(), |j| j.to_string());
        match &self.kind {
            SymbolKind::Ching => write!(f, "ching(r={},blocks={}..{last})", self.ratio, self.first_block),
            SymbolKind::Identity => f.write_str("identity"),
            SymbolKind::Multiplier => write!(f, "multiplier(d={})", self.order),
            SymbolKind::File(p) => write!(f, "file({})", p.display()),
        }
    }
}

/// How inputs are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    /// Complex Gaussian coefficients, flat on `|κ| ≤ N/4`.
    Random,
    /// Random, then scaled by `(1 + |κ|)^{−s}` with `s` the domain smoothness.
    Weighted,
    /// Lacunary sum of the modes `2^j e₁` over the symbol's blocks.
    Adversarial,
    /// Trial 0 adversarial, the others random.
    Mixed,
}

impl FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InputKind::Random),
            "weighted" => Ok(InputKind::Weighted),
            "adversarial" => Ok(InputKind::Adversarial),
            "mixed" => Ok(InputKind::Mixed),
            _ => Err(Error::Parameter(format!("unknown input kind `{s}`"))),
        }
    }
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputKind::Random => "random",
            InputKind::Weighted => "weighted",
            InputKind::Adversarial => "adversarial",
            InputKind::Mixed => "mixed",
        })
    }
}

/// Expected outcome the verdict is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// Derived from the experiment and the symbol.
    Auto,
    Bounded,
    Growing,
}

impl FromStr for Expectation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Expectation::Auto),
            "bounded" => Ok(Expectation::Bounded),
            "growing" => Ok(Expectation::Growing),
            _ => Err(Error::Parameter(format!("unknown expectation `{s}`"))),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Auto => "auto",
            Expectation::Bounded => "bounded",
            Expectation::Growing => "growing",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub dim: usize,
    pub depths: Vec<u32>,
    pub domain: NormSpec,
    pub codomain: NormSpec,
    pub symbol: SymbolSpec,
    pub trials: usize,
    pub seed: u64,
    pub input: InputKind,
    /// Block counts `M` for the sharpness and L2-growth sweeps.
    pub sweep: Vec<u32>,
    pub expect: Expectation,
    /// Largest allowed max/min spread of a bounded sweep.
    pub bound_factor: f64,
    /// Smallest log-log slope of a growing sweep.
    pub slope_min: f64,
    /// Ratio of the control symbol in the L2-growth sweep.
    pub control_ratio: f64,
    /// Relative support threshold.
    pub threshold: f64,
    pub output: Option<PathBuf>,
}

fn norm(text: &str) -> NormSpec {
    text.parse().expect("built-in norm parses")
}

impl ExperimentConfig {
    /// Defaults of each experiment.
    pub fn new(experiment: ExperimentKind) -> Self {
        let mut cfg = ExperimentConfig {
            experiment,
            dim: 1,
            depths: (6..=10).collect(),
            domain: norm("F(0,2,1)"),
            codomain: norm("L(2)"),
            symbol: SymbolSpec::default(),
            trials: 10,
            seed: 0,
            input: InputKind::Random,
            sweep: Vec::new(),
            expect: Expectation::Auto,
            bound_factor: 2.0,
            slope_min: 0.3,
            control_ratio: 0.5,
            threshold: crate::grid::DEFAULT_SUPPORT_THRESHOLD,
            output: None,
        };
        match experiment {
            ExperimentKind::Boundedness => {}
            ExperimentKind::Sharpness => {
                cfg.depths = vec![10];
                cfg.domain = norm("B(0,2,inf)");
                cfg.symbol.first_block = 0;
                cfg.sweep = (4..=8).collect();
                cfg.trials = 1;
                cfg.input = InputKind::Adversarial;
                cfg.slope_min = 0.4;
            }
            ExperimentKind::NegativeSmoothness => {
                cfg.domain = norm("F(-1,2,2)");
                cfg.codomain = norm("F(-1,2,2)");
                cfg.symbol.ratio = 0.5;
                cfg.input = InputKind::Mixed;
            }
            ExperimentKind::L2Growth => {
                cfg.depths = vec![8];
                cfg.symbol.first_block = 1;
                cfg.sweep = (1..=5).collect();
                cfg.bound_factor = 1.5;
            }
            ExperimentKind::SupportCheck => {
                cfg.depths = vec![9];
                cfg.trials = 100;
            }
        }
        cfg
    }

    /// Defaults of the experiment named by `experiment = …`, overridden by the other keys.
    pub fn parse(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let kind = pairs
            .iter()
            .find(|(k, _)| k == "experiment")
            .ok_or_else(|| Error::Format("missing `experiment` key".into()))?
            .1
            .parse()?;
        let mut cfg = Self::new(kind);
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies every `key = value` line of `text`; an `experiment` key must name this experiment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (key, value) in parse_pairs(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    /// Overrides `key` with a text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "experiment" => {
                let kind: ExperimentKind = value.parse()?;
                ensure!(kind == self.experiment, Parameter, "experiment is {}, not {kind}", self.experiment);
            }
            "dim" => self.dim = parse_int(value)?,
            "depths" | "depth" => self.depths = parse_list(value)?,
            "domain" => self.domain = value.parse()?,
            "codomain" => self.codomain = value.parse()?,
            "symbol" => {
                self.symbol.kind = match value {
                    "ching" => SymbolKind::Ching,
                    "identity" => SymbolKind::Identity,
                    "multiplier" => SymbolKind::Multiplier,
                    _ => match value.strip_prefix("file:") {
                        Some(path) => SymbolKind::File(PathBuf::from(path.trim())),
                        None => return Err(Error::Parameter(format!("unknown symbol kind `{value}`"))),
                    },
                }
            }
            "ratio" => self.symbol.ratio = parse_f64(value)?,
            "order" => self.symbol.order = parse_f64(value)?,
            "blocks" => {
                let (first, last) = value
                    .split_once("..")
                    .ok_or_else(|| Error::Format(format!("blocks must read `first..last` or `first..max`, got `{value}`")))?;
                self.symbol.first_block = parse_int(first)?;
                self.symbol.last_block = if last.trim() == "max" { None } else { Some(parse_int(last)?) };
            }
            "trials" => self.trials = parse_int(value)?,
            "seed" => self.seed = parse_int(value)?,
            "input" => self.input = value.parse()?,
            "sweep" => self.sweep = parse_list(value)?,
            "expect" => self.expect = value.parse()?,
            "bound_factor" => self.bound_factor = parse_f64(value)?,
            "slope_min" => self.slope_min = parse_f64(value)?,
            "control_ratio" => self.control_ratio = parse_f64(value)?,
            "threshold" => self.threshold = parse_f64(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(Error::Parameter(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.dim == 1 || self.dim == 2, Parameter, "dim must be 1 or 2, got {}", self.dim);
        ensure!(!self.depths.is_empty(), Parameter, "no grid depths given");
        for &j in &self.depths {
            ensure!(j >= 2 && j <= crate::grid::max_depth(self.dim), Parameter, "depth J = {j} out of range for n = {}", self.dim);
        }
        ensure!(self.trials >= 1, Parameter, "trials must be positive");
        ensure!(self.symbol.ratio > 0.0 && self.symbol.ratio <= 1.0, Parameter, "ratio must lie in (0, 1]");
        ensure!(
            self.control_ratio > 0.0 && self.control_ratio <= 1.0,
            Parameter,
            "control_ratio must lie in (0, 1]"
        );
        ensure!(self.symbol.order.is_finite(), Parameter, "order must be finite");
        ensure!(self.bound_factor > 1.0, Parameter, "bound_factor must exceed 1");
        ensure!(self.slope_min.is_finite(), Parameter, "slope_min must be finite");
        ensure!((0.0..1.0).contains(&self.threshold), Parameter, "threshold must lie in [0, 1)");
        if let NormSpec::Space(sp) = self.codomain {
            ensure!(sp.scale != Scale::HomogeneousBesov, Parameter, "homogeneous norms act on box samples");
        }
        if matches!(self.experiment, ExperimentKind::Sharpness | ExperimentKind::L2Growth) {
            ensure!(!self.sweep.is_empty(), Parameter, "{} needs a nonempty sweep", self.experiment);
            ensure!(self.sweep.iter().all(|&m| m >= 1), Parameter, "block counts must be positive");
        }
        Ok(())
    }

    /// `key=value` pairs describing the run, in a fixed order.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let depths: Vec<String> = self.depths.iter().map(u32::to_string).collect();
        let sweep: Vec<String> = self.sweep.iter().map(u32::to_string).collect();
        let mut out = vec![
            ("experiment", self.experiment.to_string()),
            ("dim", self.dim.to_string()),
            ("depths", depths.join(",")),
            ("domain", self.domain.to_string()),
            ("codomain", self.codomain.to_string()),
            ("symbol", self.symbol.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("input", self.input.to_string()),
            ("rng", crate::random::RNG_ALGORITHM.to_string()),
        ];
        if !sweep.is_empty() {
            out.push(("sweep", sweep.join(",")));
        }
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("line {}: expected `key = value`", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Format(format!("not a number: `{s}`")))
}

fn parse_int<T: FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Format(format!("not an integer: `{s}`")))
}

/// `a,b,c` or the inclusive range `a..b`.
fn parse_list(s: &str) -> Result<Vec<u32>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u32, u32) = (parse_int(a)?, parse_int(b)?);
        ensure!(a <= b, Format, "empty range `{s}`");
        return Ok((a..=b).collect());
    }
    s.split(',').map(parse_int).collect()
}


#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;

    fn exponent() -> impl Strategy<Value = f64> {
        prop_oneof![Just(f64::INFINITY), 0.25..8.0f64]
    }

    fn norm() -> impl Strategy<Value = NormSpec> {
        prop_oneof![
            exponent().prop_map(|p| NormSpec::Lebesgue(Exponent::new(p).unwrap())),
            exponent().prop_map(|p| NormSpec::LowPass(Exponent::new(p).unwrap())),
            (-3.0..3.0f64, 0.25..8.0f64, exponent())
                .prop_map(|(s, p, q)| NormSpec::Space(SpaceParams::triebel_lizorkin(s, p, q).unwrap())),
            (-3.0..3.0f64, exponent(), exponent()).prop_map(|(s, p, q)| NormSpec::Space(SpaceParams::besov(s, p, q).unwrap())),
        ]
    }

    proptest! {
        #[test]
        fn norm_text_round_trips(n in norm()) {
            let text = n.to_string();
            let back: NormSpec = text.parse().unwrap();
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn unknown_keys_are_rejected(key in "[a-z]{3,12}") {
            let mut cfg = ExperimentConfig::new(ExperimentKind::Boundedness);
            let known = ["experiment", "dim", "depths", "depth", "domain", "codomain", "symbol", "ratio", "order",
                "blocks", "trials", "seed", "input", "sweep", "expect", "threshold", "output"];
            prop_assume!(!known.contains(&key.as_str()));
            prop_assert!(cfg.set(&key, "1").is_err());
        }

        #[test]
        fn depth_ranges_expand(a in 3u32..10, len in 0u32..4) {
            let mut cfg = ExperimentConfig::new(ExperimentKind::Boundedness);
            cfg.set("depths", &format!("{a}..{}", a + len)).unwrap();
            prop_assert_eq!(cfg.depths, (a..=a + len).collect::<Vec<_>>());
        }
    }
}
