//! Result tables. CSV output carries `# key=value` metadata lines before the
//! header and `# summary …` / `# verdict=…` lines after the rows, so any
//! reader that skips `#` lines sees a plain table.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Header of [`RatioTable`] CSV output.
pub const RATIO_COLUMNS: &str = "sweep,trial,input_norm,output_norm,ratio";
/// Header of [`GrowthTable`] CSV output.
pub const GROWTH_COLUMNS: &str = "blocks,top_block,operator_norm,control_norm,f21_ratio";
/// Header of [`SupportTable`] CSV output.
pub const SUPPORT_COLUMNS: &str = "trial,symbol,check,k,observed,passed";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn write(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "# verdict={}", if self.passed { "pass" } else { "fail" })?;
        writeln!(out, "# detail={}", self.detail)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    /// Grid depth `J`, or block count `M` for block sweeps.
    pub sweep: u32,
    pub trial: usize,
    pub input_norm: f64,
    pub output_norm: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub sweep: u32,
    pub max: f64,
    pub median: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioTable {
    pub metadata: Vec<(String, String)>,
    /// What the sweep column holds: `depth` or `blocks`.
    pub sweep_kind: String,
    pub rows: Vec<RatioRow>,
    pub summary: Vec<SweepSummary>,
    pub verdict: Verdict,
}

impl RatioTable {
    /// Sorts nothing: rows stay in generation order, summaries follow first appearance.
    pub(crate) fn new(metadata: Vec<(String, String)>, sweep_kind: &str, rows: Vec<RatioRow>) -> Self {
        let mut sweeps: Vec<u32> = Vec::new();
        for r in &rows {
            if !sweeps.contains(&r.sweep) {
                sweeps.push(r.sweep);
            }
        }
        let summary = sweeps
            .into_iter()
            .map(|sweep| {
                let ratios: Vec<f64> = rows.iter().filter(|r| r.sweep == sweep).map(|r| r.ratio).collect();
                SweepSummary { sweep, max: ratios.iter().copied().fold(0.0, f64::max), median: median(&ratios) }
            })
            .collect();
        RatioTable {
            metadata,
            sweep_kind: sweep_kind.to_string(),
            rows,
            summary,
            verdict: Verdict { passed: true, detail: String::new() },
        }
    }

    /// `(sweep, max ratio)` pairs.
    pub fn maxima(&self) -> Vec<(u32, f64)> {
        self.summary.iter().map(|s| (s.sweep, s.max)).collect()
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        write_metadata(&mut out, &self.metadata)?;
        writeln!(out, "# sweep_kind={}", self.sweep_kind)?;
        writeln!(out, "{RATIO_COLUMNS}")?;
        for r in &self.rows {
            writeln!(out, "{},{},{:e},{:e},{:e}", r.sweep, r.trial, r.input_norm, r.output_norm, r.ratio)?;
        }
        for s in &self.summary {
            writeln!(out, "# summary sweep={} max={:e} median={:e}", s.sweep, s.max, s.median)?;
        }
        self.verdict.write(&mut out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub blocks: u32,
    pub top_block: u32,
    /// Exact grid `L₂` operator norm of the truncated symbol.
    pub operator_norm: f64,
    /// Same for the control symbol on the same blocks.
    pub control_norm: f64,
    /// Largest `F⁰_{2,1} → L₂` ratio over the random trials.
    pub f21_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthTable {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<GrowthRow>,
    pub verdict: Verdict,
}

impl GrowthTable {
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        write_metadata(&mut out, &self.metadata)?;
        writeln!(out, "{GROWTH_COLUMNS}")?;
        for r in &self.rows {
            writeln!(out, "{},{},{:e},{:e},{:e}", r.blocks, r.top_block, r.operator_norm, r.control_norm, r.f21_ratio)?;
        }
        self.verdict.write(&mut out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportRow {
    pub trial: usize,
    pub symbol: String,
    /// `support-rule`, `off-diagonal`, `diagonal-ball` or `diagonal-annulus`.
    pub check: String,
    /// Scale of a localization check; 0 for the support rule.
    pub k: usize,
    /// Number of observed output frequencies.
    pub observed: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportTable {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<SupportRow>,
    pub verdict: Verdict,
}

impl SupportTable {
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        write_metadata(&mut out, &self.metadata)?;
        writeln!(out, "{SUPPORT_COLUMNS}")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{},{}", r.trial, r.symbol, r.check, r.k, r.observed, r.passed)?;
        }
        self.verdict.write(&mut out)
    }
}

/// Output of any experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExperimentOutput {
    Ratios(RatioTable),
    Growth(GrowthTable),
    Support(SupportTable),
}

impl ExperimentOutput {
    pub fn verdict(&self) -> &Verdict {
        match self {
            ExperimentOutput::Ratios(t) => &t.verdict,
            ExperimentOutput::Growth(t) => &t.verdict,
            ExperimentOutput::Support(t) => &t.verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict().passed
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        match self {
            ExperimentOutput::Ratios(t) => t.write_csv(out),
            ExperimentOutput::Growth(t) => t.write_csv(out),
            ExperimentOutput::Support(t) => t.write_csv(out),
        }
    }

    pub fn write_json(&self, mut out: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| crate::Error::Format(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

fn write_metadata(out: &mut impl Write, metadata: &[(String, String)]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

pub(crate) fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Bounded: max/min of the values stays below `factor`.
pub fn bounded_verdict(values: &[f64], factor: f64) -> Verdict {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    Verdict {
        passed: lo > 0.0 && spread.is_finite() && spread < factor,
        detail: format!("bounded: spread {spread:.4} (limit {factor})"),
    }
}

/// Growing: strictly increasing and log-log slope against `x` at least `slope_min`.
pub fn growing_verdict(points: &[(f64, f64)], slope_min: f64) -> Verdict {
    let monotone = points.windows(2).all(|w| w[1].1 > w[0].1);
    let slope = if points.len() >= 2 { log_log_slope(points) } else { f64::NAN };
    Verdict {
        passed: monotone && slope >= slope_min,
        detail: format!("growing: monotone {monotone}, slope {slope:.4} (limit {slope_min})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|m| (m as f64, 3.0 * (m as f64).sqrt())).collect();
        assert!((log_log_slope(&pts) - 0.5).abs() < 1e-12);
        assert!(growing_verdict(&pts, 0.4).passed);
        assert!(!growing_verdict(&pts, 0.6).passed);
        let flat: Vec<(f64, f64)> = pts.iter().map(|&(x, _)| (x, 1.0)).collect();
        assert!(!growing_verdict(&flat, 0.0).passed);
    }

    #[test]
    fn bounded_spread() {
        assert!(bounded_verdict(&[1.0, 1.5, 1.9], 2.0).passed);
        assert!(!bounded_verdict(&[1.0, 2.0], 2.0).passed);
        assert!(!bounded_verdict(&[0.0, 1.0], 2.0).passed);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![
            RatioRow { sweep: 6, trial: 0, input_norm: 2.0, output_norm: 1.0, ratio: 0.5 },
            RatioRow { sweep: 6, trial: 1, input_norm: 1.0, output_norm: 1.0, ratio: 1.0 },
            RatioRow { sweep: 7, trial: 0, input_norm: 1.0, output_norm: 0.25, ratio: 0.25 },
        ];
        let table = RatioTable::new(vec![("seed".into(), "3".into())], "depth", rows);
        assert_eq!(table.maxima(), vec![(6, 1.0), (7, 0.25)]);
        assert_eq!(table.summary[0].median, 0.75);
        let csv = ExperimentOutput::Ratios(table).to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# seed=3");
        assert_eq!(lines[2], RATIO_COLUMNS);
        assert_eq!(lines[3], "6,0,2e0,1e0,5e-1");
        assert!(csv.contains("# summary sweep=7 max=2.5e-1 median=2.5e-1"));
        assert!(csv.contains("# verdict=pass"));
    }
}
