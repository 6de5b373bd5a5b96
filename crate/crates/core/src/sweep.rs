//! Grid sweeps over `(t, gamma)`, their CSV/JSON serialization, peak search
//! and the free-fermion versus exact-diagonalization cross-check.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::ed::{self, Oracle};
use crate::error::{Error, Result};
use crate::observables::{self, BlochVector};
use crate::par::{map_indexed, Execution};
use crate::wick::{InputState, Snapshot};

pub const SCHEMA: &str = "xychain-sweep/1";
pub const CSV_HEADER: &str = "t,gamma,sx,sy,sz,fidelity,tangle";
pub const VERIFY_TOL: f64 = 1e-9;
pub const VERIFY_MAX_SITES: usize = 10;

/// Named field/coupling regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Strong,
    Weak,
    Intermediate,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Strong, Preset::Weak, Preset::Intermediate];

    pub fn field(self) -> f64 {
        match self {
            Preset::Strong => 1.0,
            Preset::Weak => 0.1,
            Preset::Intermediate => 0.5,
        }
    }

    pub fn coupling(self) -> f64 {
        match self {
            Preset::Strong => 0.1,
            Preset::Weak => 1.0,
            Preset::Intermediate => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Strong => "strong",
            Preset::Weak => "weak",
            Preset::Intermediate => "intermediate",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
    }
}

/// Evenly spaced inclusive range; one step means just `min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        let axis = Self { min, max, steps };
        axis.validate("axis")?;
        Ok(axis)
    }

    pub fn single(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            steps: 1,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Config(format!("{name} bounds must be finite")));
        }
        if self.steps == 0 {
            return Err(Error::Config(format!("{name} needs at least one step")));
        }
        if self.min > self.max {
            return Err(Error::Config(format!(
                "{name} minimum {} exceeds maximum {}",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.steps == 1 {
            self.min
        } else if i + 1 == self.steps {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

/// Everything that determines a sweep's output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_sites: usize,
    pub coupling: f64,
    pub field: f64,
    pub receiver: usize,
    pub input: InputState,
    pub vacuum: bool,
    pub t_axis: GridAxis,
    pub gamma_axis: GridAxis,
    /// Accept anisotropies outside `[0, 1]`.
    pub allow_any_gamma: bool,
    /// Unix time to record in the metadata; omitted by default so that
    /// identical configurations give identical bytes.
    pub timestamp: Option<u64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self::preset(Preset::Weak)
    }
}

impl SweepConfig {
    /// Five sites, receiver 3, `alpha = sqrt(3)/2`, `t in [0, 50]` on 201
    /// points and `gamma in [0, 1]` on 101 points.
    pub fn preset(preset: Preset) -> Self {
        Self {
            n_sites: 5,
            coupling: preset.coupling(),
            field: preset.field(),
            receiver: 3,
            input: InputState::from_alpha(3f64.sqrt() / 2.0).expect("valid default amplitude"),
            vacuum: false,
            t_axis: GridAxis {
                min: 0.0,
                max: 50.0,
                steps: 201,
            },
            gamma_axis: GridAxis {
                min: 0.0,
                max: 1.0,
                steps: 101,
            },
            allow_any_gamma: false,
            timestamp: None,
        }
    }

    pub fn with_vacuum(mut self) -> Self {
        self.vacuum = true;
        self.input = InputState::vacuum();
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.t_axis.validate("t range")?;
        self.gamma_axis.validate("gamma range")?;
        if !self.allow_any_gamma && (self.gamma_axis.min < 0.0 || self.gamma_axis.max > 1.0) {
            return Err(Error::Config(format!(
                "gamma range [{}, {}] leaves [0, 1]",
                self.gamma_axis.min, self.gamma_axis.max
            )));
        }
        let spec = self.spec(self.gamma_axis.min)?;
        if self.receiver == 0 || self.receiver > spec.n_sites() {
            return Err(Error::SiteOutOfRange {
                site: self.receiver,
                n_sites: spec.n_sites(),
            });
        }
        Ok(())
    }

    pub fn spec(&self, gamma: f64) -> Result<ChainSpec> {
        ChainSpec::new(self.n_sites, self.coupling, gamma, self.field)
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            schema: SCHEMA.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            n_sites: self.n_sites,
            coupling: self.coupling,
            field: self.field,
            receiver: self.receiver,
            alpha: self.input.alpha(),
            beta: self.input.beta(),
            vacuum: self.vacuum,
            t_min: self.t_axis.min,
            t_max: self.t_axis.max,
            t_steps: self.t_axis.steps,
            gamma_min: self.gamma_axis.min,
            gamma_max: self.gamma_axis.max,
            gamma_steps: self.gamma_axis.steps,
            timestamp: self.timestamp,
        }
    }
}

/// Header block written ahead of the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub schema: String,
    pub version: String,
    pub n_sites: usize,
    pub coupling: f64,
    pub field: f64,
    pub receiver: usize,
    pub alpha: f64,
    pub beta: f64,
    pub vacuum: bool,
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Metadata {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("schema", self.schema.clone()),
            ("version", self.version.clone()),
            ("n_sites", self.n_sites.to_string()),
            ("coupling", self.coupling.to_string()),
            ("field", self.field.to_string()),
            ("receiver", self.receiver.to_string()),
            ("alpha", self.alpha.to_string()),
            ("beta", self.beta.to_string()),
            ("vacuum", self.vacuum.to_string()),
            ("t_min", self.t_min.to_string()),
            ("t_max", self.t_max.to_string()),
            ("t_steps", self.t_steps.to_string()),
            ("gamma_min", self.gamma_min.to_string()),
            ("gamma_max", self.gamma_max.to_string()),
            ("gamma_steps", self.gamma_steps.to_string()),
        ];
        if let Some(ts) = self.timestamp {
            out.push(("timestamp", ts.to_string()));
        }
        out
    }

    fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let get = |key: &str| -> Result<&str> {
            pairs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Malformed(format!("metadata key `{key}` missing")))
        };
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Malformed(format!("metadata `{key}` has bad value `{v}`")))
        }
        let timestamp = match pairs.iter().find(|(k, _)| k == "timestamp") {
            Some((_, v)) => Some(num("timestamp", v)?),
            None => None,
        };
        Ok(Self {
            schema: get("schema")?.to_string(),
            version: get("version")?.to_string(),
            n_sites: num("n_sites", get("n_sites")?)?,
            coupling: num("coupling", get("coupling")?)?,
            field: num("field", get("field")?)?,
            receiver: num("receiver", get("receiver")?)?,
            alpha: num("alpha", get("alpha")?)?,
            beta: num("beta", get("beta")?)?,
            vacuum: num("vacuum", get("vacuum")?)?,
            t_min: num("t_min", get("t_min")?)?,
            t_max: num("t_max", get("t_max")?)?,
            t_steps: num("t_steps", get("t_steps")?)?,
            gamma_min: num("gamma_min", get("gamma_min")?)?,
            gamma_max: num("gamma_max", get("gamma_max")?)?,
            gamma_steps: num("gamma_steps", get("gamma_steps")?)?,
            timestamp,
        })
    }
}

/// One grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub gamma: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub fidelity: f64,
    pub tangle: f64,
}

impl SweepRow {
    pub fn bloch(&self) -> BlochVector {
        BlochVector::new(self.sx, self.sy, self.sz)
    }

    pub fn quantity(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Fidelity => self.fidelity,
            Quantity::Tangle => self.tangle,
        }
    }
}

/// Rows in gamma-major, then t, order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metadata: Metadata,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Fidelity,
    Tangle,
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fidelity" => Ok(Quantity::Fidelity),
            "tangle" => Ok(Quantity::Tangle),
            _ => Err(Error::Config(format!("unknown quantity `{s}`"))),
        }
    }
}

/// Full record at one `(t, gamma)`; sweeps call exactly this per cell.
pub fn evaluate_point(
    spec: &ChainSpec,
    t: f64,
    receiver: usize,
    input: InputState,
) -> Result<SweepRow> {
    let bloch = Snapshot::new(spec, t).bloch(receiver, input)?;
    Ok(SweepRow {
        t,
        gamma: spec.anisotropy(),
        sx: bloch.sx,
        sy: bloch.sy,
        sz: bloch.sz,
        fidelity: observables::fidelity(input, &bloch)?,
        tangle: observables::one_tangle(&bloch)?,
    })
}

pub fn run_sweep(config: &SweepConfig, mode: Execution) -> Result<SweepResult> {
    config.validate()?;
    let gammas = config.gamma_axis.values();
    let ts = config.t_axis.values();
    let specs = gammas
        .iter()
        .map(|&g| config.spec(g))
        .collect::<Result<Vec<_>>>()?;
    let nt = ts.len();
    let rows = map_indexed(specs.len() * nt, mode, |idx| {
        evaluate_point(
            &specs[idx / nt],
            ts[idx % nt],
            config.receiver,
            config.input,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        metadata: config.metadata(),
        rows,
    })
}

/// `printf("%.12g")`, with negative zero printed as `0`.
pub fn format_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.metadata.pairs() {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fields = [r.t, r.gamma, r.sx, r.sy, r.sz, r.fidelity, r.tangle];
            let line: Vec<String> = fields.iter().map(|&x| format_g(x)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        std::fs::write(path, self.render(format)?)?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut lines = text.lines().enumerate();
        let mut header = None;
        for (_, line) in lines.by_ref() {
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| Error::Malformed(format!("bad metadata line `{line}`")))?;
                pairs.push((k.to_string(), v.to_string()));
            } else {
                header = Some(line);
                break;
            }
        }
        if header != Some(CSV_HEADER) {
            return Err(Error::Malformed(format!(
                "expected header `{CSV_HEADER}`, found {header:?}"
            )));
        }
        let metadata = Metadata::from_pairs(&pairs)?;
        let mut rows = Vec::new();
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            let vals = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Malformed(format!("line {}: {e}", no + 1)))?;
            let [t, gamma, sx, sy, sz, fidelity, tangle] = vals[..] else {
                return Err(Error::Malformed(format!(
                    "line {} has {} fields, expected 7",
                    no + 1,
                    vals.len()
                )));
            };
            rows.push(SweepRow {
                t,
                gamma,
                sx,
                sy,
                sz,
                fidelity,
                tangle,
            });
        }
        Ok(Self { metadata, rows })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads either format, chosen by the first non-blank character.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_csv(text)
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Rows arranged as `[gamma][t]`, checked against the declared shape.
    pub fn grid(&self) -> Result<Vec<&[SweepRow]>> {
        let (nt, ng) = (self.metadata.t_steps, self.metadata.gamma_steps);
        if nt == 0 || ng == 0 || self.rows.len() != nt * ng {
            return Err(Error::Malformed(format!(
                "{} rows do not fill a {nt} x {ng} grid",
                self.rows.len()
            )));
        }
        let grid: Vec<&[SweepRow]> = self.rows.chunks(nt).collect();
        for block in &grid {
            if block.iter().any(|r| r.gamma != block[0].gamma) {
                return Err(Error::Malformed("rows are not gamma-major".into()));
            }
            if block.iter().zip(grid[0].iter()).any(|(a, b)| a.t != b.t) {
                return Err(Error::Malformed(
                    "t values differ between gamma blocks".into(),
                ));
            }
        }
        Ok(grid)
    }
}

/// A grid cell exceeding every existing 4-neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: f64,
    pub gamma: f64,
    pub value: f64,
}

/// Strict local maxima of `quantity`, largest first, ties by `(t, gamma)`.
pub fn find_peaks(
    result: &SweepResult,
    quantity: Quantity,
    top_k: Option<usize>,
) -> Result<Vec<Peak>> {
    let grid = result.grid()?;
    let (ng, nt) = (grid.len(), grid[0].len());
    let at = |g: usize, t: usize| grid[g][t].quantity(quantity);
    let mut peaks = Vec::new();
    for (g, block) in grid.iter().enumerate() {
        for (t, row) in block.iter().enumerate() {
            let v = row.quantity(quantity);
            let mut neighbours = Vec::with_capacity(4);
            if g > 0 {
                neighbours.push(at(g - 1, t));
            }
            if g + 1 < ng {
                neighbours.push(at(g + 1, t));
            }
            if t > 0 {
                neighbours.push(at(g, t - 1));
            }
            if t + 1 < nt {
                neighbours.push(at(g, t + 1));
            }
            if neighbours.iter().all(|&n| v > n) {
                peaks.push(Peak {
                    t: row.t,
                    gamma: row.gamma,
                    value: v,
                });
            }
        }
    }
    peaks.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then(a.t.total_cmp(&b.t))
            .then(a.gamma.total_cmp(&b.gamma))
    });
    if let Some(k) = top_k {
        peaks.truncate(k);
    }
    Ok(peaks)
}

/// Indices of strict interior local maxima of a sequence.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

/// First maximum of the upper envelope of an oscillating series: the local
/// maxima form the envelope, and the first local maximum of that sequence is
/// returned as `(t, value)`.
pub fn first_envelope_peak(ts: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    let tops = local_maxima(values);
    let envelope: Vec<f64> = tops.iter().map(|&i| values[i]).collect();
    local_maxima(&envelope)
        .first()
        .map(|&j| (ts[tops[j]], envelope[j]))
}

/// Free-fermion versus exact-diagonalization comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub sweep: SweepConfig,
    pub points: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyPoint {
    pub t: f64,
    pub gamma: f64,
    /// Largest deviation over `sx, sy, sz, fidelity, tangle` from the
    /// fermionic Hamiltonian.
    pub deviation: f64,
    /// Same against the periodic spin Hamiltonian.
    pub spin_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub max_deviation: f64,
    pub worst: Option<VerifyPoint>,
    pub spin_max_deviation: f64,
    pub points: Vec<VerifyPoint>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < self.tolerance
    }
}

fn record_deviation(row: &SweepRow, oracle: &ed::OracleRecord) -> f64 {
    row.bloch()
        .max_abs_diff(&oracle.bloch)
        .max((row.fidelity - oracle.fidelity).abs())
        .max((row.tangle - oracle.tangle).abs())
}

/// Samples `(t, gamma)` uniformly from the configured ranges.
pub fn sample_points(config: &VerifyConfig) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (ta, ga) = (config.sweep.t_axis, config.sweep.gamma_axis);
    let draw = |rng: &mut ChaCha8Rng, a: GridAxis| {
        if a.min == a.max {
            a.min
        } else {
            rng.random_range(a.min..=a.max)
        }
    };
    (0..config.points)
        .map(|_| {
            let t = draw(&mut rng, ta);
            let g = draw(&mut rng, ga);
            (t, g)
        })
        .collect()
}

pub fn verify(config: &VerifyConfig, mode: Execution) -> Result<VerifyReport> {
    let sweep = &config.sweep;
    sweep.validate()?;
    if sweep.n_sites > VERIFY_MAX_SITES {
        return Err(Error::TooManySites {
            got: sweep.n_sites,
            max: VERIFY_MAX_SITES,
        });
    }
    let samples = sample_points(config);
    let points = map_indexed(samples.len(), mode, |i| -> Result<VerifyPoint> {
        let (t, gamma) = samples[i];
        let spec = sweep.spec(gamma)?;
        let row = evaluate_point(&spec, t, sweep.receiver, sweep.input)?;
        let fermionic = Oracle::fermionic(&spec)?.record(t, sweep.receiver, sweep.input)?;
        let spin = Oracle::spin(&spec)?.record(t, sweep.receiver, sweep.input)?;
        Ok(VerifyPoint {
            t,
            gamma,
            deviation: record_deviation(&row, &fermionic),
            spin_deviation: record_deviation(&row, &spin),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let worst = points
        .iter()
        .copied()
        .max_by(|a, b| a.deviation.total_cmp(&b.deviation));
    Ok(VerifyReport {
        tolerance: VERIFY_TOL,
        max_deviation: worst.map_or(0.0, |p| p.deviation),
        worst,
        spin_max_deviation: points.iter().map(|p| p.spin_deviation).fold(0.0, f64::max),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig {
            t_axis: GridAxis::new(0.0, 10.0, 11).unwrap(),
            gamma_axis: GridAxis::new(0.0, 1.0, 5).unwrap(),
            ..SweepConfig::preset(Preset::Intermediate)
        }
    }

    #[test]
    fn presets() {
        assert_eq!("strong".parse::<Preset>().unwrap(), Preset::Strong);
        assert_eq!(Preset::Weak.field(), 0.1);
        assert_eq!(Preset::Weak.coupling(), 1.0);
        assert_eq!(
            Preset::Intermediate.field(),
            Preset::Intermediate.coupling()
        );
        assert!("medium".parse::<Preset>().is_err());
        let c = SweepConfig::preset(Preset::Strong);
        assert_eq!(
            (c.n_sites, c.receiver, c.t_axis.steps, c.gamma_axis.steps),
            (5, 3, 201, 101)
        );
        assert!((c.input.beta() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn axis_values() {
        let a = GridAxis::new(0.0, 50.0, 201).unwrap();
        let v = a.values();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[200], 50.0);
        assert!((v[111] - 27.75).abs() < 1e-12);
        assert_eq!(GridAxis::new(2.0, 2.0, 1).unwrap().values(), vec![2.0]);
        assert!(GridAxis::new(1.0, 0.0, 3).is_err());
        assert!(GridAxis::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = small();
        c.gamma_axis.max = 1.5;
        assert!(c.validate().is_err());
        c.allow_any_gamma = true;
        assert!(c.validate().is_ok());
        c.receiver = 6;
        assert!(c.validate().is_err());
    }

    #[test]
    fn format_g_matches_printf() {
        assert_eq!(format_g(0.0), "0");
        assert_eq!(format_g(-0.0), "0");
        assert_eq!(format_g(1.0), "1");
        assert_eq!(format_g(27.7), "27.7");
        assert_eq!(format_g(0.1), "0.1");
        assert_eq!(format_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_g(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_g(1.5e-5), "1.5e-05");
        assert_eq!(format_g(0.0001), "0.0001");
        assert_eq!(format_g(1e12), "1e+12");
        assert_eq!(format_g(123456789012.0), "123456789012");
        assert_eq!(format_g(-3.25e-17), "-3.25e-17");
    }

    #[test]
    fn sweep_shape_and_order() {
        let res = run_sweep(&small(), Execution::Parallel).unwrap();
        assert_eq!(res.rows.len(), 55);
        assert_eq!(res.rows[0].gamma, 0.0);
        assert_eq!(res.rows[10].t, 10.0);
        assert_eq!(res.rows[11].gamma, 0.25);
        assert_eq!(res.rows[11].t, 0.0);
        for r in &res.rows {
            assert!((0.0..=1.0).contains(&r.fidelity));
            assert!((0.0..=1.0).contains(&r.tangle));
        }
    }

    #[test]
    fn execution_modes_identical() {
        let a = run_sweep(&small(), Execution::Parallel).unwrap();
        let b = run_sweep(&small(), Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn single_cell_equals_point() {
        let mut c = small();
        c.t_axis = GridAxis::single(5.0);
        c.gamma_axis = GridAxis::single(0.5);
        let res = run_sweep(&c, Execution::Sequential).unwrap();
        let spec = c.spec(0.5).unwrap();
        assert_eq!(
            res.rows,
            vec![evaluate_point(&spec, 5.0, 3, c.input).unwrap()]
        );
    }

    #[test]
    fn csv_layout_and_roundtrip() {
        let res = run_sweep(&small(), Execution::Sequential).unwrap();
        let csv = res.to_csv();
        assert!(csv.starts_with("# schema=xychain-sweep/1\n"));
        assert!(csv.contains(&format!("\n{CSV_HEADER}\n")));
        assert!(!csv.contains('\r'));
        assert!(!csv.contains("timestamp"));
        let back = SweepResult::parse(&csv).unwrap();
        assert_eq!(back.metadata, res.metadata);
        assert_eq!(back.rows.len(), res.rows.len());
        for (a, b) in back.rows.iter().zip(&res.rows) {
            assert!(a.bloch().max_abs_diff(&b.bloch()) < 1e-11);
        }
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let mut c = small();
        c.timestamp = Some(1_700_000_000);
        let res = run_sweep(&c, Execution::Sequential).unwrap();
        let json = res.to_json().unwrap();
        assert!(json.contains("\"timestamp\": 1700000000"));
        assert_eq!(SweepResult::parse(&json).unwrap(), res);
    }

    #[test]
    fn malformed_inputs() {
        assert!(SweepResult::parse("").is_err());
        assert!(SweepResult::parse("t,gamma\n1,2\n").is_err());
        let res = run_sweep(&small(), Execution::Sequential).unwrap();
        let csv = res.to_csv();
        let truncated: String = csv
            .lines()
            .take(csv.lines().count() - 1)
            .map(|l| format!("{l}\n"))
            .collect();
        let short = SweepResult::parse(&truncated).unwrap();
        assert!(short.grid().is_err());
        assert!(SweepResult::parse(&csv.replace(",0.5,", ",x,")).is_err());
        assert!(SweepResult::parse("{\"rows\": 3}").is_err());
    }

    fn synthetic(nt: usize, ng: usize, f: impl Fn(f64, f64) -> f64) -> SweepResult {
        let mut c = small();
        c.t_axis = GridAxis::new(0.0, (nt - 1) as f64, nt).unwrap();
        c.gamma_axis = GridAxis::new(0.0, 1.0, ng).unwrap();
        let mut rows = Vec::new();
        for g in c.gamma_axis.values() {
            for t in c.t_axis.values() {
                let v = f(t, g);
                rows.push(SweepRow {
                    t,
                    gamma: g,
                    sx: 0.0,
                    sy: 0.0,
                    sz: 0.0,
                    fidelity: v,
                    tangle: -v,
                });
            }
        }
        SweepResult {
            metadata: c.metadata(),
            rows,
        }
    }

    #[test]
    fn monotone_grid_has_one_corner_peak() {
        let res = synthetic(6, 4, |t, g| t + 10.0 * g);
        let peaks = find_peaks(&res, Quantity::Fidelity, None).unwrap();
        assert_eq!(
            peaks,
            vec![Peak {
                t: 5.0,
                gamma: 1.0,
                value: 15.0
            }]
        );
        let lows = find_peaks(&res, Quantity::Tangle, None).unwrap();
        assert_eq!(
            lows,
            vec![Peak {
                t: 0.0,
                gamma: 0.0,
                value: 0.0
            }]
        );
    }

    #[test]
    fn peaks_sorted_with_tiebreak() {
        let res = synthetic(9, 3, |t, g| {
            if (t == 2.0 || t == 6.0) && g == 0.5 {
                1.0
            } else if t == 4.0 && g == 0.0 {
                2.0
            } else {
                0.0
            }
        });
        let peaks = find_peaks(&res, Quantity::Fidelity, None).unwrap();
        let coords: Vec<(f64, f64)> = peaks.iter().map(|p| (p.t, p.gamma)).collect();
        assert_eq!(coords, vec![(4.0, 0.0), (2.0, 0.5), (6.0, 0.5)]);
        assert_eq!(
            find_peaks(&res, Quantity::Fidelity, Some(1)).unwrap().len(),
            1
        );
        // plateaus are not strict maxima
        let flat = synthetic(4, 3, |_, _| 1.0);
        assert!(find_peaks(&flat, Quantity::Fidelity, None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn envelope_peak() {
        let ts: Vec<f64> = (0..400).map(|i| i as f64 * 0.1).collect();
        // carrier period ~1.6, envelope peaking at t = 10
        let vs: Vec<f64> = ts
            .iter()
            .map(|&t| (-(t - 10.0f64).powi(2) / 20.0).exp() * (2.0 * t).sin().powi(2))
            .collect();
        let (t, v) = first_envelope_peak(&ts, &vs).unwrap();
        assert!((t - 10.0).abs() < 0.5, "{t}");
        assert!(v > 0.9);
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0, 2.0, 2.0, 0.0]), vec![1]);
        assert!(first_envelope_peak(&ts[..3], &[0.0, 1.0, 0.0]).is_none());
    }

    #[test]
    fn verify_small_chain() {
        let c = VerifyConfig {
            sweep: SweepConfig {
                n_sites: 3,
                receiver: 2,
                ..small()
            },
            points: 6,
            seed: 7,
        };
        let report = verify(&c, Execution::Parallel).unwrap();
        assert_eq!(report.points.len(), 6);
        assert!(report.passed(), "{:?}", report.worst);
        assert_eq!(sample_points(&c), sample_points(&c));
        let other = VerifyConfig {
            seed: 8,
            ..c.clone()
        };
        assert_ne!(sample_points(&c), sample_points(&other));
    }

    #[test]
    fn verify_rejects_large_chains() {
        let c = VerifyConfig {
            sweep: SweepConfig {
                n_sites: 11,
                ..small()
            },
            points: 1,
            seed: 0,
        };
        assert!(matches!(
            verify(&c, Execution::Sequential),
            Err(Error::TooManySites { .. })
        ));
    }
}
