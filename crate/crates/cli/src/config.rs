//! Experiment configuration: method specifications, sub-dimension ranges,
//! and the JSON config file mirrored by the fig1/fig2 flags.

use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// One approximation method of the comparison experiments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MethodSpec {
    /// Diagonally dominant extreme rays (n^2 rank-1 frames).
    Dd,
    /// Scaled diagonally dominant = factor-width 2 (C(n,2) frames).
    Sdd,
    /// Factor-width k index frames (C(n,k) frames).
    Fw(usize),
    /// Maximal-clique frames of a chordal graph read from an edge-list file.
    Chordal(String),
    /// N frames packed by alternating projection, one cone per s.
    Packed(usize),
}

impl MethodSpec {
    /// Parses `dd | sdd | fw:K | chordal:PATH | packed:N`.
    pub fn parse(text: &str) -> CliResult<Self> {
        let lower = text.trim();
        match lower {
            "dd" => return Ok(MethodSpec::Dd),
            "sdd" => return Ok(MethodSpec::Sdd),
            _ => {}
        }
        if let Some(k) = lower.strip_prefix("fw:") {
            let k: usize = k
                .parse()
                .map_err(|_| CliError::Usage(format!("bad factor width in {text:?}")))?;
            return Ok(MethodSpec::Fw(k));
        }
        if let Some(path) = lower.strip_prefix("chordal:") {
            if path.is_empty() {
                return Err(CliError::Usage("chordal: needs a file path".into()));
            }
            return Ok(MethodSpec::Chordal(path.to_string()));
        }
        if let Some(count) = lower.strip_prefix("packed:") {
            let count: usize = count
                .parse()
                .map_err(|_| CliError::Usage(format!("bad frame count in {text:?}")))?;
            if count == 0 {
                return Err(CliError::Usage("packed: needs N >= 1".into()));
            }
            return Ok(MethodSpec::Packed(count));
        }
        Err(CliError::Usage(format!(
            "unknown method {text:?} (expected dd, sdd, fw:K, chordal:PATH, packed:N)"
        )))
    }

    /// Label used in the CSV method column.
    pub fn label(&self) -> String {
        match self {
            MethodSpec::Dd => "dd".into(),
            MethodSpec::Sdd => "sdd".into(),
            MethodSpec::Fw(k) => format!("fw{k}"),
            MethodSpec::Chordal(_) => "chordal".into(),
            MethodSpec::Packed(count) => format!("packed{count}"),
        }
    }
}

impl TryFrom<String> for MethodSpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        MethodSpec::parse(&s).map_err(|e| e.to_string())
    }
}

impl From<MethodSpec> for String {
    fn from(m: MethodSpec) -> String {
        match &m {
            MethodSpec::Dd => "dd".into(),
            MethodSpec::Sdd => "sdd".into(),
            MethodSpec::Fw(k) => format!("fw:{k}"),
            MethodSpec::Chordal(path) => format!("chordal:{path}"),
            MethodSpec::Packed(count) => format!("packed:{count}"),
        }
    }
}

/// Parses `A..B` (inclusive) or a comma list `a,b,c` of sub-dimensions.
pub fn parse_s_range(text: &str) -> CliResult<Vec<usize>> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad range start in {text:?}")))?;
        let hi: usize = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| CliError::Usage(format!("bad range end in {text:?}")))?;
        if lo == 0 || hi < lo {
            return Err(CliError::Usage(format!("empty or zero-based range {text:?}")));
        }
        return Ok((lo..=hi).collect());
    }
    let vals: Result<Vec<usize>, _> = text.split(',').map(|t| t.trim().parse()).collect();
    let vals = vals.map_err(|_| CliError::Usage(format!("bad list {text:?}")))?;
    if vals.is_empty() || vals.contains(&0) {
        return Err(CliError::Usage("sub-dimension list must be positive".into()));
    }
    Ok(vals)
}

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Fig1,
    Fig2,
}

fn default_n() -> usize {
    20
}
fn default_trials() -> usize {
    100
}
fn default_seed() -> u64 {
    20240521
}
fn default_tol() -> f64 {
    1e-7
}
fn default_max_iter() -> usize {
    10_000
}
fn default_threshold() -> f64 {
    0.01
}
fn default_cap() -> usize {
    4096
}
fn default_pack_max_iter() -> usize {
    5_000
}
fn default_pack_tol() -> f64 {
    1e-8
}
fn default_pack_restarts() -> usize {
    10
}

/// Experiment parameters; serialized form doubles as the `--config` file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub s_range: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Projection solver tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Projection solver sweep cap.
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// fig2 only: target mean error.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// fig2 only: ambient dimensions to sweep.
    #[serde(default)]
    pub n_range: Vec<usize>,
    /// fig2 only: frame-count search cap.
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default = "default_pack_max_iter")]
    pub pack_max_iter: usize,
    #[serde(default = "default_pack_tol")]
    pub pack_tol: f64,
    #[serde(default = "default_pack_restarts")]
    pub pack_restarts: usize,
    /// Output CSV path.
    #[serde(default)]
    pub out: Option<String>,
}

impl ExperimentConfig {
    /// Paper-scale fig1 defaults: n = 20, SDD / FW3 / packed {1, 30, 190,
    /// 350}, s sweeping 1..=20, 100 trials.
    pub fn fig1_default() -> Self {
        Self {
            experiment: ExperimentKind::Fig1,
            n: 20,
            methods: vec![
                MethodSpec::Sdd,
                MethodSpec::Fw(3),
                MethodSpec::Packed(1),
                MethodSpec::Packed(30),
                MethodSpec::Packed(190),
                MethodSpec::Packed(350),
            ],
            s_range: (1..=20).collect(),
            trials: 100,
            seed: default_seed(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            threshold: default_threshold(),
            n_range: Vec::new(),
            cap: default_cap(),
            pack_max_iter: default_pack_max_iter(),
            pack_tol: default_pack_tol(),
            pack_restarts: default_pack_restarts(),
            out: None,
        }
    }

    /// Desk-scale preset for CI budgets: n = 10, 20 trials.
    pub fn fig1_small() -> Self {
        Self {
            n: 10,
            methods: vec![MethodSpec::Sdd, MethodSpec::Fw(3), MethodSpec::Packed(15)],
            s_range: (1..=10).collect(),
            trials: 20,
            pack_max_iter: 1_500,
            pack_restarts: 3,
            ..Self::fig1_default()
        }
    }

    /// fig2 defaults: s = 2, n in 2..=6, threshold 0.01.
    pub fn fig2_default() -> Self {
        Self {
            experiment: ExperimentKind::Fig2,
            s_range: vec![2],
            n_range: (2..=6).collect(),
            methods: Vec::new(),
            ..Self::fig1_default()
        }
    }

    pub fn from_json_str(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.trials == 0 {
            return Err(CliError::Usage("trials must be >= 1".into()));
        }
        if self.n == 0 {
            return Err(CliError::Usage("n must be >= 1".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0 && self.pack_tol.is_finite() && self.pack_tol > 0.0) {
            return Err(CliError::Usage("tolerances must be positive".into()));
        }
        match self.experiment {
            ExperimentKind::Fig1 => {
                if self.methods.is_empty() {
                    return Err(CliError::Usage("fig1 needs at least one method".into()));
                }
                // s_range only drives packed methods; structured families
                // have their natural sub-dimensions
                if self.methods.iter().any(|m| matches!(m, MethodSpec::Packed(_))) {
                    if self.s_range.is_empty() {
                        return Err(CliError::Usage("packed methods need an s_range".into()));
                    }
                    if self.s_range.iter().any(|&s| s == 0 || s > self.n) {
                        return Err(CliError::Usage(format!(
                            "s_range {:?} leaves [1, {}]",
                            self.s_range, self.n
                        )));
                    }
                }
            }
            ExperimentKind::Fig2 => {
                if !(self.threshold.is_finite() && self.threshold > 0.0) {
                    return Err(CliError::Usage("threshold must be positive".into()));
                }
                if self.n_range.is_empty() {
                    return Err(CliError::Usage("fig2 needs an n_range".into()));
                }
                if self.s_range.is_empty() {
                    return Err(CliError::Usage("fig2 needs an s_range".into()));
                }
                for &n in &self.n_range {
                    if self.s_range.iter().any(|&s| s > n) {
                        return Err(CliError::Usage(format!(
                            "sub-dimension exceeds ambient dimension {n}"
                        )));
                    }
                }
                if self.cap == 0 {
                    return Err(CliError::Usage("cap must be >= 1".into()));
                }
            }
        }
        Ok(())
    }
}
