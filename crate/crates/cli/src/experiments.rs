//! The two experiment protocols: the approximation-error comparison across
//! methods (fig1) and the minimal-frame-count growth study (fig2).
//!
//! Every trial target is `random_psd_normalized(n, seed)` with the seed
//! derived from `(base seed, n, trial)` only, so every method and every
//! sub-dimension sees the identical target at a given trial index; the
//! harness asserts this pairing by hashing each target per cell.

use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use psdpack::coneapprox::{project_onto_cone_sum, ConeSum};
use psdpack::frames::{Frame, FrameSet, Provenance};
use psdpack::generators::{chordal_frames, dd_frames, fw_frames, parse_edge_list, verify_chordal};
use psdpack::packing::PackingConfig;
use psdpack::seeding::{derive_seed, rng_from_seed, tag};
use psdpack::symmat::{random_psd_normalized, SymMatrix};

use crate::catalog::PackingCatalog;
use crate::config::{ExperimentConfig, MethodSpec};
use crate::output::{RequirementRow, ResultRow, FIG1_HEADER, FIG2_HEADER};
use crate::{CliError, CliResult};

/// Stable hash of a matrix's bit pattern, used to assert paired targets.
fn matrix_hash(m: &SymMatrix) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for v in m.as_matrix().iter() {
        for b in v.to_bits().to_le_bytes() {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    hash
}

/// Target of a trial: seeded only by `(base seed, n, trial)` so every
/// method and sub-dimension is scored against identical inputs.
pub fn trial_target(seed: u64, n: usize, trial: usize) -> SymMatrix {
    random_psd_normalized(n, derive_seed(seed, &[tag("target"), n as u64, trial as u64]))
}

/// A single seeded frame for packed(N = 1): the packing objective is
/// undefined below two frames, so the trivial "packing" is one random frame.
fn single_frame_set(n: usize, s: usize, seed: u64) -> CliResult<FrameSet> {
    let mut rng = rng_from_seed(derive_seed(seed, &[tag("pack-single"), n as u64, s as u64]));
    let frame = Frame::random(n, s, &mut rng)?;
    Ok(FrameSet::new(
        vec![frame],
        Provenance::new("pack-trivial", format!("n={n} s={s} N=1"), Some(seed)),
    )?)
}

/// The packed frame set a fig experiment uses at `(n, s, count)`: a single
/// seeded random frame for count = 1, otherwise the cached or freshly
/// computed packing.
pub fn packed_frame_set(
    cfg: &ExperimentConfig,
    catalog: &PackingCatalog,
    n: usize,
    s: usize,
    count: usize,
    no_compute: bool,
) -> CliResult<FrameSet> {
    if count == 1 {
        return single_frame_set(n, s, cfg.seed);
    }
    let pack_cfg = PackingConfig {
        max_iter: cfg.pack_max_iter,
        tol: cfg.pack_tol,
        restarts: cfg.pack_restarts,
        ..PackingConfig::new(
            n,
            s,
            count,
            derive_seed(cfg.seed, &[tag("pack"), n as u64, s as u64, count as u64]),
        )
    };
    catalog.load_or_pack(&pack_cfg, no_compute)
}

fn packed_cone(
    cfg: &ExperimentConfig,
    catalog: &PackingCatalog,
    n: usize,
    s: usize,
    count: usize,
    no_compute: bool,
) -> CliResult<ConeSum> {
    Ok(ConeSum::new(packed_frame_set(cfg, catalog, n, s, count, no_compute)?)?)
}

/// The fixed, s-independent cone of a structured method, with its natural
/// (s, N) for the result rows (max clique size for chordal families).
fn structured_cone(method: &MethodSpec, n: usize) -> CliResult<(ConeSum, usize, usize)> {
    let (set, s) = match method {
        MethodSpec::Dd => (dd_frames(n)?, 1),
        MethodSpec::Sdd => (fw_frames(n, 2)?, 2),
        MethodSpec::Fw(k) => (fw_frames(n, *k)?, *k),
        MethodSpec::Chordal(path) => {
            let text = std::fs::read_to_string(path)?;
            let (gn, edges) = parse_edge_list(&text)?;
            if gn != n {
                return Err(CliError::Usage(format!(
                    "graph has {gn} vertices but the experiment runs at n = {n}"
                )));
            }
            let graph = verify_chordal(gn, &edges)?;
            let set = chordal_frames(&graph)?;
            let s = set.frames().iter().map(Frame::sub_dim).max().unwrap_or(0);
            (set, s)
        }
        MethodSpec::Packed(_) => unreachable!("packed cones are built per s"),
    };
    let count = set.len();
    Ok((ConeSum::new(set)?, s, count))
}

pub struct Fig1Output {
    pub rows: Vec<ResultRow>,
    /// Mean error per (method label, s), in row order.
    pub summary: Vec<(String, usize, f64)>,
}

impl Fig1Output {
    pub fn csv_body(&self, timestamps: bool) -> String {
        let mut out = String::from(FIG1_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv(timestamps));
            out.push('\n');
        }
        out
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::from("method,s,mean_error\n");
        for (method, s, mean) in &self.summary {
            out.push_str(&format!("{method},{s},{mean:.12e}\n"));
        }
        out
    }
}

/// Runs the approximation-error comparison: each method x sub-dimension x
/// trial projects the trial's target onto the method's cone sum.
pub fn run_fig1(cfg: &ExperimentConfig, workdir: &Path, no_compute: bool) -> CliResult<Fig1Output> {
    cfg.validate()?;
    let catalog = PackingCatalog::new(workdir);
    let n = cfg.n;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut target_hashes: HashMap<usize, u64> = HashMap::new();

    for method in &cfg.methods {
        let label = method.label();
        // (s, cone) cells this method contributes
        let cells: Vec<(usize, usize, ConeSum)> = match method {
            MethodSpec::Packed(count) => {
                let mut cells = Vec::new();
                for &s in &cfg.s_range {
                    eprintln!("fig1: preparing {label} at s={s}");
                    let cone = packed_cone(cfg, &catalog, n, s, *count, no_compute)?;
                    cells.push((s, *count, cone));
                }
                cells
            }
            _ => {
                let (cone, s, count) = structured_cone(method, n)?;
                vec![(s, count, cone)]
            }
        };

        for (s, count, cone) in &cells {
            let mut total = 0.0;
            for trial in 0..cfg.trials {
                let a = trial_target(cfg.seed, n, trial);
                let hash = matrix_hash(&a);
                let expected = *target_hashes.entry(trial).or_insert(hash);
                assert_eq!(expected, hash, "paired-target fairness violated at trial {trial}");

                let started = Instant::now();
                let result = project_onto_cone_sum(&a, cone, cfg.tol, cfg.max_iter)?;
                total += result.error;
                rows.push(ResultRow {
                    method: label.clone(),
                    n,
                    s: *s,
                    count: *count,
                    trial,
                    error: result.error,
                    converged: result.converged,
                    seconds: started.elapsed().as_secs_f64(),
                });
            }
            summary.push((label.clone(), *s, total / cfg.trials as f64));
            eprintln!(
                "fig1: {label} s={s}: mean error {:.6}",
                total / cfg.trials as f64
            );
        }
    }
    Ok(Fig1Output { rows, summary })
}

pub struct Fig2Output {
    pub rows: Vec<RequirementRow>,
}

impl Fig2Output {
    pub fn csv_body(&self) -> String {
        let mut out = String::from(FIG2_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv());
            out.push('\n');
        }
        out
    }
}

/// Mean projection error over the configured trials for a packed(N) cone.
fn mean_error_at(
    cfg: &ExperimentConfig,
    catalog: &PackingCatalog,
    n: usize,
    s: usize,
    count: usize,
    no_compute: bool,
) -> CliResult<f64> {
    let cone = packed_cone(cfg, catalog, n, s, count, no_compute)?;
    let mut total = 0.0;
    for trial in 0..cfg.trials {
        let a = trial_target(cfg.seed, n, trial);
        let result = project_onto_cone_sum(&a, &cone, cfg.tol, cfg.max_iter)?;
        total += result.error;
    }
    let mean = total / cfg.trials as f64;
    eprintln!("fig2: n={n} s={s} N={count}: mean error {mean:.6}");
    Ok(mean)
}

/// Finds the minimal N with mean error below the threshold by doubling
/// followed by binary search on the bracket. Rows whose search hits the cap
/// are flagged, not fatal.
pub fn run_fig2(cfg: &ExperimentConfig, workdir: &Path, no_compute: bool) -> CliResult<Fig2Output> {
    cfg.validate()?;
    let catalog = PackingCatalog::new(workdir);
    let mut rows = Vec::new();
    for &n in &cfg.n_range {
        for &s in &cfg.s_range {
            if s > n {
                continue;
            }
            // doubling phase
            let mut candidate = 1usize;
            let mut passing: Option<usize> = None;
            let mut failing = 0usize;
            loop {
                if mean_error_at(cfg, &catalog, n, s, candidate, no_compute)? < cfg.threshold {
                    passing = Some(candidate);
                    break;
                }
                failing = candidate;
                if candidate >= cfg.cap {
                    break;
                }
                candidate = (candidate * 2).min(cfg.cap);
            }
            let Some(mut hi) = passing else {
                rows.push(RequirementRow {
                    n,
                    s,
                    required: cfg.cap,
                    capped: true,
                });
                continue;
            };
            // binary search on (failing, hi]
            let mut lo = failing;
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if mean_error_at(cfg, &catalog, n, s, mid, no_compute)? < cfg.threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            rows.push(RequirementRow {
                n,
                s,
                required: hi,
                capped: false,
            });
        }
    }
    Ok(Fig2Output { rows })
}
