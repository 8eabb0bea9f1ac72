//! Near-optimal packings of N s-dimensional subspaces of R^n under chordal
//! distance, by alternating projection on the block Gram matrix.
//!
//! The structural projection pins diagonal blocks to the identity and caps
//! off-diagonal block norms at `mu = sqrt(s - d^2)`, which is exactly the
//! feasibility region for minimum pairwise chordal distance >= d. The
//! spectral projection restores the properties of a rank-n Gram matrix:
//! PSD, rank <= n, trace sN. Frames are recovered from the top-n eigenpairs
//! and re-orthonormalized block by block.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::frames::{min_pairwise_distance, Frame, FrameSet, Provenance};
use crate::seeding::{self, derive_seed, tag};
use crate::symmat::{symmetrize, SymMatrix};

/// Block Gram matrix `G = F^T F` of a configuration of N frames of equal
/// sub-dimension s, stored dense as sN x sN.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    block_dim: usize,
    block_count: usize,
    entries: DMatrix<f64>,
}

impl GramMatrix {
    pub fn new(block_dim: usize, block_count: usize, entries: DMatrix<f64>) -> Result<Self> {
        let expect = block_dim * block_count;
        if entries.nrows() != expect || entries.ncols() != expect {
            return Err(Error::DimensionMismatch(format!(
                "Gram matrix is {}x{}, expected {expect}x{expect}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if (entries.transpose() - &entries).norm() > 1e-12 * entries.norm().max(1.0) {
            return Err(Error::InvalidArgument("Gram matrix must be symmetric".into()));
        }
        Ok(Self {
            block_dim,
            block_count,
            entries: symmetrize(&entries),
        })
    }

    /// Gram matrix of an explicit frame configuration.
    pub fn from_frames(frames: &[Frame]) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty frame configuration".into()))?;
        let (n, s) = (first.ambient_dim(), first.sub_dim());
        if frames
            .iter()
            .any(|f| f.ambient_dim() != n || f.sub_dim() != s)
        {
            return Err(Error::DimensionMismatch(
                "all frames must share ambient and sub dimensions".into(),
            ));
        }
        let count = frames.len();
        let mut g = DMatrix::zeros(s * count, s * count);
        for i in 0..count {
            for j in i..count {
                let block = frames[i].columns().transpose() * frames[j].columns();
                g.view_mut((i * s, j * s), (s, s)).copy_from(&block);
                g.view_mut((j * s, i * s), (s, s)).copy_from(&block.transpose());
            }
        }
        GramMatrix::new(s, count, g)
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        let s = self.block_dim;
        self.entries.view((i * s, j * s), (s, s)).clone_owned()
    }
}

/// Rankin-type upper bound for the chordal packing radius: the returned d
/// satisfies `d^2 = min(s, s(n-s)/n * N/(N-1))`. The structural projection
/// enforces it through `mu = sqrt(s - d^2)`.
pub fn rankin_target(n: usize, s: usize, count: usize) -> f64 {
    assert!(s >= 1 && s <= n, "need 1 <= s <= n");
    assert!(count >= 2, "bound needs at least two subspaces");
    let (nf, sf, cf) = (n as f64, s as f64, count as f64);
    let simplex = sf * (nf - sf) / nf * (cf / (cf - 1.0));
    simplex.min(sf).sqrt()
}

/// Sets every diagonal block to the identity and rescales any off-diagonal
/// block with `||G_ij||_F > mu` down to norm mu, mirroring to keep symmetry.
pub fn structural_project(g: &GramMatrix, mu: f64) -> GramMatrix {
    let s = g.block_dim;
    let count = g.block_count;
    let mut m = g.entries.clone();
    for i in 0..count {
        m.view_mut((i * s, i * s), (s, s))
            .copy_from(&DMatrix::identity(s, s));
        for j in (i + 1)..count {
            let block = m.view((i * s, j * s), (s, s)).clone_owned();
            let norm = block.norm();
            if norm > mu {
                let scaled = block * (mu / norm);
                m.view_mut((i * s, j * s), (s, s)).copy_from(&scaled);
                m.view_mut((j * s, i * s), (s, s))
                    .copy_from(&scaled.transpose());
            } else {
                // mirror the untouched block so symmetry is exact
                m.view_mut((j * s, i * s), (s, s))
                    .copy_from(&block.transpose());
            }
        }
    }
    GramMatrix {
        block_dim: s,
        block_count: count,
        entries: m,
    }
}

/// Keeps the `rank_cap` largest eigenvalues (negatives clipped to zero),
/// rescales them by a common factor so the trace equals sN, and
/// reconstructs. Fails with a degenerate-spectrum error when nothing
/// positive remains.
pub fn spectral_project(g: &GramMatrix, rank_cap: usize) -> Result<GramMatrix> {
    let dim = g.entries.nrows();
    assert!(rank_cap >= 1 && rank_cap <= dim, "need 1 <= rank_cap <= sN");
    let dec = SymMatrix::from_dense(g.entries.clone())?.eig()?;
    let retained: Vec<f64> = (0..rank_cap)
        .map(|i| dec.eigenvalues[i].max(0.0))
        .collect();
    let total: f64 = retained.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate(
            "spectral projection retained no positive eigenvalue".into(),
        ));
    }
    let scale = dim as f64 / total;
    let mut m = DMatrix::zeros(dim, dim);
    for (i, &lambda) in retained.iter().enumerate() {
        if lambda > 0.0 {
            let v = dec.eigenvectors.column(i);
            m.ger(lambda * scale, &v, &v, 1.0);
        }
    }
    Ok(GramMatrix {
        block_dim: g.block_dim,
        block_count: g.block_count,
        entries: symmetrize(&m),
    })
}

/// Recovers a frame configuration from a (numerically) rank-n Gram matrix:
/// forms the n x sN factor from the top min(n, sN) eigenpairs (padded with
/// zero rows when sN < n) and re-orthonormalizes each n x s block through
/// its polar factor.
pub fn extract_frames(g: &GramMatrix, n: usize) -> Result<Vec<Frame>> {
    let s = g.block_dim;
    let count = g.block_count;
    let dim = s * count;
    assert!(n >= 1, "ambient dimension must be >= 1");
    let rank = n.min(dim);
    let dec = SymMatrix::from_dense(g.entries.clone())?.eig()?;
    if dec.eigenvalues[dim - 1] < -1e-8 * dec.eigenvalues[0].abs().max(1.0) {
        return Err(Error::NotPsd {
            min_eig: dec.eigenvalues[dim - 1],
        });
    }
    let mut factor = DMatrix::zeros(n, dim);
    for r in 0..rank {
        let weight = dec.eigenvalues[r].max(0.0).sqrt();
        for c in 0..dim {
            factor[(r, c)] = weight * dec.eigenvectors[(c, r)];
        }
    }
    let mut frames = Vec::with_capacity(count);
    for k in 0..count {
        let block = factor.view((0, k * s), (n, s)).clone_owned();
        let frame = Frame::from_columns(block, 0.0).map_err(|e| match e {
            Error::Degenerate(msg) => {
                Error::Degenerate(format!("extracted block {k} is rank-deficient: {msg}"))
            }
            other => other,
        })?;
        frames.push(frame);
    }
    Ok(frames)
}

/// Target selection for the structural constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetRule {
    /// Use the Rankin-type bound from [`rankin_target`].
    Rankin,
    /// Use a fixed chordal-distance target d in (0, sqrt(s)].
    Value(f64),
}

/// Parameters of one packing run.
#[derive(Debug, Clone)]
pub struct PackingConfig {
    pub n: usize,
    pub s: usize,
    pub count: usize,
    pub target: TargetRule,
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Multiplicative shrink applied to the target distance when the
    /// iteration stalls (every `max_iter / 10` rounds without convergence).
    pub shrink: Option<f64>,
}

impl PackingConfig {
    pub fn new(n: usize, s: usize, count: usize, seed: u64) -> Self {
        Self {
            n,
            s,
            count,
            target: TargetRule::Rankin,
            max_iter: 5_000,
            tol: 1e-8,
            restarts: 10,
            seed,
            shrink: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.s == 0 || self.s > self.n {
            return Err(Error::InvalidArgument(format!(
                "sub-dimension {} outside [1, {}]",
                self.s, self.n
            )));
        }
        if self.count < 2 {
            return Err(Error::InvalidArgument(
                "packing needs at least two frames (the objective is undefined otherwise)".into(),
            ));
        }
        if self.max_iter == 0 || self.restarts == 0 {
            return Err(Error::InvalidArgument(
                "max_iter and restarts must be positive".into(),
            ));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if let TargetRule::Value(d) = self.target {
            if !d.is_finite() || d <= 0.0 || d * d > self.s as f64 + 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "target distance {d} outside (0, sqrt(s)]"
                )));
            }
        }
        if let Some(f) = self.shrink {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidArgument(
                    "shrink factor must lie in (0, 1)".into(),
                ));
            }
        }
        Ok(())
    }

    fn target_distance(&self) -> f64 {
        match self.target {
            TargetRule::Rankin => rankin_target(self.n, self.s, self.count),
            TargetRule::Value(d) => d,
        }
    }
}

/// Outcome of [`pack`]: the best frame set over all restarts.
#[derive(Debug, Clone)]
pub struct PackingResult {
    pub frames: FrameSet,
    pub achieved_min_chordal: f64,
    pub iterations_used: usize,
    pub restart_index: usize,
    pub converged: bool,
    /// Min chordal distance per restart; `None` marks a degenerate restart.
    pub restart_scores: Vec<Option<f64>>,
}

struct RestartOutcome {
    frames: Vec<Frame>,
    score: f64,
    iterations: usize,
    converged: bool,
}

fn run_restart(cfg: &PackingConfig, restart: usize) -> Result<RestartOutcome> {
    let mut rng = seeding::rng_from_seed(derive_seed(cfg.seed, &[tag("pack-restart"), restart as u64]));
    let init: Vec<Frame> = (0..cfg.count)
        .map(|_| Frame::random(cfg.n, cfg.s, &mut rng))
        .collect::<Result<_>>()?;
    let mut gram = GramMatrix::from_frames(&init)?;

    let mut d = cfg.target_distance();
    let mut mu = (cfg.s as f64 - d * d).max(0.0).sqrt();
    let stall_window = (cfg.max_iter / 10).max(1);

    // the rank constraint is vacuous when the configuration has fewer than
    // n columns in total
    let rank_cap = cfg.n.min(cfg.s * cfg.count);
    let mut converged = false;
    let mut iterations = 0;
    for t in 1..=cfg.max_iter {
        iterations = t;
        let next = spectral_project(&structural_project(&gram, mu), rank_cap)?;
        let change = (next.matrix() - gram.matrix()).norm();
        gram = next;
        if change <= cfg.tol {
            converged = true;
            break;
        }
        if let Some(factor) = cfg.shrink {
            if t % stall_window == 0 {
                d *= factor;
                mu = (cfg.s as f64 - d * d).max(0.0).sqrt();
            }
        }
    }

    let frames = extract_frames(&gram, cfg.n)?;
    let score = min_pairwise_distance(&frames)?;
    Ok(RestartOutcome {
        frames,
        score,
        iterations,
        converged,
    })
}

/// Runs the alternating-projection packing with restarts; the restart with
/// the largest achieved minimum chordal distance wins (ties keep the lowest
/// restart index). Deterministic for a fixed configuration.
pub fn pack(cfg: &PackingConfig) -> Result<PackingResult> {
    cfg.validate()?;
    let mut best: Option<(usize, RestartOutcome)> = None;
    let mut scores: Vec<Option<f64>> = Vec::with_capacity(cfg.restarts);
    let mut failures: Vec<String> = Vec::new();
    for r in 0..cfg.restarts {
        match run_restart(cfg, r) {
            Ok(out) => {
                scores.push(Some(out.score));
                let better = match &best {
                    None => true,
                    Some((_, cur)) => out.score > cur.score,
                };
                if better {
                    best = Some((r, out));
                }
            }
            Err(e) => {
                scores.push(None);
                failures.push(format!("restart {r}: {e}"));
            }
        }
    }
    let (restart_index, outcome) = best.ok_or_else(|| {
        Error::PackingFailed(format!(
            "all {} restarts degenerate: {}",
            cfg.restarts,
            failures.join("; ")
        ))
    })?;
    let provenance = Provenance::new(
        "pack",
        format!(
            "n={} s={} N={} target={:?} max_iter={} tol={:.1e} restarts={} generator={}",
            cfg.n,
            cfg.s,
            cfg.count,
            cfg.target,
            cfg.max_iter,
            cfg.tol,
            cfg.restarts,
            seeding::GENERATOR_NAME,
        ),
        Some(cfg.seed),
    );
    let frames = FrameSet::new(outcome.frames, provenance)?.with_min_chordal()?;
    let achieved = frames.min_chordal().expect("min distance just computed");
    Ok(PackingResult {
        frames,
        achieved_min_chordal: achieved,
        iterations_used: outcome.iterations,
        restart_index,
        converged: outcome.converged,
        restart_scores: scores,
    })
}
