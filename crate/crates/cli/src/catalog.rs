//! Content-addressed persistence for packed frame sets, so expensive
//! packings are computed once and reused across experiments. Files live
//! under `<workdir>/packings/` keyed by every parameter that influences the
//! result.

use std::fs;
use std::path::{Path, PathBuf};

use psdpack::frames::FrameSet;
use psdpack::packing::{pack, PackingConfig, TargetRule};
use psdpack::seeding::tag;

use crate::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct PackingCatalog {
    dir: PathBuf,
}

impl PackingCatalog {
    pub fn new(workdir: &Path) -> Self {
        Self {
            dir: workdir.join("packings"),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn key(cfg: &PackingConfig) -> String {
        let target = match cfg.target {
            TargetRule::Rankin => "rankin".to_string(),
            TargetRule::Value(d) => format!("{d:.12e}"),
        };
        let canon = format!(
            "n={} s={} N={} seed={} max_iter={} tol={:.3e} restarts={} target={} shrink={:?}",
            cfg.n, cfg.s, cfg.count, cfg.seed, cfg.max_iter, cfg.tol, cfg.restarts, target, cfg.shrink
        );
        format!(
            "pack_n{}_s{}_N{}_{:016x}.json",
            cfg.n,
            cfg.s,
            cfg.count,
            tag(&canon)
        )
    }

    pub fn path_for(&self, cfg: &PackingConfig) -> PathBuf {
        self.dir.join(Self::key(cfg))
    }

    /// Loads the cached packing, or computes and stores it. With
    /// `no_compute`, a missing entry is a catalog-miss error (exit code 5).
    pub fn load_or_pack(&self, cfg: &PackingConfig, no_compute: bool) -> CliResult<FrameSet> {
        let path = self.path_for(cfg);
        if path.exists() {
            let text = fs::read_to_string(&path)?;
            // re-validates the Stiefel invariant and the stored min distance
            return Ok(FrameSet::from_json_str(&text)?);
        }
        if no_compute {
            return Err(CliError::CatalogMiss(format!(
                "no cached packing for n={} s={} N={} (expected {})",
                cfg.n,
                cfg.s,
                cfg.count,
                path.display()
            )));
        }
        if cfg.count > 20 {
            eprintln!(
                "warning: packing quality is known to degrade above 20 subspaces (N = {}); \
                 relying on restarts",
                cfg.count
            );
        }
        let result = pack(cfg)?;
        fs::create_dir_all(&self.dir)?;
        fs::write(&path, result.frames.to_json())?;
        Ok(result.frames)
    }
}
