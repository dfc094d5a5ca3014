use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shadow_geom::io::BodyFile;
use shadow_geom::{GeomError, Polytope64};

use crate::failure::Failure;

/// Experiment description as written on disk. Every field is optional; unknown
/// keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub samples: Option<usize>,
    pub seeds: Option<usize>,
    pub n_max: Option<usize>,
    pub body: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Multiplies every decomposition weight by `1 + perturb_weights` before
    /// checking; a fault-injection knob.
    pub perturb_weights: Option<f64>,
}

/// Config after defaults and command-line overrides, echoed in reports.
#[derive(Clone, Debug, Serialize)]
pub struct Resolved {
    pub experiment: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub samples: usize,
    pub seeds: usize,
    pub n_max: usize,
    pub body: Option<PathBuf>,
    pub perturb_weights: f64,
}

pub const MAX_SAMPLES: usize = 10_000_000;
pub const MAX_SEEDS: usize = 1000;

/// Per-subcommand defaults for the fields the config leaves out.
pub struct Defaults {
    pub n: usize,
    pub m: usize,
    pub tolerance: f64,
    pub samples: usize,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| {
            Failure::Config(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
        })?;
        // body paths are relative to the config file
        if let (Some(body), Some(dir)) = (&cfg.body, path.parent()) {
            if body.is_relative() {
                cfg.body = Some(dir.join(body));
            }
        }
        Ok(cfg)
    }

    pub fn resolve(&self, name: &str, d: Defaults) -> Result<Resolved, Failure> {
        let r = Resolved {
            experiment: self.experiment.clone().unwrap_or_else(|| name.to_string()),
            n: self.n.unwrap_or(d.n),
            m: self.m.unwrap_or(d.m.max(self.n.unwrap_or(d.n))),
            seed: self.seed.unwrap_or(0),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            samples: self.samples.unwrap_or(d.samples),
            seeds: self.seeds.unwrap_or(10),
            n_max: self.n_max.unwrap_or(200),
            body: self.body.clone(),
            perturb_weights: self.perturb_weights.unwrap_or(0.0),
        };
        r.validate()?;
        Ok(r)
    }
}

impl Resolved {
    fn validate(&self) -> Result<(), Failure> {
        let bad = |msg: String| Err(Failure::Config(msg));
        if !(1..=shadow_geom::polytope::MAX_DIM).contains(&self.n) {
            return bad(format!("n = {} outside 1..={}", self.n, shadow_geom::polytope::MAX_DIM));
        }
        if !(self.n..=shadow_geom::polytope::MAX_SLABS).contains(&self.m) {
            return bad(format!("m = {} outside {}..={}", self.m, self.n, shadow_geom::polytope::MAX_SLABS));
        }
        if !(self.tolerance.is_finite() && (1e-10..=1e-2).contains(&self.tolerance)) {
            return bad(format!("tolerance {} outside [1e-10, 1e-2]", self.tolerance));
        }
        if !(1..=MAX_SAMPLES).contains(&self.samples) {
            return bad(format!("samples = {} outside 1..={MAX_SAMPLES}", self.samples));
        }
        if !(1..=MAX_SEEDS).contains(&self.seeds) {
            return bad(format!("seeds = {} outside 1..={MAX_SEEDS}", self.seeds));
        }
        if !(2..=200).contains(&self.n_max) {
            return bad(format!("n_max = {} outside 2..=200", self.n_max));
        }
        if !(self.perturb_weights.is_finite() && self.perturb_weights > -1.0) {
            return bad(format!("perturb_weights = {} must exceed -1", self.perturb_weights));
        }
        Ok(())
    }
}

/// Reads and validates a body file.
pub fn load_body(path: &Path) -> Result<Polytope64, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let file: BodyFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))?;
    file.to_polytope().map_err(|e| match e {
        GeomError::Capacity { .. } => Failure::Capacity(format!("{}: {e}", path.display())),
        _ => Failure::Config(format!("{}: {e}", path.display())),
    })
}
