//! Experiment configuration. Values are resolved in three layers: built-in
//! defaults, then a TOML file given with `--config`, then command-line flags.

use std::path::Path;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use medcomp_core::learners::{BvClass, BvErm, LipschitzClass, LipschitzErm, ThresholdErm};
use medcomp_core::medboost::{RoundsPolicy, DEFAULT_ROUNDS_CONSTANT};
use medcomp_core::sparsify::{trials_for_confidence, DEFAULT_INITIAL_N, DEFAULT_TRIAL_CONFIDENCE};
use medcomp_core::synth::TargetFamily;
use medcomp_core::weaklearn::{
    fat_dim_of, DEFAULT_C1, DEFAULT_C2, DEFAULT_C3, DEFAULT_DELTA, DEFAULT_MAX_RETRIES,
};
use medcomp_core::{BoostConfig, Erm, SparsifyConfig, SparsifyPolicy, TaskKind, WeakLearnConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Bv,
    Lipschitz,
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SparsifyMode {
    /// Start at `sparsify_n` and double on failure.
    Adaptive,
    /// Exactly `sparsify_n` members.
    Fixed,
}

/// Fully resolved configuration, echoed into every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub task: Task,
    /// Variation budget for `bv`.
    pub v: f64,
    /// Lipschitz constant for `lipschitz`.
    pub l: f64,
    pub diam: f64,
    pub ddim: f64,
    /// Separation of the random packing behind Lipschitz targets.
    pub packing_eps: f64,
    pub dim: usize,
    pub m: usize,
    pub eta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub seed: u64,
    pub trials: usize,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c_t: f64,
    /// Fixed number of boosting rounds; empty means the automatic rule.
    pub rounds: Option<usize>,
    pub max_retries: usize,
    pub sparsify: SparsifyMode,
    pub sparsify_n: usize,
    pub sparsify_trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: Task::Bv,
            v: 1.0,
            l: 1.0,
            diam: 1.0,
            ddim: 1.0,
            packing_eps: 0.05,
            dim: 1,
            m: 200,
            eta: 0.2,
            gamma: 0.125,
            delta: DEFAULT_DELTA,
            seed: 0,
            trials: 1,
            c1: DEFAULT_C1,
            c2: DEFAULT_C2,
            c3: DEFAULT_C3,
            c_t: DEFAULT_ROUNDS_CONSTANT,
            rounds: None,
            max_retries: DEFAULT_MAX_RETRIES,
            sparsify: SparsifyMode::Adaptive,
            sparsify_n: DEFAULT_INITIAL_N,
            sparsify_trials: trials_for_confidence(DEFAULT_TRIAL_CONFIDENCE),
        }
    }
}

/// One layer of settings. Used both for `--config` files and for flags.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[arg(long, value_enum)]
    pub task: Option<Task>,
    #[arg(long)]
    pub v: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub diam: Option<f64>,
    /// Doubling dimension; defaults to `dim`.
    #[arg(long)]
    pub ddim: Option<f64>,
    #[arg(long)]
    pub packing_eps: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub c3: Option<f64>,
    #[arg(long)]
    pub c_t: Option<f64>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub max_retries: Option<usize>,
    #[arg(long, value_enum)]
    pub sparsify: Option<SparsifyMode>,
    #[arg(long)]
    pub sparsify_n: Option<usize>,
    #[arg(long)]
    pub sparsify_trials: Option<usize>,
}

macro_rules! layer {
    ($cfg:ident, $o:ident, $($field:ident),*) => {
        $(if let Some(x) = $o.$field { $cfg.$field = x; })*
    };
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))
    }

    fn apply(&self, cfg: &mut ExperimentConfig) -> bool {
        let o = self;
        layer!(
            cfg,
            o,
            task,
            v,
            l,
            diam,
            packing_eps,
            dim,
            m,
            eta,
            gamma,
            delta,
            seed,
            trials,
            c1,
            c2,
            c3,
            c_t,
            max_retries,
            sparsify,
            sparsify_n,
            sparsify_trials
        );
        if let Some(ddim) = o.ddim {
            cfg.ddim = ddim;
        }
        if o.rounds.is_some() {
            cfg.rounds = o.rounds;
        }
        o.ddim.is_some()
    }
}

/// Defaults, then the file (if any), then flags.
pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    let mut ddim_set = false;
    if let Some(path) = file {
        ddim_set |= Overrides::from_file(path)?.apply(&mut cfg);
    }
    ddim_set |= flags.apply(&mut cfg);
    if !ddim_set {
        cfg.ddim = cfg.dim as f64;
    }
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::usage(msg));
        if matches!(self.task, Task::Bv | Task::Threshold) && self.dim != 1 {
            return bad(format!(
                "task {:?} lives on [0,1]; dim must be 1",
                self.task
            ));
        }
        if self.dim == 0 || self.m == 0 || self.trials == 0 {
            return bad("dim, m and trials must be positive".into());
        }
        if self.sparsify_n == 0 || self.sparsify_trials == 0 {
            return bad("sparsify_n and sparsify_trials must be positive".into());
        }
        if !(self.packing_eps > 0.0) {
            return bad(format!(
                "packing_eps = {} must be positive",
                self.packing_eps
            ));
        }
        self.boost_config().validate()?;
        let erm = self.erm()?;
        self.weak_config(&erm).validate()?;
        Ok(())
    }

    pub fn task_kind(&self) -> TaskKind {
        self.family().task()
    }

    pub fn family(&self) -> TargetFamily {
        match self.task {
            Task::Bv => TargetFamily::Bv { v: self.v },
            Task::Lipschitz => TargetFamily::Lipschitz {
                l: self.l,
                packing_eps: self.packing_eps,
            },
            Task::Threshold => TargetFamily::Threshold,
        }
    }

    pub fn erm(&self) -> Result<Arc<dyn Erm>, CliError> {
        Ok(match self.task {
            Task::Bv => Arc::new(BvErm::new(BvClass::new(self.v)?)),
            Task::Lipschitz => Arc::new(LipschitzErm::new(LipschitzClass::new(
                self.l, self.diam, self.ddim,
            )?)),
            Task::Threshold => Arc::new(ThresholdErm),
        })
    }

    pub fn boost_config(&self) -> BoostConfig {
        let mut b = BoostConfig::auto(self.eta, self.gamma);
        b.rounds = match self.rounds {
            Some(t) => RoundsPolicy::Fixed(t),
            None => RoundsPolicy::Auto { c_t: self.c_t },
        };
        b
    }

    pub fn weak_config(&self, erm: &Arc<dyn Erm>) -> WeakLearnConfig {
        let mut w = WeakLearnConfig::new(self.eta, self.gamma, fat_dim_of(erm));
        w.delta = self.delta;
        w.c1 = self.c1;
        w.c2 = self.c2;
        w.c3 = self.c3;
        w.max_retries = self.max_retries;
        w
    }

    pub fn sparsify_config(&self) -> SparsifyConfig {
        let mut s = SparsifyConfig::adaptive(self.eta, self.gamma, self.task_kind());
        s.policy = match self.sparsify {
            SparsifyMode::Adaptive => SparsifyPolicy::Adaptive {
                initial: self.sparsify_n,
            },
            SparsifyMode::Fixed => SparsifyPolicy::Fixed(self.sparsify_n),
        };
        s.max_trials_per_n = self.sparsify_trials;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_beat_file_beats_defaults() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "m = 50\neta = 0.3\nseed = 9").unwrap();
        let flags = Overrides {
            eta: Some(0.4),
            ..Default::default()
        };
        let cfg = resolve(Some(f.path()), &flags).unwrap();
        assert_eq!(cfg.m, 50);
        assert_eq!(cfg.eta, 0.4);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.gamma, 0.125);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "etta = 0.3").unwrap();
        assert_eq!(
            resolve(Some(f.path()), &Overrides::default())
                .unwrap_err()
                .code,
            2
        );
    }

    #[test]
    fn ddim_follows_dim_unless_given() {
        let flags = Overrides {
            task: Some(Task::Lipschitz),
            dim: Some(3),
            ..Default::default()
        };
        assert_eq!(resolve(None, &flags).unwrap().ddim, 3.0);
        let flags = Overrides {
            ddim: Some(1.5),
            ..flags
        };
        assert_eq!(resolve(None, &flags).unwrap().ddim, 1.5);
    }

    #[test]
    fn gamma_out_of_range_is_usage_error() {
        let flags = Overrides {
            gamma: Some(0.3),
            ..Default::default()
        };
        assert_eq!(resolve(None, &flags).unwrap_err().code, 2);
    }
}
