use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use qss_core::adversary::CheatUnitaryParams;
use qss_core::protocol::{AdversaryPrior, AttackMode, Ordering, ProtocolConfig};
use qss_core::quantum::QubitCap;
use qss_core::witness::Normalization;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OrderingArg {
    Naive,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AttackArg {
    None,
    Intercept,
    Unitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PriorArg {
    AssumePsi,
    Bayesian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationArg {
    Published,
    Sound,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Published => Normalization::Published,
            NormalizationArg::Sound => Normalization::Sound,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// Pretty JSON security report.
    #[default]
    Summary,
    /// Line-delimited JSON: header, events, round records, report.
    Transcript,
}

/// Keys accepted in a config file. Every key is optional and has a flag of
/// the same name (underscores become dashes).
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    #[arg(long)]
    pub parties: Option<usize>,
    #[arg(long)]
    pub rounds: Option<u64>,
    #[arg(long)]
    pub q_z: Option<f64>,
    #[arg(long)]
    pub p_psi: Option<f64>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long, value_enum)]
    pub ordering: Option<OrderingArg>,
    #[arg(long, value_enum)]
    pub attack: Option<AttackArg>,
    /// Sixteen comma-separated angles for `--attack unitary`.
    #[arg(long, value_delimiter = ',', num_args = 16)]
    pub unitary: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub prior: Option<PriorArg>,
    #[arg(long)]
    pub k_sigma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub witness_check: Option<bool>,
    #[arg(long, value_enum)]
    pub normalization: Option<NormalizationArg>,
    #[arg(long)]
    pub qubit_cap: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($field:ident),*) => {
        $(if $src.$field.is_some() { $dst.$field = $src.$field.clone(); })*
    };
}

impl RunOptions {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in config file {}", path.display()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Values set in `other` win.
    pub fn overlay(mut self, other: &RunOptions) -> Self {
        overlay!(
            self, other, parties, rounds, q_z, p_psi, test_fraction, ordering, attack, unitary, prior, k_sigma, seed,
            witness_check, normalization, qubit_cap, output, format
        );
        self
    }

    pub fn protocol_config(&self) -> Result<ProtocolConfig> {
        let mut cfg = ProtocolConfig::default();
        if let Some(v) = self.parties {
            cfg.n_parties = v;
        }
        if let Some(v) = self.rounds {
            cfg.num_rounds = v;
        }
        if let Some(v) = self.q_z {
            cfg.q_z = v;
        }
        if let Some(v) = self.p_psi {
            cfg.p_psi = v;
        }
        if let Some(v) = self.test_fraction {
            cfg.test_fraction = v;
        }
        if let Some(v) = self.ordering {
            cfg.ordering = match v {
                OrderingArg::Naive => Ordering::Naive,
                OrderingArg::Reversed => Ordering::Reversed,
            };
        }
        cfg.attack = match (self.attack, &self.unitary) {
            (None | Some(AttackArg::None), None) => AttackMode::None,
            (Some(AttackArg::Intercept), None) => AttackMode::InterceptEntangle,
            (Some(AttackArg::Unitary), Some(angles)) => AttackMode::ParamUnitary(CheatUnitaryParams::from_flat(angles)?),
            (Some(AttackArg::Unitary), None) => AttackMode::ParamUnitary(CheatUnitaryParams::identity()),
            (_, Some(_)) => bail!("field `unitary` requires `attack = \"unitary\"`"),
        };
        if let Some(v) = self.prior {
            cfg.adversary_prior = match v {
                PriorArg::AssumePsi => AdversaryPrior::AssumePsi,
                PriorArg::Bayesian => AdversaryPrior::Bayesian,
            };
        }
        if let Some(v) = self.k_sigma {
            cfg.k_sigma = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.witness_check {
            cfg.witness_check = v;
        }
        if let Some(v) = self.normalization {
            cfg.witness_normalization = v.into();
        }
        if let Some(v) = self.qubit_cap {
            cfg.qubit_cap = QubitCap(v);
        }
        cfg.validate().context("invalid configuration")?;
        Ok(cfg)
    }
}

/// Relative output paths land under `QSS_OUTPUT_DIR` when it is set.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os("QSS_OUTPUT_DIR") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}
