use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use stoq_core::ensembles::CatalystMode;
use stoq_core::stoquastize::StoquastizationKind;

use crate::error::{ExpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DenseWins,
    MaxcutMingap,
    MaxcutTts,
    CheegerAudit,
    XdiagGaps,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::DenseWins => "dense_wins",
            Family::MaxcutMingap => "maxcut_mingap",
            Family::MaxcutTts => "maxcut_tts",
            Family::CheegerAudit => "cheeger_audit",
            Family::XdiagGaps => "xdiag_gaps",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stoquastic counterpart compared against the original Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Designed,
    Shifted,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Designed => "designed",
            Variant::Shifted => "shifted",
        }
    }

    /// Catalyst map used on interpolation paths: `α → −|α|` or
    /// `α → ½(α − 1)`.
    pub fn catalyst_kind(self) -> StoquastizationKind {
        match self {
            Variant::Designed => StoquastizationKind::DeSigned,
            Variant::Shifted => StoquastizationKind::ShiftedUniform(1.0),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "designed" | "de-signed" => Ok(Variant::Designed),
            "shifted" => Ok(Variant::Shifted),
            _ => Err(ExpError::Config(format!("unknown stoquastization {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DenseEnsemble {
    Real,
    Complex,
}

impl DenseEnsemble {
    pub fn name(self) -> &'static str {
        match self {
            DenseEnsemble::Real => "real",
            DenseEnsemble::Complex => "complex",
        }
    }
}

/// Logarithmic anneal-time grid `2^lo … 2^hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub lo: i32,
    pub hi: i32,
    pub per_octave: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            lo: 0,
            hi: 14,
            per_octave: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Matrix dimensions, spin counts or vertex counts, by family.
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    #[serde(default = "default_catalyst_mode")]
    pub catalyst_mode: CatalystMode,
    #[serde(default = "default_variants")]
    pub stoquastizations: Vec<Variant>,
    #[serde(default)]
    pub master_seed: u64,
    /// Directory receiving `<family>.jsonl` and `<family>.csv`.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default = "one")]
    pub catalysts_per_instance: usize,
    #[serde(default = "default_ensembles")]
    pub ensembles: Vec<DenseEnsemble>,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    #[serde(default)]
    pub t_grid: TimeGrid,
    #[serde(default = "half")]
    pub edge_probability: f64,
    #[serde(default = "half")]
    pub negative_probability: f64,
    #[serde(default = "two")]
    pub k_max: usize,
    /// X-strings per X-diagonal Hamiltonian, as a multiple of `n`.
    #[serde(default = "three")]
    pub terms_per_qubit: usize,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
}

fn default_catalyst_mode() -> CatalystMode {
    CatalystMode::Uniform
}

fn default_variants() -> Vec<Variant> {
    vec![Variant::Designed, Variant::Shifted]
}

fn default_ensembles() -> Vec<DenseEnsemble> {
    vec![DenseEnsemble::Real, DenseEnsemble::Complex]
}

fn default_resamples() -> usize {
    1000
}

fn default_retries() -> usize {
    10_000
}

fn one() -> usize {
    1
}

fn two() -> usize {
    2
}

fn three() -> usize {
    3
}

fn half() -> f64 {
    0.5
}

/// Fewest bootstrap resamples accepted.
pub const MIN_BOOTSTRAP_RESAMPLES: usize = 1000;
pub const MAX_MINGAP_SPINS: usize = 22;
pub const MAX_TTS_SPINS: usize = 16;

impl ExperimentConfig {
    /// Desk-scale defaults for a family.
    pub fn new(family: Family) -> Self {
        let (sizes, instances) = match family {
            Family::DenseWins => ((3..=10).collect(), 10_000),
            Family::MaxcutMingap => (vec![6, 8, 10, 12], 200),
            Family::MaxcutTts => (vec![6], 10),
            Family::CheegerAudit => ((4..=12).collect(), 50),
            Family::XdiagGaps => ((1..=10).collect(), 100),
        };
        ExperimentConfig {
            family,
            sizes,
            instances_per_size: instances,
            catalyst_mode: default_catalyst_mode(),
            stoquastizations: default_variants(),
            master_seed: 0,
            output: None,
            workers: 1,
            catalysts_per_instance: 1,
            ensembles: default_ensembles(),
            bootstrap_resamples: default_resamples(),
            t_grid: TimeGrid::default(),
            edge_probability: half(),
            negative_probability: half(),
            k_max: two(),
            terms_per_qubit: three(),
            max_retries: default_retries(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ExpError::Config(msg));
        if self.sizes.is_empty() {
            return bad("no sizes given".into());
        }
        if self.sizes.contains(&0) {
            return bad("sizes must be positive".into());
        }
        if self.instances_per_size == 0 || self.catalysts_per_instance == 0 || self.workers == 0 {
            return bad("instance, catalyst and worker counts must be positive".into());
        }
        if self.bootstrap_resamples < MIN_BOOTSTRAP_RESAMPLES {
            return bad(format!("at least {MIN_BOOTSTRAP_RESAMPLES} bootstrap resamples are required"));
        }
        match self.family {
            Family::DenseWins => {
                if let Some(&n) = self.sizes.iter().find(|&&n| n < 2) {
                    return bad(format!("matrix dimension {n} is below 2"));
                }
                if self.ensembles.is_empty() {
                    return bad("no dense ensembles selected".into());
                }
            }
            Family::MaxcutMingap | Family::MaxcutTts => {
                let max = if self.family == Family::MaxcutTts {
                    MAX_TTS_SPINS
                } else {
                    MAX_MINGAP_SPINS
                };
                if let Some(&n) = self.sizes.iter().find(|&&n| n % 2 == 1 || !(6..=max).contains(&n)) {
                    return bad(format!("spin count {n} must be even and within 6..={max}"));
                }
                if self.stoquastizations.is_empty() {
                    return bad("no stoquastizations selected".into());
                }
                if self.family == Family::MaxcutTts && (self.t_grid.lo > self.t_grid.hi || self.t_grid.per_octave == 0) {
                    return bad("empty anneal-time grid".into());
                }
            }
            Family::CheegerAudit => {
                if let Some(&n) = self.sizes.iter().find(|&&n| !(2..=14).contains(&n)) {
                    return bad(format!("graph size {n} must be within 2..=14"));
                }
                for p in [self.edge_probability, self.negative_probability] {
                    if !(0.0..=1.0).contains(&p) {
                        return bad(format!("probability {p} outside [0, 1]"));
                    }
                }
                if self.edge_probability == 0.0 {
                    return bad("edge probability must be positive".into());
                }
            }
            Family::XdiagGaps => {
                if let Some(&n) = self.sizes.iter().find(|&&n| n > 12) {
                    return bad(format!("X-diagonal size {n} exceeds 12 qubits"));
                }
                if self.terms_per_qubit == 0 {
                    return bad("terms_per_qubit must be positive".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_with_defaults() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            family = "maxcut_mingap"
            sizes = [6, 8]
            instances_per_size = 10
            catalyst_mode = "pm1"
            stoquastizations = ["designed"]
            master_seed = 42
            "#,
        )
        .unwrap();
        assert_eq!(cfg.catalyst_mode, CatalystMode::Pm1);
        assert_eq!(cfg.bootstrap_resamples, 1000);
        assert_eq!(cfg.workers, 1);
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ExperimentConfig::new(Family::MaxcutMingap);
        cfg.sizes = vec![7];
        assert!(cfg.validate().is_err());
        cfg.sizes = vec![6];
        cfg.bootstrap_resamples = 10;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::new(Family::CheegerAudit);
        cfg.sizes = vec![15];
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_toml("family = \"dense_wins\"\nsizes = []\ninstances_per_size = 1").is_err());
        assert!(ExperimentConfig::from_toml("family = \"nope\"\nsizes = [3]\ninstances_per_size = 1").is_err());
    }

    #[test]
    fn family_defaults_validate() {
        for f in [
            Family::DenseWins,
            Family::MaxcutMingap,
            Family::MaxcutTts,
            Family::CheegerAudit,
            Family::XdiagGaps,
        ] {
            ExperimentConfig::new(f).validate().unwrap();
        }
    }
}
