//! Experiment configuration: seeds, trial counts, scenario selection, scale
//! knobs and tolerance overrides. Identical configs produce byte-identical
//! reports.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Which verification battery to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Scenario {
    /// Seminorm oracles and pointwise inequalities on random scalar families.
    SeminormChain,
    /// Dyadic martingale projections: identities, square functions, ratios.
    MartingaleOsc,
    /// Sharp Fourier cutoffs and smooth bump comparisons.
    CarlesonOsc,
    /// Polynomial ergodic averages, telescoping, character-sum checkpoints.
    DzTheorem,
    /// Projection-family hypotheses across every built-in family.
    ProjectionOscillation,
    /// Multi-parameter composition: product telescoping and degeneration.
    ComposedTelescoping,
    /// Long/short decomposition of oscillation over dyadic-refining grids.
    LongShortSplit,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::SeminormChain => "seminorm_chain",
            Scenario::MartingaleOsc => "martingale_osc",
            Scenario::CarlesonOsc => "carleson_osc",
            Scenario::DzTheorem => "dz_theorem",
            Scenario::ProjectionOscillation => "projection_oscillation",
            Scenario::ComposedTelescoping => "composed_telescoping",
            Scenario::LongShortSplit => "long_short_split",
        }
    }
}

/// Seeded implementation corruptions for negative-control runs: a healthy
/// battery must catch each of them (exit code 1).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Mutation {
    #[default]
    None,
    /// Oscillation blocks close on the right: `[I_j, I_{j+1}]`.
    BlockBoundary,
    /// Sequence validation accepts non-strict (merely nondecreasing) input.
    NonStrictSeq,
    /// A supremum over an empty block contributes `|a_{I_j}|` instead of 0.
    EmptySup,
}

impl Mutation {
    pub fn name(&self) -> &'static str {
        match self {
            Mutation::None => "none",
            Mutation::BlockBoundary => "block_boundary",
            Mutation::NonStrictSeq => "non_strict_seq",
            Mutation::EmptySup => "empty_sup",
        }
    }
}

/// Scale knobs shared by scenarios and estimates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleConfig {
    /// Maximum scalar family length for brute-force batteries.
    pub family_len_max: usize,
    /// Dyadic depth `K` (spaces of `2^K` atoms).
    pub k_depth: u32,
    /// Cyclic modulus for arithmetic scenarios (prime recommended).
    pub modulus: usize,
    /// Cyclic size for Fourier-cutoff scenarios.
    pub cyclic_n: usize,
    /// Block counts `J` swept by estimates.
    pub j_values: Vec<usize>,
    /// Size of the index set estimates sample sequences from.
    pub index_count: usize,
    /// Lacunary estimate: log2 of the cyclic size.
    pub lacunary_log_n: u32,
    /// Lacunary estimate: ratios τ to sweep.
    pub lacunary_taus: Vec<f64>,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self {
            family_len_max: 12,
            k_depth: 10,
            modulus: 101,
            cyclic_n: 256,
            j_values: vec![4, 8, 16, 32, 64],
            index_count: 96,
            lacunary_log_n: 14,
            lacunary_taus: vec![1.2, 1.5, 2.0, 4.0],
        }
    }
}

/// Tolerances and empirical thresholds. The exact-identity tolerances come
/// from the contract the operations promise; the empirical thresholds
/// (`doob_max`, `growth_max`, `long_short_c`) are calibration choices and
/// deliberately overridable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Exact identities and oracle agreement (relative).
    pub exact: f64,
    /// Coboundary telescoping (relative).
    pub telescoping: f64,
    /// Multi-parameter product telescoping (absolute).
    pub product_telescoping: f64,
    /// Pointwise inequality slack (absolute).
    pub inequality_slack: f64,
    /// Empirical bound for the martingale maximal-function ratio.
    pub doob_max: f64,
    /// Allowed `ratio(J_max)/ratio(J_min)` growth in uniform-ratio checks.
    pub growth_max: f64,
    /// Noise band for "non-increasing" normalized curves (fractional).
    pub noise_band: f64,
    /// Constant `C` in the long/short comparison `lhs ≤ C·rhs`.
    pub long_short_c: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            exact: 1e-12,
            telescoping: 1e-13,
            product_telescoping: 1e-11,
            inequality_slack: 1e-10,
            doob_max: 2.1,
            growth_max: 2.0,
            noise_band: 0.10,
            long_short_c: 8.0,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Where to write the JSON report (stdout when absent).
    pub report: Option<PathBuf>,
    /// Directory for CSV curve emission.
    pub csv_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub scenario: Scenario,
    pub mutation: Mutation,
    pub scale: ScaleConfig,
    pub tolerances: ToleranceConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 500,
            scenario: Scenario::SeminormChain,
            mutation: Mutation::None,
            scale: ScaleConfig::default(),
            tolerances: ToleranceConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be positive".into()));
        }
        if self.scale.family_len_max < 4 || self.scale.family_len_max > 20 {
            return Err(HarnessError::Config(
                "family_len_max must lie in 4..=20 (brute-force cap)".into(),
            ));
        }
        if self.scale.j_values.is_empty() {
            return Err(HarnessError::Config("j_values must be nonempty".into()));
        }
        if self.scale.k_depth == 0 || self.scale.k_depth > 20 {
            return Err(HarnessError::Config("k_depth must lie in 1..=20".into()));
        }
        if self.scale.modulus < 3 {
            return Err(HarnessError::Config("modulus must be at least 3".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back.seed, cfg.seed);
        assert_eq!(back.scenario, cfg.scenario);
    }

    #[test]
    fn partial_toml_uses_defaults() {
        let cfg =
            ExperimentConfig::from_toml_str("seed = 7\nscenario = \"dz_theorem\"\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.scenario, Scenario::DzTheorem);
        assert_eq!(cfg.trials, 500);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(ExperimentConfig::from_toml_str("trials = 0\n").is_err());
    }
}
