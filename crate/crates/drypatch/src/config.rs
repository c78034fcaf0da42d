//! Scenario configuration: model parameters, grid presets, family
//! selection, seeds and tolerances, loadable from a TOML file with full
//! defaulting.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Grid resolution presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `r* = 300`, `T = 1000`: the acceptance-test configuration.
    Desk,
    /// `r* = 400`, `T = 2000`: full-resolution runs.
    Paper,
}

/// Families the scenario driver can trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    SpotA,
    GapSub,
    GapSuper,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::SpotA => "spot_a",
            Family::GapSub => "gap_sub",
            Family::GapSuper => "gap_super",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "spot_a" | "spota" | "spot" => Ok(Family::SpotA),
            "gap_sub" | "gapsub" => Ok(Family::GapSub),
            "gap_super" | "gapsuper" => Ok(Family::GapSuper),
            other => Err(Error::Config(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub r_star: f64,
    pub t: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            r_star: 300.0,
            t: 1000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SeedConfig {
    /// Seed the spot this far below the computed Turing onset.
    pub spot_p_offset: f64,
    /// Core amplitude of the localised spot seed.
    pub spot_amplitude: f64,
    /// Envelope rate of the spot seed.
    pub spot_envelope: f64,
    /// Bifurcation distance for the gap seeds.
    pub gap_eps: f64,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig {
            spot_p_offset: 0.0075,
            spot_amplitude: 0.25,
            spot_envelope: 0.1,
            gap_eps: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub newton_tol: f64,
    pub amp_tol: f64,
    pub osc_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            newton_tol: 1e-10,
            amp_tol: 2e-4,
            osc_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuationConfig {
    pub ds_init: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub max_steps: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            ds_init: 1e-3,
            ds_min: 1e-6,
            ds_max: 5e-2,
            max_steps: 900,
        }
    }
}

/// Full configuration for the command-line front end.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub params: ModelParams,
    pub rho_cases: Vec<f64>,
    pub grid: GridConfig,
    pub families: Vec<Family>,
    pub output_dir: PathBuf,
    pub seeds: SeedConfig,
    pub tolerances: ToleranceConfig,
    pub continuation: ContinuationConfig,
    /// Compute stability per accepted branch point.
    pub stability_along_branches: bool,
    /// Worker threads for scenario branches (0: library default).
    pub max_workers: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            params: ModelParams::default(),
            rho_cases: vec![1.5, 2.0, 2.5, 2.7],
            grid: GridConfig::default(),
            families: vec![Family::SpotA, Family::GapSub, Family::GapSuper],
            output_dir: PathBuf::from("out"),
            seeds: SeedConfig::default(),
            tolerances: ToleranceConfig::default(),
            continuation: ContinuationConfig::default(),
            stability_along_branches: true,
            max_workers: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ScenarioConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{path:?}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_preset(&mut self, preset: Preset) {
        self.grid = match preset {
            Preset::Desk => GridConfig {
                r_star: 300.0,
                t: 1000,
            },
            Preset::Paper => GridConfig {
                r_star: 400.0,
                t: 2000,
            },
        };
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.grid.t < 4 || self.grid.r_star <= 0.0 {
            return Err(Error::Config(format!(
                "bad grid: r_star = {}, T = {}",
                self.grid.r_star, self.grid.t
            )));
        }
        for &rho in &self.rho_cases {
            if rho <= 0.0 {
                return Err(Error::Config(format!("rho = {rho} must be > 0")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_standard_parameters() {
        let cfg = ScenarioConfig::default();
        assert_eq!(cfg.params.gamma, 1.6);
        assert_eq!(cfg.params.sigma, 1.6);
        assert_eq!(cfg.params.nu_mort, 0.2);
        assert_eq!(cfg.params.beta, 3.0);
        assert_eq!(cfg.params.delta, 30.0);
        assert_eq!(cfg.rho_cases, vec![1.5, 2.0, 2.5, 2.7]);
        assert_eq!(cfg.grid.r_star, 300.0);
        assert_eq!(cfg.grid.t, 1000);
    }

    #[test]
    fn preset_switches_grid() {
        let mut cfg = ScenarioConfig::default();
        cfg.apply_preset(Preset::Paper);
        assert_eq!(cfg.grid.r_star, 400.0);
        assert_eq!(cfg.grid.t, 2000);
    }

    #[test]
    fn toml_roundtrip_with_partial_file() {
        let text = r#"
            rho_cases = [1.5]
            [grid]
            t = 500
            [params]
            gamma = 1.6
            sigma = 1.6
            nu_mort = 0.2
            beta = 3.0
            delta = 30.0
            rho = 1.5
            p = 0.2
        "#;
        let cfg: ScenarioConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.grid.t, 500);
        assert_eq!(cfg.grid.r_star, 300.0); // default fills the rest
        assert_eq!(cfg.rho_cases, vec![1.5]);
    }
}
