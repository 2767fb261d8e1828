//! Scenario assembly: built-in defaults, then an optional TOML file, then
//! command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rdgame_core::{GovernmentPrefs, PlanSpec, Scenario};
use serde::Deserialize;

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub locations: Option<Vec<f64>>,
    pub fixed_cost: Option<f64>,
    pub baseline_utility: Option<f64>,
    pub tolerance: Option<f64>,
    pub grid_resolution: Option<usize>,
    pub mc_samples: Option<usize>,
    pub rng_seed: Option<u64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid config file")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text)
    }
}

/// Scenario values given on the command line.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub locations: Option<Vec<f64>>,
    pub fixed_cost: Option<f64>,
    pub baseline_utility: Option<f64>,
    pub tolerance: Option<f64>,
    pub grid_resolution: Option<usize>,
    pub mc_samples: Option<usize>,
    pub rng_seed: Option<u64>,
}

fn plans(n: Option<usize>, locations: Option<Vec<f64>>, source: &str) -> Result<Option<PlanSpec>> {
    match (n, locations) {
        (Some(_), Some(_)) => bail!("{source} gives both a plan count and explicit locations"),
        (Some(n), None) => Ok(Some(PlanSpec::Count(n))),
        (None, Some(z)) => Ok(Some(PlanSpec::Locations(z))),
        (None, None) => Ok(None),
    }
}

/// Merges flag > file > default and validates the result.
pub fn build_scenario(file: Option<ConfigFile>, flags: Overrides) -> Result<Scenario> {
    let file = file.unwrap_or_default();
    let defaults = Scenario::default();
    let plan_spec = plans(flags.n, flags.locations, "the command line")?
        .or(plans(file.n, file.locations, "the config file")?)
        .unwrap_or(defaults.plans);
    let baseline = flags.baseline_utility.or(file.baseline_utility).unwrap_or(defaults.prefs.baseline_utility());
    let scenario = Scenario {
        plans: plan_spec,
        fixed_cost: flags.fixed_cost.or(file.fixed_cost).unwrap_or(defaults.fixed_cost),
        prefs: GovernmentPrefs::new(baseline)?,
        tolerance: flags.tolerance.or(file.tolerance).unwrap_or(defaults.tolerance),
        grid_resolution: flags.grid_resolution.or(file.grid_resolution).unwrap_or(defaults.grid_resolution),
        mc_samples: flags.mc_samples.or(file.mc_samples).unwrap_or(defaults.mc_samples),
        rng_seed: flags.rng_seed.or(file.rng_seed).unwrap_or(defaults.rng_seed),
    };
    scenario.validate()?;
    Ok(scenario)
}
