//! Run configuration: parsed from an optional JSON file, overridden by flags,
//! and embedded (fully resolved) in every report.

use std::path::Path;

use anyhow::{bail, Context};
use multipolar::exponents::parse_rational;
use multipolar::multipole::{regular_simplex, PoleConfig};
use multipolar::Rational;
use serde::{Deserialize, Serialize};

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "MULTIPOLAR_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// `n` points at unit pairwise distance in the first `n-1` coordinates.
    Simplex,
    /// Explicit pole coordinates.
    Custom(Vec<Vec<f64>>),
}

/// Every knob a command can read. Omitted fields take their defaults; `s`
/// defaults to `4-N` and is written back once resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub poles: usize,
    pub layout: Layout,
    /// Ground-state exponent, as `"p/q"`.
    pub s: Option<String>,
    /// Derivative order of the Rayleigh quotient (1 or 2).
    pub order: u8,
    /// Monte-Carlo samples per integral (per annulus for the cut-off sweep).
    pub samples: u64,
    pub seed: u64,
    /// Random bump trials per check.
    pub trials: usize,
    /// Evaluation points for the pointwise checks.
    pub points: usize,
    /// `(δ, R)` pairs of the mollified sweep (n ≥ 3).
    pub mollified_sweep: Vec<(f64, f64)>,
    /// `ε` values of the cut-off sweeps (n = 2).
    pub epsilons: Vec<f64>,
    /// Accepted `|ratio - 1|` for the attainment evidence of a verdict.
    pub ratio_band: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dimension: 5,
            poles: 3,
            layout: Layout::Simplex,
            s: None,
            order: 2,
            samples: 100_000,
            seed: 0,
            trials: 5,
            points: 200,
            mollified_sweep: vec![(0.2, 5.0), (0.1, 10.0), (0.05, 20.0)],
            epsilons: vec![0.2, 0.1, 0.05, 0.02],
            ratio_band: 0.1,
        }
    }
}

/// Overrides collected from the command line; `None` keeps the file value.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub dimension: Option<usize>,
    pub poles: Option<usize>,
    pub layout: Option<String>,
    pub coordinates: Option<String>,
    pub s: Option<String>,
    pub order: Option<u8>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub points: Option<usize>,
    pub mollified_sweep: Option<String>,
    pub epsilons: Option<String>,
    pub ratio_band: Option<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text).context("config is not a valid RunConfig")
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn apply(&mut self, o: Overrides) -> anyhow::Result<()> {
        if let Some(v) = o.dimension {
            self.dimension = v;
        }
        if let Some(v) = o.poles {
            self.poles = v;
        }
        match (o.layout.as_deref(), o.coordinates) {
            (Some("simplex"), None) => self.layout = Layout::Simplex,
            (Some("simplex"), Some(_)) => bail!("--coordinates conflicts with --layout simplex"),
            (Some("custom") | None, Some(text)) => {
                let coords = parse_points(&text)?;
                self.poles = coords.len();
                self.layout = Layout::Custom(coords);
            }
            (Some("custom"), None) => bail!("--layout custom needs --coordinates"),
            (Some(other), _) => bail!("unknown layout {other:?} (expected simplex or custom)"),
            (None, None) => {}
        }
        if let Some(v) = o.s {
            self.s = Some(v);
        }
        if let Some(v) = o.order {
            self.order = v;
        }
        if let Some(v) = o.samples {
            self.samples = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.trials {
            self.trials = v;
        }
        if let Some(v) = o.points {
            self.points = v;
        }
        if let Some(text) = o.mollified_sweep {
            self.mollified_sweep = parse_pairs(&text)?;
        }
        if let Some(text) = o.epsilons {
            self.epsilons = parse_list(&text)?;
        }
        if let Some(v) = o.ratio_band {
            self.ratio_band = v;
        }
        Ok(())
    }

    /// Resolves `s` (default `4-N`) and writes it back into the config.
    pub fn resolve_s(&mut self) -> anyhow::Result<Rational> {
        let s = match &self.s {
            Some(text) => parse_rational(text).with_context(|| format!("s = {text:?} is not a rational p/q"))?,
            None => Rational::from_integer(4 - self.dimension as i64),
        };
        self.s = Some(s.to_string());
        Ok(s)
    }

    /// Builds the pole configuration with uniform weights.
    pub fn pole_config(&self) -> anyhow::Result<PoleConfig> {
        let poles = match &self.layout {
            Layout::Simplex => regular_simplex(self.poles, self.dimension)?,
            Layout::Custom(coords) => {
                if coords.len() != self.poles {
                    bail!("{} pole coordinates given but poles = {}", coords.len(), self.poles);
                }
                coords.clone()
            }
        };
        Ok(PoleConfig::new(self.dimension, poles, None)?)
    }
}

fn parse_list(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("{t:?} is not a number"))
        })
        .collect()
}

/// `"x1,x2,...;y1,y2,..."`
fn parse_points(text: &str) -> anyhow::Result<Vec<Vec<f64>>> {
    text.split(';').map(parse_list).collect()
}

/// `"δ1:R1,δ2:R2,..."`
fn parse_pairs(text: &str) -> anyhow::Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|pair| {
            let (a, b) = pair.split_once(':').with_context(|| format!("{pair:?} is not δ:R"))?;
            let a = a
                .trim()
                .parse::<f64>()
                .with_context(|| format!("{a:?} is not a number"))?;
            let b = b
                .trim()
                .parse::<f64>()
                .with_context(|| format!("{b:?} is not a number"))?;
            Ok((a, b))
        })
        .collect()
}
