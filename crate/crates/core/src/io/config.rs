//! Plain `key = value` run configuration.
//!
//! Lines are trimmed; blank lines and anything after `#` are ignored. Values
//! may come from a file, command-line flags or the environment. Each value
//! remembers its origin so validation errors can point at it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::curve::{EnergyGrid, Spacing};
use crate::ensemble::EnsembleOptions;
use crate::error::{Error, Result};
use crate::fitting::{C6Scan, WindowBounds};
use crate::landscape::DEFAULT_TOLERANCE;
use crate::lattice::{DistributionKind, LatticeSpec, PotentialDistribution};
use crate::nu_counting::CubeRule;

/// Every accepted key, in manifest order.
pub const KEYS: [&str; 21] = [
    "dimension",
    "side",
    "kind",
    "vmax",
    "realizations",
    "base_seed",
    "grid_lo",
    "grid_hi",
    "grid_points",
    "grid_spacing",
    "window_min",
    "window_max",
    "c6_lo",
    "c6_hi",
    "c6_steps",
    "split_groups",
    "cube_rule",
    "landscape_tol",
    "output_dir",
    "dense_oracle",
    "workers",
];

/// Environment variable overriding `workers`.
pub const WORKERS_ENV: &str = "LANDSCAPE_IDOS_WORKERS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag(String),
    Env(String),
    /// A built-in default for the named key.
    Default(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "config line {n}"),
            Origin::Flag(name) => write!(f, "flag --{name}"),
            Origin::Env(name) => write!(f, "environment variable {name}"),
            Origin::Default(key) => write!(f, "default value of {key}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub e_lo: f64,
    pub e_hi: f64,
    pub points: usize,
    pub spacing: Spacing,
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dimension: usize,
    pub side: usize,
    pub kind: DistributionKind,
    pub v_max: f64,
    pub realizations: usize,
    pub base_seed: u64,
    pub grid: GridConfig,
    pub window: WindowBounds,
    pub c6_scan: C6Scan,
    /// Number of groups for split-sample error bars; `None` disables them.
    pub split_groups: Option<usize>,
    pub cube_rule: CubeRule,
    pub landscape_tol: f64,
    pub output_dir: PathBuf,
    pub dense_oracle: bool,
    /// Worker threads; 0 uses one per available core.
    pub workers: usize,
}

impl RunConfig {
    pub fn lattice(&self) -> LatticeSpec {
        LatticeSpec::new(self.dimension, self.side).expect("validated on construction")
    }

    pub fn distribution(&self) -> PotentialDistribution {
        PotentialDistribution::new(self.kind, self.v_max).expect("validated on construction")
    }

    pub fn energy_grid(&self) -> EnergyGrid {
        let g = &self.grid;
        EnergyGrid::new(g.e_lo, g.e_hi, g.points, g.spacing).expect("validated on construction")
    }

    pub fn ensemble_options(&self, progress: bool) -> EnsembleOptions {
        EnsembleOptions {
            landscape_tol: self.landscape_tol,
            cube_rule: self.cube_rule,
            progress,
        }
    }

    /// Every key with its resolved value. Parsing the result gives back an
    /// equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            out.push_str(&format!("{key} = {}\n", self.value_of(key)));
        }
        out
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "dimension" => self.dimension.to_string(),
            "side" => self.side.to_string(),
            "kind" => self.kind.to_string(),
            "vmax" => self.v_max.to_string(),
            "realizations" => self.realizations.to_string(),
            "base_seed" => self.base_seed.to_string(),
            "grid_lo" => self.grid.e_lo.to_string(),
            "grid_hi" => self.grid.e_hi.to_string(),
            "grid_points" => self.grid.points.to_string(),
            "grid_spacing" => self.grid.spacing.to_string(),
            "window_min" => self.window.e_min.to_string(),
            "window_max" => self.window.e_max.map_or("auto".into(), |e| e.to_string()),
            "c6_lo" => self.c6_scan.lo.to_string(),
            "c6_hi" => self.c6_scan.hi.to_string(),
            "c6_steps" => self.c6_scan.steps.to_string(),
            "split_groups" => self.split_groups.unwrap_or(0).to_string(),
            "cube_rule" => self.cube_rule.to_string(),
            "landscape_tol" => self.landscape_tol.to_string(),
            "output_dir" => self.output_dir.display().to_string(),
            "dense_oracle" => self.dense_oracle.to_string(),
            "workers" => self.workers.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }
}

/// Parse and validate a whole config text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    ConfigDraft::parse(text)?.finish()
}

/// Raw values collected from all sources, before validation. Later `set`
/// calls override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct ConfigDraft {
    entries: BTreeMap<&'static str, (String, Origin)>,
}

impl ConfigDraft {
    pub fn parse(text: &str) -> Result<Self> {
        let mut draft = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let origin = Origin::Line(k + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_error(&origin, format!("expected `key = value`, got `{line}`")));
            };
            let key = key.trim();
            if let Some((_, first)) = draft.entries.get(key) {
                return Err(config_error(
                    &origin,
                    format!("duplicate key `{key}` (first set at {first})"),
                ));
            }
            draft.set(key, value.trim(), origin)?;
        }
        Ok(draft)
    }

    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<()> {
        let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
            return Err(config_error(&origin, format!("unknown key `{key}`")));
        };
        self.entries.insert(known, (value.to_string(), origin));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn value<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((raw, origin)) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| config_error(origin, format!("cannot parse `{key}` value `{raw}`: {e}"))),
        }
    }

    fn origin(&self, key: &str) -> Origin {
        self.entries
            .get(key)
            .map(|(_, o)| o.clone())
            .unwrap_or_else(|| Origin::Default(key.to_string()))
    }

    fn check(&self, key: &str, ok: bool, message: impl FnOnce() -> String) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(config_error(&self.origin(key), message()))
        }
    }

    /// Fill defaults and validate every invariant.
    pub fn finish(&self) -> Result<RunConfig> {
        let side: i64 = self.value("side")?.unwrap_or(1000);
        self.check("side", side >= 3, || format!("side must be at least 3, got {side}"))?;
        let side = side as usize;

        let dimension: usize = self.value("dimension")?.unwrap_or(1);
        self.check("dimension", dimension == 1 || dimension == 2, || {
            format!("dimension must be 1 or 2, got {dimension}")
        })?;
        let kind = match self.entries.get("kind") {
            Some((raw, origin)) => raw
                .parse::<DistributionKind>()
                .map_err(|e| config_error(origin, e.to_string()))?,
            None => DistributionKind::Binary,
        };
        let v_max: f64 = self.value("vmax")?.unwrap_or(1.0);
        self.check("vmax", v_max > 0.0 && v_max.is_finite(), || {
            format!("vmax must be positive and finite, got {v_max}")
        })?;
        let realizations: usize = self.value("realizations")?.unwrap_or(100);
        self.check("realizations", realizations >= 1, || {
            "realizations must be at least 1".into()
        })?;
        let base_seed: u64 = self.value("base_seed")?.unwrap_or(0);

        let ceiling = v_max + 4.0 * dimension as f64;
        let e_lo: f64 = self.value("grid_lo")?.unwrap_or(0.01);
        let e_hi: f64 = self.value("grid_hi")?.unwrap_or(ceiling);
        let points: usize = self.value("grid_points")?.unwrap_or(200);
        let spacing = match self.entries.get("grid_spacing") {
            Some((raw, origin)) => raw
                .parse::<Spacing>()
                .map_err(|e| config_error(origin, e.to_string()))?,
            None => Spacing::Log,
        };
        self.check("grid_lo", e_lo > 0.0 && e_lo.is_finite(), || {
            format!("grid_lo must be positive, got {e_lo}")
        })?;
        self.check("grid_hi", e_hi > e_lo && e_hi <= ceiling * (1.0 + 1e-9), || {
            format!("grid_hi must lie in (grid_lo, vmax + 4d = {ceiling}], got {e_hi}")
        })?;
        self.check("grid_points", points >= 2, || {
            format!("grid_points must be at least 2, got {points}")
        })?;

        let e_min: f64 = self
            .value("window_min")?
            .unwrap_or(WindowBounds::default_for(dimension).e_min);
        self.check("window_min", e_min > 0.0, || {
            format!("window_min must be positive, got {e_min}")
        })?;
        let e_max = match self.get("window_max") {
            None | Some("auto") => None,
            Some(_) => self.value::<f64>("window_max")?,
        };
        if let Some(e) = e_max {
            self.check("window_max", e > e_min, || {
                format!("window_max {e} must exceed window_min {e_min}")
            })?;
        }

        let default_scan = C6Scan::default();
        let c6_scan = C6Scan {
            lo: self.value("c6_lo")?.unwrap_or(default_scan.lo),
            hi: self.value("c6_hi")?.unwrap_or(default_scan.hi),
            steps: self.value("c6_steps")?.unwrap_or(default_scan.steps),
        };
        self.check("c6_lo", c6_scan.lo > 0.0 && c6_scan.lo < c6_scan.hi, || {
            format!("need 0 < c6_lo < c6_hi, got {} and {}", c6_scan.lo, c6_scan.hi)
        })?;
        self.check("c6_steps", c6_scan.steps >= 2, || "c6_steps must be at least 2".into())?;

        let split_groups = match self.value::<usize>("split_groups")?.unwrap_or(0) {
            0 => None,
            m => Some(m),
        };
        if let Some(m) = split_groups {
            self.check("split_groups", m >= 2 && realizations.is_multiple_of(m), || {
                format!("split_groups must be at least 2 and divide realizations ({realizations}), got {m}")
            })?;
        }
        let cube_rule = match self.entries.get("cube_rule") {
            Some((raw, origin)) => raw
                .parse::<CubeRule>()
                .map_err(|e| config_error(origin, e.to_string()))?,
            None => CubeRule::default(),
        };
        let landscape_tol: f64 = self.value("landscape_tol")?.unwrap_or(DEFAULT_TOLERANCE);
        self.check("landscape_tol", landscape_tol > 0.0 && landscape_tol < 1.0, || {
            format!("landscape_tol must lie in (0, 1), got {landscape_tol}")
        })?;
        let output_dir = PathBuf::from(self.get("output_dir").unwrap_or("out"));
        self.check("output_dir", !output_dir.as_os_str().is_empty(), || {
            "output_dir is empty".into()
        })?;
        let dense_oracle: bool = self.value("dense_oracle")?.unwrap_or(false);
        let workers: usize = self.value("workers")?.unwrap_or(0);

        Ok(RunConfig {
            dimension,
            side,
            kind,
            v_max,
            realizations,
            base_seed,
            grid: GridConfig {
                e_lo,
                e_hi,
                points,
                spacing,
            },
            window: WindowBounds { e_min, e_max },
            c6_scan,
            split_groups,
            cube_rule,
            landscape_tol,
            output_dir,
            dense_oracle,
            workers,
        })
    }
}

fn config_error(origin: &Origin, message: String) -> Error {
    Error::Config {
        origin: origin.to_string(),
        message,
    }
}
