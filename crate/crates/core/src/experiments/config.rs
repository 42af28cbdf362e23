//! Scenario files: `key = value` lines, `#` comments, and `[heat]` / `[burgers]`
//! sections whose keys apply only to that benchmark.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::hjb::{default_nodes, ControlSet, HjbOptions};
use crate::models::{
    build_advection_diffusion, build_burgers, ControlSystem, Interval, ModelError,
};
use crate::reduction::{Method, SnapshotSettings};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value `{value}` for `{key}`: {message}")]
    InvalidValue {
        key: String,
        value: String,
        message: String,
    },

    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    Heat,
    Burgers,
}

impl Benchmark {
    pub fn as_str(self) -> &'static str {
        match self {
            Benchmark::Heat => "heat",
            Benchmark::Burgers => "burgers",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Benchmark {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "heat" => Ok(Benchmark::Heat),
            "burgers" => Ok(Benchmark::Burgers),
            other => Err(format!("expected `heat` or `burgers`, got `{other}`")),
        }
    }
}

/// Named initial states on the interior grid `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    /// `0.2 B`.
    Input,
    /// `0.2 (1 - ξ)²`.
    TableIc2,
    /// `0.2 (1 - ξ²)`.
    FigIc,
    /// `0.2 𝟙_{(-0.8,-0.6)}`.
    Bump,
    /// `0.2 (B + Cᵀ)`.
    InputOutput,
}

impl InitialCondition {
    pub const ALL: [InitialCondition; 5] = [
        InitialCondition::Input,
        InitialCondition::TableIc2,
        InitialCondition::FigIc,
        InitialCondition::Bump,
        InitialCondition::InputOutput,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InitialCondition::Input => "x01",
            InitialCondition::TableIc2 => "table-ic2",
            InitialCondition::FigIc => "fig-ic",
            InitialCondition::Bump => "bump",
            InitialCondition::InputOutput => "input-output",
        }
    }

    pub fn state(self, sys: &ControlSystem) -> Vec<f64> {
        let xi = &sys.grid_points;
        match self {
            InitialCondition::Input => sys.b.column(0).iter().map(|b| 0.2 * b).collect(),
            InitialCondition::TableIc2 => xi.iter().map(|x| 0.2 * (1.0 - x).powi(2)).collect(),
            InitialCondition::FigIc => xi.iter().map(|x| 0.2 * (1.0 - x * x)).collect(),
            InitialCondition::Bump => xi
                .iter()
                .map(|&x| if x > -0.8 && x < -0.6 { 0.2 } else { 0.0 })
                .collect(),
            InitialCondition::InputOutput => {
                let b = sys.b.column(0);
                let c = sys.c.row(0);
                b.iter().zip(c).map(|(b, c)| 0.2 * (b + c)).collect()
            }
        }
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InitialCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|ic| ic.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|ic| ic.as_str()).collect();
                format!("expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub benchmark: Benchmark,
    pub n: usize,
    pub mu_diff: f64,
    pub mu_adv: f64,
    pub nu: f64,
    pub advection_coeff: f64,
    pub omega_b: Interval,
    pub omega_c: Interval,
    pub weight_z: f64,
    pub weight_u: f64,
    pub lambda: f64,
    /// Half-width of the sampling box `Θ = [-a, a]ⁿ`.
    pub a: f64,
    pub ells: Vec<usize>,
    pub methods: Vec<Method>,
    pub control_min: f64,
    pub control_max: f64,
    pub control_count: usize,
    /// Nodes per axis indexed by `ℓ - 1`; missing entries use [`default_nodes`].
    pub grid_nodes: Vec<usize>,
    pub dt: f64,
    pub tol: f64,
    pub k_max: usize,
    pub dt_sim: f64,
    pub t_quad: f64,
    pub seed: u64,
    pub samples: usize,
    pub snapshot_dt: f64,
    pub snapshot_horizon: f64,
    pub snapshot_columns: usize,
    pub initial_conditions: Vec<InitialCondition>,
    /// Basis dimension used by single-run verbs.
    pub ell: usize,
    pub method: Method,
}

impl ScenarioConfig {
    pub fn defaults(benchmark: Benchmark) -> Self {
        let heat = Self {
            benchmark,
            n: 61,
            mu_diff: 0.2,
            mu_adv: 2.0,
            nu: 0.2,
            advection_coeff: 5.0,
            omega_b: Interval::new(-0.5, -0.1),
            omega_c: Interval::new(0.1, 0.6),
            weight_z: 20.0,
            weight_u: 0.1,
            lambda: 0.0,
            a: 0.2,
            ells: vec![1, 2, 3, 4],
            methods: Method::ALL.to_vec(),
            control_min: -2.0,
            control_max: 2.0,
            control_count: 301,
            grid_nodes: vec![],
            dt: 0.01,
            tol: 1e-6,
            k_max: 5000,
            dt_sim: 1e-4,
            t_quad: 5.0,
            seed: 20170101,
            samples: 50,
            snapshot_dt: 1e-4,
            snapshot_horizon: 2.0 * std::f64::consts::PI,
            snapshot_columns: 500,
            initial_conditions: vec![InitialCondition::InputOutput],
            ell: 3,
            method: Method::Ricc,
        };
        match benchmark {
            Benchmark::Heat => heat,
            Benchmark::Burgers => Self {
                omega_b: Interval::new(-0.7, -0.5),
                weight_z: 100.0,
                lambda: 1.0,
                control_min: -5.0,
                control_max: 5.0,
                control_count: 41,
                dt: 0.005,
                initial_conditions: vec![InitialCondition::Input, InitialCondition::TableIc2],
                ell: 4,
                ..heat
            },
        }
    }

    /// Parses a scenario file, then applies `key=value` overrides in order.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        Self::parse_with_default(text, overrides, Benchmark::Heat)
    }

    /// As [`Self::parse`], with the benchmark used when neither the file nor the overrides name one.
    pub fn parse_with_default(
        text: &str,
        overrides: &[String],
        default: Benchmark,
    ) -> Result<Self, ConfigError> {
        let mut global = Vec::new();
        let mut scoped: Vec<(Benchmark, String, String)> = Vec::new();
        let mut section: Option<Benchmark> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax {
                line: k + 1,
                message,
            };
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(format!("unterminated section header `{line}`")))?;
                section = Some(name.parse().map_err(syntax)?);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if key.is_empty() {
                return Err(syntax("empty key".into()));
            }
            match section {
                Some(b) => scoped.push((b, key, value)),
                None => global.push((key, value)),
            }
        }
        let mut cli = Vec::new();
        for o in overrides {
            let (key, value) = o.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: 0,
                message: format!("override `{o}` is not `key=value`"),
            })?;
            cli.push((key.trim().to_string(), value.trim().to_string()));
        }

        let benchmark_value = cli
            .iter()
            .chain(&global)
            .rev()
            .find(|(k, _)| k == "benchmark")
            .map(|(_, v)| v.clone());
        let benchmark = match benchmark_value {
            Some(v) => v.parse().map_err(|message| ConfigError::InvalidValue {
                key: "benchmark".into(),
                value: v.clone(),
                message,
            })?,
            None => default,
        };
        let mut cfg = Self::defaults(benchmark);
        for (key, value) in &global {
            cfg.set(key, value)?;
        }
        for (b, key, value) in &scoped {
            if *b == benchmark {
                cfg.set(key, value)?;
            }
        }
        for (key, value) in &cli {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        Self::load_with_default(path, overrides, Benchmark::Heat)
    }

    pub fn load_with_default(
        path: &Path,
        overrides: &[String],
        default: Benchmark,
    ) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_with_default(&text, overrides, default)
    }

    /// Assigns one key; `benchmark` is accepted but only honoured by [`Self::parse`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let invalid = |message: String| ConfigError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
            message,
        };
        fn num<T: FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>().map_err(|e| e.to_string())
        }
        fn list<T: FromStr>(v: &str) -> Result<Vec<T>, String>
        where
            T::Err: fmt::Display,
        {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<T>().map_err(|e| format!("`{s}`: {e}")))
                .collect()
        }
        let interval = |v: &str| -> Result<Interval, String> {
            match list::<f64>(v)?.as_slice() {
                [lo, hi] => Ok(Interval::new(*lo, *hi)),
                _ => Err("expected `lo, hi`".into()),
            }
        };
        match key {
            "benchmark" => {
                value.parse::<Benchmark>().map_err(invalid)?;
            }
            "n" => self.n = num(value).map_err(invalid)?,
            "mu_diff" => self.mu_diff = num(value).map_err(invalid)?,
            "mu_adv" => self.mu_adv = num(value).map_err(invalid)?,
            "nu" => self.nu = num(value).map_err(invalid)?,
            "advection_coeff" => self.advection_coeff = num(value).map_err(invalid)?,
            "omega_b" => self.omega_b = interval(value).map_err(invalid)?,
            "omega_c" => self.omega_c = interval(value).map_err(invalid)?,
            "weight_z" => self.weight_z = num(value).map_err(invalid)?,
            "weight_u" => self.weight_u = num(value).map_err(invalid)?,
            "lambda" => self.lambda = num(value).map_err(invalid)?,
            "a" => self.a = num(value).map_err(invalid)?,
            "ells" => self.ells = list(value).map_err(invalid)?,
            "methods" => self.methods = list(value).map_err(invalid)?,
            "controls" => match list::<f64>(value).map_err(invalid)?.as_slice() {
                [lo, hi, count] if *count >= 1.0 && count.fract() == 0.0 => {
                    self.control_min = *lo;
                    self.control_max = *hi;
                    self.control_count = *count as usize;
                }
                _ => return Err(invalid("expected `min, max, count`".into())),
            },
            "grid_nodes" => self.grid_nodes = list(value).map_err(invalid)?,
            "dt" => self.dt = num(value).map_err(invalid)?,
            "tol" => self.tol = num(value).map_err(invalid)?,
            "k_max" => self.k_max = num(value).map_err(invalid)?,
            "dt_sim" => self.dt_sim = num(value).map_err(invalid)?,
            "t_quad" => self.t_quad = num(value).map_err(invalid)?,
            "seed" => self.seed = num(value).map_err(invalid)?,
            "samples" => self.samples = num(value).map_err(invalid)?,
            "snapshot_dt" => self.snapshot_dt = num(value).map_err(invalid)?,
            "snapshot_horizon" => self.snapshot_horizon = num(value).map_err(invalid)?,
            "snapshot_columns" => self.snapshot_columns = num(value).map_err(invalid)?,
            "initial_conditions" => self.initial_conditions = list(value).map_err(invalid)?,
            "ell" => self.ell = num(value).map_err(invalid)?,
            "method" => self.method = num(value).map_err(invalid)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let check = |ok: bool, key: &str, value: String, message: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::InvalidValue {
                    key: key.into(),
                    value,
                    message: message.into(),
                })
            }
        };
        let positive = |key: &str, v: f64| {
            check(
                v > 0.0 && v.is_finite(),
                key,
                v.to_string(),
                "must be positive",
            )
        };
        check(
            self.n >= 3,
            "n",
            self.n.to_string(),
            "needs at least 3 interior points",
        )?;
        positive("a", self.a)?;
        positive("dt", self.dt)?;
        positive("tol", self.tol)?;
        positive("dt_sim", self.dt_sim)?;
        positive("t_quad", self.t_quad)?;
        positive("weight_u", self.weight_u)?;
        positive("snapshot_dt", self.snapshot_dt)?;
        positive("snapshot_horizon", self.snapshot_horizon)?;
        check(
            self.weight_z >= 0.0,
            "weight_z",
            self.weight_z.to_string(),
            "must be nonnegative",
        )?;
        check(
            self.lambda >= 0.0,
            "lambda",
            self.lambda.to_string(),
            "must be nonnegative",
        )?;
        check(
            self.k_max >= 1,
            "k_max",
            self.k_max.to_string(),
            "must be positive",
        )?;
        check(
            self.samples >= 1,
            "samples",
            self.samples.to_string(),
            "must be positive",
        )?;
        check(
            self.snapshot_columns >= 1,
            "snapshot_columns",
            self.snapshot_columns.to_string(),
            "must be positive",
        )?;
        check(
            self.control_count >= 1 && self.control_min <= self.control_max,
            "controls",
            format!(
                "{}, {}, {}",
                self.control_min, self.control_max, self.control_count
            ),
            "needs min ≤ max and a positive count",
        )?;
        check(
            !self.ells.is_empty()
                && self
                    .ells
                    .iter()
                    .all(|&l| l >= 1 && l <= self.n.min(crate::hjb::MAX_DIM)),
            "ells",
            format!("{:?}", self.ells),
            "entries must lie in 1..=min(n, 6)",
        )?;
        check(
            self.ell >= 1 && self.ell <= self.n.min(crate::hjb::MAX_DIM),
            "ell",
            self.ell.to_string(),
            "must lie in 1..=min(n, 6)",
        )?;
        check(
            !self.methods.is_empty(),
            "methods",
            String::new(),
            "must not be empty",
        )?;
        check(
            self.grid_nodes.iter().all(|&g| g >= 2),
            "grid_nodes",
            format!("{:?}", self.grid_nodes),
            "entries must be at least 2",
        )?;
        match self.benchmark {
            Benchmark::Heat => positive("mu_diff", self.mu_diff),
            Benchmark::Burgers => positive("nu", self.nu),
        }
    }

    pub fn build_system(&self) -> Result<ControlSystem, ModelError> {
        let sys = match self.benchmark {
            Benchmark::Heat => build_advection_diffusion(
                self.n,
                self.mu_diff,
                self.mu_adv,
                self.omega_b,
                self.omega_c,
            )?,
            Benchmark::Burgers => {
                build_burgers(self.n, self.nu, self.advection_coeff, self.omega_b)?
            }
        };
        Ok(sys.with_output_cost(self.weight_z, self.weight_u, self.lambda))
    }

    pub fn nodes_for(&self, ell: usize) -> Vec<usize> {
        let per_axis = self
            .grid_nodes
            .get(ell - 1)
            .copied()
            .unwrap_or_else(|| default_nodes(ell));
        vec![per_axis; ell]
    }

    pub fn control_set(&self) -> ControlSet {
        ControlSet::uniform(self.control_min, self.control_max, self.control_count)
            .expect("validated control spec")
    }

    pub fn hjb_options(&self) -> HjbOptions {
        HjbOptions {
            dt: self.dt,
            tol: self.tol,
            k_max: self.k_max,
        }
    }

    /// Snapshot run from rest under `u(t) = sin t`.
    pub fn snapshot_settings(&self) -> SnapshotSettings {
        SnapshotSettings {
            initial_state: vec![0.0; self.n],
            dt_sim: self.snapshot_dt,
            horizon: self.snapshot_horizon,
            max_columns: self.snapshot_columns,
        }
    }

    /// Every key with its current value, in a stable order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let join = |v: &[String]| v.join(",");
        vec![
            ("benchmark", self.benchmark.to_string()),
            ("n", self.n.to_string()),
            ("mu_diff", self.mu_diff.to_string()),
            ("mu_adv", self.mu_adv.to_string()),
            ("nu", self.nu.to_string()),
            ("advection_coeff", self.advection_coeff.to_string()),
            (
                "omega_b",
                format!("{},{}", self.omega_b.lo, self.omega_b.hi),
            ),
            (
                "omega_c",
                format!("{},{}", self.omega_c.lo, self.omega_c.hi),
            ),
            ("weight_z", self.weight_z.to_string()),
            ("weight_u", self.weight_u.to_string()),
            ("lambda", self.lambda.to_string()),
            ("a", self.a.to_string()),
            (
                "ells",
                join(&self.ells.iter().map(|l| l.to_string()).collect::<Vec<_>>()),
            ),
            (
                "methods",
                join(
                    &self
                        .methods
                        .iter()
                        .map(|m| m.to_string())
                        .collect::<Vec<_>>(),
                ),
            ),
            (
                "controls",
                format!(
                    "{},{},{}",
                    self.control_min, self.control_max, self.control_count
                ),
            ),
            (
                "grid_nodes",
                join(
                    &self
                        .grid_nodes
                        .iter()
                        .map(|g| g.to_string())
                        .collect::<Vec<_>>(),
                ),
            ),
            ("dt", self.dt.to_string()),
            ("tol", self.tol.to_string()),
            ("k_max", self.k_max.to_string()),
            ("dt_sim", self.dt_sim.to_string()),
            ("t_quad", self.t_quad.to_string()),
            ("seed", self.seed.to_string()),
            ("samples", self.samples.to_string()),
            ("snapshot_dt", self.snapshot_dt.to_string()),
            ("snapshot_horizon", self.snapshot_horizon.to_string()),
            ("snapshot_columns", self.snapshot_columns.to_string()),
            (
                "initial_conditions",
                join(
                    &self
                        .initial_conditions
                        .iter()
                        .map(|ic| ic.to_string())
                        .collect::<Vec<_>>(),
                ),
            ),
            ("ell", self.ell.to_string()),
            ("method", self.method.to_string()),
        ]
    }
}
