use std::fmt;
use std::io::{self, Write};
use std::time::Instant;

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hjb::{closed_loop, evaluate_value, value_iteration, HjbSolution};
use crate::io::fmt_float;
use crate::models::{simulate, ControlSystem};
use crate::reduction::{project, Method, ReducedSystem};

use super::bases::BasisFactory;
use super::config::{Benchmark, ConfigError, InitialCondition, ScenarioConfig};
use super::lqr::{quadrature_cost, LqrReference};
use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    MeanRelativeValueError,
    ClosedLoopCost,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::MeanRelativeValueError => "mean relative value error",
            MetricKind::ClosedLoopCost => "closed-loop cost",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub value: Result<f64, String>,
    pub seconds: f64,
    /// Value-iteration sweeps and whether the tolerance was met.
    pub iterations: Option<(usize, bool)>,
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub label: String,
    pub cells: Vec<Cell>,
}

/// Metric per (row, ℓ); failed cells carry their error instead of a value.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub name: String,
    pub kind: MetricKind,
    pub ells: Vec<usize>,
    pub rows: Vec<ReportRow>,
    pub metadata: Vec<(String, String)>,
}

impl ComparisonReport {
    pub fn value(&self, label: &str, ell: usize) -> Option<f64> {
        let col = self.ells.iter().position(|&l| l == ell)?;
        let row = self.rows.iter().find(|r| r.label == label)?;
        row.cells[col].value.as_ref().ok().copied()
    }

    pub fn failures(&self) -> Vec<String> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.cells.iter().zip(&self.ells).filter_map(move |(c, l)| {
                    c.value
                        .as_ref()
                        .err()
                        .map(|e| format!("{} ℓ={l}: {e}", r.label))
                })
            })
            .collect()
    }

    /// `method,l1,…` header, one row per method, `nan` for failed cells.
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        write!(w, "method")?;
        for l in &self.ells {
            write!(w, ",l{l}")?;
        }
        writeln!(w)?;
        for row in &self.rows {
            write!(w, "{}", row.label)?;
            for c in &row.cells {
                match &c.value {
                    Ok(v) => write!(w, ",{}", fmt_float(*v))?,
                    Err(_) => write!(w, ",nan")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Run metadata, per-cell timings and failures as `key = value` lines.
    pub fn write_metadata(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "report = {}", self.name)?;
        writeln!(w, "metric = {}", self.kind)?;
        for (k, v) in &self.metadata {
            writeln!(w, "{k} = {v}")?;
        }
        for row in &self.rows {
            for (c, l) in row.cells.iter().zip(&self.ells) {
                let key = format!("{}.l{l}", row.label);
                writeln!(w, "{key}.seconds = {:.3}", c.seconds)?;
                if let Some((it, conv)) = c.iterations {
                    writeln!(w, "{key}.iterations = {it}")?;
                    writeln!(w, "{key}.converged = {conv}")?;
                }
                if let Err(e) = &c.value {
                    writeln!(w, "{key}.error = {e}")?;
                }
            }
        }
        Ok(())
    }
}

/// A reduced system together with its solved value function.
pub struct SolvedCell {
    pub rsys: ReducedSystem,
    pub solution: HjbSolution,
}

pub fn solve_cell(
    cfg: &ScenarioConfig,
    sys: &ControlSystem,
    factory: &BasisFactory<'_>,
    method: Method,
    ell: usize,
) -> Result<SolvedCell, ExperimentError> {
    let basis = factory.basis(method, ell)?;
    let rsys = project(sys, &basis, cfg.a)?;
    let solution = value_iteration(
        &rsys,
        &cfg.nodes_for(ell),
        &cfg.control_set(),
        &cfg.hjb_options(),
    )?;
    Ok(SolvedCell { rsys, solution })
}

fn common_metadata(cfg: &ScenarioConfig) -> Vec<(String, String)> {
    let mut meta: Vec<(String, String)> = cfg
        .entries()
        .into_iter()
        .map(|(k, v)| (format!("config.{k}"), v))
        .collect();
    for &l in &cfg.ells {
        let nodes = cfg.nodes_for(l);
        meta.push((format!("grid.l{l}"), format!("{}^{l}", nodes[0])));
    }
    meta
}

fn require(cfg: &ScenarioConfig, benchmark: Benchmark) -> Result<(), ExperimentError> {
    if cfg.benchmark != benchmark {
        return Err(ConfigError::InvalidValue {
            key: "benchmark".into(),
            value: cfg.benchmark.to_string(),
            message: format!("this report needs the {benchmark} benchmark"),
        }
        .into());
    }
    Ok(())
}

/// Test states drawn component-wise uniform on `[-a, a]`.
pub fn sample_states(cfg: &ScenarioConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.samples)
        .map(|_| (0..cfg.n).map(|_| rng.gen_range(-cfg.a..=cfg.a)).collect())
        .collect()
}

/// Mean over samples of `|v̂(x) - xᵀPx| / |xᵀPx|`, skipping `|xᵀPx| < 1e-12`.
pub fn mean_relative_error(
    cell: &SolvedCell,
    lqr: &LqrReference,
    samples: &[Vec<f64>],
) -> Result<f64, String> {
    let errors: Vec<f64> = samples
        .iter()
        .filter_map(|x| {
            let exact = lqr.value(x);
            (exact.abs() >= 1e-12).then(|| {
                (evaluate_value(&cell.solution, &cell.rsys.basis, x) - exact).abs() / exact.abs()
            })
        })
        .collect();
    if errors.is_empty() {
        return Err("every sample has a vanishing exact value".into());
    }
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Value-function accuracy of every (method, ℓ) on the linear benchmark.
pub fn run_table1(cfg: &ScenarioConfig) -> Result<ComparisonReport, ExperimentError> {
    require(cfg, Benchmark::Heat)?;
    let sys = cfg.build_system()?;
    let factory = BasisFactory::new(&sys, cfg.snapshot_settings());
    let lqr = factory.lqr()?.clone();
    let samples = sample_states(cfg);
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        let mut cells = Vec::new();
        for &ell in &cfg.ells {
            let (solved, seconds) = timed(|| solve_cell(cfg, &sys, &factory, method, ell));
            let cell = match solved {
                Ok(solved) => Cell {
                    value: mean_relative_error(&solved, &lqr, &samples),
                    seconds,
                    iterations: Some((solved.solution.iterations, solved.solution.converged)),
                },
                Err(e) => Cell {
                    value: Err(e.to_string()),
                    seconds,
                    iterations: None,
                },
            };
            log_cell(method.as_str(), ell, &cell);
            cells.push(cell);
        }
        rows.push(ReportRow {
            label: method.to_string(),
            cells,
        });
    }
    let mut metadata = common_metadata(cfg);
    metadata.push(("rng".into(), "ChaCha8 seeded from the 64-bit seed".into()));
    metadata.push(("lqr.iterations".into(), lqr.iterations.to_string()));
    Ok(ComparisonReport {
        name: "table1".into(),
        kind: MetricKind::MeanRelativeValueError,
        ells: cfg.ells.clone(),
        rows,
        metadata,
    })
}

fn log_cell(label: &str, ell: usize, cell: &Cell) {
    match &cell.value {
        Ok(v) => info!("{label} ℓ={ell}: {v:.6} ({:.1} s)", cell.seconds),
        Err(e) => warn!("{label} ℓ={ell} failed: {e}"),
    }
}

/// Closed-loop costs of every (method, ℓ) and the linearized LQR feedback on
/// the Burgers benchmark, one report per initial condition.
pub fn run_table2(cfg: &ScenarioConfig) -> Result<Vec<ComparisonReport>, ExperimentError> {
    require(cfg, Benchmark::Burgers)?;
    let sys = cfg.build_system()?;
    let factory = BasisFactory::new(&sys, cfg.snapshot_settings());
    let lqr = factory.lqr()?.clone();
    let ics = &cfg.initial_conditions;
    let states: Vec<Vec<f64>> = ics.iter().map(|ic| ic.state(&sys)).collect();
    let cost = |traj: &crate::models::Trajectory| {
        quadrature_cost(traj, cfg.weight_z, cfg.weight_u, cfg.lambda)
    };

    // rows[ic][method]
    let mut rows: Vec<Vec<ReportRow>> = vec![Vec::new(); ics.len()];
    for &method in &cfg.methods {
        let mut per_ic: Vec<Vec<Cell>> = vec![Vec::new(); ics.len()];
        for &ell in &cfg.ells {
            let (solved, solve_seconds) = timed(|| solve_cell(cfg, &sys, &factory, method, ell));
            for (k, x0) in states.iter().enumerate() {
                let cell = match &solved {
                    Ok(s) => {
                        let (traj, seconds) = timed(|| {
                            closed_loop(&s.solution, &s.rsys, &sys, x0, cfg.dt_sim, cfg.t_quad)
                        });
                        Cell {
                            value: traj.map(|t| cost(&t)).map_err(|e| e.to_string()),
                            seconds: solve_seconds + seconds,
                            iterations: Some((s.solution.iterations, s.solution.converged)),
                        }
                    }
                    Err(e) => Cell {
                        value: Err(e.to_string()),
                        seconds: solve_seconds,
                        iterations: None,
                    },
                };
                log_cell(&format!("{method} {}", ics[k]), ell, &cell);
                per_ic[k].push(cell);
            }
        }
        for (k, cells) in per_ic.into_iter().enumerate() {
            rows[k].push(ReportRow {
                label: method.to_string(),
                cells,
            });
        }
    }

    let mut reports = Vec::new();
    for (k, (ic, x0)) in ics.iter().zip(&states).enumerate() {
        let (lqr_cost, seconds) = timed(|| {
            lqr.closed_loop(&sys, x0, cfg.dt_sim, cfg.t_quad)
                .map(|t| cost(&t))
        });
        let lqr_cell = Cell {
            value: lqr_cost.map_err(|e| e.to_string()),
            seconds,
            iterations: None,
        };
        log_cell(&format!("LQR {ic}"), 0, &lqr_cell);
        let mut table = std::mem::take(&mut rows[k]);
        table.push(ReportRow {
            label: "LQR".into(),
            cells: vec![lqr_cell; cfg.ells.len()],
        });
        let mut metadata = common_metadata(cfg);
        metadata.push(("initial_condition".into(), ic.to_string()));
        let uncontrolled = simulate(
            &sys,
            x0,
            |_| vec![0.0; sys.input_dim()],
            cfg.dt_sim,
            cfg.t_quad,
        )
        .map(|t| fmt_float(cost(&t)))
        .unwrap_or_else(|e| format!("failed: {e}"));
        metadata.push(("uncontrolled_cost".into(), uncontrolled));
        reports.push(ComparisonReport {
            name: table2_name(*ic),
            kind: MetricKind::ClosedLoopCost,
            ells: cfg.ells.clone(),
            rows: table,
            metadata,
        });
    }
    Ok(reports)
}

pub fn table2_name(ic: InitialCondition) -> String {
    format!("table2_{ic}")
}
