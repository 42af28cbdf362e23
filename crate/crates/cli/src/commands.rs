use std::path::Path;

use anyhow::{Context, Result};

use hjb_mor::experiments::{
    emit_basis, emit_control_trace, emit_output_trace, emit_report, emit_state_snapshots,
    emit_value_slice, quadrature_cost, run_table1, run_table2, solve_cell, BasisFactory, Benchmark,
    ComparisonReport, ScenarioConfig,
};
use hjb_mor::hjb::{closed_loop as hjb_closed_loop, evaluate_value, write_value_grid};
use hjb_mor::io::{write_csv_row, write_file};
use hjb_mor::linalg::DenseMatrix;
use hjb_mor::models::simulate;

pub enum Outcome {
    Complete,
    CellFailures(Vec<String>),
}

pub type Command = fn(&ScenarioConfig, &Path) -> Result<Outcome>;

fn save_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    write_file(path, |w| {
        (0..m.rows()).try_for_each(|i| write_csv_row(w, m.row(i).iter().copied()))
    })?;
    Ok(())
}

/// Snapshot times for state plots: the initial state, `t = 0.3` and the horizon.
fn plot_times(horizon: f64) -> Vec<f64> {
    let mut t = vec![0.0, 0.3_f64.min(horizon)];
    if horizon > 0.3 {
        t.push(horizon);
    }
    t
}

pub fn simulate_cmd(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome> {
    let sys = cfg.build_system()?;
    let factory = BasisFactory::new(&sys, cfg.snapshot_settings());
    let lqr = factory.lqr()?;
    for ic in &cfg.initial_conditions {
        let x0 = ic.state(&sys);
        let open = simulate(
            &sys,
            &x0,
            |_| vec![0.0; sys.input_dim()],
            cfg.dt_sim,
            cfg.t_quad,
        )
        .with_context(|| format!("open-loop simulation from {ic}"))?;
        let controlled = lqr
            .closed_loop(&sys, &x0, cfg.dt_sim, cfg.t_quad)
            .with_context(|| format!("LQR simulation from {ic}"))?;
        open.save_csv(&out.join(format!("simulate_{ic}_open.csv")))?;
        controlled.save_csv(&out.join(format!("simulate_{ic}_lqr.csv")))?;
        let times = plot_times(cfg.t_quad);
        emit_state_snapshots(
            &out.join(format!("states_{ic}_open.dat")),
            &sys.grid_points,
            &open,
            &times,
        )?;
        emit_state_snapshots(
            &out.join(format!("states_{ic}_lqr.dat")),
            &sys.grid_points,
            &controlled,
            &times,
        )?;
        let cost = |t: &hjb_mor::models::Trajectory| {
            quadrature_cost(t, cfg.weight_z, cfg.weight_u, cfg.lambda)
        };
        println!(
            "{ic}: open-loop cost {:.6}, LQR cost {:.6}",
            cost(&open),
            cost(&controlled)
        );
    }
    Ok(Outcome::Complete)
}

pub fn lqr(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome> {
    let sys = cfg.build_system()?;
    let factory = BasisFactory::new(&sys, cfg.snapshot_settings());
    let lqr = factory.lqr()?;
    save_matrix(&out.join("lqr_P.csv"), &lqr.p)?;
    save_matrix(&out.join("lqr_gain.csv"), &lqr.gain)?;
    println!(
        "Riccati solution after {} Newton steps, ‖P‖_F = {:.6e}",
        lqr.iterations,
        lqr.p.frobenius_norm()
    );
    Ok(Outcome::Complete)
}

pub fn reduce(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome> {
    let sys = cfg.build_system()?;
    let factory = BasisFactory::new(&sys, cfg.snapshot_settings());
    let ell = cfg.ells.iter().copied().max().unwrap_or(cfg.ell);
    let mut failures = Vec::new();
    for &method in &cfg.methods {
        match factory.basis(method, ell) {
            Ok(basis) => {
                emit_basis(out, &sys.grid_points, &basis)?;
                basis.save_csv(&out.join(format!("basis_{method}_V.csv")))?;
                write_file(&out.join(format!("basis_{method}_W.csv")), |w| {
                    basis.write_test_csv(w)
                })?;
                let sv = &basis.singular_values;
                let idx: Vec<f64> = (1..=sv.len()).map(|k| k as f64).collect();
                hjb_mor::experiments::write_series(
                    &out.join(format!("singular_values_{method}.dat")),
                    &[("k", &idx), ("sigma", sv)],
                )?;
                println!(
                    "{method}: ℓ = {ell}, leading values {:?}",
                    &sv[..ell.min(sv.len())]
                );
            }
            Err(e) => failures.push(format!("{method} ℓ={ell}: {e}")),
        }
    }
    Ok(outcome(failures))
}

fn outcome(failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Outcome::Complete
    } else {
        Outcome::CellFailures(failures)
    }
}

pub fn hjb(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome> {
    let sys = cfg.build_system()?;
    let factory = BasisFactory::new(&sys, cfg.snapshot_settings());
    let (method, ell) = (cfg.method, cfg.ell);
    let cell = solve_cell(cfg, &sys, &factory, method, ell)?;
    let sol = &cell.solution;
    write_file(&out.join(format!("value_{method}_l{ell}.txt")), |w| {
        write_value_grid(&sol.grid, w)
    })?;
    println!(
        "{method} ℓ={ell}: {} sweeps, final increment {:.3e}{}",
        sol.iterations,
        sol.final_increment,
        if sol.converged {
            ""
        } else {
            " (iteration cap reached)"
        }
    );
    if cfg.benchmark == Benchmark::Heat {
        let lqr = factory.lqr()?;
        emit_value_slice(
            &out.join(format!("value_slice_{method}_l{ell}.dat")),
            method.as_str(),
            cfg.a,
            lqr,
            |x| evaluate_value(sol, &cell.rsys.basis, x),
        )?;
    }
    Ok(Outcome::Complete)
}

pub fn closed_loop(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome> {
    let sys = cfg.build_system()?;
    let factory = BasisFactory::new(&sys, cfg.snapshot_settings());
    let (method, ell) = (cfg.method, cfg.ell);
    let cell = solve_cell(cfg, &sys, &factory, method, ell)?;
    let lqr = factory.lqr()?;
    let cost = |t: &hjb_mor::models::Trajectory| {
        quadrature_cost(t, cfg.weight_z, cfg.weight_u, cfg.lambda)
    };
    for ic in &cfg.initial_conditions {
        let x0 = ic.state(&sys);
        let hjb_traj = hjb_closed_loop(
            &cell.solution,
            &cell.rsys,
            &sys,
            &x0,
            cfg.dt_sim,
            cfg.t_quad,
        )
        .with_context(|| format!("{method} closed loop from {ic}"))?;
        let lqr_traj = lqr
            .closed_loop(&sys, &x0, cfg.dt_sim, cfg.t_quad)
            .with_context(|| format!("LQR closed loop from {ic}"))?;
        let stem = format!("{method}_l{ell}_{ic}");
        emit_control_trace(
            &out.join(format!("control_{stem}.dat")),
            method.as_str(),
            &lqr_traj,
            &hjb_traj,
        )?;
        emit_output_trace(
            &out.join(format!("output_{stem}.dat")),
            method.as_str(),
            &lqr_traj,
            &hjb_traj,
        )?;
        emit_state_snapshots(
            &out.join(format!("states_{stem}.dat")),
            &sys.grid_points,
            &hjb_traj,
            &plot_times(cfg.t_quad),
        )?;
        hjb_traj.save_csv(&out.join(format!("closed_loop_{stem}.csv")))?;
        println!(
            "{ic}: {method} ℓ={ell} cost {:.6}, LQR cost {:.6}",
            cost(&hjb_traj),
            cost(&lqr_traj)
        );
    }
    Ok(Outcome::Complete)
}

fn emit_all(reports: &[ComparisonReport], out: &Path) -> Result<Outcome> {
    let mut failures = Vec::new();
    for r in reports {
        let path = emit_report(r, out)?;
        println!("wrote {}", path.display());
        failures.extend(r.failures().into_iter().map(|f| format!("{}: {f}", r.name)));
    }
    Ok(outcome(failures))
}

pub fn table1(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome> {
    emit_all(&[run_table1(cfg)?], out)
}

pub fn table2(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome> {
    emit_all(&run_table2(cfg)?, out)
}
