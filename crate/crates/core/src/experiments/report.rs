//! CSV tables and whitespace-separated plot series.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::io::{fmt_float, write_file, IoError};
use crate::models::Trajectory;
use crate::reduction::ReducedBasis;

use super::lqr::LqrReference;
use super::tables::ComparisonReport;

/// Writes `<name>.csv` and `<name>_meta.txt` into `dir`; returns the CSV path.
pub fn emit_report(report: &ComparisonReport, dir: &Path) -> Result<PathBuf, IoError> {
    let csv = dir.join(format!("{}.csv", report.name));
    write_file(&csv, |w| report.write_csv(w))?;
    write_file(&dir.join(format!("{}_meta.txt", report.name)), |w| {
        report.write_metadata(w)
    })?;
    Ok(csv)
}

/// Columns of equal length as `# name …` followed by one whitespace-separated row per sample.
pub fn write_series(path: &Path, columns: &[(&str, &[f64])]) -> Result<(), IoError> {
    let rows = columns.first().map_or(0, |c| c.1.len());
    assert!(
        columns.iter().all(|c| c.1.len() == rows),
        "ragged plot columns"
    );
    write_file(path, |w| {
        let names: Vec<&str> = columns.iter().map(|c| c.0).collect();
        writeln!(w, "# {}", names.join(" "))?;
        for k in 0..rows {
            let line: Vec<String> = columns.iter().map(|c| fmt_float(c.1[k])).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    })
}

/// `basis_<method>.dat`: grid coordinate and every column of `V`.
pub fn emit_basis(
    dir: &Path,
    grid_points: &[f64],
    basis: &ReducedBasis,
) -> Result<PathBuf, IoError> {
    let path = dir.join(format!("basis_{}.dat", basis.method));
    let cols: Vec<Vec<f64>> = (0..basis.dim()).map(|j| basis.v.column(j)).collect();
    let names: Vec<String> = (1..=basis.dim()).map(|j| format!("v_{j}")).collect();
    let mut series: Vec<(&str, &[f64])> = vec![("xi", grid_points)];
    series.extend(
        names
            .iter()
            .map(String::as_str)
            .zip(cols.iter().map(Vec::as_slice)),
    );
    write_series(&path, &series)?;
    Ok(path)
}

/// Control trace with columns `t`, `u_LQR`, `u_<label>` (first input only).
pub fn emit_control_trace(
    path: &Path,
    label: &str,
    lqr: &Trajectory,
    hjb: &Trajectory,
) -> Result<(), IoError> {
    let len = lqr.len().min(hjb.len());
    let t = &lqr.times[..len];
    let u_lqr: Vec<f64> = lqr.controls[..len].iter().map(|u| u[0]).collect();
    let u_hjb: Vec<f64> = hjb.controls[..len].iter().map(|u| u[0]).collect();
    let name = format!("u_{label}");
    write_series(path, &[("t", t), ("u_LQR", &u_lqr), (&name, &u_hjb)])
}

/// Output trace with columns `t`, `z_LQR`, `z_<label>`.
pub fn emit_output_trace(
    path: &Path,
    label: &str,
    lqr: &Trajectory,
    hjb: &Trajectory,
) -> Result<(), IoError> {
    let len = lqr.len().min(hjb.len());
    let z_lqr: Vec<f64> = lqr.outputs[..len].iter().map(|z| z[0]).collect();
    let z_hjb: Vec<f64> = hjb.outputs[..len].iter().map(|z| z[0]).collect();
    let name = format!("z_{label}");
    write_series(
        path,
        &[("t", &lqr.times[..len]), ("z_LQR", &z_lqr), (&name, &z_hjb)],
    )
}

/// Value function at `x_i = scale·e_i` for every unit vector: columns `i`, `v_LQR`, `v_<label>`.
pub fn emit_value_slice(
    path: &Path,
    label: &str,
    scale: f64,
    lqr: &LqrReference,
    approx: impl Fn(&[f64]) -> f64,
) -> Result<(), IoError> {
    let n = lqr.p.rows();
    let (mut idx, mut exact, mut approx_v) = (vec![], vec![], vec![]);
    for i in 0..n {
        let mut x = vec![0.0; n];
        x[i] = scale;
        idx.push((i + 1) as f64);
        exact.push(lqr.value(&x));
        approx_v.push(approx(&x));
    }
    let name = format!("v_{label}");
    write_series(path, &[("i", &idx), ("v_LQR", &exact), (&name, &approx_v)])
}

/// States at the requested times: columns `xi`, `y(t_1)`, ….
pub fn emit_state_snapshots(
    path: &Path,
    grid_points: &[f64],
    traj: &Trajectory,
    times: &[f64],
) -> Result<(), IoError> {
    let names: Vec<String> = times.iter().map(|t| format!("t={t}")).collect();
    let states: Vec<&[f64]> = times.iter().map(|&t| traj.state_at(t)).collect();
    let mut series: Vec<(&str, &[f64])> = vec![("xi", grid_points)];
    series.extend(names.iter().map(String::as_str).zip(states));
    write_series(path, &series)
}
