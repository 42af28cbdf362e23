//! Plain-text value grids: a header `ℓ lower_1 upper_1 N_1 … lower_ℓ upper_ℓ N_ℓ`,
//! then one node value per line in lexicographic node order.

use std::io::{self, BufRead, Write};

use crate::io::fmt_float;

use super::grid::ValueGrid;
use super::HjbError;

pub fn write_value_grid(grid: &ValueGrid, w: &mut impl Write) -> io::Result<()> {
    write!(w, "{}", grid.dim())?;
    for d in 0..grid.dim() {
        write!(
            w,
            " {} {} {}",
            fmt_float(grid.lower()[d]),
            fmt_float(grid.upper()[d]),
            grid.counts()[d]
        )?;
    }
    writeln!(w)?;
    for v in &grid.values {
        writeln!(w, "{}", fmt_float(*v))?;
    }
    Ok(())
}

pub fn read_value_grid(r: impl BufRead) -> Result<ValueGrid, HjbError> {
    let bad = |msg: String| HjbError::Parse(msg);
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("missing header".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let dim: usize = fields
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad(format!("bad dimension in header {header:?}")))?;
    if fields.len() != 1 + 3 * dim {
        return Err(bad(format!(
            "header has {} fields, expected {}",
            fields.len(),
            1 + 3 * dim
        )));
    }
    let (mut lower, mut upper, mut counts) = (vec![], vec![], vec![]);
    for d in 0..dim {
        let f = &fields[1 + 3 * d..4 + 3 * d];
        let parse = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
        lower.push(parse(f[0])?);
        upper.push(parse(f[1])?);
        counts.push(
            f[2].parse::<usize>()
                .map_err(|e| bad(format!("{:?}: {e}", f[2])))?,
        );
    }
    let mut grid = ValueGrid::new(lower, upper, counts)?;
    let mut k = 0;
    for line in lines {
        let line = line.map_err(|e| bad(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if k >= grid.len() {
            return Err(bad(format!("more than {} values", grid.len())));
        }
        grid.values[k] = line.parse().map_err(|e| bad(format!("{line:?}: {e}")))?;
        k += 1;
    }
    if k != grid.len() {
        return Err(bad(format!("found {k} values, expected {}", grid.len())));
    }
    Ok(grid)
}
