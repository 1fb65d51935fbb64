//! CSV writers. Every float is written with 17 significant digits so values
//! parse back bit-exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::physics::PrimitiveState;
use crate::solver::{SolutionField, Solver, StepRecord};

use super::{ConvergenceTable, HarnessError, RunReport};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::io(path, e))
}

fn write_rows(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<(), HarnessError> {
    let mut w = create(path)?;
    let io = |e| HarnessError::io(path, e);
    writeln!(w, "{header}").map_err(io)?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(fmt_f64).collect();
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn solution_header(dim: usize) -> &'static str {
    if dim == 1 {
        "x,rho,vx,P"
    } else {
        "x,y,rho,vx,vy,P"
    }
}

fn prim_row(dim: usize, x: [f64; 2], q: &PrimitiveState) -> Vec<f64> {
    if dim == 1 {
        vec![x[0], q.rho, q.vel[0], q.p]
    } else {
        vec![x[0], x[1], q.rho, q.vel[0], q.vel[1], q.p]
    }
}

/// One row per solution point, element-major then node-major.
pub fn write_solution_csv(
    solver: &Solver,
    field: &SolutionField,
    path: &Path,
) -> Result<(), HarnessError> {
    let dim = solver.mesh.dim;
    let gas = *solver.gas();
    let rows = field
        .states
        .iter()
        .zip(solver.node_coords())
        .map(move |(u, &x)| prim_row(dim, x, &gas.cons_to_prim_unchecked(u)));
    write_rows(path, solution_header(dim), rows)
}

/// Reference/exact profile sampled at the given points, same schema as solutions.
pub fn write_profile_csv(
    dim: usize,
    points: &[[f64; 2]],
    sample: impl Fn([f64; 2]) -> PrimitiveState,
    path: &Path,
) -> Result<(), HarnessError> {
    let rows = points.iter().map(|&x| prim_row(dim, x, &sample(x)));
    write_rows(path, solution_header(dim), rows)
}

pub const REPORT_HEADER: &str = "step,time,dt,activation_fraction,max_zeta,activations,evaluations";

pub fn report_row(r: &StepRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.step,
        fmt_f64(r.time),
        fmt_f64(r.dt),
        fmt_f64(r.stats.activation_fraction()),
        fmt_f64(r.stats.max_zeta),
        r.stats.activations,
        r.stats.evaluations
    )
}

/// Per-step diagnostics (`report.csv`) and run summary (`summary.csv`).
/// Wall time is deliberately excluded so reruns compare byte-identical.
pub fn write_report(report: &RunReport, dir: &Path) -> Result<(), HarnessError> {
    let path = dir.join("report.csv");
    let mut w = create(&path)?;
    let io = |e| HarnessError::io(&path, e);
    writeln!(w, "{REPORT_HEADER}").map_err(io)?;
    for r in &report.records {
        writeln!(w, "{}", report_row(r)).map_err(io)?;
    }
    w.flush().map_err(io)?;

    let path = dir.join("summary.csv");
    let mut w = create(&path)?;
    let io = |e| HarnessError::io(&path, e);
    writeln!(w, "key,value").map_err(io)?;
    for (k, v) in report.summary_entries() {
        writeln!(w, "{k},{v}").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub const CONVERGENCE_HEADER: &str = "N,eps_l1,eps_l2,rate_running,eps_l2_root_sum";

pub fn write_convergence_csv(table: &ConvergenceTable, path: &Path) -> Result<(), HarnessError> {
    let mut w = create(path)?;
    let io = |e| HarnessError::io(path, e);
    writeln!(w, "{CONVERGENCE_HEADER}").map_err(io)?;
    for row in &table.rows {
        let rate = row.rate_running.map(fmt_f64).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            row.n,
            fmt_f64(row.eps_l1),
            fmt_f64(row.eps_l2),
            rate,
            fmt_f64(row.eps_l2_root_sum)
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    let summary = path.with_file_name(format!(
        "{}_rates.csv",
        path.file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("convergence")
    ));
    let mut w = create(&summary)?;
    let io = |e| HarnessError::io(&summary, e);
    writeln!(w, "norm,rate").map_err(io)?;
    writeln!(w, "l1,{}", fmt_f64(table.rate_l1)).map_err(io)?;
    writeln!(w, "l2,{}", fmt_f64(table.rate_l2)).map_err(io)?;
    writeln!(w, "l2_root_sum,{}", fmt_f64(table.rate_l2_root_sum)).map_err(io)?;
    w.flush().map_err(io)
}

/// Parses a numeric CSV written by this module into its header and rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), HarnessError> {
    let f = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut lines = BufReader::new(f).lines();
    let header = lines
        .next()
        .ok_or_else(|| HarnessError::Parse(format!("{}: empty file", path.display())))?
        .map_err(|e| HarnessError::io(path, e))?;
    let header: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for line in lines {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        let row = line
            .split(',')
            .map(|s| {
                if s.is_empty() {
                    Ok(f64::NAN)
                } else {
                    s.parse::<f64>()
                        .map_err(|e| HarnessError::Parse(format!("{}: '{s}': {e}", path.display())))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
