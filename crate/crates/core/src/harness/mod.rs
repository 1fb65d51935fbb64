//! Run configuration, orchestration, error norms, convergence studies and CSV output.

mod norms;
pub mod output;

pub use norms::{
    error_norm_l2_integral, error_norms_pointwise, pointwise_from_errors, PointwiseNorms,
};
pub use output::{
    read_csv, write_convergence_csv, write_profile_csv, write_report, write_solution_csv,
};

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;
use thiserror::Error;

use crate::basis::ReferenceBasis;
use crate::cases::{shu_osher_reference, CaseSpec, OracleKind, ReferenceProfile, CASE_NAMES};
use crate::error::{BasisError, MeshError, PhysicsError, SolverError};
use crate::filter::FilterMode;
use crate::mesh::build_mesh;
use crate::physics::{EntropyFunctional, GasModel, PrimitiveState, RiemannSolver};
use crate::solver::{RunStats, SolutionField, Solver, SolverConfig, StepRecord};

/// Cell count of the Godunov reference used for cases without an exact solution.
pub const REFERENCE_CELLS: usize = 20000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown case '{0}' (expected one of {list})", list = CASE_NAMES.join(", "))]
    UnknownCase(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no reference solution available for this case")]
    NoOracle,
    #[error("run at N = {n} failed: {source}")]
    Study {
        n: usize,
        #[source]
        source: Box<HarnessError>,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// True when the run aborted on a mean or admissibility violation.
    pub fn is_constraint_violation(&self) -> bool {
        match self {
            Self::Solver(e) => e.is_constraint_violation(),
            Self::Study { source, .. } => source.is_constraint_violation(),
            _ => false,
        }
    }
}

/// Everything needed to reproduce a run. Optional fields fall back to the
/// case defaults.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: String,
    pub order: usize,
    #[serde(default)]
    pub mesh: Option<Vec<usize>>,
    #[serde(default)]
    pub cfl: Option<f64>,
    #[serde(default = "default_riemann")]
    pub riemann: RiemannSolver,
    #[serde(default = "default_filter")]
    pub filter: FilterMode,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub rho_min: Option<f64>,
    #[serde(default)]
    pub p_min: Option<f64>,
    #[serde(default)]
    pub eps_sigma: Option<f64>,
    #[serde(default)]
    pub entropy: EntropyFunctional,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Steps between progress/diagnostic flushes.
    #[serde(default = "default_cadence")]
    pub output_every: usize,
}

fn default_riemann() -> RiemannSolver {
    RiemannSolver::Hllc
}

fn default_filter() -> FilterMode {
    FilterMode::Entropy
}

fn default_cadence() -> usize {
    100
}

impl RunConfig {
    pub fn new(case: &str, order: usize) -> Self {
        Self {
            case: case.to_string(),
            order,
            mesh: None,
            cfl: None,
            riemann: default_riemann(),
            filter: default_filter(),
            t_end: None,
            rho_min: None,
            p_min: None,
            eps_sigma: None,
            entropy: EntropyFunctional::default(),
            out: None,
            output_every: default_cadence(),
        }
    }

    pub fn with_mesh(mut self, mesh: &[usize]) -> Self {
        self.mesh = Some(mesh.to_vec());
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn case_spec(&self) -> Result<CaseSpec, HarnessError> {
        CaseSpec::by_name(&self.case).ok_or_else(|| HarnessError::UnknownCase(self.case.clone()))
    }

    /// Resolved element counts, validated against the case dimension.
    pub fn mesh_counts(&self, case: &CaseSpec) -> Result<[usize; 2], HarnessError> {
        match self.mesh.as_deref() {
            None => Ok(case.default_mesh),
            Some([n]) if case.dim == 1 => Ok([*n, 1]),
            Some([n]) => Ok([*n, *n]),
            Some([nx, ny]) if case.dim == 2 => Ok([*nx, *ny]),
            Some(m) => Err(HarnessError::Config(format!(
                "mesh {m:?} does not match the {}D case '{}'",
                case.dim, case.name
            ))),
        }
    }

    pub fn solver_config(&self, case: &CaseSpec) -> Result<SolverConfig, HarnessError> {
        let defaults = GasModel::default();
        let gas = GasModel {
            rho_min: self.rho_min.unwrap_or(defaults.rho_min),
            p_min: self.p_min.unwrap_or(defaults.p_min),
            eps_sigma: self.eps_sigma.unwrap_or(defaults.eps_sigma),
            entropy: self.entropy,
            ..defaults
        };
        let cfl = self.cfl.unwrap_or(case.cfl);
        if !(cfl > 0.0) {
            return Err(HarnessError::Config(format!(
                "cfl must be positive, got {cfl}"
            )));
        }
        if !(gas.rho_min > 0.0 && gas.p_min > 0.0 && gas.eps_sigma >= 0.0) {
            return Err(HarnessError::Config(
                "floors must be positive and eps_sigma non-negative".into(),
            ));
        }
        Ok(SolverConfig {
            cfl,
            riemann: self.riemann,
            filter: self.filter,
            gas,
        })
    }

    /// Warning text when the filter is disabled on a case with discontinuities.
    pub fn filter_warning(&self, case: &CaseSpec) -> Option<String> {
        (self.filter == FilterMode::Off && case.is_discontinuous()).then(|| {
            format!(
                "WARNING: filter disabled on discontinuous case '{}'; expect oscillations or a positivity failure",
                case.name
            )
        })
    }
}

/// Builds the solver for a configuration without running it.
pub fn build_solver(config: &RunConfig) -> Result<(CaseSpec, Solver), HarnessError> {
    let case = config.case_spec()?;
    let counts = config.mesh_counts(&case)?;
    let mesh = build_mesh(&case.mesh_spec(counts))?;
    let basis = ReferenceBasis::new(config.order, case.dim)?;
    let solver = Solver::new(basis, mesh, &case.boundaries, config.solver_config(&case)?)?;
    Ok((case, solver))
}

/// Diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub case: String,
    pub order: usize,
    pub mesh: [usize; 2],
    pub t_end: f64,
    pub records: Vec<StepRecord>,
    pub steps: usize,
    pub activation_fraction: f64,
    pub max_zeta: f64,
    /// Point-mean density errors where a reference exists.
    pub error_pointwise: Option<PointwiseNorms>,
    /// Quadrature L2 density error for 2D analytic references.
    pub error_l2_integral: Option<f64>,
    /// Relative change `|I(t) - I(0)| / max(|I(0)|, 1)` of the conserved
    /// totals. On non-periodic domains it includes the boundary fluxes.
    pub conservation_drift: [f64; 4],
    pub min_density: f64,
    pub min_pressure: f64,
    pub max_density: f64,
    /// Excluded from written files so reruns compare byte-identical.
    pub wall_time: f64,
}

impl RunReport {
    /// Fixed-order key/value pairs for `summary.csv`.
    pub fn summary_entries(&self) -> Vec<(&'static str, String)> {
        use output::fmt_f64;
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        vec![
            ("case", self.case.clone()),
            ("order", self.order.to_string()),
            ("nx", self.mesh[0].to_string()),
            ("ny", self.mesh[1].to_string()),
            ("t_end", fmt_f64(self.t_end)),
            ("steps", self.steps.to_string()),
            ("activation_fraction", fmt_f64(self.activation_fraction)),
            ("max_zeta", fmt_f64(self.max_zeta)),
            ("eps_l1", opt(self.error_pointwise.map(|e| e.l1))),
            ("eps_l2", opt(self.error_pointwise.map(|e| e.l2))),
            (
                "eps_l2_root_sum",
                opt(self.error_pointwise.map(|e| e.l2_root_sum)),
            ),
            ("eps_l2_integral", opt(self.error_l2_integral)),
            ("drift_mass", fmt_f64(self.conservation_drift[0])),
            ("drift_momentum_x", fmt_f64(self.conservation_drift[1])),
            ("drift_momentum_y", fmt_f64(self.conservation_drift[2])),
            ("drift_energy", fmt_f64(self.conservation_drift[3])),
            ("min_density", fmt_f64(self.min_density)),
            ("min_pressure", fmt_f64(self.min_pressure)),
            ("max_density", fmt_f64(self.max_density)),
        ]
    }
}

pub struct RunOutcome {
    pub case: CaseSpec,
    pub solver: Solver,
    pub field: SolutionField,
    pub stats: RunStats,
    pub report: RunReport,
    /// Reference profile used for the error norms, when one was built.
    pub reference: Option<ReferenceProfile>,
}

/// Reference solution at time `t`, if the case has one that is cheap to sample.
pub fn exact_oracle(
    case: &CaseSpec,
    t: f64,
) -> Option<impl Fn([f64; 2]) -> Option<PrimitiveState> + '_> {
    matches!(case.oracle, OracleKind::ExactRiemann | OracleKind::Analytic)
        .then(move || move |x| case.exact(x, t))
}

fn relative_drift(initial: [f64; 4], last: [f64; 4]) -> [f64; 4] {
    let mut d = [0.0; 4];
    for v in 0..4 {
        let scale = initial[v].abs().max(1.0);
        d[v] = (last[v] - initial[v]).abs() / scale;
    }
    d
}

/// Runs a configured case to its end time, writing progress lines to
/// `progress` every `output_every` steps and output files when `config.out`
/// is set.
pub fn run_case(
    config: &RunConfig,
    mut progress: Option<&mut dyn Write>,
) -> Result<RunOutcome, HarnessError> {
    let start = Instant::now();
    let (case, solver) = build_solver(config)?;
    let t_end = config.t_end.unwrap_or(case.t_end);
    let mut field = solver.initialize(|x| case.initial(x));
    let initial_totals = solver.totals(&field.states);
    let gas = *solver.gas();
    let mut min_density = f64::INFINITY;
    let mut min_pressure = f64::INFINITY;
    let mut max_density = f64::NEG_INFINITY;
    let cadence = config.output_every.max(1);
    let stats = solver.advance_to_time(&mut field, t_end, |rec, f| {
        for u in &f.states {
            min_density = min_density.min(u.rho);
            max_density = max_density.max(u.rho);
            min_pressure = min_pressure.min(u.pressure(gas.gamma));
        }
        if rec.step % cadence == 0 {
            if let Some(w) = progress.as_mut() {
                let _ = writeln!(
                    w,
                    "step {:>7}  t = {:.6e}  dt = {:.3e}  active = {:.4}  max zeta = {:.3}",
                    rec.step,
                    rec.time,
                    rec.dt,
                    rec.stats.activation_fraction(),
                    rec.stats.max_zeta
                );
                let _ = w.flush();
            }
        }
    })?;

    let mut reference = None;
    let (error_pointwise, error_l2_integral) = match case.oracle {
        OracleKind::ExactRiemann | OracleKind::Analytic => {
            let oracle = |x| case.exact(x, t_end);
            let pw = error_norms_pointwise(&solver, &field, oracle)?;
            let l2i = if case.dim == 2 {
                Some(error_norm_l2_integral(&solver, &field, oracle)?)
            } else {
                None
            };
            (Some(pw), l2i)
        }
        OracleKind::ReferenceRun if t_end == case.t_end => {
            let prof = shu_osher_reference(REFERENCE_CELLS)?;
            let pw = error_norms_pointwise(&solver, &field, |x| Some(prof.sample(x[0])))?;
            reference = Some(prof);
            (Some(pw), None)
        }
        _ => (None, None),
    };

    let report = RunReport {
        case: case.name.to_string(),
        order: config.order,
        mesh: solver.mesh.counts,
        t_end,
        steps: stats.steps,
        activation_fraction: stats.activation_fraction(),
        max_zeta: stats.max_zeta,
        records: stats.records.clone(),
        error_pointwise,
        error_l2_integral,
        conservation_drift: relative_drift(initial_totals, solver.totals(&field.states)),
        min_density,
        min_pressure,
        max_density,
        wall_time: start.elapsed().as_secs_f64(),
    };

    let outcome = RunOutcome {
        case,
        solver,
        field,
        stats,
        report,
        reference,
    };
    if let Some(dir) = &config.out {
        write_outputs(&outcome, dir)?;
    }
    Ok(outcome)
}

/// Writes `solution.csv`, `report.csv`, `summary.csv` and, where a reference
/// exists, `reference.csv` into `dir`.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<(), HarnessError> {
    write_solution_csv(&outcome.solver, &outcome.field, &dir.join("solution.csv"))?;
    write_report(&outcome.report, dir)?;
    let case = &outcome.case;
    if case.dim == 1 {
        let (lo, hi) = (case.lower[0], case.upper[0]);
        let n = 2000;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|i| [lo + (hi - lo) * (i as f64 + 0.5) / n as f64, 0.0])
            .collect();
        let t = outcome.report.t_end;
        if let Some(oracle) = exact_oracle(case, t) {
            write_profile_csv(
                1,
                &pts,
                |x| oracle(x).expect("1D exact solution"),
                &dir.join("reference.csv"),
            )?;
        } else if let Some(prof) = &outcome.reference {
            let pts: Vec<[f64; 2]> = prof.x.iter().map(|&x| [x, 0.0]).collect();
            write_profile_csv(1, &pts, |x| prof.sample(x[0]), &dir.join("reference.csv"))?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub eps_l1: f64,
    pub eps_l2: f64,
    /// Rate of the L2 error between this row and the previous one.
    pub rate_running: Option<f64>,
    /// `sqrt(sum e^2) / M` over the solution points.
    pub eps_l2_root_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares rates fitted over all rows.
    pub rate_l1: f64,
    pub rate_l2: f64,
    pub rate_l2_root_sum: f64,
}

/// Negated least-squares slope of `log(err)` against `log(n)`.
pub fn fit_rate(ns: &[f64], errs: &[f64]) -> f64 {
    let x: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let m = x.len() as f64;
    let xm = x.iter().sum::<f64>() / m;
    let ym = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let sxx: f64 = x.iter().map(|a| (a - xm) * (a - xm)).sum();
    -sxy / sxx
}

impl ConvergenceTable {
    pub fn from_errors(ns: &[usize], l1: &[f64], l2: &[f64], l2_root_sum: &[f64]) -> Self {
        let rows = (0..ns.len())
            .map(|i| ConvergenceRow {
                n: ns[i],
                eps_l1: l1[i],
                eps_l2: l2[i],
                rate_running: (i > 0)
                    .then(|| fit_rate(&[ns[i - 1] as f64, ns[i] as f64], &[l2[i - 1], l2[i]])),
                eps_l2_root_sum: l2_root_sum[i],
            })
            .collect();
        let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        Self {
            rows,
            rate_l1: fit_rate(&nf, l1),
            rate_l2: fit_rate(&nf, l2),
            rate_l2_root_sum: fit_rate(&nf, l2_root_sum),
        }
    }
}

/// Runs `base` at every mesh size `N` (N elements per direction) and fits
/// convergence rates. The L2 column is the quadrature norm for 2D analytic
/// references and the point-mean norm otherwise.
pub fn convergence_study(
    base: &RunConfig,
    meshes: &[usize],
    mut progress: Option<&mut dyn Write>,
) -> Result<ConvergenceTable, HarnessError> {
    if meshes.len() < 2 {
        return Err(HarnessError::Config(
            "a convergence study needs at least two mesh sizes".into(),
        ));
    }
    let case = base.case_spec()?;
    if case.oracle == OracleKind::None {
        return Err(HarnessError::NoOracle);
    }
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    let mut l2_root_sum = Vec::new();
    for &n in meshes {
        let mut cfg = base.clone().with_mesh(&[n]);
        cfg.out = base.out.as_ref().map(|d| d.join(format!("N{n}")));
        let outcome = run_case(&cfg, None).map_err(|e| HarnessError::Study {
            n,
            source: Box::new(e),
        })?;
        let pw = outcome
            .report
            .error_pointwise
            .ok_or(HarnessError::NoOracle)?;
        let (e1, e2) = (pw.l1, outcome.report.error_l2_integral.unwrap_or(pw.l2));
        if let Some(w) = progress.as_mut() {
            let _ = writeln!(
                w,
                "N = {n:>5}  eps_l1 = {e1:.6e}  eps_l2 = {e2:.6e}  eps_l2_root_sum = {:.6e}  steps = {}",
                pw.l2_root_sum, outcome.report.steps
            );
            let _ = w.flush();
        }
        l1.push(e1);
        l2.push(e2);
        l2_root_sum.push(pw.l2_root_sum);
    }
    let table = ConvergenceTable::from_errors(meshes, &l1, &l2, &l2_root_sum);
    if let Some(dir) = &base.out {
        write_convergence_csv(&table, &dir.join("convergence.csv"))?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_fit_recovers_power_law() {
        let ns = [10.0, 20.0, 40.0, 80.0];
        let errs: Vec<f64> = ns.iter().map(|n: &f64| 3.0 * n.powf(-2.7)).collect();
        assert!((fit_rate(&ns, &errs) - 2.7).abs() < 1e-12);
        let halving = [1.0, 0.5, 0.25];
        assert!((fit_rate(&[1.0, 2.0, 4.0], &halving) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_from_toml_and_defaults() {
        let cfg = RunConfig::from_toml_str(
            "case = \"sod\"\norder = 3\nmesh = [80]\nfilter = \"linear\"\nriemann = \"rusanov\"\n",
        )
        .unwrap();
        assert_eq!(cfg.mesh, Some(vec![80]));
        assert_eq!(cfg.filter, FilterMode::Linear);
        assert_eq!(cfg.riemann, RiemannSolver::Rusanov);
        assert_eq!(cfg.output_every, 100);
        assert!(RunConfig::from_toml_str("case = \"sod\"\norder = 3\nbogus = 1\n").is_err());
    }

    #[test]
    fn mesh_validation() {
        let sod = CaseSpec::by_name("sod").unwrap();
        let vortex = CaseSpec::by_name("vortex").unwrap();
        let cfg = RunConfig::new("sod", 3).with_mesh(&[40, 40]);
        assert!(cfg.mesh_counts(&sod).is_err());
        assert_eq!(cfg.mesh_counts(&vortex).unwrap(), [40, 40]);
        assert_eq!(
            RunConfig::new("vortex", 3)
                .with_mesh(&[33])
                .mesh_counts(&vortex)
                .unwrap(),
            [33, 33]
        );
        assert!(RunConfig::new("nope", 3).case_spec().is_err());
    }

    #[test]
    fn filter_off_warning() {
        let mut cfg = RunConfig::new("sod", 3);
        assert!(cfg.filter_warning(&cfg.case_spec().unwrap()).is_none());
        cfg.filter = FilterMode::Off;
        assert!(cfg.filter_warning(&cfg.case_spec().unwrap()).is_some());
        let mut v = RunConfig::new("vortex", 3);
        v.filter = FilterMode::Off;
        assert!(v.filter_warning(&v.case_spec().unwrap()).is_none());
    }

    #[test]
    fn norm_examples() {
        let zero = pointwise_from_errors(&[0.0, 0.0]);
        assert_eq!((zero.l1, zero.l2, zero.l2_root_sum), (0.0, 0.0, 0.0));
        let n = pointwise_from_errors(&[0.0, 0.2]);
        assert!((n.l1 - 0.1).abs() < 1e-16);
        assert!((n.l2 - 0.2 / 2f64.sqrt()).abs() < 1e-16);
        assert!((n.l2_root_sum - 0.1).abs() < 1e-16);
        let n = pointwise_from_errors(&[-0.3; 7]);
        assert!((n.l1 - 0.3).abs() < 1e-15 && (n.l2 - 0.3).abs() < 1e-15);
    }
}
