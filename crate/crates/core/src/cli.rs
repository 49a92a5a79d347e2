//! Command-line front end: `bessel`, `kernel`, `solve-linear`,
//! `solve-nonlinear`, `verify` and `regress`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 no convergence, 4 numerical
//! failure (including failed checks). Diagnostics go to standard error.

use crate::config::{load_config, RunConfig};
use crate::error::{Error, Result};
use crate::function_spaces::io::fmt_num;
use crate::function_spaces::{AxiVectorField, ModeKey, RadialProfile};
use crate::greens::{capital_f, sigma, KernelParams, ModeKind};
use crate::solver::{
    nonlinear_force_with, picard_solve_with, solve_stream_mode, solve_swirl_mode, solve_vorticity_mode, LinearSolution,
    LinearSolver, PicardSummary,
};
use crate::specfun::{bessel_derivatives, bessel_eval, scaled_ik, wronskian_defect};
use crate::verify::{
    fd_noslip_vorticity, fd_oracle_mode, residual_report, DiagnosticsReport, OracleProblem, ProbeGrid,
};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "AXISYM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "axisym-suction", version, about = "Axisymmetric flow past a cylinder with radial suction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Modified Bessel functions I, K, their derivatives and the Wronskian defect.
    Bessel {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        x: f64,
        /// Print e^{-x} I and e^{x} K instead.
        #[arg(long)]
        scaled: bool,
    },
    /// One Green's-kernel entry sigma_index(r, s).
    Kernel {
        #[arg(long)]
        index: u8,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: f64,
        #[arg(long, allow_hyphen_values = true)]
        zeta: f64,
        #[arg(long)]
        gamma: f64,
    },
    /// Linearized problem.
    SolveLinear(RunArgs),
    /// Full problem by Picard iteration.
    SolveNonlinear(RunArgs),
    /// Linear solve checked against the finite-difference oracle and residuals.
    Verify(RunArgs),
    /// Closed-form golden values.
    Regress {
        /// Also write `goldens.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::NonConvergence { history, .. } = &e {
                eprintln!("delta history: {history:?}");
            }
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, in which case it stays as is.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Bessel { nu, x, scaled } => {
            let b = bessel_eval(nu, x, scaled)?;
            let (di, dk) = if scaled {
                let v = scaled_ik(nu, x)?;
                (v.di, v.dk)
            } else {
                bessel_derivatives(nu, x)?
            };
            let w = wronskian_defect(nu, x)?;
            println!("nu = {}", fmt_num(nu));
            println!("x = {}", fmt_num(x));
            println!("scaled = {scaled}");
            println!("I = {}", fmt_num(b.value_i));
            println!("K = {}", fmt_num(b.value_k));
            println!("dI = {}", fmt_num(di));
            println!("dK = {}", fmt_num(dk));
            println!("wronskian_defect = {}", fmt_num(w));
            if b.underflow {
                eprintln!("warning: unscaled values left the floating-point range; use --scaled");
            }
            Ok(0)
        }
        Command::Kernel { index, r, s, zeta, gamma } => {
            let params = KernelParams::new(gamma, zeta)?;
            println!("{}", fmt_num(sigma(index, r, s, &params)?));
            Ok(0)
        }
        Command::SolveLinear(a) => solve_linear_cmd(&a),
        Command::SolveNonlinear(a) => solve_nonlinear_cmd(&a),
        Command::Verify(a) => verify_cmd(&a),
        Command::Regress { out } => regress_cmd(out.as_deref()),
    }
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    config_path: String,
    config: &'a RunConfig,
    outputs: Vec<String>,
    versions: BTreeMap<&'static str, &'static str>,
    timings_s: BTreeMap<String, f64>,
    warnings: Vec<String>,
}

struct Session {
    cfg: RunConfig,
    config_path: PathBuf,
    out_dir: PathBuf,
    timings: BTreeMap<String, f64>,
    outputs: Vec<String>,
    warnings: Vec<String>,
}

impl Session {
    fn open(a: &RunArgs) -> Result<Self> {
        let cfg = load_config(&a.config)?;
        let out_dir = a.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
        let r_max = cfg.flow.grid.r_max;
        if let Some(r) = cfg.output.r_values.iter().find(|r| !(**r >= 1.0 && **r <= r_max)) {
            return Err(Error::Validation(format!("output.r_values entry {r} outside [1, {r_max}]")));
        }
        std::fs::create_dir_all(&out_dir)?;
        Ok(Self {
            cfg,
            config_path: a.config.clone(),
            out_dir,
            timings: BTreeMap::new(),
            outputs: Vec::new(),
            warnings: Vec::new(),
        })
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f();
        self.timings.insert(phase.to_string(), t.elapsed().as_secs_f64());
        out
    }

    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, text)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn force(&mut self) -> Result<(LinearSolver, AxiVectorField)> {
        let flow = self.cfg.flow.clone();
        let spec = self.cfg.force_spec();
        self.time("setup", || {
            let grid = flow.radial_grid()?;
            let zeta = if spec.has_density() { Some(flow.zeta_grid()?) } else { None };
            let f = spec.build(&grid, zeta.as_ref())?;
            Ok((LinearSolver::new(flow.gamma, flow.alpha, grid)?, f))
        })
    }

    fn finish(mut self, subcommand: &str) -> Result<()> {
        let manifest_path = self.out_dir.join("manifest.json");
        self.outputs.push(manifest_path.display().to_string());
        let manifest = RunManifest {
            subcommand,
            config_path: self.config_path.display().to_string(),
            config: &self.cfg,
            outputs: self.outputs.clone(),
            versions: BTreeMap::from([
                ("axisym-suction", env!("CARGO_PKG_VERSION")),
                ("manifest", "1"),
            ]),
            timings_s: self.timings.clone(),
            warnings: self.warnings.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Numerical(e.to_string()))?;
        std::fs::write(&manifest_path, text)?;
        Ok(())
    }
}

/// `r,z,v_r,v_theta,v_z` rows of the reconstructed real field.
pub fn fields_csv(v: &AxiVectorField, r_values: &[f64], z_count: usize) -> Result<String> {
    let mut out = String::from("r,z,v_r,v_theta,v_z\n");
    for &r in r_values {
        for j in 0..z_count {
            let z = std::f64::consts::TAU * j as f64 / z_count as f64;
            let [a, b, c] = v.reconstruct(r, z)?;
            let _ = writeln!(out, "{},{},{},{},{}", fmt_num(r), fmt_num(z), fmt_num(a.re), fmt_num(b.re), fmt_num(c.re));
        }
    }
    Ok(out)
}

fn mode_id(key: ModeKey, kind: ModeKind) -> String {
    match key {
        ModeKey::Atom(m) => format!("atom:{m}"),
        ModeKey::Density(j) => format!("density:{j}:{}", fmt_num(kind.zeta())),
    }
}

/// One row per solved mode: boundary defects, the vorticity constant and
/// weighted norms of the velocity.
pub fn modes_csv(sol: &LinearSolution, rho: f64) -> String {
    let mut out = String::from("mode,zeta,psi_1,v_r_1,v_theta_1,v_z_1,d_omega,c_re,c_im,norm_v_r,norm_v_theta,norm_v_z\n");
    for (key, m) in &sol.modes {
        let d = &m.defects;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            mode_id(*key, m.mode),
            fmt_num(m.mode.zeta()),
            fmt_num(d.psi),
            fmt_num(d.v_r),
            fmt_num(d.v_theta),
            fmt_num(d.v_z),
            fmt_num(d.d_omega),
            fmt_num(m.c.re),
            fmt_num(m.c.im),
            fmt_num(m.v_r.weighted_sup_norm(rho - 1.0)),
            fmt_num(m.v_theta.weighted_sup_norm(rho - 1.0)),
            fmt_num(m.v_z.weighted_sup_norm(rho - 1.0)),
        );
    }
    out
}

fn write_solution(s: &mut Session, v: &AxiVectorField, sol: &LinearSolution, report: &DiagnosticsReport) -> Result<()> {
    let out = s.cfg.output.clone();
    let fields = s.time("output", || fields_csv(v, &out.r_values, out.z_count))?;
    s.write("fields.csv", &fields)?;
    s.write("modes.csv", &modes_csv(sol, s.cfg.flow.rho))?;
    s.write("report.json", &report.to_json())?;
    Ok(())
}

fn solve_linear_cmd(a: &RunArgs) -> Result<i32> {
    let mut s = Session::open(a)?;
    let (solver, f) = s.force()?;
    let sol = s.time("solve", || solver.solve(&f))?;
    let flow = s.cfg.flow.clone();
    let report = s.time("verify", || residual_report(&sol.v, &f, &flow, &ProbeGrid::default(), None))?;
    write_solution(&mut s, &sol.v.clone(), &sol, &report)?;
    s.finish("solve-linear")?;
    eprintln!("solve-linear: {} modes, max boundary defect {:e}", sol.modes.len(), sol.max_defect());
    Ok(0)
}

fn solve_nonlinear_cmd(a: &RunArgs) -> Result<i32> {
    let mut s = Session::open(a)?;
    let (solver, f) = s.force()?;
    let flow = s.cfg.flow.clone();
    let nl = s.time("picard", || picard_solve_with(&solver, &f, &flow))?;
    for w in &nl.warnings {
        eprintln!("warning: {w}");
    }
    s.warnings.extend(nl.warnings.iter().cloned());
    // One more linear solve with the converged convective term gives the
    // per-mode details and the total force for the residuals.
    let total = f.add(&nonlinear_force_with(&nl.v, &nl.dv)?)?;
    let sol = s.time("final-solve", || solver.solve(&total))?;
    let summary = PicardSummary::from(&nl);
    let report = s.time("verify", || residual_report(&nl.v, &total, &flow, &ProbeGrid::default(), Some(summary)))?;
    write_solution(&mut s, &nl.v, &sol, &report)?;
    s.finish("solve-nonlinear")?;
    eprintln!("solve-nonlinear: converged in {} iterations, history {:?}", nl.iterations(), nl.history);
    Ok(0)
}

/// Oracle comparison of one mode.
#[derive(Debug, Clone, Serialize)]
pub struct ModeCheck {
    pub mode: String,
    pub zeta: f64,
    pub swirl: f64,
    pub omega: f64,
    pub psi: f64,
    pub boundary: f64,
}

#[derive(Debug, Serialize)]
struct VerifyReport<'a> {
    diagnostics: &'a DiagnosticsReport,
    oracle_tolerance: f64,
    oracle: Vec<ModeCheck>,
    skipped_density_modes: usize,
    passed: bool,
}

fn rel_error(a: &RadialProfile, b: impl Fn(f64) -> Result<Complex64>, r_hi: f64) -> Result<f64> {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (&r, v) in a.grid().nodes().iter().zip(a.values()) {
        if r > r_hi {
            break;
        }
        let w = b(r)?;
        num = num.max((v - w).norm());
        den = den.max(w.norm());
    }
    Ok(if den == 0.0 { num } else { num / den })
}

/// Outer radius and intervals for the oracle at `|ζ|`.
pub fn oracle_resolution(zeta: f64) -> (f64, usize) {
    if zeta.abs() < crate::greens::ZETA_SWITCH {
        (1e6, 32768)
    } else {
        (1.0 + 60.0 / zeta.abs(), 8192)
    }
}

/// Compare every atom of a linear solution with the finite-difference oracle.
pub fn oracle_checks(sol: &LinearSolution, f: &AxiVectorField, gamma: f64, alpha: f64) -> Result<Vec<ModeCheck>> {
    use crate::greens::Family;
    let [fr, ft, fz] = f.components();
    let zero = RadialProfile::zeros(f.grid().clone());
    let pick = |mu: &crate::function_spaces::SpectralMeasure, key| mu.profile(key).cloned().unwrap_or_else(|| zero.clone());
    let mut out = Vec::new();
    for (key, m) in &sol.modes {
        let ModeKey::Atom(_) = key else { continue };
        let (g_r, g_t, g_z) = (pick(fr, *key), pick(ft, *key), pick(fz, *key));
        let zeta = m.mode.zeta();
        let (r_out, n) = oracle_resolution(zeta);
        let r_hi = r_out.min(f.grid().r_max()).min(50.0);
        let swirl = fd_oracle_mode(
            &OracleProblem::from_profile(Family::Swirl, zeta, gamma, &g_t).with_outer(r_out).with_intervals(n),
        )?;
        let dg_z = g_z.d_dr();
        let iz = Complex64::new(0.0, zeta);
        let source = |r: f64| -> Complex64 {
            let base = g_r.eval_extended(r).unwrap_or_default() * iz - dg_z.eval_extended(r).unwrap_or_default();
            if alpha != 0.0 {
                base + swirl.eval(r).unwrap_or_default() * iz * (2.0 * alpha / (r * r))
            } else {
                base
            }
        };
        let ns = fd_noslip_vorticity(zeta, gamma, source, r_out, n)?;
        out.push(ModeCheck {
            mode: mode_id(*key, m.mode),
            zeta,
            swirl: rel_error(&m.v_theta, |r| swirl.eval(r), r_hi)?,
            omega: rel_error(&m.omega, |r| ns.omega.eval(r), r_hi)?,
            psi: rel_error(&m.psi, |r| ns.psi.eval(r), r_hi)?,
            boundary: m.defects.max(),
        });
    }
    Ok(out)
}

fn verify_cmd(a: &RunArgs) -> Result<i32> {
    let mut s = Session::open(a)?;
    let (solver, f) = s.force()?;
    let flow = s.cfg.flow.clone();
    let sol = s.time("solve", || solver.solve(&f))?;
    let diagnostics = s.time("residuals", || residual_report(&sol.v, &f, &flow, &ProbeGrid::default(), None))?;
    let oracle = s.time("oracle", || oracle_checks(&sol, &f, flow.gamma, flow.alpha))?;
    let tol = flow.tolerances.oracle;
    let oracle_pass = oracle.iter().all(|c| c.swirl <= tol && c.omega <= tol && c.psi <= tol);
    let passed = oracle_pass && diagnostics.passed();
    let skipped = sol.modes.iter().filter(|(k, _)| matches!(k, ModeKey::Density(_))).count();
    for c in &oracle {
        eprintln!(
            "{}: swirl {:.2e} omega {:.2e} psi {:.2e} boundary {:.2e}",
            c.mode, c.swirl, c.omega, c.psi, c.boundary
        );
    }
    let r = &diagnostics.residuals;
    eprintln!(
        "residuals: theta {:.2e} divergence {:.2e} rot {:.2e} boundary {:.2e}",
        r.momentum_theta, r.divergence, r.rot, r.boundary
    );
    let report = VerifyReport { diagnostics: &diagnostics, oracle_tolerance: tol, oracle, skipped_density_modes: skipped, passed };
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(e.to_string()))?;
    let out = s.cfg.output.clone();
    let fields = fields_csv(&sol.v, &out.r_values, out.z_count)?;
    s.write("fields.csv", &fields)?;
    s.write("modes.csv", &modes_csv(&sol, flow.rho))?;
    s.write("report.json", &text)?;
    s.finish("verify")?;
    if passed {
        eprintln!("verify: PASS");
        Ok(0)
    } else {
        eprintln!("verify: FAIL");
        Ok(4)
    }
}

/// A closed-form check.
#[derive(Debug, Clone, Serialize)]
pub struct Golden {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Golden {
    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

/// Closed-form golden values on the default grid.
pub fn goldens() -> Result<Vec<Golden>> {
    use crate::function_spaces::RadialGrid;
    let grid = std::sync::Arc::new(RadialGrid::default());
    let zero = RadialProfile::zeros(grid.clone());
    let s4 = RadialProfile::power_law(grid.clone(), Complex64::new(1.0, 0.0), 4.0);
    let (psi, _, _) = solve_stream_mode(&s4, ModeKind::Atom(0))?;
    let vort = solve_vorticity_mode(&zero, &s4, ModeKind::Atom(0), 3.0, None)?;
    let swirl = solve_swirl_mode(&RadialProfile::power_law(grid.clone(), Complex64::new(1.0, 0.0), 3.5), ModeKind::Atom(0), 3.0)?;
    let solver = LinearSolver::new(3.0, 0.0, grid.clone())?;
    let sol = solver.solve_mode(ModeKind::Atom(0), &zero, &zero, &s4)?;
    let g = |name, value: Complex64, expected, tolerance| Golden { name, value: value.re, expected, tolerance };
    Ok(vec![
        Golden { name: "wronskian_defect(1,2)", value: wronskian_defect(1.0, 2.0)?, expected: 0.0, tolerance: 1e-10 },
        Golden { name: "F(1,3)", value: capital_f(1.0, 3.0)?, expected: 0.444319183178923954, tolerance: 1e-10 },
        g("stream psi(2)", psi.eval(2.0)?, 1.0 / 12.0, 1e-6),
        g("vorticity omega(2)", vort.omega.eval(2.0)?, 1.0 / 32.0, 1e-6),
        g("vorticity c", vort.c, -0.5, 1e-6),
        g("swirl v_theta(4)", swirl.eval(4.0)?, 0.25, 1e-6),
        g("end-to-end v_z(2)", sol.v_z.eval(2.0)?, 1.0 / 16.0, 1e-6),
    ])
}

fn regress_cmd(out: Option<&Path>) -> Result<i32> {
    let list = goldens()?;
    let mut ok = true;
    for g in &list {
        let pass = g.passed();
        ok &= pass;
        println!(
            "{}: value {} expected {} error {:.3e} {}",
            g.name,
            fmt_num(g.value),
            fmt_num(g.expected),
            (g.value - g.expected).abs(),
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(&list).map_err(|e| Error::Numerical(e.to_string()))?;
        std::fs::write(dir.join("goldens.json"), text)?;
    }
    Ok(if ok { 0 } else { 4 })
}
