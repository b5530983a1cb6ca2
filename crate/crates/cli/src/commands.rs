use std::fmt;
use std::io::{self, Write};

use parasharp_core::closed_forms::{phi, s0_residual, w0_deriv, w0_eval, w0_second_deriv};
use parasharp_core::estimate::{default_times, verify_estimate, EstimateReport};
use parasharp_core::mild::{derivative_field, duhamel_residual, picard_solve, PicardConfig, Seed};
use parasharp_core::sharpness::{gap_sweep, theorem_construction};
use parasharp_core::specfun::{erf, erfc, gamma_fn, gauss_hermite, gauss_legendre, ln_gamma, tail_integral_I};
use parasharp_core::{solve_profile, Error, GridSpec, QuadratureConfig, SpaceTimeField};
use serde::Serialize;

use crate::output::{sink, write_json, Table};
use crate::{
    Cli, Command, ConstructArgs, Format, GridArgs, MildArgs, PhiArgs, ProfileArgs, S0Args, SpecfunCommand,
    SpecialFunction, SweepArgs, VerifyArgs, EXIT_IO, EXIT_SOLVER, EXIT_VALIDATION,
};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Core(_) => EXIT_SOLVER,
            CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Usage(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = QuadratureConfig::default();
    match &cli.command {
        Command::Profile(a) => profile(cli, a),
        Command::Phi(a) => phi_table(cli, a),
        Command::S0(a) => s0(cli, a, &cfg),
        Command::MildSolve(a) => mild_solve(cli, a, &cfg),
        Command::VerifyEstimate(a) => verify(cli, a, &cfg),
        Command::GapSweep(a) => sweep(cli, a, &cfg),
        Command::Construct(a) => construct(cli, a, &cfg),
        Command::Specfun(a) => specfun(cli, &a.command, &cfg),
    }
}

fn emit(cli: &Cli, table: &Table) -> Result<()> {
    let mut out = sink(cli.output.as_deref())?;
    table.write(cli.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn profile(cli: &Cli, a: &ProfileArgs) -> Result<()> {
    let sol = solve_profile(a.p, a.tol, a.eta_max)?;
    let mut out = sink(cli.output.as_deref())?;
    match cli.format {
        Format::Csv => {
            let mut meta = Table::new(vec![
                "p",
                "slope0",
                "bracket_lo",
                "bracket_hi",
                "plateau",
                "lower_bound",
                "lower_bound_alt",
                "converged",
            ]);
            meta.push(vec![
                sol.p.into(),
                sol.slope0.into(),
                sol.bracket.0.into(),
                sol.bracket.1.into(),
                sol.plateau.into(),
                sol.lower_bounds.0.into(),
                sol.lower_bounds.1.into(),
                sol.converged.into(),
            ]);
            meta.write_csv(&mut out)?;
            writeln!(out)?;
            profile_table(&sol.grid, &sol.w, &sol.w_prime).write_csv(&mut out)?;
        }
        Format::Json => write_json(&sol, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn profile_table(grid: &[f64], w: &[f64], wp: &[f64]) -> Table {
    let mut t = Table::new(vec!["eta", "w", "w_prime"]);
    for i in 0..grid.len() {
        t.push(vec![grid[i].into(), w[i].into(), wp[i].into()]);
    }
    t
}

fn phi_table(cli: &Cli, a: &PhiArgs) -> Result<()> {
    let mut t = Table::new(vec!["p", "phi"]);
    for &p in &a.p {
        t.push(vec![p.into(), phi(p)?.into()]);
    }
    emit(cli, &t)
}

/// Points start, start + step, ... up to stop.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Usage(format!("grid must be start:step:stop with step > 0 and start <= stop, got {spec:?}"));
    let parts: Vec<f64> =
        spec.split(':').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    let [start, step, stop] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && start <= stop) {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(CliError::Usage(format!("grid {spec:?} has too many points")));
    }
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

fn s0(cli: &Cli, a: &S0Args, cfg: &QuadratureConfig) -> Result<()> {
    let mut t = Table::new(vec!["eta", "w0", "w0_prime", "residual"]);
    for eta in parse_grid(&a.grid)? {
        let w = w0_eval(eta, cfg)?;
        let wp = w0_deriv(eta, cfg)?;
        // the residual operator is singular-free at 0, where w0 = 0
        let res = if eta > 0.0 { s0_residual(eta, cfg)? } else { w0_second_deriv(eta, cfg)? + 1.0 - w };
        t.push(vec![eta.into(), w.into(), wp.into(), res.into()]);
    }
    emit(cli, &t)
}

fn grid_spec(g: &GridArgs) -> Result<GridSpec> {
    let mut spec = GridSpec::for_horizon(g.t_final);
    if let Some(x) = g.x_half {
        spec.x_half = x;
    }
    spec.dx = g.dx;
    spec.nt = g.nt;
    spec.validate()?;
    Ok(spec)
}

fn solve_field(
    f: &parasharp_core::NonlinearitySpec,
    u0: &parasharp_core::InitialDataSpec,
    grids: &GridSpec,
    max_iter: usize,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<SpaceTimeField> {
    let picard = PicardConfig { max_iter, tol, seed: Seed::Auto };
    let r = picard_solve(f, u0, grids, cfg, &picard)?;
    if !r.converged {
        eprintln!(
            "warning: fixed-point iteration stopped after {} sweeps with change {}",
            r.iterations,
            crate::output::fmt_f64(r.last_change)
        );
    }
    Ok(r.field)
}

fn mild_solve(cli: &Cli, a: &MildArgs, cfg: &QuadratureConfig) -> Result<()> {
    let grids = grid_spec(&a.grid)?;
    let u = solve_field(&a.f, &a.u0, &grids, a.max_iter, a.tol, cfg)?;
    let mut t = Table::new(vec!["t", "x", "u"]);
    for (k, &tk) in u.t.iter().enumerate() {
        for (j, &x) in u.x.iter().enumerate() {
            t.push(vec![tk.into(), x.into(), u.values[k][j].into()]);
        }
    }
    emit(cli, &t)?;
    if let Some(path) = &a.derivative_output {
        let slices = if a.slices.is_empty() { vec![grids.t_final] } else { a.slices.clone() };
        let mut d = Table::new(vec!["t", "x", "u_x"]);
        for &ts in &slices {
            let ux = derivative_field(&a.f, &a.u0, &u, ts, cfg)?;
            for (j, &x) in u.x.iter().enumerate() {
                d.push(vec![ts.into(), x.into(), ux[j].into()]);
            }
        }
        let mut out = sink(Some(path))?;
        d.write(cli.format, &mut out)?;
        out.flush()?;
    } else if !a.slices.is_empty() {
        return Err(CliError::Usage("--slices needs --derivative-output".into()));
    }
    if a.verify {
        let r = duhamel_residual(&a.f, &a.u0, &u, cfg)?;
        eprintln!("duhamel residual: {}", crate::output::fmt_f64(r));
    }
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    inf_gap: f64,
    final_lhs: f64,
    alpha: f64,
    alpha_flag: bool,
    residual: f64,
    eps_quad: f64,
    trusted: bool,
    violations: &'a [String],
}

fn verify(cli: &Cli, a: &VerifyArgs, cfg: &QuadratureConfig) -> Result<()> {
    let grids = grid_spec(&a.grid)?;
    let u = solve_field(&a.f, &a.u0, &grids, PicardConfig::default().max_iter, PicardConfig::default().tol, cfg)?;
    let times = if a.times.is_empty() { default_times(grids.t_final) } else { a.times.clone() };
    let r = verify_estimate(&a.f, &a.u0, &u, &times, a.alpha, cfg)?;
    let mut out = sink(cli.output.as_deref())?;
    match cli.format {
        Format::Csv => {
            report_table(&r).write_csv(&mut out)?;
            writeln!(out)?;
            write_json(&summary(&r), &mut out)?;
        }
        Format::Json => write_json(&r, &mut out)?,
    }
    out.flush()?;
    for v in &r.violations {
        eprintln!("violation: {v}");
    }
    Ok(())
}

fn summary(r: &EstimateReport) -> Summary<'_> {
    Summary {
        inf_gap: r.inf_gap,
        final_lhs: r.final_lhs,
        alpha: r.alpha,
        alpha_flag: r.alpha_flag,
        residual: r.residual,
        eps_quad: r.eps_quad,
        trusted: r.trusted,
        violations: &r.violations,
    }
}

fn report_table(r: &EstimateReport) -> Table {
    let mut t = Table::new(vec!["t", "lhs", "rhs", "gap", "ebound"]);
    for k in 0..r.times.len() {
        t.push(vec![r.times[k].into(), r.lhs[k].into(), r.rhs[k].into(), r.gap[k].into(), r.ebound[k].into()]);
    }
    t
}

fn sweep(cli: &Cli, a: &SweepArgs, cfg: &QuadratureConfig) -> Result<()> {
    let rows = gap_sweep(a.n_max, a.t_final, a.window, cfg)?;
    let mut t =
        Table::new(vec!["n", "p", "slope0", "phi_p", "gap", "scaled_inf", "w0_dist", "w0_deriv_dist", "failure"]);
    for r in rows {
        if let Some(msg) = &r.failure {
            eprintln!("warning: n = {} failed: {msg}", r.n);
        }
        t.push(vec![
            r.n.into(),
            r.p.into(),
            r.slope0.into(),
            r.phi_p.into(),
            r.gap.into(),
            r.scaled_inf.into(),
            r.w0_dist.into(),
            r.w0_deriv_dist.into(),
            r.failure.into(),
        ]);
    }
    emit(cli, &t)
}

fn construct(cli: &Cli, a: &ConstructArgs, cfg: &QuadratureConfig) -> Result<()> {
    let c = theorem_construction(a.alpha, a.t_final, a.n, cfg)?;
    let mut out = sink(cli.output.as_deref())?;
    write_json(&c, &mut out)?;
    out.flush()?;
    Ok(())
}

fn specfun(cli: &Cli, cmd: &SpecfunCommand, cfg: &QuadratureConfig) -> Result<()> {
    let t = match cmd {
        SpecfunCommand::DumpGh { order } => rule_table(gauss_hermite(*order)?),
        SpecfunCommand::DumpGl { order } => rule_table(gauss_legendre(*order)?),
        SpecfunCommand::Eval { function, x } => {
            let mut t = Table::new(vec!["x", "value"]);
            for &v in x {
                let y = match function {
                    SpecialFunction::Gamma => gamma_fn(v)?,
                    SpecialFunction::LnGamma => ln_gamma(v)?,
                    SpecialFunction::Erf => erf(v),
                    SpecialFunction::Erfc => erfc(v),
                    SpecialFunction::TailI => tail_integral_I(v, cfg)?,
                };
                t.push(vec![v.into(), y.into()]);
            }
            t
        }
    };
    emit(cli, &t)
}

fn rule_table(rule: parasharp_core::specfun::GaussRule) -> Table {
    let mut t = Table::new(vec!["node", "weight"]);
    for (x, w) in rule.iter() {
        t.push(vec![x.into(), w.into()]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grid("0:0.5:2").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("1:1:1").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("0:0.1:0.3").unwrap().len(), 4);
        for bad in ["0:0:1", "1:0.5:0", "a:1:2", "0:1", "0:1:2:3", "0:-1:2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
