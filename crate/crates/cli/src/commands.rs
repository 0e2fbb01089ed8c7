use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;

use capstan::equilibrium::{
    capacity, harmonic_cross_check, off_support_margin, solve_equilibrium_with, EquilibriumMeasure, SolverOptions,
};
use capstan::fekete::{exact_gs_certificate_with_budget, fekete_points};
use capstan::gsbound::{
    bound_coefficient, optimize_exponents, optimize_tied, sweep_csv, sweep_points, tied_bound, OptimizeOptions,
};
use capstan::primes::{build_psi, empirical_bound_check, psi_csv, verify_psi_lcm_range};
use capstan::weightspec::{to_root_form, FactoredWeight, RootWeight, WeightConfig, DEFAULT_ROOT_TOL};

use crate::output::{emit, round12, Record};
use crate::{Cli, CliError, Command, GlobalArgs};

const OFF_SUPPORT_PROBES: usize = 400;

fn load_config(g: &GlobalArgs) -> Result<WeightConfig, CliError> {
    let path = g
        .weight
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --weight <config.json>".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    Ok(WeightConfig::from_json(&text)?)
}

fn load_weight(g: &GlobalArgs) -> Result<(FactoredWeight, RootWeight), CliError> {
    let fw = load_config(g)?.to_factored()?;
    let rw = to_root_form(&fw, DEFAULT_ROOT_TOL)?;
    Ok((fw, rw))
}

fn solver_options(g: &GlobalArgs) -> Result<SolverOptions, CliError> {
    for (name, v) in [
        ("--newton-tol", g.newton_tol),
        ("--accept-tol", g.accept_tol),
        ("--mass-threshold", g.mass_threshold),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
        }
    }
    if g.grid_size < 200 {
        return Err(CliError::Usage(format!("--grid-size must be at least 200, got {}", g.grid_size)));
    }
    Ok(SolverOptions {
        grid_size: g.grid_size,
        newton_tol: g.newton_tol,
        accept_tol: g.accept_tol,
        mass_threshold: g.mass_threshold,
        ..SolverOptions::default()
    })
}

fn pool(g: &GlobalArgs) -> Result<ThreadPool, CliError> {
    let jobs = g.jobs.unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))
}

fn solve(g: &GlobalArgs, rw: &RootWeight) -> Result<EquilibriumMeasure, CliError> {
    let start = Instant::now();
    let m = solve_equilibrium_with(rw, &solver_options(g)?)?;
    if g.verbose > 0 {
        eprintln!(
            "solved {} interval(s) in {:.3} s, endpoints {:?}",
            m.num_intervals(),
            start.elapsed().as_secs_f64(),
            m.support.endpoints
        );
    }
    Ok(m)
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let out = g.output.as_deref();
    match &cli.command {
        Command::Capacity => {
            let (fw, rw) = load_weight(g)?;
            let m = solve(g, &rw)?;
            let rep = capacity(&m)?;
            let margin = off_support_margin(&m, &rep, OFF_SUPPORT_PROBES);
            let text = Record::new()
                .field("weight", fw.to_string())
                .field("num_intervals", m.num_intervals())
                .field("endpoints", &m.support.endpoints)
                .merge(&rep)
                .field("off_support_margin", margin)
                .field("quantity", "weighted capacity c_w = exp(-V_w)")
                .render();
            emit(out, &text)
        }
        Command::Support => {
            let (fw, rw) = load_weight(g)?;
            let m = solve(g, &rw)?;
            let text = Record::new()
                .field("weight", fw.to_string())
                .field("num_intervals", m.num_intervals())
                .merge(&m.support)
                .field("quantity", "support of the weighted equilibrium measure")
                .render();
            emit(out, &text)
        }
        Command::Density { samples } => {
            if *samples == 0 {
                return Err(CliError::Usage("--samples must be positive".into()));
            }
            let (_, rw) = load_weight(g)?;
            let m = solve(g, &rw)?;
            emit(out, &m.density_csv(*samples))
        }
        Command::Bound => {
            let (fw, _) = load_weight(g)?;
            let rep = bound_coefficient(&fw)?;
            let text = Record::new()
                .merge(&rep)
                .field("quantity", "bound coefficient B = -2 log c_w / (4 alpha + 3)")
                .render();
            emit(out, &text)
        }
        Command::Optimize { tied, tol, sweep, csv } => optimize(g, *tied, *tol, *sweep, csv.as_deref()),
        Command::PsiCheck { limit, coefficient, x_min, stride, verify_lcm } => {
            let start = Instant::now();
            let table = build_psi(*limit)?;
            let x_min = x_min.unwrap_or((limit / 100).max(2));
            let rep = empirical_bound_check(&table, x_min)?;
            let lcm_failure = verify_psi_lcm_range(&table, *verify_lcm);
            emit(out, &psi_csv(&table, stride.unwrap_or((limit / 1000).max(1))))?;
            let summary = Record::new()
                .merge(rep)
                .field("coefficient", coefficient)
                .field("holds", rep.min_ratio >= *coefficient)
                .field("lcm_verified_up_to", verify_lcm.min(limit))
                .field("lcm_first_failure", lcm_failure)
                .field("seconds", start.elapsed().as_secs_f64())
                .field("quantity", "min of I(x) / (x^2 / 2) over [x_min, limit]")
                .render();
            eprint!("{summary}");
            Ok(())
        }
        Command::Fekete { nmax } => {
            if *nmax < 2 {
                return Err(CliError::Usage("--nmax must be at least 2".into()));
            }
            let (_, rw) = load_weight(g)?;
            let sets = pool(g)?.install(|| {
                (2..=*nmax)
                    .into_par_iter()
                    .map(|n| fekete_points(&rw, n))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            let mut text = String::from("n,d_n\n");
            for s in &sets {
                if g.verbose > 0 && s.stagnated {
                    eprintln!("n = {}: sweep cap reached", s.n);
                }
                text.push_str(&format!("{},{}\n", s.n, s.d_n));
            }
            emit(out, &text)
        }
        Command::Certify { n, budget } => {
            let fw = load_config(g)?.to_exact()?;
            let c = exact_gs_certificate_with_budget(&fw, *n, *budget)?;
            let (lo, hi) = c.lcm_range();
            let text = Record::new()
                .field("n", c.n)
                .field("weight", &c.weight)
                .field("ceilings", &c.ceilings)
                .field("weight_degree", c.weight_degree)
                .field("terms", c.terms)
                .field("integral", c.integral.to_string())
                .field("lcm_range", [lo, hi])
                .field("lcm_product", c.lcm_product.to_string())
                .field("certified_integer", c.certified_integer.to_string())
                .field("psi_sum_lower_bound", c.psi_sum_lower_bound)
                .field("psi_sum", c.psi_sum)
                .field("exponent_bound_holds", c.exponent_bound_holds)
                .field("quantity", "lcm product times the integral of the weighted discriminant")
                .render();
            emit(out, &text)
        }
        Command::CrossCheck => {
            let (fw, rw) = load_weight(g)?;
            let m = solve(g, &rw)?;
            let residual = harmonic_cross_check(&rw, &m.support)?;
            let text = Record::new()
                .field("weight", fw.to_string())
                .field("num_intervals", m.num_intervals())
                .field("endpoints", &m.support.endpoints)
                .field("residual", residual)
                .field("quantity", "sup-norm gap between harmonic-measure and direct densities")
                .render();
            emit(out, &text)
        }
    }
}

fn optimize(
    g: &GlobalArgs,
    tied: Option<(f64, f64)>,
    tol: f64,
    sweep: Option<(f64, f64, usize)>,
    csv: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = load_config(g)?;
    let fw = cfg.to_factored()?;
    if fw.factors.is_empty() {
        return Err(CliError::Usage("there are no exponents to optimize".into()));
    }
    let polys: Vec<Vec<i64>> = fw.factors.iter().map(|f| f.coeffs.clone()).collect();
    if let (Some((t0, t1, steps)), Some(path)) = (sweep, csv) {
        let ts: Vec<f64> = sweep_points(t0, t1, steps).into_iter().map(round12).collect();
        let rows: Vec<(f64, Option<f64>)> = pool(g)?.install(|| {
            ts.par_iter()
                .map(|&t| (t, tied_bound(&polys, t).ok().map(|r| r.b)))
                .collect()
        });
        emit(Some(path), &sweep_csv(&rows))?;
    }
    let (method, best) = match tied {
        Some((lo, hi)) => {
            if !(tol > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
            }
            ("golden-section over a shared exponent", optimize_tied(&polys, lo, hi, tol)?)
        }
        None => {
            let alpha0: Vec<f64> = fw.factors.iter().map(|f| f.exponent).collect();
            let free = vec![true; polys.len()];
            ("projected Nelder-Mead", optimize_exponents(&polys, &alpha0, &free, &OptimizeOptions::default())?)
        }
    };
    let text = Record::new()
        .field("method", method)
        .field("exponents", &best.exponents)
        .field("evaluations", best.evaluations)
        .merge(&best.report)
        .field("quantity", "largest bound coefficient B found over the exponents")
        .render();
    emit(g.output.as_deref(), &text)
}
