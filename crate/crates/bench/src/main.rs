#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use llrk_bench::order::{convergence_order, OrderConfig};
use llrk_bench::portrait::{portrait, PortraitConfig};
use llrk_bench::probe::{run_probe, ProbeConfig, PRESERVATION_TOL};
use llrk_bench::solve::solve;
use llrk_bench::stability::{stability_region, ComplexGrid};
use llrk_bench::table1::{run_table1, Table1Config};
use llrk_bench::table2::{run_table2, Table2Config, DEFAULT_STEPS};
use llrk_bench::{parse_config, BenchError, BenchResult, RunConfig, Table};

#[derive(Parser)]
#[command(name = "llrk-bench", version, about = "Experiments with Local Linearization and LLRK integrators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    example: Option<u32>,
    /// ll2, llrk4, llrk:<tableau>, rk4 or dp5.
    #[arg(long, global = true)]
    scheme: Option<String>,
    #[arg(long, global = true, conflicts_with = "steps")]
    h: Option<f64>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Padé pair as `p,q`.
    #[arg(long, global = true)]
    pade: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    refine: Option<usize>,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one example; columns t,x1..xd.
    Solve {
        /// Also compute the relative error against a refined reference.
        #[arg(long)]
        reference: bool,
    },
    /// Separatrix intercepts of example 1; columns scheme,h,xi_h,iterations,bracket_width,r_h,status.
    Table1 {
        /// Exponents k of h = 2^-k.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u32>>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Relative errors on examples 2-7; columns example,scheme,ns,re,max_kappa,status.
    Table2,
    /// |R(z)| samples; columns re,im,abs_r.
    Stability {
        #[arg(long, default_value_t = -100.0, allow_hyphen_values = true)]
        re_min: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        re_max: f64,
        #[arg(long, default_value_t = -100.0, allow_hyphen_values = true)]
        im_min: f64,
        #[arg(long, default_value_t = 100.0, allow_hyphen_values = true)]
        im_max: f64,
        #[arg(long, default_value_t = 201)]
        n: usize,
    },
    /// Global error against step size; columns h,steps,max_error.
    Order {
        #[arg(long, value_delimiter = ',')]
        hs: Option<Vec<f64>>,
    },
    /// Phase-portrait data; columns kind,id,t,x1,x2.
    Portrait,
    /// Equilibrium and linearization probes; columns probe,equilibrium,h,eps,value.
    Probe,
}

fn run_config(cli: &Cli) -> BenchResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => parse_config(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(e) = cli.example {
        cfg.example = e;
    }
    if let Some(s) = &cli.scheme {
        cfg.scheme = s.clone();
    }
    if cli.h.is_some() || cli.steps.is_some() {
        cfg.h = cli.h;
        cfg.steps = cli.steps;
    }
    if let Some(p) = &cli.pade {
        cfg.pade = p.clone();
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(r) = cli.refine {
        cfg.refine = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Returns the table and whether its self-check passed.
fn execute(cli: &Cli, cfg: &RunConfig) -> BenchResult<(Table, bool)> {
    let pade = cfg.pade_order()?;
    match &cli.command {
        Command::Solve { reference } => {
            let rep = solve(cfg, *reference)?;
            eprintln!("integrated {} steps in {:.3?}", rep.steps, rep.wall_time);
            Ok((rep.table(), true))
        }
        Command::Table1 { levels, tol } => {
            let mut t1 = Table1Config { spec: cfg.spec()?, pade, ..Default::default() };
            if let Some(l) = levels {
                t1.levels = l.clone();
            }
            if let Some(t) = tol {
                t1.tol = *t;
            }
            Ok((run_table1(&t1)?.table(), true))
        }
        Command::Table2 => {
            let mut t2 = Table2Config { pade, refine: cfg.refine, ..Default::default() };
            if cli.example.is_some() {
                let spec = cfg.spec()?;
                let n = cfg.steps.or_else(|| DEFAULT_STEPS.iter().find(|c| c.0 == spec.id).map(|c| c.1));
                let n =
                    n.ok_or_else(|| BenchError::Invalid(format!("no default step count for example {}", spec.id)))?;
                t2.cases = vec![(spec, n)];
            }
            Ok((run_table2(&t2)?.table(), true))
        }
        Command::Stability { re_min, re_max, im_min, im_max, n } => {
            let grid = ComplexGrid { re: (*re_min, *re_max), im: (*im_min, *im_max), n_re: *n, n_im: *n };
            let rep = stability_region(pade, &grid)?;
            let mut ok = true;
            if pade.a_stable() && rep.max_left > 1.0 + 1e-12 {
                ok = false;
            }
            if pade.l_stable() && rep.at_far_left > 1e-6 {
                ok = false;
            }
            Ok((rep.table(), ok))
        }
        Command::Order { hs } => {
            let mut oc = OrderConfig::new(cfg.spec()?, &cfg.scheme);
            oc.pade = pade;
            oc.refine = cfg.refine;
            if let Some(hs) = hs {
                oc.steps = hs.clone();
            }
            let study = convergence_order(&oc)?;
            let nominal = cfg.scheme()?.order() as f64;
            let ok = study.slope >= nominal - 0.3;
            Ok((study.table(), ok))
        }
        Command::Portrait => {
            let h = cfg.h.unwrap_or(0.25);
            let mut pc = PortraitConfig::new(cfg.spec()?, &cfg.scheme, h);
            pc.pade = pade;
            Ok((portrait(&pc)?.table(), true))
        }
        Command::Probe => {
            let mut pc = ProbeConfig::new(cfg.spec()?, &cfg.scheme);
            pc.pade = pade;
            if let Some(h) = cfg.h {
                pc.linearization_step = h;
            }
            let rep = run_probe(&pc)?;
            let ok = !cfg.scheme()?.uses_exponential() || rep.max_deviation_exact() <= PRESERVATION_TOL;
            Ok((rep.table(), ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run_config(&cli).and_then(|cfg| {
        let (table, ok) = execute(&cli, &cfg)?;
        let text = if cli.json {
            serde_json::to_string_pretty(&table.to_json()).expect("json") + "\n"
        } else {
            table.to_csv()
        };
        match &cfg.out {
            Some(path) => fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("self-check failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
