//! `discenv` command line: homogenized-weight evaluation, envelope
//! optimization, grid sweeps, the verification suite and oracle comparisons.

use std::path::PathBuf;
use std::process::ExitCode;

use discenv_cli::gridrun::{eval_scenario_grid, fmt_sig, RunMode};
use discenv_cli::scenario::Scenario;
use discenv_cli::verify::{run_selection, CheckContext};
use discenv_core::oracle::{reference_label, reference_vh, ReferenceCase};
use discenv_core::Point64;

const USAGE: &str = "\
discenv <subcommand> [flags]

Subcommands:
  rho              evaluate the homogenized weight over the scenario grid
  envelope         optimize the disc envelope over the scenario grid
  grid             full sweep: rho, envelope, lower bounds, gaps
  verify           run the verification suite
  oracle-compare   compare solver output against a reference case

Flags:
  --config PATH    scenario configuration (JSON; required except for verify
                   and oracle-compare)
  --out PATH       output CSV path (defaults to the config's `output`, else
                   stdout); a sidecar PATH.discs.txt records best discs
  --seed N         overrides the scenario seed
  --workers N      size of the worker pool (default: all cores)
  --budget-secs X  wall-clock optimizer budget per point
  --selection S    verify only: `all` (default) or comma-separated check ids
  --case ID        oracle-compare only: punctured-ball, annulus,
                   punctured-polydisc, polydisc-union, sector
  --points P       oracle-compare only: semicolon-separated points, each a
                   comma list of re,im pairs
";

struct Args {
    subcommand: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
    budget_secs: Option<f64>,
    selection: String,
    case: Option<String>,
    points: Option<String>,
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let subcommand = argv.next().ok_or_else(|| USAGE.to_string())?;
    let mut args = Args {
        subcommand,
        config: None,
        out: None,
        seed: None,
        workers: None,
        budget_secs: None,
        selection: "all".to_string(),
        case: None,
        points: None,
    };
    while let Some(flag) = argv.next() {
        let mut value = || {
            argv.next()
                .ok_or_else(|| format!("flag {flag} needs a value"))
        };
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(value()?)),
            "--out" => args.out = Some(PathBuf::from(value()?)),
            "--seed" => {
                args.seed = Some(
                    value()?
                        .parse()
                        .map_err(|e| format!("bad --seed: {e}"))?,
                )
            }
            "--workers" => {
                args.workers = Some(
                    value()?
                        .parse()
                        .map_err(|e| format!("bad --workers: {e}"))?,
                )
            }
            "--budget-secs" => {
                args.budget_secs = Some(
                    value()?
                        .parse()
                        .map_err(|e| format!("bad --budget-secs: {e}"))?,
                )
            }
            "--selection" => args.selection = value()?,
            "--case" => args.case = Some(value()?),
            "--points" => args.points = Some(value()?),
            "--help" | "-h" => return Err(USAGE.to_string()),
            other => return Err(format!("unknown flag `{other}`\n\n{USAGE}")),
        }
    }
    Ok(args)
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    if let Some(w) = args.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
        {
            eprintln!("failed to size the worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    let code = match args.subcommand.as_str() {
        "rho" => run_grid(&args, RunMode::RhoOnly),
        "envelope" | "grid" => run_grid(&args, RunMode::Envelope),
        "verify" => run_verify(&args),
        "oracle-compare" => run_oracle_compare(&args),
        other => {
            eprintln!("unknown subcommand `{other}`\n\n{USAGE}");
            2
        }
    };
    ExitCode::from(code as u8)
}

fn load_scenario(args: &Args) -> Result<Scenario, String> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| "this subcommand needs --config".to_string())?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut scenario = Scenario::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        scenario.optimizer.seed = seed;
    }
    Ok(scenario.with_budget(args.budget_secs))
}

fn run_grid(args: &Args, mode: RunMode) -> i32 {
    let scenario = match load_scenario(args) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("{msg}");
            return 2;
        }
    };
    let table = eval_scenario_grid(&scenario, mode);
    let csv = table.to_csv();
    let out_path = args
        .out
        .clone()
        .or_else(|| scenario.output.as_ref().map(PathBuf::from));
    match out_path {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    let _ = std::fs::create_dir_all(parent);
                }
            }
            if let Err(e) = std::fs::write(&path, &csv) {
                eprintln!("cannot write {}: {e}", path.display());
                return 1;
            }
            if mode == RunMode::Envelope {
                let sidecar = path.with_extension(format!(
                    "{}.discs.txt",
                    path.extension().and_then(|s| s.to_str()).unwrap_or("csv")
                ));
                if let Err(e) = std::fs::write(&sidecar, table.disc_records()) {
                    eprintln!("cannot write {}: {e}", sidecar.display());
                    return 1;
                }
            }
            eprintln!(
                "wrote {} rows to {}",
                table.rows.len(),
                path.display()
            );
        }
        None => print!("{csv}"),
    }
    let errors = table
        .rows
        .iter()
        .filter(|r| r.status.starts_with("error:"))
        .count();
    if errors > 0 {
        eprintln!("{errors} of {} points reported errors", table.rows.len());
    }
    0
}

fn run_verify(args: &Args) -> i32 {
    let ctx = CheckContext {
        seed: args.seed.unwrap_or(0),
        budget_secs: args.budget_secs,
        out_dir: args.out.clone(),
    };
    let (outcomes, code) = run_selection(&args.selection, &ctx);
    for o in &outcomes {
        println!("{}", o.line());
    }
    println!(
        "verify: {} checks, exit {code}",
        outcomes.len()
    );
    code
}

fn run_oracle_compare(args: &Args) -> i32 {
    let case = match args
        .case
        .as_deref()
        .ok_or_else(|| "oracle-compare needs --case".to_string())
        .and_then(|id| ReferenceCase::from_id(id).map_err(|e| e.to_string()))
    {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return 2;
        }
    };
    let scenario = discenv_cli::scenario::canonical(case);
    let points: Vec<Point64> = match &args.points {
        Some(list) => {
            let mut out = Vec::new();
            for chunk in list.split(';') {
                let nums: Result<Vec<f64>, _> =
                    chunk.split(',').map(|s| s.trim().parse::<f64>()).collect();
                match nums {
                    Ok(ns) if ns.len() == 2 * scenario.region.dim() => {
                        let parts: Vec<(f64, f64)> =
                            ns.chunks(2).map(|c| (c[0], c[1])).collect();
                        out.push(Point64::from_parts(&parts).unwrap());
                    }
                    _ => {
                        eprintln!(
                            "bad point `{chunk}`: need {} comma-separated numbers",
                            2 * scenario.region.dim()
                        );
                        return 2;
                    }
                }
            }
            out
        }
        None => scenario.grid_points.clone(),
    };

    println!(
        "case {} [{}]: {}",
        case.id(),
        reference_label(case),
        discenv_cli::verify::region_probe_report(&scenario.region)
    );
    let problem = discenv_core::optimize::EnvelopeProblem::new(
        scenario.region.clone(),
        scenario.weight.clone(),
    );
    let (sphere_max, sphere_misses) = problem.report_weight().sphere_bound_probe(64);
    println!(
        "unit-sphere probe: max log rho {sphere_max:.4} over 64 directions, {sphere_misses} outside the cone"
    );
    let grid = discenv_core::quad::QuadratureGrid::new(256).unwrap();
    let mut cfg = scenario.optimizer.clone();
    cfg.max_degree = 3;
    cfg.starts = 6;
    cfg.seed = args.seed.unwrap_or(0);
    cfg.time_budget = args.budget_secs.map(std::time::Duration::from_secs_f64);
    println!("point | reference | log_rho | envelope | env - ref");
    for z in &points {
        let reference = reference_vh(case, z).unwrap();
        let log_rho = problem
            .report_weight()
            .log_rho(z)
            .map(|l| fmt_sig(l.value))
            .unwrap_or_else(|e| format!("error:{e}"));
        let env = discenv_core::optimize::minimize_envelope(
            &problem,
            z,
            scenario.kind,
            &cfg,
            &grid,
        );
        let (env_s, gap_s) = match env {
            Ok(r) => (fmt_sig(r.value), fmt_sig(r.value - reference)),
            Err(e) => (format!("error:{e}"), String::new()),
        };
        let coords: Vec<String> = z
            .coords()
            .iter()
            .map(|c| format!("{:+.4}{:+.4}i", c.re, c.im))
            .collect();
        println!(
            "({}) | {} | {log_rho} | {env_s} | {gap_s}",
            coords.join(", "),
            fmt_sig(reference)
        );
    }
    0
}
