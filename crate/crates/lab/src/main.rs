use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use oldroyd_core::functionals::report;
use oldroyd_core::model::Dynamics;
use oldroyd_core::oracle::{
    convolution_bound_check, damping_envelope, linear_decay_integral, linear_field_propagate, pure_envelope, Profile,
};
use oldroyd_lab::experiments::{run_damping_sweep, simulate, SweepOptions};
use oldroyd_lab::fit::{fit_power_law, Criterion, FitResult};
use oldroyd_lab::initial::scenario_initial;
use oldroyd_lab::invariants::run_battery;
use oldroyd_lab::report::{emit_report, trace_tables, Table};
use oldroyd_lab::scenario::{Format, InitKind, Scenario};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "decay-lab", about = "Decay and vanishing-damping experiments for the fractional Oldroyd-B model")]
struct Cli {
    /// Directory for CSV/JSON artifacts
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario: decay fits, remainder, integrability, energy monitors
    Sim(ScenarioArgs),
    /// Exact linear-system oracle
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Paired runs over a damping grid against a = 0
    SweepDamping(SweepArgs),
    /// Power-law fit of one column of a CSV file
    Fit(FitArgs),
    /// Seeded property battery
    CheckInvariants {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Scenario file plus overrides of its fields.
#[derive(Args, Clone)]
struct ScenarioArgs {
    /// TOML scenario; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    length: Option<f64>,
    /// nonlinear | linear
    #[arg(long, value_parser = parse_dynamics)]
    dynamics: Option<Dynamics>,
    /// compact-fourier | random-besov | mean-nonzero
    #[arg(long, value_parser = parse_kind)]
    kind: Option<InitKind>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    cfl_safety: Option<f64>,
    #[arg(long)]
    fit_t_min: Option<f64>,
    #[arg(long)]
    fit_t_max: Option<f64>,
    /// Comma-separated energy monitors, e.g. E0,Ebar_1
    #[arg(long, value_delimiter = ',')]
    monitors: Option<Vec<String>>,
}

fn parse_dynamics(s: &str) -> Result<Dynamics, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> Result<InitKind, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|e| e.to_string())
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario> {
        let mut sc = match &self.config {
            Some(p) => Scenario::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => Scenario::default(),
        };
        macro_rules! set {
            ($field:expr, $v:expr) => {
                if let Some(v) = $v.clone() {
                    $field = v;
                }
            };
        }
        set!(sc.name, self.name);
        set!(sc.model.a, self.a);
        set!(sc.model.beta, self.beta);
        set!(sc.model.b, self.b);
        set!(sc.model.n, self.n);
        set!(sc.model.length, self.length);
        set!(sc.model.dynamics, self.dynamics);
        set!(sc.init.kind, self.kind);
        set!(sc.init.epsilon, self.epsilon);
        set!(sc.init.seed, self.seed);
        set!(sc.stepper.t_end, self.t_end);
        set!(sc.stepper.samples, self.samples);
        set!(sc.stepper.cfl_safety, self.cfl_safety);
        set!(sc.fit.t_min, self.fit_t_min);
        set!(sc.monitors.names, self.monitors);
        if self.dt.is_some() {
            sc.stepper.dt = self.dt;
        }
        if self.fit_t_max.is_some() {
            sc.fit.t_max = self.fit_t_max;
        }
        sc.validate()?;
        Ok(sc)
    }
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Whole-plane linear decay integral and its fitted slope
    Decay {
        #[arg(long, default_value_t = 0.75)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        s1: f64,
        #[arg(long, default_value_t = 100.0)]
        t_min: f64,
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Damping envelope and its a^{1/(2β)} scaling
    Envelope {
        #[arg(long, default_value_t = 0.75)]
        beta: f64,
        #[arg(long, default_value_t = 1e-4)]
        a_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        a_max: f64,
        #[arg(long, default_value_t = 7)]
        points: usize,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Convolution integral against its predicted envelope
    Convcheck {
        #[arg(long)]
        s1: f64,
        #[arg(long)]
        s2: f64,
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// Exact linear evolution of a scenario's initial data
    Propagate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        t: f64,
    },
}

#[derive(Args, Clone)]
struct ProfileArgs {
    /// Plateau radius; a flat disk profile when --support is absent
    #[arg(long, default_value_t = 1.0)]
    plateau: f64,
    #[arg(long)]
    support: Option<f64>,
}

impl ProfileArgs {
    fn profile(&self) -> Profile {
        match self.support {
            Some(s) => Profile::plateau(self.plateau, s),
            None => Profile::flat(self.plateau),
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.003,0.01,0.03,0.1")]
    a_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    alphas: Vec<f64>,
    /// Fit only a in [fit_a_min, fit_a_max]
    #[arg(long)]
    fit_a_min: Option<f64>,
    #[arg(long)]
    fit_a_max: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    tolerance: f64,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value = "t")]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long, default_value_t = 0.0)]
    t_min: f64,
    #[arg(long, default_value_t = f64::MAX)]
    t_max: f64,
    #[arg(long, allow_hyphen_values = true)]
    target: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    tolerance: f64,
}

fn write<T: Serialize>(out: Option<&Path>, stem: &str, summary: &T, tables: &[Table]) -> Result<()> {
    if let Some(dir) = out {
        for p in emit_report(dir, stem, summary, tables, &[Format::Csv, Format::Json])? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn print_fit(f: &FitResult) {
    let target = f.target.map(|t| format!("{t:.4}")).unwrap_or_else(|| "-".into());
    println!(
        "{:<24} exponent {:>9.5}  target {:>8}  residual {:.3e}  {:?}  {}",
        f.name,
        f.exponent,
        target,
        f.residual,
        f.status,
        if f.pass { "pass" } else { "FAIL" }
    );
}

fn geom(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

fn run(cli: Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    match cli.cmd {
        Cmd::Sim(args) => {
            let sc = args.scenario()?;
            let out = out.or(sc.output.dir.as_deref());
            let res = simulate(&sc)?;
            for f in &res.decay {
                print_fit(f);
            }
            println!(
                "remainder max ratio {:.4e} (limit {})  {}",
                res.remainder.max_ratio,
                res.remainder.fraction,
                if res.remainder.pass { "pass" } else { "FAIL" }
            );
            println!(
                "integrability total {:.4e}, last decade {:.2}%  {}",
                res.integrability.total,
                100.0 * res.integrability.ratio,
                if res.integrability.flattening { "flattening" } else { "not flattening" }
            );
            for m in &res.monitors {
                println!(
                    "monitor {:<9} worst {:+.3e} at t = {:.3}  {}",
                    m.name,
                    m.worst,
                    m.at_t,
                    if m.pass { "pass" } else { "FAIL" }
                );
            }
            if let Some(dir) = out {
                emit_report(dir, &sc.name, &res, &trace_tables(&res.run.members), &sc.output.formats)?;
                std::fs::write(dir.join(format!("{}.toml", sc.name)), sc.to_toml_string())?;
            }
            Ok(res.pass())
        }
        Cmd::Oracle(OracleCmd::Decay {
            beta,
            s1,
            t_min,
            t_max,
            points,
            profile,
        }) => {
            let p = profile.profile();
            let series = geom(t_min, t_max, points)
                .into_iter()
                .map(|t| Ok((t, linear_decay_integral(&p, s1, beta, t)?)))
                .collect::<Result<Vec<_>>>()?;
            let fit = fit_power_law(&series, (t_min, t_max))?
                .named("linear_decay_integral")
                .judged(-(1.0 + s1) / beta, Criterion::Within, 0.01, f64::MAX);
            print_fit(&fit);
            write(out, "oracle_decay", &fit, &[Table::from_series("series", "integral", &series)])?;
            Ok(fit.pass)
        }
        Cmd::Oracle(OracleCmd::Envelope {
            beta,
            a_min,
            a_max,
            points,
            profile,
        }) => {
            let p = profile.profile();
            let mut t = Table::new("envelope", ["a", "envelope", "t_star", "pure", "pure_scaled"].map(String::from).to_vec());
            let mut scaled = Vec::new();
            for a in geom(a_min, a_max, points) {
                let (pure, _) = pure_envelope(a, beta)?;
                let row = if beta > 0.5 {
                    let e = damping_envelope(a, beta, &p)?;
                    vec![Some(a), Some(e.value), Some(e.t_star), Some(pure)]
                } else {
                    vec![Some(a), None, None, Some(pure)]
                };
                let s = pure / a.powf(1.0 / (2.0 * beta));
                scaled.push(s);
                let mut row = row;
                row.push(Some(s));
                println!("a = {a:.3e}  pure = {pure:.6e}  pure/a^(1/2β) = {s:.12}");
                t.rows.push(row);
            }
            let spread = scaled.iter().fold(0.0, |m: f64, s| m.max((s / scaled[0] - 1.0).abs()));
            println!("relative spread of pure/a^(1/2β): {spread:.3e}");
            write(out, "oracle_envelope", &scaled, &[t])?;
            Ok(spread <= 1e-6)
        }
        Cmd::Oracle(OracleCmd::Convcheck { s1, s2, t_max, points }) => {
            let checks = geom(1.0, t_max, points)
                .into_iter()
                .map(|t| Ok(convolution_bound_check(s1, s2, t)?))
                .collect::<Result<Vec<_>>>()?;
            let ratios: Vec<(f64, f64)> = checks.iter().map(|c| (c.t, c.ratio)).collect();
            let max = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
            let tail: Vec<f64> = ratios.iter().filter(|r| r.0 >= t_max / 10.0).map(|r| r.1).collect();
            let (lo, hi) = tail.iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
            let variation = (hi - lo) / lo;
            println!("max ratio {max:.6}, last-decade variation {:.2}%", 100.0 * variation);
            write(out, "oracle_convcheck", &checks, &[Table::from_series("ratio", "ratio", &ratios)])?;
            Ok(max.is_finite() && variation < 0.1)
        }
        Cmd::Oracle(OracleCmd::Propagate { scenario, t }) => {
            let sc = scenario.scenario()?;
            let (s0, _) = scenario_initial(&sc)?;
            let p = sc.params()?;
            let st = linear_field_propagate(&s0, p.a, p.beta, t);
            let r = report(&st, &p, &sc.functional_config());
            for (name, v) in r.columns() {
                println!("{name:<16} {}", v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into()));
            }
            write(out, "oracle_propagate", &r, &[Table::from_reports("functionals", &[&r])])?;
            Ok(true)
        }
        Cmd::SweepDamping(args) => {
            let sc = args.scenario.scenario()?;
            let out = out.or(sc.output.dir.as_deref());
            let fit_range = match (args.fit_a_min, args.fit_a_max) {
                (None, None) => None,
                (lo, hi) => Some((lo.unwrap_or(0.0), hi.unwrap_or(1.0))),
            };
            let opts = SweepOptions {
                fit_range,
                alpha_tol: args.tolerance,
                trtau_tol: args.tolerance,
                ..SweepOptions::default()
            };
            let res = run_damping_sweep(&sc, &args.a_grid, &args.alphas, &opts)?;
            for p in &res.points {
                println!("a = {:.3e}  sup trτ diff {:.4e} at t = {:.2}", p.a, p.sup_trtau_diff, p.t_star_trtau);
            }
            for f in &res.fits {
                print_fit(f);
            }
            println!("monotone in a: {}", res.monotone);
            if let Some(dir) = out {
                let mut tables = vec![Table::from_sweep(&res.points)];
                tables.extend(trace_tables(&res.run.members));
                emit_report(dir, &format!("{}_sweep", sc.name), &res, &tables, &sc.output.formats)?;
            }
            Ok(res.fits.iter().all(|f| f.pass))
        }
        Cmd::Fit(args) => {
            let mut rdr = csv::Reader::from_path(&args.csv)?;
            let headers = rdr.headers()?.clone();
            let col = |name: &str| headers.iter().position(|h| h == name);
            let (Some(ix), Some(iy)) = (col(&args.x), col(&args.y)) else {
                bail!("columns {} / {} not found in {:?}", args.x, args.y, headers);
            };
            let mut series = Vec::new();
            for rec in rdr.records() {
                let rec = rec?;
                let parse = |i: usize| rec.get(i).and_then(|v| v.parse::<f64>().ok());
                if let (Some(x), Some(y)) = (parse(ix), parse(iy)) {
                    series.push((x, y));
                }
            }
            let mut fit = fit_power_law(&series, (args.t_min, args.t_max))?.named(args.y.clone());
            if let Some(t) = args.target {
                fit = fit.judged(t, Criterion::Within, args.tolerance, f64::MAX);
            }
            print_fit(&fit);
            write(out, "fit", &fit, &[])?;
            Ok(fit.pass)
        }
        Cmd::CheckInvariants { instances, seed } => {
            let checks = run_battery(instances, seed);
            for c in &checks {
                println!(
                    "{:<30} {:>4}/{:<4} failures, worst {:.3e} (tol {:.0e})  {}",
                    c.name,
                    c.failures,
                    c.instances,
                    c.worst,
                    c.tolerance,
                    if c.pass() { "pass" } else { "FAIL" }
                );
            }
            write(out, "invariants", &checks, &[])?;
            Ok(checks.iter().all(|c| c.pass()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
