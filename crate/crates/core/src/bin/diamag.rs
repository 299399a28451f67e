use clap::{Args, Parser, Subcommand, ValueEnum};
use diamag::bulk::{pressure_bulk, susceptibility_bulk, BulkMethod, ThermoParams};
use diamag::finite_gas::{
    build_contour, pressure_contour, pressure_eigsum, susceptibility_finite, write_chi_csv, ChiMethod, ChiRow, FdOptions, FiniteBox,
    FiniteChi, FugacityCompact,
};
use diamag::harness::{self, OutputFormat, StudyConfig, StudyResult};
use diamag::kernel_lab::{
    g_expansion_trace_from, semigroup_expansion_from, DuhamelTerms, ExpansionOptions, ExpansionReport, HeatContext, LabPoint,
};
use diamag::spectrum::BoxGrid;
use diamag::{Complex64, Error, Statistics};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "diamag", version, about = "Pressure and field derivatives of a quantum gas in a magnetic field")]
struct Cli {
    /// Study configuration (TOML, or JSON when the file starts with '{').
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed of the random fugacities; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Pressure of the bulk gas or of a finite box.
    Pressure(PointArgs),
    /// Field derivatives of the pressure.
    Chi(ChiArgs),
    /// Convergence of the box values to the bulk along a ladder of sides.
    Converge,
    /// Uniform-bound scan along a ladder of sides.
    Bounds,
    /// Run named property checks ("all" for every check).
    Verify {
        names: Vec<String>,
        /// List the registered checks and exit.
        #[arg(long)]
        list: bool,
    },
    /// Field expansions of the semigroup and resolvent in the kernel lab.
    Kernels {
        /// Expansion order (defaults to the lab configuration).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        kind: KernelKind,
    },
    /// Print the default configuration or its reference page.
    Config {
        #[arg(long)]
        reference: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum KernelKind {
    Semigroup,
    Resolvent,
    Both,
}

#[derive(Args, Clone)]
struct PointArgs {
    /// Use the finite box of this side instead of the bulk gas.
    #[arg(long)]
    side: Option<f64>,
    /// Interior grid points per axis of the box cross-section.
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Fugacity as RE or RE,IM; repeatable.
    #[arg(long = "z", value_parser = parse_complex, default_values = ["0.5"])]
    z: Vec<Complex64>,
    /// bose or fermi; repeatable (default both).
    #[arg(long)]
    stats: Vec<Statistics>,
    /// Evaluate the box pressure through the contour integral.
    #[arg(long)]
    contour: bool,
}

#[derive(Args, Clone)]
struct ChiArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Derivative order N >= 1.
    #[arg(long, default_value_t = 1)]
    order: u32,
    /// Box method: eig_fd, contour_fd or hellmann. The bulk gas always uses
    /// the analytic level sums unless --bulk-fd is given.
    #[arg(long, default_value = "eig_fd")]
    method: ChiMethod,
    #[arg(long)]
    bulk_fd: bool,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected RE or RE,IM, got '{s}'")),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Unsupported(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 2,
        Error::Numerical { .. } | Error::Contour(_) | Error::Smallness(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_config(cli: &Cli) -> diamag::Result<StudyConfig> {
    let mut cfg = match &cli.config {
        Some(p) => StudyConfig::load(p)?,
        None => StudyConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    if let Some(f) = cli.format {
        cfg.output.format = f.into();
    }
    Ok(cfg)
}

fn stats_list(s: &[Statistics]) -> Vec<Statistics> {
    if s.is_empty() {
        vec![Statistics::Bose, Statistics::Fermi]
    } else {
        s.to_vec()
    }
}

fn run(cli: &Cli) -> diamag::Result<bool> {
    match &cli.cmd {
        Cmd::Pressure(a) => pressure(cli, a),
        Cmd::Chi(a) => chi(cli, a),
        Cmd::Converge => study(cli, harness::converge_study),
        Cmd::Bounds => study(cli, harness::uniform_bound_scan),
        Cmd::Verify { names, list } => {
            if *list {
                for n in harness::check_names() {
                    println!("{n}");
                }
                return Ok(true);
            }
            let sel: Vec<String> = if names.is_empty() { vec!["all".into()] } else { names.clone() };
            let report = harness::verify_suite(&sel)?;
            print!("{}", report.summary());
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("verify.json"), report.to_json()?)?;
            }
            Ok(report.passed)
        }
        Cmd::Kernels { order, kind } => kernels(cli, *order, *kind),
        Cmd::Config { reference, json } => {
            if *reference {
                print!("{}", harness::config::reference_page());
            } else {
                let cfg = load_config(cli)?;
                cfg.validate()?;
                print!("{}", if *json { cfg.to_json()? + "\n" } else { cfg.to_toml()? });
            }
            Ok(true)
        }
    }
}

fn study(cli: &Cli, f: fn(&StudyConfig) -> diamag::Result<StudyResult>) -> diamag::Result<bool> {
    let cfg = load_config(cli)?;
    let res = f(&cfg)?;
    print!("{}", res.summary());
    for p in res.write(&cfg.output.dir, cfg.output.format)? {
        eprintln!("wrote {}", p.display());
    }
    Ok(res.passed())
}

struct Row {
    stats: Statistics,
    z: Complex64,
    value: Complex64,
    error: f64,
    method: String,
}

fn print_rows(label: &str, rows: &[Row]) {
    println!("{:<6} {:>10} {:>10} {:>24} {:>24} {:>10} {}", "stats", "re z", "im z", format!("re {label}"), format!("im {label}"), "error", "method");
    for r in rows {
        println!(
            "{:<6} {:>10} {:>10} {:>24.16e} {:>24.16e} {:>10.2e} {}",
            r.stats.name(),
            r.z.re,
            r.z.im,
            r.value.re,
            r.value.im,
            r.error,
            r.method
        );
    }
}

fn finite_box(a: &PointArgs, side: f64) -> diamag::Result<FiniteBox> {
    FiniteBox::new(BoxGrid::new(side, a.n, 2)?, a.beta)
}

fn pressure(cli: &Cli, a: &PointArgs) -> diamag::Result<bool> {
    let mut rows = Vec::new();
    let mut chi_rows = Vec::new();
    let spec = match a.side {
        Some(l) => Some(finite_box(a, l)?.spectrum(a.omega)?),
        None => None,
    };
    let contour = match (&spec, a.contour) {
        (Some(s), true) => Some(build_contour(&FugacityCompact::new(a.z.clone())?, a.beta, s.ground().unwrap_or(0.0), None, 256)?),
        _ => None,
    };
    for stats in stats_list(&a.stats) {
        for &z in &a.z {
            let p = ThermoParams::new(a.beta, a.omega, stats, z)?;
            let (value, error, method) = match (&spec, &contour) {
                (None, _) => {
                    let s = pressure_bulk(&p, diamag::bulk::LEVEL_TOL)?;
                    (s.value, s.tail_bound, "landau_sum")
                }
                (Some(s), Some(c)) => (pressure_contour(s, &p, c)?, 0.0, "contour"),
                (Some(s), None) => (pressure_eigsum(s, &p)?.value, 0.0, "eigsum"),
            };
            if let Some(l) = a.side {
                let chi = FiniteChi { value, error_estimate: error, method: ChiMethod::EigFd, order: 0, step: 0.0 };
                chi_rows.push(ChiRow { method: method.to_string(), ..ChiRow::new(l, &p, &chi) });
            }
            rows.push(Row { stats, z, value, error, method: method.to_string() });
        }
    }
    print_rows("P", &rows);
    write_point_rows(cli, "pressure", &rows, &chi_rows, a)?;
    Ok(true)
}

fn chi(cli: &Cli, a: &ChiArgs) -> diamag::Result<bool> {
    if a.order == 0 {
        return Err(Error::Config("use `pressure` for N = 0".into()));
    }
    let pa = &a.point;
    let mut rows = Vec::new();
    let mut chi_rows = Vec::new();
    let bx = match pa.side {
        Some(l) => Some(finite_box(pa, l)?),
        None => None,
    };
    for stats in stats_list(&pa.stats) {
        for &z in &pa.z {
            let p = ThermoParams::new(pa.beta, pa.omega, stats, z)?;
            match &bx {
                None => {
                    let m = if a.bulk_fd { BulkMethod::FiniteDiff } else { BulkMethod::Analytic };
                    let s = susceptibility_bulk(&p, a.order, m)?;
                    let name = if a.bulk_fd { "bulk_fd" } else { "bulk_analytic" };
                    rows.push(Row { stats, z, value: s.value, error: s.error_estimate, method: name.into() });
                }
                Some(b) => {
                    let c = susceptibility_finite(b, &p, a.order, a.method, &FdOptions::default())?;
                    chi_rows.push(ChiRow::new(b.side(), &p, &c));
                    rows.push(Row { stats, z, value: c.value, error: c.error_estimate, method: c.method.name().into() });
                }
            }
        }
    }
    print_rows(&format!("chi^{}", a.order), &rows);
    write_point_rows(cli, "chi", &rows, &chi_rows, pa)?;
    Ok(true)
}

#[derive(serde::Serialize)]
struct JsonRow {
    stats: Statistics,
    z: Complex64,
    value: Complex64,
    error_estimate: f64,
    method: String,
}

fn write_point_rows(cli: &Cli, stem: &str, rows: &[Row], chi_rows: &[ChiRow], a: &PointArgs) -> diamag::Result<()> {
    let Some(dir) = &cli.out else { return Ok(()) };
    std::fs::create_dir_all(dir)?;
    let fmt: OutputFormat = cli.format.map(Into::into).unwrap_or_default();
    let path = match fmt {
        OutputFormat::Json => {
            let js: Vec<JsonRow> = rows
                .iter()
                .map(|r| JsonRow { stats: r.stats, z: r.z, value: r.value, error_estimate: r.error, method: r.method.clone() })
                .collect();
            let p = dir.join(format!("{stem}.json"));
            std::fs::write(&p, serde_json::to_string_pretty(&serde_json::json!({
                "beta": a.beta, "omega": a.omega, "side": a.side, "n": a.n, "rows": js
            }))?)?;
            p
        }
        OutputFormat::Csv if !chi_rows.is_empty() => {
            let p = dir.join(format!("{stem}.csv"));
            write_chi_csv(chi_rows, std::fs::File::create(&p)?)?;
            p
        }
        OutputFormat::Csv => {
            let p = dir.join(format!("{stem}.csv"));
            let mut w = csv::Writer::from_path(&p).map_err(Error::from)?;
            w.write_record(["beta", "omega", "stats", "re_z", "im_z", "re", "im", "error_estimate", "method"]).map_err(Error::from)?;
            for r in rows {
                w.write_record([
                    a.beta.to_string(),
                    a.omega.to_string(),
                    r.stats.name().to_string(),
                    r.z.re.to_string(),
                    r.z.im.to_string(),
                    r.value.re.to_string(),
                    r.value.im.to_string(),
                    r.error.to_string(),
                    r.method.clone(),
                ])
                .map_err(Error::from)?;
            }
            w.flush()?;
            p
        }
    };
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn kernels(cli: &Cli, order: Option<usize>, kind: KernelKind) -> diamag::Result<bool> {
    let cfg = load_config(cli)?;
    let lab = &cfg.lab;
    lab.validate()?;
    let order = order.unwrap_or(lab.max_order);
    let grid = BoxGrid::new(lab.side, lab.n, 2)?;
    let ctx = HeatContext::new(grid, lab.beta, lab.omega0)?;
    let opts = ExpansionOptions { rule_single: lab.rule_single, rule_nested: lab.rule_nested, fd_steps: lab.fd_steps.clone() };
    let terms = DuhamelTerms::compute(&ctx, order, &lab.dw_samples, &opts)?;
    let mut reports: Vec<ExpansionReport> = Vec::new();
    if kind != KernelKind::Resolvent {
        reports.push(semigroup_expansion_from(&ctx, &terms, &opts)?);
    }
    if kind != KernelKind::Semigroup {
        let e0 = ctx.eigensystem().values[0];
        let z = lab.z();
        let k = FugacityCompact::new(vec![z])?;
        let radius = build_contour(&k, lab.beta, e0, None, 8)?.radius;
        let p = LabPoint { xi: Complex64::from_polar(radius, lab.xi_angle), z };
        reports.push(g_expansion_trace_from(&ctx, &p, &terms, &opts)?);
    }
    let dir: &Path = &cfg.output.dir;
    std::fs::create_dir_all(dir)?;
    for r in &reports {
        println!("{} expansion, N = {}, L = {}, n = {}", r.kind, r.order, r.side, r.n);
        for (j, c) in r.coefficients.iter().enumerate() {
            println!("  a_{} = {:.10e} {:+.10e}i", j + 1, c.re, c.im);
        }
        for s in &r.remainder {
            println!("  dw = {:<8} remainder = {:.6e}", s.delta_omega, s.norm);
        }
        if let Some(s) = &r.slope {
            println!("  slope = {:.4}, 95% interval [{:.4}, {:.4}]", s.slope, s.ci95.0, s.ci95.1);
        }
        if let Some(s) = &r.trace_slope {
            println!("  trace slope = {:.4}", s.slope);
        }
        if let Some(c) = &r.cross_check {
            for (j, d) in c.relative_differences.iter().enumerate() {
                println!("  {}! a_{} vs differenced trace: relative difference {:.3e}", j + 1, j + 1, d);
            }
        }
        let p = dir.join(format!("kernels_{}_N{}.json", r.kind, r.order));
        std::fs::write(&p, r.to_json()?)?;
        eprintln!("wrote {}", p.display());
    }
    Ok(true)
}
