use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cr_enrich::elements::{FamilyConstants, Matrix3};
use cr_enrich::harness::{emit_csv, emit_plot_script, run_convergence, RunConfig};
use cr_enrich::verify::run_checks;
use cr_enrich::{Element, ElementSpec, Error};

#[derive(Parser)]
#[command(name = "cr-enrich", version, about = "Enriched Crouzeix-Raviart interpolation and convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure L1 interpolation errors and observed orders on a mesh sequence.
    Converge(ConvergeArgs),
    /// Run the invariant suite.
    Check,
    /// Print the matrices and constants of an element.
    Info {
        #[arg(long, default_value = "gn:2")]
        element: String,
        /// Functional triple for `--element custom`.
        #[arg(long)]
        custom: Option<String>,
        #[arg(long)]
        segment_order: Option<usize>,
    },
}

#[derive(Args)]
struct ConvergeArgs {
    /// key = value file applied before the other flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated test functions (f1..f4 or names given with --expr).
    #[arg(long)]
    functions: Option<String>,
    /// Comma-separated elements: cr, af3, gn:<gamma>, pn:<mu>, custom.
    #[arg(long)]
    elements: Option<String>,
    /// structured:4,8,16,32 or files:<stem>,<stem>,...
    #[arg(long)]
    mesh: Option<String>,
    #[arg(long)]
    quad_degree: Option<usize>,
    #[arg(long)]
    subdivide: bool,
    #[arg(long)]
    segment_order: Option<usize>,
    /// Functional triple for the `custom` element, e.g. midseg:2,median:1,vertex.
    #[arg(long)]
    custom: Option<String>,
    /// User test function as name=formula in x and y; repeatable.
    #[arg(long = "expr", value_name = "NAME=FORMULA")]
    exprs: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl ConvergeArgs {
    fn config(&self) -> cr_enrich::Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("functions", &self.functions),
            ("elements", &self.elements),
            ("mesh", &self.mesh),
            ("custom", &self.custom),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        if let Some(d) = self.quad_degree {
            config.quad_degree = d;
        }
        if let Some(n) = self.segment_order {
            config.segment_order = n;
        }
        if self.subdivide {
            config.subdivide = true;
        }
        for e in &self.exprs {
            let (name, formula) = e
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--expr expects NAME=FORMULA, got `{e}`")))?;
            config.set(&format!("expr.{}", name.trim()), formula)?;
        }
        if let Some(p) = &self.out {
            config.out = Some(p.clone());
        }
        if let Some(p) = &self.plot {
            config.plot = Some(p.clone());
        }
        Ok(config)
    }
}

fn converge(args: &ConvergeArgs) -> cr_enrich::Result<()> {
    let config = args.config()?;
    let report = run_convergence(&config)?;
    match &config.out {
        Some(path) => emit_csv(&report, path)?,
        None => print!("{}", report.to_csv()),
    }
    if let Some(path) = &config.plot {
        emit_plot_script(&report, path)?;
    }
    for function in report.functions() {
        for element in report.elements() {
            if let Ok(s) = report.slopes(function, element) {
                eprintln!("{function} {element}: least-squares order {:.3}", s.least_squares);
            }
        }
    }
    for row in report.failures() {
        eprintln!(
            "warning: {} {} on {} triangles failed: {}",
            row.function,
            row.element,
            row.n_triangles,
            row.failure.as_deref().unwrap_or("?")
        );
    }
    eprintln!(
        "config {} at {} (L1 errors are unnormalized integrals of |f - Pi f|)",
        report.metadata.config_hash, report.metadata.timestamp
    );
    Ok(())
}

fn print_matrix(name: &str, m: &Matrix3) {
    println!("{name} =");
    for row in &m.0 {
        println!("  [{:>24.16e} {:>24.16e} {:>24.16e}]", row[0], row[1], row[2]);
    }
}

fn info(element: &str, custom: Option<&str>, segment_order: Option<usize>) -> cr_enrich::Result<()> {
    let spec = ElementSpec::parse(element, custom)?;
    let element = match segment_order {
        Some(n) => Element::from_spec_with_order(&spec, n)?,
        None => Element::from_spec(&spec)?,
    };
    println!("element {}", element.label());
    println!("degree {}, {} degrees of freedom", element.degree(), element.n_dofs());
    let e = match &element {
        Element::Cr(_) => {
            println!("edge means only; no enriched functionals");
            return Ok(());
        }
        Element::Enriched(e) => e,
    };
    for (j, f) in e.functionals().iter().enumerate() {
        println!("F{j}: {f}");
    }
    print_matrix("N", e.n());
    print_matrix("N^-1", e.n_inv());
    println!("det N = {:.16e}", e.det());
    match e.closed_form() {
        Some(FamilyConstants::Gn(c)) => {
            println!("sigma = {:.16e}", c.sigma);
            println!("K = {:.16e}", c.k);
            println!("c = {:.16e}", c.c);
            println!("d = {:.16e}", c.d);
            println!("Delta = {:.16e}", c.delta);
            println!("det N (closed form) = {:.16e}", c.determinant());
        }
        Some(FamilyConstants::Pn(c)) => {
            println!("sigma = {:.16e}", c.sigma);
            println!("D = {:.16e}", c.d);
            println!("H = {:.16e}", c.h);
            println!("R = {:.16e}", c.r);
            println!("Q = {:.16e}", c.q);
            println!("Omega = {:.16e}", c.omega);
            println!("det N (closed form) = {:.16e}", c.determinant());
        }
        None => {}
    }
    Ok(())
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_validation() { 1 } else { 2 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    let result = match &cli.command {
        Command::Converge(args) => converge(args),
        Command::Info {
            element,
            custom,
            segment_order,
        } => info(element, custom.as_deref(), *segment_order),
        Command::Check => {
            let results = run_checks();
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} checks, {} failed", results.len(), failed);
            return if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => exit_for(&e),
    }
}
