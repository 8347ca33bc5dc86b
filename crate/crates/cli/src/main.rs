use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use svmpath_core::construct::{
    choose_stretch, generate_2d_arc_instance, Construction, StretchFactor,
};
use svmpath_core::exact_geometry::{format_rational, parse_rational, to_decimal, Rational};
use svmpath_core::goldfarb::{GoldfarbParams, Shadow};
use svmpath_core::io::{csv_report, parse_instance, serialize_instance, shadow_svg, ReportFile};
use svmpath_core::qp::nu_from_mu;
use svmpath_core::sweep::sweep_grid_refined;
use svmpath_core::verify::{verify_instance, VerifyError};
use svmpath_core::SvmInstance;

/// Largest dimension drawn by `shadow-svg`; the hull has `2^d` vertices.
const MAX_SVG_DIM: usize = 12;

#[derive(Parser)]
#[command(
    name = "svmpath",
    version,
    about = "Exact worst-case SVM regularization paths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the instance from a Goldfarb cube and write it to a file.
    Gen {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "1/3")]
        eps: String,
        #[arg(long, default_value = "1/16")]
        gamma: String,
        /// A rational `L`, or `auto` to search from 20000 upward.
        #[arg(long, default_value = "auto")]
        stretch: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the planar arc demo instance.
    GenArc {
        #[arg(long, default_value_t = 20)]
        n_plus: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-derive and certify every breakpoint of a generated instance.
    Verify { instance: PathBuf },
    /// Solve on a grid of mu values and count support-set changes.
    Sweep {
        instance: PathBuf,
        #[arg(long, default_value = "4/5")]
        mu_lo: String,
        #[arg(long, default_value = "1")]
        mu_hi: String,
        #[arg(long, default_value_t = 512)]
        steps: usize,
        #[arg(long, default_value_t = 6)]
        refine: u32,
        #[arg(long)]
        out: PathBuf,
        /// Also write rounded decimals to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        precision: usize,
    },
    /// Draw the shadow polygon of the cube as SVG.
    ShadowSvg {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "1/3")]
        eps: String,
        #[arg(long, default_value = "1/16")]
        gamma: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Exit status 1: the input was read but did not verify.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn rational_arg(name: &str, value: &str) -> anyhow::Result<Rational> {
    parse_rational(value)
        .map_err(|_| anyhow!("--{name} expects a rational like 1/3, got {value:?}"))
}

fn params(d: usize, eps: &str, gamma: &str) -> anyhow::Result<GoldfarbParams> {
    Ok(GoldfarbParams::new(
        d,
        rational_arg("eps", eps)?,
        rational_arg("gamma", gamma)?,
    )?)
}

fn read_instance(path: &Path) -> anyhow::Result<SvmInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_gen(d: usize, eps: &str, gamma: &str, stretch: &str, out: &Path) -> anyhow::Result<()> {
    let params = params(d, eps, gamma)?;
    if d < 2 {
        bail!("d must be at least 2, got {d}");
    }
    if d == 2 {
        eprintln!("warning: d = 2 gives a single breakpoint");
    }
    let stretch = if stretch == "auto" {
        choose_stretch(&params)?
    } else {
        StretchFactor::new(rational_arg("stretch", stretch)?)?
    };
    let construction = Construction::build(&params, &stretch)?;
    write(out, &serialize_instance(&construction.instance))?;
    let mu_bar = &construction.calibration.mu_bar;
    println!("n = {}", construction.instance.n());
    println!(
        "support sets (2^d/4) = {}",
        construction.instance.support_lower_bound()
    );
    println!("L = {}", format_rational(stretch.l()));
    println!(
        "mu_bar = {} (~{})",
        format_rational(mu_bar),
        to_decimal(mu_bar, 12)
    );
    Ok(())
}

fn cmd_verify(path: &Path) -> anyhow::Result<()> {
    let instance = read_instance(path)?;
    match verify_instance(&instance) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary)?);
            if !summary.passed() {
                return Err(VerificationFailed(format!(
                    "{} distinct support sets, expected {}",
                    summary.distinct_support_sets, summary.lower_bound
                ))
                .into());
            }
            eprintln!("verified {} certificates", summary.certificates);
            Ok(())
        }
        Err(VerifyError::NotConstructed) => bail!("{} has no Goldfarb header", path.display()),
        Err(e) => Err(VerificationFailed(e.to_string()).into()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    path: &Path,
    mu_lo: &str,
    mu_hi: &str,
    steps: usize,
    refine: u32,
    out: &Path,
    csv: Option<&Path>,
    precision: usize,
) -> anyhow::Result<()> {
    let instance = read_instance(path)?;
    let (lo, hi) = (rational_arg("mu-lo", mu_lo)?, rational_arg("mu-hi", mu_hi)?);
    let report = sweep_grid_refined(&instance, &lo, &hi, steps, refine)?;
    let file = ReportFile::new(&instance, &report);
    write(out, &file.to_json())?;
    if let Some(csv) = csv {
        write(csv, &csv_report(&file, precision)?)?;
    }
    let n = instance.n();
    println!("records = {}", report.records.len());
    println!(
        "bends = {} (lower bound {})",
        report.bend_count, report.lower_bound
    );
    println!(
        "distinct positive support sets = {}",
        report.distinct_support_sets
    );
    println!(
        "nu range = [{}, {}]",
        to_decimal(&nu_from_mu(&hi, n)?, 12),
        to_decimal(&nu_from_mu(&lo, n)?, 12)
    );
    for pair in report
        .records
        .windows(2)
        .filter(|w| w[0].support != w[1].support)
    {
        println!(
            "change between nu = {} and nu = {}",
            to_decimal(&nu_from_mu(&pair[0].mu, n)?, 12),
            to_decimal(&nu_from_mu(&pair[1].mu, n)?, 12)
        );
    }
    Ok(())
}

fn cmd_shadow_svg(d: usize, eps: &str, gamma: &str, out: &Path) -> anyhow::Result<()> {
    if !(2..=MAX_SVG_DIM).contains(&d) {
        bail!("shadow-svg needs 2 <= d <= {MAX_SVG_DIM}, got {d}");
    }
    let shadow = Shadow::new(&params(d, eps, gamma)?)?;
    let title = format!(
        "Shadow of the Goldfarb cube, d = {d}: {} vertices",
        shadow.vertex_count()
    );
    write(out, &shadow_svg(shadow.polygon(), &title))?;
    println!("{} vertices", shadow.vertex_count());
    Ok(())
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("SVMPATH_THREADS") {
        let threads: usize = value
            .parse()
            .map_err(|_| anyhow!("SVMPATH_THREADS must be a positive integer, got {value:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Gen {
            d,
            eps,
            gamma,
            stretch,
            out,
        } => cmd_gen(d, &eps, &gamma, &stretch, &out),
        Command::GenArc { n_plus, out } => {
            let instance = generate_2d_arc_instance(n_plus)?;
            write(&out, &serialize_instance(&instance))?;
            println!("n = {}", instance.n());
            println!(
                "support-set changes expected >= {}",
                instance.support_lower_bound()
            );
            Ok(())
        }
        Command::Verify { instance } => cmd_verify(&instance),
        Command::Sweep {
            instance,
            mu_lo,
            mu_hi,
            steps,
            refine,
            out,
            csv,
            precision,
        } => cmd_sweep(
            &instance,
            &mu_lo,
            &mu_hi,
            steps,
            refine,
            &out,
            csv.as_deref(),
            precision,
        ),
        Command::ShadowSvg { d, eps, gamma, out } => cmd_shadow_svg(d, &eps, &gamma, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<VerificationFailed>() => {
            eprintln!("verification failed: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
