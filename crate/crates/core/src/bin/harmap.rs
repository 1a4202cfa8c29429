use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use harmap::bounds::{envelope_csv, make_extremal, ExtremalKind};
use harmap::constructions::{
    build, certified_convolution, convex_catalog, convolution_transform, herglotz_check, spec_condition,
    ConstructionSpec, ConvexCatalog, Family,
};
use harmap::membership::{
    coefficient_margin_with, derivative_bound_check_with, grid_sup_certificate_with, injectivity_scan,
    lambda_sweep_with, sense_preserving_certificate, DEFAULT_LAMBDA_COUNT, DEFAULT_TOLERANCE,
};
use harmap::params::{classify, FormulaMode};
use harmap::render::{render_to_file, RenderFormat, RenderSpec};
use harmap::report::Report;
use harmap::specfun::{gauss_value, lemma_sum, HypergeometricParams, LemmaKind};
use harmap::verify::{self, Suite};
use harmap::{AnalyticSeries, ClassParams, Error, GridSpec, HarmonicMap};

/// Certificates and constructions for harmonic maps of the unit disk.
///
/// Exit codes: 0 when every reported certificate passes, 1 when a
/// mathematical check fails, 2 on input or usage errors.
#[derive(Parser)]
#[command(name = "harmap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the membership certificates on a map file.
    Check {
        map: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Build a map and write it as JSON.
    Construct {
        #[command(subcommand)]
        what: ConstructCommand,
    },
    /// Run the seeded property suites.
    Verify {
        /// series, params, membership, bounds, specfun, constructions or all
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw the images of circles and rays under a map.
    Render {
        map: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
        /// svg or ppm
        #[arg(long, default_value = "svg")]
        format: String,
        #[arg(long, default_value_t = 8)]
        circles: usize,
        #[arg(long, default_value_t = 16)]
        rays: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Image side in pixels.
        #[arg(long, default_value_t = 512)]
        size: usize,
    },
    /// Regime thresholds for (alpha, beta).
    Classify {
        #[command(flatten)]
        class: ClassArgs,
        /// Use the threshold formulas exactly as printed in the literature.
        #[arg(long)]
        literal: bool,
    },
    /// Growth envelope table as CSV.
    Envelope {
        #[command(flatten)]
        class: ClassArgs,
        /// Comma-separated radii in [0, 1).
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 0.75, 0.9, 0.99])]
        radii: Vec<f64>,
    },
    /// Convolve a map with a convex test function and certify the result.
    Convolve {
        map: PathBuf,
        /// half_plane, log_map, or a JSON file with an analytic coefficient list
        #[arg(long)]
        phi: String,
        /// Rotation angle mu of lambda = e^{i mu}.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Gauss value F(a, b; c; 1).
    Gauss {
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Closed form of a weighted sum of the Gauss series next to its oracle.
    Lemma {
        /// a, b or c
        kind: String,
        #[command(flatten)]
        hyper: HyperArgs,
    },
}

#[derive(Subcommand)]
enum ConstructCommand {
    /// The exact member z + k (z^2 - conj(z)^2).
    Theta {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sharpness witnesses: coeff_analytic, coeff_coanalytic, growth_analytic, growth_coanalytic, theta.
    Extremal {
        kind: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Hypergeometric maps f1, f2, f3.
    Hyper {
        /// f1, f2 or f3
        family: String,
        #[command(flatten)]
        hyper: HyperArgs,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Polynomial maps F1, F2, F3 (a = b = -m).
    Poly {
        /// F1, F2 or F3
        family: String,
        #[arg(long)]
        m: u32,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct ClassArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    beta: f64,
}

impl ClassArgs {
    fn params(self) -> Result<ClassParams, Error> {
        ClassParams::new(self.alpha, self.beta)
    }
}

#[derive(Args, Clone, Copy)]
struct HyperArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
}

impl HyperArgs {
    fn params(self) -> Result<HypergeometricParams, Error> {
        HypergeometricParams::new(self.a, self.b, self.c)
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated grid radii in (0, 1].
    #[arg(long, value_delimiter = ',')]
    grid_radii: Option<Vec<f64>>,
    #[arg(long)]
    grid_angles: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_COUNT)]
    lambda_count: usize,
    /// Re-truncate (or pad) the map to this degree before checking.
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

impl SweepArgs {
    fn grid(&self) -> Result<GridSpec, Error> {
        let default = GridSpec::default();
        let radii = self.grid_radii.clone().unwrap_or_else(|| default.radii().to_vec());
        GridSpec::new(radii, self.grid_angles.unwrap_or(default.angles_per_circle()))
    }
}

/// Failure of a command: usage problems exit with 2.
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Usage> {
    Err(Usage(msg.into()))
}

fn read_map(path: &Path) -> Result<HarmonicMap, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    HarmonicMap::from_json(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn artifact_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn finish(report: &Report) -> u8 {
    println!("{}", report.to_json());
    u8::from(!report.all_passed())
}

fn check(map: &Path, class: ClassArgs, sweep: &SweepArgs) -> Result<u8, Usage> {
    let mut f = read_map(map)?;
    let p = class.params()?;
    let grid = sweep.grid()?;
    if !(sweep.tolerance >= 0.0 && sweep.tolerance.is_finite()) {
        return usage("tolerance must be a finite nonnegative number");
    }
    if let Some(n) = sweep.truncation {
        if n < 1 {
            return usage("truncation must be at least 1");
        }
        f = HarmonicMap::new(f.h().with_degree(n), f.g().with_degree(n))?;
    }
    let tol = sweep.tolerance;
    let mut report = Report::new(artifact_name(map), Some(p));
    if f.is_h0() {
        report.push(coefficient_margin_with(&f, &p, tol)?);
    }
    let sup = grid_sup_certificate_with(&f, &p, &grid, tol);
    let member = sup.passed;
    report.push(sup);
    report.push(lambda_sweep_with(&f, &p, &grid, sweep.lambda_count, tol)?);
    report.push(sense_preserving_certificate(&f, &grid));
    if member {
        report.push(derivative_bound_check_with(&f, &p, &grid, sweep.lambda_count, tol)?);
    }
    report.push(injectivity_scan(&f, &grid));
    println!("{}", report.to_json());
    // membership is decided by the grid sup alone; the others are diagnostics
    Ok(u8::from(!member))
}

fn write_map(f: &HarmonicMap, output: Option<&Path>, report: &mut Report) -> Result<(), Usage> {
    match output {
        Some(path) => {
            std::fs::write(path, f.to_json() + "\n")
                .map_err(|e| Usage(format!("cannot write {}: {e}", path.display())))?;
            report.set("output", path.display().to_string());
        }
        None => {
            report.set("map", f);
        }
    }
    Ok(())
}

fn parse_family(s: &str, poly: bool) -> Result<Family, Usage> {
    let names = if poly { ["F1", "F2", "F3"] } else { ["f1", "f2", "f3"] };
    names
        .iter()
        .position(|n| *n == s)
        .map(|i| Family::ALL[i])
        .ok_or_else(|| Usage(format!("unknown family `{s}`, expected one of {}", names.join(", "))))
}

fn construct(what: ConstructCommand) -> Result<u8, Usage> {
    let (spec, class, output, artifact) = match what {
        ConstructCommand::Theta { class, output } => {
            return construct_extremal(ExtremalKind::Theta, 2, class, output, "theta");
        }
        ConstructCommand::Extremal { kind, n, class, output } => {
            let parsed: ExtremalKind = kind.parse()?;
            return construct_extremal(parsed, n, class, output, &kind);
        }
        ConstructCommand::Hyper { family, hyper, class, truncation, output } => {
            let mut spec = ConstructionSpec::hyper(parse_family(&family, false)?, hyper.params()?, class.params()?);
            spec.truncation = truncation;
            (spec, class, output, format!("hyper_{family}"))
        }
        ConstructCommand::Poly { family, m, c, class, output } => {
            let spec = ConstructionSpec::poly(parse_family(&family, true)?, m, c, class.params()?)?;
            (spec, class, output, format!("poly_{family}"))
        }
    };
    let p = class.params()?;
    let f = build(&spec)?;
    let mut report = Report::new(artifact, Some(p));
    report.push(coefficient_margin_with(&f, &p, DEFAULT_TOLERANCE)?);
    match spec_condition(&spec) {
        Ok(condition) => report.construction = Some(condition),
        Err(e) => {
            report.set("condition_skipped", e.to_string());
        }
    }
    report.set("spec", &spec);
    write_map(&f, output.as_deref(), &mut report)?;
    Ok(finish(&report))
}

fn construct_extremal(
    kind: ExtremalKind,
    n: usize,
    class: ClassArgs,
    output: Option<PathBuf>,
    artifact: &str,
) -> Result<u8, Usage> {
    let p = class.params()?;
    let f = make_extremal(kind, n, &p)?;
    let mut report = Report::new(artifact, Some(p));
    report.push(coefficient_margin_with(&f, &p, DEFAULT_TOLERANCE)?);
    write_map(&f, output.as_deref(), &mut report)?;
    Ok(finish(&report))
}

fn render(map: &Path, output: &Path, spec: RenderSpec) -> Result<u8, Usage> {
    let f = read_map(map)?;
    let summary = render_to_file(&f, &spec, output).map_err(|e| match e {
        Error::Io(io) => Usage(format!("cannot write {}: {io}", output.display())),
        other => Usage(other.to_string()),
    })?;
    let mut report = Report::new(artifact_name(map), None);
    report.set("output", output.display().to_string());
    report.set("render", spec);
    report.set("boundary_length", summary.boundary_length);
    println!("{}", report.to_json());
    Ok(0)
}

fn convolve(map: &Path, phi: &str, mu: f64, class: ClassArgs, output: Option<&Path>) -> Result<u8, Usage> {
    let f = read_map(map)?;
    let p = class.params()?;
    let grid = GridSpec::default();
    let lambda = Complex64::from_polar(1.0, mu);
    let (g, herglotz) = match phi.parse::<ConvexCatalog>() {
        // catalog functions are convex; the long truncation only documents it
        Ok(kind) => {
            let cert = herglotz_check(&convex_catalog(kind, 16384)?, &grid);
            (convolution_transform(&f, &convex_catalog(kind, f.degree().max(2))?, lambda)?, cert)
        }
        Err(_) => {
            let text = std::fs::read_to_string(phi).map_err(|e| Usage(format!("cannot read {phi}: {e}")))?;
            let series: AnalyticSeries = serde_json::from_str(&text).map_err(|e| Usage(format!("{phi}: {e}")))?;
            match certified_convolution(&f, &series, lambda, &grid) {
                Ok(pair) => pair,
                Err(e) => {
                    let mut report = Report::new(format!("{}_conv", artifact_name(map)), Some(p));
                    report.push(herglotz_check(&series, &grid));
                    report.set("rejected", e.to_string());
                    return Ok(finish(&report));
                }
            }
        }
    };
    let mut report = Report::new(format!("{}_conv", artifact_name(map)), Some(p));
    report.push(herglotz);
    report.push(grid_sup_certificate_with(&g, &p, &grid, DEFAULT_TOLERANCE));
    write_map(&g, output, &mut report)?;
    Ok(finish(&report))
}

fn run(cli: Cli) -> Result<u8, Usage> {
    match cli.command {
        Command::Check { map, class, sweep } => check(&map, class, &sweep),
        Command::Construct { what } => construct(what),
        Command::Verify { suite, seed } => {
            let suite: Suite = suite.parse()?;
            let summary = verify::run(suite, seed);
            println!("{}", summary.to_json());
            Ok(u8::from(!summary.passed))
        }
        Command::Render { map, output, format, circles, rays, samples, size } => {
            let format: RenderFormat = format.parse()?;
            let mut spec = RenderSpec::new(circles, rays, samples, format)?;
            spec.size = size;
            spec.validate()?;
            render(&map, &output, spec)
        }
        Command::Classify { class, literal } => {
            let mode = if literal { FormulaMode::Literal } else { FormulaMode::Continuous };
            let report = classify(&class.params()?, mode);
            println!("{}", serde_json::to_string_pretty(&report).expect("serializes"));
            Ok(0)
        }
        Command::Envelope { class, radii } => {
            print!("{}", envelope_csv(&class.params()?, &radii)?);
            Ok(0)
        }
        Command::Convolve { map, phi, mu, class, output } => convolve(&map, &phi, mu, class, output.as_deref()),
        Command::Gauss { hyper } => {
            let p = hyper.params()?;
            let value = gauss_value(&p)?;
            println!("{}", serde_json::json!({ "params": p, "value": value }));
            Ok(0)
        }
        Command::Lemma { kind, hyper } => {
            let kind: LemmaKind = kind.parse()?;
            let check = lemma_sum(kind, &hyper.params()?)?;
            println!("{}", serde_json::to_string_pretty(&check).expect("serializes"));
            Ok(u8::from(check.rel_gap().is_nan() || check.rel_gap() > 1e-8))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
