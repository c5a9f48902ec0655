//! Command-line driver: exact analysis of rational point configurations
//! in P^2 and P^3. Sources are built-in catalog names (they win) or point
//! files; all randomness is seeded and reproducible.

use clap::{Parser, Subcommand, ValueEnum};
use conelab::analysis::{
    classify_cc2, cone_property, project_general, projection_ci_property, GenericityProtocol,
};
use conelab::catalog;
use conelab::geometry::{collinear_subsets, detect_grid, PointConfig};
use conelab::ideals::{h_vector, hilbert_function};
use conelab::report::{self, format_point_file, AnalysisRequest, OutputFormat, Source};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "conelab",
    version,
    about = "Exact analysis of point configurations: cones through a general vertex, \
             projections to the plane, grid structure, and collinearity"
)]
struct Cli {
    /// Seed for every randomized genericity check.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Independent trials per genericity check.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,

    /// Coordinate height of sampled points.
    #[arg(long, global = true, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    height: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: cone table, grid detection, projection type, h-vector.
    Analyze {
        /// Catalog name or point-file path.
        source: String,
        /// Smallest cone degree.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        dmin: u32,
        /// Largest cone degree.
        #[arg(long, default_value_t = 6)]
        dmax: u32,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Exit 3 when trials disagree anywhere.
        #[arg(long)]
        strict: bool,
        /// Try only this complete intersection type, as "a,b".
        #[arg(long = "type", value_parser = parse_type_pair)]
        type_hint: Option<(u32, u32)>,
    },
    /// Hilbert function and h-vector.
    Hilbert { source: String },
    /// Search for a grid structure.
    Grid { source: String },
    /// Project from a general point and certify the image as a complete
    /// intersection.
    Project {
        source: String,
        /// Trial whose projected points --emit-points prints.
        #[arg(long, default_value_t = 0)]
        trial: u32,
        /// Try only this type, as "a,b", instead of scanning factorizations.
        #[arg(long = "type", value_parser = parse_type_pair)]
        type_hint: Option<(u32, u32)>,
        /// Also print the projected configuration in point-file format.
        #[arg(long)]
        emit_points: bool,
    },
    /// Census of maximal collinear subsets.
    Collinear {
        source: String,
        /// Smallest subset size to report.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
        min_size: u64,
    },
    /// Test membership in the two-skew-lines family that characterizes
    /// unexpected quadric cones.
    Cc2 { source: String },
    /// Cone defect (actual minus expected dimension) at one degree.
    Defect {
        source: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
    },
    /// List the built-in configurations.
    Catalog,
    /// Run the full verification suite over the built-in configurations.
    VerifyAppendix,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

fn parse_type_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| "expected two degrees as a,b".to_string())?;
    let a: u32 = a.trim().parse().map_err(|_| "invalid first degree".to_string())?;
    let b: u32 = b.trim().parse().map_err(|_| "invalid second degree".to_string())?;
    if a == 0 || b == 0 {
        return Err("degrees must be positive".into());
    }
    Ok((a, b))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(dispatch(cli) as u8)
}

fn dispatch(cli: Cli) -> i32 {
    let protocol = GenericityProtocol::new(cli.seed, cli.trials, cli.height);
    match cli.command {
        Command::Analyze { source, dmin, dmax, format, strict, type_hint } => {
            if dmin > dmax {
                eprintln!("error: --dmin must not exceed --dmax");
                return 2;
            }
            let request = AnalysisRequest {
                source: resolve_source(&source),
                dmin,
                dmax,
                protocol,
                format: format.into(),
                strict,
                type_hint,
            };
            let run = report::run(&request);
            if run.outcome.is_none() {
                eprint!("{}", run.rendered);
            } else {
                print!("{}", run.rendered);
            }
            run.exit_code
        }
        Command::Hilbert { source } => with_config(&source, |name, cfg| {
            println!("config: {name} ({} points, P^{})", cfg.len(), cfg.ambient_dim());
            let n = cfg.len();
            let mut hf = Vec::new();
            for t in 0..n as u32 {
                let h = hilbert_function(cfg, t);
                hf.push(h.to_string());
                if h == n {
                    break;
                }
            }
            println!("Hilbert function: {}", hf.join(" "));
            println!("h-vector: {}", h_vector(cfg));
            0
        }),
        Command::Grid { source } => with_config(&source, |name, cfg| {
            match detect_grid(cfg) {
                Some(w) => {
                    println!("{name}: ({}, {})-grid", w.a, w.b);
                    for line in &w.family_a {
                        println!("  first family line through points {:?}", line.member_indices);
                    }
                    for line in &w.family_b {
                        println!("  second family line through points {:?}", line.member_indices);
                    }
                }
                None => println!("{name}: not a grid for any factorization of {}", cfg.len()),
            }
            0
        }),
        Command::Project { source, trial, type_hint, emit_points } => {
            with_config(&source, |name, cfg| {
                let res = match projection_ci_property(cfg, &protocol, type_hint) {
                    Ok(res) => res,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return 2;
                    }
                };
                match res.type_pair {
                    Some((a, b)) => println!("CI type ({a},{b}), certified"),
                    None => println!("no CI type certified"),
                }
                for t in &res.trials {
                    match t.certified {
                        Some((a, b)) => println!("trial {}: certified ({a},{b})", t.trial),
                        None => println!("trial {}: not certified", t.trial),
                    }
                }
                if !res.consistent {
                    println!("warning: trials disagreed");
                }
                if emit_points {
                    match project_general(cfg, &protocol, trial as u64) {
                        Ok((center, _, image)) => {
                            let header =
                                format!("projection of {name}, trial {trial}, center {center}");
                            print!("{}", format_point_file(&image, &[&header]));
                        }
                        Err(e) => {
                            eprintln!("error: {e}");
                            return 2;
                        }
                    }
                }
                0
            })
        }
        Command::Collinear { source, min_size } => with_config(&source, |name, cfg| {
            let census = collinear_subsets(cfg, min_size as usize);
            for line in &census {
                println!("{} points on a line: {:?}", line.size(), line.member_indices);
            }
            println!(
                "{name}: {} maximal collinear subsets with at least {min_size} points",
                census.len()
            );
            0
        }),
        Command::Cc2 { source } => with_config(&source, |name, cfg| {
            let verdict = match classify_cc2(cfg) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            match &verdict {
                Some((l1, l2)) => println!(
                    "{name}: two skew lines carrying {} and {} points: {:?} and {:?}",
                    l1.size(),
                    l2.size(),
                    l1.member_indices,
                    l2.member_indices
                ),
                None => println!("{name}: not in the two-skew-lines family"),
            }
            match cone_property(cfg, 2, &protocol) {
                Ok(rep) => {
                    println!(
                        "C(2): actual {}, expected {}, unexpected: {}",
                        rep.actual_dim, rep.clamped_expected, rep.unexpected
                    );
                    if rep.unexpected != verdict.is_some() {
                        println!("warning: classification and cone count disagree");
                    }
                }
                Err(e) => println!("C(2): not computed ({e})"),
            }
            0
        }),
        Command::Defect { source, degree } => {
            with_config(&source, |name, cfg| match cone_property(cfg, degree, &protocol) {
                Ok(rep) => {
                    println!(
                        "{name}: C({degree}) defect {} (actual {}, expected {})",
                        rep.defect, rep.actual_dim, rep.expected_dim
                    );
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            })
        }
        Command::Catalog => match catalog::entries() {
            Ok(list) => {
                for e in list {
                    println!("{:<4} {:>2} points  {}", e.name, e.config.len(), e.description);
                }
                println!("(D4 is accepted as an alias for Z3; names are case-insensitive)");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Command::VerifyAppendix => match report::verify_appendix(&protocol) {
            Ok(checks) => {
                let mut failed = 0;
                for c in &checks {
                    let status = if c.passed { "ok  " } else { "FAIL" };
                    if c.detail.is_empty() {
                        println!("{status} {}", c.name);
                    } else {
                        println!("{status} {} ({})", c.name, c.detail);
                    }
                    if !c.passed {
                        failed += 1;
                    }
                }
                println!("{}/{} checks passed", checks.len() - failed, checks.len());
                if failed == 0 {
                    0
                } else {
                    3
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
    }
}

/// Catalog names win over file paths; a stray local file named like a
/// built-in configuration must be addressed by a qualified path.
fn resolve_source(s: &str) -> Source {
    if catalog::is_catalog_name(s) {
        Source::Catalog(s.to_string())
    } else {
        Source::File(PathBuf::from(s))
    }
}

fn with_config(source: &str, body: impl FnOnce(&str, &PointConfig) -> i32) -> i32 {
    match report::load_source(&resolve_source(source)) {
        Ok((name, cfg)) => body(&name, &cfg),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
