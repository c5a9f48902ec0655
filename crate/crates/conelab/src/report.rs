//! Point-file I/O, analysis orchestration, and report rendering in text,
//! JSON, and CSV.
//!
//! The point-file format: UTF-8 text, one point per line, coordinates as
//! whitespace-separated rationals written `n` or `n/d` with `d > 0`.
//! Lines starting with `#` are comments, blank lines are skipped, and all
//! point lines must carry the same coordinate count (3 or 4).

use crate::analysis::{
    cone_table, projection_ci_property, sample_point, AnalysisError, ConeReport,
    GenericityProtocol, ProjectionCIResult,
};
use crate::catalog;
use crate::geometry::{
    apply_transform, collinear_subsets, detect_grid, GeometryError, GridWitness, PointConfig,
    ProjPoint,
};
use crate::ideals::{condition_matrix, h_vector, multiplicity_at};
use crate::linalg::Rational;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Catalog(#[from] catalog::CatalogError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Parses the point-file format into a canonicalized configuration.
pub fn parse_point_file(text: &str) -> Result<PointConfig, ReportError> {
    let mut points: Vec<ProjPoint> = Vec::new();
    let mut width: Option<usize> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords = line
            .split_whitespace()
            .map(|tok| {
                parse_rational(tok).map_err(|message| ReportError::Parse {
                    line: line_no,
                    message: format!("bad coordinate {tok:?}: {message}"),
                })
            })
            .collect::<Result<Vec<Rational>, _>>()?;
        if coords.len() != 3 && coords.len() != 4 {
            return Err(ReportError::Parse {
                line: line_no,
                message: format!("expected 3 or 4 coordinates, found {}", coords.len()),
            });
        }
        match width {
            None => width = Some(coords.len()),
            Some(w) if w != coords.len() => {
                return Err(ReportError::Parse {
                    line: line_no,
                    message: format!("coordinate count {} differs from earlier {w}", coords.len()),
                })
            }
            Some(_) => {}
        }
        let point = ProjPoint::new(coords).map_err(|_| ReportError::Parse {
            line: line_no,
            message: "all coordinates are zero".into(),
        })?;
        points.push(point);
    }
    if points.is_empty() {
        return Err(ReportError::Parse { line: last_line, message: "no points found".into() });
    }
    Ok(PointConfig::new(points)?)
}

fn parse_rational(tok: &str) -> Result<Rational, String> {
    match tok.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.parse().map_err(|_| "invalid numerator".to_string())?;
            let d: BigInt = den.parse().map_err(|_| "invalid denominator".to_string())?;
            if d <= BigInt::zero() {
                return Err("denominator must be positive".into());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = tok.parse().map_err(|_| "invalid integer".to_string())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Serializes a configuration back to the point-file format; `comments`
/// become leading `#` lines.
pub fn format_point_file(cfg: &PointConfig, comments: &[&str]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for p in cfg.points() {
        let _ = writeln!(out, "{p}");
    }
    out
}

/// Where a configuration comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Catalog(String),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

/// One full analysis run: what to load, which degrees, how to sample, and
/// how to render.
#[derive(Debug, Clone)]
pub struct AnalysisRequest {
    pub source: Source,
    pub dmin: u32,
    pub dmax: u32,
    pub protocol: GenericityProtocol,
    pub format: OutputFormat,
    pub strict: bool,
    pub type_hint: Option<(u32, u32)>,
}

/// Loads a configuration from a catalog name or a point file; returns the
/// display name alongside.
pub fn load_source(source: &Source) -> Result<(String, PointConfig), ReportError> {
    match source {
        Source::Catalog(name) => {
            let entry = catalog::named(name)?;
            Ok((entry.name.to_string(), entry.config))
        }
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ReportError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let cfg = parse_point_file(&text)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            Ok((name, cfg))
        }
    }
}

/// Everything computed for one configuration.
#[derive(Debug, Clone)]
pub struct AnalysisOutcome {
    pub name: String,
    pub cfg: PointConfig,
    pub cones: Vec<ConeReport>,
    pub grid: Option<GridWitness>,
    pub projection: ProjectionCIResult,
    pub h_vector: Vec<usize>,
}

impl AnalysisOutcome {
    /// Trials agreed everywhere.
    pub fn consistent(&self) -> bool {
        self.cones.iter().all(ConeReport::consistent) && self.projection.consistent
    }
}

/// Runs the full pipeline on one configuration.
pub fn analyze(
    name: &str,
    cfg: &PointConfig,
    dmin: u32,
    dmax: u32,
    protocol: &GenericityProtocol,
    type_hint: Option<(u32, u32)>,
) -> Result<AnalysisOutcome, AnalysisError> {
    let cones = cone_table(cfg, dmin, dmax, protocol)?;
    let grid = detect_grid(cfg);
    let projection = projection_ci_property(cfg, protocol, type_hint)?;
    let h = h_vector(cfg);
    Ok(AnalysisOutcome {
        name: name.to_string(),
        cfg: cfg.clone(),
        cones,
        grid,
        projection,
        h_vector: h.values,
    })
}

#[derive(Debug, Serialize)]
pub struct ConfigSummary {
    pub name: String,
    pub size: usize,
    pub ambient_dim: usize,
}

#[derive(Debug, Serialize)]
pub struct ConeRow {
    pub d: u32,
    pub actual: usize,
    pub expected: i64,
    pub clamped_expected: usize,
    pub unexpected: bool,
    pub defect: i64,
    pub trial_dims: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct GridSummary {
    pub a: usize,
    pub b: usize,
    pub family_a: Vec<Vec<usize>>,
    pub family_b: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize)]
pub struct ProjectionSummary {
    pub type_pair: Option<(u32, u32)>,
    pub consistent: bool,
    pub trials: Vec<Option<(u32, u32)>>,
}

/// The stable machine-readable report.
#[derive(Debug, Serialize)]
pub struct Report {
    pub config: ConfigSummary,
    pub cones: Vec<ConeRow>,
    pub grid: Option<GridSummary>,
    pub projection_ci: ProjectionSummary,
    pub h_vector: Vec<usize>,
}

impl AnalysisOutcome {
    pub fn to_report(&self) -> Report {
        Report {
            config: ConfigSummary {
                name: self.name.clone(),
                size: self.cfg.len(),
                ambient_dim: self.cfg.ambient_dim(),
            },
            cones: self
                .cones
                .iter()
                .map(|c| ConeRow {
                    d: c.degree,
                    actual: c.actual_dim,
                    expected: c.expected_dim,
                    clamped_expected: c.clamped_expected,
                    unexpected: c.unexpected,
                    defect: c.defect,
                    trial_dims: c.trial_dims.clone(),
                })
                .collect(),
            grid: self.grid.as_ref().map(|g| GridSummary {
                a: g.a,
                b: g.b,
                family_a: g.family_a.iter().map(|l| l.member_indices.clone()).collect(),
                family_b: g.family_b.iter().map(|l| l.member_indices.clone()).collect(),
            }),
            projection_ci: ProjectionSummary {
                type_pair: self.projection.type_pair,
                consistent: self.projection.consistent,
                trials: self.projection.trials.iter().map(|t| t.certified).collect(),
            },
            h_vector: self.h_vector.clone(),
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_report()).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Csv => render_csv(&self.cones),
            OutputFormat::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "config: {} ({} points, P^{})",
            self.name,
            self.cfg.len(),
            self.cfg.ambient_dim()
        );
        let _ = writeln!(out, "h-vector: ({})", join(&self.h_vector, ", "));
        out.push('\n');
        out.push_str(&render_cone_table_text(&self.cones));
        out.push('\n');
        match &self.grid {
            Some(g) => {
                let _ = writeln!(out, "grid: ({}, {})-grid detected", g.a, g.b);
            }
            None => {
                let _ = writeln!(out, "grid: none for any factorization of {}", self.cfg.len());
            }
        }
        match self.projection.type_pair {
            Some((a, b)) => {
                let _ = writeln!(
                    out,
                    "projection: certified complete intersection of type ({a}, {b}) in every trial"
                );
            }
            None => {
                let _ = writeln!(out, "projection: no complete intersection type certified");
            }
        }
        if !self.projection.consistent {
            let _ = writeln!(out, "warning: projection trials disagreed");
        }
        out
    }
}

/// Appendix-style cone table: one column per degree, rows for the actual
/// dimension, the clamped expectation, and the unexpectedness marker.
pub fn render_cone_table_text(cones: &[ConeReport]) -> String {
    let mut cols: Vec<Vec<String>> =
        vec![vec!["d".into()], vec!["dim".into()], vec!["expected".into()], vec![String::new()]];
    for c in cones {
        cols[0].push(c.degree.to_string());
        cols[1].push(c.actual_dim.to_string());
        cols[2].push(c.clamped_expected.to_string());
        cols[3].push(if c.unexpected { "unexp.".into() } else { String::new() });
    }
    let mut out = String::new();
    let label_w = 8;
    let cell_w =
        cols.iter().flat_map(|row| row.iter().skip(1)).map(String::len).max().unwrap_or(1).max(6);
    for row in &cols {
        let _ = write!(out, "{:<label_w$} |", row[0]);
        for cell in row.iter().skip(1) {
            let _ = write!(out, " {cell:>cell_w$}");
        }
        out.push('\n');
    }
    let mut notes = Vec::new();
    if cones.iter().any(|c| c.planar) {
        notes.push("note: planar configuration; cone counts carry no information".to_string());
    }
    for c in cones {
        if let Some(w) = &c.improper_witness {
            notes.push(format!(
                "note: C({}) is improper; covered by {} skew configuration lines",
                c.degree,
                w.len()
            ));
        }
        if !c.consistent() {
            notes.push(format!(
                "warning: trial disagreement at d = {}: dims {:?}",
                c.degree, c.trial_dims
            ));
        }
    }
    for n in notes {
        out.push_str(&n);
        out.push('\n');
    }
    out
}

fn render_csv(cones: &[ConeReport]) -> String {
    let mut out = String::from("d,actual,expected,clamped_expected,unexpected,defect,trial_dims\n");
    for c in cones {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.degree,
            c.actual_dim,
            c.expected_dim,
            c.clamped_expected,
            c.unexpected,
            c.defect,
            join(&c.trial_dims, ";")
        );
    }
    out
}

fn join<T: std::fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

/// Outcome of [`run`]: process exit code plus the rendered output.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub rendered: String,
    pub outcome: Option<AnalysisOutcome>,
}

/// Executes a full analysis request. Exit code 0 on success, 2 on input
/// errors, 3 when `strict` is set and trials disagreed.
pub fn run(request: &AnalysisRequest) -> RunOutcome {
    let (name, cfg) = match load_source(&request.source) {
        Ok(v) => v,
        Err(e) => {
            return RunOutcome { exit_code: 2, rendered: format!("error: {e}\n"), outcome: None }
        }
    };
    let outcome = match analyze(
        &name,
        &cfg,
        request.dmin,
        request.dmax,
        &request.protocol,
        request.type_hint,
    ) {
        Ok(o) => o,
        Err(e) => {
            return RunOutcome { exit_code: 2, rendered: format!("error: {e}\n"), outcome: None }
        }
    };
    let rendered = outcome.render(request.format);
    let exit_code = if request.strict && !outcome.consistent() { 3 } else { 0 };
    RunOutcome { exit_code, rendered, outcome: Some(outcome) }
}

/// One entry of the built-in verification suite.
#[derive(Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult { name, passed, detail }
    }
}

/// Runs every recorded fact about the built-in configurations: the F4 cone
/// table, the collinearity censuses, the projection types, grid absence,
/// the Z3/Z4 equivalence, the explicit quartic cones, and the negative
/// projection fixture. Returns one result per check.
pub fn verify_appendix(protocol: &GenericityProtocol) -> Result<Vec<CheckResult>, ReportError> {
    let f4 = catalog::named("F4")?.config;
    let z1 = catalog::named("Z1")?.config;
    let z2 = catalog::named("Z2")?.config;
    let z3 = catalog::named("Z3")?.config;
    let z4 = catalog::named("Z4")?.config;
    let b4 = catalog::named("B4")?.config;
    let mut checks = Vec::new();

    {
        let rows = cone_table(&f4, 3, 8, protocol)?;
        let actual: Vec<usize> = rows.iter().map(|r| r.actual_dim).collect();
        let clamped: Vec<usize> = rows.iter().map(|r| r.clamped_expected).collect();
        let unexpected: Vec<u32> = rows.iter().filter(|r| r.unexpected).map(|r| r.degree).collect();
        let passed = actual == [0, 1, 3, 7, 13, 21]
            && clamped == [0, 0, 0, 4, 12, 21]
            && unexpected == [4, 5, 6, 7];
        checks.push(CheckResult::new(
            "F4 cone dimensions for d = 3..8 match the recorded table",
            passed,
            format!("actual {actual:?}, expected {clamped:?}, unexpected at {unexpected:?}"),
        ));
    }

    {
        let q4 = collinear_subsets(&f4, 4);
        let t3 = collinear_subsets(&z3, 3);
        let q2 = collinear_subsets(&z2, 4);
        let passed = q4.len() == 18
            && q4.iter().all(|l| l.size() == 4)
            && t3.len() == 16
            && t3.iter().all(|l| l.size() == 3)
            && q2.len() == 4
            && q2.iter().all(|l| l.size() == 4);
        checks.push(CheckResult::new(
            "collinearity censuses: F4 has 18 quadruples, Z3 has 16 triples, Z2 has 4 quadruples",
            passed,
            format!("F4: {}, Z3: {}, Z2: {}", q4.len(), t3.len(), q2.len()),
        ));
    }

    {
        let cases: [(&str, &PointConfig, (u32, u32)); 5] = [
            ("F4", &f4, (4, 6)),
            ("Z1", &z1, (4, 5)),
            ("Z2", &z2, (4, 4)),
            ("Z3", &z3, (3, 4)),
            ("Z4", &z4, (3, 4)),
        ];
        let mut got = Vec::new();
        let mut passed = true;
        for (name, cfg, want) in cases {
            let res = projection_ci_property(cfg, protocol, None)?;
            passed &= res.consistent && res.type_pair == Some(want);
            got.push(format!("{name}: {:?}", res.type_pair));
        }
        checks.push(CheckResult::new(
            "general projections certify as complete intersections of the recorded types",
            passed,
            got.join(", "),
        ));
    }

    {
        let wrongly_gridded: Vec<&str> =
            [("F4", &f4), ("Z1", &z1), ("Z2", &z2), ("Z3", &z3), ("Z4", &z4)]
                .into_iter()
                .filter(|(_, cfg)| detect_grid(cfg).is_some())
                .map(|(name, _)| name)
                .collect();
        checks.push(CheckResult::new(
            "none of the built-in configurations is a grid",
            wrongly_gridded.is_empty(),
            wrongly_gridded.join(", "),
        ));
    }

    {
        let m = catalog::z3_z4_transform();
        let passed = apply_transform(&z4, &m).map(|img| img.same_point_set(&z3)).unwrap_or(false)
            && apply_transform(&z3, &m).map(|img| img.same_point_set(&z4)).unwrap_or(false);
        checks.push(CheckResult::new(
            "the involution exchanges Z3 and Z4 as point sets",
            passed,
            String::new(),
        ));
    }

    {
        let mut rng = protocol.stream("suite-quartic", 0);
        let mut fails = Vec::new();
        for k in 0..3u32 {
            let q = sample_point(&mut rng, protocol.height);
            match catalog::f4_quartic_cone(&q) {
                Err(e) => fails.push(format!("vertex {k}: {e}")),
                Ok(f) => {
                    let mult_ok = multiplicity_at(&f, &q) == Ok(4);
                    let vanish_ok = f4.points().iter().all(|p| f.evaluate(p).is_zero());
                    let kernel_ok = condition_matrix(&f4, 4, Some((&q, 4)))
                        .mul_vec(f.coeffs())
                        .iter()
                        .all(Rational::is_zero);
                    if !(mult_ok && vanish_ok && kernel_ok) {
                        fails.push(format!(
                            "vertex {k}: multiplicity ok {mult_ok}, vanishing ok {vanish_ok}, kernel ok {kernel_ok}"
                        ));
                    }
                }
            }
        }
        checks.push(CheckResult::new(
            "explicit quartic cones have a 4-fold vertex and pass through all 24 points",
            fails.is_empty(),
            fails.join("; "),
        ));
    }

    {
        let res = projection_ci_property(&b4, protocol, None)?;
        let passed = res.type_pair.is_none() && res.trials.iter().all(|t| t.certified.is_none());
        checks.push(CheckResult::new(
            "the B4 projection certifies no complete intersection type",
            passed,
            format!("{:?}", res.type_pair),
        ));
    }

    Ok(checks)
}
