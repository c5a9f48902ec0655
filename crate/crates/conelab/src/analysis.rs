//! Cones through a general point, and what a configuration's projection
//! looks like from one: the degree-d piece of the ideal cut by an extra
//! multiplicity-d point, compared against the naive parameter count. All
//! genericity is Monte Carlo under an explicit protocol; trial values are
//! reported side by side and never averaged.

use crate::exec;
use crate::geometry::{
    collinear_subsets, lines_skew, project, GeometryError, Line, PointConfig, ProjPoint,
};
use crate::ideals::{
    binomial, fat_ideal_dim, ideal_dim, is_complete_intersection, CIVerdict, IdealsError,
};
use crate::linalg::{sample_rational, Matrix, Rational, RngState};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("operation needs a P^3 configuration")]
    AmbientMismatch,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Ideals(#[from] IdealsError),
}

/// Knobs for every randomized genericity check: a 64-bit seed, the number
/// of independent trials, and the coordinate height of sampled points.
/// Identical protocols always produce identical sampled data; every
/// consumer forks its own named stream, so results do not depend on
/// evaluation order (parallel and sequential runs agree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericityProtocol {
    pub seed: u64,
    pub trials: u32,
    pub height: u64,
}

impl Default for GenericityProtocol {
    fn default() -> Self {
        GenericityProtocol { seed: 42, trials: 3, height: 1000 }
    }
}

impl GenericityProtocol {
    pub fn new(seed: u64, trials: u32, height: u64) -> Self {
        assert!(trials >= 1, "at least one trial");
        assert!(height >= 1, "height must be positive");
        GenericityProtocol { seed, trials, height }
    }

    /// Deterministic fork: the stream is keyed by (seed, label, index)
    /// only, never by global state.
    pub fn stream(&self, label: &str, index: u64) -> RngState {
        RngState::with_stream(self.seed, crate::linalg::stream_id(label, index))
    }
}

/// Random point of P^3 with integer coordinates up to `height`.
pub fn sample_point(rng: &mut RngState, height: u64) -> ProjPoint {
    loop {
        let coords: Vec<Rational> = (0..4).map(|_| sample_rational(rng, height)).collect();
        if let Ok(p) = ProjPoint::new(coords) {
            return p;
        }
    }
}

/// Random rank-3 screen matrix whose kernel is spanned by `center`. Rows
/// are small random combinations of a reduced basis of the integer lattice
/// orthogonal to the center; the smaller the rows, the smaller every
/// projected coordinate, and the screen choice is invariant-free anyway.
pub fn sample_screen(center: &ProjPoint, rng: &mut RngState) -> Matrix {
    let basis = reduced_orthogonal_basis(center.coords());
    loop {
        let rows: Vec<Vec<BigInt>> = (0..3)
            .map(|_| {
                let mut row = vec![BigInt::zero(); 4];
                for v in &basis {
                    let c = rng.gen_i64(-2, 2);
                    if c != 0 {
                        for (r, x) in row.iter_mut().zip(v) {
                            *r += x * BigInt::from(c);
                        }
                    }
                }
                crate::linalg::primitive_part(row)
            })
            .collect();
        let m = Matrix::from_integer_rows(rows);
        if m.rank() == 3 {
            return m;
        }
    }
}

/// Basis of the rank-3 lattice of integer vectors orthogonal to `c`,
/// shrunk by pairwise Lagrange size reduction. Exact integer arithmetic
/// throughout; the output spans the same lattice it started from.
fn reduced_orthogonal_basis(c: &[BigInt]) -> Vec<Vec<BigInt>> {
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            if c[i].is_zero() && c[j].is_zero() {
                continue;
            }
            let mut v = vec![BigInt::zero(); 4];
            v[i] = c[j].clone();
            v[j] = -c[i].clone();
            let v = crate::linalg::primitive_part(v);
            let mut trial = basis.clone();
            trial.push(v.clone());
            if Matrix::from_integer_rows(trial).rank() == basis.len() + 1 {
                basis.push(v);
                if basis.len() == 3 {
                    break;
                }
            }
        }
        if basis.len() == 3 {
            break;
        }
    }
    assert_eq!(basis.len(), 3, "orthogonal complement of a nonzero vector has rank 3");
    loop {
        let mut changed = false;
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let dot = dot(&basis[i], &basis[j]);
                let norm = dot_self(&basis[j]);
                let mu = round_div(&dot, &norm);
                if !mu.is_zero() {
                    let new: Vec<BigInt> =
                        basis[i].iter().zip(&basis[j]).map(|(a, b)| a - &mu * b).collect();
                    if dot_self(&new) < dot_self(&basis[i]) {
                        basis[i] = new;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    basis.sort_by_key(|v| dot_self(v));
    basis
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_self(a: &[BigInt]) -> BigInt {
    dot(a, a)
}

/// Nearest integer to a/b for b > 0.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if &(r * 2) >= b {
        q + 1
    } else {
        q
    }
}

/// General projection of a P^3 configuration: protocol-sampled center and
/// screen for the given trial. A projection collision (center on a secant)
/// is resampled once before the error propagates.
pub fn project_general(
    cfg: &PointConfig,
    protocol: &GenericityProtocol,
    trial: u64,
) -> Result<(ProjPoint, Matrix, PointConfig), AnalysisError> {
    if cfg.ambient_dim() != 3 {
        return Err(AnalysisError::AmbientMismatch);
    }
    let mut last = None;
    for label in ["projection", "projection-retry"] {
        let mut rng = protocol.stream(label, trial);
        let center = sample_point(&mut rng, protocol.height);
        if cfg.contains(&center) {
            last = Some(GeometryError::CenterInConfig(0));
            continue;
        }
        let screen = sample_screen(&center, &mut rng);
        match project(cfg, &center, &screen) {
            Ok(image) => return Ok((center, screen, image)),
            Err(e) => last = Some(e),
        }
    }
    Err(AnalysisError::Geometry(last.expect("loop ran")))
}

/// Everything known about cones of one degree over a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeReport {
    pub degree: u32,
    /// Minimum over trials of the dimension of the degree-d forms singular
    /// to order d at the sampled point and through the configuration.
    pub actual_dim: usize,
    /// Naive parameter count: ideal_dim minus the conditions a full
    /// multiplicity-d point imposes. May be negative.
    pub expected_dim: i64,
    pub clamped_expected: usize,
    /// Actual strictly exceeds the clamped expectation.
    pub unexpected: bool,
    /// actual - expected, without clamping.
    pub defect: i64,
    pub trial_dims: Vec<usize>,
    /// The configuration lies in a plane; cone counts over planar sets
    /// carry no information beyond the plane geometry.
    pub planar: bool,
    /// When the expected count is zero and the property still holds, a
    /// cover of the configuration by at most `degree` pairwise skew
    /// census lines explains it away as improper, if one exists.
    pub improper_witness: Option<Vec<Line>>,
}

impl ConeReport {
    /// Trials agreed on the dimension.
    pub fn consistent(&self) -> bool {
        self.trial_dims.iter().all(|&d| d == self.actual_dim)
    }

    pub fn improper(&self) -> bool {
        self.improper_witness.is_some()
    }
}

/// Cone reports for every degree in `dmin..=dmax`, sharing the sampled
/// vertex points across degrees. Data-parallel over (degree, trial) when
/// the `parallel` feature is on.
pub fn cone_table(
    cfg: &PointConfig,
    dmin: u32,
    dmax: u32,
    protocol: &GenericityProtocol,
) -> Result<Vec<ConeReport>, AnalysisError> {
    cone_table_impl(cfg, dmin, dmax, protocol, true)
}

/// Sequential fallback of [`cone_table`]; same output, one thread.
pub fn cone_table_seq(
    cfg: &PointConfig,
    dmin: u32,
    dmax: u32,
    protocol: &GenericityProtocol,
) -> Result<Vec<ConeReport>, AnalysisError> {
    cone_table_impl(cfg, dmin, dmax, protocol, false)
}

fn cone_table_impl(
    cfg: &PointConfig,
    dmin: u32,
    dmax: u32,
    protocol: &GenericityProtocol,
    par: bool,
) -> Result<Vec<ConeReport>, AnalysisError> {
    if cfg.ambient_dim() != 3 {
        return Err(AnalysisError::AmbientMismatch);
    }
    if cfg.len() < 4 {
        return Err(AnalysisError::Degenerate("cone analysis needs at least 4 points".into()));
    }
    assert!(dmin >= 1 && dmin <= dmax, "degree range must be nonempty and positive");
    let trials = protocol.trials as usize;
    let vertices: Vec<ProjPoint> = (0..trials)
        .map(|t| {
            let mut rng = protocol.stream("vertex", t as u64);
            sample_point(&mut rng, protocol.height)
        })
        .collect();
    let planar = cfg.is_planar();
    let census = collinear_subsets(cfg, 2);
    let degrees: Vec<u32> = (dmin..=dmax).collect();
    let width = trials + 1;
    let dims = exec::map_indexed(degrees.len() * width, par, |k| {
        let d = degrees[k / width];
        match k % width {
            0 => ideal_dim(cfg, d),
            slot => fat_ideal_dim(cfg, &vertices[slot - 1], d, d),
        }
    });
    let reports = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let ideal = dims[i * width] as i64;
            let trial_dims = dims[i * width + 1..(i + 1) * width].to_vec();
            let actual_dim = *trial_dims.iter().min().expect("at least one trial");
            let expected_dim = ideal - binomial(d as u64 + 2, 3) as i64;
            let clamped_expected = expected_dim.max(0) as usize;
            let unexpected = actual_dim > clamped_expected;
            let improper_witness = if unexpected && clamped_expected == 0 && d >= 2 {
                skew_line_cover(cfg, &census, d as usize)
            } else {
                None
            };
            ConeReport {
                degree: d,
                actual_dim,
                expected_dim,
                clamped_expected,
                unexpected,
                defect: actual_dim as i64 - expected_dim,
                trial_dims,
                planar,
                improper_witness,
            }
        })
        .collect();
    Ok(reports)
}

/// Cone report for a single degree (same sampled vertices as the table).
pub fn cone_property(
    cfg: &PointConfig,
    d: u32,
    protocol: &GenericityProtocol,
) -> Result<ConeReport, AnalysisError> {
    Ok(cone_table_impl(cfg, d, d, protocol, true)?.pop().expect("one degree"))
}

/// Unclamped difference between the actual and expected cone dimensions.
pub fn cone_defect(
    cfg: &PointConfig,
    d: u32,
    protocol: &GenericityProtocol,
) -> Result<i64, AnalysisError> {
    Ok(cone_property(cfg, d, protocol)?.defect)
}

/// Cover of all configuration points by at most `max_lines` pairwise skew
/// census lines, if one exists (the witness for an improper cone count).
fn skew_line_cover(cfg: &PointConfig, census: &[Line], max_lines: usize) -> Option<Vec<Line>> {
    fn step(
        cfg: &PointConfig,
        census: &[Line],
        chosen: &mut Vec<Line>,
        covered: &mut Vec<bool>,
        max_lines: usize,
    ) -> bool {
        let Some(first) = covered.iter().position(|c| !c) else {
            return true;
        };
        if chosen.len() == max_lines {
            return false;
        }
        for line in census.iter().filter(|l| l.member_indices.contains(&first)) {
            if !chosen.iter().all(|c| lines_skew(cfg, c, line)) {
                continue;
            }
            let newly: Vec<usize> =
                line.member_indices.iter().copied().filter(|&i| !covered[i]).collect();
            for &i in &newly {
                covered[i] = true;
            }
            chosen.push(line.clone());
            if step(cfg, census, chosen, covered, max_lines) {
                return true;
            }
            chosen.pop();
            for &i in &newly {
                covered[i] = false;
            }
        }
        false
    }
    let mut chosen = Vec::new();
    let mut covered = vec![false; cfg.len()];
    if step(cfg, census, &mut chosen, &mut covered, max_lines) {
        Some(chosen)
    } else {
        None
    }
}

/// What one projection trial found.
#[derive(Debug, Clone)]
pub struct TrialCertification {
    pub trial: u32,
    /// First factorization that certified (smallest a), if any.
    pub certified: Option<(u32, u32)>,
    /// Verdicts for every attempted factorization, in scan order. Types
    /// with no candidate form at the lower degree are skipped.
    pub verdicts: Vec<CIVerdict>,
}

/// Aggregate of the projection trials.
#[derive(Debug, Clone)]
pub struct ProjectionCIResult {
    /// The common certified type, present only when every trial certified
    /// the same pair.
    pub type_pair: Option<(u32, u32)>,
    pub trials: Vec<TrialCertification>,
    /// All trials agreed (same certified type, or none everywhere).
    pub consistent: bool,
}

/// Projects through a fresh protocol-sampled center and screen per trial
/// and looks for a complete intersection certificate on the image: either
/// for the hinted type, or scanning every factorization |cfg| = a*b with
/// 2 <= a <= b, smallest a first.
pub fn projection_ci_property(
    cfg: &PointConfig,
    protocol: &GenericityProtocol,
    type_hint: Option<(u32, u32)>,
) -> Result<ProjectionCIResult, AnalysisError> {
    let n = cfg.len() as u32;
    let candidates: Vec<(u32, u32)> = match type_hint {
        Some((a, b)) => vec![(a.min(b), a.max(b))],
        None => (2..=n)
            .take_while(|a| a * a <= n)
            .filter(|&a| n.is_multiple_of(a))
            .map(|a| (a, n / a))
            .collect(),
    };
    let mut trials = Vec::new();
    for trial in 0..protocol.trials {
        let (_, _, image) = project_general(cfg, protocol, trial as u64)?;
        let mut verdicts = Vec::new();
        let mut certified = None;
        for &(a, b) in &candidates {
            match is_complete_intersection(&image, a, b, protocol) {
                Ok(v) => {
                    let hit = v.certified;
                    verdicts.push(v);
                    if hit {
                        certified = Some((a, b));
                        break;
                    }
                }
                Err(IdealsError::NoFormAvailable { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
        trials.push(TrialCertification { trial, certified, verdicts });
    }
    let first = trials.first().and_then(|t| t.certified);
    let consistent = trials.iter().all(|t| t.certified == first);
    let type_pair = if consistent { first } else { None };
    Ok(ProjectionCIResult { type_pair, trials, consistent })
}

/// Combinatorial membership test for the two-skew-lines family: the
/// configuration must be covered by two skew lines carrying at least three
/// points each. Errors on planar or sub-six-point inputs, where the cone
/// count at degree 2 says nothing.
pub fn classify_cc2(cfg: &PointConfig) -> Result<Option<(Line, Line)>, AnalysisError> {
    if cfg.len() < 6 {
        return Err(AnalysisError::Degenerate("needs at least 6 points".into()));
    }
    if cfg.is_planar() {
        return Err(AnalysisError::Degenerate("planar configuration".into()));
    }
    let census = collinear_subsets(cfg, 3);
    for i in 0..census.len() {
        for j in (i + 1)..census.len() {
            let (l1, l2) = (&census[i], &census[j]);
            if l1.size() + l2.size() != cfg.len() {
                continue;
            }
            let disjoint = l1.member_indices.iter().all(|k| !l2.member_indices.contains(k));
            if disjoint && lines_skew(cfg, l1, l2) {
                return Ok(Some((l1.clone(), l2.clone())));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointConfig;

    fn two_skew_lines(k1: usize, k2: usize) -> PointConfig {
        // Points [1, t, 0, 0] on one line and [0, 0, 1, t] on a skew one.
        let mut pts: Vec<Vec<i64>> = Vec::new();
        for t in 0..k1 as i64 {
            pts.push(vec![1, 2 * t + 1, 0, 0]);
        }
        for t in 0..k2 as i64 {
            pts.push(vec![0, 0, 1, 3 * t + 2]);
        }
        let rows: Vec<&[i64]> = pts.iter().map(Vec::as_slice).collect();
        PointConfig::from_i64(&rows)
    }

    #[test]
    fn protocol_streams_are_reproducible() {
        let p = GenericityProtocol::default();
        let a = sample_point(&mut p.stream("vertex", 0), p.height);
        let b = sample_point(&mut p.stream("vertex", 0), p.height);
        assert_eq!(a, b);
        let c = sample_point(&mut p.stream("vertex", 1), p.height);
        assert_ne!(a, c);
    }

    #[test]
    fn screen_kernel_is_the_center() {
        let p = GenericityProtocol::default();
        let mut rng = p.stream("screen-test", 0);
        let center = sample_point(&mut rng, p.height);
        let screen = sample_screen(&center, &mut rng);
        assert_eq!(screen.rank(), 3);
        assert!(screen.mul_vec(&center.to_rationals()).iter().all(Rational::is_zero));
    }

    #[test]
    fn cone_dimensions_of_four_general_points() {
        let cfg =
            PointConfig::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let protocol = GenericityProtocol::default();
        let report = cone_property(&cfg, 3, &protocol).unwrap();
        // ideal_dim 16, conditions 10: expected 6 = actual, defect 0.
        assert_eq!(report.expected_dim, 6);
        assert_eq!(report.actual_dim, 6);
        assert_eq!(report.defect, 0);
        assert!(!report.unexpected);
        assert!(report.consistent());
        assert!(!report.planar);
    }

    #[test]
    fn two_skew_lines_make_unexpected_quadric_cones() {
        let cfg = two_skew_lines(3, 3);
        let protocol = GenericityProtocol::default();
        let report = cone_property(&cfg, 2, &protocol).unwrap();
        assert!(report.unexpected, "quadric cone through two 3-point lines");
        assert_eq!(report.clamped_expected, 0);
        // Always improper: the two lines themselves are the witness curve.
        assert!(report.improper(), "two-line witness expected");
        assert_eq!(report.improper_witness.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn split_2_4_is_not_unexpected_at_degree_2() {
        let cfg = two_skew_lines(2, 4);
        let protocol = GenericityProtocol::default();
        let report = cone_property(&cfg, 2, &protocol).unwrap();
        assert!(!report.unexpected);
        assert_eq!(classify_cc2(&cfg).unwrap(), None);
    }

    #[test]
    fn cc2_classification_matches_geometry() {
        let in_family = two_skew_lines(3, 4);
        let witness = classify_cc2(&in_family).unwrap();
        assert!(witness.is_some());
        let (l1, l2) = witness.unwrap();
        assert_eq!(l1.size() + l2.size(), 7);

        let planar = PointConfig::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 1, 0],
            &[1, 1, 1, 0],
            &[1, 2, 1, 0],
            &[1, 1, 2, 0],
        ]);
        assert!(matches!(classify_cc2(&planar), Err(AnalysisError::Degenerate(_))));
        let tiny = two_skew_lines(2, 3);
        assert!(matches!(classify_cc2(&tiny), Err(AnalysisError::Degenerate(_))));
    }

    #[test]
    fn planar_configurations_are_flagged() {
        let cfg = PointConfig::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 1, 0],
            &[1, 1, 1, 0],
            &[1, 2, 3, 0],
        ]);
        let protocol = GenericityProtocol::default();
        let report = cone_property(&cfg, 2, &protocol).unwrap();
        assert!(report.planar);
    }

    #[test]
    fn table_matches_sequential_fallback() {
        let cfg = two_skew_lines(3, 3);
        let protocol = GenericityProtocol::default();
        let par = cone_table(&cfg, 2, 4, &protocol).unwrap();
        let seq = cone_table_seq(&cfg, 2, 4, &protocol).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn projection_is_reproducible() {
        let cfg = two_skew_lines(3, 3);
        let protocol = GenericityProtocol::default();
        let (c1, s1, img1) = project_general(&cfg, &protocol, 0).unwrap();
        let (c2, s2, img2) = project_general(&cfg, &protocol, 0).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(s1, s2);
        assert_eq!(img1, img2);
        let (c3, _, _) = project_general(&cfg, &protocol, 1).unwrap();
        assert_ne!(c1, c3);
    }
}
