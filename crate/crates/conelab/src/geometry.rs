//! Projective geometry over the rationals in P^2 and P^3: canonical point
//! coordinates, collinearity structure, linear general position, grids of
//! intersection points carved out by two families of lines, projection from
//! a point, and projective transforms.

use crate::linalg::{Matrix, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("point has no nonzero coordinate")]
    ZeroPoint,
    #[error("points have mixed coordinate counts")]
    MixedAmbient,
    #[error("ambient dimension must be 2 or 3, got {0}")]
    BadAmbient(usize),
    #[error("projection center coincides with configuration point {0}")]
    CenterInConfig(usize),
    #[error("projection center lies on the secant through points {0} and {1}")]
    CenterOnSecant(usize, usize),
    #[error("screen matrix is not a rank-3 map with kernel spanned by the center")]
    BadScreen,
    #[error("transform matrix is singular")]
    SingularTransform,
}

/// Point of projective space with canonical integer coordinates: cleared of
/// denominators, divided by the gcd, first nonzero coordinate positive.
/// Equality of the canonical form is projective equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<BigInt>,
}

impl ProjPoint {
    /// Canonicalizes homogeneous rational coordinates.
    pub fn new(coords: Vec<Rational>) -> Result<Self, GeometryError> {
        if coords.iter().all(Rational::is_zero) {
            return Err(GeometryError::ZeroPoint);
        }
        let mut denom_lcm = BigInt::one();
        for v in &coords {
            denom_lcm = denom_lcm.lcm(v.denom());
        }
        let ints: Vec<BigInt> =
            coords.iter().map(|v| v.numer() * (&denom_lcm / v.denom())).collect();
        Ok(ProjPoint { coords: crate::linalg::primitive_part(ints) })
    }

    pub fn from_integers(coords: Vec<BigInt>) -> Result<Self, GeometryError> {
        if coords.iter().all(Zero::is_zero) {
            return Err(GeometryError::ZeroPoint);
        }
        Ok(ProjPoint { coords: crate::linalg::primitive_part(coords) })
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        ProjPoint::from_integers(coords.iter().map(|&c| BigInt::from(c)).collect())
            .expect("nonzero coordinates")
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Ambient projective dimension (one less than the coordinate count).
    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.coords.iter().cloned().map(Rational::from_integer).collect()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(BigInt::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Ordered list of pairwise distinct points in a common ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfig {
    points: Vec<ProjPoint>,
    ambient_dim: usize,
}

impl PointConfig {
    pub fn new(points: Vec<ProjPoint>) -> Result<Self, GeometryError> {
        let Some(first) = points.first() else {
            return Ok(PointConfig { points, ambient_dim: 3 });
        };
        let ambient_dim = first.ambient_dim();
        if !(2..=3).contains(&ambient_dim) {
            return Err(GeometryError::BadAmbient(ambient_dim));
        }
        if points.iter().any(|p| p.ambient_dim() != ambient_dim) {
            return Err(GeometryError::MixedAmbient);
        }
        let mut seen: HashSet<&ProjPoint> = HashSet::new();
        for (i, p) in points.iter().enumerate() {
            if !seen.insert(p) {
                let j = points.iter().position(|q| q == p).unwrap();
                return Err(GeometryError::DuplicatePoint(j, i));
            }
        }
        Ok(PointConfig { points, ambient_dim })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        PointConfig::new(rows.iter().map(|r| ProjPoint::from_i64(r)).collect())
            .expect("valid configuration")
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn point(&self, i: usize) -> &ProjPoint {
        &self.points[i]
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.points.contains(p)
    }

    /// Rank of the coordinate matrix: 1 for a single point, 2 if all
    /// collinear, 3 if all coplanar (or ambient 2), 4 if spanning P^3.
    pub fn span_rank(&self) -> usize {
        self.coordinate_matrix().rank()
    }

    /// True when the configuration lies in a plane of P^3 (always true in
    /// ambient dimension 2).
    pub fn is_planar(&self) -> bool {
        self.ambient_dim == 2 || self.span_rank() <= 3
    }

    /// Subconfiguration by index list (order kept, indices must be valid).
    pub fn subset(&self, indices: &[usize]) -> PointConfig {
        PointConfig::new(indices.iter().map(|&i| self.points[i].clone()).collect())
            .expect("subset of a valid configuration")
    }

    /// Configuration with the given indices removed.
    pub fn without(&self, removed: &[usize]) -> PointConfig {
        let drop: HashSet<usize> = removed.iter().copied().collect();
        let keep: Vec<usize> = (0..self.len()).filter(|i| !drop.contains(i)).collect();
        self.subset(&keep)
    }

    /// Set equality regardless of point order.
    pub fn same_point_set(&self, other: &PointConfig) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let a: BTreeSet<&ProjPoint> = self.points.iter().collect();
        let b: BTreeSet<&ProjPoint> = other.points.iter().collect();
        a == b
    }

    fn coordinate_matrix(&self) -> Matrix {
        Matrix::from_integer_rows(self.points.iter().map(|p| p.coords.to_vec()).collect())
    }

    fn stacked_rank(&self, indices: &[usize]) -> usize {
        Matrix::from_integer_rows(indices.iter().map(|&i| self.points[i].coords.to_vec()).collect())
            .rank()
    }
}

/// A line known to the configuration, together with the indices of the
/// configuration points on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub carrier: LineCarrier,
    /// Indices of configuration points on the line, ascending.
    pub member_indices: Vec<usize>,
}

/// Coordinate description of a line: two spanning points in P^3, or the
/// dual coefficient vector in P^2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineCarrier {
    Span(ProjPoint, ProjPoint),
    Dual(ProjPoint),
}

impl Line {
    pub fn size(&self) -> usize {
        self.member_indices.len()
    }
}

/// Witness that a configuration is the full intersection grid of two line
/// families: `family_a` holds `a` pairwise skew lines of `b` points each,
/// `family_b` holds `b` pairwise skew lines of `a` points each, and every
/// cross pair meets in exactly one configuration point.
#[derive(Debug, Clone)]
pub struct GridWitness {
    pub a: usize,
    pub b: usize,
    pub family_a: Vec<Line>,
    pub family_b: Vec<Line>,
}

impl GridWitness {
    /// Re-checks every defining property against the configuration.
    pub fn validate(&self, cfg: &PointConfig) -> bool {
        let n = cfg.len();
        if self.a * self.b != n || self.family_a.len() != self.a || self.family_b.len() != self.b {
            return false;
        }
        let sizes_ok = self.family_a.iter().all(|l| l.size() == self.b)
            && self.family_b.iter().all(|l| l.size() == self.a);
        if !sizes_ok {
            return false;
        }
        for fam in [&self.family_a, &self.family_b] {
            let mut covered = BTreeSet::new();
            for line in fam.iter() {
                if !collinear_indices(cfg, &line.member_indices) {
                    return false;
                }
                covered.extend(line.member_indices.iter().copied());
            }
            if covered.len() != n {
                return false;
            }
            for i in 0..fam.len() {
                for j in (i + 1)..fam.len() {
                    if !lines_skew(cfg, &fam[i], &fam[j]) {
                        return false;
                    }
                }
            }
        }
        for la in &self.family_a {
            for lb in &self.family_b {
                let shared: Vec<usize> = la
                    .member_indices
                    .iter()
                    .filter(|i| lb.member_indices.contains(i))
                    .copied()
                    .collect();
                if shared.len() != 1 {
                    return false;
                }
            }
        }
        true
    }
}

fn collinear_indices(cfg: &PointConfig, indices: &[usize]) -> bool {
    indices.len() >= 2 && cfg.stacked_rank(indices) == 2
}

/// All maximal collinear subsets with at least `min_size` points, each as a
/// Line, sorted lexicographically by member indices. `min_size` must be at
/// least 2; the census is empty below two points.
pub fn collinear_subsets(cfg: &PointConfig, min_size: usize) -> Vec<Line> {
    assert!(min_size >= 2, "a line needs at least two points");
    let n = cfg.len();
    let mut covered: HashSet<(usize, usize)> = HashSet::new();
    let mut lines = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if covered.contains(&(i, j)) {
                continue;
            }
            let mut members = vec![i, j];
            for k in 0..n {
                if k != i && k != j && collinear_indices(cfg, &[i, j, k]) {
                    members.push(k);
                }
            }
            members.sort_unstable();
            for x in 0..members.len() {
                for y in (x + 1)..members.len() {
                    covered.insert((members[x], members[y]));
                }
            }
            if members.len() >= min_size {
                let carrier = line_through(cfg, members[0], members[1]);
                lines.push(Line { carrier, member_indices: members });
            }
        }
    }
    lines.sort_by(|x, y| x.member_indices.cmp(&y.member_indices));
    lines
}

fn line_through(cfg: &PointConfig, i: usize, j: usize) -> LineCarrier {
    let p = cfg.point(i).clone();
    let q = cfg.point(j).clone();
    if cfg.ambient_dim() == 3 {
        LineCarrier::Span(p, q)
    } else {
        let a = p.coords();
        let b = q.coords();
        let dual = vec![
            &a[1] * &b[2] - &a[2] * &b[1],
            &a[2] * &b[0] - &a[0] * &b[2],
            &a[0] * &b[1] - &a[1] * &b[0],
        ];
        LineCarrier::Dual(ProjPoint::from_integers(dual).expect("distinct points span a line"))
    }
}

/// Verdict of the general position test, with a witness on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneralPosition {
    Yes,
    /// Three collinear points (or, in P^3, four coplanar points).
    No {
        degenerate_subset: Vec<usize>,
    },
}

impl GeneralPosition {
    pub fn holds(&self) -> bool {
        matches!(self, GeneralPosition::Yes)
    }
}

/// Linear general position: no 3 points collinear, and in P^3 no 4 points
/// coplanar.
pub fn is_linear_general_position(cfg: &PointConfig) -> GeneralPosition {
    let n = cfg.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if cfg.stacked_rank(&[i, j, k]) < 3 {
                    return GeneralPosition::No { degenerate_subset: vec![i, j, k] };
                }
            }
        }
    }
    if cfg.ambient_dim() == 3 {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in (k + 1)..n {
                        if cfg.stacked_rank(&[i, j, k, l]) < 4 {
                            return GeneralPosition::No { degenerate_subset: vec![i, j, k, l] };
                        }
                    }
                }
            }
        }
    }
    GeneralPosition::Yes
}

/// Whether two lines of a P^3 configuration are skew: the four spanning
/// points stack to rank 4.
pub fn lines_skew(cfg: &PointConfig, l1: &Line, l2: &Line) -> bool {
    let (LineCarrier::Span(a1, a2), LineCarrier::Span(b1, b2)) = (&l1.carrier, &l2.carrier) else {
        return false;
    };
    let _ = cfg;
    Matrix::from_integer_rows(vec![
        a1.coords().to_vec(),
        a2.coords().to_vec(),
        b1.coords().to_vec(),
        b2.coords().to_vec(),
    ])
    .rank()
        == 4
}

/// Searches for a grid structure: a factorization |cfg| = a*b with
/// 2 <= a <= b and two line families witnessing it. Factorizations are
/// tried smallest `a` first; candidate lines are the maximal collinear
/// subsets of the matching size, combined by backtracking in lexicographic
/// order. Requires at least 4 points; returns None when no factorization
/// admits a witness.
pub fn detect_grid(cfg: &PointConfig) -> Option<GridWitness> {
    let n = cfg.len();
    if n < 4 || cfg.ambient_dim() != 3 {
        return None;
    }
    let census = collinear_subsets(cfg, 2);
    for a in 2..=n {
        if a * a > n {
            break;
        }
        if !n.is_multiple_of(a) {
            continue;
        }
        let b = n / a;
        let cands_a: Vec<&Line> = census.iter().filter(|l| l.size() == b).collect();
        let cands_b: Vec<&Line> = census.iter().filter(|l| l.size() == a).collect();
        if cands_a.len() < a || cands_b.len() < b {
            continue;
        }
        let mut family_a: Vec<&Line> = Vec::new();
        if let Some(witness) =
            cover_family(cfg, &cands_a, 0, a, n, &mut family_a, &|fam_a: &[&Line]| {
                let mut family_b: Vec<&Line> = Vec::new();
                complete_family_b(cfg, &cands_b, 0, b, n, fam_a, &mut family_b)
            })
        {
            assert!(witness.validate(cfg), "grid witness must re-validate");
            return Some(witness);
        }
    }
    None
}

/// Backtracking exact cover for the first family; on each complete cover,
/// `finish` attempts the second family and the cross-incidence checks.
fn cover_family<'c>(
    cfg: &PointConfig,
    cands: &[&'c Line],
    start: usize,
    want: usize,
    n: usize,
    chosen: &mut Vec<&'c Line>,
    finish: &dyn Fn(&[&Line]) -> Option<Vec<Line>>,
) -> Option<GridWitness> {
    if chosen.len() == want {
        let covered: usize = chosen.iter().map(|l| l.size()).sum();
        if covered != n {
            return None;
        }
        let family_b = finish(chosen)?;
        let family_a: Vec<Line> = chosen.iter().map(|l| (*l).clone()).collect();
        let (a, b) = (family_a.len(), family_b.len());
        return Some(GridWitness { a, b, family_a, family_b });
    }
    for idx in start..cands.len() {
        let cand = cands[idx];
        let disjoint = chosen
            .iter()
            .all(|l| l.member_indices.iter().all(|i| !cand.member_indices.contains(i)));
        if !disjoint {
            continue;
        }
        if !chosen.iter().all(|l| lines_skew(cfg, l, cand)) {
            continue;
        }
        chosen.push(cand);
        if let Some(w) = cover_family(cfg, cands, idx + 1, want, n, chosen, finish) {
            return Some(w);
        }
        chosen.pop();
    }
    None
}

fn complete_family_b<'c>(
    cfg: &PointConfig,
    cands: &[&'c Line],
    start: usize,
    want: usize,
    n: usize,
    family_a: &[&Line],
    chosen: &mut Vec<&'c Line>,
) -> Option<Vec<Line>> {
    if chosen.len() == want {
        let covered: usize = chosen.iter().map(|l| l.size()).sum();
        if covered != n {
            return None;
        }
        return Some(chosen.iter().map(|l| (*l).clone()).collect());
    }
    for idx in start..cands.len() {
        let cand = cands[idx];
        let disjoint = chosen
            .iter()
            .all(|l| l.member_indices.iter().all(|i| !cand.member_indices.contains(i)));
        if !disjoint {
            continue;
        }
        if !chosen.iter().all(|l| lines_skew(cfg, l, cand)) {
            continue;
        }
        let meets_each = family_a.iter().all(|la| {
            la.member_indices.iter().filter(|i| cand.member_indices.contains(i)).count() == 1
        });
        if !meets_each {
            continue;
        }
        chosen.push(cand);
        if let Some(fam) = complete_family_b(cfg, cands, idx + 1, want, n, family_a, chosen) {
            return Some(fam);
        }
        chosen.pop();
    }
    None
}

/// Images of a P^3 configuration under projection from `center` onto the
/// plane described by `screen`, a 3x4 matrix of rank 3 whose kernel is
/// spanned by the center. Point order is preserved.
pub fn project(
    cfg: &PointConfig,
    center: &ProjPoint,
    screen: &Matrix,
) -> Result<PointConfig, GeometryError> {
    if screen.rows() != 3 || screen.cols() != 4 || screen.rank() != 3 {
        return Err(GeometryError::BadScreen);
    }
    if !screen.mul_vec(&center.to_rationals()).iter().all(Rational::is_zero) {
        return Err(GeometryError::BadScreen);
    }
    let mut images = Vec::with_capacity(cfg.len());
    for (i, p) in cfg.points().iter().enumerate() {
        let img = screen.mul_vec(&p.to_rationals());
        if img.iter().all(Rational::is_zero) {
            return Err(GeometryError::CenterInConfig(i));
        }
        images.push(ProjPoint::new(img).expect("nonzero image"));
    }
    for i in 0..images.len() {
        for j in (i + 1)..images.len() {
            if images[i] == images[j] {
                return Err(GeometryError::CenterOnSecant(i, j));
            }
        }
    }
    Ok(PointConfig { points: images, ambient_dim: 2 })
}

/// Applies an invertible 4x4 (or 3x3) projective transform to every point,
/// preserving order.
pub fn apply_transform(cfg: &PointConfig, m: &Matrix) -> Result<PointConfig, GeometryError> {
    let dim = cfg.ambient_dim() + 1;
    assert_eq!(m.rows(), dim, "transform shape must match ambient");
    assert_eq!(m.cols(), dim, "transform shape must match ambient");
    if m.rank() != dim {
        return Err(GeometryError::SingularTransform);
    }
    let points = cfg
        .points()
        .iter()
        .map(|p| ProjPoint::new(m.mul_vec(&p.to_rationals())).expect("invertible image"))
        .collect();
    Ok(PointConfig { points, ambient_dim: cfg.ambient_dim })
}
