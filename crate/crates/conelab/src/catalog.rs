//! Built-in point configurations (checksummed data files compiled into
//! the binary), random generators for grids and structured samples, and
//! the explicit quartic cone over the 24-point F4 configuration.

use crate::analysis::sample_point;
use crate::geometry::{PointConfig, ProjPoint};
use crate::ideals::{Form, IdealsError, MonomialBasis};
use crate::linalg::{Matrix, Rational, RngState};
use crate::report::parse_point_file;
use num_bigint::BigInt;
use num_traits::Zero;
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown configuration {0:?}; available: F4, Z1, Z2, Z3 (alias D4), Z4, B4")]
    UnknownName(String),
    #[error("integrity check failed for built-in configuration {0}")]
    Integrity(&'static str),
    #[error("could not satisfy generator constraints: {0}")]
    DegenerateParameters(String),
}

struct RawEntry {
    name: &'static str,
    aliases: &'static [&'static str],
    description: &'static str,
    text: &'static str,
}

const RAW_ENTRIES: &[RawEntry] = &[
    RawEntry {
        name: "F4",
        aliases: &[],
        description: "24 direction vectors of the F4 root system",
        text: include_str!("../data/f4.pts"),
    },
    RawEntry {
        name: "Z1",
        aliases: &[],
        description: "20-point subset of the F4 directions (one collinear quadruple removed)",
        text: include_str!("../data/z1.pts"),
    },
    RawEntry {
        name: "Z2",
        aliases: &[],
        description: "16-point subset of the F4 directions (two collinear quadruples removed)",
        text: include_str!("../data/z2.pts"),
    },
    RawEntry {
        name: "Z3",
        aliases: &["D4"],
        description: "12 direction vectors of the D4 root system",
        text: include_str!("../data/d4.pts"),
    },
    RawEntry {
        name: "Z4",
        aliases: &[],
        description: "coordinate points plus all-nonzero sign patterns; equivalent to Z3",
        text: include_str!("../data/z4.pts"),
    },
    RawEntry {
        name: "B4",
        aliases: &[],
        description: "16 direction vectors of the B4 root system (projection negative fixture)",
        text: include_str!("../data/b4.pts"),
    },
];

/// A built-in configuration, loaded and integrity-checked.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub config: PointConfig,
}

/// Primary names of all built-in configurations.
pub fn names() -> Vec<&'static str> {
    RAW_ENTRIES.iter().map(|r| r.name).collect()
}

/// Whether a string resolves to a built-in configuration.
pub fn is_catalog_name(name: &str) -> bool {
    RAW_ENTRIES.iter().any(|r| {
        r.name.eq_ignore_ascii_case(name) || r.aliases.iter().any(|a| a.eq_ignore_ascii_case(name))
    })
}

/// All built-in configurations.
pub fn entries() -> Result<Vec<CatalogEntry>, CatalogError> {
    RAW_ENTRIES.iter().map(load).collect()
}

/// Looks up a built-in configuration by name or alias, case-insensitive.
pub fn named(name: &str) -> Result<CatalogEntry, CatalogError> {
    RAW_ENTRIES
        .iter()
        .find(|r| {
            r.name.eq_ignore_ascii_case(name)
                || r.aliases.iter().any(|a| a.eq_ignore_ascii_case(name))
        })
        .map(load)
        .unwrap_or_else(|| Err(CatalogError::UnknownName(name.to_string())))
}

fn load(raw: &RawEntry) -> Result<CatalogEntry, CatalogError> {
    verify_checksum(raw.name, raw.text)?;
    let config = parse_point_file(raw.text).map_err(|_| CatalogError::Integrity(raw.name))?;
    Ok(CatalogEntry { name: raw.name, description: raw.description, config })
}

/// The first line of each data file records the sha256 of everything after
/// it; a mismatch means the coordinates were edited without updating the
/// digest.
fn verify_checksum(name: &'static str, text: &str) -> Result<(), CatalogError> {
    let marker = "# sha256: ";
    let rest = text.strip_prefix(marker).ok_or(CatalogError::Integrity(name))?;
    let (expected, body) = rest.split_once('\n').ok_or(CatalogError::Integrity(name))?;
    let digest = Sha256::digest(body.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    if hex == expected.trim() {
        Ok(())
    } else {
        Err(CatalogError::Integrity(name))
    }
}

/// The involution exchanging the two 12-point realizations Z3 and Z4.
pub fn z3_z4_transform() -> Matrix {
    Matrix::from_i64_rows(&[&[1, 0, 0, 1], &[1, 0, 0, -1], &[0, 1, 1, 0], &[0, 1, -1, 0]])
}

/// The (a,b)-grid on the quadric x0*x3 = x1*x2 with ruling parameters
/// 0..a and 0..b: the point for (i, j) is [1, j, i, i*j].
pub fn make_grid(a: usize, b: usize) -> PointConfig {
    grid_from_params(
        &(0..a as i64).map(BigInt::from).collect::<Vec<_>>(),
        &(0..b as i64).map(BigInt::from).collect::<Vec<_>>(),
    )
}

/// An (a,b)-grid with random distinct ruling parameters of the given
/// height.
pub fn random_grid(
    a: usize,
    b: usize,
    rng: &mut RngState,
    height: u64,
) -> Result<PointConfig, CatalogError> {
    let s = distinct_params(a, rng, height)?;
    let t = distinct_params(b, rng, height)?;
    Ok(grid_from_params(&s, &t))
}

fn grid_from_params(s: &[BigInt], t: &[BigInt]) -> PointConfig {
    assert!(s.len() >= 2 && t.len() >= s.len(), "grid needs 2 <= a <= b");
    let points = s
        .iter()
        .flat_map(|si| {
            t.iter().map(move |tj| {
                ProjPoint::from_integers(vec![BigInt::from(1), tj.clone(), si.clone(), si * tj])
                    .expect("grid point is nonzero")
            })
        })
        .collect();
    PointConfig::new(points).expect("distinct parameters give distinct grid points")
}

fn distinct_params(n: usize, rng: &mut RngState, height: u64) -> Result<Vec<BigInt>, CatalogError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..64 * n {
        let v = rng.gen_i64(-(height as i64), height as i64);
        if seen.insert(v) {
            out.push(BigInt::from(v));
            if out.len() == n {
                return Ok(out);
            }
        }
    }
    Err(CatalogError::DegenerateParameters(format!(
        "could not draw {n} distinct parameters at height {height}"
    )))
}

/// Shapes of random configurations used as test fixtures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigKind {
    /// n points with no 3 collinear and no 4 coplanar.
    GeneralPosition(usize),
    /// k1 and k2 points on two random lines verified skew.
    OnTwoSkewLines(usize, usize),
    /// n points in a random plane of P^3.
    Planar(usize),
    /// Points on ruling lines of the standard quadric, counts per line.
    OnGridLines(Vec<usize>),
}

/// Draws a configuration of the requested shape. Retries collisions a
/// bounded number of times before giving up.
pub fn random_config(
    kind: &ConfigKind,
    rng: &mut RngState,
    height: u64,
) -> Result<PointConfig, CatalogError> {
    match kind {
        ConfigKind::GeneralPosition(n) => general_position(*n, rng, height),
        ConfigKind::OnTwoSkewLines(k1, k2) => on_skew_lines(&[*k1, *k2], rng, height),
        ConfigKind::Planar(n) => planar(*n, rng, height),
        ConfigKind::OnGridLines(counts) => on_grid_lines(counts, rng, height),
    }
}

fn general_position(
    n: usize,
    rng: &mut RngState,
    height: u64,
) -> Result<PointConfig, CatalogError> {
    let mut points: Vec<ProjPoint> = Vec::new();
    'outer: for _ in 0..n {
        for _ in 0..64 {
            let p = sample_point(rng, height);
            if points.contains(&p) {
                continue;
            }
            let mut trial = points.clone();
            trial.push(p);
            let cfg = PointConfig::new(trial).expect("distinct by construction");
            if crate::geometry::is_linear_general_position(&cfg).holds() {
                points = cfg.points().to_vec();
                continue 'outer;
            }
        }
        return Err(CatalogError::DegenerateParameters(format!(
            "general position unreachable for {n} points at height {height}"
        )));
    }
    Ok(PointConfig::new(points).expect("distinct by construction"))
}

fn on_skew_lines(
    counts: &[usize],
    rng: &mut RngState,
    height: u64,
) -> Result<PointConfig, CatalogError> {
    assert!(counts.len() >= 2, "need at least two lines");
    // Draw spanning point pairs until all lines are pairwise skew.
    let mut lines: Vec<(ProjPoint, ProjPoint)> = Vec::new();
    'line: while lines.len() < counts.len() {
        for _ in 0..64 {
            let p = sample_point(rng, height);
            let q = sample_point(rng, height);
            if p == q {
                continue;
            }
            let skew_to_all = lines.iter().all(|(r, s)| {
                let m = Matrix::from_integer_rows(vec![
                    p.coords().to_vec(),
                    q.coords().to_vec(),
                    r.coords().to_vec(),
                    s.coords().to_vec(),
                ]);
                m.rank() == 4
            });
            if skew_to_all {
                lines.push((p, q));
                continue 'line;
            }
        }
        return Err(CatalogError::DegenerateParameters(
            "could not draw pairwise skew lines".into(),
        ));
    }
    let mut points: Vec<ProjPoint> = Vec::new();
    let mut seen: BTreeSet<ProjPoint> = BTreeSet::new();
    for ((p, q), &count) in lines.iter().zip(counts) {
        let mut placed = 0;
        for _ in 0..64 * count.max(1) {
            if placed == count {
                break;
            }
            let u = rng.gen_i64(-(height as i64), height as i64);
            let v = rng.gen_i64(-(height as i64), height as i64);
            if u == 0 && v == 0 {
                continue;
            }
            let coords: Vec<BigInt> =
                p.coords().iter().zip(q.coords()).map(|(pc, qc)| pc * u + qc * v).collect();
            let Ok(point) = ProjPoint::from_integers(coords) else { continue };
            if seen.insert(point.clone()) {
                points.push(point);
                placed += 1;
            }
        }
        if placed != count {
            return Err(CatalogError::DegenerateParameters(format!(
                "could not place {count} distinct points on a line at height {height}"
            )));
        }
    }
    Ok(PointConfig::new(points).expect("deduplicated above"))
}

fn planar(n: usize, rng: &mut RngState, height: u64) -> Result<PointConfig, CatalogError> {
    // Random rank-3 embedding of P^2 into P^3, then distinct plane points.
    let embedding = loop {
        let rows: Vec<Vec<BigInt>> =
            (0..4).map(|_| (0..3).map(|_| BigInt::from(rng.gen_i64(-9, 9))).collect()).collect();
        let m = Matrix::from_integer_rows(rows);
        if m.rank() == 3 {
            break m;
        }
    };
    let mut seen: BTreeSet<ProjPoint> = BTreeSet::new();
    let mut points = Vec::new();
    for _ in 0..64 * n.max(1) {
        if points.len() == n {
            break;
        }
        let plane_pt: Vec<Rational> = (0..3)
            .map(|_| {
                Rational::from_integer(BigInt::from(rng.gen_i64(-(height as i64), height as i64)))
            })
            .collect();
        if plane_pt.iter().all(Rational::is_zero) {
            continue;
        }
        let image = embedding.mul_vec(&plane_pt);
        let Ok(point) = ProjPoint::new(image) else { continue };
        if seen.insert(point.clone()) {
            points.push(point);
        }
    }
    if points.len() != n {
        return Err(CatalogError::DegenerateParameters(format!(
            "could not place {n} distinct plane points at height {height}"
        )));
    }
    Ok(PointConfig::new(points).expect("deduplicated above"))
}

fn on_grid_lines(
    counts: &[usize],
    rng: &mut RngState,
    height: u64,
) -> Result<PointConfig, CatalogError> {
    let s = distinct_params(counts.len(), rng, height)?;
    let mut points = Vec::new();
    for (si, &count) in s.iter().zip(counts) {
        let t = distinct_params(count, rng, height)?;
        for tj in &t {
            points.push(
                ProjPoint::from_integers(vec![BigInt::from(1), tj.clone(), si.clone(), si * tj])
                    .expect("nonzero"),
            );
        }
    }
    PointConfig::new(points)
        .map_err(|_| CatalogError::DegenerateParameters("grid-line points collided".into()))
}

/// 15 points spread 5 each over three skew lines, plus one point off the
/// quadric carrying the lines. Its h-vector is (1,3,6,3,3).
pub fn zprime(rng: &mut RngState, height: u64) -> Result<PointConfig, CatalogError> {
    let base = on_grid_lines(&[5, 5, 5], rng, height)?;
    for _ in 0..64 {
        let p = sample_point(rng, height);
        let c = p.coords();
        // Off the quadric x0*x3 - x1*x2 and new: then it is on none of the
        // ruling lines.
        if &c[0] * &c[3] != &c[1] * &c[2] && !base.contains(&p) {
            let mut pts = base.points().to_vec();
            pts.push(p);
            return Ok(PointConfig::new(pts).expect("distinct"));
        }
    }
    Err(CatalogError::DegenerateParameters("could not place the off-quadric point".into()))
}

/// The nine plane points with coordinates in {0, 1, -1} spanning the B3
/// direction pattern: the coordinate points and all pairwise sums and
/// differences.
pub fn b3_plane_config() -> PointConfig {
    PointConfig::from_i64(&[
        &[1, 0, 0],
        &[0, 1, 0],
        &[0, 0, 1],
        &[1, 1, 0],
        &[1, -1, 0],
        &[1, 0, 1],
        &[1, 0, -1],
        &[0, 1, 1],
        &[0, 1, -1],
    ])
}

/// The unique plane quartic with a triple point at (a_j : a_k : a_l) that
/// vanishes on the B3 pattern of the plane spanned by variables j, k, l
/// (where {j,k,l} omits i), written as a cone in all four variables.
pub fn b3_plane_quartic(i: usize, q: &ProjPoint) -> Result<Form, IdealsError> {
    assert!(i < 4, "variable index out of range");
    assert_eq!(q.ambient_dim(), 3, "vertex must live in P^3");
    let vars: Vec<usize> = (0..4).filter(|&v| v != i).collect();
    let (j, k, l) = (vars[0], vars[1], vars[2]);
    let a = |v: usize| Rational::from_integer(q.coords()[v].clone());
    let (aj, ak, al) = (a(j), a(k), a(l));
    let sq = |x: &Rational| x * x;
    let cube = |x: &Rational| x * x * x;
    let three = Rational::from_integer(BigInt::from(3));

    let basis = MonomialBasis::new(4, 4);
    let mut coeffs = vec![Rational::zero(); basis.len()];
    let mut add = |e_j: u32, e_k: u32, e_l: u32, c: Rational| {
        let mut exps = [0u32; 4];
        exps[j] = e_j;
        exps[k] = e_k;
        exps[l] = e_l;
        let idx = basis.index_of(&exps).expect("degree-4 exponent");
        coeffs[idx] += c;
    };

    add(2, 1, 1, &three * &aj * (sq(&ak) - sq(&al)));
    add(1, 2, 1, &three * &ak * (sq(&al) - sq(&aj)));
    add(1, 1, 2, &three * &al * (sq(&aj) - sq(&ak)));
    add(0, 3, 1, cube(&aj));
    add(0, 1, 3, -cube(&aj));
    add(1, 0, 3, cube(&ak));
    add(3, 0, 1, -cube(&ak));
    add(3, 1, 0, cube(&al));
    add(1, 3, 0, -cube(&al));

    let f = Form::new(basis, coeffs);
    if f.is_zero() {
        return Err(IdealsError::ZeroForm);
    }
    Ok(f)
}

/// The quartic cone with vertex Q through all 24 F4 directions: the
/// alternating combination -a0*f0 + a1*f1 - a2*f2 + a3*f3 of the four
/// plane quartics.
pub fn f4_quartic_cone(q: &ProjPoint) -> Result<Form, IdealsError> {
    assert_eq!(q.ambient_dim(), 3, "vertex must live in P^3");
    let basis = MonomialBasis::new(4, 4);
    let mut coeffs = vec![Rational::zero(); basis.len()];
    for i in 0..4 {
        let ai = Rational::from_integer(q.coords()[i].clone());
        let signed = if i % 2 == 0 { -ai } else { ai };
        if signed.is_zero() {
            continue;
        }
        match b3_plane_quartic(i, q) {
            Ok(fi) => {
                for (c, x) in coeffs.iter_mut().zip(fi.coeffs()) {
                    *c += &signed * x;
                }
            }
            Err(IdealsError::ZeroForm) => {}
            Err(e) => return Err(e),
        }
    }
    let f = Form::new(basis, coeffs);
    if f.is_zero() {
        return Err(IdealsError::ZeroForm);
    }
    Ok(f)
}
