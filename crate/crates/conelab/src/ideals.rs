//! Graded pieces of point ideals, computed by exact linear algebra on
//! condition matrices. A configuration (plus an optional fat point) turns
//! into one matrix per degree: evaluation rows for the reduced points and
//! partial-derivative rows for the multiplicity conditions. Dimensions,
//! Hilbert functions and h-vectors all come from exact ranks; no Groebner
//! bases are involved.

use crate::analysis::GenericityProtocol;
use crate::geometry::{PointConfig, ProjPoint};
use crate::linalg::{sample_rational, Matrix, Rational, RngState};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdealsError {
    #[error("configuration has {got} points but type ({a},{b}) needs {need}")]
    DimensionMismatch { a: u32, b: u32, need: usize, got: usize },
    #[error("no nonzero form of degree {degree} vanishes on the configuration")]
    NoFormAvailable { degree: u32 },
    #[error("the zero form has no multiplicity")]
    ZeroForm,
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u128::try_into(acc).expect("binomial fits u64")
}

/// Monomials of a fixed degree in a fixed number of variables, enumerated
/// in descending graded-lex order with x0 > x1 > ... (so x0^d comes first
/// and the last variable's pure power comes last).
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    num_vars: usize,
    degree: u32,
    exponents: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(num_vars: usize, degree: u32) -> Self {
        assert!(num_vars >= 1);
        let mut exponents = Vec::with_capacity(binomial(
            (degree as u64) + (num_vars as u64) - 1,
            (num_vars as u64) - 1,
        ) as usize);
        let mut cur = vec![0u32; num_vars];
        enumerate(&mut exponents, &mut cur, 0, degree);
        let index = exponents.iter().cloned().zip(0..).collect();
        MonomialBasis { num_vars, degree, exponents, index }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponent(&self, i: usize) -> &[u32] {
        &self.exponents[i]
    }

    pub fn exponents(&self) -> impl Iterator<Item = &[u32]> {
        self.exponents.iter().map(Vec::as_slice)
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

fn enumerate(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, var: usize, left: u32) {
    if var + 1 == cur.len() {
        cur[var] = left;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[var] = e;
        enumerate(out, cur, var + 1, left - e);
        cur[var] = 0;
    }
}

/// Homogeneous form: a coefficient vector over a [`MonomialBasis`].
#[derive(Debug, Clone)]
pub struct Form {
    basis: MonomialBasis,
    coeffs: Vec<Rational>,
}

impl Form {
    pub fn new(basis: MonomialBasis, coeffs: Vec<Rational>) -> Self {
        assert_eq!(coeffs.len(), basis.len(), "coefficient count must match basis");
        Form { basis, coeffs }
    }

    pub fn zero(num_vars: usize, degree: u32) -> Self {
        let basis = MonomialBasis::new(num_vars, degree);
        let coeffs = vec![Rational::zero(); basis.len()];
        Form { basis, coeffs }
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree
    }

    pub fn num_vars(&self) -> usize {
        self.basis.num_vars
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    pub fn coeff_of(&self, exps: &[u32]) -> Rational {
        self.basis.index_of(exps).map_or_else(Rational::zero, |i| self.coeffs[i].clone())
    }

    /// Same form scaled to coprime integer coefficients with positive
    /// leading coefficient. Keeps downstream arithmetic small.
    pub fn primitive(&self) -> Form {
        let mut denom_lcm = BigInt::one();
        for c in &self.coeffs {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| c.numer() * (&denom_lcm / c.denom())).collect();
        let ints = crate::linalg::primitive_part(ints);
        Form {
            basis: self.basis.clone(),
            coeffs: ints.into_iter().map(Rational::from_integer).collect(),
        }
    }

    pub fn evaluate(&self, p: &ProjPoint) -> Rational {
        assert_eq!(p.coords().len(), self.basis.num_vars, "ambient mismatch");
        let powers = power_table(p, self.basis.degree);
        let mut acc = Rational::zero();
        for (i, exps) in self.basis.exponents().enumerate() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            acc += &self.coeffs[i] * Rational::from_integer(monomial_value(exps, &powers));
        }
        acc
    }

    /// Value of the partial derivative prescribed by `beta` at `p`.
    pub fn derivative_at(&self, beta: &[u32], p: &ProjPoint) -> Rational {
        assert_eq!(beta.len(), self.basis.num_vars, "ambient mismatch");
        let powers = power_table(p, self.basis.degree);
        let mut acc = Rational::zero();
        for (i, exps) in self.basis.exponents().enumerate() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            let f = derivative_entry(exps, beta, &powers);
            if !f.is_zero() {
                acc += &self.coeffs[i] * Rational::from_integer(f);
            }
        }
        acc
    }

    /// Product with the monomial `mu`, expressed in the basis of degree
    /// `degree() + |mu|`.
    pub fn mul_monomial(&self, mu: &[u32]) -> Form {
        assert_eq!(mu.len(), self.basis.num_vars, "ambient mismatch");
        let target =
            MonomialBasis::new(self.basis.num_vars, self.basis.degree + mu.iter().sum::<u32>());
        let mut coeffs = vec![Rational::zero(); target.len()];
        for (i, exps) in self.basis.exponents().enumerate() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            let shifted: Vec<u32> = exps.iter().zip(mu).map(|(a, m)| a + m).collect();
            let j = target.index_of(&shifted).expect("shifted monomial in target basis");
            coeffs[j] = self.coeffs[i].clone();
        }
        Form { basis: target, coeffs }
    }

    /// Coefficients rendered as exact `p/q` strings in basis order.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = ["x0", "x1", "x2", "x3"];
        let mut parts = Vec::new();
        for (i, exps) in self.basis.exponents().enumerate() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            let mut term = self.coeffs[i].to_string();
            for (v, &e) in exps.iter().enumerate() {
                if e == 1 {
                    term.push_str(&format!("*{}", vars[v]));
                } else if e > 1 {
                    term.push_str(&format!("*{}^{}", vars[v], e));
                }
            }
            parts.push(term);
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn power_table(p: &ProjPoint, degree: u32) -> Vec<Vec<BigInt>> {
    p.coords()
        .iter()
        .map(|c| {
            let mut row = Vec::with_capacity(degree as usize + 1);
            row.push(BigInt::one());
            for _ in 0..degree {
                row.push(row.last().unwrap() * c);
            }
            row
        })
        .collect()
}

fn monomial_value(exps: &[u32], powers: &[Vec<BigInt>]) -> BigInt {
    let mut acc = BigInt::one();
    for (v, &e) in exps.iter().enumerate() {
        if e > 0 {
            acc *= &powers[v][e as usize];
        }
    }
    acc
}

/// Entry of a derivative row: falling factorials times the remaining
/// power, zero unless `beta <= alpha` componentwise.
fn derivative_entry(alpha: &[u32], beta: &[u32], powers: &[Vec<BigInt>]) -> BigInt {
    let mut acc = BigInt::one();
    for v in 0..alpha.len() {
        if beta[v] > alpha[v] {
            return BigInt::zero();
        }
        for k in 0..beta[v] {
            acc *= BigInt::from(alpha[v] - k);
        }
        let rem = alpha[v] - beta[v];
        if rem > 0 {
            acc *= &powers[v][rem as usize];
        }
    }
    acc
}

/// Condition matrix in degree `d`: one evaluation row per configuration
/// point, and, when `fat = (P, m)` is given, one derivative row per
/// order-(m-1) operator at P (binom(m-1+n, n) rows in P^n when m <= d+1).
/// Its kernel is the degree-d piece of the ideal.
pub fn condition_matrix(cfg: &PointConfig, d: u32, fat: Option<(&ProjPoint, u32)>) -> Matrix {
    let num_vars = match (cfg.is_empty(), fat) {
        (false, _) => cfg.ambient_dim() + 1,
        (true, Some((p, _))) => p.coords().len(),
        (true, None) => 4,
    };
    let basis = MonomialBasis::new(num_vars, d);
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for p in cfg.points() {
        let powers = power_table(p, d);
        rows.push(basis.exponents().map(|e| monomial_value(e, &powers)).collect());
    }
    if let Some((p, m)) = fat {
        assert!(m >= 1, "multiplicity must be at least 1");
        assert_eq!(p.coords().len(), num_vars, "fat point ambient mismatch");
        let powers = power_table(p, d);
        // Euler's identity chains order-k vanishing down from order k+1 for
        // homogeneous forms, so the exact-order rows carry all conditions.
        // Capping at d covers multiplicities beyond d + 1: order-d partials
        // of a degree-d form are its (scaled) coefficients.
        let order = (m - 1).min(d);
        for beta in MonomialBasis::new(num_vars, order).exponents() {
            rows.push(basis.exponents().map(|e| derivative_entry(e, beta, &powers)).collect());
        }
    }
    if rows.is_empty() {
        return Matrix::zero(0, basis.len());
    }
    Matrix::from_integer_rows(rows)
}

/// Dimension of the degree-d piece of the ideal of the configuration.
pub fn ideal_dim(cfg: &PointConfig, d: u32) -> usize {
    let m = condition_matrix(cfg, d, None);
    m.cols() - m.rank()
}

/// Dimension of the degree-d piece of the ideal of the configuration plus
/// a fat point of multiplicity `m` at `p`.
pub fn fat_ideal_dim(cfg: &PointConfig, p: &ProjPoint, m: u32, d: u32) -> usize {
    let mat = condition_matrix(cfg, d, Some((p, m)));
    mat.cols() - mat.rank()
}

/// Hilbert function of the configuration at degree `t`.
pub fn hilbert_function(cfg: &PointConfig, t: u32) -> usize {
    condition_matrix(cfg, t, None).rank()
}

/// First difference of the Hilbert function, trimmed after the last
/// nonzero entry. Sums to the number of points; starts with 1 for any
/// nonempty configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HVector {
    pub values: Vec<usize>,
}

impl HVector {
    pub fn sum(&self) -> usize {
        self.values.iter().sum()
    }
}

impl fmt::Display for HVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Computes the h-vector by differencing the Hilbert function. The
/// function stabilizes at |cfg| no later than degree |cfg| - 1, so the
/// scan stops at stabilization.
pub fn h_vector(cfg: &PointConfig) -> HVector {
    let n = cfg.len();
    if n == 0 {
        return HVector { values: Vec::new() };
    }
    let mut values = Vec::new();
    let mut prev = 0usize;
    for t in 0..n as u32 {
        let h = hilbert_function(cfg, t);
        values.push(h - prev);
        prev = h;
        if h == n {
            break;
        }
    }
    while values.last() == Some(&0) {
        values.pop();
    }
    HVector { values }
}

/// Multiplicity of a nonzero form at a point: the smallest derivative
/// order with a nonvanishing value. Vanishing to order m at p means every
/// derivative of order below m is zero there.
pub fn multiplicity_at(f: &Form, p: &ProjPoint) -> Result<usize, IdealsError> {
    if f.is_zero() {
        return Err(IdealsError::ZeroForm);
    }
    for order in 0..=f.degree() {
        let basis = MonomialBasis::new(f.num_vars(), order);
        let all_zero = basis.exponents().all(|beta| f.derivative_at(beta, p).is_zero());
        if !all_zero {
            return Ok(order as usize);
        }
    }
    unreachable!("a nonzero form has a nonzero derivative of its own degree");
}

/// Outcome of a complete intersection certification.
#[derive(Debug, Clone)]
pub struct CIVerdict {
    pub type_pair: (u32, u32),
    pub certified: bool,
    /// The witnessing pair of forms when certified.
    pub certificate: Option<(Form, Form)>,
    pub trials_used: u32,
}

/// Certifies that `cfg` (a plane configuration of exactly a*b points) is
/// the complete intersection of a degree-a and a degree-b curve.
///
/// Per trial, random forms F (degree a) and G (degree b) are drawn from
/// the kernels of the condition matrices. The pair is accepted when the
/// span of F and G times all monomials reaches dimension binom(t+2,2) - ab
/// in both degrees t = a+b-2 and t = a+b-1: that rules out common factors
/// and low-degree syzygies, so (F, G) is a regular sequence whose scheme
/// has length ab and contains the ab points, forcing equality. A yes is
/// therefore exact; after all trials fail the answer is probably-no.
pub fn is_complete_intersection(
    cfg: &PointConfig,
    a: u32,
    b: u32,
    protocol: &GenericityProtocol,
) -> Result<CIVerdict, IdealsError> {
    assert!(a >= 1 && a <= b, "type pair must be ordered and positive");
    assert_eq!(cfg.ambient_dim(), 2, "certification runs on plane configurations");
    let need = (a as usize) * (b as usize);
    if cfg.len() != need {
        return Err(IdealsError::DimensionMismatch { a, b, need, got: cfg.len() });
    }
    let kernel_a = condition_matrix(cfg, a, None).kernel_basis();
    if kernel_a.is_empty() {
        return Err(IdealsError::NoFormAvailable { degree: a });
    }
    let kernel_b =
        if b == a { kernel_a.clone() } else { condition_matrix(cfg, b, None).kernel_basis() };
    if kernel_b.is_empty() {
        return Err(IdealsError::NoFormAvailable { degree: b });
    }
    for trial in 0..protocol.trials {
        let mut rng = protocol.stream(&format!("ci:{a},{b}"), trial as u64);
        let f = random_kernel_form(&kernel_a, 3, a, &mut rng, protocol.height);
        let g = random_kernel_form(&kernel_b, 3, b, &mut rng, protocol.height);
        if colength_reached(&f, &g, a, b, a + b - 2) && colength_reached(&f, &g, a, b, a + b - 1) {
            return Ok(CIVerdict {
                type_pair: (a, b),
                certified: true,
                certificate: Some((f, g)),
                trials_used: trial + 1,
            });
        }
    }
    Ok(CIVerdict {
        type_pair: (a, b),
        certified: false,
        certificate: None,
        trials_used: protocol.trials,
    })
}

/// Random integer-coefficient combination of kernel vectors, normalized to
/// a primitive form. Resamples the (improbable) zero draw.
fn random_kernel_form(
    kernel: &[Vec<Rational>],
    num_vars: usize,
    degree: u32,
    rng: &mut RngState,
    height: u64,
) -> Form {
    let basis = MonomialBasis::new(num_vars, degree);
    loop {
        let mut coeffs = vec![Rational::zero(); basis.len()];
        for v in kernel {
            let lambda = sample_rational(rng, height);
            if lambda.is_zero() {
                continue;
            }
            for (c, x) in coeffs.iter_mut().zip(v) {
                if !x.is_zero() {
                    *c += &lambda * x;
                }
            }
        }
        let f = Form::new(basis.clone(), coeffs);
        if !f.is_zero() {
            return f.primitive();
        }
    }
}

/// Whether the degree-t piece of (F, G) has the full colength-ab
/// dimension binom(t+2,2) - ab.
fn colength_reached(f: &Form, g: &Form, a: u32, b: u32, t: u32) -> bool {
    let target = binomial(t as u64 + 2, 2) as usize - (a as usize) * (b as usize);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (form, deg) in [(f, a), (g, b)] {
        if t < deg {
            continue;
        }
        for mu in MonomialBasis::new(3, t - deg).exponents() {
            rows.push(form.mul_monomial(mu).coeffs);
        }
    }
    Matrix::from_rows(rows).rank() == target
}

/// Certification for the residual of a complete intersection: removing a
/// type-(a, c) subset from a type-(a, b) configuration must leave a
/// type-(a, b-c) complete intersection. Runs the certification on the
/// complement with the residual type (ordered).
pub fn residual_ci_check(
    cfg: &PointConfig,
    subset: &[usize],
    a: u32,
    b: u32,
    c: u32,
    protocol: &GenericityProtocol,
) -> Result<CIVerdict, IdealsError> {
    assert!(c < b, "residual degree must stay positive");
    let complement = cfg.without(subset);
    let (ra, rb) = (a.min(b - c), a.max(b - c));
    is_complete_intersection(&complement, ra, rb, protocol)
}
