//! Exact multivariate polynomials over the rationals, tensor-grid Lagrange
//! interpolation, and parity-stratified quasi-polynomials.
//!
//! A quasi-polynomial here is a family of polynomials indexed by the
//! classification of each argument as zero, odd, or nonzero even (so `3^n`
//! pieces for `n` variables); a piece is stored as a polynomial in the
//! variables that are not pinned to zero.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{rat_u, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("interpolation axis {axis} contains a duplicate node")]
    DuplicateNode { axis: usize },
    #[error("value tensor has {got} entries but the grid implies {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("invalid polynomial data: {0}")]
    InvalidData(String),
}

/// Exact multivariate polynomial: a finite map from exponent vectors to
/// non-zero rational coefficients. Terms iterate in lexicographic exponent
/// order, which keeps every serialised form byte-stable.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The monomial `x_idx`.
    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars, "variable index {idx} out of range");
        let mut exps = vec![0; nvars];
        exps[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exps, Rat::one());
        MultiPoly { nvars, terms }
    }

    /// Build from `(exponents, coefficient)` pairs; zero coefficients are
    /// dropped, repeated exponent vectors accumulate.
    pub fn from_terms<I>(nvars: usize, iter: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rat)>,
    {
        let mut p = MultiPoly::zero(nvars);
        for (exps, coeff) in iter {
            p.add_term(exps, coeff);
        }
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, coeff: Rat) {
        assert_eq!(
            exps.len(),
            self.nvars,
            "exponent vector length {} does not match arity {}",
            exps.len(),
            self.nvars
        );
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rat)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Stored coefficient of the given monomial, or zero.
    pub fn coefficient(&self, exps: &[u32]) -> Rat {
        assert_eq!(exps.len(), self.nvars, "coefficient: arity mismatch");
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars, "eval: arity mismatch");
        // Power tables keep repeated exponents cheap.
        let max_deg: Vec<u32> = (0..self.nvars)
            .map(|v| self.terms.keys().map(|e| e[v]).max().unwrap_or(0))
            .collect();
        let pows: Vec<Vec<Rat>> = point
            .iter()
            .zip(&max_deg)
            .map(|(x, &d)| {
                let mut col = Vec::with_capacity(d as usize + 1);
                col.push(Rat::one());
                for _ in 0..d {
                    col.push(col.last().unwrap() * x);
                }
                col
            })
            .collect();
        let mut acc = Rat::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (v, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term *= &pows[v][e as usize];
                }
            }
            acc += term;
        }
        acc
    }

    /// Evaluation at an integer point.
    pub fn eval_u64(&self, point: &[u64]) -> Rat {
        let pt: Vec<Rat> = point.iter().map(|&x| rat_u(x)).collect();
        self.eval(&pt)
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Degree in one variable, or `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        assert!(var < self.nvars);
        self.terms.keys().map(|e| e[var]).max()
    }

    /// True iff every stored exponent is odd in every variable (vacuously
    /// true for the zero polynomial).
    pub fn is_odd_each_variable(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x % 2 == 1))
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "add: arity mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> MultiPoly {
        if s.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "mul: arity mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    pub fn to_json(&self) -> MultiPolyJson {
        MultiPolyJson {
            vars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| PolyTermJson {
                    exps: e.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &MultiPolyJson) -> Result<MultiPoly, PolyError> {
        let mut p = MultiPoly::zero(json.vars);
        for t in &json.terms {
            if t.exps.len() != json.vars {
                return Err(PolyError::InvalidData(format!(
                    "term has {} exponents, expected {}",
                    t.exps.len(),
                    json.vars
                )));
            }
            let coeff: Rat = t.coeff.parse().map_err(|e| {
                PolyError::InvalidData(format!("bad coefficient {:?}: {e}", t.coeff))
            })?;
            p.add_term(t.exps.clone(), coeff);
        }
        Ok(p)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{coeff}")?;
            for (v, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{v}")?,
                    _ => write!(f, "*x{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MultiPolyJson {
    pub vars: usize,
    pub terms: Vec<PolyTermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyTermJson {
    pub exps: Vec<u32>,
    pub coeff: String,
}

/// Parity classification of one profile entry. Zero is its own class, not an
/// even number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ParityClass {
    Zero,
    Odd,
    Even,
}

impl ParityClass {
    pub fn classify(mu: u64) -> ParityClass {
        if mu == 0 {
            ParityClass::Zero
        } else if mu % 2 == 1 {
            ParityClass::Odd
        } else {
            ParityClass::Even
        }
    }

    pub fn matches(self, mu: u64) -> bool {
        ParityClass::classify(mu) == self
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ParityClass::Zero => "zero",
            ParityClass::Odd => "odd",
            ParityClass::Even => "even",
        }
    }

    pub fn from_str_name(s: &str) -> Option<ParityClass> {
        match s {
            "zero" => Some(ParityClass::Zero),
            "odd" => Some(ParityClass::Odd),
            "even" => Some(ParityClass::Even),
            _ => None,
        }
    }
}

/// One parity class per profile position.
pub type ParitySignature = Vec<ParityClass>;

/// All `3^n` signatures, in a fixed deterministic order.
pub fn all_signatures(n: usize) -> Vec<ParitySignature> {
    let classes = [ParityClass::Zero, ParityClass::Odd, ParityClass::Even];
    let mut out = Vec::with_capacity(3usize.pow(n as u32));
    let mut sig = vec![ParityClass::Zero; n];
    fn rec(
        pos: usize,
        n: usize,
        classes: &[ParityClass; 3],
        sig: &mut ParitySignature,
        out: &mut Vec<ParitySignature>,
    ) {
        if pos == n {
            out.push(sig.clone());
            return;
        }
        for &c in classes {
            sig[pos] = c;
            rec(pos + 1, n, classes, sig, out);
        }
    }
    rec(0, n, &classes, &mut sig, &mut out);
    out.sort();
    out
}

pub fn signature_of(profile: &[u64]) -> ParitySignature {
    profile.iter().map(|&m| ParityClass::classify(m)).collect()
}

/// Parity-stratified polynomial family: one polynomial per signature, in the
/// variables not pinned to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiPoly {
    nvars: usize,
    pieces: BTreeMap<ParitySignature, MultiPoly>,
}

impl QuasiPoly {
    pub fn new(nvars: usize) -> Self {
        QuasiPoly {
            nvars,
            pieces: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn insert_piece(&mut self, sig: ParitySignature, piece: MultiPoly) {
        assert_eq!(sig.len(), self.nvars, "signature length mismatch");
        let active = sig.iter().filter(|&&c| c != ParityClass::Zero).count();
        assert_eq!(
            piece.nvars(),
            active,
            "piece arity must equal the number of non-zero classes"
        );
        self.pieces.insert(sig, piece);
    }

    pub fn piece(&self, sig: &ParitySignature) -> Option<&MultiPoly> {
        self.pieces.get(sig)
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&ParitySignature, &MultiPoly)> {
        self.pieces.iter()
    }

    /// Evaluate the modelled function: classify the profile, drop the zero
    /// coordinates, and evaluate the matching piece.
    pub fn eval(&self, profile: &[u64]) -> Rat {
        assert_eq!(profile.len(), self.nvars, "eval: arity mismatch");
        let sig = signature_of(profile);
        let piece = self
            .pieces
            .get(&sig)
            .unwrap_or_else(|| panic!("no piece stored for signature {sig:?}"));
        let coords: Vec<u64> = profile.iter().copied().filter(|&m| m != 0).collect();
        piece.eval_u64(&coords)
    }

    pub fn to_json(&self) -> QuasiPolyJson {
        QuasiPolyJson {
            n: self.nvars,
            pieces: self
                .pieces
                .iter()
                .map(|(sig, poly)| QuasiPieceJson {
                    parity: sig.iter().map(|c| c.as_str().to_string()).collect(),
                    poly: poly.to_json(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &QuasiPolyJson) -> Result<QuasiPoly, PolyError> {
        let mut qp = QuasiPoly::new(json.n);
        for pj in &json.pieces {
            let sig: Option<ParitySignature> = pj
                .parity
                .iter()
                .map(|s| ParityClass::from_str_name(s))
                .collect();
            let sig = sig.ok_or_else(|| {
                PolyError::InvalidData(format!("bad parity class in {:?}", pj.parity))
            })?;
            if sig.len() != json.n {
                return Err(PolyError::InvalidData("signature length mismatch".into()));
            }
            qp.insert_piece(sig, MultiPoly::from_json(&pj.poly)?);
        }
        Ok(qp)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiPolyJson {
    pub n: usize,
    pub pieces: Vec<QuasiPieceJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiPieceJson {
    pub parity: Vec<String>,
    pub poly: MultiPolyJson,
}

/// Exact Lagrange interpolation on a tensor-product grid.
///
/// `grids[v]` holds the pairwise-distinct nodes of axis `v`; `values` is the
/// value tensor in row-major order with the last axis varying fastest. The
/// result is the unique polynomial of per-variable degree below the grid
/// size on each axis that matches every tensor entry exactly.
pub fn interpolate(grids: &[Vec<Rat>], values: &[Rat]) -> Result<MultiPoly, PolyError> {
    let nvars = grids.len();
    let shape: Vec<usize> = grids.iter().map(|g| g.len()).collect();
    let expected: usize = shape.iter().product();
    if values.len() != expected {
        return Err(PolyError::ShapeMismatch {
            expected,
            got: values.len(),
        });
    }
    for (axis, nodes) in grids.iter().enumerate() {
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if nodes[i] == nodes[j] {
                    return Err(PolyError::DuplicateNode { axis });
                }
            }
        }
    }
    if nvars == 0 {
        return Ok(MultiPoly::constant(0, values[0].clone()));
    }
    if expected == 0 {
        return Ok(MultiPoly::zero(nvars));
    }

    // Sweep one axis at a time, converting point values to monomial
    // coefficients along every line of the tensor.
    let mut tensor = values.to_vec();
    let mut stride_after = vec![1usize; nvars];
    for v in (0..nvars.saturating_sub(1)).rev() {
        stride_after[v] = stride_after[v + 1] * shape[v + 1];
    }
    for axis in 0..nvars {
        let m = shape[axis];
        let stride = stride_after[axis];
        let block = stride * m;
        let lines = expected / m;
        let mut line = vec![Rat::zero(); m];
        for l in 0..lines {
            let base = (l / stride) * block + (l % stride);
            for (t, slot) in line.iter_mut().enumerate() {
                *slot = tensor[base + t * stride].clone();
            }
            let coeffs = univariate_coefficients(&grids[axis], &line);
            for (t, c) in coeffs.into_iter().enumerate() {
                tensor[base + t * stride] = c;
            }
        }
    }

    let mut poly = MultiPoly::zero(nvars);
    let mut idx = vec![0usize; nvars];
    for flat in tensor {
        if !flat.is_zero() {
            poly.add_term(idx.iter().map(|&i| i as u32).collect(), flat);
        }
        for v in (0..nvars).rev() {
            idx[v] += 1;
            if idx[v] < shape[v] {
                break;
            }
            idx[v] = 0;
        }
    }
    Ok(poly)
}

/// Monomial coefficients of the unique degree-&lt;m polynomial through the m
/// points `(nodes[j], values[j])`, via the master product W(t) = Π(t - x_j)
/// and synthetic division by each root.
fn univariate_coefficients(nodes: &[Rat], values: &[Rat]) -> Vec<Rat> {
    let m = nodes.len();
    // W(t) = Π (t - x_j); w[k] is the coefficient of t^k.
    let mut w = vec![Rat::zero(); m + 1];
    w[0] = Rat::one();
    for (deg, x) in nodes.iter().enumerate() {
        let mut next = vec![Rat::zero(); m + 1];
        for k in 0..=deg {
            next[k + 1] += &w[k];
            next[k] -= x * &w[k];
        }
        w = next;
    }
    let mut out = vec![Rat::zero(); m];
    for (j, xj) in nodes.iter().enumerate() {
        if values[j].is_zero() {
            continue;
        }
        // q = W / (t - x_j) by synthetic division; q(x_j) = Π_{k≠j}(x_j - x_k).
        let mut q = vec![Rat::zero(); m];
        q[m - 1] = w[m].clone();
        for k in (0..m - 1).rev() {
            q[k] = &w[k + 1] + xj * &q[k + 1];
        }
        let mut denom = Rat::zero();
        let mut pw = Rat::one();
        for qk in &q {
            denom += qk * &pw;
            pw *= xj;
        }
        let scale = &values[j] / denom;
        for (k, qk) in q.iter().enumerate() {
            out[k] += qk * &scale;
        }
    }
    out
}
