//! Memoized counting engines for polygon diagrams (`P`), pruned polygon
//! diagrams (`Q`), and pruned arc diagrams (`N`) on a genus-`g` surface with
//! `n` boundary components, plus the cuff counts `L(b, a)` and the transform
//! that reassembles `P` from `Q` by gluing cuff diagrams back on.
//!
//! All three families are symmetric in the profile, so the shared cache is
//! keyed on the profile sorted in descending order and every recursion pivots
//! on the largest (hence positive) entry. The `*_pivot_first` entry points
//! skip the sort and pivot on the first entry as given; the symmetry suite
//! uses them to check that the pivot choice is immaterial.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::RwLock;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{bar, binomial, pow2, rat_u, ratio, tilde, tilde_sum, Rat};

/// Which count a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    P,
    Q,
    N,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::P => write!(f, "P"),
            Family::Q => write!(f, "Q"),
            Family::N => write!(f, "N"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" | "p" => Ok(Family::P),
            "Q" | "q" => Ok(Family::Q),
            "N" | "n" => Ok(Family::N),
            _ => Err(format!("unknown family {s:?} (expected p, q or n)")),
        }
    }
}

/// Topological type of a bordered surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceClass {
    pub g: u32,
    pub n: usize,
}

impl SurfaceClass {
    pub fn new(g: u32, n: usize) -> SurfaceClass {
        assert!(n >= 1, "a surface needs at least one boundary component");
        SurfaceClass { g, n }
    }

    pub fn is_disc(&self) -> bool {
        (self.g, self.n) == (0, 1)
    }

    pub fn is_annulus(&self) -> bool {
        (self.g, self.n) == (0, 2)
    }

    pub fn is_pants(&self) -> bool {
        (self.g, self.n) == (0, 3)
    }

    /// Stable surface types are everything except the disc and the annulus;
    /// the structural theorems apply exactly there.
    pub fn is_stable(&self) -> bool {
        !self.is_disc() && !self.is_annulus()
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.g, self.n)
    }
}

/// Memo identity of one count: family, genus, and the profile in canonical
/// (descending) order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountKey {
    pub family: Family,
    pub g: u32,
    pub profile: Vec<u64>,
}

impl CountKey {
    pub fn new(family: Family, g: u32, profile: Vec<u64>) -> CountKey {
        debug_assert!(
            profile.windows(2).all(|w| w[0] >= w[1]),
            "profile not canonical"
        );
        CountKey { family, g, profile }
    }

    fn render(&self, value: &Rat) -> String {
        let mu: Vec<String> = self.profile.iter().map(|m| m.to_string()).collect();
        format!(
            "{} {} {} {} {}",
            self.family,
            self.g,
            self.profile.len(),
            mu.join(","),
            value
        )
    }
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Shared write-once memo for all three families. Concurrent lookups are
/// fine; a key is written at most once and every stored value is a
/// non-negative integer.
#[derive(Debug, Default)]
pub struct CountCache {
    map: RwLock<HashMap<CountKey, Rat>>,
}

impl CountCache {
    pub fn new() -> CountCache {
        CountCache::default()
    }

    pub fn get(&self, key: &CountKey) -> Option<Rat> {
        self.map.read().unwrap().get(key).cloned()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Store a value. Racing computations of the same key must agree, so a
    /// second insert with a different value is a contract violation.
    pub fn insert(&self, key: CountKey, value: Rat) {
        self.try_insert(key, value).unwrap()
    }

    fn try_insert(&self, key: CountKey, value: Rat) -> Result<(), String> {
        if !value.is_integer() || value.is_negative() {
            return Err(format!(
                "count {key:?} = {value} is not a non-negative integer"
            ));
        }
        let mut map = self.map.write().unwrap();
        match map.entry(key) {
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(value);
                Ok(())
            }
            std::collections::hash_map::Entry::Occupied(o) => {
                if *o.get() == value {
                    Ok(())
                } else {
                    Err(format!(
                        "cache key {:?} already holds {}, refusing {}",
                        o.key(),
                        o.get(),
                        value
                    ))
                }
            }
        }
    }

    /// All entries, sorted by their rendered line.
    pub fn lines(&self) -> Vec<String> {
        let map = self.map.read().unwrap();
        let mut lines: Vec<String> = map.iter().map(|(k, v)| k.render(v)).collect();
        lines.sort();
        lines
    }

    /// Persist as line-oriented text, one `FAMILY g n mu1,...,mun VALUE`
    /// record per line, lexicographically sorted.
    pub fn save(&self, path: &Path) -> Result<(), CacheError> {
        let mut f = std::fs::File::create(path)?;
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }

    /// Load a persisted cache, rejecting unknown or malformed lines.
    /// Returns the number of records read.
    pub fn load(&self, path: &Path) -> Result<usize, CacheError> {
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut count = 0usize;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let parse = |msg: String| CacheError::Parse { line: lineno, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(parse(format!(
                    "expected 5 fields `FAMILY g n profile value`, got {}",
                    fields.len()
                )));
            }
            let family: Family = fields[0].parse().map_err(parse)?;
            let g: u32 = fields[1]
                .parse()
                .map_err(|e| parse(format!("bad genus: {e}")))?;
            let n: usize = fields[2]
                .parse()
                .map_err(|e| parse(format!("bad boundary count: {e}")))?;
            if n == 0 {
                return Err(parse("boundary count must be at least 1".into()));
            }
            let profile: Result<Vec<u64>, _> =
                fields[3].split(',').map(|t| t.parse::<u64>()).collect();
            let profile = profile.map_err(|e| parse(format!("bad profile: {e}")))?;
            if profile.len() != n {
                return Err(parse(format!(
                    "profile has {} entries, header says {n}",
                    profile.len()
                )));
            }
            if !profile.windows(2).all(|w| w[0] >= w[1]) {
                return Err(parse("profile is not sorted in descending order".into()));
            }
            let value: Rat = fields[4]
                .parse()
                .map_err(|e| parse(format!("bad value: {e}")))?;
            self.try_insert(CountKey::new(family, g, profile), value)
                .map_err(parse)?;
            count += 1;
        }
        Ok(count)
    }
}

/// Number of cuff diagrams on an annulus with `b` outer and `a` inner
/// vertices and no edge joining two inner vertices.
pub fn cuff_count(b: u64, a: u64) -> Rat {
    if a > b {
        return Rat::zero();
    }
    if b == 0 {
        return Rat::one(); // a == 0 here
    }
    if a == 0 {
        return binomial(2 * b as i64, b as i64) * ratio(1, 2);
    }
    rat_u(a) * binomial(2 * b as i64, (b - a) as i64)
}

/// Closed-form pruned counts: discs, annuli, pairs of pants, and the empty
/// profile on any surface. `None` means the recursion must be used.
pub fn q_base(g: u32, profile: &[u64]) -> Option<Rat> {
    let mu = canonical(profile);
    if mu.iter().all(|&m| m == 0) {
        return Some(Rat::one());
    }
    match (g, mu.len()) {
        (0, 1) => Some(Rat::zero()),
        (0, 2) => Some(if mu[0] == mu[1] {
            rat_u(bar(mu[0]))
        } else {
            Rat::zero()
        }),
        (0, 3) => Some(q_pants(&mu)),
        _ => None,
    }
}

// Case analysis on a pair of pants, profile sorted descending.
fn q_pants(mu: &[u64]) -> Rat {
    if mu[2] > 0 {
        rat_u(2) * rat_u(mu[0]) * rat_u(mu[1]) * rat_u(mu[2])
    } else if mu[1] > 0 {
        rat_u(mu[0] * mu[1])
    } else if mu[0] % 2 == 0 {
        rat_u(bar(mu[0]))
    } else {
        Rat::zero()
    }
}

/// Closed-form pruned count on the one-holed torus. The engine computes
/// this surface through the recursion; the closed form exists as an
/// independent oracle for it.
pub fn q11_closed(mu: u64) -> Rat {
    if mu == 0 {
        Rat::one()
    } else if mu % 2 == 1 {
        ratio(1, 24) * (rat_u(mu * mu * mu) - rat_u(mu))
    } else {
        ratio(1, 24) * (rat_u(mu * mu * mu) + rat_u(8 * mu))
    }
}

/// Closed-form polygon counts for discs, annuli, pairs of pants and the
/// one-holed torus; `None` elsewhere.
pub fn p_closed(g: u32, profile: &[u64]) -> Option<Rat> {
    let mu = canonical(profile);
    match (g, mu.len()) {
        (0, 1) => Some(p_disc(mu[0])),
        (0, 2) => Some(p_annulus(mu[0], mu[1])),
        (0, 3) => Some(p_pants(&mu)),
        (1, 1) => Some(p_torus(mu[0])),
        _ => None,
    }
}

fn p_disc(m: u64) -> Rat {
    if m == 0 {
        return Rat::one();
    }
    binomial(2 * m as i64 - 1, m as i64) * ratio(2, m as i64 + 1)
}

fn p_annulus(m1: u64, m2: u64) -> Rat {
    // m1 >= m2
    let b1 = binomial(2 * m1 as i64 - 1, m1 as i64);
    if m2 == 0 {
        return b1;
    }
    let b2 = binomial(2 * m2 as i64 - 1, m2 as i64);
    let connected = ratio(2 * (m1 * m2) as i64, (m1 + m2) as i64);
    b1 * b2 * (connected + Rat::one())
}

fn p_pants(mu: &[u64]) -> Rat {
    let mut prod = Rat::one();
    for &m in mu {
        prod *= binomial(2 * m as i64 - 1, m as i64);
    }
    let mut bracket = rat_u(2 * mu[0] * mu[1] * mu[2]);
    // sum over unordered pairs
    for i in 0..3 {
        for j in i + 1..3 {
            bracket += rat_u(mu[i] * mu[j]);
        }
    }
    for &m in mu {
        // (m^2 - m)/(2m - 1), evaluated as written (0 at m = 0)
        bracket += Rat::new(
            (rat_u(m * m) - rat_u(m)).to_integer(),
            (rat_u(2 * m) - Rat::one()).to_integer(),
        );
    }
    bracket += Rat::one();
    prod * bracket
}

fn p_torus(m: u64) -> Rat {
    // The closed form already evaluates to 1 at m = 0 under the binomial
    // convention.
    let m = m as i64;
    binomial(2 * m - 1, m)
        * Rat::new(1.into(), (2 * m - 1).into())
        * ratio(m * m * m + 3 * m * m + 20 * m - 12, 12)
}

fn n_pants(mu: &[u64]) -> Rat {
    if mu.iter().sum::<u64>() % 2 == 1 {
        Rat::zero()
    } else {
        rat_u(bar(mu[0]) * bar(mu[1]) * bar(mu[2]))
    }
}

fn n_torus(m: u64) -> Rat {
    if m == 0 {
        Rat::one()
    } else if m % 2 == 1 {
        Rat::zero()
    } else {
        ratio(1, 48) * (rat_u(m * m * m) + rat_u(20 * m))
    }
}

fn canonical(profile: &[u64]) -> Vec<u64> {
    let mut mu = profile.to_vec();
    mu.sort_unstable_by(|a, b| b.cmp(a));
    mu
}

fn prepend(head: u64, rest: &[u64]) -> Vec<u64> {
    let mut v = Vec::with_capacity(rest.len() + 1);
    v.push(head);
    v.extend_from_slice(rest);
    v
}

fn prepend2(a: u64, b: u64, rest: &[u64]) -> Vec<u64> {
    let mut v = Vec::with_capacity(rest.len() + 2);
    v.push(a);
    v.push(b);
    v.extend_from_slice(rest);
    v
}

fn without(rest: &[u64], k: usize) -> Vec<u64> {
    rest.iter()
        .enumerate()
        .filter(|(idx, _)| *idx != k)
        .map(|(_, &v)| v)
        .collect()
}

fn disc_or_annulus(g: u32, n: usize) -> bool {
    g == 0 && (n == 1 || n == 2)
}

fn split_by_mask(rest: &[u64], mask: u32) -> (Vec<u64>, Vec<u64>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (idx, &v) in rest.iter().enumerate() {
        if mask & (1 << idx) != 0 {
            left.push(v);
        } else {
            right.push(v);
        }
    }
    (left, right)
}

/// The counting engine. Deterministic and pure modulo the shared memo; a
/// single instance can be used from several threads.
#[derive(Debug, Default)]
pub struct Counter {
    cache: CountCache,
    transform_memo: RwLock<HashMap<(u32, Vec<u64>), Rat>>,
}

impl Counter {
    pub fn new() -> Counter {
        Counter::default()
    }

    pub fn cache(&self) -> &CountCache {
        &self.cache
    }

    /// Dispatch by family: `P` via its recursion, `Q` and `N` via theirs.
    pub fn count(&self, family: Family, g: u32, profile: &[u64]) -> Rat {
        match family {
            Family::P => self.p_recursive(g, profile),
            Family::Q => self.q_count(g, profile),
            Family::N => self.n_count(g, profile),
        }
    }

    /// Pruned polygon diagram count.
    pub fn q_count(&self, g: u32, profile: &[u64]) -> Rat {
        assert!(!profile.is_empty(), "profile must be non-empty");
        let mu = canonical(profile);
        let key = CountKey::new(Family::Q, g, mu.clone());
        if let Some(v) = self.cache.get(&key) {
            return v;
        }
        let val = q_base(g, &mu).unwrap_or_else(|| self.q_step(g, &mu));
        self.cache.insert(key, val.clone());
        val
    }

    /// One unrolled step of the pruned recursion pivoting on the first
    /// entry, which must be positive. Sub-counts go through the canonical
    /// engine, so this checks that the pivot position is immaterial.
    pub fn q_pivot_first(&self, g: u32, profile: &[u64]) -> Rat {
        assert!(profile[0] > 0, "pivot entry must be positive");
        assert!(
            !matches!((g, profile.len()), (0, 1) | (0, 2) | (0, 3)),
            "the pruned recursion does not apply to discs, annuli or pants"
        );
        self.q_step(g, profile)
    }

    fn q_step(&self, g: u32, mu: &[u64]) -> Rat {
        let mu1 = mu[0];
        let rest = &mu[1..];
        let mut total = Rat::zero();

        // Cut a non-separating edge from the pivot boundary to itself:
        // genus drops, one boundary splits in two.
        if g >= 1 {
            for i in 1..=mu1 {
                for j in 0..=(mu1 - i) {
                    let m = mu1 - i - j;
                    if m == 0 {
                        continue;
                    }
                    total += rat_u(m) * self.q_count(g - 1, &prepend2(i, j, rest));
                }
            }
            let t = tilde(mu1 as i64) as u64;
            if t > 0 {
                total += rat_u(t / 2) * self.q_count(g - 1, &prepend2(0, 0, rest));
            }
        }

        // Merge the pivot boundary with another one.
        for (k, &muk) in rest.iter().enumerate() {
            let others = without(rest, k);
            if muk > 0 {
                for i in 1..=(mu1 + muk) {
                    let m = mu1 + muk - i;
                    if m == 0 {
                        continue;
                    }
                    total += rat_u(m) * rat_u(muk) * self.q_count(g, &prepend(i, &others));
                }
                let d = mu1 as i64 - muk as i64;
                total +=
                    rat_u(muk) * tilde_sum(d, |i, _| self.q_count(g, &prepend(i as u64, &others)));
                total += rat_u(mu1 * muk) * self.q_count(g, &prepend(0, &others));
            } else {
                for i in 1..=mu1 {
                    let m = mu1 - i;
                    if m == 0 {
                        continue;
                    }
                    total += rat_u(m) * self.q_count(g, &prepend(i, &others));
                }
                let t = tilde(mu1 as i64) as u64;
                if t > 0 {
                    total += rat_u(t) * self.q_count(g, &prepend(0, &others));
                }
            }
        }

        // Cut a separating edge: the surface splits into two stable parts.
        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0..(1u32 << rest.len()) {
                let (part_i, part_j) = split_by_mask(rest, mask);
                if disc_or_annulus(g1, part_i.len() + 1) || disc_or_annulus(g2, part_j.len() + 1) {
                    continue;
                }
                for i in 1..=mu1 {
                    for j in 0..=(mu1 - i) {
                        let m = mu1 - i - j;
                        if m == 0 {
                            continue;
                        }
                        total += rat_u(m)
                            * self.q_count(g1, &prepend(i, &part_i))
                            * self.q_count(g2, &prepend(j, &part_j));
                    }
                }
                let t = tilde(mu1 as i64) as u64;
                if t > 0 {
                    total += rat_u(t / 2)
                        * self.q_count(g1, &prepend(0, &part_i))
                        * self.q_count(g2, &prepend(0, &part_j));
                }
            }
        }
        total
    }

    /// Polygon diagram count through its own recursion. Discs and annuli
    /// come from their closed forms; everything else recurses.
    pub fn p_recursive(&self, g: u32, profile: &[u64]) -> Rat {
        assert!(!profile.is_empty(), "profile must be non-empty");
        let mu = canonical(profile);
        let key = CountKey::new(Family::P, g, mu.clone());
        if let Some(v) = self.cache.get(&key) {
            return v;
        }
        let val = if mu.iter().all(|&m| m == 0) {
            Rat::one()
        } else if disc_or_annulus(g, mu.len()) {
            p_closed(g, &mu).unwrap()
        } else {
            self.p_step(g, &mu)
        };
        self.cache.insert(key, val.clone());
        val
    }

    /// One unrolled step of the polygon recursion pivoting on the first
    /// entry (which must be positive).
    pub fn p_pivot_first(&self, g: u32, profile: &[u64]) -> Rat {
        assert!(profile[0] > 0, "pivot entry must be positive");
        assert!(
            !disc_or_annulus(g, profile.len()),
            "discs and annuli are served by closed forms"
        );
        self.p_step(g, profile)
    }

    fn p_step(&self, g: u32, mu: &[u64]) -> Rat {
        let mu1 = mu[0];
        let rest = &mu[1..];

        // Remove a 1-gon at the decorated point.
        let mut total = self.p_recursive(g, &prepend(mu1 - 1, rest));

        // Merge the pivot boundary with boundary k (μ_k placements).
        for (k, &muk) in rest.iter().enumerate() {
            if muk == 0 {
                continue;
            }
            let others = without(rest, k);
            total += rat_u(muk) * self.p_recursive(g, &prepend(mu1 + muk - 1, &others));
        }

        // Cut along the outgoing edge: non-separating or separating.
        for j in 1..mu1 {
            let i = mu1 - 1 - j;
            if g >= 1 {
                total += self.p_recursive(g - 1, &prepend2(i, j, rest));
            }
            for g1 in 0..=g {
                let g2 = g - g1;
                for mask in 0..(1u32 << rest.len()) {
                    let (part_i, part_j) = split_by_mask(rest, mask);
                    total += self.p_recursive(g1, &prepend(i, &part_i))
                        * self.p_recursive(g2, &prepend(j, &part_j));
                }
            }
        }
        total
    }

    /// Polygon count reassembled from pruned counts: glue a cuff diagram on
    /// every boundary. Uses the primed normalisation, where counts are
    /// halved once per zero entry.
    pub fn p_from_q(&self, g: u32, profile: &[u64]) -> Rat {
        let mu = canonical(profile);
        let n = mu.len();
        assert!(
            !disc_or_annulus(g, n),
            "the cuff transform applies to stable surfaces only"
        );
        if let Some(v) = self.transform_memo.read().unwrap().get(&(g, mu.clone())) {
            return v.clone();
        }

        let btab: Vec<Vec<Rat>> = mu
            .iter()
            .map(|&m| {
                (0..=m)
                    .map(|v| binomial(2 * m as i64, (m - v) as i64))
                    .collect()
            })
            .collect();

        let mut pprime = Rat::zero();
        let mut nu = vec![0u64; n];
        loop {
            let q = self.q_count(g, &nu);
            if !q.is_zero() {
                let zeros = nu.iter().filter(|&&v| v == 0).count() as i64;
                let mut term = q * pow2(-zeros);
                for (axis, &v) in nu.iter().enumerate() {
                    term *= &btab[axis][v as usize];
                }
                pprime += term;
            }
            // odometer over the box 0..=mu_i
            let mut axis = n;
            loop {
                if axis == 0 {
                    break;
                }
                axis -= 1;
                if nu[axis] < mu[axis] {
                    nu[axis] += 1;
                    break;
                }
                nu[axis] = 0;
            }
            if nu.iter().all(|&v| v == 0) {
                break;
            }
        }

        let zeros = mu.iter().filter(|&&v| v == 0).count() as i64;
        let p = pow2(zeros) * pprime;
        self.transform_memo
            .write()
            .unwrap()
            .entry((g, mu))
            .or_insert_with(|| p.clone());
        p
    }

    /// Pruned arc diagram count. The one-holed torus and the pair of pants
    /// are hard base cases; discs and annuli are outside the domain of this
    /// family (except for the empty profile).
    pub fn n_count(&self, g: u32, profile: &[u64]) -> Rat {
        assert!(!profile.is_empty(), "profile must be non-empty");
        let mu = canonical(profile);
        let key = CountKey::new(Family::N, g, mu.clone());
        if let Some(v) = self.cache.get(&key) {
            return v;
        }
        let val = if mu.iter().all(|&m| m == 0) {
            Rat::one()
        } else {
            assert!(
                !disc_or_annulus(g, mu.len()),
                "arc counts on discs and annuli are not defined here"
            );
            match (g, mu.len()) {
                (0, 3) => n_pants(&mu),
                (1, 1) => n_torus(mu[0]),
                _ => self.n_step(g, &mu),
            }
        };
        self.cache.insert(key, val.clone());
        val
    }

    /// One unrolled step of the arc recursion pivoting on the first entry.
    pub fn n_pivot_first(&self, g: u32, profile: &[u64]) -> Rat {
        assert!(profile[0] > 0, "pivot entry must be positive");
        assert!(
            !matches!((g, profile.len()), (0, 1) | (0, 2) | (0, 3) | (1, 1)),
            "the arc recursion does not apply to base surfaces"
        );
        self.n_step(g, profile)
    }

    fn n_step(&self, g: u32, mu: &[u64]) -> Rat {
        let mu1 = mu[0];
        let rest = &mu[1..];
        let mut total = Rat::zero();

        if g >= 1 {
            for m in (2..=mu1).step_by(2) {
                for i in 0..=(mu1 - m) {
                    let j = mu1 - m - i;
                    total += rat_u(m / 2) * self.n_count(g - 1, &prepend2(i, j, rest));
                }
            }
        }

        for (k, &muk) in rest.iter().enumerate() {
            let others = without(rest, k);
            if muk > 0 {
                for m in (2..=(mu1 + muk)).step_by(2) {
                    let i = mu1 + muk - m;
                    total += rat_u(m / 2) * rat_u(muk) * self.n_count(g, &prepend(i, &others));
                }
                let d = mu1 as i64 - muk as i64;
                if d > 0 {
                    for m in (2..=d as u64).step_by(2) {
                        let i = d as u64 - m;
                        total += rat_u(m / 2) * rat_u(muk) * self.n_count(g, &prepend(i, &others));
                    }
                } else if d < 0 {
                    for m in (2..=(-d) as u64).step_by(2) {
                        let i = (-d) as u64 - m;
                        total -= rat_u(m / 2) * rat_u(muk) * self.n_count(g, &prepend(i, &others));
                    }
                }
            } else {
                // m parallel arcs around an empty boundary have all 2m
                // endpoints on the pivot boundary: decoration multiplicity
                // 2m, hence weight m in the even-m sum.
                for m in (2..=mu1).step_by(2) {
                    let i = mu1 - m;
                    total += rat_u(m) * self.n_count(g, &prepend(i, &others));
                }
            }
        }

        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0..(1u32 << rest.len()) {
                let (part_i, part_j) = split_by_mask(rest, mask);
                if disc_or_annulus(g1, part_i.len() + 1) || disc_or_annulus(g2, part_j.len() + 1) {
                    continue;
                }
                for m in (2..=mu1).step_by(2) {
                    for i in 0..=(mu1 - m) {
                        let j = mu1 - m - i;
                        total += rat_u(m / 2)
                            * self.n_count(g1, &prepend(i, &part_i))
                            * self.n_count(g2, &prepend(j, &part_j));
                    }
                }
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn counter() -> Counter {
        Counter::new()
    }

    #[test]
    fn cuff_counts() {
        assert_eq!(cuff_count(2, 0), rat(3));
        assert_eq!(cuff_count(3, 1), rat(15));
        assert_eq!(cuff_count(0, 0), rat(1));
        assert_eq!(cuff_count(1, 3), rat(0)); // more inner than outer vertices
        assert_eq!(cuff_count(3, 3), rat(3)); // a * C(2b, 0)
    }

    #[test]
    fn q_base_values() {
        assert_eq!(q_base(0, &[0]), Some(rat(1)));
        assert_eq!(q_base(0, &[4]), Some(rat(0)));
        assert_eq!(q_base(0, &[3, 3]), Some(rat(3)));
        assert_eq!(q_base(0, &[3, 2]), Some(rat(0)));
        assert_eq!(q_base(0, &[1, 1, 1]), Some(rat(2)));
        assert_eq!(q_base(0, &[2, 1, 1]), Some(rat(4)));
        assert_eq!(q_base(0, &[4, 0, 0]), Some(rat(4)));
        assert_eq!(q_base(0, &[3, 0, 0]), Some(rat(0)));
        assert_eq!(q_base(0, &[0, 4, 0]), Some(rat(4))); // sorted internally
        assert_eq!(q_base(0, &[2, 2, 0]), Some(rat(4)));
        assert_eq!(q_base(5, &[0, 0, 0, 0]), Some(rat(1)));
        assert_eq!(q_base(1, &[3]), None);
    }

    #[test]
    fn q_torus_matches_closed_form() {
        let ct = counter();
        for mu in 0..=24u64 {
            assert_eq!(ct.q_count(1, &[mu]), q11_closed(mu), "mu = {mu}");
        }
    }

    #[test]
    fn q_spot_values() {
        let ct = counter();
        assert_eq!(ct.q_count(1, &[4]), rat(4));
        assert_eq!(ct.q_count(1, &[3]), rat(1));
        assert_eq!(ct.q_count(1, &[1, 1]), rat(1));
        assert_eq!(ct.q_count(0, &[2, 1, 1]), rat(4));
        // hand-evaluated: each boundary merge contributes Q(1,1,1)+1 = 3
        assert_eq!(ct.q_count(0, &[1, 1, 1, 1]), rat(9));
    }

    #[test]
    fn p_closed_values() {
        // Catalan numbers on the disc
        let catalan = [1i64, 1, 2, 5, 14, 42, 132];
        for (m, &c) in catalan.iter().enumerate() {
            assert_eq!(p_closed(0, &[m as u64]), Some(rat(c)), "mu = {m}");
        }
        assert_eq!(p_closed(0, &[1, 1]), Some(rat(2)));
        assert_eq!(p_closed(0, &[2, 1]), Some(rat(7)));
        assert_eq!(p_closed(0, &[2, 0]), Some(rat(3)));
        assert_eq!(p_closed(0, &[0, 0]), Some(rat(1)));
        assert_eq!(p_closed(1, &[2]), Some(rat(4)));
        assert_eq!(p_closed(1, &[3]), Some(rat(17)));
        assert_eq!(p_closed(1, &[0]), Some(rat(1)));
        assert_eq!(p_closed(0, &[1, 1, 1]), Some(rat(6)));
        assert_eq!(p_closed(0, &[2, 1, 1]), Some(rat(32)));
        assert_eq!(p_closed(0, &[0, 0, 0]), Some(rat(1)));
        assert_eq!(p_closed(2, &[1]), None);
        assert_eq!(p_closed(0, &[1, 1, 1, 1]), None);
    }

    #[test]
    fn p_recursive_spot_values() {
        let ct = counter();
        // hand-unrolled: 1-gon removal + non-separating cut + two splittings
        assert_eq!(ct.p_recursive(1, &[2]), rat(4));
        assert_eq!(ct.p_recursive(1, &[4]), rat(75));
        assert_eq!(ct.p_recursive(0, &[1, 1, 1]), rat(6));
        assert_eq!(ct.p_recursive(0, &[2, 1, 1]), rat(32));
        assert_eq!(ct.p_recursive(3, &[0, 0]), rat(1));
    }

    #[test]
    fn p_transform_spot_values() {
        let ct = counter();
        assert_eq!(ct.p_from_q(1, &[2]), rat(4));
        assert_eq!(ct.p_from_q(1, &[3]), rat(17));
        assert_eq!(ct.p_from_q(0, &[2, 1, 1]), rat(32));
    }

    #[test]
    fn routes_agree_beyond_small_profiles() {
        let ct = counter();
        for mu in [10u64, 13] {
            assert_eq!(ct.p_recursive(2, &[mu]), ct.p_from_q(2, &[mu]), "mu = {mu}");
        }
        assert_eq!(ct.p_recursive(1, &[8, 5]), ct.p_from_q(1, &[8, 5]));
        assert_eq!(ct.p_recursive(0, &[7, 3, 9]), ct.p_from_q(0, &[7, 3, 9]));
    }

    #[test]
    fn transform_agrees_with_unprimed_cuff_gluing() {
        // P(μ) = Σ_ν Q(ν) Π L(μ_i, ν_i)/bar(ν_i): the piecewise cuff counts
        // give the same transform without the primed normalisation.
        let ct = counter();
        for mu in 0..=8u64 {
            let mut total = Rat::zero();
            for nu in 0..=mu {
                total += ct.q_count(1, &[nu]) * cuff_count(mu, nu) / rat_u(bar(nu));
            }
            assert_eq!(total, ct.p_from_q(1, &[mu]), "mu = {mu}");
        }
        for m1 in 0..=3u64 {
            for m2 in 0..=3u64 {
                for m3 in 0..=3u64 {
                    let mut total = Rat::zero();
                    for n1 in 0..=m1 {
                        for n2 in 0..=m2 {
                            for n3 in 0..=m3 {
                                total += ct.q_count(0, &[n1, n2, n3])
                                    * cuff_count(m1, n1)
                                    * cuff_count(m2, n2)
                                    * cuff_count(m3, n3)
                                    / rat_u(bar(n1) * bar(n2) * bar(n3));
                            }
                        }
                    }
                    assert_eq!(total, ct.p_from_q(0, &[m1, m2, m3]), "{m1},{m2},{m3}");
                }
            }
        }
    }

    #[test]
    fn n_spot_values() {
        let ct = counter();
        assert_eq!(ct.n_count(1, &[2]), rat(1));
        assert_eq!(ct.n_count(1, &[4]), rat(3));
        assert_eq!(ct.n_count(1, &[3]), rat(0));
        assert_eq!(ct.n_count(0, &[1, 1, 2]), rat(2));
        assert_eq!(ct.n_count(0, &[2, 2, 2]), rat(8));
        assert_eq!(ct.n_count(1, &[1, 1]), rat(1));
        assert_eq!(ct.n_count(0, &[1, 1, 1, 1]), rat(3));
    }

    #[test]
    fn parity_vanishing() {
        let ct = counter();
        // N vanishes on odd total profiles
        for g in 0..=2u32 {
            for n in 1..=3usize {
                if disc_or_annulus(g, n) {
                    continue;
                }
                let mut profile = vec![0u64; n];
                profile[0] = 1;
                for total in [1u64, 3, 5, 7] {
                    profile[0] = total;
                    assert_eq!(ct.n_count(g, &profile), rat(0), "g={g} n={n} sum={total}");
                }
            }
        }
        // Q on the annulus vanishes off the diagonal
        for m1 in 0..=6u64 {
            for m2 in 0..=6u64 {
                if m1 != m2 {
                    assert_eq!(ct.q_count(0, &[m1, m2]), rat(0));
                }
            }
        }
    }

    #[test]
    fn pruned_count_never_exceeds_full_count() {
        let ct = counter();
        for mu in 0..=10u64 {
            assert!(ct.p_recursive(1, &[mu]) >= ct.q_count(1, &[mu]));
        }
        for m1 in 0..=4u64 {
            for m2 in 0..=m1 {
                for m3 in 0..=m2 {
                    assert!(ct.p_recursive(0, &[m1, m2, m3]) >= ct.q_count(0, &[m1, m2, m3]));
                }
            }
        }
    }

    #[test]
    fn pivot_position_is_immaterial() {
        let ct = counter();
        let canonical_val = ct.q_count(1, &[1, 4]);
        assert_eq!(ct.q_pivot_first(1, &[1, 4]), canonical_val);
        assert_eq!(ct.q_pivot_first(1, &[4, 1]), canonical_val);
        let p_val = ct.p_recursive(0, &[3, 1, 2]);
        assert_eq!(ct.p_pivot_first(0, &[1, 3, 2]), p_val);
        assert_eq!(ct.p_pivot_first(0, &[2, 1, 3]), p_val);
        let n_val = ct.n_count(1, &[2, 4]);
        assert_eq!(ct.n_pivot_first(1, &[2, 4]), n_val);
        assert_eq!(ct.n_pivot_first(1, &[4, 2]), n_val);
    }

    #[test]
    fn cache_write_once_and_integrality() {
        let cache = CountCache::new();
        let key = CountKey::new(Family::Q, 1, vec![4]);
        cache.insert(key.clone(), rat(4));
        cache.insert(key.clone(), rat(4)); // same value is fine
        assert!(cache
            .try_insert(key.clone(), rat(5))
            .unwrap_err()
            .contains("refusing"));
        assert!(cache
            .try_insert(CountKey::new(Family::Q, 1, vec![2]), ratio(1, 2))
            .unwrap_err()
            .contains("not a non-negative integer"));
        let neg = CountKey::new(Family::P, 0, vec![1]);
        assert!(cache.try_insert(neg, rat(-1)).is_err());
    }

    #[test]
    fn cache_round_trips_through_disk() {
        let dir = std::env::temp_dir().join(format!("polycount-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("counts.txt");

        let ct = counter();
        ct.q_count(1, &[4]);
        ct.p_recursive(0, &[3]);
        ct.cache().save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("Q 1 1 4 4"));
        let mut sorted = text.lines().map(String::from).collect::<Vec<_>>();
        sorted.sort();
        assert_eq!(sorted, text.lines().map(String::from).collect::<Vec<_>>());

        let other = counter();
        let loaded = other.cache().load(&path).unwrap();
        assert_eq!(loaded, ct.cache().len());
        assert_eq!(other.q_count(1, &[4]), rat(4));

        // re-saving reproduces the file byte for byte
        let path2 = dir.join("counts2.txt");
        other.cache().save(&path2).unwrap();
        assert_eq!(std::fs::read_to_string(&path2).unwrap(), text);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn cache_load_rejects_unknown_lines() {
        let dir = std::env::temp_dir().join(format!("polycount-badcache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        for (name, line, needle) in [
            ("junk.txt", "howdy", "expected 5 fields"),
            ("family.txt", "X 0 1 3 5", "unknown family"),
            ("profile.txt", "Q 0 2 3 5", "profile has 1 entries"),
            ("order.txt", "Q 0 2 1,3 0", "not sorted"),
            ("value.txt", "Q 1 1 4 4/3", "not a non-negative integer"),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, format!("{line}\n")).unwrap();
            let err = CountCache::new().load(&path).unwrap_err().to_string();
            assert!(err.contains(needle), "{name}: {err}");
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn concurrent_computation_agrees() {
        let ct = std::sync::Arc::new(counter());
        let mut handles = Vec::new();
        for _ in 0..4 {
            let ct = ct.clone();
            handles.push(std::thread::spawn(move || ct.q_count(2, &[10])));
        }
        let vals: Vec<Rat> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for v in &vals {
            assert_eq!(v, &vals[0]);
        }
    }

    #[test]
    fn family_text_round_trip() {
        for fam in [Family::P, Family::Q, Family::N] {
            let s = fam.to_string();
            assert_eq!(s.parse::<Family>().unwrap(), fam);
            assert_eq!(s.to_lowercase().parse::<Family>().unwrap(), fam);
        }
        assert!("x".parse::<Family>().is_err());
    }

    #[test]
    fn surface_class_flags() {
        assert!(SurfaceClass::new(0, 1).is_disc());
        assert!(SurfaceClass::new(0, 2).is_annulus());
        assert!(SurfaceClass::new(0, 3).is_pants());
        assert!(!SurfaceClass::new(0, 2).is_stable());
        assert!(SurfaceClass::new(1, 1).is_stable());
    }
}
