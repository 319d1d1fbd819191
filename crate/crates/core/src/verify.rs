//! Named verification suites: the checks behind `polycount verify`.
//!
//! Each check runs to completion and reports pass/fail with a short detail
//! string and its timing; a failure never aborts the remaining checks.

use std::time::{Duration, Instant};

use num_traits::Zero;

use crate::analysis::{
    closed_pieces, fit_quasipoly, intersection_numbers, pullback_check, qn_top_check,
    structure_polynomial,
};
use crate::counts::{Counter, Family};
use crate::exact::{rat, Rat};
use crate::identities::{
    c_constant, conv_parity_sum, fit_conv_parity_sum, moment_sum_closed, moment_sum_direct,
    power_sum_parity, Parity,
};
use crate::poly::{MultiPoly, ParityClass};

/// The surfaces on which the structural theorems are exercised.
pub const FIT_SURFACES: [(u32, usize); 5] = [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Routes,
    Identities,
    Fits,
    Intersections,
    Pullback,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Routes => "routes",
            Suite::Identities => "identities",
            Suite::Fits => "fits",
            Suite::Intersections => "intersections",
            Suite::Pullback => "pullback",
        }
    }

    pub fn from_name(name: &str) -> Option<Vec<Suite>> {
        match name {
            "routes" => Some(vec![Suite::Routes]),
            "identities" => Some(vec![Suite::Identities]),
            "fits" => Some(vec![Suite::Fits]),
            "intersections" => Some(vec![Suite::Intersections]),
            "pullback" => Some(vec![Suite::Pullback]),
            "all" => Some(vec![
                Suite::Routes,
                Suite::Identities,
                Suite::Fits,
                Suite::Intersections,
                Suite::Pullback,
            ]),
            _ => None,
        }
    }
}

/// Outcome of one named check.
#[derive(Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

fn run_check(name: &str, f: impl FnOnce() -> Result<String, String>) -> Check {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Check {
        name: name.to_string(),
        pass,
        detail,
        elapsed: start.elapsed(),
    }
}

/// Iterate every profile in the box `[0, max]^n`.
fn for_each_profile(n: usize, max: u64, mut f: impl FnMut(&[u64])) {
    let mut profile = vec![0u64; n];
    loop {
        f(&profile);
        let mut axis = n;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if profile[axis] < max {
                profile[axis] += 1;
                break;
            }
            profile[axis] = 0;
        }
    }
}

fn for_each_profile_sum_at_most(n: usize, max_sum: u64, mut f: impl FnMut(&[u64])) {
    let mut profile = vec![0u64; n];
    loop {
        if profile.iter().sum::<u64>() <= max_sum {
            f(&profile);
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if profile[axis] < max_sum {
                profile[axis] += 1;
                break;
            }
            profile[axis] = 0;
        }
    }
}

pub fn suite_routes(ct: &Counter) -> Vec<Check> {
    vec![
        run_check("spot values", || {
            let checks: Vec<(Rat, i64, &str)> = vec![
                (ct.p_recursive(0, &[3]), 5, "P(0,1; 3)"),
                (ct.p_recursive(0, &[1, 1]), 2, "P(0,2; 1,1)"),
                (ct.p_recursive(1, &[2]), 4, "P(1,1; 2)"),
                (ct.p_recursive(1, &[3]), 17, "P(1,1; 3)"),
                (ct.p_recursive(0, &[1, 1, 1]), 6, "P(0,3; 1,1,1)"),
                (ct.p_recursive(0, &[2, 1, 1]), 32, "P(0,3; 2,1,1)"),
                (ct.q_count(1, &[4]), 4, "Q(1,1; 4)"),
                (ct.q_count(1, &[1, 1]), 1, "Q(1,2; 1,1)"),
                (ct.n_count(1, &[1, 1]), 1, "N(1,2; 1,1)"),
                (crate::counts::cuff_count(2, 0), 3, "L(2,0)"),
                (crate::counts::cuff_count(3, 1), 15, "L(3,1)"),
            ];
            for (got, want, what) in checks {
                if got != rat(want) {
                    return Err(format!("{what} = {got}, expected {want}"));
                }
            }
            Ok("11 pinned values".into())
        }),
        run_check("closed forms match the recursion", || {
            let mut checked = 0usize;
            for mu in 0..=16u64 {
                if ct.p_recursive(0, &[mu]) != crate::counts::p_closed(0, &[mu]).unwrap() {
                    return Err(format!("disc count differs at mu = {mu}"));
                }
                if ct.p_recursive(1, &[mu]) != crate::counts::p_closed(1, &[mu]).unwrap() {
                    return Err(format!("one-holed torus count differs at mu = {mu}"));
                }
                checked += 2;
            }
            let mut err = None;
            for_each_profile(2, 10, |p| {
                if err.is_none() && ct.p_recursive(0, p) != crate::counts::p_closed(0, p).unwrap() {
                    err = Some(format!("annulus count differs at {p:?}"));
                }
                checked += 1;
            });
            for_each_profile(3, 8, |p| {
                if err.is_none() && ct.p_recursive(0, p) != crate::counts::p_closed(0, p).unwrap() {
                    err = Some(format!("pants count differs at {p:?}"));
                }
                checked += 1;
            });
            match err {
                Some(e) => Err(e),
                None => Ok(format!("{checked} profiles")),
            }
        }),
        run_check("recursion matches the cuff transform", || {
            let mut checked = 0usize;
            for (g, n) in FIT_SURFACES {
                let mut err = None;
                for_each_profile(n, 6, |p| {
                    if err.is_some() {
                        return;
                    }
                    let rec = ct.p_recursive(g, p);
                    let tra = ct.p_from_q(g, p);
                    if rec != tra {
                        err = Some(format!(
                            "(g,n)=({g},{n}) profile {p:?}: recursion {rec}, transform {tra}"
                        ));
                    }
                    checked += 1;
                });
                if let Some(e) = err {
                    return Err(e);
                }
            }
            Ok(format!("{checked} profiles on 5 surfaces"))
        }),
        run_check("profile permutation symmetry", || {
            let mut checked = 0usize;
            for (g, n) in [(0, 1), (0, 2), (0, 3), (0, 4), (1, 1), (1, 2)] {
                let mut err = None;
                for_each_profile_sum_at_most(n, 8, |p| {
                    if err.is_some() {
                        return;
                    }
                    for family in [Family::P, Family::Q, Family::N] {
                        if family == Family::N && g == 0 && n <= 2 && p.iter().any(|&m| m > 0) {
                            continue;
                        }
                        let canonical = ct.count(family, g, p);
                        let pivoted = if p[0] == 0 {
                            None
                        } else {
                            match family {
                                Family::P if !matches!((g, n), (0, 1) | (0, 2)) => {
                                    Some(ct.p_pivot_first(g, p))
                                }
                                Family::Q if !matches!((g, n), (0, 1) | (0, 2) | (0, 3)) => {
                                    Some(ct.q_pivot_first(g, p))
                                }
                                Family::N
                                    if !matches!((g, n), (0, 1) | (0, 2) | (0, 3) | (1, 1)) =>
                                {
                                    Some(ct.n_pivot_first(g, p))
                                }
                                _ => None,
                            }
                        };
                        if let Some(v) = pivoted {
                            if v != canonical {
                                err = Some(format!(
                                    "{family}({g},{n}) at {p:?}: pivot-first {v} vs canonical {canonical}"
                                ));
                                return;
                            }
                            checked += 1;
                        }
                        let mut sorted = p.to_vec();
                        sorted.sort_unstable_by(|a, b| b.cmp(a));
                        if ct.count(family, g, &sorted) != canonical {
                            err = Some(format!("{family}({g},{n}) not symmetric at {p:?}"));
                            return;
                        }
                        checked += 1;
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
            }
            Ok(format!("{checked} pivot/permutation comparisons"))
        }),
    ]
}

pub fn suite_identities() -> Vec<Check> {
    vec![
        run_check("closed moment sums equal direct sums", || {
            for alpha in 0..=3u32 {
                for n in 1..=25u64 {
                    for parity in [Parity::Even, Parity::Odd] {
                        let closed = moment_sum_closed(n, alpha, parity);
                        let direct = moment_sum_direct(n, alpha, parity);
                        if closed != direct {
                            return Err(format!(
                                "alpha={alpha} n={n} {parity:?}: closed {closed}, direct {direct}"
                            ));
                        }
                    }
                }
            }
            Ok("alpha <= 3, n <= 25, both parities".into())
        }),
        run_check("misprinted first moment polynomial is rejected", || {
            // The identity pins P_1(n) = n²(n-1)²; the variant (n²-1)²n²
            // must fail against the direct sum.
            let wrong = MultiPoly::from_terms(
                1,
                [(vec![6], rat(1)), (vec![4], rat(-2)), (vec![2], rat(1))],
            );
            let closed_wrong = crate::exact::binomial(4, 2) / crate::exact::odd_falling(2, 1)
                * wrong.eval(&[rat(2)]);
            let direct = moment_sum_direct(2, 1, Parity::Even);
            if closed_wrong == direct {
                return Err("misprinted polynomial unexpectedly satisfies the identity".into());
            }
            let good = crate::identities::moment_poly(1).p_alpha;
            let closed_good = crate::exact::binomial(4, 2) / crate::exact::odd_falling(2, 1)
                * good.eval(&[rat(2)]);
            if closed_good != direct {
                return Err(format!("recursion value {closed_good} != direct {direct}"));
            }
            Ok(format!("{closed_wrong} != {direct} as required"))
        }),
        run_check("parity power sums match direct summation", || {
            for k in 0..=6u32 {
                for n in 0..=40u64 {
                    for parity in [Parity::Even, Parity::Odd] {
                        let direct: Rat = (1..=n)
                            .filter(|&i| parity.matches(i))
                            .map(|i| {
                                let mut acc = Rat::from_integer(1.into());
                                for _ in 0..k {
                                    acc *= crate::exact::rat_u(i);
                                }
                                acc
                            })
                            .sum();
                        let closed = power_sum_parity(k, n, parity);
                        if closed != direct {
                            return Err(format!(
                                "k={k} n={n} {parity:?}: closed {closed}, direct {direct}"
                            ));
                        }
                    }
                }
            }
            Ok("k <= 6, n <= 40, both parities".into())
        }),
        run_check("constrained convolution sums fit odd polynomials", || {
            let odd_exps = [1u32, 3, 5];
            let mut fits = 0usize;
            for m in [2usize, 3] {
                let mut ks = vec![0u32; m];
                let mut stack = vec![0usize; m];
                'outer: loop {
                    for (slot, &idx) in ks.iter_mut().zip(&stack) {
                        *slot = odd_exps[idx];
                    }
                    // all 2^m parity choices for this exponent vector
                    let mut leading: Option<Rat> = None;
                    for mask in 0..(1u32 << m) {
                        let parities: Vec<Parity> = (0..m)
                            .map(|i| {
                                if mask & (1 << i) != 0 {
                                    Parity::Odd
                                } else {
                                    Parity::Even
                                }
                            })
                            .collect();
                        let fit = fit_conv_parity_sum(&ks, &parities)
                            .map_err(|e| format!("ks={ks:?} parities={parities:?}: {e}"))?;
                        fits += 1;
                        match &leading {
                            None => leading = Some(fit.leading),
                            Some(l) => {
                                if *l != fit.leading {
                                    return Err(format!(
                                        "leading coefficient depends on parity for ks={ks:?}"
                                    ));
                                }
                            }
                        }
                    }
                    // advance the exponent odometer
                    let mut pos = m;
                    loop {
                        if pos == 0 {
                            break 'outer;
                        }
                        pos -= 1;
                        stack[pos] += 1;
                        if stack[pos] < odd_exps.len() {
                            break;
                        }
                        stack[pos] = 0;
                    }
                }
            }
            Ok(format!(
                "{fits} fits, leading coefficients parity-independent"
            ))
        }),
        run_check("series constants vanish at positive even orders", || {
            for k in (2..=10u32).step_by(2) {
                let c = c_constant(k);
                if !c.is_zero() {
                    return Err(format!("C_{k} = {c}, expected 0"));
                }
            }
            if c_constant(0) != crate::exact::ratio(1, 2)
                || c_constant(1) != crate::exact::ratio(-1, 4)
            {
                return Err("C_0 or C_1 off".into());
            }
            Ok("C_k = 0 for even k in 2..=10".into())
        }),
        run_check("parity-obstructed convolution sums vanish", || {
            for n in 0..=20u64 {
                let v = conv_parity_sum(&[1, 1], n, &[Parity::Odd, Parity::Odd]);
                if n % 2 == 1 && !v.is_zero() {
                    return Err(format!("odd+odd sum at odd n={n} is {v}"));
                }
            }
            Ok("odd+odd sums vanish on odd totals".into())
        }),
    ]
}

pub fn suite_fits(ct: &Counter) -> Vec<Check> {
    let mut checks = Vec::new();
    for family in [Family::Q, Family::N] {
        for (g, n) in FIT_SURFACES {
            checks.push(run_check(&format!("fit {family} on ({g},{n})"), || {
                let report = fit_quasipoly(ct, family, g, n).map_err(|e| e.to_string())?;
                if !report.pass {
                    return Err(format!(
                        "{} failures, first: {:?}",
                        report.failures.len(),
                        report.failures.first()
                    ));
                }
                Ok(format!(
                    "{} pieces, degree bound {}, {} validation points",
                    report.pieces.len(),
                    report.degree_bound,
                    report.validation_checked
                ))
            }));
        }
    }
    checks.push(run_check("fitted torus pieces equal closed forms", || {
        let report = fit_quasipoly(ct, Family::Q, 1, 1).map_err(|e| e.to_string())?;
        let odd = report.quasipoly.piece(&vec![ParityClass::Odd]).unwrap();
        let even = report.quasipoly.piece(&vec![ParityClass::Even]).unwrap();
        if odd != &closed_pieces::torus_odd() {
            return Err(format!("odd piece {odd:?}"));
        }
        if even != &closed_pieces::torus_even() {
            return Err(format!("even piece {even:?}"));
        }
        Ok("(μ³-μ)/24 and (μ³+8μ)/24".into())
    }));
    checks.push(run_check("fitted pants pieces equal closed forms", || {
        let report = fit_quasipoly(ct, Family::Q, 0, 3).map_err(|e| e.to_string())?;
        for (sig, piece) in report.quasipoly.pieces() {
            if piece != &closed_pieces::pants_piece(sig) {
                return Err(format!("piece {sig:?} is {piece:?}"));
            }
        }
        Ok("all 27 pieces".into())
    }));
    checks.push(run_check(
        "structure polynomial on the one-holed torus",
        || {
            let f = structure_polynomial(ct, 1, 1, 16).map_err(|e| e.to_string())?;
            if f != closed_pieces::torus_structure() {
                return Err(format!("got {f:?}"));
            }
            Ok("factors as (2μ-3)(μ³+3μ²+20μ-12)/12".into())
        },
    ));
    checks.push(run_check(
        "structure polynomial on the pair of pants",
        || {
            let f = structure_polynomial(ct, 0, 3, 8).map_err(|e| e.to_string())?;
            if f != closed_pieces::pants_structure() {
                return Err(format!("got {f:?}"));
            }
            Ok("matches the cleared closed form".into())
        },
    ));
    checks.push(run_check("top coefficients: pruned vs arc ratio", || {
        let mut details = Vec::new();
        for (g, n) in FIT_SURFACES {
            let report = qn_top_check(ct, g, n).map_err(|e| e.to_string())?;
            if !report.pass {
                let bad: Vec<String> = report
                    .rows
                    .iter()
                    .filter(|r| !r.ok)
                    .map(|r| format!("d={:?}: {} vs {}", r.d, r.q_top, r.n_top))
                    .collect();
                return Err(format!("({g},{n}): {}", bad.join("; ")));
            }
            details.push(format!("({g},{n})×{}", report.rows.len()));
        }
        Ok(details.join(" "))
    }));
    checks
}

pub fn suite_intersections(ct: &Counter) -> Vec<Check> {
    vec![
        run_check("pinned intersection numbers", || {
            let pants = intersection_numbers(ct, 0, 3, Family::Q).map_err(|e| e.to_string())?;
            if pants.entries[&vec![0, 0, 0]] != rat(1) {
                return Err(format!("(0,3) entry {}", pants.entries[&vec![0, 0, 0]]));
            }
            let torus = intersection_numbers(ct, 1, 1, Family::Q).map_err(|e| e.to_string())?;
            if torus.entries[&vec![1]] != crate::exact::ratio(1, 24) {
                return Err(format!("(1,1) entry {}", torus.entries[&vec![1]]));
            }
            Ok("(0,3) -> 1 and (1,1) -> 1/24".into())
        }),
        run_check("both families give the same tables", || {
            let mut entries = 0usize;
            for (g, n) in FIT_SURFACES {
                let q = intersection_numbers(ct, g, n, Family::Q).map_err(|e| e.to_string())?;
                let nn = intersection_numbers(ct, g, n, Family::N).map_err(|e| e.to_string())?;
                if q.entries != nn.entries {
                    return Err(format!(
                        "({g},{n}): Q table {:?} vs N table {:?}",
                        q.entries, nn.entries
                    ));
                }
                entries += q.entries.len();
            }
            Ok(format!("{entries} entries agree on 5 surfaces"))
        }),
    ]
}

pub fn suite_pullback(ct: &Counter, order: u64) -> Vec<Check> {
    vec![run_check(
        &format!("pullback on the one-holed torus to order {order}"),
        || {
            let report = pullback_check(ct, order);
            match (report.pass, report.epsilon) {
                (true, Some(e)) => Ok(format!("ε = {e}, orders 0..={order} match")),
                _ => {
                    let bad: Vec<String> = report
                        .rows
                        .iter()
                        .filter(|r| !r.ok)
                        .map(|r| format!("ν={}: {} vs {}", r.nu, r.pullback_coeff, r.pruned_coeff))
                        .collect();
                    Err(format!(
                        "ε = {:?}; mismatches: {}",
                        report.epsilon,
                        bad.join("; ")
                    ))
                }
            }
        },
    )]
}

/// Run the requested suites against a fresh counter.
pub fn run_suites(ct: &Counter, suites: &[Suite], pullback_order: u64) -> Vec<Check> {
    let mut out = Vec::new();
    for suite in suites {
        match suite {
            Suite::Routes => out.extend(suite_routes(ct)),
            Suite::Identities => out.extend(suite_identities()),
            Suite::Fits => out.extend(suite_fits(ct)),
            Suite::Intersections => out.extend(suite_intersections(ct)),
            Suite::Pullback => out.extend(suite_pullback(ct, pullback_order)),
        }
    }
    out
}
