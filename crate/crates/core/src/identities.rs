//! Bernoulli numbers, parity-restricted power sums, the moment polynomial
//! family behind the closed binomial-moment sums, and brute-force
//! constrained convolution sums with their polynomial fits.
//!
//! The moment identity says that for each `α ≥ 0` there are polynomials
//! `P_α`, `Q_α` with
//!
//! ```text
//! Σ_{0 ≤ i ≤ n, i even} i^(2α+1) C(2n, n-i) = C(2n,n)/((2n-1)…(2n-2α-1)) · P_α(n)
//! Σ_{0 ≤ i ≤ n, i odd}  i^(2α+1) C(2n, n-i) = C(2n,n)/((2n-1)…(2n-2α-1)) · Q_α(n)
//! ```
//!
//! seeded by `P_0 = (n² - n)/2`, `Q_0 = n²/2` and grown by
//! `P_{α+1}(n) = n²[(2n - 2α - 3) P_α(n) - (2n - 1) P_α(n - 1)]`.
//! Note the recursion gives `P_1(n) = n²(n - 1)²`; the direct sums pin this
//! down (at `n = 2` the even cubic moment sum is 8, which forces
//! `P_1(2) = 4`), and the test suite guards that value.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{binomial, odd_falling, pow2, rat, rat_u, Rat};
use crate::poly::{interpolate, MultiPoly};

/// Parity of a summation index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn matches(self, v: u64) -> bool {
        match self {
            Parity::Even => v % 2 == 0,
            Parity::Odd => v % 2 == 1,
        }
    }
}

fn ipow(base: u64, e: u32) -> Rat {
    Rat::from_integer(BigInt::from(base).pow(e))
}

/// The `i`-th Bernoulli number in the convention with `B_1 = -1/2` (all
/// other odd ones vanish). Memoized; the memo is write-once like the count
/// cache.
pub fn bernoulli(i: usize) -> Rat {
    static MEMO: OnceLock<Mutex<Vec<Rat>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(vec![Rat::one()]));
    let mut memo = memo.lock().unwrap();
    while memo.len() <= i {
        let m = memo.len();
        let mut acc = Rat::zero();
        for (k, b) in memo.iter().enumerate() {
            acc += binomial(m as i64 + 1, k as i64) * b;
        }
        memo.push(-acc / rat(m as i64 + 1));
    }
    memo[i].clone()
}

/// The pair `(P_α, Q_α)` of univariate moment polynomials.
#[derive(Debug, Clone)]
pub struct MomentPolyPair {
    pub alpha: u32,
    pub p_alpha: MultiPoly,
    pub q_alpha: MultiPoly,
}

/// Grow the moment polynomials from the seeds with the step
/// `R_{α+1}(n) = n²[(2n - 2α - 3) R_α(n) - (2n - 1) R_α(n - 1)]`.
pub fn moment_poly(alpha: u32) -> MomentPolyPair {
    let half = pow2(-1);
    let mut p = MultiPoly::from_terms(1, [(vec![2], half.clone()), (vec![1], -half.clone())]);
    let mut q = MultiPoly::from_terms(1, [(vec![2], half)]);
    let nsq = MultiPoly::from_terms(1, [(vec![2], Rat::one())]);
    let two_n_minus_1 = MultiPoly::from_terms(1, [(vec![1], rat(2)), (vec![0], rat(-1))]);
    for a in 0..alpha {
        let lin =
            MultiPoly::from_terms(1, [(vec![1], rat(2)), (vec![0], rat(-(2 * a as i64 + 3)))]);
        p = nsq.mul(&lin.mul(&p).sub(&two_n_minus_1.mul(&shift_down(&p))));
        q = nsq.mul(&lin.mul(&q).sub(&two_n_minus_1.mul(&shift_down(&q))));
    }
    MomentPolyPair {
        alpha,
        p_alpha: p,
        q_alpha: q,
    }
}

// Substitute n -> n - 1 in a univariate polynomial.
fn shift_down(p: &MultiPoly) -> MultiPoly {
    assert_eq!(p.nvars(), 1);
    let mut terms = Vec::new();
    for (exps, coeff) in p.terms() {
        let e = exps[0];
        for j in 0..=e {
            let sign = if (e - j) % 2 == 0 { 1 } else { -1 };
            terms.push((vec![j], coeff * binomial(e as i64, j as i64) * rat(sign)));
        }
    }
    MultiPoly::from_terms(1, terms)
}

/// Literal summation `Σ_{0 ≤ i ≤ n, i ≡ parity} i^(2α+1) · C(2n, n-i)`.
pub fn moment_sum_direct(n: u64, alpha: u32, parity: Parity) -> Rat {
    let mut acc = Rat::zero();
    for i in 0..=n {
        if !parity.matches(i) {
            continue;
        }
        acc += ipow(i, 2 * alpha + 1) * binomial(2 * n as i64, (n - i) as i64);
    }
    acc
}

/// The closed form of the same moment sum, through `P_α`/`Q_α`.
pub fn moment_sum_closed(n: u64, alpha: u32, parity: Parity) -> Rat {
    assert!(n >= 1, "closed moment sums need n >= 1");
    let fall = odd_falling(n as i64, alpha as i64);
    assert!(
        !fall.is_zero(),
        "odd falling product vanished; the closed form does not apply"
    );
    let pair = moment_poly(alpha);
    let poly = match parity {
        Parity::Even => &pair.p_alpha,
        Parity::Odd => &pair.q_alpha,
    };
    binomial(2 * n as i64, n as i64) / fall * poly.eval(&[rat_u(n)])
}

/// Parity-restricted power sum `Σ_{1 ≤ i ≤ n, i ≡ parity} i^k`, computed by
/// the Bernoulli closed forms. `n` is first truncated down to the largest
/// integer of the matching parity, which leaves the sum unchanged.
pub fn power_sum_parity(k: u32, n: u64, parity: Parity) -> Rat {
    let np = match parity {
        Parity::Even => n - n % 2,
        Parity::Odd => {
            if n == 0 {
                return Rat::zero();
            }
            if n % 2 == 1 {
                n
            } else {
                n - 1
            }
        }
    };
    if np == 0 {
        return Rat::zero();
    }
    if k == 0 {
        // The Bernoulli forms below assume k >= 1; the count of the parity
        // class is the honest closed form here.
        return match parity {
            Parity::Even => rat_u(np / 2),
            Parity::Odd => rat_u(np.div_ceil(2)),
        };
    }
    let mut tail = Rat::zero();
    for i in 0..=k {
        let base = match parity {
            Parity::Even => ipow(np, k + 1 - i),
            Parity::Odd => ipow(np, k + 1 - i) - Rat::one(),
        };
        tail += pow2(i as i64) * binomial(k as i64 + 1, i as i64) * bernoulli(i as usize) * base;
    }
    ipow(np, k) + tail / rat(2 * (k as i64 + 1))
}

/// Constant `C_k = 1/(2(k+1)) Σ_{0 ≤ i ≤ k} 2^i C(k+1, i) B_i`; equals `k!`
/// times the `k`-th series coefficient of `1/(e^x + 1)`, and vanishes for
/// positive even `k`.
pub fn c_constant(k: u32) -> Rat {
    let mut acc = Rat::zero();
    for i in 0..=k {
        acc += pow2(i as i64) * binomial(k as i64 + 1, i as i64) * bernoulli(i as usize);
    }
    acc / rat(2 * (k as i64 + 1))
}

/// Brute-force constrained convolution sum: over `i_1, …, i_m ≥ 1` with
/// `Σ i_t = n` and each `i_t` of its prescribed parity, the product
/// `Π i_t^{k_t}`.
pub fn conv_parity_sum(ks: &[u32], n: u64, parities: &[Parity]) -> Rat {
    assert_eq!(ks.len(), parities.len(), "one parity per exponent");
    assert!(ks.len() >= 2, "need at least two factors");
    assert!(
        ks.iter().all(|&k| k % 2 == 1),
        "exponents must be positive odd"
    );
    fn rec(ks: &[u32], parities: &[Parity], n: u64, partial: Rat, acc: &mut Rat) {
        if ks.len() == 1 {
            if n >= 1 && parities[0].matches(n) {
                *acc += partial * ipow(n, ks[0]);
            }
            return;
        }
        for i in 1..n {
            if parities[0].matches(i) {
                rec(
                    &ks[1..],
                    &parities[1..],
                    n - i,
                    &partial * ipow(i, ks[0]),
                    acc,
                );
            }
        }
    }
    let mut acc = Rat::zero();
    rec(ks, parities, n, Rat::one(), &mut acc);
    acc
}

/// A fitted constrained convolution sum: the sum is supported on one parity
/// class of `n` and is an odd polynomial of degree `Σ k_t + m - 1` there.
#[derive(Debug, Clone)]
pub struct ConvFit {
    pub poly: MultiPoly,
    pub degree: u32,
    pub leading: Rat,
}

/// Sample the convolution sum on its supported parity class, interpolate,
/// validate at two extra nodes, and check oddness and the exact degree.
pub fn fit_conv_parity_sum(ks: &[u32], parities: &[Parity]) -> Result<ConvFit, String> {
    let m = ks.len() as u32;
    let degree = ks.iter().sum::<u32>() + m - 1;
    let odd_count = parities.iter().filter(|p| matches!(p, Parity::Odd)).count();
    let start: u64 = if odd_count % 2 == 1 { 1 } else { 2 };
    let nodes: Vec<u64> = (0..degree as u64 + 3).map(|t| start + 2 * t).collect();
    let (base, extra) = nodes.split_at(degree as usize + 1);
    let base_rat: Vec<Rat> = base.iter().map(|&x| rat_u(x)).collect();
    let values: Vec<Rat> = base
        .iter()
        .map(|&x| conv_parity_sum(ks, x, parities))
        .collect();
    let poly = interpolate(&[base_rat], &values).map_err(|e| e.to_string())?;
    for &x in extra {
        let expected = conv_parity_sum(ks, x, parities);
        let fitted = poly.eval(&[rat_u(x)]);
        if fitted != expected {
            return Err(format!(
                "validation failed at n = {x}: fitted {fitted}, sum {expected}"
            ));
        }
    }
    if !poly.is_odd_each_variable() {
        return Err(format!("fit is not an odd polynomial: {poly:?}"));
    }
    if poly.total_degree() != Some(degree) {
        return Err(format!(
            "fit has degree {:?}, expected {degree}",
            poly.total_degree()
        ));
    }
    let leading = poly.coefficient(&[degree]);
    Ok(ConvFit {
        poly,
        degree,
        leading,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat(1));
        assert_eq!(bernoulli(1), ratio(-1, 2));
        assert_eq!(bernoulli(2), ratio(1, 6));
        assert_eq!(bernoulli(3), rat(0));
        assert_eq!(bernoulli(4), ratio(-1, 30));
        assert_eq!(bernoulli(12), ratio(-691, 2730));
    }

    #[test]
    fn moment_poly_seeds_and_first_step() {
        let m0 = moment_poly(0);
        assert_eq!(
            m0.p_alpha,
            MultiPoly::from_terms(1, [(vec![2], ratio(1, 2)), (vec![1], ratio(-1, 2))])
        );
        assert_eq!(
            m0.q_alpha,
            MultiPoly::from_terms(1, [(vec![2], ratio(1, 2))])
        );

        let m1 = moment_poly(1);
        // n²(n-1)² = n⁴ - 2n³ + n²
        assert_eq!(
            m1.p_alpha,
            MultiPoly::from_terms(
                1,
                [(vec![4], rat(1)), (vec![3], rat(-2)), (vec![2], rat(1))]
            )
        );
        // n²(2n² - 4n + 1)/2 = n⁴ - 2n³ + n²/2
        assert_eq!(
            m1.q_alpha,
            MultiPoly::from_terms(
                1,
                [
                    (vec![4], rat(1)),
                    (vec![3], rat(-2)),
                    (vec![2], ratio(1, 2))
                ]
            )
        );
    }

    #[test]
    fn misprinted_first_moment_polynomial_fails_the_identity() {
        // (n² - 1)² n² would give 6/3 · 36 = 72 at n = 2; the direct even
        // cubic moment sum there is 2³·C(4,0) = 8, matched by n²(n-1)².
        let wrong = MultiPoly::from_terms(
            1,
            [(vec![6], rat(1)), (vec![4], rat(-2)), (vec![2], rat(1))],
        );
        let closed_wrong = binomial(4, 2) / odd_falling(2, 1) * wrong.eval(&[rat(2)]);
        assert_eq!(closed_wrong, rat(72));
        assert_ne!(closed_wrong, moment_sum_direct(2, 1, Parity::Even));
        assert_eq!(moment_sum_direct(2, 1, Parity::Even), rat(8));
        assert_eq!(moment_sum_closed(2, 1, Parity::Even), rat(8));
    }

    #[test]
    fn moment_sum_examples() {
        assert_eq!(moment_sum_direct(3, 0, Parity::Even), rat(12));
        assert_eq!(moment_sum_direct(3, 0, Parity::Odd), rat(18));
        assert_eq!(moment_sum_direct(2, 1, Parity::Even), rat(8));
        assert_eq!(moment_sum_closed(3, 0, Parity::Even), rat(12));
        assert_eq!(moment_sum_closed(3, 0, Parity::Odd), rat(18));
    }

    #[test]
    fn moment_sums_agree_locally() {
        for alpha in 0..=3 {
            for n in 1..=12u64 {
                for parity in [Parity::Even, Parity::Odd] {
                    assert_eq!(
                        moment_sum_closed(n, alpha, parity),
                        moment_sum_direct(n, alpha, parity),
                        "alpha={alpha} n={n} parity={parity:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sum_parity(1, 5, Parity::Odd), rat(9));
        assert_eq!(power_sum_parity(2, 4, Parity::Even), rat(20));
        assert_eq!(power_sum_parity(3, 6, Parity::Even), rat(288));
        // truncation to the matching parity
        assert_eq!(power_sum_parity(1, 6, Parity::Odd), rat(9));
        assert_eq!(power_sum_parity(1, 5, Parity::Even), rat(6));
        assert_eq!(power_sum_parity(4, 0, Parity::Odd), rat(0));
        assert_eq!(power_sum_parity(0, 9, Parity::Even), rat(4));
        assert_eq!(power_sum_parity(0, 9, Parity::Odd), rat(5));
    }

    #[test]
    fn power_sums_match_direct_summation() {
        for k in 0..=6u32 {
            for n in 0..=40u64 {
                for parity in [Parity::Even, Parity::Odd] {
                    let direct: Rat = (1..=n)
                        .filter(|&i| parity.matches(i))
                        .map(|i| ipow(i, k))
                        .sum();
                    assert_eq!(
                        power_sum_parity(k, n, parity),
                        direct,
                        "k={k} n={n} {parity:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn c_constants() {
        assert_eq!(c_constant(0), ratio(1, 2));
        assert_eq!(c_constant(1), ratio(-1, 4));
        for k in (2..=10).step_by(2) {
            assert_eq!(c_constant(k), rat(0), "k = {k}");
        }
        assert_eq!(c_constant(3), ratio(1, 8));
    }

    #[test]
    fn c_constant_matches_series_of_inverse_exp_plus_one() {
        // 1/(e^x + 1): invert the power series of e^x + 1 and compare
        // k! · [x^k] against the Bernoulli expression.
        let kmax = 10usize;
        let a: Vec<Rat> = (0..=kmax)
            .map(|j| {
                let f = crate::exact::factorial(j as u64);
                let base = Rat::one() / f;
                if j == 0 {
                    base + Rat::one()
                } else {
                    base
                }
            })
            .collect();
        let mut b: Vec<Rat> = vec![Rat::zero(); kmax + 1];
        b[0] = Rat::one() / a[0].clone();
        for m in 1..=kmax {
            let mut acc = Rat::zero();
            for j in 1..=m {
                acc += &a[j] * &b[m - j];
            }
            b[m] = -acc / a[0].clone();
        }
        for (k, bk) in b.iter().enumerate() {
            assert_eq!(
                c_constant(k as u32),
                crate::exact::factorial(k as u64) * bk,
                "k = {k}"
            );
        }
    }

    #[test]
    fn conv_sum_examples() {
        use Parity::*;
        assert_eq!(conv_parity_sum(&[1, 1], 4, &[Odd, Odd]), rat(6));
        assert_eq!(conv_parity_sum(&[1, 1], 3, &[Odd, Odd]), rat(0));
        assert_eq!(conv_parity_sum(&[1, 1], 4, &[Even, Even]), rat(4));
        assert_eq!(conv_parity_sum(&[1, 1], 5, &[Odd, Even]), rat(10));
        // m = 3: over 1+1+2 arrangements
        assert_eq!(conv_parity_sum(&[1, 1, 1], 4, &[Odd, Odd, Even]), rat(2));
    }

    #[test]
    fn conv_fit_leading_coefficient_for_pairs() {
        use Parity::*;
        // For m = 2 the leading coefficient is 1/(2(k2+1) C(k1+k2+1, k2+1)),
        // independent of the parity choice.
        for k1 in [1u32, 3, 5] {
            for k2 in [1u32, 3, 5] {
                let expected = Rat::one()
                    / (rat(2 * (k2 as i64 + 1)) * binomial((k1 + k2 + 1) as i64, (k2 + 1) as i64));
                for ps in [[Even, Even], [Even, Odd], [Odd, Even], [Odd, Odd]] {
                    let fit = fit_conv_parity_sum(&[k1, k2], &ps).unwrap();
                    assert_eq!(fit.degree, k1 + k2 + 1);
                    assert_eq!(fit.leading, expected, "k=({k1},{k2}) parities={ps:?}");
                }
            }
        }
    }
}
