//! Exact rational arithmetic and the small combinatorial conventions used
//! throughout the crate: the extended binomial coefficient, the bar and
//! tilde normalisations, odd falling products and the signed tilde
//! summation.
//!
//! Every count and every polynomial coefficient in this crate is a [`Rat`];
//! there is no floating-point mode anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator. Serialises as `num/den`, or `num` when the
/// denominator is 1 (e.g. `1/24`, `4`); this is the `Display`/`FromStr` form.
pub type Rat = BigRational;

/// Rational from a signed machine integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational from an unsigned count.
pub fn rat_u(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// The fraction `n/d` in lowest terms.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact power of two, `2^e`, for any sign of `e`.
pub fn pow2(e: i64) -> Rat {
    let mag = BigInt::from(2u32).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rat::from_integer(mag)
    } else {
        Rat::new(BigInt::one(), mag)
    }
}

/// `n!` as a rational.
pub fn factorial(n: u64) -> Rat {
    Rat::from_integer((1..=n).map(BigInt::from).product())
}

/// Binomial coefficient with the extended convention `C(-1, 0) = 1` and
/// `C(-1, k) = 0` for `k > 0`; for `n >= 0` the standard value, with
/// `C(n, k) = 0` when `k > n`.
///
/// Values of `n` below `-1` are rejected outright: they can only arise from
/// a formula evaluated outside its stated domain, and silently returning 0
/// would hide the bug.
pub fn binomial(n: i64, k: i64) -> Rat {
    assert!(n >= -1, "binomial: n = {n} is outside the domain n >= -1");
    assert!(k >= 0, "binomial: k = {k} must be non-negative");
    if n == -1 {
        return if k == 0 { Rat::one() } else { Rat::zero() };
    }
    if k > n {
        return Rat::zero();
    }
    Rat::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

/// Product of `a + 1` consecutive odd integers descending from `2μ - 1`:
/// `(2μ-1)(2μ-3)…(2μ-2a-1)`.
///
/// This is the denominator pattern of the structure coefficients and of the
/// closed moment sums. It never vanishes at integer `μ` (every factor is
/// odd), so dividing by it is always exact there.
pub fn odd_falling(mu: i64, a: i64) -> Rat {
    assert!(a >= 0, "odd_falling: a = {a} must be non-negative");
    let mut acc = BigInt::one();
    for t in 0..=a {
        acc *= BigInt::from(2 * mu - 1 - 2 * t);
    }
    Rat::from_integer(acc)
}

/// `bar(n)`: `n` for positive `n`, and 1 for `n = 0`.
pub fn bar(n: u64) -> u64 {
    if n == 0 {
        1
    } else {
        n
    }
}

/// `tilde(n)`: `n` when `n` is a positive even integer, and 0 otherwise.
pub fn tilde(n: i64) -> i64 {
    if n > 0 && n % 2 == 0 {
        n
    } else {
        0
    }
}

/// Signed tilde summation: the sum of `x · f(i, x)` over `i + x = d` with
/// `i >= 1`, `x >= 0`, minus the same sum taken over `i + x = -d`. At most
/// one of the two sums has non-vanishing terms, so the sign of the result
/// follows the sign of `d`.
pub fn tilde_sum<F>(d: i64, mut f: F) -> Rat
where
    F: FnMut(i64, i64) -> Rat,
{
    let mut acc = Rat::zero();
    for i in 1..=d.abs() {
        let x = d.abs() - i;
        if x == 0 {
            continue;
        }
        if d > 0 {
            acc += rat(x) * f(i, x);
        } else {
            acc -= rat(x) * f(i, x);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_standard_and_extended() {
        assert_eq!(binomial(5, 3), rat(10));
        assert_eq!(binomial(-1, 0), rat(1));
        assert_eq!(binomial(-1, 3), rat(0));
        assert_eq!(binomial(4, 7), rat(0));
        assert_eq!(binomial(0, 0), rat(1));
        assert_eq!(binomial(80, 40), {
            // C(80,40) exceeds u64; spot-check via Pascal's rule.
            binomial(79, 40) + binomial(79, 39)
        });
    }

    #[test]
    #[should_panic(expected = "outside the domain")]
    fn binomial_rejects_deep_negative_n() {
        binomial(-2, 0);
    }

    #[test]
    #[should_panic(expected = "non-negative")]
    fn binomial_rejects_negative_k() {
        binomial(3, -1);
    }

    #[test]
    fn odd_falling_values() {
        assert_eq!(odd_falling(3, 1), rat(15)); // 5 * 3
        assert_eq!(odd_falling(1, 1), rat(-1)); // 1 * (-1)
        assert_eq!(odd_falling(0, 0), rat(-1));
        assert_eq!(odd_falling(2, 2), rat(-3)); // 3 * 1 * (-1)
    }

    #[test]
    fn bar_and_tilde() {
        assert_eq!(bar(0), 1);
        assert_eq!(bar(1), 1);
        assert_eq!(bar(5), 5);
        assert_eq!(tilde(4), 4);
        assert_eq!(tilde(3), 0);
        assert_eq!(tilde(0), 0);
        assert_eq!(tilde(-2), 0);
    }

    #[test]
    fn tilde_sum_examples() {
        let one = |_i: i64, _x: i64| rat(1);
        assert_eq!(tilde_sum(3, one), rat(3)); // 2 + 1 + 0
        assert_eq!(tilde_sum(-3, one), rat(-3));
        assert_eq!(tilde_sum(0, one), rat(0));
        assert_eq!(tilde_sum(1, one), rat(0)); // single term has weight 0
        assert_eq!(tilde_sum(-1, one), rat(0));
    }

    #[test]
    fn tilde_sum_weights_and_arguments() {
        // f(i, x) = i gives sum of x*i over i+x=d.
        let got = tilde_sum(4, |i, _| rat(i));
        assert_eq!(got, rat(3 * 1 + 2 * 2 + 1 * 3));
    }

    #[test]
    fn pow2_signs() {
        assert_eq!(pow2(3), rat(8));
        assert_eq!(pow2(0), rat(1));
        assert_eq!(pow2(-1), ratio(1, 2));
        assert_eq!(pow2(-4), ratio(1, 16));
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), rat(1));
        assert_eq!(factorial(4), rat(24));
    }

    #[test]
    fn rational_text_form() {
        assert_eq!(ratio(1, 24).to_string(), "1/24");
        assert_eq!(rat(4).to_string(), "4");
        assert_eq!(ratio(-3, 6).to_string(), "-1/2");
        let parsed: Rat = "17/3".parse().unwrap();
        assert_eq!(parsed, ratio(17, 3));
        let whole: Rat = "12".parse().unwrap();
        assert_eq!(whole, rat(12));
    }

    #[test]
    fn binomial_doubling_identity() {
        // C(2μ, μ) = 2^(1 - δ_{μ,0}) · C(2μ-1, μ) under the extended
        // convention; the exponent vanishes exactly at μ = 0.
        for mu in 0..=12i64 {
            let delta = i64::from(mu == 0);
            assert_eq!(
                binomial(2 * mu, mu),
                pow2(1 - delta) * binomial(2 * mu - 1, mu),
                "mu = {mu}"
            );
        }
    }

    #[test]
    fn binomial_symmetry_sweep() {
        for n in 0..=16i64 {
            for k in 0..=n {
                assert_eq!(binomial(n, k), binomial(n, n - k));
            }
        }
    }

    #[test]
    fn tilde_partition_of_n() {
        // Exactly one of n, n-1 is even; tilde keeps it when positive, so
        // the pair sums to the even member: 2*floor(n/2).
        for n in 1..=50i64 {
            assert_eq!(tilde(n) + tilde(n - 1), n - n % 2);
        }
    }

    #[test]
    fn tilde_sum_antisymmetry() {
        let f = |i: i64, x: i64| ratio(i * i + 1, x + 2);
        for d in -9..=9 {
            assert_eq!(tilde_sum(d, f), -tilde_sum(-d, f), "d = {d}");
        }
    }
}
