//! Truncated Laurent series with exact rational coefficients.
//!
//! A series stores the coefficients of `z^min .. z^trunc` densely; orders
//! below `min` are exact zeros and orders above `trunc` are unknown.
//! Multiplication propagates truncation conservatively: the product is kept
//! only up to the largest order whose coefficient is fully determined by the
//! known parts of both factors.

use num_traits::Zero;

use crate::exact::{binomial, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    min: i64,
    trunc: i64,
    coef: Vec<Rat>,
}

impl LaurentSeries {
    /// Series with the given terms, exact up to and including `z^trunc`.
    pub fn from_terms(trunc: i64, terms: &[(i64, Rat)]) -> LaurentSeries {
        let min = terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|&(o, _)| o)
            .min()
            .unwrap_or(0)
            .min(trunc);
        let mut s = LaurentSeries {
            min,
            trunc,
            coef: vec![Rat::zero(); (trunc - min + 1).max(0) as usize],
        };
        for (o, c) in terms {
            if *o <= trunc && !c.is_zero() {
                s.coef[(o - min) as usize] += c.clone();
            }
        }
        s
    }

    pub fn zero(trunc: i64) -> LaurentSeries {
        LaurentSeries::from_terms(trunc, &[])
    }

    /// Binomial expansion of `(1 + z)^(-m)`.
    pub fn one_plus_z_neg_pow(m: u64, trunc: i64) -> LaurentSeries {
        assert!(trunc >= 0);
        let mut coef = Vec::with_capacity(trunc as usize + 1);
        for l in 0..=trunc {
            let c = binomial(m as i64 - 1 + l, l);
            coef.push(if l % 2 == 0 { c } else { -c });
        }
        LaurentSeries {
            min: 0,
            trunc,
            coef,
        }
    }

    pub fn min_order(&self) -> i64 {
        self.min
    }

    pub fn truncation_order(&self) -> i64 {
        self.trunc
    }

    /// Coefficient of `z^order`. Orders below the minimum are zero; asking
    /// beyond the truncation order is a caller bug.
    pub fn coeff(&self, order: i64) -> Rat {
        assert!(
            order <= self.trunc,
            "coefficient of z^{order} lies beyond the truncation order {}",
            self.trunc
        );
        if order < self.min {
            Rat::zero()
        } else {
            self.coef[(order - self.min) as usize].clone()
        }
    }

    pub fn scale(&self, s: &Rat) -> LaurentSeries {
        LaurentSeries {
            min: self.min,
            trunc: self.trunc,
            coef: self.coef.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let trunc = self.trunc.min(other.trunc);
        let min = self.min.min(other.min).min(trunc);
        let mut coef = vec![Rat::zero(); (trunc - min + 1) as usize];
        for (slot, order) in coef.iter_mut().zip(min..=trunc) {
            if order >= self.min && order <= self.trunc {
                *slot += self.coeff(order);
            }
            if order >= other.min && order <= other.trunc {
                *slot += other.coeff(order);
            }
        }
        LaurentSeries { min, trunc, coef }
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        // Order o of the product needs every split o = a + b with a >= minA,
        // b >= minB; both parts are known iff o <= truncA + minB and
        // o <= truncB + minA.
        let trunc = (self.trunc + other.min).min(other.trunc + self.min);
        let min = self.min + other.min;
        if trunc < min {
            return LaurentSeries::zero(trunc);
        }
        let mut coef = vec![Rat::zero(); (trunc - min + 1) as usize];
        for (ia, a) in self.coef.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (ib, b) in other.coef.iter().enumerate() {
                let order = self.min + ia as i64 + other.min + ib as i64;
                if order > trunc {
                    break;
                }
                coef[(order - min) as usize] += a * b;
            }
        }
        LaurentSeries { min, trunc, coef }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    #[test]
    fn geometric_series() {
        let s = LaurentSeries::one_plus_z_neg_pow(1, 5);
        for l in 0..=5 {
            assert_eq!(s.coeff(l), rat(if l % 2 == 0 { 1 } else { -1 }));
        }
    }

    #[test]
    fn inverse_powers_multiply() {
        let a = LaurentSeries::one_plus_z_neg_pow(2, 8);
        let b = LaurentSeries::one_plus_z_neg_pow(1, 8);
        let c = LaurentSeries::one_plus_z_neg_pow(3, 8);
        let prod = a.mul(&b);
        assert_eq!(prod.truncation_order(), 8);
        for l in 0..=8 {
            assert_eq!(prod.coeff(l), c.coeff(l), "order {l}");
        }
    }

    #[test]
    fn pole_expansion() {
        // z^{-1}(z - 1)/(1 + z) = -z^{-1} + 2 - 2z + 2z^2 - ...
        let num = LaurentSeries::from_terms(8, &[(0, rat(-1)), (1, rat(1))]);
        let s = LaurentSeries::from_terms(8, &[(-1, rat(1))])
            .mul(&num)
            .mul(&LaurentSeries::one_plus_z_neg_pow(1, 8));
        assert_eq!(s.coeff(-1), rat(-1));
        assert_eq!(s.coeff(0), rat(2));
        assert_eq!(s.coeff(1), rat(-2));
        assert_eq!(s.coeff(2), rat(2));
    }

    #[test]
    fn truncation_is_conservative() {
        // Multiplying something exact to z^4 by z^{-2} leaves exactness to z^2.
        let a = LaurentSeries::from_terms(4, &[(0, rat(1))]);
        let b = LaurentSeries::from_terms(4, &[(-2, ratio(1, 3))]);
        let p = a.mul(&b);
        assert_eq!(p.truncation_order(), 2);
        assert_eq!(p.coeff(-2), ratio(1, 3));
    }

    #[test]
    #[should_panic(expected = "beyond the truncation order")]
    fn coeff_beyond_truncation_panics() {
        LaurentSeries::zero(3).coeff(4);
    }

    #[test]
    fn addition_aligns_orders() {
        let a = LaurentSeries::from_terms(5, &[(-1, rat(2)), (3, rat(1))]);
        let b = LaurentSeries::from_terms(7, &[(0, rat(4)), (-1, rat(-2))]);
        let s = a.add(&b);
        assert_eq!(s.truncation_order(), 5);
        assert_eq!(s.coeff(-1), rat(0));
        assert_eq!(s.coeff(0), rat(4));
        assert_eq!(s.coeff(3), rat(1));
    }
}
