// Copyright 2026 The probsess Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact rational arithmetic and probability intervals.
//!
//! Every probability handled by the crate is a [`Rational`]; floating point
//! only appears in Monte Carlo estimates. [`ProbInterval`] models the
//! tolerance bands attached to choices in global and local types.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("probability {0} is outside [0,1]")]
    OutOfRange(Rational),
    #[error("empty interval: lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: Rational, hi: Rational },
    #[error("degenerate interval at {0} must be closed on both ends")]
    OpenPoint(Rational),
}

/// An exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Rational {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(n: i64) -> Rational {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// True when `0 <= self <= 1`.
    pub fn is_probability(&self) -> bool {
        !self.is_negative() && self.0 <= BigRational::one()
    }

    pub fn min(self, other: Rational) -> Rational {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Canonical machine-readable form: `a/b`, or `a` when the denominator is 1.
    pub fn to_fraction_string(&self) -> String {
        if self.0.denom().is_one() {
            self.0.numer().to_string()
        } else {
            format!("{}/{}", self.0.numer(), self.0.denom())
        }
    }

    /// Exact decimal expansion if the denominator only has factors 2 and 5.
    pub fn to_decimal_string(&self) -> Option<String> {
        let mut d = self.0.denom().clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let ten = BigInt::from(10);
        let (mut twos, mut fives) = (0u32, 0u32);
        while (&d % &two).is_zero() {
            d /= &two;
            twos += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            fives += 1;
        }
        if !d.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        let scaled = (self.0.clone() * BigRational::from_integer(num::pow(ten.clone(), digits as usize))).to_integer();
        let neg = scaled.is_negative();
        let mut s = scaled.abs().to_string();
        if digits > 0 {
            while s.len() <= digits as usize {
                s.insert(0, '0');
            }
            s.insert(s.len() - digits as usize, '.');
        }
        if neg {
            s.insert(0, '-');
        }
        Some(s)
    }

    /// Exact decimal, or an approximation to six places marked with `~`.
    pub fn to_approx_string(&self) -> String {
        self.to_decimal_string().unwrap_or_else(|| format!("~{:.6}", self.to_f64()))
    }

    /// `7/50 (0.14)`: the fraction with its decimal value.
    pub fn to_report_string(&self) -> String {
        format!("{} ({})", self.to_fraction_string(), self.to_approx_string())
    }

    /// Decimal when exact, fraction otherwise. Used for human output and
    /// for the concrete syntax, where both forms parse back.
    pub fn to_human_string(&self) -> String {
        self.to_decimal_string().unwrap_or_else(|| self.to_fraction_string())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_human_string())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fraction_string())
    }
}

impl FromStr for Rational {
    type Err = KernelError;

    /// Accepts `7/50`, `0.14`, `3`, and a leading `-`.
    fn from_str(s: &str) -> Result<Rational, KernelError> {
        let t = s.trim();
        let bad = || KernelError::Malformed(s.to_string());
        let int = |x: &str| -> Result<BigInt, KernelError> {
            let body = x.strip_prefix('-').unwrap_or(x);
            if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            BigInt::from_str(x).map_err(|_| bad())
        };
        if let Some((n, d)) = t.split_once('/') {
            let n = int(n.trim())?;
            let d = int(d.trim())?;
            if d.is_zero() {
                return Err(KernelError::ZeroDenominator(s.to_string()));
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        if let Some((whole, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = whole.starts_with('-');
            let whole = int(if whole.is_empty() || whole == "-" { "0" } else { whole })?;
            let scale = num::pow(BigInt::from(10), frac.len());
            let frac = BigInt::from_str(frac).map_err(|_| bad())?;
            let mut n = whole.abs() * &scale + frac;
            if neg {
                n = -n;
            }
            return Ok(Rational(BigRational::new(n, scale)));
        }
        Ok(Rational(BigRational::from_integer(int(t)?)))
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| &a + b)
    }
}

/// A sub-interval of `[0,1]` with independently open or closed endpoints.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProbInterval {
    lo: Rational,
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
}

impl ProbInterval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self, KernelError> {
        if !lo.is_probability() {
            return Err(KernelError::OutOfRange(lo));
        }
        if !hi.is_probability() {
            return Err(KernelError::OutOfRange(hi));
        }
        if lo > hi {
            return Err(KernelError::Inverted { lo, hi });
        }
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(KernelError::OpenPoint(lo));
        }
        Ok(ProbInterval { lo, hi, lo_closed, hi_closed })
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Self, KernelError> {
        Self::new(lo, hi, true, true)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// The closed point interval `[p,p]`.
pub fn point(p: Rational) -> Result<ProbInterval, KernelError> {
    ProbInterval::closed(p.clone(), p)
}

/// Endpoint-wise sum clamped at 1.
///
/// An endpoint is closed iff both operand endpoints are closed, except that
/// an endpoint clamped to 1 is closed.
pub fn interval_add(a: &ProbInterval, b: &ProbInterval) -> ProbInterval {
    let one = Rational::one();
    let lo_sum = &a.lo + &b.lo;
    let hi_sum = &a.hi + &b.hi;
    let lo_clamped = lo_sum >= one;
    let hi_clamped = hi_sum >= one;
    let lo = lo_sum.min(one.clone());
    let hi = hi_sum.min(one);
    let lo_closed = lo_clamped || (a.lo_closed && b.lo_closed);
    let hi_closed = hi_clamped || (a.hi_closed && b.hi_closed);
    // Both clamped, or a degenerate sum of closed bounds: force a closed point.
    if lo == hi {
        return ProbInterval { lo, hi, lo_closed: true, hi_closed: true };
    }
    ProbInterval { lo, hi, lo_closed, hi_closed }
}

pub fn interval_contains(p: &Rational, d: &ProbInterval) -> bool {
    let above = match p.cmp(&d.lo) {
        Ordering::Greater => true,
        Ordering::Equal => d.lo_closed,
        Ordering::Less => false,
    };
    let below = match p.cmp(&d.hi) {
        Ordering::Less => true,
        Ordering::Equal => d.hi_closed,
        Ordering::Greater => false,
    };
    above && below
}

impl fmt::Display for ProbInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{}", self.lo);
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl fmt::Debug for ProbInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn iv(lo: &str, hi: &str, lc: bool, hc: bool) -> ProbInterval {
        ProbInterval::new(r(lo), r(hi), lc, hc).unwrap()
    }

    #[test]
    fn parses_both_literal_forms() {
        assert_eq!(r("0.14"), r("7/50"));
        assert_eq!(r("14/100"), Rational::new(7, 50));
        assert_eq!(r("1"), Rational::one());
        assert_eq!(r("-0.5"), Rational::new(-1, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("0.".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn renders_decimal_and_fraction() {
        assert_eq!(r("7/50").to_decimal_string().unwrap(), "0.14");
        assert_eq!(r("7/50").to_fraction_string(), "7/50");
        assert_eq!(r("1/3").to_decimal_string(), None);
        assert_eq!(r("1/3").to_human_string(), "1/3");
        assert_eq!(r("2").to_human_string(), "2");
        assert_eq!(r("1/20").to_human_string(), "0.05");
    }

    #[test]
    fn adds_point_intervals() {
        let s = interval_add(&point(r("0.3")).unwrap(), &point(r("0.5")).unwrap());
        assert_eq!(s, point(r("0.8")).unwrap());
    }

    #[test]
    fn clamps_sum_at_one() {
        let s = interval_add(&iv("0.7", "0.9", true, true), &iv("0.15", "0.25", true, true));
        assert_eq!(s, iv("0.85", "1", true, true));
    }

    #[test]
    fn zero_is_additive_identity() {
        let open = iv("0.2", "0.4", false, false);
        assert_eq!(interval_add(&point(Rational::zero()).unwrap(), &open), open);
    }

    #[test]
    fn membership_respects_endpoint_flags() {
        let d = iv("0.7", "0.9", true, true);
        assert!(!interval_contains(&r("0.3"), &d));
        assert!(interval_contains(&r("0.8"), &d));
        assert!(!interval_contains(&r("0.7"), &iv("0.7", "0.9", false, true)));
        assert!(interval_contains(&r("0.9"), &iv("0.7", "0.9", false, true)));
        assert!(!interval_contains(&r("0.9"), &iv("0.7", "0.9", true, false)));
    }

    #[test]
    fn point_rejects_out_of_range() {
        assert_eq!(point(Rational::one()).unwrap().to_string(), "1");
        assert!(point(r("0.2")).unwrap().is_point());
        assert!(point(r("3/2")).is_err());
        assert!(point(r("-1/2")).is_err());
    }

    #[test]
    fn rejects_open_points_and_inversions() {
        assert!(ProbInterval::new(r("0.5"), r("0.5"), false, true).is_err());
        assert!(ProbInterval::new(r("0.6"), r("0.5"), true, true).is_err());
    }

    fn arb_prob() -> impl Strategy<Value = Rational> {
        (0i64..=60).prop_map(|n| Rational::new(n, 60))
    }

    fn arb_interval() -> impl Strategy<Value = ProbInterval> {
        (arb_prob(), arb_prob(), any::<bool>(), any::<bool>()).prop_map(|(a, b, lc, hc)| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (lc, hc) = if lo == hi { (true, true) } else { (lc, hc) };
            ProbInterval::new(lo, hi, lc, hc).unwrap()
        })
    }

    proptest! {
        #[test]
        fn addition_commutes(a in arb_interval(), b in arb_interval()) {
            let x = interval_add(&a, &b);
            let y = interval_add(&b, &a);
            prop_assert_eq!(x, y);
        }

        #[test]
        fn addition_associates_on_bounds(a in arb_interval(), b in arb_interval(), c in arb_interval()) {
            let x = interval_add(&interval_add(&a, &b), &c);
            let y = interval_add(&a, &interval_add(&b, &c));
            prop_assert_eq!(x.lo(), y.lo());
            prop_assert_eq!(x.hi(), y.hi());
        }

        #[test]
        fn sums_stay_ordered_and_bounded(a in arb_interval(), b in arb_interval()) {
            let s = interval_add(&a, &b);
            prop_assert!(s.hi() <= &Rational::one());
            prop_assert!(s.lo() <= s.hi());
        }

        #[test]
        fn point_contains_itself(p in arb_prob()) {
            prop_assert!(interval_contains(&p, &point(p.clone()).unwrap()));
        }

        #[test]
        fn print_parse_round_trip(n in -500i64..500, d in 1i64..300) {
            let q = Rational::new(n, d);
            prop_assert_eq!(q.to_fraction_string().parse::<Rational>().unwrap(), q.clone());
            prop_assert_eq!(q.to_human_string().parse::<Rational>().unwrap(), q);
        }
    }
}
