//! Exact arithmetic on real quadratic irrationals `(a + b√D)/c` and on
//! purely periodic continued fractions `[0; a_1, …, a_m, a_1, …]`.
//!
//! Nothing here touches floating point. Floors are computed with integer
//! square roots, comparisons by squaring after a sign split.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The exact real number `(a + b√d)/c`.
///
/// Values are always normalized: `c > 0`, `gcd(a, b, c) = 1`, the radicand is
/// square-free, and a rational value (`b = 0`) carries radicand 0. Equality is
/// therefore field-wise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticReal {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: u64,
}

impl QuadraticReal {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        radicand: u64,
    ) -> Result<Self> {
        let (a, mut b, c) = (a.into(), b.into(), c.into());
        if c.is_zero() {
            return Err(Error::Arithmetic("zero denominator".into()));
        }
        let mut d = radicand;
        if !b.is_zero() {
            let (square, free) = split_square(d);
            if free <= 1 {
                // √d is an integer: fold it into the rational part.
                let root = BigInt::from(square) * if free == 1 { 1 } else { 0 };
                return Ok(Self::normalized(a + b * root, BigInt::zero(), c, 0));
            }
            b *= BigInt::from(square);
            d = free;
        }
        Ok(Self::normalized(a, b, c, d))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::normalized(n.into(), BigInt::zero(), BigInt::one(), 0)
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        Self::new(num, 0, den, 0)
    }

    fn normalized(mut a: BigInt, mut b: BigInt, mut c: BigInt, mut d: u64) -> Self {
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        if b.is_zero() {
            d = 0;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() && !g.is_zero() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        QuadraticReal { a, b, c, d }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// Square-free radicand; 0 for rational values.
    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn common_radicand(&self, other: &Self) -> Result<u64> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(Error::Arithmetic(format!(
                "cannot combine values from Q(sqrt({x})) and Q(sqrt({y}))"
            ))),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        Ok(Self::normalized(
            &self.a * &other.c + &other.a * &self.c,
            &self.b * &other.c + &other.b * &self.c,
            &self.c * &other.c,
            d,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::normalized(-&self.a, -&self.b, self.c.clone(), self.d)
    }

    /// Multiply by the rational `num/den`.
    pub fn mul_rational(&self, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(Error::Arithmetic("zero denominator".into()));
        }
        Ok(Self::normalized(
            &self.a * &num,
            &self.b * &num,
            &self.c * den,
            self.d,
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        let a = &self.a * &other.a + &self.b * &other.b * BigInt::from(d);
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::normalized(a, b, &self.c * &other.c, d))
    }

    pub fn recip(&self) -> Result<Self> {
        // c / (a + b√d) = c (a - b√d) / (a² - b² d)
        let den = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d);
        if den.is_zero() {
            return Err(Error::Arithmetic("reciprocal of zero".into()));
        }
        Ok(Self::normalized(
            &self.c * &self.a,
            -(&self.c * &self.b),
            den,
            self.d,
        ))
    }

    /// Sign of the value: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        // c > 0, so the sign is that of a + b√d.
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: compare a² with b²d.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigInt::from(self.d);
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        Ok(match self.sub(other)?.signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// `⌊(a + b√d)/c⌋`, exactly.
    pub fn floor(&self) -> BigInt {
        // ⌊x/c⌋ = ⌊⌊x⌋/c⌋ for integer c ≥ 1, so floor the numerator first.
        let root = if self.b.is_zero() {
            BigInt::zero()
        } else {
            let sq = &self.b * &self.b * BigInt::from(self.d);
            let r = sq.sqrt();
            if self.b.is_negative() {
                // -|b|√d is irrational, so its floor is one below -⌊|b|√d⌋.
                -r - 1
            } else {
                r
            }
        };
        (&self.a + root).div_floor(&self.c)
    }
}

impl fmt::Display for QuadraticReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = String::new();
        if !self.a.is_zero() || self.b.is_zero() {
            num.push_str(&self.a.to_string());
        }
        if !self.b.is_zero() {
            let sqrt = format!("sqrt({})", self.d);
            let mag = self.b.abs();
            let term = if mag.is_one() {
                sqrt
            } else {
                format!("{mag}*{sqrt}")
            };
            if self.b.is_negative() {
                num.push('-');
            } else if !num.is_empty() {
                num.push('+');
            }
            num.push_str(&term);
        }
        if self.c.is_one() {
            write!(f, "{num}")
        } else if self.a.is_zero() || self.b.is_zero() {
            write!(f, "{num}/{}", self.c)
        } else {
            write!(f, "({num})/{}", self.c)
        }
    }
}

fn sign(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Split `d = s² · f` with `f` square-free.
fn split_square(mut d: u64) -> (u64, u64) {
    if d == 0 {
        return (0, 0);
    }
    let mut s = 1u64;
    let mut p = 2u64;
    while p * p <= d {
        while d.is_multiple_of(p * p) {
            d /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, d)
}

/// A purely periodic continued fraction `[0; a_1, …, a_m, a_1, …, a_m, …]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicCF {
    period: Vec<u64>,
}

impl PeriodicCF {
    pub fn new(period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidPeriod("empty period".into()));
        }
        if let Some(bad) = period.iter().find(|&&a| a == 0) {
            return Err(Error::InvalidPeriod(format!(
                "partial quotient {bad} must be at least 1"
            )));
        }
        Ok(PeriodicCF { period })
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    pub fn len(&self) -> usize {
        self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Partial quotient `a_i` for `i ≥ 1` (`a_0 = 0`).
    pub fn quotient(&self, i: usize) -> u64 {
        if i == 0 {
            0
        } else {
            self.period[(i - 1) % self.period.len()]
        }
    }

    pub fn max_quotient(&self) -> u64 {
        *self.period.iter().max().expect("nonempty")
    }
}

impl fmt::Display for PeriodicCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.period.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", body.join(" "))
    }
}

/// Numerators and denominators of the convergents `p_i/q_i`, for
/// `i = -1, 0, …, upto`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentTable {
    p: Vec<BigInt>,
    q: Vec<BigInt>,
}

impl ConvergentTable {
    /// `p_i` for `-1 ≤ i ≤ upto`.
    pub fn p(&self, i: isize) -> &BigInt {
        &self.p[(i + 1) as usize]
    }

    /// `q_i` for `-1 ≤ i ≤ upto`.
    pub fn q(&self, i: isize) -> &BigInt {
        &self.q[(i + 1) as usize]
    }

    /// Largest index in the table.
    pub fn upto(&self) -> isize {
        self.q.len() as isize - 2
    }
}

pub fn convergents(cf: &PeriodicCF, upto: usize) -> ConvergentTable {
    let mut p = vec![BigInt::one(), BigInt::zero()];
    let mut q = vec![BigInt::zero(), BigInt::one()];
    for i in 1..=upto {
        let a = BigInt::from(cf.quotient(i));
        let n = p.len();
        p.push(&a * &p[n - 1] + &p[n - 2]);
        q.push(&a * &q[n - 1] + &q[n - 2]);
    }
    ConvergentTable { p, q }
}

/// The value of the purely periodic continued fraction: the root in (0, 1) of
/// `q_{m-1} x² + (q_m - p_{m-1}) x - p_m = 0`.
pub fn cf_value(cf: &PeriodicCF) -> QuadraticReal {
    let m = cf.len() as isize;
    let t = convergents(cf, cf.len());
    let lead = t.q(m - 1).clone();
    let mid = t.q(m) - t.p(m - 1);
    let disc = &mid * &mid + BigInt::from(4) * &lead * t.p(m);
    let disc = disc
        .to_u64()
        .expect("discriminant of a catalog period fits in u64");
    QuadraticReal::new(-mid, 1, lead * 2, disc).expect("nonzero denominator")
}

/// First `count` partial quotients of `x = [0; a_1, a_2, …]`.
pub fn cf_expand(x: &QuadraticReal, count: usize) -> Result<Vec<BigInt>> {
    if x.is_rational() {
        return Err(Error::Arithmetic(format!(
            "{x} is rational; its expansion terminates"
        )));
    }
    let zero = QuadraticReal::integer(0);
    let one = QuadraticReal::integer(1);
    if x.compare(&zero)? != Ordering::Greater || x.compare(&one)? != Ordering::Less {
        return Err(Error::Arithmetic(format!("{x} is not in (0, 1)")));
    }
    let mut out = Vec::with_capacity(count);
    let mut cur = x.clone();
    for _ in 0..count {
        let y = cur.recip()?;
        let a = y.floor();
        cur = y.sub(&QuadraticReal::integer(a.clone()))?;
        out.push(a);
    }
    Ok(out)
}

/// Rotate the period so that it starts with an entry larger than 1.
///
/// The flag is set when no such rotation exists (the all-ones period); the
/// period is then returned unchanged.
pub fn period_rotate(cf: &PeriodicCF) -> (PeriodicCF, bool) {
    let p = cf.period();
    match p.iter().position(|&a| a > 1) {
        Some(k) => {
            let mut rotated = p[k..].to_vec();
            rotated.extend_from_slice(&p[..k]);
            (PeriodicCF { period: rotated }, false)
        }
        None => (cf.clone(), true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qr(a: i64, b: i64, c: i64, d: u64) -> QuadraticReal {
        QuadraticReal::new(a, b, c, d).unwrap()
    }

    fn period(p: &[u64]) -> PeriodicCF {
        PeriodicCF::new(p.to_vec()).unwrap()
    }

    #[test]
    fn linearity_normalizes() {
        let g = qr(-3, 1, 6, 21);
        let sum = g.add(&g.mul_rational(2, 1).unwrap()).unwrap();
        assert_eq!(sum, qr(-3, 1, 2, 21));
        assert_eq!(sum, qr(-9, 3, 6, 21));
    }

    #[test]
    fn alpha_from_gamma() {
        let g = qr(-3, 1, 6, 21);
        let alpha = QuadraticReal::integer(1)
            .add(&g.mul_rational(3, 1).unwrap())
            .unwrap();
        assert_eq!(alpha, qr(-1, 1, 2, 21));
    }

    #[test]
    fn compare_against_quarter() {
        // 4(√21 − 3) vs 6  ⇔  16·21 = 336 vs 18² = 324.
        let g = qr(-3, 1, 6, 21);
        let quarter = QuadraticReal::rational(1, 4).unwrap();
        assert_eq!(g.compare(&quarter).unwrap(), Ordering::Greater);
    }

    #[test]
    fn mixed_radicands_rejected() {
        let x = qr(0, 1, 1, 2);
        let y = qr(0, 1, 1, 3);
        assert!(x.add(&y).is_err());
        assert!(x.add(&QuadraticReal::integer(4)).is_ok());
    }

    #[test]
    fn floors() {
        let g = qr(-3, 1, 6, 21);
        assert_eq!(g.floor(), BigInt::from(0));
        assert_eq!(g.mul_rational(5, 1).unwrap().floor(), BigInt::from(1));
        assert_eq!(qr(0, 4, 1, 2).floor(), BigInt::from(5));
        assert_eq!(qr(0, -1, 1, 2).floor(), BigInt::from(-2));
        assert_eq!(qr(-7, 0, 2, 0).floor(), BigInt::from(-4));
    }

    #[test]
    fn radicand_square_part_extracted() {
        assert_eq!(qr(0, 1, 1, 8), qr(0, 2, 1, 2));
        assert_eq!(qr(1, 1, 1, 9), QuadraticReal::integer(4));
    }

    #[test]
    fn catalog_values() {
        assert_eq!(cf_value(&period(&[3, 1])), qr(-3, 1, 6, 21));
        assert_eq!(cf_value(&period(&[2])), qr(-1, 1, 1, 2));
        assert_eq!(cf_value(&period(&[4, 1, 1, 1])), qr(-2, 1, 3, 7));
        assert_eq!(cf_value(&period(&[1])), qr(-1, 1, 2, 5));
    }

    #[test]
    fn expansions() {
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(cf_expand(&qr(-3, 1, 6, 21), 6).unwrap(), big(&[3, 1, 3, 1, 3, 1]));
        assert_eq!(cf_expand(&qr(-1, 1, 1, 2), 4).unwrap(), big(&[2, 2, 2, 2]));
        assert_eq!(cf_expand(&qr(-1, 1, 2, 5), 5).unwrap(), big(&[1, 1, 1, 1, 1]));
        assert!(cf_expand(&QuadraticReal::rational(1, 3).unwrap(), 2).is_err());
    }

    #[test]
    fn convergent_denominators() {
        let t = convergents(&period(&[3, 1]), 5);
        let q: Vec<i64> = (0..=5).map(|i| t.q(i).to_i64().unwrap()).collect();
        assert_eq!(q, vec![1, 3, 4, 15, 19, 72]);
        assert_eq!(t.q(-1), &BigInt::zero());
        assert_eq!(t.p(-1), &BigInt::one());

        let t = convergents(&period(&[2]), 3);
        let q: Vec<i64> = (0..=3).map(|i| t.q(i).to_i64().unwrap()).collect();
        assert_eq!(q, vec![1, 2, 5, 12]);

        let t = convergents(&period(&[4, 1, 1, 1]), 4);
        let q: Vec<i64> = (0..=4).map(|i| t.q(i).to_i64().unwrap()).collect();
        assert_eq!(q, vec![1, 4, 5, 9, 14]);
    }

    #[test]
    fn rotation() {
        assert_eq!(period_rotate(&period(&[1, 3])), (period(&[3, 1]), false));
        assert_eq!(period_rotate(&period(&[2])), (period(&[2]), false));
        assert_eq!(period_rotate(&period(&[1, 1])), (period(&[1, 1]), true));
    }

    #[test]
    fn invalid_periods() {
        assert!(PeriodicCF::new(vec![]).is_err());
        assert!(PeriodicCF::new(vec![2, 0]).is_err());
    }
}
