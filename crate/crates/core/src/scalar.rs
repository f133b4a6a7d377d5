//! Exact arithmetic over the rationals extended by square roots of positive
//! rationals.
//!
//! A [`Scalar`] is a finite sum `Σ qᵢ·√rᵢ` with rational `qᵢ` and distinct
//! square-free positive integer radicands `rᵢ`. Since the square roots of
//! distinct square-free integers are linearly independent over ℚ, the
//! canonical term map is unique for a given real number, so equality of
//! values is equality of term maps.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Largest integer radicand accepted after rewriting `√(a/b)` as `√(ab)/b`.
pub const RADICAND_BOUND: u128 = 1_000_000_000_000;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Scalar {
    terms: BTreeMap<u64, Rational>,
}

/// Splits `n` as `outer² · core` with `core` square-free.
fn square_free_split(mut n: u128) -> (u128, u128) {
    debug_assert!(n > 0);
    let mut outer = 1u128;
    let mut core = 1u128;
    let mut p = 2u128;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            outer *= p;
        }
        if e % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (outer, core * n)
}

pub fn rational(num: i128, den: i128) -> Rational {
    Ratio::new(num, den)
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i128 = a.trim().parse().ok()?;
            let b: i128 = b.trim().parse().ok()?;
            (b != 0).then(|| Ratio::new(a, b))
        }
        None => s.parse::<i128>().ok().map(Ratio::from_integer),
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Self { terms }
    }

    pub fn from_int(n: i128) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    /// `q·√r` in canonical form: `√(a/b)` becomes `√(ab)/b`, then the
    /// largest square factor leaves the integer radicand.
    pub fn normalize(q: Rational, r: Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::NonPositiveRadicand(format_rational(&r)));
        }
        let (a, b) = (*r.numer() as u128, *r.denom() as u128);
        let ab = a
            .checked_mul(b)
            .filter(|v| *v <= RADICAND_BOUND)
            .ok_or(Error::RadicandTooLarge(a.saturating_mul(b)))?;
        let (outer, core) = square_free_split(ab);
        let coeff = q * Rational::new(outer as i128, b as i128);
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(core as u64, coeff);
        }
        Ok(Self { terms })
    }

    /// Nonnegative square root of a nonnegative rational.
    pub fn sqrt(r: Rational) -> Result<Self> {
        if r.is_zero() {
            return Ok(Self::zero());
        }
        Self::normalize(Rational::one(), r)
    }

    /// `r^{-1/2}` for positive `r`.
    pub fn inv_sqrt(r: Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::NonPositiveRadicand(format_rational(&r)));
        }
        Self::normalize(Rational::one(), r.recip())
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(r, q)| (*r, q))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a rational, when there is no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&1).copied(),
            _ => None,
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(r, c)| (*r, c * q)).collect(),
        }
    }

    fn add_term(terms: &mut BTreeMap<u64, Rational>, radicand: u64, q: Rational) {
        let entry = terms.entry(radicand).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            terms.remove(&radicand);
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (r1, q1) in &self.terms {
            for (r2, q2) in &other.terms {
                // Both radicands are square-free, so with g = gcd the
                // cofactors are coprime square-free and √r1·√r2 = g·√(r1 r2 / g²).
                let g = r1.gcd(r2);
                let core = (*r1 / g) as u128 * (*r2 / g) as u128;
                if core > RADICAND_BOUND {
                    return Err(Error::RadicandTooLarge(core));
                }
                Self::add_term(&mut terms, core as u64, q1 * q2 * Rational::from_integer(g as i128));
            }
        }
        Ok(Self { terms })
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut terms = self.terms.clone();
        for (r, q) in &rhs.terms {
            Scalar::add_term(&mut terms, *r, *q);
        }
        Scalar { terms }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(r, q)| (*r, -q)).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

/// Panics if the product radicand leaves the supported range; use
/// [`Scalar::try_mul`] where that can happen.
impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar product radicand out of range")
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, s| &acc + &s)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, s| &acc + s)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(r, q)| {
                if *r == 1 {
                    format_rational(q)
                } else {
                    format!("{}*sqrt({})", format_rational(q), r)
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// Deterministic sample of scalars: small rationals plus `q·√r` for a few
/// square-free and non-square-free radicands.
pub fn sample_scalars() -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(), Scalar::one()];
    for (n, d) in [(1, 2), (-3, 4), (5, 1), (2, 3)] {
        out.push(Scalar::from_rational(rational(n, d)));
    }
    for (n, d, r) in [(1, 1, 2), (-1, 3, 3), (2, 5, 6), (1, 2, 12), (3, 1, 8)] {
        out.push(Scalar::normalize(rational(n, d), Rational::from_integer(r)).expect("positive"));
    }
    let mixed = &out[6] + &out[7];
    out.push(mixed);
    out
}

/// Ring laws over all sample triples, and the square-root identities
/// `√r·√r = r`, `√a·√b = √(ab)`, `r^{-1/2}·√r = 1`.
pub fn check_scalar_laws() -> Result<Vec<crate::report::Report>> {
    use crate::report::Report;
    let xs = sample_scalars();
    let mut ring = None;
    'outer: for a in &xs {
        for b in &xs {
            for c in &xs {
                let ab = a.try_mul(b)?;
                let checks = [
                    (a + b == b + a, "a+b = b+a"),
                    (ab == b.try_mul(a)?, "ab = ba"),
                    ((a + b) + c.clone() == a + &(b + c), "(a+b)+c = a+(b+c)"),
                    (ab.try_mul(c)? == a.try_mul(&b.try_mul(c)?)?, "(ab)c = a(bc)"),
                    (a.try_mul(&(b + c))? == &ab + &a.try_mul(c)?, "a(b+c) = ab+ac"),
                    ((a - a).is_zero(), "a-a = 0"),
                    (a.try_mul(&Scalar::one())? == *a, "a1 = a"),
                ];
                if let Some((_, law)) = checks.iter().find(|(ok, _)| !ok) {
                    ring = Some(format!("{law} fails at a={a}, b={b}, c={c}"));
                    break 'outer;
                }
            }
        }
    }
    let radicands: Vec<Rational> =
        [(1, 2), (2, 1), (3, 4), (8, 1), (12, 5), (9, 16), (7, 3)].iter().map(|&(n, d)| rational(n, d)).collect();
    let mut roots = None;
    'roots: for r in &radicands {
        let sr = Scalar::sqrt(*r)?;
        if sr.try_mul(&sr)? != Scalar::from_rational(*r) {
            roots = Some(format!("sqrt({r})^2 != {r}"));
            break;
        }
        if Scalar::inv_sqrt(*r)?.try_mul(&sr)? != Scalar::one() {
            roots = Some(format!("{r}^(-1/2) sqrt({r}) != 1"));
            break;
        }
        for t in &radicands {
            if sr.try_mul(&Scalar::sqrt(*t)?)? != Scalar::sqrt(r * t)? {
                roots = Some(format!("sqrt({r}) sqrt({t}) != sqrt({})", r * t));
                break 'roots;
            }
        }
    }
    Ok(vec![
        Report::from_witness("scalar ring laws", xs.len().pow(3), ring),
        Report::from_witness("square root identities", radicands.len().pow(2), roots),
    ])
}
