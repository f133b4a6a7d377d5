//! Lattice-ordered groups `(G, P)` and the mini-square calculus.
//!
//! Two concrete families are provided: `ℤ^d` ordered by the nonnegative
//! orthant, and the positive rationals ordered by divisibility (stored as
//! prime-exponent maps so meets and joins are componentwise min/max).
//! Both groups are commutative, so the left-invariant order `x ≤ y ⇔ x⁻¹y ∈ P`
//! coincides with the right-invariant one.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LatticeGroup {
    /// `ℤ^d` with `P = ℕ^d`.
    IntVector(usize),
    /// `ℚ₊^×` with `P` the positive integers.
    PositiveRationals,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeElement {
    Vector(Vec<i64>),
    /// Prime → exponent, zero exponents never stored.
    PosRational(BTreeMap<u64, i64>),
}

fn factorize(mut n: u64) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    let mut p = 2u64;
    while p * p <= n {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

fn merge_exponents(
    a: &BTreeMap<u64, i64>,
    b: &BTreeMap<u64, i64>,
    op: impl Fn(i64, i64) -> i64,
) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    for p in a.keys().chain(b.keys()) {
        let e = op(*a.get(p).unwrap_or(&0), *b.get(p).unwrap_or(&0));
        if e != 0 {
            out.insert(*p, e);
        }
    }
    out
}

impl LatticeGroup {
    pub fn identity(&self) -> LatticeElement {
        match self {
            LatticeGroup::IntVector(d) => LatticeElement::Vector(vec![0; *d]),
            LatticeGroup::PositiveRationals => LatticeElement::PosRational(BTreeMap::new()),
        }
    }

    /// Elements of `P` with every generator exponent at most `bound`.
    /// For the positive rationals this is the integers `1..=bound`.
    pub fn positive_box(&self, bound: u32) -> Vec<LatticeElement> {
        match self {
            LatticeGroup::IntVector(d) => {
                let mut out = vec![vec![]];
                for _ in 0..*d {
                    out = out
                        .into_iter()
                        .flat_map(|v: Vec<i64>| {
                            (0..=bound as i64).map(move |c| {
                                let mut w = v.clone();
                                w.push(c);
                                w
                            })
                        })
                        .collect();
                }
                out.into_iter().map(LatticeElement::Vector).collect()
            }
            LatticeGroup::PositiveRationals => {
                (1..=bound as u64).map(LatticeElement::from_integer).collect()
            }
        }
    }

    /// Group elements in a symmetric box: `[-bound, bound]^d`, or the
    /// reduced fractions `a/b` with `1 ≤ a, b ≤ bound`.
    pub fn group_box(&self, bound: u32) -> Vec<LatticeElement> {
        match self {
            LatticeGroup::IntVector(d) => {
                let mut out = vec![vec![]];
                for _ in 0..*d {
                    out = out
                        .into_iter()
                        .flat_map(|v: Vec<i64>| {
                            (-(bound as i64)..=bound as i64).map(move |c| {
                                let mut w = v.clone();
                                w.push(c);
                                w
                            })
                        })
                        .collect();
                }
                out.into_iter().map(LatticeElement::Vector).collect()
            }
            LatticeGroup::PositiveRationals => {
                let mut out: Vec<LatticeElement> = (1..=bound as u64)
                    .flat_map(|a| (1..=bound as u64).map(move |b| LatticeElement::from_ratio(a, b)))
                    .collect();
                out.sort();
                out.dedup();
                out
            }
        }
    }
}

impl LatticeElement {
    pub fn vector(v: &[i64]) -> Self {
        LatticeElement::Vector(v.to_vec())
    }

    pub fn from_integer(n: u64) -> Self {
        assert!(n > 0, "positive rationals exclude 0");
        LatticeElement::PosRational(factorize(n))
    }

    pub fn from_ratio(num: u64, den: u64) -> Self {
        assert!(num > 0 && den > 0, "positive rationals exclude 0");
        let (a, b) = (factorize(num), factorize(den));
        LatticeElement::PosRational(merge_exponents(&a, &b, |x, y| x - y))
    }

    pub fn group(&self) -> LatticeGroup {
        match self {
            LatticeElement::Vector(v) => LatticeGroup::IntVector(v.len()),
            LatticeElement::PosRational(_) => LatticeGroup::PositiveRationals,
        }
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.group() == other.group() {
            Ok(())
        } else {
            Err(Error::MixedGroups(self.to_string(), other.to_string()))
        }
    }

    fn zip(&self, other: &Self, op: impl Fn(i64, i64) -> i64) -> Result<Self> {
        self.same_group(other)?;
        Ok(match (self, other) {
            (LatticeElement::Vector(a), LatticeElement::Vector(b)) => {
                LatticeElement::Vector(a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect())
            }
            (LatticeElement::PosRational(a), LatticeElement::PosRational(b)) => {
                LatticeElement::PosRational(merge_exponents(a, b, op))
            }
            _ => unreachable!(),
        })
    }

    pub fn is_identity(&self) -> bool {
        match self {
            LatticeElement::Vector(v) => v.iter().all(|c| *c == 0),
            LatticeElement::PosRational(m) => m.is_empty(),
        }
    }

    /// Membership in the positive cone `P`.
    pub fn is_positive(&self) -> bool {
        match self {
            LatticeElement::Vector(v) => v.iter().all(|c| *c >= 0),
            LatticeElement::PosRational(m) => m.values().all(|e| *e >= 0),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn inv(&self) -> Self {
        match self {
            LatticeElement::Vector(v) => LatticeElement::Vector(v.iter().map(|c| -c).collect()),
            LatticeElement::PosRational(m) => {
                LatticeElement::PosRational(m.iter().map(|(p, e)| (*p, -e)).collect())
            }
        }
    }

    /// `self⁻¹ · other`.
    pub fn left_div(&self, other: &Self) -> Result<Self> {
        self.inv().mul(other)
    }

    /// `self · other⁻¹`.
    pub fn right_div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv())
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.zip(other, i64::min)
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.zip(other, i64::max)
    }

    /// `self ≤ other` in the left-invariant order.
    pub fn le(&self, other: &Self) -> Result<bool> {
        Ok(self.left_div(other)?.is_positive())
    }

    /// Components for `ℤ^d`; `None` for the rationals.
    pub fn as_vector(&self) -> Option<&[i64]> {
        match self {
            LatticeElement::Vector(v) => Some(v),
            LatticeElement::PosRational(_) => None,
        }
    }

    /// Integer value of a positive-rational element lying in `P`.
    pub fn as_integer(&self) -> Option<u64> {
        match self {
            LatticeElement::PosRational(m) if self.is_positive() => {
                m.iter().try_fold(1u64, |acc, (p, e)| acc.checked_mul(p.checked_pow(*e as u32)?))
            }
            _ => None,
        }
    }

    /// Parses `(a,b,..)` or a bare integer for `ℤ^d`, and `a`, `a/b` or
    /// `p^e*q^f` for the positive rationals.
    pub fn parse(s: &str, group: LatticeGroup) -> Result<Self> {
        let bad = || Error::ExprSyntax(format!("bad group element {s:?} for {group:?}"));
        let s = s.trim();
        match group {
            LatticeGroup::IntVector(d) => {
                let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
                let v: Vec<i64> = inner
                    .split(',')
                    .map(|c| c.trim().parse::<i64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                if v.len() != d {
                    return Err(bad());
                }
                Ok(LatticeElement::Vector(v))
            }
            LatticeGroup::PositiveRationals => {
                if s.contains('^') {
                    let mut m = BTreeMap::new();
                    for factor in s.split('*') {
                        let (p, e) = factor.split_once('^').unwrap_or((factor, "1"));
                        let p: u64 = p.trim().parse().map_err(|_| bad())?;
                        let e: i64 = e.trim().parse().map_err(|_| bad())?;
                        if factorize(p).len() != 1 || factorize(p).get(&p) != Some(&1) {
                            return Err(bad());
                        }
                        *m.entry(p).or_insert(0) += e;
                    }
                    m.retain(|_, e| *e != 0);
                    return Ok(LatticeElement::PosRational(m));
                }
                let (a, b) = s.split_once('/').unwrap_or((s, "1"));
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                if a == 0 || b == 0 {
                    return Err(bad());
                }
                Ok(LatticeElement::from_ratio(a, b))
            }
        }
    }
}

impl fmt::Display for LatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeElement::Vector(v) if v.len() == 1 => write!(f, "{}", v[0]),
            LatticeElement::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            LatticeElement::PosRational(m) if m.is_empty() => f.write_str("1"),
            LatticeElement::PosRational(m) => {
                let parts: Vec<String> = m
                    .iter()
                    .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
                    .collect();
                f.write_str(&parts.join("*"))
            }
        }
    }
}

impl fmt::Debug for LatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `(s, t, u, v) ∈ P⁴` with `su = tv`, `s ∧ t = 1` and `u⁻¹ ∨ v⁻¹ = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MiniSquare {
    pub s: LatticeElement,
    pub t: LatticeElement,
    pub u: LatticeElement,
    pub v: LatticeElement,
}

impl MiniSquare {
    pub fn is_valid(&self) -> Result<bool> {
        let all_positive =
            [&self.s, &self.t, &self.u, &self.v].iter().all(|e| e.is_positive());
        Ok(all_positive
            && self.s.mul(&self.u)? == self.t.mul(&self.v)?
            && self.s.meet(&self.t)?.is_identity()
            && self.u.inv().join(&self.v.inv())?.is_identity())
    }

    /// `s ∨ t`, which equals `su = tv`.
    pub fn top(&self) -> Result<LatticeElement> {
        self.s.mul(&self.u)
    }

    pub fn mirrored(&self) -> MiniSquare {
        MiniSquare {
            s: self.t.clone(),
            t: self.s.clone(),
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }
}

impl fmt::Display for MiniSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[s={}, t={}, u={}, v={}]", self.s, self.t, self.u, self.v)
    }
}

pub fn mini_square_from_pair(m: &LatticeElement, n: &LatticeElement) -> Result<MiniSquare> {
    let lo = m.meet(n)?;
    let hi = m.join(n)?;
    Ok(MiniSquare {
        s: lo.left_div(m)?,
        t: lo.left_div(n)?,
        u: m.left_div(&hi)?,
        v: n.left_div(&hi)?,
    })
}

/// The unique `(u, v)` making `(s, t, u, v)` a mini-square.
pub fn complete_mini_square(
    s: &LatticeElement,
    t: &LatticeElement,
) -> Result<(LatticeElement, LatticeElement)> {
    for e in [s, t] {
        if !e.is_positive() {
            return Err(Error::NotPositive(e.to_string()));
        }
    }
    if !s.meet(t)?.is_identity() {
        return Err(Error::NotCoprime(s.to_string(), t.to_string()));
    }
    let top = s.join(t)?;
    Ok((s.left_div(&top)?, t.left_div(&top)?))
}

/// The two canonical factorizations `x = a⁻¹ b` and `x = n m⁻¹` with
/// `a, b, n, m ∈ P`, from `a = (x ∧ 1)⁻¹` and `n = x ∨ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub inverse_part: LatticeElement,
    pub positive_part: LatticeElement,
    pub numerator: LatticeElement,
    pub denominator: LatticeElement,
}

pub fn decompose(x: &LatticeElement) -> Result<Decomposition> {
    let one = x.group().identity();
    let y = x.meet(&one)?;
    let n = x.join(&one)?;
    Ok(Decomposition {
        inverse_part: y.inv(),
        positive_part: y.left_div(x)?,
        numerator: n.clone(),
        denominator: x.left_div(&n)?,
    })
}

/// All distinct mini-squares `mini_square_from_pair(m, n)` for `m, n` in
/// the positive box.
pub fn mini_squares_in_box(group: LatticeGroup, bound: u32) -> Result<Vec<MiniSquare>> {
    let pbox = group.positive_box(bound);
    let mut out = Vec::new();
    for m in &pbox {
        for n in &pbox {
            out.push(mini_square_from_pair(m, n)?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `ℤ²` elements with entries in `[-3, 3]`.
pub fn vector_test_range() -> Vec<LatticeElement> {
    LatticeGroup::IntVector(2).group_box(3)
}

/// Positive integers up to 30.
pub fn integer_test_range() -> Vec<LatticeElement> {
    LatticeGroup::PositiveRationals.positive_box(30)
}

/// Validity of `mini_square_from_pair(m, n)` and `s ∨ t = su = tv` for all
/// pairs in `elements`.
pub fn check_mini_squares(elements: &[LatticeElement]) -> Result<crate::report::Report> {
    let mut witness = None;
    'outer: for m in elements {
        for n in elements {
            let sq = mini_square_from_pair(m, n)?;
            let top = sq.s.join(&sq.t)?;
            if !sq.is_valid()? || top != sq.s.mul(&sq.u)? || top != sq.t.mul(&sq.v)? {
                witness = Some(format!("m={m}, n={n}: {sq}"));
                break 'outer;
            }
            let lo = m.meet(n)?;
            if lo.mul(&sq.s)? != *m || lo.mul(&sq.t)? != *n {
                witness = Some(format!("m={m}, n={n}: (m∧n)s != m or (m∧n)t != n"));
                break 'outer;
            }
        }
    }
    Ok(crate::report::Report::from_witness("mini-square invariants", elements.len().pow(2), witness))
}

/// For every coprime pair `(s, t)` of positive `elements`, the only
/// `(u, v)` among `candidates²` making a mini-square is the completion.
pub fn check_completion_uniqueness(
    elements: &[LatticeElement],
    candidates: &[LatticeElement],
) -> Result<crate::report::Report> {
    let positive: Vec<&LatticeElement> = elements.iter().filter(|e| e.is_positive()).collect();
    let mut witness = None;
    let mut count = 0;
    'outer: for s in &positive {
        for t in &positive {
            if !s.meet(t)?.is_identity() {
                continue;
            }
            count += 1;
            let expected = complete_mini_square(s, t)?;
            let mut found = Vec::new();
            for u in candidates {
                for v in candidates {
                    let sq = MiniSquare { s: (*s).clone(), t: (*t).clone(), u: u.clone(), v: v.clone() };
                    if sq.is_valid()? {
                        found.push((u.clone(), v.clone()));
                    }
                }
            }
            if found != vec![expected.clone()] {
                witness = Some(format!("s={s}, t={t}: {} completions found", found.len()));
                break 'outer;
            }
        }
    }
    Ok(crate::report::Report::from_witness("mini-square completion unique", count, witness))
}

/// `g = a⁻¹b = nm⁻¹` with all four parts positive and each pair coprime.
pub fn check_decompositions(elements: &[LatticeElement]) -> Result<crate::report::Report> {
    for g in elements {
        let d = decompose(g)?;
        let parts = [&d.inverse_part, &d.positive_part, &d.numerator, &d.denominator];
        let ok = parts.iter().all(|p| p.is_positive())
            && d.inverse_part.left_div(&d.positive_part)? == *g
            && d.numerator.right_div(&d.denominator)? == *g
            && d.inverse_part.meet(&d.positive_part)?.is_identity()
            && d.numerator.meet(&d.denominator)?.is_identity();
        if !ok {
            return Ok(crate::report::Report::fail("decompose recomposes", elements.len(), format!("g={g}")));
        }
    }
    Ok(crate::report::Report::pass("decompose recomposes", elements.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: &[i64]) -> LatticeElement {
        LatticeElement::vector(a)
    }

    fn int(n: u64) -> LatticeElement {
        LatticeElement::from_integer(n)
    }

    #[test]
    fn law_checks_on_test_ranges() {
        let vs = vector_test_range();
        let ints = integer_test_range();
        assert_eq!(vs.len(), 49);
        assert!(check_mini_squares(&vs).unwrap().passed());
        assert!(check_mini_squares(&ints).unwrap().passed());
        let r = check_completion_uniqueness(&vs, &LatticeGroup::IntVector(2).positive_box(6)).unwrap();
        assert!(r.passed() && r.samples > 0, "{r}");
        assert!(check_completion_uniqueness(&ints, &ints).unwrap().passed());
        assert!(check_decompositions(&vs).unwrap().passed());
        assert!(check_decompositions(&LatticeGroup::PositiveRationals.group_box(30)).unwrap().passed());
    }

    #[test]
    fn meets_and_joins() {
        assert_eq!(v(&[2, 0]).meet(&v(&[0, 3])).unwrap(), v(&[0, 0]));
        assert_eq!(int(4).meet(&int(6)).unwrap(), int(2));
        assert_eq!(int(4).join(&int(6)).unwrap(), int(12));
        assert_eq!(v(&[-3]).join(&v(&[0])).unwrap(), v(&[0]));
    }

    #[test]
    fn mixed_groups_rejected() {
        assert!(matches!(v(&[1]).meet(&int(2)), Err(Error::MixedGroups(..))));
        assert!(v(&[1]).mul(&v(&[1, 2])).is_err());
    }

    #[test]
    fn mini_square_examples() {
        let sq = mini_square_from_pair(&v(&[2, 0]), &v(&[0, 3])).unwrap();
        assert_eq!((sq.s.clone(), sq.t.clone()), (v(&[2, 0]), v(&[0, 3])));
        assert_eq!((sq.u.clone(), sq.v.clone()), (v(&[0, 3]), v(&[2, 0])));
        assert!(sq.is_valid().unwrap());

        let sq = mini_square_from_pair(&int(4), &int(6)).unwrap();
        assert_eq!(sq, MiniSquare { s: int(2), t: int(3), u: int(3), v: int(2) });

        let sq = mini_square_from_pair(&v(&[1, 2]), &v(&[1, 2])).unwrap();
        assert!([&sq.s, &sq.t, &sq.u, &sq.v].iter().all(|e| e.is_identity()));
    }

    #[test]
    fn completion_examples() {
        assert_eq!(complete_mini_square(&int(3), &int(5)).unwrap(), (int(5), int(3)));
        assert_eq!(
            complete_mini_square(&v(&[1, 0]), &v(&[0, 1])).unwrap(),
            (v(&[0, 1]), v(&[1, 0]))
        );
        assert_eq!(
            complete_mini_square(&v(&[0]), &v(&[4])).unwrap(),
            (v(&[4]), v(&[0]))
        );
        assert!(matches!(
            complete_mini_square(&int(4), &int(6)),
            Err(Error::NotCoprime(..))
        ));
        assert!(complete_mini_square(&v(&[-1]), &v(&[0])).is_err());
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&v(&[-3])).unwrap();
        assert_eq!((d.inverse_part, d.positive_part), (v(&[3]), v(&[0])));
        assert_eq!((d.numerator, d.denominator), (v(&[0]), v(&[3])));

        let d = decompose(&v(&[2, -1])).unwrap();
        assert_eq!((d.numerator, d.denominator), (v(&[2, 0]), v(&[0, 1])));

        let d = decompose(&v(&[0, 0])).unwrap();
        assert!(d.numerator.is_identity() && d.denominator.is_identity());

        let d = decompose(&LatticeElement::from_ratio(3, 2)).unwrap();
        assert_eq!((d.inverse_part, d.positive_part), (int(2), int(3)));
    }

    #[test]
    fn rendering_and_parsing() {
        assert_eq!(v(&[1, -1]).to_string(), "(1,-1)");
        assert_eq!(v(&[-2]).to_string(), "-2");
        assert_eq!(int(12).to_string(), "2^2*3");
        assert_eq!(LatticeElement::from_ratio(1, 1).to_string(), "1");
        let g = LatticeGroup::PositiveRationals;
        assert_eq!(LatticeElement::parse("3/2", g).unwrap(), LatticeElement::from_ratio(3, 2));
        assert_eq!(LatticeElement::parse("2^2*3", g).unwrap(), int(12));
        assert_eq!(LatticeElement::parse("2^-1*3", g).unwrap(), LatticeElement::from_ratio(3, 2));
        assert_eq!(
            LatticeElement::parse("(1,-1)", LatticeGroup::IntVector(2)).unwrap(),
            v(&[1, -1])
        );
        assert_eq!(LatticeElement::parse("-1", LatticeGroup::IntVector(1)).unwrap(), v(&[-1]));
        assert!(LatticeElement::parse("(1,2,3)", LatticeGroup::IntVector(2)).is_err());
        assert!(LatticeElement::parse("4^2", g).is_err());
    }

    #[test]
    fn integer_round_trip() {
        for n in 1..=60u64 {
            assert_eq!(int(n).as_integer(), Some(n));
        }
        assert_eq!(LatticeElement::from_ratio(1, 2).as_integer(), None);
    }

    #[test]
    fn boxes() {
        assert_eq!(LatticeGroup::IntVector(2).positive_box(3).len(), 16);
        assert_eq!(LatticeGroup::IntVector(2).group_box(2).len(), 25);
        assert_eq!(LatticeGroup::PositiveRationals.positive_box(6).len(), 6);
        // 1/1, 1/2, 2/1: three distinct ratios at bound 2.
        assert_eq!(LatticeGroup::PositiveRationals.group_box(2).len(), 3);
    }
}
