//! Exact points of the binary full shift and the rational circle, and the
//! algebra of cylinder functions on the shift.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

/// Largest cylinder-function depth materialized by default.
pub const DEFAULT_DEPTH_CAP: usize = 12;

pub type Bits = Vec<u8>;

/// An eventually periodic sequence `prefix · cycle^∞` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    prefix: Bits,
    cycle: Bits,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Word(Word),
    /// A rational in `[0, 1)`.
    Angle(Rational),
}

fn primitive_root(cycle: &[u8]) -> &[u8] {
    let n = cycle.len();
    for d in 1..n {
        if n % d == 0 && (d..n).all(|i| cycle[i] == cycle[i - d]) {
            return &cycle[..d];
        }
    }
    cycle
}

fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().find(|b| **b > 1) {
        Some(b) => Err(Error::InvalidBit(char::from_digit(*b as u32, 10).unwrap_or('?'))),
        None => Ok(()),
    }
}

pub fn parse_bits(s: &str) -> Result<Bits> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidBit(other)),
        })
        .collect()
}

pub fn format_bits(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}

/// Bits read as a binary integer, first bit most significant.
pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, b| (acc << 1) | *b as usize)
}

pub fn index_to_bits(index: usize, len: usize) -> Bits {
    (0..len).map(|i| ((index >> (len - 1 - i)) & 1) as u8).collect()
}

/// All binary words of length `len`, in lexicographic order.
pub fn all_words(len: usize) -> Vec<Bits> {
    (0..1usize << len).map(|i| index_to_bits(i, len)).collect()
}

impl Word {
    pub fn new(prefix: Bits, cycle: Bits) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        check_bits(&prefix)?;
        check_bits(&cycle)?;
        let mut cycle = primitive_root(&cycle).to_vec();
        let mut prefix = prefix;
        while let Some(&last) = prefix.last() {
            if last != *cycle.last().unwrap() {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        Ok(Word { prefix, cycle })
    }

    pub fn constant(bit: u8) -> Self {
        Word { prefix: vec![], cycle: vec![bit] }
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[u8] {
        &self.cycle
    }

    pub fn coordinate(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn first_bits(&self, k: usize) -> Bits {
        (0..k).map(|i| self.coordinate(i)).collect()
    }

    pub fn shifted(&self) -> Word {
        if self.prefix.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            Word { prefix: vec![], cycle }
        } else {
            Word { prefix: self.prefix[1..].to_vec(), cycle: self.cycle.clone() }
        }
    }

    pub fn prepended(&self, bit: u8) -> Word {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(bit);
        prefix.extend_from_slice(&self.prefix);
        Word::new(prefix, self.cycle.clone()).expect("valid bits")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", format_bits(&self.prefix), format_bits(&self.cycle))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Point {
    pub fn word(prefix: &str, cycle: &str) -> Result<Point> {
        Ok(Point::Word(Word::new(parse_bits(prefix)?, parse_bits(cycle)?)?))
    }

    pub fn angle(q: Rational) -> Result<Point> {
        if q < Rational::zero() || q >= Rational::one() {
            return Err(Error::PointSyntax(format_rational(&q)));
        }
        Ok(Point::Angle(q))
    }

    pub fn as_word(&self) -> Result<&Word> {
        match self {
            Point::Word(w) => Ok(w),
            Point::Angle(_) => Err(Error::WrongSpace { expected: "word", got: self.to_string() }),
        }
    }

    pub fn as_angle(&self) -> Result<&Rational> {
        match self {
            Point::Angle(q) => Ok(q),
            Point::Word(_) => Err(Error::WrongSpace { expected: "angle", got: self.to_string() }),
        }
    }

    pub fn coordinate(&self, i: usize) -> Result<u8> {
        Ok(self.as_word()?.coordinate(i))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Word(w) => write!(f, "{w}"),
            Point::Angle(q) => f.write_str(&format_rational(q)),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Point> {
        let s = s.trim();
        if let Some((prefix, cycle)) = s.split_once('|') {
            return Point::word(prefix, cycle);
        }
        match parse_rational(s) {
            Some(q) => Point::angle(q),
            None => Err(Error::PointSyntax(s.to_string())),
        }
    }
}

/// All canonical words with `|prefix| ≤ depth` and `1 ≤ |cycle| ≤ depth`,
/// deduplicated and sorted.
pub fn sample_points(depth: usize) -> Vec<Point> {
    let mut out = Vec::new();
    for plen in 0..=depth {
        for prefix in all_words(plen) {
            for clen in 1..=depth.max(1) {
                for cycle in all_words(clen) {
                    out.push(Point::Word(Word::new(prefix.clone(), cycle).unwrap()));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// One representative `w · tail^∞` per depth-`depth` cylinder, in index order.
pub fn cylinder_representatives(depth: usize, tail: u8) -> Vec<Point> {
    all_words(depth)
        .into_iter()
        .map(|w| Point::Word(Word::new(w, vec![tail]).unwrap()))
        .collect()
}

/// The first `count` rationals of `[0, 1)` ordered by denominator, then
/// numerator.
pub fn circle_samples(count: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(count);
    let mut q: i128 = 1;
    while out.len() < count {
        for a in 0..q {
            if a.gcd(&q) == 1 && out.len() < count {
                out.push(Point::Angle(Rational::new(a, q)));
            }
        }
        q += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylinderSet {
    pub word: Bits,
}

impl CylinderSet {
    pub fn new(word: Bits) -> Result<Self> {
        check_bits(&word)?;
        Ok(CylinderSet { word })
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        let w = p.as_word()?;
        Ok(self.word.iter().enumerate().all(|(i, b)| w.coordinate(i) == *b))
    }
}

impl fmt::Display for CylinderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", format_bits(&self.word))
    }
}

/// A function of the first `depth` coordinates, stored as a table indexed
/// by `bits_to_index`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CylinderFunction {
    depth: usize,
    table: Vec<Scalar>,
}

impl CylinderFunction {
    pub fn from_table(depth: usize, table: Vec<Scalar>) -> Result<Self> {
        if depth > DEFAULT_DEPTH_CAP {
            return Err(Error::DepthCapExceeded { depth, cap: DEFAULT_DEPTH_CAP });
        }
        if table.len() != 1 << depth {
            return Err(Error::Precondition(format!(
                "depth {depth} table needs {} entries, got {}",
                1usize << depth,
                table.len()
            )));
        }
        Ok(CylinderFunction { depth, table })
    }

    pub fn from_fn(depth: usize, f: impl Fn(&[u8]) -> Scalar) -> Result<Self> {
        if depth > DEFAULT_DEPTH_CAP {
            return Err(Error::DepthCapExceeded { depth, cap: DEFAULT_DEPTH_CAP });
        }
        Self::from_table(depth, all_words(depth).iter().map(|w| f(w)).collect())
    }

    pub fn constant(c: Scalar) -> Self {
        CylinderFunction { depth: 0, table: vec![c] }
    }

    pub fn indicator(word: &[u8]) -> Result<Self> {
        check_bits(word)?;
        Self::from_fn(word.len(), |w| if w == word { Scalar::one() } else { Scalar::zero() })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn table(&self) -> &[Scalar] {
        &self.table
    }

    pub fn value_on(&self, word: &[u8]) -> &Scalar {
        &self.table[bits_to_index(&word[..self.depth])]
    }

    pub fn eval(&self, p: &Point) -> Result<Scalar> {
        let w = p.as_word()?;
        Ok(self.value_on(&w.first_bits(self.depth)).clone())
    }

    pub fn refine(&self, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::Precondition(format!(
                "cannot refine depth {} to {depth}",
                self.depth
            )));
        }
        Self::from_fn(depth, |w| self.value_on(w).clone())
    }

    fn zip(&self, other: &Self, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Self> {
        let depth = self.depth.max(other.depth);
        Self::from_fn(depth, |w| op(self.value_on(w), other.value_on(w)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        CylinderFunction { depth: self.depth, table: self.table.iter().map(|v| v * c).collect() }
    }

    /// Same function at the smallest depth that represents it.
    pub fn reduced(&self) -> Self {
        let mut f = self.clone();
        while f.depth > 0 {
            let half = f.table.len() / 2;
            let collapsible = (0..half).all(|i| f.table[2 * i] == f.table[2 * i + 1]);
            if !collapsible {
                break;
            }
            f = CylinderFunction {
                depth: f.depth - 1,
                table: (0..half).map(|i| f.table[2 * i].clone()).collect(),
            };
        }
        f
    }
}

impl fmt::Display for CylinderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = all_words(self.depth)
            .iter()
            .zip(&self.table)
            .map(|(w, v)| format!("{}->{}", format_bits(w), v))
            .collect();
        write!(f, "{{{}}}", entries.join(", "))
    }
}

impl fmt::Debug for CylinderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
