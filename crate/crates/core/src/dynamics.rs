//! Surjective local homeomorphisms of the full shift and the circle,
//! semigroup actions built from them, and the combinatorial checks on
//! pairs of maps (star-commutation, commutation of kernel relations).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{LatticeElement, LatticeGroup};
use crate::report::{sweep, Report};
use crate::scalar::Rational;
use crate::space::{
    all_words, bits_to_index, circle_samples, format_bits, index_to_bits, parse_bits,
    sample_points, Bits, Point, Word,
};

/// Widest dictionary accepted from files.
pub const MAX_WIDTH: usize = 12;
/// Widest dictionary the exhaustive census enumerates.
pub const MAX_CENSUS_WIDTH: usize = 5;
/// Number of rational sample points used for the circle.
pub const CIRCLE_SAMPLE_COUNT: usize = 50;

/// A set of binary words of a fixed width, stored as a membership table
/// indexed by `bits_to_index`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dictionary {
    width: usize,
    members: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Progressivity {
    /// `choice[β]` is the unique `ε` with `βε ∈ D`.
    Progressive { choice: Bits },
    Violation { prefix: Bits, completions: usize },
}

impl Dictionary {
    pub fn new(width: usize, words: &[Bits]) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        let mut members = vec![false; 1 << width];
        for (i, w) in words.iter().enumerate() {
            if w.len() != width {
                return Err(Error::DictionaryFormat {
                    line: i + 1,
                    reason: format!("word {} has length {}, expected {width}", format_bits(w), w.len()),
                });
            }
            members[bits_to_index(w)] = true;
        }
        Ok(Dictionary { width, members })
    }

    pub fn from_strs(width: usize, words: &[&str]) -> Result<Self> {
        let words: Vec<Bits> = words.iter().map(|w| parse_bits(w)).collect::<Result<_>>()?;
        Self::new(width, &words)
    }

    /// The dictionary whose choice function is `choice`.
    pub fn from_choice(width: usize, choice: &[u8]) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH || choice.len() != 1 << (width - 1) {
            return Err(Error::WidthOutOfRange(width));
        }
        let mut members = vec![false; 1 << width];
        for (beta, eps) in choice.iter().enumerate() {
            members[(beta << 1) | *eps as usize] = true;
        }
        Ok(Dictionary { width, members })
    }

    /// Parses the `width=p` header followed by one word per line. Blank
    /// lines and lines starting with `#` are ignored.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::DictionaryFormat {
            line: 1,
            reason: "missing width header".into(),
        })?;
        let width: usize = header
            .strip_prefix("width=")
            .and_then(|w| w.trim().parse().ok())
            .ok_or_else(|| Error::DictionaryFormat {
                line: hline,
                reason: format!("expected width=p, got {header:?}"),
            })?;
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        let mut words = Vec::new();
        for (n, line) in lines {
            let bits = parse_bits(line).map_err(|e| Error::DictionaryFormat {
                line: n,
                reason: e.to_string(),
            })?;
            if bits.len() != width {
                return Err(Error::DictionaryFormat {
                    line: n,
                    reason: format!("word {line} has length {}, expected {width}", bits.len()),
                });
            }
            words.push(bits);
        }
        Self::new(width, &words)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = format!("width={}\n", self.width);
        for w in self.words() {
            out.push_str(&format_bits(&w));
            out.push('\n');
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> Vec<Bits> {
        (0..self.members.len())
            .filter(|i| self.members[*i])
            .map(|i| index_to_bits(i, self.width))
            .collect()
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.members[index]
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        word.len() == self.width && self.members[bits_to_index(word)]
    }

    pub fn check_progressive(&self) -> Progressivity {
        let mut choice = Vec::with_capacity(1 << (self.width - 1));
        for beta in 0..1usize << (self.width - 1) {
            let zero = self.members[beta << 1];
            let one = self.members[(beta << 1) | 1];
            if zero == one {
                return Progressivity::Violation {
                    prefix: index_to_bits(beta, self.width - 1),
                    completions: zero as usize + one as usize,
                };
            }
            choice.push(one as u8);
        }
        Progressivity::Progressive { choice }
    }
}

impl fmt::Display for Dictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.words().iter().map(|w| format_bits(w)).collect();
        write!(f, "{{{}}}", words.join(","))
    }
}

impl fmt::Debug for Dictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Every progressive dictionary of the given width, ordered by choice
/// function read as a binary number with `β = 0…0` least significant.
pub fn all_progressive_dictionaries(width: usize) -> Result<Vec<Dictionary>> {
    if width == 0 || width > MAX_CENSUS_WIDTH {
        return Err(Error::WidthOutOfRange(width));
    }
    let betas = 1usize << (width - 1);
    (0..1u64 << betas)
        .map(|mask| {
            let choice: Bits = (0..betas).map(|b| ((mask >> b) & 1) as u8).collect();
            Dictionary::from_choice(width, &choice)
        })
        .collect()
}

/// Sliding-window image: `T(x)_k = 1` iff `x_k … x_{k+p-1} ∈ D`.
pub fn ca_apply(dict: &Dictionary, x: &Word) -> Word {
    let p = dict.width;
    let (l, c) = (x.prefix().len(), x.cycle().len());
    let window = |k: usize| (k..k + p).fold(0usize, |acc, i| (acc << 1) | x.coordinate(i) as usize);
    let prefix: Bits = (0..l).map(|k| dict.members[window(k)] as u8).collect();
    let cycle: Bits = (l..l + c).map(|k| dict.members[window(k)] as u8).collect();
    Word::new(prefix, cycle).expect("nonempty cycle")
}

/// The `2^{p-1}` preimages of `y`, one per initial block `β`, in the order
/// of `β`.
pub fn ca_preimages(dict: &Dictionary, y: &Word) -> Result<Vec<Word>> {
    match dict.check_progressive() {
        Progressivity::Progressive { choice } => Ok(preimages_with_choice(dict.width, &choice, y)),
        Progressivity::Violation { prefix, completions } => {
            Err(Error::NonProgressive(format_bits(&prefix), completions))
        }
    }
}

fn preimages_with_choice(width: usize, choice: &[u8], y: &Word) -> Vec<Word> {
    let lead = width - 1;
    let mask = (1usize << lead) - 1;
    let (l, c) = (y.prefix().len(), y.cycle().len());
    (0..1usize << lead)
        .map(|beta| {
            let mut x = index_to_bits(beta, lead);
            let mut window = beta;
            let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
            let mut k = 0usize;
            loop {
                if k >= l {
                    if let Some(&k1) = seen.get(&(window, (k - l) % c)) {
                        return Word::new(x[..k1].to_vec(), x[k1..k].to_vec())
                            .expect("nonempty cycle");
                    }
                    seen.insert((window, (k - l) % c), k);
                }
                let bit = choice[window] ^ (1 - y.coordinate(k));
                x.push(bit);
                window = ((window << 1) | bit as usize) & mask;
                k += 1;
            }
        })
        .collect()
}

/// A progressive cellular automaton with its cached choice function.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellularAutomaton {
    dict: Dictionary,
    choice: Bits,
}

impl CellularAutomaton {
    pub fn new(dict: Dictionary) -> Result<Self> {
        match dict.check_progressive() {
            Progressivity::Progressive { choice } => Ok(CellularAutomaton { dict, choice }),
            Progressivity::Violation { prefix, completions } => {
                Err(Error::NonProgressive(format_bits(&prefix), completions))
            }
        }
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn apply(&self, x: &Word) -> Word {
        ca_apply(&self.dict, x)
    }

    pub fn preimages(&self, y: &Word) -> Vec<Word> {
        preimages_with_choice(self.dict.width, &self.choice, y)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Endo {
    Shift,
    Automaton(Arc<CellularAutomaton>),
    CircleMul(u64),
}

fn reduce_mod_one(q: Rational) -> Rational {
    q - q.floor()
}

impl Endo {
    pub fn automaton(dict: Dictionary) -> Result<Endo> {
        Ok(Endo::Automaton(Arc::new(CellularAutomaton::new(dict)?)))
    }

    pub fn ledrappier_t() -> Endo {
        Endo::automaton(Dictionary::from_strs(2, &["01", "10"]).unwrap()).unwrap()
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        Ok(match self {
            Endo::Shift => Point::Word(x.as_word()?.shifted()),
            Endo::Automaton(ca) => Point::Word(ca.apply(x.as_word()?)),
            Endo::CircleMul(n) => {
                Point::Angle(reduce_mod_one(x.as_angle()? * Rational::from_integer(*n as i128)))
            }
        })
    }

    pub fn preimages(&self, y: &Point) -> Result<Vec<Point>> {
        Ok(match self {
            Endo::Shift => {
                let w = y.as_word()?;
                vec![Point::Word(w.prepended(0)), Point::Word(w.prepended(1))]
            }
            Endo::Automaton(ca) => ca.preimages(y.as_word()?).into_iter().map(Point::Word).collect(),
            Endo::CircleMul(n) => {
                let q = y.as_angle()?;
                let n = *n as i128;
                (0..n)
                    .map(|j| Point::Angle((q + Rational::from_integer(j)) / Rational::from_integer(n)))
                    .collect()
            }
        })
    }

    pub fn fiber_size(&self) -> usize {
        match self {
            Endo::Shift => 2,
            Endo::Automaton(ca) => 1 << (ca.dict.width - 1),
            Endo::CircleMul(n) => *n as usize,
        }
    }

    /// How many coordinates of `x` beyond the first `k` the first `k`
    /// coordinates of the image depend on.
    pub fn window_growth(&self) -> Option<usize> {
        match self {
            Endo::Shift => Some(1),
            Endo::Automaton(ca) => Some(ca.dict.width - 1),
            Endo::CircleMul(_) => None,
        }
    }
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endo::Shift => f.write_str("S"),
            Endo::Automaton(ca) => write!(f, "T{}", ca.dict),
            Endo::CircleMul(n) => write!(f, "x->{n}x"),
        }
    }
}

impl fmt::Debug for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A right action `θ : P → End(X)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Action {
    /// `P = ℕ`, `θ_a = E^a`.
    Single(Endo),
    /// `P = ℕ²`, `θ_{(a,b)} = S^a T^b` for commuting `S`, `T`.
    Pair(Endo, Endo),
    /// `P` the positive integers acting on the circle, `θ_n(x) = nx mod 1`.
    Circle,
}

fn iterate(e: &Endo, times: i64, x: &Point) -> Result<Point> {
    let mut p = x.clone();
    for _ in 0..times {
        p = e.apply(&p)?;
    }
    Ok(p)
}

fn iterate_preimages(e: &Endo, times: i64, ys: Vec<Point>) -> Result<Vec<Point>> {
    let mut current = ys;
    for _ in 0..times {
        let mut next = Vec::with_capacity(current.len() * e.fiber_size());
        for y in &current {
            next.extend(e.preimages(y)?);
        }
        current = next;
    }
    Ok(current)
}

impl Action {
    pub fn single(e: Endo) -> Action {
        Action::Single(e)
    }

    /// Builds the `ℕ²` action, checking `ST = TS` on depth-3 samples.
    pub fn pair(s: Endo, t: Endo) -> Result<Action> {
        for x in sample_points(3) {
            if s.apply(&t.apply(&x)?)? != t.apply(&s.apply(&x)?)? {
                return Err(Error::NonCommuting(x.to_string()));
            }
        }
        Ok(Action::Pair(s, t))
    }

    pub fn ledrappier() -> Action {
        Action::Pair(Endo::Shift, Endo::ledrappier_t())
    }

    pub fn circle() -> Action {
        Action::Circle
    }

    pub fn group(&self) -> LatticeGroup {
        match self {
            Action::Single(_) => LatticeGroup::IntVector(1),
            Action::Pair(..) => LatticeGroup::IntVector(2),
            Action::Circle => LatticeGroup::PositiveRationals,
        }
    }

    pub fn is_word_action(&self) -> bool {
        !matches!(self, Action::Circle)
    }

    /// Generator exponents of `n ∈ P` (the integer itself on the circle).
    pub fn exponents(&self, n: &LatticeElement) -> Result<Vec<i64>> {
        if n.group() != self.group() {
            return Err(Error::MixedGroups(n.to_string(), format!("{:?}", self.group())));
        }
        if !n.is_positive() {
            return Err(Error::NotPositive(n.to_string()));
        }
        match self {
            Action::Circle => {
                let k = n.as_integer().ok_or_else(|| Error::NotPositive(n.to_string()))?;
                Ok(vec![k as i64])
            }
            _ => Ok(n.as_vector().expect("vector group").to_vec()),
        }
    }

    pub fn apply(&self, n: &LatticeElement, x: &Point) -> Result<Point> {
        let e = self.exponents(n)?;
        match self {
            Action::Single(endo) => iterate(endo, e[0], x),
            Action::Pair(s, t) => iterate(s, e[0], &iterate(t, e[1], x)?),
            Action::Circle => Endo::CircleMul(e[0] as u64).apply(x),
        }
    }

    /// `θ_n^{-1}(y)`, sorted.
    pub fn preimages(&self, n: &LatticeElement, y: &Point) -> Result<Vec<Point>> {
        let e = self.exponents(n)?;
        let mut out = match self {
            Action::Single(endo) => iterate_preimages(endo, e[0], vec![y.clone()])?,
            Action::Pair(s, t) => {
                let via_s = iterate_preimages(s, e[0], vec![y.clone()])?;
                iterate_preimages(t, e[1], via_s)?
            }
            Action::Circle => Endo::CircleMul(e[0] as u64).preimages(y)?,
        };
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// `C^n_y = θ_n^{-1}(θ_n(y))`.
    pub fn fiber_class(&self, n: &LatticeElement, y: &Point) -> Result<Vec<Point>> {
        self.preimages(n, &self.apply(n, y)?)
    }

    /// Depth growth of `θ_n` on cylinder functions.
    pub fn growth(&self, n: &LatticeElement) -> Result<usize> {
        let e = self.exponents(n)?;
        match self {
            Action::Single(endo) => Ok(e[0] as usize * endo.window_growth().unwrap_or(0)),
            Action::Pair(s, t) => Ok(e[0] as usize * s.window_growth().unwrap_or(0)
                + e[1] as usize * t.window_growth().unwrap_or(0)),
            Action::Circle => Err(Error::Unsupported("depth growth on the circle".into())),
        }
    }

    pub fn samples(&self, depth: usize) -> Vec<Point> {
        match self {
            Action::Circle => circle_samples(CIRCLE_SAMPLE_COUNT),
            _ => sample_points(depth),
        }
    }

    /// The generator box `{n ∈ P : exponents ≤ bound}` (`1..=bound` on the circle).
    pub fn generator_box(&self, bound: u32) -> Vec<LatticeElement> {
        self.group().positive_box(bound)
    }

    pub fn generators(&self) -> Vec<LatticeElement> {
        match self {
            Action::Single(_) => vec![LatticeElement::vector(&[1])],
            Action::Pair(..) => vec![LatticeElement::vector(&[1, 0]), LatticeElement::vector(&[0, 1])],
            Action::Circle => vec![2u64, 3, 5].into_iter().map(LatticeElement::from_integer).collect(),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Single(e) => write!(f, "N acting by {e}"),
            Action::Pair(s, t) => write!(f, "N^2 acting by ({s}, {t})"),
            Action::Circle => f.write_str("positive integers acting on the circle"),
        }
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarWitness {
    pub x: Point,
    pub y: Point,
    pub lifts: usize,
}

impl fmt::Display for StarWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={}, y={}: {} points z with S(z)=x, T(z)=y", self.x, self.y, self.lifts)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarCommuting {
    pub holds: bool,
    pub pairs: usize,
    pub witness: Option<StarWitness>,
}

/// For every sampled `x` and every `y` with `T(x) = S(y)`, counts the `z`
/// with `S(z) = x` and `T(z) = y`.
pub fn check_star_commuting(s: &Endo, t: &Endo, depth: usize) -> Result<StarCommuting> {
    let xs = sample_points(depth);
    let per_x: Vec<(usize, Option<StarWitness>)> = xs
        .par_iter()
        .map(|x| -> Result<(usize, Option<StarWitness>)> {
            let ys = s.preimages(&t.apply(x)?)?;
            let s_fiber = s.preimages(x)?;
            let mut first = None;
            for y in &ys {
                let mut lifts = 0;
                for z in &s_fiber {
                    if t.apply(z)? == *y {
                        lifts += 1;
                    }
                }
                if lifts != 1 && first.is_none() {
                    first = Some(StarWitness { x: x.clone(), y: y.clone(), lifts });
                }
            }
            Ok((ys.len(), first))
        })
        .collect::<Result<_>>()?;
    let pairs = per_x.iter().map(|(n, _)| n).sum();
    let witness = per_x.into_iter().find_map(|(_, w)| w);
    Ok(StarCommuting { holds: witness.is_none(), pairs, witness })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationMembership {
    pub member: bool,
    /// Every `y` with `B(y) = B(z)`, paired with whether `A(y) = A(x)`.
    pub candidates: Vec<(Point, bool)>,
}

impl RelationMembership {
    pub fn witness(&self) -> Option<&Point> {
        self.candidates.iter().find(|(_, ok)| *ok).map(|(y, _)| y)
    }
}

/// Decides `(x, z) ∈ R_A ∘ R_B`, i.e. whether some `y` has `A(x) = A(y)`
/// and `B(y) = B(z)`, by running over the finite fiber of `B` through `z`.
pub fn relation_compose_member(a: &Endo, b: &Endo, x: &Point, z: &Point) -> Result<RelationMembership> {
    let ax = a.apply(x)?;
    let candidates = b
        .preimages(&b.apply(z)?)?
        .into_iter()
        .map(|y| {
            let ok = a.apply(&y)? == ax;
            Ok((y, ok))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelationMembership { member: candidates.iter().any(|(_, ok)| *ok), candidates })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationWitness {
    pub x: Point,
    pub z: Point,
    /// True when `(x, z) ∈ R_A∘R_B \ R_B∘R_A`, false for the other difference.
    pub in_ab: bool,
}

impl fmt::Display for RelationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (yes, no) = if self.in_ab { ("A∘B", "B∘A") } else { ("B∘A", "A∘B") };
        write!(f, "({}, {}) in R_{yes} but not R_{no}", self.x, self.z)
    }
}

/// Compares `R_A∘R_B` and `R_B∘R_A` on all pairs of sampled points.
pub fn check_relation_commutation(a: &Endo, b: &Endo, depth: usize) -> Result<Option<RelationWitness>> {
    let xs = sample_points(depth);
    // (x,z) ∈ R_A∘R_B iff B(z) ∈ {B(y) : A(y) = A(x)}.
    let reach = |first: &Endo, second: &Endo| -> Result<Vec<HashSet<Point>>> {
        xs.par_iter()
            .map(|x| {
                first
                    .preimages(&first.apply(x)?)?
                    .iter()
                    .map(|y| second.apply(y))
                    .collect::<Result<HashSet<_>>>()
            })
            .collect()
    };
    let ab = reach(a, b)?;
    let ba = reach(b, a)?;
    let a_img: Vec<Point> = xs.iter().map(|z| a.apply(z)).collect::<Result<_>>()?;
    let b_img: Vec<Point> = xs.iter().map(|z| b.apply(z)).collect::<Result<_>>()?;
    let found = (0..xs.len()).into_par_iter().find_map_first(|i| {
        (0..xs.len()).find_map(|j| {
            let in_ab = ab[i].contains(&b_img[j]);
            let in_ba = ba[i].contains(&a_img[j]);
            (in_ab != in_ba).then(|| RelationWitness { x: xs[i].clone(), z: xs[j].clone(), in_ab })
        })
    });
    Ok(found)
}

/// Rows `0..rows` of the configuration whose row 0 is `first_row`, each row
/// obtained from the previous one by `x_{p,q+1} = x_{p,q} + x_{p+1,q} mod 2`.
pub fn ledrappier_reconstruct(first_row: &Word, rows: usize, cols: usize) -> Vec<Bits> {
    let mut current = first_row.first_bits(cols + rows);
    let mut out = Vec::with_capacity(rows);
    for _ in 0..rows {
        out.push(current[..cols].to_vec());
        current = current.windows(2).map(|w| w[0] ^ w[1]).collect();
    }
    out
}

/// For every sampled first row `w`: the horizontally shifted array is the
/// array of `S(w)`, and the vertically shifted array is the array of `T(w)`.
pub fn check_ledrappier_conjugacy(depth: usize) -> Result<Report> {
    let t = Endo::ledrappier_t();
    let samples = sample_points(depth);
    let rows = depth + 2;
    let cols = 2 * depth + 4;
    sweep("ledrappier shifts", &samples, |p| {
        let w = p.as_word()?;
        let array = ledrappier_reconstruct(w, rows + 1, cols + 1);
        let horizontal: Vec<Bits> = array[..rows].iter().map(|r| r[1..].to_vec()).collect();
        let vertical: Vec<Bits> = array[1..].iter().map(|r| r[..cols].to_vec()).collect();
        let s_array = ledrappier_reconstruct(&w.shifted(), rows, cols);
        let t_array = ledrappier_reconstruct(t.apply(p)?.as_word()?, rows, cols);
        if horizontal != s_array {
            return Ok(Some(format!("H disagrees with S at first row {p}")));
        }
        if vertical != t_array {
            return Ok(Some(format!("V disagrees with T at first row {p}")));
        }
        Ok(None)
    })
}

/// All `2^{2^p}` subsets of `Ω_p` that are progressive, by brute force.
pub fn progressive_by_brute_force(width: usize) -> Vec<Dictionary> {
    let n = 1usize << width;
    (0..1u64 << n)
        .filter_map(|mask| {
            let words: Vec<Bits> = all_words(width)
                .into_iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, w)| w)
                .collect();
            let d = Dictionary::new(width, &words).ok()?;
            matches!(d.check_progressive(), Progressivity::Progressive { .. }).then_some(d)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn pt(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn example_dict() -> Dictionary {
        Dictionary::from_strs(3, &["000", "100", "010", "111"]).unwrap()
    }

    fn w(s: &str) -> Word {
        pt(s).as_word().unwrap().clone()
    }

    #[test]
    fn ca_apply_examples() {
        let d = example_dict();
        assert_eq!(ca_apply(&d, &w("0|1")).to_string(), "0|1");
        assert_eq!(ca_apply(&d, &w("|1")).to_string(), "|1");
        assert_eq!(ca_apply(&d, &w("|0")).to_string(), "|1");
    }

    /// Independent oracle: the image's first bits straight from the definition.
    fn naive_image_bits(d: &Dictionary, x: &Word, k: usize) -> Bits {
        (0..k)
            .map(|i| d.contains(&x.first_bits(i + d.width())[i..]) as u8)
            .collect()
    }

    #[test]
    fn ca_apply_matches_sliding_window_definition() {
        for d in all_progressive_dictionaries(3).unwrap() {
            for p in sample_points(3) {
                let x = p.as_word().unwrap();
                let img = ca_apply(&d, x);
                assert_eq!(img.first_bits(30), naive_image_bits(&d, x, 30));
            }
        }
    }

    #[test]
    fn progressivity() {
        assert!(matches!(example_dict().check_progressive(), Progressivity::Progressive { .. }));
        let led = Dictionary::from_strs(2, &["01", "10"]).unwrap();
        assert_eq!(led.check_progressive(), Progressivity::Progressive { choice: vec![1, 0] });
        let empty = Dictionary::new(3, &[]).unwrap();
        assert_eq!(
            empty.check_progressive(),
            Progressivity::Violation { prefix: vec![0, 0], completions: 0 }
        );
        assert!(matches!(
            ca_preimages(&empty, &w("|0")),
            Err(Error::NonProgressive(_, 0))
        ));
    }

    #[test]
    fn progressive_census_counts() {
        for p in 1..=3 {
            let mut fast = all_progressive_dictionaries(p).unwrap();
            let mut brute = progressive_by_brute_force(p);
            assert_eq!(fast.len(), 1 << (1 << (p - 1)));
            fast.sort_by_key(|d| d.words());
            brute.sort_by_key(|d| d.words());
            assert_eq!(fast, brute);
        }
        assert_eq!(all_progressive_dictionaries(3).unwrap().len(), 16);
        assert!(all_progressive_dictionaries(6).is_err());
    }

    #[test]
    fn ca_preimage_examples() {
        let led = Dictionary::from_strs(2, &["01", "10"]).unwrap();
        let pre: Vec<String> = ca_preimages(&led, &w("|0")).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(pre, vec!["|0", "|1"]);
        let pre = ca_preimages(&example_dict(), &w("|1")).unwrap();
        assert_eq!(pre.len(), 4);
        for x in &pre {
            assert_eq!(ca_apply(&example_dict(), x), w("|1"));
        }
        let identity = Dictionary::from_strs(1, &["1"]).unwrap();
        assert_eq!(ca_preimages(&identity, &w("01|0")).unwrap(), vec![w("01|0")]);
    }

    #[test]
    fn ca_preimages_round_trip_and_cover_initial_blocks() {
        for p in 1..=4 {
            for d in all_progressive_dictionaries(p).unwrap().iter().step_by(if p == 4 { 17 } else { 1 }) {
                for y in sample_points(3) {
                    let y = y.as_word().unwrap();
                    let pre = ca_preimages(d, y).unwrap();
                    assert_eq!(pre.len(), 1 << (p - 1));
                    for (beta, x) in pre.iter().enumerate() {
                        assert_eq!(&ca_apply(d, x), y, "{d} {x}");
                        assert_eq!(bits_to_index(&x.first_bits(p - 1)), beta);
                    }
                }
            }
        }
    }

    #[test]
    fn automata_commute_with_shift() {
        for d in all_progressive_dictionaries(3).unwrap() {
            let t = Endo::automaton(d).unwrap();
            for x in sample_points(3) {
                assert_eq!(
                    Endo::Shift.apply(&t.apply(&x).unwrap()).unwrap(),
                    t.apply(&Endo::Shift.apply(&x).unwrap()).unwrap()
                );
            }
        }
    }

    #[test]
    fn shift_and_circle_maps() {
        let pre = Endo::Shift.preimages(&pt("|1")).unwrap();
        assert_eq!(pre, vec![pt("0|1"), pt("|1")]);
        let c = Endo::CircleMul(2);
        assert_eq!(c.apply(&pt("1/3")).unwrap(), pt("2/3"));
        assert_eq!(c.preimages(&pt("1/3")).unwrap(), vec![pt("1/6"), pt("2/3")]);
        assert!(c.apply(&pt("|0")).is_err());
        assert!(Endo::Shift.apply(&pt("1/2")).is_err());
    }

    #[test]
    fn preimages_invert_every_endo() {
        let endos = vec![Endo::Shift, Endo::ledrappier_t(), Endo::automaton(example_dict()).unwrap()];
        for e in &endos {
            for y in sample_points(3) {
                let pre = e.preimages(&y).unwrap();
                assert_eq!(pre.len(), e.fiber_size());
                let distinct: HashSet<_> = pre.iter().collect();
                assert_eq!(distinct.len(), pre.len());
                for x in pre {
                    assert_eq!(e.apply(&x).unwrap(), y);
                }
            }
        }
        for n in 1..=6 {
            let e = Endo::CircleMul(n);
            for y in circle_samples(20) {
                let pre = e.preimages(&y).unwrap();
                assert_eq!(pre.len(), n as usize);
                for x in pre {
                    assert_eq!(e.apply(&x).unwrap(), y);
                }
            }
        }
    }

    #[test]
    fn pair_action_right_action_law() {
        let a = Action::ledrappier();
        let bx = a.generator_box(2);
        for x in sample_points(2) {
            for n in &bx {
                for m in &bx {
                    let lhs = a.apply(n, &a.apply(m, &x).unwrap()).unwrap();
                    let rhs = a.apply(&n.mul(m).unwrap(), &x).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn action_preimages_are_fibers() {
        let a = Action::ledrappier();
        for n in a.generator_box(2) {
            for y in sample_points(2) {
                let pre = a.preimages(&n, &y).unwrap();
                let v = n.as_vector().unwrap();
                assert_eq!(pre.len(), 1 << (v[0] + v[1]));
                for x in &pre {
                    assert_eq!(a.apply(&n, x).unwrap(), y);
                }
            }
        }
        let c = Action::circle();
        let n = LatticeElement::from_integer(2);
        assert_eq!(c.fiber_class(&n, &pt("1/3")).unwrap(), vec![pt("1/3"), pt("5/6")]);
        assert!(c.apply(&LatticeElement::from_ratio(1, 2), &pt("1/3")).is_err());
        assert_eq!(Action::Circle.apply(&LatticeElement::from_integer(6), &pt("1/4")).unwrap(), Point::Angle(rational(1, 2)));
    }

    #[test]
    fn pair_construction_checks_commutation() {
        let flip = Endo::automaton(Dictionary::from_strs(1, &["0"]).unwrap()).unwrap();
        assert!(Action::pair(Endo::Shift, flip).is_ok());
        assert!(Action::pair(Endo::Shift, Endo::ledrappier_t()).is_ok());
        assert!(Action::pair(Endo::Shift, Endo::CircleMul(2)).is_err());
    }

    #[test]
    fn star_commuting_examples() {
        let led = check_star_commuting(&Endo::Shift, &Endo::ledrappier_t(), 4).unwrap();
        assert!(led.holds && led.pairs > 0);
        let t = Endo::automaton(example_dict()).unwrap();
        let ex = check_star_commuting(&Endo::Shift, &t, 4).unwrap();
        assert!(!ex.holds);
        let wit = ex.witness.unwrap();
        assert_eq!(Endo::Shift.apply(&wit.y).unwrap(), t.apply(&wit.x).unwrap());
        let ss = check_star_commuting(&Endo::Shift, &Endo::Shift, 4).unwrap();
        let first = ss.witness.unwrap();
        assert_eq!(first.lifts, 2);
        assert_eq!((first.x.clone(), first.y.clone()), (pt("|0"), pt("|0")));
        let zero = Point::Word(Word::constant(0));
        let lifts = Endo::Shift
            .preimages(&zero)
            .unwrap()
            .iter()
            .filter(|z| Endo::Shift.apply(z).unwrap() == zero)
            .count();
        assert_eq!(lifts, 2);
    }

    #[test]
    fn relation_examples() {
        let t = Endo::automaton(example_dict()).unwrap();
        let (x, z) = (pt("0|1"), pt("|0"));
        let st = relation_compose_member(&Endo::Shift, &t, &x, &z).unwrap();
        assert!(st.member);
        assert_eq!(st.witness(), Some(&pt("|1")));
        let ts = relation_compose_member(&t, &Endo::Shift, &x, &z).unwrap();
        assert!(!ts.member);
        let ys: Vec<Point> = ts.candidates.iter().map(|(y, _)| y.clone()).collect();
        assert_eq!(ys, vec![pt("|0"), pt("1|0")]);
        for p in sample_points(2) {
            assert!(relation_compose_member(&Endo::Shift, &t, &p, &p).unwrap().member);
        }
        assert!(check_relation_commutation(&Endo::Shift, &t, 4).unwrap().is_some());
        assert!(check_relation_commutation(&Endo::Shift, &Endo::ledrappier_t(), 4).unwrap().is_none());
    }

    #[test]
    fn ledrappier_rows() {
        let rows = ledrappier_reconstruct(&w("|1"), 2, 6);
        assert_eq!(rows[1], vec![0; 6]);
        let zero = ledrappier_reconstruct(&w("|0"), 4, 5);
        assert!(zero.iter().all(|r| r.iter().all(|b| *b == 0)));
        let t = Endo::ledrappier_t();
        for p in sample_points(3) {
            let x = p.as_word().unwrap();
            let rows = ledrappier_reconstruct(x, 5, 8);
            for q in 0..4 {
                for c in 0..7 {
                    assert_eq!((rows[q][c] + rows[q + 1][c] + rows[q][c + 1]) % 2, 0);
                }
            }
            let next = t.apply(&p).unwrap();
            assert_eq!(rows[1], next.as_word().unwrap().first_bits(8));
        }
        assert!(check_ledrappier_conjugacy(4).unwrap().passed());
        let t01 = t.apply(&pt("|01")).unwrap();
        assert_eq!(ledrappier_reconstruct(&w("|01"), 2, 4)[1], t01.as_word().unwrap().first_bits(4));
    }

    #[test]
    fn dictionary_files() {
        let d = Dictionary::parse_file("width=3\n000\n100\n010\n111\n").unwrap();
        assert_eq!(d, example_dict());
        assert_eq!(Dictionary::parse_file(&d.to_file_string()).unwrap(), d);
        assert!(matches!(
            Dictionary::parse_file("width=3\n00\n"),
            Err(Error::DictionaryFormat { line: 2, .. })
        ));
        assert!(Dictionary::parse_file("000\n").is_err());
        assert!(Dictionary::parse_file("width=2\n0a\n").is_err());
        assert!(matches!(Dictionary::parse_file("width=0\n"), Err(Error::WidthOutOfRange(0))));
    }
}
