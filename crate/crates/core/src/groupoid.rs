//! The transformation groupoid `G = {(x, nm⁻¹, y) : θ_n(x) = θ_m(y)}`, the
//! polymorphism groupoid `H` of an `ℕ²` action, admissibility of actions and
//! the fiber-intersection machinery built on mini-squares.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_traits::Signed;
use rayon::prelude::*;

use crate::dynamics::Action;
use crate::error::{Error, Result};
use crate::lattice::{
    complete_mini_square, decompose, mini_square_from_pair, mini_squares_in_box, LatticeElement,
    MiniSquare,
};
use crate::report::{first_witness, sweep, Report, Sampling};
use crate::space::{CylinderSet, Point};

/// Bound on the number of synchronization states explored before a search
/// gives up with `Unknown`.
pub const STATE_CAP: usize = 1 << 16;

/// `(x, g, y)` together with `(n, m)` such that `g = nm⁻¹` and `θ_n(x) = θ_m(y)`.
#[derive(Clone)]
pub struct GroupoidElement {
    pub x: Point,
    pub g: LatticeElement,
    pub y: Point,
    pub n: LatticeElement,
    pub m: LatticeElement,
}

impl GroupoidElement {
    pub fn new(
        action: &Action,
        x: Point,
        g: LatticeElement,
        y: Point,
        n: LatticeElement,
        m: LatticeElement,
    ) -> Result<Self> {
        let e = GroupoidElement { x, g, y, n, m };
        e.validate(action)?;
        Ok(e)
    }

    /// The element `(x, nm⁻¹, y)` for `y ∈ θ_m⁻¹(θ_n(x))`.
    pub fn from_witness(action: &Action, x: Point, y: Point, n: LatticeElement, m: LatticeElement) -> Result<Self> {
        let g = n.right_div(&m)?;
        Self::new(action, x, g, y, n, m)
    }

    pub fn unit(action: &Action, x: Point) -> Self {
        let one = action.group().identity();
        GroupoidElement { y: x.clone(), x, g: one.clone(), n: one.clone(), m: one }
    }

    pub fn validate(&self, action: &Action) -> Result<()> {
        let ok = self.n.is_positive()
            && self.m.is_positive()
            && self.n.right_div(&self.m)? == self.g
            && action.apply(&self.n, &self.x)? == action.apply(&self.m, &self.y)?;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidWitness(self.to_string()))
        }
    }

    pub fn is_unit(&self) -> bool {
        self.g.is_identity() && self.x == self.y
    }

    pub fn triple(&self) -> (&Point, &LatticeElement, &Point) {
        (&self.x, &self.g, &self.y)
    }

    pub fn inverse(&self) -> GroupoidElement {
        GroupoidElement {
            x: self.y.clone(),
            g: self.g.inv(),
            y: self.x.clone(),
            n: self.m.clone(),
            m: self.n.clone(),
        }
    }
}

/// Elements are equal as triples; witnesses are not part of the identity.
impl PartialEq for GroupoidElement {
    fn eq(&self, other: &Self) -> bool {
        self.triple() == other.triple()
    }
}

impl Eq for GroupoidElement {}

impl fmt::Display for GroupoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} ; {} ; {}) via ({},{})", self.x, self.g, self.y, self.n, self.m)
    }
}

impl fmt::Debug for GroupoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `(x, g, y)(y, h, z) = (x, gh, z)` with witness `(nu, qv)` where
/// `m⁻¹p = uv⁻¹` comes from the mini-square over `(m, p)`.
pub fn compose(action: &Action, e1: &GroupoidElement, e2: &GroupoidElement) -> Result<GroupoidElement> {
    if e1.y != e2.x {
        return Err(Error::NotComposable(e1.to_string(), e2.to_string()));
    }
    let lo = e1.m.meet(&e2.n)?;
    let (u, v) = complete_mini_square(&lo.left_div(&e1.m)?, &lo.left_div(&e2.n)?)?;
    GroupoidElement::new(
        action,
        e1.x.clone(),
        e1.g.mul(&e2.g)?,
        e2.y.clone(),
        e1.n.mul(&u)?,
        e2.m.mul(&v)?,
    )
}

/// `(x, g, y)` with `θ_n(x) = θ_m(y)`, one element per `y` in the fiber.
pub fn elements_from(action: &Action, x: &Point, n: &LatticeElement, m: &LatticeElement) -> Result<Vec<GroupoidElement>> {
    let target = action.apply(n, x)?;
    action
        .preimages(m, &target)?
        .into_iter()
        .map(|y| GroupoidElement::from_witness(action, x.clone(), y, n.clone(), m.clone()))
        .collect()
}

pub enum Membership<E> {
    Yes(E),
    No,
    Unknown,
}

impl<E> Membership<E> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Membership::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Membership::No)
    }
}

impl<E: fmt::Display> fmt::Display for Membership<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Membership::Yes(e) => write!(f, "yes {e}"),
            Membership::No => f.write_str("no"),
            Membership::Unknown => f.write_str("unknown"),
        }
    }
}

enum Sync {
    Found(LatticeElement),
    Never,
    Unknown,
}

/// Smallest `c` (breadth first over `steps`) with `θ_c(a) = θ_c(b)`.
///
/// Eventually periodic points have finitely many images, so the pair states
/// form a finite set; when every successor of an explored state has itself
/// been explored the search is exhaustive and no synchronization exists.
fn synchronize(action: &Action, a: Point, b: Point, steps: &[LatticeElement], bound: u32) -> Result<Sync> {
    let mut seen: HashSet<(Point, Point)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((a.clone(), b.clone()));
    queue.push_back((a, b, action.group().identity()));
    let mut truncated = false;
    while let Some((p, q, c)) = queue.pop_front() {
        if p == q {
            return Ok(Sync::Found(c));
        }
        for s in steps {
            let state = (action.apply(s, &p)?, action.apply(s, &q)?);
            if seen.contains(&state) {
                continue;
            }
            let next = c.mul(s)?;
            if action.exponents(&next)?.iter().any(|e| *e > bound as i64) || seen.len() >= STATE_CAP {
                truncated = true;
                continue;
            }
            seen.insert(state.clone());
            queue.push_back((state.0, state.1, next));
        }
    }
    Ok(if truncated { Sync::Unknown } else { Sync::Never })
}

/// Decides `(x, g, y) ∈ G`, searching witnesses `n = (g∨1)c`, `m = (g⁻¹∨1)c`.
pub fn membership(
    action: &Action,
    x: &Point,
    g: &LatticeElement,
    y: &Point,
    bound: u32,
) -> Result<Membership<GroupoidElement>> {
    let d = decompose(g)?;
    let (n0, m0) = (d.numerator, d.denominator);
    let (a, b) = (action.apply(&n0, x)?, action.apply(&m0, y)?);
    let found = if let Action::Circle = action {
        // c(a - b) ∈ ℤ exactly when the denominator of a - b divides c.
        let diff = *a.as_angle()? - *b.as_angle()?;
        let c = diff.abs().denom().lcm(&1);
        let c = u64::try_from(c).map_err(|_| Error::Precondition("denominator overflow".into()))?;
        Sync::Found(LatticeElement::from_integer(c))
    } else {
        synchronize(action, a, b, &action.generators(), bound)?
    };
    Ok(match found {
        Sync::Found(c) => Membership::Yes(GroupoidElement::new(
            action,
            x.clone(),
            g.clone(),
            y.clone(),
            n0.mul(&c)?,
            m0.mul(&c)?,
        )?),
        Sync::Never => Membership::No,
        Sync::Unknown => Membership::Unknown,
    })
}

/// `Σ(n, m, A, B) = {(x, nm⁻¹, y) : x ∈ A, y ∈ B, θ_n(x) = θ_m(y)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicBisection {
    pub n: LatticeElement,
    pub m: LatticeElement,
    pub a: CylinderSet,
    pub b: CylinderSet,
}

impl BasicBisection {
    pub fn contains(&self, action: &Action, e: &GroupoidElement) -> Result<bool> {
        Ok(self.a.contains(&e.x)?
            && self.b.contains(&e.y)?
            && e.g == self.n.right_div(&self.m)?
            && action.apply(&self.n, &e.x)? == action.apply(&self.m, &e.y)?)
    }
}

/// All `z` with `θ_s(z) = x` and `θ_t(z) = y`.
pub fn common_lifts(action: &Action, sq: &MiniSquare, x: &Point, y: &Point) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for z in action.preimages(&sq.s, x)? {
        if action.apply(&sq.t, &z)? == *y {
            out.push(z);
        }
    }
    Ok(out)
}

/// First instance `(square, x, y)` with `θ_u(x) = θ_v(y)` whose number of
/// common lifts is not one, with `y` running over the whole `θ_v`-fiber.
pub fn admissibility_witness(action: &Action, squares: &[MiniSquare], xs: &[Point]) -> Result<Option<String>> {
    let items: Vec<(usize, usize)> =
        (0..squares.len()).flat_map(|i| (0..xs.len()).map(move |j| (i, j))).collect();
    first_witness(&items, |&(i, j)| {
        let (sq, x) = (&squares[i], &xs[j]);
        for y in action.preimages(&sq.v, &action.apply(&sq.u, x)?)? {
            let lifts = common_lifts(action, sq, x, &y)?;
            if lifts.len() != 1 {
                return Ok(Some(format!("{sq} x={x} y={y}: {} common lifts", lifts.len())));
            }
        }
        Ok(None)
    })
}

/// Every mini-square from the generator box admits unique common lifts.
pub fn check_admissible_action(action: &Action, cfg: Sampling) -> Result<Report> {
    let squares = mini_squares_in_box(action.group(), cfg.bound)?;
    let xs = action.samples(cfg.depth);
    let witness = admissibility_witness(action, &squares, &xs)?;
    Ok(Report::from_witness("admissible action", squares.len() * xs.len(), witness))
}

pub fn brute_force_intersection(
    action: &Action,
    n: &LatticeElement,
    m: &LatticeElement,
    p: &Point,
    q: &Point,
) -> Result<Vec<Point>> {
    let other: HashSet<Point> = action.preimages(n, q)?.into_iter().collect();
    Ok(action.preimages(m, p)?.into_iter().filter(|z| other.contains(z)).collect())
}

/// `θ_m⁻¹(p) ∩ θ_n⁻¹(q)`, either empty or the `θ_{m∧n}`-fiber over the
/// unique common lift `w` of `(p, q)`.
pub fn preimage_intersection(
    action: &Action,
    n: &LatticeElement,
    m: &LatticeElement,
    p: &Point,
    q: &Point,
) -> Result<Vec<Point>> {
    let sq = mini_square_from_pair(m, n)?;
    if action.apply(&sq.u, p)? != action.apply(&sq.v, q)? {
        return Ok(vec![]);
    }
    let lifts = common_lifts(action, &sq, p, q)?;
    if lifts.len() != 1 {
        return Err(Error::AdmissibilityViolated(format!("{sq} at ({p}, {q}): {} lifts", lifts.len())));
    }
    action.preimages(&m.meet(n)?, &lifts[0])
}

/// The formula agrees with brute force for `m, n` in the box, `p` sampled
/// and `q` over every `θ_n`-image of `θ_m⁻¹(p)` together with
/// `MISS_SAMPLES` fixed sample points.
pub const MISS_SAMPLES: usize = 8;

pub fn check_preimage_intersection(action: &Action, cfg: Sampling) -> Result<Report> {
    let bx = action.generator_box(cfg.bound);
    let xs = action.samples(cfg.depth);
    let mut items = Vec::new();
    for n in &bx {
        for m in &bx {
            for p in &xs {
                items.push((n.clone(), m.clone(), p.clone()));
            }
        }
    }
    let counted = std::sync::atomic::AtomicUsize::new(0);
    let report = sweep("preimage intersection", &items, |(n, m, p)| {
        let mut qs: Vec<Point> = (0..MISS_SAMPLES).map(|i| xs[(i * 37) % xs.len()].clone()).collect();
        for z in action.preimages(m, p)? {
            qs.push(action.apply(n, &z)?);
        }
        qs.sort();
        qs.dedup();
        counted.fetch_add(qs.len(), std::sync::atomic::Ordering::Relaxed);
        for q in &qs {
            let formula = preimage_intersection(action, n, m, p, q)?;
            let brute = brute_force_intersection(action, n, m, p, q)?;
            if formula != brute {
                return Ok(Some(format!(
                    "n={n} m={m} p={p} q={q}: formula {} points, brute force {}",
                    formula.len(),
                    brute.len()
                )));
            }
        }
        Ok(None)
    })?;
    Ok(Report { samples: counted.into_inner().max(report.samples), ..report })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassProduct {
    pub class_size: usize,
    pub left: usize,
    pub right: usize,
    pub bijective: bool,
}

/// `φ(z) = (θ_s(z), θ_t(z))` from `C^{s∨t}_{z̄}` onto `C^u_{x̄} × C^v_{ȳ}`.
pub fn class_product_bijection(action: &Action, sq: &MiniSquare, zbar: &Point) -> Result<ClassProduct> {
    let class = action.fiber_class(&sq.top()?, zbar)?;
    let xbar = action.apply(&sq.s, zbar)?;
    let ybar = action.apply(&sq.t, zbar)?;
    let left = action.fiber_class(&sq.u, &xbar)?;
    let right = action.fiber_class(&sq.v, &ybar)?;
    let mut image = class
        .iter()
        .map(|z| Ok((action.apply(&sq.s, z)?, action.apply(&sq.t, z)?)))
        .collect::<Result<Vec<_>>>()?;
    image.sort();
    let injective = image.windows(2).all(|w| w[0] != w[1]);
    let mut product: Vec<(Point, Point)> =
        left.iter().flat_map(|a| right.iter().map(move |b| (a.clone(), b.clone()))).collect();
    product.sort();
    Ok(ClassProduct {
        class_size: class.len(),
        left: left.len(),
        right: right.len(),
        bijective: injective && image == product,
    })
}

pub fn check_class_products(action: &Action, cfg: Sampling) -> Result<Report> {
    let squares = mini_squares_in_box(action.group(), cfg.bound)?;
    let zs = action.samples(cfg.depth);
    let items: Vec<(usize, usize)> =
        (0..squares.len()).flat_map(|i| (0..zs.len()).map(move |j| (i, j))).collect();
    sweep("class product bijection", &items, |&(i, j)| {
        let c = class_product_bijection(action, &squares[i], &zs[j])?;
        Ok((!c.bijective || c.class_size != c.left * c.right)
            .then(|| format!("{} at {}: {c:?}", squares[i], zs[j])))
    })
}

pub const CHAIN_CAP: usize = 4096;

/// Sampled composable chains `(e1, e2, e3)`, at most `CHAIN_CAP`: `e1` from
/// evenly strided (sample, generator pair) choices, each continuation the
/// last fiber point over the next generator pair in a fixed rotation.
pub fn sample_chains(action: &Action, cfg: Sampling) -> Result<Vec<[GroupoidElement; 3]>> {
    let bx = action.generator_box(cfg.bound);
    let pairs: Vec<(LatticeElement, LatticeElement)> =
        bx.iter().flat_map(|n| bx.iter().map(move |m| (n.clone(), m.clone()))).collect();
    let xs = action.samples(cfg.depth);
    let all = xs.len() * pairs.len();
    let stride = all.div_ceil(CHAIN_CAP);
    let items: Vec<(usize, usize)> = (0..all).step_by(stride).map(|j| (j / pairs.len(), j % pairs.len())).collect();
    let chains = items
        .par_iter()
        .map(|&(i, k)| {
            let mut chain = Vec::with_capacity(3);
            let mut x = xs[i].clone();
            for step in 0..3 {
                let (n, m) = &pairs[(k + 5 * step) % pairs.len()];
                let e = elements_from(action, &x, n, m)?.into_iter().last().expect("non-empty fiber");
                x = e.y.clone();
                chain.push(e);
            }
            let [a, b, c]: [GroupoidElement; 3] = chain.try_into().expect("three");
            Ok([a, b, c])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chains)
}

/// Composition, recomposition of witnesses, associativity, units and
/// inverses on sampled chains.
pub fn check_groupoid_axioms(action: &Action, cfg: Sampling) -> Result<Report> {
    let chains = sample_chains(action, cfg)?;
    sweep("groupoid axioms", &chains, |[a, b, c]| {
        let ab = compose(action, a, b)?;
        if ab.n.right_div(&ab.m)? != a.g.mul(&b.g)? {
            return Ok(Some(format!("witness of {a} * {b} does not recompose")));
        }
        let left = compose(action, &ab, c)?;
        let right = compose(action, a, &compose(action, b, c)?)?;
        if left != right {
            return Ok(Some(format!("associativity fails on {a}, {b}, {c}")));
        }
        for e in [a, b, c] {
            let inv = e.inverse();
            inv.validate(action)?;
            if inv.inverse() != *e {
                return Ok(Some(format!("inverse not involutive at {e}")));
            }
            let (l, r) = (compose(action, e, &inv)?, compose(action, &inv, e)?);
            if !l.is_unit() || !r.is_unit() {
                return Ok(Some(format!("{e} composed with its inverse is not a unit")));
            }
            let ux = GroupoidElement::unit(action, e.x.clone());
            let uy = GroupoidElement::unit(action, e.y.clone());
            if compose(action, &ux, e)? != *e || compose(action, e, &uy)? != *e {
                return Ok(Some(format!("units do not act trivially on {e}")));
            }
        }
        Ok(None)
    })
}

/// `(x, k, y)` with `(n, m) ∈ ℕ²`, `k = n - m` and `SⁿTᵐ(x) = SᵐTⁿ(y)`.
#[derive(Clone)]
pub struct PolyElement {
    pub x: Point,
    pub k: i64,
    pub y: Point,
    pub n: i64,
    pub m: i64,
}

fn pair_element(a: i64, b: i64) -> LatticeElement {
    LatticeElement::vector(&[a, b])
}

fn require_pair(action: &Action) -> Result<()> {
    match action {
        Action::Pair(..) => Ok(()),
        _ => Err(Error::Unsupported("the polymorphism groupoid needs an N^2 action".into())),
    }
}

impl PolyElement {
    pub fn new(action: &Action, x: Point, k: i64, y: Point, n: i64, m: i64) -> Result<Self> {
        let e = PolyElement { x, k, y, n, m };
        e.validate(action)?;
        Ok(e)
    }

    pub fn validate(&self, action: &Action) -> Result<()> {
        require_pair(action)?;
        let ok = self.n >= 0
            && self.m >= 0
            && self.k == self.n - self.m
            && action.apply(&pair_element(self.n, self.m), &self.x)?
                == action.apply(&pair_element(self.m, self.n), &self.y)?;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidWitness(self.to_string()))
        }
    }

    pub fn inverse(&self) -> PolyElement {
        PolyElement { x: self.y.clone(), k: -self.k, y: self.x.clone(), n: self.m, m: self.n }
    }
}

impl PartialEq for PolyElement {
    fn eq(&self, other: &Self) -> bool {
        (&self.x, self.k, &self.y) == (&other.x, other.k, &other.y)
    }
}

impl fmt::Display for PolyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} ; {} ; {}) via ({},{})", self.x, self.k, self.y, self.n, self.m)
    }
}

impl fmt::Debug for PolyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn poly_membership(action: &Action, x: &Point, k: i64, y: &Point, bound: u32) -> Result<Membership<PolyElement>> {
    require_pair(action)?;
    let (n0, m0) = (k.max(0), (-k).max(0));
    let a = action.apply(&pair_element(n0, m0), x)?;
    let b = action.apply(&pair_element(m0, n0), y)?;
    Ok(match synchronize(action, a, b, &[pair_element(1, 1)], bound)? {
        Sync::Found(c) => {
            let c = c.as_vector().expect("vector")[0];
            Membership::Yes(PolyElement::new(action, x.clone(), k, y.clone(), n0 + c, m0 + c)?)
        }
        Sync::Never => Membership::No,
        Sync::Unknown => Membership::Unknown,
    })
}

pub fn poly_compose(action: &Action, e1: &PolyElement, e2: &PolyElement) -> Result<PolyElement> {
    if e1.y != e2.x {
        return Err(Error::NotComposable(e1.to_string(), e2.to_string()));
    }
    PolyElement::new(action, e1.x.clone(), e1.k + e2.k, e2.y.clone(), e1.n + e2.n, e1.m + e2.m)
}

/// `d(x, (a, b), y) = a + b`.
pub fn d(e: &GroupoidElement) -> Result<i64> {
    let v = e.g.as_vector().filter(|v| v.len() == 2).ok_or(Error::Unsupported("d needs G = Z^2".into()))?;
    Ok(v[0] + v[1])
}

/// `φ(x, k, y) = (x, (k, -k), y)`.
pub fn phi(action: &Action, h: &PolyElement) -> Result<GroupoidElement> {
    GroupoidElement::new(
        action,
        h.x.clone(),
        pair_element(h.k, -h.k),
        h.y.clone(),
        pair_element(h.n, h.m),
        pair_element(h.m, h.n),
    )
}

/// The `H`-element over a kernel element of `d`, by bounded witness search.
pub fn phi_preimage(action: &Action, e: &GroupoidElement, bound: u32) -> Result<Membership<PolyElement>> {
    if d(e)? != 0 {
        return Err(Error::Precondition(format!("{e} is not in the kernel of d")));
    }
    poly_membership(action, &e.x, e.g.as_vector().expect("vector")[0], &e.y, bound)
}

/// `H` on sampled elements: `d` additive on composable chains, `φ` valid
/// with values in `ker d`, `H`-composition valid, and every sampled kernel
/// element of `G` lifted back to `H`.
pub fn check_poly_groupoid(action: &Action, cfg: Sampling) -> Result<Vec<Report>> {
    require_pair(action)?;
    let chains = sample_chains(action, cfg)?;
    let additive = sweep("d additive", &chains, |[a, b, _]| {
        let ab = compose(action, a, b)?;
        Ok((d(&ab)? != d(a)? + d(b)?).then(|| format!("d({a} * {b}) != d({a}) + d({b})")))
    })?;
    let xs = action.samples(cfg.depth);
    let bound = cfg.bound as i64;
    let mut hs = Vec::new();
    for x in &xs {
        for k in -bound..=bound {
            let (n, m) = (k.max(0), (-k).max(0));
            let target = action.apply(&pair_element(n, m), x)?;
            if let Some(y) = action.preimages(&pair_element(m, n), &target)?.into_iter().last() {
                hs.push(PolyElement::new(action, x.clone(), k, y, n, m)?);
            }
        }
    }
    let phi_report = sweep("phi lands in ker d", &hs, |h| {
        let e = phi(action, h)?;
        if d(&e)? != 0 {
            return Ok(Some(format!("d(phi({h})) = {}", d(&e)?)));
        }
        Ok(h.inverse().validate(action).is_err().then(|| format!("inverse of {h} invalid")))
    })?;
    let compose_report = sweep("H composition", &hs, |h| {
        let inv = h.inverse();
        let unit = poly_compose(action, h, &inv)?;
        Ok((unit.k != 0 || unit.x != unit.y).then(|| format!("{h} times its inverse is {unit}")))
    })?;
    let mut kernel: Vec<GroupoidElement> = chains
        .iter()
        .flat_map(|c| c.iter().cloned())
        .filter(|e| d(e).is_ok_and(|v| v == 0))
        .collect();
    for h in &hs {
        kernel.push(phi(action, h)?);
    }
    let backfill = sweep("phi preimage", &kernel, |e| {
        Ok(match phi_preimage(action, e, 2 * cfg.bound + 4)? {
            Membership::Yes(h) if phi(action, &h)? == *e => None,
            Membership::Yes(h) => Some(format!("phi({h}) != {e}")),
            _ => Some(format!("no H-witness found for {e}")),
        })
    })?;
    Ok(vec![additive, phi_report, compose_report, backfill])
}
