//! Operators on `C(X)`: `α_n`, the transfer operators `L_n`, the
//! conditional expectations `E_n = α_n L_n`, the interaction group
//! `V_g = L_n α_m` and the polymorphism operators `W_k`, as exact pointwise
//! evaluators with table materialization on the full shift.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::cocycle::{kernel_mismatch, Cocycle};
use crate::dynamics::Action;
use crate::error::{Error, Result};
use crate::lattice::{decompose, LatticeElement, LatticeGroup};
use crate::report::{first_witness, Report, Sampling};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::space::{
    all_words, bits_to_index, format_bits, parse_bits, CylinderFunction, Point, Word,
    DEFAULT_DEPTH_CAP,
};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Base {
    Constant(Scalar),
    Cylinder(CylinderFunction),
    /// `Σ c_i q^i` at the angle `q`.
    Polynomial(Vec<Rational>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ObservableExpr {
    Base(Base),
    Alpha(LatticeElement, Box<ObservableExpr>),
    Transfer(LatticeElement, Box<ObservableExpr>),
    Expectation(LatticeElement, Box<ObservableExpr>),
    Interaction(LatticeElement, Box<ObservableExpr>),
    PolyW(i64, Box<ObservableExpr>),
    Sum(Box<ObservableExpr>, Box<ObservableExpr>),
    Product(Box<ObservableExpr>, Box<ObservableExpr>),
    Scale(Scalar, Box<ObservableExpr>),
}

impl ObservableExpr {
    pub fn constant(c: Scalar) -> Self {
        ObservableExpr::Base(Base::Constant(c))
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn indicator(word: &[u8]) -> Result<Self> {
        Ok(ObservableExpr::Base(Base::Cylinder(CylinderFunction::indicator(word)?)))
    }

    pub fn cylinder(f: CylinderFunction) -> Self {
        ObservableExpr::Base(Base::Cylinder(f))
    }

    pub fn polynomial(coeffs: Vec<Rational>) -> Self {
        ObservableExpr::Base(Base::Polynomial(coeffs))
    }

    /// `x ↦ x` on the circle.
    pub fn angle() -> Self {
        Self::polynomial(vec![Rational::zero(), Rational::one()])
    }

    pub fn alpha(n: LatticeElement, f: ObservableExpr) -> Self {
        ObservableExpr::Alpha(n, Box::new(f))
    }

    pub fn transfer(n: LatticeElement, f: ObservableExpr) -> Self {
        ObservableExpr::Transfer(n, Box::new(f))
    }

    pub fn expectation(n: LatticeElement, f: ObservableExpr) -> Self {
        ObservableExpr::Expectation(n, Box::new(f))
    }

    pub fn interaction(g: LatticeElement, f: ObservableExpr) -> Self {
        ObservableExpr::Interaction(g, Box::new(f))
    }

    /// `L_n α_m f`, the interaction operator for the factorization `n⁻¹m`.
    pub fn interaction_via(n: LatticeElement, m: LatticeElement, f: ObservableExpr) -> Self {
        Self::transfer(n, Self::alpha(m, f))
    }

    pub fn poly_w(k: i64, f: ObservableExpr) -> Self {
        ObservableExpr::PolyW(k, Box::new(f))
    }

    pub fn add(a: ObservableExpr, b: ObservableExpr) -> Self {
        ObservableExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn mul(a: ObservableExpr, b: ObservableExpr) -> Self {
        ObservableExpr::Product(Box::new(a), Box::new(b))
    }

    pub fn scale(c: Scalar, f: ObservableExpr) -> Self {
        ObservableExpr::Scale(c, Box::new(f))
    }

    pub fn as_cylinder(&self) -> Option<CylinderFunction> {
        match self {
            ObservableExpr::Base(Base::Constant(c)) => Some(CylinderFunction::constant(c.clone())),
            ObservableExpr::Base(Base::Cylinder(f)) => Some(f.clone()),
            _ => None,
        }
    }
}

fn poly_w_factors(action: &Action, k: i64) -> Result<(LatticeElement, LatticeElement)> {
    if !matches!(action, Action::Pair(..)) {
        return Err(Error::Unsupported("W_k needs a pair action".into()));
    }
    let (a, b) = if k >= 0 { ([0, k], [k, 0]) } else { ([-k, 0], [0, -k]) };
    Ok((LatticeElement::vector(&a), LatticeElement::vector(&b)))
}

fn transfer_at(omega: &Cocycle, n: &LatticeElement, f: &ObservableExpr, y: &Point) -> Result<Scalar> {
    let mut total = Scalar::zero();
    for x in omega.action().preimages(n, y)? {
        let w = omega.eval(n, &x)?;
        if !w.is_zero() {
            total = total + eval_expr(f, omega, &x)?.scale(&w);
        }
    }
    Ok(total)
}

fn interaction_at(
    omega: &Cocycle,
    n: &LatticeElement,
    m: &LatticeElement,
    f: &ObservableExpr,
    y: &Point,
) -> Result<Scalar> {
    let action = omega.action();
    let mut total = Scalar::zero();
    for x in action.preimages(n, y)? {
        let w = omega.eval(n, &x)?;
        if !w.is_zero() {
            total = total + eval_expr(f, omega, &action.apply(m, &x)?)?.scale(&w);
        }
    }
    Ok(total)
}

/// Exact value of `e` at `x`.
pub fn eval_expr(e: &ObservableExpr, omega: &Cocycle, x: &Point) -> Result<Scalar> {
    let action = omega.action();
    match e {
        ObservableExpr::Base(Base::Constant(c)) => Ok(c.clone()),
        ObservableExpr::Base(Base::Cylinder(f)) => f.eval(x),
        ObservableExpr::Base(Base::Polynomial(cs)) => {
            let q = x.as_angle()?;
            let v = cs.iter().rev().fold(Rational::zero(), |acc, c| acc * q + c);
            Ok(Scalar::from_rational(v))
        }
        ObservableExpr::Alpha(n, f) => eval_expr(f, omega, &action.apply(n, x)?),
        ObservableExpr::Transfer(n, f) => transfer_at(omega, n, f, x),
        ObservableExpr::Expectation(n, f) => transfer_at(omega, n, f, &action.apply(n, x)?),
        ObservableExpr::Interaction(g, f) => {
            let d = decompose(g)?;
            interaction_at(omega, &d.inverse_part, &d.positive_part, f, x)
        }
        ObservableExpr::PolyW(k, f) => {
            let (n, m) = poly_w_factors(action, *k)?;
            interaction_at(omega, &n, &m, f, x)
        }
        ObservableExpr::Sum(a, b) => Ok(eval_expr(a, omega, x)? + eval_expr(b, omega, x)?),
        ObservableExpr::Product(a, b) => eval_expr(a, omega, x)?.try_mul(&eval_expr(b, omega, x)?),
        ObservableExpr::Scale(c, f) => c.try_mul(&eval_expr(f, omega, x)?),
    }
}

fn locality(omega: &Cocycle, n: &LatticeElement) -> Result<usize> {
    omega.locality(n).ok_or(Error::UnboundedDepth)
}

fn alpha_bound(action: &Action, n: &LatticeElement, d: usize) -> Result<usize> {
    Ok(if d == 0 { 0 } else { d + action.growth(n)? })
}

fn transfer_bound(omega: &Cocycle, n: &LatticeElement, d: usize) -> Result<usize> {
    Ok(d.max(locality(omega, n)?).saturating_sub(omega.action().growth(n)?))
}

/// Number of leading coordinates the value of `e` depends on.
pub fn depth_bound(e: &ObservableExpr, omega: &Cocycle) -> Result<usize> {
    let action = omega.action();
    match e {
        ObservableExpr::Base(Base::Constant(_)) => Ok(0),
        ObservableExpr::Base(Base::Cylinder(f)) => Ok(f.depth()),
        ObservableExpr::Base(Base::Polynomial(_)) => Err(Error::UnboundedDepth),
        ObservableExpr::Alpha(n, f) => alpha_bound(action, n, depth_bound(f, omega)?),
        ObservableExpr::Transfer(n, f) => transfer_bound(omega, n, depth_bound(f, omega)?),
        ObservableExpr::Expectation(n, f) => {
            let l = transfer_bound(omega, n, depth_bound(f, omega)?)?;
            alpha_bound(action, n, l)
        }
        ObservableExpr::Interaction(g, f) => {
            let d = decompose(g)?;
            let inner = alpha_bound(action, &d.positive_part, depth_bound(f, omega)?)?;
            transfer_bound(omega, &d.inverse_part, inner)
        }
        ObservableExpr::PolyW(k, f) => {
            let (n, m) = poly_w_factors(action, *k)?;
            let inner = alpha_bound(action, &m, depth_bound(f, omega)?)?;
            transfer_bound(omega, &n, inner)
        }
        ObservableExpr::Sum(a, b) | ObservableExpr::Product(a, b) => {
            Ok(depth_bound(a, omega)?.max(depth_bound(b, omega)?))
        }
        ObservableExpr::Scale(_, f) => depth_bound(f, omega),
    }
}

/// Tabulates `e` on the cylinders of the given depth (the computed bound by
/// default), evaluating each entry under the tails `0^∞` and `1^∞` and
/// requiring the two values to agree.
pub fn materialize(e: &ObservableExpr, omega: &Cocycle, depth: Option<usize>) -> Result<CylinderFunction> {
    if !omega.action().is_word_action() {
        return Err(Error::Unsupported("tables exist only on the full shift".into()));
    }
    let depth = match depth {
        Some(d) => d,
        None => depth_bound(e, omega)?,
    };
    if depth > DEFAULT_DEPTH_CAP {
        return Err(Error::DepthCapExceeded { depth, cap: DEFAULT_DEPTH_CAP });
    }
    let table = all_words(depth)
        .into_par_iter()
        .map(|w| {
            let v0 = eval_expr(e, omega, &Point::Word(Word::new(w.clone(), vec![0])?))?;
            let v1 = eval_expr(e, omega, &Point::Word(Word::new(w.clone(), vec![1])?))?;
            if v0 != v1 {
                return Err(Error::TailDependence(format_bits(&w)));
            }
            Ok(v0)
        })
        .collect::<Result<Vec<_>>>()?;
    CylinderFunction::from_table(depth, table)
}

/// Constants plus indicators of all cylinders of depth 1 and 2 on the
/// shift; `1, x, x²` on the circle.
pub fn basis(action: &Action) -> Vec<ObservableExpr> {
    let mut out = vec![ObservableExpr::one()];
    if action.is_word_action() {
        for k in 1..=2 {
            for w in all_words(k) {
                out.push(ObservableExpr::indicator(&w).expect("bits"));
            }
        }
    } else {
        out.push(ObservableExpr::angle());
        out.push(ObservableExpr::polynomial(vec![Rational::zero(), Rational::zero(), Rational::one()]));
    }
    out
}

/// Operator calculus over one cocycle: on the shift every result is
/// materialized into a reduced table (memoized), on the circle results stay
/// symbolic and are compared pointwise on the sample rationals.
pub struct Operators<'a> {
    omega: &'a Cocycle,
    points: Vec<Point>,
    memo: Mutex<HashMap<ObservableExpr, ObservableExpr>>,
}

impl<'a> Operators<'a> {
    pub fn new(omega: &'a Cocycle, cfg: Sampling) -> Self {
        Operators { omega, points: omega.action().samples(cfg.depth), memo: Mutex::new(HashMap::new()) }
    }

    pub fn omega(&self) -> &Cocycle {
        self.omega
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn realize(&self, e: ObservableExpr) -> Result<ObservableExpr> {
        if !self.omega.action().is_word_action() || matches!(e, ObservableExpr::Base(_)) {
            return Ok(e);
        }
        if let Some(hit) = self.memo.lock().unwrap().get(&e) {
            return Ok(hit.clone());
        }
        let table = materialize(&e, self.omega, None)?.reduced();
        let out = ObservableExpr::cylinder(table);
        self.memo.lock().unwrap().insert(e, out.clone());
        Ok(out)
    }

    pub fn alpha(&self, n: &LatticeElement, f: &ObservableExpr) -> Result<ObservableExpr> {
        self.realize(ObservableExpr::alpha(n.clone(), f.clone()))
    }

    pub fn transfer(&self, n: &LatticeElement, f: &ObservableExpr) -> Result<ObservableExpr> {
        self.realize(ObservableExpr::transfer(n.clone(), f.clone()))
    }

    pub fn expectation(&self, n: &LatticeElement, f: &ObservableExpr) -> Result<ObservableExpr> {
        self.realize(ObservableExpr::expectation(n.clone(), f.clone()))
    }

    pub fn interaction(&self, g: &LatticeElement, f: &ObservableExpr) -> Result<ObservableExpr> {
        self.realize(ObservableExpr::interaction(g.clone(), f.clone()))
    }

    pub fn interaction_via(
        &self,
        n: &LatticeElement,
        m: &LatticeElement,
        f: &ObservableExpr,
    ) -> Result<ObservableExpr> {
        self.realize(ObservableExpr::interaction_via(n.clone(), m.clone(), f.clone()))
    }

    pub fn poly_w(&self, k: i64, f: &ObservableExpr) -> Result<ObservableExpr> {
        self.realize(ObservableExpr::poly_w(k, f.clone()))
    }

    pub fn mul(&self, a: &ObservableExpr, b: &ObservableExpr) -> Result<ObservableExpr> {
        if let (Some(fa), Some(fb)) = (a.as_cylinder(), b.as_cylinder()) {
            return Ok(ObservableExpr::cylinder(fa.mul(&fb)?.reduced()));
        }
        Ok(ObservableExpr::mul(a.clone(), b.clone()))
    }

    pub fn eval(&self, e: &ObservableExpr, x: &Point) -> Result<Scalar> {
        eval_expr(e, self.omega, x)
    }

    /// A point where `a` and `b` differ, if any.
    pub fn differ(&self, a: &ObservableExpr, b: &ObservableExpr) -> Result<Option<Point>> {
        if let (Some(fa), Some(fb)) = (a.as_cylinder(), b.as_cylinder()) {
            let d = fa.depth().max(fb.depth());
            let (ta, tb) = (fa.refine(d)?, fb.refine(d)?);
            let idx = ta.table().iter().zip(tb.table()).position(|(u, v)| u != v);
            return Ok(match idx {
                Some(i) => Some(Point::Word(Word::new(all_words(d)[i].clone(), vec![0])?)),
                None => None,
            });
        }
        for p in &self.points {
            if self.eval(a, p)? != self.eval(b, p)? {
                return Ok(Some(p.clone()));
            }
        }
        Ok(None)
    }
}

fn mismatch(label: String, at: Option<Point>) -> Option<String> {
    at.map(|p| format!("{label} differ at {p}"))
}

fn run<T: Sync>(
    check: &str,
    items: &[T],
    f: impl Fn(&T) -> Result<Option<String>> + Sync + Send,
) -> Result<Report> {
    crate::report::sweep(check, items, f)
}

/// `L_n(f α_n(g)) = L_n(f) g`.
pub fn check_transfer_axiom(omega: &Cocycle, cfg: Sampling) -> Result<Report> {
    let ops = Operators::new(omega, cfg);
    let bs = basis(omega.action());
    let k = bs.len();
    let items: Vec<(LatticeElement, usize, usize)> = omega
        .action()
        .generator_box(cfg.bound)
        .into_iter()
        .flat_map(|n| (0..k * k).map(move |ij| (n.clone(), ij / k, ij % k)))
        .collect();
    run("transfer axiom", &items, |(n, i, j)| {
        let (f, g) = (&bs[*i], &bs[*j]);
        let lhs = ops.transfer(n, &ops.mul(f, &ops.alpha(n, g)?)?)?;
        let rhs = ops.mul(&ops.transfer(n, f)?, g)?;
        Ok(mismatch(format!("n={n}, f={f}, g={g}:"), ops.differ(&lhs, &rhs)?))
    })
}

/// `L_{nm} = L_m L_n`.
pub fn check_transfer_antimult(omega: &Cocycle, cfg: Sampling) -> Result<Report> {
    let ops = Operators::new(omega, cfg);
    let bs = basis(omega.action());
    let bx = omega.action().generator_box(cfg.bound);
    let (nb, k) = (bx.len(), bs.len());
    let items: Vec<(usize, usize, usize)> = (0..nb)
        .flat_map(|a| (0..nb).flat_map(move |b| (0..k).map(move |c| (a, b, c))))
        .collect();
    run("transfer antimultiplicative", &items, |&(a, b, c)| {
        let (n, m, f) = (&bx[a], &bx[b], &bs[c]);
        let lhs = ops.transfer(&n.mul(m)?, f)?;
        let rhs = ops.transfer(m, &ops.transfer(n, f)?)?;
        Ok(mismatch(format!("n={n}, m={m}, f={f}:"), ops.differ(&lhs, &rhs)?))
    })
}

/// `L_n(1) = 1`, `L_n` positive on the basis, `L_n α_n = id`, `E_n`
/// idempotent and the identity on the range of `α_n`.
pub fn check_transfer_basics(omega: &Cocycle, cfg: Sampling) -> Result<Vec<Report>> {
    let ops = Operators::new(omega, cfg);
    let bs = basis(omega.action());
    let bx = omega.action().generator_box(cfg.bound);
    let items: Vec<(usize, usize)> =
        (0..bx.len()).flat_map(|a| (0..bs.len()).map(move |c| (a, c))).collect();
    let one = ObservableExpr::one();
    let unital = run("transfer unital", &bx, |n| {
        Ok(mismatch(format!("L_{n}(1) and 1"), ops.differ(&ops.transfer(n, &one)?, &one)?))
    })?;
    let positive = run("transfer positive", &items, |&(a, c)| {
        let lf = ops.transfer(&bx[a], &bs[c])?;
        for p in ops.points() {
            let v = ops.eval(&lf, p)?;
            if v.as_rational().is_none_or(|q| q < Rational::zero()) {
                return Ok(Some(format!("L_{}({}) at {p} is {v}", bx[a], bs[c])));
            }
        }
        Ok(None)
    })?;
    let left_inverse = run("transfer left inverse", &items, |&(a, c)| {
        let (n, f) = (&bx[a], &bs[c]);
        Ok(mismatch(format!("L_{n} α_{n} f and f for f={f}:"), ops.differ(&ops.transfer(n, &ops.alpha(n, f)?)?, f)?))
    })?;
    let expectation = run("expectation projection", &items, |&(a, c)| {
        let (n, f) = (&bx[a], &bs[c]);
        let e = ops.expectation(n, f)?;
        if let Some(p) = ops.differ(&ops.expectation(n, &e)?, &e)? {
            return Ok(Some(format!("E_{n} not idempotent on {f} at {p}")));
        }
        let af = ops.alpha(n, f)?;
        Ok(mismatch(format!("E_{n} α_{n} f and α_{n} f for f={f}:"), ops.differ(&ops.expectation(n, &af)?, &af)?))
    })?;
    Ok(vec![unital, positive, left_inverse, expectation])
}

fn first_difference(a: &Word, b: &Word) -> usize {
    let horizon = 2 * (a.prefix().len() + b.prefix().len()) + 2 * a.cycle().len() * b.cycle().len() + 2;
    (0..horizon).find(|i| a.coordinate(*i) != b.coordinate(*i)).unwrap_or(horizon)
}

/// Both sides of `E_n E_m = E_m E_n`: the kernel identity over sampled
/// `(x, z)`, and the operator identity over the basis plus, at a kernel
/// witness, an indicator separating `x` from the rest of the relevant
/// fibers. The last report checks the two verdicts agree.
pub fn check_e_commutation(
    omega: &Cocycle,
    n: &LatticeElement,
    m: &LatticeElement,
    cfg: Sampling,
) -> Result<Vec<Report>> {
    let action = omega.action();
    let ops = Operators::new(omega, cfg);
    let xs = action.samples(cfg.depth);
    let kernel = kernel_mismatch(omega, &[m.clone(), n.clone()], &[(0, 1)], &xs)?;
    let kernel_report = Report::from_witness(
        format!("E commutation kernel n={n} m={m}"),
        xs.len() * xs.len(),
        kernel.as_ref().map(|k| k.to_string()),
    );
    let bs = basis(action);
    let mut op_witness = first_witness(&bs, |f| {
        let nm = ops.expectation(n, &ops.expectation(m, f)?)?;
        let mn = ops.expectation(m, &ops.expectation(n, f)?)?;
        Ok(mismatch(format!("E_n E_m f and E_m E_n f for f={f}:"), ops.differ(&nm, &mn)?))
    })?;
    if let (None, Some(k), true) = (&op_witness, &kernel, action.is_word_action()) {
        // E_n E_m f (z) = Σ_x K(x, z) f(x) with K the kernel-identity left side.
        let mut relevant = Vec::new();
        for (a, b) in [(n, m), (m, n)] {
            for y in action.fiber_class(a, &k.z)? {
                relevant.extend(action.fiber_class(b, &y)?);
            }
        }
        let x = k.x.as_word()?;
        let depth = relevant
            .iter()
            .filter(|p| **p != k.x)
            .map(|p| Ok(first_difference(x, p.as_word()?) + 1))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        let f = ObservableExpr::indicator(&x.first_bits(depth))?;
        let nm = ObservableExpr::expectation(n.clone(), ObservableExpr::expectation(m.clone(), f.clone()));
        let mn = ObservableExpr::expectation(m.clone(), ObservableExpr::expectation(n.clone(), f.clone()));
        if ops.eval(&nm, &k.z)? != ops.eval(&mn, &k.z)? {
            op_witness = Some(format!("E_n E_m f and E_m E_n f differ at {} for f={f}", k.z));
        }
    }
    let op_report = Report::from_witness(format!("E commutation operators n={n} m={m}"), bs.len(), op_witness);
    let agree = kernel_report.passed() == op_report.passed();
    let agreement = Report::from_witness(
        format!("E commutation equivalence n={n} m={m}"),
        2,
        (!agree).then(|| {
            format!("kernel {:?} but operators {:?}", kernel_report.status, op_report.status)
        }),
    );
    Ok(vec![kernel_report, op_report, agreement])
}

/// The four interaction-group axioms over `g, h` in the symmetric box,
/// `V_n = α_n`, `V_{n⁻¹} = L_n`, and agreement of `L_{np} α_{mp}` with the
/// canonical `V_g` for `g = n⁻¹m`.
pub fn check_interaction_axioms(omega: &Cocycle, cfg: Sampling) -> Result<Vec<Report>> {
    let action = omega.action();
    let ops = Operators::new(omega, cfg);
    let bs = basis(action);
    let gs = action.group().group_box(cfg.bound);
    let k = bs.len();
    let gf: Vec<(usize, usize)> = (0..gs.len()).flat_map(|g| (0..k).map(move |f| (g, f))).collect();
    let ghf: Vec<(usize, usize, usize)> = (0..gs.len())
        .flat_map(|g| (0..gs.len()).flat_map(move |h| (0..k).map(move |f| (g, h, f))))
        .collect();
    let gac: Vec<(usize, usize, usize)> = (0..gs.len())
        .flat_map(|g| (0..k).flat_map(move |a| (0..k).map(move |c| (g, a, c))))
        .collect();
    let one = action.group().identity();

    let unit = run("interaction (i) V_1 = id", &bs, |f| {
        Ok(mismatch(format!("V_1 f and f for f={f}:"), ops.differ(&ops.interaction(&one, f)?, f)?))
    })?;
    let second = run("interaction (ii) V_g V_h V_h^-1 = V_gh V_h^-1", &ghf, |&(g, h, f)| {
        let (g, h, f) = (&gs[g], &gs[h], &bs[f]);
        let inner = ops.interaction(&h.inv(), f)?;
        let lhs = ops.interaction(g, &ops.interaction(h, &inner)?)?;
        let rhs = ops.interaction(&g.mul(h)?, &inner)?;
        Ok(mismatch(format!("g={g}, h={h}, f={f}:"), ops.differ(&lhs, &rhs)?))
    })?;
    let third = run("interaction (iii) V_g^-1 V_g V_h = V_g^-1 V_gh", &ghf, |&(g, h, f)| {
        let (g, h, f) = (&gs[g], &gs[h], &bs[f]);
        let lhs = ops.interaction(&g.inv(), &ops.interaction(g, &ops.interaction(h, f)?)?)?;
        let rhs = ops.interaction(&g.inv(), &ops.interaction(&g.mul(h)?, f)?)?;
        Ok(mismatch(format!("g={g}, h={h}, f={f}:"), ops.differ(&lhs, &rhs)?))
    })?;
    let fourth = run("interaction (iv) multiplicative on range", &gac, |&(g, a, c)| {
        let (g, a, c) = (&gs[g], &bs[a], &bs[c]);
        let b = ops.interaction(&g.inv(), c)?;
        let lhs = ops.interaction(g, &ops.mul(a, &b)?)?;
        let rhs = ops.mul(&ops.interaction(g, a)?, &ops.interaction(g, &b)?)?;
        Ok(mismatch(format!("g={g}, a={a}, b=V_g^-1({c}):"), ops.differ(&lhs, &rhs)?))
    })?;
    let bx = action.generator_box(cfg.bound);
    let nf: Vec<(usize, usize)> = (0..bx.len()).flat_map(|n| (0..k).map(move |f| (n, f))).collect();
    let extremes = run("interaction extends α and L", &nf, |&(n, f)| {
        let (n, f) = (&bx[n], &bs[f]);
        if let Some(p) = ops.differ(&ops.interaction(n, f)?, &ops.alpha(n, f)?)? {
            return Ok(Some(format!("V_{n} and α_{n} differ on {f} at {p}")));
        }
        Ok(mismatch(format!("V_{n}^-1 and L_{n} on {f}:"), ops.differ(&ops.interaction(&n.inv(), f)?, &ops.transfer(n, f)?)?))
    })?;
    let mut shifts = action.generators();
    if shifts.len() > 1 {
        let all = shifts.iter().try_fold(action.group().identity(), |acc, p| acc.mul(p))?;
        shifts.push(all);
    }
    let well_defined = run("interaction well-defined", &gf, |&(g, f)| {
        let (g, f) = (&gs[g], &bs[f]);
        let d = decompose(g)?;
        let canonical = ops.interaction(g, f)?;
        for p in &shifts {
            let (n, m) = (d.inverse_part.mul(p)?, d.positive_part.mul(p)?);
            if let Some(at) = ops.differ(&ops.interaction_via(&n, &m, f)?, &canonical)? {
                return Ok(Some(format!("g={g} via ({n})^-1({m}) differs on {f} at {at}")));
            }
        }
        Ok(None)
    })?;
    Ok(vec![unit, second, third, fourth, extremes, well_defined])
}

/// `W_k` agrees with the interaction operator of `(k, -k)`.
pub fn check_poly_w(omega: &Cocycle, cfg: Sampling) -> Result<Report> {
    let ops = Operators::new(omega, cfg);
    let bs = basis(omega.action());
    let b = cfg.bound as i64;
    let items: Vec<(i64, usize)> = (-b..=b).flat_map(|k| (0..bs.len()).map(move |f| (k, f))).collect();
    run("W_k = V_(k,-k)", &items, |&(k, f)| {
        let f = &bs[f];
        let g = LatticeElement::vector(&[k, -k]);
        Ok(mismatch(format!("k={k}, f={f}:"), ops.differ(&ops.poly_w(k, f)?, &ops.interaction(&g, f)?)?))
    })
}

impl fmt::Display for ObservableExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableExpr::Base(Base::Constant(c)) => match c.as_rational() {
                Some(q) => write!(f, "const({})", format_rational(&q)),
                None => write!(f, "const({c})"),
            },
            ObservableExpr::Base(Base::Cylinder(t)) => {
                let reduced = t.reduced();
                let nonzero: Vec<usize> =
                    (0..reduced.table().len()).filter(|i| !reduced.table()[*i].is_zero()).collect();
                if nonzero.len() == 1 && reduced.table()[nonzero[0]] == Scalar::one() {
                    let w = all_words(reduced.depth())[nonzero[0]].clone();
                    write!(f, "ind({})", format_bits(&w))
                } else {
                    write!(f, "table{t}")
                }
            }
            ObservableExpr::Base(Base::Polynomial(cs)) => {
                if cs.len() == 2 && cs[0].is_zero() && cs[1].is_one() {
                    f.write_str("x")
                } else {
                    let parts: Vec<String> = cs.iter().map(format_rational).collect();
                    write!(f, "poly({})", parts.join(","))
                }
            }
            ObservableExpr::Alpha(n, e) => write!(f, "A[n={n}] {e}"),
            ObservableExpr::Transfer(n, e) => write!(f, "L[n={n}] {e}"),
            ObservableExpr::Expectation(n, e) => write!(f, "E[n={n}] {e}"),
            ObservableExpr::Interaction(g, e) => write!(f, "V[g={g}] {e}"),
            ObservableExpr::PolyW(k, e) => write!(f, "W[k={k}] {e}"),
            ObservableExpr::Sum(a, b) => write!(f, "add({a}, {b})"),
            ObservableExpr::Product(a, b) => write!(f, "mul({a}, {b})"),
            ObservableExpr::Scale(c, e) => match c.as_rational() {
                Some(q) => write!(f, "scale[{}] {e}", format_rational(&q)),
                None => write!(f, "scale[{c}] {e}"),
            },
        }
    }
}

impl fmt::Debug for ObservableExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct Parser<'s> {
    src: &'s str,
    pos: usize,
    group: LatticeGroup,
}

impl<'s> Parser<'s> {
    fn err(&self, what: &str) -> Error {
        Error::ExprSyntax(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {token:?}")))
        }
    }

    /// Text up to the matching closing delimiter, which is consumed.
    fn until_close(&mut self, open: char, close: char) -> Result<&'s str> {
        let start = self.pos;
        let mut depth = 0usize;
        for (i, c) in self.rest().char_indices() {
            if c == open {
                depth += 1;
            } else if c == close {
                if depth == 0 {
                    let inner = &self.src[start..start + i];
                    self.pos = start + i + c.len_utf8();
                    return Ok(inner);
                }
                depth -= 1;
            }
        }
        Err(self.err(&format!("unclosed {open}")))
    }

    fn bracket_arg(&mut self, key: &str) -> Result<&'s str> {
        self.expect("[")?;
        let inner = self.until_close('[', ']')?;
        let value = inner
            .trim()
            .strip_prefix(key)
            .and_then(|r| r.trim_start().strip_prefix('='))
            .unwrap_or(inner);
        Ok(value.trim())
    }

    fn element(&self, text: &str) -> Result<LatticeElement> {
        LatticeElement::parse(text, self.group)
    }

    fn rational(&self, text: &str) -> Result<Rational> {
        parse_rational(text).ok_or_else(|| self.err(&format!("bad rational {text:?}")))
    }

    fn expr(&mut self) -> Result<ObservableExpr> {
        self.skip_ws();
        let ops: [(&str, &str); 5] = [("A", "n"), ("L", "n"), ("E", "n"), ("V", "g"), ("W", "k")];
        for (name, key) in ops {
            if self.rest().starts_with(name) && self.rest()[1..].trim_start().starts_with('[') {
                self.pos += 1;
                let arg = self.bracket_arg(key)?;
                if name == "W" {
                    let k: i64 = arg.parse().map_err(|_| self.err("bad W index"))?;
                    return Ok(ObservableExpr::poly_w(k, self.expr()?));
                }
                let el = self.element(arg)?;
                let inner = self.expr()?;
                return Ok(match name {
                    "A" => ObservableExpr::alpha(el, inner),
                    "L" => ObservableExpr::transfer(el, inner),
                    "E" => ObservableExpr::expectation(el, inner),
                    _ => ObservableExpr::interaction(el, inner),
                });
            }
        }
        if self.eat("scale") {
            let arg = self.bracket_arg("")?;
            let q = self.rational(arg)?;
            return Ok(ObservableExpr::scale(Scalar::from_rational(q), self.expr()?));
        }
        if self.eat("ind(") {
            let bits = self.until_close('(', ')')?;
            return ObservableExpr::indicator(&parse_bits(bits.trim())?);
        }
        if self.eat("const(") {
            let arg = self.until_close('(', ')')?;
            return Ok(ObservableExpr::constant(Scalar::from_rational(self.rational(arg)?)));
        }
        if self.eat("poly(") {
            let arg = self.until_close('(', ')')?;
            let cs = arg.split(',').map(|c| self.rational(c)).collect::<Result<Vec<_>>>()?;
            return Ok(ObservableExpr::polynomial(cs));
        }
        for (name, is_sum) in [("add(", true), ("mul(", false)] {
            if self.eat(name) {
                let a = self.expr()?;
                self.expect(",")?;
                let b = self.expr()?;
                self.expect(")")?;
                return Ok(if is_sum { ObservableExpr::add(a, b) } else { ObservableExpr::mul(a, b) });
            }
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.eat("x") {
            return Ok(ObservableExpr::angle());
        }
        Err(self.err("expected an expression"))
    }
}

/// Parses the prefix syntax, e.g. `V[g=(1,-1)] ind(1)` or `L[n=2] x`.
pub fn parse_expr(src: &str, group: LatticeGroup) -> Result<ObservableExpr> {
    let mut p = Parser { src, pos: 0, group };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Index of the cylinder of depth `depth` containing `p`.
pub fn cylinder_index(p: &Point, depth: usize) -> Result<usize> {
    Ok(bits_to_index(&p.as_word()?.first_bits(depth)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Dictionary, Endo};
    use crate::scalar::rational;
    use crate::space::sample_points;

    fn pt(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn v(a: &[i64]) -> LatticeElement {
        LatticeElement::vector(a)
    }

    fn shift() -> Cocycle {
        Cocycle::iterate(Action::single(Endo::Shift)).unwrap()
    }

    fn ledrappier() -> Cocycle {
        Cocycle::product(Action::ledrappier(), 3).unwrap()
    }

    fn ind(w: &str) -> ObservableExpr {
        ObservableExpr::indicator(&parse_bits(w).unwrap()).unwrap()
    }

    fn q(n: i128, d: i128) -> Scalar {
        Scalar::from_rational(rational(n, d))
    }

    #[test]
    fn transfer_of_indicator() {
        let w = shift();
        let f = ind("1");
        let e = ObservableExpr::transfer(v(&[1]), f.clone());
        for y in sample_points(3) {
            let y0 = Point::Word(y.as_word().unwrap().prepended(0));
            let y1 = Point::Word(y.as_word().unwrap().prepended(1));
            let oracle = (eval_expr(&f, &w, &y0).unwrap() + eval_expr(&f, &w, &y1).unwrap()).scale(&rational(1, 2));
            assert_eq!(eval_expr(&e, &w, &y).unwrap(), oracle);
            assert_eq!(oracle, q(1, 2));
        }
        let one = ObservableExpr::alpha(v(&[3]), ObservableExpr::one());
        assert_eq!(eval_expr(&one, &w, &pt("01|1")).unwrap(), Scalar::one());
    }

    #[test]
    fn circle_interaction_example() {
        let w = Cocycle::reciprocal();
        let g = LatticeElement::from_ratio(3, 2);
        let e = ObservableExpr::interaction(g, ObservableExpr::angle());
        assert_eq!(eval_expr(&e, &w, &pt("0")).unwrap(), q(1, 4));
        let via = ObservableExpr::interaction_via(
            LatticeElement::from_integer(2),
            LatticeElement::from_integer(3),
            ObservableExpr::angle(),
        );
        assert_eq!(eval_expr(&via, &w, &pt("0")).unwrap(), q(1, 4));
    }

    #[test]
    fn materialize_examples() {
        let w = shift();
        let l = materialize(&ObservableExpr::transfer(v(&[1]), ind("1")), &w, None).unwrap();
        assert_eq!(l, CylinderFunction::constant(q(1, 2)));
        let a = materialize(&ObservableExpr::alpha(v(&[1]), ind("1")), &w, None).unwrap();
        assert_eq!(a.depth(), 2);
        for word in all_words(2) {
            assert_eq!(a.value_on(&word), &Scalar::from_int(word[1] as i128));
        }
        let e = materialize(&ObservableExpr::expectation(v(&[1]), ind("1")), &w, Some(1)).unwrap();
        assert_eq!(e.table(), &[q(1, 2), q(1, 2)]);
        let bad = materialize(&ObservableExpr::alpha(v(&[2]), ind("1")), &w, Some(1));
        assert!(matches!(bad, Err(Error::TailDependence(_))));
        let deep = materialize(&ObservableExpr::alpha(v(&[12]), ind("1")), &w, None);
        assert!(matches!(deep, Err(Error::DepthCapExceeded { depth: 13, .. })));
        assert!(materialize(&ObservableExpr::angle(), &Cocycle::reciprocal(), None).is_err());
    }

    #[test]
    fn depth_bounds_are_tail_independent() {
        let w = Cocycle::perturbed_shift();
        let exprs = vec![
            ObservableExpr::transfer(v(&[2]), ind("101")),
            ObservableExpr::expectation(v(&[1]), ind("01")),
            ObservableExpr::interaction(v(&[-2]), ObservableExpr::interaction(v(&[1]), ind("1"))),
        ];
        for e in &exprs {
            assert!(materialize(e, &w, None).is_ok(), "{e}");
        }
        let ex = Action::pair(
            Endo::Shift,
            Endo::automaton(Dictionary::from_strs(3, &["000", "100", "010", "111"]).unwrap()).unwrap(),
        )
        .unwrap();
        let c = Cocycle::biased_product(ex).unwrap();
        for g in LatticeGroup::IntVector(2).group_box(1) {
            let e = ObservableExpr::interaction(g, ind("10"));
            assert!(materialize(&e, &c, None).is_ok(), "{e}");
        }
    }

    #[test]
    fn transfer_checks_pass() {
        for w in [shift(), ledrappier()] {
            let cfg = Sampling::new(3, 2);
            assert!(check_transfer_axiom(&w, cfg).unwrap().passed(), "{w}");
            assert!(check_transfer_antimult(&w, cfg).unwrap().passed(), "{w}");
            for r in check_transfer_basics(&w, cfg).unwrap() {
                assert!(r.passed(), "{r}");
            }
        }
        let c = Cocycle::reciprocal();
        let cfg = Sampling::new(0, 3);
        assert!(check_transfer_axiom(&c, cfg).unwrap().passed());
        assert!(check_transfer_antimult(&c, cfg).unwrap().passed());
    }

    #[test]
    fn transfer_axiom_specific_instance() {
        let w = shift();
        let (f, g) = (ind("0"), ind("1"));
        let n = v(&[1]);
        let lhs = ObservableExpr::transfer(n.clone(), ObservableExpr::mul(f.clone(), ObservableExpr::alpha(n.clone(), g.clone())));
        let rhs = ObservableExpr::mul(ObservableExpr::transfer(n, f), g);
        for y in sample_points(4) {
            assert_eq!(eval_expr(&lhs, &w, &y).unwrap(), eval_expr(&rhs, &w, &y).unwrap());
        }
    }

    #[test]
    fn e_commutation_agrees() {
        let cfg = Sampling::new(3, 1);
        let reports = check_e_commutation(&ledrappier(), &v(&[1, 0]), &v(&[0, 1]), cfg).unwrap();
        assert!(reports.iter().all(Report::passed), "{reports:?}");
        let same = check_e_commutation(&ledrappier(), &v(&[1, 1]), &v(&[1, 1]), cfg).unwrap();
        assert!(same.iter().all(Report::passed));
        let ex = Action::pair(
            Endo::Shift,
            Endo::automaton(Dictionary::from_strs(3, &["000", "100", "010", "111"]).unwrap()).unwrap(),
        )
        .unwrap();
        let cand = Cocycle::product_candidate(ex).unwrap();
        let r = check_e_commutation(&cand, &v(&[1, 0]), &v(&[0, 1]), cfg).unwrap();
        assert!(!r[0].passed() && !r[1].passed() && r[2].passed(), "{r:?}");
    }

    #[test]
    fn interaction_axioms_small() {
        for w in [shift(), ledrappier()] {
            let reports = check_interaction_axioms(&w, Sampling::new(3, 1)).unwrap();
            for r in &reports {
                assert!(r.passed(), "{w}: {r}");
            }
        }
        let reports = check_interaction_axioms(&Cocycle::reciprocal(), Sampling::new(0, 2)).unwrap();
        for r in &reports {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn shift_interaction_instance() {
        let w = shift();
        let ops = Operators::new(&w, Sampling::new(3, 1));
        let (m1, p1) = (v(&[-1]), v(&[1]));
        for f in basis(w.action()) {
            let lhs = ops.interaction(&m1, &ops.interaction(&p1, &ops.interaction(&m1, &f).unwrap()).unwrap()).unwrap();
            let l1 = ops.transfer(&p1, &f).unwrap();
            assert!(ops.differ(&lhs, &l1).unwrap().is_none());
        }
    }

    #[test]
    fn ledrappier_interaction_display() {
        let w = ledrappier();
        let a = w.action();
        let g = v(&[1, -1]);
        let f = ind("10");
        for y in sample_points(3) {
            let mut direct = Scalar::zero();
            for x in a.preimages(&v(&[0, 1]), &y).unwrap() {
                let sx = a.apply(&v(&[1, 0]), &x).unwrap();
                direct = direct + eval_expr(&f, &w, &sx).unwrap().scale(&w.eval(&v(&[0, 1]), &x).unwrap());
            }
            assert_eq!(eval_expr(&ObservableExpr::interaction(g.clone(), f.clone()), &w, &y).unwrap(), direct);
        }
    }

    #[test]
    fn poly_w_examples() {
        let w = ledrappier();
        let f = ind("1");
        assert_eq!(eval_expr(&ObservableExpr::poly_w(1, f.clone()), &w, &pt("|0")).unwrap(), q(1, 2));
        for y in sample_points(3) {
            assert_eq!(
                eval_expr(&ObservableExpr::poly_w(0, f.clone()), &w, &y).unwrap(),
                eval_expr(&f, &w, &y).unwrap()
            );
        }
        assert!(check_poly_w(&w, Sampling::new(3, 2)).unwrap().passed());
        assert!(eval_expr(&ObservableExpr::poly_w(1, f), &shift(), &pt("|0")).is_err());
    }

    #[test]
    fn parser_round_trip() {
        let g2 = LatticeGroup::IntVector(2);
        let e = parse_expr("V[g=(1,-1)] ind(1)", g2).unwrap();
        assert_eq!(e, ObservableExpr::interaction(v(&[1, -1]), ind("1")));
        assert_eq!(e.to_string(), "V[g=(1,-1)] ind(1)");
        let srcs = [
            "A[n=(1,0)] ind(01)",
            "L[n=(0,2)] add(ind(0), scale[1/2] ind(11))",
            "E[n=(1,1)] mul(const(3), ind(1))",
            "W[k=-1] ind(1)",
        ];
        for s in srcs {
            let e = parse_expr(s, g2).unwrap();
            assert_eq!(parse_expr(&e.to_string(), g2).unwrap(), e, "{s}");
        }
        let c = parse_expr("V[g=3/2] x", LatticeGroup::PositiveRationals).unwrap();
        assert_eq!(eval_expr(&c, &Cocycle::reciprocal(), &pt("0")).unwrap(), q(1, 4));
        assert_eq!(
            parse_expr("poly(1,0,2)", LatticeGroup::PositiveRationals).unwrap(),
            ObservableExpr::polynomial(vec![rational(1, 1), rational(0, 1), rational(2, 1)])
        );
        for bad in ["V[g=(1,-1)]", "ind(2)", "foo", "add(ind(1) ind(0))", "ind(1) extra", "A[n=(1)] ind(1)"] {
            assert!(parse_expr(bad, g2).is_err(), "{bad}");
        }
    }
}
