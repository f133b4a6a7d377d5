//! Convolution on `C_c(G)` for the spanning family `u S_n S_m* v`, by exact
//! finite fiber sums.
//!
//! Every element is evaluated a whole row `a(x, ·, ·)` (or column
//! `a(·, ·, y)`) at a time; rows of products are assembled from the rows of
//! the factors, and rows are memoized per element and point.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use crate::cocycle::{class_intersection, weight_sum, Cocycle};
use crate::error::{Error, Result};
use crate::groupoid::GroupoidElement;
use crate::lattice::{decompose, LatticeElement};
use crate::operators::{basis, eval_expr, ObservableExpr, Operators};
use crate::report::{first_witness, Report, Sampling};
use crate::scalar::{Rational, Scalar};
use crate::space::{all_words, CylinderFunction, Point};

/// `u S_n S_m* v`, the function
/// `(x, g, y) ↦ u(x) ω(n,x)^½ ω(m,y)^½ v(y) [g = nm⁻¹] [θ_n(x) = θ_m(y)]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub u: ObservableExpr,
    pub n: LatticeElement,
    pub m: LatticeElement,
    pub v: ObservableExpr,
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] S_{} S_{}* [{}]", self.u, self.n, self.m, self.v)
    }
}

pub enum Node {
    Monomial(Monomial),
    Sum(Vec<(Scalar, AlgebraElement)>),
    Adjoint(AlgebraElement),
    Convolution(AlgebraElement, AlgebraElement),
}

#[derive(Clone)]
pub struct AlgebraElement {
    id: u64,
    node: Arc<Node>,
}

static NEXT_ID: AtomicU64 = AtomicU64::new(0);

impl AlgebraElement {
    fn wrap(node: Node) -> Self {
        AlgebraElement { id: NEXT_ID.fetch_add(1, Ordering::Relaxed), node: Arc::new(node) }
    }

    pub fn monomial(u: ObservableExpr, n: LatticeElement, m: LatticeElement, v: ObservableExpr) -> Self {
        Self::wrap(Node::Monomial(Monomial { u, n, m, v }))
    }

    /// `S_n`.
    pub fn isometry(n: &LatticeElement) -> Self {
        let one = n.group().identity();
        Self::monomial(ObservableExpr::one(), n.clone(), one, ObservableExpr::one())
    }

    /// `π(f)`, supported on the unit space.
    pub fn pi(f: ObservableExpr, group: crate::lattice::LatticeGroup) -> Self {
        let one = group.identity();
        Self::monomial(f, one.clone(), one, ObservableExpr::one())
    }

    pub fn unit(group: crate::lattice::LatticeGroup) -> Self {
        Self::pi(ObservableExpr::one(), group)
    }

    /// `S_n S_n*`.
    pub fn range_projection(n: &LatticeElement) -> Self {
        Self::convolution(&Self::isometry(n), &Self::isometry(n).adjoint())
    }

    /// `σ_g = S_n* S_m` for the canonical `g = n⁻¹m`.
    pub fn sigma(g: &LatticeElement) -> Result<Self> {
        let d = decompose(g)?;
        Ok(Self::sigma_via(&d.inverse_part, &d.positive_part))
    }

    pub fn sigma_via(n: &LatticeElement, m: &LatticeElement) -> Self {
        Self::convolution(&Self::isometry(n).adjoint(), &Self::isometry(m))
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(Node::Adjoint(self.clone()))
    }

    pub fn convolution(a: &Self, b: &Self) -> Self {
        Self::wrap(Node::Convolution(a.clone(), b.clone()))
    }

    pub fn sum(terms: Vec<(Scalar, AlgebraElement)>) -> Self {
        Self::wrap(Node::Sum(terms))
    }

    pub fn node(&self) -> &Node {
        &self.node
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Monomial(t) => write!(f, "{t}"),
            Node::Sum(ts) => {
                let parts: Vec<String> = ts.iter().map(|(c, a)| format!("{c}*({a})")).collect();
                write!(f, "{}", parts.join(" + "))
            }
            Node::Adjoint(a) => write!(f, "({a})*"),
            Node::Convolution(a, b) => write!(f, "({a}) . ({b})"),
        }
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Nonzero values `(g, z) ↦ a(x, g, z)` of a row, or `(g, z) ↦ a(z, g, y)`
/// of a column.
pub type Row = BTreeMap<(LatticeElement, Point), Scalar>;

fn accumulate(row: &mut Row, key: (LatticeElement, Point), value: Scalar) {
    if value.is_zero() {
        return;
    }
    let slot = row.entry(key).or_insert_with(Scalar::zero);
    *slot = &*slot + &value;
}

fn prune(mut row: Row) -> Row {
    row.retain(|_, v| !v.is_zero());
    row
}

/// Memoizing evaluator of algebra elements against one cocycle.
pub struct Convolver<'a> {
    omega: &'a Cocycle,
    rows: Mutex<HashMap<(u64, Point), Arc<Row>>>,
    cols: Mutex<HashMap<(u64, Point), Arc<Row>>>,
    cached: AtomicUsize,
}

/// Memoized row and column entries kept before the memo is dropped.
pub const MEMO_ENTRY_CAP: usize = 1 << 21;

impl<'a> Convolver<'a> {
    pub fn new(omega: &'a Cocycle) -> Self {
        Convolver {
            omega,
            rows: Mutex::new(HashMap::new()),
            cols: Mutex::new(HashMap::new()),
            cached: AtomicUsize::new(0),
        }
    }

    /// Drops every memoized row and column.
    pub fn clear(&self) {
        self.rows.lock().unwrap().clear();
        self.cols.lock().unwrap().clear();
        self.cached.store(0, Ordering::Relaxed);
    }

    fn account(&self, entries: usize) {
        if self.cached.fetch_add(entries + 1, Ordering::Relaxed) > MEMO_ENTRY_CAP {
            self.clear();
        }
    }

    pub fn omega(&self) -> &Cocycle {
        self.omega
    }

    fn root(&self, n: &LatticeElement, x: &Point) -> Result<Scalar> {
        Scalar::sqrt(self.omega.eval(n, x)?)
    }

    fn monomial_value(&self, t: &Monomial, x: &Point, y: &Point) -> Result<Scalar> {
        let ux = eval_expr(&t.u, self.omega, x)?;
        if ux.is_zero() {
            return Ok(ux);
        }
        let vy = eval_expr(&t.v, self.omega, y)?;
        ux.try_mul(&self.root(&t.n, x)?)?.try_mul(&self.root(&t.m, y)?)?.try_mul(&vy)
    }

    /// `(g, z) ↦ a(x, g, z)`.
    pub fn row(&self, a: &AlgebraElement, x: &Point) -> Result<Arc<Row>> {
        let key = (a.id, x.clone());
        if let Some(r) = self.rows.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let action = self.omega.action();
        let mut out = Row::new();
        match &*a.node {
            Node::Monomial(t) => {
                let g = t.n.right_div(&t.m)?;
                for z in action.preimages(&t.m, &action.apply(&t.n, x)?)? {
                    let v = self.monomial_value(t, x, &z)?;
                    accumulate(&mut out, (g.clone(), z), v);
                }
            }
            Node::Sum(terms) => {
                for (c, b) in terms {
                    for (k, v) in self.row(b, x)?.iter() {
                        accumulate(&mut out, k.clone(), c.try_mul(v)?);
                    }
                }
            }
            Node::Adjoint(b) => {
                for ((h, z), v) in self.column(b, x)?.iter() {
                    accumulate(&mut out, (h.inv(), z.clone()), v.clone());
                }
            }
            Node::Convolution(b, c) => {
                for ((h1, z1), v1) in self.row(b, x)?.iter() {
                    for ((h2, z2), v2) in self.row(c, z1)?.iter() {
                        accumulate(&mut out, (h1.mul(h2)?, z2.clone()), v1.try_mul(v2)?);
                    }
                }
            }
        }
        let out = Arc::new(prune(out));
        self.account(out.len());
        self.rows.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }

    /// `(g, z) ↦ a(z, g, y)`.
    pub fn column(&self, a: &AlgebraElement, y: &Point) -> Result<Arc<Row>> {
        let key = (a.id, y.clone());
        if let Some(r) = self.cols.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let action = self.omega.action();
        let mut out = Row::new();
        match &*a.node {
            Node::Monomial(t) => {
                let g = t.n.right_div(&t.m)?;
                for z in action.preimages(&t.n, &action.apply(&t.m, y)?)? {
                    let v = self.monomial_value(t, &z, y)?;
                    accumulate(&mut out, (g.clone(), z), v);
                }
            }
            Node::Sum(terms) => {
                for (c, b) in terms {
                    for (k, v) in self.column(b, y)?.iter() {
                        accumulate(&mut out, k.clone(), c.try_mul(v)?);
                    }
                }
            }
            Node::Adjoint(b) => {
                for ((h, z), v) in self.row(b, y)?.iter() {
                    accumulate(&mut out, (h.inv(), z.clone()), v.clone());
                }
            }
            Node::Convolution(b, c) => {
                for ((h2, w), v2) in self.column(c, y)?.iter() {
                    for ((h1, z), v1) in self.column(b, w)?.iter() {
                        accumulate(&mut out, (h1.mul(h2)?, z.clone()), v1.try_mul(v2)?);
                    }
                }
            }
        }
        let out = Arc::new(prune(out));
        self.account(out.len());
        self.cols.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }

    /// `a(x, g, y)`.
    pub fn eval(&self, a: &AlgebraElement, x: &Point, g: &LatticeElement, y: &Point) -> Result<Scalar> {
        let row = self.row(a, x)?;
        Ok(row.get(&(g.clone(), y.clone())).cloned().unwrap_or_else(Scalar::zero))
    }

    /// `a*(x, g, y) = a(y, g⁻¹, x)`.
    pub fn adjoint_eval(&self, a: &AlgebraElement, x: &Point, g: &LatticeElement, y: &Point) -> Result<Scalar> {
        self.eval(a, y, &g.inv(), x)
    }

    /// `(a ⋆ b)(x, g, y) = Σ_{(h, z)} a(x, h, z) b(z, h⁻¹g, y)` over the
    /// finite support of `a(x, ·, ·)`.
    pub fn convolve_eval(
        &self,
        a: &AlgebraElement,
        b: &AlgebraElement,
        x: &Point,
        g: &LatticeElement,
        y: &Point,
    ) -> Result<Scalar> {
        let mut total = Scalar::zero();
        for ((h, z), v) in self.row(a, x)?.iter() {
            let w = self.eval(b, z, &h.left_div(g)?, y)?;
            if !w.is_zero() {
                total = total + v.try_mul(&w)?;
            }
        }
        Ok(total)
    }

    pub fn eval_at(&self, a: &AlgebraElement, e: &GroupoidElement) -> Result<Scalar> {
        self.eval(a, &e.x, &e.g, &e.y)
    }

    /// First sampled `x` where the rows of `a` and `b` differ.
    pub fn rows_differ(&self, a: &AlgebraElement, b: &AlgebraElement, xs: &[Point]) -> Result<Option<String>> {
        first_witness(xs, |x| {
            let (ra, rb) = (self.row(a, x)?, self.row(b, x)?);
            if ra == rb {
                return Ok(None);
            }
            let key = ra
                .keys()
                .chain(rb.keys())
                .find(|k| ra.get(*k) != rb.get(*k))
                .expect("rows differ")
                .clone();
            let zero = Scalar::zero();
            Ok(Some(format!(
                "at ({x} ; {} ; {}): {} != {}",
                key.0,
                key.1,
                ra.get(&key).unwrap_or(&zero),
                rb.get(&key).unwrap_or(&zero)
            )))
        })
    }
}

fn row_check(
    check: String,
    conv: &Convolver,
    xs: &[Point],
    cases: &[(String, AlgebraElement, AlgebraElement)],
) -> Result<Report> {
    for (label, a, b) in cases {
        if let Some(w) = conv.rows_differ(a, b, xs)? {
            return Ok(Report::fail(check, cases.len() * xs.len(), format!("{label} {w}")));
        }
    }
    Ok(Report::pass(check, cases.len() * xs.len()))
}

/// `S_n* S_n = 1` for `n` in the box.
pub fn check_isometries(conv: &Convolver, cfg: Sampling) -> Result<Report> {
    let action = conv.omega().action();
    let unit = AlgebraElement::unit(action.group());
    let cases: Vec<_> = action
        .generator_box(cfg.bound)
        .iter()
        .map(|n| {
            let s = AlgebraElement::isometry(n);
            (format!("S_{n}* S_{n}"), AlgebraElement::convolution(&s.adjoint(), &s), unit.clone())
        })
        .collect();
    row_check("S_n* S_n = 1".into(), conv, &action.samples(cfg.depth), &cases)
}

/// `S_n S_m = S_{nm}`.
pub fn check_semigroup(conv: &Convolver, cfg: Sampling) -> Result<Report> {
    let action = conv.omega().action();
    let bx = action.generator_box(cfg.bound);
    let mut cases = Vec::new();
    for n in &bx {
        for m in &bx {
            let lhs = AlgebraElement::convolution(&AlgebraElement::isometry(n), &AlgebraElement::isometry(m));
            cases.push((format!("S_{n} S_{m}"), lhs, AlgebraElement::isometry(&n.mul(m)?)));
        }
    }
    row_check("S_n S_m = S_nm".into(), conv, &action.samples(cfg.depth), &cases)
}

/// `S_n S_n*(x, g, y) = ω(n,x)^½ ω(n,y)^½ [g = 1] [θ_n(x) = θ_n(y)]`, with
/// the right side tabulated directly from the fiber class.
pub fn check_range_projections(conv: &Convolver, cfg: Sampling) -> Result<Report> {
    let omega = conv.omega();
    let action = omega.action();
    let xs = action.samples(cfg.depth);
    let bx = action.generator_box(cfg.bound);
    let one = action.group().identity();
    let items: Vec<(usize, usize)> = (0..bx.len()).flat_map(|i| (0..xs.len()).map(move |j| (i, j))).collect();
    let projections: Vec<AlgebraElement> = bx.iter().map(AlgebraElement::range_projection).collect();
    let witness = first_witness(&items, |&(i, j)| {
        let (n, x) = (&bx[i], &xs[j]);
        let mut oracle = Row::new();
        let rx = Scalar::sqrt(omega.eval(n, x)?)?;
        for y in action.fiber_class(n, x)? {
            accumulate(&mut oracle, (one.clone(), y.clone()), rx.try_mul(&Scalar::sqrt(omega.eval(n, &y)?)?)?);
        }
        let row = conv.row(&projections[i], x)?;
        Ok((*row != oracle).then(|| format!("S_{n} S_{n}* at x={x}")))
    })?;
    Ok(Report::from_witness("S_n S_n* formula", items.len(), witness))
}

/// Relevant second points for the pair `(n, m)` at `x`: everything sharing
/// an `n`- or `m`-class with a point of the other class of `x`.
fn relevant_points(
    action: &crate::dynamics::Action,
    n: &LatticeElement,
    m: &LatticeElement,
    x: &Point,
) -> Result<Vec<Point>> {
    let mut zs = Vec::new();
    for (a, b) in [(n, m), (m, n)] {
        for y in action.fiber_class(a, x)? {
            zs.extend(action.fiber_class(b, &y)?);
        }
    }
    zs.sort();
    zs.dedup();
    Ok(zs)
}

/// `W_m(C^{n,m}_{x,x}) W_n(C^{m,n}_{x,z})`.
pub fn class_weight_product(
    omega: &Cocycle,
    n: &LatticeElement,
    m: &LatticeElement,
    x: &Point,
    z: &Point,
) -> Result<Rational> {
    let action = omega.action();
    Ok(weight_sum(omega, m, &class_intersection(action, n, m, x, x)?)?
        * weight_sum(omega, n, &class_intersection(action, m, n, x, z)?)?)
}

/// `Σ_{y ∈ C^{m,n}_{x,z}} ω(m,y)^½ ω(n,y)^½ ω(m,x)^½ ω(n,z)^½`.
pub fn class_root_sum(
    omega: &Cocycle,
    n: &LatticeElement,
    m: &LatticeElement,
    x: &Point,
    z: &Point,
) -> Result<Scalar> {
    let action = omega.action();
    let outer = Scalar::sqrt(omega.eval(m, x)? * omega.eval(n, z)?)?;
    let mut total = Scalar::zero();
    for y in class_intersection(action, m, n, x, z)? {
        total = total + Scalar::sqrt(omega.eval(m, &y)? * omega.eval(n, &y)?)?;
    }
    outer.try_mul(&total)
}

/// `S_mS_m* S_nS_n* = S_nS_n* S_mS_m*` and the two symmetric identities
/// behind it, over sampled `x` and every relevant `z`.
pub fn check_projection_commutation(
    conv: &Convolver,
    n: &LatticeElement,
    m: &LatticeElement,
    cfg: Sampling,
) -> Result<Vec<Report>> {
    let omega = conv.omega();
    let action = omega.action();
    let xs = action.samples(cfg.depth);
    let (pn, pm) = (AlgebraElement::range_projection(n), AlgebraElement::range_projection(m));
    let cases = vec![(
        format!("P_{m} P_{n} vs P_{n} P_{m}"),
        AlgebraElement::convolution(&pm, &pn),
        AlgebraElement::convolution(&pn, &pm),
    )];
    let projections = row_check(format!("projections commute n={n} m={m}"), conv, &xs, &cases)?;
    let pairs = xs
        .iter()
        .map(|x| Ok(relevant_points(action, n, m, x)?.into_iter().map(|z| (x.clone(), z)).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let weights = first_witness(&pairs, |(x, z)| {
        let (a, b) = (class_weight_product(omega, n, m, x, z)?, class_weight_product(omega, m, n, x, z)?);
        Ok((a != b).then(|| format!("x={x} z={z}: {a} != {b}")))
    })?;
    let roots = first_witness(&pairs, |(x, z)| {
        let (a, b) = (class_root_sum(omega, n, m, x, z)?, class_root_sum(omega, m, n, x, z)?);
        Ok((a != b).then(|| format!("x={x} z={z}: {a} != {b}")))
    })?;
    Ok(vec![
        projections,
        Report::from_witness(format!("weight product symmetric n={n} m={m}"), pairs.len(), weights),
        Report::from_witness(format!("root sum symmetric n={n} m={m}"), pairs.len(), roots),
    ])
}

/// `σ_g` agrees across factorizations, `σ_n = S_n`, `σ_{g⁻¹} = σ_g*`,
/// `σ_g σ_{g⁻¹} σ_g = σ_g` and the partial group law
/// `σ_g σ_h σ_{h⁻¹} = σ_{gh} σ_{h⁻¹}` for `g, h` in the symmetric box.
pub fn check_partial_representation(conv: &Convolver, cfg: Sampling) -> Result<Vec<Report>> {
    let action = conv.omega().action();
    let xs = action.samples(cfg.depth);
    let gs = action.group().group_box(cfg.bound);
    let sigmas: HashMap<LatticeElement, AlgebraElement> = gs
        .iter()
        .flat_map(|g| gs.iter().map(move |h| g.mul(h)))
        .chain(gs.iter().map(|g| Ok(g.clone())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|g| Ok((g.clone(), AlgebraElement::sigma(&g)?)))
        .collect::<Result<_>>()?;
    let sigma = |g: &LatticeElement| sigmas[g].clone();

    let mut factor_cases = Vec::new();
    for g in &gs {
        let d = decompose(g)?;
        for p in action.generators() {
            let (n, m) = (d.inverse_part.mul(&p)?, d.positive_part.mul(&p)?);
            factor_cases.push((format!("g={g} via ({n})^-1({m})"), AlgebraElement::sigma_via(&n, &m), sigma(g)));
        }
        factor_cases.push((format!("sigma_{g}^-1 vs sigma_{g}*"), sigma(&g.inv()), sigma(g).adjoint()));
    }
    for n in action.generator_box(cfg.bound) {
        factor_cases.push((format!("sigma_{n} vs S_{n}"), sigma(&n), AlgebraElement::isometry(&n)));
    }
    let well_defined = row_check("sigma well-defined".into(), conv, &xs, &factor_cases)?;

    let mut inverse_cases = Vec::new();
    for g in &gs {
        let s = sigma(g);
        let lhs = AlgebraElement::convolution(&s, &AlgebraElement::convolution(&sigma(&g.inv()), &s));
        inverse_cases.push((format!("sigma_{g} sigma_{g}^-1 sigma_{g}"), lhs, s));
    }
    let inverse_law = row_check("sigma_g sigma_g^-1 sigma_g = sigma_g".into(), conv, &xs, &inverse_cases)?;

    let mut law = Report::pass("partial representation law", gs.len() * gs.len() * xs.len());
    for h in &gs {
        let tail = AlgebraElement::convolution(&sigma(h), &sigma(&h.inv()));
        for g in &gs {
            let lhs = AlgebraElement::convolution(&sigma(g), &tail);
            let rhs = AlgebraElement::convolution(&sigma(&g.mul(h)?), &sigma(&h.inv()));
            if let Some(w) = conv.rows_differ(&lhs, &rhs, &xs)? {
                law = Report::fail(law.check, law.samples, format!("g={g} h={h}: {w}"));
                break;
            }
        }
        if !law.passed() {
            break;
        }
    }
    Ok(vec![well_defined, inverse_law, law])
}

/// `σ_g π(f) σ_{g⁻¹} = π(V_g f) σ_g σ_{g⁻¹}` for `g` in the symmetric box
/// and `f` in the basis; `g ∈ P`, `g ∈ P⁻¹` and mixed `g` all occur.
pub fn check_covariance(conv: &Convolver, cfg: Sampling) -> Result<Report> {
    let omega = conv.omega();
    let action = omega.action();
    let ops = Operators::new(omega, cfg);
    let xs = action.samples(cfg.depth);
    let group = action.group();
    let mut cases = Vec::new();
    for g in group.group_box(cfg.bound) {
        let (s, s_inv) = (AlgebraElement::sigma(&g)?, AlgebraElement::sigma(&g.inv())?);
        let tail = AlgebraElement::convolution(&s, &s_inv);
        let case = if g.is_positive() {
            1
        } else if g.inv().is_positive() {
            2
        } else {
            3
        };
        for f in basis(action) {
            let lhs = AlgebraElement::convolution(&s, &AlgebraElement::convolution(&AlgebraElement::pi(f.clone(), group), &s_inv));
            let vf = ops.interaction(&g, &f)?;
            let rhs = AlgebraElement::convolution(&AlgebraElement::pi(vf, group), &tail);
            cases.push((format!("case {case}, g={g}, f={f}:"), lhs, rhs));
        }
    }
    row_check("covariance".into(), conv, &xs, &cases)
}

/// The cells `u_i = 1_{C_i} ω(n, ·)^{-½}` over the cylinders `C_i` of
/// depth `growth(n)`, after checking `θ_n` is injective on each cell.
pub fn partition_cells(omega: &Cocycle, n: &LatticeElement, cfg: Sampling) -> Result<Vec<CylinderFunction>> {
    let action = omega.action();
    if !action.is_word_action() {
        return Err(Error::Unsupported("partitions of unity need the full shift".into()));
    }
    let depth = action.growth(n)?;
    for x in action.samples(cfg.depth) {
        let mut prefixes: Vec<Vec<u8>> = action
            .fiber_class(n, &x)?
            .iter()
            .map(|y| Ok(y.as_word()?.first_bits(depth)))
            .collect::<Result<_>>()?;
        let total = prefixes.len();
        prefixes.sort();
        prefixes.dedup();
        if prefixes.len() != total {
            return Err(Error::Precondition(format!("θ_{n} is not injective on depth-{depth} cylinders near {x}")));
        }
    }
    let table_depth = depth.max(omega.locality(n).ok_or(Error::UnboundedDepth)?);
    all_words(depth)
        .into_iter()
        .map(|cell| {
            CylinderFunction::from_table(
                table_depth,
                all_words(table_depth)
                    .into_iter()
                    .map(|w| {
                        if w[..depth] != cell[..] {
                            return Ok(Scalar::zero());
                        }
                        let x = Point::Word(crate::space::Word::new(w, vec![0])?);
                        Scalar::inv_sqrt(omega.eval(n, &x)?)
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        })
        .collect()
}

/// `Σ_i π(u_i) S_n S_n* π(u_i) = 1`.
pub fn check_partition_of_unity(conv: &Convolver, n: &LatticeElement, cfg: Sampling) -> Result<Report> {
    let omega = conv.omega();
    let group = omega.action().group();
    let cells = partition_cells(omega, n, cfg)?;
    let p = AlgebraElement::range_projection(n);
    let terms = cells
        .into_iter()
        .map(|u| {
            let pu = AlgebraElement::pi(ObservableExpr::cylinder(u), group);
            (Scalar::one(), AlgebraElement::convolution(&pu, &AlgebraElement::convolution(&p, &pu)))
        })
        .collect();
    let cases = vec![(format!("n={n}"), AlgebraElement::sum(terms), AlgebraElement::unit(group))];
    row_check(format!("partition of unity n={n}"), conv, &omega.action().samples(cfg.depth), &cases)
}

/// Sample monomials `1_a S_n S_m* 1_b` over the generator box and
/// length-one cylinders.
pub fn sample_monomials(conv: &Convolver, bound: u32) -> Result<Vec<AlgebraElement>> {
    let action = conv.omega().action();
    let fs: Vec<ObservableExpr> = if action.is_word_action() {
        vec![ObservableExpr::one(), ObservableExpr::indicator(&[1])?, ObservableExpr::indicator(&[0])?]
    } else {
        vec![ObservableExpr::one(), ObservableExpr::angle()]
    };
    let bx = action.generator_box(bound);
    let mut out = Vec::new();
    for (i, n) in bx.iter().enumerate() {
        for (j, m) in bx.iter().enumerate() {
            let u = fs[(i + j) % fs.len()].clone();
            let v = fs[(i + 2 * j + 1) % fs.len()].clone();
            out.push(AlgebraElement::monomial(u, n.clone(), m.clone(), v));
        }
    }
    Ok(out)
}

/// `(a*)* = a`, `(a ⋆ b)* = b* ⋆ a*`, associativity, and agreement of row
/// assembly with the defining fiber sum, on sampled monomials.
pub fn check_algebra_laws(conv: &Convolver, cfg: Sampling) -> Result<Vec<Report>> {
    let action = conv.omega().action();
    let xs = action.samples(cfg.depth);
    let ms = sample_monomials(conv, cfg.bound)?;
    let k = ms.len();
    let mut involution = Vec::new();
    let mut anti = Vec::new();
    let mut assoc = Vec::new();
    for i in 0..k {
        involution.push((format!("{}", ms[i]), ms[i].adjoint().adjoint(), ms[i].clone()));
        let (a, b, c) = (&ms[i], &ms[(i * 7 + 3) % k], &ms[(i * 5 + 1) % k]);
        anti.push((
            format!("a={a} b={b}"),
            AlgebraElement::convolution(a, b).adjoint(),
            AlgebraElement::convolution(&b.adjoint(), &a.adjoint()),
        ));
        assoc.push((
            format!("a={a} b={b} c={c}"),
            AlgebraElement::convolution(&AlgebraElement::convolution(a, b), c),
            AlgebraElement::convolution(a, &AlgebraElement::convolution(b, c)),
        ));
    }
    let pointwise = first_witness(&xs, |x| {
        for (i, a) in ms.iter().enumerate() {
            let b = &ms[(i * 3 + 2) % k];
            let ab = AlgebraElement::convolution(a, b);
            for ((g, y), v) in conv.row(&ab, x)?.iter() {
                if conv.convolve_eval(a, b, x, g, y)? != *v {
                    return Ok(Some(format!("row and fiber sum disagree at ({x} ; {g} ; {y})")));
                }
            }
        }
        Ok(None)
    })?;
    Ok(vec![
        row_check("adjoint involutive".into(), conv, &xs, &involution)?,
        row_check("adjoint anti-multiplicative".into(), conv, &xs, &anti)?,
        row_check("convolution associative".into(), conv, &xs, &assoc)?,
        Report::from_witness("convolution fiber sum", xs.len() * k, pointwise),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Action, Dictionary, Endo};
    use crate::groupoid::elements_from;
    use crate::lattice::LatticeGroup;
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

    #[test]
    fn monomial_values() {
        let w = shift();
        let c = Convolver::new(&w);
        let s1 = AlgebraElement::isometry(&v(&[1]));
        let x = pt("01|1");
        let y = w.action().apply(&v(&[1]), &x).unwrap();
        assert_eq!(c.eval(&s1, &x, &v(&[1]), &y).unwrap(), Scalar::sqrt(rational(1, 2)).unwrap());
        assert!(c.eval(&s1, &x, &v(&[1]), &x).unwrap().is_zero());
        assert!(c.eval(&s1, &x, &v(&[0]), &y).unwrap().is_zero());
        let f = ObservableExpr::indicator(&[0]).unwrap();
        let pf = AlgebraElement::pi(f, LatticeGroup::IntVector(1));
        assert_eq!(c.eval(&pf, &x, &v(&[0]), &x).unwrap(), Scalar::one());
        assert!(c.eval(&pf, &pt("1|0"), &v(&[0]), &pt("1|0")).unwrap().is_zero());
        assert_eq!(c.adjoint_eval(&s1, &y, &v(&[-1]), &x).unwrap(), Scalar::sqrt(rational(1, 2)).unwrap());
        assert_eq!(c.eval(&pf.adjoint(), &x, &v(&[0]), &x).unwrap(), Scalar::one());
    }

    #[test]
    fn isometry_on_groupoid_elements() {
        let w = ledrappier();
        let c = Convolver::new(&w);
        let a = w.action();
        let n = v(&[1, 1]);
        let s = AlgebraElement::isometry(&n);
        let ss = AlgebraElement::convolution(&s.adjoint(), &s);
        let one = v(&[0, 0]);
        for x in sample_points(2) {
            assert_eq!(c.convolve_eval(&s.adjoint(), &s, &x, &one, &x).unwrap(), Scalar::one());
            for e in elements_from(a, &x, &v(&[1, 0]), &v(&[0, 1])).unwrap() {
                assert!(c.eval_at(&ss, &e).unwrap().is_zero());
            }
            let other = if x == pt("|0") { pt("|1") } else { pt("|0") };
            assert!(c.eval(&ss, &x, &one, &other).unwrap().is_zero());
        }
    }

    #[test]
    fn monomial_is_product_of_isometries() {
        let w = ledrappier();
        let c = Convolver::new(&w);
        let (n, m) = (v(&[1, 0]), v(&[1, 1]));
        let lhs = AlgebraElement::convolution(&AlgebraElement::isometry(&n), &AlgebraElement::isometry(&m).adjoint());
        let rhs = AlgebraElement::monomial(ObservableExpr::one(), n, m, ObservableExpr::one());
        assert!(c.rows_differ(&lhs, &rhs, &sample_points(3)).unwrap().is_none());
    }

    #[test]
    fn basic_identities() {
        for w in [shift(), ledrappier(), Cocycle::reciprocal()] {
            let c = Convolver::new(&w);
            let cfg = Sampling::new(2, 2);
            assert!(check_isometries(&c, cfg).unwrap().passed(), "{w}");
            assert!(check_semigroup(&c, cfg).unwrap().passed(), "{w}");
            assert!(check_range_projections(&c, cfg).unwrap().passed(), "{w}");
            for r in check_algebra_laws(&c, Sampling::new(2, 1)).unwrap() {
                assert!(r.passed(), "{w}: {r}");
            }
        }
    }

    #[test]
    fn projections_commute() {
        let w = ledrappier();
        let c = Convolver::new(&w);
        for r in check_projection_commutation(&c, &v(&[1, 0]), &v(&[0, 1]), Sampling::new(3, 1)).unwrap() {
            assert!(r.passed(), "{r}");
        }
        let circle = Cocycle::reciprocal();
        let cc = Convolver::new(&circle);
        let (two, three) = (LatticeElement::from_integer(2), LatticeElement::from_integer(3));
        for r in check_projection_commutation(&cc, &two, &three, Sampling::new(0, 1)).unwrap() {
            assert!(r.passed(), "{r}");
        }
        for r in check_projection_commutation(&c, &v(&[1, 1]), &v(&[1, 1]), Sampling::new(2, 1)).unwrap() {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn weight_identities_fail_without_coherence() {
        let ex = Action::pair(
            Endo::Shift,
            Endo::automaton(Dictionary::from_strs(3, &["000", "100", "010", "111"]).unwrap()).unwrap(),
        )
        .unwrap();
        let cand = Cocycle::product_candidate(ex).unwrap();
        let c = Convolver::new(&cand);
        let r = check_projection_commutation(&c, &v(&[1, 0]), &v(&[0, 1]), Sampling::new(3, 1)).unwrap();
        assert!(!r[1].passed() || !r[2].passed(), "{r:?}");
    }

    #[test]
    fn partial_representation_small() {
        let w = ledrappier();
        let c = Convolver::new(&w);
        for r in check_partial_representation(&c, Sampling::new(2, 1)).unwrap() {
            assert!(r.passed(), "{r}");
        }
        let s = AlgebraElement::sigma(&v(&[1, -1])).unwrap();
        let direct = AlgebraElement::convolution(
            &AlgebraElement::isometry(&v(&[0, 1])).adjoint(),
            &AlgebraElement::isometry(&v(&[1, 0])),
        );
        assert!(c.rows_differ(&s, &direct, &sample_points(3)).unwrap().is_none());
    }

    #[test]
    fn covariance_small() {
        for w in [shift(), ledrappier()] {
            let c = Convolver::new(&w);
            let r = check_covariance(&c, Sampling::new(2, 1)).unwrap();
            assert!(r.passed(), "{w}: {r}");
        }
        let w = shift();
        let c = Convolver::new(&w);
        let f = ObservableExpr::indicator(&[1]).unwrap();
        let s = AlgebraElement::isometry(&v(&[1]));
        let lhs = AlgebraElement::convolution(
            &s,
            &AlgebraElement::convolution(&AlgebraElement::pi(f.clone(), LatticeGroup::IntVector(1)), &s.adjoint()),
        );
        // Case 1: the value is f(θ_n(x)) times the S_n S_n* value.
        let p = AlgebraElement::range_projection(&v(&[1]));
        for x in sample_points(3) {
            for ((g, y), val) in c.row(&lhs, &x).unwrap().iter() {
                let fx = eval_expr(&f, &w, &w.action().apply(&v(&[1]), &x).unwrap()).unwrap();
                assert_eq!(*val, fx.try_mul(&c.eval(&p, &x, g, y).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn partitions_of_unity() {
        let w = shift();
        let c = Convolver::new(&w);
        let cells = partition_cells(&w, &v(&[1]), Sampling::new(3, 1)).unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[1].table(), &[Scalar::zero(), Scalar::sqrt(rational(2, 1)).unwrap()]);
        assert!(check_partition_of_unity(&c, &v(&[1]), Sampling::new(3, 1)).unwrap().passed());
        let l = ledrappier();
        let cl = Convolver::new(&l);
        assert_eq!(partition_cells(&l, &v(&[1, 1]), Sampling::new(3, 1)).unwrap().len(), 4);
        assert!(check_partition_of_unity(&cl, &v(&[1, 1]), Sampling::new(3, 1)).unwrap().passed());
        assert!(check_partition_of_unity(&cl, &v(&[2, 1]), Sampling::new(3, 1)).unwrap().passed());
    }
}
