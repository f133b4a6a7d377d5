//! Named verification suites: each bundles the checks for one part of the
//! theory, pairing every report with the identity it verifies.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::cocycle::{
    check_admissible_cocycle, check_coherence, check_cocycle_identity, check_normalized,
    check_relation_commutation_implication, check_star_invariance, Cocycle,
};
use crate::convolution::{
    check_algebra_laws, check_covariance, check_isometries, check_partial_representation,
    check_partition_of_unity, check_projection_commutation, check_range_projections,
    check_semigroup, Convolver,
};
use crate::dynamics::{
    all_progressive_dictionaries, check_ledrappier_conjugacy, check_relation_commutation,
    check_star_commuting, relation_compose_member, Action, Dictionary, Endo, Progressivity,
    MAX_CENSUS_WIDTH,
};
use crate::error::{Error, Result};
use crate::groupoid::{
    admissibility_witness, check_admissible_action, check_class_products, check_groupoid_axioms,
    check_poly_groupoid, check_preimage_intersection,
};
use crate::lattice::{
    check_completion_uniqueness, check_decompositions, check_mini_squares, integer_test_range,
    mini_square_from_pair, vector_test_range, LatticeElement, LatticeGroup,
};
use crate::operators::{
    check_e_commutation, check_interaction_axioms, check_poly_w, check_transfer_antimult,
    check_transfer_axiom, check_transfer_basics,
};
use crate::report::{Report, Sampling, Status};
use crate::scalar::check_scalar_laws;
use crate::space::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Scalar,
    Lattice,
    Cocycle,
    Operators,
    Groupoid,
    Convolution,
    Ledrappier,
    Circle,
    Counterexample,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Scalar,
        Suite::Lattice,
        Suite::Cocycle,
        Suite::Operators,
        Suite::Groupoid,
        Suite::Convolution,
        Suite::Ledrappier,
        Suite::Circle,
        Suite::Counterexample,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Scalar => "scalar",
            Suite::Lattice => "lattice",
            Suite::Cocycle => "cocycle",
            Suite::Operators => "operators",
            Suite::Groupoid => "groupoid",
            Suite::Convolution => "convolution",
            Suite::Ledrappier => "ledrappier",
            Suite::Circle => "circle",
            Suite::Counterexample => "counterexample",
        }
    }

    /// Suites that run on the action `(S, T_D)` of a user dictionary.
    pub fn accepts_dictionary(&self) -> bool {
        matches!(self, Suite::Cocycle | Suite::Groupoid | Suite::Counterexample)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteCheck {
    pub formula: String,
    pub report: Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRun {
    pub suite: Suite,
    pub config: Sampling,
    pub checks: Vec<SuiteCheck>,
    pub elapsed_ms: u64,
}

impl SuiteRun {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.report.passed())
    }
}

struct Checks(Vec<SuiteCheck>);

impl Checks {
    fn push(&mut self, formula: &str, report: Report) {
        self.0.push(SuiteCheck { formula: formula.to_string(), report });
    }

    fn push_all(&mut self, formulas: &[&str], reports: Vec<Report>) {
        for (f, r) in formulas.iter().zip(reports) {
            self.push(f, r);
        }
    }

    fn prefixed(&mut self, prefix: &str, formula: &str, mut report: Report) {
        report.check = format!("{prefix}: {}", report.check);
        self.push(formula, report);
    }
}

/// A negative control: passes when `report` found a violation, keeping the
/// violation as the witness.
pub fn expect_violation(check: &str, report: Report) -> Report {
    let mut out = Report { check: check.to_string(), ..report.clone() };
    if report.passed() {
        out.status = Status::Fail;
        out.witnesses = vec![format!("expected a violation of {}, none found", report.check)];
    } else {
        out.status = Status::Pass;
    }
    out
}

pub fn example_dictionary() -> Dictionary {
    Dictionary::from_strs(3, &["000", "100", "010", "111"]).expect("valid dictionary")
}

/// `(S, T_D)` after requiring `D` progressive.
pub fn dictionary_action(dict: &Dictionary) -> Result<Action> {
    if let Progressivity::Violation { prefix, completions } = dict.check_progressive() {
        return Err(Error::NonProgressive(crate::space::format_bits(&prefix), completions));
    }
    Action::pair(Endo::Shift, Endo::automaton(dict.clone())?)
}

pub fn shift_cocycle() -> Result<Cocycle> {
    Cocycle::iterate(Action::single(Endo::Shift))
}

pub fn ledrappier_cocycle() -> Result<Cocycle> {
    Cocycle::product(Action::ledrappier(), 3)
}

const NORMALIZED: &str = "sum over theta_n(y)=theta_n(x) of w(n,y) = 1, w >= 0";
const COCYCLE: &str = "w(nm,x) = w(n,x) w(m,theta_n(x))";
const COHERENCE: &str = "w(m,x) W_n(C^{m,n}_{x,z}) = w(n,x) W_m(C^{n,m}_{x,z})";
const ADMISSIBLE: [&str; 4] = [
    "w(s v t, z) = w(u, theta_s z) w(v, theta_t z)",
    "w(t, z) = w(u, theta_s z)",
    "w(s v t, z) = w(s, z) w(t, z)",
    "(ii) => (i), (ii) => (iii); all equivalent when w never vanishes",
];

fn cocycle_checks(out: &mut Checks, omega: &Cocycle, cfg: Sampling) -> Result<()> {
    let name = omega.name().to_string();
    out.prefixed(&name, NORMALIZED, check_normalized(omega, cfg)?);
    out.prefixed(&name, COCYCLE, check_cocycle_identity(omega, cfg)?);
    for (f, r) in ADMISSIBLE.iter().zip(check_admissible_cocycle(omega, cfg)?) {
        out.prefixed(&name, f, r);
    }
    out.prefixed(&name, COHERENCE, check_coherence(omega, cfg)?);
    Ok(())
}

fn scalar_suite(out: &mut Checks) -> Result<()> {
    out.push_all(
        &["a+b = b+a, ab = ba, (ab)c = a(bc), a(b+c) = ab+ac", "sqrt(a) sqrt(b) = sqrt(ab), r^(-1/2) sqrt(r) = 1"],
        check_scalar_laws()?,
    );
    Ok(())
}

fn lattice_suite(out: &mut Checks) -> Result<()> {
    let vs = vector_test_range();
    let ints = integer_test_range();
    let squares = "s v t = su = tv, s ^ t = 1, u^-1 v v^-1 = 1";
    out.prefixed("Z^2 in [-3,3]", squares, check_mini_squares(&vs)?);
    out.prefixed("integers <= 30", squares, check_mini_squares(&ints)?);
    let unique = "(s,t) coprime has exactly one mini-square completion (u,v)";
    out.prefixed("Z^2", unique, check_completion_uniqueness(&vs, &LatticeGroup::IntVector(2).positive_box(6))?);
    out.prefixed("integers <= 30", unique, check_completion_uniqueness(&ints, &ints)?);
    let dec = "g = a^-1 b = n m^-1 with a ^ b = 1 = n ^ m";
    out.prefixed("Z^2 in [-3,3]", dec, check_decompositions(&vs)?);
    out.prefixed("a/b with a,b <= 30", dec, check_decompositions(&LatticeGroup::PositiveRationals.group_box(30))?);
    Ok(())
}

fn cocycle_suite(out: &mut Checks, cfg: Sampling, dict: Option<&Dictionary>) -> Result<()> {
    if let Some(d) = dict {
        let omega = Cocycle::product_candidate(dictionary_action(d)?)?;
        cocycle_checks(out, &omega, cfg)?;
        out.push("w_S(a,x) = w_S(a,Tx), w_T(b,x) = w_T(b,Sx)", check_star_invariance(&omega, cfg)?);
        out.push(
            "R_S R_T != R_T R_S => no never-vanishing coherent cocycle",
            check_relation_commutation_implication(omega.action(), &[omega.clone()], cfg)?,
        );
        return Ok(());
    }
    cocycle_checks(out, &shift_cocycle()?, cfg)?;
    let led = ledrappier_cocycle()?;
    cocycle_checks(out, &led, cfg)?;
    out.push("w_S(a,x) = w_S(a,Tx), w_T(b,x) = w_T(b,Sx)", check_star_invariance(&led, cfg)?);
    let perturbed = Cocycle::perturbed_shift();
    out.push(
        NORMALIZED,
        expect_violation("perturbed cocycle rejected by normalization", check_normalized(&perturbed, cfg)?),
    );
    let candidate = Cocycle::product_candidate(dictionary_action(&example_dictionary())?)?;
    out.push(
        COHERENCE,
        expect_violation("product candidate on the counter-example rejected by coherence", check_coherence(&candidate, cfg)?),
    );
    Ok(())
}

const TRANSFER: [&str; 2] = ["L_n(f alpha_n(g)) = L_n(f) g", "L_{nm} = L_m L_n"];
const BASICS: [&str; 4] = [
    "L_n(1) = 1",
    "f >= 0 => L_n(f) >= 0",
    "L_n alpha_n = id",
    "E_n E_n = E_n, E_n alpha_n = alpha_n",
];
const INTERACTION: [&str; 6] = [
    "V_1 = id",
    "V_g V_h V_{h^-1} = V_{gh} V_{h^-1}",
    "V_{g^-1} V_g V_h = V_{g^-1} V_{gh}",
    "V_g(a b) = V_g(a) V_g(b) for b in the range of V_{g^-1}",
    "V_n = alpha_n, V_{n^-1} = L_n",
    "L_{np} alpha_{mp} = L_n alpha_m",
];
const E_COMMUTATION: [&str; 3] = [
    "kernel identity for E_n E_m = E_m E_n",
    "E_n E_m f = E_m E_n f",
    "kernel identity <=> operator identity",
];

/// Largest box for the interaction axioms on two generators: products
/// `gh` beyond it need tables deeper than the depth cap.
pub const PAIR_INTERACTION_BOX: u32 = 2;

fn operator_checks(out: &mut Checks, omega: &Cocycle, cfg: Sampling) -> Result<()> {
    let name = omega.name().to_string();
    out.prefixed(&name, TRANSFER[0], check_transfer_axiom(omega, cfg)?);
    out.prefixed(&name, TRANSFER[1], check_transfer_antimult(omega, cfg)?);
    for (f, r) in BASICS.iter().zip(check_transfer_basics(omega, cfg)?) {
        out.prefixed(&name, f, r);
    }
    let (inter, label) = match omega.action() {
        Action::Pair(..) if cfg.bound > PAIR_INTERACTION_BOX => (
            Sampling::new(cfg.depth, PAIR_INTERACTION_BOX),
            format!("{name} (box {PAIR_INTERACTION_BOX})"),
        ),
        _ => (cfg, name),
    };
    for (f, r) in INTERACTION.iter().zip(check_interaction_axioms(omega, inter)?) {
        out.prefixed(&label, f, r);
    }
    Ok(())
}

fn e_commutation_checks(out: &mut Checks, omega: &Cocycle, pairs: &[(LatticeElement, LatticeElement)], cfg: Sampling) -> Result<()> {
    for (n, m) in pairs {
        for (f, r) in E_COMMUTATION.iter().zip(check_e_commutation(omega, n, m, cfg)?) {
            out.push(f, r);
        }
    }
    Ok(())
}

fn generator_pairs() -> Vec<(LatticeElement, LatticeElement)> {
    let v = LatticeElement::vector;
    vec![(v(&[1, 0]), v(&[0, 1])), (v(&[1, 1]), v(&[2, 0]))]
}

fn operators_suite(out: &mut Checks, cfg: Sampling) -> Result<()> {
    operator_checks(out, &shift_cocycle()?, cfg)?;
    let led = ledrappier_cocycle()?;
    operator_checks(out, &led, cfg)?;
    e_commutation_checks(out, &led, &generator_pairs(), cfg)?;
    out.push("W_k = V_(k,-k)", check_poly_w(&led, cfg)?);
    Ok(())
}

const GROUPOID_AXIOMS: &str = "(x,g,y)(y,h,z) = (x,gh,z) with witness (nu, qv), nu (qv)^-1 = gh";
const POLY: [&str; 4] = [
    "d(e1 e2) = d(e1) + d(e2)",
    "d(phi(x,k,y)) = 0",
    "(x,k,y)(y,-k,x) = (x,0,x)",
    "every kernel element of d lifts to H",
];

fn groupoid_checks(out: &mut Checks, action: &Action, cfg: Sampling) -> Result<()> {
    let name = action.to_string();
    out.prefixed(&name, GROUPOID_AXIOMS, check_groupoid_axioms(action, cfg)?);
    out.prefixed(
        &name,
        "theta_m^-1(p) ^ theta_n^-1(q) = theta_{m^n}^-1(w)",
        check_preimage_intersection(action, cfg)?,
    );
    out.prefixed(&name, "theta_u(x) = theta_v(y) => unique z, theta_s z = x, theta_t z = y", check_admissible_action(action, cfg)?);
    out.prefixed(&name, "phi(z) = (theta_s z, theta_t z) is a bijection C^{s v t} -> C^u x C^v", check_class_products(action, cfg)?);
    Ok(())
}

fn groupoid_suite(out: &mut Checks, cfg: Sampling, dict: Option<&Dictionary>) -> Result<()> {
    let action = match dict {
        Some(d) => dictionary_action(d)?,
        None => {
            let shift = Action::single(Endo::Shift);
            out.prefixed(&shift.to_string(), GROUPOID_AXIOMS, check_groupoid_axioms(&shift, cfg)?);
            Action::ledrappier()
        }
    };
    groupoid_checks(out, &action, cfg)?;
    for (f, r) in POLY.iter().zip(check_poly_groupoid(&action, cfg)?) {
        out.push(f, r);
    }
    Ok(())
}

/// The convolution identities on one cocycle; `projection_pairs` feeds the
/// projection-commutation check and `partitions` the partition of unity.
pub fn convolution_checks(
    out_reports: &mut Vec<(String, Report)>,
    omega: &Cocycle,
    cfg: Sampling,
    projection_pairs: &[(LatticeElement, LatticeElement)],
    partitions: &[LatticeElement],
) -> Result<()> {
    let conv = Convolver::new(omega);
    let mut push = |f: &str, r: Report| out_reports.push((f.to_string(), r));
    push("S_n* S_n = 1", check_isometries(&conv, cfg)?);
    push("S_n S_m = S_{nm}", check_semigroup(&conv, cfg)?);
    push("S_n S_n*(x,g,y) = w(n,x)^1/2 w(n,y)^1/2 [g=1][theta_n x = theta_n y]", check_range_projections(&conv, cfg)?);
    for (n, m) in projection_pairs {
        let fs = [
            "S_m S_m* S_n S_n* = S_n S_n* S_m S_m*",
            "W_m(C^{n,m}_{x,x}) W_n(C^{m,n}_{x,z}) symmetric in (n,m)",
            "sum over C^{m,n}_{x,z} of w(m,y)^1/2 w(n,y)^1/2 w(m,x)^1/2 w(n,z)^1/2 symmetric in (n,m)",
        ];
        for (f, r) in fs.iter().zip(check_projection_commutation(&conv, n, m, cfg)?) {
            push(f, r);
        }
    }
    let fs = [
        "sigma_{n^-1 m} = S_n* S_m independent of (n,m), sigma_{g^-1} = sigma_g*",
        "sigma_g sigma_{g^-1} sigma_g = sigma_g",
        "sigma_g sigma_h sigma_{h^-1} = sigma_{gh} sigma_{h^-1}",
    ];
    for (f, r) in fs.iter().zip(check_partial_representation(&conv, cfg)?) {
        push(f, r);
    }
    push("sigma_g pi(f) sigma_{g^-1} = pi(V_g f) sigma_g sigma_{g^-1}", check_covariance(&conv, cfg)?);
    for n in partitions {
        push("sum_i pi(u_i) S_n S_n* pi(u_i) = 1", check_partition_of_unity(&conv, n, cfg)?);
    }
    let fs = ["(a*)* = a", "(a b)* = b* a*", "(a b) c = a (b c)", "(a b)(x,g,y) = sum a(x,h,z) b(z,h^-1 g,y)"];
    let laws = check_algebra_laws(&conv, Sampling::new(cfg.depth, cfg.bound.min(1)))?;
    for (f, r) in fs.iter().zip(laws) {
        push(f, r);
    }
    Ok(())
}

fn convolution_suite(out: &mut Checks, cfg: Sampling) -> Result<()> {
    let v = LatticeElement::vector;
    let mut reports = Vec::new();
    convolution_checks(
        &mut reports,
        &ledrappier_cocycle()?,
        cfg,
        &[(v(&[1, 0]), v(&[0, 1])), (v(&[1, 1]), v(&[1, 0]))],
        &[v(&[1, 0]), v(&[0, 1]), v(&[1, 1])],
    )?;
    for (f, r) in reports {
        out.push(&f, r);
    }
    Ok(())
}

fn ledrappier_suite(out: &mut Checks, cfg: Sampling) -> Result<()> {
    let (s, t) = (Endo::Shift, Endo::ledrappier_t());
    let star = check_star_commuting(&s, &t, cfg.depth)?;
    out.push(
        "T(x) = S(y) => unique z with S(z) = x, T(z) = y",
        Report::from_witness("(S, T) star-commuting", star.pairs, star.witness.map(|w| w.to_string())),
    );
    let rel = check_relation_commutation(&s, &t, cfg.depth)?;
    let n = crate::space::sample_points(cfg.depth).len();
    out.push("R_S R_T = R_T R_S", Report::from_witness("kernel relations commute", n * n, rel.map(|w| w.to_string())));
    out.push("rows of the three-dot array: H <-> S, V <-> T", check_ledrappier_conjugacy(cfg.depth)?);
    let action = Action::ledrappier();
    out.push("theta_u(x) = theta_v(y) => unique z, theta_s z = x, theta_t z = y", check_admissible_action(&action, cfg)?);
    let led = ledrappier_cocycle()?;
    out.push(COHERENCE, check_coherence(&led, cfg)?);
    out.push("w_S(a,x) = w_S(a,Tx), w_T(b,x) = w_T(b,Sx)", check_star_invariance(&led, cfg)?);
    e_commutation_checks(out, &led, &generator_pairs()[..1], cfg)?;
    out.push("W_k = V_(k,-k)", check_poly_w(&led, cfg)?);
    Ok(())
}

/// Mini-squares whose admissibility is the unique interpolation of an
/// `n`-th and an `m`-th root for coprime `n, m`.
pub fn circle_root_squares() -> Vec<(u64, u64)> {
    vec![(2, 3), (3, 5), (4, 9)]
}

pub fn check_circle_roots(cfg: Sampling) -> Result<Report> {
    let action = Action::circle();
    let squares = circle_root_squares()
        .into_iter()
        .map(|(n, m)| mini_square_from_pair(&LatticeElement::from_integer(n), &LatticeElement::from_integer(m)))
        .collect::<Result<Vec<_>>>()?;
    let xs = action.samples(cfg.depth);
    let witness = admissibility_witness(&action, &squares, &xs)?;
    Ok(Report::from_witness("circle root interpolation", squares.len() * xs.len(), witness))
}

fn circle_suite(out: &mut Checks, cfg: Sampling) -> Result<()> {
    let omega = Cocycle::reciprocal();
    out.push(NORMALIZED, check_normalized(&omega, cfg)?);
    out.push(COCYCLE, check_cocycle_identity(&omega, cfg)?);
    out.push(COHERENCE, check_coherence(&omega, cfg)?);
    out.push("x^n = y^m (n,m coprime) => unique z with z^m = x, z^n = y", check_circle_roots(cfg)?);
    out.push(TRANSFER[0], check_transfer_axiom(&omega, cfg)?);
    out.push(TRANSFER[1], check_transfer_antimult(&omega, cfg)?);
    let small = Sampling::new(cfg.depth, cfg.bound.min(3));
    for (f, r) in INTERACTION.iter().zip(check_interaction_axioms(&omega, small)?) {
        out.push(f, r);
    }
    let conv = Convolver::new(&omega);
    let (two, three) = (LatticeElement::from_integer(2), LatticeElement::from_integer(3));
    let fs = [
        "S_m S_m* S_n S_n* = S_n S_n* S_m S_m*",
        "W_m(C^{n,m}_{x,x}) W_n(C^{m,n}_{x,z}) symmetric in (n,m)",
        "root sum symmetric in (n,m)",
    ];
    for (f, r) in fs.iter().zip(check_projection_commutation(&conv, &two, &three, cfg)?) {
        out.push(f, r);
    }
    Ok(())
}

/// `(x, z) ∈ R_A∘R_B` via the recorded `y`, and every candidate for
/// `R_B∘R_A` rejected.
pub fn check_relation_pair(a: &Endo, b: &Endo, x: &Point, z: &Point) -> Result<Report> {
    let ab = relation_compose_member(a, b, x, z)?;
    let ba = relation_compose_member(b, a, x, z)?;
    let check = format!("({x}, {z}) in R_{a} R_{b} but not R_{b} R_{a}");
    let rejected: Vec<String> = ba.candidates.iter().map(|(y, _)| y.to_string()).collect();
    Ok(match (ab.witness(), ba.member) {
        (Some(y), false) => {
            let mut r = Report::pass(check, ab.candidates.len() + ba.candidates.len());
            r.witnesses.push(format!("({x}, {z}) via y={y}; candidates {} all rejected", rejected.join(", ")));
            r
        }
        _ => Report::fail(check, 1, format!("membership {} / {}", ab.member, ba.member)),
    })
}

fn counterexample_suite(out: &mut Checks, cfg: Sampling, dict: Option<&Dictionary>) -> Result<()> {
    let d = dict.cloned().unwrap_or_else(example_dictionary);
    let action = dictionary_action(&d)?;
    let Action::Pair(s, t) = &action else { unreachable!() };
    if dict.is_none() {
        out.push(
            "S(x) = S(y), T(y) = T(z) but no y' with T(x) = T(y'), S(y') = S(z)",
            check_relation_pair(s, t, &"0|1".parse()?, &"|0".parse()?)?,
        );
    }
    let rel = check_relation_commutation(s, t, cfg.depth)?;
    let n = crate::space::sample_points(cfg.depth).len();
    out.push(
        "R_S R_T != R_T R_S",
        expect_violation(
            "kernel relations do not commute",
            Report::from_witness("relations", n * n, rel.map(|w| w.to_string())),
        ),
    );
    let star = check_star_commuting(s, t, cfg.depth)?;
    out.push(
        "some T(x) = S(y) has no unique common lift",
        expect_violation(
            "(S, T_D) not star-commuting",
            Report::from_witness("star", star.pairs, star.witness.map(|w| w.to_string())),
        ),
    );
    out.push(
        "some mini-square pair has no unique common lift",
        expect_violation("action not admissible", check_admissible_action(&action, Sampling::new(cfg.depth, cfg.bound.min(1)))?),
    );
    let candidate = Cocycle::product_candidate(action.clone())?;
    out.push(COHERENCE, expect_violation("product candidate incoherent", check_coherence(&candidate, cfg)?));
    out.push(
        "R_S R_T != R_T R_S => no never-vanishing coherent cocycle",
        check_relation_commutation_implication(&action, &[candidate], cfg)?,
    );
    Ok(())
}

pub fn run_suite(suite: Suite, cfg: Sampling, dict: Option<&Dictionary>) -> Result<SuiteRun> {
    if cfg.depth == 0 || cfg.bound == 0 {
        return Err(Error::Precondition("depth and box must be at least 1".into()));
    }
    if dict.is_some() && !suite.accepts_dictionary() {
        return Err(Error::Precondition(format!("suite {suite} does not take a dictionary")));
    }
    let start = Instant::now();
    let mut out = Checks(Vec::new());
    match suite {
        Suite::Scalar => scalar_suite(&mut out)?,
        Suite::Lattice => lattice_suite(&mut out)?,
        Suite::Cocycle => cocycle_suite(&mut out, cfg, dict)?,
        Suite::Operators => operators_suite(&mut out, cfg)?,
        Suite::Groupoid => groupoid_suite(&mut out, cfg, dict)?,
        Suite::Convolution => convolution_suite(&mut out, cfg)?,
        Suite::Ledrappier => ledrappier_suite(&mut out, cfg)?,
        Suite::Circle => circle_suite(&mut out, cfg)?,
        Suite::Counterexample => counterexample_suite(&mut out, cfg, dict)?,
    }
    Ok(SuiteRun { suite, config: cfg, checks: out.0, elapsed_ms: start.elapsed().as_millis() as u64 })
}

#[derive(Clone, Debug, Serialize)]
pub struct DictionaryStatus {
    pub dictionary: String,
    pub relations_commute: bool,
    pub relation_witness: Option<String>,
    pub star_commuting: bool,
    pub star_witness: Option<String>,
}

/// Every progressive dictionary of the given width, with the relation- and
/// star-commutation status of `(S, T_D)` at the given depth.
pub fn search_dictionaries(width: usize, depth: usize) -> Result<Vec<DictionaryStatus>> {
    if width == 0 || width > MAX_CENSUS_WIDTH {
        return Err(Error::WidthOutOfRange(width));
    }
    all_progressive_dictionaries(width)?
        .into_iter()
        .map(|d| {
            let t = Endo::automaton(d.clone())?;
            let rel = check_relation_commutation(&Endo::Shift, &t, depth)?;
            let star = check_star_commuting(&Endo::Shift, &t, depth)?;
            Ok(DictionaryStatus {
                dictionary: d.to_string(),
                relations_commute: rel.is_none(),
                relation_witness: rel.map(|w| w.to_string()),
                star_commuting: star.holds,
                star_witness: star.witness.map(|w| w.to_string()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn negative_control_inverts() {
        assert!(!expect_violation("x", Report::pass("y", 1)).passed());
        let r = expect_violation("x", Report::fail("y", 1, "w"));
        assert!(r.passed());
        assert_eq!(r.witnesses, vec!["w".to_string()]);
    }

    #[test]
    fn census_counts() {
        let three = search_dictionaries(3, 3).unwrap();
        assert_eq!(three.len(), 16);
        let ex = three.iter().find(|s| s.dictionary == example_dictionary().to_string()).unwrap();
        assert!(!ex.relations_commute && !ex.star_commuting);
        let two = search_dictionaries(2, 3).unwrap();
        assert_eq!(two.len(), 4);
        assert!(two.iter().find(|s| s.dictionary == "{01,10}").unwrap().star_commuting);
        assert_eq!(search_dictionaries(1, 3).unwrap().len(), 2);
        assert!(search_dictionaries(6, 3).is_err());
    }

    #[test]
    fn counterexample_pair() {
        let d = example_dictionary();
        let t = Endo::automaton(d).unwrap();
        let r = check_relation_pair(&Endo::Shift, &t, &"0|1".parse().unwrap(), &"|0".parse().unwrap()).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.witnesses[0].contains("y=|1"));
    }

    #[test]
    fn small_suites_pass() {
        let cfg = Sampling::new(2, 1);
        for s in [Suite::Scalar, Suite::Counterexample, Suite::Groupoid, Suite::Ledrappier] {
            let run = run_suite(s, cfg, None).unwrap();
            for c in &run.checks {
                assert!(c.report.passed(), "{s}: {}", c.report);
            }
        }
        let bad = Dictionary::from_strs(2, &["00", "01"]).unwrap();
        assert!(run_suite(Suite::Cocycle, cfg, Some(&bad)).is_err());
        assert!(run_suite(Suite::Scalar, cfg, Some(&example_dictionary())).is_err());
    }
}
