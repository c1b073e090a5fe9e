//! Named, seeded law suites shared by the command line and the tests.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde_json::{json, Value};

use crate::basefields::{
    f_arith, FieldDescriptor, FieldOp, FunctionField, QuadraticField, RationalField, ValuedField,
};
use crate::error::{Error, Result};
use crate::krasner::{
    at_level, coset_eq, coset_mul, coset_neg, hyperadd, hypersum_contains, hypersum_value_set,
    iterated_contains, Level,
};
use crate::limit::{
    check_singlevalued, check_universal_property, limit_arith, limit_eq, to_approximation,
    CoherentElement, EmbeddingCone, FieldCone,
};
use crate::oag::{
    group_add, group_cmp, order_from_hyperadd, trop_hyperadd, trop_member, trop_translate,
    ExtendedValue, GroupElement, TropSet,
};
use crate::sampling::{rng, SampleField, SuiteRng};
use crate::tower::{
    check_hom_law, check_projection_containment, check_slice_triangles, cone_over_diagram, project,
    LawReport, LevelPair, QuotientHyperfield, TropicalHyperfield,
};

/// Everything that determines a suite's output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub height: u64,
    /// Digits, resp. levels, for the limit suites.
    pub precision: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 200,
            height: 50,
            precision: 16,
        }
    }
}

impl RunConfig {
    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "samples": self.samples,
            "height": self.height,
            "precision": self.precision,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lee,
    Tropical,
    Hom,
    Cone,
    Singlevalued,
    Universal,
    OracleRoundtrip,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Lee,
        Suite::Tropical,
        Suite::Hom,
        Suite::Cone,
        Suite::Singlevalued,
        Suite::Universal,
        Suite::OracleRoundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lee => "lee",
            Suite::Tropical => "tropical",
            Suite::Hom => "hom",
            Suite::Cone => "cone",
            Suite::Singlevalued => "singlevalued",
            Suite::Universal => "universal",
            Suite::OracleRoundtrip => "oracle-roundtrip",
        }
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
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidField(format!("unknown suite {s:?}")))
    }
}

/// One of the supported base fields, chosen at run time.
#[derive(Clone, Debug)]
pub enum AnyField {
    Rational(RationalField),
    Function(FunctionField),
    Quadratic(QuadraticField),
}

impl AnyField {
    pub fn new(kind: &str, p: u64) -> Result<Self> {
        Ok(match kind {
            "rational" => AnyField::Rational(RationalField::new(p)?),
            "function" => AnyField::Function(FunctionField::new(p)?),
            "quadratic" => AnyField::Quadratic(QuadraticField::new(p)?),
            other => return Err(Error::InvalidField(format!("unknown field kind {other:?}"))),
        })
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        match self {
            AnyField::Rational(f) => f.descriptor(),
            AnyField::Function(f) => f.descriptor(),
            AnyField::Quadratic(f) => f.descriptor(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub field: FieldDescriptor,
    pub config: RunConfig,
    pub reports: Vec<LawReport>,
}

impl SuiteOutcome {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "field": self.field.to_json(),
            "config": self.config.to_json(),
            "pass": self.pass(),
            "reports": self.reports.iter().map(LawReport::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn run_suite(suite: Suite, field: &AnyField, config: &RunConfig) -> Result<SuiteOutcome> {
    let reports = match field {
        AnyField::Rational(f) => {
            let mut reports = run_generic(suite, f, config)?;
            if suite == Suite::Universal && f.p() > 3 {
                reports.push(universal_embedding(f.p(), config)?);
            }
            reports
        }
        AnyField::Function(f) => run_generic(suite, f, config)?,
        AnyField::Quadratic(f) => run_generic(suite, f, config)?,
    };
    Ok(SuiteOutcome {
        suite,
        field: field.descriptor(),
        config: config.clone(),
        reports,
    })
}

fn run_generic<F: SampleField>(
    suite: Suite,
    field: &F,
    config: &RunConfig,
) -> Result<Vec<LawReport>> {
    let mut r = rng(config.seed);
    Ok(match suite {
        Suite::Lee => lee_suite(field, &mut r, config),
        Suite::Tropical => tropical_suite(&mut r, config),
        Suite::Hom => hom_suite(field, &mut r, config),
        Suite::Cone => cone_suite(field, &mut r, config),
        Suite::Singlevalued => vec![singlevalued_suite(field, &mut r, config)],
        Suite::Universal => vec![universal_field(field, &mut r, config)],
        Suite::OracleRoundtrip => oracle_suite(field, &mut r, config),
    })
}

const LEE_LEVELS: u32 = 3;

fn sample_pair<F: SampleField>(field: &F, r: &mut SuiteRng, height: u64) -> (F::Elem, F::Elem) {
    let x = field.sample_spread(r, height, 2);
    // occasionally force cancellation so sums with zero inside are covered
    let y = match r.gen_range(0..4) {
        0 => field.add(&field.neg(&x), &field.pow_uniformizer(r.gen_range(0..4))),
        _ => field.sample_spread(r, height, 2),
    };
    (x, y)
}

/// `v(x − y) > bound`, with `∞` above every bound.
fn close<F: ValuedField>(field: &F, x: &F::Elem, y: &F::Elem, bound: i64) -> bool {
    field.order(&field.sub(x, y)).is_none_or(|v| v > bound)
}

/// Lee's lemma on samples: equality of classes, the hypersum as a ball,
/// zero membership, value constancy off zero, reversibility, and partial
/// sums as members of iterated sums.
pub fn lee_suite<F: SampleField>(
    field: &F,
    r: &mut SuiteRng,
    config: &RunConfig,
) -> Vec<LawReport> {
    let mut equality = LawReport::new("lee/class-equality");
    let mut ball = LawReport::new("lee/ball-membership");
    let mut zero = LawReport::new("lee/zero-membership");
    let mut constancy = LawReport::new("lee/value-constancy");
    let mut reversibility = LawReport::new("lee/reversibility");
    let mut partial = LawReport::new("lee/partial-sums");
    let show = |x: &F::Elem| field.format_elem(x);

    for _ in 0..config.samples {
        let level = Level(r.gen_range(0..=LEE_LEVELS));
        let g = level.as_i64();
        let (x, y) = sample_pair(field, r, config.height);
        let (cx, cy) = (
            at_level(field, x.clone(), level),
            at_level(field, y.clone(), level),
        );
        let (vx, vy) = (
            field.order(&x).expect("nonzero"),
            field.order(&y).expect("nonzero"),
        );
        let m = vx.min(vy);
        let sum = field.add(&x, &y);
        let label = || format!("x = {}, y = {}, level {level}", show(&x), show(&y));

        let predicate = vx == vy && close(field, &x, &y, g + vx);
        equality.check_result(coset_eq(field, &cx, &cy).map(|e| e == predicate), label);

        let s = match hyperadd(field, &cx, &cy) {
            Ok(s) => s,
            Err(e) => {
                ball.check(false, || format!("{}: {e}", label()));
                continue;
            }
        };
        zero.check(
            s.contains_zero() == close(field, &sum, &field.zero(), g + m),
            label,
        );

        // candidates on both sides of the ball boundary
        let mut candidates = vec![field.zero(), x.clone(), y.clone()];
        for k in [m - 1, g + m, g + m + 1, g + m + 2] {
            let e = field.sample_integral(r, config.height);
            candidates.push(field.add(&sum, &field.mul(&field.pow_uniformizer(k), &e)));
        }
        candidates.push(field.sample_spread(r, config.height, 2));
        let values = hypersum_value_set(&s);
        for z in &candidates {
            let cz = at_level(field, z.clone(), level);
            let inside = close(field, z, &sum, g + m);
            let got = hypersum_contains(field, &s, &cz);
            ball.check_result(
                got.as_ref().map(|&b| b == inside).map_err(Clone::clone),
                || format!("z = {} for {}", show(z), label()),
            );
            if inside && !s.contains_zero() {
                constancy.check(
                    values.contains(&cz.value()) && cz.value() == s.center().value(),
                    || format!("member {} changes value for {}", show(z), label()),
                );
            }
            if let Ok(true) = got {
                let back = hyperadd(field, &cz, &coset_neg(field, &cy))
                    .and_then(|t| hypersum_contains(field, &t, &cx));
                reversibility.check_result(back, || format!("c = {} for {}", show(z), label()));
            }
        }

        let w = field.sample_integral(r, config.height);
        let summands = vec![cx.clone(), cy.clone(), at_level(field, w.clone(), level)];
        let total = at_level(field, field.add(&sum, &w), level);
        let member = iterated_contains(field, &summands, &total, 2).map(|m| m.is_member());
        partial.check_result(member, || format!("x + y + {} for {}", show(&w), label()));
    }
    [equality, ball, zero, constancy, reversibility, partial]
        .into_iter()
        .map(LawReport::finish)
        .collect()
}

fn sample_value(r: &mut SuiteRng, arity: usize, bound: i64) -> ExtendedValue {
    if r.gen_ratio(1, 20) {
        return ExtendedValue::Infinity;
    }
    let coords: Vec<i64> = (0..arity).map(|_| r.gen_range(-bound..=bound)).collect();
    ExtendedValue::Finite(GroupElement::from_ints(&coords).expect("arity ≥ 1"))
}

/// The tropical hyperfield over `ℤ` and `ℤ²` (lexicographic).
pub fn tropical_suite(r: &mut SuiteRng, config: &RunConfig) -> Vec<LawReport> {
    let mut order = LawReport::new("tropical/order-recovery");
    let mut neutral = LawReport::new("tropical/neutral");
    let mut commutative = LawReport::new("tropical/commutativity");
    let mut reversible = LawReport::new("tropical/reversibility");
    let mut distributive = LawReport::new("tropical/distributivity");
    let bound = config.height.clamp(1, 1 << 40) as i64;
    for arity in [1usize, 2] {
        let unit = ExtendedValue::Finite(GroupElement::zero(arity));
        for _ in 0..config.samples {
            // small coordinates make ties (and so intervals) common
            let small = r.gen_bool(0.5);
            let b = if small { 2 } else { bound };
            let (a, c, e) = (
                sample_value(r, arity, b),
                sample_value(r, arity, b),
                sample_value(r, arity, b),
            );
            let label = || format!("a = {a}, b = {c}, e = {e}");
            let le = group_cmp(&a, &c).map(|o| o != std::cmp::Ordering::Greater);
            order.check_result(
                order_from_hyperadd(&a, &c).and_then(|x| le.clone().map(|y| x == y)),
                label,
            );
            neutral.check_result(
                trop_hyperadd(&a, &ExtendedValue::Infinity)
                    .map(|s| s == TropSet::Singleton(a.clone()))
                    .and_then(|ok| group_add(&a, &unit).map(|u| ok && u == a)),
                label,
            );
            commutative.check_result(
                trop_hyperadd(&a, &c).and_then(|s| trop_hyperadd(&c, &a).map(|t| s == t)),
                label,
            );
            // every sampled member d of a ⊞ b gives a ∈ d ⊞ b
            let members = match trop_hyperadd(&a, &c) {
                Ok(TropSet::Singleton(v)) => vec![v],
                Ok(TropSet::UpInterval(lo)) => {
                    let lo = ExtendedValue::Finite(lo);
                    vec![
                        lo.clone(),
                        ExtendedValue::Infinity,
                        group_add(&lo, &sample_value(r, arity, 0)).unwrap_or(lo),
                    ]
                }
                Err(_) => Vec::new(),
            };
            for d in members {
                reversible.check_result(
                    trop_hyperadd(&d, &c).and_then(|s| trop_member(&a, &s)),
                    || format!("d = {d} for {}", label()),
                );
            }
            let lhs = trop_hyperadd(&a, &c).and_then(|s| trop_translate(&e, &s));
            let rhs = group_add(&e, &a)
                .and_then(|x| group_add(&e, &c).and_then(|y| trop_hyperadd(&x, &y)));
            distributive.check_result(lhs.and_then(|l| rhs.map(|r| l == r)), label);
        }
    }
    [order, neutral, commutative, reversible, distributive]
        .into_iter()
        .map(LawReport::finish)
        .collect()
}

/// Projections are hyperfield homomorphisms, and so is each `v_γ` into the
/// tropical hyperfield.
pub fn hom_suite<F: SampleField>(
    field: &F,
    r: &mut SuiteRng,
    config: &RunConfig,
) -> Vec<LawReport> {
    let mut out = Vec::new();
    let pairs: Vec<_> = (0..config.samples)
        .map(|_| sample_pair(field, r, config.height))
        .collect();
    let per_pair = pairs.len().div_ceil(4).max(1);
    for (i, (lower, upper)) in [(0, 0), (0, 2), (1, 3), (4, 4)].into_iter().enumerate() {
        let src = QuotientHyperfield::new(field.clone(), Level(upper));
        let dst = QuotientHyperfield::new(field.clone(), Level(lower));
        let samples: Vec<_> = pairs
            .iter()
            .skip(i * per_pair)
            .take(per_pair)
            .map(|(x, y)| (src.class(x.clone()), src.class(y.clone())))
            .collect();
        let mut rep = check_hom_law(&src, &dst, |c| project(field, c, Level(lower)), &samples);
        rep.law = format!("hom/rho_{{{upper},{lower}}}");
        out.push(rep);
        let mut val = check_hom_law(&src, &TropicalHyperfield, |c| Ok(c.value()), &samples);
        val.law = format!("hom/v_{upper}");
        out.push(val);
    }
    let mut well_defined = LawReport::new("hom/mul-well-defined");
    for (x, y) in pairs.iter().take(config.samples) {
        let level = Level(r.gen_range(0..=LEE_LEVELS));
        let shift = |z: &F::Elem, r: &mut SuiteRng| {
            let u = field.add(
                &field.one(),
                &field.mul(
                    &field.pow_uniformizer(level.as_i64() + 1),
                    &field.sample_integral(r, 5),
                ),
            );
            field.mul(z, &u)
        };
        let (x2, y2) = (shift(x, r), shift(y, r));
        let lhs = coset_mul(
            field,
            &at_level(field, x.clone(), level),
            &at_level(field, y.clone(), level),
        );
        let rhs = coset_mul(
            field,
            &at_level(field, x2, level),
            &at_level(field, y2, level),
        );
        well_defined.check_result(
            lhs.and_then(|l| rhs.and_then(|r| coset_eq(field, &l, &r))),
            || format!("x = {}, y = {}", field.format_elem(x), field.format_elem(y)),
        );
    }
    out.push(well_defined.finish());
    out
}

/// The tower itself: slice triangles, containment along projections, and
/// `K` as a cone.
pub fn cone_suite<F: SampleField>(
    field: &F,
    r: &mut SuiteRng,
    config: &RunConfig,
) -> Vec<LawReport> {
    let pairs = LevelPair::all_up_to(4);
    let xs: Vec<_> = (0..config.samples)
        .map(|_| field.sample_spread(r, config.height, 3))
        .collect();
    let mut with_zero = xs.clone();
    with_zero.push(field.zero());
    let ps: Vec<_> = (0..config.samples / 4 + 1)
        .map(|_| sample_pair(field, r, config.height))
        .collect();
    vec![
        check_slice_triangles(field, &pairs, &with_zero),
        check_projection_containment(field, &pairs, &ps),
        cone_over_diagram(field, |x, l| Ok(at_level(field, x.clone(), l)), &pairs, &xs),
    ]
}

fn perturbations<F: SampleField>(field: &F, r: &mut SuiteRng, height: u64) -> Vec<F::Elem> {
    let mut out = vec![field.zero(), field.one()];
    out.extend((0..3).map(|_| field.sample_integral(r, height)));
    out
}

pub fn singlevalued_suite<F: SampleField>(
    field: &F,
    r: &mut SuiteRng,
    config: &RunConfig,
) -> LawReport {
    let mut report = LawReport::new("singlevalued");
    let n = config.precision;
    let count = (config.samples / 10).max(1);
    for _ in 0..count {
        let (x, y) = sample_pair(field, r, config.height);
        let a = CoherentElement::from_field(field, x);
        let b = CoherentElement::from_field(field, y);
        let pert = perturbations(field, r, config.height);
        report = report.merge(check_singlevalued(&a, &b, n, &pert));
    }
    report.finish()
}

pub fn universal_field<F: SampleField>(
    field: &F,
    r: &mut SuiteRng,
    config: &RunConfig,
) -> LawReport {
    let count = (config.samples / 10).max(1);
    let samples: Vec<_> = (0..count)
        .map(|_| sample_pair(field, r, config.height))
        .collect();
    check_universal_property(&FieldCone::new(field.clone()), config.precision, &samples)
}

/// The Hensel cone `ℚ(α) → ℚ_p` over the tower of `ℚ`.
pub fn universal_embedding(p: u64, config: &RunConfig) -> Result<LawReport> {
    let cone = EmbeddingCone::new(p)?;
    let vertex = QuadraticField::new(p)?;
    let mut r = rng(config.seed ^ 0x5157);
    let count = (config.samples / 10).max(1);
    let samples: Vec<_> = (0..count)
        .map(|_| {
            (
                vertex.sample_nonzero(&mut r, config.height),
                vertex.sample_nonzero(&mut r, config.height),
            )
        })
        .collect();
    Ok(check_universal_property(&cone, config.precision, &samples))
}

/// Limit arithmetic against the digit oracle, and the round trip through
/// digits.
pub fn oracle_suite<F: SampleField>(
    field: &F,
    r: &mut SuiteRng,
    config: &RunConfig,
) -> Vec<LawReport> {
    let n = config.precision.max(1) as usize;
    let mut arith = LawReport::new("oracle/limit-arith");
    let mut roundtrip = LawReport::new("oracle/roundtrip");
    for _ in 0..config.samples {
        let (x, y) = (
            field.sample(r, config.height),
            field.sample(r, config.height),
        );
        let (a, b) = (
            CoherentElement::from_field(field, x.clone()),
            CoherentElement::from_field(field, y.clone()),
        );
        for op in [FieldOp::Add, FieldOp::Mul, FieldOp::Neg, FieldOp::Inv] {
            if op == FieldOp::Inv && field.is_zero(&x) {
                continue;
            }
            let rhs = op.is_binary().then_some(&b);
            let label = || {
                format!(
                    "{} {} {}",
                    op.name(),
                    field.format_elem(&x),
                    field.format_elem(&y)
                )
            };
            let ok = (|| {
                let exact = f_arith(field, op, &x, op.is_binary().then_some(&y))?;
                let (e, _) = limit_arith(op, &a, rhs)?;
                Ok(to_approximation(&e, n)? == field.expand(&exact, n)?)
            })();
            arith.check_result(ok, label);
        }
        let back = to_approximation(&a, n)
            .and_then(|d| CoherentElement::from_approximation(field, &d))
            .and_then(|e| limit_eq(&a, &e, n as u32))
            .map(|eq| eq.is_equal());
        roundtrip.check_result(back, || format!("x = {}", field.format_elem(&x)));
    }
    vec![arith.finish(), roundtrip.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            seed: 7,
            samples: 40,
            height: 30,
            precision: 8,
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn every_suite_passes_on_every_field() {
        let fields = [
            AnyField::new("rational", 5).unwrap(),
            AnyField::new("rational", 2).unwrap(),
            AnyField::new("function", 5).unwrap(),
            AnyField::new("quadratic", 5).unwrap(),
        ];
        for f in &fields {
            for s in Suite::ALL {
                let out = run_suite(s, f, &small()).unwrap();
                assert!(out.pass(), "{s} on {:?}: {}", f.descriptor(), out.to_json());
            }
        }
    }

    #[test]
    fn outcomes_are_deterministic() {
        let f = AnyField::new("rational", 3).unwrap();
        let a = run_suite(Suite::Lee, &f, &small()).unwrap().to_json();
        let b = run_suite(Suite::Lee, &f, &small()).unwrap().to_json();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
