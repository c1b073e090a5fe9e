//! The limit of the tower. Elements are coherent families of cosets over
//! the schedule `γ_ν = ν`, generated lazily and memoized; together they
//! realise the completion of the base field.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::basefields::{
    Approximation, FieldOp, QuadElem, QuadraticField, RationalField, ValuedField,
};
use crate::error::{Error, Result};
use crate::krasner::{at_level, coset_eq, hyperadd, hypersum_contains, GammaCoset, Level};
use crate::oag::ExtendedValue;
use crate::tower::{cone_over_diagram, project, LawReport, LevelPair};

pub const DEFAULT_ZERO_PROBE_BOUND: u32 = 64;

type Generator<F> = dyn Fn(Level) -> Result<<F as ValuedField>::Elem> + Send + Sync;

/// One cancellation event: an addition whose result valuation exceeded the
/// smaller input valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LossTerm {
    pub op: String,
    pub min_valuation: Option<i64>,
    pub result_valuation: Option<i64>,
    /// Levels of precision consumed.
    pub loss: u32,
    /// Input level at which the result valuation was found by probing.
    pub discovered_at: Option<u32>,
}

impl LossTerm {
    pub fn to_json(&self) -> Value {
        json!({
            "op": self.op,
            "min_valuation": ExtendedValue::from_order(self.min_valuation).to_json(),
            "result_valuation": ExtendedValue::from_order(self.result_valuation).to_json(),
            "loss": self.loss,
            "discovered_at": self.discovered_at,
        })
    }
}

/// Precision bookkeeping. Inputs known to level `L` deliver the result to
/// level `L − Σ loss`; the generators compensate by querying their inputs
/// that much higher.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecisionLedger {
    pub losses: Vec<LossTerm>,
}

impl PrecisionLedger {
    pub fn total_loss(&self) -> u64 {
        self.losses.iter().map(|t| t.loss as u64).sum()
    }

    pub fn delivered(&self, requested: u32) -> Option<u32> {
        (requested as u64)
            .checked_sub(self.total_loss())
            .map(|d| d as u32)
    }

    pub fn input_level_for(&self, output: u32) -> u64 {
        output as u64 + self.total_loss()
    }

    pub fn compose(&self, other: &PrecisionLedger) -> PrecisionLedger {
        let mut losses = self.losses.clone();
        losses.extend(other.losses.iter().cloned());
        PrecisionLedger { losses }
    }

    pub fn to_json(&self, requested: u32) -> Value {
        json!({
            "requested": requested,
            "delivered": self.delivered(requested),
            "losses": self.losses.iter().map(LossTerm::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ZeroStatus {
    Nonzero,
    /// Known to be exactly zero.
    Certified,
    /// No nonzero digit within the probe bound.
    Apparent,
    Undetermined,
}

struct Inner<F: ValuedField> {
    field: F,
    generator: Box<Generator<F>>,
    memo: Mutex<BTreeMap<u32, GammaCoset<F>>>,
    known_valuation: Option<ExtendedValue>,
    zero: ZeroStatus,
    exact: Option<F::Elem>,
    ledger: PrecisionLedger,
    provenance: Value,
    zero_probe_bound: u32,
}

/// An element of the completion, as a compatible family of cosets.
pub struct CoherentElement<F: ValuedField> {
    inner: Arc<Inner<F>>,
}

impl<F: ValuedField> Clone for CoherentElement<F> {
    fn clone(&self) -> Self {
        Self {
            inner: Arc::clone(&self.inner),
        }
    }
}

impl<F: ValuedField> fmt::Debug for CoherentElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoherentElement")
            .field("provenance", &self.inner.provenance)
            .field("valuation", &self.inner.known_valuation)
            .finish()
    }
}

struct Parts<F: ValuedField> {
    known_valuation: Option<ExtendedValue>,
    zero: ZeroStatus,
    exact: Option<F::Elem>,
    ledger: PrecisionLedger,
    provenance: Value,
}

impl<F: ValuedField> CoherentElement<F> {
    fn build(field: &F, parts: Parts<F>, generator: Box<Generator<F>>) -> Self {
        Self {
            inner: Arc::new(Inner {
                field: field.clone(),
                generator,
                memo: Mutex::new(BTreeMap::new()),
                known_valuation: parts.known_valuation,
                zero: parts.zero,
                exact: parts.exact,
                ledger: parts.ledger,
                provenance: parts.provenance,
                zero_probe_bound: DEFAULT_ZERO_PROBE_BOUND,
            }),
        }
    }

    /// The image of `x` under the cone `K → K^c`.
    pub fn from_field(field: &F, x: F::Elem) -> Self {
        let v = field.valuation(&x);
        let zero = if v.is_infinite() {
            ZeroStatus::Certified
        } else {
            ZeroStatus::Nonzero
        };
        let parts = Parts {
            known_valuation: Some(v),
            zero,
            exact: Some(x.clone()),
            ledger: PrecisionLedger::default(),
            provenance: json!({"kind": "from_field", "value": field.elem_to_json(&x)}),
        };
        Self::build(field, parts, Box::new(move |_| Ok(x.clone())))
    }

    /// A family given by one representative per level. Compatibility and
    /// value constancy are checked as levels materialize.
    pub fn from_levels<G>(field: &F, provenance: Value, generator: G) -> Self
    where
        G: Fn(Level) -> Result<F::Elem> + Send + Sync + 'static,
    {
        let parts = Parts {
            known_valuation: None,
            zero: ZeroStatus::Undetermined,
            exact: None,
            ledger: PrecisionLedger::default(),
            provenance,
        };
        Self::build(field, parts, Box::new(generator))
    }

    /// The limit of `seq`, given `v(seq(L) − lim) > L + m` for every `L`.
    ///
    /// The valuation of the limit is found by probing for the first `L` with
    /// `v(seq(L)) ≤ L + m`; past the probe bound the limit is an apparent zero.
    pub fn from_cauchy<G>(field: &F, m: i64, provenance: Value, seq: G) -> Result<Self>
    where
        G: Fn(u32) -> Result<F::Elem> + Send + Sync + 'static,
    {
        let (elem, _) = Self::from_cauchy_inner(
            field,
            m,
            provenance,
            None,
            PrecisionLedger::default(),
            "cauchy",
            seq,
        )?;
        Ok(elem)
    }

    fn from_cauchy_inner<G>(
        field: &F,
        m: i64,
        provenance: Value,
        exact: Option<F::Elem>,
        inherited: PrecisionLedger,
        op: &str,
        seq: G,
    ) -> Result<(Self, LossTerm)>
    where
        G: Fn(u32) -> Result<F::Elem> + Send + Sync + 'static,
    {
        let bound = DEFAULT_ZERO_PROBE_BOUND;
        let mut found = None;
        for l in 0..=bound {
            if let Some(w) = field.order(&seq(l)?) {
                if w <= l as i64 + m {
                    found = Some((w, Some(l)));
                    break;
                }
            }
        }
        if found.is_none() {
            if let Some(w) = exact.as_ref().and_then(|x| field.order(x)) {
                found = Some((w, None));
            }
        }
        let mut ledger = inherited;
        let Some((w, discovered_at)) = found else {
            let certified = exact.as_ref().is_some_and(|x| field.is_zero(x));
            let term = LossTerm {
                op: op.to_string(),
                min_valuation: Some(m),
                result_valuation: None,
                loss: bound,
                discovered_at: None,
            };
            ledger.losses.push(term.clone());
            let parts = Parts {
                known_valuation: Some(ExtendedValue::Infinity),
                zero: if certified {
                    ZeroStatus::Certified
                } else {
                    ZeroStatus::Apparent
                },
                exact,
                ledger,
                provenance,
            };
            let zero = field.zero();
            return Ok((
                Self::build(field, parts, Box::new(move |_| Ok(zero.clone()))),
                term,
            ));
        };
        let loss = (w - m).max(0);
        let term = LossTerm {
            op: op.to_string(),
            min_valuation: Some(m),
            result_valuation: Some(w),
            loss: loss as u32,
            discovered_at,
        };
        ledger.losses.push(term.clone());
        let parts = Parts {
            known_valuation: Some(ExtendedValue::int(w)),
            zero: ZeroStatus::Nonzero,
            exact,
            ledger,
            provenance,
        };
        let generator = move |g: Level| seq((g.as_i64() + loss).max(0) as u32);
        Ok((Self::build(field, parts, Box::new(generator)), term))
    }

    /// `Σ dᵢ π^(shift+i)` as an element of `K`.
    pub fn from_approximation(field: &F, approx: &Approximation) -> Result<Self> {
        if approx.p != field.prime() {
            return Err(Error::DescriptorMismatch(
                format!("digits in base {}", approx.p),
                format!("{}/{}", field.descriptor().kind(), field.prime()),
            ));
        }
        Ok(Self::from_field(field, field.resum(approx)))
    }

    pub fn field(&self) -> &F {
        &self.inner.field
    }

    pub fn ledger(&self) -> &PrecisionLedger {
        &self.inner.ledger
    }

    pub fn provenance(&self) -> &Value {
        &self.inner.provenance
    }

    pub fn zero_probe_bound(&self) -> u32 {
        self.inner.zero_probe_bound
    }

    /// The exact field element, when the element was built from one.
    pub fn exact(&self) -> Option<&F::Elem> {
        self.inner.exact.as_ref()
    }

    pub fn is_certified_zero(&self) -> bool {
        self.inner.zero == ZeroStatus::Certified
    }

    pub fn is_apparent_zero(&self) -> bool {
        self.inner.zero == ZeroStatus::Apparent
    }

    /// The coset at `level`; computed once, then served from the memo.
    pub fn at(&self, level: Level) -> Result<GammaCoset<F>> {
        let mut memo = self.inner.memo.lock().expect("memo lock poisoned");
        if let Some(c) = memo.get(&level.0) {
            return Ok(c.clone());
        }
        let rep = (self.inner.generator)(level)?;
        let c = at_level(&self.inner.field, rep, level);
        self.verify(&memo, &c)?;
        memo.insert(level.0, c.clone());
        Ok(c)
    }

    fn verify(&self, memo: &BTreeMap<u32, GammaCoset<F>>, c: &GammaCoset<F>) -> Result<()> {
        let field = &self.inner.field;
        let level = c.level();
        let violation = |reason: String| Error::ContractViolation {
            level: level.0,
            reason,
        };
        let expected = self
            .inner
            .known_valuation
            .clone()
            .or_else(|| memo.values().next().map(GammaCoset::value));
        if let Some(v) = expected {
            if c.value() != v {
                return Err(violation(format!(
                    "value {} where {} was established",
                    c.value(),
                    v
                )));
            }
        }
        if let Some((_, below)) = memo.range(..level.0).next_back() {
            if !coset_eq(field, &project(field, c, below.level())?, below)? {
                return Err(violation(format!(
                    "does not project onto level {}",
                    below.level()
                )));
            }
        }
        if let Some((_, above)) = memo.range(level.0 + 1..).next() {
            if !coset_eq(field, &project(field, above, level)?, c)? {
                return Err(violation(format!(
                    "level {} does not project onto it",
                    above.level()
                )));
            }
        }
        Ok(())
    }

    /// `v^c`, from the level-zero coset unless known up front.
    pub fn valuation(&self) -> Result<ExtendedValue> {
        match &self.inner.known_valuation {
            Some(v) => Ok(v.clone()),
            None => Ok(self.at(Level(0))?.value()),
        }
    }

    fn order(&self) -> Result<Option<i64>> {
        Ok(self.valuation()?.as_i64())
    }

    /// The first `n` cosets together with provenance and valuation.
    pub fn to_json(&self, n: u32) -> Result<Value> {
        let cosets = (0..n)
            .map(|l| Ok(self.at(Level(l))?.to_json(&self.inner.field)))
            .collect::<Result<Vec<_>>>()?;
        Ok(json!({
            "field": self.inner.field.descriptor().to_json(),
            "provenance": self.inner.provenance,
            "valuation": self.valuation()?.to_json(),
            "cosets": cosets,
        }))
    }
}

/// Sum with cancellation compensated: the level-`γ` output is read off the
/// inputs at `γ + v(a+b) − min(v(a), v(b))`.
pub fn limit_add<F: ValuedField>(
    a: &CoherentElement<F>,
    b: &CoherentElement<F>,
) -> Result<(CoherentElement<F>, PrecisionLedger)> {
    let field = a.field().clone();
    let inherited = a.ledger().compose(b.ledger());
    let exact = match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => Some(field.add(x, y)),
        _ => None,
    };
    let provenance =
        json!({"kind": "arith", "op": "add", "args": [a.provenance(), b.provenance()]});
    let (va, vb) = (a.order()?, b.order()?);
    let m = match (va, vb) {
        (None, None) => {
            let status = if a.is_certified_zero() && b.is_certified_zero() {
                ZeroStatus::Certified
            } else {
                ZeroStatus::Apparent
            };
            let parts = Parts {
                known_valuation: Some(ExtendedValue::Infinity),
                zero: status,
                exact,
                ledger: inherited.clone(),
                provenance,
            };
            let zero = field.zero();
            let e = CoherentElement::build(&field, parts, Box::new(move |_| Ok(zero.clone())));
            return Ok((e, inherited));
        }
        (Some(x), None) | (None, Some(x)) => x,
        (Some(x), Some(y)) => x.min(y),
    };
    let (a2, b2, f2) = (a.clone(), b.clone(), field.clone());
    let seq = move |l: u32| {
        let (x, y) = (a2.at(Level(l))?, b2.at(Level(l))?);
        Ok(f2.add(x.rep(), y.rep()))
    };
    let (e, _) =
        CoherentElement::from_cauchy_inner(&field, m, provenance, exact, inherited, "add", seq)?;
    let ledger = e.ledger().clone();
    Ok((e, ledger))
}

/// Level-wise product; no precision is lost.
pub fn limit_mul<F: ValuedField>(
    a: &CoherentElement<F>,
    b: &CoherentElement<F>,
) -> Result<CoherentElement<F>> {
    let field = a.field().clone();
    let (va, vb) = (a.valuation()?, b.valuation()?);
    let v = crate::oag::group_add(&va, &vb)?;
    let zero = if a.is_certified_zero() || b.is_certified_zero() {
        ZeroStatus::Certified
    } else if v.is_infinite() {
        ZeroStatus::Apparent
    } else {
        ZeroStatus::Nonzero
    };
    let exact = match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => Some(field.mul(x, y)),
        _ => None,
    };
    let parts = Parts {
        known_valuation: Some(v),
        zero,
        exact,
        ledger: a.ledger().compose(b.ledger()),
        provenance: json!({"kind": "arith", "op": "mul", "args": [a.provenance(), b.provenance()]}),
    };
    let (a2, b2, f2) = (a.clone(), b.clone(), field.clone());
    let generator = move |l: Level| {
        if zero != ZeroStatus::Nonzero {
            return Ok(f2.zero());
        }
        Ok(f2.mul(a2.at(l)?.rep(), b2.at(l)?.rep()))
    };
    Ok(CoherentElement::build(&field, parts, Box::new(generator)))
}

pub fn limit_neg<F: ValuedField>(a: &CoherentElement<F>) -> Result<CoherentElement<F>> {
    let field = a.field().clone();
    let parts = Parts {
        known_valuation: Some(a.valuation()?),
        zero: a.inner.zero,
        exact: a.exact().map(|x| field.neg(x)),
        ledger: a.ledger().clone(),
        provenance: json!({"kind": "arith", "op": "neg", "args": [a.provenance()]}),
    };
    let (a2, f2) = (a.clone(), field.clone());
    let generator = move |l: Level| Ok(f2.neg(a2.at(l)?.rep()));
    Ok(CoherentElement::build(&field, parts, Box::new(generator)))
}

/// Level-wise inverse. An apparent zero reports the probe bound.
pub fn limit_inv<F: ValuedField>(a: &CoherentElement<F>) -> Result<CoherentElement<F>> {
    let field = a.field().clone();
    let Some(v) = a.order()? else {
        return Err(if a.is_certified_zero() {
            Error::DivisionByZero
        } else {
            Error::ProbeBoundReached(a.zero_probe_bound())
        });
    };
    let exact = a.exact().map(|x| field.inv(x)).transpose()?;
    let parts = Parts {
        known_valuation: Some(ExtendedValue::int(-v)),
        zero: ZeroStatus::Nonzero,
        exact,
        ledger: a.ledger().clone(),
        provenance: json!({"kind": "arith", "op": "inv", "args": [a.provenance()]}),
    };
    let (a2, f2) = (a.clone(), field.clone());
    let generator = move |l: Level| f2.inv(a2.at(l)?.rep());
    Ok(CoherentElement::build(&field, parts, Box::new(generator)))
}

/// Dispatch on a named operation; `b` is required exactly for binary ones.
pub fn limit_arith<F: ValuedField>(
    op: FieldOp,
    a: &CoherentElement<F>,
    b: Option<&CoherentElement<F>>,
) -> Result<(CoherentElement<F>, PrecisionLedger)> {
    let arity = if op.is_binary() { 2 } else { 1 };
    let given = 1 + b.is_some() as usize;
    if arity != given {
        return Err(Error::Arity {
            left: arity,
            right: given,
        });
    }
    let with_ledger = |e: CoherentElement<F>| {
        let l = e.ledger().clone();
        (e, l)
    };
    match op {
        FieldOp::Add => limit_add(a, b.expect("binary")),
        FieldOp::Mul => limit_mul(a, b.expect("binary")).map(with_ledger),
        FieldOp::Neg => limit_neg(a).map(with_ledger),
        FieldOp::Inv => limit_inv(a).map(with_ledger),
    }
}

/// Outcome of comparing two elements on levels `0..N`.
#[derive(Clone, Debug, PartialEq)]
pub enum LimitEq<F: ValuedField> {
    /// The cosets agree at every level below `N`. Not a proof of equality.
    EqualUpTo(u32),
    Distinct {
        level: u32,
        witnesses: (F::Elem, F::Elem),
    },
}

impl<F: ValuedField> LimitEq<F> {
    pub fn is_equal(&self) -> bool {
        matches!(self, LimitEq::EqualUpTo(_))
    }

    pub fn to_json(&self, field: &F) -> Value {
        match self {
            LimitEq::EqualUpTo(n) => json!({"result": "equal_up_to", "level": n}),
            LimitEq::Distinct { level, witnesses } => json!({
                "result": "distinct",
                "level": level,
                "witnesses": [field.elem_to_json(&witnesses.0), field.elem_to_json(&witnesses.1)],
            }),
        }
    }
}

pub fn limit_eq<F: ValuedField>(
    a: &CoherentElement<F>,
    b: &CoherentElement<F>,
    n: u32,
) -> Result<LimitEq<F>> {
    let field = a.field();
    for l in 0..n {
        let (x, y) = (a.at(Level(l))?, b.at(Level(l))?);
        if !coset_eq(field, &x, &y)? {
            return Ok(LimitEq::Distinct {
                level: l,
                witnesses: (x.into_rep(), y.into_rep()),
            });
        }
    }
    Ok(LimitEq::EqualUpTo(n))
}

/// `n` digits of `e` past its valuation.
pub fn to_approximation<F: ValuedField>(e: &CoherentElement<F>, n: usize) -> Result<Approximation> {
    if n == 0 {
        return Err(Error::ZeroPrecision);
    }
    if e.is_apparent_zero() {
        return Err(Error::ProbeBoundReached(e.zero_probe_bound()));
    }
    if e.valuation()?.is_infinite() {
        return Ok(Approximation::zero(e.field().prime(), n));
    }
    let c = e.at(Level(n as u32 - 1))?;
    e.field().expand(c.rep(), n)
}

/// Picks, for a foreign element and a level, a representative in `K` of its
/// image under the level-wise isomorphism.
pub trait RepresentativeFinder<F: ValuedField>: Send + Sync {
    type Foreign: Clone + fmt::Debug + Send + Sync + 'static;

    fn base(&self) -> &F;
    /// `w(x)`, `None` for zero.
    fn foreign_order(&self, x: &Self::Foreign) -> Option<i64>;
    fn represent(&self, x: &Self::Foreign, level: Level) -> Result<F::Elem>;
    fn describe(&self, x: &Self::Foreign) -> Value;
}

/// The identity `K → K`.
#[derive(Clone, Debug)]
pub struct IdentityFinder<F: ValuedField> {
    pub field: F,
}

impl<F: ValuedField> RepresentativeFinder<F> for IdentityFinder<F> {
    type Foreign = F::Elem;

    fn base(&self) -> &F {
        &self.field
    }

    fn foreign_order(&self, x: &F::Elem) -> Option<i64> {
        self.field.order(x)
    }

    fn represent(&self, x: &F::Elem, _: Level) -> Result<F::Elem> {
        Ok(x.clone())
    }

    fn describe(&self, x: &F::Elem) -> Value {
        self.field.elem_to_json(x)
    }
}

/// `a + b·α ↦ a + b·s_M` with `s_M` the Hensel root of `1 + p` modulo `p^M`,
/// `M` chosen so the error `b·(s − s_M)` lies beyond the level.
#[derive(Clone, Debug)]
pub struct HenselFinder {
    pub base: RationalField,
    pub ext: QuadraticField,
}

impl HenselFinder {
    pub fn new(p: u64) -> Result<Self> {
        Ok(Self {
            base: RationalField::new(p)?,
            ext: QuadraticField::new(p)?,
        })
    }
}

impl RepresentativeFinder<RationalField> for HenselFinder {
    type Foreign = QuadElem;

    fn base(&self) -> &RationalField {
        &self.base
    }

    fn foreign_order(&self, x: &QuadElem) -> Option<i64> {
        self.ext.order(x)
    }

    fn represent(&self, x: &QuadElem, level: Level) -> Result<num_rational::BigRational> {
        let Some(vb) = self.base.order(&x.b) else {
            return Ok(x.a.clone());
        };
        let w = self.ext.order(x).expect("b != 0");
        let m = (level.as_i64() + w - vb + 1).max(1) as u32;
        let s = num_rational::BigRational::from_integer(self.ext.root_mod(m));
        Ok(&x.a + &x.b * s)
    }

    fn describe(&self, x: &QuadElem) -> Value {
        self.ext.elem_to_json(x)
    }
}

/// `σ(x)`: the family `[rf(x, ν)]_ν`, with `v(rf(x, ν)) = w(x)` enforced
/// at every level.
pub fn sigma_embed<F, R>(x: &R::Foreign, rf: Arc<R>) -> CoherentElement<F>
where
    F: ValuedField,
    R: RepresentativeFinder<F> + 'static,
{
    let field = rf.base().clone();
    let w = rf.foreign_order(x);
    let zero = if w.is_some() {
        ZeroStatus::Nonzero
    } else {
        ZeroStatus::Certified
    };
    let parts = Parts {
        known_valuation: Some(ExtendedValue::from_order(w)),
        zero,
        exact: None,
        ledger: PrecisionLedger::default(),
        provenance: json!({"kind": "sigma", "x": rf.describe(x)}),
    };
    let x = x.clone();
    CoherentElement::build(&field, parts, Box::new(move |l| rf.represent(&x, l)))
}

/// Two member choices from each level-wise hypersum of `a` and `b` (the
/// center, and the center pushed by `π^(γ+m+1)·e` for each perturbation
/// `e`) must converge to one element.
pub fn check_singlevalued<F: ValuedField>(
    a: &CoherentElement<F>,
    b: &CoherentElement<F>,
    n: u32,
    perturbations: &[F::Elem],
) -> LawReport {
    let mut report = LawReport::new("singlevalued");
    let field = a.field().clone();
    let run = |e: &F::Elem| -> Result<std::result::Result<(), String>> {
        if field.order(e).is_some_and(|v| v < 0) {
            return Ok(Err("perturbation is not integral".into()));
        }
        let (z, _) = limit_add(a, b)?;
        let m = match (a.order()?, b.order()?) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => 0,
        };
        let (a2, b2, f2, e2) = (a.clone(), b.clone(), field.clone(), e.clone());
        let seq = move |l: u32| {
            let center = f2.add(a2.at(Level(l))?.rep(), b2.at(Level(l))?.rep());
            let push = f2.mul(&f2.pow_uniformizer(l as i64 + m + 1), &e2);
            Ok(f2.add(&center, &push))
        };
        let z2 = CoherentElement::from_cauchy(&field, m, json!({"kind": "member-choice"}), seq)?;
        for l in 0..n {
            let s = hyperadd(&field, &a.at(Level(l))?, &b.at(Level(l))?)?;
            if !hypersum_contains(&field, &s, &z2.at(Level(l))?)? {
                return Ok(Err(format!(
                    "perturbed choice leaves the hypersum at level {l}"
                )));
            }
        }
        Ok(match limit_eq(&z, &z2, n)? {
            LimitEq::EqualUpTo(_) => Ok(()),
            LimitEq::Distinct { level, .. } => {
                Err(format!("member choices split at level {level}"))
            }
        })
    };
    for e in perturbations {
        let label = || format!("perturbation {}", field.format_elem(e));
        match run(e) {
            Ok(Ok(())) => report.check(true, String::new),
            Ok(Err(why)) => report.check(false, || format!("{}: {why}", label())),
            Err(err) => report.check(false, || format!("{}: {err}", label())),
        }
    }
    report.finish()
}

/// A cone over the tower with vertex a valued field.
/// A pair of vertex elements, as sampled by the universal-property check.
pub type VertexPair<C> = (
    <<C as Cone>::Vertex as ValuedField>::Elem,
    <<C as Cone>::Vertex as ValuedField>::Elem,
);

pub trait Cone {
    type Base: ValuedField;
    type Vertex: ValuedField;

    fn name(&self) -> &str;
    fn base(&self) -> &Self::Base;
    fn vertex(&self) -> &Self::Vertex;
    fn side(
        &self,
        x: &<Self::Vertex as ValuedField>::Elem,
        level: Level,
    ) -> Result<GammaCoset<Self::Base>>;
    /// The arrow into the limit.
    fn mediate(
        &self,
        x: &<Self::Vertex as ValuedField>::Elem,
    ) -> Result<CoherentElement<Self::Base>>;
}

pub fn mediating_map<C: Cone>(
    cone: &C,
    x: &<C::Vertex as ValuedField>::Elem,
) -> Result<CoherentElement<C::Base>> {
    cone.mediate(x)
}

/// `K` itself with sides `ρ_γ`.
#[derive(Clone, Debug)]
pub struct FieldCone<F: ValuedField> {
    finder: Arc<IdentityFinder<F>>,
}

impl<F: ValuedField> FieldCone<F> {
    pub fn new(field: F) -> Self {
        Self {
            finder: Arc::new(IdentityFinder { field }),
        }
    }
}

impl<F: ValuedField> Cone for FieldCone<F> {
    type Base = F;
    type Vertex = F;

    fn name(&self) -> &str {
        "field"
    }

    fn base(&self) -> &F {
        &self.finder.field
    }

    fn vertex(&self) -> &F {
        &self.finder.field
    }

    fn side(&self, x: &F::Elem, level: Level) -> Result<GammaCoset<F>> {
        Ok(at_level(&self.finder.field, x.clone(), level))
    }

    fn mediate(&self, x: &F::Elem) -> Result<CoherentElement<F>> {
        Ok(sigma_embed(x, Arc::clone(&self.finder)))
    }
}

/// `ℚ(α)` over the tower of `ℚ` with `v_p`. Sides resum the digit expansion
/// of `x` one digit past the level; the mediating map is the Hensel `σ`.
#[derive(Clone, Debug)]
pub struct EmbeddingCone {
    finder: Arc<HenselFinder>,
}

impl EmbeddingCone {
    pub fn new(p: u64) -> Result<Self> {
        Ok(Self {
            finder: Arc::new(HenselFinder::new(p)?),
        })
    }
}

impl Cone for EmbeddingCone {
    type Base = RationalField;
    type Vertex = QuadraticField;

    fn name(&self) -> &str {
        "embedding"
    }

    fn base(&self) -> &RationalField {
        &self.finder.base
    }

    fn vertex(&self) -> &QuadraticField {
        &self.finder.ext
    }

    fn side(&self, x: &QuadElem, level: Level) -> Result<GammaCoset<RationalField>> {
        let base = &self.finder.base;
        if self.finder.ext.is_zero(x) {
            return Ok(at_level(base, base.zero(), level));
        }
        let digits = self.finder.ext.expand(x, level.0 as usize + 1)?;
        Ok(at_level(base, base.resum(&digits), level))
    }

    fn mediate(&self, x: &QuadElem) -> Result<CoherentElement<RationalField>> {
        Ok(sigma_embed(x, Arc::clone(&self.finder)))
    }
}

/// Factorization `ρ_γ ∘ h = side_γ`, value preservation and the field laws
/// for the mediating map, and uniqueness against the family read off the
/// sides.
pub fn check_universal_property<C>(cone: &C, n: u32, samples: &[VertexPair<C>]) -> LawReport
where
    C: Cone + Clone + Send + Sync + 'static,
{
    let sides = cone.clone();
    let candidate = move |x: &<C::Vertex as ValuedField>::Elem| {
        let (c, x) = (sides.clone(), x.clone());
        let base = c.base().clone();
        Ok(CoherentElement::from_levels(
            &base,
            json!({"kind": "sides"}),
            move |l| Ok(c.side(&x, l)?.into_rep()),
        ))
    };
    check_universal_property_with(cone, n, samples, candidate)
}

/// As [`check_universal_property`] with a caller-supplied second arrow.
pub fn check_universal_property_with<C, H>(
    cone: &C,
    n: u32,
    samples: &[VertexPair<C>],
    candidate: H,
) -> LawReport
where
    C: Cone,
    H: Fn(&<C::Vertex as ValuedField>::Elem) -> Result<CoherentElement<C::Base>>,
{
    let base = cone.base();
    let vertex = cone.vertex();
    let show = |x: &<C::Vertex as ValuedField>::Elem| vertex.format_elem(x);
    let pairs = LevelPair::all_up_to(n.min(8).saturating_sub(1));
    let singles: Vec<_> = samples
        .iter()
        .flat_map(|(x, y)| [x.clone(), y.clone()])
        .collect();

    let diagram = cone_over_diagram(base, |x, l| cone.side(x, l), &pairs, &singles);
    let mut report = LawReport::new(format!("universal/{}", cone.name())).merge(diagram);

    for x in &singles {
        let factor = (|| -> Result<Option<String>> {
            let h = cone.mediate(x)?;
            if h.valuation()? != vertex.valuation(x) {
                return Ok(Some("mediating map changes the value".into()));
            }
            for l in 0..n {
                if !coset_eq(base, &h.at(Level(l))?, &cone.side(x, Level(l))?)? {
                    return Ok(Some(format!("rho_{l} o h != side_{l}")));
                }
            }
            Ok(match limit_eq(&h, &candidate(x)?, n)? {
                LimitEq::EqualUpTo(_) => None,
                LimitEq::Distinct { level, .. } => {
                    Some(format!("second arrow differs from h at level {level}"))
                }
            })
        })();
        match factor {
            Ok(None) => report.check(true, String::new),
            Ok(Some(why)) => report.check(false, || format!("{}: {why}", show(x))),
            Err(e) => report.check(false, || format!("{}: {e}", show(x))),
        }
    }

    for (x, y) in samples {
        let laws = (|| -> Result<Option<String>> {
            let (hx, hy) = (cone.mediate(x)?, cone.mediate(y)?);
            let (sum, _) = limit_add(&hx, &hy)?;
            if !limit_eq(&cone.mediate(&vertex.add(x, y))?, &sum, n)?.is_equal() {
                return Ok(Some("h(x+y) != h(x)+h(y)".into()));
            }
            let prod = limit_mul(&hx, &hy)?;
            if !limit_eq(&cone.mediate(&vertex.mul(x, y))?, &prod, n)?.is_equal() {
                return Ok(Some("h(xy) != h(x)h(y)".into()));
            }
            Ok(None)
        })();
        let pair = || format!("x = {}, y = {}", show(x), show(y));
        match laws {
            Ok(None) => report.check(true, String::new),
            Ok(Some(why)) => report.check(false, || format!("{why} for {}", pair())),
            Err(e) => report.check(false, || format!("{e} for {}", pair())),
        }
    }
    report.finish()
}
