//! The projective system `… → K_δ → K_γ → … → K_0`, each object valued
//! into the tropical hyperfield, and sampled checkers for the laws the
//! system has to satisfy.

use std::fmt::Debug;

use serde_json::{json, Value};

use crate::basefields::ValuedField;
use crate::error::{Error, Result};
use crate::krasner::{
    at_level, coset_eq, coset_mul, hyperadd, hypersum_contains, GammaCoset, HyperSum, Level,
};
use crate::oag::{group_add, group_cmp, trop_hyperadd, trop_member, ExtendedValue, TropSet};

/// `γ ≤ δ`, the source and target levels of `ρ_{δ,γ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelPair {
    lower: Level,
    upper: Level,
}

impl LevelPair {
    pub fn new(lower: Level, upper: Level) -> Result<Self> {
        if lower > upper {
            return Err(Error::ProjectUpward {
                from: lower.0,
                to: upper.0,
            });
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(self) -> Level {
        self.lower
    }

    pub fn upper(self) -> Level {
        self.upper
    }

    /// Every pair `γ ≤ δ` drawn from `0..=max`.
    pub fn all_up_to(max: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for upper in 0..=max {
            for lower in 0..=upper {
                out.push(Self {
                    lower: Level(lower),
                    upper: Level(upper),
                });
            }
        }
        out
    }
}

/// Outcome of a sampled law check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub law: String,
    pub samples: usize,
    pub failures: Vec<String>,
    pub pass: bool,
}

impl LawReport {
    pub fn new(law: impl Into<String>) -> Self {
        Self {
            law: law.into(),
            samples: 0,
            failures: Vec::new(),
            pass: true,
        }
    }

    pub fn check(&mut self, ok: bool, counterexample: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.failures.push(counterexample());
            self.pass = false;
        }
    }

    /// Records an evaluation error as a failure.
    pub fn check_result(&mut self, r: Result<bool>, counterexample: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, counterexample),
            Err(e) => self.check(false, || format!("{}: {e}", counterexample())),
        }
    }

    /// Merge; counterexamples stay sorted so output does not depend on
    /// the order samples were processed in.
    pub fn merge(mut self, other: LawReport) -> Self {
        self.samples += other.samples;
        self.failures.extend(other.failures);
        self.failures.sort();
        self.pass = self.failures.is_empty();
        self
    }

    pub fn finish(mut self) -> Self {
        self.failures.sort();
        self.pass = self.failures.is_empty();
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "law": self.law,
            "samples": self.samples,
            "pass": self.pass,
            "failures": self.failures,
        })
    }
}

/// `ρ_{δ,γ}`: keep the representative, lower the level.
pub fn project<F: ValuedField>(
    field: &F,
    c: &GammaCoset<F>,
    gamma: Level,
) -> Result<GammaCoset<F>> {
    if gamma > c.level() {
        return Err(Error::ProjectUpward {
            from: c.level().0,
            to: gamma.0,
        });
    }
    Ok(at_level(field, c.rep().clone(), gamma))
}

/// Slice triangles `v_γ ∘ ρ_{δ,γ} = v_δ`, functoriality `ρ_{ε,γ} = ρ_{δ,γ} ∘ ρ_{ε,δ}`,
/// `ρ_{δ,δ} = id`, and the triangles `ρ_{δ,γ} ∘ ρ_δ = ρ_γ` out of `K`.
pub fn check_slice_triangles<F: ValuedField>(
    field: &F,
    pairs: &[LevelPair],
    samples: &[F::Elem],
) -> LawReport {
    check_slice_triangles_with(field, pairs, samples, |c, g| project(field, c, g))
}

/// As [`check_slice_triangles`], with the projection supplied by the caller.
pub fn check_slice_triangles_with<F, P>(
    field: &F,
    pairs: &[LevelPair],
    samples: &[F::Elem],
    projector: P,
) -> LawReport
where
    F: ValuedField,
    P: Fn(&GammaCoset<F>, Level) -> Result<GammaCoset<F>>,
{
    let mut report = LawReport::new("slice-triangles");
    let show = |x: &F::Elem| field.format_elem(x);
    for pair in pairs {
        let (lower, upper) = (pair.lower, pair.upper);
        for x in samples {
            let top = at_level(field, x.clone(), upper);
            let down = projector(&top, lower);
            report.check_result(
                down.as_ref()
                    .map_err(Clone::clone)
                    .map(|d| d.value() == top.value()),
                || format!("value changes under rho_{{{upper},{lower}}} at {}", show(x)),
            );
            report.check_result(
                down.as_ref()
                    .map_err(Clone::clone)
                    .and_then(|d| coset_eq(field, d, &at_level(field, x.clone(), lower))),
                || {
                    format!(
                        "rho_{{{upper},{lower}}}(rho_{upper}(x)) != rho_{lower}(x) at {}",
                        show(x)
                    )
                },
            );
            if lower == upper {
                report.check_result(
                    down.as_ref()
                        .map_err(Clone::clone)
                        .and_then(|d| coset_eq(field, d, &top)),
                    || format!("rho_{{{upper},{upper}}} is not the identity at {}", show(x)),
                );
            }
            for mid in lower.0..=upper.0 {
                let via = projector(&top, Level(mid)).and_then(|m| projector(&m, lower));
                let composed = match (&via, &down) {
                    (Ok(v), Ok(d)) => coset_eq(field, v, d),
                    (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                };
                report.check_result(composed, || {
                    format!("rho_{{{upper},{lower}}} != rho_{{{mid},{lower}}} o rho_{{{upper},{mid}}} at {}", show(x))
                });
            }
        }
    }
    report.finish()
}

/// `ρ_{δ,γ}([x]_δ ⊞ [y]_δ) ⊆ [x]_γ ⊞ [y]_γ`, decided on descriptors.
///
/// Off the singleton case both sides are balls around the class of `x + y`,
/// so the image is contained iff its radius is at least the lower radius and
/// its projected center lies in the lower ball.
pub fn hypersum_image_contained<F: ValuedField>(
    field: &F,
    upper: &HyperSum<F>,
    lower: &HyperSum<F>,
) -> Result<bool> {
    let gamma = lower.level();
    if let Some(single) = upper.singleton() {
        return hypersum_contains(field, lower, &project(field, single, gamma)?);
    }
    if lower.singleton().is_some() {
        return Ok(false);
    }
    let center_ok = hypersum_contains(field, lower, &project(field, upper.center(), gamma)?)?;
    let radius_ok = group_cmp(upper.radius(), lower.radius())? != std::cmp::Ordering::Less;
    let zero_ok = !upper.contains_zero() || lower.contains_zero();
    Ok(center_ok && radius_ok && zero_ok)
}

/// Hyperaddition containment for every projection, on descriptors.
pub fn check_projection_containment<F: ValuedField>(
    field: &F,
    pairs: &[LevelPair],
    samples: &[(F::Elem, F::Elem)],
) -> LawReport {
    let mut report = LawReport::new("projection-containment");
    for pair in pairs {
        for (x, y) in samples {
            let at = |l: Level| {
                hyperadd(
                    field,
                    &at_level(field, x.clone(), l),
                    &at_level(field, y.clone(), l),
                )
            };
            let r = at(pair.upper)
                .and_then(|up| at(pair.lower).map(|low| (up, low)))
                .and_then(|(up, low)| hypersum_image_contained(field, &up, &low));
            report.check_result(r, || {
                format!(
                    "rho_{{{},{}}}([{}] + [{}]) escapes the lower hypersum",
                    pair.upper,
                    pair.lower,
                    field.format_elem(x),
                    field.format_elem(y)
                )
            });
        }
    }
    report.finish()
}

/// What [`check_hom_law`] needs from a hyperfield.
pub trait HyperfieldCarrier {
    type Elem: Clone + Debug;
    type Sum;

    fn zero(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn hyperadd(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Sum>;
    fn contains(&self, s: &Self::Sum, c: &Self::Elem) -> Result<bool>;
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> Result<bool>;
    /// A finite selection of members of `s`.
    fn sample_members(&self, s: &Self::Sum) -> Result<Vec<Self::Elem>>;
    fn describe(&self, a: &Self::Elem) -> String;
}

/// `K_γ` as a carrier.
#[derive(Clone, Debug)]
pub struct QuotientHyperfield<F: ValuedField> {
    pub field: F,
    pub level: Level,
    /// Height of the perturbations used to pick members of a ball.
    pub member_height: u32,
}

impl<F: ValuedField> QuotientHyperfield<F> {
    pub fn new(field: F, level: Level) -> Self {
        Self {
            field,
            level,
            member_height: 2,
        }
    }

    pub fn class(&self, x: F::Elem) -> GammaCoset<F> {
        at_level(&self.field, x, self.level)
    }
}

impl<F: ValuedField> HyperfieldCarrier for QuotientHyperfield<F> {
    type Elem = GammaCoset<F>;
    type Sum = HyperSum<F>;

    fn zero(&self) -> GammaCoset<F> {
        self.class(self.field.zero())
    }

    fn mul(&self, a: &GammaCoset<F>, b: &GammaCoset<F>) -> Result<GammaCoset<F>> {
        coset_mul(&self.field, a, b)
    }

    fn hyperadd(&self, a: &GammaCoset<F>, b: &GammaCoset<F>) -> Result<HyperSum<F>> {
        hyperadd(&self.field, a, b)
    }

    fn contains(&self, s: &HyperSum<F>, c: &GammaCoset<F>) -> Result<bool> {
        hypersum_contains(&self.field, s, c)
    }

    fn equal(&self, a: &GammaCoset<F>, b: &GammaCoset<F>) -> Result<bool> {
        coset_eq(&self.field, a, b)
    }

    fn sample_members(&self, s: &HyperSum<F>) -> Result<Vec<GammaCoset<F>>> {
        if let Some(single) = s.singleton() {
            return Ok(vec![single.clone()]);
        }
        let mut out = vec![s.center().clone()];
        if s.contains_zero() {
            out.push(self.zero());
        }
        let r = s
            .radius()
            .as_i64()
            .expect("finite radius off the singleton case");
        let step = self.field.pow_uniformizer(r + 1);
        for e in self.field.small_elements(self.member_height) {
            let z = self.class(self.field.add(s.center().rep(), &self.field.mul(&step, &e)));
            if hypersum_contains(&self.field, s, &z)? {
                out.push(z);
            }
        }
        Ok(out)
    }

    fn describe(&self, a: &GammaCoset<F>) -> String {
        format!("[{}]_{}", self.field.format_elem(a.rep()), self.level)
    }
}

/// The tropical hyperfield over `ℤ` as a carrier.
#[derive(Clone, Copy, Debug, Default)]
pub struct TropicalHyperfield;

impl HyperfieldCarrier for TropicalHyperfield {
    type Elem = ExtendedValue;
    type Sum = TropSet;

    fn zero(&self) -> ExtendedValue {
        ExtendedValue::Infinity
    }

    fn mul(&self, a: &ExtendedValue, b: &ExtendedValue) -> Result<ExtendedValue> {
        group_add(a, b)
    }

    fn hyperadd(&self, a: &ExtendedValue, b: &ExtendedValue) -> Result<TropSet> {
        trop_hyperadd(a, b)
    }

    fn contains(&self, s: &TropSet, c: &ExtendedValue) -> Result<bool> {
        trop_member(c, s)
    }

    fn equal(&self, a: &ExtendedValue, b: &ExtendedValue) -> Result<bool> {
        Ok(group_cmp(a, b)? == std::cmp::Ordering::Equal)
    }

    fn sample_members(&self, s: &TropSet) -> Result<Vec<ExtendedValue>> {
        Ok(match s {
            TropSet::Singleton(v) => vec![v.clone()],
            TropSet::UpInterval(lower) => {
                let lower = ExtendedValue::Finite(lower.clone());
                let mut out = vec![lower.clone(), ExtendedValue::Infinity];
                for k in [1, 2, 7] {
                    out.push(group_add(&lower, &ExtendedValue::int(k))?);
                }
                out
            }
        })
    }

    fn describe(&self, a: &ExtendedValue) -> String {
        a.to_string()
    }
}

/// Zero preservation, multiplicativity, and `f(x ⊞ y) ⊆ f(x) ⊞′ f(y)` checked
/// member-wise on the sampled members of each source hypersum.
pub fn check_hom_law<S, T, M>(
    source: &S,
    target: &T,
    f: M,
    samples: &[(S::Elem, S::Elem)],
) -> LawReport
where
    S: HyperfieldCarrier,
    T: HyperfieldCarrier,
    M: Fn(&S::Elem) -> Result<T::Elem>,
{
    let mut report = LawReport::new("homomorphism");
    report.check_result(
        f(&source.zero()).and_then(|z| target.equal(&z, &target.zero())),
        || "f(0) != 0'".to_string(),
    );
    for (x, y) in samples {
        let pair = || format!("x = {}, y = {}", source.describe(x), source.describe(y));
        let mult = (|| {
            let lhs = f(&source.mul(x, y)?)?;
            let rhs = target.mul(&f(x)?, &f(y)?)?;
            target.equal(&lhs, &rhs)
        })();
        report.check_result(mult, || format!("f(xy) != f(x)f(y) for {}", pair()));

        let containment = (|| -> Result<Option<String>> {
            let image_sum = target.hyperadd(&f(x)?, &f(y)?)?;
            for m in source.sample_members(&source.hyperadd(x, y)?)? {
                if !target.contains(&image_sum, &f(&m)?)? {
                    return Ok(Some(source.describe(&m)));
                }
            }
            Ok(None)
        })();
        match containment {
            Ok(None) => report.check(true, String::new),
            Ok(Some(m)) => report.check(false, || {
                format!("f({m}) not in f(x) + f(y) for {}", pair())
            }),
            Err(e) => report.check(false, || format!("{e} for {}", pair())),
        }
    }
    report.finish()
}

/// `project(side_δ(x), γ) = side_γ(x)` for every pair, and one value per `x`
/// across all levels.
pub fn cone_over_diagram<F, V, S>(
    field: &F,
    sides: S,
    pairs: &[LevelPair],
    samples: &[V],
) -> LawReport
where
    F: ValuedField,
    V: Debug,
    S: Fn(&V, Level) -> Result<GammaCoset<F>>,
{
    let mut report = LawReport::new("cone");
    for (i, x) in samples.iter().enumerate() {
        let mut value: Option<ExtendedValue> = None;
        for pair in pairs {
            let r = (|| {
                let top = sides(x, pair.upper)?;
                let low = sides(x, pair.lower)?;
                let commutes = coset_eq(field, &project(field, &top, pair.lower)?, &low)?;
                let v = value.get_or_insert_with(|| top.value());
                Ok(commutes && *v == top.value() && *v == low.value())
            })();
            report.check_result(r, || {
                format!(
                    "sample #{i}: side_{} does not factor through side_{}",
                    pair.lower, pair.upper
                )
            });
        }
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefields::RationalField;
    use crate::sampling::{rng, SampleField};

    fn q5() -> RationalField {
        RationalField::new(5).unwrap()
    }

    #[test]
    fn project_examples() {
        let q = q5();
        let c = at_level(&q, q.from_i64(27), Level(2));
        let down = project(&q, &c, Level(1)).unwrap();
        assert!(coset_eq(&q, &down, &at_level(&q, q.from_i64(2), Level(1))).unwrap());
        assert_eq!(project(&q, &c, Level(2)).unwrap(), c);
        assert!(matches!(
            project(&q, &c, Level(3)),
            Err(Error::ProjectUpward { from: 2, to: 3 })
        ));
        let c3 = at_level(&q, q.ratio(7, 3), Level(3));
        let two_step = project(&q, &project(&q, &c3, Level(2)).unwrap(), Level(0)).unwrap();
        assert!(coset_eq(&q, &two_step, &project(&q, &c3, Level(0)).unwrap()).unwrap());
    }

    #[test]
    fn level_pairs_are_ordered() {
        assert!(LevelPair::new(Level(2), Level(1)).is_err());
        assert_eq!(LevelPair::all_up_to(2).len(), 6);
    }

    #[test]
    fn slice_triangles_hold() {
        let q = q5();
        let mut r = rng(11);
        let xs: Vec<_> = (0..200).map(|_| q.sample_spread(&mut r, 1000, 3)).collect();
        let report = check_slice_triangles(&q, &LevelPair::all_up_to(3), &xs);
        assert!(report.pass, "{:?}", report.failures);
        let zero = check_slice_triangles(&q, &LevelPair::all_up_to(3), &[q.zero()]);
        assert!(zero.pass);
    }

    #[test]
    fn corrupted_projection_is_caught() {
        let q = q5();
        let xs: Vec<_> = (1..20).map(|n| q.from_i64(n)).collect();
        let corrupt = |c: &GammaCoset<RationalField>, g: Level| {
            let v = c.order().unwrap_or(0);
            let bump = q.pow_uniformizer(g.as_i64() + v);
            Ok(at_level(&q, q.add(c.rep(), &bump), g))
        };
        let report = check_slice_triangles_with(&q, &LevelPair::all_up_to(2), &xs, corrupt);
        assert!(!report.pass);
    }

    #[test]
    fn projections_are_homomorphisms() {
        let q = q5();
        let mut r = rng(3);
        let pairs: Vec<_> = (0..60)
            .map(|_| {
                (
                    q.sample_spread(&mut r, 200, 2),
                    q.sample_spread(&mut r, 200, 2),
                )
            })
            .collect();
        let upper = QuotientHyperfield::new(q.clone(), Level(3));
        let lower = QuotientHyperfield::new(q.clone(), Level(1));
        let samples: Vec<_> = pairs
            .iter()
            .map(|(x, y)| (upper.class(x.clone()), upper.class(y.clone())))
            .collect();
        let report = check_hom_law(&upper, &lower, |c| project(&q, c, Level(1)), &samples);
        assert!(report.pass, "{:?}", report.failures);

        let containment = check_projection_containment(&q, &LevelPair::all_up_to(3), &pairs);
        assert!(containment.pass, "{:?}", containment.failures);
    }

    #[test]
    fn valuation_is_a_homomorphism_into_the_tropical_hyperfield() {
        let q = q5();
        let k1 = QuotientHyperfield::new(q.clone(), Level(1));
        let mut r = rng(5);
        let mut samples: Vec<_> = (0..60)
            .map(|_| {
                (
                    k1.class(q.sample_spread(&mut r, 100, 2)),
                    k1.class(q.sample_spread(&mut r, 100, 2)),
                )
            })
            .collect();
        samples.push((k1.class(q.one()), k1.class(q.from_i64(-1))));
        samples.push((k1.class(q.one()), k1.class(q.zero())));
        let report = check_hom_law(&k1, &TropicalHyperfield, |c| Ok(c.value()), &samples);
        assert!(report.pass, "{:?}", report.failures);
    }

    #[test]
    fn squaring_is_not_a_homomorphism() {
        let q = q5();
        let k = QuotientHyperfield::new(q.clone(), Level(1));
        let samples: Vec<_> = (1..8)
            .map(|n| (k.class(q.from_i64(n)), k.class(q.from_i64(2 * n + 1))))
            .collect();
        let report = check_hom_law(&k, &k, |c| coset_mul(&q, c, c), &samples);
        assert!(!report.pass);
    }

    #[test]
    fn cones_from_the_field() {
        let q = q5();
        let xs: Vec<_> = (-10..10).map(|n| q.ratio(n, 7)).collect();
        let pairs = LevelPair::all_up_to(4);
        let ok = cone_over_diagram(&q, |x, l| Ok(at_level(&q, x.clone(), l)), &pairs, &xs);
        assert!(ok.pass, "{:?}", ok.failures);

        let shifted = |x: &num_rational::BigRational, l: Level| {
            let rep = if l == Level(2) {
                q.add(x, &q.pow_uniformizer(q.order(x).unwrap_or(0) + 1))
            } else {
                x.clone()
            };
            Ok(at_level(&q, rep, l))
        };
        let bad = cone_over_diagram(&q, shifted, &pairs, &xs);
        assert!(!bad.pass);
    }

    #[test]
    fn reports_merge_sorted() {
        let mut a = LawReport::new("x");
        a.check(false, || "b".into());
        let mut b = LawReport::new("x");
        b.check(false, || "a".into());
        b.check(true, String::new);
        let m = a.merge(b);
        assert_eq!(m.samples, 3);
        assert_eq!(m.failures, vec!["a".to_string(), "b".to_string()]);
        assert!(!m.pass);
    }
}
