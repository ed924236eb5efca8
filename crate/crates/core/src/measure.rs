//! Finitely supported probability measures with exact rational weights.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{translate, Group, GroupSubset, Homomorphism};
use crate::rational::{self, Rational};

/// What a measure lives on: the elements of a finite group, or an abstract
/// indexed point set (game strategies, witness windows).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Carrier {
    Group { name: String, order: usize },
    Points { count: usize },
}

impl Carrier {
    pub fn of(g: &Group) -> Carrier {
        Carrier::Group {
            name: g.name(),
            order: g.order(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Carrier::Group { order, .. } => *order,
            Carrier::Points { count } => *count,
        }
    }
}

/// A probability measure with finite support. Weights are strictly positive
/// and sum to exactly one; points are kept sorted so that equal measures are
/// structurally equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinSuppMeasure {
    carrier: Carrier,
    weights: BTreeMap<usize, Rational>,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    carrier: Carrier,
    entries: Vec<(usize, String)>,
}

impl Serialize for FinSuppMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureJson {
            carrier: self.carrier.clone(),
            entries: self
                .weights
                .iter()
                .map(|(&p, w)| (p, rational::format(w)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSuppMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MeasureJson::deserialize(d)?;
        let entries = raw
            .entries
            .iter()
            .map(|(p, w)| rational::parse(w).map(|w| (*p, w)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        FinSuppMeasure::from_weights(raw.carrier, entries).map_err(serde::de::Error::custom)
    }
}

impl FinSuppMeasure {
    /// Builds a measure from `(point, weight)` pairs. Repeated points are
    /// merged and zero weights dropped.
    pub fn from_weights(
        carrier: Carrier,
        entries: impl IntoIterator<Item = (usize, Rational)>,
    ) -> Result<FinSuppMeasure> {
        let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
        for (p, w) in entries {
            if p >= carrier.size() {
                return Err(Error::InvalidArgument(format!("point {p} outside the carrier")));
            }
            if w < Rational::zero() {
                return Err(Error::InvalidArgument(format!("negative weight at {p}")));
            }
            *weights.entry(p).or_insert_with(Rational::zero) += w;
        }
        weights.retain(|_, w| !w.is_zero());
        let total: Rational = weights.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(FinSuppMeasure { carrier, weights })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn weight(&self, p: usize) -> Rational {
        self.weights.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.keys().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.weights.iter().map(|(&p, w)| (p, w))
    }

    /// Whether every point of the support has the same weight.
    pub fn is_uniform(&self) -> bool {
        let mut w = self.weights.values();
        match w.next() {
            Some(first) => w.all(|x| x == first),
            None => false,
        }
    }

    fn check_group(&self, g: &Group) -> Result<()> {
        if self.carrier != Carrier::of(g) {
            return Err(Error::CarrierMismatch(format!(
                "measure on {:?} used with group {}",
                self.carrier,
                g.name()
            )));
        }
        Ok(())
    }
}

pub fn dirac(carrier: Carrier, x: usize) -> Result<FinSuppMeasure> {
    FinSuppMeasure::from_weights(carrier, [(x, rational::one())])
}

/// The uniform measure `(1/|F|) Σ_{x∈F} δ_x`.
pub fn uniform_on(carrier: Carrier, points: &[usize]) -> Result<FinSuppMeasure> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.is_empty() {
        return Err(Error::Empty("uniform_on needs a nonempty set"));
    }
    let w = rational::ratio(1, pts.len() as i64);
    FinSuppMeasure::from_weights(carrier, pts.into_iter().map(|p| (p, w.clone())))
}

pub fn uniform_on_set(g: &Group, f: &GroupSubset) -> Result<FinSuppMeasure> {
    uniform_on(Carrier::of(g), &f.to_indices())
}

/// `μ(A)`.
pub fn measure_of(mu: &FinSuppMeasure, a: &GroupSubset) -> Rational {
    mu.entries()
        .filter(|(p, _)| a.contains(*p))
        .map(|(_, w)| w)
        .sum()
}

/// `μ ∗ ν`: the image of `μ ⊗ ν` under multiplication.
pub fn convolve(g: &Group, mu: &FinSuppMeasure, nu: &FinSuppMeasure) -> Result<FinSuppMeasure> {
    mu.check_group(g)?;
    nu.check_group(g)?;
    let mut out: Vec<(usize, Rational)> = Vec::new();
    for (a, wa) in mu.entries() {
        for (b, wb) in nu.entries() {
            out.push((g.mul(a, b), wa * wb));
        }
    }
    FinSuppMeasure::from_weights(Carrier::of(g), out)
}

/// The image measure `h(μ)`, with `h(μ)(B) = μ(h⁻¹(B))`.
pub fn pushforward(h: &Homomorphism, mu: &FinSuppMeasure) -> Result<FinSuppMeasure> {
    if mu.carrier().size() != h.source_order() {
        return Err(Error::CarrierMismatch("pushforward source order".into()));
    }
    FinSuppMeasure::from_weights(
        Carrier::of(h.target()),
        mu.entries().map(|(p, w)| (h.apply(p), w.clone())),
    )
}

/// Which translates of `A` the supremum ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranslatePattern {
    /// `xAy` for all `x, y`.
    TwoSided,
    /// `xA`.
    Left,
    /// `Ay`.
    Right,
}

/// A translate `xAy`; one-sided patterns leave the other side at the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TranslatePair {
    pub x: usize,
    pub y: usize,
}

/// `sup μ(xAy)` over the translates selected by `pattern`, with the
/// lexicographically least maximizing pair.
pub fn sup_translates(
    g: &Group,
    mu: &FinSuppMeasure,
    a: &GroupSubset,
    pattern: TranslatePattern,
) -> Result<(Rational, TranslatePair)> {
    mu.check_group(g)?;
    let n = g.order();
    let pairs: Box<dyn Iterator<Item = (usize, usize)>> = match pattern {
        TranslatePattern::TwoSided => Box::new((0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))),
        TranslatePattern::Left => Box::new((0..n).map(|x| (x, 0))),
        TranslatePattern::Right => Box::new((0..n).map(|y| (0, y))),
    };
    let mut best: Option<(Rational, TranslatePair)> = None;
    for (x, y) in pairs {
        let v = measure_of(mu, &translate(g, a, x, y));
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, TranslatePair { x, y }));
        }
    }
    Ok(best.expect("groups are nonempty"))
}

/// The Haar measure of a finite group: uniform on all elements. For groups
/// of order ≤ 8 its two-sided invariance is checked on every subset.
pub fn haar_uniform(g: &Group) -> FinSuppMeasure {
    let mu = uniform_on(Carrier::of(g), &g.elements().collect::<Vec<_>>())
        .expect("groups are nonempty");
    if g.order() <= 8 {
        for mask in 0..(1u64 << g.order()) {
            let a = GroupSubset::from_mask(g.order(), mask);
            let base = measure_of(&mu, &a);
            for x in g.elements() {
                assert_eq!(measure_of(&mu, &translate(g, &a, x, 0)), base);
                assert_eq!(measure_of(&mu, &translate(g, &a, 0, x)), base);
            }
        }
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::quotient_map;
    use crate::rational::ratio;

    #[test]
    fn dirac_and_uniform() {
        let c4 = Group::cyclic(4).unwrap();
        let d = dirac(Carrier::of(&c4), 2).unwrap();
        assert_eq!(measure_of(&d, &c4.subset(&[2]).unwrap()), ratio(1, 1));
        let u = uniform_on(Carrier::of(&c4), &[0, 1, 2, 3]).unwrap();
        assert_eq!(measure_of(&u, &c4.subset(&[0, 1]).unwrap()), ratio(1, 2));
        assert_eq!(measure_of(&u, &c4.empty_set()), ratio(0, 1));
        assert!(uniform_on(Carrier::of(&c4), &[]).is_err());
    }

    #[test]
    fn convolution_examples() {
        let c4 = Group::cyclic(4).unwrap();
        let car = Carrier::of(&c4);
        let da = dirac(car.clone(), 1).unwrap();
        let db = dirac(car.clone(), 2).unwrap();
        assert_eq!(convolve(&c4, &da, &db).unwrap(), dirac(car.clone(), 3).unwrap());

        let mu = uniform_on(car.clone(), &[0, 1]).unwrap();
        let nu = uniform_on(car.clone(), &[0, 2]).unwrap();
        let expected = uniform_on(car.clone(), &[0, 1, 2, 3]).unwrap();
        assert_eq!(convolve(&c4, &mu, &nu).unwrap(), expected);
        assert_eq!(convolve(&c4, &expected, &da).unwrap(), expected);

        let c2 = Group::cyclic(2).unwrap();
        let other = dirac(Carrier::of(&c2), 0).unwrap();
        assert!(matches!(convolve(&c4, &mu, &other), Err(Error::CarrierMismatch(_))));
    }

    #[test]
    fn pushforward_to_quotient() {
        let c4 = Group::cyclic(4).unwrap();
        let h = quotient_map(&c4, &c4.subset(&[0, 2]).unwrap()).unwrap();
        let d1 = dirac(Carrier::of(&c4), 1).unwrap();
        let img = pushforward(&h, &d1).unwrap();
        assert_eq!(img, dirac(Carrier::of(h.target()), h.apply(1)).unwrap());
        assert_eq!(pushforward(&h, &haar_uniform(&c4)).unwrap(), haar_uniform(h.target()));
        let id = Homomorphism::identity(&c4);
        assert_eq!(pushforward(&id, &d1).unwrap(), d1);
    }

    #[test]
    fn translate_suprema() {
        let c4 = Group::cyclic(4).unwrap();
        let d0 = dirac(Carrier::of(&c4), 0).unwrap();
        let a = c4.subset(&[1]).unwrap();
        let (v, arg) = sup_translates(&c4, &d0, &a, TranslatePattern::TwoSided).unwrap();
        assert_eq!(v, ratio(1, 1));
        assert_eq!(arg, TranslatePair { x: 0, y: 3 });

        let c6 = Group::cyclic(6).unwrap();
        let mu = uniform_on(Carrier::of(&c6), &[0, 1]).unwrap();
        let a = c6.subset(&[0, 3]).unwrap();
        let (v, _) = sup_translates(&c6, &mu, &a, TranslatePattern::Right).unwrap();
        assert_eq!(v, ratio(1, 2));
    }

    #[test]
    fn haar_is_invariant() {
        let s3 = Group::symmetric(3).unwrap();
        let mu = haar_uniform(&s3);
        let t: Vec<usize> = s3.elements().filter(|&g| s3.element_order(g) == 2).collect();
        let t = s3.subset(&t).unwrap();
        for p in [TranslatePattern::TwoSided, TranslatePattern::Left, TranslatePattern::Right] {
            assert_eq!(sup_translates(&s3, &mu, &t, p).unwrap().0, ratio(1, 2));
        }
        let c5 = Group::cyclic(5).unwrap();
        assert_eq!(measure_of(&haar_uniform(&c5), &c5.subset(&[0, 1]).unwrap()), ratio(2, 5));
        assert_eq!(measure_of(&haar_uniform(&c5), &c5.full_set()), ratio(1, 1));
    }

    #[test]
    fn json_round_trip() {
        let c6 = Group::cyclic(6).unwrap();
        let mu = FinSuppMeasure::from_weights(
            Carrier::of(&c6),
            [(0, ratio(1, 3)), (4, ratio(2, 3))],
        )
        .unwrap();
        let text = serde_json::to_string(&mu).unwrap();
        assert!(text.contains(r#"[4,"2/3"]"#));
        let back: FinSuppMeasure = serde_json::from_str(&text).unwrap();
        assert_eq!(back, mu);
    }
}
