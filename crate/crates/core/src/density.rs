//! Solecki densities on finite groups.
//!
//! Every density of a subset `A` of a finite group equals `|A|/|G|`; this
//! module computes that closed form, an independent brute-force search over
//! uniform witnesses, re-verified bound certificates, the convolution rule
//! that combines certificates for a union, and subadditivization.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{guard, Error, Result};
use crate::group::{induced_subgroup, Group, GroupSubset};
use crate::measure::{
    convolve, sup_translates, uniform_on_set, Carrier, FinSuppMeasure, TranslatePattern,
};
use crate::rational::{self, serde_fraction, Rational};

/// The five densities `σ, σ_L, σ^L, σ_R, σ^R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DensityKind {
    #[serde(rename = "sigma")]
    Sigma,
    #[serde(rename = "sigma_L")]
    SigmaL,
    #[serde(rename = "sigma_cap_L")]
    SigmaCapL,
    #[serde(rename = "sigma_R")]
    SigmaR,
    #[serde(rename = "sigma_cap_R")]
    SigmaCapR,
}

impl DensityKind {
    pub const ALL: [DensityKind; 5] = [
        DensityKind::Sigma,
        DensityKind::SigmaL,
        DensityKind::SigmaCapL,
        DensityKind::SigmaR,
        DensityKind::SigmaCapR,
    ];

    pub fn pattern(self) -> TranslatePattern {
        match self {
            DensityKind::Sigma => TranslatePattern::TwoSided,
            DensityKind::SigmaL | DensityKind::SigmaCapL => TranslatePattern::Left,
            DensityKind::SigmaR | DensityKind::SigmaCapR => TranslatePattern::Right,
        }
    }

    /// The capped kinds (`σ^L`, `σ^R`) only admit uniform witnesses.
    pub fn requires_uniform(self) -> bool {
        matches!(self, DensityKind::SigmaCapL | DensityKind::SigmaCapR)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DensityKind::Sigma => "sigma",
            DensityKind::SigmaL => "sigma_L",
            DensityKind::SigmaCapL => "sigma_cap_L",
            DensityKind::SigmaR => "sigma_R",
            DensityKind::SigmaCapR => "sigma_cap_R",
        }
    }
}

impl fmt::Display for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DensityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<DensityKind> {
        DensityKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown density kind {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

/// Whether a supremum was taken over a provably complete translate set, or
/// only up to a search horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Exact,
    Bounded(u64),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Exact => f.write_str("EXACT"),
            Scope::Bounded(l) => write!(f, "BOUNDED({l})"),
        }
    }
}

impl std::str::FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scope> {
        if s == "EXACT" {
            return Ok(Scope::Exact);
        }
        s.strip_prefix("BOUNDED(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|n| n.parse().ok())
            .map(Scope::Bounded)
            .ok_or_else(|| Error::Parse(format!("bad scope {s:?}")))
    }
}

impl Serialize for Scope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A weighted point of an infinite model, identified by its printed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub label: String,
    #[serde(with = "serde_fraction")]
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// A measure on a finite group.
    Measure(FinSuppMeasure),
    /// A finite set of group elements, standing for the uniform measure on it.
    Set(Vec<usize>),
    /// A measure on an infinite model (free group, integers).
    Labeled(Vec<LabeledPoint>),
}

/// One term of the infimum defining a density: a witness together with the
/// recomputed supremum over translates it achieves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kind: DensityKind,
    pub direction: Direction,
    #[serde(with = "serde_fraction")]
    pub bound: Rational,
    pub witness: Witness,
    pub scope: Scope,
    #[serde(with = "serde_fraction")]
    pub verified_sup: Rational,
}

/// `|A| / |G|`, the common value of every density on a finite group.
pub fn density_closed_form(g: &Group, a: &GroupSubset, _kind: DensityKind) -> Rational {
    rational::ratio(a.len() as i64, g.order() as i64)
}

/// Result of [`density_bruteforce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForce {
    pub value: Rational,
    pub witness: Vec<usize>,
}

/// Distinct translates of `A` selected by `pattern`, as bit masks.
pub(crate) fn translate_masks(g: &Group, a: &GroupSubset, pattern: TranslatePattern) -> Vec<u64> {
    let n = g.order();
    let mut out: Vec<u64> = Vec::new();
    let mut push = |x: usize, y: usize| {
        let mut m = 0u64;
        for e in a.iter() {
            m |= 1 << g.mul(g.mul(x, e), y);
        }
        out.push(m);
    };
    match pattern {
        TranslatePattern::TwoSided => (0..n).for_each(|x| (0..n).for_each(|y| push(x, y))),
        TranslatePattern::Left => (0..n).for_each(|x| push(x, 0)),
        TranslatePattern::Right => (0..n).for_each(|y| push(0, y)),
    }
    out.sort_unstable();
    out.dedup();
    out
}

const MAX_BRUTEFORCE_CANDIDATES: u128 = 1 << 26;

/// Minimum over nonempty `F` with `|F| ≤ max_witness_size` of the translate
/// supremum of the uniform measure on `F`.
///
/// Candidates are scanned by increasing size, then lexicographically; the
/// scan stops at the first `F` achieving `|A|/|G|`, which no witness can
/// beat. The returned witness is the first minimizer in that order.
pub fn density_bruteforce(
    g: &Group,
    a: &GroupSubset,
    kind: DensityKind,
    max_witness_size: usize,
) -> Result<BruteForce> {
    let n = g.order();
    guard("group order", n, 64)?;
    if max_witness_size == 0 || max_witness_size > n {
        return Err(Error::InvalidArgument(format!(
            "max_witness_size must be in 1..={n}"
        )));
    }
    let candidates: u128 = (1..=max_witness_size).map(|k| binomial(n, k)).sum();
    if candidates > MAX_BRUTEFORCE_CANDIDATES {
        return Err(Error::SizeGuard {
            what: "brute-force witness candidates",
            actual: candidates.min(usize::MAX as u128) as usize,
            limit: MAX_BRUTEFORCE_CANDIDATES as usize,
        });
    }
    let translates = translate_masks(g, a, kind.pattern());
    let (an, gn) = (a.len(), n);
    // best = hits/size, compared by cross-multiplication
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for size in 1..=max_witness_size {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let f = comb.iter().fold(0u64, |m, &i| m | 1 << i);
            let hits = translates
                .iter()
                .map(|t| (t & f).count_ones() as usize)
                .max()
                .unwrap_or(0);
            let better = match &best {
                None => true,
                Some((bh, bs, _)) => hits * bs < bh * size,
            };
            if better {
                best = Some((hits, size, comb.clone()));
                if hits * gn == an * size {
                    let (h, s, w) = best.unwrap();
                    return Ok(BruteForce {
                        value: rational::ratio(h as i64, s as i64),
                        witness: w,
                    });
                }
            }
            if !next_combination(&mut comb, n) {
                break;
            }
        }
    }
    let (h, s, w) = best.expect("at least one candidate");
    Ok(BruteForce {
        value: rational::ratio(h as i64, s as i64),
        witness: w,
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Advances a sorted k-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let Some(i) = (0..k).rev().find(|&i| comb[i] < n - k + i) else {
        return false;
    };
    comb[i] += 1;
    for j in i + 1..k {
        comb[j] = comb[j - 1] + 1;
    }
    true
}

fn witness_measure(g: &Group, witness: &Witness, kind: DensityKind) -> Result<FinSuppMeasure> {
    let mu = match witness {
        Witness::Measure(mu) => mu.clone(),
        Witness::Set(points) => uniform_on_set(g, &g.subset(points)?)?,
        Witness::Labeled(_) => {
            return Err(Error::Certificate(
                "labeled witnesses belong to infinite models".into(),
            ))
        }
    };
    if mu.carrier() != &Carrier::of(g) {
        return Err(Error::CarrierMismatch(format!(
            "witness carrier {:?} vs group {}",
            mu.carrier(),
            g.name()
        )));
    }
    if kind.requires_uniform() && !mu.is_uniform() {
        return Err(Error::Certificate(format!(
            "{kind} needs a uniform witness"
        )));
    }
    Ok(mu)
}

/// Upper bound certificate from a witness: the bound is the recomputed
/// translate supremum of the witness measure.
pub fn certificate_from_witness(
    g: &Group,
    a: &GroupSubset,
    witness: Witness,
    kind: DensityKind,
) -> Result<BoundCertificate> {
    let mu = witness_measure(g, &witness, kind)?;
    let (sup, _) = sup_translates(g, &mu, a, kind.pattern())?;
    Ok(BoundCertificate {
        kind,
        direction: Direction::Upper,
        bound: sup.clone(),
        witness,
        scope: Scope::Exact,
        verified_sup: sup,
    })
}

/// Recomputes the supremum of a finite-group certificate and checks that it
/// matches the stored bound.
pub fn verify_certificate(g: &Group, a: &GroupSubset, cert: &BoundCertificate) -> Result<()> {
    if cert.direction != Direction::Upper {
        return Err(Error::Certificate("only upper certificates carry witnesses".into()));
    }
    let mu = witness_measure(g, &cert.witness, cert.kind)?;
    let (sup, _) = sup_translates(g, &mu, a, cert.kind.pattern())?;
    if sup != cert.bound || sup != cert.verified_sup {
        return Err(Error::Certificate(format!(
            "recomputed supremum {sup} differs from bound {}",
            cert.bound
        )));
    }
    Ok(())
}

/// Certificate for `A ∪ B` from certificates for `A` and `B`, with the
/// convolution of their witnesses as the new witness. The stored bound is
/// the re-verified supremum, which is at most the sum of the two bounds.
pub fn combine_certificates(
    g: &Group,
    a: &GroupSubset,
    cert_a: &BoundCertificate,
    b: &GroupSubset,
    cert_b: &BoundCertificate,
) -> Result<BoundCertificate> {
    for c in [cert_a, cert_b] {
        if c.kind != DensityKind::Sigma || c.direction != Direction::Upper {
            return Err(Error::Certificate(format!(
                "combination needs upper sigma certificates, got {} {:?}",
                c.kind, c.direction
            )));
        }
    }
    verify_certificate(g, a, cert_a)?;
    verify_certificate(g, b, cert_b)?;
    let mu_a = witness_measure(g, &cert_a.witness, DensityKind::Sigma)?;
    let mu_b = witness_measure(g, &cert_b.witness, DensityKind::Sigma)?;
    let mu = convolve(g, &mu_a, &mu_b)?;
    let union = a.union(b);
    let cert = certificate_from_witness(g, &union, Witness::Measure(mu), DensityKind::Sigma)?;
    assert!(
        cert.bound <= &cert_a.bound + &cert_b.bound,
        "convolution bound exceeded the sum of the parts"
    );
    Ok(cert)
}

/// Value of `μ̂(A) = max_B μ(A ∪ B) − μ(B)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subadditivized {
    pub value: Rational,
    pub maximizer: u32,
    /// `false` when only a caller-supplied family of `B` was searched, in
    /// which case `value` is a lower bound for `μ̂(A)`.
    pub exhaustive: bool,
}

pub const MAX_SUBADDITIVE_GROUND: usize = 20;

/// Subadditivization over all `B ⊆ ground`, with subsets of a ground set of
/// size `ground_size ≤ 20` encoded as bit masks.
pub fn subadditivize(
    oracle: impl Fn(u32) -> Rational,
    a: u32,
    ground_size: usize,
) -> Result<Subadditivized> {
    guard("subadditivization ground set", ground_size, MAX_SUBADDITIVE_GROUND)?;
    let family = 0..(1u32 << ground_size);
    let mut out = subadditivize_over(oracle, a, family)?;
    out.exhaustive = true;
    Ok(out)
}

/// Subadditivization restricted to a family of candidate sets `B`.
pub fn subadditivize_over(
    oracle: impl Fn(u32) -> Rational,
    a: u32,
    family: impl IntoIterator<Item = u32>,
) -> Result<Subadditivized> {
    let mut best: Option<(Rational, u32)> = None;
    for b in family {
        let v = oracle(a | b) - oracle(b);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, b));
        }
    }
    let (value, maximizer) = best.ok_or(Error::Empty("candidate family"))?;
    Ok(Subadditivized {
        value,
        maximizer,
        exhaustive: false,
    })
}

/// The `kind`-density of `A ∩ H` computed inside the subgroup `H`.
pub fn relative_density(
    g: &Group,
    h: &GroupSubset,
    a: &GroupSubset,
    kind: DensityKind,
) -> Result<Rational> {
    let (sub, elems) = induced_subgroup(g, h)?;
    let inside: Vec<usize> = elems
        .iter()
        .enumerate()
        .filter(|(_, &e)| a.contains(e))
        .map(|(i, _)| i)
        .collect();
    let a_h = sub.subset(&inside)?;
    Ok(density_closed_form(&sub, &a_h, kind))
}

/// `true` if the value is zero; convenience for reports.
pub fn is_null(value: &Rational) -> bool {
    value.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{invert_set, translate};
    use crate::measure::{dirac, haar_uniform};
    use crate::rational::ratio;

    #[test]
    fn closed_form_examples() {
        let c4 = Group::cyclic(4).unwrap();
        let a = c4.subset(&[0, 1]).unwrap();
        for k in DensityKind::ALL {
            assert_eq!(density_closed_form(&c4, &a, k), ratio(1, 2));
        }
        assert_eq!(density_closed_form(&c4, &c4.empty_set(), DensityKind::Sigma), ratio(0, 1));
        assert_eq!(density_closed_form(&c4, &c4.full_set(), DensityKind::Sigma), ratio(1, 1));
        let c6 = Group::cyclic(6).unwrap();
        let h = c6.subset(&[0, 2, 4]).unwrap();
        assert_eq!(density_closed_form(&c6, &h, DensityKind::SigmaCapR), ratio(1, 2));
    }

    #[test]
    fn bruteforce_examples() {
        let c4 = Group::cyclic(4).unwrap();
        let a = c4.subset(&[0, 1]).unwrap();
        let r = density_bruteforce(&c4, &a, DensityKind::Sigma, 4).unwrap();
        assert_eq!(r.value, ratio(1, 2));
        assert_eq!(r.witness, vec![0, 2]);
        let e = density_bruteforce(&c4, &c4.empty_set(), DensityKind::SigmaR, 4).unwrap();
        assert_eq!((e.value, e.witness), (ratio(0, 1), vec![0]));
        let c6 = Group::cyclic(6).unwrap();
        let h = c6.subset(&[0, 2, 4]).unwrap();
        assert_eq!(density_bruteforce(&c6, &h, DensityKind::Sigma, 6).unwrap().value, ratio(1, 2));
        // singletons alone cannot certify anything below 1 for a nonempty set
        assert_eq!(density_bruteforce(&c6, &h, DensityKind::Sigma, 1).unwrap().value, ratio(1, 1));
        assert!(density_bruteforce(&c6, &h, DensityKind::Sigma, 0).is_err());
    }

    #[test]
    fn certificates() {
        let c6 = Group::cyclic(6).unwrap();
        let a = c6.subset(&[0]).unwrap();
        let c = certificate_from_witness(&c6, &a, Witness::Set(vec![0, 1, 2]), DensityKind::Sigma)
            .unwrap();
        assert_eq!(c.bound, ratio(1, 3));
        assert_eq!(c.scope, Scope::Exact);
        verify_certificate(&c6, &a, &c).unwrap();

        let haar = certificate_from_witness(
            &c6,
            &a,
            Witness::Measure(haar_uniform(&c6)),
            DensityKind::SigmaCapR,
        )
        .unwrap();
        assert_eq!(haar.bound, ratio(1, 6));

        let mut forged = c.clone();
        forged.bound = ratio(1, 6);
        assert!(verify_certificate(&c6, &a, &forged).is_err());
        assert!(certificate_from_witness(&c6, &a, Witness::Set(vec![]), DensityKind::Sigma).is_err());
    }

    #[test]
    fn capped_kinds_reject_non_uniform_witnesses() {
        let c4 = Group::cyclic(4).unwrap();
        let mu = FinSuppMeasure::from_weights(Carrier::of(&c4), [(0, ratio(1, 3)), (1, ratio(2, 3))])
            .unwrap();
        let a = c4.subset(&[0]).unwrap();
        assert!(certificate_from_witness(&c4, &a, Witness::Measure(mu.clone()), DensityKind::SigmaCapR).is_err());
        assert!(certificate_from_witness(&c4, &a, Witness::Measure(mu), DensityKind::SigmaR).is_ok());
    }

    #[test]
    fn combining_certificates() {
        let c6 = Group::cyclic(6).unwrap();
        let a = c6.subset(&[0]).unwrap();
        let b = c6.subset(&[3]).unwrap();
        let w = || Witness::Measure(haar_uniform(&c6));
        let ca = certificate_from_witness(&c6, &a, w(), DensityKind::Sigma).unwrap();
        let cb = certificate_from_witness(&c6, &b, w(), DensityKind::Sigma).unwrap();
        let cab = combine_certificates(&c6, &a, &ca, &b, &cb).unwrap();
        assert_eq!(cab.bound, ratio(1, 3));
        let cba = combine_certificates(&c6, &b, &cb, &a, &ca).unwrap();
        assert!(cba.bound <= &ca.bound + &cb.bound);

        // B = ∅ with a Dirac witness leaves the bound for A unchanged
        let empty = c6.empty_set();
        let ce = certificate_from_witness(
            &c6,
            &empty,
            Witness::Measure(dirac(Carrier::of(&c6), 0).unwrap()),
            DensityKind::Sigma,
        )
        .unwrap();
        assert_eq!(ce.bound, ratio(0, 1));
        let ca3 = certificate_from_witness(&c6, &a, Witness::Set(vec![0, 1, 2]), DensityKind::Sigma).unwrap();
        let combined = combine_certificates(&c6, &a, &ca3, &empty, &ce).unwrap();
        assert_eq!(combined.bound, ca3.bound);

        let right = certificate_from_witness(&c6, &a, w(), DensityKind::SigmaR).unwrap();
        assert!(combine_certificates(&c6, &a, &right, &b, &cb).is_err());
    }

    #[test]
    fn certificate_json() {
        let c6 = Group::cyclic(6).unwrap();
        let a = c6.subset(&[0]).unwrap();
        let c = certificate_from_witness(&c6, &a, Witness::Set(vec![0, 1, 2]), DensityKind::Sigma)
            .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains(r#""bound":"1/3""#));
        assert!(text.contains(r#""scope":"EXACT""#));
        let back: BoundCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!("BOUNDED(12)".parse::<Scope>().unwrap(), Scope::Bounded(12));
    }

    #[test]
    fn subadditivization_examples() {
        // counting measure on a 3-point ground set is additive
        let count = |s: u32| ratio(s.count_ones() as i64, 3);
        for a in 0..8u32 {
            assert_eq!(subadditivize(count, a, 3).unwrap().value, count(a));
        }
        // μ vanishes on proper subsets of {1,2} but μ(X) = 1
        let mu = |s: u32| if s == 0b11 { ratio(1, 1) } else { ratio(0, 1) };
        let r = subadditivize(mu, 0b01, 2).unwrap();
        assert_eq!((r.value, r.maximizer), (ratio(1, 1), 0b10));
        assert!(subadditivize(mu, 0b01, 21).is_err());
        let partial = subadditivize_over(mu, 0b01, [0]).unwrap();
        assert_eq!(partial.value, ratio(0, 1));
        assert!(!partial.exhaustive);
    }

    #[test]
    fn subadditivized_sigma_r_is_sigma_r() {
        let g = Group::symmetric(3).unwrap();
        let oracle = |m: u32| {
            density_closed_form(&g, &GroupSubset::from_mask(6, m as u64), DensityKind::SigmaR)
        };
        for a in 0..64u32 {
            assert_eq!(subadditivize(oracle, a, 6).unwrap().value, oracle(a));
        }
    }

    #[test]
    fn relative_density_examples() {
        let c12 = Group::cyclic(12).unwrap();
        let h = c12.subset(&[0, 3, 6, 9]).unwrap();
        let k = DensityKind::SigmaCapR;
        assert_eq!(relative_density(&c12, &h, &c12.subset(&[0, 3]).unwrap(), k).unwrap(), ratio(1, 2));
        assert_eq!(relative_density(&c12, &h, &c12.full_set(), k).unwrap(), ratio(1, 1));
        assert_eq!(relative_density(&c12, &h, &c12.subset(&[1, 2]).unwrap(), k).unwrap(), ratio(0, 1));
        assert!(relative_density(&c12, &c12.subset(&[0, 1]).unwrap(), &h, k).is_err());
    }

    #[test]
    fn invariance_and_mirror_on_s3() {
        let g = Group::symmetric(3).unwrap();
        for mask in 0..64u64 {
            let a = GroupSubset::from_mask(6, mask);
            let inv = invert_set(&g, &a);
            let bf = |s: &GroupSubset, k| density_bruteforce(&g, s, k, 6).unwrap().value;
            assert_eq!(bf(&inv, DensityKind::SigmaCapR), bf(&a, DensityKind::SigmaCapL));
            assert_eq!(bf(&inv, DensityKind::SigmaR), bf(&a, DensityKind::SigmaL));
            let t = translate(&g, &a, 4, 2);
            assert_eq!(bf(&t, DensityKind::Sigma), bf(&a, DensityKind::Sigma));
        }
    }
}
