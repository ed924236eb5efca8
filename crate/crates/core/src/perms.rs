//! Finitely supported permutations of ℕ = {1, 2, …} and conjugation into
//! a target domain.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of ℕ moving finitely many points. Only moved points are
/// stored. Serialized as a list of cycles.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSuppPermutation {
    map: BTreeMap<u64, u64>,
}

impl fmt::Display for FinSuppPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(u64::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FinSuppPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for FinSuppPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.cycles().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSuppPermutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cycles = Vec::<Vec<u64>>::deserialize(d)?;
        FinSuppPermutation::from_cycles(&cycles).map_err(serde::de::Error::custom)
    }
}

impl FinSuppPermutation {
    pub fn identity() -> FinSuppPermutation {
        FinSuppPermutation::default()
    }

    /// The product of disjoint cycles. Cycles must not share points.
    pub fn from_cycles(cycles: &[Vec<u64>]) -> Result<FinSuppPermutation> {
        let mut map = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for c in cycles {
            for &x in c {
                if x == 0 {
                    return Err(Error::InvalidArgument("points start at 1".into()));
                }
                if !seen.insert(x) {
                    return Err(Error::InvalidArgument(format!("point {x} repeated in cycles")));
                }
            }
            for (i, &x) in c.iter().enumerate() {
                let y = c[(i + 1) % c.len()];
                if x != y {
                    map.insert(x, y);
                }
            }
        }
        Ok(FinSuppPermutation { map })
    }

    pub fn transposition(x: u64, y: u64) -> FinSuppPermutation {
        FinSuppPermutation::from_cycles(&[vec![x, y]]).expect("distinct or trivial")
    }

    /// A permutation from an explicit mapping; points missing are fixed.
    pub fn from_map(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<FinSuppPermutation> {
        let map: BTreeMap<u64, u64> = pairs.into_iter().filter(|(x, y)| x != y).collect();
        if map.contains_key(&0) {
            return Err(Error::InvalidArgument("points start at 1".into()));
        }
        let images: BTreeSet<u64> = map.values().copied().collect();
        let domain: BTreeSet<u64> = map.keys().copied().collect();
        if images.len() != map.len() || images != domain {
            return Err(Error::InvalidArgument("mapping is not a permutation of its support".into()));
        }
        Ok(FinSuppPermutation { map })
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.map.get(&x).copied().unwrap_or(x)
    }

    pub fn support(&self) -> BTreeSet<u64> {
        self.map.keys().copied().collect()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn inverse(&self) -> FinSuppPermutation {
        FinSuppPermutation {
            map: self.map.iter().map(|(&x, &y)| (y, x)).collect(),
        }
    }

    /// Disjoint cycles, each starting at its least point, ordered by that
    /// point.
    pub fn cycles(&self) -> Vec<Vec<u64>> {
        let mut done = BTreeSet::new();
        let mut out = vec![];
        for &start in self.map.keys() {
            if done.contains(&start) {
                continue;
            }
            let mut c = vec![start];
            done.insert(start);
            let mut x = self.apply(start);
            while x != start {
                c.push(x);
                done.insert(x);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }
}

/// `f∘g`: apply `g` first.
pub fn perm_compose(f: &FinSuppPermutation, g: &FinSuppPermutation) -> FinSuppPermutation {
    let points: BTreeSet<u64> = f.map.keys().chain(g.map.keys()).copied().collect();
    FinSuppPermutation {
        map: points
            .into_iter()
            .map(|x| (x, f.apply(g.apply(x))))
            .filter(|(x, y)| x != y)
            .collect(),
    }
}

pub fn perm_support(f: &FinSuppPermutation) -> BTreeSet<u64> {
    f.support()
}

/// `f·g·f⁻¹`, which moves exactly `f(supp g)`.
pub fn perm_conjugate(f: &FinSuppPermutation, g: &FinSuppPermutation) -> FinSuppPermutation {
    FinSuppPermutation {
        map: g.map.iter().map(|(&x, &y)| (f.apply(x), f.apply(y))).collect(),
    }
}

/// An infinite subset of ℕ with decidable membership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainPattern {
    /// `{x ≥ n}`.
    Tail { n: u64 },
    /// `{x ≡ r mod m}`.
    Residue { m: u64, r: u64 },
}

/// A pattern minus finitely many excluded points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetDomain {
    pub pattern: DomainPattern,
    #[serde(default)]
    pub excluded: BTreeSet<u64>,
}

impl TargetDomain {
    pub fn tail(n: u64) -> TargetDomain {
        TargetDomain {
            pattern: DomainPattern::Tail { n },
            excluded: BTreeSet::new(),
        }
    }

    pub fn residue(m: u64, r: u64) -> Result<TargetDomain> {
        if m == 0 || r >= m {
            return Err(Error::InvalidArgument(format!("bad residue class {r} mod {m}")));
        }
        Ok(TargetDomain {
            pattern: DomainPattern::Residue { m, r },
            excluded: BTreeSet::new(),
        })
    }

    pub fn contains(&self, x: u64) -> bool {
        let in_pattern = match self.pattern {
            DomainPattern::Tail { n } => x >= n,
            DomainPattern::Residue { m, r } => m > 0 && x % m == r,
        };
        x > 0 && in_pattern && !self.excluded.contains(&x)
    }

    /// Members in increasing order.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        let (start, step) = match self.pattern {
            DomainPattern::Tail { n } => (n, 1),
            DomainPattern::Residue { m, r } => (r, m.max(1)),
        };
        (0..).map(move |i| start + i * step).filter(|&x| self.contains(x))
    }

    fn validate(&self) -> Result<()> {
        if let DomainPattern::Residue { m, r } = self.pattern {
            if m == 0 || r >= m {
                return Err(Error::InvalidArgument(format!("bad residue class {r} mod {m}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugationWitness {
    pub f: FinSuppPermutation,
    pub conjugates: Vec<FinSuppPermutation>,
}

/// `f` with `supp(f·s·f⁻¹) ⊆ E` for every `s ∈ S`.
///
/// Points of `supp(S)` outside `E` are swapped, in increasing order, with the
/// least points of `E` outside `supp(S)`.
pub fn conjugation_witness(s: &[FinSuppPermutation], e: &TargetDomain) -> Result<ConjugationWitness> {
    e.validate()?;
    let support: BTreeSet<u64> = s.iter().flat_map(|p| p.support()).collect();
    let displaced: Vec<u64> = support.iter().copied().filter(|&x| !e.contains(x)).collect();
    let fresh: Vec<u64> = e
        .members()
        .filter(|x| !support.contains(x))
        .take(displaced.len())
        .collect();
    let cycles: Vec<Vec<u64>> = displaced.iter().zip(&fresh).map(|(&d, &t)| vec![d, t]).collect();
    let f = FinSuppPermutation::from_cycles(&cycles)?;
    let conjugates: Vec<FinSuppPermutation> = s.iter().map(|p| perm_conjugate(&f, p)).collect();
    for c in &conjugates {
        if let Some(x) = c.support().into_iter().find(|&x| !e.contains(x)) {
            return Err(Error::Certificate(format!("conjugate moves {x} outside the target")));
        }
    }
    Ok(ConjugationWitness { f, conjugates })
}

/// `(x, y)` with `x·F·y ⊆ FS_E`: conjugation by the witness, so
/// `x = f` and `y = f⁻¹`.
pub fn solecki_one_witness(
    f: &[FinSuppPermutation],
    e: &TargetDomain,
) -> Result<(FinSuppPermutation, FinSuppPermutation)> {
    let w = conjugation_witness(f, e)?;
    let inv = w.f.inverse();
    Ok((w.f, inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(cs: &[&[u64]]) -> FinSuppPermutation {
        FinSuppPermutation::from_cycles(&cs.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn basics() {
        let t = cyc(&[&[1, 2]]);
        assert_eq!(t.support(), BTreeSet::from([1, 2]));
        let f = FinSuppPermutation::from_map([(1, 5), (5, 1), (2, 6), (6, 2)]).unwrap();
        assert_eq!(perm_conjugate(&f, &t), cyc(&[&[5, 6]]));
        let g = cyc(&[&[1, 2, 3], &[7, 9]]);
        assert!(perm_compose(&g, &g.inverse()).is_identity());
        assert_eq!(perm_compose(&cyc(&[&[1, 2]]), &cyc(&[&[2, 3]])), cyc(&[&[1, 2, 3]]));
        assert!(FinSuppPermutation::from_map([(1, 2)]).is_err());
        assert!(FinSuppPermutation::from_cycles(&[vec![1, 2], vec![2, 3]]).is_err());
    }

    #[test]
    fn json_cycles() {
        let g = cyc(&[&[3, 1, 2], &[7, 9]]);
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, "[[1,2,3],[7,9]]");
        assert_eq!(serde_json::from_str::<FinSuppPermutation>(&text).unwrap(), g);
        assert_eq!(g.to_string(), "(1 2 3)(7 9)");
    }

    #[test]
    fn witness_examples() {
        let w = conjugation_witness(&[cyc(&[&[1, 2]])], &TargetDomain::tail(5)).unwrap();
        assert_eq!(w.f, cyc(&[&[1, 5], &[2, 6]]));
        assert_eq!(w.conjugates, vec![cyc(&[&[5, 6]])]);

        let w = conjugation_witness(&[cyc(&[&[7, 8]])], &TargetDomain::tail(5)).unwrap();
        assert!(w.f.is_identity());

        let evens = TargetDomain::residue(2, 0).unwrap();
        let s = [cyc(&[&[1, 2]]), cyc(&[&[2, 3]])];
        let w = conjugation_witness(&s, &evens).unwrap();
        let image: BTreeSet<u64> = [1, 2, 3].iter().map(|&x| w.f.apply(x)).collect();
        assert_eq!(image, BTreeSet::from([2, 4, 6]));
        assert!(w.conjugates.iter().all(|c| c.support().iter().all(|&x| x % 2 == 0)));
        assert!(TargetDomain::residue(0, 0).is_err());
    }

    #[test]
    fn solecki_one_examples() {
        let f = [cyc(&[&[1, 2]]), cyc(&[&[3, 4]])];
        let (x, y) = solecki_one_witness(&f, &TargetDomain::tail(10)).unwrap();
        for s in &f {
            let c = perm_compose(&perm_compose(&x, s), &y);
            assert!(c.support().iter().all(|&p| p >= 10));
        }
        let (x, y) = solecki_one_witness(&f, &TargetDomain::tail(0)).unwrap();
        assert!(x.is_identity() && y.is_identity());
    }
}
