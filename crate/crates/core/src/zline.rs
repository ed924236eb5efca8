//! Eventually periodic subsets of ℤ and their additive combinatorics.
//!
//! A [`ZSet`] is a periodic set (residues mod `m`) changed on finitely many
//! points. It is kept in a normal form with the least period, so derived
//! equality is set equality.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::Scope;
use crate::error::{guard, Error, Result};
use crate::rational::{self, Rational};
use crate::search::{min_set_cover, Bits};

/// Largest period that combined operations may lift to.
pub const MODULUS_LIMIT: usize = 1 << 20;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ZSetJson", into = "ZSetJson")]
pub struct ZSet {
    m: u64,
    residues: BTreeSet<u64>,
    add: BTreeSet<i64>,
    remove: BTreeSet<i64>,
}

#[derive(Serialize, Deserialize)]
struct ZSetJson {
    m: u64,
    residues: Vec<u64>,
    #[serde(default)]
    add: Vec<i64>,
    #[serde(default)]
    remove: Vec<i64>,
}

impl TryFrom<ZSetJson> for ZSet {
    type Error = Error;

    fn try_from(j: ZSetJson) -> Result<ZSet> {
        ZSet::new(j.m, j.residues, j.add, j.remove)
    }
}

impl From<ZSet> for ZSetJson {
    fn from(z: ZSet) -> ZSetJson {
        ZSetJson {
            m: z.m,
            residues: z.residues.into_iter().collect(),
            add: z.add.into_iter().collect(),
            remove: z.remove.into_iter().collect(),
        }
    }
}

impl fmt::Debug for ZSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `m:r,r,…` followed by optional `;add=…` and `;remove=…` parts.
impl fmt::Display for ZSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(",");
        write!(f, "{}:{}", self.m, join(&mut self.residues.iter().map(u64::to_string)))?;
        if !self.add.is_empty() {
            write!(f, ";add={}", join(&mut self.add.iter().map(i64::to_string)))?;
        }
        if !self.remove.is_empty() {
            write!(f, ";remove={}", join(&mut self.remove.iter().map(i64::to_string)))?;
        }
        Ok(())
    }
}

impl FromStr for ZSet {
    type Err = Error;

    /// Accepts the [`Display`](fmt::Display) form or the JSON object form.
    fn from_str(s: &str) -> Result<ZSet> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        fn list<T: FromStr>(s: &str) -> Result<Vec<T>> {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad number {t:?}"))))
                .collect()
        }
        let mut parts = s.split(';');
        let head = parts.next().unwrap_or("");
        let (m, residues) = head
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected m:residues, got {head:?}")))?;
        let m = m.trim().parse().map_err(|_| Error::Parse(format!("bad modulus {m:?}")))?;
        let (mut add, mut remove) = (vec![], vec![]);
        for part in parts {
            match part.split_once('=') {
                Some(("add", v)) => add = list(v)?,
                Some(("remove", v)) => remove = list(v)?,
                _ => return Err(Error::Parse(format!("unknown part {part:?}"))),
            }
        }
        ZSet::new(m, list(residues)?, add, remove)
    }
}

fn lcm(a: u64, b: u64) -> Result<u64> {
    let l = a.lcm(&b);
    guard("lifted modulus", l as usize, MODULUS_LIMIT)?;
    Ok(l)
}

impl ZSet {
    /// The set `{x : (x mod m ∈ R and x ∉ remove) or x ∈ add}`.
    pub fn new(
        m: u64,
        residues: impl IntoIterator<Item = u64>,
        add: impl IntoIterator<Item = i64>,
        remove: impl IntoIterator<Item = i64>,
    ) -> Result<ZSet> {
        if m == 0 {
            return Err(Error::InvalidArgument("modulus must be at least 1".into()));
        }
        guard("modulus", m as usize, MODULUS_LIMIT)?;
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if let Some(r) = residues.iter().find(|&&r| r >= m) {
            return Err(Error::InvalidArgument(format!("residue {r} out of range mod {m}")));
        }
        let add: BTreeSet<i64> = add.into_iter().collect();
        let remove: BTreeSet<i64> = remove.into_iter().collect();
        if let Some(x) = add.intersection(&remove).next() {
            return Err(Error::InvalidArgument(format!("{x} is both added and removed")));
        }
        Ok(ZSet { m, residues, add, remove }.normalized())
    }

    pub fn periodic(m: u64, residues: impl IntoIterator<Item = u64>) -> Result<ZSet> {
        ZSet::new(m, residues, [], [])
    }

    pub fn finite(points: impl IntoIterator<Item = i64>) -> ZSet {
        ZSet::new(1, [], points, []).expect("finite sets are valid")
    }

    pub fn integers() -> ZSet {
        ZSet::periodic(1, [0]).unwrap()
    }

    pub fn empty() -> ZSet {
        ZSet::finite([])
    }

    /// Rebuilds the set with the least period and minimal patches.
    fn normalized(self) -> ZSet {
        let m = self.m;
        let period = divisors(m)
            .into_iter()
            .find(|&d| self.residues.iter().all(|&r| self.residues.contains(&((r + d) % m))))
            .unwrap_or(m);
        let residues: BTreeSet<u64> = self.residues.iter().map(|&r| r % period).collect();
        let in_periodic = |x: i64| residues.contains(&(x.rem_euclid(period as i64) as u64));
        let add = self.add.iter().copied().filter(|&x| !in_periodic(x)).collect();
        let remove = self
            .remove
            .iter()
            .copied()
            .filter(|&x| in_periodic(x) && !self.add.contains(&x))
            .collect();
        ZSet { m: period, residues, add, remove }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn residues(&self) -> impl Iterator<Item = u64> + '_ {
        self.residues.iter().copied()
    }

    pub fn add_patch(&self) -> impl Iterator<Item = i64> + '_ {
        self.add.iter().copied()
    }

    pub fn remove_patch(&self) -> impl Iterator<Item = i64> + '_ {
        self.remove.iter().copied()
    }

    pub fn has_patches(&self) -> bool {
        !self.add.is_empty() || !self.remove.is_empty()
    }

    fn residue_of(&self, x: i64) -> u64 {
        x.rem_euclid(self.m as i64) as u64
    }

    fn periodic_contains(&self, x: i64) -> bool {
        self.residues.contains(&self.residue_of(x))
    }

    pub fn contains(&self, x: i64) -> bool {
        self.add.contains(&x) || (self.periodic_contains(x) && !self.remove.contains(&x))
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty() && self.add.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    /// Largest `|x|` over the patch points, or 0.
    pub fn patch_horizon(&self) -> i64 {
        self.add
            .iter()
            .chain(&self.remove)
            .map(|x| x.abs())
            .max()
            .unwrap_or(0)
    }

    /// The periodic part alone.
    pub fn periodic_part(&self) -> ZSet {
        ZSet {
            m: self.m,
            residues: self.residues.clone(),
            add: BTreeSet::new(),
            remove: BTreeSet::new(),
        }
    }

    /// Residues of the periodic part lifted to a multiple `l` of the period.
    fn lifted(&self, l: u64) -> Vec<bool> {
        (0..l).map(|r| self.residues.contains(&(r % self.m))).collect()
    }

    fn combine(&self, other: &ZSet, f: impl Fn(bool, bool) -> bool) -> Result<ZSet> {
        let l = lcm(self.m, other.m)?;
        let (a, b) = (self.lifted(l), other.lifted(l));
        let residues: BTreeSet<u64> = (0..l as usize)
            .filter(|&r| f(a[r], b[r]))
            .map(|r| r as u64)
            .collect();
        let candidates: BTreeSet<i64> = self
            .add
            .iter()
            .chain(&self.remove)
            .chain(&other.add)
            .chain(&other.remove)
            .copied()
            .collect();
        let periodic = |x: i64| residues.contains(&(x.rem_euclid(l as i64) as u64));
        let (mut add, mut remove) = (vec![], vec![]);
        for x in candidates {
            let actual = f(self.contains(x), other.contains(x));
            if actual && !periodic(x) {
                add.push(x);
            } else if !actual && periodic(x) {
                remove.push(x);
            }
        }
        ZSet::new(l, residues, add, remove)
    }

    pub fn union(&self, other: &ZSet) -> Result<ZSet> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &ZSet) -> Result<ZSet> {
        self.combine(other, |a, b| a && b)
    }

    pub fn minus(&self, other: &ZSet) -> Result<ZSet> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &ZSet) -> Result<bool> {
        Ok(self.minus(other)?.is_empty())
    }

    pub fn complement(&self) -> ZSet {
        ZSet::new(
            self.m,
            (0..self.m).filter(|r| !self.residues.contains(r)),
            self.remove.iter().copied(),
            self.add.iter().copied(),
        )
        .expect("complement of a valid set")
    }

    /// `t + A`.
    pub fn shift(&self, t: i64) -> ZSet {
        let m = self.m as i64;
        ZSet::new(
            self.m,
            self.residues.iter().map(|&r| (r as i64 + t).rem_euclid(m) as u64),
            self.add.iter().map(|x| x + t),
            self.remove.iter().map(|x| x + t),
        )
        .expect("shift of a valid set")
    }

    /// `−A`.
    pub fn negate(&self) -> ZSet {
        let m = self.m as i64;
        ZSet::new(
            self.m,
            self.residues.iter().map(|&r| (-(r as i64)).rem_euclid(m) as u64),
            self.add.iter().map(|x| -x),
            self.remove.iter().map(|x| -x),
        )
        .expect("negation of a valid set")
    }

    /// `A ∩ [lo, hi]` in increasing order.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).filter(|&x| self.contains(x)).collect()
    }
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m % d == 0).collect()
}

/// Upper Banach density: `|R|/m`.
pub fn dstar(a: &ZSet) -> Rational {
    rational::ratio(a.residues.len() as i64, a.m as i64)
}

/// Interval Følner ratios `|A ∩ [c, c+n)|/n` for `n = 1..=depth`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FolnerTrace {
    pub start: i64,
    pub ratios: Vec<f64>,
    /// `tail_max[i] = max_{j ≥ i} ratios[j]`, the finite stand-in for limsup.
    pub tail_max: Vec<f64>,
    /// The ratio at the full depth. An estimate, not an exact value.
    pub estimate: f64,
}

pub fn folner_density(member: impl Fn(i64) -> bool, start: i64, depth: usize) -> Result<FolnerTrace> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut count = 0usize;
    let ratios: Vec<f64> = (0..depth)
        .map(|i| {
            if member(start + i as i64) {
                count += 1;
            }
            count as f64 / (i + 1) as f64
        })
        .collect();
    let mut tail_max = ratios.clone();
    for i in (0..depth.saturating_sub(1)).rev() {
        tail_max[i] = tail_max[i].max(tail_max[i + 1]);
    }
    Ok(FolnerTrace {
        start,
        estimate: ratios[depth - 1],
        ratios,
        tail_max,
    })
}

/// `A + B`, always exact.
///
/// When both periodic parts are nonempty, each sum of periodic residues has
/// infinitely many representations, so finite removals cannot affect it.
/// Every other contribution comes from an added point and is a shift.
pub fn sumset(a: &ZSet, b: &ZSet) -> Result<ZSet> {
    let mut out = if a.residues.is_empty() || b.residues.is_empty() {
        ZSet::empty()
    } else {
        // x ≡ r + s (mod gcd) is exactly what a sum of the two progressions hits
        let g = a.m.gcd(&b.m);
        let ra: BTreeSet<u64> = a.residues.iter().map(|r| r % g).collect();
        let rb: BTreeSet<u64> = b.residues.iter().map(|r| r % g).collect();
        ZSet::periodic(g, ra.iter().flat_map(|r| rb.iter().map(move |s| (r + s) % g)))?
    };
    for &p in &a.add {
        out = out.union(&b.shift(p))?;
    }
    for &q in &b.add {
        out = out.union(&a.shift(q))?;
    }
    Ok(out)
}

/// `A − A`.
pub fn difference_set(a: &ZSet) -> Result<ZSet> {
    sumset(a, &a.negate())
}

/// Residue overlap counts `|R ∩ (R + x)|` for `x` mod `m`.
fn overlaps(a: &ZSet) -> Vec<usize> {
    let m = a.m;
    (0..m)
        .map(|x| a.residues.iter().filter(|&&r| a.residues.contains(&((r + x) % m))).count())
        .collect()
}

/// `Δ_ε(A) = {x : d*(A ∩ (x + A)) ≥ ε}`.
pub fn delta_eps(a: &ZSet, eps: &Rational) -> ZSet {
    let m = a.m as i64;
    let res = overlaps(a)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| rational::ratio(c as i64, m) >= *eps)
        .map(|(x, _)| x as u64);
    ZSet::periodic(a.m, res).expect("valid residues")
}

/// `{x : d*(A ∩ (x + A)) > 0}`, the difference set modulo the null ideal.
pub fn delta_ideal(a: &ZSet) -> ZSet {
    let res = overlaps(a)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(x, _)| x as u64);
    ZSet::periodic(a.m, res).expect("valid residues")
}

/// An interval `[start, start + length)` contained in a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: i64,
    pub length: u64,
}

impl Interval {
    pub fn points(&self) -> impl Iterator<Item = i64> {
        let s = self.start;
        (0..self.length as i64).map(move |i| s + i)
    }
}

/// An interval of the given length inside a thick set, placed past the
/// patch horizon.
pub fn thick_interval(a: &ZSet, length: u64) -> Option<Interval> {
    if a.residues.len() as u64 != a.m {
        return None;
    }
    let iv = Interval {
        start: a.patch_horizon() + 1,
        length,
    };
    debug_assert!(iv.points().all(|x| a.contains(x)));
    Some(iv)
}

/// The lexicographically least smallest `F ⊆ [0, m)` with `F + R` covering
/// every residue mod `m`. Empty when `R` is empty.
fn residue_cover(a: &ZSet) -> Vec<i64> {
    if a.residues.is_empty() {
        return vec![];
    }
    let m = a.m as usize;
    let sets: Vec<Bits> = (0..m)
        .map(|f| Bits::from_iter(m, a.residues.iter().map(|&r| (r as usize + f) % m)))
        .collect();
    min_set_cover(&sets, m)
        .expect("translates of a nonempty residue set cover")
        .into_iter()
        .map(|f| f as i64)
        .collect()
}

/// `F` with `F + A = ℤ`: a residue cover, plus one repair per point that
/// the removals leave uncovered.
fn large_witness(a: &ZSet) -> Option<Vec<i64>> {
    let mut f = residue_cover(a);
    if f.is_empty() {
        return None;
    }
    let anchor = (a.patch_horizon() + 1..).find(|&x| a.contains(x)).unwrap();
    let lo = a.remove.iter().next().copied().unwrap_or(0);
    let hi = a.remove.iter().next_back().copied().unwrap_or(0) + a.m as i64;
    let covered = |z: i64, f: &[i64]| f.iter().any(|&t| a.contains(z - t));
    let mut repairs = vec![];
    for z in lo..=hi {
        if !covered(z, &f) && !covered(z, &repairs) {
            repairs.push(z - anchor);
        }
    }
    f.extend(repairs);
    f.sort_unstable();
    f.dedup();
    Some(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub thick: bool,
    pub large: bool,
    pub small: bool,
    /// `F` with `F + A = ℤ`.
    pub large_witness: Option<Vec<i64>>,
    pub thick_witness: Option<Interval>,
}

/// Thick iff every residue occurs; large iff some residue occurs; small
/// iff the set is finite.
pub fn classify(a: &ZSet, witness_length: u64) -> Classification {
    let large_witness = large_witness(a);
    Classification {
        thick: a.residues.len() as u64 == a.m,
        large: !a.residues.is_empty(),
        small: a.residues.is_empty(),
        large_witness,
        thick_witness: thick_interval(a, witness_length),
    }
}

/// Whether `F + A = ℤ`, checked exactly on one period past every patch.
pub fn covers_integers(a: &ZSet, f: &[i64]) -> Result<bool> {
    let mut u = ZSet::empty();
    for &t in f {
        u = u.union(&a.shift(t))?;
    }
    Ok(u == ZSet::integers())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JinWitness {
    pub f: Vec<i64>,
    /// `⌈1/(d*(A)·d*(B))⌉`.
    pub bound: u64,
    pub within_bound: bool,
    pub sumset: ZSet,
    pub thick_witness: Interval,
}

/// A smallest `F` making `F + A + B` thick.
pub fn jin_witness(a: &ZSet, b: &ZSet, witness_length: u64) -> Result<JinWitness> {
    let (da, db) = (dstar(a), dstar(b));
    if da == rational::zero() || db == rational::zero() {
        return Err(Error::InvalidArgument("both sets need positive upper Banach density".into()));
    }
    let s = sumset(a, b)?;
    let f = residue_cover(&s);
    let inv = (da * db).recip();
    let bound = inv.ceil().to_integer().to_string().parse::<u64>().expect("small bound");
    let mut fs = ZSet::empty();
    for &t in &f {
        fs = fs.union(&s.shift(t))?;
    }
    let thick_witness = thick_interval(&fs, witness_length).expect("cover of all residues is thick");
    Ok(JinWitness {
        within_bound: f.len() as u64 <= bound,
        bound,
        f,
        sumset: s,
        thick_witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma163Verdict {
    #[serde(with = "rational::serde_fraction")]
    pub density_sum: Rational,
    pub applicable: bool,
    pub sumset_thick: bool,
    pub thick_witness: Option<Interval>,
    /// Applicable implies thick.
    pub holds: bool,
}

pub fn lemma163_check(a: &ZSet, b: &ZSet, witness_length: u64) -> Result<Lemma163Verdict> {
    let sum = dstar(a) + dstar(b);
    let applicable = sum > rational::one();
    let s = sumset(a, b)?;
    let thick_witness = thick_interval(&s, witness_length);
    let thick = thick_witness.is_some();
    Ok(Lemma163Verdict {
        density_sum: sum,
        applicable,
        sumset_thick: thick,
        thick_witness,
        holds: !applicable || thick,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErgodicVerdict {
    /// `sup_F d*(F + A)`, which is 0 or 1.
    pub value: u8,
    pub f: Vec<i64>,
    /// `⌈1/d*(A)⌉` when `A` is infinite.
    pub ceil_bound: Option<u64>,
    pub within_ceil_bound: Option<bool>,
}

/// Returns 1 with a smallest `F` making `F + A` thick, or 0 when `A` is
/// finite. The size of `F` is compared against `⌈1/d*(A)⌉` and reported,
/// since that comparison can fail (residues `{0, 2}` mod 6 need four
/// translates).
pub fn ergodic_sup_check(a: &ZSet) -> ErgodicVerdict {
    if a.residues.is_empty() {
        return ErgodicVerdict {
            value: 0,
            f: vec![],
            ceil_bound: None,
            within_ceil_bound: None,
        };
    }
    let f = residue_cover(a);
    let bound = a.m.div_ceil(a.residues.len() as u64);
    ErgodicVerdict {
        value: 1,
        within_ceil_bound: Some(f.len() as u64 <= bound),
        ceil_bound: Some(bound),
        f,
    }
}

/// The congruence set `{x : x mod m ∈ residues}`, a Bohr set with rational
/// frequencies.
pub fn bohr_congruence(m: u64, residues: &[u64]) -> Result<ZSet> {
    if residues.is_empty() {
        return Err(Error::Empty("Bohr residues"));
    }
    ZSet::periodic(m, residues.iter().copied())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseBohr {
    /// `r + mℤ`.
    pub bohr: ZSet,
    /// `ℤ ∖ remove_patch`.
    pub thick: ZSet,
}

/// Splits `A ⊇ U ∩ T` with `U` a congruence class and `T` thick. Refuses
/// finite sets.
pub fn piecewise_bohr_check(a: &ZSet) -> Result<PiecewiseBohr> {
    let r = *a
        .residues
        .iter()
        .next()
        .ok_or_else(|| Error::InvalidArgument("finite sets are not piecewise Bohr".into()))?;
    let bohr = bohr_congruence(a.m, &[r])?;
    let thick = ZSet::new(1, [0], [], a.remove.iter().copied())?;
    let inside = bohr.intersect(&thick)?.is_subset(a)?;
    assert!(inside, "U ∩ T ⊆ A");
    Ok(PiecewiseBohr { bohr, thick })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedConsequences {
    pub dstar_le: bool,
    pub difference_subset: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embeddability {
    pub embeddable: bool,
    pub scope: Scope,
    /// The finite set that was tested.
    pub f: Vec<i64>,
    pub shift: Option<i64>,
    pub consequences: Option<EmbedConsequences>,
}

/// Whether every finite `F ⊆ A` has a translate inside `B`.
///
/// Without patches the question reduces to one period of the lifted
/// residues and the verdict is exact. Otherwise `F = A ∩ [−L, L]` is tested
/// against shifts across one lifted period beyond the patch horizons.
pub fn finitely_embeddable(a: &ZSet, b: &ZSet, depth: u64) -> Result<Embeddability> {
    let l = lcm(a.m, b.m)?;
    let (f, shift, scope) = if !a.has_patches() && !b.has_patches() {
        let f: Vec<i64> = (0..l as i64).filter(|&x| a.contains(x)).collect();
        let shift = (0..l as i64).find(|&x| f.iter().all(|&y| b.contains(y + x)));
        (f, shift, Scope::Exact)
    } else {
        let d = depth as i64;
        let f = a.window(-d, d);
        let h = d + a.patch_horizon() + b.patch_horizon() + l as i64;
        let shift = std::iter::once(0)
            .chain((1..=h).flat_map(|x| [x, -x]))
            .find(|&x| f.iter().all(|&y| b.contains(y + x)));
        (f, shift, Scope::Bounded(depth))
    };
    let consequences = match shift {
        Some(_) => Some(EmbedConsequences {
            dstar_le: dstar(a) <= dstar(b),
            difference_subset: difference_set(a)?.is_subset(&difference_set(b)?)?,
        }),
        None => None,
    };
    Ok(Embeddability {
        embeddable: shift.is_some(),
        scope,
        f,
        shift,
        consequences,
    })
}

/// The first `k` primes.
fn first_primes(k: usize) -> Vec<u64> {
    (2u64..).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).take(k).collect()
}

pub const PRIMES_K_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimesRow {
    pub k: usize,
    pub n_k: u64,
    pub phi: u64,
    /// `k + 2φ(n_k)`, not reduced against `n_k`.
    pub bound_num: u64,
    pub bound_den: u64,
    /// Largest `|(y + (0, n_k]) ∩ P|` over the verification window.
    pub empirical_max: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimesTable {
    pub horizon: u64,
    pub rows: Vec<PrimesRow>,
    /// `bound_k` strictly decreasing from `k = 2` on.
    pub strictly_decreasing: bool,
}

impl PrimesRow {
    pub fn bound(&self) -> Rational {
        rational::ratio(self.bound_num as i64, self.bound_den as i64)
    }
}

/// Primorials `n_k`, totients, the bounds `(k + 2φ(n_k))/n_k`, and the
/// largest prime count over windows `y + (0, n_k]` for `0 ≤ y ≤ horizon`.
pub fn primes_bound_table(k_max: usize, horizon: u64) -> Result<PrimesTable> {
    guard("k_max", k_max, PRIMES_K_LIMIT)?;
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let primes = first_primes(k_max);
    let n_max: u64 = primes.iter().product();
    if horizon < n_max {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} is below n_{k_max} = {n_max}"
        )));
    }
    let limit = (horizon + n_max) as usize;
    let mut composite = vec![false; limit + 1];
    composite[0] = true;
    if limit >= 1 {
        composite[1] = true;
    }
    let mut p = 2;
    while p * p <= limit {
        if !composite[p] {
            for q in (p * p..=limit).step_by(p) {
                composite[q] = true;
            }
        }
        p += 1;
    }
    // prefix[i] = number of primes below i
    let mut prefix = vec![0u32; limit + 2];
    for i in 0..=limit {
        prefix[i + 1] = prefix[i] + u32::from(!composite[i]);
    }
    drop(composite);

    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let n_k: u64 = primes[..k].iter().product();
        let phi: u64 = primes[..k].iter().map(|p| p - 1).product();
        let mertens: Rational = primes[..k]
            .iter()
            .map(|&p| rational::one() - rational::ratio(1, p as i64))
            .product();
        assert_eq!(rational::ratio(phi as i64, n_k as i64), mertens);
        let empirical_max = (0..=horizon)
            .into_par_iter()
            .map(|y| u64::from(prefix[(y + n_k + 1) as usize] - prefix[(y + 1) as usize]))
            .max()
            .unwrap_or(0);
        let bound_num = k as u64 + 2 * phi;
        rows.push(PrimesRow {
            k,
            n_k,
            phi,
            bound_num,
            bound_den: n_k,
            empirical_max,
            holds: empirical_max <= bound_num,
        });
    }
    let strictly_decreasing = rows
        .windows(2)
        .skip(1)
        .all(|w| w[1].bound() < w[0].bound());
    Ok(PrimesTable {
        horizon,
        rows,
        strictly_decreasing,
    })
}

/// Lane `lane` of `lanes` interleaved block sets: block `j = 1, 2, …`
/// is `[j(j−1)/2, j(j−1)/2 + j)` and belongs to lane `(j − 1) mod lanes`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSet {
    pub lanes: u64,
    pub lane: u64,
}

impl BlockSet {
    /// The block containing `x ≥ 0`.
    fn block_of(x: i64) -> Option<u64> {
        if x < 0 {
            return None;
        }
        // largest j with j(j−1)/2 ≤ x
        let mut j = (((8.0 * x as f64 + 1.0).sqrt() + 1.0) / 2.0) as u64;
        while j * (j - 1) / 2 > x as u64 {
            j -= 1;
        }
        while (j + 1) * j / 2 <= x as u64 {
            j += 1;
        }
        Some(j)
    }

    pub fn contains(&self, x: i64) -> bool {
        Self::block_of(x).is_some_and(|j| (j - 1) % self.lanes == self.lane)
    }

    /// The `i`-th block of this lane, `i ≥ 0`.
    pub fn block(&self, i: u64) -> Interval {
        let j = self.lane + 1 + i * self.lanes;
        Interval {
            start: (j * (j - 1) / 2) as i64,
            length: j,
        }
    }

    /// The first block of length at least `length`.
    pub fn thick_witness(&self, length: u64) -> Interval {
        let i = length.saturating_sub(self.lane + 1).div_ceil(self.lanes);
        self.block(i)
    }
}

pub fn disjoint_thick_family(n: u64) -> Result<Vec<BlockSet>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one lane".into()));
    }
    Ok((0..n).map(|lane| BlockSet { lanes: n, lane }).collect())
}

pub const IP_K_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IpSearch {
    pub generators: Option<Vec<i64>>,
    pub bound: i64,
    pub nodes: u64,
    /// No generators exist in `[1, bound]`. Says nothing beyond the bound.
    pub exhausted: bool,
}

/// Depth-first search for `x₁ < ⋯ < x_k` in `[1, bound]` with every
/// nonempty subset sum in `A`.
pub fn ip_witness_search(a: &ZSet, k: usize, bound: i64) -> Result<IpSearch> {
    guard("IP generator count", k, IP_K_LIMIT)?;
    fn rec(a: &ZSet, k: usize, bound: i64, gens: &mut Vec<i64>, sums: &mut Vec<i64>, nodes: &mut u64) -> bool {
        if gens.len() == k {
            return true;
        }
        let lo = gens.last().map_or(1, |x| x + 1);
        for x in lo..=bound {
            *nodes += 1;
            if !a.contains(x) || !sums.iter().all(|s| a.contains(s + x)) {
                continue;
            }
            let before = sums.len();
            let new: Vec<i64> = sums.iter().map(|s| s + x).chain([x]).collect();
            sums.extend(new);
            gens.push(x);
            if rec(a, k, bound, gens, sums, nodes) {
                return true;
            }
            gens.pop();
            sums.truncate(before);
        }
        false
    }
    let (mut gens, mut sums, mut nodes) = (vec![], vec![], 0);
    let found = rec(a, k, bound, &mut gens, &mut sums, &mut nodes);
    Ok(IpSearch {
        generators: found.then_some(gens),
        bound,
        nodes,
        exhausted: !found,
    })
}
