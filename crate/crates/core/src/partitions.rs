//! Covering numbers, packing indices and partition theorems on small finite
//! groups.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{guard, Error, Result};
use crate::group::{build_group, difference_set, product_set, Group, GroupSpec, GroupSubset};
use crate::rational::{self, Rational};
use crate::search::{max_independent_set, min_set_cover, Bits};

pub const PACK_ORDER_LIMIT: usize = 24;
pub const PROP122_ORDER_LIMIT: usize = 10;
pub const PARTITION_ORDER_LIMIT: usize = 8;
pub const PARTITION_CELL_LIMIT: usize = 4;
pub const ODD_ORDER_LIMIT: usize = 16;

/// The ideal `{∅}`.
pub fn trivial_ideal(s: &GroupSubset) -> bool {
    s.is_empty()
}

/// Sets of upper Banach density zero; on a finite group only `∅`.
pub fn density_zero_ideal(s: &GroupSubset) -> bool {
    s.is_empty()
}

fn nonempty(a: &GroupSubset) -> Result<()> {
    if a.is_empty() {
        Err(Error::Empty("subset"))
    } else {
        Ok(())
    }
}

/// Least `|F|` with `FA = G`, and the lexicographically least such `F`.
pub fn cov(g: &Group, a: &GroupSubset) -> Result<(usize, Vec<usize>)> {
    nonempty(a)?;
    let sets: Vec<Bits> = g
        .elements()
        .map(|x| Bits::from_iter(g.order(), a.iter().map(|e| g.mul(x, e))))
        .collect();
    let f = min_set_cover(&sets, g.order()).expect("translates of a nonempty set cover G");
    Ok((f.len(), f))
}

/// Most pairwise disjoint left translates of `A`, with the lexicographically
/// least maximal family of translating elements.
pub fn pack(g: &Group, a: &GroupSubset) -> Result<(usize, Vec<usize>)> {
    nonempty(a)?;
    let e = independent_translates(g, a, &trivial_ideal)?;
    Ok((e.len(), e))
}

/// Packing index relative to an ideal: translates may overlap in a set of
/// the ideal.
pub fn ipack(g: &Group, a: &GroupSubset, ideal: &dyn Fn(&GroupSubset) -> bool) -> Result<usize> {
    nonempty(a)?;
    Ok(independent_translates(g, a, ideal)?.len())
}

fn independent_translates(
    g: &Group,
    a: &GroupSubset,
    ideal: &dyn Fn(&GroupSubset) -> bool,
) -> Result<Vec<usize>> {
    guard("group order for packing", g.order(), PACK_ORDER_LIMIT)?;
    let translates: Vec<GroupSubset> = g
        .elements()
        .map(|x| crate::group::translate(g, a, x, 0))
        .collect();
    let mut adj = vec![0u64; g.order()];
    for x in g.elements() {
        for y in 0..x {
            if !ideal(&translates[x].intersection(&translates[y])) {
                adj[x] |= 1 << y;
                adj[y] |= 1 << x;
            }
        }
    }
    Ok(max_independent_set(&adj))
}

/// `Δ_I(A) = {x : A ∩ xA ∉ I}`.
pub fn delta_i_finite(g: &Group, a: &GroupSubset, ideal: &dyn Fn(&GroupSubset) -> bool) -> GroupSubset {
    let mut out = g.empty_set();
    for x in g.elements() {
        if !ideal(&a.intersection(&crate::group::translate(g, a, x, 0))) {
            out.insert(x);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop122Case {
    pub set: Vec<usize>,
    pub cov_difference: usize,
    pub pack: usize,
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop122Report {
    pub group: String,
    pub subsets_checked: usize,
    /// Cases with `pack(A) = ⌊|G|/|A|⌋`.
    pub tight: Vec<Prop122Case>,
    pub violations: Vec<Prop122Case>,
}

impl Prop122Report {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `cov(AA⁻¹) ≤ pack(A) ≤ ⌊|G|/|A|⌋` for every nonempty `A`.
pub fn verify_prop122(g: &Group) -> Result<Prop122Report> {
    guard("group order for exhaustive subsets", g.order(), PROP122_ORDER_LIMIT)?;
    let n = g.order();
    let cases: Vec<Prop122Case> = (1u64..1 << n)
        .into_par_iter()
        .map(|mask| {
            let a = GroupSubset::from_mask(n, mask);
            let (cov_difference, _) = cov(g, &difference_set(g, &a)).expect("nonempty");
            let (pack, _) = pack(g, &a).expect("nonempty");
            Prop122Case {
                set: a.to_indices(),
                cov_difference,
                pack,
                bound: n / a.len(),
            }
        })
        .collect();
    let subsets_checked = cases.len();
    let (violations, rest): (Vec<_>, Vec<_>) = cases
        .into_iter()
        .partition(|c| c.cov_difference > c.pack || c.pack > c.bound);
    Ok(Prop122Report {
        group: g.name(),
        subsets_checked,
        tight: rest.into_iter().filter(|c| c.pack == c.bound).collect(),
        violations,
    })
}

/// `max_{1≤k≤n} Σ_{i=0}^{n−k} kⁱ`.
pub fn thm139_bound(n: u32) -> u64 {
    (1..=n as u64)
        .map(|k| (0..=n as u64 - k).map(|i| k.pow(i as u32)).sum::<u64>())
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionTheorem {
    /// Bound `n`.
    Amenable,
    /// Bound [`thm139_bound`].
    General,
}

impl PartitionTheorem {
    pub fn as_str(self) -> &'static str {
        match self {
            PartitionTheorem::Amenable => "13.7",
            PartitionTheorem::General => "13.9",
        }
    }

    pub fn bound(self, n: usize) -> u64 {
        match self {
            PartitionTheorem::Amenable => n as u64,
            PartitionTheorem::General => thm139_bound(n as u32),
        }
    }
}

impl fmt::Display for PartitionTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartitionTheorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "13.7" => Ok(PartitionTheorem::Amenable),
            "13.9" => Ok(PartitionTheorem::General),
            _ => Err(Error::Parse(format!("unknown theorem {s:?} (expected 13.7 or 13.9)"))),
        }
    }
}

impl Serialize for PartitionTheorem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for PartitionTheorem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellStats {
    pub cell: Vec<usize>,
    pub cov_difference: usize,
    pub pack: usize,
    #[serde(with = "rational::serde_fraction")]
    pub density: Rational,
}

impl CellStats {
    fn compute(g: &Group, cell: &[usize]) -> Result<CellStats> {
        let a = g.subset(cell)?;
        Ok(CellStats {
            cell: cell.to_vec(),
            cov_difference: cov(g, &difference_set(g, &a))?.0,
            pack: pack(g, &a)?.0,
            density: rational::ratio(a.len() as i64, g.order() as i64),
        })
    }
}

/// Outcome of an exhaustive partition scan. The worst partition is the one
/// whose best cell has the largest `cov(AᵢAᵢ⁻¹)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionVerdict {
    pub group: String,
    pub order: usize,
    pub cells: usize,
    pub theorem: PartitionTheorem,
    pub bound: u64,
    pub partitions_checked: usize,
    pub worst_partition: Vec<Vec<usize>>,
    pub worst_value: usize,
    pub cell_stats: Vec<CellStats>,
    pub pass: bool,
}

#[derive(Deserialize)]
struct VerdictJson {
    group: String,
    order: usize,
    cells: usize,
    theorem: PartitionTheorem,
    bound: u64,
    partitions_checked: usize,
    worst_partition: Vec<Vec<usize>>,
    worst_value: usize,
    cell_stats: Vec<CellStats>,
    pass: bool,
}

impl<'de> Deserialize<'de> for PartitionVerdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = VerdictJson::deserialize(d)?;
        let v = PartitionVerdict {
            group: raw.group,
            order: raw.order,
            cells: raw.cells,
            theorem: raw.theorem,
            bound: raw.bound,
            partitions_checked: raw.partitions_checked,
            worst_partition: raw.worst_partition,
            worst_value: raw.worst_value,
            cell_stats: raw.cell_stats,
            pass: raw.pass,
        };
        v.recheck().map_err(serde::de::Error::custom)?;
        Ok(v)
    }
}

impl PartitionVerdict {
    /// Checks that the worst partition partitions the group into at most
    /// `cells` nonempty cells, and, when the group label names a
    /// constructible group, recomputes the cell statistics.
    pub fn recheck(&self) -> Result<()> {
        let mut seen = vec![false; self.order];
        for cell in &self.worst_partition {
            if cell.is_empty() {
                return Err(Error::InvalidArgument("empty cell".into()));
            }
            for &x in cell {
                if x >= self.order || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidArgument(format!("cells do not partition G at {x}")));
                }
            }
        }
        if seen.iter().any(|s| !s) || self.worst_partition.len() > self.cells {
            return Err(Error::InvalidArgument("cells do not partition G".into()));
        }
        if self.bound != self.theorem.bound(self.cells) {
            return Err(Error::InvalidArgument("bound does not match the theorem".into()));
        }
        if let Ok(spec) = self.group.parse::<GroupSpec>() {
            let g = build_group(&spec)?;
            if g.order() != self.order {
                return Err(Error::InvalidArgument("group order mismatch".into()));
            }
            let stats = self
                .worst_partition
                .iter()
                .map(|c| CellStats::compute(&g, c))
                .collect::<Result<Vec<_>>>()?;
            if stats != self.cell_stats {
                return Err(Error::InvalidArgument("cell statistics do not recompute".into()));
            }
            let best = stats.iter().map(|s| s.cov_difference).min().unwrap_or(0);
            if best != self.worst_value {
                return Err(Error::InvalidArgument("worst value does not recompute".into()));
            }
        }
        if self.pass != (self.worst_value as u64 <= self.bound) {
            return Err(Error::InvalidArgument("pass flag inconsistent".into()));
        }
        Ok(())
    }
}

/// All partitions of `0..m` into at most `n` nonempty cells, as restricted
/// growth strings: element 0 lies in cell 0 and cells are numbered by least
/// element.
pub fn restricted_growth_strings(m: usize, n: usize) -> Vec<Vec<u8>> {
    fn rec(m: usize, n: usize, cur: &mut Vec<u8>, used: u8, out: &mut Vec<Vec<u8>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        let top = (used as usize + 1).min(n);
        for c in 0..top {
            cur.push(c as u8);
            rec(m, n, cur, used.max(c as u8 + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 && n > 0 {
        rec(m, n, &mut vec![0], 1, &mut out);
        if m == 1 {
            return vec![vec![0]];
        }
    }
    out
}

fn cells_of(rgs: &[u8]) -> Vec<Vec<usize>> {
    let k = rgs.iter().copied().max().map_or(0, |c| c as usize + 1);
    let mut cells = vec![Vec::new(); k];
    for (x, &c) in rgs.iter().enumerate() {
        cells[c as usize].push(x);
    }
    cells
}

/// Covering numbers of `AA⁻¹` for every subset mask of a group of order
/// at most [`PARTITION_ORDER_LIMIT`].
fn cov_difference_table(g: &Group) -> Vec<usize> {
    let n = g.order();
    (0u64..1 << n)
        .into_par_iter()
        .map(|mask| {
            if mask == 0 {
                usize::MAX
            } else {
                let a = GroupSubset::from_mask(n, mask);
                cov(g, &difference_set(g, &a)).expect("nonempty").0
            }
        })
        .collect()
}

fn cell_masks(rgs: &[u8]) -> Vec<u64> {
    let mut masks = vec![0u64; rgs.iter().copied().max().map_or(0, |c| c as usize + 1)];
    for (x, &c) in rgs.iter().enumerate() {
        masks[c as usize] |= 1 << x;
    }
    masks
}

fn check_partition_args(g: &Group, n: usize) -> Result<()> {
    guard("group order for partition scans", g.order(), PARTITION_ORDER_LIMIT)?;
    guard("cell count", n, PARTITION_CELL_LIMIT)?;
    if n == 0 {
        return Err(Error::InvalidArgument("cell count must be positive".into()));
    }
    Ok(())
}

/// Scans every partition of `G` into at most `n` nonempty cells and checks
/// that some cell has `cov(AᵢAᵢ⁻¹)` within the theorem's bound.
pub fn verify_partition_theorem(g: &Group, n: usize, theorem: PartitionTheorem) -> Result<PartitionVerdict> {
    check_partition_args(g, n)?;
    let table = cov_difference_table(g);
    let strings = restricted_growth_strings(g.order(), n);
    let (worst_value, worst) = strings
        .par_iter()
        .map(|rgs| {
            let best = cell_masks(rgs).iter().map(|&m| table[m as usize]).min().unwrap();
            (best, cells_of(rgs))
        })
        .reduce_with(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
        .expect("at least one partition");
    let bound = theorem.bound(n);
    let cell_stats = worst
        .iter()
        .map(|c| CellStats::compute(g, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(PartitionVerdict {
        group: g.name(),
        order: g.order(),
        cells: n,
        theorem,
        bound,
        partitions_checked: strings.len(),
        worst_partition: worst,
        worst_value,
        cell_stats,
        pass: worst_value as u64 <= bound,
    })
}

pub fn verify_thm137(g: &Group, n: usize) -> Result<PartitionVerdict> {
    verify_partition_theorem(g, n, PartitionTheorem::Amenable)
}

pub fn verify_thm139(g: &Group, n: usize) -> Result<PartitionVerdict> {
    verify_partition_theorem(g, n, PartitionTheorem::General)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtasovCounterexample {
    pub group: String,
    pub cells: Vec<CellStats>,
}

/// Looks for a partition into at most `n` cells in which every cell has
/// `cov(AᵢAᵢ⁻¹) > n`. Returns the lexicographically least one.
pub fn protasov_search(g: &Group, n: usize) -> Result<Option<ProtasovCounterexample>> {
    check_partition_args(g, n)?;
    let table = cov_difference_table(g);
    let found = restricted_growth_strings(g.order(), n)
        .par_iter()
        .filter(|rgs| cell_masks(rgs).iter().all(|&m| table[m as usize] > n))
        .map(|rgs| cells_of(rgs))
        .min();
    found
        .map(|cells| {
            Ok(ProtasovCounterexample {
                group: g.name(),
                cells: cells
                    .iter()
                    .map(|c| CellStats::compute(g, c))
                    .collect::<Result<Vec<_>>>()?,
            })
        })
        .transpose()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddVerdict {
    pub group: String,
    /// Every element has odd order.
    pub odd: bool,
    /// Every 2-partition `G = A ∪ B` has `AA⁻¹ = G` or `BB⁻¹ = G`.
    pub property: bool,
    pub partitions_checked: usize,
    /// `(A, B)` with neither difference set equal to `G`.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
    pub consistent: bool,
}

/// Decides oddness directly and the 2-partition difference-set property
/// exhaustively, with `A` the cell of the identity taken in increasing mask
/// order.
pub fn odd_group_check(g: &Group) -> Result<OddVerdict> {
    guard("group order for odd check", g.order(), ODD_ORDER_LIMIT)?;
    let n = g.order();
    let odd = g.elements().all(|x| g.element_order(x) % 2 == 1);
    let full = g.full_set();
    let mut witness = None;
    let mut checked = 0;
    for mask in (1u64..1 << n).step_by(2) {
        checked += 1;
        let a = GroupSubset::from_mask(n, mask);
        let b = a.complement();
        if difference_set(g, &a) != full && difference_set(g, &b) != full {
            witness = Some((a.to_indices(), b.to_indices()));
            break;
        }
    }
    let property = witness.is_none();
    Ok(OddVerdict {
        group: g.name(),
        odd,
        property,
        partitions_checked: checked,
        witness,
        consistent: odd == property,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSubgroup {
    pub subgroup: Vec<usize>,
    /// The power `2ʲ` of `AA⁻¹` at which repeated squaring stabilized.
    pub exponent: u64,
    /// `4^{n−1}`.
    pub exponent_bound: u64,
    pub index: usize,
    pub is_subgroup: bool,
    pub holds: bool,
}

/// Squares `D = AA⁻¹` until `D·D = D`. Requires `|A|·n ≥ |G|`.
pub fn difference_power_subgroup(g: &Group, a: &GroupSubset, n: usize) -> Result<PowerSubgroup> {
    nonempty(a)?;
    if n == 0 || a.len() * n < g.order() {
        return Err(Error::InvalidArgument(format!(
            "density {}/{} is below 1/{n}",
            a.len(),
            g.order()
        )));
    }
    let mut d = difference_set(g, a);
    let mut exponent = 1u64;
    loop {
        let dd = product_set(g, &d, &d);
        if dd == d {
            break;
        }
        d = dd;
        exponent *= 2;
    }
    let exponent_bound = 4u64.saturating_pow(n as u32 - 1);
    let is_subgroup = g.is_subgroup(&d);
    let index = g.order() / d.len();
    Ok(PowerSubgroup {
        holds: is_subgroup && exponent <= exponent_bound && index <= n,
        subgroup: d.to_indices(),
        exponent,
        exponent_bound,
        index,
        is_subgroup,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm43Report {
    pub f: Vec<usize>,
    /// `⌊|G|/|A|⌋`.
    pub bound: usize,
    pub within_bound: bool,
    /// `F·AA⁻¹·F = G`.
    pub two_sided_cover: bool,
}

/// The cov-optimal `F` for `AA⁻¹`, checked against `⌊|G|/|A|⌋`.
pub fn thm43_search(g: &Group, a: &GroupSubset) -> Result<Thm43Report> {
    nonempty(a)?;
    let d = difference_set(g, a);
    let (size, f) = cov(g, &d)?;
    let fs = g.subset(&f)?;
    let two_sided = product_set(g, &product_set(g, &fs, &d), &fs).is_full();
    let bound = g.order() / a.len();
    Ok(Thm43Report {
        f,
        bound,
        within_bound: size <= bound,
        two_sided_cover: two_sided,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::small_groups;

    fn c(n: usize) -> Group {
        Group::cyclic(n).unwrap()
    }

    #[test]
    fn cov_and_pack_examples() {
        let g = c(6);
        let a = g.subset(&[0, 1]).unwrap();
        assert_eq!(cov(&g, &a).unwrap(), (3, vec![0, 2, 4]));
        assert_eq!(pack(&g, &a).unwrap(), (3, vec![0, 2, 4]));
        assert_eq!(cov(&g, &g.full_set()).unwrap().0, 1);
        assert_eq!(pack(&g, &g.full_set()).unwrap().0, 1);
        assert_eq!(pack(&g, &g.subset(&[3]).unwrap()).unwrap().0, 6);
        assert!(cov(&g, &g.empty_set()).is_err());
        let h = g.subset(&[0, 2, 4]).unwrap();
        assert_eq!(cov(&g, &h).unwrap().0, 2);
    }

    #[test]
    fn delta_examples() {
        let g = c(6);
        let a = g.subset(&[0, 1]).unwrap();
        assert_eq!(delta_i_finite(&g, &a, &trivial_ideal).to_indices(), vec![0, 1, 5]);
        assert!(delta_i_finite(&g, &g.full_set(), &trivial_ideal).is_full());
        assert!(delta_i_finite(&g, &a, &|_| true).is_empty());
        assert_eq!(ipack(&g, &a, &|_| true).unwrap(), 6);
    }

    #[test]
    fn prop122_exhaustive_small() {
        for g in small_groups(8) {
            let r = verify_prop122(&g).unwrap();
            assert!(r.holds(), "{}", g.name());
        }
        let r = verify_prop122(&c(6)).unwrap();
        assert!(r
            .tight
            .iter()
            .any(|t| t.set == vec![0, 1] && t.cov_difference == 2 && t.pack == 3 && t.bound == 3));
    }

    #[test]
    fn bound_formula() {
        assert_eq!(
            (1..=5).map(thm139_bound).collect::<Vec<_>>(),
            vec![1, 2, 3, 7, 15]
        );
    }

    #[test]
    fn rgs_counts_are_bell_partials() {
        assert_eq!(restricted_growth_strings(4, 4).len(), 15);
        assert_eq!(restricted_growth_strings(5, 2).len(), 16);
        assert_eq!(restricted_growth_strings(1, 3).len(), 1);
    }

    #[test]
    fn partition_theorems_cyclic8() {
        let v = verify_thm139(&c(8), 3).unwrap();
        assert!(v.pass);
        assert_eq!(v.bound, 3);
        let text = serde_json::to_string(&v).unwrap();
        let back: PartitionVerdict = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        let tampered = text.replace("\"pass\":true", "\"pass\":false");
        assert!(serde_json::from_str::<PartitionVerdict>(&tampered).is_err());
    }

    #[test]
    fn protasov_none() {
        assert!(protasov_search(&c(6), 2).unwrap().is_none());
        let s3 = Group::symmetric(3).unwrap();
        assert!(protasov_search(&s3, 2).unwrap().is_none());
        assert!(protasov_search(&c(5), 1).unwrap().is_none());
    }

    #[test]
    fn odd_examples() {
        let v = odd_group_check(&c(3)).unwrap();
        assert!(v.odd && v.property && v.consistent);
        let v = odd_group_check(&c(4)).unwrap();
        assert_eq!(v.witness, Some((vec![0, 1], vec![2, 3])));
        let v = odd_group_check(&c(2)).unwrap();
        assert_eq!(v.witness, Some((vec![0], vec![1])));
    }

    #[test]
    fn power_subgroup_examples() {
        let g = c(6);
        let r = difference_power_subgroup(&g, &g.subset(&[0, 1, 2]).unwrap(), 2).unwrap();
        assert!(r.subgroup.len() == 6 && r.exponent == 2 && r.index == 1 && r.holds);
        let r = difference_power_subgroup(&g, &g.subset(&[0, 2, 4]).unwrap(), 2).unwrap();
        assert_eq!((r.exponent, r.index), (1, 2));
        assert!(difference_power_subgroup(&g, &g.subset(&[0]).unwrap(), 2).is_err());
    }

    #[test]
    fn thm43_examples() {
        let g = c(6);
        let r = thm43_search(&g, &g.subset(&[0, 1]).unwrap()).unwrap();
        assert_eq!(r.f, vec![0, 3]);
        assert!(r.within_bound && r.two_sided_cover);
        let g8 = c(8);
        let r = thm43_search(&g8, &g8.subset(&[0, 4]).unwrap()).unwrap();
        assert_eq!((r.f.len(), r.bound), (4, 4));
    }
}
