//! Finite groups as multiplication tables, and the subset algebra on them.
//!
//! Elements are indices `0..order`; index 0 is always the identity. Every
//! constructor fixes a canonical element order so that witnesses found by
//! the exhaustive searches elsewhere in the crate are reproducible.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{guard, Error, Result};

/// Default cap on the order of a stored multiplication table.
pub const DEFAULT_ORDER_LIMIT: usize = 64;

/// First failing group axiom found by [`validate_group`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    NotSquare { row: usize },
    OutOfRange { row: usize, col: usize, value: usize },
    Identity { g: usize },
    Inverse { g: usize },
    Associativity { a: usize, b: usize, c: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty table"),
            Violation::NotSquare { row } => write!(f, "row {row} has the wrong length"),
            Violation::OutOfRange { row, col, value } => {
                write!(f, "entry ({row},{col}) = {value} is out of range")
            }
            Violation::Identity { g } => write!(f, "element 0 is not an identity at g={g}"),
            Violation::Inverse { g } => write!(f, "no unique inverse for g={g}"),
            Violation::Associativity { a, b, c } => {
                write!(f, "(a*b)*c != a*(b*c) at a={a}, b={b}, c={c}")
            }
        }
    }
}

/// Checks the group axioms on a square table, returning the first violation
/// in the order: shape, identity, inverses, associativity. Within each axiom
/// the scan is lexicographic, so the reported indices are the least ones.
pub fn validate_group(table: &[Vec<usize>]) -> std::result::Result<(), Violation> {
    let n = table.len();
    if n == 0 {
        return Err(Violation::Empty);
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != n {
            return Err(Violation::NotSquare { row });
        }
        if let Some((col, &value)) = r.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(Violation::OutOfRange { row, col, value });
        }
    }
    for g in 0..n {
        if table[0][g] != g || table[g][0] != g {
            return Err(Violation::Identity { g });
        }
    }
    for g in 0..n {
        let count = (0..n)
            .filter(|&h| table[g][h] == 0 && table[h][g] == 0)
            .count();
        if count != 1 {
            return Err(Violation::Inverse { g });
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = table[a][b];
            for c in 0..n {
                if table[ab][c] != table[a][table[b][c]] {
                    return Err(Violation::Associativity { a, b, c });
                }
            }
        }
    }
    Ok(())
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    label: Option<String>,
}

/// Serialized form: `{order, table, label}` with `table` as a list of rows.
#[derive(Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    table: Vec<Vec<usize>>,
    #[serde(default)]
    label: Option<String>,
}

impl Serialize for Group {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupJson {
            order: self.order,
            table: self.rows(),
            label: self.label.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GroupJson::deserialize(d)?;
        if raw.order != raw.table.len() {
            return Err(serde::de::Error::custom("order does not match table size"));
        }
        Group::from_table_with_limit(raw.table, raw.label, usize::MAX)
            .map_err(serde::de::Error::custom)
    }
}

impl Group {
    pub fn from_table(table: Vec<Vec<usize>>, label: Option<String>) -> Result<Group> {
        Group::from_table_with_limit(table, label, DEFAULT_ORDER_LIMIT)
    }

    pub fn from_table_with_limit(
        table: Vec<Vec<usize>>,
        label: Option<String>,
        limit: usize,
    ) -> Result<Group> {
        guard("group order", table.len(), limit)?;
        validate_group(&table).map_err(Error::InvalidTable)?;
        let order = table.len();
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let inverse = (0..order)
            .map(|g| {
                (0..order)
                    .find(|&h| flat[g * order + h] == 0)
                    .expect("validated")
            })
            .collect();
        Ok(Group {
            order,
            table: flat,
            inverse,
            label,
        })
    }

    /// Builds a table from a product rule on `0..order` without re-validating.
    /// Only used by constructors whose rule is a group law by construction;
    /// debug builds still validate.
    fn from_rule(order: usize, label: String, rule: impl Fn(usize, usize) -> usize) -> Group {
        let table: Vec<Vec<usize>> = (0..order)
            .map(|a| (0..order).map(|b| rule(a, b)).collect())
            .collect();
        debug_assert_eq!(validate_group(&table), Ok(()));
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let inverse = (0..order)
            .map(|g| (0..order).find(|&h| flat[g * order + h] == 0).unwrap())
            .collect();
        Group {
            order,
            table: flat,
            inverse,
            label: Some(label),
        }
    }

    pub fn cyclic(n: usize) -> Result<Group> {
        Group::cyclic_with_limit(n, DEFAULT_ORDER_LIMIT)
    }

    fn cyclic_with_limit(n: usize, limit: usize) -> Result<Group> {
        positive(n, "cyclic order")?;
        guard("group order", n, limit)?;
        Ok(Group::from_rule(n, format!("cyclic:{n}"), |a, b| (a + b) % n))
    }

    /// Symmetries of the regular `n`-gon, order `2n`. Index `k < n` is the
    /// rotation `r^k`; index `n + k` is the reflection `s r^k`.
    pub fn dihedral(n: usize) -> Result<Group> {
        Group::dihedral_with_limit(n, DEFAULT_ORDER_LIMIT)
    }

    fn dihedral_with_limit(n: usize, limit: usize) -> Result<Group> {
        positive(n, "dihedral parameter")?;
        guard("group order", 2 * n, limit)?;
        Ok(Group::from_rule(2 * n, format!("dihedral:{n}"), |x, y| {
            let (sx, a) = (x >= n, x % n);
            let (sy, b) = (y >= n, y % n);
            match (sx, sy) {
                (false, false) => (a + b) % n,
                (false, true) => n + (b + n - a) % n,
                (true, false) => n + (a + b) % n,
                (true, true) => (b + n - a) % n,
            }
        }))
    }

    /// Dicyclic group of order `4n`: `a` of order `2n`, `x^2 = a^n`,
    /// `x a x^-1 = a^-1`. Index `k + 2n e` is `a^k x^e`. `n = 2` gives the
    /// quaternion group.
    pub fn dicyclic(n: usize) -> Result<Group> {
        Group::dicyclic_with_limit(n, DEFAULT_ORDER_LIMIT)
    }

    fn dicyclic_with_limit(n: usize, limit: usize) -> Result<Group> {
        positive(n, "dicyclic parameter")?;
        guard("group order", 4 * n, limit)?;
        let m = 2 * n;
        Ok(Group::from_rule(4 * n, format!("dicyclic:{n}"), |x, y| {
            let (i, e) = (x % m, x / m);
            let (j, f) = (y % m, y / m);
            let mut k = if e == 1 { (i + m - j) % m } else { (i + j) % m };
            if e == 1 && f == 1 {
                k = (k + n) % m;
            }
            k + m * (e ^ f)
        }))
    }

    /// Symmetric group on `n ≤ 5` points, elements in lexicographic order of
    /// their one-line notation. Product is composition `(p q)(i) = p(q(i))`.
    pub fn symmetric(n: usize) -> Result<Group> {
        Group::symmetric_with_limit(n, DEFAULT_ORDER_LIMIT)
    }

    fn symmetric_with_limit(n: usize, limit: usize) -> Result<Group> {
        positive(n, "symmetric degree")?;
        guard("symmetric degree", n, 5)?;
        let perms = permutations(n);
        guard("group order", perms.len(), limit)?;
        Ok(Group::from_permutations(&perms, format!("symmetric:{n}")))
    }

    /// Even permutations on `n ≤ 5` points, lexicographic order.
    pub fn alternating(n: usize) -> Result<Group> {
        Group::alternating_with_limit(n, DEFAULT_ORDER_LIMIT)
    }

    fn alternating_with_limit(n: usize, limit: usize) -> Result<Group> {
        positive(n, "alternating degree")?;
        guard("alternating degree", n, 5)?;
        let perms: Vec<Vec<usize>> = permutations(n)
            .into_iter()
            .filter(|p| is_even(p))
            .collect();
        guard("group order", perms.len(), limit)?;
        Ok(Group::from_permutations(&perms, format!("alternating:{n}")))
    }

    fn from_permutations(perms: &[Vec<usize>], label: String) -> Group {
        let index: HashMap<&[usize], usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), i))
            .collect();
        Group::from_rule(perms.len(), label, |a, b| {
            let c: Vec<usize> = perms[b].iter().map(|&i| perms[a][i]).collect();
            index[c.as_slice()]
        })
    }

    /// Direct product; the pair `(g, h)` has index `g * |H| + h`.
    pub fn direct_product(g: &Group, h: &Group) -> Result<Group> {
        Group::direct_product_with_limit(g, h, DEFAULT_ORDER_LIMIT)
    }

    fn direct_product_with_limit(g: &Group, h: &Group, limit: usize) -> Result<Group> {
        let order = g.order * h.order;
        guard("group order", order, limit)?;
        let m = h.order;
        Ok(Group::from_rule(
            order,
            format!("{}*{}", g.name(), h.name()),
            |x, y| g.mul(x / m, y / m) * m + h.mul(x % m, y % m),
        ))
    }

    /// Quotient by a normal subgroup. Cosets are represented by their least
    /// element and numbered in increasing order of representative.
    pub fn quotient(g: &Group, normal: &GroupSubset) -> Result<Group> {
        Ok(quotient_map(g, normal)?.target)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// The label, or `"table:<order>"` for anonymous tables.
    pub fn name(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| format!("table:{}", self.order))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Group {
        self.label = Some(label.into());
        self
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn empty_set(&self) -> GroupSubset {
        GroupSubset::empty(self.order)
    }

    pub fn full_set(&self) -> GroupSubset {
        GroupSubset::full(self.order)
    }

    pub fn subset(&self, elements: &[usize]) -> Result<GroupSubset> {
        GroupSubset::from_indices(self.order, elements)
    }

    pub fn is_subgroup(&self, h: &GroupSubset) -> bool {
        h.contains(0)
            && h.iter()
                .all(|a| h.contains(self.inv(a)) && h.iter().all(|b| h.contains(self.mul(a, b))))
    }

    pub fn is_normal(&self, n: &GroupSubset) -> bool {
        self.is_subgroup(n) && (0..self.order).all(|g| n.iter().all(|x| n.contains(self.conjugate(g, x))))
    }
}

fn positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument(format!("{what} must be positive")))
    } else {
        Ok(())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    // Lexicographic order via repeated next-permutation.
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

fn is_even(p: &[usize]) -> bool {
    let inversions = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    inversions % 2 == 0
}

/// Description of a group to build; parsed from strings such as
/// `cyclic:6`, `dihedral:4`, `s3`, `q8` or `cyclic:2*cyclic:4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Dicyclic(usize),
    Symmetric(usize),
    Alternating(usize),
    Product(Box<GroupSpec>, Box<GroupSpec>),
    Table(Vec<Vec<usize>>),
    Quotient(Box<GroupSpec>, Vec<usize>),
}

pub fn build_group(spec: &GroupSpec) -> Result<Group> {
    build_group_with_limit(spec, DEFAULT_ORDER_LIMIT)
}

pub fn build_group_with_limit(spec: &GroupSpec, limit: usize) -> Result<Group> {
    match spec {
        GroupSpec::Cyclic(n) => Group::cyclic_with_limit(*n, limit),
        GroupSpec::Dihedral(n) => Group::dihedral_with_limit(*n, limit),
        GroupSpec::Dicyclic(n) => Group::dicyclic_with_limit(*n, limit),
        GroupSpec::Symmetric(n) => Group::symmetric_with_limit(*n, limit),
        GroupSpec::Alternating(n) => Group::alternating_with_limit(*n, limit),
        GroupSpec::Product(a, b) => Group::direct_product_with_limit(
            &build_group_with_limit(a, limit)?,
            &build_group_with_limit(b, limit)?,
            limit,
        ),
        GroupSpec::Table(t) => Group::from_table_with_limit(t.clone(), None, limit),
        GroupSpec::Quotient(g, n) => {
            let g = build_group_with_limit(g, limit)?;
            let n = g.subset(n)?;
            Group::quotient(&g, &n)
        }
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<GroupSpec> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('*') {
            return Ok(GroupSpec::Product(Box::new(a.parse()?), Box::new(b.parse()?)));
        }
        let bad = || Error::Parse(format!("unknown group {s:?}"));
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "s3" => return Ok(GroupSpec::Symmetric(3)),
            "s4" => return Ok(GroupSpec::Symmetric(4)),
            "a4" => return Ok(GroupSpec::Alternating(4)),
            "q8" | "quaternion" => return Ok(GroupSpec::Dicyclic(2)),
            "trivial" => return Ok(GroupSpec::Cyclic(1)),
            _ => {}
        }
        let (kind, arg) = lower.split_once(':').ok_or_else(bad)?;
        let n: usize = arg.parse().map_err(|_| bad())?;
        match kind {
            "cyclic" | "c" | "z" => Ok(GroupSpec::Cyclic(n)),
            "dihedral" | "d" => Ok(GroupSpec::Dihedral(n)),
            "dicyclic" => Ok(GroupSpec::Dicyclic(n)),
            "symmetric" | "s" => Ok(GroupSpec::Symmetric(n)),
            "alternating" | "a" => Ok(GroupSpec::Alternating(n)),
            _ => Err(bad()),
        }
    }
}

/// A subset of a finite group, stored as a bit mask over element indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSubset {
    order: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for GroupSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_indices().serialize(s)
    }
}

impl GroupSubset {
    pub fn empty(order: usize) -> GroupSubset {
        GroupSubset {
            order,
            bits: vec![0; order.div_ceil(64)],
        }
    }

    pub fn full(order: usize) -> GroupSubset {
        let mut s = GroupSubset::empty(order);
        for g in 0..order {
            s.insert(g);
        }
        s
    }

    pub fn from_indices(order: usize, elements: &[usize]) -> Result<GroupSubset> {
        let mut s = GroupSubset::empty(order);
        for &g in elements {
            if g >= order {
                return Err(Error::InvalidArgument(format!(
                    "element {g} out of range for order {order}"
                )));
            }
            s.insert(g);
        }
        Ok(s)
    }

    /// Subset of a group of order ≤ 64 from a bit mask.
    pub fn from_mask(order: usize, mask: u64) -> GroupSubset {
        assert!(order <= 64);
        let keep = if order == 64 { u64::MAX } else { (1u64 << order) - 1 };
        GroupSubset {
            order,
            bits: vec![mask & keep; usize::from(order > 0)],
        }
    }

    /// Bit mask of a subset of a group of order ≤ 64.
    pub fn mask(&self) -> u64 {
        assert!(self.order <= 64);
        self.bits.first().copied().unwrap_or(0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        g < self.order && self.bits[g / 64] >> (g % 64) & 1 == 1
    }

    pub fn insert(&mut self, g: usize) {
        assert!(g < self.order);
        self.bits[g / 64] |= 1 << (g % 64);
    }

    pub fn remove(&mut self, g: usize) {
        if g < self.order {
            self.bits[g / 64] &= !(1 << (g % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.order
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order).filter(move |&g| self.contains(g))
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    fn zip(&self, other: &GroupSubset, op: impl Fn(u64, u64) -> u64) -> GroupSubset {
        assert_eq!(self.order, other.order, "subsets of different groups");
        GroupSubset {
            order: self.order,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| op(a, b)).collect(),
        }
    }

    pub fn union(&self, other: &GroupSubset) -> GroupSubset {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &GroupSubset) -> GroupSubset {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &GroupSubset) -> GroupSubset {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> GroupSubset {
        GroupSubset::full(self.order).difference(self)
    }

    pub fn is_subset(&self, other: &GroupSubset) -> bool {
        self.difference(other).is_empty()
    }

    pub fn intersection_len(&self, other: &GroupSubset) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

/// `xAy`.
pub fn translate(g: &Group, a: &GroupSubset, x: usize, y: usize) -> GroupSubset {
    let mut out = g.empty_set();
    for e in a.iter() {
        out.insert(g.mul(g.mul(x, e), y));
    }
    out
}

/// `A⁻¹`.
pub fn invert_set(g: &Group, a: &GroupSubset) -> GroupSubset {
    let mut out = g.empty_set();
    for e in a.iter() {
        out.insert(g.inv(e));
    }
    out
}

/// `AB = {ab : a ∈ A, b ∈ B}`.
pub fn product_set(g: &Group, a: &GroupSubset, b: &GroupSubset) -> GroupSubset {
    let mut out = g.empty_set();
    for x in a.iter() {
        for y in b.iter() {
            out.insert(g.mul(x, y));
        }
    }
    out
}

/// The difference set `AA⁻¹`.
pub fn difference_set(g: &Group, a: &GroupSubset) -> GroupSubset {
    product_set(g, a, &invert_set(g, a))
}

/// Closure of `S ∪ {1}` under products and inverses.
pub fn subgroup_generated(g: &Group, s: &GroupSubset) -> GroupSubset {
    let mut h = g.empty_set();
    h.insert(0);
    let mut frontier: Vec<usize> = vec![0];
    let gens: Vec<usize> = s.iter().flat_map(|x| [x, g.inv(x)]).collect();
    while let Some(x) = frontier.pop() {
        for &t in &gens {
            let y = g.mul(x, t);
            if !h.contains(y) {
                h.insert(y);
                frontier.push(y);
            }
        }
    }
    h
}

/// `|G| / |H|` for a subgroup `H`.
pub fn index(g: &Group, h: &GroupSubset) -> Result<usize> {
    if !g.is_subgroup(h) {
        return Err(Error::NotSubgroup(h.to_indices()));
    }
    assert_eq!(g.order() % h.len(), 0, "Lagrange");
    Ok(g.order() / h.len())
}

/// The conjugacy class `x^G = {g x g⁻¹}`.
pub fn conjugacy_class(g: &Group, x: usize) -> GroupSubset {
    let mut out = g.empty_set();
    for h in g.elements() {
        out.insert(g.conjugate(h, x));
    }
    out
}

/// Whether `gAg⁻¹ = A` for every `g`.
pub fn is_inner_invariant(g: &Group, a: &GroupSubset) -> bool {
    g.elements()
        .all(|h| a.iter().all(|x| a.contains(g.conjugate(h, x))))
}

/// The subgroup `H` as a group in its own right, with its elements relabeled
/// `0..|H|` in increasing index order. Returns the relabeling.
pub fn induced_subgroup(g: &Group, h: &GroupSubset) -> Result<(Group, Vec<usize>)> {
    if !g.is_subgroup(h) {
        return Err(Error::NotSubgroup(h.to_indices()));
    }
    let elems = h.to_indices();
    let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let table = elems
        .iter()
        .map(|&a| elems.iter().map(|&b| pos[&g.mul(a, b)]).collect())
        .collect();
    let sub = Group::from_table_with_limit(table, Some(format!("{}<{}>", g.name(), elems.len())), usize::MAX)?;
    Ok((sub, elems))
}

/// A homomorphism between finite groups, stored as its image table.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    source_order: usize,
    target: Group,
    images: Vec<usize>,
}

impl Homomorphism {
    /// Verifies `h(ab) = h(a)h(b)` exhaustively.
    pub fn new(source: &Group, target: Group, images: Vec<usize>) -> Result<Homomorphism> {
        if images.len() != source.order() || images.iter().any(|&i| i >= target.order()) {
            return Err(Error::InvalidArgument("image table has the wrong shape".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if images[source.mul(a, b)] != target.mul(images[a], images[b]) {
                    return Err(Error::InvalidArgument(format!(
                        "not a homomorphism at ({a},{b})"
                    )));
                }
            }
        }
        Ok(Homomorphism {
            source_order: source.order(),
            target,
            images,
        })
    }

    pub fn identity(g: &Group) -> Homomorphism {
        Homomorphism {
            source_order: g.order(),
            target: g.clone(),
            images: g.elements().collect(),
        }
    }

    pub fn source_order(&self) -> usize {
        self.source_order
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    pub fn apply(&self, g: usize) -> usize {
        self.images[g]
    }

    pub fn apply_set(&self, a: &GroupSubset) -> GroupSubset {
        let mut out = self.target.empty_set();
        for g in a.iter() {
            out.insert(self.apply(g));
        }
        out
    }

    /// `h⁻¹(B)`.
    pub fn preimage(&self, b: &GroupSubset) -> GroupSubset {
        let mut out = GroupSubset::empty(self.source_order);
        for (g, &img) in self.images.iter().enumerate() {
            if b.contains(img) {
                out.insert(g);
            }
        }
        out
    }
}

/// The canonical projection `G → G/N`.
pub fn quotient_map(g: &Group, n: &GroupSubset) -> Result<Homomorphism> {
    if n.order() != g.order() || !g.is_normal(n) {
        return Err(Error::NotNormal(n.to_indices()));
    }
    let mut reps: BTreeSet<usize> = BTreeSet::new();
    let mut rep_of = vec![usize::MAX; g.order()];
    for x in g.elements() {
        if rep_of[x] != usize::MAX {
            continue;
        }
        reps.insert(x);
        for m in n.iter() {
            rep_of[g.mul(x, m)] = x;
        }
    }
    let reps: Vec<usize> = reps.into_iter().collect();
    let coset: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let images: Vec<usize> = g.elements().map(|x| coset[&rep_of[x]]).collect();
    let table = reps
        .iter()
        .map(|&a| reps.iter().map(|&b| images[g.mul(a, b)]).collect())
        .collect();
    let label = format!("{}/{}", g.name(), n.len());
    let target = Group::from_table_with_limit(table, Some(label), usize::MAX)?;
    Ok(Homomorphism {
        source_order: g.order(),
        target,
        images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &Group, e: &[usize]) -> GroupSubset {
        g.subset(e).unwrap()
    }

    #[test]
    fn cyclic_table_is_addition() {
        let g = Group::cyclic(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.mul(i, j), (i + j) % 4);
            }
        }
    }

    #[test]
    fn constructor_orders() {
        assert_eq!(Group::symmetric(3).unwrap().order(), 6);
        assert_eq!(Group::dihedral(4).unwrap().order(), 8);
        assert_eq!(Group::dicyclic(2).unwrap().order(), 8);
        assert_eq!(Group::alternating(4).unwrap().order(), 12);
        assert!(!Group::dihedral(4).unwrap().is_abelian());
        assert!(!Group::dicyclic(2).unwrap().is_abelian());
        // symmetric:5 needs a raised limit
        assert!(matches!(Group::symmetric(5), Err(Error::SizeGuard { .. })));
        let s5 = build_group_with_limit(&GroupSpec::Symmetric(5), 120).unwrap();
        assert_eq!(s5.order(), 120);
    }

    #[test]
    fn quaternion_has_one_involution() {
        let q = Group::dicyclic(2).unwrap();
        let involutions = q.elements().filter(|&g| q.element_order(g) == 2).count();
        assert_eq!(involutions, 1);
    }

    #[test]
    fn validate_reports_missing_inverse() {
        let table = vec![vec![0, 1, 2], vec![1, 2, 1], vec![2, 0, 1]];
        assert_eq!(validate_group(&table), Err(Violation::Inverse { g: 1 }));
        let c3 = Group::cyclic(3).unwrap().rows();
        assert_eq!(validate_group(&c3), Ok(()));
    }

    #[test]
    fn validate_rejects_left_projection() {
        // a∘b = a: element 0 fails as a left identity at g = 1.
        let table = vec![vec![0, 0, 0], vec![1, 1, 1], vec![2, 2, 2]];
        assert_eq!(validate_group(&table), Err(Violation::Identity { g: 1 }));
    }

    #[test]
    fn validate_reports_associativity() {
        // A Latin square with identity 0 and unique inverses that is not
        // associative (the smallest such loop has order 5).
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            validate_group(&t),
            Err(Violation::Associativity { .. })
        ));
    }

    #[test]
    fn subgroups_and_index() {
        let c6 = Group::cyclic(6).unwrap();
        let h = subgroup_generated(&c6, &set(&c6, &[2]));
        assert_eq!(h.to_indices(), vec![0, 2, 4]);
        assert_eq!(index(&c6, &h).unwrap(), 2);
        let all = subgroup_generated(&c6, &set(&c6, &[1]));
        assert_eq!(index(&c6, &all).unwrap(), 1);
        assert!(index(&c6, &set(&c6, &[0, 1])).is_err());

        let s3 = Group::symmetric(3).unwrap();
        // index 1 is the transposition swapping the last two points
        let t = subgroup_generated(&s3, &set(&s3, &[1]));
        assert_eq!(t.len(), 2);
        assert_eq!(index(&s3, &t).unwrap(), 3);
    }

    #[test]
    fn conjugacy_in_s3() {
        let s3 = Group::symmetric(3).unwrap();
        let transpositions: Vec<usize> = s3.elements().filter(|&g| s3.element_order(g) == 2).collect();
        assert_eq!(conjugacy_class(&s3, transpositions[0]).to_indices(), transpositions);
        let mut classes = vec![0];
        classes.extend(s3.elements().filter(|&g| s3.element_order(g) == 3));
        assert!(is_inner_invariant(&s3, &set(&s3, &classes)));
        assert!(!is_inner_invariant(&s3, &set(&s3, &[0, transpositions[0]])));

        let c5 = Group::cyclic(5).unwrap();
        for x in c5.elements() {
            assert_eq!(conjugacy_class(&c5, x).to_indices(), vec![x]);
        }
    }

    #[test]
    fn translates_and_difference_sets() {
        let c6 = Group::cyclic(6).unwrap();
        let a = set(&c6, &[0, 1]);
        assert_eq!(translate(&c6, &a, 0, 0), a);
        assert_eq!(difference_set(&c6, &a).to_indices(), vec![0, 1, 5]);
        let h = set(&c6, &[0, 2, 4]);
        assert_eq!(difference_set(&c6, &h), h);
    }

    #[test]
    fn quotient_of_c4() {
        let c4 = Group::cyclic(4).unwrap();
        let n = set(&c4, &[0, 2]);
        let h = quotient_map(&c4, &n).unwrap();
        assert_eq!(h.target().order(), 2);
        assert_eq!(h.apply(0), 0);
        let coset_of_one = set(h.target(), &[h.apply(1)]);
        assert_eq!(h.preimage(&coset_of_one).to_indices(), vec![1, 3]);
        for a in c4.elements() {
            for b in c4.elements() {
                assert_eq!(h.apply(c4.mul(a, b)), h.target().mul(h.apply(a), h.apply(b)));
            }
        }
        let s3 = Group::symmetric(3).unwrap();
        assert!(matches!(
            quotient_map(&s3, &set(&s3, &[0, 1])),
            Err(Error::NotNormal(_))
        ));
    }

    #[test]
    fn spec_parsing() {
        let g = build_group(&"cyclic:2*cyclic:4".parse().unwrap()).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(build_group(&"s3".parse().unwrap()).unwrap().order(), 6);
        assert!("nope:3".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = Group::dihedral(3).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        let back: Group = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let bad = r#"{"order":2,"table":[[0,1],[1,1]],"label":null}"#;
        assert!(serde_json::from_str::<Group>(bad).is_err());
    }
}
