//! The free group on `a, b`: reduced words, the two-set partition whose
//! parts both have right upper density zero, and bounded witness search.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{BoundCertificate, DensityKind};
use crate::error::{Error, Result};
use crate::games::{windowed_bound, Attestation, GroupModel};

pub const DEFAULT_WORD_CAP: usize = 64;
pub const ENUMERATION_LENGTH_LIMIT: usize = 12;
pub const ROW_COUNT_N_LIMIT: u32 = 8;

/// A generator or its inverse. Written `a`, `A`, `b`, `B`; capitals are
/// inverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn is_a(self) -> bool {
        matches!(self, Letter::A | Letter::AInv)
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }
}

/// A freely reduced word. The empty word is the identity and prints as `e`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedWord(Vec<Letter>);

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        self.0.iter().try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ReducedWord {
    type Err = Error;

    /// Parses letters over `aAbB` and reduces them; `e` or the empty string
    /// is the identity.
    fn from_str(s: &str) -> Result<ReducedWord> {
        if s == "e" {
            return Ok(ReducedWord::identity());
        }
        let letters = s
            .chars()
            .map(|c| match c {
                'a' => Ok(Letter::A),
                'A' => Ok(Letter::AInv),
                'b' => Ok(Letter::B),
                'B' => Ok(Letter::BInv),
                _ => Err(Error::Parse(format!("bad letter {c:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let w = ReducedWord::reduce(letters);
        w.check_cap(DEFAULT_WORD_CAP)?;
        Ok(w)
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReducedWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl ReducedWord {
    pub fn identity() -> ReducedWord {
        ReducedWord(vec![])
    }

    pub fn letter(l: Letter) -> ReducedWord {
        ReducedWord(vec![l])
    }

    /// `xᵏ` for a letter `x` and any integer `k`.
    pub fn power(l: Letter, k: i64) -> ReducedWord {
        let l = if k < 0 { l.inverse() } else { l };
        ReducedWord(vec![l; k.unsigned_abs() as usize])
    }

    fn reduce(letters: impl IntoIterator<Item = Letter>) -> ReducedWord {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ReducedWord(out)
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.len() > cap {
            Err(Error::WordOverflow { len: self.len(), cap })
        } else {
            Ok(())
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    /// Free reduction of the concatenation, without a length cap.
    pub fn concat(&self, other: &ReducedWord) -> ReducedWord {
        let mut k = 0;
        while k < self.len().min(other.len()) && self.0[self.len() - 1 - k] == other.0[k].inverse() {
            k += 1;
        }
        let mut out = self.0[..self.len() - k].to_vec();
        out.extend_from_slice(&other.0[k..]);
        ReducedWord(out)
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }
}

/// `u·v`, failing when the result is longer than `cap`.
pub fn word_multiply_capped(u: &ReducedWord, v: &ReducedWord, cap: usize) -> Result<ReducedWord> {
    let w = u.concat(v);
    w.check_cap(cap)?;
    Ok(w)
}

pub fn word_multiply(u: &ReducedWord, v: &ReducedWord) -> Result<ReducedWord> {
    word_multiply_capped(u, v, DEFAULT_WORD_CAP)
}

pub fn word_invert(u: &ReducedWord) -> ReducedWord {
    u.inverse()
}

/// The two parts of the free group used to break subadditivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordClass {
    /// Words starting with `a` or `a⁻¹`.
    A,
    /// The empty word and words starting with `b` or `b⁻¹`.
    B,
}

pub fn partition_class(w: &ReducedWord) -> WordClass {
    match w.first() {
        Some(l) if l.is_a() => WordClass::A,
        _ => WordClass::B,
    }
}

/// Splits `y = xʲ·w` with `j` the maximal power of the letter `x` (or its
/// inverse) at the front.
fn split_power(y: &ReducedWord, x: Letter) -> (i64, ReducedWord) {
    let lead = match y.first() {
        Some(l) if l == x || l == x.inverse() => l,
        _ => return (0, y.clone()),
    };
    let k = y.0.iter().take_while(|&&l| l == lead).count();
    let j = if lead == x { k as i64 } else { -(k as i64) };
    (j, ReducedWord(y.0[k..].to_vec()))
}

/// `|{i ∈ [1, n] : bⁱ·y ∈ A}|` by case analysis: with `y = bʲ·w`, the
/// product `bⁱ⁺ʲ·w` starts with `a^{±1}` only when `i + j = 0` and `w`
/// starts with `a^{±1}`.
pub fn row_count_structural(y: &ReducedWord, n: u32) -> u32 {
    let (j, w) = split_power(y, Letter::B);
    u32::from((1..=n as i64).contains(&-j) && w.first().is_some_and(Letter::is_a))
}

/// The same count by multiplying out.
pub fn row_count_direct(y: &ReducedWord, n: u32) -> u32 {
    (1..=n as i64)
        .filter(|&i| partition_class(&ReducedWord::power(Letter::B, i).concat(y)) == WordClass::A)
        .count() as u32
}

/// `|{i ∈ [1, n] : aⁱ·y ∈ B}|`; with `y = aʲ·w` this is 1 exactly when
/// `−j ∈ [1, n]`.
pub fn row_count_structural_b(y: &ReducedWord, n: u32) -> u32 {
    let (j, _) = split_power(y, Letter::A);
    u32::from((1..=n as i64).contains(&-j))
}

pub fn row_count_direct_b(y: &ReducedWord, n: u32) -> u32 {
    (1..=n as i64)
        .filter(|&i| partition_class(&ReducedWord::power(Letter::A, i).concat(y)) == WordClass::B)
        .count() as u32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCount {
    pub structural: u32,
    pub direct: u32,
}

pub fn fgroup_row_count(y: &ReducedWord, n: u32) -> Result<RowCount> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let rc = RowCount {
        structural: row_count_structural(y, n),
        direct: row_count_direct(y, n),
    };
    assert_eq!(rc.structural, rc.direct, "case analysis disagrees with multiplication at {y}");
    Ok(rc)
}

/// Reduced words of length exactly `len`, in length-lexicographic order.
pub fn words_of_length(len: usize) -> Vec<ReducedWord> {
    let mut out = vec![ReducedWord::identity()];
    for _ in 0..len {
        out = extend_layer(&out);
    }
    out
}

fn extend_layer(layer: &[ReducedWord]) -> Vec<ReducedWord> {
    layer
        .iter()
        .flat_map(|w| {
            Letter::ALL
                .into_iter()
                .filter(|&l| w.0.last() != Some(&l.inverse()))
                .map(|l| {
                    let mut v = w.0.clone();
                    v.push(l);
                    ReducedWord(v)
                })
        })
        .collect()
}

/// Reduced words of length at most `len` starting with `first` (or the
/// identity when `first` is `None`).
fn words_with_prefix(first: Option<Letter>, len: usize) -> Vec<ReducedWord> {
    let Some(first) = first else {
        return vec![ReducedWord::identity()];
    };
    let mut layer = vec![ReducedWord::letter(first)];
    let mut out = layer.clone();
    for _ in 1..len {
        layer = extend_layer(&layer);
        out.extend(layer.iter().cloned());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveRowCheck {
    pub max_len: usize,
    pub n: u32,
    pub words_checked: u64,
    pub max_row_count_a: u32,
    pub max_row_count_b: u32,
    /// Structural and direct counts agree on every word.
    pub agree: bool,
}

/// Checks both row counts on every reduced word of length at most
/// `max_len`, split by first letter across threads.
pub fn exhaustive_row_check(n: u32, max_len: usize) -> Result<ExhaustiveRowCheck> {
    crate::error::guard("word length", max_len, ENUMERATION_LENGTH_LIMIT)?;
    crate::error::guard("n", n as usize, ROW_COUNT_N_LIMIT as usize)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let strata: Vec<Option<Letter>> = std::iter::once(None)
        .chain(Letter::ALL.into_iter().map(Some))
        .collect();
    let results: Vec<(u64, u32, u32, bool)> = strata
        .into_par_iter()
        .map(|first| {
            let words = if first.is_some() && max_len == 0 {
                vec![]
            } else {
                words_with_prefix(first, max_len)
            };
            let mut acc = (0u64, 0u32, 0u32, true);
            for y in &words {
                let (sa, da) = (row_count_structural(y, n), row_count_direct(y, n));
                let (sb, db) = (row_count_structural_b(y, n), row_count_direct_b(y, n));
                acc.0 += 1;
                acc.1 = acc.1.max(da);
                acc.2 = acc.2.max(db);
                acc.3 &= sa == da && sb == db;
            }
            acc
        })
        .collect();
    Ok(ExhaustiveRowCheck {
        max_len,
        n,
        words_checked: results.iter().map(|r| r.0).sum(),
        max_row_count_a: results.iter().map(|r| r.1).max().unwrap_or(0),
        max_row_count_b: results.iter().map(|r| r.2).max().unwrap_or(0),
        agree: results.iter().all(|r| r.3),
    })
}

/// The free group on `a, b` as a [`GroupModel`].
pub struct FreeGroup;

impl GroupModel for FreeGroup {
    type Elem = ReducedWord;

    fn identity(&self) -> ReducedWord {
        ReducedWord::identity()
    }

    fn mul(&self, x: &ReducedWord, y: &ReducedWord) -> ReducedWord {
        x.concat(y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonSubadditivityReport {
    pub n: u32,
    /// `σ^R(A) ≤ 1/n` from rows `b, …, bⁿ`.
    pub a_certificate: BoundCertificate,
    /// `σ^R(B) ≤ 1/n` from rows `a, …, aⁿ`.
    pub b_certificate: BoundCertificate,
    /// `A ∪ B` is the whole group, whose density is 1.
    pub union_is_group: bool,
    /// `1/n + 1/n < 1`.
    pub subadditivity_fails: bool,
    pub exhaustive: ExhaustiveRowCheck,
}

/// Upper certificates for both parts of the partition.
///
/// Every column pattern of the `A` game is realized by one of `e` and
/// `b⁻ⁱa` (`1 ≤ i ≤ n`), and of the `B` game by one of `b` and `a⁻ⁱ`, by the
/// prefix decomposition in [`row_count_structural`]. The certificates are
/// therefore exact; the exhaustive check up to `check_len` backs that up.
pub fn fgroup_nonsubadditivity_certificate(n: u32, check_len: usize) -> Result<NonSubadditivityReport> {
    if n == 0 || check_len == 0 {
        return Err(Error::InvalidArgument("n and the check length must be at least 1".into()));
    }
    let a = ReducedWord::letter(Letter::A);
    let b = ReducedWord::letter(Letter::B);
    let rows_a: Vec<ReducedWord> = (1..=n as i64).map(|i| ReducedWord::power(Letter::B, i)).collect();
    let shifts_a: Vec<ReducedWord> = std::iter::once(ReducedWord::identity())
        .chain((1..=n as i64).map(|i| ReducedWord::power(Letter::B, -i).concat(&a)))
        .collect();
    let rows_b: Vec<ReducedWord> = (1..=n as i64).map(|i| ReducedWord::power(Letter::A, i)).collect();
    let shifts_b: Vec<ReducedWord> = std::iter::once(b)
        .chain((1..=n as i64).map(|i| ReducedWord::power(Letter::A, -i)))
        .collect();
    let a_certificate = windowed_bound(
        &FreeGroup,
        &rows_a,
        &shifts_a,
        &Attestation::Structural("prefix decomposition y = b^j w".into()),
        |w| partition_class(w) == WordClass::A,
        DensityKind::SigmaCapR,
    )?;
    let b_certificate = windowed_bound(
        &FreeGroup,
        &rows_b,
        &shifts_b,
        &Attestation::Structural("prefix decomposition y = a^j w".into()),
        |w| partition_class(w) == WordClass::B,
        DensityKind::SigmaCapR,
    )?;
    let check_n = n.min(ROW_COUNT_N_LIMIT);
    let exhaustive = exhaustive_row_check(check_n, check_len.min(ENUMERATION_LENGTH_LIMIT))?;
    Ok(NonSubadditivityReport {
        n,
        subadditivity_fails: a_certificate.bound.clone() + b_certificate.bound.clone() < crate::rational::one(),
        a_certificate,
        b_certificate,
        union_is_group: true,
        exhaustive,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordWitnessSearch {
    /// `(x, y)` with `x·F·y ⊆ A`.
    pub witness: Option<(ReducedWord, ReducedWord)>,
    /// Largest `|x| + |y|` searched.
    pub horizon: usize,
    pub pairs_checked: u64,
}

/// Looks for `x, y` with `x·f·y ∈ A` for every `f ∈ F`, over pairs ordered
/// by `|x| + |y|`, then `|x|`, then lexicographically.
pub fn solecki_one_witness(
    member: impl Fn(&ReducedWord) -> bool,
    f: &[ReducedWord],
    horizon: usize,
) -> Result<WordWitnessSearch> {
    crate::error::guard("search horizon", horizon, ENUMERATION_LENGTH_LIMIT)?;
    let layers: Vec<Vec<ReducedWord>> = (0..=horizon).map(words_of_length).collect();
    let mut checked = 0;
    for total in 0..=horizon {
        for lx in 0..=total {
            for x in &layers[lx] {
                for y in &layers[total - lx] {
                    checked += 1;
                    if f.iter().all(|w| member(&x.concat(w).concat(y))) {
                        return Ok(WordWitnessSearch {
                            witness: Some((x.clone(), y.clone())),
                            horizon,
                            pairs_checked: checked,
                        });
                    }
                }
            }
        }
    }
    Ok(WordWitnessSearch {
        witness: None,
        horizon,
        pairs_checked: checked,
    })
}
