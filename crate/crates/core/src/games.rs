//! Densities as values of matrix games.
//!
//! `σ_R(A)` is the value of the game in which one player picks a measure
//! `μ` and the other a right shift `y`, with payoff `μ(Ay)`; the same value
//! is Kelley's intersection number of the family of left translates `xA`,
//! and the maximin side is `sup_μ inf_x μ(xA)`. Exact LP duality realizes all
//! of these equalities at once.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::density::{density_closed_form, translate_masks, BoundCertificate, DensityKind, Direction, LabeledPoint, Scope, Witness};
use crate::error::{guard, Error, Result};
use crate::group::{Group, GroupSubset};
use crate::measure::TranslatePattern;
use crate::rational::{self, Rational};
use crate::simplex::{solve_game, GameSolution, MatrixGame};

/// Kelley's intersection number of a family of subsets of `0..points`:
/// the value of the game where the minimizer picks a member and the
/// maximizer a point, with the membership indicator as payoff.
pub fn intersection_number(family: &[Vec<usize>], points: usize) -> Result<(Rational, GameSolution)> {
    if family.is_empty() {
        return Err(Error::Empty("intersection_number needs a nonempty family"));
    }
    if points == 0 {
        return Err(Error::Empty("intersection_number needs a nonempty point set"));
    }
    let mut members = vec![vec![false; points]; family.len()];
    for (i, b) in family.iter().enumerate() {
        for &x in b {
            if x >= points {
                return Err(Error::InvalidArgument(format!("point {x} outside 0..{points}")));
            }
            members[i][x] = true;
        }
    }
    let game = MatrixGame::indicator(family.len(), points, |i, x| members[i][x])?;
    let sol = solve_game(&game);
    Ok((sol.value.clone(), sol))
}

/// Both sides of the minimax identity for `σ_R`.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaRGame {
    #[serde(with = "rational::serde_fraction")]
    pub value: Rational,
    /// Rows: support points `g` of the minimizing measure; columns: shifts
    /// `y`; payoff `[g·y ∈ A]`.
    pub minimax: GameSolution,
    /// Rows: left shifts `x` (minimizer); columns: points `y` of the
    /// maximizing measure; payoff `[y ∈ xA]`. Its value is
    /// `sup_μ inf_x μ(xA)`, the intersection number of `{xA}`.
    pub maximin: GameSolution,
}

pub fn sigma_r_via_game(g: &Group, a: &GroupSubset) -> Result<SigmaRGame> {
    let n = g.order();
    let minimax_game = MatrixGame::indicator(n, n, |row, y| a.contains(g.mul(row, y)))?;
    let maximin_game = MatrixGame::indicator(n, n, |x, y| a.contains(g.mul(g.inv(x), y)))?;
    let minimax = solve_game(&minimax_game);
    let maximin = solve_game(&maximin_game);
    assert_eq!(minimax.value, maximin.value, "minimax and maximin sides disagree");
    Ok(SigmaRGame {
        value: minimax.value.clone(),
        minimax,
        maximin,
    })
}

/// `σ(A)` as the value of the game with rows `g` and columns the distinct
/// two-sided translates `xAy`, payoff `[g ∈ xAy]`.
pub fn sigma_via_game(g: &Group, a: &GroupSubset) -> Result<Rational> {
    guard("group order", g.order(), 64)?;
    let cols = translate_masks(g, a, TranslatePattern::TwoSided);
    let game = MatrixGame::indicator(g.order(), cols.len(), |row, j| cols[j] >> row & 1 == 1)?;
    let value = solve_game(&game).value;
    assert_eq!(
        value,
        density_closed_form(g, a, DensityKind::Sigma),
        "sigma game disagrees with |A|/|G|"
    );
    Ok(value)
}

/// One quantifier of an extremal density: `i`, `s` range over finitely
/// supported measures, `I`, `S` over all measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    #[serde(rename = "i")]
    Inf,
    #[serde(rename = "s")]
    Sup,
    #[serde(rename = "I")]
    InfAll,
    #[serde(rename = "S")]
    SupAll,
}

impl Quantifier {
    pub fn is_sup(self) -> bool {
        matches!(self, Quantifier::Sup | Quantifier::SupAll)
    }

    fn letter(self) -> char {
        match self {
            Quantifier::Inf => 'i',
            Quantifier::Sup => 's',
            Quantifier::InfAll => 'I',
            Quantifier::SupAll => 'S',
        }
    }
}

/// A quantifier word together with a substitution, e.g. `is12` for `σ_R`
/// or `iss213` for `σ`. The value is
/// `Q₁μ₁ ⋯ Qₙμₙ (μ_{s(1)} ∗ ⋯ ∗ μ_{s(n)})(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtremalPattern {
    quantifiers: Vec<Quantifier>,
    /// 1-based.
    substitution: Vec<usize>,
}

impl ExtremalPattern {
    pub fn new(quantifiers: Vec<Quantifier>, substitution: Vec<usize>) -> Result<ExtremalPattern> {
        let n = quantifiers.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty pattern".into()));
        }
        let capitals = quantifiers
            .iter()
            .filter(|q| matches!(q, Quantifier::InfAll | Quantifier::SupAll))
            .count();
        if capitals > 1 {
            return Err(Error::InvalidArgument("at most one of I, S is allowed".into()));
        }
        let mut sorted = substitution.clone();
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument(format!(
                "substitution {substitution:?} is not a permutation of 1..={n}"
            )));
        }
        Ok(ExtremalPattern {
            quantifiers,
            substitution,
        })
    }

    pub fn len(&self) -> usize {
        self.quantifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quantifiers.is_empty()
    }

    pub fn quantifiers(&self) -> &[Quantifier] {
        &self.quantifiers
    }

    /// Whether both an inf-kind and a sup-kind quantifier occur.
    pub fn is_mixed(&self) -> bool {
        let sups = self.quantifiers.iter().filter(|q| q.is_sup()).count();
        sups != 0 && sups != self.len()
    }

    /// All valid patterns of the given length.
    pub fn all_of_length(n: usize) -> Vec<ExtremalPattern> {
        let letters = [Quantifier::Inf, Quantifier::Sup, Quantifier::InfAll, Quantifier::SupAll];
        let mut words: Vec<Vec<Quantifier>> = vec![vec![]];
        for _ in 0..n {
            words = words
                .into_iter()
                .flat_map(|w| {
                    letters.iter().map(move |&q| {
                        let mut w = w.clone();
                        w.push(q);
                        w
                    })
                })
                .collect();
        }
        let perms = permutations_1based(n);
        words
            .into_iter()
            .flat_map(|w| {
                perms
                    .iter()
                    .filter_map(move |s| ExtremalPattern::new(w.clone(), s.clone()).ok())
            })
            .collect()
    }
}

fn permutations_1based(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations_1based(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n);
            out.push(q);
        }
    }
    out.sort();
    out
}

impl fmt::Display for ExtremalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.quantifiers {
            write!(f, "{}", q.letter())?;
        }
        for s in &self.substitution {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ExtremalPattern {
    type Err = Error;

    /// Parses `is12`, `Ssi231`, … (single-digit substitutions, so n ≤ 9).
    fn from_str(s: &str) -> Result<ExtremalPattern> {
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (letters, digits) = s.split_at(split);
        let quantifiers = letters
            .chars()
            .map(|c| match c {
                'i' => Ok(Quantifier::Inf),
                's' => Ok(Quantifier::Sup),
                'I' => Ok(Quantifier::InfAll),
                'S' => Ok(Quantifier::SupAll),
                _ => Err(Error::Parse(format!("bad quantifier {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let substitution = digits
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::Parse(format!("bad digit in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if substitution.len() != quantifiers.len() {
            return Err(Error::Parse(format!("{s:?}: quantifier and substitution lengths differ")));
        }
        ExtremalPattern::new(quantifiers, substitution)
    }
}

/// Value of an extremal density: a point when `lower == upper`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalValue {
    #[serde(with = "rational::serde_fraction")]
    pub lower: Rational,
    #[serde(with = "rational::serde_fraction")]
    pub upper: Rational,
    /// `true` when the value came from a single matrix game (or pure
    /// enumeration) rather than the interval bounds.
    pub exact_path: bool,
}

impl ExtremalValue {
    pub fn value(&self) -> Option<&Rational> {
        (self.lower == self.upper).then_some(&self.lower)
    }
}

pub const MAX_PATTERN_LENGTH: usize = 3;

/// Evaluates extremal densities on one group, caching game values across
/// calls (many patterns reduce to the same game).
pub struct ExtremalEvaluator<'g> {
    group: &'g Group,
    cache: HashMap<(Vec<u64>, bool), Rational>,
}

impl<'g> ExtremalEvaluator<'g> {
    pub fn new(group: &'g Group) -> Result<ExtremalEvaluator<'g>> {
        guard("group order", group.order(), 64)?;
        Ok(ExtremalEvaluator {
            group,
            cache: HashMap::new(),
        })
    }

    pub fn eval(&mut self, pattern: &ExtremalPattern, a: &GroupSubset) -> Result<ExtremalValue> {
        let n = pattern.len();
        guard("pattern length", n, MAX_PATTERN_LENGTH)?;
        let kinds: Vec<bool> = pattern.quantifiers.iter().map(|q| q.is_sup()).collect();
        let out = if kinds.iter().all(|&k| k == kinds[0]) {
            let v = self.pure(pattern, a, kinds[0]);
            ExtremalValue {
                lower: v.clone(),
                upper: v,
                exact_path: true,
            }
        } else if kinds[1..].iter().all(|&k| k != kinds[0]) {
            let v = self.single_game(pattern, a, kinds[0])?;
            assert_eq!(
                v,
                density_closed_form(self.group, a, DensityKind::Sigma),
                "mixed pattern {pattern} must collapse to |A|/|G|"
            );
            ExtremalValue {
                lower: v.clone(),
                upper: v,
                exact_path: true,
            }
        } else {
            self.interval(pattern, a, &kinds)
        };
        Ok(out)
    }

    /// Product of Diracs in substitution order: `d_{s(1)} ⋯ d_{s(n)}`.
    fn product(&self, pattern: &ExtremalPattern, diracs: &[usize]) -> usize {
        pattern
            .substitution
            .iter()
            .fold(0, |acc, &s| self.group.mul(acc, diracs[s - 1]))
    }

    /// Every quantifier of one kind: the optimum is at Dirac vertices.
    fn pure(&self, pattern: &ExtremalPattern, a: &GroupSubset, sup: bool) -> Rational {
        let hits = tuples(self.group.order(), pattern.len()).map(|d| a.contains(self.product(pattern, &d)));
        let v = if sup { hits.into_iter().any(|h| h) } else { hits.into_iter().all(|h| h) };
        if v { Rational::one() } else { Rational::zero() }
    }

    /// The outer player mixes over position 1; the remaining positions all
    /// belong to the other player, whose optimum is pure. Each pure tuple
    /// contributes the column `{g : L g R ∈ A}`.
    fn single_game(&mut self, pattern: &ExtremalPattern, a: &GroupSubset, outer_sup: bool) -> Result<Rational> {
        let g = self.group;
        let n = pattern.len();
        let mut cols: Vec<u64> = tuples(g.order(), n - 1)
            .map(|rest| {
                let mut d = vec![0];
                d.extend(rest);
                (0..g.order()).fold(0u64, |m, x| {
                    d[0] = x;
                    if a.contains(self.product(pattern, &d)) { m | 1 << x } else { m }
                })
            })
            .collect();
        cols.sort_unstable();
        cols.dedup();
        let key = (cols, outer_sup);
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let cols = &key.0;
        let game = if outer_sup {
            // maximizer mixes over points: rows are the tuples (minimizer)
            MatrixGame::indicator(cols.len(), g.order(), |t, x| cols[t] >> x & 1 == 1)?
        } else {
            MatrixGame::indicator(g.order(), cols.len(), |x, t| cols[t] >> x & 1 == 1)?
        };
        let v = solve_game(&game).value;
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    /// Certified interval for patterns with nested alternations. The lower
    /// end fixes the sup player's measures to a candidate (uniform or a
    /// Dirac per position) and lets the inf player optimize jointly over
    /// Dirac vertices; the upper end is symmetric. Both are valid bounds
    /// for any quantifier order.
    fn interval(&self, pattern: &ExtremalPattern, a: &GroupSubset, kinds: &[bool]) -> ExtremalValue {
        let lower = self.best_commitment(pattern, a, kinds, true);
        let upper = self.best_commitment(pattern, a, kinds, false);
        assert!(lower <= upper, "interval bounds crossed for {pattern}");
        ExtremalValue {
            lower,
            upper,
            exact_path: false,
        }
    }

    fn best_commitment(&self, pattern: &ExtremalPattern, a: &GroupSubset, kinds: &[bool], sup_commits: bool) -> Rational {
        let n = pattern.len();
        let order = self.group.order();
        let committed: Vec<usize> = (0..n).filter(|&p| kinds[p] == sup_commits).collect();
        let free: Vec<usize> = (0..n).filter(|&p| kinds[p] != sup_commits).collect();
        // candidate index `order` stands for the uniform measure
        let mut best: Option<Rational> = None;
        for choice in tuples(order + 1, committed.len()) {
            let mut worst: Option<Rational> = None;
            for resp in tuples(order, free.len()) {
                let mut factors: Vec<Option<usize>> = vec![None; n];
                for (&p, &c) in committed.iter().zip(&choice) {
                    factors[p] = (c < order).then_some(c);
                }
                for (&p, &d) in free.iter().zip(&resp) {
                    factors[p] = Some(d);
                }
                let v = self.convolution_value(pattern, &factors, a);
                let replace = worst.as_ref().is_none_or(|w| if sup_commits { v < *w } else { v > *w });
                if replace {
                    worst = Some(v);
                }
            }
            let w = worst.expect("nonempty response set");
            let replace = best.as_ref().is_none_or(|b| if sup_commits { w > *b } else { w < *b });
            if replace {
                best = Some(w);
            }
        }
        best.expect("nonempty candidate set")
    }

    /// `(ν_{s(1)} ∗ ⋯ ∗ ν_{s(n)})(A)` where each factor is a Dirac or, for
    /// `None`, the uniform measure. Weights are integer counts over a
    /// common denominator.
    fn convolution_value(&self, pattern: &ExtremalPattern, factors: &[Option<usize>], a: &GroupSubset) -> Rational {
        let g = self.group;
        let order = g.order();
        let mut weights = vec![0u64; order];
        weights[0] = 1;
        let mut denom = 1u64;
        for &s in &pattern.substitution {
            let mut next = vec![0u64; order];
            match factors[s - 1] {
                Some(d) => {
                    for (x, &w) in weights.iter().enumerate() {
                        next[g.mul(x, d)] += w;
                    }
                }
                None => {
                    for (x, &w) in weights.iter().enumerate() {
                        if w != 0 {
                            for y in 0..order {
                                next[g.mul(x, y)] += w;
                            }
                        }
                    }
                    denom *= order as u64;
                }
            }
            weights = next;
        }
        let hit: u64 = a.iter().map(|x| weights[x]).sum();
        rational::ratio(hit as i64, denom as i64)
    }
}

/// All `len`-tuples over `0..base` in lexicographic order.
fn tuples(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = base.pow(len as u32);
    (0..total).map(move |mut k| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = k % base;
            k /= base;
        }
        t
    })
}

/// One-shot evaluation of an extremal density.
pub fn eval_extremal(pattern: &ExtremalPattern, g: &Group, a: &GroupSubset) -> Result<ExtremalValue> {
    ExtremalEvaluator::new(g)?.eval(pattern, a)
}

/// A group in which translates can be formed, finite or not.
pub trait GroupModel {
    type Elem: Clone + fmt::Display;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

/// A finite group as a [`GroupModel`].
pub struct FiniteModel<'g>(pub &'g Group);

impl GroupModel for FiniteModel<'_> {
    type Elem = usize;

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.0.mul(*a, *b)
    }
}

/// The integers under addition.
pub struct IntegerModel;

impl GroupModel for IntegerModel {
    type Elem = i64;

    fn identity(&self) -> i64 {
        0
    }

    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }
}

/// Why an enumeration of shifts is claimed to realize every column pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attestation {
    /// Completeness proved by the caller (e.g. a case analysis); the
    /// string names the argument.
    Structural(String),
    /// Shifts enumerated up to a horizon only.
    Bounded(u64),
}

/// Upper bound on `σ_R(A)` (LP-optimal measure on the window) or `σ^R(A)`
/// (uniform measure on the window) in a possibly infinite group.
///
/// The payoff of row `w` against shift `z` is `[w·z ∈ A]`, so column `z`
/// evaluates `μ(Az⁻¹)`. The bound is exact for the model only when the
/// shifts realize every column pattern that occurs in the group, which
/// `attestation` records.
pub fn windowed_bound<M: GroupModel>(
    model: &M,
    row_window: &[M::Elem],
    shifts: &[M::Elem],
    attestation: &Attestation,
    member: impl Fn(&M::Elem) -> bool,
    kind: DensityKind,
) -> Result<BoundCertificate> {
    if row_window.is_empty() {
        return Err(Error::Empty("windowed_bound needs a nonempty window"));
    }
    if shifts.is_empty() {
        return Err(Error::Empty("windowed_bound needs at least one shift"));
    }
    let game = MatrixGame::indicator(row_window.len(), shifts.len(), |r, c| {
        member(&model.mul(&row_window[r], &shifts[c]))
    })?;
    let (bound, weights) = match kind {
        DensityKind::SigmaR => {
            let sol = solve_game(&game);
            let w: Vec<Rational> = (0..row_window.len()).map(|i| sol.row_strategy.weight(i)).collect();
            (sol.value, w)
        }
        DensityKind::SigmaCapR => {
            let n = row_window.len() as i64;
            let best = (0..shifts.len())
                .map(|c| (0..row_window.len()).filter(|&r| game.entry(r, c).is_one()).count())
                .max()
                .unwrap_or(0);
            (rational::ratio(best as i64, n), vec![rational::ratio(1, n); row_window.len()])
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "windowed_bound supports sigma_R and sigma_cap_R, not {other}"
            )))
        }
    };
    let witness = Witness::Labeled(
        row_window
            .iter()
            .zip(weights)
            .filter(|(_, w)| !w.is_zero())
            .map(|(e, weight)| LabeledPoint {
                label: e.to_string(),
                weight,
            })
            .collect(),
    );
    let scope = match attestation {
        Attestation::Structural(_) => Scope::Exact,
        Attestation::Bounded(l) => Scope::Bounded(*l),
    };
    Ok(BoundCertificate {
        kind,
        direction: Direction::Upper,
        bound: bound.clone(),
        witness,
        scope,
        verified_sup: bound,
    })
}
