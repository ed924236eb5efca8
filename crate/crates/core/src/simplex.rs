//! Exact rational simplex for zero-sum matrix games.
//!
//! The row player minimizes. After shifting the payoff to be strictly
//! positive, the row player's problem becomes
//! `max Σx s.t. Mᵀx ≤ 1, x ≥ 0`, which starts from the all-slack basis and
//! needs no phase one. Pivoting uses Bland's rule, so runs are deterministic
//! and never cycle. The column strategy is read off the final reduced costs
//! of the slacks.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Carrier, FinSuppMeasure};
use crate::rational::{self, Rational};

/// A zero-sum game in which the row player minimizes the payoff and the
/// column player maximizes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGame {
    payoff: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct GameJson {
    rows: usize,
    cols: usize,
    payoff: Vec<Vec<String>>,
}

impl Serialize for MatrixGame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GameJson {
            rows: self.rows(),
            cols: self.cols(),
            payoff: self
                .payoff
                .iter()
                .map(|r| r.iter().map(rational::format).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixGame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GameJson::deserialize(d)?;
        let payoff = raw
            .payoff
            .iter()
            .map(|r| r.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        if payoff.len() != raw.rows || payoff.iter().any(|r| r.len() != raw.cols) {
            return Err(serde::de::Error::custom("payoff does not match rows/cols"));
        }
        MatrixGame::new(payoff).map_err(serde::de::Error::custom)
    }
}

impl MatrixGame {
    pub fn new(payoff: Vec<Vec<Rational>>) -> Result<MatrixGame> {
        let cols = payoff.first().map_or(0, Vec::len);
        if payoff.is_empty() || cols == 0 {
            return Err(Error::Empty("payoff matrix"));
        }
        if payoff.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged payoff matrix".into()));
        }
        Ok(MatrixGame { payoff })
    }

    /// A 0/1 game from an indicator function.
    pub fn indicator(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Result<MatrixGame> {
        MatrixGame::new(
            (0..rows)
                .map(|i| {
                    (0..cols)
                        .map(|j| if f(i, j) { Rational::one() } else { Rational::zero() })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.payoff.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff[0].len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.payoff[i][j]
    }

    pub fn transpose(&self) -> MatrixGame {
        MatrixGame {
            payoff: (0..self.cols())
                .map(|j| (0..self.rows()).map(|i| self.payoff[i][j].clone()).collect())
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> MatrixGame {
        MatrixGame {
            payoff: self.payoff.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }
}

/// Optimal strategies and the exact value of a [`MatrixGame`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSolution {
    #[serde(with = "rational::serde_fraction")]
    pub value: Rational,
    pub row_strategy: FinSuppMeasure,
    pub col_strategy: FinSuppMeasure,
}

impl GameSolution {
    /// Checks both optimality certificates exactly: no pure column earns
    /// more than the value against the row strategy, and no pure row pays
    /// less than the value against the column strategy.
    pub fn verify(&self, game: &MatrixGame) -> Result<()> {
        for j in 0..game.cols() {
            let v: Rational = self
                .row_strategy
                .entries()
                .map(|(i, p)| p * game.entry(i, j))
                .sum();
            if v > self.value {
                return Err(Error::Certificate(format!(
                    "column {j} earns {v} > value {}",
                    self.value
                )));
            }
        }
        for i in 0..game.rows() {
            let v: Rational = self
                .col_strategy
                .entries()
                .map(|(j, q)| q * game.entry(i, j))
                .sum();
            if v < self.value {
                return Err(Error::Certificate(format!(
                    "row {i} pays {v} < value {}",
                    self.value
                )));
            }
        }
        Ok(())
    }
}

pub fn solve_game(game: &MatrixGame) -> GameSolution {
    let (m, n) = (game.rows(), game.cols());
    let min = game
        .payoff
        .iter()
        .flatten()
        .min()
        .expect("nonempty")
        .clone();
    let shift = Rational::one() - min;

    // Tableau rows are the n column constraints; columns are the m row
    // variables, the n slacks, then the right-hand side.
    let width = m + n + 1;
    let mut t: Vec<Vec<Rational>> = (0..n)
        .map(|j| {
            let mut row = vec![Rational::zero(); width];
            for i in 0..m {
                row[i] = game.entry(i, j) + &shift;
            }
            row[m + j] = Rational::one();
            row[width - 1] = Rational::one();
            row
        })
        .collect();
    let mut reduced: Vec<Rational> = (0..m + n)
        .map(|k| if k < m { Rational::one() } else { Rational::zero() })
        .collect();
    let mut basis: Vec<usize> = (m..m + n).collect();

    // Bland: least entering index with positive reduced cost, least basic
    // index among tied ratios.
    while let Some(enter) = (0..m + n).find(|&k| reduced[k].is_positive()) {
        let mut pivot: Option<(usize, Rational)> = None;
        for (r, row) in t.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[width - 1] / &row[enter];
            let better = match &pivot {
                None => true,
                Some((pr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*pr]),
            };
            if better {
                pivot = Some((r, ratio));
            }
        }
        let (pr, _) = pivot.expect("bounded: shifted payoff is positive");
        let p = t[pr][enter].clone();
        for x in t[pr].iter_mut() {
            *x /= &p;
        }
        let prow = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r == pr || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (x, px) in row.iter_mut().zip(&prow) {
                if !px.is_zero() {
                    *x -= &f * px;
                }
            }
        }
        let f = reduced[enter].clone();
        for (x, px) in reduced.iter_mut().zip(&prow) {
            if !px.is_zero() {
                *x -= &f * px;
            }
        }
        basis[pr] = enter;
    }

    let mut x = vec![Rational::zero(); m];
    for (r, &b) in basis.iter().enumerate() {
        if b < m {
            x[b] = t[r][width - 1].clone();
        }
    }
    let total: Rational = x.iter().sum();
    let y: Vec<Rational> = (0..n).map(|j| -reduced[m + j].clone()).collect();
    debug_assert_eq!(y.iter().sum::<Rational>(), total, "strong duality");

    let row_strategy = FinSuppMeasure::from_weights(
        Carrier::Points { count: m },
        x.iter().enumerate().map(|(i, xi)| (i, xi / &total)),
    )
    .expect("normalized");
    let col_strategy = FinSuppMeasure::from_weights(
        Carrier::Points { count: n },
        y.iter().enumerate().map(|(j, yj)| (j, yj / &total)),
    )
    .expect("normalized");
    let solution = GameSolution {
        value: total.recip() - shift,
        row_strategy,
        col_strategy,
    };
    solution
        .verify(game)
        .expect("simplex optimum must satisfy both certificates");
    solution
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn game(rows: &[&[i64]]) -> MatrixGame {
        MatrixGame::new(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn identity_game() {
        let g = game(&[&[1, 0], &[0, 1]]);
        let s = solve_game(&g);
        assert_eq!(s.value, ratio(1, 2));
        assert_eq!(s.row_strategy.weight(0), ratio(1, 2));
        assert_eq!(s.col_strategy.weight(1), ratio(1, 2));
    }

    #[test]
    fn degenerate_games() {
        assert_eq!(solve_game(&game(&[&[3, 3], &[3, 3]])).value, int(3));
        // one row: the maximizer picks the largest entry
        assert_eq!(solve_game(&game(&[&[2, -1, 5, 4]])).value, int(5));
        // one column: the minimizer picks the smallest entry
        assert_eq!(solve_game(&game(&[&[2], &[-7], &[4]])).value, int(-7));
    }

    #[test]
    fn rock_paper_scissors() {
        let g = game(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]]);
        let s = solve_game(&g);
        assert_eq!(s.value, int(0));
        for i in 0..3 {
            assert_eq!(s.row_strategy.weight(i), ratio(1, 3));
        }
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(MatrixGame::new(vec![]).is_err());
        assert!(MatrixGame::new(vec![vec![int(1)], vec![int(1), int(2)]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = MatrixGame::new(vec![vec![ratio(1, 2), int(0)], vec![int(-1), ratio(3, 4)]]).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"rows":2,"cols":2,"payoff":[["1/2","0"],["-1","3/4"]]}"#);
        assert_eq!(serde_json::from_str::<MatrixGame>(&text).unwrap(), g);
    }
}
