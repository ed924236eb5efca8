//! Exact combinatorial searches: minimum set cover and maximum independent
//! set, both returning the lexicographically least optimum.

/// A fixed-size bit set over `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Bits {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Bits {
        let mut b = Bits::new(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    pub fn from_iter(len: usize, items: impl IntoIterator<Item = usize>) -> Bits {
        let mut b = Bits::new(len);
        for i in items {
            b.insert(i);
        }
        b
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }

    pub fn minus(&self, other: &Bits) -> Bits {
        Bits {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    pub fn union(&self, other: &Bits) -> Bits {
        Bits {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersection_count(&self, other: &Bits) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

/// Minimum number of `sets` covering `0..universe`, and the
/// lexicographically least optimal choice of set indices. `None` when the
/// sets do not cover the universe.
pub fn min_set_cover(sets: &[Bits], universe: usize) -> Option<Vec<usize>> {
    let all = Bits::full(universe);
    let union = sets.iter().fold(Bits::new(universe), |acc, s| acc.union(s));
    if !all.minus(&union).is_empty() {
        return None;
    }
    if universe == 0 {
        return Some(vec![]);
    }
    let max_size = sets.iter().map(Bits::count).max().unwrap_or(0);
    let covering: Vec<Vec<usize>> = (0..universe)
        .map(|e| (0..sets.len()).filter(|&i| sets[i].contains(e)).collect())
        .collect();

    let mut best = greedy_cover(sets, &all).len();
    optimal_cover_size(sets, &covering, all.clone(), 0, max_size, &mut best);

    let last_cover: Vec<usize> = covering.iter().map(|c| *c.last().unwrap()).collect();
    let mut chosen = Vec::with_capacity(best);
    let found = lex_cover(sets, &last_cover, &all, 0, best, max_size, &mut chosen);
    assert!(found, "a cover of the optimal size exists");
    Some(chosen)
}

fn greedy_cover(sets: &[Bits], all: &Bits) -> Vec<usize> {
    let mut uncovered = all.clone();
    let mut out = Vec::new();
    while !uncovered.is_empty() {
        let i = (0..sets.len())
            .max_by_key(|&i| (sets[i].intersection_count(&uncovered), std::cmp::Reverse(i)))
            .unwrap();
        uncovered = uncovered.minus(&sets[i]);
        out.push(i);
    }
    out
}

/// Branches on the uncovered element with the fewest covering sets, trying
/// the sets that cover the most uncovered elements first.
fn optimal_cover_size(
    sets: &[Bits],
    covering: &[Vec<usize>],
    uncovered: Bits,
    depth: usize,
    max_size: usize,
    best: &mut usize,
) {
    if uncovered.is_empty() {
        *best = (*best).min(depth);
        return;
    }
    if depth + uncovered.count().div_ceil(max_size) >= *best {
        return;
    }
    let e = uncovered
        .iter()
        .min_by_key(|&e| covering[e].len())
        .unwrap();
    let mut options = covering[e].clone();
    options.sort_by_key(|&i| std::cmp::Reverse(sets[i].intersection_count(&uncovered)));
    for i in options {
        optimal_cover_size(sets, covering, uncovered.minus(&sets[i]), depth + 1, max_size, best);
    }
}

fn lex_cover(
    sets: &[Bits],
    last_cover: &[usize],
    uncovered: &Bits,
    start: usize,
    k: usize,
    max_size: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if uncovered.is_empty() {
        return chosen.len() == k;
    }
    let remaining = k - chosen.len();
    if remaining == 0 || uncovered.count() > remaining * max_size {
        return false;
    }
    if uncovered.iter().any(|e| last_cover[e] < start) {
        return false;
    }
    for i in start..sets.len() {
        chosen.push(i);
        if lex_cover(sets, last_cover, &uncovered.minus(&sets[i]), i + 1, k, max_size, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Maximum independent set of a graph on `n ≤ 64` vertices given by
/// neighbourhood masks (no self loops), lexicographically least among the
/// maximum ones.
pub fn max_independent_set(adjacency: &[u64]) -> Vec<usize> {
    let n = adjacency.len();
    assert!(n <= 64, "independent set search is limited to 64 vertices");
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best: (u32, u64) = (0, 0);
    mis_rec(adjacency, all, 0, 0, &mut best);
    (0..n).filter(|&v| best.1 >> v & 1 == 1).collect()
}

/// Include-first search over vertices in index order visits independent
/// sets in lexicographic order, so keeping only strict improvements
/// retains the least maximum.
fn mis_rec(adj: &[u64], candidates: u64, chosen: u64, size: u32, best: &mut (u32, u64)) {
    if candidates == 0 {
        if size > best.0 {
            *best = (size, chosen);
        }
        return;
    }
    if size + candidates.count_ones() <= best.0 {
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << v);
    mis_rec(adj, rest & !adj[v], chosen | 1 << v, size + 1, best);
    mis_rec(adj, rest, chosen, size, best);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_cover(sets: &[Bits], universe: usize) -> Option<Vec<usize>> {
        let n = sets.len();
        for k in 0..=n {
            let mut comb: Vec<usize> = (0..k).collect();
            loop {
                let u = comb.iter().fold(Bits::new(universe), |acc, &i| acc.union(&sets[i]));
                if u.count() == universe {
                    return Some(comb);
                }
                if !crate::density::next_combination(&mut comb, n) {
                    break;
                }
            }
        }
        None
    }

    fn brute_mis(adj: &[u64]) -> Vec<usize> {
        let n = adj.len();
        let mut best: Vec<usize> = vec![];
        for k in 1..=n {
            let mut comb: Vec<usize> = (0..k).collect();
            loop {
                if comb.iter().all(|&a| comb.iter().all(|&b| adj[a] >> b & 1 == 0)) {
                    best = comb.clone();
                    break;
                }
                if !crate::density::next_combination(&mut comb, n) {
                    break;
                }
            }
            if best.len() < k {
                break;
            }
        }
        best
    }

    #[test]
    fn cover_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let universe = rng.gen_range(1..9);
            let count = rng.gen_range(1..8);
            let sets: Vec<Bits> = (0..count)
                .map(|_| Bits::from_iter(universe, (0..universe).filter(|_| rng.gen_bool(0.4))))
                .collect();
            assert_eq!(min_set_cover(&sets, universe), brute_cover(&sets, universe));
        }
    }

    #[test]
    fn mis_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..10);
            let mut adj = vec![0u64; n];
            for a in 0..n {
                for b in 0..a {
                    if rng.gen_bool(0.35) {
                        adj[a] |= 1 << b;
                        adj[b] |= 1 << a;
                    }
                }
            }
            assert_eq!(max_independent_set(&adj), brute_mis(&adj));
        }
    }

    #[test]
    fn uncoverable() {
        let sets = vec![Bits::from_iter(3, [0, 1])];
        assert_eq!(min_set_cover(&sets, 3), None);
    }
}
