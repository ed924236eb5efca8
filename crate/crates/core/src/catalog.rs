//! Small groups used by the exhaustive verifiers.

use crate::group::{build_group, Group, GroupSpec};

/// Specs covering every isomorphism class of group of order ≤ 12, listed by
/// order. The verifiers take the prefix with order at most their cap.
pub fn small_group_specs() -> Vec<(usize, GroupSpec)> {
    use GroupSpec::*;
    let c = |n| Box::new(Cyclic(n));
    vec![
        (1, Cyclic(1)),
        (2, Cyclic(2)),
        (3, Cyclic(3)),
        (4, Cyclic(4)),
        (4, Product(c(2), c(2))),
        (5, Cyclic(5)),
        (6, Cyclic(6)),
        (6, Symmetric(3)),
        (7, Cyclic(7)),
        (8, Cyclic(8)),
        (8, Product(c(2), c(4))),
        (8, Product(c(2), Box::new(Product(c(2), c(2))))),
        (8, Dihedral(4)),
        (8, Dicyclic(2)),
        (9, Cyclic(9)),
        (9, Product(c(3), c(3))),
        (10, Cyclic(10)),
        (10, Dihedral(5)),
        (11, Cyclic(11)),
        (12, Cyclic(12)),
        (12, Product(c(2), c(6))),
        (12, Dihedral(6)),
        (12, Dicyclic(3)),
        (12, Alternating(4)),
    ]
}

/// All listed groups of order at most `max_order`.
pub fn small_groups(max_order: usize) -> Vec<Group> {
    small_group_specs()
        .into_iter()
        .filter(|(n, _)| *n <= max_order)
        .map(|(_, spec)| build_group(&spec).expect("catalog groups are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_match() {
        for (n, spec) in small_group_specs() {
            assert_eq!(build_group(&spec).unwrap().order(), n, "{spec:?}");
        }
        assert_eq!(small_groups(8).len(), 14);
    }
}
