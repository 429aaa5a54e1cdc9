//! Exhaustive isomorphism search over element bijections, with degree
//! pruning. Adequate for the desk-scale lattices this crate targets.

use crate::internal::ExpandedAlgebra;
use crate::lattice::{ElementId, Ortholattice};

/// Finds a bijection `a -> b` preserving order and orthocomplement, if one
/// exists. Meets and joins are order-determined, so they come for free.
pub fn find_isomorphism(a: &Ortholattice, b: &Ortholattice) -> Option<Vec<ElementId>> {
    find_with(a, b, None)
}

pub fn isomorphic(a: &Ortholattice, b: &Ortholattice) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Isomorphism of expanded algebras: additionally commutes with `s`.
pub fn find_expanded_isomorphism(
    a: &ExpandedAlgebra,
    b: &ExpandedAlgebra,
) -> Option<Vec<ElementId>> {
    find_with(
        a.lattice(),
        b.lattice(),
        Some((a.s().as_slice(), b.s().as_slice())),
    )
}

pub fn expanded_isomorphic(a: &ExpandedAlgebra, b: &ExpandedAlgebra) -> bool {
    find_expanded_isomorphism(a, b).is_some()
}

fn find_with(
    a: &Ortholattice,
    b: &Ortholattice,
    s: Option<(&[ElementId], &[ElementId])>,
) -> Option<Vec<ElementId>> {
    if a.n() != b.n() {
        return None;
    }
    let n = a.n();
    // Invariant signature per element: (down-set size, up-set size).
    let sig = |lat: &Ortholattice, x: ElementId| {
        (lat.down_set(x).len(), lat.up_set(x).len())
    };
    let sig_a: Vec<_> = (0..n).map(|x| sig(a, x)).collect();
    let sig_b: Vec<_> = (0..n).map(|x| sig(b, x)).collect();
    {
        let mut sa = sig_a.clone();
        let mut sb = sig_b.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return None;
        }
    }

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if assign(a, b, s, &sig_a, &sig_b, &mut map, &mut used, 0) {
        Some(map)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn assign(
    a: &Ortholattice,
    b: &Ortholattice,
    s: Option<(&[ElementId], &[ElementId])>,
    sig_a: &[(usize, usize)],
    sig_b: &[(usize, usize)],
    map: &mut Vec<ElementId>,
    used: &mut Vec<bool>,
    x: ElementId,
) -> bool {
    let n = a.n();
    if x == n {
        // Order and ortho are preserved; confirm s if requested.
        if let Some((sa, sb)) = s {
            return (0..n).all(|e| map[sa[e]] == sb[map[e]]);
        }
        return true;
    }
    'candidates: for y in 0..n {
        if used[y] || sig_a[x] != sig_b[y] {
            continue;
        }
        for p in 0..x {
            if a.leq(p, x) != b.leq(map[p], y) || a.leq(x, p) != b.leq(y, map[p]) {
                continue 'candidates;
            }
        }
        let nx = a.ortho(x);
        if nx < x && map[nx] != b.ortho(y) {
            continue;
        }
        map[x] = y;
        used[y] = true;
        if assign(a, b, s, sig_a, sig_b, map, used, x + 1) {
            return true;
        }
        map[x] = usize::MAX;
        used[y] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{boolean, mo};

    #[test]
    fn recognizes_equal_and_distinct_shapes() {
        assert!(isomorphic(&boolean(2).unwrap(), &boolean(2).unwrap()));
        assert!(isomorphic(&mo(1).unwrap(), &boolean(2).unwrap()));
        assert!(!isomorphic(&mo(2).unwrap(), &boolean(2).unwrap()));
        assert!(!isomorphic(&mo(3).unwrap(), &boolean(3).unwrap()));
    }

    #[test]
    fn respects_ortho_structure() {
        // Same order as boolean(2) but ortho swapped on atoms differs only
        // by relabeling, so it is still isomorphic.
        let b = boolean(2).unwrap();
        assert!(find_isomorphism(&b, &b).is_some());
    }
}
