//! Ortholattices expanded with an internal state operator `s`: verification
//! of the operator axioms, the image subalgebra, coherent pre-states,
//! filters, congruences, and direct decomposition.

use std::collections::BTreeSet;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{ElementId, ElementSubset, Ortholattice, Product};
use crate::states::{classify, enumerate_prestates, StateError, StateVector};

/// The element-to-element map housing the internal state operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateOperator {
    map: Vec<ElementId>,
}

impl StateOperator {
    pub fn new(map: Vec<ElementId>, n: usize) -> Result<Self, ExpansionError> {
        if map.len() != n {
            return Err(ExpansionError::SizeMismatch {
                expected: n,
                got: map.len(),
            });
        }
        if let Some(&x) = map.iter().find(|&&x| x >= n) {
            return Err(ExpansionError::OutOfRange(x));
        }
        Ok(StateOperator { map })
    }

    pub fn apply(&self, x: ElementId) -> ElementId {
        self.map[x]
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.map
    }

    pub fn image(&self) -> ElementSubset {
        ElementSubset::from_indices(self.map.len(), self.map.iter().copied())
    }
}

/// The five operator axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SAxiom {
    S1,
    S2,
    S3,
    S4,
    S5,
}

impl std::fmt::Display for SAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SAxiom::S1 => "s1",
            SAxiom::S2 => "s2",
            SAxiom::S3 => "s3",
            SAxiom::S4 => "s4",
            SAxiom::S5 => "s5",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SAxiomCheck {
    pub axiom: SAxiom,
    pub passed: bool,
    pub witness: Option<Vec<ElementId>>,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateOpReport {
    pub checks: Vec<SAxiomCheck>,
}

impl StateOpReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_axioms(&self) -> Vec<SAxiom> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.axiom)
            .collect()
    }

    pub fn check(&self, axiom: SAxiom) -> &SAxiomCheck {
        self.checks.iter().find(|c| c.axiom == axiom).unwrap()
    }
}

impl std::fmt::Display for StateOpReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            if c.passed {
                writeln!(f, "  {}: pass", c.axiom)?;
            } else {
                writeln!(
                    f,
                    "  {}: FAIL at {:?} ({} violations)",
                    c.axiom,
                    c.witness.as_deref().unwrap_or(&[]),
                    c.violations
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error("operator table length {got} does not match lattice size {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("operator image {0} out of range")]
    OutOfRange(ElementId),
    #[error("state operator axioms fail:\n{0}")]
    Axioms(StateOpReport),
    #[error("state is not a pre-state on this lattice: {0}")]
    NotPreState(StateError),
    #[error("element {0} is not in the image of s")]
    NotInImage(ElementId),
    #[error("decomposition at z = {0} is degenerate; need 0 < z < 1")]
    DegenerateFactor(ElementId),
    #[error("algebra is directly decomposable; the recovered state is not unique")]
    Decomposable,
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// Checks axioms s1-s5 of the operator against a verified lattice,
/// reporting every failing axiom with a witness.
///
/// On a full pass the derived laws (central Boolean image, monotonicity,
/// join superadditivity, idempotence, fixed-point image, meet absorption)
/// are asserted; they follow from the axioms, so a violation is an internal
/// error rather than a property of the input.
pub fn verify_state_operator(
    lat: &Ortholattice,
    op: &StateOperator,
) -> Result<StateOpReport, ExpansionError> {
    let n = lat.n();
    if op.map.len() != n {
        return Err(ExpansionError::SizeMismatch {
            expected: n,
            got: op.map.len(),
        });
    }
    let s = |x: ElementId| op.map[x];
    let mut checks = Vec::new();

    let mut scan = |axiom: SAxiom, witnesses: &mut dyn Iterator<Item = Option<Vec<ElementId>>>| {
        let mut first = None;
        let mut violations = 0usize;
        for w in witnesses {
            if let Some(w) = w {
                violations += 1;
                if first.is_none() {
                    first = Some(w);
                }
            }
        }
        checks.push(SAxiomCheck {
            axiom,
            passed: violations == 0,
            witness: first,
            violations,
        });
    };

    scan(
        SAxiom::S1,
        &mut std::iter::once((s(lat.top()) != lat.top()).then(|| vec![lat.top()])),
    );
    scan(
        SAxiom::S2,
        &mut (0..n).map(|x| (s(lat.ortho(x)) != lat.ortho(s(x))).then(|| vec![x])),
    );
    scan(
        SAxiom::S3,
        &mut (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| {
            (s(lat.join(x, s(y))) != lat.join(s(x), s(y))).then(|| vec![x, y])
        }),
    );
    scan(
        SAxiom::S4,
        &mut (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| {
            let rebuilt = lat.join(lat.meet(y, s(x)), lat.meet(y, lat.ortho(s(x))));
            (rebuilt != y).then(|| vec![x, y])
        }),
    );
    scan(
        SAxiom::S5,
        &mut (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| {
            (!lat.leq(s(lat.meet(x, y)), lat.meet(s(x), s(y)))).then(|| vec![x, y])
        }),
    );

    let report = StateOpReport { checks };
    if report.passed() {
        assert_derived_laws(lat, op);
    }
    Ok(report)
}

/// Consequences of s1-s5, asserted exhaustively after a verified pass.
fn assert_derived_laws(lat: &Ortholattice, op: &StateOperator) {
    let n = lat.n();
    let s = |x: ElementId| op.map[x];
    let image = op.image();

    assert!(
        image.contains(lat.bottom()) && image.contains(lat.top()),
        "s-image must contain the bounds"
    );
    let center = lat.center();
    for u in image.iter() {
        assert!(center.contains(u), "s-image element {u} is not central");
        assert!(image.contains(lat.ortho(u)), "s-image not ortho-closed at {u}");
        for v in image.iter() {
            assert!(image.contains(lat.meet(u, v)), "s-image not meet-closed");
            assert!(image.contains(lat.join(u, v)), "s-image not join-closed");
            for w in image.iter() {
                assert_eq!(
                    lat.meet(u, lat.join(v, w)),
                    lat.join(lat.meet(u, v), lat.meet(u, w)),
                    "s-image subalgebra must be distributive"
                );
            }
        }
    }
    for x in 0..n {
        assert_eq!(s(s(x)), s(x), "s must be idempotent at {x}");
        assert_eq!(
            image.contains(x),
            s(x) == x,
            "fixed points of s must be exactly its image ({x})"
        );
        for y in 0..n {
            if lat.leq(x, y) {
                assert!(lat.leq(s(x), s(y)), "s must be monotone at ({x}, {y})");
            }
            assert!(
                lat.leq(lat.join(s(x), s(y)), s(lat.join(x, y))),
                "joins of s-values must stay below s of the join at ({x}, {y})"
            );
            assert_eq!(
                s(lat.meet(x, s(y))),
                lat.meet(s(x), s(y)),
                "meet absorption fails at ({x}, {y})"
            );
        }
    }
}

/// A verified ortholattice-with-operator pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedAlgebra {
    lattice: Ortholattice,
    s: StateOperator,
    image: ElementSubset,
}

impl ExpandedAlgebra {
    /// Verifies the operator axioms and caches the image.
    pub fn new(lattice: Ortholattice, s: StateOperator) -> Result<Self, ExpansionError> {
        let report = verify_state_operator(&lattice, &s)?;
        if !report.passed() {
            return Err(ExpansionError::Axioms(report));
        }
        let image = s.image();
        Ok(ExpandedAlgebra { lattice, s, image })
    }

    pub fn lattice(&self) -> &Ortholattice {
        &self.lattice
    }

    pub fn s(&self) -> &StateOperator {
        &self.s
    }

    pub fn s_at(&self, x: ElementId) -> ElementId {
        self.s.apply(x)
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn s_image(&self) -> ElementSubset {
        self.image
    }
}

/// The internal operator induced by a state: everything the state maps to 1
/// goes to the top, the rest to the bottom.
///
/// The construction always verifies; coherence of the operator with the
/// state, and additivity transfer on pairs where the state is additive, are
/// asserted on the way out.
pub fn build_internal(
    lat: &Ortholattice,
    sigma: &StateVector,
) -> Result<ExpandedAlgebra, ExpansionError> {
    let raw: Vec<u8> = sigma.values().iter().map(|&v| v as u8).collect();
    classify(lat, &raw).map_err(ExpansionError::NotPreState)?;

    let map: Vec<ElementId> = lat
        .elements()
        .map(|x| if sigma.value(x) { lat.top() } else { lat.bottom() })
        .collect();
    let op = StateOperator::new(map, lat.n())?;
    let alg = ExpandedAlgebra::new(lat.clone(), op)
        .expect("induced operator satisfies the axioms");

    for x in lat.elements() {
        assert_eq!(
            sigma.value(x),
            sigma.value(alg.s_at(x)),
            "induced operator must be coherent with its state"
        );
        for y in lat.elements() {
            let j = lat.join(x, y);
            if sigma.bit(j) == sigma.bit(x) + sigma.bit(y) {
                assert_eq!(
                    alg.s_at(j),
                    lat.join(alg.s_at(x), alg.s_at(y)),
                    "additivity must transfer to the operator at ({x}, {y})"
                );
            }
        }
    }
    Ok(alg)
}

/// The Boolean subalgebra on the image of `s`, with its embedding.
#[derive(Debug, Clone)]
pub struct ImageAlgebra {
    pub algebra: Ortholattice,
    pub to_parent: Vec<ElementId>,
    pub from_parent: Vec<Option<ElementId>>,
}

impl ExpandedAlgebra {
    /// Builds the subalgebra on `s(L)` and checks it is Boolean, central,
    /// and fixed pointwise by `s`.
    pub fn image_subalgebra(&self) -> ImageAlgebra {
        let lat = &self.lattice;
        let to_parent: Vec<ElementId> = self.image.iter().collect();
        let mut from_parent = vec![None; lat.n()];
        for (i, &p) in to_parent.iter().enumerate() {
            from_parent[p] = Some(i);
        }
        let leq: Vec<Vec<bool>> = to_parent
            .iter()
            .map(|&p| to_parent.iter().map(|&q| lat.leq(p, q)).collect())
            .collect();
        let ortho: Vec<ElementId> = to_parent
            .iter()
            .map(|&p| from_parent[lat.ortho(p)].expect("image is ortho-closed"))
            .collect();
        let names: Vec<String> = to_parent.iter().map(|&p| lat.name(p).to_string()).collect();
        let algebra =
            Ortholattice::from_leq(&leq, &ortho, &names).expect("image carries a lattice order");
        // Ascending parent order is topological, so renumbering is identity.
        debug_assert_eq!(algebra.names(), names.as_slice());

        assert!(algebra.is_boolean(), "s-image subalgebra must be Boolean");
        let center = lat.center();
        assert!(
            to_parent.iter().all(|&p| center.contains(p)),
            "s-image must lie in the center"
        );
        for x in lat.elements() {
            assert_eq!(
                self.s_at(self.s_at(x)),
                self.s_at(x),
                "s must be idempotent"
            );
        }
        // Sub-meets and sub-joins agree with the parent ones.
        for (i, &p) in to_parent.iter().enumerate() {
            for (j, &q) in to_parent.iter().enumerate() {
                assert_eq!(to_parent[algebra.meet(i, j)], lat.meet(p, q));
                assert_eq!(to_parent[algebra.join(i, j)], lat.join(p, q));
            }
        }
        ImageAlgebra {
            algebra,
            to_parent,
            from_parent,
        }
    }

    /// Pre-states `sigma` with `sigma(x) = 1` iff `sigma(s(x)) = 1`.
    ///
    /// Their 1-sets are checked to coincide with the bps-filters, and with
    /// the sets `{x : s(x) in M}` for `M` ranging over the prime increasing
    /// subsets of the image subalgebra.
    pub fn coherent_prestates(&self) -> Vec<StateVector> {
        let lat = &self.lattice;
        let coherent: Vec<StateVector> = enumerate_prestates(lat)
            .into_iter()
            .filter(|sv| {
                lat.elements().all(|x| sv.value(x) == sv.value(self.s_at(x)))
            })
            .collect();

        let mut one_sets: Vec<ElementSubset> = coherent.iter().map(|s| s.one_set()).collect();
        one_sets.sort();

        let mut bps: Vec<ElementSubset> =
            self.bps_filters().into_iter().map(|f| f.subset).collect();
        bps.sort();
        assert_eq!(
            one_sets, bps,
            "coherent pre-state 1-sets must be exactly the bps-filters"
        );

        let image = self.image_subalgebra();
        let primes = crate::states::prime_increasing_subsets(&image.algebra)
            .expect("image subalgebra is Boolean");
        let mut lifted: Vec<ElementSubset> = primes
            .iter()
            .map(|m| {
                ElementSubset::from_indices(
                    lat.n(),
                    lat.elements().filter(|&x| {
                        m.contains(image.from_parent[self.s_at(x)].expect("s maps into image"))
                    }),
                )
            })
            .collect();
        lifted.sort();
        assert_eq!(
            one_sets, lifted,
            "coherent pre-states must correspond to primes of the image"
        );

        coherent
    }
}

/// Filter flavors: plain perspectivity-closed lattice filters, filters
/// additionally closed under `s`, and the prime-style filters matching
/// coherent pre-states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FilterFlavor {
    Oml,
    Ieb,
    Bps,
}

impl FilterFlavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            FilterFlavor::Oml => "oml",
            FilterFlavor::Ieb => "ieb",
            FilterFlavor::Bps => "bps",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Filter {
    pub flavor: FilterFlavor,
    pub subset: ElementSubset,
}

impl Serialize for Filter {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("Filter", 2)?;
        st.serialize_field("flavor", self.flavor.as_str())?;
        st.serialize_field("bits", &self.subset.bit_string())?;
        st.end()
    }
}

const SUBSET_SCAN_LIMIT: usize = 24;

impl ExpandedAlgebra {
    /// Nonempty increasing, meet-closed, perspectivity-closed subsets.
    pub fn oml_filters(&self) -> Vec<Filter> {
        self.scan_filters(FilterFlavor::Oml)
    }

    /// OML-filters closed under `s`.
    pub fn ieb_filters(&self) -> Vec<Filter> {
        self.scan_filters(FilterFlavor::Ieb)
    }

    fn scan_filters(&self, flavor: FilterFlavor) -> Vec<Filter> {
        let lat = &self.lattice;
        let n = lat.n();
        assert!(n <= SUBSET_SCAN_LIMIT, "filter scan limited to small lattices");
        let persp: Vec<Vec<ElementId>> = lat
            .elements()
            .map(|a| lat.elements().filter(|&b| lat.perspective(a, b)).collect())
            .collect();
        let mut out = Vec::new();
        'subsets: for mask in 1u64..(1 << n) {
            let f = ElementSubset::from_indices(n, (0..n).filter(|&x| mask >> x & 1 == 1));
            if !f.is_increasing(lat) {
                continue;
            }
            for a in f.iter() {
                for b in f.iter() {
                    if !f.contains(lat.meet(a, b)) {
                        continue 'subsets;
                    }
                }
                for &b in &persp[a] {
                    if !f.contains(b) {
                        continue 'subsets;
                    }
                }
                if flavor == FilterFlavor::Ieb && !f.contains(self.s_at(a)) {
                    continue 'subsets;
                }
            }
            out.push(Filter { flavor, subset: f });
        }
        out.sort();
        out
    }

    /// Nonempty increasing subsets `F` with `s(F)` inside `F` and
    /// `x in F` iff `~x not in F`. For each one, `s(F)` is checked to be a
    /// prime increasing subset of the image subalgebra.
    pub fn bps_filters(&self) -> Vec<Filter> {
        let lat = &self.lattice;
        let n = lat.n();
        assert!(n <= SUBSET_SCAN_LIMIT, "filter scan limited to small lattices");
        let mut out = Vec::new();
        'subsets: for mask in 1u64..(1 << n) {
            let f = ElementSubset::from_indices(n, (0..n).filter(|&x| mask >> x & 1 == 1));
            if !f.is_increasing(lat) {
                continue;
            }
            for x in lat.elements() {
                if f.contains(x) == f.contains(lat.ortho(x)) {
                    continue 'subsets;
                }
            }
            for x in f.iter() {
                if !f.contains(self.s_at(x)) {
                    continue 'subsets;
                }
            }
            out.push(Filter {
                flavor: FilterFlavor::Bps,
                subset: f,
            });
        }
        out.sort();

        for filter in &out {
            let s_of_f =
                ElementSubset::from_indices(n, filter.subset.iter().map(|x| self.s_at(x)));
            for u in s_of_f.iter() {
                for w in self.image.iter() {
                    if lat.leq(u, w) {
                        assert!(
                            s_of_f.contains(w),
                            "s(F) must be increasing within the image"
                        );
                    }
                }
            }
            for w in self.image.iter() {
                assert!(
                    s_of_f.contains(w) != s_of_f.contains(lat.ortho(w)),
                    "s(F) must be prime within the image"
                );
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Congruences
// ---------------------------------------------------------------------------

/// A partition of the elements compatible with meet, join, ortho, and `s`.
/// Stored as a block-id array normalized to first-occurrence numbering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Congruence {
    blocks: Vec<usize>,
}

impl Congruence {
    fn from_raw(raw: &[usize]) -> Self {
        let mut relabel: Vec<Option<usize>> = vec![None; raw.len()];
        let mut next = 0usize;
        let blocks = raw
            .iter()
            .map(|&b| {
                *relabel[b].get_or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                })
            })
            .collect();
        Congruence { blocks }
    }

    pub fn delta(n: usize) -> Self {
        Congruence {
            blocks: (0..n).collect(),
        }
    }

    pub fn nabla(n: usize) -> Self {
        Congruence {
            blocks: vec![0; n],
        }
    }

    pub fn relates(&self, x: ElementId, y: ElementId) -> bool {
        self.blocks[x] == self.blocks[y]
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Relation inclusion: every pair related here is related in `other`.
    pub fn refines(&self, other: &Congruence) -> bool {
        let n = self.blocks.len();
        (0..n).all(|x| (0..n).all(|y| !self.relates(x, y) || other.relates(x, y)))
    }

    /// Relation intersection; always a congruence when both sides are.
    pub fn meet(&self, other: &Congruence) -> Congruence {
        let n = self.blocks.len();
        let mut key_to_id: Vec<((usize, usize), usize)> = Vec::new();
        let mut raw = vec![0usize; n];
        for x in 0..n {
            let key = (self.blocks[x], other.blocks[x]);
            let id = match key_to_id.iter().find(|(k, _)| *k == key) {
                Some((_, id)) => *id,
                None => {
                    let id = key_to_id.len();
                    key_to_id.push((key, id));
                    id
                }
            };
            raw[x] = id;
        }
        Congruence::from_raw(&raw)
    }

    /// Relation composition equals in both orders.
    pub fn permutes_with(&self, other: &Congruence) -> bool {
        let n = self.blocks.len();
        for x in 0..n {
            for y in 0..n {
                let ab = (0..n).any(|z| self.relates(x, z) && other.relates(z, y));
                let ba = (0..n).any(|z| other.relates(x, z) && self.relates(z, y));
                if ab != ba {
                    return false;
                }
            }
        }
        true
    }
}

impl Serialize for Congruence {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.blocks.serialize(ser)
    }
}

fn union_find_root(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

/// Smallest congruence containing the given partition: merge until every
/// related pair is compatible with all operations.
fn congruence_closure(alg: &ExpandedAlgebra, initial: &[usize]) -> Congruence {
    let lat = &alg.lattice;
    let n = lat.n();
    let mut parent: Vec<usize> = (0..n).collect();
    for x in 0..n {
        for y in x + 1..n {
            if initial[x] == initial[y] {
                let (rx, ry) = (union_find_root(&mut parent, x), union_find_root(&mut parent, y));
                if rx != ry {
                    parent[rx.max(ry)] = rx.min(ry);
                }
            }
        }
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in x + 1..n {
                if union_find_root(&mut parent, x) != union_find_root(&mut parent, y) {
                    continue;
                }
                let mut enforce = |a: usize, b: usize, parent: &mut Vec<usize>| {
                    let (ra, rb) =
                        (union_find_root(parent, a), union_find_root(parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                        changed = true;
                    }
                };
                enforce(lat.ortho(x), lat.ortho(y), &mut parent);
                enforce(alg.s_at(x), alg.s_at(y), &mut parent);
                for z in 0..n {
                    enforce(lat.meet(x, z), lat.meet(y, z), &mut parent);
                    enforce(lat.join(x, z), lat.join(y, z), &mut parent);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let raw: Vec<usize> = (0..n).map(|x| union_find_root(&mut parent, x)).collect();
    Congruence::from_raw(&raw)
}

fn is_compatible(alg: &ExpandedAlgebra, blocks: &[usize]) -> bool {
    let lat = &alg.lattice;
    let n = lat.n();
    for x in 0..n {
        for y in x + 1..n {
            if blocks[x] != blocks[y] {
                continue;
            }
            if blocks[lat.ortho(x)] != blocks[lat.ortho(y)] {
                return false;
            }
            if blocks[alg.s_at(x)] != blocks[alg.s_at(y)] {
                return false;
            }
            for z in 0..n {
                if blocks[lat.meet(x, z)] != blocks[lat.meet(y, z)] {
                    return false;
                }
                if blocks[lat.join(x, z)] != blocks[lat.join(y, z)] {
                    return false;
                }
            }
        }
    }
    true
}

fn partition_scan_cap() -> usize {
    std::env::var("OMLKIT_MAX_PARTITIONS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(12)
}

impl ExpandedAlgebra {
    /// The full congruence set. Uses the exhaustive partition scan up to
    /// the configured size cap (`OMLKIT_MAX_PARTITIONS`, default 12) and
    /// principal-congruence closure beyond it.
    pub fn congruences(&self) -> Vec<Congruence> {
        if self.n() <= partition_scan_cap() {
            self.congruences_by_partition_scan()
        } else {
            self.congruences_by_principal_closure()
        }
    }

    /// Exhaustive scan of all set partitions, keeping the compatible ones.
    /// Partial assignments are pruned on pairs whose operation images are
    /// already placed; surviving leaves get the full compatibility check.
    pub fn congruences_by_partition_scan(&self) -> Vec<Congruence> {
        let n = self.n();
        let mut blocks = vec![0usize; n];
        let mut out = BTreeSet::new();

        // Necessary condition on the assigned prefix 0..=i: pairs sharing a
        // block must agree wherever the operation images are also assigned.
        fn partial_ok(alg: &ExpandedAlgebra, blocks: &[usize], i: usize) -> bool {
            let lat = alg.lattice();
            for j in 0..i {
                if blocks[j] != blocks[i] {
                    continue;
                }
                let pairs = [(lat.ortho(i), lat.ortho(j)), (alg.s_at(i), alg.s_at(j))];
                for (a, b) in pairs {
                    if a <= i && b <= i && blocks[a] != blocks[b] {
                        return false;
                    }
                }
                for z in 0..=i {
                    let (a, b) = (lat.meet(i, z), lat.meet(j, z));
                    if a <= i && b <= i && blocks[a] != blocks[b] {
                        return false;
                    }
                    let (a, b) = (lat.join(i, z), lat.join(j, z));
                    if a <= i && b <= i && blocks[a] != blocks[b] {
                        return false;
                    }
                }
            }
            true
        }

        fn walk(
            alg: &ExpandedAlgebra,
            i: usize,
            max_block: usize,
            blocks: &mut Vec<usize>,
            out: &mut BTreeSet<Congruence>,
        ) {
            let n = alg.n();
            if i == n {
                if is_compatible(alg, blocks) {
                    out.insert(Congruence::from_raw(blocks));
                }
                return;
            }
            for b in 0..=max_block + 1 {
                blocks[i] = b;
                if partial_ok(alg, blocks, i) {
                    walk(alg, i + 1, max_block.max(b), blocks, out);
                }
            }
        }

        // Element 0 always sits in block 0.
        blocks[0] = 0;
        walk(self, 1, 0, &mut blocks, &mut out);
        out.into_iter().collect()
    }

    /// Principal congruences closed under joins; complete because every
    /// congruence is the join of the principal ones it contains.
    pub fn congruences_by_principal_closure(&self) -> Vec<Congruence> {
        let n = self.n();
        let mut set: BTreeSet<Congruence> = BTreeSet::new();
        set.insert(Congruence::delta(n));
        for x in 0..n {
            for y in x + 1..n {
                let mut initial: Vec<usize> = (0..n).collect();
                initial[y] = x;
                set.insert(congruence_closure(self, &initial));
            }
        }
        loop {
            let current: Vec<Congruence> = set.iter().cloned().collect();
            let before = set.len();
            for a in &current {
                for b in &current {
                    set.insert(self.congruence_join(a, b));
                }
            }
            if set.len() == before {
                break;
            }
        }
        set.into_iter().collect()
    }

    /// Join in the congruence lattice.
    pub fn congruence_join(&self, a: &Congruence, b: &Congruence) -> Congruence {
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        for x in 0..n {
            for y in x + 1..n {
                if a.relates(x, y) || b.relates(x, y) {
                    let (rx, ry) =
                        (union_find_root(&mut parent, x), union_find_root(&mut parent, y));
                    if rx != ry {
                        parent[rx.max(ry)] = rx.min(ry);
                    }
                }
            }
        }
        let raw: Vec<usize> = (0..n).map(|x| union_find_root(&mut parent, x)).collect();
        congruence_closure(self, &raw)
    }
}

/// The extent of mutually inverse maps between filters and congruences.
#[derive(Debug, Clone, Serialize)]
pub struct FilterCongruenceMaps {
    pub pairs: Vec<(Filter, Congruence)>,
}

impl ExpandedAlgebra {
    /// Congruence induced by a filter: relate `x` and `y` when both
    /// `(x & y) | (~x & ~y)` and `s(x & y) | s(~x & ~y)` lie in the filter.
    pub fn congruence_of_filter(&self, f: &ElementSubset) -> Congruence {
        let lat = &self.lattice;
        let n = lat.n();
        let rel = |x: ElementId, y: ElementId| {
            let agree = lat.join(lat.meet(x, y), lat.meet(lat.ortho(x), lat.ortho(y)));
            let s_agree = lat.join(
                self.s_at(lat.meet(x, y)),
                self.s_at(lat.meet(lat.ortho(x), lat.ortho(y))),
            );
            f.contains(agree) && f.contains(s_agree)
        };
        // The relation is an equivalence for every ieb-filter; build blocks
        // and verify that reading.
        let mut raw = vec![usize::MAX; n];
        for x in 0..n {
            if raw[x] == usize::MAX {
                for y in x..n {
                    if rel(x, y) {
                        assert!(
                            raw[y] == usize::MAX,
                            "filter-induced relation must be transitive; internal error"
                        );
                        raw[y] = x;
                    }
                }
            }
        }
        let c = Congruence::from_raw(&raw);
        for x in 0..n {
            for y in 0..n {
                assert_eq!(
                    c.relates(x, y),
                    rel(x, y),
                    "filter-induced relation must be an equivalence; internal error"
                );
            }
        }
        c
    }

    /// Filter recovered from a congruence: the block of the top element.
    pub fn filter_of_congruence(&self, c: &Congruence) -> ElementSubset {
        ElementSubset::from_indices(
            self.n(),
            self.lattice
                .elements()
                .filter(|&x| c.relates(x, self.lattice.top())),
        )
    }

    /// Enumerates both sides and checks that the two maps are mutually
    /// inverse, order-preserving bijections.
    pub fn filter_congruence_maps(&self) -> FilterCongruenceMaps {
        let filters = self.ieb_filters();
        let congruences = self.congruences();

        let mut pairs = Vec::new();
        for f in &filters {
            let theta = self.congruence_of_filter(&f.subset);
            assert!(
                congruences.contains(&theta),
                "filter-induced congruence missing from the enumeration"
            );
            let back = self.filter_of_congruence(&theta);
            assert_eq!(back, f.subset, "filter round trip must be the identity");
            pairs.push((*f, theta));
        }
        for c in &congruences {
            let f = self.filter_of_congruence(c);
            assert!(
                filters.iter().any(|x| x.subset == f),
                "congruence-induced filter missing from the enumeration"
            );
            let back = self.congruence_of_filter(&f);
            assert_eq!(&back, c, "congruence round trip must be the identity");
        }
        assert_eq!(
            filters.len(),
            congruences.len(),
            "filters and congruences must biject"
        );
        for (f1, t1) in &pairs {
            for (f2, t2) in &pairs {
                assert_eq!(
                    f1.subset.is_subset_of(&f2.subset),
                    t1.refines(t2),
                    "the bijection must preserve order in both directions"
                );
            }
        }
        FilterCongruenceMaps { pairs }
    }
}

// ---------------------------------------------------------------------------
// Factor congruences and decomposition
// ---------------------------------------------------------------------------

/// An interval expansion with its embedding into the parent algebra.
#[derive(Debug, Clone)]
pub struct IntervalExpansion {
    pub algebra: ExpandedAlgebra,
    pub to_parent: Vec<ElementId>,
    pub from_parent: Vec<Option<ElementId>>,
}

/// A direct product of expanded algebras with the pair indexing map.
#[derive(Debug, Clone)]
pub struct ExpandedProduct {
    pub algebra: ExpandedAlgebra,
    product: Product,
}

impl ExpandedProduct {
    pub fn pair_index(&self, left: ElementId, right: ElementId) -> ElementId {
        self.product.pair_index(left, right)
    }
}

/// Componentwise product of two expanded algebras.
pub fn product_expanded(
    a: &ExpandedAlgebra,
    b: &ExpandedAlgebra,
) -> Result<ExpandedProduct, ExpansionError> {
    let product = a.lattice().product(b.lattice())?;
    let n = product.algebra.n();
    let mut map = vec![0usize; n];
    for i in a.lattice().elements() {
        for j in b.lattice().elements() {
            map[product.pair_index(i, j)] = product.pair_index(a.s_at(i), b.s_at(j));
        }
    }
    let op = StateOperator::new(map, n)?;
    let algebra = ExpandedAlgebra::new(product.algebra.clone(), op)
        .expect("componentwise operator satisfies the axioms");
    Ok(ExpandedProduct { algebra, product })
}

/// The two factors at `z` together with the verified isomorphism onto their
/// product.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub z: ElementId,
    pub left: IntervalExpansion,
    pub right: IntervalExpansion,
    pub product: ExpandedProduct,
    /// Parent element -> product element, `x -> (x & z, x & ~z)`.
    pub iso: Vec<ElementId>,
}

impl ExpandedAlgebra {
    /// Restricts the algebra to `[0, a]` for `a` in the image of `s`.
    pub fn restrict_to_interval(&self, a: ElementId) -> Result<IntervalExpansion, ExpansionError> {
        if !self.image.contains(a) {
            return Err(ExpansionError::NotInImage(a));
        }
        let iv = self.lattice.interval(a)?;
        let map: Vec<ElementId> = iv
            .to_parent
            .iter()
            .map(|&p| iv.from_parent[self.s_at(p)].expect("s(x) <= a for x <= a"))
            .collect();
        let op = StateOperator::new(map, iv.algebra.n())?;
        let algebra = ExpandedAlgebra::new(iv.algebra, op)
            .expect("restriction to an image interval satisfies the axioms");
        Ok(IntervalExpansion {
            algebra,
            to_parent: iv.to_parent,
            from_parent: iv.from_parent,
        })
    }

    /// The complementary congruence pair collapsing everything above `z`
    /// (respectively `~z`).
    pub fn factor_congruence(
        &self,
        z: ElementId,
    ) -> Result<(Congruence, Congruence), ExpansionError> {
        if !self.image.contains(z) {
            return Err(ExpansionError::NotInImage(z));
        }
        Ok((self.theta_at(z), self.theta_at(self.lattice.ortho(z))))
    }

    fn theta_at(&self, z: ElementId) -> Congruence {
        let raw: Vec<usize> = self
            .lattice
            .elements()
            .map(|a| self.lattice.meet(a, z))
            .collect();
        Congruence::from_raw(&raw)
    }

    /// All congruences belonging to a complementary permuting pair.
    pub fn factor_congruences(&self) -> Vec<Congruence> {
        let n = self.n();
        let cons = self.congruences();
        let delta = Congruence::delta(n);
        let nabla = Congruence::nabla(n);
        cons.iter()
            .filter(|theta| {
                cons.iter().any(|other| {
                    theta.meet(other) == delta
                        && self.congruence_join(theta, other) == nabla
                        && theta.permutes_with(other)
                })
            })
            .cloned()
            .collect()
    }

    /// `|s(L)| = 2`, cross-checked against the brute-force absence of
    /// nontrivial factor congruences.
    pub fn is_directly_indecomposable(&self) -> bool {
        let by_image = self.image.len() == 2;
        let factors = self.factor_congruences();
        let trivial_only = factors.len() == 2;
        assert_eq!(
            by_image, trivial_only,
            "image size and factor-congruence search must agree"
        );
        by_image
    }

    /// Splits the algebra at a proper image element `z` and verifies that
    /// `x -> (x & z, x & ~z)` is an isomorphism onto the factor product.
    pub fn decompose(&self, z: ElementId) -> Result<Decomposition, ExpansionError> {
        if !self.image.contains(z) {
            return Err(ExpansionError::NotInImage(z));
        }
        let lat = &self.lattice;
        if z == lat.bottom() || z == lat.top() {
            return Err(ExpansionError::DegenerateFactor(z));
        }
        let left = self.restrict_to_interval(z)?;
        let right = self.restrict_to_interval(lat.ortho(z))?;
        let product = product_expanded(&left.algebra, &right.algebra)?;

        let iso: Vec<ElementId> = lat
            .elements()
            .map(|x| {
                let l = left.from_parent[lat.meet(x, z)].expect("x & z lies in [0, z]");
                let r = right.from_parent[lat.meet(x, lat.ortho(z))]
                    .expect("x & ~z lies in [0, ~z]");
                product.pair_index(l, r)
            })
            .collect();

        let mut seen = vec![false; product.algebra.n()];
        for &y in &iso {
            assert!(!seen[y], "decomposition map must be injective");
            seen[y] = true;
        }
        assert_eq!(iso.len(), product.algebra.n(), "decomposition map must be onto");
        let plat = product.algebra.lattice();
        for x in lat.elements() {
            assert_eq!(iso[lat.ortho(x)], plat.ortho(iso[x]));
            assert_eq!(product.algebra.s_at(iso[x]), iso[self.s_at(x)]);
            for y in lat.elements() {
                assert_eq!(iso[lat.meet(x, y)], plat.meet(iso[x], iso[y]));
                assert_eq!(iso[lat.join(x, y)], plat.join(iso[x], iso[y]));
            }
        }

        Ok(Decomposition {
            z,
            left,
            right,
            product,
            iso,
        })
    }

    /// Reads the unique coherent pre-state off a directly indecomposable
    /// algebra: 1 exactly where `s` hits the top.
    pub fn sigma_from_s(&self) -> Result<StateVector, ExpansionError> {
        if !self.is_directly_indecomposable() {
            return Err(ExpansionError::Decomposable);
        }
        let lat = &self.lattice;
        let raw: Vec<u8> = lat
            .elements()
            .map(|x| (self.s_at(x) == lat.top()) as u8)
            .collect();
        let classified = classify(lat, &raw)
            .expect("indecomposable operator induces a pre-state");
        let sigma = classified.state;

        let coherent = self.coherent_prestates();
        assert_eq!(
            coherent,
            vec![sigma.clone()],
            "recovered state must be the unique coherent pre-state"
        );
        for x in lat.elements() {
            for y in lat.elements() {
                if lat.orthogonal(x, y)
                    && self.s_at(lat.join(x, y)) == lat.join(self.s_at(x), self.s_at(y))
                {
                    assert_eq!(
                        sigma.bit(lat.join(x, y)),
                        sigma.bit(x) + sigma.bit(y),
                        "operator additivity must transfer back to the state"
                    );
                }
            }
        }
        Ok(sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{boolean, lattice_from_greechie, mo};
    use crate::iso::expanded_isomorphic;
    use crate::states::{enumerate_two_valued, StateKind};

    fn identity_expansion(lat: &Ortholattice) -> ExpandedAlgebra {
        let op = StateOperator::new(lat.elements().collect(), lat.n()).unwrap();
        ExpandedAlgebra::new(lat.clone(), op).unwrap()
    }

    fn mo2_sigma_ab() -> (Ortholattice, StateVector) {
        let l = mo(2).unwrap();
        let (a, b) = (l.atoms()[0], l.atoms()[1]);
        let mut raw = vec![0u8; 6];
        raw[l.top()] = 1;
        raw[a] = 1;
        raw[b] = 1;
        let sigma = classify(&l, &raw).unwrap().state;
        (l, sigma)
    }

    #[test]
    fn identity_operator_verifies_on_booleans() {
        for k in 1..=3 {
            let b = boolean(k).unwrap();
            let alg = identity_expansion(&b);
            assert_eq!(alg.s_image().len(), b.n());
        }
    }

    #[test]
    fn induced_operators_verify_on_all_mo2_states() {
        let l = mo(2).unwrap();
        for sigma in enumerate_two_valued(&l) {
            let alg = build_internal(&l, &sigma).unwrap();
            assert_eq!(alg.s_image().len(), 2);
        }
    }

    #[test]
    fn constant_top_operator_fails_s2() {
        let b = boolean(2).unwrap();
        let op = StateOperator::new(vec![b.top(); 4], 4).unwrap();
        let report = verify_state_operator(&b, &op).unwrap();
        assert!(!report.passed());
        assert!(report.failed_axioms().contains(&SAxiom::S2));
        let witnesses: Vec<_> = report
            .checks
            .iter()
            .filter(|c| c.axiom == SAxiom::S2 && !c.passed)
            .flat_map(|c| c.witness.clone())
            .collect();
        assert!(!witnesses.is_empty());
    }

    #[test]
    fn state_operator_rejects_malformed_maps() {
        assert!(matches!(
            StateOperator::new(vec![0, 9], 2),
            Err(ExpansionError::OutOfRange(9))
        ));
        assert!(matches!(
            StateOperator::new(vec![0], 2),
            Err(ExpansionError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn image_subalgebra_shapes() {
        let b3 = boolean(3).unwrap();
        assert_eq!(identity_expansion(&b3).image_subalgebra().algebra.n(), 8);

        let (l, sigma) = mo2_sigma_ab();
        let alg = build_internal(&l, &sigma).unwrap();
        let image = alg.image_subalgebra();
        assert_eq!(image.algebra.n(), 2);

        let one = boolean(1).unwrap();
        let p = product_expanded(
            &identity_expansion(&one),
            &build_internal(&l, &sigma).unwrap(),
        )
        .unwrap();
        assert_eq!(p.algebra.s_image().len(), 4);
    }

    #[test]
    fn induced_operator_maps_ones_to_top() {
        let (l, sigma) = mo2_sigma_ab();
        let alg = build_internal(&l, &sigma).unwrap();
        for x in l.elements() {
            let expected = if sigma.value(x) { l.top() } else { l.bottom() };
            assert_eq!(alg.s_at(x), expected);
        }
    }

    #[test]
    fn non_additive_prestate_still_expands() {
        let b = boolean(3).unwrap();
        let sigma = enumerate_prestates(&b)
            .into_iter()
            .find(|s| s.kind() == StateKind::PreState)
            .expect("the co-atom pre-state is not additive");
        let alg = build_internal(&b, &sigma).unwrap();
        assert_eq!(alg.s_image().len(), 2);
    }

    #[test]
    fn coherent_prestate_counts() {
        let (l, sigma) = mo2_sigma_ab();
        let alg = build_internal(&l, &sigma).unwrap();
        let coherent = alg.coherent_prestates();
        assert_eq!(coherent.len(), 1);
        assert_eq!(coherent[0], sigma);

        let b3 = boolean(3).unwrap();
        assert_eq!(identity_expansion(&b3).coherent_prestates().len(), 4);

        let one = boolean(1).unwrap();
        let p = product_expanded(&identity_expansion(&one), &alg).unwrap();
        assert_eq!(p.algebra.coherent_prestates().len(), 2);
    }

    #[test]
    fn filters_on_the_two_chain() {
        let two = identity_expansion(&boolean(1).unwrap());
        let bps = two.bps_filters();
        assert_eq!(bps.len(), 1);
        assert_eq!(bps[0].subset.bit_string(), "01");
        let ieb = two.ieb_filters();
        assert_eq!(ieb.len(), 2);
    }

    #[test]
    fn filters_on_boolean2_with_identity() {
        let alg = identity_expansion(&boolean(2).unwrap());
        assert_eq!(alg.ieb_filters().len(), 4);
        assert_eq!(alg.bps_filters().len(), 2);
    }

    #[test]
    fn single_bps_filter_matches_the_single_coherent_state() {
        let (l, sigma) = mo2_sigma_ab();
        let alg = build_internal(&l, &sigma).unwrap();
        let bps = alg.bps_filters();
        assert_eq!(bps.len(), 1);
        assert_eq!(bps[0].subset, sigma.one_set());
    }

    #[test]
    fn congruence_counts_on_small_algebras() {
        let two = identity_expansion(&boolean(1).unwrap());
        assert_eq!(two.congruences().len(), 2);

        let b2 = identity_expansion(&boolean(2).unwrap());
        assert_eq!(b2.congruences().len(), 4);

        let (l, sigma) = mo2_sigma_ab();
        let alg = build_internal(&l, &sigma).unwrap();
        let cons = alg.congruences();
        assert_eq!(cons.len(), 2);
        assert!(cons.contains(&Congruence::delta(6)));
        assert!(cons.contains(&Congruence::nabla(6)));
    }

    #[test]
    fn scan_and_principal_closure_agree() {
        let algebras = vec![
            identity_expansion(&boolean(1).unwrap()),
            identity_expansion(&boolean(2).unwrap()),
            identity_expansion(&boolean(3).unwrap()),
            {
                let (l, sigma) = mo2_sigma_ab();
                build_internal(&l, &sigma).unwrap()
            },
        ];
        for alg in &algebras {
            assert_eq!(
                alg.congruences_by_partition_scan(),
                alg.congruences_by_principal_closure()
            );
        }
    }

    #[test]
    fn filter_congruence_maps_biject() {
        let cases = vec![
            identity_expansion(&boolean(1).unwrap()),
            identity_expansion(&boolean(2).unwrap()),
            {
                let (l, sigma) = mo2_sigma_ab();
                build_internal(&l, &sigma).unwrap()
            },
        ];
        for alg in &cases {
            let maps = alg.filter_congruence_maps();
            assert_eq!(maps.pairs.len(), alg.congruences().len());
        }
    }

    #[test]
    fn factor_congruences_come_from_the_image() {
        let alg = identity_expansion(&boolean(2).unwrap());
        let factors = alg.factor_congruences();
        assert_eq!(factors.len(), 4);
        let mut from_image: Vec<Congruence> = alg
            .s_image()
            .iter()
            .map(|z| alg.factor_congruence(z).unwrap().0)
            .collect();
        from_image.sort();
        from_image.dedup();
        assert_eq!(from_image.len(), 4, "z -> theta_z must be injective");
        for theta in &from_image {
            assert!(factors.contains(theta));
        }
    }

    #[test]
    fn decompose_product_into_original_factors() {
        let one = boolean(1).unwrap();
        let (l, sigma) = mo2_sigma_ab();
        let mo2_alg = build_internal(&l, &sigma).unwrap();
        let p = product_expanded(&identity_expansion(&one), &mo2_alg).unwrap();

        let proper: Vec<ElementId> = p
            .algebra
            .s_image()
            .iter()
            .filter(|&z| z != p.algebra.lattice().bottom() && z != p.algebra.lattice().top())
            .collect();
        assert_eq!(proper.len(), 2);

        let d = p.algebra.decompose(proper[0]).unwrap();
        let sides = [&d.left.algebra, &d.right.algebra];
        assert!(sides
            .iter()
            .any(|f| expanded_isomorphic(f, &identity_expansion(&one))));
        assert!(sides.iter().any(|f| expanded_isomorphic(f, &mo2_alg)));
        // z and ~z give the same unordered factor pair.
        let d2 = p.algebra.decompose(proper[1]).unwrap();
        assert!(expanded_isomorphic(&d.left.algebra, &d2.right.algebra));
        assert!(expanded_isomorphic(&d.right.algebra, &d2.left.algebra));
    }

    #[test]
    fn decompose_rejects_degenerate_and_foreign_elements() {
        let (l, sigma) = mo2_sigma_ab();
        let alg = build_internal(&l, &sigma).unwrap();
        assert!(matches!(
            alg.decompose(l.top()),
            Err(ExpansionError::DegenerateFactor(_))
        ));
        let atom = l.atoms()[0];
        assert!(matches!(
            alg.decompose(atom),
            Err(ExpansionError::NotInImage(_))
        ));
    }

    #[test]
    fn mo2_expansions_are_directly_indecomposable() {
        let (l, sigma) = mo2_sigma_ab();
        let alg = build_internal(&l, &sigma).unwrap();
        assert!(alg.is_directly_indecomposable());

        let one = boolean(1).unwrap();
        let p = product_expanded(&identity_expansion(&one), &alg).unwrap();
        assert!(!p.algebra.is_directly_indecomposable());
    }

    #[test]
    fn recovered_state_round_trips() {
        let (l, sigma) = mo2_sigma_ab();
        let alg = build_internal(&l, &sigma).unwrap();
        assert_eq!(alg.sigma_from_s().unwrap(), sigma);

        let paste = lattice_from_greechie("block: a b c\nblock: c d e\n").unwrap();
        for sigma in enumerate_two_valued(&paste) {
            let alg = build_internal(&paste, &sigma).unwrap();
            assert_eq!(alg.sigma_from_s().unwrap(), sigma);
        }
    }

    #[test]
    fn sigma_from_s_requires_indecomposability() {
        let one = boolean(1).unwrap();
        let (l, sigma) = mo2_sigma_ab();
        let p = product_expanded(
            &identity_expansion(&one),
            &build_internal(&l, &sigma).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            p.algebra.sigma_from_s(),
            Err(ExpansionError::Decomposable)
        ));
    }

    #[test]
    fn interval_restriction_requires_image_membership() {
        let (l, sigma) = mo2_sigma_ab();
        let alg = build_internal(&l, &sigma).unwrap();
        assert!(matches!(
            alg.restrict_to_interval(l.atoms()[0]),
            Err(ExpansionError::NotInImage(_))
        ));
        let whole = alg.restrict_to_interval(l.top()).unwrap();
        assert!(expanded_isomorphic(&whole.algebra, &alg));
    }
}
