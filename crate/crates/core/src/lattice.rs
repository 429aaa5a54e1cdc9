//! Finite ortholattices: dense order relation, precomputed meet/join tables,
//! and exhaustive verification of the orthomodular axioms.
//!
//! Elements are plain indices into tables. Index 0 is always the bottom
//! element and index `n - 1` the top, enforced by canonical topological
//! renumbering at construction time.

use serde::Serialize;
use thiserror::Error;

/// Index of a lattice element, in `[0, n)`.
pub type ElementId = usize;

/// Hard cap on element count; the engine is for desk-scale lattices.
pub const MAX_ELEMENTS: usize = 128;

/// Errors raised while building a lattice from tables or an order relation.
///
/// Structural problems (sizes, ranges, non-permutation ortho) are distinct
/// from axiom failures, which are reported by [`Ortholattice::verify`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice must have at least 2 elements, got {0}")]
    TooSmall(usize),
    #[error("lattice exceeds the {MAX_ELEMENTS}-element cap: {0}")]
    TooLarge(usize),
    #[error("table size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("element id {0} out of range")]
    OutOfRange(usize),
    #[error("ortho map is not a permutation")]
    OrthoNotPermutation,
    #[error("order relation is not reflexive at element {0}")]
    NotReflexive(ElementId),
    #[error("order relation has a cycle through elements {0} and {1}")]
    NotAntisymmetric(ElementId, ElementId),
    #[error("order relation is not transitive at ({0}, {1}, {2})")]
    NotTransitive(ElementId, ElementId, ElementId),
    #[error("poset has no unique bottom element")]
    NoBottom,
    #[error("poset has no unique top element")]
    NoTop,
    #[error("elements {0} and {1} have no greatest lower bound")]
    NoMeet(ElementId, ElementId),
    #[error("elements {0} and {1} have no least upper bound")]
    NoJoin(ElementId, ElementId),
    #[error("interval [0, a] is degenerate: a is the bottom element")]
    DegenerateInterval,
}

/// A subset of lattice elements, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementSubset {
    bits: u128,
    n: usize,
}

impl ElementSubset {
    pub fn empty(n: usize) -> Self {
        ElementSubset { bits: 0, n }
    }

    pub fn from_indices<I: IntoIterator<Item = ElementId>>(n: usize, iter: I) -> Self {
        let mut s = Self::empty(n);
        for x in iter {
            s.insert(x);
        }
        s
    }

    /// Parses a bitstring like `"0101"`; char `i` gives membership of element `i`.
    pub fn from_bit_string(text: &str) -> Option<Self> {
        let n = text.len();
        if n == 0 || n > MAX_ELEMENTS {
            return None;
        }
        let mut s = Self::empty(n);
        for (i, c) in text.chars().enumerate() {
            match c {
                '1' => s.insert(i),
                '0' => {}
                _ => return None,
            }
        }
        Some(s)
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, x: ElementId) -> bool {
        debug_assert!(x < self.n);
        self.bits >> x & 1 == 1
    }

    pub fn insert(&mut self, x: ElementId) {
        assert!(x < self.n);
        self.bits |= 1 << x;
    }

    pub fn remove(&mut self, x: ElementId) {
        assert!(x < self.n);
        self.bits &= !(1 << x);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.n).filter(move |&x| self.contains(x))
    }

    pub fn is_subset_of(&self, other: &ElementSubset) -> bool {
        self.bits & !other.bits == 0
    }

    /// Membership bitstring in canonical element order.
    pub fn bit_string(&self) -> String {
        (0..self.n)
            .map(|x| if self.contains(x) { '1' } else { '0' })
            .collect()
    }

    /// True if the subset is an increasing (upward closed) set in `lat`.
    pub fn is_increasing(&self, lat: &Ortholattice) -> bool {
        self.iter()
            .all(|a| lat.elements().all(|x| !lat.leq(a, x) || self.contains(x)))
    }
}

/// Axioms checked by [`Ortholattice::verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Reflexivity,
    Antisymmetry,
    Transitivity,
    Bounds,
    MeetIsGlb,
    JoinIsLub,
    Involution,
    DeMorgan,
    Complementation,
    Orthomodularity,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Axiom::Reflexivity => "reflexivity",
            Axiom::Antisymmetry => "antisymmetry",
            Axiom::Transitivity => "transitivity",
            Axiom::Bounds => "bounds",
            Axiom::MeetIsGlb => "meet-is-glb",
            Axiom::JoinIsLub => "join-is-lub",
            Axiom::Involution => "involution",
            Axiom::DeMorgan => "de-morgan",
            Axiom::Complementation => "complementation",
            Axiom::Orthomodularity => "orthomodularity",
        };
        f.write_str(s)
    }
}

/// Result of one axiom scan: pass/fail, first witness, violation count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// Elements instantiating the first failure, if any.
    pub witness: Option<Vec<ElementId>>,
    pub violations: usize,
}

/// Full axiom report; lists every axiom, not just the first failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<AxiomCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_axioms(&self) -> Vec<Axiom> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.axiom)
            .collect()
    }

    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks.iter().find(|c| c.axiom == axiom).unwrap()
    }
}

impl std::fmt::Display for VerificationReport {
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

/// A finite bounded lattice with involution, stored densely.
///
/// `leq` is kept as per-element up-set and down-set bitmasks; meet and join
/// are total tables computed from the order at construction. The structure
/// is immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ortholattice {
    n: usize,
    /// `up[a]` has bit `b` set iff `a <= b`.
    up: Vec<u128>,
    /// `down[a]` has bit `b` set iff `b <= a`.
    down: Vec<u128>,
    meet: Vec<ElementId>,
    join: Vec<ElementId>,
    ortho: Vec<ElementId>,
    names: Vec<String>,
    bottom: ElementId,
    top: ElementId,
}

/// An interval algebra `[0, a]` together with its embedding into the parent.
#[derive(Debug, Clone)]
pub struct Interval {
    pub algebra: Ortholattice,
    /// Interval index -> parent index.
    pub to_parent: Vec<ElementId>,
    /// Parent index -> interval index, when the element lies in `[0, a]`.
    pub from_parent: Vec<Option<ElementId>>,
}

/// A direct product together with the pair indexing map.
#[derive(Debug, Clone)]
pub struct Product {
    pub algebra: Ortholattice,
    n_right: usize,
    /// Row-major pair index `(i, j) -> i * n2 + j` to canonical index.
    index_of_pair: Vec<ElementId>,
}

impl Product {
    pub fn pair_index(&self, left: ElementId, right: ElementId) -> ElementId {
        self.index_of_pair[left * self.n_right + right]
    }
}

fn permutation_ok(map: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &x in map {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    map.len() == n
}

impl Ortholattice {
    /// Builds a lattice from a full order relation and an ortho map.
    ///
    /// Validates the poset laws, renumbers elements topologically (bottom
    /// first, top last, ties broken by original index), and computes the
    /// meet/join tables, failing if any pair lacks a glb or lub. The
    /// ortholattice axioms themselves are *not* checked here; run
    /// [`Ortholattice::verify`] for that.
    pub fn from_leq(
        leq: &[Vec<bool>],
        ortho: &[ElementId],
        names: &[String],
    ) -> Result<Self, LatticeError> {
        let n = leq.len();
        if n < 2 {
            return Err(LatticeError::TooSmall(n));
        }
        if n > MAX_ELEMENTS {
            return Err(LatticeError::TooLarge(n));
        }
        for row in leq {
            if row.len() != n {
                return Err(LatticeError::SizeMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        if ortho.len() != n {
            return Err(LatticeError::SizeMismatch {
                expected: n,
                got: ortho.len(),
            });
        }
        if names.len() != n {
            return Err(LatticeError::SizeMismatch {
                expected: n,
                got: names.len(),
            });
        }
        if !permutation_ok(ortho, n) {
            return Err(LatticeError::OrthoNotPermutation);
        }

        // Poset laws.
        for a in 0..n {
            if !leq[a][a] {
                return Err(LatticeError::NotReflexive(a));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(LatticeError::NotAntisymmetric(a, b));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !leq[a][b] {
                    continue;
                }
                for c in 0..n {
                    if leq[b][c] && !leq[a][c] {
                        return Err(LatticeError::NotTransitive(a, b, c));
                    }
                }
            }
        }

        // Unique bounds.
        let bottom_old = (0..n)
            .find(|&b| (0..n).all(|x| leq[b][x]))
            .ok_or(LatticeError::NoBottom)?;
        let top_old = (0..n)
            .find(|&t| (0..n).all(|x| leq[x][t]))
            .ok_or(LatticeError::NoTop)?;
        debug_assert_ne!(bottom_old, top_old);

        // Canonical topological order: repeatedly emit the smallest original
        // index whose strict predecessors are all emitted.
        let mut order = Vec::with_capacity(n);
        let mut emitted = vec![false; n];
        for _ in 0..n {
            let next = (0..n)
                .find(|&x| {
                    !emitted[x] && (0..n).all(|p| p == x || !leq[p][x] || emitted[p])
                })
                .expect("acyclic order always has an available element");
            emitted[next] = true;
            order.push(next);
        }
        let mut new_of_old = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new;
        }

        let mut up = vec![0u128; n];
        let mut down = vec![0u128; n];
        for a_old in 0..n {
            for b_old in 0..n {
                if leq[a_old][b_old] {
                    let a = new_of_old[a_old];
                    let b = new_of_old[b_old];
                    up[a] |= 1 << b;
                    down[b] |= 1 << a;
                }
            }
        }
        let ortho_new: Vec<ElementId> =
            order.iter().map(|&old| new_of_old[ortho[old]]).collect();
        let names_new: Vec<String> = order.iter().map(|&old| names[old].clone()).collect();
        let bottom = new_of_old[bottom_old];
        let top = new_of_old[top_old];
        debug_assert_eq!(bottom, 0);
        debug_assert_eq!(top, n - 1);

        // Meet/join tables from the order; fail on any missing bound.
        let mut meet = vec![0usize; n * n];
        let mut join = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                let lower = down[a] & down[b];
                meet[a * n + b] = greatest_of(&down, lower).ok_or(LatticeError::NoMeet(a, b))?;
                let upper = up[a] & up[b];
                join[a * n + b] = least_of(&up, upper).ok_or(LatticeError::NoJoin(a, b))?;
            }
        }

        Ok(Ortholattice {
            n,
            up,
            down,
            meet,
            join,
            ortho: ortho_new,
            names: names_new,
            bottom,
            top,
        })
    }

    /// Builds a candidate directly from explicit tables, checking only
    /// structural consistency (sizes, ranges, ortho a permutation).
    ///
    /// Elements keep the caller's order; bottom is taken to be index 0 and
    /// top index `n - 1`. Poset laws and table/order consistency are
    /// reported by [`Ortholattice::verify`], not here.
    pub fn from_raw_parts(
        leq: &[Vec<bool>],
        meet: Vec<ElementId>,
        join: Vec<ElementId>,
        ortho: Vec<ElementId>,
        names: Vec<String>,
    ) -> Result<Self, LatticeError> {
        let n = leq.len();
        if n < 2 {
            return Err(LatticeError::TooSmall(n));
        }
        if n > MAX_ELEMENTS {
            return Err(LatticeError::TooLarge(n));
        }
        for row in leq {
            if row.len() != n {
                return Err(LatticeError::SizeMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        for (len, expected) in [
            (meet.len(), n * n),
            (join.len(), n * n),
            (ortho.len(), n),
            (names.len(), n),
        ] {
            if len != expected {
                return Err(LatticeError::SizeMismatch { expected, got: len });
            }
        }
        if let Some(&x) = meet.iter().chain(join.iter()).find(|&&x| x >= n) {
            return Err(LatticeError::OutOfRange(x));
        }
        if !permutation_ok(&ortho, n) {
            return Err(LatticeError::OrthoNotPermutation);
        }
        let mut up = vec![0u128; n];
        let mut down = vec![0u128; n];
        for a in 0..n {
            for b in 0..n {
                if leq[a][b] {
                    up[a] |= 1 << b;
                    down[b] |= 1 << a;
                }
            }
        }
        Ok(Ortholattice {
            n,
            up,
            down,
            meet,
            join,
            ortho,
            names,
            bottom: 0,
            top: n - 1,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> std::ops::Range<ElementId> {
        0..self.n
    }

    pub fn bottom(&self) -> ElementId {
        self.bottom
    }

    pub fn top(&self) -> ElementId {
        self.top
    }

    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        self.up[a] >> b & 1 == 1
    }

    pub fn lt(&self, a: ElementId, b: ElementId) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn meet(&self, a: ElementId, b: ElementId) -> ElementId {
        self.meet[a * self.n + b]
    }

    pub fn join(&self, a: ElementId, b: ElementId) -> ElementId {
        self.join[a * self.n + b]
    }

    pub fn ortho(&self, a: ElementId) -> ElementId {
        self.ortho[a]
    }

    pub fn name(&self, a: ElementId) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Bitmask of elements `>= a`.
    pub fn up_set(&self, a: ElementId) -> ElementSubset {
        ElementSubset {
            bits: self.up[a],
            n: self.n,
        }
    }

    /// Bitmask of elements `<= a`.
    pub fn down_set(&self, a: ElementId) -> ElementSubset {
        ElementSubset {
            bits: self.down[a],
            n: self.n,
        }
    }

    /// Minimal nonzero elements.
    pub fn atoms(&self) -> Vec<ElementId> {
        self.elements()
            .filter(|&x| {
                x != self.bottom
                    && self
                        .elements()
                        .all(|y| y == self.bottom || y == x || !self.leq(y, x))
            })
            .collect()
    }

    /// `a` is orthogonal to `b`: `a <= ~b`.
    pub fn orthogonal(&self, a: ElementId, b: ElementId) -> bool {
        self.leq(a, self.ortho(b))
    }

    /// `a` and `b` have a common complement.
    pub fn perspective(&self, a: ElementId, b: ElementId) -> bool {
        self.elements().any(|x| {
            self.join(a, x) == self.top
                && self.join(b, x) == self.top
                && self.meet(a, x) == self.bottom
                && self.meet(b, x) == self.bottom
        })
    }

    /// First triple violating `x & (y | z) = (x & y) | (x & z)`, if any.
    pub fn distributivity_witness(&self) -> Option<(ElementId, ElementId, ElementId)> {
        for x in self.elements() {
            for y in self.elements() {
                for z in self.elements() {
                    let lhs = self.meet(x, self.join(y, z));
                    let rhs = self.join(self.meet(x, y), self.meet(x, z));
                    if lhs != rhs {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_boolean(&self) -> bool {
        self.distributivity_witness().is_none()
    }

    /// Runs every axiom scan and reports all failures with witnesses.
    pub fn verify(&self) -> VerificationReport {
        let n = self.n;
        let mut checks = Vec::new();

        let mut scan =
            |axiom: Axiom, witnesses: &mut dyn Iterator<Item = Option<Vec<ElementId>>>| {
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
                checks.push(AxiomCheck {
                    axiom,
                    passed: violations == 0,
                    witness: first,
                    violations,
                });
            };

        scan(
            Axiom::Reflexivity,
            &mut (0..n).map(|a| (!self.leq(a, a)).then(|| vec![a])),
        );
        scan(
            Axiom::Antisymmetry,
            &mut (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| {
                (a != b && self.leq(a, b) && self.leq(b, a)).then(|| vec![a, b])
            }),
        );
        scan(
            Axiom::Transitivity,
            &mut (0..n)
                .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
                .map(|(a, b, c)| {
                    (self.leq(a, b) && self.leq(b, c) && !self.leq(a, c)).then(|| vec![a, b, c])
                }),
        );
        scan(
            Axiom::Bounds,
            &mut (0..n).map(|x| {
                (!self.leq(self.bottom, x) || !self.leq(x, self.top)).then(|| vec![x])
            }),
        );
        scan(
            Axiom::MeetIsGlb,
            &mut (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| {
                let m = self.meet(a, b);
                let is_lower = self.leq(m, a) && self.leq(m, b);
                let greatest =
                    (0..n).all(|c| !(self.leq(c, a) && self.leq(c, b)) || self.leq(c, m));
                (!is_lower || !greatest).then(|| vec![a, b])
            }),
        );
        scan(
            Axiom::JoinIsLub,
            &mut (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| {
                let j = self.join(a, b);
                let is_upper = self.leq(a, j) && self.leq(b, j);
                let least = (0..n).all(|c| !(self.leq(a, c) && self.leq(b, c)) || self.leq(j, c));
                (!is_upper || !least).then(|| vec![a, b])
            }),
        );
        scan(
            Axiom::Involution,
            &mut (0..n).map(|x| (self.ortho(self.ortho(x)) != x).then(|| vec![x])),
        );
        scan(
            Axiom::DeMorgan,
            &mut (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| {
                (self.ortho(self.join(x, y)) != self.meet(self.ortho(x), self.ortho(y)))
                    .then(|| vec![x, y])
            }),
        );
        scan(
            Axiom::Complementation,
            &mut (0..n).map(|x| (self.meet(x, self.ortho(x)) != self.bottom).then(|| vec![x])),
        );
        scan(
            Axiom::Orthomodularity,
            &mut (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| {
                let lhs = self.join(x, self.meet(self.ortho(x), self.join(x, y)));
                (lhs != self.join(x, y)).then(|| vec![x, y])
            }),
        );

        VerificationReport { checks }
    }

    /// The center: elements `z` with `a = (a & z) | (a & ~z)` for every `a`.
    ///
    /// Cross-checked against the commutation definition (`(a,b,z)T` for all
    /// `a`, `b`); the two scans disagreeing is an internal-consistency bug.
    pub fn center(&self) -> ElementSubset {
        let by_decomposition = ElementSubset::from_indices(
            self.n,
            self.elements().filter(|&z| {
                self.elements().all(|a| {
                    self.join(self.meet(a, z), self.meet(a, self.ortho(z))) == a
                })
            }),
        );
        let by_commutation = ElementSubset::from_indices(
            self.n,
            self.elements().filter(|&z| {
                self.elements()
                    .all(|a| self.elements().all(|b| self.triple_t(a, b, z)))
            }),
        );
        assert_eq!(
            by_decomposition, by_commutation,
            "center scans disagree; internal consistency violated"
        );
        by_decomposition
    }

    fn dist_d(&self, a: ElementId, b: ElementId, c: ElementId) -> bool {
        self.meet(self.join(a, b), c) == self.join(self.meet(a, c), self.meet(b, c))
    }

    fn dist_d_star(&self, a: ElementId, b: ElementId, c: ElementId) -> bool {
        self.join(self.meet(a, b), c) == self.meet(self.join(a, c), self.join(b, c))
    }

    /// `(a,b,c)T`: both distributivity conditions under all permutations.
    fn triple_t(&self, a: ElementId, b: ElementId, c: ElementId) -> bool {
        let perms = [
            (a, b, c),
            (a, c, b),
            (b, a, c),
            (b, c, a),
            (c, a, b),
            (c, b, a),
        ];
        perms
            .iter()
            .all(|&(x, y, z)| self.dist_d(x, y, z) && self.dist_d_star(x, y, z))
    }

    /// The interval algebra `[0, a]` with relative complement `~x & a`.
    pub fn interval(&self, a: ElementId) -> Result<Interval, LatticeError> {
        if a == self.bottom {
            return Err(LatticeError::DegenerateInterval);
        }
        let to_parent: Vec<ElementId> = self.down_set(a).iter().collect();
        let m = to_parent.len();
        let mut from_parent = vec![None; self.n];
        for (i, &p) in to_parent.iter().enumerate() {
            from_parent[p] = Some(i);
        }
        let leq: Vec<Vec<bool>> = to_parent
            .iter()
            .map(|&p| to_parent.iter().map(|&q| self.leq(p, q)).collect())
            .collect();
        let ortho: Vec<ElementId> = to_parent
            .iter()
            .map(|&p| from_parent[self.meet(self.ortho(p), a)].expect("~x & a lies below a"))
            .collect();
        let names: Vec<String> = to_parent.iter().map(|&p| self.names[p].clone()).collect();
        let algebra = Ortholattice::from_leq(&leq, &ortho, &names)
            .expect("interval of a lattice is a lattice");
        // from_leq renumbers; recompute the embedding in the new order.
        let reordered: Vec<ElementId> = algebra
            .names()
            .iter()
            .map(|nm| {
                to_parent
                    .iter()
                    .copied()
                    .find(|&p| self.name(p) == nm)
                    .expect("interval names come from the parent")
            })
            .collect();
        let mut from_parent = vec![None; self.n];
        for (i, &p) in reordered.iter().enumerate() {
            from_parent[p] = Some(i);
        }
        debug_assert_eq!(reordered.len(), m);
        Ok(Interval {
            algebra,
            to_parent: reordered,
            from_parent,
        })
    }

    /// Componentwise direct product.
    pub fn product(&self, other: &Ortholattice) -> Result<Product, LatticeError> {
        let (n1, n2) = (self.n, other.n);
        let n = n1 * n2;
        if n > MAX_ELEMENTS {
            return Err(LatticeError::TooLarge(n));
        }
        let idx = |i: usize, j: usize| i * n2 + j;
        let mut leq = vec![vec![false; n]; n];
        let mut ortho = vec![0usize; n];
        let mut names = vec![String::new(); n];
        for i1 in 0..n1 {
            for j1 in 0..n2 {
                let a = idx(i1, j1);
                ortho[a] = idx(self.ortho(i1), other.ortho(j1));
                names[a] = format!("({},{})", self.names[i1], other.names[j1]);
                for i2 in 0..n1 {
                    for j2 in 0..n2 {
                        leq[a][idx(i2, j2)] = self.leq(i1, i2) && other.leq(j1, j2);
                    }
                }
            }
        }
        let algebra = Ortholattice::from_leq(&leq, &ortho, &names)?;
        let mut index_of_pair = vec![0usize; n];
        for i in 0..n1 {
            for j in 0..n2 {
                let nm = format!("({},{})", self.names[i], other.names[j]);
                index_of_pair[idx(i, j)] = algebra
                    .names()
                    .iter()
                    .position(|x| *x == nm)
                    .expect("pair name survives renumbering");
            }
        }
        Ok(Product {
            algebra,
            n_right: n2,
            index_of_pair,
        })
    }
}

/// Greatest element of the bitmask `set`, i.e. the member above all members.
fn greatest_of(down: &[u128], set: u128) -> Option<ElementId> {
    if set == 0 {
        return None;
    }
    (0..down.len()).find(|&m| set >> m & 1 == 1 && set & !down[m] == 0)
}

/// Least element of the bitmask `set`.
fn least_of(up: &[u128], set: u128) -> Option<ElementId> {
    if set == 0 {
        return None;
    }
    (0..up.len()).find(|&m| set >> m & 1 == 1 && set & !up[m] == 0)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::io::{boolean, mo};
    use crate::iso::isomorphic;

    /// O6, the benzene ring: 0 < a < b < 1 and 0 < b' < a' < 1 with
    /// primes swapped by ortho. Not orthomodular.
    pub(crate) fn o6() -> Ortholattice {
        let names: Vec<String> = ["0", "a", "b", "b'", "a'", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        // order: 0 < a < b < 1; 0 < b' < a' < 1
        let pairs: &[(usize, usize)] = &[
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 2),
            (1, 5),
            (2, 5),
            (3, 4),
            (3, 5),
            (4, 5),
        ];
        let mut leq = vec![vec![false; 6]; 6];
        for i in 0..6 {
            leq[i][i] = true;
        }
        for &(a, b) in pairs {
            leq[a][b] = true;
        }
        let ortho = vec![5, 4, 3, 2, 1, 0];
        Ortholattice::from_leq(&leq, &ortho, &names).unwrap()
    }

    #[test]
    fn boolean_algebras_pass_all_axioms() {
        for k in 1..=4 {
            let b = boolean(k).unwrap();
            let report = b.verify();
            assert!(report.passed(), "boolean({k}) failed:\n{report}");
        }
    }

    #[test]
    fn mo_families_pass_all_axioms() {
        for k in 1..=4 {
            let l = mo(k).unwrap();
            assert!(l.verify().passed(), "mo({k}) failed verification");
        }
    }

    #[test]
    fn o6_fails_exactly_the_orthomodular_law() {
        let l = o6();
        let report = l.verify();
        assert_eq!(report.failed_axioms(), vec![Axiom::Orthomodularity]);
        let om = report.check(Axiom::Orthomodularity);
        let w = om.witness.as_ref().unwrap();
        assert_eq!(l.name(w[0]), "a");
        assert_eq!(l.name(w[1]), "b");
        // a | (a' & (a|b)) = a | 0 = a, but a|b = b.
        let (a, b) = (w[0], w[1]);
        assert_eq!(l.join(a, l.meet(l.ortho(a), l.join(a, b))), a);
        assert_eq!(l.join(a, b), b);
    }

    #[test]
    fn orthomodular_identity_in_order_form() {
        // For x <= y: y = x | (y & ~x), on every verified corpus lattice.
        for l in [
            boolean(1).unwrap(),
            boolean(3).unwrap(),
            mo(2).unwrap(),
            mo(3).unwrap(),
        ] {
            assert!(l.verify().passed());
            for x in l.elements() {
                for y in l.elements() {
                    if l.leq(x, y) {
                        assert_eq!(l.join(x, l.meet(y, l.ortho(x))), y);
                    }
                }
            }
        }
    }

    #[test]
    fn center_of_boolean_is_everything() {
        let b = boolean(3).unwrap();
        assert_eq!(b.center().len(), 8);
    }

    #[test]
    fn center_of_mo2_is_trivial() {
        let l = mo(2).unwrap();
        let z = l.center();
        assert_eq!(z.len(), 2);
        assert!(z.contains(l.bottom()) && z.contains(l.top()));
    }

    #[test]
    fn center_of_product_is_product_of_centers() {
        let p = boolean(1).unwrap().product(&mo(2).unwrap()).unwrap();
        let z = p.algebra.center();
        assert_eq!(z.len(), 4);
        let names: Vec<&str> = z.iter().map(|x| p.algebra.name(x)).collect();
        assert_eq!(names, vec!["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
    }

    #[test]
    fn center_is_boolean_subalgebra() {
        for l in [mo(2).unwrap(), mo(3).unwrap(), boolean(3).unwrap()] {
            let z = l.center();
            assert!(z.contains(l.bottom()) && z.contains(l.top()));
            for a in z.iter() {
                assert!(z.contains(l.ortho(a)));
                for b in z.iter() {
                    assert!(z.contains(l.meet(a, b)));
                    assert!(z.contains(l.join(a, b)));
                }
            }
            // Distributivity on the center's elements.
            for x in z.iter() {
                for y in z.iter() {
                    for w in z.iter() {
                        assert_eq!(
                            l.meet(x, l.join(y, w)),
                            l.join(l.meet(x, y), l.meet(x, w))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn interval_at_top_is_isomorphic_copy() {
        let l = mo(2).unwrap();
        let iv = l.interval(l.top()).unwrap();
        assert!(isomorphic(&l, &iv.algebra));
    }

    #[test]
    fn interval_of_boolean3_at_coatom_is_boolean2() {
        let b = boolean(3).unwrap();
        let coatom = b.ortho(b.atoms()[0]);
        let iv = b.interval(coatom).unwrap();
        assert_eq!(iv.algebra.n(), 4);
        assert!(isomorphic(&iv.algebra, &boolean(2).unwrap()));
    }

    #[test]
    fn interval_of_mo2_at_atom_is_two_chain() {
        let l = mo(2).unwrap();
        let iv = l.interval(l.atoms()[0]).unwrap();
        assert_eq!(iv.algebra.n(), 2);
        assert!(iv.algebra.verify().passed());
    }

    #[test]
    fn interval_order_agrees_with_parent() {
        let l = mo(3).unwrap();
        for a in l.elements().skip(1) {
            let iv = l.interval(a).unwrap();
            for i in iv.algebra.elements() {
                for j in iv.algebra.elements() {
                    assert_eq!(
                        iv.algebra.leq(i, j),
                        l.leq(iv.to_parent[i], iv.to_parent[j])
                    );
                }
            }
        }
    }

    #[test]
    fn interval_at_bottom_is_degenerate() {
        let l = mo(2).unwrap();
        assert_eq!(
            l.interval(l.bottom()).unwrap_err(),
            LatticeError::DegenerateInterval
        );
    }

    #[test]
    fn product_of_chains_is_boolean2() {
        let two = boolean(1).unwrap();
        let p = two.product(&two).unwrap();
        assert!(isomorphic(&p.algebra, &boolean(2).unwrap()));
    }

    #[test]
    fn product_with_mo2_is_a_12_element_oml() {
        let p = boolean(1).unwrap().product(&mo(2).unwrap()).unwrap();
        assert_eq!(p.algebra.n(), 12);
        assert!(p.algebra.verify().passed());
    }

    #[test]
    fn perspectivity_examples() {
        let l = mo(2).unwrap();
        for a in l.elements() {
            assert!(l.perspective(a, a));
        }
        let atoms = l.atoms();
        assert!(l.perspective(atoms[0], atoms[1]));

        let b = boolean(2).unwrap();
        assert!(!b.perspective(b.atoms()[0], b.top()));
    }

    #[test]
    fn orthogonality_examples() {
        let l = mo(2).unwrap();
        for x in l.elements() {
            assert!(l.orthogonal(x, l.ortho(x)));
        }
        let (a, b) = (l.atoms()[0], l.atoms()[1]);
        assert!(!l.orthogonal(a, b));
        assert!(l.orthogonal(l.bottom(), l.bottom()));
    }

    #[test]
    fn distributivity_detection() {
        assert!(boolean(3).unwrap().is_boolean());
        let l = mo(2).unwrap();
        assert!(!l.is_boolean());
        assert!(l.distributivity_witness().is_some());
    }

    #[test]
    fn raw_parts_reject_structural_garbage() {
        let leq = vec![vec![true, true], vec![false, true]];
        // ortho not a permutation
        let err = Ortholattice::from_raw_parts(
            &leq,
            vec![0, 0, 0, 1],
            vec![0, 1, 1, 1],
            vec![1, 1],
            vec!["0".into(), "1".into()],
        )
        .unwrap_err();
        assert_eq!(err, LatticeError::OrthoNotPermutation);

        let err = Ortholattice::from_raw_parts(
            &leq,
            vec![0, 0, 0, 7],
            vec![0, 1, 1, 1],
            vec![1, 0],
            vec!["0".into(), "1".into()],
        )
        .unwrap_err();
        assert_eq!(err, LatticeError::OutOfRange(7));
    }

    #[test]
    fn raw_parts_bad_tables_fail_axioms_not_structure() {
        // Consistent sizes but a wrong meet table: verify flags it.
        let leq = vec![vec![true, true], vec![false, true]];
        let cand = Ortholattice::from_raw_parts(
            &leq,
            vec![0, 1, 1, 1], // meet(0,1) claimed to be 1
            vec![0, 1, 1, 1],
            vec![1, 0],
            vec!["0".into(), "1".into()],
        )
        .unwrap();
        let report = cand.verify();
        assert!(!report.passed());
        assert!(report.failed_axioms().contains(&Axiom::MeetIsGlb));
    }

    #[test]
    fn canonical_renumbering_puts_bounds_at_ends() {
        let l = o6();
        assert_eq!(l.bottom(), 0);
        assert_eq!(l.top(), l.n() - 1);
        assert_eq!(l.name(0), "0");
        assert_eq!(l.name(5), "1");
    }

    #[test]
    fn subset_bit_strings_round_trip() {
        let s = ElementSubset::from_indices(6, [1, 3, 5]);
        assert_eq!(s.bit_string(), "010101");
        assert_eq!(ElementSubset::from_bit_string("010101").unwrap(), s);
        assert!(ElementSubset::from_bit_string("01x").is_none());
    }
}
