//! External `{0,1}`-valued maps on an ortholattice: Boolean pre-states,
//! two-valued states, Jauch-Piron states, and prime increasing subsets of
//! Boolean algebras.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{ElementId, ElementSubset, Ortholattice};

/// Classification of a `{0,1}` assignment, weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateKind {
    /// Monotone and complement-compatible.
    PreState,
    /// Additionally additive on orthogonal pairs.
    TwoValued,
    /// Additionally meet-closed on its 1-set.
    JauchPiron,
}

impl StateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateKind::PreState => "pre-state",
            StateKind::TwoValued => "two-valued",
            StateKind::JauchPiron => "jauch-piron",
        }
    }

    pub fn parse(text: &str) -> Option<StateKind> {
        match text {
            "pre-state" | "prestate" | "pre" => Some(StateKind::PreState),
            "two-valued" | "two" => Some(StateKind::TwoValued),
            "jauch-piron" | "jp" => Some(StateKind::JauchPiron),
            _ => None,
        }
    }
}

impl std::fmt::Display for StateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for StateKind {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(self.as_str())
    }
}

/// A `{0,1}` assignment together with its strongest classification.
///
/// Only [`classify`] and the enumerators construct these, so a value of this
/// type always satisfies at least the pre-state laws on its lattice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateVector {
    values: Vec<bool>,
    kind: StateKind,
}

impl StateVector {
    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, x: ElementId) -> bool {
        self.values[x]
    }

    pub fn bit(&self, x: ElementId) -> u8 {
        self.values[x] as u8
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// `{ x : sigma(x) = 1 }`.
    pub fn one_set(&self) -> ElementSubset {
        ElementSubset::from_indices(
            self.values.len(),
            (0..self.values.len()).filter(|&x| self.values[x]),
        )
    }

    /// Value bitstring in canonical element order.
    pub fn bit_string(&self) -> String {
        self.values.iter().map(|&v| if v { '1' } else { '0' }).collect()
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("StateVector", 2)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("bits", &self.bit_string())?;
        st.end()
    }
}

/// Which pre-state law an assignment broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreStateLaw {
    /// `sigma(~x) = 1 - sigma(x)`
    Complement,
    /// `x <= y` implies `sigma(x) <= sigma(y)`
    Monotonicity,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("state vector length {got} does not match lattice size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value at element {0} is not in {{0, 1}}")]
    NotBinary(ElementId),
    #[error("sigma(1) must be 1")]
    TopNotOne,
    #[error("not a pre-state: {law:?} fails at {witness:?}")]
    NotPreState {
        law: PreStateLaw,
        witness: Vec<ElementId>,
    },
    #[error("operation requires a Boolean algebra")]
    NotBoolean,
    #[error("subset is not a prime increasing subset: {0}")]
    NotPrime(String),
}

/// A refuted stronger classification with its failing instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub refuted: StateKind,
    pub witness: Vec<ElementId>,
}

/// Output of [`classify`]: the strongest applicable kind plus, when a
/// stronger kind was refuted, the instance that refuted it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classified {
    pub state: StateVector,
    pub refutation: Option<Refutation>,
}

/// The three equivalent meet-closure criteria for a state's 1-set:
/// a witness below both elements, meet-closure itself, and the product law
/// `sigma(x) * sigma(~x | y) = sigma(x & y)`.
pub fn jauch_piron_criteria(lat: &Ortholattice, values: &[bool]) -> [bool; 3] {
    let n = lat.n();
    let mut c = [true; 3];
    for x in 0..n {
        for y in 0..n {
            if values[x] && values[y] {
                let witness_exists =
                    (0..n).any(|w| values[w] && lat.leq(w, x) && lat.leq(w, y));
                c[0] &= witness_exists;
                c[1] &= values[lat.meet(x, y)];
            }
            let lhs = (values[x] && values[lat.join(lat.ortho(x), y)]) as u8;
            c[2] &= lhs == values[lat.meet(x, y)] as u8;
        }
    }
    c
}

fn check_prestate(lat: &Ortholattice, values: &[bool]) -> Result<(), StateError> {
    for x in lat.elements() {
        if values[lat.ortho(x)] == values[x] {
            return Err(StateError::NotPreState {
                law: PreStateLaw::Complement,
                witness: vec![x],
            });
        }
    }
    for x in lat.elements() {
        for y in lat.elements() {
            if lat.leq(x, y) && values[x] > values[y] {
                return Err(StateError::NotPreState {
                    law: PreStateLaw::Monotonicity,
                    witness: vec![x, y],
                });
            }
        }
    }
    Ok(())
}

/// First orthogonal pair breaking additivity, if any.
fn additivity_witness(lat: &Ortholattice, values: &[bool]) -> Option<Vec<ElementId>> {
    for x in lat.elements() {
        for y in lat.elements() {
            if lat.orthogonal(x, y) {
                let sum = values[x] as u8 + values[y] as u8;
                if values[lat.join(x, y)] as u8 != sum {
                    return Some(vec![x, y]);
                }
            }
        }
    }
    None
}

/// Classifies a raw `{0,1}` array as the strongest applicable state kind.
///
/// The meet-closure classification evaluates all three equivalent criteria
/// and insists that they agree; a disagreement would be an internal error,
/// not a property of the input.
pub fn classify(lat: &Ortholattice, raw: &[u8]) -> Result<Classified, StateError> {
    if raw.len() != lat.n() {
        return Err(StateError::LengthMismatch {
            expected: lat.n(),
            got: raw.len(),
        });
    }
    if let Some(x) = (0..raw.len()).find(|&x| raw[x] > 1) {
        return Err(StateError::NotBinary(x));
    }
    let values: Vec<bool> = raw.iter().map(|&v| v == 1).collect();
    if !values[lat.top()] {
        return Err(StateError::TopNotOne);
    }
    check_prestate(lat, &values)?;
    // sigma(0) = 0 is a consequence, not an assumption.
    assert!(
        !values[lat.bottom()],
        "pre-state laws force sigma(0) = 0; internal error"
    );

    if let Some(witness) = additivity_witness(lat, &values) {
        return Ok(Classified {
            state: StateVector {
                values,
                kind: StateKind::PreState,
            },
            refutation: Some(Refutation {
                refuted: StateKind::TwoValued,
                witness,
            }),
        });
    }

    let criteria = jauch_piron_criteria(lat, &values);
    assert!(
        criteria.iter().all(|&c| c == criteria[0]),
        "meet-closure criteria disagree on a two-valued state; internal error"
    );
    if !criteria[0] {
        // Witness: a 1-pair whose meet drops to 0.
        let witness = lat
            .elements()
            .flat_map(|x| lat.elements().map(move |y| (x, y)))
            .find(|&(x, y)| values[x] && values[y] && !values[lat.meet(x, y)])
            .map(|(x, y)| vec![x, y])
            .expect("some pair must witness the failed criterion");
        return Ok(Classified {
            state: StateVector {
                values,
                kind: StateKind::TwoValued,
            },
            refutation: Some(Refutation {
                refuted: StateKind::JauchPiron,
                witness,
            }),
        });
    }

    Ok(Classified {
        state: StateVector {
            values,
            kind: StateKind::JauchPiron,
        },
        refutation: None,
    })
}

/// All Boolean pre-states, in lexicographic order of their value arrays.
///
/// Enumeration walks complement-pair representatives depth-first, forcing
/// the partner value and pruning on the first monotonicity violation among
/// assigned elements.
pub fn enumerate_prestates(lat: &Ortholattice) -> Vec<StateVector> {
    let n = lat.n();
    let reps: Vec<ElementId> = lat.elements().filter(|&x| x < lat.ortho(x)).collect();
    let mut assigned: Vec<Option<bool>> = vec![None; n];
    let mut out = Vec::new();

    fn consistent(lat: &Ortholattice, assigned: &[Option<bool>], e: ElementId) -> bool {
        let ve = assigned[e].unwrap();
        lat.elements().all(|o| match assigned[o] {
            None => true,
            Some(vo) => {
                (!lat.leq(e, o) || ve <= vo) && (!lat.leq(o, e) || vo <= ve)
            }
        })
    }

    fn walk(
        lat: &Ortholattice,
        reps: &[ElementId],
        i: usize,
        assigned: &mut Vec<Option<bool>>,
        out: &mut Vec<StateVector>,
    ) {
        if i == reps.len() {
            let raw: Vec<u8> = assigned.iter().map(|v| v.unwrap() as u8).collect();
            let classified = classify(lat, &raw).expect("pruned assignment is a pre-state");
            out.push(classified.state);
            return;
        }
        let rep = reps[i];
        let partner = lat.ortho(rep);
        for value in [false, true] {
            assigned[rep] = Some(value);
            assigned[partner] = Some(!value);
            if consistent(lat, assigned, rep) && consistent(lat, assigned, partner) {
                walk(lat, reps, i + 1, assigned, out);
            }
            assigned[rep] = None;
            assigned[partner] = None;
        }
    }

    walk(lat, &reps, 0, &mut assigned, &mut out);
    out.sort();
    out
}

/// Pre-states that are additive on orthogonal pairs.
pub fn enumerate_two_valued(lat: &Ortholattice) -> Vec<StateVector> {
    let all = enumerate_prestates(lat);
    let filtered: Vec<StateVector> = all
        .into_iter()
        .filter(|s| s.kind() >= StateKind::TwoValued)
        .collect();
    filtered
}

/// Two-valued states whose 1-set is closed under meets.
pub fn enumerate_jauch_piron(lat: &Ortholattice) -> Vec<StateVector> {
    enumerate_prestates(lat)
        .into_iter()
        .filter(|s| s.kind() == StateKind::JauchPiron)
        .collect()
}

/// Enumeration for a requested kind; the chain jp <= two-valued <= pre-state
/// makes this a plain filter of the pre-state enumeration.
pub fn enumerate_states(lat: &Ortholattice, kind: StateKind) -> Vec<StateVector> {
    enumerate_prestates(lat)
        .into_iter()
        .filter(|s| s.kind() >= kind)
        .collect()
}

/// All increasing subsets `M` of a Boolean algebra with `x in M` iff
/// `~x not in M`. In bijection with the Boolean pre-states via `M = 1-set`;
/// the bijection is asserted here against the independent enumerator.
pub fn prime_increasing_subsets(alg: &Ortholattice) -> Result<Vec<ElementSubset>, StateError> {
    if !alg.is_boolean() {
        return Err(StateError::NotBoolean);
    }
    let n = alg.n();
    assert!(n <= 24, "subset scan limited to small Boolean algebras");
    let mut out = Vec::new();
    'subsets: for mask in 0u64..(1 << n) {
        let m = ElementSubset::from_indices(n, (0..n).filter(|&x| mask >> x & 1 == 1));
        for x in alg.elements() {
            if m.contains(x) == m.contains(alg.ortho(x)) {
                continue 'subsets;
            }
        }
        if m.is_increasing(alg) {
            out.push(m);
        }
    }
    out.sort();

    let from_states: Vec<ElementSubset> = {
        let mut v: Vec<ElementSubset> = enumerate_prestates(alg)
            .iter()
            .map(|s| s.one_set())
            .collect();
        v.sort();
        v
    };
    assert_eq!(
        out, from_states,
        "prime increasing subsets must match pre-state 1-sets; internal error"
    );
    Ok(out)
}

/// The indicator pre-state of a prime increasing subset.
pub fn state_from_prime(
    alg: &Ortholattice,
    m: &ElementSubset,
) -> Result<StateVector, StateError> {
    if !alg.is_boolean() {
        return Err(StateError::NotBoolean);
    }
    if m.universe_size() != alg.n() {
        return Err(StateError::LengthMismatch {
            expected: alg.n(),
            got: m.universe_size(),
        });
    }
    if !m.is_increasing(alg) {
        return Err(StateError::NotPrime("subset is not increasing".into()));
    }
    if let Some(x) = alg.elements().find(|&x| m.contains(x) == m.contains(alg.ortho(x))) {
        return Err(StateError::NotPrime(format!(
            "exactly one of x, ~x must belong at element {x}"
        )));
    }
    let raw: Vec<u8> = alg.elements().map(|x| m.contains(x) as u8).collect();
    let classified = classify(alg, &raw)?;
    debug_assert_eq!(classified.state.one_set(), *m);
    Ok(classified.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{boolean, lattice_from_greechie, mo};

    /// Independent oracle: full scan of all 2^n assignments.
    fn scan_states(lat: &Ortholattice, kind: StateKind) -> Vec<StateVector> {
        let n = lat.n();
        let mut out = Vec::new();
        for mask in 0u64..(1 << n) {
            let raw: Vec<u8> = (0..n).map(|x| (mask >> x & 1) as u8).collect();
            if let Ok(c) = classify(lat, &raw) {
                if c.state.kind() >= kind {
                    out.push(c.state);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn the_two_chain_has_one_state_and_it_is_meet_closed() {
        let two = boolean(1).unwrap();
        let c = classify(&two, &[0, 1]).unwrap();
        assert_eq!(c.state.kind(), StateKind::JauchPiron);
        assert_eq!(enumerate_prestates(&two).len(), 1);
    }

    #[test]
    fn mo2_state_with_two_atoms_high_is_two_valued_only() {
        let l = mo(2).unwrap();
        let (a, b) = (l.atoms()[0], l.atoms()[1]);
        let mut raw = vec![0u8; 6];
        raw[l.top()] = 1;
        raw[a] = 1;
        raw[b] = 1;
        let c = classify(&l, &raw).unwrap();
        assert_eq!(c.state.kind(), StateKind::TwoValued);
        let r = c.refutation.unwrap();
        assert_eq!(r.refuted, StateKind::JauchPiron);
        let (x, y) = (r.witness[0], r.witness[1]);
        assert!(c.state.value(x) && c.state.value(y));
        assert_eq!(l.meet(x, y), l.bottom());
    }

    #[test]
    fn atom_indicator_on_boolean3_is_meet_closed() {
        let b = boolean(3).unwrap();
        let a = b.atoms()[0];
        let raw: Vec<u8> = b.elements().map(|x| b.leq(a, x) as u8).collect();
        let c = classify(&b, &raw).unwrap();
        assert_eq!(c.state.kind(), StateKind::JauchPiron);
    }

    #[test]
    fn classify_rejects_malformed_arrays() {
        let l = mo(2).unwrap();
        assert!(matches!(
            classify(&l, &[0, 1]),
            Err(StateError::LengthMismatch { .. })
        ));
        assert!(matches!(
            classify(&l, &[0, 2, 0, 0, 0, 1]),
            Err(StateError::NotBinary(1))
        ));
        assert!(matches!(
            classify(&l, &[0, 1, 0, 0, 1, 0]),
            Err(StateError::TopNotOne)
        ));
        // Complement law broken: both a and a' set.
        let mut raw = vec![0u8; 6];
        raw[5] = 1;
        raw[1] = 1;
        raw[l.ortho(1)] = 1;
        assert!(matches!(
            classify(&l, &raw),
            Err(StateError::NotPreState {
                law: PreStateLaw::Complement,
                ..
            })
        ));
    }

    #[test]
    fn enumerations_match_the_exhaustive_scan() {
        for lat in [
            boolean(1).unwrap(),
            boolean(2).unwrap(),
            boolean(3).unwrap(),
            mo(2).unwrap(),
            mo(3).unwrap(),
        ] {
            for kind in [StateKind::PreState, StateKind::TwoValued, StateKind::JauchPiron] {
                assert_eq!(enumerate_states(&lat, kind), scan_states(&lat, kind));
            }
        }
    }

    #[test]
    fn expected_counts_on_small_lattices() {
        let m = mo(2).unwrap();
        assert_eq!(enumerate_prestates(&m).len(), 4);
        assert_eq!(enumerate_two_valued(&m).len(), 4);
        assert_eq!(enumerate_jauch_piron(&m).len(), 0);

        let b = boolean(3).unwrap();
        assert_eq!(enumerate_prestates(&b).len(), 4);
        assert_eq!(enumerate_two_valued(&b).len(), 3);
        assert_eq!(enumerate_jauch_piron(&b).len(), 3);
    }

    #[test]
    fn two_block_paste_has_five_two_valued_states() {
        let l = lattice_from_greechie("block: a b c\nblock: c d e\n").unwrap();
        let tv = enumerate_two_valued(&l);
        assert_eq!(tv.len(), 5);
        assert_eq!(tv, scan_states(&l, StateKind::TwoValued));
        // Exactly one of them sets the shared atom c.
        let c = l.elements().find(|&x| l.name(x) == "c").unwrap();
        assert_eq!(tv.iter().filter(|s| s.value(c)).count(), 1);
    }

    #[test]
    fn boolean_two_valued_states_are_atom_indicators() {
        for k in 1..=4 {
            let b = boolean(k).unwrap();
            let tv = enumerate_two_valued(&b);
            assert_eq!(tv.len(), b.atoms().len());
            for s in &tv {
                let atom = b
                    .atoms()
                    .into_iter()
                    .find(|&a| s.value(a))
                    .expect("some atom carries the state");
                for x in b.elements() {
                    assert_eq!(s.value(x), b.leq(atom, x));
                }
            }
        }
    }

    #[test]
    fn meets_never_exceed_either_argument_under_a_prestate() {
        for lat in [mo(2).unwrap(), mo(3).unwrap(), boolean(3).unwrap()] {
            for s in enumerate_prestates(&lat) {
                for x in lat.elements() {
                    for y in lat.elements() {
                        let m = s.bit(lat.meet(x, y));
                        assert!(m <= s.bit(x).min(s.bit(y)));
                    }
                }
            }
        }
    }

    #[test]
    fn meet_closure_criteria_agree_on_two_valued_states() {
        for lat in [
            boolean(2).unwrap(),
            boolean(3).unwrap(),
            mo(2).unwrap(),
            mo(3).unwrap(),
            lattice_from_greechie("block: a b c\nblock: c d e\n").unwrap(),
        ] {
            for s in enumerate_two_valued(&lat) {
                let c = jauch_piron_criteria(&lat, s.values());
                assert_eq!(c[0], c[1]);
                assert_eq!(c[1], c[2]);
            }
        }
    }

    #[test]
    fn primes_of_small_booleans() {
        let two = boolean(1).unwrap();
        let primes = prime_increasing_subsets(&two).unwrap();
        assert_eq!(primes.len(), 1);
        assert_eq!(primes[0].bit_string(), "01");

        let b2 = boolean(2).unwrap();
        assert_eq!(prime_increasing_subsets(&b2).unwrap().len(), 2);

        let b3 = boolean(3).unwrap();
        let primes = prime_increasing_subsets(&b3).unwrap();
        assert_eq!(primes.len(), 4);
        let mut from_states: Vec<_> = enumerate_prestates(&b3)
            .iter()
            .map(|s| s.one_set())
            .collect();
        from_states.sort();
        assert_eq!(primes, from_states);
    }

    #[test]
    fn primes_require_a_boolean_algebra() {
        assert!(matches!(
            prime_increasing_subsets(&mo(2).unwrap()),
            Err(StateError::NotBoolean)
        ));
    }

    #[test]
    fn every_nonzero_element_lies_in_some_prime() {
        for k in 1..=4 {
            let b = boolean(k).unwrap();
            let primes = prime_increasing_subsets(&b).unwrap();
            for a in b.elements().filter(|&a| a != b.bottom()) {
                assert!(
                    primes.iter().any(|m| m.contains(a)),
                    "element {a} of boolean({k}) missed by all primes"
                );
            }
        }
    }

    #[test]
    fn prime_round_trips_through_its_indicator_state() {
        let b = boolean(3).unwrap();
        for m in prime_increasing_subsets(&b).unwrap() {
            let s = state_from_prime(&b, &m).unwrap();
            assert_eq!(s.one_set(), m);
        }
        // The co-atom prime gives the non-additive pre-state.
        let coatoms = ElementSubset::from_indices(
            8,
            b.elements()
                .filter(|&x| x == b.top() || b.atoms().contains(&b.ortho(x))),
        );
        let s = state_from_prime(&b, &coatoms).unwrap();
        assert_eq!(s.kind(), StateKind::PreState);
        let c = classify(
            &b,
            &s.values().iter().map(|&v| v as u8).collect::<Vec<_>>(),
        )
        .unwrap();
        let r = c.refutation.unwrap();
        assert_eq!(r.refuted, StateKind::TwoValued);
        let (x, y) = (r.witness[0], r.witness[1]);
        assert!(b.orthogonal(x, y));
        assert_eq!(s.bit(x) + s.bit(y), 0);
        assert_eq!(s.bit(b.join(x, y)), 1);
    }

    #[test]
    fn state_from_prime_rejects_non_primes() {
        let b = boolean(2).unwrap();
        let not_increasing = ElementSubset::from_indices(4, [0]);
        assert!(state_from_prime(&b, &not_increasing).is_err());
        let both_poles = ElementSubset::from_indices(4, [1, 2]);
        // contains an atom and its complement: primality broken at 0/top.
        assert!(state_from_prime(&b, &both_poles).is_err());
    }
}
