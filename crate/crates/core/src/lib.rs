//! Finite-algebra toolkit for orthomodular lattices: construction and
//! verification of desk-scale lattices, enumeration of two-valued states
//! and their relatives, internal-state expansions, filter/congruence
//! correspondences, direct decomposition, and exhaustive equation checking.
//!
//! Everything here is exhaustive finite-model computation over immutable
//! tables; all public operations are pure and safe to run concurrently.

pub mod internal;
pub mod io;
pub mod iso;
pub mod lattice;
pub mod states;
pub mod term;
pub mod varieties;

pub use internal::{
    build_internal, product_expanded, verify_state_operator, Congruence, ExpandedAlgebra,
    ExpansionError, Filter, FilterFlavor, StateOpReport, StateOperator,
};
pub use io::{
    boolean, build_from_hasse, lattice_from_greechie, lattice_from_hasse, mo, parse_greechie,
    parse_hasse, paste, to_hasse, to_json, GreechieDiagram, HasseSpec, IoError, LatticeJson,
    ParseError,
};
pub use iso::{expanded_isomorphic, find_isomorphism, isomorphic};
pub use lattice::{
    Axiom, ElementId, ElementSubset, LatticeError, Ortholattice, VerificationReport,
};
pub use states::{
    classify, enumerate_jauch_piron, enumerate_prestates, enumerate_states, enumerate_two_valued,
    jauch_piron_criteria, prime_increasing_subsets, state_from_prime, Classified, StateError,
    StateKind, StateVector,
};
pub use term::{parse_equation, parse_term, Equation, Term};
pub use varieties::{
    characterization_harness, eval, in_ijpeb, in_iteb, interval_inheritance_check,
    invariant_battery, models, normal_form_agrees, normal_form_equation, normal_form_sample,
    orthogonally_additive, preset, random_term, seeded_rng, valuation_lift_check, BatteryReport,
    EvalError, HarnessOptions, HarnessReport, ModelCheck, Valuation, DEFAULT_SEED,
    DEFAULT_VAR_BOUND, PRESET_NAMES,
};
