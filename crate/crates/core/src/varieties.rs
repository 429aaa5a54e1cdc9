//! Equation checking by exhaustive valuation, membership tests for the
//! operator varieties, interval transfer checks, and the two-sided
//! state/operator correspondence harness.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::internal::{
    build_internal, verify_state_operator, ExpandedAlgebra, StateOperator,
};
use crate::lattice::{ElementId, Ortholattice};
use crate::states::{enumerate_prestates, enumerate_states, StateKind, StateVector};
use crate::term::{parse_equation, Equation, Term};

/// Default cap on the number of variables in an exhaustive `models` check.
pub const DEFAULT_VAR_BOUND: usize = 3;

/// Default seed for the reproducible random-term samplers.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Assignment of lattice elements to variables; slot `i` holds `x(i+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    values: Vec<ElementId>,
}

impl Valuation {
    pub fn new(values: Vec<ElementId>) -> Self {
        Valuation { values }
    }

    pub fn get(&self, var: usize) -> Option<ElementId> {
        self.values.get(var.checked_sub(1)?).copied()
    }

    pub fn values(&self) -> &[ElementId] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("term contains S but the algebra carries no state operator")]
    StateTermOnBareLattice,
    #[error("variable x{0} has no assignment")]
    UnassignedVariable(usize),
    #[error("{nvars} variables exceed the search bound {bound}; raise the bound explicitly")]
    VarBoundExceeded { nvars: usize, bound: usize },
}

/// Homomorphic extension of a valuation over the term structure.
pub fn eval(
    lat: &Ortholattice,
    s: Option<&StateOperator>,
    term: &Term,
    v: &Valuation,
) -> Result<ElementId, EvalError> {
    match term {
        Term::Zero => Ok(lat.bottom()),
        Term::One => Ok(lat.top()),
        Term::Var(i) => v.get(*i).ok_or(EvalError::UnassignedVariable(*i)),
        Term::Not(t) => Ok(lat.ortho(eval(lat, s, t, v)?)),
        Term::S(t) => {
            let op = s.ok_or(EvalError::StateTermOnBareLattice)?;
            Ok(op.apply(eval(lat, s, t, v)?))
        }
        Term::Meet(a, b) => Ok(lat.meet(eval(lat, s, a, v)?, eval(lat, s, b, v)?)),
        Term::Join(a, b) => Ok(lat.join(eval(lat, s, a, v)?, eval(lat, s, b, v)?)),
    }
}

/// Outcome of an exhaustive equation check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelCheck {
    /// First valuation separating the two sides, if any.
    pub counterexample: Option<Vec<ElementId>>,
    pub valuations_checked: u64,
}

impl ModelCheck {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks the equation under every valuation of `nvars` variables,
/// returning the first failing valuation. `x1` varies fastest.
pub fn models(
    lat: &Ortholattice,
    s: Option<&StateOperator>,
    eq: &Equation,
    nvars: usize,
    bound: usize,
) -> Result<ModelCheck, EvalError> {
    if nvars < eq.max_var() {
        return Err(EvalError::UnassignedVariable(eq.max_var()));
    }
    if nvars > bound {
        return Err(EvalError::VarBoundExceeded { nvars, bound });
    }
    let n = lat.n() as u64;
    let total = n.pow(nvars as u32);
    let mut values = vec![0usize; nvars];
    for idx in 0..total {
        let mut rem = idx;
        for slot in values.iter_mut() {
            *slot = (rem % n) as usize;
            rem /= n;
        }
        let v = Valuation::new(values.clone());
        let lhs = eval(lat, s, &eq.lhs, &v)?;
        let rhs = eval(lat, s, &eq.rhs, &v)?;
        if lhs != rhs {
            return Ok(ModelCheck {
                counterexample: Some(values),
                valuations_checked: idx + 1,
            });
        }
    }
    Ok(ModelCheck {
        counterexample: None,
        valuations_checked: total,
    })
}

/// `t = r` rewritten to the `= 1` form: `(t & r) | (~t & ~r) = 1`.
pub fn normal_form_equation(eq: &Equation) -> Equation {
    let t = eq.lhs.clone();
    let r = eq.rhs.clone();
    Equation::new(
        Term::join(
            Term::meet(t.clone(), r.clone()),
            Term::meet(Term::not(t), Term::not(r)),
        ),
        Term::One,
    )
}

/// True when the direct check and its `= 1` normal form agree.
pub fn normal_form_agrees(
    lat: &Ortholattice,
    s: Option<&StateOperator>,
    eq: &Equation,
    nvars: usize,
    bound: usize,
) -> Result<bool, EvalError> {
    let direct = models(lat, s, eq, nvars, bound)?;
    let nf = models(lat, s, &normal_form_equation(eq), nvars, bound)?;
    Ok(direct.holds() == nf.holds())
}

/// Named equation presets: the orthomodular law, the five operator axioms,
/// and the two variety membership equations.
pub const PRESET_NAMES: [&str; 8] = [
    "oml-law", "s1", "s2", "s3", "s4", "s5", "iteb", "ijpeb",
];

pub fn preset(name: &str) -> Option<Equation> {
    let text = match name {
        "oml-law" => "(x1 | (~x1 & (x1 | x2))) = (x1 | x2)",
        "s1" => "S(1) = 1",
        "s2" => "S(~x1) = ~S(x1)",
        "s3" => "S(x1 | S(x2)) = (S(x1) | S(x2))",
        "s4" => "x2 = ((x2 & S(x1)) | (x2 & ~S(x1)))",
        "s5" => "S(x1 & x2) = (S(x1 & x2) & (S(x1) & S(x2)))",
        "iteb" => "S(x1 | (x2 & ~x1)) = (S(x1) | S(x2 & ~x1))",
        "ijpeb" => "(S(x1) & S(~x1 | x2)) = S(x1 & x2)",
        _ => return None,
    };
    Some(parse_equation(text).expect("presets parse"))
}

/// `s(x | y) = s(x) | s(y)` on every orthogonal pair.
pub fn orthogonally_additive(alg: &ExpandedAlgebra) -> bool {
    let lat = alg.lattice();
    lat.elements().all(|x| {
        lat.elements().all(|y| {
            !lat.orthogonal(x, y)
                || alg.s_at(lat.join(x, y)) == lat.join(alg.s_at(x), alg.s_at(y))
        })
    })
}

/// Membership in the variety internalizing two-valued states.
///
/// The equational test is cross-checked against orthogonal additivity; the
/// two are equivalent because `y & ~x` is orthogonal to `x` and every
/// orthogonal pair arises that way.
pub fn in_iteb(alg: &ExpandedAlgebra) -> bool {
    let eq = preset("iteb").unwrap();
    let by_equation = models(alg.lattice(), Some(alg.s()), &eq, 2, DEFAULT_VAR_BOUND)
        .expect("two variables fit the default bound")
        .holds();
    let by_additivity = orthogonally_additive(alg);
    assert_eq!(
        by_equation, by_additivity,
        "equational and additivity tests must agree"
    );
    by_equation
}

/// Membership in the variety internalizing meet-closed two-valued states.
pub fn in_ijpeb(alg: &ExpandedAlgebra) -> bool {
    if !in_iteb(alg) {
        return false;
    }
    let eq = preset("ijpeb").unwrap();
    models(alg.lattice(), Some(alg.s()), &eq, 2, DEFAULT_VAR_BOUND)
        .expect("two variables fit the default bound")
        .holds()
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("element {0} is not in the image of s")]
    NotInImage(ElementId),
    #[error("interval comparison needs a < b")]
    NotAProperPair,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn interval_pair(
    alg: &ExpandedAlgebra,
    a: ElementId,
    b: ElementId,
) -> Result<(crate::internal::IntervalExpansion, crate::internal::IntervalExpansion), CheckError> {
    for z in [a, b] {
        if !alg.s_image().contains(z) {
            return Err(CheckError::NotInImage(z));
        }
    }
    if !alg.lattice().lt(a, b) {
        return Err(CheckError::NotAProperPair);
    }
    let lower = alg.restrict_to_interval(a).map_err(|_| CheckError::NotInImage(a))?;
    let upper = alg.restrict_to_interval(b).map_err(|_| CheckError::NotInImage(b))?;
    Ok((lower, upper))
}

/// Every battery equation holding on `[0, b]` must hold on `[0, a]`.
pub fn interval_inheritance_check(
    alg: &ExpandedAlgebra,
    a: ElementId,
    b: ElementId,
) -> Result<bool, CheckError> {
    let (lower, upper) = interval_pair(alg, a, b)?;
    for name in PRESET_NAMES.iter().filter(|&&n| n != "oml-law") {
        let eq = preset(name).unwrap();
        let nvars = eq.max_var();
        let on_upper = models(
            upper.algebra.lattice(),
            Some(upper.algebra.s()),
            &eq,
            nvars,
            DEFAULT_VAR_BOUND,
        )?;
        let on_lower = models(
            lower.algebra.lattice(),
            Some(lower.algebra.s()),
            &eq,
            nvars,
            DEFAULT_VAR_BOUND,
        )?;
        if on_upper.holds() && !on_lower.holds() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lifts a `[0, a]` valuation to `[0, b]` by reusing the same elements and
/// checks `v_a(t) = a & v_b(t)` in the parent algebra.
pub fn valuation_lift_check(
    alg: &ExpandedAlgebra,
    a: ElementId,
    b: ElementId,
    term: &Term,
    v_a: &Valuation,
) -> Result<bool, CheckError> {
    let (lower, upper) = interval_pair(alg, a, b)?;
    let lifted = Valuation::new(
        v_a.values()
            .iter()
            .map(|&i| {
                upper.from_parent[lower.to_parent[i]]
                    .expect("[0, a] is contained in [0, b]")
            })
            .collect(),
    );
    let in_lower = eval(lower.algebra.lattice(), Some(lower.algebra.s()), term, v_a)?;
    let in_upper = eval(upper.algebra.lattice(), Some(upper.algebra.s()), term, &lifted)?;
    let p_lower = lower.to_parent[in_lower];
    let p_upper = upper.to_parent[in_upper];
    Ok(p_lower == alg.lattice().meet(a, p_upper))
}

/// Reproducible generator for the sampling checks.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform choice over AST shapes down to the given depth.
pub fn random_term<R: Rng>(rng: &mut R, depth: usize, nvars: usize, with_s: bool) -> Term {
    let leaf = |rng: &mut R| match rng.gen_range(0..3) {
        0 => Term::Zero,
        1 => Term::One,
        _ => Term::Var(rng.gen_range(1..=nvars)),
    };
    if depth == 0 {
        return leaf(rng);
    }
    let kinds = if with_s { 7 } else { 6 };
    match rng.gen_range(0..kinds) {
        0 => Term::Zero,
        1 => Term::One,
        2 => Term::Var(rng.gen_range(1..=nvars)),
        3 => Term::not(random_term(rng, depth - 1, nvars, with_s)),
        4 => Term::meet(
            random_term(rng, depth - 1, nvars, with_s),
            random_term(rng, depth - 1, nvars, with_s),
        ),
        5 => Term::join(
            random_term(rng, depth - 1, nvars, with_s),
            random_term(rng, depth - 1, nvars, with_s),
        ),
        _ => Term::s(random_term(rng, depth - 1, nvars, with_s)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormalFormSample {
    pub samples: usize,
    pub mismatches: usize,
}

/// Samples random term pairs and counts disagreements between the direct
/// check and the `= 1` normal form. Zero is the expected answer.
pub fn normal_form_sample(
    lat: &Ortholattice,
    s: Option<&StateOperator>,
    samples: usize,
    seed: u64,
) -> NormalFormSample {
    let mut rng = seeded_rng(seed);
    let mut mismatches = 0usize;
    for _ in 0..samples {
        let t = random_term(&mut rng, 4, 3, s.is_some());
        let r = random_term(&mut rng, 4, 3, s.is_some());
        let eq = Equation::new(t, r);
        let nvars = eq.max_var();
        if !normal_form_agrees(lat, s, &eq, nvars, DEFAULT_VAR_BOUND)
            .expect("sampled terms stay within the bound")
        {
            mismatches += 1;
        }
    }
    NormalFormSample {
        samples,
        mismatches,
    }
}

// ---------------------------------------------------------------------------
// Two-sided correspondence harness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct HarnessOptions {
    pub nvars_bound: usize,
    /// Largest lattice size admitted to the exhaustive operator search.
    pub max_search_n: usize,
    pub seed: u64,
    pub nf_samples: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            nvars_bound: DEFAULT_VAR_BOUND,
            max_search_n: 8,
            seed: DEFAULT_SEED,
            nf_samples: 200,
        }
    }
}

fn family_equations_hold(alg: &ExpandedAlgebra, family: StateKind) -> bool {
    match family {
        StateKind::PreState => true,
        StateKind::TwoValued => in_iteb(alg),
        StateKind::JauchPiron => in_ijpeb(alg),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionI {
    pub states: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionE {
    pub searched: bool,
    pub candidates: u64,
    pub valid_operators: usize,
    pub di_family_members: usize,
    pub round_trips_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessItem {
    pub name: String,
    pub n: usize,
    pub oml_ok: bool,
    pub family_states: usize,
    pub condition_i: ConditionI,
    pub condition_e: ConditionE,
    /// Search side found exactly as many members as there are states.
    pub counts_match: Option<bool>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub family: StateKind,
    pub nvars_bound: usize,
    pub max_search_n: usize,
    pub items: Vec<HarnessItem>,
    pub passed: bool,
}

/// Runs both directions of the state/operator correspondence on a corpus.
///
/// Direction one: every family state induces a verified, directly
/// indecomposable expansion satisfying the family equations, and reading
/// the state back is the identity. Direction two: an exhaustive search over
/// all operator candidates (image forced into the center, value on each
/// complement pair free) finds exactly one directly indecomposable family
/// member per family state, and its state lies in the family.
pub fn characterization_harness(
    corpus: &[(String, Ortholattice)],
    family: StateKind,
    opts: &HarnessOptions,
) -> HarnessReport {
    let mut items = Vec::new();
    for (name, lat) in corpus {
        items.push(harness_item(name, lat, family, opts));
    }
    let passed = items.iter().all(|i| i.passed);
    HarnessReport {
        family,
        nvars_bound: opts.nvars_bound,
        max_search_n: opts.max_search_n,
        items,
        passed,
    }
}

fn harness_item(
    name: &str,
    lat: &Ortholattice,
    family: StateKind,
    opts: &HarnessOptions,
) -> HarnessItem {
    let oml_ok = lat.verify().passed();
    let states = if oml_ok {
        enumerate_states(lat, family)
    } else {
        Vec::new()
    };

    let mut condition_i = ConditionI {
        states: states.len(),
        passed: 0,
        failures: Vec::new(),
    };
    for sigma in &states {
        let alg = build_internal(lat, sigma).expect("enumerated states expand");
        let ok = alg.is_directly_indecomposable()
            && family_equations_hold(&alg, family)
            && alg.sigma_from_s().expect("induced expansions are indecomposable") == *sigma;
        if ok {
            condition_i.passed += 1;
        } else {
            condition_i.failures.push(sigma.bit_string());
        }
    }

    let searched = oml_ok && lat.n() <= opts.max_search_n;
    let mut condition_e = ConditionE {
        searched,
        candidates: 0,
        valid_operators: 0,
        di_family_members: 0,
        round_trips_ok: true,
    };
    if searched {
        search_operators(lat, family, &states, &mut condition_e);
    }

    let counts_match = searched.then(|| condition_e.di_family_members == states.len());
    let passed = oml_ok
        && condition_i.passed == condition_i.states
        && condition_e.round_trips_ok
        && counts_match.unwrap_or(true);
    HarnessItem {
        name: name.to_string(),
        n: lat.n(),
        oml_ok,
        family_states: states.len(),
        condition_i,
        condition_e,
        counts_match,
        passed,
    }
}

/// Exhaustive operator search: one free choice per complement pair, drawn
/// from the center (where the axioms force the image to live), with the
/// pair of the bounds pinned by s(1) = 1.
fn search_operators(
    lat: &Ortholattice,
    family: StateKind,
    states: &[StateVector],
    out: &mut ConditionE,
) {
    let n = lat.n();
    let center: Vec<ElementId> = lat.center().iter().collect();
    let reps: Vec<ElementId> = lat
        .elements()
        .filter(|&x| x < lat.ortho(x) && x != lat.bottom())
        .collect();
    let total = (center.len() as u64).pow(reps.len() as u32);

    for idx in 0..total {
        out.candidates += 1;
        let mut map = vec![usize::MAX; n];
        map[lat.bottom()] = lat.bottom();
        map[lat.top()] = lat.top();
        let mut rem = idx;
        for &x in &reps {
            let c = center[(rem % center.len() as u64) as usize];
            rem /= center.len() as u64;
            map[x] = c;
            map[lat.ortho(x)] = lat.ortho(c);
        }
        let op = StateOperator::new(map, n).expect("candidate map is total");
        let report = verify_state_operator(lat, &op).expect("sizes match");
        if !report.passed() {
            continue;
        }
        out.valid_operators += 1;
        let alg = ExpandedAlgebra::new(lat.clone(), op).expect("just verified");
        if !alg.is_directly_indecomposable() || !family_equations_hold(&alg, family) {
            continue;
        }
        out.di_family_members += 1;

        let sigma = alg.sigma_from_s().expect("directly indecomposable");
        let of_family = sigma.kind() >= family;
        let rebuilt = build_internal(lat, &sigma).expect("recovered state expands");
        let round_trip = rebuilt.s() == alg.s() && states.contains(&sigma);
        if !(of_family && round_trip) {
            out.round_trips_ok = false;
        }
    }
}

// ---------------------------------------------------------------------------
// Per-lattice invariant battery
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionChecks {
    pub state: String,
    pub kind: StateKind,
    pub coherent_prestates: usize,
    pub bps_filters: usize,
    pub filter_congruence_pairs: usize,
    pub directly_indecomposable: bool,
    pub iteb: bool,
    pub ijpeb: bool,
    pub state_round_trip_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub name: String,
    pub n: usize,
    pub oml_ok: bool,
    pub oml_failures: Vec<String>,
    pub prestates: usize,
    pub two_valued: usize,
    pub jauch_piron: usize,
    /// sigma(x & y) <= min(sigma(x), sigma(y)) over all pre-states.
    pub meet_bound_ok: bool,
    /// The three meet-closure criteria agree on every two-valued state.
    pub jp_criteria_agree: bool,
    /// On Boolean lattices: primes biject with pre-states.
    pub boolean_prime_bijection: Option<bool>,
    /// Equational two-valued membership matches the state classification.
    pub iteb_matches_kind: bool,
    /// Equational meet-closed membership matches the state classification.
    pub ijpeb_matches_kind: bool,
    pub expansions: Vec<ExpansionChecks>,
    pub normal_form: NormalFormSample,
    pub passed: bool,
}

/// Runs the full per-lattice invariant battery: state laws, classification
/// criteria agreement, prime/filter/congruence correspondences on every
/// induced expansion, variety membership against state kinds, and the
/// normal-form sampling check.
pub fn invariant_battery(name: &str, lat: &Ortholattice, opts: &HarnessOptions) -> BatteryReport {
    let verification = lat.verify();
    let oml_ok = verification.passed();
    let oml_failures: Vec<String> = verification
        .failed_axioms()
        .iter()
        .map(|a| a.to_string())
        .collect();
    if !oml_ok {
        return BatteryReport {
            name: name.to_string(),
            n: lat.n(),
            oml_ok,
            oml_failures,
            prestates: 0,
            two_valued: 0,
            jauch_piron: 0,
            meet_bound_ok: false,
            jp_criteria_agree: false,
            boolean_prime_bijection: None,
            iteb_matches_kind: false,
            ijpeb_matches_kind: false,
            expansions: Vec::new(),
            normal_form: NormalFormSample {
                samples: 0,
                mismatches: 0,
            },
            passed: false,
        };
    }

    let prestates = enumerate_prestates(lat);
    let two_valued: Vec<&StateVector> = prestates
        .iter()
        .filter(|s| s.kind() >= StateKind::TwoValued)
        .collect();
    let jauch_piron = prestates
        .iter()
        .filter(|s| s.kind() == StateKind::JauchPiron)
        .count();

    let meet_bound_ok = prestates.iter().all(|s| {
        lat.elements().all(|x| {
            lat.elements()
                .all(|y| s.bit(lat.meet(x, y)) <= s.bit(x).min(s.bit(y)))
        })
    });

    let jp_criteria_agree = two_valued.iter().all(|s| {
        let c = crate::states::jauch_piron_criteria(lat, s.values());
        c[0] == c[1] && c[1] == c[2]
    });

    let boolean_prime_bijection = lat.is_boolean().then(|| {
        let primes = crate::states::prime_increasing_subsets(lat)
            .expect("this lattice is Boolean");
        primes.len() == prestates.len()
    });

    let mut iteb_matches_kind = true;
    let mut ijpeb_matches_kind = true;
    let mut expansions = Vec::new();
    for sigma in &prestates {
        let alg = build_internal(lat, sigma).expect("enumerated states expand");
        let coherent = alg.coherent_prestates();
        let bps = alg.bps_filters();
        let maps = alg.filter_congruence_maps();
        let di = alg.is_directly_indecomposable();
        let iteb = in_iteb(&alg);
        let ijpeb = in_ijpeb(&alg);
        iteb_matches_kind &= iteb == (sigma.kind() >= StateKind::TwoValued);
        ijpeb_matches_kind &= ijpeb == (sigma.kind() == StateKind::JauchPiron);
        let state_round_trip_ok = alg
            .sigma_from_s()
            .map(|back| back == *sigma)
            .unwrap_or(false);
        expansions.push(ExpansionChecks {
            state: sigma.bit_string(),
            kind: sigma.kind(),
            coherent_prestates: coherent.len(),
            bps_filters: bps.len(),
            filter_congruence_pairs: maps.pairs.len(),
            directly_indecomposable: di,
            iteb,
            ijpeb,
            state_round_trip_ok,
        });
    }

    let normal_form = normal_form_sample(lat, None, opts.nf_samples, opts.seed);

    let passed = meet_bound_ok
        && jp_criteria_agree
        && boolean_prime_bijection.unwrap_or(true)
        && iteb_matches_kind
        && ijpeb_matches_kind
        && expansions
            .iter()
            .all(|e| e.directly_indecomposable && e.state_round_trip_ok)
        && normal_form.mismatches == 0;

    BatteryReport {
        name: name.to_string(),
        n: lat.n(),
        oml_ok,
        oml_failures,
        prestates: prestates.len(),
        two_valued: two_valued.len(),
        jauch_piron,
        meet_bound_ok,
        jp_criteria_agree,
        boolean_prime_bijection,
        iteb_matches_kind,
        ijpeb_matches_kind,
        expansions,
        normal_form,
        passed,
    }
}
