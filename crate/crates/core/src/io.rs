//! Lattice input and output: standard generators, the line-oriented Hasse
//! and Greechie file formats, and the canonical JSON form used for goldens.
//!
//! All text formats are line-oriented UTF-8 with `#` comments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::internal::{ExpandedAlgebra, StateOperator};
use crate::lattice::{ElementId, LatticeError, Ortholattice, VerificationReport};

/// Parse failure with position information.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Why a parsed description failed to produce a verified ortholattice.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid specification: {0}")]
    Spec(String),
    #[error("not a lattice: {0}")]
    Build(#[from] LatticeError),
    #[error("ortholattice axioms fail:\n{}", named_report(lattice, report))]
    Axioms {
        /// The structure that failed, kept so witnesses can be named.
        lattice: Box<Ortholattice>,
        report: VerificationReport,
    },
}

/// Renders a verification report with element names instead of indices.
pub fn named_report(lat: &Ortholattice, report: &VerificationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        if c.passed {
            out.push_str(&format!("  {}: pass\n", c.axiom));
        } else {
            let witness: Vec<&str> = c
                .witness
                .as_deref()
                .unwrap_or(&[])
                .iter()
                .map(|&x| lat.name(x))
                .collect();
            out.push_str(&format!(
                "  {}: FAIL at ({}) [{} violations]\n",
                c.axiom,
                witness.join(", "),
                c.violations
            ));
        }
    }
    out
}

impl IoError {
    /// True for syntactic/structural faults, as opposed to mathematical
    /// failures that carry witnesses.
    pub fn is_input_fault(&self) -> bool {
        matches!(self, IoError::Parse(_) | IoError::Spec(_))
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

fn atom_letter(i: usize) -> String {
    ((b'a' + (i % 26) as u8) as char).to_string()
}

/// The powerset algebra on `k` atoms (`2^k` elements). `boolean(1)` is the
/// two-element algebra.
pub fn boolean(k: usize) -> Result<Ortholattice, IoError> {
    if k == 0 {
        return Err(IoError::Spec("boolean(k) requires k >= 1".into()));
    }
    if k > 7 {
        return Err(IoError::Spec(format!(
            "boolean({k}) has {} elements, past the desk-scale cap",
            1usize << k
        )));
    }
    let n = 1usize << k;
    // Order subsets by (popcount, value): already topological.
    let mut masks: Vec<usize> = (0..n).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    let pos: BTreeMap<usize, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let full = n - 1;
    let mut leq = vec![vec![false; n]; n];
    let mut ortho = vec![0usize; n];
    let mut names = vec![String::new(); n];
    for (i, &mi) in masks.iter().enumerate() {
        ortho[i] = pos[&(full & !mi)];
        names[i] = if mi == 0 {
            "0".into()
        } else if mi == full {
            "1".into()
        } else {
            (0..k).filter(|b| mi >> b & 1 == 1).map(atom_letter).collect()
        };
        for (j, &mj) in masks.iter().enumerate() {
            leq[i][j] = mi & !mj == 0;
        }
    }
    Ok(Ortholattice::from_leq(&leq, &ortho, &names).expect("powerset order is a lattice"))
}

/// `MO(k)`: bottom, top, and `k` complementary pairs of pairwise-incomparable
/// atoms (`2k + 2` elements). `mo(2)` is the smallest non-Boolean OML.
pub fn mo(k: usize) -> Result<Ortholattice, IoError> {
    if k == 0 {
        return Err(IoError::Spec("mo(k) requires k >= 1".into()));
    }
    if k > 26 || 2 * k + 2 > crate::lattice::MAX_ELEMENTS {
        return Err(IoError::Spec(format!("mo({k}) is past the desk-scale cap")));
    }
    let n = 2 * k + 2;
    // Layout: 0, a..<k atoms>, a'..<k primed atoms>, 1.
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
        row[n - 1] = true;
    }
    for x in 1..n {
        leq[0][x] = true;
    }
    let mut ortho = vec![0usize; n];
    ortho[0] = n - 1;
    ortho[n - 1] = 0;
    let mut names = vec![String::new(); n];
    names[0] = "0".into();
    names[n - 1] = "1".into();
    for i in 0..k {
        ortho[1 + i] = 1 + k + i;
        ortho[1 + k + i] = 1 + i;
        names[1 + i] = atom_letter(i);
        names[1 + k + i] = format!("{}'", atom_letter(i));
    }
    Ok(Ortholattice::from_leq(&leq, &ortho, &names).expect("MO(k) is a lattice"))
}

// ---------------------------------------------------------------------------
// Hasse format
// ---------------------------------------------------------------------------

/// Parsed Hasse description: names, cover pairs, ortho pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseSpec {
    pub names: Vec<String>,
    /// `(lower, upper)` cover pairs, as indices into `names`.
    pub covers: Vec<(usize, usize)>,
    /// `(x, ~x)` pairs, as indices into `names`.
    pub ortho_pairs: Vec<(usize, usize)>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        };
        let trimmed = line.trim();
        (!trimmed.is_empty()).then_some((i + 1, trimmed))
    })
}

/// Parses the Hasse format:
/// `elements: <name> ...`, `cover: <lower> <upper>`, `ortho: <x> <negx>`.
pub fn parse_hasse(text: &str) -> Result<HasseSpec, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut covers = Vec::new();
    let mut ortho_pairs = Vec::new();

    let lookup = |index: &BTreeMap<String, usize>, line: usize, name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::new(line, 1, format!("dangling name '{name}'")))
    };

    for (lineno, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("elements:") {
            for name in rest.split_whitespace() {
                if index.insert(name.to_string(), names.len()).is_some() {
                    return Err(ParseError::new(
                        lineno,
                        1,
                        format!("duplicate element name '{name}'"),
                    ));
                }
                names.push(name.to_string());
            }
        } else if let Some(rest) = line.strip_prefix("cover:") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(ParseError::new(lineno, 1, "cover expects two names"));
            }
            covers.push((lookup(&index, lineno, parts[0])?, lookup(&index, lineno, parts[1])?));
        } else if let Some(rest) = line.strip_prefix("ortho:") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(ParseError::new(lineno, 1, "ortho expects two names"));
            }
            ortho_pairs.push((lookup(&index, lineno, parts[0])?, lookup(&index, lineno, parts[1])?));
        } else {
            let keyword = line.split([':', ' ']).next().unwrap_or(line);
            return Err(ParseError::new(
                lineno,
                1,
                format!("unknown directive '{keyword}'"),
            ));
        }
    }
    if names.is_empty() {
        return Err(ParseError::new(1, 1, "missing 'elements:' line"));
    }
    Ok(HasseSpec {
        names,
        covers,
        ortho_pairs,
    })
}

/// Builds and fully checks an ortholattice from a Hasse specification.
///
/// Order is the reflexive-transitive closure of the covers. The result
/// passes [`Ortholattice::verify`] or the first violated condition is
/// reported with witnesses.
pub fn build_from_hasse(spec: &HasseSpec) -> Result<Ortholattice, IoError> {
    let n = spec.names.len();
    let mut ortho = vec![usize::MAX; n];
    for &(x, nx) in &spec.ortho_pairs {
        if x == nx {
            return Err(IoError::Spec(format!(
                "self-paired ortho '{0}' is rejected: x = ~x forces a trivial algebra",
                spec.names[x]
            )));
        }
        for (a, b) in [(x, nx), (nx, x)] {
            if ortho[a] != usize::MAX && ortho[a] != b {
                return Err(IoError::Spec(format!(
                    "conflicting ortho pairing for '{}'",
                    spec.names[a]
                )));
            }
            ortho[a] = b;
        }
    }
    if let Some(a) = (0..n).find(|&a| ortho[a] == usize::MAX) {
        return Err(IoError::Spec(format!(
            "element '{}' has no ortho partner",
            spec.names[a]
        )));
    }

    // Reflexive-transitive closure of the covers.
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(lo, hi) in &spec.covers {
        leq[lo][hi] = true;
    }
    for k in 0..n {
        for a in 0..n {
            if leq[a][k] {
                for b in 0..n {
                    if leq[k][b] {
                        leq[a][b] = true;
                    }
                }
            }
        }
    }

    let lat = Ortholattice::from_leq(&leq, &ortho, &spec.names)?;
    let report = lat.verify();
    if !report.passed() {
        return Err(IoError::Axioms {
            lattice: Box::new(lat),
            report,
        });
    }
    Ok(lat)
}

/// Convenience: parse + build.
pub fn lattice_from_hasse(text: &str) -> Result<Ortholattice, IoError> {
    build_from_hasse(&parse_hasse(text)?)
}

/// Serializes a lattice back to the Hasse format in canonical element order,
/// listing the transitive reduction of the order.
pub fn to_hasse(lat: &Ortholattice) -> String {
    let mut out = String::new();
    out.push_str("elements:");
    for name in lat.names() {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    for a in lat.elements() {
        for b in lat.elements() {
            if !lat.lt(a, b) {
                continue;
            }
            let covered = lat.elements().any(|c| lat.lt(a, c) && lat.lt(c, b));
            if !covered {
                out.push_str(&format!("cover: {} {}\n", lat.name(a), lat.name(b)));
            }
        }
    }
    let mut done = vec![false; lat.n()];
    for x in lat.elements() {
        if !done[x] {
            let nx = lat.ortho(x);
            done[x] = true;
            done[nx] = true;
            out.push_str(&format!("ortho: {} {}\n", lat.name(x), lat.name(nx)));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Greechie format
// ---------------------------------------------------------------------------

/// An atom-block diagram: each block is the atom set of a maximal Boolean
/// sub-block; two distinct blocks share at most one atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreechieDiagram {
    pub atoms: Vec<String>,
    /// Blocks as indices into `atoms`.
    pub blocks: Vec<Vec<usize>>,
}

/// Parses lines of the form `block: <atom> <atom> ...`.
pub fn parse_greechie(text: &str) -> Result<GreechieDiagram, ParseError> {
    let mut atoms: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut blocks = Vec::new();
    for (lineno, line) in content_lines(text) {
        let rest = line
            .strip_prefix("block:")
            .ok_or_else(|| ParseError::new(lineno, 1, "expected 'block:' directive"))?;
        let mut block = Vec::new();
        for name in rest.split_whitespace() {
            let id = *index.entry(name.to_string()).or_insert_with(|| {
                atoms.push(name.to_string());
                atoms.len() - 1
            });
            if block.contains(&id) {
                return Err(ParseError::new(
                    lineno,
                    1,
                    format!("atom '{name}' repeated within a block"),
                ));
            }
            block.push(id);
        }
        blocks.push(block);
    }
    if blocks.is_empty() {
        return Err(ParseError::new(1, 1, "no blocks given"));
    }
    Ok(GreechieDiagram { atoms, blocks })
}

/// Pastes a Greechie diagram into an ortholattice.
///
/// Elements are 0, 1, the atoms, and one co-atom per atom (the join of its
/// block complement); co-atoms of a shared atom coincide, and in two-atom
/// blocks the co-atom of one atom is the other atom. The pasted order is
/// closed and fully re-verified; pathological diagrams fail with the
/// violated condition rather than being accepted silently.
pub fn paste(diagram: &GreechieDiagram) -> Result<Ortholattice, IoError> {
    let k = diagram.atoms.len();
    for (bi, block) in diagram.blocks.iter().enumerate() {
        if block.len() < 2 {
            return Err(IoError::Spec(format!(
                "block {bi} has fewer than 2 atoms"
            )));
        }
        for other in &diagram.blocks[..bi] {
            let shared = block.iter().filter(|a| other.contains(a)).count();
            if block == other || shared >= 2 {
                return Err(IoError::Spec(format!(
                    "blocks share {shared} atoms; at most one is allowed"
                )));
            }
        }
    }

    // Nodes: 0, 1, atom(i), coatom(i) for each atom i, unified where forced.
    // Union-find over 2 + 2k provisional nodes.
    let bot = 0usize;
    let top = 1usize;
    let atom = |i: usize| 2 + i;
    let coatom = |i: usize| 2 + k + i;
    let mut parent: Vec<usize> = (0..2 + 2 * k).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for block in &diagram.blocks {
        if block.len() == 2 {
            union(&mut parent, coatom(block[0]), atom(block[1]));
            union(&mut parent, coatom(block[1]), atom(block[0]));
        }
    }

    // Collapse to class representatives in first-appearance order.
    let mut class_of = vec![usize::MAX; 2 + 2 * k];
    let mut reps: Vec<usize> = Vec::new();
    for node in 0..2 + 2 * k {
        let root = find(&mut parent, node);
        if class_of[root] == usize::MAX {
            class_of[root] = reps.len();
            reps.push(root);
        }
        class_of[node] = class_of[root];
    }
    let n = reps.len();

    // Ortho on classes; conflicts mean the diagram is inconsistent.
    let mut ortho = vec![usize::MAX; n];
    let set_ortho = |ortho: &mut Vec<usize>, a: usize, b: usize| -> Result<(), IoError> {
        if ortho[a] != usize::MAX && ortho[a] != b {
            return Err(IoError::Spec(
                "diagram forces conflicting orthocomplements".into(),
            ));
        }
        ortho[a] = b;
        ortho[b] = a;
        Ok(())
    };
    set_ortho(&mut ortho, class_of[bot], class_of[top])?;
    for i in 0..k {
        set_ortho(&mut ortho, class_of[atom(i)], class_of[coatom(i)])?;
    }

    // Order: bottom below all, all below top, and within each block every
    // atom lies below the co-atoms of the other atoms.
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
        row[class_of[top]] = true;
    }
    for x in 0..n {
        leq[class_of[bot]][x] = true;
    }
    for block in &diagram.blocks {
        for &x in block {
            for &y in block {
                if x != y {
                    leq[class_of[atom(y)]][class_of[coatom(x)]] = true;
                }
            }
        }
    }
    for m in 0..n {
        for a in 0..n {
            if leq[a][m] {
                for b in 0..n {
                    if leq[m][b] {
                        leq[a][b] = true;
                    }
                }
            }
        }
    }
    // A cycle after closure shows up as an antisymmetry failure in from_leq.

    let mut names = vec![String::new(); n];
    names[class_of[bot]] = "0".into();
    names[class_of[top]] = "1".into();
    for i in 0..k {
        names[class_of[atom(i)]] = diagram.atoms[i].clone();
        let c = class_of[coatom(i)];
        if names[c].is_empty() {
            names[c] = format!("{}'", diagram.atoms[i]);
        }
    }

    let lat = Ortholattice::from_leq(&leq, &ortho, &names)?;
    let report = lat.verify();
    if !report.passed() {
        return Err(IoError::Axioms {
            lattice: Box::new(lat),
            report,
        });
    }
    Ok(lat)
}

/// Convenience: parse + paste.
pub fn lattice_from_greechie(text: &str) -> Result<Ortholattice, IoError> {
    paste(&parse_greechie(text)?)
}

// ---------------------------------------------------------------------------
// Canonical JSON form
// ---------------------------------------------------------------------------

/// JSON shape for lattices and expanded algebras, in canonical order:
/// `{n, leq: [row bitstrings], ortho, names, s?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeJson {
    pub n: usize,
    pub leq: Vec<String>,
    pub ortho: Vec<ElementId>,
    pub names: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<ElementId>>,
}

impl LatticeJson {
    pub fn from_lattice(lat: &Ortholattice) -> Self {
        LatticeJson {
            n: lat.n(),
            leq: lat
                .elements()
                .map(|a| {
                    lat.elements()
                        .map(|b| if lat.leq(a, b) { '1' } else { '0' })
                        .collect()
                })
                .collect(),
            ortho: lat.elements().map(|a| lat.ortho(a)).collect(),
            names: lat.names().to_vec(),
            s: None,
        }
    }

    pub fn from_expanded(alg: &ExpandedAlgebra) -> Self {
        let mut json = Self::from_lattice(alg.lattice());
        json.s = Some(alg.s().as_slice().to_vec());
        json
    }

    /// Rebuilds the lattice, recomputing tables from the order.
    pub fn to_lattice(&self) -> Result<Ortholattice, IoError> {
        if self.leq.len() != self.n || self.names.len() != self.n {
            return Err(IoError::Spec("inconsistent n in lattice JSON".into()));
        }
        let mut leq = vec![vec![false; self.n]; self.n];
        for (a, row) in self.leq.iter().enumerate() {
            if row.len() != self.n {
                return Err(IoError::Spec(format!("leq row {a} has wrong length")));
            }
            for (b, c) in row.chars().enumerate() {
                leq[a][b] = match c {
                    '1' => true,
                    '0' => false,
                    _ => return Err(IoError::Spec(format!("bad bit '{c}' in leq row {a}"))),
                };
            }
        }
        Ok(Ortholattice::from_leq(&leq, &self.ortho, &self.names)?)
    }

    /// Rebuilds and verifies an expanded algebra; requires an `s` array.
    pub fn to_expanded(&self) -> Result<ExpandedAlgebra, IoError> {
        let s = self
            .s
            .clone()
            .ok_or_else(|| IoError::Spec("lattice JSON has no 's' array".into()))?;
        let lat = self.to_lattice()?;
        let op = StateOperator::new(s, lat.n())
            .map_err(|e| IoError::Spec(e.to_string()))?;
        ExpandedAlgebra::new(lat, op).map_err(|e| IoError::Spec(e.to_string()))
    }
}

pub fn to_json(lat: &Ortholattice) -> String {
    serde_json::to_string_pretty(&LatticeJson::from_lattice(lat)).expect("serializable")
}

pub fn from_json(text: &str) -> Result<LatticeJson, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Spec(format!("bad JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::isomorphic;
    use crate::lattice::Axiom;

    const MO2_HASSE: &str = "\
# the smallest non-Boolean OML
elements: 0 a b a' b' 1
cover: 0 a
cover: 0 b
cover: 0 a'
cover: 0 b'
cover: a 1
cover: b 1
cover: a' 1
cover: b' 1
ortho: 0 1
ortho: a a'
ortho: b b'
";

    const O6_HASSE: &str = "\
elements: 0 a b b' a' 1
cover: 0 a
cover: a b
cover: b 1
cover: 0 b'
cover: b' a'
cover: a' 1
ortho: 0 1
ortho: a a'
ortho: b b'
";

    #[test]
    fn two_chain_from_hasse() {
        let l = lattice_from_hasse("elements: 0 1\ncover: 0 1\northo: 0 1\n").unwrap();
        assert_eq!(l.n(), 2);
        assert!(isomorphic(&l, &boolean(1).unwrap()));
    }

    #[test]
    fn mo2_from_hasse_matches_generator() {
        let l = lattice_from_hasse(MO2_HASSE).unwrap();
        assert!(isomorphic(&l, &mo(2).unwrap()));
    }

    #[test]
    fn o6_from_hasse_is_rejected_with_witness() {
        let err = lattice_from_hasse(O6_HASSE).unwrap_err();
        match err {
            IoError::Axioms { lattice, report } => {
                assert_eq!(report.failed_axioms(), vec![Axiom::Orthomodularity]);
                let w = report.check(Axiom::Orthomodularity).witness.clone().unwrap();
                assert_eq!(lattice.name(w[0]), "a");
                assert_eq!(lattice.name(w[1]), "b");
            }
            other => panic!("expected axiom failure, got {other}"),
        }
    }

    #[test]
    fn hasse_parse_errors_carry_positions() {
        let err = parse_hasse("elements: 0 1\nbogus: x y\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_hasse("elements: 0 1\ncover: 0 z\n").unwrap_err();
        assert!(err.message.contains("dangling"));
    }

    #[test]
    fn hasse_ortho_validation() {
        let err = lattice_from_hasse("elements: 0 1\ncover: 0 1\northo: 0 0\n").unwrap_err();
        assert!(matches!(err, IoError::Spec(_)));
        let err =
            lattice_from_hasse("elements: 0 1 x\ncover: 0 x\ncover: x 1\northo: 0 1\n").unwrap_err();
        assert!(matches!(err, IoError::Spec(_)), "unpaired element");
    }

    #[test]
    fn cover_order_does_not_matter() {
        let mut lines: Vec<&str> = MO2_HASSE.lines().collect();
        // Move covers around: reverse everything after the elements line.
        let elements = lines.remove(1);
        lines.insert(1, elements);
        let reversed: String = {
            let (head, rest) = lines.split_at(2);
            let mut r: Vec<&str> = rest.to_vec();
            r.reverse();
            head.iter().chain(r.iter()).map(|s| format!("{s}\n")).collect()
        };
        let a = lattice_from_hasse(MO2_HASSE).unwrap();
        let b = lattice_from_hasse(&reversed).unwrap();
        assert_eq!(to_json(&a), to_json(&b));
    }

    #[test]
    fn hasse_round_trip_is_identity() {
        for l in [mo(2).unwrap(), boolean(3).unwrap()] {
            let text = to_hasse(&l);
            let back = lattice_from_hasse(&text).unwrap();
            assert_eq!(to_json(&l), to_json(&back));
        }
    }

    #[test]
    fn single_two_atom_block_is_boolean2() {
        let l = lattice_from_greechie("block: a b\n").unwrap();
        assert_eq!(l.n(), 4);
        assert!(isomorphic(&l, &boolean(2).unwrap()));
    }

    #[test]
    fn single_three_atom_block_is_boolean3() {
        let l = lattice_from_greechie("block: p q r\n").unwrap();
        assert_eq!(l.n(), 8);
        assert!(isomorphic(&l, &boolean(3).unwrap()));
    }

    #[test]
    fn two_block_paste_is_a_verified_oml() {
        let l = lattice_from_greechie("block: a b c\nblock: c d e\n").unwrap();
        // 8 + 8 elements sharing 0, 1, c, and c'.
        assert_eq!(l.n(), 12);
        assert!(l.verify().passed());
        // The shared co-atom: c' = a|b = d|e.
        let c = l.elements().find(|&x| l.name(x) == "c").unwrap();
        let (a, b) = (
            l.elements().find(|&x| l.name(x) == "a").unwrap(),
            l.elements().find(|&x| l.name(x) == "b").unwrap(),
        );
        let (d, e) = (
            l.elements().find(|&x| l.name(x) == "d").unwrap(),
            l.elements().find(|&x| l.name(x) == "e").unwrap(),
        );
        assert_eq!(l.join(a, b), l.ortho(c));
        assert_eq!(l.join(d, e), l.ortho(c));
    }

    #[test]
    fn paste_restricted_to_a_block_is_boolean() {
        let l = lattice_from_greechie("block: a b c\nblock: c d e\n").unwrap();
        for block in [["a", "b", "c"], ["c", "d", "e"]] {
            let atoms: Vec<_> = block
                .iter()
                .map(|nm| l.elements().find(|&x| l.name(x) == *nm).unwrap())
                .collect();
            // Subalgebra generated by the block: 0, 1, atoms, their orthos.
            let mut elems = vec![l.bottom(), l.top()];
            for &x in &atoms {
                elems.push(x);
                elems.push(l.ortho(x));
            }
            for x in elems.clone() {
                for y in elems.clone() {
                    for z in elems.clone() {
                        assert_eq!(
                            l.meet(x, l.join(y, z)),
                            l.join(l.meet(x, y), l.meet(x, z)),
                            "block subalgebra must be distributive"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn greechie_invariant_violations_are_rejected() {
        assert!(matches!(
            lattice_from_greechie("block: a\n").unwrap_err(),
            IoError::Spec(_)
        ));
        assert!(matches!(
            lattice_from_greechie("block: a b c\nblock: a b d\n").unwrap_err(),
            IoError::Spec(_)
        ));
        let err = parse_greechie("block: a a\n").unwrap_err();
        assert!(err.message.contains("repeated"));
    }

    #[test]
    fn four_atom_block_fails_as_a_non_lattice() {
        // The atoms+coatoms recipe leaves rank-2 elements out for blocks of
        // size >= 4, so pasting must fail with a missing-bound diagnosis.
        let err = lattice_from_greechie("block: a b c d\n").unwrap_err();
        assert!(matches!(err, IoError::Build(LatticeError::NoMeet(..))
            | IoError::Build(LatticeError::NoJoin(..))));
    }

    #[test]
    fn generators_reject_degenerate_sizes() {
        assert!(boolean(0).is_err());
        assert!(mo(0).is_err());
    }

    #[test]
    fn mo2_has_expected_shape() {
        let l = mo(2).unwrap();
        assert_eq!(l.n(), 6);
        assert_eq!(l.atoms().len(), 4);
        assert!(l.verify().passed());
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        for l in [mo(2).unwrap(), boolean(3).unwrap()] {
            let text = to_json(&l);
            let back = from_json(&text).unwrap().to_lattice().unwrap();
            assert_eq!(to_json(&back), text);
        }
    }
}
