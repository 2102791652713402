//! Brute-force stable models for small variable-free programs.
//!
//! Facts are fixed true and atoms that occur in no rule head are fixed false;
//! every remaining atom is guessed. A candidate `I` is stable when it
//! satisfies the program and no proper subset of `I` is a model of the
//! reduct of the program relative to `I`. Choice rules are handled directly:
//! their bound acts as a constraint on `I` and each chosen atom gets the
//! reduct rule `a :- B+, C+`. [`expand_choices`] offers the rewriting into
//! plain rules instead.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ground::GroundProgram;
use crate::syntax::{
    Atom, BodyElement, ChoiceBound, ChoiceElement, Head, Literal, Program, Rule, Term,
};

pub const DEFAULT_ATOM_CAP: usize = 22;
const HARD_CAP: usize = 63;

pub type Interpretation = BTreeSet<Atom>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{atoms} undetermined atoms exceed the cap of {cap}")]
    TooLarge { atoms: usize, cap: usize },
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
}

#[derive(Debug, Clone)]
struct Element {
    atom: u64,
    pos: u64,
    neg: u64,
}

#[derive(Debug, Clone)]
enum CHead {
    /// Bitmask of the head atoms; a single bit for normal rules.
    Atoms(u64),
    Constraint,
    Choice {
        elements: Vec<Element>,
        bound: Option<ChoiceBound>,
        /// Elements that are certainly counted.
        fixed_count: i64,
    },
}

#[derive(Debug, Clone)]
struct CRule {
    head: CHead,
    pos: u64,
    neg: u64,
}

#[derive(Debug, Clone)]
struct CWeak {
    pos: u64,
    neg: u64,
    weight: i64,
    tuple: Vec<Term>,
}

/// A program compiled to bitmasks over its undetermined atoms.
struct Compiled {
    atoms: Vec<Atom>,
    index: BTreeMap<Atom, usize>,
    facts: BTreeSet<Atom>,
    rules: Vec<CRule>,
    weak: Vec<CWeak>,
    /// Weak-constraint violations that hold in every interpretation.
    fixed_weak: Vec<(i64, Vec<Term>)>,
    /// Some constraint is violated by the facts alone.
    inconsistent: bool,
}

enum Value {
    True,
    False,
    Bit(u64),
}

impl Compiled {
    fn value(&self, atom: &Atom) -> Value {
        if self.facts.contains(atom) {
            Value::True
        } else if let Some(&i) = self.index.get(atom) {
            Value::Bit(1 << i)
        } else {
            Value::False
        }
    }

    /// Bitmasks of a conjunction, or `None` when it is false outright.
    fn conjunction<'a>(&self, lits: impl Iterator<Item = &'a Literal>) -> Option<(u64, u64)> {
        let (mut pos, mut neg) = (0, 0);
        for lit in lits {
            match lit {
                Literal::Classical { atom, negated } => match (self.value(atom), negated) {
                    (Value::True, false) | (Value::False, true) => {}
                    (Value::True, true) | (Value::False, false) => return None,
                    (Value::Bit(b), false) => pos |= b,
                    (Value::Bit(b), true) => neg |= b,
                },
                Literal::Builtin { lhs, op, rhs } => {
                    if !op.holds(lhs, rhs) {
                        return None;
                    }
                }
            }
        }
        Some((pos, neg))
    }

    fn body(&self, body: &[BodyElement]) -> Result<Option<(u64, u64)>, OracleError> {
        let mut lits = Vec::with_capacity(body.len());
        for element in body {
            match element {
                BodyElement::Literal(l) => lits.push(l),
                BodyElement::Aggregate(a) => {
                    return Err(OracleError::UnsupportedConstruct(format!(
                        "aggregate `{a}`"
                    )))
                }
            }
        }
        Ok(self.conjunction(lits.into_iter()))
    }

    fn new(program: &GroundProgram, cap: usize) -> Result<Self, OracleError> {
        let rules = program.rules();
        let facts: BTreeSet<Atom> = rules
            .iter()
            .filter(|r| r.is_fact())
            .flat_map(|r| r.head.atoms().into_iter().cloned())
            .collect();
        let mut open: BTreeSet<Atom> = BTreeSet::new();
        for rule in rules.iter().filter(|r| !r.is_fact()) {
            open.extend(rule.head.atoms().into_iter().cloned());
        }
        let atoms: Vec<Atom> = open.difference(&facts).cloned().collect();
        let cap = cap.min(HARD_CAP);
        if atoms.len() > cap {
            return Err(OracleError::TooLarge {
                atoms: atoms.len(),
                cap,
            });
        }
        let index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let mut compiled = Compiled {
            atoms,
            index,
            facts,
            rules: Vec::new(),
            weak: Vec::new(),
            fixed_weak: Vec::new(),
            inconsistent: false,
        };

        for rule in rules.iter().filter(|r| !r.is_fact()) {
            let Some((pos, neg)) = compiled.body(&rule.body)? else {
                continue;
            };
            let head = match &rule.head {
                Head::Normal(_) | Head::Disjunctive(_) => {
                    let mut mask = 0;
                    let mut satisfied = false;
                    for a in rule.head.atoms() {
                        match compiled.value(a) {
                            Value::True => satisfied = true,
                            Value::False => {}
                            Value::Bit(b) => mask |= b,
                        }
                    }
                    if satisfied {
                        continue;
                    }
                    if mask == 0 {
                        CHead::Constraint
                    } else {
                        CHead::Atoms(mask)
                    }
                }
                Head::Constraint => CHead::Constraint,
                Head::Choice { elements, bound } => {
                    let mut celems = Vec::new();
                    let mut fixed_count = 0;
                    for e in elements {
                        let Some((epos, eneg)) = compiled.conjunction(e.condition.iter()) else {
                            continue;
                        };
                        match compiled.value(&e.atom) {
                            Value::False => {}
                            Value::True if epos == 0 && eneg == 0 => fixed_count += 1,
                            Value::True => celems.push(Element {
                                atom: 0,
                                pos: epos,
                                neg: eneg,
                            }),
                            Value::Bit(b) => celems.push(Element {
                                atom: b,
                                pos: epos,
                                neg: eneg,
                            }),
                        }
                    }
                    CHead::Choice {
                        elements: celems,
                        bound: *bound,
                        fixed_count,
                    }
                }
            };
            if matches!(head, CHead::Constraint) && pos == 0 && neg == 0 {
                compiled.inconsistent = true;
            }
            compiled.rules.push(CRule { head, pos, neg });
        }

        for w in program.weak_constraints() {
            match &w.level {
                Term::Integer(0) => {}
                other => {
                    return Err(OracleError::UnsupportedConstruct(format!(
                        "weak constraint level {other}"
                    )))
                }
            }
            let Term::Integer(weight) = w.weight else {
                return Err(OracleError::UnsupportedConstruct(format!(
                    "non-integer weight {}",
                    w.weight
                )));
            };
            let Some((pos, neg)) = compiled.body(&w.body)? else {
                continue;
            };
            if pos == 0 && neg == 0 {
                compiled.fixed_weak.push((weight, w.tuple.clone()));
            } else {
                compiled.weak.push(CWeak {
                    pos,
                    neg,
                    weight,
                    tuple: w.tuple.clone(),
                });
            }
        }
        Ok(compiled)
    }

    fn is_model(&self, i: u64) -> bool {
        self.rules.iter().all(|r| {
            let body = r.pos & !i == 0 && r.neg & i == 0;
            if !body {
                return true;
            }
            match &r.head {
                CHead::Atoms(mask) => mask & i != 0,
                CHead::Constraint => false,
                CHead::Choice {
                    elements,
                    bound,
                    fixed_count,
                } => {
                    let chosen = elements
                        .iter()
                        .filter(|e| {
                            (e.atom == 0 || e.atom & i != 0) && e.pos & !i == 0 && e.neg & i == 0
                        })
                        .count() as i64;
                    bound.is_none_or(|b| b.admits(fixed_count + chosen))
                }
            }
        })
    }

    /// Positive rules of the reduct relative to `i`, as (body, head mask).
    fn reduct(&self, i: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for r in self.rules.iter().filter(|r| r.neg & i == 0) {
            match &r.head {
                CHead::Atoms(mask) => out.push((r.pos, *mask)),
                CHead::Constraint => {}
                CHead::Choice { elements, .. } => {
                    for e in elements {
                        if e.atom != 0 && e.atom & i != 0 && e.neg & i == 0 {
                            out.push((r.pos | e.pos, e.atom));
                        }
                    }
                }
            }
        }
        out
    }

    fn is_stable(&self, i: u64) -> bool {
        if self.inconsistent || !self.is_model(i) {
            return false;
        }
        let reduct = self.reduct(i);
        if reduct.iter().all(|&(_, h)| h.count_ones() == 1) {
            least_model(&reduct) == i
        } else {
            minimal_by_subsets(&reduct, i)
        }
    }

    fn interpretation(&self, i: u64) -> Interpretation {
        let mut out = self.facts.clone();
        for (k, atom) in self.atoms.iter().enumerate() {
            if i & (1 << k) != 0 {
                out.insert(atom.clone());
            }
        }
        out
    }

    fn cost(&self, i: u64) -> i64 {
        let mut violated: BTreeSet<(i64, &[Term])> = self
            .fixed_weak
            .iter()
            .map(|(w, t)| (*w, t.as_slice()))
            .collect();
        for w in &self.weak {
            if w.pos & !i == 0 && w.neg & i == 0 {
                violated.insert((w.weight, &w.tuple));
            }
        }
        violated.into_iter().map(|(w, _)| w).sum()
    }

    /// Stable interpretations among those agreeing with `fixed` on `mask`.
    fn stable_within(&self, mask: u64, fixed: u64) -> Vec<u64> {
        let free: Vec<u64> = (0..self.atoms.len())
            .map(|k| 1u64 << k)
            .filter(|b| mask & b == 0)
            .collect();
        let mut out = Vec::new();
        for combo in 0..(1u64 << free.len()) {
            let mut i = fixed;
            for (k, b) in free.iter().enumerate() {
                if combo & (1 << k) != 0 {
                    i |= b;
                }
            }
            if self.is_stable(i) {
                out.push(i);
            }
        }
        out
    }
}

fn least_model(rules: &[(u64, u64)]) -> u64 {
    let mut m = 0;
    loop {
        let next = rules
            .iter()
            .filter(|(body, _)| body & !m == 0)
            .fold(m, |acc, (_, h)| acc | h);
        if next == m {
            return m;
        }
        m = next;
    }
}

/// No proper subset of `i` satisfies the positive disjunctive `rules`.
fn minimal_by_subsets(rules: &[(u64, u64)], i: u64) -> bool {
    let satisfies = |j: u64| {
        rules
            .iter()
            .all(|&(body, head)| body & !j != 0 || head & j != 0)
    };
    let mut sub = i;
    while sub != 0 {
        sub = (sub - 1) & i;
        if satisfies(sub) {
            return false;
        }
    }
    true
}

/// All stable models, in ascending bitmask order of their guessed atoms.
pub fn enumerate_stable_models(
    program: &GroundProgram,
    atom_cap: usize,
) -> Result<Vec<Interpretation>, OracleError> {
    let c = Compiled::new(program, atom_cap)?;
    Ok(c.stable_within(0, 0)
        .into_iter()
        .map(|i| c.interpretation(i))
        .collect())
}

/// Whether `candidate` is exactly a stable model. Only one interpretation is
/// examined, so the cap does not apply.
pub fn check_witness(
    program: &GroundProgram,
    candidate: &Interpretation,
) -> Result<bool, OracleError> {
    let c = Compiled::new(program, HARD_CAP)?;
    let mut i = 0;
    for atom in candidate {
        match c.value(atom) {
            Value::True => {}
            Value::False => return Ok(false),
            Value::Bit(b) => i |= b,
        }
    }
    if !c.facts.is_subset(candidate) {
        return Ok(false);
    }
    Ok(c.is_stable(i))
}

/// Stable models whose atoms over `predicates` (names, any arity) are
/// exactly those of `candidate`. Atoms over other predicates are searched.
pub fn complete_witness(
    program: &GroundProgram,
    candidate: &Interpretation,
    predicates: &BTreeSet<String>,
    atom_cap: usize,
) -> Result<Vec<Interpretation>, OracleError> {
    let c = Compiled::new(program, HARD_CAP)?;
    let shown = |a: &Atom| predicates.contains(&a.predicate);
    if candidate.iter().any(|a| !shown(a)) {
        return Ok(Vec::new());
    }
    for fact in c.facts.iter().filter(|a| shown(a)) {
        if !candidate.contains(fact) {
            return Ok(Vec::new());
        }
    }
    let (mut mask, mut fixed) = (0u64, 0u64);
    for (k, atom) in c.atoms.iter().enumerate() {
        if shown(atom) {
            mask |= 1 << k;
            if candidate.contains(atom) {
                fixed |= 1 << k;
            }
        }
    }
    for atom in candidate {
        if matches!(c.value(atom), Value::False) {
            return Ok(Vec::new());
        }
    }
    let free = c.atoms.len() - mask.count_ones() as usize;
    if free > atom_cap.min(HARD_CAP) {
        return Err(OracleError::TooLarge {
            atoms: free,
            cap: atom_cap.min(HARD_CAP),
        });
    }
    Ok(c.stable_within(mask, fixed)
        .into_iter()
        .map(|i| c.interpretation(i))
        .collect())
}

/// Weak-constraint cost of an interpretation: each distinct
/// (weight, tuple) pair whose body holds is counted once.
pub fn model_cost(program: &GroundProgram, model: &Interpretation) -> Result<i64, OracleError> {
    let c = Compiled::new(program, HARD_CAP)?;
    let i = c
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| model.contains(*a))
        .fold(0u64, |acc, (k, _)| acc | 1 << k);
    Ok(c.cost(i))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Optimum {
    Unsat,
    Optimal { cost: i64, model: Interpretation },
}

/// Minimum cost over all stable models; among equally cheap models the
/// first one enumerated is returned.
pub fn optimal_cost(program: &GroundProgram, atom_cap: usize) -> Result<Optimum, OracleError> {
    let c = Compiled::new(program, atom_cap)?;
    let best = c
        .stable_within(0, 0)
        .into_iter()
        .map(|i| (c.cost(i), i))
        .min_by_key(|&(cost, _)| cost);
    Ok(match best {
        None => Optimum::Unsat,
        Some((cost, i)) => Optimum::Optimal {
            cost,
            model: c.interpretation(i),
        },
    })
}

/// Predicates introduced by [`expand_choices`] start with this prefix, which
/// the parser never accepts.
pub const AUX_PREFIX: &str = "_";

/// Rewrites every choice rule into normal rules and constraints: an even
/// loop through a fresh complement atom guesses each element, and one
/// constraint per inadmissible subset of elements enforces the bound.
pub fn expand_choices(program: &Program) -> Program {
    let mut out = Program {
        rules: Vec::new(),
        weak_constraints: program.weak_constraints.clone(),
        query: program.query.clone(),
    };
    let mut fresh = 0usize;
    let mut aux = |kind: &str, atom: &Atom| {
        fresh += 1;
        Atom::new(
            format!("{AUX_PREFIX}{kind}{fresh}_{}", atom.predicate),
            atom.args.clone(),
        )
    };
    for rule in &program.rules {
        let Head::Choice { elements, bound } = &rule.head else {
            out.rules.push(rule.clone());
            continue;
        };
        let mut counted = Vec::new();
        for ChoiceElement { atom, condition } in elements {
            let complement = aux("n", atom);
            let guarded = |extra: Literal| {
                let mut body = rule.body.clone();
                body.extend(condition.iter().cloned().map(BodyElement::from));
                body.push(extra.into());
                body
            };
            out.rules.push(Rule {
                head: Head::Normal(atom.clone()),
                body: guarded(Literal::neg(complement.clone())),
            });
            out.rules.push(Rule {
                head: Head::Normal(complement),
                body: guarded(Literal::neg(atom.clone())),
            });
            if condition.is_empty() {
                counted.push(atom.clone());
            } else {
                let c = aux("c", atom);
                let mut body: Vec<BodyElement> =
                    condition.iter().cloned().map(BodyElement::from).collect();
                body.push(Literal::pos(atom.clone()).into());
                out.rules.push(Rule {
                    head: Head::Normal(c.clone()),
                    body,
                });
                counted.push(c);
            }
        }
        let Some(bound) = bound else {
            continue;
        };
        assert!(counted.len() < 64, "choice rule too wide to expand");
        for subset in 0u64..(1 << counted.len()) {
            if bound.admits(subset.count_ones() as i64) {
                continue;
            }
            let mut body = rule.body.clone();
            for (k, c) in counted.iter().enumerate() {
                let lit = if subset & (1 << k) != 0 {
                    Literal::pos(c.clone())
                } else {
                    Literal::neg(c.clone())
                };
                body.push(lit.into());
            }
            out.rules.push(Rule {
                head: Head::Constraint,
                body,
            });
        }
    }
    out
}

/// Drops atoms over auxiliary predicates.
pub fn visible(model: &Interpretation) -> Interpretation {
    model
        .iter()
        .filter(|a| !a.predicate.starts_with(AUX_PREFIX))
        .cloned()
        .collect()
}
