//! Desk-scale instantiation of safe programs over a set of ground facts.
//!
//! Rules that are already variable-free are copied verbatim. Every other rule
//! is instantiated by matching its positive body literals against the atoms
//! that can possibly be derived (the facts closed under all rule heads,
//! ignoring negation). Each instance is then simplified: built-in comparisons
//! are evaluated, positive literals over facts are removed, negative literals
//! over facts drop the instance and negative literals over underivable atoms
//! are removed. Duplicate instances (up to the order of disjunctive head
//! atoms) are emitted once, at their first position.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::syntax::{
    check_rule_safety, check_weak_safety, AggregateElement, AggregateLiteral, Atom, BodyElement,
    ChoiceElement, Head, Literal, Program, Rule, Term, WeakConstraint,
};

pub const DEFAULT_MAX_INSTANCES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("unsafe variable `{variable}` in rule `{rule}`")]
    UnsafeRule { rule: String, variable: String },
    #[error("grounding of `{rule}` exceeds the cap of {cap} instances")]
    GroundingBlowup { rule: String, cap: usize },
    #[error("statement `{0}` is not variable-free")]
    NotGround(String),
}

#[derive(Debug, Clone, Copy)]
pub struct GroundingOptions {
    pub max_instances: usize,
}

impl Default for GroundingOptions {
    fn default() -> Self {
        GroundingOptions {
            max_instances: DEFAULT_MAX_INSTANCES,
        }
    }
}

/// A variable-free program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundProgram {
    program: Program,
}

impl GroundProgram {
    /// Wraps a program that is already variable-free.
    pub fn from_program(program: Program) -> Result<Self, GroundError> {
        if let Some(rule) = program.rules.iter().find(|r| !r.is_ground()) {
            return Err(GroundError::NotGround(rule.to_string()));
        }
        if let Some(weak) = program
            .weak_constraints
            .iter()
            .find(|w| !w.variables().is_empty())
        {
            return Err(GroundError::NotGround(weak.to_string()));
        }
        Ok(GroundProgram { program })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn into_program(self) -> Program {
        self.program
    }

    pub fn rules(&self) -> &[Rule] {
        &self.program.rules
    }

    pub fn weak_constraints(&self) -> &[WeakConstraint] {
        &self.program.weak_constraints
    }

    /// Adds the given atoms as facts (used to combine an encoding's
    /// instantiation with the instance it was grounded against).
    pub fn with_facts(mut self, facts: &[Atom]) -> Self {
        let mut rules: Vec<Rule> = facts.iter().cloned().map(Rule::fact).collect();
        rules.append(&mut self.program.rules);
        self.program.rules = rules;
        self
    }

    /// Every atom occurring anywhere in the program.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut atoms = BTreeSet::new();
        for rule in &self.program.rules {
            match &rule.head {
                Head::Choice { elements, .. } => {
                    for e in elements {
                        atoms.insert(e.atom.clone());
                        collect_literal_atoms(&e.condition, &mut atoms);
                    }
                }
                head => atoms.extend(head.atoms().into_iter().cloned()),
            }
            collect_body_atoms(&rule.body, &mut atoms);
        }
        for weak in &self.program.weak_constraints {
            collect_body_atoms(&weak.body, &mut atoms);
        }
        atoms
    }
}

fn collect_literal_atoms(lits: &[Literal], out: &mut BTreeSet<Atom>) {
    for lit in lits {
        if let Literal::Classical { atom, .. } = lit {
            out.insert(atom.clone());
        }
    }
}

fn collect_body_atoms(body: &[BodyElement], out: &mut BTreeSet<Atom>) {
    for element in body {
        match element {
            BodyElement::Literal(l) => collect_literal_atoms(std::slice::from_ref(l), out),
            BodyElement::Aggregate(agg) => {
                for e in &agg.elements {
                    collect_literal_atoms(&e.condition, out);
                }
            }
        }
    }
}

pub fn ground_program(program: &Program, facts: &[Atom]) -> Result<GroundProgram, GroundError> {
    ground_program_with(program, facts, GroundingOptions::default())
}

pub fn ground_program_with(
    program: &Program,
    facts: &[Atom],
    options: GroundingOptions,
) -> Result<GroundProgram, GroundError> {
    let universe_empty = facts.iter().all(|a| a.args.is_empty())
        && program
            .rules
            .iter()
            .filter(|r| r.is_ground())
            .all(|r| r.head.atoms().iter().all(|a| a.args.is_empty()));

    // Unsafe rules cannot be instantiated by matching; with an empty
    // universe they simply have no instances.
    let mut skip = vec![false; program.rules.len()];
    for (i, rule) in program.rules.iter().enumerate() {
        if let Err(variable) = check_rule_safety(rule) {
            if universe_empty {
                skip[i] = true;
            } else {
                return Err(GroundError::UnsafeRule {
                    rule: rule.to_string(),
                    variable,
                });
            }
        }
    }
    let mut skip_weak = vec![false; program.weak_constraints.len()];
    for (i, weak) in program.weak_constraints.iter().enumerate() {
        if let Err(variable) = check_weak_safety(weak) {
            if universe_empty {
                skip_weak[i] = true;
            } else {
                return Err(GroundError::UnsafeRule {
                    rule: weak.to_string(),
                    variable,
                });
            }
        }
    }

    let certain: BTreeSet<Atom> = facts.iter().cloned().collect();
    let mut grounder = Grounder {
        certain,
        possible: AtomIndex::default(),
        cap: options.max_instances,
        work: 0,
    };
    for fact in facts {
        grounder.possible.insert(fact.clone());
    }
    grounder.saturate(program, &skip)?;

    let mut out = Program {
        rules: Vec::new(),
        weak_constraints: Vec::new(),
        query: program.query.clone().filter(Atom::is_ground),
    };
    let mut seen: BTreeSet<(Head, Vec<BodyElement>)> = BTreeSet::new();
    grounder.work = 0;
    for (rule, _) in program.rules.iter().zip(&skip).filter(|(_, s)| !**s) {
        if rule.is_ground() {
            out.rules.push(rule.clone());
            continue;
        }
        for instance in grounder.instantiate_rule(rule)? {
            let key = canonical_key(&instance);
            if seen.insert(key) {
                out.rules.push(instance);
            }
        }
    }
    for (weak, _) in program
        .weak_constraints
        .iter()
        .zip(&skip_weak)
        .filter(|(_, s)| !**s)
    {
        if weak.variables().is_empty() {
            out.weak_constraints.push(weak.clone());
            continue;
        }
        out.weak_constraints
            .extend(grounder.instantiate_weak(weak)?);
    }
    Ok(GroundProgram { program: out })
}

fn canonical_key(rule: &Rule) -> (Head, Vec<BodyElement>) {
    let head = match &rule.head {
        Head::Disjunctive(atoms) => {
            let mut sorted = atoms.clone();
            sorted.sort();
            sorted.dedup();
            Head::Disjunctive(sorted)
        }
        other => other.clone(),
    };
    let mut body = rule.body.clone();
    body.sort();
    (head, body)
}

type Subst = BTreeMap<String, Term>;

fn apply_term(term: &Term, subst: &Subst) -> Term {
    match term {
        Term::Variable(v) => subst.get(v).cloned().unwrap_or_else(|| term.clone()),
        Term::Function(name, args) => Term::Function(
            name.clone(),
            args.iter().map(|a| apply_term(a, subst)).collect(),
        ),
        _ => term.clone(),
    }
}

fn apply_atom(atom: &Atom, subst: &Subst) -> Atom {
    Atom {
        predicate: atom.predicate.clone(),
        args: atom.args.iter().map(|a| apply_term(a, subst)).collect(),
    }
}

fn match_term(pattern: &Term, ground: &Term, subst: &mut Subst) -> bool {
    match (pattern, ground) {
        (Term::Variable(v), _) => match subst.get(v) {
            Some(bound) => bound == ground,
            None => {
                subst.insert(v.clone(), ground.clone());
                true
            }
        },
        (Term::Function(f, pargs), Term::Function(g, gargs)) => {
            f == g
                && pargs.len() == gargs.len()
                && pargs
                    .iter()
                    .zip(gargs)
                    .all(|(p, g)| match_term(p, g, subst))
        }
        _ => pattern == ground,
    }
}

fn match_atom(pattern: &Atom, ground: &Atom, subst: &Subst) -> Option<Subst> {
    if pattern.predicate != ground.predicate || pattern.args.len() != ground.args.len() {
        return None;
    }
    let mut extended = subst.clone();
    pattern
        .args
        .iter()
        .zip(&ground.args)
        .all(|(p, g)| match_term(p, g, &mut extended))
        .then_some(extended)
}

#[derive(Default)]
struct AtomIndex {
    by_signature: HashMap<(String, usize), BTreeSet<Atom>>,
}

impl AtomIndex {
    fn insert(&mut self, atom: Atom) -> bool {
        self.by_signature
            .entry((atom.predicate.clone(), atom.arity()))
            .or_default()
            .insert(atom)
    }

    fn contains(&self, atom: &Atom) -> bool {
        self.by_signature
            .get(&(atom.predicate.clone(), atom.arity()))
            .is_some_and(|s| s.contains(atom))
    }

    fn candidates(&self, pattern: &Atom) -> impl Iterator<Item = &Atom> {
        self.by_signature
            .get(&(pattern.predicate.clone(), pattern.arity()))
            .into_iter()
            .flatten()
    }
}

enum Builtin {
    True,
    False,
}

fn eval_builtin(lit: &Literal, subst: &Subst) -> Option<Builtin> {
    match lit {
        Literal::Builtin { lhs, op, rhs } => {
            let (l, r) = (apply_term(lhs, subst), apply_term(rhs, subst));
            Some(if op.holds(&l, &r) {
                Builtin::True
            } else {
                Builtin::False
            })
        }
        Literal::Classical { .. } => None,
    }
}

struct Grounder {
    certain: BTreeSet<Atom>,
    possible: AtomIndex,
    cap: usize,
    work: usize,
}

impl Grounder {
    fn charge(&mut self, rule: &dyn std::fmt::Display) -> Result<(), GroundError> {
        self.work += 1;
        if self.work > self.cap {
            return Err(GroundError::GroundingBlowup {
                rule: rule.to_string(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// All extensions of `start` that map every pattern into the possible atoms.
    fn join(
        &mut self,
        patterns: &[&Atom],
        start: Subst,
        context: &dyn std::fmt::Display,
    ) -> Result<Vec<Subst>, GroundError> {
        let mut frontier = vec![start];
        for pattern in patterns {
            let mut next = Vec::new();
            for subst in &frontier {
                let bound = apply_atom(pattern, subst);
                if bound.is_ground() {
                    if self.possible.contains(&bound) {
                        next.push(subst.clone());
                    }
                    continue;
                }
                let matches: Vec<Subst> = self
                    .possible
                    .candidates(&bound)
                    .filter_map(|g| match_atom(&bound, g, subst))
                    .collect();
                for m in matches {
                    self.charge(context)?;
                    next.push(m);
                }
            }
            frontier = next;
        }
        Ok(frontier)
    }

    fn body_substitutions(
        &mut self,
        body: &[BodyElement],
        context: &dyn std::fmt::Display,
    ) -> Result<Vec<Subst>, GroundError> {
        let positives: Vec<&Atom> = body.iter().filter_map(BodyElement::positive_atom).collect();
        let substs = self.join(&positives, Subst::new(), context)?;
        Ok(substs
            .into_iter()
            .filter(|s| {
                body.iter().all(|e| match e {
                    BodyElement::Literal(l) => !matches!(eval_builtin(l, s), Some(Builtin::False)),
                    BodyElement::Aggregate(_) => true,
                })
            })
            .collect())
    }

    /// Over-approximates the derivable atoms by firing every rule whose
    /// positive body is possible, until nothing changes.
    fn saturate(&mut self, program: &Program, skip: &[bool]) -> Result<(), GroundError> {
        loop {
            let mut changed = false;
            for (rule, _) in program.rules.iter().zip(skip).filter(|(_, s)| !**s) {
                self.work = 0;
                for subst in self.body_substitutions(&rule.body, rule)? {
                    let derived: Vec<Atom> = match &rule.head {
                        Head::Normal(a) => vec![apply_atom(a, &subst)],
                        Head::Disjunctive(atoms) => {
                            atoms.iter().map(|a| apply_atom(a, &subst)).collect()
                        }
                        Head::Choice { elements, .. } => self
                            .ground_choice_elements(elements, &subst, rule)?
                            .into_iter()
                            .map(|e| e.atom)
                            .collect(),
                        Head::Constraint => Vec::new(),
                    };
                    for atom in derived {
                        changed |= self.possible.insert(atom);
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// Simplifies a ground condition; `None` means the condition is false.
    fn simplify_condition(&self, condition: &[Literal], subst: &Subst) -> Option<Vec<Literal>> {
        let mut out = Vec::new();
        for lit in condition {
            match lit {
                Literal::Builtin { .. } => {
                    if let Some(Builtin::False) = eval_builtin(lit, subst) {
                        return None;
                    }
                }
                Literal::Classical { atom, negated } => {
                    let atom = apply_atom(atom, subst);
                    match negated {
                        false if self.certain.contains(&atom) => {}
                        false => out.push(Literal::pos(atom)),
                        true if self.certain.contains(&atom) => return None,
                        true if !self.possible.contains(&atom) => {}
                        true => out.push(Literal::neg(atom)),
                    }
                }
            }
        }
        Some(out)
    }

    fn local_substitutions(
        &mut self,
        condition: &[Literal],
        subst: &Subst,
        context: &dyn std::fmt::Display,
    ) -> Result<Vec<Subst>, GroundError> {
        let positives: Vec<&Atom> = condition
            .iter()
            .filter_map(Literal::positive_atom)
            .collect();
        self.join(&positives, subst.clone(), context)
    }

    fn ground_choice_elements(
        &mut self,
        elements: &[ChoiceElement],
        subst: &Subst,
        context: &dyn std::fmt::Display,
    ) -> Result<Vec<ChoiceElement>, GroundError> {
        let mut out: Vec<ChoiceElement> = Vec::new();
        for element in elements {
            for local in self.local_substitutions(&element.condition, subst, context)? {
                if let Some(condition) = self.simplify_condition(&element.condition, &local) {
                    let ground = ChoiceElement {
                        atom: apply_atom(&element.atom, &local),
                        condition,
                    };
                    if !out.contains(&ground) {
                        out.push(ground);
                    }
                }
            }
        }
        Ok(out)
    }

    fn ground_aggregate(
        &mut self,
        agg: &AggregateLiteral,
        subst: &Subst,
        context: &dyn std::fmt::Display,
    ) -> Result<AggregateLiteral, GroundError> {
        let mut elements: Vec<AggregateElement> = Vec::new();
        for element in &agg.elements {
            for local in self.local_substitutions(&element.condition, subst, context)? {
                if let Some(condition) = self.simplify_condition(&element.condition, &local) {
                    let ground = AggregateElement {
                        terms: element
                            .terms
                            .iter()
                            .map(|t| apply_term(t, &local))
                            .collect(),
                        condition,
                    };
                    if !elements.contains(&ground) {
                        elements.push(ground);
                    }
                }
            }
        }
        Ok(AggregateLiteral {
            negated: agg.negated,
            function: agg.function,
            elements,
            left_guard: agg
                .left_guard
                .as_ref()
                .map(|(t, op)| (apply_term(t, subst), *op)),
            right_guard: agg
                .right_guard
                .as_ref()
                .map(|(op, t)| (*op, apply_term(t, subst))),
        })
    }

    /// Simplified ground body, or `None` when the instance is trivially false.
    fn ground_body(
        &mut self,
        body: &[BodyElement],
        subst: &Subst,
        context: &dyn std::fmt::Display,
    ) -> Result<Option<Vec<BodyElement>>, GroundError> {
        let mut out = Vec::new();
        for element in body {
            match element {
                BodyElement::Literal(lit) => {
                    match self.simplify_condition(std::slice::from_ref(lit), subst) {
                        None => return Ok(None),
                        Some(rest) => out.extend(rest.into_iter().map(BodyElement::Literal)),
                    }
                }
                BodyElement::Aggregate(agg) => {
                    out.push(BodyElement::Aggregate(
                        self.ground_aggregate(agg, subst, context)?,
                    ));
                }
            }
        }
        Ok(Some(out))
    }

    fn instantiate_rule(&mut self, rule: &Rule) -> Result<Vec<Rule>, GroundError> {
        let mut out = Vec::new();
        for subst in self.body_substitutions(&rule.body, rule)? {
            self.charge(rule)?;
            let Some(body) = self.ground_body(&rule.body, &subst, rule)? else {
                continue;
            };
            let head = match &rule.head {
                Head::Normal(a) => Head::Normal(apply_atom(a, &subst)),
                Head::Disjunctive(atoms) => {
                    Head::Disjunctive(atoms.iter().map(|a| apply_atom(a, &subst)).collect())
                }
                Head::Choice { elements, bound } => Head::Choice {
                    elements: self.ground_choice_elements(elements, &subst, rule)?,
                    bound: *bound,
                },
                Head::Constraint => Head::Constraint,
            };
            out.push(Rule { head, body });
        }
        Ok(out)
    }

    fn instantiate_weak(
        &mut self,
        weak: &WeakConstraint,
    ) -> Result<Vec<WeakConstraint>, GroundError> {
        let mut out = Vec::new();
        for subst in self.body_substitutions(&weak.body, weak)? {
            self.charge(weak)?;
            let Some(body) = self.ground_body(&weak.body, &subst, weak)? else {
                continue;
            };
            out.push(WeakConstraint {
                body,
                weight: apply_term(&weak.weight, &subst),
                level: apply_term(&weak.level, &subst),
                tuple: weak.tuple.iter().map(|t| apply_term(t, &subst)).collect(),
            });
        }
        Ok(out)
    }
}
