//! Abstract syntax for the ASP-Core-2 fragment used by competition encodings.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Integer(i64),
    /// Lowercase symbolic constant or a quoted string (quotes included).
    Constant(String),
    /// Always starts with an uppercase letter.
    Variable(String),
    Function(String, Vec<Term>),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Constant(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Variable(_) => false,
            Term::Constant(_) | Term::Integer(_) => true,
            Term::Function(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Variable(v) => {
                out.insert(v.as_str());
            }
            Term::Function(_, args) => args.iter().for_each(|a| a.collect_variables(out)),
            Term::Constant(_) | Term::Integer(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// Propositional atom without arguments.
    pub fn prop(predicate: impl Into<String>) -> Self {
        Atom::new(predicate, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// `name/arity`, the key used for predicate-level analysis.
    pub fn signature(&self) -> String {
        format!("{}/{}", self.predicate, self.arity())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        self.args.iter().for_each(|a| a.collect_variables(out));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    pub fn holds<T: Ord + ?Sized>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            CompareOp::Eq => lhs == rhs,
            CompareOp::Ne => lhs != rhs,
            CompareOp::Lt => lhs < rhs,
            CompareOp::Le => lhs <= rhs,
            CompareOp::Gt => lhs > rhs,
            CompareOp::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Literal {
    Classical { atom: Atom, negated: bool },
    Builtin { lhs: Term, op: CompareOp, rhs: Term },
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal::Classical {
            atom,
            negated: false,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal::Classical {
            atom,
            negated: true,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Literal::Classical { atom, .. } => atom.is_ground(),
            Literal::Builtin { lhs, rhs, .. } => lhs.is_ground() && rhs.is_ground(),
        }
    }

    pub fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Literal::Classical { atom, .. } => atom.collect_variables(out),
            Literal::Builtin { lhs, rhs, .. } => {
                lhs.collect_variables(out);
                rhs.collect_variables(out);
            }
        }
    }

    pub fn positive_atom(&self) -> Option<&Atom> {
        match self {
            Literal::Classical {
                atom,
                negated: false,
            } => Some(atom),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AggregateFunction {
    Count,
    Sum,
    Min,
    Max,
}

impl AggregateFunction {
    pub fn keyword(self) -> &'static str {
        match self {
            AggregateFunction::Count => "#count",
            AggregateFunction::Sum => "#sum",
            AggregateFunction::Min => "#min",
            AggregateFunction::Max => "#max",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AggregateElement {
    pub terms: Vec<Term>,
    pub condition: Vec<Literal>,
}

/// `[lhs op] #fun{ elements } [op rhs]`, at least one guard present.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AggregateLiteral {
    pub negated: bool,
    pub function: AggregateFunction,
    pub elements: Vec<AggregateElement>,
    /// Guard written to the left: `term op #fun{...}`.
    pub left_guard: Option<(Term, CompareOp)>,
    /// Guard written to the right: `#fun{...} op term`.
    pub right_guard: Option<(CompareOp, Term)>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BodyElement {
    Literal(Literal),
    Aggregate(AggregateLiteral),
}

impl BodyElement {
    pub fn positive_atom(&self) -> Option<&Atom> {
        match self {
            BodyElement::Literal(l) => l.positive_atom(),
            BodyElement::Aggregate(_) => None,
        }
    }
}

impl From<Literal> for BodyElement {
    fn from(l: Literal) -> Self {
        BodyElement::Literal(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChoiceElement {
    pub atom: Atom,
    pub condition: Vec<Literal>,
}

/// Cardinality bound on a choice head; only `=`, `<=` and `>=` are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChoiceBound {
    pub op: CompareOp,
    pub value: i64,
}

impl ChoiceBound {
    pub fn admits(&self, count: i64) -> bool {
        self.op.holds(&count, &self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Head {
    Normal(Atom),
    /// Two or more atoms joined by `|`.
    Disjunctive(Vec<Atom>),
    Choice {
        elements: Vec<ChoiceElement>,
        bound: Option<ChoiceBound>,
    },
    Constraint,
}

impl Head {
    /// Atoms that can be derived by this head (choice elements included).
    pub fn atoms(&self) -> Vec<&Atom> {
        match self {
            Head::Normal(a) => vec![a],
            Head::Disjunctive(atoms) => atoms.iter().collect(),
            Head::Choice { elements, .. } => elements.iter().map(|e| &e.atom).collect(),
            Head::Constraint => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<BodyElement>,
}

impl Rule {
    pub fn fact(atom: Atom) -> Self {
        Rule {
            head: Head::Normal(atom),
            body: Vec::new(),
        }
    }

    pub fn is_fact(&self) -> bool {
        matches!(self.head, Head::Normal(_)) && self.body.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        let mut vars = BTreeSet::new();
        match &self.head {
            Head::Normal(a) => a.collect_variables(&mut vars),
            Head::Disjunctive(atoms) => atoms.iter().for_each(|a| a.collect_variables(&mut vars)),
            Head::Choice { elements, .. } => {
                for e in elements {
                    e.atom.collect_variables(&mut vars);
                    e.condition
                        .iter()
                        .for_each(|l| l.collect_variables(&mut vars));
                }
            }
            Head::Constraint => {}
        }
        collect_body_variables(&self.body, &mut vars);
        vars
    }

    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }
}

pub(crate) fn collect_body_variables<'a>(body: &'a [BodyElement], vars: &mut BTreeSet<&'a str>) {
    for element in body {
        match element {
            BodyElement::Literal(l) => l.collect_variables(vars),
            BodyElement::Aggregate(agg) => {
                if let Some((t, _)) = &agg.left_guard {
                    t.collect_variables(vars);
                }
                if let Some((_, t)) = &agg.right_guard {
                    t.collect_variables(vars);
                }
                for e in &agg.elements {
                    e.terms.iter().for_each(|t| t.collect_variables(vars));
                    e.condition.iter().for_each(|l| l.collect_variables(vars));
                }
            }
        }
    }
}

/// `:~ body. [weight@level, tuple...]`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeakConstraint {
    pub body: Vec<BodyElement>,
    pub weight: Term,
    pub level: Term,
    pub tuple: Vec<Term>,
}

impl WeakConstraint {
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut vars = BTreeSet::new();
        collect_body_variables(&self.body, &mut vars);
        self.weight.collect_variables(&mut vars);
        self.level.collect_variables(&mut vars);
        self.tuple
            .iter()
            .for_each(|t| t.collect_variables(&mut vars));
        vars
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub weak_constraints: Vec<WeakConstraint>,
    pub query: Option<Atom>,
}

impl Program {
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && self.weak_constraints.is_empty() && self.query.is_none()
    }

    /// Appends all statements of `other`; the query of `other` wins if present.
    pub fn extend(&mut self, other: Program) {
        self.rules.extend(other.rules);
        self.weak_constraints.extend(other.weak_constraints);
        if other.query.is_some() {
            self.query = other.query;
        }
    }

    pub fn facts(&self) -> impl Iterator<Item = &Atom> {
        self.rules
            .iter()
            .filter_map(|r| match (&r.head, r.body.is_empty()) {
                (Head::Normal(a), true) if a.is_ground() => Some(a),
                _ => None,
            })
    }
}

// ---------------------------------------------------------------------------
// Printing. The output is valid input for `parse_program`.

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant(c) => f.write_str(c),
            Term::Integer(i) => write!(f, "{i}"),
            Term::Variable(v) => f.write_str(v),
            Term::Function(name, args) => {
                write!(f, "{name}(")?;
                write_list(f, args, ",")?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_list(f, &self.args, ",")?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Classical { atom, negated } => {
                if *negated {
                    f.write_str("not ")?;
                }
                write!(f, "{atom}")
            }
            Literal::Builtin { lhs, op, rhs } => write!(f, "{lhs} {op} {rhs}"),
        }
    }
}

impl fmt::Display for AggregateElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.terms, ",")?;
        if !self.condition.is_empty() {
            f.write_str(" : ")?;
            write_list(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

impl fmt::Display for AggregateLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        if let Some((t, op)) = &self.left_guard {
            write!(f, "{t} {op} ")?;
        }
        write!(f, "{}{{", self.function.keyword())?;
        write_list(f, &self.elements, "; ")?;
        f.write_str("}")?;
        if let Some((op, t)) = &self.right_guard {
            write!(f, " {op} {t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for BodyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElement::Literal(l) => write!(f, "{l}"),
            BodyElement::Aggregate(a) => write!(f, "{a}"),
        }
    }
}

impl fmt::Display for ChoiceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atom)?;
        if !self.condition.is_empty() {
            f.write_str(" : ")?;
            write_list(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Normal(a) => write!(f, "{a}"),
            Head::Disjunctive(atoms) => write_list(f, atoms, " | "),
            Head::Choice { elements, bound } => {
                f.write_str("{")?;
                write_list(f, elements, "; ")?;
                f.write_str("}")?;
                if let Some(b) = bound {
                    write!(f, " {} {}", b.op, b.value)?;
                }
                Ok(())
            }
            Head::Constraint => Ok(()),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            if matches!(self.head, Head::Constraint) {
                f.write_str(":- ")?;
            } else {
                f.write_str(" :- ")?;
            }
            write_list(f, &self.body, ", ")?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for WeakConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(":~ ")?;
        write_list(f, &self.body, ", ")?;
        write!(f, ". [{}@{}", self.weight, self.level)?;
        for t in &self.tuple {
            write!(f, ",{t}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        for w in &self.weak_constraints {
            writeln!(f, "{w}")?;
        }
        if let Some(q) = &self.query {
            writeln!(f, "{q}?")?;
        }
        Ok(())
    }
}
