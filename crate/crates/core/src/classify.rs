//! Language features, head-cycle-freeness and sub-track assignment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ground::{ground_program, GroundError, GroundProgram};
use crate::syntax::{Atom, BodyElement, Head, Literal, Program, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub has_choice: bool,
    pub has_disjunction: bool,
    pub has_aggregates: bool,
    pub has_weak_constraints: bool,
    pub has_query: bool,
    /// `Some(true)` whenever there is no disjunction; `None` until resolved.
    pub is_hcf: Option<bool>,
}

impl FeatureSet {
    pub fn with_hcf(mut self, hcf: bool) -> Self {
        self.is_hcf = Some(hcf);
        self
    }
}

pub fn extract_features(program: &Program) -> FeatureSet {
    let rules = &program.rules;
    let has_disjunction = rules.iter().any(|r| matches!(r.head, Head::Disjunctive(_)));
    let in_body = |b: &[BodyElement]| b.iter().any(|e| matches!(e, BodyElement::Aggregate(_)));
    FeatureSet {
        has_choice: rules.iter().any(|r| matches!(r.head, Head::Choice { .. })),
        has_disjunction,
        has_aggregates: rules.iter().any(|r| in_body(&r.body))
            || program.weak_constraints.iter().any(|w| in_body(&w.body)),
        has_weak_constraints: !program.weak_constraints.is_empty(),
        has_query: program.query.is_some(),
        is_hcf: (!has_disjunction).then_some(true),
    }
}

/// Sub-tracks are written as the integers 1 to 4 in every external format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Subtrack {
    Normal = 1,
    Extended = 2,
    Weak = 3,
    NonHcf = 4,
}

impl Subtrack {
    pub const ALL: [Subtrack; 4] = [
        Subtrack::Normal,
        Subtrack::Extended,
        Subtrack::Weak,
        Subtrack::NonHcf,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }
}

impl From<Subtrack> for u8 {
    fn from(s: Subtrack) -> u8 {
        s.number()
    }
}

impl TryFrom<u8> for Subtrack {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, String> {
        Subtrack::ALL
            .into_iter()
            .find(|s| s.number() == n)
            .ok_or_else(|| format!("sub-track must be 1, 2, 3 or 4, got {n}"))
    }
}

impl fmt::Display for Subtrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("program has disjunctive rules but head-cycle-freeness was not decided")]
    HcfUndecided,
    #[error(transparent)]
    Ground(#[from] GroundError),
}

pub fn assign_subtrack(features: &FeatureSet) -> Result<Subtrack, ClassifyError> {
    let hcf = if features.has_disjunction {
        features.is_hcf.ok_or(ClassifyError::HcfUndecided)?
    } else {
        true
    };
    Ok(if !hcf {
        Subtrack::NonHcf
    } else if features.has_weak_constraints {
        Subtrack::Weak
    } else if features.has_choice
        || features.has_disjunction
        || features.has_aggregates
        || features.has_query
    {
        Subtrack::Extended
    } else {
        Subtrack::Normal
    })
}

/// Positive dependency graph. Nodes are atom texts (or predicate signatures
/// in abstract mode) in lexicographic order; an edge runs from every
/// positive body atom of a rule to every atom of its head.
#[derive(Debug, Clone)]
pub struct DependencyGraph {
    pub nodes: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
    /// Strongly connected components, each sorted, listed by smallest member.
    pub sccs: Vec<Vec<usize>>,
    component: Vec<usize>,
}

impl DependencyGraph {
    fn build(pairs: Vec<(Vec<String>, Vec<String>)>, extra_nodes: Vec<String>) -> Self {
        let mut names: BTreeSet<String> = extra_nodes.into_iter().collect();
        for (body, head) in &pairs {
            names.extend(body.iter().cloned());
            names.extend(head.iter().cloned());
        }
        let nodes: Vec<String> = names.into_iter().collect();
        let index: BTreeMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut edges = BTreeSet::new();
        for (body, head) in &pairs {
            for b in body {
                for h in head {
                    edges.insert((index[b.as_str()], index[h.as_str()]));
                }
            }
        }

        let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(nodes.len(), edges.len());
        for _ in &nodes {
            graph.add_node(());
        }
        for &(a, b) in &edges {
            graph.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
        }
        let mut sccs: Vec<Vec<usize>> = tarjan_scc(&graph)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(NodeIndex::index).collect();
                c.sort_unstable();
                c
            })
            .collect();
        sccs.sort();
        let mut component = vec![0; nodes.len()];
        for (ci, c) in sccs.iter().enumerate() {
            for &n in c {
                component[n] = ci;
            }
        }
        DependencyGraph {
            nodes,
            edges,
            sccs,
            component,
        }
    }

    /// Graph over the ground atoms of a variable-free program.
    pub fn ground(program: &GroundProgram) -> Self {
        let pairs = program
            .rules()
            .iter()
            .flat_map(|r| rule_dependencies(r, |a| a.to_string()))
            .collect();
        let extra = program.atoms().iter().map(ToString::to_string).collect();
        Self::build(pairs, extra)
    }

    /// Graph over predicate signatures; an over-approximation of every
    /// ground graph the program can have.
    pub fn abstract_(program: &Program) -> Self {
        let pairs = program
            .rules
            .iter()
            .flat_map(|r| rule_dependencies(r, Atom::signature))
            .collect();
        Self::build(pairs, Vec::new())
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.component[a] == self.component[b]
    }

    pub fn component_of(&self, node: usize) -> &[usize] {
        &self.sccs[self.component[node]]
    }

    pub fn component_names(&self, node: usize) -> Vec<String> {
        self.component_of(node)
            .iter()
            .map(|&n| self.nodes[n].clone())
            .collect()
    }
}

fn positive_atoms(lits: &[Literal]) -> impl Iterator<Item = &Atom> {
    lits.iter().filter_map(Literal::positive_atom)
}

/// (positive body, head) name lists contributed by one rule. Aggregate and
/// choice conditions count as positive body atoms of what they guard.
fn rule_dependencies(
    rule: &Rule,
    name: impl Fn(&Atom) -> String,
) -> Vec<(Vec<String>, Vec<String>)> {
    let mut body: Vec<String> = Vec::new();
    for element in &rule.body {
        match element {
            BodyElement::Literal(l) => body.extend(l.positive_atom().map(&name)),
            BodyElement::Aggregate(agg) if !agg.negated => {
                for e in &agg.elements {
                    body.extend(positive_atoms(&e.condition).map(&name));
                }
            }
            BodyElement::Aggregate(_) => {}
        }
    }
    match &rule.head {
        Head::Choice { elements, .. } => elements
            .iter()
            .map(|e| {
                let mut b = body.clone();
                b.extend(positive_atoms(&e.condition).map(&name));
                (b, vec![name(&e.atom)])
            })
            .collect(),
        head => vec![(body, head.atoms().into_iter().map(&name).collect())],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HcfWitness {
    pub rule: String,
    pub atoms: (String, String),
    pub scc: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HcfReport {
    pub hcf: bool,
    pub witness: Option<HcfWitness>,
}

fn find_head_cycle<'a>(
    graph: &DependencyGraph,
    rules: impl Iterator<Item = &'a Rule>,
    name: impl Fn(&Atom) -> String,
) -> HcfReport {
    for rule in rules {
        let Head::Disjunctive(atoms) = &rule.head else {
            continue;
        };
        let ids: Vec<usize> = atoms.iter().filter_map(|a| graph.node(&name(a))).collect();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if a != b && graph.same_component(a, b) {
                    let (x, y) = (a.min(b), a.max(b));
                    return HcfReport {
                        hcf: false,
                        witness: Some(HcfWitness {
                            rule: rule.to_string(),
                            atoms: (graph.nodes[x].clone(), graph.nodes[y].clone()),
                            scc: graph.component_names(a),
                        }),
                    };
                }
            }
        }
    }
    HcfReport {
        hcf: true,
        witness: None,
    }
}

/// Decides head-cycle-freeness of a variable-free program; the witness is
/// the first disjunctive rule (in program order) with two head atoms in one
/// component.
pub fn head_cycle_free(program: &GroundProgram) -> HcfReport {
    let graph = DependencyGraph::ground(program);
    find_head_cycle(&graph, program.rules().iter(), |a| a.to_string())
}

/// Predicate-level check. A `true` answer holds for every grounding; a
/// `false` answer may be spurious.
pub fn head_cycle_free_abstract(program: &Program) -> HcfReport {
    let graph = DependencyGraph::abstract_(program);
    // Two head atoms over the same predicate share a node, which says
    // nothing about the ground atoms, unless that node lies on a cycle.
    let report = find_head_cycle(&graph, program.rules.iter(), Atom::signature);
    if report.hcf {
        for rule in &program.rules {
            let Head::Disjunctive(atoms) = &rule.head else {
                continue;
            };
            let mut seen = BTreeSet::new();
            for a in atoms {
                let sig = a.signature();
                if !seen.insert(sig.clone()) {
                    let n = graph.node(&sig).expect("head predicate is a node");
                    let cyclic = graph.component_of(n).len() > 1 || graph.edges.contains(&(n, n));
                    if cyclic {
                        return HcfReport {
                            hcf: false,
                            witness: Some(HcfWitness {
                                rule: rule.to_string(),
                                atoms: (sig.clone(), sig),
                                scc: graph.component_names(n),
                            }),
                        };
                    }
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcfMode<'a> {
    /// Ground the program against these facts and decide exactly.
    Ground(&'a [Atom]),
    /// Decide on the predicate-level graph.
    Abstract,
    /// Leave disjunctive programs undecided.
    Off,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub features: FeatureSet,
    pub subtrack: Subtrack,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hcf_witness: Option<HcfWitness>,
}

pub fn classify(program: &Program, mode: HcfMode<'_>) -> Result<Classification, ClassifyError> {
    let mut features = extract_features(program);
    let mut hcf_witness = None;
    if features.has_disjunction {
        let report = match mode {
            HcfMode::Ground(facts) => Some(head_cycle_free(&ground_program(program, facts)?)),
            HcfMode::Abstract => Some(head_cycle_free_abstract(program)),
            HcfMode::Off => None,
        };
        if let Some(report) = report {
            features.is_hcf = Some(report.hcf);
            hcf_witness = report.witness;
        }
    }
    let subtrack = assign_subtrack(&features)?;
    Ok(Classification {
        features,
        subtrack,
        hcf_witness,
    })
}
