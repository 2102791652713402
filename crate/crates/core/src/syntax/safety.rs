//! Safety: every global variable occurring in a head, a negative literal, a
//! built-in comparison, an aggregate guard or a weak-constraint tuple must
//! also occur in a positive classical body literal. Variables local to a
//! choice or aggregate element may instead be bound by a positive literal of
//! that element's condition.

use std::collections::BTreeSet;

use super::ast::*;

fn bound_by_body(body: &[BodyElement]) -> BTreeSet<&str> {
    let mut bound = BTreeSet::new();
    for element in body {
        if let Some(atom) = element.positive_atom() {
            atom.collect_variables(&mut bound);
        }
    }
    bound
}

fn first_unbound<'a>(
    vars: impl IntoIterator<Item = &'a str>,
    bound: &BTreeSet<&str>,
) -> Option<String> {
    vars.into_iter()
        .find(|v| !bound.contains(v))
        .map(str::to_string)
}

fn check_condition<'a>(
    occurring: BTreeSet<&'a str>,
    condition: &'a [Literal],
    global: &BTreeSet<&'a str>,
) -> Result<(), String> {
    let mut bound = global.clone();
    for lit in condition {
        if let Some(atom) = lit.positive_atom() {
            atom.collect_variables(&mut bound);
        }
    }
    match first_unbound(occurring, &bound) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

fn check_body<'a>(body: &'a [BodyElement], bound: &BTreeSet<&'a str>) -> Result<(), String> {
    for element in body {
        match element {
            BodyElement::Literal(lit @ Literal::Classical { negated: true, .. })
            | BodyElement::Literal(lit @ Literal::Builtin { .. }) => {
                let mut vars = BTreeSet::new();
                lit.collect_variables(&mut vars);
                if let Some(v) = first_unbound(vars, bound) {
                    return Err(v);
                }
            }
            BodyElement::Literal(_) => {}
            BodyElement::Aggregate(agg) => {
                let mut guard_vars = BTreeSet::new();
                if let Some((t, _)) = &agg.left_guard {
                    t.collect_variables(&mut guard_vars);
                }
                if let Some((_, t)) = &agg.right_guard {
                    t.collect_variables(&mut guard_vars);
                }
                if let Some(v) = first_unbound(guard_vars, bound) {
                    return Err(v);
                }
                for e in &agg.elements {
                    let mut vars = BTreeSet::new();
                    e.terms.iter().for_each(|t| t.collect_variables(&mut vars));
                    e.condition
                        .iter()
                        .for_each(|l| l.collect_variables(&mut vars));
                    check_condition(vars, &e.condition, bound)?;
                }
            }
        }
    }
    Ok(())
}

/// Returns the name of the first unsafe variable, if any.
pub fn check_rule(rule: &Rule) -> Result<(), String> {
    let bound = bound_by_body(&rule.body);
    check_body(&rule.body, &bound)?;
    match &rule.head {
        Head::Normal(atom) => {
            let mut vars = BTreeSet::new();
            atom.collect_variables(&mut vars);
            first_unbound(vars, &bound).map_or(Ok(()), Err)
        }
        Head::Disjunctive(atoms) => {
            let mut vars = BTreeSet::new();
            atoms.iter().for_each(|a| a.collect_variables(&mut vars));
            first_unbound(vars, &bound).map_or(Ok(()), Err)
        }
        Head::Choice { elements, .. } => {
            for e in elements {
                let mut vars = BTreeSet::new();
                e.atom.collect_variables(&mut vars);
                e.condition
                    .iter()
                    .for_each(|l| l.collect_variables(&mut vars));
                check_condition(vars, &e.condition, &bound)?;
            }
            Ok(())
        }
        Head::Constraint => Ok(()),
    }
}

pub fn check_weak(weak: &WeakConstraint) -> Result<(), String> {
    let bound = bound_by_body(&weak.body);
    check_body(&weak.body, &bound)?;
    let mut vars = BTreeSet::new();
    weak.weight.collect_variables(&mut vars);
    weak.level.collect_variables(&mut vars);
    weak.tuple
        .iter()
        .for_each(|t| t.collect_variables(&mut vars));
    first_unbound(vars, &bound).map_or(Ok(()), Err)
}
