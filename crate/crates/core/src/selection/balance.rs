//! Balancing of per-class pick counts along a chain of classes.
//!
//! For classes `x` ordered easiest (or satisfiable) first, with `pos(g)` and
//! `neg(g)` the positive and negative parts of an integer:
//!
//! ```text
//! target         = floor(n / (#nonempty + m))
//! gap(x)         = 0 if x is empty, else target - |x|
//! available∘(x)  = Σ gap(x') over x' ∘ x
//! compensate∘(x) = min(pos(gap(x)), neg(available∘(x)))
//! distribute>(x) = min(compensate<(x), max(|gap(x)| - compensate>(x), floor(|gap(x)|/2)))
//! distribute<(x) = min(compensate>(x), |gap(x)| - distribute>(x))
//! accumulate<(x) = accumulate<(p) + distribute<(p) - increase<(p)   p the predecessor
//! accumulate>(x) = accumulate>(s) + distribute>(s) - increase>(s)   s the successor
//! increase<(x)   = min(accumulate<(x), neg(gap(x)))
//! increase>(x)   = min(accumulate>(x), neg(gap(x)) - increase<(x))
//! select(x)      = |x| - neg(gap(x)) + increase<(x) + increase>(x)
//! ```
//!
//! An underpopulated class hands its gap to the nearest overpopulated
//! classes, harder ones receiving the larger half on ties.

use serde::{Deserialize, Serialize};

use super::SelectError;

pub fn pos(g: i64) -> i64 {
    g.max(0)
}

pub fn neg(g: i64) -> i64 {
    (-g).max(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassQuantities<L> {
    pub label: L,
    pub size: i64,
    pub gap: i64,
    pub available_lt: i64,
    pub available_gt: i64,
    pub compensate_lt: i64,
    pub compensate_gt: i64,
    pub distribute_lt: i64,
    pub distribute_gt: i64,
    pub accumulate_lt: i64,
    pub accumulate_gt: i64,
    pub increase_lt: i64,
    pub increase_gt: i64,
    pub select: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionState<L> {
    pub n: i64,
    pub m: i64,
    pub target: i64,
    pub classes: Vec<ClassQuantities<L>>,
}

impl<L: PartialEq> SelectionState<L> {
    pub fn get(&self, label: &L) -> Option<&ClassQuantities<L>> {
        self.classes.iter().find(|c| &c.label == label)
    }

    pub fn select(&self, label: &L) -> i64 {
        self.get(label).map_or(0, |c| c.select)
    }
}

impl<L> SelectionState<L> {
    pub fn selects(&self) -> Vec<i64> {
        self.classes.iter().map(|c| c.select).collect()
    }

    pub fn total(&self) -> i64 {
        self.classes.iter().map(|c| c.select).sum()
    }

    /// Distributed instances that found no receiving class, per direction.
    pub fn undelivered(&self) -> (i64, i64) {
        let lt = self
            .classes
            .last()
            .map_or(0, |c| c.accumulate_lt + c.distribute_lt - c.increase_lt);
        let gt = self
            .classes
            .first()
            .map_or(0, |c| c.accumulate_gt + c.distribute_gt - c.increase_gt);
        (lt, gt)
    }
}

/// Evaluates the balancing equations for `classes` given easiest first.
pub fn balance<L: Clone>(
    classes: &[(L, usize)],
    n: usize,
    m: usize,
) -> Result<SelectionState<L>, SelectError> {
    let nonempty = classes.iter().filter(|(_, s)| *s > 0).count() as i64;
    if nonempty == 0 {
        return Err(SelectError::NoNonemptyClass);
    }
    let (n, m) = (n as i64, m as i64);
    let target = n / (nonempty + m);
    let mut q: Vec<ClassQuantities<L>> = classes
        .iter()
        .map(|(label, size)| {
            let size = *size as i64;
            ClassQuantities {
                label: label.clone(),
                size,
                gap: if size == 0 { 0 } else { target - size },
                available_lt: 0,
                available_gt: 0,
                compensate_lt: 0,
                compensate_gt: 0,
                distribute_lt: 0,
                distribute_gt: 0,
                accumulate_lt: 0,
                accumulate_gt: 0,
                increase_lt: 0,
                increase_gt: 0,
                select: 0,
            }
        })
        .collect();

    let total_gap: i64 = q.iter().map(|c| c.gap).sum();
    let mut before = 0;
    for c in &mut q {
        c.available_lt = before;
        c.available_gt = total_gap - before - c.gap;
        before += c.gap;
    }
    for c in &mut q {
        c.compensate_lt = pos(c.gap).min(neg(c.available_lt));
        c.compensate_gt = pos(c.gap).min(neg(c.available_gt));
        let g = c.gap.abs();
        c.distribute_gt = c.compensate_lt.min((g - c.compensate_gt).max(g / 2));
        c.distribute_lt = c.compensate_gt.min(g - c.distribute_gt);
    }

    let mut carry = 0;
    for c in q.iter_mut() {
        c.accumulate_lt = carry;
        c.increase_lt = c.accumulate_lt.min(neg(c.gap));
        carry = c.accumulate_lt + c.distribute_lt - c.increase_lt;
    }
    let mut carry = 0;
    for c in q.iter_mut().rev() {
        c.accumulate_gt = carry;
        c.increase_gt = c.accumulate_gt.min(neg(c.gap) - c.increase_lt);
        carry = c.accumulate_gt + c.distribute_gt - c.increase_gt;
    }
    for c in &mut q {
        c.select = c.size - neg(c.gap) + c.increase_lt + c.increase_gt;
    }

    Ok(SelectionState {
        n,
        m,
        target,
        classes: q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn run(sizes: &[usize], n: usize, m: usize) -> SelectionState<usize> {
        let classes: Vec<(usize, usize)> = sizes.iter().copied().enumerate().collect();
        balance(&classes, n, m).unwrap()
    }

    fn column(s: &SelectionState<usize>, f: fn(&ClassQuantities<usize>) -> i64) -> Vec<i64> {
        s.classes.iter().map(f).collect()
    }

    #[test]
    fn graceful_graphs_hardness() {
        let s = run(&[3, 5, 30, 21], 20, 1);
        assert_eq!(s.target, 4);
        assert_eq!(column(&s, |c| c.gap), [1, -1, -26, -17]);
        assert_eq!(column(&s, |c| c.available_lt), [0, 1, 0, -26]);
        assert_eq!(column(&s, |c| c.available_gt), [-44, -43, -17, 0]);
        assert_eq!(column(&s, |c| c.compensate_lt), [0, 0, 0, 0]);
        assert_eq!(column(&s, |c| c.compensate_gt), [1, 0, 0, 0]);
        assert_eq!(column(&s, |c| c.distribute_lt), [1, 0, 0, 0]);
        assert_eq!(column(&s, |c| c.distribute_gt), [0, 0, 0, 0]);
        assert_eq!(column(&s, |c| c.accumulate_lt), [0, 1, 0, 0]);
        assert_eq!(column(&s, |c| c.increase_lt), [0, 1, 0, 0]);
        assert_eq!(column(&s, |c| c.increase_gt), [0, 0, 0, 0]);
        assert_eq!(s.selects(), [3, 5, 4, 4]);
    }

    #[test]
    fn graceful_graphs_medium_status() {
        let s = run(&[4, 1], 5, 0);
        assert_eq!(s.target, 2);
        assert_eq!(column(&s, |c| c.gap), [-2, 1]);
        assert_eq!(column(&s, |c| c.compensate_lt), [0, 1]);
        assert_eq!(column(&s, |c| c.distribute_gt), [0, 1]);
        assert_eq!(column(&s, |c| c.accumulate_gt), [1, 0]);
        assert_eq!(column(&s, |c| c.increase_gt), [1, 0]);
        assert_eq!(s.selects(), [3, 1]);
        assert_eq!(s.total(), 4);
    }

    #[test]
    fn hand_evaluated() {
        let s = run(&[50], 20, 1);
        assert_eq!((s.target, s.selects()), (10, vec![10]));
        let s = run(&[4, 4, 4, 4], 20, 1);
        assert_eq!(column(&s, |c| c.gap), [0, 0, 0, 0]);
        assert_eq!(s.selects(), [4, 4, 4, 4]);
        assert_eq!(
            balance::<usize>(&[(0, 0), (1, 0)], 20, 1),
            Err(SelectError::NoNonemptyClass)
        );
    }

    #[test]
    fn empty_class_in_the_middle() {
        // Reachability: only medium instances
        let s = run(&[0, 60, 0, 0], 20, 1);
        assert_eq!(s.selects(), [0, 10, 0, 0]);
        let s = run(&[30, 30], 10, 0);
        assert_eq!(s.selects(), [5, 5]);
    }

    proptest! {
        #[test]
        fn positive_and_negative_parts(g in -1_000_000i64..1_000_000) {
            prop_assert_eq!(pos(g), (g.abs() + g) / 2);
            prop_assert_eq!(neg(g), (g.abs() - g) / 2);
        }

        #[test]
        fn bounds_and_conservation(
            sizes in prop::collection::vec(0usize..60, 1..6),
            n in 1usize..40,
            m in 0usize..3,
        ) {
            prop_assume!(sizes.iter().any(|&s| s > 0));
            let s = run(&sizes, n, m);
            for c in &s.classes {
                prop_assert!(c.select >= 0 && c.select <= c.size);
                prop_assert!(c.increase_lt >= 0 && c.increase_gt >= 0);
                prop_assert!(c.increase_lt + c.increase_gt <= neg(c.gap));
            }
            prop_assert!(s.total() <= n as i64);
            let dist_lt: i64 = s.classes.iter().map(|c| c.distribute_lt).sum();
            let inc_lt: i64 = s.classes.iter().map(|c| c.increase_lt).sum();
            let dist_gt: i64 = s.classes.iter().map(|c| c.distribute_gt).sum();
            let inc_gt: i64 = s.classes.iter().map(|c| c.increase_gt).sum();
            let (lt, gt) = s.undelivered();
            prop_assert_eq!(dist_lt, inc_lt + lt);
            prop_assert_eq!(dist_gt, inc_gt + gt);
        }

        #[test]
        fn growing_a_class_never_lowers_its_select(
            sizes in prop::collection::vec(0usize..60, 1..6),
            which in 0usize..6,
            extra in 1usize..30,
        ) {
            let which = which % sizes.len();
            prop_assume!(sizes.iter().any(|&s| s > 0));
            let before = run(&sizes, 20, 1).classes[which].select;
            let mut grown = sizes.clone();
            grown[which] += extra;
            let after = run(&grown, 20, 1).classes[which].select;
            prop_assert!(after >= before, "{:?} -> {:?}: {} -> {}", sizes, grown, before, after);
        }
    }
}
