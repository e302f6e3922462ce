//! Simple and rational deals, good positions, and the negotiation loop that
//! turns any allocation into a good one.
//!
//! A simple deal moves one resource between two agents. A deal is rational
//! when the receiver is at least as high as the giver and requests the
//! resource, or the giver is at least as high as the receiver and nobody at
//! or above the giver requests it. Rationality depends only on the hierarchy
//! and the request matrix, not on the rest of the allocation.

use serde::Serialize;

use crate::error::Error;
use crate::problem::{Allocation, Problem};
use crate::relations::Permutation;

/// One resource changing hands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Deal {
    pub resource: usize,
    pub from_agent: usize,
    pub to_agent: usize,
}

impl Deal {
    /// The swap permutation representing this deal on columns of height `q`.
    pub fn permutation(&self, agents: usize) -> Permutation {
        Permutation::new(agents, self.from_agent, self.to_agent)
    }

    /// Applies the deal to an allocation holding `resource` at `from_agent`.
    pub fn apply(&self, f: &Allocation) -> Allocation {
        assert_eq!(
            f.holder(self.resource),
            self.from_agent,
            "allocation does not hold the resource at the deal's giver"
        );
        f.with_holder(self.resource, self.to_agent)
    }
}

/// Recognizes `(f, g)` as a simple deal: the unique resource, giver, and
/// receiver if the two allocations differ in exactly one column.
///
/// Returns `None` when `f == g` or when more than one column differs.
pub fn as_simple_deal(f: &Allocation, g: &Allocation) -> Option<Deal> {
    assert_eq!(f.agents(), g.agents(), "agent count mismatch");
    assert_eq!(f.resources(), g.resources(), "resource count mismatch");
    let mut found = None;
    for r in 0..f.resources() {
        if f.holder(r) != g.holder(r) {
            if found.is_some() {
                return None;
            }
            found = Some(Deal {
                resource: r,
                from_agent: f.holder(r),
                to_agent: g.holder(r),
            });
        }
    }
    found
}

/// Whether a simple deal is rational.
///
/// Either the receiver is at least as high as the giver and requests the
/// resource, or the giver is at least as high as the receiver and no agent
/// at or above the giver requests it. A degenerate deal (`from == to`) is
/// not a deal at all and is never rational.
pub fn is_rational(problem: &Problem, deal: &Deal) -> bool {
    let q = problem.agents();
    let (r, i, j) = (deal.resource, deal.from_agent, deal.to_agent);
    assert!(r < problem.resources(), "resource index out of range");
    assert!(i < q && j < q, "agent index out of range");
    if i == j {
        return false;
    }
    let h = problem.hierarchy();
    let receiver_claims = h.ge(j, i) && problem.requests(j, r);
    let giver_discards =
        h.ge(i, j) && (0..q).all(|t| !h.ge(t, i) || !problem.requests(t, r));
    receiver_claims || giver_discards
}

/// Composes two deals on the same resource where the first receiver is the
/// second giver. If both are rational, so is the composite.
pub fn compose(first: &Deal, second: &Deal) -> Result<Deal, Error> {
    if first.resource != second.resource {
        return Err(Error::ComposeMismatch {
            detail: format!(
                "resources differ: {} vs {}",
                first.resource, second.resource
            ),
        });
    }
    if first.to_agent != second.from_agent {
        return Err(Error::ComposeMismatch {
            detail: format!(
                "agent chain broken: first ends at {}, second starts at {}",
                first.to_agent, second.from_agent
            ),
        });
    }
    Ok(Deal {
        resource: first.resource,
        from_agent: first.from_agent,
        to_agent: second.to_agent,
    })
}

/// Whether the column of resource `r` is in good position under `f`.
///
/// The holder either requests `r` with no strictly-higher requester, or
/// nobody requests `r` and the holder sits at the bottom of the hierarchy.
pub fn in_good_position(problem: &Problem, f: &Allocation, r: usize) -> bool {
    f.check_shape(problem);
    assert!(r < problem.resources(), "resource index out of range");
    let i = f.holder(r);
    let h = problem.hierarchy();
    let q = problem.agents();

    let top_requester = problem.requests(i, r)
        && (0..q).all(|t| !h.strict(t, i) || !problem.requests(t, r));
    if top_requester {
        return true;
    }
    let unrequested = (0..q).all(|t| !problem.requests(t, r));
    unrequested && problem.minimal_agents().contains(&i)
}

/// Whether every column of `f` is in good position.
pub fn is_good(problem: &Problem, f: &Allocation) -> bool {
    (0..problem.resources()).all(|r| in_good_position(problem, f, r))
}

/// Repairs a column not in good position with a single rational deal.
///
/// The resource moves to the highest other requester, or to a bottom agent
/// when nobody requests it; ties break to the lowest agent index. Errs when
/// the column is already in good position.
pub fn repair_column(
    problem: &Problem,
    f: &Allocation,
    r: usize,
) -> Result<(Allocation, Deal), Error> {
    if in_good_position(problem, f, r) {
        return Err(Error::ColumnAlreadyGood { column: r });
    }
    let i = f.holder(r);
    let other_requesters: Vec<usize> = problem
        .requesters(r)
        .into_iter()
        .filter(|&t| t != i)
        .collect();
    let j = if other_requesters.is_empty() {
        *problem.minimal_agents().iter().next().expect("nonempty")
    } else {
        *problem
            .hierarchy()
            .max_set(&other_requesters)
            .iter()
            .next()
            .expect("nonempty")
    };
    let deal = Deal {
        resource: r,
        from_agent: i,
        to_agent: j,
    };
    let repaired = deal.apply(f);
    debug_assert!(in_good_position(problem, &repaired, r));
    debug_assert!(is_rational(problem, &deal));
    Ok((repaired, deal))
}

/// A negotiation from a start allocation to a good one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DealTrace {
    pub start: Allocation,
    pub steps: Vec<Deal>,
    pub end: Allocation,
}

impl DealTrace {
    /// The allocations visited, starting at `start`; one entry per prefix.
    pub fn replay(&self) -> Vec<Allocation> {
        let mut out = vec![self.start.clone()];
        let mut current = self.start.clone();
        for deal in &self.steps {
            current = deal.apply(&current);
            out.push(current.clone());
        }
        debug_assert_eq!(out.last(), Some(&self.end));
        out
    }
}

/// Repairs every bad column in ascending resource order.
///
/// The result is good, each step is a rational deal, and there is exactly
/// one step per column of `start` not in good position.
pub fn to_good(problem: &Problem, start: &Allocation) -> DealTrace {
    start.check_shape(problem);
    let mut current = start.clone();
    let mut steps = Vec::new();
    for r in 0..problem.resources() {
        if in_good_position(problem, &current, r) {
            continue;
        }
        let (next, deal) =
            repair_column(problem, &current, r).expect("column checked not good");
        current = next;
        steps.push(deal);
    }
    debug_assert!(is_good(problem, &current));
    DealTrace {
        start: start.clone(),
        steps,
        end: current,
    }
}
