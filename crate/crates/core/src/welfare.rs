//! Comparing allocations: priority matrices, column equivalence, dominance
//! sets, and the dominance-plausible welfare relation.
//!
//! Two allocations are compared by collecting the resources whose columns
//! are not equivalent, splitting them into the side each allocation
//! dominates, and lifting the two dominance sets through the problem's
//! plausibility relation.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Error;
use crate::plausibility::Plausibility;
use crate::problem::{enumerate_allocations, Allocation, Problem};

/// Per-resource agent-versus-agent priority.
///
/// Agent `i` has priority over agent `j` for resource `r` when `i` is at
/// least as high and requests `r`, or when `i` is not at least as high but
/// `j` does not request `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityMatrix {
    resource: usize,
    agents: usize,
    entries: Vec<bool>,
}

impl PriorityMatrix {
    pub fn resource(&self) -> usize {
        self.resource
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    /// Whether agent `i` has priority over agent `j`.
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.agents && j < self.agents, "agent index out of range");
        self.entries[i * self.agents + j]
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.agents)
            .map(|i| (0..self.agents).map(|j| u8::from(self.get(i, j))).collect())
            .collect()
    }
}

/// Priority of agent `i` over agent `j` for resource `r`.
///
/// The two summands of the defining formula are mutually exclusive, so the
/// result is always 0 or 1.
pub fn priority(problem: &Problem, r: usize, i: usize, j: usize) -> bool {
    let h = problem.hierarchy();
    if h.ge(i, j) {
        problem.requests(i, r)
    } else {
        !problem.requests(j, r)
    }
}

/// The full priority matrix for resource `r`.
pub fn priority_matrix(problem: &Problem, r: usize) -> PriorityMatrix {
    assert!(r < problem.resources(), "resource index out of range");
    let q = problem.agents();
    let mut entries = vec![false; q * q];
    for i in 0..q {
        for j in 0..q {
            entries[i * q + j] = priority(problem, r, i, j);
        }
    }
    PriorityMatrix {
        resource: r,
        agents: q,
        entries,
    }
}

/// Whether the columns held by agents `i` and `j` are equivalent for
/// resource `r`: same hierarchy level and same request bit.
pub fn columns_equivalent(problem: &Problem, r: usize, i: usize, j: usize) -> bool {
    assert!(r < problem.resources(), "resource index out of range");
    problem.hierarchy().indifferent(i, j) && problem.requests(i, r) == problem.requests(j, r)
}

/// Resources where the columns of `f` and `g` are not equivalent.
pub fn diff_set(problem: &Problem, f: &Allocation, g: &Allocation) -> BTreeSet<usize> {
    f.check_shape(problem);
    g.check_shape(problem);
    (0..problem.resources())
        .filter(|&r| !columns_equivalent(problem, r, f.holder(r), g.holder(r)))
        .collect()
}

/// Resources of the diff set where `f`'s holder has priority over `g`'s.
pub fn dominance_set(problem: &Problem, f: &Allocation, g: &Allocation) -> BTreeSet<usize> {
    diff_set(problem, f, g)
        .into_iter()
        .filter(|&r| priority(problem, r, f.holder(r), g.holder(r)))
        .collect()
}

/// Outcome of a welfare comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Left produces strictly more welfare.
    LeftStrict,
    /// Right produces strictly more welfare.
    RightStrict,
    /// Each side produces at least as much welfare as the other.
    Mutual,
    /// Neither side produces at least as much welfare as the other
    /// (possible only under a non-total lifting).
    Incomparable,
}

/// Result of comparing two allocations under the dominance-plausible rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominanceReport {
    /// Resources with non-equivalent columns.
    pub diff: BTreeSet<usize>,
    /// Resources where the left allocation dominates.
    pub left_dominates: BTreeSet<usize>,
    /// Resources where the right allocation dominates.
    pub right_dominates: BTreeSet<usize>,
    pub verdict: Verdict,
}

/// Compares two allocations: `left` is at least as good as `right` when the
/// set where it dominates is at least as plausible as the set where it is
/// dominated.
pub fn welfare_compare(problem: &Problem, left: &Allocation, right: &Allocation) -> DominanceReport {
    let diff = diff_set(problem, left, right);
    let left_dominates = dominance_set(problem, left, right);
    let right_dominates = dominance_set(problem, right, left);

    debug_assert!(
        left_dominates
            .union(&right_dominates)
            .copied()
            .collect::<BTreeSet<_>>()
            == diff,
        "dominance sets must partition the diff set"
    );
    debug_assert!(
        left_dominates.is_disjoint(&right_dominates),
        "dominance sets must be disjoint"
    );

    let lifting = problem.lifting();
    let left_ge = lifting.at_least_as_plausible(&left_dominates, &right_dominates);
    let right_ge = lifting.at_least_as_plausible(&right_dominates, &left_dominates);
    let verdict = match (left_ge, right_ge) {
        (true, false) => Verdict::LeftStrict,
        (false, true) => Verdict::RightStrict,
        (true, true) => Verdict::Mutual,
        (false, false) => Verdict::Incomparable,
    };
    DominanceReport {
        diff,
        left_dominates,
        right_dominates,
        verdict,
    }
}

/// Whether `left` produces at least as much welfare as `right`.
pub fn at_least_as_good(problem: &Problem, left: &Allocation, right: &Allocation) -> bool {
    let ours = dominance_set(problem, left, right);
    let theirs = dominance_set(problem, right, left);
    problem.lifting().at_least_as_plausible(&ours, &theirs)
}

/// Definitional optimality: `f` is at least as good as every allocation.
///
/// Enumerates all `q^k` rivals; errs if that exceeds `max_allocations`.
/// The goodness characterization in [`crate::deals::is_good`] answers the
/// same question without enumeration.
pub fn is_optimal_exhaustive(
    problem: &Problem,
    f: &Allocation,
    max_allocations: u64,
) -> Result<bool, Error> {
    f.check_shape(problem);
    let count = crate::problem::allocation_count(problem.agents(), problem.resources());
    if count > max_allocations as u128 {
        return Err(Error::BudgetExceeded {
            required: count,
            budget: max_allocations,
        });
    }
    Ok(enumerate_allocations(problem.agents(), problem.resources())
        .all(|g| at_least_as_good(problem, f, &g)))
}
