//! Shared fixture: three agents of equal hierarchy and six resources with
//! staircase requests, the worked instance used across the integration
//! tests, together with its named allocations.

use qualloc::plausibility::LiftingKind;
use qualloc::problem::{Allocation, Problem};
use qualloc::relations::TotalPreorder;

pub fn staircase() -> Problem {
    let requests = vec![
        vec![true, true, true, false, false, false],
        vec![true, true, true, true, false, false],
        vec![true, true, true, true, true, false],
    ];
    Problem::new(
        TotalPreorder::all_indifferent(3),
        TotalPreorder::all_indifferent(6),
        requests,
        LiftingKind::Possibilistic,
    )
    .unwrap()
}

pub fn alloc(holders: &[usize]) -> Allocation {
    Allocation::from_holders(3, holders.to_vec()).unwrap()
}

/// Everything to the last agent.
pub fn all_to_last() -> Allocation {
    alloc(&[2, 2, 2, 2, 2, 2])
}

/// Two consecutive resources per agent.
pub fn paired() -> Allocation {
    alloc(&[0, 0, 1, 1, 2, 2])
}

/// Balanced spread; also what the fair construction produces.
pub fn balanced() -> Allocation {
    alloc(&[0, 1, 2, 1, 2, 0])
}

/// Balanced on the first class, leftovers to the middle agent.
pub fn balanced_alt() -> Allocation {
    alloc(&[0, 1, 2, 1, 2, 1])
}

/// `all_to_last` with resource 4 moved to the first agent; not good.
pub fn misplaced() -> Allocation {
    alloc(&[2, 2, 2, 2, 0, 2])
}
