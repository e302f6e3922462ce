//! Discriminating good allocations by how evenly each class of resources is
//! spread over the agents entitled to it.
//!
//! Resources are grouped by the set of agents that can hold them in a good
//! allocation. For each class, the per-agent resource counts of a good
//! allocation have a fixed mean; the class variance measures how far the
//! allocation strays from it. The vector of class variances orders good
//! allocations componentwise, and a balanced round-robin construction
//! attains the minimum in every component at once.
//!
//! All arithmetic is exact rational; nothing here touches floating point.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::Serialize;

use crate::deals::is_good;
use crate::error::Error;
use crate::problem::{Allocation, Problem};

/// Exact rational used for means, variances, and dispersion vectors.
pub type Rational = Ratio<i64>;

/// Agents that can hold resource `r` in some good allocation.
///
/// Closed form: the highest requesters of `r`, or the bottom agents when
/// nobody requests it.
pub fn agents_for_resource(problem: &Problem, r: usize) -> BTreeSet<usize> {
    assert!(r < problem.resources(), "resource index out of range");
    let requesters = problem.requesters(r);
    if requesters.is_empty() {
        problem.minimal_agents()
    } else {
        problem.hierarchy().max_set(&requesters)
    }
}

/// One class of resources sharing the same entitled-agent set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceClass {
    /// Resources in the class, ascending.
    pub resources: Vec<usize>,
    /// The shared entitled-agent set.
    pub agents: BTreeSet<usize>,
    /// Whether this is the class of resources nobody requests.
    pub unrequested: bool,
}

impl ResourceClass {
    /// Lowest resource index in the class.
    pub fn representative(&self) -> usize {
        self.resources[0]
    }
}

/// The partition of the resources into classes, requested classes first in
/// order of least resource index, the unrequested class last when nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassPartition {
    pub classes: Vec<ResourceClass>,
}

pub fn partition(problem: &Problem) -> ClassPartition {
    let k = problem.resources();
    let mut classes: Vec<ResourceClass> = Vec::new();
    let mut unrequested_resources = Vec::new();
    for r in 0..k {
        if problem.requesters(r).is_empty() {
            unrequested_resources.push(r);
            continue;
        }
        let agents = agents_for_resource(problem, r);
        match classes.iter_mut().find(|c| c.agents == agents) {
            Some(class) => class.resources.push(r),
            None => classes.push(ResourceClass {
                resources: vec![r],
                agents,
                unrequested: false,
            }),
        }
    }
    if !unrequested_resources.is_empty() {
        classes.push(ResourceClass {
            resources: unrequested_resources,
            agents: problem.minimal_agents(),
            unrequested: true,
        });
    }
    ClassPartition { classes }
}

/// Mean per-agent resource count of a class; the same for every good
/// allocation.
pub fn class_mean(class: &ResourceClass) -> Rational {
    Rational::new(class.resources.len() as i64, class.agents.len() as i64)
}

fn row_sums(f: &Allocation, class: &ResourceClass) -> Vec<i64> {
    class
        .agents
        .iter()
        .map(|&i| {
            class
                .resources
                .iter()
                .filter(|&&s| f.holder(s) == i)
                .count() as i64
        })
        .collect()
}

fn variance_of_counts(counts: &[i64], mean: Rational) -> Rational {
    let n = counts.len() as i64;
    let sum: Rational = counts
        .iter()
        .map(|&x| {
            let d = Rational::from_integer(x) - mean;
            d * d
        })
        .sum();
    sum / Rational::from_integer(n)
}

/// Variance of per-agent counts of `f` over one class.
///
/// Defined only on good allocations; errs otherwise, naming a bad column.
pub fn class_variance(
    problem: &Problem,
    f: &Allocation,
    class: &ResourceClass,
) -> Result<Rational, Error> {
    ensure_good(problem, f)?;
    Ok(variance_of_counts(&row_sums(f, class), class_mean(class)))
}

fn ensure_good(problem: &Problem, f: &Allocation) -> Result<(), Error> {
    f.check_shape(problem);
    for r in 0..problem.resources() {
        if !crate::deals::in_good_position(problem, f, r) {
            return Err(Error::NotGood { column: r });
        }
    }
    Ok(())
}

/// The per-class variances of a good allocation, in partition order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispersionVector {
    pub values: Vec<Rational>,
}

impl DispersionVector {
    /// Values rendered as exact fraction strings ("2/9", "1/4", "0").
    pub fn to_strings(&self) -> Vec<String> {
        self.values.iter().map(Rational::to_string).collect()
    }
}

pub fn dispersion_vector(problem: &Problem, f: &Allocation) -> Result<DispersionVector, Error> {
    ensure_good(problem, f)?;
    let values = partition(problem)
        .classes
        .iter()
        .map(|class| variance_of_counts(&row_sums(f, class), class_mean(class)))
        .collect();
    Ok(DispersionVector { values })
}

/// Componentwise comparison of two dispersion vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalSatisfaction {
    /// Same variance in every class.
    Equal,
    /// Left is at most right everywhere and strictly below somewhere.
    LeftBetter,
    /// Right is at most left everywhere and strictly below somewhere.
    RightBetter,
    /// Each side is strictly better in some class.
    Incomparable,
}

/// Compares the local satisfaction of two good allocations.
pub fn local_compare(
    problem: &Problem,
    left: &Allocation,
    right: &Allocation,
) -> Result<LocalSatisfaction, Error> {
    let l = dispersion_vector(problem, left)?;
    let r = dispersion_vector(problem, right)?;
    let left_le = l.values.iter().zip(&r.values).all(|(a, b)| a <= b);
    let right_le = l.values.iter().zip(&r.values).all(|(a, b)| b <= a);
    Ok(match (left_le, right_le) {
        (true, true) => LocalSatisfaction::Equal,
        (true, false) => LocalSatisfaction::LeftBetter,
        (false, true) => LocalSatisfaction::RightBetter,
        (false, false) => LocalSatisfaction::Incomparable,
    })
}

/// Minimum variance of `n` nonnegative integers summing to `total`:
/// `(n - b) * b / n^2` where `b = total mod n`, attained exactly by the
/// balanced splits.
pub fn variance_lower_bound(n: usize, total: usize) -> Rational {
    assert!(n >= 1, "class must have at least one agent");
    let n = n as i64;
    let b = (total as i64) % n;
    Rational::new((n - b) * b, n * n)
}

/// Builds a good allocation whose dispersion vector is componentwise minimal
/// over all good allocations.
///
/// Within each class, resources are dealt in ascending index, round-robin
/// over the entitled agents in ascending index; the leftover resources land
/// on the lowest-index agents.
pub fn locally_fair(problem: &Problem) -> Allocation {
    let mut holder = vec![0usize; problem.resources()];
    for class in partition(problem).classes {
        let agents: Vec<usize> = class.agents.iter().copied().collect();
        for (t, &s) in class.resources.iter().enumerate() {
            holder[s] = agents[t % agents.len()];
        }
    }
    let f = Allocation::from_holders(problem.agents(), holder).expect("valid by construction");
    debug_assert!(is_good(problem, &f));
    f
}
