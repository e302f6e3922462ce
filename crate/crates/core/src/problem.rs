//! Allocation problems and resource allocations.
//!
//! A problem bundles the agent hierarchy, the resource order, the 0/1 request
//! matrix, and the plausibility lifting used to compare sets of resources.
//! An allocation grants each resource to exactly one agent; internally it is
//! stored as the holder of each resource column.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::plausibility::{CheckDepth, Lifting, LiftingKind};
use crate::relations::TotalPreorder;

/// An allocation problem instance over `q` agents and `k` resources.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    hierarchy: TotalPreorder,
    resource_order: TotalPreorder,
    requests: Vec<bool>,
    lifting: Lifting,
}

impl Problem {
    /// Builds a problem, validating shapes and the lifting.
    ///
    /// `requests` must be `q x k` with `q = hierarchy.size()` and
    /// `k = resource_order.size()`. The lifting is verified positive (and,
    /// for the possibilistic kind, a singleton extension of the resource
    /// order) at shallow depth.
    pub fn new(
        hierarchy: TotalPreorder,
        resource_order: TotalPreorder,
        requests: Vec<Vec<bool>>,
        lifting_kind: LiftingKind,
    ) -> Result<Self, Error> {
        let q = hierarchy.size();
        let k = resource_order.size();
        if requests.len() != q {
            return Err(Error::ShapeMismatch {
                expected_rows: q,
                expected_cols: k,
                rows: requests.len(),
                cols: requests.first().map_or(0, Vec::len),
            });
        }
        for (row, r) in requests.iter().enumerate() {
            if r.len() != k {
                return Err(Error::RaggedMatrix {
                    row,
                    cols: r.len(),
                    expected: k,
                });
            }
        }
        let lifting = Lifting::new(lifting_kind, &resource_order);
        if let Some(violation) = lifting.verify(CheckDepth::Shallow)? {
            return Err(Error::Lifting(violation));
        }
        let mut flat = vec![false; q * k];
        for (i, row) in requests.iter().enumerate() {
            for (r, &v) in row.iter().enumerate() {
                flat[i * k + r] = v;
            }
        }
        Ok(Problem {
            hierarchy,
            resource_order,
            requests: flat,
            lifting,
        })
    }

    /// Number of agents.
    pub fn agents(&self) -> usize {
        self.hierarchy.size()
    }

    /// Number of resources.
    pub fn resources(&self) -> usize {
        self.resource_order.size()
    }

    pub fn hierarchy(&self) -> &TotalPreorder {
        &self.hierarchy
    }

    pub fn resource_order(&self) -> &TotalPreorder {
        &self.resource_order
    }

    pub fn lifting(&self) -> &Lifting {
        &self.lifting
    }

    /// Whether agent `i` requests resource `r`.
    pub fn requests(&self, i: usize, r: usize) -> bool {
        assert!(i < self.agents(), "agent index out of range");
        assert!(r < self.resources(), "resource index out of range");
        self.requests[i * self.resources() + r]
    }

    /// Agents that request resource `r`, ascending.
    pub fn requesters(&self, r: usize) -> Vec<usize> {
        (0..self.agents()).filter(|&i| self.requests(i, r)).collect()
    }

    /// The agents at the bottom of the hierarchy.
    pub fn minimal_agents(&self) -> std::collections::BTreeSet<usize> {
        let everyone: Vec<usize> = (0..self.agents()).collect();
        self.hierarchy.min_set(&everyone)
    }

    /// Plain serializable form (matrices and lifting kind, no names).
    pub fn to_spec(&self) -> ProblemSpec {
        ProblemSpec {
            hierarchy: self.hierarchy.to_matrix(),
            resource_order: self.resource_order.to_matrix(),
            requests: (0..self.agents())
                .map(|i| {
                    (0..self.resources())
                        .map(|r| u8::from(self.requests(i, r)))
                        .collect()
                })
                .collect(),
            lifting: self.lifting.kind(),
        }
    }

    pub fn from_spec(spec: &ProblemSpec) -> Result<Self, Error> {
        let hierarchy = TotalPreorder::from_matrix(&binary_matrix(&spec.hierarchy)?)?;
        let resource_order = TotalPreorder::from_matrix(&binary_matrix(&spec.resource_order)?)?;
        let requests = binary_matrix(&spec.requests)?;
        Problem::new(hierarchy, resource_order, requests, spec.lifting)
    }
}

/// Nameless, serializable mirror of a [`Problem`]; used to embed instances in
/// oracle reports so a discrepancy can be replayed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub hierarchy: Vec<Vec<u8>>,
    pub resource_order: Vec<Vec<u8>>,
    pub requests: Vec<Vec<u8>>,
    pub lifting: LiftingKind,
}

/// Converts a 0/1 integer matrix to booleans, rejecting other entries.
pub(crate) fn binary_matrix(rows: &[Vec<u8>]) -> Result<Vec<Vec<bool>>, Error> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::NonBinaryEntry {
                        row: i,
                        col: j,
                        value: other as i64,
                    }),
                })
                .collect()
        })
        .collect()
}

/// A resource allocation: each resource column holds exactly one 1.
///
/// Stored as the holding agent per resource.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    agents: usize,
    holder: Vec<usize>,
}

impl Allocation {
    /// Builds an allocation from the holder of each resource.
    pub fn from_holders(agents: usize, holder: Vec<usize>) -> Result<Self, Error> {
        if agents == 0 || holder.is_empty() {
            return Err(Error::EmptyDomain);
        }
        for (column, &i) in holder.iter().enumerate() {
            if i >= agents {
                return Err(Error::BadAllocationColumn { column, ones: 0 });
            }
        }
        Ok(Allocation { agents, holder })
    }

    /// Validates a `q x k` 0/1 matrix with exactly one 1 per column.
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self, Error> {
        let bools = binary_matrix(rows)?;
        let agents = bools.len();
        if agents == 0 {
            return Err(Error::EmptyDomain);
        }
        let k = bools[0].len();
        for (row, r) in bools.iter().enumerate() {
            if r.len() != k {
                return Err(Error::RaggedMatrix {
                    row,
                    cols: r.len(),
                    expected: k,
                });
            }
        }
        if k == 0 {
            return Err(Error::EmptyDomain);
        }
        let mut counts = vec![0usize; k];
        let mut holder = vec![0usize; k];
        for (i, row) in bools.iter().enumerate() {
            for (column, &set) in row.iter().enumerate() {
                if set {
                    counts[column] += 1;
                    holder[column] = i;
                }
            }
        }
        if let Some((column, &ones)) = counts.iter().enumerate().find(|(_, &c)| c != 1) {
            return Err(Error::BadAllocationColumn { column, ones });
        }
        Ok(Allocation { agents, holder })
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn resources(&self) -> usize {
        self.holder.len()
    }

    /// The agent holding resource `r`.
    pub fn holder(&self, r: usize) -> usize {
        assert!(r < self.resources(), "resource index out of range");
        self.holder[r]
    }

    pub fn holders(&self) -> &[usize] {
        &self.holder
    }

    /// Returns a copy with resource `r` reassigned to `agent`.
    pub fn with_holder(&self, r: usize, agent: usize) -> Self {
        assert!(r < self.resources(), "resource index out of range");
        assert!(agent < self.agents, "agent index out of range");
        let mut holder = self.holder.clone();
        holder[r] = agent;
        Allocation {
            agents: self.agents,
            holder,
        }
    }

    /// The allocation as a `q x k` 0/1 matrix.
    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.agents)
            .map(|i| {
                self.holder
                    .iter()
                    .map(|&h| u8::from(h == i))
                    .collect()
            })
            .collect()
    }

    /// Asserts the allocation matches the problem's shape.
    pub fn check_shape(&self, problem: &Problem) {
        assert_eq!(self.agents, problem.agents(), "agent count mismatch");
        assert_eq!(
            self.resources(),
            problem.resources(),
            "resource count mismatch"
        );
    }
}

/// Iterator over all `q^k` allocations in lexicographic holder order
/// (resource 0 is the most significant digit, the last resource ticks
/// fastest).
#[derive(Debug, Clone)]
pub struct Allocations {
    agents: usize,
    next: Option<Vec<usize>>,
}

/// Enumerates every allocation of `k` resources to `q` agents.
pub fn enumerate_allocations(agents: usize, resources: usize) -> Allocations {
    assert!(agents > 0 && resources > 0, "empty domain");
    Allocations {
        agents,
        next: Some(vec![0; resources]),
    }
}

/// `q^k` as a u128, the number of allocations to enumerate.
pub fn allocation_count(agents: usize, resources: usize) -> u128 {
    (agents as u128).pow(resources as u32)
}

impl Iterator for Allocations {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        let current = self.next.take()?;
        let item = Allocation {
            agents: self.agents,
            holder: current.clone(),
        };
        let mut bumped = current;
        for digit in bumped.iter_mut().rev() {
            *digit += 1;
            if *digit < self.agents {
                self.next = Some(bumped);
                return Some(item);
            }
            *digit = 0;
        }
        // Wrapped around: enumeration is complete.
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn allocation_from_matrix_round_trip() {
        let rows = vec![vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]];
        let a = Allocation::from_matrix(&rows).unwrap();
        assert_eq!(a.holders(), &[0, 2, 1]);
        assert_eq!(a.to_matrix(), rows);
    }

    #[test]
    fn column_with_two_ones_rejected() {
        let rows = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(
            Allocation::from_matrix(&rows).unwrap_err(),
            Error::BadAllocationColumn { column: 1, ones: 2 }
        );
    }

    #[test]
    fn column_with_no_one_rejected() {
        let rows = vec![vec![1, 0], vec![0, 0]];
        assert_eq!(
            Allocation::from_matrix(&rows).unwrap_err(),
            Error::BadAllocationColumn { column: 1, ones: 0 }
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_allocations(2, 2).count(), 4);
        assert_eq!(enumerate_allocations(3, 6).count(), 729);
        assert_eq!(enumerate_allocations(1, 5).count(), 1);
    }

    #[test]
    fn enumeration_is_distinct_and_valid() {
        let all: BTreeSet<Vec<usize>> = enumerate_allocations(3, 3)
            .map(|a| a.holders().to_vec())
            .collect();
        assert_eq!(all.len(), 27);
        for holders in &all {
            assert!(holders.iter().all(|&h| h < 3));
        }
    }

    #[test]
    fn problem_shape_validation() {
        let h = TotalPreorder::all_indifferent(2);
        let r = TotalPreorder::all_indifferent(3);
        let bad = Problem::new(
            h.clone(),
            r.clone(),
            vec![vec![true, false, true]],
            LiftingKind::Cardinality,
        );
        assert!(matches!(bad, Err(Error::ShapeMismatch { .. })));

        let good = Problem::new(
            h,
            r,
            vec![vec![true, false, true], vec![false, false, false]],
            LiftingKind::Cardinality,
        )
        .unwrap();
        assert_eq!(good.agents(), 2);
        assert_eq!(good.resources(), 3);
        assert_eq!(good.requesters(0), vec![0]);
        assert_eq!(good.requesters(1), Vec::<usize>::new());
    }

    #[test]
    fn spec_round_trip() {
        let p = Problem::new(
            TotalPreorder::from_levels(&[vec![1], vec![0]]).unwrap(),
            TotalPreorder::all_indifferent(2),
            vec![vec![true, true], vec![false, true]],
            LiftingKind::Possibilistic,
        )
        .unwrap();
        let spec = p.to_spec();
        let q = Problem::from_spec(&spec).unwrap();
        assert_eq!(p, q);
    }
}
