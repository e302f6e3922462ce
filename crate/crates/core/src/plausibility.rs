//! Plausibility relations over sets of resources.
//!
//! A lifting compares subsets of the resource universe. The welfare rule only
//! needs the relation to be *positive*: the empty set is at least as
//! plausible as itself, every nonempty set beats the empty set, and the empty
//! set never beats a nonempty one. A lifting of the resource order must in
//! addition agree with it on singletons.
//!
//! Two liftings ship here: counting (`|A| >= |B|`) and the optimistic
//! possibilistic comparison over a base preorder. Both are positive by
//! construction; [`verify_lifting`] is the gate for anything user-supplied.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, LiftingViolation};
use crate::relations::TotalPreorder;

/// Largest universe for the shallow (empty-set and singleton) check.
pub const MAX_SHALLOW_UNIVERSE: usize = 20;
/// Largest universe for the exhaustive all-subset-pairs check.
pub const MAX_EXHAUSTIVE_UNIVERSE: usize = 12;

/// A binary "at least as plausible" relation on subsets of `0..universe`.
pub trait Plausibility {
    fn at_least_as_plausible(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> bool;
}

/// Selector for the two built-in liftings; this is the string key used in
/// problem files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftingKind {
    Cardinality,
    Possibilistic,
}

/// A built-in plausibility lifting over a fixed resource universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lifting {
    /// `A` is at least as plausible as `B` iff `|A| >= |B|`.
    Cardinality { resources: usize },
    /// `A` is at least as plausible as `B` iff some element of `A` is at
    /// least as high as every element of `B` in the base order.
    Possibilistic { base: TotalPreorder },
}

impl Lifting {
    pub fn new(kind: LiftingKind, resource_order: &TotalPreorder) -> Self {
        match kind {
            LiftingKind::Cardinality => Lifting::Cardinality {
                resources: resource_order.size(),
            },
            LiftingKind::Possibilistic => Lifting::Possibilistic {
                base: resource_order.clone(),
            },
        }
    }

    pub fn kind(&self) -> LiftingKind {
        match self {
            Lifting::Cardinality { .. } => LiftingKind::Cardinality,
            Lifting::Possibilistic { .. } => LiftingKind::Possibilistic,
        }
    }

    /// Size of the resource universe the lifting compares subsets of.
    pub fn resources(&self) -> usize {
        match self {
            Lifting::Cardinality { resources } => *resources,
            Lifting::Possibilistic { base } => base.size(),
        }
    }

    /// The base order the lifting extends on singletons, when it has one.
    pub fn base(&self) -> Option<&TotalPreorder> {
        match self {
            Lifting::Cardinality { .. } => None,
            Lifting::Possibilistic { base } => Some(base),
        }
    }

    fn check_universe(&self, set: &BTreeSet<usize>) {
        if let Some(&max) = set.iter().next_back() {
            assert!(
                max < self.resources(),
                "resource {max} outside universe of size {}",
                self.resources()
            );
        }
    }
}

impl Plausibility for Lifting {
    fn at_least_as_plausible(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> bool {
        self.check_universe(a);
        self.check_universe(b);
        match self {
            Lifting::Cardinality { .. } => a.len() >= b.len(),
            Lifting::Possibilistic { base } => {
                // An empty right side is beaten by anything, including the
                // empty set itself; an empty left side beats nothing else.
                b.is_empty() || a.iter().any(|&x| b.iter().all(|&y| base.ge(x, y)))
            }
        }
    }
}

/// How far [`verify_lifting`] searches for a counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckDepth {
    /// Positivity on the empty set and singletons; universe up to
    /// [`MAX_SHALLOW_UNIVERSE`].
    Shallow,
    /// Positivity over every subset pair; universe up to
    /// [`MAX_EXHAUSTIVE_UNIVERSE`].
    Exhaustive,
}

/// Checks positivity of `lifting` over `0..resources`, and, when `base` is
/// given, that singleton comparisons agree with it.
///
/// Returns the first violating pair of subsets, or `None` if the lifting
/// passes. Errs when the universe is too large for the requested depth.
pub fn verify_lifting<P: Plausibility + ?Sized>(
    lifting: &P,
    resources: usize,
    base: Option<&TotalPreorder>,
    depth: CheckDepth,
) -> Result<Option<LiftingViolation>, Error> {
    let max = match depth {
        CheckDepth::Shallow => MAX_SHALLOW_UNIVERSE,
        CheckDepth::Exhaustive => MAX_EXHAUSTIVE_UNIVERSE,
    };
    if resources > max {
        return Err(Error::UniverseTooLarge {
            size: resources,
            max,
        });
    }
    if let Some(base) = base {
        assert_eq!(base.size(), resources, "base order size mismatch");
    }

    let empty = BTreeSet::new();
    if !lifting.at_least_as_plausible(&empty, &empty) {
        return Ok(Some(LiftingViolation {
            law: "positivity: the empty set must be at least as plausible as itself".into(),
            left: empty.clone(),
            right: empty,
        }));
    }

    let subsets: Vec<BTreeSet<usize>> = match depth {
        CheckDepth::Shallow => (0..resources).map(|r| BTreeSet::from([r])).collect(),
        CheckDepth::Exhaustive => (1u64..(1u64 << resources))
            .map(|mask| {
                (0..resources)
                    .filter(|r| mask & (1 << r) != 0)
                    .collect::<BTreeSet<usize>>()
            })
            .collect(),
    };

    for a in &subsets {
        if !lifting.at_least_as_plausible(a, &empty) {
            return Ok(Some(LiftingViolation {
                law: "positivity: a nonempty set must be at least as plausible as the empty set"
                    .into(),
                left: a.clone(),
                right: empty.clone(),
            }));
        }
        if lifting.at_least_as_plausible(&empty, a) {
            return Ok(Some(LiftingViolation {
                law: "positivity: the empty set must not be at least as plausible as a nonempty set"
                    .into(),
                left: empty.clone(),
                right: a.clone(),
            }));
        }
    }

    if let Some(base) = base {
        for x in 0..resources {
            for y in 0..resources {
                let lifted =
                    lifting.at_least_as_plausible(&BTreeSet::from([x]), &BTreeSet::from([y]));
                if lifted != base.ge(x, y) {
                    return Ok(Some(LiftingViolation {
                        law: format!(
                            "singleton extension: {{{x}}} vs {{{y}}} must follow the base order"
                        ),
                        left: BTreeSet::from([x]),
                        right: BTreeSet::from([y]),
                    }));
                }
            }
        }
    }

    Ok(None)
}

impl Lifting {
    /// Runs [`verify_lifting`] on this lifting against its own base.
    pub fn verify(&self, depth: CheckDepth) -> Result<Option<LiftingViolation>, Error> {
        verify_lifting(self, self.resources(), self.base(), depth)
    }
}
