//! Brute-force verification at desk scale.
//!
//! Every quantifier in the library's fast paths ("for every allocation",
//! "for every pair", "for every good allocation") is replayed here by
//! exhaustive enumeration, gated by an explicit budget. Each check compares
//! a definitional computation against the corresponding characterization and
//! reports the first genuine disagreement as a replayable [`Discrepancy`].

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::deals::{is_good, is_rational, to_good};
use crate::error::Error;
use crate::fairness::{
    agents_for_resource, class_variance, dispersion_vector, locally_fair, partition,
    variance_lower_bound,
};
use crate::plausibility::LiftingKind;
use crate::problem::{allocation_count, enumerate_allocations, Allocation, Problem, ProblemSpec};
use crate::relations::TotalPreorder;
use crate::welfare::{at_least_as_good, diff_set, dominance_set};

/// Enumeration and sampling limits for oracle checks.
///
/// `max_allocations` caps `q^k`; it also caps the number of allocation
/// pairs examined by pair-quantified checks, which fall back to uniform
/// seeded sampling above it. `seed` drives all sampling and randomized
/// instance generation, so every check is deterministic given the problem,
/// the seed, and the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleBudget {
    pub max_allocations: u64,
    pub seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_allocations: 1_000_000,
            seed: 0,
        }
    }
}

impl OracleBudget {
    pub fn with_seed(seed: u64) -> Self {
        OracleBudget {
            seed,
            ..OracleBudget::default()
        }
    }
}

/// Which statement a check exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    GoodOptimal,
    Partition,
    Trace,
    Fairness,
}

/// A reproducible counterexample: the instance it occurred on plus the
/// offending allocation(s) as 0/1 matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub kind: CheckKind,
    pub detail: String,
    pub instance: ProblemSpec,
    pub witnesses: Vec<Vec<Vec<u8>>>,
}

/// Outcome of one oracle check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: CheckKind,
    pub passed: bool,
    pub stats: BTreeMap<String, u64>,
    pub discrepancy: Option<Discrepancy>,
}

impl CheckReport {
    fn pass(check: CheckKind, stats: BTreeMap<String, u64>) -> Self {
        CheckReport {
            check,
            passed: true,
            stats,
            discrepancy: None,
        }
    }

    fn fail(check: CheckKind, stats: BTreeMap<String, u64>, discrepancy: Discrepancy) -> Self {
        CheckReport {
            check,
            passed: false,
            stats,
            discrepancy: Some(discrepancy),
        }
    }
}

/// Enumerates every allocation of the problem, or errs when `q^k` exceeds
/// the budget.
pub fn enumerate_within_budget(
    problem: &Problem,
    budget: &OracleBudget,
) -> Result<Vec<Allocation>, Error> {
    let required = allocation_count(problem.agents(), problem.resources());
    if required > budget.max_allocations as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget: budget.max_allocations,
        });
    }
    Ok(enumerate_allocations(problem.agents(), problem.resources()).collect())
}

/// All good allocations of the problem, by enumeration.
pub fn good_set(problem: &Problem, budget: &OracleBudget) -> Result<Vec<Allocation>, Error> {
    Ok(enumerate_within_budget(problem, budget)?
        .into_iter()
        .filter(|f| is_good(problem, f))
        .collect())
}

fn witness(f: &Allocation) -> Vec<Vec<u8>> {
    f.to_matrix()
}

/// Definitional optimality of `f` against the given rivals.
fn beats_all(problem: &Problem, f: &Allocation, rivals: &[Allocation]) -> Option<Allocation> {
    rivals
        .iter()
        .find(|g| !at_least_as_good(problem, f, g))
        .cloned()
}

/// Checks that the good allocations are exactly the optimal ones.
///
/// Optimality is computed from the definition: `f` must produce at least as
/// much welfare as every rival. When the full pair count fits the budget the
/// quantifier is exhaustive; otherwise each allocation is tested against a
/// seeded uniform sample of rivals plus the good allocation reachable from it
/// by negotiation.
pub fn check_good_equals_optimal(
    problem: &Problem,
    budget: &OracleBudget,
) -> Result<CheckReport, Error> {
    let all = enumerate_within_budget(problem, budget)?;
    let n = all.len() as u64;
    let exhaustive = (n as u128) * (n as u128) <= budget.max_allocations as u128;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);

    let mut good_count = 0u64;
    let mut optimal_count = 0u64;
    let mut pairs = 0u64;
    let mut failure: Option<Discrepancy> = None;

    for f in &all {
        let good = is_good(problem, f);
        let refuter = if exhaustive {
            pairs += n;
            beats_all(problem, f, &all)
        } else {
            let per_f = (budget.max_allocations / n.max(1)).max(1) as usize;
            let mut rivals: Vec<Allocation> = (0..per_f)
                .map(|_| all[rng.gen_range(0..all.len())].clone())
                .collect();
            rivals.push(to_good(problem, f).end);
            pairs += rivals.len() as u64;
            beats_all(problem, f, &rivals)
        };
        let optimal = refuter.is_none();
        good_count += u64::from(good);
        optimal_count += u64::from(optimal);
        if good != optimal && failure.is_none() {
            let (detail, witnesses) = match refuter {
                Some(g) => (
                    "good allocation fails to produce at least as much welfare as a rival"
                        .to_string(),
                    vec![witness(f), witness(&g)],
                ),
                None => (
                    "allocation is optimal by enumeration but not good".to_string(),
                    vec![witness(f)],
                ),
            };
            failure = Some(Discrepancy {
                kind: CheckKind::GoodOptimal,
                detail,
                instance: problem.to_spec(),
                witnesses,
            });
        }
    }

    let stats = BTreeMap::from([
        ("allocations".to_string(), n),
        ("good".to_string(), good_count),
        ("optimal".to_string(), optimal_count),
        ("pairs_checked".to_string(), pairs),
        ("exhaustive_pairs".to_string(), u64::from(exhaustive)),
    ]);
    Ok(match failure {
        None => CheckReport::pass(CheckKind::GoodOptimal, stats),
        Some(d) => CheckReport::fail(CheckKind::GoodOptimal, stats, d),
    })
}

/// Checks that for every pair the diff set is the disjoint union of the two
/// dominance sets, and that the diff set is symmetric.
pub fn check_partition_lemma(
    problem: &Problem,
    budget: &OracleBudget,
) -> Result<CheckReport, Error> {
    let all = enumerate_within_budget(problem, budget)?;
    let n = all.len();
    let total_pairs = (n as u128) * (n as u128);
    let cap = budget.max_allocations;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);

    let pair_indices: Vec<(usize, usize)> = if total_pairs <= cap as u128 {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    } else {
        (0..cap)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect()
    };

    let mut checked = 0u64;
    for &(i, j) in &pair_indices {
        let (f, g) = (&all[i], &all[j]);
        let diff = diff_set(problem, f, g);
        let fg = dominance_set(problem, f, g);
        let gf = dominance_set(problem, g, f);
        let union: BTreeSet<usize> = fg.union(&gf).copied().collect();
        let ok = union == diff && fg.is_disjoint(&gf) && diff == diff_set(problem, g, f);
        checked += 1;
        if !ok {
            let stats = BTreeMap::from([
                ("allocations".to_string(), n as u64),
                ("pairs_checked".to_string(), checked),
            ]);
            return Ok(CheckReport::fail(
                CheckKind::Partition,
                stats,
                Discrepancy {
                    kind: CheckKind::Partition,
                    detail: format!(
                        "diff {diff:?} vs dominance sets {fg:?} / {gf:?} break the partition"
                    ),
                    instance: problem.to_spec(),
                    witnesses: vec![witness(f), witness(g)],
                },
            ));
        }
    }

    let stats = BTreeMap::from([
        ("allocations".to_string(), n as u64),
        ("pairs_checked".to_string(), checked),
        (
            "exhaustive_pairs".to_string(),
            u64::from(total_pairs <= cap as u128),
        ),
    ]);
    Ok(CheckReport::pass(CheckKind::Partition, stats))
}

fn bad_columns(problem: &Problem, f: &Allocation) -> Vec<usize> {
    (0..problem.resources())
        .filter(|&r| !crate::deals::in_good_position(problem, f, r))
        .collect()
}

fn trace_stats(starts: u64, steps_total: u64, prefixes: u64) -> BTreeMap<String, u64> {
    BTreeMap::from([
        ("starts".to_string(), starts),
        ("steps_total".to_string(), steps_total),
        ("prefixes_checked".to_string(), prefixes),
    ])
}

/// Runs the negotiation from every start allocation and verifies the trace:
/// one rational step per initially-bad column, a good endpoint, and at every
/// prefix the diff set from the start equals the set where the later
/// allocation dominates the start.
pub fn check_trace_dominance(
    problem: &Problem,
    budget: &OracleBudget,
) -> Result<CheckReport, Error> {
    let all = enumerate_within_budget(problem, budget)?;
    let mut traces = 0u64;
    let mut steps_total = 0u64;
    let mut prefixes = 0u64;

    let fail = |detail: String, witnesses: Vec<Vec<Vec<u8>>>, stats: BTreeMap<String, u64>| {
        Ok(CheckReport::fail(
            CheckKind::Trace,
            stats,
            Discrepancy {
                kind: CheckKind::Trace,
                detail,
                instance: problem.to_spec(),
                witnesses,
            },
        ))
    };

    for start in &all {
        let trace = to_good(problem, start);
        traces += 1;
        steps_total += trace.steps.len() as u64;

        if trace.steps.len() != bad_columns(problem, start).len() {
            return fail(
                format!(
                    "trace has {} steps but the start has {} bad columns",
                    trace.steps.len(),
                    bad_columns(problem, start).len()
                ),
                vec![witness(start)],
                trace_stats(traces, steps_total, prefixes),
            );
        }
        if let Some(step) = trace.steps.iter().find(|d| !is_rational(problem, d)) {
            return fail(
                format!("trace step {step:?} is not rational"),
                vec![witness(start)],
                trace_stats(traces, steps_total, prefixes),
            );
        }
        if !is_good(problem, &trace.end) {
            return fail(
                "trace endpoint is not good".to_string(),
                vec![witness(start), witness(&trace.end)],
                trace_stats(traces, steps_total, prefixes),
            );
        }
        for current in trace.replay().iter().skip(1) {
            prefixes += 1;
            let diff = diff_set(problem, start, current);
            let later_dominates = dominance_set(problem, current, start);
            let start_dominates = dominance_set(problem, start, current);
            if diff != later_dominates || !start_dominates.is_empty() {
                return fail(
                    format!(
                        "prefix breaks trace dominance: diff {diff:?}, later dominates \
                         {later_dominates:?}, start dominates {start_dominates:?}"
                    ),
                    vec![witness(start), witness(current)],
                    trace_stats(traces, steps_total, prefixes),
                );
            }
        }
    }

    Ok(CheckReport::pass(
        CheckKind::Trace,
        trace_stats(traces, steps_total, prefixes),
    ))
}

/// Applies seeded random within-class permutations (columns of each class,
/// and entitled agents of each class) to a good allocation. The result is
/// still good and must have the same dispersion vector.
pub fn permute_within_classes<R: Rng>(
    problem: &Problem,
    f: &Allocation,
    rng: &mut R,
) -> Allocation {
    let mut holder = f.holders().to_vec();
    for class in partition(problem).classes {
        // Shuffle which of the class's columns carries which holder.
        let mut holders: Vec<usize> = class.resources.iter().map(|&s| f.holder(s)).collect();
        holders.shuffle(rng);
        // Relabel holders by a random permutation of the entitled agents.
        let agents: Vec<usize> = class.agents.iter().copied().collect();
        let mut relabeled = agents.clone();
        relabeled.shuffle(rng);
        let relabel = |i: usize| {
            let pos = agents.iter().position(|&a| a == i).expect("holder entitled");
            relabeled[pos]
        };
        for (&s, h) in class.resources.iter().zip(holders) {
            holder[s] = relabel(h);
        }
    }
    Allocation::from_holders(f.agents(), holder).expect("permutation preserves validity")
}

/// Checks the fairness machinery against the enumerated good set:
/// the closed-form entitled-agent sets, the componentwise minimality of the
/// balanced construction, invariance of the dispersion vector under
/// within-class permutations, and the per-class variance lower bound.
pub fn check_fairness(problem: &Problem, budget: &OracleBudget) -> Result<CheckReport, Error> {
    let good = good_set(problem, budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);

    let fail = |detail: String, witnesses: Vec<Vec<Vec<u8>>>, stats: BTreeMap<String, u64>| {
        Ok(CheckReport::fail(
            CheckKind::Fairness,
            stats,
            Discrepancy {
                kind: CheckKind::Fairness,
                detail,
                instance: problem.to_spec(),
                witnesses,
            },
        ))
    };
    let base_stats = |gammas: u64, perms: u64| {
        BTreeMap::from([
            ("good".to_string(), good.len() as u64),
            ("gammas_checked".to_string(), gammas),
            ("permutations_checked".to_string(), perms),
        ])
    };

    // (a) closed form vs the definitional entitled-agent sets.
    for r in 0..problem.resources() {
        let definitional: BTreeSet<usize> = good.iter().map(|f| f.holder(r)).collect();
        let closed = agents_for_resource(problem, r);
        if definitional != closed {
            return fail(
                format!(
                    "entitled agents for resource {r}: closed form {closed:?} vs enumerated \
                     {definitional:?}"
                ),
                vec![],
                base_stats(0, 0),
            );
        }
    }

    // (b) the balanced construction is good and componentwise minimal.
    let fair = locally_fair(problem);
    if !is_good(problem, &fair) {
        return fail(
            "balanced construction is not good".to_string(),
            vec![witness(&fair)],
            base_stats(0, 0),
        );
    }
    let fair_gamma = dispersion_vector(problem, &fair).expect("fair allocation is good");
    let parts = partition(problem);

    let mut gammas = 0u64;
    let mut perms = 0u64;
    for g in &good {
        let gamma = dispersion_vector(problem, g).expect("member of the good set");
        gammas += 1;
        if fair_gamma
            .values
            .iter()
            .zip(&gamma.values)
            .any(|(fv, gv)| fv > gv)
        {
            return fail(
                "balanced construction is not componentwise minimal".to_string(),
                vec![witness(&fair), witness(g)],
                base_stats(gammas, perms),
            );
        }
        // (d) per-class lower bound.
        for (class, value) in parts.classes.iter().zip(&gamma.values) {
            let bound = variance_lower_bound(class.agents.len(), class.resources.len());
            if *value < bound {
                return fail(
                    format!(
                        "class {:?} variance {} is below the bound {}",
                        class.resources, value, bound
                    ),
                    vec![witness(g)],
                    base_stats(gammas, perms),
                );
            }
            debug_assert_eq!(
                *value,
                class_variance(problem, g, class).expect("good allocation"),
            );
        }
        // (c) invariance under within-class permutations.
        let shuffled = permute_within_classes(problem, g, &mut rng);
        perms += 1;
        if !is_good(problem, &shuffled) {
            return fail(
                "within-class permutation broke goodness".to_string(),
                vec![witness(g), witness(&shuffled)],
                base_stats(gammas, perms),
            );
        }
        let shuffled_gamma = dispersion_vector(problem, &shuffled).expect("still good");
        if shuffled_gamma != gamma {
            return fail(
                "dispersion vector changed under a within-class permutation".to_string(),
                vec![witness(g), witness(&shuffled)],
                base_stats(gammas, perms),
            );
        }
    }

    Ok(CheckReport::pass(
        CheckKind::Fairness,
        base_stats(gammas, perms),
    ))
}

/// Runs one check by kind.
pub fn run_check(
    problem: &Problem,
    kind: CheckKind,
    budget: &OracleBudget,
) -> Result<CheckReport, Error> {
    match kind {
        CheckKind::GoodOptimal => check_good_equals_optimal(problem, budget),
        CheckKind::Partition => check_partition_lemma(problem, budget),
        CheckKind::Trace => check_trace_dominance(problem, budget),
        CheckKind::Fairness => check_fairness(problem, budget),
    }
}

/// A random ordered partition of `0..n` into indifference levels.
pub fn random_levels<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    assert!(n > 0, "empty domain");
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let mut levels: Vec<Vec<usize>> = vec![vec![indices[0]]];
    for &i in &indices[1..] {
        if rng.gen_bool(0.5) {
            levels.push(vec![i]);
        } else {
            levels.last_mut().expect("nonempty").push(i);
        }
    }
    levels
}

/// A seeded random instance: random level hierarchies and coin-flip
/// requests. Under the counting lifting the resource order is irrelevant,
/// so it is fixed to universal indifference there.
pub fn random_problem<R: Rng>(
    rng: &mut R,
    agents: usize,
    resources: usize,
    kind: LiftingKind,
) -> Problem {
    let hierarchy = TotalPreorder::from_levels(&random_levels(rng, agents)).expect("partition");
    let resource_order = match kind {
        LiftingKind::Cardinality => TotalPreorder::all_indifferent(resources),
        LiftingKind::Possibilistic => {
            TotalPreorder::from_levels(&random_levels(rng, resources)).expect("partition")
        }
    };
    let requests = (0..agents)
        .map(|_| (0..resources).map(|_| rng.gen_bool(0.5)).collect())
        .collect();
    Problem::new(hierarchy, resource_order, requests, kind).expect("valid by construction")
}
