//! Property-based sweeps over random instances: every structural law the
//! fast paths rely on is rechecked here on arbitrary small problems.

use std::collections::BTreeSet;

use proptest::collection::vec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qualloc::deals::{
    as_simple_deal, compose, in_good_position, is_good, is_rational, to_good, Deal,
};
use qualloc::fairness::{
    dispersion_vector, locally_fair, partition, variance_lower_bound,
};
use qualloc::oracle::{good_set, permute_within_classes, OracleBudget};
use qualloc::plausibility::{verify_lifting, CheckDepth, Lifting, LiftingKind};
use qualloc::problem::{Allocation, Problem};
use qualloc::relations::{Permutation, TotalPreorder};
use qualloc::welfare::{columns_equivalent, diff_set, dominance_set, welfare_compare, Verdict};

fn preorder_from_ranks(ranks: &[usize]) -> TotalPreorder {
    let mut distinct = ranks.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let levels: Vec<Vec<usize>> = distinct
        .iter()
        .map(|&d| (0..ranks.len()).filter(|&i| ranks[i] == d).collect())
        .collect();
    TotalPreorder::from_levels(&levels).unwrap()
}

fn arb_preorder(max: usize) -> impl Strategy<Value = TotalPreorder> {
    (1..=max).prop_flat_map(|n| vec(0..n, n).prop_map(|ranks| preorder_from_ranks(&ranks)))
}

fn arb_problem(max_q: usize, max_k: usize) -> impl Strategy<Value = Problem> {
    (1..=max_q, 1..=max_k).prop_flat_map(|(q, k)| {
        (
            vec(0..q, q),
            vec(0..k, k),
            vec(any::<bool>(), q * k),
            prop_oneof![
                Just(LiftingKind::Cardinality),
                Just(LiftingKind::Possibilistic)
            ],
        )
            .prop_map(move |(agent_ranks, resource_ranks, bits, kind)| {
                let hierarchy = preorder_from_ranks(&agent_ranks);
                let resource_order = match kind {
                    LiftingKind::Cardinality => TotalPreorder::all_indifferent(k),
                    LiftingKind::Possibilistic => preorder_from_ranks(&resource_ranks),
                };
                let requests = (0..q)
                    .map(|i| bits[i * k..(i + 1) * k].to_vec())
                    .collect();
                Problem::new(hierarchy, resource_order, requests, kind).unwrap()
            })
    })
}

fn arb_problem_with_allocations(
    max_q: usize,
    max_k: usize,
) -> impl Strategy<Value = (Problem, Allocation, Allocation)> {
    arb_problem(max_q, max_k).prop_flat_map(|p| {
        let q = p.agents();
        let k = p.resources();
        (
            Just(p),
            vec(0..q, k).prop_map(move |h| Allocation::from_holders(q, h).unwrap()),
            vec(0..q, k).prop_map(move |h| Allocation::from_holders(q, h).unwrap()),
        )
    })
}

proptest! {
    // The diff set splits exactly into the two dominance sets.
    #[test]
    fn dominance_sets_partition_the_diff((p, f, g) in arb_problem_with_allocations(3, 4)) {
        let diff = diff_set(&p, &f, &g);
        let fg = dominance_set(&p, &f, &g);
        let gf = dominance_set(&p, &g, &f);
        prop_assert_eq!(diff.clone(), fg.union(&gf).copied().collect());
        prop_assert!(fg.is_disjoint(&gf));
        prop_assert_eq!(diff, diff_set(&p, &g, &f));
    }

    #[test]
    fn self_comparison_is_mutual((p, f, _) in arb_problem_with_allocations(3, 4)) {
        prop_assert_eq!(welfare_compare(&p, &f, &f).verdict, Verdict::Mutual);
    }

    // Negotiation: one rational step per bad column, a good endpoint, and
    // at every prefix the diff from the start is exactly where the later
    // allocation dominates it.
    #[test]
    fn negotiation_traces_are_sound((p, f, _) in arb_problem_with_allocations(3, 4)) {
        let bad = (0..p.resources())
            .filter(|&r| !in_good_position(&p, &f, r))
            .count();
        let trace = to_good(&p, &f);
        prop_assert_eq!(trace.steps.len(), bad);
        prop_assert!(trace.steps.iter().all(|d| is_rational(&p, d)));
        prop_assert!(is_good(&p, &trace.end));
        for current in trace.replay().iter().skip(1) {
            prop_assert_eq!(diff_set(&p, &f, current), dominance_set(&p, current, &f));
            prop_assert!(dominance_set(&p, &f, current).is_empty());
        }
    }

    // Relabeling two agents of the same hierarchy level (rows of the
    // request matrix plus holders) cannot change a comparison verdict.
    #[test]
    fn verdicts_survive_indifferent_relabeling((p, f, g) in arb_problem_with_allocations(3, 4)) {
        let pair = (0..p.agents())
            .flat_map(|a| (0..p.agents()).map(move |b| (a, b)))
            .find(|&(a, b)| a < b && p.hierarchy().indifferent(a, b));
        prop_assume!(pair.is_some());
        let (a, b) = pair.unwrap();

        let swap = |i: usize| if i == a { b } else if i == b { a } else { i };
        let requests = (0..p.agents())
            .map(|i| (0..p.resources()).map(|r| p.requests(swap(i), r)).collect())
            .collect();
        // Indifferent agents have identical relation rows and columns, so
        // the hierarchy matrix is unchanged by the relabeling.
        let relabeled = Problem::new(
            p.hierarchy().clone(),
            p.resource_order().clone(),
            requests,
            p.lifting().kind(),
        )
        .unwrap();
        let map = |x: &Allocation| {
            Allocation::from_holders(
                x.agents(),
                x.holders().iter().map(|&h| swap(h)).collect(),
            )
            .unwrap()
        };
        prop_assert_eq!(
            welfare_compare(&p, &f, &g).verdict,
            welfare_compare(&relabeled, &map(&f), &map(&g)).verdict
        );
    }

    // A simple deal that lands a non-equivalent column in good position is
    // rational.
    #[test]
    fn good_landing_implies_rational((p, f, _) in arb_problem_with_allocations(3, 4)) {
        for r in 0..p.resources() {
            let i = f.holder(r);
            for j in (0..p.agents()).filter(|&j| j != i) {
                let g = f.with_holder(r, j);
                let deal = as_simple_deal(&f, &g).unwrap();
                if in_good_position(&p, &g, r) && !columns_equivalent(&p, r, i, j) {
                    prop_assert!(is_rational(&p, &deal));
                }
            }
        }
    }

    // A rational deal leaving a column already in good position can only
    // move it to an equivalent column.
    #[test]
    fn good_columns_only_trade_equivalently((p, f, _) in arb_problem_with_allocations(3, 4)) {
        for r in (0..p.resources()).filter(|&r| in_good_position(&p, &f, r)) {
            let i = f.holder(r);
            for j in (0..p.agents()).filter(|&j| j != i) {
                let deal = Deal { resource: r, from_agent: i, to_agent: j };
                if is_rational(&p, &deal) {
                    prop_assert!(columns_equivalent(&p, r, i, j));
                }
            }
        }
    }

    // Chains of rational deals on one resource compose to the endpoint deal.
    #[test]
    fn rational_chains_fold_to_the_endpoint(
        (p, f, _) in arb_problem_with_allocations(3, 4),
        raw_resource in any::<usize>(),
        picks in vec(any::<usize>(), 2..5),
    ) {
        let r = raw_resource % p.resources();
        let mut chain = Vec::new();
        let mut current = f.clone();
        for pick in picks {
            let holder = current.holder(r);
            let successors: Vec<usize> = (0..p.agents())
                .filter(|&j| j != holder && is_rational(&p, &Deal {
                    resource: r,
                    from_agent: holder,
                    to_agent: j,
                }))
                .collect();
            if successors.is_empty() {
                break;
            }
            let j = successors[pick % successors.len()];
            let deal = Deal { resource: r, from_agent: holder, to_agent: j };
            current = deal.apply(&current);
            chain.push(deal);
        }
        if chain.len() >= 2 {
            let folded = chain[1..]
                .iter()
                .try_fold(chain[0], |acc, next| compose(&acc, next))
                .unwrap();
            prop_assert_eq!(
                as_simple_deal(&f, &current),
                (folded.from_agent != folded.to_agent).then_some(folded)
            );
            if folded.from_agent != folded.to_agent {
                prop_assert!(is_rational(&p, &folded));
            }
        }
    }

    // The dispersion vector is blind to within-class shuffles.
    #[test]
    fn dispersion_ignores_within_class_permutations(
        (p, f, _) in arb_problem_with_allocations(3, 4),
        seed in any::<u64>(),
    ) {
        let good = to_good(&p, &f).end;
        let gamma = dispersion_vector(&p, &good).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shuffled = permute_within_classes(&p, &good, &mut rng);
        prop_assert!(is_good(&p, &shuffled));
        prop_assert_eq!(dispersion_vector(&p, &shuffled).unwrap(), gamma);
    }

    // The balanced construction is good, meets the per-class bound exactly,
    // and no good allocation beats it in any component.
    #[test]
    fn fair_construction_is_componentwise_minimal(p in arb_problem(3, 4)) {
        let fair = locally_fair(&p);
        prop_assert!(is_good(&p, &fair));
        let gamma = dispersion_vector(&p, &fair).unwrap();
        for (class, value) in partition(&p).classes.iter().zip(&gamma.values) {
            prop_assert_eq!(
                *value,
                variance_lower_bound(class.agents.len(), class.resources.len())
            );
        }
        for g in good_set(&p, &OracleBudget::default()).unwrap() {
            let other = dispersion_vector(&p, &g).unwrap();
            prop_assert!(gamma.values.iter().zip(&other.values).all(|(a, b)| a <= b));
        }
    }

    // Entitled-agent sets within a requested class: mutually indifferent
    // agents who all request every resource of the class.
    #[test]
    fn requested_classes_are_homogeneous(p in arb_problem(3, 4)) {
        for class in partition(&p).classes.iter().filter(|c| !c.unrequested) {
            for &i in &class.agents {
                for &j in &class.agents {
                    prop_assert!(p.hierarchy().indifferent(i, j));
                }
                for &s in &class.resources {
                    prop_assert!(p.requests(i, s));
                }
            }
        }
    }

    // Both built-in liftings pass the exhaustive verification gate for any
    // base order.
    #[test]
    fn builtin_liftings_verify_exhaustively(base in arb_preorder(5)) {
        let k = base.size();
        let counting = Lifting::Cardinality { resources: k };
        prop_assert_eq!(counting.verify(CheckDepth::Exhaustive).unwrap(), None);
        let possibilistic = Lifting::Possibilistic { base: base.clone() };
        prop_assert_eq!(possibilistic.verify(CheckDepth::Exhaustive).unwrap(), None);
        // The counting lifting against an arbitrary claimed base must fail
        // unless all singletons tie.
        let against_base =
            verify_lifting(&counting, k, Some(&base), CheckDepth::Shallow).unwrap();
        let all_tied = (0..k).all(|x| (0..k).all(|y| base.indifferent(x, y)));
        prop_assert_eq!(against_base.is_none(), all_tied);
    }

    // Relabeling the underlying elements conjugates the relation matrix.
    #[test]
    fn preorders_conjugate_under_relabeling(
        base in arb_preorder(5),
        shuffle_seed in any::<u64>(),
    ) {
        let n = base.size();
        let mut image: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        image.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let relabeled_levels: Vec<Vec<usize>> = base
            .levels()
            .iter()
            .map(|level| level.iter().map(|&i| image[i]).collect())
            .collect();
        let relabeled = TotalPreorder::from_levels(&relabeled_levels).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(relabeled.ge(image[i], image[j]), base.ge(i, j));
            }
        }
    }

    // Swaps preserve the multiset of entries and undo themselves.
    #[test]
    fn swaps_are_involutive(entries in vec(0u8..4, 1..8), seed in any::<u64>()) {
        let n = entries.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let e = Permutation::new(n, rng.gen_range(0..n), rng.gen_range(0..n));
        let once = e.apply(&entries);
        let mut sorted_once = once.clone();
        sorted_once.sort_unstable();
        let mut sorted_orig = entries.clone();
        sorted_orig.sort_unstable();
        prop_assert_eq!(sorted_once, sorted_orig);
        prop_assert_eq!(e.apply(&once), entries);
    }

    // Min/max sets are closed under indifference within the subset.
    #[test]
    fn extremal_sets_are_indifference_closed(base in arb_preorder(5)) {
        let subset: Vec<usize> = (0..base.size()).collect();
        for extremal in [base.min_set(&subset), base.max_set(&subset)] {
            for &chosen in &extremal {
                for &other in &subset {
                    if base.indifferent(chosen, other) {
                        prop_assert!(extremal.contains(&other));
                    }
                }
            }
        }
    }

    // Variance of any nonnegative split is at least the balanced bound,
    // with equality exactly when the parts differ by at most one.
    #[test]
    fn variance_bound_holds_for_any_split(counts in vec(0i64..6, 1..6)) {
        let n = counts.len();
        let total: i64 = counts.iter().sum();
        let mean = qualloc::fairness::Rational::new(total, n as i64);
        let variance: qualloc::fairness::Rational = counts
            .iter()
            .map(|&x| {
                let d = qualloc::fairness::Rational::from_integer(x) - mean;
                d * d
            })
            .sum::<qualloc::fairness::Rational>()
            / qualloc::fairness::Rational::from_integer(n as i64);
        let bound = variance_lower_bound(n, total as usize);
        prop_assert!(variance >= bound);
        let balanced = counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1;
        prop_assert_eq!(variance == bound, balanced);
    }
}

// Non-proptest: dominance comparisons can be incomparable only if the
// lifting is not total; a deliberately partial lifting surfaces the fourth
// verdict.
#[test]
fn partial_liftings_yield_incomparable() {
    use qualloc::plausibility::Plausibility;

    struct SubsetOnly;
    impl Plausibility for SubsetOnly {
        fn at_least_as_plausible(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> bool {
            b.is_subset(a)
        }
    }
    // Positive but partial: {0} and {1} are incomparable.
    let violation = verify_lifting(&SubsetOnly, 3, None, CheckDepth::Exhaustive).unwrap();
    assert_eq!(violation, None);
    let a = BTreeSet::from([0]);
    let b = BTreeSet::from([1]);
    assert!(!SubsetOnly.at_least_as_plausible(&a, &b));
    assert!(!SubsetOnly.at_least_as_plausible(&b, &a));
}
