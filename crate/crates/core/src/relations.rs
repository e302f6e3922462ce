//! Total preorders as boolean relation matrices, plus swap permutations.
//!
//! A total preorder over `0..size` is stored as a dense boolean matrix with
//! `rel[i][j] = true` iff element `i` is at least as high as element `j`. The
//! constructors reject matrices that are not total or not transitive, so every
//! value of [`TotalPreorder`] satisfies both laws.

use std::collections::BTreeSet;

use crate::error::Error;

/// A total, transitive relation over `0..size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalPreorder {
    size: usize,
    rel: Vec<bool>,
}

impl TotalPreorder {
    /// Validates a square boolean matrix as a total preorder.
    ///
    /// Returns the first violating pair (totality) or triple (transitivity),
    /// scanning in ascending index order. Totality is checked before
    /// transitivity.
    pub fn from_matrix(rows: &[Vec<bool>]) -> Result<Self, Error> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::EmptyDomain);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != size {
                return Err(Error::NotSquare {
                    rows: size,
                    row,
                    cols: r.len(),
                });
            }
        }
        let mut rel = vec![false; size * size];
        for i in 0..size {
            for j in 0..size {
                rel[i * size + j] = rows[i][j];
            }
        }
        let p = TotalPreorder { size, rel };
        p.check()?;
        Ok(p)
    }

    /// Builds a preorder from ordered indifference classes, highest first.
    ///
    /// `levels` must partition `0..n` where `n` is the total number of
    /// listed indices; `i` is at least as high as `j` iff the level of `i`
    /// comes no later than the level of `j`.
    pub fn from_levels(levels: &[Vec<usize>]) -> Result<Self, Error> {
        let size: usize = levels.iter().map(Vec::len).sum();
        if size == 0 {
            return Err(Error::EmptyDomain);
        }
        let mut rank = vec![usize::MAX; size];
        for (depth, level) in levels.iter().enumerate() {
            for &idx in level {
                if idx >= size {
                    return Err(Error::BadLevels {
                        size,
                        index: idx,
                        problem: "is out of range",
                    });
                }
                if rank[idx] != usize::MAX {
                    return Err(Error::BadLevels {
                        size,
                        index: idx,
                        problem: "appears more than once",
                    });
                }
                rank[idx] = depth;
            }
        }
        // Every index in range appeared exactly once: ranks are all set.
        let mut rel = vec![false; size * size];
        for i in 0..size {
            for j in 0..size {
                rel[i * size + j] = rank[i] <= rank[j];
            }
        }
        Ok(TotalPreorder { size, rel })
    }

    /// The universal-indifference preorder (all-ones matrix).
    pub fn all_indifferent(size: usize) -> Self {
        assert!(size > 0, "preorder domain must be nonempty");
        TotalPreorder {
            size,
            rel: vec![true; size * size],
        }
    }

    fn check(&self) -> Result<(), Error> {
        let n = self.size;
        for i in 0..n {
            for j in i..n {
                if !self.ge(i, j) && !self.ge(j, i) {
                    return Err(Error::TotalityViolation { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !self.ge(i, j) {
                    continue;
                }
                for k in 0..n {
                    if self.ge(j, k) && !self.ge(i, k) {
                        return Err(Error::TransitivityViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `i` is at least as high as `j`.
    pub fn ge(&self, i: usize, j: usize) -> bool {
        assert!(i < self.size && j < self.size, "index out of range");
        self.rel[i * self.size + j]
    }

    /// `i` is strictly higher than `j`.
    pub fn strict(&self, i: usize, j: usize) -> bool {
        self.ge(i, j) && !self.ge(j, i)
    }

    /// `i` and `j` are at the same level.
    pub fn indifferent(&self, i: usize, j: usize) -> bool {
        self.ge(i, j) && self.ge(j, i)
    }

    /// Elements of `subset` that every member of `subset` is at or above.
    ///
    /// Panics if `subset` is empty or contains an out-of-range index. The
    /// result is nonempty for any total preorder over a finite domain.
    pub fn min_set(&self, subset: &[usize]) -> BTreeSet<usize> {
        assert!(!subset.is_empty(), "min_set of an empty subset");
        subset
            .iter()
            .copied()
            .filter(|&t| subset.iter().all(|&i| self.ge(i, t)))
            .collect()
    }

    /// Elements of `subset` at or above every member of `subset`.
    pub fn max_set(&self, subset: &[usize]) -> BTreeSet<usize> {
        assert!(!subset.is_empty(), "max_set of an empty subset");
        subset
            .iter()
            .copied()
            .filter(|&t| subset.iter().all(|&i| self.ge(t, i)))
            .collect()
    }

    /// Recovers the ordered indifference classes, highest first.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = (0..self.size).collect();
        let mut out = Vec::new();
        while !remaining.is_empty() {
            let top = self.max_set(&remaining);
            remaining.retain(|i| !top.contains(i));
            out.push(top.into_iter().collect());
        }
        out
    }

    /// The relation as a 0/1 matrix, row-major.
    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| u8::from(self.ge(i, j))).collect())
            .collect()
    }
}

/// The permutation that swaps positions `i` and `j` and fixes the rest.
///
/// `i == j` is the identity. Swap permutations are their own inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Permutation {
    size: usize,
    i: usize,
    j: usize,
}

impl Permutation {
    pub fn new(size: usize, i: usize, j: usize) -> Self {
        assert!(i < size && j < size, "index out of range");
        Permutation { size, i, j }
    }

    pub fn identity(size: usize) -> Self {
        assert!(size > 0, "permutation domain must be nonempty");
        Permutation { size, i: 0, j: 0 }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_identity(&self) -> bool {
        self.i == self.j
    }

    /// Where position `idx` is sent.
    pub fn map(&self, idx: usize) -> usize {
        assert!(idx < self.size, "index out of range");
        if idx == self.i {
            self.j
        } else if idx == self.j {
            self.i
        } else {
            idx
        }
    }

    /// Applies the swap to a column vector of matching length.
    pub fn apply<T: Clone>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.size, "vector length mismatch");
        let mut out = v.to_vec();
        out.swap(self.i, self.j);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level() -> TotalPreorder {
        // {0} above {1, 2}
        TotalPreorder::from_levels(&[vec![0], vec![1, 2]]).unwrap()
    }

    #[test]
    fn all_ones_is_valid() {
        let rows = vec![vec![true; 3]; 3];
        let p = TotalPreorder::from_matrix(&rows).unwrap();
        assert_eq!(p.size(), 3);
        assert!(p.indifferent(0, 2));
    }

    #[test]
    fn identity_matrix_fails_totality() {
        let rows = vec![vec![true, false], vec![false, true]];
        let err = TotalPreorder::from_matrix(&rows).unwrap_err();
        assert_eq!(err, Error::TotalityViolation { i: 0, j: 1 });
    }

    #[test]
    fn broken_chain_fails_transitivity() {
        // 0 >= 1, 1 >= 2, not 0 >= 2, completed for totality.
        let rows = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![true, false, true],
        ];
        let err = TotalPreorder::from_matrix(&rows).unwrap_err();
        assert_eq!(err, Error::TransitivityViolation { i: 0, j: 1, k: 2 });
    }

    #[test]
    fn non_square_rejected() {
        let rows = vec![vec![true, true], vec![true]];
        assert!(matches!(
            TotalPreorder::from_matrix(&rows),
            Err(Error::NotSquare { row: 1, cols: 1, .. })
        ));
    }

    #[test]
    fn strict_and_indifferent() {
        let p = two_level();
        assert!(p.strict(0, 1));
        assert!(!p.strict(1, 0));
        assert!(!p.indifferent(0, 1));
        assert!(p.indifferent(1, 2));
        assert!(p.indifferent(1, 1));

        let all = TotalPreorder::all_indifferent(3);
        assert!(!all.strict(0, 1));
        assert!(all.indifferent(0, 1));
    }

    #[test]
    fn exactly_one_of_strict_strict_indifferent() {
        for p in [two_level(), TotalPreorder::all_indifferent(4)] {
            for i in 0..p.size() {
                for j in 0..p.size() {
                    let count = usize::from(p.strict(i, j))
                        + usize::from(p.strict(j, i))
                        + usize::from(p.indifferent(i, j));
                    assert_eq!(count, 1, "pair ({i}, {j})");
                }
            }
        }
    }

    #[test]
    fn min_and_max_sets() {
        let all = TotalPreorder::all_indifferent(3);
        let everyone: Vec<usize> = (0..3).collect();
        assert_eq!(all.min_set(&everyone), BTreeSet::from([0, 1, 2]));

        let p = two_level();
        assert_eq!(p.max_set(&everyone), BTreeSet::from([0]));
        assert_eq!(p.min_set(&everyone), BTreeSet::from([1, 2]));
    }

    #[test]
    #[should_panic(expected = "empty subset")]
    fn min_set_rejects_empty() {
        two_level().min_set(&[]);
    }

    #[test]
    fn levels_round_trip() {
        let p = TotalPreorder::from_levels(&[vec![2], vec![0, 3], vec![1]]).unwrap();
        assert_eq!(p.levels(), vec![vec![2], vec![0, 3], vec![1]]);
        let q = TotalPreorder::from_levels(&p.levels()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn levels_must_partition() {
        assert!(matches!(
            TotalPreorder::from_levels(&[vec![0, 0]]),
            Err(Error::BadLevels { .. })
        ));
        assert!(matches!(
            TotalPreorder::from_levels(&[vec![0, 2]]),
            Err(Error::BadLevels { .. })
        ));
    }

    #[test]
    fn swap_moves_the_one() {
        let e = Permutation::new(3, 0, 2);
        assert_eq!(e.apply(&[1u8, 0, 0]), vec![0, 0, 1]);
    }

    #[test]
    fn identity_fixes_everything() {
        let e = Permutation::identity(4);
        let v = vec![3, 1, 4, 1];
        assert_eq!(e.apply(&v), v);
    }

    #[test]
    fn swap_is_involution() {
        let e = Permutation::new(3, 0, 1);
        let v = vec![1u8, 0, 0];
        assert_eq!(e.apply(&e.apply(&v)), v);
    }

    #[test]
    #[should_panic(expected = "length mismatch")]
    fn apply_checks_length() {
        Permutation::new(3, 0, 1).apply(&[true, false]);
    }
}
