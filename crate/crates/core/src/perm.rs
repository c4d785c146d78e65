//! Lexicographic permutation enumeration over index vectors.
//!
//! Expansion candidates must come out in a documented, stable order, so the
//! iterator yields permutations of `0..n` in strict lexicographic order
//! starting from the identity.

use alloc::vec::Vec;

pub struct Permutations {
    current: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl Permutations {
    pub fn new(n: usize) -> Self {
        Permutations {
            current: (0..n).collect(),
            fresh: true,
            done: false,
        }
    }
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.current.clone());
        }
        if next_permutation(&mut self.current) {
            Some(self.current.clone())
        } else {
            self.done = true;
            None
        }
    }
}

/// Advance `a` to its lexicographic successor in place; false at the last
/// permutation.
pub fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    // Longest non-increasing suffix; the element before it is the pivot.
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let pivot = i - 1;
    // Smallest suffix element greater than the pivot, rightmost on ties.
    let mut j = a.len() - 1;
    while a[j] <= a[pivot] {
        j -= 1;
    }
    a.swap(pivot, j);
    a[i..].reverse();
    true
}

/// `n!` without overflow surprises; `None` once the product leaves u128.
pub fn factorial(n: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for k in 2..=n as u128 {
        acc = acc.checked_mul(k)?;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn three_elements_in_lexicographic_order() {
        let all: Vec<Vec<usize>> = Permutations::new(3).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0],
            ]
        );
    }

    #[test]
    fn counts_match_factorial() {
        for n in 0..=6 {
            assert_eq!(
                Permutations::new(n).count() as u128,
                factorial(n).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn empty_and_singleton_yield_one_permutation() {
        assert_eq!(Permutations::new(0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(Permutations::new(1).collect::<Vec<_>>(), vec![vec![0]]);
    }

    #[test]
    fn permutations_are_distinct_and_valid() {
        let all: Vec<Vec<usize>> = Permutations::new(5).collect();
        assert_eq!(all.len(), 120);
        for w in all.windows(2) {
            assert!(w[0] < w[1], "strictly increasing lexicographically");
        }
        for p in &all {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), Some(1));
        assert_eq!(factorial(1), Some(1));
        assert_eq!(factorial(5), Some(120));
        assert_eq!(factorial(6), Some(720));
        assert_eq!(factorial(34), Some(295232799039604140847618609643520000000));
        assert_eq!(factorial(35), None);
    }
}
