//! Disorder of a trace measured as the fewest ascending subsequences that
//! cover it (SUS), which coincides with the longest decreasing subsequence (LDS).

use serde::Serialize;

use crate::sequence::IdSequence;

/// Ascending lists produced by the greedy pass, in creation order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SusPartition {
    pub lists: Vec<Vec<u64>>,
}

impl SusPartition {
    /// Number of lists, i.e. SUS of the input.
    pub fn u(&self) -> usize {
        self.lists.len()
    }
}

/// Incremental form of the greedy pass.
///
/// Each element goes to the first list whose last element is smaller, or opens
/// a new list. Last elements are strictly decreasing in list order, so the
/// first fitting list is found by binary search.
#[derive(Debug, Clone, Default)]
pub struct SusGreedy {
    lists: Vec<Vec<u64>>,
}

impl SusGreedy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `value` and returns the index of the list it joined.
    pub fn push(&mut self, value: u64) -> usize {
        let slot = self
            .lists
            .partition_point(|list| *list.last().expect("lists are never empty") >= value);
        match self.lists.get_mut(slot) {
            Some(list) => list.push(value),
            None => self.lists.push(vec![value]),
        }
        slot
    }

    pub fn lists(&self) -> &[Vec<u64>] {
        &self.lists
    }

    /// Last element of every list, in list order.
    pub fn tails(&self) -> impl Iterator<Item = u64> + '_ {
        self.lists.iter().filter_map(|l| l.last().copied())
    }

    pub fn finish(self) -> SusPartition {
        SusPartition { lists: self.lists }
    }
}

pub fn sus_greedy(a: &IdSequence) -> SusPartition {
    let mut greedy = SusGreedy::new();
    for &id in a.ids() {
        greedy.push(id);
    }
    greedy.finish()
}

/// Longest strictly decreasing subsequence by the quadratic DP over positions.
pub fn lds_bruteforce(a: &IdSequence) -> usize {
    let ids = a.ids();
    let mut ending_at = vec![1usize; ids.len()];
    for i in 0..ids.len() {
        for j in 0..i {
            if ids[j] > ids[i] {
                ending_at[i] = ending_at[i].max(ending_at[j] + 1);
            }
        }
    }
    ending_at.into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(ids: &[u64]) -> IdSequence {
        IdSequence::new(ids.to_vec()).unwrap()
    }

    #[test]
    fn eleven_element_example() {
        let a = seq(&[6, 5, 8, 7, 10, 9, 12, 11, 4, 3, 2]);
        let part = sus_greedy(&a);
        assert_eq!(part.u(), 5);
        assert_eq!(
            part.lists,
            vec![
                vec![6, 8, 10, 12],
                vec![5, 7, 9, 11],
                vec![4],
                vec![3],
                vec![2]
            ]
        );
        assert_eq!(lds_bruteforce(&a), 5);
    }

    #[test]
    fn small_cases() {
        assert_eq!(
            sus_greedy(&seq(&[1, 2, 3, 4])).lists,
            vec![vec![1, 2, 3, 4]]
        );
        assert_eq!(sus_greedy(&seq(&[4, 3, 2, 1])).u(), 4);
        assert_eq!(sus_greedy(&seq(&[4, 2, 3, 1])).u(), 3);
        assert_eq!(sus_greedy(&seq(&[])).u(), 0);
        assert_eq!(lds_bruteforce(&seq(&[1, 2, 3])), 1);
        assert_eq!(
            lds_bruteforce(&seq(&[1, 2, 3, 6, 5, 7, 4, 8, 9, 10, 12, 13, 14, 11])),
            3
        );
    }

    #[test]
    fn push_reports_list_index() {
        let mut g = SusGreedy::new();
        assert_eq!(g.push(3), 0);
        assert_eq!(g.push(1), 1);
        assert_eq!(g.push(2), 1);
        assert_eq!(g.push(5), 0);
        assert_eq!(g.tails().collect::<Vec<_>>(), vec![5, 2]);
    }
}
