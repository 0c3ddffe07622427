//! Greedy set cover splitting the network into working and redundant nodes.

use crate::grid::CellSet;

#[derive(Debug, Clone, PartialEq)]
pub struct CoverSolution {
    /// Node ids in the order the greedy picked them.
    pub selected: Vec<usize>,
    /// New cells each selected node contributed, parallel to `selected`.
    pub gains: Vec<usize>,
    /// Every node not selected, ascending.
    pub redundant: Vec<usize>,
    pub achieved_eta: f64,
    /// Set when even the union of all nodes stays below the target.
    pub shortfall: bool,
}

impl CoverSolution {
    pub fn m_prime(&self) -> usize {
        self.selected.len()
    }
}

/// Repeatedly selects the node covering the most not-yet-covered cells of
/// `universe` (ties to the lowest id) until the covered fraction reaches
/// `target_eta` or no node adds anything.
pub fn greedy_set_cover(family: &[CellSet], universe: &CellSet, target_eta: f64) -> CoverSolution {
    let total = universe.len();
    let mut in_universe = vec![false; universe.max_index().map_or(0, |m| m + 1)];
    for c in universe.iter() {
        in_universe[c] = true;
    }
    let mut covered = vec![false; in_universe.len()];
    let mut covered_len = 0usize;
    let mut taken = vec![false; family.len()];
    let mut selected = Vec::new();
    let mut gains = Vec::new();
    let ratio = |n: usize| if total == 0 { 1.0 } else { n as f64 / total as f64 };

    while ratio(covered_len) < target_eta {
        let mut best: Option<(usize, usize)> = None;
        for (id, set) in family.iter().enumerate() {
            if taken[id] {
                continue;
            }
            let gain = set
                .iter()
                .filter(|&c| c < covered.len() && in_universe[c] && !covered[c])
                .count();
            // strict > keeps the lowest id on ties
            if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((id, gain));
            }
        }
        let Some((id, gain)) = best else { break };
        taken[id] = true;
        for c in family[id].iter() {
            if c < covered.len() && in_universe[c] && !covered[c] {
                covered[c] = true;
                covered_len += 1;
            }
        }
        debug_assert!(gains.last().is_none_or(|&g| g >= gain));
        selected.push(id);
        gains.push(gain);
    }

    let achieved_eta = ratio(covered_len);
    CoverSolution {
        redundant: (0..family.len()).filter(|&i| !taken[i]).collect(),
        selected,
        gains,
        achieved_eta,
        shortfall: achieved_eta < target_eta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(r: std::ops::Range<usize>) -> CellSet {
        r.collect()
    }

    #[test]
    fn single_full_node() {
        let family = vec![set(0..100), set(0..10)];
        let sol = greedy_set_cover(&family, &CellSet::full(100), 1.0);
        assert_eq!(sol.selected, vec![0]);
        assert_eq!(sol.m_prime(), 1);
        assert_eq!(sol.redundant, vec![1]);
        assert!(!sol.shortfall);
    }

    #[test]
    fn zero_target_selects_nothing() {
        let family = vec![set(0..10)];
        let sol = greedy_set_cover(&family, &CellSet::full(100), 0.0);
        assert!(sol.selected.is_empty());
        assert_eq!(sol.redundant, vec![0]);
    }

    #[test]
    fn shortfall_is_flagged() {
        let family = vec![set(0..30), set(20..50), set(10..20)];
        let sol = greedy_set_cover(&family, &CellSet::full(100), 0.9);
        assert!(sol.shortfall);
        assert_eq!(sol.selected, vec![0, 1]);
        assert_eq!(sol.redundant, vec![2]);
        assert_eq!(sol.achieved_eta, 0.5);
    }

    #[test]
    fn ties_go_to_lowest_id_and_gains_shrink() {
        let family = vec![set(0..10), set(10..20), set(5..15), set(20..40)];
        let sol = greedy_set_cover(&family, &CellSet::full(40), 1.0);
        assert_eq!(sol.selected, vec![3, 0, 1]);
        assert_eq!(sol.gains, vec![20, 10, 10]);
        assert_eq!(sol.redundant, vec![2]);
    }

    #[test]
    fn stops_as_soon_as_target_is_met() {
        let family = vec![set(0..50), set(50..80), set(80..100)];
        let sol = greedy_set_cover(&family, &CellSet::full(100), 0.8);
        assert_eq!(sol.selected, vec![0, 1]);
        assert_eq!(sol.achieved_eta, 0.8);
    }
}
