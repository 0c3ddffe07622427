//! Discretized monitored region, per-node covered-cell sets and coverage
//! metrics.
//!
//! Cell `(row, col)` spans `[col·c, (col+1)·c] × [row·c, (row+1)·c]` and has
//! index `row·cols + col`. A cell counts as covered by a node when its center
//! satisfies the node's coverage predicate.

use thiserror::Error;

use crate::geometry::{footprint_covers, Footprint, ModelParams, Point2, PredicateMode, SensorPose};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid region: {0}")]
    Region(String),
    #[error("outside the analytic model's domain: {0}")]
    Domain(String),
}

/// Rectangular monitored area `[0, width] × [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub width: f64,
    pub height: f64,
    pub cell_size: f64,
    cols: usize,
    rows: usize,
}

impl Region {
    pub fn new(width: f64, height: f64, cell_size: f64) -> Result<Self, GridError> {
        if !(width > 0.0 && height > 0.0 && cell_size > 0.0) {
            return Err(GridError::Region(format!(
                "width, height and cell size must be positive (got {width} x {height}, cell {cell_size})"
            )));
        }
        let cols = whole_multiple(width, cell_size).ok_or_else(|| {
            GridError::Region(format!("width {width} is not a multiple of cell size {cell_size}"))
        })?;
        let rows = whole_multiple(height, cell_size).ok_or_else(|| {
            GridError::Region(format!("height {height} is not a multiple of cell size {cell_size}"))
        })?;
        if cols.checked_mul(rows).is_none_or(|n| n > u32::MAX as usize) {
            return Err(GridError::Region(format!("{cols} x {rows} cells is too many")));
        }
        Ok(Self {
            width,
            height,
            cell_size,
            cols,
            rows,
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cell_count(&self) -> usize {
        self.cols * self.rows
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_size * self.cell_size
    }

    pub fn cell_index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn row_col(&self, cell: usize) -> (usize, usize) {
        (cell / self.cols, cell % self.cols)
    }

    pub fn cell_center(&self, cell: usize) -> Point2 {
        let (row, col) = self.row_col(cell);
        Point2::new(
            (col as f64 + 0.5) * self.cell_size,
            (row as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn contains(&self, p: Point2) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    /// Inclusive range of column (or row) indices whose centers may fall in
    /// `[lo, hi]`, clipped to `0..n`.
    fn center_range(&self, lo: f64, hi: f64, n: usize) -> Option<(usize, usize)> {
        let first = (lo / self.cell_size - 0.5).floor().max(0.0);
        let last = (hi / self.cell_size - 0.5).ceil().min(n as f64 - 1.0);
        if !(first <= last) {
            return None;
        }
        Some((first as usize, last as usize))
    }
}

fn whole_multiple(len: f64, cell: f64) -> Option<usize> {
    let k = (len / cell).round();
    if k >= 1.0 && (k * cell - len).abs() <= 1e-9 * len {
        Some(k as usize)
    } else {
        None
    }
}

/// Sorted, duplicate-free set of cell indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CellSet(Vec<u32>);

impl CellSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.0.binary_search(&(cell as u32)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&c| c as usize)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().map(|&c| c as usize)
    }

    pub fn intersection_len(&self, other: &CellSet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// All cells `0..n`.
    pub fn full(n: usize) -> Self {
        Self((0..n as u32).collect())
    }
}

impl FromIterator<usize> for CellSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<u32> = iter.into_iter().map(|c| c as u32).collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

/// Cells of `region` whose centers the footprint covers.
pub fn rasterize(
    fp: &Footprint,
    pose: &SensorPose,
    params: &ModelParams,
    region: &Region,
    mode: PredicateMode,
) -> CellSet {
    let (lo, hi) = match mode {
        PredicateMode::Quad => fp.bounds(),
        // the far arc can bulge past the far corners
        PredicateMode::Annular => (
            Point2::new(fp.p_prime.x - fp.d2, fp.p_prime.y - fp.d2),
            Point2::new(fp.p_prime.x + fp.d2, fp.p_prime.y + fp.d2),
        ),
    };
    let (Some((c0, c1)), Some((r0, r1))) = (
        region.center_range(lo.x, hi.x, region.cols),
        region.center_range(lo.y, hi.y, region.rows),
    ) else {
        return CellSet::new();
    };
    let mut cells = Vec::new();
    for row in r0..=r1 {
        let y = (row as f64 + 0.5) * region.cell_size;
        for col in c0..=c1 {
            let x = (col as f64 + 0.5) * region.cell_size;
            if footprint_covers(fp, pose.theta, params.alpha, mode, Point2::new(x, y)) {
                cells.push(region.cell_index(row, col) as u32);
            }
        }
    }
    // row-major emission is already sorted
    CellSet(cells)
}

/// Per-node covered-cell sets plus a per-cell coverage count, so the union
/// can be updated in time proportional to the cells a node touches.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageState {
    nodes: Vec<CellSet>,
    counts: Vec<u32>,
    covered: usize,
}

impl CoverageState {
    pub fn new(total_cells: usize) -> Self {
        Self {
            nodes: Vec::new(),
            counts: vec![0; total_cells],
            covered: 0,
        }
    }

    pub fn from_sets(total_cells: usize, sets: Vec<CellSet>) -> Self {
        let mut state = Self::new(total_cells);
        for set in sets {
            state.push_node(set);
        }
        state
    }

    pub fn total_cells(&self) -> usize {
        self.counts.len()
    }

    pub fn covered_len(&self) -> usize {
        self.covered
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> &CellSet {
        &self.nodes[id]
    }

    pub fn family(&self) -> &[CellSet] {
        &self.nodes
    }

    pub fn count(&self, cell: usize) -> u32 {
        self.counts[cell]
    }

    pub fn is_covered(&self, cell: usize) -> bool {
        self.counts[cell] > 0
    }

    pub fn push_node(&mut self, set: CellSet) -> usize {
        self.add_cells(&set);
        self.nodes.push(set);
        self.nodes.len() - 1
    }

    /// Swaps node `id`'s covered cells for `set`, returning the old set.
    pub fn replace_node(&mut self, id: usize, set: CellSet) -> CellSet {
        let old = std::mem::replace(&mut self.nodes[id], set);
        self.remove_cells(&old);
        let new = std::mem::take(&mut self.nodes[id]);
        self.add_cells(&new);
        self.nodes[id] = new;
        old
    }

    pub fn clear_node(&mut self, id: usize) -> CellSet {
        self.replace_node(id, CellSet::new())
    }

    fn add_cells(&mut self, set: &CellSet) {
        for c in set.iter() {
            let n = &mut self.counts[c];
            if *n == 0 {
                self.covered += 1;
            }
            *n += 1;
        }
    }

    fn remove_cells(&mut self, set: &CellSet) {
        for c in set.iter() {
            let n = &mut self.counts[c];
            debug_assert!(*n > 0);
            *n -= 1;
            if *n == 0 {
                self.covered -= 1;
            }
        }
    }

    /// Union as maintained incrementally by the counts.
    pub fn union(&self) -> CellSet {
        CellSet(
            self.counts
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(c, _)| c as u32)
                .collect(),
        )
    }

    /// Union recomputed from the per-node sets.
    pub fn union_from_scratch(&self) -> CellSet {
        self.nodes.iter().flat_map(|s| s.iter()).collect()
    }

    pub fn uncovered(&self) -> CellSet {
        CellSet(
            self.counts
                .iter()
                .enumerate()
                .filter(|(_, &n)| n == 0)
                .map(|(c, _)| c as u32)
                .collect(),
        )
    }

    /// Cells only node `id` covers.
    pub fn unique_len(&self, id: usize) -> usize {
        self.nodes[id].iter().filter(|&c| self.counts[c] == 1).count()
    }

    /// Change in covered-cell count if node `id` switched to `candidate`.
    pub fn net_gain_if_replaced(&self, id: usize, candidate: &CellSet) -> i64 {
        let old = &self.nodes[id];
        let gained = candidate
            .iter()
            .filter(|&c| {
                let n = self.counts[c];
                n == 0 || (n == 1 && old.contains(c))
            })
            .count();
        gained as i64 - self.unique_len(id) as i64
    }

    pub fn covered_mask(&self) -> Vec<bool> {
        self.counts.iter().map(|&n| n > 0).collect()
    }
}

/// Covered fraction `|Ω_C| / |Ω|`.
pub fn coverage_ratio(state: &CoverageState) -> f64 {
    debug_assert!(state.total_cells() > 0);
    state.covered_len() as f64 / state.total_cells() as f64
}

/// Expected coverage of `n` independently placed nodes each covering the
/// fraction `s_over_g`: `1 - (1 - S/G)^n`.
pub fn analytic_eta(s_over_g: f64, n: u32) -> Result<f64, GridError> {
    if !(0.0..1.0).contains(&s_over_g) {
        return Err(GridError::Domain(format!("S/G must lie in [0, 1), got {s_over_g}")));
    }
    Ok(1.0 - (1.0 - s_over_g).powi(n as i32))
}

/// Node count reaching `eta` with footprint area `s` in region area `g`:
/// `ln(1 - η) / (ln(G - S) - ln G)`. Not rounded.
pub fn analytic_min_nodes(eta: f64, s: f64, g: f64) -> Result<f64, GridError> {
    if !(0.0..1.0).contains(&eta) {
        return Err(GridError::Domain(format!("eta must lie in [0, 1), got {eta}")));
    }
    if !(s > 0.0 && s < g) {
        return Err(GridError::Domain(format!("need 0 < S < G, got S={s}, G={g}")));
    }
    Ok((1.0 - eta).ln() / ((g - s).ln() - g.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::footprint;
    use approx::assert_relative_eq;

    fn set(cells: &[usize]) -> CellSet {
        cells.iter().copied().collect()
    }

    #[test]
    fn region_validation() {
        assert!(Region::new(500.0, 500.0, 1.0).is_ok());
        assert!(Region::new(10.0, 10.0, 3.0).is_err());
        assert!(Region::new(0.0, 10.0, 1.0).is_err());
        let r = Region::new(10.0, 4.0, 0.5).unwrap();
        assert_eq!((r.cols(), r.rows()), (20, 8));
        assert_eq!(r.cell_center(21), Point2::new(0.75, 0.75));
    }

    #[test]
    fn cell_set_dedups_and_sorts() {
        let s = set(&[5, 1, 5, 3]);
        assert_eq!(s.as_slice(), &[1, 3, 5]);
        assert!(s.contains(3) && !s.contains(2));
        assert_eq!(s.intersection_len(&set(&[0, 3, 5, 9])), 2);
    }

    #[test]
    fn footprint_outside_region_rasterizes_empty() {
        let params = ModelParams::from_degrees(22.5, 30.0, 50.0).unwrap();
        let region = Region::new(50.0, 50.0, 1.0).unwrap();
        let pose = SensorPose::new(-10.0, 25.0, 8.0, std::f64::consts::PI, 45f64.to_radians());
        let fp = footprint(&pose, &params).unwrap();
        assert!(rasterize(&fp, &pose, &params, &region, PredicateMode::Quad).is_empty());
        assert!(rasterize(&fp, &pose, &params, &region, PredicateMode::Annular).is_empty());
    }

    #[test]
    fn degenerate_triangle_cell_count_tracks_area() {
        let params = ModelParams::from_degrees(22.5, 30.0, 50.0).unwrap();
        let region = Region::new(200.0, 200.0, 1.0).unwrap();
        let pose = SensorPose::new(20.0, 100.0, 12.0, 0.0, params.beta);
        let fp = footprint(&pose, &params).unwrap();
        let cells = rasterize(&fp, &pose, &params, &region, PredicateMode::Quad);
        let err = (cells.len() as f64 - fp.area).abs();
        // center-sampling error is bounded by roughly half the perimeter in cells
        let perimeter = fp.far_width() + 2.0 * fp.d2;
        assert!(err <= 0.5 * perimeter, "err {err}, area {}", fp.area);
    }

    #[test]
    fn cell_count_scales_with_area() {
        // every footprint length is proportional to z
        let params = ModelParams::from_degrees(22.5, 30.0, 50.0).unwrap();
        let region = Region::new(500.0, 500.0, 1.0).unwrap();
        for (theta, gamma_deg) in [(0.3, 45.0), (2.0, 50.0), (4.4, 40.0)] {
            let count = |z: f64| {
                let pose = SensorPose::new(250.0, 250.0, z, theta, f64::to_radians(gamma_deg));
                let fp = footprint(&pose, &params).unwrap();
                assert!(fp.far_width() >= 20.0);
                rasterize(&fp, &pose, &params, &region, PredicateMode::Quad).len() as f64
            };
            let (small, large) = (count(12.0), count(24.0));
            assert!((large / small - 4.0).abs() <= 0.4, "{small} -> {large}");
        }
    }

    #[test]
    fn cells_outside_region_are_never_emitted() {
        let params = ModelParams::from_degrees(22.5, 30.0, 50.0).unwrap();
        let region = Region::new(30.0, 30.0, 1.0).unwrap();
        let pose = SensorPose::new(15.0, 15.0, 10.0, 0.7, params.k_max);
        let fp = footprint(&pose, &params).unwrap();
        let cells = rasterize(&fp, &pose, &params, &region, PredicateMode::Quad);
        assert!(!cells.is_empty());
        assert!(cells.max_index().unwrap() < region.cell_count());
        assert!(cells.len() < fp.area as usize);
    }

    #[test]
    fn coverage_ratio_cases() {
        let empty = CoverageState::new(100);
        assert_eq!(coverage_ratio(&empty), 0.0);
        let full = CoverageState::from_sets(100, vec![CellSet::full(100)]);
        assert_eq!(coverage_ratio(&full), 1.0);
        // rows 0-2 of a 10x10 grid, column 0, and the main diagonal
        let a: CellSet = (0..30).collect();
        let b: CellSet = (0..10).map(|r| r * 10).collect();
        let c: CellSet = (0..10).map(|r| r * 11).collect();
        let state = CoverageState::from_sets(100, vec![a, b, c]);
        // 30 + 7 (col 0, rows 3..9) + 7 (diagonal, rows 3..9) = 44
        assert_eq!(state.covered_len(), 44);
        assert_eq!(coverage_ratio(&state), 0.44);
    }

    #[test]
    fn incremental_union_matches_scratch() {
        let mut state = CoverageState::new(50);
        state.push_node(set(&[1, 2, 3]));
        state.push_node(set(&[3, 4]));
        state.push_node(set(&[10, 11]));
        assert_eq!(state.covered_len(), 6);
        assert_eq!(state.unique_len(1), 1);
        assert_eq!(state.net_gain_if_replaced(1, &set(&[20, 21, 22])), 2);
        assert_eq!(state.net_gain_if_replaced(1, &set(&[4, 1])), 0);
        state.replace_node(1, set(&[20, 21, 22]));
        assert_eq!(state.union(), state.union_from_scratch());
        assert_eq!(state.covered_len(), 8);
        state.clear_node(0);
        assert_eq!(state.union(), state.union_from_scratch());
        assert_eq!(state.covered_len(), 5);
        assert_eq!(state.uncovered().len(), 45);
    }

    #[test]
    fn analytic_values() {
        assert_eq!(analytic_eta(0.5, 1).unwrap(), 0.5);
        assert_eq!(analytic_eta(0.5, 2).unwrap(), 0.75);
        assert!(analytic_eta(1.0, 3).is_err());
        assert_eq!(analytic_min_nodes(0.0, 10.0, 100.0).unwrap(), 0.0);
        assert_relative_eq!(analytic_min_nodes(0.75, 50.0, 100.0).unwrap(), 2.0, epsilon = 1e-12);
        assert!(analytic_min_nodes(1.0, 10.0, 100.0).is_err());
        assert!(analytic_min_nodes(0.5, 100.0, 100.0).is_err());
        let eta = analytic_eta(0.01, 37).unwrap();
        assert_relative_eq!(analytic_min_nodes(eta, 1.0, 100.0).unwrap(), 37.0, epsilon = 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        #[derive(Debug, Clone)]
        enum Op {
            Push(Vec<usize>),
            Replace(usize, Vec<usize>),
            Clear(usize),
        }

        fn op() -> impl Strategy<Value = Op> {
            let cells = prop::collection::vec(0usize..64, 0..20);
            prop_oneof![
                cells.clone().prop_map(Op::Push),
                (0usize..8, cells).prop_map(|(i, c)| Op::Replace(i, c)),
                (0usize..8).prop_map(Op::Clear),
            ]
        }

        proptest! {
            #[test]
            fn union_stays_consistent(ops in prop::collection::vec(op(), 1..40)) {
                let mut state = CoverageState::new(64);
                for op in ops {
                    let before = state.covered_len();
                    match op {
                        Op::Push(c) => {
                            state.push_node(c.into_iter().collect());
                            prop_assert!(state.covered_len() >= before);
                        }
                        Op::Replace(i, c) if i < state.node_count() => {
                            let cand: CellSet = c.into_iter().collect();
                            let predicted = state.net_gain_if_replaced(i, &cand);
                            state.replace_node(i, cand);
                            prop_assert_eq!(state.covered_len() as i64 - before as i64, predicted);
                        }
                        Op::Clear(i) if i < state.node_count() => {
                            state.clear_node(i);
                            prop_assert!(state.covered_len() <= before);
                        }
                        _ => {}
                    }
                    prop_assert_eq!(state.union(), state.union_from_scratch());
                }
            }

            #[test]
            fn analytic_round_trip(r in 1e-4f64..0.05, n in 0u32..150) {
                let eta = analytic_eta(r, n).unwrap();
                let m = analytic_min_nodes(eta, r * 1000.0, 1000.0).unwrap();
                prop_assert!((m - n as f64).abs() <= 1e-6);
            }
        }
    }
}
