//! Per-edge tie features and their standardization.

use crate::error::{Error, Result};
use crate::netgen::DirectedGraph;
use crate::population::Population;
use crate::scalar::Scalar;

use super::EmaParams;

pub const FEATURE_COUNT: usize = 4;
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = ["out_edge", "in_edge", "dist", "int_count"];

/// Feature table over all follow edges, indexed by edge id.
///
/// `out_edge`, `in_edge` and `dist` are fixed at construction; only
/// `int_count` evolves.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeState<T> {
    out_common: Vec<u32>,
    in_common: Vec<u32>,
    dist: Vec<T>,
    int_count: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionUpdate {
    pub edge: usize,
    pub interacted: bool,
}

struct Bitsets {
    words: usize,
    bits: Vec<u64>,
}

impl Bitsets {
    fn new(n: usize, lists: impl Fn(usize) -> Vec<u32>) -> Self {
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; words * n];
        for i in 0..n {
            let row = &mut bits[i * words..(i + 1) * words];
            for v in lists(i) {
                row[v as usize / 64] |= 1 << (v % 64);
            }
        }
        Self { words, bits }
    }

    fn common(&self, a: usize, b: usize) -> u32 {
        let ra = &self.bits[a * self.words..(a + 1) * self.words];
        let rb = &self.bits[b * self.words..(b + 1) * self.words];
        ra.iter().zip(rb).map(|(x, y)| (x & y).count_ones()).sum()
    }
}

/// Fills the static features of every follow edge `i -> j`: common out- and
/// in-neighbor counts and the Euclidean distance between raw preference
/// vectors. Interaction counts start at zero.
pub fn compute_static_features<T: Scalar>(graph: &DirectedGraph, population: &Population<T>) -> Result<EdgeState<T>> {
    let n = graph.node_count();
    if population.len() != n {
        return Err(Error::Integrity(format!("graph has {n} nodes but population has {} users", population.len())));
    }
    let outs = Bitsets::new(n, |i| graph.out_neighbors(i).to_vec());
    let ins = Bitsets::new(n, |i| graph.in_neighbors(i).to_vec());
    let e = graph.edge_count();
    let mut state = EdgeState {
        out_common: Vec::with_capacity(e),
        in_common: Vec::with_capacity(e),
        dist: Vec::with_capacity(e),
        int_count: vec![T::zero(); e],
    };
    for (_, i, j) in graph.edges() {
        state.out_common.push(outs.common(i, j));
        state.in_common.push(ins.common(i, j));
        let zi = &population.user(i).preferences;
        let zj = &population.user(j).preferences;
        state.dist.push(zi.distance(zj));
    }
    Ok(state)
}

impl<T: Scalar> EdgeState<T> {
    pub fn len(&self) -> usize {
        self.int_count.len()
    }

    pub fn is_empty(&self) -> bool {
        self.int_count.is_empty()
    }

    pub fn out_common(&self, edge: usize) -> u32 {
        self.out_common[edge]
    }

    pub fn in_common(&self, edge: usize) -> u32 {
        self.in_common[edge]
    }

    pub fn dist(&self, edge: usize) -> T {
        self.dist[edge]
    }

    pub fn int_count(&self, edge: usize) -> T {
        self.int_count[edge]
    }

    pub fn int_counts(&self) -> &[T] {
        &self.int_count
    }

    /// Raw feature vector `(out_edge, in_edge, dist, int_count)` of one edge.
    pub fn raw(&self, edge: usize) -> [T; FEATURE_COUNT] {
        [
            T::from_count(self.out_common[edge] as usize),
            T::from_count(self.in_common[edge] as usize),
            self.dist[edge],
            self.int_count[edge],
        ]
    }

    /// Raw values of one feature over all edges.
    pub fn column(&self, feature: usize) -> Vec<T> {
        match feature {
            0 => self.out_common.iter().map(|&c| T::from_count(c as usize)).collect(),
            1 => self.in_common.iter().map(|&c| T::from_count(c as usize)).collect(),
            2 => self.dist.clone(),
            3 => self.int_count.clone(),
            _ => panic!("feature index {feature} out of range"),
        }
    }

    /// Applies one exponential-moving-average step to each listed edge and
    /// returns the `(old, new)` values in update order. Edges not listed keep
    /// their value. Each edge may appear at most once per step.
    pub fn update_interaction_counts(&mut self, updates: &[InteractionUpdate], ema: EmaParams<T>) -> Result<Vec<(T, T)>> {
        let mut changes = Vec::with_capacity(updates.len());
        for u in updates {
            let slot = self
                .int_count
                .get_mut(u.edge)
                .ok_or_else(|| Error::Integrity(format!("interaction update on unknown edge {}", u.edge)))?;
            let old = *slot;
            let new = ema.step(old, u.interacted);
            *slot = new;
            changes.push((old, new));
        }
        Ok(changes)
    }

    /// Overrides an interaction count; used to build test fixtures.
    pub fn set_int_count(&mut self, edge: usize, value: T) {
        self.int_count[edge] = value;
    }
}

/// Resolves a `(viewer, creator)` pair to its follow edge.
pub fn edge_for_pair(graph: &DirectedGraph, viewer: usize, creator: usize) -> Result<usize> {
    graph
        .edge_id(viewer, creator)
        .ok_or_else(|| Error::Integrity(format!("user {viewer} does not follow {creator}")))
}

/// Per-feature mean and population standard deviation over all edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardizationStats<T> {
    pub mean: [T; FEATURE_COUNT],
    pub std: [T; FEATURE_COUNT],
}

impl<T: Scalar> StandardizationStats<T> {
    /// `(x - mean) / std`, or zero for a constant feature.
    #[inline]
    pub fn apply(&self, feature: usize, x: T) -> T {
        zscore(x, self.mean[feature], self.std[feature])
    }

    pub fn apply_all(&self, raw: [T; FEATURE_COUNT]) -> [T; FEATURE_COUNT] {
        let mut out = raw;
        for (k, v) in out.iter_mut().enumerate() {
            *v = self.apply(k, *v);
        }
        out
    }
}

#[inline]
pub fn zscore<T: Scalar>(x: T, mean: T, std: T) -> T {
    if std > T::zero() {
        (x - mean) / std
    } else {
        T::zero()
    }
}

/// Two-pass mean and population standard deviation.
pub fn column_stats<T: Scalar>(values: &[T]) -> (T, T) {
    let n = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    (mean, var.sqrt())
}

/// Standardized feature columns, `columns[k][edge]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedFeatures<T> {
    pub columns: [Vec<T>; FEATURE_COUNT],
}

impl<T: Scalar> StandardizedFeatures<T> {
    pub fn row(&self, edge: usize) -> [T; FEATURE_COUNT] {
        [
            self.columns[0][edge],
            self.columns[1][edge],
            self.columns[2][edge],
            self.columns[3][edge],
        ]
    }
}

/// Z-scores every feature across the full edge set. This is the O(E)
/// reference path; the simulation keeps an incremental equivalent.
pub fn standardize<T: Scalar>(state: &EdgeState<T>) -> Result<(StandardizationStats<T>, StandardizedFeatures<T>)> {
    if state.is_empty() {
        return Err(Error::config("graph", "standardization needs at least one follow edge"));
    }
    let mut stats = StandardizationStats {
        mean: [T::zero(); FEATURE_COUNT],
        std: [T::zero(); FEATURE_COUNT],
    };
    let columns: [Vec<T>; FEATURE_COUNT] = std::array::from_fn(|k| {
        let raw = state.column(k);
        let (mean, std) = column_stats(&raw);
        stats.mean[k] = mean;
        stats.std[k] = std;
        raw.into_iter().map(|x| zscore(x, mean, std)).collect()
    });
    Ok((stats, StandardizedFeatures { columns }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::{GroupId, PreferenceVector, UserProfile};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pop(zs: &[[f64; 3]]) -> Population<f64> {
        let users = zs
            .iter()
            .enumerate()
            .map(|(id, &z)| UserProfile {
                id,
                group: GroupId::Majority,
                preferences: PreferenceVector::new(z),
            })
            .collect();
        Population::from_users(users).unwrap()
    }

    #[test]
    fn three_node_common_neighbors() {
        // Edges 0->2, 1->2, 0->1; enumerate by hand for the edge (0, 1):
        // out(0) = {1, 2}, out(1) = {2} share {2}; in(0) = {}, in(1) = {0} share nothing.
        let g = DirectedGraph::from_edges(3, [(0, 2), (1, 2), (0, 1)]).unwrap();
        let p = pop(&[[0.0, 0.0, 0.0], [3.0, 4.0, 0.0], [0.0, 0.0, 0.0]]);
        let s = compute_static_features(&g, &p).unwrap();
        let e01 = g.edge_id(0, 1).unwrap();
        assert_eq!(s.out_common(e01), 1);
        assert_eq!(s.in_common(e01), 0);
        assert_eq!(s.dist(e01), 5.0);
        // (0, 2): out(2) = {} so no common out; in(0) = {}, in(2) = {0, 1}.
        let e02 = g.edge_id(0, 2).unwrap();
        assert_eq!((s.out_common(e02), s.in_common(e02)), (0, 0));
        assert_eq!(s.dist(e02), 0.0);
        // (1, 2): in(1) = {0}, in(2) = {0, 1} share {0}.
        let e12 = g.edge_id(1, 2).unwrap();
        assert_eq!((s.out_common(e12), s.in_common(e12)), (0, 1));
        assert!(s.int_counts().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn bitset_counts_match_sorted_merge() {
        use crate::netgen::{random_graph, RandomGraphParams};
        use crate::rng::{stream, Stream};
        let g = random_graph(130, RandomGraphParams { p_edge: 0.3 }, &mut stream(5, Stream::Graph)).unwrap();
        let p = pop(&vec![[0.1, 0.2, 0.3]; 130]);
        let s = compute_static_features(&g, &p).unwrap();
        let merge = |a: &[u32], b: &[u32]| a.iter().filter(|x| b.binary_search(x).is_ok()).count() as u32;
        for (e, i, j) in g.edges() {
            assert_eq!(s.out_common(e), merge(g.out_neighbors(i), g.out_neighbors(j)));
            assert_eq!(s.in_common(e), merge(g.in_neighbors(i), g.in_neighbors(j)));
        }
    }

    fn chain_state(values: &[f64]) -> EdgeState<f64> {
        EdgeState {
            out_common: vec![0; values.len()],
            in_common: vec![0; values.len()],
            dist: values.to_vec(),
            int_count: vec![0.0; values.len()],
        }
    }

    #[test]
    fn ema_update_examples() {
        let mut s = chain_state(&[0.0, 0.0, 0.0]);
        s.set_int_count(1, 0.5);
        s.set_int_count(2, 0.37);
        let ema = EmaParams::new(0.01).unwrap();
        s.update_interaction_counts(
            &[
                InteractionUpdate { edge: 0, interacted: true },
                InteractionUpdate { edge: 1, interacted: false },
            ],
            ema,
        )
        .unwrap();
        assert_abs_diff_eq!(s.int_count(0), 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(s.int_count(1), 0.495, epsilon = 1e-15);
        assert_eq!(s.int_count(2), 0.37);
        assert!(s
            .update_interaction_counts(&[InteractionUpdate { edge: 3, interacted: true }], ema)
            .is_err());
    }

    #[test]
    fn pair_lookup_rejects_non_edges() {
        let g = DirectedGraph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(edge_for_pair(&g, 0, 1).unwrap(), 0);
        assert!(matches!(edge_for_pair(&g, 1, 0), Err(Error::Integrity(_))));
    }

    #[test]
    fn standardize_examples() {
        let s = chain_state(&[1.0, 2.0, 3.0]);
        let (stats, table) = standardize(&s).unwrap();
        // Population std of {1,2,3} is sqrt(2/3); z = ±1/sqrt(2/3) = ±1.2247...
        let z = (1.5f64).sqrt();
        assert_abs_diff_eq!(table.columns[2][0], -z, epsilon = 1e-12);
        assert_abs_diff_eq!(table.columns[2][1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(table.columns[2][2], z, epsilon = 1e-12);
        assert_abs_diff_eq!(z, 1.2247, epsilon = 1e-4);
        // Constant columns standardize to zero.
        assert_eq!(stats.std[0], 0.0);
        assert!(table.columns[0].iter().all(|&v| v == 0.0));
        assert!(table.columns[3].iter().all(|&v| v == 0.0));

        assert!(standardize(&chain_state(&[])).is_err());
    }

    proptest! {
        #[test]
        fn standardized_columns_have_unit_moments(values in prop::collection::vec(-50.0f64..50.0, 2..200)) {
            let s = chain_state(&values);
            let (stats, table) = standardize(&s).unwrap();
            prop_assume!(stats.std[2] > 1e-6);
            let (m, sd) = column_stats(&table.columns[2]);
            prop_assert!(m.abs() < 1e-12);
            prop_assert!((sd - 1.0).abs() < 1e-12);
        }

        #[test]
        fn standardization_is_shift_invariant(values in prop::collection::vec(0.0f64..5.0, 2..100), shift in -100.0f64..100.0) {
            let base = standardize(&chain_state(&values)).unwrap().1;
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let moved = standardize(&chain_state(&shifted)).unwrap().1;
            for (a, b) in base.columns[2].iter().zip(moved.columns[2].iter()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn ema_stays_in_unit_interval(steps in prop::collection::vec(any::<Option<bool>>(), 0..300), alpha in 0.001f64..0.999) {
            let mut s = chain_state(&[0.0]);
            let ema = EmaParams::new(alpha).unwrap();
            let mut direct = 0.0f64;
            for step in steps {
                if let Some(interacted) = step {
                    s.update_interaction_counts(&[InteractionUpdate { edge: 0, interacted }], ema).unwrap();
                    direct = alpha * if interacted { 1.0 } else { 0.0 } + (1.0 - alpha) * direct;
                }
                prop_assert!((0.0..=1.0).contains(&s.int_count(0)));
                prop_assert!((s.int_count(0) - direct).abs() < 1e-12);
            }
        }
    }
}
