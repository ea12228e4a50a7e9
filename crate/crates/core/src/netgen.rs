//! Fixed directed follow graphs: complete, uniform random and two-block SBM.
//!
//! An edge `i -> j` means user `i` follows user `j`, so `j`'s content is a
//! candidate for `i`. Adjacency is stored in compressed sparse rows with
//! per-node lists sorted ascending; every edge has a stable id equal to its
//! position in the out-adjacency array.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::{GroupId, Population};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    /// Edge id of `in_sources[k] -> j` for the `k`-th in-adjacency slot.
    in_edge_ids: Vec<u32>,
}

impl DirectedGraph {
    /// Builds a graph from per-node out-lists. Lists must be sorted, free of
    /// duplicates and self-loops, and reference nodes `< n`.
    pub fn from_out_lists(out: Vec<Vec<u32>>) -> Result<Self> {
        let n = out.len();
        let mut out_offsets = Vec::with_capacity(n + 1);
        out_offsets.push(0);
        let mut in_degree = vec![0usize; n];
        for (i, list) in out.iter().enumerate() {
            for (k, &j) in list.iter().enumerate() {
                let j = j as usize;
                if j >= n {
                    return Err(Error::Integrity(format!("edge {i}->{j} references node outside 0..{n}")));
                }
                if j == i {
                    return Err(Error::Integrity(format!("self-loop on node {i}")));
                }
                if k > 0 && list[k - 1] as usize >= j {
                    return Err(Error::Integrity(format!("out-list of node {i} not strictly ascending")));
                }
                in_degree[j] += 1;
            }
            out_offsets.push(out_offsets[i] + list.len());
        }
        let edge_count = out_offsets[n];
        if edge_count > u32::MAX as usize {
            return Err(Error::Integrity("edge count exceeds u32 range".into()));
        }
        let out_targets: Vec<u32> = out.into_iter().flatten().collect();

        let mut in_offsets = Vec::with_capacity(n + 1);
        in_offsets.push(0);
        for (j, d) in in_degree.iter().enumerate() {
            in_offsets.push(in_offsets[j] + d);
        }
        let mut cursor = in_offsets[..n].to_vec();
        let mut in_sources = vec![0u32; edge_count];
        let mut in_edge_ids = vec![0u32; edge_count];
        // Sources are visited in ascending order, so in-lists come out sorted.
        for i in 0..n {
            for e in out_offsets[i]..out_offsets[i + 1] {
                let j = out_targets[e] as usize;
                in_sources[cursor[j]] = i as u32;
                in_edge_ids[cursor[j]] = e as u32;
                cursor[j] += 1;
            }
        }
        Ok(Self {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            in_edge_ids,
        })
    }

    /// Builds a graph from an arbitrary edge list; order does not matter but
    /// duplicates and self-loops are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Integrity(format!("edge {i}->{j} references node outside 0..{n}")));
            }
            out[i].push(j as u32);
        }
        for list in &mut out {
            list.sort_unstable();
        }
        Self::from_out_lists(out)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Accounts `i` follows, ascending.
    #[inline]
    pub fn out_neighbors(&self, i: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    /// Followers of `j`, ascending.
    #[inline]
    pub fn in_neighbors(&self, j: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[j]..self.in_offsets[j + 1]]
    }

    /// Followers of `j` paired with the id of the edge `follower -> j`.
    #[inline]
    pub fn in_edges(&self, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let range = self.in_offsets[j]..self.in_offsets[j + 1];
        self.in_sources[range.clone()]
            .iter()
            .zip(&self.in_edge_ids[range])
            .map(|(&s, &e)| (s as usize, e as usize))
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_offsets[i + 1] - self.out_offsets[i]
    }

    pub fn in_degree(&self, j: usize) -> usize {
        self.in_offsets[j + 1] - self.in_offsets[j]
    }

    pub fn edge_id(&self, src: usize, dst: usize) -> Option<usize> {
        if src >= self.n {
            return None;
        }
        self.out_neighbors(src)
            .binary_search(&(dst as u32))
            .ok()
            .map(|k| self.out_offsets[src] + k)
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edge_id(src, dst).is_some()
    }

    /// Edge endpoints for an edge id.
    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        let src = self.out_offsets.partition_point(|&o| o <= edge) - 1;
        (src, self.out_targets[edge] as usize)
    }

    /// All edges as `(edge_id, src, dst)` in `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.out_offsets[i]..self.out_offsets[i + 1]).map(move |e| (e, i, self.out_targets[e] as usize))
        })
    }

    /// Full scan of the in/out consistency and ordering invariants.
    pub fn check_consistency(&self) -> Result<()> {
        for j in 0..self.n {
            let ins = self.in_neighbors(j);
            if ins.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Integrity(format!("in-list of node {j} not strictly ascending")));
            }
            for (i, e) in self.in_edges(j) {
                if self.edge_id(i, j) != Some(e) {
                    return Err(Error::Integrity(format!("in-edge {i}->{j} missing from out-lists")));
                }
            }
        }
        let total_in: usize = (0..self.n).map(|j| self.in_degree(j)).sum();
        if total_in != self.edge_count() {
            return Err(Error::Integrity("in/out edge totals differ".into()));
        }
        for i in 0..self.n {
            if self.out_neighbors(i).contains(&(i as u32)) {
                return Err(Error::Integrity(format!("self-loop on node {i}")));
            }
        }
        Ok(())
    }

    /// Edge list CSV with header `src,dst`, sorted by `(src, dst)`.
    pub fn write_edge_list<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        w.write_record(["src", "dst"])?;
        for (_, i, j) in self.edges() {
            w.write_record([i.to_string(), j.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_edge_list<R: Read>(n: usize, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut edges = Vec::new();
        for (row, rec) in r.deserialize::<(usize, usize)>().enumerate() {
            let (i, j) = rec.map_err(|e| Error::Integrity(format!("edge list row {row}: {e}")))?;
            edges.push((i, j));
        }
        Self::from_edges(n, edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomGraphParams {
    pub p_edge: f64,
}

impl RandomGraphParams {
    pub fn validate(&self) -> Result<()> {
        check_probability("graph.p_edge", self.p_edge)
    }
}

/// Edge probabilities by `(follower group, followed group)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbmParams {
    pub p_maj_maj: f64,
    pub p_min_min: f64,
    pub p_maj_min: f64,
    pub p_min_maj: f64,
}

impl Default for SbmParams {
    fn default() -> Self {
        Self::homophilic(0.4, 0.5, 0.1)
    }
}

impl SbmParams {
    /// Three-parameter form with a shared cross-group probability.
    pub fn homophilic(p_maj: f64, p_min: f64, p_cross: f64) -> Self {
        Self {
            p_maj_maj: p_maj,
            p_min_min: p_min,
            p_maj_min: p_cross,
            p_min_maj: p_cross,
        }
    }

    pub fn uniform(p: f64) -> Self {
        Self::homophilic(p, p, p)
    }

    /// Probability that a member of `follower` follows a member of `followed`.
    pub fn probability(&self, follower: GroupId, followed: GroupId) -> f64 {
        match (follower, followed) {
            (GroupId::Majority, GroupId::Majority) => self.p_maj_maj,
            (GroupId::Minority, GroupId::Minority) => self.p_min_min,
            (GroupId::Majority, GroupId::Minority) => self.p_maj_min,
            (GroupId::Minority, GroupId::Majority) => self.p_min_maj,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("graph.p_maj_maj", self.p_maj_maj)?;
        check_probability("graph.p_min_min", self.p_min_min)?;
        check_probability("graph.p_maj_min", self.p_maj_min)?;
        check_probability("graph.p_min_maj", self.p_min_maj)
    }
}

fn check_probability(field: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::config(field, format!("must lie in [0, 1], got {p}")))
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::config("population.n", format!("graph needs at least 2 nodes, got {n}")));
    }
    Ok(())
}

pub fn complete_graph(n: usize) -> Result<DirectedGraph> {
    check_size(n)?;
    let out = (0..n)
        .map(|i| (0..n as u32).filter(|&j| j as usize != i).collect())
        .collect();
    DirectedGraph::from_out_lists(out)
}

/// Draws every ordered pair `(i, j)`, `i != j`, independently; pairs are
/// visited row by row so the draw order is fixed.
fn bernoulli_graph<R: Rng + ?Sized>(n: usize, rng: &mut R, p: impl Fn(usize, usize) -> f64) -> Result<DirectedGraph> {
    check_size(n)?;
    let out = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && rng.random::<f64>() < p(i, j))
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    DirectedGraph::from_out_lists(out)
}

pub fn random_graph<R: Rng + ?Sized>(n: usize, params: RandomGraphParams, rng: &mut R) -> Result<DirectedGraph> {
    params.validate()?;
    bernoulli_graph(n, rng, |_, _| params.p_edge)
}

pub fn sbm_graph<T: Scalar, R: Rng + ?Sized>(
    population: &Population<T>,
    params: SbmParams,
    rng: &mut R,
) -> Result<DirectedGraph> {
    params.validate()?;
    if population.is_empty() {
        return Err(Error::config("population.n", "population is empty"));
    }
    bernoulli_graph(population.len(), rng, |i, j| {
        params.probability(population.group(i), population.group(j))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Followers.
    In,
    /// Followed accounts.
    Out,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }
}

/// Mean neighbor-group fractions for the users of one group in one direction.
/// Users with no neighbors in that direction are left out of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionRow {
    pub group: GroupId,
    pub direction: Direction,
    pub share_majority: f64,
    pub share_minority: f64,
    pub users_counted: usize,
}

pub fn follower_composition<T: Scalar>(graph: &DirectedGraph, population: &Population<T>) -> Result<Vec<CompositionRow>> {
    if graph.node_count() != population.len() {
        return Err(Error::Integrity(format!(
            "graph has {} nodes but population has {} users",
            graph.node_count(),
            population.len()
        )));
    }
    let mut rows = Vec::with_capacity(4);
    for group in GroupId::ALL {
        if population.group_size(group) == 0 {
            return Err(Error::Undefined(format!("{} group is empty", group.as_str())));
        }
        for direction in [Direction::In, Direction::Out] {
            let mut sum_minority = 0.0;
            let mut counted = 0usize;
            for u in population.members(group) {
                let neighbors = match direction {
                    Direction::In => graph.in_neighbors(u),
                    Direction::Out => graph.out_neighbors(u),
                };
                if neighbors.is_empty() {
                    continue;
                }
                let minority = neighbors.iter().filter(|&&v| population.group(v as usize) == GroupId::Minority).count();
                sum_minority += minority as f64 / neighbors.len() as f64;
                counted += 1;
            }
            if counted == 0 {
                return Err(Error::Undefined(format!(
                    "no {} user has {} neighbors",
                    group.as_str(),
                    direction.as_str()
                )));
            }
            let share_minority = sum_minority / counted as f64;
            rows.push(CompositionRow {
                group,
                direction,
                share_majority: 1.0 - share_minority,
                share_minority,
                users_counted: counted,
            });
        }
    }
    Ok(rows)
}

pub fn composition_share(rows: &[CompositionRow], group: GroupId, direction: Direction) -> Option<&CompositionRow> {
    rows.iter().find(|r| r.group == group && r.direction == direction)
}

/// Fraction of all edges whose endpoints share a group.
pub fn in_group_edge_share<T: Scalar>(graph: &DirectedGraph, population: &Population<T>) -> Option<f64> {
    if graph.edge_count() == 0 {
        return None;
    }
    let within = graph.edges().filter(|&(_, i, j)| population.group(i) == population.group(j)).count();
    Some(within as f64 / graph.edge_count() as f64)
}

pub fn write_composition_csv<W: Write>(rows: &[CompositionRow], writer: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    w.write_record(["group", "direction", "share_majority", "share_minority"])?;
    for r in rows {
        w.write_record([
            r.group.as_str().to_string(),
            r.direction.as_str().to_string(),
            r.share_majority.to_string(),
            r.share_minority.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeHistogramRow {
    pub user_id: usize,
    pub group: GroupId,
    pub out_to_majority: usize,
    pub out_to_minority: usize,
    pub in_from_majority: usize,
    pub in_from_minority: usize,
}

pub fn edge_histogram<T: Scalar>(graph: &DirectedGraph, population: &Population<T>) -> Vec<EdgeHistogramRow> {
    let count_minority = |list: &[u32]| list.iter().filter(|&&v| population.group(v as usize) == GroupId::Minority).count();
    (0..graph.node_count())
        .map(|u| {
            let out = graph.out_neighbors(u);
            let inn = graph.in_neighbors(u);
            let out_min = count_minority(out);
            let in_min = count_minority(inn);
            EdgeHistogramRow {
                user_id: u,
                group: population.group(u),
                out_to_majority: out.len() - out_min,
                out_to_minority: out_min,
                in_from_majority: inn.len() - in_min,
                in_from_minority: in_min,
            }
        })
        .collect()
}
