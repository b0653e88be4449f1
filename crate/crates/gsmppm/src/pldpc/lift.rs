//! Progressive-edge-growth lifting of protographs.
//!
//! Every base edge bundle `b_ij` turns into `b_ij` mutually disjoint
//! permutations of `[0, z)`: copy `k` of variable type `j` connects to
//! `b_ij` distinct copies of check type `i`, and each check copy receives
//! exactly one edge per bundle slot. Edges are placed one at a time on the
//! growing lifted graph, each choosing the most distant eligible check
//! copy (PEG); a local swap repair keeps the graph free of length-4 cycles
//! even when the last copies of a permutation run out of distant choices.

use rand::seq::SliceRandom;
use rand::Rng;

use super::BaseMatrix;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// A lifted protograph: the bipartite Tanner graph plus bookkeeping.
#[derive(Clone, Debug)]
pub struct LiftedCode {
    base: BaseMatrix,
    z: usize,
    vn_adj: Vec<Vec<u32>>,
    cn_adj: Vec<Vec<u32>>,
}

const UNREACHED: u32 = u32::MAX;

impl LiftedCode {
    pub fn base(&self) -> &BaseMatrix {
        &self.base
    }

    /// Lifting factor.
    pub fn z(&self) -> usize {
        self.z
    }

    /// Total variable nodes (including punctured ones).
    pub fn n_vars(&self) -> usize {
        self.vn_adj.len()
    }

    pub fn n_checks(&self) -> usize {
        self.cn_adj.len()
    }

    /// Information length `n - r` assuming full-rank parity checks.
    pub fn info_len(&self) -> usize {
        self.n_vars() - self.n_checks()
    }

    /// Number of transmitted variable nodes (punctured types excluded).
    pub fn transmitted_len(&self) -> usize {
        self.n_vars() - self.base.punctured().len() * self.z
    }

    pub fn vn_neighbors(&self, v: usize) -> &[u32] {
        &self.vn_adj[v]
    }

    pub fn cn_neighbors(&self, c: usize) -> &[u32] {
        &self.cn_adj[c]
    }

    /// Base column of a lifted variable node.
    pub fn var_type(&self, v: usize) -> usize {
        v / self.z
    }

    pub fn is_punctured_var(&self, v: usize) -> bool {
        self.base.is_punctured(self.var_type(v))
    }

    /// Indices of transmitted variable nodes in transmission order
    /// (ascending node index, punctured types skipped).
    pub fn transmitted_vars(&self) -> Vec<u32> {
        (0..self.n_vars() as u32)
            .filter(|&v| !self.is_punctured_var(v as usize))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.vn_adj.iter().map(Vec::len).sum()
    }

    /// Length of the shortest cycle, or `None` for a forest.
    ///
    /// Runs one truncated BFS per node; the minimum over all sources of the
    /// shortest cycle through the source is the girth.
    pub fn girth(&self) -> Option<usize> {
        let n_v = self.n_vars();
        let n = n_v + self.n_checks();
        let neighbors = |node: usize| -> &[u32] {
            if node < n_v {
                &self.vn_adj[node]
            } else {
                &self.cn_adj[node - n_v]
            }
        };
        let other = |node: usize, nb: u32| -> usize {
            if node < n_v {
                nb as usize + n_v
            } else {
                nb as usize
            }
        };
        let mut best = usize::MAX;
        let mut dist = vec![UNREACHED; n];
        let mut parent = vec![UNREACHED; n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..n {
            dist.fill(UNREACHED);
            parent.fill(UNREACHED);
            dist[s] = 0;
            queue.clear();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                if best != usize::MAX && (dist[u] as usize) * 2 >= best {
                    break;
                }
                for &nb in neighbors(u) {
                    let w = other(u, nb);
                    if dist[w] == UNREACHED {
                        dist[w] = dist[u] + 1;
                        parent[w] = u as u32;
                        queue.push_back(w);
                    } else if parent[u] != w as u32 && parent[w] != u as u32 {
                        best = best.min((dist[u] + dist[w] + 1) as usize);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }
}

#[cfg(test)]
impl LiftedCode {
    /// Test helper: append a copy of check 0, making the rows dependent.
    pub(crate) fn clone_with_duplicate_check(&self) -> LiftedCode {
        let mut doubled = self.clone();
        let dup = doubled.cn_adj[0].clone();
        let new_cn = doubled.cn_adj.len() as u32;
        for &v in &dup {
            doubled.vn_adj[v as usize].push(new_cn);
        }
        doubled.cn_adj.push(dup);
        doubled
    }
}

/// Scratch state for the growing graph during lifting.
struct Growing {
    z: usize,
    vn_adj: Vec<Vec<u32>>,
    cn_adj: Vec<Vec<u32>>,
}

impl Growing {
    /// BFS distances from variable node `v` to every check node, stopping
    /// at `max_depth` hops.
    fn check_distances(&self, v: u32, max_depth: u32, dist_cn: &mut [u32]) {
        dist_cn.fill(UNREACHED);
        let mut dist_vn = vec![UNREACHED; self.vn_adj.len()];
        dist_vn[v as usize] = 0;
        let mut frontier_vn = vec![v];
        let mut frontier_cn: Vec<u32> = Vec::new();
        let mut depth = 0;
        while depth < max_depth && !frontier_vn.is_empty() {
            depth += 1; // variable layer -> check layer
            frontier_cn.clear();
            for &u in &frontier_vn {
                for &c in &self.vn_adj[u as usize] {
                    if dist_cn[c as usize] == UNREACHED {
                        dist_cn[c as usize] = depth;
                        frontier_cn.push(c);
                    }
                }
            }
            if depth >= max_depth || frontier_cn.is_empty() {
                break;
            }
            depth += 1; // check layer -> variable layer
            frontier_vn.clear();
            for &c in &frontier_cn {
                for &u in &self.cn_adj[c as usize] {
                    if dist_vn[u as usize] == UNREACHED {
                        dist_vn[u as usize] = depth;
                        frontier_vn.push(u);
                    }
                }
            }
        }
    }

    /// Would adding edge (v, c) close a cycle of length four or less?
    /// Checks whether `c` lies within three hops of `v`.
    fn creates_short_cycle(&self, v: u32, c: u32) -> bool {
        if self.vn_adj[v as usize].contains(&c) {
            return true;
        }
        for &c1 in &self.vn_adj[v as usize] {
            for &v1 in &self.cn_adj[c1 as usize] {
                if v1 != v && self.vn_adj[v1 as usize].contains(&c) {
                    return true;
                }
            }
        }
        false
    }

    fn add(&mut self, v: u32, c: u32) {
        self.vn_adj[v as usize].push(c);
        self.cn_adj[c as usize].push(v);
    }

    fn remove(&mut self, v: u32, c: u32) {
        let vi = self.vn_adj[v as usize].iter().position(|&x| x == c).unwrap();
        self.vn_adj[v as usize].swap_remove(vi);
        let ci = self.cn_adj[c as usize].iter().position(|&x| x == v).unwrap();
        self.cn_adj[c as usize].swap_remove(ci);
    }
}

/// Lift `base` by factor `z` with PEG edge placement.
///
/// Deterministic for a given `stream`. Girth at least six is achieved for
/// all practical lifting factors (hundreds and up for the built-in codes);
/// verify with [`LiftedCode::girth`] when it matters.
pub fn lift(base: &BaseMatrix, z: usize, stream: Stream) -> Result<LiftedCode> {
    let max_mult = base.rows().iter().flatten().copied().max().unwrap_or(0);
    if z < 2 * usize::from(max_mult) {
        return Err(Error::InvalidBaseMatrix(format!(
            "lifting factor {z} too small for multiplicity {max_mult}"
        )));
    }
    // The swap repair can in principle paint itself into a corner on the
    // last copies of a permutation; a handful of fresh attempts makes that
    // a non-event while staying deterministic for the stream.
    let mut last_err = None;
    for attempt in 0u64..8 {
        match lift_once(base, z, stream.child(attempt)) {
            Ok(code) => return Ok(code),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one attempt ran"))
}

fn lift_once(base: &BaseMatrix, z: usize, stream: Stream) -> Result<LiftedCode> {
    let mut rng = stream.rng();
    let n_vars = base.variable_types() * z;
    let n_checks = base.check_types() * z;
    let mut g = Growing {
        z,
        vn_adj: vec![Vec::new(); n_vars],
        cn_adj: vec![Vec::new(); n_checks],
    };
    let mut dist_cn = vec![UNREACHED; n_checks];

    // Bundles in a fixed order: columns outermost so every variable type
    // grows its full local tree before the next type starts.
    for j in 0..base.variable_types() {
        for i in 0..base.check_types() {
            for _slot in 0..base.entry(i, j) {
                place_permutation(&mut g, i, j, &mut rng, &mut dist_cn)?;
            }
        }
    }

    for adj in g.vn_adj.iter_mut().chain(g.cn_adj.iter_mut()) {
        adj.sort_unstable();
    }
    Ok(LiftedCode { base: base.clone(), z, vn_adj: g.vn_adj, cn_adj: g.cn_adj })
}

/// Assign one permutation slot of bundle (i, j): a bijection from the `z`
/// variable copies of type `j` to the `z` check copies of type `i`.
fn place_permutation(
    g: &mut Growing,
    i: usize,
    j: usize,
    rng: &mut impl Rng,
    dist_cn: &mut [u32],
) -> Result<()> {
    let z = g.z;
    let cn_base = (i * z) as u32;
    let mut free: Vec<u32> = (0..z as u32).map(|k| cn_base + k).collect();
    let mut order: Vec<u32> = (j as u32 * z as u32..(j as u32 + 1) * z as u32).collect();
    order.shuffle(rng);
    let mut assigned: Vec<(u32, u32)> = Vec::with_capacity(z);

    for &v in &order {
        g.check_distances(v, 7, dist_cn);
        // Farthest eligible free check copy; unreached beats any distance,
        // anything within three hops would close a 4-cycle and is refused
        // here (the repair below handles the rare exhaustion).
        let mut best: Option<(u32, usize)> = None; // (distance rank, index into free)
        let mut ties = 0u32;
        for (idx, &c) in free.iter().enumerate() {
            let d = dist_cn[c as usize];
            if d <= 3 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bd, _)) => d > bd,
            };
            if better {
                best = Some((d, idx));
                ties = 1;
            } else if best.is_some_and(|(bd, _)| bd == d) {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    best = Some((d, idx));
                }
            }
        }
        let choice = match best {
            Some((_, idx)) => Some(free.swap_remove(idx)),
            None => repair_swap(g, v, &mut free, &mut assigned, rng),
        };
        match choice {
            Some(c) => {
                g.add(v, c);
                assigned.push((v, c));
            }
            None => {
                return Err(Error::InvalidBaseMatrix(format!(
                    "could not lift bundle ({i}, {j}) at factor {z} without short cycles"
                )));
            }
        }
    }
    Ok(())
}

/// All remaining free check copies sit within three hops of `v`. Steal the
/// partner of an earlier assignment (v', c') such that giving c' to `v` and
/// a free copy to `v'` keeps both edges off short cycles.
fn repair_swap(
    g: &mut Growing,
    v: u32,
    free: &mut Vec<u32>,
    assigned: &mut [(u32, u32)],
    rng: &mut impl Rng,
) -> Option<u32> {
    let mut donor_order: Vec<usize> = (0..assigned.len()).collect();
    donor_order.shuffle(rng);
    for donor in donor_order {
        let (v_old, c_old) = assigned[donor];
        if g.creates_short_cycle(v, c_old) {
            continue;
        }
        g.remove(v_old, c_old);
        let mut fallback = None;
        for (idx, &c_free) in free.iter().enumerate() {
            if !g.creates_short_cycle(v_old, c_free) && !g.creates_short_cycle(v, c_old) {
                fallback = Some(idx);
                break;
            }
        }
        match fallback {
            Some(idx) => {
                let c_free = free.swap_remove(idx);
                g.add(v_old, c_free);
                assigned[donor] = (v_old, c_free);
                return Some(c_old);
            }
            None => g.add(v_old, c_old),
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pldpc::{improved_protograph, regular_3_6};

    #[test]
    fn lifted_dimensions_and_degrees() {
        let base = improved_protograph();
        let code = lift(&base, 40, Stream::root(21)).unwrap();
        assert_eq!(code.n_vars(), 7 * 40);
        assert_eq!(code.n_checks(), 4 * 40);
        assert_eq!(code.info_len(), 3 * 40);
        assert_eq!(code.transmitted_len(), 6 * 40);
        assert_eq!(code.edge_count(), base.edge_count() * 40);
        let sums = base.column_sums();
        for v in 0..code.n_vars() {
            assert_eq!(code.vn_neighbors(v).len(), sums[code.var_type(v)] as usize);
        }
        let row_sums: Vec<usize> =
            base.rows().iter().map(|r| r.iter().map(|&b| usize::from(b)).sum()).collect();
        for c in 0..code.n_checks() {
            assert_eq!(code.cn_neighbors(c).len(), row_sums[c / 40]);
        }
    }

    #[test]
    fn bundles_stay_disjoint_permutations() {
        let base = improved_protograph();
        let z = 40;
        let code = lift(&base, z, Stream::root(22)).unwrap();
        for i in 0..base.check_types() {
            for j in 0..base.variable_types() {
                let b = usize::from(base.entry(i, j));
                // Each variable copy sees exactly b distinct check copies of
                // type i, and each check copy exactly b variable copies.
                for k in 0..z {
                    let count = code.vn_neighbors(j * z + k)
                        .iter()
                        .filter(|&&c| (c as usize) / z == i)
                        .count();
                    assert_eq!(count, b, "bundle ({i},{j}) copy {k}");
                }
                for k in 0..z {
                    let count = code.cn_neighbors(i * z + k)
                        .iter()
                        .filter(|&&v| (v as usize) / z == j)
                        .count();
                    assert_eq!(count, b, "bundle ({i},{j}) check copy {k}");
                }
            }
        }
    }

    #[test]
    fn no_duplicate_edges() {
        let code = lift(&improved_protograph(), 40, Stream::root(23)).unwrap();
        for v in 0..code.n_vars() {
            let nb = code.vn_neighbors(v);
            for w in 1..nb.len() {
                assert_ne!(nb[w - 1], nb[w], "variable {v} has a parallel edge");
            }
        }
    }

    #[test]
    fn girth_is_at_least_six_at_moderate_factors() {
        for (seed, z) in [(24u64, 60), (25, 96)] {
            let code = lift(&improved_protograph(), z, Stream::root(seed)).unwrap();
            let girth = code.girth().expect("graph has cycles");
            assert!(girth >= 6, "z = {z}: girth {girth}");
        }
    }

    #[test]
    fn lifting_is_deterministic_per_stream() {
        let a = lift(&regular_3_6(), 64, Stream::root(26)).unwrap();
        let b = lift(&regular_3_6(), 64, Stream::root(26)).unwrap();
        let c = lift(&regular_3_6(), 64, Stream::root(27)).unwrap();
        assert_eq!(a.vn_adj, b.vn_adj);
        assert_ne!(a.vn_adj, c.vn_adj);
    }

    #[test]
    fn rejects_tiny_factors() {
        assert!(lift(&improved_protograph(), 4, Stream::root(28)).is_err());
    }

    #[test]
    fn girth_detects_a_four_cycle() {
        // Hand-built graph: two variable nodes doubly connected to the same
        // pair of checks form a 4-cycle.
        let code = LiftedCode {
            base: regular_3_6(),
            z: 2,
            vn_adj: vec![vec![0, 1], vec![0, 1], vec![], vec![]],
            cn_adj: vec![vec![0, 1], vec![0, 1]],
        };
        assert_eq!(code.girth(), Some(4));
    }

    #[test]
    fn forest_has_no_girth() {
        let code = LiftedCode {
            base: regular_3_6(),
            z: 2,
            vn_adj: vec![vec![0], vec![0], vec![1], vec![1]],
            cn_adj: vec![vec![0, 1], vec![2, 3]],
        };
        assert_eq!(code.girth(), None);
    }
}
