//! Asymmetric dual-mode (ADM) constellation design.
//!
//! The designer splits the label space into blocks for the `N_e` *effective*
//! antenna groups, which use a large waveform subset `psi_a`, and spreads the
//! leftover labels over `n_add` *additional* groups, which use a smaller,
//! disjoint subset `psi_b`. Subsets are chosen to maximize average pairwise
//! Hamming distance, and labels inside each block are assigned to waveforms so
//! that waveform pairs at maximum distance get far-apart labels.

use std::fmt;

use serde::Serialize;

use crate::constellation::{
    binomial, enumerate_mppm, group_usage_order, AntennaGroup, ConstellationEntry,
    GsmppmConstellation, ModulationPattern, MppmSymbol,
};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Sizing of a dual-mode design: `m_a` waveforms for each effective group,
/// `m_b` for each of the `n_add` additional groups.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct AdmParams {
    pub m_a: u32,
    pub m_b: u32,
    pub n_add: u32,
}

/// Iterative search for `(m_a, m_b, n_add)`: starting from
/// `m_a = ceil(M_s / N_s)` and `n_add = N_s - N_e`, grow the per-group subset
/// `m_b = ceil((M_s - N_e * m_a) / n_add)` and accept the first triple with
/// `m_a > m_b` and `m_a + m_b <= M_max`; on rejection shed one additional
/// group, and once none remain bump `m_a` and restart the countdown.
pub fn select_adm_params(pattern: &ModulationPattern) -> Result<AdmParams> {
    pattern.validate()?;
    let n_s = pattern.group_count();
    let n_e = pattern.effective_group_count();
    if n_s <= n_e {
        return Err(Error::InvalidPattern(format!(
            "pattern {} has no additional groups (N_s = {n_s}, N_e = {n_e})",
            pattern.tuple_string()
        )));
    }
    let m_max = pattern.waveform_count();
    let m_s = pattern.label_count();
    let m_a_base = m_s.div_ceil(n_s);

    let n_add_full = n_s - n_e;
    let mut n_add = n_add_full;
    for bump in 0..=m_max {
        let m_a = m_a_base + bump;
        loop {
            let remainder = m_s.saturating_sub(n_e * m_a);
            let m_b = remainder.div_ceil(n_add);
            if m_a > m_b && m_a + m_b <= m_max {
                return Ok(AdmParams { m_a, m_b, n_add });
            }
            n_add -= 1;
            if n_add == 0 {
                n_add = n_add_full;
                break;
            }
        }
    }
    Err(Error::AdmInfeasible(pattern.tuple_string()))
}

/// How the `2^m` labels are split into per-group index subsets: block
/// `xi[lambda]` holds the first `m_a` labels of effective group `lambda`'s
/// `M`-aligned range, and `zeta[mu]` holds the leftovers assigned to
/// additional group `mu` (ascending within each subset).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct LabelPartition {
    pub xi: Vec<Vec<u32>>,
    pub zeta: Vec<Vec<u32>>,
}

/// Split the label space for a parameter triple. Effective group `lambda`
/// takes `[lambda * M, lambda * M + m_a)`. When `M - m_a <= n_add`, the
/// leftover label `lambda * M + m_a + mu` of every block goes to additional
/// group `mu`; otherwise the leftovers are split evenly into `n_add`
/// contiguous ascending runs.
pub fn partition_labels(pattern: &ModulationPattern, params: &AdmParams) -> Result<LabelPartition> {
    pattern.validate()?;
    let block = pattern.block_size();
    let n_e = pattern.effective_group_count();
    if params.m_a > block {
        return Err(Error::InvalidPattern(format!(
            "m_a = {} exceeds the label block size M = {block}",
            params.m_a
        )));
    }
    if params.n_add == 0 || params.n_add > pattern.group_count() - n_e {
        return Err(Error::InvalidPattern(format!(
            "n_add = {} out of range for pattern {}",
            params.n_add,
            pattern.tuple_string()
        )));
    }

    let xi: Vec<Vec<u32>> = (0..n_e)
        .map(|lambda| (lambda * block..lambda * block + params.m_a).collect())
        .collect();

    let leftover_per_block = block - params.m_a;
    let mut zeta = vec![Vec::new(); params.n_add as usize];
    if leftover_per_block <= params.n_add {
        // One leftover label per block lands in each additional group.
        for mu in 0..leftover_per_block {
            zeta[mu as usize] =
                (0..n_e).map(|lambda| lambda * block + params.m_a + mu).collect();
        }
    } else {
        // Even contiguous split of all leftovers, ascending.
        let leftovers: Vec<u32> = (0..n_e)
            .flat_map(|lambda| lambda * block + params.m_a..(lambda + 1) * block)
            .collect();
        let chunk = (leftovers.len() as u32).div_ceil(params.n_add) as usize;
        for (mu, run) in leftovers.chunks(chunk).enumerate() {
            zeta[mu] = run.to_vec();
        }
    }

    Ok(LabelPartition { xi, zeta })
}

/// How a waveform subset was found.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum SearchMode {
    /// Every `C(n, k)` subset was scored.
    Exhaustive,
    /// Seeded steepest-ascent swap search with restarts.
    LocalSearch,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchMode::Exhaustive => write!(f, "exhaustive"),
            SearchMode::LocalSearch => write!(f, "local-search"),
        }
    }
}

/// Budget for the subset searches.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    /// Largest `C(n, k)` the exhaustive search will enumerate.
    pub exhaustive_limit: u64,
    /// Fall back to local search above the limit (error otherwise).
    pub allow_local_search: bool,
    /// Restarts for the local search.
    pub restarts: u32,
    /// Stream seeding the local-search restarts.
    pub stream: Stream,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            exhaustive_limit: 10_000_000,
            allow_local_search: true,
            restarts: 64,
            stream: Stream::root(0),
        }
    }
}

/// A scored waveform subset.
#[derive(Clone, Debug)]
pub struct SubsetSelection {
    /// Chosen waveforms, sorted ascending by slot mask.
    pub symbols: Vec<MppmSymbol>,
    /// Average pairwise Hamming distance of the subset
    /// (`2 / (k (k - 1)) * sum of pairwise distances`; 0 for `k < 2`).
    pub average_distance: f64,
    pub mode: SearchMode,
}

/// Average pairwise Hamming distance of a waveform set.
pub fn average_pairwise_distance(symbols: &[MppmSymbol]) -> f64 {
    let k = symbols.len();
    if k < 2 {
        return 0.0;
    }
    let total: u64 = symbols
        .iter()
        .enumerate()
        .flat_map(|(i, a)| symbols[i + 1..].iter().map(move |b| u64::from(a.distance(b))))
        .sum();
    2.0 * total as f64 / (k * (k - 1)) as f64
}

/// Pick the `k`-subset of `candidates` maximizing average pairwise Hamming
/// distance. Exhaustive within budget, otherwise seeded steepest-ascent swap
/// search; ties break toward the lexicographically smallest sorted subset.
pub fn select_max_distance_subset(
    candidates: &[MppmSymbol],
    k: u32,
    budget: &SearchBudget,
) -> Result<SubsetSelection> {
    let n = candidates.len();
    let k = k as usize;
    if k > n {
        return Err(Error::InvalidPattern(format!(
            "cannot select {k} waveforms from {n} candidates"
        )));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort();
    if k == n || k <= 1 {
        // Nothing to search; the subset is forced (singletons score 0 anyway).
        let symbols: Vec<MppmSymbol> = sorted.into_iter().take(k).collect();
        let average_distance = average_pairwise_distance(&symbols);
        return Ok(SubsetSelection { symbols, average_distance, mode: SearchMode::Exhaustive });
    }

    let dist = pair_distances(&sorted);
    let space = binomial(n as u64, k as u64) as u128;
    let (picked, total, mode) = if space <= u128::from(budget.exhaustive_limit) {
        let (picked, total) = exhaustive_best(&sorted, &dist, k);
        (picked, total, SearchMode::Exhaustive)
    } else if budget.allow_local_search {
        let (picked, total) = local_search_best(&sorted, &dist, k, budget);
        (picked, total, SearchMode::LocalSearch)
    } else {
        return Err(Error::SubsetBudgetExceeded {
            candidates: space,
            budget: budget.exhaustive_limit,
        });
    };

    let symbols: Vec<MppmSymbol> = picked.iter().map(|&i| sorted[i]).collect();
    let average_distance = 2.0 * total as f64 / (k * (k - 1)) as f64;
    Ok(SubsetSelection { symbols, average_distance, mode })
}

fn pair_distances(symbols: &[MppmSymbol]) -> Vec<Vec<u32>> {
    symbols
        .iter()
        .map(|a| symbols.iter().map(|b| a.distance(b)).collect())
        .collect()
}

/// Depth-first enumeration of all k-subsets with incremental distance sums.
/// `symbols` must be sorted so that the first maximal subset found is the
/// lexicographically smallest.
fn exhaustive_best(symbols: &[MppmSymbol], dist: &[Vec<u32>], k: usize) -> (Vec<usize>, u64) {
    let n = symbols.len();
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    // gain[i] = sum of distances from candidate i to everything chosen so far.
    let mut gain = vec![0u64; n];
    fn recurse(
        start: usize,
        sum: u64,
        n: usize,
        k: usize,
        dist: &[Vec<u32>],
        chosen: &mut Vec<usize>,
        gain: &mut Vec<u64>,
        best: &mut Option<(u64, Vec<usize>)>,
    ) {
        if chosen.len() == k {
            if best.as_ref().map_or(true, |(b, _)| sum > *b) {
                *best = Some((sum, chosen.clone()));
            }
            return;
        }
        let remaining = k - chosen.len();
        for i in start..=n - remaining {
            let add = gain[i];
            chosen.push(i);
            for j in i + 1..n {
                gain[j] += u64::from(dist[i][j]);
            }
            recurse(i + 1, sum + add, n, k, dist, chosen, gain, best);
            for j in i + 1..n {
                gain[j] -= u64::from(dist[i][j]);
            }
            chosen.pop();
        }
    }
    recurse(0, 0, n, k, dist, &mut chosen, &mut gain, &mut best);
    let (total, picked) = best.expect("k <= n guarantees at least one subset");
    (picked, total)
}

/// Steepest-ascent swap search from seeded random starts. Deterministic for a
/// fixed budget stream.
fn local_search_best(
    symbols: &[MppmSymbol],
    dist: &[Vec<u32>],
    k: usize,
    budget: &SearchBudget,
) -> (Vec<usize>, u64) {
    use rand::seq::SliceRandom;

    let n = symbols.len();
    let mut best: Option<(u64, Vec<usize>)> = None;
    for restart in 0..budget.restarts {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut budget.stream.child(u64::from(restart)).rng());
        let mut inside = vec![false; n];
        for &i in &order[..k] {
            inside[i] = true;
        }
        // attachment[i] = sum of distances from i to the current subset.
        let mut attachment = vec![0u64; n];
        for i in 0..n {
            attachment[i] = (0..n)
                .filter(|&j| inside[j])
                .map(|j| u64::from(dist[i][j]))
                .sum();
        }
        let mut total: u64 = (0..n).filter(|&i| inside[i]).map(|i| attachment[i]).sum::<u64>() / 2;

        loop {
            let mut best_swap: Option<(u64, usize, usize)> = None;
            for out in 0..n {
                if !inside[out] {
                    continue;
                }
                for inn in 0..n {
                    if inside[inn] {
                        continue;
                    }
                    // After `out` leaves, the newcomer's attachment no longer
                    // counts its distance to `out`.
                    let delta_gain = attachment[inn] - u64::from(dist[inn][out]);
                    let delta_loss = attachment[out];
                    if delta_gain > delta_loss {
                        let gain = delta_gain - delta_loss;
                        if best_swap.map_or(true, |(g, _, _)| gain > g) {
                            best_swap = Some((gain, out, inn));
                        }
                    }
                }
            }
            let Some((gain, out, inn)) = best_swap else { break };
            inside[out] = false;
            inside[inn] = true;
            for i in 0..n {
                attachment[i] =
                    attachment[i] + u64::from(dist[i][inn]) - u64::from(dist[i][out]);
            }
            total += gain;
        }

        let picked: Vec<usize> = (0..n).filter(|&i| inside[i]).collect();
        let better = match &best {
            None => true,
            Some((b, prev)) => total > *b || (total == *b && picked < *prev),
        };
        if better {
            best = Some((total, picked));
        }
    }
    let (total, picked) = best.expect("at least one restart");
    (picked, total)
}

/// Assign waveforms to the (ascending) labels of one block so that waveform
/// pairs at the maximum Hamming distance `2 l_a` receive far-apart labels.
///
/// Pairs are seeded greedily in subset order — each unplaced max-distance pair
/// takes the most distant free label pair, a half-placed pair takes the
/// farthest free label — and the assignment is then polished by deterministic
/// steepest-ascent label swaps. Returns the waveform for each label position.
pub fn relabel_max_distance(labels: &[u32], symbols: &[MppmSymbol]) -> Vec<MppmSymbol> {
    let n = symbols.len();
    assert_eq!(labels.len(), n, "one label per waveform");
    if n == 0 {
        return Vec::new();
    }
    let max_d = 2 * symbols[0].weight();
    let far: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| symbols[i].distance(&symbols[j]) == max_d)
        .collect();
    let ldist = |a: u32, b: u32| (a ^ b).count_ones();

    // Greedy seeding: position[s] = index into `labels` for waveform s.
    let mut position = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for &(a, b) in &far {
        match (position[a] == usize::MAX, position[b] == usize::MAX) {
            (true, true) => {
                let mut best: Option<(u32, usize, usize)> = None;
                for p in 0..n {
                    if taken[p] {
                        continue;
                    }
                    for q in p + 1..n {
                        if taken[q] {
                            continue;
                        }
                        let d = ldist(labels[p], labels[q]);
                        if best.map_or(true, |(bd, _, _)| d > bd) {
                            best = Some((d, p, q));
                        }
                    }
                }
                if let Some((_, p, q)) = best {
                    position[a] = p;
                    position[b] = q;
                    taken[p] = true;
                    taken[q] = true;
                }
            }
            (false, true) | (true, false) => {
                let (placed, open) = if position[a] == usize::MAX { (b, a) } else { (a, b) };
                let anchor = labels[position[placed]];
                let mut best: Option<(u32, usize)> = None;
                for p in 0..n {
                    if taken[p] {
                        continue;
                    }
                    let d = ldist(anchor, labels[p]);
                    if best.map_or(true, |(bd, _)| d > bd) {
                        best = Some((d, p));
                    }
                }
                if let Some((_, p)) = best {
                    position[open] = p;
                    taken[p] = true;
                }
            }
            (false, false) => {}
        }
    }
    let mut free = (0..n).filter(|&p| !taken[p]);
    for s in 0..n {
        if position[s] == usize::MAX {
            position[s] = free.next().expect("as many labels as waveforms");
        }
    }

    // Steepest-ascent polish: swap the label positions of two waveforms while
    // it improves the summed label distance over max-distance pairs.
    let objective = |position: &[usize]| -> u64 {
        far.iter().map(|&(i, j)| u64::from(ldist(labels[position[i]], labels[position[j]]))).sum()
    };
    let mut current = objective(&position);
    loop {
        let mut best_swap: Option<(u64, usize, usize)> = None;
        for a in 0..n {
            for b in a + 1..n {
                position.swap(a, b);
                let value = objective(&position);
                position.swap(a, b);
                if value > current && best_swap.map_or(true, |(v, _, _)| value > v) {
                    best_swap = Some((value, a, b));
                }
            }
        }
        let Some((value, a, b)) = best_swap else { break };
        position.swap(a, b);
        current = value;
    }

    let mut assignment = vec![symbols[0]; n];
    for s in 0..n {
        assignment[position[s]] = symbols[s];
    }
    assignment
}

/// Objective scored by [`relabel_max_distance`]: the summed label Hamming
/// distance over waveform pairs at maximum waveform distance, for a block
/// whose ascending labels are `labels` and whose position `i` carries
/// `assignment[i]`.
pub fn relabel_objective(labels: &[u32], assignment: &[MppmSymbol]) -> u64 {
    assert_eq!(labels.len(), assignment.len());
    if assignment.is_empty() {
        return 0;
    }
    let max_d = 2 * assignment[0].weight();
    let mut total = 0u64;
    for i in 0..assignment.len() {
        for j in i + 1..assignment.len() {
            if assignment[i].distance(&assignment[j]) == max_d {
                total += u64::from((labels[i] ^ labels[j]).count_ones());
            }
        }
    }
    total
}

/// A finished dual-mode (or single-mode) design.
#[derive(Clone, Debug)]
pub struct AdmDesign {
    pub constellation: GsmppmConstellation,
    pub params: AdmParams,
    pub partition: LabelPartition,
    /// Effective-group waveforms in block position order.
    pub psi_a: Vec<MppmSymbol>,
    /// Additional-group waveforms in block position order (empty when
    /// `n_add = 0`).
    pub psi_b: Vec<MppmSymbol>,
    pub d_a: f64,
    pub d_b: f64,
    pub mode_a: SearchMode,
    pub mode_b: SearchMode,
}

/// Assemble a constellation from designed parts: every effective group reuses
/// the same relabeled `psi_a` across its block, and every additional group
/// reuses `psi_b` across its (possibly shorter) run of leftover labels.
pub fn assemble_constellation(
    pattern: &ModulationPattern,
    effective: &[AntennaGroup],
    additional: &[AntennaGroup],
    partition: &LabelPartition,
    psi_a: &[MppmSymbol],
    psi_b: &[MppmSymbol],
) -> Result<GsmppmConstellation> {
    if effective.len() != partition.xi.len() {
        return Err(Error::InvalidConstellation(format!(
            "{} effective groups for {} label blocks",
            effective.len(),
            partition.xi.len()
        )));
    }
    let used_zeta = partition.zeta.iter().filter(|z| !z.is_empty()).count();
    if additional.len() < used_zeta {
        return Err(Error::InvalidConstellation(format!(
            "{} additional groups for {used_zeta} leftover label subsets",
            additional.len()
        )));
    }
    let mut entries = Vec::with_capacity(pattern.label_count() as usize);
    for (lambda, block) in partition.xi.iter().enumerate() {
        if block.len() != psi_a.len() {
            return Err(Error::InvalidConstellation(format!(
                "block {lambda} has {} labels but psi_a has {} waveforms",
                block.len(),
                psi_a.len()
            )));
        }
        for (pos, &label) in block.iter().enumerate() {
            entries.push(ConstellationEntry {
                label,
                group: effective[lambda].clone(),
                symbol: psi_a[pos],
            });
        }
    }
    for (mu, run) in partition.zeta.iter().enumerate() {
        if run.len() > psi_b.len() {
            return Err(Error::InvalidConstellation(format!(
                "leftover subset {mu} has {} labels but psi_b has {} waveforms",
                run.len(),
                psi_b.len()
            )));
        }
        for (pos, &label) in run.iter().enumerate() {
            entries.push(ConstellationEntry {
                label,
                group: additional[mu].clone(),
                symbol: psi_b[pos],
            });
        }
    }
    GsmppmConstellation::checked(*pattern, entries)
}

fn split_groups(
    pattern: &ModulationPattern,
    n_add: u32,
) -> Result<(Vec<AntennaGroup>, Vec<AntennaGroup>)> {
    let order = group_usage_order(pattern.n_tx, pattern.n_a);
    let n_e = pattern.effective_group_count() as usize;
    if order.len() < n_e + n_add as usize {
        return Err(Error::InvalidPattern(format!(
            "pattern {} has only {} groups for {} effective + {} additional",
            pattern.tuple_string(),
            order.len(),
            n_e,
            n_add
        )));
    }
    let effective = order[..n_e].to_vec();
    let additional = order[n_e..n_e + n_add as usize].to_vec();
    Ok((effective, additional))
}

/// Design the asymmetric dual-mode constellation for `pattern`.
pub fn build_adm(pattern: &ModulationPattern, budget: &SearchBudget) -> Result<AdmDesign> {
    let params = select_adm_params(pattern)?;
    let partition = partition_labels(pattern, &params)?;
    let (effective, additional) = split_groups(pattern, params.n_add)?;

    let all = enumerate_mppm(pattern.l, pattern.l_a);
    let sub_a = select_max_distance_subset(&all, params.m_a, budget)?;
    let psi_a = relabel_max_distance(&partition.xi[0], &sub_a.symbols);

    let remaining: Vec<MppmSymbol> =
        all.iter().copied().filter(|s| !sub_a.symbols.contains(s)).collect();
    let sub_b = select_max_distance_subset(&remaining, params.m_b, budget)?;
    let psi_b = if partition.zeta.iter().any(|z| !z.is_empty()) {
        relabel_max_distance(&partition.zeta[0], &sub_b.symbols)
    } else {
        sub_b.symbols.clone()
    };

    let constellation =
        assemble_constellation(pattern, &effective, &additional, &partition, &psi_a, &psi_b)?;
    Ok(AdmDesign {
        constellation,
        params,
        partition,
        psi_a,
        psi_b,
        d_a: sub_a.average_distance,
        d_b: sub_b.average_distance,
        mode_a: sub_a.mode,
        mode_b: sub_b.mode,
    })
}

/// Design the single-mode "optimized" constellation: the `n_add = 0` special
/// case where every effective group uses the same `M`-waveform subset and the
/// additional groups stay idle.
pub fn build_optimized(pattern: &ModulationPattern, budget: &SearchBudget) -> Result<AdmDesign> {
    pattern.validate()?;
    let block = pattern.block_size();
    let params = AdmParams { m_a: block, m_b: 0, n_add: 0 };
    let n_e = pattern.effective_group_count();
    let partition = LabelPartition {
        xi: (0..n_e).map(|lambda| (lambda * block..(lambda + 1) * block).collect()).collect(),
        zeta: Vec::new(),
    };
    let (effective, additional) = split_groups(pattern, 0)?;

    let all = enumerate_mppm(pattern.l, pattern.l_a);
    let sub_a = select_max_distance_subset(&all, params.m_a, budget)?;
    let psi_a = relabel_max_distance(&partition.xi[0], &sub_a.symbols);

    let constellation =
        assemble_constellation(pattern, &effective, &additional, &partition, &psi_a, &[])?;
    Ok(AdmDesign {
        constellation,
        params,
        partition,
        psi_a,
        psi_b: Vec::new(),
        d_a: sub_a.average_distance,
        d_b: 0.0,
        mode_a: sub_a.mode,
        mode_b: SearchMode::Exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::validate_constellation;

    fn pattern(l: u8) -> ModulationPattern {
        ModulationPattern::new(4, 4, 2, l, 2).unwrap()
    }

    fn symbols(strs: &[&str]) -> Vec<MppmSymbol> {
        strs.iter().map(|s| MppmSymbol::parse(s).unwrap()).collect()
    }

    #[test]
    fn parameter_selection_matches_worked_examples() {
        assert_eq!(
            select_adm_params(&pattern(5)).unwrap(),
            AdmParams { m_a: 6, m_b: 4, n_add: 2 }
        );
        assert_eq!(
            select_adm_params(&pattern(6)).unwrap(),
            AdmParams { m_a: 6, m_b: 4, n_add: 2 }
        );
        assert_eq!(
            select_adm_params(&pattern(7)).unwrap(),
            AdmParams { m_a: 11, m_b: 10, n_add: 2 }
        );
        assert_eq!(
            select_adm_params(&pattern(8)).unwrap(),
            AdmParams { m_a: 11, m_b: 10, n_add: 2 }
        );
    }

    #[test]
    fn parameter_selection_is_feasible_across_small_patterns() {
        for n_tx in 4..=6u8 {
            for n_a in 2..=n_tx / 2 {
                for l in 4..=9u8 {
                    for l_a in 2..=l / 2 {
                        let Ok(p) = ModulationPattern::new(n_tx, 4, n_a, l, l_a) else {
                            continue;
                        };
                        if p.group_count() <= p.effective_group_count() {
                            continue;
                        }
                        let params = select_adm_params(&p).unwrap();
                        assert!(params.m_a > params.m_b, "{}", p.tuple_string());
                        assert!(
                            params.m_a + params.m_b <= p.waveform_count(),
                            "{}",
                            p.tuple_string()
                        );
                        assert!(params.n_add >= 1);
                        assert!(
                            p.effective_group_count() * params.m_a + params.n_add * params.m_b
                                >= p.label_count(),
                            "{} cannot cover the label space",
                            p.tuple_string()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn partition_reproduces_one_leftover_per_block_layout() {
        let p = pattern(5);
        let params = select_adm_params(&p).unwrap();
        let part = partition_labels(&p, &params).unwrap();
        assert_eq!(part.xi[0], (0..=5).collect::<Vec<_>>());
        assert_eq!(part.xi[1], (8..=13).collect::<Vec<_>>());
        assert_eq!(part.xi[2], (16..=21).collect::<Vec<_>>());
        assert_eq!(part.xi[3], (24..=29).collect::<Vec<_>>());
        assert_eq!(part.zeta[0], vec![6, 14, 22, 30]);
        assert_eq!(part.zeta[1], vec![7, 15, 23, 31]);
    }

    #[test]
    fn partition_reproduces_contiguous_run_layout() {
        let p = pattern(7);
        let params = select_adm_params(&p).unwrap();
        let part = partition_labels(&p, &params).unwrap();
        assert_eq!(part.xi[0], (0..=10).collect::<Vec<_>>());
        assert_eq!(part.xi[3], (48..=58).collect::<Vec<_>>());
        let zeta0: Vec<u32> = (11..=15).chain(27..=31).collect();
        let zeta1: Vec<u32> = (43..=47).chain(59..=63).collect();
        assert_eq!(part.zeta[0], zeta0);
        assert_eq!(part.zeta[1], zeta1);
    }

    #[test]
    fn partition_covers_label_space_across_small_patterns() {
        for n_tx in 4..=6u8 {
            for n_a in 2..=n_tx / 2 {
                for l in 4..=9u8 {
                    for l_a in 2..=l / 2 {
                        let Ok(p) = ModulationPattern::new(n_tx, 4, n_a, l, l_a) else {
                            continue;
                        };
                        if p.group_count() <= p.effective_group_count() {
                            continue;
                        }
                        let params = select_adm_params(&p).unwrap();
                        if params.m_a > p.block_size() {
                            continue; // unusable triple; partition rejects it
                        }
                        let part = partition_labels(&p, &params).unwrap();
                        let mut all: Vec<u32> = part
                            .xi
                            .iter()
                            .chain(part.zeta.iter())
                            .flatten()
                            .copied()
                            .collect();
                        all.sort_unstable();
                        let expect: Vec<u32> = (0..p.label_count()).collect();
                        assert_eq!(all, expect, "{}", p.tuple_string());
                        assert!(part.xi.iter().all(|b| b.len() == params.m_a as usize));
                        let leftover: usize =
                            part.zeta.iter().map(|z| z.len()).sum();
                        assert_eq!(
                            leftover as u32,
                            p.label_count() - p.effective_group_count() * params.m_a
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn subset_selection_is_optimal_for_small_spaces() {
        // For 6 of the 10 two-pulse waveforms in five slots the maximum total
        // pairwise distance is 42 (six disjoint pairs), hence D_a = 2.8.
        let all = enumerate_mppm(5, 2);
        let sel = select_max_distance_subset(&all, 6, &SearchBudget::default()).unwrap();
        assert_eq!(sel.mode, SearchMode::Exhaustive);
        assert!((sel.average_distance - 2.8).abs() < 1e-12);
        // The published six-waveform set scores the same.
        let published = symbols(&["10100", "01100", "10010", "00110", "10001", "01001"]);
        assert!((average_pairwise_distance(&published) - 2.8).abs() < 1e-12);
    }

    #[test]
    fn local_search_matches_exhaustive_on_a_small_space() {
        let all = enumerate_mppm(6, 2);
        let exhaustive = select_max_distance_subset(&all, 6, &SearchBudget::default()).unwrap();
        let forced = SearchBudget { exhaustive_limit: 10, ..SearchBudget::default() };
        let local = select_max_distance_subset(&all, 6, &forced).unwrap();
        assert_eq!(local.mode, SearchMode::LocalSearch);
        assert!((local.average_distance - exhaustive.average_distance).abs() < 1e-12);
    }

    #[test]
    fn budget_error_when_local_search_disabled() {
        let all = enumerate_mppm(8, 2);
        let budget = SearchBudget {
            exhaustive_limit: 100,
            allow_local_search: false,
            ..SearchBudget::default()
        };
        let err = select_max_distance_subset(&all, 11, &budget).unwrap_err();
        assert!(matches!(err, Error::SubsetBudgetExceeded { .. }));
    }

    #[test]
    fn relabel_spreads_max_distance_pairs() {
        // Two disjoint waveforms with a full free label set: the chosen pair
        // must sit at the maximum label distance m.
        let two = symbols(&["1100", "0011"]);
        let labels: Vec<u32> = (0..8).collect();
        let assignment = relabel_max_distance(&labels[..2], &two);
        assert_eq!(relabel_objective(&labels[..2], &assignment), 1);
        let full = relabel_max_distance(&[0b000, 0b111], &two);
        assert_eq!(relabel_objective(&[0b000, 0b111], &full), 3);

        // A single waveform keeps the single label.
        let one = symbols(&["1100"]);
        assert_eq!(relabel_max_distance(&[5], &one), one);
    }

    #[test]
    fn relabel_scores_at_least_the_published_assignment() {
        // Published effective-block assignment for the 5-slot design:
        // labels 0..=5 carry 10100, 01100, 10010, 00110, 10001, 01001.
        let labels: Vec<u32> = (0..=5).collect();
        let published = symbols(&["10100", "01100", "10010", "00110", "10001", "01001"]);
        let published_score = relabel_objective(&labels, &published);
        assert_eq!(published_score, 14);

        let ours = relabel_max_distance(&labels, &published);
        assert!(relabel_objective(&labels, &ours) >= published_score);

        // Published additional-block assignment: labels {6,14,22,30} carry
        // 11000, 01010, 00101, 00011.
        let zeta: Vec<u32> = vec![6, 14, 22, 30];
        let published_b = symbols(&["11000", "01010", "00101", "00011"]);
        let ours_b = relabel_max_distance(&zeta, &published_b);
        assert!(relabel_objective(&zeta, &ours_b) >= relabel_objective(&zeta, &published_b));
        assert_eq!(relabel_objective(&zeta, &ours_b), 5);
    }

    #[test]
    fn adm_design_for_five_slots() {
        let design = build_adm(&pattern(5), &SearchBudget::default()).unwrap();
        assert!(validate_constellation(&design.constellation).is_valid());
        assert!((design.d_a - 2.8).abs() < 1e-12);
        // psi_b is forced to the complement of psi_a, and every such
        // complement of an optimal psi_a scores D_b = 3.
        assert!((design.d_b - 3.0).abs() < 1e-12);
        let mut a = design.psi_a.clone();
        let mut b = design.psi_b.clone();
        a.sort();
        b.sort();
        a.extend(b);
        a.sort();
        let mut everything = enumerate_mppm(5, 2);
        everything.sort();
        assert_eq!(a, everything, "psi_a and psi_b partition the waveforms");

        // Additional-group labels follow the one-leftover-per-block layout.
        let c = &design.constellation;
        assert_eq!(c.entry(6).unwrap().group.antennas(), &[1, 3]);
        assert_eq!(c.entry(7).unwrap().group.antennas(), &[2, 4]);
        assert_eq!(c.entry(14).unwrap().group.antennas(), &[1, 3]);
        // Blocks repeat the same waveform column for every effective group.
        for offset in 0..6u32 {
            let s0 = c.entry(offset).unwrap().symbol;
            for lambda in 1..4u32 {
                assert_eq!(c.entry(lambda * 8 + offset).unwrap().symbol, s0);
            }
        }
    }

    #[test]
    fn adm_design_is_deterministic() {
        let p = pattern(6);
        let a = build_adm(&p, &SearchBudget::default()).unwrap();
        let b = build_adm(&p, &SearchBudget::default()).unwrap();
        assert_eq!(a.constellation, b.constellation);
        assert_eq!(a.constellation.to_json_string(), b.constellation.to_json_string());
    }

    #[test]
    fn optimized_design_uses_only_effective_groups() {
        let design = build_optimized(&pattern(5), &SearchBudget::default()).unwrap();
        assert_eq!(design.params, AdmParams { m_a: 8, m_b: 0, n_add: 0 });
        assert!(validate_constellation(&design.constellation).is_valid());
        let used = design.constellation.used_groups();
        assert_eq!(used.len(), 4);
        assert!(used.iter().all(|g| g.antennas() != [1, 3] && g.antennas() != [2, 4]));
        // Exhaustive over C(10, 8): complements of disjoint waveform pairs
        // score best; total distance 76 over 28 pairs.
        assert!((design.d_a - 76.0 * 2.0 / (8.0 * 7.0)).abs() < 1e-12);
    }
}
