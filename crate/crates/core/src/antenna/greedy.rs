use super::capacity::CapacityError;
use super::channel::ChannelMatrix;
use super::net::CapacityParams;

/// Outcome of a selection procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Selected antenna indices, ascending.
    pub selected: Vec<usize>,
    /// Capacity of the selected rows, bits/s/Hz.
    pub capacity: f64,
    pub steps: usize,
    pub converged: bool,
}

/// Centralized greedy selection: grow from the empty set, each time adding the antenna
/// that maximizes the capacity of the grown set (ties to the lowest index).
pub fn greedy_baseline(h: &ChannelMatrix, params: &CapacityParams) -> Result<SelectionResult, CapacityError> {
    let n_t = h.rows();
    let target = params.n_ts.min(n_t);
    let mut chosen: Vec<usize> = Vec::with_capacity(target);
    let mut remaining: Vec<usize> = (0..n_t).collect();
    let mut best_capacity = 0.0;
    while chosen.len() < target {
        let mut best: Option<(usize, f64)> = None;
        for (pos, &candidate) in remaining.iter().enumerate() {
            chosen.push(candidate);
            let c = params.capacity_of(h, &chosen)?;
            chosen.pop();
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((pos, c));
            }
        }
        let (pos, c) = best.expect("candidates remain while below target");
        chosen.push(remaining.remove(pos));
        best_capacity = c;
    }
    chosen.sort_unstable();
    Ok(SelectionResult {
        steps: chosen.len(),
        selected: chosen,
        capacity: best_capacity,
        converged: true,
    })
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Largest subset count for which [`exhaustive_optimum`] searches.
pub const EXHAUSTIVE_LIMIT: u64 = 100_000;

/// Best `n_ts`-subset by enumeration, or `None` when there are more than `limit` subsets.
/// Ties keep the lexicographically first subset.
pub fn exhaustive_optimum(
    h: &ChannelMatrix,
    params: &CapacityParams,
    limit: u64,
) -> Result<Option<SelectionResult>, CapacityError> {
    let n_t = h.rows();
    let k = params.n_ts.min(n_t);
    let total = binomial(n_t, k);
    if total > limit {
        return Ok(None);
    }
    let mut subset: Vec<usize> = (0..k).collect();
    let mut best = (subset.clone(), params.capacity_of(h, &subset)?);
    while next_combination(&mut subset, n_t) {
        let c = params.capacity_of(h, &subset)?;
        if c > best.1 {
            best = (subset.clone(), c);
        }
    }
    Ok(Some(SelectionResult {
        selected: best.0,
        capacity: best.1,
        steps: total as usize,
        converged: true,
    }))
}

/// Advances to the next k-subset of `0..n` in lexicographic order.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let Some(i) = (0..k).rev().find(|&i| subset[i] < n - k + i) else {
        return false;
    };
    subset[i] += 1;
    for x in i + 1..k {
        subset[x] = subset[x - 1] + 1;
    }
    true
}
