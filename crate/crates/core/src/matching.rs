//! Hopcroft–Karp matching on the split graph of a strict order, and the
//! Dilworth / König machinery built on it.

use std::collections::VecDeque;

const NIL: u32 = u32::MAX;

/// Maximum matching of a bipartite graph given by forward adjacency lists.
/// Returns `(forward, backward)` with `NIL` for unmatched vertices.
pub(crate) fn hopcroft_karp(right: usize, adj: &[Vec<u32>]) -> (Vec<u32>, Vec<u32>) {
    let left = adj.len();
    let mut fwd = vec![NIL; left];
    let mut bwd = vec![NIL; right];
    let mut dist = vec![0u32; left];
    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..left {
            if fwd[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = bwd[v as usize];
                if w == NIL {
                    found = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; left];
        for u in 0..left {
            if fwd[u] == NIL {
                augment(u, adj, &mut fwd, &mut bwd, &mut dist, &mut it);
            }
        }
    }
    (fwd, bwd)
}

fn augment(
    root: usize,
    adj: &[Vec<u32>],
    fwd: &mut [u32],
    bwd: &mut [u32],
    dist: &mut [u32],
    it: &mut [usize],
) -> bool {
    // Iterative DFS along the layered graph.
    let mut stack: Vec<usize> = vec![root];
    while let Some(&u) = stack.last() {
        if it[u] >= adj[u].len() {
            dist[u] = u32::MAX;
            stack.pop();
            continue;
        }
        let v = adj[u][it[u]] as usize;
        it[u] += 1;
        let w = bwd[v];
        if w == NIL {
            // Flip the path recorded on the stack.
            let mut v = v as u32;
            while let Some(u) = stack.pop() {
                let prev = fwd[u];
                fwd[u] = v;
                bwd[v as usize] = u as u32;
                v = prev;
            }
            return true;
        }
        let w = w as usize;
        if dist[w] == dist[u] + 1 {
            stack.push(w);
        }
    }
    false
}

/// Minimum chain partition of a transitively closed strict order
/// (`succ[u]` lists every `v` with `u < v`). Chains are listed bottom-up,
/// in order of their bottom element.
pub(crate) fn min_chain_partition(succ: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = succ.len();
    let (fwd, bwd) = hopcroft_karp(n, succ);
    let mut chains = Vec::new();
    for start in 0..n {
        if bwd[start] != NIL {
            continue;
        }
        let mut chain = vec![start as u32];
        let mut cur = start;
        while fwd[cur] != NIL {
            cur = fwd[cur] as usize;
            chain.push(cur as u32);
        }
        chains.push(chain);
    }
    chains
}

/// A maximum antichain of a transitively closed strict order, via König's
/// theorem on the split graph. Returned indices are ascending.
pub(crate) fn max_antichain(succ: &[Vec<u32>]) -> Vec<u32> {
    let n = succ.len();
    let (fwd, bwd) = hopcroft_karp(n, succ);
    let mut seen_left = vec![false; n];
    let mut seen_right = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&u| fwd[u] == NIL).collect();
    for &u in &queue {
        seen_left[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &v in &succ[u] {
            let v = v as usize;
            if seen_right[v] {
                continue;
            }
            seen_right[v] = true;
            let w = bwd[v];
            if w != NIL && !seen_left[w as usize] {
                seen_left[w as usize] = true;
                queue.push_back(w as usize);
            }
        }
    }
    (0..n)
        .filter(|&x| seen_left[x] && !seen_right[x])
        .map(|x| x as u32)
        .collect()
}

/// Size of a maximum matching, i.e. `n - width` on a strict order.
pub(crate) fn matching_size(right: usize, adj: &[Vec<u32>]) -> usize {
    hopcroft_karp(right, adj).0.iter().filter(|&&v| v != NIL).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_small() {
        let adj = vec![vec![0, 1], vec![0]];
        assert_eq!(matching_size(2, &adj), 2);
        let adj = vec![vec![0], vec![0], vec![0]];
        assert_eq!(matching_size(1, &adj), 1);
    }

    #[test]
    fn chain_partition_of_diamond() {
        // 0 < 1, 0 < 2, 1 < 3, 2 < 3, 0 < 3
        let succ = vec![vec![1, 2, 3], vec![3], vec![3], vec![]];
        let chains = min_chain_partition(&succ);
        assert_eq!(chains.len(), 2);
        let anti = max_antichain(&succ);
        assert_eq!(anti, vec![1, 2]);
    }
}
