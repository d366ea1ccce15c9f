//! Minimum-cost spanning arborescences (Chu–Liu/Edmonds).

/// Cost of the cheapest spanning tree in which every node has a directed
/// path *to* `root`, over the complete digraph on `n` nodes with edge costs
/// `cost(from, to)`. `None` if some node cannot reach the root.
///
/// Ties are broken by the first edge in lexicographic `(from, to)` order.
pub fn min_in_tree_cost(
    n: usize,
    root: usize,
    cost: impl Fn(usize, usize) -> Option<u64>,
) -> Option<u64> {
    // Reverse every edge: trees directed at the root become arborescences
    // directed away from it.
    let mut edges: Vec<(usize, usize, u64)> = Vec::with_capacity(n * n.saturating_sub(1));
    for from in 0..n {
        for to in 0..n {
            if from != to {
                if let Some(w) = cost(from, to) {
                    edges.push((to, from, w));
                }
            }
        }
    }
    edges.sort_by_key(|&(u, v, _)| (v, u));
    min_arborescence(n, root, edges)
}

/// Chu–Liu/Edmonds on an explicit edge list `(from, to, cost)`, rooted at
/// `root` with edges directed away from it.
pub fn min_arborescence(
    mut n: usize,
    mut root: usize,
    mut edges: Vec<(usize, usize, u64)>,
) -> Option<u64> {
    const NONE: usize = usize::MAX;
    let mut total = 0u64;
    loop {
        let mut best_in = vec![u64::MAX; n];
        let mut parent = vec![NONE; n];
        for &(u, v, w) in &edges {
            if u != v && w < best_in[v] {
                best_in[v] = w;
                parent[v] = u;
            }
        }
        if (0..n).any(|v| v != root && parent[v] == NONE) {
            return None;
        }
        best_in[root] = 0;

        let mut comp = vec![NONE; n];
        let mut visited_by = vec![NONE; n];
        let mut cycles = 0usize;
        for (v, &w) in best_in.iter().enumerate() {
            total += w;
            let mut u = v;
            while visited_by[u] != v && comp[u] == NONE && u != root {
                visited_by[u] = v;
                u = parent[u];
            }
            if u != root && comp[u] == NONE {
                let mut k = parent[u];
                while k != u {
                    comp[k] = cycles;
                    k = parent[k];
                }
                comp[u] = cycles;
                cycles += 1;
            }
        }
        if cycles == 0 {
            return Some(total);
        }
        let mut next = cycles;
        for c in comp.iter_mut() {
            if *c == NONE {
                *c = next;
                next += 1;
            }
        }
        edges = edges
            .into_iter()
            .filter_map(|(u, v, w)| {
                let (cu, cv) = (comp[u], comp[v]);
                (cu != cv).then(|| (cu, cv, w - best_in[v]))
            })
            .collect();
        n = next;
        root = comp[root];
    }
}
