//! Exhaustive injective-homomorphism counting, the independent oracle for the
//! fast counting path and the only route for 5-vertex patterns.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{from_count, Real};

use super::{falling_factorial, Motif};

/// Default node-count cap for the exhaustive counter.
pub const DEFAULT_BRUTE_CAP: usize = 200;

/// Exhaustive density with the default node-count cap.
pub fn brute_force_density<T: Real>(g: &Graph, f: &Motif) -> Result<T> {
    brute_force_density_capped(g, f, DEFAULT_BRUTE_CAP)
}

/// Counts ordered embeddings of `f` into `g` (every motif edge mapped onto a
/// graph edge, vertices distinct) and divides by the falling factorial. The
/// count and divisor are exact integers; only the final quotient is rounded.
pub fn brute_force_density_capped<T: Real>(g: &Graph, f: &Motif, cap: usize) -> Result<T> {
    if g.node_count() > cap {
        return Err(Error::BruteForceCap {
            node_count: g.node_count(),
            cap,
        });
    }
    if g.node_count() < f.vertex_count() {
        return Ok(T::zero());
    }
    let homs = injective_homomorphisms(g, f);
    let denom = falling_factorial(g.node_count(), f.vertex_count());
    Ok(from_count::<T>(homs) / from_count::<T>(denom))
}

/// Number of injective maps of the motif's vertices into the graph such that
/// every motif edge lands on a graph edge.
pub(crate) fn injective_homomorphisms(g: &Graph, f: &Motif) -> u128 {
    let k = f.vertex_count();
    let n = g.node_count();
    if n < k {
        return 0;
    }
    // Visit motif vertices in a BFS order so each new vertex (after the root)
    // is anchored to an already-mapped neighbor; candidates then come from the
    // anchor's adjacency list instead of all n nodes.
    let order = bfs_order(f);
    let mut earlier: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut position = vec![usize::MAX; k];
    for (pos, &mv) in order.iter().enumerate() {
        position[mv] = pos;
        for &(a, b) in f.edges() {
            let (a, b) = (a as usize, b as usize);
            let other = if a == mv {
                b
            } else if b == mv {
                a
            } else {
                continue;
            };
            if position[other] < pos {
                earlier[pos].push(position[other]);
            }
        }
    }

    let bits = g.adjacency_bits();
    let mut mapped = vec![0u32; k];
    let mut used = vec![false; n];
    let mut total = 0u128;
    extend(
        g,
        &bits,
        &order,
        &earlier,
        0,
        &mut mapped,
        &mut used,
        &mut total,
    );
    total
}

#[allow(clippy::too_many_arguments)]
fn extend(
    g: &Graph,
    bits: &crate::graph::AdjacencyBits,
    order: &[usize],
    earlier: &[Vec<usize>],
    pos: usize,
    mapped: &mut [u32],
    used: &mut [bool],
    total: &mut u128,
) {
    if pos == order.len() {
        *total += 1;
        return;
    }
    let anchors = &earlier[pos];
    if anchors.is_empty() {
        // root vertex: every graph node is a candidate
        for v in 0..g.node_count() as u32 {
            mapped[pos] = v;
            used[v as usize] = true;
            extend(g, bits, order, earlier, pos + 1, mapped, used, total);
            used[v as usize] = false;
        }
        return;
    }
    let anchor = mapped[anchors[0]];
    'cand: for &v in g.neighbors(anchor) {
        if used[v as usize] {
            continue;
        }
        for &e in &anchors[1..] {
            if !bits.contains(mapped[e] as usize, v as usize) {
                continue 'cand;
            }
        }
        mapped[pos] = v;
        used[v as usize] = true;
        extend(g, bits, order, earlier, pos + 1, mapped, used, total);
        used[v as usize] = false;
    }
}

fn bfs_order(f: &Motif) -> Vec<usize> {
    let k = f.vertex_count();
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in f.edges() {
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    let mut order = vec![0usize];
    let mut seen = vec![false; k];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                order.push(u);
            }
        }
    }
    debug_assert_eq!(order.len(), k, "motifs are connected");
    order
}
