//! The canonical connected-motif family, exact counting, and empirical
//! moment-vector assembly.

mod brute;
mod count;

pub use brute::{brute_force_density, brute_force_density_capped, DEFAULT_BRUTE_CAP};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{fmt_sig17, from_count, Real};

/// A small connected pattern graph in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    id: usize,
    vertex_count: usize,
    edges: Vec<(u8, u8)>,
    automorphism_count: u64,
    code: u64,
}

/// Structural class of a motif, used to route counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotifShape {
    Edge,
    Path3,
    Triangle,
    Claw,
    Path4,
    Paw,
    Cycle4,
    Diamond,
    K4,
    /// Any connected 5-vertex pattern; counted by exhaustive enumeration.
    FiveNode,
}

impl Motif {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges over vertices `0..vertex_count`.
    pub fn edges(&self) -> &[(u8, u8)] {
        &self.edges
    }

    pub fn automorphism_count(&self) -> u64 {
        self.automorphism_count
    }

    /// Minimal upper-triangle bitmask over all vertex relabelings.
    pub fn canonical_code(&self) -> u64 {
        self.code
    }

    /// Classifies by (k, e, max degree); unique for every pattern with k <= 4.
    pub fn shape(&self) -> MotifShape {
        if self.vertex_count == 5 {
            return MotifShape::FiveNode;
        }
        let mut deg = [0usize; 4];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let max_deg = deg.iter().copied().max().unwrap_or(0);
        match (self.vertex_count, self.edges.len(), max_deg) {
            (2, 1, _) => MotifShape::Edge,
            (3, 2, _) => MotifShape::Path3,
            (3, 3, _) => MotifShape::Triangle,
            (4, 3, 3) => MotifShape::Claw,
            (4, 3, 2) => MotifShape::Path4,
            (4, 4, 3) => MotifShape::Paw,
            (4, 4, 2) => MotifShape::Cycle4,
            (4, 5, _) => MotifShape::Diamond,
            (4, 6, _) => MotifShape::K4,
            other => unreachable!("no connected motif with signature {other:?}"),
        }
    }
}

fn pair_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    // pairs (0,1),(0,2),..,(0,k-1),(1,2),.. in lexicographic order
    i * k - i * (i + 1) / 2 + (j - i - 1)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..k).collect();
    heap_permute(&mut items, k, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
    if len == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..len {
        heap_permute(items, len - 1, out);
        if len.is_multiple_of(2) {
            items.swap(i, len - 1);
        } else {
            items.swap(0, len - 1);
        }
    }
}

fn apply_permutation(k: usize, mask: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    for i in 0..k {
        for j in (i + 1)..k {
            if mask & (1 << pair_index(k, i, j)) != 0 {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                out |= 1 << pair_index(k, a, b);
            }
        }
    }
    out
}

fn is_connected(k: usize, mask: u64) -> bool {
    let mut seen = 1u64; // vertex 0
    let mut frontier = vec![0usize];
    while let Some(v) = frontier.pop() {
        for u in 0..k {
            if u == v || seen & (1 << u) != 0 {
                continue;
            }
            let (a, b) = (u.min(v), u.max(v));
            if mask & (1 << pair_index(k, a, b)) != 0 {
                seen |= 1 << u;
                frontier.push(u);
            }
        }
    }
    seen.count_ones() as usize == k
}

/// Enumerates all connected motifs on 2..=max_k vertices, one canonical
/// representative per isomorphism class, ordered by ascending
/// (vertex count, edge count, canonical code).
///
/// max_k = 4 yields 9 motifs; max_k = 5 yields 30.
pub fn motif_family(max_k: usize) -> Result<Vec<Motif>> {
    if max_k != 4 && max_k != 5 {
        return Err(Error::UnsupportedFamily(max_k));
    }
    let mut motifs: Vec<(usize, usize, u64, u64)> = Vec::new(); // (k, e, code, aut)
    for k in 2..=max_k {
        let perms = permutations(k);
        let bits = k * (k - 1) / 2;
        for mask in 1u64..(1 << bits) {
            if !is_connected(k, mask) {
                continue;
            }
            let code = perms
                .iter()
                .map(|p| apply_permutation(k, mask, p))
                .min()
                .unwrap();
            if code != mask {
                continue; // only the canonical representative survives
            }
            let aut = perms
                .iter()
                .filter(|p| apply_permutation(k, mask, p) == mask)
                .count() as u64;
            motifs.push((k, mask.count_ones() as usize, mask, aut));
        }
    }
    motifs.sort_unstable_by_key(|&(k, e, code, _)| (k, e, code));
    Ok(motifs
        .into_iter()
        .enumerate()
        .map(|(id, (k, _, code, aut))| {
            let mut edges = Vec::new();
            for i in 0..k {
                for j in (i + 1)..k {
                    if code & (1 << pair_index(k, i, j)) != 0 {
                        edges.push((i as u8, j as u8));
                    }
                }
            }
            Motif {
                id,
                vertex_count: k,
                edges,
                automorphism_count: aut,
                code,
            }
        })
        .collect())
}

/// falling factorial n * (n-1) * ... * (n-k+1)
pub(crate) fn falling_factorial(n: usize, k: usize) -> u128 {
    (0..k).map(|i| (n - i) as u128).product()
}

/// Injective homomorphism density of `f` in `g`: automorphism count times the
/// subgraph copy count, over the falling factorial of the graph size.
///
/// Graphs smaller than the motif have density 0 (no embedding exists).
/// Patterns with up to 4 vertices take the combinatorial fast path; 5-vertex
/// patterns fall back to exhaustive enumeration.
pub fn empirical_density<T: Real>(g: &Graph, f: &Motif) -> T {
    if g.node_count() < f.vertex_count() {
        return T::zero();
    }
    match f.shape() {
        MotifShape::FiveNode => density_from_homs(brute::injective_homomorphisms(g, f), g, f),
        _ => {
            let counts = count::counts_leq4(g);
            density_from_copies(counts.copies(f.shape()), g, f)
        }
    }
}

fn density_from_copies<T: Real>(copies: u128, g: &Graph, f: &Motif) -> T {
    let homs = copies * f.automorphism_count() as u128;
    density_from_homs(homs, g, f)
}

fn density_from_homs<T: Real>(homs: u128, g: &Graph, f: &Motif) -> T {
    let denom = falling_factorial(g.node_count(), f.vertex_count());
    from_count::<T>(homs) / from_count::<T>(denom)
}

/// The m-dimensional vector of motif densities, aligned with the family order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector<T> {
    values: Vec<T>,
    degenerate: u32,
}

impl<T: Real> MomentVector<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when entry `i` was forced to 0 because the graph is smaller than
    /// the motif.
    pub fn is_degenerate(&self, i: usize) -> bool {
        self.degenerate & (1 << i) != 0
    }

    pub fn any_degenerate(&self) -> bool {
        self.degenerate != 0
    }

    pub(crate) fn from_parts(values: Vec<T>, degenerate: u32) -> Self {
        Self { values, degenerate }
    }

    /// Plain vector with no degeneracy flags (theoretical vectors).
    pub fn from_values(values: Vec<T>) -> Self {
        Self {
            values,
            degenerate: 0,
        }
    }

    pub fn euclidean_distance(&self, other: &Self) -> T {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }
}

/// Empirical densities of every family motif, computed with one shared pass
/// for the 4-vertex formulas.
pub fn moment_vector<T: Real>(g: &Graph, family: &[Motif]) -> MomentVector<T> {
    let needs_fast = family
        .iter()
        .any(|f| f.vertex_count() <= 4 && f.vertex_count() <= g.node_count());
    let counts = needs_fast.then(|| count::counts_leq4(g));
    let mut degenerate = 0u32;
    let values = family
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if g.node_count() < f.vertex_count() {
                degenerate |= 1 << i;
                return T::zero();
            }
            match f.shape() {
                MotifShape::FiveNode => {
                    density_from_homs(brute::injective_homomorphisms(g, f), g, f)
                }
                shape => density_from_copies(counts.as_ref().unwrap().copies(shape), g, f),
            }
        })
        .collect();
    MomentVector::from_parts(values, degenerate)
}

/// Densities of every family motif for each graph, computed in parallel with
/// deterministic output order.
pub fn moment_vectors<T: Real>(graphs: &[Graph], family: &[Motif]) -> Vec<MomentVector<T>> {
    use rayon::prelude::*;
    graphs
        .par_iter()
        .map(|g| moment_vector(g, family))
        .collect()
}

/// CSV of moment vectors: header row of motif ids, one row per graph,
/// 17 significant digits per entry.
pub fn moment_csv<T: Real>(family: &[Motif], rows: &[MomentVector<T>]) -> String {
    let mut out = String::new();
    let header: Vec<String> = family.iter().map(|f| format!("motif_{}", f.id())).collect();
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.values().iter().map(|&v| fmt_sig17(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
