//! Exact subgraph-copy counts for every connected pattern with up to 4
//! vertices, from degree, codegree, and triangle statistics on a bitset
//! adjacency.

use crate::graph::Graph;

use super::MotifShape;

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CountsLeq4 {
    pub edges: u128,
    pub wedges: u128,
    pub triangles: u128,
    pub claws: u128,
    pub paths4: u128,
    pub paws: u128,
    pub cycles4: u128,
    pub diamonds: u128,
    pub k4s: u128,
}

impl CountsLeq4 {
    pub fn copies(&self, shape: MotifShape) -> u128 {
        match shape {
            MotifShape::Edge => self.edges,
            MotifShape::Path3 => self.wedges,
            MotifShape::Triangle => self.triangles,
            MotifShape::Claw => self.claws,
            MotifShape::Path4 => self.paths4,
            MotifShape::Paw => self.paws,
            MotifShape::Cycle4 => self.cycles4,
            MotifShape::Diamond => self.diamonds,
            MotifShape::K4 => self.k4s,
            MotifShape::FiveNode => unreachable!("5-vertex patterns have no closed-form count"),
        }
    }
}

fn intersect_count(a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as u64)
        .sum()
}

/// Set bits of `a & b` at node positions strictly greater than `pos`.
fn count_and_above(a: &[u64], b: &[u64], pos: usize) -> u128 {
    let start = (pos + 1) >> 6;
    if start >= a.len() {
        return 0;
    }
    let shift = (pos + 1) & 63;
    let first_mask = if shift == 0 { !0u64 } else { !0u64 << shift };
    let mut total = (a[start] & b[start] & first_mask).count_ones() as u128;
    for w in (start + 1)..a.len() {
        total += (a[w] & b[w]).count_ones() as u128;
    }
    total
}

/// Calls `f` for every set bit at a node position strictly greater than `pos`.
fn for_each_bit_above(words: &[u64], pos: usize, mut f: impl FnMut(usize)) {
    let start = (pos + 1) >> 6;
    if start >= words.len() {
        return;
    }
    let shift = (pos + 1) & 63;
    let mut w = words[start] & (if shift == 0 { !0u64 } else { !0u64 << shift });
    let mut wi = start;
    loop {
        while w != 0 {
            let tz = w.trailing_zeros() as usize;
            f((wi << 6) + tz);
            w &= w - 1;
        }
        wi += 1;
        if wi >= words.len() {
            break;
        }
        w = words[wi];
    }
}

fn choose2(x: u128) -> u128 {
    x * x.saturating_sub(1) / 2
}

fn choose3(x: u128) -> u128 {
    if x < 3 {
        0
    } else {
        x * (x - 1) * (x - 2) / 6
    }
}

pub(crate) fn counts_leq4(g: &Graph) -> CountsLeq4 {
    let n = g.node_count();
    let bits = g.adjacency_bits();
    let words = bits.words_per_row;
    let degrees = g.degree_sequence();

    let mut c = CountsLeq4 {
        edges: g.edge_count() as u128,
        ..CountsLeq4::default()
    };
    for &d in &degrees {
        c.wedges += choose2(d as u128);
        c.claws += choose3(d as u128);
    }

    // Per-edge codegrees drive triangles, paths, diamonds, and K4s.
    let mut tri_incident = vec![0u128; n];
    let mut tri_sum = 0u128;
    let mut common = vec![0u64; words];
    for &(u, v) in g.edges() {
        let (ru, rv) = (bits.row(u as usize), bits.row(v as usize));
        for w in 0..words {
            common[w] = ru[w] & rv[w];
        }
        let codeg = common.iter().map(|x| x.count_ones() as u128).sum::<u128>();
        tri_sum += codeg;
        tri_incident[u as usize] += codeg;
        tri_incident[v as usize] += codeg;
        c.diamonds += choose2(codeg);
        c.paths4 += (degrees[u as usize] as u128 - 1) * (degrees[v as usize] as u128 - 1) - codeg;

        // K4s counted once by their sorted vertex tuple: (u, v) is the
        // lexicographically smallest edge, then c > v in the common
        // neighborhood, then d > c adjacent to all three.
        let mut k4_here = 0u128;
        for_each_bit_above(&common, v as usize, |cand| {
            k4_here += count_and_above(&common, bits.row(cand), cand);
        });
        c.k4s += k4_here;
    }
    c.triangles = tri_sum / 3;
    for v in 0..n {
        // each triangle at v is seen once per incident triangle edge
        let t_v = tri_incident[v] / 2;
        c.paws += t_v * (degrees[v] as u128).saturating_sub(2);
    }

    // 4-cycles: every cycle has two opposite vertex pairs.
    let mut c4_sum = 0u128;
    for u in 0..n {
        let ru = bits.row(u);
        for v in (u + 1)..n {
            let codeg = intersect_count(ru, bits.row(v)) as u128;
            c4_sum += choose2(codeg);
        }
    }
    c.cycles4 = c4_sum / 2;
    c
}


#[cfg(test)]
mod word_boundary_tests {
    use super::counts_leq4;
    use crate::graph::Graph;

    fn binom(n: u128, k: u128) -> u128 {
        (0..k).map(|i| n - i).product::<u128>() / (1..=k).product::<u128>()
    }

    #[test]
    fn complete_graph_across_word_boundary() {
        // 70 nodes: rows span two u64 words, so the masked iterators in the
        // K4 path cross the boundary
        let n = 70u128;
        let mut edges = Vec::new();
        for u in 0..70u32 {
            for v in (u + 1)..70 {
                edges.push((u, v));
            }
        }
        let g = Graph::new(70, edges).unwrap();
        let c = counts_leq4(&g);
        assert_eq!(c.edges, binom(n, 2));
        assert_eq!(c.triangles, binom(n, 3));
        assert_eq!(c.k4s, binom(n, 4));
        assert_eq!(c.cycles4, 3 * binom(n, 4));
        assert_eq!(c.diamonds, 6 * binom(n, 4));
        assert_eq!(c.paths4, 12 * binom(n, 4));
        assert_eq!(c.paws, 12 * binom(n, 4));
        assert_eq!(c.wedges, 3 * binom(n, 3));
        assert_eq!(c.claws, 4 * binom(n, 4));
    }
}
