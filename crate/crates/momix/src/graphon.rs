//! Graphon representations (analytic closures, step functions, convex
//! mixtures), W-random graph sampling, and theoretical motif densities.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::motifs::{MomentVector, Motif};
use crate::rng::seeded;
use crate::scalar::{fmt_sig17, Real};

/// A symmetric function on [0,1]^2 with values in [0,1].
#[derive(Clone)]
pub enum Graphon<T> {
    /// Closed-form evaluator; callers must supply a symmetric function.
    Analytic(Arc<dyn Fn(T, T) -> T + Send + Sync>),
    Step(StepGraphon<T>),
    /// Pointwise convex combination `lambda * first + (1 - lambda) * second`.
    Mix {
        lambda: T,
        first: Box<Graphon<T>>,
        second: Box<Graphon<T>>,
    },
}

impl<T: Real> fmt::Debug for Graphon<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Graphon::Analytic(_) => write!(f, "Graphon::Analytic"),
            Graphon::Step(s) => write!(f, "Graphon::Step(r={})", s.resolution()),
            Graphon::Mix { lambda, .. } => write!(f, "Graphon::Mix(lambda={lambda})"),
        }
    }
}

impl<T: Real> Graphon<T> {
    pub fn analytic<F>(f: F) -> Self
    where
        F: Fn(T, T) -> T + Send + Sync + 'static,
    {
        Graphon::Analytic(Arc::new(f))
    }

    pub fn constant(c: T) -> Self {
        Self::analytic(move |_, _| c)
    }

    pub fn eval(&self, x: T, y: T) -> T {
        match self {
            Graphon::Analytic(f) => f(x, y),
            Graphon::Step(s) => s.eval(x, y),
            Graphon::Mix {
                lambda,
                first,
                second,
            } => *lambda * first.eval(x, y) + (T::one() - *lambda) * second.eval(x, y),
        }
    }
}

/// Pointwise convex combination of two graphons; `lambda = 1` evaluates
/// identically to `first`, `lambda = 0` to `second`.
pub fn mix<T: Real>(first: Graphon<T>, second: Graphon<T>, lambda: T) -> Result<Graphon<T>> {
    if lambda < T::zero() || lambda > T::one() {
        return Err(Error::MixWeight(lambda.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(Graphon::Mix {
        lambda,
        first: Box::new(first),
        second: Box::new(second),
    })
}

/// Piecewise-constant graphon on an r x r grid. Cells are half-open
/// `[i/r, (i+1)/r)` with the final cell closed, a total partition of [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon<T> {
    resolution: usize,
    cells: Vec<T>, // row-major
}

impl<T: Real> StepGraphon<T> {
    /// Validates symmetry (within 1e-12) and clamps cells to [0,1].
    pub fn from_cells(resolution: usize, cells: Vec<T>) -> Result<Self> {
        if resolution == 0 || cells.len() != resolution * resolution {
            return Err(Error::InvalidArgument(format!(
                "step graphon needs {}x{} cells, got {}",
                resolution,
                resolution,
                cells.len()
            )));
        }
        let tol = T::from_f64(1e-12).unwrap();
        for i in 0..resolution {
            for j in (i + 1)..resolution {
                let (a, b) = (cells[i * resolution + j], cells[j * resolution + i]);
                if (a - b).abs() > tol {
                    return Err(Error::InvalidArgument(format!(
                        "asymmetric cells ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        let cells = cells
            .into_iter()
            .map(|c| c.max(T::zero()).min(T::one()))
            .collect();
        Ok(Self { resolution, cells })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cell(&self, i: usize, j: usize) -> T {
        self.cells[i * self.resolution + j]
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn mean(&self) -> T {
        self.cells.iter().copied().sum::<T>() / T::from_usize(self.cells.len()).unwrap()
    }

    fn index(&self, x: T) -> usize {
        let r = self.resolution;
        let i = (x * T::from_usize(r).unwrap())
            .floor()
            .to_usize()
            .unwrap_or(0);
        i.min(r - 1)
    }

    pub fn eval(&self, x: T, y: T) -> T {
        self.cell(self.index(x), self.index(y))
    }

    /// Text matrix format: first line `r`, then r rows of r decimals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}\n", self.resolution));
        for i in 0..self.resolution {
            let row: Vec<String> = (0..self.resolution)
                .map(|j| fmt_sig17(self.cell(i, j)))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let r: usize = lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty step graphon file".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument("bad resolution line".into()))?;
        let mut cells = Vec::with_capacity(r * r);
        for line in lines {
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad cell value `{tok}`")))?;
                cells.push(T::from_f64(v).unwrap());
            }
        }
        Self::from_cells(r, cells)
    }
}

/// Per-node latent coordinates in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct LatentPositions<T> {
    values: Vec<T>,
}

impl<T: Real> LatentPositions<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|&v| v < T::zero() || v > T::one()) {
            return Err(Error::InvalidArgument(
                "latent positions must lie in [0,1]".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The seven closed-form ground-truth graphons used by the synthetic
/// clustering experiment.
pub fn ground_truth_graphon<T: Real>(index: usize) -> Result<Graphon<T>> {
    let c = |v: f64| T::from_f64(v).unwrap();
    let g = match index {
        0 => Graphon::analytic(|x: T, y: T| x * y),
        1 => {
            let p = c(0.7);
            Graphon::analytic(move |x: T, y: T| (-(x.powf(p) + y.powf(p))).exp())
        }
        2 => {
            let q = c(0.25);
            Graphon::analytic(move |x: T, y: T| q * (x * x + y * y + x.sqrt() + y.sqrt()))
        }
        3 => {
            let h = c(0.5);
            Graphon::analytic(move |x: T, y: T| h * (x + y))
        }
        4 => {
            let two = c(2.0);
            Graphon::analytic(move |x: T, y: T| (T::one() + (-two * (x * x + y * y)).exp()).recip())
        }
        5 => Graphon::analytic(move |x: T, y: T| {
            let hi = x.max(y);
            let lo = x.min(y);
            (T::one() + (-hi.powi(2) - lo.powi(4)).exp()).recip()
        }),
        6 => {
            let p = c(0.75);
            Graphon::analytic(move |x: T, y: T| (-x.max(y).powf(p)).exp())
        }
        other => return Err(Error::GraphonIndex(other)),
    };
    Ok(g)
}

/// Samples an n-node graph: n i.i.d. uniform latents, then one uniform draw
/// per unordered pair in (i < j) lexicographic order, with an edge when the
/// draw falls below `w(eta_i, eta_j)`.
pub fn sample_graph<T: Real>(w: &Graphon<T>, n: usize, seed: u64) -> (Graph, LatentPositions<T>) {
    let mut rng = seeded(seed);
    sample_graph_with_rng(w, n, &mut rng)
}

/// Same draw order as [`sample_graph`], continuing an existing stream.
pub fn sample_graph_with_rng<T: Real>(
    w: &Graphon<T>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (Graph, LatentPositions<T>) {
    let latents: Vec<T> = (0..n)
        .map(|_| T::from_f64(rng.gen::<f64>()).unwrap())
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let u: f64 = rng.gen();
            let p = w.eval(latents[i], latents[j]).to_f64().unwrap();
            if u < p {
                edges.push((i as u32, j as u32));
            }
        }
    }
    let graph = Graph::new(n, edges).expect("sampled edges are in range and loop-free");
    (graph, LatentPositions { values: latents })
}

/// How to approximate the motif-density integral.
#[derive(Debug, Clone, Copy)]
pub enum DensityMethod {
    /// Midpoint tensor grid with `grid` points per axis; motifs with up to 4
    /// vertices only.
    Quadrature { grid: usize },
    /// Average of the edge-probability product over i.i.d. uniform tuples.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate<T> {
    pub value: T,
    /// Standard error of the mean; Monte Carlo only.
    pub std_error: Option<T>,
}

/// Homomorphism density of motif `f` under `w`: the integral over [0,1]^k of
/// the product of `w` over the motif's edges.
pub fn hom_density<T: Real>(
    w: &Graphon<T>,
    f: &Motif,
    method: DensityMethod,
) -> Result<DensityEstimate<T>> {
    match method {
        DensityMethod::Quadrature { grid } => {
            if f.vertex_count() > 4 {
                return Err(Error::QuadratureArity {
                    k: f.vertex_count(),
                });
            }
            if grid == 0 {
                return Err(Error::InvalidArgument("quadrature grid must be > 0".into()));
            }
            Ok(DensityEstimate {
                value: quadrature_density(w, f, grid),
                std_error: None,
            })
        }
        DensityMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidArgument("sample budget must be > 0".into()));
            }
            Ok(monte_carlo_density(w, f, samples, seed))
        }
    }
}

fn quadrature_density<T: Real>(w: &Graphon<T>, f: &Motif, grid: usize) -> T {
    let k = f.vertex_count();
    // midpoint nodes and the pairwise kernel, evaluated once
    let points: Vec<T> = (0..grid)
        .map(|i| {
            (T::from_usize(i).unwrap() + T::from_f64(0.5).unwrap()) / T::from_usize(grid).unwrap()
        })
        .collect();
    let mut kernel = vec![T::zero(); grid * grid];
    for a in 0..grid {
        for b in 0..grid {
            kernel[a * grid + b] = w.eval(points[a], points[b]);
        }
    }
    let edges = f.edges();
    let mut tuple = vec![0usize; k];
    let mut sum = T::zero();
    loop {
        let mut prod = T::one();
        for &(a, b) in edges {
            prod = prod * kernel[tuple[a as usize] * grid + tuple[b as usize]];
            if prod == T::zero() {
                break;
            }
        }
        sum = sum + prod;
        // odometer over grid^k
        let mut pos = 0;
        loop {
            tuple[pos] += 1;
            if tuple[pos] < grid {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
            if pos == k {
                let cells = T::from_usize(grid).unwrap().powi(k as i32);
                return sum / cells;
            }
        }
    }
}

fn monte_carlo_density<T: Real>(
    w: &Graphon<T>,
    f: &Motif,
    samples: usize,
    seed: u64,
) -> DensityEstimate<T> {
    let k = f.vertex_count();
    let mut rng = seeded(seed);
    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    let mut coords = vec![T::zero(); k];
    for _ in 0..samples {
        for c in coords.iter_mut() {
            *c = T::from_f64(rng.gen::<f64>()).unwrap();
        }
        let mut prod = T::one();
        for &(a, b) in f.edges() {
            prod = prod * w.eval(coords[a as usize], coords[b as usize]);
        }
        let p = prod.to_f64().unwrap();
        sum += p;
        sumsq += p * p;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    let se = (var / n).sqrt();
    DensityEstimate {
        value: T::from_f64(mean).unwrap(),
        std_error: Some(T::from_f64(se).unwrap()),
    }
}

/// Quadrature grids and the Monte Carlo fallback for 5-vertex motifs.
#[derive(Debug, Clone, Copy)]
pub struct TheoryOptions {
    pub grid_k3: usize,
    pub grid_k4: usize,
    /// (samples, seed) for motifs where quadrature is rejected.
    pub five_node_mc: Option<(usize, u64)>,
}

impl Default for TheoryOptions {
    fn default() -> Self {
        Self {
            grid_k3: 64,
            grid_k4: 24,
            five_node_mc: None,
        }
    }
}

/// Componentwise [`hom_density`] over the family, quadrature by default
/// (grid 64 per axis up to 3 vertices, 24 at 4).
pub fn theoretical_moment_vector<T: Real>(
    w: &Graphon<T>,
    family: &[Motif],
) -> Result<MomentVector<T>> {
    theoretical_moment_vector_with(w, family, TheoryOptions::default())
}

pub fn theoretical_moment_vector_with<T: Real>(
    w: &Graphon<T>,
    family: &[Motif],
    opts: TheoryOptions,
) -> Result<MomentVector<T>> {
    let mut values = Vec::with_capacity(family.len());
    for f in family {
        let method = match f.vertex_count() {
            2 | 3 => DensityMethod::Quadrature { grid: opts.grid_k3 },
            4 => DensityMethod::Quadrature { grid: opts.grid_k4 },
            _ => {
                let (samples, seed) = opts.five_node_mc.ok_or(Error::QuadratureArity {
                    k: f.vertex_count(),
                })?;
                DensityMethod::MonteCarlo {
                    samples,
                    seed: crate::rng::derive_seed(seed, f.id() as u64),
                }
            }
        };
        values.push(hom_density(w, f, method)?.value);
    }
    Ok(MomentVector::from_values(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motifs::{motif_family, MotifShape};

    fn motif(shape: MotifShape) -> Motif {
        motif_family(4)
            .unwrap()
            .into_iter()
            .find(|f| f.shape() == shape)
            .unwrap()
    }

    #[test]
    fn ground_truth_point_values() {
        let w0 = ground_truth_graphon::<f64>(0).unwrap();
        assert_eq!(w0.eval(0.5, 0.5), 0.25);
        let w3 = ground_truth_graphon::<f64>(3).unwrap();
        assert!((w3.eval(0.2, 0.6) - 0.4).abs() < 1e-15);
        let w1 = ground_truth_graphon::<f64>(1).unwrap();
        assert_eq!(w1.eval(0.0, 0.0), 1.0);
        assert!(ground_truth_graphon::<f64>(7).is_err());
    }

    #[test]
    fn ground_truth_symmetry_and_range() {
        let mut rng = seeded(11);
        for idx in 0..7 {
            let w = ground_truth_graphon::<f64>(idx).unwrap();
            for _ in 0..200 {
                let (x, y): (f64, f64) = (rng.gen(), rng.gen());
                let v = w.eval(x, y);
                assert!((v - w.eval(y, x)).abs() < 1e-12, "graphon {idx}");
                assert!((-1e-12..=1.0 + 1e-12).contains(&v), "graphon {idx}: {v}");
            }
        }
    }

    #[test]
    fn constant_one_samples_complete_graph() {
        let w = Graphon::constant(1.0f64);
        let (g, eta) = sample_graph(&w, 10, 3);
        assert_eq!(g.edge_count(), 45);
        assert_eq!(eta.len(), 10);
    }

    #[test]
    fn constant_zero_samples_empty_graph() {
        let w = Graphon::constant(0.0f64);
        let (g, _) = sample_graph(&w, 10, 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn half_density_concentrates() {
        let w = Graphon::constant(0.5f64);
        for seed in [1u64, 2, 3] {
            let (g, _) = sample_graph(&w, 1000, seed);
            let density = 2.0 * g.edge_count() as f64 / (1000.0 * 999.0);
            assert!((density - 0.5).abs() < 0.01, "seed {seed}: {density}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let w = ground_truth_graphon::<f64>(4).unwrap();
        let (g1, l1) = sample_graph(&w, 50, 99);
        let (g2, l2) = sample_graph(&w, 50, 99);
        assert_eq!(g1.edges(), g2.edges());
        assert_eq!(l1, l2);
    }

    #[test]
    fn mix_endpoints() {
        let w1 = ground_truth_graphon::<f64>(0).unwrap();
        let w2 = ground_truth_graphon::<f64>(6).unwrap();
        let m1 = mix(w1.clone(), w2.clone(), 1.0).unwrap();
        let m0 = mix(w1.clone(), w2.clone(), 0.0).unwrap();
        for i in 0..100 {
            for j in 0..100 {
                let (x, y) = (i as f64 / 99.0, j as f64 / 99.0);
                assert_eq!(m1.eval(x, y), w1.eval(x, y));
                assert_eq!(m0.eval(x, y), w2.eval(x, y));
            }
        }
        assert!(mix(w1.clone(), w2.clone(), 1.5).is_err());
        assert!(mix(w1, w2, -0.1).is_err());
    }

    #[test]
    fn constant_mix_is_constant() {
        let m = mix(Graphon::constant(0.2f64), Graphon::constant(0.8f64), 0.5).unwrap();
        assert!((m.eval(0.3, 0.9) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn edge_density_is_linear_in_mixing() {
        let w1 = ground_truth_graphon::<f64>(0).unwrap();
        let w2 = ground_truth_graphon::<f64>(3).unwrap();
        let lambda = 0.3;
        let mixed = mix(w1.clone(), w2.clone(), lambda).unwrap();
        let edge = motif(MotifShape::Edge);
        let q = DensityMethod::Quadrature { grid: 64 };
        let t_mix = hom_density(&mixed, &edge, q).unwrap().value;
        let t1 = hom_density(&w1, &edge, q).unwrap().value;
        let t2 = hom_density(&w2, &edge, q).unwrap().value;
        assert!((t_mix - (lambda * t1 + (1.0 - lambda) * t2)).abs() < 1e-6);
    }

    #[test]
    fn product_graphon_densities() {
        let w = ground_truth_graphon::<f64>(0).unwrap(); // x*y
        let edge = motif(MotifShape::Edge);
        let tri = motif(MotifShape::Triangle);
        let q = DensityMethod::Quadrature { grid: 64 };
        let t_edge = hom_density(&w, &edge, q).unwrap().value;
        assert!((t_edge - 0.25).abs() < 1e-4);
        let t_tri = hom_density(&w, &tri, q).unwrap().value;
        assert!((t_tri - 1.0 / 27.0).abs() < 1e-4);
    }

    #[test]
    fn constant_graphon_density_is_power() {
        let c = 0.7f64;
        let w = Graphon::constant(c);
        for shape in [MotifShape::Edge, MotifShape::Triangle, MotifShape::K4] {
            let f = motif(shape);
            let t = hom_density(&w, &f, DensityMethod::Quadrature { grid: 16 })
                .unwrap()
                .value;
            assert!((t - c.powi(f.edge_count() as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_rejects_five_vertex_motifs() {
        let family = motif_family(5).unwrap();
        let five = family.iter().find(|f| f.vertex_count() == 5).unwrap();
        let w = Graphon::constant(0.5f64);
        assert!(matches!(
            hom_density(&w, five, DensityMethod::Quadrature { grid: 8 }),
            Err(Error::QuadratureArity { k: 5 })
        ));
        // Monte Carlo handles it and reports a standard error.
        let est = hom_density(
            &w,
            five,
            DensityMethod::MonteCarlo {
                samples: 10_000,
                seed: 5,
            },
        )
        .unwrap();
        assert!(est.std_error.is_some());
        let expect = 0.5f64.powi(five.edge_count() as i32);
        assert!((est.value - expect).abs() < 1e-9);
    }

    #[test]
    fn quadrature_and_monte_carlo_agree() {
        let w = ground_truth_graphon::<f64>(0).unwrap();
        let family = motif_family(4).unwrap();
        for f in &family {
            let grid = if f.vertex_count() == 4 { 24 } else { 64 };
            let q = hom_density(&w, f, DensityMethod::Quadrature { grid })
                .unwrap()
                .value;
            let mc = hom_density(
                &w,
                f,
                DensityMethod::MonteCarlo {
                    samples: 1_000_000,
                    seed: 17,
                },
            )
            .unwrap();
            let se = mc.std_error.unwrap().max(1e-7);
            assert!(
                (q - mc.value).abs() < 3.0 * se + 1e-4,
                "motif {}: quad {q} vs mc {} (se {se})",
                f.id(),
                mc.value
            );
        }
    }

    #[test]
    fn theoretical_vector_endpoints() {
        let family = motif_family(4).unwrap();
        let zeros = theoretical_moment_vector(&Graphon::constant(0.0f64), &family).unwrap();
        assert!(zeros.values().iter().all(|&v| v == 0.0));
        let ones = theoretical_moment_vector(&Graphon::constant(1.0f64), &family).unwrap();
        assert!(ones.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn step_graphon_lookup_and_round_trip() {
        let s = StepGraphon::from_cells(2, vec![0.1f64, 0.4, 0.4, 0.9]).unwrap();
        assert_eq!(s.eval(0.0, 0.0), 0.1);
        assert_eq!(s.eval(0.49, 0.51), 0.4);
        assert_eq!(s.eval(1.0, 1.0), 0.9); // final cell closed
        let parsed = StepGraphon::<f64>::from_text(&s.to_text()).unwrap();
        assert_eq!(parsed, s);
    }

    #[test]
    fn step_graphon_rejects_asymmetry() {
        assert!(StepGraphon::from_cells(2, vec![0.1f64, 0.3, 0.4, 0.9]).is_err());
        assert!(StepGraphon::from_cells(2, vec![0.1f64, 0.3]).is_err());
    }

    #[test]
    fn every_constructor_is_symmetric_on_random_pairs() {
        let step = Graphon::Step(
            StepGraphon::from_cells(3, vec![0.1f64, 0.2, 0.3, 0.2, 0.5, 0.6, 0.3, 0.6, 0.9])
                .unwrap(),
        );
        let analytic = ground_truth_graphon::<f64>(5).unwrap();
        let mixed = mix(step.clone(), analytic.clone(), 0.37).unwrap();
        let mut rng = seeded(2);
        for _ in 0..10_000 {
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            for w in [&step, &analytic, &mixed] {
                assert_eq!(w.eval(x, y), w.eval(y, x));
            }
        }
    }

    #[test]
    fn f32_instantiation_matches_f64_closely() {
        let w64 = ground_truth_graphon::<f64>(2).unwrap();
        let w32 = ground_truth_graphon::<f32>(2).unwrap();
        assert!((w64.eval(0.3, 0.7) - w32.eval(0.3, 0.7) as f64).abs() < 1e-6);
    }
}
