//! Realization of the random graph over a cloud via the connection
//! function, plus degrees and connected components.
//!
//! Edge tests use pair-keyed uniforms: the uniform deciding pair {i, j}
//! is a pure function of (seed, i, j). Rebuilding the same cloud at a
//! larger connection scale therefore can only add edges, which is the
//! exact monotone coupling the lambda sweeps rely on.

use crate::budget::Budget;
use crate::cloud::{distance, Boundary, PointCloud};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::pair_uniform;

/// Particles this close to a face (in units of length) count as touching
/// it for the spanning proxy; one unit is the typical nearest-neighbor
/// scale at unit intensity and matches the cell size of the grid builder.
/// Clamped to a quarter of the box so small boxes stay meaningful.
pub const SPANNING_MARGIN: f64 = 1.0;

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]]; // path halving
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Size of the component containing `x`.
    pub fn component_size(&mut self, x: usize) -> usize {
        let root = self.find(x);
        self.size[root]
    }
}

/// Build instrumentation: how many pairs existed, how many were actually
/// tested, and the resulting bound on expected missed edges
/// (`epsilon * skipped`, from `1 - e^-x <= x`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildStats {
    pub pairs_total: u64,
    pub pairs_tested: u64,
    pub pairs_skipped: u64,
    pub epsilon: f64,
    pub missed_edge_bound: f64,
}

/// A realized graph over a cloud: edge list (each pair stored once with
/// i < j, sorted lexicographically), per-particle degrees and a
/// disjoint-set forest over particle ids.
#[derive(Debug, Clone)]
pub struct Graph {
    pub n: usize,
    pub palm: bool,
    pub edges: Vec<(usize, usize)>,
    pub degree: Vec<u32>,
    pub dsf: DisjointSet,
    pub stats: BuildStats,
}

impl Graph {
    /// Edge-list export: one `i j` line per edge, lexicographic order.
    pub fn edge_list_text(&self) -> String {
        let mut out = String::new();
        for &(i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    /// Component export: one `id component_root` line per particle, the
    /// root being the smallest id in the particle's component.
    pub fn components_text(&self) -> String {
        let mut dsf = self.dsf.clone();
        let mut min_of_root = vec![usize::MAX; self.n];
        for id in 0..self.n {
            let r = dsf.find(id);
            min_of_root[r] = min_of_root[r].min(id);
        }
        let mut out = String::new();
        for id in 0..self.n {
            let r = dsf.find(id);
            out.push_str(&format!("{id} {}\n", min_of_root[r]));
        }
        out
    }
}

/// Connected-component summary of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    /// Component sizes in descending order; they sum to the particle count.
    pub sizes: Vec<usize>,
    /// Size of the origin particle's component (palm clouds only).
    pub origin_cluster_size: Option<usize>,
    /// Whether the origin's component touches two opposite faces
    /// (palm clouds under Free boundary only).
    pub spanning: Option<bool>,
}

/// Probability of an edge between weights `w_x`, `w_y` at distance `r`:
/// `1 - exp(-lambda w_x w_y r^-alpha)`.
pub fn connection_probability(params: &ModelParams, w_x: f64, w_y: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::DegeneratePair { a: usize::MAX, b: usize::MAX });
    }
    if !(w_x >= 1.0 && w_y >= 1.0) {
        return Err(Error::Domain {
            what: "weights",
            reason: format!("weights must be >= 1, got {w_x}, {w_y}"),
        });
    }
    Ok(-(-params.lambda * w_x * w_y * r.powf(-params.alpha)).exp_m1())
}

fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

fn check_pair_budget(n: usize, budget: &Budget) -> Result<()> {
    let total = pair_count(n);
    if total > budget.max_pairs {
        return Err(Error::Capacity {
            what: "pair count n(n-1)/2",
            requested: total,
            budget: budget.max_pairs,
        });
    }
    Ok(())
}

/// Exact reference builder: every unordered pair {i, j} is tested, with
/// an edge present iff the pair-keyed uniform falls below the connection
/// probability.
pub fn build_graph(params: &ModelParams, cloud: &PointCloud, seed: u64) -> Result<Graph> {
    build_graph_with_budget(params, cloud, seed, &Budget::default())
}

pub fn build_graph_with_budget(
    params: &ModelParams,
    cloud: &PointCloud,
    seed: u64,
    budget: &Budget,
) -> Result<Graph> {
    params.validate()?;
    check_pair_budget(cloud.len(), budget)?;
    let n = cloud.len();
    let mut edges = Vec::new();
    let mut degree = vec![0u32; n];
    let mut dsf = DisjointSet::new(n);
    for i in 0..n {
        let pi = &cloud.particles[i];
        for j in (i + 1)..n {
            let pj = &cloud.particles[j];
            let r = distance(&cloud.domain, &pi.position, &pj.position);
            if r == 0.0 {
                return Err(Error::DegeneratePair { a: i, b: j });
            }
            let p = connection_probability(params, pi.weight, pj.weight, r)?;
            if pair_uniform(seed, i, j) < p {
                edges.push((i, j));
                degree[i] += 1;
                degree[j] += 1;
                dsf.union(i, j);
            }
        }
    }
    let total = pair_count(n);
    Ok(Graph {
        n,
        palm: cloud.palm,
        edges,
        degree,
        dsf,
        stats: BuildStats {
            pairs_total: total,
            pairs_tested: total,
            pairs_skipped: 0,
            epsilon: 0.0,
            missed_edge_bound: 0.0,
        },
    })
}

/// Uniform cell grid over the box with per-cell maximum weight, used to
/// prune pairs whose connection probability provably stays below the
/// cutoff.
struct CellGrid {
    m: usize,            // cells per axis
    cell_side: f64,
    cells: Vec<Vec<usize>>,
    max_weight: Vec<f64>,
    d: usize,
}

impl CellGrid {
    fn build(cloud: &PointCloud, r_cut: f64) -> CellGrid {
        let d = cloud.domain.d as usize;
        let side = cloud.domain.side;
        let n = cloud.len();
        // Cells no smaller than a quarter of the prune radius keep the
        // neighbor stencil small; caps keep the cell array bounded.
        let cap_axis = match d {
            1 => 4096usize,
            2 => 512,
            _ => ((1usize << 18) as f64).powf(1.0 / d as f64).floor() as usize,
        };
        let occupancy_cap = ((n as f64).powf(1.0 / d as f64).ceil() as usize * 2).max(1);
        let target = (r_cut / 4.0).max(side / cap_axis as f64);
        let m = ((side / target).floor() as usize)
            .clamp(1, cap_axis.min(occupancy_cap));
        let cell_side = side / m as f64;
        let mut cells = vec![Vec::new(); m.pow(d as u32)];
        let mut max_weight = vec![0.0f64; cells.len()];
        for (idx, p) in cloud.particles.iter().enumerate() {
            let mut flat = 0usize;
            for axis in 0..d {
                let c = (((p.position[axis] + side / 2.0) / cell_side).floor() as isize)
                    .clamp(0, m as isize - 1) as usize;
                flat = flat * m + c;
            }
            cells[flat].push(idx);
            max_weight[flat] = max_weight[flat].max(p.weight);
        }
        CellGrid { m, cell_side, cells, max_weight, d }
    }

    fn coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.d];
        for axis in (0..self.d).rev() {
            out[axis] = flat % self.m;
            flat /= self.m;
        }
        out
    }

    /// Minimum possible distance between points of two cells given the
    /// boundary mode (0 for identical or adjacent cells).
    fn min_distance(&self, a: &[usize], b: &[usize], boundary: Boundary) -> f64 {
        let mut acc = 0.0;
        for axis in 0..self.d {
            let mut dc = a[axis].abs_diff(b[axis]);
            if boundary == Boundary::Torus {
                dc = dc.min(self.m - dc);
            }
            let gap = dc.saturating_sub(1) as f64 * self.cell_side;
            acc += gap * gap;
        }
        acc.sqrt()
    }
}

/// Performance builder. With `epsilon = 0` the contract is identical to
/// [`build_graph`]; for `epsilon > 0`, exactly the pairs whose
/// probability upper bound `lambda w_x w_y r^-alpha` falls below
/// `epsilon` are skipped without consuming randomness. Whole blocks of
/// cell pairs are pruned via per-cell maximum weights before per-pair
/// bounds are consulted, and all tested pairs use the same pair-keyed
/// uniforms as the exact builder.
pub fn build_graph_fast(
    params: &ModelParams,
    cloud: &PointCloud,
    seed: u64,
    epsilon: f64,
) -> Result<Graph> {
    build_graph_fast_with_budget(params, cloud, seed, epsilon, &Budget::default())
}

pub fn build_graph_fast_with_budget(
    params: &ModelParams,
    cloud: &PointCloud,
    seed: u64,
    epsilon: f64,
    budget: &Budget,
) -> Result<Graph> {
    params.validate()?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Domain {
            what: "epsilon",
            reason: format!("cutoff must lie in [0, 1), got {epsilon}"),
        });
    }
    if epsilon == 0.0 {
        return build_graph_with_budget(params, cloud, seed, budget);
    }
    check_pair_budget(cloud.len(), budget)?;
    let n = cloud.len();
    let boundary = cloud.domain.boundary;
    let w_max = cloud
        .particles
        .iter()
        .map(|p| p.weight)
        .fold(0.0f64, f64::max)
        .max(1.0);
    // Beyond this distance no pair can reach the cutoff even with the
    // two globally heaviest weights.
    let r_cut = (params.lambda * w_max * w_max / epsilon)
        .powf(1.0 / params.alpha)
        .min(cloud.domain.side * (cloud.domain.d as f64).sqrt());
    let grid = CellGrid::build(cloud, r_cut);

    let mut edges = Vec::new();
    let mut degree = vec![0u32; n];
    let mut dsf = DisjointSet::new(n);
    let mut tested = 0u64;
    let mut skipped = 0u64;

    let n_cells = grid.cells.len();
    let coords: Vec<Vec<usize>> = (0..n_cells).map(|c| grid.coords(c)).collect();
    for ca in 0..n_cells {
        if grid.cells[ca].is_empty() {
            continue;
        }
        for cb in ca..n_cells {
            if grid.cells[cb].is_empty() {
                continue;
            }
            let d_min = grid.min_distance(&coords[ca], &coords[cb], boundary);
            if d_min > 0.0 {
                let block_bound =
                    params.lambda * grid.max_weight[ca] * grid.max_weight[cb]
                        * d_min.powf(-params.alpha);
                if block_bound < epsilon {
                    let (la, lb) = (grid.cells[ca].len() as u64, grid.cells[cb].len() as u64);
                    skipped += if ca == cb { la * (la - 1) / 2 } else { la * lb };
                    continue;
                }
            }
            let cell_a = &grid.cells[ca];
            let cell_b = &grid.cells[cb];
            for (ai, &i0) in cell_a.iter().enumerate() {
                let bs: &[usize] = if ca == cb { &cell_b[ai + 1..] } else { cell_b };
                for &j0 in bs {
                    let (i, j) = if i0 < j0 { (i0, j0) } else { (j0, i0) };
                    let pi = &cloud.particles[i];
                    let pj = &cloud.particles[j];
                    let r = distance(&cloud.domain, &pi.position, &pj.position);
                    if r == 0.0 {
                        return Err(Error::DegeneratePair { a: i, b: j });
                    }
                    let bound = params.lambda * pi.weight * pj.weight * r.powf(-params.alpha);
                    if bound < epsilon {
                        skipped += 1;
                        continue;
                    }
                    tested += 1;
                    let p = -(-bound).exp_m1();
                    if pair_uniform(seed, i, j) < p {
                        edges.push((i, j));
                        degree[i] += 1;
                        degree[j] += 1;
                        dsf.union(i, j);
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    let total = pair_count(n);
    debug_assert_eq!(tested + skipped, total);
    Ok(Graph {
        n,
        palm: cloud.palm,
        edges,
        degree,
        dsf,
        stats: BuildStats {
            pairs_total: total,
            pairs_tested: tested,
            pairs_skipped: skipped,
            epsilon,
            missed_edge_bound: epsilon * skipped as f64,
        },
    })
}

/// Incident-edge count of a particle.
pub fn degree_of(graph: &Graph, id: usize) -> Result<u32> {
    graph
        .degree
        .get(id)
        .copied()
        .ok_or(Error::UnknownId { id, len: graph.n })
}

/// Component sizes, the origin's component size (palm clouds) and the
/// spanning flag (origin component touching two opposite faces, Free
/// boundary only; particles within [`SPANNING_MARGIN`] of a face count
/// as touching it).
pub fn components(graph: &Graph, cloud: &PointCloud) -> ClusterStats {
    assert_eq!(graph.n, cloud.len(), "graph was not built from this cloud");
    let mut dsf = graph.dsf.clone();
    let mut size_of_root = std::collections::HashMap::new();
    for id in 0..graph.n {
        *size_of_root.entry(dsf.find(id)).or_insert(0usize) += 1;
    }
    let mut sizes: Vec<usize> = size_of_root.values().copied().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));

    let origin_cluster_size = if cloud.palm && graph.n > 0 {
        Some(dsf.component_size(0))
    } else {
        None
    };

    let spanning = if cloud.palm && graph.n > 0 && cloud.domain.boundary == Boundary::Free {
        let origin_root = dsf.find(0);
        let half = cloud.domain.side / 2.0;
        let margin = SPANNING_MARGIN.min(cloud.domain.side / 4.0);
        let d = cloud.domain.d as usize;
        let mut lo = vec![false; d];
        let mut hi = vec![false; d];
        for id in 0..graph.n {
            if dsf.find(id) != origin_root {
                continue;
            }
            let pos = &cloud.particles[id].position;
            for axis in 0..d {
                if pos[axis] <= -half + margin {
                    lo[axis] = true;
                }
                if pos[axis] >= half - margin {
                    hi[axis] = true;
                }
            }
        }
        Some((0..d).any(|axis| lo[axis] && hi[axis]))
    } else {
        None
    };

    ClusterStats { sizes, origin_cluster_size, spanning }
}

/// Degree of the palm particle computed directly from the pair uniforms
/// of pairs (0, j), without materializing the full graph. Agrees exactly
/// with `degree_of(build_graph(...), 0)` because the same keyed uniforms
/// decide each pair.
pub fn palm_degree(params: &ModelParams, cloud: &PointCloud, seed: u64) -> Result<u32> {
    assert!(cloud.palm, "palm_degree needs a palm cloud");
    let origin = &cloud.particles[0];
    let mut deg = 0u32;
    for j in 1..cloud.len() {
        let pj = &cloud.particles[j];
        let r = distance(&cloud.domain, &origin.position, &pj.position);
        if r == 0.0 {
            return Err(Error::DegeneratePair { a: 0, b: j });
        }
        let p = connection_probability(params, origin.weight, pj.weight, r)?;
        if pair_uniform(seed, 0, j) < p {
            deg += 1;
        }
    }
    Ok(deg)
}
