//! Random-walk sampling and the exact-solve verification of the walk
//! hypotheses: hitting probabilities from disc centers (space), occupied
//! area (time), the Harnack ratio, and the weak Beurling decay.
//!
//! Sampling uses counter-based ChaCha streams keyed by (seed, instance,
//! purpose), so parallel corpus evaluation stays reproducible. Hitting and
//! occupation statistics are verified by exact solves; sampling is reserved
//! for the path laws solves cannot express (pairwise path intersections).

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::domain::{DiscreteDomain, DomainError};
use crate::graph::{EmbeddedGraph, GraphError, VertexId};
use crate::math;
use crate::network::Port;
use crate::potential::{DirichletSolver, PotentialError};

/// Deterministic stream for (seed, instance, purpose).
pub fn rng_stream(seed: u64, instance: u64, purpose: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    let mut state = seed ^ 0x243f6a8885a308d3;
    for (i, word) in [seed, instance, purpose, seed.rotate_left(32)].iter().enumerate() {
        state = splitmix64(state.wrapping_add(*word));
        key[i * 8..(i + 1) * 8].copy_from_slice(&state.to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub enum McError {
    StepCapExceeded,
    Potential(PotentialError),
    Domain(DomainError),
    Graph(GraphError),
    BadEndpoint,
}

impl fmt::Display for McError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McError::StepCapExceeded => write!(f, "walk exceeded the step cap"),
            McError::Potential(e) => write!(f, "{e}"),
            McError::Domain(e) => write!(f, "{e}"),
            McError::Graph(e) => write!(f, "{e}"),
            McError::BadEndpoint => write!(f, "endpoint out of range"),
        }
    }
}

impl core::error::Error for McError {}

impl From<PotentialError> for McError {
    fn from(e: PotentialError) -> Self {
        McError::Potential(e)
    }
}

impl From<DomainError> for McError {
    fn from(e: DomainError) -> Self {
        McError::Domain(e)
    }
}

impl From<GraphError> for McError {
    fn from(e: GraphError) -> Self {
        McError::Graph(e)
    }
}

const STEP_CAP: usize = 1_000_000_000;

/// One sampled walk: its vertex path (outer endpoints included when the walk
/// starts or ends on a boundary edge), the exit boundary edge, and the
/// occupation tally of squared local scales over visited interior vertices.
#[derive(Clone, Debug)]
pub struct WalkSample {
    pub vertices: Vec<VertexId>,
    pub exit: usize,
    pub steps: usize,
    pub occupation: f64,
}

/// Indicator-type Monte Carlo estimate.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmpiricalEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl EmpiricalEstimate {
    fn from_hits(hits: usize, n: usize, seed: u64) -> Self {
        let p = hits as f64 / n as f64;
        EmpiricalEstimate {
            estimate: p,
            stderr: math::sqrt(p * (1.0 - p) / n as f64),
            samples: n,
            seed,
        }
    }
}

/// Free walk sampler: per-vertex cumulative port weights.
pub struct WalkSampler<'d> {
    dom: &'d DiscreteDomain,
    cum: Vec<Vec<f64>>,
    scale_sq: Vec<f64>,
}

impl<'d> WalkSampler<'d> {
    pub fn new(dom: &'d DiscreteDomain) -> Self {
        let net = dom.network();
        let cum = net
            .ports
            .iter()
            .map(|ports| {
                let mut acc = 0.0;
                ports
                    .iter()
                    .map(|p| {
                        acc += match p {
                            Port::Interior { edge, .. } => net.int_edges[*edge].weight,
                            Port::Boundary(b) => net.bd[*b].weight,
                        };
                        acc
                    })
                    .collect()
            })
            .collect();
        let scale_sq = net
            .labels
            .iter()
            .map(|&v| {
                let r = dom.graph().local_scale(v).unwrap_or(0.0);
                r * r
            })
            .collect();
        WalkSampler { dom, cum, scale_sq }
    }

    /// Walk from an interior vertex until the first boundary edge is crossed.
    pub fn sample(&self, start: VertexId, rng: &mut ChaCha12Rng) -> Result<WalkSample, McError> {
        let net = self.dom.network();
        let mut cur = self.dom.interior_index(start)?;
        let mut vertices = Vec::new();
        let mut occupation = 0.0;
        let mut steps = 0;
        loop {
            vertices.push(net.labels[cur]);
            occupation += self.scale_sq[cur];
            let cum = &self.cum[cur];
            let total = *cum.last().expect("interior vertex has ports");
            let t = rng.gen_range(0.0..total);
            let k = cum.partition_point(|&c| c <= t);
            match net.ports[cur][k.min(cum.len() - 1)] {
                Port::Interior { to, .. } => cur = to,
                Port::Boundary(b) => {
                    vertices.push(net.bd[b].outer_label);
                    return Ok(WalkSample {
                        vertices,
                        exit: b,
                        steps: steps + 1,
                        occupation,
                    });
                }
            }
            steps += 1;
            if steps >= STEP_CAP {
                return Err(McError::StepCapExceeded);
            }
        }
    }
}

/// Hitting-frequency estimate of the harmonic measure of a boundary-edge set.
pub fn estimate_hm(
    dom: &DiscreteDomain,
    u: VertexId,
    edges: &[usize],
    n: usize,
    seed: u64,
) -> Result<EmpiricalEstimate, McError> {
    let sampler = WalkSampler::new(dom);
    let mut in_set = vec![false; dom.boundary().len()];
    for &e in edges {
        if e >= in_set.len() {
            return Err(McError::BadEndpoint);
        }
        in_set[e] = true;
    }
    let mut rng = rng_stream(seed, u as u64, 0x686d);
    let mut hits = 0;
    for _ in 0..n {
        if in_set[sampler.sample(u, &mut rng)?.exit] {
            hits += 1;
        }
    }
    Ok(EmpiricalEstimate::from_hits(hits, n, seed))
}

/// Doob-transformed sampler conditioned to exit through one boundary edge:
/// transitions are proportional to w * h with h the Z-field of the target.
pub struct ConditionedSampler<'d> {
    dom: &'d DiscreteDomain,
    target: usize,
    cum: Vec<Vec<f64>>,
}

impl<'d> ConditionedSampler<'d> {
    pub fn new(dom: &'d DiscreteDomain, target: usize) -> Result<Self, McError> {
        if target >= dom.boundary().len() {
            return Err(McError::BadEndpoint);
        }
        let net = dom.network();
        let solver = DirichletSolver::new(net)?;
        let h = solver.z_field(&[target])?;
        let cum = net
            .ports
            .iter()
            .map(|ports| {
                let mut acc = 0.0;
                ports
                    .iter()
                    .map(|p| {
                        acc += match p {
                            Port::Interior { to, edge, .. } => {
                                net.int_edges[*edge].weight * h.interior[*to]
                            }
                            Port::Boundary(b) => {
                                if *b == target {
                                    net.bd[*b].weight / net.bd[*b].mu_outer
                                } else {
                                    0.0
                                }
                            }
                        };
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(ConditionedSampler { dom, target, cum })
    }

    /// Per-step normalization defect: the transition table at each vertex must
    /// sum to mu_v * h(v); returns the worst relative mismatch.
    pub fn normalization_defect(&self) -> f64 {
        let net = self.dom.network();
        let solver = DirichletSolver::new(net).expect("solver");
        let h = solver.z_field(&[self.target]).expect("field");
        let mut worst = 0.0f64;
        for i in 0..net.interior_count() {
            let total = *self.cum[i].last().expect("ports");
            let expected = net.mu[i] * h.interior[i];
            if expected > 0.0 {
                worst = worst.max(math::abs(total / expected - 1.0));
            }
        }
        worst
    }

    /// Conditioned walk entering from boundary edge `from` (forced first step
    /// onto its inner vertex) and exiting at the target with probability one.
    pub fn sample(&self, from: usize, rng: &mut ChaCha12Rng) -> Result<WalkSample, McError> {
        if from >= self.dom.boundary().len() {
            return Err(McError::BadEndpoint);
        }
        let net = self.dom.network();
        let mut vertices = vec![net.bd[from].outer_label];
        let mut cur = net.bd[from].int;
        let mut occupation = 0.0;
        let mut steps = 1;
        loop {
            vertices.push(net.labels[cur]);
            let r = self.dom.graph().local_scale(net.labels[cur]).unwrap_or(0.0);
            occupation += r * r;
            let cum = &self.cum[cur];
            let total = *cum.last().expect("ports");
            let t = rng.gen_range(0.0..total);
            let k = cum.partition_point(|&c| c <= t);
            match net.ports[cur][k.min(cum.len() - 1)] {
                Port::Interior { to, .. } => cur = to,
                Port::Boundary(b) => {
                    debug_assert_eq!(b, self.target);
                    vertices.push(net.bd[b].outer_label);
                    return Ok(WalkSample {
                        vertices,
                        exit: b,
                        steps: steps + 1,
                        occupation,
                    });
                }
            }
            steps += 1;
            if steps >= STEP_CAP {
                return Err(McError::StepCapExceeded);
            }
        }
    }
}

/// Estimate of P[RW(a;d) and RW(b;c) share a vertex] over independent
/// conditioned pairs. Comparable to the squared ratio (X/Y)^2 of the
/// cross-ratios; the exact identity belongs to the loop-erased variant.
pub fn intersection_probability(
    dom: &DiscreteDomain,
    quad: &crate::domain::Quadrilateral,
    n: usize,
    seed: u64,
) -> Result<EmpiricalEstimate, McError> {
    let [a, b, c, d] = quad.marks;
    let to_d = ConditionedSampler::new(dom, d)?;
    let to_c = ConditionedSampler::new(dom, c)?;
    let mut rng = rng_stream(seed, 0, 0x787371);
    let nverts = dom.graph().vertex_count();
    let mut stamp = vec![0u32; nverts];
    let mut hits = 0;
    for round in 1..=n {
        let p1 = to_d.sample(a, &mut rng)?;
        let p2 = to_c.sample(b, &mut rng)?;
        for &v in &p1.vertices {
            stamp[v] = round as u32;
        }
        if p2.vertices.iter().any(|&v| stamp[v] == round as u32) {
            hits += 1;
        }
    }
    Ok(EmpiricalEstimate::from_hits(hits, n, seed))
}

/// Chronological loop erasure of a vertex path.
pub fn loop_erase(path: &[VertexId]) -> Vec<VertexId> {
    let mut erased: Vec<VertexId> = Vec::new();
    for &v in path {
        if let Some(pos) = erased.iter().position(|&u| u == v) {
            erased.truncate(pos + 1);
        } else {
            erased.push(v);
        }
    }
    erased
}

/// Estimate of P[RW(b;c) meets the loop-erasure of RW(a;d)]: equals
/// Z(a;c) Z(b;d) / (Z(a;d) Z(b;c)) = (X/Y)^2 exactly, since tail-swapping at
/// the first meeting point of the second walk with the loop-erased first walk
/// is a weight-preserving bijection onto the always-crossing pairs.
pub fn intersection_probability_loop_erased(
    dom: &DiscreteDomain,
    quad: &crate::domain::Quadrilateral,
    n: usize,
    seed: u64,
) -> Result<EmpiricalEstimate, McError> {
    let [a, b, c, d] = quad.marks;
    let to_d = ConditionedSampler::new(dom, d)?;
    let to_c = ConditionedSampler::new(dom, c)?;
    let mut rng = rng_stream(seed, 1, 0x787371);
    let nverts = dom.graph().vertex_count();
    let mut stamp = vec![0u32; nverts];
    let mut hits = 0;
    for round in 1..=n {
        let p1 = to_d.sample(a, &mut rng)?;
        let p2 = to_c.sample(b, &mut rng)?;
        for &v in &loop_erase(&p1.vertices) {
            stamp[v] = round as u32;
        }
        if p2.vertices.iter().any(|&v| stamp[v] == round as u32) {
            hits += 1;
        }
    }
    Ok(EmpiricalEstimate::from_hits(hits, n, seed))
}

/// Estimate of P[conditioned a->b walk meets the inner disc of u].
pub fn intersection_ball_probability(
    dom: &DiscreteDomain,
    a: usize,
    b: usize,
    u: VertexId,
    n: usize,
    seed: u64,
) -> Result<EmpiricalEstimate, McError> {
    let sampler = ConditionedSampler::new(dom, b)?;
    let disc = dom.inner_disc(u)?;
    let mut in_disc = vec![false; dom.graph().vertex_count()];
    for &v in &disc.interior {
        in_disc[v] = true;
    }
    let mut rng = rng_stream(seed, u as u64, 0x62616c);
    let mut hits = 0;
    for _ in 0..n {
        let p = sampler.sample(a, &mut rng)?;
        if p.vertices.iter().any(|&v| in_disc[v]) {
            hits += 1;
        }
    }
    Ok(EmpiricalEstimate::from_hits(hits, n, seed))
}

/// Exact hitting probability of a direction sector from the center of a
/// discrete disc: a Dirichlet solve, no sampling.
pub fn test_property_s(
    graph: &Arc<EmbeddedGraph>,
    u: VertexId,
    r: f64,
    interval: (f64, f64),
) -> Result<f64, McError> {
    let disc = graph.discrete_disc(u, r)?;
    let dom = DiscreteDomain::new(Arc::clone(graph), &disc.interior)?;
    let pu = graph.position(u);
    let (lo, len) = interval;
    let edges: Vec<usize> = dom
        .boundary()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            let ang = math::atan2(
                graph.position(e.outer).y - pu.y,
                graph.position(e.outer).x - pu.x,
            );
            let mut t = ang - lo;
            while t < 0.0 {
                t += math::TAU;
            }
            while t >= math::TAU {
                t -= math::TAU;
            }
            t <= len
        })
        .map(|(i, _)| i)
        .collect();
    let solver = DirichletSolver::new(dom.network())?;
    Ok(solver.harmonic_measure(dom.interior_index(u)?, &edges)?)
}

/// Minimum sector-hitting probability over four rotated sectors of the given
/// length at each radius; the empirical space constant.
pub fn property_s_sweep(
    graph: &Arc<EmbeddedGraph>,
    u: VertexId,
    radii: &[f64],
    sector_len: f64,
) -> Result<f64, McError> {
    let mut worst = f64::INFINITY;
    for &r in radii {
        for k in 0..4 {
            let lo = k as f64 * math::PI / 2.0;
            worst = worst.min(test_property_s(graph, u, r, (lo, sector_len))?);
        }
    }
    Ok(worst)
}

/// Occupied-area statistic sum r_v^2 G(v;u) / r^2 on the disc of radius r.
pub fn test_property_t(graph: &Arc<EmbeddedGraph>, u: VertexId, r: f64) -> Result<f64, McError> {
    let disc = graph.discrete_disc(u, r)?;
    let dom = DiscreteDomain::new(Arc::clone(graph), &disc.interior)?;
    let solver = DirichletSolver::new(dom.network())?;
    let g = solver.green(dom.interior_index(u)?)?;
    let mut total = 0.0;
    for (i, &v) in dom.interior().iter().enumerate() {
        let rv = graph.local_scale(v)?;
        total += rv * rv * g.interior[i];
    }
    Ok(total / (r * r))
}

/// Worst min/max ratio over Int B_r(u) of harmonic measures of sector arcs of
/// the larger disc B_{rho r}(u); the empirical Harnack constant c(rho).
pub fn test_harnack(
    graph: &Arc<EmbeddedGraph>,
    u: VertexId,
    r: f64,
    rho: f64,
    sectors: usize,
) -> Result<f64, McError> {
    let big = graph.discrete_disc(u, rho * r)?;
    let dom = DiscreteDomain::new(Arc::clone(graph), &big.interior)?;
    let small = graph.discrete_disc(u, r)?;
    let idx: Vec<usize> = small
        .interior
        .iter()
        .map(|&v| dom.interior_index(v))
        .collect::<Result<_, _>>()?;
    let pu = graph.position(u);
    let solver = DirichletSolver::new(dom.network())?;
    let mut worst: f64 = 1.0;
    for k in 0..sectors {
        let lo = k as f64 * math::TAU / sectors as f64;
        let hi = lo + math::TAU / sectors as f64;
        let edges: Vec<usize> = dom
            .boundary()
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                let ang = math::atan2(
                    graph.position(e.outer).y - pu.y,
                    graph.position(e.outer).x - pu.x,
                );
                let mut t = ang - lo;
                while t < 0.0 {
                    t += math::TAU;
                }
                t < hi - lo
            })
            .map(|(i, _)| i)
            .collect();
        if edges.is_empty() {
            continue;
        }
        let h = solver.harmonic_measure_field(&edges)?;
        let mut mn = f64::INFINITY;
        let mut mx = f64::NEG_INFINITY;
        for &i in &idx {
            mn = mn.min(h.interior[i]);
            mx = mx.max(h.interior[i]);
        }
        if mx > 0.0 {
            worst = worst.min(mn / mx);
        }
    }
    Ok(worst)
}

/// Harmonic measure of `edges` from `u`, together with the ratio
/// dist_domain(u; E) / dist(u; boundary): the decay variables of the weak
/// Beurling estimate.
pub fn test_beurling(
    dom: &DiscreteDomain,
    u: VertexId,
    edges: &[usize],
) -> Result<(f64, f64), McError> {
    let solver = DirichletSolver::new(dom.network())?;
    let ui = dom.interior_index(u)?;
    let omega = solver.harmonic_measure(ui, edges)?;

    // dist_domain(u;E) = inf { r : u connected to E inside the r-disc }:
    // minimax over paths of the distance from u, Dijkstra with max-composition.
    let net = dom.network();
    let g = dom.graph();
    let pu = g.position(u);
    let n = net.interior_count();
    let mut best = vec![f64::INFINITY; n];
    best[ui] = 0.0;
    let mut heap = alloc::collections::BinaryHeap::new();
    heap.push(core::cmp::Reverse((crate::graph::OrdF64(0.0), ui)));
    let mut target = vec![false; dom.boundary().len()];
    for &e in edges {
        if e >= target.len() {
            return Err(McError::BadEndpoint);
        }
        target[e] = true;
    }
    let mut reach = f64::INFINITY;
    while let Some(core::cmp::Reverse((crate::graph::OrdF64(d), v))) = heap.pop() {
        if d > best[v] {
            continue;
        }
        for p in &net.ports[v] {
            match p {
                Port::Interior { to, .. } => {
                    let dist = pu.dist(&g.position(net.labels[*to]));
                    let nd = d.max(dist);
                    if nd < best[*to] {
                        best[*to] = nd;
                        heap.push(core::cmp::Reverse((crate::graph::OrdF64(nd), *to)));
                    }
                }
                Port::Boundary(b) => {
                    if target[*b] {
                        let dist = pu.dist(&g.position(net.bd[*b].outer_label));
                        reach = reach.min(d.max(dist));
                    }
                }
            }
        }
    }
    let d_bd = dom.distance_to_boundary(u)?;
    Ok((omega, reach / d_bd))
}
