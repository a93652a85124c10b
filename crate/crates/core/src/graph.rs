//! Weighted planar graphs embedded in the plane with straight edges.
//!
//! The embedding carries a rotation system (counterclockwise order of
//! incident edges at every vertex, derived from edge angles) from which the
//! face structure is computed by dart traversal. Structural constants of the
//! embedding assumptions — weight/mass bounds, flat-angle margin, local edge
//! comparability, connector-path stretch — are reported by [`EmbeddedGraph::validate`].

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::math;

pub type VertexId = usize;
pub type EdgeId = usize;

/// A point of the plane, in plane units.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        math::hypot(other.x - self.x, other.y - self.y)
    }

    fn angle_to(&self, other: &Point) -> f64 {
        math::atan2(other.y - self.y, other.x - self.x)
    }
}

/// Shoelace signed area of a closed polygon (positive = counterclockwise).
pub(crate) fn polygon_signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) - 1e-12
        && p.x <= a.x.max(b.x) + 1e-12
        && p.y >= a.y.min(b.y) - 1e-12
        && p.y <= a.y.max(b.y) + 1e-12
}

/// Segment intersection test including endpoint touching.
pub(crate) fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1.abs() <= 1e-12 && on_segment(c, d, a))
        || (d2.abs() <= 1e-12 && on_segment(c, d, b))
        || (d3.abs() <= 1e-12 && on_segment(a, b, c))
        || (d4.abs() <= 1e-12 && on_segment(a, b, d))
}

fn point_in_polygon(pts: &[Point], p: Point) -> bool {
    // Ray cast; boundary points are handled separately by the segment tests.
    let mut inside = false;
    let n = pts.len();
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (pts[i], pts[j]);
        if (pi.y > p.y) != (pj.y > p.y) {
            let x = pj.x + (p.y - pj.y) / (pi.y - pj.y) * (pi.x - pj.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Oriented half-edge. Dart `2*e` points from `edges[e].0` to `edges[e].1`,
/// dart `2*e + 1` the other way.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dart(pub usize);

impl Dart {
    pub fn edge(self) -> EdgeId {
        self.0 >> 1
    }

    pub fn reversed(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

/// A face of the embedding: the cycle of darts having this face on their left.
#[derive(Clone, Debug)]
pub struct Face {
    pub darts: Vec<Dart>,
    pub is_outer: bool,
    pub centroid: Point,
    pub signed_area: f64,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.darts.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    BadEdgeEndpoint { edge: usize },
    NonFiniteInput,
    NonPositiveWeight { edge: usize },
    ZeroLengthEdge { edge: usize },
    DuplicateEdge { u: VertexId, v: VertexId },
    DuplicatePosition { u: VertexId, v: VertexId },
    Disconnected,
    AngleTie { vertex: VertexId },
    EulerCheckFailed { v: usize, e: usize, f: usize },
    MultipleOuterFaces,
    IsolatedVertex { vertex: VertexId },
    NotAnEdge { u: VertexId, v: VertexId },
    InvalidRadius,
    SameVertex,
    NoConnectorPath { u: VertexId, v: VertexId },
    EdgeCrossing { e1: EdgeId, e2: EdgeId },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::BadEdgeEndpoint { edge } => write!(f, "edge {edge} references a missing vertex"),
            GraphError::NonFiniteInput => write!(f, "positions and weights must be finite"),
            GraphError::NonPositiveWeight { edge } => write!(f, "edge {edge} has non-positive weight"),
            GraphError::ZeroLengthEdge { edge } => write!(f, "edge {edge} has zero length"),
            GraphError::DuplicateEdge { u, v } => write!(f, "duplicate edge between {u} and {v}"),
            GraphError::DuplicatePosition { u, v } => {
                write!(f, "vertices {u} and {v} share a position")
            }
            GraphError::Disconnected => write!(f, "graph is not connected"),
            GraphError::AngleTie { vertex } => {
                write!(f, "two edges at vertex {vertex} leave at the same angle")
            }
            GraphError::EulerCheckFailed { v, e, f: faces } => {
                write!(f, "face traversal failed the Euler check: V={v} E={e} F={faces}")
            }
            GraphError::MultipleOuterFaces => {
                write!(f, "embedding has more than one negative-area face")
            }
            GraphError::IsolatedVertex { vertex } => write!(f, "vertex {vertex} has no incident edge"),
            GraphError::NotAnEdge { u, v } => write!(f, "({u},{v}) is not an edge"),
            GraphError::InvalidRadius => write!(f, "radius must be positive"),
            GraphError::SameVertex => write!(f, "endpoints must differ"),
            GraphError::NoConnectorPath { u, v } => {
                write!(f, "no connector path between {u} and {v}")
            }
            GraphError::EdgeCrossing { e1, e2 } => write!(f, "edges {e1} and {e2} cross"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Tightest structural constants realized by a finite embedded graph.
///
/// `eta0` skips wedges that open into the outer face: a finite patch always
/// has reflex outer angles along its hull, which say nothing about the bulk
/// embedding quality.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StructureReport {
    /// Largest c with every edge weight >= c and every vertex mass <= 1/c.
    pub varpi0: f64,
    /// Pi minus the largest inner-face angle between consecutive incident edges.
    pub eta0: f64,
    /// Max over vertices of (max incident edge length) / (min incident edge length).
    pub kappa0: f64,
    /// Max sampled connector-path stretch Length(L_uv) / |v - u|.
    pub nu0: f64,
    /// Number of vertex pairs the nu0 estimate was sampled on.
    pub nu0_samples: usize,
    pub satisfied_a: bool,
    pub satisfied_b: bool,
    pub satisfied_c: bool,
}

/// Discrete disc: the connected component of `{v : |v-u| < r}` containing `u`,
/// plus its neighbors.
#[derive(Clone, Debug)]
pub struct Disc {
    pub interior: Vec<VertexId>,
    pub boundary: Vec<VertexId>,
}

/// Nearest-neighbor path whose vertices all lie on faces crossed by the
/// straight segment between its endpoints.
#[derive(Clone, Debug)]
pub struct ConnectorPath {
    pub vertices: Vec<VertexId>,
    pub length: f64,
    pub stretch: f64,
}

/// Immutable weighted planar graph with straight-segment embedding.
#[derive(Clone, Debug)]
pub struct EmbeddedGraph {
    positions: Vec<Point>,
    edges: Vec<(VertexId, VertexId, f64)>,
    /// Per-vertex darts leaving the vertex, in counterclockwise angular order.
    rotation: Vec<Vec<Dart>>,
    /// Position of each dart within the rotation list of its tail.
    rotation_pos: Vec<usize>,
    faces: Vec<Face>,
    dart_face: Vec<usize>,
    outer_face: usize,
    mu: Vec<f64>,
    local_scale: Vec<f64>,
}

impl EmbeddedGraph {
    /// Builds the embedding: validates input, derives the rotation system by
    /// angular sort, traverses faces, and checks `V - E + F = 2`.
    pub fn build(
        positions: Vec<Point>,
        edges: Vec<(VertexId, VertexId, f64)>,
    ) -> Result<Self, GraphError> {
        let n = positions.len();
        for p in &positions {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(GraphError::NonFiniteInput);
            }
        }
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(GraphError::BadEdgeEndpoint { edge: i });
            }
            if !w.is_finite() {
                return Err(GraphError::NonFiniteInput);
            }
            if w <= 0.0 {
                return Err(GraphError::NonPositiveWeight { edge: i });
            }
            if u == v || positions[u].dist(&positions[v]) <= 1e-12 {
                return Err(GraphError::ZeroLengthEdge { edge: i });
            }
        }
        // Coincident positions: sort lexicographically and compare within the
        // x-window, so the check stays near-linear.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by(|&a, &b| {
            positions[a]
                .x
                .total_cmp(&positions[b].x)
                .then(positions[a].y.total_cmp(&positions[b].y))
        });
        for i in 0..n {
            let a = order[i];
            for &b in order[i + 1..].iter() {
                if positions[b].x - positions[a].x > 1e-12 {
                    break;
                }
                if math::abs(positions[b].y - positions[a].y) <= 1e-12 {
                    return Err(GraphError::DuplicatePosition {
                        u: a.min(b),
                        v: a.max(b),
                    });
                }
            }
        }
        let mut seen_pairs: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(u, v, _)| (u.min(v), u.max(v)))
            .collect();
        seen_pairs.sort_unstable();
        for w in seen_pairs.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge { u: w[0].0, v: w[0].1 });
            }
        }

        let mut rotation: Vec<Vec<Dart>> = vec![Vec::new(); n];
        for (e, &(u, v, _)) in edges.iter().enumerate() {
            rotation[u].push(Dart(2 * e));
            rotation[v].push(Dart(2 * e + 1));
        }

        // Connectivity.
        if n > 1 {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut count = 1;
            while let Some(v) = stack.pop() {
                for &d in &rotation[v] {
                    let w = dart_head(&edges, d);
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        stack.push(w);
                    }
                }
            }
            if count != n {
                return Err(GraphError::Disconnected);
            }
        }

        // Rotation system by angle; equal angles make the embedding improper.
        let mut rotation_pos = vec![0usize; 2 * edges.len()];
        for v in 0..n {
            let pv = positions[v];
            rotation[v].sort_unstable_by(|&a, &b| {
                let pa = pv.angle_to(&positions[dart_head(&edges, a)]);
                let pb = pv.angle_to(&positions[dart_head(&edges, b)]);
                pa.total_cmp(&pb)
            });
            for i in 1..rotation[v].len() {
                let a = pv.angle_to(&positions[dart_head(&edges, rotation[v][i - 1])]);
                let b = pv.angle_to(&positions[dart_head(&edges, rotation[v][i])]);
                if math::abs(b - a) <= 1e-12 {
                    return Err(GraphError::AngleTie { vertex: v });
                }
            }
            for (i, &d) in rotation[v].iter().enumerate() {
                rotation_pos[d.0] = i;
            }
        }

        // Face traversal: next dart of a face is the rotation predecessor of
        // the reversed dart, which walks each face with its interior on the
        // left (inner faces counterclockwise).
        let mut dart_face = vec![usize::MAX; 2 * edges.len()];
        let mut faces: Vec<Face> = Vec::new();
        for start in 0..2 * edges.len() {
            if dart_face[start] != usize::MAX {
                continue;
            }
            let fid = faces.len();
            let mut cycle = Vec::new();
            let mut d = Dart(start);
            loop {
                dart_face[d.0] = fid;
                cycle.push(d);
                let r = d.reversed();
                let head = dart_head(&edges, d);
                let pos = rotation_pos[r.0];
                let deg = rotation[head].len();
                d = rotation[head][(pos + deg - 1) % deg];
                if d.0 == start {
                    break;
                }
            }
            let pts: Vec<Point> = cycle.iter().map(|&d| positions[dart_tail(&edges, d)]).collect();
            let area = polygon_signed_area(&pts);
            let centroid = {
                let k = pts.len() as f64;
                Point::new(
                    pts.iter().map(|p| p.x).sum::<f64>() / k,
                    pts.iter().map(|p| p.y).sum::<f64>() / k,
                )
            };
            faces.push(Face {
                darts: cycle,
                is_outer: false,
                centroid,
                signed_area: area,
            });
        }

        if edges.is_empty() {
            // A single vertex: one (outer) face by convention.
            if n != 1 {
                return Err(GraphError::Disconnected);
            }
            faces.push(Face {
                darts: Vec::new(),
                is_outer: true,
                centroid: positions[0],
                signed_area: 0.0,
            });
        }

        let negatives: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.signed_area < 0.0)
            .map(|(i, _)| i)
            .collect();
        let outer_face = if edges.is_empty() {
            0
        } else if negatives.len() == 1 {
            negatives[0]
        } else if negatives.is_empty() && faces.len() == 1 {
            // A tree: the single face is the outer one, with zero signed area.
            0
        } else if negatives.is_empty() {
            return Err(GraphError::EulerCheckFailed {
                v: n,
                e: edges.len(),
                f: faces.len(),
            });
        } else {
            return Err(GraphError::MultipleOuterFaces);
        };
        faces[outer_face].is_outer = true;

        if !edges.is_empty() && (n + faces.len()) as i64 - edges.len() as i64 != 2 {
            return Err(GraphError::EulerCheckFailed {
                v: n,
                e: edges.len(),
                f: faces.len(),
            });
        }

        let mut mu = vec![0.0; n];
        for &(u, v, w) in &edges {
            mu[u] += w;
            mu[v] += w;
        }
        let mut local_scale = vec![f64::INFINITY; n];
        for &(u, v, _) in &edges {
            let len = positions[u].dist(&positions[v]);
            local_scale[u] = local_scale[u].min(len);
            local_scale[v] = local_scale[v].min(len);
        }

        Ok(EmbeddedGraph {
            positions,
            edges,
            rotation,
            rotation_pos,
            faces,
            dart_face,
            outer_face,
            mu,
            local_scale,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn position(&self, v: VertexId) -> Point {
        self.positions[v]
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId, f64) {
        self.edges[e]
    }

    pub fn weight(&self, e: EdgeId) -> f64 {
        self.edges[e].2
    }

    pub fn mass(&self, v: VertexId) -> f64 {
        self.mu[v]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn outer_face(&self) -> usize {
        self.outer_face
    }

    pub fn dart_tail(&self, d: Dart) -> VertexId {
        dart_tail(&self.edges, d)
    }

    pub fn dart_head(&self, d: Dart) -> VertexId {
        dart_head(&self.edges, d)
    }

    /// Face lying to the left of the dart.
    pub fn face_of_dart(&self, d: Dart) -> usize {
        self.dart_face[d.0]
    }

    /// Darts leaving `v` in counterclockwise order.
    pub fn rotation(&self, v: VertexId) -> &[Dart] {
        &self.rotation[v]
    }

    pub fn rotation_position(&self, d: Dart) -> usize {
        self.rotation_pos[d.0]
    }

    /// Rotation successor (counterclockwise) of a dart at its tail.
    pub fn next_ccw(&self, d: Dart) -> Dart {
        let v = self.dart_tail(d);
        let r = &self.rotation[v];
        r[(self.rotation_pos[d.0] + 1) % r.len()]
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId, f64)> + '_ {
        self.rotation[v].iter().map(move |&d| {
            let e = d.edge();
            (self.dart_head(d), e, self.edges[e].2)
        })
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.rotation[u]
            .iter()
            .map(|&d| d.edge())
            .find(|&e| {
                let (a, b, _) = self.edges[e];
                (a, b) == (u, v) || (a, b) == (v, u)
            })
    }

    /// Local scale r_v: minimum incident edge length.
    pub fn local_scale(&self, v: VertexId) -> Result<f64, GraphError> {
        if self.rotation[v].is_empty() {
            return Err(GraphError::IsolatedVertex { vertex: v });
        }
        Ok(self.local_scale[v])
    }

    /// Random-walk transition probability w_{vv'} / mu_v.
    pub fn transition_probability(&self, v: VertexId, v2: VertexId) -> Result<f64, GraphError> {
        let e = self
            .find_edge(v, v2)
            .ok_or(GraphError::NotAnEdge { u: v, v: v2 })?;
        Ok(self.edges[e].2 / self.mu[v])
    }

    /// Opt-in planarity check by pairwise segment intersection, O(E^2).
    pub fn check_planarity(&self) -> Result<(), GraphError> {
        for e1 in 0..self.edges.len() {
            let (a, b, _) = self.edges[e1];
            for e2 in e1 + 1..self.edges.len() {
                let (c, d, _) = self.edges[e2];
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                if segments_intersect(
                    self.positions[a],
                    self.positions[b],
                    self.positions[c],
                    self.positions[d],
                ) {
                    return Err(GraphError::EdgeCrossing { e1, e2 });
                }
            }
        }
        Ok(())
    }

    /// Discrete disc of radius `r` around `u`.
    pub fn discrete_disc(&self, u: VertexId, r: f64) -> Result<Disc, GraphError> {
        if !(r > 0.0) {
            return Err(GraphError::InvalidRadius);
        }
        let pu = self.positions[u];
        let mut in_int = vec![false; self.vertex_count()];
        let mut interior = vec![u];
        in_int[u] = true;
        let mut head = 0;
        while head < interior.len() {
            let v = interior[head];
            head += 1;
            for (w, _, _) in self.neighbors(v) {
                if !in_int[w] && self.positions[w].dist(&pu) < r {
                    in_int[w] = true;
                    interior.push(w);
                }
            }
        }
        interior.sort_unstable();
        let mut boundary = Vec::new();
        for &v in &interior {
            for (w, _, _) in self.neighbors(v) {
                if !in_int[w] {
                    boundary.push(w);
                }
            }
        }
        boundary.sort_unstable();
        boundary.dedup();
        Ok(Disc { interior, boundary })
    }

    /// Nearest-neighbor path from `u` to `v` staying on faces crossed by the
    /// segment [u;v]: shortest Euclidean path within the vertices of those faces.
    pub fn connector_path(&self, u: VertexId, v: VertexId) -> Result<ConnectorPath, GraphError> {
        if u == v {
            return Err(GraphError::SameVertex);
        }
        let (pu, pv) = (self.positions[u], self.positions[v]);
        let mut allowed = vec![false; self.vertex_count()];
        for (fid, face) in self.faces.iter().enumerate() {
            if fid == self.outer_face {
                continue;
            }
            let pts: Vec<Point> = face
                .darts
                .iter()
                .map(|&d| self.positions[self.dart_tail(d)])
                .collect();
            let hit = pts
                .iter()
                .zip(pts.iter().cycle().skip(1))
                .any(|(&a, &b)| segments_intersect(a, b, pu, pv))
                || point_in_polygon(&pts, pu)
                || point_in_polygon(&pts, pv);
            if hit {
                for &d in &face.darts {
                    allowed[self.dart_tail(d)] = true;
                }
            }
        }
        if !allowed[u] || !allowed[v] {
            return Err(GraphError::NoConnectorPath { u, v });
        }

        // Dijkstra over the allowed vertex set by Euclidean edge length.
        let mut dist = vec![f64::INFINITY; self.vertex_count()];
        let mut prev = vec![usize::MAX; self.vertex_count()];
        dist[u] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((OrdF64(0.0), u)));
        while let Some(Reverse((OrdF64(du), x))) = heap.pop() {
            if du > dist[x] {
                continue;
            }
            if x == v {
                break;
            }
            for (w, _, _) in self.neighbors(x) {
                if !allowed[w] {
                    continue;
                }
                let nd = du + self.positions[x].dist(&self.positions[w]);
                if nd < dist[w] {
                    dist[w] = nd;
                    prev[w] = x;
                    heap.push(Reverse((OrdF64(nd), w)));
                }
            }
        }
        if !dist[v].is_finite() {
            return Err(GraphError::NoConnectorPath { u, v });
        }
        let mut vertices = vec![v];
        let mut cur = v;
        while cur != u {
            cur = prev[cur];
            vertices.push(cur);
        }
        vertices.reverse();
        let length = dist[v];
        Ok(ConnectorPath {
            vertices,
            length,
            stretch: length / pu.dist(&pv),
        })
    }

    /// Tightest structural constants of assumptions (a)-(c), plus a sampled
    /// connector-path stretch estimate.
    pub fn validate(&self) -> StructureReport {
        let mut min_w = f64::INFINITY;
        let mut max_mu: f64 = 0.0;
        for &(_, _, w) in &self.edges {
            min_w = min_w.min(w);
        }
        for &m in &self.mu {
            max_mu = max_mu.max(m);
        }
        let varpi0 = if self.edges.is_empty() {
            0.0
        } else {
            min_w.min(1.0 / max_mu)
        };

        // Largest wedge between consecutive darts, skipping outer-face wedges.
        let mut max_gap: f64 = 0.0;
        for v in 0..self.vertex_count() {
            let rot = &self.rotation[v];
            for (i, &d) in rot.iter().enumerate() {
                if self.dart_face[d.0] == self.outer_face {
                    continue;
                }
                let gap = if rot.len() == 1 {
                    math::TAU
                } else {
                    let q = rot[(i + 1) % rot.len()];
                    let a = self.positions[v].angle_to(&self.positions[self.dart_head(d)]);
                    let b = self.positions[v].angle_to(&self.positions[self.dart_head(q)]);
                    let mut g = b - a;
                    if g <= 0.0 {
                        g += math::TAU;
                    }
                    g
                };
                max_gap = max_gap.max(gap);
            }
        }
        let eta0 = math::PI - max_gap;

        let mut kappa0: f64 = 1.0;
        for v in 0..self.vertex_count() {
            let mut max_len: f64 = 0.0;
            for (w, _, _) in self.neighbors(v) {
                max_len = max_len.max(self.positions[v].dist(&self.positions[w]));
            }
            if !self.rotation[v].is_empty() {
                kappa0 = kappa0.max(max_len / self.local_scale[v]);
            }
        }

        // Deterministic pair sample for the stretch constant.
        let n = self.vertex_count();
        let mut nu0: f64 = 0.0;
        let mut samples = 0;
        if n >= 2 {
            let target = 64usize.min(n * (n - 1) / 2);
            let mut state = 0x9e3779b97f4a7c15u64;
            let mut tried = 0;
            while samples < target && tried < 4 * target + 16 {
                state = splitmix64(state);
                let u = (state >> 32) as usize % n;
                state = splitmix64(state);
                let v = (state >> 32) as usize % n;
                tried += 1;
                if u == v {
                    continue;
                }
                if let Ok(path) = self.connector_path(u, v) {
                    nu0 = nu0.max(path.stretch);
                    samples += 1;
                }
            }
        }

        StructureReport {
            varpi0,
            eta0,
            kappa0,
            nu0,
            nu0_samples: samples,
            satisfied_a: varpi0 > 0.0,
            satisfied_b: eta0 > 0.0,
            satisfied_c: kappa0.is_finite(),
        }
    }
}

pub(crate) fn dart_tail(edges: &[(VertexId, VertexId, f64)], d: Dart) -> VertexId {
    let (u, v, _) = edges[d.edge()];
    if d.0 & 1 == 0 {
        u
    } else {
        v
    }
}

pub(crate) fn dart_head(edges: &[(VertexId, VertexId, f64)], d: Dart) -> VertexId {
    let (u, v, _) = edges[d.edge()];
    if d.0 & 1 == 0 {
        v
    } else {
        u
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Totally ordered f64 for heap keys.
#[derive(Clone, Copy, PartialEq)]
pub(crate) struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn grid_patch(x0: i64, x1: i64, y0: i64, y1: i64) -> EmbeddedGraph {
        let mut verts = Vec::new();
        let mut index = alloc::collections::BTreeMap::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                index.insert((x, y), verts.len());
                verts.push(Point::new(x as f64, y as f64));
            }
        }
        let mut edges = Vec::new();
        for (&(x, y), &i) in &index {
            if let Some(&j) = index.get(&(x + 1, y)) {
                edges.push((i, j, 1.0));
            }
            if let Some(&j) = index.get(&(x, y + 1)) {
                edges.push((i, j, 1.0));
            }
        }
        EmbeddedGraph::build(verts, edges).unwrap()
    }

    fn diamond() -> EmbeddedGraph {
        // Lattice points with |x| + |y| <= 2 and the grid edges among them.
        let mut verts = Vec::new();
        let mut index = alloc::collections::BTreeMap::new();
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                if x.abs() + y.abs() <= 2 {
                    index.insert((x, y), verts.len());
                    verts.push(Point::new(x as f64, y as f64));
                }
            }
        }
        let mut edges = Vec::new();
        for (&(x, y), &i) in &index {
            if let Some(&j) = index.get(&(x + 1, y)) {
                edges.push((i, j, 1.0));
            }
            if let Some(&j) = index.get(&(x, y + 1)) {
                edges.push((i, j, 1.0));
            }
        }
        EmbeddedGraph::build(verts, edges).unwrap()
    }

    #[test]
    fn plus_patch_faces_and_degrees() {
        let g = diamond();
        assert_eq!(g.vertex_count(), 13);
        assert_eq!(g.edge_count(), 16);
        assert_eq!(g.faces().len(), 5);
        assert_eq!(g.faces().iter().filter(|f| f.is_outer).count(), 1);
        for v in 0..g.vertex_count() {
            assert!(g.rotation(v).len() <= 4);
        }
    }

    #[test]
    fn square_cycle_two_faces() {
        let verts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let edges = vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)];
        let g = EmbeddedGraph::build(verts, edges).unwrap();
        assert_eq!(g.faces().len(), 2);
        let inner: Vec<_> = g.faces().iter().filter(|f| !f.is_outer).collect();
        assert_eq!(inner.len(), 1);
        assert!(inner[0].signed_area > 0.0);
    }

    #[test]
    fn grid_patch_euler() {
        let g = grid_patch(0, 9, 0, 9);
        assert_eq!(g.vertex_count(), 100);
        assert_eq!(g.edge_count(), 180);
        assert_eq!(g.faces().len(), 82);
    }

    #[test]
    fn structure_report_on_grid() {
        let g = grid_patch(0, 9, 0, 9);
        let rep = g.validate();
        assert!((rep.varpi0 - 0.25).abs() < 1e-12);
        assert!((rep.eta0 - core::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((rep.kappa0 - 1.0).abs() < 1e-12);
        assert!(rep.satisfied_a && rep.satisfied_b && rep.satisfied_c);
        assert!(rep.nu0 >= 1.0 && rep.nu0_samples > 0);
    }

    #[test]
    fn structure_report_weight_minimum() {
        let g = grid_patch(0, 3, 0, 3);
        let mut edges: Vec<_> = (0..g.edge_count()).map(|e| g.edge(e)).collect();
        edges[0].2 = 0.1;
        let verts: Vec<_> = (0..g.vertex_count()).map(|v| g.position(v)).collect();
        let g2 = EmbeddedGraph::build(verts, edges).unwrap();
        let rep = g2.validate();
        assert!((rep.varpi0 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn near_flat_angle_reported() {
        // Interior vertex whose two edges toward an enclosed face meet at 178
        // degrees; outer-hull reflex wedges do not count.
        let th = 178.0f64.to_radians();
        let verts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(th.cos(), th.sin()),
            Point::new(0.3, -1.0),
            Point::new(0.0, 1.2),
        ];
        let edges = vec![
            (0, 1, 1.0),
            (0, 2, 1.0),
            (0, 3, 1.0),
            (1, 3, 1.0),
            (2, 3, 1.0),
            (1, 4, 1.0),
            (2, 4, 1.0),
        ];
        let g = EmbeddedGraph::build(verts, edges).unwrap();
        let rep = g.validate();
        let expect = core::f64::consts::PI - th;
        assert!((rep.eta0 - expect).abs() < 1e-9, "eta0 = {}", rep.eta0);
        assert!(rep.satisfied_b);
    }

    #[test]
    fn transition_probabilities_normalize() {
        let g = diamond();
        for v in 0..g.vertex_count() {
            let total: f64 = g
                .neighbors(v)
                .map(|(w, _, _)| g.transition_probability(v, w).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        let center = (0..13).find(|&v| g.position(v).dist(&Point::new(0.0, 0.0)) < 1e-9).unwrap();
        let (nb, _, _) = g.neighbors(center).next().unwrap();
        assert!((g.transition_probability(center, nb).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn weighted_transition() {
        // Degree-3 vertex with weights {2,1,1}: heavy edge carries 1/2.
        let verts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(-1.0, 0.5),
            Point::new(-1.0, -0.5),
        ];
        let edges = vec![(0, 1, 2.0), (0, 2, 1.0), (0, 3, 1.0), (2, 3, 1.0)];
        let g = EmbeddedGraph::build(verts, edges).unwrap();
        assert!((g.transition_probability(0, 1).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn discrete_disc_counts() {
        let g = grid_patch(-4, 4, -4, 4);
        let origin = (0..g.vertex_count())
            .find(|&v| g.position(v).dist(&Point::new(0.0, 0.0)) < 1e-9)
            .unwrap();
        // Euclidean balls: r = 1.5 catches the diagonals (|(1,1)| < 1.5),
        // r = 2.5 catches norm sqrt(5) as well.
        let d1 = g.discrete_disc(origin, 1.5).unwrap();
        assert_eq!(d1.interior.len(), 9);
        let d2 = g.discrete_disc(origin, 2.5).unwrap();
        assert_eq!(d2.interior.len(), 21);
        for &v in &d1.interior {
            assert!(d2.interior.contains(&v));
        }
        // r below the local scale keeps only the center.
        let d0 = g.discrete_disc(origin, 0.5).unwrap();
        assert_eq!(d0.interior, vec![origin]);
        assert_eq!(d0.boundary.len(), 4);
    }

    #[test]
    fn connector_path_straight_and_diagonal() {
        let g = grid_patch(-1, 4, -2, 2);
        let id = |x: f64, y: f64| {
            (0..g.vertex_count())
                .find(|&v| g.position(v).dist(&Point::new(x, y)) < 1e-9)
                .unwrap()
        };
        let p = g.connector_path(id(0.0, 0.0), id(3.0, 0.0)).unwrap();
        assert!((p.length - 3.0).abs() < 1e-12);
        assert!((p.stretch - 1.0).abs() < 1e-12);
        let q = g.connector_path(id(0.0, 0.0), id(1.0, 1.0)).unwrap();
        assert!((q.length - 2.0).abs() < 1e-12);
        assert!((q.stretch - core::f64::consts::SQRT_2).abs() < 1e-12);
        // Defining property: every path vertex lies on a face crossed by [u;v].
        let (pu, pv) = (Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        for &v in &q.vertices {
            let on_crossed = g.faces().iter().enumerate().any(|(fid, f)| {
                fid != g.outer_face()
                    && f.darts.iter().any(|&d| g.dart_tail(d) == v)
                    && {
                        let pts: Vec<Point> =
                            f.darts.iter().map(|&d| g.position(g.dart_tail(d))).collect();
                        pts.iter()
                            .zip(pts.iter().cycle().skip(1))
                            .any(|(&a, &b)| segments_intersect(a, b, pu, pv))
                    }
            });
            assert!(on_crossed);
        }
    }

    #[test]
    fn build_rejections() {
        let verts = vec![Point::new(0.0, 0.0), Point::new(0.0, 0.0)];
        let err = EmbeddedGraph::build(verts, vec![(0, 1, 1.0)]).unwrap_err();
        assert!(matches!(err, GraphError::ZeroLengthEdge { .. }));

        let verts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 0.0)];
        let err = EmbeddedGraph::build(verts, vec![(0, 1, 1.0), (0, 2, 1.0)]).unwrap_err();
        assert!(matches!(
            err,
            GraphError::DuplicatePosition { .. } | GraphError::AngleTie { .. }
        ));

        let verts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(4.0, 0.0),
        ];
        let err = EmbeddedGraph::build(verts, vec![(0, 1, 1.0), (2, 3, 1.0)]).unwrap_err();
        assert!(matches!(err, GraphError::Disconnected));

        let verts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let err = EmbeddedGraph::build(verts, vec![(0, 1, -1.0)]).unwrap_err();
        assert!(matches!(err, GraphError::NonPositiveWeight { .. }));
    }

    #[test]
    fn planarity_check_flags_crossing() {
        let verts = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 2.0),
            Point::new(0.0, 2.0),
            Point::new(2.0, 0.0),
        ];
        let edges = vec![(0, 1, 1.0), (2, 3, 1.0), (0, 2, 1.0)];
        let g = EmbeddedGraph::build(verts, edges).unwrap();
        assert!(matches!(g.check_planarity(), Err(GraphError::EdgeCrossing { .. })));
        let g2 = grid_patch(0, 3, 0, 3);
        assert!(g2.check_planarity().is_ok());
    }
}
