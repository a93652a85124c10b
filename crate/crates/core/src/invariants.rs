//! Discrete conformal invariants of a quadrilateral: cross-ratios X and Y,
//! extremal length in variational and current form, the extremal metric,
//! the harmonic conjugate on faces, and the exact dual extremal length.
//!
//! Extremal length is computed from the Dirichlet-Neumann potential: free
//! boundary edges are deleted from the conductance system, the current I(V)
//! is measured at both electrodes, and EL = 1/I(V). The extremal metric is
//! the potential increment |dV| per edge, normalized so the shortest
//! connecting path has g-length one.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::domain::{DiscreteDomain, DomainError, Quadrilateral};
use crate::graph::{Dart, OrdF64};
use crate::math;
use crate::network::Network;
use crate::potential::{DirichletSolver, PotentialError};
use crate::solve::{Factor, SolveError};

#[derive(Clone, Debug, PartialEq)]
pub enum InvariantError {
    Potential(PotentialError),
    Domain(DomainError),
    Solve(SolveError),
    DegenerateDual(&'static str),
    NotHarmonic { residual: f64 },
    NegativeMetric,
}

impl fmt::Display for InvariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantError::Potential(e) => write!(f, "{e}"),
            InvariantError::Domain(e) => write!(f, "{e}"),
            InvariantError::Solve(e) => write!(f, "{e}"),
            InvariantError::DegenerateDual(msg) => write!(f, "degenerate dual network: {msg}"),
            InvariantError::NotHarmonic { residual } => {
                write!(f, "conjugate integration residual {residual} too large")
            }
            InvariantError::NegativeMetric => write!(f, "edge metric must be nonnegative"),
        }
    }
}

impl core::error::Error for InvariantError {}

impl From<PotentialError> for InvariantError {
    fn from(e: PotentialError) -> Self {
        InvariantError::Potential(e)
    }
}

impl From<DomainError> for InvariantError {
    fn from(e: DomainError) -> Self {
        InvariantError::Domain(e)
    }
}

impl From<SolveError> for InvariantError {
    fn from(e: SolveError) -> Self {
        InvariantError::Solve(e)
    }
}

impl From<crate::network::NetworkError> for InvariantError {
    fn from(e: crate::network::NetworkError) -> Self {
        InvariantError::Potential(PotentialError::Network(e))
    }
}

/// Discrete cross-ratios of a quadrilateral, with the two-point partition
/// values they are built from (`z[i][j]` = Z(mark_i; mark_j)).
#[derive(Clone, Debug)]
pub struct CrossRatios {
    pub x: f64,
    pub y: f64,
    /// Y of the rotated quadrilateral (b,c;d,a), computed from independently
    /// evaluated two-point values; equals 1/Y up to solver accuracy.
    pub y_swapped: f64,
    pub z: [[f64; 4]; 4],
}

/// Cross-ratios from four single-target solves sharing one factorization.
pub fn cross_ratios(
    solver: &DirichletSolver<'_>,
    quad: &Quadrilateral,
) -> Result<CrossRatios, InvariantError> {
    let net = solver.network();
    let marks = quad.marks;
    let mut fields = Vec::with_capacity(4);
    for &m in &marks {
        fields.push(solver.z_field(&[m])?);
    }
    let mut z = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let port = net.bd[marks[i]];
            z[i][j] = net.bd_transition_in(marks[i]) * fields[j].interior[port.int];
        }
    }
    let x = math::sqrt(z[0][2] * z[1][3] / (z[0][1] * z[2][3]));
    let y = math::sqrt(z[0][3] * z[1][2] / (z[0][1] * z[2][3]));
    let y_swapped = math::sqrt(z[1][0] * z[2][3] / (z[1][2] * z[3][0]));
    Ok(CrossRatios { x, y, y_swapped, z })
}

/// X^{-1} / (1 + Y^{-1}): the discrete counterpart of the cross-ratio
/// identity, uniformly bounded above and below.
pub fn xy_relation_ratio(cr: &CrossRatios) -> f64 {
    (1.0 / cr.x) / (1.0 + 1.0 / cr.y)
}

/// Dirichlet-Neumann potential: 0 on electrode A, 1 on electrode B, Neumann
/// (deleted edges) elsewhere.
#[derive(Clone, Debug)]
pub struct DnField {
    pub interior: Vec<f64>,
    /// Full boundary trace: electrode data on electrodes, V(x_int) on free
    /// edges per the Neumann convention.
    pub boundary: Vec<f64>,
    /// Current measured at electrode A.
    pub current: f64,
    /// Current measured at electrode B.
    pub current_far: f64,
    /// Relative disagreement of the two flux measurements.
    pub flux_gap: f64,
    pub residual: f64,
    pub electrode_a: Vec<usize>,
    pub electrode_b: Vec<usize>,
}

/// Extremal length between two disjoint boundary-edge sets: EL = 1/I(V).
#[derive(Clone, Debug)]
pub struct ExtremalLengthResult {
    pub el: f64,
    pub field: DnField,
}

pub fn extremal_length(
    net: &Network,
    arc_a: &[usize],
    arc_b: &[usize],
) -> Result<ExtremalLengthResult, InvariantError> {
    if arc_a.is_empty() || arc_b.is_empty() {
        return Err(InvariantError::Potential(PotentialError::EmptyArc));
    }
    let nb = net.boundary_count();
    let mut electrode = vec![false; nb];
    let mut hot = vec![false; nb];
    for &b in arc_a {
        if b >= nb {
            return Err(InvariantError::Potential(PotentialError::IndexOutOfRange));
        }
        electrode[b] = true;
    }
    for &b in arc_b {
        if b >= nb || electrode[b] {
            return Err(InvariantError::Potential(if b >= nb {
                PotentialError::IndexOutOfRange
            } else {
                PotentialError::OverlappingArcs
            }));
        }
        electrode[b] = true;
        hot[b] = true;
    }
    let sys = net.neumann_system(&electrode)?;
    let rhs = net.neumann_rhs(&hot, 1.0);
    let factor = Factor::new(&sys)?;
    let interior = factor.solve(&rhs);
    let residual = sys.relative_residual(&interior, &rhs);

    let mut current = 0.0;
    for &b in arc_a {
        current += net.bd[b].weight * interior[net.bd[b].int];
    }
    let mut current_far = 0.0;
    for &b in arc_b {
        current_far += net.bd[b].weight * (1.0 - interior[net.bd[b].int]);
    }
    let flux_gap = math::abs(current - current_far) / current.max(current_far);

    let mut boundary = vec![0.0; nb];
    for (b, port) in net.bd.iter().enumerate() {
        boundary[b] = if hot[b] {
            1.0
        } else if electrode[b] {
            0.0
        } else {
            interior[port.int]
        };
    }
    let field = DnField {
        interior,
        boundary,
        current,
        current_far,
        flux_gap,
        residual,
        electrode_a: arc_a.to_vec(),
        electrode_b: arc_b.to_vec(),
    };
    Ok(ExtremalLengthResult {
        el: 1.0 / field.current,
        field,
    })
}

/// Nonnegative metric on the edges of a domain: one entry per interior edge
/// and per boundary edge.
#[derive(Clone, Debug)]
pub struct EdgeMetric {
    pub interior: Vec<f64>,
    pub boundary: Vec<f64>,
}

impl EdgeMetric {
    pub fn scaled(&self, lambda: f64) -> EdgeMetric {
        EdgeMetric {
            interior: self.interior.iter().map(|g| g * lambda).collect(),
            boundary: self.boundary.iter().map(|g| g * lambda).collect(),
        }
    }
}

/// Extremal metric |dV| of a Dirichlet-Neumann field; free boundary edges
/// carry zero length.
pub fn extremal_metric(net: &Network, result: &ExtremalLengthResult) -> EdgeMetric {
    let f = &result.field;
    let interior = net
        .int_edges
        .iter()
        .map(|e| math::abs(f.interior[e.u] - f.interior[e.v]))
        .collect();
    let mut in_a = vec![false; net.boundary_count()];
    let mut in_b = vec![false; net.boundary_count()];
    for &b in &f.electrode_a {
        in_a[b] = true;
    }
    for &b in &f.electrode_b {
        in_b[b] = true;
    }
    let boundary = net
        .bd
        .iter()
        .enumerate()
        .map(|(b, port)| {
            if in_a[b] {
                math::abs(f.interior[port.int])
            } else if in_b[b] {
                math::abs(1.0 - f.interior[port.int])
            } else {
                0.0
            }
        })
        .collect();
    EdgeMetric { interior, boundary }
}

/// g-area: sum of w_e g_e^2 over interior and boundary edges.
pub fn metric_area(net: &Network, g: &EdgeMetric) -> f64 {
    let mut acc = 0.0;
    for (e, ge) in net.int_edges.iter().zip(&g.interior) {
        acc += e.weight * ge * ge;
    }
    for (port, ge) in net.bd.iter().zip(&g.boundary) {
        acc += port.weight * ge * ge;
    }
    acc
}

/// Shortest g-length over lattice paths from arc A to arc B; paths start and
/// end at boundary vertices, so the arc edges contribute their own lengths.
pub fn metric_length(
    net: &Network,
    g: &EdgeMetric,
    arc_a: &[usize],
    arc_b: &[usize],
) -> Result<f64, InvariantError> {
    if g.interior.iter().chain(&g.boundary).any(|&v| v < 0.0) {
        return Err(InvariantError::NegativeMetric);
    }
    let n = net.interior_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &b in arc_a {
        if b >= net.boundary_count() {
            return Err(InvariantError::Potential(PotentialError::IndexOutOfRange));
        }
        let i = net.bd[b].int;
        if g.boundary[b] < dist[i] {
            dist[i] = g.boundary[b];
            heap.push(Reverse((OrdF64(dist[i]), i)));
        }
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (e, &ge) in net.int_edges.iter().zip(&g.interior) {
        adj[e.u].push((e.v, ge));
        adj[e.v].push((e.u, ge));
    }
    while let Some(Reverse((OrdF64(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, ge) in &adj[v] {
            let nd = d + ge;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Reverse((OrdF64(nd), w)));
            }
        }
    }
    let mut best = f64::INFINITY;
    for &b in arc_b {
        if b >= net.boundary_count() {
            return Err(InvariantError::Potential(PotentialError::IndexOutOfRange));
        }
        best = best.min(dist[net.bd[b].int] + g.boundary[b]);
    }
    Ok(best)
}

/// Harmonic conjugate on faces, integrated over the dual of the domain's
/// edge set. For simply connected domains the integration closes to solver
/// accuracy; on an annulus the reported monodromy is the current I(V).
#[derive(Clone, Debug)]
pub struct ConjugateField {
    pub values: BTreeMap<usize, f64>,
    /// Largest integration mismatch after removing multiples of the monodromy.
    pub closedness: f64,
    /// Largest raw integration mismatch over closing dual edges.
    pub monodromy: f64,
}

impl ConjugateField {
    pub fn value(&self, face: usize) -> Option<f64> {
        self.values.get(&face).copied()
    }
}

pub fn harmonic_conjugate(
    dom: &DiscreteDomain,
    interior: &[f64],
    boundary: &[f64],
) -> Result<ConjugateField, InvariantError> {
    let net = dom.network();
    let graph = dom.graph();
    // Increment across an oriented dart (tail -> head): V*(left) - V*(right)
    // = w (V(head) - V(tail)).
    let mut duals: Vec<(usize, usize, f64)> = Vec::new(); // (left, right, increment)
    let mut scale = 0.0f64;
    for e in &net.int_edges {
        let (p, _, w) = graph.edge(e.label);
        let dart = Dart(2 * e.label);
        let (fl, fr) = (graph.face_of_dart(dart), graph.face_of_dart(dart.reversed()));
        let (vu, vv) = (interior[e.u], interior[e.v]);
        let (vtail, vhead) = if net.labels[e.u] == p { (vu, vv) } else { (vv, vu) };
        let inc = w * (vhead - vtail);
        scale = scale.max(math::abs(inc));
        duals.push((fl, fr, inc));
    }
    for (b, edge) in dom.boundary().iter().enumerate() {
        let (p, _, w) = graph.edge(edge.edge);
        let dart = Dart(2 * edge.edge);
        let (fl, fr) = (graph.face_of_dart(dart), graph.face_of_dart(dart.reversed()));
        let (vtail, vhead) = if edge.inner == p {
            (interior[net.bd[b].int], boundary[b])
        } else {
            (boundary[b], interior[net.bd[b].int])
        };
        let inc = w * (vhead - vtail);
        scale = scale.max(math::abs(inc));
        duals.push((fl, fr, inc));
    }

    // Spanning-tree integration over the dual adjacency.
    let mut adj: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for &(fl, fr, inc) in &duals {
        adj.entry(fr).or_default().push((fl, inc));
        adj.entry(fl).or_default().push((fr, -inc));
    }
    let mut values: BTreeMap<usize, f64> = BTreeMap::new();
    let mut stack: Vec<usize> = Vec::new();
    while values.len() < adj.len() {
        let seed = *adj
            .keys()
            .find(|f| !values.contains_key(f))
            .expect("unvisited face");
        values.insert(seed, 0.0);
        stack.push(seed);
        while let Some(f) = stack.pop() {
            let base = values[&f];
            for &(f2, inc) in &adj[&f] {
                if let alloc::collections::btree_map::Entry::Vacant(slot) = values.entry(f2) {
                    slot.insert(base + inc);
                    stack.push(f2);
                }
            }
        }
    }
    let mut monodromy = 0.0f64;
    let mut residuals: Vec<f64> = Vec::new();
    for &(fl, fr, inc) in &duals {
        let r = values[&fl] - values[&fr] - inc;
        residuals.push(r);
        monodromy = monodromy.max(math::abs(r));
    }
    let mut closedness = 0.0f64;
    for &r in &residuals {
        let mut best = math::abs(r);
        if monodromy > 0.0 {
            for k in -2i32..=2 {
                best = best.min(math::abs(r - k as f64 * monodromy));
            }
        }
        closedness = closedness.max(best);
    }
    if scale > 0.0 && closedness / scale > 1e-6 {
        return Err(InvariantError::NotHarmonic {
            residual: closedness / scale,
        });
    }
    Ok(ConjugateField {
        values,
        closedness,
        monodromy,
    })
}

/// Exact dual extremal length: the dual network on faces (weights 1/w) with
/// the face fans along the free arcs merged into electrodes. Equals 1/EL up
/// to solver accuracy.
pub fn dual_extremal_length(
    dom: &DiscreteDomain,
    quad: &Quadrilateral,
) -> Result<f64, InvariantError> {
    let net = dom.network();
    let graph = dom.graph();

    let fan_union = |arc: &crate::domain::BoundaryArc| -> Vec<usize> {
        let mut faces: Vec<usize> = arc.members[..arc.members.len() - 1]
            .iter()
            .flat_map(|&i| dom.fan(i).iter().copied())
            .collect();
        faces.sort_unstable();
        faces.dedup();
        faces
    };
    let e0 = fan_union(&dom.quad_arc_bc(quad));
    let e1 = fan_union(&dom.quad_arc_da(quad));
    if e0.iter().any(|f| e1.binary_search(f).is_ok()) {
        return Err(InvariantError::DegenerateDual("electrode fans overlap"));
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Node {
        Free(usize),
        Ground,
        Hot,
    }
    let mut node: BTreeMap<usize, Node> = BTreeMap::new();
    for &f in &e0 {
        node.insert(f, Node::Ground);
    }
    for &f in &e1 {
        node.insert(f, Node::Hot);
    }
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for e in &net.int_edges {
        let dart = Dart(2 * e.label);
        let (fl, fr) = (graph.face_of_dart(dart), graph.face_of_dart(dart.reversed()));
        if fl == fr {
            return Err(InvariantError::DegenerateDual("bridge edge"));
        }
        pairs.push((fl, fr, 1.0 / e.weight));
    }
    for edge in dom.boundary() {
        let dart = Dart(2 * edge.edge);
        let (fl, fr) = (graph.face_of_dart(dart), graph.face_of_dart(dart.reversed()));
        if fl == fr {
            return Err(InvariantError::DegenerateDual("bridge edge"));
        }
        pairs.push((fl, fr, 1.0 / graph.weight(edge.edge)));
    }
    let mut free_count = 0;
    for &(fl, fr, _) in &pairs {
        for f in [fl, fr] {
            node.entry(f).or_insert_with(|| {
                free_count += 1;
                Node::Free(free_count - 1)
            });
        }
    }
    if free_count == 0 {
        return Err(InvariantError::DegenerateDual("no free faces"));
    }

    let mut sys = crate::solve::SpdSystem::new(free_count);
    let mut rhs = vec![0.0; free_count];
    for &(fl, fr, wstar) in &pairs {
        match (node[&fl], node[&fr]) {
            (Node::Free(i), Node::Free(j)) => {
                sys.diag[i] += wstar;
                sys.diag[j] += wstar;
                sys.push_offdiag(i, j, -wstar);
            }
            (Node::Free(i), Node::Ground) | (Node::Ground, Node::Free(i)) => {
                sys.diag[i] += wstar;
            }
            (Node::Free(i), Node::Hot) | (Node::Hot, Node::Free(i)) => {
                sys.diag[i] += wstar;
                rhs[i] += wstar;
            }
            _ => {}
        }
    }
    sys.finish();
    let factor = Factor::new(&sys)?;
    let v = factor.solve(&rhs);

    let mut current = 0.0;
    for &(fl, fr, wstar) in &pairs {
        let other = match (node[&fl], node[&fr]) {
            (Node::Ground, o) | (o, Node::Ground) if o != Node::Ground => o,
            _ => continue,
        };
        current += wstar
            * match other {
                Node::Free(i) => v[i],
                Node::Hot => 1.0,
                Node::Ground => unreachable!(),
            };
    }
    if current <= 0.0 {
        return Err(InvariantError::DegenerateDual("no dual current"));
    }
    Ok(1.0 / current)
}

/// Squeeze ratios of the arc-to-arc partition function between the
/// cross-ratios: (Z/X, Z/Y).
pub fn sandwich_check(
    dom: &DiscreteDomain,
    quad: &Quadrilateral,
) -> Result<(f64, f64), InvariantError> {
    let solver = DirichletSolver::new(dom.network())?;
    let cr = cross_ratios(&solver, quad)?;
    let ab = dom.quad_arc_ab(quad);
    let cd = dom.quad_arc_cd(quad);
    let z = solver.partition_z_arcs(&ab.members, &cd.members)?;
    Ok((z / cr.x, z / cr.y))
}

/// Z([ab];[cd]) / log(1 + Y): the logarithmic comparability ratio.
pub fn z_log_y_ratio(dom: &DiscreteDomain, quad: &Quadrilateral) -> Result<f64, InvariantError> {
    let solver = DirichletSolver::new(dom.network())?;
    let cr = cross_ratios(&solver, quad)?;
    let ab = dom.quad_arc_ab(quad);
    let cd = dom.quad_arc_cd(quad);
    let z = solver.partition_z_arcs(&ab.members, &cd.members)?;
    Ok(z / math::ln_1p(cr.y))
}

/// EL([ab];[cd]) * EL([bc];[da]): the primal duality product.
pub fn duality_product(dom: &DiscreteDomain, quad: &Quadrilateral) -> Result<f64, InvariantError> {
    let ab = dom.quad_arc_ab(quad);
    let cd = dom.quad_arc_cd(quad);
    let bc = dom.quad_arc_bc(quad);
    let da = dom.quad_arc_da(quad);
    let el = extremal_length(dom.network(), &ab.members, &cd.members)?;
    let el2 = extremal_length(dom.network(), &bc.members, &da.members)?;
    Ok(el.el * el2.el)
}

/// Z([ab];[cd]) * EL([ab];[cd]): bounded above always, two-sided for short
/// extremal lengths.
pub fn z_el_bound(dom: &DiscreteDomain, quad: &Quadrilateral) -> Result<f64, InvariantError> {
    let solver = DirichletSolver::new(dom.network())?;
    let ab = dom.quad_arc_ab(quad);
    let cd = dom.quad_arc_cd(quad);
    let z = solver.partition_z_arcs(&ab.members, &cd.members)?;
    let el = extremal_length(dom.network(), &ab.members, &cd.members)?;
    Ok(z * el.el)
}

/// All invariants of one quadrilateral, with the comparability ratios the
/// double-sided estimates bound.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadInvariants {
    #[cfg_attr(feature = "serde", serde(rename = "Z"))]
    pub z: f64,
    #[cfg_attr(feature = "serde", serde(rename = "X"))]
    pub x: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Y"))]
    pub y: f64,
    #[cfg_attr(feature = "serde", serde(rename = "EL"))]
    pub el: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Z_dual"))]
    pub z_dual: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Y_dual"))]
    pub y_dual: f64,
    #[cfg_attr(feature = "serde", serde(rename = "EL_dual"))]
    pub el_dual: f64,
    /// Exact dual extremal length from the dual-network solve.
    pub el_dual_network: f64,
    pub flux_gap: f64,
    pub ratios: QuadRatios,
}

/// The theorem ratios of one configuration.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadRatios {
    pub xy_relation: f64,
    pub z_over_x: f64,
    pub z_over_y: f64,
    pub z_over_log1p_y: f64,
    pub el_duality_product: f64,
    pub z_times_el: f64,
    pub log1p_y_inv_over_el: f64,
    pub neg_log_z: f64,
    /// The six unit-threshold estimates
    /// (Y<=1, Z<=1, EL>=1, Y'>=1, Z'>=1, EL'<=1).
    pub estim_flags: [bool; 6],
}

pub fn quad_invariants(
    dom: &DiscreteDomain,
    quad: &Quadrilateral,
) -> Result<QuadInvariants, InvariantError> {
    let net = dom.network();
    let solver = DirichletSolver::new(net)?;
    let cr = cross_ratios(&solver, quad)?;
    let ab = dom.quad_arc_ab(quad);
    let cd = dom.quad_arc_cd(quad);
    let bc = dom.quad_arc_bc(quad);
    let da = dom.quad_arc_da(quad);
    let z = solver.partition_z_arcs(&ab.members, &cd.members)?;
    let z_dual = solver.partition_z_arcs(&bc.members, &da.members)?;
    let el = extremal_length(net, &ab.members, &cd.members)?;
    let el_dual = extremal_length(net, &bc.members, &da.members)?;
    let el_dual_network = dual_extremal_length(dom, quad)?;

    let ratios = QuadRatios {
        xy_relation: xy_relation_ratio(&cr),
        z_over_x: z / cr.x,
        z_over_y: z / cr.y,
        z_over_log1p_y: z / math::ln_1p(cr.y),
        el_duality_product: el.el * el_dual.el,
        z_times_el: z * el.el,
        log1p_y_inv_over_el: math::ln_1p(1.0 / cr.y) / el.el,
        neg_log_z: -math::ln(z),
        estim_flags: [
            cr.y <= 1.0,
            z <= 1.0,
            el.el >= 1.0,
            cr.y_swapped >= 1.0,
            z_dual >= 1.0,
            el_dual.el <= 1.0,
        ],
    };
    Ok(QuadInvariants {
        z,
        x: cr.x,
        y: cr.y,
        el: el.el,
        z_dual,
        y_dual: cr.y_swapped,
        el_dual: el_dual.el,
        el_dual_network,
        flux_gap: el.field.flux_gap.max(el_dual.field.flux_gap),
        ratios,
    })
}
