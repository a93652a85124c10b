//! Separator splits, annuli around interior vertices, and slit surgery.
//!
//! A separator split thresholds the ratio Z(.;A)/Z(.;B) at k: the two parts
//! partition the interior, the slit is exactly the set of interior edges
//! with one endpoint on each side, and the split is reported unusable rather
//! than failing when a part is empty or disconnected.
//!
//! Cutting an annulus along a slit duplicates the slit vertices into left and
//! right rows with their original masses; edges on the far side of each copy
//! become absorbing boundary edges toward phantom copies of the neighbors,
//! which realizes the universal-cover construction without leaving the plane.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::domain::{BoundaryArc, DiscreteDomain, DomainError};
use crate::graph::{Dart, VertexId};
use crate::invariants::{extremal_length, harmonic_conjugate, InvariantError};
use crate::math;
use crate::network::{BdPort, IntEdge, Network, Port};
use crate::potential::{DirichletSolver, PotentialError};

#[derive(Clone, Debug, PartialEq)]
pub enum SurgeryError {
    Potential(PotentialError),
    Domain(DomainError),
    Invariant(InvariantError),
    SplitUnusable(SplitStatus),
    BadSlit(&'static str),
    ArcNotCovered,
    DegenerateAnnulus,
    MarkOnWrongArc,
}

impl fmt::Display for SurgeryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurgeryError::Potential(e) => write!(f, "{e}"),
            SurgeryError::Domain(e) => write!(f, "{e}"),
            SurgeryError::Invariant(e) => write!(f, "{e}"),
            SurgeryError::SplitUnusable(s) => write!(f, "split unusable: {s:?}"),
            SurgeryError::BadSlit(msg) => write!(f, "bad slit: {msg}"),
            SurgeryError::ArcNotCovered => {
                write!(f, "arc not covered by a single annulus component")
            }
            SurgeryError::DegenerateAnnulus => write!(f, "annulus has no interior"),
            SurgeryError::MarkOnWrongArc => write!(f, "mark lies on the wrong boundary arc"),
        }
    }
}

impl core::error::Error for SurgeryError {}

impl From<PotentialError> for SurgeryError {
    fn from(e: PotentialError) -> Self {
        SurgeryError::Potential(e)
    }
}

impl From<DomainError> for SurgeryError {
    fn from(e: DomainError) -> Self {
        SurgeryError::Domain(e)
    }
}

impl From<InvariantError> for SurgeryError {
    fn from(e: InvariantError) -> Self {
        SurgeryError::Invariant(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SplitStatus {
    Usable,
    EmptySideA,
    EmptySideB,
    DisconnectedSideA,
    DisconnectedSideB,
}

/// Threshold split of a domain by the ratio Z(.;A)/Z(.;B) at level k.
#[derive(Clone, Debug)]
pub struct SeparatorSplit {
    pub k: f64,
    pub status: SplitStatus,
    pub interior_a: Vec<VertexId>,
    pub interior_b: Vec<VertexId>,
    /// Interior edges (u_a, u_b) crossing the slit, u_a on the A side.
    pub slit: Vec<(VertexId, VertexId)>,
    pub domain_a: Option<DiscreteDomain>,
    pub domain_b: Option<DiscreteDomain>,
    /// Boundary edges of the original domain whose inner vertex landed on
    /// each side.
    pub boundary_a: Vec<usize>,
    pub boundary_b: Vec<usize>,
}

pub fn separator_split(
    dom: &DiscreteDomain,
    arc_a: &BoundaryArc,
    arc_b: &BoundaryArc,
    k: f64,
) -> Result<SeparatorSplit, SurgeryError> {
    let net = dom.network();
    let solver = DirichletSolver::new(net)?;
    let ha = solver.z_field(&arc_a.members)?;
    let hb = solver.z_field(&arc_b.members)?;
    let n = net.interior_count();
    let mut side_a = vec![false; n];
    for i in 0..n {
        side_a[i] = ha.interior[i] >= k * hb.interior[i];
    }
    let interior_a: Vec<VertexId> = (0..n).filter(|&i| side_a[i]).map(|i| net.labels[i]).collect();
    let interior_b: Vec<VertexId> = (0..n).filter(|&i| !side_a[i]).map(|i| net.labels[i]).collect();
    let mut slit = Vec::new();
    for e in &net.int_edges {
        if side_a[e.u] != side_a[e.v] {
            let (ua, ub) = if side_a[e.u] { (e.u, e.v) } else { (e.v, e.u) };
            slit.push((net.labels[ua], net.labels[ub]));
        }
    }
    slit.sort_unstable();

    let connected = |side: &[VertexId]| -> bool {
        if side.is_empty() {
            return false;
        }
        let mut mark = vec![false; dom.graph().vertex_count()];
        for &v in side {
            mark[v] = true;
        }
        let mut seen = vec![false; dom.graph().vertex_count()];
        let mut stack = vec![side[0]];
        seen[side[0]] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for (w, _, _) in dom.graph().neighbors(v) {
                if mark[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == side.len()
    };

    let status = if interior_a.is_empty() {
        SplitStatus::EmptySideA
    } else if interior_b.is_empty() {
        SplitStatus::EmptySideB
    } else if !connected(&interior_a) {
        SplitStatus::DisconnectedSideA
    } else if !connected(&interior_b) {
        SplitStatus::DisconnectedSideB
    } else {
        SplitStatus::Usable
    };

    let domain_a = if !interior_a.is_empty() && connected(&interior_a) {
        DiscreteDomain::new(dom.graph_arc(), &interior_a).ok()
    } else {
        None
    };
    let domain_b = if !interior_b.is_empty() && connected(&interior_b) {
        DiscreteDomain::new(dom.graph_arc(), &interior_b).ok()
    } else {
        None
    };

    let mut boundary_a = Vec::new();
    let mut boundary_b = Vec::new();
    for (b, edge) in dom.boundary().iter().enumerate() {
        let i = dom.interior_index(edge.inner)?;
        if side_a[i] {
            boundary_a.push(b);
        } else {
            boundary_b.push(b);
        }
    }

    Ok(SeparatorSplit {
        k,
        status,
        interior_a,
        interior_b,
        slit,
        domain_a,
        domain_b,
        boundary_a,
        boundary_b,
    })
}

/// The factorization ratios of a usable split:
/// (Z(A;B) / (Z_A' Z_B'), (Z_A'/Z_B') / k) with Z_A' = Z_{domain_a}(A; slit)
/// and Z_B' = Z_{domain_b}(slit; B), slit edges acting as boundary targets of
/// the parts.
pub fn separator_verify(
    dom: &DiscreteDomain,
    arc_a: &BoundaryArc,
    arc_b: &BoundaryArc,
    split: &SeparatorSplit,
) -> Result<(f64, f64), SurgeryError> {
    if split.status != SplitStatus::Usable {
        return Err(SurgeryError::SplitUnusable(split.status));
    }
    let dom_a = split.domain_a.as_ref().expect("usable split");
    let dom_b = split.domain_b.as_ref().expect("usable split");
    let solver = DirichletSolver::new(dom.network())?;
    let z = solver.partition_z_arcs(&arc_a.members, &arc_b.members)?;

    let map_arc = |sub: &DiscreteDomain, arc: &BoundaryArc| -> Result<Vec<usize>, SurgeryError> {
        arc.members
            .iter()
            .map(|&b| {
                let e = dom.boundary()[b];
                sub.boundary_index(e.inner, e.outer)
                    .ok_or(SurgeryError::ArcNotCovered)
            })
            .collect()
    };
    let a_in_a = map_arc(dom_a, arc_a)?;
    let b_in_b = map_arc(dom_b, arc_b)?;
    let slit_in_a: Vec<usize> = split
        .slit
        .iter()
        .map(|&(ua, ub)| dom_a.boundary_index(ua, ub).ok_or(SurgeryError::ArcNotCovered))
        .collect::<Result<_, _>>()?;
    let slit_in_b: Vec<usize> = split
        .slit
        .iter()
        .map(|&(ua, ub)| dom_b.boundary_index(ub, ua).ok_or(SurgeryError::ArcNotCovered))
        .collect::<Result<_, _>>()?;

    let solver_a = DirichletSolver::new(dom_a.network())?;
    let solver_b = DirichletSolver::new(dom_b.network())?;
    let za = solver_a.partition_z_arcs(&a_in_a, &slit_in_a)?;
    let zb = solver_b.partition_z_arcs(&slit_in_b, &b_in_b)?;
    Ok((z / (za * zb), (za / zb) / split.k))
}

/// Exact inclusion chain of separator domains for a reference boundary edge
/// between the arcs: between A and B the chain is
/// `O_A^C[x] in O_A^{BuC}[x] in O_A^B[x]`, mirrored between C and A.
/// Comparisons are cross-multiplied with a 1e-12 relative slack.
pub fn separator_inclusion_check(
    dom: &DiscreteDomain,
    arc_a: &BoundaryArc,
    arc_b: &BoundaryArc,
    arc_c: &BoundaryArc,
    x: usize,
) -> Result<bool, SurgeryError> {
    let net = dom.network();
    let solver = DirichletSolver::new(net)?;
    let ha = solver.z_field(&arc_a.members)?;
    let hb = solver.z_field(&arc_b.members)?;
    let hc = solver.z_field(&arc_c.members)?;
    let bc: Vec<usize> = arc_b
        .members
        .iter()
        .chain(&arc_c.members)
        .copied()
        .collect();
    let hbc = solver.z_field(&bc)?;

    // Which gap x sits on decides the chain direction.
    let after_a = dom.arc(arc_a.end, arc_b.start)?;
    let chain: [&crate::potential::HarmonicField; 3] = if after_a.members[1..after_a.members.len() - 1]
        .contains(&x)
    {
        [&hc, &hbc, &hb]
    } else {
        let after_c = dom.arc(arc_c.end, arc_a.start)?;
        if after_c.members[1..after_c.members.len() - 1].contains(&x) {
            [&hb, &hbc, &hc]
        } else {
            return Err(SurgeryError::MarkOnWrongArc);
        }
    };

    let xi = net.bd[x].int;
    let mut ok = true;
    for w in chain.windows(2) {
        let (hs, ht) = (w[0], w[1]);
        for i in 0..net.interior_count() {
            // u in O_A^S[x]  <=>  hA(u) hS(x) >= hA(x) hS(u)
            let lhs_small = ha.interior[i] * hs.interior[xi];
            let rhs_small = ha.interior[xi] * hs.interior[i];
            if lhs_small >= rhs_small {
                let lhs_big = ha.interior[i] * ht.interior[xi];
                let rhs_big = ha.interior[xi] * ht.interior[i];
                let tol = 1e-12 * lhs_big.abs().max(rhs_big.abs());
                if lhs_big < rhs_big - tol {
                    ok = false;
                }
            }
        }
    }
    Ok(ok)
}

/// The domain minus a small disc around an interior vertex.
#[derive(Clone, Debug)]
pub struct Annulus {
    pub center: VertexId,
    pub rho0: f64,
    pub radius: f64,
    pub doubly_connected: bool,
    /// Connected components of the remaining interior, largest first.
    pub components: Vec<DiscreteDomain>,
    /// Per component: boundary edges created by the removal (the inner
    /// contour when the annulus is doubly connected).
    pub c_edges: Vec<Vec<usize>>,
    /// Range of the Green's function G(.; center) of the base domain over the
    /// inner-contour vertices.
    pub green_bracket: (f64, f64),
}

pub fn annulus(dom: &DiscreteDomain, u: VertexId, rho0: f64) -> Result<Annulus, SurgeryError> {
    let d = dom.distance_to_boundary(u)?;
    let radius = rho0 * d;
    let disc = dom
        .graph()
        .discrete_disc(u, radius)
        .map_err(|_| SurgeryError::DegenerateAnnulus)?;
    let mut removed = vec![false; dom.graph().vertex_count()];
    for &v in &disc.interior {
        debug_assert!(dom.is_interior(v));
        removed[v] = true;
    }
    let rest: Vec<VertexId> = dom
        .interior()
        .iter()
        .copied()
        .filter(|&v| !removed[v])
        .collect();
    if rest.is_empty() {
        return Err(SurgeryError::DegenerateAnnulus);
    }
    // Components of the remaining interior.
    let mut comp_id = vec![usize::MAX; dom.graph().vertex_count()];
    let mut comps: Vec<Vec<VertexId>> = Vec::new();
    for &v in &rest {
        if comp_id[v] != usize::MAX {
            continue;
        }
        let cid = comps.len();
        let mut comp = vec![v];
        comp_id[v] = cid;
        let mut head = 0;
        while head < comp.len() {
            let w = comp[head];
            head += 1;
            for (t, _, _) in dom.graph().neighbors(w) {
                if dom.is_interior(t) && !removed[t] && comp_id[t] == usize::MAX {
                    comp_id[t] = cid;
                    comp.push(t);
                }
            }
        }
        comps.push(comp);
    }
    comps.sort_unstable_by_key(|c| (usize::MAX - c.len(), c[0]));
    let components: Vec<DiscreteDomain> = comps
        .iter()
        .map(|c| DiscreteDomain::new(dom.graph_arc(), c))
        .collect::<Result<_, _>>()?;
    let c_edges: Vec<Vec<usize>> = components
        .iter()
        .map(|comp| {
            comp.boundary()
                .iter()
                .enumerate()
                .filter(|(_, e)| removed[e.outer])
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let doubly_connected = components.len() == 1 && components[0].cycles().len() == 2 && {
        let hole = components[0].cycles()[1].clone();
        hole.clone().all(|b| removed[components[0].boundary()[b].outer])
    };

    let solver = DirichletSolver::new(dom.network())?;
    let g = solver.green(dom.interior_index(u)?)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (comp, ces) in components.iter().zip(&c_edges) {
        for &b in ces {
            let outer = comp.boundary()[b].outer;
            let gi = g.interior[dom.interior_index(outer)?];
            lo = lo.min(gi);
            hi = hi.max(gi);
        }
    }
    Ok(Annulus {
        center: u,
        rho0,
        radius,
        doubly_connected,
        components,
        c_edges,
        green_bracket: (lo, hi),
    })
}

/// Locates the annulus component whose boundary carries the whole arc, and
/// maps the arc into its boundary indices.
pub fn map_arc_to_component<'a>(
    dom: &DiscreteDomain,
    ann: &'a Annulus,
    arc: &BoundaryArc,
) -> Result<(usize, &'a DiscreteDomain, Vec<usize>), SurgeryError> {
    'comp: for (ci, comp) in ann.components.iter().enumerate() {
        let mut mapped = Vec::with_capacity(arc.members.len());
        for &b in &arc.members {
            let e = dom.boundary()[b];
            match comp.boundary_index(e.inner, e.outer) {
                Some(i) => mapped.push(i),
                None => continue 'comp,
            }
        }
        return Ok((ci, comp, mapped));
    }
    Err(SurgeryError::ArcNotCovered)
}

/// Harmonic measure of the arc seen from the annulus center, against the
/// partition function from the inner contour to the arc inside the annulus.
pub fn hm_via_annulus(
    dom: &DiscreteDomain,
    u: VertexId,
    arc: &BoundaryArc,
    rho0: f64,
) -> Result<(f64, f64), SurgeryError> {
    let solver = DirichletSolver::new(dom.network())?;
    let omega = solver.harmonic_measure(dom.interior_index(u)?, &arc.members)?;
    let ann = annulus(dom, u, rho0)?;
    let (ci, comp, mapped) = map_arc_to_component(dom, &ann, arc)?;
    if ann.c_edges[ci].is_empty() {
        return Err(SurgeryError::DegenerateAnnulus);
    }
    let sub = DirichletSolver::new(comp.network())?;
    let z = sub.partition_z_arcs(&ann.c_edges[ci], &mapped)?;
    Ok((omega, z))
}

/// log(1 + 1/omega) against the extremal length from the inner contour to
/// the arc in the annulus (Dirichlet-Neumann solve, free elsewhere).
pub fn log_hm_vs_el(
    dom: &DiscreteDomain,
    u: VertexId,
    arc: &BoundaryArc,
    rho0: f64,
) -> Result<(f64, f64), SurgeryError> {
    let solver = DirichletSolver::new(dom.network())?;
    let omega = solver.harmonic_measure(dom.interior_index(u)?, &arc.members)?;
    let ann = annulus(dom, u, rho0)?;
    let (ci, comp, mapped) = map_arc_to_component(dom, &ann, arc)?;
    if ann.c_edges[ci].is_empty() {
        return Err(SurgeryError::DegenerateAnnulus);
    }
    let el = extremal_length(comp.network(), &mapped, &ann.c_edges[ci])?;
    Ok((math::ln_1p(1.0 / omega), el.el))
}

/// A slit: interior vertices from an inner-contour neighbor to an outer
/// boundary neighbor, with the two anchoring boundary edges.
#[derive(Clone, Debug)]
pub struct SlitSpec {
    /// Interior path v_0 .. v_m; v_0 anchors at the inner contour, v_m at the
    /// outer boundary. A single shared vertex is allowed.
    pub vertices: Vec<VertexId>,
    /// Boundary index (in the annulus component) of the inner anchor edge.
    pub inner_anchor: usize,
    /// Boundary index of the outer anchor edge.
    pub outer_anchor: usize,
}

/// Boundary structure of a cut annulus, as ranges of its boundary cycle in
/// counterclockwise order.
#[derive(Clone, Debug)]
pub struct CutRuns {
    pub outer: Range<usize>,
    pub left_bd: Range<usize>,
    pub inner: Range<usize>,
    pub right_bd: Range<usize>,
}

/// The annulus cut open along a slit: a simply connected network whose slit
/// vertices appear twice with their original masses.
#[derive(Clone, Debug)]
pub struct CutDomain {
    pub net: Network,
    /// Original vertex per network index.
    pub provenance: Vec<VertexId>,
    /// -1 for right copies, +1 for left copies, 0 for unduplicated vertices.
    pub copy_side: Vec<i8>,
    pub runs: CutRuns,
}

impl CutDomain {
    /// All cut-boundary indices matching the given boundary edges of the
    /// uncut component (duplicated corner edges map to both instances).
    pub fn map_edges(&self, comp: &DiscreteDomain, edges: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        for &b in edges {
            let e = comp.boundary()[b];
            for (i, port) in self.net.bd.iter().enumerate() {
                if port.outer_label == e.outer && self.provenance[port.int] == e.inner {
                    out.push(i);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn run_indices(&self, run: &Range<usize>) -> Vec<usize> {
        run.clone().collect()
    }
}

/// Side of a non-path edge at a slit vertex: +1 = left of the directed path
/// (inner to outer), -1 = right.
fn classify_sides(
    comp: &DiscreteDomain,
    spec: &SlitSpec,
) -> Result<alloc::collections::BTreeMap<(VertexId, VertexId), i8>, SurgeryError> {
    let g = comp.graph();
    let m = spec.vertices.len();
    let inner_e = comp.boundary()[spec.inner_anchor];
    let outer_e = comp.boundary()[spec.outer_anchor];
    if inner_e.inner != spec.vertices[0] || outer_e.inner != spec.vertices[m - 1] {
        return Err(SurgeryError::BadSlit("anchors do not meet the path ends"));
    }
    let mut on_path = alloc::collections::BTreeMap::new();
    for (i, &v) in spec.vertices.iter().enumerate() {
        if on_path.insert(v, i).is_some() {
            return Err(SurgeryError::BadSlit("self-intersecting path"));
        }
    }
    let mut sides = alloc::collections::BTreeMap::new();
    for (i, &v) in spec.vertices.iter().enumerate() {
        // Reference darts: backward (toward the inner anchor) and forward.
        let backward_to = if i == 0 { inner_e.outer } else { spec.vertices[i - 1] };
        let forward_to = if i + 1 == m { outer_e.outer } else { spec.vertices[i + 1] };
        let rot = g.rotation(v);
        let pos_of = |target: VertexId| -> Result<usize, SurgeryError> {
            rot.iter()
                .position(|&d| g.dart_head(d) == target)
                .ok_or(SurgeryError::BadSlit("path step is not an edge"))
        };
        let pf = pos_of(forward_to)?;
        let pb = pos_of(backward_to)?;
        if pf == pb {
            return Err(SurgeryError::BadSlit("degenerate anchors"));
        }
        let deg = rot.len();
        // Side labels follow the boundary decomposition of the cut domain:
        // walking the cut boundary counterclockwise visits the outer part,
        // then the left flank, the inner contour, and the right flank. Darts
        // strictly between forward and backward (counterclockwise from
        // forward) sit on the right of the directed path in that convention.
        let mut p = (pf + 1) % deg;
        while p != pb {
            let head = g.dart_head(rot[p]);
            sides.insert((v, head), -1);
            p = (p + 1) % deg;
        }
        let mut p = (pb + 1) % deg;
        while p != pf {
            let head = g.dart_head(rot[p]);
            sides.insert((v, head), 1);
            p = (p + 1) % deg;
        }
    }
    // Chords between path vertices must classify consistently at both ends.
    for (&(v, w), &s) in sides.iter() {
        if on_path.contains_key(&w) {
            if let Some(&s2) = sides.get(&(w, v)) {
                if s != s2 {
                    return Err(SurgeryError::BadSlit("chord changes sides"));
                }
            }
        }
    }
    Ok(sides)
}

/// Cuts the annulus component open along the slit.
pub fn cut_annulus(
    comp: &DiscreteDomain,
    c_edges: &[usize],
    spec: &SlitSpec,
) -> Result<CutDomain, SurgeryError> {
    let g = comp.graph();
    let net = comp.network();
    for &v in &spec.vertices {
        if !comp.is_interior(v) {
            return Err(SurgeryError::BadSlit("path leaves the interior"));
        }
    }
    for w in spec.vertices.windows(2) {
        if g.find_edge(w[0], w[1]).is_none() {
            return Err(SurgeryError::BadSlit("path step is not an edge"));
        }
    }
    let sides = classify_sides(comp, spec)?;
    let mut is_c = vec![false; comp.boundary().len()];
    for &b in c_edges {
        is_c[b] = true;
    }
    let mut path_pos = alloc::collections::BTreeMap::new();
    for (i, &v) in spec.vertices.iter().enumerate() {
        path_pos.insert(v, i);
    }

    // New vertex indexing: kept vertices first, then left copies, right copies.
    let nk = net.interior_count();
    let mut keep_index = vec![usize::MAX; nk];
    let mut provenance: Vec<VertexId> = Vec::new();
    let mut copy_side: Vec<i8> = Vec::new();
    for i in 0..nk {
        let v = net.labels[i];
        if !path_pos.contains_key(&v) {
            keep_index[i] = provenance.len();
            provenance.push(v);
            copy_side.push(0);
        }
    }
    let left_base = provenance.len();
    for &v in &spec.vertices {
        provenance.push(v);
        copy_side.push(1);
    }
    let right_base = provenance.len();
    for &v in &spec.vertices {
        provenance.push(v);
        copy_side.push(-1);
    }
    let n_new = provenance.len();
    let mu: Vec<f64> = provenance.iter().map(|&v| g.mass(v)).collect();

    // Target of an edge from a path vertex v_i to neighbor w, given a side.
    let copy_of = |w: VertexId, side: i8| -> usize {
        let i = path_pos[&w];
        if side > 0 {
            left_base + i
        } else {
            right_base + i
        }
    };

    // Assemble ports in the inherited rotation order; boundary ports get
    // provisional indices.
    #[derive(Clone, Copy)]
    enum ProtoPort {
        Int { to: usize, label: usize, weight: f64, rev_pos: usize },
        Bd { weight: f64, mu_outer: f64, outer_label: VertexId, kind: BdKind },
    }
    #[derive(Clone, Copy, PartialEq, Debug)]
    enum BdKind {
        Outer,
        Inner,
        LeftFlank,
        RightFlank,
    }
    let mut proto: Vec<Vec<ProtoPort>> = vec![Vec::new(); n_new];

    let new_index = |i_old: usize, from_label: VertexId, side_ctx: i8| -> usize {
        let w = net.labels[i_old];
        if let Some(&_) = path_pos.get(&w) {
            // Edge into the path from a non-path vertex: attach by the side
            // the edge leaves the path vertex.
            let s = sides
                .get(&(w, from_label))
                .copied()
                .unwrap_or(side_ctx);
            copy_of(w, s)
        } else {
            keep_index[i_old]
        }
    };

    for i_old in 0..nk {
        let v = net.labels[i_old];
        if path_pos.contains_key(&v) {
            continue;
        }
        let i_new = keep_index[i_old];
        for port in &net.ports[i_old] {
            match *port {
                Port::Interior { to, edge, rev_pos } => {
                    let target = new_index(to, v, 0);
                    proto[i_new].push(ProtoPort::Int {
                        to: target,
                        label: net.int_edges[edge].label,
                        weight: net.int_edges[edge].weight,
                        rev_pos,
                    });
                }
                Port::Boundary(b) => {
                    let port = net.bd[b];
                    proto[i_new].push(ProtoPort::Bd {
                        weight: port.weight,
                        mu_outer: port.mu_outer,
                        outer_label: port.outer_label,
                        kind: if is_c[b] { BdKind::Inner } else { BdKind::Outer },
                    });
                }
            }
        }
    }

    for (pi, &v) in spec.vertices.iter().enumerate() {
        let i_old = comp.interior_index(v)?;
        for &side in &[1i8, -1] {
            let i_new = if side > 0 { left_base + pi } else { right_base + pi };
            let flank = if side > 0 { BdKind::LeftFlank } else { BdKind::RightFlank };
            for port in &net.ports[i_old] {
                match *port {
                    Port::Interior { to, edge, rev_pos } => {
                        let w = net.labels[to];
                        let is_path_step = path_pos
                            .get(&w)
                            .map(|&j| (j as i64 - pi as i64).abs() == 1)
                            .unwrap_or(false);
                        if is_path_step {
                            proto[i_new].push(ProtoPort::Int {
                                to: copy_of(w, side),
                                label: net.int_edges[edge].label,
                                weight: net.int_edges[edge].weight,
                                rev_pos,
                            });
                        } else {
                            let s = sides[&(v, w)];
                            if s == side {
                                let target = if path_pos.contains_key(&w) {
                                    copy_of(w, side)
                                } else {
                                    keep_index[to]
                                };
                                proto[i_new].push(ProtoPort::Int {
                                    to: target,
                                    label: net.int_edges[edge].label,
                                    weight: net.int_edges[edge].weight,
                                    rev_pos,
                                });
                            } else {
                                // Far-side edge: absorbing phantom neighbor.
                                proto[i_new].push(ProtoPort::Bd {
                                    weight: net.int_edges[edge].weight,
                                    mu_outer: g.mass(w),
                                    outer_label: w,
                                    kind: flank,
                                });
                            }
                        }
                    }
                    Port::Boundary(b) => {
                        let port = net.bd[b];
                        proto[i_new].push(ProtoPort::Bd {
                            weight: port.weight,
                            mu_outer: port.mu_outer,
                            outer_label: port.outer_label,
                            kind: if is_c[b] { BdKind::Inner } else { BdKind::Outer },
                        });
                    }
                }
            }
        }
    }

    // Materialize the network: unique interior edges, boundary ports, ports.
    let mut int_edges: Vec<IntEdge> = Vec::new();
    let mut edge_of: alloc::collections::BTreeMap<(usize, usize, usize), usize> =
        alloc::collections::BTreeMap::new();
    let mut bd: Vec<BdPort> = Vec::new();
    let mut kinds: Vec<BdKind> = Vec::new();
    let mut ports: Vec<Vec<Port>> = vec![Vec::new(); n_new];
    for (i, plist) in proto.iter().enumerate() {
        for p in plist {
            match *p {
                ProtoPort::Int { to, label, weight, rev_pos } => {
                    let key = (i.min(to), i.max(to), label);
                    let eidx = *edge_of.entry(key).or_insert_with(|| {
                        int_edges.push(IntEdge {
                            u: i.min(to),
                            v: i.max(to),
                            weight,
                            label,
                        });
                        int_edges.len() - 1
                    });
                    ports[i].push(Port::Interior {
                        to,
                        edge: eidx,
                        rev_pos,
                    });
                }
                ProtoPort::Bd { weight, mu_outer, outer_label, kind } => {
                    let b = bd.len();
                    bd.push(BdPort {
                        int: i,
                        weight,
                        mu_outer,
                        outer_label,
                    });
                    kinds.push(kind);
                    ports[i].push(Port::Boundary(b));
                }
            }
        }
    }

    let mut cut = Network {
        labels: provenance.clone(),
        mu,
        ports,
        bd,
        cycles: Vec::new(),
        int_edges,
    };

    // The cut annulus is a disc: one boundary cycle splitting into four
    // contiguous runs (outer, left flank, inner contour, right flank).
    let cycles = cut
        .boundary_walk()
        .map_err(|_| SurgeryError::BadSlit("boundary walk failed"))?;
    if cycles.len() != 1 {
        return Err(SurgeryError::BadSlit("cut domain is not simply connected"));
    }
    let cycle = &cycles[0];
    let len = cycle.len();
    let kind_at = |i: usize| kinds[cycle[i % len]];
    // Rotate so the cycle starts at an outer run following a right flank (or
    // inner contour when a flank is empty).
    let mut start = 0;
    for i in 0..len {
        let prev = kind_at(i + len - 1);
        if kind_at(i) == BdKind::Outer && prev != BdKind::Outer {
            start = i;
            break;
        }
    }
    let order: Vec<usize> = (0..len).map(|i| cycle[(start + i) % len]).collect();
    let seq: Vec<BdKind> = order.iter().map(|&b| kinds[b]).collect();
    let mut runs = [0usize; 4];
    for k in &seq {
        match k {
            BdKind::Outer => runs[0] += 1,
            BdKind::LeftFlank => runs[1] += 1,
            BdKind::Inner => runs[2] += 1,
            BdKind::RightFlank => runs[3] += 1,
        }
    }
    // Contiguity: the sequence must be outer*, left*, inner*, right*.
    let expected: Vec<BdKind> = core::iter::empty()
        .chain(core::iter::repeat(BdKind::Outer).take(runs[0]))
        .chain(core::iter::repeat(BdKind::LeftFlank).take(runs[1]))
        .chain(core::iter::repeat(BdKind::Inner).take(runs[2]))
        .chain(core::iter::repeat(BdKind::RightFlank).take(runs[3]))
        .collect();
    if seq != expected {
        return Err(SurgeryError::BadSlit("boundary runs are not contiguous"));
    }
    cut.apply_boundary_order(&order, &[len]);
    let r0 = 0..runs[0];
    let r1 = r0.end..r0.end + runs[1];
    let r2 = r1.end..r1.end + runs[2];
    let r3 = r2.end..r2.end + runs[3];
    Ok(CutDomain {
        net: cut,
        provenance,
        copy_side,
        runs: CutRuns {
            outer: r0,
            left_bd: r1,
            inner: r2,
            right_bd: r3,
        },
    })
}

/// Slit search mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlitMode {
    /// Level line of the harmonic conjugate: the cut changes the extremal
    /// length by at most a factor of two.
    ConjugateSign,
    /// Level path of the potential itself at height 1 - 1/q.
    LevelSet { q: f64 },
}

/// Outcome of a slit search.
#[derive(Clone, Debug)]
pub enum SlitOutcome {
    Slit(SlitSpec),
    /// Level-set dichotomy: the arc is not far from the center, so no slit is
    /// needed; reports EL(annulus; inner, arc) and EL(annulus; inner, whole
    /// outer boundary).
    FirstBranch { el_arc: f64, el_full: f64 },
}

/// Finds a slit of the annulus component from the inner contour to the free
/// outer boundary.
pub fn find_slit(
    comp: &DiscreteDomain,
    c_edges: &[usize],
    arc: &[usize],
    mode: SlitMode,
) -> Result<SlitOutcome, SurgeryError> {
    let net = comp.network();
    let mut is_c = vec![false; comp.boundary().len()];
    for &b in c_edges {
        is_c[b] = true;
    }
    let mut in_arc = vec![false; comp.boundary().len()];
    for &b in arc {
        in_arc[b] = true;
    }
    let free: Vec<usize> = (0..comp.boundary().len())
        .filter(|&b| !is_c[b] && !in_arc[b])
        .collect();
    if free.is_empty() {
        return Err(SurgeryError::BadSlit("no free outer boundary"));
    }
    let el = extremal_length(net, arc, c_edges)?;
    let v = &el.field;

    match mode {
        SlitMode::LevelSet { q } => {
            if !(q > 1.0) {
                return Err(SurgeryError::BadSlit("level-set mode needs q > 1"));
            }
            let threshold = 1.0 - 1.0 / q;
            let d = free
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    v.interior[net.bd[a].int]
                        .total_cmp(&v.interior[net.bd[b].int])
                        .then(b.cmp(&a))
                })
                .expect("free boundary nonempty");
            if v.interior[net.bd[d].int] < threshold {
                let el_full: Vec<usize> = (0..comp.boundary().len()).filter(|&b| !is_c[b]).collect();
                let full = extremal_length(net, &el_full, c_edges)?;
                return Ok(SlitOutcome::FirstBranch {
                    el_arc: el.el,
                    el_full: full.el,
                });
            }
            // Ascend the potential from d's inner vertex to the inner contour.
            let mut cur = net.bd[d].int;
            let mut path = vec![net.labels[cur]];
            let mut visited = vec![false; net.interior_count()];
            visited[cur] = true;
            let inner_anchor = loop {
                if let Some(b) = net.bd_ports_of(cur).find(|&b| is_c[b]) {
                    break b;
                }
                let mut best: Option<(f64, usize)> = None;
                for p in &net.ports[cur] {
                    if let Port::Interior { to, .. } = p {
                        if !visited[*to] && v.interior[*to] >= threshold {
                            let cand = (v.interior[*to], *to);
                            if best.map(|b| cand.0 > b.0).unwrap_or(true) {
                                best = Some(cand);
                            }
                        }
                    }
                }
                match best {
                    Some((_, to)) => {
                        cur = to;
                        visited[cur] = true;
                        path.push(net.labels[cur]);
                    }
                    None => return Err(SurgeryError::BadSlit("level path stalled")),
                }
            };
            path.reverse();
            Ok(SlitOutcome::Slit(SlitSpec {
                vertices: path,
                inner_anchor,
                outer_anchor: d,
            }))
        }
        SlitMode::ConjugateSign => {
            let conj = harmonic_conjugate(comp, &v.interior, &v.boundary)?;
            let monodromy = conj.monodromy;
            if monodromy <= 0.0 {
                return Err(SurgeryError::BadSlit("no monodromy; not an annulus"));
            }
            let g = comp.graph();
            // Level offset: the conjugate is constant along the free outer
            // fans; trace its zero set from the inner contour outward.
            let lambda = {
                let fb = free[0];
                let fan = comp.fan(fb);
                conj.value(fan[0]).ok_or(SurgeryError::BadSlit("fan face missing"))?
            };
            // True increment across an oriented boundary or interior dart.
            let value_at = |idx: usize| v.interior[idx];
            let bd_data = |b: usize| v.boundary[b];
            // Crossing test: does the conjugate pass a multiple of the
            // monodromy across this dart (from its right face to its left)?
            let crosses = |right_face: usize, inc: f64| -> bool {
                let base = match conj.value(right_face) {
                    Some(t) => t - lambda,
                    None => return false,
                };
                math::floor(base / monodromy) != math::floor((base + inc) / monodromy)
            };
            // Start: the inner-contour boundary edge whose crossing is set.
            let mut start = None;
            for &b in c_edges {
                let e = comp.boundary()[b];
                let dart = Dart(2 * e.edge);
                let (tail, _, w) = g.edge(e.edge);
                let inc = if e.inner == tail {
                    w * (bd_data(b) - value_at(net.bd[b].int))
                } else {
                    w * (value_at(net.bd[b].int) - bd_data(b))
                };
                let fr = g.face_of_dart(dart.reversed());
                if crosses(fr, inc) {
                    start = Some(b);
                    break;
                }
            }
            let start = start.ok_or(SurgeryError::BadSlit("no level crossing on the contour"))?;
            // Trace the crossed-edge chain through interior vertices.
            let mut path = vec![comp.boundary()[start].inner];
            let mut cur = comp.boundary()[start].inner;
            let mut came_from: Option<VertexId> = Some(comp.boundary()[start].outer);
            let mut guard = 0;
            let outer_anchor = loop {
                guard += 1;
                if guard > 4 * net.interior_count() + 8 {
                    return Err(SurgeryError::BadSlit("level trace did not terminate"));
                }
                // The conjugate is constant along the free outer boundary, so
                // the level line terminates as soon as it reaches a vertex on
                // the free plateau; anchor the slit on that boundary edge.
                let cur_idx = comp.interior_index(cur)?;
                if let Some(b) = net.bd_ports_of(cur_idx).find(|&b| !is_c[b] && !in_arc[b]) {
                    break b;
                }
                // Otherwise find the crossed edge at `cur` besides the arrival.
                let mut next: Option<(VertexId, Option<usize>)> = None;
                for d in g.rotation(cur) {
                    let head = g.dart_head(*d);
                    if Some(head) == came_from {
                        continue;
                    }
                    let e = d.edge();
                    let (tail, _, w) = g.edge(e);
                    // Values at the two endpoints (interior or boundary data).
                    let hv = if comp.is_interior(head) {
                        value_at(comp.interior_index(head)?)
                    } else {
                        // Boundary edge (cur -> head).
                        let b = comp
                            .boundary_index(cur, head)
                            .ok_or(SurgeryError::BadSlit("edge leaves the component"))?;
                        bd_data(b)
                    };
                    let cv = value_at(comp.interior_index(cur)?);
                    let (vtail, vhead) = if cur == tail { (cv, hv) } else { (hv, cv) };
                    let inc = w * (vhead - vtail);
                    let fr = g.face_of_dart(Dart(2 * e).reversed());
                    if crosses(fr, inc) {
                        if comp.is_interior(head) {
                            next = Some((head, None));
                        } else {
                            let b = comp.boundary_index(cur, head).expect("checked above");
                            next = Some((head, Some(b)));
                        }
                        break;
                    }
                }
                match next {
                    Some((_, Some(b))) => {
                        if is_c[b] {
                            return Err(SurgeryError::BadSlit("level trace returned to the contour"));
                        }
                        return Err(SurgeryError::BadSlit("level trace hit the electrode arc"));
                    }
                    Some((head, None)) => {
                        came_from = Some(cur);
                        cur = head;
                        path.push(cur);
                    }
                    None => return Err(SurgeryError::BadSlit("level trace stalled")),
                }
            };
            Ok(SlitOutcome::Slit(SlitSpec {
                vertices: path,
                inner_anchor: start,
                outer_anchor,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::network::Endpoint;

    fn rect_sides(dom: &DiscreteDomain, m: u32) -> (Vec<usize>, Vec<usize>) {
        let g = dom.graph();
        let left = dom
            .boundary()
            .iter()
            .enumerate()
            .filter(|(_, e)| g.position(e.outer).x < -0.5)
            .map(|(i, _)| i)
            .collect();
        let right = dom
            .boundary()
            .iter()
            .enumerate()
            .filter(|(_, e)| g.position(e.outer).x > m as f64 - 0.5)
            .map(|(i, _)| i)
            .collect();
        (left, right)
    }

    fn arc_of(_dom: &DiscreteDomain, edges: &[usize]) -> BoundaryArc {
        BoundaryArc {
            start: edges[0],
            end: *edges.last().unwrap(),
            members: edges.to_vec(),
            degenerate: false,
        }
    }

    #[test]
    fn mirror_symmetric_split_at_one() {
        let dom = generate(&Family::Rect { m: 8, n: 4 }, 0).unwrap();
        let (left, right) = rect_sides(&dom, 8);
        let split = separator_split(&dom, &arc_of(&dom, &left), &arc_of(&dom, &right), 1.0).unwrap();
        assert_eq!(split.status, SplitStatus::Usable);
        assert_eq!(split.interior_a.len(), split.interior_b.len());
        // Slit edges all cross the symmetry axis x = 3.5.
        let g = dom.graph();
        for &(ua, ub) in &split.slit {
            assert!(g.position(ua).x < 3.6 && g.position(ub).x > 3.4);
        }
        // Threshold consistency: R >= k on the A side of every slit edge.
        let solver = DirichletSolver::new(dom.network()).unwrap();
        let ha = solver.z_field(&left).unwrap();
        let hb = solver.z_field(&right).unwrap();
        for &(ua, ub) in &split.slit {
            let ia = dom.interior_index(ua).unwrap();
            let ib = dom.interior_index(ub).unwrap();
            assert!(ha.interior[ia] >= hb.interior[ia]);
            assert!(ha.interior[ib] < hb.interior[ib]);
        }
        let (fact, ratio) = separator_verify(&dom, &arc_of(&dom, &left), &arc_of(&dom, &right), &split).unwrap();
        assert!((ratio - 1.0).abs() < 1e-9, "symmetric ratio {ratio}");
        assert!(fact > 0.0);
    }

    #[test]
    fn split_monotone_in_k() {
        let dom = generate(&Family::Rect { m: 8, n: 4 }, 0).unwrap();
        let (left, right) = rect_sides(&dom, 8);
        let la = arc_of(&dom, &left);
        let lb = arc_of(&dom, &right);
        let mut last_a = usize::MAX;
        let mut last_ratio = f64::NEG_INFINITY;
        for k in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let split = separator_split(&dom, &la, &lb, k).unwrap();
            assert!(split.interior_a.len() <= last_a);
            last_a = split.interior_a.len();
            if split.status == SplitStatus::Usable {
                let (_, r) = separator_verify(&dom, &la, &lb, &split).unwrap();
                // Z_A'/Z_B' grows with k, so r*k = Z_A'/Z_B' is nondecreasing.
                assert!(r * k >= last_ratio - 1e-12);
                last_ratio = r * k;
            }
        }
    }

    #[test]
    fn plus_split_degenerate() {
        let dom = generate(&Family::Plus, 0).unwrap();
        let split = separator_split(&dom, &arc_of(&dom, &[0]), &arc_of(&dom, &[2]), 1.0).unwrap();
        // The single interior vertex has ratio exactly one, so side B is empty.
        assert_eq!(split.status, SplitStatus::EmptySideB);
        assert!(split.slit.is_empty());
    }

    #[test]
    fn inclusion_chain_on_rect() {
        let dom = generate(&Family::Rect { m: 8, n: 4 }, 0).unwrap();
        let nb = dom.boundary().len();
        // Three arcs: A opposite, B and C adjacent along the far side.
        let a = dom.arc(0, 3).unwrap();
        let b = dom.arc(nb / 2, nb / 2 + 3).unwrap();
        let c = dom.arc(nb / 2 + 4, nb / 2 + 7).unwrap();
        // Reference edges strictly between the arcs.
        for x in [5usize, 7, nb / 2 - 1] {
            assert!(separator_inclusion_check(&dom, &a, &b, &c, x).unwrap(), "x = {x}");
        }
        for y in [nb / 2 + 9, nb - 2] {
            assert!(separator_inclusion_check(&dom, &a, &b, &c, y).unwrap(), "y = {y}");
        }
    }

    #[test]
    fn annulus_structure_on_square() {
        let dom = generate(&Family::SquareSym { k: 9 }, 0).unwrap();
        let g = dom.graph();
        let center = dom
            .interior()
            .iter()
            .copied()
            .find(|&v| {
                let p = g.position(v);
                (p.x - 4.0).abs() < 1e-9 && (p.y - 4.0).abs() < 1e-9
            })
            .unwrap();
        let ann = annulus(&dom, center, 0.25).unwrap();
        assert!(ann.doubly_connected);
        assert_eq!(ann.components.len(), 1);
        assert!(!ann.c_edges[0].is_empty());
        assert!(ann.green_bracket.0 > 0.0);
        assert!(ann.green_bracket.1 < 1.0);
        // Center adjacent to the boundary: fallback, not doubly connected.
        let corner = dom
            .interior()
            .iter()
            .copied()
            .find(|&v| {
                let p = g.position(v);
                p.x.abs() < 1e-9 && p.y.abs() < 1e-9
            })
            .unwrap();
        let ann2 = annulus(&dom, corner, 0.25);
        match ann2 {
            Ok(a) => assert!(!a.doubly_connected),
            Err(SurgeryError::DegenerateAnnulus) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn hm_and_el_via_annulus() {
        let dom = generate(&Family::SquareSym { k: 9 }, 0).unwrap();
        let g = dom.graph();
        let center = dom
            .interior()
            .iter()
            .copied()
            .find(|&v| {
                let p = g.position(v);
                (p.x - 4.0).abs() < 1e-9 && (p.y - 4.0).abs() < 1e-9
            })
            .unwrap();
        // One side of the square as the target arc.
        let side: Vec<usize> = dom
            .boundary()
            .iter()
            .enumerate()
            .filter(|(_, e)| g.position(e.outer).y < -0.5)
            .map(|(i, _)| i)
            .collect();
        let arc = arc_of(&dom, &side);
        let (omega, z) = hm_via_annulus(&dom, center, &arc, 0.25).unwrap();
        assert!((omega - 0.25).abs() < 1e-10);
        assert!(z > 0.0);
        let (lhs, el) = log_hm_vs_el(&dom, center, &arc, 0.25).unwrap();
        assert!(lhs > 0.0 && el > 0.0);
        // omega additivity across a partition of the outer boundary.
        let all: Vec<usize> = (0..dom.boundary().len()).collect();
        let solver = DirichletSolver::new(dom.network()).unwrap();
        let total = solver
            .harmonic_measure(dom.interior_index(center).unwrap(), &all)
            .unwrap();
        assert!((total - 1.0).abs() < 1e-10);
    }

    fn ring_fixture() -> (DiscreteDomain, VertexId) {
        let dom = generate(&Family::SquareSym { k: 9 }, 0).unwrap();
        let g = dom.graph();
        let center = dom
            .interior()
            .iter()
            .copied()
            .find(|&v| {
                let p = g.position(v);
                (p.x - 4.0).abs() < 1e-9 && (p.y - 4.0).abs() < 1e-9
            })
            .unwrap();
        (dom, center)
    }

    #[test]
    fn cut_annulus_straight_slit() {
        let (dom, center) = ring_fixture();
        let ann = annulus(&dom, center, 0.25).unwrap();
        let comp = &ann.components[0];
        let g = comp.graph();
        // Straight radial slit east of the center: vertices (6,4), (7,4), (8,4).
        let vid = |x: f64, y: f64| {
            comp.interior()
                .iter()
                .copied()
                .find(|&v| {
                    let p = g.position(v);
                    (p.x - x).abs() < 1e-9 && (p.y - y).abs() < 1e-9
                })
                .unwrap()
        };
        let path = vec![vid(6.0, 4.0), vid(7.0, 4.0), vid(8.0, 4.0)];
        let inner_anchor = comp.boundary_index(path[0], vid_any(g, 5.0, 4.0)).unwrap();
        let outer_anchor = comp.boundary_index(path[2], vid_any(g, 9.0, 4.0)).unwrap();
        let spec = SlitSpec {
            vertices: path,
            inner_anchor,
            outer_anchor,
        };
        let cut = cut_annulus(comp, &ann.c_edges[0], &spec).unwrap();
        // Simply connected with four contiguous runs.
        assert_eq!(cut.net.cycles.len(), 1);
        assert!(!cut.runs.outer.is_empty());
        assert!(!cut.runs.left_bd.is_empty());
        assert!(!cut.runs.inner.is_empty());
        assert!(!cut.runs.right_bd.is_empty());
        // Vertex bookkeeping: uncut vertices once, slit vertices twice.
        let mut counts = alloc::collections::BTreeMap::new();
        for &v in &cut.provenance {
            *counts.entry(v).or_insert(0usize) += 1;
        }
        for &v in comp.interior() {
            let expected = if spec.vertices.contains(&v) { 2 } else { 1 };
            assert_eq!(counts[&v], expected, "vertex {v}");
        }
        // Inner contour of the cut has one extra (duplicated corner) edge.
        assert_eq!(cut.runs.inner.len(), ann.c_edges[0].len() + 1);
    }

    fn vid_any(g: &crate::graph::EmbeddedGraph, x: f64, y: f64) -> VertexId {
        (0..g.vertex_count())
            .find(|&v| {
                let p = g.position(v);
                (p.x - x).abs() < 1e-9 && (p.y - y).abs() < 1e-9
            })
            .unwrap()
    }

    #[test]
    fn cut_domain_sandwich() {
        let (dom, center) = ring_fixture();
        let ann = annulus(&dom, center, 0.25).unwrap();
        let comp = &ann.components[0];
        let g = dom.graph();
        let side: Vec<usize> = dom
            .boundary()
            .iter()
            .enumerate()
            .filter(|(_, e)| g.position(e.outer).y < -0.5)
            .map(|(i, _)| i)
            .collect();
        let arc = arc_of(&dom, &side);
        let (_, compref, mapped) = map_arc_to_component(&dom, &ann, &arc).unwrap();
        assert!(core::ptr::eq(compref, comp));
        // Slit on the far side from the arc (north).
        let path = vec![
            vid_any(g, 4.0, 6.0),
            vid_any(g, 4.0, 7.0),
            vid_any(g, 4.0, 8.0),
        ];
        let spec = SlitSpec {
            vertices: path.clone(),
            inner_anchor: comp.boundary_index(path[0], vid_any(g, 4.0, 5.0)).unwrap(),
            outer_anchor: comp.boundary_index(path[2], vid_any(g, 4.0, 9.0)).unwrap(),
        };
        let cut = cut_annulus(comp, &ann.c_edges[0], &spec).unwrap();
        let solver_a = DirichletSolver::new(comp.network()).unwrap();
        let z_a = solver_a.partition_z_arcs(&ann.c_edges[0], &mapped).unwrap();
        let solver_cut = DirichletSolver::new(&cut.net).unwrap();
        let arc_cut = cut.map_edges(comp, &mapped);
        let inner_cut = cut.run_indices(&cut.runs.inner);
        let z_lower = solver_cut.partition_z_arcs(&inner_cut, &arc_cut).unwrap();
        let mut wide = inner_cut.clone();
        wide.extend(cut.run_indices(&cut.runs.left_bd));
        wide.extend(cut.run_indices(&cut.runs.right_bd));
        let z_upper = solver_cut.partition_z_arcs(&wide, &arc_cut).unwrap();
        assert!(z_lower <= z_a * (1.0 + 1e-10), "lower {z_lower} vs {z_a}");
        assert!(z_a <= z_upper * (1.0 + 1e-10), "upper {z_upper} vs {z_a}");
    }

    #[test]
    fn conjugate_slit_el_bound() {
        let (dom, center) = ring_fixture();
        let ann = annulus(&dom, center, 0.25).unwrap();
        let comp = &ann.components[0];
        let g = dom.graph();
        let side: Vec<usize> = dom
            .boundary()
            .iter()
            .enumerate()
            .filter(|(_, e)| g.position(e.outer).y < -0.5)
            .map(|(i, _)| i)
            .collect();
        let arc = arc_of(&dom, &side);
        let (_, _, mapped) = map_arc_to_component(&dom, &ann, &arc).unwrap();
        let base = extremal_length(comp.network(), &mapped, &ann.c_edges[0]).unwrap();
        let outcome = find_slit(comp, &ann.c_edges[0], &mapped, SlitMode::ConjugateSign).unwrap();
        let spec = match outcome {
            SlitOutcome::Slit(s) => s,
            SlitOutcome::FirstBranch { .. } => panic!("expected a slit"),
        };
        // The slit lands away from the arc: its outer anchor is a free edge.
        assert!(!mapped.contains(&spec.outer_anchor));
        let cut = cut_annulus(comp, &ann.c_edges[0], &spec).unwrap();
        let arc_cut = cut.map_edges(comp, &mapped);
        let inner_cut = cut.run_indices(&cut.runs.inner);
        let el_cut = extremal_length(&cut.net, &arc_cut, &inner_cut).unwrap();
        assert!(
            el_cut.el <= 2.0 * base.el + 1e-9,
            "cut EL {} vs base {}",
            el_cut.el,
            base.el
        );
        // The slit follows a current flow line, so the two sides are nearly
        // equal; the duplicated slit edges can only lower the resistance a
        // little.
        assert!(el_cut.el >= 0.5 * base.el);
    }

    #[test]
    fn level_set_slit_modes() {
        let (dom, center) = ring_fixture();
        let ann = annulus(&dom, center, 0.25).unwrap();
        let comp = &ann.components[0];
        let g = dom.graph();
        let side: Vec<usize> = dom
            .boundary()
            .iter()
            .enumerate()
            .filter(|(_, e)| g.position(e.outer).y < -0.5)
            .map(|(i, _)| i)
            .collect();
        let arc = arc_of(&dom, &side);
        let (_, _, mapped) = map_arc_to_component(&dom, &ann, &arc).unwrap();
        let base = extremal_length(comp.network(), &mapped, &ann.c_edges[0]).unwrap();
        let q = 2.0;
        match find_slit(comp, &ann.c_edges[0], &mapped, SlitMode::LevelSet { q }).unwrap() {
            SlitOutcome::Slit(spec) => {
                let cut = cut_annulus(comp, &ann.c_edges[0], &spec).unwrap();
                let arc_cut = cut.map_edges(comp, &mapped);
                let mut wide = cut.run_indices(&cut.runs.inner);
                wide.extend(cut.run_indices(&cut.runs.left_bd));
                wide.extend(cut.run_indices(&cut.runs.right_bd));
                let el_cut = extremal_length(&cut.net, &arc_cut, &wide).unwrap();
                let factor = (1.0 - 1.0 / q) * (1.0 - 1.0 / q);
                assert!(
                    el_cut.el >= factor * base.el - 1e-9,
                    "cut EL {} vs {} * base {}",
                    el_cut.el,
                    factor,
                    base.el
                );
            }
            SlitOutcome::FirstBranch { el_arc, el_full } => {
                assert!(el_arc < q * q * el_full + 1e-9);
            }
        }
    }

    #[test]
    fn cut_z_matches_direct_enumeration_on_masses() {
        // Masses and weights are inherited: check one slit copy keeps mu.
        let (dom, center) = ring_fixture();
        let ann = annulus(&dom, center, 0.25).unwrap();
        let comp = &ann.components[0];
        let g = dom.graph();
        let path = vec![vid_any(g, 6.0, 4.0), vid_any(g, 7.0, 4.0), vid_any(g, 8.0, 4.0)];
        let spec = SlitSpec {
            vertices: path.clone(),
            inner_anchor: comp.boundary_index(path[0], vid_any(g, 5.0, 4.0)).unwrap(),
            outer_anchor: comp.boundary_index(path[2], vid_any(g, 9.0, 4.0)).unwrap(),
        };
        let cut = cut_annulus(comp, &ann.c_edges[0], &spec).unwrap();
        for (i, &v) in cut.provenance.iter().enumerate() {
            assert_eq!(cut.net.mu[i], g.mass(v));
        }
        // Each copy of an interior slit vertex lost mass to phantoms: the sum
        // of its retained port weights is strictly below mu.
        for (i, &side) in cut.copy_side.iter().enumerate() {
            let total: f64 = cut.net.ports[i]
                .iter()
                .map(|p| match p {
                    Port::Interior { edge, .. } => cut.net.int_edges[*edge].weight,
                    Port::Boundary(b) => cut.net.bd[*b].weight,
                })
                .sum();
            if side == 0 {
                assert!((total - cut.net.mu[i]).abs() < 1e-12);
            } else {
                assert!((total - cut.net.mu[i]).abs() < 1e-12,
                    "copies keep all ports as interior or phantom boundary");
            }
        }
        let solver = DirichletSolver::new(&cut.net).unwrap();
        let z = solver
            .partition_z(
                Endpoint::Boundary(cut.runs.inner.start),
                Endpoint::Boundary(cut.runs.outer.start),
            )
            .unwrap();
        assert!(z.value > 0.0);
    }
}
