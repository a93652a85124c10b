//! Discrete Laplace problems on a network: harmonic measure, Green's
//! function, random-walk partition functions Z, and the boundary ratio
//! function R.
//!
//! All solves share one LDL^T factorization of the conductance system in
//! symmetric form (weights w_e, diagonal = vertex mass), so Green symmetry
//! holds to solver accuracy. Z-values reduce to Dirichlet solves:
//! interior-interior is the Green value, interior-boundary is mu_b^{-1}
//! times the harmonic measure of the single edge, and boundary-boundary
//! peels off the first step of every path along its starting edge.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::network::{Endpoint, Network, NetworkError};
use crate::solve::{Factor, SolveError, SpdSystem};

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialError {
    Solve(SolveError),
    Network(NetworkError),
    OverlappingArcs,
    IndexOutOfRange,
    EmptyArc,
}

impl fmt::Display for PotentialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialError::Solve(e) => write!(f, "linear solve failed: {e}"),
            PotentialError::Network(e) => write!(f, "{e}"),
            PotentialError::OverlappingArcs => write!(f, "arcs must be disjoint"),
            PotentialError::IndexOutOfRange => write!(f, "endpoint index out of range"),
            PotentialError::EmptyArc => write!(f, "arc must be nonempty"),
        }
    }
}

impl core::error::Error for PotentialError {}

impl From<SolveError> for PotentialError {
    fn from(e: SolveError) -> Self {
        PotentialError::Solve(e)
    }
}

impl From<NetworkError> for PotentialError {
    fn from(e: NetworkError) -> Self {
        PotentialError::Network(e)
    }
}

/// Result of a Dirichlet solve: values on interior vertices plus the boundary
/// data it extends, with the achieved relative residual.
#[derive(Clone, Debug)]
pub struct HarmonicField {
    pub interior: Vec<f64>,
    pub boundary: Vec<f64>,
    pub residual: f64,
}

/// Green's function with pole at an interior vertex; vanishes on the boundary.
#[derive(Clone, Debug)]
pub struct GreenField {
    pub pole: usize,
    pub interior: Vec<f64>,
    pub residual: f64,
}

/// A partition-function value between two endpoints.
#[derive(Clone, Copy, Debug)]
pub struct PartitionValue {
    pub value: f64,
    pub x: Endpoint,
    pub y: Endpoint,
    /// True when x = y is a boundary edge and the loop-sum convention applies.
    pub loop_convention: bool,
}

/// Shared factorization for all Dirichlet-type solves on one network.
pub struct DirichletSolver<'n> {
    net: &'n Network,
    sys: SpdSystem,
    factor: Factor,
}

impl<'n> DirichletSolver<'n> {
    pub fn new(net: &'n Network) -> Result<Self, PotentialError> {
        let sys = net.dirichlet_system();
        let factor = Factor::new(&sys)?;
        Ok(DirichletSolver { net, sys, factor })
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    fn solve_rhs(&self, rhs: &[f64]) -> (Vec<f64>, f64) {
        let x = self.factor.solve(rhs);
        let residual = self.sys.relative_residual(&x, rhs);
        (x, residual)
    }

    /// Unique discrete harmonic extension of boundary data given per boundary
    /// edge.
    pub fn solve(&self, data: &[f64]) -> Result<HarmonicField, PotentialError> {
        if data.len() != self.net.boundary_count() {
            return Err(PotentialError::IndexOutOfRange);
        }
        let rhs = self.net.dirichlet_rhs(data);
        let (interior, residual) = self.solve_rhs(&rhs);
        #[cfg(debug_assertions)]
        {
            // Maximum principle for source-free solves.
            let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let slack = 1e-9 * (1.0 + hi.abs().max(lo.abs()));
            debug_assert!(interior.iter().all(|&v| v >= lo - slack && v <= hi + slack));
        }
        Ok(HarmonicField {
            interior,
            boundary: data.to_vec(),
            residual,
        })
    }

    /// Harmonic measure of a boundary-edge set, as a field.
    pub fn harmonic_measure_field(&self, edges: &[usize]) -> Result<HarmonicField, PotentialError> {
        let mut data = vec![0.0; self.net.boundary_count()];
        for &b in edges {
            if b >= data.len() {
                return Err(PotentialError::IndexOutOfRange);
            }
            data[b] = 1.0;
        }
        self.solve(&data)
    }

    /// Harmonic measure seen from one interior vertex (by network index).
    pub fn harmonic_measure(&self, u: usize, edges: &[usize]) -> Result<f64, PotentialError> {
        if u >= self.net.interior_count() {
            return Err(PotentialError::IndexOutOfRange);
        }
        Ok(self.harmonic_measure_field(edges)?.interior[u])
    }

    /// Green's function with pole `u`: conductance system, unit source.
    pub fn green(&self, u: usize) -> Result<GreenField, PotentialError> {
        if u >= self.net.interior_count() {
            return Err(PotentialError::IndexOutOfRange);
        }
        let mut rhs = vec![0.0; self.net.interior_count()];
        rhs[u] = 1.0;
        let (interior, residual) = self.solve_rhs(&rhs);
        Ok(GreenField {
            pole: u,
            interior,
            residual,
        })
    }

    /// Field of Z(. ; targets): harmonic extension of mu_b^{-1} on each
    /// target edge, zero elsewhere.
    pub fn z_field(&self, targets: &[usize]) -> Result<HarmonicField, PotentialError> {
        let mut data = vec![0.0; self.net.boundary_count()];
        for &b in targets {
            if b >= data.len() {
                return Err(PotentialError::IndexOutOfRange);
            }
            data[b] = 1.0 / self.net.bd[b].mu_outer;
        }
        self.solve(&data)
    }

    /// Two-point partition function between interior vertices and/or boundary
    /// edges.
    pub fn partition_z(&self, x: Endpoint, y: Endpoint) -> Result<PartitionValue, PotentialError> {
        let value;
        let mut loop_convention = false;
        match (x, y) {
            (Endpoint::Interior(u), Endpoint::Interior(v)) => {
                let g = self.green(u)?;
                if v >= self.net.interior_count() {
                    return Err(PotentialError::IndexOutOfRange);
                }
                value = g.interior[v];
            }
            (Endpoint::Interior(u), Endpoint::Boundary(b))
            | (Endpoint::Boundary(b), Endpoint::Interior(u)) => {
                let h = self.z_field(&[b])?;
                if u >= self.net.interior_count() {
                    return Err(PotentialError::IndexOutOfRange);
                }
                value = h.interior[u];
            }
            (Endpoint::Boundary(a), Endpoint::Boundary(b)) => {
                if a >= self.net.boundary_count() || b >= self.net.boundary_count() {
                    return Err(PotentialError::IndexOutOfRange);
                }
                if a == b {
                    // Loop sum: both path ends use the edge, the rest is the
                    // Green value at the inner vertex.
                    let pa = self.net.bd[a];
                    let g = self.green(pa.int)?;
                    let varpi = self.net.bd_transition_in(a);
                    value = varpi * varpi * g.interior[pa.int];
                    loop_convention = true;
                } else {
                    let h = self.z_field(&[b])?;
                    let pa = self.net.bd[a];
                    value = self.net.bd_transition_in(a) * h.interior[pa.int];
                }
            }
        }
        Ok(PartitionValue {
            value,
            x,
            y,
            loop_convention,
        })
    }

    /// Partition function between disjoint boundary-edge sets, via a single
    /// solve against the target set.
    pub fn partition_z_arcs(&self, a: &[usize], b: &[usize]) -> Result<f64, PotentialError> {
        if a.is_empty() || b.is_empty() {
            return Err(PotentialError::EmptyArc);
        }
        let mut in_b = vec![false; self.net.boundary_count()];
        for &e in b {
            if e >= in_b.len() {
                return Err(PotentialError::IndexOutOfRange);
            }
            in_b[e] = true;
        }
        if a.iter().any(|&e| e >= in_b.len() || in_b[e]) {
            if a.iter().any(|&e| e >= in_b.len()) {
                return Err(PotentialError::IndexOutOfRange);
            }
            return Err(PotentialError::OverlappingArcs);
        }
        let h = self.z_field(b)?;
        let mut total = 0.0;
        for &e in a {
            let port = self.net.bd[e];
            total += self.net.bd_transition_in(e) * h.interior[port.int];
        }
        Ok(total)
    }

    /// Boundary ratio R(x; A, B) = Z(x; A) / Z(x; B); the first-step factor
    /// cancels, so only the interior values at x_int enter.
    pub fn ratio_r(&self, x: usize, a: &[usize], b: &[usize]) -> Result<f64, PotentialError> {
        if a.contains(&x) || b.contains(&x) {
            return Err(PotentialError::OverlappingArcs);
        }
        let ha = self.z_field(a)?;
        let hb = self.z_field(b)?;
        let i = self.net.bd[x].int;
        Ok(ha.interior[i] / hb.interior[i])
    }

    /// R at several boundary edges, sharing the two solves.
    pub fn ratio_r_profile(
        &self,
        xs: &[usize],
        a: &[usize],
        b: &[usize],
    ) -> Result<Vec<f64>, PotentialError> {
        let ha = self.z_field(a)?;
        let hb = self.z_field(b)?;
        xs.iter()
            .map(|&x| {
                if x >= self.net.boundary_count() {
                    return Err(PotentialError::IndexOutOfRange);
                }
                let i = self.net.bd[x].int;
                Ok(ha.interior[i] / hb.interior[i])
            })
            .collect()
    }

    /// Interior vertex maximizing the minimum harmonic measure of the three
    /// arcs; returns (network index, achieved minimum).
    pub fn find_interior_anchor(
        &self,
        arc_ab: &[usize],
        arc_bc: &[usize],
        arc_ca: &[usize],
    ) -> Result<(usize, f64), PotentialError> {
        let h1 = self.harmonic_measure_field(arc_ab)?;
        let h2 = self.harmonic_measure_field(arc_bc)?;
        let h3 = self.harmonic_measure_field(arc_ca)?;
        let mut best = (0usize, f64::NEG_INFINITY);
        for i in 0..self.net.interior_count() {
            let m = h1.interior[i].min(h2.interior[i]).min(h3.interior[i]);
            if m > best.1 {
                best = (i, m);
            }
        }
        Ok(best)
    }
}
