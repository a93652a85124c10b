//! Test-support oracles, independent of the solver path under test.
//!
//! Partition functions are recomputed as truncated power series over the
//! interior transition operator M (mass moves along interior edges with
//! probability w/mu). The series terms decay geometrically, so truncating
//! once the surviving mass drops below the cutoff certifies the tail.

use dpt_core::domain::DiscreteDomain;
use dpt_core::network::Port;

fn step(dom: &DiscreteDomain, p: &[f64]) -> Vec<f64> {
    let net = dom.network();
    let mut out = vec![0.0; p.len()];
    for (v, ports) in net.ports.iter().enumerate() {
        if p[v] == 0.0 {
            continue;
        }
        for port in ports {
            if let Port::Interior { to, edge, .. } = port {
                out[*to] += p[v] * net.int_edges[*edge].weight / net.mu[v];
            }
        }
    }
    out
}

/// Z between two boundary edges: every path is a -> a_int -> ... -> b_int -> b
/// with weight mu_b^{-1} prod(step probabilities).
pub fn z_boundary_series(dom: &DiscreteDomain, a: usize, b: usize, tail: f64) -> f64 {
    let net = dom.network();
    let pa = net.bd[a];
    let pb = net.bd[b];
    let mut p = vec![0.0; net.interior_count()];
    p[pa.int] = pa.weight / pa.mu_outer;
    let mut total = 0.0;
    for _ in 0..100_000 {
        total += p[pb.int] * pb.weight / (net.mu[pb.int] * pb.mu_outer);
        if p.iter().sum::<f64>() < tail {
            break;
        }
        p = step(dom, &p);
    }
    total
}

/// Green's function value G(v; u) for interior network indices:
/// sum over t of [M^t e_v](u) / mu_u.
pub fn green_series(dom: &DiscreteDomain, v: usize, u: usize, tail: f64) -> f64 {
    let net = dom.network();
    let mut p = vec![0.0; net.interior_count()];
    p[v] = 1.0;
    let mut total = 0.0;
    for _ in 0..100_000 {
        total += p[u] / net.mu[u];
        if p.iter().sum::<f64>() < tail {
            break;
        }
        p = step(dom, &p);
    }
    total
}

/// Z between an interior vertex (network index) and a boundary edge.
pub fn z_interior_boundary_series(dom: &DiscreteDomain, u: usize, b: usize, tail: f64) -> f64 {
    let net = dom.network();
    let pb = net.bd[b];
    let mut p = vec![0.0; net.interior_count()];
    p[u] = 1.0;
    let mut total = 0.0;
    for _ in 0..100_000 {
        total += p[pb.int] * pb.weight / (net.mu[pb.int] * pb.mu_outer);
        if p.iter().sum::<f64>() < tail {
            break;
        }
        p = step(dom, &p);
    }
    total
}
