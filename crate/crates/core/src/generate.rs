//! Deterministic generators for the test corpus of rough domains.
//!
//! Every family carves its interior out of a unit grid patch (optionally
//! jittered) that extends two Chebyshev rings beyond the interior, so that
//! boundary vertices carry their full lattice mass and boundary edges are
//! flanked by inner faces on both sides.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::domain::{DiscreteDomain, DomainError};
use crate::graph::{EmbeddedGraph, GraphError, Point};
use crate::montecarlo::rng_stream;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum Family {
    Plus,
    Rect { m: u32, n: u32 },
    SquareSym { k: u32 },
    Fjord { width: u32, length: u32, mouth: u32 },
    Bottleneck { width: u32 },
    PerturbedGrid { m: u32, n: u32, amplitude: f64, weight_jitter: f64 },
    Spiral { turns: u32, width: u32 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Plus => "plus",
            Family::Rect { .. } => "rect",
            Family::SquareSym { .. } => "square_sym",
            Family::Fjord { .. } => "fjord",
            Family::Bottleneck { .. } => "bottleneck",
            Family::PerturbedGrid { .. } => "perturbed_grid",
            Family::Spiral { .. } => "spiral",
        }
    }

    /// Builds a family from a name and `key=value` parameters.
    pub fn from_params(name: &str, params: &BTreeMap<alloc::string::String, f64>) -> Result<Family, GenerateError> {
        let int = |key: &str| -> Result<u32, GenerateError> {
            params
                .get(key)
                .map(|&v| v as u32)
                .ok_or(GenerateError::BadParams("missing parameter"))
        };
        let float = |key: &str| -> Result<f64, GenerateError> {
            params
                .get(key)
                .copied()
                .ok_or(GenerateError::BadParams("missing parameter"))
        };
        Ok(match name {
            "plus" => Family::Plus,
            "rect" => Family::Rect { m: int("m")?, n: int("n")? },
            "square_sym" => Family::SquareSym { k: int("k")? },
            "fjord" => Family::Fjord {
                width: int("width")?,
                length: int("length")?,
                mouth: params.get("mouth").map(|&v| v as u32).unwrap_or(int("width")?),
            },
            "bottleneck" => Family::Bottleneck { width: int("width")? },
            "perturbed_grid" => Family::PerturbedGrid {
                m: int("m")?,
                n: int("n")?,
                amplitude: float("amplitude")?,
                weight_jitter: float("weight_jitter")?,
            },
            "spiral" => Family::Spiral {
                turns: int("turns")?,
                width: int("width")?,
            },
            _ => return Err(GenerateError::BadParams("unknown family")),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GenerateError {
    BadParams(&'static str),
    Graph(GraphError),
    Domain(DomainError),
    PerturbationSpoilsEmbedding,
    NotSimplyConnected,
}

impl fmt::Display for GenerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenerateError::BadParams(msg) => write!(f, "bad parameters: {msg}"),
            GenerateError::Graph(e) => write!(f, "graph construction failed: {e}"),
            GenerateError::Domain(e) => write!(f, "domain construction failed: {e}"),
            GenerateError::PerturbationSpoilsEmbedding => {
                write!(f, "perturbation violates the flat-angle assumption")
            }
            GenerateError::NotSimplyConnected => write!(f, "generated interior is not simply connected"),
        }
    }
}

impl core::error::Error for GenerateError {}

impl From<GraphError> for GenerateError {
    fn from(e: GraphError) -> Self {
        GenerateError::Graph(e)
    }
}

impl From<DomainError> for GenerateError {
    fn from(e: DomainError) -> Self {
        GenerateError::Domain(e)
    }
}

fn interior_cells(family: &Family) -> Result<BTreeSet<(i64, i64)>, GenerateError> {
    let mut cells = BTreeSet::new();
    match *family {
        Family::Plus => {
            cells.insert((0, 0));
        }
        Family::Rect { m, n } | Family::PerturbedGrid { m, n, .. } => {
            if m == 0 || n == 0 {
                return Err(GenerateError::BadParams("rect sides must be positive"));
            }
            for x in 0..m as i64 {
                for y in 0..n as i64 {
                    cells.insert((x, y));
                }
            }
        }
        Family::SquareSym { k } => {
            if k == 0 {
                return Err(GenerateError::BadParams("square side must be positive"));
            }
            for x in 0..k as i64 {
                for y in 0..k as i64 {
                    cells.insert((x, y));
                }
            }
        }
        Family::Fjord { width, length, mouth } => {
            if width == 0 || length == 0 || mouth == 0 {
                return Err(GenerateError::BadParams("fjord parameters must be positive"));
            }
            let (w, l, m) = (width as i64, length as i64, mouth as i64);
            let b = 9i64.max(m + 4).max(w + 4);
            for x in 0..b {
                for y in 0..b {
                    cells.insert((x, y));
                }
            }
            let c0 = (b - w) / 2;
            if m == w {
                // Corridor attached flush to the base.
                for x in b..b + l {
                    for y in c0..c0 + w {
                        cells.insert((x, y));
                    }
                }
            } else {
                // Wall column with a mouth opening, then the corridor.
                let m0 = (b - m) / 2;
                for y in m0..m0 + m {
                    cells.insert((b, y));
                }
                for x in b + 1..b + 1 + l {
                    for y in c0..c0 + w {
                        cells.insert((x, y));
                    }
                }
            }
        }
        Family::Bottleneck { width } => {
            if width == 0 || width > 5 {
                return Err(GenerateError::BadParams("bottleneck width must be in 1..=5"));
            }
            let w = width as i64;
            for x in 0..7 {
                for y in 0..7 {
                    cells.insert((x, y));
                    cells.insert((x + 12, y));
                }
            }
            let c0 = (7 - w) / 2;
            for x in 7..12 {
                for y in c0..c0 + w {
                    cells.insert((x, y));
                }
            }
        }
        Family::Spiral { turns, width } => {
            if turns == 0 || width == 0 {
                return Err(GenerateError::BadParams("spiral parameters must be positive"));
            }
            let w = width as i64;
            let p = w + 1;
            let dirs = [(1i64, 0i64), (0, 1), (-1, 0), (0, -1)];
            let mut cur = (0i64, 0i64);
            let mut len = 2 * p;
            for k in 0..4 * turns as usize {
                let d = dirs[k % 4];
                let perp = (-d.1, d.0);
                for t in 0..len {
                    for s in 0..w {
                        cells.insert((cur.0 + d.0 * t + perp.0 * s, cur.1 + d.1 * t + perp.1 * s));
                    }
                }
                cur = (cur.0 + d.0 * (len - 1), cur.1 + d.1 * (len - 1));
                if k % 2 == 1 {
                    len += p;
                }
            }
        }
    }
    Ok(cells)
}

/// Generates a validated simply connected domain, deterministic in
/// (family, seed).
pub fn generate(family: &Family, seed: u64) -> Result<DiscreteDomain, GenerateError> {
    let cells = interior_cells(family)?;

    // Vertex set: the plus sits on the diamond patch |x|+|y| <= 2; the other
    // families take a two-ring Chebyshev collar around the interior.
    let mut vset: BTreeSet<(i64, i64)> = BTreeSet::new();
    match family {
        Family::Plus => {
            for x in -2i64..=2 {
                for y in -2i64..=2 {
                    if x.abs() + y.abs() <= 2 {
                        vset.insert((x, y));
                    }
                }
            }
        }
        _ => {
            for &(x, y) in &cells {
                for dx in -2i64..=2 {
                    for dy in -2i64..=2 {
                        vset.insert((x + dx, y + dy));
                    }
                }
            }
        }
    }

    let index: BTreeMap<(i64, i64), usize> = vset.iter().copied().zip(0..).collect();
    let mut positions: Vec<Point> = vset
        .iter()
        .map(|&(x, y)| Point::new(x as f64, y as f64))
        .collect();
    let mut edge_list: Vec<(usize, usize, f64)> = Vec::new();
    for (&(x, y), &i) in &index {
        if let Some(&j) = index.get(&(x + 1, y)) {
            edge_list.push((i, j, 1.0));
        }
        if let Some(&j) = index.get(&(x, y + 1)) {
            edge_list.push((i, j, 1.0));
        }
    }

    if let Family::PerturbedGrid { amplitude, weight_jitter, .. } = *family {
        if !(0.0..=0.5).contains(&amplitude) || !(0.0..1.0).contains(&weight_jitter) {
            return Err(GenerateError::BadParams("jitter amplitudes out of range"));
        }
        // Clamp so that adjacent vertices cannot meet or edges cross.
        let a = amplitude.min(0.25);
        let mut rng = rng_stream(seed, 0, 0x67656e); // purpose tag: generator
        for p in positions.iter_mut() {
            p.x += rng.gen_range(-a..=a);
            p.y += rng.gen_range(-a..=a);
        }
        for e in edge_list.iter_mut() {
            e.2 = 1.0 + rng.gen_range(-weight_jitter..=weight_jitter);
        }
    }

    let graph = Arc::new(EmbeddedGraph::build(positions, edge_list)?);
    if matches!(family, Family::PerturbedGrid { .. }) {
        let report = graph.validate();
        if !report.satisfied_b {
            return Err(GenerateError::PerturbationSpoilsEmbedding);
        }
    }

    let interior: Vec<usize> = cells.iter().map(|c| index[c]).collect();
    let dom = DiscreteDomain::new(graph, &interior)?;
    if !dom.is_simply_connected() {
        return Err(GenerateError::NotSimplyConnected);
    }
    Ok(dom)
}
