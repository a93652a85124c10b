//! Symmetric positive-definite solves for conductance systems.
//!
//! The primary path is a profile (skyline) LDL^T factorization under a
//! reverse Cuthill-McKee ordering. Conductance Laplacians are Stieltjes
//! matrices, so the factorization and the substitutions only combine
//! same-signed quantities for nonnegative data; small solution entries (deep
//! fjords) keep their relative accuracy instead of drowning in the residual
//! scale of an iterative method. A dense LDL^T in natural order serves as the
//! reference solver for cross-checks.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub enum SolveError {
    NotPositiveDefinite { pivot: usize },
    Empty,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::NotPositiveDefinite { pivot } => {
                write!(f, "non-positive pivot at row {pivot}")
            }
            SolveError::Empty => write!(f, "empty system"),
        }
    }
}

impl core::error::Error for SolveError {}

/// Sparse symmetric system: diagonal plus off-diagonal entries (both halves).
#[derive(Clone, Debug)]
pub struct SpdSystem {
    pub n: usize,
    pub diag: Vec<f64>,
    entries: Vec<(usize, usize, f64)>,
    rowptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl SpdSystem {
    pub fn new(n: usize) -> Self {
        SpdSystem {
            n,
            diag: vec![0.0; n],
            entries: Vec::new(),
            rowptr: Vec::new(),
            col: Vec::new(),
            val: Vec::new(),
        }
    }

    /// Records a symmetric off-diagonal pair (u,v) and (v,u).
    pub fn push_offdiag(&mut self, u: usize, v: usize, w: f64) {
        self.entries.push((u, v, w));
    }

    /// Builds the CSR adjacency once all entries are recorded.
    pub fn finish(&mut self) {
        let mut counts = vec![0usize; self.n + 1];
        for &(u, v, _) in &self.entries {
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        for i in 0..self.n {
            counts[i + 1] += counts[i];
        }
        self.rowptr = counts.clone();
        self.col = vec![0; self.entries.len() * 2];
        self.val = vec![0.0; self.entries.len() * 2];
        let mut cursor = counts;
        for &(u, v, w) in &self.entries {
            self.col[cursor[u]] = v;
            self.val[cursor[u]] = w;
            cursor[u] += 1;
            self.col[cursor[v]] = u;
            self.val[cursor[v]] = w;
            cursor[v] += 1;
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.rowptr[i]..self.rowptr[i + 1]).map(move |k| (self.col[k], self.val[k]))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = self.diag[i] * x[i];
            for (j, w) in self.row(i) {
                acc += w * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Relative residual ||Ax - b|| / ||b|| (zero when b = 0).
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.matvec(x);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.n {
            num += (ax[i] - b[i]) * (ax[i] - b[i]);
            den += b[i] * b[i];
        }
        if den == 0.0 {
            return if num == 0.0 { 0.0 } else { f64::INFINITY };
        }
        math::sqrt(num / den)
    }
}

/// Reverse Cuthill-McKee ordering; returns perm with perm[new] = old.
fn rcm_order(sys: &SpdSystem) -> Vec<usize> {
    let n = sys.n;
    let degree: Vec<usize> = (0..n).map(|i| sys.rowptr[i + 1] - sys.rowptr[i]).collect();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_unstable_by_key(|&i| (degree[i], i));
    for &s in &starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = sys.row(v).map(|(j, _)| j).filter(|&j| !seen[j]).collect();
            nbrs.sort_unstable_by_key(|&j| (degree[j], j));
            for j in nbrs {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    order.reverse();
    order
}

/// Profile LDL^T factorization of an SPD system.
pub struct Factor {
    n: usize,
    /// perm[new] = old
    perm: Vec<usize>,
    first: Vec<usize>,
    rowstart: Vec<usize>,
    lval: Vec<f64>,
    d: Vec<f64>,
}

impl Factor {
    pub fn new(sys: &SpdSystem) -> Result<Factor, SolveError> {
        if sys.n == 0 {
            return Err(SolveError::Empty);
        }
        let n = sys.n;
        let perm = rcm_order(sys);
        let mut iperm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let old = perm[i];
            for (j_old, _) in sys.row(old) {
                let j = iperm[j_old];
                if j < i {
                    first[i] = first[i].min(j);
                }
            }
        }
        let mut rowstart = vec![0usize; n + 1];
        for i in 0..n {
            rowstart[i + 1] = rowstart[i] + (i - first[i]);
        }
        let mut lval = vec![0.0; rowstart[n]];
        let mut d = vec![0.0; n];
        for i in 0..n {
            d[i] = sys.diag[perm[i]];
        }
        for i in 0..n {
            let old = perm[i];
            for (j_old, w) in sys.row(old) {
                let j = iperm[j_old];
                if j < i {
                    lval[rowstart[i] + (j - first[i])] += w;
                }
            }
        }

        // In-place profile LDL^T.
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut sum = 0.0;
                let ri = rowstart[i] + (k0 - fi);
                let rj = rowstart[j] + (k0 - fj);
                for k in 0..(j - k0) {
                    sum += lval[ri + k] * d[k0 + k] * lval[rj + k];
                }
                let idx = rowstart[i] + (j - fi);
                lval[idx] = (lval[idx] - sum) / d[j];
            }
            let mut sum = 0.0;
            for j in fi..i {
                let l = lval[rowstart[i] + (j - fi)];
                sum += l * l * d[j];
            }
            d[i] -= sum;
            if !(d[i] > 0.0) || !d[i].is_finite() {
                return Err(SolveError::NotPositiveDefinite { pivot: i });
            }
        }

        Ok(Factor {
            n,
            perm,
            first,
            rowstart,
            lval,
            d,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = b[self.perm[i]];
        }
        for i in 0..n {
            let fi = self.first[i];
            let mut acc = y[i];
            let r = self.rowstart[i];
            for j in fi..i {
                acc -= self.lval[r + (j - fi)] * y[j];
            }
            y[i] = acc;
        }
        for i in 0..n {
            y[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let r = self.rowstart[i];
            let yi = y[i];
            for j in fi..i {
                y[j] -= self.lval[r + (j - fi)] * yi;
            }
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }
}

/// Dense LDL^T in natural order; reference route for small systems.
pub fn dense_solve(sys: &SpdSystem, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = sys.n;
    if n == 0 {
        return Err(SolveError::Empty);
    }
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = sys.diag[i];
        for (j, w) in sys.row(i) {
            a[i * n + j] += w;
        }
    }
    let mut d = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= a[i * n + k] * d[k] * a[j * n + k];
            }
            a[i * n + j] = sum / d[j];
        }
        let mut sum = a[i * n + i];
        for k in 0..i {
            sum -= a[i * n + k] * a[i * n + k] * d[k];
        }
        d[i] = sum;
        if !(d[i] > 0.0) || !d[i].is_finite() {
            return Err(SolveError::NotPositiveDefinite { pivot: i });
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for j in 0..i {
            y[i] = y[i] - a[i * n + j] * y[j];
        }
    }
    for i in 0..n {
        y[i] /= d[i];
    }
    for i in (0..n).rev() {
        for j in 0..i {
            y[j] -= a[i * n + j] * y[i];
        }
    }
    Ok(y)
}
