//! Brute-force oracles for small instances, independent of the Fourier
//! pipeline: the classical two-part partition from the affine dependence of
//! `d+2` points, and an exhaustive partition search with convex-hull
//! intersection tested by LP feasibility.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::geometry::GeomError;

/// Relative cutoff below which a dependence coefficient counts as zero.
const DEPENDENCE_ZERO_REL: f64 = 1e-9;

/// Singular values below this (relative to the largest) count as rank drops.
const RANK_TOLERANCE_REL: f64 = 1e-10;

/// Two disjoint index sets whose convex hulls share the witness point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadonPartition {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
    pub witness: Vec<f64>,
    /// The affine dependence coefficients (sum zero, weighted point sum zero).
    pub dependence: Vec<f64>,
}

/// A `q`-part partition with a common point of all hulls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TverbergPartition {
    pub parts: Vec<Vec<usize>>,
    pub witness: Vec<f64>,
}

/// Exact two-part partition of `d+2` points in `R^d`.
///
/// Solves the affine dependence `Σ α_i·p_i = 0`, `Σ α_i = 0`, splits indices
/// by the sign of `α`, and returns the common hull point
/// `Σ_{α_i>0} (α_i/A)·p_i`. Points with a vanishing coefficient belong to
/// neither part. Inputs whose dependence space has dimension two or more are
/// reported as degenerate.
pub fn radon_oracle(points: &[Vec<f64>]) -> Result<RadonPartition, GeomError> {
    if points.is_empty() {
        return Err(GeomError::DimensionMismatch("no points given".into()));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(GeomError::DimensionMismatch("points have mixed dimensions".into()));
    }
    if points.len() != d + 2 {
        return Err(GeomError::DimensionMismatch(format!(
            "need exactly d+2 = {} points in R^{d}, got {}",
            d + 2,
            points.len()
        )));
    }

    // rows: the d coordinates plus the all-ones row, padded square with a
    // zero row so the decomposition exposes the full right-singular basis
    let m = points.len();
    let a = DMatrix::from_fn(m, m, |row, col| {
        if row < d {
            points[col][row]
        } else if row == d {
            1.0
        } else {
            0.0
        }
    });
    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let singular = &svd.singular_values; // sorted descending
    let sigma_max = singular[0].max(f64::MIN_POSITIVE);
    // the padding guarantees one ~zero singular value (the dependence); a
    // second one means the dependence space has dimension >= 2
    if singular[singular.len() - 2] < RANK_TOLERANCE_REL * sigma_max {
        return Err(GeomError::Degenerate(
            "affine dependence is not unique (rank-deficient input)".into(),
        ));
    }
    let alpha: Vec<f64> = v_t.row(v_t.nrows() - 1).iter().cloned().collect();

    let scale = alpha.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let cut = DEPENDENCE_ZERO_REL * scale;
    let positive: Vec<usize> =
        (0..m).filter(|&i| alpha[i] > cut).collect();
    let negative: Vec<usize> =
        (0..m).filter(|&i| alpha[i] < -cut).collect();
    if positive.is_empty() || negative.is_empty() {
        return Err(GeomError::Degenerate("dependence coefficients do not change sign".into()));
    }

    let total: f64 = positive.iter().map(|&i| alpha[i]).sum();
    let mut witness = vec![0.0; d];
    for &i in &positive {
        for c in 0..d {
            witness[c] += alpha[i] / total * points[i][c];
        }
    }
    Ok(RadonPartition { positive, negative, witness, dependence: alpha })
}

/// Exhaustive partition search: assigns all points into `q` nonempty groups
/// and tests each assignment's hulls for a common point by LP feasibility.
/// Intended for `points.len() <= 12` and `q <= 3`; requires at least
/// `(q−1)(d+1)+1` points.
pub fn tverberg_oracle_affine(
    points: &[Vec<f64>],
    q: usize,
) -> Result<Option<TverbergPartition>, GeomError> {
    if points.is_empty() || q < 2 {
        return Err(GeomError::OracleLimits("need points and q >= 2".into()));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(GeomError::DimensionMismatch("points have mixed dimensions".into()));
    }
    let m = points.len();
    if m > 12 || q > 3 {
        return Err(GeomError::OracleLimits(format!(
            "exhaustive search limited to 12 points and q <= 3 (got {m} points, q = {q})"
        )));
    }
    if m < (q - 1) * (d + 1) + 1 {
        return Err(GeomError::OracleLimits(format!(
            "need at least (q-1)(d+1)+1 = {} points, got {m}",
            (q - 1) * (d + 1) + 1
        )));
    }

    // point 0 pinned to part 0: partitions, not labeled assignments
    let total = (q as u64).pow((m - 1) as u32);
    let mut labels = vec![0usize; m];
    for code in 0..total {
        let mut c = code;
        for slot in 1..m {
            labels[slot] = (c % q as u64) as usize;
            c /= q as u64;
        }
        let mut parts = vec![Vec::new(); q];
        for (i, &l) in labels.iter().enumerate() {
            parts[l].push(i);
        }
        if parts.iter().any(|p| p.is_empty()) {
            continue;
        }
        if let Some(witness) = hulls_intersect(points, &parts) {
            return Ok(Some(TverbergPartition { parts, witness }));
        }
    }
    Ok(None)
}

/// Feasibility of `∩_t conv{points[i] : i ∈ parts[t]} ≠ ∅`; returns a common
/// point if one exists.
pub fn hulls_intersect(points: &[Vec<f64>], parts: &[Vec<usize>]) -> Option<Vec<f64>> {
    let d = points[0].len();
    let q = parts.len();
    let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
    let nvars: usize = sizes.iter().sum();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0usize, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();

    // rows: one convexity row per part, then d rows per part beyond the first
    let nrows = q + d * (q - 1);
    let mut a = vec![vec![0.0f64; nvars]; nrows];
    let mut b = vec![0.0f64; nrows];
    for t in 0..q {
        for (j, _) in parts[t].iter().enumerate() {
            a[t][offsets[t] + j] = 1.0;
        }
        b[t] = 1.0;
    }
    for t in 1..q {
        for c in 0..d {
            let row = q + (t - 1) * d + c;
            for (j, &i) in parts[0].iter().enumerate() {
                a[row][offsets[0] + j] = points[i][c];
            }
            for (j, &i) in parts[t].iter().enumerate() {
                a[row][offsets[t] + j] = -points[i][c];
            }
        }
    }

    let mu = lp_feasible(&a, &b)?;
    let mut witness = vec![0.0; d];
    for (j, &i) in parts[0].iter().enumerate() {
        for c in 0..d {
            witness[c] += mu[offsets[0] + j] * points[i][c];
        }
    }
    Some(witness)
}

const LP_EPS: f64 = 1e-9;

/// Phase-1 simplex for `A·x = b, x >= 0`: minimizes the artificial-variable
/// sum with Bland's rule; `Some(x)` iff the optimum reaches zero. Dense
/// tableau, fine for the toy sizes the oracles need.
fn lp_feasible(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = a.len();
    let n = a[0].len();

    // tableau columns: n structural + m artificial + rhs
    let cols = n + m + 1;
    let mut t = vec![vec![0.0f64; cols]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][cols - 1] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // objective row: sum of artificial rows (minimize artificial total)
    let mut obj = vec![0.0f64; cols];
    for i in 0..m {
        for j in 0..cols {
            obj[j] += t[i][j];
        }
    }

    let max_pivots = 200 * (m + n);
    for _ in 0..max_pivots {
        // Bland: smallest improving column among structural + artificial
        let Some(pivot_col) = (0..n + m).find(|&j| obj[j] > LP_EPS && !basis.contains(&j)) else {
            break;
        };
        // ratio test, Bland ties by row basis index
        let mut pivot_row: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][pivot_col] > LP_EPS {
                let ratio = t[i][cols - 1] / t[i][pivot_col];
                if ratio < best - LP_EPS
                    || (ratio < best + LP_EPS
                        && pivot_row.is_some_and(|r| basis[i] < basis[r]))
                {
                    best = ratio;
                    pivot_row = Some(i);
                }
            }
        }
        let row = pivot_row?;
        // pivot
        let pv = t[row][pivot_col];
        for j in 0..cols {
            t[row][j] /= pv;
        }
        for i in 0..m {
            if i != row && t[i][pivot_col].abs() > 0.0 {
                let f = t[i][pivot_col];
                for j in 0..cols {
                    t[i][j] -= f * t[row][j];
                }
            }
        }
        let f = obj[pivot_col];
        for j in 0..cols {
            obj[j] -= f * t[row][j];
        }
        basis[row] = pivot_col;
    }

    let artificial_total: f64 = (0..m)
        .filter(|&i| basis[i] >= n)
        .map(|i| t[i][cols - 1])
        .sum();
    if artificial_total > 1e-8 {
        return None;
    }
    let mut x = vec![0.0f64; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][cols - 1].max(0.0);
        }
    }
    Some(x)
}
