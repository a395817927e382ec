//! Joint spans and orthogonal projections, in floating point and exactly.

use num_traits::Zero;

use crate::rational::Q;
use crate::{Error, Result};

/// Relative rank tolerance used by [`joint_span`] when none is given.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_columns<T>(rows: &[Vec<T>], n: usize) -> Result<()> {
    match rows.iter().find(|r| r.len() != n) {
        Some(r) => Err(Error::DimensionMismatch {
            expected: n,
            got: r.len(),
        }),
        None => Ok(()),
    }
}

/// Orthonormal basis of `span(rows of w, rows of w_star)`.
///
/// Modified Gram-Schmidt with pivoting on the largest remaining residual; a
/// direction is kept while its residual norm is at least `tol` times the
/// largest input norm.
pub fn joint_span(w: &[Vec<f64>], w_star: &[Vec<f64>], tol: Option<f64>) -> Result<Vec<Vec<f64>>> {
    let n = w
        .first()
        .or(w_star.first())
        .map_or(0, Vec::len);
    check_columns(w, n)?;
    check_columns(w_star, n)?;
    let tol = tol.unwrap_or(DEFAULT_RANK_TOL);
    let mut residual: Vec<Vec<f64>> = w.iter().chain(w_star).cloned().collect();
    let scale = residual.iter().map(|r| norm(r)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if scale == 0.0 {
        return Ok(basis);
    }
    while !residual.is_empty() {
        let (pivot, size) = residual
            .iter()
            .enumerate()
            .map(|(i, r)| (i, norm(r)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if size < tol * scale {
            break;
        }
        let q: Vec<f64> = residual.swap_remove(pivot).iter().map(|x| x / size).collect();
        for r in &mut residual {
            let c = dot(r, &q);
            r.iter_mut().zip(&q).for_each(|(x, y)| *x -= c * y);
        }
        basis.push(q);
    }
    Ok(basis)
}

/// `P_A x` for an orthonormal basis of `A`.
pub fn project(x: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for b in basis {
        let c = dot(x, b);
        out.iter_mut().zip(b).for_each(|(o, y)| *o += c * y);
    }
    out
}

fn qdot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthogonal (unnormalized) rational basis of the span of `vectors`, by
/// exact Gram-Schmidt; dependent vectors are dropped.
pub fn exact_orthogonal_basis(vectors: &[Vec<Q>]) -> Result<Vec<Vec<Q>>> {
    let n = vectors.first().map_or(0, Vec::len);
    check_columns(vectors, n)?;
    let mut basis: Vec<(Vec<Q>, Q)> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for (b, bb) in &basis {
            let c = qdot(&r, b) / bb;
            r.iter_mut().zip(b).for_each(|(x, y)| *x -= &c * y);
        }
        let rr = qdot(&r, &r);
        if !rr.is_zero() {
            basis.push((r, rr));
        }
    }
    Ok(basis.into_iter().map(|(b, _)| b).collect())
}

/// Exact `P_A x` for an orthogonal (not necessarily normalized) basis.
pub fn project_exact(x: &[Q], basis: &[Vec<Q>]) -> Vec<Q> {
    let mut out = vec![Q::zero(); x.len()];
    for b in basis {
        let c = qdot(x, b) / qdot(b, b);
        out.iter_mut().zip(b).for_each(|(o, y)| *o += &c * y);
    }
    out
}

/// Rank by exact Gaussian elimination.
pub fn exact_rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            row.iter_mut().zip(&pivot).for_each(|(x, y)| *x -= &f * y);
        }
        rank += 1;
    }
    rank
}

pub fn to_f64_matrix(m: &[Vec<Q>]) -> Vec<Vec<f64>> {
    m.iter()
        .map(|r| r.iter().map(crate::rational::to_f64).collect())
        .collect()
}
