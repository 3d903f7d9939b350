//! Full-spectrum oracle for small distance matrices.
//!
//! Cyclic Jacobi sweeps: repeatedly annihilate each off-diagonal entry with a
//! plane rotation until the off-diagonal Frobenius norm drops below
//! `1e-12 * ||D||_F`. Deliberately shares no code with the power iteration in
//! [`crate::spectral`]; the two provide independent routes to the dominant
//! eigenvalue.
#![allow(clippy::needless_range_loop)]

use crate::graph::DistanceMatrix;
use crate::spectral::SpectralError;

/// Largest order the dense sweep accepts.
pub const MAX_ORACLE_ORDER: usize = 64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a distance matrix, sorted in descending order.
pub fn oracle_spectrum(d: &DistanceMatrix) -> Result<Vec<f64>, SpectralError> {
    let n = d.order();
    if n > MAX_ORACLE_ORDER {
        return Err(SpectralError::OracleTooLarge {
            n,
            max: MAX_ORACLE_ORDER,
        });
    }
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| d.row(i).iter().map(|&v| v as f64).collect())
        .collect();
    let frob = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = 1e-12 * frob;

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
            eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
            return Ok(eigs);
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    Err(SpectralError::OracleNoConvergence { threshold })
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i][j] * a[i][j];
            }
        }
    }
    sum.sqrt()
}

/// One plane rotation zeroing `a[p][q]`.
fn rotate(a: &mut [Vec<f64>], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.len();
    for k in 0..n {
        let akp = a[k][p];
        let akq = a[k][q];
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p][k];
        let aqk = a[q][k];
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
}
