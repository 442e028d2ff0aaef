//! Dense complex linear algebra helpers for small unitary matrices.
//!
//! Everything here works on `DMatrix<Complex<f64>>`. Matrices in this crate
//! are tiny (n ≤ 12 or so), so plain dense algorithms are used throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const DEFAULT_TOL: f64 = 1e-9;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Entrywise max-modulus norm.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Entrywise max-modulus distance.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// ‖U†U − 1‖_max.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &identity(n))
}

pub fn check_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    let defect = unitarity_defect(u);
    if defect > tol {
        return Err(Error::NonUnitary { defect, tol });
    }
    Ok(())
}

pub fn determinant(u: &CMatrix) -> C64 {
    u.clone().determinant()
}

pub fn inverse(u: &CMatrix) -> Result<CMatrix> {
    u.clone().try_inverse().ok_or(Error::EigenFailure)
}

/// Multiply a column by a unit phase so its largest-modulus entry is real
/// positive. Makes eigenvector frames reproducible across runs.
fn fix_column_phase(col: &mut CVector) {
    let mut best = 0usize;
    let mut best_norm = -1.0;
    for (i, z) in col.iter().enumerate() {
        let r = z.norm();
        if r > best_norm + 1e-300 {
            best_norm = r;
            best = i;
        }
    }
    let z = col[best];
    if z.norm() > 0.0 {
        let phase = z / z.norm();
        let correction = phase.conj();
        for entry in col.iter_mut() {
            *entry *= correction;
        }
    }
}

/// Angles used to form Hermitian combinations cos(t)·H + sin(t)·K of a
/// unitary U = H + iK. A combination separates the eigenvalues e^{iθ_j}
/// unless t ≡ (θ_i + θ_j)/2 (mod π) for some pair, so a short list of
/// incommensurate angles always contains a working one.
const TRIAL_ANGLES: [f64; 6] = [0.0, 0.618_033_988_749_895, 2.399_963_229_728_653, 1.0, 1.7, 2.9];

/// Eigendecomposition of a (numerically) unitary matrix.
///
/// Returns eigenvalues sorted by argument in [0, 2π) and a unitary matrix of
/// matching eigenvector columns with deterministic column phases, so that
/// `U V ≈ V diag(λ)`.
pub fn unitary_eigen(u: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    let n = u.nrows();
    if n == 0 || u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.ncols(),
        });
    }
    let mut v = eigenframe(u, 0)?;
    for k in 0..n {
        let mut col = v.column(k).clone_owned();
        fix_column_phase(&mut col);
        v.set_column(k, &col);
    }
    let d = v.adjoint() * u * &v;
    let mut pairs: Vec<(C64, usize)> = (0..n).map(|k| (d[(k, k)], k)).collect();
    pairs.sort_by(|a, b| {
        arg_in_two_pi(a.0)
            .partial_cmp(&arg_in_two_pi(b.0))
            .unwrap()
            .then(a.1.cmp(&b.1))
    });
    let mut sorted = CMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (out, (lambda, k)) in pairs.into_iter().enumerate() {
        eigenvalues.push(lambda);
        sorted.set_column(out, &v.column(k).clone_owned());
    }
    Ok((eigenvalues, sorted))
}

/// Argument mapped into [0, 2π).
pub fn arg_in_two_pi(z: C64) -> f64 {
    let a = z.arg().rem_euclid(2.0 * std::f64::consts::PI);
    if a >= 2.0 * std::f64::consts::PI {
        0.0
    } else {
        a
    }
}

/// Unitary frame diagonalizing `u`, found by diagonalizing a Hermitian
/// combination of u and u† and refining any eigenvalue clusters the chosen
/// angle failed to separate.
fn eigenframe(u: &CMatrix, depth: usize) -> Result<CMatrix> {
    let n = u.nrows();
    if n == 1 {
        return Ok(identity(1));
    }
    if depth >= TRIAL_ANGLES.len() {
        return Err(Error::EigenFailure);
    }
    let t = TRIAL_ANGLES[depth];
    let h = (u + u.adjoint()).scale(0.5);
    let k = (u - u.adjoint()) * C64::new(0.0, -0.5);
    let m = h.scale(t.cos()) + k.scale(t.sin());
    let q = m.symmetric_eigen().eigenvectors;
    let d = q.adjoint() * u * &q;

    // Columns i, j still mixed by u belong to one unresolved cluster.
    let off_tol = 1e-11 * (1.0 + max_abs(u));
    let mut component = vec![usize::MAX; n];
    let mut n_components = 0usize;
    for i in 0..n {
        if component[i] != usize::MAX {
            continue;
        }
        let id = n_components;
        n_components += 1;
        let mut stack = vec![i];
        component[i] = id;
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if component[b] == usize::MAX
                    && (d[(a, b)].norm() > off_tol || d[(b, a)].norm() > off_tol)
                {
                    component[b] = id;
                    stack.push(b);
                }
            }
        }
    }
    if n_components == n {
        return Ok(q);
    }
    if n_components == 1 && depth + 1 >= TRIAL_ANGLES.len() {
        return Err(Error::EigenFailure);
    }

    let mut refined = q.clone();
    for id in 0..n_components {
        let idx: Vec<usize> = (0..n).filter(|&i| component[i] == id).collect();
        if idx.len() < 2 {
            continue;
        }
        let mut sub = CMatrix::zeros(idx.len(), idx.len());
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                sub[(a, b)] = d[(ia, ib)];
            }
        }
        let vsub = eigenframe(&sub, depth + 1)?;
        // refined[:, idx] = q[:, idx] * vsub
        let mut block = CMatrix::zeros(n, idx.len());
        for (b, &ib) in idx.iter().enumerate() {
            block.set_column(b, &q.column(ib).clone_owned());
        }
        let block = block * vsub;
        for (b, &ib) in idx.iter().enumerate() {
            refined.set_column(ib, &block.column(b).clone_owned());
        }
    }
    Ok(refined)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[C64]) -> CMatrix {
        let n = entries.len();
        CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) })
    }

    #[test]
    fn eigen_of_diagonal_unitary() {
        let phases = [0.3, 1.1, 2.9, 5.0];
        let u = diag(&phases.map(|t| C64::from_polar(1.0, t)));
        let (vals, vecs) = unitary_eigen(&u).unwrap();
        assert!(unitarity_defect(&vecs) < 1e-12);
        let mut args: Vec<f64> = vals.iter().map(|z| arg_in_two_pi(*z)).collect();
        let sorted = args.clone();
        args.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(args, sorted, "eigenvalues must come out sorted by argument");
        let residual = max_abs_diff(&(&u * &vecs), &(&vecs * diag(&vals)));
        assert!(residual < 1e-12, "residual {residual}");
    }

    #[test]
    fn eigen_handles_degenerate_spectrum() {
        // identity has a fully degenerate spectrum
        let u = identity(5);
        let (vals, vecs) = unitary_eigen(&u).unwrap();
        for v in vals {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        assert!(unitarity_defect(&vecs) < 1e-12);
    }

    #[test]
    fn eigen_separates_reflection_symmetric_spectrum() {
        // θ and -θ have equal real parts; the t = 0 combination alone cannot
        // split them, exercising the angle retry path after conjugation.
        let u0 = diag(&[
            C64::from_polar(1.0, 0.9),
            C64::from_polar(1.0, -0.9),
            C64::from_polar(1.0, 2.2),
        ]);
        // conjugate by a fixed unitary so the matrix is dense
        let g = {
            let a = CMatrix::from_row_slice(
                3,
                3,
                &[
                    C64::new(1.0, 0.2),
                    C64::new(0.3, -0.4),
                    C64::new(0.1, 0.0),
                    C64::new(-0.2, 0.5),
                    C64::new(0.9, 0.1),
                    C64::new(0.0, 0.7),
                    C64::new(0.4, 0.0),
                    C64::new(0.1, 0.3),
                    C64::new(1.1, -0.2),
                ],
            );
            let qr = a.qr();
            qr.q()
        };
        let u = &g * u0 * g.adjoint();
        let (vals, vecs) = unitary_eigen(&u).unwrap();
        let residual = max_abs_diff(&(&u * &vecs), &(&vecs * diag(&vals)));
        assert!(residual < 1e-10, "residual {residual}");
    }
}
