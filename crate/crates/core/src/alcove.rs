//! Coordinates on SU(n) conjugacy classes.
//!
//! The Weyl alcove 𝒜 = {ξ ∈ ℝⁿ : ξ_k ≥ 0, ξ₁ + ⋯ + ξ_n = π} parametrizes
//! conjugacy classes through the diagonal representative
//!
//! ```text
//! δ(ξ) = diag(δ₁, …, δ_n),   δ₁ = exp((2i/n) Σ_j j ξ_j),   δ_{k+1} = e^{2iξ_k} δ_k.
//! ```
//!
//! The spectral map Ξ inverts this parametrization on conjugacy classes:
//! Ξ(δ(ξ)) = ξ and Ξ(η g η⁻¹) = Ξ(g).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMatrix, DEFAULT_TOL};

/// A point of the Weyl alcove: ξ ∈ ℝⁿ with ξ_k ≥ 0 and Σ ξ_k = π.
#[derive(Debug, Clone, PartialEq)]
pub struct AlcovePoint {
    xi: Vec<f64>,
}

impl AlcovePoint {
    /// Validates nonnegativity (within `tol`) and the Σξ = π constraint.
    /// Components in [-tol, 0) are clamped to exactly 0.
    pub fn with_tol(xi: Vec<f64>, tol: f64) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InvalidAlcovePoint {
                reason: "empty coordinate vector".into(),
            });
        }
        let mut xi = xi;
        for x in xi.iter_mut() {
            if *x < 0.0 {
                if *x < -tol {
                    return Err(Error::InvalidAlcovePoint {
                        reason: format!("negative component {x}"),
                    });
                }
                *x = 0.0;
            }
        }
        let sum: f64 = xi.iter().sum();
        if (sum - PI).abs() > tol.max(1e-12 * xi.len() as f64) {
            return Err(Error::InvalidAlcovePoint {
                reason: format!("components sum to {sum}, expected pi"),
            });
        }
        Ok(Self { xi })
    }

    pub fn new(xi: Vec<f64>) -> Result<Self> {
        Self::with_tol(xi, DEFAULT_TOL)
    }

    /// The barycenter ξ* = (π/n, …, π/n).
    pub fn barycenter(n: usize) -> Self {
        Self {
            xi: vec![PI / n as f64; n],
        }
    }

    pub fn n(&self) -> usize {
        self.xi.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.xi
    }

    /// ξ_k with 1-based, cyclically extended index (ξ_{k+n} = ξ_k).
    pub fn coord_cyclic(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        self.xi[(k - 1) % self.xi.len()]
    }

    /// All components strictly positive, i.e. ξ lies in the open alcove and
    /// δ(ξ) is a regular matrix.
    pub fn regular(&self) -> bool {
        self.xi.iter().all(|&x| x > 0.0)
    }

    /// Cyclic shift σ(ξ)_k = ξ_{k+1}, the action of the center of SU(n).
    pub fn sigma(&self) -> Self {
        let n = self.xi.len();
        let mut xi = Vec::with_capacity(n);
        for k in 0..n {
            xi.push(self.xi[(k + 1) % n]);
        }
        Self { xi }
    }

    /// Partial reflection ν(ξ)_k = ξ_{n-k} for k < n, ν(ξ)_n = ξ_n.
    pub fn nu(&self) -> Self {
        let n = self.xi.len();
        let mut xi = Vec::with_capacity(n);
        for k in 1..n {
            xi.push(self.xi[n - k - 1]);
        }
        xi.push(self.xi[n - 1]);
        Self { xi }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.xi
            .iter()
            .zip(other.xi.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// An n×n complex matrix contractually in SU(n): unitary with determinant 1,
/// both within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialUnitary {
    m: CMatrix,
}

impl SpecialUnitary {
    pub fn with_tol(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        linalg::check_unitary(&m, tol)?;
        let det = linalg::determinant(&m);
        let defect = (det - C64::new(1.0, 0.0)).norm();
        if defect > tol {
            return Err(Error::NonUnitDeterminant { defect });
        }
        Ok(Self { m })
    }

    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tol(m, DEFAULT_TOL)
    }

    /// Wraps without checking the invariants. For matrices that are SU(n) by
    /// construction (diagonal phases summing to zero, products of members).
    pub fn new_unchecked(m: CMatrix) -> Self {
        Self { m }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: linalg::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }
}

/// Diagonal representative δ(ξ) of the conjugacy class labelled by ξ.
pub fn delta(xi: &AlcovePoint) -> SpecialUnitary {
    let n = xi.n();
    let coords = xi.coords();
    let arg1: f64 = (2.0 / n as f64)
        * coords
            .iter()
            .enumerate()
            .map(|(j, x)| (j + 1) as f64 * x)
            .sum::<f64>();
    let mut phases = Vec::with_capacity(n);
    let mut arg = arg1;
    phases.push(arg);
    for k in 0..n - 1 {
        arg += 2.0 * coords[k];
        phases.push(arg);
    }
    let m = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(1.0, phases[i])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    SpecialUnitary::new_unchecked(m)
}

/// Eigenvalue-angle gaps below this splitting are treated as exact ties; the
/// spectral map then returns a boundary alcove point with zero components.
pub const DEGENERACY_GAP: f64 = 1e-12;

/// The spectral map Ξ: the unique ξ ∈ 𝒜 with U conjugate to δ(ξ).
///
/// The eigenvalue arguments are sorted into [0, 2π); out of the n cyclic
/// starting positions, the one whose reconstructed δ₁ matches the starting
/// eigenvalue is selected (the δ₁ formula pins the start uniquely).
pub fn spectral_xi(u: &SpecialUnitary) -> Result<AlcovePoint> {
    spectral_xi_with_tol(u, DEFAULT_TOL)
}

pub fn spectral_xi_with_tol(u: &SpecialUnitary, tol: f64) -> Result<AlcovePoint> {
    linalg::check_unitary(u.matrix(), tol)?;
    let (eigenvalues, _) = linalg::unitary_eigen(u.matrix())?;
    spectral_xi_from_eigenvalues(&eigenvalues)
}

pub(crate) fn spectral_xi_from_eigenvalues(eigenvalues: &[C64]) -> Result<AlcovePoint> {
    spectral_data_from_eigenvalues(eigenvalues).map(|d| d.xi)
}

/// Alcove coordinates plus the accepted cyclic start into the arg-sorted
/// eigenvalue list: position k of δ(ξ) corresponds to sorted eigenvalue
/// (start + k) mod n.
pub(crate) struct SpectralData {
    pub xi: AlcovePoint,
    pub start: usize,
}

pub(crate) fn spectral_data_from_eigenvalues(eigenvalues: &[C64]) -> Result<SpectralData> {
    let n = eigenvalues.len();
    let mut args: Vec<f64> = eigenvalues
        .iter()
        .map(|z| linalg::arg_in_two_pi(*z))
        .collect();
    args.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Cyclic gaps; the wrap-around gap closes the circle to 2π.
    let mut gaps = Vec::with_capacity(n);
    for i in 0..n {
        let g = if i + 1 < n {
            args[i + 1] - args[i]
        } else {
            args[0] + 2.0 * PI - args[n - 1]
        };
        gaps.push(g.max(0.0));
    }
    // Snap ties to exact zeros and renormalize the survivors to keep Σ = 2π.
    let mut live_sum = 0.0;
    for g in gaps.iter_mut() {
        if *g < DEGENERACY_GAP {
            *g = 0.0;
        } else {
            live_sum += *g;
        }
    }
    if live_sum > 0.0 {
        let scale = 2.0 * PI / live_sum;
        for g in gaps.iter_mut() {
            *g *= scale;
        }
    } else {
        // fully degenerate spectrum: a single eigenvalue of multiplicity n
        gaps[n - 1] = 2.0 * PI;
    }

    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    for start in 0..n {
        // δ_k runs through the sorted eigenvalues beginning at `start`;
        // ξ_k is half the gap between consecutive ones.
        let xi: Vec<f64> = (0..n).map(|k| gaps[(start + k) % n] / 2.0).collect();
        let arg1 = (2.0 / n as f64)
            * xi.iter()
                .enumerate()
                .map(|(j, x)| (j + 1) as f64 * x)
                .sum::<f64>();
        let predicted = C64::from_polar(1.0, arg1);
        let actual = C64::from_polar(1.0, args[start]);
        let mismatch = (predicted - actual).norm();
        if best.as_ref().map_or(true, |(m, _, _)| mismatch < *m) {
            best = Some((mismatch, xi, start));
        }
    }
    let (mismatch, xi, start) = best.expect("n >= 1");
    if mismatch > 1e-6 {
        // No cyclic start reproduces δ₁: the input was not close enough to
        // SU(n) for the alcove coordinates to be meaningful.
        return Err(Error::NonUnitDeterminant { defect: mismatch });
    }
    Ok(SpectralData {
        xi: AlcovePoint::with_tol(xi, 1e-9)?,
        start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn delta_n2_quarter_points() {
        let xi = AlcovePoint::new(vec![PI / 2.0, PI / 2.0]).unwrap();
        let d = delta(&xi);
        let m = d.matrix();
        assert!((m[(0, 0)] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((m[(1, 1)] - C64::new(0.0, 1.0)).norm() < 1e-14);
        // ratio δ₂/δ₁ = e^{2iξ₁} = e^{iπ} = -1
        let ratio = m[(1, 1)] / m[(0, 0)];
        assert!((ratio - C64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn delta_last_corner_is_identity() {
        for n in 2..=6 {
            let mut xi = vec![0.0; n];
            xi[n - 1] = PI;
            let d = delta(&AlcovePoint::new(xi).unwrap());
            assert!(
                linalg::max_abs_diff(d.matrix(), &linalg::identity(n)) < 1e-13,
                "n = {n}"
            );
        }
    }

    #[test]
    fn delta_has_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=8 {
            for _ in 0..20 {
                let xi = sampling::alcove_point(n, &mut rng);
                let det = linalg::determinant(delta(&xi).matrix());
                assert!((det - C64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_xi_inverts_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 2..=8 {
            for _ in 0..50 {
                let xi = sampling::alcove_point(n, &mut rng);
                let back = spectral_xi(&delta(&xi)).unwrap();
                assert!(back.max_abs_diff(&xi) < 1e-10, "n = {n}");
            }
        }
    }

    #[test]
    fn spectral_xi_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..=6 {
            for _ in 0..25 {
                let xi = sampling::alcove_point(n, &mut rng);
                let v = sampling::unitary(n, &mut rng);
                let conj = &v * delta(&xi).matrix() * v.adjoint();
                let back = spectral_xi(&SpecialUnitary::new(conj).unwrap()).unwrap();
                assert!(back.max_abs_diff(&xi) < 1e-9, "n = {n}");
            }
        }
    }

    #[test]
    fn spectral_xi_of_identity_is_last_corner() {
        for n in 2..=6 {
            let xi = spectral_xi(&SpecialUnitary::identity(n)).unwrap();
            let mut expected = vec![0.0; n];
            expected[n - 1] = PI;
            assert!(xi.max_abs_diff(&AlcovePoint::new(expected).unwrap()) < 1e-12);
            assert!(!xi.regular());
        }
    }

    #[test]
    fn sigma_cycles_and_fixes_barycenter() {
        let xi = AlcovePoint::new(vec![0.1, 0.2, 0.3, PI - 0.6]).unwrap();
        let mut cur = xi.clone();
        for _ in 0..4 {
            cur = cur.sigma();
        }
        assert!(cur.max_abs_diff(&xi) == 0.0);
        let shifted = xi.sigma();
        assert_close(shifted.coords()[0], 0.2, 0.0);
        assert_close(shifted.coords()[3], 0.1, 0.0);

        let star = AlcovePoint::barycenter(5);
        assert!(star.sigma().max_abs_diff(&star) == 0.0);
    }

    #[test]
    fn nu_is_an_involution_fixing_last_component() {
        let xi = AlcovePoint::new(vec![0.1, 0.2, 0.3, PI - 0.6]).unwrap();
        let v = xi.nu();
        assert_eq!(v.coords(), &[0.3, 0.2, 0.1, PI - 0.6]);
        assert!(v.nu().max_abs_diff(&xi) == 0.0);
        let star = AlcovePoint::barycenter(4);
        assert!(star.nu().max_abs_diff(&star) == 0.0);
    }

    #[test]
    fn delta_of_sigma_matches_central_twist() {
        // eigenvalue multiset of δ(σξ) equals that of ζ·δ(ξ) for some n-th
        // root of unity ζ
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 2..=6usize {
            let xi = sampling::alcove_point(n, &mut rng);
            let shifted = delta(&xi.sigma());
            let base = delta(&xi);
            let mut best = f64::INFINITY;
            for m in 0..n {
                let zeta = C64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
                let twisted = base.matrix().scale(1.0) * zeta;
                let mut a: Vec<f64> = (0..n)
                    .map(|k| linalg::arg_in_two_pi(twisted[(k, k)]))
                    .collect();
                let mut b: Vec<f64> = (0..n)
                    .map(|k| linalg::arg_in_two_pi(shifted.matrix()[(k, k)]))
                    .collect();
                a.sort_by(|x, y| x.partial_cmp(y).unwrap());
                b.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let d = a
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| {
                        let mut d = (x - y).abs();
                        d = d.min((x - y + 2.0 * PI).abs());
                        d.min((x - y - 2.0 * PI).abs())
                    })
                    .fold(0.0, f64::max);
                best = best.min(d);
            }
            assert!(best < 1e-10, "n = {n}, best alignment {best}");
        }
    }
}
