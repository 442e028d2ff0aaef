//! The matrix level: solving A B A⁻¹ B⁻¹ = μ₀(y) and the reduced dynamics.
//!
//! The constructive solution of the constraint goes through the positive
//! vector v(ξ,y) with v_ℓ² = z_ℓ(ξ,y), the real orthogonal frame g(v), and
//! the local Lax matrix
//!
//! ```text
//! ℒ(ξ,τ)_{jℓ} = (sin ny / sin y) · (e^{iy} − e^{-iy}) / (e^{iy} δ_j/δ_ℓ − e^{-iy})
//!               · v_j(ξ,y) v_ℓ(ξ,−y) ϱ(τ)_ℓ ,
//! ```
//!
//! which produce the on-shell cross-section pair
//! A = g(v)⁻¹ ℒ g(v), B = g(v)⁻¹ δ(ξ) g(v). Re tr ℒ is the generalized
//! Ruijsenaars-Schneider Hamiltonian.

use num_complex::Complex;

use crate::alcove::{self, AlcovePoint, SpecialUnitary, DEGENERACY_GAP};
use crate::coupling::{self, Coupling, CouplingValue};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMatrix};
use crate::zpolytope;

/// An element of 𝕋^{n-1}, stored as n−1 unit-modulus entries τ_k = e^{iθ_k}.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement {
    tau: Vec<C64>,
}

impl TorusElement {
    /// Validates |τ_k| = 1 within `1e-9` and renormalizes exactly.
    pub fn new(tau: Vec<C64>) -> Result<Self> {
        let mut tau = tau;
        for t in tau.iter_mut() {
            let r = t.norm();
            if (r - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidCoupling {
                    reason: format!("torus entry has modulus {r}"),
                });
            }
            *t /= r;
        }
        Ok(Self { tau })
    }

    pub fn from_angles(angles: &[f64]) -> Self {
        Self {
            tau: angles.iter().map(|&t| C64::from_polar(1.0, t)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            tau: vec![C64::new(1.0, 0.0); n - 1],
        }
    }

    /// n of the ambient SU(n).
    pub fn n(&self) -> usize {
        self.tau.len() + 1
    }

    pub fn tau(&self) -> &[C64] {
        &self.tau
    }

    pub fn angles(&self) -> Vec<f64> {
        self.tau.iter().map(|t| t.arg()).collect()
    }

    /// Componentwise product (the group law of 𝕋^{n-1}).
    pub fn mul(&self, other: &TorusElement) -> TorusElement {
        TorusElement {
            tau: self
                .tau
                .iter()
                .zip(other.tau.iter())
                .map(|(a, b)| a * b)
                .collect(),
        }
    }
}

/// A pair (A, B) ∈ SU(n) × SU(n).
#[derive(Debug, Clone)]
pub struct GroupPair {
    pub a: SpecialUnitary,
    pub b: SpecialUnitary,
}

impl GroupPair {
    pub fn new(a: SpecialUnitary, b: SpecialUnitary) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::DimensionMismatch {
                expected: a.n(),
                got: b.n(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// ‖A B A⁻¹ B⁻¹ − μ₀(y)‖_max.
    pub fn on_shell_residual(&self, c: &Coupling) -> f64 {
        let mu = moment(self);
        linalg::max_abs_diff(mu.matrix(), mu0(c).matrix())
    }
}

/// The moment map value μ₀(y) = diag(e^{2iy}, …, e^{2iy}, e^{-2(n-1)iy}).
pub fn mu0(c: &Coupling) -> SpecialUnitary {
    let n = c.n();
    let y = c.radians();
    let m = CMatrix::from_fn(n, n, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i < n - 1 {
            C64::from_polar(1.0, 2.0 * y)
        } else {
            C64::from_polar(1.0, -2.0 * (n as f64 - 1.0) * y)
        }
    });
    SpecialUnitary::new_unchecked(m)
}

/// The group-commutator moment map μ(A,B) = A B A⁻¹ B⁻¹.
pub fn moment(p: &GroupPair) -> SpecialUnitary {
    let a = p.a.matrix();
    let b = p.b.matrix();
    let a_inv = linalg::inverse(a).expect("unitary matrices are invertible");
    let b_inv = linalg::inverse(b).expect("unitary matrices are invertible");
    SpecialUnitary::new_unchecked(a * b * a_inv * b_inv)
}

const NEGATIVE_Z_TOL: f64 = 1e-9;

/// v(ξ,y) with components √(z_ℓ(ξ,y)); |z| ≤ tolerance is clamped to 0,
/// genuinely negative z is an error.
pub fn v_of_xi(xi: &AlcovePoint, c: &Coupling) -> Result<Vec<f64>> {
    if !coupling::is_regular(c) {
        return Err(Error::IrregularCoupling);
    }
    v_from_z(xi, c.radians())
}

fn v_from_z(xi: &AlcovePoint, y: f64) -> Result<Vec<f64>> {
    if !xi.regular() {
        return Err(Error::SingularAlcovePoint);
    }
    let z = zpolytope::z_values(xi.coords(), y)?;
    z.into_iter()
        .map(|v| {
            if v < -NEGATIVE_Z_TOL {
                Err(Error::NegativeZ { value: v })
            } else {
                Ok(v.max(0.0).sqrt())
            }
        })
        .collect()
}

/// The real orthogonal frame g(v) with last column v:
/// g_{jn} = −g_{nj} = v_j, g_{nn} = v_n, g_{jl} = δ_{jl} − v_j v_l/(1+v_n).
pub fn g_of_v(v: &[f64]) -> Result<SpecialUnitary> {
    let n = v.len();
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidAlcovePoint {
            reason: format!("frame vector has norm {norm}"),
        });
    }
    if v[n - 1] <= -1.0 + 1e-12 {
        return Err(Error::VnNearMinusOne);
    }
    let m = CMatrix::from_fn(n, n, |j, l| {
        let val = if j < n - 1 && l < n - 1 {
            (if j == l { 1.0 } else { 0.0 }) - v[j] * v[l] / (1.0 + v[n - 1])
        } else if l == n - 1 && j < n - 1 {
            v[j]
        } else if j == n - 1 && l < n - 1 {
            -v[l]
        } else {
            v[n - 1]
        };
        C64::new(val, 0.0)
    });
    Ok(SpecialUnitary::new_unchecked(m))
}

/// ϱ(τ) = diag(1/τ₁, τ₁/τ₂, …, τ_{n-2}/τ_{n-1}, τ_{n-1}); the boundary
/// convention τ₀ = τ_n = 1 makes the diagonal telescoping, so det ϱ = 1.
pub fn rho_of_tau(t: &TorusElement) -> SpecialUnitary {
    let n = t.n();
    let one = C64::new(1.0, 0.0);
    let tau = t.tau();
    let m = CMatrix::from_fn(n, n, |i, j| {
        if i != j {
            return C64::new(0.0, 0.0);
        }
        let num = if i >= 1 { tau[i - 1] } else { one };
        let den = if i <= n - 2 { tau[i] } else { one };
        num / den
    });
    SpecialUnitary::new_unchecked(m)
}

/// The local Lax matrix ℒ(ξ,τ) on 𝒜_y⁺ × 𝕋^{n-1}; SU(n)-valued.
pub fn local_lax(xi: &AlcovePoint, t: &TorusElement, c: &Coupling) -> Result<SpecialUnitary> {
    let n = c.n();
    if xi.n() != n || t.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xi.n(),
        });
    }
    if !coupling::is_regular(c) {
        return Err(Error::IrregularCoupling);
    }
    if !zpolytope::in_ay_plus(xi, c) {
        return Err(Error::OutsideDomain);
    }
    let y = c.radians();
    let v_plus = v_from_z(xi, y)?;
    let v_minus = v_from_z(xi, -y)?;
    let d = alcove::delta(xi);
    let rho = rho_of_tau(t);

    let prefactor = (n as f64 * y).sin() / y.sin();
    let two_i_sin_y = C64::from_polar(1.0, y) - C64::from_polar(1.0, -y);
    let eiy = C64::from_polar(1.0, y);
    let eiy_inv = C64::from_polar(1.0, -y);

    let m = CMatrix::from_fn(n, n, |j, l| {
        let ratio = d.matrix()[(j, j)] / d.matrix()[(l, l)];
        let denom = eiy * ratio - eiy_inv;
        Complex::new(prefactor, 0.0) * two_i_sin_y / denom
            * v_plus[j]
            * v_minus[l]
            * rho.matrix()[(l, l)]
    });
    Ok(SpecialUnitary::new_unchecked(m))
}

/// Z-floor below which the explicit cross-section formula is numerically
/// meaningless (denominators of the Lax matrix degenerate at ∂𝒜_y).
const RECONSTRUCT_Z_FLOOR: f64 = 1e-8;

/// The on-shell cross-section pair A = g⁻¹ ℒ g, B = g⁻¹ δ(ξ) g of the
/// constraint A B A⁻¹ B⁻¹ = μ₀(y), for (ξ,τ) ∈ 𝒜_y⁺ × 𝕋^{n-1}.
pub fn reconstruct(xi: &AlcovePoint, t: &TorusElement, c: &Coupling) -> Result<GroupPair> {
    if !zpolytope::in_ay_plus(xi, c) {
        return Err(Error::OutsideDomain);
    }
    let z = zpolytope::z_values(xi.coords(), c.radians())?;
    if z.iter().any(|&v| v < RECONSTRUCT_Z_FLOOR) {
        return Err(Error::OutsideDomain);
    }
    let lax = local_lax(xi, t, c)?;
    let v = v_from_z(xi, c.radians())?;
    let g = g_of_v(&v)?;
    let g = g.matrix();
    let d = alcove::delta(xi);
    // g is real orthogonal: g⁻¹ = gᵀ = g†
    let a = g.adjoint() * lax.matrix() * g;
    let b = g.adjoint() * d.matrix() * g;
    Ok(GroupPair {
        a: SpecialUnitary::new_unchecked(a),
        b: SpecialUnitary::new_unchecked(b),
    })
}

/// The generalized RS Hamiltonian
///
/// ```text
/// H(ξ,θ) = s Σ_j cos(θ_j − θ_{j-1}) Π_{k=j+1}^{j+n-1} |1 − sin²y / sin²(ξ_j + ⋯ + ξ_{k-1})|^{1/2}
/// ```
///
/// with s = sign(sin y / sin ny) and θ₀ = θ_n = 0; equals Re tr ℒ(ξ,τ).
pub fn hamiltonian(xi: &AlcovePoint, thetas: &[f64], c: &Coupling) -> Result<f64> {
    if !zpolytope::in_ay_plus(xi, c) {
        return Err(Error::OutsideDomain);
    }
    if thetas.len() != c.n() - 1 {
        return Err(Error::DimensionMismatch {
            expected: c.n() - 1,
            got: thetas.len(),
        });
    }
    Ok(rs_hamiltonian_raw(xi.coords(), thetas, c.radians()))
}

/// The bare formula without domain checks; `y` in radians. Used both by
/// [`hamiltonian`] and by the old/new comparison in the toric module.
pub(crate) fn rs_hamiltonian_raw(xi: &[f64], thetas: &[f64], y: f64) -> f64 {
    let n = xi.len();
    let s = (y.sin() / (n as f64 * y).sin()).signum();
    let theta = |k: usize| -> f64 {
        // θ₀ = θ_n = 0, 1-based k
        if k == 0 || k == n {
            0.0
        } else {
            thetas[k - 1]
        }
    };
    let sin_y_sq = y.sin() * y.sin();
    let mut total = 0.0;
    for j in 1..=n {
        let mut product = 1.0;
        let mut partial = 0.0;
        for k in j + 1..=j + n - 1 {
            partial += xi[(k - 2) % n]; // ξ_{k-1} cyclically, 1-based
            let sin_sq = partial.sin() * partial.sin();
            product *= (1.0 - sin_y_sq / sin_sq).abs();
        }
        total += (theta(j) - theta(j - 1)).cos() * product.sqrt();
    }
    s * total
}

/// The β-generated torus action on an on-shell pair:
/// [(A,B)] ↦ [(A g⁻¹ ϱ(τ') g, B)] with g B g⁻¹ = δ(ξ).
///
/// The diagonalizer is fixed by ordering eigenvalues to match δ(ξ) and making
/// each eigenvector's largest-modulus entry real positive, so repeated calls
/// compose exactly.
pub fn torus_act(t_prime: &TorusElement, p: &GroupPair, c: &Coupling) -> Result<GroupPair> {
    let n = p.n();
    if t_prime.n() != n || c.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: t_prime.n(),
        });
    }
    let (eigenvalues, frame) = linalg::unitary_eigen(p.b.matrix())?;

    // reject eigenvalue gaps below the degeneracy threshold
    let mut args: Vec<f64> = eigenvalues.iter().map(|z| linalg::arg_in_two_pi(*z)).collect();
    args.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for i in 0..n {
        let gap = if i + 1 < n {
            args[i + 1] - args[i]
        } else {
            args[0] + 2.0 * std::f64::consts::PI - args[n - 1]
        };
        if gap.abs() < DEGENERACY_GAP {
            return Err(Error::SingularB);
        }
    }

    let spectral = alcove::spectral_data_from_eigenvalues(&eigenvalues)?;
    // column k of w is the eigenvector for δ_{k+1}(ξ)
    let mut w = CMatrix::zeros(n, n);
    for k in 0..n {
        w.set_column(k, &frame.column((spectral.start + k) % n).clone_owned());
    }
    let rho = rho_of_tau(t_prime);
    let a_new = p.a.matrix() * &w * rho.matrix() * w.adjoint();
    Ok(GroupPair {
        a: SpecialUnitary::new_unchecked(a_new),
        b: p.b.clone(),
    })
}

/// The duality map S(A,B) = (B⁻¹, B A B⁻¹); preserves the constraint surface
/// and swaps the α and β images.
pub fn duality_s(p: &GroupPair) -> GroupPair {
    let a = p.a.matrix();
    let b = p.b.matrix();
    let b_inv = linalg::inverse(b).expect("unitary matrices are invertible");
    GroupPair {
        a: SpecialUnitary::new_unchecked(b_inv.clone()),
        b: SpecialUnitary::new_unchecked(b * a * b_inv),
    }
}

/// Discriminant Δ = Π_{i<j} (λ_i − λ_j)² of the characteristic polynomial;
/// vanishes exactly on the non-regular matrices.
pub fn discriminant(b: &SpecialUnitary) -> Result<C64> {
    let (eigenvalues, _) = linalg::unitary_eigen(b.matrix())?;
    let n = eigenvalues.len();
    let mut acc = C64::new(1.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let diff = eigenvalues[i] - eigenvalues[j];
            acc *= diff * diff;
        }
    }
    Ok(acc)
}

/// Gauge-invariant fingerprint (eigenvalue arguments of A and B, tr AB) used
/// to compare points of the reduced phase space.
pub fn fingerprint(p: &GroupPair) -> Result<Vec<f64>> {
    let (ea, _) = linalg::unitary_eigen(p.a.matrix())?;
    let (eb, _) = linalg::unitary_eigen(p.b.matrix())?;
    let mut out = Vec::with_capacity(2 * p.n() + 2);
    for z in ea.iter().chain(eb.iter()) {
        out.push(linalg::arg_in_two_pi(*z));
    }
    let tr_ab = (p.a.matrix() * p.b.matrix()).trace();
    out.push(tr_ab.re);
    out.push(tr_ab.im);
    Ok(out)
}

/// Max-abs distance between two fingerprints, with eigenvalue arguments
/// compared on the circle.
pub fn fingerprint_distance(a: &[f64], b: &[f64]) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = (x - y).abs();
            d.min((d - two_pi).abs())
        })
        .fold(0.0, f64::max)
}

/// True when the coupling is irregular precisely because μ₀(y) is scalar
/// (e^{2iny} = 1 makes the two diagonal values coincide).
pub fn mu0_is_scalar(c: &Coupling) -> bool {
    match c.value() {
        CouplingValue::Exact(r) => (c.n() as i64 * *r.numer()) % *r.denom() == 0,
        CouplingValue::Float(y) => {
            let angle = (2.0 * c.n() as f64 * y).rem_euclid(2.0 * std::f64::consts::PI);
            angle.min(2.0 * std::f64::consts::PI - angle) < 1e-12
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::{Rng, RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn coupling(n: usize, r: i64, s: i64) -> Coupling {
        Coupling::exact(n, r, s).unwrap()
    }

    #[test]
    fn mu0_n2_and_determinant() {
        let c = coupling(2, 3, 10);
        let y = c.radians();
        let m = mu0(&c);
        assert!((m.matrix()[(0, 0)] - C64::from_polar(1.0, 2.0 * y)).norm() < 1e-15);
        assert!((m.matrix()[(1, 1)] - C64::from_polar(1.0, -2.0 * y)).norm() < 1e-15);
        for (n, r, s) in [(3usize, 3i64, 10i64), (4, 2, 5), (5, 9, 20)] {
            let det = linalg::determinant(mu0(&coupling(n, r, s)).matrix());
            assert!((det - C64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn mu0_scalar_iff_y_is_multiple_of_pi_over_n() {
        let c = coupling(4, 1, 4);
        assert!(mu0_is_scalar(&c));
        assert!(!coupling::is_regular(&c));
        let m = mu0(&c);
        let first = m.matrix()[(0, 0)];
        assert!((m.matrix()[(3, 3)] - first).norm() < 1e-13);

        assert!(!mu0_is_scalar(&coupling(4, 2, 5)));
    }

    #[test]
    fn moment_of_commuting_pair_is_identity() {
        let xi = AlcovePoint::barycenter(4);
        let d = alcove::delta(&xi);
        let p = GroupPair::new(d.clone(), d).unwrap();
        let m = moment(&p);
        assert!(linalg::max_abs_diff(m.matrix(), &linalg::identity(4)) < 1e-13);
    }

    #[test]
    fn moment_is_conjugation_equivariant_and_s_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 4;
        // Haar unitaries are not special; correct the determinant phase
        let fix_det = |m: CMatrix| {
            let det = linalg::determinant(&m);
            let phase = det.powf(-1.0 / n as f64);
            SpecialUnitary::new_unchecked(m * phase)
        };
        let a = fix_det(sampling::unitary(n, &mut rng));
        let b = fix_det(sampling::unitary(n, &mut rng));
        let p = GroupPair::new(a.clone(), b.clone()).unwrap();

        let s = duality_s(&p);
        assert!(
            linalg::max_abs_diff(moment(&p).matrix(), moment(&s).matrix()) < 1e-12
        );

        let eta = sampling::unitary(n, &mut rng);
        let conj = GroupPair::new(
            SpecialUnitary::new_unchecked(&eta * a.matrix() * eta.adjoint()),
            SpecialUnitary::new_unchecked(&eta * b.matrix() * eta.adjoint()),
        )
        .unwrap();
        let expected = &eta * moment(&p).matrix() * eta.adjoint();
        assert!(linalg::max_abs_diff(moment(&conj).matrix(), &expected) < 1e-12);
    }

    #[test]
    fn g_of_v_examples() {
        // v = e_n gives the identity
        let mut v = vec![0.0; 5];
        v[4] = 1.0;
        let g = g_of_v(&v).unwrap();
        assert!(linalg::max_abs_diff(g.matrix(), &linalg::identity(5)) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = 2 + (rng.next_u32() % 5) as usize;
            let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.3).collect();
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in v.iter_mut() {
                *x /= norm;
            }
            if v[n - 1] <= -1.0 + 1e-6 {
                continue;
            }
            let g = g_of_v(&v).unwrap();
            assert!(linalg::unitarity_defect(g.matrix()) < 1e-12);
            // last column is v
            for j in 0..n {
                assert!((g.matrix()[(j, n - 1)] - C64::new(v[j], 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn g_of_v_rejects_antipode() {
        let v = vec![0.0, 0.0, -1.0];
        assert_eq!(g_of_v(&v), Err(Error::VnNearMinusOne));
    }

    #[test]
    fn rho_examples() {
        let n = 4;
        let t = TorusElement::identity(n);
        assert!(
            linalg::max_abs_diff(rho_of_tau(&t).matrix(), &linalg::identity(n)) < 1e-15
        );

        // n = 3, τ = (i, −1): ϱ = diag(−i, −i, −1), det 1
        let t = TorusElement::new(vec![C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]).unwrap();
        let r = rho_of_tau(&t);
        assert!((r.matrix()[(0, 0)] - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((r.matrix()[(1, 1)] - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((r.matrix()[(2, 2)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((linalg::determinant(r.matrix()) - C64::new(1.0, 0.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=7 {
            let t = sampling::torus_element(n, &mut rng);
            let det = linalg::determinant(rho_of_tau(&t).matrix());
            assert!((det - C64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    /// the four coupling regimes exercised throughout
    const REGIMES: [(usize, i64, i64); 4] = [(3, 3, 10), (3, 9, 20), (4, 2, 5), (5, 29, 100)];

    #[test]
    fn local_lax_is_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, r, s) in REGIMES {
            let c = coupling(n, r, s);
            for _ in 0..50 {
                let xi = sampling::ay_plus_point(n, &c, &mut rng).unwrap();
                let t = sampling::torus_element(n, &mut rng);
                let l = local_lax(&xi, &t, &c).unwrap();
                assert!(linalg::unitarity_defect(l.matrix()) < 1e-9, "n={n} y={r}/{s}");
                let det = linalg::determinant(l.matrix());
                assert!((det - C64::new(1.0, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn local_lax_satisfies_exchange_relation() {
        // ℒ δ ℒ⁻¹ = μ_v δ with μ_v = e^{2iy} + (e^{2i(1-n)y} − e^{2iy}) v v†
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (n, r, s) in REGIMES {
            let c = coupling(n, r, s);
            let y = c.radians();
            for _ in 0..20 {
                let xi = sampling::ay_plus_point(n, &c, &mut rng).unwrap();
                let t = sampling::torus_element(n, &mut rng);
                let l = local_lax(&xi, &t, &c).unwrap();
                let d = alcove::delta(&xi);
                let v = v_of_xi(&xi, &c).unwrap();

                let e2y = C64::from_polar(1.0, 2.0 * y);
                let e2y1n = C64::from_polar(1.0, 2.0 * (1.0 - n as f64) * y);
                let mut mu_v = linalg::identity(n) * e2y;
                for j in 0..n {
                    for k in 0..n {
                        mu_v[(j, k)] += (e2y1n - e2y) * v[j] * v[k];
                    }
                }
                let lhs = l.matrix() * d.matrix();
                let rhs = mu_v * d.matrix() * l.matrix();
                assert!(
                    linalg::max_abs_diff(&lhs, &rhs) < 1e-9,
                    "n={n} y={r}/{s}"
                );
            }
        }
    }

    #[test]
    fn lax_trace_equals_hamiltonian() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (n, r, s) in REGIMES {
            let c = coupling(n, r, s);
            for _ in 0..50 {
                let xi = sampling::ay_plus_point(n, &c, &mut rng).unwrap();
                let t = sampling::torus_element(n, &mut rng);
                let l = local_lax(&xi, &t, &c).unwrap();
                let h = hamiltonian(&xi, &t.angles(), &c).unwrap();
                assert!(
                    (l.matrix().trace().re - h).abs() < 1e-9,
                    "n={n} y={r}/{s}"
                );
            }
        }
    }

    #[test]
    fn hamiltonian_factor_signs_by_regime() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        // standard regime: all factors nonnegative, s = +1
        let c = coupling(4, 1, 5);
        let y = c.radians();
        assert!(y.sin() / (4.0 * y).sin() > 0.0);
        for _ in 0..100 {
            let xi = sampling::ay_plus_point(4, &c, &mut rng).unwrap();
            for j in 0..4usize {
                let mut partial = 0.0;
                for k in 1..4usize {
                    partial += xi.coords()[(j + k - 1) % 4];
                    assert!(1.0 - (y.sin() / partial.sin()).powi(2) >= 0.0);
                }
            }
        }
        // new regime π/n < y < π/(n-1): exactly two negative factors per j,
        // and s = −1
        let c = coupling(3, 9, 20);
        let y = c.radians();
        assert!(y.sin() / (3.0 * y).sin() < 0.0);
        for _ in 0..100 {
            let xi = sampling::ay_plus_point(3, &c, &mut rng).unwrap();
            for j in 0..3usize {
                let mut negatives = 0;
                let mut partial = 0.0;
                for k in 1..3usize {
                    partial += xi.coords()[(j + k - 1) % 3];
                    if 1.0 - (y.sin() / partial.sin()).powi(2) < 0.0 {
                        negatives += 1;
                    }
                }
                assert_eq!(negatives, 2);
            }
        }
    }

    #[test]
    fn reconstruct_is_on_shell_in_all_regimes() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (n, r, s) in REGIMES {
            let c = coupling(n, r, s);
            for _ in 0..25 {
                let xi = sampling::ay_plus_point(n, &c, &mut rng).unwrap();
                let t = sampling::torus_element(n, &mut rng);
                let p = match reconstruct(&xi, &t, &c) {
                    Ok(p) => p,
                    Err(Error::OutsideDomain) => continue, // z-floor refusal
                    Err(e) => panic!("{e}"),
                };
                assert!(p.on_shell_residual(&c) < 1e-9, "n={n} y={r}/{s}");
                // β(A,B) = ξ
                let beta = alcove::spectral_xi(&p.b).unwrap();
                assert!(beta.max_abs_diff(&xi) < 1e-9);
                // α image lies in the closed 𝒜_y
                let alpha = alcove::spectral_xi(&p.a).unwrap();
                let poly = zpolytope::ay_polytope(&c).unwrap();
                assert!(
                    poly.contains_closed(alpha.coords(), 1e-8),
                    "n={n} y={r}/{s} α={alpha:?}"
                );
            }
        }
    }

    #[test]
    fn reconstruct_rejects_outside_domain() {
        // standard regime needs ξ_k > y everywhere; push ξ₁ below the wall
        let c = coupling(4, 1, 5);
        let y = c.radians();
        let rest = (PI - 0.5 * y - 1.5 * y) / 2.0;
        let bad = AlcovePoint::new(vec![0.5 * y, 1.5 * y, rest, rest]).unwrap();
        let t = TorusElement::identity(4);
        assert!(matches!(reconstruct(&bad, &t, &c), Err(Error::OutsideDomain)));
    }

    #[test]
    fn torus_action_fixes_b_and_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for (n, r, s) in REGIMES {
            let c = coupling(n, r, s);
            let xi = sampling::ay_plus_point(n, &c, &mut rng).unwrap();
            let t = sampling::torus_element(n, &mut rng);
            let p = reconstruct(&xi, &t, &c).unwrap();

            // identity torus element acts trivially
            let same = torus_act(&TorusElement::identity(n), &p, &c).unwrap();
            assert!(linalg::max_abs_diff(same.a.matrix(), p.a.matrix()) < 1e-12);

            let t1 = sampling::torus_element(n, &mut rng);
            let t2 = sampling::torus_element(n, &mut rng);
            let step = torus_act(&t2, &torus_act(&t1, &p, &c).unwrap(), &c).unwrap();
            let joint = torus_act(&t1.mul(&t2), &p, &c).unwrap();
            assert!(
                linalg::max_abs_diff(step.a.matrix(), joint.a.matrix()) < 1e-9,
                "n={n}"
            );
            // B is returned bitwise unchanged
            assert_eq!(step.b.matrix(), p.b.matrix());
            assert!(step.on_shell_residual(&c) < 1e-9);
        }
    }

    #[test]
    fn torus_action_rejects_degenerate_b() {
        let c = coupling(3, 3, 10);
        let p = GroupPair::new(SpecialUnitary::identity(3), SpecialUnitary::identity(3)).unwrap();
        assert!(matches!(
            torus_act(&TorusElement::identity(3), &p, &c),
            Err(Error::SingularB)
        ));
    }

    #[test]
    fn duality_examples() {
        let p = GroupPair::new(SpecialUnitary::identity(3), SpecialUnitary::identity(3)).unwrap();
        let s = duality_s(&p);
        assert!(linalg::max_abs_diff(s.a.matrix(), &linalg::identity(3)) < 1e-15);
        assert!(linalg::max_abs_diff(s.b.matrix(), &linalg::identity(3)) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let c = coupling(3, 9, 20);
        let xi = sampling::ay_plus_point(3, &c, &mut rng).unwrap();
        let t = sampling::torus_element(3, &mut rng);
        let mut p = reconstruct(&xi, &t, &c).unwrap();
        // α = β∘S and the residual is preserved under S, S², S³, S⁴
        for _ in 0..4 {
            let alpha = alcove::spectral_xi(&p.a).unwrap();
            let next = duality_s(&p);
            assert!(next.on_shell_residual(&c) < 1e-9);
            let beta_next = alcove::spectral_xi(&next.b).unwrap();
            assert!(alpha.max_abs_diff(&beta_next) < 1e-9);
            p = next;
        }
    }

    #[test]
    fn discriminant_examples() {
        let id = SpecialUnitary::identity(4);
        assert!(discriminant(&id).unwrap().norm() < 1e-20);

        let xi = AlcovePoint::barycenter(5);
        let d = alcove::delta(&xi);
        assert!(discriminant(&d).unwrap().norm() > 1e-3);

        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let c = coupling(4, 2, 5);
        for _ in 0..20 {
            let xi = sampling::ay_plus_point(4, &c, &mut rng).unwrap();
            let t = sampling::torus_element(4, &mut rng);
            if let Ok(p) = reconstruct(&xi, &t, &c) {
                assert!(discriminant(&p.b).unwrap().norm() > 1e-6);
            }
        }
    }

    #[test]
    fn v_of_xi_is_unit_and_hits_corners() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let c = coupling(3, 9, 20);
        for _ in 0..100 {
            let xi = sampling::ay_plus_point(3, &c, &mut rng).unwrap();
            let v = v_of_xi(&xi, &c).unwrap();
            let norm: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-9);
        }
        // at the p = 1 simplex vertex ξ(j), v = e_j
        let y = c.radians();
        let mut coords = vec![y; 3];
        coords[1] = PI - 2.0 * y;
        let vertex = AlcovePoint::new(coords).unwrap();
        let v = v_of_xi(&vertex, &c).unwrap();
        assert!((v[1] - 1.0).abs() < 1e-9);
        assert!(v[0].abs() < 1e-6 && v[2].abs() < 1e-6);
    }
}
