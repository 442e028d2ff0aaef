//! The CP^{n-1} toric model of the new type (i) systems with p = 1, i.e.
//! π/n < y < π/(n-1).
//!
//! Realizing CP^{n-1} as the U(1)-reduction of ℂⁿ at χ(u) = Σ|u_k|² = χ₀ =
//! λ(ny − π), the dense chart where no homogeneous coordinate vanishes is
//! parametrized by
//!
//! ```text
//! ℰ(ξ,τ) = [√λ (τ̄₁ √(y−ξ₁), …, τ̄_{n-1} √(y−ξ_{n-1}), √(y−ξ_n))],
//! ```
//!
//! the toric moment map is 𝒥_k([u]) = −|u_k|² + λy, and the global Lax
//! matrix is the Δ(τ)-conjugate of the local one, Δ(τ) = diag(τ₁,…,τ_{n-1},1).

use std::f64::consts::PI;

use crate::alcove::AlcovePoint;
use crate::coupling::{Coupling, CouplingValue};
use crate::double::{self, TorusElement};
use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix};
use crate::zpolytope;

use num_rational::Rational64;

/// A point of CP^{n-1} as an equivalence class [u] under global phase, held
/// by the canonical representative: ‖u‖² = χ₀ and the last nonzero
/// coordinate real positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    u: Vec<C64>,
}

impl ProjectivePoint {
    /// Validates ‖u‖² = χ₀ = λ(ny − π) within `1e-9`·χ₀ and canonicalizes.
    pub fn new(u: Vec<C64>, lambda: f64, c: &Coupling) -> Result<Self> {
        let chi0 = chi_0(lambda, c)?;
        let norm_sq: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - chi0).abs() > 1e-9 * chi0.max(1.0) {
            return Err(Error::InvalidAlcovePoint {
                reason: format!("|u|² = {norm_sq}, expected χ₀ = {chi0}"),
            });
        }
        let mut pt = Self { u };
        pt.canonicalize();
        Ok(pt)
    }

    /// Scales an arbitrary nonzero homogeneous vector onto the χ₀ sphere and
    /// canonicalizes.
    pub fn from_homogeneous(u: Vec<C64>, lambda: f64, c: &Coupling) -> Result<Self> {
        let chi0 = chi_0(lambda, c)?;
        let norm_sq: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidAlcovePoint {
                reason: "zero homogeneous vector".into(),
            });
        }
        let scale = (chi0 / norm_sq).sqrt();
        let mut pt = Self {
            u: u.into_iter().map(|z| z * scale).collect(),
        };
        pt.canonicalize();
        Ok(pt)
    }

    fn canonicalize(&mut self) {
        let anchor = self
            .u
            .iter()
            .rposition(|z| z.norm() > 1e-13);
        if let Some(k) = anchor {
            let z = self.u[k];
            let phase = (z / z.norm()).conj();
            for entry in self.u.iter_mut() {
                *entry *= phase;
            }
            // the anchor is now exactly real
            self.u[k] = C64::new(self.u[k].re.abs(), 0.0);
        }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn coordinates(&self) -> &[C64] {
        &self.u
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.u
            .iter()
            .zip(other.u.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// χ₀ = λ(ny − π); requires λ > 0 and the p = 1 window π/n < y < π/(n-1).
fn chi_0(lambda: f64, c: &Coupling) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::InvalidCoupling {
            reason: format!("lambda = {lambda} must be positive"),
        });
    }
    if !in_new_p1_window(c) {
        return Err(Error::InvalidCoupling {
            reason: "the toric model needs π/n < y < π/(n-1)".into(),
        });
    }
    Ok(lambda * (c.n() as f64 * c.radians() - PI))
}

/// Strict membership of y in the window (π/n, π/(n-1)); exact when possible.
pub fn in_new_p1_window(c: &Coupling) -> bool {
    let n = c.n() as i64;
    if n < 3 {
        return false;
    }
    match c.value() {
        CouplingValue::Exact(y) => {
            Rational64::new(1, n) < y && y < Rational64::new(1, n - 1)
        }
        CouplingValue::Float(y) => {
            let t = y / PI;
            1.0 / (n as f64) < t && t < 1.0 / (n as f64 - 1.0)
        }
    }
}

/// The chart parametrization ℰ(ξ,τ), defined on the closed simplex
/// {ξ_k ≤ y}; coordinates vanish where ξ_k = y.
pub fn embed_e(
    xi: &AlcovePoint,
    t: &TorusElement,
    lambda: f64,
    c: &Coupling,
) -> Result<ProjectivePoint> {
    let n = c.n();
    if xi.n() != n || t.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xi.n(),
        });
    }
    let _ = chi_0(lambda, c)?;
    let y = c.radians();
    let sqrt_lambda = lambda.sqrt();
    let mut u = Vec::with_capacity(n);
    for (k, &x) in xi.coords().iter().enumerate() {
        if x > y + 1e-12 {
            return Err(Error::OutsideChart);
        }
        let radial = sqrt_lambda * (y - x).max(0.0).sqrt();
        let phase = if k + 1 < n {
            t.tau()[k].conj()
        } else {
            C64::new(1.0, 0.0)
        };
        u.push(phase * radial);
    }
    let mut pt = ProjectivePoint { u };
    pt.canonicalize();
    Ok(pt)
}

/// The toric moment map 𝒥_k([u]) = −|u_k|² + λy, all n components.
pub fn moment_j(pt: &ProjectivePoint, lambda: f64, c: &Coupling) -> Result<Vec<f64>> {
    let _ = chi_0(lambda, c)?;
    let y = c.radians();
    Ok(pt
        .coordinates()
        .iter()
        .map(|z| -z.norm_sqr() + lambda * y)
        .collect())
}

/// The rotational torus action [u] ↦ [(τ̄₁u₁, …, τ̄_{n-1}u_{n-1}, u_n)].
pub fn rotate(pt: &ProjectivePoint, t: &TorusElement) -> Result<ProjectivePoint> {
    let n = pt.n();
    if t.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: t.n(),
        });
    }
    let mut u = pt.coordinates().to_vec();
    for k in 0..n - 1 {
        u[k] *= t.tau()[k].conj();
    }
    let mut out = ProjectivePoint { u };
    out.canonicalize();
    Ok(out)
}

/// Inverse of ℰ on the dense chart where all coordinates are nonzero:
/// ξ_k = y − |u_k|²/λ and τ_k = conj(u_k/|u_k|) on the representative with
/// u_n real positive.
pub fn chart_inverse(
    pt: &ProjectivePoint,
    lambda: f64,
    c: &Coupling,
) -> Result<(AlcovePoint, TorusElement)> {
    let n = pt.n();
    let chi0 = chi_0(lambda, c)?;
    let floor = 1e-13 * chi0.sqrt().max(1.0);
    if pt.coordinates().iter().any(|z| z.norm() <= floor) {
        return Err(Error::OutsideChart);
    }
    // canonical representative already has u_n real positive here
    let y = c.radians();
    let xi: Vec<f64> = pt
        .coordinates()
        .iter()
        .map(|z| y - z.norm_sqr() / lambda)
        .collect();
    let xi = AlcovePoint::with_tol(xi, 1e-7)?;
    let tau: Vec<C64> = pt.coordinates()[..n - 1]
        .iter()
        .map(|z| (z / z.norm()).conj())
        .collect();
    Ok((xi, TorusElement::new(tau)?))
}

/// Δ(τ) = diag(τ₁, …, τ_{n-1}, 1).
fn delta_of_tau(t: &TorusElement) -> CMatrix {
    let n = t.n();
    CMatrix::from_fn(n, n, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i < n - 1 {
            t.tau()[i]
        } else {
            C64::new(1.0, 0.0)
        }
    })
}

/// The global Lax matrix ℒ(pt) = Δ(τ)⁻¹ ℒ_loc(ξ,τ) Δ(τ) with
/// (ξ,τ) = chart_inverse(pt); extends smoothly to all of CP^{n-1}.
pub fn global_lax(
    pt: &ProjectivePoint,
    lambda: f64,
    c: &Coupling,
) -> Result<crate::alcove::SpecialUnitary> {
    let (xi, t) = chart_inverse(pt, lambda, c)?;
    let local = double::local_lax(&xi, &t, c)?;
    let d = delta_of_tau(&t);
    let d_inv = d.adjoint(); // unitary diagonal
    Ok(crate::alcove::SpecialUnitary::new_unchecked(
        d_inv * local.matrix() * d,
    ))
}

/// Old (0 < y' < π/n) and new (π/n < y < π/(n-1)) Hamiltonians on the same
/// chart coordinates (ξ', θ').
///
/// Returns (H_old, H_new via the closed form in primed variables, H_new via
/// the coordinate substitution θ = −θ', λ(ξ−y) = λ'(y'−ξ')). The two H_new
/// routes are algebraically equal.
pub fn compare_hamiltonians(
    xi_prime: &AlcovePoint,
    theta_prime: &[f64],
    lambda: f64,
    lambda_prime: f64,
    c: &Coupling,
    c_prime: &Coupling,
) -> Result<(f64, f64, f64)> {
    let n = c.n();
    if c_prime.n() != n || xi_prime.n() != n || theta_prime.len() != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xi_prime.n(),
        });
    }
    let y = c.radians();
    let y_prime = c_prime.radians();
    if !(lambda > 0.0 && lambda_prime > 0.0) {
        return Err(Error::InvalidCoupling {
            reason: "scales must be positive".into(),
        });
    }
    if !in_new_p1_window(c) {
        return Err(Error::InvalidCoupling {
            reason: "y must lie in (π/n, π/(n-1))".into(),
        });
    }
    if !(y_prime > 0.0 && y_prime < PI / n as f64) {
        return Err(Error::InvalidCoupling {
            reason: "y' must lie in (0, π/n)".into(),
        });
    }
    // λ'(π − ny') = λ(ny − π)
    let matching = lambda_prime * (PI - n as f64 * y_prime) - lambda * (n as f64 * y - PI);
    if matching.abs() > 1e-12 {
        return Err(Error::MismatchedParameters);
    }
    // ξ' must sit in the open thick-walled alcove of the old system
    if !zpolytope::in_ay_plus(xi_prime, c_prime) {
        return Err(Error::OutsideDomain);
    }

    let h_old = double::rs_hamiltonian_raw(xi_prime.coords(), theta_prime, y_prime);

    // closed form in primed variables. The constant follows from the
    // substitution below: c_{j,k} = (j−k)(y + (λ'/λ) y').
    let ratio = lambda_prime / lambda;
    let xi_p = xi_prime.coords();
    let sin_y_sq = y.sin() * y.sin();
    let theta = |k: usize| -> f64 {
        if k == 0 || k == n {
            0.0
        } else {
            theta_prime[k - 1]
        }
    };
    let mut h_closed = 0.0;
    for j in 1..=n {
        let mut product = 1.0;
        let mut partial_prime = 0.0;
        for k in j + 1..=j + n - 1 {
            partial_prime += xi_p[(k - 2) % n];
            let c_jk = (j as f64 - k as f64) * (y + ratio * y_prime);
            let angle = c_jk + ratio * partial_prime;
            product *= (1.0 - sin_y_sq / (angle.sin() * angle.sin())).abs();
        }
        h_closed += (theta(j) - theta(j - 1)).cos() * product.sqrt();
    }
    h_closed = -h_closed;

    // substitution route: map into the unprimed chart and evaluate there
    let xi: Vec<f64> = xi_p.iter().map(|&xp| y + ratio * (y_prime - xp)).collect();
    let thetas: Vec<f64> = theta_prime.iter().map(|&t| -t).collect();
    let h_subst = double::rs_hamiltonian_raw(&xi, &thetas, y);

    Ok((h_old, h_closed, h_subst))
}
