//! The z_ℓ functions and the moment polytope 𝒜_y.
//!
//! For regular ξ the functions
//!
//! ```text
//! z_ℓ(ξ, y) = (sin y / sin ny) · Π_{j=ℓ+1}^{ℓ+n-1} sin(Σ_{m=ℓ}^{j-1} ξ_m − y) / sin(Σ_{m=ℓ}^{j-1} ξ_m)
//! ```
//!
//! cut out the β-image of the constraint surface: ξ lies in 𝒜_y⁺ iff all
//! z_ℓ > 0, which is equivalent to the window inequalities
//!
//! ```text
//! ξ_ℓ + ⋯ + ξ_{ℓ+k-1} < y < ξ_ℓ + ⋯ + ξ_{ℓ+k}        (all ℓ, k = ⌊ny/π⌋)
//! ```
//!
//! on the hyperplane Σξ = π. The closure 𝒜_y is the intersection of the two
//! corresponding closed half-space families; its vertices, the ℬ(p,y) simplex
//! vertices, Delzant edge counts and the torus-action fixed points are all
//! computed here, in exact rational arithmetic whenever y is an exact
//! rational multiple of π.

mod enumerate;

use std::f64::consts::PI;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::alcove::AlcovePoint;
use crate::coupling::{self, Coupling, CouplingValue};
use crate::error::{Error, Result};

pub use enumerate::ENUMERATION_CAP;

/// The vector (z₁, …, z_n) at a regular alcove point.
#[derive(Debug, Clone, PartialEq)]
pub struct ZVector {
    z: Vec<f64>,
}

impl ZVector {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    pub fn sum(&self) -> f64 {
        self.z.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.z.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// z_ℓ(ξ, y) for all ℓ, via the product-of-sines form with the periodic
/// index convention. `y` is in radians and may be negative (z(ξ, −y) enters
/// the Lax matrix).
pub(crate) fn z_values(xi: &[f64], y: f64) -> Result<Vec<f64>> {
    let n = xi.len();
    let prefactor = y.sin() / (n as f64 * y).sin();
    let mut out = Vec::with_capacity(n);
    for l in 0..n {
        let mut value = prefactor;
        let mut partial = 0.0;
        for j in 1..n {
            partial += xi[(l + j - 1) % n];
            let denom = partial.sin();
            if denom.abs() < 1e-14 {
                return Err(Error::NearPole);
            }
            value *= (partial - y).sin() / denom;
        }
        out.push(value);
    }
    Ok(out)
}

/// The z-vector of a regular alcove point for a regular coupling.
pub fn z_vector(xi: &AlcovePoint, c: &Coupling) -> Result<ZVector> {
    if !coupling::is_regular(c) {
        return Err(Error::IrregularCoupling);
    }
    if !xi.regular() {
        return Err(Error::SingularAlcovePoint);
    }
    Ok(ZVector {
        z: z_values(xi.coords(), c.radians())?,
    })
}

/// The regime index k with kπ/n < y < (k+1)π/n.
pub fn floor_k(c: &Coupling) -> usize {
    let n = c.n();
    match c.value() {
        CouplingValue::Exact(r) => {
            ((n as i64 * *r.numer()).div_euclid(*r.denom())) as usize
        }
        CouplingValue::Float(y) => (n as f64 * y / PI).floor() as usize,
    }
}

/// Membership of ξ in the open domain 𝒜_y⁺, decided by the window
/// inequalities (all z_ℓ > 0 is the equivalent characterization).
pub fn in_ay_plus(xi: &AlcovePoint, c: &Coupling) -> bool {
    if !xi.regular() {
        return false;
    }
    let n = xi.n();
    let y = c.radians();
    let k = floor_k(c);
    let coords = xi.coords();
    for l in 0..n {
        let window = |w: usize| -> f64 { (0..w).map(|t| coords[(l + t) % n]).sum() };
        if k == 0 {
            if coords[l] <= y {
                return false;
            }
        } else if k == n - 1 {
            if window(n - 1) >= y {
                return false;
            }
        } else {
            let lower = window(k);
            if lower >= y || lower + coords[(l + k) % n] <= y {
                return false;
            }
        }
    }
    true
}

/// One closed half-space `normal · ξ (≤ or ≥) bound` on the hyperplane Σξ = π.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<i64>,
    /// bound in units of π when the defining coupling was exact
    pub bound_pi: Option<Rational64>,
    /// bound in radians
    pub bound: f64,
    pub sense: Sense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
}

impl Halfspace {
    fn dot(&self, x: &[f64]) -> f64 {
        self.normal
            .iter()
            .zip(x.iter())
            .map(|(&a, &b)| a as f64 * b)
            .sum()
    }

    /// Signed slack of the closed constraint at `x` (radians); nonnegative
    /// means satisfied.
    pub fn slack(&self, x: &[f64]) -> f64 {
        match self.sense {
            Sense::Le => self.bound - self.dot(x),
            Sense::Ge => self.dot(x) - self.bound,
        }
    }
}

/// A vertex of a polytope on the hyperplane Σξ = π. Coordinates are kept in
/// radians, together with exact units-of-π rationals when available.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPoint {
    pub coords_pi: Option<Vec<Rational64>>,
    pub coords: Vec<f64>,
}

impl VertexPoint {
    pub(crate) fn from_exact(coords_pi: Vec<Rational64>) -> Self {
        let coords = coords_pi
            .iter()
            .map(|r| (*r.numer() as f64 / *r.denom() as f64) * PI)
            .collect();
        Self {
            coords_pi: Some(coords_pi),
            coords,
        }
    }

    pub(crate) fn from_float(coords: Vec<f64>) -> Self {
        Self {
            coords_pi: None,
            coords,
        }
    }

    /// All components strictly positive (interior of the alcove faces).
    pub fn regular(&self) -> bool {
        match &self.coords_pi {
            Some(c) => c.iter().all(|r| r.is_positive()),
            None => self.coords.iter().all(|&x| x > 1e-12),
        }
    }

    pub fn min_component_pi(&self) -> f64 {
        self.coords
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            / PI
    }

    /// As an alcove point; fails if some coordinate is negative beyond
    /// tolerance (ℬ(p,y) vertices can leave the alcove for y outside the
    /// Corollary-9 interval).
    pub fn to_alcove_point(&self) -> Result<AlcovePoint> {
        AlcovePoint::with_tol(self.coords.clone(), 1e-9)
    }

    pub fn max_abs_diff(&self, other: &VertexPoint) -> f64 {
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// H-representation plus computed V-representation of a polytope on Σξ = π.
#[derive(Debug, Clone)]
pub struct Polytope {
    n: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<VertexPoint>,
    exact: bool,
    bounded: bool,
}

impl Polytope {
    /// Builds a polytope from explicit half-spaces, enumerating its vertices.
    pub fn from_inequalities(n: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if n > ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                n,
                cap: ENUMERATION_CAP,
            });
        }
        let exact = halfspaces.iter().all(|h| h.bound_pi.is_some());
        let bounded = enumerate::is_bounded(n, &halfspaces);
        let vertices = if bounded {
            enumerate::enumerate_vertices(n, &halfspaces, exact)?
        } else {
            Vec::new()
        };
        Ok(Self {
            n,
            halfspaces,
            vertices,
            exact,
            bounded,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[VertexPoint] {
        &self.vertices
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// Closed membership test in radians, with slack tolerance `tol`.
    pub fn contains_closed(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.n {
            return false;
        }
        let sum: f64 = x.iter().sum();
        if (sum - PI).abs() > tol.max(1e-9) {
            return false;
        }
        self.halfspaces.iter().all(|h| h.slack(x) >= -tol)
    }
}

fn window_normal(n: usize, start: usize, width: usize) -> Vec<i64> {
    let mut v = vec![0i64; n];
    for t in 0..width {
        v[(start + t) % n] = 1;
    }
    v
}

/// The moment polytope 𝒜_y = ℬ(k,y) ∩ ℬ(k+1,y) as an H-representation with
/// enumerated vertices. Exact when the coupling is an exact rational.
pub fn ay_polytope(c: &Coupling) -> Result<Polytope> {
    let n = c.n();
    if !coupling::is_regular(c) {
        return Err(Error::IrregularCoupling);
    }
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    let k = floor_k(c);
    let bound_pi = c.exact_value();
    let bound = c.radians();
    let mut halfspaces = Vec::new();
    for l in 0..n {
        if k >= 1 {
            halfspaces.push(Halfspace {
                normal: window_normal(n, l, k),
                bound_pi,
                bound,
                sense: Sense::Le,
            });
        }
        if k + 1 <= n - 1 {
            halfspaces.push(Halfspace {
                normal: window_normal(n, l, k + 1),
                bound_pi,
                bound,
                sense: Sense::Ge,
            });
        }
    }
    let exact = bound_pi.is_some();
    let vertices = enumerate::enumerate_vertices(n, &halfspaces, exact)?;
    Ok(Polytope {
        n,
        halfspaces,
        vertices,
        exact,
        // 𝒜_y sits inside the alcove: the window inequalities force ξ ≥ 0,
        // hence 0 ≤ ξ_k ≤ π
        bounded: true,
    })
}

/// The n vertices of the simplex ℬ(p,y): cyclic permutations of the pattern
/// with value a = π/n + qỹ on the positions {jp mod n : j = 1..n−q} and
/// b = π/n − (n−q)ỹ elsewhere, where ỹ = y − pπ/n.
pub fn b_simplex_vertices(p: i64, c: &Coupling) -> Result<Vec<VertexPoint>> {
    let n = c.n();
    let n_i = n as i64;
    if num_integer::Integer::gcd(&p, &n_i) != 1 || !(1..n_i).contains(&p) {
        return Err(Error::NotCoprime { p, n });
    }
    let q = (1..n_i)
        .find(|&q| (p * q).rem_euclid(n_i) == 1)
        .expect("coprime p has an inverse mod n");

    let a_positions: Vec<usize> = (1..=(n_i - q))
        .map(|j| ((j * p - 1).rem_euclid(n_i)) as usize)
        .collect();

    let base: VertexPoint = match c.value() {
        CouplingValue::Exact(y) => {
            let y_tilde = y - Rational64::new(p, n_i);
            if y_tilde.is_zero() {
                return Err(Error::DegenerateSimplex);
            }
            let a = Rational64::new(1, n_i) + Rational64::from_integer(q) * y_tilde;
            let b = Rational64::new(1, n_i)
                - Rational64::from_integer(n_i - q) * y_tilde;
            let mut coords = vec![b; n];
            for &i in &a_positions {
                coords[i] = a;
            }
            VertexPoint::from_exact(coords)
        }
        CouplingValue::Float(y) => {
            let y_tilde = y - p as f64 * PI / n as f64;
            if y_tilde.abs() < 1e-14 {
                return Err(Error::DegenerateSimplex);
            }
            let a = PI / n as f64 + q as f64 * y_tilde;
            let b = PI / n as f64 - (n_i - q) as f64 * y_tilde;
            let mut coords = vec![b; n];
            for &i in &a_positions {
                coords[i] = a;
            }
            VertexPoint::from_float(coords)
        }
    };

    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        // σ^t: component i picks up base[i + t]
        match &base.coords_pi {
            Some(c_pi) => {
                let coords = (0..n).map(|i| c_pi[(i + t) % n]).collect();
                out.push(VertexPoint::from_exact(coords));
            }
            None => {
                let coords = (0..n).map(|i| base.coords[(i + t) % n]).collect();
                out.push(VertexPoint::from_float(coords));
            }
        }
    }
    Ok(out)
}

/// Edge count (number of incident 1-faces) for every vertex. A polytope of
/// dimension n−1 can be the moment polytope of a toric manifold only if
/// every count equals n−1.
pub fn delzant_edge_counts(poly: &Polytope) -> Result<Vec<(VertexPoint, usize)>> {
    if !poly.is_bounded() {
        return Err(Error::Unbounded);
    }
    let n = poly.n();
    let verts = poly.vertices();
    let m = verts.len();
    let mut counts = vec![0usize; m];

    // active halfspace sets per vertex
    let active: Vec<Vec<usize>> = verts
        .iter()
        .map(|v| enumerate::active_halfspaces(poly.halfspaces(), v))
        .collect();

    for i in 0..m {
        for j in i + 1..m {
            let common: Vec<usize> = active[i]
                .iter()
                .copied()
                .filter(|idx| active[j].contains(idx))
                .collect();
            // the segment ij is an edge iff the common active normals,
            // together with the Σξ = π normal, span a hyperplane (rank n−1)
            let mut rows: Vec<Vec<i64>> = vec![vec![1; n]];
            for idx in common {
                rows.push(poly.halfspaces()[idx].normal.clone());
            }
            if enumerate::integer_rank(&rows) == n - 1 {
                counts[i] += 1;
                counts[j] += 1;
            }
        }
    }
    Ok(verts
        .iter()
        .cloned()
        .zip(counts)
        .collect())
}

/// Fixed points of the β-generated torus action over 𝒜_y^reg: the regular
/// vertices of 𝒜_y whose z-vector is a standard basis vector.
pub fn fixed_points(c: &Coupling) -> Result<Vec<AlcovePoint>> {
    fixed_points_with_tol(c, 1e-9)
}

pub fn fixed_points_with_tol(c: &Coupling, tol: f64) -> Result<Vec<AlcovePoint>> {
    let poly = ay_polytope(c)?;
    let y = c.radians();
    let mut out = Vec::new();
    for v in poly.vertices() {
        if !v.regular() {
            continue;
        }
        let z = match z_values(&v.coords, y) {
            Ok(z) => z,
            Err(_) => continue,
        };
        let k = z
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let is_basis = z
            .iter()
            .enumerate()
            .all(|(l, &zl)| (zl - if l == k { 1.0 } else { 0.0 }).abs() <= tol);
        if is_basis {
            out.push(v.to_alcove_point()?);
        }
    }
    Ok(out)
}
