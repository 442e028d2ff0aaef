//! Classification of the coupling parameter y.
//!
//! The reduction at μ₀(y) is smooth precisely when e^{2imy} ≠ 1 for all
//! m = 1..n; for y = (r/s)π in lowest terms this is the integer condition
//! s > n. Regular couplings split into type (i) — the constraint surface
//! consists of regular matrices and the reduced space is toric CP^{n-1} —
//! and type (ii). The type (i) couplings are exactly the y/π inside an open
//! interval
//!
//! ```text
//! (a_{p,n}, b_{p,n}) = (p/n - 1/(nq), p/n + 1/(n(n-q)))      pq ≡ 1 (mod n)
//! ```
//!
//! for some p coprime to n, minus the center point p/n (which is irregular).

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_TOL_ANGLE: f64 = 1e-12;

/// The coupling parameter y with its matrix size n, held exactly as a
/// rational multiple of π whenever possible.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    n: usize,
    value: CouplingValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingValue {
    /// y = (r/s)·π in lowest terms, 0 < r < s.
    Exact(Rational64),
    /// y in radians, 0 < y < π.
    Float(f64),
}

impl Coupling {
    /// y = (r/s)·π.
    pub fn exact(n: usize, r: i64, s: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCoupling {
                reason: format!("n = {n} must be at least 2"),
            });
        }
        if s == 0 {
            return Err(Error::InvalidCoupling {
                reason: "zero denominator".into(),
            });
        }
        let ratio = Rational64::new(r, s);
        if ratio <= Rational64::zero() || ratio >= Rational64::one() {
            return Err(Error::InvalidCoupling {
                reason: format!("y = ({r}/{s})π must satisfy 0 < y < π"),
            });
        }
        Ok(Self {
            n,
            value: CouplingValue::Exact(ratio),
        })
    }

    /// y in radians.
    pub fn from_radians(n: usize, y: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCoupling {
                reason: format!("n = {n} must be at least 2"),
            });
        }
        if !(y > 0.0 && y < std::f64::consts::PI) {
            return Err(Error::InvalidCoupling {
                reason: format!("y = {y} must satisfy 0 < y < π"),
            });
        }
        Ok(Self {
            n,
            value: CouplingValue::Float(y),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> CouplingValue {
        self.value
    }

    pub fn exact_value(&self) -> Option<Rational64> {
        match self.value {
            CouplingValue::Exact(r) => Some(r),
            CouplingValue::Float(_) => None,
        }
    }

    /// y in radians.
    pub fn radians(&self) -> f64 {
        match self.value {
            CouplingValue::Exact(r) => {
                (*r.numer() as f64 / *r.denom() as f64) * std::f64::consts::PI
            }
            CouplingValue::Float(y) => y,
        }
    }

    /// y/π as a float.
    pub fn over_pi(&self) -> f64 {
        match self.value {
            CouplingValue::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            CouplingValue::Float(y) => y / std::f64::consts::PI,
        }
    }

    /// The conjugate coupling π − y (p ↦ n−p on type (i) intervals).
    pub fn conjugate(&self) -> Self {
        let value = match self.value {
            CouplingValue::Exact(r) => CouplingValue::Exact(Rational64::one() - r),
            CouplingValue::Float(y) => CouplingValue::Float(std::f64::consts::PI - y),
        };
        Self { n: self.n, value }
    }
}

/// One type (i) interval (a, b) in units of π, attached to p with pq ≡ 1 mod n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeOneInterval {
    pub p: i64,
    pub q: i64,
    /// left endpoint, units of π
    pub a: Rational64,
    /// right endpoint, units of π
    pub b: Rational64,
}

impl TypeOneInterval {
    pub fn contains_exact(&self, y_over_pi: Rational64) -> bool {
        self.a < y_over_pi && y_over_pi < self.b
    }
}

fn mod_inverse(p: i64, n: i64) -> Option<i64> {
    (1..n).find(|&q| (p * q).rem_euclid(n) == 1)
}

/// The type (i) intervals for a given n, sorted by p.
pub fn type_one_intervals(n: usize) -> Vec<TypeOneInterval> {
    let n_i = n as i64;
    let mut out = Vec::new();
    for p in 1..n_i {
        if p.gcd(&n_i) != 1 {
            continue;
        }
        let q = mod_inverse(p, n_i).expect("p coprime to n has an inverse");
        let a = Rational64::new(p, n_i) - Rational64::new(1, n_i * q);
        let b = Rational64::new(p, n_i) + Rational64::new(1, n_i * (n_i - q));
        out.push(TypeOneInterval { p, q, a, b });
    }
    out
}

/// Verdict of the coupling classification.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    /// e^{2imy} = 1 for some m = 1..n; the reduced space is not smooth of
    /// the expected dimension.
    Irregular,
    /// y strictly inside a type (i) interval: reduced space is CP^{n-1}.
    TypeI { p: i64, q: i64, interval: TypeOneInterval },
    /// regular, but the constraint surface meets the non-regular locus.
    TypeII,
}

impl Classification {
    pub fn verdict_str(&self) -> &'static str {
        match self {
            Classification::Irregular => "irregular",
            Classification::TypeI { .. } => "type_i",
            Classification::TypeII => "type_ii",
        }
    }
}

/// The regularity condition e^{2imy} ≠ 1 for all m = 1..n.
pub fn is_regular(c: &Coupling) -> bool {
    is_regular_with_tol(c, DEFAULT_TOL_ANGLE)
}

pub fn is_regular_with_tol(c: &Coupling, tol_angle: f64) -> bool {
    match c.value() {
        CouplingValue::Exact(r) => *r.denom() > c.n() as i64,
        CouplingValue::Float(y) => {
            let two_pi = 2.0 * std::f64::consts::PI;
            (1..=c.n()).all(|m| {
                let angle = (2.0 * m as f64 * y).rem_euclid(two_pi);
                angle.min(two_pi - angle) > tol_angle
            })
        }
    }
}

/// Classify a coupling as Irregular / TypeI{p,q} / TypeII.
///
/// Exact rational couplings are classified with integer arithmetic only.
/// Float couplings within `tol_angle` of an interval endpoint are rejected
/// as ambiguous (the caller must supply an exact rational).
pub fn classify(c: &Coupling) -> Result<Classification> {
    classify_with_tol(c, DEFAULT_TOL_ANGLE)
}

pub fn classify_with_tol(c: &Coupling, tol_angle: f64) -> Result<Classification> {
    let intervals = type_one_intervals(c.n());
    // A float within tol_angle of an interval endpoint cannot be placed:
    // the endpoint itself is irregular while either side classifies
    // differently. Reject before the (also tolerance-based) regularity test.
    if let CouplingValue::Float(y) = c.value() {
        for iv in &intervals {
            for endpoint in [iv.a, iv.b] {
                let e = *endpoint.numer() as f64 / *endpoint.denom() as f64
                    * std::f64::consts::PI;
                if (y - e).abs() <= tol_angle {
                    return Err(Error::AmbiguousClassification);
                }
            }
        }
    }
    if !is_regular_with_tol(c, tol_angle) {
        return Ok(Classification::Irregular);
    }
    match c.value() {
        CouplingValue::Exact(y) => {
            for iv in &intervals {
                // y = p/n is irregular (denominator divides n), so a regular
                // y inside the interval is automatically ≠ pπ/n.
                if iv.contains_exact(y) {
                    return Ok(Classification::TypeI {
                        p: iv.p,
                        q: iv.q,
                        interval: *iv,
                    });
                }
            }
            Ok(Classification::TypeII)
        }
        CouplingValue::Float(y) => {
            let t = y / std::f64::consts::PI;
            for iv in &intervals {
                let a = *iv.a.numer() as f64 / *iv.a.denom() as f64;
                let b = *iv.b.numer() as f64 / *iv.b.denom() as f64;
                if t > a && t < b {
                    return Ok(Classification::TypeI {
                        p: iv.p,
                        q: iv.q,
                        interval: *iv,
                    });
                }
            }
            Ok(Classification::TypeII)
        }
    }
}

/// m_p in the alternate endpoint forms a = m_p/q, b = (p − m_p)/(n − q).
pub fn m_p(n: usize, p: i64, q: i64) -> i64 {
    (p * q - 1) / n as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regularity_examples() {
        // m = 4 gives e^{2iπ} = 1
        assert!(!is_regular(&Coupling::exact(4, 1, 4).unwrap()));
        assert!(is_regular(&Coupling::exact(4, 2, 5).unwrap()));
        assert!(is_regular(&Coupling::from_radians(3, 0.123456).unwrap()));
    }

    #[test]
    fn intervals_n3() {
        let iv = type_one_intervals(3);
        assert_eq!(iv.len(), 2);
        assert_eq!((iv[0].p, iv[0].q), (1, 1));
        assert_eq!(iv[0].a, Rational64::new(0, 1));
        assert_eq!(iv[0].b, Rational64::new(1, 2));
        assert_eq!((iv[1].p, iv[1].q), (2, 2));
        assert_eq!(iv[1].a, Rational64::new(1, 2));
        assert_eq!(iv[1].b, Rational64::new(1, 1));
    }

    #[test]
    fn intervals_n4() {
        let iv = type_one_intervals(4);
        assert_eq!(iv.len(), 2);
        assert_eq!((iv[0].p, iv[0].q), (1, 1));
        assert_eq!(iv[0].a, Rational64::new(0, 1));
        assert_eq!(iv[0].b, Rational64::new(1, 3));
        assert_eq!((iv[1].p, iv[1].q), (3, 3));
        assert_eq!(iv[1].a, Rational64::new(2, 3));
        assert_eq!(iv[1].b, Rational64::new(1, 1));
    }

    #[test]
    fn endpoint_reflection_identity() {
        for n in 2..=12usize {
            let ivs = type_one_intervals(n);
            for iv in &ivs {
                let partner = ivs
                    .iter()
                    .find(|j| j.p == n as i64 - iv.p)
                    .expect("n-p is also coprime to n");
                assert_eq!(partner.a, Rational64::one() - iv.b);
                assert_eq!(partner.b, Rational64::one() - iv.a);
            }
        }
    }

    #[test]
    fn alternate_endpoint_forms_agree() {
        for n in 2..=12usize {
            for iv in type_one_intervals(n) {
                let m = m_p(n, iv.p, iv.q);
                assert_eq!(iv.a, Rational64::new(m, iv.q));
                assert_eq!(iv.b, Rational64::new(iv.p - m, n as i64 - iv.q));
            }
        }
    }

    #[test]
    fn classify_examples() {
        // n = 4, y = 2π/5 sits in the gap (1/3, 2/3)
        let c = Coupling::exact(4, 2, 5).unwrap();
        assert_eq!(classify(&c).unwrap(), Classification::TypeII);

        // n = 5, y = 3π/10 sits in the gap (1/4, 1/3)
        let c = Coupling::exact(5, 3, 10).unwrap();
        assert_eq!(classify(&c).unwrap(), Classification::TypeII);

        // n = 4, y = π/4 = pπ/n is irregular
        let c = Coupling::exact(4, 1, 4).unwrap();
        assert_eq!(classify(&c).unwrap(), Classification::Irregular);

        // n = 5, y = 9π/20 ∈ (1/3, 1/2): p = 2, q = 3
        let c = Coupling::exact(5, 9, 20).unwrap();
        match classify(&c).unwrap() {
            Classification::TypeI { p, q, .. } => {
                assert_eq!((p, q), (2, 3));
            }
            other => panic!("expected TypeI, got {other:?}"),
        }
    }

    #[test]
    fn all_regular_rationals_are_type_i_for_small_n() {
        for n in [2usize, 3] {
            for s in 2..=120i64 {
                for r in 1..s {
                    if r.gcd(&s) != 1 {
                        continue;
                    }
                    let c = Coupling::exact(n, r, s).unwrap();
                    let verdict = classify(&c).unwrap();
                    if s > n as i64 {
                        assert!(
                            matches!(verdict, Classification::TypeI { .. }),
                            "n={n} y={r}/{s}"
                        );
                    } else {
                        assert_eq!(verdict, Classification::Irregular);
                    }
                }
            }
        }
    }

    #[test]
    fn midpoint_of_new_interval_is_type_i_p1() {
        for n in 3..=9usize {
            let y = (std::f64::consts::PI / n as f64
                + std::f64::consts::PI / (n as f64 - 1.0))
                / 2.0;
            let c = Coupling::from_radians(n, y).unwrap();
            match classify(&c).unwrap() {
                Classification::TypeI { p, q, .. } => assert_eq!((p, q), (1, 1)),
                other => panic!("n={n}: expected TypeI{{1,1}}, got {other:?}"),
            }
        }
    }

    #[test]
    fn brute_force_oracle_agrees() {
        // Independent oracle: regularity via s > n; interval membership via
        // the alternate endpoint forms a = m_p/q, b = (p - m_p)/(n - q) with
        // pq = m_p n + 1, scanning p directly.
        fn oracle(n: usize, y: Rational64) -> Classification {
            if *y.denom() <= n as i64 {
                return Classification::Irregular;
            }
            let n_i = n as i64;
            for p in 1..n_i {
                if p.gcd(&n_i) != 1 {
                    continue;
                }
                let q = (1..n_i).find(|&q| (p * q) % n_i == 1).unwrap();
                let m = (p * q - 1) / n_i;
                let a = Rational64::new(m, q);
                let b = Rational64::new(p - m, n_i - q);
                if a < y && y < b {
                    let iv = TypeOneInterval { p, q, a, b };
                    return Classification::TypeI { p, q, interval: iv };
                }
            }
            Classification::TypeII
        }

        for n in 2..=12usize {
            for s in 2..=200i64 {
                for r in 1..s {
                    if r.gcd(&s) != 1 {
                        continue;
                    }
                    let y = Rational64::new(r, s);
                    let c = Coupling::exact(n, r, s).unwrap();
                    assert_eq!(classify(&c).unwrap(), oracle(n, y), "n={n} y={r}/{s}");
                }
            }
        }
    }

    #[test]
    fn conjugation_maps_p_to_n_minus_p() {
        for n in 2..=9usize {
            for s in [7i64, 11, 13, 23] {
                for r in 1..s {
                    let c = Coupling::exact(n, r, s).unwrap();
                    let conj = c.conjugate();
                    match (classify(&c).unwrap(), classify(&conj).unwrap()) {
                        (
                            Classification::TypeI { p, .. },
                            Classification::TypeI { p: pc, .. },
                        ) => {
                            assert_eq!(pc, n as i64 - p, "n={n} y={r}/{s}")
                        }
                        (Classification::TypeII, Classification::TypeII) => {}
                        (Classification::Irregular, Classification::Irregular) => {}
                        (v, vc) => panic!("n={n} y={r}/{s}: {v:?} vs {vc:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn float_near_endpoint_is_ambiguous() {
        // b_{1,4} = 1/3: approach within 1e-14 of π/3
        let y = std::f64::consts::PI / 3.0 + 1e-14;
        let c = Coupling::from_radians(4, y).unwrap();
        assert_eq!(classify(&c), Err(Error::AmbiguousClassification));
    }

    #[test]
    fn type_i_selection_satisfies_exact_membership() {
        for n in 2..=10usize {
            for s in 2..=60i64 {
                for r in 1..s {
                    if r.gcd(&s) != 1 {
                        continue;
                    }
                    let c = Coupling::exact(n, r, s).unwrap();
                    if let Classification::TypeI { p, q, interval } = classify(&c).unwrap() {
                        assert_eq!((p * q).rem_euclid(n as i64), 1);
                        let y = Rational64::new(r, s);
                        assert!(interval.a < y && y < interval.b);
                        assert_ne!(y, Rational64::new(p, n as i64));
                    }
                }
            }
        }
    }
}
