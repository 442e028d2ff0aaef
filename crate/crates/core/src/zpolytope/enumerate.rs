//! Brute-force vertex enumeration on the hyperplane Σξ = π.
//!
//! A vertex is a feasible point where n−1 independent bounding hyperplanes
//! meet, so all (n−1)-subsets of the defining hyperplanes are tried. The
//! normals are integer vectors and exact bounds are rationals, so in exact
//! mode every subset system is solved by fraction-free Cramer elimination
//! over i128 after clearing denominators; feasibility is then decided by
//! integer cross-multiplication. No floating point enters the exact path.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::{Halfspace, Sense, VertexPoint};

/// Brute-force enumeration is combinatorial in n; desk scale stops here.
pub const ENUMERATION_CAP: usize = 8;

const F64_PIVOT_TOL: f64 = 1e-8;
const FLOAT_FEAS_SLACK: f64 = 1e-9;
const FLOAT_DEDUP: f64 = 1e-10;

fn overflow() -> Error {
    Error::InvalidCoupling {
        reason: "exact vertex enumeration overflowed 128-bit integers; denominators too large".into(),
    }
}

fn for_each_combination(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == 0 || k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Gaussian elimination with partial pivoting for the float mode.
fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if pivot_val < F64_PIVOT_TOL {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor != 0.0 {
                for c in col..n {
                    a[r][c] -= factor * a[col][c];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Fraction-free (Bareiss) determinant over i128.
fn bareiss_det(mut a: Vec<Vec<i128>>) -> Result<i128> {
    let n = a.len();
    if n == 0 {
        return Ok(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let prod1 = a[i][j].checked_mul(a[k][k]).ok_or_else(overflow)?;
                let prod2 = a[i][k].checked_mul(a[k][j]).ok_or_else(overflow)?;
                a[i][j] = prod1.checked_sub(prod2).ok_or_else(overflow)? / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Exact rank of an integer matrix (fraction-free elimination in i128).
pub(crate) fn integer_rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let n_rows = a.len();
    let n_cols = a[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..n_cols {
        let Some(p) = (row..n_rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, p);
        for r in 0..n_rows {
            if r != row && a[r][col] != 0 {
                let (pr, pc) = (a[row][col], a[r][col]);
                for c in 0..n_cols {
                    a[r][c] = a[r][c] * pr - a[row][c] * pc;
                }
                let g = a[r].iter().fold(0i128, |acc, &x| gcd_i128(acc, x.abs()));
                if g > 1 {
                    for c in 0..n_cols {
                        a[r][c] /= g;
                    }
                }
            }
        }
        row += 1;
        rank += 1;
        if row == n_rows {
            break;
        }
    }
    rank
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if a == 0 {
        b
    } else {
        gcd_i128(b % a, a)
    }
}

/// A rational vector spanning the nullspace of an integer matrix of
/// nullity one.
fn nullspace_direction(rows: &[Vec<i64>], n: usize) -> Option<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for c in col..n {
            a[row][c] = &a[row][c] * &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..n {
                    let delta = &factor * &a[row][c];
                    a[r][c] = &a[r][c] - delta;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    if pivot_cols.len() != n - 1 {
        return None;
    }
    let free_col = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut d = vec![BigRational::zero(); n];
    d[free_col] = BigRational::one();
    for (r, &pc) in pivot_cols.iter().enumerate() {
        d[pc] = -a[r][free_col].clone();
    }
    Some(d)
}

/// Direction-space form of a halfspace: every recession direction d
/// satisfies `directed·d ≤ 0`.
fn directed_normal(h: &Halfspace) -> Vec<i64> {
    match h.sense {
        Sense::Le => h.normal.clone(),
        Sense::Ge => h.normal.iter().map(|&x| -x).collect(),
    }
}

/// Exact boundedness of {ξ : Σξ = π, halfspaces}: the recession cone
/// {d : Σd = 0, directed·d ≤ 0} must be {0}. Decided exactly over the
/// integers via the lineality space and extreme-ray subsets.
pub(crate) fn is_bounded(n: usize, halfspaces: &[Halfspace]) -> bool {
    let directed: Vec<Vec<i64>> = halfspaces.iter().map(directed_normal).collect();
    let mut all_rows: Vec<Vec<i64>> = vec![vec![1; n]];
    all_rows.extend(directed.iter().cloned());
    if integer_rank(&all_rows) < n {
        // nonzero lineality direction exists
        return false;
    }
    if n < 2 {
        return true;
    }
    let mut unbounded = false;
    for_each_combination(directed.len(), n - 2, &mut |subset| {
        if unbounded {
            return;
        }
        let mut rows: Vec<Vec<i64>> = vec![vec![1; n]];
        for &i in subset {
            rows.push(directed[i].clone());
        }
        if integer_rank(&rows) != n - 1 {
            return;
        }
        let Some(d) = nullspace_direction(&rows, n) else {
            return;
        };
        for candidate in [1i64, -1] {
            let sign = BigRational::from_integer(BigInt::from(candidate));
            let feasible = directed.iter().all(|normal| {
                let dot: BigRational = normal
                    .iter()
                    .zip(d.iter())
                    .map(|(&a, x)| BigRational::from_integer(BigInt::from(a)) * x)
                    .sum();
                (dot * &sign) <= BigRational::zero()
            });
            if feasible {
                unbounded = true;
                return;
            }
        }
    });
    !unbounded
}

fn float_feasible(x: &[f64], halfspaces: &[Halfspace], slack: f64) -> bool {
    halfspaces.iter().all(|h| h.slack(x) >= -slack)
}

/// Candidate vertex in exact form: coordinate i is num[i] / denom, with
/// denom > 0, not necessarily reduced.
struct ExactCandidate {
    num: Vec<i128>,
    denom: i128,
}

impl ExactCandidate {
    /// Exact feasibility against `a·ξ (≤|≥) r/s` by cross-multiplication.
    fn feasible(&self, halfspaces: &[Halfspace]) -> Result<bool> {
        for h in halfspaces {
            let bound = h.bound_pi.expect("exact mode");
            let (r, s) = (*bound.numer() as i128, *bound.denom() as i128);
            let mut dot: i128 = 0;
            for (a, x) in h.normal.iter().zip(self.num.iter()) {
                dot = dot
                    .checked_add((*a as i128).checked_mul(*x).ok_or_else(overflow)?)
                    .ok_or_else(overflow)?;
            }
            // compare dot/denom vs r/s with denom, s > 0
            let lhs = dot.checked_mul(s).ok_or_else(overflow)?;
            let rhs = r.checked_mul(self.denom).ok_or_else(overflow)?;
            let ok = match h.sense {
                Sense::Le => lhs <= rhs,
                Sense::Ge => lhs >= rhs,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn reduce(&self) -> Result<Vec<Rational64>> {
        self.num
            .iter()
            .map(|&x| {
                let g = gcd_i128(x.abs(), self.denom).max(1);
                let (num, den) = (x / g, self.denom / g);
                let num = i64::try_from(num).map_err(|_| overflow())?;
                let den = i64::try_from(den).map_err(|_| overflow())?;
                Ok(Rational64::new(num, den))
            })
            .collect()
    }
}

pub(crate) fn enumerate_vertices(
    n: usize,
    halfspaces: &[Halfspace],
    exact: bool,
) -> Result<Vec<VertexPoint>> {
    let m = halfspaces.len();
    let mut exact_set: BTreeSet<Vec<Rational64>> = BTreeSet::new();
    let mut float_list: Vec<Vec<f64>> = Vec::new();
    let mut failure: Option<Error> = None;

    // common denominator of the exact bounds (the Σξ = π row has bound 1)
    let common: i128 = if exact {
        halfspaces
            .iter()
            .map(|h| *h.bound_pi.expect("exact mode").denom() as i128)
            .fold(1i128, |acc, d| acc.lcm(&d))
    } else {
        1
    };

    for_each_combination(m, n - 1, &mut |subset| {
        if failure.is_some() {
            return;
        }
        if exact {
            // integer system A w = c for w = common·ξ (units of π)
            let mut a: Vec<Vec<i128>> = Vec::with_capacity(n);
            let mut c: Vec<i128> = Vec::with_capacity(n);
            for &i in subset {
                a.push(halfspaces[i].normal.iter().map(|&x| x as i128).collect());
                let bound = halfspaces[i].bound_pi.expect("exact mode");
                c.push(*bound.numer() as i128 * (common / *bound.denom() as i128));
            }
            a.push(vec![1; n]);
            c.push(common);

            let result = (|| -> Result<()> {
                let det = bareiss_det(a.clone())?;
                if det == 0 {
                    return Ok(());
                }
                let mut num = Vec::with_capacity(n);
                for col in 0..n {
                    let mut ai = a.clone();
                    for row in 0..n {
                        ai[row][col] = c[row];
                    }
                    num.push(bareiss_det(ai)?);
                }
                // ξ_i = num_i / (det · common); normalize the denominator
                let mut denom = det.checked_mul(common).ok_or_else(overflow)?;
                if denom < 0 {
                    denom = -denom;
                    for x in num.iter_mut() {
                        *x = -*x;
                    }
                }
                let candidate = ExactCandidate { num, denom };
                if candidate.feasible(halfspaces)? {
                    exact_set.insert(candidate.reduce()?);
                }
                Ok(())
            })();
            if let Err(e) = result {
                failure = Some(e);
            }
        } else {
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            for &i in subset {
                a.push(halfspaces[i].normal.iter().map(|&x| x as f64).collect());
                b.push(halfspaces[i].bound);
            }
            a.push(vec![1.0; n]);
            b.push(PI);
            if let Some(x) = solve_f64(a, b) {
                if float_feasible(&x, halfspaces, FLOAT_FEAS_SLACK)
                    && !float_list.iter().any(|v| {
                        v.iter().zip(x.iter()).all(|(a, b)| (a - b).abs() < FLOAT_DEDUP)
                    })
                {
                    float_list.push(x);
                }
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }

    if exact {
        Ok(exact_set.into_iter().map(VertexPoint::from_exact).collect())
    } else {
        float_list.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(float_list.into_iter().map(VertexPoint::from_float).collect())
    }
}

/// Indices of the halfspaces tight at a vertex (exact when possible).
pub(crate) fn active_halfspaces(halfspaces: &[Halfspace], v: &VertexPoint) -> Vec<usize> {
    match &v.coords_pi {
        Some(coords) => halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| {
                let dot: Rational64 = h
                    .normal
                    .iter()
                    .zip(coords.iter())
                    .map(|(&a, x)| Rational64::from_integer(a) * x)
                    .sum();
                Some(dot) == h.bound_pi
            })
            .map(|(i, _)| i)
            .collect(),
        None => halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| h.slack(&v.coords).abs() <= 1e-9)
            .map(|(i, _)| i)
            .collect(),
    }
}
