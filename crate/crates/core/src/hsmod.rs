//! Rank-one modules `HS^α` (left) and `^αHS` (right) over `End(M^α)`.
//!
//! The scalar of `ξ_q` is the coefficient of `∏_{i≠j} N_ij^{q_ij}` in
//! `∏_r det(I + N_{≤r})^{α_r − α_{r+1}}`, where `N_ij = x_ij / x_jj`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};


use crate::combinatorics::{permutations, CosetMatrix, ObjectLabel};
use crate::error::{input, Result};
use crate::exact::{IVPoly, Rational};
use crate::schur::Morphism;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Object, side, and the largest off-diagonal degree the caller will query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSContext {
    pub alpha: ObjectLabel,
    pub side: Side,
    pub truncation_degree: i64,
}

impl HSContext {
    pub fn new(alpha: ObjectLabel, side: Side, truncation_degree: i64) -> Self {
        HSContext { alpha, side, truncation_degree }
    }

    pub fn scalar(&self, q: &CosetMatrix) -> Result<IVPoly> {
        if q.offdiag_degree() > self.truncation_degree {
            return input(format!(
                "matrix degree {} exceeds the truncation degree {}",
                q.offdiag_degree(),
                self.truncation_degree
            ));
        }
        hs_scalar_on(q, &self.alpha, self.side)
    }

    /// Scalar of a whole endomorphism.
    pub fn morphism_scalar(&self, f: &Morphism) -> Result<IVPoly> {
        let mut acc = IVPoly::zero(self.alpha.l());
        for (q, c) in f.terms() {
            acc = &acc + &(c * &self.scalar(q)?);
        }
        Ok(acc)
    }
}

/// Sparse truncated series in the off-diagonal ratios; exponent vectors are
/// indexed like `q`'s off-diagonal cells.
type Series = BTreeMap<Vec<u32>, IVPoly>;

fn divides(e: &[u32], bound: &[u32]) -> bool {
    e.iter().zip(bound).all(|(a, b)| a <= b)
}

fn series_mul(a: &Series, b: &Series, bound: &[u32]) -> Series {
    let mut out = Series::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if !divides(&e, bound) {
                continue;
            }
            let slot = out.entry(e).or_insert_with(|| IVPoly::zero(ca.nvars()));
            *slot = &*slot + &(ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `e (e−1) … (e−k+1) / k!` for a polynomial `e`.
fn poly_binomial(e: &IVPoly, k: u32) -> IVPoly {
    let n = e.nvars();
    let mut acc = IVPoly::one(n);
    for i in 0..k {
        acc = &acc * &(e - &IVPoly::from_int(n, i as i64));
    }
    let fact: i64 = (1..=k as i64).product();
    acc.scale(&Rational::new(1.into(), fact.into()))
}

fn hs_cache() -> &'static RwLock<HashMap<(CosetMatrix, ObjectLabel), IVPoly>> {
    static CACHE: OnceLock<RwLock<HashMap<(CosetMatrix, ObjectLabel), IVPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Left-module scalar of `ξ_q` on `HS^α`.
pub fn hs_scalar(q: &CosetMatrix, alpha: &ObjectLabel) -> Result<IVPoly> {
    hs_scalar_on(q, alpha, Side::Left)
}

pub fn hs_scalar_on(q: &CosetMatrix, alpha: &ObjectLabel, side: Side) -> Result<IVPoly> {
    if q.domain()? != *alpha || q.codomain()? != *alpha {
        return input(format!("{q} is not an endomorphism of {alpha}"));
    }
    let q = match side {
        Side::Left => q.clone(),
        Side::Right => q.transpose(),
    };
    let key = (q.clone(), alpha.clone());
    if let Some(hit) = hs_cache().read().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let value = expand(&q, alpha);
    hs_cache().write().unwrap().insert(key, value.clone());
    Ok(value)
}

fn expand(q: &CosetMatrix, alpha: &ObjectLabel) -> IVPoly {
    let l = alpha.l();
    let n = alpha.len().max(q.rows()).max(q.cols());
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let slot: HashMap<(usize, usize), usize> = cells.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let bound: Vec<u32> = cells.iter().map(|&(i, j)| q.entry(i, j).offset as u32).collect();
    let total: u32 = bound.iter().sum();
    let entry = |i: usize| alpha.entry(i).to_poly(l);
    let mut acc: Series = Series::from([(vec![0; cells.len()], IVPoly::one(l))]);
    for r in 1..=n {
        // P_r = det(I + N_{≤r}) − 1, truncated.
        let mut p = Series::new();
        for perm in permutations(r) {
            if perm.iter().enumerate().all(|(i, &j)| i == j) {
                continue;
            }
            let mut e = vec![0u32; cells.len()];
            for (i, &j) in perm.iter().enumerate() {
                if i != j {
                    e[slot[&(i, j)]] += 1;
                }
            }
            if !divides(&e, &bound) {
                continue;
            }
            let sign = perm_sign(&perm);
            let slot_c = p.entry(e).or_insert_with(|| IVPoly::zero(l));
            *slot_c = &*slot_c + &IVPoly::from_int(l, sign);
        }
        p.retain(|_, c| !c.is_zero());
        if p.is_empty() {
            continue;
        }
        let exponent = &entry(r - 1) - &entry(r);
        // Σ_k binom(e, k) P^k; P has no term below degree 2.
        let mut factor: Series = Series::from([(vec![0; cells.len()], IVPoly::one(l))]);
        let mut power: Series = factor.clone();
        for k in 1..=total / 2 {
            power = series_mul(&power, &p, &bound);
            if power.is_empty() {
                break;
            }
            let b = poly_binomial(&exponent, k);
            for (e, c) in &power {
                let s = factor.entry(e.clone()).or_insert_with(|| IVPoly::zero(l));
                *s = &*s + &(c * &b);
            }
        }
        factor.retain(|_, c| !c.is_zero());
        acc = series_mul(&acc, &factor, &bound);
    }
    acc.remove(&bound).unwrap_or_else(|| IVPoly::zero(l))
}

fn perm_sign(p: &[usize]) -> i64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Scalar of an endomorphism on `HS^α`.
pub fn hs_morphism_scalar(f: &Morphism, side: Side) -> Result<IVPoly> {
    let alpha = f.domain().clone();
    if *f.codomain() != alpha {
        return input("not an endomorphism");
    }
    let mut acc = IVPoly::zero(alpha.l());
    for (q, c) in f.terms() {
        acc = &acc + &(c * &hs_scalar_on(q, &alpha, side)?);
    }
    Ok(acc)
}

/// Evaluate a scalar at an integer point.
pub fn hs_value(q: &CosetMatrix, alpha: &ObjectLabel, mu: &[i64]) -> Result<Rational> {
    hs_scalar(q, alpha)?.eval_int(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{ivp_binomial, sign, AffineForm};
    use crate::schur::compose_interpolated;

    #[test]
    fn constant_term() {
        let a = ObjectLabel::parse(3, "L1,L2-1,L3+1").unwrap();
        let id = CosetMatrix::identity(&a);
        assert_eq!(hs_scalar(&id, &a).unwrap(), IVPoly::one(3));
    }

    #[test]
    fn two_row_formula() {
        let a = ObjectLabel::generic(2);
        for m in 0..=6i64 {
            let grid = [AffineForm::var(0, -m), AffineForm::constant(m), AffineForm::constant(m), AffineForm::var(1, -m)];
            let q = CosetMatrix::from_grid(2, 2, 2, &grid).unwrap();
            let expect = ivp_binomial(&AffineForm::var(1, 0), m as u64, 2).scale(&sign(m));
            assert_eq!(hs_scalar(&q, &a).unwrap(), expect, "m = {m}");
            assert_eq!(hs_scalar_on(&q, &a, Side::Right).unwrap(), expect);
        }
    }

    #[test]
    fn rejects_non_endomorphisms() {
        let a = ObjectLabel::generic(2);
        let q = CosetMatrix::parse("L1,1;0,L2-1").unwrap();
        assert!(hs_scalar(&q, &a).is_err());
        let ctx = HSContext::new(a.clone(), Side::Left, 1);
        let q = CosetMatrix::parse("L1-2,2;2,L2-2").unwrap();
        assert!(ctx.scalar(&q).is_err());
    }

    #[test]
    fn raising_then_lowering_acts_by_zero() {
        let e = Morphism::basis(CosetMatrix::parse("L1,1;0,L2-1").unwrap()).unwrap();
        let f = Morphism::basis(CosetMatrix::parse("L1,0;1,L2-1").unwrap()).unwrap();
        let fe = compose_interpolated(&f, &e).unwrap();
        assert!(hs_morphism_scalar(&fe, Side::Left).unwrap().is_zero());
        // e ∘ f on the same object acts by λ1 − λ2.
        let e2 = Morphism::basis(CosetMatrix::parse("L1-1,1;0,L2").unwrap()).unwrap();
        let f2 = Morphism::basis(CosetMatrix::parse("L1-1,0;1,L2").unwrap()).unwrap();
        let ef = compose_interpolated(&e2, &f2).unwrap();
        assert_eq!(hs_morphism_scalar(&ef, Side::Left).unwrap(), IVPoly::parse("L1 - L2", 2).unwrap());
    }
}
