//! Exact scalars and the ring of integer-valued polynomials in `L1..Ll`.
//!
//! Polynomials are kept in expanded monomial form with rational
//! coefficients.  Everything the engine builds from [`ivp_binomial`] and
//! [`symbolic_multinomial`] is integer valued on integer points.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{input, Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Ordinary binomial coefficient for integer `n` (possibly negative) and `k >= 0`.
pub fn binomial_int(n: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(n - i);
    }
    num / factorial(k)
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `nvars` variables with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IVPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl IVPoly {
    pub fn zero(nvars: usize) -> Self {
        IVPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, rat(c))
    }

    /// The variable `L{i+1}` (zero-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut m = Monomial::one(nvars);
        m.0[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(m, Rational::one());
        p
    }

    pub fn affine(nvars: usize, a: &AffineForm) -> Self {
        let c = Self::from_int(nvars, a.offset);
        match a.var {
            Some(i) => &Self::var(nvars, i) + &c,
            None => c,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from highest to lowest in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn checked_add(&self, other: &IVPoly) -> Result<IVPoly> {
        self.same_ring(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &IVPoly) -> Result<IVPoly> {
        self.same_ring(other)?;
        Ok(self * other)
    }

    fn same_ring(&self, other: &IVPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return input(format!(
                "variable count mismatch: {} vs {}",
                self.nvars, other.nvars
            ));
        }
        Ok(())
    }

    pub fn scale(&self, c: &Rational) -> IVPoly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        IVPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> IVPoly {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return input(format!(
                "evaluation point has length {}, expected {}",
                point.len(),
                self.nvars
            ));
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    pub fn eval_int(&self, point: &[i64]) -> Result<Rational> {
        let pt: Vec<Rational> = point.iter().map(|&x| rat(x)).collect();
        self.eval(&pt)
    }

    /// Substitute each variable by a polynomial (all in a common ring).
    pub fn substitute(&self, images: &[IVPoly]) -> Result<IVPoly> {
        if images.len() != self.nvars {
            return input("substitution arity mismatch");
        }
        let target = match images.first() {
            Some(p) => p.nvars,
            None => {
                let c = self.constant_value().unwrap_or_else(Rational::zero);
                return Ok(IVPoly::constant(0, c));
            }
        };
        if images.iter().any(|p| p.nvars != target) {
            return input("substitution images live in different rings");
        }
        let mut out = IVPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = IVPoly::constant(target, c.clone());
            for (img, &e) in images.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &img.pow(e);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-interpret in a ring with more variables (new ones appended).
    pub fn extend_vars(&self, nvars: usize) -> IVPoly {
        assert!(nvars >= self.nvars);
        IVPoly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(nvars, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// True when every value on the box `[lo, hi]^l` is an integer.
    pub fn integer_valued_on_box(&self, lo: i64, hi: i64) -> bool {
        let mut point = vec![lo; self.nvars];
        loop {
            if !self.eval_int(&point).map(|v| v.is_integer()).unwrap_or(false) {
                return false;
            }
            let mut k = 0;
            loop {
                if k == self.nvars {
                    return true;
                }
                if point[k] < hi {
                    point[k] += 1;
                    break;
                }
                point[k] = lo;
                k += 1;
            }
        }
    }

    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let mono = format_monomial(m, names);
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&a.to_string());
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }

    pub fn parse(s: &str, nvars: usize) -> Result<IVPoly> {
        let names = default_names(nvars);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::parse_with(s, nvars, &refs)
    }

    pub fn parse_with(s: &str, nvars: usize, names: &[&str]) -> Result<IVPoly> {
        if names.len() != nvars {
            return input("name list does not match variable count");
        }
        if s == "0" {
            return Ok(Self::zero(nvars));
        }
        let mut p = Self::zero(nvars);
        let mut tokens = s.split(' ');
        let first = tokens.next().unwrap_or("");
        let (neg, body) = match first.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, first),
        };
        let (m, c) = parse_term(body, names)?;
        p.add_term(m, if neg { -c } else { c });
        loop {
            let op = match tokens.next() {
                None => break,
                Some(op) => op,
            };
            let body = tokens
                .next()
                .ok_or_else(|| Error::Input(format!("dangling operator in {s:?}")))?;
            let (m, c) = parse_term(body, names)?;
            match op {
                "+" => p.add_term(m, c),
                "-" => p.add_term(m, -c),
                _ => return input(format!("bad operator {op:?} in {s:?}")),
            }
        }
        Ok(p)
    }
}

fn default_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("L{i}")).collect()
}

fn format_monomial(m: &Monomial, names: &[&str]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].to_string()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

fn parse_unsigned(s: &str) -> Result<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return input(format!("expected digits, got {s:?}"));
    }
    Ok(s.parse::<BigInt>().expect("digits"))
}

fn parse_term(body: &str, names: &[&str]) -> Result<(Monomial, Rational)> {
    if body.is_empty() {
        return input("empty term");
    }
    let mut factors = body.split('*').peekable();
    let mut coeff = Rational::one();
    let head = *factors.peek().unwrap();
    if head.starts_with(|c: char| c.is_ascii_digit()) {
        factors.next();
        coeff = match head.split_once('/') {
            Some((n, d)) => {
                let d = parse_unsigned(d)?;
                if d.is_zero() {
                    return input("zero denominator");
                }
                Rational::new(parse_unsigned(n)?, d)
            }
            None => Rational::from_integer(parse_unsigned(head)?),
        };
        if coeff.is_zero() {
            return input("zero coefficient in term");
        }
    }
    let mut mono = Monomial::one(names.len());
    let mut seen_var = false;
    for f in factors {
        let (name, exp) = match f.split_once('^') {
            Some((n, e)) => {
                let e = parse_unsigned(e)?
                    .to_u32()
                    .ok_or_else(|| Error::Input("exponent too large".into()))?;
                if e == 0 {
                    return input("zero exponent");
                }
                (n, e)
            }
            None => (f, 1),
        };
        let idx = names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Error::Input(format!("unknown variable {name:?}")))?;
        mono.0[idx] += exp;
        seen_var = true;
    }
    if !seen_var && head.is_empty() {
        return input("empty term");
    }
    Ok((mono, coeff))
}

impl fmt::Display for IVPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_string_with(&refs))
    }
}

impl Add for &IVPoly {
    type Output = IVPoly;
    fn add(self, other: &IVPoly) -> IVPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &IVPoly {
    type Output = IVPoly;
    fn sub(self, other: &IVPoly) -> IVPoly {
        self + &(-other)
    }
}

impl Neg for &IVPoly {
    type Output = IVPoly;
    fn neg(self) -> IVPoly {
        IVPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &IVPoly {
    type Output = IVPoly;
    fn mul(self, other: &IVPoly) -> IVPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = IVPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

/// `λ_i + offset` (when `var` is set, zero-based) or a plain integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineForm {
    pub var: Option<usize>,
    pub offset: i64,
}

impl AffineForm {
    pub fn constant(c: i64) -> Self {
        AffineForm { var: None, offset: c }
    }

    pub fn var(i: usize, offset: i64) -> Self {
        AffineForm { var: Some(i), offset }
    }

    pub fn is_symbolic(&self) -> bool {
        self.var.is_some()
    }

    pub fn shift(self, c: i64) -> Self {
        AffineForm { var: self.var, offset: self.offset + c }
    }

    pub fn to_poly(&self, nvars: usize) -> IVPoly {
        IVPoly::affine(nvars, self)
    }

    pub fn eval(&self, mu: &[i64]) -> i64 {
        match self.var {
            Some(i) => mu[i] + self.offset,
            None => self.offset,
        }
    }

    /// Difference `self - other` when it is a plain integer.
    pub fn concrete_diff(&self, other: &AffineForm) -> Option<i64> {
        (self.var == other.var).then(|| self.offset - other.offset)
    }

    pub fn parse(s: &str) -> Result<AffineForm> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('L') {
            let split = rest
                .find(['+', '-'])
                .unwrap_or(rest.len());
            let idx: usize = rest[..split]
                .parse()
                .map_err(|_| Error::Input(format!("bad variable in {s:?}")))?;
            if idx == 0 {
                return input("variables are numbered from L1");
            }
            let offset = if split == rest.len() {
                0
            } else {
                rest[split..]
                    .parse::<i64>()
                    .map_err(|_| Error::Input(format!("bad offset in {s:?}")))?
            };
            Ok(AffineForm::var(idx - 1, offset))
        } else {
            s.parse::<i64>()
                .map(AffineForm::constant)
                .map_err(|_| Error::Input(format!("bad entry {s:?}")))
        }
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.var {
            None => write!(f, "{}", self.offset),
            Some(i) if self.offset == 0 => write!(f, "L{}", i + 1),
            Some(i) => write!(f, "L{}{:+}", i + 1, self.offset),
        }
    }
}

pub fn ivp_add(a: &IVPoly, b: &IVPoly) -> Result<IVPoly> {
    a.checked_add(b)
}

pub fn ivp_mul(a: &IVPoly, b: &IVPoly) -> Result<IVPoly> {
    a.checked_mul(b)
}

pub fn ivp_eval(p: &IVPoly, mu: &[i64]) -> Result<Rational> {
    p.eval_int(mu)
}

/// `top (top-1) ... (top-k+1)`.
pub fn falling_factorial(top: &AffineForm, k: u64, nvars: usize) -> IVPoly {
    let mut acc = IVPoly::one(nvars);
    for i in 0..k as i64 {
        acc = &acc * &top.shift(-i).to_poly(nvars);
    }
    acc
}

pub fn ivp_binomial(top: &AffineForm, k: u64, nvars: usize) -> IVPoly {
    falling_factorial(top, k, nvars).scale(&Rational::new(BigInt::one(), factorial(k)))
}

/// `top! / (parts[0]! parts[1]! ...)` with at most one symbolic part.
pub fn symbolic_multinomial(top: &AffineForm, parts: &[AffineForm], nvars: usize) -> Result<IVPoly> {
    let symbolic: Vec<&AffineForm> = parts.iter().filter(|p| p.is_symbolic()).collect();
    if symbolic.len() > 1 {
        return input("more than one symbolic part in multinomial");
    }
    let mut denom = BigInt::one();
    let mut concrete_sum = 0i64;
    for p in parts.iter().filter(|p| !p.is_symbolic()) {
        if p.offset < 0 {
            return input(format!("negative concrete part {}", p.offset));
        }
        concrete_sum += p.offset;
        denom *= factorial(p.offset as u64);
    }
    let length = match (top.var, symbolic.first()) {
        (None, None) => {
            if concrete_sum != top.offset {
                return input("concrete parts do not sum to the top");
            }
            concrete_sum
        }
        (Some(v), Some(s)) => {
            if s.var != Some(v) {
                return input("symbolic part uses a different variable than the top");
            }
            if top.offset - s.offset != concrete_sum {
                return input("concrete parts do not sum to top minus symbolic part");
            }
            concrete_sum
        }
        (Some(_), None) => return input("symbolic top with only concrete parts"),
        (None, Some(_)) => return input("concrete top with a symbolic part"),
    };
    let ff = falling_factorial(top, length as u64, nvars);
    Ok(ff.scale(&Rational::new(BigInt::one(), denom)))
}

/// `(-1)^k` as a rational.
pub fn sign(k: i64) -> Rational {
    if k.is_even() {
        Rational::one()
    } else {
        -Rational::one()
    }
}
