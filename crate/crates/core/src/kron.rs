//! Symmetric-group characters, interpolated multiplicity spaces, stability
//! sequences, and the two-row Krull–Schmidt witness.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{enumerate_symbolic_matrices, partitions, CosetMatrix, Composition, ObjectLabel};
use crate::error::{input, Error, Result};
use crate::exact::{factorial, rat, IVPoly, Rational};
use crate::glpres::{apply_units, Maybe};
use crate::hsmod::{hs_scalar_on, Side};
use crate::linalg::rank;
use crate::schur::{compose_basis, compose_interpolated, module_action_blocks, tensor_blocks, Morphism};

/// Largest group size the character oracle accepts.
pub const ORACLE_MAX_N: usize = 16;

fn check_size(n: usize) -> Result<()> {
    if n > ORACLE_MAX_N {
        return Err(Error::Resource(format!("S_{n} exceeds the character oracle bound {ORACLE_MAX_N}")));
    }
    Ok(())
}

fn as_partition(p: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = p.iter().copied().filter(|&x| x > 0).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

fn is_partition(p: &[usize]) -> bool {
    p.windows(2).all(|w| w[0] >= w[1])
}

type CharKey = (Vec<usize>, Vec<usize>);

fn char_cache() -> &'static RwLock<HashMap<CharKey, i64>> {
    static CACHE: OnceLock<RwLock<HashMap<CharKey, i64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `χ^λ(ρ)` by border-strip removal on beta-numbers.
pub fn mn_character(lambda: &[usize], rho: &[usize]) -> Result<i64> {
    let lambda: Vec<usize> = lambda.iter().copied().filter(|&x| x > 0).collect();
    if !is_partition(&lambda) {
        return input(format!("{lambda:?} is not a partition"));
    }
    let n: usize = lambda.iter().sum();
    if n != rho.iter().sum::<usize>() {
        return input(format!("|{lambda:?}| differs from |{rho:?}|"));
    }
    check_size(n)?;
    Ok(mn_rec(lambda, as_partition(rho)))
}

fn mn_rec(lambda: Vec<usize>, rho: Vec<usize>) -> i64 {
    if rho.is_empty() {
        return 1;
    }
    let key = (lambda.clone(), rho.clone());
    if let Some(&v) = char_cache().read().unwrap().get(&key) {
        return v;
    }
    let k = lambda.len();
    // beta_i = λ_i + (k − 1 − i), strictly decreasing
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &x)| x + k - 1 - i).collect();
    let r = rho[0];
    let rest = rho[1..].to_vec();
    let mut total = 0;
    for i in 0..k {
        if beta[i] < r || beta.contains(&(beta[i] - r)) {
            continue;
        }
        let nb = beta[i] - r;
        let between = beta.iter().filter(|&&b| b > nb && b < beta[i]).count();
        let mut new_beta = beta.clone();
        new_beta[i] = nb;
        new_beta.sort_unstable_by(|a, b| b.cmp(a));
        let new_lambda: Vec<usize> = new_beta
            .iter()
            .enumerate()
            .map(|(j, &b)| b - (k - 1 - j))
            .filter(|&x| x > 0)
            .collect();
        let s = if between % 2 == 0 { 1 } else { -1 };
        total += s * mn_rec(new_lambda, rest.clone());
    }
    char_cache().write().unwrap().insert(key, total);
    total
}

/// `n! / z_ρ`.
pub fn class_size(rho: &[usize]) -> BigInt {
    let n: usize = rho.iter().sum();
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &r in rho.iter().filter(|&&r| r > 0) {
        *counts.entry(r).or_default() += 1;
    }
    let mut z = BigInt::one();
    for (&i, &m) in &counts {
        z *= BigInt::from(i).pow(m as u32) * factorial(m);
    }
    factorial(n as u64) / z
}

fn partition_list(n: usize) -> Vec<Vec<usize>> {
    partitions(n as i64)
        .into_iter()
        .map(|c| c.parts().iter().map(|&x| x as usize).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterTable {
    pub n: usize,
    pub partitions: Vec<Vec<usize>>,
    /// `(λ, ρ) ↦ χ^λ(ρ)`.
    pub values: BTreeMap<(Vec<usize>, Vec<usize>), i64>,
}

impl CharacterTable {
    pub fn build(n: usize) -> Result<Self> {
        check_size(n)?;
        let parts = partition_list(n);
        let mut values = BTreeMap::new();
        for l in &parts {
            for r in &parts {
                values.insert((l.clone(), r.clone()), mn_character(l, r)?);
            }
        }
        Ok(CharacterTable { n, partitions: parts, values })
    }

    pub fn get(&self, lambda: &[usize], rho: &[usize]) -> i64 {
        self.values[&(lambda.to_vec(), rho.to_vec())]
    }
}

/// Permutation character of `M^μ` at cycle type `ρ`: ways to distribute the
/// cycles among the parts of `μ`.
pub fn perm_character(mu: &[usize], rho: &[usize]) -> BigInt {
    let mut memo: HashMap<(usize, Vec<usize>), BigInt> = HashMap::new();
    fn go(i: usize, rem: Vec<usize>, rho: &[usize], memo: &mut HashMap<(usize, Vec<usize>), BigInt>) -> BigInt {
        if i == rho.len() {
            return if rem.iter().all(|&x| x == 0) { BigInt::one() } else { BigInt::zero() };
        }
        if let Some(v) = memo.get(&(i, rem.clone())) {
            return v.clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..rem.len() {
            if rem[j] >= rho[i] {
                let mut next = rem.clone();
                next[j] -= rho[i];
                acc += go(i + 1, next, rho, memo);
            }
        }
        memo.insert((i, rem), acc.clone());
        acc
    }
    go(0, mu.to_vec(), rho, &mut memo)
}

/// `(1/n!) Σ_ρ |C_ρ| f(ρ)`.
fn class_average(n: usize, f: impl Fn(&[usize]) -> Result<BigInt>) -> Result<BigInt> {
    let mut acc = BigInt::zero();
    for rho in partition_list(n) {
        acc += class_size(&rho) * f(&rho)?;
    }
    let nf = factorial(n as u64);
    if !(&acc % &nf).is_zero() {
        return Err(Error::Verification("class average is not an integer".into()));
    }
    Ok(acc / nf)
}

fn to_i64(v: BigInt) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::Resource("value overflows i64".into()))
}

/// Multiplicity of `S^λ` in `M^μ` (`μ` any composition).
pub fn kostka(lambda: &[usize], mu: &[usize]) -> Result<i64> {
    let n: usize = lambda.iter().sum();
    if n != mu.iter().sum::<usize>() {
        return input("kostka needs equal sizes");
    }
    check_size(n)?;
    to_i64(class_average(n, |rho| Ok(BigInt::from(mn_character(lambda, rho)?) * perm_character(mu, rho)))?)
}

pub fn kronecker(a: &[usize], b: &[usize], c: &[usize]) -> Result<i64> {
    let n: usize = a.iter().sum();
    if n != b.iter().sum::<usize>() || n != c.iter().sum::<usize>() {
        return input("kronecker needs equal sizes");
    }
    check_size(n)?;
    to_i64(class_average(n, |rho| {
        Ok(BigInt::from(mn_character(a, rho)? * mn_character(b, rho)? * mn_character(c, rho)?))
    })?)
}

/// Object of the one-parameter category that acts on `C_λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XSpec {
    /// `M^{(|λ|)}`.
    Unit,
    /// `M^ν` for a one-parameter label such as `(|λ|−1, 1)`.
    Perm(ObjectLabel),
    /// Complement of the unit inside `M^{(|λ|−1,1)}`.
    Standard,
}

impl XSpec {
    /// `unit`, `std`, or `perm:<label>` with `|L|` for the total parameter.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "unit" => Ok(XSpec::Unit),
            "std" => Ok(XSpec::Standard),
            other => match other.strip_prefix("perm:") {
                Some(label) => {
                    let label = label.replace("|L|", "L1");
                    Ok(XSpec::Perm(ObjectLabel::parse(1, &label)?))
                }
                None => input(format!("unknown object {other:?}; expected unit, std, or perm:<label>")),
            },
        }
    }

    /// Underlying permutation object.
    pub fn object(&self) -> ObjectLabel {
        match self {
            XSpec::Unit => ObjectLabel::generic(1),
            XSpec::Perm(l) => l.clone(),
            XSpec::Standard => ObjectLabel::parse(1, "L1-1,1").expect("valid label"),
        }
    }

    /// Character value of the specialization at `S_n`.
    fn character(&self, n: usize, rho: &[usize]) -> Result<Option<BigInt>> {
        match self {
            XSpec::Unit => Ok(Some(BigInt::one())),
            XSpec::Standard => {
                if n == 0 {
                    return Ok(None);
                }
                Ok(Some(perm_character(&[n - 1, 1], rho) - 1))
            }
            XSpec::Perm(l) => match l.specialize(&[n as i64])? {
                Some(c) => {
                    let parts: Vec<usize> = c.parts().iter().map(|&x| x as usize).collect();
                    Ok(Some(perm_character(&parts, rho)))
                }
                None => Ok(None),
            },
        }
    }
}

impl fmt::Display for XSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XSpec::Unit => f.write_str("unit"),
            XSpec::Standard => f.write_str("std"),
            XSpec::Perm(l) => write!(f, "perm:{}", l.to_string().replace("L1", "|L|")),
        }
    }
}

/// `dim Hom_{S_n}(S^α, F(X) ⊗ S^β)` from characters; `None` if `X` does not
/// specialize at this size.
pub fn oracle_multiplicity(alpha: &[usize], beta: &[usize], x: &XSpec) -> Result<Option<i64>> {
    let n: usize = alpha.iter().sum();
    if n != beta.iter().sum::<usize>() {
        return input("α and β have different sizes");
    }
    check_size(n)?;
    if x.character(n, &vec![1; n])?.is_none() {
        return Ok(None);
    }
    let v = class_average(n, |rho| {
        let cx = x.character(n, rho)?.expect("checked above");
        Ok(BigInt::from(mn_character(alpha, rho)? * mn_character(beta, rho)?) * cx)
    })?;
    to_i64(v).map(Some)
}

/// Truncation and evaluation settings for [`multiplicity_dim`].
#[derive(Clone, Debug)]
pub struct MultiplicityParams {
    pub start_degree: i64,
    pub max_degree: i64,
    pub points: [Vec<i64>; 2],
}

impl MultiplicityParams {
    /// Two points with distinct entries in `[10^3, 10^6]`.
    pub fn seeded(l: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut point = || {
            let mut v: Vec<i64> = Vec::with_capacity(l);
            while v.len() < l {
                let x = rng.gen_range(1_000..=1_000_000);
                if !v.contains(&x) {
                    v.push(x);
                }
            }
            v
        };
        let a = point();
        let b = point();
        MultiplicityParams { start_degree: 0, max_degree: 8, points: [a, b] }
    }
}

/// Truncated quotient dimension at one point and one degree bound.
pub fn multiplicity_at(alpha: &ObjectLabel, beta: &ObjectLabel, x: &XSpec, degree: i64, point: &[i64]) -> Result<usize> {
    let l = alpha.l();
    if beta.l() != l || point.len() != l {
        return input("α, β and the evaluation point must share the parameter count");
    }
    let pt: Vec<Rational> = point.iter().map(|&v| rat(v)).collect();
    let total: Rational = pt.iter().sum();
    let obj = x.object();
    let blocks = tensor_blocks(&obj, beta)?;
    let gammas: Vec<ObjectLabel> = blocks.iter().map(|b| b.label(l)).collect::<Result<_>>()?;

    let mut index: HashMap<(usize, CosetMatrix), usize> = HashMap::new();
    let mut slot = |key: (usize, CosetMatrix)| -> usize {
        let n = index.len();
        *index.entry(key).or_insert(n)
    };
    type Sparse = Vec<(usize, Rational)>;
    let mut basis: Vec<(usize, CosetMatrix)> = Vec::new();
    for (t, g) in gammas.iter().enumerate() {
        for q in enumerate_symbolic_matrices(alpha, g, degree)? {
            basis.push((t, q));
        }
    }
    for b in &basis {
        slot(b.clone());
    }
    let mut relations: Vec<Sparse> = Vec::new();

    // h ∘ g ≡ χ(g) h for g ∈ End(M^α).
    let id_alpha = CosetMatrix::identity(alpha);
    let end_alpha: Vec<CosetMatrix> = enumerate_symbolic_matrices(alpha, alpha, degree)?
        .into_iter()
        .filter(|p| *p != id_alpha)
        .collect();
    for p in &end_alpha {
        let chi = hs_scalar_on(p, alpha, Side::Left)?.eval(&pt)?;
        for (t, q) in &basis {
            let mut row: Sparse = vec![(slot((*t, q.clone())), -chi.clone())];
            for (r, c) in compose_basis(q, p)?.iter() {
                row.push((slot((*t, r.clone())), c.eval(&pt)?));
            }
            relations.push(row);
        }
    }

    // (1 ⊗ g) ∘ h ≡ χ(g) h for g ∈ End(M^β).
    let id_beta = CosetMatrix::identity(beta);
    let id_x = Morphism::identity(&obj);
    for p in enumerate_symbolic_matrices(beta, beta, degree)? {
        if p == id_beta {
            continue;
        }
        let chi = hs_scalar_on(&p, beta, Side::Right)?.eval(&pt)?;
        let bm = module_action_blocks(&id_x, &Morphism::basis(p)?)?;
        for (s, q) in &basis {
            let mut row: Sparse = vec![(slot((*s, q.clone())), -chi.clone())];
            push_block_image(&bm, *s, q, &pt, &gammas, &mut row, &mut slot)?;
            relations.push(row);
        }
    }

    // Spanning vectors of the summand.
    let mut targets: Vec<Sparse> = Vec::new();
    match x {
        XSpec::Standard => {
            if total.is_zero() {
                return Err(Error::GenericPoint("|λ| vanishes at the evaluation point".into()));
            }
            let incl = Morphism::basis(CosetMatrix::parse("L1-1;1")?)?;
            let proj = Morphism::basis(CosetMatrix::parse("L1-1,1")?)?;
            let j = compose_interpolated(&incl, &proj)?;
            let bm = module_action_blocks(&j, &Morphism::identity(beta))?;
            let inv = Rational::one() / total.clone();
            for (s, q) in &basis {
                let mut img: Sparse = Vec::new();
                push_block_image(&bm, *s, q, &pt, &gammas, &mut img, &mut slot)?;
                let mut row: Sparse = vec![(slot((*s, q.clone())), Rational::one())];
                row.extend(img.into_iter().map(|(k, v)| (k, -(v * &inv))));
                targets.push(row);
            }
        }
        _ => {
            for b in &basis {
                targets.push(vec![(slot(b.clone()), Rational::one())]);
            }
        }
    }

    let width = index.len();
    let dense = |rows: &[Sparse]| -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| {
                let mut v = vec![Rational::zero(); width];
                for (k, c) in r {
                    v[*k] += c;
                }
                v
            })
            .collect()
    };
    let rel = dense(&relations);
    let r0 = rank(rel.clone());
    let mut all = rel;
    all.extend(dense(&targets));
    Ok(rank(all) - r0)
}

fn push_block_image(
    bm: &crate::schur::BlockMap,
    s: usize,
    q: &CosetMatrix,
    pt: &[Rational],
    gammas: &[ObjectLabel],
    row: &mut Vec<(usize, Rational)>,
    slot: &mut impl FnMut((usize, CosetMatrix)) -> usize,
) -> Result<()> {
    let h = Morphism::basis(q.clone())?;
    for ((src, tgt), m) in &bm.blocks {
        if *src != s {
            continue;
        }
        let t = *tgt;
        if gammas.get(t) != Some(&bm.targets[t].label(gammas[0].l())?) {
            return Err(Error::Verification("tensor block order changed between enumerations".into()));
        }
        for (r, c) in compose_interpolated(m, &h)?.evaluate(pt)? {
            row.push((slot((t, r)), c));
        }
    }
    Ok(())
}

/// Quotient dimension, raising the degree bound until two consecutive values
/// agree, at both points.
pub fn multiplicity_dim(alpha: &ObjectLabel, beta: &ObjectLabel, x: &XSpec, params: &MultiplicityParams) -> Result<usize> {
    let mut values = Vec::new();
    for point in &params.points {
        let mut prev: Option<usize> = None;
        let mut found = None;
        for d in params.start_degree..=params.max_degree {
            let v = multiplicity_at(alpha, beta, x, d, point)?;
            if prev == Some(v) {
                found = Some(v);
                break;
            }
            prev = Some(v);
        }
        match found {
            Some(v) => values.push(v),
            None => {
                return Err(Error::Resource(format!(
                    "no stabilization up to degree {} at {point:?}",
                    params.max_degree
                )))
            }
        }
    }
    if values[0] != values[1] {
        return Err(Error::GenericPoint(format!(
            "points {:?} and {:?} give {} and {}",
            params.points[0], params.points[1], values[0], values[1]
        )));
    }
    Ok(values[0])
}

/// Offsets applied to `λ = mμ0` for `α` and `β`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelOffsets {
    pub sigma_alpha: Vec<i64>,
    pub tau_alpha: Vec<i64>,
    pub sigma_beta: Vec<i64>,
    pub tau_beta: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub mu0: Vec<usize>,
    pub offsets: LabelOffsets,
    pub x: String,
    /// `(m, n, dimension)`.
    pub sequence: Vec<(usize, usize, i64)>,
    pub stabilized: bool,
    pub limit: Option<i64>,
    pub interpolated_dim: Option<i64>,
    pub warnings: Vec<String>,
}

impl StabilityReport {
    pub fn matches(&self) -> bool {
        self.stabilized && self.limit.is_some() && self.limit == self.interpolated_dim
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,group_size,dimension,stabilized_flag\n");
        for (m, n, d) in &self.sequence {
            let _ = writeln!(out, "{m},{n},{d},{}", u8::from(self.stabilized));
        }
        out
    }
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "# warning: {w}")?;
        }
        writeln!(f, "# mu0={:?} x={} offsets={:?}", self.mu0, self.x, self.offsets)?;
        f.write_str(&self.to_csv())?;
        let show = |v: Option<i64>| v.map_or("none".to_string(), |v| v.to_string());
        writeln!(f, "# limit={} interpolated={}", show(self.limit), show(self.interpolated_dim))
    }
}

fn labels_for(mu0: &[usize], offsets: &LabelOffsets) -> Result<(ObjectLabel, ObjectLabel)> {
    let l = mu0.len();
    let pad = |s: &[i64]| {
        let mut v = s.to_vec();
        v.resize(l, 0);
        v
    };
    let a = ObjectLabel::new(pad(&offsets.sigma_alpha), Composition::new(offsets.tau_alpha.clone())?)?;
    let b = ObjectLabel::new(pad(&offsets.sigma_beta), Composition::new(offsets.tau_beta.clone())?)?;
    if offsets.sigma_alpha.len() > l || offsets.sigma_beta.len() > l {
        return input("more offsets than parts of μ0");
    }
    Ok((a, b))
}

/// Character-oracle dimensions along `λ = mμ0`, compared with the
/// interpolated dimension.
pub fn stability_check(
    mu0: &[usize],
    offsets: &LabelOffsets,
    x: &XSpec,
    m_range: std::ops::RangeInclusive<usize>,
    params: &MultiplicityParams,
) -> Result<StabilityReport> {
    let mu0 = as_partition(mu0);
    if mu0.is_empty() {
        return input("μ0 must be nonempty");
    }
    let (alpha, beta) = labels_for(&mu0, offsets)?;
    let size: usize = mu0.iter().sum();
    let mut warnings = Vec::new();
    let mut sequence = Vec::new();
    for m in m_range.clone() {
        let n = m * size;
        if n > ORACLE_MAX_N {
            warnings.push(format!("range truncated at m = {}: S_{n} exceeds the oracle bound", m - 1));
            break;
        }
        let lam: Vec<i64> = mu0.iter().map(|&p| (p * m) as i64).collect();
        let (Some(a), Some(b)) = (alpha.specialize(&lam)?, beta.specialize(&lam)?) else {
            continue;
        };
        if !a.is_partition() || !b.is_partition() {
            continue;
        }
        let a: Vec<usize> = a.parts().iter().map(|&v| v as usize).collect();
        let b: Vec<usize> = b.parts().iter().map(|&v| v as usize).collect();
        if let Some(d) = oracle_multiplicity(&a, &b, x)? {
            sequence.push((m, n, d));
        }
    }
    let stabilized = sequence.len() >= 3 && {
        let k = sequence.len();
        sequence[k - 1].2 == sequence[k - 2].2 && sequence[k - 2].2 == sequence[k - 3].2
    };
    let limit = stabilized.then(|| sequence.last().unwrap().2);
    let params = MultiplicityParams { points: params.points.clone(), ..params.clone() };
    let params = if params.points[0].len() == mu0.len() {
        params
    } else {
        return input("evaluation points must have one entry per part of μ0");
    };
    let interpolated_dim = Some(multiplicity_dim(&alpha, &beta, x, &params)? as i64);
    Ok(StabilityReport {
        mu0,
        offsets: offsets.clone(),
        x: x.to_string(),
        sequence,
        stabilized,
        limit,
        interpolated_dim,
        warnings,
    })
}

/// Engine relations and the 2×2 model of `End(M^{(λ1,λ2,1)})`.
#[derive(Clone, Debug)]
pub struct KrullSchmidtReport {
    pub lambda: (Rational, Rational),
    /// `(name, engine scalar, matches λ2+1, matches λ1+1)`.
    pub relations: Vec<(String, Rational, bool, bool)>,
    pub idempotents_ok: bool,
    pub lines_preserved: bool,
    /// Action `(at P = 0, at P = −(λ1+1)(λ2+1))` of each idempotent and its complement.
    pub classes: Vec<(String, Rational, Rational)>,
    pub distinct_classes: usize,
    pub text: String,
}

impl KrullSchmidtReport {
    pub fn fails_krull_schmidt(&self) -> bool {
        self.distinct_classes >= 2
    }

    pub fn verified(&self) -> bool {
        self.relations.iter().all(|r| r.2 || r.3) && self.idempotents_ok && self.lines_preserved && self.fails_krull_schmidt()
    }
}

type Mat2 = [[Rational; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out: Mat2 = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        }
    }
    out
}

fn apply(a: &Mat2, v: &[Rational; 2]) -> [Rational; 2] {
    [&a[0][0] * &v[0] + &a[0][1] * &v[1], &a[1][0] * &v[0] + &a[1][1] * &v[1]]
}

/// Scalar `c` with `a·v = c v`, if `v` spans an invariant line of `a`.
fn eigen_scalar(a: &Mat2, v: &[Rational; 2]) -> Option<Rational> {
    let w = apply(a, v);
    let k = if !v[0].is_zero() { 0 } else { 1 };
    let c = &w[k] / &v[k];
    (w[0] == &c * &v[0] && w[1] == &c * &v[1]).then_some(c)
}

fn engine_scalar(x: &Morphism, sq: &Morphism, point: &[Rational]) -> Result<Rational> {
    let xv = x.evaluate(point)?;
    let sv = sq.evaluate(point)?;
    let (q, c) = xv.iter().next().ok_or_else(|| Error::Degenerate("element vanishes at this point".into()))?;
    let s = sv.get(q).cloned().unwrap_or_else(Rational::zero) / c;
    for (q, c) in &xv {
        if sv.get(q).cloned().unwrap_or_else(Rational::zero) != &s * c {
            return Err(Error::Verification(format!("square is not a multiple of the element at {q}")));
        }
    }
    if sv.keys().any(|q| !xv.contains_key(q)) {
        return Err(Error::Verification("square has terms outside the element".into()));
    }
    Ok(s)
}

/// Witness that `M^{(λ1,λ2,1)}` in `C_{(λ1+1,λ2)}` splits in inequivalent ways.
pub fn krull_schmidt_report(l1: Rational, l2: Rational) -> Result<KrullSchmidtReport> {
    let one = Rational::one();
    let a = &l1 + &one;
    let b = &l2 + &one;
    if l1 == l2 || a.is_zero() || b.is_zero() {
        return Err(Error::Degenerate(format!("λ1 = {l1}, λ2 = {l2} hit λ1 = λ2, λ1 = −1 or λ2 = −1")));
    }
    let mut text = String::new();
    // The object (λ1, λ2, 1) is (L1 − 1, L2, 1) over (L1, L2) = (λ1 + 1, λ2).
    let beta = ObjectLabel::parse(2, "L1-1,L2,1")?;
    let point = [a.clone(), l2.clone()];
    let lam2_plus = IVPoly::parse("L2 + 1", 2)?;
    let lam1_plus = IVPoly::parse("L1", 2)?;
    let mut relations = Vec::new();
    for (name, word) in [("E32 E23", [(3, 2), (2, 3)]), ("E31 E13", [(3, 1), (1, 3)])] {
        let x: Maybe = apply_units(&word, &beta)?;
        let x = x.ok_or_else(|| Error::Verification(format!("{name} vanishes")))?;
        let sq = compose_interpolated(&x, &x)?;
        let m2 = sq.sub(&x.scale(&lam2_plus))?.is_zero();
        let m1 = sq.sub(&x.scale(&lam1_plus))?.is_zero();
        let s = engine_scalar(&x, &sq, &point)?;
        let reading = match (m2, m1) {
            (true, _) => "λ2+1",
            (_, true) => "λ1+1",
            _ => "neither",
        };
        let _ = writeln!(text, "({name})^2 = {s} ({name}); engine scalar is {reading}");
        relations.push((name.to_string(), s, m2, m1));
    }
    let confirms_step1 = relations[0].2 && relations[1].3;
    let _ = writeln!(
        text,
        "E32 E23 normalizes by λ2+1 and E31 E13 by λ1+1: {}",
        if confirms_step1 { "confirmed" } else { "not confirmed" }
    );
    let _ = writeln!(
        text,
        "model matrix [[λ2+1, r], [0, 0]] squares with λ2+1, so it represents E32 E23; [[0, 0], [λ1-λ2+r, λ1+1]] represents E31 E13"
    );

    let p_of = |r: &Rational| r * &(&l1 - &l2 + r) - &a * &b;
    let first = |_: &Rational| -> Mat2 { [[one.clone(), &one / &b], [Rational::zero(), Rational::zero()]] };
    let second = |p: &Rational| -> Mat2 { [[Rational::zero(), Rational::zero()], [(p + &a * &b) / &a, one.clone()]] };
    let mut idempotents_ok = true;
    for k in 1..=20i64 {
        let r = rat(k);
        let p = p_of(&r);
        for e in [first(&p), second(&p)] {
            idempotents_ok &= mat_mul(&e, &e) == e;
        }
    }
    let _ = writeln!(text, "model idempotents square to themselves at r = 1..20: {idempotents_ok}");

    let p0 = Rational::zero();
    let p1 = -(&a * &b);
    let v0 = [-one.clone(), b.clone()];
    let v1 = [one.clone(), Rational::zero()];
    // Generators in the rescaled basis.
    let gens = |p: &Rational| -> Vec<Mat2> {
        let z = Rational::zero;
        vec![
            [[b.clone(), one.clone()], [z(), z()]],
            [[z(), z()], [p + &a * &b, a.clone()]],
            [[p.clone(), z()], [z(), z()]],
            [[z(), z()], [z(), p.clone()]],
        ]
    };
    let lines_preserved = gens(&p0).iter().all(|g| eigen_scalar(g, &v0).is_some())
        && gens(&p1).iter().all(|g| eigen_scalar(g, &v1).is_some());
    let _ = writeln!(text, "generators preserve (-1, λ2+1) at P = 0 and (1, 0) at P = -(λ1+1)(λ2+1): {lines_preserved}");

    let ident: Mat2 = [[one.clone(), Rational::zero()], [Rational::zero(), one.clone()]];
    let complement = |e: &Mat2| -> Mat2 {
        let mut c = ident.clone();
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] -= &e[i][j];
            }
        }
        c
    };
    let mut classes = Vec::new();
    for (name, build) in [("e1", &first as &dyn Fn(&Rational) -> Mat2), ("e2", &second)] {
        for (suffix, comp) in [("", false), ("1-", true)] {
            let at = |p: &Rational| {
                let e = build(p);
                if comp {
                    complement(&e)
                } else {
                    e
                }
            };
            let c0 = eigen_scalar(&at(&p0), &v0).ok_or_else(|| Error::Verification("line at P = 0 not preserved".into()))?;
            let c1 = eigen_scalar(&at(&p1), &v1).ok_or_else(|| Error::Verification("line at P = -(λ1+1)(λ2+1) not preserved".into()))?;
            let label = format!("{suffix}{name}");
            let _ = writeln!(text, "{label}: acts by {c0} at P = 0 and by {c1} at P = -(λ1+1)(λ2+1)");
            classes.push((label, c0, c1));
        }
    }
    let mut seen: Vec<(Rational, Rational)> = classes.iter().map(|c| (c.1.clone(), c.2.clone())).collect();
    seen.sort();
    seen.dedup();
    let distinct_classes = seen.len();
    let _ = writeln!(text, "nonconjugate rank-1 idempotent classes: {distinct_classes}");
    let _ = writeln!(
        text,
        "verdict: {}",
        if distinct_classes >= 2 { "Krull–Schmidt fails" } else { "no failure detected" }
    );
    Ok(KrullSchmidtReport {
        lambda: (l1, l2),
        relations,
        idempotents_ok,
        lines_preserved,
        classes,
        distinct_classes,
        text,
    })
}

/// Sign of a cycle type.
pub fn cycle_sign(rho: &[usize]) -> i64 {
    if rho.iter().filter(|&&r| r > 0 && r % 2 == 0).count() % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characters_basic() {
        for n in 1..=6 {
            for rho in partition_list(n) {
                assert_eq!(mn_character(&[n], &rho).unwrap(), 1);
                assert_eq!(mn_character(&vec![1; n], &rho).unwrap(), cycle_sign(&rho));
            }
        }
        assert_eq!(mn_character(&[2, 1], &[1, 1, 1]).unwrap(), 2);
        assert_eq!(mn_character(&[2, 1], &[2, 1]).unwrap(), 0);
        assert_eq!(mn_character(&[2, 1], &[3]).unwrap(), -1);
        assert!(mn_character(&[2, 1], &[2]).is_err());
        assert!(mn_character(&[17], &[17]).is_err());
    }

    #[test]
    fn kostka_and_kronecker() {
        assert_eq!(kostka(&[3, 1], &[3, 1]).unwrap(), 1);
        assert_eq!(kostka(&[2, 2], &[3, 1]).unwrap(), 0);
        assert_eq!(kostka(&[2, 1], &[1, 1, 1]).unwrap(), 2);
        assert_eq!(kronecker(&[2, 1], &[2, 1], &[2, 1]).unwrap(), 1);
        assert_eq!(kronecker(&[3], &[2, 1], &[2, 1]).unwrap(), 1);
    }

    #[test]
    fn unit_multiplicity_is_one() {
        let lam = ObjectLabel::generic(2);
        let p = MultiplicityParams::seeded(2, 1);
        assert_eq!(multiplicity_dim(&lam, &lam, &XSpec::Unit, &p).unwrap(), 1);
    }

    #[test]
    fn standard_two_row() {
        let lam = ObjectLabel::generic(2);
        let p = MultiplicityParams::seeded(2, 2);
        let perm = XSpec::parse("perm:|L|-1,1").unwrap();
        assert_eq!(multiplicity_dim(&lam, &lam, &perm, &p).unwrap(), 2);
        assert_eq!(multiplicity_dim(&lam, &lam, &XSpec::Standard, &p).unwrap(), 1);
        assert_eq!(oracle_multiplicity(&[4, 2], &[4, 2], &perm).unwrap(), Some(2));
    }

    #[test]
    fn krull_schmidt_at_seven_four() {
        let r = krull_schmidt_report(rat(7), rat(4)).unwrap();
        assert!(r.verified(), "{}", r.text);
        assert!(r.relations[0].2 && !r.relations[0].3);
        assert!(r.relations[1].3 && !r.relations[1].2);
        assert_eq!(r.distinct_classes, 4);
        assert!(matches!(krull_schmidt_report(rat(3), rat(3)), Err(Error::Degenerate(_))));
    }
}
