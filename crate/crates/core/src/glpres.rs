//! Chevalley generators, divided powers, and matrix units realized as ξ
//! morphisms, with checkers for the defining relations.
//!
//! Indices are 1-based as in `e_1, f_1, E_12`.  A value of `None` stands for
//! the zero morphism (some intermediate object left `T_λ`).

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::combinatorics::{CosetMatrix, ObjectLabel};
use crate::error::{input, Result};
use crate::exact::{ivp_binomial, sign, AffineForm, IVPoly, Rational};
use crate::schur::{compose_interpolated, module_action_blocks, BlockMap, Morphism, TensorBlock};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    Raising,
    Lowering,
}

/// `e_i^m / m!` or `f_i^m / m!`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GlGenerator {
    pub kind: GenKind,
    pub index: usize,
    pub power: u32,
}

impl GlGenerator {
    pub fn e(index: usize) -> Self {
        GlGenerator { kind: GenKind::Raising, index, power: 1 }
    }

    pub fn f(index: usize) -> Self {
        GlGenerator { kind: GenKind::Lowering, index, power: 1 }
    }

    pub fn pow(self, power: u32) -> Self {
        GlGenerator { power, ..self }
    }

    /// Matrix-unit form `(i, j)`: raising `e_k` is `E_{k,k+1}`.
    pub fn as_unit(&self) -> (usize, usize) {
        match self.kind {
            GenKind::Raising => (self.index, self.index + 1),
            GenKind::Lowering => (self.index + 1, self.index),
        }
    }
}

/// Possibly-zero morphism.
pub type Maybe = Option<Morphism>;

fn nonzero(m: Morphism) -> Maybe {
    (!m.is_zero()).then_some(m)
}

fn check_index(i: usize) -> Result<()> {
    if i == 0 {
        return input("generator indices start at 1");
    }
    Ok(())
}

/// `β + m(ε_i − ε_j)` (1-based), or `None` if a concrete entry goes negative.
pub fn shift_label(beta: &ObjectLabel, i: usize, j: usize, m: i64) -> Result<Option<ObjectLabel>> {
    check_index(i)?;
    check_index(j)?;
    let n = beta.len().max(i).max(j);
    let mut entries: Vec<AffineForm> = (0..n).map(|k| beta.entry(k)).collect();
    entries[i - 1] = entries[i - 1].shift(m);
    entries[j - 1] = entries[j - 1].shift(-m);
    if entries.iter().any(|e| !e.is_symbolic() && e.offset < 0) {
        return Ok(None);
    }
    ObjectLabel::from_entries(beta.l(), &entries).map(Some)
}

/// Single off-diagonal entry `m` at `(i, j)` on top of the diagonal of `β`:
/// the divided power `E_ij^m / m!` applied at `β`.
pub fn matrix_unit_closed_form(i: usize, j: usize, m: u32, beta: &ObjectLabel) -> Result<Maybe> {
    check_index(i)?;
    check_index(j)?;
    if i == j {
        return input("matrix units need i ≠ j");
    }
    let n = beta.len().max(i).max(j);
    let mut grid = vec![AffineForm::constant(0); n * n];
    for k in 0..n {
        grid[k * n + k] = beta.entry(k);
    }
    let (i, j) = (i - 1, j - 1);
    grid[i * n + j] = AffineForm::constant(m as i64);
    let d = beta.entry(j).shift(-(m as i64));
    if !d.is_symbolic() && d.offset < 0 {
        return Ok(None);
    }
    grid[j * n + j] = d;
    Ok(Some(Morphism::basis(CosetMatrix::from_grid(beta.l(), n, n, &grid)?)?))
}

/// Image of a generator at `β`.
pub fn generator_to_xi(g: &GlGenerator, beta: &ObjectLabel) -> Result<Maybe> {
    let (i, j) = g.as_unit();
    matrix_unit_closed_form(i, j, g.power, beta)
}

/// `X ∘ Y` for possibly-zero morphisms.
pub fn compose_maybe(x: &Maybe, y: &Maybe) -> Result<Maybe> {
    match (x, y) {
        (Some(a), Some(b)) => Ok(nonzero(compose_interpolated(a, b)?)),
        _ => Ok(None),
    }
}

pub fn add_maybe(x: &Maybe, y: &Maybe) -> Result<Maybe> {
    match (x, y) {
        (Some(a), Some(b)) => Ok(nonzero(a.add(b)?)),
        (Some(a), None) | (None, Some(a)) => Ok(Some(a.clone())),
        (None, None) => Ok(None),
    }
}

pub fn scale_maybe(x: &Maybe, c: &IVPoly) -> Maybe {
    x.as_ref().and_then(|m| nonzero(m.scale(c)))
}

pub fn sub_maybe(x: &Maybe, y: &Maybe) -> Result<Maybe> {
    let neg = y.as_ref().map(|m| m.scale_rational(&Rational::from_integer((-1).into())));
    add_maybe(x, &neg)
}

fn codomain_of(m: &Maybe) -> Option<ObjectLabel> {
    m.as_ref().map(|m| m.codomain().clone())
}

type UnitKey = (usize, usize, ObjectLabel);

fn unit_cache() -> &'static RwLock<HashMap<UnitKey, Maybe>> {
    static CACHE: OnceLock<RwLock<HashMap<UnitKey, Maybe>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `E_ij 1_β` built from Chevalley generators by iterated commutators.
pub fn matrix_unit(i: usize, j: usize, beta: &ObjectLabel) -> Result<Maybe> {
    check_index(i)?;
    check_index(j)?;
    if i == j {
        return input("matrix units need i ≠ j");
    }
    if i.abs_diff(j) == 1 {
        return matrix_unit_closed_form(i, j, 1, beta);
    }
    let key = (i, j, beta.clone());
    if let Some(hit) = unit_cache().read().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    // [E_{i,j-1}, E_{j-1,j}] for i < j, [E_{i,i-1}, E_{i-1,j}] for i > j.
    let (a, b) = if i < j { ((i, j - 1), (j - 1, j)) } else { ((i, i - 1), (i - 1, j)) };
    let value = commutator(a, b, beta)?;
    unit_cache().write().unwrap().insert(key, value.clone());
    Ok(value)
}

/// `[E_a, E_b] 1_β = E_a E_b 1_β − E_b E_a 1_β`.
fn commutator(a: (usize, usize), b: (usize, usize), beta: &ObjectLabel) -> Result<Maybe> {
    let ab = apply_units(&[a, b], beta)?;
    let ba = apply_units(&[b, a], beta)?;
    sub_maybe(&ab, &ba)
}

/// Product of matrix units written left to right (rightmost acts first).
pub fn apply_units(word: &[(usize, usize)], beta: &ObjectLabel) -> Result<Maybe> {
    let mut acc: Maybe = Some(Morphism::identity(beta));
    for &(i, j) in word.iter().rev() {
        let Some(cur) = codomain_of(&acc) else { return Ok(None) };
        let step = matrix_unit(i, j, &cur)?;
        acc = compose_maybe(&step, &acc)?;
    }
    Ok(acc)
}

/// `E_ij^m / m! 1_β` from repeated products of the commutator form.
pub fn matrix_unit_power(i: usize, j: usize, m: u32, beta: &ObjectLabel) -> Result<Maybe> {
    let mut acc: Maybe = Some(Morphism::identity(beta));
    for k in 1..=m {
        let Some(cur) = codomain_of(&acc) else { return Ok(None) };
        let step = matrix_unit(i, j, &cur)?;
        let prod = compose_maybe(&step, &acc)?;
        acc = prod.map(|p| p.scale_rational(&Rational::new(1.into(), (k as i64).into())));
    }
    Ok(acc)
}

/// Product of generators written left to right (rightmost acts first).
pub fn apply_generators(word: &[GlGenerator], beta: &ObjectLabel) -> Result<Maybe> {
    let mut acc: Maybe = Some(Morphism::identity(beta));
    for g in word.iter().rev() {
        let Some(cur) = codomain_of(&acc) else { return Ok(None) };
        let step = generator_to_xi(g, &cur)?;
        acc = compose_maybe(&step, &acc)?;
    }
    Ok(acc)
}

/// Factors `(i, j, power)` written left to right; each is `E_ij^p / p!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixUnitWord {
    pub factors: Vec<(usize, usize, u32)>,
    pub base: ObjectLabel,
}

pub fn pbw_to_xi(w: &MatrixUnitWord) -> Result<Maybe> {
    let mut acc: Maybe = Some(Morphism::identity(&w.base));
    for &(i, j, p) in w.factors.iter().rev() {
        let Some(cur) = codomain_of(&acc) else { return Ok(None) };
        let step = matrix_unit_power(i, j, p, &cur)?;
        acc = compose_maybe(&step, &acc)?;
    }
    Ok(acc)
}

/// Outcome of a relation check: the residual and named intermediate values.
#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub holds: bool,
    pub residual: Maybe,
    pub parts: Vec<(String, Maybe)>,
}

fn entry_poly(beta: &ObjectLabel, i: usize) -> IVPoly {
    beta.entry(i).to_poly(beta.l())
}

/// `(e_i f_j − f_j e_i) 1_β = δ_ij (β_i − β_{i+1}) 1_β`.
pub fn verify_chevalley(i: usize, j: usize, beta: &ObjectLabel) -> Result<RelationCheck> {
    let ef = apply_generators(&[GlGenerator::e(i), GlGenerator::f(j)], beta)?;
    let fe = apply_generators(&[GlGenerator::f(j), GlGenerator::e(i)], beta)?;
    let lhs = sub_maybe(&ef, &fe)?;
    let rhs = if i == j {
        let c = &entry_poly(beta, i - 1) - &entry_poly(beta, i);
        scale_maybe(&Some(Morphism::identity(beta)), &c)
    } else {
        None
    };
    let residual = sub_maybe(&lhs, &rhs)?;
    Ok(RelationCheck {
        holds: residual.is_none(),
        residual,
        parts: vec![("e f".into(), ef), ("f e".into(), fe), ("rhs".into(), rhs)],
    })
}

/// `(x_i² x_j − 2 x_i x_j x_i + x_j x_i²) 1_β = 0` with `j = i ± 1`, for
/// `x = e` (`raising`) or `x = f`.
pub fn verify_serre(i: usize, up: bool, kind: GenKind, beta: &ObjectLabel) -> Result<RelationCheck> {
    check_index(i)?;
    if !up && i == 1 {
        return input("no neighbour below index 1");
    }
    let j = if up { i + 1 } else { i - 1 };
    let g = |k: usize| GlGenerator { kind, index: k, power: 1 };
    let iij = apply_generators(&[g(i), g(i), g(j)], beta)?;
    let iji = apply_generators(&[g(i), g(j), g(i)], beta)?;
    let jii = apply_generators(&[g(j), g(i), g(i)], beta)?;
    let two = IVPoly::from_int(beta.l(), 2);
    let residual = add_maybe(&sub_maybe(&iij, &scale_maybe(&iji, &two))?, &jii)?;
    Ok(RelationCheck {
        holds: residual.is_none(),
        residual,
        parts: vec![("x_i x_i x_j".into(), iij), ("x_i x_j x_i".into(), iji), ("x_j x_i x_i".into(), jii)],
    })
}

/// `[x_i, x_j] 1_β = 0` for `|i − j| ≥ 2`.
pub fn verify_far_commute(i: usize, j: usize, kind: GenKind, beta: &ObjectLabel) -> Result<RelationCheck> {
    if i.abs_diff(j) < 2 {
        return input("indices must be at least two apart");
    }
    let g = |k: usize| GlGenerator { kind, index: k, power: 1 };
    let ij = apply_generators(&[g(i), g(j)], beta)?;
    let ji = apply_generators(&[g(j), g(i)], beta)?;
    let residual = sub_maybe(&ij, &ji)?;
    Ok(RelationCheck { holds: residual.is_none(), residual, parts: vec![("ij".into(), ij), ("ji".into(), ji)] })
}

/// `(m, n)` entry of the two-row family `[[λ1 − n, m], [n, λ2 − m]]`.
pub fn two_row_q(m: i64, n: i64) -> CosetMatrix {
    let grid = [AffineForm::var(0, -n), AffineForm::constant(m), AffineForm::constant(n), AffineForm::var(1, -m)];
    CosetMatrix::from_grid(2, 2, 2, &grid).expect("valid two-row matrix")
}

/// `[[λ1 + m − n, 0], [n, λ2 − m]]`.
pub fn two_row_r(m: i64, n: i64) -> CosetMatrix {
    let grid = [AffineForm::var(0, m - n), AffineForm::constant(0), AffineForm::constant(n), AffineForm::var(1, -m)];
    CosetMatrix::from_grid(2, 2, 2, &grid).expect("valid two-row matrix")
}

#[derive(Clone, Debug)]
pub struct GenfunEntry {
    pub m: i64,
    pub n: i64,
    /// Coefficient of `x^m y^n` on the right-hand side.
    pub expansion: Maybe,
    pub expected: Morphism,
    /// `ξ_r(m,n) ξ_q(m,0)` and the binomial sum it should equal.
    pub intermediate: (Maybe, Maybe),
}

impl GenfunEntry {
    pub fn holds(&self) -> bool {
        self.expansion.as_ref() == Some(&self.expected) && self.intermediate.0 == self.intermediate.1
    }
}

/// Coefficients of `exp(yf) (1 − xy)^{h_2} exp(xe) 1_λ` up to bidegree `(N, N)`,
/// compared with `ξ_{q(m,n)}`.
pub fn genfun_identity_check(n_max: i64) -> Result<(bool, Vec<GenfunEntry>)> {
    let lam = ObjectLabel::generic(2);
    let l = 2;
    let mut table = Vec::new();
    let mut all = true;
    // ξ_{r(m,n)} ξ_{q(m,0)} via generator images.
    let mut products: HashMap<(i64, i64), Maybe> = HashMap::new();
    for m in 0..=n_max {
        for n in 0..=n_max {
            let e = generator_to_xi(&GlGenerator::e(1).pow(m as u32), &lam)?;
            let mid = codomain_of(&e).expect("e^m is nonzero at the generic object");
            let f = generator_to_xi(&GlGenerator::f(1).pow(n as u32), &mid)?;
            if f.as_ref().map(|f| f.terms().keys().next() != Some(&two_row_r(m, n))).unwrap_or(false) {
                return Err(crate::Error::Verification(format!("f^({n}) at e^({m}) target is not ξ_r")));
            }
            products.insert((m, n), compose_maybe(&f, &e)?);
        }
    }
    for a in 0..=n_max {
        for b in 0..=n_max {
            let mut acc: Maybe = None;
            for i in 0..=a.min(b) {
                let (m, n) = (a - i, b - i);
                let c = ivp_binomial(&AffineForm::var(1, -m), i as u64, l).scale(&sign(i));
                acc = add_maybe(&acc, &scale_maybe(&products[&(m, n)], &c))?;
            }
            let expected = Morphism::basis(two_row_q(a, b))?;
            let mut inter: Maybe = None;
            for i in 0..=a.min(b) {
                let c = ivp_binomial(&AffineForm::var(1, -a + i), i as u64, l);
                let q = Some(Morphism::basis(two_row_q(a - i, b - i))?);
                inter = add_maybe(&inter, &scale_maybe(&q, &c))?;
            }
            let entry = GenfunEntry {
                m: a,
                n: b,
                expansion: acc,
                expected,
                intermediate: (products[&(a, b)].clone(), inter),
            };
            all &= entry.holds();
            table.push(entry);
        }
    }
    Ok((all, table))
}

/// `E_ij 1_α ⊗ 1_β` against `⊕_γ Σ_k E_{(i,k),(j,k)} 1_γ` (one parameter).
/// Returns the verdict and both block maps (left side; right side as a map
/// from source block index to the summed morphisms by target block).
pub fn tensor_leibniz_check(i: usize, j: usize, alpha: &ObjectLabel, beta: &ObjectLabel) -> Result<(bool, BlockMap)> {
    if alpha.l() != 1 || beta.l() != 1 {
        return input("the tensor identity is stated for one parameter");
    }
    let unit = matrix_unit(i, j, alpha)?;
    let id_beta = Morphism::identity(beta);
    let Some(unit) = unit else {
        // Left side vanishes; each block summand must vanish too.
        let blocks = crate::schur::tensor_blocks(alpha, beta)?;
        for g in &blocks {
            if leibniz_block_sum(i, j, g)?.iter().any(|(_, m)| m.is_some()) {
                return Ok((false, BlockMap { l: 1, sources: blocks.clone(), targets: vec![], blocks: Default::default() }));
            }
        }
        return Ok((true, BlockMap { l: 1, sources: blocks, targets: vec![], blocks: Default::default() }));
    };
    let bm = module_action_blocks(&unit, &id_beta)?;
    let mut ok = true;
    for (si, src) in bm.sources.iter().enumerate() {
        let sums = leibniz_block_sum(i, j, src)?;
        let mut expected: HashMap<usize, Morphism> = HashMap::new();
        for (tgt, m) in sums {
            if let Some(m) = m {
                let ti = bm
                    .targets
                    .iter()
                    .position(|b| *b == tgt)
                    .ok_or_else(|| crate::Error::Verification(format!("block {tgt} missing from the target")))?;
                match expected.get_mut(&ti) {
                    Some(acc) => *acc = acc.add(&m)?,
                    None => {
                        expected.insert(ti, m);
                    }
                }
            }
        }
        expected.retain(|_, m| !m.is_zero());
        for ti in 0..bm.targets.len() {
            let got = bm.blocks.get(&(si, ti));
            if got != expected.get(&ti) {
                ok = false;
            }
        }
    }
    Ok((ok, bm))
}

/// `Σ_k E_{(i,k),(j,k)} 1_γ` grouped by target block.
pub fn leibniz_block_sum(i: usize, j: usize, g: &TensorBlock) -> Result<Vec<(TensorBlock, Maybe)>> {
    check_index(i)?;
    check_index(j)?;
    let rows = g.rows.max(i).max(j);
    let pos = crate::schur::flat_positions(rows, g.cols, 1);
    let label = g.label(1)?;
    let mut padded = g.cells.clone();
    padded.resize(rows * g.cols, AffineForm::constant(0));
    let (a, b) = (i - 1, j - 1);
    let mut out = Vec::new();
    for k in 0..g.cols {
        let p = pos.iter().position(|&x| x == (a, k)).expect("cell in range");
        let q = pos.iter().position(|&x| x == (b, k)).expect("cell in range");
        let src = &padded[b * g.cols + k];
        if !src.is_symbolic() && src.offset == 0 {
            continue;
        }
        let m = matrix_unit(p + 1, q + 1, &label)?;
        let mut cells = padded.clone();
        cells[a * g.cols + k] = cells[a * g.cols + k].shift(1);
        cells[b * g.cols + k] = cells[b * g.cols + k].shift(-1);
        let mut r = rows;
        while r > 1 && cells[(r - 1) * g.cols..r * g.cols].iter().all(|c| !c.is_symbolic() && c.offset == 0) {
            r -= 1;
        }
        cells.truncate(r * g.cols);
        out.push((TensorBlock { rows: r, cols: g.cols, cells }, m));
    }
    Ok(out)
}
