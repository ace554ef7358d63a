//! Morphisms in the ξ basis: interpolated composition, tensor blocks,
//! specialization, and the brute-force coset-action oracle.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};

use crate::combinatorics::{permutations, Composition, CosetMatrix, LinTarget, MarginSystem, ObjectLabel};
use crate::error::{input, Error, Result};
use crate::exact::{symbolic_multinomial, AffineForm, IVPoly, Rational};

/// Largest group for which the coset oracle enumerates `S_d`.
pub const ORACLE_MAX_D: usize = 7;

/// `Σ coeff · ξ_q` between two objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    domain: ObjectLabel,
    codomain: ObjectLabel,
    char_zero: bool,
    terms: BTreeMap<CosetMatrix, IVPoly>,
}

impl Morphism {
    pub fn zero(domain: ObjectLabel, codomain: ObjectLabel) -> Result<Self> {
        if domain.l() != codomain.l() {
            return input("domain and codomain over different parameter lengths");
        }
        Ok(Morphism { domain, codomain, char_zero: false, terms: BTreeMap::new() })
    }

    /// The single basis element `ξ_q`.
    pub fn basis(q: CosetMatrix) -> Result<Self> {
        let mut m = Morphism::zero(q.domain()?, q.codomain()?)?;
        let l = q.l();
        m.terms.insert(q, IVPoly::one(l));
        Ok(m)
    }

    pub fn identity(alpha: &ObjectLabel) -> Self {
        Morphism::basis(CosetMatrix::identity(alpha)).expect("identity is well formed")
    }

    pub fn from_terms(
        domain: ObjectLabel,
        codomain: ObjectLabel,
        terms: impl IntoIterator<Item = (CosetMatrix, IVPoly)>,
    ) -> Result<Self> {
        let mut m = Morphism::zero(domain, codomain)?;
        for (q, c) in terms {
            m.add_term(q, c)?;
        }
        Ok(m)
    }

    pub fn domain(&self) -> &ObjectLabel {
        &self.domain
    }

    pub fn codomain(&self) -> &ObjectLabel {
        &self.codomain
    }

    pub fn l(&self) -> usize {
        self.domain.l()
    }

    pub fn char_zero(&self) -> bool {
        self.char_zero
    }

    pub fn with_char_zero(mut self, flag: bool) -> Self {
        self.char_zero = flag;
        self
    }

    pub fn terms(&self) -> &BTreeMap<CosetMatrix, IVPoly> {
        &self.terms
    }

    pub fn coefficient(&self, q: &CosetMatrix) -> IVPoly {
        self.terms.get(q).cloned().unwrap_or_else(|| IVPoly::zero(self.l()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, q: CosetMatrix, c: IVPoly) -> Result<()> {
        if q.domain()? != self.domain || q.codomain()? != self.codomain {
            return input(format!("matrix {q} does not lie in Hom({}, {})", self.domain, self.codomain));
        }
        if c.nvars() != self.l() {
            return input("coefficient ring does not match the parameter length");
        }
        self.add_term_unchecked(q, c);
        Ok(())
    }

    fn add_term_unchecked(&mut self, q: CosetMatrix, c: IVPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&q) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&q);
                }
            }
            None => {
                self.terms.insert(q, c);
            }
        }
    }

    fn same_hom(&self, other: &Morphism) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return input(format!(
                "morphisms live in different Hom spaces: {}→{} vs {}→{}",
                self.domain, self.codomain, other.domain, other.codomain
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        self.same_hom(other)?;
        let mut out = self.clone();
        out.char_zero |= other.char_zero;
        for (q, c) in &other.terms {
            out.add_term_unchecked(q.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Morphism) -> Result<Morphism> {
        self.add(&other.scale(&IVPoly::from_int(other.l(), -1)))
    }

    pub fn scale(&self, c: &IVPoly) -> Morphism {
        let mut out = Morphism { terms: BTreeMap::new(), ..self.clone() };
        for (q, v) in &self.terms {
            out.add_term_unchecked(q.clone(), v * c);
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> Morphism {
        self.scale(&IVPoly::constant(self.l(), c.clone()))
    }

    /// Largest off-diagonal degree among the terms.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(CosetMatrix::offdiag_degree).max().unwrap_or(0)
    }

    /// Coefficients evaluated at a rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<BTreeMap<CosetMatrix, Rational>> {
        let mut out = BTreeMap::new();
        for (q, c) in &self.terms {
            let v = c.eval(point)?;
            if !v.is_zero() {
                out.insert(q.clone(), v);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 : {} -> {}", self.domain, self.codomain);
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(q, c)| format!("({c})*xi[{q}]"))
            .collect();
        write!(f, "{} : {} -> {}", parts.join(" + "), self.domain, self.codomain)
    }
}

type BasisProduct = Arc<Vec<(CosetMatrix, IVPoly)>>;

fn product_cache() -> &'static RwLock<HashMap<(CosetMatrix, CosetMatrix), BasisProduct>> {
    static CACHE: OnceLock<RwLock<HashMap<(CosetMatrix, CosetMatrix), BasisProduct>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Fill patterns of slice `j` of the 3-tensor: cells `(i,k)` with row sums
/// `r_{ij}` and column sums `s_{jk}`; cell `(j,j)` is symbolic when `j < l`.
fn layer_solutions(r: &CosetMatrix, s: &CosetMatrix, j: usize) -> Result<Vec<Vec<AffineForm>>> {
    let l = r.l();
    let (ng, na) = (r.rows(), s.cols());
    let cell_vars: Vec<Option<usize>> = (0..ng * na)
        .map(|idx| (j < l && idx == j * na + j).then_some(j))
        .collect();
    let mut sys = MarginSystem::new(l, cell_vars);
    for i in 0..ng {
        sys.constrain_affine((0..na).map(|k| i * na + k).collect(), &r.entry(i, j));
    }
    for k in 0..na {
        sys.constrain_affine((0..ng).map(|i| i * na + k).collect(), &s.entry(j, k));
    }
    sys.solve()
}

fn affine_add(a: AffineForm, b: AffineForm) -> AffineForm {
    AffineForm { var: a.var.or(b.var), offset: a.offset + b.offset }
}

/// `ξ_r ξ_s` for basis elements, as `Σ_q C^q_{r,s} ξ_q`.
///
/// Slices of the 3-tensor are independent given `r` and `s`; the multinomial
/// weight factors as a chain of binomials, so partial sums can be merged.
pub fn compose_basis(r: &CosetMatrix, s: &CosetMatrix) -> Result<BasisProduct> {
    if r.l() != s.l() {
        return input("basis elements over different parameter lengths");
    }
    if r.domain()? != s.codomain()? {
        return input(format!("cannot compose {r} after {s}: objects differ"));
    }
    let key = (r.clone(), s.clone());
    if let Some(hit) = product_cache().read().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let l = r.l();
    let (ng, na) = (r.rows(), s.cols());
    let mut states: BTreeMap<Vec<AffineForm>, IVPoly> = BTreeMap::new();
    states.insert(vec![AffineForm::constant(0); ng * na], IVPoly::one(l));
    for j in 0..r.cols() {
        let layers = layer_solutions(r, s, j)?;
        let mut next: BTreeMap<Vec<AffineForm>, IVPoly> = BTreeMap::new();
        for (partial, coeff) in &states {
            for layer in &layers {
                let mut weight = coeff.clone();
                let mut sum = Vec::with_capacity(partial.len());
                for (a, b) in partial.iter().zip(layer) {
                    let top = affine_add(*a, *b);
                    if a.offset != 0 || a.is_symbolic() {
                        if b.offset != 0 || b.is_symbolic() {
                            weight = &weight * &symbolic_multinomial(&top, &[*a, *b], l)?;
                        }
                    }
                    sum.push(top);
                }
                let slot = next.entry(sum).or_insert_with(|| IVPoly::zero(l));
                *slot = &*slot + &weight;
            }
        }
        states = next;
    }
    let mut out = Vec::new();
    for (grid, c) in states {
        if !c.is_zero() {
            out.push((CosetMatrix::from_grid(l, ng, na, &grid)?, c));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    let out = Arc::new(out);
    product_cache().write().unwrap().insert(key, out.clone());
    Ok(out)
}

/// Reference evaluation of `ξ_r ξ_s` straight from the definition: enumerate
/// every 3-tensor `A` and add `V(A) = ∏_{i,k} (Σ_j a_ijk)! / ∏_j a_ijk!`.
pub fn compose_basis_direct(r: &CosetMatrix, s: &CosetMatrix) -> Result<Vec<(CosetMatrix, IVPoly)>> {
    let l = r.l();
    let (ng, nb, na) = (r.rows(), r.cols(), s.cols());
    if r.domain()? != s.codomain()? {
        return input("objects differ");
    }
    let cell = |i: usize, j: usize, k: usize| (i * nb + j) * na + k;
    let cell_vars: Vec<Option<usize>> = (0..ng * nb * na)
        .map(|idx| {
            let (i, j, k) = (idx / (nb * na), (idx / na) % nb, idx % na);
            (i == j && j == k && i < l).then_some(i)
        })
        .collect();
    let mut sys = MarginSystem::new(l, cell_vars);
    for i in 0..ng {
        for j in 0..nb {
            sys.constrain_affine((0..na).map(|k| cell(i, j, k)).collect(), &r.entry(i, j));
        }
    }
    for j in 0..nb {
        for k in 0..na {
            sys.constrain_affine((0..ng).map(|i| cell(i, j, k)).collect(), &s.entry(j, k));
        }
    }
    let mut acc: BTreeMap<CosetMatrix, IVPoly> = BTreeMap::new();
    for a in sys.solve()? {
        let mut grid = Vec::with_capacity(ng * na);
        let mut v = IVPoly::one(l);
        for i in 0..ng {
            for k in 0..na {
                let parts: Vec<AffineForm> = (0..nb).map(|j| a[cell(i, j, k)]).collect();
                let top = parts.iter().copied().fold(AffineForm::constant(0), affine_add);
                v = &v * &symbolic_multinomial(&top, &parts, l)?;
                grid.push(top);
            }
        }
        let q = CosetMatrix::from_grid(l, ng, na, &grid)?;
        let slot = acc.entry(q).or_insert_with(|| IVPoly::zero(l));
        *slot = &*slot + &v;
    }
    Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

/// `f ∘ g` (apply `g` first).
pub fn compose_interpolated(f: &Morphism, g: &Morphism) -> Result<Morphism> {
    if g.codomain != f.domain {
        return input(format!(
            "cannot compose: codomain {} differs from domain {}",
            g.codomain, f.domain
        ));
    }
    let mut out = Morphism::zero(g.domain.clone(), f.codomain.clone())?;
    out.char_zero = f.char_zero || g.char_zero;
    for (r, cr) in &f.terms {
        for (s, cs) in &g.terms {
            let crs = cr * cs;
            for (q, c) in compose_basis(r, s)?.iter() {
                out.add_term_unchecked(q.clone(), &crs * c);
            }
        }
    }
    Ok(out)
}

/// Cell `(a, b)` of a tensor block: `a` indexes the first factor's parts,
/// `b` the second's.  Cells `(0, b)` for `b < L` are symbolic in `λ_b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorBlock {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<AffineForm>,
}

impl TensorBlock {
    pub fn get(&self, a: usize, b: usize) -> AffineForm {
        self.cells[a * self.cols + b]
    }

    /// Flattened label: symbolic cells first, then the rest row-major.
    pub fn label(&self, l: usize) -> Result<ObjectLabel> {
        let entries: Vec<AffineForm> = flat_positions(self.rows, self.cols, l)
            .into_iter()
            .map(|(a, b)| self.get(a, b))
            .collect();
        ObjectLabel::from_entries(l, &entries)
    }

    pub fn transpose(&self) -> TensorBlock {
        let mut cells = Vec::with_capacity(self.cells.len());
        for b in 0..self.cols {
            for a in 0..self.rows {
                cells.push(self.get(a, b));
            }
        }
        TensorBlock { rows: self.cols, cols: self.rows, cells }
    }
}

impl fmt::Display for TensorBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|a| {
                (0..self.cols)
                    .map(|b| self.get(a, b).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        f.write_str(&rows.join(";"))
    }
}

/// Order in which block cells become the parts of the flattened label.
pub fn flat_positions(rows: usize, cols: usize, l: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..l.min(cols)).map(|b| (0, b)).collect();
    for a in 0..rows {
        for b in 0..cols {
            if !(a == 0 && b < l) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Decomposition of `M^α ⊗ M^β` together with the matrix of `f ⊗ g` in blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMap {
    pub l: usize,
    pub sources: Vec<TensorBlock>,
    pub targets: Vec<TensorBlock>,
    /// Nonzero blocks keyed by (source index, target index).
    pub blocks: BTreeMap<(usize, usize), Morphism>,
}

impl BlockMap {
    pub fn block(&self, src: &TensorBlock, tgt: &TensorBlock) -> Option<&Morphism> {
        let i = self.sources.iter().position(|b| b == src)?;
        let j = self.targets.iter().position(|b| b == tgt)?;
        self.blocks.get(&(i, j))
    }
}

/// Blocks `γ` of `M^α ⊗ M^β` where `α` is an object over `Λ = λ_1 + … + λ_L`
/// (one parameter) and `β` is over `λ_1..λ_L`.
pub fn tensor_blocks(alpha: &ObjectLabel, beta: &ObjectLabel) -> Result<Vec<TensorBlock>> {
    if alpha.l() != 1 {
        return input("the first factor must have exactly one parameter");
    }
    let big_l = beta.l();
    if big_l == 0 {
        return input("the second factor must be interpolated");
    }
    let (na, nb) = (alpha.len(), beta.len());
    let cell_vars: Vec<Option<usize>> = (0..na * nb)
        .map(|idx| (idx < big_l).then_some(idx))
        .collect();
    let mut sys = MarginSystem::new(big_l, cell_vars);
    sys.constrain(
        (0..nb).collect(),
        LinTarget { coeffs: vec![1; big_l], constant: alpha.entry(0).offset },
    );
    for a in 1..na {
        sys.constrain_affine((0..nb).map(|b| a * nb + b).collect(), &alpha.entry(a));
    }
    for b in 0..nb {
        sys.constrain_affine((0..na).map(|a| a * nb + b).collect(), &beta.entry(b));
    }
    Ok(sys
        .solve()?
        .into_iter()
        .map(|cells| TensorBlock { rows: na, cols: nb, cells })
        .collect())
}

/// Re-express a coefficient in `Λ` as a polynomial in `λ_1..λ_L`.
fn lift_total(c: &IVPoly, big_l: usize) -> Result<IVPoly> {
    let total = (0..big_l).fold(IVPoly::zero(big_l), |acc, i| &acc + &IVPoly::var(big_l, i));
    c.substitute(&[total])
}

/// `ξ_T` for all 4-tensors `T` from block `src` through `q1 ⊗ q2`.
fn block_terms(
    src: &TensorBlock,
    q1: &CosetMatrix,
    q2: &CosetMatrix,
    big_l: usize,
) -> Result<Vec<(TensorBlock, CosetMatrix)>> {
    let (na, nb) = (src.rows, src.cols);
    let (ma, mb) = (q1.rows(), q2.rows());
    // cell ((a2, b2), (a, b)) for target cell (a2, b2) and source cell (a, b)
    let cell = |a2: usize, b2: usize, a: usize, b: usize| ((a2 * mb + b2) * na + a) * nb + b;
    let n = ma * mb * na * nb;
    let mut cell_vars = vec![None; n];
    for b in 0..big_l {
        cell_vars[cell(0, b, 0, b)] = Some(b);
    }
    let mut sys = MarginSystem::new(big_l, cell_vars);
    for a in 0..na {
        for b in 0..nb {
            let cells = (0..ma)
                .flat_map(|a2| (0..mb).map(move |b2| (a2, b2)))
                .map(|(a2, b2)| cell(a2, b2, a, b))
                .collect();
            sys.constrain_affine(cells, &src.get(a, b));
        }
    }
    for a2 in 0..ma {
        for a in 0..na {
            let cells = (0..mb)
                .flat_map(|b2| (0..nb).map(move |b| (b2, b)))
                .map(|(b2, b)| cell(a2, b2, a, b))
                .collect();
            let e = q1.entry(a2, a);
            let target = if e.is_symbolic() {
                LinTarget { coeffs: vec![1; big_l], constant: e.offset }
            } else {
                LinTarget::from_affine(big_l, &e)
            };
            sys.constrain(cells, target);
        }
    }
    for b2 in 0..mb {
        for b in 0..nb {
            let cells = (0..ma)
                .flat_map(|a2| (0..na).map(move |a| (a2, a)))
                .map(|(a2, a)| cell(a2, b2, a, b))
                .collect();
            sys.constrain_affine(cells, &q2.entry(b2, b));
        }
    }
    let src_pos = flat_positions(na, nb, big_l);
    let tgt_pos = flat_positions(ma, mb, big_l);
    let mut out = Vec::new();
    for t in sys.solve()? {
        let mut tgt_cells = vec![AffineForm::constant(0); ma * mb];
        for a2 in 0..ma {
            for b2 in 0..mb {
                let mut acc = AffineForm::constant(0);
                for a in 0..na {
                    for b in 0..nb {
                        acc = affine_add(acc, t[cell(a2, b2, a, b)]);
                    }
                }
                tgt_cells[a2 * mb + b2] = acc;
            }
        }
        let grid: Vec<AffineForm> = tgt_pos
            .iter()
            .flat_map(|&(a2, b2)| src_pos.iter().map(move |&(a, b)| (a2, b2, a, b)))
            .map(|(a2, b2, a, b)| t[cell(a2, b2, a, b)])
            .collect();
        let q = CosetMatrix::from_grid(big_l, tgt_pos.len(), src_pos.len(), &grid)?;
        out.push((TensorBlock { rows: ma, cols: mb, cells: tgt_cells }, q));
    }
    Ok(out)
}

/// `f ⊗ g` where `f` lives over `Λ = |λ|` (one parameter) and `g` over `λ`.
pub fn module_action_blocks(f: &Morphism, g: &Morphism) -> Result<BlockMap> {
    if f.l() != 1 {
        return input("the acting morphism must live over a single parameter |λ|");
    }
    let big_l = g.l();
    let sources = tensor_blocks(f.domain(), g.domain())?;
    let targets = tensor_blocks(f.codomain(), g.codomain())?;
    let mut blocks: BTreeMap<(usize, usize), Morphism> = BTreeMap::new();
    let char_zero = f.char_zero || g.char_zero;
    for (si, src) in sources.iter().enumerate() {
        let src_label = src.label(big_l)?;
        for (q1, c1) in f.terms() {
            let c1 = lift_total(c1, big_l)?;
            for (q2, c2) in g.terms() {
                let c = &c1 * c2;
                for (tgt, q) in block_terms(src, q1, q2, big_l)? {
                    let ti = targets
                        .iter()
                        .position(|b| *b == tgt)
                        .ok_or_else(|| Error::Input("tensor target block not enumerated".into()))?;
                    let entry = match blocks.entry((si, ti)) {
                        std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                        std::collections::btree_map::Entry::Vacant(e) => e.insert(
                            Morphism::zero(src_label.clone(), tgt.label(big_l)?)?.with_char_zero(char_zero),
                        ),
                    };
                    entry.add_term_unchecked(q, c.clone());
                }
            }
        }
    }
    blocks.retain(|_, m| !m.is_zero());
    Ok(BlockMap { l: big_l, sources, targets, blocks })
}

/// `f ⊗ g` for one-parameter objects (or the module action of `f` on `g`).
pub fn tensor_interpolated(f: &Morphism, g: &Morphism) -> Result<BlockMap> {
    if f.l() >= 2 && g.l() >= 2 {
        return input("tensor product of two generic multi-parameter objects has infinitely many blocks");
    }
    module_action_blocks(f, g)
}

/// Image under `λ ↦ μ` as a concrete (`l = 0`) morphism; `None` when an
/// endpoint specializes to the zero object.
pub fn specialize_morphism(f: &Morphism, mu: &[i64]) -> Result<Option<Morphism>> {
    let (Some(dom), Some(cod)) = (f.domain.specialize(mu)?, f.codomain.specialize(mu)?) else {
        return Ok(None);
    };
    let mut out = Morphism::zero(ObjectLabel::concrete(dom), ObjectLabel::concrete(cod))?;
    out.char_zero = f.char_zero;
    for (q, c) in &f.terms {
        if let Some(m) = q.specialize(mu) {
            let v = c.eval_int(mu)?;
            out.add_term_unchecked(CosetMatrix::concrete(&m)?, IVPoly::constant(0, v));
        }
    }
    Ok(Some(out))
}

/// Words of length `|c|` with content `c`, in lexicographic order.  These
/// index the cosets `S_d / S_c`.
pub fn coset_words(c: &Composition) -> Vec<Vec<u8>> {
    fn go(counts: &mut [i64], left: i64, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in 0..counts.len() {
            if counts[k] > 0 {
                counts[k] -= 1;
                cur.push(k as u8);
                go(counts, left - 1, cur, out);
                cur.pop();
                counts[k] += 1;
            }
        }
    }
    let mut counts = c.parts().to_vec();
    let mut out = Vec::new();
    go(&mut counts, c.size(), &mut Vec::new(), &mut out);
    out
}

fn joint_counts(new: &[u8], old: &[u8], rows: usize, cols: usize) -> Vec<i64> {
    let mut q = vec![0; rows * cols];
    for (&a, &b) in new.iter().zip(old) {
        q[a as usize * cols + b as usize] += 1;
    }
    q
}

/// Exact matrix of an equivariant map on coset bases, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteMap {
    d: usize,
    domain: Composition,
    codomain: Composition,
    /// (codomain index, domain index) → value
    entries: BTreeMap<(usize, usize), Rational>,
}

impl ConcreteMap {
    pub fn zero(domain: Composition, codomain: Composition) -> Result<Self> {
        if domain.size() != codomain.size() {
            return input("compositions of different sizes");
        }
        Ok(ConcreteMap { d: domain.size() as usize, domain, codomain, entries: BTreeMap::new() })
    }

    pub fn identity(c: &Composition) -> Self {
        let n = coset_words(c).len();
        let mut m = ConcreteMap::zero(c.clone(), c.clone()).unwrap();
        for i in 0..n {
            m.entries.insert((i, i), Rational::one());
        }
        m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn domain(&self) -> &Composition {
        &self.domain
    }

    pub fn codomain(&self) -> &Composition {
        &self.codomain
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.entries
    }

    pub fn set(&mut self, row: usize, col: usize, v: Rational) {
        if v.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), v);
        }
    }

    pub fn add(&self, other: &ConcreteMap) -> Result<ConcreteMap> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return input("concrete maps between different modules");
        }
        let mut out = self.clone();
        for (&k, v) in &other.entries {
            let nv = out.get(k.0, k.1) + v;
            out.set(k.0, k.1, nv);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> ConcreteMap {
        let mut out = ConcreteMap { entries: BTreeMap::new(), ..self.clone() };
        for (&k, v) in &self.entries {
            out.set(k.0, k.1, v * c);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ConcreteMap) -> Result<ConcreteMap> {
        if other.codomain != self.domain {
            return input("concrete maps do not compose");
        }
        let mut by_row: HashMap<usize, Vec<(usize, &Rational)>> = HashMap::new();
        for (&(i, k), v) in &self.entries {
            by_row.entry(k).or_default().push((i, v));
        }
        let mut out = ConcreteMap::zero(other.domain.clone(), self.codomain.clone())?;
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (&(k, j), w) in &other.entries {
            if let Some(col) = by_row.get(&k) {
                for &(i, v) in col {
                    *acc.entry((i, j)).or_insert_with(Rational::zero) += v * w;
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        out.entries = acc;
        Ok(out)
    }

    /// Dense copy, rows indexed by the codomain basis.
    pub fn dense(&self) -> Vec<Vec<Rational>> {
        let nr = coset_words(&self.codomain).len();
        let nc = coset_words(&self.domain).len();
        let mut m = vec![vec![Rational::zero(); nc]; nr];
        for (&(i, j), v) in &self.entries {
            m[i][j] = v.clone();
        }
        m
    }

    pub fn rank(&self) -> usize {
        crate::linalg::rank(self.dense())
    }
}

/// Matrix of `ξ_q` (rows of `q` index the codomain parts, columns the domain
/// parts) on the coset bases, found by running over all of `S_d`.
pub fn oracle_coset_action(q: &[Vec<i64>], d: usize) -> Result<ConcreteMap> {
    if d > ORACLE_MAX_D {
        return Err(Error::Resource(format!(
            "coset oracle enumerates S_d and is capped at d = {ORACLE_MAX_D} (asked for {d})"
        )));
    }
    let rows = q.len();
    let cols = q.first().map_or(0, Vec::len);
    if q.iter().any(|r| r.len() != cols) || q.iter().flatten().any(|&v| v < 0) {
        return input("oracle needs a rectangular nonnegative matrix");
    }
    if q.iter().flatten().sum::<i64>() as usize != d {
        return input("matrix total differs from the group size");
    }
    let beta: Vec<i64> = q.iter().map(|r| r.iter().sum()).collect();
    let alpha: Vec<i64> = (0..cols).map(|k| q.iter().map(|r| r[k]).sum()).collect();
    let target: Vec<i64> = q.iter().flatten().copied().collect();
    let base = |c: &[i64]| -> Vec<u8> {
        c.iter().enumerate().flat_map(|(k, &n)| std::iter::repeat_n(k as u8, n as usize)).collect()
    };
    let (wa, wb) = (base(&alpha), base(&beta));
    // Right cosets g S_β inside the double coset, as the words g·w_β.
    let mut image: Vec<Vec<u8>> = Vec::new();
    for g in permutations(d) {
        let mut gw = vec![0u8; d];
        for (x, &gx) in g.iter().enumerate() {
            gw[gx] = wb[x];
        }
        if joint_counts(&gw, &wa, rows, cols) == target {
            image.push(gw);
        }
    }
    image.sort();
    image.dedup();
    let domain = Composition::new(alpha)?;
    let codomain = Composition::new(beta)?;
    let cod_words = coset_words(&codomain);
    let cod_index: HashMap<&Vec<u8>, usize> = cod_words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut m = ConcreteMap::zero(domain.clone(), codomain)?;
    for (j, w) in coset_words(&domain).iter().enumerate() {
        // π with w = π·w_α: the x-th position carrying label k in w_α goes to
        // the x-th position carrying k in w.
        let mut pi = vec![0usize; d];
        let mut slots: Vec<Vec<usize>> = vec![Vec::new(); cols];
        for (p, &k) in w.iter().enumerate() {
            slots[k as usize].push(p);
        }
        let mut used = vec![0usize; cols];
        for (x, &k) in wa.iter().enumerate() {
            pi[x] = slots[k as usize][used[k as usize]];
            used[k as usize] += 1;
        }
        for u in &image {
            let mut pu = vec![0u8; d];
            for (x, &px) in pi.iter().enumerate() {
                pu[px] = u[x];
            }
            let i = cod_index[&pu];
            m.entries.insert((i, j), Rational::one());
        }
    }
    Ok(m)
}

/// Coefficients of an equivariant map in the ξ basis; errors if the matrix
/// is not constant on double-coset orbits.
pub fn oracle_decompose(m: &ConcreteMap) -> Result<BTreeMap<Vec<Vec<i64>>, Rational>> {
    let dom_words = coset_words(&m.domain);
    let cod_words = coset_words(&m.codomain);
    let (rows, cols) = (m.codomain.len(), m.domain.len());
    let mut coeff: HashMap<Vec<i64>, Rational> = HashMap::new();
    for (i, u) in cod_words.iter().enumerate() {
        for (j, w) in dom_words.iter().enumerate() {
            let q = joint_counts(u, w, rows, cols);
            let v = m.get(i, j);
            match coeff.get(&q) {
                Some(prev) if *prev != v => {
                    return Err(Error::Verification(format!(
                        "map is not equivariant: residual {} on the orbit of {:?}",
                        &v - prev,
                        q
                    )))
                }
                Some(_) => {}
                None => {
                    coeff.insert(q, v);
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (q, v) in coeff {
        if !v.is_zero() {
            out.insert(q.chunks(cols.max(1)).map(<[i64]>::to_vec).collect(), v);
        }
    }
    Ok(out)
}

/// Realize a concrete morphism on coset bases.
pub fn realize(f: &Morphism) -> Result<ConcreteMap> {
    if f.l() != 0 {
        return input("only concrete morphisms can be realized; specialize first");
    }
    let dom = f.domain.tau().clone();
    let cod = f.codomain.tau().clone();
    let d = dom.size() as usize;
    let mut out = ConcreteMap::zero(dom, cod)?;
    for (q, c) in &f.terms {
        let grid: Vec<Vec<i64>> = (0..q.rows())
            .map(|i| (0..q.cols()).map(|k| q.entry(i, k).offset).collect())
            .collect();
        let c = c.constant_value().expect("concrete coefficient");
        out = out.add(&oracle_coset_action(&grid, d)?.scale(&c))?;
    }
    Ok(out)
}

/// Specialize and realize in one step.
pub fn specialize_to_map(f: &Morphism, mu: &[i64]) -> Result<Option<ConcreteMap>> {
    specialize_morphism(f, mu)?.map(|m| realize(&m)).transpose()
}

/// Lift an integer matrix to `T_λ` around `λ = μ`: the first `l` diagonal
/// entries become `λ_i + (m_ii - μ_i)`.
pub fn lift_concrete(m: &[Vec<i64>], mu: &[i64]) -> Result<CosetMatrix> {
    let l = mu.len();
    let rows = m.len().max(l);
    let cols = m.first().map_or(0, Vec::len).max(l);
    let at = |i: usize, k: usize| m.get(i).and_then(|r| r.get(k)).copied().unwrap_or(0);
    let grid: Vec<AffineForm> = (0..rows * cols)
        .map(|idx| {
            let (i, k) = (idx / cols, idx % cols);
            if i == k && i < l {
                AffineForm::var(i, at(i, k) - mu[i])
            } else {
                AffineForm::constant(at(i, k))
            }
        })
        .collect();
    CosetMatrix::from_grid(l, rows, cols, &grid)
}

/// Lift a composition to an object label around `λ = μ`.
pub fn lift_label(c: &Composition, mu: &[i64]) -> Result<ObjectLabel> {
    let l = mu.len();
    let sigma: Vec<i64> = (0..l).map(|i| c.get(i) - mu[i]).collect();
    let tail: Vec<i64> = c.parts().iter().skip(l).copied().collect();
    ObjectLabel::new(sigma, Composition::new(tail)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{enumerate_marginal_matrices, enumerate_symbolic_matrices, partitions};
    use crate::exact::rat;

    fn cm(s: &str) -> CosetMatrix {
        CosetMatrix::parse(s).unwrap()
    }

    fn xi(s: &str) -> Morphism {
        Morphism::basis(cm(s)).unwrap()
    }

    fn poly(s: &str, l: usize) -> IVPoly {
        IVPoly::parse(s, l).unwrap()
    }

    #[test]
    fn worked_example_golden() {
        let e = xi("L1,1;0,L2-1");
        let f = xi("L1,0;1,L2-1");
        let fe = compose_interpolated(&f, &e).unwrap();
        let r = cm("L1,0;0,L2");
        let s = cm("L1-1,1;1,L2-1");
        let expect = Morphism::from_terms(
            ObjectLabel::generic(2),
            ObjectLabel::generic(2),
            [(r.clone(), poly("L2", 2)), (s.clone(), IVPoly::one(2))],
        )
        .unwrap();
        assert_eq!(fe, expect);
        let e2 = xi("L1-1,1;0,L2");
        let f2 = xi("L1-1,0;1,L2");
        let ef = compose_interpolated(&e2, &f2).unwrap();
        let expect2 = Morphism::from_terms(
            ObjectLabel::generic(2),
            ObjectLabel::generic(2),
            [(r.clone(), poly("L1", 2)), (s, IVPoly::one(2))],
        )
        .unwrap();
        assert_eq!(ef, expect2);
        let diff = ef.sub(&fe).unwrap();
        assert_eq!(diff.terms().len(), 1);
        assert_eq!(diff.coefficient(&r), poly("L1 - L2", 2));
    }

    #[test]
    fn identity_is_neutral() {
        let f = xi("L1-1,0;1,L2");
        let id_l = Morphism::identity(f.codomain());
        let id_r = Morphism::identity(f.domain());
        assert_eq!(compose_interpolated(&id_l, &f).unwrap(), f);
        assert_eq!(compose_interpolated(&f, &id_r).unwrap(), f);
        assert!(compose_interpolated(&f, &f).is_err());
    }

    #[test]
    fn layered_and_direct_products_agree() {
        let a = ObjectLabel::parse(2, "L1,L2-1,1").unwrap();
        let b = ObjectLabel::parse(2, "L1-1,L2,0,1").unwrap();
        let c = ObjectLabel::parse(2, "L1+1,L2-1").unwrap();
        for s in enumerate_symbolic_matrices(&a, &b, 3).unwrap() {
            for r in enumerate_symbolic_matrices(&b, &c, 3).unwrap() {
                let fast = compose_basis(&r, &s).unwrap();
                let slow = compose_basis_direct(&r, &s).unwrap();
                assert_eq!(*fast, slow, "r={r} s={s}");
            }
        }
    }

    #[test]
    fn oracle_small_cases() {
        let m = oracle_coset_action(&[vec![3]], 3).unwrap();
        assert_eq!(m, ConcreteMap::identity(&Composition::new(vec![3]).unwrap()));
        // "All other points" map on M^(2,1) at d = 3.
        let q = vec![vec![1, 1], vec![1, 0]];
        let m = oracle_coset_action(&q, 3).unwrap();
        let dense = m.dense();
        // Columns sum to the number of right cosets in the double coset,
        // counted by brute force over S_3.
        let words = coset_words(&Composition::new(vec![2, 1]).unwrap());
        assert_eq!(words.len(), 3);
        let mut in_double = 0;
        for g in permutations(3) {
            let mut gw = vec![0u8; 3];
            for (x, &gx) in g.iter().enumerate() {
                gw[gx] = [0u8, 0, 1][x];
            }
            if joint_counts(&gw, &[0, 0, 1], 2, 2) == vec![1, 1, 1, 0] {
                in_double += 1;
            }
        }
        let cosets = in_double / 2; // |S_(2,1)| = 2
        for j in 0..3 {
            let s: Rational = (0..3).map(|i| dense[i][j].clone()).sum();
            assert_eq!(s, rat(cosets));
            assert!(dense[j][j].is_zero());
        }
        assert!(oracle_coset_action(&[vec![8]], 8).is_err());
    }

    #[test]
    fn decompose_round_trip() {
        let c = Composition::new(vec![2, 1, 1]).unwrap();
        let ms = enumerate_marginal_matrices(&c, &c);
        let mut total = ConcreteMap::zero(c.clone(), c.clone()).unwrap();
        let mut expect = BTreeMap::new();
        for (n, q) in ms.iter().enumerate() {
            let coeff = rat(n as i64 % 5 - 2);
            total = total.add(&oracle_coset_action(q, 4).unwrap().scale(&coeff)).unwrap();
            if !coeff.is_zero() {
                expect.insert(q.clone(), coeff);
            }
        }
        assert_eq!(oracle_decompose(&total).unwrap(), expect);
        let id = ConcreteMap::identity(&c);
        let dec = oracle_decompose(&id).unwrap();
        assert_eq!(dec.len(), 1);
        assert_eq!(dec[&vec![vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]], rat(1));
        let mut bad = ConcreteMap::identity(&c);
        bad.set(0, 0, rat(2));
        assert!(matches!(oracle_decompose(&bad), Err(Error::Verification(_))));
    }

    #[test]
    fn specialization_drops_negative_terms() {
        let id = Morphism::identity(&ObjectLabel::generic(2));
        let m = specialize_to_map(&id, &[3, 1]).unwrap().unwrap();
        assert_eq!(m, ConcreteMap::identity(&Composition::new(vec![3, 1]).unwrap()));
        assert_eq!(m.dense().len(), 4);
        let s = xi("L1-1,1;1,L2-1");
        let z = specialize_morphism(&s, &[1, 0]).unwrap().unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn example_specializes_to_oracle_product() {
        let e = xi("L1,1;0,L2-1");
        let f = xi("L1,0;1,L2-1");
        let mu = [3, 2];
        let lhs = specialize_to_map(&compose_interpolated(&f, &e).unwrap(), &mu).unwrap().unwrap();
        let rhs = specialize_to_map(&f, &mu)
            .unwrap()
            .unwrap()
            .compose(&specialize_to_map(&e, &mu).unwrap().unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn all_products_at_d4_match_the_oracle() {
        let mu = [4];
        let parts = partitions(4);
        for a in &parts {
            for b in &parts {
                for c in &parts {
                    for s in enumerate_marginal_matrices(b, a) {
                        for r in enumerate_marginal_matrices(c, b) {
                            let prod = oracle_coset_action(&r, 4)
                                .unwrap()
                                .compose(&oracle_coset_action(&s, 4).unwrap())
                                .unwrap();
                            let fr = Morphism::basis(lift_concrete(&r, &mu).unwrap()).unwrap();
                            let fs = Morphism::basis(lift_concrete(&s, &mu).unwrap()).unwrap();
                            let comp = compose_interpolated(&fr, &fs).unwrap();
                            let spec = specialize_morphism(&comp, &mu).unwrap().unwrap();
                            let mut got = BTreeMap::new();
                            for (q, v) in spec.terms() {
                                let g: Vec<Vec<i64>> = (0..q.rows())
                                    .map(|i| (0..q.cols()).map(|k| q.entry(i, k).offset).collect())
                                    .collect();
                                got.insert(g, v.constant_value().unwrap());
                            }
                            assert_eq!(got, oracle_decompose(&prod).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_identity_blocks() {
        let a = ObjectLabel::parse(1, "L1-1,1").unwrap();
        let id = Morphism::identity(&a);
        let bm = tensor_interpolated(&id, &id).unwrap();
        assert_eq!(bm.sources.len(), 2);
        // Specialized at λ = 3, the blocks match the double cosets of (2,1),(2,1).
        let c = Composition::new(vec![2, 1]).unwrap();
        assert_eq!(bm.sources.len(), enumerate_marginal_matrices(&c, &c).len());
        for ((si, ti), m) in &bm.blocks {
            assert_eq!(si, ti);
            assert_eq!(*m, Morphism::identity(&bm.sources[*si].label(1).unwrap()));
        }
        assert_eq!(bm.blocks.len(), 2);
        let two = ObjectLabel::generic(2);
        let g = Morphism::identity(&two);
        assert!(tensor_interpolated(&g, &g).is_err());
    }
}
