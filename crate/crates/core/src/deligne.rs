//! Partition diagrams over `Z[t]`, the `x_D` basis, the tensor-space functor
//! `F_d`, and the dictionary from matchings to ξ morphisms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::combinatorics::{permutations, Composition, CosetMatrix, ObjectLabel, SetPartition};
use crate::error::{input, Result};
use crate::exact::{rat, AffineForm, IVPoly, Rational};
use crate::schur::Morphism;

/// `(m, n)`-partition diagram.  Vertices `0..m` are the unprimed (input)
/// row and `m..m+n` the primed (output) row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionDiagram {
    m: usize,
    n: usize,
    blocks: SetPartition,
}

impl PartitionDiagram {
    pub fn new(m: usize, n: usize, blocks: SetPartition) -> Result<Self> {
        if blocks.ground_size() != m + n {
            return input(format!("partition of {} vertices used for a ({m},{n}) diagram", blocks.ground_size()));
        }
        Ok(PartitionDiagram { m, n, blocks })
    }

    /// Blocks given as (unprimed, primed) vertex lists, 1-based.
    pub fn from_blocks(m: usize, n: usize, blocks: &[(Vec<usize>, Vec<usize>)]) -> Result<Self> {
        let mut raw = Vec::new();
        for (top, bottom) in blocks {
            let mut b = Vec::new();
            for &x in top {
                if x == 0 || x > m {
                    return input(format!("vertex {x} out of range"));
                }
                b.push(x - 1);
            }
            for &x in bottom {
                if x == 0 || x > n {
                    return input(format!("vertex {x}' out of range"));
                }
                b.push(m + x - 1);
            }
            raw.push(b);
        }
        PartitionDiagram::new(m, n, SetPartition::new(m + n, raw)?)
    }

    pub fn identity(n: usize) -> Self {
        let blocks = (0..n).map(|i| vec![i, n + i]).collect();
        PartitionDiagram { m: n, n, blocks: SetPartition::new(2 * n, blocks).unwrap() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partition(&self) -> &SetPartition {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.num_blocks()
    }

    /// `t^r · D3` for `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &PartitionDiagram) -> Result<(usize, PartitionDiagram)> {
        if other.n != self.m {
            return input(format!(
                "cannot compose a ({},{}) diagram after a ({},{}) diagram",
                self.m, self.n, other.m, other.n
            ));
        }
        let (k, mid, n) = (other.m, self.m, self.n);
        // Vertices: 0..k inputs of `other`, k..k+mid the glued row, then outputs.
        let total = k + mid + n;
        let mut uf = UnionFind::new(total);
        for b in other.blocks.blocks() {
            for w in b.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        for b in self.blocks.blocks() {
            for w in b.windows(2) {
                uf.union(k + w[0], k + w[1]);
            }
        }
        let outer: Vec<usize> = (0..k).chain(k + mid..total).collect();
        let mut roots_outer: Vec<usize> = outer.iter().map(|&v| uf.find(v)).collect();
        let labels = roots_outer.clone();
        roots_outer.sort_unstable();
        roots_outer.dedup();
        let mut middle_roots: Vec<usize> = (k..k + mid).map(|v| uf.find(v)).collect();
        middle_roots.sort_unstable();
        middle_roots.dedup();
        let r = middle_roots.iter().filter(|x| roots_outer.binary_search(x).is_err()).count();
        Ok((r, PartitionDiagram { m: k, n, blocks: SetPartition::from_labels(&labels) }))
    }

    /// Side-by-side juxtaposition.
    pub fn tensor(&self, other: &PartitionDiagram) -> PartitionDiagram {
        let (m, n) = (self.m + other.m, self.n + other.n);
        let relabel_self = |x: usize| if x < self.m { x } else { m + (x - self.m) };
        let relabel_other = |x: usize| if x < other.m { self.m + x } else { m + self.n + (x - other.m) };
        let mut blocks: Vec<Vec<usize>> = self
            .blocks
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&x| relabel_self(x)).collect())
            .collect();
        blocks.extend(other.blocks.blocks().iter().map(|b| b.iter().map(|&x| relabel_other(x)).collect()));
        PartitionDiagram { m, n, blocks: SetPartition::new(m + n, blocks).unwrap() }
    }

    /// Every diagram obtained by merging blocks (including `self`).
    pub fn coarsenings(&self) -> Vec<PartitionDiagram> {
        self.blocks
            .coarsenings()
            .into_iter()
            .map(|blocks| PartitionDiagram { m: self.m, n: self.n, blocks })
            .collect()
    }

    /// Parse `"1,2,1' | 3,2' | 4"`; sizes are the largest labels present.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(PartitionDiagram { m: 0, n: 0, blocks: SetPartition::discrete(0) });
        }
        let mut parsed = Vec::new();
        let (mut m, mut n) = (0, 0);
        for block in s.split('|') {
            let mut top = Vec::new();
            let mut bottom = Vec::new();
            for v in block.split(',') {
                let v = v.trim();
                let (digits, primed) = match v.strip_suffix('\'') {
                    Some(d) => (d, true),
                    None => (v, false),
                };
                let x: usize = digits
                    .parse()
                    .map_err(|_| crate::Error::Input(format!("bad vertex '{v}'")))?;
                if primed {
                    n = n.max(x);
                    bottom.push(x);
                } else {
                    m = m.max(x);
                    top.push(x);
                }
            }
            parsed.push((top, bottom));
        }
        PartitionDiagram::from_blocks(m, n, &parsed)
    }
}

impl fmt::Display for PartitionDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&x| if x < self.m { (x + 1).to_string() } else { format!("{}'", x - self.m + 1) })
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        f.write_str(&blocks.join(" | "))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Linear combination of `(m, n)`-diagrams with coefficients in `Q[t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramCombo {
    m: usize,
    n: usize,
    terms: BTreeMap<PartitionDiagram, IVPoly>,
}

impl DiagramCombo {
    pub fn zero(m: usize, n: usize) -> Self {
        DiagramCombo { m, n, terms: BTreeMap::new() }
    }

    pub fn single(d: PartitionDiagram) -> Self {
        let mut c = DiagramCombo::zero(d.m, d.n);
        c.terms.insert(d, IVPoly::one(1));
        c
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<PartitionDiagram, IVPoly> {
        &self.terms
    }

    pub fn coefficient(&self, d: &PartitionDiagram) -> IVPoly {
        self.terms.get(d).cloned().unwrap_or_else(|| IVPoly::zero(1))
    }

    pub fn add_term(&mut self, d: PartitionDiagram, c: IVPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(d.clone()).or_insert_with(|| IVPoly::zero(1));
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn add(&self, other: &DiagramCombo) -> DiagramCombo {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &IVPoly) -> DiagramCombo {
        let mut out = DiagramCombo::zero(self.m, self.n);
        for (d, v) in &self.terms {
            out.add_term(d.clone(), v * c);
        }
        out
    }

    pub fn compose(&self, other: &DiagramCombo) -> Result<DiagramCombo> {
        let mut out = DiagramCombo::zero(other.m, self.n);
        if other.n != self.m {
            return input("diagram combinations do not compose");
        }
        let t = IVPoly::var(1, 0);
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                let (r, d3) = d1.compose(d2)?;
                out.add_term(d3, &(c1 * c2) * &t.pow(r as u32));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for DiagramCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| format!("({}) [{}]", c.to_string_with(&["t"]), d))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `t^r · D3`, as a combination.
pub fn compose_diagrams(d1: &PartitionDiagram, d2: &PartitionDiagram) -> Result<DiagramCombo> {
    let (r, d3) = d1.compose(d2)?;
    let mut out = DiagramCombo::zero(d3.m, d3.n);
    out.add_term(d3, IVPoly::var(1, 0).pow(r as u32));
    Ok(out)
}

pub fn tensor_diagrams(d1: &PartitionDiagram, d2: &PartitionDiagram) -> PartitionDiagram {
    d1.tensor(d2)
}

/// `x_D` in the diagram basis, from `D = Σ_{E ⊒ D} x_E`.
pub fn xd_expand(d: &PartitionDiagram) -> DiagramCombo {
    let mut memo: HashMap<PartitionDiagram, DiagramCombo> = HashMap::new();
    xd_rec(d, &mut memo)
}

fn xd_rec(d: &PartitionDiagram, memo: &mut HashMap<PartitionDiagram, DiagramCombo>) -> DiagramCombo {
    if let Some(hit) = memo.get(d) {
        return hit.clone();
    }
    let mut out = DiagramCombo::single(d.clone());
    for e in d.coarsenings() {
        if e != *d {
            let xe = xd_rec(&e, memo);
            out = out.add(&xe.scale(&IVPoly::from_int(1, -1)));
        }
    }
    memo.insert(d.clone(), out.clone());
    out
}

/// All `(m, n)` diagrams.
pub fn all_diagrams(m: usize, n: usize) -> Vec<PartitionDiagram> {
    crate::combinatorics::all_set_partitions(m + n)
        .into_iter()
        .map(|blocks| PartitionDiagram { m, n, blocks })
        .collect()
}

/// Outputs of `F_d(D)` on a pure tensor, as multi-indices over `0..d`.
/// Each output appears with multiplicity one.
pub fn diagram_outputs(diag: &PartitionDiagram, d: usize, index: &[usize]) -> Vec<Vec<usize>> {
    assert_eq!(index.len(), diag.m);
    let mut forced: Vec<Option<usize>> = vec![None; diag.num_blocks()];
    let labels = diag.blocks.labels();
    for (p, &i) in index.iter().enumerate() {
        let b = labels[p];
        match forced[b] {
            Some(v) if v != i => return Vec::new(),
            _ => forced[b] = Some(i),
        }
    }
    let free: Vec<usize> = (0..forced.len()).filter(|&b| forced[b].is_none()).collect();
    let mut out = Vec::new();
    let mut values = forced.clone();
    let total = d.pow(free.len() as u32);
    for mut code in 0..total {
        for &b in &free {
            values[b] = Some(code % d);
            code /= d;
        }
        out.push((0..diag.n).map(|x| values[labels[diag.m + x]].unwrap()).collect());
    }
    out
}

/// Outputs of `F_d(x_D)`: distinct blocks must carry distinct labels.
pub fn x_outputs(diag: &PartitionDiagram, d: usize, index: &[usize]) -> Vec<Vec<usize>> {
    assert_eq!(index.len(), diag.m);
    let nb = diag.num_blocks();
    let labels = diag.blocks.labels();
    let mut forced: Vec<Option<usize>> = vec![None; nb];
    for (p, &i) in index.iter().enumerate() {
        let b = labels[p];
        match forced[b] {
            Some(v) if v != i => return Vec::new(),
            _ => forced[b] = Some(i),
        }
    }
    let mut used = vec![false; d];
    for v in forced.iter().flatten() {
        if used[*v] {
            return Vec::new();
        }
        used[*v] = true;
    }
    let free: Vec<usize> = (0..nb).filter(|&b| forced[b].is_none()).collect();
    let mut out = Vec::new();
    let mut values = forced;
    fn go(
        k: usize,
        free: &[usize],
        d: usize,
        used: &mut [bool],
        values: &mut [Option<usize>],
        diag: &PartitionDiagram,
        labels: &[usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == free.len() {
            out.push((0..diag.n).map(|x| values[labels[diag.m + x]].unwrap()).collect());
            return;
        }
        for v in 0..d {
            if !used[v] {
                used[v] = true;
                values[free[k]] = Some(v);
                go(k + 1, free, d, used, values, diag, labels, out);
                used[v] = false;
            }
        }
        values[free[k]] = None;
    }
    go(0, &free, d, &mut used, &mut values, diag, &labels, &mut out);
    out
}

/// `F_d` of a combination (with `t := d`) on a pure tensor.
pub fn act_on_tensor(c: &DiagramCombo, d: usize, index: &[usize]) -> Result<BTreeMap<Vec<usize>, Rational>> {
    if index.len() != c.m || index.iter().any(|&i| i >= d) {
        return input("multi-index does not match the diagram's input row");
    }
    let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for (diag, coeff) in &c.terms {
        let v = coeff.eval_int(&[d as i64])?;
        if v.is_zero() {
            continue;
        }
        for o in diagram_outputs(diag, d, index) {
            *out.entry(o).or_insert_with(Rational::zero) += &v;
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// `F_d` of `x_D` on a pure tensor, using the distinct-labels rule directly.
pub fn act_x(diag: &PartitionDiagram, d: usize, index: &[usize]) -> BTreeMap<Vec<usize>, Rational> {
    x_outputs(diag, d, index).into_iter().map(|o| (o, Rational::one())).collect()
}

/// All multi-indices in `0..d` of length `k`, lexicographically.
pub fn multi_indices(d: usize, k: usize) -> Vec<Vec<usize>> {
    let total = d.pow(k as u32);
    (0..total)
        .map(|mut code| {
            let mut v = vec![0; k];
            for slot in v.iter_mut().rev() {
                *slot = code % d;
                code /= d;
            }
            v
        })
        .collect()
}

/// Matrix of `F_d(c)` as a flat vector (output-major), for rank computations.
pub fn fd_vector(c: &DiagramCombo, d: usize) -> Result<Vec<Rational>> {
    let ins = multi_indices(d, c.m);
    let outs = multi_indices(d, c.n);
    let pos: HashMap<&Vec<usize>, usize> = outs.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let mut v = vec![Rational::zero(); ins.len() * outs.len()];
    for (j, i) in ins.iter().enumerate() {
        for (o, x) in act_on_tensor(c, d, i)? {
            v[pos[&o] * ins.len() + j] = x;
        }
    }
    Ok(v)
}

/// The diagram `D(q)` of a matching `q`: rows of `q` index the output parts
/// `β` (row 0 is the bulk), columns the input parts `α` (column 0 the bulk).
/// Only entries outside the first row and column are read.
pub fn diagram_from_coset(q: &CosetMatrix, alpha: &SetPartition, beta: &SetPartition) -> Result<PartitionDiagram> {
    let (la, lb) = (alpha.num_blocks(), beta.num_blocks());
    if q.cols() > la + 1 || q.rows() > lb + 1 {
        return input("matrix shape does not match the set partitions");
    }
    let at = |i: usize, k: usize| -> Result<i64> {
        let e = q.entry(i, k);
        if i > 0 && k > 0 && e.is_symbolic() {
            return input("matching entries must be concrete");
        }
        Ok(if e.is_symbolic() { 1 } else { e.offset })
    };
    let mut partner: Vec<Option<usize>> = vec![None; la];
    for j in 1..=lb {
        let mut sum = 0;
        for k in 0..=la {
            sum += at(j, k)?;
        }
        if sum != 1 {
            return input(format!("row {} of a matching must sum to 1", j + 1));
        }
    }
    for k in 1..=la {
        let mut sum = 0;
        for j in 0..=lb {
            let v = at(j, k)?;
            sum += v;
            if j > 0 && v == 1 {
                partner[k - 1] = Some(j - 1);
            }
        }
        if sum != 1 {
            return input(format!("column {} of a matching must sum to 1", k + 1));
        }
    }
    let r = alpha.ground_size();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut matched_beta = vec![false; lb];
    for (k, a) in alpha.blocks().iter().enumerate() {
        let mut b = a.clone();
        if let Some(j) = partner[k] {
            matched_beta[j] = true;
            b.extend(beta.blocks()[j].iter().map(|&x| r + x));
        }
        blocks.push(b);
    }
    for (j, bb) in beta.blocks().iter().enumerate() {
        if !matched_beta[j] {
            blocks.push(bb.iter().map(|&x| r + x).collect());
        }
    }
    PartitionDiagram::new(r, beta.ground_size(), SetPartition::new(r + beta.ground_size(), blocks)?)
}

/// `e_α = (1/|S|) Σ_{σ∈S} ξ_{q(σ)}` on `M^{(λ_1 − m, 1^m)}`, where
/// `S = S_{α_2} × S_{α_3} × …` and `m = α_2 + α_3 + …`.  The result carries
/// the characteristic-zero flag.
pub fn q_functor_idempotent(alpha: &ObjectLabel) -> Result<Morphism> {
    if alpha.l() != 1 {
        return input("expected an object over a single parameter");
    }
    let tail: Vec<i64> = alpha.tau().parts().to_vec();
    let m: i64 = tail.iter().sum();
    if alpha.sigma()[0] != -m {
        return input(format!("first entry must be L1-{m} so that the sizes add up"));
    }
    let m = m as usize;
    let target = ObjectLabel::new(vec![-(m as i64)], Composition::new(vec![1; m])?)?;
    // Permutations of 0..m preserving each consecutive block of the tail.
    let mut block_of = Vec::with_capacity(m);
    for (b, &len) in tail.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(b, len as usize));
    }
    let group: Vec<Vec<usize>> = permutations(m)
        .into_iter()
        .filter(|p| p.iter().enumerate().all(|(i, &j)| block_of[i] == block_of[j]))
        .collect();
    let weight = IVPoly::constant(1, Rational::new(1.into(), (group.len() as i64).into()));
    let mut terms = Vec::new();
    for p in &group {
        let mut grid = vec![AffineForm::constant(0); (m + 1) * (m + 1)];
        grid[0] = AffineForm::var(0, -(m as i64));
        for (i, &j) in p.iter().enumerate() {
            grid[(j + 1) * (m + 1) + i + 1] = AffineForm::constant(1);
        }
        terms.push((CosetMatrix::from_grid(1, m + 1, m + 1, &grid)?, weight.clone()));
    }
    Ok(Morphism::from_terms(target.clone(), target, terms)?.with_char_zero(true))
}

/// Closed-form Möbius coefficient of `E` in `x_D`, used as a cross-check.
pub fn mobius_coefficient(d: &PartitionDiagram, e: &PartitionDiagram) -> Option<i64> {
    if !e.blocks.is_coarsening_of(&d.blocks) {
        return None;
    }
    let lab = e.blocks.labels();
    let mut count = vec![0i64; e.num_blocks()];
    for b in d.blocks.blocks() {
        count[lab[b[0]]] += 1;
    }
    Some(count.iter().map(|&k| if (k - 1) % 2 == 0 { 1 } else { -1 } * (1..k).product::<i64>()).product())
}

/// Evaluate a diagram coefficient at `t`.
pub fn eval_t(c: &IVPoly, t: i64) -> Rational {
    c.eval(&[rat(t)]).expect("one-variable coefficient")
}

fn output_counts(diag: &PartitionDiagram, d: usize, index: &[usize]) -> HashMap<Vec<usize>, u64> {
    let mut out = HashMap::new();
    for o in diagram_outputs(diag, d, index) {
        *out.entry(o).or_insert(0) += 1;
    }
    out
}

/// `F_d(D_1 ∘ D_2) = F_d(D_1) F_d(D_2)` for all composable diagrams with
/// every row of size at most `max_size`.  Returns `(checks, failures)`.
pub fn functoriality_check(max_size: usize, d: usize) -> Result<(usize, usize)> {
    let (mut checks, mut failures) = (0, 0);
    for m in 0..=max_size {
        for n in 0..=max_size {
            for k in 0..=max_size {
                let ins = multi_indices(d, k);
                for d1 in all_diagrams(m, n) {
                    for d2 in all_diagrams(k, m) {
                        let (r, d3) = d1.compose(&d2)?;
                        let scale = (d as u64).pow(r as u32);
                        checks += 1;
                        let ok = ins.iter().all(|idx| {
                            let mut lhs: HashMap<Vec<usize>, u64> = HashMap::new();
                            for (mid, c) in output_counts(&d2, d, idx) {
                                for (o, c1) in output_counts(&d1, d, &mid) {
                                    *lhs.entry(o).or_insert(0) += c * c1;
                                }
                            }
                            let mut rhs = output_counts(&d3, d, idx);
                            rhs.values_mut().for_each(|v| *v *= scale);
                            lhs.retain(|_, v| *v != 0);
                            rhs.retain(|_, v| *v != 0);
                            lhs == rhs
                        });
                        if !ok {
                            failures += 1;
                        }
                    }
                }
            }
        }
    }
    Ok((checks, failures))
}

/// For each `(m, n)` with `m + n ≤ max_total`: `F_d` kills every `x_D` with
/// more than `d` blocks, and the kernel has exactly that dimension.
pub fn kernel_check(max_total: usize, d: usize) -> Result<(usize, usize)> {
    let (mut checks, mut failures) = (0, 0);
    for m in 0..=max_total {
        for n in 0..=max_total - m {
            let diagrams = all_diagrams(m, n);
            let mut rows = Vec::with_capacity(diagrams.len());
            let mut big = 0;
            let mut killed = true;
            for diag in &diagrams {
                rows.push(fd_vector(&DiagramCombo::single(diag.clone()), d)?);
                if diag.num_blocks() > d {
                    big += 1;
                    killed &= fd_vector(&xd_expand(diag), d)?.iter().all(Zero::is_zero);
                }
            }
            let kernel = diagrams.len() - crate::linalg::rank(rows);
            checks += 1;
            if !killed || kernel != big {
                failures += 1;
            }
        }
    }
    Ok((checks, failures))
}

/// Matching matrix for `α`-blocks matched into `β`-blocks (`pairs[k] = Some(j)`).
fn matching_matrix(la: usize, lb: usize, pairs: &[Option<usize>], d: usize) -> Vec<Vec<i64>> {
    let mut q = vec![vec![0i64; la + 1]; lb + 1];
    let mut hit = vec![false; lb];
    for (k, p) in pairs.iter().enumerate() {
        match *p {
            Some(j) => {
                q[j + 1][k + 1] = 1;
                hit[j] = true;
            }
            None => q[0][k + 1] = 1,
        }
    }
    for (j, &h) in hit.iter().enumerate() {
        if !h {
            q[j + 1][0] = 1;
        }
    }
    let unmatched_a = pairs.iter().filter(|p| p.is_none()).count();
    q[0][0] = d as i64 - lb as i64 - unmatched_a as i64;
    q
}

fn matchings(la: usize, lb: usize) -> Vec<Vec<Option<usize>>> {
    fn go(k: usize, la: usize, lb: usize, used: &mut [bool], cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if k == la {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(k + 1, la, lb, used, cur, out);
        cur.pop();
        for j in 0..lb {
            if !used[j] {
                used[j] = true;
                cur.push(Some(j));
                go(k + 1, la, lb, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, la, lb, &mut vec![false; lb], &mut Vec::new(), &mut out);
    out
}

/// `F_d(x_{D(q)})` against the coset action of `ξ_q` on `N^α → N^β`, for set
/// partitions of at most `max_size` points into at most `max_blocks` blocks.
pub fn bridge_check(max_size: usize, max_blocks: usize, d: usize) -> Result<(usize, usize)> {
    let parts: Vec<SetPartition> = (0..=max_size)
        .flat_map(crate::combinatorics::all_set_partitions)
        .filter(|p| p.num_blocks() <= max_blocks.min(d))
        .collect();
    let (mut checks, mut failures) = (0, 0);
    for alpha in &parts {
        for beta in &parts {
            let (la, lb) = (alpha.num_blocks(), beta.num_blocks());
            for pairs in matchings(la, lb) {
                let mut qm = matching_matrix(la, lb, &pairs, d);
                if qm[0][0] < 0 {
                    // No such coset: x_{D(q)} needs more than d distinct labels.
                    qm[0][0] = 0;
                    let diag = diagram_from_coset(&CosetMatrix::concrete(&qm)?, alpha, beta)?;
                    checks += 1;
                    if !fd_vector(&xd_expand(&diag), d)?.iter().all(Zero::is_zero) {
                        failures += 1;
                    }
                    continue;
                }
                let q = CosetMatrix::concrete(&qm)?;
                let diag = diagram_from_coset(&q, alpha, beta)?;
                let oracle = crate::schur::oracle_coset_action(&qm, d)?;
                let x = xd_expand(&diag);
                let cod_words = crate::schur::coset_words(oracle.codomain());
                let cod_index: HashMap<&Vec<u8>, usize> = cod_words.iter().enumerate().map(|(i, w)| (w, i)).collect();
                let alpha_labels = alpha.labels();
                let mut ok = true;
                let mut seen = 0;
                for (j, w) in crate::schur::coset_words(oracle.domain()).iter().enumerate() {
                    // Letter k+1 of the word sits at the vector carried by block k.
                    let mut at = vec![0usize; la];
                    for (p, &c) in w.iter().enumerate() {
                        if c > 0 {
                            at[c as usize - 1] = p;
                        }
                    }
                    let index: Vec<usize> = alpha_labels.iter().map(|&b| at[b]).collect();
                    for (o, v) in act_on_tensor(&x, d, &index)? {
                        let mut word = vec![0u8; d];
                        let mut valid = true;
                        for (b, block) in beta.blocks().iter().enumerate() {
                            let val = o[block[0]];
                            valid &= block.iter().all(|&p| o[p] == val) && word[val] == 0;
                            word[val] = b as u8 + 1;
                        }
                        let i = if valid { cod_index.get(&word).copied() } else { None };
                        match i {
                            Some(i) if oracle.get(i, j) == v => seen += 1,
                            _ => ok = false,
                        }
                    }
                }
                checks += 1;
                if !ok || seen != oracle.entries().len() {
                    failures += 1;
                }
            }
        }
    }
    Ok((checks, failures))
}
